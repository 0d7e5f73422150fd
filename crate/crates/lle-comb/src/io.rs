//! Persistence: CSV/JSON writers and readers for candidate tables,
//! branches, states, and trajectories.
//!
//! Numeric cells use 17-significant-digit scientific notation, which
//! round-trips every double exactly; only the human-facing candidate
//! table truncates to six fractional digits.  All files are written
//! atomically (temporary file in the target directory, then rename).

use crate::bifurcation::BifurcationCandidate;
use crate::continuation::Branch;
use crate::evolve::{spectrum, Trajectory};
use crate::field::FieldState;
use crate::grid::Grid;
use crate::params::Mode;
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Lossless rendering of a double (17 significant digits).
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Output directory resolution: explicit flag, then the `COMB_OUT_DIR`
/// environment variable, then the working directory.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var("COMB_OUT_DIR") {
        Ok(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from("."),
    }
}

/// Write `content` to `path` atomically, creating parent directories.
pub fn atomic_write(path: &Path, content: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let tmp = tempfile::NamedTempFile::new_in(&dir)?;
    std::fs::write(tmp.path(), content)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

// ---------------------------------------------------------------------
// Candidate tables
// ---------------------------------------------------------------------

/// Candidate table as CSV: `k,sigma,coord,param,S,T,marginal` with six
/// fractional digits on the numeric columns.
pub fn candidates_csv(cands: &[BifurcationCandidate]) -> String {
    let mut out = String::from("k,sigma,coord,param,S,T,marginal\n");
    for c in cands {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{},{},{}",
            c.k, c.sigma, c.coord, c.param, c.s_ok, c.t_ok, c.marginal
        );
    }
    out
}

#[derive(Serialize)]
struct CandidateRow {
    k: u32,
    sigma: i32,
    coord: f64,
    param: f64,
    s_ok: bool,
    t_ok: bool,
    marginal: bool,
}

/// Candidate table as pretty-printed JSON with full-precision numbers.
pub fn candidates_json(cands: &[BifurcationCandidate]) -> Result<String> {
    let rows: Vec<CandidateRow> = cands
        .iter()
        .map(|c| CandidateRow {
            k: c.k,
            sigma: c.sigma,
            coord: c.coord,
            param: c.param,
            s_ok: c.s_ok,
            t_ok: c.t_ok,
            marginal: c.marginal,
        })
        .collect();
    Ok(serde_json::to_string_pretty(&rows)? + "\n")
}

// ---------------------------------------------------------------------
// State files
// ---------------------------------------------------------------------

fn state_csv(headers: &[(&str, String)], u: &FieldState) -> String {
    let mut out = String::new();
    for (k, v) in headers {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str("x,a1,a2\n");
    let nodes = u.grid().nodes();
    for ((x, v1), v2) in nodes.iter().zip(u.a1()).zip(u.a2()) {
        let _ = writeln!(out, "{},{},{}", fmt_full(*x), fmt_full(*v1), fmt_full(*v2));
    }
    out
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    f64::from_str(s.trim()).map_err(|_| Error::Format(format!("bad {what}: {s:?}")))
}

fn split_headers(content: &str) -> (BTreeMap<String, String>, Vec<&str>) {
    let mut headers = BTreeMap::new();
    let mut body = Vec::new();
    for line in content.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once('=') {
                headers.insert(k.trim().to_string(), v.trim().to_string());
            }
        } else if !line.trim().is_empty() {
            body.push(line);
        }
    }
    (headers, body)
}

/// Read a state file back: header key/values plus the field itself.
pub fn load_state_csv(path: &Path) -> Result<(BTreeMap<String, String>, FieldState)> {
    let content = std::fs::read_to_string(path)?;
    let (headers, body) = split_headers(&content);
    let mut rows = body.into_iter();
    match rows.next() {
        Some(h) if h.trim() == "x,a1,a2" => {}
        other => {
            return Err(Error::Format(format!(
                "{}: expected 'x,a1,a2' header, got {other:?}",
                path.display()
            )))
        }
    }
    let mut a1 = Vec::new();
    let mut a2 = Vec::new();
    let mut xs = Vec::new();
    for line in rows {
        let mut cells = line.split(',');
        let (x, v1, v2) = match (cells.next(), cells.next(), cells.next(), cells.next()) {
            (Some(x), Some(v1), Some(v2), None) => (x, v1, v2),
            _ => {
                return Err(Error::Format(format!(
                    "{}: expected 3 cells in {line:?}",
                    path.display()
                )))
            }
        };
        xs.push(parse_f64(x, "x")?);
        a1.push(parse_f64(v1, "a1")?);
        a2.push(parse_f64(v2, "a2")?);
    }
    let grid = Grid::new(a1.len())?;
    for (x, gx) in xs.iter().zip(grid.nodes()) {
        if (x - gx).abs() > 1e-12 {
            return Err(Error::Format(format!(
                "{}: node coordinate {x} does not match the uniform grid",
                path.display()
            )));
        }
    }
    let state = FieldState::from_nodal(grid, a1, a2)?;
    Ok((headers, state))
}

// ---------------------------------------------------------------------
// Branch files
// ---------------------------------------------------------------------

fn sidecar_path(branch_path: &Path, step: usize) -> PathBuf {
    let stem = branch_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "branch".into());
    branch_path.with_file_name(format!("{stem}_state_{step:05}.csv"))
}

/// Write a branch CSV plus state sidecars; returns the written paths
/// (branch file first).  Sidecars cover the first point, the last point
/// and every event index, or every point when `save_all_states` is set.
pub fn write_branch(path: &Path, branch: &Branch, save_all_states: bool) -> Result<Vec<PathBuf>> {
    if branch.points.is_empty() {
        return Err(Error::Precondition("refusing to write an empty branch".into()));
    }
    let n = branch.points[0].state.grid().n();
    let mut out = String::new();
    let _ = writeln!(out, "# mode={}", branch.mode);
    let _ = writeln!(out, "# d={}", fmt_full(branch.d));
    let _ = writeln!(out, "# fixed={}", fmt_full(branch.fixed));
    let _ = writeln!(out, "# n={n}");
    let _ = writeln!(out, "# origin={}", branch.origin);
    out.push_str("step,param,l2norm,min_eig,event\n");

    let mut flagged: Vec<usize> = vec![0, branch.points.len() - 1];
    for (i, p) in branch.points.iter().enumerate() {
        let events: Vec<String> = branch
            .events
            .iter()
            .filter(|e| e.index == i)
            .map(|e| {
                if e.detail.is_empty() {
                    e.kind.to_string()
                } else {
                    format!("{} {}", e.kind, e.detail)
                }
            })
            .collect();
        if !events.is_empty() {
            flagged.push(i);
        }
        let cell = events.join("|");
        debug_assert!(!cell.contains(','), "comma in event cell {cell:?}");
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i,
            fmt_full(p.param),
            fmt_full(p.l2norm),
            fmt_full(p.min_eig),
            cell
        );
    }
    atomic_write(path, &out)?;
    let mut written = vec![path.to_path_buf()];

    flagged.sort_unstable();
    flagged.dedup();
    let steps: Vec<usize> = if save_all_states {
        (0..branch.points.len()).collect()
    } else {
        flagged
    };
    for step in steps {
        let p = &branch.points[step];
        let side = sidecar_path(path, step);
        let content = state_csv(
            &[
                ("step", step.to_string()),
                ("param", fmt_full(p.param)),
            ]
            .map(|(k, v)| (k, v)),
            &p.state,
        );
        atomic_write(&side, &content)?;
        written.push(side);
    }
    Ok(written)
}

/// One parsed branch-table row.
#[derive(Debug, Clone)]
pub struct StoredRow {
    pub step: usize,
    pub param: f64,
    pub l2norm: f64,
    pub min_eig: f64,
    /// `(kind, detail)` pairs parsed from the event cell.
    pub events: Vec<(String, String)>,
}

/// A branch as persisted: the scalar table plus whichever state
/// sidecars exist on disk.
#[derive(Debug, Clone)]
pub struct StoredBranch {
    pub mode: Mode,
    pub d: f64,
    pub fixed: f64,
    pub n: usize,
    pub origin: String,
    pub rows: Vec<StoredRow>,
    pub states: BTreeMap<usize, FieldState>,
}

impl StoredBranch {
    /// Active-parameter / fixed-parameter split for row `i`.
    pub fn parameters_at(&self, i: usize) -> Result<crate::params::Parameters> {
        let row = self
            .rows
            .get(i)
            .ok_or_else(|| Error::Precondition(format!("row {i} out of range")))?;
        let (zeta, f) = match self.mode {
            Mode::Hat => (row.param, self.fixed),
            Mode::Bar => (self.fixed, row.param),
        };
        crate::params::Parameters::new(self.d, zeta, f)
    }
}

fn required<'a>(headers: &'a BTreeMap<String, String>, key: &str, path: &Path) -> Result<&'a str> {
    headers
        .get(key)
        .map(|s| s.as_str())
        .ok_or_else(|| Error::Format(format!("{}: missing '# {key}=' header", path.display())))
}

/// Load a branch CSV and any sidecar state files next to it.
pub fn load_branch(path: &Path) -> Result<StoredBranch> {
    let content = std::fs::read_to_string(path)?;
    let (headers, body) = split_headers(&content);
    let mode = Mode::from_str(required(&headers, "mode", path)?)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let d = parse_f64(required(&headers, "d", path)?, "d")?;
    let fixed = parse_f64(required(&headers, "fixed", path)?, "fixed")?;
    let n: usize = required(&headers, "n", path)?
        .parse()
        .map_err(|_| Error::Format(format!("{}: bad n header", path.display())))?;
    let origin = required(&headers, "origin", path)?.to_string();

    let mut rows_iter = body.into_iter();
    match rows_iter.next() {
        Some(h) if h.trim() == "step,param,l2norm,min_eig,event" => {}
        other => {
            return Err(Error::Format(format!(
                "{}: expected branch column header, got {other:?}",
                path.display()
            )))
        }
    }
    let mut rows = Vec::new();
    for line in rows_iter {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 5 {
            return Err(Error::Format(format!(
                "{}: expected 5 cells in {line:?}",
                path.display()
            )));
        }
        let step: usize = cells[0]
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("{}: bad step {:?}", path.display(), cells[0])))?;
        let events = cells[4]
            .trim()
            .split('|')
            .filter(|t| !t.is_empty())
            .map(|tok| match tok.split_once(' ') {
                Some((kind, detail)) => (kind.to_string(), detail.to_string()),
                None => (tok.to_string(), String::new()),
            })
            .collect();
        rows.push(StoredRow {
            step,
            param: parse_f64(cells[1], "param")?,
            l2norm: parse_f64(cells[2], "l2norm")?,
            min_eig: parse_f64(cells[3], "min_eig")?,
            events,
        });
    }
    for (i, row) in rows.iter().enumerate() {
        if row.step != i {
            return Err(Error::Format(format!(
                "{}: step column must count 0..; found {} at row {i}",
                path.display(),
                row.step
            )));
        }
    }

    let mut states = BTreeMap::new();
    for row in &rows {
        let side = sidecar_path(path, row.step);
        if side.exists() {
            let (_, state) = load_state_csv(&side)?;
            if state.grid().n() != n {
                return Err(Error::Format(format!(
                    "{}: sidecar has {} nodes, branch header says {n}",
                    side.display(),
                    state.grid().n()
                )));
            }
            states.insert(row.step, state);
        }
    }
    Ok(StoredBranch {
        mode,
        d,
        fixed,
        n,
        origin,
        rows,
        states,
    })
}

// ---------------------------------------------------------------------
// Trajectory files
// ---------------------------------------------------------------------

/// Write a trajectory: scalar samples, snapshot states keyed by sample
/// index, the final state, and the final state's comb spectrum.
/// Returns the written paths (main CSV first).
pub fn write_trajectory(
    path: &Path,
    traj: &Trajectory,
    f: f64,
    d: f64,
) -> Result<Vec<PathBuf>> {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trajectory".into());
    let n = traj.final_state.grid().n();
    let mut out = String::new();
    let _ = writeln!(out, "# f={}", fmt_full(f));
    let _ = writeln!(out, "# d={}", fmt_full(d));
    let _ = writeln!(out, "# n={n}");
    let _ = writeln!(out, "# aborted={}", traj.aborted);
    out.push_str("t,zeta,l2norm\n");
    for s in &traj.samples {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_full(s.t),
            fmt_full(s.zeta),
            fmt_full(s.l2norm)
        );
    }
    atomic_write(path, &out)?;
    let mut written = vec![path.to_path_buf()];

    for (idx, (t, state)) in traj.snapshots.iter().enumerate() {
        let side = path.with_file_name(format!("{stem}_snapshot_{idx:04}.csv"));
        atomic_write(&side, &state_csv(&[("t", fmt_full(*t))], state))?;
        written.push(side);
    }

    let final_path = path.with_file_name(format!("{stem}_final_state.csv"));
    let t_final = traj.samples.last().map(|s| s.t).unwrap_or(0.0);
    atomic_write(
        &final_path,
        &state_csv(&[("t", fmt_full(t_final))], &traj.final_state),
    )?;
    written.push(final_path);

    let spec_path = path.with_file_name(format!("{stem}_spectrum.csv"));
    let mut sp = String::from("k,log_abs_ak\n");
    for (k, v) in spectrum(&traj.final_state).iter().enumerate() {
        let _ = writeln!(sp, "{k},{v:.6}");
    }
    atomic_write(&spec_path, &sp)?;
    written.push(spec_path);
    Ok(written)
}

/// Serialize any report as pretty JSON (used for bounds reports).
pub fn report_json<T: Serialize>(report: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}
