//! Command-line front end.
//!
//! Subcommands: `bifpoints`, `continue`, `diagram`, `evolve`, `bounds`,
//! `verify`.  Exit codes: 0 on success, 1 on a numerical or I/O
//! failure, 2 on a usage error.

use crate::bifurcation::{self, BifurcationCandidate};
use crate::continuation::{
    self, Branch, BranchOrigin, BranchPoint, ContinuationConfig, Event, EventKind,
};
use crate::evolve::{self, EvolveOptions, RampSchedule};
use crate::io;
use crate::params::Mode;
use crate::plot;
use crate::presets::{self, Preset};
use crate::trivial;
use crate::validate;
use crate::{bounds, Error, FieldState, Grid, Parameters};
use clap::{Args, CommandFactory, Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// How a command failed, deciding the exit code.
enum Failure {
    /// Bad flags or an unresolvable selection: exit 2.
    Usage(String),
    /// A numerical or I/O failure at valid usage: exit 1.
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

#[derive(Parser)]
#[command(
    name = "lle-comb",
    version,
    about = "Stationary frequency combs of the Lugiato-Lefever equation: \
             bifurcation points, branch continuation, a-priori bounds, and \
             dynamic detuning"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the bifurcation points on a constant-solution curve
    Bifpoints(BifpointsArgs),
    /// Trace a solution branch from a bifurcation point
    #[command(name = "continue")]
    Continue(ContinueArgs),
    /// Render a bifurcation diagram from branch files
    Diagram(DiagramArgs),
    /// Integrate the time-dependent equation under a detuning schedule
    Evolve(EvolveArgs),
    /// Print the explicit a-priori estimates at a parameter point
    Bounds(BoundsArgs),
    /// Re-check every invariant on stored branch and state files
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CurveOpts {
    /// Curve family: hat (detuning-swept) or bar (forcing-swept)
    #[arg(long)]
    mode: Mode,
    /// Dispersion coefficient (nonzero)
    #[arg(long, allow_negative_numbers = true)]
    d: f64,
    /// Fixed detuning (bar mode only)
    #[arg(long, allow_negative_numbers = true)]
    zeta: Option<f64>,
    /// Fixed forcing (hat mode only)
    #[arg(long, allow_negative_numbers = true)]
    f: Option<f64>,
}

impl CurveOpts {
    fn fixed(&self) -> std::result::Result<f64, Failure> {
        fixed_for(self.mode, self.zeta, self.f)
    }
}

fn fixed_for(
    mode: Mode,
    zeta: Option<f64>,
    f: Option<f64>,
) -> std::result::Result<f64, Failure> {
    match (mode, zeta, f) {
        (Mode::Hat, None, Some(v)) => Ok(v),
        (Mode::Bar, Some(v), None) => Ok(v),
        (Mode::Hat, _, None) => Err(Failure::Usage(
            "hat mode sweeps the detuning; give the fixed forcing with --f".into(),
        )),
        (Mode::Bar, None, _) => Err(Failure::Usage(
            "bar mode sweeps the forcing; give the fixed detuning with --zeta".into(),
        )),
        (Mode::Hat, Some(_), _) => Err(Failure::Usage(
            "--zeta is the swept parameter in hat mode; only --f may be fixed".into(),
        )),
        (Mode::Bar, _, Some(_)) => Err(Failure::Usage(
            "--f is the swept parameter in bar mode; only --zeta may be fixed".into(),
        )),
    }
}

#[derive(Args)]
struct BifpointsArgs {
    #[command(flatten)]
    curve: CurveOpts,
    /// Largest mode number scanned on forcing-swept curves
    #[arg(long, default_value_t = 16)]
    k_max: u32,
    /// Include the k=0 fold points of the detuning-swept curve
    #[arg(long)]
    folds: bool,
    /// Emit JSON instead of CSV
    #[arg(long)]
    json: bool,
    /// Also write the table to this file (relative to the output directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output directory (default: $COMB_OUT_DIR, then the working directory)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ContinueArgs {
    /// Run every branch of a bundled preset (sec5.1 to sec5.4)
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    zeta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    f: Option<f64>,
    /// Mode number of the launching bifurcation point
    #[arg(long)]
    k: Option<u32>,
    /// Sign selecting which point of the mode-k pair (+1 or -1)
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<i32>,
    /// Curve-coordinate hint when (k, sigma) alone is ambiguous
    #[arg(long, allow_negative_numbers = true)]
    coord: Option<f64>,
    /// Collocation nodes on [0, pi]
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Arclength step budget (0 writes just the launching point)
    #[arg(long)]
    max_steps: Option<usize>,
    /// Eigenvalues tracked per step for secondary-bifurcation detection
    /// (0 disables spectrum tracking)
    #[arg(long)]
    eig_modes: Option<usize>,
    /// Initial arclength step
    #[arg(long)]
    ds_init: Option<f64>,
    /// Largest arclength step
    #[arg(long)]
    ds_max: Option<f64>,
    /// Output file stem (default derived from the selector)
    #[arg(long)]
    stem: Option<String>,
    /// Write a state sidecar for every point, not just ends and events
    #[arg(long)]
    save_all_states: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct DiagramArgs {
    /// Branch CSV file (repeatable)
    #[arg(long = "branch")]
    branches: Vec<PathBuf>,
    /// Skip the constant-solution curve overlay
    #[arg(long)]
    no_trivial: bool,
    /// Label event markers
    #[arg(long)]
    labels: bool,
    /// Curve family (only needed without branch files)
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    zeta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    f: Option<f64>,
    /// Diagram title
    #[arg(long)]
    title: Option<String>,
    /// Output SVG file (relative to the output directory)
    #[arg(long, default_value = "diagram.svg")]
    out: PathBuf,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct EvolveArgs {
    /// Run a bundled scenario (sec5.5)
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    f: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    /// Constant detuning (manual runs without a ramp)
    #[arg(long, allow_negative_numbers = true)]
    zeta: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Noise seed (overrides the preset's)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    noise_amp: Option<f64>,
    /// Record a scalar sample every this many steps
    #[arg(long)]
    sample_every: Option<usize>,
    /// Evenly spaced full-state snapshots to keep
    #[arg(long)]
    keep_snapshots: Option<usize>,
    /// Start from a stored state file instead of the constant solution
    #[arg(long)]
    initial: Option<PathBuf>,
    /// Output CSV (snapshot/spectrum files are named after it)
    #[arg(long, default_value = "evolution.csv")]
    out: PathBuf,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, allow_negative_numbers = true)]
    d: f64,
    #[arg(long, allow_negative_numbers = true)]
    f: f64,
    /// Optional detuning for the window membership check
    #[arg(long, allow_negative_numbers = true)]
    zeta: Option<f64>,
    /// Also write the report to this file (relative to the output directory)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Branch CSV files to re-check
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Residual tolerance for stored states
    #[arg(long, default_value_t = 1e-8)]
    residual_tol: f64,
}

/// Run with the process arguments; returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Run with explicit arguments (first element is the program name);
/// returns the exit code.
pub fn run_from<I>(args: I) -> i32
where
    I: IntoIterator,
    I::Item: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.cmd {
        Cmd::Bifpoints(a) => cmd_bifpoints(a),
        Cmd::Continue(a) => cmd_continue(a),
        Cmd::Diagram(a) => cmd_diagram(a),
        Cmd::Evolve(a) => cmd_evolve(a),
        Cmd::Bounds(a) => cmd_bounds(a),
        Cmd::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            let _ = Cli::command().print_help();
            2
        }
    }
}

fn check_d(d: f64) -> std::result::Result<(), Failure> {
    if d == 0.0 || !d.is_finite() {
        return Err(Failure::Usage(format!(
            "the dispersion coefficient must be finite and nonzero, got {d}"
        )));
    }
    Ok(())
}

fn cmd_bifpoints(args: BifpointsArgs) -> CmdResult {
    check_d(args.curve.d)?;
    let fixed = args.curve.fixed()?;
    let cands = bifurcation::enumerate(
        args.curve.mode,
        fixed,
        args.curve.d,
        args.k_max,
        args.folds,
    )?;
    let rendered = if args.json {
        io::candidates_json(&cands)?
    } else {
        io::candidates_csv(&cands)
    };
    print!("{rendered}");
    if let Some(out) = &args.out {
        let path = io::resolve_out_dir(args.out_dir.as_deref()).join(out);
        io::atomic_write(&path, &rendered)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

/// Resolve `(k, sigma, coord hint)` against the candidate table; an
/// ambiguous or empty selection is a usage error listing the table.
fn select_candidate(
    cands: &[BifurcationCandidate],
    k: u32,
    sigma: i32,
    coord: Option<f64>,
) -> std::result::Result<BifurcationCandidate, Failure> {
    let matched: Vec<&BifurcationCandidate> = cands
        .iter()
        .filter(|c| c.k == k && c.sigma == sigma)
        .collect();
    let narrowed: Vec<&BifurcationCandidate> = match coord {
        Some(hint) => matched
            .iter()
            .copied()
            .filter(|c| (c.coord - hint).abs() < 1e-3)
            .collect(),
        None => matched.clone(),
    };
    match narrowed.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(Failure::Usage(format!(
            "no bifurcation point matches k={k} sigma={sigma}{}; available:\n{}",
            coord
                .map(|c| format!(" coord~{c}"))
                .unwrap_or_default(),
            io::candidates_csv(cands)
        ))),
        several => Err(Failure::Usage(format!(
            "k={k} sigma={sigma} is ambiguous ({} points); add --coord to pick one:\n{}",
            several.len(),
            io::candidates_csv(cands)
        ))),
    }
}

fn branch_stem(prefix: Option<&str>, mode: Mode, k: u32, sigma: i32) -> String {
    match prefix {
        Some(p) => format!("{p}_k{k}_sigma{sigma}"),
        None => format!("branch_{mode}_k{k}_sigma{sigma}"),
    }
}

fn summarize_branch(branch: &Branch, label: &str) {
    let last = branch.points.last().expect("branches are never empty");
    println!(
        "{label}: {} points, terminal {}={:.6}, |a|_2={:.6}",
        branch.points.len(),
        branch.mode.active_name(),
        last.param,
        last.l2norm
    );
    for e in &branch.events {
        println!("  event at step {}: {} ({})", e.index, e.kind, e.detail);
    }
}

/// True when the branch ran out of step size before any terminator —
/// the continuation failed to converge further.
fn stalled(branch: &Branch) -> bool {
    branch
        .events
        .iter()
        .any(|e| e.kind == EventKind::StepLimit && e.detail.contains("step size"))
}

fn run_one_branch(
    cand: &BifurcationCandidate,
    d: f64,
    grid: &Arc<Grid>,
    cfg: &ContinuationConfig,
    dir: &Path,
    stem: &str,
    save_all: bool,
    max_steps_zero: bool,
) -> std::result::Result<bool, Failure> {
    let branch = if max_steps_zero {
        // A zero budget records just the launching point.
        let state = FieldState::from_constant_state(grid.clone(), &cand.state);
        let l2norm = state.l2_norm();
        Branch {
            mode: cand.mode,
            d,
            fixed: cand.fixed_param(d),
            origin: BranchOrigin::PrimaryBifurcation {
                k: cand.k,
                sigma: cand.sigma,
                coord: cand.coord,
            },
            points: vec![BranchPoint {
                param: cand.param,
                state,
                l2norm,
                min_eig: f64::NAN,
            }],
            events: vec![Event {
                index: 0,
                kind: EventKind::StepLimit,
                detail: "step budget 0 exhausted".into(),
            }],
        }
    } else {
        continuation::continue_from_bifurcation(cand, d, grid, cfg)?
    };
    let path = dir.join(format!("{stem}.csv"));
    let written = io::write_branch(&path, &branch, save_all)?;
    summarize_branch(&branch, stem);
    println!("  wrote {} files under {}", written.len(), dir.display());
    Ok(stalled(&branch))
}

fn cmd_continue(args: ContinueArgs) -> CmdResult {
    let dir = io::resolve_out_dir(args.out_dir.as_deref());
    let mut config = ContinuationConfig::default();
    if let Some(v) = args.eig_modes {
        config.eig_modes = v;
    }
    if let Some(v) = args.ds_init {
        config.ds_init = v;
    }
    if let Some(v) = args.ds_max {
        config.ds_max = v;
    }

    if let Some(name) = &args.preset {
        let loaded =
            presets::load(name).map_err(|e| Failure::Usage(e.to_string()))?;
        let Preset::Continuation(preset) = loaded else {
            return Err(Failure::Usage(format!(
                "preset {name} is not a continuation scenario"
            )));
        };
        let mut cfg = preset.config();
        if let Some(v) = args.eig_modes {
            cfg.eig_modes = v;
        }
        if let Some(v) = args.max_steps {
            cfg.max_steps = v;
        }
        let n = if args.n != 256 { args.n } else { preset.n };
        let grid = Grid::new(n)?;
        let cands =
            bifurcation::enumerate(preset.mode, preset.fixed, preset.d, 32, false)?;
        let mut any_stalled = false;
        for sel in &preset.branches {
            let cand = select_candidate(&cands, sel.k, sel.sigma, sel.coord)?;
            let stem = branch_stem(Some(name), preset.mode, sel.k, sel.sigma);
            any_stalled |= run_one_branch(
                &cand,
                preset.d,
                &grid,
                &cfg,
                &dir,
                &stem,
                args.save_all_states,
                args.max_steps == Some(0),
            )?;
        }
        if any_stalled {
            return Err(Failure::Run(
                "one or more branches stopped on step-size exhaustion".into(),
            ));
        }
        return Ok(());
    }

    let (Some(mode), Some(d), Some(k), Some(sigma)) = (args.mode, args.d, args.k, args.sigma)
    else {
        return Err(Failure::Usage(
            "continue needs either --preset or all of --mode, --d, --k, --sigma".into(),
        ));
    };
    check_d(d)?;
    if sigma != 1 && sigma != -1 {
        return Err(Failure::Usage(format!("--sigma must be +1 or -1, got {sigma}")));
    }
    let fixed = fixed_for(mode, args.zeta, args.f)?;
    if let Some(v) = args.max_steps {
        config.max_steps = v;
    }
    let grid = Grid::new(args.n)?;
    let cands = bifurcation::enumerate(mode, fixed, d, k.max(16), false)?;
    let cand = select_candidate(&cands, k, sigma, args.coord)?;
    let stem = match &args.stem {
        Some(s) => s.clone(),
        None => branch_stem(None, mode, k, sigma),
    };
    let stalled = run_one_branch(
        &cand,
        d,
        &grid,
        &config,
        &dir,
        &stem,
        args.save_all_states,
        args.max_steps == Some(0),
    )?;
    if stalled {
        return Err(Failure::Run(
            "continuation stopped on step-size exhaustion; partial branch written".into(),
        ));
    }
    Ok(())
}

fn cmd_diagram(args: DiagramArgs) -> CmdResult {
    let mut branches = Vec::new();
    for path in &args.branches {
        let stored = io::load_branch(path)
            .map_err(|e| Failure::Run(format!("cannot load {}: {e}", path.display())))?;
        branches.push(stored);
    }
    let (mode, d, fixed) = match branches.first() {
        Some(b) => (b.mode, b.d, b.fixed),
        None => {
            let Some(mode) = args.mode else {
                return Err(Failure::Usage(
                    "a diagram without branch files needs --mode, --d and the fixed parameter"
                        .into(),
                ));
            };
            let Some(d) = args.d else {
                return Err(Failure::Usage("missing --d for the overlay-only diagram".into()));
            };
            check_d(d)?;
            (mode, d, fixed_for(mode, args.zeta, args.f)?)
        }
    };
    let title = args.title.clone().unwrap_or_else(|| {
        format!(
            "{} curve, d={}, {}={}",
            mode,
            d,
            mode.fixed_name(),
            fixed
        )
    });
    let spec = plot::DiagramSpec {
        mode,
        d,
        fixed,
        overlay_trivial: !args.no_trivial,
        branches,
        label_events: args.labels,
        title,
    };
    let svg = plot::diagram_svg(&spec)?;
    let path = io::resolve_out_dir(args.out_dir.as_deref()).join(&args.out);
    io::atomic_write(&path, &svg)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_evolve(args: EvolveArgs) -> CmdResult {
    let (f, d, ramp, t_final, mut opts, n) = match &args.preset {
        Some(name) => {
            let loaded =
                presets::load(name).map_err(|e| Failure::Usage(e.to_string()))?;
            let Preset::Evolution(preset) = loaded else {
                return Err(Failure::Usage(format!(
                    "preset {name} is not an evolution scenario"
                )));
            };
            let ramp = preset.ramp_schedule()?;
            let opts = preset.options(args.seed);
            (preset.f, preset.d, ramp, preset.t_final, opts, preset.n)
        }
        None => {
            let (Some(f), Some(d), Some(zeta), Some(t_final)) =
                (args.f, args.d, args.zeta, args.t_final)
            else {
                return Err(Failure::Usage(
                    "evolve needs either --preset or all of --f, --d, --zeta, --t-final".into(),
                ));
            };
            check_d(d)?;
            let opts = EvolveOptions {
                seed: args.seed.unwrap_or(0),
                ..EvolveOptions::default()
            };
            (f, d, RampSchedule::constant(zeta), t_final, opts, 256)
        }
    };
    if let Some(v) = args.dt {
        opts.dt = v;
    }
    if let Some(v) = args.noise_amp {
        opts.noise_amp = v;
    }
    if let Some(v) = args.sample_every {
        opts.sample_every = v;
    }
    if let Some(v) = args.keep_snapshots {
        opts.keep_snapshots = v;
    }
    let t_final = args.t_final.unwrap_or(t_final);
    let n = args.n.unwrap_or(n);

    let u0 = match &args.initial {
        Some(path) => {
            let (_, state) = io::load_state_csv(path)
                .map_err(|e| Failure::Run(format!("cannot load {}: {e}", path.display())))?;
            state
        }
        None => {
            let zeta0 = ramp.value_at(0.0);
            let mut coords = trivial::bar_coords_for_forcing(zeta0, f);
            coords.sort_by(f64::total_cmp);
            let s = coords.first().copied().ok_or_else(|| {
                Failure::Run(format!(
                    "no constant solution with forcing {f} at detuning {zeta0} to start from"
                ))
            })?;
            let state = trivial::bar_state(s, zeta0)?;
            FieldState::from_constant_state(Grid::new(n)?, &state)
        }
    };

    let traj = evolve::evolve(&u0, f, d, &ramp, t_final, &opts)?;
    let dir = io::resolve_out_dir(args.out_dir.as_deref());
    let path = dir.join(&args.out);
    let written = io::write_trajectory(&path, &traj, f, d)?;
    let last = traj.samples.last().expect("at least the initial sample");
    println!(
        "evolved to t={:.3}: |a|_2={:.6}, zeta={:.4}, {} modulus maxima",
        last.t,
        last.l2norm,
        last.zeta,
        traj.final_state.modulus_maxima_count(0.05)
    );
    println!("wrote {} files under {}", written.len(), dir.display());
    if traj.aborted {
        return Err(Failure::Run(
            "the trajectory blew up; partial output written".into(),
        ));
    }
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> CmdResult {
    check_d(args.d)?;
    let report = bounds::report(args.d, args.f, args.zeta);
    let rendered = io::report_json(&report)?;
    print!("{rendered}");
    if let Some(out) = &args.out {
        let path = io::resolve_out_dir(args.out_dir.as_deref()).join(out);
        io::atomic_write(&path, &rendered)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let mut failures = 0usize;
    for path in &args.paths {
        let stored = io::load_branch(path)
            .map_err(|e| Failure::Run(format!("cannot load {}: {e}", path.display())))?;
        if stored.states.is_empty() {
            println!("{}: no state sidecars to check", path.display());
            failures += 1;
            continue;
        }
        let mut file_ok = true;
        for (step, state) in &stored.states {
            let row = &stored.rows[*step];
            let p: Parameters = match stored.parameters_at(*step) {
                Ok(p) => p,
                Err(e) => {
                    println!("{} step {step}: FAIL ({e})", path.display());
                    file_ok = false;
                    continue;
                }
            };
            let report = validate::validate(state, &p);
            let norm_gap = (state.l2_norm() - row.l2norm).abs();
            let mut problems = Vec::new();
            if !report.passes(args.residual_tol) {
                if report.residual_max > args.residual_tol {
                    problems.push(format!("residual {:.3e}", report.residual_max));
                }
                if report.mean_identity_defect.abs() > 1e-8 {
                    problems.push(format!(
                        "mean identity {:.3e}",
                        report.mean_identity_defect
                    ));
                }
                if report.energy_identity_defect.abs() > 1e-8 {
                    problems.push(format!(
                        "energy identity {:.3e}",
                        report.energy_identity_defect
                    ));
                }
                if report.sup_modulus > report.sup_bound * (1.0 + 1e-9) + 1e-12 {
                    problems.push(format!(
                        "sup {:.6} exceeds bound {:.6}",
                        report.sup_modulus, report.sup_bound
                    ));
                }
                if report.in_detuning_window == Some(false) {
                    problems.push("outside the nonconstant detuning window".into());
                }
                if problems.is_empty() {
                    problems.push("validation failed".into());
                }
            }
            if norm_gap > 1e-9 {
                problems.push(format!("stored l2norm off by {norm_gap:.3e}"));
            }
            if problems.is_empty() {
                println!("{} step {step}: OK", path.display());
            } else {
                println!(
                    "{} step {step}: FAIL ({})",
                    path.display(),
                    problems.join("; ")
                );
                file_ok = false;
            }
        }
        if !file_ok {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(Failure::Run(format!(
            "{failures} file(s) failed verification"
        )));
    }
    println!("all checks passed");
    Ok(())
}
