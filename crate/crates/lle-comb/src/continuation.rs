//! Pseudo-arclength continuation of nonconstant solution branches.
//!
//! A branch is seeded at a simple branching point of a constant-solution
//! curve by solving a pinned system that pushes the state a fixed small
//! amount along the kernel direction, then traced by secant
//! predictor / bordered-corrector steps that treat the active parameter as
//! an unknown alongside the state.  Along the way the tracer records
//! turning points (sign flips of the tangent's parameter component),
//! candidate secondary branching points (the smallest eigenvalue
//! magnitude of the linearization dipping toward zero away from any
//! turning point), and termination events: returning to the
//! constant-solution curve, exhausting the step budget, or running out of
//! step size.

use crate::bifurcation::{self, BifurcationCandidate};
use crate::eigen;
use crate::field::FieldState;
use crate::grid::Grid;
use crate::newton::{solve_linear, NewtonOptions};
use crate::operator::{self, LinearizedOperator};
use crate::params::{Mode, Parameters};
use crate::trivial;
use crate::{bounds, Error, Result};
use nalgebra::{DMatrix, DVector};
use std::fmt;
use std::sync::Arc;

/// Corrector iteration cap per continuation step.
const CORRECTOR_MAX_ITERS: usize = 10;

/// Hard ceiling on the configured step budget.
const STEP_HARD_CAP: usize = 20_000;

/// Distance from the constant-solution curve beyond which the branch
/// counts as having escaped its origin (arming the return detector).
const ESCAPE_DISTANCE: f64 = 1e-2;

/// Distance below which the step size is capped at half the remaining
/// distance to the constant curve.  A branch heading into a junction
/// then contracts onto it geometrically instead of stepping across and
/// spiralling through extra loops; the window must be wider than the
/// largest step, or a full step can jump over it.
const CAPTURE_DISTANCE: f64 = 6e-2;

/// Largest smallest-eigenvalue magnitude that still counts as a
/// secondary-branching dip.  Complex-pair collisions and avoided
/// crossings bottom out well above this; a genuine crossing passes
/// through zero, so its sampled minimum sits far below.
const SECONDARY_DIP_THRESHOLD: f64 = 8e-2;

/// Largest refined smallest-eigenvalue magnitude accepted as an actual
/// crossing when landing on a flagged point before switching.
const SECONDARY_DIP_ACCEPT: f64 = 1e-3;

/// Tuning knobs for branch tracing.
#[derive(Debug, Clone)]
pub struct ContinuationConfig {
    /// Initial arclength step.
    pub ds_init: f64,
    /// Smallest admissible step; running below it ends the branch.
    pub ds_min: f64,
    /// Largest admissible step.
    pub ds_max: f64,
    /// Step budget (clamped to a hard ceiling).
    pub max_steps: usize,
    /// Distance to the constant-solution curve that counts as a return.
    pub trivial_return_tol: f64,
    /// Number of smallest-magnitude eigenvalues tracked per point; `0`
    /// disables spectrum tracking (and with it the detection of
    /// secondary-branching dips).
    pub eig_modes: usize,
    /// Inner nonlinear-solver options (tolerance is shared by the
    /// corrector).
    pub newton: NewtonOptions,
    /// Pinning amplitude used when stepping off a branching point.
    pub switch_eps: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            ds_init: 1e-2,
            ds_min: 1e-5,
            ds_max: 5e-2,
            max_steps: 2000,
            trivial_return_tol: 1e-5,
            eig_modes: 6,
            newton: NewtonOptions::default(),
            switch_eps: 1e-3,
        }
    }
}

/// One accepted point on a branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    /// Active parameter value (detuning or forcing, by branch mode).
    pub param: f64,
    /// The solution state.
    pub state: FieldState,
    /// `L^2` norm of the state over the half period.
    pub l2norm: f64,
    /// Leading-eigenvalue stability indicator (`NaN` when not computed).
    pub min_eig: f64,
}

/// Things the tracer notices along a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// The active parameter reversed direction.
    TurningPoint,
    /// The stability indicator changed sign away from a turning point.
    SecondaryBifCandidate,
    /// The branch came back to the constant-solution curve.
    TrivialReturn,
    /// The step budget or the minimum step size was exhausted.
    StepLimit,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EventKind::TurningPoint => "turning_point",
            EventKind::SecondaryBifCandidate => "secondary_bif_candidate",
            EventKind::TrivialReturn => "trivial_return",
            EventKind::StepLimit => "step_limit",
        };
        f.write_str(s)
    }
}

/// An event anchored to a branch point index.
#[derive(Debug, Clone)]
pub struct Event {
    pub index: usize,
    pub kind: EventKind,
    /// Free-form context; never contains commas (it travels in CSV).
    pub detail: String,
}

/// Where a branch came from.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchOrigin {
    /// Seeded at a branching point of a constant-solution curve.
    PrimaryBifurcation { k: u32, sigma: i32, coord: f64 },
    /// Seeded at a secondary candidate of another branch.
    SecondarySwitch { parent_index: usize },
    /// Reconstructed from a file.
    Resumed,
}

impl fmt::Display for BranchOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchOrigin::PrimaryBifurcation { k, sigma, coord } => {
                write!(f, "bifurcation k={k} sigma={sigma} coord={coord:.12e}")
            }
            BranchOrigin::SecondarySwitch { parent_index } => {
                write!(f, "secondary parent_index={parent_index}")
            }
            BranchOrigin::Resumed => f.write_str("resumed"),
        }
    }
}

/// A traced branch of nonconstant solutions.
#[derive(Debug, Clone)]
pub struct Branch {
    pub mode: Mode,
    pub d: f64,
    /// The parameter held fixed along the branch.
    pub fixed: f64,
    pub origin: BranchOrigin,
    pub points: Vec<BranchPoint>,
    pub events: Vec<Event>,
}

impl Branch {
    /// Full parameter set at a branch point.
    pub fn parameters_at(&self, index: usize) -> Result<Parameters> {
        params_for(self.mode, self.d, self.fixed, self.points[index].param)
    }
}

/// Seed data handed to the tracer: the anchor point (on or near the
/// originating object) and the first point off it.
pub struct BranchSeed {
    pub mode: Mode,
    pub d: f64,
    pub fixed: f64,
    pub anchor: (FieldState, f64),
    pub first: (FieldState, f64),
    pub origin: BranchOrigin,
}

/// Parameters with the branch's active slot filled in.
fn params_for(mode: Mode, d: f64, fixed: f64, active: f64) -> Result<Parameters> {
    match mode {
        Mode::Hat => Parameters::new(d, active, fixed),
        Mode::Bar => Parameters::new(d, fixed, active),
    }
}

/// Weighted inner product on stacked coefficient vectors, matching the
/// `L^2` product on the half period.
fn w_dot(weights: &[f64], x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let n = weights.len();
    let mut acc = 0.0;
    for m in 0..n {
        acc += weights[m] * (x[m] * y[m] + x[n + m] * y[n + m]);
    }
    acc
}

/// How close a state/parameter pair sits to the relevant
/// constant-solution curve.
#[derive(Debug, Clone, Copy)]
pub struct TrivialProximity {
    /// `max(sup-norm state distance, active-parameter gap)`, minimized
    /// over the curve.
    pub distance: f64,
    /// Curve coordinate achieving the minimum.
    pub coord: f64,
}

/// Distance from a state (at an active-parameter value) to the
/// constant-solution curve of the given family, in the combined
/// sup-norm/parameter metric.
pub fn distance_to_trivial(
    u: &FieldState,
    active: f64,
    mode: Mode,
    fixed: f64,
) -> TrivialProximity {
    let [min1, max1, min2, max2] = u.extrema();
    let dist_at = |coord: f64| -> f64 {
        let (a1, a2, param) = match mode {
            Mode::Hat => {
                let r = 1.0 - coord * coord;
                if r <= 0.0 {
                    return f64::INFINITY;
                }
                let a1 = fixed * r;
                let a2 = -fixed * coord * r.sqrt();
                (a1, a2, trivial::zeta_hat(coord, fixed))
            }
            Mode::Bar => {
                let w = coord * coord - fixed;
                let den = (1.0 + w * w).sqrt();
                (coord / den, coord * w / den, coord * den)
            }
        };
        let state_gap = (max1 - a1)
            .abs()
            .max((min1 - a1).abs())
            .max((max2 - a2).abs())
            .max((min2 - a2).abs());
        state_gap.max((active - param).abs())
    };

    let (lo, hi) = match mode {
        Mode::Hat => (-1.0 + 1e-9, 1.0 - 1e-9),
        Mode::Bar => (0.0, 1.0 + 2.0 * u.sup_modulus()),
    };
    let samples = 10_000;
    let mut best = (f64::INFINITY, lo);
    for i in 0..=samples {
        let c = lo + (hi - lo) * i as f64 / samples as f64;
        let v = dist_at(c);
        if v < best.0 {
            best = (v, c);
        }
    }
    // Golden-section refinement around the best sample.
    let span = (hi - lo) / samples as f64;
    let (mut a, mut b) = ((best.1 - span).max(lo), (best.1 + span).min(hi));
    let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut dd = a + phi * (b - a);
    let (mut fc, mut fd) = (dist_at(c), dist_at(dd));
    for _ in 0..80 {
        if fc < fd {
            b = dd;
            dd = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = dist_at(c);
        } else {
            a = c;
            c = dd;
            fc = fd;
            dd = a + phi * (b - a);
            fd = dist_at(dd);
        }
    }
    let coord = 0.5 * (a + b);
    let refined = dist_at(coord);
    if refined < best.0 {
        best = (refined, coord);
    }
    TrivialProximity {
        distance: best.0,
        coord: best.1,
    }
}

/// Solve the pinned system: the stationary equations augmented with the
/// linear constraint that the component of `u - u0` along `phi` equals
/// `eps * ||phi||^2` in the weighted product, with the active parameter
/// free.  Returns the solved state and parameter.
fn pinned_solve(
    grid: &Arc<Grid>,
    mode: Mode,
    d: f64,
    fixed: f64,
    base: &FieldState,
    base_active: f64,
    phi: &FieldState,
    eps: f64,
    newton: &NewtonOptions,
) -> Result<(FieldState, f64)> {
    let n = grid.n();
    let weights = grid.coef_weights();
    let (phi1, phi2) = phi.coeffs();
    let phi_vec = operator::stack(&phi1, &phi2);
    let phi_w_sq = w_dot(&weights, &phi_vec, &phi_vec);
    let (b1, b2) = base.coeffs();
    let base_vec = operator::stack(&b1, &b2);

    let mut x = &base_vec + eps * &phi_vec;
    let mut lambda = base_active;
    for _iter in 0..newton.max_iter {
        let (c1, c2) = operator::unstack(&x);
        let u = FieldState::from_coeffs(grid.clone(), &c1, &c2)?;
        let p = params_for(mode, d, fixed, lambda)?;
        let (r1, r2) = operator::residual_coeffs(grid, &c1, &c2, &p);
        let residual_nodal = grid
            .synthesize(&r1)
            .iter()
            .chain(&grid.synthesize(&r2))
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let constraint = w_dot(&weights, &(&x - &base_vec), &phi_vec) - eps * phi_w_sq;
        if residual_nodal <= newton.tol && constraint.abs() <= newton.tol * (1.0 + eps) {
            return Ok((u, lambda));
        }

        let jac = operator::jacobian(&u, &p);
        let jac_param = operator::jacobian_param(&u, mode);
        let mut bordered = DMatrix::<f64>::zeros(2 * n + 1, 2 * n + 1);
        bordered.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&jac);
        for i in 0..2 * n {
            bordered[(i, 2 * n)] = jac_param[i];
            bordered[(2 * n, i)] = weights[i % n] * phi_vec[i];
        }
        let mut rhs = DVector::<f64>::zeros(2 * n + 1);
        rhs.rows_mut(0, 2 * n).copy_from(&operator::stack(&r1, &r2));
        rhs[2 * n] = constraint;
        let delta = solve_linear(bordered, &rhs)?;
        x -= delta.rows(0, 2 * n);
        lambda -= delta[2 * n];
    }
    Err(Error::NoConvergence {
        iterations: newton.max_iter,
        residual: f64::NAN,
    })
}

/// Step off a simple branching point of a constant-solution curve onto
/// the nonconstant branch it names.  Fails when the point does not
/// satisfy the simplicity or transversality conditions (the branch is
/// then not guaranteed to exist) or when it is a pure turning point.
pub fn branch_switch(
    cand: &BifurcationCandidate,
    d: f64,
    grid: &Arc<Grid>,
    cfg: &ContinuationConfig,
) -> Result<(FieldState, f64)> {
    if cand.k == 0 {
        return Err(Error::Precondition(
            "turning points of the constant curve do not carry a nonconstant branch".into(),
        ));
    }
    if !cand.s_ok || !cand.t_ok {
        return Err(Error::Precondition(format!(
            "branching conditions fail at k={} sigma={} (simplicity {}; transversality {})",
            cand.k, cand.sigma, cand.s_ok, cand.t_ok
        )));
    }
    let base = FieldState::from_constant_state(grid.clone(), &cand.state);
    let n = grid.n();
    let mut phi1 = vec![0.0; n];
    let mut phi2 = vec![0.0; n];
    phi1[cand.k as usize] = cand.kernel.alpha[0];
    phi2[cand.k as usize] = cand.kernel.alpha[1];
    let phi = FieldState::from_coeffs(grid.clone(), &phi1, &phi2)?;

    let mut last_err = None;
    for escalation in 0..3 {
        let eps = cfg.switch_eps * 10.0_f64.powi(escalation);
        match pinned_solve(
            grid,
            cand.mode,
            d,
            cand.fixed_param(d),
            &base,
            cand.param,
            &phi,
            eps,
            &cfg.newton,
        ) {
            Ok((u, lambda)) => {
                let prox = distance_to_trivial(&u, lambda, cand.mode, cand.fixed_param(d));
                if prox.distance < 0.3 * eps {
                    last_err = Some(Error::NoConvergence {
                        iterations: cfg.newton.max_iter,
                        residual: prox.distance,
                    });
                    continue;
                }
                return Ok((u, lambda));
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Precondition("switch failed".into())))
}

impl BifurcationCandidate {
    /// The parameter held fixed on this candidate's curve.
    pub(crate) fn fixed_param(&self, d: f64) -> f64 {
        let _ = d;
        match self.mode {
            Mode::Hat => self.state.f,
            Mode::Bar => self.state.zeta,
        }
    }
}

/// Seed and trace the branch emanating from a branching point.
pub fn continue_from_bifurcation(
    cand: &BifurcationCandidate,
    d: f64,
    grid: &Arc<Grid>,
    cfg: &ContinuationConfig,
) -> Result<Branch> {
    let (first, first_active) = branch_switch(cand, d, grid, cfg)?;
    let anchor = FieldState::from_constant_state(grid.clone(), &cand.state);
    let seed = BranchSeed {
        mode: cand.mode,
        d,
        fixed: cand.fixed_param(d),
        anchor: (anchor, cand.param),
        first: (first, first_active),
        origin: BranchOrigin::PrimaryBifurcation {
            k: cand.k,
            sigma: cand.sigma,
            coord: cand.coord,
        },
    };
    continue_branch(seed, cfg)
}

/// Slide along the parent branch around flagged point `at` (the segment
/// on either side) to the minimum of the smallest eigenvalue magnitude
/// of the linearization.  Each probe corrects a linear interpolant back
/// onto the branch (pinned orthogonal to the local segment secant), then
/// measures the spectrum there.  Fails when the minimum stays away from
/// zero — a shallow spectral dip or an avoided crossing, not an actual
/// branch crossing.
fn refine_dip_min(
    parent: &Branch,
    at: usize,
    cfg: &ContinuationConfig,
) -> Result<(FieldState, f64)> {
    let last = parent.points.len() - 1;
    let (lo_idx, hi_idx) = (at.saturating_sub(1), (at + 1).min(last));
    if hi_idx - lo_idx == 0 {
        return Err(Error::Precondition(
            "flagged point has no neighboring segment".into(),
        ));
    }
    let grid = parent.points[at].state.grid().clone();
    let weights = grid.coef_weights();
    let m = cfg.eig_modes.max(6);

    let stacked = |u: &FieldState| {
        let (c1, c2) = u.coeffs();
        operator::stack(&c1, &c2)
    };
    let xs: Vec<DVector<f64>> = (lo_idx..=hi_idx)
        .map(|i| stacked(&parent.points[i].state))
        .collect();
    let ls: Vec<f64> = (lo_idx..=hi_idx).map(|i| parent.points[i].param).collect();

    // theta in [0, segments] measures a piecewise-linear position along
    // the point chain.  A probe that fails to correct or to deliver a
    // spectrum reports an infinite magnitude so the search avoids it.
    let probe = |theta: f64| -> Result<(Option<(FieldState, f64)>, f64)> {
        let seg = (theta.floor() as usize).min(xs.len() - 2);
        let w = theta - seg as f64;
        let (xa, xb) = (&xs[seg], &xs[seg + 1]);
        let (la, lb) = (ls[seg], ls[seg + 1]);
        let mut tau = xb - xa;
        let mut tau_lambda = lb - la;
        let norm = (w_dot(&weights, &tau, &tau) + tau_lambda * tau_lambda).sqrt();
        if norm == 0.0 {
            return Err(Error::Precondition("degenerate parent segment".into()));
        }
        tau /= norm;
        tau_lambda /= norm;
        let x_pred = xa + w * (xb - xa);
        let lambda_pred = la + w * (lb - la);
        match correct(
            &grid,
            parent.mode,
            parent.d,
            parent.fixed,
            &weights,
            &tau,
            tau_lambda,
            x_pred,
            lambda_pred,
            cfg,
        ) {
            Ok((x, lambda, _)) => {
                let (c1, c2) = operator::unstack(&x);
                let u = FieldState::from_coeffs(grid.clone(), &c1, &c2)?;
                let p = params_for(parent.mode, parent.d, parent.fixed, lambda)?;
                let (_, dip) = point_spectrum(&u, &p, m);
                if dip.is_finite() {
                    Ok((Some((u, lambda)), dip))
                } else {
                    Ok((None, f64::INFINITY))
                }
            }
            Err(Error::NoConvergence { .. }) | Err(Error::SingularLinearization(_)) => {
                Ok((None, f64::INFINITY))
            }
            Err(e) => Err(e),
        }
    };

    let mut best: Option<(FieldState, f64, f64)> = None;
    let eval = |theta: f64, best: &mut Option<(FieldState, f64, f64)>| -> Result<f64> {
        let (hit, dip) = probe(theta)?;
        if let Some((u, lambda)) = hit {
            if best.as_ref().map_or(true, |&(_, _, bd)| dip < bd) {
                *best = Some((u, lambda, dip));
            }
        }
        Ok(dip)
    };

    // Golden-section search for the magnitude minimum over the chain.
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (0.0_f64, (xs.len() - 1) as f64);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut best)?;
    let mut fd = eval(d, &mut best)?;
    for _ in 0..28 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut best)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut best)?;
        }
    }
    let Some((u, lambda, dip)) = best else {
        return Err(Error::Eigen(
            "no corrector probe converged near the flagged point".into(),
        ));
    };
    if dip > SECONDARY_DIP_ACCEPT {
        return Err(Error::Eigen(format!(
            "smallest eigenvalue magnitude does not vanish near the flagged \
             point (best {dip:.3e}); shallow spectral dip rather than a \
             branch crossing"
        )));
    }
    Ok((u, lambda))
}

/// Switch onto the branch flagged by a secondary-bifurcation event and
/// trace it.
///
/// A crossing has two departing directions (either sign of the kernel
/// direction).  `direction: None` takes whichever converges first;
/// `Some(s)` insists on the arc with `sign(s)`, so a caller can trace
/// both sides of the crossing.
pub fn switch_at(
    parent: &Branch,
    event_index: usize,
    direction: Option<f64>,
    cfg: &ContinuationConfig,
) -> Result<Branch> {
    let event = parent
        .events
        .get(event_index)
        .ok_or_else(|| Error::Precondition(format!("no event {event_index}")))?;
    if event.kind != EventKind::SecondaryBifCandidate {
        return Err(Error::Precondition(format!(
            "event {event_index} is {} (need {})",
            event.kind,
            EventKind::SecondaryBifCandidate
        )));
    }
    let at = event.index;

    // Land exactly on the crossing first: at the flagged point itself the
    // critical eigenvalue is already away from zero, and both the kernel
    // extraction and the pinned solve need the singularity.
    let (base_state, base_param) = if parent.points.len() >= 2 {
        refine_dip_min(parent, at, cfg)?
    } else {
        (parent.points[at].state.clone(), parent.points[at].param)
    };
    let grid = base_state.grid().clone();
    let p = params_for(parent.mode, parent.d, parent.fixed, base_param)?;
    let op = LinearizedOperator::new(&base_state, &p);
    let phi = eigen::near_kernel_vector(&op)?;

    // The pinned solve may slide back onto the parent branch; require the
    // converged state to leave it transversally.
    let weights = grid.coef_weights();
    let (prev_idx, next_idx) = if at == 0 { (0, 1) } else { (at - 1, at) };
    let (t1, t2) = parent.points[next_idx].state.coeffs();
    let (s1, s2) = parent.points[prev_idx].state.coeffs();
    let mut tau = operator::stack(&t1, &t2) - operator::stack(&s1, &s2);
    let tau_norm = w_dot(&weights, &tau, &tau).sqrt();
    if tau_norm > 0.0 {
        tau /= tau_norm;
    }
    let (phi1, phi2) = phi.coeffs();
    let phi_vec = operator::stack(&phi1, &phi2);
    let phi_w = w_dot(&weights, &phi_vec, &phi_vec).sqrt();

    let signs: &[f64] = match direction {
        None => &[1.0, -1.0],
        Some(s) if s >= 0.0 => &[1.0],
        Some(_) => &[-1.0],
    };
    let mut last_err = None;
    for escalation in 0..3 {
        for &sign in signs {
            let eps = sign * cfg.switch_eps * 10.0_f64.powi(escalation);
            match pinned_solve(
                &grid,
                parent.mode,
                parent.d,
                parent.fixed,
                &base_state,
                base_param,
                &phi,
                eps,
                &cfg.newton,
            ) {
                Ok((u, lambda)) => {
                    let (u1, u2) = u.coeffs();
                    let (b1, b2) = base_state.coeffs();
                    let delta = operator::stack(&u1, &u2) - operator::stack(&b1, &b2);
                    let along = w_dot(&weights, &delta, &tau);
                    let orth_sq = w_dot(&weights, &delta, &delta) - along * along;
                    if orth_sq.max(0.0).sqrt() < 0.3 * eps.abs() * phi_w {
                        last_err = Some(Error::NoConvergence {
                            iterations: cfg.newton.max_iter,
                            residual: orth_sq.max(0.0).sqrt(),
                        });
                        continue;
                    }
                    let seed = BranchSeed {
                        mode: parent.mode,
                        d: parent.d,
                        fixed: parent.fixed,
                        anchor: (base_state.clone(), base_param),
                        first: (u, lambda),
                        origin: BranchOrigin::SecondarySwitch { parent_index: at },
                    };
                    return continue_branch(seed, cfg);
                }
                Err(e) => last_err = Some(e),
            }
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Precondition("secondary switch failed".into())))
}

/// Stability indicator and smallest eigenvalue magnitude for a point
/// (both `NaN` when disabled or failed).  The indicator tracks the most
/// negative essentially-real eigenvalue and is what gets stored with the
/// point; the magnitude is the dip signal used to spot branch crossings,
/// where an eigenvalue passes through zero.
fn point_spectrum(u: &FieldState, p: &Parameters, eig_modes: usize) -> (f64, f64) {
    if eig_modes == 0 {
        return (f64::NAN, f64::NAN);
    }
    let op = LinearizedOperator::new(u, p);
    match eigen::smallest_eigenvalues(&op, eig_modes) {
        Ok(eigs) => {
            let dip = eigs
                .iter()
                .map(|l| l.norm())
                .fold(f64::INFINITY, f64::min);
            (eigen::min_eig_indicator(&eigs), dip)
        }
        Err(_) => (f64::NAN, f64::NAN),
    }
}

/// Check that the branch has not walked out of the parameter window that
/// admits nonconstant solutions (with unit slack).
fn check_window(mode: Mode, d: f64, fixed: f64, active: f64) -> Result<()> {
    let (zeta, f) = match mode {
        Mode::Hat => (active, fixed),
        Mode::Bar => (fixed, active),
    };
    let (lo, hi) = bounds::nonconstant_window(d, f);
    let v = d.signum() * zeta;
    if v < lo - 1.0 || v > hi + 1.0 {
        return Err(Error::TheoryViolation(format!(
            "nonconstant branch left the admissible detuning window: \
             sign(d)*zeta = {v:.6} outside [{lo:.6}, {hi:.6}] with unit slack"
        )));
    }
    Ok(())
}

/// Describe the constant-curve neighborhood where a branch returned.
fn return_detail(mode: Mode, fixed: f64, d: f64, prox: &TrivialProximity) -> String {
    let candidates = bifurcation::enumerate(mode, fixed, d, 64, false).unwrap_or_default();
    let nearest = candidates
        .iter()
        .min_by(|a, b| {
            (a.coord - prox.coord)
                .abs()
                .total_cmp(&(b.coord - prox.coord).abs())
        });
    match nearest {
        Some(c) => format!(
            "distance {:.3e}; curve coord {:.8}; nearest candidate k={} sigma={} coord {:.8}",
            prox.distance, prox.coord, c.k, c.sigma, c.coord
        ),
        None => format!("distance {:.3e}; curve coord {:.8}", prox.distance, prox.coord),
    }
}

/// Trace a branch from a seed pair.
pub fn continue_branch(seed: BranchSeed, cfg: &ContinuationConfig) -> Result<Branch> {
    let BranchSeed {
        mode,
        d,
        fixed,
        anchor,
        first,
        origin,
    } = seed;
    let grid = first.0.grid().clone();
    let n = grid.n();
    let weights = grid.coef_weights();
    let max_steps = cfg.max_steps.min(STEP_HARD_CAP);

    let mut branch = Branch {
        mode,
        d,
        fixed,
        origin,
        points: Vec::new(),
        events: Vec::new(),
    };
    let mut dips: Vec<f64> = Vec::new();
    for (state, active) in [anchor, first] {
        let p = params_for(mode, d, fixed, active)?;
        let (min_eig, dip) = point_spectrum(&state, &p, cfg.eig_modes);
        branch.points.push(BranchPoint {
            param: active,
            l2norm: state.l2_norm(),
            min_eig,
            state,
        });
        dips.push(dip);
    }

    let stacked = |u: &FieldState| {
        let (c1, c2) = u.coeffs();
        operator::stack(&c1, &c2)
    };
    let mut x_prev = stacked(&branch.points[0].state);
    let mut x_cur = stacked(&branch.points[1].state);
    let mut lambda_prev = branch.points[0].param;
    let mut lambda_cur = branch.points[1].param;

    let mut ds = cfg.ds_init;
    let mut escaped = {
        let prox = distance_to_trivial(&branch.points[1].state, lambda_cur, mode, fixed);
        prox.distance > ESCAPE_DISTANCE
    };
    let mut prev_tangent_lambda_sign = 0.0_f64;
    let mut closest: Option<(f64, usize)> = None;

    for _step in 0..max_steps {
        // Secant tangent, unit length in the weighted metric.
        let mut tau = &x_cur - &x_prev;
        let mut tau_lambda = lambda_cur - lambda_prev;
        let norm = (w_dot(&weights, &tau, &tau) + tau_lambda * tau_lambda).sqrt();
        if norm == 0.0 {
            branch.events.push(Event {
                index: branch.points.len() - 1,
                kind: EventKind::StepLimit,
                detail: "degenerate tangent".into(),
            });
            break;
        }
        tau /= norm;
        tau_lambda /= norm;

        // Predict, then correct in the hyperplane orthogonal to the
        // tangent; halve the step until the corrector lands.
        let mut accepted: Option<(DVector<f64>, f64, usize)> = None;
        while accepted.is_none() {
            let x_pred = &x_cur + ds * &tau;
            let lambda_pred = lambda_cur + ds * tau_lambda;
            match correct(
                &grid, mode, d, fixed, &weights, &tau, tau_lambda, x_pred, lambda_pred, cfg,
            ) {
                Ok(hit) => accepted = Some(hit),
                Err(Error::NoConvergence { .. }) | Err(Error::SingularLinearization(_)) => {
                    ds *= 0.5;
                    if ds < cfg.ds_min {
                        break;
                    }
                }
                Err(e) => return Err(e),
            }
        }
        let Some((x_new, lambda_new, iters)) = accepted else {
            branch.events.push(Event {
                index: branch.points.len() - 1,
                kind: EventKind::StepLimit,
                detail: "step size exhausted".into(),
            });
            break;
        };

        check_window(mode, d, fixed, lambda_new)?;

        let (c1, c2) = operator::unstack(&x_new);
        debug_assert_eq!(c1.len(), n);
        let u_new = FieldState::from_coeffs(grid.clone(), &c1, &c2)?;
        let p_new = params_for(mode, d, fixed, lambda_new)?;
        let (min_eig, dip) = point_spectrum(&u_new, &p_new, cfg.eig_modes);
        let index = branch.points.len();
        branch.points.push(BranchPoint {
            param: lambda_new,
            state: u_new.clone(),
            l2norm: u_new.l2_norm(),
            min_eig,
        });
        dips.push(dip);

        // Turning point: the secant's parameter component changed sign.
        let new_sign = if tau_lambda == 0.0 {
            prev_tangent_lambda_sign
        } else {
            tau_lambda.signum()
        };
        let cur_secant_lambda = lambda_new - lambda_cur;
        let cur_sign = if cur_secant_lambda == 0.0 {
            new_sign
        } else {
            cur_secant_lambda.signum()
        };
        if prev_tangent_lambda_sign != 0.0 && cur_sign * prev_tangent_lambda_sign < 0.0 {
            let (i1, i2) = (index - 1, index);
            let extremal = if prev_tangent_lambda_sign > 0.0 {
                if branch.points[i1].param >= branch.points[i2].param {
                    i1
                } else {
                    i2
                }
            } else if branch.points[i1].param <= branch.points[i2].param {
                i1
            } else {
                i2
            };
            // A fold's own eigenvalue crossing shows up as a spectral
            // dip one or two steps before the fold is recognized; drop
            // any such candidate retroactively.
            branch.events.retain(|e| {
                e.kind != EventKind::SecondaryBifCandidate || extremal.abs_diff(e.index) > 3
            });
            branch.events.push(Event {
                index: extremal,
                kind: EventKind::TurningPoint,
                detail: format!("extremal param {:.10}", branch.points[extremal].param),
            });
        }
        prev_tangent_lambda_sign = cur_sign;

        let prox = distance_to_trivial(&u_new, lambda_new, mode, fixed);

        // Secondary candidate: the smallest eigenvalue magnitude of the
        // linearization makes a deep local minimum — a crossing passes
        // through zero, so the sampled magnitude dips into a V.  Skip
        // dips that belong to a turning point's own crossing and repeat
        // flags.  Junction approaches need no special case: there the
        // magnitude falls monotonically to zero, which is not a V, and
        // candidates next to a recognized return are cleaned up when the
        // return is recorded.
        if index >= 5 {
            let (a, b, c) = (dips[index - 2], dips[index - 1], dips[index]);
            let v_shaped =
                a.is_finite() && b.is_finite() && c.is_finite() && b < a && b <= c;
            if v_shaped && b < SECONDARY_DIP_THRESHOLD {
                let at = index - 1;
                let near_other = branch.events.iter().any(|e| {
                    (e.kind == EventKind::TurningPoint
                        || e.kind == EventKind::SecondaryBifCandidate)
                        && at.abs_diff(e.index) <= 3
                });
                if !near_other {
                    branch.events.push(Event {
                        index: at,
                        kind: EventKind::SecondaryBifCandidate,
                        detail: format!("eigenvalue magnitude dip {b:.6e}"),
                    });
                }
            }
        }

        // Return handling.
        if escaped && prox.distance < cfg.trivial_return_tol {
            branch.events.retain(|e| {
                e.kind != EventKind::SecondaryBifCandidate || index.abs_diff(e.index) > 3
            });
            branch.events.push(Event {
                index,
                kind: EventKind::TrivialReturn,
                detail: return_detail(mode, fixed, d, &prox),
            });
            break;
        }
        if escaped && prox.distance < 10.0 * cfg.trivial_return_tol {
            let arm = closest.map_or(true, |(best, _)| prox.distance < best);
            if arm {
                closest = Some((prox.distance, index));
            } else if let Some((best, at)) = closest {
                if prox.distance > 2.0 * best {
                    branch.points.truncate(at + 1);
                    let rec = &branch.points[at];
                    let rec_prox =
                        distance_to_trivial(&rec.state, rec.param, mode, fixed);
                    branch.events.retain(|e| {
                        e.index <= at
                            && (e.kind != EventKind::SecondaryBifCandidate
                                || at.abs_diff(e.index) > 3)
                    });
                    branch.events.push(Event {
                        index: at,
                        kind: EventKind::TrivialReturn,
                        detail: format!(
                            "closest approach; {}",
                            return_detail(mode, fixed, d, &rec_prox)
                        ),
                    });
                    break;
                }
            }
        }
        if !escaped && prox.distance > ESCAPE_DISTANCE {
            escaped = true;
        }

        // Step-size management: shrink near the constant curve, grow on
        // easy correctors.
        if escaped && prox.distance < CAPTURE_DISTANCE {
            ds = ds.min((prox.distance * 0.5).max(cfg.ds_min));
        }
        if iters < 4 {
            ds = (ds * 1.3).min(cfg.ds_max);
        }

        x_prev = x_cur;
        lambda_prev = lambda_cur;
        x_cur = x_new;
        lambda_cur = lambda_new;
    }

    let last = branch.points.len() - 1;
    let terminated = branch
        .events
        .iter()
        .any(|e| matches!(e.kind, EventKind::TrivialReturn | EventKind::StepLimit));
    if !terminated {
        branch.events.push(Event {
            index: last,
            kind: EventKind::StepLimit,
            detail: format!("step budget {max_steps} exhausted"),
        });
    }
    Ok(branch)
}

/// One bordered corrector solve.  Returns the corrected stacked state,
/// parameter, and iteration count.
#[allow(clippy::too_many_arguments)]
fn correct(
    grid: &Arc<Grid>,
    mode: Mode,
    d: f64,
    fixed: f64,
    weights: &[f64],
    tau: &DVector<f64>,
    tau_lambda: f64,
    x_pred: DVector<f64>,
    lambda_pred: f64,
    cfg: &ContinuationConfig,
) -> Result<(DVector<f64>, f64, usize)> {
    let n = grid.n();
    let mut x = x_pred.clone();
    let mut lambda = lambda_pred;
    for iter in 0..CORRECTOR_MAX_ITERS {
        let (c1, c2) = operator::unstack(&x);
        let u = FieldState::from_coeffs(grid.clone(), &c1, &c2)?;
        let p = params_for(mode, d, fixed, lambda)?;
        let (r1, r2) = operator::residual_coeffs(grid, &c1, &c2, &p);
        let residual_nodal = grid
            .synthesize(&r1)
            .iter()
            .chain(&grid.synthesize(&r2))
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let constraint =
            w_dot(weights, &(&x - &x_pred), tau) + (lambda - lambda_pred) * tau_lambda;
        if residual_nodal <= cfg.newton.tol && constraint.abs() <= cfg.newton.tol {
            return Ok((x, lambda, iter));
        }

        let jac = operator::jacobian(&u, &p);
        let jac_param = operator::jacobian_param(&u, mode);
        let mut bordered = DMatrix::<f64>::zeros(2 * n + 1, 2 * n + 1);
        bordered.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&jac);
        for i in 0..2 * n {
            bordered[(i, 2 * n)] = jac_param[i];
            bordered[(2 * n, i)] = weights[i % n] * tau[i];
        }
        bordered[(2 * n, 2 * n)] = tau_lambda;
        let mut rhs = DVector::<f64>::zeros(2 * n + 1);
        rhs.rows_mut(0, 2 * n).copy_from(&operator::stack(&r1, &r2));
        rhs[2 * n] = constraint;
        let delta = solve_linear(bordered, &rhs)?;
        let dx = delta.rows(0, 2 * n).clone_owned();
        if !delta[2 * n].is_finite() || dx.iter().any(|v| !v.is_finite()) {
            return Err(Error::NoConvergence {
                iterations: iter,
                residual: f64::NAN,
            });
        }
        x -= dx;
        lambda -= delta[2 * n];
    }
    Err(Error::NoConvergence {
        iterations: CORRECTOR_MAX_ITERS,
        residual: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate;

    fn bar_candidate(zeta: f64, d: f64, k: u32, sigma: i32) -> BifurcationCandidate {
        bifurcation::enumerate_bar(zeta, d, k + 2)
            .unwrap()
            .into_iter()
            .find(|c| c.k == k && c.sigma == sigma)
            .unwrap()
    }

    #[test]
    fn switch_leaves_curve_along_kernel_mode() {
        let grid = Grid::new(48).unwrap();
        let cand = bar_candidate(0.0, 0.1, 5, 1);
        let cfg = ContinuationConfig::default();
        let (u, lambda) = branch_switch(&cand, 0.1, &grid, &cfg).unwrap();
        assert!((lambda - cand.param).abs() < 0.1);
        let p = Parameters::new(0.1, 0.0, lambda).unwrap();
        assert!(operator::residual_max(&u, &p) < 1e-9);
        let (c1, c2) = u.coeffs();
        let at_k = (c1[5] * c1[5] + c2[5] * c2[5]).sqrt();
        let elsewhere: f64 = (1..48)
            .filter(|m| *m != 5)
            .map(|m| c1[m] * c1[m] + c2[m] * c2[m])
            .sum::<f64>()
            .sqrt();
        assert!(at_k > 1e-4, "kernel mode amplitude {at_k}");
        assert!(elsewhere < 0.5 * at_k, "off-mode mass {elsewhere}");
    }

    #[test]
    fn switch_refuses_failed_conditions() {
        let grid = Grid::new(32).unwrap();
        let mut cand = bar_candidate(0.0, 0.1, 5, 1);
        cand.s_ok = false;
        let cfg = ContinuationConfig::default();
        assert!(matches!(
            branch_switch(&cand, 0.1, &grid, &cfg),
            Err(Error::Precondition(_))
        ));
        let mut cand = bar_candidate(0.0, 0.1, 5, 1);
        cand.t_ok = false;
        assert!(matches!(
            branch_switch(&cand, 0.1, &grid, &cfg),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn traced_branch_keeps_seed_periodicity_and_validates() {
        let grid = Grid::new(64).unwrap();
        let cand = bar_candidate(0.0, 0.1, 5, 1);
        let cfg = ContinuationConfig {
            max_steps: 40,
            eig_modes: 0,
            ..ContinuationConfig::default()
        };
        let branch = continue_from_bifurcation(&cand, 0.1, &grid, &cfg).unwrap();
        assert!(branch.points.len() >= 10);
        for (i, pt) in branch.points.iter().enumerate().skip(1) {
            let p = branch.parameters_at(i).unwrap();
            let report = validate::validate(&pt.state, &p);
            assert!(report.passes(1e-8), "point {i}: {report:?}");
            // The branch inherits the 5-fold symmetry of its seed mode.
            let projected = pt.state.mode_multiple_projection(5);
            assert!(
                pt.state.max_abs_diff(&projected) < 1e-8,
                "point {i} breaks periodicity"
            );
        }
    }

    #[test]
    fn bar_branch_returns_at_companion_point() {
        let grid = Grid::new(64).unwrap();
        let cand = bar_candidate(0.0, 0.1, 5, 1);
        let cfg = ContinuationConfig::default();
        let branch = continue_from_bifurcation(&cand, 0.1, &grid, &cfg).unwrap();
        let ret = branch
            .events
            .iter()
            .find(|e| e.kind == EventKind::TrivialReturn)
            .expect("branch should land back on the constant curve");
        assert!(ret.detail.contains("k=5"), "detail: {}", ret.detail);
        // Terminal forcing matches the companion branching point.
        let terminal = branch.points.last().unwrap().param;
        let companion = bar_candidate(0.0, 0.1, 5, -1);
        assert!(
            (terminal - companion.param).abs() < 1e-2,
            "terminal {terminal} vs companion {}",
            companion.param
        );
        // No event detail may carry a comma or pipe (CSV cell and
        // multi-event joiner safety).
        for e in &branch.events {
            assert!(!e.detail.contains(','), "comma in {:?}", e.detail);
            assert!(!e.detail.contains('|'), "pipe in {:?}", e.detail);
        }
    }

    #[test]
    fn step_budget_is_an_event_not_an_error() {
        let grid = Grid::new(48).unwrap();
        let cand = bar_candidate(0.0, 0.1, 5, 1);
        let cfg = ContinuationConfig {
            max_steps: 8,
            eig_modes: 0,
            ..ContinuationConfig::default()
        };
        let branch = continue_from_bifurcation(&cand, 0.1, &grid, &cfg).unwrap();
        assert!(branch
            .events
            .iter()
            .any(|e| e.kind == EventKind::StepLimit));
        assert!(branch.points.len() <= 10);
    }

    #[test]
    fn arclength_spacing_respects_configured_bounds() {
        let grid = Grid::new(48).unwrap();
        let cand = bar_candidate(0.0, 0.1, 6, 1);
        let cfg = ContinuationConfig {
            max_steps: 60,
            eig_modes: 0,
            ..ContinuationConfig::default()
        };
        let branch = continue_from_bifurcation(&cand, 0.1, &grid, &cfg).unwrap();
        let weights = grid.coef_weights();
        for w in branch.points.windows(2).skip(1) {
            let (a1, a2) = w[0].state.coeffs();
            let (b1, b2) = w[1].state.coeffs();
            let delta = operator::stack(&b1, &b2) - operator::stack(&a1, &a2);
            let dl = w[1].param - w[0].param;
            let spacing = (w_dot(&weights, &delta, &delta) + dl * dl).sqrt();
            assert!(
                spacing <= 2.0 * cfg.ds_max,
                "spacing {spacing} above limit"
            );
            assert!(
                spacing >= cfg.ds_min * 0.5,
                "spacing {spacing} below limit"
            );
        }
    }

    #[test]
    fn distance_metric_vanishes_on_curve_and_sees_offsets() {
        let grid = Grid::new(32).unwrap();
        let state = trivial::bar_state(0.9, 0.5).unwrap();
        let u = FieldState::from_constant_state(grid.clone(), &state);
        let prox = distance_to_trivial(&u, state.f, Mode::Bar, 0.5);
        assert!(prox.distance < 1e-9, "on-curve distance {}", prox.distance);
        assert!((prox.coord - 0.9).abs() < 1e-6);

        let hat = trivial::hat_state(0.3, 1.6).unwrap();
        let uh = FieldState::from_constant_state(grid.clone(), &hat);
        let ph = distance_to_trivial(&uh, hat.zeta, Mode::Hat, 1.6);
        assert!(ph.distance < 1e-9);
        assert!((ph.coord - 0.3).abs() < 1e-6);

        // An off-curve state reports roughly its perturbation size.
        let n = grid.n();
        let mut c1 = vec![0.0; n];
        c1[0] = state.a1;
        c1[4] = 0.05;
        let mut c2 = vec![0.0; n];
        c2[0] = state.a2;
        let v = FieldState::from_coeffs(grid, &c1, &c2).unwrap();
        let pv = distance_to_trivial(&v, state.f, Mode::Bar, 0.5);
        assert!((pv.distance - 0.05).abs() < 5e-3, "distance {}", pv.distance);
    }

    #[test]
    fn switch_at_rejects_wrong_event_kind() {
        let grid = Grid::new(48).unwrap();
        let cand = bar_candidate(0.0, 0.1, 5, 1);
        let cfg = ContinuationConfig {
            max_steps: 8,
            eig_modes: 0,
            ..ContinuationConfig::default()
        };
        let branch = continue_from_bifurcation(&cand, 0.1, &grid, &cfg).unwrap();
        let limit_event = branch
            .events
            .iter()
            .position(|e| e.kind == EventKind::StepLimit)
            .unwrap();
        assert!(matches!(
            switch_at(&branch, limit_event, None, &cfg),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            switch_at(&branch, 99, None, &cfg),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn origin_labels_are_csv_safe() {
        let origins = [
            BranchOrigin::PrimaryBifurcation {
                k: 5,
                sigma: -1,
                coord: 1.5058,
            },
            BranchOrigin::SecondarySwitch { parent_index: 42 },
            BranchOrigin::Resumed,
        ];
        for o in origins {
            let s = o.to_string();
            assert!(!s.contains(','), "comma in {s}");
            assert!(!s.is_empty());
        }
    }
}
