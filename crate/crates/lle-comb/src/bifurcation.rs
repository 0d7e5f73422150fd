//! Analytic location of bifurcation points on the constant-solution curves.
//!
//! Linearizing the stationary system at a constant solution `a` and testing
//! against `cos(kx) v`, `v in R^2`, gives the 2x2 problem
//! `(d k^2 I - N(a, zeta)) v = 0` with
//!
//! ```text
//!   N(a, zeta) = [ -zeta + 3 a1^2 + a2^2     -1 + 2 a1 a2 ]
//!                [  1 + 2 a1 a2              -zeta + a1^2 + 3 a2^2 ]
//! ```
//!
//! whose determinant condition is the **kernel condition**
//!
//! ```text
//!   mu^2 - 4 |a|^2 mu + 1 + 3 |a|^4 = 0,        mu = zeta + d k^2.
//! ```
//!
//! Substituting the closed-form constant curves turns this into explicit
//! root problems:
//!
//! * **detuning-swept** (fixed `f`, `|f| >= 1`): cosine mode `k` bifurcates
//!   at coordinates `t` solving
//!
//!   ```text
//!   d k^2 = f^2 (1-t^2) - t / sqrt(1-t^2)
//!           - sigma sqrt(f^4 (1-t^2)^2 - 1),    sigma in {-1, +1},
//!   ```
//!
//!   with `t` restricted to `[-sqrt(1 - f^-2), sqrt(1 - f^-2)]` so the
//!   radicand is nonnegative, and only finitely many `k` admit roots
//!   (`k <= khat/2`, see [`crate::bounds::hat_mode_limit`]);
//!
//! * **forcing-swept** (fixed `zeta`): mode `k` bifurcates at the explicit
//!   moduli
//!
//!   ```text
//!   s^2 = (2/3) mu - (sigma/3) sqrt(mu^2 - 3),   mu = zeta + d k^2 >= sqrt 3.
//!   ```
//!
//! Each candidate carries *simplicity* and *transversality* verdicts:
//!
//! * simplicity (`s_ok`): no second cosine mode `j != k` lies in the kernel
//!   at the same point.  The second root of the kernel condition is
//!   `mu' = 4 |a|^2 - mu`, so the check reduces to whether
//!   `v = (4 |a|^2 - 2 zeta)/d - k^2` is (numerically) a perfect square
//!   `j^2` with `j != k`;
//! * transversality (`t_ok`): the kernel eigenvalue crosses zero with
//!   nonvanishing speed in the active parameter — an explicit expression in
//!   `t` (resp. `s`) that must stay away from zero.
//!
//! Violations within `1e-9` fail the flag; values within `1e-6` are
//! additionally reported as `marginal`.

use crate::params::Mode;
use crate::trivial::{self, ConstantState};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Hard tolerance for the simplicity/transversality checks.
const CHECK_TOL: f64 = 1e-9;
/// Band above [`CHECK_TOL`] in which a passing check is flagged marginal.
const MARGINAL_TOL: f64 = 1e-6;

/// Kernel vectors of the linearization at a bifurcation point: `alpha` spans
/// the kernel of `d k^2 I - N(a, zeta)`, `beta` the kernel of its transpose.
/// Both are normalized to unit Euclidean length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPair {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

/// A located bifurcation point on a constant-solution curve.
///
/// `k = 0` entries are folds of the constant curve itself (the constant-mode
/// linearization degenerates there); they mark turning points, not
/// symmetry-breaking bifurcations, and are only emitted on request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationCandidate {
    /// Curve family the candidate sits on.
    pub mode: Mode,
    /// Cosine mode whose kernel vector turns unstable (`0` for curve folds).
    pub k: u32,
    /// Which root of the kernel condition is hit: `+1` for
    /// `mu = 2|a|^2 - sqrt(|a|^4 - 1)`, `-1` for the larger root.
    pub sigma: i32,
    /// Curve coordinate of the point (`t` detuning-swept, `s` forcing-swept).
    pub coord: f64,
    /// Induced active parameter (`zeta` resp. `f`) at the point.
    pub param: f64,
    /// The underlying constant solution.
    pub state: ConstantState,
    /// Simplicity check: the kernel holds a single cosine mode.
    pub s_ok: bool,
    /// Transversality check: the critical eigenvalue crosses zero
    /// transversally in the active parameter.
    pub t_ok: bool,
    /// A check passed but came within `1e-6` of failing.
    pub marginal: bool,
    /// The coordinate is a double root of the locating equation (tangential
    /// crossing).
    pub tangential: bool,
    /// Kernel vectors of the linearization and its transpose.
    pub kernel: KernelPair,
}

/// Linearization matrix `N(a, zeta)` of the constant system, so that the
/// full linearized operator acts as `phi -> -d phi'' - N phi`.
pub fn n_matrix(a1: f64, a2: f64, zeta: f64) -> [[f64; 2]; 2] {
    [
        [-zeta + 3.0 * a1 * a1 + a2 * a2, -1.0 + 2.0 * a1 * a2],
        [1.0 + 2.0 * a1 * a2, -zeta + a1 * a1 + 3.0 * a2 * a2],
    ]
}

/// Determinant of `d k^2 I - N(a, zeta)` in closed form:
/// `mu^2 - 4 |a|^2 mu + 1 + 3 |a|^4` with `mu = zeta + d k^2`.  Vanishes
/// exactly at the bifurcation points of cosine mode `k`.
pub fn kernel_condition(a1: f64, a2: f64, zeta: f64, d: f64, k: u32) -> f64 {
    let mu = zeta + d * (k as f64) * (k as f64);
    let m = a1 * a1 + a2 * a2;
    mu * mu - 4.0 * m * mu + 1.0 + 3.0 * m * m
}

/// Kernel vectors of `d k^2 I - N(a, zeta)` and its transpose.
///
/// Precondition: the kernel condition must (numerically) vanish; otherwise a
/// precondition error is returned.  The closed-form vectors
/// `alpha = (1 - 2 a1 a2, 3 a1^2 + a2^2 - mu)` and
/// `beta = (-1 - 2 a1 a2, 3 a1^2 + a2^2 - mu)` degenerate to zero exactly
/// when `2 a1 a2 = +-1` *and* `3 a1^2 + a2^2 = mu`; the equivalent companion
/// formulas cover those points, and whichever of the two parallel forms has
/// the larger magnitude is used.
pub fn kernel_vectors(a1: f64, a2: f64, zeta: f64, d: f64, k: u32) -> Result<KernelPair> {
    let mu = zeta + d * (k as f64) * (k as f64);
    let m = a1 * a1 + a2 * a2;
    let cond = kernel_condition(a1, a2, zeta, d, k);
    let scale = (1.0 + mu * mu + m * m).max(1.0);
    if cond.abs() > 1e-6 * scale {
        return Err(Error::Precondition(format!(
            "kernel vectors requested away from a bifurcation point \
             (kernel condition = {cond:.3e}, k = {k})"
        )));
    }
    let q = 2.0 * a1 * a2;
    let diag = 3.0 * a1 * a1 + a2 * a2 - mu;
    let alt_diag = a1 * a1 + 3.0 * a2 * a2 - mu;

    let pick = |v: [f64; 2], w: [f64; 2]| -> [f64; 2] {
        let nv = v[0] * v[0] + v[1] * v[1];
        let nw = w[0] * w[0] + w[1] * w[1];
        let u = if nv >= nw { v } else { w };
        let n = (u[0] * u[0] + u[1] * u[1]).sqrt();
        [u[0] / n, u[1] / n]
    };

    let alpha = pick([1.0 - q, diag], [alt_diag, -1.0 - q]);
    let beta = pick([-1.0 - q, diag], [alt_diag, 1.0 - q]);
    Ok(KernelPair { alpha, beta })
}

/// Simplicity verdict at a candidate: `v = (4|a|^2 - 2 zeta)/d - k^2` equals
/// the squared index `j^2` of the *other* kernel-condition root, so the
/// check fails iff `v` is within tolerance of a perfect square `j^2` with
/// integer `j != k`.  Returns `(s_ok, marginal)`.
fn simplicity(modulus_sq: f64, zeta: f64, d: f64, k: u32) -> (bool, bool) {
    let v = (4.0 * modulus_sq - 2.0 * zeta) / d - (k as f64) * (k as f64);
    let j = v.max(0.0).sqrt().round();
    if j as u32 == k && (v - j * j).abs() <= MARGINAL_TOL {
        // The companion root coincides with mode k itself; that is the
        // tangential/double-root situation, not a simplicity failure.
        return (true, false);
    }
    let dist = (v - j * j).abs();
    if dist <= CHECK_TOL {
        (false, false)
    } else if dist <= MARGINAL_TOL {
        (true, true)
    } else {
        (true, false)
    }
}

/// Transversality expression for detuning-swept candidates; must be bounded
/// away from zero for the critical eigenvalue to cross with nonzero speed.
fn hat_transversality(t: f64, f: f64, sigma: i32) -> f64 {
    let r = 1.0 - t * t;
    let f2 = f * f;
    let f4 = f2 * f2;
    let f6 = f4 * f2;
    let root = (f4 * r * r - 1.0).max(0.0).sqrt();
    4.0 * f6 * t.powi(3) * r * r + f4 * r.sqrt() - 2.0 * t * f2 - r.powf(-1.5)
        - sigma as f64 * root * (4.0 * f4 * t.powi(3) * r + f2 * (2.0 * t * t - 1.0) / r.sqrt())
}

/// Transversality verdict for a detuning-swept candidate.
fn hat_t_check(t: f64, f: f64, sigma: i32) -> (bool, bool) {
    let scale = f.powi(4).max(1.0);
    let e = hat_transversality(t, f, sigma).abs();
    (e > CHECK_TOL * scale, e <= MARGINAL_TOL * scale && e > CHECK_TOL * scale)
}

/// Transversality verdict for a forcing-swept candidate: all three explicit
/// non-degeneracy expressions must stay away from zero.
fn bar_t_check(zeta: f64, d: f64, k: u32, sigma: i32) -> (bool, bool) {
    let kk = (k as f64) * (k as f64);
    let mu = zeta + d * kk;
    let root = (mu * mu - 3.0).max(0.0).sqrt();
    let exprs = [
        mu - 3.0_f64.sqrt(),
        4.0 * zeta + d * kk - 2.0 * sigma as f64 * root,
        2.0 * zeta + 5.0 * d * kk - 4.0 * sigma as f64 * root,
    ];
    let scale = (1.0 + mu * mu).max(1.0);
    let min = exprs.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min);
    (min > CHECK_TOL * scale, min <= MARGINAL_TOL * scale && min > CHECK_TOL * scale)
}

/// Left-hand side of the detuning-swept locating equation minus `d k^2`:
/// roots in `t` are the bifurcation coordinates of mode `k`.
fn hat_locator(t: f64, f: f64, d: f64, k: u32, sigma: i32) -> f64 {
    let r = 1.0 - t * t;
    let f2 = f * f;
    let radicand = (f2 * f2 * r * r - 1.0).max(0.0);
    f2 * r - t / r.sqrt() - sigma as f64 * radicand.sqrt() - d * (k as f64) * (k as f64)
}

/// All roots of a scalar function on `[lo, hi]`, found by sign changes over
/// a fine grid, bisection polish, and a curvature pass that resolves double
/// (tangential) roots hiding inside a single grid cell.  Returns
/// `(root, tangential)` pairs in ascending order.
fn scan_roots(lo: f64, hi: f64, samples: usize, g: impl Fn(f64) -> f64) -> Vec<(f64, bool)> {
    assert!(hi > lo && samples >= 8);
    let step = (hi - lo) / samples as f64;
    let xs: Vec<f64> = (0..=samples).map(|i| lo + step * i as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);

    let bisect = |mut a: f64, mut b: f64, mut fa: f64| -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if b - a < 1e-15 * (1.0 + mid.abs()) {
                break;
            }
            let fm = g(mid);
            if fm == 0.0 {
                return mid;
            }
            if fa * fm < 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        0.5 * (a + b)
    };

    // Golden-section minimization of the *signed* dip `sign * g` on a
    // bracket (unimodal there, unlike |g|, which has two zeros when the dip
    // crosses), for resolving tangential roots and close pairs.
    let golden_min = |mut a: f64, mut b: f64, sign: f64| -> f64 {
        let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
        let mut c = b - phi * (b - a);
        let mut dd = a + phi * (b - a);
        let (mut fc, mut fd) = (sign * g(c), sign * g(dd));
        for _ in 0..120 {
            if fc < fd {
                b = dd;
                dd = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = sign * g(c);
            } else {
                a = c;
                c = dd;
                fc = fd;
                dd = a + phi * (b - a);
                fd = sign * g(dd);
            }
        }
        0.5 * (a + b)
    };

    let mut out: Vec<(f64, bool)> = Vec::new();
    for i in 0..samples {
        let (a, b) = (xs[i], xs[i + 1]);
        let (fa, fb) = (vals[i], vals[i + 1]);
        if fa == 0.0 {
            // The grid node sits exactly on a root.  Whether the contact is
            // tangential is decided by the nearest nonzero samples on each
            // side: equal signs mean a touch, opposite signs a crossing.
            let left = vals[..i].iter().rev().find(|v| **v != 0.0);
            let right = vals[i + 1..].iter().find(|v| **v != 0.0);
            let tangential = match (left, right) {
                (Some(l), Some(r)) => l * r > 0.0,
                _ => false,
            };
            out.push((a, tangential));
            continue;
        }
        if fa * fb < 0.0 {
            out.push((bisect(a, b, fa), false));
            continue;
        }
        // A local dip of |g| with one sign on the whole three-point stencil
        // may still hide a double root (or a pair of very close simple
        // roots).  Cells adjacent to an ordinary sign change are excluded:
        // their dip is just the root in the neighboring cell.
        let interior_min = i > 0
            && i + 2 <= samples
            && vals[i - 1] * vals[i] > 0.0
            && vals[i] * vals[i + 1] > 0.0
            && vals[i].abs() < vals[i - 1].abs()
            && vals[i].abs() <= vals[i + 1].abs()
            && vals[i].abs() < 1e-4 * scale;
        if interior_min {
            let left = xs[i - 1];
            let right = xs[i + 1];
            let x_star = golden_min(left, right, fa.signum());
            let g_star = g(x_star);
            if g_star * fa < 0.0 && g_star.abs() > 1e-11 * scale {
                // The dip crosses twice inside the bracket.
                out.push((bisect(left, x_star, vals[i - 1]), false));
                out.push((bisect(x_star, right, g_star), false));
            } else if g_star.abs() <= 1e-11 * scale {
                out.push((x_star, true));
            }
        }
    }
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out.dedup_by(|p, q| (p.0 - q.0).abs() < 1e-12);
    out
}

/// Assemble a candidate on the detuning-swept curve.
fn hat_candidate(t: f64, f: f64, d: f64, k: u32, sigma: i32, tangential: bool) -> Result<BifurcationCandidate> {
    let state = trivial::hat_state(t, f)?;
    let (s_ok, s_marginal) = simplicity(state.modulus_sq(), state.zeta, d, k);
    let (t_ok, t_marginal) = hat_t_check(t, f, sigma);
    let kernel = kernel_vectors(state.a1, state.a2, state.zeta, d, k)?;
    Ok(BifurcationCandidate {
        mode: Mode::Hat,
        k,
        sigma,
        coord: t,
        param: state.zeta,
        state,
        s_ok,
        t_ok,
        marginal: s_marginal || t_marginal,
        tangential,
        kernel,
    })
}

/// Bifurcation points of all cosine modes `k >= 1` on the detuning-swept
/// curve at fixed forcing `f`, sorted by `(k, -sigma, coord)`.
///
/// Empty for `|f| < 1`: the locating radicand is then negative everywhere
/// and no mode ever bifurcates.
pub fn enumerate_hat(f: f64, d: f64) -> Result<Vec<BifurcationCandidate>> {
    if d == 0.0 || !d.is_finite() || !f.is_finite() {
        return Err(Error::Domain(format!("invalid parameters f={f}, d={d}")));
    }
    let Some(khat) = crate::bounds::hat_mode_limit(d, f) else {
        return Ok(Vec::new());
    };
    let k_top = (khat / 2.0).floor() as u32;
    let t_max = (1.0 - 1.0 / (f * f)).sqrt();
    let mut out = Vec::new();
    for k in 1..=k_top {
        for sigma in [1, -1] {
            for (t, tangential) in
                scan_roots(-t_max, t_max, 10_000, |t| hat_locator(t, f, d, k, sigma))
            {
                out.push(hat_candidate(t, f, d, k, sigma, tangential)?);
            }
        }
    }
    dedup_and_sort(&mut out);
    Ok(out)
}

/// Folds (turning points) of the detuning-swept curve, reported as `k = 0`
/// candidates: the constant-mode linearization `N` itself degenerates there,
/// which happens exactly at the zeros of the induced-detuning derivative.
pub fn enumerate_hat_folds(f: f64, d: f64) -> Result<Vec<BifurcationCandidate>> {
    if d == 0.0 || !d.is_finite() || !f.is_finite() {
        return Err(Error::Domain(format!("invalid parameters f={f}, d={d}")));
    }
    if f.abs() < 1.0 {
        return Ok(Vec::new());
    }
    let t_max = (1.0 - 1.0 / (f * f)).sqrt();
    let mut out = Vec::new();
    for sigma in [1, -1] {
        for (t, tangential) in scan_roots(-t_max, t_max, 10_000, |t| hat_locator(t, f, d, 0, sigma))
        {
            out.push(hat_candidate(t, f, d, 0, sigma, tangential)?);
        }
    }
    dedup_and_sort(&mut out);
    Ok(out)
}

/// Bifurcation points on the forcing-swept curve at fixed detuning, for
/// cosine modes `1..=k_max`, sorted by `(k, -sigma, coord)`.
///
/// Only nonnegative moduli are emitted; the sign symmetry
/// `(a1, a2, f) -> (-a1, -a2, -f)` generates the rest.  For `d < 0` the
/// enumeration is intrinsically finite and `k_max` merely truncates it; for
/// `d > 0` every sufficiently large mode bifurcates and `k_max` is the
/// reporting window.
pub fn enumerate_bar(zeta: f64, d: f64, k_max: u32) -> Result<Vec<BifurcationCandidate>> {
    if d == 0.0 || !d.is_finite() || !zeta.is_finite() {
        return Err(Error::Domain(format!("invalid parameters zeta={zeta}, d={d}")));
    }
    let sqrt3 = 3.0_f64.sqrt();
    let mut out = Vec::new();
    for k in 1..=k_max {
        let kk = (k as f64) * (k as f64);
        let mu = zeta + d * kk;
        if mu < sqrt3 {
            continue;
        }
        let root = (mu * mu - 3.0).sqrt();
        for sigma in [1, -1] {
            let s_sq = (2.0 * mu - sigma as f64 * root) / 3.0;
            if s_sq <= 0.0 {
                continue;
            }
            let s = s_sq.sqrt();
            let state = trivial::bar_state(s, zeta)?;
            let (s_ok, s_marginal) = simplicity(s_sq, zeta, d, k);
            let (t_ok, t_marginal) = bar_t_check(zeta, d, k, sigma);
            // mu = sqrt 3 makes the two sigma-roots collide: a tangential
            // contact of the locating curve.
            let tangential = (mu - sqrt3).abs() <= 1e-12 * (1.0 + mu.abs());
            let kernel = kernel_vectors(state.a1, state.a2, zeta, d, k)?;
            out.push(BifurcationCandidate {
                mode: Mode::Bar,
                k,
                sigma,
                coord: s,
                param: state.f,
                state,
                s_ok,
                t_ok,
                marginal: s_marginal || t_marginal,
                tangential,
                kernel,
            });
        }
    }
    dedup_and_sort(&mut out);
    Ok(out)
}

/// Enumerate bifurcation candidates for either curve family.
///
/// `fixed_param` is `f` for [`Mode::Hat`] and `zeta` for [`Mode::Bar`];
/// `k_max` windows the forcing-swept enumeration (ignored for detuning-swept
/// curves, whose mode range is intrinsic); `include_folds` appends the
/// `k = 0` turning points of the detuning-swept curve.
pub fn enumerate(
    mode: Mode,
    fixed_param: f64,
    d: f64,
    k_max: u32,
    include_folds: bool,
) -> Result<Vec<BifurcationCandidate>> {
    let mut out = match mode {
        Mode::Hat => enumerate_hat(fixed_param, d)?,
        Mode::Bar => enumerate_bar(fixed_param, d, k_max)?,
    };
    if include_folds && mode == Mode::Hat {
        let mut folds = enumerate_hat_folds(fixed_param, d)?;
        folds.append(&mut out);
        out = folds;
        dedup_and_sort(&mut out);
    }
    Ok(out)
}

/// Sort by `(k, -sigma, coord)` and drop duplicate points (same mode index
/// and coordinate), which arise when a root sits exactly on the radicand
/// boundary where both `sigma` branches coincide.
fn dedup_and_sort(cands: &mut Vec<BifurcationCandidate>) {
    cands.sort_by(|a, b| {
        a.k.cmp(&b.k)
            .then(b.sigma.cmp(&a.sigma))
            .then(a.coord.total_cmp(&b.coord))
    });
    cands.dedup_by(|a, b| a.k == b.k && (a.coord - b.coord).abs() < 1e-10);
}
