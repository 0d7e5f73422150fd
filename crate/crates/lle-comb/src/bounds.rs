//! Explicit a-priori bounds for stationary solutions.
//!
//! All estimates are fully explicit in `(d, zeta, f)`:
//!
//! * a supremum bound valid for **every** stationary solution,
//!
//!   ```text
//!   ||a||_inf  <=  |f| (1 + 12 pi^2 f^2 / |d|)
//!                  / max{ 1,  -zeta sign(d) - gamma(d, f) },
//!   ```
//!
//!   with the correction term
//!
//!   ```text
//!   gamma(d, f) = 36 pi^2 f^4 / |d|                                  (d > 0)
//!   gamma(d, f) = 36 pi^2 f^4 / |d|
//!                 + f^2 (1 + 12 pi^2 f^2 / |d|)^2                    (d < 0)
//!   ```
//!
//! * a **detuning window** outside which only constant solutions exist:
//!   every stationary solution is constant whenever `sign(d) zeta` lies
//!   below `-gamma(d,f) - sqrt(6) |f| (1 + 12 pi^2 f^2/|d|)` or above
//!   `6 f^2 (1 + 12 pi^2 f^2/|d|)^2`;
//!
//! * **mode limits**: explicit cutoffs beyond which no cosine mode can
//!   bifurcate from the constant curves — detuning-swept curves at fixed
//!   `f` carry bifurcating modes only for `k <= khat/2` with
//!   `khat = 2 sqrt((f^2 + sqrt(f^2-1) + sqrt(f^4-1))/|d|)` (and none at all
//!   for `|f| < 1`), and forcing-swept curves with `d < 0` only for
//!   `k <= kbar/4` with `kbar = 4 sqrt(max(zeta - sqrt 3, 0)/|d|)`.

use crate::params::Parameters;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Correction term entering the supremum bound and the detuning window.
pub fn gamma(d: f64, f: f64) -> f64 {
    let base = 36.0 * PI * PI * f.powi(4) / d.abs();
    if d > 0.0 {
        base
    } else {
        let amp = f * f * (1.0 + 12.0 * PI * PI * f * f / d.abs()).powi(2);
        base + amp
    }
}

/// Numerator `|f| (1 + 12 pi^2 f^2 / |d|)` shared by the supremum bound and
/// the window edges.
fn sup_numerator(d: f64, f: f64) -> f64 {
    f.abs() * (1.0 + 12.0 * PI * PI * f * f / d.abs())
}

/// Supremum bound for all stationary solutions at the full parameter point,
/// using the detuning-dependent denominator.
pub fn sup_bound(p: &Parameters) -> f64 {
    let den = 1.0_f64.max(-p.zeta * p.d.signum() - gamma(p.d, p.f));
    sup_numerator(p.d, p.f) / den
}

/// Detuning-independent supremum bound (denominator `1`), valid uniformly
/// in `zeta`.
pub fn sup_bound_universal(d: f64, f: f64) -> f64 {
    sup_numerator(d, f)
}

/// The window `[lo, hi]` such that nonconstant stationary solutions can only
/// exist while `sign(d) * zeta` lies inside it.
pub fn nonconstant_window(d: f64, f: f64) -> (f64, f64) {
    let growth = 1.0 + 12.0 * PI * PI * f * f / d.abs();
    let lo = -gamma(d, f) - 6.0_f64.sqrt() * f.abs() * growth;
    let hi = 6.0 * f * f * growth * growth;
    (lo, hi)
}

/// Whether the parameter point admits nonconstant stationary solutions at
/// all, i.e. `sign(d) * zeta` lies inside the closed nonconstant window.
pub fn admits_nonconstant(p: &Parameters) -> bool {
    let (lo, hi) = nonconstant_window(p.d, p.f);
    let v = p.d.signum() * p.zeta;
    (lo..=hi).contains(&v)
}

/// Mode cutoff for the detuning-swept curve at fixed forcing: cosine modes
/// `k > khat/2` never bifurcate.  `None` when `|f| < 1` (no bifurcation
/// points exist at all).
pub fn hat_mode_limit(d: f64, f: f64) -> Option<f64> {
    if f.abs() < 1.0 {
        return None;
    }
    let f2 = f * f;
    let inner = (f2 + (f2 - 1.0).sqrt() + (f2 * f2 - 1.0).sqrt()) / d.abs();
    Some(2.0 * inner.sqrt())
}

/// Mode cutoff for the forcing-swept curve at fixed detuning, normal
/// dispersion only: for `d < 0` cosine modes `k > kbar/4` never bifurcate.
/// `None` for `d > 0`, where arbitrarily high modes bifurcate.
pub fn bar_mode_limit(d: f64, zeta: f64) -> Option<f64> {
    if d >= 0.0 {
        return None;
    }
    let excess = (zeta - 3.0_f64.sqrt()).max(0.0);
    Some(4.0 * (excess / d.abs()).sqrt())
}

/// Machine-readable summary of every explicit estimate at one parameter
/// point.  `zeta`-dependent entries are `None` when no detuning was given.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReport {
    pub d: f64,
    pub f: f64,
    pub zeta: Option<f64>,
    /// Correction term `gamma(d, f)`.
    pub gamma: f64,
    /// Supremum bound at the given detuning (falls back to the universal
    /// bound when `zeta` is absent).
    pub sup_bound: f64,
    /// Detuning-independent supremum bound.
    pub sup_bound_universal: f64,
    /// Lower edge of the nonconstant window (in `sign(d) * zeta`).
    pub window_lo: f64,
    /// Upper edge of the nonconstant window.
    pub window_hi: f64,
    /// Whether `sign(d) * zeta` lies inside the window (`None` without
    /// `zeta`).
    pub admits_nonconstant: Option<bool>,
    /// Detuning-swept mode cutoff `khat` (`None` for `|f| < 1`).
    pub hat_mode_limit: Option<f64>,
    /// Forcing-swept mode cutoff `kbar` (`None` for `d > 0` or without
    /// `zeta`).
    pub bar_mode_limit: Option<f64>,
}

/// Evaluate every explicit estimate at `(d, f)` and, optionally, `zeta`.
pub fn report(d: f64, f: f64, zeta: Option<f64>) -> BoundsReport {
    let (window_lo, window_hi) = nonconstant_window(d, f);
    let (sup, admits) = match zeta {
        Some(z) => {
            let p = Parameters { d, zeta: z, f };
            (sup_bound(&p), Some(admits_nonconstant(&p)))
        }
        None => (sup_bound_universal(d, f), None),
    };
    BoundsReport {
        d,
        f,
        zeta,
        gamma: gamma(d, f),
        sup_bound: sup,
        sup_bound_universal: sup_bound_universal(d, f),
        window_lo,
        window_hi,
        admits_nonconstant: admits,
        hat_mode_limit: hat_mode_limit(d, f),
        bar_mode_limit: zeta.and_then(|z| bar_mode_limit(d, z)),
    }
}
