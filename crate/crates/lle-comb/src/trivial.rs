//! Closed-form spatially constant solutions.
//!
//! Every constant solution `(a1, a2)` of the stationary system satisfies the
//! scalar relation
//!
//! ```text
//!   f^2 = |a|^2 (1 + (|a|^2 - zeta)^2),        |a|^2 = a1^2 + a2^2,
//! ```
//!
//! and the constant set forms two convenient one-parameter families:
//!
//! * the **detuning-swept** curve at fixed forcing `f`, parametrized by
//!   `t in (-1, 1)`:
//!
//!   ```text
//!   a1 = f (1 - t^2),   a2 = -f t sqrt(1 - t^2),
//!   zeta(t) = f^2 (1 - t^2) + t / sqrt(1 - t^2),   |a|^2 = f^2 (1 - t^2);
//!   ```
//!
//! * the **forcing-swept** curve at fixed detuning `zeta`, parametrized by
//!   the modulus `s`:
//!
//!   ```text
//!   a1 = s / sqrt(1 + (s^2 - zeta)^2),
//!   a2 = s (s^2 - zeta) / sqrt(1 + (s^2 - zeta)^2),
//!   f(s) = s sqrt(1 + (s^2 - zeta)^2),   |a|^2 = s^2.
//!   ```
//!
//! Only `s > 0` is enumerated by callers: `(a1, a2, f) -> (-a1, -a2, -f)`
//! maps solutions to solutions, so negative moduli add nothing new.

use crate::params::{Mode, Parameters};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A spatially constant solution together with the curve it came from.
///
/// The struct stores the *resolved* parameter pair `(zeta, f)`: for a
/// detuning-swept state `zeta` is the induced detuning at coordinate `t`,
/// for a forcing-swept state `f` is the induced forcing at modulus `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantState {
    /// Curve family this state lies on.
    pub mode: Mode,
    /// Curve coordinate: `t` for detuning-swept, `s` for forcing-swept.
    pub coord: f64,
    pub a1: f64,
    pub a2: f64,
    pub zeta: f64,
    pub f: f64,
}

impl ConstantState {
    /// Squared modulus `a1^2 + a2^2`.
    pub fn modulus_sq(&self) -> f64 {
        self.a1 * self.a1 + self.a2 * self.a2
    }

    /// The active (swept) parameter value for this state's curve.
    pub fn active_param(&self) -> f64 {
        match self.mode {
            Mode::Hat => self.zeta,
            Mode::Bar => self.f,
        }
    }

    /// Full parameter point, supplying the dispersion.
    pub fn parameters(&self, d: f64) -> Result<Parameters> {
        Parameters::new(d, self.zeta, self.f)
    }

    /// Signed defect of the constant-solution invariant
    /// `f^2 - |a|^2 (1 + (|a|^2 - zeta)^2)`; zero (to rounding) on both
    /// curves.
    pub fn invariant_defect(&self) -> f64 {
        constant_invariant_defect(self.modulus_sq(), self.zeta, self.f)
    }
}

/// Signed defect of the constant-solution relation for a given squared
/// modulus: `f^2 - m (1 + (m - zeta)^2)` with `m = |a|^2`.
pub fn constant_invariant_defect(modulus_sq: f64, zeta: f64, f: f64) -> f64 {
    let w = modulus_sq - zeta;
    f * f - modulus_sq * (1.0 + w * w)
}

/// Residual of the *constant* stationary system (all derivatives zero):
/// `[-a2 - zeta a1 + |a|^2 a1,  a1 - zeta a2 + |a|^2 a2 - f]`.
pub fn constant_residual(a1: f64, a2: f64, zeta: f64, f: f64) -> [f64; 2] {
    let m = a1 * a1 + a2 * a2;
    [-a2 - zeta * a1 + m * a1, a1 - zeta * a2 + m * a2 - f]
}

/// Induced detuning along the detuning-swept curve,
/// `zeta(t) = f^2 (1 - t^2) + t / sqrt(1 - t^2)`.
pub fn zeta_hat(t: f64, f: f64) -> f64 {
    let r = 1.0 - t * t;
    f * f * r + t / r.sqrt()
}

/// Derivative `zeta'(t) = -2 f^2 t + (1 - t^2)^(-3/2)` of the induced
/// detuning; its zeros are the folds of the detuning-swept curve.
pub fn zeta_hat_prime(t: f64, f: f64) -> f64 {
    let r = 1.0 - t * t;
    -2.0 * f * f * t + r.powf(-1.5)
}

/// Constant solution on the detuning-swept curve at coordinate `t`, fixed
/// forcing `f`.  Requires `|t| < 1`.
pub fn hat_state(t: f64, f: f64) -> Result<ConstantState> {
    if !(t.is_finite() && f.is_finite()) {
        return Err(Error::Domain(format!("non-finite input t={t}, f={f}")));
    }
    if t.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "detuning-swept curve coordinate must satisfy |t| < 1, got t={t}"
        )));
    }
    let r = 1.0 - t * t;
    Ok(ConstantState {
        mode: Mode::Hat,
        coord: t,
        a1: f * r,
        a2: -f * t * r.sqrt(),
        zeta: zeta_hat(t, f),
        f,
    })
}

/// Induced forcing along the forcing-swept curve,
/// `f(s) = s sqrt(1 + (s^2 - zeta)^2)`.
pub fn forcing_bar(s: f64, zeta: f64) -> f64 {
    let w = s * s - zeta;
    s * (1.0 + w * w).sqrt()
}

/// Derivative `f'(s)` of the induced forcing; its zeros are the folds of the
/// forcing-swept curve (present exactly when `zeta > sqrt(3)`).
pub fn forcing_bar_prime(s: f64, zeta: f64) -> f64 {
    let w = s * s - zeta;
    let q = 1.0 + w * w;
    // d/ds [ s q^(1/2) ] = q^(1/2) + s * (2 w * 2 s) / (2 q^(1/2))
    q.sqrt() + 2.0 * s * s * w / q.sqrt()
}

/// Constant solution on the forcing-swept curve at modulus coordinate `s`,
/// fixed detuning `zeta`.
pub fn bar_state(s: f64, zeta: f64) -> Result<ConstantState> {
    if !(s.is_finite() && zeta.is_finite()) {
        return Err(Error::Domain(format!("non-finite input s={s}, zeta={zeta}")));
    }
    let w = s * s - zeta;
    let den = (1.0 + w * w).sqrt();
    Ok(ConstantState {
        mode: Mode::Bar,
        coord: s,
        a1: s / den,
        a2: s * w / den,
        zeta,
        f: s * den,
    })
}

/// Constant state on the curve of the given mode: coordinate `t` at fixed
/// forcing for [`Mode::Hat`], coordinate `s` at fixed detuning for
/// [`Mode::Bar`].
pub fn state_on_curve(mode: Mode, coord: f64, fixed_param: f64) -> Result<ConstantState> {
    match mode {
        Mode::Hat => hat_state(coord, fixed_param),
        Mode::Bar => bar_state(coord, fixed_param),
    }
}

/// All moduli `s > 0` with induced forcing `f(s) = f`, ascending.
///
/// Squaring reduces this to the real positive roots of the cubic
/// `rho^3 - 2 zeta rho^2 + (1 + zeta^2) rho - f^2` in `rho = s^2`; for
/// `zeta <= sqrt(3)` the forcing is strictly increasing in `s` and the root
/// is unique, for larger detunings up to three roots exist.  Roots are
/// bracketed on a fine grid and polished by bisection.
pub fn bar_coords_for_forcing(zeta: f64, f: f64) -> Vec<f64> {
    if f == 0.0 {
        return Vec::new();
    }
    let target = f * f;
    let h = |rho: f64| {
        let w = rho - zeta;
        rho * (1.0 + w * w) - target
    };
    // Any root satisfies rho (1 + w^2) = f^2 >= rho, so rho <= f^2.
    let hi = target * (1.0 + 1e-9) + 1e-12;
    let samples = 20_000;
    let mut roots = Vec::new();
    let mut prev_rho = 0.0;
    let mut prev_val = h(0.0);
    for i in 1..=samples {
        let rho = hi * i as f64 / samples as f64;
        let val = h(rho);
        if prev_val == 0.0 {
            roots.push(prev_rho);
        } else if prev_val * val < 0.0 {
            let (mut lo, mut hi) = (prev_rho, rho);
            let mut flo = prev_val;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fmid = h(mid);
                if fmid == 0.0 || hi - lo < 1e-15 * hi.max(1.0) {
                    lo = mid;
                    break;
                }
                if flo * fmid < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fmid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_rho = rho;
        prev_val = val;
    }
    roots.into_iter().map(f64::sqrt).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hat_states_solve_the_constant_system() {
        let f = 1.6;
        for i in -9..=9 {
            let t = i as f64 / 10.0;
            let st = hat_state(t, f).unwrap();
            let [r1, r2] = constant_residual(st.a1, st.a2, st.zeta, st.f);
            assert_abs_diff_eq!(r1, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r2, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(st.modulus_sq(), f * f * (1.0 - t * t), epsilon = 1e-12);
            assert_abs_diff_eq!(st.invariant_defect(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn bar_states_solve_the_constant_system() {
        let zeta = 10.0;
        for i in 1..=40 {
            let s = i as f64 / 10.0;
            let st = bar_state(s, zeta).unwrap();
            let [r1, r2] = constant_residual(st.a1, st.a2, st.zeta, st.f);
            assert_abs_diff_eq!(r1, 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(r2, 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(st.modulus_sq(), s * s, epsilon = 1e-10);
            assert_abs_diff_eq!(st.invariant_defect(), 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn hat_coordinate_domain_is_enforced() {
        assert!(hat_state(1.0, 2.0).is_err());
        assert!(hat_state(-1.0, 2.0).is_err());
        assert!(hat_state(1.5, 2.0).is_err());
        assert!(hat_state(f64::NAN, 2.0).is_err());
        assert!(hat_state(0.999_999, 2.0).is_ok());
    }

    #[test]
    fn zeta_hat_prime_matches_finite_differences() {
        let f = 1.6;
        for &t in &[-0.7, -0.2, 0.0, 0.3, 0.8] {
            let h = 1e-6;
            let fd = (zeta_hat(t + h, f) - zeta_hat(t - h, f)) / (2.0 * h);
            assert_abs_diff_eq!(zeta_hat_prime(t, f), fd, epsilon = 1e-5);
        }
    }

    #[test]
    fn forcing_bar_prime_matches_finite_differences() {
        let zeta = 10.0;
        for &s in &[0.3, 1.0, 2.0, 3.5] {
            let h = 1e-6;
            let fd = (forcing_bar(s + h, zeta) - forcing_bar(s - h, zeta)) / (2.0 * h);
            assert_abs_diff_eq!(forcing_bar_prime(s, zeta), fd, epsilon = 1e-4);
        }
    }

    #[test]
    fn forcing_inversion_recovers_all_moduli() {
        // Monotone regime: a single modulus.
        let roots = bar_coords_for_forcing(0.0, 1.6);
        assert_eq!(roots.len(), 1);
        assert_abs_diff_eq!(forcing_bar(roots[0], 0.0), 1.6, epsilon = 1e-9);

        // Folded regime (zeta = 10 > sqrt 3): pick a forcing strictly inside
        // the fold window so all three moduli exist.
        let zeta = 10.0;
        let f_lo = forcing_bar(3.2, zeta); // near the upper fold
        let roots = bar_coords_for_forcing(zeta, f_lo * 1.001);
        assert_eq!(roots.len(), 3, "roots: {roots:?}");
        for &s in &roots {
            assert_abs_diff_eq!(forcing_bar(s, zeta), f_lo * 1.001, epsilon = 1e-8);
        }
        assert!(roots.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn negative_modulus_symmetry() {
        // (a1, a2, f) -> (-a1, -a2, -f) maps the curve to itself.
        let st = bar_state(1.3, 2.0).unwrap();
        let neg = bar_state(-1.3, 2.0).unwrap();
        assert_abs_diff_eq!(neg.a1, -st.a1, epsilon = 1e-15);
        assert_abs_diff_eq!(neg.a2, -st.a2, epsilon = 1e-15);
        assert_abs_diff_eq!(neg.f, -st.f, epsilon = 1e-15);
    }
}
