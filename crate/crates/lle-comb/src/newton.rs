//! Damped Newton iteration for the stationary system.
//!
//! The unknown is the stacked cosine-coefficient vector `[c1; c2]`; each
//! step solves the dense coefficient-space Jacobian by LU factorization and
//! backtracks along the Newton direction until the residual 2-norm
//! satisfies an Armijo-type decrease.  Convergence is declared on the
//! *nodal* maximum residual, which is the norm the validation layer
//! reports.

use crate::field::FieldState;
use crate::operator::{self, jacobian};
use crate::params::Parameters;
use crate::{Error, Result};
use nalgebra::linalg::LU;
use nalgebra::{DMatrix, DVector, Dyn};

/// Tuning knobs for [`solve`].
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Nodal maximum-residual threshold declaring convergence.
    pub tol: f64,
    /// Maximum number of Newton steps before giving up.
    pub max_iter: usize,
    /// Smallest backtracking factor tried before the step is declared
    /// failed.
    pub min_backtrack: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 25,
            min_backtrack: 2.0_f64.powi(-20),
        }
    }
}

/// What the iteration did, reported alongside the converged state.
#[derive(Debug, Clone, Copy)]
pub struct NewtonReport {
    /// Newton steps actually taken.
    pub iterations: usize,
    /// Final nodal maximum residual.
    pub residual_max: f64,
}

/// LU-solve `matrix * x = rhs` with a pivot-ratio guard: a factorization
/// whose smallest pivot is below `1e-14` of its largest is reported as
/// singular instead of returning a garbage direction.
pub(crate) fn solve_linear(matrix: DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let lu: LU<f64, Dyn, Dyn> = LU::new(matrix);
    let diag = lu.u().diagonal();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for v in diag.iter() {
        lo = lo.min(v.abs());
        hi = hi.max(v.abs());
    }
    if !(lo.is_finite() && hi.is_finite()) || lo < 1e-14 * hi {
        return Err(Error::SingularLinearization(format!(
            "pivot ratio {:.3e} below threshold",
            if hi > 0.0 { lo / hi } else { 0.0 }
        )));
    }
    lu.solve(rhs)
        .ok_or_else(|| Error::SingularLinearization("factorization failed".into()))
}

/// Solve the stationary system by damped Newton iteration from `u0` at
/// fixed parameters.  Returns the converged state and an iteration report;
/// fails with [`Error::NoConvergence`] when the step budget or the
/// backtracking range is exhausted, and with
/// [`Error::SingularLinearization`] when a Jacobian cannot be factorized.
pub fn solve(
    u0: &FieldState,
    p: &Parameters,
    opts: &NewtonOptions,
) -> Result<(FieldState, NewtonReport)> {
    let grid = u0.grid().clone();
    let mut u = u0.clone();
    let (mut c1, mut c2) = u.coeffs();

    for iteration in 0..=opts.max_iter {
        let (r1, r2) = operator::residual_coeffs(&grid, &c1, &c2, p);
        let residual_max = nodal_max(&grid, &r1, &r2);
        if residual_max <= opts.tol {
            return Ok((
                u,
                NewtonReport {
                    iterations: iteration,
                    residual_max,
                },
            ));
        }
        if iteration == opts.max_iter {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: residual_max,
            });
        }

        let r = operator::stack(&r1, &r2);
        let r_norm = r.norm();
        let delta = solve_linear(jacobian(&u, p), &r)?;

        // Backtracking line search on the coefficient-space residual
        // 2-norm.
        let mut lambda = 1.0;
        let accepted = loop {
            let t1: Vec<f64> = c1
                .iter()
                .zip(delta.as_slice())
                .map(|(c, d)| c - lambda * d)
                .collect();
            let t2: Vec<f64> = c2
                .iter()
                .zip(&delta.as_slice()[c1.len()..])
                .map(|(c, d)| c - lambda * d)
                .collect();
            let (s1, s2) = operator::residual_coeffs(&grid, &t1, &t2, p);
            let trial_norm = operator::stack(&s1, &s2).norm();
            if trial_norm.is_finite() && trial_norm <= (1.0 - 1e-4 * lambda) * r_norm {
                break Some((t1, t2));
            }
            lambda *= 0.5;
            if lambda < opts.min_backtrack {
                break None;
            }
        };
        match accepted {
            Some((t1, t2)) => {
                c1 = t1;
                c2 = t2;
                u = FieldState::from_coeffs(grid.clone(), &c1, &c2)?;
            }
            None => {
                return Err(Error::NoConvergence {
                    iterations: iteration,
                    residual: residual_max,
                });
            }
        }
    }
    unreachable!("loop returns on convergence or exhaustion");
}

/// Nodal maximum magnitude of a residual given by coefficients.
fn nodal_max(grid: &crate::grid::Grid, r1: &[f64], r2: &[f64]) -> f64 {
    grid.synthesize(r1)
        .iter()
        .chain(&grid.synthesize(r2))
        .fold(0.0_f64, |m, v| m.max(v.abs()))
}
