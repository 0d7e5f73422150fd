//! Discrete stationary residual, its exact Jacobian, and the linearized
//! operator.
//!
//! With `R = (R1, R2)` defined so that stationary solutions satisfy
//! `R = 0`:
//!
//! ```text
//!   R1 = d a1'' - a2 - zeta a1 + (a1^2 + a2^2) a1
//!   R2 = d a2'' + a1 - zeta a2 + (a1^2 + a2^2) a2 - f
//! ```
//!
//! (so at the zero field `R = (0, -f)`).  The Jacobian with respect to
//! `(a1, a2)` is `d d^2/dx^2 + N(a, zeta)` with the pointwise matrix `N`
//! from [`crate::bifurcation::n_matrix`]; the **linearized operator** used
//! for stability indicators is its negative,
//!
//! ```text
//!   L phi = -d phi'' - N(a, zeta) phi,
//! ```
//!
//! which at a constant state acts diagonally on cosine modes as
//! `d k^2 I - N`.  `L` is *not* symmetric (the off-diagonal parts of `N`
//! differ by the constant skew pair `-1 / +1`), so complex eigenvalue pairs
//! are possible and handled throughout.
//!
//! All matrices live in coefficient space, where the second derivative is
//! diagonal and pointwise multiplication is a convolution:  multiplication
//! by a function with cosine coefficients `q_0..q_{2N}` maps mode `l` to
//! mode `m` with weight `qh_{|m-l|} + qh_{m+l}` (`m >= 1`) or `qh_l`
//! (`m = 0`), where `qh_0 = q_0` and `qh_j = q_j / 2` otherwise.  The
//! product coefficients are computed alias-free, so the assembled matrix is
//! the exact derivative of the discrete residual.

use crate::field::FieldState;
use crate::grid::Grid;
use crate::params::{Mode, Parameters};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Residual cosine coefficients `(R1, R2)` from state coefficients.
pub fn residual_coeffs(
    grid: &Grid,
    c1: &[f64],
    c2: &[f64],
    p: &Parameters,
) -> (Vec<f64>, Vec<f64>) {
    let (q1, q2) = grid.dealiased_cubic(c1, c2);
    let n = grid.n();
    let mut r1 = vec![0.0; n];
    let mut r2 = vec![0.0; n];
    for m in 0..n {
        let lap = -p.d * (m * m) as f64;
        r1[m] = lap * c1[m] - c2[m] - p.zeta * c1[m] + q1[m];
        r2[m] = lap * c2[m] + c1[m] - p.zeta * c2[m] + q2[m];
    }
    r2[0] -= p.f;
    (r1, r2)
}

/// Nodal residual values `(R1, R2)` of a field.
pub fn residual(u: &FieldState, p: &Parameters) -> (Vec<f64>, Vec<f64>) {
    let (c1, c2) = u.coeffs();
    let (r1, r2) = residual_coeffs(u.grid(), &c1, &c2, p);
    (u.grid().synthesize(&r1), u.grid().synthesize(&r2))
}

/// Maximum nodal residual magnitude (the Newton convergence norm).
pub fn residual_max(u: &FieldState, p: &Parameters) -> f64 {
    let (r1, r2) = residual(u, p);
    r1.iter()
        .chain(&r2)
        .fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Add the convolution matrix of the multiplier with extended cosine
/// coefficients `q` (modes `0..=2N`), scaled by `scale`, into `block`.
fn add_convolution(block: &mut nalgebra::DMatrixViewMut<f64>, q: &[f64], scale: f64) {
    let n = block.nrows();
    debug_assert!(q.len() >= 2 * n - 1);
    // Symmetrized (exponential-basis) coefficients.
    let qh: Vec<f64> = q
        .iter()
        .enumerate()
        .map(|(j, &v)| if j == 0 { v } else { 0.5 * v })
        .collect();
    for l in 0..n {
        block[(0, l)] += scale * qh[l];
    }
    for m in 1..n {
        for l in 0..n {
            block[(m, l)] += scale * (qh[m.abs_diff(l)] + qh[m + l]);
        }
    }
}

/// Exact Jacobian of the discrete residual with respect to the stacked
/// coefficient vector `[c1; c2]`, a dense `2n x 2n` matrix.
pub fn jacobian(u: &FieldState, p: &Parameters) -> DMatrix<f64> {
    let grid = u.grid();
    let n = grid.n();
    let (c1, c2) = u.coeffs();
    let p11 = grid.product_coeffs_extended(&c1, &c1);
    let p22 = grid.product_coeffs_extended(&c2, &c2);
    let p12 = grid.product_coeffs_extended(&c1, &c2);

    let mut j = DMatrix::<f64>::zeros(2 * n, 2 * n);
    // Linear parts: diagonal Laplacian/detuning blocks and the constant
    // skew coupling.
    for m in 0..n {
        let lap = -p.d * (m * m) as f64 - p.zeta;
        j[(m, m)] = lap;
        j[(n + m, n + m)] = lap;
        j[(m, n + m)] = -1.0;
        j[(n + m, m)] = 1.0;
    }
    // Nonlinear parts: d(|a|^2 a1)/da1 = 3 a1^2 + a2^2, etc.
    let three_p11_p22: Vec<f64> = p11.iter().zip(&p22).map(|(a, b)| 3.0 * a + b).collect();
    let p11_three_p22: Vec<f64> = p11.iter().zip(&p22).map(|(a, b)| a + 3.0 * b).collect();
    add_convolution(&mut j.view_mut((0, 0), (n, n)), &three_p11_p22, 1.0);
    add_convolution(&mut j.view_mut((0, n), (n, n)), &p12, 2.0);
    add_convolution(&mut j.view_mut((n, 0), (n, n)), &p12, 2.0);
    add_convolution(&mut j.view_mut((n, n), (n, n)), &p11_three_p22, 1.0);
    j
}

/// Derivative of the residual with respect to the *active* parameter, in
/// stacked coefficient form: `(-c1, -c2)` for detuning, `(0, -e_0)` for
/// forcing.
pub fn jacobian_param(u: &FieldState, mode: Mode) -> DVector<f64> {
    let n = u.grid().n();
    let mut v = DVector::<f64>::zeros(2 * n);
    match mode {
        Mode::Hat => {
            let (c1, c2) = u.coeffs();
            for m in 0..n {
                v[m] = -c1[m];
                v[n + m] = -c2[m];
            }
        }
        Mode::Bar => {
            v[n] = -1.0;
        }
    }
    v
}

/// Stack two coefficient vectors into one unknown vector.
pub fn stack(c1: &[f64], c2: &[f64]) -> DVector<f64> {
    let n = c1.len();
    let mut v = DVector::zeros(2 * n);
    v.as_mut_slice()[..n].copy_from_slice(c1);
    v.as_mut_slice()[n..].copy_from_slice(c2);
    v
}

/// Split a stacked vector back into the two coefficient vectors.
pub fn unstack(v: &DVector<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = v.len() / 2;
    (v.as_slice()[..n].to_vec(), v.as_slice()[n..].to_vec())
}

/// The linearized operator `L = -d d^2/dx^2 - N(a, zeta)` at a state, as a
/// dense coefficient-space matrix (the negated residual Jacobian).
pub struct LinearizedOperator {
    matrix: DMatrix<f64>,
    grid: Arc<Grid>,
}

impl LinearizedOperator {
    pub fn new(u: &FieldState, p: &Parameters) -> Self {
        Self {
            matrix: -jacobian(u, p),
            grid: Arc::clone(u.grid()),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Apply `L` to a field given nodally.
    pub fn apply(&self, phi: &FieldState) -> FieldState {
        let (c1, c2) = phi.coeffs();
        let out = &self.matrix * stack(&c1, &c2);
        let (o1, o2) = unstack(&out);
        FieldState::from_coeffs(Arc::clone(&self.grid), &o1, &o2)
            .expect("applying a finite operator to a finite field")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trivial;
    use approx::assert_abs_diff_eq;

    fn setup() -> (Arc<Grid>, Parameters) {
        (Grid::new(32).unwrap(), Parameters::new(0.1, 2.5, 1.6).unwrap())
    }

    #[test]
    fn residual_at_zero_field_is_pure_forcing() {
        let (g, p) = setup();
        let u = FieldState::constant(Arc::clone(&g), 0.0, 0.0);
        let (r1, r2) = residual(&u, &p);
        assert!(r1.iter().all(|v| v.abs() < 1e-14));
        assert!(r2.iter().all(|v| (v + p.f).abs() < 1e-14));
    }

    #[test]
    fn residual_vanishes_on_constant_solutions() {
        let g = Grid::new(64).unwrap();
        let st = trivial::hat_state(0.3, 1.6).unwrap();
        let p = st.parameters(0.1).unwrap();
        let u = FieldState::from_constant_state(Arc::clone(&g), &st);
        assert!(residual_max(&u, &p) < 1e-12);
    }

    #[test]
    fn jacobian_at_a_constant_state_is_block_diagonal_per_mode() {
        // At a constant state the convolution matrices are diagonal, so
        // J couples only (c1_m, c2_m) pairs, with the closed-form 2x2 block
        // -(d m^2 I - N).
        let (g, p) = setup();
        let st = trivial::bar_state(1.0, p.zeta).unwrap();
        let pp = Parameters::new(p.d, p.zeta, st.f).unwrap();
        let u = FieldState::from_constant_state(Arc::clone(&g), &st);
        let j = jacobian(&u, &pp);
        let n = g.n();
        let nm = crate::bifurcation::n_matrix(st.a1, st.a2, pp.zeta);
        for m in 0..n {
            let lam = pp.d * (m * m) as f64;
            assert_abs_diff_eq!(j[(m, m)], -(lam - nm[0][0]), epsilon = 1e-10);
            assert_abs_diff_eq!(j[(m, n + m)], nm[0][1], epsilon = 1e-10);
            assert_abs_diff_eq!(j[(n + m, m)], nm[1][0], epsilon = 1e-10);
            assert_abs_diff_eq!(j[(n + m, n + m)], -(lam - nm[1][1]), epsilon = 1e-10);
            // Off-mode couplings vanish.
            if m + 3 < n {
                assert_abs_diff_eq!(j[(m, m + 3)], 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(j[(m, n + m + 3)], 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences_on_a_rough_field() {
        let (g, p) = setup();
        let n = g.n();
        let a1: Vec<f64> = g
            .nodes()
            .iter()
            .map(|x| 0.8 + 0.3 * x.cos() - 0.2 * (5.0 * x).cos())
            .collect();
        let a2: Vec<f64> = g
            .nodes()
            .iter()
            .map(|x| -0.4 + 0.25 * (3.0 * x).cos())
            .collect();
        let u = FieldState::from_nodal(Arc::clone(&g), a1, a2).unwrap();
        let (c1, c2) = u.coeffs();
        let x0 = stack(&c1, &c2);
        let j = jacobian(&u, &p);

        // Directional derivative against central differences.
        let mut dir = DVector::zeros(2 * n);
        for i in 0..2 * n {
            dir[i] = ((i * 7 + 3) % 11) as f64 / 11.0 - 0.5;
        }
        let h = 1e-6;
        let eval = |x: &DVector<f64>| {
            let (c1, c2) = unstack(x);
            let (r1, r2) = residual_coeffs(&g, &c1, &c2, &p);
            stack(&r1, &r2)
        };
        let fd = (eval(&(&x0 + h * &dir)) - eval(&(&x0 - h * &dir))) / (2.0 * h);
        let jd = &j * &dir;
        let err = (&fd - &jd).amax();
        assert!(err < 1e-7, "directional derivative error {err:.3e}");
    }

    #[test]
    fn parameter_derivatives_have_the_documented_form() {
        let (g, _) = setup();
        let u = FieldState::constant(Arc::clone(&g), 0.7, -0.3);
        let n = g.n();
        let vh = jacobian_param(&u, Mode::Hat);
        assert_abs_diff_eq!(vh[0], -0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(vh[n], 0.3, epsilon = 1e-12);
        let vb = jacobian_param(&u, Mode::Bar);
        assert_eq!(vb[n], -1.0);
        assert_eq!(vb.iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn linearized_operator_acts_as_mode_matrix_at_constant_states() {
        let g = Grid::new(32).unwrap();
        let st = trivial::bar_state(1.2, 0.0).unwrap();
        let p = Parameters::new(0.1, 0.0, st.f).unwrap();
        let u = FieldState::from_constant_state(Arc::clone(&g), &st);
        let op = LinearizedOperator::new(&u, &p);
        // phi = (cos 4x, 0): L phi mode-4 pair must be (d*16 I - N) e1.
        let mut c1 = vec![0.0; g.n()];
        c1[4] = 1.0;
        let c2 = vec![0.0; g.n()];
        let phi = FieldState::from_coeffs(Arc::clone(&g), &c1, &c2).unwrap();
        let out = op.apply(&phi);
        let (o1, o2) = out.coeffs();
        let nm = crate::bifurcation::n_matrix(st.a1, st.a2, p.zeta);
        let lam = p.d * 16.0;
        assert_abs_diff_eq!(o1[4], lam - nm[0][0], epsilon = 1e-10);
        assert_abs_diff_eq!(o2[4], -nm[1][0], epsilon = 1e-10);
    }
}
