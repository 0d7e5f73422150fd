//! Discretized-linearization properties at branching points: the
//! analytic kernel mode is annihilated at second order in the grid
//! spacing, the spectrum isolates exactly one vanishing eigenvalue, and
//! the nonlinear solver sharpens nearby states to machine residual.

mod common;

use common::*;
use lle_comb::bifurcation::{enumerate_bar, enumerate_hat, BifurcationCandidate};
use lle_comb::newton::{self, NewtonOptions};
use lle_comb::operator::LinearizedOperator;
use lle_comb::params::Parameters;
use lle_comb::{eigen, FieldState, Grid};
use std::sync::Arc;

/// The analytic kernel mode `alpha cos(kx)` of a candidate, on `grid`.
fn kernel_mode(grid: &Arc<Grid>, c: &BifurcationCandidate) -> FieldState {
    let mut c1 = vec![0.0; grid.n()];
    let mut c2 = vec![0.0; grid.n()];
    c1[c.k as usize] = c.kernel.alpha[0];
    c2[c.k as usize] = c.kernel.alpha[1];
    FieldState::from_coeffs(grid.clone(), &c1, &c2).unwrap()
}

/// Nodal correlation coefficient between two fields.
fn correlation(u: &FieldState, w: &FieldState) -> f64 {
    let dot = |x: &FieldState, y: &FieldState| -> f64 {
        x.a1
            .iter()
            .zip(&y.a1)
            .chain(x.a2.iter().zip(&y.a2))
            .map(|(a, b)| a * b)
            .sum()
    };
    dot(u, w).abs() / (dot(u, u).sqrt() * dot(w, w).sqrt())
}

#[test]
fn kernel_mode_is_annihilated_at_second_order() {
    let sets: Vec<(BifurcationCandidate, f64)> = vec![
        (
            lookup(&enumerate_hat(1.6, 0.1).unwrap(), 1, 1, 0.10528).clone(),
            0.1,
        ),
        (
            lookup(&enumerate_bar(0.0, 0.1, 8).unwrap(), 5, 1, 1.03235).clone(),
            0.1,
        ),
    ];
    for (c, d) in sets {
        let p = c.state.parameters(d).unwrap();
        for n in [32_usize, 64, 128, 256] {
            let grid = Grid::new(n).unwrap();
            let base = FieldState::from_constant_state(grid.clone(), &c.state);
            let op = LinearizedOperator::new(&base, &p);
            let phi = kernel_mode(&grid, &c);
            let image = op.apply(&phi);
            let defect = image.sup_modulus();
            // Central second differences on a pure cosine leave a
            // defect of |d| k^4 h^2 / 12 with h = pi / (n - 1); the
            // constant below has better than a 2x margin on that.
            let bound = d.abs() * (c.k as f64).powi(4) / (n as f64).powi(2) + 1e-9;
            assert!(
                defect <= bound,
                "k={} n={n}: defect {defect:.3e} above {bound:.3e}",
                c.k
            );
        }
    }
}

#[test]
fn spectrum_isolates_one_vanishing_eigenvalue_at_a_candidate() {
    let cands = enumerate_hat(2.0, -0.1).unwrap();
    let c = lookup(&cands, 1, -1, 0.85260);
    let p = c.state.parameters(-0.1).unwrap();
    let grid = Grid::new(256).unwrap();
    let base = FieldState::from_constant_state(grid.clone(), &c.state);
    let op = LinearizedOperator::new(&base, &p);

    let eigs = eigen::smallest_eigenvalues(&op, 6).unwrap();
    let vanishing = eigs.iter().filter(|l| l.norm() < 1e-6).count();
    assert_eq!(vanishing, 1, "eigenvalues {eigs:?}");

    let v = eigen::near_kernel_vector(&op).unwrap();
    let corr = correlation(&v, &kernel_mode(&grid, c));
    assert!(corr > 0.999, "kernel correlation {corr}");
}

#[test]
fn solver_polishes_a_perturbed_constant_state() {
    // Away from any branching point the constant solution is isolated:
    // a small smooth perturbation must wash back out, quadratically.
    let p = Parameters::new(0.1, 0.5, 1.2).unwrap();
    let roots = lle_comb::trivial::bar_coords_for_forcing(p.zeta, p.f);
    let s = roots
        .into_iter()
        .min_by(|a, b| a.total_cmp(b))
        .expect("a constant solution exists here");
    let grid = Grid::new(64).unwrap();
    let state = lle_comb::trivial::bar_state(s, p.zeta).unwrap();
    let base = FieldState::constant(grid.clone(), state.a1, state.a2);

    let bump: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|x| 1e-3 * (2.0 * x).cos())
        .collect();
    let zero = vec![0.0; grid.n()];
    let u0 = base.add_scaled(&FieldState::from_nodal(grid.clone(), &bump, &zero).unwrap(), 1.0);

    let opts = NewtonOptions::default();
    let (u, report) = newton::solve(&u0, &p, &opts).unwrap();
    assert!(report.residual_max <= opts.tol);
    assert!(report.iterations <= 6, "took {} iterations", report.iterations);
    assert!(u.max_abs_diff(&base) < 1e-10, "did not return to the constant");

    // Idempotence: solving again from the solution is a no-op.
    let (u2, report2) = newton::solve(&u, &p, &opts).unwrap();
    assert!(report2.iterations <= 1);
    assert!(u2.max_abs_diff(&u) < 1e-12);
}
