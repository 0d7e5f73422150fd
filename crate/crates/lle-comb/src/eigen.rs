//! Spectrum probes for the linearized operator.
//!
//! The operator is not self-adjoint (its skew coupling admits complex
//! pairs), so stability is tracked through the eigenvalues of smallest
//! magnitude, computed by shift-invert subspace iteration: factor the
//! operator once, repeatedly apply the inverse to a thin random block,
//! re-orthonormalize, and read eigenvalues off the small projected matrix.

use crate::field::FieldState;
use crate::operator::LinearizedOperator;
use crate::{Error, Result};
use nalgebra::linalg::LU;
use nalgebra::{Complex, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed seed for the iteration's random starting block, so repeated calls
/// are bit-identical.
const SEED: u64 = 0x00c0_ffee;

/// Maximum subspace iterations before reporting failure.
const MAX_SWEEPS: usize = 300;

/// Factor the matrix, falling back to a tiny diagonal shift when the
/// factorization is numerically singular (the interesting operators are
/// exactly the near-singular ones).  The projection step always uses the
/// unshifted matrix, so the shift only steers the inverse powers.
fn invertible_factor(a: &DMatrix<f64>) -> Result<LU<f64, Dyn, Dyn>> {
    let ratio = |lu: &LU<f64, Dyn, Dyn>| {
        let diag = lu.u().diagonal();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for v in diag.iter() {
            lo = lo.min(v.abs());
            hi = hi.max(v.abs());
        }
        if hi > 0.0 { lo / hi } else { 0.0 }
    };
    let lu = LU::new(a.clone());
    if ratio(&lu) >= 1e-14 {
        return Ok(lu);
    }
    let mut shifted = a.clone();
    for i in 0..a.nrows() {
        shifted[(i, i)] += 1e-10;
    }
    let lu = LU::new(shifted);
    if ratio(&lu) >= 1e-16 {
        Ok(lu)
    } else {
        Err(Error::Eigen(
            "operator is singular even after diagonal shift".into(),
        ))
    }
}

/// Random starting block with entries in `(-0.5, 0.5)`.
fn random_block(rows: usize, cols: usize) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    DMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>() - 0.5)
}

/// In-place modified Gram-Schmidt with one re-orthogonalization pass.
/// Columns that collapse are replaced by fresh random data.
fn orthonormalize(q: &mut DMatrix<f64>, rng: &mut ChaCha8Rng) {
    let (rows, cols) = q.shape();
    for j in 0..cols {
        for _attempt in 0..3 {
            for _pass in 0..2 {
                for i in 0..j {
                    let proj = q.column(i).dot(&q.column(j));
                    let qi = q.column(i).clone_owned();
                    let mut cj = q.column_mut(j);
                    cj.axpy(-proj, &qi, 1.0);
                }
            }
            let norm = q.column(j).norm();
            if norm > 1e-12 {
                q.column_mut(j).scale_mut(1.0 / norm);
                break;
            }
            for i in 0..rows {
                q[(i, j)] = rng.random::<f64>() - 0.5;
            }
        }
    }
}

/// The `m` eigenvalues of smallest magnitude of the linearized operator,
/// sorted by ascending magnitude.  Complex pairs appear as conjugates.
pub fn smallest_eigenvalues(op: &LinearizedOperator, m: usize) -> Result<Vec<Complex<f64>>> {
    let a = op.matrix();
    let dim = a.nrows();
    let m = m.clamp(1, dim);
    // Guard columns absorb slow tail convergence and keep a conjugate
    // pair straddling the cut from stalling the whole iteration.
    let width = (m + 4).min(dim);
    let lu = invertible_factor(a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x9e37_79b9);
    let mut q = random_block(dim, width);
    orthonormalize(&mut q, &mut rng);

    let mut previous: Vec<Complex<f64>> = Vec::new();
    for _sweep in 0..MAX_SWEEPS {
        let z = lu
            .solve(&q)
            .ok_or_else(|| Error::Eigen("inverse application failed".into()))?;
        q = z;
        orthonormalize(&mut q, &mut rng);
        let h = q.transpose() * a * &q;
        let mut eigs: Vec<Complex<f64>> = h.complex_eigenvalues().iter().copied().collect();
        eigs.sort_by(|x, y| x.norm().total_cmp(&y.norm()).then(x.im.total_cmp(&y.im)));
        let settled = previous.len() == eigs.len()
            && eigs
                .iter()
                .zip(&previous)
                .take(m)
                .all(|(now, before)| (now - before).norm() <= 1e-10 * (1.0 + now.norm()));
        if settled {
            eigs.truncate(m);
            return Ok(eigs);
        }
        previous = eigs;
    }
    Err(Error::Eigen(format!(
        "subspace iteration did not settle in {MAX_SWEEPS} sweeps"
    )))
}

/// Scalar stability indicator from a computed eigenvalue set: the most
/// negative essentially-real eigenvalue when one exists, otherwise the
/// smallest magnitude (kept positive, since a complex pair cannot cross
/// zero along the real axis).
pub fn min_eig_indicator(eigs: &[Complex<f64>]) -> f64 {
    eigs.iter()
        .map(|l| {
            if l.im.abs() <= 1e-8 * l.re.abs().max(1.0) {
                l.re
            } else {
                l.norm()
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Normalized direction spanning the near-kernel of the operator, found by
/// inverse iteration.  Fails when the dominant small eigenvalue is a
/// complex pair (the iteration then has no real limit).
pub fn near_kernel_vector(op: &LinearizedOperator) -> Result<FieldState> {
    let a = op.matrix();
    let dim = a.nrows();
    let lu = invertible_factor(a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5ca1_ab1e);
    let mut v = DVector::from_fn(dim, |_, _| rng.random::<f64>() - 0.5);
    v /= v.norm();
    let mut rayleigh = f64::INFINITY;
    let mut settled = false;
    for _sweep in 0..200 {
        let w = lu
            .solve(&v)
            .ok_or_else(|| Error::Eigen("inverse application failed".into()))?;
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Eigen("inverse iteration collapsed".into()));
        }
        v = w / norm;
        let current = v.dot(&(a * &v));
        if (current - rayleigh).abs() <= 1e-12 * (1.0 + current.abs()) {
            settled = true;
            break;
        }
        rayleigh = current;
    }
    if !settled {
        return Err(Error::Eigen(
            "inverse iteration did not settle on a real direction".into(),
        ));
    }
    // Deterministic sign: largest-magnitude entry positive.
    let lead = v
        .iter()
        .copied()
        .max_by(|x, y| x.abs().total_cmp(&y.abs()))
        .unwrap_or(1.0);
    if lead < 0.0 {
        v = -v;
    }
    let n = dim / 2;
    FieldState::from_coeffs(
        op.grid().clone(),
        &v.as_slice()[..n],
        &v.as_slice()[n..],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifurcation;
    use crate::grid::Grid;
    use crate::params::Parameters;
    use crate::trivial;

    /// Exact eigenvalues at a constant state: the operator decouples into
    /// per-mode 2x2 blocks.
    fn exact_block_eigs(a1: f64, a2: f64, zeta: f64, d: f64, max_mode: usize) -> Vec<Complex<f64>> {
        let mut out = Vec::new();
        for m in 0..=max_mode {
            let base = d * (m * m) as f64 + zeta;
            let l11 = base - 3.0 * a1 * a1 - a2 * a2;
            let l22 = base - a1 * a1 - 3.0 * a2 * a2;
            let l12 = 1.0 - 2.0 * a1 * a2;
            let l21 = -1.0 - 2.0 * a1 * a2;
            let tr = l11 + l22;
            let det = l11 * l22 - l12 * l21;
            let disc = tr * tr - 4.0 * det;
            if disc >= 0.0 {
                out.push(Complex::new(0.5 * (tr + disc.sqrt()), 0.0));
                out.push(Complex::new(0.5 * (tr - disc.sqrt()), 0.0));
            } else {
                let im = 0.5 * (-disc).sqrt();
                out.push(Complex::new(0.5 * tr, im));
                out.push(Complex::new(0.5 * tr, -im));
            }
        }
        out.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
        out
    }

    #[test]
    fn matches_exact_spectrum_at_constant_state() {
        let grid = Grid::new(32).unwrap();
        let state = trivial::bar_state(0.9, 0.5).unwrap();
        let p = state.parameters(0.1).unwrap();
        let u = FieldState::from_constant_state(grid, &state);
        let op = LinearizedOperator::new(&u, &p);
        let computed = smallest_eigenvalues(&op, 6).unwrap();
        let exact = exact_block_eigs(state.a1, state.a2, p.zeta, p.d, 31);
        for lambda in &computed {
            let best = exact
                .iter()
                .map(|e| (e - lambda).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "eigenvalue {lambda} off by {best}");
        }
        // Magnitudes must agree with the exact smallest six.
        for (c, e) in computed.iter().zip(&exact) {
            assert!(
                (c.norm() - e.norm()).abs() < 1e-8,
                "magnitude mismatch {} vs {}",
                c.norm(),
                e.norm()
            );
        }
    }

    #[test]
    fn indicator_prefers_most_negative_real_part() {
        let eigs = vec![
            Complex::new(0.05, 0.0),
            Complex::new(-0.3, 0.0),
            Complex::new(0.1, 2.0),
        ];
        assert_eq!(min_eig_indicator(&eigs), -0.3);
        // A complex pair alone keeps the indicator positive even with
        // negative real parts.
        let pair = vec![Complex::new(-0.2, 1.0), Complex::new(-0.2, -1.0)];
        let ind = min_eig_indicator(&pair);
        assert!(ind > 0.0);
        assert!((ind - (0.04_f64 + 1.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn near_singular_operator_is_handled() {
        // A constant state exactly on a branching point: one cosine-mode
        // block of the operator is singular.
        let (zeta, d, k) = (0.0, 0.1, 5.0_f64);
        let mu = zeta + d * k * k;
        let s = ((2.0 * mu - (mu * mu - 3.0).sqrt()) / 3.0).sqrt();
        let state = trivial::bar_state(s, zeta).unwrap();
        let p = Parameters::new(d, zeta, state.f).unwrap();
        let grid = Grid::new(64).unwrap();
        let u = FieldState::from_constant_state(grid, &state);
        let op = LinearizedOperator::new(&u, &p);
        let eigs = smallest_eigenvalues(&op, 6).unwrap();
        assert!(eigs[0].norm() < 1e-8, "smallest {:?}", eigs[0]);
    }

    #[test]
    fn kernel_vector_is_the_critical_cosine_mode() {
        let (zeta, d, k) = (0.0, 0.1, 5u32);
        let mu = zeta + d * (k * k) as f64;
        let s = ((2.0 * mu - (mu * mu - 3.0).sqrt()) / 3.0).sqrt();
        let state = trivial::bar_state(s, zeta).unwrap();
        let p = Parameters::new(d, zeta, state.f).unwrap();
        let grid = Grid::new(64).unwrap();
        let u = FieldState::from_constant_state(grid.clone(), &state);
        let op = LinearizedOperator::new(&u, &p);
        let v = near_kernel_vector(&op).unwrap();

        // Almost annihilated by the operator.
        let lv = op.apply(&v);
        assert!(lv.l2_norm() < 1e-6 * v.l2_norm());

        // Supported on cosine mode k only, along the analytic kernel
        // direction.
        let (c1, c2) = v.coeffs();
        let kernel = bifurcation::kernel_vectors(state.a1, state.a2, zeta, d, k).unwrap();
        let dot = c1[k as usize] * kernel.alpha[0] + c2[k as usize] * kernel.alpha[1];
        let norm_num = (c1[k as usize].powi(2) + c2[k as usize].powi(2)).sqrt();
        let norm_den = (kernel.alpha[0].powi(2) + kernel.alpha[1].powi(2)).sqrt();
        assert!(
            dot.abs() / (norm_num * norm_den) > 0.999,
            "kernel direction mismatch"
        );
        let off_mode: f64 = c1
            .iter()
            .zip(&c2)
            .enumerate()
            .filter(|(m, _)| *m != k as usize)
            .map(|(_, (x, y))| x * x + y * y)
            .sum::<f64>()
            .sqrt();
        assert!(off_mode < 1e-6, "off-mode mass {off_mode}");
    }

    #[test]
    fn repeated_calls_are_deterministic() {
        let grid = Grid::new(32).unwrap();
        let state = trivial::bar_state(1.1, 2.0).unwrap();
        let p = state.parameters(-0.2).unwrap();
        let u = FieldState::from_constant_state(grid, &state);
        let op = LinearizedOperator::new(&u, &p);
        let a = smallest_eigenvalues(&op, 5).unwrap();
        let b = smallest_eigenvalues(&op, 5).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}
