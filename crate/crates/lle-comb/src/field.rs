//! Nodal two-component fields on the collocation grid.

use crate::grid::Grid;
use crate::trivial::ConstantState;
use crate::{Error, Result};
use rustfft::num_complex::Complex;
use std::sync::Arc;

/// A real two-component field `(a1, a2)` sampled on the grid nodes; the
/// discrete stationary unknown.
#[derive(Debug, Clone)]
pub struct FieldState {
    grid: Arc<Grid>,
    a1: Vec<f64>,
    a2: Vec<f64>,
}

impl FieldState {
    /// Build from nodal samples (lengths must match the grid).
    pub fn from_nodal(grid: Arc<Grid>, a1: Vec<f64>, a2: Vec<f64>) -> Result<Self> {
        if a1.len() != grid.n() || a2.len() != grid.n() {
            return Err(Error::Domain(format!(
                "field length {}/{} does not match grid ({})",
                a1.len(),
                a2.len(),
                grid.n()
            )));
        }
        if a1.iter().chain(&a2).any(|v| !v.is_finite()) {
            return Err(Error::Domain("field contains non-finite values".into()));
        }
        Ok(Self { grid, a1, a2 })
    }

    /// Build from cosine coefficients.
    pub fn from_coeffs(grid: Arc<Grid>, c1: &[f64], c2: &[f64]) -> Result<Self> {
        let a1 = grid.synthesize(c1);
        let a2 = grid.synthesize(c2);
        Self::from_nodal(grid, a1, a2)
    }

    /// Spatially constant field with the given component values.
    pub fn constant(grid: Arc<Grid>, a1: f64, a2: f64) -> Self {
        let n = grid.n();
        Self {
            grid,
            a1: vec![a1; n],
            a2: vec![a2; n],
        }
    }

    /// Field holding a closed-form constant solution.
    pub fn from_constant_state(grid: Arc<Grid>, state: &ConstantState) -> Self {
        Self::constant(grid, state.a1, state.a2)
    }

    /// Field from complex nodal values `a = a1 + i a2` (time integrator
    /// interface).
    pub fn from_complex(grid: Arc<Grid>, a: &[Complex<f64>]) -> Result<Self> {
        let a1 = a.iter().map(|z| z.re).collect();
        let a2 = a.iter().map(|z| z.im).collect();
        Self::from_nodal(grid, a1, a2)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn a1(&self) -> &[f64] {
        &self.a1
    }

    pub fn a2(&self) -> &[f64] {
        &self.a2
    }

    /// Complex nodal view `a = a1 + i a2`.
    pub fn to_complex(&self) -> Vec<Complex<f64>> {
        self.a1
            .iter()
            .zip(&self.a2)
            .map(|(&r, &i)| Complex::new(r, i))
            .collect()
    }

    /// Cosine coefficients of both components.
    pub fn coeffs(&self) -> (Vec<f64>, Vec<f64>) {
        (self.grid.analyze(&self.a1), self.grid.analyze(&self.a2))
    }

    /// Pointwise modulus `sqrt(a1^2 + a2^2)` at the nodes.
    pub fn modulus(&self) -> Vec<f64> {
        self.a1
            .iter()
            .zip(&self.a2)
            .map(|(x, y)| x.hypot(*y))
            .collect()
    }

    /// `L^2(0, pi)` norm of the two-component field.
    pub fn l2_norm(&self) -> f64 {
        let (c1, c2) = self.coeffs();
        (self.grid.l2_sq(&c1) + self.grid.l2_sq(&c2)).sqrt()
    }

    /// Supremum of the pointwise modulus (the norm the a-priori bound
    /// controls).
    pub fn sup_modulus(&self) -> f64 {
        self.a1
            .iter()
            .zip(&self.a2)
            .map(|(x, y)| x.hypot(*y))
            .fold(0.0, f64::max)
    }

    /// Componentwise supremum distance to another field.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.a1
            .iter()
            .zip(&other.a1)
            .chain(self.a2.iter().zip(&other.a2))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Componentwise supremum distance to a constant field `(v1, v2)`.
    pub fn max_abs_diff_const(&self, v1: f64, v2: f64) -> f64 {
        let d1 = self
            .a1
            .iter()
            .map(|a| (a - v1).abs())
            .fold(0.0, f64::max);
        let d2 = self
            .a2
            .iter()
            .map(|a| (a - v2).abs())
            .fold(0.0, f64::max);
        d1.max(d2)
    }

    /// The four componentwise extrema `(min a1, max a1, min a2, max a2)`;
    /// enough to evaluate the distance to *any* constant field in O(1).
    pub fn extrema(&self) -> [f64; 4] {
        let fold = |v: &[f64]| {
            v.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    (lo.min(x), hi.max(x))
                })
        };
        let (lo1, hi1) = fold(&self.a1);
        let (lo2, hi2) = fold(&self.a2);
        [lo1, hi1, lo2, hi2]
    }

    /// Largest deviation of either component from its mean: zero exactly
    /// for spatially constant fields.
    pub fn constancy_defect(&self) -> f64 {
        let [lo1, hi1, lo2, hi2] = self.extrema();
        (hi1 - lo1).max(hi2 - lo2)
    }

    /// `self + scale * other`, nodally.
    pub fn add_scaled(&self, other: &Self, scale: f64) -> Self {
        let a1 = self
            .a1
            .iter()
            .zip(&other.a1)
            .map(|(a, b)| a + scale * b)
            .collect();
        let a2 = self
            .a2
            .iter()
            .zip(&other.a2)
            .map(|(a, b)| a + scale * b)
            .collect();
        Self {
            grid: Arc::clone(&self.grid),
            a1,
            a2,
        }
    }

    /// Projection onto cosine modes that are multiples of `j` (the constant
    /// mode included): the nearest `2 pi / j`-periodic pattern in the
    /// retained basis.
    pub fn mode_multiple_projection(&self, j: usize) -> Self {
        assert!(j >= 1);
        let (mut c1, mut c2) = self.coeffs();
        for m in 0..c1.len() {
            if m % j != 0 {
                c1[m] = 0.0;
                c2[m] = 0.0;
            }
        }
        Self::from_coeffs(Arc::clone(&self.grid), &c1, &c2)
            .expect("projection of a finite field is finite")
    }

    /// Number of local maxima of the modulus on the even `2 pi`-periodic
    /// extension (circular count), keeping only features whose amplitude
    /// exceeds `min_contrast`: neighboring max/min pairs closer in value
    /// than the threshold are merged away first, so a shallow ripple
    /// riding on a soliton dip does not split the dip in two.  Maxima
    /// and minima alternate around the ring, so this is also the count
    /// of (filtered) minima — the lobe count of a comb state: a
    /// `j`-soliton profile yields `j`.
    pub fn modulus_maxima_count(&self, min_contrast: f64) -> usize {
        let half = self.modulus();
        let seg = half.len() - 1;
        // Even extension: rho[2 seg - j] = rho[j], circular length 2 seg.
        let mut rho = half.clone();
        for j in (1..seg).rev() {
            rho.push(half[j]);
        }
        let len = rho.len();
        let (lo, hi) = rho
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        if hi - lo < min_contrast {
            return 0;
        }
        // Alternating circular sequence of raw extrema: (value, is_max).
        // Plateaus count once, at their left edge.
        let mut ext: Vec<(f64, bool)> = Vec::new();
        for j in 0..len {
            let prev = rho[(j + len - 1) % len];
            let next = rho[(j + 1) % len];
            if rho[j] > prev && rho[j] >= next {
                ext.push((rho[j], true));
            } else if rho[j] < prev && rho[j] <= next {
                ext.push((rho[j], false));
            }
        }
        // Prune the shallowest adjacent max/min pair until every
        // remaining rise and fall clears the contrast threshold.
        while ext.len() > 2 {
            let m = ext.len();
            let (mut at, mut gap) = (0, f64::INFINITY);
            for i in 0..m {
                let g = (ext[i].0 - ext[(i + 1) % m].0).abs();
                if g < gap {
                    (at, gap) = (i, g);
                }
            }
            if gap >= min_contrast {
                break;
            }
            // Remove the pair; alternation is preserved because its two
            // neighbors have opposite types.
            let second = (at + 1) % m;
            if second > at {
                ext.drain(at..=second);
            } else {
                ext.pop();
                ext.remove(0);
            }
        }
        if ext.len() == 2 && (ext[0].0 - ext[1].0).abs() < min_contrast {
            return 0;
        }
        ext.iter().filter(|(_, is_max)| *is_max).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid() -> Arc<Grid> {
        Grid::new(64).unwrap()
    }

    #[test]
    fn l2_norm_of_a_constant_field() {
        let g = grid();
        let u = FieldState::constant(Arc::clone(&g), 3.0, -4.0);
        // ||(3, -4)||_{L2(0,pi)} = 5 sqrt(pi).
        assert_abs_diff_eq!(u.l2_norm(), 5.0 * PI.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(u.sup_modulus(), 5.0, epsilon = 1e-12);
        assert_eq!(u.constancy_defect(), 0.0);
    }

    #[test]
    fn distances_and_extrema_agree() {
        let g = grid();
        let a1: Vec<f64> = g.nodes().iter().map(|x| x.cos()).collect();
        let a2: Vec<f64> = g.nodes().iter().map(|x| 0.5 * (2.0 * x).cos()).collect();
        let u = FieldState::from_nodal(Arc::clone(&g), a1, a2).unwrap();
        let [lo1, hi1, lo2, hi2] = u.extrema();
        let direct = u.max_abs_diff_const(0.2, -0.1);
        let via_extrema = (lo1 - 0.2)
            .abs()
            .max((hi1 - 0.2).abs())
            .max((lo2 + 0.1).abs())
            .max((hi2 + 0.1).abs());
        assert_abs_diff_eq!(direct, via_extrema, epsilon = 1e-14);
    }

    #[test]
    fn maxima_count_sees_periodic_lobes() {
        let g = grid();
        for k in [1usize, 2, 3, 5] {
            let a1: Vec<f64> = g
                .nodes()
                .iter()
                .map(|x| 1.0 + 0.5 * (k as f64 * x).cos())
                .collect();
            let a2 = vec![0.0; g.n()];
            let u = FieldState::from_nodal(Arc::clone(&g), a1, a2).unwrap();
            assert_eq!(u.modulus_maxima_count(0.1), k, "k = {k}");
        }
        let flat = FieldState::constant(Arc::clone(&g), 1.0, 0.0);
        assert_eq!(flat.modulus_maxima_count(0.1), 0);
    }

    #[test]
    fn mode_projection_keeps_only_multiples() {
        let g = grid();
        let a1: Vec<f64> = g
            .nodes()
            .iter()
            .map(|x| 1.0 + (5.0 * x).cos() + 0.3 * (7.0 * x).cos() + 0.2 * (10.0 * x).cos())
            .collect();
        let a2 = vec![0.0; g.n()];
        let u = FieldState::from_nodal(Arc::clone(&g), a1, a2).unwrap();
        let p = u.mode_multiple_projection(5);
        let (c1, _) = p.coeffs();
        assert_abs_diff_eq!(c1[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c1[5], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c1[7], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c1[10], 0.2, epsilon = 1e-12);
        // The discarded mode-7 content is exactly the projection error.
        let err = u.max_abs_diff(&p);
        assert!(err > 0.2 && err < 0.4, "err = {err}");
    }

    #[test]
    fn complex_roundtrip() {
        let g = grid();
        let u = FieldState::constant(Arc::clone(&g), 0.7, -0.2);
        let z = u.to_complex();
        let back = FieldState::from_complex(Arc::clone(&g), &z).unwrap();
        assert_eq!(u.max_abs_diff(&back), 0.0);
    }
}
