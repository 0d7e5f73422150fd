//! Cosine-spectral collocation on `[0, pi]`.
//!
//! Fields are sampled at the `n` nodes `x_j = j pi / (n-1)`, `j = 0..n-1`,
//! and represented by cosine coefficients `c_0..c_N`, `N = n - 1`:
//!
//! ```text
//!   u(x) = sum_{m=0}^{N} c_m cos(m x).
//! ```
//!
//! Even `2 pi`-periodic extension makes every such field a trigonometric
//! polynomial on the circle, so transforms reduce to complex FFTs of length
//! `2N` (the classic DCT-I construction), and Neumann conditions
//! `u'(0) = u'(pi) = 0` hold automatically.
//!
//! **Alias-free nonlinear terms.**  Products are evaluated on an enlarged
//! grid carrying `P = 2N + 2` modes (padded FFT length `4n`, again a power
//! of two whenever `n` is):
//!
//! * quadratic products have content `<= 2N < P` and are therefore computed
//!   *exactly*;
//! * cubic products have content `<= 3N`; the lowest alias image of any
//!   such frequency is `2P - 3N = N + 4 > N`, so the retained coefficients
//!   `0..N` are exact after truncation.
//!
//! This exactness is what makes the assembled Jacobian the true derivative
//! of the discrete residual (verified by finite differences in the test
//! suite) rather than an approximation with an aliasing error floor.

use crate::{Error, Result};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Minimum number of collocation nodes.
pub const MIN_NODES: usize = 16;

/// Spectral collocation grid with cached FFT plans (thread-safe, shareable).
pub struct Grid {
    n: usize,
    nodes: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    pad_fwd: Arc<dyn Fft<f64>>,
    pad_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("Grid").field("n", &self.n).finish()
    }
}

impl Grid {
    /// Create a grid with `n >= 16` nodes on `[0, pi]`.  Any `n` works;
    /// powers of two give the fastest transforms.
    pub fn new(n: usize) -> Result<Arc<Self>> {
        if n < MIN_NODES {
            return Err(Error::Domain(format!(
                "grid needs at least {MIN_NODES} nodes, got {n}"
            )));
        }
        let seg = n - 1;
        let mut planner = FftPlanner::new();
        let grid = Grid {
            n,
            nodes: (0..n).map(|j| PI * j as f64 / seg as f64).collect(),
            fwd: planner.plan_fft_forward(2 * seg),
            inv: planner.plan_fft_inverse(2 * seg),
            pad_fwd: planner.plan_fft_forward(4 * n),
            pad_inv: planner.plan_fft_inverse(4 * n),
        };
        Ok(Arc::new(grid))
    }

    /// Number of collocation nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Highest retained cosine mode, `N = n - 1`.
    pub fn max_mode(&self) -> usize {
        self.n - 1
    }

    /// Collocation nodes `x_j = j pi / (n-1)`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cosine analysis of a real nodal field (length `n` in, `n` out).
    pub fn analyze(&self, nodal: &[f64]) -> Vec<f64> {
        assert_eq!(nodal.len(), self.n, "nodal length mismatch");
        analyze_dct1(nodal, self.fwd.as_ref())
    }

    /// Cosine synthesis back to nodal values (length `n` in, `n` out).
    pub fn synthesize(&self, coef: &[f64]) -> Vec<f64> {
        assert_eq!(coef.len(), self.n, "coefficient length mismatch");
        synthesize_dct1(coef, self.inv.as_ref())
    }

    /// Cosine analysis of a complex nodal field (for spectra of `a1 + i a2`).
    pub fn analyze_complex(&self, nodal: &[Complex<f64>]) -> Vec<Complex<f64>> {
        assert_eq!(nodal.len(), self.n, "nodal length mismatch");
        let seg = self.n - 1;
        let len = 2 * seg;
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        buf[..self.n].copy_from_slice(nodal);
        for j in 1..seg {
            buf[len - j] = nodal[j];
        }
        self.fwd.process(&mut buf);
        let mut c = vec![Complex::new(0.0, 0.0); self.n];
        c[0] = buf[0] / len as f64;
        c[seg] = buf[seg] / len as f64;
        for m in 1..seg {
            c[m] = buf[m] / seg as f64;
        }
        c
    }

    /// Coefficients of the second derivative: `c_m -> -m^2 c_m`.
    pub fn second_derivative(&self, coef: &[f64]) -> Vec<f64> {
        assert_eq!(coef.len(), self.n);
        coef.iter()
            .enumerate()
            .map(|(m, c)| -((m * m) as f64) * c)
            .collect()
    }

    /// Exact cosine coefficients (modes `0..=2N`) of the pointwise product
    /// of two fields given by their coefficients.  Quadratic content fits
    /// the padded grid, so no aliasing occurs at all.
    pub fn product_coeffs_extended(&self, ca: &[f64], cb: &[f64]) -> Vec<f64> {
        assert_eq!(ca.len(), self.n);
        assert_eq!(cb.len(), self.n);
        let p = 2 * self.n; // padded mode count P = 2N + 2
        let mut pa = vec![0.0; p + 1];
        let mut pb = vec![0.0; p + 1];
        pa[..self.n].copy_from_slice(ca);
        pb[..self.n].copy_from_slice(cb);
        let na = synthesize_dct1(&pa, self.pad_inv.as_ref());
        let nb = synthesize_dct1(&pb, self.pad_inv.as_ref());
        let prod: Vec<f64> = na.iter().zip(&nb).map(|(x, y)| x * y).collect();
        let mut c = analyze_dct1(&prod, self.pad_fwd.as_ref());
        c.truncate(2 * self.max_mode() + 1);
        c
    }

    /// Alias-free coefficients (modes `0..=N`) of the cubic terms
    /// `(a1^2 + a2^2) a1` and `(a1^2 + a2^2) a2`.
    pub fn dealiased_cubic(&self, c1: &[f64], c2: &[f64]) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(c1.len(), self.n);
        assert_eq!(c2.len(), self.n);
        let p = 2 * self.n;
        let mut p1 = vec![0.0; p + 1];
        let mut p2 = vec![0.0; p + 1];
        p1[..self.n].copy_from_slice(c1);
        p2[..self.n].copy_from_slice(c2);
        let n1 = synthesize_dct1(&p1, self.pad_inv.as_ref());
        let n2 = synthesize_dct1(&p2, self.pad_inv.as_ref());
        let q1: Vec<f64> = n1
            .iter()
            .zip(&n2)
            .map(|(x, y)| (x * x + y * y) * x)
            .collect();
        let q2: Vec<f64> = n1
            .iter()
            .zip(&n2)
            .map(|(x, y)| (x * x + y * y) * y)
            .collect();
        let mut d1 = analyze_dct1(&q1, self.pad_fwd.as_ref());
        let mut d2 = analyze_dct1(&q2, self.pad_fwd.as_ref());
        d1.truncate(self.n);
        d2.truncate(self.n);
        (d1, d2)
    }

    /// `integral_0^pi u dx = pi c_0`.
    pub fn integral(&self, coef: &[f64]) -> f64 {
        PI * coef[0]
    }

    /// `||u||_{L^2(0,pi)}^2` from cosine coefficients of any length.
    pub fn l2_sq(&self, coef: &[f64]) -> f64 {
        let mut s = PI * coef[0] * coef[0];
        for c in &coef[1..] {
            s += 0.5 * PI * c * c;
        }
        s
    }

    /// `L^2(0, pi)` inner product from cosine coefficients.
    pub fn l2_inner(&self, ca: &[f64], cb: &[f64]) -> f64 {
        assert_eq!(ca.len(), cb.len());
        let mut s = PI * ca[0] * cb[0];
        for (a, b) in ca[1..].iter().zip(&cb[1..]) {
            s += 0.5 * PI * a * b;
        }
        s
    }

    /// `||u'||_{L^2(0,pi)}^2` from cosine coefficients.
    pub fn deriv_l2_sq(&self, coef: &[f64]) -> f64 {
        coef.iter()
            .enumerate()
            .skip(1)
            .map(|(m, c)| 0.5 * PI * (m * m) as f64 * c * c)
            .sum()
    }

    /// Diagonal weights of the `L^2(0,pi)` inner product in coefficient
    /// space: `pi` for mode 0, `pi/2` for every other mode.
    pub fn coef_weights(&self) -> Vec<f64> {
        let mut w = vec![0.5 * PI; self.n];
        w[0] = PI;
        w
    }
}

/// DCT-I analysis via even extension and a complex FFT of length `2 seg`,
/// where `seg = len - 1`.  Normalization: `c_0 = V_0 / 2seg`,
/// `c_seg = V_seg / 2seg`, `c_m = V_m / seg` otherwise.
fn analyze_dct1(nodal: &[f64], plan: &dyn Fft<f64>) -> Vec<f64> {
    let n = nodal.len();
    let seg = n - 1;
    let len = 2 * seg;
    debug_assert_eq!(plan.len(), len);
    let mut buf = vec![Complex::new(0.0, 0.0); len];
    for (j, &v) in nodal.iter().enumerate() {
        buf[j] = Complex::new(v, 0.0);
    }
    for j in 1..seg {
        buf[len - j] = Complex::new(nodal[j], 0.0);
    }
    plan.process(&mut buf);
    let mut c = vec![0.0; n];
    c[0] = buf[0].re / len as f64;
    c[seg] = buf[seg].re / len as f64;
    for m in 1..seg {
        c[m] = buf[m].re / seg as f64;
    }
    c
}

/// DCT-I synthesis: place `c_0`, `c_seg` and split `c_m / 2` onto
/// conjugate-symmetric bins, then run an unnormalized inverse FFT.
fn synthesize_dct1(coef: &[f64], plan: &dyn Fft<f64>) -> Vec<f64> {
    let n = coef.len();
    let seg = n - 1;
    let len = 2 * seg;
    debug_assert_eq!(plan.len(), len);
    let mut buf = vec![Complex::new(0.0, 0.0); len];
    buf[0] = Complex::new(coef[0], 0.0);
    buf[seg] = Complex::new(coef[seg], 0.0);
    for m in 1..seg {
        let half = Complex::new(0.5 * coef[m], 0.0);
        buf[m] = half;
        buf[len - m] = half;
    }
    plan.process(&mut buf);
    buf[..n].iter().map(|z| z.re).collect()
}
