//! Time evolution by symmetric operator splitting.
//!
//! The dynamic counterpart of the stationary system, in complex form
//! `a = a1 + i a2`:
//!
//! ```text
//! da/dt = i d a'' - (1 + i zeta(t)) a + i |a|^2 a + f
//! ```
//!
//! is integrated on the full period with even (Neumann-compatible)
//! states.  Each step composes an exact linear half-step in frequency
//! space (dispersion, damping, detuning, and forcing via variation of
//! constants), an exact pointwise nonlinear phase rotation, and a second
//! linear half-step, giving second order in the step size.  The detuning
//! is frozen at the step midpoint, so slow ramps keep the order.

use crate::field::FieldState;
use crate::grid::Grid;
use crate::{Error, Result};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Norm threshold that counts as a blown-up trajectory.
const BLOWUP_NORM: f64 = 1e6;

/// Piecewise-linear detuning schedule, clamped outside its knot range.
#[derive(Debug, Clone)]
pub struct RampSchedule {
    knots: Vec<(f64, f64)>,
}

impl RampSchedule {
    /// Build from `(time, detuning)` knots with strictly increasing
    /// times.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Domain("ramp needs at least one knot".into()));
        }
        for (t, z) in &knots {
            if !t.is_finite() || !z.is_finite() {
                return Err(Error::Domain(format!("non-finite ramp knot ({t}, {z})")));
            }
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Domain(format!(
                    "ramp knot times must increase: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Self { knots })
    }

    /// A schedule holding one constant value.
    pub fn constant(zeta: f64) -> Self {
        Self {
            knots: vec![(0.0, zeta)],
        }
    }

    /// Clamped piecewise-linear evaluation.
    pub fn value_at(&self, t: f64) -> f64 {
        let first = self.knots[0];
        let last = *self.knots.last().unwrap();
        if t <= first.0 {
            return first.1;
        }
        if t >= last.0 {
            return last.1;
        }
        for w in self.knots.windows(2) {
            let ((t0, z0), (t1, z1)) = (w[0], w[1]);
            if t <= t1 {
                return z0 + (z1 - z0) * (t - t0) / (t1 - t0);
            }
        }
        last.1
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }
}

/// One splitting step on the full-period nodal ring.
pub struct Stepper {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    dt: f64,
    /// Detuning-independent dispersion phases `exp(-i d m_eff^2 dt/2)`.
    dispersion_half: Vec<Complex<f64>>,
    /// Drop damping and forcing (unitary dynamics, for reversibility and
    /// conservation checks).
    conservative: bool,
    scratch: std::cell::RefCell<Vec<Complex<f64>>>,
}

impl Stepper {
    /// Plan a stepper for fields extended from the given grid.  Negative
    /// `dt` runs the dynamics backwards (meaningful in conservative
    /// mode).
    pub fn new(grid: &Arc<Grid>, d: f64, dt: f64, conservative: bool) -> Self {
        let len = 2 * (grid.n() - 1);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let dispersion_half = (0..len)
            .map(|m| {
                let m_eff = m.min(len - m) as f64;
                Complex::from_polar(1.0, -d * m_eff * m_eff * dt / 2.0)
            })
            .collect();
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            len,
            fwd,
            inv,
            dt,
            dispersion_half,
            conservative,
            scratch: std::cell::RefCell::new(vec![Complex::default(); scratch_len]),
        }
    }

    /// Ring length (twice the grid's panel count).
    pub fn ring_len(&self) -> usize {
        self.len
    }

    /// Linear half-step in place on frequency data.
    fn linear_half(&self, v: &mut [Complex<f64>], zeta: f64, f: f64) {
        let h = self.dt / 2.0;
        let scalar = if self.conservative {
            Complex::from_polar(1.0, -zeta * h)
        } else {
            Complex::from_polar((-h).exp(), -zeta * h)
        };
        for (vm, disp) in v.iter_mut().zip(&self.dispersion_half) {
            *vm *= scalar * disp;
        }
        if !self.conservative && f != 0.0 {
            // Variation of constants for the constant mode's source term.
            let mu0 = Complex::new(-1.0, -zeta);
            v[0] += self.len as f64 * f * ((mu0 * h).exp() - 1.0) / mu0;
        }
    }

    /// Advance the nodal ring by one step with the detuning frozen at the
    /// given (midpoint) value.
    pub fn step(&self, a: &mut [Complex<f64>], zeta_mid: f64, f: f64) {
        debug_assert_eq!(a.len(), self.len);
        let mut scratch = self.scratch.borrow_mut();
        self.fwd.process_with_scratch(a, &mut scratch);
        self.linear_half(a, zeta_mid, f);
        self.inv.process_with_scratch(a, &mut scratch);
        let inv_len = 1.0 / self.len as f64;
        for v in a.iter_mut() {
            *v *= inv_len;
        }
        let dt = self.dt;
        for v in a.iter_mut() {
            *v *= Complex::from_polar(1.0, v.norm_sqr() * dt);
        }
        // Re-symmetrize: the dynamics preserve evenness exactly, the
        // floating-point butterflies only approximately.
        let n = self.len / 2;
        for j in 1..n {
            let mean = 0.5 * (a[j] + a[self.len - j]);
            a[j] = mean;
            a[self.len - j] = mean;
        }
        self.fwd.process_with_scratch(a, &mut scratch);
        self.linear_half(a, zeta_mid, f);
        self.inv.process_with_scratch(a, &mut scratch);
        for v in a.iter_mut() {
            *v *= inv_len;
        }
    }
}

/// Extend a half-period state to the even nodal ring.
pub fn ring_from_state(u: &FieldState) -> Vec<Complex<f64>> {
    let half = u.to_complex();
    let n = half.len();
    let len = 2 * (n - 1);
    let mut ring = vec![Complex::default(); len];
    ring[..n].copy_from_slice(&half);
    for j in 1..n - 1 {
        ring[len - j] = half[j];
    }
    ring
}

/// Restrict an (even) nodal ring back to a half-period state.
pub fn state_from_ring(grid: &Arc<Grid>, ring: &[Complex<f64>]) -> Result<FieldState> {
    let n = grid.n();
    FieldState::from_complex(grid.clone(), &ring[..n])
}

/// Half-period `L^2` norm straight from ring nodes (exact for resolved
/// trigonometric content).
fn ring_l2(ring: &[Complex<f64>]) -> f64 {
    let sum: f64 = ring.iter().map(|v| v.norm_sqr()).sum();
    (PI / ring.len() as f64 * sum).sqrt()
}

/// Options for [`evolve`].
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    /// Requested step size (adjusted so the horizon is a whole number of
    /// steps).
    pub dt: f64,
    /// Record a scalar sample every this many steps.
    pub sample_every: usize,
    /// Amplitude of uniform even initial noise (0 disables).
    pub noise_amp: f64,
    /// Seed for the noise generator.
    pub seed: u64,
    /// Number of evenly spaced full-state snapshots to keep (0 keeps
    /// none; the final state is always available).
    pub keep_snapshots: usize,
    /// Drop damping and forcing.
    pub conservative: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            sample_every: 100,
            noise_amp: 0.0,
            seed: 0,
            keep_snapshots: 0,
            conservative: false,
        }
    }
}

/// One scalar sample along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub t: f64,
    pub zeta: f64,
    pub l2norm: f64,
}

/// Result of a time integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub snapshots: Vec<(f64, FieldState)>,
    pub final_state: FieldState,
    /// True when the run stopped early on a non-finite or huge norm.
    pub aborted: bool,
}

/// Integrate the dynamics from `u0` to `t_final` under a detuning
/// schedule at fixed forcing and dispersion.
pub fn evolve(
    u0: &FieldState,
    f: f64,
    d: f64,
    ramp: &RampSchedule,
    t_final: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::Domain(format!("bad horizon t_final={t_final}")));
    }
    if !(opts.dt > 0.0) || !opts.dt.is_finite() {
        return Err(Error::Domain(format!("bad step dt={}", opts.dt)));
    }
    let steps = ((t_final / opts.dt).round() as usize).max(1);
    let dt = t_final / steps as f64;
    let grid = u0.grid().clone();
    let stepper = Stepper::new(&grid, d, dt, opts.conservative);
    let mut ring = ring_from_state(u0);

    if opts.noise_amp != 0.0 {
        // Even noise: perturb the half grid, mirror onto the ring.
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let n = grid.n();
        let len = ring.len();
        for j in 0..n {
            let re = rng.random_range(-opts.noise_amp..=opts.noise_amp);
            let im = rng.random_range(-opts.noise_amp..=opts.noise_amp);
            let bump = Complex::new(re, im);
            ring[j] += bump;
            if j > 0 && j < n - 1 {
                ring[len - j] += bump;
            }
        }
    }

    let sample_every = opts.sample_every.max(1);
    let mut samples = vec![Sample {
        t: 0.0,
        zeta: ramp.value_at(0.0),
        l2norm: ring_l2(&ring),
    }];
    let mut snapshots = Vec::new();
    let snap_stride = if opts.keep_snapshots > 0 {
        (steps / opts.keep_snapshots).max(1)
    } else {
        usize::MAX
    };

    let mut aborted = false;
    for k in 0..steps {
        let t_mid = (k as f64 + 0.5) * dt;
        stepper.step(&mut ring, ramp.value_at(t_mid), f);
        let t_now = (k + 1) as f64 * dt;
        let due_sample = (k + 1) % sample_every == 0 || k + 1 == steps;
        if due_sample {
            let norm = ring_l2(&ring);
            samples.push(Sample {
                t: t_now,
                zeta: ramp.value_at(t_now),
                l2norm: norm,
            });
            if !norm.is_finite() || norm > BLOWUP_NORM {
                aborted = true;
                break;
            }
        }
        if (k + 1) % snap_stride == 0 && k + 1 < steps {
            snapshots.push((t_now, state_from_ring(&grid, &ring)?));
        }
    }

    // A non-finite ring cannot be converted; clamp for reporting.
    if ring.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        aborted = true;
        for v in ring.iter_mut() {
            if !v.re.is_finite() {
                v.re = 0.0;
            }
            if !v.im.is_finite() {
                v.im = 0.0;
            }
        }
    }
    let final_state = state_from_ring(&grid, &ring)?;
    Ok(Trajectory {
        samples,
        snapshots,
        final_state,
        aborted,
    })
}

/// Comb line magnitudes in the full-period exponential basis, as
/// `log10 |a_hat_k|` for `k = 0 ..= max mode` (cosine coefficient `c_k`
/// maps to a line pair of height `c_k / 2`; the floor is `1e-300`).
pub fn spectrum(u: &FieldState) -> Vec<f64> {
    let (c1, c2) = u.coeffs();
    c1.iter()
        .zip(&c2)
        .enumerate()
        .map(|(k, (x, y))| {
            let mag = Complex::new(*x, *y).norm();
            let line = if k == 0 { mag } else { 0.5 * mag };
            line.max(1e-300).log10()
        })
        .collect()
}
