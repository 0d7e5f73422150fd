//! Shared fixtures for the integration suite: pinned branching-point
//! tables at the four standard parameter sets, and an independent
//! brute-force root counter for the locating conditions.
#![allow(dead_code)]

use lle_comb::bifurcation::BifurcationCandidate;
use std::collections::BTreeMap;

/// Rows `(k, sigma, coord, param)` of pinned branching points, quoted to
/// five decimals.  `coord` is the curve coordinate (`s` on forcing-swept
/// curves, `t` on detuning-swept ones); `param` is the active parameter
/// at the branching point (`f`, respectively `zeta`).
pub type TableRow = (u32, i32, f64, f64);

/// Forcing-swept curve at `zeta = 0`, `d = 0.1`: the four lowest mode
/// pairs (modes below 5 never reach the branching threshold here).
pub const BAR_TABLE_ZETA0: &[TableRow] = &[
    (5, 1, 1.03235, 1.50871),
    (5, -1, 1.50582, 3.73195),
    (6, 1, 1.16104, 1.94874),
    (6, -1, 1.85795, 6.67731),
    (7, 1, 1.31863, 2.64494),
    (7, -1, 2.18965, 10.72430),
    (8, 1, 1.48760, 3.61248),
    (8, -1, 2.51404, 16.08736),
];

/// Forcing-swept curve at `zeta = 10`, `d = -0.2`: the complete set —
/// normal dispersion keeps the mode range finite (here `k <= 6`).
pub const BAR_TABLE_ZETA10: &[TableRow] = &[
    (1, 1, 1.82156, 12.30707),
    (1, -1, 3.12227, 3.21945),
    (2, 1, 1.76678, 12.28053),
    (2, -1, 3.02410, 3.97844),
    (3, 1, 1.67183, 12.16097),
    (3, -1, 2.85277, 6.02862),
    (4, 1, 1.53017, 11.81841),
    (4, -1, 2.59331, 8.87959),
    (5, 1, 1.33036, 11.02958),
    (5, -1, 2.21287, 11.50749),
    (6, 1, 1.06458, 9.49913),
    (6, -1, 1.61245, 12.04060),
];

/// Detuning-swept curve at `f = 1.6`, `d = 0.1`: the complete set of 14
/// branching points (modes up to 7; the higher modes pair two
/// `sigma = -1` roots).
pub const HAT_TABLE_F16: &[TableRow] = &[
    (1, 1, 0.10528, 2.63750),
    (1, -1, 0.77130, 2.24888),
    (2, 1, -0.18543, 2.28327),
    (2, -1, 0.75556, 2.25196),
    (3, 1, -0.52046, 1.25702),
    (3, -1, 0.72127, 2.26952),
    (4, 1, -0.72866, 0.13682),
    (4, -1, 0.66089, 2.32248),
    (5, -1, -0.77281, -0.18666),
    (5, -1, 0.56321, 2.42954),
    (6, -1, -0.61695, 0.80166),
    (6, -1, 0.40312, 2.58449),
    (7, -1, -0.20600, 2.24085),
    (7, -1, 0.01535, 2.57475),
];

/// Detuning-swept curve at `f = 2`, `d = -0.1`: the complete set of 6
/// branching points (modes 1-3 only).
pub const HAT_TABLE_F2: &[TableRow] = &[
    (1, -1, 0.85260, 2.72386),
    (1, 1, 0.22806, 4.02619),
    (2, -1, 0.86118, 2.72771),
    (2, 1, 0.49553, 3.58830),
    (3, 1, 0.86262, 2.72883),
    (3, 1, 0.78647, 2.79924),
];

/// The candidate matching `(k, sigma)` whose coordinate is nearest
/// `coord`.  Panics (with context) when no candidate carries the pair.
pub fn lookup<'a>(
    cands: &'a [BifurcationCandidate],
    k: u32,
    sigma: i32,
    coord: f64,
) -> &'a BifurcationCandidate {
    cands
        .iter()
        .filter(|c| c.k == k && c.sigma == sigma)
        .min_by(|a, b| {
            (a.coord - coord)
                .abs()
                .total_cmp(&(b.coord - coord).abs())
        })
        .unwrap_or_else(|| panic!("no candidate with k={k} sigma={sigma}"))
}

/// Candidates bucketed by `(k, sigma)`.
pub fn candidate_counts(cands: &[BifurcationCandidate]) -> BTreeMap<(u32, i32), usize> {
    let mut out = BTreeMap::new();
    for c in cands {
        *out.entry((c.k, c.sigma)).or_insert(0) += 1;
    }
    out
}

/// Strict sign changes of `g` over a uniform grid of `points` samples on
/// `[lo, hi]`.  Exact zeros are skipped (a sample sitting on a root
/// belongs to both neighbors); non-finite samples are rejected loudly.
pub fn grid_sign_changes(lo: f64, hi: f64, points: usize, g: impl Fn(f64) -> f64) -> usize {
    assert!(points >= 2 && hi > lo);
    let step = (hi - lo) / (points - 1) as f64;
    let mut count = 0;
    let mut last_sign = 0.0_f64;
    for i in 0..points {
        let v = g(lo + step * i as f64);
        assert!(v.is_finite(), "locator not finite at sample {i}");
        let s = if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            continue;
        };
        if last_sign != 0.0 && s != last_sign {
            count += 1;
        }
        last_sign = s;
    }
    count
}

/// Locating condition on the detuning-swept curve for mode `k`, branch
/// `sigma`, as a function of the curve coordinate `t`:
/// `f^2(1-t^2) - t/sqrt(1-t^2) - sigma sqrt(f^4(1-t^2)^2 - 1) - d k^2`,
/// with the radicand clipped at zero on the domain boundary.
pub fn hat_locating_condition(f: f64, d: f64, k: u32, sigma: i32, t: f64) -> f64 {
    let rho = f * f * (1.0 - t * t);
    let rad = (rho * rho - 1.0).max(0.0);
    rho - t / (1.0 - t * t).sqrt() - sigma as f64 * rad.sqrt() - d * (k as f64).powi(2)
}

/// Locating condition on the forcing-swept curve for mode `k`, branch
/// `sigma`, as a function of the modulus `s`:
/// `2 s^2 - zeta + sigma sqrt(s^4 - 1) - d k^2` (radicand clipped at the
/// `s = 1` boundary).
pub fn bar_locating_condition(zeta: f64, d: f64, k: u32, sigma: i32, s: f64) -> f64 {
    let rho = s * s;
    let rad = (rho * rho - 1.0).max(0.0);
    2.0 * rho - zeta + sigma as f64 * rad.sqrt() - d * (k as f64).powi(2)
}

/// Brute-force root counts per `(k, sigma)` for the detuning-swept
/// locating condition, from a sign-change scan of `points` samples over
/// the full admissible coordinate interval.
pub fn brute_force_hat_counts(
    f: f64,
    d: f64,
    k_top: u32,
    points: usize,
) -> BTreeMap<(u32, i32), usize> {
    assert!(f.abs() >= 1.0);
    let t_max = (1.0 - 1.0 / (f * f)).sqrt();
    let mut out = BTreeMap::new();
    for k in 1..=k_top {
        for sigma in [1, -1] {
            let n = grid_sign_changes(-t_max, t_max, points, |t| {
                hat_locating_condition(f, d, k, sigma, t)
            });
            if n > 0 {
                out.insert((k, sigma), n);
            }
        }
    }
    out
}

/// Brute-force root counts per `(k, sigma)` for the forcing-swept
/// locating condition over `s` in `[1, s_hi]`, where `s_hi` is chosen
/// past every admissible root (`s^2` never exceeds `zeta + d k^2`).
pub fn brute_force_bar_counts(
    zeta: f64,
    d: f64,
    k_top: u32,
    points: usize,
) -> BTreeMap<(u32, i32), usize> {
    let mut mu_max = 3.0_f64.sqrt();
    for k in 1..=k_top {
        mu_max = mu_max.max(zeta + d * (k as f64).powi(2));
    }
    let s_hi = mu_max.sqrt() + 0.5;
    let mut out = BTreeMap::new();
    for k in 1..=k_top {
        for sigma in [1, -1] {
            let n = grid_sign_changes(1.0, s_hi, points, |s| {
                bar_locating_condition(zeta, d, k, sigma, s)
            });
            if n > 0 {
                out.insert((k, sigma), n);
            }
        }
    }
    out
}
