//! Locate dark-soliton states at the turning points of nonconstant
//! branches for f = 2, d = -0.1, and exhibit how the soliton-carrying
//! branches tie into the k = 3 loop.
//!
//! The branch seeded at the k = 1 bifurcation of the constant curve at
//! zeta = 4.02619 folds back at zeta ~ 3.3069; the state there is a dark
//! 1-soliton (a single dip of |a| on the 2pi extension).  The k = 2
//! branch folds at zeta ~ 3.2579 carrying a dark 2-soliton.  The short
//! k = 3 loop is crossed by another branch at zeta ~ 2.842; switching
//! onto it lands on the k = 1 family, connecting the k = 3 loop to the
//! soliton-carrying branches.

use lle_comb::bifurcation::enumerate;
use lle_comb::continuation::{
    continue_from_bifurcation, switch_at, Branch, ContinuationConfig, EventKind,
};
use lle_comb::{Grid, Mode};

fn turning_points(b: &Branch) -> Vec<(f64, usize)> {
    b.events
        .iter()
        .filter(|e| e.kind == EventKind::TurningPoint)
        .map(|e| {
            let p = &b.points[e.index];
            (p.param, p.state.modulus_maxima_count(0.05))
        })
        .collect()
}

fn show_profile(b: &Branch, zeta: f64) {
    let e = b
        .events
        .iter()
        .filter(|e| e.kind == EventKind::TurningPoint)
        .min_by(|x, y| {
            (b.points[x.index].param - zeta)
                .abs()
                .total_cmp(&(b.points[y.index].param - zeta).abs())
        })
        .expect("branch has a turning point");
    let p = &b.points[e.index];
    let modulus = p.state.modulus();
    print!("  |a| on [0, pi] at zeta {:.5}:", p.param);
    for s in (0..modulus.len()).step_by(modulus.len().div_ceil(9)) {
        print!(" {:.3}", modulus[s]);
    }
    println!();
}

fn main() -> lle_comb::Result<()> {
    let (f, d) = (2.0, -0.1);
    let grid = Grid::new(128)?;
    let cands = enumerate(Mode::Hat, f, d, 8, false)?;
    println!("bifurcation points of the constant curve at f = {f}, d = {d}:");
    for c in &cands {
        println!(
            "  k={} sigma={:+} t={:.5} zeta={:.5}",
            c.k, c.sigma, c.coord, c.param
        );
    }

    let pick = |k: u32, coord: f64| {
        cands
            .iter()
            .filter(|c| c.k == k)
            .min_by(|a, b| (a.coord - coord).abs().total_cmp(&(b.coord - coord).abs()))
            .expect("candidate exists")
    };
    let cfg = ContinuationConfig {
        eig_modes: 0,
        ..ContinuationConfig::default()
    };

    // Dark 1-soliton: fold of the branch from the k=1 point at zeta=4.02619.
    let red = continue_from_bifurcation(pick(1, 0.228064), d, &grid, &cfg)?;
    println!("\nbranch from k=1 (zeta 4.02619): {} points", red.points.len());
    for (z, m) in turning_points(&red) {
        println!("  turning point at zeta {z:.5}, {m} minima of |a|");
    }
    show_profile(&red, 3.30685);

    // Dark 2-soliton: fold of the k=2 branch.
    let blue = continue_from_bifurcation(pick(2, 0.495531), d, &grid, &cfg)?;
    println!("\nbranch from k=2 (zeta 3.58830): {} points", blue.points.len());
    for (z, m) in turning_points(&blue) {
        println!("  turning point at zeta {z:.5}, {m} minima of |a|");
    }
    show_profile(&blue, 3.25783);

    // The k=3 loop and its crossing: trace with spectra so dips get
    // flagged, then switch onto the crossing branch.
    let cfg_eig = ContinuationConfig {
        eig_modes: 8,
        ..ContinuationConfig::default()
    };
    let green = continue_from_bifurcation(pick(3, 0.786467), d, &grid, &cfg_eig)?;
    println!("\nk=3 loop (zeta 2.79924): {} points", green.points.len());
    let mut crossing = None;
    for (ei, e) in green.events.iter().enumerate() {
        match e.kind {
            EventKind::SecondaryBifCandidate => {
                println!(
                    "  branch crossing flagged at zeta {:.5} ({})",
                    green.points[e.index].param, e.detail
                );
                crossing = Some(ei);
            }
            _ => println!("  {} at zeta {:.5}", e.kind, green.points[e.index].param),
        }
    }

    let ei = crossing.expect("the k=3 loop is crossed by another branch");
    let switched = switch_at(&green, ei, None, &cfg)?;
    let ret = switched
        .events
        .iter()
        .find(|e| e.kind == EventKind::TrivialReturn)
        .expect("switched branch reconnects to the constant curve");
    println!(
        "switched branch: {} points, reconnects with {}",
        switched.points.len(),
        ret.detail
    );
    println!("=> the k=3 loop is connected to the k=1 soliton family");
    Ok(())
}
