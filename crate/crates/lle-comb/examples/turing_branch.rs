//! Trace one Turing-comb branch with pseudo-arclength continuation.
//!
//! At zero detuning with anomalous dispersion, the mode-5 branch leaves
//! the constant curve at its sigma=+1 bifurcation point, arcs through a
//! patterned regime, and reconnects to the same curve at the sigma=-1
//! point — the classic closed Turing loop.
//!
//! Run with: cargo run --example turing_branch

use lle_comb::bifurcation::enumerate;
use lle_comb::continuation::{continue_from_bifurcation, ContinuationConfig, EventKind};
use lle_comb::{Grid, Mode};

fn main() -> lle_comb::Result<()> {
    let (zeta, d) = (0.0, 0.1);
    let cands = enumerate(Mode::Bar, zeta, d, 8, false)?;
    let launch = cands
        .iter()
        .find(|c| c.k == 5 && c.sigma == 1)
        .expect("the mode-5 point exists for this parameter set");
    println!(
        "launching at k=5, sigma=+1: s={:.6}, f={:.6}",
        launch.coord, launch.param
    );

    let grid = Grid::new(256)?;
    let cfg = ContinuationConfig {
        eig_modes: 0, // branch geometry only; skip spectrum tracking
        ..ContinuationConfig::default()
    };
    let branch = continue_from_bifurcation(launch, d, &grid, &cfg)?;

    println!("traced {} points:", branch.points.len());
    let stride = (branch.points.len() / 10).max(1);
    for (i, p) in branch.points.iter().enumerate() {
        if i % stride == 0 || i + 1 == branch.points.len() {
            println!("  step {i:4}: f={:.6}, |a|_2={:.6}", p.param, p.l2norm);
        }
    }
    for e in &branch.events {
        println!("event at step {}: {} ({})", e.index, e.kind, e.detail);
    }

    let returned = branch
        .events
        .iter()
        .any(|e| e.kind == EventKind::TrivialReturn);
    let last = branch.points.last().unwrap();
    if returned {
        println!(
            "branch reconnected to the constant curve at f={:.6} \
             (the mirror bifurcation point of the same mode)",
            last.param
        );
    } else {
        println!("branch did not close: terminal f={:.6}", last.param);
    }
    Ok(())
}
