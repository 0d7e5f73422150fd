//! Locate every bifurcation point on the two families of constant
//! solutions, in closed form, for a pair of representative parameter
//! sets — one with anomalous dispersion (d > 0) and one with normal
//! dispersion (d < 0).
//!
//! Run with: cargo run --example bifurcation_points

use lle_comb::bifurcation::enumerate;
use lle_comb::Mode;

fn show(title: &str, mode: Mode, fixed: f64, d: f64) -> lle_comb::Result<()> {
    println!("{title}");
    println!("  (mode {mode}, {}={fixed}, d={d})", mode.fixed_name());
    let cands = enumerate(mode, fixed, d, 16, false)?;
    if cands.is_empty() {
        println!("  no bifurcation points — the constant state is the only comb\n");
        return Ok(());
    }
    println!(
        "  {:>2} {:>6} {:>12} {:>12}  S  T  marginal",
        "k",
        "sigma",
        mode.coord_name(),
        mode.active_name()
    );
    for c in &cands {
        println!(
            "  {:>2} {:>6} {:>12.6} {:>12.6}  {}  {}  {}",
            c.k,
            c.sigma,
            c.coord,
            c.param,
            if c.s_ok { "y" } else { "n" },
            if c.t_ok { "y" } else { "n" },
            if c.marginal { "y" } else { "n" }
        );
    }
    println!();
    Ok(())
}

fn main() -> lle_comb::Result<()> {
    // Forcing-swept curve at zero detuning: Turing combs branch off as
    // the pump power grows past each mode's threshold.
    show(
        "Forcing-swept curve, anomalous dispersion",
        Mode::Bar,
        0.0,
        0.1,
    )?;

    // Detuning-swept curve at fixed pump: sweeping the detuning across
    // the resonance uncovers the whole ladder of branching points.
    show(
        "Detuning-swept curve, anomalous dispersion",
        Mode::Hat,
        1.6,
        0.1,
    )?;

    // Normal dispersion flips which side of the resonance branches.
    show(
        "Detuning-swept curve, normal dispersion",
        Mode::Hat,
        2.0,
        -0.1,
    )?;

    // Below unit forcing the detuning-swept curve has no branching
    // points at all: no stationary comb can bifurcate.
    show(
        "Sub-threshold pump",
        Mode::Hat,
        0.5,
        0.1,
    )?;
    Ok(())
}
