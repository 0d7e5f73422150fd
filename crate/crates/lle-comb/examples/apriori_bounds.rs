//! Evaluate the explicit a-priori estimates: the sup-norm bound on any
//! stationary solution, the detuning window outside which only constant
//! solutions exist, and the mode-number caps that limit how many
//! bifurcation points a curve can carry.
//!
//! Run with: cargo run --example apriori_bounds

use lle_comb::bounds;

fn main() {
    for (d, f, zeta) in [
        (0.1, 1.6, Some(2.0)),
        (0.1, 1.6, Some(-40000.0)),
        (-0.1, 2.0, Some(3.3)),
        (-0.2, 4.0, None),
        (0.1, 0.5, None),
    ] {
        let r = bounds::report(d, f, zeta);
        println!("d={d}, f={f}:");
        println!("  sup |a|                 <= {:.4}", r.sup_bound);
        println!("  nonconstant only within sign(d)*zeta in [{:.4}, {:.4}]",
            r.window_lo, r.window_hi);
        if let Some(z) = r.zeta {
            println!(
                "  at zeta={z}: nonconstant solutions {}",
                if r.admits_nonconstant == Some(true) {
                    "possible"
                } else {
                    "ruled out — every solution is constant"
                }
            );
        }
        if let Some(kh) = r.hat_mode_limit {
            println!("  detuning-swept curve branches at modes k <= {kh:.2}");
        } else {
            println!("  detuning-swept curve has no branching points (|f| < 1)");
        }
        if let Some(kb) = r.bar_mode_limit {
            println!("  forcing-swept curve branches at modes k <= {kb:.2}");
        }
        println!();
    }
}
