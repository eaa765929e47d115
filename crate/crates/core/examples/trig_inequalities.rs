//! Rigorous branch-and-bound checks of the trigonometric inequalities behind
//! the sphere certificates.

use uncertainty_extremal::constants::alpha0;
use uncertainty_extremal::positivity::{check_g_beta1, check_g_general, check_tan_bounds};

fn main() -> uncertainty_extremal::Result<()> {
    let tan = check_tan_bounds(1000)?;
    println!(
        "tan bounds on [0, pi/2]: certified {} (upper margin {:.2e} over {} intervals, lower margin {:.2e} over {})",
        tan.certified,
        tan.upper.min_margin,
        tan.upper.intervals_checked,
        tan.lower.min_margin,
        tan.lower.intervals_checked
    );
    for a in [alpha0(), 1.9, 2.0] {
        let g = check_g_beta1(a, 1000)?;
        println!("G, beta = 1, alpha = {a:.6}: certified {} margin {:.2e}", g.certified, g.positivity.min_margin);
    }
    for a in [2.0, 3.0, 5.0] {
        for b in [0.25, 0.5, 0.75, 1.0] {
            let g = check_g_general(a, b, 1000)?;
            println!(
                "G, alpha = {a}, beta = {b:<4}: certified {} margin {:.2e}, G''(1) = {:.4}, cut at {:.4}",
                g.certified, g.positivity.min_margin, g.d2g_at_1, g.x_cut
            );
        }
    }
    Ok(())
}
