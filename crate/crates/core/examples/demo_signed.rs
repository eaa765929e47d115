//! Random-sign trigonometric sums: for `beta <= d/2` the ratio drifts toward
//! zero as the number of modes grows, so no constant works for signed functions.

use uncertainty_extremal::constants::signed_ratio_demo;

fn main() -> uncertainty_extremal::Result<()> {
    for beta in [0.4, 0.5, 1.0] {
        for modes in [8, 64, 512] {
            let s = signed_ratio_demo(beta, modes, 20, 20240601)?;
            println!(
                "beta {beta:<4} modes {modes:>4}: median ratio {:.4}, weighted sup {:.4}",
                s.median, s.weighted_sup
            );
        }
    }
    Ok(())
}
