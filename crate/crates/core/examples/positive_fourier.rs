//! The `(2, 2, 1)` problem restricted to measures with nonnegative Fourier
//! transform. The recovered profile is compared with a triangle.

use uncertainty_extremal::constants::positive_fourier_constant;
use uncertainty_extremal::lp::{self, LpInstance};
use uncertainty_extremal::radial::Triple;

fn main() -> uncertainty_extremal::Result<()> {
    let inst = LpInstance::default_for(Triple::new(2.0, 2.0, 1)?)?;
    let free = lp::solve(&inst)?;
    let sol = lp::solve_positive_fourier(&inst)?;
    let reference = positive_fourier_constant()?;
    println!("unconstrained estimate {:.6e}", free.constant_estimate());
    println!(
        "constrained estimate   {:.6e}, reference {:.6e}, rel err {:.2e}",
        sol.constant_estimate(),
        reference.computed,
        sol.constant_estimate() / reference.computed - 1.0
    );
    println!("{}", reference.note());
    println!(
        "min of the transform on the scan {:.2e}, {} positivity rows",
        sol.min_fourier.unwrap_or(f64::NAN),
        sol.positive_freqs.len()
    );
    for w in [1.0, 1.5, 3.0] {
        let p = lp::profile_correlation(&sol, w / inst.options.freq_window)?;
        println!(
            "smoothing {:.3}: best triangle half-width {:.4}, correlation {:.5}",
            p.smoothing, p.r0, p.correlation
        );
    }
    Ok(())
}
