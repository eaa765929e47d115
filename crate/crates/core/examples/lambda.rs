//! The critical frequency of the unit sphere: `2 pi l = (1 - beta) tan(2 pi l)`.

use std::f64::consts::PI;
use uncertainty_extremal::constants::{lambda_beta, lambda_residual, sphere_constant};

fn main() -> uncertainty_extremal::Result<()> {
    println!("{:>6} {:>20} {:>10} {:>12} {:>14}", "beta", "lambda", "residual", "(2 pi l)^2", "C(2,beta,3)");
    for k in [1, 5, 10, 25, 40, 50, 75, 90, 100] {
        let beta = k as f64 / 100.0;
        let l = lambda_beta(beta)?;
        let s = (2.0 * PI * l).powi(2);
        // 3 beta - 3 beta^2 / 4 < s < 3 beta
        assert!(s < 3.0 * beta && s > 3.0 * beta - 0.75 * beta * beta);
        println!(
            "{beta:>6.2} {l:>20.16} {:>10.1e} {s:>12.8} {:>14.8e}",
            lambda_residual(beta, l),
            sphere_constant(2.0, beta)?
        );
    }
    Ok(())
}
