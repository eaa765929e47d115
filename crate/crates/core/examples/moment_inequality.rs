//! `int f (1 - 4x^2) <= (2 pi / 3) sup |f^(xi) xi|` for even test functions
//! supported in `[-1/2, 1/2]`, with equality for the box.

use uncertainty_extremal::certificates::{fact31_check, random_even_polynomials, TestFunction};

fn main() -> uncertainty_extremal::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut fns = vec![TestFunction::Box, TestFunction::Cosine];
    fns.extend(random_even_polynomials(20, seed));
    let r = fact31_check(&fns)?;
    for e in &r.entries {
        println!("{:<40} lhs {:>12.8} rhs {:>12.8} slack {:>10.2e} {}", e.name, e.lhs, e.rhs, e.slack, e.holds);
    }
    println!("all hold: {}, box gap {:.2e}", r.all_hold, r.box_equality_gap.unwrap_or(f64::NAN));
    Ok(())
}
