//! Prints the table of sharp constants and compares each closed form with the
//! functional evaluated at its extremizer.

use uncertainty_extremal::constants::{closed_form_constant, cross_check};
use uncertainty_extremal::radial::Triple;

fn main() -> uncertainty_extremal::Result<()> {
    let triples = [
        (2.0, 1.0, 1),
        (3.0, 1.0, 1),
        (6.0, 1.0, 1),
        (1.0, 2.0, 1),
        (1.0, 2.0, 3),
        (2.0, 1.0, 3),
        (2.0, 0.5, 3),
        (4.0, 0.25, 3),
        (1.0, 3.0, 1),
    ];
    println!("{:<16} {:>16} {:>16} {:>10}  extremizer", "triple", "closed form", "functional", "rel err");
    for (a, b, d) in triples {
        let t = Triple::new(a, b, d)?;
        let c = closed_form_constant(&t);
        match cross_check(&t) {
            Ok(x) => println!(
                "{:<16} {:>16.10e} {:>16.10e} {:>10.2e}  {}",
                t.to_string(),
                x.closed_form,
                x.functional,
                x.rel_err,
                x.extremizer.name()
            ),
            Err(_) => println!("{:<16} {:>16} ({:?})", t.to_string(), "-", c.source),
        }
    }
    Ok(())
}
