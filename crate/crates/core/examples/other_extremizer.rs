//! `f_2 + eps phi` shares the triangle's certificate for small `eps`, so the
//! `(1, 2, 1)` extremizer is not unique.

use uncertainty_extremal::certificates::{build_psi2, verify_other_extremizer, PerturbedTriangle};
use uncertainty_extremal::radial::{Exemplar, RadialMeasure, Triple};

fn main() -> uncertainty_extremal::Result<()> {
    let cert = build_psi2();
    let tri = RadialMeasure::exemplar(Exemplar::Triangle);
    let t = Triple::new(1.0, 2.0, 1)?;
    for eps in [0.0, 0.01, 0.05, 0.1, 0.5] {
        let r = verify_other_extremizer(&cert, &PerturbedTriangle { eps }, &tri, &t)?;
        println!(
            "eps {eps:<5} functional {:.12e} (C* {:.12e}) nonneg {} passed {} {:?}",
            r.functional, r.reference_constant, r.nonneg.certified, r.passed, r.failed
        );
    }
    Ok(())
}
