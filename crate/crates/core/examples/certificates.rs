//! Builds the closed-form dual certificates and verifies each against its
//! extremizer.

use std::time::Instant;
use uncertainty_extremal::certificates::{
    build_psi1, build_psi2, build_psi3, build_psi5, build_sphere_certificate, verify_certificate, Certificate,
    VerifyOptions,
};
use uncertainty_extremal::radial::{Exemplar, RadialMeasure, Triple};

fn main() -> uncertainty_extremal::Result<()> {
    let cases: Vec<(Certificate, Exemplar, Triple, VerifyOptions)> = vec![
        (build_psi1(2.0, 200)?, Exemplar::Box, Triple::new(2.0, 1.0, 1)?, VerifyOptions::default()),
        (build_psi1(3.0, 200)?, Exemplar::Box, Triple::new(3.0, 1.0, 1)?, VerifyOptions::default()),
        (build_psi1(4.0, 200)?, Exemplar::Box, Triple::new(4.0, 1.0, 1)?, VerifyOptions::default()),
        (build_psi2(), Exemplar::Triangle, Triple::new(1.0, 2.0, 1)?, VerifyOptions::default()),
        (build_psi3(), Exemplar::InverseRadius3D, Triple::new(1.0, 2.0, 3)?, VerifyOptions::default()),
        (
            build_sphere_certificate(2.0, 1.0)?,
            Exemplar::UnitSphere3D,
            Triple::new(2.0, 1.0, 3)?,
            VerifyOptions::default(),
        ),
        (
            build_sphere_certificate(2.0, 0.5)?,
            Exemplar::UnitSphere3D,
            Triple::new(2.0, 0.5, 3)?,
            VerifyOptions::default(),
        ),
        (build_psi5(), Exemplar::Triangle, Triple::new(2.0, 2.0, 1)?, VerifyOptions::positive_fourier()),
    ];
    for (cert, ex, triple, opts) in cases {
        let start = Instant::now();
        let r = verify_certificate(&cert, &RadialMeasure::exemplar(ex), &triple, &opts)?;
        println!(
            "{:?} on {} at {}: {} | H>=0 margin {:.3e} ({} intervals), support margin {:.3e}, sign margin {:.3e}, lambda margin {:.3e}, functional {:.12e} [{:.2?}]",
            cert.family,
            ex.name(),
            triple,
            if r.passed { "pass" } else { "FAIL" },
            r.h_nonneg.min_margin,
            r.h_nonneg.intervals_checked,
            r.support_margin,
            r.sign_condition_margin,
            r.lambda_margin,
            r.functional,
            start.elapsed()
        );
        if !r.passed {
            println!(
                "  failed: {:?}; failures {:?}",
                r.failed,
                &r.h_nonneg.failures[..r.h_nonneg.failures.len().min(5)]
            );
            println!("  zero checks {:?}", r.h_nonneg.zero_checks);
        }
    }
    Ok(())
}
