//! Solves the discretized extremal problem by constraint generation, reads
//! a dual certificate off the optimal basis and checks duality.
//!
//! Pass a triple as `alpha beta dim`; defaults to `2 0.5 3`.

use std::time::Instant;
use uncertainty_extremal::constants::closed_form_constant;
use uncertainty_extremal::lp::{self, LpInstance};
use uncertainty_extremal::radial::Triple;

fn main() -> uncertainty_extremal::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (alpha, beta, dim) = match args[..] {
        [a, b, d] => (a, b, d as u32),
        _ => (2.0, 0.5, 3),
    };
    let t = Triple::new(alpha, beta, dim)?;
    let inst = LpInstance::default_for(t)?;
    let start = Instant::now();
    let sol = lp::solve(&inst)?;
    println!(
        "{t}: status {:?}, {} cut rounds, {} pivots, max violation {:.2e} [{:.2?}]",
        sol.status,
        sol.cut_rounds,
        sol.pivots,
        sol.max_violation,
        start.elapsed()
    );
    match closed_form_constant(&t).value {
        Some(c) => println!(
            "estimate {:.10e}, closed form {c:.10e}, rel err {:.2e}",
            sol.constant_estimate(),
            sol.constant_estimate() / c - 1.0
        ),
        None => println!("estimate {:.10e} (no closed form)", sol.constant_estimate()),
    }

    let cert = lp::extract_certificate(&sol)?;
    let d = lp::duality_report(&sol, &cert)?;
    println!(
        "primal {:.12e} dual {:.12e} gap {:.1e}, slackness {:.1e} / {:.1e}",
        d.primal, d.dual, d.duality_gap, d.slackness_i, d.slackness_ii
    );
    let check = lp::check_certificate(&sol, &cert)?;
    println!("certificate with {} terms: passed {} {:?}", cert.terms.len(), check.passed, check.failed);

    let s = lp::structure_diagnostics(&sol, inst.options.freq_window)?;
    println!(
        "{} clusters, largest holds {:.4} of the mass, support radius {:.4}, decay exponent {:.3} (expected {})",
        s.cluster_count, s.largest_cluster_fraction, s.support_radius, s.decay_exponent, s.expected_exponent
    );
    for c in &s.clusters {
        println!("  [{:.4}, {:.4}] mass {:.6}", c.lo, c.hi, c.mass);
    }
    Ok(())
}
