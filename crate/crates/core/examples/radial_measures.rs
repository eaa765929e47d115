//! Radial measures: exemplar transforms against their discretizations, the
//! weighted sup-norm with its attained set, and dilation invariance.

use uncertainty_extremal::radial::{Atom, Exemplar, RadialMeasure, Triple};

fn main() -> uncertainty_extremal::Result<()> {
    for ex in Exemplar::ALL {
        let exact = RadialMeasure::exemplar(ex);
        let coarse = ex.discretize(400);
        let t = 3.7;
        println!(
            "{:<16} d={} TV {:.6} mu^({t}) exact {:+.10} discretized {:+.10}",
            ex.name(),
            ex.dim(),
            exact.total_variation(),
            exact.fourier_at(t)?,
            coarse.fourier_at(t)?
        );
    }

    let tri = RadialMeasure::exemplar(Exemplar::Triangle);
    let s = tri.sup_norm_auto(2.0)?;
    let head: Vec<String> = s.attained_set.iter().take(5).map(|t| format!("{t:.6}")).collect();
    println!(
        "triangle, beta = 2: sup {:.12} at {:.6}, attained near [{}], tail certified {}",
        s.value,
        s.argmax_radius,
        head.join(", "),
        s.tail_certified
    );

    // two shells in R^3; the functional ignores dilations
    let m = RadialMeasure::atomic(3, vec![Atom { radius: 0.4, mass: 0.3 }, Atom { radius: 1.0, mass: 0.7 }])?;
    let t = Triple::new(2.0, 0.5, 3)?;
    for scale in [0.5, 1.0, 4.0] {
        println!("two shells dilated by {scale}: C = {:.12e}", m.dilate(scale)?.functional(&t)?);
    }
    println!("{}", m.to_json()?);
    Ok(())
}
