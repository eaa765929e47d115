//! One test per acceptance criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line to the uncaptured stderr before asserting,
//! so the verdicts show up in a plain `cargo test` log.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use uncertainty_extremal::certificates::{
    build_psi1, build_psi2, build_psi3, build_psi5, build_sphere_certificate, fact31_check, random_even_polynomials,
    verify_certificate, verify_other_extremizer, Certificate, PerturbedTriangle, TestFunction, VerifyOptions,
};
use uncertainty_extremal::constants::{
    alpha0, closed_form_constant, lambda_beta, lambda_residual, positive_fourier_constant, signed_ratio_demo,
};
use uncertainty_extremal::lp::{self, LpInstance};
use uncertainty_extremal::positivity::{check_g_beta1, check_g_general, check_tan_bounds};
use uncertainty_extremal::radial::{Exemplar, RadialMeasure, Triple};

const LP_REL_TOL: f64 = 0.02;
const LP_DUALITY_TOL: f64 = 1e-6;
const DEMO_SEED: u64 = 20240601;

fn report(n: u32, pass: bool, detail: String) {
    let line = format!("criterion {n}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {n} failed: {detail}");
}

fn triple(a: f64, b: f64, d: u32) -> Triple {
    Triple::new(a, b, d).unwrap()
}

#[test]
fn criterion_01_constant_table() {
    let start = Instant::now();
    let mut cases: Vec<(Triple, Exemplar, f64)> = Vec::new();
    for a in [2.0, 3.0, 4.0, 5.0, 6.0] {
        cases.push((triple(a, 1.0, 1), Exemplar::Box, 1.0 / ((2.0 * PI).powf(a) * (a + 1.0))));
    }
    cases.push((triple(1.0, 2.0, 1), Exemplar::Triangle, 1.0 / (9.0 * PI * PI)));
    cases.push((triple(1.0, 2.0, 3), Exemplar::InverseRadius3D, 4.0 / (9.0 * PI * PI)));
    for a in [2.0, 3.0] {
        cases.push((triple(a, 1.0, 3), Exemplar::UnitSphere3D, (1.0 / (2.0 * PI)).powf(a)));
    }
    let l = lambda_beta(0.5).unwrap();
    let sphere = ((2.0 * PI * l).sin() / (2.0 * PI * l.powf(0.5))).powi(2);
    cases.push((triple(2.0, 0.5, 3), Exemplar::UnitSphere3D, sphere));

    let mut worst: f64 = 0.0;
    let mut table_ok = true;
    for (t, ex, expected) in &cases {
        let f = RadialMeasure::exemplar(*ex).functional(t).unwrap();
        worst = worst.max((f - expected).abs() / expected);
        let c = closed_form_constant(t).value.unwrap();
        table_ok &= (c - expected).abs() <= 1e-14 * expected;
    }
    let elapsed = start.elapsed();
    report(
        1,
        worst < 1e-8 && table_ok && elapsed < Duration::from_secs(10),
        format!(
            "{} cases, worst rel err {worst:.2e} (< 1e-8), table agrees {table_ok}, {elapsed:.2?} (< 10 s)",
            cases.len()
        ),
    );
}

#[test]
fn criterion_02_lambda_solver() {
    let start = Instant::now();
    let exact = lambda_beta(1.0).unwrap() == 0.25;
    let mut worst_res: f64 = 0.0;
    let mut bounds = true;
    for k in 1..=100 {
        let beta = k as f64 / 100.0;
        let l = lambda_beta(beta).unwrap();
        worst_res = worst_res.max(lambda_residual(beta, l).abs());
        let s = (2.0 * PI * l).powi(2);
        bounds &= 3.0 * beta > s && s > 3.0 * beta - 0.75 * beta * beta;
    }
    let elapsed = start.elapsed();
    report(
        2,
        exact && worst_res < 1e-12 && bounds && elapsed < Duration::from_secs(1),
        format!(
            "lambda_1 = 0.25 {exact}, max residual {worst_res:.2e} (< 1e-12), bounds {bounds}, {elapsed:.2?} (< 1 s)"
        ),
    );
}

#[test]
fn criterion_03_certificate_suite() {
    let start = Instant::now();
    let std = VerifyOptions::default;
    let mut cases: Vec<(String, Certificate, Exemplar, Triple, VerifyOptions)> = Vec::new();
    for a in [2.0, 3.0, 4.0] {
        cases.push((format!("psi1 a={a}"), build_psi1(a, 200).unwrap(), Exemplar::Box, triple(a, 1.0, 1), std()));
    }
    cases.push(("psi2".into(), build_psi2(), Exemplar::Triangle, triple(1.0, 2.0, 1), std()));
    cases.push(("psi3".into(), build_psi3(), Exemplar::InverseRadius3D, triple(1.0, 2.0, 3), std()));
    for b in [1.0, 0.5] {
        let c = build_sphere_certificate(2.0, b).unwrap();
        cases.push((format!("sphere (2,{b})"), c, Exemplar::UnitSphere3D, triple(2.0, b, 3), std()));
    }
    cases.push((
        "psi5".into(),
        build_psi5(),
        Exemplar::Triangle,
        triple(2.0, 2.0, 1),
        VerifyOptions::positive_fourier(),
    ));

    let mut pass = true;
    let mut min_margin = f64::INFINITY;
    let mut failed = Vec::new();
    for (name, cert, ex, t, opts) in &cases {
        let r = verify_certificate(cert, &RadialMeasure::exemplar(*ex), t, opts).unwrap();
        let margins = [r.h_nonneg.min_margin, r.support_margin, r.sign_condition_margin, r.lambda_margin];
        let ok = r.passed && margins.iter().all(|&m| m > 0.0);
        min_margin = margins.iter().cloned().fold(min_margin, f64::min);
        if !ok {
            failed.push(format!("{name}: {:?} margins {margins:?}", r.failed));
        }
        pass &= ok;
    }
    let elapsed = start.elapsed();
    report(
        3,
        pass && elapsed < Duration::from_secs(60),
        format!(
            "{} certificates, smallest margin {min_margin:.2e} (> 0), failures {failed:?}, {elapsed:.2?} (< 60 s)",
            cases.len()
        ),
    );
}

struct LpRun {
    triple: Triple,
    sol: lp::LpSolution,
    elapsed: Duration,
}

fn run_lp(t: Triple) -> LpRun {
    let start = Instant::now();
    let sol = lp::solve(&LpInstance::default_for(t).unwrap()).unwrap();
    LpRun { triple: t, sol, elapsed: start.elapsed() }
}

#[test]
fn criterion_04_lp_reproduction() {
    let triples =
        [triple(2.0, 1.0, 1), triple(3.0, 1.0, 1), triple(1.0, 2.0, 1), triple(2.0, 0.5, 3), triple(2.0, 1.0, 3)];
    let mut pass = true;
    let mut parts = Vec::new();
    for t in triples {
        let run = run_lp(t);
        let sol = &run.sol;
        let c = closed_form_constant(&run.triple).value.unwrap();
        let rel = (sol.constant_estimate() - c).abs() / c;
        let cert = lp::extract_certificate(sol).unwrap();
        let d = lp::duality_report(sol, &cert).unwrap();
        let worst = d.duality_gap.abs().max(d.slackness_i).max(d.slackness_ii) / sol.objective;
        let ok = sol.status == lp::LpStatus::Optimal
            && sol.cut_rounds <= 20
            && sol.radii.len() == 401
            && rel < LP_REL_TOL
            && worst < LP_DUALITY_TOL
            && run.elapsed < Duration::from_secs(120);
        pass &= ok;
        parts.push(format!("{t}: rel {rel:.2e} rounds {} duality {worst:.1e} {:.1?}", sol.cut_rounds, run.elapsed));
    }
    report(4, pass, format!("[{}] (rel < 2e-2, duality < 1e-6, < 120 s each)", parts.join("; ")));
}

#[test]
fn criterion_05_structure() {
    let sphere = run_lp(triple(2.0, 0.5, 3));
    let s = lp::structure_diagnostics(&sphere.sol, 30.0).unwrap();
    let tri = run_lp(triple(1.0, 2.0, 1));
    let t = lp::structure_diagnostics(&tri.sol, 30.0).unwrap();
    let pass = s.largest_cluster_fraction >= 0.99
        && (0.85..=1.15).contains(&s.decay_exponent)
        && (1.8..=2.2).contains(&t.decay_exponent);
    report(
        5,
        pass,
        format!(
            "(2,0.5,3) largest cluster {:.4} (>= 0.99), decay {:.3} in [0.85, 1.15]; (1,2,1) decay {:.3} in [1.8, 2.2]",
            s.largest_cluster_fraction, s.decay_exponent, t.decay_exponent
        ),
    );
}

#[test]
fn criterion_06_non_uniqueness() {
    let cert = build_psi2();
    let tri = RadialMeasure::exemplar(Exemplar::Triangle);
    let t = triple(1.0, 2.0, 1);
    let c_star = 1.0 / (9.0 * PI * PI);
    let near = verify_other_extremizer(&cert, &PerturbedTriangle { eps: 0.05 }, &tri, &t).unwrap();
    let rel = (near.functional - c_star).abs() / c_star;
    let far = verify_other_extremizer(&cert, &PerturbedTriangle { eps: 0.5 }, &tri, &t).unwrap();
    let pass = rel < 1e-6 && near.passed && near.nonneg.certified && !far.nonneg.certified;
    report(
        6,
        pass,
        format!(
            "eps=0.05: rel {rel:.2e} (< 1e-6), conditions pass {} (a residual {:.1e}, b residual {:.1e}); eps=0.5 nonnegative {}",
            near.passed, near.condition_a_residual, near.condition_b_residual, far.nonneg.certified
        ),
    );
}

#[test]
fn criterion_07_positive_fourier() {
    let reference = positive_fourier_constant().unwrap();
    let t = triple(2.0, 2.0, 1);
    let inst = LpInstance::default_for(t).unwrap();
    let sol = lp::solve_positive_fourier(&inst).unwrap();
    let est = sol.constant_estimate();
    let rel = (est - reference.computed).abs() / reference.computed;
    let profile = lp::profile_correlation(&sol, 1.5 / inst.options.freq_window).unwrap();
    let closed_ok = (reference.computed - 1.0 / (36.0 * PI.powi(4))).abs() < 1e-8 * reference.computed;
    let _ = std::io::stderr().write_all(format!("  {}\n", reference.note()).as_bytes());
    report(
        7,
        rel < LP_REL_TOL && profile.correlation >= 0.99 && closed_ok,
        format!(
            "objective^2 {est:.6e} vs computed {:.6e}: rel {rel:.2e} (< 2e-2); triangle correlation {:.4} (>= 0.99)",
            reference.computed, profile.correlation
        ),
    );
}

#[test]
fn criterion_08_trig_inequalities() {
    let start = Instant::now();
    let tan = check_tan_bounds(1000).unwrap();
    let mut pass = tan.certified && tan.upper.min_margin > 0.0 && tan.lower.min_margin > 0.0;
    let mut min_margin = tan.upper.min_margin.min(tan.lower.min_margin);
    let mut count = 1;
    for a in [alpha0(), 1.9, 2.0] {
        let g = check_g_beta1(a, 1000).unwrap();
        pass &= g.certified && g.positivity.min_margin > 0.0;
        min_margin = min_margin.min(g.positivity.min_margin);
        count += 1;
    }
    for a in [2.0, 3.0, 5.0] {
        for b in [0.25, 0.5, 0.75, 1.0] {
            let g = check_g_general(a, b, 1000).unwrap();
            pass &= g.certified && g.positivity.min_margin > 0.0;
            min_margin = min_margin.min(g.positivity.min_margin);
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    report(
        8,
        pass && elapsed < Duration::from_secs(30),
        format!("{count} checks certified {pass}, smallest margin {min_margin:.2e} (> 0), {elapsed:.2?} (< 30 s)"),
    );
}

#[test]
fn criterion_09_signed_demo() {
    let medians: Vec<f64> =
        [8, 64, 512].iter().map(|&n| signed_ratio_demo(0.4, n, 20, DEMO_SEED).unwrap().median).collect();
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let halved = medians[2] <= medians[0] / 2.0;
    report(
        9,
        decreasing && halved,
        format!(
            "medians {medians:.4?}: strictly decreasing {decreasing}; ratio(512)/ratio(8) = {:.4} (<= 0.5)",
            medians[2] / medians[0]
        ),
    );
}

#[test]
fn criterion_10_moment_inequality() {
    let mut fns = vec![TestFunction::Box];
    fns.extend(random_even_polynomials(20, 7));
    let r = fact31_check(&fns).unwrap();
    let gap = r.box_equality_gap.unwrap().abs();
    let randomized = r.entries.iter().filter(|e| e.name != TestFunction::Box.name()).filter(|e| e.holds).count();
    report(
        10,
        gap < 1e-8 && r.all_hold && randomized == 20,
        format!("box equality gap {gap:.2e} (< 1e-8), inequality holds for {randomized}/20 random even functions"),
    );
}
