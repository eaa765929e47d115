use proptest::prelude::*;
use std::f64::consts::PI;

use uncertainty_extremal::certificates::{build_psi2, fact31_check, random_even_polynomials, Certificate, Family};
use uncertainty_extremal::constants::{lambda_beta, lambda_residual};
use uncertainty_extremal::lp::{self, simplex};
use uncertainty_extremal::positivity::{certify_nonneg, secant_test, BoundedFunction};
use uncertainty_extremal::radial::{Atom, RadialMeasure, Triple};
use uncertainty_extremal::special::{sphere_kernel, sphere_kernel_deriv};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lambda_solves_and_obeys_bounds(beta in 1e-3f64..=1.0) {
        let l = lambda_beta(beta).unwrap();
        prop_assert!(l > 0.0 && l <= 0.25);
        prop_assert!(lambda_residual(beta, l).abs() < 1e-12);
        let s = (2.0 * PI * l).powi(2);
        prop_assert!(3.0 * beta - 0.75 * beta * beta < s && s < 3.0 * beta);
    }

    #[test]
    fn lambda_is_increasing(a in 1e-3f64..1.0, b in 1e-3f64..1.0) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(lambda_beta(lo).unwrap() < lambda_beta(hi).unwrap());
    }

    #[test]
    fn sphere_kernel_is_bounded(d in 1u32..=6, s in 0.0f64..50.0) {
        prop_assert!(sphere_kernel(d, s).abs() <= 1.0 + 1e-14);
        prop_assert_eq!(sphere_kernel(d, 0.0), 1.0);
    }

    #[test]
    fn kernel_derivative_matches_difference(d in 1u32..=5, s in 0.05f64..20.0) {
        let h = 1e-6;
        let fd = (sphere_kernel(d, s + h) - sphere_kernel(d, s - h)) / (2.0 * h);
        prop_assert!((fd - sphere_kernel_deriv(d, s)).abs() < 1e-6);
    }

    #[test]
    fn certificate_json_round_trips(
        terms in prop::collection::vec((1e-3f64..100.0, -10.0f64..10.0), 1..20),
        alpha in 0.1f64..6.0,
        d_const in -5.0f64..5.0,
        dim in 1u32..=4,
    ) {
        let c = Certificate {
            dim,
            alpha,
            terms,
            c_poly: 1.0,
            d_const,
            tail_bound: 0.0,
            tail_decay: None,
            family: Family::FromLP,
        };
        prop_assert_eq!(Certificate::from_json(&c.to_json().unwrap()).unwrap(), c);
    }

    #[test]
    fn measure_json_round_trips(atoms in prop::collection::vec((0.0f64..5.0, 1e-6f64..3.0), 1..12), dim in 1u32..=4) {
        let atoms: Vec<Atom> = atoms.into_iter().map(|(radius, mass)| Atom { radius, mass }).collect();
        let m = RadialMeasure::atomic(dim, atoms).unwrap();
        prop_assert_eq!(RadialMeasure::from_json(&m.to_json().unwrap()).unwrap(), m);
    }

    #[test]
    fn instance_json_round_trips(r_max in 0.1f64..4.0, n in 2usize..60, nf in 1usize..40, w in 1.0f64..50.0) {
        let inst = lp::build_instance(Triple::new(2.0, 1.0, 1).unwrap(), r_max, n, nf, w).unwrap();
        prop_assert!(inst.radii.windows(2).all(|p| p[1] > p[0]));
        prop_assert_eq!(lp::LpInstance::from_json(&inst.to_json().unwrap()).unwrap(), inst);
    }

    #[test]
    fn positive_quadratics_certify(c in 0.0f64..1.0, delta in 1e-3f64..1.0) {
        let f = BoundedFunction::new(move |x| (x - c).powi(2) + delta, move |a, b| 2.0 * (a - c).abs().max((b - c).abs()));
        let rep = certify_nonneg(&f, 0.0, 1.0, 0.0);
        prop_assert!(rep.certified);
        prop_assert!(rep.min_margin > 0.0 && rep.min_margin <= delta);
    }

    #[test]
    fn negative_dips_are_rejected(c in 0.05f64..0.95, delta in 1e-3f64..1.0) {
        let f = BoundedFunction::new(move |x| (x - c).powi(2) - delta, move |a, b| 2.0 * (a - c).abs().max((b - c).abs()));
        prop_assert!(!certify_nonneg(&f, 0.0, 1.0, 0.0).certified);
    }

    #[test]
    fn dilation_leaves_the_functional_unchanged(
        atoms in prop::collection::vec((0.05f64..2.0, 0.1f64..1.0), 1..5),
        scale in 0.3f64..3.0,
        beta in 0.2f64..1.0,
    ) {
        let atoms: Vec<Atom> = atoms.into_iter().map(|(radius, mass)| Atom { radius, mass }).collect();
        let m = RadialMeasure::atomic(3, atoms).unwrap();
        let t = Triple::new(2.0, beta, 3).unwrap();
        let a = m.functional(&t).unwrap();
        let b = m.dilate(scale).unwrap().functional(&t).unwrap();
        prop_assert!((a - b).abs() <= 1e-7 * a, "{} vs {}", a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simplex_optimum_satisfies_kkt(seed in any::<u64>(), m in 1usize..6, n in 2usize..12) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let upper: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let x0: Vec<f64> = upper.iter().map(|u| rng.gen_range(0.0..*u)).collect();
        let rhs: Vec<f64> = (0..m).map(|i| (0..n).map(|k| a[k][i] * x0[k]).sum()).collect();
        let mut p = simplex::Problem::new(rhs.clone());
        for k in 0..n {
            p.push(simplex::Column::Dense(a[k].clone()), rng.gen_range(-1.0..1.0), 0.0, upper[k]);
        }
        let out = simplex::solve(&p, &simplex::SimplexOptions::default()).unwrap();
        prop_assert_eq!(out.status, simplex::Status::Optimal);
        for i in 0..m {
            let r: f64 = (0..n).map(|k| a[k][i] * out.x[k]).sum();
            prop_assert!((r - rhs[i]).abs() < 1e-9);
        }
        for k in 0..n {
            let x = out.x[k];
            prop_assert!(x >= -1e-9 && x <= upper[k] + 1e-9);
            let d = out.reduced[k];
            if x > 1e-9 && x < upper[k] - 1e-9 {
                prop_assert!(d.abs() < 1e-8, "interior column {} has reduced cost {}", k, d);
            } else if x <= 1e-9 {
                prop_assert!(d > -1e-8);
            } else {
                prop_assert!(d < 1e-8);
            }
        }
        let bland = simplex::solve(&p, &simplex::SimplexOptions { pivot_rule: simplex::PivotRule::Bland, ..Default::default() }).unwrap();
        prop_assert!((bland.objective - out.objective).abs() < 1e-9);
    }

    #[test]
    fn small_lps_are_dual_consistent(alpha in 1.0f64..4.0, beta in 0.3f64..2.0, dim in prop::sample::select(vec![1u32, 3])) {
        let t = Triple::new(alpha, beta, dim).unwrap();
        let mut inst = lp::build_instance(t, 1.0, 41, 16, 12.0).unwrap();
        inst.options.max_cut_rounds = 2;
        let sol = lp::solve(&inst).unwrap();
        prop_assert_eq!(sol.status, lp::LpStatus::Optimal);
        prop_assert_eq!(sol.masses.iter().sum::<f64>(), 1.0);
        let cert = lp::extract_certificate(&sol).unwrap();
        let rep = lp::duality_report(&sol, &cert).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
        for &r in &sol.radii {
            prop_assert!(cert.h(r) >= -1e-9);
        }
    }

    #[test]
    fn moment_inequality_holds_for_random_even_polynomials(seed in any::<u64>()) {
        let fns = random_even_polynomials(3, seed);
        prop_assert!(fact31_check(&fns).unwrap().all_hold);
    }
}

#[test]
fn psi2_lipschitz_bound_dominates_secants() {
    let c = build_psi2();
    let f = BoundedFunction::new(|x| c.h(x), |a, b| c.lipschitz(a, b));
    assert!(secant_test(&f, 0.0, 3.0, 20_000, 7) <= 1.0);
}
