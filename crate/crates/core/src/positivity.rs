//! Branch-and-bound certification that a univariate function is nonnegative,
//! and the auxiliary trigonometric inequalities behind the sphere certificate.

use serde::Serialize;
use std::f64::consts::PI;

use crate::constants::{alpha0, lambda_beta};
use crate::error::{Error, Result};
use crate::special::zeta_even;

/// Added to every lower bound to absorb floating-point rounding.
pub const SAFETY: f64 = 1e-9;

/// Point where the function may touch zero with the given contact order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeclaredZero {
    pub x: f64,
    pub order: u32,
}

type Eval<'a> = Box<dyn Fn(f64) -> f64 + 'a>;
type IntervalBound<'a> = Box<dyn Fn(f64, f64) -> f64 + 'a>;

/// A function together with what branch-and-bound needs to know about it.
pub struct BoundedFunction<'a> {
    pub eval: Eval<'a>,
    /// Lipschitz constant of the exact function on `[a, b]`.
    pub deriv_bound: IntervalBound<'a>,
    /// Bound on `|eval - exact|` over `[a, b]`, e.g. a series truncation tail.
    pub value_error: IntervalBound<'a>,
    pub declared_zeros: Vec<DeclaredZero>,
    /// Intervals where the function vanishes identically; only sampled.
    pub contact_zones: Vec<(f64, f64)>,
}

impl<'a> BoundedFunction<'a> {
    pub fn new(eval: impl Fn(f64) -> f64 + 'a, deriv_bound: impl Fn(f64, f64) -> f64 + 'a) -> Self {
        BoundedFunction {
            eval: Box::new(eval),
            deriv_bound: Box::new(deriv_bound),
            value_error: Box::new(|_, _| 0.0),
            declared_zeros: vec![],
            contact_zones: vec![],
        }
    }

    pub fn with_value_error(mut self, err: impl Fn(f64, f64) -> f64 + 'a) -> Self {
        self.value_error = Box::new(err);
        self
    }

    pub fn with_zero(mut self, x: f64, order: u32) -> Self {
        self.declared_zeros.push(DeclaredZero { x, order });
        self
    }

    pub fn with_contact_zone(mut self, lo: f64, hi: f64) -> Self {
        self.contact_zones.push((lo, hi));
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PositivityOptions {
    pub zero_radius: f64,
    pub max_depth: u32,
    pub max_intervals: usize,
    pub zone_samples: usize,
}

impl Default for PositivityOptions {
    fn default() -> Self {
        PositivityOptions { zero_radius: 1e-3, max_depth: 60, max_intervals: 4_000_000, zone_samples: 2001 }
    }
}

/// Outcome of the local test in a declared zero's neighbourhood.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroCheck {
    pub x: f64,
    pub order: u32,
    /// Smallest sampled value minus the allowed error (negative means a miss).
    pub min_slack: f64,
    /// Smallest difference quotient `(f(x) - f(x0)) / |x - x0|^order`.
    pub min_quotient: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZoneCheck {
    pub lo: f64,
    pub hi: f64,
    pub min_slack: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    pub certified: bool,
    /// Smallest certified lower bound away from declared zeros and zones.
    pub min_margin: f64,
    pub zero_neighborhood_radius: f64,
    pub intervals_checked: usize,
    pub failures: Vec<(f64, f64)>,
    pub zero_checks: Vec<ZeroCheck>,
    pub zone_checks: Vec<ZoneCheck>,
}

fn merge(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Certifies `f >= 0` on `[a, b]`: every subinterval away from declared zeros
/// and contact zones must satisfy `f(mid) - L h/2 - err - SAFETY >= margin_tol`.
pub fn certify_nonneg(f: &BoundedFunction, a: f64, b: f64, margin_tol: f64) -> PositivityReport {
    certify_nonneg_with(f, a, b, margin_tol, &PositivityOptions::default())
}

pub fn certify_nonneg_with(
    f: &BoundedFunction,
    a: f64,
    b: f64,
    margin_tol: f64,
    opts: &PositivityOptions,
) -> PositivityReport {
    assert!(a < b, "empty interval [{a}, {b}]");
    let rho = opts.zero_radius;
    let zones: Vec<(f64, f64)> = f
        .contact_zones
        .iter()
        .filter_map(|&(lo, hi)| {
            let (lo, hi) = (lo.max(a), hi.min(b));
            (lo <= hi).then_some((lo, hi))
        })
        .collect();
    let zeros: Vec<DeclaredZero> =
        f.declared_zeros.iter().copied().filter(|z| z.x >= a - rho && z.x <= b + rho).collect();
    let mut excluded: Vec<(f64, f64)> = zones.clone();
    excluded.extend(zeros.iter().map(|z| ((z.x - rho).max(a), (z.x + rho).min(b))));
    let excluded = merge(excluded);

    let mut regular = Vec::new();
    let mut cursor = a;
    for &(lo, hi) in &excluded {
        if lo > cursor {
            regular.push((cursor, lo));
        }
        cursor = cursor.max(hi);
    }
    if cursor < b {
        regular.push((cursor, b));
    }

    let mut failures = Vec::new();
    let mut min_margin = f64::INFINITY;
    let mut checked = 0usize;
    let mut stack: Vec<(f64, f64, u32)> = regular.iter().rev().map(|&(lo, hi)| (lo, hi, 0)).collect();
    while let Some((lo, hi, depth)) = stack.pop() {
        checked += 1;
        if checked > opts.max_intervals {
            failures.push((lo, hi));
            failures.extend(stack.drain(..).map(|(l, h, _)| (l, h)));
            break;
        }
        let mid = 0.5 * (lo + hi);
        let h = hi - lo;
        let v = f.eval(mid);
        let err = (f.value_error)(lo, hi);
        let lb = v - (f.deriv_bound)(lo, hi) * 0.5 * h - err - SAFETY;
        if lb >= margin_tol {
            min_margin = min_margin.min(lb);
        } else if v - err - SAFETY < margin_tol || depth >= opts.max_depth || h <= 1e-14 * mid.abs().max(1.0) {
            // no subinterval around `mid` can reach the margin
            failures.push((lo, hi));
        } else {
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }

    let zone_checks: Vec<ZoneCheck> = zones.iter().map(|&(lo, hi)| zone_check(f, lo, hi, opts.zone_samples)).collect();
    let zero_checks: Vec<ZeroCheck> = zeros.iter().map(|z| zero_check(f, z, a, b, rho, &zones)).collect();
    let failures = merge(failures);
    let certified = failures.is_empty() && zone_checks.iter().all(|z| z.passed) && zero_checks.iter().all(|z| z.passed);
    PositivityReport {
        certified,
        min_margin,
        zero_neighborhood_radius: rho,
        intervals_checked: checked,
        failures,
        zero_checks,
        zone_checks,
    }
}

fn zone_check(f: &BoundedFunction, lo: f64, hi: f64, n: usize) -> ZoneCheck {
    let n = n.max(2);
    let min_slack = (0..n)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            f.eval(x) + (f.value_error)(x, x) + SAFETY
        })
        .fold(f64::INFINITY, f64::min);
    ZoneCheck { lo, hi, min_slack, passed: min_slack >= 0.0 }
}

fn zero_check(f: &BoundedFunction, z: &DeclaredZero, a: f64, b: f64, rho: f64, zones: &[(f64, f64)]) -> ZeroCheck {
    const N: usize = 64;
    let in_zone = |x: f64| zones.iter().any(|&(lo, hi)| x >= lo && x <= hi);
    let f0 = f.eval(z.x);
    let mut min_slack = f64::INFINITY;
    let mut min_quotient = f64::INFINITY;
    for side in [-1.0, 1.0] {
        for k in 1..=N {
            let d = rho * k as f64 / N as f64;
            let x = z.x + side * d;
            if x < a || x > b || in_zone(x) {
                continue;
            }
            let v = f.eval(x);
            min_slack = min_slack.min(v + (f.value_error)(x, x) + SAFETY);
            min_quotient = min_quotient.min((v - f0) / d.powi(z.order as i32));
        }
    }
    let f0_ok = f0 + (f.value_error)(z.x, z.x) + SAFETY >= 0.0;
    let passed = f0_ok && min_slack >= 0.0 && min_quotient > 0.0;
    ZeroCheck { x: z.x, order: z.order, min_slack, min_quotient, passed }
}

/// Checks `|f(x) - f(y)| <= L |x - y|` on random pairs drawn from `[a, b]`,
/// with `L` the supplied bound on the smallest enclosing interval. Returns the
/// worst ratio of observed slope to bound.
pub fn secant_test(f: &BoundedFunction, a: f64, b: f64, pairs: usize, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x: f64 = rng.gen_range(a..b);
        // mix wide and narrow pairs
        let w = (b - a) * 10f64.powf(-rng.gen_range(0.0..6.0));
        let y = (x + rng.gen_range(-w..w)).clamp(a, b);
        if x == y {
            continue;
        }
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let bound = (f.deriv_bound)(lo, hi);
        let slope = (f.eval(x) - f.eval(y)).abs() / (hi - lo);
        // allow for rounding in the difference quotient
        let slack = 4.0 * f64::EPSILON * (f.eval(x).abs() + f.eval(y).abs()) / (hi - lo);
        worst = worst.max((slope - slack).max(0.0) / bound.max(1e-300));
    }
    worst
}

/// `x cot x` with its removable singularity filled in.
pub fn x_cot_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tan()
    }
}

/// Lipschitz bound of `x cot x` on `[a, b] ⊂ [0, pi/2]`: its derivative is
/// `(sin 2x / 2 - x) / sin^2 x`, whose numerator magnitude increases in `x`.
fn x_cot_x_slope(a: f64, b: f64) -> f64 {
    if a < 1e-3 {
        // |d/dx x cot x| <= 2x/3 (1 + x^2) near 0
        return 2.0 * b / 3.0 * (1.0 + b * b) + 1e-12;
    }
    (b - (2.0 * b).sin() / 2.0) / a.sin().powi(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct TanBoundsReport {
    /// `1 - x^2/3 - x cot x >= 0`.
    pub upper: PositivityReport,
    /// `x cot x - 2 sqrt(1 - x^2/3) + 1 >= 0`.
    pub lower: PositivityReport,
    /// All Taylor coefficients of both differences at 0 are nonnegative up to
    /// the checked order; the remaining orders follow from `(pi^2/3)^n > 4 n^2`.
    pub series_nonnegative: bool,
    pub series_min_coefficient: f64,
    pub probe_points: usize,
    pub probe_min: f64,
    pub certified: bool,
}

/// `2 |binom(1/2, n)| 3^-n - 2 zeta(2n) pi^-2n`, the `x^(2n)` coefficient of
/// `x cot x - 2 sqrt(1 - x^2/3) + 1`.
fn lower_series_coefficient(n: u32) -> f64 {
    let mut b = 0.5f64; // |binom(1/2, 1)|
    for k in 1..n {
        b *= (k as f64 - 0.5) / (k as f64 + 1.0);
    }
    2.0 * b * 3f64.powi(-(n as i32)) - 2.0 * zeta_even(n) * PI.powi(-2 * n as i32)
}

/// Certifies `1 - x^2/3 >= x cot x >= 2 sqrt(1 - x^2/3) - 1` on `[0, pi/2]`.
pub fn check_tan_bounds(n_points: usize) -> Result<TanBoundsReport> {
    if n_points < 10 {
        return Err(Error::Domain("check_tan_bounds needs at least 10 probe points".into()));
    }
    let delta = 0.05;
    let hi = PI / 2.0;
    let upper = BoundedFunction::new(|x| 1.0 - x * x / 3.0 - x_cot_x(x), |a, b| 2.0 * b / 3.0 + x_cot_x_slope(a, b));
    let lower = BoundedFunction::new(
        |x| x_cot_x(x) - 2.0 * (1.0 - x * x / 3.0).sqrt() + 1.0,
        |a, b| x_cot_x_slope(a, b) + 2.0 * (b / 3.0) / (1.0 - b * b / 3.0).sqrt(),
    );
    let up = certify_nonneg(&upper, delta, hi, 0.0);
    let lo = certify_nonneg(&lower, delta, hi, 0.0);

    // Near 0: x cot x = 1 - 2 sum zeta(2n) (x/pi)^(2n), so the upper difference
    // has positive coefficients outright; the lower one is checked termwise.
    let coeffs: Vec<f64> = (2..=60).map(lower_series_coefficient).collect();
    let series_min = coeffs.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_ok = (61..=200).all(|n: i32| (PI * PI / 3.0).powi(n) > 4.0 * (n * n) as f64);
    // the x^2 coefficient is 1/3 - 2 zeta(2) / pi^2 = 0 exactly
    let series_nonnegative = series_min > 0.0 && tail_ok;

    let probe_min = (0..n_points)
        .map(|i| {
            let x = 1e-3 + (hi - 1e-3) * i as f64 / (n_points - 1) as f64;
            upper.eval(x).min(lower.eval(x))
        })
        .fold(f64::INFINITY, f64::min);
    let certified = up.certified && lo.certified && series_nonnegative && probe_min >= -SAFETY;
    Ok(TanBoundsReport {
        upper: up,
        lower: lo,
        series_nonnegative,
        series_min_coefficient: series_min,
        probe_points: n_points,
        probe_min,
        certified,
    })
}

/// `G(x) = amp sin(freq x) + x^(alpha+1) - b x`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GFunction {
    pub alpha: f64,
    pub amp: f64,
    pub freq: f64,
    pub b: f64,
}

impl GFunction {
    pub fn value(&self, x: f64) -> f64 {
        self.amp * (self.freq * x).sin() + x.powf(self.alpha + 1.0) - self.b * x
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.amp * self.freq * (self.freq * x).cos() + (self.alpha + 1.0) * x.powf(self.alpha) - self.b
    }

    pub fn d2(&self, x: f64) -> f64 {
        -self.amp * self.freq * self.freq * (self.freq * x).sin()
            + (self.alpha + 1.0) * self.alpha * x.powf(self.alpha - 1.0)
    }

    /// `sup |G''|` on `[a, b]`, `0 <= a`.
    fn d2_bound(&self, _a: f64, b: f64) -> f64 {
        let poly =
            (self.alpha + 1.0) * self.alpha * if self.alpha >= 1.0 { b.powf(self.alpha - 1.0) } else { f64::INFINITY };
        self.amp.abs() * self.freq * self.freq + poly
    }

    /// Smallest power-of-two `R >= 2` beyond which `G > 0` by polynomial
    /// dominance: `R^(a+1) - b R - |amp| > 0` and `(a+1) R^a - b > 0`.
    pub fn x_cut(&self) -> f64 {
        let mut r: f64 = 2.0;
        while !(r.powf(self.alpha + 1.0) - self.b * r - self.amp.abs() > 0.0
            && (self.alpha + 1.0) * r.powf(self.alpha) - self.b > 0.0)
        {
            r *= 2.0;
        }
        r
    }

    pub fn bounded(&self, zero_order_at_origin: u32) -> BoundedFunction<'_> {
        BoundedFunction::new(
            move |x| self.value(x),
            // sup |G'| <= |G'(mid)| + (h/2) sup |G''|
            move |a, b| self.d1(0.5 * (a + b)).abs() + 0.5 * (b - a) * self.d2_bound(a, b),
        )
        .with_zero(0.0, zero_order_at_origin)
        .with_zero(1.0, 2)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GReport {
    pub alpha: f64,
    pub beta: f64,
    pub g: GFunction,
    pub g_at_1: f64,
    pub dg_at_1: f64,
    pub dg_at_0: f64,
    pub d2g_at_1: f64,
    pub x_cut: f64,
    pub positivity: PositivityReport,
    pub probe_points: usize,
    pub probe_min: f64,
    pub certified: bool,
}

fn run_g(alpha: f64, beta: f64, g: GFunction, n_points: usize, tol_at_1: f64) -> GReport {
    let dg0 = g.d1(0.0);
    // At the threshold alpha0, G'(0) vanishes and the contact at 0 is of
    // higher order.
    let order0 = if dg0 > 1e-12 { 1 } else { 2 };
    let x_cut = g.x_cut();
    let positivity = certify_nonneg(&g.bounded(order0), 0.0, x_cut, 0.0);
    let probe_min = (1..=n_points)
        .map(|i| {
            let x = x_cut * i as f64 / n_points as f64;
            if (x - 1.0).abs() < 1e-3 {
                0.0
            } else {
                g.value(x)
            }
        })
        .fold(f64::INFINITY, f64::min);
    let (g1, dg1, d2g1) = (g.value(1.0), g.d1(1.0), g.d2(1.0));
    let certified = positivity.certified
        && g1.abs() < tol_at_1
        && dg1.abs() < tol_at_1
        && dg0 > -1e-12
        && d2g1 > 0.0
        && probe_min >= -SAFETY;
    GReport {
        alpha,
        beta,
        g,
        g_at_1: g1,
        dg_at_1: dg1,
        dg_at_0: dg0,
        d2g_at_1: d2g1,
        x_cut,
        positivity,
        probe_points: n_points,
        probe_min,
        certified,
    }
}

/// `G(x) = alpha sin(pi x / 2) + x^(alpha+1) - (alpha+1) x >= 0` for
/// `alpha0 <= alpha <= 2`.
pub fn check_g_beta1(alpha: f64, n_points: usize) -> Result<GReport> {
    if !(alpha >= alpha0() - 1e-12 && alpha <= 2.0) {
        return Err(Error::Domain(format!("alpha must lie in [{}, 2], got {alpha}", alpha0())));
    }
    let g = GFunction { alpha, amp: alpha, freq: PI / 2.0, b: alpha + 1.0 };
    Ok(run_g(alpha, 1.0, g, n_points, 1e-12))
}

/// Sphere certificate constants `A = alpha / (2 lambda beta sin 2 pi lambda)`
/// and `B = alpha / beta + 1`.
pub fn sphere_a_b(alpha: f64, beta: f64) -> Result<(f64, f64, f64)> {
    let l = lambda_beta(beta)?;
    let a = alpha / (2.0 * l * beta * (2.0 * PI * l).sin());
    Ok((l, a, alpha / beta + 1.0))
}

/// `G(x) = 2 lambda A sin(2 pi lambda x) + x^(alpha+1) - B x >= 0`.
pub fn check_g_general(alpha: f64, beta: f64, n_points: usize) -> Result<GReport> {
    if !(alpha >= 2.0 && beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain(format!("need alpha >= 2 and beta in (0, 1], got ({alpha}, {beta})")));
    }
    let (l, a, b) = sphere_a_b(alpha, beta)?;
    let g = GFunction { alpha, amp: 2.0 * l * a, freq: 2.0 * PI * l, b };
    Ok(run_g(alpha, beta, g, n_points, 1e-10))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_double_zero() {
        let f = BoundedFunction::new(|x| x * x, |a: f64, b: f64| 2.0 * a.abs().max(b.abs())).with_zero(0.0, 2);
        let r = certify_nonneg(&f, -1.0, 1.0, 0.0);
        assert!(r.certified, "{r:?}");
        assert!(r.min_margin > 0.0);
    }

    #[test]
    fn negative_function_rejected() {
        let f = BoundedFunction::new(|x: f64| x.sin() - x + 1e-3, |_, _| 1.0);
        let r = certify_nonneg(&f, 0.0, 1.0, 0.0);
        assert!(!r.certified);
        assert!(!r.failures.is_empty());
    }

    #[test]
    fn missing_zero_declaration_fails() {
        let f = BoundedFunction::new(|x| x * x, |a: f64, b: f64| 2.0 * a.abs().max(b.abs()));
        assert!(!certify_nonneg(&f, -1.0, 1.0, 0.0).certified);
    }

    #[test]
    fn tan_spot_values() {
        let x = 1.0f64;
        assert!((x_cot_x(x) - 0.642_092_615_934_330_7).abs() < 1e-15);
        assert!(x_cot_x(PI / 2.0).abs() < 1e-15);
        assert!((lower_series_coefficient(2) - 1.0 / 180.0).abs() < 1e-15);
    }

    #[test]
    fn g_values() {
        let r = check_g_beta1(2.0, 100).unwrap();
        assert!((r.g.value(0.5) - (2f64.sqrt() - 1.375)).abs() < 1e-15);
        assert!(r.g_at_1.abs() < 1e-15);
        assert!(r.certified, "{:?}", r.positivity.failures);
    }

    #[test]
    fn g_general_matches_beta1() {
        let a = check_g_beta1(2.0, 100).unwrap();
        let b = check_g_general(2.0, 1.0, 100).unwrap();
        assert_eq!(a.g.amp, b.g.amp);
        assert_eq!(a.g.freq, b.g.freq);
        assert!((a.positivity.min_margin - b.positivity.min_margin).abs() < 1e-9);
    }
}
