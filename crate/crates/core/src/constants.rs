//! Closed-form optimal constants, the critical frequency `lambda_beta` of the
//! unit sphere, and the random-sign demonstration that the inequality fails
//! for signed functions when `beta <= d/2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::radial::{golden_max, Exemplar, RadialMeasure, Triple};

/// Threshold `1 / (pi/2 - 1)` above which the sphere is extremal for `beta = 1`.
pub fn alpha0() -> f64 {
    1.0 / (PI / 2.0 - 1.0)
}

/// Unique root in `(0, 1/4]` of `2 pi lambda = (1 - beta) tan(2 pi lambda)`.
pub fn lambda_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain(format!("lambda_beta needs beta in (0, 1], got {beta}")));
    }
    if beta == 1.0 {
        return Ok(0.25);
    }
    // Multiplying through by cos removes the pole at 1/4.
    let f = |l: f64| (1.0 - beta) * (2.0 * PI * l).sin() - 2.0 * PI * l * (2.0 * PI * l).cos();
    let (mut lo, mut hi) = (1e-9, 0.25 - 1e-9);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 0.0 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = |l: f64| lambda_residual(beta, l).abs();
    Ok(if r(lo) <= r(hi) { lo } else { hi })
}

/// `2 pi lambda - (1 - beta) tan(2 pi lambda)`; for `beta = 1` the equivalent
/// pole-free form `(1 - beta) sin - 2 pi lambda cos`.
pub fn lambda_residual(beta: f64, lambda: f64) -> f64 {
    let x = 2.0 * PI * lambda;
    if beta == 1.0 {
        -x * x.cos()
    } else {
        x - (1.0 - beta) * x.tan()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Source {
    ClosedForm,
    SphereFormula,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantResult {
    pub triple: Triple,
    /// `None` exactly when `source` is `Unknown`.
    pub value: Option<f64>,
    pub source: Source,
    pub extremizer_hint: Option<Exemplar>,
}

/// `(sin(2 pi lambda) / (2 pi lambda^(1 - beta)))^alpha` with `lambda = lambda_beta`.
pub fn sphere_constant(alpha: f64, beta: f64) -> Result<f64> {
    let l = lambda_beta(beta)?;
    Ok(((2.0 * PI * l).sin() / (2.0 * PI * l.powf(1.0 - beta))).powf(alpha))
}

/// Whether the sphere formula is proven optimal for `(alpha, beta, 3)`.
pub fn sphere_case(alpha: f64, beta: f64) -> bool {
    (beta == 1.0 && alpha >= alpha0()) || (alpha >= 2.0 && beta > 0.0 && beta < 1.0)
}

pub fn closed_form_constant(triple: &Triple) -> ConstantResult {
    let Triple { alpha, beta, dim } = *triple;
    let hit = |value: f64, source, hint| ConstantResult {
        triple: *triple,
        value: Some(value),
        source,
        extremizer_hint: Some(hint),
    };
    match dim {
        1 if beta == 1.0 && alpha >= 2.0 => {
            hit(1.0 / ((2.0 * PI).powf(alpha) * (alpha + 1.0)), Source::ClosedForm, Exemplar::Box)
        }
        1 if alpha == 1.0 && beta == 2.0 => hit(1.0 / (9.0 * PI * PI), Source::ClosedForm, Exemplar::Triangle),
        3 if alpha == 1.0 && beta == 2.0 => hit(4.0 / (9.0 * PI * PI), Source::ClosedForm, Exemplar::InverseRadius3D),
        3 if sphere_case(alpha, beta) => {
            hit(sphere_constant(alpha, beta).expect("beta in (0, 1]"), Source::SphereFormula, Exemplar::UnitSphere3D)
        }
        _ => ConstantResult { triple: *triple, value: None, source: Source::Unknown, extremizer_hint: None },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub triple: Triple,
    pub closed_form: f64,
    pub functional: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub extremizer: Exemplar,
}

/// Compares the closed form with the functional evaluated at the named
/// extremizer.
pub fn cross_check(triple: &Triple) -> Result<CrossCheck> {
    let c = closed_form_constant(triple);
    let (Some(value), Some(ex)) = (c.value, c.extremizer_hint) else {
        return Err(Error::UnknownCase(triple.to_string()));
    };
    let f = RadialMeasure::exemplar(ex).functional(triple)?;
    let abs_err = (f - value).abs();
    Ok(CrossCheck {
        triple: *triple,
        closed_form: value,
        functional: f,
        abs_err,
        rel_err: abs_err / value,
        extremizer: ex,
    })
}

/// Reference value for `(2, 2, 1)` among measures with `mu^ >= 0`, where the
/// triangle `(1 - |x|)_+` is extremal.
#[derive(Clone, Debug, Serialize)]
pub struct PositiveFourierConstant {
    /// The functional evaluated at the triangle.
    pub computed: f64,
    /// Closed form of `computed`: `(1/pi^2)^2 (1/6)^2 = 1 / (36 pi^4)`.
    pub closed_form: f64,
    /// The value `1 / (6 pi)^2` as it is commonly quoted.
    pub quoted: f64,
    /// `quoted / computed`.
    pub ratio: f64,
}

impl PositiveFourierConstant {
    pub fn note(&self) -> String {
        format!(
            "positive-Fourier (2,2,1): computed C = {:.6e} (1/(36 pi^4) = {:.6e}); quoted 1/(6 pi)^2 = {:.6e} differs by a factor {:.4}",
            self.computed, self.closed_form, self.quoted, self.ratio
        )
    }
}

pub fn positive_fourier_constant() -> Result<PositiveFourierConstant> {
    let computed = RadialMeasure::exemplar(Exemplar::Triangle).functional(&Triple::new(2.0, 2.0, 1)?)?;
    let quoted = 1.0 / (6.0 * PI).powi(2);
    Ok(PositiveFourierConstant { computed, closed_form: 1.0 / (36.0 * PI.powi(4)), quoted, ratio: quoted / computed })
}

/// Fixed exponent `alpha` in the signed demo.
pub const DEMO_ALPHA: f64 = 2.0;

#[derive(Clone, Debug, Serialize)]
pub struct DemoStats {
    pub beta: f64,
    pub num_modes: usize,
    pub ratios: Vec<f64>,
    pub median: f64,
    pub weighted_sup: f64,
}

/// Bump with `Phi^` supported in `[-1/2, 1/2]`.
pub fn demo_bump_hat(xi: f64) -> f64 {
    let s = 4.0 * xi * xi;
    if s < 1.0 {
        (1.0 - 1.0 / (1.0 - s)).exp()
    } else {
        0.0
    }
}

// The bump decays like exp(-c sqrt x); at |x| = 160 it is below 1e-12 of its
// peak, so periods beyond 200 are dropped.
const DEMO_PERIODS: i64 = 200;
const DEMO_COARSE: usize = 256;
const DEMO_FINE: usize = 8192;
const DEMO_XI_NODES: usize = 2048;

struct DemoKernels {
    /// `sum_n |Phi(u + n)|` and `sum_n |Phi(u + n)| (u + n)^2` on the fine grid.
    k0: Vec<f64>,
    k2: Vec<f64>,
}

fn demo_kernels() -> &'static DemoKernels {
    static CACHE: OnceLock<DemoKernels> = OnceLock::new();
    CACHE.get_or_init(|| {
        // Phi(x) = 2 int_0^{1/2} Phi^(xi) cos(2 pi x xi) d xi by the trapezoid
        // rule; the integrand vanishes to all orders at 1/2.
        let h = 0.5 / DEMO_XI_NODES as f64;
        let hat: Vec<f64> =
            (0..=DEMO_XI_NODES).map(|k| demo_bump_hat(k as f64 * h) * if k == 0 { 0.5 } else { 1.0 } * h).collect();
        let phi = |x: f64| -> f64 {
            let w = 2.0 * PI * x * h;
            2.0 * hat.iter().enumerate().map(|(k, a)| a * (w * k as f64).cos()).sum::<f64>()
        };
        let n_abs = DEMO_PERIODS as usize * DEMO_COARSE;
        let values: Vec<f64> = (0..=n_abs).map(|i| phi(i as f64 / DEMO_COARSE as f64).abs()).collect();
        let mut k0 = vec![0.0; DEMO_COARSE];
        let mut k2 = vec![0.0; DEMO_COARSE];
        for (i, (a, b)) in k0.iter_mut().zip(k2.iter_mut()).enumerate() {
            for n in -DEMO_PERIODS..DEMO_PERIODS {
                let idx = n * DEMO_COARSE as i64 + i as i64;
                let v = values[idx.unsigned_abs() as usize];
                let x = idx as f64 / DEMO_COARSE as f64;
                *a += v;
                *b += v * x * x;
            }
        }
        let interp = |k: &[f64]| -> Vec<f64> {
            (0..DEMO_FINE)
                .map(|j| {
                    let u = j as f64 * DEMO_COARSE as f64 / DEMO_FINE as f64;
                    let i = u.floor() as usize;
                    let w = u - i as f64;
                    k[i] * (1.0 - w) + k[(i + 1) % DEMO_COARSE] * w
                })
                .collect()
        };
        DemoKernels { k0: interp(&k0), k2: interp(&k2) }
    })
}

/// `sup_xi |f^(xi)| |xi|^beta` for `f = Phi sum_j eps_j c_j e(-jx)`; the
/// translates of `Phi^` have disjoint supports so the signs drop out.
fn demo_weighted_sup(beta: f64, coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let j = (i + 1) as f64;
            let g = |eta: f64| demo_bump_hat(eta) * (j - eta).abs().powf(beta);
            // g is unimodal on (-1/2, 1/2): bump times a monotone weight.
            let (_, v) = golden_max(&g, -0.5, 0.5, 0.0, 1e-12);
            c * v
        })
        .fold(0.0, f64::max)
}

/// Median over `num_trials` random sign patterns of
/// `S^(a/(a+b)) M^(b/(a+b)) / ||f||_1` with `a = 2` and `c_j = (1 + j)^-beta`.
pub fn signed_ratio_demo(beta: f64, num_modes: usize, num_trials: usize, seed: u64) -> Result<DemoStats> {
    if !(beta > 0.0) || num_modes == 0 || num_trials == 0 {
        return Err(Error::Domain("demo needs beta > 0 and at least one mode and trial".into()));
    }
    let k = demo_kernels();
    let coeffs: Vec<f64> = (1..=num_modes).map(|j| (1.0 + j as f64).powf(-beta)).collect();
    let s = demo_weighted_sup(beta, &coeffs);
    let (cos_t, sin_t): (Vec<f64>, Vec<f64>) = (0..DEMO_FINE)
        .map(|m| {
            let a = 2.0 * PI * m as f64 / DEMO_FINE as f64;
            (a.cos(), a.sin())
        })
        .unzip();
    let a = DEMO_ALPHA;
    let mut ratios = Vec::with_capacity(num_trials);
    for trial in 0..num_trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let signed: Vec<f64> = coeffs.iter().map(|c| if rng.gen::<bool>() { *c } else { -*c }).collect();
        let (mut l1, mut l2) = (0.0, 0.0);
        for m in 0..DEMO_FINE {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, c) in signed.iter().enumerate() {
                let idx = (m * (i + 1)) % DEMO_FINE;
                re += c * cos_t[idx];
                im -= c * sin_t[idx];
            }
            let p = re.hypot(im);
            l1 += p * k.k0[m];
            l2 += p * k.k2[m];
        }
        l1 /= DEMO_FINE as f64;
        l2 /= DEMO_FINE as f64;
        ratios.push(s.powf(a / (a + beta)) * l2.powf(beta / (a + beta)) / l1);
    }
    let median = median(&ratios);
    Ok(DemoStats { beta, num_modes, ratios, median, weighted_sup: s })
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_half() {
        // t = tan(t) / 2 has root t = 1.165561185207211...
        let l = lambda_beta(0.5).unwrap();
        assert!((2.0 * PI * l - 1.165_561_185_207_211).abs() < 1e-12);
    }

    #[test]
    fn lambda_domain() {
        assert!(lambda_beta(0.0).is_err());
        assert!(lambda_beta(1.5).is_err());
        assert_eq!(lambda_beta(1.0).unwrap(), 0.25);
    }

    #[test]
    fn covered_cases() {
        let c = closed_form_constant(&Triple::new(3.0, 1.0, 1).unwrap());
        assert!((c.value.unwrap() - 1.0 / (32.0 * PI.powi(3))).abs() < 1e-18);
        assert_eq!(closed_form_constant(&Triple::new(1.0, 3.0, 1).unwrap()).source, Source::Unknown);
        assert_eq!(closed_form_constant(&Triple::new(1.5, 1.0, 3).unwrap()).source, Source::Unknown);
        assert_eq!(closed_form_constant(&Triple::new(1.8, 1.0, 3).unwrap()).source, Source::SphereFormula);
        assert_eq!(closed_form_constant(&Triple::new(1.9, 0.5, 3).unwrap()).source, Source::Unknown);
    }

    #[test]
    fn sphere_half_value() {
        // mpmath, 30 digits
        let v = closed_form_constant(&Triple::new(2.0, 0.5, 3).unwrap()).value.unwrap();
        assert!((v - 0.115_325_478_774_073_28).abs() < 1e-13, "{v}");
        assert!((lambda_beta(0.5).unwrap() - 0.185_504_824_101_775_8).abs() < 1e-15);
    }

    #[test]
    fn bump_hat_support() {
        assert_eq!(demo_bump_hat(0.0), 1.0);
        assert_eq!(demo_bump_hat(0.5), 0.0);
        assert_eq!(demo_bump_hat(-0.7), 0.0);
    }
}
