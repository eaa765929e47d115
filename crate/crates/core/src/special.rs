//! Special functions on the real line: sinc, integer-order Bessel functions,
//! the normalized Bessel function and the Fourier kernel of the unit sphere.

use std::f64::consts::PI;

/// Landau's uniform constant: `|J_nu(x)| <= LANDAU_C * x^(-1/3)` for `nu > 0`.
pub const LANDAU_C: f64 = 0.785_746_870_4;

/// `sin(x) / x`, with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Bessel function of the first kind `J_n(x)` for integer order.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 4.0 {
        bessel_j_series(n, ax)
    } else if ax < 25.0 + (n * n) as f64 {
        bessel_j_trapezoid(n, ax)
    } else {
        bessel_j_hankel(n, ax)
    };
    if x < 0.0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

fn bessel_j_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= h / k as f64;
    }
    let q = -h * h;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + n as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

// Bessel's integral is a periodic integrand; the trapezoid rule with M nodes
// has aliasing error of order J_{M-n}(x), negligible once M > x + n + 40.
fn bessel_j_trapezoid(n: u32, x: f64) -> f64 {
    let m = (x + n as f64 + 40.0).ceil() as usize;
    let step = 2.0 * PI / m as f64;
    let nf = n as f64;
    let sum: f64 = (0..m)
        .map(|k| {
            let th = k as f64 * step;
            (nf * th - x * th.sin()).cos()
        })
        .sum();
    sum / m as f64
}

fn bessel_j_hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut term = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > prev || term.abs() < 1e-17 {
            break;
        }
        prev = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
    }
    let chi = x - (0.5 * n as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `Gamma(k / 2)` for a positive integer `k`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "gamma_half needs a positive argument");
    let (mut g, mut z) = if k % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = k as f64 / 2.0;
    while z < target - 1e-12 {
        g *= z;
        z += 1.0;
    }
    g
}

/// Surface area of the unit sphere `S^k` in `R^(k+1)`; `sphere_area(0) == 2`.
pub fn sphere_area(k: u32) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k - 1) as f64 * sphere_area(k - 2),
    }
}

/// Normalized Bessel function `Gamma(nu+1) (x/2)^(-nu) J_nu(x)` at `nu = d/2 - 1`.
pub fn normalized_bessel(d: u32, x: f64) -> f64 {
    let x = x.abs();
    match d {
        0 => panic!("dimension must be positive"),
        1 => x.cos(),
        2 => bessel_j(0, x),
        3 => sinc(x),
        _ if d % 2 == 0 => {
            let m = d / 2 - 1;
            if x < 8.0 {
                normalized_series(m as f64, x)
            } else {
                let mut fact = 1.0;
                for k in 1..=m {
                    fact *= k as f64;
                }
                fact * (2.0 / x).powi(m as i32) * bessel_j(m, x)
            }
        }
        _ => {
            let nu = d as f64 / 2.0 - 1.0;
            if x < 2.0 * nu + 10.0 {
                normalized_series(nu, x)
            } else {
                // Forward recurrence from nu = -1/2 and 1/2; stable for x > nu.
                let mut lo = x.cos();
                let mut hi = sinc(x);
                let mut v = 0.5;
                while v < nu - 1e-12 {
                    let next = 4.0 * v * (v + 1.0) / (x * x) * (hi - lo);
                    lo = hi;
                    hi = next;
                    v += 1.0;
                }
                hi
            }
        }
    }
}

fn normalized_series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (nu + k));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > 1.0 {
            break;
        }
    }
    sum
}

/// Fourier transform of the uniform probability measure on the unit sphere of
/// `R^d`, as a function of the frequency radius `s`. Equals 1 at `s = 0`.
pub fn sphere_kernel(d: u32, s: f64) -> f64 {
    normalized_bessel(d, 2.0 * PI * s)
}

/// `d/ds sphere_kernel(d, s) = -(2 pi)^2 s sphere_kernel(d + 2, s) / d`.
pub fn sphere_kernel_deriv(d: u32, s: f64) -> f64 {
    -(2.0 * PI).powi(2) * s * sphere_kernel(d + 2, s) / d as f64
}

/// Upper bound for `sup_s |d^2/ds^2 sphere_kernel(d, s)|`: the kernel is the
/// mean of `cos(2 pi s u)` over a probability law on `[-1, 1]` with second
/// moment `1/d`.
pub fn sphere_kernel_curvature(d: u32) -> f64 {
    (2.0 * PI).powi(2) / d as f64
}

/// Upper bound for `sup_s |d/ds sphere_kernel(d, s)|`.
pub fn sphere_kernel_slope(d: u32) -> f64 {
    let per_x = match d {
        1 => 1.0,
        2 => 0.581_87,
        _ => 0.436_3,
    };
    2.0 * PI * per_x
}

/// Upper bound for `|d/ds sphere_kernel(d, s)|` over `s >= s0`.
pub fn sphere_kernel_slope_from(d: u32, s0: f64) -> f64 {
    let global = sphere_kernel_slope(d);
    if d == 3 && s0 > 0.0 {
        let u = 2.0 * PI * s0;
        global.min(2.0 * PI * (1.0 / u + 1.0 / (u * u)))
    } else {
        global
    }
}

/// Decay envelope `E(s) >= |sphere_kernel(d, s)|` valid for all `s > 0`, or
/// `None` in dimension 1 where the kernel does not decay.
pub fn sphere_kernel_envelope(d: u32, s: f64) -> Option<f64> {
    let x = 2.0 * PI * s;
    let e = match d {
        1 => return None,
        // |J_0(x)| <= sqrt(2 / (pi x))
        2 => (2.0 / (PI * x)).sqrt(),
        3 => 1.0 / x,
        _ => {
            let nu = d as f64 / 2.0 - 1.0;
            gamma_half(d) * (2.0 / x).powf(nu) * LANDAU_C * x.powf(-1.0 / 3.0)
        }
    };
    Some(e.min(1.0))
}

/// Exponent `g` with `sphere_kernel_envelope(d, s) = O(s^-g)`.
pub fn sphere_kernel_decay(d: u32) -> f64 {
    match d {
        1 => 0.0,
        2 | 3 => (d as f64 - 1.0) / 2.0,
        _ => d as f64 / 2.0 - 1.0 + 1.0 / 3.0,
    }
}

/// Riemann zeta at an even integer `2n`, `n >= 1`, by direct summation with an
/// integral tail.
pub fn zeta_even(n: u32) -> f64 {
    let p = 2 * n as i32;
    let cutoff = 64.0_f64;
    let mut s = 0.0;
    for k in (1..64).rev() {
        s += (k as f64).powi(-p);
    }
    // Euler-Maclaurin tail from 64.
    let pf = p as f64;
    s + cutoff.powi(1 - p) / (pf - 1.0) + 0.5 * cutoff.powi(-p) + pf / 12.0 * cutoff.powi(-p - 1)
        - pf * (pf + 1.0) * (pf + 2.0) / 720.0 * cutoff.powi(-p - 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with mpmath at 30 digits.
    const J0: [(f64, f64); 6] = [
        (0.5, 0.938_469_807_240_812_9),
        (2.404_825_557_695_773, 0.0),
        (5.0, -0.177_596_771_314_338_3),
        (10.0, -0.245_935_764_451_348_3),
        (30.0, -0.086_367_983_581_040_2),
        (100.0, 0.019_985_850_304_223_12),
    ];

    #[test]
    fn j0_matches_reference() {
        for (x, v) in J0 {
            assert!((bessel_j(0, x) - v).abs() < 1e-14, "J0({x})");
        }
    }

    #[test]
    fn j1_matches_reference() {
        let cases = [(1.0, 0.440_050_585_744_933_5), (8.0, 0.234_636_346_853_914_6), (40.0, 0.126_038_318_037_585_0)];
        for (x, v) in cases {
            assert!((bessel_j(1, x) - v).abs() < 1e-14, "J1({x})");
        }
    }

    #[test]
    fn bessel_branches_agree_at_switch_points() {
        for n in 0..4u32 {
            let x = 4.0;
            assert!((bessel_j_series(n, x) - bessel_j_trapezoid(n, x)).abs() < 1e-14);
            let x = 25.0 + (n * n) as f64;
            assert!((bessel_j_trapezoid(n, x) - bessel_j_hankel(n, x)).abs() < 1e-14);
        }
    }

    #[test]
    fn bessel_recurrence_holds() {
        for &x in &[0.7, 3.9, 4.1, 12.0, 26.0, 55.0] {
            let lhs = bessel_j(2, x);
            let rhs = 2.0 / x * bessel_j(1, x) - bessel_j(0, x);
            assert!((lhs - rhs).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn sphere_areas() {
        assert_eq!(sphere_area(0), 2.0);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        for k in 0..10 {
            let formula = 2.0 * PI.powf((k + 1) as f64 / 2.0) / gamma_half(k + 1);
            assert!((sphere_area(k) - formula).abs() < 1e-12 * formula);
        }
    }

    #[test]
    fn gamma_half_values() {
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(2), 1.0);
        assert!((gamma_half(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(8), 6.0);
    }

    #[test]
    fn kernel_low_dimensions() {
        for &s in &[0.0, 0.1, 0.37, 2.5, 11.0] {
            assert!((sphere_kernel(1, s) - (2.0 * PI * s).cos()).abs() < 1e-15);
            assert!((sphere_kernel(3, s) - sinc(2.0 * PI * s)).abs() < 1e-15);
        }
        assert_eq!(sphere_kernel(4, 0.0), 1.0);
        assert_eq!(sphere_kernel(5, 0.0), 1.0);
    }

    #[test]
    fn kernel_d5_closed_form() {
        // nu = 3/2: 3 (sin x - x cos x) / x^3
        for &x in &[0.3f64, 2.0, 9.0, 14.0, 40.0] {
            let expect = 3.0 * (x.sin() - x * x.cos()) / (x * x * x);
            assert!((normalized_bessel(5, x) - expect).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn kernel_d4_via_j1() {
        for &x in &[0.3, 7.9, 8.1, 30.0] {
            let expect = 2.0 * bessel_j(1, x) / x;
            assert!((normalized_bessel(4, x) - expect).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn slope_and_envelope_bounds_hold_on_grid() {
        for d in 1..=9u32 {
            let h = 1e-4;
            let mut s = h;
            while s < 6.0 {
                let slope = (sphere_kernel(d, s + h) - sphere_kernel(d, s)) / h;
                assert!(slope.abs() <= sphere_kernel_slope(d) * (1.0 + 1e-3), "d={d} s={s}");
                assert!(slope.abs() <= sphere_kernel_slope_from(d, s) * (1.0 + 1e-3) + 1e-6);
                if let Some(e) = sphere_kernel_envelope(d, s) {
                    assert!(sphere_kernel(d, s).abs() <= e * (1.0 + 1e-12), "d={d} s={s}");
                }
                s += 0.00731;
            }
        }
    }

    #[test]
    fn zeta_even_values() {
        assert!((zeta_even(1) - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta_even(2) - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta_even(10) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kernel_derivative_matches_difference() {
        for d in 1..=5 {
            for &s in &[0.0, 0.13, 0.7, 2.4, 9.1] {
                let h = 1e-6;
                let fd = (sphere_kernel(d, s + h) - sphere_kernel(d, s - h)) / (2.0 * h);
                assert!((sphere_kernel_deriv(d, s) - fd).abs() < 1e-6, "d={d} s={s}");
                assert!(sphere_kernel_deriv(d, s).abs() <= sphere_kernel_slope(d));
            }
        }
    }
}
