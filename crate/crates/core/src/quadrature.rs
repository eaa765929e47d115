//! Gauss-Legendre quadrature with adaptive bisection.

use crate::error::{Error, Result};

const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];

const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_082,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

const MAX_DEPTH: u32 = 60;

/// 16-point Gauss-Legendre rule on `[a, b]`; exact for polynomials of degree 31.
pub fn gl16<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..8 {
        let dx = h * GL16_X[i];
        s += GL16_W[i] * (f(c - dx) + f(c + dx));
    }
    s * h
}

/// Adaptive integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let whole = gl16(f, a, b);
    refine(f, a, b, whole, tol, 0)
}

/// Integral over `[a, b]` pre-split into pieces no longer than `max_piece`,
/// each refined adaptively. Suits oscillatory integrands where `max_piece`
/// is a fraction of the period.
pub fn integrate_pieces<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, max_piece: f64, tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let n = ((b - a) / max_piece).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let piece_tol = tol / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == n { b } else { lo + h };
        total += integrate(f, lo, hi, piece_tol)?;
    }
    Ok(total)
}

fn refine<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = gl16(f, a, m);
    let right = gl16(f, m, b);
    let both = left + right;
    let diff = (both - whole).abs();
    // below rounding noise further splitting cannot help
    let noise = 8.0 * f64::EPSILON * (left.abs() + right.abs());
    if diff <= tol || diff <= noise || (b - a) <= 1e-12 * a.abs().max(b.abs()).max(1.0) {
        return Ok(both);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureNonConvergence { a, b });
    }
    Ok(refine(f, a, m, left, 0.5 * tol, depth + 1)? + refine(f, m, b, right, 0.5 * tol, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = GL16_W.iter().sum::<f64>() * 2.0;
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_degree_31() {
        let v = gl16(&|x: f64| x.powi(30) + x.powi(31), 0.0, 1.0);
        assert!((v - (1.0 / 31.0 + 1.0 / 32.0)).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = integrate(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_pieces() {
        let w = 200.0;
        let v = integrate_pieces(&|x: f64| (w * x).cos(), 0.0, 1.0, PI / (2.0 * w), 1e-14).unwrap();
        assert!((v - w.sin() / w).abs() < 1e-13);
    }
}
