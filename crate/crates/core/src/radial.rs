//! Radial measures on `R^d`, their Fourier transforms, and the functionals
//! entering the uncertainty ratio.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::{gl16, integrate};
use crate::special::{sinc, sphere_area, sphere_kernel, sphere_kernel_decay, sphere_kernel_envelope};

/// Exponents `(alpha, beta)` and dimension `d` of the functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub alpha: f64,
    pub beta: f64,
    pub dim: u32,
}

impl Triple {
    pub fn new(alpha: f64, beta: f64, dim: u32) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidTriple(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidTriple(format!("beta must be positive, got {beta}")));
        }
        if dim == 0 {
            return Err(Error::InvalidTriple("dimension must be at least 1".into()));
        }
        Ok(Triple { alpha, beta, dim })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.alpha, self.beta, self.dim)
    }
}

/// Closed-form measures with known transforms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Exemplar {
    /// Indicator of `[-1/2, 1/2]` on the line.
    Box,
    /// Tent `(1 - |x|)_+` on the line.
    Triangle,
    /// `|x|^-1` on the unit ball of `R^3`.
    InverseRadius3D,
    /// Surface measure of the unit sphere in `R^3`, total mass `4 pi`.
    UnitSphere3D,
}

impl Exemplar {
    pub const ALL: [Exemplar; 4] =
        [Exemplar::Box, Exemplar::Triangle, Exemplar::InverseRadius3D, Exemplar::UnitSphere3D];

    pub fn dim(self) -> u32 {
        match self {
            Exemplar::Box | Exemplar::Triangle => 1,
            Exemplar::InverseRadius3D | Exemplar::UnitSphere3D => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Exemplar::Box => "Box",
            Exemplar::Triangle => "Triangle",
            Exemplar::InverseRadius3D => "InverseRadius3D",
            Exemplar::UnitSphere3D => "UnitSphere3D",
        }
    }

    pub fn from_name(name: &str) -> Option<Exemplar> {
        Exemplar::ALL.into_iter().find(|e| e.name().eq_ignore_ascii_case(name))
    }

    fn fourier(self, t: f64) -> f64 {
        let t = t.abs();
        match self {
            Exemplar::Box => sinc(PI * t),
            Exemplar::Triangle => sinc(PI * t).powi(2),
            // (1 - cos 2 pi t) / (pi t^2), rewritten without cancellation
            Exemplar::InverseRadius3D => 2.0 * PI * sinc(PI * t).powi(2),
            // 2 sin(2 pi t) / t
            Exemplar::UnitSphere3D => 4.0 * PI * sinc(2.0 * PI * t),
        }
    }

    fn total_variation(self) -> f64 {
        match self {
            Exemplar::Box | Exemplar::Triangle => 1.0,
            Exemplar::InverseRadius3D => 2.0 * PI,
            Exemplar::UnitSphere3D => 4.0 * PI,
        }
    }

    fn moment(self, alpha: f64) -> f64 {
        match self {
            Exemplar::Box => 2f64.powf(-alpha) / (alpha + 1.0),
            Exemplar::Triangle => 2.0 / ((alpha + 1.0) * (alpha + 2.0)),
            Exemplar::InverseRadius3D => 4.0 * PI / (alpha + 2.0),
            Exemplar::UnitSphere3D => 4.0 * PI,
        }
    }

    fn support_radius(self) -> f64 {
        match self {
            Exemplar::Box => 0.5,
            _ => 1.0,
        }
    }

    /// `|mu^(t)| <= K t^-g` for all `t > 0`.
    fn decay(self) -> Decay {
        match self {
            Exemplar::Box => Decay { coef: 1.0 / PI, exponent: 1.0 },
            Exemplar::Triangle => Decay { coef: 1.0 / (PI * PI), exponent: 2.0 },
            Exemplar::InverseRadius3D => Decay { coef: 2.0 / PI, exponent: 2.0 },
            Exemplar::UnitSphere3D => Decay { coef: 2.0, exponent: 1.0 },
        }
    }

    /// Atomic or density representation with `n` grid nodes. Exact except for
    /// `InverseRadius3D`, whose `1/r` profile is interpolated on a geometric
    /// grid starting at `1e-7`.
    pub fn discretize(self, n: usize) -> RadialMeasure {
        let n = n.max(2);
        let uniform = |len: f64, f: &dyn Fn(f64) -> f64| -> DensityProfile {
            let radii: Vec<f64> = (0..n).map(|i| len * i as f64 / (n - 1) as f64).collect();
            let values = radii.iter().map(|&r| f(r)).collect();
            DensityProfile { radii, values }
        };
        let (atoms, density) = match self {
            Exemplar::Box => (vec![], Some(uniform(0.5, &|_| 1.0))),
            Exemplar::Triangle => (vec![], Some(uniform(1.0, &|r| 1.0 - r))),
            Exemplar::InverseRadius3D => {
                let r0: f64 = 1e-7;
                let q = (1.0 / r0).powf(1.0 / (n - 1) as f64);
                let mut radii: Vec<f64> = (0..n).map(|i| r0 * q.powi(i as i32)).collect();
                radii[n - 1] = 1.0;
                let values = radii.iter().map(|&r| 1.0 / r).collect();
                (vec![], Some(DensityProfile { radii, values }))
            }
            Exemplar::UnitSphere3D => (vec![Atom { radius: 1.0, mass: 4.0 * PI }], None),
        };
        RadialMeasure { dim: self.dim(), exemplar: None, atoms, density }
    }
}

/// `mass` times the uniform probability measure on the sphere of radius
/// `radius`; a point mass when `radius == 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub radius: f64,
    pub mass: f64,
}

/// Piecewise-linear radial profile `rho(r)`, zero outside the grid, taken as a
/// density with respect to Lebesgue measure on `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl DensityProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 2 {
            return Err(Error::InvalidMeasure("density needs at least two (radius, value) nodes".into()));
        }
        if radii.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("density contains a non-finite number".into()));
        }
        if radii[0] < 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidMeasure("density radii must be nonnegative and strictly increasing".into()));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidMeasure("density values must be nonnegative".into()));
        }
        Ok(DensityProfile { radii, values })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if r < self.radii[0] || r > self.radii[n - 1] {
            return 0.0;
        }
        let i = match self.radii.partition_point(|&x| x <= r) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (r0, r1) = (self.radii[i], self.radii[i + 1]);
        let w = (r - r0) / (r1 - r0);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.radii.windows(2).zip(self.values.windows(2)).map(|(r, v)| (r[0], r[1], v[0], v[1]))
    }

    /// `omega_{d-1} int rho(r) r^(d-1) w(r) dr`, segment by segment.
    fn radial_integral(&self, dim: u32, w: &dyn Fn(f64) -> f64, max_piece: f64, rel: f64) -> Result<f64> {
        let omega = sphere_area(dim - 1);
        let p = (dim - 1) as i32;
        let mut total = 0.0;
        for (a, b, va, vb) in self.segments() {
            if va == 0.0 && vb == 0.0 {
                continue;
            }
            let slope = (vb - va) / (b - a);
            let f = |r: f64| (va + slope * (r - a)) * r.powi(p) * w(r);
            let scale = va.max(vb) * b.powi(p) * (b - a);
            let n = ((b - a) / max_piece).ceil().max(1.0) as usize;
            let h = (b - a) / n as f64;
            for i in 0..n {
                let lo = a + i as f64 * h;
                let hi = if i + 1 == n { b } else { lo + h };
                // Pieces far below the oscillation scale are polynomial to
                // working precision and GL16 is already exact there.
                total += if max_piece.is_finite() && hi - lo <= 0.05 * max_piece {
                    gl16(&f, lo, hi)
                } else {
                    integrate(&f, lo, hi, rel * scale / n as f64 + 1e-300)?
                };
            }
        }
        Ok(omega * total)
    }

    fn total_variation(&self, dim: u32) -> f64 {
        // GL16 is exact for the degree-d polynomial integrand.
        self.radial_integral(dim, &|_| 1.0, f64::INFINITY, 1e-15).expect("polynomial integrand")
    }

    fn moment(&self, dim: u32, alpha: f64) -> f64 {
        self.radial_integral(dim, &|r| r.powf(alpha), f64::INFINITY, 1e-14)
            .expect("moment integrand is smooth on each segment")
    }

    fn fourier(&self, dim: u32, t: f64) -> Result<f64> {
        let piece = if t > 0.0 { 0.25 / t } else { f64::INFINITY };
        self.radial_integral(dim, &|r| sphere_kernel(dim, r * t), piece, 1e-13)
    }

    /// Bounds `|rho^(t)| <= K t^-g` available for this profile.
    fn decays(&self, dim: u32) -> Vec<Decay> {
        let mut out = Vec::new();
        let n = self.radii.len();
        let r0 = self.radii[0];
        match dim {
            1 => {
                // Variation of the even extension f(x) = rho(|x|), including
                // the jumps where the profile starts and stops.
                let jumps: f64 = self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
                let edge = self.values[n - 1] + if r0 > 0.0 { self.values[0] } else { 0.0 };
                let var_f = 2.0 * (jumps + edge);
                out.push(Decay { coef: var_f / (2.0 * PI), exponent: 1.0 });
                if edge == 0.0 {
                    let slopes: Vec<f64> = self.segments().map(|(a, b, va, vb)| (vb - va) / (b - a)).collect();
                    let kinks: f64 = slopes.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
                    let var_df = 2.0 * (kinks + slopes[slopes.len() - 1].abs()) + 2.0 * slopes[0].abs();
                    out.push(Decay { coef: var_df / (4.0 * PI * PI), exponent: 2.0 });
                }
            }
            _ => {
                if let Some((c, g)) = kernel_envelope_coef(dim) {
                    let k =
                        self.radial_integral(dim, &|r| c * r.powf(-g), f64::INFINITY, 1e-12).unwrap_or(f64::INFINITY);
                    if k.is_finite() {
                        out.push(Decay { coef: k, exponent: g });
                    }
                }
                if dim == 3 {
                    // mu^(t) = (2/t) int g(r) sin(2 pi r t) dr with g = r rho,
                    // so |mu^(t)| <= Var(g) / (pi t^2).
                    let mut var = if r0 > 0.0 { r0 * self.values[0] } else { 0.0 };
                    for (a, b, va, vb) in self.segments() {
                        let slope = (vb - va) / (b - a);
                        let g = |r: f64| r * (va + slope * (r - a));
                        let mut pts = vec![a, b];
                        if slope != 0.0 {
                            // vertex of r (va - slope a + slope r)
                            let v = -(va - slope * a) / (2.0 * slope);
                            if v > a && v < b {
                                pts.insert(1, v);
                            }
                        }
                        var += pts.windows(2).map(|w| (g(w[1]) - g(w[0])).abs()).sum::<f64>();
                    }
                    var += self.radii[n - 1] * self.values[n - 1];
                    out.push(Decay { coef: var / PI, exponent: 2.0 });
                }
            }
        }
        out
    }
}

/// `|Omega_d(s)| <= c s^-g`, as `(c, g)`; `None` for `d = 1`.
fn kernel_envelope_coef(dim: u32) -> Option<(f64, f64)> {
    let g = sphere_kernel_decay(dim);
    // The envelope is exactly c s^-g wherever it is below 1, so c is read off
    // at s = 1 after undoing the clamp.
    match dim {
        1 => None,
        2 => Some((1.0 / PI, g)),
        3 => Some((1.0 / (2.0 * PI), g)),
        _ => {
            let s = 1e6;
            sphere_kernel_envelope(dim, s).map(|e| (e * s.powf(g), g))
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Decay {
    coef: f64,
    exponent: f64,
}

impl Decay {
    /// `sup_{t >= w} K t^(beta - g)`, when finite.
    fn tail(self, beta: f64, window: f64) -> Option<f64> {
        (self.exponent >= beta).then(|| self.coef * window.powf(beta - self.exponent))
    }
}

/// A finite nonnegative radial measure.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialMeasure {
    dim: u32,
    exemplar: Option<Exemplar>,
    atoms: Vec<Atom>,
    density: Option<DensityProfile>,
}

/// Weighted Fourier sup-norm `sup_t |mu^(t)| t^beta` with its certificate data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupNormResult {
    pub value: f64,
    pub argmax_radius: f64,
    /// Frequency radii where `|mu^(t)| t^beta` is within the attainment
    /// tolerance of `value`.
    pub attained_set: Vec<f64>,
    /// Bound on `|mu^(t)| t^beta` for `t` beyond the window; infinite when no
    /// bound is available.
    pub truncation_bound: f64,
    pub tail_certified: bool,
    pub window: f64,
}

/// Local maximum of `|mu^(t)| t^beta` found by the scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub t: f64,
    pub fourier: f64,
    pub weighted: f64,
}

/// Attainment tolerance used for `SupNormResult::attained_set`.
pub const ATTAIN_REL_TOL: f64 = 1e-6;

impl RadialMeasure {
    pub fn exemplar(e: Exemplar) -> Self {
        RadialMeasure { dim: e.dim(), exemplar: Some(e), atoms: vec![], density: None }
    }

    pub fn from_parts(dim: u32, atoms: Vec<Atom>, density: Option<DensityProfile>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension must be at least 1".into()));
        }
        for a in &atoms {
            if !(a.radius.is_finite() && a.radius >= 0.0) {
                return Err(Error::InvalidMeasure(format!("atom radius {} is not a nonnegative number", a.radius)));
            }
            if !(a.mass.is_finite() && a.mass > 0.0) {
                return Err(Error::InvalidMeasure(format!("atom mass {} is not positive", a.mass)));
            }
        }
        if atoms.is_empty() && density.is_none() {
            return Err(Error::InvalidMeasure("measure has neither atoms nor density".into()));
        }
        let m = RadialMeasure { dim, exemplar: None, atoms, density };
        if m.total_variation() <= 0.0 {
            return Err(Error::InvalidMeasure("measure has zero mass".into()));
        }
        Ok(m)
    }

    pub fn atomic(dim: u32, atoms: Vec<Atom>) -> Result<Self> {
        Self::from_parts(dim, atoms, None)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn exemplar_tag(&self) -> Option<Exemplar> {
        self.exemplar
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&DensityProfile> {
        self.density.as_ref()
    }

    /// `mu^` at frequency radius `t`.
    pub fn fourier_at(&self, t: f64) -> Result<f64> {
        if let Some(e) = self.exemplar {
            return Ok(e.fourier(t));
        }
        let t = t.abs();
        let mut v: f64 = self.atoms.iter().map(|a| a.mass * sphere_kernel(self.dim, a.radius * t)).sum();
        if let Some(d) = &self.density {
            v += d.fourier(self.dim, t)?;
        }
        Ok(v)
    }

    pub fn total_variation(&self) -> f64 {
        if let Some(e) = self.exemplar {
            return e.total_variation();
        }
        let atoms: f64 = self.atoms.iter().map(|a| a.mass).sum();
        atoms + self.density.as_ref().map_or(0.0, |d| d.total_variation(self.dim))
    }

    /// `int |x|^alpha d mu`.
    pub fn moment(&self, alpha: f64) -> f64 {
        if let Some(e) = self.exemplar {
            return e.moment(alpha);
        }
        let atoms: f64 = self.atoms.iter().map(|a| a.mass * a.radius.powf(alpha)).sum();
        atoms + self.density.as_ref().map_or(0.0, |d| d.moment(self.dim, alpha))
    }

    /// Smallest `R` with the measure supported in the ball of radius `R`.
    pub fn support_radius(&self) -> f64 {
        if let Some(e) = self.exemplar {
            return e.support_radius();
        }
        let atoms = self.atoms.iter().map(|a| a.radius).fold(0.0, f64::max);
        let dens = self.density.as_ref().map_or(0.0, |d| {
            let n = d.radii.len();
            // trailing zero nodes carry no mass
            let last = (0..n).rev().find(|&i| d.values[i] > 0.0).map_or(0, |i| (i + 1).min(n - 1));
            d.radii[last]
        });
        atoms.max(dens)
    }

    /// Pushforward under `x -> x / scale`.
    pub fn dilate(&self, scale: f64) -> Result<RadialMeasure> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Domain(format!("dilation scale must be positive, got {scale}")));
        }
        let base = match self.exemplar {
            Some(e) => e.discretize(10_001),
            None => self.clone(),
        };
        let atoms = base.atoms.iter().map(|a| Atom { radius: a.radius / scale, mass: a.mass }).collect();
        let jac = scale.powi(self.dim as i32);
        let density = base.density.as_ref().map(|d| DensityProfile {
            radii: d.radii.iter().map(|r| r / scale).collect(),
            values: d.values.iter().map(|v| v * jac).collect(),
        });
        Ok(RadialMeasure { dim: self.dim, exemplar: None, atoms, density })
    }

    /// `sup_{t > w} |mu^(t)| t^beta` bound, or `None` if no decay estimate
    /// covers `beta`.
    pub fn tail_bound(&self, beta: f64, window: f64) -> Option<f64> {
        if let Some(e) = self.exemplar {
            return e.decay().tail(beta, window);
        }
        let mut total = 0.0;
        if !self.atoms.is_empty() {
            let (c, g) = kernel_envelope_coef(self.dim)?;
            if g < beta || self.atoms.iter().any(|a| a.radius == 0.0) {
                return None;
            }
            let k: f64 = self.atoms.iter().map(|a| a.mass * c * a.radius.powf(-g)).sum();
            total += Decay { coef: k, exponent: g }.tail(beta, window)?;
        }
        if let Some(d) = &self.density {
            total += d
                .decays(self.dim)
                .into_iter()
                .filter_map(|dc| dc.tail(beta, window))
                .fold(None, |best: Option<f64>, v| Some(best.map_or(v, |b| b.min(v))))?;
        }
        Some(total)
    }

    /// Default scan step: resolves oscillations at the support scale.
    pub fn scan_step(&self) -> f64 {
        let r = self.support_radius();
        if r > 0.0 {
            0.01f64.min(1.0 / (8.0 * r))
        } else {
            0.01
        }
    }

    /// Local maxima of `|mu^(t)| t^beta` on `(0, window]`, sampled with step
    /// `step` and refined by golden-section search when within `refine_frac`
    /// of the largest sample.
    pub fn peaks(&self, beta: f64, window: f64, step: f64, rel_tol: f64, refine_frac: f64) -> Result<Vec<Peak>> {
        let n = (window / step).ceil().max(2.0) as usize;
        let h = window / n as f64;
        let weighted = |t: f64| -> Result<(f64, f64)> {
            let f = self.fourier_at(t)?;
            Ok((f, f.abs() * t.powf(beta)))
        };
        let mut samples = Vec::with_capacity(n + 1);
        samples.push(0.0);
        for k in 1..=n {
            samples.push(weighted(k as f64 * h)?.1);
        }
        let top = samples.iter().cloned().fold(0.0, f64::max);
        let mut peaks = Vec::new();
        for k in 1..=n {
            let g = samples[k];
            let left = samples[k - 1];
            let right = if k < n { samples[k + 1] } else { f64::NEG_INFINITY };
            if !(g >= left && g > right) || g < refine_frac * top {
                continue;
            }
            let lo = (k - 1) as f64 * h;
            let hi = if k < n { (k + 1) as f64 * h } else { window };
            let (t, _) =
                golden_max(&|t| weighted(t).map(|v| v.1).unwrap_or(f64::NEG_INFINITY), lo, hi, k as f64 * h, rel_tol);
            let (f, w) = weighted(t)?;
            peaks.push(Peak { t, fourier: f, weighted: w });
        }
        Ok(peaks)
    }

    /// Scans `|mu^(t)| t^beta` over `(0, window]`. Returns the scanned maximum
    /// even when the tail beyond the window cannot be certified; inspect
    /// `tail_certified`.
    pub fn scan_sup_norm(&self, beta: f64, window: f64, rel_tol: f64) -> Result<SupNormResult> {
        if !(beta > 0.0 && window > 0.0 && rel_tol > 0.0) {
            return Err(Error::Domain("beta, window and rel_tol must be positive".into()));
        }
        let peaks = self.peaks(beta, window, self.scan_step(), rel_tol, 0.7)?;
        let best = peaks.iter().cloned().fold(Peak { t: 0.0, fourier: 0.0, weighted: 0.0 }, |b, p| {
            if p.weighted > b.weighted {
                p
            } else {
                b
            }
        });
        let attained_set: Vec<f64> =
            peaks.iter().filter(|p| p.weighted >= best.weighted * (1.0 - ATTAIN_REL_TOL)).map(|p| p.t).collect();
        let tail = self.tail_bound(beta, window);
        let truncation_bound = tail.unwrap_or(f64::INFINITY);
        Ok(SupNormResult {
            value: best.weighted,
            argmax_radius: attained_set.first().copied().unwrap_or(best.t),
            attained_set,
            truncation_bound,
            tail_certified: truncation_bound <= best.weighted * (1.0 + 1e-9),
            window,
        })
    }

    /// Certified weighted sup-norm over all frequencies.
    pub fn weighted_sup_norm(&self, beta: f64, window: f64, rel_tol: f64) -> Result<SupNormResult> {
        if self.tail_bound(beta, window).is_none() {
            return Err(Error::NoDecayBound);
        }
        let r = self.scan_sup_norm(beta, window, rel_tol)?;
        if !r.tail_certified {
            return Err(Error::WindowTooSmall { window, bound: r.truncation_bound, value: r.value });
        }
        Ok(r)
    }

    /// Window used when none is supplied: forty oscillations of the outermost
    /// sphere, at least 20.
    pub fn default_window(&self) -> f64 {
        let r = self.support_radius();
        if r > 0.0 {
            (40.0 / r).max(20.0)
        } else {
            20.0
        }
    }

    /// Certified sup-norm, doubling the window until the tail bound is below
    /// the scanned maximum.
    pub fn sup_norm_auto(&self, beta: f64) -> Result<SupNormResult> {
        let mut window = self.default_window();
        let mut last = None;
        for _ in 0..5 {
            match self.weighted_sup_norm(beta, window, 1e-11) {
                Err(e @ Error::WindowTooSmall { .. }) => {
                    last = Some(e);
                    window *= 2.0;
                }
                other => return other,
            }
        }
        Err(last.expect("loop ran"))
    }

    /// The uncertainty functional; `+inf` when the weighted sup-norm has no
    /// decay bound, as happens for atoms on the line or `beta` beyond the
    /// decay rate.
    pub fn functional(&self, triple: &Triple) -> Result<f64> {
        if triple.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: triple.dim, found: self.dim });
        }
        let s = match self.sup_norm_auto(triple.beta) {
            Ok(r) => r.value,
            Err(Error::NoDecayBound) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        };
        Ok(compose(s, self.moment(triple.alpha), self.total_variation(), triple))
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string_pretty(&MeasureFile::from(self))
    }

    pub fn from_json(text: &str) -> Result<RadialMeasure> {
        let f: MeasureFile = serde_json::from_str(text)?;
        f.into_measure()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RadialMeasure> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// `S^alpha M^beta / TV^(alpha + beta)`.
pub fn compose(sup: f64, moment: f64, tv: f64, triple: &Triple) -> f64 {
    let (a, b) = (triple.alpha, triple.beta);
    sup.powf(a) * moment.powf(b) / tv.powf(a + b)
}

/// Maximizes `g` on `[a, b]` by golden-section search started from the sample
/// at `t0`. Returns the best point seen.
pub fn golden_max(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, t0: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = (t0, g(t0));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for (t, v) in [(c, gc), (d, gd)] {
        if v > best.1 {
            best = (t, v);
        }
    }
    while b - a > rel_tol * b.abs().max(1e-300) {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
            if gc > best.1 {
                best = (c, gc);
            }
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
            if gd > best.1 {
                best = (d, gd);
            }
        }
    }
    best
}

/// On-disk form of a measure (`.measure.json`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureFile {
    pub dim: u32,
    #[serde(default)]
    pub exemplar: Option<String>,
    #[serde(default)]
    pub atoms: Vec<[f64; 2]>,
    #[serde(default)]
    pub density: Option<Vec<[f64; 2]>>,
}

impl From<&RadialMeasure> for MeasureFile {
    fn from(m: &RadialMeasure) -> Self {
        MeasureFile {
            dim: m.dim,
            exemplar: m.exemplar.map(|e| e.name().to_string()),
            atoms: m.atoms.iter().map(|a| [a.radius, a.mass]).collect(),
            density: Some(
                m.density
                    .as_ref()
                    .map(|d| d.radii.iter().zip(&d.values).map(|(&r, &v)| [r, v]).collect())
                    .unwrap_or_default(),
            ),
        }
    }
}

impl MeasureFile {
    pub fn into_measure(self) -> Result<RadialMeasure> {
        let density = self.density.unwrap_or_default();
        if let Some(name) = self.exemplar {
            let e = Exemplar::from_name(&name)
                .ok_or_else(|| Error::InvalidMeasure(format!("unknown exemplar {name:?}")))?;
            if !self.atoms.is_empty() || !density.is_empty() {
                return Err(Error::InvalidMeasure("an exemplar measure cannot also list atoms or density".into()));
            }
            if e.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: e.dim(), found: self.dim });
            }
            return Ok(RadialMeasure::exemplar(e));
        }
        let atoms = self.atoms.iter().map(|&[radius, mass]| Atom { radius, mass }).collect();
        let density = if density.is_empty() {
            None
        } else {
            let (radii, values) = density.iter().map(|&[r, v]| (r, v)).unzip();
            Some(DensityProfile::new(radii, values)?)
        };
        RadialMeasure::from_parts(self.dim, atoms, density)
    }
}
