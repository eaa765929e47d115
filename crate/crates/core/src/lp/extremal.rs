use serde::{Deserialize, Serialize};
use std::path::Path;

use super::simplex::{self, Column, PivotRule, Problem, SimplexOptions, Status};
use crate::certificates::{
    verify_certificate, Certificate, CertificateReport, Contract, Family, NonnegCheck, VerifyOptions,
};
use crate::error::{Error, Result};
use crate::radial::{golden_max, Atom, RadialMeasure, Triple};
use crate::special::{sphere_area, sphere_kernel, sphere_kernel_curvature};

/// Masses below this count as zero when reading off support and clusters.
pub const MASS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpOptions {
    pub max_cut_rounds: usize,
    /// Allowed excess of `|mu^(t)| t^beta` over 1 at termination.
    pub violation_tol: f64,
    pub simplex_pivot_rule: PivotRule,
    pub freq_window: f64,
    pub max_cuts_per_round: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            max_cut_rounds: 20,
            violation_tol: 1e-7,
            simplex_pivot_rule: PivotRule::Dantzig,
            freq_window: 30.0,
            max_cuts_per_round: 16,
        }
    }
}

/// Masses on spheres of radii `radii`, subject to `|mu^(t_j)| <= t_j^-beta`
/// for each retained frequency and optionally `mu^(t) >= 0` on
/// `positive_freqs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpInstance {
    pub triple: Triple,
    pub radii: Vec<f64>,
    pub freq_constraints: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub positive_freqs: Vec<f64>,
    pub options: LpOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub triple: Triple,
    pub radii: Vec<f64>,
    pub masses: Vec<f64>,
    /// `sum m_i r_i^alpha`.
    pub objective: f64,
    /// Frequencies of the final two-sided rows.
    pub freqs: Vec<f64>,
    /// Signed multiplier per row of `freqs`; positive where the upper bound
    /// `mu^ = t^-beta` is active.
    pub duals: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub positive_freqs: Vec<f64>,
    /// Multipliers of the `mu^ >= 0` rows, all nonpositive.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub positive_duals: Vec<f64>,
    /// Multiplier of `sum m_i = 1`.
    pub eq_dual: f64,
    pub status: LpStatus,
    pub cut_rounds: usize,
    /// `max(sup |mu^(t)| t^beta - 1, 0)` over the window by continuous scan.
    pub max_violation: f64,
    /// `min mu^` over the window when positivity rows are present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_fourier: Option<f64>,
    pub converged: bool,
    pub pivots: usize,
}

impl LpSolution {
    /// `objective^beta`, the estimate of the sharp constant.
    pub fn constant_estimate(&self) -> f64 {
        self.objective.powf(self.triple.beta)
    }

    /// Nonzero masses as a radial measure.
    pub fn measure(&self) -> Result<RadialMeasure> {
        let atoms: Vec<Atom> = self
            .radii
            .iter()
            .zip(&self.masses)
            .filter(|(_, &m)| m > 0.0)
            .map(|(&radius, &mass)| Atom { radius, mass })
            .collect();
        RadialMeasure::atomic(self.triple.dim, atoms)
    }

    pub fn support_radius(&self) -> f64 {
        self.radii.iter().zip(&self.masses).filter(|(_, &m)| m > MASS_TOL).map(|(&r, _)| r).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string_pretty(self)
    }
}

/// Uniform radius grid on `[0, r_max]` and `initial_freqs` frequencies
/// uniform in `(0, freq_window]`.
pub fn build_instance(
    triple: Triple,
    r_max: f64,
    n_radii: usize,
    initial_freqs: usize,
    freq_window: f64,
) -> Result<LpInstance> {
    if n_radii < 2 {
        return Err(Error::Domain(format!("n_radii must be at least 2, got {n_radii}")));
    }
    if initial_freqs == 0 {
        return Err(Error::Domain("at least one initial frequency is needed".into()));
    }
    if !(r_max.is_finite() && r_max > 0.0 && freq_window.is_finite() && freq_window > 0.0) {
        return Err(Error::Domain("r_max and freq_window must be positive".into()));
    }
    let radii = (0..n_radii).map(|i| r_max * i as f64 / (n_radii - 1) as f64).collect();
    let freq_constraints = (1..=initial_freqs).map(|k| freq_window * k as f64 / initial_freqs as f64).collect();
    Ok(LpInstance {
        triple,
        radii,
        freq_constraints,
        positive_freqs: vec![],
        options: LpOptions { freq_window, ..LpOptions::default() },
    })
}

impl LpInstance {
    /// `r_max = 1`, 401 radii, 64 initial frequencies, window 30.
    pub fn default_for(triple: Triple) -> Result<Self> {
        build_instance(triple, 1.0, 401, 64, 30.0)
    }

    pub fn r_max(&self) -> f64 {
        self.radii.last().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(format!("invalid LP instance: {m}")));
        Triple::new(self.triple.alpha, self.triple.beta, self.triple.dim)?;
        if self.radii.len() < 2 || self.radii[0] < 0.0 || self.radii.iter().any(|r| !r.is_finite()) {
            return bad("need at least two finite nonnegative radii");
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return bad("radii must be strictly increasing");
        }
        if self.r_max() <= 0.0 {
            return bad("r_max must be positive");
        }
        if self.freq_constraints.is_empty() {
            return bad("no frequency constraints");
        }
        if self.freq_constraints.iter().chain(&self.positive_freqs).any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("frequencies must be positive");
        }
        let o = &self.options;
        if !(o.freq_window > 0.0 && o.violation_tol > 0.0 && o.max_cuts_per_round > 0) {
            return bad("window, violation tolerance and cuts per round must be positive");
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: LpInstance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

struct Round {
    masses: Vec<f64>,
    y: Vec<f64>,
    pivots: usize,
}

fn solve_lp(inst: &LpInstance, freqs: &[f64], pos: &[f64]) -> Result<std::result::Result<Round, LpStatus>> {
    let tr = inst.triple;
    let (nf, np) = (freqs.len(), pos.len());
    let mut rhs = vec![0.0; nf + np + 1];
    rhs[nf + np] = 1.0;
    let mut p = Problem::new(rhs);
    for &r in &inst.radii {
        let mut col: Vec<f64> = freqs.iter().chain(pos).map(|&t| sphere_kernel(tr.dim, r * t)).collect();
        col.push(1.0);
        p.push(Column::Dense(col), r.powf(tr.alpha), 0.0, f64::INFINITY);
    }
    for (j, &t) in freqs.iter().enumerate() {
        let u = t.powf(-tr.beta);
        p.push(Column::Unit { row: j, sign: -1.0 }, 0.0, -u, u);
    }
    for j in 0..np {
        p.push(Column::Unit { row: nf + j, sign: -1.0 }, 0.0, 0.0, f64::INFINITY);
    }
    let opts = SimplexOptions { pivot_rule: inst.options.simplex_pivot_rule, ..Default::default() };
    let out = simplex::solve(&p, &opts)?;
    match out.status {
        Status::Optimal => {}
        Status::Infeasible => return Ok(Err(LpStatus::Infeasible)),
        Status::IterationLimit => return Ok(Err(LpStatus::IterationLimit)),
        // masses are bounded by the equality row and costs are nonnegative
        Status::Unbounded => return Err(Error::Solver("LP reported unbounded".into())),
    }
    let n = inst.radii.len();
    let mut masses: Vec<f64> = out.x[..n].iter().map(|&m| m.max(0.0)).collect();
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    // the last nonzero mass absorbs the residue of the sequential sum, so the
    // sum is exactly 1 (1 - prefix is exact once prefix >= 1/2)
    if let Some(k) = masses.iter().rposition(|&m| m > 0.0) {
        let prefix: f64 = masses[..k].iter().sum();
        masses[k] = (1.0 - prefix).max(0.0);
        for _ in 0..64 {
            let s: f64 = masses.iter().sum();
            if s == 1.0 {
                break;
            }
            masses[k] = if s > 1.0 { masses[k].next_down() } else { masses[k].next_up() };
        }
    }
    Ok(Ok(Round { masses, y: out.y, pivots: out.pivots }))
}

fn incumbent(inst: &LpInstance, masses: &[f64]) -> Result<RadialMeasure> {
    let atoms: Vec<Atom> =
        inst.radii.iter().zip(masses).filter(|(_, &m)| m > 0.0).map(|(&radius, &mass)| Atom { radius, mass }).collect();
    RadialMeasure::atomic(inst.triple.dim, atoms)
}

/// Scan step fine enough for every atom of the grid.
fn scan_step(inst: &LpInstance, m: &RadialMeasure) -> f64 {
    m.scan_step().min(1.0 / (8.0 * inst.r_max()))
}

/// Local minima of `mu^` below `-tol`, most negative first.
fn negative_dips(m: &RadialMeasure, window: f64, step: f64, tol: f64) -> Result<Vec<(f64, f64)>> {
    let n = (window / step).ceil().max(2.0) as usize;
    let h = window / n as f64;
    let vals = (0..=n).map(|k| m.fourier_at(k as f64 * h)).collect::<Result<Vec<_>>>()?;
    let mut dips = Vec::new();
    for k in 1..=n {
        let right = if k < n { vals[k + 1] } else { f64::INFINITY };
        if vals[k] <= vals[k - 1] && vals[k] < right && vals[k] < -tol {
            let hi = if k < n { (k + 1) as f64 * h } else { window };
            let g = |t: f64| m.fourier_at(t).map(|v| -v).unwrap_or(f64::NEG_INFINITY);
            let (t, v) = golden_max(&g, (k - 1) as f64 * h, hi, k as f64 * h, 1e-10);
            dips.push((t, -v));
        }
    }
    dips.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(dips)
}

/// Greedy selection of up to `max` points at least `sep` apart and away from
/// existing rows.
fn pick_cuts(cands: &[f64], existing: &[f64], sep: f64, max: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &t in cands {
        if out.len() >= max {
            break;
        }
        if existing.iter().any(|&e| (e - t).abs() < 1e-9 * t.max(1.0)) || out.iter().any(|&o| (o - t).abs() < sep) {
            continue;
        }
        out.push(t);
    }
    out
}

fn run(instance: &LpInstance, positive: bool) -> Result<LpSolution> {
    instance.validate()?;
    let tr = instance.triple;
    let o = &instance.options;
    let window = o.freq_window;
    let sep = 0.5 / instance.r_max();
    let mut freqs = instance.freq_constraints.clone();
    let mut pos = instance.positive_freqs.clone();
    if positive && pos.is_empty() {
        pos = (1..=200).map(|k| window * k as f64 / 200.0).collect();
    }
    let mut pivots = 0;
    let mut rounds = 0;
    loop {
        let round = match solve_lp(instance, &freqs, &pos)? {
            Ok(r) => r,
            Err(status) => {
                return Ok(LpSolution {
                    triple: tr,
                    radii: instance.radii.clone(),
                    masses: vec![0.0; instance.radii.len()],
                    objective: f64::NAN,
                    freqs,
                    duals: vec![],
                    positive_freqs: pos,
                    positive_duals: vec![],
                    eq_dual: f64::NAN,
                    status,
                    cut_rounds: rounds,
                    max_violation: f64::NAN,
                    min_fourier: None,
                    converged: false,
                    pivots,
                })
            }
        };
        pivots += round.pivots;
        let m = incumbent(instance, &round.masses)?;
        let step = scan_step(instance, &m);
        let mut peaks = m.peaks(tr.beta, window, step, 1e-10, 0.0)?;
        peaks.sort_by(|a, b| b.weighted.total_cmp(&a.weighted));
        let max_violation = peaks.first().map_or(0.0, |p| (p.weighted - 1.0).max(0.0));
        let violated: Vec<f64> = peaks.iter().filter(|p| p.weighted > 1.0 + o.violation_tol).map(|p| p.t).collect();
        let (dips, min_fourier) = if positive {
            let d = negative_dips(&m, window, step, o.violation_tol)?;
            let lowest = d.first().map_or(0.0, |x| x.1.min(0.0));
            (d.into_iter().map(|x| x.0).collect::<Vec<_>>(), Some(lowest))
        } else {
            (vec![], None)
        };
        let done = violated.is_empty() && dips.is_empty();
        if done || rounds >= o.max_cut_rounds {
            let nf = freqs.len();
            let duals = round.y[..nf].iter().map(|y| -y).collect();
            let positive_duals = round.y[nf..nf + pos.len()].iter().map(|y| -y).collect();
            let objective = instance.radii.iter().zip(&round.masses).map(|(r, m)| m * r.powf(tr.alpha)).sum();
            return Ok(LpSolution {
                triple: tr,
                radii: instance.radii.clone(),
                masses: round.masses,
                objective,
                freqs,
                duals,
                positive_freqs: pos,
                positive_duals,
                eq_dual: round.y[round.y.len() - 1],
                status: LpStatus::Optimal,
                cut_rounds: rounds,
                max_violation,
                min_fourier,
                converged: done,
                pivots,
            });
        }
        let cuts = pick_cuts(&violated, &freqs, sep, o.max_cuts_per_round);
        let pcuts = pick_cuts(&dips, &pos, sep, o.max_cuts_per_round);
        freqs.extend(cuts);
        pos.extend(pcuts);
        rounds += 1;
    }
}

/// Solves the instance, adding violated frequency rows between rounds.
pub fn solve(instance: &LpInstance) -> Result<LpSolution> {
    run(instance, false)
}

/// As [`solve`], with the extra constraint `mu^ >= 0` enforced on a uniform
/// grid of the window and at the most negative dips of each incumbent.
pub fn solve_positive_fourier(instance: &LpInstance) -> Result<LpSolution> {
    run(instance, true)
}

/// Reads the dual certificate `H(x) = psi(x) + |x|^alpha - eq_dual` off the
/// row multipliers.
pub fn extract_certificate(solution: &LpSolution) -> Result<Certificate> {
    if solution.status != LpStatus::Optimal {
        return Err(Error::Solver("certificate needs an optimal solution".into()));
    }
    let d = solution.triple.dim;
    let all: Vec<(f64, f64)> = solution
        .freqs
        .iter()
        .zip(&solution.duals)
        .chain(solution.positive_freqs.iter().zip(&solution.positive_duals))
        .map(|(&t, &nu)| (t, nu))
        .collect();
    let scale = all.iter().map(|x| x.1.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Solver("all duals vanish; the discretization is degenerate".into()));
    }
    let terms = all
        .into_iter()
        .filter(|x| x.1.abs() > 1e-13 * scale)
        .map(|(t, nu)| (t, nu / (sphere_area(d - 1) * t.powi(d as i32 - 1))))
        .collect();
    Ok(Certificate {
        dim: d,
        alpha: solution.triple.alpha,
        terms,
        c_poly: 1.0,
        d_const: solution.eq_dual,
        tail_bound: 0.0,
        tail_decay: None,
        family: Family::FromLP,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    pub primal: f64,
    /// `eq_dual - sum |nu_j| t_j^-beta`.
    pub dual: f64,
    pub duality_gap: f64,
    /// `sum |nu_j| t_j^-beta - nu_j mu^(t_j)`, summed over all rows.
    pub slackness_i: f64,
    /// `sum m_i |H(r_i)|`.
    pub slackness_ii: f64,
    /// `1e-6 * objective`.
    pub tolerance: f64,
    pub passed: bool,
}

/// Strong duality and complementary slackness of the discretized problem.
pub fn duality_report(solution: &LpSolution, cert: &Certificate) -> Result<DualityReport> {
    let tr = solution.triple;
    let m = solution.measure()?;
    let primal = solution.radii.iter().zip(&solution.masses).map(|(r, w)| w * r.powf(tr.alpha)).sum::<f64>();
    let mut penalty = 0.0;
    let mut slack_i = 0.0;
    for (&t, &nu) in solution.freqs.iter().zip(&solution.duals) {
        let u = t.powf(-tr.beta);
        penalty += nu.abs() * u;
        slack_i += nu.abs() * u - nu * m.fourier_at(t)?;
    }
    for (&t, &nu) in solution.positive_freqs.iter().zip(&solution.positive_duals) {
        slack_i -= nu * m.fourier_at(t)?;
    }
    let dual = solution.eq_dual - penalty;
    let slack_ii = solution.radii.iter().zip(&solution.masses).map(|(&r, &w)| w * cert.h(r).abs()).sum::<f64>();
    let gap = (primal - dual).abs();
    let tolerance = 1e-6 * primal;
    Ok(DualityReport {
        primal,
        dual,
        duality_gap: gap,
        slackness_i: slack_i.abs(),
        slackness_ii: slack_ii,
        tolerance,
        passed: gap < tolerance && slack_i.abs() < tolerance && slack_ii < tolerance,
    })
}

/// Verifies the extracted certificate against the LP measure. `H >= 0` is
/// checked only on the radius grid and its midpoints, with a tolerance
/// covering the curvature of `H` between nodes.
pub fn check_certificate(solution: &LpSolution, cert: &Certificate) -> Result<CertificateReport> {
    let tr = solution.triple;
    let r = &solution.radii;
    let mut pts = r.clone();
    pts.extend(r.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let h = r.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let al = tr.alpha;
    let poly2 = if al >= 2.0 { al * (al - 1.0) * r[r.len() - 1].powf(al - 2.0) } else { 0.0 };
    let w = sphere_area(tr.dim - 1);
    let psi2: f64 = cert.terms.iter().map(|&(l, c)| c.abs() * w * l.powi(tr.dim as i32 + 1)).sum::<f64>()
        * sphere_kernel_curvature(tr.dim);
    let opts = VerifyOptions {
        tol_sampled: 1e-9 + (poly2 + psi2) * h * h / 8.0,
        tol_support: 1e-8,
        tol_lambda: 1e-8 + solution.max_violation,
        tol_sign: 1e-9,
        contract: if solution.positive_freqs.is_empty() { Contract::Standard } else { Contract::PositiveFourier },
        nonneg: NonnegCheck::Sampled(pts),
        sup_norm: Some(1.0),
        ..VerifyOptions::default()
    };
    verify_certificate(cert, &solution.measure()?, &tr, &opts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub lo: f64,
    pub hi: f64,
    /// Mass-weighted mean radius.
    pub center: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    pub clusters: Vec<Cluster>,
    pub cluster_count: usize,
    /// Mass of the heaviest cluster over the total.
    pub largest_cluster_fraction: f64,
    /// Mass carried by entries below the mass tolerance.
    pub unclustered_mass: f64,
    pub support_radius: f64,
    pub decay_exponent: f64,
    /// RMS residual of the log-log fit.
    pub decay_residual: f64,
    /// `beta` when `beta >= (d - 1) / 2`, else `(d - 1) / 2`.
    pub expected_exponent: f64,
    pub fit_range: (f64, f64),
    /// Whether the scan sees both `+sup` and `-sup` attained.
    pub both_signs_attained: bool,
}

/// Clusters of the masses (runs of positive entries at most two grid steps
/// apart), support radius, and the decay rate of `|mu^|` fitted over the last
/// decade of `window`.
pub fn structure_diagnostics(solution: &LpSolution, window: f64) -> Result<StructureReport> {
    let tr = solution.triple;
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    for (i, &mass) in solution.masses.iter().enumerate() {
        if mass <= MASS_TOL {
            continue;
        }
        match clusters.last_mut() {
            Some((_, hi)) if i - *hi <= 2 => *hi = i,
            _ => clusters.push((i, i)),
        }
    }
    let clusters: Vec<Cluster> = clusters
        .into_iter()
        .map(|(a, b)| {
            let (ms, rs) = (&solution.masses[a..=b], &solution.radii[a..=b]);
            let mass: f64 = ms.iter().sum();
            let center = ms.iter().zip(rs).map(|(m, r)| m * r).sum::<f64>() / mass;
            Cluster { lo: rs[0], hi: rs[rs.len() - 1], center, mass }
        })
        .collect();
    let total: f64 = solution.masses.iter().sum();
    let unclustered = solution.masses.iter().filter(|&&m| m <= MASS_TOL).sum();
    let largest = clusters.iter().map(|c| c.mass).fold(0.0, f64::max) / total;

    let m = solution.measure()?;
    let step = m.scan_step().min(0.01);
    let lo = window / 10.0;
    let peaks = m.peaks(0.0, window, step, 1e-10, 0.0)?;
    let (slope, residual) = envelope_fit(&peaks.iter().map(|p| (p.t, p.fourier.abs())).collect::<Vec<_>>(), lo, window);
    let weighted = m.peaks(tr.beta, window, step, 1e-10, 0.0)?;
    let top = weighted.iter().map(|p| p.weighted).fold(0.0, f64::max);
    let attained = |pos: bool| weighted.iter().any(|p| p.weighted >= top * (1.0 - 1e-6) && (p.fourier > 0.0) == pos);
    let half = (tr.dim as f64 - 1.0) / 2.0;
    Ok(StructureReport {
        cluster_count: clusters.len(),
        clusters,
        largest_cluster_fraction: largest,
        unclustered_mass: unclustered,
        support_radius: solution.support_radius(),
        decay_exponent: -slope,
        decay_residual: residual,
        expected_exponent: if tr.beta >= half { tr.beta } else { half },
        fit_range: (lo, window),
        both_signs_attained: attained(true) && attained(false),
    })
}

/// Least-squares slope of `log v` against `log t` over the bin maxima of 12
/// logarithmic bins of `[lo, hi]`.
fn envelope_fit(points: &[(f64, f64)], lo: f64, hi: f64) -> (f64, f64) {
    const BINS: usize = 12;
    let ratio = (hi / lo).ln() / BINS as f64;
    let mut best = [(0.0f64, 0.0f64); BINS];
    for &(t, v) in points {
        if t < lo || t > hi || v <= 0.0 {
            continue;
        }
        let b = (((t / lo).ln() / ratio) as usize).min(BINS - 1);
        if v > best[b].1 {
            best[b] = (t, v);
        }
    }
    let xy: Vec<(f64, f64)> = best.iter().filter(|p| p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if xy.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let rms = (xy.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    (slope, rms)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileReport {
    /// Fitted base radius of the triangle `(1 - r / r0)_+`.
    pub r0: f64,
    pub correlation: f64,
    pub smoothing: f64,
}

/// Correlation of the smoothed LP masses with a triangle profile, the base
/// radius fitted by maximizing the correlation. Atoms are mirrored through
/// the origin and smoothed by a triangular kernel of half-width `smoothing`.
pub fn profile_correlation(solution: &LpSolution, smoothing: f64) -> Result<ProfileReport> {
    if !(smoothing > 0.0) {
        return Err(Error::Domain("smoothing width must be positive".into()));
    }
    let supp = solution.support_radius();
    if supp <= 0.0 {
        return Err(Error::Domain("solution is concentrated at the origin".into()));
    }
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (&r, &m) in solution.radii.iter().zip(&solution.masses) {
        if m <= 0.0 {
            continue;
        }
        if r == 0.0 {
            pts.push((0.0, m));
        } else {
            pts.push((r, 0.5 * m));
            pts.push((-r, 0.5 * m));
        }
    }
    let xs: Vec<f64> = (0..300).map(|i| 1.2 * supp * i as f64 / 299.0).collect();
    let dens: Vec<f64> = xs
        .iter()
        .map(|&x| pts.iter().map(|&(r, m)| m * (1.0 - (x - r).abs() / smoothing).max(0.0) / smoothing).sum())
        .collect();
    let corr = |r0: f64| {
        let tri: Vec<f64> = xs.iter().map(|&x| (1.0 - x / r0).max(0.0)).collect();
        pearson(&dens, &tri)
    };
    let (r0, c) = golden_max(&corr, 0.5 * supp, 1.5 * supp, supp, 1e-8);
    Ok(ProfileReport { r0, correlation: c, smoothing })
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(triple: Triple) -> LpInstance {
        let mut inst = build_instance(triple, 1.0, 101, 32, 20.0).unwrap();
        inst.options.max_cut_rounds = 4;
        inst
    }

    #[test]
    fn instance_shape() {
        let inst = build_instance(Triple::new(2.0, 1.0, 1).unwrap(), 1.0, 201, 64, 12.0).unwrap();
        assert_eq!(inst.radii.len(), 201);
        assert_eq!(inst.freq_constraints.len(), 64);
        assert_eq!(inst.radii[0], 0.0);
        assert!(inst.freq_constraints.iter().all(|&t| t > 0.0));
        assert_eq!(*inst.freq_constraints.last().unwrap(), 12.0);
        assert!(build_instance(inst.triple, 1.0, 1, 4, 12.0).is_err());
    }

    #[test]
    fn instance_round_trip() {
        let inst = build_instance(Triple::new(2.0, 0.5, 3).unwrap(), 0.7, 11, 5, 9.0).unwrap();
        let back = LpInstance::from_json(&inst.to_json().unwrap()).unwrap();
        assert_eq!(back, inst);
        let mut bad = inst.clone();
        bad.radii.swap(2, 3);
        assert!(LpInstance::from_json(&bad.to_json().unwrap()).is_err());
    }

    #[test]
    fn small_solve_is_dual_consistent() {
        let inst = small(Triple::new(2.0, 1.0, 1).unwrap());
        let sol = solve(&inst).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.masses.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let cert = extract_certificate(&sol).unwrap();
        let rep = duality_report(&sol, &cert).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn perturbed_masses_break_slackness() {
        let inst = small(Triple::new(2.0, 1.0, 1).unwrap());
        let mut sol = solve(&inst).unwrap();
        let cert = extract_certificate(&sol).unwrap();
        let base = duality_report(&sol, &cert).unwrap().slackness_ii;
        let from = sol.masses.iter().position(|&m| m > 1e-3).unwrap();
        let to = sol.masses.len() - 1;
        sol.masses[from] -= 1e-3;
        sol.masses[to] += 1e-3;
        let bumped = duality_report(&sol, &cert).unwrap().slackness_ii;
        assert!(bumped > base + 1e-4, "{base} -> {bumped}");
    }

    #[test]
    fn envelope_fit_recovers_power() {
        let pts: Vec<(f64, f64)> = (1..200).map(|k| (k as f64 * 0.15, 3.0 * (k as f64 * 0.15).powf(-1.5))).collect();
        let (s, r) = envelope_fit(&pts, 3.0, 30.0);
        assert!((s + 1.5).abs() < 1e-12 && r < 1e-12);
    }
}
