//! Dense bounded-variable revised simplex.
//!
//! Solves `min c.x` subject to `A x = b`, `l <= x <= u` with finite lower
//! bounds. Phase 1 starts from one artificial column per row; the basis
//! inverse is kept explicitly, updated in product form and rebuilt from
//! scratch at a fixed pivot interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A constraint column.
#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Dense(Vec<f64>),
    /// `sign * e_row`.
    Unit {
        row: usize,
        sign: f64,
    },
}

impl Column {
    fn dot(&self, y: &[f64]) -> f64 {
        match self {
            Column::Dense(v) => v.iter().zip(y).map(|(a, b)| a * b).sum(),
            Column::Unit { row, sign } => sign * y[*row],
        }
    }

    fn add_to(&self, out: &mut [f64], scale: f64) {
        match self {
            Column::Dense(v) => out.iter_mut().zip(v).for_each(|(o, a)| *o += scale * a),
            Column::Unit { row, sign } => out[*row] += scale * sign,
        }
    }
}

/// `min cost.x` s.t. `sum_k x_k col_k = rhs`, `lower <= x <= upper`.
#[derive(Clone, Debug, Default)]
pub struct Problem {
    pub rhs: Vec<f64>,
    pub cols: Vec<Column>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Problem {
    pub fn new(rhs: Vec<f64>) -> Self {
        Problem { rhs, ..Default::default() }
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    /// Appends a column and returns its index.
    pub fn push(&mut self, col: Column, cost: f64, lower: f64, upper: f64) -> usize {
        self.cols.push(col);
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cols.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PivotRule {
    /// Most negative reduced cost, switching to Bland's rule while stalled.
    Dantzig,
    /// Lowest eligible index throughout.
    Bland,
}

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    pub pivot_rule: PivotRule,
    pub refactor_every: usize,
    /// Consecutive degenerate pivots before falling back to Bland's rule.
    pub stall_threshold: usize,
    pub max_pivots: usize,
    pub feas_tol: f64,
    pub opt_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            pivot_rule: PivotRule::Dantzig,
            refactor_every: 64,
            stall_threshold: 50,
            max_pivots: 200_000,
            feas_tol: 1e-10,
            opt_tol: 1e-11,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub x: Vec<f64>,
    /// Row duals `y = c_B B^-1`.
    pub y: Vec<f64>,
    /// `c - y A` for every column.
    pub reduced: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum State {
    Basic,
    Lower,
    Upper,
}

struct Solver<'a> {
    p: &'a Problem,
    opts: &'a SimplexOptions,
    m: usize,
    /// Structural columns followed by one artificial per row.
    art_sign: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
}

impl<'a> Solver<'a> {
    fn n(&self) -> usize {
        self.p.cols.len()
    }

    fn col_dot(&self, k: usize, y: &[f64]) -> f64 {
        if k < self.n() {
            self.p.cols[k].dot(y)
        } else {
            self.art_sign[k - self.n()] * y[k - self.n()]
        }
    }

    fn col_add(&self, k: usize, out: &mut [f64], scale: f64) {
        if k < self.n() {
            self.p.cols[k].add_to(out, scale)
        } else {
            out[k - self.n()] += scale * self.art_sign[k - self.n()];
        }
    }

    /// `B^-1 a_k`.
    fn ftran(&self, k: usize) -> Vec<f64> {
        let m = self.m;
        let mut w = vec![0.0; m];
        let inv = &self.binv;
        if k >= self.n() {
            let r = k - self.n();
            let s = self.art_sign[r];
            for (i, wi) in w.iter_mut().enumerate() {
                *wi = s * inv[i * m + r];
            }
            return w;
        }
        match &self.p.cols[k] {
            Column::Unit { row, sign } => {
                for (i, wi) in w.iter_mut().enumerate() {
                    *wi = sign * inv[i * m + row];
                }
            }
            Column::Dense(a) => {
                for (i, wi) in w.iter_mut().enumerate() {
                    let r = &inv[i * m..(i + 1) * m];
                    *wi = r.iter().zip(a).map(|(p, q)| p * q).sum();
                }
            }
        }
        w
    }

    /// Rebuilds `B^-1` by Gauss-Jordan elimination with partial pivoting and
    /// recomputes the basic values.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        let mut col = vec![0.0; m];
        for (j, &k) in self.basis.iter().enumerate() {
            col.iter_mut().for_each(|v| *v = 0.0);
            self.col_add(k, &mut col, 1.0);
            for i in 0..m {
                b[i * m + j] = col[i];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let piv =
                (c..m).max_by(|&i, &j| b[i * m + c].abs().total_cmp(&b[j * m + c].abs())).expect("nonempty range");
            if b[piv * m + c].abs() < 1e-13 {
                return Err(Error::Solver("singular basis during refactorization".into()));
            }
            if piv != c {
                for j in 0..m {
                    b.swap(piv * m + j, c * m + j);
                    inv.swap(piv * m + j, c * m + j);
                }
            }
            let d = b[c * m + c];
            for j in 0..m {
                b[c * m + j] /= d;
                inv[c * m + j] /= d;
            }
            for i in 0..m {
                if i == c {
                    continue;
                }
                let f = b[i * m + c];
                if f != 0.0 {
                    for j in 0..m {
                        b[i * m + j] -= f * b[c * m + j];
                        inv[i * m + j] -= f * inv[c * m + j];
                    }
                }
            }
        }
        self.binv = inv;
        self.since_refactor = 0;
        self.recompute_basic();
        Ok(())
    }

    fn recompute_basic(&mut self) {
        let m = self.m;
        let mut r = self.p.rhs.clone();
        for k in 0..self.n() + m {
            if self.state[k] != State::Basic && self.x[k] != 0.0 {
                self.col_add(k, &mut r, -self.x[k]);
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.x[self.basis[i]] = row.iter().zip(&r).map(|(a, b)| a * b).sum();
        }
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &k) in self.basis.iter().enumerate() {
            let c = cost[k];
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                y.iter_mut().zip(row).for_each(|(yj, r)| *yj += c * r);
            }
        }
        y
    }

    /// Runs the simplex on `cost` until optimal or out of pivots.
    fn run(&mut self, cost: &[f64]) -> Result<Status> {
        let total = self.n() + self.m;
        let mut degenerate = 0usize;
        loop {
            if self.pivots >= self.opts.max_pivots {
                return Ok(Status::IterationLimit);
            }
            let y = self.duals(cost);
            let bland = self.opts.pivot_rule == PivotRule::Bland || degenerate >= self.opts.stall_threshold;
            let mut enter: Option<(usize, f64, f64)> = None;
            for k in 0..total {
                let s = self.state[k];
                if s == State::Basic || self.upper[k] <= self.lower[k] {
                    continue;
                }
                let d = cost[k] - self.col_dot(k, &y);
                let dir = match s {
                    State::Lower if d < -self.opts.opt_tol => 1.0,
                    State::Upper if d > self.opts.opt_tol => -1.0,
                    _ => continue,
                };
                if bland {
                    enter = Some((k, d, dir));
                    break;
                }
                if enter.map_or(true, |(_, best, _)| d.abs() > best.abs()) {
                    enter = Some((k, d, dir));
                }
            }
            let Some((q, _, dir)) = enter else {
                return Ok(Status::Optimal);
            };
            let w = self.ftran(q);

            // Harris two-pass ratio test on x_B - dir * theta * w.
            let tol = self.opts.feas_tol;
            let mut relaxed = f64::INFINITY;
            for i in 0..self.m {
                let k = self.basis[i];
                let delta = -dir * w[i];
                if delta < -1e-11 {
                    relaxed = relaxed.min((self.x[k] - self.lower[k] + tol) / -delta);
                } else if delta > 1e-11 && self.upper[k].is_finite() {
                    relaxed = relaxed.min((self.upper[k] - self.x[k] + tol) / delta);
                }
            }
            let flip = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, f64)> = None;
            if relaxed.is_finite() {
                let mut best_w = 0.0;
                for i in 0..self.m {
                    let k = self.basis[i];
                    let delta = -dir * w[i];
                    let theta = if delta < -1e-11 {
                        (self.x[k] - self.lower[k]) / -delta
                    } else if delta > 1e-11 && self.upper[k].is_finite() {
                        (self.upper[k] - self.x[k]) / delta
                    } else {
                        continue;
                    };
                    if theta <= relaxed && w[i].abs() > best_w {
                        best_w = w[i].abs();
                        leave = Some((i, theta.max(0.0)));
                    }
                }
            }
            let theta = match leave {
                Some((_, t)) if t < flip => t,
                _ if flip.is_finite() => flip,
                _ => return Ok(Status::Unbounded),
            };
            let flipped = leave.map_or(true, |(_, t)| flip <= t);

            self.x[q] += dir * theta;
            for i in 0..self.m {
                let k = self.basis[i];
                self.x[k] -= dir * theta * w[i];
            }
            if flipped {
                self.state[q] = if dir > 0.0 { State::Upper } else { State::Lower };
                self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
            } else {
                let (r, _) = leave.expect("leaving row chosen");
                let out = self.basis[r];
                let to_lower = -dir * w[r] < 0.0;
                self.state[out] = if to_lower { State::Lower } else { State::Upper };
                self.x[out] = if to_lower { self.lower[out] } else { self.upper[out] };
                self.basis[r] = q;
                self.state[q] = State::Basic;
                self.pivot_inverse(r, &w);
                self.since_refactor += 1;
            }
            self.pivots += 1;
            degenerate = if theta <= 1e-12 { degenerate + 1 } else { 0 };
            if self.since_refactor >= self.opts.refactor_every {
                self.refactor()?;
            }
        }
    }

    fn pivot_inverse(&mut self, r: usize, w: &[f64]) {
        let m = self.m;
        let pr = w[r];
        for j in 0..m {
            self.binv[r * m + j] /= pr;
        }
        let (head, rest) = self.binv.split_at_mut(r * m);
        let (prow, tail) = rest.split_at_mut(m);
        for (i, row) in head.chunks_mut(m).chain(tail.chunks_mut(m)).enumerate() {
            let wi = if i < r { w[i] } else { w[i + 1] };
            if wi != 0.0 {
                row.iter_mut().zip(prow.iter()).for_each(|(a, b)| *a -= wi * b);
            }
        }
    }
}

/// Solves `p` by the two-phase bounded simplex.
pub fn solve(p: &Problem, opts: &SimplexOptions) -> Result<Outcome> {
    let m = p.rows();
    let n = p.cols.len();
    if p.cost.len() != n || p.lower.len() != n || p.upper.len() != n {
        return Err(Error::Solver("column data lengths disagree".into()));
    }
    for k in 0..n {
        if !p.lower[k].is_finite() || p.upper[k] < p.lower[k] {
            return Err(Error::Solver(format!("column {k} needs a finite lower bound not above its upper bound")));
        }
        if let Column::Dense(v) = &p.cols[k] {
            if v.len() != m {
                return Err(Error::Solver(format!("column {k} has {} entries for {m} rows", v.len())));
            }
        }
    }

    let mut x = p.lower.clone();
    x.extend(std::iter::repeat(0.0).take(m));
    let mut resid = p.rhs.clone();
    for k in 0..n {
        if x[k] != 0.0 {
            p.cols[k].add_to(&mut resid, -x[k]);
        }
    }
    let art_sign: Vec<f64> = resid.iter().map(|&r| if r < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut lower = p.lower.clone();
    let mut upper = p.upper.clone();
    for r in &resid {
        lower.push(0.0);
        // rows already satisfied keep a fixed artificial
        upper.push(if *r == 0.0 { 0.0 } else { f64::INFINITY });
    }
    let mut state = vec![State::Lower; n];
    state.extend(std::iter::repeat(State::Basic).take(m));
    let mut s = Solver {
        p,
        opts,
        m,
        art_sign,
        lower,
        upper,
        x,
        state,
        basis: (n..n + m).collect(),
        binv: vec![],
        pivots: 0,
        since_refactor: 0,
    };
    s.refactor()?;

    let mut phase1 = vec![0.0; n];
    phase1.extend(std::iter::repeat(1.0).take(m));
    let st = s.run(&phase1)?;
    let infeas: f64 = (n..n + m).map(|k| s.x[k].abs()).sum();
    let scale = 1.0 + p.rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if st == Status::Optimal && infeas > 1e-8 * scale {
        return Ok(outcome(&s, Status::Infeasible, &phase1));
    }
    if st != Status::Optimal {
        return Ok(outcome(&s, st, &phase1));
    }
    for k in n..n + m {
        s.upper[k] = 0.0;
        if s.state[k] != State::Basic {
            s.x[k] = 0.0;
        }
    }
    s.refactor()?;

    let mut cost = p.cost.clone();
    cost.extend(std::iter::repeat(0.0).take(m));
    let st = s.run(&cost)?;
    s.refactor()?;
    Ok(outcome(&s, st, &cost))
}

fn outcome(s: &Solver<'_>, status: Status, cost: &[f64]) -> Outcome {
    let n = s.n();
    let y = s.duals(cost);
    let reduced = (0..n).map(|k| cost[k] - s.col_dot(k, &y)).collect();
    let x: Vec<f64> = s.x[..n].to_vec();
    let objective = x.iter().zip(&s.p.cost).map(|(a, b)| a * b).sum();
    Outcome { status, x, y, reduced, objective, pivots: s.pivots }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(v: &[f64]) -> Column {
        Column::Dense(v.to_vec())
    }

    #[test]
    fn small_lp_with_known_optimum() {
        // min -x - 2y  s.t. x + y + s1 = 4, x + 3y + s2 = 6, x <= 3
        let mut p = Problem::new(vec![4.0, 6.0]);
        p.push(dense(&[1.0, 1.0]), -1.0, 0.0, 3.0);
        p.push(dense(&[1.0, 3.0]), -2.0, 0.0, f64::INFINITY);
        p.push(Column::Unit { row: 0, sign: 1.0 }, 0.0, 0.0, f64::INFINITY);
        p.push(Column::Unit { row: 1, sign: 1.0 }, 0.0, 0.0, f64::INFINITY);
        let out = solve(&p, &SimplexOptions::default()).unwrap();
        assert_eq!(out.status, Status::Optimal);
        assert!((out.x[0] - 3.0).abs() < 1e-12 && (out.x[1] - 1.0).abs() < 1e-12);
        assert!((out.objective + 5.0).abs() < 1e-12);
        // dual objective y.b + upper-bound contributions equals the primal
        let dual = out.y[0] * 4.0 + out.y[1] * 6.0 + out.reduced[0] * 3.0;
        assert!((dual - out.objective).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasibility() {
        // x + y = -1 with x, y >= 0
        let mut p = Problem::new(vec![-1.0]);
        p.push(dense(&[1.0]), 1.0, 0.0, f64::INFINITY);
        p.push(dense(&[1.0]), 1.0, 0.0, f64::INFINITY);
        assert_eq!(solve(&p, &SimplexOptions::default()).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn detects_unboundedness() {
        // min -x s.t. x - y = 0
        let mut p = Problem::new(vec![0.0]);
        p.push(dense(&[1.0]), -1.0, 0.0, f64::INFINITY);
        p.push(dense(&[-1.0]), 0.0, 0.0, f64::INFINITY);
        assert_eq!(solve(&p, &SimplexOptions::default()).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn bland_and_dantzig_agree() {
        let mut p = Problem::new(vec![1.0, 0.0, 0.0]);
        let t = [0.7, 1.9];
        for i in 0..30 {
            let r = i as f64 / 29.0;
            let c = vec![1.0, (6.0 * r * t[0]).cos(), (6.0 * r * t[1]).cos()];
            p.push(Column::Dense(c), r * r, 0.0, f64::INFINITY);
        }
        for (j, tj) in t.iter().enumerate() {
            p.push(Column::Unit { row: j + 1, sign: -1.0 }, 0.0, -tj.powf(-1.0) * 0.5, tj.powf(-1.0) * 0.5);
        }
        let a = solve(&p, &SimplexOptions::default()).unwrap();
        let b = solve(&p, &SimplexOptions { pivot_rule: PivotRule::Bland, ..Default::default() }).unwrap();
        assert_eq!(a.status, Status::Optimal);
        assert!((a.objective - b.objective).abs() < 1e-12);
    }
}
