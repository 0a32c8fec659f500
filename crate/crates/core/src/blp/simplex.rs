//! Dense two-phase primal simplex with bounded variables.
//!
//! Variables carry finite lower bounds and possibly infinite upper bounds;
//! nonbasic variables sit at one of their bounds and the ratio test includes
//! bound flips. Entering columns are chosen by largest reduced cost, falling
//! back to Bland's smallest-index rule after a degenerate pivot so the method
//! cannot cycle. Row duals are read off the artificial columns, which are kept
//! in the tableau (fixed at zero) during phase two.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

/// `min cost . x` subject to `rows` and `lower <= x <= upper`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, kind: RowKind, rhs: f64) {
        self.rows.push(Row { coeffs, kind, rhs });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// `d objective / d rhs` per row; nonnegative for `Ge` rows and
    /// nonpositive for `Le` rows at a minimum.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    pub pivot_tol: f64,
    pub feas_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            pivot_tol: 1e-9,
            feas_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Place {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Tableau {
    m: usize,
    n_cols: usize,
    /// `m x n_cols`, row-major: `B^-1 A`.
    t: Vec<f64>,
    /// Current values of the basic variables (shifted space).
    beta: Vec<f64>,
    basis: Vec<usize>,
    place: Vec<Place>,
    /// Upper bounds in shifted space (lower is always 0).
    upper: Vec<f64>,
    d: Vec<f64>,
    iterations: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.n_cols + j]
    }

    fn reset_costs(&mut self, cost: &[f64]) {
        self.d.copy_from_slice(cost);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * self.n_cols..(i + 1) * self.n_cols];
            for (dj, &a) in self.d.iter_mut().zip(row) {
                *dj -= cb * a;
            }
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.place[j] {
            Place::AtUpper => self.upper[j],
            _ => 0.0,
        }
    }

    fn run(&mut self, opts: &SimplexOptions, eligible: &dyn Fn(usize) -> bool) -> Outcome {
        let scale = self.d.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let d_tol = opts.feas_tol * scale;
        let mut degenerate = false;
        loop {
            if self.iterations >= opts.max_iterations {
                return Outcome::IterationLimit;
            }
            // entering column
            let mut entering: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..self.n_cols {
                if !eligible(j) || self.upper[j] <= 0.0 {
                    continue;
                }
                let dir = match self.place[j] {
                    Place::Basic(_) => continue,
                    Place::AtLower if self.d[j] < -d_tol => 1.0,
                    Place::AtUpper if self.d[j] > d_tol => -1.0,
                    _ => continue,
                };
                if degenerate {
                    entering = Some((j, dir));
                    break;
                }
                if self.d[j].abs() > best {
                    best = self.d[j].abs();
                    entering = Some((j, dir));
                }
            }
            let Some((q, dir)) = entering else {
                return Outcome::Optimal;
            };

            // ratio test; ties go to the smallest basic variable index
            let mut theta = self.upper[q];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..self.m {
                let alpha = dir * self.at(i, q);
                if alpha.abs() <= opts.pivot_tol {
                    continue;
                }
                let b = self.basis[i];
                let (limit, to_upper) = if alpha > 0.0 {
                    (self.beta[i].max(0.0) / alpha, false)
                } else if self.upper[b].is_finite() {
                    ((self.upper[b] - self.beta[i]).max(0.0) / -alpha, true)
                } else {
                    continue;
                };
                let take = if limit < theta - 1e-12 {
                    true
                } else if limit <= theta + 1e-12 {
                    matches!(leave, Some((r, _)) if b < self.basis[r])
                } else {
                    false
                };
                if take {
                    theta = limit;
                    leave = Some((i, to_upper));
                }
            }
            if theta.is_infinite() {
                return Outcome::Unbounded;
            }
            self.iterations += 1;
            degenerate = theta <= 1e-12;

            for i in 0..self.m {
                self.beta[i] -= dir * theta * self.at(i, q);
            }
            let entering_value = self.nonbasic_value(q) + dir * theta;

            match leave {
                None => {
                    // bound flip
                    self.place[q] = if dir > 0.0 { Place::AtUpper } else { Place::AtLower };
                }
                Some((r, to_upper)) => {
                    let leaving = self.basis[r];
                    self.place[leaving] = if to_upper { Place::AtUpper } else { Place::AtLower };
                    self.pivot(r, q);
                    self.beta[r] = entering_value;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let n = self.n_cols;
        let p = self.at(r, q);
        for v in &mut self.t[r * n..(r + 1) * n] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.t[r * n..(r + 1) * n].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.at(i, q);
            if f == 0.0 {
                continue;
            }
            for (v, &pr) in self.t[i * n..(i + 1) * n].iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (v, &pr) in self.d.iter_mut().zip(&pivot_row) {
                *v -= f * pr;
            }
        }
        self.basis[r] = q;
        self.place[q] = Place::Basic(r);
    }
}

pub fn solve(lp: &LinearProgram, opts: &SimplexOptions) -> LpSolution {
    let n = lp.cost.len();
    let m = lp.rows.len();
    let n_slack = lp.rows.iter().filter(|r| r.kind != RowKind::Eq).count();
    let n_cols = n + n_slack + m;
    let art0 = n + n_slack;

    let mut t = vec![0.0; m * n_cols];
    let mut beta = vec![0.0; m];
    let mut sign = vec![1.0; m];
    let mut slack = 0;
    for (i, row) in lp.rows.iter().enumerate() {
        // shift x = lower + x'
        let mut rhs = row.rhs;
        for &(j, a) in &row.coeffs {
            t[i * n_cols + j] += a;
            rhs -= a * lp.lower[j];
        }
        match row.kind {
            RowKind::Le => {
                t[i * n_cols + n + slack] = 1.0;
                slack += 1;
            }
            RowKind::Ge => {
                t[i * n_cols + n + slack] = -1.0;
                slack += 1;
            }
            RowKind::Eq => {}
        }
        if rhs < 0.0 {
            sign[i] = -1.0;
            rhs = -rhs;
            for v in &mut t[i * n_cols..i * n_cols + art0] {
                *v = -*v;
            }
        }
        t[i * n_cols + art0 + i] = 1.0;
        beta[i] = rhs;
    }

    let mut upper = vec![f64::INFINITY; n_cols];
    for (u, (hi, lo)) in upper.iter_mut().zip(lp.upper.iter().zip(&lp.lower)) {
        *u = hi - lo;
    }
    let mut place = vec![Place::AtLower; n_cols];
    let basis: Vec<usize> = (0..m).map(|i| art0 + i).collect();
    for (i, &b) in basis.iter().enumerate() {
        place[b] = Place::Basic(i);
    }

    let mut tab = Tableau {
        m,
        n_cols,
        t,
        beta,
        basis,
        place,
        upper,
        d: vec![0.0; n_cols],
        iterations: 0,
    };

    let done = |tab: &Tableau, status: LpStatus, duals: Vec<f64>| {
        let mut x = lp.lower.clone();
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += match tab.place[j] {
                Place::Basic(i) => tab.beta[i],
                Place::AtUpper => tab.upper[j],
                Place::AtLower => 0.0,
            };
        }
        let objective = x.iter().zip(&lp.cost).map(|(a, b)| a * b).sum();
        LpSolution {
            status,
            x,
            objective,
            duals,
            iterations: tab.iterations,
        }
    };

    // phase one
    let mut phase1_cost = vec![0.0; n_cols];
    phase1_cost[art0..].iter_mut().for_each(|c| *c = 1.0);
    tab.reset_costs(&phase1_cost);
    match tab.run(opts, &|_| true) {
        Outcome::IterationLimit => return done(&tab, LpStatus::IterationLimit, vec![0.0; m]),
        Outcome::Unbounded => unreachable!("phase one is bounded below by zero"),
        Outcome::Optimal => {}
    }
    let infeas: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= art0)
        .map(|i| tab.beta[i])
        .sum();
    let rhs_scale = lp.rows.iter().fold(1.0f64, |acc, r| acc.max(r.rhs.abs()));
    if infeas > opts.feas_tol * rhs_scale * (m.max(1) as f64) {
        return done(&tab, LpStatus::Infeasible, vec![0.0; m]);
    }

    // drive zero-level artificials out where a structural pivot exists
    for r in 0..m {
        if tab.basis[r] < art0 {
            continue;
        }
        if let Some(q) = (0..art0).find(|&j| {
            !matches!(tab.place[j], Place::Basic(_)) && tab.at(r, j).abs() > 1e-7
        }) {
            let leaving = tab.basis[r];
            let value = tab.nonbasic_value(q);
            tab.place[leaving] = Place::AtLower;
            tab.pivot(r, q);
            tab.beta[r] = value;
        }
    }
    for j in art0..n_cols {
        tab.upper[j] = 0.0;
    }

    // phase two
    let mut cost = vec![0.0; n_cols];
    cost[..n].copy_from_slice(&lp.cost);
    tab.reset_costs(&cost);
    let status = match tab.run(opts, &|j| j < art0) {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
        Outcome::IterationLimit => LpStatus::IterationLimit,
    };
    let duals = (0..m).map(|i| -tab.d[art0 + i] * sign[i]).collect();
    done(&tab, status, duals)
}
