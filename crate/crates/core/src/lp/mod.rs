//! Exact linear programming: two-phase revised simplex over rationals.

use std::fmt::Write as _;

use crate::qnum::Rational;

mod float;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

/// Entering-variable rule. `Bland` picks the lowest-index improving column
/// and never cycles. `Dantzig` picks the most negative reduced cost (as
/// estimated in floating point) and hands over to Bland's rule after a run of
/// degenerate pivots, until a pivot makes progress again.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Pricing {
    #[default]
    Bland,
    Dantzig,
}

/// `minimize c.x` subject to linear constraints and per-variable bounds.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    names: Vec<String>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Stopped at a feasible point whose value is at most the requested target.
    TargetReached,
    /// The optimum is proven to exceed the target; `value` is the lower bound
    /// that shows it.
    AboveTarget,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value at `point`, or the lower bound for `AboveTarget`.
    pub value: Option<Rational>,
    pub point: Vec<Rational>,
    pub iterations: usize,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, lower: Option<Rational>, upper: Option<Rational>) -> usize {
        self.names.push(name.into());
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.push(Rational::zero());
        self.names.len() - 1
    }

    pub fn add_nonneg(&mut self, name: impl Into<String>) -> usize {
        self.add_variable(name, Some(Rational::zero()), None)
    }

    pub fn add_free(&mut self, name: impl Into<String>) -> usize {
        self.add_variable(name, None, None)
    }

    pub fn set_objective(&mut self, var: usize, c: Rational) {
        self.objective[var] = c;
    }

    pub fn add_constraint(&mut self, mut coeffs: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) {
        coeffs.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(coeffs.len());
        for (v, c) in coeffs {
            assert!(v < self.names.len(), "unknown variable {v}");
            match merged.last_mut() {
                Some((w, d)) if *w == v => *d += &c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.constraints.push(Constraint { coeffs: merged, rel, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn bounds(&self, v: usize) -> (Option<&Rational>, Option<&Rational>) {
        (self.lower[v].as_ref(), self.upper[v].as_ref())
    }

    /// Plain-text dump: the objective first, then one line per constraint,
    /// then the variable bounds.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let obj: Vec<(usize, Rational)> =
            self.objective.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(v, c)| (v, c.clone())).collect();
        let _ = writeln!(s, "min: {}", self.linear(&obj));
        for c in &self.constraints {
            let _ = writeln!(s, "{} {} {}", self.linear(&c.coeffs), c.rel.symbol(), c.rhs);
        }
        for v in 0..self.names.len() {
            match (&self.lower[v], &self.upper[v]) {
                (None, None) => {
                    let _ = writeln!(s, "{} free", self.names[v]);
                }
                (Some(l), None) => {
                    let _ = writeln!(s, "{} >= {l}", self.names[v]);
                }
                (None, Some(u)) => {
                    let _ = writeln!(s, "{} <= {u}", self.names[v]);
                }
                (Some(l), Some(u)) => {
                    let _ = writeln!(s, "{l} <= {} <= {u}", self.names[v]);
                }
            }
        }
        s
    }

    fn linear(&self, coeffs: &[(usize, Rational)]) -> String {
        if coeffs.is_empty() {
            return "0".into();
        }
        coeffs.iter().map(|(v, c)| format!("{c}*{}", self.names[*v])).collect::<Vec<_>>().join(" + ")
    }

    /// Checks a point against every constraint and bound.
    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        if point.len() != self.names.len() {
            return false;
        }
        for v in 0..point.len() {
            if self.lower[v].as_ref().is_some_and(|l| &point[v] < l) || self.upper[v].as_ref().is_some_and(|u| &point[v] > u) {
                return false;
            }
        }
        self.constraints.iter().all(|c| {
            let lhs: Rational = c.coeffs.iter().map(|(v, a)| a * &point[*v]).sum();
            match c.rel {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        })
    }

    pub fn objective_at(&self, point: &[Rational]) -> Rational {
        self.objective.iter().zip(point).filter(|(c, _)| !c.is_zero()).map(|(c, x)| c * x).sum()
    }

    pub fn solve(&self) -> LpSolution {
        self.solve_with(Pricing::default())
    }

    /// Solves exactly. A floating-point run first proposes a starting basis;
    /// the exact simplex checks it and pivots on from there.
    pub fn solve_with(&self, pricing: Pricing) -> LpSolution {
        self.solve_impl(pricing, true, None)
    }

    /// Like [`solve_with`](Self::solve_with), but may stop early with
    /// `TargetReached` as soon as a feasible point of value at most `target`
    /// is found.
    pub fn solve_to_target(&self, pricing: Pricing, target: &Rational) -> LpSolution {
        self.solve_impl(pricing, true, Some((target, None)))
    }

    /// Like [`solve_to_target`](Self::solve_to_target), but first hands the
    /// approximate duals of the floating-point run, one per constraint, to
    /// `bound`. That must return a lower bound on the optimum that is valid
    /// for any duals it is given. If the bound exceeds `target` the exact
    /// simplex is skipped and the status is `AboveTarget`.
    pub fn solve_against_target(&self, pricing: Pricing, target: &Rational, bound: &dyn Fn(&[f64]) -> Option<Rational>) -> LpSolution {
        self.solve_impl(pricing, true, Some((target, Some(bound))))
    }

    /// Exact simplex from the slack basis, without the floating-point start.
    pub fn solve_cold(&self, pricing: Pricing) -> LpSolution {
        self.solve_impl(pricing, false, None)
    }

    fn solve_impl(&self, pricing: Pricing, warm: bool, target: Option<(&Rational, Option<&DualBound>)>) -> LpSolution {
        let (mut tab, map, flipped) = StandardForm::build(self);
        if warm {
            if let Some((basis, duals)) = float::guess_basis(&tab.cols, &tab.cost, tab.first_artificial, &tab.basis, &tab.b) {
                if let (Some((t, Some(bound))), Some(y)) = (target, duals) {
                    let y: Vec<f64> = flipped.iter().zip(&y).map(|(&f, &v)| if f { -v } else { v }).collect();
                    if let Some(lb) = bound(&y).filter(|lb| lb > t) {
                        return LpSolution { status: LpStatus::AboveTarget, value: Some(lb), point: Vec::new(), iterations: 0 };
                    }
                }
                tab.install_basis(&basis);
            }
        }
        let target = target.map(|(t, _)| t);
        // Objective of the standard form differs from ours by a constant.
        let offset: Rational = map
            .iter()
            .zip(&self.objective)
            .map(|(m, c)| match m {
                VarMap::Shift { offset, .. } => c * offset,
                VarMap::Mirror { upper, .. } => c * upper,
                VarMap::Split { .. } => Rational::zero(),
            })
            .sum();
        let status = tab.run(pricing, target.map(|t| t - &offset));
        let iterations = tab.iterations;
        if !matches!(status, LpStatus::Optimal | LpStatus::TargetReached) {
            return LpSolution { status, value: None, point: Vec::new(), iterations };
        }
        let x = tab.column_values();
        let point: Vec<Rational> = map
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, offset } => offset + &x[*col],
                VarMap::Mirror { col, upper } => upper - &x[*col],
                VarMap::Split { pos, neg } => &x[*pos] - &x[*neg],
            })
            .collect();
        debug_assert!(self.is_feasible(&point));
        let value = self.objective_at(&point);
        LpSolution { status, value: Some(value), point, iterations }
    }
}

type DualBound<'a> = dyn Fn(&[f64]) -> Option<Rational> + 'a;

enum VarMap {
    /// `v = offset + col`
    Shift { col: usize, offset: Rational },
    /// `v = upper - col`
    Mirror { col: usize, upper: Rational },
    /// `v = pos - neg`
    Split { pos: usize, neg: usize },
}

type Column = Vec<(usize, Rational)>;

struct StandardForm;

impl StandardForm {
    /// Rewrites the program as `min c.x, Ax = b, x >= 0, b >= 0`.
    /// Also returns, per original constraint, whether its row was negated.
    fn build(lp: &LinearProgram) -> (Simplex, Vec<VarMap>, Vec<bool>) {
        let mut cols: Vec<Column> = Vec::new();
        let mut cost: Vec<Rational> = Vec::new();
        let mut map = Vec::with_capacity(lp.num_vars());
        let mut extra_rows: Vec<(usize, Rational)> = Vec::new();
        for v in 0..lp.num_vars() {
            let c = lp.objective[v].clone();
            match (&lp.lower[v], &lp.upper[v]) {
                (Some(l), u) => {
                    let col = cols.len();
                    cols.push(Vec::new());
                    cost.push(c);
                    if let Some(u) = u {
                        extra_rows.push((col, u - l));
                    }
                    map.push(VarMap::Shift { col, offset: l.clone() });
                }
                (None, Some(u)) => {
                    let col = cols.len();
                    cols.push(Vec::new());
                    cost.push(-c);
                    map.push(VarMap::Mirror { col, upper: u.clone() });
                }
                (None, None) => {
                    let pos = cols.len();
                    cols.push(Vec::new());
                    cols.push(Vec::new());
                    cost.push(c.clone());
                    cost.push(-c);
                    map.push(VarMap::Split { pos, neg: pos + 1 });
                }
            }
        }
        let n_struct = cols.len();

        struct Row {
            entries: Vec<(usize, Rational)>,
            rel: Relation,
            rhs: Rational,
        }
        let mut rows: Vec<Row> = Vec::new();
        for c in &lp.constraints {
            let mut entries = Vec::with_capacity(c.coeffs.len() + 1);
            let mut rhs = c.rhs.clone();
            for (v, a) in &c.coeffs {
                match &map[*v] {
                    VarMap::Shift { col, offset } => {
                        rhs -= &(a * offset);
                        entries.push((*col, a.clone()));
                    }
                    VarMap::Mirror { col, upper } => {
                        rhs -= &(a * upper);
                        entries.push((*col, -a));
                    }
                    VarMap::Split { pos, neg } => {
                        entries.push((*pos, a.clone()));
                        entries.push((*neg, -a));
                    }
                }
            }
            rows.push(Row { entries, rel: c.rel, rhs });
        }
        for (col, cap) in extra_rows {
            rows.push(Row { entries: vec![(col, Rational::one())], rel: Relation::Le, rhs: cap });
        }

        let m = rows.len();
        let flipped = rows[..lp.constraints.len()].iter().map(|r| r.rhs.is_negative()).collect();
        let mut basis = vec![usize::MAX; m];
        let mut b = Vec::with_capacity(m);
        for (r, row) in rows.iter_mut().enumerate() {
            let slack = match row.rel {
                Relation::Eq => None,
                Relation::Le => Some(Rational::one()),
                Relation::Ge => Some(-Rational::one()),
            };
            let flip = row.rhs.is_negative();
            let sign = |a: Rational| if flip { -a } else { a };
            for (col, a) in row.entries.drain(..) {
                cols[col].push((r, sign(a)));
            }
            if let Some(s) = slack {
                let s = sign(s);
                let col = cols.len();
                let unit = s.is_one();
                cols.push(vec![(r, s)]);
                cost.push(Rational::zero());
                if unit {
                    basis[r] = col;
                }
            }
            b.push(sign(row.rhs.clone()));
        }
        let first_artificial = cols.len();
        for (r, slot) in basis.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = cols.len();
                cols.push(vec![(r, Rational::one())]);
                cost.push(Rational::zero());
            }
        }
        (Simplex::new(cols, cost, n_struct, first_artificial, basis, b), map, flipped)
    }
}

struct Simplex {
    m: usize,
    cols: Vec<Column>,
    cost: Vec<Rational>,
    n_struct: usize,
    first_artificial: usize,
    basis: Vec<usize>,
    row_of: Vec<usize>,
    binv: Vec<Vec<Rational>>,
    xb: Vec<Rational>,
    b: Vec<Rational>,
    iterations: usize,
}

const NOT_BASIC: usize = usize::MAX;

/// Consecutive degenerate pivots after which Dantzig pricing hands over to Bland.
const DEGENERATE_LIMIT: usize = 50;

impl Simplex {
    fn new(cols: Vec<Column>, cost: Vec<Rational>, n_struct: usize, first_artificial: usize, basis: Vec<usize>, b: Vec<Rational>) -> Self {
        let m = basis.len();
        let mut row_of = vec![NOT_BASIC; cols.len()];
        for (r, &c) in basis.iter().enumerate() {
            row_of[c] = r;
        }
        // Every initial basic column is a unit vector, so B^-1 = I.
        let binv = (0..m)
            .map(|i| {
                let mut row = vec![Rational::zero(); m];
                row[i] = Rational::one();
                row
            })
            .collect();
        Simplex { m, cols, cost, n_struct, first_artificial, basis, row_of, binv, xb: b.clone(), b, iterations: 0 }
    }

    /// Replaces the basis by `basis` if it is nonsingular and primal feasible.
    fn install_basis(&mut self, basis: &[usize]) -> bool {
        let m = self.m;
        let w = 2 * m;
        let mut a: Vec<Vec<Rational>> = vec![vec![Rational::zero(); w]; m];
        for (k, &c) in basis.iter().enumerate() {
            for (i, v) in &self.cols[c] {
                a[*i][k] = v.clone();
            }
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[m + i] = Rational::one();
        }
        for c in 0..m {
            let Some(p) = (c..m).find(|&i| !a[i][c].is_zero()) else { return false };
            a.swap(p, c);
            let inv = a[c][c].recip();
            let nz: Vec<usize> = (0..w).filter(|&j| !a[c][j].is_zero()).collect();
            for &j in &nz {
                a[c][j] = &a[c][j] * &inv;
            }
            let pivot = std::mem::take(&mut a[c]);
            for row in a.iter_mut() {
                if row.is_empty() || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for &j in &nz {
                    row[j] -= &(&f * &pivot[j]);
                }
            }
            a[c] = pivot;
        }
        let binv: Vec<Vec<Rational>> = a.into_iter().map(|mut row| row.split_off(m)).collect();
        let mut xb = Vec::with_capacity(m);
        for row in &binv {
            let mut s = Rational::zero();
            for (v, bj) in row.iter().zip(&self.b) {
                if !v.is_zero() && !bj.is_zero() {
                    s += &(v * bj);
                }
            }
            if s.is_negative() {
                return false;
            }
            xb.push(s);
        }
        for &c in &self.basis {
            self.row_of[c] = NOT_BASIC;
        }
        for (r, &c) in basis.iter().enumerate() {
            self.row_of[c] = r;
        }
        self.basis = basis.to_vec();
        self.binv = binv;
        self.xb = xb;
        true
    }

    fn run(&mut self, pricing: Pricing, target: Option<Rational>) -> LpStatus {
        let ncols = self.cols.len();
        let infeasibility =
            |s: &Self| -> Rational { (0..s.m).filter(|&r| s.basis[r] >= s.first_artificial).map(|r| s.xb[r].clone()).sum() };
        if self.first_artificial < ncols {
            if infeasibility(self).is_positive() {
                let phase1: Vec<Rational> =
                    (0..ncols).map(|j| if j >= self.first_artificial { Rational::one() } else { Rational::zero() }).collect();
                let status = self.optimize(&phase1, ncols, pricing, None);
                debug_assert_eq!(status, LpStatus::Optimal);
            }
            if infeasibility(self).is_positive() {
                return LpStatus::Infeasible;
            }
        }
        let cost = std::mem::take(&mut self.cost);
        let status = self.optimize(&cost, self.first_artificial, pricing, target.as_ref());
        self.cost = cost;
        status
    }

    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.m];
        for (k, &col) in self.basis.iter().enumerate() {
            let c = &cost[col];
            if c.is_zero() {
                continue;
            }
            for (i, b) in self.binv[k].iter().enumerate() {
                if !b.is_zero() {
                    y[i] += &(c * b);
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[Rational], y: &[Rational]) -> Rational {
        let mut d = cost[j].clone();
        for (i, a) in &self.cols[j] {
            if !y[*i].is_zero() {
                d -= &(&y[*i] * a);
            }
        }
        d
    }

    /// `B^-1 A_j`.
    fn ftran(&self, j: usize) -> Vec<Rational> {
        let col = &self.cols[j];
        self.binv
            .iter()
            .map(|row| {
                let mut s = Rational::zero();
                for (i, a) in col {
                    let b = &row[*i];
                    if !b.is_zero() {
                        s += &(b * a);
                    }
                }
                s
            })
            .collect()
    }

    fn optimize(&mut self, cost: &[Rational], limit: usize, pricing: Pricing, target: Option<&Rational>) -> LpStatus {
        let mut y = self.duals(cost);
        let cost_f: Vec<f64> = cost.iter().map(Rational::to_f64).collect();
        let cols_f: Vec<Vec<(usize, f64)>> =
            self.cols[..limit].iter().map(|c| c.iter().map(|(i, a)| (*i, a.to_f64())).collect()).collect();
        let mut degenerate_run = 0usize;
        loop {
            if let Some(t) = target {
                if degenerate_run == 0 {
                    let value: Rational = (0..self.m)
                        .filter(|&r| !cost[self.basis[r]].is_zero() && !self.xb[r].is_zero())
                        .map(|r| &cost[self.basis[r]] * &self.xb[r])
                        .sum();
                    if value <= *t {
                        return LpStatus::TargetReached;
                    }
                }
            }
            let use_bland = pricing == Pricing::Bland || degenerate_run >= DEGENERATE_LIMIT;
            // Reduced costs are estimated in floating point first. A column
            // whose estimate clears its error margin cannot enter; the rest
            // are priced exactly.
            let yf: Vec<f64> = y.iter().map(Rational::to_f64).collect();
            let estimate = |j: usize| -> (f64, f64) {
                let mut d = cost_f[j];
                let mut scale = 1.0 + d.abs();
                for (i, a) in &cols_f[j] {
                    let t = yf[*i] * a;
                    d -= t;
                    scale += t.abs();
                }
                (d, 1e-7 * scale)
            };
            let mut entering: Option<(usize, Rational)> = None;
            if !use_bland {
                let best = (0..limit)
                    .filter(|&j| self.row_of[j] == NOT_BASIC)
                    .map(|j| (j, estimate(j)))
                    .filter(|(_, (d, margin))| *d < -margin)
                    .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
                if let Some((j, _)) = best {
                    let d = self.reduced_cost(j, cost, &y);
                    if d.is_negative() {
                        entering = Some((j, d));
                    }
                }
                if entering.is_none() {
                    for j in 0..limit {
                        if self.row_of[j] != NOT_BASIC || estimate(j).0 > estimate(j).1 {
                            continue;
                        }
                        let d = self.reduced_cost(j, cost, &y);
                        if d.is_negative() && entering.as_ref().is_none_or(|(_, b)| d < *b) {
                            entering = Some((j, d));
                        }
                    }
                }
            }
            if entering.is_none() {
                for j in 0..limit {
                    if self.row_of[j] != NOT_BASIC {
                        continue;
                    }
                    let (df, margin) = estimate(j);
                    if df > margin {
                        continue;
                    }
                    let d = self.reduced_cost(j, cost, &y);
                    if d.is_negative() {
                        entering = Some((j, d));
                        break;
                    }
                }
            }
            let Some((q, dq)) = entering else { return LpStatus::Optimal };
            let alpha = self.ftran(q);
            let mut leave: Option<(usize, Rational)> = None;
            for (k, a) in alpha.iter().enumerate() {
                // Basic columns past `limit` are artificials sitting at zero;
                // any pivot touching them must keep them there.
                let pinned = self.basis[k] >= limit && !a.is_zero();
                if !pinned && !a.is_positive() {
                    continue;
                }
                let ratio = if pinned { Rational::zero() } else { &self.xb[k] / a };
                let take = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[k] < self.basis[*r]),
                };
                if take {
                    leave = Some((k, ratio));
                }
            }
            let Some((r, step)) = leave else { return LpStatus::Unbounded };
            if step.is_zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q, &alpha);
            let factor = dq;
            for (i, b) in self.binv[r].iter().enumerate() {
                if !b.is_zero() {
                    y[i] += &(&factor * b);
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[Rational]) {
        self.iterations += 1;
        let inv = alpha[r].recip();
        for b in self.binv[r].iter_mut() {
            if !b.is_zero() {
                *b = &*b * &inv;
            }
        }
        self.xb[r] = &self.xb[r] * &inv;
        let pivot_row = std::mem::take(&mut self.binv[r]);
        let nz: Vec<usize> = (0..self.m).filter(|&i| !pivot_row[i].is_zero()).collect();
        let xr = self.xb[r].clone();
        for k in 0..self.m {
            if k == r || alpha[k].is_zero() {
                continue;
            }
            let a = &alpha[k];
            let row = &mut self.binv[k];
            for &i in &nz {
                row[i] -= &(a * &pivot_row[i]);
            }
            if !xr.is_zero() {
                self.xb[k] -= &(a * &xr);
            }
        }
        self.binv[r] = pivot_row;
        let old = self.basis[r];
        self.row_of[old] = NOT_BASIC;
        self.basis[r] = q;
        self.row_of[q] = r;
    }

    fn column_values(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n_struct];
        for (r, &c) in self.basis.iter().enumerate() {
            if c < self.n_struct {
                x[c] = self.xb[r].clone();
            }
        }
        x
    }
}
