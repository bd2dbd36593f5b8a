//! Independent decision procedures used to cross-check the main pipeline:
//! exhaustive search over a finite structure, and an exact decision over `Q`
//! that solves one strict-feasibility LP per choice of pieces.

use crate::error::{Error, Result};
use crate::formula::{Atom, Rel, Term};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::plh::{Instance, ValuedStructure};
use crate::qnum::{ExtRational, Rational};
use crate::table::{CostTable, FiniteStructure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteResult {
    pub value: ExtRational,
    /// First optimal assignment in lexicographic order, as domain indices.
    pub argmin: Option<Vec<usize>>,
}

pub const DEFAULT_MAX_ASSIGNMENTS: u128 = 50_000_000;

/// Exhaustive minimum. Variables that occur in no application are fixed to
/// the first domain value and do not count towards `max_assignments`.
pub fn brute_min(delta: &FiniteStructure, inst: &Instance, max_assignments: u128) -> Result<BruteResult> {
    delta.validate(inst)?;
    let n = delta.size();
    let mut relevant: Vec<usize> = inst.applications.iter().flat_map(|a| a.args.iter().copied()).collect();
    relevant.sort_unstable();
    relevant.dedup();
    let count = (n as u128).checked_pow(relevant.len() as u32).unwrap_or(u128::MAX);
    if count > max_assignments {
        return Err(Error::SizeGuard { what: "assignments".into(), size: count, cap: max_assignments });
    }
    let mut best = BruteResult { value: ExtRational::PosInf, argmin: None };
    if n == 0 && inst.num_vars() > 0 {
        return Ok(best);
    }
    // Each application is charged at the depth of its last relevant variable.
    let depth_of = |v: usize| relevant.binary_search(&v).expect("relevant variable");
    let mut by_depth: Vec<Vec<(&CostTable, &[usize])>> = vec![Vec::new(); relevant.len()];
    let mut constant = ExtRational::zero();
    for app in &inst.applications {
        let table = &delta.tables[&app.function];
        match app.args.iter().map(|&v| depth_of(v)).max() {
            Some(d) => by_depth[d].push((table, &app.args)),
            None => constant = &constant + table.get(&[]),
        }
    }
    let mut a = vec![0usize; inst.num_vars()];
    if !constant.is_finite() {
        return Ok(best);
    }
    if relevant.is_empty() {
        return Ok(BruteResult { value: constant, argmin: Some(a) });
    }
    brute_rec(0, &relevant, &by_depth, n, constant, &mut a, &mut best);
    Ok(best)
}

fn brute_rec(
    depth: usize,
    relevant: &[usize],
    by_depth: &[Vec<(&CostTable, &[usize])>],
    n: usize,
    partial: ExtRational,
    a: &mut [usize],
    best: &mut BruteResult,
) {
    let v = relevant[depth];
    for value in 0..n {
        a[v] = value;
        let mut total = partial.clone();
        for (table, args) in &by_depth[depth] {
            let index = args.iter().fold(0, |acc, &x| acc * n + a[x]);
            total = &total + &table.values()[index];
            if !total.is_finite() {
                break;
            }
        }
        if !total.is_finite() {
            continue;
        }
        if depth + 1 == relevant.len() {
            if total < best.value {
                *best = BruteResult { value: total, argmin: Some(a.to_vec()) };
            }
        } else {
            brute_rec(depth + 1, relevant, by_depth, n, total, a, best);
        }
    }
    a[v] = 0;
}

/// `sum coeffs . x  rel  rhs` over instance variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub rel: Rel,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn from_atom(atom: &Atom) -> Option<LinearConstraint> {
        let Atom::Cmp { lhs, rel, rhs } = atom else { return None };
        let mut coeffs = Vec::new();
        let mut constant = Rational::zero();
        for (t, sign) in [(lhs, Rational::one()), (rhs, -Rational::one())] {
            match t {
                Term::Const(c) => constant -= &(c * &sign),
                Term::Var { coeff, var } => coeffs.push((*var, coeff * &sign)),
            }
        }
        Some(LinearConstraint { coeffs, rel: *rel, rhs: constant })
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().map(|(v, a)| a * &x[*v]).sum();
        match self.rel {
            Rel::Lt => lhs < self.rhs,
            Rel::Le => lhs <= self.rhs,
            Rel::Eq => lhs == self.rhs,
        }
    }
}

/// A point satisfying every constraint, strict ones strictly, if one exists.
///
/// Each strict `a.x < b` becomes `a.x + delta <= b`; the LP maximises
/// `delta` in `[0, 1]` and the system is feasible iff the optimum is positive.
pub fn strict_feasibility(num_vars: usize, constraints: &[LinearConstraint]) -> Option<Vec<Rational>> {
    let mut lp = LinearProgram::new();
    let xs: Vec<usize> = (0..num_vars).map(|i| lp.add_free(format!("x{i}"))).collect();
    let delta = lp.add_variable("delta", Some(Rational::zero()), Some(Rational::one()));
    lp.set_objective(delta, -Rational::one());
    for c in constraints {
        let mut row: Vec<(usize, Rational)> = c.coeffs.iter().map(|(v, a)| (xs[*v], a.clone())).collect();
        let rel = match c.rel {
            Rel::Lt => {
                row.push((delta, Rational::one()));
                Relation::Le
            }
            Rel::Le => Relation::Le,
            Rel::Eq => Relation::Eq,
        };
        lp.add_constraint(row, rel, c.rhs.clone());
    }
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal || !sol.point[delta].is_positive() {
        return None;
    }
    let point = sol.point[..num_vars].to_vec();
    debug_assert!(constraints.iter().all(|c| c.holds(&point)));
    Some(point)
}

/// Pieces of each application, rewritten over instance variables; pieces whose
/// guard collapses to false are dropped.
fn instantiated_pieces(gamma: &ValuedStructure, inst: &Instance) -> Result<Vec<Vec<(Vec<LinearConstraint>, Term)>>> {
    inst.validate(gamma)?;
    Ok(inst
        .applications
        .iter()
        .map(|app| {
            let f = gamma.get(&app.function).expect("validated");
            f.pieces()
                .iter()
                .filter_map(|p| {
                    let atoms: Vec<Atom> = p.guard.iter().map(|a| a.map_vars(|v| app.args[v])).collect();
                    if atoms.contains(&Atom::False) {
                        return None;
                    }
                    let cons = atoms.iter().filter_map(LinearConstraint::from_atom).collect();
                    Some((cons, p.value.map_vars(&|v| app.args[v])))
                })
                .collect()
        })
        .collect())
}

fn selection_count(pieces: &[Vec<(Vec<LinearConstraint>, Term)>], cap: u128) -> Result<u128> {
    let mut total: u128 = 1;
    for p in pieces {
        total = total.saturating_mul(p.len() as u128);
    }
    if total > cap {
        return Err(Error::SizeGuard { what: "piece selections".into(), size: total, cap });
    }
    Ok(total)
}

/// Linear form `sum value terms` as `(coefficients, constant)`.
fn objective_form(values: &[&Term], num_vars: usize) -> (Vec<(usize, Rational)>, Rational) {
    let mut coeffs = vec![Rational::zero(); num_vars];
    let mut constant = Rational::zero();
    for t in values {
        match t {
            Term::Const(c) => constant += c,
            Term::Var { coeff, var } => coeffs[*var] += coeff,
        }
    }
    (coeffs.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect(), constant)
}

/// Calls `visit` with the constraints and value terms of every selection
/// of one piece per application until it returns `Some`.
fn for_each_selection<T>(
    pieces: &[Vec<(Vec<LinearConstraint>, Term)>],
    mut visit: impl FnMut(Vec<LinearConstraint>, Vec<&Term>) -> Option<T>,
) -> Option<T> {
    if pieces.iter().any(Vec::is_empty) {
        return None;
    }
    let mut choice = vec![0usize; pieces.len()];
    loop {
        let mut cons = Vec::new();
        let mut values = Vec::with_capacity(pieces.len());
        for (j, &c) in choice.iter().enumerate() {
            cons.extend(pieces[j][c].0.iter().cloned());
            values.push(&pieces[j][c].1);
        }
        if let Some(r) = visit(cons, values) {
            return Some(r);
        }
        let mut j = pieces.len();
        loop {
            if j == 0 {
                return None;
            }
            j -= 1;
            choice[j] += 1;
            if choice[j] < pieces[j].len() {
                break;
            }
            choice[j] = 0;
        }
    }
}

pub const DEFAULT_MAX_SELECTIONS: u128 = 1_000_000;

#[derive(Clone, Debug)]
pub struct QDecision {
    pub accept: bool,
    /// A rational point of cost at most the threshold.
    pub witness: Option<Vec<Rational>>,
}

/// Decides whether some rational assignment has cost at most `u`.
pub fn q_decide(gamma: &ValuedStructure, inst: &Instance, u: &Rational, max_selections: u128) -> Result<QDecision> {
    let pieces = instantiated_pieces(gamma, inst)?;
    selection_count(&pieces, max_selections)?;
    let n = inst.num_vars();
    let witness = for_each_selection(&pieces, |mut cons, values| {
        let (coeffs, constant) = objective_form(&values, n);
        cons.push(LinearConstraint { coeffs, rel: Rel::Le, rhs: u - &constant });
        strict_feasibility(n, &cons)
    });
    Ok(QDecision { accept: witness.is_some(), witness })
}

/// Infimum of the cost over `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Infimum {
    /// No assignment has finite cost.
    Infeasible,
    MinusInfinity,
    Attained(Rational),
    /// Approached arbitrarily closely but never reached.
    NotAttained(Rational),
}

/// Classifies the infimum selection by selection: the closure of a nonempty
/// piece region has the same infimum, found by an ordinary LP.
pub fn q_infimum(gamma: &ValuedStructure, inst: &Instance, max_selections: u128) -> Result<Infimum> {
    let pieces = instantiated_pieces(gamma, inst)?;
    selection_count(&pieces, max_selections)?;
    let n = inst.num_vars();
    let mut best: Option<(Rational, bool)> = None;
    let unbounded = for_each_selection(&pieces, |cons, values| {
        strict_feasibility(n, &cons)?;
        let (coeffs, constant) = objective_form(&values, n);
        let mut lp = LinearProgram::new();
        let xs: Vec<usize> = (0..n).map(|i| lp.add_free(format!("x{i}"))).collect();
        for (v, c) in &coeffs {
            lp.set_objective(xs[*v], c.clone());
        }
        for c in &cons {
            let rel = if c.rel == Rel::Eq { Relation::Eq } else { Relation::Le };
            lp.add_constraint(c.coeffs.iter().map(|(v, a)| (xs[*v], a.clone())).collect(), rel, c.rhs.clone());
        }
        let sol = lp.solve();
        match sol.status {
            LpStatus::Unbounded => return Some(()),
            LpStatus::Infeasible => return None,
            LpStatus::Optimal => {}
            LpStatus::TargetReached | LpStatus::AboveTarget => unreachable!("no target was set"),
        }
        let v = &sol.value.expect("optimal") + &constant;
        let mut at = cons.clone();
        at.push(LinearConstraint { coeffs: coeffs.clone(), rel: Rel::Le, rhs: &v - &constant });
        let attained = strict_feasibility(n, &at).is_some();
        best = Some(match best.take() {
            None => (v, attained),
            Some((b, att)) if b == v => (b, att || attained),
            Some((b, att)) if b < v => (b, att),
            Some(_) => (v, attained),
        });
        None
    });
    Ok(match (unbounded, best) {
        (Some(()), _) => Infimum::MinusInfinity,
        (None, None) => Infimum::Infeasible,
        (None, Some((v, true))) => Infimum::Attained(v),
        (None, Some((v, false))) => Infimum::NotAttained(v),
    })
}

/// `q_decide` for the `0/+inf` version of the instance.
pub fn q_feasible(gamma: &ValuedStructure, inst: &Instance, max_selections: u128) -> Result<QDecision> {
    q_decide(&gamma.feasibility(), inst, &Rational::zero(), max_selections)
}
