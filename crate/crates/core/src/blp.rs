//! The basic LP relaxation of a finite valued CSP instance, and the decision
//! procedure built on it.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Pricing, Relation};
use crate::plh::{Application, Instance, ValuedStructure};
use crate::qnum::{ExtRational, Rational};
use crate::sampling::{build_sample_for, Sample, SampleOptions};
use crate::table::{CostTable, FiniteStructure};

/// LP over `lambda_j(t)` for each application `j` and finite-cost tuple `t`,
/// minimising `sum_j sum_t f_j(t) lambda_j(t)` with each `lambda_j` a
/// probability distribution. The marginal `mu_x` of a variable is the
/// marginal of its first occurrence; every further occurrence is constrained
/// to the same marginal. This is the usual formulation with the `mu`
/// variables substituted away.
pub struct BlpModel {
    pub lp: LinearProgram,
    /// Per application: `(tuple index, LP variable)`.
    pub lambda: Vec<Vec<(usize, usize)>>,
    /// Per instance variable: its first occurrence `(application, position)`.
    pub first_occurrence: Vec<Option<(usize, usize)>>,
    /// Per application: the constraint index of its `sum lambda = 1` row.
    pub convexity: Vec<usize>,
}

impl BlpModel {
    /// `mu_x(a)` at an LP point; point mass on the first value for variables
    /// that occur nowhere.
    pub fn marginals(&self, delta: &FiniteStructure, inst: &Instance, point: &[Rational]) -> Vec<Vec<Rational>> {
        let n = delta.size();
        self.first_occurrence
            .iter()
            .map(|occ| {
                let mut mu = vec![Rational::zero(); n];
                match occ {
                    Some((j, l)) => {
                        let table = &delta.tables[&inst.applications[*j].function];
                        for &(ti, v) in &self.lambda[*j] {
                            mu[table.tuple(ti)[*l]] += &point[v];
                        }
                    }
                    None if n > 0 => mu[0] = Rational::one(),
                    None => {}
                }
                mu
            })
            .collect()
    }

    /// Exact lower bound on the relaxation from arbitrary duals `y`, one per
    /// constraint. The duals of the convexity rows are replaced by the
    /// largest values keeping every column dual feasible, so the result is
    /// valid whatever `y` is. `None` if some application has no finite tuple.
    pub fn dual_bound(&self, y: &[f64]) -> Option<Rational> {
        let cons = self.lp.constraints();
        let mut is_convexity = vec![false; cons.len()];
        for &r in &self.convexity {
            is_convexity[r] = true;
        }
        let mut reduced: Vec<Rational> = self.lp.objective().to_vec();
        let mut bound = Rational::zero();
        for (r, c) in cons.iter().enumerate() {
            if is_convexity[r] {
                continue;
            }
            let yr = dyadic(y[r])?;
            if yr.is_zero() {
                continue;
            }
            bound += &(&yr * &c.rhs);
            for (v, a) in &c.coeffs {
                reduced[*v] -= &(&yr * a);
            }
        }
        for vars in &self.lambda {
            bound += &vars.iter().map(|&(_, v)| &reduced[v]).min()?.clone();
        }
        Some(bound)
    }
}

/// `x` rounded to a multiple of `2^-32`. Any duals give a valid bound, and
/// short dyadics keep the exact arithmetic cheap.
fn dyadic(x: f64) -> Option<Rational> {
    const SCALE: f64 = (1u64 << 32) as f64;
    let n = (x * SCALE).round();
    (n.is_finite() && n.abs() < 9.0e18).then(|| Rational::new(n as i64, 1 << 32))
}

pub fn build_blp(inst: &Instance, delta: &FiniteStructure) -> Result<BlpModel> {
    delta.validate(inst)?;
    let n = delta.size();
    let mut lp = LinearProgram::new();
    let mut lambda = Vec::with_capacity(inst.applications.len());
    for (j, app) in inst.applications.iter().enumerate() {
        let table = &delta.tables[&app.function];
        let mut vars = Vec::new();
        for ti in table.finite_indices() {
            let t = table.tuple(ti);
            let name = format!("lam{j}[{}]", t.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
            let v = lp.add_nonneg(name);
            lp.set_objective(v, table.values()[ti].finite().expect("finite entry").clone());
            vars.push((ti, v));
        }
        lambda.push(vars);
    }
    let mut convexity = Vec::with_capacity(lambda.len());
    for vars in &lambda {
        convexity.push(lp.constraints().len());
        lp.add_constraint(vars.iter().map(|&(_, v)| (v, Rational::one())).collect(), Relation::Eq, Rational::one());
    }
    let mut first_occurrence = vec![None; inst.num_vars()];
    for (j, app) in inst.applications.iter().enumerate() {
        let table = &delta.tables[&app.function];
        for (l, &x) in app.args.iter().enumerate() {
            let Some((j0, l0)) = first_occurrence[x] else {
                first_occurrence[x] = Some((j, l));
                continue;
            };
            let table0 = &delta.tables[&inst.applications[j0].function];
            let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
            for &(ti, v) in &lambda[j] {
                rows[table.tuple(ti)[l]].push((v, Rational::one()));
            }
            for &(ti, v) in &lambda[j0] {
                rows[table0.tuple(ti)[l0]].push((v, -Rational::one()));
            }
            for row in rows {
                if !row.is_empty() {
                    lp.add_constraint(row, Relation::Eq, Rational::zero());
                }
            }
        }
    }
    Ok(BlpModel { lp, lambda, first_occurrence, convexity })
}

/// How a reported relaxation value relates to the optimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Exact,
    /// Value of a feasible point; the optimum is at most this.
    AtMost,
    /// A certified lower bound; the optimum is at least this.
    AtLeast,
}

impl Bound {
    pub fn symbol(self) -> &'static str {
        match self {
            Bound::Exact => "=",
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BlpSolution {
    /// Optimum, or `+inf` when the relaxation is infeasible, qualified by
    /// `bound`.
    pub value: ExtRational,
    pub bound: Bound,
    /// Marginals at the returned point; empty without one.
    pub mu: Vec<Vec<Rational>>,
    pub iterations: usize,
}

pub fn solve_blp(inst: &Instance, delta: &FiniteStructure) -> Result<BlpSolution> {
    solve_blp_with(inst, delta, Pricing::default())
}

pub fn solve_blp_with(inst: &Instance, delta: &FiniteStructure, pricing: Pricing) -> Result<BlpSolution> {
    let model = build_blp(inst, delta)?;
    Ok(blp_solution(&model, delta, inst, model.lp.solve_with(pricing)))
}

/// Stops as soon as a relaxation point of value at most `u` is found, or a
/// dual bound above `u` is certified, so `value <= u` iff the optimum is at
/// most `u`.
pub fn solve_blp_below(inst: &Instance, delta: &FiniteStructure, pricing: Pricing, u: &Rational) -> Result<BlpSolution> {
    let model = build_blp(inst, delta)?;
    Ok(blp_solution(&model, delta, inst, model.lp.solve_against_target(pricing, u, &|y| model.dual_bound(y))))
}

fn blp_solution(model: &BlpModel, delta: &FiniteStructure, inst: &Instance, sol: crate::lp::LpSolution) -> BlpSolution {
    match sol.status {
        LpStatus::Optimal | LpStatus::TargetReached => BlpSolution {
            value: ExtRational::Finite(sol.value.expect("feasible value")),
            bound: if sol.status == LpStatus::Optimal { Bound::Exact } else { Bound::AtMost },
            mu: model.marginals(delta, inst, &sol.point),
            iterations: sol.iterations,
        },
        LpStatus::AboveTarget => BlpSolution {
            value: ExtRational::Finite(sol.value.expect("certified bound")),
            bound: Bound::AtLeast,
            mu: Vec::new(),
            iterations: sol.iterations,
        },
        LpStatus::Infeasible => BlpSolution { value: ExtRational::PosInf, bound: Bound::Exact, mu: Vec::new(), iterations: sol.iterations },
        LpStatus::Unbounded => unreachable!("the relaxation is a bounded polytope"),
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub sample: SampleOptions,
    pub pricing: Pricing,
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub accept: bool,
    pub threshold: Rational,
    /// Relaxation optimum, or a bound on it on the side of the threshold that
    /// settles the decision.
    pub blp_value: ExtRational,
    pub blp_bound: Bound,
    pub sample: Sample,
}

fn threshold_of(inst: &Instance) -> Result<Rational> {
    inst.threshold.clone().ok_or_else(|| Error::Invalid("the instance has no threshold".into()))
}

/// Accepts iff the relaxation over the instance's sample is at most the
/// threshold. Exact when every fully symmetric fractional polymorphism arity
/// is present in the structure.
pub fn solve_decide(gamma: &ValuedStructure, inst: &Instance, opts: &SolveOptions) -> Result<Decision> {
    let u = threshold_of(inst)?;
    let safe = build_sample_for(gamma, inst, Some(&u), &opts.sample)?;
    if safe.domain.eps != safe.domain.base_eps {
        // A value at most `u` on any finite substructure is also attained over
        // Q, so the cheaper base sample can only confirm acceptance.
        let base = build_sample_for(gamma, inst, None, &opts.sample)?;
        let b = solve_blp_below(inst, &base.structure, opts.pricing, &u)?;
        if b.value <= ExtRational::Finite(u.clone()) {
            return Ok(Decision { accept: true, threshold: u, blp_value: b.value, blp_bound: b.bound, sample: base });
        }
    }
    let b = solve_blp_below(inst, &safe.structure, opts.pricing, &u)?;
    let accept = b.value <= ExtRational::Finite(u.clone());
    Ok(Decision { accept, threshold: u, blp_value: b.value, blp_bound: b.bound, sample: safe })
}

/// Finds an assignment of cost at most `u` by pinning variables one at a
/// time, in declaration order and trying domain values in increasing order,
/// keeping the first pin whose relaxation stays at most `u`.
pub fn extract_assignment(inst: &Instance, delta: &FiniteStructure, u: &Rational, pricing: Pricing) -> Result<Vec<usize>> {
    let n = delta.size();
    let bound = ExtRational::Finite(u.clone());
    let mut pinned: Vec<usize> = Vec::new();
    for name in &inst.variables {
        let mut found = None;
        for a in 0..n {
            let mut ext = delta.clone();
            let mut ei = inst.clone();
            for (y, &b) in pinned.iter().chain(std::iter::once(&a)).enumerate() {
                let pin = format!("__pin{y}");
                ext.insert(pin.clone(), pin_table(n, b));
                ei.applications.push(Application { function: pin, args: vec![y] });
            }
            if solve_blp_below(&ei, &ext, pricing, u)?.value <= bound {
                found = Some(a);
                break;
            }
        }
        match found {
            Some(a) => pinned.push(a),
            None => return Err(Error::NoExtension(name.clone())),
        }
    }
    Ok(pinned)
}

fn pin_table(n: usize, a: usize) -> CostTable {
    CostTable::from_fn(1, n, |t| if t[0] == a { ExtRational::zero() } else { ExtRational::PosInf })
}
