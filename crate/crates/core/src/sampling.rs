//! Finite samples of a structure that preserve the answer of every instance
//! with a bounded number of variables.
//!
//! The sample is first built over Laurent numbers in an infinitesimal `eps`
//! and then mapped to the rationals by substituting a concrete small `eps`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::{extract_hk, Atom, Rel, Term};
use crate::plh::{Instance, ValuedStructure};
use crate::qnum::{denominator_lcm, Carrier, LaurentNum, Rational, MAX_EXP, MIN_EXP};
use crate::table::{tuple_count, CostTable, FiniteStructure};

/// `coeff * eps^exp` with `coeff > 0` and `exp` in `-1..=1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub coeff: Rational,
    pub exp: i32,
}

impl Monomial {
    pub fn new(coeff: Rational, exp: i32) -> Self {
        assert!(coeff.is_positive() && (-1..=1).contains(&exp), "monomial out of range");
        Monomial { coeff, exp }
    }

    pub fn to_laurent(&self) -> LaurentNum {
        LaurentNum::monomial(self.coeff.clone(), self.exp).expect("exponent in range")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // Smaller exponent means infinitely larger magnitude.
        other.exp.cmp(&self.exp).then_with(|| self.coeff.cmp(&other.coeff))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Magnitudes `|k| * prod |h_i|^{e_i}` with `sum |e_i| < d`, for `k` in `ks`
/// and `h_i` ranging over `hs`. Zero and duplicate magnitudes are dropped.
pub fn compute_c(hs: &BTreeSet<Rational>, ks: &[Monomial], d: usize) -> Vec<Monomial> {
    if d == 0 {
        return Vec::new();
    }
    // `h` and `1/h` generate the same products at the same cost, and `1`
    // generates nothing new.
    let mut base: Vec<Rational> = hs
        .iter()
        .filter(|h| !h.is_zero())
        .map(|h| {
            let a = h.abs();
            if a < Rational::one() {
                a.recip()
            } else {
                a
            }
        })
        .filter(|a| !a.is_one())
        .collect();
    base.sort();
    base.dedup();
    let mut factors = BTreeSet::new();
    products(&base, d as i64 - 1, Rational::one(), &mut factors);
    let mut out = BTreeSet::new();
    for k in ks {
        for f in &factors {
            out.insert(Monomial::new(&k.coeff * f, k.exp));
        }
    }
    out.into_iter().collect()
}

fn products(base: &[Rational], budget: i64, acc: Rational, out: &mut BTreeSet<Rational>) {
    let Some((h, rest)) = base.split_first() else {
        out.insert(acc);
        return;
    };
    for e in -budget..=budget {
        products(rest, budget - e.abs(), &acc * &h.pow(e as i32), out);
    }
}

/// `-C* u {0} u C*` where `C* = {x + n x eps^3 : x in C, |n| <= d}`, sorted.
pub fn compute_d(c: &[Monomial], d: usize) -> Vec<LaurentNum> {
    let d = d as i64;
    let mut out = BTreeSet::new();
    out.insert(LaurentNum::zero());
    for m in c {
        for n in -d..=d {
            let x = &m.to_laurent()
                + &LaurentNum::monomial(&m.coeff * &Rational::from_integer(n), m.exp + 3).expect("exponent in range");
            out.insert(-&x);
            out.insert(x);
        }
    }
    out.into_iter().collect()
}

/// One sixth of the ratio between the smallest and largest positive
/// difference of elements of `values u {0}`.
pub fn compute_epsilon(values: &[Rational]) -> Result<Rational> {
    let mut pts: Vec<Rational> = values.to_vec();
    pts.push(Rational::zero());
    pts.sort();
    pts.dedup();
    if pts.len() < 2 {
        return Err(Error::EmptyInput("no positive difference to compute eps from"));
    }
    // Smallest positive difference is between neighbours; largest is the span.
    let min = pts.windows(2).map(|w| &w[1] - &w[0]).min().expect("two points");
    let max = &pts[pts.len() - 1] - &pts[0];
    Ok(&(&min / &max) / &Rational::from_integer(6))
}

pub fn eta(x: &LaurentNum, eps: &Rational) -> Rational {
    x.eval(eps)
}

#[derive(Clone, Debug)]
pub struct SampleOptions {
    /// Bound on the number of variables; defaults to the instance size.
    pub d: Option<usize>,
    /// Also sample the graph atoms `v = t` of the piece values.
    pub value_atoms: bool,
    pub max_domain: usize,
    pub max_tuples: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions { d: None, value_atoms: false, max_domain: 4096, max_tuples: 4_000_000 }
    }
}

/// The sampled domain at both levels.
#[derive(Clone, Debug)]
pub struct SampleDomain {
    pub atoms: BTreeSet<Atom>,
    pub d: usize,
    pub c: Vec<Monomial>,
    pub laurent: Vec<LaurentNum>,
    /// The `eps` from the separation formula, before any refinement.
    pub base_eps: Rational,
    pub eps: Rational,
    /// `eta` of `laurent`, strictly increasing.
    pub values: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub domain: SampleDomain,
    pub structure: FiniteStructure,
}

/// Predicted domain size `2 |C| (2d + 1) + 1`.
pub fn predicted_size(c_len: usize, d: usize) -> u128 {
    2 * c_len as u128 * (2 * d as u128 + 1) + 1
}

/// The atoms a sample for `gamma` must respect.
pub fn sample_atoms(gamma: &ValuedStructure, opts: &SampleOptions) -> BTreeSet<Atom> {
    let mut atoms = if opts.value_atoms { gamma.signature_atoms() } else { gamma.guard_atoms() };
    atoms.remove(&Atom::True);
    atoms.remove(&Atom::False);
    atoms
}

fn laurent_magnitudes(atoms: &BTreeSet<Atom>) -> (BTreeSet<Rational>, Vec<Monomial>) {
    let (h, k) = extract_hk(atoms);
    let mut ks: Vec<Monomial> = k.iter().filter(|q| !q.is_zero()).map(|q| Monomial::new(q.abs(), 0)).collect();
    // The bounds eps < |x| < 1/eps are always part of the signature.
    ks.push(Monomial::new(Rational::one(), 1));
    ks.push(Monomial::new(Rational::one(), -1));
    ks.sort();
    ks.dedup();
    (h, ks)
}

/// Builds the sampled domain. With `threshold`, `eps` is additionally made
/// small enough that comparing any cost of the instance on the sample with
/// the threshold gives the same answer before and after substitution.
pub fn sample_domain(
    gamma: &ValuedStructure,
    d: usize,
    opts: &SampleOptions,
    threshold: Option<(&Instance, &Rational)>,
) -> Result<SampleDomain> {
    let atoms = sample_atoms(gamma, opts);
    let (h, ks) = laurent_magnitudes(&atoms);
    let c = compute_c(&h, &ks, d);
    let size = predicted_size(c.len(), d);
    if size > opts.max_domain as u128 {
        return Err(Error::SizeGuard { what: "sample domain".into(), size, cap: opts.max_domain as u128 });
    }
    let laurent = compute_d(&c, d);
    let coeffs: Vec<Rational> = c.iter().map(|m| m.coeff.clone()).collect();
    let base_eps = compute_epsilon(&coeffs)?;
    let mut eps = base_eps.clone();
    if let Some((inst, u)) = threshold {
        let bound = threshold_eps_bound(gamma, inst, u, &laurent);
        if bound < eps {
            eps = power_of_two_below(&bound);
        }
    }
    for _ in 0..64 {
        let values: Vec<Rational> = laurent.iter().map(|x| eta(x, &eps)).collect();
        if values.windows(2).all(|w| w[0] < w[1]) && atoms_preserved(&atoms, &laurent, &values) {
            return Ok(SampleDomain { atoms, d, c, laurent, base_eps, eps, values });
        }
        eps = &eps / &Rational::from_integer(6);
    }
    Err(Error::OrderViolation("no eps preserved the sampled atoms".into()))
}

/// Largest `2^-k` not above `b`, for `0 < b`.
fn power_of_two_below(b: &Rational) -> Rational {
    let half = Rational::new(1, 2);
    let mut p = Rational::one();
    while &p > b {
        p = &p * &half;
    }
    p
}

/// Every atom true of Laurent elements stays true of their images.
pub fn atoms_preserved(atoms: &BTreeSet<Atom>, laurent: &[LaurentNum], values: &[Rational]) -> bool {
    atoms.iter().all(|atom| match atom {
        Atom::Cmp { lhs: Term::Var { coeff: a, .. }, rel, rhs: Term::Var { coeff: b, .. } } => {
            pair_atom_preserved(a, *rel, b, laurent, values)
        }
        _ => {
            let local = atom.map_vars(|_| 0);
            laurent.iter().zip(values).all(|(l, v)| !local.holds(std::slice::from_ref(l)) || local.holds(std::slice::from_ref(v)))
        }
    })
}

/// `a x R b y` over all pairs, by one sweep over the merged scaled lists in
/// Laurent order instead of a scan of every pair.
fn pair_atom_preserved(a: &Rational, rel: Rel, b: &Rational, laurent: &[LaurentNum], values: &[Rational]) -> bool {
    let mut items: Vec<(LaurentNum, Rational, bool)> = Vec::with_capacity(2 * laurent.len());
    for (k, lhs) in [(a, true), (b, false)] {
        items.extend(laurent.iter().zip(values).map(|(l, v)| (l.scale(k), v * k, lhs)));
    }
    items.sort_by(|x, y| x.0.cmp(&y.0));
    // Largest image of a left element in the groups already passed.
    let mut below: Option<Rational> = None;
    for group in items.chunk_by(|x, y| x.0 == y.0) {
        let side = |lhs: bool| group.iter().filter(move |t| t.2 == lhs).map(|t| &t.1);
        let (lhs_min, lhs_max) = (side(true).min(), side(true).max());
        let (rhs_min, rhs_max) = (side(false).min(), side(false).max());
        let ok = match rel {
            Rel::Lt => match (&below, rhs_min) {
                (Some(m), Some(r)) => m < r,
                _ => true,
            },
            Rel::Le => match (below.as_ref().max(lhs_max), rhs_min) {
                (Some(m), Some(r)) => m <= r,
                _ => true,
            },
            Rel::Eq => rhs_min.is_none() || lhs_min.is_none() || (lhs_min == lhs_max && rhs_min == rhs_max && lhs_min == rhs_min),
        };
        if !ok {
            return false;
        }
        if let Some(m) = lhs_max {
            if below.as_ref().is_none_or(|b| b < m) {
                below = Some(m.clone());
            }
        }
    }
    true
}

/// An `eps` below which `eta` preserves the sign of `cost - u` for every cost
/// the instance can take on the Laurent sample under any choice of pieces.
///
/// Each coefficient of `cost - u` is a sum of per-application contributions.
/// At exponent `e` those are multiples of `1/L_e`, so a nonzero leading
/// coefficient has magnitude at least `1/L_e` (at exponent 0, at least the
/// distance from `u` to that lattice). The tail is at most `2 T eps` where
/// `T` bounds every coefficient, so `eps < lb / (2T)` keeps the sign.
pub fn threshold_eps_bound(gamma: &ValuedStructure, inst: &Instance, u: &Rational, laurent: &[LaurentNum]) -> Rational {
    let n_exp = (MAX_EXP - MIN_EXP + 1) as usize;
    let mut dens: Vec<Vec<Rational>> = vec![Vec::new(); n_exp];
    let mut total = u.abs();
    for app in &inst.applications {
        let f = gamma.get(&app.function).expect("validated instance");
        let mut largest = Rational::zero();
        let mut seen = BTreeSet::new();
        for p in f.pieces() {
            if !seen.insert(p.value.clone()) {
                continue;
            }
            match &p.value {
                Term::Const(c) => {
                    dens[(0 - MIN_EXP) as usize].push(c.clone());
                    largest = largest.max(c.abs());
                }
                Term::Var { coeff, .. } => {
                    for x in laurent {
                        for (e, a) in x.scaled(coeff).terms() {
                            if !a.is_zero() {
                                largest = largest.max(a.abs());
                                dens[(e - MIN_EXP) as usize].push(a.clone());
                            }
                        }
                    }
                }
            }
        }
        total += &largest;
    }
    let mut lb: Option<Rational> = None;
    for (slot, vals) in dens.iter().enumerate() {
        let l = denominator_lcm(vals.iter());
        let mut b = l.recip();
        if slot == (0 - MIN_EXP) as usize {
            let scaled = u * &l;
            let frac = &scaled - &scaled.floor();
            if !frac.is_zero() {
                let dist = frac.clone().min(&Rational::one() - &frac);
                b = &dist / &l;
            }
        }
        lb = Some(match lb {
            None => b,
            Some(x) => x.min(b),
        });
    }
    let lb = lb.expect("at least one exponent");
    let denom = &(&total * &Rational::from_integer(2)) + &Rational::one();
    (&lb / &denom).min(Rational::new(1, 2))
}

fn tabulate(gamma: &ValuedStructure, dom: &SampleDomain, opts: &SampleOptions) -> Result<FiniteStructure> {
    let mut out = FiniteStructure::new(dom.values.clone());
    let n = dom.values.len();
    for (name, f) in &gamma.functions {
        let size = tuple_count(n, f.arity()).map_or(u128::MAX, |s| s as u128);
        if size > opts.max_tuples as u128 {
            return Err(Error::SizeGuard { what: format!("table of `{name}`"), size, cap: opts.max_tuples as u128 });
        }
        let mut point = vec![Rational::zero(); f.arity()];
        let table = CostTable::from_fn(f.arity(), n, |t| {
            for (slot, &i) in point.iter_mut().zip(t) {
                *slot = dom.values[i].clone();
            }
            f.evaluate_cost(&point)
        });
        out.insert(name.clone(), table);
    }
    Ok(out)
}

/// Sample for instances with at most `d` variables.
pub fn build_sample(gamma: &ValuedStructure, d: usize, opts: &SampleOptions) -> Result<Sample> {
    let domain = sample_domain(gamma, d, opts, None)?;
    let structure = tabulate(gamma, &domain, opts)?;
    Ok(Sample { domain, structure })
}

/// Sample for one instance, safe for comparisons against `threshold`.
pub fn build_sample_for(
    gamma: &ValuedStructure,
    inst: &Instance,
    threshold: Option<&Rational>,
    opts: &SampleOptions,
) -> Result<Sample> {
    inst.validate(gamma)?;
    let d = opts.d.unwrap_or(inst.num_vars().max(1));
    let domain = sample_domain(gamma, d, opts, threshold.map(|u| (inst, u)))?;
    let structure = tabulate(gamma, &domain, opts)?;
    Ok(Sample { domain, structure })
}
