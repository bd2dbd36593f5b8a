//! Random structures and instances shared by the integration and acceptance
//! tests.
#![allow(dead_code)]

use plhvcsp::formula::{normalize_atom, Atom, RawRel, Term};
use plhvcsp::plh::{Application, Instance, Piece, PlhFunction, ValuedStructure};
use plhvcsp::qnum::{ExtRational, Rational};
use plhvcsp::table::{CostTable, FiniteStructure};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn q(s: &str) -> Rational {
    s.parse().expect("rational literal")
}

pub fn fin(v: i64) -> ExtRational {
    ExtRational::Finite(Rational::from_integer(v))
}

pub fn x(i: usize) -> Term {
    Term::var(i)
}

pub fn sx(c: &Rational, i: usize) -> Term {
    Term::scaled_var(c.clone(), i)
}

pub fn k(c: &Rational) -> Term {
    Term::constant(c.clone())
}

/// Pieces for `value` on the conjunction of raw comparisons; weak relations
/// split into one piece per disjunct.
pub fn pieces(guard: &[(Term, RawRel, Term)], value: Term) -> Vec<Piece> {
    let mut clauses: Vec<Vec<Atom>> = vec![Vec::new()];
    for (l, r, rhs) in guard {
        let alts = normalize_atom(l, *r, rhs);
        clauses = clauses
            .iter()
            .flat_map(|c| {
                alts.iter().map(move |a| {
                    let mut c = c.clone();
                    c.push(a.clone());
                    c
                })
            })
            .collect();
    }
    clauses
        .into_iter()
        .filter(|c| !c.contains(&Atom::False))
        .map(|c| Piece { guard: c.into_iter().filter(|a| *a != Atom::True).collect(), value: value.clone() })
        .collect()
}

pub fn function(arity: usize, parts: Vec<Vec<Piece>>) -> PlhFunction {
    PlhFunction::new(arity, parts.into_iter().flatten().collect()).expect("valid function")
}

const MAGNITUDES: [&str; 4] = ["1", "2", "1/2", "3"];
const CONSTANTS: [&str; 4] = ["0", "1", "-1", "2"];

pub fn magnitude(r: &mut StdRng) -> Rational {
    q(MAGNITUDES.choose(r).unwrap())
}

pub fn signed(r: &mut StdRng) -> Rational {
    let m = magnitude(r);
    if r.random_bool(0.5) {
        m
    } else {
        -m
    }
}

pub fn constant(r: &mut StdRng) -> Rational {
    q(CONSTANTS.choose(r).unwrap())
}

/// `max(a x0, b x1)`.
pub fn max_fn(a: &Rational, b: &Rational) -> PlhFunction {
    function(
        2,
        vec![
            pieces(&[(sx(a, 0), RawRel::Ge, sx(b, 1))], sx(a, 0)),
            pieces(&[(sx(a, 0), RawRel::Lt, sx(b, 1))], sx(b, 1)),
        ],
    )
}

/// `min(a x0, b x1)`.
pub fn min_fn(a: &Rational, b: &Rational) -> PlhFunction {
    function(
        2,
        vec![
            pieces(&[(sx(a, 0), RawRel::Le, sx(b, 1))], sx(a, 0)),
            pieces(&[(sx(a, 0), RawRel::Gt, sx(b, 1))], sx(b, 1)),
        ],
    )
}

/// `0` where `x0 rel c x1`, `+inf` elsewhere.
pub fn indicator2(rel: RawRel, c: &Rational) -> PlhFunction {
    function(2, vec![pieces(&[(x(0), rel, sx(c, 1))], k(&Rational::zero()))])
}

pub fn indicator1(rel: RawRel, c: &Rational) -> PlhFunction {
    function(1, vec![pieces(&[(x(0), rel, k(c))], k(&Rational::zero()))])
}

/// `a x0` below `c`, `b x0` from `c` on.
pub fn two_slopes(a: &Rational, b: &Rational, c: &Rational) -> PlhFunction {
    function(1, vec![pieces(&[(x(0), RawRel::Lt, k(c))], sx(a, 0)), pieces(&[(x(0), RawRel::Ge, k(c))], sx(b, 0))])
}

/// Constant `lo` below `c`, constant `hi` from `c` on.
pub fn step(lo: &Rational, hi: &Rational, c: &Rational) -> PlhFunction {
    function(1, vec![pieces(&[(x(0), RawRel::Lt, k(c))], k(lo)), pieces(&[(x(0), RawRel::Ge, k(c))], k(hi))])
}

fn finish(fs: Vec<PlhFunction>) -> ValuedStructure {
    let mut g = ValuedStructure::new();
    for (i, f) in fs.into_iter().enumerate() {
        g.insert(format!("f{i}"), f);
    }
    g
}

/// Submodular on all of `Q^n`: unary functions, `max` of same-sign slopes,
/// `min` of opposite-sign slopes, and indicators of `x0 <= c x1` with `c > 0`.
pub fn submodular_structure(r: &mut StdRng) -> ValuedStructure {
    let count = r.random_range(2..=3);
    let fs = (0..count)
        .map(|_| match r.random_range(0..6) {
            0 => function(1, vec![pieces(&[], sx(&signed(r), 0))]),
            1 => two_slopes(&signed(r), &signed(r), &constant(r)),
            2 => {
                let s = if r.random_bool(0.5) { Rational::one() } else { -Rational::one() };
                max_fn(&(&s * &magnitude(r)), &(&s * &magnitude(r)))
            }
            3 => {
                let a = magnitude(r);
                let b = -magnitude(r);
                if r.random_bool(0.5) {
                    min_fn(&a, &b)
                } else {
                    min_fn(&b, &a)
                }
            }
            4 => indicator2(*[RawRel::Le, RawRel::Lt, RawRel::Eq].choose(r).unwrap(), &magnitude(r)),
            _ => step(&Rational::from_integer(r.random_range(-2..=2)), &Rational::from_integer(r.random_range(-2..=2)), &constant(r)),
        })
        .collect();
    finish(fs)
}

/// Increasing in every argument: positive slopes, `max`/`min` of positive
/// slopes, rising steps, and indicators of down-sets.
pub fn increasing_structure(r: &mut StdRng) -> ValuedStructure {
    let count = r.random_range(2..=3);
    let fs = (0..count)
        .map(|_| match r.random_range(0..6) {
            0 => function(1, vec![pieces(&[], sx(&magnitude(r), 0))]),
            1 => two_slopes(&magnitude(r), &magnitude(r), &Rational::zero()),
            2 => max_fn(&magnitude(r), &magnitude(r)),
            3 => min_fn(&magnitude(r), &magnitude(r)),
            4 => {
                if r.random_bool(0.5) {
                    indicator2(*[RawRel::Le, RawRel::Lt].choose(r).unwrap(), &-magnitude(r))
                } else {
                    indicator1(*[RawRel::Le, RawRel::Lt].choose(r).unwrap(), &constant(r))
                }
            }
            _ => {
                let lo = r.random_range(-2..=1);
                step(&Rational::from_integer(lo), &Rational::from_integer(r.random_range(lo..=2)), &constant(r))
            }
        })
        .collect();
    finish(fs)
}

fn random_guard_atom(r: &mut StdRng, arity: usize) -> (Term, RawRel, Term) {
    let rel = *[RawRel::Lt, RawRel::Le, RawRel::Eq, RawRel::Ge, RawRel::Gt].choose(r).unwrap();
    let i = r.random_range(0..arity);
    if arity > 1 && r.random_bool(0.5) {
        let j = (i + 1) % arity;
        (x(i), rel, sx(&signed(r), j))
    } else {
        (x(i), rel, k(&constant(r)))
    }
}

/// Arbitrary guards and values, pieces may overlap.
pub fn general_structure(r: &mut StdRng) -> ValuedStructure {
    let count = r.random_range(1..=3);
    let fs = (0..count)
        .map(|_| {
            let arity = r.random_range(1..=2);
            let n = r.random_range(1..=3);
            let parts = (0..n)
                .map(|_| {
                    let g: Vec<_> = (0..r.random_range(0..=2)).map(|_| random_guard_atom(r, arity)).collect();
                    let value = if r.random_bool(0.7) {
                        sx(&signed(r), r.random_range(0..arity))
                    } else {
                        k(&Rational::from_integer(r.random_range(-2..=2)))
                    };
                    pieces(&g, value)
                })
                .collect();
            function(arity, parts)
        })
        .collect();
    finish(fs)
}

/// Relations closed under componentwise max, as 0/+inf costs.
pub fn max_closed_structure(r: &mut StdRng) -> ValuedStructure {
    let count = r.random_range(2..=3);
    let zero = k(&Rational::zero());
    let fs = (0..count)
        .map(|_| match r.random_range(0..4) {
            0 => indicator2(*[RawRel::Le, RawRel::Lt, RawRel::Eq].choose(r).unwrap(), &magnitude(r)),
            1 => indicator1(*[RawRel::Lt, RawRel::Le, RawRel::Eq, RawRel::Ge, RawRel::Gt].choose(r).unwrap(), &constant(r)),
            // x0 <= max(x1, x2)
            2 => function(
                3,
                vec![pieces(&[(x(0), RawRel::Le, x(1))], zero.clone()), pieces(&[(x(0), RawRel::Le, x(2))], zero.clone())],
            ),
            // x0 < max(c x1, k)
            _ => {
                let c = magnitude(r);
                let b = constant(r);
                function(
                    2,
                    vec![pieces(&[(x(0), RawRel::Lt, sx(&c, 1))], zero.clone()), pieces(&[(x(0), RawRel::Lt, k(&b))], zero.clone())],
                )
            }
        })
        .collect();
    finish(fs)
}

/// Up to `max_vars` variables and one to four applications.
pub fn random_instance(r: &mut StdRng, gamma: &ValuedStructure, max_vars: usize) -> Instance {
    let n = r.random_range(1..=max_vars);
    let names: Vec<&String> = gamma.functions.keys().collect();
    let apps = (0..r.random_range(1..=4))
        .map(|_| {
            let f = names.choose(r).unwrap();
            let arity = gamma.functions[*f].arity();
            Application { function: (*f).clone(), args: (0..arity).map(|_| r.random_range(0..n)).collect() }
        })
        .collect();
    Instance { variables: (0..n).map(|i| format!("v{i}")).collect(), applications: apps, threshold: None }
}

/// Random tables over `0..size` with values in `-2..=2` and some `+inf`.
pub fn random_finite_structure(r: &mut StdRng, size: usize) -> FiniteStructure {
    let mut s = FiniteStructure::with_size(size);
    for (i, arity) in [1usize, 2, 2].into_iter().enumerate() {
        let t = CostTable::from_fn(arity, size, |_| {
            if r.random_bool(0.15) {
                ExtRational::PosInf
            } else {
                fin(r.random_range(-2..=2))
            }
        });
        s.insert(format!("t{i}"), t);
    }
    s
}

pub fn random_finite_instance(r: &mut StdRng, s: &FiniteStructure, max_vars: usize) -> Instance {
    let n = r.random_range(1..=max_vars);
    let names: Vec<&String> = s.tables.keys().collect();
    let apps = (0..r.random_range(1..=4))
        .map(|_| {
            let f = names.choose(r).unwrap();
            let arity = s.tables[*f].arity();
            Application { function: (*f).clone(), args: (0..arity).map(|_| r.random_range(0..n)).collect() }
        })
        .collect();
    Instance { variables: (0..n).map(|i| format!("v{i}")).collect(), applications: apps, threshold: None }
}

/// The XOR-style table `f(a, b) = [a == b]` over `{0, 1}`.
pub fn xor_table() -> CostTable {
    CostTable::new(2, 2, vec![fin(1), fin(0), fin(0), fin(1)]).unwrap()
}

/// Restriction of a table to the domain indices in `keep` (sorted).
pub fn restrict(t: &CostTable, keep: &[usize]) -> CostTable {
    CostTable::from_fn(t.arity(), keep.len(), |tu| {
        let orig: Vec<usize> = tu.iter().map(|&i| keep[i]).collect();
        t.get(&orig).clone()
    })
}

/// Caps for the randomized suites: domain size and total number of
/// relaxation columns.
pub const MAX_SAMPLE: usize = 256;
pub const MAX_COLUMNS: usize = 80_000;

pub fn desk_scale(inst: &Instance, delta: &FiniteStructure) -> bool {
    let n = delta.size();
    let columns: usize = inst.applications.iter().map(|a| n.pow(a.args.len() as u32)).sum();
    n <= MAX_SAMPLE && columns <= MAX_COLUMNS
}
