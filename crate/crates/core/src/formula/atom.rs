use std::collections::BTreeSet;
use std::fmt;

use crate::qnum::{Carrier, Rational};

/// Either `c * x_var` or the constant `c * 1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Rational),
    Var { coeff: Rational, var: usize },
}

impl Term {
    pub fn var(var: usize) -> Self {
        Term::Var { coeff: Rational::one(), var }
    }

    pub fn scaled_var(coeff: Rational, var: usize) -> Self {
        Term::Var { coeff, var }
    }

    pub fn constant(c: Rational) -> Self {
        Term::Const(c)
    }

    pub fn coeff(&self) -> &Rational {
        match self {
            Term::Const(c) | Term::Var { coeff: c, .. } => c,
        }
    }

    pub fn variable(&self) -> Option<usize> {
        match self {
            Term::Const(_) => None,
            Term::Var { var, .. } => Some(*var),
        }
    }

    pub fn scale(&self, k: &Rational) -> Term {
        match self {
            Term::Const(c) => Term::Const(c * k),
            Term::Var { coeff, var } => Term::Var { coeff: coeff * k, var: *var },
        }
    }

    /// Replaces `x_var` by `t`; other terms are unchanged.
    pub fn substitute(&self, var: usize, t: &Term) -> Term {
        match self {
            Term::Var { coeff, var: v } if *v == var => t.scale(coeff),
            _ => self.clone(),
        }
    }

    pub fn map_vars(&self, f: &impl Fn(usize) -> usize) -> Term {
        match self {
            Term::Const(c) => Term::Const(c.clone()),
            Term::Var { coeff, var } => Term::Var { coeff: coeff.clone(), var: f(*var) },
        }
    }

    pub fn eval<T: Carrier>(&self, point: &[T]) -> T {
        match self {
            Term::Const(c) => T::from_rational(c),
            Term::Var { coeff, var } => point[*var].scaled(coeff),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Var { coeff, var } if coeff.is_one() => write!(f, "x{var}"),
            Term::Var { coeff, var } => write!(f, "{coeff}*x{var}"),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Relations the core works with. `Le` only arises as the closure of `Lt`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Rel {
    Lt,
    Eq,
    Le,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Eq => "=",
            Rel::Le => "<=",
        }
    }

    fn holds<T: Ord>(self, a: &T, b: &T) -> bool {
        match self {
            Rel::Lt => a < b,
            Rel::Eq => a == b,
            Rel::Le => a <= b,
        }
    }
}

/// Relations accepted from input files.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum RawRel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl RawRel {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "<" => RawRel::Lt,
            "<=" => RawRel::Le,
            "=" | "==" => RawRel::Eq,
            ">=" => RawRel::Ge,
            ">" => RawRel::Gt,
            _ => return None,
        })
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RawRel::Lt => "<",
            RawRel::Le => "<=",
            RawRel::Eq => "=",
            RawRel::Ge => ">=",
            RawRel::Gt => ">",
        }
    }
}

/// A normalised atom. Constructed through [`Atom::new`], which brings every
/// comparison into one of the shapes `c*1 R x`, `x R c*1` or `a*x R b*y`
/// (coefficients not both negative), or decides it outright.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    True,
    False,
    Cmp { lhs: Term, rel: Rel, rhs: Term },
}

impl Atom {
    pub fn new(lhs: Term, rel: Rel, rhs: Term) -> Atom {
        use Term::*;
        match (lhs, rhs) {
            (Const(a), Const(b)) => Atom::from_bool(rel.holds(&a, &b)),
            (Var { coeff, var }, Const(c)) => {
                if coeff.is_zero() {
                    return Atom::new(Const(Rational::zero()), rel, Const(c));
                }
                let k = &c / &coeff;
                if coeff.is_positive() || rel == Rel::Eq {
                    Atom::Cmp { lhs: Term::var(var), rel, rhs: Const(k) }
                } else {
                    Atom::Cmp { lhs: Const(k), rel, rhs: Term::var(var) }
                }
            }
            (Const(c), Var { coeff, var }) => {
                if coeff.is_zero() {
                    return Atom::new(Const(c), rel, Const(Rational::zero()));
                }
                let k = &c / &coeff;
                if rel == Rel::Eq || coeff.is_negative() {
                    Atom::Cmp { lhs: Term::var(var), rel, rhs: Const(k) }
                } else {
                    Atom::Cmp { lhs: Const(k), rel, rhs: Term::var(var) }
                }
            }
            (Var { coeff: a, var: i }, Var { coeff: b, var: j }) => {
                if i == j {
                    return Atom::new(Term::scaled_var(&a - &b, i), rel, Const(Rational::zero()));
                }
                if a.is_zero() {
                    return Atom::new(Const(Rational::zero()), rel, Term::scaled_var(b, j));
                }
                if b.is_zero() {
                    return Atom::new(Term::scaled_var(a, i), rel, Const(Rational::zero()));
                }
                let (mut l, mut r) = (Term::scaled_var(a, i), Term::scaled_var(b, j));
                if l.coeff().is_negative() && r.coeff().is_negative() {
                    let k = -Rational::one();
                    (l, r) = (r.scale(&k), l.scale(&k));
                }
                if rel == Rel::Eq && l.variable() > r.variable() {
                    std::mem::swap(&mut l, &mut r);
                }
                Atom::Cmp { lhs: l, rel, rhs: r }
            }
        }
    }

    pub fn from_bool(b: bool) -> Atom {
        if b {
            Atom::True
        } else {
            Atom::False
        }
    }

    pub fn lt(lhs: Term, rhs: Term) -> Atom {
        Atom::new(lhs, Rel::Lt, rhs)
    }

    pub fn eq(lhs: Term, rhs: Term) -> Atom {
        Atom::new(lhs, Rel::Eq, rhs)
    }

    pub fn vars(&self) -> Vec<usize> {
        match self {
            Atom::Cmp { lhs, rhs, .. } => {
                let mut v: Vec<usize> = lhs.variable().into_iter().chain(rhs.variable()).collect();
                v.dedup();
                v
            }
            _ => Vec::new(),
        }
    }

    pub fn mentions(&self, var: usize) -> bool {
        self.vars().contains(&var)
    }

    pub fn holds<T: Carrier>(&self, point: &[T]) -> bool {
        match self {
            Atom::True => true,
            Atom::False => false,
            Atom::Cmp { lhs, rel, rhs } => rel.holds(&lhs.eval(point), &rhs.eval(point)),
        }
    }

    pub fn substitute(&self, var: usize, t: &Term) -> Atom {
        match self {
            Atom::Cmp { lhs, rel, rhs } => Atom::new(lhs.substitute(var, t), *rel, rhs.substitute(var, t)),
            a => a.clone(),
        }
    }

    /// Renames variables; the result is renormalised, so identified
    /// variables may collapse the atom.
    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> Atom {
        match self {
            Atom::Cmp { lhs, rel, rhs } => Atom::new(lhs.map_vars(&f), *rel, rhs.map_vars(&f)),
            a => a.clone(),
        }
    }

    /// Topological closure: strict comparisons become weak.
    pub fn closure(&self) -> Atom {
        match self {
            Atom::Cmp { lhs, rel: Rel::Lt, rhs } => Atom::Cmp { lhs: lhs.clone(), rel: Rel::Le, rhs: rhs.clone() },
            a => a.clone(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::True => f.write_str("true"),
            Atom::False => f.write_str("false"),
            Atom::Cmp { lhs, rel, rhs } => write!(f, "{lhs} {} {rhs}", rel.symbol()),
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Normalises an input comparison. Weak and reversed relations become a
/// disjunction of strict comparisons and equalities, returned as its
/// disjuncts.
pub fn normalize_atom(lhs: &Term, rel: RawRel, rhs: &Term) -> Vec<Atom> {
    let (l, r) = (lhs.clone(), rhs.clone());
    let disjuncts = match rel {
        RawRel::Lt => vec![Atom::lt(l, r)],
        RawRel::Gt => vec![Atom::lt(r, l)],
        RawRel::Eq => vec![Atom::eq(l, r)],
        RawRel::Le => vec![Atom::lt(l.clone(), r.clone()), Atom::eq(l, r)],
        RawRel::Ge => vec![Atom::lt(r.clone(), l.clone()), Atom::eq(l, r)],
    };
    let mut out: Vec<Atom> = Vec::new();
    for a in disjuncts {
        match a {
            Atom::True => return vec![Atom::True],
            Atom::False => {}
            a if !out.contains(&a) => out.push(a),
            _ => {}
        }
    }
    out
}

/// Coefficient ratios of the atoms: `H` collects `a/b` from every `a*x R b*y`,
/// `K` collects the constant-to-coefficient ratio of every one-variable atom.
pub fn extract_hk<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> (BTreeSet<Rational>, BTreeSet<Rational>) {
    let mut h = BTreeSet::new();
    let mut k = BTreeSet::new();
    for atom in atoms {
        if let Atom::Cmp { lhs, rhs, .. } = atom {
            match (lhs, rhs) {
                (Term::Var { coeff: a, .. }, Term::Var { coeff: b, .. }) => {
                    h.insert(a / b);
                }
                (Term::Var { coeff: a, .. }, Term::Const(c)) => {
                    k.insert(c / a);
                }
                (Term::Const(c), Term::Var { coeff: a, .. }) => {
                    k.insert(c / a);
                }
                (Term::Const(_), Term::Const(_)) => {}
            }
        }
    }
    (h, k)
}
