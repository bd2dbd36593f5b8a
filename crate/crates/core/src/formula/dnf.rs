use std::collections::BTreeMap;
use std::fmt;

use super::atom::{Atom, Rel, Term};
use crate::qnum::{Carrier, Rational};

/// Quantifier-free formula in disjunctive normal form. No clauses means
/// false; a clause with no atoms means true.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dnf {
    clauses: Vec<Vec<Atom>>,
}

impl Dnf {
    pub fn top() -> Self {
        Dnf { clauses: vec![Vec::new()] }
    }

    pub fn bottom() -> Self {
        Dnf { clauses: Vec::new() }
    }

    pub fn atom(a: Atom) -> Self {
        Dnf::from_clauses(vec![vec![a]])
    }

    pub fn conjunction(atoms: Vec<Atom>) -> Self {
        Dnf::from_clauses(vec![atoms])
    }

    pub fn disjunction(atoms: Vec<Atom>) -> Self {
        Dnf::from_clauses(atoms.into_iter().map(|a| vec![a]).collect())
    }

    /// Drops clauses with an evident contradiction and clauses that contain
    /// another clause, so the result stays equivalent but smaller.
    pub fn from_clauses(clauses: Vec<Vec<Atom>>) -> Self {
        let mut out: Vec<Vec<Atom>> = Vec::new();
        for clause in clauses {
            if clause.contains(&Atom::False) {
                continue;
            }
            let mut c: Vec<Atom> = clause.into_iter().filter(|a| *a != Atom::True).collect();
            c.sort();
            c.dedup();
            if c.is_empty() {
                return Dnf::top();
            }
            if !contradictory(&c) {
                out.push(c);
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out.dedup();
        let mut kept: Vec<Vec<Atom>> = Vec::with_capacity(out.len());
        for c in out {
            if !kept.iter().any(|k| is_subset(k, &c)) {
                kept.push(c);
            }
        }
        kept.sort();
        Dnf { clauses: kept }
    }

    pub fn clauses(&self) -> &[Vec<Atom>] {
        &self.clauses
    }

    pub fn is_top(&self) -> bool {
        self.clauses.iter().any(Vec::is_empty)
    }

    pub fn is_bottom(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn or(&self, other: &Dnf) -> Dnf {
        Dnf::from_clauses(self.clauses.iter().chain(&other.clauses).cloned().collect())
    }

    pub fn and(&self, other: &Dnf) -> Dnf {
        let mut out = Vec::with_capacity(self.clauses.len() * other.clauses.len());
        for a in &self.clauses {
            for b in &other.clauses {
                out.push(a.iter().chain(b).cloned().collect());
            }
        }
        Dnf::from_clauses(out)
    }

    /// Negation pushed to the atoms: `!(s < t)` is `t < s or s = t`, and
    /// `!(s = t)` is `s < t or t < s`.
    pub fn negate(&self) -> Dnf {
        let mut acc = Dnf::top();
        for clause in &self.clauses {
            let mut neg = Dnf::bottom();
            for a in clause {
                neg = neg.or(&negate_atom(a));
            }
            acc = acc.and(&neg);
            if acc.is_bottom() {
                break;
            }
        }
        acc
    }

    pub fn holds<T: Carrier>(&self, point: &[T]) -> bool {
        self.clauses.iter().any(|c| c.iter().all(|a| a.holds(point)))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.clauses.iter().flatten()
    }
}

/// Whether sorted `a` is contained in sorted `b`.
fn is_subset(a: &[Atom], b: &[Atom]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.by_ref().any(|y| y == x))
}

/// Allowed signs of `s - t` as a bit set over `{-, 0, +}`.
fn signs(rel: Rel, flipped: bool) -> u8 {
    const NEG: u8 = 1;
    const ZERO: u8 = 2;
    const POS: u8 = 4;
    match (rel, flipped) {
        (Rel::Eq, _) => ZERO,
        (Rel::Lt, false) => NEG,
        (Rel::Lt, true) => POS,
        (Rel::Le, false) => NEG | ZERO,
        (Rel::Le, true) => POS | ZERO,
    }
}

/// Cheap unsatisfiability test: two atoms comparing the same pair of terms
/// with no common sign, or bounds on one variable leaving no room.
fn contradictory(clause: &[Atom]) -> bool {
    let mut pairs: BTreeMap<(&Term, &Term), u8> = BTreeMap::new();
    // Per variable: lower and upper bound with strictness.
    let mut bounds: BTreeMap<usize, (Option<(&Rational, bool)>, Option<(&Rational, bool)>)> = BTreeMap::new();
    for a in clause {
        let Atom::Cmp { lhs, rel, rhs } = a else { continue };
        let flipped = lhs > rhs;
        let key = if flipped { (rhs, lhs) } else { (lhs, rhs) };
        let allowed = pairs.entry(key).or_insert(7);
        *allowed &= signs(*rel, flipped);
        if *allowed == 0 {
            return true;
        }
        let strict = *rel == Rel::Lt;
        let (var, lo, hi) = match (lhs, rhs) {
            (Term::Var { var, coeff }, Term::Const(k)) if coeff.is_one() => (*var, (*rel == Rel::Eq).then_some(k), Some(k)),
            (Term::Const(k), Term::Var { var, coeff }) if coeff.is_one() => (*var, Some(k), (*rel == Rel::Eq).then_some(k)),
            _ => continue,
        };
        let entry = bounds.entry(var).or_default();
        if let Some(k) = lo {
            if entry.0.is_none_or(|(b, s)| k > b || (k == b && strict && !s)) {
                entry.0 = Some((k, strict));
            }
        }
        if let Some(k) = hi {
            if entry.1.is_none_or(|(b, s)| k < b || (k == b && strict && !s)) {
                entry.1 = Some((k, strict));
            }
        }
        if let (Some((l, ls)), Some((h, hs))) = *entry {
            if l > h || (l == h && (ls || hs)) {
                return true;
            }
        }
    }
    false
}

fn negate_atom(a: &Atom) -> Dnf {
    match a {
        Atom::True => Dnf::bottom(),
        Atom::False => Dnf::top(),
        Atom::Cmp { lhs, rel, rhs } => {
            let (s, t) = (lhs.clone(), rhs.clone());
            match rel {
                Rel::Lt => Dnf::disjunction(vec![Atom::lt(t.clone(), s.clone()), Atom::eq(s, t)]),
                Rel::Eq => Dnf::disjunction(vec![Atom::lt(s.clone(), t.clone()), Atom::lt(t, s)]),
                Rel::Le => Dnf::atom(Atom::lt(t, s)),
            }
        }
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bottom() {
            return f.write_str("false");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            if c.is_empty() {
                f.write_str("true")?;
            }
            for (j, a) in c.iter().enumerate() {
                if j > 0 {
                    f.write_str(" & ")?;
                }
                write!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
