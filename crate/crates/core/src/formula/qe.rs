use super::atom::{Atom, Rel, Term};
use super::dnf::Dnf;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// Prenex formula: quantifier prefix (outermost first) over a DNF matrix.
#[derive(Clone, Debug)]
pub struct PrenexFormula {
    pub prefix: Vec<(Quantifier, usize)>,
    pub matrix: Dnf,
}

/// Equivalent quantifier-free formula. Quantifiers are removed innermost
/// first; a universal is handled as a negated existential.
pub fn eliminate_quantifiers(f: &PrenexFormula) -> Dnf {
    let mut m = f.matrix.clone();
    for &(q, x) in f.prefix.iter().rev() {
        m = match q {
            Quantifier::Exists => exists(x, &m),
            Quantifier::Forall => exists(x, &m.negate()).negate(),
        };
    }
    m
}

pub fn exists(x: usize, f: &Dnf) -> Dnf {
    let mut out = Dnf::bottom();
    for clause in f.clauses() {
        out = out.or(&exists_clause(x, clause));
        if out.is_top() {
            break;
        }
    }
    out
}

/// Solves `x` out of the first equality mentioning it, if any.
fn solve_equality(x: usize, a: &Atom) -> Option<Term> {
    let Atom::Cmp { lhs, rel: Rel::Eq, rhs } = a else { return None };
    let (own, other) = match (lhs.variable(), rhs.variable()) {
        (Some(v), _) if v == x => (lhs, rhs),
        (_, Some(v)) if v == x => (rhs, lhs),
        _ => return None,
    };
    Some(other.scale(&own.coeff().recip()))
}

struct Bound {
    term: Term,
    strict: bool,
}

fn exists_clause(x: usize, clause: &[Atom]) -> Dnf {
    if let Some((i, t)) = clause.iter().enumerate().find_map(|(i, a)| solve_equality(x, a).map(|t| (i, t))) {
        let rest = clause.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, a)| a.substitute(x, &t)).collect();
        return Dnf::conjunction(rest);
    }
    let mut lower: Vec<Bound> = Vec::new();
    let mut upper: Vec<Bound> = Vec::new();
    let mut rest: Vec<Atom> = Vec::new();
    for a in clause {
        let Atom::Cmp { lhs, rel, rhs } = a else {
            rest.push(a.clone());
            continue;
        };
        let strict = *rel == Rel::Lt;
        if lhs.variable() == Some(x) {
            // c*x R t
            let c = lhs.coeff();
            let b = Bound { term: rhs.scale(&c.recip()), strict };
            if c.is_positive() {
                upper.push(b)
            } else {
                lower.push(b)
            }
        } else if rhs.variable() == Some(x) {
            // t R c*x
            let c = rhs.coeff();
            let b = Bound { term: lhs.scale(&c.recip()), strict };
            if c.is_positive() {
                lower.push(b)
            } else {
                upper.push(b)
            }
        } else {
            rest.push(a.clone());
        }
    }
    for l in &lower {
        for u in &upper {
            let rel = if l.strict || u.strict { Rel::Lt } else { Rel::Le };
            rest.push(Atom::new(l.term.clone(), rel, u.term.clone()));
        }
    }
    Dnf::conjunction(rest)
}
