//! Atoms over `(Q; <, 1, scalar multiples)`, DNF formulas, and quantifier
//! elimination.

mod atom;
mod dnf;
mod qe;

pub use atom::{extract_hk, normalize_atom, Atom, RawRel, Rel, Term};
pub use dnf::Dnf;
pub use qe::{eliminate_quantifiers, exists, PrenexFormula, Quantifier};
