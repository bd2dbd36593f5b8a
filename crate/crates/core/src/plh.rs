//! Piecewise-linear homogeneous cost functions and valued CSP instances.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::formula::{Atom, Dnf, Term};
use crate::qnum::{Carrier, ExtRational, Rational};

/// Variable index used for the cost value in graph atoms `v = t`.
pub const VALUE_SLOT: usize = usize::MAX;

/// One guarded linear piece: where every guard atom holds, the cost may be `value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub guard: Vec<Atom>,
    pub value: Term,
}

/// Cost function given by guarded pieces. The cost at a point is the minimum
/// value over the pieces whose guard holds there, and `+inf` if none does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlhFunction {
    arity: usize,
    pieces: Vec<Piece>,
}

impl PlhFunction {
    pub fn new(arity: usize, pieces: Vec<Piece>) -> Result<Self> {
        for (i, p) in pieces.iter().enumerate() {
            let vars = p.guard.iter().flat_map(Atom::vars).chain(p.value.variable());
            if let Some(v) = vars.into_iter().find(|v| *v >= arity) {
                return Err(Error::Invalid(format!("piece {i} mentions x{v} but the arity is {arity}")));
            }
        }
        Ok(PlhFunction { arity, pieces })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn evaluate<T: Carrier>(&self, point: &[T]) -> Option<T> {
        assert_eq!(point.len(), self.arity, "point has the wrong arity");
        self.pieces
            .iter()
            .filter(|p| p.guard.iter().all(|a| a.holds(point)))
            .map(|p| p.value.eval(point))
            .min()
    }

    pub fn evaluate_cost(&self, point: &[Rational]) -> ExtRational {
        self.evaluate(point).into()
    }

    /// The set where the cost is finite.
    pub fn domain(&self) -> Dnf {
        Dnf::from_clauses(self.pieces.iter().map(|p| p.guard.clone()).collect())
    }

    /// The same function with every value replaced by `0`.
    pub fn feasibility(&self) -> PlhFunction {
        let pieces = self.pieces.iter().map(|p| Piece { guard: p.guard.clone(), value: Term::Const(Rational::zero()) }).collect();
        PlhFunction { arity: self.arity, pieces }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValuedStructure {
    pub functions: BTreeMap<String, PlhFunction>,
}

impl ValuedStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, f: PlhFunction) {
        self.functions.insert(name.into(), f);
    }

    pub fn get(&self, name: &str) -> Option<&PlhFunction> {
        self.functions.get(name)
    }

    /// Every guard atom of every piece.
    pub fn guard_atoms(&self) -> BTreeSet<Atom> {
        self.functions.values().flat_map(|f| f.pieces.iter().flat_map(|p| p.guard.iter().cloned())).collect()
    }

    /// Guard atoms together with the graph atoms `v = t` of every piece value,
    /// where `v` is [`VALUE_SLOT`].
    pub fn signature_atoms(&self) -> BTreeSet<Atom> {
        let mut atoms = self.guard_atoms();
        for f in self.functions.values() {
            for p in &f.pieces {
                atoms.insert(Atom::eq(Term::var(VALUE_SLOT), p.value.clone()));
            }
        }
        atoms.remove(&Atom::True);
        atoms
    }

    pub fn feasibility(&self) -> ValuedStructure {
        ValuedStructure { functions: self.functions.iter().map(|(k, f)| (k.clone(), f.feasibility())).collect() }
    }

    pub fn domains(&self) -> BTreeMap<String, Dnf> {
        self.functions.iter().map(|(k, f)| (k.clone(), f.domain())).collect()
    }
}

/// One summand `f(x_{a_1}, ..., x_{a_k})` with arguments as variable indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Application {
    pub function: String,
    pub args: Vec<usize>,
}

/// A finite sum of cost-function applications over named variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub variables: Vec<String>,
    pub applications: Vec<Application>,
    pub threshold: Option<Rational>,
}

impl Instance {
    /// Builds an instance from `(function, argument names)` pairs.
    pub fn new(variables: Vec<String>, sum: &[(&str, Vec<&str>)], threshold: Option<Rational>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &variables {
            if !seen.insert(v.as_str()) {
                return Err(Error::Invalid(format!("variable `{v}` declared twice")));
            }
        }
        let index = |name: &str| {
            variables
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Invalid(format!("undeclared variable `{name}`")))
        };
        let applications = sum
            .iter()
            .map(|(f, args)| {
                Ok(Application { function: f.to_string(), args: args.iter().map(|a| index(a)).collect::<Result<_>>()? })
            })
            .collect::<Result<_>>()?;
        Ok(Instance { variables, applications, threshold })
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Checks symbols and arities against a name-to-arity lookup.
    pub fn validate_with(&self, arity: impl Fn(&str) -> Option<usize>) -> Result<()> {
        for (j, app) in self.applications.iter().enumerate() {
            let k = arity(&app.function).ok_or_else(|| Error::Invalid(format!("unknown function `{}`", app.function)))?;
            if k != app.args.len() {
                return Err(Error::Invalid(format!(
                    "application {j} passes {} arguments to `{}` of arity {k}",
                    app.args.len(),
                    app.function
                )));
            }
            if let Some(a) = app.args.iter().find(|a| **a >= self.variables.len()) {
                return Err(Error::Invalid(format!("application {j} refers to variable index {a}")));
            }
        }
        Ok(())
    }

    pub fn validate(&self, gamma: &ValuedStructure) -> Result<()> {
        self.validate_with(|f| gamma.get(f).map(PlhFunction::arity))
    }

    pub fn with_threshold(&self, u: Option<Rational>) -> Instance {
        Instance { threshold: u, ..self.clone() }
    }
}

pub fn evaluate_objective<T: Carrier>(gamma: &ValuedStructure, inst: &Instance, point: &[T]) -> Option<T> {
    let mut total: Option<T> = None;
    for app in &inst.applications {
        let f = gamma.get(&app.function).expect("validated instance");
        let args: Vec<T> = app.args.iter().map(|&i| point[i].clone()).collect();
        let v = f.evaluate(&args)?;
        total = Some(match total {
            None => v,
            Some(t) => t.plus(&v),
        });
    }
    Some(total.unwrap_or_else(|| T::from_rational(&Rational::zero())))
}

pub fn objective_cost(gamma: &ValuedStructure, inst: &Instance, point: &[Rational]) -> ExtRational {
    evaluate_objective(gamma, inst, point).into()
}
