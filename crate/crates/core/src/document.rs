//! JSON file format for structures and instances.
//!
//! ```json
//! {"structure": {"g": {"arity": 2, "pieces": [
//!     {"guard": [{"lhs": {"coeff": "1", "var": 0}, "rel": "<=", "rhs": {"coeff": "2", "var": 1}}],
//!      "value": {"coeff": "-1", "var": 0}}]}},
//!  "instance": {"variables": ["x", "y"], "sum": [{"f": "g", "args": ["x", "y"]}], "threshold": "0"}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{normalize_atom, Dnf, RawRel, Term};
use crate::plh::{Instance, Piece, PlhFunction, ValuedStructure};
use crate::qnum::Rational;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coeff: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub lhs: TermDoc,
    pub rel: String,
    pub rhs: TermDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    #[serde(default)]
    pub guard: Vec<AtomDoc>,
    pub value: TermDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDoc {
    pub arity: usize,
    pub pieces: Vec<PieceDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplicationDoc {
    pub f: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub variables: Vec<String>,
    pub sum: Vec<ApplicationDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<Rational>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub structure: BTreeMap<String, FunctionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceDoc>,
}

/// A parsed structure with an optional instance over it.
#[derive(Clone, Debug)]
pub struct Problem {
    pub structure: ValuedStructure,
    pub instance: Option<Instance>,
}

impl Problem {
    pub fn instance(&self) -> Result<&Instance> {
        self.instance.as_ref().ok_or_else(|| Error::Invalid("the file has no instance".into()))
    }
}

impl TermDoc {
    fn to_term(&self) -> Term {
        match self.var {
            Some(v) => Term::scaled_var(self.coeff.clone(), v),
            None => Term::Const(self.coeff.clone()),
        }
    }

    fn from_term(t: &Term) -> TermDoc {
        TermDoc { coeff: t.coeff().clone(), var: t.variable() }
    }
}

impl FunctionDoc {
    /// Weak comparisons in a guard split the piece into several pieces with
    /// the same value, one per disjunct of the guard's normal form.
    pub fn to_function(&self) -> Result<PlhFunction> {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let mut guard = Dnf::top();
            for a in &p.guard {
                let rel = RawRel::parse(&a.rel).ok_or_else(|| Error::Parse(format!("unknown relation {:?}", a.rel)))?;
                guard = guard.and(&Dnf::disjunction(normalize_atom(&a.lhs.to_term(), rel, &a.rhs.to_term())));
            }
            let value = p.value.to_term();
            for clause in guard.clauses() {
                pieces.push(Piece { guard: clause.clone(), value: value.clone() });
            }
        }
        PlhFunction::new(self.arity, pieces)
    }

    pub fn from_function(f: &PlhFunction) -> FunctionDoc {
        let pieces = f
            .pieces()
            .iter()
            .map(|p| PieceDoc {
                guard: p
                    .guard
                    .iter()
                    .filter_map(|a| match a {
                        crate::formula::Atom::Cmp { lhs, rel, rhs } => Some(AtomDoc {
                            lhs: TermDoc::from_term(lhs),
                            rel: rel.symbol().to_string(),
                            rhs: TermDoc::from_term(rhs),
                        }),
                        _ => None,
                    })
                    .collect(),
                value: TermDoc::from_term(&p.value),
            })
            .collect();
        FunctionDoc { arity: f.arity(), pieces }
    }
}

impl Document {
    pub fn parse(json: &str) -> Result<Document> {
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_problem(&self) -> Result<Problem> {
        let mut structure = ValuedStructure::new();
        for (name, f) in &self.structure {
            structure.insert(name.clone(), f.to_function().map_err(|e| Error::Invalid(format!("function `{name}`: {e}")))?);
        }
        let instance = match &self.instance {
            None => None,
            Some(doc) => {
                let sum: Vec<(&str, Vec<&str>)> =
                    doc.sum.iter().map(|a| (a.f.as_str(), a.args.iter().map(String::as_str).collect())).collect();
                let inst = Instance::new(doc.variables.clone(), &sum, doc.threshold.clone())?;
                inst.validate(&structure)?;
                Some(inst)
            }
        };
        Ok(Problem { structure, instance })
    }

    pub fn from_problem(structure: &ValuedStructure, instance: Option<&Instance>) -> Document {
        Document {
            structure: structure.functions.iter().map(|(k, f)| (k.clone(), FunctionDoc::from_function(f))).collect(),
            instance: instance.map(|i| InstanceDoc {
                variables: i.variables.clone(),
                sum: i
                    .applications
                    .iter()
                    .map(|a| ApplicationDoc { f: a.function.clone(), args: a.args.iter().map(|&v| i.variables[v].clone()).collect() })
                    .collect(),
                threshold: i.threshold.clone(),
            }),
        }
    }
}

pub fn parse_problem(json: &str) -> Result<Problem> {
    Document::parse(json)?.to_problem()
}
