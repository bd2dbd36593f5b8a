//! Finite valued structures given by explicit cost tables.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::plh::Instance;
use crate::qnum::{ExtRational, Rational};

/// Cost table of a `k`-ary function on `{0, .., size-1}`, stored in
/// lexicographic order of argument tuples (first coordinate most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostTable {
    arity: usize,
    size: usize,
    values: Vec<ExtRational>,
}

pub fn tuple_count(size: usize, arity: usize) -> Option<usize> {
    size.checked_pow(arity as u32)
}

impl CostTable {
    pub fn new(arity: usize, size: usize, values: Vec<ExtRational>) -> Result<Self> {
        match tuple_count(size, arity) {
            Some(n) if n == values.len() => Ok(CostTable { arity, size, values }),
            _ => Err(Error::Invalid(format!("a table of arity {arity} over {size} values needs {size}^{arity} entries"))),
        }
    }

    pub fn from_fn(arity: usize, size: usize, mut f: impl FnMut(&[usize]) -> ExtRational) -> Self {
        let n = tuple_count(size, arity).expect("table size overflows");
        let mut values = Vec::with_capacity(n);
        let mut t = vec![0usize; arity];
        for _ in 0..n {
            values.push(f(&t));
            advance(&mut t, size);
        }
        CostTable { arity, size, values }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[ExtRational] {
        &self.values
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity);
        tuple.iter().fold(0, |acc, &t| acc * self.size + t)
    }

    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        let mut t = vec![0; self.arity];
        for slot in t.iter_mut().rev() {
            *slot = index % self.size;
            index /= self.size;
        }
        t
    }

    pub fn get(&self, tuple: &[usize]) -> &ExtRational {
        &self.values[self.index(tuple)]
    }

    /// Indices of the tuples with finite cost.
    pub fn finite_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.iter().enumerate().filter(|(_, v)| v.is_finite()).map(|(i, _)| i)
    }
}

/// Steps `t` to the next tuple in lexicographic order, wrapping to all zeros.
pub fn advance(t: &mut [usize], size: usize) {
    for slot in t.iter_mut().rev() {
        *slot += 1;
        if *slot < size {
            return;
        }
        *slot = 0;
    }
}

/// A finite valued structure. The domain is `{0, .., n-1}`, ordered by index;
/// `domain[i]` is the rational that index `i` stands for.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteStructure {
    pub domain: Vec<Rational>,
    pub tables: BTreeMap<String, CostTable>,
}

impl FiniteStructure {
    pub fn new(domain: Vec<Rational>) -> Self {
        FiniteStructure { domain, tables: BTreeMap::new() }
    }

    /// Domain labelled `0, 1, .., n-1`.
    pub fn with_size(n: usize) -> Self {
        Self::new((0..n as i64).map(Rational::from_integer).collect())
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn insert(&mut self, name: impl Into<String>, table: CostTable) {
        assert_eq!(table.size(), self.size(), "table over a different domain");
        self.tables.insert(name.into(), table);
    }

    pub fn get(&self, name: &str) -> Option<&CostTable> {
        self.tables.get(name)
    }

    pub fn validate(&self, inst: &Instance) -> Result<()> {
        inst.validate_with(|f| self.tables.get(f).map(CostTable::arity))
    }

    pub fn objective(&self, inst: &Instance, assignment: &[usize]) -> ExtRational {
        let mut total = ExtRational::zero();
        for app in &inst.applications {
            let t: Vec<usize> = app.args.iter().map(|&v| assignment[v]).collect();
            total = &total + self.tables[&app.function].get(&t);
            if !total.is_finite() {
                break;
            }
        }
        total
    }
}
