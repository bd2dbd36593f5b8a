//! Operations and fractional operations on finite ordered domains, the
//! improvement check, multiset structures and fractional homomorphisms.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::qnum::{ExtRational, Rational};
use crate::table::{advance, tuple_count, CostTable, FiniteStructure};

/// A `k`-ary operation on `{0, .., size-1}` as a lookup table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    arity: usize,
    size: usize,
    table: Vec<usize>,
}

impl Operation {
    pub fn from_fn(arity: usize, size: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let n = tuple_count(size, arity).expect("operation table too large");
        let mut t = vec![0; arity];
        let mut table = Vec::with_capacity(n);
        for _ in 0..n {
            let v = f(&t);
            assert!(v < size, "operation leaves the domain");
            table.push(v);
            advance(&mut t, size);
        }
        Operation { arity, size, table }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        self.table[args.iter().fold(0, |acc, &a| acc * self.size + a)]
    }

    /// Invariant under every permutation of the arguments.
    pub fn is_fully_symmetric(&self) -> bool {
        let mut t = vec![0; self.arity];
        for i in 0..self.table.len() {
            let mut s = t.clone();
            s.sort_unstable();
            if self.apply(&s) != self.table[i] {
                return false;
            }
            advance(&mut t, self.size);
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Min,
    Max,
    /// `i`-th smallest argument, counting from 1.
    KthSmallest(usize),
    /// Lower median, the `ceil(k/2)`-th smallest argument.
    Median,
    /// Arithmetic mean of the domain values; must land in the domain.
    Avg,
}

pub fn builtin_operation(kind: Builtin, k: usize, domain: &[Rational]) -> Result<Operation> {
    if k == 0 {
        return Err(Error::Invalid("operations need at least one argument".into()));
    }
    let n = domain.len();
    let order_stat = |i: usize| {
        move |t: &[usize]| {
            let mut s = t.to_vec();
            s.sort_unstable();
            s[i]
        }
    };
    Ok(match kind {
        Builtin::Min => Operation::from_fn(k, n, |t| *t.iter().min().expect("k > 0")),
        Builtin::Max => Operation::from_fn(k, n, |t| *t.iter().max().expect("k > 0")),
        Builtin::KthSmallest(i) => {
            if i == 0 || i > k {
                return Err(Error::Invalid(format!("order statistic {i} of {k} arguments")));
            }
            Operation::from_fn(k, n, order_stat(i - 1))
        }
        Builtin::Median => Operation::from_fn(k, n, order_stat(k.div_ceil(2) - 1)),
        Builtin::Avg => {
            let kq = Rational::from_integer(k as i64);
            let mut t = vec![0; k];
            for _ in 0..tuple_count(n, k).expect("operation table too large") {
                let avg = &t.iter().map(|&i| &domain[i]).sum::<Rational>() / &kq;
                if domain.binary_search(&avg).is_err() {
                    return Err(Error::DomainNotClosed(format!("average {avg} of {:?}", t.iter().map(|&i| &domain[i]).collect::<Vec<_>>())));
                }
                advance(&mut t, n);
            }
            Operation::from_fn(k, n, |t| {
                let avg = &t.iter().map(|&i| &domain[i]).sum::<Rational>() / &kq;
                domain.binary_search(&avg).expect("checked above")
            })
        }
    })
}

/// Probability distribution over `k`-ary operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalOperation {
    arity: usize,
    support: Vec<(Operation, Rational)>,
}

impl FractionalOperation {
    pub fn new(support: Vec<(Operation, Rational)>) -> Result<Self> {
        let Some(arity) = support.first().map(|(g, _)| g.arity()) else {
            return Err(Error::EmptyInput("fractional operation with empty support"));
        };
        if support.iter().any(|(g, w)| g.arity() != arity || !w.is_positive()) {
            return Err(Error::Invalid("support operations need equal arity and positive weights".into()));
        }
        if support.iter().map(|(_, w)| w).sum::<Rational>() != Rational::one() {
            return Err(Error::Invalid("weights must sum to one".into()));
        }
        Ok(FractionalOperation { arity, support })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn support(&self) -> &[(Operation, Rational)] {
        &self.support
    }

    pub fn is_fully_symmetric(&self) -> bool {
        self.support.iter().all(|(g, _)| g.is_fully_symmetric())
    }

    /// Uniform over all `k` order statistics.
    pub fn sub(k: usize, domain: &[Rational]) -> Result<Self> {
        let w = Rational::new(1, k as i64);
        Self::new((1..=k).map(|i| Ok((builtin_operation(Builtin::KthSmallest(i), k, domain)?, w.clone()))).collect::<Result<_>>()?)
    }

    pub fn single(kind: Builtin, k: usize, domain: &[Rational]) -> Result<Self> {
        Self::new(vec![(builtin_operation(kind, k, domain)?, Rational::one())])
    }
}

/// Argument tuples `t^1..t^k` on which the improvement inequality fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub tuples: Vec<Vec<usize>>,
    pub lhs: ExtRational,
    pub rhs: Rational,
}

pub const DEFAULT_MAX_CHECKS: u128 = 20_000_000;

/// Checks `sum_g w(g) f(g(t^1, .., t^k)) <= (1/k) sum_i f(t^i)` for all
/// `k`-tuples of argument tuples with finite cost. Returns the first
/// violation in lexicographic order.
pub fn improvement_violation(omega: &FractionalOperation, table: &CostTable, max_checks: u128) -> Result<Option<Violation>> {
    let k = omega.arity();
    let dom: Vec<usize> = table.finite_indices().collect();
    let checks = (dom.len() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if checks > max_checks {
        return Err(Error::SizeGuard { what: "improvement checks".into(), size: checks, cap: max_checks });
    }
    if dom.is_empty() {
        return Ok(None);
    }
    let tuples: Vec<Vec<usize>> = dom.iter().map(|&i| table.tuple(i)).collect();
    let kq = Rational::from_integer(k as i64);
    let n = table.arity();
    let mut pick = vec![0usize; k];
    let mut column = vec![0usize; k];
    let mut image = vec![0usize; n];
    for _ in 0..checks {
        let rhs = &pick.iter().map(|&p| table.values()[dom[p]].finite().expect("finite")).sum::<Rational>() / &kq;
        let mut lhs = ExtRational::zero();
        for (g, w) in omega.support() {
            for (l, slot) in image.iter_mut().enumerate() {
                for (c, &p) in column.iter_mut().zip(&pick) {
                    *c = tuples[p][l];
                }
                *slot = g.apply(&column);
            }
            lhs = &lhs + &table.get(&image).scale(w);
            if !lhs.is_finite() {
                break;
            }
        }
        if lhs > ExtRational::Finite(rhs.clone()) {
            return Ok(Some(Violation { tuples: pick.iter().map(|&p| tuples[p].clone()).collect(), lhs, rhs }));
        }
        advance(&mut pick, dom.len());
    }
    Ok(None)
}

pub fn improves(omega: &FractionalOperation, table: &CostTable) -> Result<bool> {
    Ok(improvement_violation(omega, table, DEFAULT_MAX_CHECKS)?.is_none())
}

/// First cost function of the structure not improved by `omega`.
pub fn structure_violation(delta: &FiniteStructure, omega: &FractionalOperation) -> Result<Option<(String, Violation)>> {
    for (name, t) in &delta.tables {
        if let Some(v) = improvement_violation(omega, t, DEFAULT_MAX_CHECKS)? {
            return Ok(Some((name.clone(), v)));
        }
    }
    Ok(None)
}

/// A pair `(a, b)` with `f(a) + f(b) < f(min(a,b)) + f(max(a,b))`.
pub fn submodularity_witness(table: &CostTable) -> Option<(Vec<usize>, Vec<usize>)> {
    let dom: Vec<usize> = table.finite_indices().collect();
    for (i, &ai) in dom.iter().enumerate() {
        let a = table.tuple(ai);
        for &bi in &dom[i + 1..] {
            let b = table.tuple(bi);
            let lo: Vec<usize> = a.iter().zip(&b).map(|(x, y)| *x.min(y)).collect();
            let hi: Vec<usize> = a.iter().zip(&b).map(|(x, y)| *x.max(y)).collect();
            let lhs = &table.values()[ai] + &table.values()[bi];
            let rhs = table.get(&lo) + table.get(&hi);
            if lhs < rhs {
                return Some((a, b));
            }
        }
    }
    None
}

/// A pair `(a, b)` with `b` one step above `a` in a single coordinate and
/// `f(a) > f(b)`.
pub fn increasing_witness(table: &CostTable) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = table.size();
    for i in 0..table.values().len() {
        let a = table.tuple(i);
        for l in 0..a.len() {
            if a[l] + 1 < n {
                let mut b = a.clone();
                b[l] += 1;
                if table.values()[i] > *table.get(&b) {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

/// All sorted `m`-element multisets of `{0, .., n-1}`, lexicographically.
pub fn multisets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(n, m, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, m, 0, &mut Vec::with_capacity(m), &mut out);
    out
}

fn distinct_permutations(v: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = v.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    // Lexicographic next-permutation enumerates each arrangement once.
    loop {
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else { return out };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// Structure on `m`-element multisets with `f(A_1, .., A_k)` the least mean
/// of `f` over the `m` rows of any arrangement of the multisets as columns.
/// Returns the structure and its domain as sorted multisets.
pub fn multiset_structure(delta: &FiniteStructure, m: usize, max_entries: u128) -> Result<(FiniteStructure, Vec<Vec<usize>>)> {
    if m == 0 {
        return Err(Error::Invalid("multisets need at least one element".into()));
    }
    let dom = multisets(delta.size(), m);
    let perms: Vec<Vec<Vec<usize>>> = dom.iter().map(|a| distinct_permutations(a)).collect();
    let mq = Rational::from_integer(m as i64);
    let mut out = FiniteStructure::with_size(dom.len());
    for (name, f) in &delta.tables {
        let k = f.arity();
        let entries = (dom.len() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if entries > max_entries {
            return Err(Error::SizeGuard { what: format!("multiset table of `{name}`"), size: entries, cap: max_entries });
        }
        let table = CostTable::from_fn(k, dom.len(), |cols| {
            if k == 0 {
                return f.get(&[]).scale(&Rational::one());
            }
            // The first column can stay sorted since rows may be reordered.
            let mut choice = vec![0usize; k];
            let mut best = ExtRational::PosInf;
            loop {
                let mut total = ExtRational::zero();
                let mut row = vec![0usize; k];
                for i in 0..m {
                    row[0] = dom[cols[0]][i];
                    for c in 1..k {
                        row[c] = perms[cols[c]][choice[c]][i];
                    }
                    total = &total + f.get(&row);
                    if !total.is_finite() {
                        break;
                    }
                }
                if total < best {
                    best = total;
                }
                let mut c = k;
                loop {
                    c -= 1;
                    if c == 0 {
                        return best.scale(&mq.recip());
                    }
                    choice[c] += 1;
                    if choice[c] < perms[cols[c]].len() {
                        break;
                    }
                    choice[c] = 0;
                }
            }
        });
        out.insert(name.clone(), table);
    }
    Ok((out, dom))
}

/// Weighted maps `g: D -> C` witnessing a fractional homomorphism.
pub type HomWitness = Vec<(Vec<usize>, Rational)>;

/// Searches for a probability distribution over maps from the domain of
/// `delta` to the domain of `gamma` with `sum_g w(g) f^gamma(g(a)) <=
/// f^delta(a)` for every symbol `f` and tuple `a`, by solving an LP over
/// all maps.
pub fn fractional_homomorphism(delta: &FiniteStructure, gamma: &FiniteStructure, max_maps: u128) -> Result<Option<HomWitness>> {
    for (name, t) in &delta.tables {
        match gamma.get(name) {
            Some(g) if g.arity() == t.arity() => {}
            _ => return Err(Error::Invalid(format!("`{name}` is missing or has another arity in the target"))),
        }
    }
    let (nd, nc) = (delta.size(), gamma.size());
    let count = (nc as u128).checked_pow(nd as u32).unwrap_or(u128::MAX);
    if count > max_maps {
        return Err(Error::SizeGuard { what: "maps between domains".into(), size: count, cap: max_maps });
    }
    let rows: Vec<(&CostTable, &CostTable, Vec<usize>, Rational)> = delta
        .tables
        .iter()
        .flat_map(|(name, t)| {
            let g = &gamma.tables[name];
            t.finite_indices().map(move |i| (t, g, t.tuple(i), t.values()[i].finite().expect("finite").clone()))
        })
        .collect();
    let mut lp = LinearProgram::new();
    let mut maps: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut coeffs: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows.len()];
    let mut g = vec![0usize; nd];
    'maps: for _ in 0..count {
        let mut entries = Vec::with_capacity(rows.len());
        for (r, (_, target, a, _)) in rows.iter().enumerate() {
            let image: Vec<usize> = a.iter().map(|&x| g[x]).collect();
            match target.get(&image) {
                ExtRational::Finite(c) => entries.push((r, c.clone())),
                ExtRational::PosInf => {
                    advance(&mut g, nc);
                    continue 'maps;
                }
            }
        }
        let v = lp.add_nonneg(format!("w{}", maps.len()));
        for (r, c) in entries {
            coeffs[r].push((v, c));
        }
        maps.push((g.clone(), v));
        advance(&mut g, nc);
    }
    if maps.is_empty() {
        return Ok(None);
    }
    for (r, row) in coeffs.into_iter().enumerate() {
        lp.add_constraint(row, Relation::Le, rows[r].3.clone());
    }
    lp.add_constraint(maps.iter().map(|(_, v)| (*v, Rational::one())).collect(), Relation::Eq, Rational::one());
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    Ok(Some(maps.into_iter().filter(|(_, v)| sol.point[*v].is_positive()).map(|(g, v)| (g, sol.point[v].clone())).collect()))
}
