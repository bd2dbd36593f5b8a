//! Floating-point revised simplex used to guess a starting basis for the exact
//! solver. Nothing it returns is trusted: the exact solver re-derives the
//! basic solution and carries on pivoting from there.

use super::Column;
use crate::qnum::Rational;

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-7;
const REFACTOR_EVERY: usize = 1000;

struct FloatSimplex {
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    basic: Vec<bool>,
    /// Row-major `m x m`.
    binv: Vec<f64>,
    xb: Vec<f64>,
    since_refactor: usize,
}

impl FloatSimplex {
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let w = 2 * m;
        let mut a = vec![0.0; m * w];
        for (k, &c) in self.basis.iter().enumerate() {
            for &(i, v) in &self.cols[c] {
                a[i * w + k] = v;
            }
        }
        for i in 0..m {
            a[i * w + m + i] = 1.0;
        }
        for c in 0..m {
            let p = (c..m).max_by(|&x, &y| a[x * w + c].abs().total_cmp(&a[y * w + c].abs())).expect("rows");
            if a[p * w + c].abs() < 1e-12 {
                return false;
            }
            if p != c {
                for j in 0..w {
                    a.swap(p * w + j, c * w + j);
                }
            }
            let inv = 1.0 / a[c * w + c];
            for j in 0..w {
                a[c * w + j] *= inv;
            }
            let pivot: Vec<f64> = a[c * w..(c + 1) * w].to_vec();
            for i in 0..m {
                let f = a[i * w + c];
                if i != c && f != 0.0 {
                    for (j, pv) in pivot.iter().enumerate() {
                        if *pv != 0.0 {
                            a[i * w + j] -= f * pv;
                        }
                    }
                }
            }
        }
        for i in 0..m {
            self.binv[i * m..(i + 1) * m].copy_from_slice(&a[i * w + m..(i + 1) * w]);
        }
        for i in 0..m {
            self.xb[i] = (0..m).map(|j| self.binv[i * m + j] * self.b[j]).sum::<f64>().max(0.0);
        }
        self.since_refactor = 0;
        true
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (k, &c) in self.basis.iter().enumerate() {
            if cost[c] != 0.0 {
                for (yi, bi) in y.iter_mut().zip(&self.binv[k * m..(k + 1) * m]) {
                    *yi += cost[c] * bi;
                }
            }
        }
        y
    }

    /// Primal simplex with devex pricing.
    fn optimize(&mut self, cost: &[f64], limit: usize, max_iter: &mut usize) -> bool {
        let m = self.m;
        let mut y = self.duals(cost);
        let mut weight = vec![1.0f64; limit];
        loop {
            if *max_iter == 0 {
                return true;
            }
            *max_iter -= 1;
            if self.since_refactor >= REFACTOR_EVERY {
                if !self.refactor() {
                    return false;
                }
                y = self.duals(cost);
            }
            let mut entering = None;
            let mut best = 0.0;
            let mut dq = 0.0;
            for j in 0..limit {
                if self.basic[j] {
                    continue;
                }
                let d = cost[j] - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>();
                if d < -COST_TOL && d * d / weight[j] > best {
                    best = d * d / weight[j];
                    dq = d;
                    entering = Some(j);
                }
            }
            let Some(q) = entering else { return true };
            let alpha: Vec<f64> = (0..m)
                .map(|k| self.cols[q].iter().map(|&(i, a)| self.binv[k * m + i] * a).sum())
                .collect();
            let mut leave: Option<(usize, f64)> = None;
            for (k, &a) in alpha.iter().enumerate() {
                let pinned = self.basis[k] >= limit && a.abs() > PIVOT_TOL;
                if !pinned && a <= PIVOT_TOL {
                    continue;
                }
                let ratio = if pinned { 0.0 } else { self.xb[k] / a };
                let take = match leave {
                    None => true,
                    Some((r, br)) => ratio < br - 1e-12 || (ratio <= br + 1e-12 && a.abs() > alpha[r].abs()),
                };
                if take {
                    leave = Some((k, ratio));
                }
            }
            let Some((r, step)) = leave else { return true };
            let arq = alpha[r];
            let row_r: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let wq = weight[q];
            for j in 0..limit {
                if self.basic[j] || j == q {
                    continue;
                }
                let arj: f64 = self.cols[j].iter().map(|&(i, a)| row_r[i] * a).sum();
                if arj != 0.0 {
                    let ratio = arj / arq;
                    weight[j] = weight[j].max(ratio * ratio * wq);
                }
            }
            let leaving = self.basis[r];
            if leaving < limit {
                weight[leaving] = (wq / (arq * arq)).max(1.0);
            }
            for (k, a) in alpha.iter().enumerate() {
                if k != r {
                    self.xb[k] = (self.xb[k] - a * step).max(0.0);
                }
            }
            self.xb[r] = step;
            let inv = 1.0 / arq;
            let pivot: Vec<f64> = row_r.iter().map(|v| v * inv).collect();
            for (k, &a) in alpha.iter().enumerate() {
                if k == r || a == 0.0 {
                    continue;
                }
                for (dst, pv) in self.binv[k * m..(k + 1) * m].iter_mut().zip(&pivot) {
                    *dst -= a * pv;
                }
            }
            for (yi, pv) in y.iter_mut().zip(&pivot) {
                *yi += dq * pv;
            }
            self.binv[r * m..(r + 1) * m].copy_from_slice(&pivot);
            self.basic[leaving] = false;
            self.basic[q] = true;
            self.basis[r] = q;
            self.since_refactor += 1;
        }
    }
}

/// Runs both phases in floating point from the slack/artificial `basis` and
/// returns the final basis, with the row duals when phase 2 was reached.
/// `None` if the run broke down numerically.
pub(super) fn guess_basis(
    cols: &[Column],
    cost: &[Rational],
    first_artificial: usize,
    basis: &[usize],
    b: &[Rational],
) -> Option<(Vec<usize>, Option<Vec<f64>>)> {
    let m = basis.len();
    let ncols = cols.len();
    let mut basic = vec![false; ncols];
    for &c in basis {
        basic[c] = true;
    }
    let mut s = FloatSimplex {
        m,
        cols: cols.iter().map(|c| c.iter().map(|(i, a)| (*i, a.to_f64())).collect()).collect(),
        b: b.iter().map(|v| v.to_f64()).collect(),
        basis: basis.to_vec(),
        basic,
        binv: vec![0.0; m * m],
        xb: vec![0.0; m],
        since_refactor: 0,
    };
    if !s.refactor() {
        return None;
    }
    let mut budget = 20 * (m + ncols);
    if first_artificial < ncols {
        let phase1: Vec<f64> = (0..ncols).map(|j| if j >= first_artificial { 1.0 } else { 0.0 }).collect();
        if !s.optimize(&phase1, ncols, &mut budget) {
            return None;
        }
        let infeas: f64 = (0..m).filter(|&r| s.basis[r] >= first_artificial).map(|r| s.xb[r]).sum();
        if infeas > 1e-6 {
            return Some((s.basis, None));
        }
    }
    let cost: Vec<f64> = cost.iter().map(|c| c.to_f64()).collect();
    if !s.optimize(&cost, first_artificial, &mut budget) {
        return None;
    }
    let duals = s.refactor().then(|| s.duals(&cost));
    Some((s.basis, duals))
}
