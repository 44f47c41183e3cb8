//! Exact sparse Gaussian elimination and reachability on indexed graphs.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{One, Zero};

use crate::scalar::Rational;

/// Sparse square system `A x = b` over the rationals.
pub(crate) struct SparseSystem {
    rows: Vec<BTreeMap<usize, Rational>>,
    rhs: Vec<Rational>,
}

impl SparseSystem {
    pub(crate) fn new(n: usize) -> Self {
        SparseSystem {
            rows: vec![BTreeMap::new(); n],
            rhs: vec![Rational::zero(); n],
        }
    }

    pub(crate) fn add(&mut self, row: usize, col: usize, value: &Rational) {
        let entry = self.rows[row].entry(col).or_insert_with(Rational::zero);
        *entry += value;
        if entry.is_zero() {
            self.rows[row].remove(&col);
        }
    }

    pub(crate) fn add_rhs(&mut self, row: usize, value: &Rational) {
        self.rhs[row] += value;
    }

    /// Solves by elimination with a sparsest-row pivot. Returns `None` when
    /// the system is singular.
    pub(crate) fn solve(mut self) -> Option<Vec<Rational>> {
        let n = self.rows.len();
        let mut order: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot = (k..n)
                .filter(|&i| self.rows[order[i]].contains_key(&k))
                .min_by_key(|&i| self.rows[order[i]].len())?;
            order.swap(k, pivot);
            let p = order[k];
            let pivot_row = std::mem::take(&mut self.rows[p]);
            let pivot_rhs = self.rhs[p].clone();
            let diag = pivot_row[&k].clone();
            for &r in &order[k + 1..] {
                let Some(f) = self.rows[r].get(&k).cloned() else {
                    continue;
                };
                let factor = f / &diag;
                for (c, v) in &pivot_row {
                    let entry = self.rows[r].entry(*c).or_insert_with(Rational::zero);
                    *entry -= &factor * v;
                    if entry.is_zero() {
                        self.rows[r].remove(c);
                    }
                }
                let delta = &factor * &pivot_rhs;
                self.rhs[r] -= delta;
            }
            self.rows[p] = pivot_row;
        }
        let mut x = vec![Rational::zero(); n];
        for k in (0..n).rev() {
            let p = order[k];
            let mut acc = self.rhs[p].clone();
            let mut diag = None;
            for (c, v) in &self.rows[p] {
                if *c == k {
                    diag = Some(v);
                } else {
                    acc -= v * &x[*c];
                }
            }
            x[k] = acc / diag?;
        }
        Some(x)
    }
}

/// Positive-probability graph on indices `0..n` with exact row weights.
pub(crate) type Rows = Vec<Vec<(usize, Rational)>>;

/// States that can reach `target` along positive edges.
pub(crate) fn can_reach(rows: &Rows, target: &[bool]) -> Vec<bool> {
    let n = rows.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, row) in rows.iter().enumerate() {
        for (u, _) in row {
            preds[*u].push(s);
        }
    }
    let mut seen = target.to_vec();
    let mut queue: VecDeque<usize> = (0..n).filter(|&s| target[s]).collect();
    while let Some(u) = queue.pop_front() {
        for &s in &preds[u] {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
    }
    seen
}

/// `h(s) = P_s(τ_target < ∞)`: 1 on the target, 0 where the target is
/// unreachable, and the unique solution of `h = P h` elsewhere.
pub(crate) fn reach_values(rows: &Rows, target: &[bool]) -> Vec<Rational> {
    let n = rows.len();
    let reach = can_reach(rows, target);
    let unknown: Vec<usize> = (0..n).filter(|&s| reach[s] && !target[s]).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &s) in unknown.iter().enumerate() {
        slot[s] = k;
    }
    let mut system = SparseSystem::new(unknown.len());
    for (k, &s) in unknown.iter().enumerate() {
        system.add(k, k, &Rational::one());
        for (u, p) in &rows[s] {
            if target[*u] {
                system.add_rhs(k, p);
            } else if reach[*u] {
                system.add(k, slot[*u], &-p.clone());
            }
        }
    }
    let solution = system
        .solve()
        .expect("reachability system is nonsingular once non-reaching states are removed");
    let mut h = vec![Rational::zero(); n];
    for s in 0..n {
        if target[s] {
            h[s] = Rational::one();
        } else if reach[s] {
            h[s] = solution[slot[s]].clone();
        }
    }
    h
}

/// Expected number of steps to reach `target`, `None` where the target is not
/// reached almost surely.
pub(crate) fn expected_steps(rows: &Rows, target: &[bool]) -> Vec<Option<Rational>> {
    let n = rows.len();
    let h = reach_values(rows, target);
    let sure: Vec<bool> = h.iter().map(|v| v.is_one()).collect();
    let unknown: Vec<usize> = (0..n).filter(|&s| sure[s] && !target[s]).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &s) in unknown.iter().enumerate() {
        slot[s] = k;
    }
    let mut system = SparseSystem::new(unknown.len());
    for (k, &s) in unknown.iter().enumerate() {
        system.add(k, k, &Rational::one());
        system.add_rhs(k, &Rational::one());
        for (u, p) in &rows[s] {
            if !target[*u] {
                system.add(k, slot[*u], &-p.clone());
            }
        }
    }
    let solution = system.solve().expect("absorbing system with sure absorption is nonsingular");
    (0..n)
        .map(|s| {
            if target[s] {
                Some(Rational::zero())
            } else if sure[s] {
                Some(solution[slot[s]].clone())
            } else {
                None
            }
        })
        .collect()
}

/// Breadth-first distance to `target` along positive edges.
pub(crate) fn distances(rows: &Rows, target: &[bool]) -> Vec<Option<u64>> {
    let n = rows.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, row) in rows.iter().enumerate() {
        for (u, _) in row {
            preds[*u].push(s);
        }
    }
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if target[s] {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued states have a distance");
        for &s in &preds[u] {
            if dist[s].is_none() {
                dist[s] = Some(d + 1);
                queue.push_back(s);
            }
        }
    }
    dist
}
