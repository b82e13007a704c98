//! Dense two-phase simplex for small linear programs.
//!
//! Solves `maximize c^T x` subject to `a_i^T x (<= | = | >=) b_i` and
//! `x >= 0`. Pivoting follows Bland's rule, so degenerate problems terminate.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

const EPS: f64 = 1e-11;

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `obj . x` over the current tableau restricted to `allowed`
    /// columns. Returns `false` if unbounded.
    fn optimize(&mut self, obj: &[f64], allowed: &dyn Fn(usize) -> bool) -> bool {
        let rhs = self.cols;
        for _ in 0..1_000_000 {
            let mut enter = None;
            for j in 0..self.cols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let reduced = obj[j] - self.basis.iter().enumerate().map(|(i, &b)| obj[b] * self.t[i][j]).sum::<f64>();
                if reduced > EPS {
                    enter = Some(j);
                    break;
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<(f64, usize, usize)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if row[c] > EPS {
                    let ratio = row[rhs] / row[c];
                    let better = match leave {
                        None => true,
                        Some((best, _, bvar)) => ratio < best - EPS || (ratio <= best + EPS && self.basis[i] < bvar),
                    };
                    if better {
                        leave = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = leave else { return false };
            self.pivot(r, c);
        }
        true
    }
}

/// Solves the LP. `n` is the number of decision variables.
pub fn solve(n: usize, objective: &[f64], constraints: &[Constraint]) -> Result<LpSolution> {
    if objective.len() != n || constraints.iter().any(|c| c.coeffs.len() != n) {
        return Err(Error::invalid("lp", "dimension mismatch"));
    }
    let m = constraints.len();
    let n_slack = constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + n_slack + n_art;
    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0; m];
    let (mut s, mut a) = (n, n + n_slack);
    for (i, (coeffs, rel, rhs)) in rows.iter_mut().enumerate() {
        t[i][..n].copy_from_slice(coeffs);
        t[i][cols] = *rhs;
        match rel {
            Relation::Le => {
                t[i][s] = 1.0;
                basis[i] = s;
                s += 1;
            }
            Relation::Ge => {
                t[i][s] = -1.0;
                s += 1;
                t[i][a] = 1.0;
                basis[i] = a;
                a += 1;
            }
            Relation::Eq => {
                t[i][a] = 1.0;
                basis[i] = a;
                a += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, cols };
    let art_start = n + n_slack;
    if n_art > 0 {
        let mut phase1 = vec![0.0; cols];
        for v in phase1.iter_mut().skip(art_start) {
            *v = -1.0;
        }
        tab.optimize(&phase1, &|_| true);
        let infeas: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art_start)
            .map(|(i, _)| tab.t[i][cols])
            .sum();
        let scale = 1.0 + constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max);
        if infeas > 1e-9 * scale {
            return Err(Error::Infeasible("linear program has no feasible point".into()));
        }
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= art_start {
                match (0..art_start).find(|&j| tab.t[i][j].abs() > 1e-9) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
    let mut phase2 = vec![0.0; cols];
    phase2[..n].copy_from_slice(objective);
    if !tab.optimize(&phase2, &|j| j < art_start) {
        return Err(Error::Numerical("linear program is unbounded".into()));
    }
    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.t[i][cols].max(0.0);
        }
    }
    let objective = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { x, objective })
}
