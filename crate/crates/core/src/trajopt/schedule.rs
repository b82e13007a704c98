use crate::error::{Error, Result};
use crate::lp::{self, Constraint, Relation};

/// TDMA shares `tau[k][n]` and the resulting minimum accumulated rate
/// `min_k sum_n tau[k][n] R[k][n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub tau: Vec<Vec<f64>>,
    pub eta: f64,
}

/// Smallest accumulated rate over users.
pub fn realized_min(rates: &[Vec<f64>], tau: &[Vec<f64>]) -> f64 {
    rates
        .iter()
        .zip(tau)
        .map(|(r, t)| r.iter().zip(t).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Max-min TDMA shares for users served by a single UAV.
pub fn schedule_lp(rates: &[Vec<f64>]) -> Result<Schedule> {
    schedule_lp_grouped(rates, &vec![0; rates.len()])
}

/// Max-min TDMA shares where user `k` is served by UAV `groups[k]`; shares
/// sum to at most one per UAV and slot.
pub fn schedule_lp_grouped(rates: &[Vec<f64>], groups: &[usize]) -> Result<Schedule> {
    let k = rates.len();
    if k == 0 || groups.len() != k {
        return Err(Error::invalid("rates", "need one rate row and one group per user"));
    }
    let n = rates[0].len();
    if n == 0 || rates.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("rates", "rows must share a positive slot count"));
    }
    if rates.iter().flatten().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::invalid("rates", "must be finite and non-negative"));
    }
    // variables: tau[k][n] at k * n_slots + n, then eta
    let nv = k * n + 1;
    let mut cons = Vec::new();
    for (u, r) in rates.iter().enumerate() {
        let mut c = vec![0.0; nv];
        c[u * n..(u + 1) * n].iter_mut().zip(r).for_each(|(dst, v)| *dst = -v);
        c[nv - 1] = 1.0;
        cons.push(Constraint { coeffs: c, relation: Relation::Le, rhs: 0.0 });
    }
    let n_groups = groups.iter().max().unwrap() + 1;
    for g in 0..n_groups {
        if !groups.contains(&g) {
            continue;
        }
        for slot in 0..n {
            let mut c = vec![0.0; nv];
            for (u, _) in groups.iter().enumerate().filter(|(_, &gu)| gu == g) {
                c[u * n + slot] = 1.0;
            }
            cons.push(Constraint { coeffs: c, relation: Relation::Le, rhs: 1.0 });
        }
    }
    let mut obj = vec![0.0; nv];
    obj[nv - 1] = 1.0;
    let sol = lp::solve(nv, &obj, &cons)?;
    let mut tau: Vec<Vec<f64>> = (0..k).map(|u| sol.x[u * n..(u + 1) * n].iter().map(|t| t.clamp(0.0, 1.0)).collect()).collect();
    for g in 0..n_groups {
        for slot in 0..n {
            let s: f64 = (0..k).filter(|&u| groups[u] == g).map(|u| tau[u][slot]).sum();
            if s > 1.0 {
                (0..k).filter(|&u| groups[u] == g).for_each(|u| tau[u][slot] /= s);
            }
        }
    }
    let eta = realized_min(rates, &tau);
    Ok(Schedule { tau, eta })
}

/// Sum-rate shares: each UAV serves its best user in every slot.
pub fn schedule_greedy(rates: &[Vec<f64>], groups: &[usize]) -> Vec<Vec<f64>> {
    let n = rates.first().map_or(0, Vec::len);
    let mut tau = vec![vec![0.0; n]; rates.len()];
    let n_groups = groups.iter().max().map_or(0, |g| g + 1);
    for g in 0..n_groups {
        for slot in 0..n {
            let best = (0..rates.len())
                .filter(|&u| groups[u] == g)
                .fold(None, |acc: Option<usize>, u| match acc {
                    Some(b) if rates[b][slot] >= rates[u][slot] => Some(b),
                    _ => Some(u),
                });
            if let Some(b) = best {
                tau[b][slot] = 1.0;
            }
        }
    }
    tau
}
