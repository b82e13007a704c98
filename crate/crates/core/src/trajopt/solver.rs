use nalgebra::Matrix3;

use super::constraints::axis;
use super::instance::{combine, CodesignInstance, FleetPaths, Utility};
use super::schedule::{schedule_greedy, schedule_lp_grouped};
use super::surrogate::{surrogate_coefficients, SurrogateMode};
use crate::error::{Error, Result};
use crate::planner::{solve_tsp, TspMode, WaypointSet, EXACT_TSP_LIMIT};
use crate::vec3::Vec3;

/// Constraint feasibility tolerance for returned trajectories.
pub const FEAS_TOL: f64 = 1e-6;
const PROJ_TOL: f64 = 1e-10;
/// Relative shrink applied when projecting onto speed limits.
const MARGIN: f64 = 1e-9;
const MAX_SWEEPS: usize = 2000;
const MAX_INNER: usize = 400;

fn mat(v: Vec3<f64>) -> nalgebra::Vector3<f64> {
    nalgebra::Vector3::new(v.x, v.y, v.z)
}

fn outer(a: Vec3<f64>, b: Vec3<f64>) -> Matrix3<f64> {
    mat(a) * mat(b).transpose()
}

/// Feasible set of one slot displacement: the speed ball, optionally kept
/// horizontal and cut by the linearized minimum-speed half-space `u . e >= b`.
#[derive(Debug, Clone, Copy)]
struct SegmentSet {
    r: f64,
    flat: bool,
    half: Option<(Vec3<f64>, f64)>,
}

impl SegmentSet {
    /// Projection (with the safety margin) and its Jacobian.
    fn project(&self, mut y: Vec3<f64>) -> (Vec3<f64>, Matrix3<f64>) {
        let mask = if self.flat { Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, 0.0)) } else { Matrix3::identity() };
        if self.flat {
            y.z = 0.0;
        }
        let r = self.r * (1.0 - MARGIN);
        let ball = |y: Vec3<f64>| -> (Vec3<f64>, Matrix3<f64>) {
            let n = y.norm();
            if n <= r {
                (y, mask)
            } else {
                let u = y / n;
                (u * r, (mask - outer(u, u)) * (r / n))
            }
        };
        let Some((a, b)) = self.half else { return ball(y) };
        let b = b + MARGIN * b.abs();
        let aa = a.norm_sq();
        let (p, jac) = ball(y);
        if a.dot(&p) >= b {
            return (p, jac);
        }
        let h = y + a * ((b - a.dot(&y)) / aa);
        if h.norm() <= r {
            return (h, mask - outer(a, a) / aa);
        }
        let c0 = a * (b / aa);
        let rho2 = r * r - b * b / aa;
        let d = h - c0;
        let dn = d.norm();
        if rho2 <= 0.0 || dn == 0.0 {
            return (c0, Matrix3::zeros());
        }
        let rho = rho2.sqrt();
        let du = d / dn;
        (c0 + du * rho, (mask - outer(a, a) / aa - outer(du, du)) * (rho / dn))
    }
}

/// Linearized coupling constraint on slot displacements.
#[derive(Debug, Clone)]
enum Piece {
    /// `sum_i c_i u . e_i >= b`
    Half { terms: Vec<(usize, f64)>, u: Vec3<f64>, b: f64 },
    /// `|sum_i c_i e_i| <= r`
    Ball { terms: Vec<(usize, f64)>, r: f64 },
}

/// Surrogate subproblem in displacement coordinates `e[j][i] = q[j][i] - q[j][i-1]`,
/// where the speed limits decouple and the endpoints become one equality per UAV.
struct Problem<'a> {
    inst: &'a CodesignInstance,
    shares: &'a [Vec<f64>],
    n: usize,
    n_uav: usize,
    flat: bool,
    segs: Vec<SegmentSet>,
    pieces: Vec<Piece>,
    /// Per user and slot: (A, B, d_local) of the rate bound.
    coeffs: Vec<Vec<(f64, f64, f64)>>,
}

fn flatten(paths: &FleetPaths) -> Vec<Vec3<f64>> {
    paths.iter().flatten().copied().collect()
}

fn unflatten(x: &[Vec3<f64>], stride: usize) -> FleetPaths {
    x.chunks(stride).map(<[_]>::to_vec).collect()
}

fn solve3(m: Matrix3<f64>, h: Vec3<f64>) -> Option<Vec3<f64>> {
    let s = m.lu().solve(&mat(h))?;
    Some(Vec3::new(s[0], s[1], s[2]))
}

impl<'a> Problem<'a> {
    fn new(inst: &'a CodesignInstance, shares: &'a [Vec<f64>], local: &FleetPaths) -> Result<Self> {
        let c = &inst.constraints;
        let n = inst.slots();
        let n_uav = local.len();
        let dt = inst.grid.delta_t;
        let flat = c.h_min == c.h_max;
        let mut segs = Vec::with_capacity(n_uav * n);
        for q in local {
            for s in 1..=n {
                let half = (c.v_min > 0.0).then(|| {
                    let vl = (q[s] - q[s - 1]) / dt;
                    (vl, dt * (c.v_min * c.v_min + vl.norm_sq()) / 2.0)
                });
                segs.push(SegmentSet { r: c.v_max * dt, flat, half });
            }
        }
        let mut prob = Self { inst, shares, n, n_uav, flat, segs, pieces: Vec::new(), coeffs: Vec::new() };
        let mut pieces = Vec::new();
        for (j, q) in local.iter().enumerate() {
            if let Some(a_max) = c.a_max {
                for s in 1..n {
                    pieces.push(Piece::Ball { terms: vec![(j * n + s, 1.0), (j * n + s - 1, -1.0)], r: a_max * dt * dt });
                }
            }
            for s in 1..n {
                for o in &c.obstacles {
                    let r = q[s] - o.center;
                    let d = r.norm();
                    if d == 0.0 {
                        return Err(Error::Infeasible("local point on an obstacle center".into()));
                    }
                    let u = r / d;
                    pieces.push(prob.half(&[(j, s, 1.0)], u, u.dot(&o.center) + o.clearance));
                }
                for bx in &c.no_fly {
                    let (ax, sign, _) = bx
                        .face_margins(&q[s])
                        .into_iter()
                        .fold((0, 0.0, f64::NEG_INFINITY), |best, f| if f.2 > best.2 { f } else { best });
                    let mut u = Vec3::zero();
                    match ax {
                        0 => u.x = sign,
                        1 => u.y = sign,
                        _ => u.z = sign,
                    }
                    let bound = if sign > 0.0 { axis(&bx.hi, ax) } else { -axis(&bx.lo, ax) };
                    pieces.push(prob.half(&[(j, s, 1.0)], u, bound));
                }
            }
        }
        if c.d_min_uav > 0.0 {
            for j in 0..n_uav {
                for i in 0..j {
                    for s in 1..n {
                        let r = local[j][s] - local[i][s];
                        let d = r.norm();
                        if d == 0.0 {
                            return Err(Error::Infeasible("UAVs share a position".into()));
                        }
                        pieces.push(prob.half(&[(j, s, 1.0), (i, s, -1.0)], r / d, c.d_min_uav));
                    }
                }
            }
        }
        prob.pieces = pieces;
        prob.coeffs = inst
            .users
            .iter()
            .map(|u| {
                local[u.uav][1..]
                    .iter()
                    .map(|q| {
                        let dl = q.distance(&u.pos).max(1e-9);
                        let (a, b) = surrogate_coefficients(dl, u.gamma, inst.alpha, inst.surrogate);
                        (a, b, dl)
                    })
                    .collect()
            })
            .collect();
        Ok(prob)
    }

    /// Half-space `sum c u . q[j][s] >= b` rewritten on displacements.
    fn half(&self, qterms: &[(usize, usize, f64)], u: Vec3<f64>, b: f64) -> Piece {
        let mut coef = vec![0.0; self.n_uav * self.n];
        let mut offset = 0.0;
        for &(j, s, c) in qterms {
            offset += c * u.dot(&self.inst.constraints.q_start[j]);
            for i in 0..s {
                coef[j * self.n + i] += c;
            }
        }
        let terms = coef.into_iter().enumerate().filter(|(_, c)| *c != 0.0).collect();
        Piece::Half { terms, u, b: b - offset }
    }

    fn to_positions(&self, e: &[Vec3<f64>]) -> Vec<Vec3<f64>> {
        let c = &self.inst.constraints;
        let mut x = Vec::with_capacity(self.n_uav * (self.n + 1));
        for j in 0..self.n_uav {
            let mut q = c.q_start[j];
            x.push(q);
            for i in 0..self.n {
                q += e[j * self.n + i];
                x.push(if i + 1 == self.n { c.q_end[j] } else { q });
            }
        }
        x
    }

    fn to_displacements(&self, x: &[Vec3<f64>]) -> Vec<Vec3<f64>> {
        x.chunks(self.n + 1).flat_map(|q| q.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>()).collect()
    }

    fn surrogate_rates(&self, x: &[Vec3<f64>]) -> Vec<f64> {
        let n = self.n;
        self.inst
            .users
            .iter()
            .enumerate()
            .map(|(k, u)| {
                let mut acc = 0.0;
                for s in 0..n {
                    let tau = self.shares[k][s];
                    if tau == 0.0 {
                        continue;
                    }
                    let (a, b, dl) = self.coeffs[k][s];
                    let q = x[u.uav * (n + 1) + s + 1];
                    let v = match self.inst.surrogate {
                        SurrogateMode::Distance => a - b * (q.distance(&u.pos) - dl),
                        SurrogateMode::DistanceSq => a - b * ((q - u.pos).norm_sq() - dl * dl),
                    };
                    acc += tau * v;
                }
                acc / n as f64
            })
            .collect()
    }

    fn value(&self, x: &[Vec3<f64>]) -> f64 {
        combine(self.inst.utility, &self.surrogate_rates(x))
    }

    /// Soft minimum `-mu ln sum exp(-f_k / mu)` of the user rates, or their
    /// sum for the sum-rate utility.
    fn smooth_value(&self, x: &[Vec3<f64>], mu: f64) -> f64 {
        let f = self.surrogate_rates(x);
        match self.inst.utility {
            Utility::SumRate => f.iter().sum(),
            Utility::MinRate => {
                let m = f.iter().copied().fold(f64::INFINITY, f64::min);
                m - mu * f.iter().map(|v| (-(v - m) / mu).exp()).sum::<f64>().ln()
            }
        }
    }

    /// Gradient of the smoothed utility with respect to the displacements.
    fn gradient(&self, x: &[Vec3<f64>], mu: f64) -> Vec<Vec3<f64>> {
        let f = self.surrogate_rates(x);
        let weights: Vec<f64> = match self.inst.utility {
            Utility::SumRate => vec![1.0; f.len()],
            Utility::MinRate => {
                let m = f.iter().copied().fold(f64::INFINITY, f64::min);
                let w: Vec<f64> = f.iter().map(|v| (-(v - m) / mu).exp()).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|v| v / s).collect()
            }
        };
        let n = self.n;
        let mut gq = vec![Vec3::zero(); x.len()];
        for (k, u) in self.inst.users.iter().enumerate() {
            for s in 0..n {
                let tau = self.shares[k][s];
                if tau == 0.0 {
                    continue;
                }
                let i = u.uav * (n + 1) + s + 1;
                let (_, b, _) = self.coeffs[k][s];
                let r = x[i] - u.pos;
                let grad = match self.inst.surrogate {
                    SurrogateMode::Distance => {
                        let d = r.norm();
                        if d == 0.0 {
                            Vec3::zero()
                        } else {
                            r * (-b / d)
                        }
                    }
                    SurrogateMode::DistanceSq => r * (-2.0 * b),
                };
                gq[i] += grad * (weights[k] * tau / n as f64);
            }
        }
        let mut ge = vec![Vec3::zero(); self.n_uav * n];
        for j in 0..self.n_uav {
            let mut acc = Vec3::zero();
            for i in (0..n).rev() {
                acc += gq[j * (n + 1) + i + 1];
                ge[j * n + i] = acc;
            }
        }
        if self.flat {
            ge.iter_mut().for_each(|v| v.z = 0.0);
        }
        ge
    }

    /// Exact projection of one UAV's displacements onto the per-slot sets
    /// intersected with `sum e = target`, by Newton's method on the 3-D dual.
    fn project_chain(&self, y: &mut [Vec3<f64>], segs: &[SegmentSet], target: Vec3<f64>) -> bool {
        let mut lam = Vec3::zero();
        let eval = |lam: Vec3<f64>| {
            let mut sum = Vec3::zero();
            let mut jac = Matrix3::zeros();
            for (yi, s) in y.iter().zip(segs) {
                let (p, jm) = s.project(*yi + lam);
                sum += p;
                jac += jm;
            }
            (sum - target, jac)
        };
        let scale = 1.0 + target.norm();
        let (mut h, mut jac) = eval(lam);
        for _ in 0..200 {
            if h.norm() <= 1e-12 * scale {
                for (yi, s) in y.iter_mut().zip(segs) {
                    *yi = s.project(*yi + lam).0;
                }
                return true;
            }
            let reg = jac + Matrix3::identity() * (1e-10 * segs.len() as f64);
            let dir = solve3(reg, h).map(|d| -d).unwrap_or(h * (-1.0 / segs.len() as f64));
            let mut t = 1.0;
            let mut moved = false;
            while t > 1e-10 {
                let (h2, j2) = eval(lam + dir * t);
                if h2.norm() < (1.0 - 1e-4 * t) * h.norm() {
                    lam += dir * t;
                    h = h2;
                    jac = j2;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                let step = h * (-1.0 / segs.len() as f64);
                let (h2, j2) = eval(lam + step);
                if h2.norm() >= h.norm() {
                    return false;
                }
                lam += step;
                h = h2;
                jac = j2;
            }
        }
        false
    }

    fn piece_violation(&self, p: &Piece, e: &[Vec3<f64>]) -> f64 {
        match p {
            Piece::Half { terms, u, b } => {
                let s: f64 = terms.iter().map(|&(i, c)| c * u.dot(&e[i])).sum();
                (b - s).max(0.0) / u.norm()
            }
            Piece::Ball { terms, r } => {
                let v = terms.iter().fold(Vec3::zero(), |acc, &(i, c)| acc + e[i] * c);
                (v.norm() - r).max(0.0)
            }
        }
    }

    fn project_piece(&self, p: &Piece, e: &mut [Vec3<f64>]) {
        match p {
            Piece::Half { terms, u, b } => {
                let s: f64 = terms.iter().map(|&(i, c)| c * u.dot(&e[i])).sum();
                let target = b + MARGIN * b.abs().max(1.0);
                if s >= target {
                    return;
                }
                let mut dir = *u;
                if self.flat {
                    dir.z = 0.0;
                }
                let denom = u.dot(&dir) * terms.iter().map(|t| t.1 * t.1).sum::<f64>();
                if denom > 0.0 {
                    let lam = (target - s) / denom;
                    for &(i, c) in terms {
                        e[i] += dir * (lam * c);
                    }
                }
            }
            Piece::Ball { terms, r } => {
                let v = terms.iter().fold(Vec3::zero(), |acc, &(i, c)| acc + e[i] * c);
                let target = r * (1.0 - MARGIN);
                let nv = v.norm();
                if nv <= target {
                    return;
                }
                let w = v * (1.0 - target / nv);
                let denom: f64 = terms.iter().map(|t| t.1 * t.1).sum();
                for &(i, c) in terms {
                    e[i] -= w * (c / denom);
                }
            }
        }
    }

    fn altitude_violation(&self, e: &[Vec3<f64>]) -> f64 {
        let c = &self.inst.constraints;
        let mut worst: f64 = 0.0;
        for j in 0..self.n_uav {
            let mut z = c.q_start[j].z;
            for d in &e[j * self.n..(j + 1) * self.n] {
                z += d.z;
                worst = worst.max(c.h_min - z).max(z - c.h_max);
            }
        }
        worst
    }

    /// Clamps slot altitudes in position space; the displacement sums are
    /// unchanged.
    fn clamp_altitude(&self, e: &mut [Vec3<f64>]) {
        let c = &self.inst.constraints;
        let n = self.n;
        for j in 0..self.n_uav {
            let mut prev = c.q_start[j].z;
            let mut z = prev;
            for i in 0..n {
                z += e[j * n + i].z;
                let clamped = if i + 1 == n { z } else { z.clamp(c.h_min, c.h_max) };
                e[j * n + i].z = clamped - prev;
                prev = clamped;
            }
        }
    }

    /// Restores feasibility of displacements by alternating the exact chain
    /// projection with projections onto the coupling constraints.
    fn restore(&self, mut e: Vec<Vec3<f64>>) -> Option<Vec<Vec3<f64>>> {
        let c = &self.inst.constraints;
        let n = self.n;
        for _ in 0..MAX_SWEEPS {
            for j in 0..self.n_uav {
                let target = c.q_end[j] - c.q_start[j];
                if !self.project_chain(&mut e[j * n..(j + 1) * n], &self.segs[j * n..(j + 1) * n], target) {
                    return None;
                }
            }
            let mut worst = self.pieces.iter().map(|p| self.piece_violation(p, &e)).fold(0.0, f64::max);
            if !self.flat {
                worst = worst.max(self.altitude_violation(&e));
            }
            if worst <= PROJ_TOL {
                return Some(e);
            }
            for p in &self.pieces {
                self.project_piece(p, &mut e);
            }
            if !self.flat {
                self.clamp_altitude(&mut e);
            }
        }
        None
    }

    /// Projected ascent on the smoothed utility from feasible displacements.
    /// Steps move the fastest displacement by `step` metres; each candidate is
    /// restored to feasibility and accepted only if the smoothed value rises.
    fn ascend(&self, mut e: Vec<Vec3<f64>>, mu: f64, base_step: f64) -> Vec<Vec3<f64>> {
        let mut f = self.smooth_value(&self.to_positions(&e), mu);
        let mut step = base_step;
        let mut stall = 0;
        for _ in 0..MAX_INNER {
            let g = self.gradient(&self.to_positions(&e), mu);
            let gmax = g.iter().map(Vec3::norm).fold(0.0, f64::max);
            if gmax == 0.0 || !gmax.is_finite() {
                break;
            }
            let y: Vec<_> = e.iter().zip(&g).map(|(p, d)| *p + *d * (step / gmax)).collect();
            let mut full = false;
            if let Some(z) = self.restore(y) {
                let mut t = 1.0;
                for _ in 0..4 {
                    let cand: Vec<_> = e.iter().zip(&z).map(|(a, b)| *a + (*b - *a) * t).collect();
                    let fc = self.smooth_value(&self.to_positions(&cand), mu);
                    if fc > f {
                        stall = if fc - f < 1e-10 * (1.0 + f.abs()) { stall + 1 } else { 0 };
                        e = cand;
                        f = fc;
                        full = t == 1.0;
                        break;
                    }
                    t *= 0.5;
                }
            }
            if full {
                step = (step * 1.5).min(4.0 * base_step);
            } else {
                step *= 0.3;
            }
            if stall >= 5 || step < 1e-6 * base_step {
                break;
            }
        }
        e
    }
}

/// Maximizes the concave surrogate of the instance utility around `local`
/// with the shares fixed. The result is feasible and its surrogate value is
/// no lower than at `local`.
pub fn solve_surrogate(inst: &CodesignInstance, local: &FleetPaths, shares: &[Vec<f64>]) -> Result<FleetPaths> {
    check_paths(inst, local)?;
    let prob = Problem::new(inst, shares, local)?;
    if prob.n < 2 {
        return Ok(local.clone());
    }
    let x0 = flatten(local);
    let f0 = prob.value(&x0);
    let base_step = inst.constraints.v_max * inst.grid.delta_t;
    let mut e = prob.to_displacements(&x0);
    let stages: &[f64] = match inst.utility {
        Utility::MinRate => &[1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
        Utility::SumRate => &[1.0],
    };
    for &rel in stages {
        e = prob.ascend(e, rel * f0.abs().max(1e-9), base_step);
    }
    let x = prob.to_positions(&e);
    if !(prob.value(&x) > f0) {
        return Ok(local.clone());
    }
    let out = unflatten(&x, prob.n + 1);
    let (v, what) = inst.constraints.max_violation(&out, inst.grid.delta_t);
    if v > FEAS_TOL {
        return Err(Error::Numerical(format!("surrogate solution infeasible: {what} by {v:.3e}")));
    }
    Ok(out)
}

fn check_paths(inst: &CodesignInstance, paths: &FleetPaths) -> Result<()> {
    if paths.len() != inst.constraints.uav_count() || paths.iter().any(|p| p.len() != inst.slots() + 1) {
        return Err(Error::invalid("trajectory", "need N + 1 positions per UAV"));
    }
    inst.constraints
        .check(paths, inst.grid.delta_t, FEAS_TOL)
        .map_err(|e| Error::Infeasible(format!("local trajectory infeasible: {e}")))
}

/// Result of an SCA run: trajectory and true utility after every iterate
/// (entry 0 is the initial point).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaOutcome {
    pub paths: FleetPaths,
    pub trace: Vec<f64>,
}

/// Successive convex approximation with the shares fixed.
pub fn sca(inst: &CodesignInstance, init: &FleetPaths, shares: &[Vec<f64>], tol: f64, max_iter: usize) -> Result<ScaOutcome> {
    check_paths(inst, init)?;
    let mut paths = init.clone();
    let mut f = inst.utility_value(&paths, shares);
    let mut trace = vec![f];
    for _ in 0..max_iter {
        let next = solve_surrogate(inst, &paths, shares)?;
        let fn_ = inst.utility_value(&next, shares);
        if fn_ < f {
            trace.push(f);
            break;
        }
        trace.push(fn_);
        let gain = fn_ - f;
        paths = next;
        f = fn_;
        if gain < tol {
            break;
        }
    }
    Ok(ScaOutcome { paths, trace })
}

/// One recorded step of the block coordinate ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub round: usize,
    pub phase: &'static str,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodesignOutcome {
    pub paths: FleetPaths,
    pub shares: Vec<Vec<f64>>,
    pub trace: Vec<TraceEntry>,
    pub sca_iterations: usize,
}

impl CodesignOutcome {
    pub fn objective(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |t| t.objective)
    }

    /// `round,phase,objective`.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("round,phase,objective\n");
        for t in &self.trace {
            s.push_str(&format!("{},{},{}\n", t.round, t.phase, t.objective));
        }
        s
    }
}

/// Shares maximizing the utility for a fixed trajectory.
pub fn best_shares(inst: &CodesignInstance, paths: &FleetPaths) -> Result<Vec<Vec<f64>>> {
    let rates = inst.slot_rates(paths);
    match inst.utility {
        Utility::MinRate => Ok(schedule_lp_grouped(&rates, &inst.groups())?.tau),
        Utility::SumRate => Ok(schedule_greedy(&rates, &inst.groups())),
    }
}

/// Alternates the scheduling step and SCA on the trajectory until the
/// utility gain of a round drops below the instance tolerance.
pub fn bcd_codesign(inst: &CodesignInstance, init: &FleetPaths) -> Result<CodesignOutcome> {
    check_paths(inst, init)?;
    let mut paths = init.clone();
    let mut shares = inst.shares.clone();
    let mut f = inst.utility_value(&paths, &shares);
    let mut trace = vec![TraceEntry { round: 0, phase: "init", objective: f }];
    let mut sca_iterations = 0;
    for round in 1..=inst.max_iter {
        let start = f;
        let cand = best_shares(inst, &paths)?;
        let fs = inst.utility_value(&paths, &cand);
        if fs >= f {
            shares = cand;
            f = fs;
        }
        trace.push(TraceEntry { round, phase: "schedule", objective: f });
        let out = sca(inst, &paths, &shares, inst.tol, inst.max_iter)?;
        sca_iterations += out.trace.len() - 1;
        let ft = *out.trace.last().unwrap();
        if ft >= f {
            paths = out.paths;
            f = ft;
        }
        trace.push(TraceEntry { round, phase: "trajectory", objective: f });
        if f - start < inst.tol {
            break;
        }
    }
    Ok(CodesignOutcome { paths, shares, trace, sca_iterations })
}

/// Planner-based initial trajectory: TSP over each UAV's users, shrunk about
/// their centroid to `0.95 Vmax T` when too long, flown at constant speed.
pub fn initial_paths(inst: &CodesignInstance) -> Result<FleetPaths> {
    let c = &inst.constraints;
    let budget = 0.95 * c.v_max * inst.horizon;
    let n = inst.slots();
    let mut out = Vec::new();
    for j in 0..c.uav_count() {
        let (qs, qe) = (c.q_start[j], c.q_end[j]);
        let alt = qs.z.clamp(c.h_min, c.h_max);
        let pts: Vec<Vec3<f64>> = inst.users.iter().filter(|u| u.uav == j).map(|u| u.pos.with_z(alt)).collect();
        let poly = if pts.is_empty() {
            vec![qs, qe]
        } else {
            let mode = if pts.len() <= EXACT_TSP_LIMIT { TspMode::Exact } else { TspMode::Heuristic };
            let tour = solve_tsp(&WaypointSet { points: pts.clone(), start: Some(qs), end: Some(qe) }, mode)?;
            let centroid = pts.iter().fold(Vec3::zero(), |a, p| a + *p) / pts.len() as f64;
            let build = |rho: f64| {
                let mut v = vec![qs];
                v.extend(tour.order.iter().map(|&i| centroid + (pts[i] - centroid) * rho));
                v.push(qe);
                v
            };
            let len = |v: &[Vec3<f64>]| v.windows(2).map(|w| w[0].distance(&w[1])).sum::<f64>();
            if len(&build(1.0)) <= budget {
                build(1.0)
            } else {
                if len(&build(0.0)) > budget {
                    return Err(Error::Infeasible(format!("UAV {j} cannot reach its users within T")));
                }
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if len(&build(mid)) > budget {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                build(lo)
            }
        };
        let path = resample(&poly, n);
        let length: f64 = poly.windows(2).map(|w| w[0].distance(&w[1])).sum();
        if length < c.v_min * inst.horizon * (1.0 - 1e-12) {
            return Err(Error::Infeasible(format!("UAV {j} initial path shorter than Vmin T")));
        }
        out.push(path);
    }
    check_paths(inst, &out)?;
    Ok(out)
}

/// `n + 1` points at equal arc-length spacing along a polyline.
fn resample(poly: &[Vec3<f64>], n: usize) -> Vec<Vec3<f64>> {
    let seg: Vec<f64> = poly.windows(2).map(|w| w[0].distance(&w[1])).collect();
    let total: f64 = seg.iter().sum();
    let mut out = Vec::with_capacity(n + 1);
    let (mut i, mut acc) = (0, 0.0);
    for s in 0..=n {
        let target = total * s as f64 / n as f64;
        while i + 1 < seg.len() && acc + seg[i] < target {
            acc += seg[i];
            i += 1;
        }
        let t = if seg[i] > 0.0 { ((target - acc) / seg[i]).clamp(0.0, 1.0) } else { 0.0 };
        out.push(poly[i] + (poly[i + 1] - poly[i]) * t);
    }
    out[0] = poly[0];
    out[n] = *poly.last().unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajopt::{ConstraintSet, NoFlyBox, Obstacle, User};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn canonical() -> CodesignInstance {
        CodesignInstance::canonical().unwrap()
    }

    #[test]
    fn resample_spacing() {
        let poly = vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(3.0, 0.0, 0.0), Vec3::new(3.0, 3.0, 0.0)];
        let r = resample(&poly, 6);
        assert_eq!(r.len(), 7);
        for w in r.windows(2) {
            assert!((w[0].distance(&w[1]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_init_uses_budget() {
        let inst = canonical();
        let p = initial_paths(&inst).unwrap();
        let len: f64 = p[0].windows(2).map(|w| w[0].distance(&w[1])).sum();
        assert!(len <= 0.95 * 20.0 * 200.0 && len > 0.9 * 20.0 * 200.0, "{len}");
    }

    fn random_instance(seed: u64) -> (CodesignInstance, FleetPaths, Vec<Vec<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=4);
        let users = (0..k)
            .map(|_| User {
                pos: Vec3::new(rng.random_range(-600.0..600.0), rng.random_range(-600.0..600.0), 0.0),
                gamma: 1e6,
                uav: 0,
            })
            .collect();
        let q0 = Vec3::new(rng.random_range(-100.0..100.0), 0.0, 100.0);
        let c = ConstraintSet::single(q0, q0, 80.0, 120.0, 20.0);
        let mut inst = CodesignInstance::new(users, 2.3, 120.0, 40.0, c).unwrap();
        if seed % 2 == 1 {
            inst.surrogate = SurrogateMode::DistanceSq;
        }
        let shares: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..inst.slots()).map(|_| rng.random_range(0.0..1.0 / k as f64)).collect())
            .collect();
        let init = initial_paths(&inst).unwrap();
        (inst, init, shares)
    }

    #[test]
    fn surrogate_value_never_drops() {
        for seed in 0..20 {
            let (inst, init, shares) = random_instance(seed);
            let prob = Problem::new(&inst, &shares, &init).unwrap();
            let before = prob.value(&flatten(&init));
            let out = solve_surrogate(&inst, &init, &shares).unwrap();
            let after = prob.value(&flatten(&out));
            assert!(after >= before, "seed {seed}: {after} < {before}");
            inst.constraints.check(&out, inst.grid.delta_t, FEAS_TOL).unwrap();
        }
    }

    #[test]
    fn singleton_feasible_set() {
        let a = Vec3::new(0.0, 0.0, 100.0);
        let b = Vec3::new(400.0, 0.0, 100.0);
        let users = vec![User { pos: Vec3::new(200.0, 300.0, 0.0), gamma: 1e6, uav: 0 }];
        let inst = CodesignInstance::new(users, 2.3, 20.0, 40.0, ConstraintSet::single(a, b, 100.0, 100.0, 20.0)).unwrap();
        let line: Vec<_> = (0..=inst.slots()).map(|i| a + (b - a) * (i as f64 / inst.slots() as f64)).collect();
        let out = solve_surrogate(&inst, &vec![line.clone()], &inst.shares).unwrap();
        for (p, q) in out[0].iter().zip(&line) {
            assert!(p.distance(q) < 1e-6);
        }
    }

    #[test]
    fn single_user_closer_approach() {
        let q0 = Vec3::new(0.0, 0.0, 100.0);
        let w = Vec3::new(300.0, 200.0, 0.0);
        let users = vec![User { pos: w, gamma: 1e6, uav: 0 }];
        let inst = CodesignInstance::new(users, 2.3, 100.0, 40.0, ConstraintSet::single(q0, q0, 100.0, 100.0, 20.0)).unwrap();
        let hover = vec![vec![q0; inst.slots() + 1]];
        let out = solve_surrogate(&inst, &hover, &inst.shares).unwrap();
        let closest = |p: &Vec<Vec3<f64>>| p.iter().map(|q| q.distance(&w)).fold(f64::INFINITY, f64::min);
        assert!(closest(&out[0]) < closest(&hover[0]));
        let sca_out = sca(&inst, &hover, &inst.shares, 1e-6, 100).unwrap();
        // straight out and back reaches the point above the user
        assert!((closest(&sca_out.paths[0]) - 100.0).abs() < 1.0);
    }

    #[test]
    fn fixed_point_stops_after_one_iteration() {
        let w = Vec3::new(0.0, 0.0, 0.0);
        let q0 = Vec3::new(0.0, 0.0, 100.0);
        let users = vec![User { pos: w, gamma: 1e6, uav: 0 }];
        let inst = CodesignInstance::new(users, 2.3, 40.0, 40.0, ConstraintSet::single(q0, q0, 100.0, 100.0, 20.0)).unwrap();
        let hover = vec![vec![q0; inst.slots() + 1]];
        let out = sca(&inst, &hover, &inst.shares, 1e-4, 100).unwrap();
        assert_eq!(out.trace.len(), 2);
        assert_eq!(out.paths, hover);
    }

    #[test]
    fn obstacles_no_fly_and_separation_respected() {
        let users = vec![
            User { pos: Vec3::new(300.0, 0.0, 0.0), gamma: 1e6, uav: 0 },
            User { pos: Vec3::new(300.0, 50.0, 0.0), gamma: 1e6, uav: 1 },
        ];
        let mut c = ConstraintSet::single(Vec3::new(0.0, 0.0, 100.0), Vec3::new(0.0, 0.0, 100.0), 90.0, 110.0, 20.0);
        c.q_start.push(Vec3::new(0.0, 60.0, 100.0));
        c.q_end.push(Vec3::new(0.0, 60.0, 100.0));
        c.d_min_uav = 30.0;
        c.v_min = 1.0;
        c.a_max = Some(15.0);
        c.obstacles.push(Obstacle { center: Vec3::new(150.0, -30.0, 100.0), clearance: 20.0 });
        c.no_fly.push(NoFlyBox { lo: Vec3::new(200.0, 20.0, 0.0), hi: Vec3::new(240.0, 40.0, 300.0) });
        let inst = CodesignInstance::new(users, 2.3, 60.0, 40.0, c).unwrap();
        // lawnmower init: out and back along parallel lines
        let n = inst.slots();
        let init: FleetPaths = [0.0, 60.0]
            .iter()
            .map(|&y| {
                (0..=n)
                    .map(|i| {
                        let t = i as f64 / n as f64;
                        let x = 100.0 * (1.0 - (2.0 * t - 1.0).abs());
                        Vec3::new(x, y + 5.0 * (1.0 - (2.0 * t - 1.0).abs()), 100.0)
                    })
                    .collect()
            })
            .collect();
        inst.constraints.check(&init, inst.grid.delta_t, FEAS_TOL).unwrap();
        let out = bcd_codesign(&inst, &init).unwrap();
        inst.constraints.check(&out.paths, inst.grid.delta_t, FEAS_TOL).unwrap();
        for w in out.trace.windows(2) {
            assert!(w[1].objective >= w[0].objective);
        }
        assert!(out.objective() > out.trace[0].objective);
    }

    #[test]
    fn infeasible_local_rejected() {
        let inst = canonical();
        let mut p = initial_paths(&inst).unwrap();
        p[0][5].x += 500.0;
        assert!(matches!(solve_surrogate(&inst, &p, &inst.shares), Err(Error::Infeasible(_))));
    }

    #[test]
    fn canonical_bcd_improves_and_is_monotone() {
        let inst = canonical();
        let init = initial_paths(&inst).unwrap();
        let base = inst.utility_value(&init, &inst.shares);
        let out = bcd_codesign(&inst, &init).unwrap();
        for w in out.trace.windows(2) {
            assert!(w[1].objective >= w[0].objective);
        }
        assert!(out.objective() > base);
        inst.constraints.check(&out.paths, inst.grid.delta_t, FEAS_TOL).unwrap();
    }
}
