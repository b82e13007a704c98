//! Link and network performance metrics.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::channel::{expected_gain, ChannelModel, ProbLosParams, SmallScaleModel};
use crate::energy::{FixedWingParams, TrajectoryEnergy};
use crate::error::{Error, Result};
use crate::numerics::golden_section_max;
use crate::rng::{derive_key, stream};
use crate::kv::KvFile;
use crate::scalar::{from_db, to_db, Real};
use crate::trajectory::Trajectory;
use crate::vec3::Vec3;

/// A radio node. `gain` is the linear antenna gain used on every link the
/// node takes part in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub pos: Vec3<f64>,
    pub tx_power_w: f64,
    pub gain: f64,
    pub aerial: bool,
}

impl Node {
    pub fn ground(pos: Vec3<f64>, tx_power_w: f64) -> Self {
        Self { pos, tx_power_w, gain: 1.0, aerial: false }
    }

    pub fn aerial(pos: Vec3<f64>, tx_power_w: f64) -> Self {
        Self { pos, tx_power_w, gain: 1.0, aerial: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub tx: usize,
    pub rx: usize,
}

/// Set of simultaneously active links plus extra interfering transmitters.
///
/// The desired signal of link `k` comes from `links[k].tx`. Every other
/// active transmitter (the transmitters of the other links and the nodes in
/// `interferers`) interferes at `links[k].rx`; its contribution is counted as
/// aerial or terrestrial according to [`Node::aerial`]. This covers both the
/// UAV-as-transmitter and UAV-as-receiver compositions.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScene {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    pub interferers: Vec<usize>,
    pub model: ChannelModel,
    pub fading: SmallScaleModel,
    pub noise_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrBreakdown {
    pub signal: f64,
    pub i_ter: f64,
    pub i_aer: f64,
    pub noise: f64,
}

impl SinrBreakdown {
    pub fn sinr(&self) -> f64 {
        self.signal / (self.i_ter + self.i_aer + self.noise)
    }
}

impl LinkScene {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_w > 0.0) {
            return Err(Error::invalid("noise_w", "noise power must be positive"));
        }
        for n in &self.nodes {
            if !(n.tx_power_w >= 0.0 && n.gain >= 0.0) {
                return Err(Error::invalid("tx_power_w", "powers and gains must be non-negative"));
            }
            n.pos.validated_position()?;
        }
        let ok = |i: usize| i < self.nodes.len();
        if self.links.iter().any(|l| !ok(l.tx) || !ok(l.rx) || l.tx == l.rx) || !self.interferers.iter().all(|&i| ok(i)) {
            return Err(Error::invalid("links", "node index out of range or self-link"));
        }
        self.model.validate()?;
        self.fading.validate()
    }

    /// Transmitters interfering with link `k`, in first-seen order.
    pub fn interfering_transmitters(&self, k: usize) -> Vec<usize> {
        let link = self.links[k];
        let mut out: Vec<usize> = Vec::new();
        for t in self.links.iter().map(|l| l.tx).chain(self.interferers.iter().copied()) {
            if t != link.tx && t != link.rx && !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }

    /// Received power from node `tx` at node `rx` in trial `trial_seed`.
    ///
    /// Each ordered node pair draws from its own stream, so a draw depends only
    /// on the trial and on the pair's own geometry.
    pub fn received_power(&self, tx: usize, rx: usize, trial_seed: u64) -> Result<f64> {
        let (a, b) = (&self.nodes[tx], &self.nodes[rx]);
        let mut rng = stream(trial_seed, &[tx as u64, rx as u64]);
        let r = crate::channel::sample_channel(&a.pos, &b.pos, &self.model, self.fading, &mut rng)?;
        Ok(a.tx_power_w * a.gain * b.gain * r.power())
    }
}

/// SINR terms of link `k` for one random realization.
pub fn sinr_breakdown(k: usize, scene: &LinkScene, trial_seed: u64) -> Result<SinrBreakdown> {
    let link = scene.links.get(k).ok_or_else(|| Error::invalid("k", "link index out of range"))?;
    let signal = scene.received_power(link.tx, link.rx, trial_seed)?;
    let (mut i_ter, mut i_aer) = (0.0, 0.0);
    for t in scene.interfering_transmitters(k) {
        let p = scene.received_power(t, link.rx, trial_seed)?;
        if scene.nodes[t].aerial {
            i_aer += p;
        } else {
            i_ter += p;
        }
    }
    Ok(SinrBreakdown { signal, i_ter, i_aer, noise: scene.noise_w })
}

pub fn sinr(k: usize, scene: &LinkScene, trial_seed: u64) -> Result<f64> {
    Ok(sinr_breakdown(k, scene, trial_seed)?.sinr())
}

fn trial_sinrs(k: usize, scene: &LinkScene, trials: usize, seed: u64) -> Result<Vec<f64>> {
    scene.validate()?;
    if trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    (0..trials)
        .into_par_iter()
        .map(|t| sinr(k, scene, derive_key(seed, &[t as u64])))
        .collect()
}

/// Monte-Carlo estimate of `Pr(SINR_k < gamma)`.
pub fn outage_mc(k: usize, scene: &LinkScene, gamma: f64, trials: usize, seed: u64) -> Result<f64> {
    Ok(outage_curve(k, scene, &[gamma], trials, seed)?[0])
}

/// Outage probabilities for several thresholds from one shared set of draws.
pub fn outage_curve(k: usize, scene: &LinkScene, gammas: &[f64], trials: usize, seed: u64) -> Result<Vec<f64>> {
    let s = trial_sinrs(k, scene, trials, seed)?;
    Ok(gammas
        .iter()
        .map(|&g| s.iter().filter(|&&x| x < g).count() as f64 / trials as f64)
        .collect())
}

/// `log2(1 + gamma / |q - w|^alpha)`.
pub fn jensen_rate<T: Real>(q: &Vec3<T>, w: &Vec3<T>, gamma: T, alpha: T) -> Result<T> {
    let d = q.distance(w);
    if d == T::zero() {
        return Err(Error::CoincidentPoints);
    }
    Ok((gamma / d.powf(alpha)).ln_1p() / T::LN_2())
}

/// Transmit power, antenna gains and noise of a single point-to-point link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_w: f64,
    pub gain: f64,
    pub noise_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// Integrated rate (bps/Hz times seconds).
    pub value: f64,
    pub std_err: f64,
}

/// `sum_m E[log2(1 + SNR(q_m))] T_m` for a link between the UAV on `traj` and
/// the ground node `w`.
///
/// Slot `m` is evaluated at the end waypoint of segment `m`. The expectation
/// uses `trials` draws per slot from streams keyed by `(seed, slot, trial)`,
/// so different trajectories are compared under common random numbers.
/// Deterministic channels use a single exact evaluation.
pub fn avg_rate(
    traj: &Trajectory<f64>,
    w: &Vec3<f64>,
    budget: &LinkBudget,
    model: &ChannelModel,
    fading: SmallScaleModel,
    trials: usize,
    seed: u64,
) -> Result<RateEstimate> {
    traj.validate()?;
    let exact = model.is_deterministic() && fading == SmallScaleModel::None;
    let trials = if exact { 1 } else { trials.max(1) };
    let k = budget.tx_power_w * budget.gain / budget.noise_w;
    let per_slot: Vec<(f64, f64)> = (0..traj.segments())
        .into_par_iter()
        .map(|m| -> Result<(f64, f64)> {
            let q = traj.waypoints[m + 1];
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for t in 0..trials {
                let mut rng = stream(seed, &[m as u64, t as u64]);
                let r = crate::channel::sample_channel(&q, w, model, fading, &mut rng)?;
                let x = (1.0 + k * r.power()).log2();
                sum += x;
                sum_sq += x * x;
            }
            let n = trials as f64;
            let mean = sum / n;
            let var = if trials > 1 { (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0) } else { 0.0 };
            Ok((mean * traj.durations[m], var / n * traj.durations[m] * traj.durations[m]))
        })
        .collect::<Result<_>>()?;
    Ok(RateEstimate {
        value: per_slot.iter().map(|p| p.0).sum(),
        std_err: per_slot.iter().map(|p| p.1).sum::<f64>().sqrt(),
    })
}

/// Bits per Joule (per Hz): `rate / (E_traj + E_com)`.
pub fn energy_efficiency<T: Real>(rate: T, energy: &TrajectoryEnergy<T>, e_com: T) -> Result<T> {
    let denom = energy.total + e_com;
    if !(denom > T::zero()) {
        return Err(Error::invalid("energy", "total energy must be positive"));
    }
    Ok(rate / denom)
}

/// Sum rate over total energy of a set of links.
pub fn network_energy_efficiency<T: Real>(rates: &[T], energies: &[T]) -> Result<T> {
    let e: T = energies.iter().copied().sum();
    if !(e > T::zero()) {
        return Err(Error::invalid("energy", "total energy must be positive"));
    }
    Ok(rates.iter().copied().sum::<T>() / e)
}

/// Fixed-wing UAV circling a ground node at altitude `h` and radius `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EeCircleParams<T> {
    pub airframe: FixedWingParams<T>,
    pub h: T,
    /// Reference SNR at 1 m (linear).
    pub gamma0: T,
    pub p_com: T,
    /// LoS model; only `a`, `b`, `kappa`, `alpha` and `angle_unit` are used.
    pub los: ProbLosParams<T>,
    pub g: T,
}

/// Closed-form energy efficiency of the circular trajectory of radius `r`.
pub fn circular_ee<T: Real>(r: T, p: &EeCircleParams<T>) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::domain("r", r.to_f64_lossy(), "r > 0"));
    }
    let theta = p.h.atan2(r);
    let p_hat = p.los.p_hat(theta);
    let rate = (T::one() + p_hat * p.gamma0 / (p.h * p.h + r * r).powf(p.los.alpha / T::lit(2.0))).log2();
    let (c1, c2) = (p.airframe.c1, p.airframe.c2);
    let a = (T::lit(3.0).powf(T::lit(-0.75)) + T::lit(3.0).powf(T::lit(0.25))) * c2.powf(T::lit(0.75));
    let power = a * (c1 + c2 / (p.g * p.g * r * r)).powf(T::lit(0.25)) + p.p_com;
    Ok(rate / power)
}

/// Golden-section maximizer of [`circular_ee`] on `[lo, hi]`.
pub fn optimize_radius<T: Real>(p: &EeCircleParams<T>, lo: T, hi: T) -> Result<T> {
    if !(lo > T::zero() && hi > lo) {
        return Err(Error::invalid("radius range", "require 0 < lo < hi"));
    }
    let tol = (hi - lo) * T::lit(1e-9);
    Ok(golden_section_max(|r| circular_ee(r, p).unwrap_or(T::neg_infinity()), lo, hi, tol))
}

impl EeCircleParams<f64> {
    /// Reads `c1`, `c2`, `H_U`, `gamma0_dB`, `P_com`, `g` (default 9.81) and
    /// the LoS keys of [`ProbLosParams::from_kv`] (`X0_dB` defaults to 0).
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let airframe = FixedWingParams::new(kv.get_f64("c1")?, kv.get_f64("c2")?).map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::parse(name, reason),
            other => other,
        })?;
        let mut los_kv = kv.clone();
        if !kv.contains("X0_dB") && !kv.contains("beta0") {
            los_kv.set("beta0", "1");
        }
        let p = Self {
            airframe,
            h: kv.get_f64("H_U")?,
            gamma0: from_db(kv.get_f64("gamma0_dB")?),
            p_com: kv.get_f64_or("P_com", 0.0)?,
            los: ProbLosParams::from_kv(&los_kv)?,
            g: kv.get_f64_or("g", 9.81)?,
        };
        if !(p.h > 0.0) {
            return Err(Error::parse("H_U", "must be positive"));
        }
        if !(p.p_com >= 0.0) {
            return Err(Error::parse("P_com", "must be non-negative"));
        }
        if !(p.g > 0.0) {
            return Err(Error::parse("g", "must be positive"));
        }
        Ok(p)
    }
}

/// `r_m,EE` rows on `[lo, hi]` with spacing `step`.
pub fn ee_sweep_csv(p: &EeCircleParams<f64>, lo: f64, hi: f64, step: f64) -> Result<String> {
    if !(lo > 0.0 && hi > lo && step > 0.0) {
        return Err(Error::invalid("radius range", "require 0 < lo < hi and step > 0"));
    }
    let mut s = String::from("r_m,EE\n");
    let n = ((hi - lo) / step).round() as usize;
    for i in 0..=n {
        let r = lo + i as f64 * step;
        let _ = writeln!(s, "{r},{}", circular_ee(r, p)?);
    }
    Ok(s)
}

/// One instant of a straight, level pass over a ground node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlybySample {
    pub t: f64,
    pub pl_los_db: f64,
    pub pl_nlos_db: f64,
    pub p_los: f64,
    pub avg_gain_db: f64,
}

/// Channel seen by a UAV that starts `d0` metres (horizontally) from the node
/// at altitude `h`, flies straight over it at speed `v` and on to `d0` metres
/// beyond, sampled every `dt` seconds.
pub fn flyby_trace(p: &ProbLosParams<f64>, d0: f64, h: f64, v: f64, dt: f64) -> Result<Vec<FlybySample>> {
    for (name, x) in [("D", d0), ("H_U", h), ("V", v), ("dt", dt)] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::invalid(name, "must be positive"));
        }
    }
    let steps = (2.0 * d0 / v / dt).round() as usize;
    (0..=steps)
        .map(|i| {
            let t = i as f64 * dt;
            let d2d = (d0 - v * t).abs();
            let d = d2d.hypot(h);
            let pl_los = -to_db(p.beta0) + 10.0 * p.alpha * d.log10();
            Ok(FlybySample {
                t,
                pl_los_db: pl_los,
                pl_nlos_db: pl_los - to_db(p.kappa),
                p_los: p.p_los(h.atan2(d2d)),
                avg_gain_db: to_db(expected_gain(d2d, h, p)?),
            })
        })
        .collect()
}

/// Improvement (dB) from the first sample to the closest approach, as
/// `(LoS path loss, NLoS path loss, expected channel power)`.
pub fn flyby_improvement(trace: &[FlybySample]) -> (f64, f64, f64) {
    let first = trace[0];
    let min_of = |f: fn(&FlybySample) -> f64| trace.iter().map(f).fold(f64::INFINITY, f64::min);
    let max_of = |f: fn(&FlybySample) -> f64| trace.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    (
        first.pl_los_db - min_of(|s| s.pl_los_db),
        first.pl_nlos_db - min_of(|s| s.pl_nlos_db),
        max_of(|s| s.avg_gain_db) - first.avg_gain_db,
    )
}

/// `t_s,PL_LoS_dB,PL_NLoS_dB,PLoS,avg_gain_dB`.
pub fn flyby_csv(trace: &[FlybySample]) -> String {
    let mut s = String::from("t_s,PL_LoS_dB,PL_NLoS_dB,PLoS,avg_gain_dB\n");
    for x in trace {
        let _ = writeln!(s, "{},{},{},{},{}", x.t, x.pl_los_db, x.pl_nlos_db, x.p_los, x.avg_gain_db);
    }
    s
}
