use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use super::layout::{build_layout, CellAntenna, CellLayout};
use crate::antenna::{UlaConfig, UraConfig};
use crate::channel::{ChannelModel, TgppParams, TgppScenario};
use crate::error::{Error, Result};
use crate::kv::KvFile;
use crate::rng::stream;
use crate::scalar::{from_db, to_db};
use crate::vec3::Vec3;

const ULA8: &str = include_str!("../../data/ula8.preset");
const URA8X4: &str = include_str!("../../data/ura8x4.preset");
const DEFAULT_SCENARIO: &str = include_str!("../../data/cellsim.scenario");

const LABEL_UE: u64 = 1;
const LABEL_LINK: u64 = 2;
const LABEL_PAIR: u64 = 3;
const LABEL_PROBE: u64 = 4;

/// Simulation settings shared by every drop.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub layout: CellLayout,
    pub channel: ChannelModel,
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
    pub n_ues: usize,
    pub n_uavs: Vec<usize>,
    pub uav_height: f64,
    pub ground_height: f64,
    pub drop_radius: f64,
    pub drops: usize,
    pub seed: u64,
    pub probe: Vec3<f64>,
    pub probe_heights: Vec<f64>,
}

impl Scenario {
    /// The shipped scenario with the given antenna mode.
    pub fn reference(beamforming: bool) -> Result<Self> {
        let mut kv = KvFile::parse(DEFAULT_SCENARIO)?;
        kv.set("antenna", if beamforming { "beamforming" } else { "fixed" });
        Self::from_kv(&kv)
    }

    /// Reads a scenario. Antenna keys override the built-in `ula8` (fixed)
    /// or `ura8x4` (beamforming) presets.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let mode = kv.raw("antenna").unwrap_or("fixed");
        let antenna = match mode {
            "fixed" => {
                let mut base = KvFile::parse(ULA8)?;
                overlay(&mut base, kv);
                CellAntenna::Fixed(UlaConfig::from_kv(&base)?)
            }
            "beamforming" => {
                let mut base = KvFile::parse(URA8X4)?;
                overlay(&mut base, kv);
                CellAntenna::Beamforming(UraConfig::from_kv(&base)?)
            }
            other => return Err(Error::parse("antenna", format!("expected fixed or beamforming, got `{other}`"))),
        };
        let isd = kv.get_f64_or("isd", 500.0)?;
        let bs_height = kv.get_f64_or("bs_height", 25.0)?;
        let layout = build_layout(isd, bs_height, antenna).map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::parse(name, reason),
            other => other,
        })?;
        let scenario: TgppScenario = kv.get_or("scenario", TgppScenario::UMa)?;
        let carrier_ghz = kv.get_f64_or("carrier_GHz", 2.0)?;
        if !(carrier_ghz > 0.0) {
            return Err(Error::parse("carrier_GHz", "must be positive"));
        }
        let mut params = TgppParams::builtin(scenario);
        params.bs_height = bs_height;
        let n_ues: usize = kv.get_or("n_ues", 15)?;
        let n_uavs: Vec<usize> = if kv.contains("n_uavs") {
            kv.get_list_f64("n_uavs")?.into_iter().map(|v| v as usize).collect()
        } else {
            vec![0]
        };
        if n_uavs.iter().any(|&u| u > n_ues) {
            return Err(Error::parse("n_uavs", "cannot exceed n_ues"));
        }
        let s = Self {
            layout,
            channel: ChannelModel::Tgpp { params, carrier_ghz },
            tx_power_dbm: kv.get_f64_or("tx_power_dBm", 46.0)?,
            noise_dbm: kv.get_f64_or("noise_dBm", -95.0)?,
            n_ues,
            n_uavs,
            uav_height: kv.get_f64_or("uav_height", 200.0)?,
            ground_height: kv.get_f64_or("ground_height", 1.5)?,
            drop_radius: kv.get_f64_or("drop_radius", 2.0 * isd)?,
            drops: kv.get_or("drops", 1000)?,
            seed: kv.get_or("seed", 1)?,
            probe: if kv.contains("probe") { kv.get_point("probe")? } else { Vec3::new(250.0, 100.0, 0.0) },
            probe_heights: if kv.contains("probe_heights") { kv.get_list_f64("probe_heights")? } else { vec![1.5, 200.0] },
        };
        for (key, h) in [("uav_height", s.uav_height), ("ground_height", s.ground_height)] {
            if !(1.5..=300.0).contains(&h) {
                return Err(Error::parse(key, "UE heights must lie in [1.5, 300] m"));
            }
        }
        if s.probe_heights.iter().any(|h| !(1.5..=300.0).contains(h)) {
            return Err(Error::parse("probe_heights", "UE heights must lie in [1.5, 300] m"));
        }
        if !(s.drop_radius > 0.0) {
            return Err(Error::parse("drop_radius", "must be positive"));
        }
        if s.n_ues == 0 || s.drops == 0 {
            return Err(Error::parse("drops", "need at least one UE and one drop"));
        }
        Ok(s)
    }
}

fn overlay(base: &mut KvFile, kv: &KvFile) {
    let keys: Vec<String> = kv.keys().map(str::to_owned).collect();
    for k in keys {
        if let Some(v) = kv.raw(&k) {
            base.set(&k, v);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ue {
    pub pos: Vec3<f64>,
    pub aerial: bool,
}

/// One random placement of UEs. Link draws are keyed by `(seed, index)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Drop {
    pub ues: Vec<Ue>,
    pub seed: u64,
    pub index: u64,
}

impl Drop {
    /// Uniform placement in a disc; the first `n_uavs` UEs are aerial.
    pub fn generate(s: &Scenario, n_uavs: usize, index: u64) -> Self {
        let mut rng = stream(s.seed, &[LABEL_UE, n_uavs as u64, index]);
        let ues = (0..s.n_ues)
            .map(|k| {
                let r = s.drop_radius * rng.random::<f64>().sqrt();
                let a = 2.0 * PI * rng.random::<f64>();
                let aerial = k < n_uavs;
                let z = if aerial { s.uav_height } else { s.ground_height };
                Ue { pos: Vec3::new(r * a.cos(), r * a.sin(), z), aerial }
            })
            .collect();
        Self { ues, seed: s.seed ^ (n_uavs as u64) << 48, index }
    }
}

/// Large-scale gain (linear) of every cell to `ue`, drawn per link and drop.
fn link_gains(s: &Scenario, ue: &Vec3<f64>, seed: u64, labels: &[u64]) -> Result<Vec<f64>> {
    s.layout
        .cells
        .iter()
        .map(|c| {
            let mut path = labels.to_vec();
            path.push(c.site as u64);
            // sectors of one site share the propagation path
            let mut rng = stream(seed, &path);
            Ok(s.channel.draw_large_scale(&c.pos, ue, &mut rng)?.0)
        })
        .collect()
}

/// RSRP (dBm) of `cell` at `ue` with the beam, if any, pointed at the UE.
pub fn rsrp(s: &Scenario, cell: usize, ue: &Vec3<f64>, path_gain: f64) -> f64 {
    s.tx_power_dbm + s.layout.gain_db(cell, ue, ue) + to_db(path_gain)
}

/// Index of the largest RSRP; ties go to the lowest index.
pub fn associate(rsrp_dbm: &[f64]) -> usize {
    let mut best = 0;
    for (i, &r) in rsrp_dbm.iter().enumerate() {
        if r > rsrp_dbm[best] {
            best = i;
        }
    }
    best
}

/// Per-drop state: link gains, association and the beam target of each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DropState {
    pub gains: Vec<Vec<f64>>,
    pub serving: Vec<usize>,
    pub load: Vec<usize>,
    pub targets: Vec<Vec3<f64>>,
}

impl DropState {
    pub fn new(s: &Scenario, d: &Drop) -> Result<Self> {
        let gains = d
            .ues
            .iter()
            .enumerate()
            .map(|(k, u)| link_gains(s, &u.pos, d.seed, &[LABEL_LINK, d.index, k as u64]))
            .collect::<Result<Vec<_>>>()?;
        let serving: Vec<usize> = d
            .ues
            .iter()
            .zip(&gains)
            .map(|(u, g)| {
                let r: Vec<f64> = (0..s.layout.cells.len()).map(|c| rsrp(s, c, &u.pos, g[c])).collect();
                associate(&r)
            })
            .collect();
        let mut load = vec![0; s.layout.cells.len()];
        serving.iter().for_each(|&c| load[c] += 1);
        let targets = s
            .layout
            .cells
            .iter()
            .map(|c| {
                let mut rng = stream(d.seed, &[LABEL_PAIR, d.index, c.id as u64]);
                let mine: Vec<usize> = (0..d.ues.len()).filter(|&k| serving[k] == c.id).collect();
                if mine.is_empty() {
                    // idle sector: a virtual ground UE inside its own sector
                    let r = s.layout.isd / 3f64.sqrt() * rng.random_range(0.1f64..1.0).sqrt();
                    let a = c.boresight + rng.random_range(-PI / 3.0..PI / 3.0);
                    Vec3::new(c.pos.x + r * a.cos(), c.pos.y + r * a.sin(), s.ground_height)
                } else {
                    d.ues[mine[rng.random_range(0..mine.len())]].pos
                }
            })
            .collect();
        Ok(Self { gains, serving, load, targets })
    }
}

/// Downlink SINR of UE `k` with every cell for which `active` holds (other
/// than the serving one) as an interferer.
pub fn downlink_sinr_with(s: &Scenario, d: &Drop, st: &DropState, k: usize, active: &dyn Fn(usize) -> bool) -> f64 {
    let p = from_db(s.tx_power_dbm);
    let ue = &d.ues[k].pos;
    let serv = st.serving[k];
    let signal = p * from_db(s.layout.gain_db(serv, ue, ue)) * st.gains[k][serv];
    let interference: f64 = (0..s.layout.cells.len())
        .filter(|&c| c != serv && active(c))
        .map(|c| p * from_db(s.layout.gain_db(c, ue, &st.targets[c])) * st.gains[k][c])
        .sum();
    signal / (interference + from_db(s.noise_dbm))
}

/// Downlink SINR of UE `k` with all non-serving cells interfering.
pub fn downlink_sinr(s: &Scenario, d: &Drop, st: &DropState, k: usize) -> f64 {
    downlink_sinr_with(s, d, st, k, &|_| true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropOutcome {
    pub serving: Vec<usize>,
    pub sinr: Vec<f64>,
    /// Spectral efficiency per UE after equal sharing within its cell.
    pub rates: Vec<f64>,
    pub sum_rate: f64,
}

pub fn run_drop(s: &Scenario, d: &Drop) -> Result<DropOutcome> {
    let st = DropState::new(s, d)?;
    let sinr: Vec<f64> = (0..d.ues.len()).map(|k| downlink_sinr(s, d, &st, k)).collect();
    let rates: Vec<f64> = sinr.iter().zip(&st.serving).map(|(g, &c)| (1.0 + g).log2() / st.load[c] as f64).collect();
    let sum_rate = rates.iter().sum();
    Ok(DropOutcome { serving: st.serving, sinr, rates, sum_rate })
}

/// Sorted per-drop sum rates for `n_uavs` aerial UEs.
pub fn sum_rate_samples(s: &Scenario, n_uavs: usize) -> Result<Vec<f64>> {
    let mut v = (0..s.drops as u64)
        .into_par_iter()
        .map(|i| run_drop(s, &Drop::generate(s, n_uavs, i)).map(|o| o.sum_rate))
        .collect::<Result<Vec<_>>>()?;
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Empirical association probability per cell for a UE fixed at the probe's
/// horizontal position and altitude `height`, over `s.drops` shadowing draws.
pub fn association_histogram(s: &Scenario, height: f64) -> Result<Vec<f64>> {
    let ue = s.probe.with_z(height);
    let counts = (0..s.drops as u64)
        .into_par_iter()
        .map(|i| {
            let g = link_gains(s, &ue, s.seed, &[LABEL_PROBE, height.to_bits(), i])?;
            let r: Vec<f64> = (0..g.len()).map(|c| rsrp(s, c, &ue, g[c])).collect();
            Ok(associate(&r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut hist = vec![0usize; s.layout.cells.len()];
    for c in counts {
        hist[c] += 1;
    }
    Ok(hist.into_iter().map(|n| n as f64 / s.drops as f64).collect())
}

/// Probability mass on cells of the three sites nearest the probe.
pub fn nearest_sites_fraction(s: &Scenario, hist: &[f64]) -> f64 {
    let near = s.layout.nearest_sites(&s.probe, 3);
    s.layout.cells.iter().filter(|c| near.contains(&c.site)).map(|c| hist[c.id]).sum()
}

/// Value at each decile `0.1, ..., 0.9` of sorted samples (nearest rank).
pub fn deciles(sorted: &[f64]) -> Vec<f64> {
    (1..10)
        .map(|i| {
            let rank = ((i as f64 / 10.0) * sorted.len() as f64).ceil() as usize;
            sorted[rank.clamp(1, sorted.len()) - 1]
        })
        .collect()
}

/// `cell_id,probability,altitude`.
pub fn association_csv(rows: &[(f64, Vec<f64>)]) -> String {
    let mut s = String::from("cell_id,probability,altitude\n");
    for (h, hist) in rows {
        for (c, p) in hist.iter().enumerate() {
            let _ = writeln!(s, "{c},{p},{h}");
        }
    }
    s
}

/// `rate,cdf,n_uavs` from sorted samples.
pub fn cdf_csv(rows: &[(usize, Vec<f64>)]) -> String {
    let mut s = String::from("rate,cdf,n_uavs\n");
    for (n, v) in rows {
        for (i, r) in v.iter().enumerate() {
            let _ = writeln!(s, "{r},{},{n}", (i + 1) as f64 / v.len() as f64);
        }
    }
    s
}
