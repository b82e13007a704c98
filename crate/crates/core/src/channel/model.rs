use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::fading::SmallScaleModel;
use super::geometry::{elevation_angle, AngleUnit};
use super::los::{regularized_los, ProbLosParams};
use super::pathloss::{altitude_alpha, excess_pl, free_space_gain, ExcessPlParams, LogDistanceParams};
use super::tgpp::{tgpp_los_probability, tgpp_path_loss, TgppParams, TgppScenario};
use crate::error::{Error, Result};
use crate::kv::KvFile;
use crate::scalar::from_db;
use crate::vec3::Vec3;

/// Large-scale channel model selector.
///
/// Geometry convention: the aerial node is the higher endpoint of a link. For
/// [`ChannelModel::Tgpp`] the first endpoint passed to [`sample_channel`] is
/// the base station and the second is the UE.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    FreeSpace { wavelength: f64 },
    LogDistance(LogDistanceParams<f64>),
    /// Log-distance model whose exponent follows the UAV altitude.
    AltitudeDependent { p1: f64, p2: f64, x0_db: f64, sigma_db: f64 },
    /// Terrestrial log-distance loss over the ground distance plus an
    /// elevation-dependent excess term.
    ExcessPathLoss { terrestrial: LogDistanceParams<f64>, excess: ExcessPlParams<f64> },
    ProbabilisticLos(ProbLosParams<f64>),
    Tgpp { params: TgppParams, carrier_ghz: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    /// Complex baseband gain `sqrt(beta) g~`.
    pub g: Complex64,
    /// Linear large-scale power gain `beta` including shadowing.
    pub large_scale_gain: f64,
    /// Drawn LoS state for models that have one.
    pub los: Option<bool>,
}

impl ChannelRealization {
    pub fn power(&self) -> f64 {
        self.g.norm_sqr()
    }
}

fn split_nodes(a: &Vec3<f64>, b: &Vec3<f64>) -> (Vec3<f64>, Vec3<f64>) {
    if a.z >= b.z {
        (*a, *b)
    } else {
        (*b, *a)
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelModel::FreeSpace { wavelength } if !(*wavelength > 0.0) => {
                Err(Error::invalid("wavelength", "must be positive"))
            }
            ChannelModel::AltitudeDependent { sigma_db, .. } if !(*sigma_db >= 0.0) => {
                Err(Error::invalid("sigma_dB", "must be non-negative"))
            }
            ChannelModel::Tgpp { params, carrier_ghz } => {
                if !(*carrier_ghz > 0.0) {
                    return Err(Error::invalid("carrier_ghz", "must be positive"));
                }
                params.validate()
            }
            _ => Ok(()),
        }
    }

    /// Draws the large-scale gain (path loss, shadowing and LoS state).
    pub fn draw_large_scale<R: Rng + ?Sized>(
        &self,
        tx: &Vec3<f64>,
        rx: &Vec3<f64>,
        rng: &mut R,
    ) -> Result<(f64, Option<bool>)> {
        let d = tx.distance(rx);
        if d == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        match self {
            ChannelModel::FreeSpace { wavelength } => Ok((free_space_gain(d, *wavelength)?, None)),
            ChannelModel::LogDistance(p) => {
                let z: f64 = StandardNormal.sample(rng);
                let pl = super::log_distance_pl(d.max(1.0), p, p.sigma_db * z)?;
                Ok((from_db(-pl), None))
            }
            ChannelModel::AltitudeDependent { p1, p2, x0_db, sigma_db } => {
                let (uav, _) = split_nodes(tx, rx);
                let alpha = altitude_alpha(uav.z.max(1.0), *p1, *p2);
                let z: f64 = StandardNormal.sample(rng);
                let pl = 10.0 * alpha * d.max(1.0).log10() + x0_db + sigma_db * z;
                Ok((from_db(-pl), None))
            }
            ChannelModel::ExcessPathLoss { terrestrial, excess } => {
                let (uav, gnd) = split_nodes(tx, rx);
                let theta = elevation_angle(&uav, &gnd)?;
                let d2d = uav.horizontal_distance(&gnd).max(1.0);
                let pl = excess_pl(theta, d2d, terrestrial, excess, rng)?;
                Ok((from_db(-pl), None))
            }
            ChannelModel::ProbabilisticLos(p) => {
                let (uav, gnd) = split_nodes(tx, rx);
                let theta = elevation_angle(&uav, &gnd)?;
                let los = rng.random::<f64>() < p.p_los(theta);
                let base = p.beta0 * d.max(1.0).powf(-p.alpha);
                Ok((if los { base } else { p.kappa * base }, Some(los)))
            }
            ChannelModel::Tgpp { params, carrier_ghz } => {
                let h = rx.z;
                let p_los = tgpp_los_probability(tx.horizontal_distance(rx), h, params)?;
                let los = rng.random::<f64>() < p_los;
                let (pl, sigma) = tgpp_path_loss(d, h, los, params, *carrier_ghz);
                let z: f64 = StandardNormal.sample(rng);
                Ok((from_db(-(pl + sigma * z)), Some(los)))
            }
        }
    }

    /// Mean large-scale gain without shadowing, averaged over the LoS state.
    pub fn mean_gain(&self, tx: &Vec3<f64>, rx: &Vec3<f64>) -> Result<f64> {
        let d = tx.distance(rx);
        if d == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        match self {
            ChannelModel::FreeSpace { wavelength } => free_space_gain(d, *wavelength),
            ChannelModel::LogDistance(p) => Ok(from_db(-super::log_distance_pl(d.max(1.0), p, 0.0)?)),
            ChannelModel::AltitudeDependent { p1, p2, x0_db, .. } => {
                let (uav, _) = split_nodes(tx, rx);
                let alpha = altitude_alpha(uav.z.max(1.0), *p1, *p2);
                Ok(from_db(-(10.0 * alpha * d.max(1.0).log10() + x0_db)))
            }
            ChannelModel::ExcessPathLoss { terrestrial, excess } => {
                let (uav, gnd) = split_nodes(tx, rx);
                let theta = elevation_angle(&uav, &gnd)?;
                let d2d = uav.horizontal_distance(&gnd).max(1.0);
                let pl = super::log_distance_pl(d2d, terrestrial, 0.0)? + super::excess_eta(theta, excess);
                Ok(from_db(-pl))
            }
            ChannelModel::ProbabilisticLos(p) => {
                let (uav, gnd) = split_nodes(tx, rx);
                let theta = elevation_angle(&uav, &gnd)?;
                Ok(regularized_los(p.p_los(theta), p.kappa) * p.beta0 * d.max(1.0).powf(-p.alpha))
            }
            ChannelModel::Tgpp { params, carrier_ghz } => {
                let h = rx.z;
                let p = tgpp_los_probability(tx.horizontal_distance(rx), h, params)?;
                let (l, _) = tgpp_path_loss(d, h, true, params, *carrier_ghz);
                let (n, _) = tgpp_path_loss(d, h, false, params, *carrier_ghz);
                Ok(p * from_db(-l) + (1.0 - p) * from_db(-n))
            }
        }
    }

    /// True when a draw involves no randomness.
    pub fn is_deterministic(&self) -> bool {
        match self {
            ChannelModel::FreeSpace { .. } => true,
            ChannelModel::LogDistance(p) => p.sigma_db == 0.0,
            ChannelModel::AltitudeDependent { sigma_db, .. } => *sigma_db == 0.0,
            _ => false,
        }
    }

    /// Builds a model from a key-value preset with a `model` key.
    ///
    /// | `model` | keys |
    /// |---|---|
    /// | `free_space` | `wavelength` or `carrier_ghz` |
    /// | `log_distance` | `alpha`, `X0_dB`, `sigma_dB` |
    /// | `altitude` | `p1`, `p2`, `X0_dB`, `sigma_dB` |
    /// | `excess` | `alpha`, `X0_dB`, `sigma_dB`, `A`, `B`, `theta0`, `eta0`, `a_sh`, `sigma0`, `angle_unit` |
    /// | `prob_los` | see [`ProbLosParams::from_kv`] |
    /// | `tgpp` | `scenario`, `carrier_ghz` |
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let kind = kv.raw("model").unwrap_or("prob_los").to_ascii_lowercase();
        let m = match kind.as_str() {
            "free_space" => {
                let wavelength = if kv.contains("wavelength") {
                    kv.get_f64("wavelength")?
                } else {
                    0.299_792_458 / kv.get_f64("carrier_ghz")?
                };
                ChannelModel::FreeSpace { wavelength }
            }
            "log_distance" => ChannelModel::LogDistance(log_distance_from_kv(kv)?),
            "altitude" => ChannelModel::AltitudeDependent {
                p1: kv.get_f64("p1")?,
                p2: kv.get_f64("p2")?,
                x0_db: kv.get_f64("X0_dB")?,
                sigma_db: kv.get_f64_or("sigma_dB", 0.0)?,
            },
            "excess" => {
                let unit = angle_unit_from_kv(kv, AngleUnit::Degrees)?;
                ChannelModel::ExcessPathLoss {
                    terrestrial: log_distance_from_kv(kv)?,
                    excess: ExcessPlParams::new(
                        kv.get_f64("A")?,
                        kv.get_f64("B")?,
                        kv.get_f64("theta0")?,
                        kv.get_f64("eta0")?,
                        kv.get_f64("a_sh")?,
                        kv.get_f64("sigma0")?,
                        unit,
                    )
                    .map_err(|e| keyed(e, "B"))?,
                }
            }
            "prob_los" => ChannelModel::ProbabilisticLos(ProbLosParams::from_kv(kv)?),
            "tgpp" => {
                let scenario: TgppScenario = kv.get_or("scenario", TgppScenario::UMa)?;
                ChannelModel::Tgpp {
                    params: TgppParams::builtin(scenario),
                    carrier_ghz: kv.get_f64_or("carrier_ghz", 2.0)?,
                }
            }
            other => return Err(Error::parse("model", format!("unknown channel model `{other}`"))),
        };
        m.validate()?;
        Ok(m)
    }
}

fn keyed(e: Error, key: &str) -> Error {
    match e {
        Error::InvalidParameter { reason, .. } => Error::parse(key, reason),
        other => other,
    }
}

fn angle_unit_from_kv(kv: &KvFile, default: AngleUnit) -> Result<AngleUnit> {
    match kv.raw("angle_unit") {
        None => Ok(default),
        Some(s) => AngleUnit::parse(s).ok_or_else(|| Error::parse("angle_unit", "expected `radians` or `degrees`")),
    }
}

fn log_distance_from_kv(kv: &KvFile) -> Result<LogDistanceParams<f64>> {
    let alpha = kv.get_f64("alpha")?;
    let sigma = kv.get_f64_or("sigma_dB", 0.0)?;
    LogDistanceParams::new(alpha, kv.get_f64("X0_dB")?, sigma).map_err(|e| match &e {
        Error::InvalidParameter { name, .. } if name == "alpha" => keyed(e, "alpha"),
        _ => keyed(e, "sigma_dB"),
    })
}

impl ProbLosParams<f64> {
    /// Reads `a`, `b`, `kappa`, `alpha` and either `beta0` or `X0_dB`
    /// (`beta0 = 10^(-X0_dB/10)`). `angle_unit` defaults to degrees.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let beta0 = if kv.contains("beta0") {
            kv.get_f64("beta0")?
        } else {
            from_db(-kv.get_f64("X0_dB")?)
        };
        let vals = [
            ("a", kv.get_f64("a")?),
            ("b", kv.get_f64("b")?),
            ("kappa", kv.get_f64("kappa")?),
            ("alpha", kv.get_f64("alpha")?),
        ];
        let unit = angle_unit_from_kv(kv, AngleUnit::Degrees)?;
        ProbLosParams::new(vals[0].1, vals[1].1, vals[2].1, beta0, vals[3].1, unit).map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::parse(name, reason),
            other => other,
        })
    }
}

/// Draws one complex channel `g = sqrt(beta) g~` between `tx` and `rx`.
pub fn sample_channel<R: Rng + ?Sized>(
    tx: &Vec3<f64>,
    rx: &Vec3<f64>,
    model: &ChannelModel,
    ss: SmallScaleModel,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let (beta, los) = model.draw_large_scale(tx, rx, rng)?;
    let g = ss.sample(rng) * beta.sqrt();
    Ok(ChannelRealization { g, large_scale_gain: beta, los })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn fig12() -> ProbLosParams<f64> {
        ProbLosParams::new(10.0, 0.6, 0.01, 1e-5, 2.3, AngleUnit::Degrees).unwrap()
    }

    #[test]
    fn free_space_no_fading_is_exact() {
        let lambda = 0.125;
        let m = ChannelModel::FreeSpace { wavelength: lambda };
        let tx = Vec3::new(0.0, 0.0, 100.0);
        let rx = Vec3::new(300.0, 400.0, 0.0);
        let r = sample_channel(&tx, &rx, &m, SmallScaleModel::None, &mut stream(1, &[])).unwrap();
        let d = tx.distance(&rx);
        let want = (lambda / (4.0 * std::f64::consts::PI * d)).powi(2);
        assert!((r.power() - want).abs() <= 1e-15 * want);
    }

    #[test]
    fn empirical_los_fraction_matches_logistic() {
        let p = fig12();
        let m = ChannelModel::ProbabilisticLos(p);
        let uav = Vec3::new(0.0, 0.0, 100.0);
        let gnd = Vec3::new(150.0, 0.0, 0.0);
        let mut rng = stream(5, &[]);
        let n = 1_000_000;
        let mut hits = 0usize;
        for _ in 0..n {
            if m.draw_large_scale(&uav, &gnd, &mut rng).unwrap().1 == Some(true) {
                hits += 1;
            }
        }
        let theta_deg = (100.0f64 / 150.0).atan().to_degrees();
        let want = 1.0 / (1.0 + 10.0 * (-0.6 * (theta_deg - 10.0)).exp());
        assert!((hits as f64 / n as f64 - want).abs() < 0.005);
    }

    #[test]
    fn rayleigh_normalization() {
        let m = ChannelModel::FreeSpace { wavelength: 1.0 };
        let a = Vec3::new(0.0, 0.0, 10.0);
        let b = Vec3::new(0.0, 0.0, 0.0);
        let beta = m.mean_gain(&a, &b).unwrap();
        let mut rng = stream(9, &[]);
        let n = 1_000_000;
        let s: f64 = (0..n)
            .map(|_| sample_channel(&a, &b, &m, SmallScaleModel::Rayleigh, &mut rng).unwrap().power() / beta)
            .sum();
        assert!((s / n as f64 - 1.0).abs() < 0.01);
    }

    #[test]
    fn shadowing_mean_is_zero() {
        let p = LogDistanceParams::new(2.5, 40.0, 8.0).unwrap();
        let m = ChannelModel::LogDistance(p);
        let a = Vec3::new(0.0, 0.0, 50.0);
        let b = Vec3::new(100.0, 0.0, 0.0);
        let median_db = -crate::scalar::to_db(m.mean_gain(&a, &b).unwrap());
        let mut rng = stream(2, &[]);
        let n = 1_000_000;
        let mean: f64 = (0..n)
            .map(|_| -crate::scalar::to_db(m.draw_large_scale(&a, &b, &mut rng).unwrap().0) - median_db)
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 0.01 * 8.0, "{mean}");
    }

    #[test]
    fn mean_gain_matches_expected_gain() {
        let p = fig12();
        let m = ChannelModel::ProbabilisticLos(p);
        let uav = Vec3::new(0.0, 0.0, 100.0);
        let gnd = Vec3::new(500.0, 0.0, 0.0);
        let want = super::super::expected_gain(500.0, 100.0, &p).unwrap();
        assert!((m.mean_gain(&uav, &gnd).unwrap() - want).abs() < 1e-18);
        assert_eq!(m.mean_gain(&gnd, &uav).unwrap(), m.mean_gain(&uav, &gnd).unwrap());
    }

    #[test]
    fn tgpp_draws_are_reproducible() {
        let m = ChannelModel::Tgpp { params: TgppParams::builtin(TgppScenario::UMa), carrier_ghz: 2.0 };
        let bs = Vec3::new(0.0, 0.0, 25.0);
        let ue = Vec3::new(300.0, 50.0, 200.0);
        let a = m.draw_large_scale(&bs, &ue, &mut stream(4, &[1, 2])).unwrap();
        let b = m.draw_large_scale(&bs, &ue, &mut stream(4, &[1, 2])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1, Some(true));
    }

    #[test]
    fn from_kv_reports_offending_key() {
        let kv = KvFile::parse("model = prob_los\na = 10\nb = 0.6\nkappa = 2\nalpha = 2.3\nX0_dB = 50\n").unwrap();
        match ChannelModel::from_kv(&kv) {
            Err(Error::Parse { key, .. }) => assert_eq!(key, "kappa"),
            other => panic!("unexpected {other:?}"),
        }
        let kv = KvFile::parse("model = warp\n").unwrap();
        assert!(ChannelModel::from_kv(&kv).is_err());
    }

    #[test]
    fn coincident_nodes_rejected() {
        let m = ChannelModel::FreeSpace { wavelength: 1.0 };
        let a = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(m.mean_gain(&a, &a), Err(Error::CoincidentPoints));
    }
}
