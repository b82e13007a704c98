//! Propulsion power and trajectory energy for fixed-wing and rotary-wing UAVs.
//!
//! Level flight, zero wind.

use crate::error::{Error, Result};
use crate::kv::KvFile;
use crate::numerics::{bracketed_min, golden_section_min};
use crate::scalar::Real;
use crate::trajectory::Trajectory;

/// `P(V) = c1 V^3 + c2 / V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedWingParams<T> {
    pub c1: T,
    pub c2: T,
}

impl<T: Real> FixedWingParams<T> {
    pub fn new(c1: T, c2: T) -> Result<Self> {
        if !(c1 > T::zero()) {
            return Err(Error::invalid("c1", "must be positive"));
        }
        if !(c2 > T::zero()) {
            return Err(Error::invalid("c2", "must be positive"));
        }
        Ok(Self { c1, c2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotaryWingParams<T> {
    /// Blade profile power in hover (W).
    pub p0: T,
    /// Induced power in hover (W).
    pub pi: T,
    /// Rotor blade tip speed (m/s).
    pub utip: T,
    /// Mean rotor induced velocity in hover (m/s).
    pub v0: T,
    /// Fuselage drag ratio.
    pub d0: T,
    /// Air density (kg/m^3).
    pub rho: T,
    /// Rotor solidity.
    pub s: T,
    /// Rotor disc area (m^2).
    pub area: T,
}

impl<T: Real> RotaryWingParams<T> {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("P0", self.p0),
            ("Pi", self.pi),
            ("Utip", self.utip),
            ("v0", self.v0),
            ("d0", self.d0),
            ("rho", self.rho),
            ("s", self.s),
            ("A", self.area),
        ];
        for (name, v) in fields {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AirframePowerModel<T> {
    FixedWing(FixedWingParams<T>),
    RotaryWing(RotaryWingParams<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassParams<T> {
    pub m: T,
    pub g: T,
}

impl<T: Real> MassParams<T> {
    pub fn new(m: T) -> Result<Self> {
        if !(m > T::zero()) {
            return Err(Error::invalid("mass", "must be positive"));
        }
        Ok(Self { m, g: T::lit(9.81) })
    }
}

pub fn p_fixed<T: Real>(v: T, p: &FixedWingParams<T>) -> Result<T> {
    if !(v > T::zero()) {
        return Err(Error::domain("V", v.to_f64_lossy(), "fixed-wing speed must be > 0"));
    }
    Ok(p.c1 * v * v * v + p.c2 / v)
}

/// Blade-profile, induced and parasite components of the rotary-wing power.
pub fn rotary_terms<T: Real>(v: T, p: &RotaryWingParams<T>) -> (T, T, T) {
    let half = T::lit(0.5);
    let v2 = v * v;
    let blade = p.p0 * (T::one() + T::lit(3.0) * v2 / (p.utip * p.utip));
    let v0_2 = p.v0 * p.v0;
    let inner = (T::one() + v2 * v2 / (T::lit(4.0) * v0_2 * v0_2)).sqrt() - v2 / (T::lit(2.0) * v0_2);
    let induced = p.pi * inner.max(T::zero()).sqrt();
    let parasite = half * p.d0 * p.rho * p.s * p.area * v2 * v;
    (blade, induced, parasite)
}

pub fn p_rotary<T: Real>(v: T, p: &RotaryWingParams<T>) -> Result<T> {
    if !(v >= T::zero()) {
        return Err(Error::domain("V", v.to_f64_lossy(), "speed must be >= 0"));
    }
    let (a, b, c) = rotary_terms(v, p);
    Ok(a + b + c)
}

impl<T: Real> AirframePowerModel<T> {
    pub fn power(&self, v: T) -> Result<T> {
        match self {
            AirframePowerModel::FixedWing(p) => p_fixed(v, p),
            AirframePowerModel::RotaryWing(p) => p_rotary(v, p),
        }
    }

    pub fn is_fixed_wing(&self) -> bool {
        matches!(self, AirframePowerModel::FixedWing(_))
    }
}

/// Default upper limit for numerical speed searches (m/s).
pub const DEFAULT_VCAP: f64 = 100.0;

/// Maximum-endurance speed: minimizer of `P(V)`.
pub fn me_speed<T: Real>(model: &AirframePowerModel<T>, vcap: T) -> T {
    match model {
        AirframePowerModel::FixedWing(p) => (p.c2 / (T::lit(3.0) * p.c1)).powf(T::lit(0.25)),
        AirframePowerModel::RotaryWing(p) => {
            let tol = vcap * T::lit(1e-10);
            bracketed_min(|v| p_rotary(v, p).unwrap_or(T::infinity()), T::zero(), vcap, 2001, tol)
        }
    }
}

/// Maximum-range speed: minimizer of `P(V) / V`.
pub fn mr_speed<T: Real>(model: &AirframePowerModel<T>, vcap: T) -> T {
    match model {
        AirframePowerModel::FixedWing(p) => (p.c2 / p.c1).powf(T::lit(0.25)),
        AirframePowerModel::RotaryWing(p) => {
            let tol = vcap * T::lit(1e-10);
            let lo = vcap * T::lit(1e-6);
            bracketed_min(|v| p_rotary(v, p).unwrap_or(T::infinity()) / v, lo, vcap, 2001, tol)
        }
    }
}

/// Golden-section minimizer of `f` on `[lo, hi]` to relative precision.
pub fn numeric_minimizer<T: Real, F: FnMut(T) -> T>(f: F, lo: T, hi: T) -> T {
    golden_section_min(f, lo, hi, (hi - lo) * T::lit(1e-12))
}

/// Form of the kinetic-energy change term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KineticTerm {
    /// `m/2 (|v(T)|^2 - |v(0)|^2)`; additive under concatenation.
    #[default]
    SpeedSquaredDifference,
    /// `m/2 |v(T) - v(0)|^2`.
    VelocityDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryEnergy<T> {
    pub propulsion: T,
    pub kinetic: T,
    pub potential: T,
    pub total: T,
    /// The kinetic/potential correction is an approximation and is always
    /// flagged as such.
    pub heuristic: bool,
}

/// Propulsion energy at segment-constant speed plus the changes in kinetic
/// and potential energy between the trajectory end points.
pub fn traj_energy<T: Real>(
    traj: &Trajectory<T>,
    model: &AirframePowerModel<T>,
    mass: &MassParams<T>,
    kinetic: KineticTerm,
) -> Result<TrajectoryEnergy<T>> {
    traj.validate()?;
    let mut propulsion = T::zero();
    for m in 0..traj.segments() {
        let v = traj.segment_velocity(m).norm();
        propulsion += model.power(v)? * traj.durations[m];
    }
    let v0 = traj.start_velocity();
    let vt = traj.end_velocity();
    let half_m = mass.m / T::lit(2.0);
    let kin = match kinetic {
        KineticTerm::SpeedSquaredDifference => half_m * (vt.norm_sq() - v0.norm_sq()),
        KineticTerm::VelocityDifference => half_m * (vt - v0).norm_sq(),
    };
    let dh = traj.waypoints.last().expect("validated").z - traj.waypoints[0].z;
    let potential = mass.m * mass.g * dh;
    Ok(TrajectoryEnergy {
        propulsion,
        kinetic: kin,
        potential,
        total: propulsion + kin + potential,
        heuristic: true,
    })
}

impl AirframePowerModel<f64> {
    /// Reads an airframe file: `airframe = fixed_wing` with `c1`, `c2`, or
    /// `airframe = rotary_wing` with `P0`, `Pi`, `Utip`, `v0`, `d0`, `rho`,
    /// `s`, `A`.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let kind: String = kv.get("airframe")?;
        let to_parse = |e: Error| match e {
            Error::InvalidParameter { name, reason } => Error::parse(name, reason),
            other => other,
        };
        match kind.as_str() {
            "fixed_wing" => Ok(AirframePowerModel::FixedWing(
                FixedWingParams::new(kv.get_f64("c1")?, kv.get_f64("c2")?).map_err(to_parse)?,
            )),
            "rotary_wing" => {
                let p = RotaryWingParams {
                    p0: kv.get_f64("P0")?,
                    pi: kv.get_f64("Pi")?,
                    utip: kv.get_f64("Utip")?,
                    v0: kv.get_f64("v0")?,
                    d0: kv.get_f64("d0")?,
                    rho: kv.get_f64("rho")?,
                    s: kv.get_f64("s")?,
                    area: kv.get_f64("A")?,
                };
                p.validate().map_err(to_parse)?;
                Ok(AirframePowerModel::RotaryWing(p))
            }
            other => Err(Error::parse("airframe", format!("unknown airframe `{other}`"))),
        }
    }
}
