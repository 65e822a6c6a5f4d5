//! Seeded random sweeps over scattering scenarios.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::Rng;

use crate::channel::{scatter_singlet, Scenario};
use crate::error::{Error, Result};
use crate::qstate::{classify_point, gw_fit, PlaneClass, PlanePoint};

/// Tolerance used to decide whether a sampled point sits on the Werner curve.
pub const CLASSIFY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Depolarization only.
    Isotropic,
    /// Retarder after depolarization.
    Birefringent,
    /// Diattenuator after depolarization.
    Dichroic,
}

impl ScenarioKind {
    pub fn tag(self) -> &'static str {
        match self {
            ScenarioKind::Isotropic => "I",
            ScenarioKind::Birefringent => "II",
            ScenarioKind::Dichroic => "III",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "I" | "i" | "1" => Some(Self::Isotropic),
            "II" | "ii" | "2" => Some(Self::Birefringent),
            "III" | "iii" | "3" => Some(Self::Dichroic),
            _ => None,
        }
    }
}

/// Sampling range; values are drawn as `lo + (hi − lo)·u`, `u ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn at(&self, u: f64) -> f64 {
        self.lo + (self.hi - self.lo) * u
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepConfig {
    pub kind: ScenarioKind,
    pub depolarization: Interval,
    pub retardance: Interval,
    /// Magnitude of the diattenuation vector; its direction is uniform on the sphere.
    pub diattenuation: Interval,
    pub transmittance: Interval,
    pub samples: usize,
    pub seed: u64,
    /// Run the generalized-Werner fit on each record. `None` fits type II only.
    pub gw_fit: Option<bool>,
}

impl SweepConfig {
    pub fn new(kind: ScenarioKind, samples: usize, seed: u64) -> Self {
        Self {
            kind,
            depolarization: Interval::new(0.0, 0.95),
            retardance: Interval::new(0.0, TAU),
            diattenuation: Interval::new(0.0, 0.95),
            transmittance: Interval::new(1.0, 1.0),
            samples,
            seed,
            gw_fit: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(field: &'static str, reason: &'static str) -> Error {
            Error::InvalidConfig { field, reason }
        }
        let check = |field, iv: &Interval, ok: &dyn Fn(f64, f64) -> bool, reason| {
            if !iv.lo.is_finite() || !iv.hi.is_finite() {
                return Err(bad(field, "bounds must be finite"));
            }
            if iv.lo > iv.hi {
                return Err(bad(field, "lower bound exceeds upper bound"));
            }
            if !ok(iv.lo, iv.hi) {
                return Err(bad(field, reason));
            }
            Ok(())
        };
        // an upper bound of 1 is exclusive: draws never reach it
        let below_one = |lo: f64, hi: f64| (0.0..1.0).contains(&lo) && hi <= 1.0;
        if self.samples == 0 {
            return Err(bad("samples", "must be at least 1"));
        }
        check(
            "depolarization",
            &self.depolarization,
            &below_one,
            "must lie in [0, 1)",
        )?;
        check("retardance", &self.retardance, &|_, _| true, "")?;
        check(
            "diattenuation",
            &self.diattenuation,
            &below_one,
            "must lie in [0, 1)",
        )?;
        check(
            "transmittance",
            &self.transmittance,
            &|lo, hi| lo > 0.0 && hi <= 1.0,
            "must lie in (0, 1]",
        )?;
        Ok(())
    }

    fn wants_fit(&self) -> bool {
        self.gw_fit
            .unwrap_or(self.kind == ScenarioKind::Birefringent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRecord {
    pub scenario: Scenario,
    pub point: PlanePoint,
    pub class: PlaneClass,
    pub gw_fidelity: Option<f64>,
}

/// Largest double below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Uniform point on the unit sphere from two uniforms.
fn sphere_point(rng: &mut impl Rng) -> [f64; 3] {
    let phi = TAU * rng.random::<f64>();
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    [r * c, r * s, z]
}

/// Scenario for sample `index`, drawn from its own generator.
pub fn draw_scenario(cfg: &SweepConfig, index: usize) -> Scenario {
    let mut rng = crate::rng::keyed(cfg.seed, index as u64, b"sweep\0\0\0");
    let depolarization = cfg.depolarization.at(rng.random()).min(BELOW_ONE);
    match cfg.kind {
        ScenarioKind::Isotropic => Scenario::Isotropic { depolarization },
        ScenarioKind::Birefringent => {
            let retardance = cfg.retardance.at(rng.random());
            let axis = sphere_point(&mut rng);
            Scenario::Birefringent {
                depolarization,
                retardance,
                axis,
            }
        }
        ScenarioKind::Dichroic => {
            let magnitude = cfg.diattenuation.at(rng.random()).min(BELOW_ONE);
            let diattenuation = sphere_point(&mut rng).map(|x| x * magnitude);
            let transmittance = cfg.transmittance.at(rng.random());
            Scenario::Dichroic {
                depolarization,
                diattenuation,
                transmittance,
            }
        }
    }
}

pub fn evaluate(scenario: &Scenario, fit: bool) -> Result<SweepRecord> {
    let rho = scatter_singlet(scenario)?;
    let point = PlanePoint::of_state(&rho);
    Ok(SweepRecord {
        scenario: *scenario,
        point,
        class: classify_point(&point, CLASSIFY_TOL),
        gw_fidelity: fit.then(|| gw_fit(&rho).fidelity),
    })
}

/// Records in draw order; identical configs give identical records.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    (0..cfg.samples)
        .map(|k| evaluate(&draw_scenario(cfg, k), cfg.wants_fit()))
        .collect()
}
