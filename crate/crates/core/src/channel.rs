//! Local single-photon maps built from Mueller matrices and applied to one
//! arm of a two-photon state.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mueller::{
    cloude_decompose, compose, depolarizer, diattenuator, retarder, KrausSet, MuellerMatrix,
};
use crate::numerics::{kron, CMatrix2, CMatrix4, DEFAULT_TOL};
use crate::qstate::{singlet, DensityMatrix4};

/// Deviation of the raw output trace from 1 beyond which the output is renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;

/// Which photon the map acts on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Arm {
    /// First tensor factor (the scattered photon).
    #[default]
    A,
    B,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalChannel {
    kraus: KrausSet,
    arm: Arm,
    trace_preserving: bool,
}

pub fn channel_from_mueller(m: &MuellerMatrix, arm: Arm) -> Result<LocalChannel> {
    let kraus = cloude_decompose(m, DEFAULT_TOL)?;
    let trace_preserving = kraus.completeness().max_diff(&CMatrix2::identity()) <= RENORMALIZE_TOL;
    Ok(LocalChannel {
        kraus,
        arm,
        trace_preserving,
    })
}

impl LocalChannel {
    pub fn kraus(&self) -> &KrausSet {
        &self.kraus
    }

    pub fn arm(&self) -> Arm {
        self.arm
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// Weighted two-photon operators `(λ, T ⊗ I)` or `(λ, I ⊗ T)`.
    pub fn operators(&self) -> Vec<(f64, CMatrix4)> {
        let id = CMatrix2::identity();
        self.kraus
            .pairs()
            .iter()
            .map(|p| {
                let k = match self.arm {
                    Arm::A => kron(&p.jones.0, &id),
                    Arm::B => kron(&id, &p.jones.0),
                };
                (p.weight, k)
            })
            .collect()
    }

    /// `Σ λ K ρ K†` before any renormalization.
    pub fn apply_raw(&self, rho: &DensityMatrix4) -> CMatrix4 {
        let r = rho.matrix();
        self.operators()
            .iter()
            .fold(CMatrix4::zeros(), |acc, (w, k)| {
                acc + (*k * *r * k.adjoint()).scale_real(*w)
            })
    }

    /// Applies the map, dividing by the output trace when it differs from 1
    /// (post-selection on detected pairs).
    pub fn apply(&self, rho: &DensityMatrix4) -> Result<DensityMatrix4> {
        let raw = self.apply_raw(rho);
        let trace = raw.trace().re;
        if !(trace > DEFAULT_TOL) {
            return Err(Error::ZeroProbability { trace });
        }
        let mut out = (raw + raw.adjoint()).scale_real(0.5);
        if (trace - 1.0).abs() > RENORMALIZE_TOL {
            out = out.scale_real(1.0 / trace);
        }
        DensityMatrix4::new(out, DEFAULT_TOL)
    }
}

/// The three scattering media: a depolarizer alone, or preceded by a
/// retarder or a diattenuator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scenario {
    Isotropic {
        depolarization: f64,
    },
    Birefringent {
        depolarization: f64,
        retardance: f64,
        axis: [f64; 3],
    },
    Dichroic {
        depolarization: f64,
        diattenuation: [f64; 3],
        transmittance: f64,
    },
}

impl Scenario {
    pub fn tag(&self) -> &'static str {
        match self {
            Scenario::Isotropic { .. } => "I",
            Scenario::Birefringent { .. } => "II",
            Scenario::Dichroic { .. } => "III",
        }
    }

    /// `M_Δ`, `M_B · M_Δ` or `M_D · M_Δ`.
    pub fn mueller(&self) -> Result<MuellerMatrix> {
        match *self {
            Scenario::Isotropic { depolarization } => depolarizer(depolarization),
            Scenario::Birefringent {
                depolarization,
                retardance,
                axis,
            } => compose(&[retarder(retardance, axis)?, depolarizer(depolarization)?]),
            Scenario::Dichroic {
                depolarization,
                diattenuation,
                transmittance,
            } => compose(&[
                diattenuator(diattenuation, transmittance)?,
                depolarizer(depolarization)?,
            ]),
        }
    }

    pub fn channel(&self) -> Result<LocalChannel> {
        channel_from_mueller(&self.mueller()?, Arm::A)
    }
}

/// Sends the first photon of a singlet pair through the scenario's medium.
pub fn scatter_singlet(scenario: &Scenario) -> Result<DensityMatrix4> {
    scenario.channel()?.apply(&singlet())
}
