//! Simulated two-photon polarization tomography: projective coincidence
//! measurements, maximum-likelihood reconstruction and Monte Carlo error bars.

mod mle;
mod montecarlo;

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;

use crate::error::{Error, Result};
use crate::mueller::stokes_paulis;
use crate::numerics::{c, kron, re, real, C64};
use crate::qstate::DensityMatrix4;

pub use mle::{mle_reconstruct, ReconstructionResult};
pub use montecarlo::{clip_to_physical, monte_carlo_errors, ErrorReport, DROP_WARNING_FRACTION};

pub const SETTINGS: usize = 16;

/// Setting labels of the standard measurement set, in measurement order.
pub const STANDARD_LABELS: [&str; SETTINGS] = [
    "HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH", "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL",
];

/// Single-photon polarization ket for one of `H V D A R L`.
pub fn polarization_ket(label: char) -> Option<[C64; 2]> {
    let s = FRAC_1_SQRT_2;
    Some(match label {
        'H' => [re(1.0), re(0.0)],
        'V' => [re(0.0), re(1.0)],
        'D' => [re(s), re(s)],
        'A' => [re(s), re(-s)],
        'R' => [re(s), c(0.0, -s)],
        'L' => [re(s), c(0.0, s)],
        _ => return None,
    })
}

fn product_ket(label: &str) -> Option<[C64; 4]> {
    let mut chars = label.chars();
    let (a, b) = (chars.next()?, chars.next()?);
    if chars.next().is_some() {
        return None;
    }
    let (a, b) = (polarization_ket(a)?, polarization_ket(b)?);
    Some(core::array::from_fn(|k| a[k / 2] * b[k % 2]))
}

/// Sixteen rank-one two-photon projectors that together determine any state.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorSet {
    labels: Vec<String>,
    kets: [[C64; 4]; SETTINGS],
}

impl ProjectorSet {
    /// Builds a set from two-letter labels over `H V D A R L`, rejecting
    /// sets that are not informationally complete.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        if labels.len() != SETTINGS {
            return Err(Error::CountMismatch {
                expected: SETTINGS,
                got: labels.len(),
            });
        }
        let mut kets = [[C64::zero(); 4]; SETTINGS];
        for (k, l) in kets.iter_mut().zip(labels) {
            *k = product_ket(l.as_ref()).ok_or(Error::InvalidConfig {
                field: "projectors",
                reason: "labels are two letters from H, V, D, A, R, L",
            })?;
        }
        let set = Self {
            labels: labels.iter().map(|l| String::from(l.as_ref())).collect(),
            kets,
        };
        let rank = real::rank(&set.design_matrix(), 1e-10);
        if rank < SETTINGS {
            return Err(Error::Incomplete { rank });
        }
        Ok(set)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn kets(&self) -> &[[C64; 4]; SETTINGS] {
        &self.kets
    }

    /// Index of a setting label.
    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `⟨ψ_m|ρ|ψ_m⟩`
    pub fn probability(&self, m: usize, rho: &DensityMatrix4) -> f64 {
        let k = &self.kets[m];
        let rk = rho.matrix().mul_vec(k);
        k.iter().zip(&rk).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `B[m][k] = ⟨ψ_m|Γ_k|ψ_m⟩` with `Γ_{4i+j} = σ_i ⊗ σ_j / 2`, an
    /// orthonormal basis of Hermitian 4×4 matrices.
    pub(crate) fn design_matrix(&self) -> [[f64; SETTINGS]; SETTINGS] {
        let s = stokes_paulis();
        let gammas: [_; SETTINGS] =
            core::array::from_fn(|k| kron(&s[k / 4], &s[k % 4]).scale_real(0.5));
        core::array::from_fn(|m| {
            let psi = &self.kets[m];
            core::array::from_fn(|k| {
                let g = gammas[k].mul_vec(psi);
                psi.iter().zip(&g).map(|(a, b)| (a.conj() * b).re).sum()
            })
        })
    }
}

pub fn standard_projectors() -> ProjectorSet {
    match ProjectorSet::from_labels(&STANDARD_LABELS) {
        Ok(p) => p,
        Err(_) => unreachable!("standard set is complete"),
    }
}

/// Coincidence counts for the sixteen settings of a [`ProjectorSet`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoincidenceCounts {
    n: [f64; SETTINGS],
    per_setting: Option<f64>,
}

impl CoincidenceCounts {
    /// `per_setting` is the expected count for a unit-probability
    /// projection; when absent the reconstruction fits it as a free intensity.
    pub fn new(n: [f64; SETTINGS], per_setting: Option<f64>) -> Result<Self> {
        for (index, &value) in n.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidCount { index, value });
            }
        }
        if let Some(v) = per_setting {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::OutOfRange {
                    name: "counts_per_setting",
                    value: v,
                    range: "(0, inf)",
                });
            }
        }
        Ok(Self { n, per_setting })
    }

    pub fn from_slice(n: &[f64], per_setting: Option<f64>) -> Result<Self> {
        let arr: [f64; SETTINGS] = n.try_into().map_err(|_| Error::CountMismatch {
            expected: SETTINGS,
            got: n.len(),
        })?;
        Self::new(arr, per_setting)
    }

    pub fn counts(&self) -> &[f64; SETTINGS] {
        &self.n
    }

    pub fn per_setting(&self) -> Option<f64> {
        self.per_setting
    }

    pub fn total(&self) -> f64 {
        self.n.iter().sum()
    }

    pub fn nonzero_settings(&self) -> usize {
        self.n.iter().filter(|&&x| x > 0.0).count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Noise {
    #[default]
    None,
    Poisson,
}

/// Counts with mean `N·⟨ψ_m|ρ|ψ_m⟩`, exact for [`Noise::None`] and drawn
/// independently per setting for [`Noise::Poisson`].
pub fn simulate_counts(
    rho: &DensityMatrix4,
    per_setting: f64,
    noise: Noise,
    seed: u64,
    projectors: &ProjectorSet,
) -> Result<CoincidenceCounts> {
    if !(per_setting > 0.0) || !per_setting.is_finite() {
        return Err(Error::OutOfRange {
            name: "counts_per_setting",
            value: per_setting,
            range: "(0, inf)",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = [0.0; SETTINGS];
    for (m, out) in n.iter_mut().enumerate() {
        let mean = (per_setting * projectors.probability(m, rho)).max(0.0);
        *out = match noise {
            Noise::None => mean,
            Noise::Poisson if mean > 0.0 => match Poisson::new(mean) {
                Ok(d) => rng.sample(d),
                Err(_) => {
                    return Err(Error::OutOfRange {
                        name: "counts_per_setting",
                        value: per_setting,
                        range: "Poisson mean too large",
                    })
                }
            },
            Noise::Poisson => 0.0,
        };
    }
    CoincidenceCounts::new(n, Some(per_setting))
}
