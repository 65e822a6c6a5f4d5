use alloc::vec::Vec;

use super::{linear_entropy, mems, tangle};
use crate::error::{Error, Result};

/// Asymmetric error bar extents, both nonnegative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorBar {
    pub minus: f64,
    pub plus: f64,
}

impl ErrorBar {
    pub fn symmetric(sigma: f64) -> Self {
        Self {
            minus: sigma,
            plus: sigma,
        }
    }
}

/// A state's position in the (S_L, T) plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanePoint {
    pub linear_entropy: f64,
    pub tangle: f64,
    pub linear_entropy_err: Option<ErrorBar>,
    pub tangle_err: Option<ErrorBar>,
}

impl PlanePoint {
    pub fn new(linear_entropy: f64, tangle: f64) -> Self {
        Self {
            linear_entropy,
            tangle,
            linear_entropy_err: None,
            tangle_err: None,
        }
    }

    pub fn with_errors(mut self, sigma_sl: f64, sigma_t: f64) -> Self {
        self.linear_entropy_err = Some(ErrorBar::symmetric(sigma_sl));
        self.tangle_err = Some(ErrorBar::symmetric(sigma_t));
        self
    }

    pub fn of_state(rho: &super::DensityMatrix4) -> Self {
        Self::new(linear_entropy(rho), tangle(rho))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlaneClass {
    OnWerner,
    SubWerner,
    SuperWerner,
    Unphysical,
}

impl PlaneClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PlaneClass::OnWerner => "on_werner",
            PlaneClass::SubWerner => "sub_werner",
            PlaneClass::SuperWerner => "super_werner",
            PlaneClass::Unphysical => "unphysical",
        }
    }
}

/// Tangle of the Werner state with linear entropy `s_l`, using `p = √(1 − S_L)`.
pub fn werner_tangle_at(s_l: f64) -> f64 {
    let p = (1.0 - s_l.clamp(0.0, 1.0)).sqrt();
    let c = ((3.0 * p - 1.0) / 2.0).max(0.0);
    c * c
}

const MEMS_KINK: f64 = 16.0 / 27.0;
const MEMS_SEPARABLE: f64 = 8.0 / 9.0;

/// Largest tangle any two-qubit state with linear entropy `s_l` can have.
pub fn mems_tangle_at(s_l: f64) -> f64 {
    if s_l <= 0.0 {
        1.0
    } else if s_l >= MEMS_SEPARABLE {
        0.0
    } else if s_l >= MEMS_KINK {
        1.5 * (MEMS_SEPARABLE - s_l)
    } else {
        let c = (1.0 + (1.0 - 1.5 * s_l).sqrt()) / 2.0;
        c * c
    }
}

/// Linear entropy of the MEMS state with tangle `t`: the largest S_L at
/// which tangle `t` is still attainable.
pub fn mems_entropy_at(t: f64) -> f64 {
    let c = t.clamp(0.0, 1.0).sqrt();
    if c >= 2.0 / 3.0 {
        8.0 / 3.0 * c * (1.0 - c)
    } else {
        MEMS_SEPARABLE - 2.0 / 3.0 * c * c
    }
}

pub fn classify_point(pt: &PlanePoint, tol: f64) -> PlaneClass {
    let t = pt.tangle;
    if t > mems_tangle_at(pt.linear_entropy) + tol {
        return PlaneClass::Unphysical;
    }
    let tw = werner_tangle_at(pt.linear_entropy);
    if (t - tw).abs() <= tol {
        PlaneClass::OnWerner
    } else if t < tw {
        PlaneClass::SubWerner
    } else {
        PlaneClass::SuperWerner
    }
}

/// One sample of a boundary curve with the family parameter that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    pub param: f64,
    pub point: PlanePoint,
}

fn grid(samples: usize) -> Result<impl Iterator<Item = f64>> {
    if samples < 2 {
        return Err(Error::OutOfRange {
            name: "samples",
            value: samples as f64,
            range: ">= 2",
        });
    }
    let last = (samples - 1) as f64;
    Ok((0..samples).map(move |k| k as f64 / last))
}

/// Werner curve `(1 − p², max(0, (3p − 1)/2)²)` for `p` evenly spaced in [0, 1].
pub fn werner_curve(samples: usize) -> Result<Vec<CurveSample>> {
    Ok(grid(samples)?
        .map(|p| {
            let c = ((3.0 * p - 1.0) / 2.0).max(0.0);
            CurveSample {
                param: p,
                point: PlanePoint::new(1.0 - p * p, c * c),
            }
        })
        .collect())
}

/// MEMS frontier, evaluated on the states `mems(C)` for `C` evenly spaced in [0, 1].
pub fn mems_curve(samples: usize) -> Result<Vec<CurveSample>> {
    grid(samples)?
        .map(|c| {
            let rho = mems(c)?;
            Ok(CurveSample {
                param: c,
                point: PlanePoint::of_state(&rho),
            })
        })
        .collect()
}
