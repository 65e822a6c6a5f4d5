use rand::Rng;
use rand_distr::StandardNormal;

use super::{mle_reconstruct, CoincidenceCounts, ProjectorSet, SETTINGS};
use crate::error::{Error, Result};
use crate::qstate::{
    linear_entropy, mems_entropy_at, mems_tangle_at, tangle, ErrorBar, PlanePoint,
};

/// Above this fraction of dropped (non-converged) trials the report is flagged.
pub const DROP_WARNING_FRACTION: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    /// Tangle of the reconstruction from the measured counts.
    pub tangle: f64,
    pub linear_entropy: f64,
    /// Averages over the converged trials.
    pub tangle_mean: f64,
    pub linear_entropy_mean: f64,
    /// `|T − T_av|` and `|S_L − S_L,av|`.
    pub sigma_tangle: f64,
    pub sigma_linear_entropy: f64,
    pub trials: usize,
    pub dropped: usize,
    /// Fewer than two settings recorded any counts.
    pub degenerate: bool,
    /// More than [`DROP_WARNING_FRACTION`] of the trials were dropped.
    pub warning: bool,
}

impl ErrorReport {
    pub fn point(&self) -> PlanePoint {
        PlanePoint::new(self.linear_entropy, self.tangle)
            .with_errors(self.sigma_linear_entropy, self.sigma_tangle)
    }
}

/// Counts redrawn from `N(n, √n)` per setting, negative draws set to 0.
fn perturbed(counts: &CoincidenceCounts, seed: u64, trial: u64) -> Result<CoincidenceCounts> {
    // each setting reads its own stream of the trial's generator
    let mut rng = crate::rng::keyed(seed, trial, b"mc-trial");
    let mut n = [0.0; SETTINGS];
    for (m, (out, &mean)) in n.iter_mut().zip(counts.counts()).enumerate() {
        rng.set_stream(m as u64);
        let z: f64 = rng.sample(StandardNormal);
        *out = (mean + mean.sqrt() * z).max(0.0);
    }
    CoincidenceCounts::new(n, counts.per_setting())
}

/// Error bars on `(S_L, T)` by repeated reconstruction of Gaussian-perturbed
/// copies of the data. Deterministic for a given seed.
pub fn monte_carlo_errors(
    counts: &CoincidenceCounts,
    projectors: &ProjectorSet,
    trials: usize,
    seed: u64,
) -> Result<ErrorReport> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            range: ">= 1",
        });
    }
    let point = mle_reconstruct(counts, projectors)?;
    let t_exp = tangle(&point.rho);
    let sl_exp = linear_entropy(&point.rho);

    let (mut t_sum, mut sl_sum, mut kept) = (0.0, 0.0, 0usize);
    for trial in 0..trials {
        let data = perturbed(counts, seed, trial as u64)?;
        let r = match mle_reconstruct(&data, projectors) {
            Ok(r) if r.converged => r,
            Ok(_) | Err(Error::EmptyCounts) | Err(Error::NoConvergence) => continue,
            Err(e) => return Err(e),
        };
        t_sum += tangle(&r.rho);
        sl_sum += linear_entropy(&r.rho);
        kept += 1;
    }
    if kept == 0 {
        return Err(Error::NoConvergence);
    }
    let dropped = trials - kept;
    let t_av = t_sum / kept as f64;
    let sl_av = sl_sum / kept as f64;
    Ok(ErrorReport {
        tangle: t_exp,
        linear_entropy: sl_exp,
        tangle_mean: t_av,
        linear_entropy_mean: sl_av,
        sigma_tangle: (t_exp - t_av).abs(),
        sigma_linear_entropy: (sl_exp - sl_av).abs(),
        trials,
        dropped,
        degenerate: counts.nonzero_settings() < 2,
        warning: dropped as f64 > DROP_WARNING_FRACTION * trials as f64,
    })
}

/// Shortens error bars so no endpoint leaves the physical region: tangle
/// bars stay within `[0, T_mems(S_L)]`, entropy bars within `[0, 1]` and to
/// the left of the MEMS frontier at the point's tangle.
pub fn clip_to_physical(pt: &PlanePoint) -> PlanePoint {
    let (s, t) = (pt.linear_entropy, pt.tangle);
    let mut out = *pt;
    if let Some(bar) = pt.tangle_err {
        let top = mems_tangle_at(s).min(1.0);
        out.tangle_err = Some(ErrorBar {
            minus: bar.minus.min(t.max(0.0)),
            plus: bar.plus.min((top - t).max(0.0)),
        });
    }
    if let Some(bar) = pt.linear_entropy_err {
        let right = mems_entropy_at(t).min(1.0);
        out.linear_entropy_err = Some(ErrorBar {
            minus: bar.minus.min(s.max(0.0)),
            plus: bar.plus.min((right - s).max(0.0)),
        });
    }
    out
}
