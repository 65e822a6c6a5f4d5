use super::{CoincidenceCounts, ProjectorSet, SETTINGS};
use crate::error::{Error, Result};
use crate::mueller::stokes_paulis;
use crate::numerics::{c, hermitian_eig, kron, real, CMatrix4, HermitianEig, C64, DEFAULT_TOL};
use crate::optimize::{lbfgs, LbfgsOptions};
use crate::qstate::DensityMatrix4;

/// Mixing weight of `I/4` added to the linear-inversion starting point so
/// the initial factor is nonsingular.
const START_MIXING: f64 = 1e-3;

const OFF_DIAGONAL: [(usize, usize); 6] = [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructionResult {
    pub rho: DensityMatrix4,
    pub converged: bool,
    /// Poisson deviance `Σ [μ − n − n ln(μ/n)]` at the returned state.
    pub objective: f64,
    pub iterations: usize,
}

/// Lower-triangular factor from 4 real diagonal and 6 complex sub-diagonal entries.
fn unpack(x: &[f64; SETTINGS]) -> CMatrix4 {
    let mut l = CMatrix4::zeros();
    for i in 0..4 {
        l.0[i][i] = c(x[i], 0.0);
    }
    for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
        l.0[i][j] = c(x[4 + 2 * k], x[5 + 2 * k]);
    }
    l
}

fn pack(l: &CMatrix4) -> [f64; SETTINGS] {
    let mut x = [0.0; SETTINGS];
    for i in 0..4 {
        x[i] = l.0[i][i].re;
    }
    for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
        x[4 + 2 * k] = l.0[i][j].re;
        x[5 + 2 * k] = l.0[i][j].im;
    }
    x
}

/// Lower-triangular `L` with `L† L = a` for positive definite `a`.
fn reversed_cholesky(a: &CMatrix4) -> Option<CMatrix4> {
    let r = CMatrix4::from_fn(|i, j| a.0[3 - i][3 - j]);
    let mut ch = CMatrix4::zeros();
    for j in 0..4 {
        let mut d = r.0[j][j].re;
        for k in 0..j {
            d -= ch.0[j][k].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        ch.0[j][j] = c(d, 0.0);
        for i in j + 1..4 {
            let mut s = r.0[i][j];
            for k in 0..j {
                s -= ch.0[i][k] * ch.0[j][k].conj();
            }
            ch.0[i][j] = s / d;
        }
    }
    Some(CMatrix4::from_fn(|i, j| ch.0[3 - j][3 - i].conj()))
}

/// Linear inversion of the counts, clipped to the PSD cone and mixed with a
/// little white noise.
fn starting_factor(counts: &CoincidenceCounts, projectors: &ProjectorSet) -> CMatrix4 {
    let scale = counts.per_setting().unwrap_or(1.0);
    let rhs = counts.counts().map(|n| n / scale);
    let fallback = CMatrix4::identity()
        .scale_real((counts.total() / scale / 4.0).max(f64::MIN_POSITIVE).sqrt());
    let Some(coef) = real::solve(projectors.design_matrix(), rhs) else {
        return fallback;
    };
    let s = stokes_paulis();
    let mut lin = CMatrix4::zeros();
    for (k, w) in coef.iter().enumerate() {
        lin += kron(&s[k / 4], &s[k % 4]).scale_real(0.5 * w);
    }
    let lin = (lin + lin.adjoint()).scale_real(0.5);
    let Ok(eig) = hermitian_eig(&lin, DEFAULT_TOL) else {
        return fallback;
    };
    let clipped = eig.values.map(|w| w.max(0.0));
    let t: f64 = clipped.iter().sum();
    if !(t > 0.0) {
        return fallback;
    }
    let psd = HermitianEig {
        values: clipped,
        vectors: eig.vectors,
    }
    .reconstruct();
    let start = psd.scale_real(1.0 - START_MIXING)
        + CMatrix4::identity().scale_real(START_MIXING * t / 4.0);
    reversed_cholesky(&start).unwrap_or(fallback)
}

struct Likelihood<'a> {
    n: &'a [f64; SETTINGS],
    kets: &'a [[C64; 4]; SETTINGS],
    per_setting: Option<f64>,
}

impl Likelihood<'_> {
    fn eval(&self, x: &[f64; SETTINGS], grad: &mut [f64; SETTINGS]) -> f64 {
        let l = unpack(x);
        let s = l.frobenius_norm().powi(2);
        if !(s > 0.0) {
            return f64::INFINITY;
        }
        let mut value = 0.0;
        let mut weighted = CMatrix4::zeros();
        let mut trace_term = 0.0;
        for (psi, &n) in self.kets.iter().zip(self.n) {
            let v = l.mul_vec(psi);
            let a: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let mu = match self.per_setting {
                Some(big_n) => big_n * a / s,
                None => a,
            };
            let gp = if n > 0.0 {
                if !(mu > 0.0) {
                    return f64::INFINITY;
                }
                value += mu - n - n * (mu / n).ln();
                1.0 - n / mu
            } else {
                value += mu;
                1.0
            };
            weighted += CMatrix4::outer(&v, psi).scale_real(gp);
            trace_term += gp * a;
        }
        let g = match self.per_setting {
            Some(big_n) => (weighted - l.scale_real(trace_term / s)).scale_real(2.0 * big_n / s),
            None => weighted.scale_real(2.0),
        };
        *grad = pack(&g);
        value
    }
}

/// Maximum-likelihood state for Poisson-distributed counts, with `ρ = L†L / Tr(L†L)`
/// and `L` lower triangular so every iterate is a valid state.
///
/// Without a known per-setting intensity the overall rate is fitted jointly
/// (the expected count is `⟨ψ|L†L|ψ⟩`).
pub fn mle_reconstruct(
    counts: &CoincidenceCounts,
    projectors: &ProjectorSet,
) -> Result<ReconstructionResult> {
    mle_with_options(counts, projectors, &LbfgsOptions::default())
}

pub(crate) fn mle_with_options(
    counts: &CoincidenceCounts,
    projectors: &ProjectorSet,
    opts: &LbfgsOptions,
) -> Result<ReconstructionResult> {
    if counts.total() <= 0.0 {
        return Err(Error::EmptyCounts);
    }
    let lik = Likelihood {
        n: counts.counts(),
        kets: projectors.kets(),
        per_setting: counts.per_setting(),
    };
    let x0 = pack(&starting_factor(counts, projectors));
    let min = lbfgs(|x, g| lik.eval(x, g), x0, opts);
    let l = unpack(&min.x);
    let raw = l.adjoint() * l;
    let t = raw.trace().re;
    if !(t > 0.0) || !raw.is_finite() {
        return Err(Error::NoConvergence);
    }
    let rho = (raw + raw.adjoint()).scale_real(0.5 / t);
    Ok(ReconstructionResult {
        rho: DensityMatrix4::from_trusted(rho),
        converged: min.converged,
        objective: min.value,
        iterations: min.iterations,
    })
}
