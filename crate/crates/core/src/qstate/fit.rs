use core::f64::consts::{PI, TAU};

use super::measures::sqrt_state;
use super::{euler_unitary, fidelity, generalized_werner, singlet, DensityMatrix4};
use crate::numerics::{kron, nuclear_norm, CMatrix2, CMatrix4};
use crate::optimize::nelder_mead;

/// Best generalized-Werner approximation of a state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GwFit {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Fidelity of the input with `generalized_werner(p, alpha, beta, gamma)`.
    pub fidelity: f64,
    pub converged: bool,
}

const STARTS: usize = 8;
const FTOL: f64 = 1e-8;

/// Halton radical inverse in base `b`.
fn radical_inverse(mut n: usize, b: usize) -> f64 {
    let mut inv = 1.0 / b as f64;
    let mut r = 0.0;
    while n > 0 {
        r += (n % b) as f64 * inv;
        n /= b;
        inv /= b as f64;
    }
    r
}

struct Objective {
    sqrt_rho: CMatrix4,
    singlet: CMatrix4,
}

impl Objective {
    /// `p = sin²(u)` keeps the mixing weight in [0, 1] without bounds.
    fn fidelity(&self, x: &[f64; 4]) -> f64 {
        let p = x[0].sin().powi(2);
        let lo = ((1.0 - p) / 4.0).sqrt();
        let hi = ((1.0 + 3.0 * p) / 4.0).sqrt();
        let sqrt_w = CMatrix4::identity().scale_real(lo) + self.singlet.scale_real(hi - lo);
        let v = kron(
            euler_unitary(x[1], x[2], x[3]).matrix(),
            &CMatrix2::identity(),
        );
        let sqrt_gw = v * sqrt_w * v.adjoint();
        let f = nuclear_norm(&(self.sqrt_rho * sqrt_gw));
        f * f
    }
}

/// Maximizes `F(ρ, generalized_werner(p, α, β, γ))` over all four parameters
/// with a multi-start simplex search. Angles are reported in `[0, 2π)`.
pub fn gw_fit(rho: &DensityMatrix4) -> GwFit {
    let obj = Objective {
        sqrt_rho: sqrt_state(rho),
        singlet: *singlet().matrix(),
    };
    let cost = |x: &[f64; 4]| 1.0 - obj.fidelity(x);
    let step = [0.4, 1.0, 1.0, 1.0];

    let mut best: Option<([f64; 4], f64, bool)> = None;
    for k in 0..STARTS {
        let start = [
            (radical_inverse(k + 1, 2) * 0.98 + 0.01).sqrt().asin(),
            radical_inverse(k + 1, 3) * TAU,
            radical_inverse(k + 1, 5) * TAU,
            radical_inverse(k + 1, 7) * PI,
        ];
        let m = nelder_mead(cost, start, step, FTOL * 1e-4, 4000);
        if best.is_none_or(|(_, v, _)| m.value < v) {
            best = Some((m.x, m.value, m.converged));
        }
    }
    let (mut x, mut value, mut converged) = best.unwrap_or(([0.0; 4], 1.0, false));

    // restart from the incumbent until the simplex stops finding improvement
    let mut scale = 0.1;
    for _ in 0..6 {
        let polish = nelder_mead(cost, x, step.map(|s| s * scale), FTOL * 1e-4, 4000);
        let gain = value - polish.value;
        if polish.value < value {
            x = polish.x;
            value = polish.value;
        }
        converged = polish.converged;
        if gain.abs() <= FTOL * 1e-2 {
            break;
        }
        scale *= 0.3;
    }

    let p = x[0].sin().powi(2).clamp(0.0, 1.0);
    let [alpha, beta, gamma] = [x[1], x[2], x[3]].map(|a| a.rem_euclid(TAU));
    let target = match generalized_werner(p, alpha, beta, gamma) {
        Ok(t) => t,
        Err(_) => unreachable!("p clamped to [0, 1]"),
    };
    GwFit {
        p,
        alpha,
        beta,
        gamma,
        fidelity: fidelity(rho, &target),
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{mems, werner};
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_family_member() {
        let rho = generalized_werner(0.7, 0.2, 0.5, 1.0).unwrap();
        let fit = gw_fit(&rho);
        assert!(fit.fidelity >= 1.0 - 1e-6, "{fit:?}");
        assert_abs_diff_eq!(fit.p, 0.7, epsilon = 1e-3);
    }

    #[test]
    fn werner_fits_itself() {
        let fit = gw_fit(&werner(0.5).unwrap());
        assert!(fit.fidelity >= 1.0 - 1e-6, "{fit:?}");
    }

    #[test]
    fn reported_parameters_reproduce_fidelity() {
        let rho = mems(0.9).unwrap();
        let fit = gw_fit(&rho);
        let again = fidelity(
            &rho,
            &generalized_werner(fit.p, fit.alpha, fit.beta, fit.gamma).unwrap(),
        );
        assert_abs_diff_eq!(again, fit.fidelity, epsilon = 1e-6);
        assert!(fit.fidelity >= fidelity(&rho, &werner(fit.p).unwrap()) - 1e-9);
    }
}
