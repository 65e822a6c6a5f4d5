use super::DensityMatrix4;
use crate::error::Result;
use crate::numerics::{
    c, general_eigenvalues, hermitian_eig, kron, nuclear_norm, psd_sqrt, roundoff_floor,
    singular_values, CMatrix, CMatrix4, C64, DEFAULT_TOL,
};

/// Eigenvalue real parts in `[-SPIN_FLIP_CLAMP, 0)` are noise and become 0.
const SPIN_FLIP_CLAMP: f64 = 1e-9;

fn sigma_y_sigma_y() -> CMatrix4 {
    let y = CMatrix([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]);
    kron(&y, &y)
}

/// `ρ (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`
pub fn spin_flip(rho: &DensityMatrix4) -> CMatrix4 {
    let yy = sigma_y_sigma_y();
    let r = *rho.matrix();
    r * yy * r.conj() * yy
}

/// Eigenvalues of the spin-flip product, descending, as computed by the
/// general (non-Hermitian) eigenvalue routine.
pub fn spin_flip_eigenvalues(rho: &DensityMatrix4) -> Result<[C64; 4]> {
    let mut ev = general_eigenvalues(&spin_flip(rho))?;
    ev.sort_by(|a, b| b.re.total_cmp(&a.re));
    Ok(ev)
}

/// Square roots of the spin-flip eigenvalues, descending.
///
/// With `ρ = A A†` these are the singular values of `A† (σ_y⊗σ_y) A*`, which
/// keeps the zero eigenvalues of rank-deficient states at round-off level
/// instead of at the square root of round-off.
fn spin_flip_roots(rho: &DensityMatrix4) -> [f64; 4] {
    let eig = match hermitian_eig(rho.matrix(), DEFAULT_TOL) {
        Ok(e) => e,
        Err(_) => unreachable!("DensityMatrix4 is Hermitian"),
    };
    let floor = roundoff_floor(&eig.values);
    let roots = eig.values.map(|w| if w > floor { w.sqrt() } else { 0.0 });
    let a = eig.vectors * CMatrix4::diag(roots);
    let b = a.adjoint() * sigma_y_sigma_y() * a.conj();
    singular_values(&b)
}

/// Concurrence squared, `(max{0, √λ₁ − √λ₂ − √λ₃ − √λ₄})²`.
pub fn tangle(rho: &DensityMatrix4) -> f64 {
    let r = spin_flip_roots(rho);
    let conc = (r[0] - r[1] - r[2] - r[3]).max(0.0);
    (conc * conc).min(1.0)
}

/// Tangle evaluated directly from [`spin_flip_eigenvalues`]. Less accurate
/// near rank-deficient states; kept as an independent cross-check.
pub fn tangle_from_spin_flip_eigenvalues(rho: &DensityMatrix4) -> Result<f64> {
    let ev = spin_flip_eigenvalues(rho)?;
    let roots = ev.map(|z| {
        let x = if z.re < 0.0 && z.re >= -SPIN_FLIP_CLAMP {
            0.0
        } else {
            z.re
        };
        x.max(0.0).sqrt()
    });
    let conc = (roots[0] - roots[1] - roots[2] - roots[3]).max(0.0);
    Ok((conc * conc).min(1.0))
}

/// `(4/3)(1 − Tr ρ²)`
pub fn linear_entropy(rho: &DensityMatrix4) -> f64 {
    let m = rho.matrix();
    let purity: f64 =
        m.0.iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum();
    (4.0 / 3.0 * (1.0 - purity)).clamp(0.0, 1.0)
}

/// Squared (Jozsa) fidelity `(Tr √(√ρ σ √ρ))²`, computed as the squared
/// nuclear norm of `√ρ √σ`.
pub fn fidelity(rho: &DensityMatrix4, sigma: &DensityMatrix4) -> f64 {
    let sr = sqrt_state(rho);
    let ss = sqrt_state(sigma);
    let f = nuclear_norm(&(sr * ss));
    (f * f).clamp(0.0, 1.0)
}

pub(crate) fn sqrt_state(rho: &DensityMatrix4) -> CMatrix4 {
    match psd_sqrt(rho.matrix(), DEFAULT_TOL) {
        Ok(s) => s,
        Err(_) => unreachable!("DensityMatrix4 is positive semidefinite"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::re;
    use crate::qstate::{mems, singlet, werner};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn singlet_measures() {
        let s = singlet();
        assert_abs_diff_eq!(tangle(&s), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(linear_entropy(&s), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn product_state_has_no_tangle() {
        let hh = DensityMatrix4::pure([re(1.0), re(0.0), re(0.0), re(0.0)]).unwrap();
        assert_eq!(tangle(&hh), 0.0);
        assert_abs_diff_eq!(linear_entropy(&hh), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn werner_half() {
        let w = werner(0.5).unwrap();
        assert_abs_diff_eq!(tangle(&w), 0.0625, epsilon = 1e-12);
        assert_abs_diff_eq!(linear_entropy(&w), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(
            linear_entropy(&DensityMatrix4::maximally_mixed()),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn werner_separability_threshold() {
        assert_abs_diff_eq!(tangle(&werner(1.0 / 3.0).unwrap()), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn spin_flip_spectrum_of_singlet() {
        let ev = spin_flip_eigenvalues(&singlet()).unwrap();
        assert_abs_diff_eq!((ev[0] - re(1.0)).norm(), 0.0, epsilon = 1e-12);
        for z in &ev[1..] {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn both_tangle_routes_agree_on_werner() {
        for k in 0..=20 {
            let w = werner(k as f64 / 20.0).unwrap();
            let direct = tangle_from_spin_flip_eigenvalues(&w).unwrap();
            assert_abs_diff_eq!(direct, tangle(&w), epsilon = 1e-7);
        }
    }

    #[test]
    fn fidelity_examples() {
        let s = singlet();
        for p in [0.0, 0.3, 0.8, 1.0] {
            let w = werner(p).unwrap();
            assert_abs_diff_eq!(fidelity(&s, &w), (3.0 * p + 1.0) / 4.0, epsilon = 1e-12);
            assert_abs_diff_eq!(fidelity(&w, &s), (3.0 * p + 1.0) / 4.0, epsilon = 1e-12);
        }
        let m = mems(0.7).unwrap();
        assert_abs_diff_eq!(fidelity(&m, &m), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_with_pure_state_is_overlap() {
        let k = [re(0.6), Complex64::new(0.0, 0.48), re(0.0), re(0.64)];
        let psi = DensityMatrix4::pure(k).unwrap();
        let w = werner(0.6).unwrap();
        let overlap: Complex64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| k[i].conj() * w.matrix().0[i][j] * k[j])
            .sum();
        assert_abs_diff_eq!(fidelity(&psi, &w), overlap.re, epsilon = 1e-12);
    }
}
