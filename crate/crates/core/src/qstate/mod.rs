//! Two-qubit polarization states in the product basis (HH, HV, VH, VV), the
//! named state families, entanglement/mixedness measures and the geometry of
//! the linear-entropy/tangle plane.

mod fit;
mod measures;
mod plane;

pub use fit::{gw_fit, GwFit};
pub use measures::{
    fidelity, linear_entropy, spin_flip, spin_flip_eigenvalues, tangle,
    tangle_from_spin_flip_eigenvalues,
};
pub use plane::{
    classify_point, mems_curve, mems_entropy_at, mems_tangle_at, werner_curve, werner_tangle_at,
    CurveSample, ErrorBar, PlaneClass, PlanePoint,
};

use core::f64::consts::FRAC_1_SQRT_2;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::{c, hermitian_eig, kron, re, CMatrix, CMatrix2, CMatrix4, C64, DEFAULT_TOL};

/// A validated two-photon polarization density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix4(CMatrix4);

impl DensityMatrix4 {
    /// Checks Hermiticity, unit trace and positivity, each within `tol`.
    pub fn new(m: CMatrix4, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let trace = m.trace();
        if (trace - re(1.0)).norm() > tol {
            return Err(Error::BadTrace { trace: trace.re });
        }
        let eig = hermitian_eig(&m, tol)?;
        if eig.min_value() < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: eig.min_value(),
            });
        }
        Ok(Self(m))
    }

    /// Divides a positive semidefinite matrix by its trace.
    pub fn from_unnormalized(m: CMatrix4) -> Result<Self> {
        let trace = m.trace().re;
        if !(trace > 0.0) || !trace.is_finite() {
            return Err(Error::BadTrace { trace });
        }
        Self::new(m.scale_real(1.0 / trace), DEFAULT_TOL)
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`
    pub fn pure(ket: [C64; 4]) -> Result<Self> {
        Self::from_unnormalized(CMatrix4::outer(&ket, &ket))
    }

    pub fn maximally_mixed() -> Self {
        Self(CMatrix4::identity().scale_real(0.25))
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix4 {
        self.0
    }

    /// `(A ⊗ B) ρ (A ⊗ B)†` for unitary `A`, `B`.
    pub fn local_unitary(&self, a: &QubitUnitary, b: &QubitUnitary) -> Self {
        let u = kron(a.matrix(), b.matrix());
        Self(u * self.0 * u.adjoint())
    }

    pub(crate) fn from_trusted(m: CMatrix4) -> Self {
        Self(m)
    }
}

/// A 2×2 unitary acting on one photon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitUnitary(CMatrix2);

impl QubitUnitary {
    pub fn new(m: CMatrix2, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = (m * m.adjoint()).max_diff(&CMatrix2::identity());
        if dev > tol {
            return Err(Error::OutOfRange {
                name: "unitarity defect",
                value: dev,
                range: "[0, tol]",
            });
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(CMatrix2::identity())
    }

    pub fn matrix(&self) -> &CMatrix2 {
        &self.0
    }
}

/// `V(α, β, γ)`: the SU(2) element parametrized by three Euler angles.
pub fn euler_unitary(alpha: f64, beta: f64, gamma: f64) -> QubitUnitary {
    let (sg, cg) = (gamma / 2.0).sin_cos();
    let e = |phi: f64| {
        let (s, co) = phi.sin_cos();
        c(co, s)
    };
    QubitUnitary(CMatrix([
        [
            e(-(alpha + beta) / 2.0) * cg,
            -e(-(alpha - beta) / 2.0) * sg,
        ],
        [e((alpha - beta) / 2.0) * sg, e((alpha + beta) / 2.0) * cg],
    ]))
}

/// `(|HV⟩ − |VH⟩)/√2`
pub fn singlet_ket() -> [C64; 4] {
    [
        C64::zero(),
        re(FRAC_1_SQRT_2),
        re(-FRAC_1_SQRT_2),
        C64::zero(),
    ]
}

pub fn singlet() -> DensityMatrix4 {
    let k = singlet_ket();
    DensityMatrix4(CMatrix4::outer(&k, &k))
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

/// `p ρ_singlet + (1 − p) I/4`
pub fn werner(p: f64) -> Result<DensityMatrix4> {
    check_unit("p", p)?;
    let m = singlet().0.scale_real(p) + CMatrix4::identity().scale_real((1.0 - p) / 4.0);
    Ok(DensityMatrix4(m))
}

/// Werner state rotated by `V(α, β, γ)` on the first photon only.
pub fn generalized_werner(p: f64, alpha: f64, beta: f64, gamma: f64) -> Result<DensityMatrix4> {
    let w = werner(p)?;
    Ok(w.local_unitary(
        &euler_unitary(alpha, beta, gamma),
        &QubitUnitary::identity(),
    ))
}

/// Concurrence-parametrized maximally entangled mixed state: populations
/// `x, 1 − 2x, 0, x` on (HH, HV, VH, VV) and coherence `C/2` between HH and
/// VV, with `x = C/2` above `C = 2/3` and `x = 1/3` below.
pub fn mems(concurrence: f64) -> Result<DensityMatrix4> {
    check_unit("C", concurrence)?;
    let x = if concurrence >= 2.0 / 3.0 {
        concurrence / 2.0
    } else {
        1.0 / 3.0
    };
    let mut m = CMatrix4::diag([x, 1.0 - 2.0 * x, 0.0, x]);
    m.0[0][3] = re(concurrence / 2.0);
    m.0[3][0] = re(concurrence / 2.0);
    Ok(DensityMatrix4(m))
}
