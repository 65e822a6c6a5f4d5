//! Classical polarization optics: Mueller matrices in the Stokes basis, the
//! Jones matrices of non-depolarizing elements, and the coherency-matrix
//! (Cloude) expansion of a Mueller matrix into weighted Jones matrices.
//!
//! Stokes components are `S₁ = H − V`, `S₂ = D − A`, `S₃ = R − L` with
//! `R = (H − iV)/√2`, and the matching Pauli basis is
//! `σ₁ = diag(1, −1)`, `σ₂ = [[0, 1], [1, 0]]`, `σ₃ = [[0, i], [−i, 0]]`.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::{c, hermitian_eig, kron, CMatrix, CMatrix2, CMatrix4, C64};

/// Pauli matrices in Stokes order.
pub fn stokes_paulis() -> [CMatrix2; 4] {
    let z = C64::zero();
    [
        CMatrix2::identity(),
        CMatrix2::diag([1.0, -1.0]),
        CMatrix2::from_real([[0.0, 1.0], [1.0, 0.0]]),
        CMatrix([[z, c(0.0, 1.0)], [c(0.0, -1.0), z]]),
    ]
}

/// Real 4×4 matrix acting on Stokes vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuellerMatrix(pub [[f64; 4]; 4]);

impl MuellerMatrix {
    pub fn new(rows: [[f64; 4]; 4]) -> Result<Self> {
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(rows[0][0] > 0.0) {
            return Err(Error::NonPositiveTransmission { m00: rows[0][0] });
        }
        Ok(Self(rows))
    }

    pub fn identity() -> Self {
        Self::diagonal([1.0; 4])
    }

    fn diagonal(d: [f64; 4]) -> Self {
        Self(core::array::from_fn(|i| {
            core::array::from_fn(|j| if i == j { d[i] } else { 0.0 })
        }))
    }

    pub fn rows(&self) -> &[[f64; 4]; 4] {
        &self.0
    }

    pub fn apply(&self, s: [f64; 4]) -> [f64; 4] {
        core::array::from_fn(|i| (0..4).map(|j| self.0[i][j] * s[j]).sum())
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `self · rhs`: `rhs` acts on the light first.
    pub fn then_after(&self, rhs: &Self) -> Self {
        Self(core::array::from_fn(|i| {
            core::array::from_fn(|j| (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
        }))
    }
}

/// 2×2 complex matrix of a non-depolarizing element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesMatrix(pub CMatrix2);

/// Hermitian coherency ("dynamical") matrix of a Mueller matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherencyMatrix(pub CMatrix4);

impl CoherencyMatrix {
    /// `M_ij = Tr[H (σ_i ⊗ σ_j*)]`
    pub fn to_mueller(&self) -> MuellerMatrix {
        let s = stokes_paulis();
        MuellerMatrix(core::array::from_fn(|i| {
            core::array::from_fn(|j| (self.0 * kron(&s[i], &s[j].conj())).trace().re)
        }))
    }
}

/// `H = (1/4) Σ M_ij σ_i ⊗ σ_j*`
pub fn coherency_from_mueller(m: &MuellerMatrix) -> CoherencyMatrix {
    let s = stokes_paulis();
    let mut h = CMatrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            if m.0[i][j] != 0.0 {
                h += kron(&s[i], &s[j].conj()).scale_real(m.0[i][j] / 4.0);
            }
        }
    }
    CoherencyMatrix(h)
}

/// `M_ij = (1/2) Tr(σ_i J σ_j J†)`
pub fn mueller_from_jones(j: &JonesMatrix) -> MuellerMatrix {
    let s = stokes_paulis();
    let jm = j.0;
    let jd = jm.adjoint();
    MuellerMatrix(core::array::from_fn(|a| {
        core::array::from_fn(|b| 0.5 * (s[a] * jm * s[b] * jd).trace().re)
    }))
}

/// One term `λ_μ T_μ ⊗ T_μ*` of the expansion, with `Tr(T†T) = 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausPair {
    pub weight: f64,
    pub jones: JonesMatrix,
}

/// Weighted Jones matrices, sorted by descending weight.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    pairs: Vec<KrausPair>,
}

impl KrausSet {
    pub fn pairs(&self) -> &[KrausPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `Σ λ_μ M(T_μ)`
    pub fn to_mueller(&self) -> MuellerMatrix {
        let mut out = [[0.0; 4]; 4];
        for p in &self.pairs {
            let m = mueller_from_jones(&p.jones);
            for (o, v) in out.iter_mut().flatten().zip(m.0.iter().flatten()) {
                *o += p.weight * v;
            }
        }
        MuellerMatrix(out)
    }

    /// `Σ λ_μ T_μ† T_μ`; the identity exactly when the map preserves trace.
    pub fn completeness(&self) -> CMatrix2 {
        self.pairs.iter().fold(CMatrix2::zeros(), |acc, p| {
            acc + (p.jones.0.adjoint() * p.jones.0).scale_real(p.weight)
        })
    }
}

fn jones_from_eigenvector(e: [C64; 4]) -> JonesMatrix {
    let mut t = CMatrix2::from_fn(|i, j| e[2 * i + j] * core::f64::consts::SQRT_2);
    // global phase: first entry of (near-)maximal modulus made real positive
    let flat = [t.0[0][0], t.0[0][1], t.0[1][0], t.0[1][1]];
    let top = flat.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if let Some(z) = flat.iter().find(|z| z.norm() >= top * (1.0 - 1e-12)) {
        if z.norm() > 0.0 {
            t = t.scale(z.conj() / z.norm());
        }
    }
    JonesMatrix(t)
}

/// All four eigenpairs of the coherency matrix as `(λ, T)` pairs, descending.
/// Eigenvalues in `[-tol, tol]` are reported as exactly zero.
pub fn cloude_spectrum(m: &MuellerMatrix, tol: f64) -> Result<[KrausPair; 4]> {
    let h = coherency_from_mueller(m);
    let eig = hermitian_eig(&h.0, tol)?;
    let min = eig.min_value();
    if min < -tol {
        return Err(Error::NotPhysical {
            min_eigenvalue: min,
        });
    }
    Ok(core::array::from_fn(|k| KrausPair {
        weight: if eig.values[k].abs() <= tol {
            0.0
        } else {
            eig.values[k]
        },
        jones: jones_from_eigenvector(eig.vectors.column(k)),
    }))
}

/// Expands a physical Mueller matrix as `Σ λ_μ T_μ ⊗ T_μ*`, keeping the
/// terms with nonzero weight.
pub fn cloude_decompose(m: &MuellerMatrix, tol: f64) -> Result<KrausSet> {
    let pairs = cloude_spectrum(m, tol)?
        .into_iter()
        .filter(|p| p.weight > 0.0)
        .collect();
    Ok(KrausSet { pairs })
}

pub fn cloude_eigenvalues(m: &MuellerMatrix, tol: f64) -> Result<[f64; 4]> {
    Ok(hermitian_eig(&coherency_from_mueller(m).0, tol)?.values)
}

/// Completely positive iff the smallest coherency eigenvalue is `≥ −tol`.
pub fn is_physical(m: &MuellerMatrix, tol: f64) -> bool {
    cloude_eigenvalues(m, tol).is_ok_and(|w| w[3] >= -tol)
}

/// Isotropic depolarizer `diag(1, a, a, a)` with `a = 1 − Δ`.
pub fn depolarizer(depolarization: f64) -> Result<MuellerMatrix> {
    if !(0.0..1.0).contains(&depolarization) {
        return Err(Error::OutOfRange {
            name: "depolarization",
            value: depolarization,
            range: "[0, 1)",
        });
    }
    let a = 1.0 - depolarization;
    Ok(MuellerMatrix::diagonal([1.0, a, a, a]))
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Pure retarder: rotation of the Poincaré sphere by `retardance` about
/// `axis` (normalized here; must be nonzero).
pub fn retarder(retardance: f64, axis: [f64; 3]) -> Result<MuellerMatrix> {
    if !retardance.is_finite() || axis.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = norm3(&axis);
    if n <= f64::EPSILON {
        return Err(Error::ZeroAxis);
    }
    let u = axis.map(|x| x / n);
    let (s, co) = retardance.sin_cos();
    let k = 1.0 - co;
    let rot = [
        [
            co + u[0] * u[0] * k,
            u[0] * u[1] * k - u[2] * s,
            u[0] * u[2] * k + u[1] * s,
        ],
        [
            u[1] * u[0] * k + u[2] * s,
            co + u[1] * u[1] * k,
            u[1] * u[2] * k - u[0] * s,
        ],
        [
            u[2] * u[0] * k - u[1] * s,
            u[2] * u[1] * k + u[0] * s,
            co + u[2] * u[2] * k,
        ],
    ];
    let mut m = MuellerMatrix::identity();
    for i in 0..3 {
        m.0[i + 1][1..4].copy_from_slice(&rot[i]);
    }
    Ok(m)
}

/// Pure diattenuator with diattenuation vector `d` (`|d| < 1`) and
/// unpolarized transmittance `tu ∈ (0, 1]`.
pub fn diattenuator(d: [f64; 3], tu: f64) -> Result<MuellerMatrix> {
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let dn = norm3(&d);
    if dn >= 1.0 {
        return Err(Error::OutOfRange {
            name: "|d|",
            value: dn,
            range: "[0, 1)",
        });
    }
    if !(tu > 0.0 && tu <= 1.0) {
        return Err(Error::OutOfRange {
            name: "transmittance",
            value: tu,
            range: "(0, 1]",
        });
    }
    let root = (1.0 - dn * dn).sqrt();
    let mut m = [[0.0; 4]; 4];
    m[0][0] = tu;
    for i in 0..3 {
        m[0][i + 1] = tu * d[i];
        m[i + 1][0] = tu * d[i];
        for j in 0..3 {
            let outer = if dn > 0.0 {
                d[i] * d[j] / (dn * dn)
            } else {
                0.0
            };
            let delta = if i == j { 1.0 } else { 0.0 };
            m[i + 1][j + 1] = tu * (root * delta + (1.0 - root) * outer);
        }
    }
    Ok(MuellerMatrix(m))
}

/// Ordered product `Ms[0] · Ms[1] · …`; the last element acts first.
pub fn compose(ms: &[MuellerMatrix]) -> Result<MuellerMatrix> {
    let (first, rest) = ms.split_first().ok_or(Error::EmptyComposition)?;
    Ok(rest.iter().fold(*first, |acc, m| acc.then_after(m)))
}

pub fn jones_identity() -> JonesMatrix {
    JonesMatrix(CMatrix2::identity())
}
