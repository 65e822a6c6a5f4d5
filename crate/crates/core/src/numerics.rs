//! Fixed-size dense complex matrices and the handful of spectral routines the
//! rest of the crate needs.
//!
//! Everything here is at most 4×4 (16×16 only shows up in tests), so the
//! routines favour simple, accurate Jacobi and QR sweeps over blocked code.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance on matrix entries used when callers have no better value.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 64;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Square complex matrix with `N` rows, indexed `[row][col]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMatrix<const N: usize>(pub [[C64; N]; N]);

pub type CMatrix2 = CMatrix<2>;
pub type CMatrix4 = CMatrix<4>;

impl<const N: usize> Default for CMatrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CMatrix<N> {
    pub fn zeros() -> Self {
        Self([[C64::zero(); N]; N])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { C64::one() } else { C64::zero() })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| re(rows[i][j]))
    }

    pub fn diag(d: [f64; N]) -> Self {
        Self::from_fn(|i, j| if i == j { re(d[i]) } else { C64::zero() })
    }

    /// `u v†`
    pub fn outer(u: &[C64; N], v: &[C64; N]) -> Self {
        Self::from_fn(|i, j| u[i] * v[j].conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn column(&self, j: usize) -> [C64; N] {
        core::array::from_fn(|i| self.0[i][j])
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        core::array::from_fn(|i| (0..N).map(|k| self.0[i][k] * v[k]).sum())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |A - A†|`
    pub fn hermitian_asymmetry(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    /// Distance to `other` in the max-entry norm.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }
}

impl<const N: usize> Index<(usize, usize)> for CMatrix<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMatrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> AddAssign for CMatrix<N> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const N: usize> Sub for CMatrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Neg for CMatrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl<const N: usize> Mul for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

/// Kronecker product of two 2×2 matrices, in the (00, 01, 10, 11) product order.
pub fn kron(a: &CMatrix2, b: &CMatrix2) -> CMatrix4 {
    CMatrix4::from_fn(|i, j| a.0[i / 2][j / 2] * b.0[i % 2][j % 2])
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianEig<const N: usize> {
    /// Sorted descending.
    pub values: [f64; N],
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix<N>,
}

impl<const N: usize> HermitianEig<N> {
    /// `V W V†`
    pub fn reconstruct(&self) -> CMatrix<N> {
        let v = self.vectors;
        let w = CMatrix::diag(self.values);
        v * w * v.adjoint()
    }

    pub fn min_value(&self) -> f64 {
        self.values[N - 1]
    }
}

/// Unitary `G` that diagonalizes the 2×2 Hermitian block `[[a, b], [b̄, d]]`
/// via `G† B G`. `b` must be nonzero.
fn jacobi_rotation(a: f64, b: C64, d: f64) -> [[C64; 2]; 2] {
    let mag = b.norm();
    let phase = b / mag;
    let theta = (d - a) / (2.0 * mag);
    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
    let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    [[re(cs), re(sn)], [-phase.conj() * sn, phase.conj() * cs]]
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eig<const N: usize>(a: &CMatrix<N>, tol: f64) -> Result<HermitianEig<N>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let asymmetry = a.hermitian_asymmetry();
    if asymmetry > tol {
        return Err(Error::NotHermitian { asymmetry });
    }
    let mut m = (*a + a.adjoint()).scale_real(0.5);
    for i in 0..N {
        m.0[i][i] = re(m.0[i][i].re);
    }
    let mut v = CMatrix::<N>::identity();
    let scale = m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.0[i][j].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale || off == 0.0 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let b = m.0[p][q];
                if b.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let g = jacobi_rotation(m.0[p][p].re, b, m.0[q][q].re);
                // m <- m G
                for k in 0..N {
                    let (xp, xq) = (m.0[k][p], m.0[k][q]);
                    m.0[k][p] = xp * g[0][0] + xq * g[1][0];
                    m.0[k][q] = xp * g[0][1] + xq * g[1][1];
                }
                // m <- G† m
                for k in 0..N {
                    let (xp, xq) = (m.0[p][k], m.0[q][k]);
                    m.0[p][k] = g[0][0].conj() * xp + g[1][0].conj() * xq;
                    m.0[q][k] = g[0][1].conj() * xp + g[1][1].conj() * xq;
                }
                m.0[p][q] = C64::zero();
                m.0[q][p] = C64::zero();
                m.0[p][p] = re(m.0[p][p].re);
                m.0[q][q] = re(m.0[q][q].re);
                for k in 0..N {
                    let (xp, xq) = (v.0[k][p], v.0[k][q]);
                    v.0[k][p] = xp * g[0][0] + xq * g[1][0];
                    v.0[k][q] = xp * g[0][1] + xq * g[1][1];
                }
            }
        }
    }

    let mut order: [usize; N] = core::array::from_fn(|i| i);
    order.sort_by(|&i, &j| m.0[j][j].re.total_cmp(&m.0[i][i].re));
    let values = core::array::from_fn(|k| m.0[order[k]][order[k]].re);
    let vectors = CMatrix::from_fn(|i, k| v.0[i][order[k]]);
    Ok(HermitianEig { values, vectors })
}

/// Eigenvalues at or below this are indistinguishable from zero.
pub(crate) fn roundoff_floor<const N: usize>(values: &[f64; N]) -> f64 {
    let top = values.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    4.0 * N as f64 * f64::EPSILON * top
}

/// Square root of a positive semidefinite Hermitian matrix. Eigenvalues in
/// `[-tol, 0)` are treated as zero.
pub fn psd_sqrt<const N: usize>(a: &CMatrix<N>, tol: f64) -> Result<CMatrix<N>> {
    let eig = hermitian_eig(a, tol)?;
    let min = eig.min_value();
    if min < -tol {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    let floor = roundoff_floor(&eig.values);
    let roots = eig.values.map(|w| if w > floor { w.sqrt() } else { 0.0 });
    let v = eig.vectors;
    Ok(v * CMatrix::diag(roots) * v.adjoint())
}

/// Singular values (descending) by one-sided Jacobi orthogonalization of the
/// columns. Small singular values come out with absolute accuracy near
/// `eps * ‖A‖`, unlike square roots of Gram-matrix eigenvalues.
pub fn singular_values<const N: usize>(a: &CMatrix<N>) -> [f64; N] {
    let mut u = *a;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..N {
            for q in (p + 1)..N {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::zero();
                for k in 0..N {
                    alpha += u.0[k][p].norm_sqr();
                    beta += u.0[k][q].norm_sqr();
                    gamma += u.0[k][p].conj() * u.0[k][q];
                }
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt()
                    || gamma.norm() <= f64::MIN_POSITIVE
                {
                    continue;
                }
                rotated = true;
                let g = jacobi_rotation(alpha, gamma, beta);
                for k in 0..N {
                    let (xp, xq) = (u.0[k][p], u.0[k][q]);
                    u.0[k][p] = xp * g[0][0] + xq * g[1][0];
                    u.0[k][q] = xp * g[0][1] + xq * g[1][1];
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: [f64; N] =
        core::array::from_fn(|j| (0..N).map(|k| u.0[k][j].norm_sqr()).sum::<f64>().sqrt());
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Sum of singular values.
pub fn nuclear_norm<const N: usize>(a: &CMatrix<N>) -> f64 {
    singular_values(a).iter().sum()
}

fn givens(a: C64, b: C64) -> (f64, C64) {
    let (na, nb) = (a.norm(), b.norm());
    let r = na.hypot(nb);
    if r == 0.0 {
        (1.0, C64::zero())
    } else if na == 0.0 {
        (0.0, b.conj() / nb)
    } else {
        (na / r, (a / na) * b.conj() / r)
    }
}

fn hessenberg<const N: usize>(h: &mut [[C64; N]; N]) {
    for k in 0..N.saturating_sub(2) {
        let m = N - k - 1;
        let mut v = [C64::zero(); N];
        let mut alpha = 0.0;
        for i in 0..m {
            v[i] = h[k + 1 + i][k];
            alpha += v[i].norm_sqr();
        }
        let alpha = alpha.sqrt();
        if alpha <= f64::MIN_POSITIVE {
            continue;
        }
        let phase = if v[0].norm() > 0.0 {
            v[0] / v[0].norm()
        } else {
            C64::one()
        };
        v[0] += phase * alpha;
        let vv: f64 = v[..m].iter().map(|z| z.norm_sqr()).sum();
        if vv <= f64::MIN_POSITIVE {
            continue;
        }
        for j in 0..N {
            let w: C64 = (0..m).map(|i| v[i].conj() * h[k + 1 + i][j]).sum();
            let w = w * (2.0 / vv);
            for i in 0..m {
                h[k + 1 + i][j] -= v[i] * w;
            }
        }
        for row in h.iter_mut() {
            let w: C64 = (0..m).map(|j| row[k + 1 + j] * v[j]).sum();
            let w = w * (2.0 / vv);
            for j in 0..m {
                row[k + 1 + j] -= w * v[j].conj();
            }
        }
        for i in (k + 2)..N {
            h[i][k] = C64::zero();
        }
    }
}

fn wilkinson_shift(a: C64, b: C64, cc: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * cc;
    let root = disc.sqrt();
    let (l1, l2) = (half_tr + root, half_tr - root);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a general complex matrix (unordered), by Hessenberg
/// reduction and shifted QR with deflation.
pub fn general_eigenvalues<const N: usize>(a: &CMatrix<N>) -> Result<[C64; N]> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut h = a.0;
    hessenberg(&mut h);
    let mut eig = [C64::zero(); N];
    let mut hi = N;
    let mut iter = 0usize;
    while hi > 0 {
        if hi == 1 {
            eig[0] = h[0][0];
            break;
        }
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            let sub = h[lo][lo - 1].norm();
            if sub <= f64::EPSILON * s || sub <= f64::MIN_POSITIVE {
                h[lo][lo - 1] = C64::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eig[hi - 1] = h[hi - 1][hi - 1];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 60 * N {
            return Err(Error::NoConvergence);
        }
        let mu = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[hi - 1][hi - 1] + re(0.75 * h[hi - 1][hi - 2].norm())
        } else {
            wilkinson_shift(
                h[hi - 2][hi - 2],
                h[hi - 2][hi - 1],
                h[hi - 1][hi - 2],
                h[hi - 1][hi - 1],
            )
        };

        for i in lo..hi {
            h[i][i] -= mu;
        }
        let mut rots = [(1.0, C64::zero()); N];
        for k in lo..(hi - 1) {
            let (cs, sn) = givens(h[k][k], h[k + 1][k]);
            rots[k] = (cs, sn);
            for j in k..hi {
                let (x, y) = (h[k][j], h[k + 1][j]);
                h[k][j] = x * cs + sn * y;
                h[k + 1][j] = -sn.conj() * x + y * cs;
            }
        }
        for k in lo..(hi - 1) {
            let (cs, sn) = rots[k];
            for row in h.iter_mut().take((k + 2).min(hi)).skip(lo) {
                let (x, y) = (row[k], row[k + 1]);
                row[k] = x * cs + y * sn.conj();
                row[k + 1] = -x * sn + y * cs;
            }
        }
        for i in lo..hi {
            h[i][i] += mu;
        }
    }
    Ok(eig)
}

/// Dense real linear algebra for the 16-dimensional Hermitian coordinate
/// space used by tomography.
pub(crate) mod real {

    /// Solve `a x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` for (numerically) singular `a`.
    pub fn solve<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
        let scale = a
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()));
        for col in 0..N {
            let piv = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[piv][col].abs() <= 1e-12 * scale {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for r in (col + 1)..N {
                let f = a[r][col] / a[col][col];
                for k in col..N {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = [0.0; N];
        for i in (0..N).rev() {
            let s: f64 = ((i + 1)..N).map(|k| a[i][k] * x[k]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        Some(x)
    }

    /// Numerical rank of a tall `rows × N` matrix given as a row slice.
    pub fn rank<const N: usize>(rows: &[[f64; N]], rel_tol: f64) -> usize {
        let mut a: alloc::vec::Vec<[f64; N]> = rows.to_vec();
        let scale = a
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()));
        let mut rank = 0;
        for col in 0..N {
            if rank == a.len() {
                break;
            }
            let Some(piv) =
                (rank..a.len()).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            else {
                break;
            };
            if a[piv][col].abs() <= rel_tol * scale {
                continue;
            }
            a.swap(rank, piv);
            for r in (rank + 1)..a.len() {
                let f = a[r][col] / a[rank][col];
                for k in col..N {
                    a[r][k] -= f * a[rank][k];
                }
            }
            rank += 1;
        }
        rank
    }
}
