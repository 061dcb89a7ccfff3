//! Fixed-size complex linear algebra for one and two qubits.
//!
//! Everything here works in the product basis `|00>, |01>, |10>, |11>` with
//! qubit A as the most significant index. The kernel is deliberately small:
//! 2x2 and 4x4 matrices, 4-component state vectors, a cyclic Jacobi
//! Hermitian eigensolver and a Takagi factorization built on top of it.

mod eig;
mod takagi;

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;

pub use eig::{herm_eig, herm_eig_with, psd_sqrt, HermEig, SweepOrder};
pub use takagi::{takagi, Takagi};

pub(crate) use eig::Dense;
pub(crate) use takagi::takagi_dense;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Column vector with `N` complex amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVec<const N: usize>(pub [C64; N]);

pub type CVec2 = CVec<2>;
pub type CVec4 = CVec<4>;

impl<const N: usize> Default for CVec<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CVec<N> {
    pub fn zeros() -> Self {
        CVec([ZERO; N])
    }

    pub fn basis(k: usize) -> Self {
        let mut v = Self::zeros();
        v.0[k] = ONE;
        v
    }

    pub fn from_real(re: [f64; N]) -> Self {
        CVec(re.map(|x| c(x, 0.0)))
    }

    /// Inner product `<self|other>`, antilinear in `self`.
    pub fn dot(&self, other: &Self) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> Self {
        CVec(self.0.map(|a| a.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        CVec(self.0.map(|a| a * s))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        CVec(self.0.map(|a| a * s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// `|self><other|`
    pub fn outer(&self, other: &Self) -> CMat<N> {
        let mut m = CMat::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[i] * other.0[j].conj();
            }
        }
        m
    }

    pub fn projector(&self) -> CMat<N> {
        self.outer(self)
    }
}

impl<const N: usize> Index<usize> for CVec<N> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for CVec<N> {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl<const N: usize> Add for CVec<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        CVec(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl<const N: usize> Sub for CVec<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        CVec(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl<const N: usize> Neg for CVec<N> {
    type Output = Self;
    fn neg(self) -> Self {
        CVec(self.0.map(|a| -a))
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        Self::from_diag(&[1.0; N])
    }

    pub fn from_diag(d: &[f64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, &x) in d.iter().enumerate() {
            m.0[i][i] = c(x, 0.0);
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        CMat(rows.map(|r| r.map(|x| c(x, 0.0))))
    }

    /// Builds a matrix from its columns.
    pub fn from_cols(cols: &[CVec<N>; N]) -> Self {
        CMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| cols[j].0[i])
        }))
    }

    pub fn col(&self, j: usize) -> CVec<N> {
        CVec(std::array::from_fn(|i| self.0[i][j]))
    }

    pub fn adjoint(&self) -> Self {
        CMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i].conj())
        }))
    }

    pub fn transpose(&self) -> Self {
        CMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i])
        }))
    }

    pub fn conj(&self) -> Self {
        CMat(self.0.map(|r| r.map(|a| a.conj())))
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        CMat(self.0.map(|r| r.map(|a| a * s)))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        CMat(self.0.map(|r| r.map(|a| a * s)))
    }

    pub fn frob_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|a| a.norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius distance to another matrix.
    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).frob_norm()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.dist(&self.adjoint())
    }

    pub fn symmetry_defect(&self) -> f64 {
        self.dist(&self.transpose())
    }

    /// `(M + M^dagger) / 2`
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// `<u|M|v>`
    pub fn sandwich(&self, u: &CVec<N>, v: &CVec<N>) -> C64 {
        u.dot(&(*self * *v))
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        let mut a = self.0;
        let mut det = ONE;
        for k in 0..N {
            let p = (k..N)
                .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
                .unwrap_or(k);
            if a[p][k].norm() == 0.0 {
                return ZERO;
            }
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k];
            for i in k + 1..N {
                let f = a[i][k] / a[k][k];
                let pivot = a[k];
                for (x, t) in a[i].iter_mut().zip(pivot).skip(k) {
                    *x -= f * t;
                }
            }
        }
        det
    }

    pub(crate) fn to_dense(self) -> Dense {
        let mut d = Dense::zeros(N);
        for i in 0..N {
            for j in 0..N {
                d[(i, j)] = self.0[i][j];
            }
        }
        d
    }

    pub(crate) fn from_dense(d: &Dense) -> Self {
        debug_assert_eq!(d.n, N);
        CMat(std::array::from_fn(|i| std::array::from_fn(|j| d[(i, j)])))
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        CMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] + rhs.0[i][j])
        }))
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        CMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] - rhs.0[i][j])
        }))
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        CMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
        }))
    }
}

impl<const N: usize> Mul<CVec<N>> for CMat<N> {
    type Output = CVec<N>;
    fn mul(self, v: CVec<N>) -> CVec<N> {
        CVec(std::array::from_fn(|i| {
            (0..N).map(|k| self.0[i][k] * v.0[k]).sum()
        }))
    }
}

/// Pauli matrices `[sigma_x, sigma_y, sigma_z]`, with `sigma_y = [[0, -i], [i, 0]]`.
pub fn pauli() -> [CMat2; 3] {
    [
        CMat([[ZERO, ONE], [ONE, ZERO]]),
        CMat([[ZERO, -I], [I, ZERO]]),
        CMat([[ONE, ZERO], [ZERO, -ONE]]),
    ]
}

/// `sigma_y (x) sigma_y`, the spin-flip operator on two qubits.
pub fn spin_flip() -> CMat4 {
    let [_, sy, _] = pauli();
    kron(&sy, &sy)
}

pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut m = CMat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

pub fn kron_vec(a: &CVec2, b: &CVec2) -> CVec4 {
    CVec(std::array::from_fn(|i| a.0[i / 2] * b.0[i % 2]))
}

pub fn det2(m: &CMat2) -> C64 {
    m.0[0][0] * m.0[1][1] - m.0[0][1] * m.0[1][0]
}

/// Which qubit is traced out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace over `side`, returning the reduced operator on the other qubit.
pub fn partial_trace(m: &CMat4, side: Subsystem) -> CMat2 {
    let mut r = CMat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            r.0[i][j] = match side {
                Subsystem::A => m.0[i][j] + m.0[2 + i][2 + j],
                Subsystem::B => m.0[2 * i][2 * j] + m.0[2 * i + 1][2 * j + 1],
            };
        }
    }
    r
}

/// `|v~> = (sigma_y (x) sigma_y) |v*>`
pub fn tilde_state(v: &CVec4) -> CVec4 {
    spin_flip() * v.conj()
}

/// `M~ = (sigma_y (x) sigma_y) M* (sigma_y (x) sigma_y)`
pub fn tilde_op(m: &CMat4) -> CMat4 {
    let y = spin_flip();
    y * m.conj() * y
}

/// `<v|v~>`, the tilde inner product of a state with itself.
pub fn tilde_inner(u: &CVec4, v: &CVec4) -> C64 {
    u.dot(&tilde_state(v))
}

/// Concurrence of a (possibly subnormalized) pure state, `|<v|v~>| / <v|v>`.
pub fn vec_concurrence(v: &CVec4) -> Result<f64> {
    let n = v.norm_sqr();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok((tilde_inner(v, v).norm() / n).min(1.0))
}

/// Bloch vector `(tr(M sx), tr(M sy), tr(M sz))` of a 2x2 Hermitian matrix.
pub fn bloch(m: &CMat2) -> [f64; 3] {
    pauli().map(|s| (*m * s).trace().re)
}
