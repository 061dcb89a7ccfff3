#![allow(dead_code)]

use bellfilter::matcore::{c, CMat, CMat4, CVec4, C64};
use nalgebra::{DMatrix, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_na(m: &CMat4) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| m.0[i][j])
}

pub fn to_dyn<const N: usize>(m: &CMat<N>) -> DMatrix<C64> {
    DMatrix::from_fn(N, N, |i, j| m.0[i][j])
}

pub fn from_na(m: &Matrix4<C64>) -> CMat4 {
    CMat(std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])))
}

pub fn random_vec<R: Rng>(rng: &mut R) -> CVec4 {
    bellfilter::matcore::CVec(std::array::from_fn(|_| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }))
}

pub fn random_mat<R: Rng>(rng: &mut R) -> CMat4 {
    CMat(std::array::from_fn(|_| {
        std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }))
}

/// Singular values, descending, from nalgebra's SVD.
pub fn singular_values<const N: usize>(m: &CMat<N>) -> Vec<f64> {
    let mut s: Vec<f64> = to_dyn(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigenvalues of a Hermitian matrix, descending, from nalgebra.
pub fn hermitian_eigenvalues<const N: usize>(m: &CMat<N>) -> Vec<f64> {
    let mut s: Vec<f64> = to_dyn(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `R(rho)` spectrum computed entirely with nalgebra:
/// eigenvalues of `sqrt(sqrt(rho) rho~ sqrt(rho))`.
pub fn r_spectrum_oracle(rho: &CMat4) -> Vec<f64> {
    let y = to_na(&bellfilter::matcore::spin_flip());
    let r = to_na(rho);
    let rt = y * r.conjugate() * y;
    let e = r.symmetric_eigen();
    let sq = e.eigenvectors
        * Matrix4::from_diagonal(&e.eigenvalues.map(|x| c(x.max(0.0).sqrt(), 0.0)))
        * e.eigenvectors.adjoint();
    let inner = sq * rt * sq;
    let inner = (inner + inner.adjoint()) * c(0.5, 0.0);
    let mut l: Vec<f64> = inner
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    l
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
