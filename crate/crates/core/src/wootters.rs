//! Density matrix validation, the `R(rho)` spectrum, concurrence, and the
//! tilde-orthogonal decomposition `rho = sum_i |x_i><x_i|` with
//! `<x_i|x~_j> = lambda_i delta_ij`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    herm_eig_with, psd_sqrt, takagi_dense, tilde_inner, tilde_op, CMat4, CVec4, Dense, HermEig,
};
use crate::tolerance::Tolerances;

/// A validated two-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    rho: CMat4,
    rank: usize,
    hermiticity_defect: f64,
    min_eigenvalue: f64,
    eig: HermEig<4>,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &CMat4 {
        &self.rho
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn eigen(&self) -> &HermEig<4> {
        &self.eig
    }

    /// `rho~ = (sy (x) sy) rho* (sy (x) sy)`
    pub fn tilde(&self) -> CMat4 {
        tilde_op(&self.rho)
    }
}

/// Validates `matrix` as a density matrix. A trace within tolerance of one is
/// renormalized exactly; the stored matrix is the Hermitian part of the input.
pub fn load_density(matrix: &CMat4, tol: &Tolerances) -> Result<DensityMatrix> {
    if !matrix.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = matrix.hermiticity_defect();
    if defect > tol.hermiticity {
        return Err(Error::NotHermitian(defect));
    }
    let tr = matrix.trace().re;
    if (tr - 1.0).abs() > tol.trace {
        return Err(Error::TraceDefect(tr - 1.0));
    }
    let rho = matrix.hermitian_part().scale_re(1.0 / tr);
    let eig = herm_eig_with(&rho, tol.sweep)?;
    let min_eigenvalue = eig.min();
    if min_eigenvalue < -tol.negativity {
        return Err(Error::NegativeEigenvalue(min_eigenvalue));
    }
    let cutoff = tol.rank_cutoff * eig.max();
    let rank = eig.values.iter().filter(|&&x| x > cutoff).count();
    Ok(DensityMatrix {
        rho,
        rank,
        hermiticity_defect: defect,
        min_eigenvalue,
        eig,
    })
}

/// `R(rho) = sqrt(sqrt(rho) rho~ sqrt(rho))`. Eigenvalues of `rho` below the
/// rank cutoff are projected out before taking the root.
pub fn r_matrix(rho: &DensityMatrix, tol: &Tolerances) -> Result<CMat4> {
    let cutoff = tol.rank_cutoff * rho.eig.max();
    let sqrt_rho = rho
        .eig
        .map_values(|x| if x > cutoff { x.sqrt() } else { 0.0 });
    let inner = (sqrt_rho * rho.tilde() * sqrt_rho).hermitian_part();
    psd_sqrt(&inner)
}

/// The tilde-orthogonal decomposition of a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct WoottersSet {
    /// The `n = rank` subnormalized states, ordered by decreasing `lambda`.
    pub x: Vec<CVec4>,
    /// `lambda_1 >= ... >= lambda_4 >= 0`, zero-padded beyond the rank.
    pub lambdas: [f64; 4],
    /// `tr R(rho) = sum_i lambda_i`.
    pub tr_r: f64,
    pub concurrence: f64,
}

impl WoottersSet {
    pub fn rank(&self) -> usize {
        self.x.len()
    }

    /// Smallest tilde inner product among the `n` states.
    pub fn lambda_n(&self) -> f64 {
        self.lambdas[self.rank() - 1]
    }

    pub fn reconstruct(&self) -> CMat4 {
        self.x
            .iter()
            .fold(CMat4::zeros(), |acc, v| acc + v.projector())
    }

    /// Largest `|<x_i|x~_j> - lambda_i delta_ij|` over the set.
    pub fn tilde_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, xi) in self.x.iter().enumerate() {
            for (j, xj) in self.x.iter().enumerate() {
                let target = if i == j { self.lambdas[i] } else { 0.0 };
                worst = worst.max((tilde_inner(xi, xj) - target).norm());
            }
        }
        worst
    }
}

/// `C = max(0, l1 - l2 - l3 - l4)`
pub fn concurrence_from_lambdas(l: &[f64; 4]) -> f64 {
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

pub fn concurrence(rho: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    Ok(wootters_decomposition(rho, tol)?.concurrence)
}

/// Builds `{x_i}` by Takagi-factorizing the symmetric matrix
/// `tau_ij = <v_i|v~_j>` of the subnormalized eigenvectors `v_i` of `rho`.
/// The Takagi values are the `lambda_i`, i.e. the eigenvalues of `R(rho)`.
pub fn wootters_decomposition(rho: &DensityMatrix, tol: &Tolerances) -> Result<WoottersSet> {
    let n = rho.rank;
    let e = &rho.eig;
    let v: Vec<CVec4> = (0..n)
        .map(|k| e.vectors.col(k).scale_re(e.values[k].max(0.0).sqrt()))
        .collect();

    let mut tau = Dense::zeros(n);
    for i in 0..n {
        for j in 0..n {
            tau[(i, j)] = tilde_inner(&v[i], &v[j]);
        }
    }
    let (u, d) = takagi_dense(&tau, tol.sweep)?;

    let x: Vec<CVec4> = (0..n)
        .map(|i| (0..n).fold(CVec4::zeros(), |acc, k| acc + v[k].scale(u[(i, k)].conj())))
        .collect();
    let mut lambdas = [0.0; 4];
    lambdas[..n].copy_from_slice(&d);
    Ok(WoottersSet {
        x,
        tr_r: lambdas.iter().sum(),
        concurrence: concurrence_from_lambdas(&lambdas),
        lambdas,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Regular,
    LambdaNZero,
    Separable,
}

pub fn detect_degenerate(ws: &WoottersSet, tol: &Tolerances) -> Classification {
    if ws.concurrence <= tol.separable {
        Classification::Separable
    } else if ws.lambda_n() <= tol.rank_cutoff * ws.lambdas[0] {
        Classification::LambdaNZero
    } else {
        Classification::Regular
    }
}
