use std::ops::{Index, IndexMut};

use super::{c, CMat, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by the eigensolver entry points.
const HERM_TOL: f64 = 1e-9;
/// Sweeps stop once the off-diagonal Frobenius norm drops below this fraction
/// of the full norm.
const OFF_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Small dense square matrix used internally where the size is only known at
/// run time (rank-dependent blocks, the real embedding used by Takagi).
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Dense {
    pub n: usize,
    data: Vec<C64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut d = Self::zeros(n);
        for i in 0..n {
            d[(i, i)] = ONE;
        }
        d
    }

    fn frob_sqr(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }

    fn off_sqr(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s
    }
}

impl Index<(usize, usize)> for Dense {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Dense {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// Pivot ordering inside one Jacobi sweep. Both orders converge to the same
/// decomposition up to the usual eigenvector freedoms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOrder {
    #[default]
    RowCyclic,
    ColumnCyclic,
}

/// Cyclic complex Jacobi. Returns eigenvalues in descending order and the
/// matching eigenvectors as columns of a unitary matrix. The input must be
/// Hermitian; only its Hermitian part is used.
pub(crate) fn jacobi_dense(m: &Dense, order: SweepOrder) -> (Vec<f64>, Dense) {
    let n = m.n;
    let mut a = m.clone();
    for i in 0..n {
        for j in i..n {
            let h = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[(i, j)] = h;
            a[(j, i)] = h.conj();
        }
        a[(i, i)] = c(a[(i, i)].re, 0.0);
    }
    let mut v = Dense::identity(n);
    let total = a.frob_sqr();

    let pivots: Vec<(usize, usize)> = match order {
        SweepOrder::RowCyclic => (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .collect(),
        SweepOrder::ColumnCyclic => (0..n).flat_map(|q| (0..q).map(move |p| (p, q))).collect(),
    };

    for _ in 0..MAX_SWEEPS {
        let off = a.off_sqr();
        if off <= OFF_TOL * OFF_TOL * total || off == 0.0 {
            break;
        }
        for &(p, q) in &pivots {
            let apq = a[(p, q)];
            let r = apq.norm();
            if r == 0.0 {
                continue;
            }
            // Phase turns a_pq real, then a real Givens rotation zeroes it.
            let phase = apq / r;
            let app = a[(p, p)].re;
            let aqq = a[(q, q)].re;
            let tau = (aqq - app) / (2.0 * r);
            let t = if tau >= 0.0 {
                1.0 / (tau + (1.0 + tau * tau).sqrt())
            } else {
                -1.0 / (-tau + (1.0 + tau * tau).sqrt())
            };
            let cs = 1.0 / (1.0 + t * t).sqrt();
            let sn = t * cs;
            // J = identity except
            //   J_pp = c, J_pq = s * phase, J_qp = -s * conj(phase), J_qq = c
            // and A <- J^dagger A J, V <- V J.
            let jpp = c(cs, 0.0);
            let jpq = phase * sn;
            let jqp = -phase.conj() * sn;
            let jqq = c(cs, 0.0);
            for k in 0..n {
                let akp = a[(k, p)];
                let akq = a[(k, q)];
                a[(k, p)] = akp * jpp + akq * jqp;
                a[(k, q)] = akp * jpq + akq * jqq;
            }
            for k in 0..n {
                let apk = a[(p, k)];
                let aqk = a[(q, k)];
                a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
            }
            a[(p, q)] = ZERO;
            a[(q, p)] = ZERO;
            a[(p, p)] = c(a[(p, p)].re, 0.0);
            a[(q, q)] = c(a[(q, q)].re, 0.0);
            for k in 0..n {
                let vkp = v[(k, p)];
                let vkq = v[(k, q)];
                v[(k, p)] = vkp * jpp + vkq * jqp;
                v[(k, q)] = vkp * jpq + vkq * jqq;
            }
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = idx.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = Dense::zeros(n);
    for (col, &i) in idx.iter().enumerate() {
        for k in 0..n {
            vectors[(k, col)] = v[(k, i)];
        }
    }
    (values, vectors)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermEig<const N: usize> {
    /// Eigenvalues, descending.
    pub values: [f64; N],
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: CMat<N>,
}

impl<const N: usize> HermEig<N> {
    pub fn reconstruct(&self) -> CMat<N> {
        self.map_values(|x| x)
    }

    /// `V f(Lambda) V^dagger`
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CMat<N> {
        let v = &self.vectors;
        let mut out = CMat::zeros();
        for (k, &lam) in self.values.iter().enumerate() {
            let fl = f(lam);
            for i in 0..N {
                for j in 0..N {
                    out.0[i][j] += v.0[i][k] * v.0[j][k].conj() * fl;
                }
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values[N - 1]
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }
}

pub fn herm_eig<const N: usize>(m: &CMat<N>) -> Result<HermEig<N>> {
    herm_eig_with(m, SweepOrder::default())
}

pub fn herm_eig_with<const N: usize>(m: &CMat<N>, order: SweepOrder) -> Result<HermEig<N>> {
    let defect = m.hermiticity_defect();
    if !m.is_finite() || defect > HERM_TOL * m.frob_norm().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let (vals, vecs) = jacobi_dense(&m.to_dense(), order);
    Ok(HermEig {
        values: std::array::from_fn(|i| vals[i]),
        vectors: CMat::from_dense(&vecs),
    })
}

/// Square root of a positive semidefinite matrix. Eigenvalues in
/// `[-1e-12, 0)` are clamped to zero; anything more negative than `-1e-9`
/// is rejected.
pub fn psd_sqrt<const N: usize>(m: &CMat<N>) -> Result<CMat<N>> {
    let e = herm_eig(m)?;
    let scale = e.max().abs().max(1.0);
    if e.min() < -1e-9 * scale {
        return Err(Error::NegativeEigenvalue(e.min()));
    }
    Ok(e.map_values(|x| x.max(0.0).sqrt()))
}
