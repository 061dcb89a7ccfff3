use super::eig::{jacobi_dense, Dense, SweepOrder};
use super::{c, CMat, C64, ZERO};
use crate::error::{Error, Result};

const SYM_TOL: f64 = 1e-9;
/// Takagi values below this fraction of the largest one are treated as zero.
const ZERO_CUTOFF: f64 = 1e-13;

/// Takagi factorization `U S U^T = diag(d)` of a complex symmetric matrix,
/// with `U` unitary and `d` real, nonnegative and descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Takagi<const N: usize> {
    pub u: CMat<N>,
    pub d: [f64; N],
}

pub fn takagi<const N: usize>(s: &CMat<N>) -> Result<Takagi<N>> {
    let (u, d) = takagi_dense(&s.to_dense(), SweepOrder::default())?;
    Ok(Takagi {
        u: CMat::from_dense(&u),
        d: std::array::from_fn(|i| d[i]),
    })
}

/// Works on the real symmetric embedding
///
/// ```text
/// M = [[Re S,  Im S],
///      [Im S, -Re S]]
/// ```
///
/// whose eigenpairs `(sigma, (x; y))` with `sigma > 0` give Takagi vectors
/// `v = x + i y` satisfying `S conj(v) = sigma v`. The kernel of `S` is filled
/// in by orthogonal completion, so zero and repeated Takagi values need no
/// special handling.
pub(crate) fn takagi_dense(s: &Dense, order: SweepOrder) -> Result<(Dense, Vec<f64>)> {
    let n = s.n;
    let mut defect = 0.0f64;
    let mut norm = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            defect += (s[(i, j)] - s[(j, i)]).norm_sqr();
            norm += s[(i, j)].norm_sqr();
        }
    }
    let defect = defect.sqrt();
    if defect > SYM_TOL * norm.sqrt().max(1.0) {
        return Err(Error::NotSymmetric(defect));
    }

    let mut m = Dense::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = (s[(i, j)] + s[(j, i)]) * 0.5;
            m[(i, j)] = c(z.re, 0.0);
            m[(i, n + j)] = c(z.im, 0.0);
            m[(n + i, j)] = c(z.im, 0.0);
            m[(n + i, n + j)] = c(-z.re, 0.0);
        }
    }
    let (vals, vecs) = jacobi_dense(&m, order);
    let top = vals[0].max(0.0);

    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for k in 0..n {
        if vals[k] <= ZERO_CUTOFF * top || top == 0.0 {
            break;
        }
        cols.push(
            (0..n)
                .map(|i| c(vecs[(i, k)].re, vecs[(n + i, k)].re))
                .collect(),
        );
        d.push(vals[k]);
    }

    // Complete with an orthonormal basis of the remaining space.
    while cols.len() < n {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for e in 0..n {
            let mut r: Vec<C64> = (0..n)
                .map(|i| if i == e { c(1.0, 0.0) } else { ZERO })
                .collect();
            for _ in 0..2 {
                for col in &cols {
                    let proj: C64 = col.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
                    for (ri, ci) in r.iter_mut().zip(col) {
                        *ri -= proj * ci;
                    }
                }
            }
            let nr = r.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(b, _)| nr > *b) {
                best = Some((nr, r));
            }
        }
        let (nr, r) = best.expect("n > 0");
        cols.push(r.into_iter().map(|a| a / nr).collect());
        d.push(0.0);
    }

    // U = V^dagger, with the Takagi vectors as the columns of V.
    let mut u = Dense::zeros(n);
    for (k, col) in cols.iter().enumerate() {
        for i in 0..n {
            u[(k, i)] = col[i].conj();
        }
    }
    Ok((u, d))
}
