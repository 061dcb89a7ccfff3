//! Random states, local unitaries and family parameters for testing and
//! demos.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::family::FamilyParams;
use crate::matcore::{c, CMat, CMat2, CMat4, C64};
use crate::tolerance::Tolerances;
use crate::wootters::{detect_degenerate, load_density, wootters_decomposition, Classification};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// `G G^dagger / tr(G G^dagger)` for a 4 x `rank` complex Gaussian `G`.
pub fn random_state<R: Rng + ?Sized>(rank: usize, rng: &mut R) -> CMat4 {
    let mut g = CMat4::zeros();
    for row in g.0.iter_mut() {
        for x in row.iter_mut().take(rank) {
            *x = gaussian(rng);
        }
    }
    let m = g * g.adjoint();
    m.scale_re(1.0 / m.trace().re).hermitian_part()
}

/// Rejection-samples a random state of the given rank that the pipeline
/// classifies as regular (entangled with `lambda_n > 0`). States with
/// `lambda_n / lambda_1` below `min_ratio` are also rejected.
pub fn random_entangled<R: Rng + ?Sized>(
    rank: usize,
    min_ratio: f64,
    rng: &mut R,
    tol: &Tolerances,
) -> CMat4 {
    loop {
        let m = random_state(rank, rng);
        let Ok(rho) = load_density(&m, tol) else {
            continue;
        };
        if rho.rank() != rank {
            continue;
        }
        let Ok(ws) = wootters_decomposition(&rho, tol) else {
            continue;
        };
        if detect_degenerate(&ws, tol) == Classification::Regular
            && ws.lambda_n() >= min_ratio * ws.lambdas[0]
        {
            return m;
        }
    }
}

/// Haar-random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> CMat2 {
    let v: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, cc, d] = v.map(|x| x / n);
    CMat([[c(a, b), c(cc, d)], [c(-cc, d), c(a, -b)]])
}

/// `alpha ~ U(0.1, 0.99)`, `p` flat on the simplex, rejected until
/// `p1 >= p2`, `p3 >= p4` and the state is entangled.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R) -> FamilyParams {
    loop {
        let alpha = rng.gen_range(0.1..0.99);
        let e: [f64; 4] = std::array::from_fn(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln());
        let total: f64 = e.iter().sum();
        let p = e.map(|x| x / total);
        if p[0] < p[1] || p[2] < p[3] {
            continue;
        }
        let Ok(fp) = FamilyParams::new(alpha, p) else {
            continue;
        };
        if fp.concurrence_raw() > 1e-3 {
            return fp;
        }
    }
}
