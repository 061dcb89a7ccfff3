//! Applying a local filter and certifying the result as Bell diagonal.

use crate::error::{Error, Result};
use crate::filtercore::LocalFilter;
use crate::matcore::{partial_trace, CMat2, CVec4, Subsystem};
use crate::tolerance::Tolerances;
use crate::wootters::{load_density, wootters_decomposition, DensityMatrix, WoottersSet};

const MIN_PROBABILITY: f64 = 1e-12;

/// One term `p_i |E_i><E_i|` of the filtered state.
#[derive(Clone, Debug, PartialEq)]
pub struct BellComponent {
    pub p: f64,
    pub e: CVec4,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformResult {
    pub rho_prime: DensityMatrix,
    pub p_f: f64,
    /// Descending in `p`; ties keep the order of the input decomposition.
    pub components: Vec<BellComponent>,
    pub c_out: f64,
    /// Largest Frobenius distance of either marginal of `rho'` from `I/2`.
    pub marginal_defect: f64,
    pub tr_r_out: f64,
    pub wootters_out: WoottersSet,
}

/// `rho' = (f_A (x) f_B) rho (f_A (x) f_B) / P_f`, with the images
/// `E_i ~ (f_A (x) f_B) x_i` of the decomposition of `rho`.
pub fn apply_filter(
    rho: &DensityMatrix,
    lf: &LocalFilter,
    tol: &Tolerances,
) -> Result<TransformResult> {
    let k = lf.kraus();
    let p_f = (*rho.matrix() * lf.effect()).trace().re;
    if p_f.is_nan() || p_f <= MIN_PROBABILITY {
        return Err(Error::VanishingProbability(p_f));
    }
    let filtered = (k * *rho.matrix() * k).hermitian_part().scale_re(1.0 / p_f);
    let rho_prime = load_density(&filtered, tol)?;

    let ws_in = wootters_decomposition(rho, tol)?;
    let mut components: Vec<BellComponent> = ws_in
        .x
        .iter()
        .filter_map(|x| {
            let kx = k * *x;
            let w = kx.norm_sqr();
            (w > 0.0).then(|| BellComponent {
                p: w / p_f,
                e: kx.scale_re(1.0 / w.sqrt()),
            })
        })
        .collect();
    components.sort_by(|a, b| b.p.total_cmp(&a.p));

    let ws_out = wootters_decomposition(&rho_prime, tol)?;
    let marginal_defect = marginal_defect(&rho_prime);

    Ok(TransformResult {
        rho_prime,
        p_f,
        components,
        c_out: ws_out.concurrence,
        marginal_defect,
        tr_r_out: ws_out.tr_r,
        wootters_out: ws_out,
    })
}

/// Largest Frobenius distance of either marginal from `I/2`.
pub fn marginal_defect(rho: &DensityMatrix) -> f64 {
    let half = CMat2::identity().scale_re(0.5);
    [Subsystem::A, Subsystem::B]
        .iter()
        .map(|&s| partial_trace(rho.matrix(), s).dist(&half))
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellVerdict {
    pub bell_diagonal: bool,
    pub marginal_defect: f64,
    pub tr_r_defect: f64,
}

/// Bell diagonal iff both marginals are `I/2` and `tr R(rho') = 1`.
pub fn verify_bell_diagonal(tr: &TransformResult, tol: &Tolerances) -> BellVerdict {
    let tr_r_defect = (tr.tr_r_out - 1.0).abs();
    BellVerdict {
        bell_diagonal: tr.marginal_defect <= tol.bell && tr_r_defect <= tol.bell,
        marginal_defect: tr.marginal_defect,
        tr_r_defect,
    }
}

/// The same certificate for a state that did not come out of a filter.
pub fn certify_state(rho: &DensityMatrix, tol: &Tolerances) -> Result<BellVerdict> {
    let ws = wootters_decomposition(rho, tol)?;
    let marginal_defect = marginal_defect(rho);
    let tr_r_defect = (ws.tr_r - 1.0).abs();
    Ok(BellVerdict {
        bell_diagonal: marginal_defect <= tol.bell && tr_r_defect <= tol.bell,
        marginal_defect,
        tr_r_defect,
    })
}

/// `C(rho')`, checked against `C(rho) / tr R(rho)`.
pub fn extractable_concurrence(
    tr: &TransformResult,
    ws_in: &WoottersSet,
    tol: &Tolerances,
) -> Result<f64> {
    let expected = ws_in.concurrence / ws_in.tr_r;
    if (tr.c_out - expected).abs() > tol.bell {
        return Err(Error::Consistency(format!(
            "C(rho') = {} but C(rho)/tr R(rho) = {expected}",
            tr.c_out
        )));
    }
    Ok(tr.c_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell;
    use crate::matcore::CMat4;

    #[test]
    fn identity_filter_is_a_no_op() {
        let tol = Tolerances::default();
        let rho = load_density(&bell::werner(0.8), &tol).unwrap();
        let t = apply_filter(&rho, &LocalFilter::identity(), &tol).unwrap();
        assert!(t.rho_prime.matrix().dist(rho.matrix()) < 1e-14);
        assert!((t.p_f - 1.0).abs() < 1e-14);
        assert!(verify_bell_diagonal(&t, &tol).bell_diagonal);
        let ws = wootters_decomposition(&rho, &tol).unwrap();
        let c = extractable_concurrence(&t, &ws, &tol).unwrap();
        assert!((c - ws.concurrence).abs() < 1e-12);
    }

    #[test]
    fn product_state_is_not_bell_diagonal() {
        let tol = Tolerances::default();
        let mut m = CMat4::zeros();
        m.0[0][0] = crate::matcore::ONE;
        let rho = load_density(&m, &tol).unwrap();
        let t = apply_filter(&rho, &LocalFilter::identity(), &tol).unwrap();
        assert!(!verify_bell_diagonal(&t, &tol).bell_diagonal);
    }

    #[test]
    fn annihilating_filter_is_rejected() {
        let tol = Tolerances::default();
        let mut m = CMat4::zeros();
        m.0[0][0] = crate::matcore::ONE;
        let rho = load_density(&m, &tol).unwrap();
        let proj = CMat2::from_diag(&[0.0, 1.0]);
        let lf = LocalFilter::from_matrices(proj, CMat2::identity());
        assert!(matches!(
            apply_filter(&rho, &lf, &tol),
            Err(Error::VanishingProbability(_))
        ));
    }
}
