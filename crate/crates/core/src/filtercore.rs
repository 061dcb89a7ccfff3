//! Associated operator, its product factorization, and the local filters.
//!
//! For a tilde-orthogonal set `{x_1..x_4}` completed from the decomposition
//! of `rho`, the operator
//!
//! ```text
//! F = sum_i |x~_i><x~_i| / <x_i|x~_i>
//! ```
//!
//! satisfies `F F~ = I`, `<x_i|F|x_j> = lambda_i delta_ij`, and factorizes as
//! `F = G_A (x) G_B`. Filters with `f_A^2 ~ G_A`, `f_B^2 ~ G_B` then map every
//! `x_i` onto a maximally entangled state, so the filtered state is Bell
//! diagonal.

use crate::error::{Error, Result};
use crate::matcore::{
    bloch, c, det2, herm_eig_with, kron, psd_sqrt, takagi_dense, tilde_inner, tilde_op,
    tilde_state, CMat, CMat2, CMat4, CVec, CVec4, Dense, HermEig, C64, I, ONE,
};
use crate::tolerance::Tolerances;
use crate::wootters::{
    detect_degenerate, wootters_decomposition, Classification, DensityMatrix, WoottersSet,
};

/// How to pick the states added to a rank-deficient decomposition.
///
/// Only rank two leaves a genuine choice; ranks one, three and four accept
/// `Canonical` alone.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum CompletionChoice {
    /// Hilbert-orthonormal, tilde-orthogonal completion of the kernel of
    /// `rho~`. For rank two this is the symmetric choice with the largest
    /// success probability.
    #[default]
    Canonical,
    /// `x_3 = i(tau_1|00> + tau_2|11>)`, `x_4 = tau_1|00> - tau_2|11>`, which
    /// requires the kernel of `rho~` to be spanned by `|00>` and `|11>` and
    /// `tau_1 tau_2` to be real and positive.
    Rank2Tau { tau1: C64, tau2: C64 },
    /// Recombination of the canonical pair, normalized to unit tilde inner
    /// product: `x_3' = c1 x_3 + d1 x_4`, `x_4' = c2 x_3 + d2 x_4`, with
    /// `conj([[c1, d1], [c2, d2]])` complex orthogonal.
    Rank2Cd { c1: C64, d1: C64, c2: C64, d2: C64 },
    /// The recombination of the canonical pair with the largest success
    /// probability. Falls back to `Canonical` when no recombination improves
    /// on it.
    Rank2Optimal,
}

impl CompletionChoice {
    /// Hyperbolic recombination of the canonical pair; `h = 0` is canonical.
    pub fn hyperbolic(h: f64) -> Self {
        let ch = c(h.cosh(), 0.0);
        let sh = c(0.0, h.sinh());
        CompletionChoice::Rank2Cd {
            c1: ch,
            d1: -sh,
            c2: sh,
            d2: ch,
        }
    }

    /// The `tau` completion with `|tau_2| / |tau_1| = ratio`.
    pub fn tau_ratio(ratio: f64) -> Self {
        CompletionChoice::Rank2Tau {
            tau1: ONE,
            tau2: c(ratio, 0.0),
        }
    }
}

const CD_TOL: f64 = 1e-10;

/// Extends the decomposition to four pairwise tilde-orthogonal states with
/// positive tilde inner products.
pub fn complete_basis(
    rho: &DensityMatrix,
    ws: &WoottersSet,
    choice: CompletionChoice,
    tol: &Tolerances,
) -> Result<[CVec4; 4]> {
    let n = ws.rank();
    if n == 0 || n > 4 {
        return Err(Error::InvalidParams(format!("rank {n}")));
    }
    if n != 2 && choice != CompletionChoice::Canonical {
        return Err(Error::InvalidCompletion(format!(
            "rank {n} admits only the canonical completion"
        )));
    }
    let mut out = [CVec4::zeros(); 4];
    out[..n].copy_from_slice(&ws.x);
    if n == 4 {
        return Ok(out);
    }

    // Kernel of rho~: the states tilde-orthogonal to every x_i.
    let e = rho.eigen();
    let kernel: Vec<CVec4> = (n..4).map(|k| tilde_state(&e.vectors.col(k))).collect();
    let m = kernel.len();
    let mut t = Dense::zeros(m);
    for a in 0..m {
        for b in 0..m {
            t[(a, b)] = tilde_inner(&kernel[a], &kernel[b]);
        }
    }
    let (u, d) = takagi_dense(&t, tol.sweep)?;
    if let Some(&dmin) = d.last() {
        if dmin <= tol.rank_cutoff {
            return Err(Error::DegenerateGeometry(format!(
                "completion direction has tilde norm {dmin:.3e} (product state)"
            )));
        }
    }
    let added: Vec<CVec4> = (0..m)
        .map(|j| {
            (0..m).fold(CVec4::zeros(), |acc, a| {
                acc + kernel[a].scale(u[(j, a)].conj())
            })
        })
        .collect();

    match choice {
        CompletionChoice::Canonical => {
            out[n..].copy_from_slice(&added);
        }
        CompletionChoice::Rank2Cd { c1, d1, c2, d2 } => {
            let (a1, b1, a2, b2) = (c1.conj(), d1.conj(), c2.conj(), d2.conj());
            let defects = [
                (a1 * a2 + b1 * b2).norm(),
                (a1 * a1 + b1 * b1 - ONE).norm(),
                (a2 * a2 + b2 * b2 - ONE).norm(),
            ];
            if defects.iter().any(|&x| x > CD_TOL) {
                return Err(Error::InvalidCompletion(format!(
                    "coefficients violate the orthogonality constraints (defects {defects:?})"
                )));
            }
            let h3 = added[0].scale_re(1.0 / d[0].sqrt());
            let h4 = added[1].scale_re(1.0 / d[1].sqrt());
            out[2] = h3.scale(c1) + h4.scale(d1);
            out[3] = h3.scale(c2) + h4.scale(d2);
        }
        CompletionChoice::Rank2Optimal => {
            let h3 = added[0].scale_re(1.0 / d[0].sqrt());
            let h4 = added[1].scale_re(1.0 / d[1].sqrt());
            let h = optimal_hyperbolic(&ws.x, &h3, &h4, tol)?;
            let [p3, p4] = hyperbolic_pair(&h3, &h4, h);
            out[2] = p3;
            out[3] = p4;
        }
        CompletionChoice::Rank2Tau { tau1, tau2 } => {
            let prod = tau1 * tau2;
            if prod.norm() == 0.0 || prod.re <= 0.0 || prod.im.abs() > CD_TOL * prod.norm() {
                return Err(Error::InvalidCompletion(
                    "tau_1 tau_2 must be real and positive".into(),
                ));
            }
            let x3 = CVec([I * tau1, c(0.0, 0.0), c(0.0, 0.0), I * tau2]);
            let x4 = CVec([tau1, c(0.0, 0.0), c(0.0, 0.0), -tau2]);
            for (i, xi) in ws.x.iter().enumerate() {
                for x in [&x3, &x4] {
                    let overlap = tilde_inner(xi, x).norm() / (xi.norm() * x.norm());
                    if overlap > tol.invariant.max(1e-9) {
                        return Err(Error::InvalidCompletion(format!(
                            "tau completion is not tilde-orthogonal to x_{} (overlap {overlap:.3e}); \
                             it needs the kernel of rho~ to be span(|00>, |11>)",
                            i + 1
                        )));
                    }
                }
            }
            out[2] = x3;
            out[3] = x4;
        }
    }
    Ok(out)
}

/// `x_3' = cosh h x_3 - i sinh h x_4`, `x_4' = i sinh h x_3 + cosh h x_4` for
/// a pair with unit tilde norms.
fn hyperbolic_pair(h3: &CVec4, h4: &CVec4, h: f64) -> [CVec4; 2] {
    let (ch, sh) = (c(h.cosh(), 0.0), c(0.0, h.sinh()));
    [h3.scale(ch) - h4.scale(sh), h3.scale(sh) + h4.scale(ch)]
}

const OPT_RANGE: f64 = 4.0;
const OPT_GRID: usize = 160;
const OPT_ITERS: usize = 100;

/// Maximizes the smallest eigenvalue of `F` over the hyperbolic parameter.
/// Real rotations of the pair leave `F` unchanged, so this covers every
/// valid completion.
fn optimal_hyperbolic(x: &[CVec4], h3: &CVec4, h4: &CVec4, tol: &Tolerances) -> Result<f64> {
    let fixed = x.iter().fold(CMat4::zeros(), |acc, v| {
        acc + tilde_state(v)
            .projector()
            .scale_re(1.0 / tilde_inner(v, v).re)
    });
    let score = |h: f64| -> Result<f64> {
        let [a, b] = hyperbolic_pair(h3, h4, h);
        let f = fixed + tilde_state(&a).projector() + tilde_state(&b).projector();
        Ok(herm_eig_with(&f.hermitian_part(), tol.sweep)?.min())
    };
    let base = score(0.0)?;
    let step = 2.0 * OPT_RANGE / OPT_GRID as f64;
    let mut best = (0.0, base);
    for i in 0..=OPT_GRID {
        let h = -OPT_RANGE + step * i as f64;
        let v = score(h)?;
        if v > best.1 {
            best = (h, v);
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    for _ in 0..OPT_ITERS {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if score(m1)? >= score(m2)? {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let h = 0.5 * (lo + hi);
    let v = score(h)?;
    // Keep the symmetric pair unless the gain is real.
    Ok(if v > base * (1.0 + 1e-12) { h } else { 0.0 })
}

/// `F = sum_i |x~_i><x~_i| / <x_i|x~_i>` together with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociatedOperator {
    pub f: CMat4,
    pub lambda_min_f: f64,
    pub eig: HermEig<4>,
    pub completed_x: [CVec4; 4],
    /// `<x_i|x~_i>` for the completed set.
    pub tilde_norms: [f64; 4],
    /// `(<x_3|F|x_3>, <x_4|F|x_4>)`.
    pub t_diag: [f64; 2],
    /// `<x_3|F|x_4>`.
    pub t_34: C64,
    /// `||F F~ - I||`.
    pub norm_defect: f64,
    /// Largest `|<x_i|F|x_j> - lambda_i delta_ij|` over the original states.
    pub condition_defect: f64,
}

pub fn associated_operator(
    completed: &[CVec4; 4],
    ws: &WoottersSet,
    tol: &Tolerances,
) -> Result<AssociatedOperator> {
    let mut tilde_norms = [0.0; 4];
    let mut f = CMat4::zeros();
    for (i, x) in completed.iter().enumerate() {
        let t = tilde_inner(x, x);
        if t.re <= 0.0 || t.im.abs() > tol.invariant.max(1e-12) * t.norm().max(1.0) {
            return Err(Error::Consistency(format!(
                "<x_{0}|x~_{0}> = {t} is not real positive",
                i + 1
            )));
        }
        tilde_norms[i] = t.re;
        let xt = tilde_state(x);
        f = f + xt.projector().scale_re(1.0 / t.re);
    }
    let f = f.hermitian_part();

    let norm_defect = (f * tilde_op(&f)).dist(&CMat4::identity());
    let n = ws.rank();
    let mut condition_defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ws.lambdas[i] } else { 0.0 };
            condition_defect =
                condition_defect.max((f.sandwich(&ws.x[i], &ws.x[j]) - target).norm());
        }
    }
    // Scale-aware checks: entries of F grow like 1/lambda_n.
    let scale = f.frob_norm().max(1.0);
    if norm_defect > tol.invariant * scale * scale {
        return Err(Error::Consistency(format!(
            "||F F~ - I|| = {norm_defect:.3e}"
        )));
    }
    if condition_defect > tol.invariant * scale {
        return Err(Error::Consistency(format!(
            "<x_i|F|x_j> deviates from lambda_i delta_ij by {condition_defect:.3e}"
        )));
    }

    let eig = herm_eig_with(&f, tol.sweep)?;
    Ok(AssociatedOperator {
        f,
        lambda_min_f: eig.min(),
        eig,
        completed_x: *completed,
        tilde_norms,
        t_diag: [
            f.sandwich(&completed[2], &completed[2]).re,
            f.sandwich(&completed[3], &completed[3]).re,
        ],
        t_34: f.sandwich(&completed[2], &completed[3]),
        norm_defect,
        condition_defect,
    })
}

/// `F = G_A (x) G_B` plus the witnesses of the product structure.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorTrace {
    pub ga: CMat2,
    pub gb: CMat2,
    /// `y_i = x~_i / sqrt(<x_i|x~_i>)`, so that `F = sum |y_i><y_i|`.
    pub y: [CVec4; 4],
    /// Product-state decomposition `F = sum |z_i><z_i|` built from `y`.
    pub z: [CVec4; 4],
    /// `||M - s_1 u v^dagger|| / s_1` for the reshuffled operator `M`.
    pub residual: f64,
}

/// Realignment `M[(a a'), (b b')] = F[(a b), (a' b')]`; product operators map
/// to rank-one matrices.
pub fn reshuffle(f: &CMat4) -> CMat4 {
    let mut m = CMat4::zeros();
    for a in 0..2 {
        for ap in 0..2 {
            for b in 0..2 {
                for bp in 0..2 {
                    m.0[2 * a + ap][2 * b + bp] = f.0[2 * a + b][2 * ap + bp];
                }
            }
        }
    }
    m
}

pub fn factorize(op: &AssociatedOperator, tol: &Tolerances) -> Result<FactorTrace> {
    let f = op.f;
    let m = reshuffle(&f);
    let e = herm_eig_with(&(m * m.adjoint()), tol.sweep)?;
    let s1 = e.max().max(0.0).sqrt();
    if s1 == 0.0 {
        return Err(Error::NotProduct(f64::INFINITY));
    }
    let u = e.vectors.col(0);
    let v = (m.adjoint() * u).scale_re(1.0 / s1);
    let residual = m.dist(&u.outer(&v).scale_re(s1)) / s1;
    if residual > tol.product {
        return Err(Error::NotProduct(residual));
    }

    let mut ga = CMat([[u[0], u[1]], [u[2], u[3]]]);
    let mut gb = CMat([[v[0].conj(), v[1].conj()], [v[2].conj(), v[3].conj()]]).scale_re(s1);
    // Remove the free phase so that both factors are positive.
    let tr = ga.trace();
    let phase = tr / tr.norm();
    ga = ga.scale(phase.conj()).hermitian_part();
    gb = gb.scale(phase).hermitian_part();
    let det_a = det2(&ga).re;
    if det_a <= 0.0 {
        return Err(Error::NotProduct(residual));
    }
    let s = det_a.sqrt();
    ga = ga.scale_re(1.0 / s);
    gb = gb.scale_re(s);

    let y: [CVec4; 4] = std::array::from_fn(|i| {
        tilde_state(&op.completed_x[i]).scale_re(1.0 / op.tilde_norms[i].sqrt())
    });
    let half = 0.5;
    let z = [
        (y[0] + y[1] + (y[2] + y[3]).scale(I)).scale_re(half),
        (y[0] + y[1] - (y[2] + y[3]).scale(I)).scale_re(half),
        (y[0] - y[1] + (y[2] - y[3]).scale(I)).scale_re(half),
        (y[0] - y[1] - (y[2] - y[3]).scale(I)).scale_re(half),
    ];
    Ok(FactorTrace {
        ga,
        gb,
        y,
        z,
        residual,
    })
}

/// A pair of local filters `f = (I + a m.sigma) / (1 + a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFilter {
    pub fa: CMat2,
    pub fb: CMat2,
    pub det_fa: f64,
    pub det_fb: f64,
    pub a: f64,
    pub m: [f64; 3],
    pub b: f64,
    pub n: [f64; 3],
}

impl LocalFilter {
    pub fn identity() -> Self {
        Self::from_matrices(CMat2::identity(), CMat2::identity())
    }

    /// Builds the parameterization from two Hermitian PSD matrices with
    /// largest eigenvalue one.
    pub fn from_matrices(fa: CMat2, fb: CMat2) -> Self {
        let (a, m) = filter_params(&fa);
        let (b, n) = filter_params(&fb);
        LocalFilter {
            det_fa: det2(&fa).re,
            det_fb: det2(&fb).re,
            fa,
            fb,
            a,
            m,
            b,
            n,
        }
    }

    /// `f_A (x) f_B`
    pub fn kraus(&self) -> CMat4 {
        kron(&self.fa, &self.fb)
    }

    /// `f_A^2 (x) f_B^2`
    pub fn effect(&self) -> CMat4 {
        kron(&(self.fa * self.fa), &(self.fb * self.fb))
    }

    /// `f_A^2 (x) f_B^2 / (det f_A det f_B)`
    pub fn associated(&self) -> CMat4 {
        self.effect().scale_re(1.0 / (self.det_fa * self.det_fb))
    }

    /// Ratio of largest to smallest eigenvalue of each filter.
    pub fn condition_numbers(&self) -> [f64; 2] {
        [
            (1.0 + self.a) / (1.0 - self.a),
            (1.0 + self.b) / (1.0 - self.b),
        ]
    }
}

/// `(a, m)` with `f = (I + a m.sigma) / (1 + a)` for a filter whose largest
/// eigenvalue is one. `m` defaults to `+z` when `a = 0`.
fn filter_params(f: &CMat2) -> (f64, [f64; 3]) {
    let tr = f.trace().re;
    let det = det2(f).re;
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let (hi, lo) = (tr / 2.0 + disc, tr / 2.0 - disc);
    let r = if hi > 0.0 {
        (lo / hi).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let a = (1.0 - r) / (1.0 + r);
    if a < 1e-12 {
        return (a, [0.0, 0.0, 1.0]);
    }
    let bv = bloch(f);
    let norm = (bv[0] * bv[0] + bv[1] * bv[1] + bv[2] * bv[2]).sqrt();
    (a, bv.map(|x| x / norm))
}

/// `f = sqrt(G) / lambda_max(sqrt(G))` for each factor.
pub fn extract_filters(ft: &FactorTrace) -> Result<LocalFilter> {
    let unit_max = |g: &CMat2| -> Result<CMat2> {
        let r = psd_sqrt(g)?;
        let top = crate::matcore::herm_eig(&r)?.max();
        Ok(r.scale_re(1.0 / top).hermitian_part())
    };
    Ok(LocalFilter::from_matrices(
        unit_max(&ft.ga)?,
        unit_max(&ft.gb)?,
    ))
}

/// `tr(rho f_A^2 (x) f_B^2)`, cross-checked against `lambda_min(F) tr R(rho)`.
pub fn success_probability(
    rho: &DensityMatrix,
    lf: &LocalFilter,
    op: &AssociatedOperator,
    ws: &WoottersSet,
    tol: &Tolerances,
) -> Result<f64> {
    let direct = (*rho.matrix() * lf.effect()).trace().re;
    let spectral = op.lambda_min_f * ws.tr_r;
    if (direct - spectral).abs() > tol.invariant {
        return Err(Error::Consistency(format!(
            "P_f = {direct} from the filter but {spectral} from lambda_min(F) tr R"
        )));
    }
    Ok(direct)
}

/// Everything the pipeline produces for one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub classification: Classification,
    pub wootters: WoottersSet,
    pub operator: Option<AssociatedOperator>,
    pub factors: Option<FactorTrace>,
    pub filter: Option<LocalFilter>,
    pub p_f: Option<f64>,
    pub warnings: Vec<String>,
}

/// Runs the full construction. Separable states are an error; states with
/// `lambda_n = 0` return a plan without a filter, since they only approach
/// Bell diagonal form asymptotically with vanishing probability.
pub fn plan(rho: &DensityMatrix, choice: CompletionChoice, tol: &Tolerances) -> Result<Plan> {
    let ws = wootters_decomposition(rho, tol)?;
    let classification = detect_degenerate(&ws, tol);
    let mut warnings = Vec::new();
    match classification {
        Classification::Separable => return Err(Error::Separable(ws.concurrence)),
        Classification::LambdaNZero => {
            warnings.push(
                Error::LambdaNZero {
                    rank: ws.rank(),
                    lambda_n: ws.lambda_n(),
                }
                .to_string(),
            );
            return Ok(Plan {
                classification,
                wootters: ws,
                operator: None,
                factors: None,
                filter: None,
                p_f: None,
                warnings,
            });
        }
        Classification::Regular => {}
    }

    let completed = complete_basis(rho, &ws, choice, tol)?;
    let op = associated_operator(&completed, &ws, tol)?;
    let ft = factorize(&op, tol)?;
    let lf = extract_filters(&ft)?;
    let p_f = success_probability(rho, &lf, &op, &ws, tol)?;

    let ratio = ws.lambda_n() / ws.lambdas[0];
    let rho_min = rho.eigen().values[ws.rank() - 1];
    if ratio <= tol.near_degenerate || rho_min <= tol.near_degenerate {
        let [ca, cb] = lf.condition_numbers();
        warnings.push(format!(
            "near-degenerate input (lambda_n/lambda_1 = {ratio:.3e}, smallest retained \
             eigenvalue {rho_min:.3e}); filter condition numbers {ca:.3e}, {cb:.3e}"
        ));
    }
    Ok(Plan {
        classification,
        wootters: ws,
        operator: Some(op),
        factors: Some(ft),
        filter: Some(lf),
        p_f: Some(p_f),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell;
    use crate::load_density;
    use crate::matcore::vec_concurrence;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn bell_diagonal_gives_identity_operator() {
        let w = [0.7, 0.1, 0.1, 0.1];
        let m = bell::basis()
            .iter()
            .zip(w)
            .fold(CMat4::zeros(), |acc, (b, p)| {
                acc + b.projector().scale_re(p)
            });
        let rho = load_density(&m, &tol()).unwrap();
        let p = plan(&rho, CompletionChoice::Canonical, &tol()).unwrap();
        let op = p.operator.unwrap();
        assert!(op.f.dist(&CMat4::identity()) < 1e-12);
        assert!((op.lambda_min_f - 1.0).abs() < 1e-12);
        assert!((p.p_f.unwrap() - 1.0).abs() < 1e-12);
        let lf = p.filter.unwrap();
        assert!(lf.a < 1e-12 && lf.b < 1e-12);
    }

    #[test]
    fn diagonal_product_factorizes() {
        let f = CMat4::from_diag(&[2.0, 1.0, 1.0, 0.5]);
        let e = herm_eig_with(&f, Default::default()).unwrap();
        let op = AssociatedOperator {
            f,
            lambda_min_f: 0.5,
            eig: e,
            completed_x: [bell::singlet(); 4],
            tilde_norms: [1.0; 4],
            t_diag: [1.0; 2],
            t_34: c(0.0, 0.0),
            norm_defect: 0.0,
            condition_defect: 0.0,
        };
        let ft = factorize(&op, &tol()).unwrap();
        let g = CMat2::from_diag(&[2f64.sqrt(), 1.0 / 2f64.sqrt()]);
        assert!(ft.ga.dist(&g) < 1e-12);
        assert!(ft.gb.dist(&g) < 1e-12);
        let lf = extract_filters(&ft).unwrap();
        assert!(lf.associated().dist(&f) < 1e-12);
        assert!((lf.det_fa * lf.det_fb - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_product_is_rejected() {
        let f = bell::singlet().projector() + CMat4::identity();
        let e = herm_eig_with(&f, Default::default()).unwrap();
        let op = AssociatedOperator {
            f,
            lambda_min_f: e.min(),
            eig: e,
            completed_x: [bell::singlet(); 4],
            tilde_norms: [1.0; 4],
            t_diag: [1.0; 2],
            t_34: c(0.0, 0.0),
            norm_defect: 0.0,
            condition_defect: 0.0,
        };
        assert!(matches!(factorize(&op, &tol()), Err(Error::NotProduct(_))));
    }

    #[test]
    fn pure_state_follows_procrustean_filter() {
        let v = CVec4::from_real([0.0, 0.8f64.sqrt(), -(0.2f64.sqrt()), 0.0]);
        let rho = load_density(&v.projector(), &tol()).unwrap();
        let p = plan(&rho, CompletionChoice::Canonical, &tol()).unwrap();
        assert!((p.p_f.unwrap() - 0.4).abs() < 1e-10);
        let op = p.operator.unwrap();
        assert!((op.lambda_min_f - 0.5).abs() < 1e-10);
        let lf = p.filter.unwrap();
        let out = lf.kraus() * v;
        assert!((vec_concurrence(&out).unwrap() - 1.0).abs() < 1e-10);
        // filters are diagonal in the Schmidt basis
        for f in [lf.fa, lf.fb] {
            assert!(f.0[0][1].norm() < 1e-12);
        }
    }

    #[test]
    fn rank_mismatched_choice_is_rejected() {
        let rho = load_density(&bell::werner(0.8), &tol()).unwrap();
        let ws = wootters_decomposition(&rho, &tol()).unwrap();
        let err = complete_basis(&rho, &ws, CompletionChoice::tau_ratio(1.0), &tol());
        assert!(matches!(err, Err(Error::InvalidCompletion(_))));
    }

    #[test]
    fn cd_constraints_are_enforced() {
        // rank two: p3 = p4 = 0 member of the family
        let rho = load_density(
            &crate::family::FamilyParams::new(0.8, [0.7, 0.3, 0.0, 0.0])
                .unwrap()
                .state(),
            &tol(),
        )
        .unwrap();
        let ws = wootters_decomposition(&rho, &tol()).unwrap();
        let bad = CompletionChoice::Rank2Cd {
            c1: ONE,
            d1: ONE,
            c2: ONE,
            d2: ONE,
        };
        assert!(matches!(
            complete_basis(&rho, &ws, bad, &tol()),
            Err(Error::InvalidCompletion(_))
        ));
        let neg_tau = CompletionChoice::Rank2Tau {
            tau1: ONE,
            tau2: c(-1.0, 0.0),
        };
        assert!(matches!(
            complete_basis(&rho, &ws, neg_tau, &tol()),
            Err(Error::InvalidCompletion(_))
        ));
        for choice in [
            CompletionChoice::hyperbolic(0.3),
            CompletionChoice::tau_ratio(2.0),
        ] {
            let x = complete_basis(&rho, &ws, choice, &tol()).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        assert!(tilde_inner(&x[i], &x[j]).norm() < 1e-12);
                    }
                }
            }
        }
    }
}
