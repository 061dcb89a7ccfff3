//! Closed forms for the four-parameter family
//!
//! ```text
//! rho = p1 |psi1><psi1| + p2 |psi2><psi2| + p3 |00><00| + p4 |11><11|
//! psi1 = alpha |01> - beta |10>,   psi2 = beta |01> + alpha |10>
//! ```
//!
//! with `alpha^2 + beta^2 = 1`, `p1 >= p2` and `p3 >= p4`. Every quantity the
//! numerical pipeline produces (spectrum, associated operator, filters,
//! success probability) has an explicit expression here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{CMat2, CMat4, CVec4, I};

const PARAM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub alpha: f64,
    pub beta: f64,
    pub p: [f64; 4],
}

impl FamilyParams {
    /// Validates `0 <= alpha <= 1`, a probability vector `p` with `p1 >= p2`
    /// and `p3 >= p4`; `beta = sqrt(1 - alpha^2)`.
    pub fn new(alpha: f64, p: [f64; 4]) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha} outside [0, 1]"
            )));
        }
        if !p.iter().all(|&x| x >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "negative probability in {p:?}"
            )));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "probabilities sum to {total}"
            )));
        }
        if p[0] < p[1] {
            return Err(Error::InvalidParams("p1 < p2".into()));
        }
        if p[2] < p[3] {
            return Err(Error::InvalidParams("p3 < p4".into()));
        }
        Ok(FamilyParams {
            alpha,
            beta: (1.0 - alpha * alpha).max(0.0).sqrt(),
            p: p.map(|x| x / total),
        })
    }

    pub fn psi1(&self) -> CVec4 {
        CVec4::from_real([0.0, self.alpha, -self.beta, 0.0])
    }

    pub fn psi2(&self) -> CVec4 {
        CVec4::from_real([0.0, self.beta, self.alpha, 0.0])
    }

    pub fn state(&self) -> CMat4 {
        let [p1, p2, p3, p4] = self.p;
        self.psi1().projector().scale_re(p1)
            + self.psi2().projector().scale_re(p2)
            + CMat4::from_diag(&[p3, 0.0, 0.0, p4])
    }

    /// `ab (p1 - p2)`
    fn asym(&self) -> f64 {
        self.alpha * self.beta * (self.p[0] - self.p[1])
    }

    /// `[a^2 b^2 (p1 - p2)^2 + p1 p2]^(1/2)`
    pub fn root(&self) -> f64 {
        (self.asym().powi(2) + self.p[0] * self.p[1]).sqrt()
    }

    pub fn sqrt_p3p4(&self) -> f64 {
        (self.p[2] * self.p[3]).sqrt()
    }

    /// `2 [ab (p1 - p2) - sqrt(p3 p4)]`, unclamped.
    pub fn concurrence_raw(&self) -> f64 {
        2.0 * (self.asym() - self.sqrt_p3p4())
    }

    pub fn concurrence(&self) -> f64 {
        self.concurrence_raw().max(0.0)
    }

    /// Tilde inner products of the four decomposition states, in the order of
    /// [`Self::wootters_x`] (not sorted).
    pub fn lambdas_labelled(&self) -> [f64; 4] {
        let r = self.root();
        let s = self.sqrt_p3p4();
        [r + self.asym(), r - self.asym(), s, s]
    }

    pub fn lambdas_sorted(&self) -> [f64; 4] {
        let mut l = self.lambdas_labelled();
        l.sort_by(|a, b| b.total_cmp(a));
        l
    }

    /// `tr R(rho) = 2 (root + sqrt(p3 p4))`
    pub fn tr_r(&self) -> f64 {
        2.0 * (self.root() + self.sqrt_p3p4())
    }

    pub fn theta(&self) -> f64 {
        let [p1, p2, ..] = self.p;
        let (a, b) = (self.alpha, self.beta);
        let num = (p1 * p2).sqrt() * (a * a - b * b);
        let den = self.root() + a * b * (p1 + p2);
        (num / den).atan()
    }

    pub fn k(&self) -> f64 {
        let [p1, p2, ..] = self.p;
        let th = self.theta();
        let l1 = self.lambdas_labelled()[0];
        (2.0 / l1).sqrt() * (p1.sqrt() * self.alpha * th.cos() - p2.sqrt() * self.beta * th.sin())
    }

    /// The explicit tilde-orthogonal decomposition.
    pub fn wootters_x(&self) -> [CVec4; 4] {
        let [p1, p2, p3, p4] = self.p;
        let th = self.theta();
        let (s1, s2) = (self.psi1(), self.psi2());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        [
            (s1.scale_re(th.cos() * p1.sqrt()) - s2.scale_re(th.sin() * p2.sqrt())).scale(I),
            s1.scale_re(th.sin() * p1.sqrt()) + s2.scale_re(th.cos() * p2.sqrt()),
            CVec4::from_real([h * p3.sqrt(), 0.0, 0.0, h * p4.sqrt()]).scale(I),
            CVec4::from_real([h * p3.sqrt(), 0.0, 0.0, -h * p4.sqrt()]),
        ]
    }
}

/// Which closed form produced the filters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `sqrt(p3/p4) <= k^2`
    Result1,
    /// `sqrt(p4/p3) < k^2 < sqrt(p3/p4)`, factorized from `F` directly.
    Middle,
    /// `k^2 <= sqrt(p4/p3)`
    Result2,
    /// `p3 = p4 = 0`, completed with the tau states.
    Rank2,
    /// Small `p4`, middle-regime filters.
    P4ZeroLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyClosedForm {
    pub theta: f64,
    pub k: f64,
    /// Descending.
    pub lambdas: [f64; 4],
    pub tr_r: f64,
    pub concurrence: f64,
    pub f: CMat4,
    pub fa: CMat2,
    pub fb: CMat2,
    pub p_f: f64,
    pub regime: Regime,
}

fn diag2(a: f64, b: f64) -> CMat2 {
    CMat2::from_diag(&[a, b])
}

/// `k^2 (x |0><0| + |1><1|) (x) (|0><0| + y |1><1|)` with `x = r / k^2`,
/// `y = 1 / (r k^2)`, i.e. `diag(r, k^2) (x) diag(1, 1 / (r k^2))`.
fn product_operator(r: f64, k2: f64) -> CMat4 {
    crate::matcore::kron(&diag2(r, k2), &diag2(1.0, 1.0 / (r * k2)))
}

fn require_entangled(fp: &FamilyParams) -> Result<()> {
    if fp.concurrence_raw() <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "state is not entangled (C = {:.3e})",
            fp.concurrence_raw()
        )));
    }
    Ok(())
}

/// Closed forms for `p3 p4 > 0`.
pub fn family_closed_form(fp: &FamilyParams) -> Result<FamilyClosedForm> {
    require_entangled(fp)?;
    let [_, _, p3, p4] = fp.p;
    if p3 == 0.0 && p4 == 0.0 {
        return Err(Error::InvalidParams(
            "p3 = p4 = 0: use the rank-two closed form".into(),
        ));
    }
    if p4 == 0.0 {
        return Err(Error::LambdaNZero {
            rank: 3,
            lambda_n: 0.0,
        });
    }
    let k = fp.k();
    let k2 = k * k;
    let q = (p4 / p3).sqrt();
    let q4 = q.sqrt();
    let f = product_operator(q, k2);
    let bracket = fp.root() + fp.sqrt_p3p4();
    let (regime, fa, fb, p_f) = if 1.0 / q <= k2 {
        (
            Regime::Result1,
            diag2(q4 / k, 1.0),
            diag2(1.0, 1.0 / (k * q4)),
            2.0 / k2 * bracket,
        )
    } else if k2 <= q {
        (
            Regime::Result2,
            diag2(1.0, k / q4),
            diag2(k * q4, 1.0),
            2.0 * k2 * bracket,
        )
    } else {
        let (fa, fb) = middle_filters(k, q4);
        (Regime::Middle, fa, fb, 2.0 * q * bracket)
    };
    Ok(FamilyClosedForm {
        theta: fp.theta(),
        k,
        lambdas: fp.lambdas_sorted(),
        tr_r: fp.tr_r(),
        concurrence: fp.concurrence(),
        f,
        fa,
        fb,
        p_f,
        regime,
    })
}

/// `f_A = (1/k) (p4/p3)^(1/4) |0><0| + |1><1|`,
/// `f_B = k (p4/p3)^(1/4) |0><0| + |1><1|`.
fn middle_filters(k: f64, q4: f64) -> (CMat2, CMat2) {
    (diag2(q4 / k, 1.0), diag2(k * q4, 1.0))
}

/// Rank-two members (`p3 = p4 = 0`) completed with
/// `x3 = i(tau1|00> + tau2|11>)`, `x4 = tau1|00> - tau2|11>` and
/// `|tau2| / |tau1| = tau_ratio`.
pub fn family_rank2(fp: &FamilyParams, tau_ratio: f64) -> Result<FamilyClosedForm> {
    if !(tau_ratio.is_finite() && tau_ratio > 0.0) {
        return Err(Error::InvalidParams(format!(
            "tau ratio {tau_ratio} must be positive"
        )));
    }
    if fp.p[2] > PARAM_TOL || fp.p[3] > PARAM_TOL {
        return Err(Error::InvalidParams(
            "rank-two closed form needs p3 = p4 = 0".into(),
        ));
    }
    require_entangled(fp)?;
    let k = fp.k();
    let k2 = k * k;
    let f = product_operator(tau_ratio, k2);
    let unit = |a: f64, b: f64| {
        let (a, b) = (a.sqrt(), b.sqrt());
        let m = a.max(b);
        diag2(a / m, b / m)
    };
    let fa = unit(tau_ratio, k2);
    let fb = unit(1.0, 1.0 / (tau_ratio * k2));
    let p_f = if tau_ratio == 1.0 {
        2.0 * fp.root() * k2.min(1.0 / k2)
    } else {
        let lmin = [tau_ratio, 1.0 / tau_ratio, k2, 1.0 / k2]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        lmin * fp.tr_r()
    };
    Ok(FamilyClosedForm {
        theta: fp.theta(),
        k,
        lambdas: fp.lambdas_sorted(),
        tr_r: fp.tr_r(),
        concurrence: fp.concurrence(),
        f,
        fa,
        fb,
        p_f,
        regime: Regime::Rank2,
    })
}

/// Small-`p4` behaviour: middle-regime filters and
/// `P_f = 2 sqrt(p4/p3) (root + sqrt(p3 p4))`, which vanishes like
/// `sqrt(p4)`. At `p4 = 0` no invertible filter exists.
pub fn family_p4_limit(fp: &FamilyParams) -> Result<FamilyClosedForm> {
    require_entangled(fp)?;
    let [_, _, p3, p4] = fp.p;
    if p4 == 0.0 {
        return Err(Error::LambdaNZero {
            rank: if fp.p[1] > 0.0 { 3 } else { 2 },
            lambda_n: 0.0,
        });
    }
    let k = fp.k();
    let k2 = k * k;
    let q = (p4 / p3).sqrt();
    if k2 < q || k2 > 1.0 / q {
        return Err(Error::InvalidParams(format!(
            "k^2 = {k2} outside [sqrt(p4/p3), sqrt(p3/p4)] = [{q}, {}]",
            1.0 / q
        )));
    }
    let (fa, fb) = middle_filters(k, q.sqrt());
    Ok(FamilyClosedForm {
        theta: fp.theta(),
        k,
        lambdas: fp.lambdas_sorted(),
        tr_r: fp.tr_r(),
        concurrence: fp.concurrence(),
        f: product_operator(q, k2),
        fa,
        fb,
        p_f: 2.0 * q * (fp.root() + fp.sqrt_p3p4()),
        regime: Regime::P4ZeroLimit,
    })
}

/// `rho'` for `p2 = 0`: weights `{2 p1 ab, sqrt(p3 p4), sqrt(p3 p4)} / N` on
/// `Psi-`, `Phi+`, `Phi-`, with `N = 2 p1 ab + 2 sqrt(p3 p4)`.
pub fn p2_zero_output(fp: &FamilyParams) -> ([f64; 3], CMat4) {
    let s = fp.sqrt_p3p4();
    let top = 2.0 * fp.p[0] * fp.alpha * fp.beta;
    let n = top + 2.0 * s;
    let w = [top / n, s / n, s / n];
    let b = crate::bell::basis();
    let rho = b[0].projector().scale_re(w[0])
        + b[2].projector().scale_re(w[1])
        + b[3].projector().scale_re(w[2]);
    (w, rho)
}

/// `(p1 ab - sqrt(p3 p4)) / (p1 ab + sqrt(p3 p4))`, valid at `p2 = 0`.
pub fn p2_zero_concurrence(fp: &FamilyParams) -> f64 {
    let a = fp.p[0] * fp.alpha * fp.beta;
    let s = fp.sqrt_p3p4();
    (a - s) / (a + s)
}
