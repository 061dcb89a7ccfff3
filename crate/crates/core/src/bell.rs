//! Bell states and Bell diagonal mixtures.

use crate::matcore::{CMat4, CVec4};

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `(|01> - |10>) / sqrt 2`
pub fn singlet() -> CVec4 {
    CVec4::from_real([0.0, H, -H, 0.0])
}

/// `[Psi-, Psi+, Phi+, Phi-]`
pub fn basis() -> [CVec4; 4] {
    [
        singlet(),
        CVec4::from_real([0.0, H, H, 0.0]),
        CVec4::from_real([H, 0.0, 0.0, H]),
        CVec4::from_real([H, 0.0, 0.0, -H]),
    ]
}

/// `w |Psi-><Psi-| + (1 - w) I / 4`
pub fn werner(w: f64) -> CMat4 {
    singlet().projector().scale_re(w) + CMat4::identity().scale_re((1.0 - w) / 4.0)
}
