use serde::{Deserialize, Serialize};

use crate::matcore::SweepOrder;

/// Numerical thresholds shared by the whole pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Accepted `||rho - rho^dagger||`.
    pub hermiticity: f64,
    /// Most negative eigenvalue accepted for a density matrix.
    pub negativity: f64,
    /// Accepted `|tr(rho) - 1|`.
    pub trace: f64,
    /// Eigenvalues of `rho` above `rank_cutoff * max` count towards the rank;
    /// also the relative cutoff deciding `lambda_n = 0`.
    pub rank_cutoff: f64,
    /// `lambda_n / lambda_1` below this triggers a conditioning warning.
    pub near_degenerate: f64,
    /// Concurrence at or below this is treated as separable.
    pub separable: f64,
    /// Pipeline self-checks (decomposition, F F~ = I, probability agreement).
    pub invariant: f64,
    /// Reshuffled-operator residual above this means "not a product".
    pub product: f64,
    /// Bell-diagonality certificate.
    pub bell: f64,
    pub sweep: SweepOrder,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-9,
            negativity: 1e-9,
            trace: 1e-9,
            rank_cutoff: 1e-10,
            near_degenerate: 1e-6,
            separable: 1e-10,
            invariant: 1e-9,
            product: 1e-8,
            bell: 1e-8,
            sweep: SweepOrder::RowCyclic,
        }
    }
}

impl Tolerances {
    /// Default set with every threshold multiplied by `factor`.
    pub fn scaled(factor: f64) -> Self {
        let d = Self::default();
        Tolerances {
            hermiticity: d.hermiticity * factor,
            negativity: d.negativity * factor,
            trace: d.trace * factor,
            rank_cutoff: d.rank_cutoff * factor,
            near_degenerate: d.near_degenerate * factor,
            separable: d.separable * factor,
            invariant: d.invariant * factor,
            product: d.product * factor,
            bell: d.bell * factor,
            sweep: d.sweep,
        }
    }

    pub fn with_sweep(mut self, sweep: SweepOrder) -> Self {
        self.sweep = sweep;
        self
    }
}
