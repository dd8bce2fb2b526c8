//! Named tolerances used by the numerical checks.
//!
//! Values are stored as `f64` and converted to the working scalar at the
//! point of use. Every field can be overridden by name through
//! [`Tolerances::set`], which is how the harness applies `--tol name=value`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative Hermiticity tolerance: `‖M − M†‖ ≤ herm · max(1, ‖M‖)`.
    pub herm: f64,
    /// Unitarity tolerance per dimension: `‖U†U − I‖ ≤ unitary · dim`.
    pub unitary: f64,
    /// Relative eigen-reconstruction tolerance.
    pub recon: f64,
    /// Orthonormality of subspace bases: `‖B†B − I‖ ≤ ortho`.
    pub ortho: f64,
    /// Relative singular-value cutoff for kernels.
    pub kernel: f64,
    /// Absolute cutoff used when the largest singular value underflows.
    pub kernel_abs: f64,
    /// Labels closer than this are treated as one eigenvalue.
    pub label_sep: f64,
    /// Relative commutation threshold for compatibility decisions.
    pub compat: f64,
    /// Absolute slack on the drift and fidelity bounds.
    pub bound_slack: f64,
    /// `‖K ψ0‖` allowed for an initial state to count as synchronized.
    pub init: f64,
    pub equivar: f64,
    pub match_: f64,
    pub mult_round: f64,
    pub schur: f64,
}

impl Tolerances {
    pub const NAMES: [&'static str; 14] = [
        "herm",
        "unitary",
        "recon",
        "ortho",
        "kernel",
        "kernel_abs",
        "label_sep",
        "compat",
        "bound_slack",
        "init",
        "equivar",
        "match",
        "mult_round",
        "schur",
    ];

    pub const fn double() -> Self {
        Self {
            herm: 1e-12,
            unitary: 1e-12,
            recon: 1e-12,
            ortho: 1e-10,
            kernel: 1e-10,
            kernel_abs: 1e-12,
            label_sep: 1e-9,
            compat: 1e-10,
            bound_slack: 1e-9,
            init: 1e-8,
            equivar: 1e-10,
            match_: 1e-9,
            mult_round: 1e-6,
            schur: 1e-9,
        }
    }

    pub const fn single() -> Self {
        Self {
            herm: 1e-5,
            unitary: 1e-5,
            recon: 1e-5,
            ortho: 1e-4,
            kernel: 1e-4,
            kernel_abs: 1e-6,
            label_sep: 1e-4,
            compat: 1e-4,
            bound_slack: 1e-4,
            init: 1e-3,
            equivar: 1e-4,
            match_: 1e-4,
            mult_round: 1e-2,
            schur: 1e-4,
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "herm" => self.herm,
            "unitary" => self.unitary,
            "recon" => self.recon,
            "ortho" => self.ortho,
            "kernel" => self.kernel,
            "kernel_abs" => self.kernel_abs,
            "label_sep" => self.label_sep,
            "compat" => self.compat,
            "bound_slack" => self.bound_slack,
            "init" => self.init,
            "equivar" => self.equivar,
            "match" => self.match_,
            "mult_round" => self.mult_round,
            "schur" => self.schur,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance '{name}' must be positive and finite, got {value}"
            )));
        }
        let slot = match name {
            "herm" => &mut self.herm,
            "unitary" => &mut self.unitary,
            "recon" => &mut self.recon,
            "ortho" => &mut self.ortho,
            "kernel" => &mut self.kernel,
            "kernel_abs" => &mut self.kernel_abs,
            "label_sep" => &mut self.label_sep,
            "compat" => &mut self.compat,
            "bound_slack" => &mut self.bound_slack,
            "init" => &mut self.init,
            "equivar" => &mut self.equivar,
            "match" => &mut self.match_,
            "mult_round" => &mut self.mult_round,
            "schur" => &mut self.schur,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown tolerance '{name}'"
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    /// `(name, value)` pairs in a stable order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        Self::NAMES
            .iter()
            .map(|&n| (n, self.get(n).expect("known name")))
            .collect()
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::double()
    }
}
