//! Fixed tolerance policy shared by every comparison in the crate.
//!
//! Adjacency matrices here are tiny 0/1 matrices, so these are loose.

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Tolerances {
    /// Per-vertex eigen residual scale; the effective bound is `eig * n`.
    pub eig: f64,
    /// Sums of energies and efficiency identities.
    pub sum: f64,
    /// Symmetry of reconstructed matrices.
    pub sym: f64,
    /// Core, imputation and audit slacks.
    pub core: f64,
    /// Threshold a violation must still exceed after tightened recomputation.
    pub reverify: f64,
}

pub const TOL_EIG: f64 = 1e-10;
pub const TOL_SUM: f64 = 1e-8;
pub const TOL_SYM: f64 = 1e-9;
pub const TOL_CORE: f64 = 1e-8;
pub const TOL_REVERIFY: f64 = 1e-10;

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        eig: TOL_EIG,
        sum: TOL_SUM,
        sym: TOL_SYM,
        core: TOL_CORE,
        reverify: TOL_REVERIFY,
    };

    pub fn eig_for(&self, n: usize) -> f64 {
        self.eig * n.max(1) as f64
    }

    pub fn with_core(mut self, core: f64) -> Self {
        self.core = core;
        self
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
