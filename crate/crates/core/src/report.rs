//! Fitted-constant reports shared by the verification routines.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

/// Extent of a sampling grid.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridDescriptor {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridDescriptor {
    pub fn of(grid: &[f64]) -> Self {
        let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { lo, hi, points: grid.len() }
    }
}

/// Named constants fitted on a grid, the margin by which the fitted bound
/// holds at its tightest point, and the overall verdict.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitReport {
    pub name: String,
    pub constants: BTreeMap<String, f64>,
    pub grid: GridDescriptor,
    /// `(grid point, quantity)` pairs; what the quantity is depends on the fit.
    pub trajectory: Vec<(f64, f64)>,
    pub worst_margin: f64,
    pub pass: bool,
    pub note: String,
}

impl FitReport {
    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }
}
