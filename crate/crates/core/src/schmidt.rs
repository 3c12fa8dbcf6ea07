//! Schmidt decomposition of a joint spectral amplitude.
//!
//! The Schmidt coefficients are `λ_n = s_n²/Σ s_m²` for the singular values
//! `s_n` of the amplitude matrix. The reduced signal state `ρ_s` is never
//! formed: its spectrum is exactly `{λ_n}`, so `γ = Tr ρ_s² = Σ λ_n² = 1/K`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::jsa::JsaMatrix;
use crate::linalg;
use crate::{Error, Result};

/// Coefficients below this are dropped before `K` is computed.
pub const COEFFICIENT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtResult {
    coefficients: Vec<f64>,
    schmidt_number: f64,
    purity: f64,
}

impl SchmidtResult {
    /// Builds a result from raw non-negative weights: sorts, floors at
    /// [`COEFFICIENT_FLOOR`] and renormalizes.
    pub fn from_weights(weights: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut w: Vec<f64> = weights.into_iter().collect();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::NonFinite);
        }
        let total: f64 = w.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidParameter("Schmidt weights sum to zero".into()));
        }
        w.sort_by(|a, b| b.total_cmp(a));
        w.retain(|x| x / total >= COEFFICIENT_FLOOR);
        let kept: f64 = w.iter().sum();
        let coefficients: Vec<f64> = w.into_iter().map(|x| x / kept).collect();
        let purity: f64 = coefficients.iter().map(|l| l * l).sum();
        Ok(Self {
            coefficients,
            schmidt_number: 1.0 / purity,
            purity,
        })
    }

    /// Descending, summing to one.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn schmidt_number(&self) -> f64 {
        self.schmidt_number
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }
}

/// `γ = Σλ_n² = 1/K`.
pub fn purity(result: &SchmidtResult) -> f64 {
    result.purity
}

fn check(jsa: &JsaMatrix) -> Result<()> {
    if !jsa.amplitudes().is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Schmidt coefficients, `K` and purity from the one-sided Jacobi SVD.
pub fn schmidt_decompose(jsa: &JsaMatrix) -> Result<SchmidtResult> {
    check(jsa)?;
    let s = linalg::svd(jsa.amplitudes(), false);
    SchmidtResult::from_weights(s.singular_values.into_iter().map(|v| v * v))
}

/// Same quantities through the eigenvalues of the Gram matrix `FᴴF`.
pub fn schmidt_decompose_via_gram(jsa: &JsaMatrix) -> Result<SchmidtResult> {
    check(jsa)?;
    let s = linalg::singular_values_via_gram(jsa.amplitudes());
    SchmidtResult::from_weights(s.into_iter().map(|v| v * v))
}

/// A Schmidt weight with its signal and idler mode functions.
pub type SchmidtMode = (f64, Vec<Complex64>, Vec<Complex64>);

/// The leading `count` Schmidt mode pairs: `(λ_n, signal mode, idler mode)`.
/// Modes are unit vectors over the grid samples.
pub fn schmidt_modes(jsa: &JsaMatrix, count: usize) -> Result<Vec<SchmidtMode>> {
    check(jsa)?;
    let s = linalg::svd(jsa.amplitudes(), true);
    let total: f64 = s.singular_values.iter().map(|v| v * v).sum();
    let left = s.left.unwrap_or_default();
    let right = s.right.unwrap_or_default();
    Ok(s.singular_values
        .iter()
        .zip(left)
        .zip(right)
        .take(count)
        .map(|((v, u), w)| (v * v / total, u, w.into_iter().map(|z| z.conj()).collect()))
        .collect())
}
