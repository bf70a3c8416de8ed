//! Regression vectors, intensities and the Fisher information `M(w, β)`.

use alloc::vec::Vec;

use crate::design::Design;
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, SymMatrix};
use crate::model::{BinarySetting, InteractionModel};
use crate::params::ParameterVector;

/// `f(x)`: entry `A` is `∏_{i∈A} x_i`, i.e. 1 iff `A ⊆ A(x)`.
pub fn regression_vector(x: &BinarySetting, m: &InteractionModel) -> Result<Vec<f64>> {
    m.check_setting(x)?;
    Ok(regression_unchecked(x, m))
}

pub(crate) fn regression_unchecked(x: &BinarySetting, m: &InteractionModel) -> Vec<f64> {
    let ax = x.support();
    m.subsets().iter().map(|a| if a.is_subset_of(ax) { 1.0 } else { 0.0 }).collect()
}

/// `log λ(x) = f(x)ᵀ β = Σ_{A ⊆ A(x), |A| ≤ d} β_A`.
pub fn log_intensity(x: &BinarySetting, theta: &ParameterVector, m: &InteractionModel) -> Result<f64> {
    m.check_setting(x)?;
    theta.check(m)?;
    Ok(log_intensity_unchecked(x, theta, m))
}

pub(crate) fn log_intensity_unchecked(x: &BinarySetting, theta: &ParameterVector, m: &InteractionModel) -> f64 {
    let ax = x.support();
    m.subsets().iter().zip(theta.beta()).filter(|(a, _)| a.is_subset_of(ax)).map(|(_, b)| *b).sum()
}

/// `λ(x) = ∏ μ_A`, evaluated as `exp(Σ β_A)`.
pub fn intensity(x: &BinarySetting, theta: &ParameterVector, m: &InteractionModel) -> Result<f64> {
    log_intensity(x, theta, m).map(libm::exp)
}

/// `M(w, β) = Σ_x w_x λ(x) f(x) f(x)ᵀ`.
pub fn fisher_information(w: &Design, theta: &ParameterVector, m: &InteractionModel) -> Result<SymMatrix> {
    theta.check(m)?;
    if w.k() != m.k() {
        return Err(Error::DimensionMismatch { expected: m.k(), got: w.k() });
    }
    let mut info = SymMatrix::zeros(m.p());
    for (x, wx) in w.iter() {
        let lam = libm::exp(log_intensity_unchecked(&x, theta, m));
        info.add_rank_one(wx * lam, &regression_unchecked(&x, m));
    }
    Ok(info)
}

/// Regression vectors and intensities of all `2^k` settings, computed once per
/// parameter vector.
#[derive(Clone, Debug)]
pub struct SettingTable {
    pub settings: Vec<BinarySetting>,
    pub regressors: Vec<Vec<f64>>,
    pub intensities: Vec<f64>,
}

impl SettingTable {
    pub fn new(theta: &ParameterVector, m: &InteractionModel) -> Result<Self> {
        theta.check(m)?;
        let settings: Vec<BinarySetting> = m.settings()?.collect();
        let regressors = settings.iter().map(|x| regression_unchecked(x, m)).collect();
        let intensities = settings.iter().map(|x| libm::exp(log_intensity_unchecked(x, theta, m))).collect();
        Ok(SettingTable { settings, regressors, intensities })
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    /// Information matrix of a dense weight vector aligned with `settings`.
    pub fn information(&self, weights: &[f64]) -> SymMatrix {
        let p = self.regressors.first().map_or(0, Vec::len);
        let mut info = SymMatrix::zeros(p);
        for ((f, lam), w) in self.regressors.iter().zip(&self.intensities).zip(weights) {
            if *w > 0.0 {
                info.add_rank_one(w * lam, f);
            }
        }
        info
    }

    /// `d(x) = λ(x) f(x)ᵀ M^{-1} f(x)` for every setting.
    pub fn sensitivities(&self, chol: &Cholesky) -> Vec<f64> {
        self.regressors.iter().zip(&self.intensities).map(|(f, lam)| lam * chol.inverse_quadratic_form(f)).collect()
    }

    /// Dense weights (aligned with `settings`) of a design.
    pub fn dense_weights(&self, w: &Design) -> Vec<f64> {
        self.settings.iter().map(|x| w.weight(x)).collect()
    }
}

/// Sensitivity `d(x)` of design `w` at every setting, in increasing bitmask order.
pub fn sensitivity_function(
    w: &Design,
    theta: &ParameterVector,
    m: &InteractionModel,
) -> Result<Vec<(BinarySetting, f64)>> {
    let table = SettingTable::new(theta, m)?;
    if w.k() != m.k() {
        return Err(Error::DimensionMismatch { expected: m.k(), got: w.k() });
    }
    let chol = table.information(&table.dense_weights(w)).cholesky().ok_or(Error::SingularInformation)?;
    Ok(table.settings.iter().copied().zip(table.sensitivities(&chol)).collect())
}
