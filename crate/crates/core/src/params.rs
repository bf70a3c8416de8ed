use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{InteractionModel, Subset};

/// Log-scale parameters `β_A`, one per model subset in canonical order.
/// `μ_A = e^{β_A}` is derived on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector {
    beta: Vec<f64>,
}

impl ParameterVector {
    pub fn new(m: &InteractionModel, beta: Vec<f64>) -> Result<Self> {
        if beta.len() != m.p() {
            return Err(Error::DimensionMismatch { expected: m.p(), got: beta.len() });
        }
        if let Some(i) = beta.iter().position(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("beta for subset {} is not finite", m.subsets()[i])));
        }
        Ok(ParameterVector { beta })
    }

    pub fn zeros(m: &InteractionModel) -> Self {
        ParameterVector { beta: vec![0.0; m.p()] }
    }

    /// From `(subset, β)` pairs; subsets not listed get `β = 0`.
    pub fn from_pairs<I>(m: &InteractionModel, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, f64)>,
    {
        let mut beta = vec![0.0; m.p()];
        for (s, b) in pairs {
            let i = m
                .position(s)
                .ok_or_else(|| Error::InvalidParameter(alloc::format!("subset {s} is not a parameter of the model")))?;
            beta[i] = b;
        }
        Self::new(m, beta)
    }

    /// Symmetric point: `μ_A = levels[|A| - 1]` for `1 ≤ |A| ≤ levels.len()`,
    /// `μ_∅ = 1` and `μ_A = 1` for higher orders not covered by `levels`.
    pub fn symmetric(m: &InteractionModel, levels: &[f64]) -> Result<Self> {
        if let Some(v) = levels.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("intensity level {v} must be positive")));
        }
        let beta = m
            .subsets()
            .iter()
            .map(|s| match s.len() {
                0 => 0.0,
                c if c <= levels.len() => libm::log(levels[c - 1]),
                _ => 0.0,
            })
            .collect();
        Self::new(m, beta)
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn beta_at(&self, index: usize) -> f64 {
        self.beta[index]
    }

    pub fn mu_at(&self, index: usize) -> f64 {
        libm::exp(self.beta[index])
    }

    /// All `μ_A` at once.
    pub fn mu(&self) -> Vec<f64> {
        self.beta.iter().map(|b| libm::exp(*b)).collect()
    }

    pub fn beta_of(&self, m: &InteractionModel, s: Subset) -> Option<f64> {
        m.position(s).map(|i| self.beta[i])
    }

    /// Whether `β_∅ = 0`.
    pub fn is_normalized(&self) -> bool {
        self.beta.first().is_none_or(|b| *b == 0.0)
    }

    /// Same parameters with `β_∅ = 0`.
    pub fn normalized(&self) -> Self {
        let mut beta = self.beta.clone();
        if let Some(b) = beta.first_mut() {
            *b = 0.0;
        }
        ParameterVector { beta }
    }

    pub(crate) fn check(&self, m: &InteractionModel) -> Result<()> {
        if self.beta.len() != m.p() {
            Err(Error::DimensionMismatch { expected: m.p(), got: self.beta.len() })
        } else {
            Ok(())
        }
    }
}
