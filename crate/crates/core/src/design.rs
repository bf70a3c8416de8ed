use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{BinarySetting, MAX_ENUMERATED_RULES};

/// Tolerance on `Σ w_x = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// An approximate design: positive weights on settings summing to one.
/// Settings with zero weight are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    k: usize,
    weights: BTreeMap<u64, f64>,
}

impl Design {
    /// Validates `(setting, weight)` pairs. Exact zeros are dropped; negative
    /// or non-finite weights, repeated settings and a total off one are rejected.
    pub fn new<I>(k: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BinarySetting, f64)>,
    {
        let d = Self::collect(k, entries)?;
        let total: f64 = d.weights.values().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidDesign(alloc::format!("weights sum to {total}, not 1")));
        }
        Ok(d)
    }

    /// Like [`Design::new`] but rescales the weights to sum to one.
    pub fn normalized<I>(k: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BinarySetting, f64)>,
    {
        let mut d = Self::collect(k, entries)?;
        let total: f64 = d.weights.values().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidDesign("design has no positive weight".into()));
        }
        d.weights.values_mut().for_each(|w| *w /= total);
        Ok(d)
    }

    fn collect<I>(k: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BinarySetting, f64)>,
    {
        if k == 0 || k > MAX_ENUMERATED_RULES {
            return Err(Error::TooManyRules { k, limit: MAX_ENUMERATED_RULES });
        }
        let mut weights = BTreeMap::new();
        for (x, w) in entries {
            if x.k() != k {
                return Err(Error::DimensionMismatch { expected: k, got: x.k() });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDesign(alloc::format!("weight {w} at {x} is not a nonnegative number")));
            }
            if weights.contains_key(&x.bits()) {
                return Err(Error::InvalidDesign(alloc::format!("setting {x} listed twice")));
            }
            if w > 0.0 {
                weights.insert(x.bits(), w);
            }
        }
        if weights.is_empty() {
            return Err(Error::InvalidDesign("design has empty support".into()));
        }
        Ok(Design { k, weights })
    }

    /// Uniform weight `2^{-k}` on every setting.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_ENUMERATED_RULES {
            return Err(Error::TooManyRules { k, limit: MAX_ENUMERATED_RULES });
        }
        let n = 1u64 << k;
        let w = 1.0 / n as f64;
        Ok(Design { k, weights: (0..n).map(|b| (b, w)).collect() })
    }

    /// Unit mass at `x`.
    pub fn point(x: BinarySetting) -> Result<Self> {
        Self::new(x.k(), [(x, 1.0)])
    }

    /// Equal weights on the given settings.
    pub fn uniform_on<I>(k: usize, support: I) -> Result<Self>
    where
        I: IntoIterator<Item = BinarySetting>,
    {
        Self::normalized(k, support.into_iter().map(|x| (x, 1.0)))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, x: &BinarySetting) -> f64 {
        self.weights.get(&x.bits()).copied().unwrap_or(0.0)
    }

    /// `(setting, weight)` in increasing bitmask order.
    pub fn iter(&self) -> impl Iterator<Item = (BinarySetting, f64)> + '_ {
        let k = self.k;
        self.weights.iter().map(move |(&b, &w)| (BinarySetting::new(k, b).expect("stored settings are valid"), w))
    }

    pub fn support(&self) -> Vec<BinarySetting> {
        self.iter().map(|(x, _)| x).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.values().sum()
    }
}
