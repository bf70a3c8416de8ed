//! Regions of optimality of saturated designs.
//!
//! Two independent routes decide whether the corner design is D-optimal:
//! the explicit monomial inequalities indexed by rule subsets `C` with
//! `|C| > d` ([`corner_inequalities`], [`is_corner_optimal_by_theorem`]) and the
//! equivalence-theorem sensitivity check on the dense information matrix
//! ([`kw_certificate`]). [`saturated_kw_values`] is the saturated-design form of
//! the latter, and [`compare_readings`] puts the two side by side.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::combinatorics::binomial;
use crate::design::Design;
use crate::error::{Error, Result};
use crate::fisher::{regression_unchecked, SettingTable};
use crate::linalg::Matrix;
use crate::model::{BinarySetting, InteractionModel, Subset};
use crate::params::ParameterVector;

/// Verdicts accept `LHS ≤ 1 + THEOREM_TOLERANCE`.
pub const THEOREM_TOLERANCE: f64 = 1e-9;
/// Verdicts accept `d(x) ≤ p (1 + KW_TOLERANCE)`.
pub const KW_TOLERANCE: f64 = 1e-7;

/// One summand `c · ∏_{A ∈ support} μ_A` of an inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialTerm {
    /// The subset `B` whose factor is left out of the product.
    pub omitted: Subset,
    /// `C(|C| - |B| - 1, d - |B|)²`.
    pub coefficient: u64,
    /// Model indices of the subsets `A ⊆ C, |A| ≤ d, A ≠ B`.
    pub support: Vec<usize>,
}

/// `Σ_terms c · ∏ μ_A ≤ 1` for the rule subset `label = C`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialInequality {
    pub label: Subset,
    pub terms: Vec<MonomialTerm>,
}

impl MonomialInequality {
    /// Left-hand side at `θ`; each term is accumulated as `exp(ln c + Σ β_A)`.
    pub fn evaluate(&self, theta: &ParameterVector) -> f64 {
        let beta = theta.beta();
        self.terms
            .iter()
            .map(|t| {
                let log_term: f64 = t.support.iter().map(|&i| beta[i]).sum();
                libm::exp(libm::log(t.coefficient as f64) + log_term)
            })
            .sum()
    }

    /// Collapses the inequality onto parameters that depend only on `|A|`:
    /// maps the exponent vector `(e_0, ..., e_d)` (`e_c` = number of factors
    /// with `|A| = c`) to the summed coefficient.
    pub fn by_cardinality(&self, m: &InteractionModel) -> BTreeMap<Vec<u32>, u64> {
        let mut out = BTreeMap::new();
        for t in &self.terms {
            let mut exps = vec![0u32; m.d() + 1];
            for &i in &t.support {
                exps[m.subsets()[i].len()] += 1;
            }
            *out.entry(exps).or_insert(0) += t.coefficient;
        }
        out
    }
}

/// Outcome of an optimality check.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalityVerdict {
    pub optimal: bool,
    /// Within tolerance of equality somewhere it is not forced.
    pub boundary: bool,
    /// Largest inequality LHS, or largest sensitivity `d(x)`.
    pub max_value: f64,
    /// The bound `max_value` is compared with (1, or `p`).
    pub bound: f64,
    pub worst_setting: BinarySetting,
    /// Failing inequality labels `C`, or `A(x)` for failing settings.
    pub violated: Vec<Subset>,
}

/// The corner design: weight `1/p` on every `x` with `|x| ≤ d`.
pub fn corner_design(m: &InteractionModel) -> Result<Design> {
    Design::uniform_on(m.k(), m.corner_settings())
}

/// All rule subsets `C` with `|C| > d`, in canonical order.
fn large_subsets(m: &InteractionModel) -> Result<Vec<Subset>> {
    m.check_enumerable()?;
    let mut out: Vec<Subset> = (0u64..1 << m.k()).map(Subset::from_bits).filter(|c| c.len() > m.d()).collect();
    out.sort();
    Ok(out)
}

/// The inequality attached to a single `C` with `|C| > d`.
pub fn corner_inequality(m: &InteractionModel, c: Subset) -> Result<MonomialInequality> {
    if c.len() <= m.d() || c.bits() >> m.k() != 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "{c} is not a rule subset with more than d = {} elements",
            m.d()
        )));
    }
    let d = m.d() as i64;
    let nc = c.len() as i64;
    let inside: Vec<(usize, Subset)> =
        m.subsets().iter().enumerate().filter(|(_, a)| a.is_subset_of(c)).map(|(i, a)| (i, *a)).collect();
    let terms = inside
        .iter()
        .map(|&(_, b)| {
            let coef = binomial(nc - b.len() as i64 - 1, d - b.len() as i64) as u64;
            MonomialTerm {
                omitted: b,
                coefficient: coef * coef,
                support: inside.iter().filter(|(_, a)| *a != b).map(|(i, _)| *i).collect(),
            }
        })
        .collect();
    Ok(MonomialInequality { label: c, terms })
}

/// One inequality per `C ⊆ {1..k}` with `|C| > d`.
pub fn corner_inequalities(m: &InteractionModel) -> Result<Vec<MonomialInequality>> {
    large_subsets(m)?.into_iter().map(|c| corner_inequality(m, c)).collect()
}

pub fn evaluate_inequality(q: &MonomialInequality, theta: &ParameterVector) -> f64 {
    q.evaluate(theta)
}

/// Evaluates every corner inequality at `θ` with `β_∅` set to zero.
///
/// `max_value` is the largest LHS (0 when `d = k` and the system is empty).
pub fn is_corner_optimal_by_theorem(theta: &ParameterVector, m: &InteractionModel) -> Result<OptimalityVerdict> {
    theta.check(m)?;
    let theta = theta.normalized();
    let ineqs = corner_inequalities(m)?;
    let mut max_value = 0.0;
    let mut worst = Subset::EMPTY;
    let mut violated = Vec::new();
    for q in &ineqs {
        let v = q.evaluate(&theta);
        if v > 1.0 + THEOREM_TOLERANCE {
            violated.push(q.label);
        }
        if v > max_value {
            max_value = v;
            worst = q.label;
        }
    }
    Ok(OptimalityVerdict {
        optimal: violated.is_empty(),
        boundary: (max_value - 1.0).abs() <= THEOREM_TOLERANCE,
        max_value,
        bound: 1.0,
        worst_setting: BinarySetting::from_subset(m.k(), worst)?,
        violated,
    })
}

/// Equivalence-theorem check of an arbitrary design: `w` is D-optimal iff
/// `d(x) = λ(x) f(x)ᵀ M(w,β)^{-1} f(x) ≤ p` for every setting.
pub fn kw_certificate(w: &Design, theta: &ParameterVector, m: &InteractionModel) -> Result<OptimalityVerdict> {
    if w.k() != m.k() {
        return Err(Error::DimensionMismatch { expected: m.k(), got: w.k() });
    }
    let table = SettingTable::new(theta, m)?;
    let weights = table.dense_weights(w);
    let chol = table.information(&weights).cholesky().ok_or(Error::SingularInformation)?;
    let sens = table.sensitivities(&chol);
    Ok(verdict_from_sensitivities(&table, &weights, &sens, m.p() as f64))
}

pub(crate) fn verdict_from_sensitivities(
    table: &SettingTable,
    weights: &[f64],
    sens: &[f64],
    p: f64,
) -> OptimalityVerdict {
    let limit = p * (1.0 + KW_TOLERANCE);
    let (arg, max_value) =
        sens.iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    let violated: Vec<Subset> =
        table.settings.iter().zip(sens).filter(|(_, v)| **v > limit).map(|(x, _)| x.support()).collect();
    let boundary =
        violated.is_empty() && sens.iter().zip(weights).any(|(v, w)| *w == 0.0 && *v >= p * (1.0 - KW_TOLERANCE));
    OptimalityVerdict {
        optimal: violated.is_empty(),
        boundary,
        max_value,
        bound: p,
        worst_setting: table.settings[arg],
        violated,
    }
}

/// Saturated-design form of the sensitivity, `d(x) / p`:
/// `λ(x) gᵀ Λ^{-1} g` with `g = F_w^{-T} f(x)`, `F_w` the regression vectors of
/// the support and `Λ` their intensities. Equals 1 on the support.
pub fn saturated_kw_values(
    w: &Design,
    theta: &ParameterVector,
    m: &InteractionModel,
) -> Result<Vec<(BinarySetting, f64)>> {
    let p = m.p();
    if w.k() != m.k() {
        return Err(Error::DimensionMismatch { expected: m.k(), got: w.k() });
    }
    if w.support_size() != p {
        return Err(Error::NotSaturated(alloc::format!(
            "support has {} points, model has {p} parameters",
            w.support_size()
        )));
    }
    if let Some((x, wx)) = w.iter().find(|(_, wx)| (wx - 1.0 / p as f64).abs() > 1e-9) {
        return Err(Error::NotSaturated(alloc::format!("weight {wx} at {x} is not 1/{p}")));
    }
    let table = SettingTable::new(theta, m)?;
    let support = w.support();
    let rows: Vec<Vec<f64>> = support.iter().map(|x| regression_unchecked(x, m)).collect();
    let lu = Matrix::from_rows(&rows).lu(1e-12).ok_or(Error::SingularSupport)?;
    let support_log_lambda: Vec<f64> =
        support.iter().map(|x| crate::fisher::log_intensity_unchecked(x, theta, m)).collect();
    Ok(table
        .settings
        .iter()
        .zip(&table.regressors)
        .map(|(x, f)| {
            let g = lu.solve_transpose(f);
            let log_lx = crate::fisher::log_intensity_unchecked(x, theta, m);
            let v = g.iter().zip(&support_log_lambda).map(|(gi, ll)| gi * gi * libm::exp(log_lx - ll)).sum();
            (*x, v)
        })
        .collect())
}

/// Theorem evaluator and dense oracle applied to the corner design at one `θ`.
#[derive(Clone, Debug)]
pub struct ReadingComparison {
    pub theorem: OptimalityVerdict,
    pub kw: OptimalityVerdict,
    /// `(C, LHS_C)` for every corner inequality at normalised `θ`.
    pub theorem_lhs: Vec<(Subset, f64)>,
    /// Saturated-form sensitivities `d(x)/p` of the corner design.
    pub saturated: Vec<(BinarySetting, f64)>,
}

impl ReadingComparison {
    pub fn agree(&self) -> bool {
        self.theorem.optimal == self.kw.optimal
    }
}

pub fn compare_readings(theta: &ParameterVector, m: &InteractionModel) -> Result<ReadingComparison> {
    let normalized = theta.normalized();
    let theorem = is_corner_optimal_by_theorem(theta, m)?;
    let corner = corner_design(m)?;
    let kw = kw_certificate(&corner, theta, m)?;
    let theorem_lhs = corner_inequalities(m)?.iter().map(|q| (q.label, q.evaluate(&normalized))).collect();
    let saturated = saturated_kw_values(&corner, theta, m)?;
    Ok(ReadingComparison { theorem, kw, theorem_lhs, saturated })
}

/// Largest number of candidate supports [`optimal_saturated_designs`] will scan.
pub const MAX_SATURATED_CANDIDATES: u64 = 2_000_000;

/// Every saturated design (uniform weights on `p` settings with independent
/// regression vectors) that is D-optimal at `θ`.
pub fn optimal_saturated_designs(theta: &ParameterVector, m: &InteractionModel) -> Result<Vec<Design>> {
    let n = m.num_settings()?;
    let p = m.p();
    let count = binomial(n as i64, p as i64);
    if count as u64 > MAX_SATURATED_CANDIDATES || count == 0 {
        return Err(Error::InvalidConfig(alloc::format!(
            "{count} candidate supports exceed the scan limit of {MAX_SATURATED_CANDIDATES}"
        )));
    }
    let table = SettingTable::new(theta, m)?;
    let mut found = Vec::new();
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        let mut weights = vec![0.0; n];
        for &i in &idx {
            weights[i] = 1.0 / p as f64;
        }
        if let Some(chol) = table.information(&weights).cholesky() {
            let sens = table.sensitivities(&chol);
            if verdict_from_sensitivities(&table, &weights, &sens, p as f64).optimal {
                found.push(Design::uniform_on(m.k(), idx.iter().map(|&i| table.settings[i]))?);
            }
        }
        // next p-combination of 0..n
        let mut pos = p;
        loop {
            if pos == 0 {
                return Ok(found);
            }
            pos -= 1;
            if idx[pos] < n - p + pos {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..p {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
