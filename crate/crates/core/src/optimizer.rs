//! D-optimal approximate designs by multiplicative weight iteration.
//!
//! Each step rescales `w_x ← w_x d(x) / p`, which never decreases
//! `log det M(w, β)`. Iteration stops once `max_x d(x) ≤ p (1 + kw_tolerance)`.
//! Settings that provably carry no weight in any D-optimal design (the
//! Harman–Pronzato bound) and settings whose weight falls below
//! `prune_threshold` are dropped along the way.

use alloc::vec;
use alloc::vec::Vec;

use crate::design::Design;
use crate::error::{Error, Result};
use crate::fisher::SettingTable;
use crate::linalg::Cholesky;
use crate::model::InteractionModel;
use crate::params::ParameterVector;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    /// Stop when `max_x d(x) ≤ p (1 + kw_tolerance)`.
    pub kw_tolerance: f64,
    /// Weights below this (at settings with `d(x) < p`) are dropped; at most `1e-6`.
    pub prune_threshold: f64,
    /// Starting design; uniform over all settings when `None`.
    pub seed: Option<Design>,
    /// Keep `log det M` of every accepted iterate in [`OptimizerResult::log_det_trace`].
    pub record_trace: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 200_000,
            kw_tolerance: 1e-7,
            prune_threshold: 1e-8,
            seed: None,
            record_trace: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kw_tolerance > 0.0 && self.kw_tolerance.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!("kw_tolerance {} must be positive", self.kw_tolerance)));
        }
        if !(0.0..=1e-6).contains(&self.prune_threshold) {
            return Err(Error::InvalidConfig(alloc::format!(
                "prune_threshold {} must lie in [0, 1e-6]",
                self.prune_threshold
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Shape of a design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    /// Equal weight on all `2^k` settings.
    Uniform,
    /// Equal weight `1/p` on the settings with at most `d` active rules.
    Corner,
    /// Any other design supported on exactly `p` settings.
    SaturatedOther,
    Interior,
}

impl Structure {
    pub fn name(self) -> &'static str {
        match self {
            Structure::Uniform => "uniform",
            Structure::Corner => "corner",
            Structure::SaturatedOther => "saturated-other",
            Structure::Interior => "interior",
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizerResult {
    pub design: Design,
    pub iterations: usize,
    pub converged: bool,
    /// `max_x d(x)` at the returned design.
    pub final_kw_max: f64,
    pub log_det: f64,
    pub structure: Structure,
    /// Largest relative deviation of `Σ w_x d(x)` from `p` over all iterates.
    pub max_averaging_residual: f64,
    /// Smallest change of `log det M` between accepted iterates.
    pub min_log_det_step: f64,
    pub log_det_trace: Vec<f64>,
}

/// `p (p - 1) / 2 + 1`: some design with at most this many support points
/// attains any given information matrix.
pub fn caratheodory_bound(m: &InteractionModel) -> usize {
    let p = m.p();
    p * (p - 1) / 2 + 1
}

pub fn classify_structure(w: &Design, m: &InteractionModel, tol: f64) -> Structure {
    let p = m.p();
    let n = 1usize << m.k();
    let all_near = |target: f64| w.iter().all(|(_, wx)| (wx - target).abs() <= tol);
    if w.support_size() == n && all_near(1.0 / n as f64) {
        Structure::Uniform
    } else if w.support_size() == p && w.iter().all(|(x, _)| x.weight() <= m.d()) && all_near(1.0 / p as f64) {
        Structure::Corner
    } else if w.support_size() == p {
        Structure::SaturatedOther
    } else {
        Structure::Interior
    }
}

/// Harman–Pronzato elimination level: settings with `d(x)` below it cannot
/// support a D-optimal design, given `max_x d(x) = p (1 + eps)`.
fn elimination_level(p: f64, eps: f64) -> f64 {
    let disc = eps * (4.0 + eps - 4.0 / p);
    if disc < 0.0 {
        return 0.0;
    }
    p * (1.0 + eps / 2.0 - libm::sqrt(disc) / 2.0)
}

fn renormalize(w: &mut [f64]) {
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
}

struct Iterate {
    weights: Vec<f64>,
    chol: Cholesky,
    log_det: f64,
}

impl Iterate {
    fn new(table: &SettingTable, weights: Vec<f64>) -> Option<Self> {
        let chol = table.information(&weights).cholesky()?;
        let log_det = chol.log_det();
        log_det.is_finite().then_some(Iterate { weights, chol, log_det })
    }
}

pub fn optimize_design(
    theta: &ParameterVector,
    m: &InteractionModel,
    cfg: &OptimizerConfig,
) -> Result<OptimizerResult> {
    cfg.validate()?;
    let table = SettingTable::new(theta, m)?;
    let p = m.p() as f64;
    let n = table.len();
    let start = match &cfg.seed {
        Some(seed) => {
            if seed.k() != m.k() {
                return Err(Error::DimensionMismatch { expected: m.k(), got: seed.k() });
            }
            table.dense_weights(seed)
        }
        None => vec![1.0 / n as f64; n],
    };
    let mut cur = Iterate::new(&table, start).ok_or(Error::SingularInformation)?;
    let mut threshold = cfg.prune_threshold;
    let mut trace = Vec::new();
    if cfg.record_trace {
        trace.push(cur.log_det);
    }
    let mut max_avg_residual = 0.0f64;
    let mut min_step = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let limit = p * (1.0 + cfg.kw_tolerance);

    let mut sens = table.sensitivities(&cur.chol);
    loop {
        let avg: f64 = cur.weights.iter().zip(&sens).map(|(w, d)| w * d).sum();
        max_avg_residual = max_avg_residual.max((avg - p).abs() / p);
        let (arg, max_d) =
            sens.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, v)| if v > b.1 { (i, v) } else { b });
        if max_d <= limit {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iterations {
            break;
        }
        iterations += 1;

        let slack = 1e-12 * cur.log_det.abs().max(1.0);
        let next = if cur.weights[arg] == 0.0 {
            // a dropped setting turned out to be needed: mix it back in
            reinsert(&table, &cur, arg)
        } else {
            let mut w: Vec<f64> = cur.weights.iter().zip(&sens).map(|(w, d)| w * d / p).collect();
            renormalize(&mut w);
            let stepped = Iterate::new(&table, w).ok_or(Error::SingularInformation)?;
            let level = elimination_level(p, max_d / p - 1.0);
            let drop: Vec<usize> = (0..n)
                .filter(|&i| {
                    let wi = stepped.weights[i];
                    wi > 0.0 && (sens[i] < level || (wi < threshold && sens[i] < p))
                })
                .collect();
            if drop.is_empty() {
                stepped
            } else {
                let mut w = stepped.weights.clone();
                drop.iter().for_each(|&i| w[i] = 0.0);
                renormalize(&mut w);
                match Iterate::new(&table, w) {
                    Some(pruned) if pruned.log_det >= stepped.log_det - slack => pruned,
                    Some(_) => stepped,
                    None => {
                        // rank lost: undo the prune and tighten the threshold
                        threshold /= 2.0;
                        stepped
                    }
                }
            }
        };
        if next.log_det < cur.log_det - slack {
            return Err(Error::NonMonotone { iteration: iterations, before: cur.log_det, after: next.log_det });
        }
        min_step = min_step.min(next.log_det - cur.log_det);
        if cfg.record_trace {
            trace.push(next.log_det);
        }
        cur = next;
        sens = table.sensitivities(&cur.chol);
    }

    let design = Design::normalized(m.k(), table.settings.iter().copied().zip(cur.weights.iter().copied()))?;
    let final_kw_max = sens.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
    let structure = classify_structure(&design, m, 10.0 * cfg.kw_tolerance);
    Ok(OptimizerResult {
        design,
        iterations,
        converged,
        final_kw_max,
        log_det: cur.log_det,
        structure,
        max_averaging_residual: max_avg_residual,
        min_log_det_step: min_step,
        log_det_trace: trace,
    })
}

fn reinsert(table: &SettingTable, cur: &Iterate, at: usize) -> Iterate {
    let mut delta = 1.0 / table.len() as f64;
    for _ in 0..60 {
        let mut w: Vec<f64> = cur.weights.iter().map(|x| x * (1.0 - delta)).collect();
        w[at] += delta;
        if let Some(it) = Iterate::new(table, w) {
            if it.log_det > cur.log_det {
                return it;
            }
        }
        delta /= 2.0;
    }
    Iterate { weights: cur.weights.clone(), chol: cur.chol.clone(), log_det: cur.log_det }
}

/// Bisection for a change of `predicate` on `[lo, hi]`; returns the midpoint of
/// the final bracket, within `tol` of the change point.
pub fn find_transition<F>(mut predicate: F, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::InvalidConfig(alloc::format!("bad bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let at_lo = predicate(lo)?;
    if predicate(hi)? == at_lo {
        return Err(Error::NoBracket { lo, hi });
    }
    while (hi - lo) / 2.0 > tol {
        let mid = 0.5 * (lo + hi);
        if predicate(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection along a parameter path for the point where the optimal design
/// switches into or out of `target`.
pub fn find_structure_transition<P>(
    m: &InteractionModel,
    path: P,
    target: Structure,
    bracket: (f64, f64),
    tol: f64,
    cfg: &OptimizerConfig,
) -> Result<f64>
where
    P: Fn(f64) -> Result<ParameterVector>,
{
    find_transition(
        |s| {
            let res = optimize_design(&path(s)?, m, cfg)?;
            if !res.converged {
                return Err(Error::NotConverged { iterations: res.iterations });
            }
            Ok(res.structure == target)
        },
        bracket,
        tol,
    )
}
