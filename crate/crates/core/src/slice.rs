//! The two-parameter symmetric slice of the corner-design region for `d = 2`
//! (`μ_i = s`, `μ_ij = t`, `μ_∅ = 1`) and sampling-based redundancy probing.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::model::InteractionModel;

fn require_pairwise(m: &InteractionModel) -> Result<()> {
    if m.d() != 2 {
        return Err(Error::WrongInteractionOrder { expected: 2, got: m.d() });
    }
    Ok(())
}

fn check_point(s: f64, t: f64) -> Result<()> {
    if !(s > 0.0 && t > 0.0 && s.is_finite() && t.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("slice point ({s}, {t}) must be positive")));
    }
    Ok(())
}

/// LHS of the `|C| = c` inequality at the symmetric point:
/// `C(c-1,2)² s^c t^{C(c,2)} + c (c-2)² s^{c-1} t^{C(c,2)} + C(c,2) s^c t^{C(c,2)-1}`.
pub fn slice_lhs(c: usize, s: f64, t: f64) -> f64 {
    let c = c as i64;
    let pairs = binomial(c, 2);
    let a = binomial(c - 1, 2) as f64;
    let b = binomial(c - 2, 1) as f64;
    let (ls, lt) = (libm::log(s), libm::log(t));
    let term = |coef: f64, es: i64, et: i64| {
        if coef == 0.0 {
            0.0
        } else {
            libm::exp(libm::log(coef) + es as f64 * ls + et as f64 * lt)
        }
    };
    term(a * a, c, pairs) + term(c as f64 * b * b, c - 1, pairs) + term(pairs as f64, c, pairs - 1)
}

/// `c ↦ LHS_c(s, t)` for `c = 3..=k`.
pub fn symmetric_slice(m: &InteractionModel, s: f64, t: f64) -> Result<BTreeMap<usize, f64>> {
    require_pairwise(m)?;
    check_point(s, t)?;
    Ok((3..=m.k()).map(|c| (c, slice_lhs(c, s, t))).collect())
}

/// One evaluated slice point.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceRow {
    pub s: f64,
    pub t: f64,
    /// `LHS_c` for `c = 3..=k`.
    pub lhs: Vec<f64>,
    /// `min_c (1 - LHS_c)`; negative exactly when the point is outside the region.
    pub margin: f64,
    /// Smallest violated cardinality, or the tightest one when nothing is violated.
    pub binding: Option<usize>,
    pub optimal: bool,
}

impl SliceRow {
    /// Smallest violated cardinality.
    pub fn first_violated(&self) -> Option<usize> {
        self.lhs.iter().position(|v| *v > 1.0 + crate::regions::THEOREM_TOLERANCE).map(|i| i + 3)
    }
}

pub fn slice_row(m: &InteractionModel, s: f64, t: f64) -> Result<SliceRow> {
    let lhs: Vec<f64> = symmetric_slice(m, s, t)?.into_values().collect();
    let margin = lhs.iter().fold(f64::INFINITY, |acc, v| acc.min(1.0 - v));
    let mut row = SliceRow { s, t, lhs, margin, binding: None, optimal: true };
    row.binding = match row.first_violated() {
        Some(c) => {
            row.optimal = false;
            Some(c)
        }
        None => row
            .lhs
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                Some((_, bv)) if bv >= *v => best,
                _ => Some((i, *v)),
            })
            .map(|(i, _)| i + 3),
    };
    Ok(row)
}

/// Rows for the grid `s_grid × t_grid`, `s` varying slowest.
pub fn region_slice(m: &InteractionModel, s_grid: &[f64], t_grid: &[f64]) -> Result<Vec<SliceRow>> {
    require_pairwise(m)?;
    if s_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut rows = Vec::with_capacity(s_grid.len() * t_grid.len());
    for &s in s_grid {
        for &t in t_grid {
            rows.push(slice_row(m, s, t)?);
        }
    }
    Ok(rows)
}

/// `n` equally spaced points in `(lo, hi]`, ending at `hi`.
pub fn half_open_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Rectangle `(s_lo, s_hi] × (t_lo, t_hi]` of the slice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceRegion {
    pub s: (f64, f64),
    pub t: (f64, f64),
}

impl SliceRegion {
    pub const UNIT_SQUARE: SliceRegion = SliceRegion { s: (0.0, 1.0), t: (0.0, 1.0) };

    fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo >= 0.0 && hi > lo && hi.is_finite();
        if ok(self.s) && ok(self.t) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(alloc::format!("bad slice region {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeConfig {
    pub samples: usize,
    pub seed: u64,
    /// Additional regular grid with this many points per axis (0 disables it).
    pub grid_per_axis: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { samples: 100_000, seed: 0, grid_per_axis: 0 }
    }
}

/// Per-cardinality probe outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeEntry {
    /// No witness was found; evidence of redundancy, not a proof.
    pub redundant_in_region: bool,
    /// First point found where inequality `c` fails while every `c' < c` holds.
    pub witness: Option<(f64, f64)>,
    /// Number of sampled points whose smallest violated cardinality is `c`.
    pub witness_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub region: SliceRegion,
    pub points: usize,
    pub entries: BTreeMap<usize, ProbeEntry>,
}

impl ProbeReport {
    /// Cardinalities for which a witness was found.
    pub fn non_redundant(&self) -> Vec<usize> {
        self.entries.iter().filter(|(_, e)| e.witness.is_some()).map(|(c, _)| *c).collect()
    }
}

/// Samples the region (seeded uniform draws, then an optional grid) and records,
/// per cardinality `c`, whether some point violates inequality `c` while all
/// smaller cardinalities hold. Such a point shows `c` is not implied by them.
pub fn redundancy_probe(m: &InteractionModel, region: SliceRegion, cfg: ProbeConfig) -> Result<ProbeReport> {
    require_pairwise(m)?;
    region.validate()?;
    let mut entries: BTreeMap<usize, ProbeEntry> =
        (3..=m.k()).map(|c| (c, ProbeEntry { redundant_in_region: true, witness: None, witness_count: 0 })).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // 1 - u lies in (0, 1], so draws land in (lo, hi]
    let draw = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| lo + (hi - lo) * (1.0 - rng.random::<f64>());
    let mut points = Vec::with_capacity(cfg.samples + cfg.grid_per_axis * cfg.grid_per_axis);
    for _ in 0..cfg.samples {
        let s = draw(&mut rng, region.s);
        let t = draw(&mut rng, region.t);
        points.push((s, t));
    }
    if cfg.grid_per_axis > 0 {
        for s in half_open_grid(region.s.0, region.s.1, cfg.grid_per_axis) {
            for t in half_open_grid(region.t.0, region.t.1, cfg.grid_per_axis) {
                points.push((s, t));
            }
        }
    }
    for &(s, t) in &points {
        let row = slice_row(m, s, t)?;
        if let Some(c) = row.first_violated() {
            let e = entries.get_mut(&c).expect("cardinality in range");
            e.witness_count += 1;
            if e.witness.is_none() {
                e.witness = Some((s, t));
                e.redundant_in_region = false;
            }
        }
    }
    Ok(ProbeReport { region, points: points.len(), entries })
}
