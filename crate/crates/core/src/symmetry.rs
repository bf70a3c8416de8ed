//! Permutation and coordinate-flip actions on settings, parameters and designs.
//!
//! A [`GroupElement`] `g = (π, F)` acts on a setting by first flipping the
//! coordinates in `F` and then moving coordinate `i` to position `π(i)`:
//! `y = x ⊕ F`, `(g∘x)_{π(i)} = y_i`. Designs are pushed forward,
//! `(g∘w)_{g∘x} = w_x`, and parameters transform by `Q_g^{-T}`, so that
//! `M(g∘w, g∘β) = Q_g M(w, β) Q_gᵀ` with `f(g∘x) = Q_g f(x)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::combinatorics::{inverse_model_matrix, IntMatrix};
use crate::design::Design;
use crate::error::{Error, Result};
use crate::fisher::{fisher_information, regression_unchecked};
use crate::model::{BinarySetting, InteractionModel, MAX_RULES};
use crate::params::ParameterVector;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    /// `perm[i-1] = π(i)`, 1-based.
    perm: Vec<usize>,
    /// Bit `i-1` set when rule `i` is flipped.
    flips: u64,
}

fn permute_mask(perm: &[usize], mask: u64) -> u64 {
    perm.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0, |acc, (_, &pi)| acc | 1 << (pi - 1))
}

impl GroupElement {
    pub fn new(perm: Vec<usize>, flips: u64) -> Result<Self> {
        let k = perm.len();
        if k == 0 || k > MAX_RULES {
            return Err(Error::InvalidGroupElement(format!("permutation length {k} out of range")));
        }
        let mut seen = 0u64;
        for &p in &perm {
            if p == 0 || p > k || seen >> (p - 1) & 1 == 1 {
                return Err(Error::InvalidGroupElement(format!("{perm:?} is not a permutation of 1..={k}")));
            }
            seen |= 1 << (p - 1);
        }
        if k < 64 && flips >> k != 0 {
            return Err(Error::InvalidGroupElement(format!("flip mask {flips:#b} exceeds {k} rules")));
        }
        Ok(GroupElement { perm, flips })
    }

    pub fn identity(k: usize) -> Result<Self> {
        GroupElement::new((1..=k).collect(), 0)
    }

    /// Pure coordinate flip of the given 1-based rules.
    pub fn flip(k: usize, rules: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &r in rules {
            if r == 0 || r > k {
                return Err(Error::InvalidGroupElement(format!("flip of rule {r} with k = {k}")));
            }
            mask |= 1 << (r - 1);
        }
        GroupElement::new((1..=k).collect(), mask)
    }

    pub fn permutation(perm: Vec<usize>) -> Result<Self> {
        GroupElement::new(perm, 0)
    }

    /// Parses `"perm=2,1,3;flips=1,3"`; either part may be omitted.
    pub fn parse(s: &str, k: usize) -> Result<Self> {
        let bad = |msg: String| Error::InvalidGroupElement(msg);
        let mut perm: Option<Vec<usize>> = None;
        let mut flips: Vec<usize> = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| bad(format!("expected key=value in {part:?}")))?;
            let nums = value
                .split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(|v| v.parse::<usize>().map_err(|_| bad(format!("bad index {v:?}"))))
                .collect::<Result<Vec<_>>>()?;
            match key.trim() {
                "perm" => perm = Some(nums),
                "flips" => flips = nums,
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        let perm = perm.unwrap_or_else(|| (1..=k).collect());
        if perm.len() != k {
            return Err(bad(format!("permutation has {} entries, expected {k}", perm.len())));
        }
        let mut mask = 0u64;
        for r in flips {
            if r == 0 || r > k {
                return Err(bad(format!("flip of rule {r} with k = {k}")));
            }
            mask |= 1 << (r - 1);
        }
        GroupElement::new(perm, mask)
    }

    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Self> {
        let mut perm: Vec<usize> = (1..=k).collect();
        perm.shuffle(rng);
        let mask = if k >= 64 { rng.random() } else { rng.random::<u64>() & ((1u64 << k) - 1) };
        GroupElement::new(perm, mask)
    }

    /// All `k! 2^k` elements (small `k` only).
    pub fn all(k: usize) -> Result<Vec<Self>> {
        if k == 0 || k > 6 {
            return Err(Error::InvalidGroupElement(format!("refusing to enumerate the group for k = {k}")));
        }
        let mut perms = Vec::new();
        permutations(&mut (1..=k).collect::<Vec<_>>(), 0, &mut perms);
        let mut out = Vec::with_capacity(perms.len() << k);
        for p in perms {
            for f in 0..1u64 << k {
                out.push(GroupElement { perm: p.clone(), flips: f });
            }
        }
        Ok(out)
    }

    pub fn k(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn flips(&self) -> u64 {
        self.flips
    }

    pub fn is_identity(&self) -> bool {
        self.flips == 0 && self.perm.iter().enumerate().all(|(i, &p)| p == i + 1)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &GroupElement) -> Result<Self> {
        if self.k() != other.k() {
            return Err(Error::DimensionMismatch { expected: self.k(), got: other.k() });
        }
        let perm = other.perm.iter().map(|&j| self.perm[j - 1]).collect();
        let inv = other.inverse();
        let flips = other.flips ^ permute_mask(&inv.perm, self.flips);
        Ok(GroupElement { perm, flips })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![0; self.k()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p - 1] = i + 1;
        }
        GroupElement { flips: permute_mask(&self.perm, self.flips), perm: inv }
    }
}

fn permutations(items: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, out);
        items.swap(start, i);
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &mut dyn Iterator<Item = usize>| v.map(|i| format!("{i}")).collect::<Vec<_>>().join(",");
        let flips: Vec<usize> = (0..self.k()).filter(|i| self.flips >> i & 1 == 1).map(|i| i + 1).collect();
        write!(f, "perm={};flips={}", join(&mut self.perm.iter().copied()), join(&mut flips.into_iter()))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    /// Requires the `perm=` part, which fixes `k`.
    fn from_str(s: &str) -> Result<Self> {
        let k = s
            .split(';')
            .find_map(|p| p.trim().strip_prefix("perm="))
            .map(|v| v.split(',').filter(|x| !x.trim().is_empty()).count())
            .ok_or_else(|| Error::InvalidGroupElement(format!("missing perm= in {s:?}")))?;
        GroupElement::parse(s, k)
    }
}

fn check_k(g: &GroupElement, k: usize) -> Result<()> {
    if g.k() != k {
        return Err(Error::DimensionMismatch { expected: k, got: g.k() });
    }
    Ok(())
}

/// `g∘x`: flip, then permute.
pub fn act_on_setting(g: &GroupElement, x: &BinarySetting) -> Result<BinarySetting> {
    check_k(g, x.k())?;
    BinarySetting::new(x.k(), permute_mask(&g.perm, x.bits() ^ g.flips))
}

/// Integer matrix with `f(g∘x) = Q f(x)` for every setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub element: GroupElement,
    pub q: IntMatrix,
}

impl Representation {
    pub fn determinant(&self) -> i128 {
        self.q.determinant()
    }
}

/// Solves for `Q` on the corner settings (where the evaluation matrix is the
/// unitriangular model matrix) and checks the identity on every setting.
pub fn representation_matrix(g: &GroupElement, m: &InteractionModel) -> Result<Representation> {
    check_k(g, m.k())?;
    let p = m.p();
    let finv = inverse_model_matrix(m);
    let mut images = IntMatrix::zeros(p, p);
    for (row, x) in m.corner_settings().enumerate() {
        let gx = act_on_setting(g, &x)?;
        for (col, v) in regression_unchecked(&gx, m).into_iter().enumerate() {
            images[(row, col)] = v as i64;
        }
    }
    let q = (&finv * &images).transpose();
    if m.check_enumerable().is_ok() {
        for x in m.settings()? {
            let fx: Vec<i64> = regression_unchecked(&x, m).into_iter().map(|v| v as i64).collect();
            let lhs: Vec<i64> =
                regression_unchecked(&act_on_setting(g, &x)?, m).into_iter().map(|v| v as i64).collect();
            if q.mul_vec(&fx) != lhs {
                return Err(Error::InvalidGroupElement(format!("no representation of {g} on the model at {x}")));
            }
        }
    }
    Ok(Representation { element: g.clone(), q })
}

/// `g∘β = Q_g^{-T} β = Q_{g^{-1}}ᵀ β`, optionally with `β_∅` reset to 0.
pub fn act_on_parameters(
    g: &GroupElement,
    theta: &ParameterVector,
    m: &InteractionModel,
    renormalize: bool,
) -> Result<ParameterVector> {
    theta.check(m)?;
    let qinv = representation_matrix(&g.inverse(), m)?.q;
    let beta = qinv.transpose().mul_vec_f64(theta.beta());
    let out = ParameterVector::new(m, beta)?;
    Ok(if renormalize { out.normalized() } else { out })
}

/// Push-forward `(g∘w)_{g∘x} = w_x`.
pub fn act_on_design(g: &GroupElement, w: &Design) -> Result<Design> {
    check_k(g, w.k())?;
    let entries = w.iter().map(|(x, wx)| act_on_setting(g, &x).map(|gx| (gx, wx))).collect::<Result<Vec<_>>>()?;
    Design::new(w.k(), entries)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformationReport {
    /// `max |M(g∘w, g∘β) - Q M Qᵀ|` divided by `max(1, max |M(g∘w, g∘β)|)`.
    pub residual: f64,
    /// `|det M(g∘w, g∘β) - det M(w, β)| / max(|det M(w, β)|, tiny)`, via log-determinants.
    pub det_relative_difference: f64,
    pub q_determinant: i128,
}

pub fn verify_transformation(
    g: &GroupElement,
    w: &Design,
    theta: &ParameterVector,
    m: &InteractionModel,
) -> Result<TransformationReport> {
    let rep = representation_matrix(g, m)?;
    let info = fisher_information(w, theta, m)?;
    let moved = fisher_information(&act_on_design(g, w)?, &act_on_parameters(g, theta, m, false)?, m)?;
    let q = crate::linalg::Matrix::from_rows(
        &(0..m.p()).map(|i| rep.q.row(i).iter().map(|v| *v as f64).collect()).collect::<Vec<_>>(),
    );
    let predicted = info.congruence(&q);
    let residual = moved.sub(&predicted).max_abs() / moved.max_abs().max(1.0);
    let det_relative_difference = match (info.cholesky(), moved.cholesky()) {
        (Some(a), Some(b)) => libm::expm1(b.log_det() - a.log_det()).abs(),
        // singular on both sides: both determinants vanish
        (None, None) => 0.0,
        _ => f64::INFINITY,
    };
    Ok(TransformationReport { residual, det_relative_difference, q_determinant: rep.determinant() })
}

/// Orbit of `β` under the given elements, in the order given.
pub fn parameter_orbit(
    elements: &[GroupElement],
    theta: &ParameterVector,
    m: &InteractionModel,
    renormalize: bool,
) -> Result<Vec<ParameterVector>> {
    elements.iter().map(|g| act_on_parameters(g, theta, m, renormalize)).collect()
}
