//! Rule subsets, binary settings and the interaction model of order `d`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};

/// Largest `k` for which operations enumerate all `2^k` settings.
pub const MAX_ENUMERATED_RULES: usize = 20;
/// Largest number of rules a bitmask can hold.
pub const MAX_RULES: usize = 63;
/// Upper bound on the model dimension `p`.
pub const MAX_DIMENSION: usize = 1 << 16;

/// A subset of the rules `{1, ..., k}`, stored as a bitmask (rule `i` is bit `i - 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    /// Builds a subset from 1-based rule indices.
    pub fn from_rules<I: IntoIterator<Item = usize>>(rules: I) -> Result<Self> {
        let mut bits = 0u64;
        for r in rules {
            if r == 0 || r > MAX_RULES {
                return Err(Error::Parse(alloc::format!("rule index {r} out of range")));
            }
            bits |= 1 << (r - 1);
        }
        Ok(Subset(bits))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Membership of the 1-based rule `rule`.
    pub const fn contains(self, rule: usize) -> bool {
        rule >= 1 && rule <= 64 && self.0 & (1 << (rule - 1)) != 0
    }

    pub const fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub const fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    /// 1-based rule indices in increasing order.
    pub fn rules(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |i| bits & (1 << i) != 0).map(|i| i + 1)
    }

    /// Iterates all subsets of `self` (including `∅` and `self`).
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        // standard submask enumeration, descending, then emit ∅ last
        let full = self.0;
        let mut next = Some(full);
        core::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & full) };
            Some(Subset(cur))
        })
    }

    /// Comma-separated 1-based rule list; empty string for `∅`.
    pub fn key(self) -> String {
        let mut s = String::new();
        for (n, r) in self.rules().enumerate() {
            if n > 0 {
                s.push(',');
            }
            s.push_str(&alloc::format!("{r}"));
        }
        s
    }

    /// Parses the format produced by [`Subset::key`].
    pub fn parse_key(key: &str) -> Result<Self> {
        let key = key.trim();
        if key.is_empty() {
            return Ok(Subset::EMPTY);
        }
        let mut rules = Vec::new();
        for part in key.split(',') {
            let r: usize =
                part.trim().parse().map_err(|_| Error::Parse(alloc::format!("bad rule index {part:?} in {key:?}")))?;
            rules.push(r);
        }
        let s = Subset::from_rules(rules.iter().copied())?;
        if s.len() != rules.len() {
            return Err(Error::Parse(alloc::format!("repeated rule in {key:?}")));
        }
        Ok(s)
    }

    /// Canonical order: cardinality first, then lexicographic on the sorted rule list.
    pub fn canonical_cmp(&self, other: &Subset) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.rules().cmp(other.rules()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// A rule setting `x ∈ {0,1}^k`; bit `i - 1` holds `x_i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinarySetting {
    k: usize,
    bits: u64,
}

impl BinarySetting {
    pub fn new(k: usize, bits: u64) -> Result<Self> {
        if k == 0 || k > MAX_RULES {
            return Err(Error::InvalidModel(alloc::format!("k = {k} out of range")));
        }
        if bits >> k != 0 {
            return Err(Error::DimensionMismatch { expected: k, got: 64 - bits.leading_zeros() as usize });
        }
        Ok(BinarySetting { k, bits })
    }

    pub fn from_subset(k: usize, subset: Subset) -> Result<Self> {
        Self::new(k, subset.bits())
    }

    /// From an explicit 0/1 vector `(x_1, ..., x_k)`.
    pub fn from_values(values: &[u8]) -> Result<Self> {
        let mut bits = 0u64;
        for (i, &v) in values.iter().enumerate() {
            match v {
                0 => {}
                1 => bits |= 1 << i,
                _ => return Err(Error::Parse(alloc::format!("coordinate {} is {v}, not 0/1", i + 1))),
            }
        }
        Self::new(values.len(), bits)
    }

    pub const fn k(&self) -> usize {
        self.k
    }

    pub const fn bits(&self) -> u64 {
        self.bits
    }

    /// `A(x) = {i : x_i = 1}`.
    pub const fn support(&self) -> Subset {
        Subset(self.bits)
    }

    /// `|x|_1`.
    pub const fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Value of the 1-based coordinate `x_i`.
    pub fn get(&self, i: usize) -> u8 {
        debug_assert!(i >= 1 && i <= self.k);
        ((self.bits >> (i - 1)) & 1) as u8
    }

    pub fn values(&self) -> Vec<u8> {
        (1..=self.k).map(|i| self.get(i)).collect()
    }
}

impl fmt::Display for BinarySetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.k {
            f.write_str(if self.get(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinarySetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x({self})")
    }
}

impl FromStr for BinarySetting {
    type Err = Error;

    /// Bit string with `x_1` first, e.g. `"0110"`.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(alloc::format!("bad character {c:?} in setting {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_values(&values)
    }
}

/// The interaction model of order `d` over `k` rules.
///
/// Its regression functions are the squarefree monomials `x^A` with `|A| ≤ d`,
/// indexed by subsets in canonical order (`∅`, singletons, pairs, ...).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionModel {
    k: usize,
    d: usize,
    index: Vec<Subset>,
    lookup: BTreeMap<Subset, usize>,
}

impl InteractionModel {
    pub fn new(k: usize, d: usize) -> Result<Self> {
        if k == 0 || k > MAX_RULES {
            return Err(Error::InvalidModel(alloc::format!("k = {k} must lie in 1..={MAX_RULES}")));
        }
        if d == 0 || d > k {
            return Err(Error::InvalidModel(alloc::format!("d = {d} must lie in 1..=k = {k}")));
        }
        let p: u128 = (0..=d).map(|i| binomial(k as i64, i as i64) as u128).sum();
        if p > MAX_DIMENSION as u128 {
            return Err(Error::InvalidModel(alloc::format!("model dimension {p} is too large")));
        }
        let mut index = Vec::with_capacity(p as usize);
        for card in 0..=d {
            push_combinations(k, card, &mut index);
        }
        let lookup = index.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(InteractionModel { k, d, index, lookup })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of parameters `p = Σ_{i ≤ d} C(k, i)`.
    pub fn p(&self) -> usize {
        self.index.len()
    }

    /// Parameter subsets in canonical order.
    pub fn subsets(&self) -> &[Subset] {
        &self.index
    }

    pub fn position(&self, subset: Subset) -> Option<usize> {
        self.lookup.get(&subset).copied()
    }

    /// Fails with [`Error::TooManyRules`] when `2^k` settings cannot be enumerated.
    pub fn check_enumerable(&self) -> Result<()> {
        if self.k > MAX_ENUMERATED_RULES {
            Err(Error::TooManyRules { k: self.k, limit: MAX_ENUMERATED_RULES })
        } else {
            Ok(())
        }
    }

    pub fn num_settings(&self) -> Result<usize> {
        self.check_enumerable()?;
        Ok(1usize << self.k)
    }

    /// All `2^k` settings in increasing bitmask order.
    pub fn settings(&self) -> Result<impl Iterator<Item = BinarySetting> + '_> {
        let n = self.num_settings()? as u64;
        let k = self.k;
        Ok((0..n).map(move |bits| BinarySetting { k, bits }))
    }

    /// Settings with at most `d` active rules, in the order of [`Self::subsets`].
    pub fn corner_settings(&self) -> impl Iterator<Item = BinarySetting> + '_ {
        let k = self.k;
        self.index.iter().map(move |s| BinarySetting { k, bits: s.bits() })
    }

    pub(crate) fn check_setting(&self, x: &BinarySetting) -> Result<()> {
        if x.k() != self.k {
            Err(Error::DimensionMismatch { expected: self.k, got: x.k() })
        } else {
            Ok(())
        }
    }
}

/// Appends all `card`-subsets of `{1..k}` in lexicographic order.
fn push_combinations(k: usize, card: usize, out: &mut Vec<Subset>) {
    if card == 0 {
        out.push(Subset::EMPTY);
        return;
    }
    let mut idx: Vec<usize> = (0..card).collect();
    loop {
        out.push(Subset(idx.iter().fold(0u64, |acc, &i| acc | (1 << i))));
        // advance to the next combination
        let mut pos = card;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] < k - card + pos {
                break;
            }
            if pos == 0 {
                return;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..card {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn k3_d2_order_matches_printed_model_matrix() {
        let m = InteractionModel::new(3, 2).unwrap();
        let keys: Vec<String> = m.subsets().iter().map(|s| s.key()).collect();
        assert_eq!(keys, vec!["", "1", "2", "3", "1,2", "1,3", "2,3"]);
        assert_eq!(m.p(), 7);
    }

    #[test]
    fn dimension_formula() {
        for k in 1..=10 {
            for d in 1..=k {
                let m = InteractionModel::new(k, d).unwrap();
                let p: i64 = (0..=d).map(|i| binomial(k as i64, i as i64)).sum();
                assert_eq!(m.p() as i64, p);
                // sorted and downward closed
                for w in m.subsets().windows(2) {
                    assert_eq!(w[0].cmp(&w[1]), Ordering::Less);
                }
                for s in m.subsets() {
                    for t in s.subsets() {
                        assert!(m.position(t).is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(InteractionModel::new(3, 0).is_err());
        assert!(InteractionModel::new(3, 4).is_err());
        assert!(InteractionModel::new(0, 0).is_err());
        let big = InteractionModel::new(21, 1).unwrap();
        assert!(matches!(big.num_settings(), Err(Error::TooManyRules { .. })));
    }

    #[test]
    fn setting_round_trip() {
        let x: BinarySetting = "0110".parse().unwrap();
        assert_eq!(x.values(), vec![0, 1, 1, 0]);
        assert_eq!(x.support(), Subset::from_rules([2, 3]).unwrap());
        assert_eq!(alloc::format!("{x}"), "0110");
        assert!("01a".parse::<BinarySetting>().is_err());
        assert!(BinarySetting::new(2, 0b100).is_err());
    }

    #[test]
    fn subset_keys() {
        let s = Subset::parse_key("3, 1").unwrap();
        assert_eq!(s.key(), "1,3");
        assert_eq!(Subset::parse_key("").unwrap(), Subset::EMPTY);
        assert!(Subset::parse_key("1,1").is_err());
        assert!(Subset::parse_key("0").is_err());
        assert_eq!(s.subsets().count(), 4);
    }
}
