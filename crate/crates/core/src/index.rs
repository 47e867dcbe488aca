//! Multi-indices, lower sets and hyperbolic-cross truncation.
//!
//! Columns of every design matrix follow the order of an [`IndexSet`]: indices
//! are sorted by `prod(i_l + 1)` ascending and ties are broken
//! lexicographically, so `hyperbolic_cross(d, s)` is a prefix of
//! `hyperbolic_cross(d, s + 1)`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `s` accepted by the exhaustive lower-set enumeration.
pub const ENUMERATION_MAX_S: usize = 12;
/// Largest `d` accepted by the exhaustive lower-set enumeration.
pub const ENUMERATION_MAX_D: usize = 6;

/// A tuple of non-negative polynomial degrees, one per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument(
                "multi-index must have at least one entry".into(),
            ));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        MultiIndex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// `prod(i_l + 1)`, the hyperbolic-cross level of the index.
    pub fn cross_product(&self) -> usize {
        self.0.iter().map(|&i| i + 1).product()
    }

    /// Number of nonzero entries.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&i| i != 0).count()
    }

    pub fn max_degree(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad multi-index entry {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        MultiIndex::new(entries)
    }
}

/// Column order: `prod(i_l + 1)` ascending, then lexicographic.
pub fn column_order(a: &MultiIndex, b: &MultiIndex) -> Ordering {
    a.cross_product()
        .cmp(&b.cross_product())
        .then_with(|| a.0.cmp(&b.0))
}

/// Tensor polynomial family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Legendre,
    Chebyshev,
}

impl BasisKind {
    /// Growth exponent of the intrinsic lower sparsity, `K(s) ~ s^gamma`.
    pub fn gamma(self) -> f64 {
        match self {
            BasisKind::Legendre => 2.0,
            BasisKind::Chebyshev => 3f64.ln() / 2f64.ln(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Legendre => "legendre",
            BasisKind::Chebyshev => "chebyshev",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "legendre" => Ok(BasisKind::Legendre),
            "chebyshev" => Ok(BasisKind::Chebyshev),
            other => Err(Error::Parse(format!("unknown basis {other:?}"))),
        }
    }
}

/// `||phi_i||_inf` for the orthonormal tensor basis.
pub fn intrinsic_weight(kind: BasisKind, index: &MultiIndex) -> f64 {
    match kind {
        BasisKind::Legendre => index
            .entries()
            .iter()
            .map(|&i| ((2 * i + 1) as f64).sqrt())
            .product(),
        BasisKind::Chebyshev => 2f64.powf(index.support_size() as f64 / 2.0),
    }
}

/// An ordered set of distinct multi-indices of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    dim: usize,
    indices: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
}

impl IndexSet {
    /// Builds a set from arbitrary-order indices, sorting into column order.
    pub fn new(dim: usize, mut indices: Vec<MultiIndex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for idx in &indices {
            if idx.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: idx.dim(),
                });
            }
        }
        indices.sort_by(column_order);
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate multi-index ({})",
                w[0]
            )));
        }
        let positions = indices
            .iter()
            .enumerate()
            .map(|(j, idx)| (idx.clone(), j))
            .collect();
        Ok(IndexSet {
            dim,
            indices,
            positions,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.indices.iter()
    }

    pub fn get(&self, column: usize) -> Option<&MultiIndex> {
        self.indices.get(column)
    }

    pub fn position(&self, index: &MultiIndex) -> Option<usize> {
        self.positions.get(index).copied()
    }

    pub fn contains(&self, index: &MultiIndex) -> bool {
        self.positions.contains_key(index)
    }

    /// Largest degree appearing in any coordinate.
    pub fn max_degree(&self) -> usize {
        self.indices.iter().map(MultiIndex::max_degree).max().unwrap_or(0)
    }

    /// Intrinsic weights in column order.
    pub fn weights(&self, kind: BasisKind) -> Vec<f64> {
        self.indices
            .iter()
            .map(|idx| intrinsic_weight(kind, idx))
            .collect()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.indices.iter().all(|idx| other.contains(idx))
    }

    /// One line per index, space-separated entries, in column order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for idx in &self.indices {
            out.push_str(&idx.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the listing written by [`IndexSet::to_text`]. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let indices = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(MultiIndex::from_str)
            .collect::<Result<Vec<_>>>()?;
        let dim = indices
            .first()
            .map(MultiIndex::dim)
            .ok_or_else(|| Error::Parse("empty index-set listing".into()))?;
        IndexSet::new(dim, indices)
    }
}

/// The hyperbolic cross `{ i : prod(i_l + 1) <= s }` in `d` dimensions.
pub fn hyperbolic_cross(d: usize, s: usize) -> Result<IndexSet> {
    if d == 0 || s == 0 {
        return Err(Error::InvalidArgument(format!(
            "hyperbolic cross needs d >= 1 and s >= 1 (got d = {d}, s = {s})"
        )));
    }
    fn walk(coord: usize, bound: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if coord == current.len() {
            out.push(MultiIndex(current.clone()));
            return;
        }
        let mut i = 0;
        while i + 1 <= bound {
            current[coord] = i;
            walk(coord + 1, bound / (i + 1), current, out);
            i += 1;
        }
        current[coord] = 0;
    }
    let mut out = Vec::new();
    walk(0, s, &mut vec![0; d], &mut out);
    IndexSet::new(d, out)
}

/// Upper bound `min{2 s^3 4^d, e^2 s^(2 + log2 d)}` on the hyperbolic-cross size.
pub fn hyperbolic_cross_bound(d: usize, s: usize) -> f64 {
    let (d, s) = (d as f64, s as f64);
    let first = 2.0 * s.powi(3) * 4f64.powf(d);
    let second = std::f64::consts::E.powi(2) * s.powf(2.0 + d.log2());
    first.min(second)
}

/// True iff every componentwise predecessor of every member is a member.
pub fn is_lower_set(indices: &[MultiIndex]) -> bool {
    let members: HashSet<&[usize]> = indices.iter().map(|i| i.entries()).collect();
    indices.iter().all(|idx| {
        // checking immediate predecessors is enough by induction
        let mut probe = idx.entries().to_vec();
        (0..probe.len()).all(|l| {
            if probe[l] == 0 {
                return true;
            }
            probe[l] -= 1;
            let ok = members.contains(probe.as_slice());
            probe[l] += 1;
            ok
        })
    })
}

pub fn is_lower(set: &IndexSet) -> bool {
    is_lower_set(set.indices())
}

/// `sum u_i^2` over the set.
pub fn weighted_cardinality<'a>(
    indices: impl IntoIterator<Item = &'a MultiIndex>,
    kind: BasisKind,
) -> f64 {
    indices
        .into_iter()
        .map(|idx| intrinsic_weight(kind, idx).powi(2))
        .sum()
}

/// How `K(s)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SparsityMode {
    /// The upper bound `s^gamma`.
    #[default]
    Surrogate,
    /// Exhaustive maximisation over lower sets (small `s`, `d` only).
    Enumerate,
}

/// Intrinsic lower sparsity `K(s) = max { |S|_u : S lower, |S| <= s }`.
pub fn intrinsic_lower_sparsity(
    kind: BasisKind,
    s: usize,
    d: usize,
    mode: SparsityMode,
) -> Result<f64> {
    if s == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!(
            "K(s) needs s >= 1 and d >= 1 (got s = {s}, d = {d})"
        )));
    }
    match mode {
        SparsityMode::Surrogate => Ok((s as f64).powf(kind.gamma())),
        SparsityMode::Enumerate => {
            check_guard(s, d)?;
            let best = max_lower_sum(d, s, |idx| intrinsic_weight(kind, idx).powi(2));
            Ok(best)
        }
    }
}

/// Best `s`-term approximation error in lower sets, measured in the weighted
/// l1 norm: `min_{S lower, |S| <= s} sum_{i not in S} u_i |z_i|`.
///
/// Exhaustive; intended as a test oracle.
pub fn best_lower_s_term(z: &[f64], index_set: &IndexSet, s: usize, kind: BasisKind) -> Result<f64> {
    if z.len() != index_set.len() {
        return Err(Error::DimensionMismatch {
            expected: index_set.len(),
            found: z.len(),
        });
    }
    let d = index_set.dim();
    check_guard(s, d)?;
    let weighted: Vec<f64> = index_set
        .iter()
        .zip(z)
        .map(|(idx, &zi)| intrinsic_weight(kind, idx) * zi.abs())
        .collect();
    let total: f64 = weighted.iter().sum();
    if s == 0 {
        return Ok(total);
    }
    let kept = max_lower_sum(d, s, |idx| {
        index_set.position(idx).map_or(0.0, |j| weighted[j])
    });
    Ok((total - kept).max(0.0))
}

fn check_guard(s: usize, d: usize) -> Result<()> {
    if s > ENUMERATION_MAX_S || d > ENUMERATION_MAX_D {
        return Err(Error::EnumerationGuard {
            s,
            d,
            max_s: ENUMERATION_MAX_S,
            max_d: ENUMERATION_MAX_D,
        });
    }
    Ok(())
}

/// Calls `visit` once for every nonempty lower set in `d` dimensions with at
/// most `s` elements.
pub fn for_each_lower_set(d: usize, s: usize, mut visit: impl FnMut(&[MultiIndex])) -> Result<()> {
    check_guard(s, d)?;
    let mut scratch = Vec::new();
    enumerate_keys(d, s, &mut |keys| {
        scratch.clear();
        scratch.extend(keys.iter().map(|&k| decode(k, d)));
        visit(&scratch);
    });
    Ok(())
}

fn max_lower_sum(d: usize, s: usize, value: impl Fn(&MultiIndex) -> f64) -> f64 {
    let table: HashMap<u64, f64> = hyperbolic_cross(d, s)
        .expect("guarded d, s are positive")
        .iter()
        .map(|idx| (encode(idx.entries()), value(idx)))
        .collect();
    let mut best = 0.0f64;
    enumerate_keys(d, s, &mut |keys| {
        let total: f64 = keys.iter().map(|k| table[k]).sum();
        best = best.max(total);
    });
    best
}

// Packed representation used by the enumeration: 8 bits per coordinate.
const BITS: u32 = 8;

fn encode(entries: &[usize]) -> u64 {
    entries
        .iter()
        .enumerate()
        .fold(0u64, |acc, (l, &i)| acc | ((i as u64) << (BITS * l as u32)))
}

fn decode(key: u64, d: usize) -> MultiIndex {
    MultiIndex(
        (0..d)
            .map(|l| ((key >> (BITS * l as u32)) & 0xff) as usize)
            .collect(),
    )
}

fn coord(key: u64, l: usize) -> u64 {
    (key >> (BITS * l as u32)) & 0xff
}

fn key_le(a: u64, b: u64, d: usize) -> bool {
    (0..d).all(|l| coord(a, l) <= coord(b, l))
}

/// Reverse-search enumeration: every lower set `S` has the canonical parent
/// `S \ {max maximal element}`, so growing only by elements that become the
/// largest maximal element visits each set exactly once.
fn enumerate_keys(d: usize, s: usize, visit: &mut dyn FnMut(&[u64])) {
    fn grow(d: usize, s: usize, set: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64])) {
        visit(set);
        if set.len() == s {
            return;
        }
        let mut candidates: Vec<u64> = Vec::new();
        for &member in set.iter() {
            for l in 0..d {
                if coord(member, l) + 1 >= 1 << BITS {
                    continue;
                }
                let c = member + (1u64 << (BITS * l as u32));
                if set.binary_search(&c).is_ok() || candidates.contains(&c) {
                    continue;
                }
                let addable = (0..d).all(|k| {
                    coord(c, k) == 0 || set.binary_search(&(c - (1u64 << (BITS * k as u32)))).is_ok()
                });
                if addable {
                    candidates.push(c);
                }
            }
        }
        for c in candidates {
            // c must dominate every maximal element it does not cover
            let canonical = set.iter().all(|&m| {
                m < c || key_le(m, c, d) || !is_maximal(m, set, d)
            });
            if !canonical {
                continue;
            }
            let pos = set.binary_search(&c).unwrap_err();
            set.insert(pos, c);
            grow(d, s, set, visit);
            set.remove(pos);
        }
    }
    fn is_maximal(m: u64, set: &[u64], d: usize) -> bool {
        (0..d).all(|l| set.binary_search(&(m + (1u64 << (BITS * l as u32)))).is_err())
    }
    if s == 0 {
        return;
    }
    let mut set = vec![0u64];
    grow(d, s, &mut set, visit);
}

/// Grows a lower set of the requested cardinality by repeatedly adding a
/// uniformly chosen admissible index.
pub fn random_lower_set<R: Rng + ?Sized>(d: usize, cardinality: usize, rng: &mut R) -> Result<Vec<MultiIndex>> {
    if d == 0 || cardinality == 0 {
        return Err(Error::InvalidArgument(
            "random lower set needs d >= 1 and cardinality >= 1".into(),
        ));
    }
    let mut members: Vec<Vec<usize>> = vec![vec![0; d]];
    let mut lookup: HashSet<Vec<usize>> = members.iter().cloned().collect();
    while members.len() < cardinality {
        let mut margin: Vec<Vec<usize>> = Vec::new();
        for m in &members {
            for l in 0..d {
                let mut c = m.clone();
                c[l] += 1;
                if lookup.contains(&c) || margin.contains(&c) {
                    continue;
                }
                let admissible = (0..d).all(|k| {
                    if c[k] == 0 {
                        return true;
                    }
                    let mut p = c.clone();
                    p[k] -= 1;
                    lookup.contains(&p)
                });
                if admissible {
                    margin.push(c);
                }
            }
        }
        margin.sort();
        let pick = margin.swap_remove(rng.random_range(0..margin.len()));
        lookup.insert(pick.clone());
        members.push(pick);
    }
    let mut out: Vec<MultiIndex> = members.into_iter().map(MultiIndex).collect();
    out.sort_by(column_order);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(e: &[usize]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    #[test]
    fn one_dimensional_cross_is_an_interval() {
        let hc = hyperbolic_cross(1, 10).unwrap();
        let degrees: Vec<usize> = hc.iter().map(|i| i.entries()[0]).collect();
        assert_eq!(degrees, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn cross_rejects_zero_arguments() {
        assert!(hyperbolic_cross(0, 3).is_err());
        assert!(hyperbolic_cross(3, 0).is_err());
    }

    #[test]
    fn cross_matches_brute_force_filter() {
        for d in 1..=4 {
            for s in 1..=9 {
                let hc = hyperbolic_cross(d, s).unwrap();
                let mut count = 0;
                let mut idx = vec![0usize; d];
                loop {
                    if idx.iter().map(|i| i + 1).product::<usize>() <= s {
                        count += 1;
                        assert!(hc.contains(&mi(&idx)));
                    }
                    let mut l = 0;
                    while l < d {
                        idx[l] += 1;
                        if idx[l] < s {
                            break;
                        }
                        idx[l] = 0;
                        l += 1;
                    }
                    if l == d {
                        break;
                    }
                }
                assert_eq!(hc.len(), count, "d = {d}, s = {s}");
            }
        }
    }

    #[test]
    fn lower_set_examples() {
        assert!(is_lower_set(&[mi(&[0, 0])]));
        assert!(is_lower_set(&[mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1])]));
        assert!(!is_lower_set(&[mi(&[1, 0])]));
        assert!(!is_lower_set(&[mi(&[0, 0]), mi(&[1, 1]), mi(&[1, 0])]));
        assert!(is_lower_set(&[]));
    }

    #[test]
    fn intrinsic_weight_examples() {
        assert_eq!(intrinsic_weight(BasisKind::Legendre, &mi(&[0, 0, 0])), 1.0);
        let w = intrinsic_weight(BasisKind::Legendre, &mi(&[1, 0, 2]));
        assert!((w - 15f64.sqrt()).abs() < 1e-14);
        assert!((intrinsic_weight(BasisKind::Chebyshev, &mi(&[3, 0, 7])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_cardinality_examples() {
        assert_eq!(weighted_cardinality(&[], BasisKind::Legendre), 0.0);
        assert_eq!(weighted_cardinality(&[mi(&[0, 0])], BasisKind::Legendre), 1.0);
        let s = weighted_cardinality(&[mi(&[0]), mi(&[1])], BasisKind::Legendre);
        assert!((s - 4.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_values() {
        assert_eq!(BasisKind::Legendre.gamma(), 2.0);
        assert!((BasisKind::Chebyshev.gamma() - 1.584962500721156).abs() < 1e-15);
    }

    #[test]
    fn k_of_s_small_cases() {
        for d in 1..=4 {
            let k = intrinsic_lower_sparsity(BasisKind::Legendre, 1, d, SparsityMode::Enumerate).unwrap();
            assert_eq!(k, 1.0);
        }
        let k = intrinsic_lower_sparsity(BasisKind::Legendre, 2, 2, SparsityMode::Enumerate).unwrap();
        assert!((k - 4.0).abs() < 1e-12);
        let k = intrinsic_lower_sparsity(BasisKind::Chebyshev, 2, 2, SparsityMode::Enumerate).unwrap();
        assert!((k - 3.0).abs() < 1e-12);
        assert!((3.0 - 2f64.powf(BasisKind::Chebyshev.gamma())).abs() < 1e-12);
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(
            intrinsic_lower_sparsity(BasisKind::Legendre, 13, 2, SparsityMode::Enumerate),
            Err(Error::EnumerationGuard { .. })
        ));
        assert!(matches!(
            intrinsic_lower_sparsity(BasisKind::Legendre, 3, 7, SparsityMode::Enumerate),
            Err(Error::EnumerationGuard { .. })
        ));
        assert!(intrinsic_lower_sparsity(BasisKind::Legendre, 100, 30, SparsityMode::Surrogate).is_ok());
    }

    // Lower sets of size n in 2-D are integer partitions of n; in 3-D they
    // are plane partitions.
    #[test]
    fn enumeration_counts_match_partition_numbers() {
        let count = |d: usize, s: usize| {
            let mut by_size = vec![0usize; s + 1];
            for_each_lower_set(d, s, |set| by_size[set.len()] += 1).unwrap();
            by_size
        };
        assert_eq!(count(1, 6), vec![0, 1, 1, 1, 1, 1, 1]);
        assert_eq!(count(2, 8), vec![0, 1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(count(3, 7), vec![0, 1, 3, 6, 13, 24, 48, 86]);
    }

    #[test]
    fn enumerated_sets_are_lower_and_distinct() {
        let mut seen = HashSet::new();
        for_each_lower_set(3, 6, |set| {
            assert!(is_lower_set(set));
            let mut key: Vec<Vec<usize>> = set.iter().map(|i| i.entries().to_vec()).collect();
            key.sort();
            assert!(seen.insert(key));
        })
        .unwrap();
    }

    #[test]
    fn best_lower_s_term_examples() {
        let hc = hyperbolic_cross(2, 4).unwrap();
        let zero = vec![0.0; hc.len()];
        assert_eq!(best_lower_s_term(&zero, &hc, 2, BasisKind::Legendre).unwrap(), 0.0);

        // supported on the lower set {(0,0), (1,0)}
        let mut z = vec![0.0; hc.len()];
        z[hc.position(&mi(&[0, 0])).unwrap()] = 2.0;
        z[hc.position(&mi(&[1, 0])).unwrap()] = -1.0;
        assert_eq!(best_lower_s_term(&z, &hc, 2, BasisKind::Legendre).unwrap(), 0.0);

        // (0,1) carries weight sqrt(3); the best lower pair keeps {0, e_2}
        z[hc.position(&mi(&[0, 1])).unwrap()] = 3.0;
        let got = best_lower_s_term(&z, &hc, 2, BasisKind::Legendre).unwrap();
        assert!((got - 3f64.sqrt()).abs() < 1e-12, "{got}");
        let full = best_lower_s_term(&z, &hc, 0, BasisKind::Legendre).unwrap();
        assert!((full - (2.0 + 3f64.sqrt() + 3.0 * 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn text_listing_round_trip() {
        let hc = hyperbolic_cross(3, 6).unwrap();
        let back = IndexSet::from_text(&hc.to_text()).unwrap();
        assert_eq!(back.indices(), hc.indices());
        assert!(IndexSet::from_text("0 0\n1\n").is_err());
        assert!(IndexSet::from_text("0 0\n0 0\n").is_err());
        assert!(IndexSet::from_text("").is_err());
    }

    #[test]
    fn column_order_sorts_by_cross_product_first() {
        let hc = hyperbolic_cross(2, 6).unwrap();
        let first: Vec<String> = hc.iter().take(4).map(|i| i.to_string()).collect();
        assert_eq!(first, vec!["0 0", "0 1", "1 0", "0 2"]);
    }

    #[test]
    fn random_lower_set_has_requested_size() {
        let mut rng = crate::rng::seeded(11);
        for card in 1..=12 {
            let set = random_lower_set(4, card, &mut rng).unwrap();
            assert_eq!(set.len(), card);
            assert!(is_lower_set(&set));
        }
    }
}
