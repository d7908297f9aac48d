//! Permutations, cycle types, Young subgroups `H = prod_i S_{r_i}^{d_i}` and
//! the block-cycling permutation `tau`.
//!
//! Composition is right to left: `(s.compose(p))(x) = s(p(x))`.
//!
//! The index set `T` of a [`CosetSpec`] consists of triples `(i, j, k)` with
//! `i` a block, `j < r_i` and `k < d_i`. It is flattened to `0..N`
//! lexicographically, so `(i, j, k)` sits at `offset_i + j * d_i + k`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{cap_exceeded, Error, Result};

/// Default limit on brute-force enumeration sizes.
pub const DEFAULT_BRUTE_FORCE_CAP: u64 = 1_000_000;

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

pub(crate) fn factorial_u64(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({:?})", self.images)
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation without fixed points, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.images.len()];
        let mut wrote = false;
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x.to_string());
                x = self.images[x];
            }
            write!(f, "({})", cycle.join(" "))?;
            wrote = true;
        }
        if !wrote {
            f.write_str("()")?;
        }
        Ok(())
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut hit = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut hit[x], true) {
                return Err(Error::Invalid(format!("{images:?} is not a bijection")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation of `0..n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (pos, &x) in cycle.iter().enumerate() {
                if x >= n || std::mem::replace(&mut used[x], true) {
                    return Err(Error::Invalid(format!("cycles {cycles:?} are not disjoint in 0..{n}")));
                }
                images[x] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// The permutation at position `rank` in lexicographic order of image vectors.
    pub fn from_rank(n: usize, mut rank: u64) -> Self {
        let mut available: Vec<usize> = (0..n).collect();
        let mut images = Vec::with_capacity(n);
        for i in 0..n {
            let block = factorial_u64(n - 1 - i).expect("rank fits in u64");
            let pick = (rank / block) as usize;
            rank %= block;
            images.push(available.remove(pick));
        }
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Invalid(format!(
                "cannot compose permutations of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    pub fn cycle_type(&self) -> MultiIndex {
        let mut seen = vec![false; self.len()];
        let mut lengths = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            lengths.push(len);
        }
        MultiIndex::from_parts(lengths)
    }
}

pub fn cycle_type(sigma: &Permutation) -> MultiIndex {
    sigma.cycle_type()
}

/// All `n!` permutations in lexicographic order.
pub fn enumerate_sn(n: usize, cap: u64) -> Result<Vec<Permutation>> {
    let total = factorial_u64(n)
        .filter(|&t| t <= cap)
        .ok_or_else(|| cap_exceeded("enumerating S_n", factorial(n), cap))?;
    Ok((0..total).map(|r| Permutation::from_rank(n, r)).collect())
}

/// Sparse multi-index `mu = (mu_1, mu_2, ...)`; doubles as a cycle type.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    entries: Vec<(usize, usize)>,
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiIndex({self})")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.entries.iter().map(|(k, m)| format!("{k}:{m}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// `"1:2,2:1"`, optionally prefixed by `mu=`; `""` and `"0"` are empty.
    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.strip_prefix("mu=").unwrap_or(&s);
        if s.is_empty() || s == "0" {
            return Ok(MultiIndex::empty());
        }
        let mut pairs = Vec::new();
        for item in s.split(',') {
            let (k, m) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected k:count, got '{item}'")))?;
            let parse = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad number '{v}' in multi-index '{s}'")))
            };
            pairs.push((parse(k)?, parse(m)?));
        }
        MultiIndex::new(pairs)
    }
}

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex::default()
    }

    /// From `(k, mu_k)` pairs in any order; repeated `k` are summed and zero
    /// counts dropped.
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, m) in pairs {
            if k == 0 {
                return Err(Error::Invalid("cycle length must be at least 1".into()));
            }
            *map.entry(k).or_insert(0) += m;
        }
        Ok(MultiIndex {
            entries: map.into_iter().filter(|&(_, m)| m > 0).collect(),
        })
    }

    /// `{k: 1}`.
    pub fn single(k: usize) -> Self {
        assert!(k >= 1, "cycle length must be at least 1");
        MultiIndex {
            entries: vec![(k, 1)],
        }
    }

    /// Multi-index counting the given part sizes (zeros ignored).
    pub fn from_parts(parts: impl IntoIterator<Item = usize>) -> Self {
        let mut map = BTreeMap::new();
        for k in parts.into_iter().filter(|&k| k > 0) {
            *map.entry(k).or_insert(0usize) += 1;
        }
        MultiIndex {
            entries: map.into_iter().collect(),
        }
    }

    /// Ascending `(k, mu_k)` with every `mu_k >= 1`.
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> usize {
        self.entries
            .binary_search_by_key(&k, |&(kk, _)| kk)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `||mu|| = sum k mu_k`.
    pub fn norm(&self) -> usize {
        self.entries.iter().map(|&(k, m)| k * m).sum()
    }

    /// `sum mu_k`, the number of selected cycles.
    pub fn length(&self) -> usize {
        self.entries.iter().map(|&(_, m)| m).sum()
    }

    /// Entrywise sum.
    pub fn plus(&self, other: &Self) -> Self {
        MultiIndex::new(self.entries.iter().chain(&other.entries).copied())
            .expect("entries are valid")
    }

    /// All multi-indices of norm exactly `n` (the partitions of `n`), in
    /// ascending order.
    pub fn all_of_norm(n: usize) -> Vec<MultiIndex> {
        fn go(rest: usize, max_part: usize, parts: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if rest == 0 {
                out.push(MultiIndex::from_parts(parts.iter().copied()));
                return;
            }
            for k in (1..=max_part.min(rest)).rev() {
                parts.push(k);
                go(rest - k, k, parts, out);
                parts.pop();
            }
        }
        let mut out = Vec::new();
        go(n, n, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// All multi-indices with norm at most `n`, grouped by norm.
    pub fn all_up_to_norm(n: usize) -> Vec<MultiIndex> {
        (0..=n).flat_map(MultiIndex::all_of_norm).collect()
    }
}

/// `N! / prod_k (k^{mu_k} mu_k!)`.
pub fn conjugacy_class_size(mu: &MultiIndex, n: usize) -> Result<BigUint> {
    if mu.norm() != n {
        return Err(Error::NormMismatch { norm: mu.norm(), size: n });
    }
    let denom = mu.entries.iter().fold(BigUint::one(), |acc, &(k, m)| {
        acc * BigUint::from(k).pow(m as u32) * factorial(m)
    });
    Ok(factorial(n) / denom)
}

/// One factor group `S_r^d` of a Young subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    /// Number of cyclically permuted copies.
    pub d: usize,
    /// Rank of each symmetric group copy.
    pub r: usize,
}

/// A Young subgroup together with its block-cycling permutation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetSpec {
    blocks: Vec<Block>,
}

impl fmt::Display for CosetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| format!("{}^{}", b.d, b.r)).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for CosetSpec {
    type Err = Error;

    /// `"d1^r1,d2^r2,..."`, optionally prefixed by `blocks=`.
    fn from_str(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.strip_prefix("blocks=").unwrap_or(&s);
        if s.is_empty() {
            return CosetSpec::new(Vec::new());
        }
        let mut blocks = Vec::new();
        for item in s.split(',') {
            let (d, r) = item
                .split_once('^')
                .ok_or_else(|| Error::Parse(format!("expected d^r, got '{item}'")))?;
            let parse = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad number '{v}' in block '{item}'")))
            };
            blocks.push(Block { d: parse(d)?, r: parse(r)? });
        }
        CosetSpec::new(blocks)
    }
}

/// An element of `H`: one permutation of `0..r_i` per slot `(i, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HElement {
    /// `slots[i][k]` acts on the `j` coordinate of the points `(i, j, k)`.
    pub slots: Vec<Vec<Permutation>>,
}

impl CosetSpec {
    /// Blocks are sorted into canonical `(d, r)` order.
    pub fn new(mut blocks: Vec<Block>) -> Result<Self> {
        if let Some(b) = blocks.iter().find(|b| b.d == 0 || b.r == 0) {
            return Err(Error::Invalid(format!("block {}^{} needs d, r >= 1", b.d, b.r)));
        }
        blocks.sort();
        Ok(CosetSpec { blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `N = sum d_i r_i`.
    pub fn size(&self) -> usize {
        self.blocks.iter().map(|b| b.d * b.r).sum()
    }

    /// `|H| = prod (r_i!)^{d_i}`.
    pub fn h_order(&self) -> BigUint {
        self.blocks
            .iter()
            .fold(BigUint::one(), |acc, b| acc * factorial(b.r).pow(b.d as u32))
    }

    /// `|H|` when it is at most `cap`.
    pub fn h_order_within(&self, cap: u64) -> Result<u64> {
        let order = self.h_order();
        order
            .to_u64()
            .filter(|&h| h <= cap)
            .ok_or_else(|| cap_exceeded("enumerating the Young subgroup", order, cap))
    }

    fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let here = *acc;
                *acc += b.d * b.r;
                Some(here)
            })
            .collect()
    }

    /// Flattened position of `(i, j, k)`.
    pub fn point(&self, i: usize, j: usize, k: usize) -> usize {
        let b = self.blocks[i];
        debug_assert!(j < b.r && k < b.d);
        self.offsets()[i] + j * b.d + k
    }

    /// `tau: (i, j, k) -> (i, j, k + 1 mod d_i)`.
    pub fn tau(&self) -> Permutation {
        let mut images = Vec::with_capacity(self.size());
        for b in &self.blocks {
            let base = images.len();
            for j in 0..b.r {
                for k in 0..b.d {
                    images.push(base + j * b.d + (k + 1) % b.d);
                }
            }
        }
        Permutation { images }
    }

    /// Decodes the `index`-th element of `H`. The slot `(0, 0)` varies
    /// fastest, each slot ranging over `S_{r_i}` in lexicographic order.
    pub fn h_element(&self, mut index: u64) -> HElement {
        let mut slots = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let radix = factorial_u64(b.r).expect("block rank is small");
            let row = (0..b.d)
                .map(|_| {
                    let digit = index % radix;
                    index /= radix;
                    Permutation::from_rank(b.r, digit)
                })
                .collect();
            slots.push(row);
        }
        HElement { slots }
    }

    fn check_shape(&self, h: &HElement) -> Result<()> {
        let ok = h.slots.len() == self.blocks.len()
            && h.slots.iter().zip(&self.blocks).all(|(row, b)| {
                row.len() == b.d && row.iter().all(|p| p.len() == b.r)
            });
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!("element does not have the shape of H for {self}")))
        }
    }

    /// `h` as a permutation of `0..N`: `(i, j, k) -> (i, h_{i,k}(j), k)`.
    pub fn embed(&self, h: &HElement) -> Result<Permutation> {
        self.check_shape(h)?;
        let mut images = Vec::with_capacity(self.size());
        for (b, row) in self.blocks.iter().zip(&h.slots) {
            let base = images.len();
            for j in 0..b.r {
                for (k, slot) in row.iter().enumerate() {
                    images.push(base + slot.apply(j) * b.d + k);
                }
            }
        }
        Ok(Permutation { images })
    }

    /// `m_i(h) = h_{i,d_i-1} ∘ ... ∘ h_{i,0}`.
    pub fn m_projection(&self, h: &HElement, i: usize) -> Result<Permutation> {
        self.check_shape(h)?;
        let row = h.slots.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.blocks.len(),
        })?;
        let mut acc = Permutation::identity(self.blocks[i].r);
        for slot in row {
            acc = slot.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Cycle type of `tau ∘ h`, walking the triples `(i, j, k)` directly
    /// rather than the flattened permutation.
    pub fn tau_h_cycle_type(&self, h: &HElement) -> Result<MultiIndex> {
        self.check_shape(h)?;
        let mut lengths = Vec::new();
        for (b, row) in self.blocks.iter().zip(&h.slots) {
            let mut seen = vec![vec![false; b.d]; b.r];
            for j0 in 0..b.r {
                for k0 in 0..b.d {
                    if seen[j0][k0] {
                        continue;
                    }
                    let (mut j, mut k, mut len) = (j0, k0, 0);
                    while !seen[j][k] {
                        seen[j][k] = true;
                        j = row[k].apply(j);
                        k = (k + 1) % b.d;
                        len += 1;
                    }
                    lengths.push(len);
                }
            }
        }
        Ok(MultiIndex::from_parts(lengths))
    }

    /// Every nonempty spec with `N <= max_n` and `|H| <= h_cap`, in canonical order.
    pub fn enumerate_all(max_n: usize, h_cap: u64) -> Vec<CosetSpec> {
        let kinds: Vec<Block> = (1..=max_n)
            .flat_map(|d| (1..=max_n / d).map(move |r| Block { d, r }))
            .collect();
        fn go(
            kinds: &[Block],
            start: usize,
            room: usize,
            h_cap: u64,
            current: &mut Vec<Block>,
            out: &mut Vec<CosetSpec>,
        ) {
            if !current.is_empty() {
                let spec = CosetSpec { blocks: current.clone() };
                if spec.h_order() <= BigUint::from(h_cap) {
                    out.push(spec);
                } else {
                    return;
                }
            }
            for (idx, &b) in kinds.iter().enumerate().skip(start) {
                if b.d * b.r <= room {
                    current.push(b);
                    go(kinds, idx, room - b.d * b.r, h_cap, current, out);
                    current.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(&kinds, 0, max_n, h_cap, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

/// All of `H` as permutations of `0..N`, together with `tau`.
pub fn spec_embed(spec: &CosetSpec, cap: u64) -> Result<(Vec<Permutation>, Permutation)> {
    let order = spec.h_order_within(cap)?;
    let h = (0..order)
        .map(|idx| spec.embed(&spec.h_element(idx)))
        .collect::<Result<Vec<_>>>()?;
    Ok((h, spec.tau()))
}
