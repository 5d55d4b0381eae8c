//! Fixed-length binary words, cell states over three levels, and sets of words.
//!
//! Coordinates are numbered from the left as printed: position 0 is the first
//! character of the textual form and the most significant bit of the integer
//! value. `"011"` is therefore the value 3 with a 1 at positions 1 and 2.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Longest supported word. Keeps every vector inside one `u32`.
pub const MAX_LEN: usize = 24;

/// Number of programmable levels per cell.
pub const LEVELS: u8 = 3;

/// A binary word of length `1..=MAX_LEN`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    // Field order gives the derived ordering: length first, then integer value.
    len: u8,
    bits: u32,
}

impl BitVector {
    /// Builds a vector from its integer value (position 0 = most significant bit).
    pub fn new(len: usize, value: u32) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::InvalidLength(len));
        }
        if len < 32 && value >> len != 0 {
            return Err(Error::Parse {
                what: "bit vector",
                input: format!("value {value} for length {len}"),
            });
        }
        Ok(Self {
            len: len as u8,
            bits: value,
        })
    }

    pub(crate) const fn from_raw(len: usize, bits: u32) -> Self {
        Self {
            len: len as u8,
            bits,
        }
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(len, 0)
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::new(len, full_mask(len))
    }

    /// The vector with ones exactly at `positions`.
    pub fn from_positions(len: usize, positions: &[usize]) -> Result<Self> {
        let mut v = Self::zeros(len)?;
        for &p in positions {
            if p >= len {
                return Err(Error::Parse {
                    what: "bit vector",
                    input: format!("position {p} for length {len}"),
                });
            }
            v.bits |= 1 << (len - 1 - p);
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Integer value, reading position 0 as the most significant bit.
    pub fn value(&self) -> u32 {
        self.bits
    }

    pub fn get(&self, position: usize) -> bool {
        assert!(position < self.len(), "position {position} out of range");
        (self.bits >> (self.len() - 1 - position)) & 1 == 1
    }

    /// Positions holding a 1, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.get(p)).collect()
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Coordinatewise flip, `1 ⊕ v`.
    pub fn complement(&self) -> Self {
        Self {
            len: self.len,
            bits: !self.bits & full_mask(self.len()),
        }
    }

    /// `self ≤ other` coordinatewise.
    pub fn is_included_in(&self, other: &Self) -> Result<bool> {
        check_len(self.len(), other.len())?;
        Ok(self.covered_by(other))
    }

    /// Unchecked inclusion test for callers that already matched lengths.
    #[inline]
    pub(crate) fn covered_by(&self, other: &Self) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.bits & !other.bits == 0
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 0..self.len() {
            f.write_str(if self.get(p) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse {
            what: "bit vector",
            input: s.to_string(),
        };
        if s.is_empty() || s.len() > MAX_LEN {
            return Err(err());
        }
        let mut bits = 0u32;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(err()),
                };
        }
        Ok(Self::from_raw(s.len(), bits))
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A programmed cell configuration, one level in `{0, 1, 2}` per cell.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellState {
    levels: Vec<u8>,
}

impl CellState {
    pub fn new(levels: Vec<u8>) -> Result<Self> {
        if levels.is_empty() || levels.len() > MAX_LEN {
            return Err(Error::InvalidLength(levels.len()));
        }
        if levels.iter().any(|&l| l >= LEVELS) {
            return Err(Error::Parse {
                what: "cell state",
                input: format!("{levels:?}"),
            });
        }
        Ok(Self { levels })
    }

    /// The erased state of `len` cells.
    pub fn erased(len: usize) -> Result<Self> {
        Self::new(vec![0; len])
    }

    /// Stacks two page words: level `i` is `lower_i + upper_i`.
    pub fn from_pages(lower: &BitVector, upper: &BitVector) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        let levels = (0..lower.len())
            .map(|p| lower.get(p) as u8 + upper.get(p) as u8)
            .collect();
        Ok(Self { levels })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    /// Senses every cell against threshold `r`: coordinate `i` is 1 iff level `i >= r`.
    pub fn threshold_read(&self, r: u8) -> Result<BitVector> {
        if r == 0 || r >= LEVELS {
            return Err(Error::InvalidThreshold(r));
        }
        let n = self.len();
        let bits = self
            .levels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l >= r)
            .fold(0u32, |acc, (p, _)| acc | 1 << (n - 1 - p));
        Ok(BitVector::from_raw(n, bits))
    }
}

impl fmt::Display for CellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.levels {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellState({self})")
    }
}

impl FromStr for CellState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let levels = s
            .chars()
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                '2' => Some(2),
                _ => None,
            })
            .collect::<Option<Vec<u8>>>()
            .filter(|l| !l.is_empty() && l.len() <= MAX_LEN)
            .ok_or_else(|| Error::Parse {
                what: "cell state",
                input: s.to_string(),
            })?;
        Ok(Self { levels })
    }
}

impl Serialize for CellState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A non-empty set of equal-length words standing for one message of one page.
///
/// Vectors are kept sorted by integer value with duplicates removed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConstituentCode {
    len: usize,
    vectors: Vec<BitVector>,
}

impl ConstituentCode {
    pub fn new(mut vectors: Vec<BitVector>) -> Result<Self> {
        let len = vectors.first().ok_or(Error::EmptyCode)?.len();
        if let Some(v) = vectors.iter().find(|v| v.len() != len) {
            return Err(Error::LengthMismatch {
                left: len,
                right: v.len(),
            });
        }
        vectors.sort_unstable();
        vectors.dedup();
        Ok(Self { len, vectors })
    }

    /// Word length shared by every member.
    pub fn word_len(&self) -> usize {
        self.len
    }

    /// Number of member vectors.
    pub fn size(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[BitVector] {
        &self.vectors
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BitVector> {
        self.vectors.iter()
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.vectors.binary_search(v).is_ok()
    }

    /// True when the two sets share at least one vector.
    pub fn intersects(&self, other: &Self) -> bool {
        self.first_common(other).is_some()
    }

    /// Smallest vector present in both sets.
    pub fn first_common(&self, other: &Self) -> Option<BitVector> {
        let (mut i, mut j) = (0, 0);
        while i < self.vectors.len() && j < other.vectors.len() {
            match self.vectors[i].cmp(&other.vectors[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(self.vectors[i]),
            }
        }
        None
    }

    /// Set inclusion `self ≤ other`: some member of `self` lies under some member of `other`.
    pub fn is_included_in(&self, other: &Self) -> Result<bool> {
        check_len(self.len, other.len)?;
        Ok(self.witness_under(other).is_some())
    }

    /// First `(a, b)` with `a ∈ self`, `b ∈ other`, `a ≤ b`, scanning `self` in order.
    pub fn witness_under(&self, other: &Self) -> Option<(BitVector, BitVector)> {
        self.vectors.iter().find_map(|a| {
            other
                .vectors
                .iter()
                .find(|b| a.covered_by(b))
                .map(|b| (*a, *b))
        })
    }

    pub(crate) fn remove(&mut self, v: &BitVector) -> bool {
        match self.vectors.binary_search(v) {
            Ok(i) if self.vectors.len() > 1 => {
                self.vectors.remove(i);
                true
            }
            _ => false,
        }
    }

    pub(crate) fn insert(&mut self, v: BitVector) -> Result<bool> {
        check_len(self.len, v.len())?;
        match self.vectors.binary_search(&v) {
            Ok(_) => Ok(false),
            Err(i) => {
                self.vectors.insert(i, v);
                Ok(true)
            }
        }
    }
}

impl fmt::Debug for ConstituentCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.vectors.iter().map(|v| v.to_string()))
            .finish()
    }
}

impl<'a> IntoIterator for &'a ConstituentCode {
    type Item = &'a BitVector;
    type IntoIter = std::slice::Iter<'a, BitVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.vectors.iter()
    }
}

/// All vectors of length `len` and weight `weight`, ascending by value.
pub fn all_of_weight(len: usize, weight: usize) -> Result<Vec<BitVector>> {
    if len == 0 || len > MAX_LEN {
        return Err(Error::InvalidLength(len));
    }
    if weight > len {
        return Ok(Vec::new());
    }
    Ok((0..=full_mask(len))
        .filter(|v| v.count_ones() as usize == weight)
        .map(|v| BitVector::from_raw(len, v))
        .collect())
}

pub(crate) fn full_mask(len: usize) -> u32 {
    if len >= 32 {
        u32::MAX
    } else {
        (1u32 << len) - 1
    }
}

pub(crate) fn check_len(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left, right })
    }
}
