//! First-page code: constant-weight blocks placed on chosen support positions.
//!
//! A block of weight `u` is the set of every weight-`u` word whose ones fall
//! inside a fixed support of `2u - 1` positions. Any pair `{b, 1 ⊕ b}` puts at
//! least `u` ones on those positions in one of its members, so each block sits
//! under every second-page message. Blocks of equal weight are disjoint exactly
//! when their supports share at most `u - 1` positions.

use std::fmt;

use itertools::Itertools;

use crate::bits::{all_of_weight, BitVector, ConstituentCode};
use crate::error::{Error, Result};
use crate::page_two::check_code_len;
use crate::patterns::PatternFamily;

/// Largest weight parameter allowed at length `n`, `⌈n/2⌉`.
pub fn max_weight(n: usize) -> usize {
    n.div_ceil(2)
}

/// Support size `m = 2u - 1` of a weight-`u` block; zero for `u = 0`.
pub fn span(u: usize) -> usize {
    (2 * u).saturating_sub(1)
}

/// The set of non-zero column positions of one first-page block.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PermutationPattern {
    u: usize,
    support: BitVector,
}

impl PermutationPattern {
    pub fn new(n: usize, u: usize, positions: &[usize]) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidPattern { u, n, reason };
        if u > max_weight(n) {
            return Err(invalid(format!("u exceeds ⌈n/2⌉ = {}", max_weight(n))));
        }
        if positions.len() != span(u) {
            return Err(invalid(format!(
                "expected {} positions, got {}",
                span(u),
                positions.len()
            )));
        }
        if let Some(p) = positions.iter().find(|&&p| p >= n) {
            return Err(invalid(format!("position {p} not below n")));
        }
        if !positions.iter().all_unique() {
            return Err(invalid("repeated position".into()));
        }
        let support =
            BitVector::from_positions(n, positions).map_err(|_| Error::InvalidLength(n))?;
        Ok(Self { u, support })
    }

    /// The pattern occupying the leftmost `2u - 1` positions.
    pub fn identity(n: usize, u: usize) -> Result<Self> {
        Self::new(n, u, &(0..span(u)).collect::<Vec<_>>())
    }

    pub(crate) fn from_support(u: usize, support: BitVector) -> Self {
        debug_assert_eq!(support.weight(), span(u));
        Self { u, support }
    }

    pub fn n(&self) -> usize {
        self.support.len()
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn positions(&self) -> Vec<usize> {
        self.support.support()
    }

    /// Indicator word of the positions.
    pub fn support(&self) -> BitVector {
        self.support
    }

    /// Number of positions shared with `other`.
    pub fn overlap(&self, other: &Self) -> usize {
        (self.support.value() & other.support.value()).count_ones() as usize
    }

    /// The block: all length-`n`, weight-`u` words supported inside the pattern.
    ///
    /// Rows of the core matrix for `u` are scattered column by column onto the
    /// pattern positions, which is the column permutation of the zero-padded
    /// core matrix restricted to its rows.
    pub fn code(&self) -> ConstituentCode {
        let n = self.n();
        let positions = self.positions();
        let rows: Vec<BitVector> = if self.u == 0 {
            vec![BitVector::from_raw(n, 0)]
        } else {
            CoreMatrix::new(self.u)
                .expect("u >= 1")
                .rows()
                .iter()
                .map(|row| {
                    let bits = (0..row.len())
                        .filter(|&col| row.get(col))
                        .fold(0u32, |acc, col| acc | 1 << (n - 1 - positions[col]));
                    BitVector::from_raw(n, bits)
                })
                .collect()
        };
        ConstituentCode::new(rows).expect("non-empty block")
    }
}

impl PartialOrd for PermutationPattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on `(n, u, sorted positions)`.
impl Ord for PermutationPattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n(), self.u, self.positions()).cmp(&(other.n(), other.u, other.positions()))
    }
}

impl fmt::Debug for PermutationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Π{:?}", self.positions())
    }
}

/// All weight-`u` words of length `2u - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreMatrix {
    u: usize,
    rows: Vec<BitVector>,
}

impl CoreMatrix {
    pub fn new(u: usize) -> Result<Self> {
        if u == 0 {
            return Err(Error::InvalidWeight(u));
        }
        let rows = all_of_weight(span(u), u)?;
        Ok(Self { u, rows })
    }

    pub fn u(&self) -> usize {
        self.u
    }

    /// Row count `t_c = C(2u-1, u)`.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }
}

/// Supplemental first-page message for even `n`: the complements of the
/// half-weight block on `{0, .., n-2}` together with every word of weight `n/2 + 1`.
pub fn supplemental_code(n: usize) -> Result<ConstituentCode> {
    supplemental_for(&PermutationPattern::identity(n, n / 2)?)
}

fn supplemental_for(half: &PermutationPattern) -> Result<ConstituentCode> {
    let n = half.n();
    if n % 2 == 1 {
        return Err(Error::OddLength(n));
    }
    if half.u() != n / 2 {
        return Err(Error::InvalidPattern {
            u: half.u(),
            n,
            reason: "supplemental set needs the half-weight pattern".into(),
        });
    }
    let mut vectors: Vec<BitVector> = half.code().iter().map(|a| a.complement()).collect();
    vectors.extend(all_of_weight(n, n / 2 + 1)?);
    ConstituentCode::new(vectors)
}

/// One block of the first page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageOneEntry {
    pub u: usize,
    pub pattern: PermutationPattern,
    pub code: ConstituentCode,
}

/// First-page code: blocks ordered by weight then pattern order, with the
/// supplemental message last for even `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageOneCode {
    n: usize,
    entries: Vec<PageOneEntry>,
    supplemental: Option<ConstituentCode>,
}

impl PageOneCode {
    /// Assembles the first page from one pattern family per weight `0..=⌈n/2⌉`.
    pub fn build(n: usize, families: &[PatternFamily]) -> Result<Self> {
        check_code_len(n)?;
        let top = max_weight(n);
        let mut by_weight: Vec<Option<&PatternFamily>> = vec![None; top + 1];
        for family in families {
            if family.n() != n {
                return Err(Error::FamilyRejected(format!(
                    "family for u={} built for n={}, expected n={n}",
                    family.u(),
                    family.n()
                )));
            }
            let slot = by_weight.get_mut(family.u()).ok_or_else(|| {
                Error::FamilyRejected(format!("u={} exceeds ⌈n/2⌉={top}", family.u()))
            })?;
            if slot.replace(family).is_some() {
                return Err(Error::FamilyRejected(format!(
                    "two families given for u={}",
                    family.u()
                )));
            }
        }

        let mut entries = Vec::new();
        for (u, family) in by_weight.into_iter().enumerate() {
            let family = family
                .ok_or_else(|| Error::FamilyRejected(format!("no family given for u={u}")))?;
            family
                .verify()
                .map_err(|violation| Error::FamilyRejected(violation.to_string()))?;
            if u == top && family.len() != 1 {
                return Err(Error::FamilyRejected(format!(
                    "u=⌈n/2⌉={u} takes exactly one pattern, got {}",
                    family.len()
                )));
            }
            entries.extend(family.patterns().iter().map(|pattern| PageOneEntry {
                u,
                pattern: *pattern,
                code: pattern.code(),
            }));
        }

        let supplemental = if n.is_multiple_of(2) {
            let half = entries.last().expect("top weight present").pattern;
            Some(supplemental_for(&half)?)
        } else {
            None
        };
        Ok(Self {
            n,
            entries,
            supplemental,
        })
    }

    /// Assembles a first page without validating it, for loaded or deliberately
    /// corrupted codes. The verifier decides whether the result is usable.
    pub fn from_parts(
        n: usize,
        entries: Vec<PageOneEntry>,
        supplemental: Option<ConstituentCode>,
    ) -> Result<Self> {
        check_code_len(n)?;
        for code in entries.iter().map(|e| &e.code).chain(supplemental.as_ref()) {
            if code.word_len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: code.word_len(),
                });
            }
        }
        Ok(Self {
            n,
            entries,
            supplemental,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[PageOneEntry] {
        &self.entries
    }

    pub fn supplemental(&self) -> Option<&ConstituentCode> {
        self.supplemental.as_ref()
    }

    /// `M_1`: block count plus one when the supplemental message is present.
    pub fn message_count(&self) -> usize {
        self.entries.len() + usize::from(self.supplemental.is_some())
    }

    /// Message constituent codes in message-index order.
    pub fn messages(&self) -> impl Iterator<Item = &ConstituentCode> {
        self.entries
            .iter()
            .map(|e| &e.code)
            .chain(self.supplemental.as_ref())
    }

    pub fn message(&self, i: usize) -> Option<&ConstituentCode> {
        match i.cmp(&self.entries.len()) {
            std::cmp::Ordering::Less => Some(&self.entries[i].code),
            std::cmp::Ordering::Equal => self.supplemental.as_ref(),
            std::cmp::Ordering::Greater => None,
        }
    }

    pub(crate) fn message_mut(&mut self, i: usize) -> Option<&mut ConstituentCode> {
        match i.cmp(&self.entries.len()) {
            std::cmp::Ordering::Less => Some(&mut self.entries[i].code),
            std::cmp::Ordering::Equal => self.supplemental.as_mut(),
            std::cmp::Ordering::Greater => None,
        }
    }

    /// Replaces the constituent code of message `i`.
    pub fn replace_message(&mut self, i: usize, code: ConstituentCode) -> Result<()> {
        let n = self.n;
        let count = self.message_count();
        if code.word_len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: code.word_len(),
            });
        }
        let slot = self.message_mut(i).ok_or(Error::MessageOutOfRange {
            page: 1,
            index: i,
            count,
        })?;
        *slot = code;
        Ok(())
    }
}
