//! Families of support patterns with bounded pairwise overlap.
//!
//! Weight-`u` blocks on supports `S`, `S'` (each of size `2u - 1`) are disjoint
//! iff `|S ∩ S'| <= u - 1`. A family is therefore a constant-weight code of
//! length `n`, weight `2u - 1` and minimum distance `2u`, and the search for a
//! large family is a maximum clique problem on the compatibility graph of the
//! `C(n, 2u-1)` candidate supports.

use std::collections::HashSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::page_one::{max_weight, span, PermutationPattern};

/// Largest candidate count the exact search accepts.
pub const EXACT_CANDIDATE_LIMIT: u64 = 100_000;

/// Default node budget for the branch-and-bound phase of [`search_exact`].
pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Node budget for each symmetric seeding run.
const SEED_BUDGET: u64 = 100_000;

/// Symmetric seeding is skipped for groups with more orbits than this.
const SEED_ORBIT_LIMIT: usize = 2_500;

/// The colouring bound is only computed for candidate sets up to this size.
const COLOUR_LIMIT: usize = 384;

/// Where a family came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    BuiltinTable,
    Greedy,
    Exact,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::BuiltinTable => "builtin-table",
            Provenance::Greedy => "greedy",
            Provenance::Exact => "exact",
        })
    }
}

/// Ordered support patterns for one `(u, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternFamily {
    n: usize,
    u: usize,
    provenance: Provenance,
    patterns: Vec<PermutationPattern>,
    /// Trailing patterns that were found by search rather than transcribed.
    search_completed: usize,
}

/// Why a family fails the overlap condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyViolation {
    Malformed {
        index: usize,
        reason: String,
    },
    Overlap {
        first: usize,
        second: usize,
        shared: usize,
        limit: usize,
    },
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyViolation::Malformed { index, reason } => {
                write!(f, "pattern {index} malformed: {reason}")
            }
            FamilyViolation::Overlap {
                first,
                second,
                shared,
                limit,
            } => write!(
                f,
                "patterns {first} and {second} share {shared} positions (limit {limit})"
            ),
        }
    }
}

impl PatternFamily {
    pub fn new(
        n: usize,
        u: usize,
        provenance: Provenance,
        patterns: Vec<PermutationPattern>,
    ) -> Self {
        Self {
            n,
            u,
            provenance,
            patterns,
            search_completed: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn patterns(&self) -> &[PermutationPattern] {
        &self.patterns
    }

    /// `M^(u,n)` realised by this family.
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Number of trailing patterns appended by search to a transcribed table.
    pub fn search_completed(&self) -> usize {
        self.search_completed
    }

    /// Checks well-formedness and that every pair shares at most `u - 1` positions.
    pub fn verify(&self) -> std::result::Result<(), FamilyViolation> {
        for (index, p) in self.patterns.iter().enumerate() {
            if p.n() != self.n || p.u() != self.u {
                return Err(FamilyViolation::Malformed {
                    index,
                    reason: format!(
                        "pattern is for (u={}, n={}), family is (u={}, n={})",
                        p.u(),
                        p.n(),
                        self.u,
                        self.n
                    ),
                });
            }
        }
        for ((i, a), (j, b)) in self.patterns.iter().enumerate().tuple_combinations() {
            let shared = a.overlap(b);
            // With u = 0 the limit is -1, so any second pattern violates it.
            if self.u == 0 || shared > self.u - 1 {
                return Err(FamilyViolation::Overlap {
                    first: i,
                    second: j,
                    shared,
                    limit: self.u.saturating_sub(1),
                });
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyRecord {
    n: usize,
    u: usize,
    provenance: Provenance,
    patterns: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    search_completed: usize,
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

impl Serialize for PatternFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRecord {
            n: self.n,
            u: self.u,
            provenance: self.provenance,
            patterns: self.patterns.iter().map(|p| p.positions()).collect(),
            search_completed: self.search_completed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PatternFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let record = FamilyRecord::deserialize(d)?;
        let patterns = record
            .patterns
            .iter()
            .map(|p| PermutationPattern::new(record.n, record.u, p))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(Self {
            n: record.n,
            u: record.u,
            provenance: record.provenance,
            patterns,
            search_completed: record.search_completed,
        })
    }
}

// Best-known counts M^(u,n) for 4 <= n <= 15, columns u = 1..=7, from the
// published constant-weight code tables (distance 2u, weight 2u-1).
// Zero marks cells with no entry (u above ⌈n/2⌉).
const TABLE_M: [[usize; 7]; 12] = [
    [4, 1, 0, 0, 0, 0, 0],     // n = 4
    [5, 2, 1, 0, 0, 0, 0],     // n = 5
    [6, 4, 1, 0, 0, 0, 0],     // n = 6
    [7, 7, 1, 1, 0, 0, 0],     // n = 7
    [8, 8, 2, 1, 0, 0, 0],     // n = 8
    [9, 12, 3, 1, 1, 0, 0],    // n = 9
    [10, 13, 6, 1, 1, 0, 0],   // n = 10
    [11, 17, 11, 2, 1, 1, 0],  // n = 11
    [12, 20, 12, 3, 1, 1, 0],  // n = 12
    [13, 26, 18, 4, 1, 1, 1],  // n = 13
    [14, 28, 28, 8, 2, 1, 1],  // n = 14
    [15, 35, 42, 15, 3, 1, 1], // n = 15
];

/// Tabulated `M^(u,n)`.
///
/// Forced cases answer for any `n`: `u = 0` gives 1, `u = ⌈n/2⌉` gives 1
/// (one half-weight block is chosen for even `n`), and otherwise `u = 1` gives `n`.
pub fn table_m(u: usize, n: usize) -> Result<usize> {
    if u > max_weight(n) {
        return Err(Error::OutOfTable { u, n });
    }
    if u == 0 || u == max_weight(n) {
        return Ok(1);
    }
    if u == 1 {
        return Ok(n);
    }
    match TABLE_M
        .get(n.wrapping_sub(4))
        .and_then(|row| row.get(u - 1))
    {
        Some(&m) if m > 0 => Ok(m),
        _ => Err(Error::OutOfTable { u, n }),
    }
}

const TABLE_U2: &[(usize, &[[usize; 3]])] = &[
    (5, &[[0, 2, 3], [1, 3, 4]]),
    (6, &[[0, 1, 2], [0, 3, 4], [1, 3, 5], [2, 4, 5]]),
    (
        7,
        &[
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ],
    ),
    (
        8,
        &[
            [0, 1, 2],
            [5, 6, 7],
            [0, 3, 5],
            [1, 3, 6],
            [2, 3, 7],
            [0, 4, 6],
            [1, 4, 7],
            [2, 4, 5],
        ],
    ),
    (
        9,
        &[
            [0, 1, 2],
            [3, 4, 5],
            [6, 7, 8],
            [0, 3, 6],
            [1, 4, 7],
            [2, 5, 8],
            [0, 4, 8],
            [1, 5, 6],
            [2, 3, 7],
            [0, 5, 7],
            [1, 3, 8],
            [2, 4, 6],
        ],
    ),
    // The n = 15 listing is partial (16 of 35); the rest is completed by search.
    (
        15,
        &[
            [3, 7, 11],
            [3, 8, 12],
            [3, 9, 13],
            [3, 10, 14],
            [4, 7, 12],
            [4, 8, 13],
            [4, 9, 14],
            [4, 10, 11],
            [5, 7, 13],
            [5, 8, 14],
            [5, 9, 11],
            [5, 10, 12],
            [6, 7, 14],
            [6, 8, 11],
            [6, 9, 12],
            [6, 10, 13],
        ],
    ),
];

const TABLE_U3: &[(usize, &[[usize; 5]])] = &[
    (7, &[[0, 1, 2, 3, 4]]),
    (8, &[[0, 1, 2, 3, 4], [0, 1, 5, 6, 7]]),
    (9, &[[0, 1, 2, 3, 4], [3, 4, 5, 6, 7], [0, 1, 6, 7, 8]]),
    (
        10,
        &[
            [0, 1, 2, 3, 4],
            [0, 1, 5, 6, 7],
            [1, 2, 5, 8, 9],
            [2, 3, 6, 7, 8],
            [3, 4, 5, 6, 9],
            [0, 4, 7, 8, 9],
        ],
    ),
];

fn transcribed<const M: usize>(n: usize, u: usize, rows: &[[usize; M]]) -> Result<PatternFamily> {
    let patterns = rows
        .iter()
        .map(|row| PermutationPattern::new(n, u, row))
        .collect::<Result<Vec<_>>>()?;
    Ok(PatternFamily::new(n, u, Provenance::BuiltinTable, patterns))
}

/// The shipped family for `(u, n)`.
///
/// Covers `u = 0`, `u = 1` (singletons ordered `{n-1}, .., {0}`, i.e. by the
/// integer value of the single word), `u = ⌈n/2⌉` (the leftmost support),
/// the tabulated `u = 2` families for `n ∈ {5..9, 15}` and the `u = 3`
/// families for `n ∈ {7..10}`. The `(2, 15)` listing is completed to 35
/// patterns by [`extend_family`]; the appended count is reported by
/// [`PatternFamily::search_completed`].
pub fn builtin_family(u: usize, n: usize) -> Result<PatternFamily> {
    crate::page_two::check_code_len(n)?;
    if u > max_weight(n) {
        return Err(Error::NotShipped { u, n });
    }
    if u == max_weight(n) {
        let pattern = PermutationPattern::identity(n, u)?;
        return Ok(PatternFamily::new(
            n,
            u,
            Provenance::BuiltinTable,
            vec![pattern],
        ));
    }
    match u {
        0 => Ok(PatternFamily::new(
            n,
            0,
            Provenance::BuiltinTable,
            vec![PermutationPattern::new(n, 0, &[])?],
        )),
        1 => {
            let patterns = (0..n)
                .rev()
                .map(|p| PermutationPattern::new(n, 1, &[p]))
                .collect::<Result<Vec<_>>>()?;
            Ok(PatternFamily::new(n, 1, Provenance::BuiltinTable, patterns))
        }
        2 => {
            let (_, rows) = TABLE_U2
                .iter()
                .find(|(tn, _)| *tn == n)
                .ok_or(Error::NotShipped { u, n })?;
            let family = transcribed(n, 2, rows)?;
            if n == 15 {
                let outcome = extend_family(
                    &family,
                    &ExactSearch {
                        budget: DEFAULT_BUDGET,
                        target: table_m(2, 15).ok(),
                    },
                )?;
                let mut completed = outcome.family;
                completed.provenance = Provenance::BuiltinTable;
                return Ok(completed);
            }
            Ok(family)
        }
        3 => {
            let (_, rows) = TABLE_U3
                .iter()
                .find(|(tn, _)| *tn == n)
                .ok_or(Error::NotShipped { u, n })?;
            transcribed(n, 3, rows)
        }
        _ => Err(Error::NotShipped { u, n }),
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of candidate supports for `(u, n)`.
pub fn candidate_count(u: usize, n: usize) -> u64 {
    binomial(n as u64, span(u) as u64)
}

fn check_search_args(u: usize, n: usize) -> Result<()> {
    crate::page_two::check_code_len(n)?;
    if u == 0 {
        return Err(Error::InvalidWeight(0));
    }
    if u > max_weight(n) {
        return Err(Error::InvalidPattern {
            u,
            n,
            reason: format!("u exceeds ⌈n/2⌉ = {}", max_weight(n)),
        });
    }
    Ok(())
}

/// All supports of size `2u - 1` as masks (BitVector convention), in
/// lexicographic order of their sorted position lists.
fn candidates(u: usize, n: usize) -> Vec<u32> {
    (0..n)
        .combinations(span(u))
        .map(|positions| {
            positions
                .into_iter()
                .fold(0u32, |acc, p| acc | 1 << (n - 1 - p))
        })
        .collect()
}

fn to_family(n: usize, u: usize, provenance: Provenance, masks: &[u32]) -> PatternFamily {
    let patterns = masks
        .iter()
        .map(|&m| PermutationPattern::from_support(u, BitVector::from_raw(n, m)))
        .collect();
    PatternFamily::new(n, u, provenance, patterns)
}

#[inline]
fn compatible(a: u32, b: u32, limit: u32) -> bool {
    (a & b).count_ones() <= limit
}

/// First-fit scan of the supports in lexicographic order.
pub fn search_greedy(u: usize, n: usize) -> Result<PatternFamily> {
    check_search_args(u, n)?;
    let limit = (u - 1) as u32;
    let mut accepted: Vec<u32> = Vec::new();
    for c in candidates(u, n) {
        if accepted.iter().all(|&a| compatible(a, c, limit)) {
            accepted.push(c);
        }
    }
    Ok(to_family(n, u, Provenance::Greedy, &accepted))
}

/// Johnson upper bound on `M^(u,n)`: the largest binary code of length `n`,
/// weight `2u - 1` and minimum distance `2u`.
pub fn johnson_bound(u: usize, n: usize) -> usize {
    if u == 0 {
        return 1;
    }
    let delta = u;
    let w = span(u);
    // bound[len][weight], filled for len <= n.
    let mut bound = vec![vec![0usize; w + 1]; n + 1];
    for len in 0..=n {
        for wt in 0..=w.min(len) {
            bound[len][wt] = if wt < delta || len - wt < delta {
                1
            } else {
                let shrink_weight = len * bound[len - 1][wt - 1] / wt;
                let shrink_len = len * bound[len - 1][wt] / (len - wt);
                shrink_weight.min(shrink_len)
            };
        }
    }
    bound[n][w]
}

/// Parameters for [`search_exact_with`] and [`extend_family`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSearch {
    /// Branch-and-bound node budget.
    pub budget: u64,
    /// Stop as soon as a family of this size is found.
    pub target: Option<usize>,
}

impl Default for ExactSearch {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            target: None,
        }
    }
}

/// Result of an exact search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub family: PatternFamily,
    /// True when the family is proven maximum: the tree was exhausted or the
    /// Johnson bound was reached.
    pub complete: bool,
    pub nodes: u64,
    pub upper_bound: usize,
}

/// Maximum family for `(u, n)` within `budget` branch-and-bound nodes.
pub fn search_exact(u: usize, n: usize, budget: u64) -> Result<SearchOutcome> {
    search_exact_with(
        u,
        n,
        &ExactSearch {
            budget,
            target: None,
        },
    )
}

/// Branch-and-bound maximum clique over the compatibility graph of supports.
///
/// The incumbent starts from the greedy family and is improved by runs
/// restricted to families invariant under a fixed cyclic permutation of the
/// positions (`⌊n/k⌋` disjoint `k`-cycles, `k = n, .., 2`), each with its own
/// small budget. The main search then branches over supports in lexicographic
/// order with the first support fixed, which loses nothing since every family
/// can be relabelled to contain it. Candidates are pruned by size and, on
/// small sets, by a greedy colouring bound. The result is sorted
/// lexicographically.
pub fn search_exact_with(u: usize, n: usize, config: &ExactSearch) -> Result<SearchOutcome> {
    check_search_args(u, n)?;
    let count = candidate_count(u, n);
    if count > EXACT_CANDIDATE_LIMIT {
        return Err(Error::SearchSpaceTooLarge { u, n, count });
    }
    let all = candidates(u, n);
    let limit = (u - 1) as u32;
    let upper = johnson_bound(u, n);
    let stop_at = config.target.unwrap_or(usize::MAX).min(upper);

    let mut incumbent = greedy_masks(&all, limit);
    if incumbent.len() < stop_at {
        for k in (2..=n).rev() {
            let seeded = orbit_search(n, k, &all, limit, incumbent.len(), stop_at);
            if seeded.len() > incumbent.len() {
                incumbent = seeded;
            }
            if incumbent.len() >= stop_at {
                break;
            }
        }
    }

    let mut bb = BranchAndBound::new(limit, config.budget, stop_at, incumbent);
    if bb.best.len() < stop_at {
        let root = all[0];
        let rest: Vec<u32> = all[1..]
            .iter()
            .copied()
            .filter(|&c| compatible(root, c, limit))
            .collect();
        bb.current.push(root);
        bb.expand(&rest);
        bb.current.pop();
    }
    let complete = bb.best.len() >= upper || !bb.aborted;
    let mut best = bb.best;
    sort_lex(n, &mut best);
    Ok(SearchOutcome {
        family: to_family(n, u, Provenance::Exact, &best),
        complete,
        nodes: bb.nodes,
        upper_bound: upper,
    })
}

/// Extends `fixed` with further compatible supports, keeping `fixed` as a prefix.
///
/// Appended patterns are in lexicographic order and counted by
/// [`PatternFamily::search_completed`]. `target`, when given, is the total size.
pub fn extend_family(fixed: &PatternFamily, config: &ExactSearch) -> Result<SearchOutcome> {
    let (u, n) = (fixed.u(), fixed.n());
    check_search_args(u, n)?;
    fixed
        .verify()
        .map_err(|v| Error::FamilyRejected(v.to_string()))?;
    let count = candidate_count(u, n);
    if count > EXACT_CANDIDATE_LIMIT {
        return Err(Error::SearchSpaceTooLarge { u, n, count });
    }
    let limit = (u - 1) as u32;
    let taken: Vec<u32> = fixed
        .patterns()
        .iter()
        .map(|p| p.support().value())
        .collect();
    let open: Vec<u32> = candidates(u, n)
        .into_iter()
        .filter(|&c| taken.iter().all(|&t| compatible(t, c, limit)))
        .collect();
    let upper = johnson_bound(u, n).saturating_sub(taken.len());
    let stop_at = config
        .target
        .map(|t| t.saturating_sub(taken.len()))
        .unwrap_or(usize::MAX)
        .min(upper);
    let incumbent = greedy_masks(&open, limit);
    let mut bb = BranchAndBound::new(limit, config.budget, stop_at, incumbent);
    if bb.best.len() < stop_at {
        bb.expand(&open);
    }
    let complete = bb.best.len() >= upper || !bb.aborted;
    let mut added = bb.best;
    sort_lex(n, &mut added);
    let mut patterns = fixed.patterns().to_vec();
    patterns.extend(
        added
            .iter()
            .map(|&m| PermutationPattern::from_support(u, BitVector::from_raw(n, m))),
    );
    let mut family = PatternFamily::new(n, u, Provenance::Exact, patterns);
    family.search_completed = added.len();
    Ok(SearchOutcome {
        family,
        complete,
        nodes: bb.nodes,
        upper_bound: upper + taken.len(),
    })
}

fn greedy_masks(cands: &[u32], limit: u32) -> Vec<u32> {
    let mut accepted: Vec<u32> = Vec::new();
    for &c in cands {
        if accepted.iter().all(|&a| compatible(a, c, limit)) {
            accepted.push(c);
        }
    }
    accepted
}

/// Descending mask value equals ascending lexicographic order of position lists
/// for supports of equal size.
fn sort_lex(_n: usize, masks: &mut [u32]) {
    masks.sort_unstable_by(|a, b| b.cmp(a));
}

struct BranchAndBound {
    limit: u32,
    budget: u64,
    stop_at: usize,
    nodes: u64,
    aborted: bool,
    current: Vec<u32>,
    best: Vec<u32>,
}

impl BranchAndBound {
    fn new(limit: u32, budget: u64, stop_at: usize, incumbent: Vec<u32>) -> Self {
        Self {
            limit,
            budget,
            stop_at,
            nodes: 0,
            aborted: false,
            current: Vec::new(),
            best: incumbent,
        }
    }

    fn done(&self) -> bool {
        self.aborted || self.best.len() >= self.stop_at
    }

    fn expand(&mut self, cands: &[u32]) {
        self.nodes += 1;
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        if self.best.len() >= self.stop_at {
            return;
        }
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        if self.current.len() + cands.len() <= self.best.len() {
            return;
        }
        if cands.len() <= COLOUR_LIMIT
            && self.current.len() + colour_bound(cands, self.limit) <= self.best.len()
        {
            return;
        }
        for (i, &v) in cands.iter().enumerate() {
            if self.current.len() + (cands.len() - i) <= self.best.len() {
                return;
            }
            let next: Vec<u32> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&c| compatible(v, c, self.limit))
                .collect();
            self.current.push(v);
            self.expand(&next);
            self.current.pop();
            if self.done() {
                return;
            }
        }
    }
}

/// Number of classes in a first-fit partition of `cands` into sets of pairwise
/// incompatible supports. A family takes at most one support per class.
fn colour_bound(cands: &[u32], limit: u32) -> usize {
    let mut classes: Vec<Vec<u32>> = Vec::new();
    for &v in cands {
        match classes
            .iter_mut()
            .find(|class| class.iter().all(|&w| !compatible(v, w, limit)))
        {
            Some(class) => class.push(v),
            None => classes.push(vec![v]),
        }
    }
    classes.len()
}

/// Best family invariant under `⌊n/k⌋` disjoint `k`-cycles on the leftmost positions.
///
/// Returns an empty family when the group has too many orbits or nothing beats `floor`.
fn orbit_search(
    n: usize,
    k: usize,
    all: &[u32],
    limit: u32,
    floor: usize,
    stop_at: usize,
) -> Vec<u32> {
    let cycles = n / k;
    let image: Vec<usize> = (0..n)
        .map(|p| {
            if p < cycles * k {
                let base = p / k * k;
                base + (p - base + 1) % k
            } else {
                p
            }
        })
        .collect();
    let apply = |mask: u32| -> u32 {
        (0..n)
            .filter(|&p| mask >> (n - 1 - p) & 1 == 1)
            .fold(0u32, |acc, p| acc | 1 << (n - 1 - image[p]))
    };

    let mut seen: HashSet<u32> = HashSet::with_capacity(all.len());
    let mut orbits: Vec<Vec<u32>> = Vec::new();
    for &c in all {
        if !seen.insert(c) {
            continue;
        }
        let mut orbit = vec![c];
        let mut next = apply(c);
        while next != c {
            seen.insert(next);
            orbit.push(next);
            next = apply(next);
        }
        let self_compatible = orbit
            .iter()
            .tuple_combinations()
            .all(|(&a, &b)| compatible(a, b, limit));
        if self_compatible {
            orbits.push(orbit);
            if orbits.len() > SEED_ORBIT_LIMIT {
                return Vec::new();
            }
        }
    }

    let count = orbits.len();
    let mut adjacent = vec![false; count * count];
    for i in 0..count {
        for j in i + 1..count {
            let ok = orbits[i]
                .iter()
                .all(|&a| orbits[j].iter().all(|&b| compatible(a, b, limit)));
            adjacent[i * count + j] = ok;
            adjacent[j * count + i] = ok;
        }
    }

    let mut search = WeightedClique {
        weights: orbits.iter().map(Vec::len).collect(),
        adjacent,
        count,
        nodes: 0,
        stop_at,
        current: Vec::new(),
        current_weight: 0,
        best: Vec::new(),
        best_weight: floor,
    };
    search.expand(&(0..count).collect::<Vec<_>>());
    search
        .best
        .iter()
        .flat_map(|&i| orbits[i].iter().copied())
        .collect()
}

struct WeightedClique {
    weights: Vec<usize>,
    adjacent: Vec<bool>,
    count: usize,
    nodes: u64,
    stop_at: usize,
    current: Vec<usize>,
    current_weight: usize,
    best: Vec<usize>,
    best_weight: usize,
}

impl WeightedClique {
    fn expand(&mut self, cands: &[usize]) {
        self.nodes += 1;
        if self.current_weight > self.best_weight {
            self.best_weight = self.current_weight;
            self.best = self.current.clone();
        }
        if self.best_weight >= self.stop_at || self.nodes > SEED_BUDGET {
            return;
        }
        let mut remaining: usize = cands.iter().map(|&i| self.weights[i]).sum();
        for (pos, &v) in cands.iter().enumerate() {
            if self.current_weight + remaining <= self.best_weight {
                return;
            }
            remaining -= self.weights[v];
            let next: Vec<usize> = cands[pos + 1..]
                .iter()
                .copied()
                .filter(|&w| self.adjacent[v * self.count + w])
                .collect();
            self.current.push(v);
            self.current_weight += self.weights[v];
            self.expand(&next);
            self.current.pop();
            self.current_weight -= self.weights[v];
            if self.best_weight >= self.stop_at || self.nodes > SEED_BUDGET {
                return;
            }
        }
    }
}

/// How the per-weight families of a code are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternSource {
    /// Shipped tables; other `(u, n)` fall back to exact search aimed at the
    /// tabulated count, or to greedy when the candidate space is too large.
    Builtin,
    Greedy,
    Exact,
}

impl fmt::Display for PatternSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatternSource::Builtin => "builtin",
            PatternSource::Greedy => "greedy",
            PatternSource::Exact => "exact",
        })
    }
}

/// Family for a single `(u, n)` under `source`.
///
/// `u = 0` and `u = ⌈n/2⌉` are fixed for every source: the empty pattern and the
/// leftmost support. At `n = 2` the top weight is 1, where a search would return
/// both singletons.
pub fn family_for(u: usize, n: usize, source: PatternSource) -> Result<PatternFamily> {
    if u == 0 || u == max_weight(n) {
        let mut family = builtin_family(u, n)?;
        family.provenance = match source {
            PatternSource::Builtin => Provenance::BuiltinTable,
            PatternSource::Greedy => Provenance::Greedy,
            PatternSource::Exact => Provenance::Exact,
        };
        return Ok(family);
    }
    match source {
        PatternSource::Greedy => search_greedy(u, n),
        PatternSource::Exact => Ok(search_exact(u, n, DEFAULT_BUDGET)?.family),
        PatternSource::Builtin => match builtin_family(u, n) {
            Err(Error::NotShipped { .. }) if candidate_count(u, n) <= EXACT_CANDIDATE_LIMIT => {
                let config = ExactSearch {
                    budget: DEFAULT_BUDGET,
                    target: table_m(u, n).ok(),
                };
                Ok(search_exact_with(u, n, &config)?.family)
            }
            Err(Error::NotShipped { .. }) => search_greedy(u, n),
            other => other,
        },
    }
}

/// One family per weight `0..=⌈n/2⌉`.
pub fn pattern_plan(n: usize, source: PatternSource) -> Result<Vec<PatternFamily>> {
    crate::page_two::check_code_len(n)?;
    (0..=max_weight(n))
        .map(|u| family_for(u, n, source))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(n: usize, u: usize, rows: &[&[usize]]) -> PatternFamily {
        PatternFamily::new(
            n,
            u,
            Provenance::BuiltinTable,
            rows.iter()
                .map(|r| PermutationPattern::new(n, u, r).unwrap())
                .collect(),
        )
    }

    fn positions(f: &PatternFamily) -> Vec<Vec<usize>> {
        f.patterns().iter().map(|p| p.positions()).collect()
    }

    /// Maximum family size by enumerating every subset of candidates (tiny cases only).
    fn brute_max(u: usize, n: usize) -> usize {
        let cands = candidates(u, n);
        let limit = (u - 1) as u32;
        assert!(cands.len() <= 20);
        (0u32..1 << cands.len())
            .filter(|set| {
                (0..cands.len())
                    .filter(|i| set >> i & 1 == 1)
                    .tuple_combinations()
                    .all(|(i, j)| compatible(cands[i], cands[j], limit))
            })
            .map(|set| set.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn verify_examples() {
        assert!(family(5, 2, &[&[0, 2, 3], &[1, 3, 4]]).verify().is_ok());
        assert_eq!(
            family(5, 2, &[&[0, 2, 3], &[0, 2, 4]]).verify(),
            Err(FamilyViolation::Overlap {
                first: 0,
                second: 1,
                shared: 2,
                limit: 1
            })
        );
        let table_iv = family(
            10,
            3,
            &[
                &[0, 1, 2, 3, 4],
                &[0, 1, 5, 6, 7],
                &[1, 2, 5, 8, 9],
                &[2, 3, 6, 7, 8],
                &[3, 4, 5, 6, 9],
                &[0, 4, 7, 8, 9],
            ],
        );
        assert!(table_iv.verify().is_ok());
        let mixed = PatternFamily::new(
            5,
            2,
            Provenance::Greedy,
            vec![PermutationPattern::new(6, 2, &[0, 1, 2]).unwrap()],
        );
        assert!(matches!(
            mixed.verify(),
            Err(FamilyViolation::Malformed { index: 0, .. })
        ));
        let zero = family(4, 0, &[&[], &[]]);
        assert!(zero.verify().is_err());
    }

    #[test]
    fn builtin_examples() {
        assert_eq!(
            positions(&builtin_family(2, 7).unwrap()),
            vec![
                vec![0, 1, 2],
                vec![0, 3, 4],
                vec![0, 5, 6],
                vec![1, 3, 5],
                vec![1, 4, 6],
                vec![2, 3, 6],
                vec![2, 4, 5]
            ]
        );
        assert_eq!(
            positions(&builtin_family(3, 9).unwrap()),
            vec![
                vec![0, 1, 2, 3, 4],
                vec![3, 4, 5, 6, 7],
                vec![0, 1, 6, 7, 8]
            ]
        );
        for n in 2..=20 {
            let f = builtin_family(1, n).unwrap();
            let expect: Vec<Vec<usize>> = if n == 2 {
                vec![vec![0]]
            } else {
                (0..n).rev().map(|p| vec![p]).collect()
            };
            assert_eq!(positions(&f), expect, "n={n}");
        }
        assert_eq!(
            builtin_family(4, 12),
            Err(Error::NotShipped { u: 4, n: 12 })
        );
        assert_eq!(
            builtin_family(2, 10),
            Err(Error::NotShipped { u: 2, n: 10 })
        );
    }

    #[test]
    fn every_builtin_family_verifies_and_matches_table() {
        for n in 2..=15 {
            for u in 0..=max_weight(n) {
                match builtin_family(u, n) {
                    Ok(f) => {
                        assert!(f.verify().is_ok(), "u={u} n={n}");
                        assert_eq!(f.provenance(), Provenance::BuiltinTable);
                        if let Ok(m) = table_m(u, n) {
                            assert_eq!(f.len(), m, "u={u} n={n}");
                        }
                    }
                    Err(Error::NotShipped { .. }) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn n15_listing_is_completed_by_search() {
        let f = builtin_family(2, 15).unwrap();
        assert_eq!(f.len(), 35);
        assert_eq!(f.search_completed(), 19);
        assert_eq!(f.patterns()[0].positions(), vec![3, 7, 11]);
        assert_eq!(f.patterns()[15].positions(), vec![6, 10, 13]);
        assert!(f.verify().is_ok());
    }

    #[test]
    fn table_m_examples() {
        assert_eq!(table_m(2, 11), Ok(17));
        assert_eq!(table_m(4, 14), Ok(8));
        for n in 2..=24 {
            assert_eq!(table_m(0, n), Ok(1));
            assert_eq!(table_m(max_weight(n), n), Ok(1));
        }
        assert_eq!(table_m(1, 20), Ok(20));
        assert_eq!(table_m(8, 15), Ok(1));
        assert_eq!(table_m(2, 16), Err(Error::OutOfTable { u: 2, n: 16 }));
        assert_eq!(table_m(5, 7), Err(Error::OutOfTable { u: 5, n: 7 }));
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(search_greedy(2, 5).unwrap().len(), 2);
        for n in (3..=15).step_by(2) {
            let f = search_greedy(max_weight(n), n).unwrap();
            assert_eq!(positions(&f), vec![(0..n).collect::<Vec<_>>()]);
        }
        assert_eq!(search_greedy(1, 6).unwrap().len(), 6);
        assert!(search_greedy(0, 6).is_err());
        assert!(search_greedy(4, 6).is_err());
    }

    #[test]
    fn exact_examples() {
        assert_eq!(search_exact(2, 6, DEFAULT_BUDGET).unwrap().family.len(), 4);
        let nine = search_exact(2, 9, DEFAULT_BUDGET).unwrap();
        assert_eq!(nine.family.len(), 12);
        assert!(nine.complete);
        assert_eq!(search_exact(3, 10, DEFAULT_BUDGET).unwrap().family.len(), 6);
    }

    #[test]
    fn exact_reaches_every_tabulated_count() {
        for n in 4..=15 {
            for u in 1..max_weight(n) {
                let m = table_m(u, n).unwrap();
                let config = ExactSearch {
                    budget: DEFAULT_BUDGET,
                    target: Some(m),
                };
                let outcome = search_exact_with(u, n, &config).unwrap();
                assert_eq!(outcome.family.len(), m, "u={u} n={n}");
                assert!(outcome.family.verify().is_ok());
            }
        }
    }

    #[test]
    fn exact_is_optimal_on_tiny_instances() {
        for (u, n) in [(2, 4), (2, 5), (2, 6), (3, 6), (3, 5), (1, 5), (2, 3)] {
            let outcome = search_exact(u, n, DEFAULT_BUDGET).unwrap();
            assert!(outcome.complete);
            assert_eq!(outcome.family.len(), brute_max(u, n), "u={u} n={n}");
            assert!(outcome.family.len() <= johnson_bound(u, n));
        }
    }

    #[test]
    fn exact_dominates_greedy_and_is_deterministic() {
        for n in 4..=10 {
            for u in 1..=max_weight(n) {
                let exact = search_exact(u, n, 200_000).unwrap();
                let greedy = search_greedy(u, n).unwrap();
                assert!(exact.family.len() >= greedy.len(), "u={u} n={n}");
                assert!(exact.family.verify().is_ok());
                assert_eq!(search_exact(u, n, 200_000).unwrap(), exact);
                assert_eq!(search_greedy(u, n).unwrap(), greedy);
            }
        }
    }

    #[test]
    fn exact_honours_budget_and_limits() {
        let tight = search_exact(3, 12, 10).unwrap();
        assert!(!tight.complete);
        assert!(tight.family.verify().is_ok());
        assert!(matches!(
            search_exact(6, 24, DEFAULT_BUDGET),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn johnson_bound_values() {
        assert_eq!(johnson_bound(2, 5), 2);
        assert_eq!(johnson_bound(2, 7), 7);
        assert_eq!(johnson_bound(2, 15), 35);
        assert_eq!(johnson_bound(3, 15), 42);
        assert_eq!(johnson_bound(1, 9), 9);
        assert_eq!(johnson_bound(3, 5), 1);
        for n in 2..=15 {
            for u in 0..=max_weight(n) {
                if let Ok(m) = table_m(u, n) {
                    assert!(johnson_bound(u, n) >= m, "u={u} n={n}");
                }
            }
        }
    }

    #[test]
    fn disjoint_blocks_iff_small_overlap_exhaustive() {
        for n in 3..=7 {
            let cands = candidates(2, n);
            for &a in &cands {
                for &b in &cands {
                    let pa = PermutationPattern::from_support(2, BitVector::from_raw(n, a));
                    let pb = PermutationPattern::from_support(2, BitVector::from_raw(n, b));
                    assert_eq!(!pa.code().intersects(&pb.code()), pa.overlap(&pb) <= 1);
                }
            }
        }
    }

    #[test]
    fn family_json_shape() {
        let f = builtin_family(2, 5).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(
            json,
            r#"{"n":5,"u":2,"provenance":"builtin-table","patterns":[[0,2,3],[1,3,4]]}"#
        );
        let back: PatternFamily = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        let completed = serde_json::to_value(builtin_family(2, 15).unwrap()).unwrap();
        assert_eq!(completed["search_completed"], 19);
    }

    #[test]
    fn plan_covers_every_weight() {
        for source in [
            PatternSource::Builtin,
            PatternSource::Greedy,
            PatternSource::Exact,
        ] {
            let plan = pattern_plan(8, source).unwrap();
            assert_eq!(
                plan.iter().map(|f| f.u()).collect::<Vec<_>>(),
                vec![0, 1, 2, 3, 4]
            );
            assert!(plan.iter().all(|f| f.verify().is_ok()));
            let two = pattern_plan(2, source).unwrap();
            assert_eq!(two[1].len(), 1);
            assert_eq!(two[1].patterns()[0].positions(), vec![0]);
        }
    }
}
