//! Parallel two-page encoding and single-threshold decoding.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::bits::{BitVector, CellState};
use crate::error::{Error, Result};
use crate::page_one::PageOneCode;
use crate::page_two::PageTwoCode;
use crate::patterns::{pattern_plan, PatternSource};

/// An `(n; M_1, M_2)` code for three-level cells.
///
/// Message `m1` of the first page is stored in the level-2 read, message `m2`
/// of the second page in the level-1 read.
#[derive(Debug, Clone)]
pub struct PrioCode {
    n: usize,
    page_one: PageOneCode,
    page_two: PageTwoCode,
    lookup: HashMap<u32, usize>,
}

impl PartialEq for PrioCode {
    fn eq(&self, other: &Self) -> bool {
        self.page_one == other.page_one && self.page_two == other.page_two
    }
}

impl Eq for PrioCode {}

impl PrioCode {
    pub fn construct(n: usize, source: PatternSource) -> Result<Self> {
        let families = pattern_plan(n, source)?;
        let page_one = PageOneCode::build(n, &families)?;
        Self::from_parts(page_one, PageTwoCode::build(n)?)
    }

    /// Combines two pages without checking the inclusion conditions.
    pub fn from_parts(page_one: PageOneCode, page_two: PageTwoCode) -> Result<Self> {
        if page_one.n() != page_two.n() {
            return Err(Error::LengthMismatch {
                left: page_one.n(),
                right: page_two.n(),
            });
        }
        let mut lookup = HashMap::new();
        for (i, code) in page_one.messages().enumerate() {
            for v in code {
                // A vector listed twice decodes to its first message.
                lookup.entry(v.value()).or_insert(i);
            }
        }
        Ok(Self {
            n: page_one.n(),
            page_one,
            page_two,
            lookup,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn page_one(&self) -> &PageOneCode {
        &self.page_one
    }

    pub fn page_two(&self) -> &PageTwoCode {
        &self.page_two
    }

    /// `(M_1, M_2)`.
    pub fn message_counts(&self) -> (usize, usize) {
        (self.page_one.message_count(), self.page_two.message_count())
    }

    /// `(n; M_1, M_2)`.
    pub fn banner(&self) -> String {
        let (m1, m2) = self.message_counts();
        format!("({}; {}, {})", self.n, m1, m2)
    }

    /// Picks the smallest `a ∈ A_{m1}` (by integer value) that some `b ∈ B_{m2}`
    /// dominates, then the lightest such `b`, smallest value on ties, and
    /// writes `a + b`.
    pub fn encode(&self, m1: usize, m2: usize) -> Result<CellState> {
        let (count1, count2) = self.message_counts();
        let a_code = self.page_one.message(m1).ok_or(Error::MessageOutOfRange {
            page: 1,
            index: m1,
            count: count1,
        })?;
        let b_code = self.page_two.code(m2).ok_or(Error::MessageOutOfRange {
            page: 2,
            index: m2,
            count: count2,
        })?;
        a_code
            .iter()
            .find_map(|a| {
                b_code
                    .iter()
                    .filter(|b| a.covered_by(b))
                    .min_by_key(|b| (b.weight(), b.value()))
                    .map(|b| (a, b))
            })
            .map(|(a, b)| CellState::from_pages(a, b).expect("equal lengths"))
            .ok_or(Error::NoDominatedPair { m1, m2 })
    }

    /// Second-page message from the threshold-1 read.
    pub fn decode_page2(&self, x: &CellState) -> Result<usize> {
        self.page_two.locate(&x.threshold_read(1)?)
    }

    /// First-page message from the threshold-2 read.
    pub fn decode_page1(&self, x: &CellState) -> Result<usize> {
        let read = x.threshold_read(2)?;
        if read.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: read.len(),
            });
        }
        self.lookup
            .get(&read.value())
            .copied()
            .ok_or_else(|| Error::UnreachableState(x.to_string()))
    }

    /// `(page1, page2)` messages of `x`.
    pub fn decode(&self, x: &CellState) -> Result<(usize, usize)> {
        Ok((self.decode_page1(x)?, self.decode_page2(x)?))
    }

    /// The full encoding table: rows are second-page messages, columns first-page messages.
    pub fn emit_table(&self) -> Result<CodeTable> {
        let (m1, m2) = self.message_counts();
        let cells = (0..m2)
            .map(|j| {
                (0..m1)
                    .map(|i| self.encode(i, j))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CodeTable { n: self.n, cells })
    }

    /// The first-page message whose code contains `v`, if any.
    pub fn page_one_index(&self, v: &BitVector) -> Option<usize> {
        (v.len() == self.n)
            .then(|| self.lookup.get(&v.value()).copied())
            .flatten()
    }
}

/// Encoded cell states for every message pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeTable {
    pub n: usize,
    /// `cells[m2][m1]`.
    pub cells: Vec<Vec<CellState>>,
}

impl CodeTable {
    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn columns(&self) -> usize {
        self.cells.first().map_or(0, Vec::len)
    }

    pub fn get(&self, m2: usize, m1: usize) -> Option<&CellState> {
        self.cells.get(m2).and_then(|row| row.get(m1))
    }

    /// Header row `m2\m1,0,1,..`, then one row per second-page message.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m2\\m1");
        for i in 0..self.columns() {
            write!(out, ",{i}").unwrap();
        }
        out.push('\n');
        for (j, row) in self.cells.iter().enumerate() {
            write!(out, "{j}").unwrap();
            for cell in row {
                write!(out, ",{cell}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let width = self.n.max(5);
        let mut out = format!("{:>5} |", "m2\\m1");
        for i in 0..self.columns() {
            write!(out, " {i:>width$}").unwrap();
        }
        out.push('\n');
        out.push_str(&"-".repeat(7 + (width + 1) * self.columns()));
        out.push('\n');
        for (j, row) in self.cells.iter().enumerate() {
            write!(out, "{j:>5} |").unwrap();
            for cell in row {
                write!(out, " {:>width$}", cell.to_string()).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// One reference cell that differs from the generated table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub row: usize,
    pub column: usize,
    pub m1: usize,
    pub m2: usize,
    pub reference: String,
    pub generated: String,
    /// What the reference cell decodes to under this code, when it decodes at all.
    pub reference_decodes_to: Option<(usize, usize)>,
}

/// Comparison of a generated table against a transcribed one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Errata {
    /// `column_map[c]` is the first-page message assigned to reference column `c`.
    pub column_map: Vec<usize>,
    /// `row_map[r]` is the second-page message assigned to reference row `r`.
    pub row_map: Vec<usize>,
    pub compared: usize,
    pub mismatches: Vec<Mismatch>,
}

impl Errata {
    pub fn matched(&self) -> usize {
        self.compared - self.mismatches.len()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} of {} cells match; column map {:?}\n",
            self.matched(),
            self.compared,
            self.column_map
        );
        for m in &self.mismatches {
            let decoded = match m.reference_decodes_to {
                Some((i, j)) => format!("decodes to ({i}, {j})"),
                None => "not decodable".to_string(),
            };
            writeln!(
                out,
                "row {} col {} (m1={}, m2={}): reference {} generated {} [{decoded}]",
                m.row, m.column, m.m1, m.m2, m.reference, m.generated
            )
            .unwrap();
        }
        out
    }
}

/// Aligns `reference` (rows of cell strings) to `code` and lists every differing cell.
///
/// Reference rows and columns may follow a different message order. Each
/// reference column is assigned the first-page message its cells most often
/// decode to, and each row likewise for the second page; ties and columns with
/// no decodable cell fall back to the positional index.
pub fn diff_table(code: &PrioCode, reference: &[Vec<String>]) -> Result<Errata> {
    let table = code.emit_table()?;
    let decoded: Vec<Vec<Option<(usize, usize)>>> = reference
        .iter()
        .map(|row| {
            row.iter()
                .map(|cell| {
                    cell.parse::<CellState>()
                        .ok()
                        .filter(|x| x.len() == code.n())
                        .and_then(|x| code.decode(&x).ok())
                })
                .collect()
        })
        .collect();
    let columns = reference.iter().map(Vec::len).max().unwrap_or(0);
    let column_map: Vec<usize> = (0..columns)
        .map(|c| {
            majority(
                decoded
                    .iter()
                    .filter_map(|row| row.get(c).copied().flatten().map(|d| d.0)),
                c,
            )
        })
        .collect();
    let row_map: Vec<usize> = decoded
        .iter()
        .enumerate()
        .map(|(r, row)| majority(row.iter().filter_map(|d| d.map(|d| d.1)), r))
        .collect();

    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (r, row) in reference.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            compared += 1;
            let (m1, m2) = (column_map[c], row_map[r]);
            let generated = table
                .get(m2, m1)
                .map_or_else(|| "-".to_string(), CellState::to_string);
            if *cell != generated {
                mismatches.push(Mismatch {
                    row: r,
                    column: c,
                    m1,
                    m2,
                    reference: cell.clone(),
                    generated,
                    reference_decodes_to: decoded[r][c],
                });
            }
        }
    }
    Ok(Errata {
        column_map,
        row_map,
        compared,
        mismatches,
    })
}

fn majority(votes: impl Iterator<Item = usize>, fallback: usize) -> usize {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for v in votes {
        *counts.entry(v).or_default() += 1;
    }
    let top = counts.values().copied().max().unwrap_or(0);
    let leaders: Vec<usize> = counts
        .into_iter()
        .filter(|&(_, c)| c == top)
        .map(|(v, _)| v)
        .collect();
    match leaders.as_slice() {
        [only] => *only,
        _ if leaders.contains(&fallback) => fallback,
        _ => leaders.into_iter().min().unwrap_or(fallback),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(n: usize) -> PrioCode {
        PrioCode::construct(n, PatternSource::Builtin).unwrap()
    }

    fn state(s: &str) -> CellState {
        s.parse().unwrap()
    }

    #[test]
    fn n3_examples() {
        let c = code(3);
        assert_eq!(c.banner(), "(3; 5, 4)");
        assert_eq!(c.encode(1, 2).unwrap(), state("102"));
        assert_eq!(c.encode(0, 0).unwrap(), state("000"));
        assert_eq!(c.encode(4, 1).unwrap(), state("220"));
        assert_eq!(c.decode_page2(&state("102")).unwrap(), 2);
        assert_eq!(c.decode_page2(&state("000")).unwrap(), 0);
        assert_eq!(c.decode_page2(&state("220")).unwrap(), 1);
        assert_eq!(c.decode_page1(&state("102")).unwrap(), 1);
        assert_eq!(c.decode_page1(&state("000")).unwrap(), 0);
        assert_eq!(c.decode_page1(&state("022")).unwrap(), 4);
    }

    #[test]
    fn lightest_dominating_word_is_chosen() {
        // A_0 = {000} under B_3 = {011, 100}: both dominate, 100 is lighter.
        assert_eq!(code(3).encode(0, 3).unwrap(), state("100"));
    }

    #[test]
    fn errors() {
        let c = code(3);
        assert_eq!(
            c.encode(5, 0),
            Err(Error::MessageOutOfRange {
                page: 1,
                index: 5,
                count: 5
            })
        );
        assert!(matches!(
            c.encode(0, 4),
            Err(Error::MessageOutOfRange { page: 2, .. })
        ));
        // 111 is in no first-page message of the n = 3 code.
        assert_eq!(
            c.decode_page1(&state("222")),
            Err(Error::UnreachableState("222".into()))
        );
        assert!(c.decode_page1(&state("0000")).is_err());
    }

    #[test]
    fn n2_table() {
        let c = code(2);
        assert_eq!(c.banner(), "(2; 3, 2)");
        let t = c.emit_table().unwrap();
        assert_eq!((t.rows(), t.columns()), (2, 3));
        assert!(t.cells.iter().flatten().all(|x| x.len() == 2));
    }

    #[test]
    fn roundtrip_exhaustive_small() {
        for n in 2..=8 {
            let c = code(n);
            let t = c.emit_table().unwrap();
            assert_eq!(t.get(0, 0).unwrap(), &CellState::erased(n).unwrap());
            for (j, row) in t.cells.iter().enumerate() {
                for (i, x) in row.iter().enumerate() {
                    assert!(x.levels().iter().all(|&l| l <= 2));
                    assert_eq!(c.decode(x).unwrap(), (i, j), "n={n}");
                    let upper = x.threshold_read(2).unwrap();
                    let lower = x.threshold_read(1).unwrap();
                    assert!(c.page_one().message(i).unwrap().contains(&upper));
                    assert!(c.page_two().code(j).unwrap().contains(&lower));
                }
            }
        }
    }

    #[test]
    fn table_rendering() {
        let t = code(3).emit_table().unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("m2\\m1,0,1,2,3,4"));
        assert_eq!(lines.next(), Some("0,000,112,121,211,122"));
        assert!(t.to_text().contains("  112"));
    }

    #[test]
    fn diff_against_own_table_is_clean_even_when_permuted() {
        let c = code(4);
        let t = c.emit_table().unwrap();
        let order = [3, 0, 1, 2, 6, 5, 4];
        let reference: Vec<Vec<String>> = t
            .cells
            .iter()
            .map(|row| order.iter().map(|&i| row[i].to_string()).collect())
            .collect();
        let errata = diff_table(&c, &reference).unwrap();
        assert_eq!(errata.column_map, order);
        assert!(errata.mismatches.is_empty());

        let mut broken = reference.clone();
        broken[1][2] = "2222".into();
        let errata = diff_table(&c, &broken).unwrap();
        assert_eq!(errata.mismatches.len(), 1);
        assert_eq!(errata.mismatches[0].m1, 1);
        assert_eq!(errata.mismatches[0].reference_decodes_to, None);
    }
}
