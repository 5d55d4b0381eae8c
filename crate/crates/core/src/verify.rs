//! Brute-force checks of a constructed code.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::time::Instant;

use serde::Serialize;

use crate::bits::{BitVector, ConstituentCode};
use crate::codec::PrioCode;
use crate::error::{Error, Result};
use crate::page_one::span;

/// Largest `n` for the disjointness and inclusion checks.
pub const THEOREM_CHECK_MAX_LEN: usize = 16;

/// Largest `n` for the exhaustive round trip.
pub const ROUNDTRIP_MAX_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Informational checks are reported but never fail the report.
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub elapsed_ms: f64,
}

impl Check {
    fn run(name: &str, f: impl FnOnce() -> Outcome) -> Self {
        let start = Instant::now();
        let outcome = f();
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        let (status, counterexample, detail) = match outcome {
            Outcome::Pass(detail) => (Status::Pass, None, detail),
            Outcome::Fail(cx) => (Status::Fail, Some(cx), None),
            Outcome::Skipped(why) => (Status::Skipped, None, Some(why)),
        };
        Self {
            name: name.to_string(),
            status,
            informational: false,
            counterexample,
            detail,
            elapsed_ms,
        }
    }

    fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail && !self.informational
    }
}

enum Outcome {
    Pass(Option<String>),
    Fail(String),
    Skipped(String),
}

impl Outcome {
    fn from_first_failure(failure: Option<String>) -> Self {
        match failure {
            Some(cx) => Outcome::Fail(cx),
            None => Outcome::Pass(None),
        }
    }
}

/// Results of a set of checks on one code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    fn new(code: &PrioCode, checks: Vec<Check>) -> Self {
        let (m1, m2) = code.message_counts();
        Self {
            n: code.n(),
            m1,
            m2,
            checks,
        }
    }

    /// True when no gating check failed.
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.failed())
    }

    pub fn merge(mut self, other: VerificationReport) -> Self {
        self.checks.extend(other.checks);
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("code ({}; {}, {})\n", self.n, self.m1, self.m2);
        for c in &self.checks {
            let tag = if c.informational { " (info)" } else { "" };
            write!(out, "{} {}{tag} [{:.1} ms]", c.status, c.name, c.elapsed_ms).unwrap();
            if let Some(cx) = &c.counterexample {
                write!(out, ": {cx}").unwrap();
            } else if let Some(d) = &c.detail {
                write!(out, ": {d}").unwrap();
            }
            out.push('\n');
        }
        out.push_str(if self.passed() {
            "result: pass\n"
        } else {
            "result: fail\n"
        });
        out
    }
}

fn listing(code: &ConstituentCode) -> String {
    let words: Vec<String> = code.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", words.join(", "))
}

fn first_collision<'a>(
    page: &str,
    codes: impl Iterator<Item = &'a ConstituentCode>,
) -> Option<String> {
    let mut owner: HashMap<u32, usize> = HashMap::new();
    for (i, code) in codes.enumerate() {
        for v in code {
            if let Some(&first) = owner.get(&v.value()) {
                if first != i {
                    return Some(format!("{page}_{first} and {page}_{i} share {v}"));
                }
            }
            owner.insert(v.value(), i);
        }
    }
    None
}

/// Within-page disjointness and `A_i ≤ B_j` for every message pair.
pub fn check_conditions(code: &PrioCode) -> VerificationReport {
    let too_long = code.n() > THEOREM_CHECK_MAX_LEN;
    let skip = || Outcome::Skipped(format!("n > {THEOREM_CHECK_MAX_LEN}"));
    let page_one = code.page_one();
    let page_two = code.page_two();
    let checks = vec![
        Check::run("page1-disjoint", || {
            if too_long {
                return skip();
            }
            Outcome::from_first_failure(first_collision("A", page_one.messages()))
        }),
        Check::run("page2-disjoint", || {
            if too_long {
                return skip();
            }
            Outcome::from_first_failure(first_collision("B", page_two.codes().iter()))
        }),
        Check::run("inclusion", || {
            if too_long {
                return skip();
            }
            let failure = page_one.messages().enumerate().find_map(|(i, a)| {
                page_two.codes().iter().enumerate().find_map(|(j, b)| {
                    a.witness_under(b).is_none().then(|| {
                        format!("A_{i} = {} is not under B_{j} = {}", listing(a), listing(b))
                    })
                })
            });
            Outcome::from_first_failure(failure)
        }),
    ];
    VerificationReport::new(code, checks)
}

/// Encodes every message pair, decodes both pages and checks levels stay below 3.
pub fn roundtrip_oracle(code: &PrioCode) -> VerificationReport {
    let check = Check::run("roundtrip", || {
        if code.n() > ROUNDTRIP_MAX_LEN {
            return Outcome::Skipped(format!("n > {ROUNDTRIP_MAX_LEN}"));
        }
        let (m1, m2) = code.message_counts();
        for j in 0..m2 {
            for i in 0..m1 {
                let x = match code.encode(i, j) {
                    Ok(x) => x,
                    Err(e) => return Outcome::Fail(format!("encode({i}, {j}): {e}")),
                };
                if x.levels().iter().any(|&l| l > 2) {
                    return Outcome::Fail(format!("encode({i}, {j}) = {x} exceeds level 2"));
                }
                match code.decode(&x) {
                    Ok(d) if d == (i, j) => {}
                    Ok((a, b)) => {
                        return Outcome::Fail(format!(
                            "encode({i}, {j}) = {x} decodes to ({a}, {b})"
                        ))
                    }
                    Err(e) => return Outcome::Fail(format!("encode({i}, {j}) = {x}: {e}")),
                }
            }
        }
        Outcome::Pass(Some(format!("{} pairs", m1 * m2)))
    });
    VerificationReport::new(code, vec![check])
}

/// Conditions behind the even-length supplemental message.
///
/// With `H` the chosen half-weight block, the complements of `H` must sit under
/// every pair whose members both weigh `n/2`, and the words of weight `n/2 + 1`
/// under every other pair. The informational `heavy-member-strict` check
/// records whether every other pair also holds a word heavier than `n/2 + 1`.
pub fn check_supplemental(code: &PrioCode) -> VerificationReport {
    let n = code.n();
    let odd = n % 2 == 1 || n > THEOREM_CHECK_MAX_LEN;
    let skip = || {
        Outcome::Skipped(if n % 2 == 1 {
            "odd n has no supplemental message".to_string()
        } else {
            format!("n > {THEOREM_CHECK_MAX_LEN}")
        })
    };
    let page_one = code.page_one();
    let pairs = code.page_two().codes();
    let half = n / 2;
    let is_half_pair = |b: &ConstituentCode| b.iter().all(|v| v.weight() == half);

    let mut checks = vec![
        Check::run("supplemental-disjoint", || {
            if odd {
                return skip();
            }
            let Some(sup) = page_one.supplemental() else {
                return Outcome::Fail("even n but no supplemental message".into());
            };
            let failure = page_one.entries().iter().enumerate().find_map(|(i, e)| {
                sup.first_common(&e.code)
                    .map(|v| format!("A_sup and A_{i} share {v}"))
            });
            Outcome::from_first_failure(failure)
        }),
        Check::run("supplemental-included", || {
            if odd {
                return skip();
            }
            let Some(sup) = page_one.supplemental() else {
                return Outcome::Fail("even n but no supplemental message".into());
            };
            let failure = pairs.iter().enumerate().find_map(|(j, b)| {
                sup.witness_under(b)
                    .is_none()
                    .then(|| format!("A_sup is not under B_{j} = {}", listing(b)))
            });
            Outcome::from_first_failure(failure)
        }),
    ];

    let half_block = page_one
        .entries()
        .iter()
        .rev()
        .find(|e| e.u == half)
        .map(|e| e.code.clone());
    checks.push(Check::run("half-complements-under-half-pairs", || {
        if odd {
            return skip();
        }
        let Some(block) = &half_block else {
            return Outcome::Fail(format!("no weight-{half} block"));
        };
        let complements: Vec<BitVector> = block.iter().map(BitVector::complement).collect();
        let complements = ConstituentCode::new(complements).expect("non-empty");
        let failure = pairs
            .iter()
            .enumerate()
            .filter(|(_, b)| is_half_pair(b))
            .find_map(|(j, b)| {
                complements.witness_under(b).is_none().then(|| {
                    format!(
                        "complements {} not under B_{j} = {}",
                        listing(&complements),
                        listing(b)
                    )
                })
            });
        Outcome::from_first_failure(failure)
    }));
    checks.push(Check::run("heavy-words-under-other-pairs", || {
        if odd {
            return skip();
        }
        let failure = pairs
            .iter()
            .enumerate()
            .filter(|(_, b)| !is_half_pair(b))
            .find_map(|(j, b)| {
                b.iter().all(|v| v.weight() < half + 1).then(|| {
                    format!(
                        "B_{j} = {} has no word of weight >= {}",
                        listing(b),
                        half + 1
                    )
                })
            });
        Outcome::from_first_failure(failure)
    }));
    checks.push(
        Check::run("heavy-member-strict", || {
            if odd {
                return skip();
            }
            let failure = pairs
                .iter()
                .enumerate()
                .filter(|(_, b)| !is_half_pair(b))
                .find_map(|(j, b)| {
                    b.iter().all(|v| v.weight() <= half + 1).then(|| {
                        format!(
                            "B_{j} = {} has no word of weight > {}; the >= form holds",
                            listing(b),
                            half + 1
                        )
                    })
                });
            Outcome::from_first_failure(failure)
        })
        .informational(),
    );
    VerificationReport::new(code, checks)
}

/// Every first-page block holds exactly the weight-`u` words inside its pattern.
pub fn check_page_one_structure(code: &PrioCode) -> VerificationReport {
    let check = Check::run("page1-structure", || {
        let failure = code
            .page_one()
            .entries()
            .iter()
            .enumerate()
            .find_map(|(i, e)| {
                let support = e.pattern.support();
                if let Some(v) = e
                    .code
                    .iter()
                    .find(|v| v.weight() != e.u || !v.covered_by(&support))
                {
                    return Some(format!(
                        "A_{i} holds {v}, outside weight {} on {:?}",
                        e.u,
                        e.pattern.positions()
                    ));
                }
                let expected = binomial(span(e.u), e.u);
                (e.code.size() != expected)
                    .then(|| format!("A_{i} has {} words, expected {expected}", e.code.size()))
            });
        Outcome::from_first_failure(failure)
    });
    VerificationReport::new(code, vec![check])
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All checks, sorted by name.
pub fn verify_code(code: &PrioCode) -> VerificationReport {
    check_conditions(code)
        .merge(roundtrip_oracle(code))
        .merge(check_supplemental(code))
        .merge(check_page_one_structure(code))
}

/// Moves the `index`-th word of first-page message `from` into message `to`.
///
/// Used to build broken codes for negative tests. The source message must keep
/// at least one word.
pub fn move_vector(code: &PrioCode, from: usize, index: usize, to: usize) -> Result<PrioCode> {
    let count = code.page_one().message_count();
    let out_of_range = |i| Error::MessageOutOfRange {
        page: 1,
        index: i,
        count,
    };
    let source = code.page_one().message(from).ok_or(out_of_range(from))?;
    if code.page_one().message(to).is_none() {
        return Err(out_of_range(to));
    }
    let v = *source
        .vectors()
        .get(index)
        .ok_or(Error::MessageOutOfRange {
            page: 1,
            index,
            count: source.size(),
        })?;
    if source.size() < 2 {
        return Err(Error::EmptyCode);
    }
    let mut page_one = code.page_one().clone();
    page_one.message_mut(from).expect("checked").remove(&v);
    page_one.message_mut(to).expect("checked").insert(v)?;
    PrioCode::from_parts(page_one, code.page_two().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::PatternSource;

    fn code(n: usize) -> PrioCode {
        PrioCode::construct(n, PatternSource::Builtin).unwrap()
    }

    #[test]
    fn built_codes_pass() {
        for n in 2..=10 {
            let report = verify_code(&code(n));
            assert!(report.passed(), "{}", report.to_text());
        }
        let report = check_conditions(&code(3));
        assert_eq!((report.n, report.m1, report.m2), (3, 5, 4));
        assert_eq!(report.checks.len(), 3);
    }

    #[test]
    fn roundtrip_counts() {
        for (n, pairs) in [(3, 20), (4, 56), (5, 144)] {
            let report = roundtrip_oracle(&code(n));
            let check = report.check("roundtrip").unwrap();
            assert_eq!(check.status, Status::Pass);
            assert_eq!(
                check.detail.as_deref(),
                Some(format!("{pairs} pairs").as_str())
            );
        }
    }

    #[test]
    fn duplicated_message_is_caught() {
        let mut c = code(3);
        let mut page_one = c.page_one().clone();
        page_one
            .replace_message(1, page_one.message(0).unwrap().clone())
            .unwrap();
        c = PrioCode::from_parts(page_one, c.page_two().clone()).unwrap();
        let report = check_conditions(&c);
        let check = report.check("page1-disjoint").unwrap();
        assert_eq!(check.status, Status::Fail);
        assert_eq!(
            check.counterexample.as_deref(),
            Some("A_0 and A_1 share 000")
        );
        assert!(!report.passed());
        assert!(!roundtrip_oracle(&c).passed());
    }

    #[test]
    fn supplemental_checks_even_n() {
        for n in (2..=12).step_by(2) {
            let report = check_supplemental(&code(n));
            assert!(report.passed(), "{}", report.to_text());
            for name in [
                "supplemental-disjoint",
                "supplemental-included",
                "half-complements-under-half-pairs",
                "heavy-words-under-other-pairs",
            ] {
                assert_eq!(
                    report.check(name).unwrap().status,
                    Status::Pass,
                    "{name} n={n}"
                );
            }
            // A pair with weights n/2 - 1 and n/2 + 1 always exists.
            let strict = report.check("heavy-member-strict").unwrap();
            assert_eq!(strict.status, Status::Fail);
            assert!(strict.informational);
        }
        let odd = check_supplemental(&code(5));
        assert!(odd.checks.iter().all(|c| c.status == Status::Skipped));
    }

    #[test]
    fn moved_vector_breaks_n5() {
        let c = code(5);
        let (m1, _) = c.message_counts();
        let mut tried = 0;
        for from in 0..m1 {
            let size = c.page_one().message(from).unwrap().size();
            if size < 2 {
                continue;
            }
            for index in 0..size {
                for to in (0..m1).filter(|&t| t != from) {
                    let broken = move_vector(&c, from, index, to).unwrap();
                    assert!(!check_conditions(&broken).passed());
                    tried += 1;
                }
            }
        }
        assert!(tried > 100);
        assert_eq!(move_vector(&c, 0, 0, 1).map(|_| ()), Err(Error::EmptyCode));
    }

    #[test]
    fn structure_check_detects_foreign_word() {
        let c = code(5);
        let mut page_one = c.page_one().clone();
        let stray = ConstituentCode::new(vec!["11000".parse().unwrap()]).unwrap();
        page_one.replace_message(1, stray).unwrap();
        let broken = PrioCode::from_parts(page_one, c.page_two().clone()).unwrap();
        let report = check_page_one_structure(&broken);
        assert!(!report.passed());
        assert!(report.checks[0]
            .counterexample
            .as_deref()
            .unwrap()
            .starts_with("A_1 holds 11000"));
    }
}
