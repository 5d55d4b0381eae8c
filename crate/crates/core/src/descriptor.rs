//! JSON file format for a constructed code.

use serde::{Deserialize, Serialize};

use crate::bits::{BitVector, ConstituentCode};
use crate::codec::PrioCode;
use crate::error::{Error, Result};
use crate::page_one::{PageOneCode, PageOneEntry, PermutationPattern};
use crate::page_two::PageTwoCode;

/// One first-page message. `message` is its index in the code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageOneRecord {
    pub message: usize,
    pub u: usize,
    pub pattern: Vec<usize>,
    pub vectors: Vec<BitVector>,
}

/// The second page is regenerated from `n`; the listing is optional.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageTwoRecord {
    pub listed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codes: Option<Vec<[BitVector; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDescriptor {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub page_one: Vec<PageOneRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supplemental: Option<Vec<BitVector>>,
    pub page_two: PageTwoRecord,
}

impl CodeDescriptor {
    pub fn from_code(code: &PrioCode, list_page_two: bool) -> Self {
        let (m1, m2) = code.message_counts();
        let page_one = code
            .page_one()
            .entries()
            .iter()
            .enumerate()
            .map(|(message, e)| PageOneRecord {
                message,
                u: e.u,
                pattern: e.pattern.positions(),
                vectors: e.code.vectors().to_vec(),
            })
            .collect();
        let codes = list_page_two.then(|| {
            code.page_two()
                .codes()
                .iter()
                .map(|pair| [pair.vectors()[0], pair.vectors()[1]])
                .collect()
        });
        Self {
            n: code.n(),
            m1,
            m2,
            page_one,
            supplemental: code.page_one().supplemental().map(|s| s.vectors().to_vec()),
            page_two: PageTwoRecord {
                listed: list_page_two,
                codes,
            },
        }
    }

    /// Rebuilds the code. First-page words are taken as written and only
    /// checked for length, so a damaged file still loads for verification.
    pub fn to_code(&self) -> Result<PrioCode> {
        let n = self.n;
        let bad = |msg: String| Error::Descriptor(msg);
        let mut entries = Vec::with_capacity(self.page_one.len());
        for (i, record) in self.page_one.iter().enumerate() {
            if record.message != i {
                return Err(bad(format!(
                    "page_one[{i}] has message index {}",
                    record.message
                )));
            }
            entries.push(PageOneEntry {
                u: record.u,
                pattern: PermutationPattern::new(n, record.u, &record.pattern)?,
                code: words(n, &record.vectors)?,
            });
        }
        let supplemental = self
            .supplemental
            .as_deref()
            .map(|s| words(n, s))
            .transpose()?;
        let page_one = PageOneCode::from_parts(n, entries, supplemental)?;
        let page_two = PageTwoCode::build(n)?;
        match (&self.page_two.listed, &self.page_two.codes) {
            (true, Some(codes)) => {
                let expected = page_two.codes();
                let same = codes.len() == expected.len()
                    && codes.iter().zip(expected).all(|(pair, code)| {
                        ConstituentCode::new(pair.to_vec()).ok().as_ref() == Some(code)
                    });
                if !same {
                    return Err(bad("page_two listing differs from the construction".into()));
                }
            }
            (false, None) => {}
            _ => return Err(bad("page_two.listed disagrees with page_two.codes".into())),
        }
        let code = PrioCode::from_parts(page_one, page_two)?;
        if code.message_counts() != (self.m1, self.m2) {
            return Err(bad(format!(
                "declared (M1, M2) = ({}, {}) but the pages hold {:?}",
                self.m1,
                self.m2,
                code.message_counts()
            )));
        }
        Ok(code)
    }

    /// Canonical form: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("descriptor serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))
    }
}

fn words(n: usize, vectors: &[BitVector]) -> Result<ConstituentCode> {
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::LengthMismatch {
            left: n,
            right: v.len(),
        });
    }
    ConstituentCode::new(vectors.to_vec())
}
