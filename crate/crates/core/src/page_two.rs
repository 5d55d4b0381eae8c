//! Second-page code: `2^(n-1)` complementary pairs covering `{0,1}^n`.

use crate::bits::{BitVector, ConstituentCode, MAX_LEN};
use crate::error::{Error, Result};

/// Smallest code length handled by the constructions.
pub const MIN_LEN: usize = 2;

/// The second-page code. Message `j` is the pair `{b_j, 1 ⊕ b_j}` where `b_j`
/// has a leading 0 and its remaining `n - 1` coordinates spell `j` in binary,
/// most significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageTwoCode {
    n: usize,
    codes: Vec<ConstituentCode>,
}

impl PageTwoCode {
    pub fn build(n: usize) -> Result<Self> {
        check_code_len(n)?;
        let codes = (0..1u32 << (n - 1))
            .map(|j| {
                let b = BitVector::from_raw(n, j);
                // b < complement(b) since b has a leading 0, so the pair is stored leading-zero first.
                ConstituentCode::new(vec![b, b.complement()])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, codes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `M_2 = 2^(n-1)`.
    pub fn message_count(&self) -> usize {
        self.codes.len()
    }

    pub fn codes(&self) -> &[ConstituentCode] {
        &self.codes
    }

    pub fn code(&self, j: usize) -> Option<&ConstituentCode> {
        self.codes.get(j)
    }

    /// Index of the pair containing `v`. Every length-`n` vector lies in exactly one pair.
    pub fn locate(&self, v: &BitVector) -> Result<usize> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: v.len(),
            });
        }
        let lead_zero = if v.get(0) { v.complement() } else { *v };
        Ok(lead_zero.value() as usize)
    }

    /// Splits the pairs into those whose members both weigh `n/2` and the rest.
    pub fn partition_by_half_weight(&self) -> Result<(Vec<ConstituentCode>, Vec<ConstituentCode>)> {
        if self.n % 2 == 1 {
            return Err(Error::OddLength(self.n));
        }
        let half = self.n / 2;
        Ok(self
            .codes
            .iter()
            .cloned()
            .partition(|c| c.iter().all(|v| v.weight() == half)))
    }
}

pub(crate) fn check_code_len(n: usize) -> Result<()> {
    if (MIN_LEN..=MAX_LEN).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidLength(n))
    }
}
