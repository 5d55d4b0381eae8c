//! Two-page codes for three-level flash cells.
//!
//! Each page is written once without reading the other. The first page is read
//! with threshold 2, the second with threshold 1, and the cell level is the sum
//! of the two page bits.

pub mod bits;
pub mod codec;
pub mod descriptor;
pub mod error;
pub mod page_one;
pub mod page_two;
pub mod patterns;
pub mod rates;
pub mod verify;

pub use bits::{BitVector, CellState, ConstituentCode};
pub use codec::{diff_table, CodeTable, Errata, PrioCode};
pub use descriptor::CodeDescriptor;
pub use error::{Error, Result};
pub use page_one::{PageOneCode, PermutationPattern};
pub use page_two::PageTwoCode;
pub use patterns::{PatternFamily, PatternSource, Provenance};
pub use verify::{verify_code, VerificationReport};
