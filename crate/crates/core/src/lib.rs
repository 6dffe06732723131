//! Horn-clause theories, fact stores and the `BC_{w,d}` grounders.

pub mod facts;
pub mod gmn;
pub mod grounder;
pub mod logic;
pub mod oracle;
pub mod reasoner;
pub mod synth;
pub mod table;

pub use facts::{Dataset, FactStore, KgStats};
pub use grounder::{ground, GrounderParams, GroundingResult, Limit};
pub use logic::{parse_theory, GroundAtom, Symbols, Theory};
pub use table::{AtomId, AtomTable};
