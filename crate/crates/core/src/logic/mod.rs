//! Terms, atoms, Horn clauses, substitutions and the rule-file parser.

mod atom;
mod clause;
mod parser;
mod subst;
mod symbols;

pub use atom::{match_head, Args, Atom, GroundAtom, Term};
pub use clause::{herbrand_base, herbrand_base_size, tuples, CountOverflow, HornClause, Theory};
pub use parser::{parse_theory, parse_theory_with, ParseError};
pub use subst::Substitution;
pub use symbols::{write_constant, ArityConflict, ConstId, PredId, Symbols, VarId};
