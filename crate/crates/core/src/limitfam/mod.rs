//! Increasing families of key polynomials and the analysis of limit key
//! polynomial candidates along them.

mod analysis;
mod family;
mod pipelines;
mod table;

pub use analysis::{analyze, members, minimal_lkp, FamilyAnalysis, IndexSets, Ladder, LevelRow, Mode, DEFAULT_HORIZON};
pub use family::{is_p_power, ord_p, Catalog, DriftMode, Family, Member, PPosition, Plant, CAPACITY};
pub use pipelines::*;
pub use table::{beta_table, degree_one_taylor, BetaTable};
