//! Executable versions of the strategy constructions behind the main results.

pub mod claim;
pub mod counterplay;
pub mod extract;
pub mod steal;

pub use claim::{
    claim_search, refute_two_g1, refute_two_g1_with, ClaimConfig, ClaimOutcome, ClaimWitness,
    DiagonalPair, DirectDefeat, RefutationEvidence,
};
pub use counterplay::{defeat_one_g2, CounterplayEvidence, TowerNum, TowerScale};
pub use extract::{
    build_g_h, extract_dominating_function, DominatingFunctionTable, GFunction, GhTables,
};
pub use steal::{steal_two_g2, StealEvidence};
