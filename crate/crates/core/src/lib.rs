//! Exact defect numbers, indices and generalized inverses for Fredholm
//! pairs and chains over finite-dimensional rational vector spaces.
//!
//! Every computation is done in `Q` with arbitrary-precision integers, so
//! each index identity checked here is an exact integer equation.

pub mod chain;
pub mod error;
pub mod generate;
pub mod matrix;
pub mod pair;
pub mod rational;
pub mod report;
pub mod subspace;

pub use chain::{
    chain_defects, fold_to_pair, quotient_chain, verify_remark_2_3, verify_theorem_4_2,
    verify_theorem_4_4, ChainDefects, ChainInstance, QuotientChain,
};
pub use error::{Error, Result};
pub use generate::{instance_seed, random_chain, random_matrix, random_pair, GenConfig, Generator};
pub use matrix::{RankFactorization, RatMatrix, Rref};
pub use pair::{
    build_extensions, build_v, composition_ranges, fredholm_data, induced_pair, pair_defects,
    regularity_witness, verify_theorem_3_2, verify_theorem_3_4, verify_theorem_3_6, FredholmData,
    InducedPair, InverseBundle, InverseMode, PairDefects, PairInstance, RegularityWitness,
};
pub use rational::Rational;
pub use report::{Detail, TheoremReport};
pub use subspace::{
    induced_map, push_image, quotient, ComplementWitness, QuotientStructure, Subspace,
};
