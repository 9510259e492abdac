//! Exact factorization search for the t-metric Mahler measure of positive
//! rationals.
//!
//! A positive rational alpha is split into its prime ladder, the sequence
//! of prime occurrences ordered by descending prime. Factorizations of the
//! ladder's partial products form trees under single-prime extension; the
//! leaves of the canonical optimal tree realize the best upper bound
//! (sum of entry measures to the t) ^ (1/t) for every t at once, because
//! the lexicographic order on measure vectors is the eventual t-norm
//! order. Everything is computed in exact integer arithmetic; floating
//! point enters only when a bound is finally evaluated.
//!
//! The crate exposes the arithmetic layer ([`rational`]), factorizations
//! and their one-step extensions ([`factorization`]), tree construction
//! and homomorphisms ([`forest`]), measure class quotients ([`quotient`]),
//! and search strategies plus exhaustive cross-checks ([`search`]).

#![forbid(unsafe_code)]

pub mod error;
pub mod factorization;
pub mod forest;
pub mod primes;
pub mod quotient;
pub mod rational;
pub mod search;

pub use error::{Error, Result};
pub use factorization::{
    is_direct_subfactorization, lex_compare, measure_equivalent, Factorization, Fraction,
    MeasureVector,
};
pub use forest::{
    build_canonical_optimal, build_maximal_primitive, find_homomorphism, is_isomorphic, ChildOrder,
    ExportFormat, FactorizationTree, NodeId, TreeBuilder, TreeKind,
};
pub use quotient::{quotient, ClassId, MeasureClass, MeasureClassGraph};
pub use rational::{LadderEntry, PrimeLadder, PrimeSign, ReducedRational};
pub use search::{
    lex_filter, mt_upper, mt_upper_with, optimal_factorizations, optimal_factorizations_with,
    oracle_enumerate, oracle_enumerate_all, oracle_enumerate_primitive, sample_alpha,
    staged_frontier, staged_frontier_with, t_norm, verify_theorems, verify_theorems_with,
    CheckStatus, PruneRecord, SearchConfig, SearchResult, SearchStrategy, TheoremCheck,
    VerifyConfig, VerifyReport,
};
