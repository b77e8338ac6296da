//! Finite relational structures and the machinery connecting constraint
//! satisfaction to path-shaped resolution: homomorphism search, path
//! decompositions with two-component width, existential-positive logic with
//! bounded variable budgets, linear Datalog evaluation, Krom monotone SNP,
//! pebble-relation games, and specialized polynomial solvers for
//! implicational and implicative-hitting-set templates.
//!
//! The crate is organized bottom-up:
//!
//! - [`structure`], [`hom`]: structures, partial maps, homomorphisms.
//! - [`pathwidth`]: decompositions, width pairs, exact width search,
//!   bounded-width structure enumeration.
//! - [`logic`]: existential-positive formulas, canonical conjunctive
//!   queries, evaluation, and compilation of decompositions to formulas.
//! - [`datalog`]: linear Datalog programs, semi-naive and naive fixpoints,
//!   derivation witnesses.
//! - [`snp`]: Krom monotone SNP sentences, translations to and from linear
//!   Datalog, and evaluation by grounding to 2-SAT.
//! - [`game`]: the pebble-relation game, canonical play, and obstruction
//!   extraction.
//! - [`implicational`], [`ihsb`], [`sat_encoding`], [`generators`]:
//!   special template classes with direct solvers, plus small structure
//!   generators used throughout the test suites.
//! - [`text`]: plain-text formats for all of the above.

pub mod datalog;
pub mod error;
pub mod game;
pub mod generators;
pub mod hom;
pub mod ihsb;
pub mod implicational;
pub mod logic;
pub mod pathwidth;
pub mod sat_encoding;
pub mod snp;
pub mod structure;
pub mod text;
mod twosat;

pub use error::{Error, Result};
pub use hom::{all_homomorphisms, find_homomorphism, is_homomorphism};
pub use structure::{
    disjoint_union, gaifman_graph, induced_substructure, validate_structure, PartialMap,
    RelationalStructure, Vocabulary,
};
