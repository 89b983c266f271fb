//! Feature hashing for bag-of-words text, two ways:
//!
//! - **Hashing trick** ([`hash_trick`]): tokens hash to vector indices
//!   (MurmurHash3, seed 0) and the vector is bumped there, optionally with
//!   a sign hash that cancels collision bias.
//! - **Additive hashing** ([`additive`]): tokens map to pseudo-random
//!   ±1/√L vectors from their SHAKE-256 digests and a document is the
//!   L2-normalized sum. Distinct-token vectors are almost orthogonal
//!   (dot products have mean 0, std 1/√L), and replacing a token is an
//!   O(1) incremental update instead of a re-encode.
//!
//! Around the encoders: tokenizers ([`tokenize`]), cosine similarity and
//! vector statistics ([`vector`]), a nearest-neighbor classifier
//! ([`classify`]), dataset loaders and seeded splits ([`data`]), and
//! reproducible experiment harnesses with CSV/JSON output
//! ([`experiment`]).

pub mod additive;
pub mod classify;
pub mod data;
pub mod error;
pub mod experiment;
pub mod hash_trick;
pub mod tokenize;
pub mod vector;

pub use error::{Error, Result};
pub use vector::FeatureVector;
