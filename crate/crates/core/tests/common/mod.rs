//! Generators and oracles shared by the integration tests.
#![allow(dead_code)]

pub mod corpus;
pub mod git;
pub mod graphs;
pub mod histories;
pub mod programs;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
