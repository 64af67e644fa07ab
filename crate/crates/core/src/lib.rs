//! One-shot private information retrieval over prime fields.
//!
//! The crate builds linear one-shot PIR schemes for MDS-coded storage,
//! refines and lifts them to many messages through symbolic matrices, and
//! runs the resulting multi-server protocol: query generation, server
//! answers and decoding. Exact rate formulas live in [`rates`].
//!
//! Server and message indices are 0-based everywhere in this crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod field;
pub mod lifted;
pub mod linalg;
pub mod mds;
pub mod oneshot;
pub mod protocol;
pub mod rates;
pub mod rng;
pub mod symbolic;

pub use error::{PirError, Result};
pub use field::{FieldElement, FieldModulus, FieldOp, FieldVector};
pub use lifted::{DecodingPlan, LiftedScheme, NoiseGroup, Slot, SlotRole};
pub use linalg::FieldMatrix;
pub use mds::{decode_from_subset, Database, GeneratorSpec, PirParams};
pub use oneshot::{Construction, OneShotScheme};
pub use protocol::{
    answer_batch, decode, run_protocol, DecodingState, NoiseSampler, QueryBatch, QueryProtocol, QueryRandomness,
    RandomnessLayout, ResponseBatch,
};
pub use rates::RateReport;
pub use symbolic::{Position, SymbolicMatrix};
