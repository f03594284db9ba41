//! Keyless data fragmentation for multi-site storage.
//!
//! Data is split into `k` fragments by a lightweight GF(2^8) encoding that
//! chains each block to the previous blocks of its `c - 1` neighbor
//! fragments, with secret share permutations XOR-split across the fragments.
//! Fragments are then dispersed over `c` sites so that no site holds a
//! fragment together with any of its neighbors.
//!
//! The crate also ships reference schemes (Shamir, IDA, SSMS, AONT-RS),
//! systematic Reed-Solomon parity, statistical fragment analysis and a
//! throughput harness.

pub mod analysis;
pub mod baselines;
pub mod bench;
pub mod codec;
pub mod dispersal;
pub mod erasure;
pub mod error;
pub mod format;
pub mod gf256;
pub mod matrix;
pub mod permutation;
pub mod rng;

pub use codec::{decode_data, encode_data, CodecParams, Fragment, FragmentSet};
pub use error::{Error, ErrorKind, Result};
