//! Path validation with bimodal aggregate signatures.
//!
//! - [`pairing`]: BN254 groups, encodings and hash-to-group.
//! - [`bimodal`]: sequential and cross-chain aggregation on one signature.
//! - [`baseline`]: per-hop 96-byte signatures for the conventional suite.
//! - [`wire`]: update message codec for plain, conventional and APVAS suites.
//! - [`router`]: per-AS verify, select, re-sign and store.
//! - [`netsim`]: deterministic simulator, memory accounting and reports.

pub mod baseline;
pub mod bimodal;
pub mod netsim;
pub mod pairing;
pub mod router;
pub mod wire;

pub use bimodal::{
    agg_sign, seq_agg_sign, user_key_gen, verify, Chain, ChainEntry, ChainSlot, KeyPair, SigError, SignatureClaim,
};
pub use netsim::{run_experiment, ExperimentResult, NetsimError, TopologyConfig};
pub use pairing::{setup, GroupElem, KeyElem, PublicParams, Scalar, TargetElem};
pub use router::{MemoryModel, RibSnapshot, Router, RouterConfig};
pub use wire::{decode_update, encode_update, Suite, UpdateMessage};
