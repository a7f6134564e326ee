//! Per-hop signatures for the conventional suite.
//!
//! Schnorr over the first source group with a deterministic nonce:
//! `R = kG`, `e = H(R || X || m)`, `s = k + e x`, signature `R(64) || s(32)`,
//! which is exactly the 96 bytes a raw 384-bit ECDSA `r || s` occupies.

use crate::pairing::{expand_message_xmd, GroupElem, PublicParams, Scalar, GROUP_ELEM_LEN, SCALAR_LEN};
use crate::wire::BASELINE_SIG_LEN;

const NONCE_DST: &[u8] = b"APVAS-BASELINE-NONCE-v1";
const CHALLENGE_DST: &[u8] = b"APVAS-BASELINE-CHALLENGE-v1";

fn hash_to_scalar(parts: &[&[u8]], dst: &[u8]) -> Scalar {
    let mut msg = Vec::new();
    for p in parts {
        msg.extend_from_slice(&(p.len() as u32).to_be_bytes());
        msg.extend_from_slice(p);
    }
    Scalar::from_be_bytes_mod_order(&expand_message_xmd(&msg, dst, 48))
}

/// Public verification key for a secret scalar.
pub fn public_key(params: &PublicParams, sk: &Scalar) -> GroupElem {
    params.g1_generator().mul(sk)
}

pub fn sign(params: &PublicParams, sk: &Scalar, msg: &[u8]) -> [u8; BASELINE_SIG_LEN] {
    let pk = public_key(params, sk);
    let mut k = hash_to_scalar(&[&sk.to_bytes(), msg], NONCE_DST);
    if k.is_zero() {
        k = Scalar::one();
    }
    let r = params.g1_generator().mul(&k);
    let e = hash_to_scalar(&[&r.to_bytes(), &pk.to_bytes(), msg], CHALLENGE_DST);
    let s = k + e * *sk;

    let mut out = [0u8; BASELINE_SIG_LEN];
    out[..GROUP_ELEM_LEN].copy_from_slice(&r.to_bytes());
    out[GROUP_ELEM_LEN..].copy_from_slice(&s.to_bytes());
    out
}

pub fn verify(params: &PublicParams, pk: &GroupElem, msg: &[u8], sig: &[u8]) -> bool {
    if sig.len() != BASELINE_SIG_LEN || pk.is_identity() {
        return false;
    }
    let (Ok(r), Ok(s)) = (
        GroupElem::from_bytes(&sig[..GROUP_ELEM_LEN]),
        Scalar::from_bytes(&sig[GROUP_ELEM_LEN..GROUP_ELEM_LEN + SCALAR_LEN]),
    ) else {
        return false;
    };
    let e = hash_to_scalar(&[&r.to_bytes(), &pk.to_bytes(), msg], CHALLENGE_DST);
    params.g1_generator().mul(&s) == r + pk.mul(&e)
}
