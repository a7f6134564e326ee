//! Hash-to-curve for the first source group of BN254.
//!
//! `expand_message_xmd` with SHA-256, `hash_to_field` with 48-byte chunks and
//! the Shallue-van de Woestijne map (Z = 1) in its straight-line form, as
//! described by RFC 9380. The random-oracle variant maps two field elements
//! and adds the results; G1 of BN254 has cofactor 1 so no clearing is needed.

use std::sync::OnceLock;

use ark_bn254::{Fq, G1Affine, G1Projective};
use ark_ff::{BigInteger, Field, One, PrimeField, Zero};
use sha2::{Digest, Sha256};

/// Domain separation tag mixed into every hash-to-group evaluation.
pub const HASH_TO_GROUP_DST: &[u8] = b"APVAS-H2G-v1";

/// Bytes drawn per field element (ceil((254 + 128) / 8)).
const FIELD_CHUNK: usize = 48;

const SHA256_OUT: usize = 32;
const SHA256_BLOCK: usize = 64;

/// RFC 9380 `expand_message_xmd` instantiated with SHA-256.
///
/// Panics if `len` exceeds 255 hash blocks or the tag is longer than 255
/// bytes; neither can happen for the fixed lengths used in this crate.
pub fn expand_message_xmd(msg: &[u8], dst: &[u8], len: usize) -> Vec<u8> {
    let ell = len.div_ceil(SHA256_OUT);
    assert!(ell <= 255 && len <= u16::MAX as usize, "xmd output too long");
    assert!(dst.len() <= 255, "domain tag too long");

    let mut dst_prime = dst.to_vec();
    dst_prime.push(dst.len() as u8);

    let b0 = Sha256::new()
        .chain_update([0u8; SHA256_BLOCK])
        .chain_update(msg)
        .chain_update((len as u16).to_be_bytes())
        .chain_update([0u8])
        .chain_update(&dst_prime)
        .finalize();

    let mut bi = Sha256::new()
        .chain_update(b0)
        .chain_update([1u8])
        .chain_update(&dst_prime)
        .finalize();

    let mut out = Vec::with_capacity(ell * SHA256_OUT);
    out.extend_from_slice(&bi);
    for i in 2..=ell {
        let mixed: Vec<u8> = b0.iter().zip(bi.iter()).map(|(a, b)| a ^ b).collect();
        bi = Sha256::new()
            .chain_update(&mixed)
            .chain_update([i as u8])
            .chain_update(&dst_prime)
            .finalize();
        out.extend_from_slice(&bi);
    }
    out.truncate(len);
    out
}

fn hash_to_field(msg: &[u8], dst: &[u8]) -> [Fq; 2] {
    let bytes = expand_message_xmd(msg, dst, 2 * FIELD_CHUNK);
    [
        Fq::from_be_bytes_mod_order(&bytes[..FIELD_CHUNK]),
        Fq::from_be_bytes_mod_order(&bytes[FIELD_CHUNK..]),
    ]
}

fn sgn0(x: &Fq) -> bool {
    x.into_bigint().is_odd()
}

fn is_square(x: &Fq) -> bool {
    !x.legendre().is_qnr()
}

fn curve_rhs(x: &Fq) -> Fq {
    x.square() * x + Fq::from(3u64)
}

struct SvdwConstants {
    z: Fq,
    c1: Fq,
    c2: Fq,
    c3: Fq,
    c4: Fq,
}

fn constants() -> &'static SvdwConstants {
    static CONSTANTS: OnceLock<SvdwConstants> = OnceLock::new();
    CONSTANTS.get_or_init(|| {
        let z = Fq::one();
        let gz = curve_rhs(&z);
        // 3 Z^2 + 4 A with A = 0
        let h = z.square() * Fq::from(3u64);
        let c1 = gz;
        let c2 = -z * Fq::from(2u64).inverse().expect("2 is invertible");
        let mut c3 = (-gz * h).sqrt().expect("-g(Z)(3Z^2) is square for Z = 1");
        if sgn0(&c3) {
            c3 = -c3;
        }
        let c4 = -(gz * Fq::from(4u64)) * h.inverse().expect("3 is invertible");
        SvdwConstants { z, c1, c2, c3, c4 }
    })
}

/// Shallue-van de Woestijne map from a field element to a curve point.
fn map_to_curve(u: &Fq) -> G1Affine {
    let k = constants();

    let mut tv1 = u.square() * k.c1;
    let tv2 = Fq::one() + tv1;
    tv1 = Fq::one() - tv1;
    let tv3 = (tv1 * tv2).inverse().unwrap_or_else(Fq::zero);
    let tv4 = *u * tv1 * tv3 * k.c3;

    let x1 = k.c2 - tv4;
    let e1 = is_square(&curve_rhs(&x1));
    let x2 = k.c2 + tv4;
    let e2 = is_square(&curve_rhs(&x2)) && !e1;
    let x3 = (tv2.square() * tv3).square() * k.c4 + k.z;

    let x = if e1 {
        x1
    } else if e2 {
        x2
    } else {
        x3
    };
    let mut y = curve_rhs(&x)
        .sqrt()
        .expect("one of the three candidates is always on the curve");
    if sgn0(u) != sgn0(&y) {
        y = -y;
    }
    G1Affine::new_unchecked(x, y)
}

/// Hash an arbitrary byte string to a point of G1 under `dst`.
pub fn hash_to_g1(msg: &[u8], dst: &[u8]) -> G1Projective {
    let [u0, u1] = hash_to_field(msg, dst);
    let q0 = map_to_curve(&u0);
    let q1 = map_to_curve(&u1);
    G1Projective::from(q0) + q1
}
