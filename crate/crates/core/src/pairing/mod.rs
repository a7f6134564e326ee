//! Pairing-group algebra over BN254.
//!
//! The scheme is written against a symmetric map `e: G x G -> G_T`. BN254 is
//! asymmetric, so the roles are fixed once here: signatures, commitments and
//! hash outputs live in the first source group ([`GroupElem`]); public keys
//! and the verification generator `P` live in the second ([`KeyElem`]).
//! [`PublicParams::pairing`] always takes its arguments in that order.
//!
//! Encodings:
//! - [`GroupElem`]: 64 bytes, `x || y`, each a 32-byte big-endian base field
//!   element. The identity is the all-zero string.
//! - [`KeyElem`]: 64 bytes, compressed `x.c0 || x.c1`. Bit 7 of the first byte
//!   is set when `y` is the larger of `{y, -y}`. The identity is all-zero.
//! - [`TargetElem`]: 384 bytes, the twelve base-field coefficients of the
//!   degree-12 tower, big-endian, in tower order.
//! - [`Scalar`]: 32-byte big-endian integer below the group order.

mod h2c;

use std::fmt;
use std::sync::Arc;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use ark_bn254::{Bn254, Fq, Fq12, Fq2, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::short_weierstrass::SWCurveConfig;
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::{BigInteger, Field, One, PrimeField, UniformRand, Zero};
use rand::{CryptoRng, RngCore};
use thiserror::Error;

pub use h2c::{expand_message_xmd, HASH_TO_GROUP_DST};

/// Encoded size of first-source-group elements and public keys.
pub const GROUP_ELEM_LEN: usize = 64;
/// Encoded size of public keys.
pub const KEY_ELEM_LEN: usize = 64;
/// Encoded size of target-group elements.
pub const TARGET_ELEM_LEN: usize = 384;
/// Encoded size of scalars.
pub const SCALAR_LEN: usize = 32;

const FQ_LEN: usize = 32;
const SIGN_FLAG: u8 = 0x80;
const RESERVED_FLAG: u8 = 0x40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("unsupported curve {0:?}")]
    UnsupportedCurve(String),
    #[error("invalid {what} encoding: {reason}")]
    Decode {
        what: &'static str,
        reason: &'static str,
    },
}

impl PairingError {
    fn decode(what: &'static str, reason: &'static str) -> Self {
        PairingError::Decode { what, reason }
    }
}

/// Supported curve families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveId {
    Bn254,
}

impl CurveId {
    pub fn name(self) -> &'static str {
        match self {
            CurveId::Bn254 => "bn254",
        }
    }
}

impl std::str::FromStr for CurveId {
    type Err = PairingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bn254" | "bn254-like" => Ok(CurveId::Bn254),
            other => Err(PairingError::UnsupportedCurve(other.to_string())),
        }
    }
}

/// Identifier recorded in serialized parameters for the hash-to-group map.
pub const HASH_SUITE_ID: &str = "BN254G1_XMD:SHA-256_SVDW_RO_";

/// Public pairing parameters: curve, generators and the hash-to-group map.
#[derive(Clone)]
pub struct PublicParams {
    curve: CurveId,
    generator: KeyElem,
    g1_generator: GroupElem,
    /// Miller-loop line coefficients of `generator`.
    generator_lines: Arc<<Bn254 as Pairing>::G2Prepared>,
}

/// Everything else is derived from the curve.
impl PartialEq for PublicParams {
    fn eq(&self, other: &Self) -> bool {
        self.curve == other.curve
    }
}

impl Eq for PublicParams {}

impl fmt::Debug for PublicParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PublicParams")
            .field("curve", &self.curve.name())
            .field("order_bits", &self.order_bits())
            .finish()
    }
}

/// Generate the public parameters for a named curve family.
///
/// The generators are the curve's published ones, so the result is a pure
/// function of `curve`.
pub fn setup(curve: &str) -> Result<PublicParams, PairingError> {
    let curve: CurveId = curve.parse()?;
    Ok(PublicParams::new(curve))
}

impl PublicParams {
    pub fn new(curve: CurveId) -> Self {
        match curve {
            CurveId::Bn254 => PublicParams {
                curve,
                generator: KeyElem(G2Projective::generator()),
                g1_generator: GroupElem(G1Projective::generator()),
                generator_lines: Arc::new(G2Affine::generator().into()),
            },
        }
    }

    pub fn curve(&self) -> CurveId {
        self.curve
    }

    /// The generator `P` used on the verification side of every pairing.
    pub fn generator(&self) -> &KeyElem {
        &self.generator
    }

    /// Generator of the first source group.
    pub fn g1_generator(&self) -> &GroupElem {
        &self.g1_generator
    }

    /// Big-endian prime order `p` of all three groups.
    pub fn prime_order(&self) -> [u8; SCALAR_LEN] {
        let mut out = [0u8; SCALAR_LEN];
        out.copy_from_slice(&Fr::MODULUS.to_bytes_be());
        out
    }

    pub fn order_bits(&self) -> u32 {
        Fr::MODULUS_BIT_SIZE
    }

    /// Canonical serialization: curve name, order, generator, hash suite and tag.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for field in [
            self.curve.name().as_bytes(),
            &self.prime_order(),
            &self.generator.to_bytes(),
            &self.g1_generator.to_bytes(),
            HASH_SUITE_ID.as_bytes(),
            HASH_TO_GROUP_DST,
        ] {
            out.extend_from_slice(&(field.len() as u16).to_be_bytes());
            out.extend_from_slice(field);
        }
        out
    }

    /// `H: {0,1}* -> G`, deterministic.
    pub fn hash_to_group(&self, msg: &[u8]) -> GroupElem {
        GroupElem(h2c::hash_to_g1(msg, HASH_TO_GROUP_DST))
    }

    /// The bilinear map, first source group on the left.
    pub fn pairing(&self, a: &GroupElem, b: &KeyElem) -> TargetElem {
        TargetElem(Bn254::pairing(a.0, b.0).0)
    }

    /// `pairing(a, generator)` using the precomputed generator lines.
    pub fn pairing_with_generator(&self, a: &GroupElem) -> TargetElem {
        let prepared: <Bn254 as Pairing>::G1Prepared = a.0.into_affine().into();
        let ml = Bn254::multi_miller_loop([prepared], [(*self.generator_lines).clone()]);
        TargetElem(Bn254::final_exponentiation(ml).expect("nonzero Miller loop output").0)
    }

    /// Product of pairings over paired slices.
    pub fn multi_pairing(&self, a: &[GroupElem], b: &[KeyElem]) -> TargetElem {
        assert_eq!(a.len(), b.len(), "multi_pairing length mismatch");
        let lhs: Vec<G1Affine> = a.iter().map(|g| g.0.into_affine()).collect();
        let rhs: Vec<G2Affine> = b.iter().map(|g| g.0.into_affine()).collect();
        TargetElem(Bn254::multi_pairing(lhs, rhs).0)
    }
}

/// Element of the group order's scalar field.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scalar(pub(crate) Fr);

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", hex::encode(&self.to_bytes()))
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Fr::zero())
    }

    pub fn one() -> Self {
        Scalar(Fr::one())
    }

    pub fn from_u64(v: u64) -> Self {
        Scalar(Fr::from(v))
    }

    /// Uniform scalar from a caller-owned RNG.
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        Scalar(Fr::rand(rng))
    }

    /// Reduce an arbitrary big-endian byte string modulo the group order.
    pub fn from_be_bytes_mod_order(bytes: &[u8]) -> Self {
        Scalar(Fr::from_be_bytes_mod_order(bytes))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn inverse(&self) -> Option<Self> {
        self.0.inverse().map(Scalar)
    }

    pub fn to_bytes(&self) -> [u8; SCALAR_LEN] {
        fq_like_bytes(&self.0.into_bigint().to_bytes_be())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PairingError> {
        if bytes.len() != SCALAR_LEN {
            return Err(PairingError::decode("scalar", "length must be 32"));
        }
        let candidate = Fr::from_be_bytes_mod_order(bytes);
        if candidate.into_bigint().to_bytes_be() != bytes {
            return Err(PairingError::decode("scalar", "not reduced"));
        }
        Ok(Scalar(candidate))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

/// Element of the first source group.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct GroupElem(pub(crate) G1Projective);

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElem({})", hex::encode(&self.to_bytes()))
    }
}

impl std::hash::Hash for GroupElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.to_bytes().hash(state)
    }
}

impl GroupElem {
    pub fn identity() -> Self {
        GroupElem(G1Projective::zero())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    pub fn mul(&self, s: &Scalar) -> Self {
        GroupElem(self.0 * s.0)
    }

    pub fn to_bytes(&self) -> [u8; GROUP_ELEM_LEN] {
        let mut out = [0u8; GROUP_ELEM_LEN];
        let affine = self.0.into_affine();
        if let Some((x, y)) = affine.xy() {
            out[..FQ_LEN].copy_from_slice(&fq_to_bytes(&x));
            out[FQ_LEN..].copy_from_slice(&fq_to_bytes(&y));
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PairingError> {
        const WHAT: &str = "group element";
        if bytes.len() != GROUP_ELEM_LEN {
            return Err(PairingError::decode(WHAT, "length must be 64"));
        }
        if bytes.iter().all(|b| *b == 0) {
            return Ok(Self::identity());
        }
        let x = fq_from_bytes(&bytes[..FQ_LEN]).ok_or(PairingError::decode(WHAT, "x not reduced"))?;
        let y = fq_from_bytes(&bytes[FQ_LEN..]).ok_or(PairingError::decode(WHAT, "y not reduced"))?;
        let p = G1Affine::new_unchecked(x, y);
        if !p.is_on_curve() {
            return Err(PairingError::decode(WHAT, "point not on curve"));
        }
        Ok(GroupElem(p.into()))
    }
}

impl Add for GroupElem {
    type Output = GroupElem;
    fn add(self, rhs: GroupElem) -> GroupElem {
        GroupElem(self.0 + rhs.0)
    }
}

impl AddAssign for GroupElem {
    fn add_assign(&mut self, rhs: GroupElem) {
        self.0 += rhs.0;
    }
}

impl Sub for GroupElem {
    type Output = GroupElem;
    fn sub(self, rhs: GroupElem) -> GroupElem {
        GroupElem(self.0 - rhs.0)
    }
}

impl Neg for GroupElem {
    type Output = GroupElem;
    fn neg(self) -> GroupElem {
        GroupElem(-self.0)
    }
}

/// Element of the second source group (public keys, generator `P`).
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct KeyElem(pub(crate) G2Projective);

impl fmt::Debug for KeyElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KeyElem({})", hex::encode(&self.to_bytes()))
    }
}

impl std::hash::Hash for KeyElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.to_bytes().hash(state)
    }
}

impl KeyElem {
    pub fn identity() -> Self {
        KeyElem(G2Projective::zero())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    pub fn mul(&self, s: &Scalar) -> Self {
        KeyElem(self.0 * s.0)
    }

    pub fn to_bytes(&self) -> [u8; KEY_ELEM_LEN] {
        let mut out = [0u8; KEY_ELEM_LEN];
        let affine = self.0.into_affine();
        if let Some((x, y)) = affine.xy() {
            out[..FQ_LEN].copy_from_slice(&fq_to_bytes(&x.c0));
            out[FQ_LEN..].copy_from_slice(&fq_to_bytes(&x.c1));
            if y > -y {
                out[0] |= SIGN_FLAG;
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PairingError> {
        const WHAT: &str = "public key";
        if bytes.len() != KEY_ELEM_LEN {
            return Err(PairingError::decode(WHAT, "length must be 64"));
        }
        if bytes.iter().all(|b| *b == 0) {
            return Ok(Self::identity());
        }
        if bytes[0] & RESERVED_FLAG != 0 {
            return Err(PairingError::decode(WHAT, "reserved flag set"));
        }
        let larger = bytes[0] & SIGN_FLAG != 0;
        let mut c0 = [0u8; FQ_LEN];
        c0.copy_from_slice(&bytes[..FQ_LEN]);
        c0[0] &= !SIGN_FLAG;
        let c0 = fq_from_bytes(&c0).ok_or(PairingError::decode(WHAT, "x.c0 not reduced"))?;
        let c1 = fq_from_bytes(&bytes[FQ_LEN..]).ok_or(PairingError::decode(WHAT, "x.c1 not reduced"))?;
        let x = Fq2::new(c0, c1);
        let rhs = x.square() * x + ark_bn254::g2::Config::COEFF_B;
        let mut y = rhs.sqrt().ok_or(PairingError::decode(WHAT, "x not on curve"))?;
        if (y > -y) != larger {
            y = -y;
        }
        let p = G2Affine::new_unchecked(x, y);
        if !p.is_in_correct_subgroup_assuming_on_curve() {
            return Err(PairingError::decode(WHAT, "point outside prime-order subgroup"));
        }
        Ok(KeyElem(p.into()))
    }
}

impl Add for KeyElem {
    type Output = KeyElem;
    fn add(self, rhs: KeyElem) -> KeyElem {
        KeyElem(self.0 + rhs.0)
    }
}

/// Element of the target group, written multiplicatively.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct TargetElem(pub(crate) Fq12);

impl fmt::Debug for TargetElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bytes = self.to_bytes();
        write!(f, "TargetElem({}..)", hex::encode(&bytes[..16]))
    }
}

impl TargetElem {
    pub fn one() -> Self {
        TargetElem(Fq12::one())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn pow(&self, s: &Scalar) -> Self {
        TargetElem(self.0.pow(s.0.into_bigint()))
    }

    pub fn to_bytes(&self) -> [u8; TARGET_ELEM_LEN] {
        let mut out = [0u8; TARGET_ELEM_LEN];
        let coeffs = tower_coefficients(&self.0);
        for (chunk, c) in out.chunks_exact_mut(FQ_LEN).zip(coeffs.iter()) {
            chunk.copy_from_slice(&fq_to_bytes(c));
        }
        out
    }

    /// Decodes any reduced tower element. Subgroup membership is checked.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PairingError> {
        const WHAT: &str = "target element";
        if bytes.len() != TARGET_ELEM_LEN {
            return Err(PairingError::decode(WHAT, "length must be 384"));
        }
        let mut c = [Fq::zero(); 12];
        for (i, chunk) in bytes.chunks_exact(FQ_LEN).enumerate() {
            c[i] = fq_from_bytes(chunk).ok_or(PairingError::decode(WHAT, "coefficient not reduced"))?;
        }
        let fq6 = |o: usize| {
            ark_bn254::Fq6::new(
                Fq2::new(c[o], c[o + 1]),
                Fq2::new(c[o + 2], c[o + 3]),
                Fq2::new(c[o + 4], c[o + 5]),
            )
        };
        let value = Fq12::new(fq6(0), fq6(6));
        let order = Fr::MODULUS;
        if value.is_zero() || !value.pow(order).is_one() {
            return Err(PairingError::decode(WHAT, "not in the order-p subgroup"));
        }
        Ok(TargetElem(value))
    }
}

impl Mul for TargetElem {
    type Output = TargetElem;
    fn mul(self, rhs: TargetElem) -> TargetElem {
        TargetElem(self.0 * rhs.0)
    }
}

impl From<PairingOutput<Bn254>> for TargetElem {
    fn from(v: PairingOutput<Bn254>) -> Self {
        TargetElem(v.0)
    }
}

fn tower_coefficients(v: &Fq12) -> [Fq; 12] {
    let a = &v.c0;
    let b = &v.c1;
    [
        a.c0.c0, a.c0.c1, a.c1.c0, a.c1.c1, a.c2.c0, a.c2.c1, b.c0.c0, b.c0.c1, b.c1.c0, b.c1.c1,
        b.c2.c0, b.c2.c1,
    ]
}

fn fq_like_bytes(be: &[u8]) -> [u8; 32] {
    let mut out = [0u8; 32];
    out[32 - be.len()..].copy_from_slice(be);
    out
}

fn fq_to_bytes(x: &Fq) -> [u8; FQ_LEN] {
    fq_like_bytes(&x.into_bigint().to_bytes_be())
}

fn fq_from_bytes(bytes: &[u8]) -> Option<Fq> {
    let candidate = Fq::from_be_bytes_mod_order(bytes);
    (candidate.into_bigint().to_bytes_be() == bytes).then_some(candidate)
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn params() -> PublicParams {
        setup("bn254").unwrap()
    }

    #[test]
    fn setup_reports_254_bit_order() {
        let p = setup("bn254-like").unwrap();
        assert_eq!(p.order_bits(), 254);
        assert_eq!(p.prime_order()[0] >> 6, 0);
        assert_eq!(p.to_bytes(), setup("bn254-like").unwrap().to_bytes());
    }

    #[test]
    fn setup_rejects_unknown_curve() {
        assert_eq!(
            setup("unknown-curve").unwrap_err(),
            PairingError::UnsupportedCurve("unknown-curve".into())
        );
    }

    #[test]
    fn order_annihilates_generators() {
        let p = params();
        let order = Fr::MODULUS;
        assert!(p.g1_generator().0.mul_bigint(order).is_zero());
        assert!(p.generator().0.mul_bigint(order).is_zero());
        assert!(!p.generator().is_identity());
    }

    #[test]
    fn pairing_of_identity_is_one() {
        let p = params();
        assert!(p.pairing(&GroupElem::identity(), p.generator()).is_one());
        assert!(p.pairing_with_generator(&GroupElem::identity()).is_one());
        assert!(!p.pairing(p.g1_generator(), p.generator()).is_one());
    }

    #[test]
    fn pairing_swaps_scalars_between_sides() {
        let p = params();
        let two = Scalar::from_u64(2);
        let three = Scalar::from_u64(3);
        let lhs = p.pairing(&p.g1_generator().mul(&two), &p.generator().mul(&three));
        let rhs = p.pairing(&p.g1_generator().mul(&three), &p.generator().mul(&two));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pairing_is_bilinear() {
        let p = params();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let base = p.pairing(p.g1_generator(), p.generator());
        let h = p.hash_to_group(b"lines");
        assert_eq!(p.pairing_with_generator(&h), p.pairing(&h, p.generator()));
        for _ in 0..4 {
            let x = Scalar::random(&mut rng);
            let y = Scalar::random(&mut rng);
            let e = p.pairing(&p.g1_generator().mul(&x), &p.generator().mul(&y));
            assert_eq!(e, base.pow(&(x * y)));
        }
    }

    #[test]
    fn multi_pairing_matches_product() {
        let p = params();
        let a: Vec<_> = (1..4).map(|i| p.hash_to_group(&[i])).collect();
        let b: Vec<_> = (1..4).map(|i| p.generator().mul(&Scalar::from_u64(i))).collect();
        let product = a
            .iter()
            .zip(&b)
            .fold(TargetElem::one(), |acc, (x, y)| acc * p.pairing(x, y));
        assert_eq!(p.multi_pairing(&a, &b), product);
    }

    #[test]
    fn encodings_round_trip() {
        let p = params();
        let g = p.hash_to_group(b"round trip");
        assert_eq!(GroupElem::from_bytes(&g.to_bytes()).unwrap(), g);
        let k = p.generator().mul(&Scalar::from_u64(12345));
        assert_eq!(KeyElem::from_bytes(&k.to_bytes()).unwrap(), k);
        let neg = KeyElem(-k.0);
        assert_eq!(KeyElem::from_bytes(&neg.to_bytes()).unwrap(), neg);
        let t = p.pairing(&g, &k);
        assert_eq!(TargetElem::from_bytes(&t.to_bytes()).unwrap(), t);
        let s = Scalar::from_u64(99);
        assert_eq!(Scalar::from_bytes(&s.to_bytes()).unwrap(), s);
    }

    #[test]
    fn identities_use_the_zero_encoding() {
        assert_eq!(GroupElem::identity().to_bytes(), [0u8; 64]);
        assert_eq!(KeyElem::identity().to_bytes(), [0u8; 64]);
        assert!(GroupElem::from_bytes(&[0u8; 64]).unwrap().is_identity());
        assert!(KeyElem::from_bytes(&[0u8; 64]).unwrap().is_identity());
    }

    #[test]
    fn malformed_encodings_are_rejected() {
        let p = params();
        let mut g = p.hash_to_group(b"x").to_bytes();
        g[63] ^= 1;
        assert!(GroupElem::from_bytes(&g).is_err());
        assert!(GroupElem::from_bytes(&[0xff; 64]).is_err());
        assert!(GroupElem::from_bytes(&[1u8; 63]).is_err());
        let mut k = p.generator().to_bytes();
        k[0] |= RESERVED_FLAG;
        assert!(KeyElem::from_bytes(&k).is_err());
        assert!(Scalar::from_bytes(&[0xff; 32]).is_err());
        assert!(TargetElem::from_bytes(&[0u8; 384]).is_err());
    }
}
