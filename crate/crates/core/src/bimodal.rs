//! Bimodal aggregate signatures.
//!
//! One aggregate `sigma` in the first source group attests to any number of
//! signature chains. A chain grows by sequential signing: each signer commits
//! to the pairing value of the chain so far together with every
//! `(public key, message)` pair already on it, then adds `sk * H(c)` to
//! `sigma`. Independent claims merge by adding their aggregates.
//!
//! The pairing value of a chain prefix, `e(sigma_prefix, P)`, is the product
//! of `e(H(c_j), X_j)` over the prefix, so a verifier reconstructs every
//! commitment front to back even after the partial aggregates are gone.
//!
//! Commitment transcript for entry `i` with chain prefix `S_i` (which ends
//! with entry `i` itself, so that entry appears twice):
//!
//! ```text
//! encode(e(sigma_prev, P)) || pk_i || len(m_i) || m_i || { pk_j || len(m_j) || m_j : j in S_i }
//! ```
//!
//! with 384-byte target elements, 64-byte keys and 4-byte big-endian lengths.

use std::collections::HashSet;

use rand::{CryptoRng, RngCore};
use thiserror::Error;

use crate::pairing::{GroupElem, KeyElem, PublicParams, Scalar, TargetElem, GROUP_ELEM_LEN, KEY_ELEM_LEN};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigError {
    #[error("(public key, message) pair already present in the claim")]
    DuplicateEntry,
    #[error("chain index {index} out of range for a claim with {chains} chains")]
    ChainIndex { index: usize, chains: usize },
    #[error("the identity element is not a valid public key")]
    IdentityKey,
    #[error("claim decode error at byte {offset}: {reason}")]
    Decode { offset: usize, reason: String },
}

/// A signer's secret scalar `x` and public key `X = xP`.
#[derive(Clone, PartialEq, Eq)]
pub struct KeyPair {
    sk: Scalar,
    pk: KeyElem,
}

impl std::fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyPair").field("pk", &self.pk).finish_non_exhaustive()
    }
}

impl KeyPair {
    pub fn from_secret(params: &PublicParams, sk: Scalar) -> Result<Self, SigError> {
        if sk.is_zero() {
            return Err(SigError::IdentityKey);
        }
        Ok(KeyPair { sk, pk: params.generator().mul(&sk) })
    }

    pub fn secret(&self) -> &Scalar {
        &self.sk
    }

    pub fn public(&self) -> &KeyElem {
        &self.pk
    }
}

/// Draw a key pair with `sk` uniform in `[1, p)`.
pub fn user_key_gen<R: RngCore + CryptoRng>(params: &PublicParams, rng: &mut R) -> KeyPair {
    loop {
        let sk = Scalar::random(rng);
        if let Ok(kp) = KeyPair::from_secret(params, sk) {
            return kp;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainEntry {
    pub pk: KeyElem,
    pub msg: Vec<u8>,
}

impl ChainEntry {
    pub fn new(pk: KeyElem, msg: impl Into<Vec<u8>>) -> Self {
        ChainEntry { pk, msg: msg.into() }
    }
}

/// Ordered signing history; index 0 is the chain origin.
#[derive(Debug, Clone, Default)]
pub struct Chain {
    entries: Vec<ChainEntry>,
    // e(sigma_chain, P) for the full chain, when already known.
    head: Option<TargetElem>,
}

impl PartialEq for Chain {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for Chain {}

impl Chain {
    pub fn from_entries(entries: Vec<ChainEntry>) -> Self {
        Chain { entries, head: None }
    }

    pub fn entries(&self) -> &[ChainEntry] {
        &self.entries
    }

    /// Mutable access drops any cached pairing value.
    pub fn entries_mut(&mut self) -> &mut Vec<ChainEntry> {
        self.head = None;
        &mut self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Where a sequential signature lands inside a claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainSlot {
    New,
    Extend(usize),
}

/// An aggregate signature together with the chains it attests to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureClaim {
    sigma: GroupElem,
    chains: Vec<Chain>,
}

impl Default for SignatureClaim {
    fn default() -> Self {
        Self::empty()
    }
}

impl SignatureClaim {
    pub fn empty() -> Self {
        SignatureClaim { sigma: GroupElem::identity(), chains: Vec::new() }
    }

    /// Assemble a claim from parts, e.g. reconstructed from a routing update.
    pub fn from_parts(sigma: GroupElem, chains: Vec<Chain>) -> Self {
        SignatureClaim { sigma, chains }
    }

    pub fn sigma(&self) -> &GroupElem {
        &self.sigma
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn entry_count(&self) -> usize {
        self.chains.iter().map(Chain::len).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = &ChainEntry> {
        self.chains.iter().flat_map(|c| c.entries.iter())
    }

    pub fn set_sigma(&mut self, sigma: GroupElem) {
        self.sigma = sigma;
    }

    pub fn chains_mut(&mut self) -> &mut Vec<Chain> {
        for c in &mut self.chains {
            c.head = None;
        }
        &mut self.chains
    }

    fn contains(&self, pk: &KeyElem, msg: &[u8]) -> bool {
        self.entries().any(|e| e.pk == *pk && e.msg == msg)
    }

    /// Binary encoding: `sigma(64) || u16 chains || { u16 entries || { pk(64) || u32 len || m } }`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(GROUP_ELEM_LEN + 2 + self.entry_count() * 80);
        out.extend_from_slice(&self.sigma.to_bytes());
        out.extend_from_slice(&(self.chains.len() as u16).to_be_bytes());
        for chain in &self.chains {
            out.extend_from_slice(&(chain.entries.len() as u16).to_be_bytes());
            for e in &chain.entries {
                out.extend_from_slice(&e.pk.to_bytes());
                out.extend_from_slice(&(e.msg.len() as u32).to_be_bytes());
                out.extend_from_slice(&e.msg);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SigError> {
        let mut r = ClaimReader { bytes, pos: 0 };
        let sigma_bytes = r.take(GROUP_ELEM_LEN, "sigma")?;
        let sigma = GroupElem::from_bytes(sigma_bytes).map_err(|e| r.error_at(0, e.to_string()))?;
        let chain_count = r.u16("chain count")?;
        let mut chains = Vec::with_capacity(chain_count as usize);
        for _ in 0..chain_count {
            let start = r.pos;
            let entry_count = r.u16("entry count")?;
            if entry_count == 0 {
                return Err(r.error_at(start, "empty chain".into()));
            }
            let mut entries = Vec::with_capacity(entry_count as usize);
            for _ in 0..entry_count {
                let pk_at = r.pos;
                let pk = KeyElem::from_bytes(r.take(KEY_ELEM_LEN, "public key")?)
                    .map_err(|e| r.error_at(pk_at, e.to_string()))?;
                let len = r.u32("message length")? as usize;
                let msg = r.take(len, "message")?.to_vec();
                entries.push(ChainEntry { pk, msg });
            }
            chains.push(Chain::from_entries(entries));
        }
        if r.pos != bytes.len() {
            return Err(r.error_at(r.pos, format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Ok(SignatureClaim { sigma, chains })
    }
}

struct ClaimReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ClaimReader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], SigError> {
        if self.bytes.len() - self.pos < n {
            return Err(self.error_at(self.pos, format!("truncated {what}")));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self, what: &str) -> Result<u16, SigError> {
        let b = self.take(2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32, SigError> {
        let b = self.take(4, what)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn error_at(&self, offset: usize, reason: String) -> SigError {
        SigError::Decode { offset, reason }
    }
}

fn push_pair(out: &mut Vec<u8>, entry: &ChainEntry) {
    out.extend_from_slice(&entry.pk.to_bytes());
    out.extend_from_slice(&(entry.msg.len() as u32).to_be_bytes());
    out.extend_from_slice(&entry.msg);
}

fn commitment_from_head(
    params: &PublicParams,
    head: &TargetElem,
    entry: &ChainEntry,
    prefix: &[ChainEntry],
) -> GroupElem {
    let mut transcript = Vec::with_capacity(384 + (prefix.len() + 1) * 80);
    transcript.extend_from_slice(&head.to_bytes());
    push_pair(&mut transcript, entry);
    for e in prefix {
        push_pair(&mut transcript, e);
    }
    params.hash_to_group(&transcript)
}

/// Commitment `c` for `entry`, given the aggregate the chain had before it.
///
/// `prefix` is the chain up to and including `entry`.
pub fn chain_commitment(
    params: &PublicParams,
    sigma_prev: &GroupElem,
    entry: &ChainEntry,
    prefix: &[ChainEntry],
) -> GroupElem {
    let head = params.pairing_with_generator(sigma_prev);
    commitment_from_head(params, &head, entry, prefix)
}

/// The point each signer multiplies by its secret: `H(encode(c))`.
fn signing_point(params: &PublicParams, c: &GroupElem) -> GroupElem {
    params.hash_to_group(&c.to_bytes())
}

/// Recompute `e(sigma_chain, P)` for every prefix of a chain.
///
/// Returns the running product after the last entry.
fn chain_pairing_product(params: &PublicParams, entries: &[ChainEntry]) -> TargetElem {
    let mut head = TargetElem::one();
    for k in 0..entries.len() {
        let c = commitment_from_head(params, &head, &entries[k], &entries[..=k]);
        head = head * params.pairing(&signing_point(params, &c), &entries[k].pk);
    }
    head
}

/// Sequentially sign `msg` into `claim`, starting a new chain or extending one.
pub fn seq_agg_sign(
    params: &PublicParams,
    kp: &KeyPair,
    msg: &[u8],
    claim: &SignatureClaim,
    slot: ChainSlot,
) -> Result<SignatureClaim, SigError> {
    if claim.contains(&kp.pk, msg) {
        return Err(SigError::DuplicateEntry);
    }
    let mut out = claim.clone();
    let sole_chain = out.chains.len() == 1;
    let chain = match slot {
        ChainSlot::New => {
            out.chains.push(Chain { entries: Vec::new(), head: Some(TargetElem::one()) });
            out.chains.last_mut().expect("just pushed")
        }
        ChainSlot::Extend(index) => {
            let chains = out.chains.len();
            out.chains.get_mut(index).ok_or(SigError::ChainIndex { index, chains })?
        }
    };

    let head = match chain.head {
        Some(h) => h,
        // With a single chain the aggregate is that chain's own aggregate.
        None if sole_chain => params.pairing_with_generator(&out.sigma),
        None => chain_pairing_product(params, &chain.entries),
    };

    let entry = ChainEntry::new(kp.pk, msg);
    chain.entries.push(entry.clone());
    let c = commitment_from_head(params, &head, &entry, &chain.entries);
    let share = signing_point(params, &c).mul(&kp.sk);
    chain.head = Some(head * params.pairing_with_generator(&share));
    out.sigma += share;
    Ok(out)
}

/// Merge two claims over disjoint `(pk, m)` sets.
pub fn agg_sign(first: &SignatureClaim, second: &SignatureClaim) -> Result<SignatureClaim, SigError> {
    let seen: HashSet<(&KeyElem, &[u8])> = first.entries().map(|e| (&e.pk, e.msg.as_slice())).collect();
    if second.entries().any(|e| seen.contains(&(&e.pk, e.msg.as_slice()))) {
        return Err(SigError::DuplicateEntry);
    }
    let mut chains = first.chains.clone();
    chains.extend(second.chains.iter().cloned());
    Ok(SignatureClaim { sigma: first.sigma + second.sigma, chains })
}

/// Check an aggregate against all of its chains.
///
/// Returns `false` for empty claims, identity public keys, repeated
/// `(pk, m)` pairs and any pairing mismatch.
pub fn verify(params: &PublicParams, claim: &SignatureClaim) -> bool {
    verify_chains(params, claim).is_some()
}

/// Like [`verify`], and on success caches each chain's pairing value so a
/// following [`seq_agg_sign`] on the claim skips recomputing it.
pub fn verify_and_cache(params: &PublicParams, claim: &mut SignatureClaim) -> bool {
    match verify_chains(params, claim) {
        Some(heads) => {
            for (chain, head) in claim.chains.iter_mut().zip(heads) {
                chain.head = Some(head);
            }
            true
        }
        None => false,
    }
}

/// Decode a serialized claim and verify it.
pub fn verify_encoded(params: &PublicParams, bytes: &[u8]) -> Result<bool, SigError> {
    let claim = SignatureClaim::from_bytes(bytes)?;
    Ok(verify(params, &claim))
}

fn verify_chains(params: &PublicParams, claim: &SignatureClaim) -> Option<Vec<TargetElem>> {
    if claim.chains.is_empty() || claim.chains.iter().any(Chain::is_empty) {
        return None;
    }
    let mut seen = HashSet::with_capacity(claim.entry_count());
    for e in claim.entries() {
        if e.pk.is_identity() || !seen.insert((&e.pk, e.msg.as_slice())) {
            return None;
        }
    }

    let heads: Vec<TargetElem> = claim
        .chains
        .iter()
        .map(|c| chain_pairing_product(params, &c.entries))
        .collect();
    let product = heads.iter().fold(TargetElem::one(), |acc, h| acc * *h);
    (params.pairing_with_generator(&claim.sigma) == product).then_some(heads)
}
