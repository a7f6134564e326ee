//! Per-AS routing state machine: originate, verify, select, re-sign, forward,
//! and fold accepted signatures into storage.
//!
//! Received APVAS claims are re-signed and forwarded while the per-path
//! aggregate is still at hand; only then is the claim merged into the
//! router's single stored aggregate. A stored route can therefore not be
//! re-advertised later from storage alone.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::baseline;
use crate::bimodal::{self, agg_sign, seq_agg_sign, Chain, ChainEntry, ChainSlot, KeyPair, SigError, SignatureClaim};
use crate::pairing::{GroupElem, KeyElem, PublicParams};
use crate::wire::{
    self, ApvasBlock, ConventionalBlock, Nlri, SecurePathSegment, SignatureBlock, SignatureSegment, Ski,
    Suite, UpdateMessage, WireError, APVAS_SIGMA_LEN, SEGMENT_LEN, SKI_LEN,
};

#[derive(Debug, Error)]
pub enum RouterError {
    #[error("AS{0} is not a neighbor")]
    NotNeighbor(u32),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Signature(#[from] SigError),
}

/// Byte-accounting constants for [`RibSnapshot`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MemoryModel {
    /// Bytes per routing-table entry.
    pub routing_entry_cost: u64,
    /// Fixed attribute bytes per stored route, all suites.
    pub attr_fixed_cost: u64,
    /// Additional fixed bytes per stored APVAS route.
    pub apvas_entry_overhead: u64,
}

impl MemoryModel {
    /// 46 KB of routing table over 200 routes.
    pub const ROUTING_ENTRY_COST: u64 = 230;
    /// 10 KB of plain-BGP route attributes over 200 routes.
    pub const ATTR_FIXED_COST: u64 = 50;
    /// Gap between the APVAS and conventional zero-length intercepts of the
    /// reference measurements (27.6 KiB over 200 routes), see
    /// `netsim::reference::apvas_entry_overhead`.
    pub const APVAS_ENTRY_OVERHEAD: u64 = 141;

    /// Fixed per-route attribute bytes for `suite`.
    pub fn fixed_cost(&self, suite: Suite) -> u64 {
        match suite {
            Suite::Apvas => self.attr_fixed_cost + self.apvas_entry_overhead,
            Suite::Plain | Suite::Conventional => self.attr_fixed_cost,
        }
    }
}

impl Default for MemoryModel {
    fn default() -> Self {
        MemoryModel {
            routing_entry_cost: Self::ROUTING_ENTRY_COST,
            attr_fixed_cost: Self::ATTR_FIXED_COST,
            apvas_entry_overhead: Self::APVAS_ENTRY_OVERHEAD,
        }
    }
}

/// First 20 bytes of SHA-256 over the encoded public key.
pub fn ski_for(pk: &KeyElem) -> Ski {
    let digest = Sha256::digest(pk.to_bytes());
    let mut ski = [0u8; SKI_LEN];
    ski.copy_from_slice(&digest[..SKI_LEN]);
    Ski(ski)
}

#[derive(Debug, Clone)]
pub struct RouterConfig {
    pub as_number: u32,
    pub keypair: KeyPair,
    pub ski: Ski,
    pub suite: Suite,
    pub neighbors: Vec<u32>,
}

impl RouterConfig {
    pub fn new(as_number: u32, keypair: KeyPair, suite: Suite, mut neighbors: Vec<u32>) -> Self {
        neighbors.sort_unstable();
        neighbors.dedup();
        let ski = ski_for(keypair.public());
        RouterConfig { as_number, keypair, ski, suite, neighbors }
    }
}

/// Public keys a router can look up by SKI.
#[derive(Debug, Clone)]
pub struct KeyRecord {
    pub as_number: u32,
    pub aggregate_key: KeyElem,
    pub baseline_key: GroupElem,
}

/// Keys installed on every router ahead of time.
#[derive(Debug, Clone, Default)]
pub struct KeyDirectory {
    records: HashMap<Ski, KeyRecord>,
}

impl KeyDirectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, params: &PublicParams, cfg: &RouterConfig) {
        self.records.insert(
            cfg.ski,
            KeyRecord {
                as_number: cfg.as_number,
                aggregate_key: *cfg.keypair.public(),
                baseline_key: baseline::public_key(params, cfg.keypair.secret()),
            },
        );
    }

    pub fn get(&self, ski: &Ski) -> Option<&KeyRecord> {
        self.records.get(ski)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibEntry {
    pub nlri: Nlri,
    /// Most recent AS first.
    pub secure_path: Vec<SecurePathSegment>,
    /// Same order as `secure_path`; empty for plain BGP.
    pub ski_list: Vec<Ski>,
    pub origin_as: u32,
    pub neighbor_as: u32,
    pub verified: bool,
}

impl RibEntry {
    pub fn path_len(&self) -> usize {
        self.secure_path.len()
    }
}

/// Byte accounting of a router's stored state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibSnapshot {
    pub as_number: u32,
    pub suite: Suite,
    pub entries: Vec<RibEntry>,
    pub stored_claim: Option<SignatureClaim>,
    pub stored_signatures_bytes: u64,
    pub routing_table_bytes: u64,
    pub route_attr_bytes: u64,
}

impl RibSnapshot {
    pub fn path_count(&self) -> usize {
        self.entries.len()
    }

    pub fn total_path_len(&self) -> usize {
        self.entries.iter().map(RibEntry::path_len).sum()
    }

    pub fn avg_path_len(&self) -> f64 {
        if self.entries.is_empty() {
            0.0
        } else {
            self.total_path_len() as f64 / self.entries.len() as f64
        }
    }

    pub fn record(&self) -> SnapshotRecord {
        SnapshotRecord {
            as_number: self.as_number,
            suite: self.suite.name().to_string(),
            path_count: self.path_count() as u64,
            avg_path_len: self.avg_path_len(),
            routing_table_bytes: self.routing_table_bytes,
            route_attr_bytes: self.route_attr_bytes,
            stored_signatures_bytes: self.stored_signatures_bytes,
        }
    }
}

/// Flat, serializable view of a [`RibSnapshot`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub as_number: u32,
    pub suite: String,
    pub path_count: u64,
    pub avg_path_len: f64,
    pub routing_table_bytes: u64,
    pub route_attr_bytes: u64,
    pub stored_signatures_bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    SuiteMismatch,
    SenderMismatch,
    Loop,
    OwnPrefix,
    VerificationFailed,
    NotBestPath,
    AggregationConflict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outbound {
    pub to_as: u32,
    pub msg: UpdateMessage,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiveOutcome {
    pub accepted: bool,
    pub rejected: Option<RejectReason>,
    pub forwarded: Vec<Outbound>,
}

impl ReceiveOutcome {
    fn reject(reason: RejectReason) -> Self {
        ReceiveOutcome { accepted: false, rejected: Some(reason), forwarded: Vec::new() }
    }
}

/// Rebuild the signature chain a message carries, as seen by `receiver_as`.
///
/// Entry k (origin first) signs toward the AS at position k + 1, and the most
/// recent signer toward the receiver. `None` if an SKI is unknown.
pub fn reconstruct_chain(
    directory: &KeyDirectory,
    nlri: &Nlri,
    secure_path: &[SecurePathSegment],
    skis: &[Ski],
    receiver_as: u32,
) -> Option<Chain> {
    let len = secure_path.len();
    if skis.len() != len || len == 0 {
        return None;
    }
    let mut entries = Vec::with_capacity(len);
    for k in 1..=len {
        let target = if k < len { secure_path[len - 1 - k].as_number } else { receiver_as };
        let record = directory.get(&skis[len - k])?;
        let msg = wire::signed_octets(target, secure_path, Suite::Apvas, nlri, k).ok()?;
        entries.push(ChainEntry::new(record.aggregate_key, msg));
    }
    Some(Chain::from_entries(entries))
}

pub struct Router {
    cfg: RouterConfig,
    params: PublicParams,
    directory: Arc<KeyDirectory>,
    model: MemoryModel,
    rib: BTreeMap<Nlri, RibEntry>,
    conventional_store: BTreeMap<Nlri, ConventionalBlock>,
    stored_claim: SignatureClaim,
    superseded: Vec<RibEntry>,
    owned: BTreeSet<Nlri>,
    conflicts: Vec<Nlri>,
}

impl Router {
    pub fn new(cfg: RouterConfig, params: PublicParams, directory: Arc<KeyDirectory>, model: MemoryModel) -> Self {
        Router {
            cfg,
            params,
            directory,
            model,
            rib: BTreeMap::new(),
            conventional_store: BTreeMap::new(),
            stored_claim: SignatureClaim::empty(),
            superseded: Vec::new(),
            owned: BTreeSet::new(),
            conflicts: Vec::new(),
        }
    }

    pub fn config(&self) -> &RouterConfig {
        &self.cfg
    }

    pub fn as_number(&self) -> u32 {
        self.cfg.as_number
    }

    pub fn rib(&self) -> &BTreeMap<Nlri, RibEntry> {
        &self.rib
    }

    pub fn stored_claim(&self) -> &SignatureClaim {
        &self.stored_claim
    }

    /// Prefixes dropped because their chain collided with stored pairs.
    pub fn conflicts(&self) -> &[Nlri] {
        &self.conflicts
    }

    /// Advertise an owned prefix toward `target_as`.
    pub fn originate(&mut self, nlri: Nlri, target_as: u32) -> UpdateMessage {
        self.owned.insert(nlri);
        let secure_path = vec![SecurePathSegment::new(self.cfg.as_number)];
        let sig_block = self.sign_block(&nlri, &secure_path, target_as, None);
        UpdateMessage { nlri, secure_path, sig_block }
    }

    /// Decode and process a wire message.
    pub fn receive_bytes(&mut self, bytes: &[u8], from_as: u32) -> Result<ReceiveOutcome, RouterError> {
        let msg = wire::decode_update(bytes)?;
        self.receive(&msg, from_as)
    }

    pub fn receive(&mut self, msg: &UpdateMessage, from_as: u32) -> Result<ReceiveOutcome, RouterError> {
        if self.cfg.neighbors.binary_search(&from_as).is_err() {
            return Err(RouterError::NotNeighbor(from_as));
        }
        if msg.suite() != self.cfg.suite {
            return Ok(ReceiveOutcome::reject(RejectReason::SuiteMismatch));
        }
        if msg.secure_path.first().map(|s| s.as_number) != Some(from_as) {
            return Ok(ReceiveOutcome::reject(RejectReason::SenderMismatch));
        }
        if msg.secure_path.iter().any(|s| s.as_number == self.cfg.as_number) {
            return Ok(ReceiveOutcome::reject(RejectReason::Loop));
        }
        if self.owned.contains(&msg.nlri) {
            return Ok(ReceiveOutcome::reject(RejectReason::OwnPrefix));
        }

        // (1) verify
        let claim = match self.verify_message(msg) {
            Some(claim) => claim,
            None => return Ok(ReceiveOutcome::reject(RejectReason::VerificationFailed)),
        };

        // (2) best path
        if let Some(existing) = self.rib.get(&msg.nlri) {
            let shorter = msg.path_len() < existing.path_len();
            let tie_won = msg.path_len() == existing.path_len() && from_as < existing.neighbor_as;
            if !(shorter || tie_won) {
                return Ok(ReceiveOutcome::reject(RejectReason::NotBestPath));
            }
        }
        if let Some(claim) = &claim {
            let stored: std::collections::HashSet<_> = self.stored_claim.entries().collect();
            if claim.entries().any(|e| stored.contains(e)) {
                log::warn!(
                    "AS{}: dropping {} from AS{}: chain repeats a stored (pk, m) pair",
                    self.cfg.as_number,
                    msg.nlri,
                    from_as
                );
                self.conflicts.push(msg.nlri);
                return Ok(ReceiveOutcome::reject(RejectReason::AggregationConflict));
            }
        }

        // (3) re-sign and forward
        let mut forwarded = Vec::new();
        for &neighbor in &self.cfg.neighbors {
            if neighbor == from_as || msg.secure_path.iter().any(|s| s.as_number == neighbor) {
                continue;
            }
            let mut secure_path = Vec::with_capacity(msg.path_len() + 1);
            secure_path.push(SecurePathSegment::new(self.cfg.as_number));
            secure_path.extend_from_slice(&msg.secure_path);
            let prior = msg.sig_block.as_ref().map(|b| (b, claim.as_ref()));
            let sig_block = self.sign_block(&msg.nlri, &secure_path, neighbor, prior);
            forwarded.push(Outbound {
                to_as: neighbor,
                msg: UpdateMessage { nlri: msg.nlri, secure_path, sig_block },
            });
        }

        // (4) store
        let entry = RibEntry {
            nlri: msg.nlri,
            secure_path: msg.secure_path.clone(),
            ski_list: skis_of(msg),
            origin_as: msg.origin_as().expect("non-empty path checked above"),
            neighbor_as: from_as,
            verified: true,
        };
        if let Some(old) = self.rib.insert(msg.nlri, entry) {
            if self.cfg.suite == Suite::Apvas {
                // Its chain stays inside the stored aggregate.
                self.superseded.push(old);
            }
        }
        match (&msg.sig_block, claim) {
            (Some(SignatureBlock::Conventional(block)), _) => {
                self.conventional_store.insert(msg.nlri, block.clone());
            }
            (Some(SignatureBlock::Apvas(_)), Some(claim)) => {
                self.stored_claim = agg_sign(&self.stored_claim, &claim)?;
            }
            _ => {}
        }

        Ok(ReceiveOutcome { accepted: true, rejected: None, forwarded })
    }

    /// Per-suite verification. For APVAS, returns the reconstructed claim with
    /// its chain pairing value cached for re-signing.
    fn verify_message(&self, msg: &UpdateMessage) -> Option<Option<SignatureClaim>> {
        match &msg.sig_block {
            None => Some(None),
            Some(SignatureBlock::Conventional(block)) => {
                let len = msg.path_len();
                for k in 1..=len {
                    let target = if k < len { msg.secure_path[len - 1 - k].as_number } else { self.cfg.as_number };
                    let segment = &block.segments[len - k];
                    let record = self.directory.get(&segment.ski)?;
                    let octets = wire::build_signed_octets(target, msg, k).ok()?;
                    if !baseline::verify(&self.params, &record.baseline_key, &octets, &segment.signature) {
                        return None;
                    }
                }
                Some(None)
            }
            Some(SignatureBlock::Apvas(block)) => {
                let sigma = GroupElem::from_bytes(&block.sigma).ok()?;
                let chain = reconstruct_chain(&self.directory, &msg.nlri, &msg.secure_path, &block.skis, self.cfg.as_number)?;
                let mut claim = SignatureClaim::from_parts(sigma, vec![chain]);
                bimodal::verify_and_cache(&self.params, &mut claim).then_some(Some(claim))
            }
        }
    }

    /// Signature block for a path whose most recent hop is this router.
    fn sign_block(
        &self,
        nlri: &Nlri,
        secure_path: &[SecurePathSegment],
        target_as: u32,
        prior: Option<(&SignatureBlock, Option<&SignatureClaim>)>,
    ) -> Option<SignatureBlock> {
        let position = secure_path.len();
        let octets = wire::signed_octets(target_as, secure_path, self.cfg.suite, nlri, position)
            .expect("own segment is present");
        match self.cfg.suite {
            Suite::Plain => None,
            Suite::Conventional => {
                let mut segments = vec![SignatureSegment {
                    ski: self.cfg.ski,
                    signature: baseline::sign(&self.params, self.cfg.keypair.secret(), &octets).to_vec(),
                }];
                if let Some((SignatureBlock::Conventional(prev), _)) = prior {
                    segments.extend(prev.segments.iter().cloned());
                }
                Some(SignatureBlock::Conventional(ConventionalBlock { segments }))
            }
            Suite::Apvas => {
                let (claim, slot) = match prior {
                    Some((_, Some(claim))) => (claim.clone(), ChainSlot::Extend(0)),
                    _ => (SignatureClaim::empty(), ChainSlot::New),
                };
                let signed = seq_agg_sign(&self.params, &self.cfg.keypair, &octets, &claim, slot)
                    .expect("fresh target AS keeps the pair unique");
                let mut skis = vec![self.cfg.ski];
                if let Some((SignatureBlock::Apvas(prev), _)) = prior {
                    skis.extend_from_slice(&prev.skis);
                }
                let mut sigma = [0u8; APVAS_SIGMA_LEN];
                sigma.copy_from_slice(&signed.sigma().to_bytes());
                Some(SignatureBlock::Apvas(ApvasBlock { sigma, skis }))
            }
        }
    }

    /// Byte accounting of the current state.
    pub fn snapshot_memory(&self) -> RibSnapshot {
        let entries: Vec<RibEntry> = self.rib.values().cloned().collect();
        let suite = self.cfg.suite;
        let path_bytes = |e: &RibEntry| (SEGMENT_LEN * e.path_len()) as u64;

        let stored_signatures_bytes = match suite {
            Suite::Plain => 0,
            Suite::Conventional => self
                .conventional_store
                .values()
                .map(|b| (b.encoded_len() - 1) as u64)
                .sum(),
            Suite::Apvas if self.stored_claim.is_empty() => 0,
            Suite::Apvas => {
                let ski_bytes: usize = entries
                    .iter()
                    .chain(&self.superseded)
                    .map(|e| SKI_LEN * e.ski_list.len())
                    .sum();
                (APVAS_SIGMA_LEN + ski_bytes) as u64
            }
        };
        let attr: u64 = entries.iter().map(|e| path_bytes(e) + self.model.fixed_cost(suite)).sum::<u64>()
            + self.superseded.iter().map(path_bytes).sum::<u64>();

        RibSnapshot {
            as_number: self.cfg.as_number,
            suite,
            routing_table_bytes: entries.len() as u64 * self.model.routing_entry_cost,
            route_attr_bytes: stored_signatures_bytes + attr,
            stored_signatures_bytes,
            stored_claim: (suite == Suite::Apvas).then(|| self.stored_claim.clone()),
            entries,
        }
    }

    /// Check the stored aggregate against the chains rebuilt from the stored
    /// entries (current and superseded). Always true for non-APVAS suites.
    pub fn audit_stored_claim(&self) -> bool {
        if self.cfg.suite != Suite::Apvas {
            return true;
        }
        let stored = self.rib.values().chain(&self.superseded);
        let mut rebuilt = Vec::new();
        for e in stored {
            match reconstruct_chain(&self.directory, &e.nlri, &e.secure_path, &e.ski_list, self.cfg.as_number) {
                Some(chain) => rebuilt.push(chain),
                None => return false,
            }
        }
        if rebuilt.is_empty() {
            return self.stored_claim.is_empty();
        }
        let mut have: Vec<Vec<u8>> = self.stored_claim.chains().iter().map(chain_key).collect();
        let mut want: Vec<Vec<u8>> = rebuilt.iter().map(chain_key).collect();
        have.sort();
        want.sort();
        have == want && bimodal::verify(&self.params, &self.stored_claim)
    }
}

fn chain_key(chain: &Chain) -> Vec<u8> {
    SignatureClaim::from_parts(GroupElem::identity(), vec![chain.clone()]).to_bytes()
}

fn skis_of(msg: &UpdateMessage) -> Vec<Ski> {
    match &msg.sig_block {
        None => Vec::new(),
        Some(SignatureBlock::Apvas(b)) => b.skis.clone(),
        Some(SignatureBlock::Conventional(b)) => b.segments.iter().map(|s| s.ski).collect(),
    }
}
