//! Deterministic advertisement simulator and memory experiment harness.
//!
//! Every router runs the [`crate::router`] state machine. Messages travel as
//! encoded bytes through one global FIFO, which keeps per-link order and
//! propagates breadth first. There are no timers and no loss.

pub mod fit;
pub mod reference;
pub mod report;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io;
use std::net::Ipv4Addr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bimodal::{user_key_gen, KeyPair};
use crate::pairing::{setup, PublicParams};
use crate::router::{
    KeyDirectory, MemoryModel, RejectReason, RibSnapshot, Router, RouterConfig, RouterError, SnapshotRecord,
};
use crate::wire::{self, Nlri, Suite};
use fit::{least_squares_fit, LinearFit64};

/// Upper bound on routes per advertisement batch.
pub const MAX_PATH_COUNT: u32 = 250;
/// NLRIs are drawn from the /24s of 198.18.0.0/15.
pub const NLRI_POOL_SIZE: usize = 512;
/// Path length at which fitted series are extrapolated.
pub const EXTRAPOLATION_LEN: f64 = 20.0;

#[derive(Debug, Error)]
pub enum NetsimError {
    #[error("invalid topology: {0}")]
    Config(String),
    #[error("cannot parse topology: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Router(#[from] RouterError),
    #[error(transparent)]
    Wire(#[from] wire::WireError),
    #[error("results come from different configurations")]
    MismatchedConfigs,
    #[error("report input: {0}")]
    Report(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("cannot serialize report: {0}")]
    Serialize(#[from] toml::ser::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Advertisement {
    pub origin_as: u32,
    pub path_count: u32,
    pub nlri_seed: u64,
}

/// Topology file schema (TOML).
///
/// ```toml
/// seed = 1                      # key derivation seed
/// routers = [65001, 65002]
/// links = [[65001, 65002]]
///
/// [[advertisements]]
/// origin_as = 65001
/// path_count = 200             # at most 250
/// nlri_seed = 7
///
/// [memory]                      # optional, defaults shown
/// routing_entry_cost = 230
/// attr_fixed_cost = 50
/// apvas_entry_overhead = 141
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    #[serde(default)]
    pub seed: u64,
    pub routers: Vec<u32>,
    #[serde(default)]
    pub links: Vec<[u32; 2]>,
    #[serde(default)]
    pub advertisements: Vec<Advertisement>,
    #[serde(default)]
    pub memory: MemoryModel,
}

impl std::str::FromStr for TopologyConfig {
    type Err = NetsimError;

    fn from_str(s: &str) -> Result<Self, NetsimError> {
        let cfg: TopologyConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl TopologyConfig {
    /// Line `first, first+1, ..` of `n` routers with one batch from `first`.
    pub fn line(n: u32, first: u32, path_count: u32, seed: u64) -> Self {
        let routers: Vec<u32> = (first..first + n).collect();
        TopologyConfig {
            seed,
            links: routers.windows(2).map(|w| [w[0], w[1]]).collect(),
            advertisements: vec![Advertisement { origin_as: first, path_count, nlri_seed: seed }],
            routers,
            memory: MemoryModel::default(),
        }
    }

    pub fn validate(&self) -> Result<(), NetsimError> {
        let err = |m: String| Err(NetsimError::Config(m));
        if self.routers.is_empty() {
            return err("no routers".into());
        }
        let ases: BTreeSet<u32> = self.routers.iter().copied().collect();
        if ases.len() != self.routers.len() {
            return err("duplicate AS number".into());
        }
        for &[a, b] in &self.links {
            if a == b {
                return err(format!("self link on AS{a}"));
            }
            for x in [a, b] {
                if !ases.contains(&x) {
                    return err(format!("link names unknown AS{x}"));
                }
            }
        }
        let adj = self.adjacency();
        let mut seen = BTreeSet::from([self.routers[0]]);
        let mut queue = VecDeque::from([self.routers[0]]);
        while let Some(a) = queue.pop_front() {
            for &n in &adj[&a] {
                if seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        if seen.len() != ases.len() {
            let missing = ases.difference(&seen).next().expect("some AS unreached");
            return err(format!("topology is disconnected: AS{missing} is unreachable"));
        }
        let mut total = 0usize;
        for adv in &self.advertisements {
            if !ases.contains(&adv.origin_as) {
                return err(format!("advertisement from unknown AS{}", adv.origin_as));
            }
            if adv.path_count > MAX_PATH_COUNT {
                return err(format!("path_count {} exceeds {MAX_PATH_COUNT}", adv.path_count));
            }
            total += adv.path_count as usize;
        }
        if total > NLRI_POOL_SIZE {
            return err(format!("{total} prefixes requested, pool holds {NLRI_POOL_SIZE}"));
        }
        Ok(())
    }

    /// Sorted neighbor lists for every router.
    pub fn adjacency(&self) -> BTreeMap<u32, Vec<u32>> {
        let mut adj: BTreeMap<u32, BTreeSet<u32>> = self.routers.iter().map(|&a| (a, BTreeSet::new())).collect();
        for &[a, b] in &self.links {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        adj.into_iter().map(|(a, n)| (a, n.into_iter().collect())).collect()
    }

    /// SHA-256 over a canonical encoding of every field, hex encoded.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"apvas-topology-v1");
        h.update(self.seed.to_be_bytes());
        h.update((self.routers.len() as u64).to_be_bytes());
        for r in &self.routers {
            h.update(r.to_be_bytes());
        }
        h.update((self.links.len() as u64).to_be_bytes());
        for [a, b] in &self.links {
            h.update(a.to_be_bytes());
            h.update(b.to_be_bytes());
        }
        h.update((self.advertisements.len() as u64).to_be_bytes());
        for a in &self.advertisements {
            h.update(a.origin_as.to_be_bytes());
            h.update(a.path_count.to_be_bytes());
            h.update(a.nlri_seed.to_be_bytes());
        }
        let m = &self.memory;
        for v in [m.routing_entry_cost, m.attr_fixed_cost, m.apvas_entry_overhead] {
            h.update(v.to_be_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// Key pair for `as_number` derived from the topology seed.
pub fn derive_keypair(params: &PublicParams, seed: u64, as_number: u32) -> KeyPair {
    let mut h = Sha256::new();
    h.update(b"apvas-netsim-key-v1");
    h.update(seed.to_be_bytes());
    h.update(as_number.to_be_bytes());
    let mut rng = ChaCha20Rng::from_seed(h.finalize().into());
    user_key_gen(params, &mut rng)
}

/// Prefixes for each advertisement, disjoint across advertisements.
pub fn allocate_nlri(advertisements: &[Advertisement]) -> Result<Vec<Vec<Nlri>>, NetsimError> {
    let mut pool: Vec<Nlri> = (0..NLRI_POOL_SIZE)
        .map(|i| {
            let addr = Ipv4Addr::new(198, 18 + (i / 256) as u8, (i % 256) as u8, 0);
            Nlri::new(addr, 24).expect("/24 with zero host bits")
        })
        .collect();
    let mut out = Vec::with_capacity(advertisements.len());
    for adv in advertisements {
        let n = adv.path_count as usize;
        if n > pool.len() {
            return Err(NetsimError::Config(format!("prefix pool exhausted at AS{}", adv.origin_as)));
        }
        pool.shuffle(&mut ChaCha20Rng::seed_from_u64(adv.nlri_seed));
        out.push(pool.drain(..n).collect());
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimStats {
    pub messages_delivered: u64,
    pub accepted: u64,
    pub verification_failures: u64,
    pub conflicts: u64,
    pub other_rejections: u64,
    /// Routers whose stored aggregate fails [`Router::audit_stored_claim`].
    pub audit_failures: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub suite: Suite,
    pub fingerprint: String,
    pub memory: MemoryModel,
    pub per_router: BTreeMap<u32, RibSnapshot>,
    /// `(avg_path_len, route_attr_bytes)` for each non-origin router, by AS.
    pub series: Vec<(f64, f64)>,
    /// `None` when the series has fewer than two distinct lengths.
    pub fit: Option<LinearFit64>,
    pub stats: SimStats,
}

impl ExperimentResult {
    pub fn predicted_at(&self, len: f64) -> Option<f64> {
        self.fit.as_ref().map(|f| f.predict(len))
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.per_router
            .values()
            .map(|s| CsvRow {
                suite: self.suite.name().to_string(),
                as_number: s.as_number,
                path_count: s.path_count() as u64,
                avg_len: s.avg_path_len(),
                routing_table_bytes: s.routing_table_bytes,
                route_attr_bytes: s.route_attr_bytes,
                sig_block_bytes: s.stored_signatures_bytes,
            })
            .collect()
    }

    pub fn summary(&self) -> ExperimentSummary {
        ExperimentSummary {
            suite: self.suite.name().to_string(),
            fingerprint: self.fingerprint.clone(),
            stats: self.stats.clone(),
            fit: self.fit.as_ref().map(|f| FitSummary {
                slope: f.slope,
                intercept: f.intercept,
                residuals: f.residuals.clone(),
                predicted_at_20: f.predict(EXTRAPOLATION_LEN),
            }),
            routers: self.per_router.values().map(RibSnapshot::record).collect(),
        }
    }
}

/// One CSV line; field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub suite: String,
    pub as_number: u32,
    pub path_count: u64,
    pub avg_len: f64,
    pub routing_table_bytes: u64,
    pub route_attr_bytes: u64,
    pub sig_block_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub predicted_at_20: f64,
}

/// Structured per-run report (TOML).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub suite: String,
    pub fingerprint: String,
    pub stats: SimStats,
    pub fit: Option<FitSummary>,
    pub routers: Vec<SnapshotRecord>,
}

impl ExperimentSummary {
    pub fn to_toml(&self) -> Result<String, NetsimError> {
        Ok(toml::to_string(self)?)
    }
}

pub fn write_csv<W: io::Write>(results: &[ExperimentResult], out: W) -> Result<(), NetsimError> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        for row in r.csv_rows() {
            w.serialize(row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn run_experiment(cfg: &TopologyConfig, suite: Suite) -> Result<ExperimentResult, NetsimError> {
    cfg.validate()?;
    let params = setup("bn254").expect("supported curve");
    let adjacency = cfg.adjacency();

    let configs: Vec<RouterConfig> = cfg
        .routers
        .iter()
        .map(|&asn| RouterConfig::new(asn, derive_keypair(&params, cfg.seed, asn), suite, adjacency[&asn].clone()))
        .collect();
    let mut directory = KeyDirectory::new();
    for c in &configs {
        directory.register(&params, c);
    }
    let directory = Arc::new(directory);
    let mut routers: BTreeMap<u32, Router> = configs
        .into_iter()
        .map(|c| (c.as_number, Router::new(c, params.clone(), directory.clone(), cfg.memory)))
        .collect();

    let mut queue: VecDeque<(u32, u32, Vec<u8>)> = VecDeque::new();
    for (adv, prefixes) in cfg.advertisements.iter().zip(allocate_nlri(&cfg.advertisements)?) {
        let origin = routers.get_mut(&adv.origin_as).expect("validated origin");
        for nlri in prefixes {
            for &neighbor in &adjacency[&adv.origin_as] {
                let msg = origin.originate(nlri, neighbor);
                queue.push_back((adv.origin_as, neighbor, wire::encode_update(&msg)?));
            }
        }
    }

    let mut stats = SimStats::default();
    while let Some((from, to, bytes)) = queue.pop_front() {
        stats.messages_delivered += 1;
        let outcome = routers.get_mut(&to).expect("validated link").receive_bytes(&bytes, from)?;
        match outcome.rejected {
            None => stats.accepted += 1,
            Some(RejectReason::VerificationFailed) => stats.verification_failures += 1,
            Some(RejectReason::AggregationConflict) => stats.conflicts += 1,
            Some(_) => stats.other_rejections += 1,
        }
        for o in outcome.forwarded {
            queue.push_back((to, o.to_as, wire::encode_update(&o.msg)?));
        }
    }
    if stats.verification_failures > 0 {
        log::error!("{} messages failed verification in a fault-free run", stats.verification_failures);
    }

    stats.audit_failures = routers.values().filter(|r| !r.audit_stored_claim()).count() as u64;
    let per_router: BTreeMap<u32, RibSnapshot> =
        routers.iter().map(|(&asn, r)| (asn, r.snapshot_memory())).collect();
    let origins: BTreeSet<u32> = cfg.advertisements.iter().map(|a| a.origin_as).collect();
    let series: Vec<(f64, f64)> = per_router
        .values()
        .filter(|s| !origins.contains(&s.as_number))
        .map(|s| (s.avg_path_len(), s.route_attr_bytes as f64))
        .collect();
    let fit = least_squares_fit(&series).ok();

    Ok(ExperimentResult { suite, fingerprint: cfg.fingerprint(), memory: cfg.memory, per_router, series, fit, stats })
}
