//! Cross-suite comparison of experiment results.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::reference::{FULL_TABLE_PATHS, INTERNET_AVG_PATH_LEN, LONGEST_PATH_LEN};
use super::{CsvRow, ExperimentResult, NetsimError};
use crate::wire::{Suite, APVAS_BLOCK_FIXED, APVAS_SIGMA_LEN, CONVENTIONAL_SEGMENT_LEN, SKI_LEN};

/// Wire bytes of one APVAS signature block at (possibly fractional) length.
pub fn apvas_block_bytes(len: f64) -> f64 {
    APVAS_BLOCK_FIXED as f64 + SKI_LEN as f64 * len
}

/// Wire bytes of one conventional signature block.
pub fn conventional_block_bytes(len: f64) -> f64 {
    1.0 + CONVENTIONAL_SEGMENT_LEN as f64 * len
}

/// `1 - apvas / conventional` for one message's signature block.
pub fn sig_block_reduction(len: f64) -> f64 {
    1.0 - apvas_block_bytes(len) / conventional_block_bytes(len)
}

/// Smallest integer length where the APVAS block is strictly smaller.
pub fn wire_crossover_len() -> u32 {
    (1..)
        .find(|&l| apvas_block_bytes(l as f64) < conventional_block_bytes(l as f64))
        .expect("slopes differ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionPoint {
    pub path_len: f64,
    pub apvas_block_bytes: f64,
    pub conventional_block_bytes: f64,
    pub reduction: f64,
}

impl ReductionPoint {
    pub fn at(len: f64) -> Self {
        ReductionPoint {
            path_len: len,
            apvas_block_bytes: apvas_block_bytes(len),
            conventional_block_bytes: conventional_block_bytes(len),
            reduction: sig_block_reduction(len),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFit {
    pub suite: String,
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
    pub predicted_at_20: f64,
}

/// Where the fitted per-router totals of the two secure suites cross.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedCrossover {
    /// Path length at which the fitted lines intersect.
    pub intersection_len: f64,
    /// Smallest integer length with APVAS strictly smaller.
    pub first_len_apvas_smaller: u32,
    /// Measured totals: APVAS larger at the shortest stored length and
    /// smaller at every router with average length at least 3.
    pub ordering_flip_observed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    pub year: u16,
    pub paths: u64,
    pub conventional_sig_bytes: f64,
    pub apvas_sig_bytes: f64,
    pub reduction: f64,
}

/// Comparison document; serializes to TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub fingerprint: String,
    pub suites: Vec<String>,
    pub wire_crossover_len: u32,
    pub reductions: Vec<ReductionPoint>,
    pub fits: Vec<SuiteFit>,
    pub calibrated_crossover: Option<CalibratedCrossover>,
    /// Signature storage for a full table at the Internet-average length.
    pub projection: Vec<ProjectionRow>,
    pub rows: Vec<CsvRow>,
}

const REPORT_LENGTHS: [f64; 6] = [1.0, 2.0, 3.0, INTERNET_AVG_PATH_LEN, 10.0, LONGEST_PATH_LEN];

pub fn compare_report(results: &[ExperimentResult]) -> Result<ReportDocument, NetsimError> {
    let first = results.first().ok_or_else(|| NetsimError::Report("no results".into()))?;
    if results.iter().any(|r| r.fingerprint != first.fingerprint) {
        return Err(NetsimError::MismatchedConfigs);
    }
    let mut ordered: Vec<&ExperimentResult> = results.iter().collect();
    ordered.sort_by_key(|r| r.suite);
    if ordered.windows(2).any(|w| w[0].suite == w[1].suite) {
        return Err(NetsimError::Report("suite listed twice".into()));
    }
    let find = |s: Suite| ordered.iter().find(|r| r.suite == s).copied();

    let fits = ordered
        .iter()
        .filter_map(|r| {
            r.fit.as_ref().map(|f| SuiteFit {
                suite: r.suite.name().to_string(),
                slope: f.slope,
                intercept: f.intercept,
                max_abs_residual: f.max_abs_residual(),
                predicted_at_20: f.predict(LONGEST_PATH_LEN),
            })
        })
        .collect();

    let calibrated_crossover = match (find(Suite::Apvas), find(Suite::Conventional)) {
        (Some(a), Some(c)) => calibrated_crossover(a, c),
        _ => None,
    };

    let projection = FULL_TABLE_PATHS
        .iter()
        .map(|&(year, paths)| {
            let n = paths as f64;
            let conventional = n * CONVENTIONAL_SEGMENT_LEN as f64 * INTERNET_AVG_PATH_LEN;
            let apvas = APVAS_SIGMA_LEN as f64 + n * SKI_LEN as f64 * INTERNET_AVG_PATH_LEN;
            ProjectionRow {
                year,
                paths,
                conventional_sig_bytes: conventional,
                apvas_sig_bytes: apvas,
                reduction: 1.0 - apvas / conventional,
            }
        })
        .collect();

    Ok(ReportDocument {
        fingerprint: first.fingerprint.clone(),
        suites: ordered.iter().map(|r| r.suite.name().to_string()).collect(),
        wire_crossover_len: wire_crossover_len(),
        reductions: REPORT_LENGTHS.iter().map(|&l| ReductionPoint::at(l)).collect(),
        fits,
        calibrated_crossover,
        projection,
        rows: ordered.iter().flat_map(|r| r.csv_rows()).collect(),
    })
}

fn calibrated_crossover(apvas: &ExperimentResult, conv: &ExperimentResult) -> Option<CalibratedCrossover> {
    let (fa, fc) = (apvas.fit.as_ref()?, conv.fit.as_ref()?);
    let intersection_len = (fa.intercept - fc.intercept) / (fc.slope - fa.slope);
    let first_len_apvas_smaller = (1..=1000).find(|&l| fa.predict(l as f64) < fc.predict(l as f64))?;

    let pairs: Vec<(f64, f64, f64)> = apvas
        .series
        .iter()
        .zip(&conv.series)
        .map(|(&(len, a), &(_, c))| (len, a, c))
        .collect();
    let shortest = pairs.iter().copied().min_by(|x, y| x.0.total_cmp(&y.0))?;
    let long: Vec<_> = pairs.iter().filter(|p| p.0 >= 3.0).collect();
    let ordering_flip_observed = shortest.1 > shortest.2 && !long.is_empty() && long.iter().all(|p| p.1 < p.2);

    Some(CalibratedCrossover { intersection_len, first_len_apvas_smaller, ordering_flip_observed })
}

impl ReportDocument {
    pub fn to_toml(&self) -> Result<String, NetsimError> {
        Ok(toml::to_string(self)?)
    }

    /// Human-readable rendering.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "configuration {}", self.fingerprint);
        let _ = writeln!(s, "suites: {}\n", self.suites.join(", "));

        let _ = writeln!(s, "per-router memory (bytes)");
        let _ = writeln!(s, "{:<13} {:>8} {:>6} {:>7} {:>14} {:>12} {:>12}", "suite", "AS", "paths", "avg_len", "routing_table", "route_attr", "signatures");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<13} {:>8} {:>6} {:>7.2} {:>14} {:>12} {:>12}",
                r.suite, r.as_number, r.path_count, r.avg_len, r.routing_table_bytes, r.route_attr_bytes, r.sig_block_bytes
            );
        }

        let _ = writeln!(s, "\nsignature block per message");
        for p in &self.reductions {
            let _ = writeln!(
                s,
                "  L = {:>4}: apvas {:>7.1} B, conventional {:>7.1} B, reduction {:.1}%",
                p.path_len,
                p.apvas_block_bytes,
                p.conventional_block_bytes,
                100.0 * p.reduction
            );
        }
        let _ = writeln!(s, "  apvas block smaller from L = {}", self.wire_crossover_len);

        if !self.fits.is_empty() {
            let _ = writeln!(s, "\nleast-squares fit of route_attr_bytes over path length");
            for f in &self.fits {
                let _ = writeln!(
                    s,
                    "  {:<13} slope {:>10.2}  intercept {:>10.2}  max |residual| {:.3e}  at L=20 {:.0}",
                    f.suite, f.slope, f.intercept, f.max_abs_residual, f.predicted_at_20
                );
            }
        }
        if let Some(c) = &self.calibrated_crossover {
            let _ = writeln!(
                s,
                "  fitted totals cross at L = {:.3}; apvas smaller from L = {}; ordering flip observed: {}",
                c.intersection_len, c.first_len_apvas_smaller, c.ordering_flip_observed
            );
        }

        let _ = writeln!(s, "\nfull-table signature storage at L = {INTERNET_AVG_PATH_LEN}");
        for p in &self.projection {
            let _ = writeln!(
                s,
                "  {}: {:>9} paths, conventional {:>6.2} GB, apvas {:>6.2} GB, reduction {:.1}%",
                p.year,
                p.paths,
                p.conventional_sig_bytes / 1e9,
                p.apvas_sig_bytes / 1e9,
                100.0 * p.reduction
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netsim::{run_experiment, TopologyConfig};

    #[test]
    fn wire_reductions() {
        assert_eq!(apvas_block_bytes(20.0), 467.0);
        assert_eq!(conventional_block_bytes(20.0), 2361.0);
        assert!((sig_block_reduction(20.0) - 0.802_202_456_586_192_3).abs() < 1e-12);
        assert!((sig_block_reduction(3.9) - (1.0 - 145.0 / 461.2)).abs() < 1e-12);
        assert_eq!(wire_crossover_len(), 1);
        let mut prev = f64::NEG_INFINITY;
        for l in 1..=40 {
            let r = sig_block_reduction(l as f64);
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn report_requires_matching_configs() {
        let a = run_experiment(&TopologyConfig::line(2, 1, 1, 0), Suite::Plain).unwrap();
        let b = run_experiment(&TopologyConfig::line(2, 1, 1, 1), Suite::Apvas).unwrap();
        assert!(matches!(compare_report(&[a.clone(), b]), Err(NetsimError::MismatchedConfigs)));
        assert!(compare_report(&[a.clone(), a.clone()]).is_err());
        assert!(compare_report(&[]).is_err());
        let doc = compare_report(&[a]).unwrap();
        assert!(doc.calibrated_crossover.is_none());
        assert_eq!(doc.projection.len(), 6);
    }

    #[test]
    fn calibrated_ordering_flips_on_a_short_line() {
        let cfg = TopologyConfig::line(4, 1, 4, 2);
        let results: Vec<_> = Suite::ALL.iter().map(|&s| run_experiment(&cfg, s).unwrap()).collect();
        let doc = compare_report(&results).unwrap();
        assert_eq!(doc.suites, ["plain", "conventional", "apvas"]);
        let c = doc.calibrated_crossover.as_ref().unwrap();
        assert_eq!(c.first_len_apvas_smaller, 2);
        assert!(c.ordering_flip_observed);
        assert!(c.intersection_len > 1.0 && c.intersection_len < 2.0);
        let text = doc.to_text();
        assert!(text.contains("reduction 80.2%"));
        let back: ReportDocument = toml::from_str(&doc.to_toml().unwrap()).unwrap();
        assert_eq!(back, doc);
    }
}
