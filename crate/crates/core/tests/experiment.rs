//! Six-router line with 200 routes, all suites.

use apvas_core::netsim::report::compare_report;
use apvas_core::netsim::{run_experiment, ExperimentResult, TopologyConfig};
use apvas_core::Suite;
use std::sync::OnceLock;

fn results() -> &'static [ExperimentResult] {
    static CELL: OnceLock<Vec<ExperimentResult>> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg: TopologyConfig = include_str!("../../../configs/linear6.toml").parse().unwrap();
        Suite::ALL.iter().map(|&s| run_experiment(&cfg, s).unwrap()).collect()
    })
}

fn result(suite: Suite) -> &'static ExperimentResult {
    results().iter().find(|r| r.suite == suite).unwrap()
}

#[test]
fn every_router_holds_200_paths_at_hop_distance() {
    for r in results() {
        assert_eq!(r.stats.verification_failures, 0);
        assert_eq!(r.stats.audit_failures, 0);
        assert_eq!(r.stats.messages_delivered, 1000);
        for k in 2..=6u32 {
            let snap = &r.per_router[&(65000 + k)];
            assert_eq!(snap.path_count(), 200);
            assert!(snap.entries.iter().all(|e| e.path_len() == (k - 1) as usize));
        }
    }
}

#[test]
fn stored_signature_bytes_at_distance_three() {
    assert_eq!(result(Suite::Apvas).per_router[&65004].stored_signatures_bytes, 12_064);
    assert_eq!(result(Suite::Conventional).per_router[&65004].stored_signatures_bytes, 70_800);
    assert_eq!(result(Suite::Plain).per_router[&65004].stored_signatures_bytes, 0);
}

#[test]
fn per_hop_slopes_are_exact() {
    let step = |s: Suite, k: u32| {
        let r = result(s);
        r.per_router[&(k + 1)].route_attr_bytes as i64 - r.per_router[&k].route_attr_bytes as i64
    };
    for k in 65002..65006 {
        assert_eq!(step(Suite::Apvas, k), 200 * 26);
        assert_eq!(step(Suite::Conventional, k), 200 * 124);
        assert_eq!(step(Suite::Plain, k), 200 * 6);
    }
}

#[test]
fn routing_table_is_flat() {
    for r in results() {
        for k in 65002..=65006 {
            assert_eq!(r.per_router[&k].routing_table_bytes, 46_000);
        }
    }
}

#[test]
fn report_reproduces_the_ordering_flip() {
    let doc = compare_report(results()).unwrap();
    let c = doc.calibrated_crossover.unwrap();
    assert!(c.ordering_flip_observed);
    assert_eq!(c.first_len_apvas_smaller, 2);
    let apvas = result(Suite::Apvas);
    let conv = result(Suite::Conventional);
    assert!(apvas.per_router[&65002].route_attr_bytes > conv.per_router[&65002].route_attr_bytes);
    assert!(apvas.per_router[&65006].route_attr_bytes < conv.per_router[&65006].route_attr_bytes);
}

#[test]
fn rerun_is_identical() {
    let cfg: TopologyConfig = include_str!("../../../configs/linear6.toml").parse().unwrap();
    let again = run_experiment(&cfg, Suite::Conventional).unwrap();
    assert_eq!(&again, result(Suite::Conventional));
}
