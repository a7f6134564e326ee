//! Published router measurements used for calibration and comparison.
//!
//! Values are KB per router on a six-AS line with 200 routes, for the
//! routers at distances 1..=5 from the origin.

use super::fit::least_squares_fit;

pub const PATH_COUNT: u64 = 200;
pub const PATH_LENGTHS: [f64; 5] = [1.0, 2.0, 3.0, 4.0, 5.0];
pub const ROUTING_TABLE_KB: [f64; 5] = [46.0; 5];
pub const APVAS_ROUTE_ATTR_KB: [f64; 5] = [116.0, 122.0, 128.0, 134.0, 140.0];
pub const PLAIN_ROUTE_ATTR_KB: [f64; 5] = [10.0; 5];
pub const CONVENTIONAL_ROUTE_ATTR_KB: [f64; 5] = [104.0, 124.0, 144.0, 164.0, 188.0];

/// Full-table path counts projected for a fully deployed conventional
/// suite, by year.
pub const FULL_TABLE_PATHS: [(u16, u64); 6] = [
    (2020, 6_332_177),
    (2021, 10_130_562),
    (2022, 14_201_374),
    (2023, 18_111_088),
    (2024, 21_794_419),
    (2025, 25_472_541),
];

/// Average AS path length on the Internet.
pub const INTERNET_AVG_PATH_LEN: f64 = 3.9;
/// Longest commonly observed AS path length.
pub const LONGEST_PATH_LEN: f64 = 20.0;

fn intercept_kb(series: &[f64; 5]) -> f64 {
    let points: Vec<(f64, f64)> = PATH_LENGTHS.iter().copied().zip(series.iter().copied()).collect();
    least_squares_fit(&points).expect("five distinct lengths").intercept
}

/// Per-route bytes by which the APVAS zero-length intercept exceeds the
/// conventional one, before rounding.
pub fn apvas_entry_overhead_exact() -> f64 {
    let gap_kb = intercept_kb(&APVAS_ROUTE_ATTR_KB) - intercept_kb(&CONVENTIONAL_ROUTE_ATTR_KB);
    gap_kb * 1024.0 / PATH_COUNT as f64
}

/// Rounded value of [`apvas_entry_overhead_exact`].
pub fn apvas_entry_overhead() -> u64 {
    apvas_entry_overhead_exact().round() as u64
}
