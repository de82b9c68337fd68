//! Shared fixtures for unit tests. Values mirror the bundled reference
//! scenario so frozen expected numbers stay in one place.

use crate::alloc::AllocParams;
use crate::model::{CloudSpec, Fleet, FogNodeSpec, Request};
use crate::sim::Scenario;
use crate::traffic::{TrafficModel, ValueRange};

pub(crate) fn reference_fog() -> FogNodeSpec {
    FogNodeSpec {
        power_coeffs: vec![-47.152, 88.594, 34.256, 5.222],
        f_min_ghz: 1.6,
        f_max_ghz: 4.2,
        flop_per_cycle: 16.0,
        gamma_j_per_bit_hop: 0.3e-9,
        bitrate_bps: 1e9,
    }
}

/// Same fleet position, alternative power calibration with an interior
/// efficiency peak at 2.6063 GHz.
pub(crate) fn calibrated_fog() -> FogNodeSpec {
    FogNodeSpec {
        power_coeffs: vec![43.720, -18.974, 8.0, -0.3],
        f_min_ghz: 1.6,
        f_max_ghz: 4.2,
        flop_per_cycle: 16.0,
        gamma_j_per_bit_hop: 0.3e-9,
        bitrate_bps: 1e9,
    }
}

pub(crate) fn reference_cloud() -> CloudSpec {
    CloudSpec {
        beta_flops_per_watt: 1.3e9,
        freq_ghz: 1.5,
        flop_per_cycle: 32.0,
        distance_km: 2000.0,
        chi_s_per_km: 7.5e-6,
        gamma_j_per_bit: 10e-9,
        bitrate_bps: 1e9,
    }
}

pub(crate) fn small_fleet() -> Fleet {
    Fleet::new(vec![reference_fog(), reference_fog()], vec![reference_cloud()])
}

pub(crate) fn request(size_bits: f64, theta: f64, o: f64, origin: usize, d_max: f64) -> Request {
    Request {
        id: 0,
        arrival_s: 0.0,
        size_bits,
        intensity: theta,
        output_ratio: o,
        origin,
        deadline_s: d_max,
    }
}

/// Compact end-to-end scenario: two fog nodes, one cloud, light mixed
/// traffic, 20 instances with 5 of warm-up.
pub(crate) fn small_scenario() -> Scenario {
    Scenario {
        fleet: small_fleet(),
        traffic: TrafficModel {
            mean_interarrival_s: 0.1,
            batch_min: 1,
            batch_max: 2,
            size_bits: ValueRange::new(4e6, 1.6e7),
            intensity_flop_per_bit: ValueRange::new(1.0, 100.0),
            output_ratio: ValueRange::new(0.05, 0.2),
            deadline_s: ValueRange::new(0.05, 1.0),
            origins: 2,
        },
        params: AllocParams::default(),
        seed: 42,
        horizon: 20,
        warmup: 5,
        hist_bins: 4,
    }
}

pub(crate) fn assert_rel(actual: f64, expected: f64, tol: f64) {
    let scale = expected.abs().max(1e-300);
    assert!(
        ((actual - expected) / scale).abs() <= tol,
        "expected {expected}, got {actual} (rel err {})",
        ((actual - expected) / scale).abs()
    );
}
