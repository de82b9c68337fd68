//! Sweeps the cloud's computational efficiency and watches the traffic
//! migrate between tiers.
//!
//!     cargo run --release --example cloud_beta_sweep
//!
//! Run on the calibrated power curve, where the best fog efficiency is
//! 0.96 GFLOP/(s*W): below that the cloud loses on compute energy alone
//! and everything stays in the fog; far above it only low-intensity
//! requests (whose transfer cost outweighs the compute savings) remain.

use fogsim::alloc::AllocatorKind;
use fogsim::sim::{self, SweepAxis};

fn main() {
    let mut cfg = fogsim::config::calibrated();
    cfg.scenario.horizon = 220;
    cfg.scenario.warmup = 20;
    let betas: Vec<f64> = (1..=10).map(|i| i as f64 * 0.5).collect();

    println!("cloud beta swept over {betas:?} GFLOP/(s*W)\n");
    println!(
        "{:>6}  {:>12} {:>12}  {:>14} {:>10}",
        "beta", "CloudOnly", "FogOnly", "EEFFRA energy", "fog share"
    );

    let cloud_only =
        sim::sweep(&cfg.scenario, AllocatorKind::CloudOnly, SweepAxis::CloudBeta, &betas).unwrap();
    let fog_only =
        sim::sweep(&cfg.scenario, AllocatorKind::FogOnly, SweepAxis::CloudBeta, &betas).unwrap();
    let eeffra =
        sim::sweep(&cfg.scenario, AllocatorKind::Eeffra, SweepAxis::CloudBeta, &betas).unwrap();

    for ((c, f), e) in cloud_only.iter().zip(&fog_only).zip(&eeffra) {
        let marker = if c.output.metrics.avg_energy_j < f.output.metrics.avg_energy_j {
            "cloud cheaper"
        } else {
            "fog cheaper"
        };
        println!(
            "{:>6.2}  {:>10.3} J {:>10.3} J  {:>12.3} J {:>9.1}%  {marker}",
            c.value,
            c.output.metrics.avg_energy_j,
            f.output.metrics.avg_energy_j,
            e.output.metrics.avg_energy_j,
            e.output.metrics.fog_share * 100.0,
        );
    }

    // The fog-only curve ignores the swept parameter entirely.
    let first = &fog_only[0].output.metrics;
    assert!(fog_only.iter().all(|p| p.output.metrics == *first));
}
