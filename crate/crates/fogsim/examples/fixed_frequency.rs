//! Pins all fog CPUs to one frequency and compares against per-request
//! frequency scaling, on a fog-only network with highly variable load.
//!
//!     cargo run --release --example fixed_frequency
//!
//! Low pins reject more (they cannot catch tight deadlines), high pins
//! waste energy on easy requests. Scaling the frequency per request gets
//! the low rejection rate and the low energy at once.

use fogsim::alloc::AllocatorKind;
use fogsim::sim::{self, SweepAxis};

fn main() {
    let mut cfg = fogsim::config::reference();
    // Drop the cloud; it would otherwise absorb whatever the pinned fogs
    // cannot serve and flatten the differences.
    cfg.scenario.fleet.clouds.clear();
    cfg.scenario.traffic.intensity_flop_per_bit.hi = 500.0;
    cfg.scenario.traffic.mean_interarrival_s = 0.5;

    let dvfs = sim::run(&cfg.scenario, AllocatorKind::Eeffra).unwrap();
    println!(
        "{:<12} {:>11} {:>13}",
        "fog clock", "rejection", "avg energy"
    );
    println!(
        "{:<12} {:>10.2}% {:>11.4} J   (per-request scaling)",
        "adaptive",
        dvfs.metrics.rejection_ratio * 100.0,
        dvfs.metrics.avg_energy_j
    );

    let pins = [1.6, 2.0, 2.6063, 3.2, 4.2];
    let points =
        sim::sweep(&cfg.scenario, AllocatorKind::Eeffra, SweepAxis::FixedFreq, &pins).unwrap();
    for p in &points {
        println!(
            "{:<12} {:>10.2}% {:>11.4} J",
            format!("{:.4} GHz", p.value),
            p.output.metrics.rejection_ratio * 100.0,
            p.output.metrics.avg_energy_j,
        );
    }

    // Averages across pins are not directly comparable (a low pin
    // rejects exactly the expensive requests), but the top pin serves
    // the same feasibility region as adaptive scaling and still loses.
    let top = points.last().unwrap();
    assert!(dvfs.metrics.avg_energy_j <= top.output.metrics.avg_energy_j);
    assert!(dvfs.metrics.rejection_ratio <= points[0].output.metrics.rejection_ratio);
}
