//! Measures how fast the iterative frequency search closes in on the
//! closed-form optimum as its iteration budgets grow.
//!
//!     cargo run --release --example convergence_study
//!
//! For each budget, optimizes the frequency for a batch of random
//! requests on the calibrated fog hardware (interior optimum, so the
//! search has real work to do) and reports the worst relative energy gap
//! against the cubic closed form.

use fogsim::freq::{self, ScaParams};
use fogsim::model::{Request, ScheduleState};
use fogsim::traffic::{TrafficGenerator, TrafficModel, ValueRange};

fn main() {
    let cfg = fogsim::config::calibrated();
    let fleet = &cfg.scenario.fleet;
    let node = &fleet.fogs[0];
    let state = ScheduleState::new(fleet.fogs.len());

    let mut gen = TrafficGenerator::new(
        TrafficModel {
            mean_interarrival_s: 1.0,
            batch_min: 200,
            batch_max: 200,
            size_bits: ValueRange::new(8e6, 8e7),
            intensity_flop_per_bit: ValueRange::new(1.0, 100.0),
            output_ratio: ValueRange::new(0.0, 0.5),
            deadline_s: ValueRange::new(0.5, 1.0),
            origins: 1,
        },
        2024,
    );
    let requests: Vec<Request> = gen.next_instance().requests;

    let f_oracle = freq::analytic_optimum_q3(node, node.f_min_ghz, node.f_max_ghz).unwrap();
    println!("closed-form unconstrained optimum: {f_oracle:.6} GHz\n");
    println!("{:>9} {:>11} {:>16} {:>14}", "sca", "newton", "worst gap", "worst |df|");

    for (sca, newton) in [(1, 3), (2, 5), (3, 5), (5, 10), (5, 20), (10, 20)] {
        let params = ScaParams {
            max_sca_iters: sca,
            max_newton_iters: newton,
            epsilon_ghz: 0.0,
            initial_ghz: None,
        };
        let mut worst_gap: f64 = 0.0;
        let mut worst_df: f64 = 0.0;
        for r in &requests {
            let sol = freq::optimize_frequency(r, 0, fleet, &state, 0.0, &params).unwrap();
            assert!(sol.feasible);
            // The oracle respects the same deadline-driven lower bound.
            let lo = freq::delay_min_frequency(r, 0, fleet, &state, 0.0).unwrap().unwrap();
            let f_best = freq::analytic_optimum_q3(node, lo, node.f_max_ghz).unwrap();
            let split = freq::DcSplit::for_request(r, node);
            let gap = (split.energy(sol.f_star_ghz) - split.energy(f_best)) / split.energy(f_best);
            worst_gap = worst_gap.max(gap);
            worst_df = worst_df.max((sol.f_star_ghz - f_best).abs());
        }
        println!("{sca:>9} {newton:>11} {worst_gap:>16.3e} {worst_df:>11.3e} GHz");
    }
}
