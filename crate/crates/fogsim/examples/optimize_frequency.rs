//! Picks the energy-minimal CPU frequency for one request on one fog
//! node, under the request's deadline, and checks the answer against the
//! closed-form optimum for cubic power curves.
//!
//!     cargo run --example optimize_frequency

use fogsim::freq::{self, ScaParams};
use fogsim::model::{Request, ScheduleState};
use fogsim::{config, cost};

fn main() {
    // The alternative power curve has its efficiency peak inside the
    // frequency range, so the optimizer has something to find.
    let fleet = config::calibrated().scenario.fleet;
    let state = ScheduleState::new(fleet.fogs.len());
    let mut r = Request {
        id: 0,
        arrival_s: 0.0,
        size_bits: 4e7,
        intensity: 60.0,
        output_ratio: 0.1,
        origin: 0,
        deadline_s: 1.0,
    };

    let sol = freq::optimize_frequency(&r, 0, &fleet, &state, 0.0, &ScaParams::default()).unwrap();
    let oracle = freq::analytic_optimum_q3(&fleet.fogs[0], 1.6, 4.2).unwrap();
    println!("relaxed deadline:");
    println!("  iterative  f* = {:.6} GHz  E_cp = {:.4} J", sol.f_star_ghz, sol.objective_j);
    println!("  closed form f* = {oracle:.6} GHz");
    println!(
        "  ({} linearization rounds, {} Newton steps)",
        sol.iterations_sca, sol.iterations_newton
    );

    // Tighten the deadline until the delay constraint binds: the best
    // frequency is then the minimum one that still meets the deadline.
    r.deadline_s = 0.045;
    let f_delay = freq::delay_min_frequency(&r, 0, &fleet, &state, 0.0).unwrap().unwrap();
    let tight = freq::optimize_frequency(&r, 0, &fleet, &state, 0.0, &ScaParams::default()).unwrap();
    println!("\ndeadline 45 ms:");
    println!("  minimum feasible frequency = {f_delay:.4} GHz");
    println!("  chosen frequency           = {:.4} GHz", tight.f_star_ghz);
    println!("  energy                     = {:.4} J", tight.objective_j);
    assert!(tight.f_star_ghz >= f_delay);

    // Energy along the frequency axis, to see what the solver navigates.
    println!("\nE_cp(f) on fog 0 (relaxed deadline):");
    for step in 0..=6 {
        let f = 1.6 + (4.2 - 1.6) * f64::from(step) / 6.0;
        r.deadline_s = 1.0;
        let e = cost::energy_compute(&r, fogsim::model::NodeRef::Fog(0), &fleet, f).unwrap();
        let marker = if (f - sol.f_star_ghz).abs() < 0.25 { "  <- near f*" } else { "" };
        println!("  {f:>4.2} GHz  {e:>7.4} J{marker}");
    }
}
