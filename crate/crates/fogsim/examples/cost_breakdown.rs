//! Prices one request on every node of a small fleet, splitting energy
//! and delay into their components.
//!
//!     cargo run --example cost_breakdown

use fogsim::model::{NodeRef, Request, ScheduleState};
use fogsim::{config, cost};

fn main() {
    let fleet = config::reference().scenario.fleet;
    let state = ScheduleState::new(fleet.fogs.len());
    let r = Request {
        id: 0,
        arrival_s: 0.0,
        size_bits: 8e6,
        intensity: 40.0,
        output_ratio: 0.2,
        origin: 0,
        deadline_s: 0.3,
    };
    println!(
        "request: {} Mbit, {} FLOP/bit, o = {}, origin fog{}, D_max = {} s\n",
        r.size_bits / 1e6,
        r.intensity,
        r.output_ratio,
        r.origin,
        r.deadline_s
    );
    println!(
        "{:<8} {:>5}  {:>9} {:>9} {:>9}  {:>8} {:>8} {:>8} {:>8}  {:>9}",
        "node", "f", "E_cp", "E_comm", "E_tot", "D_up", "D_down", "D_queue", "D_cp", "feasible"
    );

    let targets = [NodeRef::Fog(0), NodeRef::Fog(1), NodeRef::Cloud(0)];
    for target in targets {
        let f_ghz = match target {
            NodeRef::Fog(_) => 2.0,
            NodeRef::Cloud(0) => fleet.clouds[0].freq_ghz,
            NodeRef::Cloud(_) => unreachable!(),
        };
        let bd = cost::total_cost(&r, target, &fleet, f_ghz, &state, r.arrival_s).unwrap();
        println!(
            "{:<8} {:>5.2}  {:>8.3} J {:>7.3} J {:>7.3} J  {:>6.1} ms {:>5.1} ms {:>5.1} ms {:>5.1} ms  {:>9}",
            target.to_string(),
            f_ghz,
            bd.e_cp_j,
            bd.e_comm_j,
            bd.e_tot_j,
            bd.d_comm_up_s * 1e3,
            bd.d_comm_down_s * 1e3,
            bd.d_queue_s * 1e3,
            bd.d_cp_s * 1e3,
            bd.feasible,
        );
    }

    // The origin fog pays no transfer; fog 1 pays one hop each way; the
    // cloud pays the backhaul plus 15 ms of propagation on the uplink.
    let up = cost::delay_comm(&r, NodeRef::Cloud(0), &fleet).unwrap();
    println!(
        "\ncloud uplink = {:.1} ms transmission + {:.1} ms propagation",
        r.size_bits / fleet.clouds[0].bitrate_bps * 1e3,
        fleet.clouds[0].distance_km * fleet.clouds[0].chi_s_per_km * 1e3,
    );
    assert!((up.up_s - 0.008 - 0.015).abs() < 1e-12);
}
