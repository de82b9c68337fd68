//! Builds the request-to-node cost matrix for one batch and solves the
//! assignment, comparing against brute force.
//!
//! Cloud columns are replicated once per request, so the cloud can absorb
//! any number of requests while each fog node takes at most one.
//!
//!     cargo run --example assignment_matrix

use fogsim::assign::{self, AssignedTarget};
use fogsim::freq::ScaParams;
use fogsim::model::{Request, ScheduleState};

fn main() {
    let mut cfg = fogsim::config::reference();
    cfg.scenario.fleet.fogs.truncate(3);
    let fleet = cfg.scenario.fleet;
    let state = ScheduleState::new(fleet.fogs.len());

    let requests: Vec<Request> = [
        // (size, intensity, deadline): a low-intensity job not worth
        // shipping anywhere, a compute-heavy job the cloud should take,
        // and a deadline so tight only the origin fog can make it.
        (8e6, 1.0, 0.8),
        (6e7, 90.0, 0.9),
        (2e7, 30.0, 0.03),
    ]
    .iter()
    .enumerate()
    .map(|(i, &(size_bits, intensity, deadline_s))| Request {
        id: i as u64,
        arrival_s: 0.0,
        size_bits,
        intensity,
        output_ratio: 0.1,
        origin: i % fleet.fogs.len(),
        deadline_s,
    })
    .collect();

    let matrix =
        assign::build_cost_matrix(&requests, &fleet, &state, 0.0, &ScaParams::default(), None)
            .unwrap();

    println!(
        "{} requests x ({} fogs + {} cloud replicas), penalty cells marked '-':\n",
        matrix.rows(),
        fleet.fogs.len(),
        matrix.cols() - fleet.fogs.len()
    );
    print!("{:>10}", "");
    for col in 0..matrix.cols() {
        print!("{:>9}", matrix.column_target(col).to_string());
    }
    println!();
    for row in 0..matrix.rows() {
        print!("request {row} ");
        for col in 0..matrix.cols() {
            if matrix.is_penalty(row, col) {
                print!("{:>9}", "-");
            } else {
                print!("{:>8.3}J", matrix.cost(row, col));
            }
        }
        println!();
    }

    let cols = matrix.cols();
    let solved = assign::hungarian(matrix.rows(), cols, |r, c| matrix.cost(r, c));
    let allocation = assign::extract_allocation(&matrix, &solved);
    println!();
    let mut total = 0.0;
    for (row, target) in allocation.iter().enumerate() {
        match target {
            AssignedTarget::Fog { fog, freq_ghz } => {
                println!("request {row} -> fog{fog} at {freq_ghz:.3} GHz");
            }
            AssignedTarget::Cloud { cloud } => println!("request {row} -> cloud{cloud}"),
            AssignedTarget::Unassignable => println!("request {row} -> rejected"),
        }
        total += matrix.cost(row, solved[row]);
    }

    let (_, brute) = assign::brute_force_assign(matrix.rows(), cols, |r, c| matrix.cost(r, c));
    println!("\nassignment total {total:.4} J, brute force {brute:.4} J");
    assert!((total - brute).abs() <= 1e-9 * brute.abs());
}
