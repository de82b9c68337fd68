//! Energy and delay formulas for serving one request on one node.
//!
//! Energies: computation on a fog node costs L*theta / beta_fog(f) where
//! beta_fog(f) = f*1e9*s_n / P_act(f); on the cloud it costs L*theta / beta.
//! Communication costs gamma per transferred bit, (1 + o)*L bits in total,
//! scaled by hop count between fog nodes. Serving at the request's origin
//! node transfers nothing.
//!
//! Delays: computation takes L*theta / (f*1e9*s_n). Reaching the cloud pays
//! the backhaul for L bits plus the distance term d*chi on the uplink and
//! the backhaul for o*L bits on the downlink. Between fog nodes only the
//! link rate matters. Queuing waits for the target fog node to become free,
//! counted from the moment the input has arrived there; the cloud never
//! queues.

use crate::model::{
    AllocationResult, CloudSpec, CostBreakdown, Fleet, FogNodeSpec, ModelError, NodeRef, Outcome,
    Request, ScheduleState,
};

/// Uplink and downlink transfer times in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommDelays {
    pub up_s: f64,
    pub down_s: f64,
}

impl CommDelays {
    pub fn total_s(&self) -> f64 {
        self.up_s + self.down_s
    }
}

fn fog_spec(fleet: &Fleet, fog: usize) -> Result<&FogNodeSpec, ModelError> {
    fleet.fogs.get(fog).ok_or(ModelError::UnknownNode {
        node: NodeRef::Fog(fog),
        n_fogs: fleet.fogs.len(),
        n_clouds: fleet.clouds.len(),
    })
}

fn cloud_spec(fleet: &Fleet, cloud: usize) -> Result<&CloudSpec, ModelError> {
    fleet.clouds.get(cloud).ok_or(ModelError::UnknownNode {
        node: NodeRef::Cloud(cloud),
        n_fogs: fleet.fogs.len(),
        n_clouds: fleet.clouds.len(),
    })
}

/// Evaluate the power polynomial without any bounds checking.
/// Horner form, coefficients ascending in degree.
pub(crate) fn eval_power_poly(coeffs: &[f64], f_ghz: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * f_ghz + c)
}

/// Active power draw P_act(f) of a fog node in watts, f in GHz.
pub fn power_active(fleet: &Fleet, fog: usize, f_ghz: f64) -> Result<f64, ModelError> {
    let node = fog_spec(fleet, fog)?;
    if !(f_ghz >= node.f_min_ghz && f_ghz <= node.f_max_ghz) {
        return Err(ModelError::FrequencyOutOfBounds {
            node: fog,
            f_ghz,
            f_min_ghz: node.f_min_ghz,
            f_max_ghz: node.f_max_ghz,
        });
    }
    let p = eval_power_poly(&node.power_coeffs, f_ghz);
    if p <= 0.0 {
        return Err(ModelError::NonPositivePower { node: fog, f_ghz, power_w: p });
    }
    Ok(p)
}

/// Computational efficiency of a fog node in FLOP/(s*W) at frequency f.
pub fn beta_fog(fleet: &Fleet, fog: usize, f_ghz: f64) -> Result<f64, ModelError> {
    let node = fog_spec(fleet, fog)?;
    let p = power_active(fleet, fog, f_ghz)?;
    Ok(f_ghz * 1e9 * node.flop_per_cycle / p)
}

/// Computation energy in joules. The frequency argument is only meaningful
/// for fog targets; the cloud runs at its fixed operating point.
pub fn energy_compute(
    r: &Request,
    target: NodeRef,
    fleet: &Fleet,
    f_ghz: f64,
) -> Result<f64, ModelError> {
    match target {
        NodeRef::Fog(n) => Ok(r.flops() / beta_fog(fleet, n, f_ghz)?),
        NodeRef::Cloud(c) => Ok(r.flops() / cloud_spec(fleet, c)?.beta_flops_per_watt),
    }
}

/// Communication energy in joules: gamma per bit over (1 + o)*L bits,
/// times the hop count for fog targets. Zero when served at the origin.
pub fn energy_comm(r: &Request, target: NodeRef, fleet: &Fleet) -> Result<f64, ModelError> {
    let bits = r.size_bits * (1.0 + r.output_ratio);
    match target {
        NodeRef::Fog(n) => {
            let node = fog_spec(fleet, n)?;
            let hops = fleet.hops(r.origin, n);
            if hops == 0 {
                return Ok(0.0);
            }
            Ok(bits * node.gamma_j_per_bit_hop * hops as f64)
        }
        NodeRef::Cloud(c) => Ok(bits * cloud_spec(fleet, c)?.gamma_j_per_bit),
    }
}

/// Computation time in seconds.
pub fn delay_compute(
    r: &Request,
    target: NodeRef,
    fleet: &Fleet,
    f_ghz: f64,
) -> Result<f64, ModelError> {
    match target {
        NodeRef::Fog(n) => {
            let node = fog_spec(fleet, n)?;
            Ok(r.flops() / (f_ghz * 1e9 * node.flop_per_cycle))
        }
        NodeRef::Cloud(c) => {
            let cloud = cloud_spec(fleet, c)?;
            Ok(r.flops() / (cloud.freq_ghz * 1e9 * cloud.flop_per_cycle))
        }
    }
}

/// Transfer times to and from the serving node. Zero both ways when the
/// request is served where it arrived.
pub fn delay_comm(r: &Request, target: NodeRef, fleet: &Fleet) -> Result<CommDelays, ModelError> {
    match target {
        NodeRef::Fog(n) => {
            let node = fog_spec(fleet, n)?;
            if r.origin == n {
                return Ok(CommDelays { up_s: 0.0, down_s: 0.0 });
            }
            Ok(CommDelays {
                up_s: r.size_bits / node.bitrate_bps,
                down_s: r.size_bits * r.output_ratio / node.bitrate_bps,
            })
        }
        NodeRef::Cloud(c) => {
            let cloud = cloud_spec(fleet, c)?;
            Ok(CommDelays {
                up_s: r.size_bits / cloud.bitrate_bps + cloud.distance_km * cloud.chi_s_per_km,
                down_s: r.size_bits * r.output_ratio / cloud.bitrate_bps,
            })
        }
    }
}

/// Wait until the target fog node is free, counted after the input has
/// arrived there: max(0, t_n - T_k - D_up). Clouds never queue.
pub fn delay_queue(
    r: &Request,
    target: NodeRef,
    fleet: &Fleet,
    state: &ScheduleState,
    t_k: f64,
) -> Result<f64, ModelError> {
    match target {
        NodeRef::Fog(n) => {
            let up = delay_comm(r, target, fleet)?.up_s;
            Ok((state.busy_until(n) - t_k - up).max(0.0))
        }
        NodeRef::Cloud(c) => {
            cloud_spec(fleet, c)?;
            Ok(0.0)
        }
    }
}

/// Full energy/delay breakdown of serving `r` on `target` at `f_ghz`.
///
/// The totals are built in a fixed order (e_cp + e_comm and
/// up + down + queue + compute) so repeated evaluations are bit-identical.
pub fn total_cost(
    r: &Request,
    target: NodeRef,
    fleet: &Fleet,
    f_ghz: f64,
    state: &ScheduleState,
    t_k: f64,
) -> Result<CostBreakdown, ModelError> {
    let e_cp = energy_compute(r, target, fleet, f_ghz)?;
    let e_comm = energy_comm(r, target, fleet)?;
    let comm = delay_comm(r, target, fleet)?;
    let d_queue = delay_queue(r, target, fleet, state, t_k)?;
    let d_cp = delay_compute(r, target, fleet, f_ghz)?;
    let d_tot = comm.up_s + comm.down_s + d_queue + d_cp;
    Ok(CostBreakdown {
        e_cp_j: e_cp,
        e_comm_j: e_comm,
        e_tot_j: e_cp + e_comm,
        d_comm_up_s: comm.up_s,
        d_comm_down_s: comm.down_s,
        d_queue_s: d_queue,
        d_cp_s: d_cp,
        d_tot_s: d_tot,
        feasible: d_tot <= r.deadline_s,
    })
}

/// Advance fog busy-until times for the accepted allocations of one
/// instance: t_n := max(t_n, T_k + D_up + D_queue + D_cp). The downlink
/// does not occupy the node. Cloud allocations leave the schedule alone.
///
/// Panics if the batch books the same fog node twice; allocators must
/// serialize multiple same-node allocations through repeated calls.
pub fn update_schedule(state: &mut ScheduleState, accepted: &[AllocationResult], t_k: f64) {
    let mut seen = vec![false; state.len()];
    for res in accepted {
        let Outcome::Accepted { node: NodeRef::Fog(n), cost, .. } = &res.outcome else {
            continue;
        };
        assert!(
            !seen[*n],
            "two accepted requests booked fog node {n} in one schedule update"
        );
        seen[*n] = true;
        state.raise(*n, t_k + cost.d_comm_up_s + cost.d_queue_s + cost.d_cp_s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{
        assert_rel, reference_cloud as test_cloud, reference_fog as test_fog, request,
        small_fleet as fleet,
    };

    const REL: f64 = 1e-12;

    #[test]
    fn power_poly_reference_value() {
        // 5.222 + 34.256 + 88.594 - 47.152 at 1 GHz
        let p = power_active(&fleet(), 0, 1.0);
        // 1.0 GHz is below f_min for the reference node, widen bounds first
        assert!(p.is_err());
        let mut fog = test_fog();
        fog.f_min_ghz = 0.5;
        let f = Fleet::new(vec![fog], vec![]);
        assert_rel(power_active(&f, 0, 1.0).unwrap(), 80.920, REL);
    }

    #[test]
    fn power_poly_degenerate_shapes() {
        let mut fog = test_fog();
        fog.power_coeffs = vec![7.25]; // constant
        fog.f_min_ghz = 1.0;
        fog.f_max_ghz = 4.0;
        let f = Fleet::new(vec![fog], vec![]);
        assert_eq!(power_active(&f, 0, 3.0).unwrap(), 7.25);

        let mut fog = test_fog();
        fog.power_coeffs = vec![0.0, 1.0, 0.0, 0.0]; // pure linear term
        fog.f_min_ghz = 1.0;
        fog.f_max_ghz = 4.0;
        let f = Fleet::new(vec![fog], vec![]);
        assert_eq!(power_active(&f, 0, 2.0).unwrap(), 2.0);
    }

    #[test]
    fn power_bounds_and_positivity_errors() {
        let f = fleet();
        assert_eq!(
            power_active(&f, 0, 5.0).unwrap_err(),
            ModelError::FrequencyOutOfBounds { node: 0, f_ghz: 5.0, f_min_ghz: 1.6, f_max_ghz: 4.2 }
        );
        let mut fog = test_fog();
        fog.power_coeffs = vec![-1.0];
        let f = Fleet::new(vec![fog], vec![]);
        assert!(matches!(
            power_active(&f, 0, 2.0).unwrap_err(),
            ModelError::NonPositivePower { node: 0, .. }
        ));
    }

    #[test]
    fn beta_fog_reference_value() {
        let mut fog = test_fog();
        fog.f_min_ghz = 0.5;
        let f = Fleet::new(vec![fog], vec![]);
        // 16e9 / 80.920
        assert_rel(beta_fog(&f, 0, 1.0).unwrap(), 1.977261492832427e8, 1e-9);
    }

    #[test]
    fn compute_energy_fog_and_cloud() {
        let mut fog = test_fog();
        fog.f_min_ghz = 0.5;
        let f = Fleet::new(vec![fog], vec![test_cloud()]);
        let r = request(8e6, 10.0, 0.0, 0, 1.0);
        // 8e7 * 80.920 / 1.6e10
        assert_rel(energy_compute(&r, NodeRef::Fog(0), &f, 1.0).unwrap(), 0.404600, REL);
        // 8e7 / 1.3e9
        assert_rel(
            energy_compute(&r, NodeRef::Cloud(0), &f, 1.0).unwrap(),
            0.061538461538461538,
            REL,
        );
    }

    #[test]
    fn compute_energy_routes_agree() {
        // L*theta/beta against the expanded rational form
        // (L*theta/(s*1e9)) * (p0/f + p1 + p2 f + ... ).
        let f = fleet();
        let r = request(3.7e7, 55.0, 0.2, 0, 1.0);
        for i in 0..60 {
            let f_ghz = 1.6 + (4.2 - 1.6) * i as f64 / 59.0;
            let via_beta = energy_compute(&r, NodeRef::Fog(1), &f, f_ghz).unwrap();
            let node = &f.fogs[1];
            let k = r.flops() / (node.flop_per_cycle * 1e9);
            let mut rational = node.power_coeffs[0] / f_ghz;
            for (q, &c) in node.power_coeffs.iter().enumerate().skip(1) {
                rational += c * f_ghz.powi(q as i32 - 1);
            }
            assert_rel(via_beta, k * rational, REL);
        }
    }

    #[test]
    fn comm_energy_cases() {
        let f = fleet();
        let cloudy = request(8e6, 1.0, 0.5, 0, 1.0);
        assert_rel(energy_comm(&cloudy, NodeRef::Cloud(0), &f).unwrap(), 0.12, REL);
        let local = request(8e6, 1.0, 0.0, 0, 1.0);
        assert_eq!(energy_comm(&local, NodeRef::Fog(0), &f).unwrap(), 0.0);
        assert_rel(energy_comm(&local, NodeRef::Fog(1), &f).unwrap(), 2.4e-3, REL);
    }

    #[test]
    fn comm_energy_scales_with_hops() {
        let fleet =
            Fleet::with_hop_matrix(vec![test_fog(), test_fog()], vec![], vec![0, 4, 4, 0]).unwrap();
        let r = request(8e6, 1.0, 0.0, 0, 1.0);
        assert_rel(energy_comm(&r, NodeRef::Fog(1), &fleet).unwrap(), 4.0 * 2.4e-3, REL);
    }

    #[test]
    fn compute_delay_values() {
        let f = fleet();
        let r = request(8e6, 10.0, 0.0, 0, 1.0);
        // 8e7 / (2e9 * 16)
        assert_rel(delay_compute(&r, NodeRef::Fog(0), &f, 2.0).unwrap(), 2.5e-3, REL);
        let heavy = request(8e6, 48.0, 0.0, 0, 1.0);
        // 3.84e8 / (1.5e9 * 32)
        assert_rel(delay_compute(&heavy, NodeRef::Cloud(0), &f, 0.0).unwrap(), 8e-3, REL);
    }

    #[test]
    fn comm_delay_values() {
        let f = fleet();
        let r = request(8e6, 1.0, 0.5, 0, 1.0);
        let cloud = delay_comm(&r, NodeRef::Cloud(0), &f).unwrap();
        assert_rel(cloud.up_s, 0.023, REL); // 8 ms transfer + 15 ms distance
        assert_rel(cloud.down_s, 0.004, REL);
        assert_rel(cloud.total_s(), 0.027, REL);

        let r = request(8e6, 1.0, 0.25, 0, 1.0);
        let hop = delay_comm(&r, NodeRef::Fog(1), &f).unwrap();
        assert_rel(hop.up_s, 8e-3, REL);
        assert_rel(hop.down_s, 2e-3, REL);
        let local = delay_comm(&r, NodeRef::Fog(0), &f).unwrap();
        assert_eq!((local.up_s, local.down_s), (0.0, 0.0));
    }

    #[test]
    fn queue_delay_cases() {
        let f = fleet();
        let mut state = ScheduleState::new(2);
        state.raise(0, 1.5);
        // busy until 1.5, arrival 1.0, no transfer for the origin node
        let r = request(8e6, 1.0, 0.0, 0, 1.0);
        let mut r_up = r.clone();
        r_up.origin = 1; // now node 0 is one hop away: up = 0.1 s at 80 Mbit/s
        let mut slow_fog = test_fog();
        slow_fog.bitrate_bps = 8e7;
        let f_slow = Fleet::new(vec![slow_fog.clone(), slow_fog], vec![test_cloud()]);
        assert_rel(delay_queue(&r_up, NodeRef::Fog(0), &f_slow, &state, 1.0).unwrap(), 0.4, REL);
        // an idle node never queues
        assert_eq!(delay_queue(&r, NodeRef::Fog(1), &f, &state, 1.0).unwrap(), 0.0);
        // early arrival cannot produce negative waits
        assert_eq!(delay_queue(&r, NodeRef::Fog(0), &f, &state, 2.0).unwrap(), 0.0);
        // clouds never queue
        assert_eq!(delay_queue(&r, NodeRef::Cloud(0), &f, &state, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn total_cost_sums_and_feasibility() {
        let f = fleet();
        let state = ScheduleState::new(2);
        let r = request(8e6, 100.0, 0.5, 0, 0.1);
        let cloud = total_cost(&r, NodeRef::Cloud(0), &f, 0.0, &state, 0.0).unwrap();
        // 0.012 + 0.015 + 8e8/4.8e10
        assert_rel(cloud.d_tot_s, 0.012 + 0.015 + 8e8 / 4.8e10, REL);
        assert!(cloud.feasible);
        assert_eq!(cloud.e_tot_j, cloud.e_cp_j + cloud.e_comm_j);
        assert_eq!(
            cloud.d_tot_s,
            cloud.d_comm_up_s + cloud.d_comm_down_s + cloud.d_queue_s + cloud.d_cp_s
        );

        let tight = request(8e6, 100.0, 0.5, 0, 0.014);
        let c = total_cost(&tight, NodeRef::Cloud(0), &f, 0.0, &state, 0.0).unwrap();
        assert!(!c.feasible, "deadline below the 15 ms distance floor");
    }

    #[test]
    fn schedule_update_follows_accepted_fog_work() {
        let f = fleet();
        let state = ScheduleState::new(2);
        let r = request(8e6, 10.0, 0.0, 0, 1.0);
        let cost = total_cost(&r, NodeRef::Fog(0), &f, 2.0, &state, 1.0).unwrap();
        let mut state = state;
        state.raise(0, 0.8);
        let accepted = vec![AllocationResult {
            request_id: 0,
            outcome: Outcome::Accepted { node: NodeRef::Fog(0), freq_ghz: 2.0, cost },
        }];
        update_schedule(&mut state, &accepted, 1.0);
        // max(0.8, 1.0 + 0 + 0 + 2.5e-3)
        assert_rel(state.busy_until(0), 1.0025, REL);
        assert_eq!(state.busy_until(1), 0.0);

        // a cloud allocation leaves the schedule untouched
        let cloud_cost = total_cost(&r, NodeRef::Cloud(0), &f, 0.0, &state, 2.0).unwrap();
        let cloud_alloc = vec![AllocationResult {
            request_id: 1,
            outcome: Outcome::Accepted { node: NodeRef::Cloud(0), freq_ghz: 1.5, cost: cloud_cost },
        }];
        let before = state.clone();
        update_schedule(&mut state, &cloud_alloc, 2.0);
        assert_eq!(state, before);
    }

    #[test]
    fn schedule_update_reference_numbers() {
        // t_n = 0.8, T_k = 1.0, D_up + D_queue + D_cp = 0.06 -> 1.06
        let mut state = ScheduleState::new(1);
        state.raise(0, 0.8);
        let cost = CostBreakdown {
            e_cp_j: 0.0,
            e_comm_j: 0.0,
            e_tot_j: 0.0,
            d_comm_up_s: 0.01,
            d_comm_down_s: 0.002,
            d_queue_s: 0.02,
            d_cp_s: 0.03,
            d_tot_s: 0.062,
            feasible: true,
        };
        let accepted = vec![AllocationResult {
            request_id: 7,
            outcome: Outcome::Accepted { node: NodeRef::Fog(0), freq_ghz: 2.0, cost },
        }];
        update_schedule(&mut state, &accepted, 1.0);
        assert_rel(state.busy_until(0), 1.06, REL);
    }

    #[test]
    #[should_panic(expected = "booked fog node 0")]
    fn schedule_update_rejects_double_booking() {
        let mut state = ScheduleState::new(1);
        let cost = CostBreakdown {
            e_cp_j: 0.0,
            e_comm_j: 0.0,
            e_tot_j: 0.0,
            d_comm_up_s: 0.0,
            d_comm_down_s: 0.0,
            d_queue_s: 0.0,
            d_cp_s: 0.1,
            d_tot_s: 0.1,
            feasible: true,
        };
        let one = AllocationResult {
            request_id: 0,
            outcome: Outcome::Accepted { node: NodeRef::Fog(0), freq_ghz: 2.0, cost },
        };
        let two = AllocationResult { request_id: 1, ..one.clone() };
        update_schedule(&mut state, &[one, two], 0.0);
    }

    #[test]
    fn unknown_node_errors() {
        let f = fleet();
        let r = request(8e6, 1.0, 0.0, 0, 1.0);
        assert!(matches!(
            energy_comm(&r, NodeRef::Cloud(3), &f).unwrap_err(),
            ModelError::UnknownNode { .. }
        ));
        assert!(matches!(
            energy_compute(&r, NodeRef::Fog(9), &f, 2.0).unwrap_err(),
            ModelError::UnknownNode { .. }
        ));
    }
}
