//! Allocation policies.
//!
//! Five policies turn a batch of simultaneous requests into accept or
//! reject decisions against the shared fog schedule:
//!
//! * `EEFFRA`: per-pair frequency optimization feeding a global
//!   minimum-energy assignment (Hungarian). Within one batch a fog node
//!   takes at most one request; the cloud takes any number.
//! * `LC-EEFFRA`: greedy low-complexity variant; requests are shuffled
//!   and each grabs its cheapest still-free node.
//! * `CLOUD_ONLY`: everything goes to the cheapest feasible cloud.
//! * `FOG_ONLY`: the greedy variant restricted to fog nodes.
//! * `FOG_SIMPLE`: every request runs on its origin node, in arrival
//!   order, queueing behind earlier work.
//!
//! Every accepted request gets its exact cost breakdown, checked strictly
//! against the deadline; results come back in the input order.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::assign;
use crate::cost;
use crate::freq::{self, DcSplit, ScaParams};
use crate::model::{
    AllocationResult, CostBreakdown, Fleet, ModelError, NodeRef, Outcome, Request, ScheduleState,
};
use crate::traffic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AllocatorKind {
    Eeffra,
    LcEeffra,
    CloudOnly,
    FogOnly,
    FogSimple,
}

impl AllocatorKind {
    pub fn all() -> [AllocatorKind; 5] {
        [
            AllocatorKind::Eeffra,
            AllocatorKind::LcEeffra,
            AllocatorKind::CloudOnly,
            AllocatorKind::FogOnly,
            AllocatorKind::FogSimple,
        ]
    }
}

impl fmt::Display for AllocatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            AllocatorKind::Eeffra => "EEFFRA",
            AllocatorKind::LcEeffra => "LC-EEFFRA",
            AllocatorKind::CloudOnly => "CLOUD_ONLY",
            AllocatorKind::FogOnly => "FOG_ONLY",
            AllocatorKind::FogSimple => "FOG_SIMPLE",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown allocator {0:?}; expected one of EEFFRA, LC-EEFFRA, CLOUD_ONLY, FOG_ONLY, FOG_SIMPLE")]
pub struct ParseAllocatorError(String);

impl FromStr for AllocatorKind {
    type Err = ParseAllocatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('_', "-").as_str() {
            "EEFFRA" => Ok(AllocatorKind::Eeffra),
            "LC-EEFFRA" => Ok(AllocatorKind::LcEeffra),
            "CLOUD-ONLY" => Ok(AllocatorKind::CloudOnly),
            "FOG-ONLY" => Ok(AllocatorKind::FogOnly),
            "FOG-SIMPLE" => Ok(AllocatorKind::FogSimple),
            _ => Err(ParseAllocatorError(s.to_string())),
        }
    }
}

/// Knobs shared by all policies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AllocParams {
    pub sca: ScaParams,
    /// Pin every fog node to this frequency instead of optimizing. The
    /// deadline-driven minimum frequency still applies: a request whose
    /// minimum exceeds the pin is infeasible on that node.
    pub fixed_freq_ghz: Option<f64>,
}

/// Frequency choice and exact cost of serving `r` on `target` under the
/// current schedule; `None` when the deadline cannot be met there.
pub fn evaluate_pair(
    r: &Request,
    target: NodeRef,
    fleet: &Fleet,
    state: &ScheduleState,
    t_k: f64,
    params: &AllocParams,
) -> Result<Option<(f64, CostBreakdown)>, ModelError> {
    let freq_ghz = match target {
        NodeRef::Fog(fog) => {
            let Some(lo) = freq::delay_min_frequency(r, fog, fleet, state, t_k)? else {
                return Ok(None);
            };
            match params.fixed_freq_ghz {
                Some(fixed) => {
                    if fixed < lo {
                        return Ok(None);
                    }
                    fixed
                }
                None => {
                    let node = &fleet.fogs[fog];
                    let split = DcSplit::for_request(r, node);
                    freq::optimize_split(&split, lo, node.f_max_ghz, &params.sca)?.f_star_ghz
                }
            }
        }
        NodeRef::Cloud(cloud) => {
            let spec = fleet
                .clouds
                .get(cloud)
                .ok_or(ModelError::UnknownNode {
                    node: target,
                    n_fogs: fleet.fogs.len(),
                    n_clouds: fleet.clouds.len(),
                })?;
            spec.freq_ghz
        }
    };
    let bd = cost::total_cost(r, target, fleet, freq_ghz, state, t_k)?;
    Ok(bd.feasible.then_some((freq_ghz, bd)))
}

/// A policy plus the mutable context it evolves across instances: the
/// fog schedule and, for the greedy variants, the shuffle stream.
pub struct Allocator {
    kind: AllocatorKind,
    params: AllocParams,
    state: ScheduleState,
    shuffle: ChaCha8Rng,
}

impl Allocator {
    pub fn new(kind: AllocatorKind, params: AllocParams, n_fogs: usize, seed: u64) -> Self {
        Allocator {
            kind,
            params,
            state: ScheduleState::new(n_fogs),
            shuffle: traffic::lc_shuffle_rng(seed),
        }
    }

    pub fn kind(&self) -> AllocatorKind {
        self.kind
    }

    pub fn state(&self) -> &ScheduleState {
        &self.state
    }

    /// Decide one batch arriving at `t_k`. Results are in input order.
    pub fn allocate_instance(
        &mut self,
        requests: &[Request],
        fleet: &Fleet,
        t_k: f64,
    ) -> Result<Vec<AllocationResult>, ModelError> {
        match self.kind {
            AllocatorKind::Eeffra => self.eeffra(requests, fleet, t_k),
            AllocatorKind::LcEeffra => self.greedy(requests, fleet, t_k, true, true),
            AllocatorKind::FogOnly => self.greedy(requests, fleet, t_k, false, true),
            AllocatorKind::CloudOnly => self.greedy(requests, fleet, t_k, true, false),
            AllocatorKind::FogSimple => self.fog_simple(requests, fleet, t_k),
        }
    }

    fn eeffra(
        &mut self,
        requests: &[Request],
        fleet: &Fleet,
        t_k: f64,
    ) -> Result<Vec<AllocationResult>, ModelError> {
        let matrix = assign::build_cost_matrix(
            requests,
            fleet,
            &self.state,
            t_k,
            &self.params.sca,
            self.params.fixed_freq_ghz,
        )?;
        let mut outcomes: Vec<Outcome> = vec![Outcome::Rejected; requests.len()];

        // rows that no node can serve never enter the assignment
        let mut alive: Vec<usize> = (0..requests.len())
            .filter(|&row| (0..matrix.cols()).any(|col| !matrix.is_penalty(row, col)))
            .collect();

        // `alive.len()` reject columns appended after the real ones keep
        // the problem square enough whenever fog slots run out; a request
        // parked on one costs exactly one penalty, so the solver first
        // minimizes how many are rejected, then the energy of the rest.
        // Re-solving without the rejected rows is cheap insurance that
        // the survivors' placement is a fixed point.
        let mut passes = 0;
        while !alive.is_empty() {
            passes += 1;
            assert!(passes <= requests.len() + 1, "rejection loop failed to shrink");
            let n = alive.len();
            let cols = matrix.cols() + n;
            let cost_of = |sub_row: usize, col: usize| {
                if col < matrix.cols() {
                    matrix.cost(alive[sub_row], col)
                } else {
                    matrix.big_m()
                }
            };
            let solved = assign::hungarian(n, cols, cost_of);
            let rejected_now: Vec<usize> = solved
                .iter()
                .enumerate()
                .filter(|&(sub_row, &col)| {
                    col >= matrix.cols() || matrix.is_penalty(alive[sub_row], col)
                })
                .map(|(sub_row, _)| alive[sub_row])
                .collect();
            if !rejected_now.is_empty() {
                alive.retain(|row| !rejected_now.contains(row));
                continue;
            }
            for (sub_row, &col) in solved.iter().enumerate() {
                let row = alive[sub_row];
                let (node, freq_ghz) = match matrix.column_target(col) {
                    NodeRef::Fog(fog) => (
                        NodeRef::Fog(fog),
                        matrix.fog_freq(row, fog).expect("feasible fog cell has a frequency"),
                    ),
                    NodeRef::Cloud(cloud) => (NodeRef::Cloud(cloud), fleet.clouds[cloud].freq_ghz),
                };
                let bd =
                    cost::total_cost(&requests[row], node, fleet, freq_ghz, &self.state, t_k)?;
                if bd.feasible {
                    outcomes[row] = Outcome::Accepted { node, freq_ghz, cost: bd };
                }
            }
            break;
        }

        let results: Vec<AllocationResult> = requests
            .iter()
            .zip(outcomes)
            .map(|(r, outcome)| AllocationResult { request_id: r.id, outcome })
            .collect();
        cost::update_schedule(&mut self.state, &results, t_k);
        Ok(results)
    }

    /// Shared greedy core: requests pick their cheapest feasible node in
    /// shuffled order (arrival order for the cloud-only case, where the
    /// outcome is order-independent anyway). A fog node accepted in this
    /// batch is immediately booked and leaves the candidate pool; cloud
    /// capacity is unlimited.
    fn greedy(
        &mut self,
        requests: &[Request],
        fleet: &Fleet,
        t_k: f64,
        use_clouds: bool,
        use_fogs: bool,
    ) -> Result<Vec<AllocationResult>, ModelError> {
        let mut order: Vec<usize> = (0..requests.len()).collect();
        if use_fogs {
            order.shuffle(&mut self.shuffle);
        }

        // evaluations against the instant's initial schedule stay valid
        // for exactly the nodes still in the pool, because accepting a
        // request only ever changes the booked node's timeline
        let mut fog_evals: Vec<Vec<Option<(f64, CostBreakdown)>>> = Vec::new();
        let mut cloud_evals: Vec<Vec<Option<(f64, CostBreakdown)>>> = Vec::new();
        for r in requests {
            if use_fogs {
                fog_evals.push(
                    (0..fleet.fogs.len())
                        .map(|fog| {
                            evaluate_pair(r, NodeRef::Fog(fog), fleet, &self.state, t_k, &self.params)
                        })
                        .collect::<Result<_, _>>()?,
                );
            }
            if use_clouds {
                cloud_evals.push(
                    (0..fleet.clouds.len())
                        .map(|cloud| {
                            evaluate_pair(
                                r,
                                NodeRef::Cloud(cloud),
                                fleet,
                                &self.state,
                                t_k,
                                &self.params,
                            )
                        })
                        .collect::<Result<_, _>>()?,
                );
            }
        }

        let mut taken = vec![false; fleet.fogs.len()];
        let mut outcomes: Vec<Outcome> = vec![Outcome::Rejected; requests.len()];
        for &row in &order {
            let mut best: Option<(f64, NodeRef, f64, CostBreakdown)> = None;
            let mut consider = |node: NodeRef, eval: &Option<(f64, CostBreakdown)>| {
                if let Some((freq_ghz, bd)) = eval {
                    if best.as_ref().is_none_or(|(e, ..)| bd.e_tot_j < *e) {
                        best = Some((bd.e_tot_j, node, *freq_ghz, *bd));
                    }
                }
            };
            if use_fogs {
                for (fog, eval) in fog_evals[row].iter().enumerate() {
                    if !taken[fog] {
                        consider(NodeRef::Fog(fog), eval);
                    }
                }
            }
            if use_clouds {
                for (cloud, eval) in cloud_evals[row].iter().enumerate() {
                    consider(NodeRef::Cloud(cloud), eval);
                }
            }
            if let Some((_, node, freq_ghz, bd)) = best {
                outcomes[row] = Outcome::Accepted { node, freq_ghz, cost: bd };
                if let NodeRef::Fog(fog) = node {
                    taken[fog] = true;
                    let booked = AllocationResult {
                        request_id: requests[row].id,
                        outcome: outcomes[row].clone(),
                    };
                    cost::update_schedule(&mut self.state, std::slice::from_ref(&booked), t_k);
                }
            }
        }

        Ok(requests
            .iter()
            .zip(outcomes)
            .map(|(r, outcome)| AllocationResult { request_id: r.id, outcome })
            .collect())
    }

    /// Everything runs on its origin node in arrival order, queueing
    /// behind both earlier instances and earlier requests of this batch.
    fn fog_simple(
        &mut self,
        requests: &[Request],
        fleet: &Fleet,
        t_k: f64,
    ) -> Result<Vec<AllocationResult>, ModelError> {
        let mut results = Vec::with_capacity(requests.len());
        for r in requests {
            let target = NodeRef::Fog(r.origin);
            let outcome = match evaluate_pair(r, target, fleet, &self.state, t_k, &self.params)? {
                Some((freq_ghz, bd)) => Outcome::Accepted { node: target, freq_ghz, cost: bd },
                None => Outcome::Rejected,
            };
            let result = AllocationResult { request_id: r.id, outcome };
            if result.is_accepted() {
                cost::update_schedule(&mut self.state, std::slice::from_ref(&result), t_k);
            }
            results.push(result);
        }
        Ok(results)
    }
}
