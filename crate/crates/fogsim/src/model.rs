//! Domain types shared by every other module: requests, node hardware
//! descriptions, the fog schedule, and allocation outcomes.
//!
//! Unit conventions, used consistently across the crate:
//! data sizes in bits, times in seconds, energies in joules.
//! CPU frequency is carried in GHz because the power polynomial
//! coefficients are calibrated for frequency expressed in GHz;
//! the only places the 1e9 factor appears are cycle-rate formulas.

use thiserror::Error;

/// One offloadable computation request.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub id: u64,
    /// Arrival time of the batch this request belongs to (T_k).
    pub arrival_s: f64,
    /// Input size L in bits.
    pub size_bits: f64,
    /// Computational intensity theta, FLOP per input bit.
    pub intensity: f64,
    /// Output-to-input size ratio o; the result sent back is o * L bits.
    pub output_ratio: f64,
    /// Index of the fog node that received the request (b^r).
    pub origin: usize,
    /// End-to-end deadline D_max in seconds, measured from arrival.
    pub deadline_s: f64,
}

impl Request {
    /// Total workload L * theta in FLOP.
    pub fn flops(&self) -> f64 {
        self.size_bits * self.intensity
    }
}

/// Fog node hardware description.
///
/// `power_coeffs[q]` is p_q in watts for frequency in GHz:
/// P_act(f) = sum_q p_q * f^q. Coefficients may be negative as long as
/// the polynomial stays positive on [f_min, f_max].
#[derive(Debug, Clone, PartialEq)]
pub struct FogNodeSpec {
    pub power_coeffs: Vec<f64>,
    pub f_min_ghz: f64,
    pub f_max_ghz: f64,
    /// FLOP retired per cycle (s_n).
    pub flop_per_cycle: f64,
    /// Transmission energy per bit per hop between fog nodes.
    pub gamma_j_per_bit_hop: f64,
    /// Link rate between fog nodes, bit/s.
    pub bitrate_bps: f64,
}

/// Cloud data center description. The cloud runs at a fixed frequency and
/// is modeled through its computational efficiency beta, so no DVFS.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudSpec {
    /// Computational efficiency in FLOP/(s*W). E_cp = L*theta / beta.
    pub beta_flops_per_watt: f64,
    pub freq_ghz: f64,
    pub flop_per_cycle: f64,
    /// One-way fog-to-cloud distance in km.
    pub distance_km: f64,
    /// Per-km propagation delay, charged once on the uplink.
    pub chi_s_per_km: f64,
    /// Transmission energy per bit to/from the cloud.
    pub gamma_j_per_bit: f64,
    /// Backhaul rate, bit/s.
    pub bitrate_bps: f64,
}

/// The set of nodes a request can be served by.
#[derive(Debug, Clone, PartialEq)]
pub struct Fleet {
    pub fogs: Vec<FogNodeSpec>,
    pub clouds: Vec<CloudSpec>,
    /// Row-major |F| x |F| hop counts; `None` means 1 hop between any two
    /// distinct fog nodes. The diagonal is ignored (self is always 0 hops).
    hop_matrix: Option<Vec<u32>>,
}

impl Fleet {
    pub fn new(fogs: Vec<FogNodeSpec>, clouds: Vec<CloudSpec>) -> Self {
        Fleet { fogs, clouds, hop_matrix: None }
    }

    pub fn with_hop_matrix(
        fogs: Vec<FogNodeSpec>,
        clouds: Vec<CloudSpec>,
        hop_matrix: Vec<u32>,
    ) -> Result<Self, ModelError> {
        let expected = fogs.len() * fogs.len();
        if hop_matrix.len() != expected {
            return Err(ModelError::HopMatrixShape { expected, got: hop_matrix.len() });
        }
        Ok(Fleet { fogs, clouds, hop_matrix: Some(hop_matrix) })
    }

    pub fn hop_matrix(&self) -> Option<&[u32]> {
        self.hop_matrix.as_deref()
    }

    /// Hop count between two fog nodes; 0 for the node itself.
    pub fn hops(&self, from: usize, to: usize) -> u32 {
        if from == to {
            return 0;
        }
        match &self.hop_matrix {
            Some(m) => m[from * self.fogs.len() + to],
            None => 1,
        }
    }
}

/// A processing target: either a fog node or a cloud, by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRef {
    Fog(usize),
    Cloud(usize),
}

impl std::fmt::Display for NodeRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeRef::Fog(i) => write!(f, "fog{i}"),
            NodeRef::Cloud(i) => write!(f, "cloud{i}"),
        }
    }
}

/// Earliest time each fog node becomes free (t_n). Clouds are assumed
/// horizontally scaled and never queue.
///
/// Values start at 0 and never decrease; the only mutation path is
/// [`crate::cost::update_schedule`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleState {
    busy_until: Vec<f64>,
}

impl ScheduleState {
    pub fn new(n_fogs: usize) -> Self {
        ScheduleState { busy_until: vec![0.0; n_fogs] }
    }

    pub fn busy_until(&self, fog: usize) -> f64 {
        self.busy_until[fog]
    }

    pub fn len(&self) -> usize {
        self.busy_until.len()
    }

    pub fn is_empty(&self) -> bool {
        self.busy_until.is_empty()
    }

    // Max clause: a candidate finish below the current one leaves the slot
    // untouched, so busy times never move backwards.
    pub(crate) fn raise(&mut self, fog: usize, until_s: f64) {
        self.busy_until[fog] = self.busy_until[fog].max(until_s);
    }
}

/// Per-request energy and delay figures for one (request, node, frequency)
/// combination. `e_tot_j` is always the sum of the two energy terms and
/// `d_tot_s` the sum of the four delay terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub e_cp_j: f64,
    pub e_comm_j: f64,
    pub e_tot_j: f64,
    pub d_comm_up_s: f64,
    pub d_comm_down_s: f64,
    pub d_queue_s: f64,
    pub d_cp_s: f64,
    pub d_tot_s: f64,
    /// d_tot_s <= deadline, checked without tolerance.
    pub feasible: bool,
}

/// What happened to one request in its instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Accepted {
        node: NodeRef,
        /// Chosen fog frequency, or the cloud's fixed frequency.
        freq_ghz: f64,
        cost: CostBreakdown,
    },
    Rejected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    pub request_id: u64,
    pub outcome: Outcome,
}

impl AllocationResult {
    pub fn is_accepted(&self) -> bool {
        matches!(self.outcome, Outcome::Accepted { .. })
    }

    pub fn accepted_node(&self) -> Option<NodeRef> {
        match &self.outcome {
            Outcome::Accepted { node, .. } => Some(*node),
            Outcome::Rejected => None,
        }
    }

    pub fn cost(&self) -> Option<&CostBreakdown> {
        match &self.outcome {
            Outcome::Accepted { cost, .. } => Some(cost),
            Outcome::Rejected => None,
        }
    }
}

/// Domain errors raised by the cost and frequency modules.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("frequency {f_ghz} GHz outside [{f_min_ghz}, {f_max_ghz}] GHz of fog node {node}")]
    FrequencyOutOfBounds { node: usize, f_ghz: f64, f_min_ghz: f64, f_max_ghz: f64 },
    #[error("active power of fog node {node} at {f_ghz} GHz is {power_w} W (must be positive)")]
    NonPositivePower { node: usize, f_ghz: f64, power_w: f64 },
    #[error("unknown node {node:?} for a fleet of {n_fogs} fog nodes and {n_clouds} clouds")]
    UnknownNode { node: NodeRef, n_fogs: usize, n_clouds: usize },
    #[error("hop matrix has {got} entries, expected {expected}")]
    HopMatrixShape { expected: usize, got: usize },
    #[error("frequency bounds inverted: [{lo_ghz}, {hi_ghz}] GHz")]
    InvertedBounds { lo_ghz: f64, hi_ghz: f64 },
}
