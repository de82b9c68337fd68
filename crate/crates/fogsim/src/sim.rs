//! Discrete-event simulation runs, metrics, and parameter sweeps.
//!
//! A run generates `horizon` arrival instances, feeds each batch to the
//! allocator, and logs every request with its outcome. The first
//! `warmup` instances stay in the log (they shape the schedule and any
//! replay needs them) but are excluded from all reported metrics, so the
//! statistics describe steady-state behavior.
//!
//! Sweeps rerun the same scenario with one knob changed per point, under
//! the same seed; since every drawn quantity has its own RNG stream, all
//! points see the same request sequence except for the swept attribute.

use std::fmt;
use std::str::FromStr;

use crate::alloc::{AllocParams, Allocator, AllocatorKind};
use crate::model::{Fleet, ModelError, NodeRef, Outcome, Request};
use crate::traffic::{Instance, TrafficGenerator, TrafficModel, ValueRange};

/// Everything needed to reproduce a run, minus the allocator choice.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub fleet: Fleet,
    pub traffic: TrafficModel,
    pub params: AllocParams,
    pub seed: u64,
    /// Total number of arrival instances to simulate.
    pub horizon: u32,
    /// Leading instances excluded from metrics (but kept in the log).
    pub warmup: u32,
    /// Bins per axis of the 2D intensity-deadline histograms.
    pub hist_bins: usize,
}

/// One request's fate, with enough context to replay the run.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub instance: u32,
    pub t_k: f64,
    pub request: Request,
    pub outcome: Outcome,
}

/// Post-warm-up aggregates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub total: u64,
    pub accepted: u64,
    pub rejected: u64,
    /// rejected / total; 0 for an empty window.
    pub rejection_ratio: f64,
    /// Mean accepted total energy, joules; 0 when nothing was accepted.
    pub avg_energy_j: f64,
    /// Share of accepted requests served on fog nodes.
    pub fog_share: f64,
}

/// A step of the empirical energy distribution over the post-warm-up
/// window. Fractions are relative to all requests in the window, so
/// rejected requests show up as the gap below 1 at the top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfPoint {
    pub energy_j: f64,
    pub cum_fraction: f64,
}

/// Joint intensity-deadline histogram over the post-warm-up window,
/// tracking how often requests in each bin ran on a fog node or were
/// rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Hist2d {
    pub bins: usize,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub d_max_lo: f64,
    pub d_max_hi: f64,
    /// Row-major `bins * bins` grids, intensity varying slowest.
    pub totals: Vec<u64>,
    pub fog_counts: Vec<u64>,
    pub rejected_counts: Vec<u64>,
}

impl Hist2d {
    pub fn new(bins: usize, theta: ValueRange, d_max: ValueRange) -> Self {
        assert!(bins >= 1, "histograms need at least one bin per axis");
        Hist2d {
            bins,
            theta_lo: theta.lo,
            theta_hi: theta.hi,
            d_max_lo: d_max.lo,
            d_max_hi: d_max.hi,
            totals: vec![0; bins * bins],
            fog_counts: vec![0; bins * bins],
            rejected_counts: vec![0; bins * bins],
        }
    }

    fn axis_bin(v: f64, lo: f64, hi: f64, bins: usize) -> usize {
        if hi <= lo {
            return 0;
        }
        let raw = ((v - lo) / (hi - lo) * bins as f64).floor();
        (raw.max(0.0) as usize).min(bins - 1)
    }

    pub fn cell(&self, theta: f64, d_max: f64) -> usize {
        let i = Self::axis_bin(theta, self.theta_lo, self.theta_hi, self.bins);
        let j = Self::axis_bin(d_max, self.d_max_lo, self.d_max_hi, self.bins);
        i * self.bins + j
    }

    fn record(&mut self, r: &Request, outcome: &Outcome) {
        let cell = self.cell(r.intensity, r.deadline_s);
        self.totals[cell] += 1;
        match outcome {
            Outcome::Accepted { node: NodeRef::Fog(_), .. } => self.fog_counts[cell] += 1,
            Outcome::Accepted { .. } => {}
            Outcome::Rejected => self.rejected_counts[cell] += 1,
        }
    }

    /// Bin edges of cell `(i, j)` as (theta_lo, theta_hi, d_lo, d_hi).
    pub fn edges(&self, i: usize, j: usize) -> (f64, f64, f64, f64) {
        let t_w = (self.theta_hi - self.theta_lo) / self.bins as f64;
        let d_w = (self.d_max_hi - self.d_max_lo) / self.bins as f64;
        (
            self.theta_lo + t_w * i as f64,
            self.theta_lo + t_w * (i + 1) as f64,
            self.d_max_lo + d_w * j as f64,
            self.d_max_lo + d_w * (j + 1) as f64,
        )
    }
}

/// Full result of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub kind: AllocatorKind,
    pub warmup: u32,
    pub log: Vec<LogEntry>,
    pub metrics: RunMetrics,
    pub cdf: Vec<CdfPoint>,
    pub hist: Hist2d,
}

/// Simulate one allocator over the scenario.
pub fn run(sc: &Scenario, kind: AllocatorKind) -> Result<RunOutput, ModelError> {
    assert!(sc.warmup <= sc.horizon, "warm-up cannot exceed the horizon");
    let mut gen = TrafficGenerator::new(sc.traffic.clone(), sc.seed);
    let mut alloc = Allocator::new(kind, sc.params.clone(), sc.fleet.fogs.len(), sc.seed);
    let mut log = Vec::new();
    for instance in 0..sc.horizon {
        let Instance { t_k, requests } = gen.next_instance();
        let results = alloc.allocate_instance(&requests, &sc.fleet, t_k)?;
        debug_assert_eq!(results.len(), requests.len());
        for (request, result) in requests.into_iter().zip(results) {
            debug_assert_eq!(request.id, result.request_id);
            log.push(LogEntry { instance, t_k, request, outcome: result.outcome });
        }
    }
    Ok(summarize(sc, kind, log))
}

fn summarize(sc: &Scenario, kind: AllocatorKind, log: Vec<LogEntry>) -> RunOutput {
    let mut hist = Hist2d::new(
        sc.hist_bins,
        sc.traffic.intensity_flop_per_bit,
        sc.traffic.deadline_s,
    );
    let mut total = 0u64;
    let mut accepted = 0u64;
    let mut fog_accepted = 0u64;
    let mut energy_sum = 0.0;
    let mut energies = Vec::new();
    for entry in log.iter().filter(|e| e.instance >= sc.warmup) {
        total += 1;
        hist.record(&entry.request, &entry.outcome);
        if let Outcome::Accepted { node, cost, .. } = &entry.outcome {
            accepted += 1;
            energy_sum += cost.e_tot_j;
            energies.push(cost.e_tot_j);
            if matches!(node, NodeRef::Fog(_)) {
                fog_accepted += 1;
            }
        }
    }
    energies.sort_by(f64::total_cmp);
    let cdf = energies
        .iter()
        .enumerate()
        .map(|(i, &energy_j)| CdfPoint { energy_j, cum_fraction: (i + 1) as f64 / total as f64 })
        .collect();
    let metrics = RunMetrics {
        total,
        accepted,
        rejected: total - accepted,
        rejection_ratio: if total == 0 { 0.0 } else { (total - accepted) as f64 / total as f64 },
        avg_energy_j: if accepted == 0 { 0.0 } else { energy_sum / accepted as f64 },
        fog_share: if accepted == 0 { 0.0 } else { fog_accepted as f64 / accepted as f64 },
    };
    RunOutput { kind, warmup: sc.warmup, log, metrics, cdf, hist }
}

/// Run several allocators over identical traffic (same seed, same
/// streams), in the order given.
pub fn compare_allocators(
    sc: &Scenario,
    kinds: &[AllocatorKind],
) -> Result<Vec<RunOutput>, ModelError> {
    kinds.iter().map(|&kind| run(sc, kind)).collect()
}

/// A swept scenario knob. Values are given in the axis's canonical unit
/// and converted on application.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Cloud efficiency, GFLOP per second per watt.
    CloudBeta,
    /// Pinned fog frequency, GHz.
    FixedFreq,
    /// Deadline collapsed to a single value, milliseconds.
    DMax,
    /// Request size collapsed to a single value, megabytes.
    Size,
    /// Mean inter-arrival gap, milliseconds.
    MeanInterarrival,
    /// Upper end of the intensity range, FLOP per bit.
    ThetaMax,
}

impl SweepAxis {
    pub fn all() -> [SweepAxis; 6] {
        [
            SweepAxis::CloudBeta,
            SweepAxis::FixedFreq,
            SweepAxis::DMax,
            SweepAxis::Size,
            SweepAxis::MeanInterarrival,
            SweepAxis::ThetaMax,
        ]
    }

    pub fn key(&self) -> &'static str {
        match self {
            SweepAxis::CloudBeta => "cloud_beta",
            SweepAxis::FixedFreq => "fixed_freq",
            SweepAxis::DMax => "d_max",
            SweepAxis::Size => "size",
            SweepAxis::MeanInterarrival => "mean_interarrival",
            SweepAxis::ThetaMax => "theta_max",
        }
    }

    pub fn canonical_unit(&self) -> &'static str {
        match self {
            SweepAxis::CloudBeta => "GFLOP/(s*W)",
            SweepAxis::FixedFreq => "GHz",
            SweepAxis::DMax => "ms",
            SweepAxis::Size => "MB",
            SweepAxis::MeanInterarrival => "ms",
            SweepAxis::ThetaMax => "FLOP/bit",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown sweep axis {0:?}; expected one of cloud_beta, fixed_freq, d_max, size, mean_interarrival, theta_max")]
pub struct ParseAxisError(String);

impl FromStr for SweepAxis {
    type Err = ParseAxisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepAxis::all()
            .into_iter()
            .find(|a| a.key() == s)
            .ok_or_else(|| ParseAxisError(s.to_string()))
    }
}

/// Set one axis to a canonical-unit value on a scenario.
pub fn apply_axis(sc: &mut Scenario, axis: SweepAxis, value: f64) {
    match axis {
        SweepAxis::CloudBeta => {
            for cloud in &mut sc.fleet.clouds {
                cloud.beta_flops_per_watt = value * 1e9;
            }
        }
        SweepAxis::FixedFreq => sc.params.fixed_freq_ghz = Some(value),
        SweepAxis::DMax => sc.traffic.deadline_s = ValueRange::fixed(value * 1e-3),
        SweepAxis::Size => sc.traffic.size_bits = ValueRange::fixed(value * 8e6),
        SweepAxis::MeanInterarrival => sc.traffic.mean_interarrival_s = value * 1e-3,
        SweepAxis::ThetaMax => {
            sc.traffic.intensity_flop_per_bit =
                ValueRange::new(sc.traffic.intensity_flop_per_bit.lo, value)
        }
    }
}

/// One sweep point: the canonical-unit value and the run it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub output: RunOutput,
}

/// Rerun the scenario once per value of the axis, same seed throughout.
pub fn sweep(
    sc: &Scenario,
    kind: AllocatorKind,
    axis: SweepAxis,
    values: &[f64],
) -> Result<Vec<SweepPoint>, ModelError> {
    values
        .iter()
        .map(|&value| {
            let mut point = sc.clone();
            apply_axis(&mut point, axis, value);
            Ok(SweepPoint { value, output: run(&point, kind)? })
        })
        .collect()
}
