//! Stochastic request generation.
//!
//! Arrivals form a Poisson process: exponential gaps between batch
//! instants, a uniformly drawn batch size per instant, and uniformly
//! drawn attributes per request. Every drawn quantity consumes its own
//! counter-mode RNG stream derived from one seed, so changing, say, the
//! deadline range of a scenario perturbs only the deadline draws and
//! leaves every other attribute sequence bit-identical. Parameter sweeps
//! rely on this to compare allocators on the same request sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::model::Request;

pub const STREAM_INTERARRIVAL: u64 = 0;
pub const STREAM_BATCH: u64 = 1;
pub const STREAM_SIZE: u64 = 2;
pub const STREAM_INTENSITY: u64 = 3;
pub const STREAM_OUTPUT_RATIO: u64 = 4;
pub const STREAM_DEADLINE: u64 = 5;
pub const STREAM_ORIGIN: u64 = 6;
pub const STREAM_LC_SHUFFLE: u64 = 7;

/// RNG for the given stream id under a scenario seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// RNG reserved for shuffling request order inside the low-complexity
/// allocator, kept apart from the draw streams so allocator choice never
/// perturbs the traffic itself.
pub fn lc_shuffle_rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, STREAM_LC_SHUFFLE)
}

/// Closed interval sampled uniformly; a collapsed range always yields
/// its single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueRange {
    pub lo: f64,
    pub hi: f64,
}

impl ValueRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "range bounds out of order: {lo} .. {hi}");
        ValueRange { lo, hi }
    }

    pub fn fixed(v: f64) -> Self {
        ValueRange { lo: v, hi: v }
    }

    pub fn is_fixed(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.is_fixed() {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }
}

/// Distributional description of the offered load.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficModel {
    pub mean_interarrival_s: f64,
    pub batch_min: u32,
    pub batch_max: u32,
    pub size_bits: ValueRange,
    pub intensity_flop_per_bit: ValueRange,
    pub output_ratio: ValueRange,
    pub deadline_s: ValueRange,
    /// Requests originate uniformly at one of this many fog nodes.
    pub origins: usize,
}

/// One arrival instant and the batch of requests landing on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub t_k: f64,
    pub requests: Vec<Request>,
}

pub struct TrafficGenerator {
    model: TrafficModel,
    interarrival: Exp<f64>,
    rng_interarrival: ChaCha8Rng,
    rng_batch: ChaCha8Rng,
    rng_size: ChaCha8Rng,
    rng_intensity: ChaCha8Rng,
    rng_output: ChaCha8Rng,
    rng_deadline: ChaCha8Rng,
    rng_origin: ChaCha8Rng,
    clock_s: f64,
    next_id: u64,
}

impl TrafficGenerator {
    pub fn new(model: TrafficModel, seed: u64) -> Self {
        assert!(model.mean_interarrival_s > 0.0, "mean inter-arrival must be positive");
        assert!(model.batch_min >= 1 && model.batch_min <= model.batch_max);
        assert!(model.origins >= 1, "requests need at least one origin node");
        let interarrival = Exp::new(1.0 / model.mean_interarrival_s)
            .expect("a positive rate is always a valid exponential");
        TrafficGenerator {
            interarrival,
            rng_interarrival: stream_rng(seed, STREAM_INTERARRIVAL),
            rng_batch: stream_rng(seed, STREAM_BATCH),
            rng_size: stream_rng(seed, STREAM_SIZE),
            rng_intensity: stream_rng(seed, STREAM_INTENSITY),
            rng_output: stream_rng(seed, STREAM_OUTPUT_RATIO),
            rng_deadline: stream_rng(seed, STREAM_DEADLINE),
            rng_origin: stream_rng(seed, STREAM_ORIGIN),
            model,
            clock_s: 0.0,
            next_id: 0,
        }
    }

    pub fn model(&self) -> &TrafficModel {
        &self.model
    }

    /// Simulation time of the most recently generated instance.
    pub fn clock_s(&self) -> f64 {
        self.clock_s
    }

    pub fn next_instance(&mut self) -> Instance {
        self.clock_s += self.interarrival.sample(&mut self.rng_interarrival);
        let t_k = self.clock_s;
        let n = if self.model.batch_min == self.model.batch_max {
            self.model.batch_min
        } else {
            self.rng_batch.gen_range(self.model.batch_min..=self.model.batch_max)
        };
        let requests = (0..n)
            .map(|_| {
                let id = self.next_id;
                self.next_id += 1;
                Request {
                    id,
                    arrival_s: t_k,
                    size_bits: self.model.size_bits.sample(&mut self.rng_size),
                    intensity: self.model.intensity_flop_per_bit.sample(&mut self.rng_intensity),
                    output_ratio: self.model.output_ratio.sample(&mut self.rng_output),
                    origin: if self.model.origins == 1 {
                        0
                    } else {
                        self.rng_origin.gen_range(0..self.model.origins)
                    },
                    deadline_s: self.model.deadline_s.sample(&mut self.rng_deadline),
                }
            })
            .collect();
        Instance { t_k, requests }
    }
}
