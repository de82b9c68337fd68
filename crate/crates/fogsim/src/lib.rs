//! Discrete-event simulator and optimization library for energy-aware
//! offloading of computational requests across fog nodes and a cloud
//! data center.
//!
//! The crate models requests (size, computational intensity, deadline)
//! arriving at fog nodes, and allocates each one to a fog node running at
//! an optimized DVFS frequency or to the cloud, minimizing total
//! computation plus communication energy subject to per-request latency
//! constraints. Modules build on each other roughly in this order:
//!
//! * [`model`]: domain types (requests, node fleets, schedules, outcomes).
//! * [`cost`]: energy and delay formulas for a (request, node) pair.
//! * [`freq`]: per-node frequency optimization (difference-of-convex
//!   linearization with a safeguarded Newton inner solver).
//! * [`assign`]: global request-to-node assignment (Hungarian method on a
//!   cost matrix with replicated cloud columns).
//! * [`traffic`]: reproducible stochastic request generation.
//! * [`alloc`]: allocation policies, from the full optimizing pipeline to
//!   simple baselines.
//! * [`sim`]: discrete-event simulation runs, metrics, and sweeps.
//! * [`units`], [`config`], [`output`], [`cli`]: scenario files, CSV
//!   emission, and the command-line front end.

pub mod alloc;
pub mod assign;
pub mod cli;
pub mod config;
pub mod cost;
pub mod freq;
pub mod model;
pub mod output;
pub mod sim;
pub mod traffic;
pub mod units;

#[cfg(test)]
pub(crate) mod testutil;
