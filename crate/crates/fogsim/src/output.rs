//! CSV emission for runs, comparisons, and sweeps.
//!
//! Four fixed schemas, one file each:
//!
//! * `requests.csv`: every request of every instance, warm-up included,
//!   with its allocation outcome and full cost breakdown. This is the
//!   ground truth a validator can replay the whole run from.
//! * `summary.csv`: one row per (allocator, sweep point) with counts,
//!   rejection ratio, average accepted energy, and fog share.
//! * `cdf.csv`: sorted accepted per-request energies with cumulative
//!   fractions of all post-warm-up requests; rejected requests are the
//!   missing mass at the top.
//! * `hist2d.csv`: per intensity-deadline bin, the fog-processed and
//!   rejected counts against the bin total.
//!
//! Measured numbers are written with 12 significant digits; input echoes
//! (ids, counts, sweep values) use their shortest exact form. Row order
//! is fully determined by the input, so identical runs produce
//! byte-identical files.

use std::io::{self, Write};

use crate::model::Outcome;
use crate::sim::{RunOutput, SweepAxis};

/// One run plus the labels identifying it inside a comparison or sweep.
#[derive(Debug, Clone, Copy)]
pub struct EmittedRun<'a> {
    pub output: &'a RunOutput,
    /// Swept axis and this run's value on it, if any.
    pub axis: Option<(SweepAxis, f64)>,
}

impl<'a> EmittedRun<'a> {
    pub fn single(output: &'a RunOutput) -> Self {
        EmittedRun { output, axis: None }
    }

    fn axis_key(&self) -> String {
        self.axis.map_or(String::new(), |(axis, _)| axis.key().to_string())
    }

    fn axis_value(&self) -> String {
        self.axis.map_or(String::new(), |(_, value)| value.to_string())
    }
}

/// 12 significant digits, scientific; the fixed formatting that makes
/// repeated runs byte-identical.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub const REQUESTS_HEADER: &str = "allocator,axis,value,instance,id,t_k,size_bits,theta,\
                                   output_ratio,origin,d_max,node,freq_ghz,e_cp_j,e_comm_j,\
                                   e_tot_j,d_comm_up_s,d_comm_down_s,d_queue_s,d_cp_s,d_tot_s,\
                                   status";
pub const SUMMARY_HEADER: &str =
    "allocator,axis,value,total,accepted,rejected,rejection_ratio,avg_energy_j,fog_share";
pub const CDF_HEADER: &str = "allocator,axis,value,energy_j,cum_fraction";
pub const HIST2D_HEADER: &str = "allocator,axis,value,category,theta_lo,theta_hi,d_max_lo,\
                                 d_max_hi,count,bin_total,probability";

pub fn write_requests_csv(w: &mut impl Write, runs: &[EmittedRun]) -> io::Result<()> {
    writeln!(w, "{REQUESTS_HEADER}")?;
    for run in runs {
        let (kind, axis, value) = (run.output.kind, run.axis_key(), run.axis_value());
        for entry in &run.output.log {
            let r = &entry.request;
            write!(
                w,
                "{kind},{axis},{value},{},{},{},{},{},{},{},{}",
                entry.instance,
                r.id,
                fmt_sig12(entry.t_k),
                fmt_sig12(r.size_bits),
                fmt_sig12(r.intensity),
                fmt_sig12(r.output_ratio),
                r.origin,
                fmt_sig12(r.deadline_s),
            )?;
            match &entry.outcome {
                Outcome::Accepted { node, freq_ghz, cost } => writeln!(
                    w,
                    ",{node},{},{},{},{},{},{},{},{},{},accepted",
                    fmt_sig12(*freq_ghz),
                    fmt_sig12(cost.e_cp_j),
                    fmt_sig12(cost.e_comm_j),
                    fmt_sig12(cost.e_tot_j),
                    fmt_sig12(cost.d_comm_up_s),
                    fmt_sig12(cost.d_comm_down_s),
                    fmt_sig12(cost.d_queue_s),
                    fmt_sig12(cost.d_cp_s),
                    fmt_sig12(cost.d_tot_s),
                )?,
                Outcome::Rejected => writeln!(w, ",,,,,,,,,,,rejected")?,
            }
        }
    }
    Ok(())
}

pub fn write_summary_csv(w: &mut impl Write, runs: &[EmittedRun]) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for run in runs {
        let m = &run.output.metrics;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            run.output.kind,
            run.axis_key(),
            run.axis_value(),
            m.total,
            m.accepted,
            m.rejected,
            fmt_sig12(m.rejection_ratio),
            fmt_sig12(m.avg_energy_j),
            fmt_sig12(m.fog_share),
        )?;
    }
    Ok(())
}

pub fn write_cdf_csv(w: &mut impl Write, runs: &[EmittedRun]) -> io::Result<()> {
    writeln!(w, "{CDF_HEADER}")?;
    for run in runs {
        let (kind, axis, value) = (run.output.kind, run.axis_key(), run.axis_value());
        for point in &run.output.cdf {
            writeln!(
                w,
                "{kind},{axis},{value},{},{}",
                fmt_sig12(point.energy_j),
                fmt_sig12(point.cum_fraction),
            )?;
        }
    }
    Ok(())
}

pub fn write_hist2d_csv(w: &mut impl Write, runs: &[EmittedRun]) -> io::Result<()> {
    writeln!(w, "{HIST2D_HEADER}")?;
    for run in runs {
        let (kind, axis, value) = (run.output.kind, run.axis_key(), run.axis_value());
        let hist = &run.output.hist;
        for (category, counts) in
            [("fog", &hist.fog_counts), ("rejected", &hist.rejected_counts)]
        {
            for i in 0..hist.bins {
                for j in 0..hist.bins {
                    let cell = i * hist.bins + j;
                    let (t_lo, t_hi, d_lo, d_hi) = hist.edges(i, j);
                    let total = hist.totals[cell];
                    let p = if total > 0 { counts[cell] as f64 / total as f64 } else { 0.0 };
                    writeln!(
                        w,
                        "{kind},{axis},{value},{category},{},{},{},{},{},{total},{}",
                        fmt_sig12(t_lo),
                        fmt_sig12(t_hi),
                        fmt_sig12(d_lo),
                        fmt_sig12(d_hi),
                        counts[cell],
                        fmt_sig12(p),
                    )?;
                }
            }
        }
    }
    Ok(())
}
