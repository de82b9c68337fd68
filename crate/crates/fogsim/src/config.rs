//! Scenario files: a flat `key = value` format with `#` comments.
//!
//! Keys are fixed and typed; unknown or duplicate keys are errors with a
//! line number, because silently ignoring a typo in an experiment config
//! wastes hours. Values accept unit suffixes ([`crate::units`]), range
//! keys accept `lo .. hi` or a single pinned value.
//!
//! [`ScenarioConfig::canonical_string`] serializes back to this format in
//! base units with a fixed key order; parsing the output reproduces the
//! config exactly, which is what makes runs quotable by their config echo.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::alloc::{AllocParams, AllocatorKind};
use crate::freq::ScaParams;
use crate::model::{CloudSpec, Fleet, FogNodeSpec};
use crate::sim::{Scenario, SweepAxis};
use crate::traffic::{TrafficModel, ValueRange};
use crate::units::{self, Dim};

/// A fully validated scenario plus the run-shaping choices that sit
/// outside the simulation model itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub allocator: AllocatorKind,
    pub sweep: Option<SweepSpec>,
}

/// One swept parameter and the values to run it at, in the axis's
/// canonical unit (see [`SweepAxis::canonical_unit`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required key '{0}'")]
    Missing(String),
    #[error("{0}")]
    Validation(String),
}

fn invalid(line: usize, key: &str, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Parse { line, message: format!("key '{key}': {message}") }
}

/// Raw `key = (line, value)` entries in file order of first appearance.
struct Fields(Vec<(String, usize, String)>);

impl Fields {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let idx = self.0.iter().position(|(k, _, _)| k == key)?;
        let (_, line, value) = self.0.remove(idx);
        Some((line, value))
    }

    fn required(&mut self, key: &str) -> Result<(usize, String), ConfigError> {
        self.take(key).ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    fn value(&mut self, key: &str, dim: Dim) -> Result<f64, ConfigError> {
        let (line, text) = self.required(key)?;
        units::parse_value(&text, dim).map_err(|e| invalid(line, key, e))
    }

    fn value_or(&mut self, key: &str, dim: Dim, default: f64) -> Result<f64, ConfigError> {
        match self.take(key) {
            Some((line, text)) => units::parse_value(&text, dim).map_err(|e| invalid(line, key, e)),
            None => Ok(default),
        }
    }

    fn optional_value(&mut self, key: &str, dim: Dim) -> Result<Option<f64>, ConfigError> {
        match self.take(key) {
            Some((line, text)) => {
                units::parse_value(&text, dim).map(Some).map_err(|e| invalid(line, key, e))
            }
            None => Ok(None),
        }
    }

    fn range(&mut self, key: &str, dim: Dim) -> Result<ValueRange, ConfigError> {
        let (line, text) = self.required(key)?;
        let (lo, hi) = units::parse_range(&text, dim).map_err(|e| invalid(line, key, e))?;
        if lo > hi {
            return Err(invalid(line, key, format!("range is inverted: {lo} > {hi}")));
        }
        Ok(ValueRange::new(lo, hi))
    }

    fn integer<T>(&mut self, key: &str, default: Option<T>) -> Result<T, ConfigError>
    where
        T: std::str::FromStr,
        T::Err: std::fmt::Display,
    {
        match (self.take(key), default) {
            (Some((line, text)), _) => text.parse().map_err(|e| invalid(line, key, e)),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(ConfigError::Missing(key.to_string())),
        }
    }

    fn number_list(&mut self, key: &str) -> Result<(usize, Vec<f64>), ConfigError> {
        let (line, text) = self.required(key)?;
        let values = text
            .split([',', ';'])
            .map(|part| units::parse_value(part, Dim::Pure))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(line, key, e))?;
        Ok((line, values))
    }
}

/// Parses and validates a config from a file on disk.
pub fn parse_file(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_str(&text)
}

/// Parses and validates a config from its textual form.
pub fn parse_str(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut fields = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Parse {
                line: line_no,
                message: format!("expected 'key = value', got '{line}'"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Parse {
                line: line_no,
                message: format!("expected 'key = value', got '{line}'"),
            });
        }
        if let Some((_, first, _)) = fields.iter().find(|(k, _, _)| k == key) {
            return Err(ConfigError::Parse {
                line: line_no,
                message: format!("duplicate key '{key}' (first set on line {first})"),
            });
        }
        fields.push((key.to_string(), line_no, value.to_string()));
    }
    build(Fields(fields))
}

fn build(mut f: Fields) -> Result<ScenarioConfig, ConfigError> {
    let seed = f.integer::<u64>("seed", Some(0))?;
    let horizon = f.integer::<u32>("horizon", None)?;
    let warmup = f.integer::<u32>("warmup", Some(0))?;
    let hist_bins = f.integer::<usize>("hist_bins", Some(10))?;
    let allocator = match f.take("allocator") {
        Some((line, text)) => {
            text.parse::<AllocatorKind>().map_err(|e| invalid(line, "allocator", e))?
        }
        None => AllocatorKind::Eeffra,
    };

    let fog_count = f.integer::<usize>("fog_count", None)?;
    let (_, power_coeffs) = f.number_list("fog_power_coeffs")?;
    let fog = FogNodeSpec {
        power_coeffs,
        f_min_ghz: f.value("fog_f_min", Dim::Frequency)?,
        f_max_ghz: f.value("fog_f_max", Dim::Frequency)?,
        flop_per_cycle: f.value("fog_flop_per_cycle", Dim::Pure)?,
        gamma_j_per_bit_hop: f.value("fog_gamma", Dim::Energy)?,
        bitrate_bps: f.value("fog_bitrate", Dim::Bitrate)?,
    };
    let hop_matrix = match f.take("hop_matrix") {
        Some((line, text)) => {
            let hops = text
                .split([',', ';'])
                .map(|part| part.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid(line, "hop_matrix", e))?;
            Some((line, hops))
        }
        None => None,
    };

    let cloud_count = f.integer::<usize>("cloud_count", Some(0))?;
    let cloud_keys = [
        "cloud_beta",
        "cloud_freq",
        "cloud_flop_per_cycle",
        "cloud_distance",
        "cloud_gamma",
        "cloud_bitrate",
        "cloud_chi",
    ];
    let clouds = if cloud_count > 0 {
        let cloud = CloudSpec {
            beta_flops_per_watt: f.value("cloud_beta", Dim::Efficiency)?,
            freq_ghz: f.value("cloud_freq", Dim::Frequency)?,
            flop_per_cycle: f.value("cloud_flop_per_cycle", Dim::Pure)?,
            distance_km: f.value("cloud_distance", Dim::Distance)?,
            gamma_j_per_bit: f.value("cloud_gamma", Dim::Energy)?,
            bitrate_bps: f.value("cloud_bitrate", Dim::Bitrate)?,
            chi_s_per_km: f.value("cloud_chi", Dim::DelayPerDistance)?,
        };
        vec![cloud; cloud_count]
    } else {
        for key in cloud_keys {
            if let Some((line, _)) = f.take(key) {
                return Err(invalid(line, key, "set, but cloud_count is 0"));
            }
        }
        Vec::new()
    };

    let batch = f.range("batch", Dim::Pure)?;
    let batch_range = (batch.lo, batch.hi);
    if batch_range.0.fract() != 0.0 || batch_range.1.fract() != 0.0 || batch_range.0 < 1.0 {
        return Err(ConfigError::Validation(format!(
            "batch must be whole numbers >= 1, got {} .. {}",
            batch_range.0, batch_range.1
        )));
    }
    let traffic = TrafficModel {
        mean_interarrival_s: f.value("mean_interarrival", Dim::Time)?,
        batch_min: batch_range.0 as u32,
        batch_max: batch_range.1 as u32,
        size_bits: f.range("size", Dim::Size)?,
        intensity_flop_per_bit: f.range("intensity", Dim::Pure)?,
        output_ratio: f.range("output_ratio", Dim::Pure)?,
        deadline_s: f.range("deadline", Dim::Time)?,
        origins: fog_count,
    };

    let params = AllocParams {
        sca: ScaParams {
            max_sca_iters: f.integer::<u32>("sca_iters", Some(10))?,
            max_newton_iters: f.integer::<u32>("newton_iters", Some(20))?,
            epsilon_ghz: f.value_or("sca_epsilon", Dim::Frequency, 1e-6)?,
            initial_ghz: f.optional_value("sca_initial", Dim::Frequency)?,
        },
        fixed_freq_ghz: f.optional_value("fixed_freq", Dim::Frequency)?,
    };

    let sweep = match f.take("sweep") {
        Some((line, text)) => Some(parse_sweep(&text).map_err(|e| invalid(line, "sweep", e))?),
        None => None,
    };

    if let Some((key, line, _)) = f.0.first() {
        return Err(ConfigError::Parse { line: *line, message: format!("unknown key '{key}'") });
    }

    let fogs = vec![fog; fog_count];
    let fleet = match hop_matrix {
        Some((line, hops)) => Fleet::with_hop_matrix(fogs, clouds, hops)
            .map_err(|e| invalid(line, "hop_matrix", e))?,
        None => Fleet::new(fogs, clouds),
    };

    let config = ScenarioConfig {
        scenario: Scenario { fleet, traffic, params, seed, horizon, warmup, hist_bins },
        allocator,
        sweep,
    };
    config.validate()?;
    Ok(config)
}

/// Parses `axis=v1,v2,...` or `axis=lo:hi:step` (inclusive of `hi` up to
/// rounding); values are in the axis's canonical unit.
pub fn parse_sweep(text: &str) -> Result<SweepSpec, String> {
    let (axis, values) =
        text.split_once('=').ok_or_else(|| format!("expected 'axis=values', got '{text}'"))?;
    let axis: SweepAxis = axis.trim().parse().map_err(|e| format!("{e}"))?;
    let values = values.trim();
    let parse_num = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| format!("cannot parse '{}' as a number", s.trim()))
    };
    let values = if values.contains(':') {
        let parts: Vec<&str> = values.split(':').collect();
        let [lo, hi, step] = parts[..] else {
            return Err(format!("expected 'lo:hi:step', got '{values}'"));
        };
        let (lo, hi, step) = (parse_num(lo)?, parse_num(hi)?, parse_num(step)?);
        if step <= 0.0 {
            return Err(format!("step must be positive, got {step}"));
        }
        if hi < lo {
            return Err(format!("range is inverted: {lo} > {hi}"));
        }
        // Tolerate accumulated rounding so lo:hi:step includes hi itself.
        let end = hi + step * 1e-6;
        (0..).map(|i| lo + i as f64 * step).take_while(|v| *v <= end).collect()
    } else {
        values.split(',').map(parse_num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err("sweep has no values".to_string());
    }
    Ok(SweepSpec { axis, values })
}

impl ScenarioConfig {
    /// Checks every cross-field constraint. Parsing already guarantees
    /// per-value syntax; this guards semantics, so it must be re-run after
    /// programmatic mutation (the CLI overrides call it again).
    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |message: String| Err(ConfigError::Validation(message));
        let sc = &self.scenario;
        if sc.warmup > sc.horizon {
            return err(format!("warmup {} exceeds horizon {}", sc.warmup, sc.horizon));
        }
        if sc.hist_bins == 0 {
            return err("hist_bins must be at least 1".into());
        }
        if sc.fleet.fogs.is_empty() {
            return err("fog_count must be at least 1 (requests originate at fog nodes)".into());
        }
        for (i, fog) in sc.fleet.fogs.iter().enumerate() {
            if !(fog.f_min_ghz > 0.0 && fog.f_min_ghz <= fog.f_max_ghz) {
                return err(format!(
                    "fog {i}: frequency bounds [{}, {}] GHz are invalid",
                    fog.f_min_ghz, fog.f_max_ghz
                ));
            }
            if fog.flop_per_cycle <= 0.0 {
                return err(format!("fog {i}: fog_flop_per_cycle must be positive"));
            }
            if fog.bitrate_bps <= 0.0 {
                return err(format!("fog {i}: fog_bitrate must be positive"));
            }
            if fog.gamma_j_per_bit_hop < 0.0 {
                return err(format!("fog {i}: fog_gamma must be non-negative"));
            }
            if fog.power_coeffs.is_empty() {
                return err(format!("fog {i}: fog_power_coeffs is empty"));
            }
            // The sign-split optimizer needs P(f) > 0 wherever it may
            // evaluate; probe a dense grid to fail fast at load time.
            for step in 0..=256 {
                let f = fog.f_min_ghz
                    + (fog.f_max_ghz - fog.f_min_ghz) * f64::from(step) / 256.0;
                let p = fog.power_coeffs.iter().rev().fold(0.0, |acc, c| acc * f + c);
                if p <= 0.0 {
                    return err(format!(
                        "fog {i}: active power is {p:.6} W at {f:.6} GHz; \
                         fog_power_coeffs must stay positive on [fog_f_min, fog_f_max]"
                    ));
                }
            }
        }
        for (i, cloud) in sc.fleet.clouds.iter().enumerate() {
            if cloud.beta_flops_per_watt <= 0.0 {
                return err(format!("cloud {i}: cloud_beta must be positive"));
            }
            if cloud.freq_ghz <= 0.0 || cloud.flop_per_cycle <= 0.0 {
                return err(format!("cloud {i}: cloud_freq and cloud_flop_per_cycle must be positive"));
            }
            if cloud.bitrate_bps <= 0.0 {
                return err(format!("cloud {i}: cloud_bitrate must be positive"));
            }
            if cloud.distance_km < 0.0 || cloud.chi_s_per_km < 0.0 || cloud.gamma_j_per_bit < 0.0 {
                return err(format!(
                    "cloud {i}: cloud_distance, cloud_chi, and cloud_gamma must be non-negative"
                ));
            }
        }
        if let Some(hops) = sc.fleet.hop_matrix() {
            let n = sc.fleet.fogs.len();
            for i in 0..n {
                if hops[i * n + i] != 0 {
                    return err(format!("hop_matrix diagonal entry ({i},{i}) must be 0"));
                }
            }
        }

        let tr = &sc.traffic;
        if tr.mean_interarrival_s <= 0.0 {
            return err("mean_interarrival must be positive".into());
        }
        if tr.batch_min < 1 || tr.batch_min > tr.batch_max {
            return err(format!("batch range [{}, {}] is invalid", tr.batch_min, tr.batch_max));
        }
        if tr.size_bits.lo <= 0.0 {
            return err("size must be positive".into());
        }
        if tr.intensity_flop_per_bit.lo <= 0.0 {
            return err("intensity must be positive".into());
        }
        if tr.output_ratio.lo < 0.0 {
            return err("output_ratio must be non-negative".into());
        }
        if tr.deadline_s.lo <= 0.0 {
            return err("deadline must be positive".into());
        }
        if tr.origins != sc.fleet.fogs.len() {
            return err("traffic origins must match fog_count".into());
        }

        let sca = &sc.params.sca;
        if sca.max_sca_iters == 0 || sca.max_newton_iters == 0 {
            return err("sca_iters and newton_iters must be at least 1".into());
        }
        if sca.epsilon_ghz <= 0.0 {
            return err("sca_epsilon must be positive".into());
        }
        let freq_in_fog_bounds = |what: &str, f_ghz: f64| {
            for (i, fog) in sc.fleet.fogs.iter().enumerate() {
                if f_ghz < fog.f_min_ghz || f_ghz > fog.f_max_ghz {
                    return err(format!(
                        "{what} {f_ghz} GHz is outside fog {i}'s range [{}, {}] GHz",
                        fog.f_min_ghz, fog.f_max_ghz
                    ));
                }
            }
            Ok(())
        };
        if let Some(f0) = sca.initial_ghz {
            freq_in_fog_bounds("sca_initial", f0)?;
        }
        if let Some(pin) = sc.params.fixed_freq_ghz {
            freq_in_fog_bounds("fixed_freq", pin)?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return err("sweep has no values".into());
            }
            for &v in &sweep.values {
                if !v.is_finite() {
                    return err(format!("sweep value {v} is not finite"));
                }
                match sweep.axis {
                    SweepAxis::FixedFreq => freq_in_fog_bounds("sweep fixed_freq", v)?,
                    _ if v <= 0.0 => {
                        return err(format!(
                            "sweep value {v} must be positive for axis {}",
                            sweep.axis
                        ));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Serializes to the config format in base units with a fixed key
    /// order. Requires a homogeneous fleet (all fog nodes identical, all
    /// clouds identical), which is the only fleet shape this format can
    /// express. `parse_str(canonical_string()?)` reproduces `self`.
    pub fn canonical_string(&self) -> Result<String, ConfigError> {
        let sc = &self.scenario;
        let fog = &sc.fleet.fogs[0];
        if sc.fleet.fogs.iter().any(|f| f != fog) {
            return Err(ConfigError::Validation(
                "fleet has differing fog nodes; the config format is homogeneous".into(),
            ));
        }
        if let Some(first) = sc.fleet.clouds.first() {
            if sc.fleet.clouds.iter().any(|c| c != first) {
                return Err(ConfigError::Validation(
                    "fleet has differing clouds; the config format is homogeneous".into(),
                ));
            }
        }

        let join = |values: &[f64]| {
            values.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
        };
        let range = |r: &ValueRange| format!("{} .. {}", r.lo, r.hi);

        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "seed = {}", sc.seed);
        let _ = writeln!(w, "horizon = {}", sc.horizon);
        let _ = writeln!(w, "warmup = {}", sc.warmup);
        let _ = writeln!(w, "allocator = {}", self.allocator);
        let _ = writeln!(w, "hist_bins = {}", sc.hist_bins);
        let _ = writeln!(w, "fog_count = {}", sc.fleet.fogs.len());
        let _ = writeln!(w, "fog_power_coeffs = {}", join(&fog.power_coeffs));
        let _ = writeln!(w, "fog_f_min = {}", fog.f_min_ghz);
        let _ = writeln!(w, "fog_f_max = {}", fog.f_max_ghz);
        let _ = writeln!(w, "fog_flop_per_cycle = {}", fog.flop_per_cycle);
        let _ = writeln!(w, "fog_gamma = {}", fog.gamma_j_per_bit_hop);
        let _ = writeln!(w, "fog_bitrate = {}", fog.bitrate_bps);
        if let Some(hops) = sc.fleet.hop_matrix() {
            let cells = hops.iter().map(u32::to_string).collect::<Vec<_>>().join(", ");
            let _ = writeln!(w, "hop_matrix = {cells}");
        }
        let _ = writeln!(w, "cloud_count = {}", sc.fleet.clouds.len());
        if let Some(cloud) = sc.fleet.clouds.first() {
            let _ = writeln!(w, "cloud_beta = {}", cloud.beta_flops_per_watt);
            let _ = writeln!(w, "cloud_freq = {}", cloud.freq_ghz);
            let _ = writeln!(w, "cloud_flop_per_cycle = {}", cloud.flop_per_cycle);
            let _ = writeln!(w, "cloud_distance = {}", cloud.distance_km);
            let _ = writeln!(w, "cloud_gamma = {}", cloud.gamma_j_per_bit);
            let _ = writeln!(w, "cloud_bitrate = {}", cloud.bitrate_bps);
            let _ = writeln!(w, "cloud_chi = {}", cloud.chi_s_per_km);
        }
        let tr = &sc.traffic;
        let _ = writeln!(w, "batch = {} .. {}", tr.batch_min, tr.batch_max);
        let _ = writeln!(w, "mean_interarrival = {}", tr.mean_interarrival_s);
        let _ = writeln!(w, "size = {}", range(&tr.size_bits));
        let _ = writeln!(w, "intensity = {}", range(&tr.intensity_flop_per_bit));
        let _ = writeln!(w, "output_ratio = {}", range(&tr.output_ratio));
        let _ = writeln!(w, "deadline = {}", range(&tr.deadline_s));
        let sca = &sc.params.sca;
        let _ = writeln!(w, "sca_iters = {}", sca.max_sca_iters);
        let _ = writeln!(w, "newton_iters = {}", sca.max_newton_iters);
        let _ = writeln!(w, "sca_epsilon = {}", sca.epsilon_ghz);
        if let Some(f0) = sca.initial_ghz {
            let _ = writeln!(w, "sca_initial = {f0}");
        }
        if let Some(pin) = sc.params.fixed_freq_ghz {
            let _ = writeln!(w, "fixed_freq = {pin}");
        }
        if let Some(sweep) = &self.sweep {
            let values = join(&sweep.values).replace(", ", ",");
            let _ = writeln!(w, "sweep = {}={values}", sweep.axis.key());
        }
        Ok(out)
    }
}

/// The bundled reference scenario: ten identical DVFS fog nodes, one
/// cloud data center, and the standard traffic mix.
pub fn reference() -> ScenarioConfig {
    parse_str(include_str!("../../../configs/tableII.cfg"))
        .expect("bundled tableII.cfg must parse")
}

/// The bundled variant with the alternative fog power curve whose
/// efficiency peaks strictly inside the frequency range (2.6063 GHz).
pub fn calibrated() -> ScenarioConfig {
    parse_str(include_str!("../../../configs/calibrated.cfg"))
        .expect("bundled calibrated.cfg must parse")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NodeRef;

    fn minimal() -> String {
        "\
        horizon = 10\n\
        fog_count = 2\n\
        fog_power_coeffs = -47.152, 88.594, 34.256, 5.222\n\
        fog_f_min = 1.6 GHz\n\
        fog_f_max = 4.2 GHz\n\
        fog_flop_per_cycle = 16\n\
        fog_gamma = 0.3 nJ\n\
        fog_bitrate = 1 Gbps\n\
        batch = 1 .. 4\n\
        mean_interarrival = 50 ms\n\
        size = 1 MB .. 10 MB\n\
        intensity = 1 .. 100\n\
        output_ratio = 0 .. 0.5\n\
        deadline = 100 ms .. 1 s\n"
            .to_string()
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_str(&minimal()).unwrap();
        assert_eq!(cfg.scenario.seed, 0);
        assert_eq!(cfg.scenario.warmup, 0);
        assert_eq!(cfg.scenario.hist_bins, 10);
        assert_eq!(cfg.allocator, AllocatorKind::Eeffra);
        assert_eq!(cfg.scenario.params.sca.max_sca_iters, 10);
        assert_eq!(cfg.scenario.params.sca.max_newton_iters, 20);
        assert_eq!(cfg.scenario.params.sca.epsilon_ghz, 1e-6);
        assert_eq!(cfg.scenario.fleet.clouds.len(), 0);
        assert_eq!(cfg.scenario.traffic.origins, 2);
        assert_eq!(cfg.scenario.traffic.size_bits.lo, 8e6);
        assert_eq!(cfg.scenario.traffic.size_bits.hi, 8e7);
        assert_eq!(cfg.scenario.traffic.deadline_s.hi, 1.0);
        assert!(cfg.sweep.is_none());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        // Inline comments after a value are stripped as well.
        let text = format!("# header\n\n{}seed = 7 # trailing note\n", minimal());
        let cfg = parse_str(&text).unwrap();
        assert_eq!(cfg.scenario.seed, 7);
    }

    #[test]
    fn unknown_key_is_an_error_with_its_line() {
        let text = format!("{}typo_key = 3\n", minimal());
        let err = parse_str(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown key 'typo_key'"), "{msg}");
        assert!(msg.contains("line 15"), "{msg}");
    }

    #[test]
    fn duplicate_key_is_an_error() {
        let text = format!("{}horizon = 20\n", minimal());
        let msg = parse_str(&text).unwrap_err().to_string();
        assert!(msg.contains("duplicate key 'horizon'"), "{msg}");
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn missing_required_key_is_reported_by_name() {
        let text = minimal().replace("fog_bitrate = 1 Gbps\n", "");
        let msg = parse_str(&text).unwrap_err().to_string();
        assert!(msg.contains("missing required key 'fog_bitrate'"), "{msg}");
    }

    #[test]
    fn wrong_unit_reports_key_and_line() {
        let text = minimal().replace("fog_f_min = 1.6 GHz", "fog_f_min = 1.6 MHz");
        let msg = parse_str(&text).unwrap_err().to_string();
        assert!(msg.contains("fog_f_min"), "{msg}");
        assert!(msg.contains("MHz"), "{msg}");
        assert!(msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn cloud_keys_require_cloud_count() {
        let text = format!("{}cloud_beta = 1.3 GFLOPS/W\n", minimal());
        let msg = parse_str(&text).unwrap_err().to_string();
        assert!(msg.contains("cloud_count is 0"), "{msg}");
    }

    #[test]
    fn validation_rejects_inconsistent_scenarios() {
        let bad = [
            ("horizon = 10", "horizon = 10\nwarmup = 11", "warmup"),
            ("batch = 1 .. 4", "batch = 0 .. 4", "batch"),
            ("batch = 1 .. 4", "batch = 1.5 .. 4", "batch"),
            ("deadline = 100 ms .. 1 s", "deadline = 0 .. 1 s", "deadline"),
            ("fog_f_min = 1.6 GHz", "fog_f_min = 5.0 GHz", "bounds"),
            ("mean_interarrival = 50 ms", "mean_interarrival = 0 s", "mean_interarrival"),
        ];
        for (from, to, expect) in bad {
            let text = minimal().replace(from, to);
            let msg = parse_str(&text).unwrap_err().to_string();
            assert!(msg.contains(expect), "replacing '{from}' with '{to}': got '{msg}'");
        }
    }

    #[test]
    fn power_curve_must_stay_positive_on_the_frequency_range() {
        // These coefficients go negative above ~3.4 GHz.
        let text = minimal().replace(
            "fog_power_coeffs = -47.152, 88.594, 34.256, 5.222",
            "fog_power_coeffs = 10, 20, 0, -2",
        );
        let msg = parse_str(&text).unwrap_err().to_string();
        assert!(msg.contains("must stay positive"), "{msg}");
    }

    #[test]
    fn sweep_list_and_grid_forms() {
        let spec = parse_sweep("cloud_beta=0.5,1.3,5").unwrap();
        assert_eq!(spec.axis, SweepAxis::CloudBeta);
        assert_eq!(spec.values, vec![0.5, 1.3, 5.0]);

        let spec = parse_sweep("cloud_beta=0.5:5.0:0.5").unwrap();
        assert_eq!(spec.values.len(), 10);
        assert_eq!(spec.values[0], 0.5);
        assert_eq!(*spec.values.last().unwrap(), 5.0);

        // The upper end is included despite binary rounding of 0.1 steps.
        let spec = parse_sweep("fixed_freq=1.6:4.2:0.1").unwrap();
        assert_eq!(spec.values.len(), 27);
        assert!((spec.values.last().unwrap() - 4.2).abs() < 1e-9);

        assert!(parse_sweep("nope=1,2").is_err());
        assert!(parse_sweep("d_max=3:1:1").is_err());
        assert!(parse_sweep("d_max=1:3:0").is_err());
        assert!(parse_sweep("d_max=").is_err());
    }

    #[test]
    fn hop_matrix_is_shaped_and_zero_diagonal() {
        let ok = format!("{}hop_matrix = 0, 2, 2, 0\n", minimal());
        let cfg = parse_str(&ok).unwrap();
        assert_eq!(cfg.scenario.fleet.hops(0, 1), 2);

        let bad_len = format!("{}hop_matrix = 0, 2, 2\n", minimal());
        assert!(parse_str(&bad_len).unwrap_err().to_string().contains("expected 4"));

        let bad_diag = format!("{}hop_matrix = 1, 2, 2, 0\n", minimal());
        assert!(parse_str(&bad_diag).unwrap_err().to_string().contains("diagonal"));
    }

    #[test]
    fn bundled_reference_matches_published_parameters() {
        let cfg = reference();
        let sc = &cfg.scenario;
        assert_eq!(sc.fleet.fogs.len(), 10);
        assert_eq!(sc.fleet.clouds.len(), 1);
        let fog = &sc.fleet.fogs[0];
        assert_eq!(fog.power_coeffs, vec![-47.152, 88.594, 34.256, 5.222]);
        assert_eq!((fog.f_min_ghz, fog.f_max_ghz), (1.6, 4.2));
        assert_eq!(fog.flop_per_cycle, 16.0);
        assert_eq!(fog.gamma_j_per_bit_hop, 0.3e-9);
        assert_eq!(fog.bitrate_bps, 1e9);
        let cloud = &sc.fleet.clouds[0];
        assert_eq!(cloud.beta_flops_per_watt, 1.3e9);
        assert_eq!(cloud.freq_ghz, 1.5);
        assert_eq!(cloud.flop_per_cycle, 32.0);
        assert_eq!(cloud.distance_km, 2000.0);
        assert_eq!(cloud.chi_s_per_km, 7.5e-6);
        assert_eq!(cloud.gamma_j_per_bit, 10e-9);
        assert_eq!(cloud.bitrate_bps, 1e9);
        assert_eq!((sc.horizon, sc.warmup), (550, 50));
        assert_eq!((sc.traffic.batch_min, sc.traffic.batch_max), (5, 10));
        assert_eq!(sc.traffic.mean_interarrival_s, 0.05);
        assert_eq!(sc.traffic.size_bits.lo, 8e6);
        assert_eq!(sc.traffic.size_bits.hi, 8e7);
        assert_eq!(sc.traffic.intensity_flop_per_bit.hi, 100.0);
        assert_eq!(sc.traffic.output_ratio.hi, 0.5);
        assert_eq!(sc.traffic.deadline_s.lo, 0.1);
        assert_eq!(sc.traffic.deadline_s.hi, 1.0);
    }

    #[test]
    fn bundled_calibrated_differs_only_in_the_power_curve() {
        let a = reference();
        let b = calibrated();
        assert_eq!(b.scenario.fleet.fogs[0].power_coeffs, vec![43.72, -18.974, 8.0, -0.3]);
        let mut a2 = a.clone();
        for fog in &mut a2.scenario.fleet.fogs {
            fog.power_coeffs = b.scenario.fleet.fogs[0].power_coeffs.clone();
        }
        assert_eq!(a2, b);
    }

    #[test]
    fn canonical_string_round_trips_exactly() {
        let mut cfg = reference();
        cfg.sweep = Some(parse_sweep("cloud_beta=0.5:5.0:0.5").unwrap());
        cfg.scenario.params.fixed_freq_ghz = Some(2.6063);
        let echo = cfg.canonical_string().unwrap();
        let reparsed = parse_str(&echo).unwrap();
        assert_eq!(reparsed, cfg);
        // And the echo of the echo is byte-identical.
        assert_eq!(reparsed.canonical_string().unwrap(), echo);
    }

    #[test]
    fn canonical_string_requires_a_homogeneous_fleet() {
        let mut cfg = reference();
        cfg.scenario.fleet.fogs[3].f_max_ghz = 3.0;
        assert!(cfg.canonical_string().is_err());
    }

    #[test]
    fn reference_scenario_runs_end_to_end() {
        let mut cfg = reference();
        cfg.scenario.horizon = 12;
        cfg.scenario.warmup = 2;
        let out = crate::sim::run(&cfg.scenario, cfg.allocator).unwrap();
        assert!(out.metrics.total > 0);
        assert!(out.metrics.accepted > 0);
        // Both tiers are exercised by the reference mix.
        let nodes: Vec<_> = out
            .log
            .iter()
            .filter_map(|e| match &e.outcome {
                crate::model::Outcome::Accepted { node, .. } => Some(*node),
                _ => None,
            })
            .collect();
        assert!(nodes.iter().any(|n| matches!(n, NodeRef::Fog(_))));
        assert!(nodes.iter().any(|n| matches!(n, NodeRef::Cloud(_))));
    }
}
