//! Unit-suffix parsing for config values.
//!
//! Every config key has a fixed physical dimension, and each dimension
//! accepts its base unit plus one convenience suffix (the unit the
//! quantity is usually quoted in). A bare number is read in the base
//! unit. Sizes use decimal megabytes: 1 MB = 8e6 bits.
//!
//! Conversions are decimal-exact: `7.5 us/km` parses to the very same
//! float as the base-unit literal `7.5e-6`, because the conversion
//! shifts the decimal exponent of the numeral rather than multiplying
//! two already-rounded floats (the only non-power-of-ten factor, bits
//! per megabyte, contributes an additional exact *8).

use thiserror::Error;

/// Physical dimension of a config value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    /// Base bit, suffixes `bit` and `MB`.
    Size,
    /// Base second, suffixes `s` and `ms`.
    Time,
    /// Base GHz, suffix `GHz`. GHz is the base because every frequency
    /// in the crate's API is carried in GHz.
    Frequency,
    /// Base joule, suffixes `J` and `nJ`.
    Energy,
    /// Base bit/s, suffixes `bps` and `Gbps`.
    Bitrate,
    /// Base km, suffix `km`.
    Distance,
    /// Base s/km, suffixes `s/km` and `us/km`.
    DelayPerDistance,
    /// Base FLOP/(s*W), suffixes `FLOPS/W` and `GFLOPS/W`.
    Efficiency,
    /// Dimensionless; no suffix accepted.
    Pure,
}

impl Dim {
    /// Accepted suffixes, longest first so that `ms` wins over `s` and
    /// `Gbps` over `bps`. Each maps to a decimal exponent shift plus an
    /// exact power-of-two multiplier.
    fn suffixes(self) -> &'static [(&'static str, i32, f64)] {
        match self {
            Dim::Size => &[("bit", 0, 1.0), ("MB", 6, 8.0)],
            Dim::Time => &[("ms", -3, 1.0), ("s", 0, 1.0)],
            Dim::Frequency => &[("GHz", 0, 1.0)],
            Dim::Energy => &[("nJ", -9, 1.0), ("J", 0, 1.0)],
            Dim::Bitrate => &[("Gbps", 9, 1.0), ("bps", 0, 1.0)],
            Dim::Distance => &[("km", 0, 1.0)],
            Dim::DelayPerDistance => &[("us/km", -6, 1.0), ("s/km", 0, 1.0)],
            Dim::Efficiency => &[("GFLOPS/W", 9, 1.0), ("FLOPS/W", 0, 1.0)],
            Dim::Pure => &[],
        }
    }
}

/// Rewrites `num * 10^shift` as a single decimal numeral so it rounds to
/// a float exactly once. `None` on nonsense exponents.
fn shift_decimal_exponent(num: &str, shift: i32) -> Option<String> {
    if shift == 0 {
        return Some(num.to_string());
    }
    let (mantissa, exponent) = match num.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (num, 0),
    };
    Some(format!("{mantissa}e{}", exponent.checked_add(shift)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitError {
    #[error("empty value")]
    Empty,
    #[error("unknown unit suffix '{0}'")]
    UnknownSuffix(String),
    #[error("cannot parse '{0}' as a number")]
    BadNumber(String),
}

/// Parses `text` as a number with an optional unit suffix, returning the
/// value in the dimension's base unit.
pub fn parse_value(text: &str, dim: Dim) -> Result<f64, UnitError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(UnitError::Empty);
    }
    for &(suffix, shift, mul) in dim.suffixes() {
        if let Some(num) = t.strip_suffix(suffix) {
            let num = num.trim_end();
            if num.is_empty() {
                return Err(UnitError::BadNumber(t.to_string()));
            }
            return shift_decimal_exponent(num, shift)
                .and_then(|shifted| shifted.parse::<f64>().ok())
                .map(|v| v * mul)
                .ok_or_else(|| UnitError::BadNumber(t.to_string()));
        }
    }
    t.parse::<f64>().map_err(|_| {
        // Tell a wrong unit apart from a malformed number: strip trailing
        // non-numeric characters and see if a number remains.
        let split = t.rfind(|c: char| c.is_ascii_digit() || c == '.').map_or(0, |i| i + 1);
        let (num, tail) = t.split_at(split);
        if !tail.trim().is_empty() && num.trim().parse::<f64>().is_ok() {
            UnitError::UnknownSuffix(tail.trim().to_string())
        } else {
            UnitError::BadNumber(t.to_string())
        }
    })
}

/// Parses `lo .. hi` (each side with its own optional suffix) or a single
/// value, which stands for the collapsed range `v .. v`.
pub fn parse_range(text: &str, dim: Dim) -> Result<(f64, f64), UnitError> {
    match text.split_once("..") {
        Some((lo, hi)) => Ok((parse_value(lo, dim)?, parse_value(hi, dim)?)),
        None => {
            let v = parse_value(text, dim)?;
            Ok((v, v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_units_parse_without_suffix() {
        assert_eq!(parse_value("8000000", Dim::Size).unwrap(), 8e6);
        assert_eq!(parse_value("0.05", Dim::Time).unwrap(), 0.05);
        assert_eq!(parse_value("1.6", Dim::Frequency).unwrap(), 1.6);
        assert_eq!(parse_value("-47.152", Dim::Pure).unwrap(), -47.152);
    }

    #[test]
    fn suffixes_convert_to_base() {
        assert_eq!(parse_value("1 MB", Dim::Size).unwrap(), 8e6);
        assert_eq!(parse_value("10MB", Dim::Size).unwrap(), 8e7);
        assert_eq!(parse_value("50 ms", Dim::Time).unwrap(), 0.05);
        assert_eq!(parse_value("2 s", Dim::Time).unwrap(), 2.0);
        assert_eq!(parse_value("4.2 GHz", Dim::Frequency).unwrap(), 4.2);
        assert_eq!(parse_value("0.3 nJ", Dim::Energy).unwrap(), 0.3e-9);
        assert_eq!(parse_value("1 Gbps", Dim::Bitrate).unwrap(), 1e9);
        assert_eq!(parse_value("2000 km", Dim::Distance).unwrap(), 2000.0);
        assert_eq!(parse_value("7.5 us/km", Dim::DelayPerDistance).unwrap(), 7.5e-6);
        assert_eq!(parse_value("1.3 GFLOPS/W", Dim::Efficiency).unwrap(), 1.3e9);
    }

    #[test]
    fn longest_suffix_wins() {
        // "ms" must not be read as a malformed "s" value.
        assert_eq!(parse_value("100ms", Dim::Time).unwrap(), 0.1);
        assert_eq!(parse_value("1bps", Dim::Bitrate).unwrap(), 1.0);
    }

    #[test]
    fn scientific_notation_and_negatives() {
        assert_eq!(parse_value("8e6 bit", Dim::Size).unwrap(), 8e6);
        assert_eq!(parse_value("1.5e-3 s", Dim::Time).unwrap(), 1.5e-3);
        assert_eq!(parse_value("1e9", Dim::Bitrate).unwrap(), 1e9);
        // Exponent shifts compose with an explicit exponent.
        assert_eq!(parse_value("1.2e1 ms", Dim::Time).unwrap(), 1.2e-2);
    }

    #[test]
    fn conversion_is_bit_exact_against_base_literals() {
        // Multiplying by a rounded 1e-6 would give 7.499999999999999e-6.
        assert_eq!(parse_value("7.5 us/km", Dim::DelayPerDistance).unwrap(), 7.5e-6);
        assert_eq!(parse_value("0.1 ms", Dim::Time).unwrap(), 0.1e-3);
        assert_eq!(parse_value("3.3 nJ", Dim::Energy).unwrap(), 3.3e-9);
        assert_eq!(parse_value("1.3 MB", Dim::Size).unwrap(), 1.3e6 * 8.0);
    }

    #[test]
    fn wrong_suffix_is_reported_as_such() {
        assert_eq!(
            parse_value("5 GB", Dim::Size).unwrap_err(),
            UnitError::UnknownSuffix("GB".to_string())
        );
        assert_eq!(
            parse_value("5 ms", Dim::Frequency).unwrap_err(),
            UnitError::UnknownSuffix("ms".to_string())
        );
    }

    #[test]
    fn malformed_numbers_are_rejected() {
        assert_eq!(parse_value("", Dim::Time).unwrap_err(), UnitError::Empty);
        assert_eq!(parse_value("  ", Dim::Time).unwrap_err(), UnitError::Empty);
        assert_eq!(parse_value("ms", Dim::Time).unwrap_err(), UnitError::BadNumber("ms".into()));
        assert_eq!(
            parse_value("1.2.3", Dim::Pure).unwrap_err(),
            UnitError::BadNumber("1.2.3".into())
        );
    }

    #[test]
    fn ranges_parse_with_mixed_suffixes() {
        assert_eq!(parse_range("1 MB .. 10 MB", Dim::Size).unwrap(), (8e6, 8e7));
        assert_eq!(parse_range("100 ms .. 1 s", Dim::Time).unwrap(), (0.1, 1.0));
        assert_eq!(parse_range("1..100", Dim::Pure).unwrap(), (1.0, 100.0));
    }

    #[test]
    fn single_value_collapses_to_fixed_range() {
        assert_eq!(parse_range("0.25", Dim::Pure).unwrap(), (0.25, 0.25));
        assert_eq!(parse_range("4 MB", Dim::Size).unwrap(), (3.2e7, 3.2e7));
    }
}
