//! Command implementations behind the `ipsuq` binary.
//!
//! Each subcommand is an ordinary function writing human-readable output to
//! a writer, so the pipeline is drivable from tests without spawning a
//! process. Exit codes: 0 success, 1 validation/parse error, 2 numerical
//! failure.

pub mod commands;
pub mod pipeline;

use ipsuq_core::Error;

/// Maps an error to the process exit code: data-driven numerical failures
/// are 2, everything else (parse/validation) is 1.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::EmptyBin(_)
        | Error::SequenceTooShort(_)
        | Error::SequenceNotIncreasing
        | Error::MissingDayAheadPoint => 2,
        _ => 1,
    }
}

/// Fixed-notation formatting at `digits` significant digits.
pub fn fmt_sig(value: f64, digits: i32) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig(33.868, 6), "33.8680");
        assert_eq!(fmt_sig(0.7525687965, 6), "0.752569");
        assert_eq!(fmt_sig(1.7861175634, 6), "1.78612");
        assert_eq!(fmt_sig(240000.0, 6), "240000");
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(-2.2734188, 6), "-2.27342");
    }

    #[test]
    fn exit_codes_split_validation_from_numerics() {
        assert_eq!(exit_code(&Error::SequenceNotIncreasing), 2);
        assert_eq!(exit_code(&Error::EmptyBin(3.0)), 2);
        assert_eq!(exit_code(&Error::SequenceTooShort(1)), 2);
        assert_eq!(exit_code(&Error::InvalidAmplitude(-1.0)), 1);
        assert_eq!(exit_code(&Error::InvalidConfig { reason: "x".into() }), 1);
    }
}
