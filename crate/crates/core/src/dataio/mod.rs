//! File formats and synthetic capture generation.
//!
//! | artifact   | format                                                   |
//! |------------|----------------------------------------------------------|
//! | waveform   | CSV, header `time_s,voltage_v`                           |
//! | sweep      | CSV, header `freq_hz,gain_db,phase_deg`                  |
//! | thresholds | one JSON object (limits, `k`, tail, population stats)    |
//! | components | newline-delimited JSON records, append-only, one writer  |
//!
//! Numbers in the CSV formats are written with 9 significant digits in
//! exponent notation and LF line endings. Readers reject malformed input;
//! every rejection carries the offending line number.

mod csv;
mod db;
mod synth;
mod thresholds;

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::model::ModelError;
use crate::screening::ScreeningError;

pub use self::csv::{
    read_current_column, read_sweep_csv, read_waveform_csv, write_sweep_csv, write_waveform_csv,
    SWEEP_HEADER, WAVEFORM_HEADER,
};
pub use db::{
    component_db_append, component_db_load, read_component_db, write_component_record,
    ComponentRecord,
};
pub use synth::{
    log_frequencies, synth_capture, synth_capture_pairs, synth_sweep, Capture, Stimulus, SynthSpec,
};
pub use thresholds::{read_thresholds, write_thresholds, ThresholdsFile};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected header '{expected}', found '{found}'")]
    MissingHeader {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: {message}")]
    BadNumber {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: need at least {min} data rows, found {found}")]
    TooFewRows {
        line: usize,
        found: usize,
        min: usize,
    },
    #[error("line {line}: time {time_s} s does not increase over the previous row")]
    NonIncreasingTime { line: usize, time_s: f64 },
    #[error("line {line}: sample interval {interval_s} s deviates from the median {median_s} s by more than 0.1%")]
    NonUniform {
        line: usize,
        interval_s: f64,
        median_s: f64,
    },
    #[error("time stamps up to {t_max_s} s cannot resolve a {dt_s} s interval with 9 significant digits")]
    TimeResolution { t_max_s: f64, dt_s: f64 },
    #[error("line {line}: duplicate frequency {f_hz} Hz")]
    DuplicateFrequency { line: usize, f_hz: f64 },
    #[error("line {line}: frequency {f_hz} Hz is lower than the previous row")]
    NonIncreasingFrequency { line: usize, f_hz: f64 },
    #[error("line {line}: malformed record: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("line {line}: duplicate component id '{id}'")]
    DuplicateId { line: usize, id: String },
    #[error("invalid component record '{id}': {message}")]
    InvalidRecord { id: String, message: String },
    #[error("line {line}: invalid thresholds file: {message}")]
    Thresholds { line: usize, message: String },
    #[error("invalid synthesis parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Screening(#[from] ScreeningError),
}

/// Rounds to the nearest value representable with 9 significant digits.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// Canonical 9-significant-digit text form used by the CSV writers.
pub fn format_sig9(x: f64) -> String {
    format!("{:e}", round_sig9(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(1e-6), "1e-6");
        assert_eq!(format_sig9(0.0), "0e0");
        assert_eq!(format_sig9(-0.0), "0e0");
        assert_eq!(format_sig9(247_619.047_619), "2.47619048e5");
        assert_eq!(format_sig9(-13.5), "-1.35e1");
        let x = round_sig9(std::f64::consts::PI);
        assert_eq!(round_sig9(x), x);
        assert_eq!(format_sig9(x), "3.14159265e0");
    }
}
