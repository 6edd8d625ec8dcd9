use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::DataError;
use crate::screening::{compute_lsl, separation_k, PopulationStats, ScreeningThresholds};

const REDERIVE_TOLERANCE: f64 = 1e-9;

/// Screening thresholds plus the population fits they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdsFile {
    pub lsl_a: f64,
    pub usl_a: f64,
    pub k: f64,
    pub tail_ppm: f64,
    pub genuine: PopulationStats,
    pub counterfeit: PopulationStats,
    /// RFC 3339 fit time; absent when timestamps are suppressed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_at: Option<String>,
}

impl ThresholdsFile {
    pub fn new(
        genuine: PopulationStats,
        counterfeit: PopulationStats,
        usl_a: f64,
        fitted_at: Option<String>,
    ) -> Result<Self, DataError> {
        let th = ScreeningThresholds::from_populations(&genuine, &counterfeit, usl_a)?;
        Ok(Self {
            lsl_a: th.lsl_a,
            usl_a: th.usl_a,
            k: th.k,
            tail_ppm: th.tail_ppm,
            genuine,
            counterfeit,
            fitted_at,
        })
    }

    pub fn thresholds(&self) -> ScreeningThresholds {
        ScreeningThresholds {
            lsl_a: self.lsl_a,
            usl_a: self.usl_a,
            k: self.k,
            tail_ppm: self.tail_ppm,
        }
    }

    /// Limits valid and `k` / LSL consistent with the embedded populations.
    pub fn validate(&self) -> Result<(), String> {
        self.thresholds().validate().map_err(|e| e.to_string())?;
        let close = |a: f64, b: f64| (a - b).abs() <= REDERIVE_TOLERANCE * a.abs().max(b.abs());
        let k = separation_k(&self.genuine, &self.counterfeit).value();
        if !close(k, self.k) {
            return Err(format!("stored k={} but populations give {k}", self.k));
        }
        let lsl = compute_lsl(&self.genuine, &self.counterfeit).map_err(|e| e.to_string())?;
        if !close(lsl, self.lsl_a) {
            return Err(format!(
                "stored lsl_a={} but populations give {lsl}",
                self.lsl_a
            ));
        }
        for (name, p) in [
            ("genuine", &self.genuine),
            ("counterfeit", &self.counterfeit),
        ] {
            if p.n < 2 || !(p.stddev_a >= 0.0) {
                return Err(format!("{name} population is invalid"));
            }
        }
        Ok(())
    }
}

pub fn read_thresholds(mut source: impl Read) -> Result<ThresholdsFile, DataError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let file: ThresholdsFile = serde_json::from_str(&text).map_err(|e| DataError::Thresholds {
        line: e.line(),
        message: e.to_string(),
    })?;
    file.validate()
        .map_err(|message| DataError::Thresholds { line: 1, message })?;
    Ok(file)
}

pub fn write_thresholds(file: &ThresholdsFile, mut sink: impl Write) -> Result<(), DataError> {
    let mut text = serde_json::to_string_pretty(file).expect("thresholds serialize");
    text.push('\n');
    sink.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_file() -> ThresholdsFile {
        ThresholdsFile::new(
            PopulationStats::new(1.89e-3, 0.135e-3, 13).unwrap(),
            PopulationStats::new(0.42e-3, 0.023e-3, 8).unwrap(),
            2.5e-3,
            None,
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let f = reference_file();
        let mut buf = Vec::new();
        write_thresholds(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        for key in [
            "lsl_a", "usl_a", "k", "tail_ppm", "mean_a", "stddev_a", "\"n\"",
        ] {
            assert!(text.contains(key), "{key}");
        }
        assert_eq!(read_thresholds(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn tampered_values_rejected() {
        let mut f = reference_file();
        f.k = 5.0;
        let mut buf = Vec::new();
        write_thresholds(&f, &mut buf).unwrap();
        assert!(matches!(
            read_thresholds(buf.as_slice()),
            Err(DataError::Thresholds { .. })
        ));
        let e = read_thresholds("{\n  \"lsl_a\": oops\n}".as_bytes()).unwrap_err();
        assert!(matches!(e, DataError::Thresholds { line: 2, .. }));
    }
}
