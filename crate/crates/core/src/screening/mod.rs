//! Supply-current (I_CC) statistical screening.
//!
//! Genuine and counterfeit parts form two roughly normal I_CC populations.
//! Their separation is summarized by
//!
//! ```text
//! k = |μ_gen − μ_coun| / (σ_gen + σ_coun)
//! ```
//!
//! and the lower side limit (LSL) sits at the point exactly `k` standard
//! deviations from both means. The upper side limit (USL) is the datasheet
//! maximum. Parts between the two limits pass.

mod tail;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use tail::{erfc, tail_ppm};

/// Datasheet maximum supply current of a TL074CN.
pub const DEFAULT_USL_A: f64 = 2.5e-3;
/// Minimum active-minus-quiescent increase expected from a genuine part.
pub const DEFAULT_MIN_DELTA_A: f64 = 0.25e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScreeningError {
    #[error("population needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("sample {index} is not positive ({value} A)")]
    NonPositive { index: usize, value: f64 },
    #[error("genuine mean {gen_a} A must exceed counterfeit mean {coun_a} A")]
    MeanOrder { gen_a: f64, coun_a: f64 },
    #[error("both populations have zero spread; separation is infinite")]
    ZeroSpread,
    #[error("separation statistic k must be >= 0, got {0}")]
    NegativeK(f64),
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("supply current must be finite and >= 0, got {0} A")]
    InvalidCurrent(f64),
}

/// Mean, Bessel-corrected standard deviation and size of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationStats {
    pub mean_a: f64,
    pub stddev_a: f64,
    pub n: usize,
}

impl PopulationStats {
    pub fn new(mean_a: f64, stddev_a: f64, n: usize) -> Result<Self, ScreeningError> {
        if n < 2 {
            return Err(ScreeningError::TooFewSamples(n));
        }
        if !mean_a.is_finite() {
            return Err(ScreeningError::NonFinite {
                index: 0,
                value: mean_a,
            });
        }
        if !(stddev_a.is_finite() && stddev_a >= 0.0) {
            return Err(ScreeningError::NonFinite {
                index: 0,
                value: stddev_a,
            });
        }
        Ok(Self {
            mean_a,
            stddev_a,
            n,
        })
    }
}

pub fn fit_population(samples: &[f64]) -> Result<PopulationStats, ScreeningError> {
    if samples.len() < 2 {
        return Err(ScreeningError::TooFewSamples(samples.len()));
    }
    for (index, &value) in samples.iter().enumerate() {
        if !value.is_finite() {
            return Err(ScreeningError::NonFinite { index, value });
        }
        if value <= 0.0 {
            return Err(ScreeningError::NonPositive { index, value });
        }
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(PopulationStats {
        mean_a: mean,
        stddev_a: var.sqrt(),
        n: samples.len(),
    })
}

/// Separation statistic, or the infinite-separation flag when both
/// populations have zero spread and distinct means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Separation {
    Finite(f64),
    Infinite,
}

impl Separation {
    pub fn value(self) -> f64 {
        match self {
            Separation::Finite(k) => k,
            Separation::Infinite => f64::INFINITY,
        }
    }
}

pub fn separation_k(p_gen: &PopulationStats, p_coun: &PopulationStats) -> Separation {
    let gap = (p_gen.mean_a - p_coun.mean_a).abs();
    let spread = p_gen.stddev_a + p_coun.stddev_a;
    if spread > 0.0 {
        Separation::Finite(gap / spread)
    } else if gap == 0.0 {
        Separation::Finite(0.0)
    } else {
        Separation::Infinite
    }
}

/// Sigma-equidistant point between the populations:
/// `(μ_gen·σ_coun + μ_coun·σ_gen) / (σ_gen + σ_coun)`.
pub fn compute_lsl(
    p_gen: &PopulationStats,
    p_coun: &PopulationStats,
) -> Result<f64, ScreeningError> {
    if !(p_gen.mean_a > p_coun.mean_a) {
        return Err(ScreeningError::MeanOrder {
            gen_a: p_gen.mean_a,
            coun_a: p_coun.mean_a,
        });
    }
    let spread = p_gen.stddev_a + p_coun.stddev_a;
    if !(spread > 0.0) {
        return Err(ScreeningError::ZeroSpread);
    }
    Ok((p_gen.mean_a * p_coun.stddev_a + p_coun.mean_a * p_gen.stddev_a) / spread)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreeningThresholds {
    pub lsl_a: f64,
    pub usl_a: f64,
    pub k: f64,
    pub tail_ppm: f64,
}

impl ScreeningThresholds {
    pub fn new(lsl_a: f64, usl_a: f64, k: f64, tail_ppm: f64) -> Result<Self, ScreeningError> {
        let t = Self {
            lsl_a,
            usl_a,
            k,
            tail_ppm,
        };
        t.validate()?;
        Ok(t)
    }

    /// LSL, `k` and its tail from the two populations; USL supplied.
    pub fn from_populations(
        p_gen: &PopulationStats,
        p_coun: &PopulationStats,
        usl_a: f64,
    ) -> Result<Self, ScreeningError> {
        let lsl = compute_lsl(p_gen, p_coun)?;
        let k = separation_k(p_gen, p_coun).value();
        Self::new(lsl, usl_a, k, tail_ppm(k)?)
    }

    pub fn validate(&self) -> Result<(), ScreeningError> {
        let bad = |m: String| Err(ScreeningError::InvalidThresholds(m));
        if !(self.lsl_a.is_finite() && self.usl_a.is_finite()) {
            return bad("limits must be finite".into());
        }
        if !(0.0 < self.lsl_a && self.lsl_a < self.usl_a) {
            return bad(format!(
                "need 0 < lsl < usl, got lsl={} usl={}",
                self.lsl_a, self.usl_a
            ));
        }
        if !(self.k.is_finite() && self.k >= 0.0) {
            return bad(format!("k must be finite and >= 0, got {}", self.k));
        }
        if !(self.tail_ppm.is_finite() && self.tail_ppm >= 0.0) {
            return bad(format!("tail_ppm must be >= 0, got {}", self.tail_ppm));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Pass,
    /// Below the LSL: consistent with a counterfeit part.
    SuspectLow,
    /// Above the USL: out of datasheet specification.
    FailHigh,
}

impl VerdictKind {
    pub const ALL: [VerdictKind; 3] = [
        VerdictKind::Pass,
        VerdictKind::SuspectLow,
        VerdictKind::FailHigh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Pass => "pass",
            VerdictKind::SuspectLow => "suspect_low",
            VerdictKind::FailHigh => "fail_high",
        }
    }
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub icc_a: f64,
    pub lsl_a: f64,
    pub usl_a: f64,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        self.kind == VerdictKind::Pass
    }
}

/// Interval test; both limits are inclusive on the pass side.
pub fn classify_icc(icc_a: f64, th: &ScreeningThresholds) -> Result<Verdict, ScreeningError> {
    if !(icc_a.is_finite() && icc_a >= 0.0) {
        return Err(ScreeningError::InvalidCurrent(icc_a));
    }
    let kind = if icc_a < th.lsl_a {
        VerdictKind::SuspectLow
    } else if icc_a > th.usl_a {
        VerdictKind::FailHigh
    } else {
        VerdictKind::Pass
    };
    Ok(Verdict {
        kind,
        icc_a,
        lsl_a: th.lsl_a,
        usl_a: th.usl_a,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaIccOutcome {
    GenuineConsistent,
    CounterfeitConsistent,
}

impl DeltaIccOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            DeltaIccOutcome::GenuineConsistent => "genuine_consistent",
            DeltaIccOutcome::CounterfeitConsistent => "counterfeit_consistent",
        }
    }
}

/// Genuine parts draw noticeably more current while amplifying.
///
/// The comparison is inclusive and tolerates a few ulps of rounding in the
/// subtraction, so `(x, x + min_delta)` always counts as genuine.
pub fn delta_icc_test(
    icc_quiescent_a: f64,
    icc_active_a: f64,
    min_delta_a: f64,
) -> Result<DeltaIccOutcome, ScreeningError> {
    for v in [icc_quiescent_a, icc_active_a] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(ScreeningError::InvalidCurrent(v));
        }
    }
    let delta = icc_active_a - icc_quiescent_a;
    let slack = 4.0 * f64::EPSILON * icc_active_a.max(icc_quiescent_a).max(min_delta_a.abs());
    Ok(if delta >= min_delta_a - slack {
        DeltaIccOutcome::GenuineConsistent
    } else {
        DeltaIccOutcome::CounterfeitConsistent
    })
}
