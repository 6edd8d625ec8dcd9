use super::ModelError;

/// Uniformly sampled voltage capture.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    dt_s: f64,
    t0_s: f64,
    samples: Vec<f64>,
}

impl Waveform {
    pub fn new(dt_s: f64, t0_s: f64, samples: Vec<f64>) -> Result<Self, ModelError> {
        if !(dt_s.is_finite() && dt_s > 0.0) {
            return Err(ModelError::InvalidWaveform(format!(
                "sample interval must be positive and finite, got {dt_s}"
            )));
        }
        if !t0_s.is_finite() {
            return Err(ModelError::InvalidWaveform(
                "start time must be finite".into(),
            ));
        }
        if samples.is_empty() {
            return Err(ModelError::InvalidWaveform("no samples".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::InvalidWaveform(format!(
                "sample {i} is not finite ({})",
                samples[i]
            )));
        }
        Ok(Self {
            dt_s,
            t0_s,
            samples,
        })
    }

    /// Samples `f(t)` at `n` points starting at `t0_s`.
    pub fn from_fn(
        dt_s: f64,
        t0_s: f64,
        n: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, ModelError> {
        let samples = (0..n).map(|i| f(t0_s + i as f64 * dt_s)).collect();
        Self::new(dt_s, t0_s, samples)
    }

    pub fn dt_s(&self) -> f64 {
        self.dt_s
    }

    pub fn t0_s(&self) -> f64 {
        self.t0_s
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_at(&self, i: usize) -> f64 {
        self.t0_s + i as f64 * self.dt_s
    }

    /// Total covered time, `len * dt`.
    pub fn span_s(&self) -> f64 {
        self.samples.len() as f64 * self.dt_s
    }

    /// Same time base, new sample values.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self, ModelError> {
        Self::new(self.dt_s, self.t0_s, samples)
    }

    pub fn rms(&self) -> f64 {
        (self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    pub fn peak_to_peak(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }
}
