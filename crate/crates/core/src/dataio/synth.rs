//! Deterministic synthetic captures for tests and demonstrations.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DataError;
use crate::analysis::{BodeCurve, BodePoint, CapturePair, SweepMeta};
use crate::model::{closed_loop_gain, simulate_transient, AmpConfig, OpAmpModel, Waveform};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stimulus {
    Sine { freq_hz: f64, vpp: f64 },
    Square { freq_hz: f64, vpp: f64 },
}

impl Stimulus {
    pub fn freq_hz(&self) -> f64 {
        match *self {
            Stimulus::Sine { freq_hz, .. } | Stimulus::Square { freq_hz, .. } => freq_hz,
        }
    }

    pub fn vpp(&self) -> f64 {
        match *self {
            Stimulus::Sine { vpp, .. } | Stimulus::Square { vpp, .. } => vpp,
        }
    }
}

/// `sine:<freq_hz>:<vpp>` or `square:<freq_hz>:<vpp>`.
impl FromStr for Stimulus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, f, vpp] = parts.as_slice() else {
            return Err(format!("expected kind:freq_hz:vpp, got '{s}'"));
        };
        let num = |v: &str, what: &str| -> Result<f64, String> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x > 0.0)
                .ok_or_else(|| format!("{what} must be a positive number, got '{v}'"))
        };
        let freq_hz = num(f, "frequency")?;
        let vpp = num(vpp, "amplitude")?;
        match *kind {
            "sine" => Ok(Stimulus::Sine { freq_hz, vpp }),
            "square" => Ok(Stimulus::Square { freq_hz, vpp }),
            other => Err(format!(
                "unknown stimulus '{other}' (expected sine or square)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub stimulus: Stimulus,
    /// Cycles kept in the returned capture.
    pub cycles: usize,
    /// Leading cycles simulated and then discarded, so the capture starts
    /// after the start-up transient.
    pub settle_cycles: usize,
    pub samples_per_cycle: usize,
    /// Peak-to-peak width of the uniform noise added to the output.
    pub noise_vpp: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(stimulus: Stimulus) -> Self {
        Self {
            stimulus,
            cycles: 4,
            settle_cycles: 0,
            samples_per_cycle: 256,
            noise_vpp: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Capture {
    pub input: Waveform,
    pub output: Waveform,
}

/// Generates the stimulus, simulates the amplifier and adds uniform noise
/// of ±`noise_vpp/2` to the output. Deterministic for a fixed seed.
///
/// Both returned waveforms share the same time axis; with settle cycles it
/// starts at `settle_cycles / f` rather than 0.
pub fn synth_capture(
    model: &OpAmpModel,
    cfg: &AmpConfig,
    spec: &SynthSpec,
) -> Result<Capture, DataError> {
    if spec.cycles < 2 {
        return Err(DataError::InvalidParameter(format!(
            "cycles must be >= 2, got {}",
            spec.cycles
        )));
    }
    if spec.samples_per_cycle < 64 {
        return Err(DataError::InvalidParameter(format!(
            "samples per cycle must be >= 64, got {}",
            spec.samples_per_cycle
        )));
    }
    if !(spec.noise_vpp.is_finite() && spec.noise_vpp >= 0.0) {
        return Err(DataError::InvalidParameter(format!(
            "noise must be finite and >= 0, got {}",
            spec.noise_vpp
        )));
    }
    let (f, vpp) = (spec.stimulus.freq_hz(), spec.stimulus.vpp());
    if !(f.is_finite() && f > 0.0 && vpp.is_finite() && vpp > 0.0) {
        return Err(DataError::InvalidParameter(format!(
            "stimulus frequency and amplitude must be positive, got {f} Hz / {vpp} Vpp"
        )));
    }
    let spc = spec.samples_per_cycle;
    let n = (spec.settle_cycles + spec.cycles) * spc;
    let dt = 1.0 / (f * spc as f64);
    let amp = vpp / 2.0;
    let samples: Vec<f64> = match spec.stimulus {
        Stimulus::Sine { .. } => (0..n)
            .map(|i| amp * (2.0 * PI * (i % spc) as f64 / spc as f64).sin())
            .collect(),
        Stimulus::Square { .. } => (0..n)
            .map(|i| if i % spc < spc / 2 { amp } else { -amp })
            .collect(),
    };
    let full_input = Waveform::new(dt, 0.0, samples)?;
    let full_output = simulate_transient(model, cfg, &full_input)?;
    let skip = spec.settle_cycles * spc;
    let t0 = skip as f64 * dt;
    let input = Waveform::new(dt, t0, full_input.samples()[skip..].to_vec())?;
    let mut output = Waveform::new(dt, t0, full_output.into_samples().split_off(skip))?;
    if spec.noise_vpp > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let half = spec.noise_vpp / 2.0;
        let noisy = output
            .samples()
            .iter()
            .map(|v| v + rng.random_range(-half..=half))
            .collect();
        output = output.with_samples(noisy)?;
    }
    Ok(Capture { input, output })
}

/// Sine capture pairs at each frequency, ready for `bode_from_pairs`.
pub fn synth_capture_pairs(
    model: &OpAmpModel,
    cfg: &AmpConfig,
    freqs: &[f64],
    vpp: f64,
    base: &SynthSpec,
) -> Result<Vec<CapturePair>, DataError> {
    freqs
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let spec = SynthSpec {
                stimulus: Stimulus::Sine { freq_hz: f, vpp },
                seed: base.seed.wrapping_add(i as u64),
                ..*base
            };
            let c = synth_capture(model, cfg, &spec)?;
            Ok(CapturePair {
                f_hz: f,
                input: c.input,
                output: c.output,
            })
        })
        .collect()
}

/// Log-spaced frequencies from `start` to `stop` inclusive.
pub fn log_frequencies(start: f64, stop: f64, per_decade: usize) -> Result<Vec<f64>, DataError> {
    if !(start > 0.0 && stop > start && stop.is_finite() && per_decade > 0) {
        return Err(DataError::InvalidParameter(format!(
            "need 0 < start < stop and points per decade > 0, got {start}..{stop} at {per_decade}/decade"
        )));
    }
    let steps = ((stop / start).log10() * per_decade as f64 + 1e-9).floor() as usize;
    let mut freqs: Vec<f64> = (0..=steps)
        .map(|i| start * 10f64.powf(i as f64 / per_decade as f64))
        .collect();
    let last = *freqs.last().unwrap();
    if last < stop * (1.0 - 1e-9) {
        freqs.push(stop);
    } else {
        *freqs.last_mut().unwrap() = stop;
    }
    Ok(freqs)
}

/// Small-signal sweep evaluated directly from the single-pole response.
pub fn synth_sweep(
    model: &OpAmpModel,
    cfg: &AmpConfig,
    freqs: &[f64],
) -> Result<BodeCurve, DataError> {
    let points = freqs
        .iter()
        .map(|&f| {
            let (gain_db, phase_deg) = closed_loop_gain(model, cfg, f)?;
            Ok(BodePoint {
                f_hz: f,
                gain_db,
                phase_deg,
            })
        })
        .collect::<Result<Vec<_>, DataError>>()?;
    Ok(BodeCurve::new(points)?.with_meta(SweepMeta {
        input_vpp: None,
        config: Some(format!("{} G={}", cfg.topology, cfg.gain_magnitude)),
    }))
}
