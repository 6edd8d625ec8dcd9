use std::f64::consts::PI;

use super::{cycle_stats, AnalysisError};
use crate::model::Waveform;

/// Harmonics 2 through this index enter the score.
pub const THD_HARMONICS: usize = 10;
/// Scores above this are flagged as slew (ramp) distortion. A clean sine
/// scores near zero and an ideal triangle about 0.12.
pub const RAMP_DISTORTION_THRESHOLD: f64 = 0.05;

const MIN_CYCLES: usize = 2;
const MIN_SAMPLES_PER_CYCLE: usize = 64;

/// Magnitude of the DFT of `x` at `cycles_per_sample` (cycles per sample).
fn dft_magnitude(x: &[f64], cycles_per_sample: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let th = 2.0 * PI * cycles_per_sample * i as f64;
        re += v * th.cos();
        im -= v * th.sin();
    }
    re.hypot(im)
}

/// Total harmonic distortion `sqrt(Σ_{k=2..10} |H_k|²) / |H_1|` at the
/// supplied fundamental, evaluated over the largest whole number of cycles.
pub fn ramp_distortion_score(wave: &Waveform, f_hz: f64) -> Result<f64, AnalysisError> {
    let (per_cycle, cycles) = cycle_stats(wave, f_hz)?;
    if per_cycle < MIN_SAMPLES_PER_CYCLE as f64 {
        return Err(AnalysisError::TooFewSamplesPerCycle {
            per_cycle,
            min: MIN_SAMPLES_PER_CYCLE,
        });
    }
    let whole = (cycles + 1e-9).floor();
    if whole < MIN_CYCLES as f64 {
        return Err(AnalysisError::TooFewCycles {
            cycles,
            min: MIN_CYCLES,
        });
    }
    let m = ((whole * per_cycle).round() as usize).min(wave.len());
    let x = &wave.samples()[..m];
    let cps = 1.0 / per_cycle;

    let h1 = dft_magnitude(x, cps);
    let fundamental_rms = h1 * 2.0 / m as f64 / 2f64.sqrt();
    let total_rms = (x.iter().map(|v| v * v).sum::<f64>() / m as f64).sqrt();
    if fundamental_rms <= 0.01 * total_rms {
        return Err(AnalysisError::NoCarrier {
            fundamental_rms,
            total_rms,
        });
    }
    let harmonics: f64 = (2..=THD_HARMONICS)
        .map(|k| dft_magnitude(x, k as f64 * cps).powi(2))
        .sum();
    Ok(harmonics.sqrt() / h1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wave(f: f64, spc: usize, cycles: usize, shape: impl Fn(f64) -> f64) -> Waveform {
        let dt = 1.0 / (f * spc as f64);
        Waveform::from_fn(dt, 0.0, spc * cycles, |t| shape((f * t).fract())).unwrap()
    }

    fn triangle(phase: f64) -> f64 {
        // symmetric, zero mean, unit peak
        if phase < 0.25 {
            4.0 * phase
        } else if phase < 0.75 {
            2.0 - 4.0 * phase
        } else {
            4.0 * phase - 4.0
        }
    }

    #[test]
    fn pure_sine_scores_zero() {
        let w = wave(1e3, 64, 4, |p| (2.0 * PI * p).sin());
        assert!(ramp_distortion_score(&w, 1e3).unwrap() < 1e-6);
    }

    #[test]
    fn triangle_matches_odd_series() {
        // oracle: triangle harmonics fall as 1/n² on odd n; 2..=10 keeps 3, 5, 7, 9
        let series = [3.0f64, 5.0, 7.0, 9.0]
            .iter()
            .map(|n| n.powi(-4))
            .sum::<f64>()
            .sqrt();
        assert!((series - 0.120_476_503_644_839).abs() < 1e-12);
        let w = wave(1e3, 256, 4, triangle);
        let s = ramp_distortion_score(&w, 1e3).unwrap();
        assert!((s - series).abs() < 1e-3, "{s}");
        // full infinite series is 0.12115
        assert!((s - 0.1212).abs() < 0.002);
    }

    #[test]
    fn trims_to_whole_cycles() {
        let dt = 1.0 / (1e3 * 128.0);
        // 3.5 cycles of sine; the half cycle is dropped
        let w = Waveform::from_fn(dt, 0.0, 448, |t| (2.0 * PI * 1e3 * t).sin()).unwrap();
        assert!(ramp_distortion_score(&w, 1e3).unwrap() < 1e-9);
    }

    #[test]
    fn rejects_missing_carrier_and_coarse_sampling() {
        let w = Waveform::new(1e-5, 0.0, vec![5.0; 1000]).unwrap();
        assert!(matches!(
            ramp_distortion_score(&w, 1e3),
            Err(AnalysisError::NoCarrier { .. })
        ));
        let zero = Waveform::new(1e-5, 0.0, vec![0.0; 1000]).unwrap();
        assert!(ramp_distortion_score(&zero, 1e3).is_err());
        let w = wave(1e3, 32, 8, |p| (2.0 * PI * p).sin());
        assert!(matches!(
            ramp_distortion_score(&w, 1e3),
            Err(AnalysisError::TooFewSamplesPerCycle { .. })
        ));
        let w = wave(1e3, 64, 1, |p| (2.0 * PI * p).sin());
        assert!(matches!(
            ramp_distortion_score(&w, 1e3),
            Err(AnalysisError::TooFewCycles { .. })
        ));
    }

    proptest! {
        #[test]
        fn invariant_under_scaling_and_shift(
            scale in 1e-3f64..1e3,
            shift in 0.0f64..1.0,
            h3 in 0.0f64..0.5,
        ) {
            let shape = |p: f64| (2.0 * PI * p).sin() + h3 * (6.0 * PI * p).sin();
            let base = wave(1e3, 128, 4, shape);
            let moved = wave(1e3, 128, 4, |p| scale * shape((p + shift).fract()));
            let a = ramp_distortion_score(&base, 1e3).unwrap();
            let b = ramp_distortion_score(&moved, 1e3).unwrap();
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a));
        }
    }
}
