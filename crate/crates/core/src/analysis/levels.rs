//! Plateau-based measurements on saturated (square-wave) responses.

use super::AnalysisError;
use crate::model::Waveform;

/// Measured slew rates in V/s. Medians over the complete transitions of
/// each direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlewRate {
    pub rising_v_per_s: Option<f64>,
    pub falling_v_per_s: Option<f64>,
    /// Median over all edges regardless of direction.
    pub combined_v_per_s: f64,
    pub rising_edges: usize,
    pub falling_edges: usize,
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Linear-interpolated percentile of sorted data, `p` in [0, 1].
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn median(values: &[f64]) -> f64 {
    percentile(&sorted(values), 0.5)
}

#[derive(Clone, Copy, PartialEq)]
enum Region {
    Low,
    High,
}

/// 10–90 % secant slew rate between the 5th/95th percentile plateaus.
pub fn extract_slew_rate(wave: &Waveform) -> Result<SlewRate, AnalysisError> {
    let x = wave.samples();
    let s = sorted(x);
    let low = percentile(&s, 0.05);
    let high = percentile(&s, 0.95);
    let swing = high - low;
    if !(swing > 1e-12 * low.abs().max(high.abs()).max(1e-300)) {
        return Err(AnalysisError::NoPlateaus);
    }
    if x.len() > 1 && (x.windows(2).all(|w| w[1] > w[0]) || x.windows(2).all(|w| w[1] < w[0])) {
        return Err(AnalysisError::Monotone);
    }
    let l10 = low + 0.1 * swing;
    let l90 = low + 0.9 * swing;
    let dt = wave.dt_s();
    // fractional sample index where the segment i -> i+1 crosses `level`
    let cross = |i: usize, level: f64| -> f64 {
        let (a, b) = (x[i], x[i + 1]);
        i as f64 + (level - a) / (b - a)
    };

    let mut rising = Vec::new();
    let mut falling = Vec::new();
    let mut region: Option<(Region, usize)> = None;
    for (i, &v) in x.iter().enumerate() {
        let here = if v <= l10 {
            Region::Low
        } else if v >= l90 {
            Region::High
        } else {
            continue;
        };
        match region {
            Some((prev, last)) if prev != here => {
                // `last` is the final sample of the previous plateau band and
                // `i` the first sample of the new one
                let (start_level, end_level) = match here {
                    Region::High => (l10, l90),
                    Region::Low => (l90, l10),
                };
                let t_start = cross(last, start_level);
                let t_end = cross(i - 1, end_level);
                let duration = (t_end - t_start) * dt;
                if duration > 0.0 {
                    let sr = (l90 - l10) / duration;
                    match here {
                        Region::High => rising.push(sr),
                        Region::Low => falling.push(sr),
                    }
                }
            }
            _ => {}
        }
        region = Some((here, i));
    }
    if rising.is_empty() && falling.is_empty() {
        return Err(AnalysisError::NoTransition);
    }
    let all: Vec<f64> = rising.iter().chain(falling.iter()).copied().collect();
    Ok(SlewRate {
        rising_v_per_s: (!rising.is_empty()).then(|| median(&rising)),
        falling_v_per_s: (!falling.is_empty()).then(|| median(&falling)),
        combined_v_per_s: median(&all),
        rising_edges: rising.len(),
        falling_edges: falling.len(),
    })
}

/// Output swing limits of a clipped response, as `(positive, negative)`.
///
/// Each rail is the median of the samples within 2 % of the peak-to-peak
/// swing from the corresponding extreme; both clusters must hold at least
/// 10 % of the samples.
pub fn extract_vom(wave: &Waveform) -> Result<(f64, f64), AnalysisError> {
    let x = wave.samples();
    let s = sorted(x);
    let (min, max) = (s[0], s[s.len() - 1]);
    let band = 0.02 * (max - min);
    let top: Vec<f64> = s.iter().copied().filter(|&v| v >= max - band).collect();
    let bottom: Vec<f64> = s.iter().copied().filter(|&v| v <= min + band).collect();
    let n = x.len() as f64;
    let (top_pct, bottom_pct) = (
        100.0 * top.len() as f64 / n,
        100.0 * bottom.len() as f64 / n,
    );
    if max == min || top_pct < 10.0 || bottom_pct < 10.0 {
        return Err(AnalysisError::Unclipped {
            top_pct,
            bottom_pct,
        });
    }
    Ok((percentile(&top, 0.5), percentile(&bottom, 0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ideal_ramp_between_plateaus() {
        // 1 ms flat, 0 -> 1 V over 1 ms, 1 ms flat
        let dt = 1e-6;
        let w = Waveform::from_fn(dt, 0.0, 3000, |t| ((t - 1e-3) / 1e-3).clamp(0.0, 1.0)).unwrap();
        let sr = extract_slew_rate(&w).unwrap();
        let r = sr.rising_v_per_s.unwrap();
        assert!((r - 1000.0).abs() < 1e-6, "{r}");
        assert_eq!(sr.falling_v_per_s, None);
        assert_eq!(sr.rising_edges, 1);
    }

    #[test]
    fn trapezoid_reports_both_edges() {
        let dt = 1e-6;
        // rise at 2000 V/s, fall at 500 V/s
        let w = Waveform::from_fn(dt, 0.0, 6000, |t| {
            if t < 1e-3 {
                0.0
            } else if t < 1.5e-3 {
                (t - 1e-3) * 2000.0
            } else if t < 3e-3 {
                1.0
            } else if t < 5e-3 {
                1.0 - (t - 3e-3) * 500.0
            } else {
                0.0
            }
        })
        .unwrap();
        let sr = extract_slew_rate(&w).unwrap();
        assert!((sr.rising_v_per_s.unwrap() - 2000.0).abs() < 1e-3);
        assert!((sr.falling_v_per_s.unwrap() - 500.0).abs() < 1e-3);
    }

    #[test]
    fn slew_errors() {
        let flat = Waveform::new(1e-6, 0.0, vec![1.0; 100]).unwrap();
        assert_eq!(extract_slew_rate(&flat), Err(AnalysisError::NoPlateaus));
        let ramp = Waveform::from_fn(1e-6, 0.0, 100, |t| t).unwrap();
        assert_eq!(extract_slew_rate(&ramp), Err(AnalysisError::Monotone));
    }

    #[test]
    fn clipped_sine_rails() {
        let w = Waveform::from_fn(1e-5, 0.0, 1000, |t| {
            (20.0 * (2.0 * PI * 1e3 * t).sin()).clamp(-12.0, 12.0)
        })
        .unwrap();
        let (p, n) = extract_vom(&w).unwrap();
        assert_eq!((p, n), (12.0, -12.0));
    }

    #[test]
    fn unclipped_sine_rejected() {
        let w = Waveform::from_fn(1e-5, 0.0, 1000, |t| (2.0 * PI * 1e3 * t).sin()).unwrap();
        assert!(matches!(
            extract_vom(&w),
            Err(AnalysisError::Unclipped { .. })
        ));
    }
}
