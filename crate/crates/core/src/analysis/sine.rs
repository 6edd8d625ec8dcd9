use std::f64::consts::PI;

use super::{cycle_stats, AnalysisError};
use crate::model::Waveform;

const MIN_CYCLES: usize = 2;
const MIN_SAMPLES_PER_CYCLE: usize = 16;

/// Least-squares sine fit `offset + amplitude·sin(2πf·t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinFit {
    pub amplitude_v: f64,
    /// Phase at absolute time zero, in (-π, π].
    pub phase_rad: f64,
    pub offset_v: f64,
    pub freq_hz: f64,
    pub residual_rms_v: f64,
}

impl SinFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.offset_v + self.amplitude_v * (2.0 * PI * self.freq_hz * t + self.phase_rad).sin()
    }
}

/// Three-parameter sine fit at a known frequency.
///
/// Solves the normal equations of the `{sin, cos, 1}` basis sampled on the
/// waveform's time axis. Requires at least 2 cycles and 16 samples/cycle.
pub fn fit_sine(wave: &Waveform, f_hz: f64) -> Result<SinFit, AnalysisError> {
    let (per_cycle, cycles) = cycle_stats(wave, f_hz)?;
    if per_cycle < MIN_SAMPLES_PER_CYCLE as f64 {
        return Err(AnalysisError::TooFewSamplesPerCycle {
            per_cycle,
            min: MIN_SAMPLES_PER_CYCLE,
        });
    }
    if cycles < MIN_CYCLES as f64 - 1e-9 {
        return Err(AnalysisError::TooFewCycles {
            cycles,
            min: MIN_CYCLES,
        });
    }

    let w = 2.0 * PI * f_hz;
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for (i, &y) in wave.samples().iter().enumerate() {
        let th = w * wave.time_at(i);
        let row = [th.sin(), th.cos(), 1.0];
        for r in 0..3 {
            aty[r] += row[r] * y;
            for c in 0..3 {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    let [a, b, c] = solve3(ata, aty).ok_or(AnalysisError::DegenerateFit)?;

    let mut ss = 0.0;
    for (i, &y) in wave.samples().iter().enumerate() {
        let th = w * wave.time_at(i);
        let r = y - (a * th.sin() + b * th.cos() + c);
        ss += r * r;
    }
    Ok(SinFit {
        amplitude_v: a.hypot(b),
        phase_rad: b.atan2(a),
        offset_v: c,
        freq_hz: f_hz,
        residual_rms_v: (ss / wave.len() as f64).sqrt(),
    })
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m[0][0].abs().max(m[1][1].abs()).max(m[2][2].abs());
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            let pivot_row = m[col];
            for (dst, src) in m[r].iter_mut().zip(pivot_row).skip(col) {
                *dst -= f * src;
            }
            v[r] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| m[r][c] * x[c]).sum();
        x[r] = (v[r] - s) / m[r][r];
    }
    Some(x)
}
