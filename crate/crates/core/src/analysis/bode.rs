use super::{fit_sine, AnalysisError};
use crate::model::{wrap_degrees, Waveform};

/// 10·log10(2): the half-power drop.
pub const THREE_DB: f64 = 3.010_299_956_639_812;

/// Points within this many dB of the DC reference feed the pole fit.
const FIT_WINDOW_DB: f64 = 20.0;
/// A curve whose every point is within this band of DC has no rolloff.
const MIN_ROLLOFF_DB: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodePoint {
    pub f_hz: f64,
    pub gain_db: f64,
    pub phase_deg: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepMeta {
    pub input_vpp: Option<f64>,
    pub config: Option<String>,
}

/// Swept-sine frequency response.
#[derive(Debug, Clone, PartialEq)]
pub struct BodeCurve {
    points: Vec<BodePoint>,
    pub meta: SweepMeta,
}

impl BodeCurve {
    /// Points must have strictly increasing positive frequencies and
    /// finite values.
    pub fn new(points: Vec<BodePoint>) -> Result<Self, AnalysisError> {
        for p in &points {
            if !(p.f_hz.is_finite() && p.f_hz > 0.0) {
                return Err(AnalysisError::InvalidFrequency(p.f_hz));
            }
            if !(p.gain_db.is_finite() && p.phase_deg.is_finite()) {
                return Err(AnalysisError::NonFinitePoint(p.f_hz));
            }
        }
        for w in points.windows(2) {
            if w[1].f_hz == w[0].f_hz {
                return Err(AnalysisError::DuplicateFrequency(w[1].f_hz));
            }
            if w[1].f_hz < w[0].f_hz {
                return Err(AnalysisError::NonIncreasingFrequency {
                    prev: w[0].f_hz,
                    next: w[1].f_hz,
                });
            }
        }
        Ok(Self {
            points,
            meta: SweepMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: SweepMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn points(&self) -> &[BodePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Phase relative to the lowest-frequency point, unwrapped along the
    /// sweep. Removes the 180° offset of the inverting topology.
    pub fn phase_shift_deg(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len());
        let mut acc = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                acc += wrap_degrees(p.phase_deg - self.points[i - 1].phase_deg);
            }
            out.push(acc);
        }
        out
    }

    /// Mean gain over the lowest measured decade.
    pub fn dc_gain_db(&self) -> Result<f64, AnalysisError> {
        let first = self.points.first().ok_or(AnalysisError::EmptyCurve)?;
        let limit = first.f_hz * 10.0;
        let decade: Vec<f64> = self
            .points
            .iter()
            .take_while(|p| p.f_hz <= limit)
            .map(|p| p.gain_db)
            .collect();
        if decade.len() < 2 {
            return Err(AnalysisError::InsufficientLowDecade {
                found: decade.len(),
                min: 2,
            });
        }
        Ok(decade.iter().sum::<f64>() / decade.len() as f64)
    }
}

/// One swept-sine measurement: stimulus and response at `f_hz`.
#[derive(Debug, Clone)]
pub struct CapturePair {
    pub f_hz: f64,
    pub input: Waveform,
    pub output: Waveform,
}

/// Builds a Bode curve from input/output capture pairs by sine fitting.
pub fn bode_from_pairs(captures: &[CapturePair]) -> Result<BodeCurve, AnalysisError> {
    let mut points = Vec::with_capacity(captures.len());
    for c in captures {
        let wrap = |e: AnalysisError| AnalysisError::FitFailed {
            f_hz: c.f_hz,
            source: Box::new(e),
        };
        let fin = fit_sine(&c.input, c.f_hz).map_err(wrap)?;
        let fout = fit_sine(&c.output, c.f_hz).map_err(wrap)?;
        if fin.amplitude_v == 0.0 || fout.amplitude_v == 0.0 {
            return Err(AnalysisError::ZeroAmplitude { f_hz: c.f_hz });
        }
        points.push(BodePoint {
            f_hz: c.f_hz,
            gain_db: 20.0 * (fout.amplitude_v / fin.amplitude_v).log10(),
            phase_deg: wrap_degrees((fout.phase_rad - fin.phase_rad).to_degrees()),
        });
    }
    points.sort_by(|a, b| a.f_hz.total_cmp(&b.f_hz));
    BodeCurve::new(points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F3dbEstimate {
    pub f3db_hz: f64,
    /// Reference gain the -3 dB level was taken from.
    pub dc_gain_db: f64,
    /// Phase shift from the lowest point at the crossing (unwrapped).
    pub phase_shift_deg: f64,
    /// Set when the gain returns above the -3 dB level after the first
    /// crossing; the first crossing is reported.
    pub non_monotonic: bool,
}

/// -3 dB frequency using the lowest-decade mean as DC gain.
pub fn extract_f3db(curve: &BodeCurve) -> Result<F3dbEstimate, AnalysisError> {
    let dc = curve.dc_gain_db()?;
    extract_f3db_with_reference(curve, dc)
}

/// -3 dB frequency relative to an explicit reference gain, interpolated
/// linearly in log-frequency between the bracketing points.
pub fn extract_f3db_with_reference(
    curve: &BodeCurve,
    dc_gain_db: f64,
) -> Result<F3dbEstimate, AnalysisError> {
    let level = dc_gain_db - THREE_DB;
    let pts = curve.points();
    let idx = pts
        .windows(2)
        .position(|w| w[0].gain_db >= level && w[1].gain_db < level)
        .ok_or(AnalysisError::NotBracketed { level_db: level })?;
    let (a, b) = (pts[idx], pts[idx + 1]);
    let frac = (a.gain_db - level) / (a.gain_db - b.gain_db);
    let (la, lb) = (a.f_hz.ln(), b.f_hz.ln());
    let f3db = (la + frac * (lb - la)).exp();

    let shifts = curve.phase_shift_deg();
    let phase_shift = shifts[idx] + frac * (shifts[idx + 1] - shifts[idx]);
    let non_monotonic = pts[idx + 2..].iter().any(|p| p.gain_db >= level);
    Ok(F3dbEstimate {
        f3db_hz: f3db,
        dc_gain_db,
        phase_shift_deg: phase_shift,
        non_monotonic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePoleFit {
    pub g_dc_db: f64,
    pub gbwp_hz: f64,
    pub noise_gain: f64,
    pub f_pole_hz: f64,
    pub rms_residual_db: f64,
    pub points_used: usize,
}

/// Sum of squared residuals and optimal DC gain for a given pole.
fn pole_cost(points: &[BodePoint], f_pole: f64) -> (f64, f64) {
    let drop = |f: f64| 10.0 * ((f / f_pole).powi(2)).ln_1p() / std::f64::consts::LN_10;
    let n = points.len() as f64;
    let g_dc = points.iter().map(|p| p.gain_db + drop(p.f_hz)).sum::<f64>() / n;
    let ss = points
        .iter()
        .map(|p| (p.gain_db + drop(p.f_hz) - g_dc).powi(2))
        .sum();
    (ss, g_dc)
}

/// Least-squares fit of `g_dc - 10·log10(1 + (f/fp)²)` to the points
/// within 20 dB of the DC reference. `gbwp = noise_gain · fp`.
pub fn fit_single_pole(curve: &BodeCurve, noise_gain: f64) -> Result<SinglePoleFit, AnalysisError> {
    if !(noise_gain.is_finite() && noise_gain >= 1.0) {
        return Err(AnalysisError::InvalidNoiseGain(noise_gain));
    }
    let dc = curve.dc_gain_db()?;
    let pts = curve.points();
    if pts.iter().all(|p| (p.gain_db - dc).abs() <= MIN_ROLLOFF_DB) {
        return Err(AnalysisError::InsufficientRolloff(format!(
            "all points within {MIN_ROLLOFF_DB} dB of the {dc:.3} dB DC gain"
        )));
    }
    let used: Vec<BodePoint> = pts
        .iter()
        .copied()
        .filter(|p| p.gain_db >= dc - FIT_WINDOW_DB)
        .collect();
    if used.len() < 3 {
        return Err(AnalysisError::InsufficientRolloff(format!(
            "only {} points within {FIT_WINDOW_DB} dB of DC",
            used.len()
        )));
    }

    // coarse log-spaced scan, then golden-section refinement
    let lo = (used[0].f_hz / 100.0).ln();
    let hi = (used[used.len() - 1].f_hz * 100.0).ln();
    const GRID: usize = 400;
    let u_at = |k: usize| lo + (hi - lo) * k as f64 / GRID as f64;
    let cost = |u: f64| pole_cost(&used, u.exp()).0;
    let best = (0..=GRID)
        .min_by(|&i, &j| cost(u_at(i)).total_cmp(&cost(u_at(j))))
        .unwrap();
    if best == 0 || best == GRID {
        return Err(AnalysisError::InsufficientRolloff(
            "pole lies outside the measured range".into(),
        ));
    }
    let (mut a, mut b) = (u_at(best - 1), u_at(best + 1));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    while (b - a).abs() > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = cost(d);
        }
    }
    let f_pole = ((a + b) / 2.0).exp();
    let (ss, g_dc) = pole_cost(&used, f_pole);
    Ok(SinglePoleFit {
        g_dc_db: g_dc,
        gbwp_hz: noise_gain * f_pole,
        noise_gain,
        f_pole_hz: f_pole,
        rms_residual_db: (ss / used.len() as f64).sqrt(),
        points_used: used.len(),
    })
}
