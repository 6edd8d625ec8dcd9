use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use opamp_screen::analysis::{
    extract_f3db, extract_slew_rate, extract_vom, fit_single_pole, ramp_distortion_score,
    RAMP_DISTORTION_THRESHOLD,
};
use opamp_screen::dataio::{read_sweep_csv, read_waveform_csv};

use crate::params::open_input;
use crate::{num, Status};

#[derive(Debug, Subcommand)]
pub enum AnalyzeCmd {
    /// -3 dB frequency and single-pole GBWP of a sweep CSV
    Sweep(SweepArgs),
    /// Slew rate, distortion or output swing of a waveform CSV
    Waveform(WaveformArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Noise gain of the measured configuration (G+1 inverting, G noninverting)
    #[arg(long)]
    noise_gain: f64,
    file: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// 10-90 % slew rate of a square-wave response
    Slew,
    /// Harmonic distortion score at --freq
    Distortion,
    /// Output swing limits of a clipped response
    Vom,
}

#[derive(Debug, Args)]
pub struct WaveformArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Stimulus frequency (Hz), needed for --kind distortion
    #[arg(long)]
    freq: Option<f64>,
    file: PathBuf,
}

pub fn run(cmd: AnalyzeCmd, out: &mut dyn Write) -> Result<Status> {
    match cmd {
        AnalyzeCmd::Sweep(a) => sweep(a, out),
        AnalyzeCmd::Waveform(a) => waveform(a, out),
    }
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> Result<Status> {
    if !(a.noise_gain.is_finite() && a.noise_gain >= 1.0) {
        bail!("--noise-gain must be >= 1, got {}", a.noise_gain);
    }
    let curve =
        read_sweep_csv(open_input(&a.file)?).with_context(|| format!("{}", a.file.display()))?;
    let f3 = extract_f3db(&curve)?;
    let fit = fit_single_pole(&curve, a.noise_gain)?;
    writeln!(out, "f3db_hz={}", num(f3.f3db_hz))?;
    writeln!(out, "dc_gain_db={}", num(f3.dc_gain_db))?;
    writeln!(out, "phase_shift_at_f3db_deg={}", num(f3.phase_shift_deg))?;
    if f3.non_monotonic {
        writeln!(out, "f3db_warning=non_monotonic")?;
    }
    writeln!(out, "gbwp_hz={}", num(fit.gbwp_hz))?;
    writeln!(out, "g_dc_db={}", num(fit.g_dc_db))?;
    writeln!(out, "f3db_model_hz={}", num(fit.f_pole_hz))?;
    writeln!(out, "fit_rms_db={}", num(fit.rms_residual_db))?;
    writeln!(out, "fit_points={}", fit.points_used)?;
    Ok(Status::Success)
}

fn waveform(a: WaveformArgs, out: &mut dyn Write) -> Result<Status> {
    if a.kind == Kind::Distortion && a.freq.is_none() {
        bail!("--freq is required with --kind distortion");
    }
    let wave =
        read_waveform_csv(open_input(&a.file)?).with_context(|| format!("{}", a.file.display()))?;
    match a.kind {
        Kind::Slew => {
            let sr = extract_slew_rate(&wave)?;
            writeln!(out, "sr_v_per_us={}", num(sr.combined_v_per_s / 1e6))?;
            if let Some(r) = sr.rising_v_per_s {
                writeln!(out, "sr_rise_v_per_us={}", num(r / 1e6))?;
            }
            if let Some(f) = sr.falling_v_per_s {
                writeln!(out, "sr_fall_v_per_us={}", num(f / 1e6))?;
            }
            writeln!(out, "rising_edges={}", sr.rising_edges)?;
            writeln!(out, "falling_edges={}", sr.falling_edges)?;
        }
        Kind::Distortion => {
            let thd = ramp_distortion_score(&wave, a.freq.unwrap_or_default())?;
            writeln!(out, "thd={}", num(thd))?;
            writeln!(out, "ramp_like={}", thd > RAMP_DISTORTION_THRESHOLD)?;
        }
        Kind::Vom => {
            let (pos, neg) = extract_vom(&wave)?;
            writeln!(out, "vom_pos_v={}", num(pos))?;
            writeln!(out, "vom_neg_v={}", num(neg))?;
        }
    }
    Ok(Status::Success)
}
