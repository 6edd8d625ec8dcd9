use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use opamp_screen::analysis::bode_from_pairs;
use opamp_screen::dataio::{
    log_frequencies, synth_capture, synth_capture_pairs, synth_sweep, write_sweep_csv,
    write_waveform_csv, Stimulus, SynthSpec,
};

use crate::params::{with_output, ConfigArgs, ModelArgs};
use crate::{num, Status};

#[derive(Debug, Subcommand)]
pub enum SimulateCmd {
    /// Closed-loop frequency sweep, written as a sweep CSV
    Bode(BodeArgs),
    /// Time-domain response to a sine or square stimulus, written as a
    /// waveform CSV
    Transient(TransientArgs),
}

#[derive(Debug, Args)]
pub struct BodeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// First sweep frequency (Hz)
    #[arg(long, default_value_t = 10.0)]
    f_start: f64,
    /// Last sweep frequency (Hz)
    #[arg(long, default_value_t = 6e6)]
    f_stop: f64,
    #[arg(long, default_value_t = 20)]
    points_per_decade: usize,
    /// Measure each point from a simulated transient capture instead of
    /// evaluating the small-signal response
    #[arg(long)]
    transient: bool,
    /// Stimulus amplitude for --transient (Vp-p)
    #[arg(long, default_value_t = 1.0, requires = "transient")]
    vpp: f64,
    /// Output sweep CSV [default: stdout]
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransientArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    config: ConfigArgs,
    /// Stimulus as kind:freq_hz:vpp, kind being sine or square
    #[arg(long, default_value = "sine:20e3:1.0")]
    stim: Stimulus,
    /// Cycles written to the output
    #[arg(long, default_value_t = 8)]
    cycles: usize,
    /// Leading cycles simulated but not written
    #[arg(long, default_value_t = 0)]
    settle_cycles: usize,
    #[arg(long, default_value_t = 256)]
    samples_per_cycle: usize,
    /// Peak-to-peak width of uniform noise added to the output (V)
    #[arg(long, default_value_t = 0.0)]
    noise_vpp: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output waveform CSV [default: stdout]
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the stimulus waveform here
    #[arg(long)]
    input_out: Option<PathBuf>,
}

pub fn run(cmd: SimulateCmd, out: &mut dyn Write) -> Result<Status> {
    match cmd {
        SimulateCmd::Bode(a) => bode(a, out),
        SimulateCmd::Transient(a) => transient(a, out),
    }
}

fn bode(a: BodeArgs, out: &mut dyn Write) -> Result<Status> {
    let cfg = a.config.config()?;
    let model = a.model.model(&cfg, true)?;
    if !(a.f_start.is_finite() && a.f_start > 0.0) {
        bail!("--f-start must be a positive number, got {}", a.f_start);
    }
    if !(a.f_stop.is_finite() && a.f_stop > a.f_start) {
        bail!("--f-stop must exceed --f-start, got {}", a.f_stop);
    }
    if a.points_per_decade == 0 {
        bail!("--points-per-decade must be at least 1");
    }
    let freqs = log_frequencies(a.f_start, a.f_stop, a.points_per_decade)?;
    let curve = if a.transient {
        if !(a.vpp.is_finite() && a.vpp > 0.0) {
            bail!("--vpp must be a positive number, got {}", a.vpp);
        }
        let base = SynthSpec {
            settle_cycles: 40,
            ..SynthSpec::new(Stimulus::Sine {
                freq_hz: a.f_start,
                vpp: a.vpp,
            })
        };
        let pairs = synth_capture_pairs(&model, &cfg, &freqs, a.vpp, &base)?;
        bode_from_pairs(&pairs).context("sweep measurement failed")?
    } else {
        synth_sweep(&model, &cfg, &freqs)?
    };
    let to_file = a.output.is_some();
    with_output(a.output.as_ref(), out, |w| Ok(write_sweep_csv(&curve, w)?))?;
    if to_file {
        writeln!(out, "points={}", curve.len())?;
        writeln!(out, "f3db_model_hz={}", num(cfg.closed_loop_f3db(&model)))?;
    }
    Ok(Status::Success)
}

fn transient(a: TransientArgs, out: &mut dyn Write) -> Result<Status> {
    let cfg = a.config.config()?;
    let model = a.model.model(&cfg, false)?;
    let spec = SynthSpec {
        stimulus: a.stim,
        cycles: a.cycles,
        settle_cycles: a.settle_cycles,
        samples_per_cycle: a.samples_per_cycle,
        noise_vpp: a.noise_vpp,
        seed: a.seed,
    };
    let cap = synth_capture(&model, &cfg, &spec)
        .context("check --stim, --cycles, --samples-per-cycle and --noise-vpp")?;
    if let Some(p) = &a.input_out {
        with_output(Some(p), out, |w| Ok(write_waveform_csv(&cap.input, w)?))?;
    }
    let to_file = a.output.is_some();
    with_output(a.output.as_ref(), out, |w| {
        Ok(write_waveform_csv(&cap.output, w)?)
    })?;
    if to_file {
        writeln!(out, "samples={}", cap.output.len())?;
        writeln!(out, "dt_s={}", num(cap.output.dt_s()))?;
        writeln!(out, "output_vpp={}", num(cap.output.peak_to_peak()))?;
    }
    Ok(Status::Success)
}
