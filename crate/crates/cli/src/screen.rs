use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use opamp_screen::dataio::{
    component_db_append, read_current_column, read_thresholds, write_thresholds, ComponentRecord,
    ThresholdsFile,
};
use opamp_screen::screening::{
    classify_icc, delta_icc_test, fit_population, DEFAULT_MIN_DELTA_A, DEFAULT_USL_A,
};
use opamp_screen::PopulationStats;

use crate::params::{open_input, with_output};
use crate::{num, Status};

const MA: f64 = 1e-3;

#[derive(Debug, Subcommand)]
pub enum ScreenCmd {
    /// Fit LSL/USL thresholds from genuine and counterfeit I_CC samples
    Fit(FitArgs),
    /// Classify one part by its supply current
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Single-column CSV of genuine-part currents in mA (optional `icc_ma` header)
    #[arg(long)]
    genuine: PathBuf,
    /// Single-column CSV of counterfeit-part currents in mA
    #[arg(long)]
    counterfeit: PathBuf,
    /// Upper-side limit in mA (datasheet maximum)
    #[arg(long, default_value_t = DEFAULT_USL_A / MA)]
    usl_ma: f64,
    /// Thresholds JSON to write [default: stdout]
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Leave the fit time out of the thresholds file
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Thresholds JSON written by `screen fit`
    #[arg(long)]
    thresholds: PathBuf,
    /// Quiescent supply current (mA)
    #[arg(
        long,
        required_unless_present = "vdrop_mv",
        conflicts_with = "vdrop_mv"
    )]
    icc_ma: Option<f64>,
    /// Voltage across the supply sense resistor (mV); converted with --sense-ohms
    #[arg(long)]
    vdrop_mv: Option<f64>,
    /// Sense resistor used with --vdrop-mv (Ω)
    #[arg(long, default_value_t = 1.0)]
    sense_ohms: f64,
    /// Supply current while amplifying (mA); adds the ΔI_CC test
    #[arg(long)]
    icc_active_ma: Option<f64>,
    /// Smallest ΔI_CC counted as genuine (mA)
    #[arg(long, default_value_t = DEFAULT_MIN_DELTA_A / MA)]
    min_delta_ma: f64,
    /// Append the result to this component database
    #[arg(long, requires = "id")]
    db: Option<PathBuf>,
    /// Component id for --db
    #[arg(long, requires = "db")]
    id: Option<String>,
    /// Manufacturer printed on the package, for --db
    #[arg(long, default_value = "", requires = "db")]
    label: String,
    /// Date code printed on the package, for --db
    #[arg(long, default_value = "", requires = "db")]
    date_code: String,
}

pub fn run(cmd: ScreenCmd, out: &mut dyn Write) -> Result<Status> {
    match cmd {
        ScreenCmd::Fit(a) => fit(a, out),
        ScreenCmd::Classify(a) => classify(a, out),
    }
}

fn population(path: &Path, flag: &str) -> Result<PopulationStats> {
    let values = read_current_column(open_input(path)?, "icc_ma")
        .with_context(|| format!("--{flag} {}", path.display()))?;
    let amps: Vec<f64> = values.iter().map(|v| v * MA).collect();
    fit_population(&amps).with_context(|| format!("--{flag} {}", path.display()))
}

fn fit(a: FitArgs, out: &mut dyn Write) -> Result<Status> {
    let genuine = population(&a.genuine, "genuine")?;
    let counterfeit = population(&a.counterfeit, "counterfeit")?;
    if !(a.usl_ma.is_finite() && a.usl_ma > 0.0) {
        bail!("--usl-ma must be a positive number, got {}", a.usl_ma);
    }
    let fitted_at = (!a.no_timestamp)
        .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let file = ThresholdsFile::new(genuine, counterfeit, a.usl_ma * MA, fitted_at)
        .context("cannot derive thresholds from these populations")?;
    let to_file = a.output.is_some();
    with_output(a.output.as_ref(), out, |w| Ok(write_thresholds(&file, w)?))?;
    if to_file {
        writeln!(out, "k={}", num(file.k))?;
        writeln!(out, "lsl_ma={}", num(file.lsl_a / MA))?;
        writeln!(out, "usl_ma={}", num(file.usl_a / MA))?;
        writeln!(out, "tail_ppm={}", num(file.tail_ppm))?;
        for (name, p) in [
            ("genuine", &file.genuine),
            ("counterfeit", &file.counterfeit),
        ] {
            writeln!(out, "{name}_mean_ma={}", num(p.mean_a / MA))?;
            writeln!(out, "{name}_stddev_ma={}", num(p.stddev_a / MA))?;
            writeln!(out, "{name}_n={}", p.n)?;
        }
    }
    Ok(Status::Success)
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> Result<Status> {
    let th = read_thresholds(open_input(&a.thresholds)?)
        .with_context(|| format!("--thresholds {}", a.thresholds.display()))?;
    let icc_ma = match (a.icc_ma, a.vdrop_mv) {
        (Some(i), _) => i,
        (None, Some(mv)) => {
            if !(a.sense_ohms.is_finite() && a.sense_ohms > 0.0) {
                bail!(
                    "--sense-ohms must be a positive number, got {}",
                    a.sense_ohms
                );
            }
            mv / a.sense_ohms
        }
        (None, None) => bail!("one of --icc-ma or --vdrop-mv is required"),
    };
    if !(icc_ma.is_finite() && icc_ma >= 0.0) {
        bail!("supply current must be finite and >= 0 mA, got {icc_ma}");
    }
    let verdict = classify_icc(icc_ma * MA, &th.thresholds())?;
    writeln!(out, "verdict={}", verdict.kind)?;
    writeln!(out, "icc_ma={}", num(icc_ma))?;
    writeln!(out, "lsl_ma={}", num(verdict.lsl_a / MA))?;
    writeln!(out, "usl_ma={}", num(verdict.usl_a / MA))?;

    if let Some(active) = a.icc_active_ma {
        if !(active.is_finite() && active >= 0.0) {
            bail!("--icc-active-ma must be finite and >= 0, got {active}");
        }
        if !(a.min_delta_ma.is_finite() && a.min_delta_ma >= 0.0) {
            bail!(
                "--min-delta-ma must be finite and >= 0, got {}",
                a.min_delta_ma
            );
        }
        let outcome = delta_icc_test(icc_ma * MA, active * MA, a.min_delta_ma * MA)?;
        writeln!(out, "delta_icc_ma={}", num(active - icc_ma))?;
        writeln!(out, "delta_icc={}", outcome.as_str())?;
    }

    if let (Some(db), Some(id)) = (&a.db, &a.id) {
        let record = ComponentRecord {
            icc_quiescent_a: Some(icc_ma * MA).filter(|&v| v > 0.0),
            icc_active_a: a.icc_active_ma.map(|v| v * MA).filter(|&v| v > 0.0),
            verdict: Some(verdict.kind),
            ..ComponentRecord::new(id.clone(), a.label.clone(), a.date_code.clone())
        };
        component_db_append(db, &record).with_context(|| format!("--db {}", db.display()))?;
        writeln!(out, "recorded={id}")?;
    }

    Ok(if verdict.is_pass() {
        Status::Success
    } else {
        Status::Rejected
    })
}
