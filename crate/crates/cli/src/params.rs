use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use opamp_screen::{AmpConfig, OpAmpModel, Topology};

/// Headroom between the supply and the output swing when `--vom-v` is not
/// given (13.5 V on ±15 V).
const DEFAULT_HEADROOM_V: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Genuine,
    Counterfeit,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Start from a characterized part; explicit flags override it
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Gain-bandwidth product (Hz)
    #[arg(long)]
    pub gbwp_hz: Option<f64>,
    /// Slew rate (V/µs)
    #[arg(long)]
    pub sr_v_per_us: Option<f64>,
    /// Symmetric output swing limit (V) [default: supply minus 1.5 V]
    #[arg(long)]
    pub vom_v: Option<f64>,
    /// Open-loop DC gain (dB) [default: 100]
    #[arg(long)]
    pub a0_db: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    #[arg(long, default_value = "inverting", value_parser = parse_topology)]
    pub topology: Topology,
    /// Closed-loop gain magnitude
    #[arg(long, default_value_t = 20.0)]
    pub gain: f64,
    /// Symmetric supply magnitude (V)
    #[arg(long, default_value_t = 15.0)]
    pub supply_v: f64,
}

fn parse_topology(s: &str) -> Result<Topology, String> {
    s.parse()
}

impl ConfigArgs {
    pub fn config(&self) -> Result<AmpConfig> {
        let cfg = AmpConfig {
            topology: self.topology,
            gain_magnitude: self.gain,
            supply_v: self.supply_v,
        };
        cfg.validate()
            .context("invalid --topology/--gain/--supply-v")?;
        Ok(cfg)
    }
}

impl ModelArgs {
    /// Builds the model; without a preset, `--gbwp-hz` is mandatory when
    /// `need_gbwp` is set and otherwise falls back to the genuine part.
    pub fn model(&self, cfg: &AmpConfig, need_gbwp: bool) -> Result<OpAmpModel> {
        let mut m = match self.preset {
            Some(Preset::Genuine) => OpAmpModel::genuine_tl074(),
            Some(Preset::Counterfeit) => OpAmpModel::counterfeit_tl074(),
            None if need_gbwp && self.gbwp_hz.is_none() => {
                bail!("--gbwp-hz is required unless --preset is given")
            }
            None => OpAmpModel {
                label: "custom".to_string(),
                ..OpAmpModel::genuine_tl074()
            },
        };
        if let Some(g) = self.gbwp_hz {
            if !(g.is_finite() && g > 0.0) {
                bail!("--gbwp-hz must be a positive number, got {g}");
            }
            m.gbwp_hz = g;
        }
        if let Some(sr) = self.sr_v_per_us {
            if !(sr.is_finite() && sr > 0.0) {
                bail!("--sr-v-per-us must be a positive number, got {sr}");
            }
            m.sr_v_per_s = sr * 1e6;
        }
        let vom = match self.vom_v {
            Some(v) if !(v.is_finite() && v > 0.0) => {
                bail!("--vom-v must be a positive number, got {v}")
            }
            Some(v) if v > cfg.supply_v => {
                bail!(
                    "--vom-v ({v}) must not exceed --supply-v ({})",
                    cfg.supply_v
                )
            }
            Some(v) => v,
            None if cfg.supply_v > DEFAULT_HEADROOM_V => cfg.supply_v - DEFAULT_HEADROOM_V,
            None => bail!(
                "--supply-v {} leaves no output swing; pass --vom-v explicitly",
                cfg.supply_v
            ),
        };
        m.vom_pos_v = vom;
        m.vom_neg_v = -vom;
        if let Some(a0) = self.a0_db {
            m.a0_db = a0;
        }
        m.validate().context("invalid model parameters")?;
        if cfg.noise_gain() >= m.a0_linear() {
            bail!(
                "--gain {} needs more open-loop gain than --a0-db {} provides",
                cfg.gain_magnitude,
                m.a0_db
            );
        }
        Ok(m)
    }
}

pub fn open_input(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// Runs `write` against the file at `path`, or stdout when `path` is None.
pub fn with_output(
    path: Option<&PathBuf>,
    stdout: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            let mut w = BufWriter::new(f);
            write(&mut w)?;
            w.flush()
                .with_context(|| format!("cannot write {}", p.display()))?;
            Ok(())
        }
        None => write(stdout),
    }
}
