use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use opamp_screen::dataio::read_component_db;
use opamp_screen::VerdictKind;

use crate::params::open_input;
use crate::{num, Status};

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Component database (one JSON record per line)
    #[arg(long)]
    db: PathBuf,
}

/// Prints verdict counts as key=value lines followed by a tab-separated
/// table with one row per record, in file order.
pub fn run(a: ReportArgs, out: &mut dyn Write) -> Result<Status> {
    let records = read_component_db(open_input(&a.db)?)
        .with_context(|| format!("--db {}", a.db.display()))?;
    for kind in VerdictKind::ALL {
        let n = records.iter().filter(|r| r.verdict == Some(kind)).count();
        writeln!(out, "{kind}={n}")?;
    }
    let unclassified = records.iter().filter(|r| r.verdict.is_none()).count();
    writeln!(out, "unclassified={unclassified}")?;
    writeln!(out, "total={}", records.len())?;

    let ma = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |a| num(a * 1e3));
    writeln!(out, "id\tverdict\ticc_ma\ticc_active_ma\tlabel\tdate_code")?;
    for r in &records {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.id,
            r.verdict.map_or("-", VerdictKind::as_str),
            ma(r.icc_quiescent_a),
            ma(r.icc_active_a),
            r.label_manufacturer,
            r.date_code,
        )?;
    }
    Ok(Status::Success)
}
