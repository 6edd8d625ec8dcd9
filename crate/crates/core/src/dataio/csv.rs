use std::io::{Read, Write};

use super::{format_sig9, round_sig9, DataError};
use crate::analysis::{BodeCurve, BodePoint};
use crate::model::Waveform;

pub const WAVEFORM_HEADER: &str = "time_s,voltage_v";
pub const SWEEP_HEADER: &str = "freq_hz,gain_db,phase_deg";

/// Maximum deviation of any sample interval from the median interval.
const UNIFORM_TOLERANCE: f64 = 1e-3;
/// Largest time stamp, in sample intervals, that 9 significant digits still
/// resolve well inside the uniformity tolerance.
const MAX_TIME_IN_INTERVALS: f64 = 1e5;

fn read_text(mut source: impl Read) -> Result<String, DataError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    Ok(text)
}

/// Numbered lines with a trailing `\r` stripped.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
}

fn parse_cell(cell: &str, line: usize, column: usize) -> Result<f64, DataError> {
    let v: f64 = cell.trim().parse().map_err(|_| DataError::BadNumber {
        line,
        column,
        message: format!("'{cell}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(DataError::BadNumber {
            line,
            column,
            message: format!("'{cell}' is not finite"),
        });
    }
    Ok(v)
}

/// Parses header + rows of exactly `N` numeric cells.
fn parse_table<const N: usize>(
    text: &str,
    header: &'static str,
) -> Result<Vec<(usize, [f64; N])>, DataError> {
    let mut lines = numbered_lines(text);
    match lines.next() {
        Some((_, h)) if h.trim_start_matches('\u{feff}').trim() == header => {}
        Some((line, h)) => {
            return Err(DataError::MissingHeader {
                line,
                expected: header,
                found: h.to_string(),
            })
        }
        None => {
            return Err(DataError::MissingHeader {
                line: 1,
                expected: header,
                found: String::new(),
            })
        }
    }
    let mut rows = Vec::new();
    for (line, l) in lines {
        let cells: Vec<&str> = l.split(',').collect();
        if cells.len() != N {
            return Err(DataError::ColumnCount {
                line,
                expected: N,
                found: cells.len(),
            });
        }
        let mut row = [0.0; N];
        for (c, cell) in cells.iter().enumerate() {
            row[c] = parse_cell(cell, line, c + 1)?;
        }
        rows.push((line, row));
    }
    Ok(rows)
}

/// Sample interval that regenerates every time stamp under 9-digit
/// rounding, searched among the 9-digit decimals closest to the mean
/// interval. The search covers the uncertainty the rounded time column
/// leaves on the mean; the mean itself is used if nothing regenerates.
fn recover_interval(t0: f64, times: &[f64]) -> f64 {
    let n = times.len();
    let mean = (times[n - 1] - t0) / (n - 1) as f64;
    let base = round_sig9(mean);
    let digit = |x: f64| 10f64.powi(x.abs().log10().floor() as i32 - 8);
    let unit = digit(base);
    let t_max = t0.abs().max(times[n - 1].abs());
    let span = (digit(t_max) / ((n - 1) as f64 * unit)).ceil().min(1e6) as i32 + 1;
    let regenerates = |dt: f64| {
        times
            .iter()
            .enumerate()
            .all(|(i, &t)| round_sig9(t0 + i as f64 * dt) == t)
    };
    std::iter::once(0i32)
        .chain((1..=span).flat_map(|k| [k, -k]))
        .map(|k| round_sig9(base + k as f64 * unit))
        .find(|&dt| dt > 0.0 && regenerates(dt))
        .unwrap_or(mean)
}

/// Reads a `time_s,voltage_v` capture. Times must increase strictly and be
/// uniformly spaced (every interval within 0.1 % of the median); nothing is
/// resampled.
pub fn read_waveform_csv(source: impl Read) -> Result<Waveform, DataError> {
    let text = read_text(source)?;
    let rows = parse_table::<2>(&text, WAVEFORM_HEADER)?;
    if rows.len() < 2 {
        return Err(DataError::TooFewRows {
            line: rows.last().map_or(1, |r| r.0),
            found: rows.len(),
            min: 2,
        });
    }
    for w in rows.windows(2) {
        if w[1].1[0] <= w[0].1[0] {
            return Err(DataError::NonIncreasingTime {
                line: w[1].0,
                time_s: w[1].1[0],
            });
        }
    }
    let mut intervals: Vec<f64> = rows.windows(2).map(|w| w[1].1[0] - w[0].1[0]).collect();
    let mut sorted = intervals.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    for (i, dt) in intervals.drain(..).enumerate() {
        if (dt - median).abs() > UNIFORM_TOLERANCE * median {
            return Err(DataError::NonUniform {
                line: rows[i + 1].0,
                interval_s: dt,
                median_s: median,
            });
        }
    }
    let times: Vec<f64> = rows.iter().map(|r| r.1[0]).collect();
    let t0 = times[0];
    let dt = recover_interval(t0, &times);
    let samples = rows.into_iter().map(|r| r.1[1]).collect();
    Ok(Waveform::new(dt, t0, samples)?)
}

/// Writes the canonical form: 9 significant digits, LF endings. Time
/// stamps are regenerated from the rounded start time and interval.
/// Captures whose time stamps exceed 1e5 sample intervals are rejected,
/// since their time column would not read back as uniform.
pub fn write_waveform_csv(wave: &Waveform, mut sink: impl Write) -> Result<(), DataError> {
    let t0 = round_sig9(wave.t0_s());
    let dt = round_sig9(wave.dt_s());
    let t_max = t0.abs().max((t0 + (wave.len() - 1) as f64 * dt).abs());
    if t_max > MAX_TIME_IN_INTERVALS * dt {
        return Err(DataError::TimeResolution {
            t_max_s: t_max,
            dt_s: dt,
        });
    }
    let mut out = String::with_capacity(24 * (wave.len() + 1));
    out.push_str(WAVEFORM_HEADER);
    out.push('\n');
    for (i, &v) in wave.samples().iter().enumerate() {
        out.push_str(&format_sig9(t0 + i as f64 * dt));
        out.push(',');
        out.push_str(&format_sig9(v));
        out.push('\n');
    }
    sink.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads a `freq_hz,gain_db,phase_deg` sweep; frequencies must be
/// positive and strictly increasing.
pub fn read_sweep_csv(source: impl Read) -> Result<BodeCurve, DataError> {
    let text = read_text(source)?;
    let rows = parse_table::<3>(&text, SWEEP_HEADER)?;
    for (line, r) in &rows {
        if r[0] <= 0.0 {
            return Err(DataError::BadNumber {
                line: *line,
                column: 1,
                message: format!("frequency {} Hz is not positive", r[0]),
            });
        }
    }
    for w in rows.windows(2) {
        let (line, f) = (w[1].0, w[1].1[0]);
        if f == w[0].1[0] {
            return Err(DataError::DuplicateFrequency { line, f_hz: f });
        }
        if f < w[0].1[0] {
            return Err(DataError::NonIncreasingFrequency { line, f_hz: f });
        }
    }
    let points = rows
        .into_iter()
        .map(|(_, r)| BodePoint {
            f_hz: r[0],
            gain_db: r[1],
            phase_deg: r[2],
        })
        .collect();
    Ok(BodeCurve::new(points)?)
}

pub fn write_sweep_csv(curve: &BodeCurve, mut sink: impl Write) -> Result<(), DataError> {
    let mut out = String::with_capacity(40 * (curve.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for p in curve.points() {
        out.push_str(&format_sig9(p.f_hz));
        out.push(',');
        out.push_str(&format_sig9(p.gain_db));
        out.push(',');
        out.push_str(&format_sig9(p.phase_deg));
        out.push('\n');
    }
    sink.write_all(out.as_bytes())?;
    Ok(())
}

/// Single-column list of values, optionally preceded by a header line
/// equal to `header`. Values are returned as written.
pub fn read_current_column(source: impl Read, header: &str) -> Result<Vec<f64>, DataError> {
    let text = read_text(source)?;
    let mut values = Vec::new();
    for (line, l) in numbered_lines(&text) {
        if line == 1 && l.trim_start_matches('\u{feff}').trim() == header {
            continue;
        }
        let cells: Vec<&str> = l.split(',').collect();
        if cells.len() != 1 {
            return Err(DataError::ColumnCount {
                line,
                expected: 1,
                found: cells.len(),
            });
        }
        values.push(parse_cell(cells[0], line, 1)?);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read_wave(s: &str) -> Result<Waveform, DataError> {
        read_waveform_csv(s.as_bytes())
    }

    #[test]
    fn minimal_waveform() {
        let w = read_wave("time_s,voltage_v\n0,0\n1e-6,1\n").unwrap();
        assert_eq!(w.dt_s(), 1e-6);
        assert_eq!(w.t0_s(), 0.0);
        assert_eq!(w.samples(), &[0.0, 1.0]);
    }

    #[test]
    fn crlf_accepted() {
        let w = read_wave("time_s,voltage_v\r\n0,0\r\n1e-6,1\r\n").unwrap();
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn malformed_row_names_line_and_columns() {
        let e = read_wave("time_s,voltage_v\n1,2,3\n").unwrap_err();
        assert!(matches!(
            e,
            DataError::ColumnCount {
                line: 2,
                expected: 2,
                found: 3
            }
        ));
        assert!(e.to_string().contains("line 2"));
        assert!(e.to_string().contains('3'));
    }

    #[test]
    fn waveform_errors() {
        assert!(matches!(
            read_wave("t,v\n0,0\n1,1\n"),
            Err(DataError::MissingHeader { line: 1, .. })
        ));
        assert!(matches!(
            read_wave(""),
            Err(DataError::MissingHeader { .. })
        ));
        assert!(matches!(
            read_wave("time_s,voltage_v\n0,0\n1,abc\n"),
            Err(DataError::BadNumber {
                line: 3,
                column: 2,
                ..
            })
        ));
        assert!(matches!(
            read_wave("time_s,voltage_v\n0,0\n"),
            Err(DataError::TooFewRows { .. })
        ));
        assert!(matches!(
            read_wave("time_s,voltage_v\n0,0\n1,1\n0.5,1\n"),
            Err(DataError::NonIncreasingTime { line: 4, .. })
        ));
        assert!(matches!(
            read_wave("time_s,voltage_v\n0,0\n1,1\n2,1\n3.1,0\n"),
            Err(DataError::NonUniform { line: 5, .. })
        ));
        assert!(matches!(
            read_wave("time_s,voltage_v\n0,0\n1,nan\n"),
            Err(DataError::BadNumber { line: 3, .. })
        ));
        assert!(matches!(
            read_wave("time_s,voltage_v\n0,0\n\n2,1\n"),
            Err(DataError::ColumnCount { line: 3, .. })
        ));
    }

    #[test]
    fn writer_uses_lf_and_header() {
        let w = Waveform::new(1e-6, 0.0, vec![0.0, 1.0, -2.5]).unwrap();
        let mut buf = Vec::new();
        write_waveform_csv(&w, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "time_s,voltage_v\n0e0,0e0\n1e-6,1e0\n2e-6,-2.5e0\n");
        assert!(!s.contains('\r'));
    }

    #[test]
    fn sweep_structure_and_duplicates() {
        let c = BodeCurve::new(
            [
                (10.0, 26.0, 180.0),
                (100.0, 26.0, 179.9),
                (1e3, 25.9, 178.0),
            ]
            .iter()
            .map(|&(f, g, p)| BodePoint {
                f_hz: f,
                gain_db: g,
                phase_deg: p,
            })
            .collect(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&c, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 4);
        assert!(s.ends_with('\n'));

        let e = read_sweep_csv("freq_hz,gain_db,phase_deg\n10,1,0\n20,1,0\n20,0,0\n".as_bytes())
            .unwrap_err();
        assert!(matches!(e, DataError::DuplicateFrequency { line: 4, f_hz } if f_hz == 20.0));
        assert!(e.to_string().contains("20"));
        assert!(matches!(
            read_sweep_csv("freq_hz,gain_db,phase_deg\n10,1,0\n5,1,0\n".as_bytes()),
            Err(DataError::NonIncreasingFrequency { line: 3, .. })
        ));
        assert!(matches!(
            read_sweep_csv("freq_hz,gain_db,phase_deg\n0,1,0\n".as_bytes()),
            Err(DataError::BadNumber { line: 2, .. })
        ));
    }

    #[test]
    fn current_column() {
        let v = read_current_column("icc_ma\n1.8\n1.9\n".as_bytes(), "icc_ma").unwrap();
        assert_eq!(v, vec![1.8, 1.9]);
        let v = read_current_column("1.8\n1.9\n".as_bytes(), "icc_ma").unwrap();
        assert_eq!(v.len(), 2);
        assert!(matches!(
            read_current_column("icc_ma\n1.8\nx\n".as_bytes(), "icc_ma"),
            Err(DataError::BadNumber { line: 3, .. })
        ));
        assert!(matches!(
            read_current_column("1.8,2\n".as_bytes(), "icc_ma"),
            Err(DataError::ColumnCount { line: 1, .. })
        ));
    }
}
