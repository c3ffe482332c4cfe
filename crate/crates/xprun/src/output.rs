use std::fs::File;
use std::io::Write;
use std::path::Path;

use holodfs::device::RwaReport;
use holodfs::holonomy::PopulationTrace;

use crate::error::{XpError, XpResult};
use crate::sweep::SweepRow;

pub const SWEEP_HEADER: [&str; 7] = ["protocol", "gate", "delta", "t2_us", "fidelity", "leakage", "wall_time_ms"];
pub const TRACE_HEADER: [&str; 3] = ["t_ns", "pop_0L", "pop_1L"];
pub const RWA_HEADER: [&str; 3] = ["t_ns", "p_full", "p_eff"];

/// Twelve significant digits, shortest of fixed and scientific notation
/// (the `%.12g` convention).
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> XpError {
    XpError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_table<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    write_table(
        out,
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            vec![
                r.protocol.as_str().to_string(),
                r.gate.as_str().to_string(),
                format_float(r.delta),
                format_float(r.t2_us),
                format_float(r.avg_gate_fidelity),
                format_float(r.leakage),
                format_float(r.wall_time_ms),
            ]
        }),
    )
}

pub fn write_trace_csv<W: Write>(trace: &PopulationTrace, out: W) -> csv::Result<()> {
    write_table(
        out,
        &TRACE_HEADER,
        (0..trace.times.len()).map(|k| {
            vec![
                format_float(trace.times[k]),
                format_float(trace.pop_0l[k]),
                format_float(trace.pop_1l[k]),
            ]
        }),
    )
}

pub fn write_rwa_csv<W: Write>(report: &RwaReport, out: W) -> csv::Result<()> {
    write_table(
        out,
        &RWA_HEADER,
        (0..report.times.len()).map(|k| {
            vec![
                format_float(report.times[k]),
                format_float(report.p_full[k]),
                format_float(report.p_eff[k]),
            ]
        }),
    )
}

fn create(path: &Path) -> XpResult<File> {
    File::create(path).map_err(|source| XpError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> XpResult<()> {
    write_sweep_csv(rows, create(path)?).map_err(|e| csv_error(path, e))
}

pub fn emit_trace_csv(trace: &PopulationTrace, path: &Path) -> XpResult<()> {
    write_trace_csv(trace, create(path)?).map_err(|e| csv_error(path, e))
}

pub fn emit_rwa_csv(report: &RwaReport, path: &Path) -> XpResult<()> {
    write_rwa_csv(report, create(path)?).map_err(|e| csv_error(path, e))
}

/// Parses a file written by [`emit_csv`].
pub fn read_sweep_csv(path: &Path) -> XpResult<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().ne(SWEEP_HEADER) {
        return Err(csv_error(path, format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let field = |i: usize| record.get(i).unwrap_or_default();
        let num = |i: usize| {
            field(i)
                .parse::<f64>()
                .map_err(|e| csv_error(path, format!("row {}: {}: {e}", line + 1, SWEEP_HEADER[i])))
        };
        rows.push(SweepRow {
            protocol: field(0).parse().map_err(|e| csv_error(path, e))?,
            gate: field(1).parse().map_err(|e| csv_error(path, e))?,
            delta: num(2)?,
            t2_us: num(3)?,
            avg_gate_fidelity: num(4)?,
            leakage: num(5)?,
            wall_time_ms: num(6)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(40.0), "40");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(0.999999999999999), "1");
        assert_eq!(format_float(2.0 / 3.0 * 1e-9), "6.66666666667e-10");
        assert_eq!(format_float(-1.5e14), "-1.5e14");
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(123456.7890123456), "123456.789012");
    }

    #[test]
    fn formatted_values_round_to_twelve_digits() {
        for x in [std::f64::consts::PI, 1e-7 / 7.0, 0.95185512345678, 7.123e20] {
            let y: f64 = format_float(x).parse().unwrap();
            assert!(((x - y) / x).abs() < 5e-12, "{x} -> {y}");
        }
    }

    #[test]
    fn header_only_for_empty_rows() {
        let mut buf = Vec::new();
        write_sweep_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "protocol,gate,delta,t2_us,fidelity,leakage,wall_time_ms\n");
    }
}
