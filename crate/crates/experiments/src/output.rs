//! CSV series, report summaries and comparison tables.
//!
//! CSV columns, in order:
//!
//! - `time`
//! - `s{m}_{x,y,z}`: `2⟨S^α_m⟩` for central spin `m = 1..M`
//! - `c{a}{b}_{αβ}`: `4⟨S^α_a S^β_b⟩` for the configured pair, `α, β` in x, y, z
//!   order, row-major
//! - `entropy_q`: `1 − Tr ρ_S²`
//! - `rho_{pattern}`: diagonal of `ρ_S`, one column per central basis state,
//!   where the pattern lists spins `1..M` as `u` (up) or `d` (down)
//! - `rho12_re`, `rho12_im`: `⟨↑↓|ρ_S|↓↑⟩`, only with two central spins
//!
//! Floats are written in the shortest form that parses back to the same
//! value.

use std::io::Write;
use std::path::Path;

use spinbath_core::observables::ObservableRecord;
use spinbath_core::Axis;

use crate::compare::Comparison;
use crate::error::{ExperimentError, Result};
use crate::runner::RunReport;

fn basis_pattern(index: usize, central: usize) -> String {
    (0..central).map(|m| if index >> m & 1 == 0 { 'u' } else { 'd' }).collect()
}

pub fn csv_header(central: usize, pair: [usize; 2], with_rho12: bool) -> Vec<String> {
    let mut h = vec!["time".to_string()];
    for m in 0..central {
        h.extend(Axis::ALL.map(|a| format!("s{}_{}", m + 1, a.label())));
    }
    for a in Axis::ALL {
        for b in Axis::ALL {
            h.push(format!("c{}{}_{}{}", pair[0] + 1, pair[1] + 1, a.label(), b.label()));
        }
    }
    h.push("entropy_q".into());
    h.extend((0..1usize << central).map(|i| format!("rho_{}", basis_pattern(i, central))));
    if with_rho12 {
        h.extend(["rho12_re".into(), "rho12_im".into()]);
    }
    h
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

pub fn csv_row(r: &ObservableRecord) -> Vec<String> {
    let mut row = vec![fmt(r.time)];
    row.extend(r.spin.iter().flatten().map(|&x| fmt(x)));
    row.extend(r.correlators.iter().map(|&x| fmt(x)));
    row.push(fmt(r.entropy_q));
    row.extend(r.rho_diag.iter().map(|&x| fmt(x)));
    if let Some(c) = r.rho12 {
        row.extend([fmt(c.re), fmt(c.im)]);
    }
    row
}

/// Writes the series of `report` as CSV.
pub fn write_csv<W: Write>(report: &RunReport, out: W) -> Result<()> {
    let central = report.final_rho.dim().trailing_zeros() as usize;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(central, report.config.observables.correlator_pair, central == 2))?;
    for r in &report.series {
        w.write_record(csv_row(r))?;
    }
    w.flush().map_err(|e| ExperimentError::io("<csv>", e))?;
    Ok(())
}

pub fn csv_string(report: &RunReport) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(report, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is ASCII"))
}

pub fn emit_csv(report: &RunReport, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| ExperimentError::io(path, e))?;
    write_csv(report, std::io::BufWriter::new(file))
}

/// Everything in the report except the series, as TOML.
pub fn summary_toml(report: &RunReport) -> Result<String> {
    Ok(toml::to_string(report)?)
}

/// Wide CSV to long `(time, observable, value)` rows, optionally keeping only
/// the named columns.
pub fn reshape_long<R: std::io::Read, W: Write>(input: R, output: W, columns: &[String]) -> Result<()> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.get(0) != Some("time") {
        return Err(ExperimentError::invalid("plot-data", "first column must be `time`"));
    }
    for c in columns {
        if !headers.iter().any(|h| h == c) {
            return Err(ExperimentError::invalid("plot-data", format!("no column named `{c}`")));
        }
    }
    let keep: Vec<usize> =
        (1..headers.len()).filter(|&i| columns.is_empty() || columns.iter().any(|c| c == &headers[i])).collect();
    let mut w = csv::Writer::from_writer(output);
    w.write_record(["time", "observable", "value"])?;
    for rec in r.records() {
        let rec = rec?;
        for &i in &keep {
            w.write_record([&rec[0], &headers[i], &rec[i]])?;
        }
    }
    w.flush().map_err(|e| ExperimentError::io("<csv>", e))?;
    Ok(())
}

fn sci(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.2e}"))
}

/// Comparison table: step, error, cutoff, operation counts and timings per run.
pub fn comparison_table(cmp: &Comparison) -> String {
    let sched = &cmp.reference.config.schedule;
    let unit = sched.time_unit();
    let leaps = match *sched {
        crate::config::Schedule::OneLeap { leap, steps, .. } => format!("T={leap}u  t_max={steps}T"),
        crate::config::Schedule::TwoLeap { long_leap, short_leap, short_count, repeats, .. } => {
            format!("T1={long_leap}u T2={short_leap}u n2={short_count} n_tot={repeats}")
        }
    };
    let mut s = format!("schedule: {leaps} (u = {unit})\n");
    s += &format!(
        "{:<5} {:>8} {:>10} {:>10} {:>14} {:>16} {:>10} {:>10}\n",
        "run", "dt", "delta", "epsilon", "native ops", "term ops", "setup s", "run s"
    );
    for r in [&cmp.reference, &cmp.candidate, &cmp.baseline] {
        s += &format!(
            "{:<5} {:>8} {:>10} {:>10} {:>14} {:>16} {:>10.3} {:>10.3}\n",
            r.propagator.label(),
            r.propagator.trotter_dt(sched).map_or_else(|| "-".into(), |d| format!("{d}")),
            sci(r.delta),
            sci(r.propagator.epsilon()),
            r.counts.native(),
            r.counts.term_operations(),
            r.setup_seconds,
            r.propagate_seconds + r.measure_seconds,
        );
    }
    s += &format!("count ratio (baseline/candidate native ops): {}\n", sci(cmp.count_ratio));
    s += &format!("work ratio (baseline/candidate term ops): {}\n", sci(cmp.work_ratio));
    s
}
