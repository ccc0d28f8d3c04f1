//! Deterministic CSV and human-readable summaries for run reports.

use haarlab::report::{fmt_f64, Record, Status};

use crate::runner::RunReport;

pub const CSV_HEADER: &str = "scenario,group,analysis,check,status,value,bound,margin,tol,lo,hi,note";

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Unresolved => "unresolved",
        Status::Refused => "refused",
        Status::Info => "info",
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn record_row(r: &Record) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        csv_escape(&r.scenario),
        csv_escape(&r.group),
        csv_escape(&r.analysis),
        csv_escape(&r.check),
        status_str(r.status),
        fmt_f64(r.value),
        fmt_f64(r.bound),
        fmt_f64(r.margin),
        fmt_f64(r.tol),
        fmt_f64(r.lo),
        fmt_f64(r.hi),
        csv_escape(&r.note),
    )
}

pub fn records_csv(records: &[Record]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&record_row(r));
        out.push('\n');
    }
    out
}

pub fn summary(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "scenario {} (seed {}, resolution {} cells/unit, haarlab {})\n",
        report.scenario,
        report.seed,
        report.resolution,
        env!("CARGO_PKG_VERSION")
    ));
    out.push_str(&format!(
        "records: {} pass, {} fail, {} unresolved, {} refused\n",
        report.pass, report.fail, report.unresolved, report.refused
    ));
    for r in &report.records {
        if r.status == Status::Fail || r.status == Status::Refused || r.status == Status::Unresolved
        {
            out.push_str(&format!(
                "  [{}] {} / {} value={} bound={} tol={} {}\n",
                status_str(r.status),
                r.analysis,
                r.check,
                fmt_f64(r.value),
                fmt_f64(r.bound),
                fmt_f64(r.tol),
                r.note
            ));
        }
    }
    out
}

/// Long-format convergence table across refinement levels.
pub fn sweep_csv(rows: &[(u32, usize, Record)]) -> String {
    let mut out = String::from("level,resolution,");
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (level, res, r) in rows {
        out.push_str(&format!("{level},{res},"));
        out.push_str(&record_row(r));
        out.push('\n');
    }
    out
}
