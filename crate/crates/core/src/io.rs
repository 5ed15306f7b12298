//! CSV and JSON renderings of results. All output is plain text with `f64`
//! printed in shortest round-trip form, so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::derivative::{OperatorMatrix, Spectrum};
use crate::error::{Error, Result};
use crate::invariant::InvariantProfile;
use crate::reconstruct::{StabilityReport, TraceEntry};

/// Columns `phi,I_r,m,p`, one row per grid point.
pub fn profile_csv(profile: &InvariantProfile) -> String {
    let m = profile.grid_size();
    let mut out = String::from("phi,I_r,m,p\n");
    for (i, (v, q)) in profile.values.samples().iter().zip(&profile.pairs).enumerate() {
        let phi = crate::fourier::grid_angle(i, m);
        writeln!(out, "{phi},{v},{},{}", q.m, q.p).unwrap();
    }
    out
}

pub fn profile_json(profile: &InvariantProfile) -> String {
    pretty(&json!({
        "r": profile.r,
        "n_modes": profile.n_modes,
        "grid_size": profile.grid_size(),
        "values": profile.values.samples(),
    }))
}

/// Columns `j,d_j` for `j = −N..=N`.
pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let n = spectrum.d.len() as i64 - 1;
    let mut out = String::from("j,d_j\n");
    for j in -n..=n {
        writeln!(out, "{j},{}", spectrum.get(j)).unwrap();
    }
    out
}

/// Dense matrix, one CSV row per output coefficient.
pub fn operator_csv(op: &OperatorMatrix) -> String {
    let mut out = String::new();
    out.push_str(&op.basis.labels().join(","));
    out.push('\n');
    for i in 0..op.entries.nrows() {
        let row: Vec<String> = op.entries.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn operator_header_json(op: &OperatorMatrix) -> String {
    pretty(&json!({
        "basis": op.basis,
        "labels": op.basis.labels(),
        "rows": op.entries.nrows(),
        "cols": op.entries.ncols(),
        "r": op.r,
    }))
}

pub fn trace_json(trace: &[TraceEntry]) -> String {
    pretty(&trace)
}

/// Columns `delta_invariant,delta_curve,ratio`.
pub fn stability_csv(report: &StabilityReport) -> String {
    let mut out = String::from("delta_invariant,delta_curve,ratio\n");
    for s in &report.pairs {
        writeln!(out, "{},{},{}", s.delta_invariant, s.delta_curve, s.ratio()).unwrap();
    }
    out
}

pub fn stability_json(report: &StabilityReport) -> String {
    pretty(&json!({
        "c_hat": report.c_hat,
        "k": report.k,
        "n_pairs": report.n_pairs,
        "seed": report.seed,
    }))
}

pub fn pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io("io::write", e))
}
