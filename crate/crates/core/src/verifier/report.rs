//! Report files written next to each run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::IndexReport;
use crate::Result;

// adding 0.0 turns -0.0 into 0.0 so that a trivial ledger prints cleanly
fn num(x: f64) -> f64 {
    x + 0.0
}

/// Human-readable form of the index ledger.
pub fn ledger_line(index: i64, bulk: f64, eta_tilde: f64, ta: f64) -> String {
    format!(
        "Index = int P - eta/2 + TA: {} = {} - {} + {}",
        index,
        num(bulk),
        num(0.5 * eta_tilde),
        num(ta)
    )
}

fn summary(r: &IndexReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} (n = {}, config {})", r.name, r.dimension, &r.config_hash[..12]);
    let _ = writeln!(s, "{}", ledger_line(r.index, r.bulk.value, r.eta.eta_tilde, r.ta));
    let _ = writeln!(s, "residual {:.3e} (tolerance {:.1e})", r.residual, r.tolerance);
    let ht = &r.index_computation.heat_trace;
    for (t, v) in ht.times.iter().zip(&ht.values) {
        let _ = writeln!(s, "heat trace t = {t}: {v:.12}");
    }
    let (kp, km) = r.index_computation.kernel;
    let _ = writeln!(s, "kernel (+, -) = ({kp}, {km}), operator dimension {}", r.index_computation.operator_dim);
    match r.spectral_flow {
        Some(sf) => {
            let _ = writeln!(s, "spectral flow {sf}");
        }
        None => {
            let _ = writeln!(s, "spectral flow undefined (endpoint kernel)");
        }
    }
    for c in &r.checks {
        let _ = writeln!(
            s,
            "[{}] {}: {:.3e} < {:.1e}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.check,
            c.value,
            c.tolerance,
            c.detail
        );
    }
    let _ = writeln!(s, "{}", if r.passed { "PASSED" } else { "FAILED" });
    s
}

/// Writes `report.json`, `spectrum.csv`, `eta_integrand.csv`,
/// `summary.txt` and, when a homotopy sweep ran, `delta_sweep.csv` into
/// `dir`; returns the written paths.
pub fn emit_report(report: &IndexReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, content: String| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, content)?;
        written.push(p);
        Ok(())
    };
    let json = serde_json::to_string_pretty(report).map_err(|e| crate::Error::Io(e.to_string()))?;
    put("report.json", json)?;
    put("spectrum.csv", report.index_computation.spectrum.to_csv())?;
    let mut eta = String::from("s,integrand\n");
    for (s, v) in &report.eta.integrand {
        let _ = writeln!(eta, "{s:.17e},{v:.17e}");
    }
    put("eta_integrand.csv", eta)?;
    if let Some(sw) = &report.delta_sweep {
        let mut csv = String::from("delta,index,deviation\n");
        if let Some(i) = sw.transverse_index {
            let _ = writeln!(csv, "0,{i},0");
        }
        for row in &sw.rows {
            let _ = writeln!(csv, "{},{},{:.3e}", row.delta, row.index, row.deviation);
        }
        put("delta_sweep.csv", csv)?;
    }
    put("summary.txt", summary(report))?;
    Ok(written)
}
