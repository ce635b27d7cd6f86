//! Run reports and their on-disk forms. Reports carry no wall-clock data so
//! that reruns are byte-identical; stage timings go to `timings.json`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

use wtp_core::measures::ObjectiveInterval;
use wtp_core::pressure::PressureEstimate;
use wtp_core::suites::CheckOutcome;
use wtp_core::variational::{DualityReport, LogZReport, Optimum};

/// A result tagged with where it came from.
#[derive(Debug, Clone, Serialize)]
pub struct Traced<T> {
    pub module: &'static str,
    pub operation: &'static str,
    pub digest: String,
    pub data: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationalResult {
    pub optimum: Optimum,
    /// Pressure running infimum at the finest refinement.
    pub pressure: f64,
    /// `pressure - value.lower`.
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NuResult {
    pub n: usize,
    pub refinement: usize,
    pub atoms: usize,
    pub residual: f64,
    pub report: LogZReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub digest: String,
    pub seed: u64,
    pub budget: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pressure: Vec<Traced<PressureEstimate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<Traced<ObjectiveInterval>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variational: Option<Traced<VariationalResult>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub nu: Vec<Traced<NuResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duality: Option<Traced<DualityReport>>,
    pub checks: Vec<Traced<CheckOutcome>>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: &str, digest: &str, seed: u64, budget: usize) -> Self {
        RunReport {
            command: command.into(),
            digest: digest.into(),
            seed,
            budget,
            pressure: Vec::new(),
            objective: None,
            variational: None,
            nu: Vec::new(),
            duality: None,
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn trace<T>(&self, module: &'static str, operation: &'static str, data: T) -> Traced<T> {
        Traced { module, operation, digest: self.digest.clone(), data }
    }

    pub fn check(&mut self, module: &'static str, operation: &'static str, outcome: CheckOutcome) {
        self.passed &= outcome.passed;
        let t = self.trace(module, operation, outcome);
        self.checks.push(t);
    }

    /// Aligned plain-text summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<10} {}", "command", self.command);
        let _ = writeln!(s, "{:<10} {}", "digest", self.digest);
        let _ = writeln!(s, "{:<10} {}", "seed", self.seed);
        for p in &self.pressure {
            let e = &p.data;
            let _ = writeln!(
                s,
                "pressure   k={:<3} estimate={:.12} spread={:.3e} ({} scales)",
                e.refinement,
                e.estimate,
                e.spread,
                e.rows.len()
            );
        }
        if let Some(o) = &self.objective {
            let _ = writeln!(s, "objective  [{:.12}, {:.12}]", o.data.lower, o.data.upper);
        }
        if let Some(v) = &self.variational {
            let val = &v.data.optimum.value;
            let _ = writeln!(s, "optimum    [{:.12}, {:.12}] gap-to-pressure={:.3e}", val.lower, val.upper, v.data.gap);
        }
        for nu in &self.nu {
            let d = &nu.data;
            let _ = writeln!(
                s,
                "nu_n       n={:<3} k={:<3} atoms={:<8} log Z={:.12} residual={:.3e}",
                d.n, d.refinement, d.atoms, d.report.log_z, d.residual
            );
        }
        if let Some(d) = &self.duality {
            let _ = writeln!(s, "duality    min gap={:.3e}", d.data.min_gap);
        }
        for c in &self.checks {
            let _ = writeln!(s, "{}", c.data.line());
        }
        let _ = writeln!(s, "{}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

/// Wall-clock seconds per stage.
#[derive(Debug, Default, Serialize)]
pub struct Timings {
    stages: Vec<Stage>,
}

#[derive(Debug, Serialize)]
struct Stage {
    stage: String,
    seconds: f64,
}

impl Timings {
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.stages.push(Stage { stage: stage.into(), seconds: start.elapsed().as_secs_f64() });
        out
    }
}

/// Seventeen significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

/// Writes the report, its CSV tables and the timings into `dir`.
pub fn write_all(dir: &Path, report: &RunReport, csvs: &[(&str, Csv)], timings: &Timings) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: &str| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        Ok(())
    };
    put(&format!("{}.json", report.command), &(serde_json::to_string_pretty(report)? + "\n"))?;
    for (name, csv) in csvs {
        put(name, &csv.text)?;
    }
    put("timings.json", &(serde_json::to_string_pretty(timings)? + "\n"))?;
    Ok(written)
}
