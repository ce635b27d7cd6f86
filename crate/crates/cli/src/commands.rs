use anyhow::Result;

use wtp_core::measures::weighted_objective;
use wtp_core::pressure::{pressure_sweep, CylinderScheme, PressureEstimate};
use wtp_core::suites::{self, CheckOutcome, SuiteOptions};
use wtp_core::variational::{construct_nu_n, duality_check, optimize_objective, verify_logz_identity};

use crate::config::{Instance, Model};
use crate::report::{num, Csv, NuResult, RunReport, Timings, VariationalResult};

/// Soundness margin between an optimizer value and the pressure estimate.
pub const SOUNDNESS_TOL: f64 = 1e-6;
pub const IDENTITY_TOL: f64 = 1e-9;
pub const DUALITY_TOL: f64 = 1e-9;

/// Everything a command produces.
pub struct Run {
    pub report: RunReport,
    pub csvs: Vec<(&'static str, Csv)>,
    pub timings: Timings,
}

impl Run {
    fn new(command: &str, inst: &Instance) -> Self {
        Run {
            report: RunReport::new(command, &inst.digest, inst.seed, inst.budget),
            csvs: Vec::new(),
            timings: Timings::default(),
        }
    }
}

fn finest(m: &Model, estimates: &[PressureEstimate]) -> f64 {
    estimates.iter().find(|e| e.refinement == *m.refinements.end()).map_or(f64::NAN, |e| e.estimate)
}

fn run_pressure(run: &mut Run, inst: &Instance, m: &Model) -> Result<Vec<PressureEstimate>> {
    let est = run.timings.time("pressure", || {
        pressure_sweep(&m.chain, &m.potential, &m.exponents, &m.schedule, m.refinements.clone(), inst.budget)
    })?;
    let mut csv = Csv::new(&["n", "size", "refinement", "log_z", "value", "running_inf"]);
    for e in &est {
        for r in &e.rows {
            csv.row(&[
                r.n.to_string(),
                r.size.to_string(),
                r.refinement.to_string(),
                num(r.log_z),
                num(r.value),
                num(r.running_inf),
            ]);
        }
        let t = run.report.trace("weighted_pressure", "pressure_estimate", e.clone());
        run.report.pressure.push(t);
    }
    run.csvs.push(("pressure.csv", csv));
    Ok(est)
}

fn run_variational(run: &mut Run, inst: &Instance, m: &Model, pressure: f64) -> Result<()> {
    let Some(cfg) = &m.optimizer else {
        anyhow::bail!("variational needs an [optimizer] table");
    };
    let opt = run.timings.time("variational", || {
        optimize_objective(&m.chain, &m.potential, &m.exponents, cfg, &m.schedule, inst.budget)
    })?;
    let mut csv = Csv::new(&["restart", "seed", "iteration", "value"]);
    for t in &opt.traces {
        let seed = t.seed.map_or(String::new(), |s| s.to_string());
        for (i, v) in t.values.iter().enumerate() {
            csv.row(&[t.index.to_string(), seed.clone(), i.to_string(), num(*v)]);
        }
    }
    run.csvs.push(("trace.csv", csv));
    let upper = opt.value.upper;
    let gap = pressure - opt.value.lower;
    let data = VariationalResult { optimum: opt, pressure, gap };
    run.report.variational = Some(run.report.trace("variational", "optimize_objective", data));
    let excess = (upper - pressure).max(0.0);
    run.report.check(
        "variational",
        "optimize_objective",
        CheckOutcome {
            id: 0,
            name: "optimizer-soundness".into(),
            passed: excess <= SOUNDNESS_TOL,
            worst: excess,
            tolerance: SOUNDNESS_TOL,
            detail: format!("optimum upper end vs pressure {pressure:.12}"),
        },
    );
    Ok(())
}

fn run_objective(run: &mut Run, inst: &Instance, m: &Model, pressure: f64) -> Result<()> {
    let Some(mu) = &m.measure else { return Ok(()) };
    let obj = run
        .timings
        .time("objective", || weighted_objective(&m.chain, mu, &m.potential, &m.exponents, &m.schedule, inst.budget))?;
    let excess = (obj.upper - pressure).max(0.0);
    run.report.check(
        "measures",
        "weighted_objective",
        CheckOutcome {
            id: 0,
            name: "instance-inequality".into(),
            passed: excess <= IDENTITY_TOL,
            worst: excess,
            tolerance: IDENTITY_TOL,
            detail: format!("objective upper end {:.12} vs pressure {pressure:.12}", obj.upper),
        },
    );
    run.report.objective = Some(run.report.trace("measures", "weighted_objective", obj));
    Ok(())
}

fn run_nu(run: &mut Run, inst: &Instance, m: &Model) -> Result<()> {
    let w = m.exponents.weights();
    let mut worst = 0.0f64;
    let mut atoms_csv = None;
    for k in m.refinements.clone() {
        let scheme = CylinderScheme::standard(&m.chain, k)?;
        for n in m.schedule.indices() {
            let window = m.schedule.window(n)?;
            let (nu, report) = run.timings.time(&format!("nu n={n} k={k}"), || {
                construct_nu_n(&m.chain, &m.potential, &m.exponents, &window, &scheme, inst.budget)
            })?;
            let residual = verify_logz_identity(&report, &m.exponents, w.as_slice())?;
            worst = worst.max(residual);
            for r in &report.level_residuals {
                worst = worst.max(r.abs());
            }
            if n == m.schedule.n_max && k == *m.refinements.end() {
                let alphabet = m.chain.system(0).alphabet();
                let mut csv = Csv::new(&["word", "probability"]);
                for (word, p) in nu.atoms() {
                    csv.row(&[alphabet.render(word), num(*p)]);
                }
                atoms_csv = Some(csv);
            }
            let data = NuResult { n, refinement: k, atoms: nu.atoms().len(), residual, report };
            let t = run.report.trace("variational", "construct_nu_n", data);
            run.report.nu.push(t);
        }
    }
    if let Some(csv) = atoms_csv {
        run.csvs.push(("nu.csv", csv));
    }
    run.report.check(
        "variational",
        "verify_logz_identity",
        CheckOutcome {
            id: 0,
            name: "instance-identity".into(),
            passed: worst <= IDENTITY_TOL,
            worst,
            tolerance: IDENTITY_TOL,
            detail: format!("log Z identities over n in {:?}, refinements {:?}", m.schedule.indices(), m.refinements),
        },
    );
    Ok(())
}

fn run_duality(run: &mut Run, inst: &Instance, m: &Model) -> Result<()> {
    let (Some(family), Some(mu)) = (&m.duality, &m.measure) else { return Ok(()) };
    let scheme = CylinderScheme::standard(&m.chain, *m.refinements.end())?;
    let rep = run
        .timings
        .time("duality", || duality_check(&m.chain, &m.exponents, mu, family, &m.schedule, &scheme, inst.budget))?;
    // One-sided: the gap at f = 0 vanishes only for equilibrium measures.
    let worst = (-rep.min_gap).max(0.0);
    let at_zero = rep.gap_at_zero.map_or(String::new(), |g| format!(", gap at f=0 {g:.3e}"));
    run.report.check(
        "variational",
        "duality_check",
        CheckOutcome {
            id: 0,
            name: "instance-duality".into(),
            passed: worst <= DUALITY_TOL,
            worst,
            tolerance: DUALITY_TOL,
            detail: format!("{} potentials, min gap {:.3e}{at_zero}", rep.entries.len(), rep.min_gap),
        },
    );
    run.report.duality = Some(run.report.trace("variational", "duality_check", rep));
    Ok(())
}

fn run_suites(run: &mut Run, inst: &Instance, names: &[String]) -> Result<()> {
    let opts = SuiteOptions { seed: inst.seed, budget: inst.budget };
    let mut ids: Vec<u8> = Vec::new();
    for name in names {
        let members = suites::suite_members(name).ok_or_else(|| anyhow::anyhow!("unknown suite {name:?}"))?;
        ids.extend(members);
    }
    ids.sort_unstable();
    ids.dedup();
    for id in ids {
        let out = run.timings.time(&format!("criterion {id}"), || suites::run(id, &opts));
        run.report.check("suites", "run", out);
    }
    Ok(())
}

pub fn pressure(inst: &Instance) -> Result<Run> {
    let m = inst.model()?;
    let mut run = Run::new("pressure", inst);
    run_pressure(&mut run, inst, m)?;
    Ok(run)
}

pub fn variational(inst: &Instance) -> Result<Run> {
    let m = inst.model()?;
    let mut run = Run::new("variational", inst);
    let est = run_pressure(&mut run, inst, m)?;
    run_variational(&mut run, inst, m, finest(m, &est))?;
    Ok(run)
}

pub fn nu_construct(inst: &Instance) -> Result<Run> {
    let m = inst.model()?;
    let mut run = Run::new("nu-construct", inst);
    run_nu(&mut run, inst, m)?;
    Ok(run)
}

/// Runs the named suite; `identity` and `duality` also check the configured
/// instance when there is one.
pub fn verify(inst: &Instance, suite: &str) -> Result<Run> {
    let mut run = Run::new("verify", inst);
    run_suites(&mut run, inst, &[suite.to_string()])?;
    if let Some(m) = &inst.model {
        match suite {
            "identity" | "all" => run_nu(&mut run, inst, m)?,
            _ => {}
        }
        match suite {
            "duality" | "all" => run_duality(&mut run, inst, m)?,
            _ => {}
        }
    }
    Ok(run)
}

/// Every stage the config enables, plus the configured suites.
pub fn report(inst: &Instance) -> Result<Run> {
    let m = inst.model()?;
    let mut run = Run::new("report", inst);
    let est = run_pressure(&mut run, inst, m)?;
    let p = finest(m, &est);
    run_objective(&mut run, inst, m, p)?;
    if m.optimizer.is_some() {
        run_variational(&mut run, inst, m, p)?;
    }
    run_nu(&mut run, inst, m)?;
    run_duality(&mut run, inst, m)?;
    run_suites(&mut run, inst, &inst.report_suites)?;
    Ok(run)
}
