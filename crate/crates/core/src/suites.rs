//! The twelve acceptance checks as runnable suites. Each returns a
//! machine-readable outcome carrying the worst observed residual.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{BoxKind, Dim, FolnerSchedule, Window};
use crate::measures::{entropy_subadditivity_check, weighted_objective, MeasureSpec};
use crate::oracle::{brute_force_logz, grid_search_objective, transfer_matrix_count, walters_inequality, ORACLE_LIMIT};
use crate::potential::Potential;
use crate::pressure::{nested_partition_function, pressure_estimate, CylinderScheme, ExponentVector};
use crate::symbolic::{for_each_pattern, Alphabet, BlockCode, Pattern, Subshift, Symbol, SystemChain};
use crate::variational::{construct_nu_n, duality_check, optimize_objective, verify_logz_identity, OptimizerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Worst residual seen, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<24} worst={:.3e} tol={:.1e}  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.worst,
            self.tolerance,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub budget: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0x5eed, budget: 1 << 25 }
    }
}

/// `(id, name)` of every criterion.
pub const CRITERIA: [(u8, &str); 12] = [
    (1, "weights"),
    (2, "closed-form"),
    (3, "collapse"),
    (4, "classical"),
    (5, "variational-inequality"),
    (6, "optimizer-gap"),
    (7, "identity"),
    (8, "walters"),
    (9, "subadditivity"),
    (10, "folner"),
    (11, "duality"),
    (12, "oracle"),
];

/// Criteria grouped under the named suites.
pub fn suite_members(name: &str) -> Option<Vec<u8>> {
    let ids = match name {
        "all" => (1..=12).collect(),
        "identity" => vec![7],
        "inequalities" => vec![5, 8, 9],
        "folner" => vec![10],
        "duality" => vec![11],
        "oracle" => vec![12],
        "pressure" => vec![1, 2, 3, 4],
        "variational" => vec![5, 6],
        other => {
            let id = CRITERIA.iter().find(|(_, n)| *n == other).map(|(id, _)| *id)?;
            vec![id]
        }
    };
    Some(ids)
}

pub fn run(id: u8, opts: &SuiteOptions) -> CheckOutcome {
    let name = CRITERIA.iter().find(|(i, _)| *i == id).map_or("unknown", |(_, n)| n);
    let res = match id {
        1 => weights(opts),
        2 => closed_form(opts),
        3 => collapse(opts),
        4 => classical(opts),
        5 => variational_inequality(opts),
        6 => optimizer_gap(opts),
        7 => identity(opts),
        8 => walters(opts),
        9 => subadditivity(opts),
        10 => folner(opts),
        11 => duality(opts),
        12 => oracle(opts),
        _ => Err(Error::Invalid(format!("no criterion {id}"))),
    };
    match res {
        Ok(t) => CheckOutcome {
            id,
            name: name.to_string(),
            passed: t.worst <= t.tolerance && t.failures == 0,
            worst: t.worst,
            tolerance: t.tolerance,
            detail: t.detail,
        },
        Err(e) => CheckOutcome {
            id,
            name: name.to_string(),
            passed: false,
            worst: f64::INFINITY,
            tolerance: 0.0,
            detail: format!("error: {e}"),
        },
    }
}

struct Tally {
    worst: f64,
    tolerance: f64,
    failures: usize,
    detail: String,
}

impl Tally {
    fn new(tolerance: f64) -> Self {
        Tally { worst: 0.0, tolerance, failures: 0, detail: String::new() }
    }

    /// Records a residual that must not exceed the tolerance.
    fn residual(&mut self, r: f64) {
        if r.is_nan() || r > self.tolerance {
            self.failures += 1;
        }
        if r.is_nan() || r > self.worst {
            self.worst = if r.is_nan() { f64::INFINITY } else { r };
        }
    }

    fn require(&mut self, ok: bool) {
        if !ok {
            self.failures += 1;
            self.worst = f64::INFINITY;
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Result<Self> {
        self.detail = d.into();
        if self.failures > 0 {
            self.detail = format!("{} ({} violations)", self.detail, self.failures);
        }
        Ok(self)
    }
}

fn rng(opts: &SuiteOptions, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn dirichlet(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let d: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let t: f64 = d.iter().sum();
    d.into_iter().map(|x| x / t).collect()
}

fn origin(n_min: usize, n_max: usize) -> Result<FolnerSchedule> {
    FolnerSchedule::new(BoxKind::Origin, Dim::One, n_min, n_max)
}

fn exps(a: &[f64]) -> Result<ExponentVector> {
    ExponentVector::new(a.to_vec())
}

fn zero(q: usize) -> Result<Potential> {
    Potential::zero(q, Dim::One)
}

fn weights(opts: &SuiteOptions) -> Result<Tally> {
    let mut rng = rng(opts, 1);
    let mut t = Tally::new(1e-12);
    for _ in 0..1000 {
        let r = rng.gen_range(2..=5);
        let a = exps(&(0..r - 1).map(|_| rng.gen::<f64>()).collect::<Vec<_>>())?;
        let w = a.weights();
        t.require(w.as_slice().iter().all(|&x| x >= 0.0));
        t.residual((w.as_slice().iter().sum::<f64>() - 1.0).abs());
    }
    for r in 2..=5 {
        let w = exps(&vec![1.0; r - 1])?.weights();
        let mut expected = vec![0.0; r];
        expected[0] = 1.0;
        t.require(w.as_slice() == expected.as_slice());
    }
    t.detail("1000 random exponent vectors, r in 2..=5, plus a = (1,…,1)")
}

fn collapse_4_2() -> Result<SystemChain> {
    SystemChain::full_collapse(&[0, 0, 1, 1], Dim::One)
}

fn closed_form(opts: &SuiteOptions) -> Result<Tally> {
    let chain = collapse_4_2()?;
    let scheme = CylinderScheme::standard(&chain, 0)?;
    let f = zero(4)?;
    let mut t = Tally::new(1e-9);
    for a1 in [0.0, 0.25, 0.5, 1.0] {
        let est = pressure_estimate(&chain, &f, &exps(&[a1])?, &origin(1, 12)?, &scheme, opts.budget)?;
        for row in &est.rows {
            t.residual((row.value - (1.0 + a1) * LN_2).abs());
        }
    }
    t.detail("full 4→2 collapse, f = 0, a1 in {0, .25, .5, 1}, n = 1..=12")
}

fn collapse(opts: &SuiteOptions) -> Result<Tally> {
    let full2 = Subshift::full(2, Dim::One)?;
    let to_point = SystemChain::to_point(full2.clone())?;
    let identity = SystemChain::identity(full2)?;
    let f = zero(2)?;
    let sched = origin(1, 12)?;
    let mut t = Tally::new(1e-9);
    for a1 in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let a = exps(&[a1])?;
        let p = pressure_estimate(&to_point, &f, &a, &sched, &CylinderScheme::standard(&to_point, 0)?, opts.budget)?;
        let q = pressure_estimate(&identity, &f, &a, &sched, &CylinderScheme::standard(&identity, 0)?, opts.budget)?;
        for (rp, rq) in p.rows.iter().zip(&q.rows) {
            t.residual((rp.value - a1 * LN_2).abs());
            t.residual((rq.value - LN_2).abs());
        }
    }
    t.detail("2-shift → point gives a1·log 2, identity chain gives log 2; n = 1..=12")
}

fn classical(opts: &SuiteOptions) -> Result<Tally> {
    let chain = SystemChain::to_point(Subshift::full(2, Dim::One)?)?;
    let f = Potential::single_site("x0", &[0.0, 1.0], Dim::One)?;
    let est = pressure_estimate(
        &chain,
        &f,
        &exps(&[1.0])?,
        &origin(1, 12)?,
        &CylinderScheme::standard(&chain, 0)?,
        opts.budget,
    )?;
    let mut t = Tally::new(1e-9);
    let expected = (1.0 + 1f64.exp()).ln();
    for row in &est.rows {
        t.residual((row.value - expected).abs());
    }
    t.detail("r = 2, a1 = 1, point target, f = (0, 1): value log(1+e), n = 1..=12")
}

fn random_markov(rng: &mut ChaCha8Rng, s: &Subshift) -> Result<MeasureSpec> {
    let (sites, pairs) = s.transition_mask()?;
    let q = s.size();
    let rows = (0..q)
        .map(|i| {
            let allowed: Vec<usize> = (0..q).filter(|&j| sites[j] && pairs[i][j]).collect();
            let mut row = vec![0.0; q];
            if allowed.is_empty() {
                row[i] = 1.0;
            } else {
                for (&j, p) in allowed.iter().zip(dirichlet(rng, allowed.len())) {
                    row[j] = p;
                }
            }
            row
        })
        .collect();
    MeasureSpec::markov(rows)
}

fn variational_inequality(opts: &SuiteOptions) -> Result<Tally> {
    let mut rng = rng(opts, 5);
    let collapse = SystemChain::full_collapse(&[0, 0, 1], Dim::One)?;
    let golden = SystemChain::to_point(Subshift::golden_mean())?;
    let sched = origin(1, 10)?;
    let mut t = Tally::new(1e-9);
    let mut worst_slack = f64::INFINITY;
    for k in 0..100 {
        let chain = if k % 2 == 0 { &collapse } else { &golden };
        let s0 = chain.system(0);
        let a = exps(&[rng.gen::<f64>()])?;
        let values: Vec<f64> = (0..s0.size()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = Potential::single_site("random", &values, Dim::One)?;
        let m = if k % 4 == 0 { MeasureSpec::bernoulli(dirichlet(&mut rng, 3))? } else { random_markov(&mut rng, s0)? };
        let objective = weighted_objective(chain, &m, &f, &a, &sched, opts.budget)?;
        let pressure = pressure_estimate(chain, &f, &a, &sched, &CylinderScheme::standard(chain, 0)?, opts.budget)?;
        let excess = objective.upper - pressure.estimate;
        worst_slack = worst_slack.min(-excess);
        t.residual(excess.max(0.0));
    }
    t.detail(format!(
        "100 random measures on the 3→2 collapse and golden-mean → point chains at n = 10; min slack {worst_slack:.3e}"
    ))
}

fn optimizer_gap(opts: &SuiteOptions) -> Result<Tally> {
    let chain = collapse_4_2()?;
    let f = zero(4)?;
    let sched = origin(1, 4)?;
    let cfg = OptimizerConfig { seed: opts.seed, ..OptimizerConfig::default() };
    let mut t = Tally::new(1e-3);
    for a1 in [0.25, 0.5, 0.75] {
        let a = exps(&[a1])?;
        let opt = optimize_objective(&chain, &f, &a, &cfg, &sched, opts.budget)?;
        let pressure = pressure_estimate(&chain, &f, &a, &sched, &CylinderScheme::standard(&chain, 0)?, opts.budget)?;
        let grid = grid_search_objective(&chain, &f, &a, 0.01)?;
        t.residual((opt.value.lower - pressure.estimate).abs());
        t.require(grid.result.value <= opt.value.lower + 1e-9);
        t.require(opt.value.upper <= pressure.estimate + 1e-6);
    }
    t.detail("full 4→2 collapse, a1 in {.25, .5, .75}: optimum vs pressure, grid oracle below optimum")
}

/// A random chain of full shifts linked by surjective symbol maps.
fn random_chain(rng: &mut ChaCha8Rng, levels: usize) -> Result<SystemChain> {
    let mut sizes = vec![rng.gen_range(2..=4usize)];
    for _ in 1..levels {
        let prev = *sizes.last().expect("nonempty");
        sizes.push(rng.gen_range(1..=prev));
    }
    let systems = sizes.iter().map(|&q| Subshift::full(q, Dim::One)).collect::<Result<Vec<_>>>()?;
    let mut codes = Vec::new();
    for l in 0..levels - 1 {
        let (src, dst) = (sizes[l], sizes[l + 1]);
        // Surjective: the first dst symbols hit every target.
        let mut map: Vec<Symbol> =
            (0..src).map(|s| if s < dst { s as Symbol } else { rng.gen_range(0..dst) as Symbol }).collect();
        for i in (1..map.len()).rev() {
            map.swap(i, rng.gen_range(0..=i));
        }
        codes.push(BlockCode::symbol_map(&map, dst, Dim::One)?);
    }
    SystemChain::new(systems, codes)
}

fn random_exponents(rng: &mut ChaCha8Rng, k: usize) -> Result<ExponentVector> {
    exps(&(0..k).map(|_| if rng.gen_bool(0.2) { 1.0 } else { rng.gen::<f64>() }).collect::<Vec<_>>())
}

fn identity(opts: &SuiteOptions) -> Result<Tally> {
    let mut rng = rng(opts, 7);
    let mut t = Tally::new(1e-9);
    let mut worst_level = 0.0f64;
    for _ in 0..50 {
        let r = rng.gen_range(2..=3);
        let chain = random_chain(&mut rng, r)?;
        let q = chain.system(0).size();
        let values: Vec<f64> = (0..q).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let f = Potential::single_site("random", &values, Dim::One)?;
        let a = random_exponents(&mut rng, r - 1)?;
        let n = rng.gen_range(1..=6);
        let window = Window::interval(0, n)?;
        let (_, report) = construct_nu_n(&chain, &f, &a, &window, &CylinderScheme::standard(&chain, 0)?, opts.budget)?;
        let residual = verify_logz_identity(&report, &a, a.weights().as_slice())?;
        t.residual(residual);
        t.require((report.weight_sum - 1.0).abs() <= 1e-10);
        for &lr in &report.level_residuals {
            worst_level = worst_level.max(lr.abs());
            t.residual(lr.abs());
        }
    }
    t.detail(format!("50 random chains (r ≤ 3, alphabets ≤ 4, n ≤ 6); worst per-level residual {worst_level:.3e}"))
}

fn walters(opts: &SuiteOptions) -> Result<Tally> {
    let mut rng = rng(opts, 8);
    let mut t = Tally::new(1e-12);
    let mut min_slack = f64::INFINITY;
    for _ in 0..10_000 {
        let k = rng.gen_range(1..=8);
        let p = dirichlet(&mut rng, k);
        let a: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let slack = walters_inequality(&p, &a)?;
        min_slack = min_slack.min(slack);
        t.residual((-slack).max(0.0));
        let z: f64 = a.iter().map(|x| x.exp()).sum();
        let gibbs: Vec<f64> = a.iter().map(|x| x.exp() / z).collect();
        t.residual(walters_inequality(&gibbs, &a)?.abs());
    }
    t.detail(format!("10^4 random (p, a), Gibbs equality at each draw; min slack {min_slack:.3e}"))
}

fn random_subset(rng: &mut ChaCha8Rng, hi: i64) -> Result<Window> {
    loop {
        let pts: Vec<_> = (0..hi).filter(|_| rng.gen_bool(0.5)).map(crate::group::GroupPoint::d1).collect();
        if !pts.is_empty() {
            return Window::new(Dim::One, pts);
        }
    }
}

fn subadditivity(opts: &SuiteOptions) -> Result<Tally> {
    let mut rng = rng(opts, 9);
    let mut t = Tally::new(1e-10);
    let golden = Subshift::golden_mean();
    let mut min_slack = f64::INFINITY;
    for k in 0..1000 {
        let q = rng.gen_range(2..=3);
        let full = Subshift::full(q, Dim::One)?;
        let (s, m) = match k % 3 {
            0 => (full.clone(), MeasureSpec::bernoulli(dirichlet(&mut rng, q))?),
            1 => {
                let m = random_markov(&mut rng, &full)?;
                (full, m)
            }
            _ => {
                let m = random_markov(&mut rng, &golden)?;
                (golden.clone(), m)
            }
        };
        let f = random_subset(&mut rng, 8)?;
        let a = random_subset(&mut rng, 3)?;
        let slack = entropy_subadditivity_check(&m, &s, &f, &a, opts.budget)?;
        min_slack = min_slack.min(slack);
        t.residual((-slack).max(0.0));
    }
    t.detail(format!("10^3 random (measure, F ⊆ [0,8), A ⊆ [0,3)); min slack {min_slack:.3e}"))
}

fn folner(opts: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::new(1e-2);
    let golden = SystemChain::to_point(Subshift::golden_mean())?;
    let f = zero(2)?;
    let one = exps(&[1.0])?;
    let scheme = CylinderScheme::standard(&golden, 0)?;
    let left = pressure_estimate(&golden, &f, &one, &origin(1, 14)?, &scheme, opts.budget)?;
    let centered = FolnerSchedule::new(BoxKind::Centered, Dim::One, 1, 14)?;
    let right = pressure_estimate(&golden, &f, &one, &centered, &scheme, opts.budget)?;
    let golden_gap = (left.estimate - right.estimate).abs();
    t.residual(golden_gap);

    // Size-only per-n values must agree to rounding.
    let mut exact = 0.0f64;
    let full2 = SystemChain::identity(Subshift::full(2, Dim::One)?)?;
    let collapse = collapse_4_2()?;
    for (chain, a, n_max) in [(&full2, 0.5, 10), (&collapse, 0.5, 4)] {
        let a = exps(&[a])?;
        let q = chain.system(0).size();
        let scheme = CylinderScheme::standard(chain, 0)?;
        let x = pressure_estimate(chain, &zero(q)?, &a, &origin(1, n_max)?, &scheme, opts.budget)?;
        let cs = FolnerSchedule::new(BoxKind::Centered, Dim::One, 1, n_max)?;
        let y = pressure_estimate(chain, &zero(q)?, &a, &cs, &scheme, opts.budget)?;
        exact = exact.max((x.estimate - y.estimate).abs());
        for (rx, ry) in x.rows.iter().zip(&y.rows) {
            exact = exact.max((rx.value - ry.value).abs());
        }
    }
    t.require(exact <= 1e-12);
    t.detail(format!(
        "golden-mean → point at n = 14: |[0,n) − [−n,n)| = {golden_gap:.3e}; full-shift chains differ by {exact:.1e}"
    ))
}

fn duality(opts: &SuiteOptions) -> Result<Tally> {
    let chain = collapse_4_2()?;
    let a = exps(&[0.5])?;
    let family: Vec<Potential> =
        [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|&c| Potential::indicator(c, 0, 4, Dim::One)).collect::<Result<_>>()?;
    let report = duality_check(
        &chain,
        &a,
        &MeasureSpec::uniform(4),
        &family,
        &origin(1, 6)?,
        &CylinderScheme::standard(&chain, 0)?,
        opts.budget,
    )?;
    let mut t = Tally::new(1e-9);
    t.residual((-report.min_gap).max(0.0));
    let at_zero = report.gap_at_zero.ok_or(Error::Empty("zero potential in the family"))?;
    t.residual(at_zero.abs());
    t.detail(format!(
        "uniform μ0 on the 4→2 collapse, a1 = 0.5, c·1[x0=0]; min gap {:.3e}, gap at f=0 {:.3e}",
        report.min_gap, at_zero
    ))
}

fn oracle(opts: &SuiteOptions) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    let mut instances = 0;
    let full2 = Subshift::full(2, Dim::One)?;
    let fixed: Vec<(SystemChain, Potential, Vec<f64>)> = vec![
        (collapse_4_2()?, zero(4)?, vec![0.5]),
        (collapse_4_2()?, zero(4)?, vec![0.0]),
        (SystemChain::identity(full2.clone())?, zero(2)?, vec![0.3]),
        (SystemChain::to_point(Subshift::golden_mean())?, zero(2)?, vec![1.0]),
        (SystemChain::to_point(full2.clone())?, Potential::single_site("x0", &[0.0, 1.0], Dim::One)?, vec![1.0]),
        (
            SystemChain::full_collapse(&[0, 0, 1], Dim::One)?,
            Potential::single_site("f", &[0.2, -0.4, 0.9], Dim::One)?,
            vec![0.7],
        ),
        (
            SystemChain::to_point(Subshift::golden_mean())?,
            Potential::new(
                "pair",
                Window::interval(0, 2)?,
                2,
                [(vec![1, 0], 1.0), (vec![0, 0], 0.0), (vec![0, 1], 0.5), (vec![1, 1], 0.0)],
            )?,
            vec![0.6],
        ),
    ];
    let mut rng = rng(opts, 12);
    let mut cases: Vec<(SystemChain, Potential, ExponentVector, usize)> = Vec::new();
    for (chain, f, a) in fixed {
        for k in 0..=1 {
            cases.push((chain.clone(), f.clone(), exps(&a)?, k));
        }
    }
    for _ in 0..20 {
        let r = rng.gen_range(2..=3);
        let chain = random_chain(&mut rng, r)?;
        let q = chain.system(0).size();
        let values: Vec<f64> = (0..q).map(|_| rng.gen_range(-2.0..2.0)).collect();
        cases.push((
            chain,
            Potential::single_site("random", &values, Dim::One)?,
            random_exponents(&mut rng, r - 1)?,
            0,
        ));
    }
    for (chain, f, a, k) in &cases {
        let scheme = CylinderScheme::standard(chain, *k)?;
        for n in 1..=12 {
            let window = Window::interval(0, n)?;
            let brute = match brute_force_logz(chain, f, a, &window, &scheme) {
                Ok(r) => r.value,
                Err(Error::Budget { .. }) => break,
                Err(e) => return Err(e),
            };
            let engine = nested_partition_function(chain, f, a, &window, &scheme, opts.budget)?;
            t.residual((engine - brute).abs());
            instances += 1;
        }
    }

    let nn = Subshift::new(
        Alphabet::numeric(2)?,
        Dim::One,
        vec![Pattern::word_at(0, &[0, 1])?, Pattern::word_at(0, &[1, 0])?],
    )?;
    let systems = [
        Subshift::full(1, Dim::One)?,
        full2,
        Subshift::full(3, Dim::One)?,
        Subshift::full(4, Dim::One)?,
        Subshift::golden_mean(),
        nn,
    ];
    let mut counts = 0;
    for s in &systems {
        for n in 1..=14 {
            let expected = transfer_matrix_count(s, n)?;
            let bound = (s.size() as f64).powi(n as i32) as usize;
            let seen = for_each_pattern(s, &Window::interval(0, n as i64)?, opts.budget.max(bound), |_| {})?;
            t.require(seen as u128 == expected);
            counts += 1;
        }
    }
    t.detail(format!(
        "{instances} engine/brute-force log Z pairs (oracle limit {ORACLE_LIMIT}), {counts} transfer-matrix counts"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_resolve() {
        assert_eq!(suite_members("inequalities"), Some(vec![5, 8, 9]));
        assert_eq!(suite_members("walters"), Some(vec![8]));
        assert_eq!(suite_members("all").unwrap().len(), 12);
        assert!(suite_members("nope").is_none());
    }

    #[test]
    fn quick_criteria_pass() {
        let opts = SuiteOptions::default();
        for id in [1, 4, 8] {
            let out = run(id, &opts);
            assert!(out.passed, "{}", out.line());
        }
    }
}
