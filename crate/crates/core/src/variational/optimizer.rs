use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Dim, FolnerSchedule};
use crate::measures::{weighted_objective, MeasureSpec, ObjectiveInterval};
use crate::potential::Potential;
use crate::pressure::ExponentVector;
use crate::symbolic::SystemChain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Bernoulli measures; needs a full shift at level 0.
    Bernoulli,
    /// Markov measures supported on a nearest-neighbor Z-subshift.
    Markov,
}

impl Family {
    /// Whether the family can be parameterized over level 0 of `chain`.
    pub fn check(self, chain: &SystemChain) -> Result<()> {
        Param::new(chain, self).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub family: Family,
    pub restarts: usize,
    pub max_iter: usize,
    /// Initial step length of the backtracking line search.
    pub step: f64,
    /// Stop once an accepted step improves the objective by less than this.
    pub tolerance: f64,
    /// Finite-difference step.
    pub fd_step: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            family: Family::Bernoulli,
            restarts: 4,
            max_iter: 200,
            step: 0.5,
            tolerance: 1e-10,
            fd_step: 1e-6,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Invalid("optimizer needs at least one restart".into()));
        }
        if !(self.tolerance > 0.0 && self.step > 0.0 && self.fd_step > 0.0 && self.fd_step < 0.5) {
            return Err(Error::Invalid("optimizer tolerance, step and fd_step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub index: usize,
    /// `None` for the barycenter and vertex candidates.
    pub seed: Option<u64>,
    pub start: Vec<f64>,
    /// Objective (lower end) after each accepted step, starting point first.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub measure: MeasureSpec,
    pub value: ObjectiveInterval,
    /// Index of the winning trace.
    pub best: usize,
    pub traces: Vec<RestartTrace>,
}

/// Free coordinates: each block is a probability vector over the listed
/// entries of the parameter.
struct Param {
    family: Family,
    q: usize,
    /// Markov: allowed successors of each symbol.
    rows: Vec<Vec<usize>>,
    blocks: Vec<Vec<usize>>,
    len: usize,
}

impl Param {
    fn new(chain: &SystemChain, family: Family) -> Result<Self> {
        let s = chain.system(0);
        let q = s.size();
        match family {
            Family::Bernoulli => {
                if !s.is_full() {
                    return Err(Error::FamilyMismatch("the Bernoulli family needs a full shift at level 0".into()));
                }
                Ok(Param { family, q, rows: Vec::new(), blocks: vec![(0..q).collect()], len: q })
            }
            Family::Markov => {
                if s.dim() != Dim::One || !s.is_nearest_neighbor() {
                    return Err(Error::FamilyMismatch(
                        "the Markov family needs a nearest-neighbor subshift on Z".into(),
                    ));
                }
                let (sites, pairs) = s.transition_mask()?;
                let rows: Vec<Vec<usize>> =
                    (0..q).map(|i| (0..q).filter(|&j| sites[j] && pairs[i][j]).collect()).collect();
                if (0..q).any(|i| sites[i] && rows[i].is_empty()) {
                    return Err(Error::FamilyMismatch("subshift has a symbol without successors".into()));
                }
                let mut blocks = Vec::new();
                let mut len = 0;
                for row in &rows {
                    blocks.push((len..len + row.len()).collect());
                    len += row.len();
                }
                Ok(Param { family, q, rows, blocks, len })
            }
        }
    }

    fn barycenter(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.len];
        for b in &self.blocks {
            for &i in b {
                x[i] = 1.0 / b.len() as f64;
            }
        }
        x
    }

    fn dirichlet(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x = vec![0.0; self.len];
        for b in &self.blocks {
            let draws: Vec<f64> = b.iter().map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let total: f64 = draws.iter().sum();
            for (&i, d) in b.iter().zip(draws) {
                x[i] = d / total;
            }
        }
        x
    }

    fn project(&self, x: &mut [f64]) {
        for b in &self.blocks {
            let mut v: Vec<f64> = b.iter().map(|&i| x[i]).collect();
            project_simplex(&mut v);
            for (&i, p) in b.iter().zip(v) {
                x[i] = p;
            }
        }
    }

    fn measure(&self, x: &[f64]) -> Result<MeasureSpec> {
        match self.family {
            Family::Bernoulli => {
                let total: f64 = x.iter().sum();
                Ok(MeasureSpec::Bernoulli { probs: x.iter().map(|p| p / total).collect() })
            }
            Family::Markov => {
                let mut transition = vec![vec![0.0; self.q]; self.q];
                for (i, (row, block)) in self.rows.iter().zip(&self.blocks).enumerate() {
                    let total: f64 = block.iter().map(|&k| x[k]).sum();
                    for (&j, &k) in row.iter().zip(block) {
                        transition[i][j] = x[k] / total;
                    }
                    if row.is_empty() {
                        transition[i][i] = 1.0;
                    }
                }
                MeasureSpec::markov(transition)
            }
        }
    }
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(v: &mut [f64]) {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

struct Problem<'a> {
    chain: &'a SystemChain,
    f: &'a Potential,
    a: &'a ExponentVector,
    schedule: &'a FolnerSchedule,
    budget: usize,
    param: Param,
    cfg: &'a OptimizerConfig,
}

impl Problem<'_> {
    fn interval(&self, x: &[f64]) -> Result<ObjectiveInterval> {
        let m = self.param.measure(x)?;
        weighted_objective(self.chain, &m, self.f, self.a, self.schedule, self.budget)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.interval(x).map_or(f64::NEG_INFINITY, |v| v.lower)
    }

    /// Central differences along `e_i - 1/k`, one-sided near the boundary.
    fn gradient(&self, x: &[f64], fx: f64) -> Vec<f64> {
        let h = self.cfg.fd_step;
        let mut g = vec![0.0; x.len()];
        for b in &self.param.blocks {
            let k = b.len() as f64;
            if b.len() < 2 {
                continue;
            }
            for &i in b {
                let shift = |sign: f64| -> Option<Vec<f64>> {
                    let mut y = x.to_vec();
                    for &j in b {
                        y[j] += sign * h * (if j == i { 1.0 } else { 0.0 } - 1.0 / k);
                    }
                    b.iter().all(|&j| y[j] >= 0.0).then_some(y)
                };
                g[i] = match (shift(1.0), shift(-1.0)) {
                    (Some(p), Some(m)) => (self.value(&p) - self.value(&m)) / (2.0 * h),
                    (Some(p), None) => (self.value(&p) - fx) / h,
                    (None, Some(m)) => (fx - self.value(&m)) / h,
                    (None, None) => 0.0,
                };
                if !g[i].is_finite() {
                    g[i] = 0.0;
                }
            }
        }
        g
    }

    fn ascend(&self, index: usize, seed: Option<u64>, start: Vec<f64>) -> (RestartTrace, Vec<f64>, f64) {
        let mut x = start.clone();
        let mut fx = self.value(&x);
        let mut values = vec![fx];
        let mut step = self.cfg.step;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < self.cfg.max_iter {
            iterations += 1;
            let g = self.gradient(&x, fx);
            let mut accepted = None;
            while step > 1e-14 {
                let mut y: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + step * gi).collect();
                self.param.project(&mut y);
                let ascent: f64 = g.iter().zip(y.iter().zip(&x)).map(|(gi, (yi, xi))| gi * (yi - xi)).sum();
                if ascent <= 0.0 {
                    break;
                }
                let fy = self.value(&y);
                if fy >= fx + 1e-4 * ascent {
                    accepted = Some((y, fy));
                    break;
                }
                step *= 0.5;
            }
            match accepted {
                Some((y, fy)) => {
                    let gain = fy - fx;
                    x = y;
                    fx = fy;
                    values.push(fx);
                    step *= 2.0;
                    if gain < self.cfg.tolerance {
                        converged = true;
                        break;
                    }
                }
                None => {
                    converged = true;
                    break;
                }
            }
        }
        (RestartTrace { index, seed, start, values, iterations, converged }, x, fx)
    }
}

/// Maximizes the lower end of the weighted objective over a measure family.
///
/// Restart 0 starts at the barycenter, restart `k` at a Dirichlet(1) draw
/// seeded with `seed + k`; for the Bernoulli family the simplex vertices are
/// evaluated as extra candidates. The winner is the highest value, ties going
/// to the lowest index.
pub fn optimize_objective(
    chain: &SystemChain,
    f: &Potential,
    a: &ExponentVector,
    cfg: &OptimizerConfig,
    schedule: &FolnerSchedule,
    budget: usize,
) -> Result<Optimum> {
    cfg.validate()?;
    let param = Param::new(chain, cfg.family)?;
    let problem = Problem { chain, f, a, schedule, budget, param, cfg };
    // Surface configuration errors before searching.
    problem.interval(&problem.param.barycenter())?;

    let mut results: Vec<(RestartTrace, Vec<f64>, f64)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                problem.ascend(0, None, problem.param.barycenter())
            } else {
                let seed = cfg.seed.wrapping_add(k as u64);
                let start = problem.param.dirichlet(&mut ChaCha8Rng::seed_from_u64(seed));
                problem.ascend(k, Some(seed), start)
            }
        })
        .collect();
    if cfg.family == Family::Bernoulli {
        for v in 0..problem.param.q {
            let mut x = vec![0.0; problem.param.len];
            x[v] = 1.0;
            let fx = problem.value(&x);
            let trace = RestartTrace {
                index: cfg.restarts + v,
                seed: None,
                start: x.clone(),
                values: vec![fx],
                iterations: 0,
                converged: true,
            };
            results.push((trace, x, fx));
        }
    }
    let best = results
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (i, r)| match acc {
            Some((_, v)) if r.2 <= v => acc,
            _ => Some((i, r.2)),
        })
        .map(|(i, _)| i)
        .expect("at least one restart");
    let x = &results[best].1;
    let measure = problem.param.measure(x)?;
    let value = problem.interval(x)?;
    Ok(Optimum { measure, value, best, traces: results.into_iter().map(|r| r.0).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::BoxKind;
    use crate::symbolic::{Subshift, DEFAULT_BUDGET};
    use std::f64::consts::LN_2;

    fn sched() -> FolnerSchedule {
        FolnerSchedule::new(BoxKind::Origin, Dim::One, 1, 4).unwrap()
    }

    #[test]
    fn projection_lands_on_simplex() {
        let mut v = vec![0.9, 0.8, -0.3];
        project_simplex(&mut v);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for (x, y) in v.iter().zip([0.55, 0.45, 0.0]) {
            assert!((x - y).abs() < 1e-15);
        }
        let mut inside = vec![0.2, 0.3, 0.5];
        project_simplex(&mut inside);
        assert_eq!(inside, vec![0.2, 0.3, 0.5]);
    }

    #[test]
    fn collapse_chain_optimum() {
        let chain = SystemChain::full_collapse(&[0, 0, 1, 1], Dim::One).unwrap();
        let f = Potential::zero(4, Dim::One).unwrap();
        let a = ExponentVector::new(vec![0.5]).unwrap();
        let cfg = OptimizerConfig::default();
        let opt = optimize_objective(&chain, &f, &a, &cfg, &sched(), DEFAULT_BUDGET).unwrap();
        assert!((opt.value.lower - 1.5 * LN_2).abs() < 1e-6);
    }

    #[test]
    fn skewed_potential_moves_the_optimum() {
        let chain = SystemChain::identity(Subshift::full(2, Dim::One).unwrap()).unwrap();
        let f = Potential::single_site("x0", &[0.0, 1.0], Dim::One).unwrap();
        let a = ExponentVector::new(vec![1.0]).unwrap();
        let opt = optimize_objective(&chain, &f, &a, &OptimizerConfig::default(), &sched(), DEFAULT_BUDGET).unwrap();
        // Gibbs optimum: log(1 + e) at p_1 = e / (1 + e).
        assert!((opt.value.lower - (1.0 + 1f64.exp()).ln()).abs() < 1e-7, "{}", opt.value.lower);
        let MeasureSpec::Bernoulli { probs } = &opt.measure else { unreachable!() };
        assert!((probs[1] - 1f64.exp() / (1.0 + 1f64.exp())).abs() < 1e-3);
    }

    #[test]
    fn markov_family_on_golden_mean() {
        let chain = SystemChain::to_point(Subshift::golden_mean()).unwrap();
        let f = Potential::zero(2, Dim::One).unwrap();
        let a = ExponentVector::new(vec![1.0]).unwrap();
        let cfg = OptimizerConfig { family: Family::Markov, ..OptimizerConfig::default() };
        let opt = optimize_objective(&chain, &f, &a, &cfg, &sched(), DEFAULT_BUDGET).unwrap();
        let log_phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((opt.value.lower - log_phi).abs() < 1e-6, "{}", opt.value.lower);
    }

    #[test]
    fn family_mismatch() {
        let chain = SystemChain::to_point(Subshift::full(2, Dim::Two).unwrap()).unwrap();
        let f = Potential::zero(2, Dim::Two).unwrap();
        let a = ExponentVector::new(vec![1.0]).unwrap();
        let cfg = OptimizerConfig { family: Family::Markov, ..OptimizerConfig::default() };
        let sched2 = FolnerSchedule::new(BoxKind::Origin, Dim::Two, 1, 2).unwrap();
        assert!(matches!(
            optimize_objective(&chain, &f, &a, &cfg, &sched2, DEFAULT_BUDGET),
            Err(Error::FamilyMismatch(_))
        ));
        let golden = SystemChain::to_point(Subshift::golden_mean()).unwrap();
        let f1 = Potential::zero(2, Dim::One).unwrap();
        assert!(matches!(
            optimize_objective(&golden, &f1, &a, &OptimizerConfig::default(), &sched(), DEFAULT_BUDGET),
            Err(Error::FamilyMismatch(_))
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let chain = SystemChain::full_collapse(&[0, 0, 1], Dim::One).unwrap();
        let f = Potential::single_site("f", &[0.3, -0.2, 0.5], Dim::One).unwrap();
        let a = ExponentVector::new(vec![0.6]).unwrap();
        let cfg = OptimizerConfig { seed: 7, ..OptimizerConfig::default() };
        let x = optimize_objective(&chain, &f, &a, &cfg, &sched(), DEFAULT_BUDGET).unwrap();
        let y = optimize_objective(&chain, &f, &a, &cfg, &sched(), DEFAULT_BUDGET).unwrap();
        assert_eq!(x, y);
    }
}
