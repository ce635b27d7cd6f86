//! The near-maximizing measure `ν_n`, the `log Z` identities it satisfies,
//! shift averaging, duality checks, and the optimizer over measure families.

mod optimizer;

pub use optimizer::{optimize_objective, project_simplex, Family, OptimizerConfig, Optimum, RestartTrace};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FolnerSchedule, GroupPoint, Window};
use crate::measures::{integral, marginal, weighted_objective, FiniteSupport, MarginalTable, MeasureSpec};
use crate::potential::Potential;
use crate::pressure::{pressure_estimate, CylinderScheme, ExponentVector, PartitionTree};
use crate::symbolic::{Subshift, SystemChain, Word};

/// Everything needed to check the `log Z` identities of `ν_n` at one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogZReport {
    pub size: usize,
    pub log_z: f64,
    /// `W^(j) / Z` for levels `j = 1..r`; entry 0 is unused and zero.
    pub w_over_z: Vec<f64>,
    /// Entropy of `π^(i) ν` on the level-`i` cylinders over the window.
    pub entropies: Vec<f64>,
    /// `∫ S_F f dν`.
    pub integral: f64,
    pub weights: Vec<f64>,
    pub exponents: Vec<f64>,
    pub weight_sum: f64,
    /// `Σ w_i H_i + w_1 ∫ S_F f dν - log Z`.
    pub residual: f64,
    /// Measured `H_i` minus its closed expression in `log Z`, `∫` and `W`.
    pub level_residuals: Vec<f64>,
}

/// `ν_n` on the window `window` together with its identity report.
///
/// Level-0 cylinder `V` carries the Dirac mass at its least maximizing
/// completion `x_V`, weighted by
/// `e^{S_F f(x_V)} Π_l Z^(l)(anc_l V)^{a_l - 1} / Z`.
pub fn construct_nu_n(
    chain: &SystemChain,
    f: &Potential,
    a: &ExponentVector,
    window: &Window,
    scheme: &CylinderScheme,
    budget: usize,
) -> Result<(FiniteSupport, LogZReport)> {
    let tree = PartitionTree::build(chain, f, a, window, scheme, budget)?;
    let r = tree.levels();
    let av = a.as_slice();
    let log_total = tree.log_total;

    let mut atoms = Vec::with_capacity(tree.sup.len());
    for (i, x) in tree.completion.iter().enumerate() {
        let mut log_w = tree.sup[i] - log_total;
        for l in 1..r {
            log_w += (av[l - 1] - 1.0) * tree.log_z[l][tree.ancestor(i, l)];
        }
        atoms.push((x.clone(), log_w.exp()));
    }
    let weight_sum: f64 = atoms.iter().map(|a| a.1).sum();

    // Mass of each level-j cylinder and W^(j)/Z.
    let mut w_over_z = vec![0.0; r];
    for j in 1..r {
        let mut total = 0.0;
        for (u, &lz) in tree.log_z[j].iter().enumerate() {
            let mut log_mass = av[j - 1] * lz - log_total;
            let mut anc = u;
            for k in j + 1..r {
                anc = tree.parent[k - 1][anc];
                log_mass += (av[k - 1] - 1.0) * tree.log_z[k][anc];
            }
            total += log_mass.exp() * lz;
        }
        w_over_z[j] = total;
    }

    // Entropies from the atoms alone: push x_V to each level and group.
    let completion_window = &tree.completion_window;
    let mut entropies = Vec::with_capacity(r);
    for level in 0..r {
        let mut masses: BTreeMap<Word, f64> = BTreeMap::new();
        for (x, w) in &atoms {
            let y = chain.push_word(0, level, completion_window, &tree.windows[level], x)?;
            *masses.entry(y).or_insert(0.0) += w;
        }
        entropies.push(masses.values().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum());
    }

    // ∫ S_F f dν by direct evaluation at each x_V.
    let mut integral = 0.0;
    let mut local = Vec::with_capacity(f.window().len());
    for (x, w) in &atoms {
        let mut s = 0.0;
        for &g in window.points() {
            local.clear();
            for &d in f.window().points() {
                let idx = completion_window
                    .index_of(g + d)
                    .ok_or_else(|| Error::Window(format!("completion lacks site {}", g + d)))?;
                local.push(x[idx]);
            }
            s += f.eval(&local).ok_or_else(|| Error::Invalid(format!("potential has no row for {local:?}")))?;
        }
        integral += w * s;
    }

    let weights = a.weights().as_slice().to_vec();
    let mut level_residuals = Vec::with_capacity(r);
    let tail = |from: usize| -> f64 { (from..r).map(|k| (av[k - 1] - 1.0) * w_over_z[k]).sum() };
    level_residuals.push(entropies[0] - (log_total - integral - tail(1)));
    for i in 1..r {
        level_residuals.push(entropies[i] - (log_total - av[i - 1] * w_over_z[i] - tail(i + 1)));
    }
    let mut report = LogZReport {
        size: window.len(),
        log_z: log_total,
        w_over_z,
        entropies,
        integral,
        weights,
        exponents: av.to_vec(),
        weight_sum,
        residual: 0.0,
        level_residuals,
    };
    report.residual = identity_residual(&report, &report.weights);
    let nu = FiniteSupport::new(completion_window.clone(), atoms)?;
    Ok((nu, report))
}

fn identity_residual(report: &LogZReport, w: &[f64]) -> f64 {
    let weighted: f64 = w.iter().zip(&report.entropies).map(|(w, h)| w * h).sum();
    weighted + w[0] * report.integral - report.log_z
}

/// `|Σ w_i H_i + w_1 ∫ S_F f dν - log Z|`, recomputed from the report with
/// the weights derived from `a`; fails if `w` disagrees with them.
pub fn verify_logz_identity(report: &LogZReport, a: &ExponentVector, w: &[f64]) -> Result<f64> {
    let derived = a.weights();
    if w.len() != report.entropies.len() || derived.len() != w.len() {
        return Err(Error::Invalid("weight vector does not match the report".into()));
    }
    if derived.as_slice().iter().zip(w).any(|(x, y)| (x - y).abs() > 1e-12) {
        return Err(Error::Invalid("weight vector is not the one derived from the exponents".into()));
    }
    Ok(identity_residual(report, w).abs())
}

/// Coefficient of `W^(j)` in `Σ w_i H_i` after substituting the per-level
/// expressions; zero for every `j` when `w` comes from `a`.
pub fn w_coefficients(a: &ExponentVector, w: &[f64]) -> Vec<f64> {
    let av = a.as_slice();
    (1..w.len())
        .map(|j| {
            let below: f64 = w[..j].iter().sum();
            (1.0 - av[j - 1]) * below - av[j - 1] * w[j]
        })
        .collect()
}

/// Marginal on `query` of `μ_n = |F|^{-1} Σ_{g∈F} g ν`.
pub fn invariantize(
    nu: &FiniteSupport,
    s: &Subshift,
    window: &Window,
    query: &Window,
    budget: usize,
) -> Result<MarginalTable> {
    if query.len() > window.len() {
        return Err(Error::Window(format!(
            "query window of {} sites is too large for an average over {} translates",
            query.len(),
            window.len()
        )));
    }
    let m = MeasureSpec::FiniteSupport(nu.clone());
    let scale = 1.0 / window.len() as f64;
    let mut probs: BTreeMap<Word, f64> = BTreeMap::new();
    for &g in window.points() {
        let t = marginal(&m, s, &query.translate(g), budget)?;
        for (w, p) in t.iter() {
            *probs.entry(w.clone()).or_insert(0.0) += scale * p;
        }
    }
    MarginalTable::new(query.clone(), probs)
}

/// `TV(μ_n on E, μ_n on E + g)` and the bound `2 |F Δ (F - g)| / |F|`.
pub fn invariance_defect(
    nu: &FiniteSupport,
    s: &Subshift,
    window: &Window,
    query: &Window,
    g: GroupPoint,
    budget: usize,
) -> Result<(f64, f64)> {
    let here = invariantize(nu, s, window, query, budget)?;
    let there = invariantize(nu, s, window, &query.translate(g), budget)?;
    let shifted = window.translate(-g);
    let sym = window.difference(&shifted).len() + shifted.difference(window).len();
    Ok((here.total_variation(&there)?, 2.0 * sym as f64 / window.len() as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityEntry {
    pub potential: String,
    pub pressure: f64,
    pub integral: f64,
    /// `P^a(f) - w_1 ∫ f dμ_0 - h^a_{μ_0}`.
    pub gap: f64,
}

/// One-sided check of `h^a_{μ_0} <= P^a(f) - w_1 ∫ f dμ_0` over a finite
/// family of potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// Upper end of the bracket for `Σ w_i h_{μ_i}`.
    pub weighted_entropy: f64,
    pub entries: Vec<DualityEntry>,
    pub min_gap: f64,
    pub gap_at_zero: Option<f64>,
}

pub fn duality_check(
    chain: &SystemChain,
    a: &ExponentVector,
    mu0: &MeasureSpec,
    family: &[Potential],
    schedule: &FolnerSchedule,
    scheme: &CylinderScheme,
    budget: usize,
) -> Result<DualityReport> {
    let s0 = chain.system(0);
    let zero = Potential::zero(s0.size(), s0.dim())?;
    let weighted_entropy = weighted_objective(chain, mu0, &zero, a, schedule, budget)?.upper;
    let w1 = a.weights().as_slice()[0];
    let mut entries = Vec::with_capacity(family.len());
    let mut gap_at_zero = None;
    for f in family {
        let pressure = pressure_estimate(chain, f, a, schedule, scheme, budget)?.estimate;
        let int = integral(mu0, s0, f, budget)?;
        let gap = pressure - w1 * int - weighted_entropy;
        if f.is_zero() {
            gap_at_zero = Some(gap_at_zero.map_or(gap, |g: f64| g.min(gap)));
        }
        entries.push(DualityEntry { potential: f.name().to_string(), pressure, integral: int, gap });
    }
    let min_gap = entries.iter().map(|e| e.gap).fold(f64::INFINITY, f64::min);
    Ok(DualityReport { weighted_entropy, entries, min_gap, gap_at_zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{BoxKind, Dim};
    use crate::symbolic::{Pattern, DEFAULT_BUDGET};

    fn scheme(chain: &SystemChain) -> CylinderScheme {
        CylinderScheme::standard(chain, 0).unwrap()
    }

    #[test]
    fn point_chain_nu_is_uniform() {
        let chain = SystemChain::to_point(Subshift::full(2, Dim::One).unwrap()).unwrap();
        let f = Potential::zero(2, Dim::One).unwrap();
        let a = ExponentVector::new(vec![1.0]).unwrap();
        let w = Window::interval(0, 2).unwrap();
        let (nu, report) = construct_nu_n(&chain, &f, &a, &w, &scheme(&chain), DEFAULT_BUDGET).unwrap();
        assert_eq!(nu.atoms().len(), 4);
        assert!(nu.atoms().iter().all(|(_, p)| (p - 0.25).abs() < 1e-15));
        assert!(report.residual.abs() < 1e-12);
    }

    #[test]
    fn identity_chain_nu_is_uniform() {
        let chain = SystemChain::identity(Subshift::full(3, Dim::One).unwrap()).unwrap();
        let f = Potential::zero(3, Dim::One).unwrap();
        let a = ExponentVector::new(vec![0.3]).unwrap();
        let (nu, report) =
            construct_nu_n(&chain, &f, &a, &Window::interval(0, 3).unwrap(), &scheme(&chain), DEFAULT_BUDGET).unwrap();
        assert!(nu.atoms().iter().all(|(_, p)| (p - 1.0 / 27.0).abs() < 1e-15));
        assert!(report.residual.abs() < 1e-12);
    }

    #[test]
    fn collapse_chain_weights() {
        let chain = SystemChain::full_collapse(&[0, 0, 1, 1], Dim::One).unwrap();
        let f = Potential::zero(4, Dim::One).unwrap();
        let a = ExponentVector::new(vec![0.5]).unwrap();
        let (nu, report) =
            construct_nu_n(&chain, &f, &a, &Window::origin(Dim::One), &scheme(&chain), DEFAULT_BUDGET).unwrap();
        // Z = 2 · 2^{1/2}, each symbol weighs 2^{-1/2} / Z = 1/4.
        assert!((report.log_z - 1.5 * 2f64.ln()).abs() < 1e-15);
        assert!(nu.atoms().iter().all(|(_, p)| (p - 0.25).abs() < 1e-15));
        assert!((report.weight_sum - 1.0).abs() < 1e-15);
        assert!(report.level_residuals.iter().all(|r| r.abs() < 1e-12));
        let w = a.weights();
        assert!(verify_logz_identity(&report, &a, w.as_slice()).unwrap() < 1e-12);
        assert!(verify_logz_identity(&report, &a, &[0.3, 0.7]).is_err());
    }

    #[test]
    fn w_coefficients_vanish() {
        let a = ExponentVector::new(vec![0.2, 0.7, 1.0]).unwrap();
        let w = a.weights();
        assert!(w_coefficients(&a, w.as_slice()).iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn invariantize_uniform_is_noop() {
        let full = Subshift::full(2, Dim::One).unwrap();
        let chain = SystemChain::to_point(full.clone()).unwrap();
        let f = Potential::zero(2, Dim::One).unwrap();
        let a = ExponentVector::new(vec![1.0]).unwrap();
        let w = Window::interval(0, 4).unwrap();
        let (nu, _) = construct_nu_n(&chain, &f, &a, &w, &scheme(&chain), DEFAULT_BUDGET).unwrap();
        let e = Window::origin(Dim::One);
        let t = invariantize(&nu, &full, &w, &e, DEFAULT_BUDGET).unwrap();
        let direct = marginal(&MeasureSpec::FiniteSupport(nu), &full, &e, DEFAULT_BUDGET).unwrap();
        assert!(t.total_variation(&direct).unwrap() < 1e-15);
    }

    #[test]
    fn period_two_point_averages_out() {
        let full = Subshift::full(2, Dim::One).unwrap();
        let n = 20;
        let word: Vec<u8> = (0..n).map(|i| ((i + 1) % 2) as u8).collect();
        let nu = FiniteSupport::dirac(Pattern::word_at(0, &word).unwrap());
        let w = Window::interval(0, n as i64).unwrap();
        let t = invariantize(&nu, &full, &w, &Window::origin(Dim::One), DEFAULT_BUDGET).unwrap();
        assert!((t.get(&[0]) - 0.5).abs() <= 1.0 / n as f64);
        let (tv, bound) =
            invariance_defect(&nu, &full, &w, &Window::origin(Dim::One), GroupPoint::d1(1), DEFAULT_BUDGET).unwrap();
        assert!(tv <= bound && tv <= 0.1, "{tv} {bound}");
        assert!(
            invariantize(&nu, &full, &Window::interval(0, 2).unwrap(), &Window::interval(0, 3).unwrap(), 100).is_err()
        );
    }

    #[test]
    fn duality_at_the_maximizer() {
        let chain = SystemChain::full_collapse(&[0, 0, 1, 1], Dim::One).unwrap();
        let a = ExponentVector::new(vec![0.5]).unwrap();
        let family: Vec<Potential> =
            [-1.0, 0.0, 1.0].iter().map(|&c| Potential::indicator(c, 0, 4, Dim::One).unwrap()).collect();
        let sched = FolnerSchedule::new(BoxKind::Origin, Dim::One, 1, 3).unwrap();
        let report =
            duality_check(&chain, &a, &MeasureSpec::uniform(4), &family, &sched, &scheme(&chain), DEFAULT_BUDGET)
                .unwrap();
        assert!(report.gap_at_zero.unwrap().abs() < 1e-12);
        assert!(report.min_gap >= -1e-9);
    }
}
