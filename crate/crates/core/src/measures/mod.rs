//! Measures on subshifts, their finite-window marginals and pushforwards,
//! entropy functionals, and the weighted variational objective.

mod entropy;
mod objective;

pub use entropy::{
    bernoulli_entropy, conditional_entropy, entropy_rate, level_entropy_bounds, level_entropy_interval,
    markov_entropy_rate, partition_entropy, EntropyBounds, EntropyRow,
};
pub use objective::{entropy_subadditivity_check, integral, weighted_objective, ObjectiveInterval};

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Dim, GroupPoint, Window};
use crate::symbolic::{enumerate_patterns, BlockCode, Pattern, Subshift, Symbol, SystemChain, Word};

const PROB_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;
const MARGINAL_TOL: f64 = 1e-10;

/// Weighted atoms on one window. Each atom stands for the point of the
/// subshift obtained by completing it with the deterministic fill rule
/// (see [`complete`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSupport {
    window: Window,
    atoms: Vec<(Word, f64)>,
}

impl FiniteSupport {
    pub fn new(window: Window, atoms: Vec<(Word, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty("finite-support atoms"));
        }
        for (w, p) in &atoms {
            if w.len() != window.len() {
                return Err(Error::Window("atom does not match the support window".into()));
            }
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::Invalid(format!("atom weight {p} is not a probability")));
            }
        }
        Ok(FiniteSupport { window, atoms })
    }

    pub fn dirac(p: Pattern) -> Self {
        FiniteSupport { window: p.window().clone(), atoms: vec![(p.symbols().to_vec(), 1.0)] }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn atoms(&self) -> &[(Word, f64)] {
        &self.atoms
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }
}

/// A parametrized measure on a subshift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureSpec {
    /// I.i.d. symbols.
    Bernoulli { probs: Vec<f64> },
    /// A stationary first-order Markov chain on Z.
    Markov { stationary: Vec<f64>, transition: Vec<Vec<f64>> },
    /// Weighted completed patterns; in general not shift invariant.
    FiniteSupport(FiniteSupport),
}

impl MeasureSpec {
    pub fn bernoulli(probs: Vec<f64>) -> Result<Self> {
        check_distribution(&probs, "Bernoulli probabilities")?;
        Ok(MeasureSpec::Bernoulli { probs })
    }

    pub fn uniform(q: usize) -> Self {
        MeasureSpec::Bernoulli { probs: vec![1.0 / q as f64; q] }
    }

    /// A Markov measure whose stationary vector is solved from `transition`.
    pub fn markov(transition: Vec<Vec<f64>>) -> Result<Self> {
        let q = transition.len();
        for row in &transition {
            if row.len() != q {
                return Err(Error::Invalid("transition matrix is not square".into()));
            }
            check_distribution(row, "transition row")?;
        }
        let stationary = stationary_distribution(&transition)?;
        Ok(MeasureSpec::Markov { stationary, transition })
    }

    /// The Parry (maximal entropy) Markov measure of an irreducible
    /// nearest-neighbor Z-subshift.
    pub fn parry(s: &Subshift) -> Result<Self> {
        let (sites, pairs) = s.transition_mask()?;
        let q = s.size();
        let adj = DMatrix::from_fn(q, q, |i, j| if pairs[i][j] && sites[i] && sites[j] { 1.0 } else { 0.0 });
        let right = perron_vector(&adj)?;
        let left = perron_vector(&adj.transpose())?;
        let lambda = (&adj * &right).dot(&right) / right.dot(&right);
        let transition: Vec<Vec<f64>> = (0..q)
            .map(|i| {
                (0..q)
                    .map(|j| if right[i] > 0.0 { adj[(i, j)] * right[j] / (lambda * right[i]) } else { 0.0 })
                    .collect()
            })
            .collect();
        let norm = left.dot(&right);
        let stationary = (0..q).map(|i| left[i] * right[i] / norm).collect();
        Ok(MeasureSpec::Markov { stationary, transition })
    }

    pub fn is_invariant(&self) -> bool {
        !matches!(self, MeasureSpec::FiniteSupport(_))
    }

    /// Checks normalization, stationarity and that no forbidden cylinder
    /// carries mass.
    pub fn validate(&self, s: &Subshift) -> Result<()> {
        let q = s.size();
        match self {
            MeasureSpec::Bernoulli { probs } => {
                if probs.len() != q {
                    return Err(Error::Invalid(format!("{} probabilities for {q} symbols", probs.len())));
                }
                check_distribution(probs, "Bernoulli probabilities")?;
                for f in s.forbidden() {
                    let mass: f64 = f.symbols().iter().map(|&a| probs[a as usize]).product();
                    if mass > 0.0 {
                        return Err(Error::InadmissibleSupport(format!(
                            "forbidden pattern {:?} has positive Bernoulli mass",
                            f.symbols()
                        )));
                    }
                }
            }
            MeasureSpec::Markov { stationary, transition } => {
                if s.dim() != Dim::One {
                    return Err(Error::FamilyMismatch("Markov measures live on Z-subshifts only".into()));
                }
                if stationary.len() != q || transition.len() != q || transition.iter().any(|r| r.len() != q) {
                    return Err(Error::Invalid(format!("Markov parameters do not match {q} symbols")));
                }
                check_distribution(stationary, "stationary vector")?;
                for row in transition {
                    check_distribution(row, "transition row")?;
                }
                for j in 0..q {
                    let pj: f64 = (0..q).map(|i| stationary[i] * transition[i][j]).sum();
                    if (pj - stationary[j]).abs() > STATIONARY_TOL {
                        return Err(Error::Invalid(format!(
                            "stationary vector is not invariant: (πP)_{j} - π_{j} = {:e}",
                            pj - stationary[j]
                        )));
                    }
                }
                for f in s.forbidden() {
                    let mass = markov_cylinder(stationary, transition, f)?;
                    if mass > 0.0 {
                        return Err(Error::InadmissibleSupport(format!(
                            "forbidden pattern {:?} has Markov mass {mass:e}",
                            f.symbols()
                        )));
                    }
                }
            }
            MeasureSpec::FiniteSupport(fs) => {
                if fs.window.dim() != s.dim() {
                    return Err(Error::DimensionMismatch { expected: s.dim().rank(), found: fs.window.dim().rank() });
                }
                if (fs.total() - 1.0).abs() > 1e-9 {
                    return Err(Error::Invalid(format!("atom weights sum to {}", fs.total())));
                }
                for (w, _) in &fs.atoms {
                    let p = Pattern::new(fs.window.clone(), w.clone())?;
                    if !s.is_locally_admissible(&p)? {
                        return Err(Error::InadmissibleSupport(format!("atom {w:?} is not admissible")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Pushforward of a Bernoulli measure under a single-site code.
    pub fn push_bernoulli(&self, code: &BlockCode) -> Option<MeasureSpec> {
        match self {
            MeasureSpec::Bernoulli { probs } if code.is_single_site() => {
                let mut out = vec![0.0; code.target_size()];
                for (s, &p) in probs.iter().enumerate() {
                    out[code.rule(&[s as Symbol])? as usize] += p;
                }
                Some(MeasureSpec::Bernoulli { probs: out })
            }
            _ => None,
        }
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Empty("distribution"));
    }
    if p.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
        return Err(Error::Invalid(format!("{what} must be nonnegative")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::Invalid(format!("{what} sum to {total}, not 1")));
    }
    Ok(())
}

fn perron_vector(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    let q = m.nrows();
    // Iterating M + I avoids oscillation for periodic matrices.
    let lazy = m + DMatrix::identity(q, q);
    let mut v = DVector::from_element(q, 1.0 / q as f64);
    for _ in 0..100_000 {
        let next = &lazy * &v;
        let norm = next.sum();
        if norm == 0.0 {
            return Err(Error::Invalid("adjacency matrix has no Perron vector".into()));
        }
        let next = next / norm;
        let delta = (&next - &v).amax();
        v = next;
        if delta < 1e-16 {
            break;
        }
    }
    Ok(v)
}

/// Solves `πP = π`, `Σπ = 1`.
pub(crate) fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let q = transition.len();
    let mut a = DMatrix::from_fn(q, q, |i, j| transition[j][i] - if i == j { 1.0 } else { 0.0 });
    for j in 0..q {
        a[(q - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(q);
    b[q - 1] = 1.0;
    let solved = a.lu().solve(&b).filter(|x| x.iter().all(|v| v.is_finite() && *v > -1e-12));
    let mut pi: Vec<f64> = match solved {
        Some(x) => x.iter().map(|v| v.max(0.0)).collect(),
        None => {
            // Reducible chain: iterate the lazy chain to one of its stationary vectors.
            let mut v = vec![1.0 / q as f64; q];
            for _ in 0..1_000_000 {
                let next: Vec<f64> =
                    (0..q).map(|j| 0.5 * v[j] + 0.5 * (0..q).map(|i| v[i] * transition[i][j]).sum::<f64>()).collect();
                let delta = next.iter().zip(&v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                v = next;
                if delta < 1e-15 {
                    break;
                }
            }
            v
        }
    };
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    Ok(pi)
}

/// Probability of the cylinder of `p` under a stationary Markov measure.
fn markov_cylinder(stationary: &[f64], transition: &[Vec<f64>], p: &Pattern) -> Result<f64> {
    let (lo, hi) = p.window().hull_1d();
    let q = stationary.len();
    let allowed = |x: i64, s: usize| p.get(GroupPoint::d1(x)).is_none_or(|t| t as usize == s);
    let mut alpha: Vec<f64> = (0..q).map(|s| if allowed(lo, s) { stationary[s] } else { 0.0 }).collect();
    for x in lo + 1..=hi {
        alpha = (0..q)
            .map(|t| if allowed(x, t) { (0..q).map(|s| alpha[s] * transition[s][t]).sum() } else { 0.0 })
            .collect();
    }
    Ok(alpha.iter().sum())
}

/// Exact pattern probabilities on one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalTable {
    window: Window,
    probs: BTreeMap<Word, f64>,
}

impl MarginalTable {
    pub fn new(window: Window, probs: BTreeMap<Word, f64>) -> Result<Self> {
        if probs.keys().any(|w| w.len() != window.len()) {
            return Err(Error::Window("marginal entry does not match the window".into()));
        }
        if probs.values().any(|&p| !(p.is_finite() && p >= 0.0)) {
            return Err(Error::Invalid("marginal entries must be nonnegative".into()));
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > MARGINAL_TOL {
            return Err(Error::Invalid(format!("marginal sums to {total}")));
        }
        Ok(MarginalTable { window, probs })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn get(&self, word: &[Symbol]) -> f64 {
        self.probs.get(word).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, f64)> {
        self.probs.iter().map(|(w, &p)| (w, p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Marginal on a sub-window, by summing over the dropped sites.
    pub fn restrict(&self, sub: &Window) -> Result<MarginalTable> {
        let idx: Vec<usize> = sub
            .points()
            .iter()
            .map(|&p| {
                self.window.index_of(p).ok_or_else(|| Error::Window(format!("point {p} outside the marginal window")))
            })
            .collect::<Result<_>>()?;
        let mut probs = BTreeMap::new();
        for (w, &p) in &self.probs {
            let key: Word = idx.iter().map(|&i| w[i]).collect();
            *probs.entry(key).or_insert(0.0) += p;
        }
        Ok(MarginalTable { window: sub.clone(), probs })
    }

    /// Total variation distance `½ Σ |p - q|` to a table on a translate of
    /// this window, matching patterns point by point after translation.
    pub fn total_variation(&self, other: &MarginalTable) -> Result<f64> {
        if self.window.len() != other.window.len() {
            return Err(Error::Window("tables on different window shapes".into()));
        }
        let g = other.window.points()[0] - self.window.points()[0];
        if self.window.translate(g) != other.window {
            return Err(Error::Window("tables are not on translates of one window".into()));
        }
        let mut keys: Vec<&Word> = self.probs.keys().chain(other.probs.keys()).collect();
        keys.sort();
        keys.dedup();
        Ok(0.5 * keys.iter().map(|w| (self.get(w) - other.get(w)).abs()).sum::<f64>())
    }
}

/// Marginal of `m` on `window`.
pub fn marginal(m: &MeasureSpec, s: &Subshift, window: &Window, budget: usize) -> Result<MarginalTable> {
    if window.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim().rank(), found: window.dim().rank() });
    }
    let mut probs = BTreeMap::new();
    match m {
        MeasureSpec::Bernoulli { probs: p } => {
            if p.len() != s.size() {
                return Err(Error::Invalid("Bernoulli parameters do not match the alphabet".into()));
            }
            for w in enumerate_patterns(s, window, budget)?.words() {
                let mass: f64 = w.iter().map(|&a| p[a as usize]).product();
                if mass > 0.0 {
                    probs.insert(w.clone(), mass);
                }
            }
        }
        MeasureSpec::Markov { stationary, transition } => {
            if s.dim() != Dim::One {
                return Err(Error::FamilyMismatch("Markov marginals need a Z window".into()));
            }
            let (lo, hi) = window.hull_1d();
            let hull = Window::interval(lo, hi + 1)?;
            let mut full = BTreeMap::new();
            for w in enumerate_patterns(s, &hull, budget)?.words() {
                let mut mass = stationary[w[0] as usize];
                for pair in w.windows(2) {
                    mass *= transition[pair[0] as usize][pair[1] as usize];
                }
                if mass > 0.0 {
                    full.insert(w.clone(), mass);
                }
            }
            let table = MarginalTable { window: hull, probs: full };
            return if table.window == *window { checked(table) } else { checked(table.restrict(window)?) };
        }
        MeasureSpec::FiniteSupport(fs) => {
            for (w, p) in &fs.atoms {
                if *p == 0.0 {
                    continue;
                }
                let atom = Pattern::new(fs.window.clone(), w.clone())?;
                let q = complete(s, &atom, window)?;
                *probs.entry(q.symbols().to_vec()).or_insert(0.0) += p;
            }
        }
    }
    checked(MarginalTable { window: window.clone(), probs })
}

fn checked(t: MarginalTable) -> Result<MarginalTable> {
    let total = t.total();
    if (total - 1.0).abs() > MARGINAL_TOL {
        return Err(Error::InadmissibleSupport(format!(
            "marginal carries mass {total} on admissible patterns; the measure charges forbidden cylinders"
        )));
    }
    Ok(t)
}

/// Pushes a marginal through a block code onto `target`. Requires
/// `target ⊕ D ⊆` the marginal's window.
pub fn pushforward(t: &MarginalTable, code: &BlockCode, target: &Window) -> Result<MarginalTable> {
    let needed = target.minkowski(code.window())?;
    if !needed.is_subset(&t.window) {
        return Err(Error::Window("missing source marginal: source window does not cover target ⊕ code window".into()));
    }
    let compiled = code.compile(&t.window, target)?;
    let mut probs = BTreeMap::new();
    let mut buf = vec![0; target.len()];
    for (w, &p) in &t.probs {
        compiled.map(w, &mut buf)?;
        *probs.entry(buf.clone()).or_insert(0.0) += p;
    }
    Ok(MarginalTable { window: target.clone(), probs })
}

/// Marginal of `π^(level) μ` on `target`.
pub fn level_marginal(
    chain: &SystemChain,
    m: &MeasureSpec,
    level: usize,
    target: &Window,
    budget: usize,
) -> Result<MarginalTable> {
    entropy::coded_marginal(chain, m, level, target, budget)
}

/// Completes `atom` to a pattern on `target` by the deterministic fill rule:
/// on Z, sites right of the atom's first point are filled in increasing
/// order and sites left of it in decreasing order, each with the least
/// symbol keeping the pattern locally admissible; on Z^2 only full shifts
/// are supported and free sites get the least symbol.
pub fn complete(s: &Subshift, atom: &Pattern, target: &Window) -> Result<Pattern> {
    if target.is_subset(atom.window()) {
        return atom.restrict(target);
    }
    match s.dim() {
        Dim::Two => {
            if !s.is_full() {
                return Err(Error::Unsupported("completion on Z^2 requires a full shift".into()));
            }
            let symbols = target.points().iter().map(|&p| atom.get(p).unwrap_or(0)).collect();
            Pattern::new(target.clone(), symbols)
        }
        Dim::One => {
            let (alo, ahi) = atom.window().hull_1d();
            let (tlo, thi) = target.hull_1d();
            let (lo, hi) = (alo.min(tlo), ahi.max(thi));
            let mut assigned: BTreeMap<i64, Symbol> =
                atom.window().points().iter().zip(atom.symbols()).map(|(p, &a)| (p.x(), a)).collect();
            let order = (alo + 1..=hi).chain((lo..alo).rev());
            for x in order {
                if assigned.contains_key(&x) {
                    continue;
                }
                let choice = (0..s.size() as Symbol).find(|&a| {
                    assigned.insert(x, a);
                    let ok = placement_ok(s, &assigned, x);
                    assigned.remove(&x);
                    ok
                });
                match choice {
                    Some(a) => {
                        assigned.insert(x, a);
                    }
                    None => {
                        return Err(Error::EmptyCylinder(format!("greedy completion is stuck at site {x}")));
                    }
                }
            }
            let symbols = target.points().iter().map(|p| assigned[&p.x()]).collect();
            Pattern::new(target.clone(), symbols)
        }
    }
}

/// No forbidden pattern sits fully inside the assigned sites at a placement
/// covering `x`.
fn placement_ok(s: &Subshift, assigned: &BTreeMap<i64, Symbol>, x: i64) -> bool {
    s.forbidden().iter().all(|f| {
        f.window().points().iter().all(|&anchor| {
            let g = x - anchor.x();
            !f.window().points().iter().zip(f.symbols()).all(|(p, &a)| assigned.get(&(p.x() + g)) == Some(&a))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::DEFAULT_BUDGET;

    #[test]
    fn bernoulli_marginal_is_product() {
        let full = Subshift::full(2, Dim::One).unwrap();
        let t = marginal(&MeasureSpec::uniform(2), &full, &Window::interval(0, 2).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.iter().all(|(_, p)| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn parry_measure_gives_no_mass_to_forbidden_word() {
        let golden = Subshift::golden_mean();
        let parry = MeasureSpec::parry(&golden).unwrap();
        parry.validate(&golden).unwrap();
        let t = marginal(&parry, &golden, &Window::interval(0, 2).unwrap(), DEFAULT_BUDGET).unwrap();
        assert_eq!(t.get(&[1, 1]), 0.0);
        assert!((t.total() - 1.0).abs() < 1e-12);
        // Parry transition out of 0 is (1/φ, 1/φ²).
        if let MeasureSpec::Markov { transition, .. } = &parry {
            let phi = (1.0 + 5f64.sqrt()) / 2.0;
            assert!((transition[0][0] - 1.0 / phi).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_support_restriction() {
        let full = Subshift::full(2, Dim::One).unwrap();
        let fs = FiniteSupport::dirac(Pattern::word_at(0, &[0, 1]).unwrap());
        let t = marginal(&MeasureSpec::FiniteSupport(fs), &full, &Window::origin(Dim::One), DEFAULT_BUDGET).unwrap();
        assert_eq!(t.get(&[0]), 1.0);
    }

    #[test]
    fn bernoulli_on_subshift_must_avoid_forbidden_words() {
        let golden = Subshift::golden_mean();
        assert!(matches!(MeasureSpec::uniform(2).validate(&golden), Err(Error::InadmissibleSupport(_))));
        MeasureSpec::bernoulli(vec![1.0, 0.0]).unwrap().validate(&golden).unwrap();
        let bad = MeasureSpec::markov(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(bad.validate(&golden), Err(Error::InadmissibleSupport(_))));
    }

    #[test]
    fn markov_needs_z() {
        let full = Subshift::full(2, Dim::Two).unwrap();
        let m = MeasureSpec::markov(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(m.validate(&full), Err(Error::FamilyMismatch(_))));
    }

    #[test]
    fn uniform_pushes_to_uniform_under_collapse() {
        let code = BlockCode::symbol_map(&[0, 0, 1, 1], 2, Dim::One).unwrap();
        let full4 = Subshift::full(4, Dim::One).unwrap();
        let e = Window::interval(0, 3).unwrap();
        let src = marginal(&MeasureSpec::uniform(4), &full4, &e, DEFAULT_BUDGET).unwrap();
        let t = pushforward(&src, &code, &e).unwrap();
        assert_eq!(t.len(), 8);
        assert!(t.iter().all(|(_, p)| (p - 0.125).abs() < 1e-15));
        assert!(matches!(pushforward(&src, &code, &Window::interval(0, 4).unwrap()), Err(Error::Window(_))));
    }

    #[test]
    fn pushforward_of_point_mass_and_identity() {
        let full = Subshift::full(3, Dim::One).unwrap();
        let e = Window::interval(0, 3).unwrap();
        let atom = Pattern::word_at(0, &[2, 0, 1]).unwrap();
        let dirac = MeasureSpec::FiniteSupport(FiniteSupport::dirac(atom));
        let t = marginal(&dirac, &full, &e, DEFAULT_BUDGET).unwrap();
        let code = BlockCode::symbol_map(&[0, 1, 1], 2, Dim::One).unwrap();
        let pushed = pushforward(&t, &code, &e).unwrap();
        assert_eq!(pushed.get(&[1, 0, 1]), 1.0);
        let id = BlockCode::identity(3, Dim::One).unwrap();
        assert_eq!(pushforward(&t, &id, &e).unwrap(), t);
    }

    #[test]
    fn greedy_completion_respects_constraints() {
        let golden = Subshift::golden_mean();
        let atom = Pattern::word_at(0, &[1]).unwrap();
        let q = complete(&golden, &atom, &Window::interval(-2, 3).unwrap()).unwrap();
        assert_eq!(q.symbols(), &[0, 0, 1, 0, 0]);
        assert!(golden.is_locally_admissible(&q).unwrap());
    }

    #[test]
    fn restriction_is_consistent() {
        let m = MeasureSpec::markov(vec![vec![0.2, 0.8], vec![0.6, 0.4]]).unwrap();
        let full = Subshift::full(2, Dim::One).unwrap();
        let big = marginal(&m, &full, &Window::interval(0, 5).unwrap(), DEFAULT_BUDGET).unwrap();
        let sub = Window::new(Dim::One, [GroupPoint::d1(1), GroupPoint::d1(3)]).unwrap();
        let a = big.restrict(&sub).unwrap();
        let b = marginal(&m, &full, &sub, DEFAULT_BUDGET).unwrap();
        for (w, p) in a.iter() {
            assert!((p - b.get(w)).abs() < 1e-12);
        }
    }
}
