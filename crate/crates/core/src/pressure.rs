//! Exponent and weight vectors, the nested partition function `Z_F` over
//! cylinder fibers, and pressure estimates along Følner schedules.
//!
//! For a chain `X_1 → … → X_r` and exponents `a_1..a_{r-1}` in `[0,1]`,
//! cylinders at level `i` over `F` are the locally admissible patterns on
//! `F ⊕ E_i`. The partition function is built bottom up:
//!
//! ```text
//! Z^(1)(U) = Σ_{V ∈ fiber(U)} exp(sup_V S_F f)          U at level 2
//! Z^(i)(U) = Σ_{V ∈ fiber(U)} Z^(i-1)(V)^{a_{i-1}}      U at level i+1
//! Z_F      = Σ_{U at level r} Z^(r-1)(U)^{a_{r-1}}
//! ```
//!
//! Everything is carried in log space.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{subadditive_limit, FolnerSchedule, Window};
use crate::logspace::{log_sum_exp, LogSumExp};
use crate::potential::{Potential, SupEvaluator};
use crate::symbolic::{enumerate_patterns, fiber_decomposition, for_each_pattern, PatternSet, SystemChain, Word};

/// Exponents `a = (a_1, …, a_{r-1})`, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentVector(Vec<f64>);

impl ExponentVector {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Empty("exponent vector"));
        }
        for (index, &value) in a.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ExponentOutOfRange { index, value });
            }
        }
        Ok(ExponentVector(a))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of levels the exponents are meant for.
    pub fn levels(&self) -> usize {
        self.0.len() + 1
    }

    pub fn weights(&self) -> WeightVector {
        weights_from_exponents(self)
    }
}

/// The probability vector `ω = (w_1, …, w_r)` attached to an exponent vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `w_1 = a_1⋯a_{r-1}`, `w_i = (1 - a_{i-1}) a_i⋯a_{r-1}`, `w_r = 1 - a_{r-1}`.
pub fn weights_from_exponents(a: &ExponentVector) -> WeightVector {
    let a = a.as_slice();
    let r = a.len() + 1;
    let tail = |from: usize| a[from..].iter().product::<f64>();
    let mut w = Vec::with_capacity(r);
    w.push(tail(0));
    for i in 1..r {
        w.push((1.0 - a[i - 1]) * tail(i));
    }
    WeightVector(w)
}

/// Base windows `E_1..E_r` of the per-level clopen partitions, with
/// `E_i ⊇ E_{i+1} ⊕ D_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderScheme {
    bases: Vec<Window>,
    refinement: usize,
}

impl CylinderScheme {
    pub fn new(chain: &SystemChain, bases: Vec<Window>, refinement: usize) -> Result<Self> {
        if bases.len() != chain.levels() {
            return Err(Error::Invalid(format!(
                "scheme has {} base windows for {} levels",
                bases.len(),
                chain.levels()
            )));
        }
        for (level, pair) in bases.windows(2).enumerate() {
            let needed = pair[1].minkowski(chain.code(level).window())?;
            if !needed.is_subset(&pair[0]) {
                return Err(Error::Window(format!(
                    "base window at level {level} does not contain the next base window ⊕ code window"
                )));
            }
        }
        Ok(CylinderScheme { bases, refinement })
    }

    /// Top level base `[0, k]^d` for refinement `k`, pulled back with the
    /// minimal compatible windows `E_i = E_{i+1} ⊕ D_i`.
    pub fn standard(chain: &SystemChain, refinement: usize) -> Result<Self> {
        let top = Window::cube(chain.dim(), 0, refinement as i64 + 1)?;
        let mut bases = vec![top];
        for level in (0..chain.levels() - 1).rev() {
            let next = bases.last().expect("nonempty").minkowski(chain.code(level).window())?;
            bases.push(next);
        }
        bases.reverse();
        CylinderScheme::new(chain, bases, refinement)
    }

    pub fn refinement(&self) -> usize {
        self.refinement
    }

    pub fn base(&self, level: usize) -> &Window {
        &self.bases[level]
    }

    pub fn levels(&self) -> usize {
        self.bases.len()
    }

    /// `F ⊕ E_level`, the window the level-`level` cylinders over `F` live on.
    pub fn level_window(&self, level: usize, f: &Window) -> Result<Window> {
        f.minkowski(&self.bases[level])
    }
}

fn check_instance(chain: &SystemChain, f: &Potential, a: &ExponentVector, scheme: &CylinderScheme) -> Result<()> {
    if a.levels() != chain.levels() {
        return Err(Error::Invalid(format!("{} exponents given for a chain of {} levels", a.len(), chain.levels())));
    }
    if scheme.levels() != chain.levels() {
        return Err(Error::Invalid("scheme does not match the chain".into()));
    }
    let base = chain.system(0);
    if f.alphabet_size() != base.size() || f.window().dim() != base.dim() {
        return Err(Error::Invalid(format!("potential '{}' does not live on the level-0 system", f.name())));
    }
    Ok(())
}

/// Folds a map of accumulated fiber sums against the enumerated patterns of
/// the next level, in enumeration order.
fn collect_level(set: &PatternSet, sums: HashMap<Word, LogSumExp>, level: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(set.len());
    for w in set.words() {
        let acc =
            sums.get(w).ok_or_else(|| Error::EmptyFiber { level, detail: format!("pattern {w:?} has no preimage") })?;
        out.push(acc.value());
    }
    if out.len() != sums.len() {
        return Err(Error::InadmissibleSupport(format!(
            "{} coded patterns are not locally admissible at level {level}",
            sums.len() - out.len()
        )));
    }
    Ok(out)
}

/// `log Z_F`.
///
/// Level-0 patterns are streamed and summed into their level-1 fibers; only
/// the fiber sums are kept in memory.
pub fn nested_partition_function(
    chain: &SystemChain,
    f: &Potential,
    a: &ExponentVector,
    window: &Window,
    scheme: &CylinderScheme,
    budget: usize,
) -> Result<f64> {
    check_instance(chain, f, a, scheme)?;
    let r = chain.levels();
    let a = a.as_slice();
    let windows: Vec<Window> = (0..r).map(|l| scheme.level_window(l, window)).collect::<Result<_>>()?;

    let sup = SupEvaluator::new(f, chain.system(0), window, &windows[0])?;
    let code = chain.code(0).compile(&windows[0], &windows[1])?;
    let mut sums: HashMap<Word, LogSumExp> = HashMap::new();
    let mut buf: Word = vec![0; windows[1].len()];
    let mut failure = None;
    for_each_pattern(chain.system(0), &windows[0], budget, |w| {
        if failure.is_some() {
            return;
        }
        let step = sup.sup(w).and_then(|s| code.map(w, &mut buf).map(|_| s));
        match step {
            Ok(s) => match sums.get_mut(buf.as_slice()) {
                Some(acc) => acc.push(s),
                None => {
                    let mut acc = LogSumExp::new();
                    acc.push(s);
                    sums.insert(buf.clone(), acc);
                }
            },
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }

    let mut level = 1;
    loop {
        let set = enumerate_patterns(chain.system(level), &windows[level], budget)?;
        let log_z = collect_level(&set, sums, level)?;
        let exponent = a[level - 1];
        if level == r - 1 {
            return Ok(log_sum_exp(log_z.iter().map(|&z| exponent * z)));
        }
        let code = chain.code(level).compile(&windows[level], &windows[level + 1])?;
        let mut next: HashMap<Word, LogSumExp> = HashMap::new();
        let mut buf: Word = vec![0; windows[level + 1].len()];
        for (w, &z) in set.words().iter().zip(&log_z) {
            code.map(w, &mut buf)?;
            next.entry(buf.clone()).or_default().push(exponent * z);
        }
        sums = next;
        level += 1;
    }
}

/// Every cylinder of every level over one window, with the fiber links and
/// all intermediate partition sums.
#[derive(Debug, Clone)]
pub struct PartitionTree {
    /// `F ⊕ E_level` for each level.
    pub windows: Vec<Window>,
    pub levels: Vec<PatternSet>,
    /// `parent[l][i]`: index at level `l+1` of the image of pattern `i` at level `l`.
    pub parent: Vec<Vec<usize>>,
    /// `sup_V S_F f` for each level-0 cylinder `V`.
    pub sup: Vec<f64>,
    /// Window of the maximizing completions `x_V`.
    pub completion_window: Window,
    /// Lexicographically least maximizing completion for each level-0 cylinder.
    pub completion: Vec<Word>,
    /// `log_z[l][j] = log Z^(l)(U_j)` for cylinders `U_j` at level `l ≥ 1`;
    /// `log_z[0]` is empty.
    pub log_z: Vec<Vec<f64>>,
    /// `log Z_F`.
    pub log_total: f64,
}

impl PartitionTree {
    pub fn build(
        chain: &SystemChain,
        f: &Potential,
        a: &ExponentVector,
        window: &Window,
        scheme: &CylinderScheme,
        budget: usize,
    ) -> Result<Self> {
        check_instance(chain, f, a, scheme)?;
        let r = chain.levels();
        let av = a.as_slice();
        let windows: Vec<Window> = (0..r).map(|l| scheme.level_window(l, window)).collect::<Result<_>>()?;
        let mut levels = Vec::with_capacity(r);
        let mut parent = Vec::with_capacity(r - 1);
        let mut members = Vec::with_capacity(r - 1);
        for l in 0..r - 1 {
            let fib = fiber_decomposition(chain, l, &windows[l], &windows[l + 1], budget)?;
            levels.push(fib.source);
            parent.push(fib.image);
            members.push(fib.members);
            if l == r - 2 {
                levels.push(fib.target);
            }
        }

        let eval = SupEvaluator::new(f, chain.system(0), window, &windows[0])?;
        let mut sup = Vec::with_capacity(levels[0].len());
        let mut completion = Vec::with_capacity(levels[0].len());
        for w in levels[0].words() {
            let (s, x) = eval.argmax(w)?;
            sup.push(s);
            completion.push(x);
        }

        let mut log_z = vec![Vec::new()];
        log_z.push(members[0].iter().map(|m| log_sum_exp(m.iter().map(|&i| sup[i]))).collect());
        for l in 2..r {
            let prev = &log_z[l - 1];
            let cur = members[l - 1].iter().map(|m| log_sum_exp(m.iter().map(|&i| av[l - 2] * prev[i]))).collect();
            log_z.push(cur);
        }
        let log_total = log_sum_exp(log_z[r - 1].iter().map(|&z| av[r - 2] * z));
        Ok(PartitionTree {
            windows,
            levels,
            parent,
            sup,
            completion_window: eval.union().clone(),
            completion,
            log_z,
            log_total,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    /// Index at `level` of the cylinder containing the image of level-0
    /// cylinder `i`.
    pub fn ancestor(&self, mut i: usize, level: usize) -> usize {
        for l in 0..level {
            i = self.parent[l][i];
        }
        i
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureRow {
    pub n: usize,
    pub size: usize,
    pub refinement: usize,
    pub log_z: f64,
    /// `log Z_{F_n} / |F_n|`
    pub value: f64,
    pub running_inf: f64,
}

/// Per-scale readout of `log Z_{F_n} / |F_n|` at one scheme refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureEstimate {
    pub rows: Vec<PressureRow>,
    pub refinement: usize,
    pub exponents: Vec<f64>,
    pub potential: String,
    /// Final running infimum.
    pub estimate: f64,
    pub spread: f64,
}

impl PressureEstimate {
    pub fn row(&self, n: usize) -> Option<&PressureRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

pub fn pressure_estimate(
    chain: &SystemChain,
    f: &Potential,
    a: &ExponentVector,
    schedule: &FolnerSchedule,
    scheme: &CylinderScheme,
    budget: usize,
) -> Result<PressureEstimate> {
    if schedule.dim != chain.dim() {
        return Err(Error::DimensionMismatch { expected: chain.dim().rank(), found: schedule.dim.rank() });
    }
    let mut values = BTreeMap::new();
    let mut sizes = BTreeMap::new();
    for n in schedule.indices() {
        let w = schedule.window(n)?;
        values.insert(n, nested_partition_function(chain, f, a, &w, scheme, budget)?);
        sizes.insert(n, w.len());
    }
    let readout = subadditive_limit(&values, &sizes)?;
    let rows = readout
        .rows
        .iter()
        .map(|r| PressureRow {
            n: r.n,
            size: r.size,
            refinement: scheme.refinement(),
            log_z: values[&r.n],
            value: r.value,
            running_inf: r.running_inf,
        })
        .collect();
    Ok(PressureEstimate {
        rows,
        refinement: scheme.refinement(),
        exponents: a.as_slice().to_vec(),
        potential: f.name().to_string(),
        estimate: readout.estimate,
        spread: readout.spread,
    })
}

/// Pressure estimates for each refinement in `refinements`, using standard
/// schemes.
pub fn pressure_sweep(
    chain: &SystemChain,
    f: &Potential,
    a: &ExponentVector,
    schedule: &FolnerSchedule,
    refinements: std::ops::RangeInclusive<usize>,
    budget: usize,
) -> Result<Vec<PressureEstimate>> {
    refinements
        .map(|k| {
            let scheme = CylinderScheme::standard(chain, k)?;
            pressure_estimate(chain, f, a, schedule, &scheme, budget)
        })
        .collect()
}
