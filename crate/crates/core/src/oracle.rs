//! Brute-force recomputations that share no code path with the main engine:
//! odometer enumeration with a naive admissibility scan, plain `exp` sums,
//! exact integer matrix powers, and a simplex grid search.

use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{Dim, FolnerSchedule, Window};
use crate::potential::Potential;
use crate::pressure::{CylinderScheme, ExponentVector};
use crate::symbolic::{Subshift, Symbol, SystemChain, Word};

/// Largest total number of words the odometer oracles will visit.
pub const ORACLE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    ExhaustiveEnumeration,
    TransferMatrix,
    GridSearch,
}

impl OracleMethod {
    pub fn tag(self) -> &'static str {
        match self {
            OracleMethod::ExhaustiveEnumeration => "exhaustive-enumeration",
            OracleMethod::TransferMatrix => "transfer-matrix",
            OracleMethod::GridSearch => "grid-search",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub method: OracleMethod,
    /// SHA-256 of the method tag and the instance description.
    pub digest: String,
}

/// Reproducible SHA-256 over the `Debug` rendering of each part.
pub fn instance_digest(method: OracleMethod, parts: &[&dyn Debug]) -> String {
    let mut h = Sha256::new();
    h.update(method.tag().as_bytes());
    for p in parts {
        h.update(b"\n");
        h.update(format!("{p:?}").as_bytes());
    }
    hex::encode(h.finalize())
}

/// Every word over `q` symbols on `len` sites, last site fastest.
struct Odometer {
    q: Symbol,
    word: Word,
    started: bool,
}

impl Odometer {
    fn new(q: usize, len: usize) -> Self {
        Odometer { q: q as Symbol, word: vec![0; len], started: false }
    }

    fn advance(&mut self) -> Option<&[Symbol]> {
        if !self.started {
            self.started = true;
            return Some(&self.word);
        }
        for i in (0..self.word.len()).rev() {
            if self.word[i] + 1 < self.q {
                self.word[i] += 1;
                return Some(&self.word);
            }
            self.word[i] = 0;
        }
        None
    }
}

fn odometer_size(q: usize, len: usize) -> f64 {
    (q as f64).powi(len as i32)
}

/// No forbidden pattern matches at any placement inside `w`.
fn naive_admissible(s: &Subshift, w: &Window, word: &[Symbol]) -> bool {
    for f in s.forbidden() {
        let d0 = f.window().points()[0];
        for &p in w.points() {
            let t = p - d0;
            let mut matched = true;
            for (&d, &a) in f.window().points().iter().zip(f.symbols()) {
                match w.index_of(d + t) {
                    Some(i) if word[i] == a => {}
                    _ => {
                        matched = false;
                        break;
                    }
                }
            }
            if matched {
                return false;
            }
        }
    }
    true
}

fn naive_words(s: &Subshift, w: &Window) -> Vec<Word> {
    let mut out = Vec::new();
    let mut odo = Odometer::new(s.size(), w.len());
    while let Some(word) = odo.advance() {
        if naive_admissible(s, w, word) {
            out.push(word.to_vec());
        }
    }
    out
}

fn local_at(w: &Window, word: &[Symbol], g: crate::group::GroupPoint, d: &Window) -> Result<Word> {
    d.points()
        .iter()
        .map(|&x| w.index_of(g + x).map(|i| word[i]).ok_or_else(|| Error::Window(format!("site {} missing", g + x))))
        .collect()
}

/// `log Z_F` by direct nested loops, no memoized fiber structure and no
/// log-domain stabilisation.
pub fn brute_force_logz(
    chain: &SystemChain,
    f: &Potential,
    a: &ExponentVector,
    window: &Window,
    scheme: &CylinderScheme,
) -> Result<OracleResult> {
    let r = chain.levels();
    if a.levels() != r || scheme.levels() != r {
        return Err(Error::Invalid("exponents or scheme do not match the chain".into()));
    }
    let windows: Vec<Window> = (0..r).map(|l| scheme.level_window(l, window)).collect::<Result<_>>()?;
    let union = windows[0].union(&window.minkowski(f.window())?)?;
    let mut total = odometer_size(chain.system(0).size(), union.len());
    for (l, w) in windows.iter().enumerate().skip(1) {
        total += odometer_size(chain.system(l).size(), w.len());
    }
    if total > ORACLE_LIMIT as f64 {
        return Err(Error::Budget { sites: union.len(), bound: total, budget: ORACLE_LIMIT });
    }

    // sup over admissible completions, keyed by the level-0 cylinder.
    let s0 = chain.system(0);
    let base_idx: Vec<usize> = windows[0].points().iter().map(|&p| union.index_of(p).expect("subset")).collect();
    let mut sup: BTreeMap<Word, f64> = BTreeMap::new();
    let mut odo = Odometer::new(s0.size(), union.len());
    while let Some(word) = odo.advance() {
        if !naive_admissible(s0, &union, word) {
            continue;
        }
        let mut birkhoff = 0.0;
        for &g in window.points() {
            let local = local_at(&union, word, g, f.window())?;
            birkhoff += f.eval(&local).ok_or_else(|| Error::Invalid(format!("potential has no row for {local:?}")))?;
        }
        let key: Word = base_idx.iter().map(|&i| word[i]).collect();
        let e = sup.entry(key).or_insert(f64::NEG_INFINITY);
        if birkhoff > *e {
            *e = birkhoff;
        }
    }
    for v in naive_words(s0, &windows[0]) {
        if !sup.contains_key(&v) {
            return Err(Error::EmptyCylinder(format!("pattern {v:?} has no admissible extension")));
        }
    }

    // Level by level: Z(U) = Σ_{V ↦ U} value(V)^{exponent}.
    let mut values: Vec<(Word, f64)> = sup.into_iter().map(|(w, s)| (w, s.exp())).collect();
    let mut exponent = 1.0;
    for l in 0..r - 1 {
        let code = chain.code(l);
        let targets = naive_words(chain.system(l + 1), &windows[l + 1]);
        let mut z: BTreeMap<Word, f64> = targets.iter().map(|u| (u.clone(), 0.0)).collect();
        for (v, val) in &values {
            let image: Word = windows[l + 1]
                .points()
                .iter()
                .map(|&g| {
                    let local = local_at(&windows[l], v, g, code.window())?;
                    code.rule(&local).ok_or_else(|| Error::Invalid(format!("code {l} has no rule for {local:?}")))
                })
                .collect::<Result<_>>()?;
            let slot = z.get_mut(&image).ok_or_else(|| {
                Error::InadmissibleSupport(format!("image {image:?} is not admissible at level {}", l + 1))
            })?;
            *slot += val.powf(exponent);
        }
        if let Some((u, _)) = z.iter().find(|(_, &v)| v == 0.0) {
            return Err(Error::EmptyFiber { level: l + 1, detail: format!("pattern {u:?} has no preimage") });
        }
        values = z.into_iter().collect();
        exponent = a.as_slice()[l];
    }
    let z: f64 = values.iter().map(|(_, v)| v.powf(exponent)).sum();
    let method = OracleMethod::ExhaustiveEnumeration;
    Ok(OracleResult { value: z.ln(), method, digest: instance_digest(method, &[chain, f, a, window, scheme]) })
}

/// Number of admissible length-`n` words of a nearest-neighbor Z-subshift,
/// by exact powers of its 0/1 transition matrix.
pub fn transfer_matrix_count(s: &Subshift, n: usize) -> Result<u128> {
    if s.dim() != Dim::One {
        return Err(Error::Unsupported("transfer matrices need a Z-subshift".into()));
    }
    let q = s.size();
    let mut site = vec![true; q];
    let mut pair = vec![vec![true; q]; q];
    for f in s.forbidden() {
        let pts = f.window().points();
        match (pts, f.symbols()) {
            ([_], [a]) => site[*a as usize] = false,
            ([x, y], [a, b]) if y.x() == x.x() + 1 => pair[*a as usize][*b as usize] = false,
            _ => {
                return Err(Error::Unsupported(format!("forbidden pattern {:?} is not nearest-neighbor", f.symbols())))
            }
        }
    }
    if n == 0 {
        return Ok(1);
    }
    let mut v: Vec<u128> = site.iter().map(|&ok| ok as u128).collect();
    for _ in 1..n {
        let mut next = vec![0u128; q];
        for (j, slot) in next.iter_mut().enumerate() {
            if !site[j] {
                continue;
            }
            for i in 0..q {
                if pair[i][j] {
                    *slot = slot.checked_add(v[i]).ok_or(Error::Overflow("transfer matrix count"))?;
                }
            }
        }
        v = next;
    }
    v.iter().try_fold(0u128, |acc, &x| acc.checked_add(x).ok_or(Error::Overflow("transfer matrix count")))
}

/// Result of a grid search: the oracle value and the best grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearch {
    pub result: OracleResult,
    pub best: Vec<f64>,
    pub points: usize,
}

/// Best weighted objective over Bernoulli measures with probabilities on
/// the grid `resolution · ℕ`, for single-site codes and potentials.
pub fn grid_search_objective(
    chain: &SystemChain,
    f: &Potential,
    a: &ExponentVector,
    resolution: f64,
) -> Result<GridSearch> {
    let q = chain.system(0).size();
    let steps = (1.0 / resolution).round();
    if !(resolution > 0.0 && resolution <= 0.01) || ((1.0 / resolution) - steps).abs() > 1e-9 {
        return Err(Error::Invalid(format!("resolution {resolution} must lie in (0, 0.01] and divide 1")));
    }
    if q > 4 || !chain.system(0).is_full() {
        return Err(Error::Unsupported("grid search needs a full shift on at most 4 symbols".into()));
    }
    if !f.is_single_site() || chain.codes().iter().any(|c| !c.is_single_site()) {
        return Err(Error::Unsupported("grid search needs single-site codes and potential".into()));
    }
    if a.levels() != chain.levels() {
        return Err(Error::Invalid("exponents do not match the chain".into()));
    }
    let steps = steps as usize;
    let w = a.weights();
    let w = w.as_slice();
    let fvals: Vec<f64> = (0..q)
        .map(|s| f.eval(&[s as Symbol]).ok_or_else(|| Error::Invalid(format!("potential has no row for {s}"))))
        .collect::<Result<_>>()?;
    let entropy = |p: &[f64]| -> f64 {
        let mut h = 0.0;
        for &x in p {
            if x > 0.0 {
                h -= x * x.ln();
            }
        }
        h
    };
    let score = |p: &[f64]| -> f64 {
        let mut total = 0.0;
        let mut cur = p.to_vec();
        for (level, &wl) in w.iter().enumerate() {
            if level > 0 {
                let code = chain.code(level - 1);
                let mut next = vec![0.0; code.target_size()];
                for (s, &x) in cur.iter().enumerate() {
                    next[code.rule(&[s as Symbol]).expect("total single-site rule") as usize] += x;
                }
                cur = next;
            }
            total += wl * entropy(&cur);
        }
        total + w[0] * p.iter().zip(&fvals).map(|(x, v)| x * v).sum::<f64>()
    };

    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut points = 0;
    let mut counts = vec![0usize; q];
    // Enumerate compositions of `steps` into q parts.
    fn visit(i: usize, left: usize, counts: &mut [usize], f: &mut dyn FnMut(&[usize])) {
        if i + 1 == counts.len() {
            counts[i] = left;
            f(counts);
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            visit(i + 1, left - c, counts, f);
        }
    }
    visit(0, steps, &mut counts, &mut |c| {
        let p: Vec<f64> = c.iter().map(|&k| k as f64 / steps as f64).collect();
        let v = score(&p);
        points += 1;
        if v > best.0 {
            best = (v, p);
        }
    });
    let method = OracleMethod::GridSearch;
    Ok(GridSearch {
        result: OracleResult { value: best.0, method, digest: instance_digest(method, &[chain, f, a, &resolution]) },
        best: best.1,
        points,
    })
}

/// `log Σ e^{a_i} - Σ (-p_i log p_i + p_i a_i)`; nonnegative on the simplex.
pub fn walters_inequality(p: &[f64], a: &[f64]) -> Result<f64> {
    if p.len() != a.len() || p.is_empty() {
        return Err(Error::Invalid("p and a must be nonempty and of equal length".into()));
    }
    if p.iter().any(|x| x.is_nan() || *x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid("p is not on the simplex".into()));
    }
    let top = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = top + a.iter().map(|x| (x - top).exp()).sum::<f64>().ln();
    let mut gibbs = 0.0;
    for (&pi, &ai) in p.iter().zip(a) {
        if pi > 0.0 {
            gibbs += -pi * pi.ln() + pi * ai;
        }
    }
    Ok(lse - gibbs)
}

/// A `FolnerSchedule`-indexed list of transfer-matrix counts, convenient for
/// cross-checks against enumeration.
pub fn transfer_matrix_counts(s: &Subshift, schedule: &FolnerSchedule) -> Result<Vec<(usize, u128)>> {
    schedule.indices().map(|n| Ok((n, transfer_matrix_count(s, n)?))).collect()
}
