use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Dim, FolnerSchedule, Window};
use crate::symbolic::{BlockCode, CompiledCode, Subshift, Symbol, SystemChain, Word};

use super::{marginal, pushforward, MarginalTable, MeasureSpec};

/// `Σ -p log p` in nats, with `0 log 0 = 0`.
pub fn partition_entropy(t: &MarginalTable) -> f64 {
    t.iter().filter(|(_, p)| *p > 0.0).map(|(_, p)| -p * p.ln()).sum()
}

/// `H(α ∨ β) - H(β)` where the joint table lives on `α ∨ β`'s window and
/// `β` is the partition by the symbols on `given`.
pub fn conditional_entropy(joint: &MarginalTable, given: &Window) -> Result<f64> {
    if !given.is_subset(joint.window()) {
        return Err(Error::Window("inconsistent joint: conditioning window is not inside the joint window".into()));
    }
    Ok(partition_entropy(joint) - partition_entropy(&joint.restrict(given)?))
}

pub fn bernoulli_entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

/// `Σ_i π_i Σ_j -P_ij log P_ij`.
pub fn markov_entropy_rate(stationary: &[f64], transition: &[Vec<f64>]) -> f64 {
    stationary.iter().zip(transition).map(|(pi, row)| pi * bernoulli_entropy(row)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub n: usize,
    pub size: usize,
    /// `H(α_{F_n ⊕ B}) / |F_n|`.
    pub block: f64,
    /// `H(α_{[0,n+1) ⊕ B}) - H(α_{[0,n) ⊕ B})`; an upper bound on the rate.
    pub conditional: Option<f64>,
    /// Conditional entropy of the next block given the past blocks and the
    /// initial hidden state; a lower bound on the rate for Bernoulli and Markov
    /// sources.
    pub lower: Option<f64>,
}

/// A verified bracket `[lower, upper]` around an entropy rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyBounds {
    pub rows: Vec<EntropyRow>,
    pub closed_form: Option<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl EntropyBounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// A measure on level 0 seen through a stack of codes.
struct Coded<'a> {
    s0: &'a Subshift,
    codes: Vec<&'a BlockCode>,
    top: &'a Subshift,
}

impl<'a> Coded<'a> {
    fn level(chain: &'a SystemChain, level: usize) -> Result<Self> {
        if level >= chain.levels() {
            return Err(Error::Invalid(format!("level {level} outside a chain of {} systems", chain.levels())));
        }
        Ok(Coded { s0: chain.system(0), codes: chain.codes()[..level].iter().collect(), top: chain.system(level) })
    }

    fn plain(s: &'a Subshift) -> Self {
        Coded { s0: s, codes: Vec::new(), top: s }
    }

    fn dim(&self) -> Dim {
        self.s0.dim()
    }

    /// Windows `[W_0, …, W_L = target]` with `W_l = W_{l+1} ⊕ D_l`.
    fn windows(&self, target: &Window) -> Result<Vec<Window>> {
        let mut ws = vec![target.clone()];
        for code in self.codes.iter().rev() {
            let next = ws.last().expect("nonempty").minkowski(code.window())?;
            ws.push(next);
        }
        ws.reverse();
        Ok(ws)
    }

    fn marginal(&self, m: &MeasureSpec, target: &Window, budget: usize) -> Result<MarginalTable> {
        let ws = self.windows(target)?;
        let mut t = marginal(m, self.s0, &ws[0], budget)?;
        for (code, w) in self.codes.iter().zip(&ws[1..]) {
            t = pushforward(&t, code, w)?;
        }
        Ok(t)
    }

    /// Closed-form entropy rate where one is known.
    fn closed_form(&self, m: &MeasureSpec) -> Option<f64> {
        if self.top.size() == 1 {
            return Some(0.0);
        }
        match m {
            MeasureSpec::Bernoulli { .. } => {
                let mut cur = m.clone();
                for code in &self.codes {
                    cur = cur.push_bernoulli(code)?;
                }
                match cur {
                    MeasureSpec::Bernoulli { probs } => Some(bernoulli_entropy(&probs)),
                    _ => None,
                }
            }
            MeasureSpec::Markov { stationary, transition } => {
                // Single-site codes injective on the support are conjugacies.
                let mut image: Vec<Option<Symbol>> = (0..stationary.len() as Symbol).map(Some).collect();
                for code in &self.codes {
                    if !code.is_single_site() {
                        return None;
                    }
                    for s in image.iter_mut() {
                        *s = s.and_then(|x| code.rule(&[x]));
                    }
                }
                let mut seen = BTreeMap::new();
                for (i, s) in image.iter().enumerate() {
                    if stationary[i] > 0.0 && seen.insert((*s)?, i).is_some() {
                        return None;
                    }
                }
                Some(markov_entropy_rate(stationary, transition))
            }
            MeasureSpec::FiniteSupport(_) => None,
        }
    }

    /// `(H(Y on [0,n)⊕B), H(Y on [0,n+1)⊕B), lower)` from one level-0
    /// marginal on the hull of the pulled-back window.
    fn interval_terms(&self, m: &MeasureSpec, base: &Window, n: usize, budget: usize) -> Result<(f64, f64, f64)> {
        let short = Window::interval(0, n as i64)?.minkowski(base)?;
        let long = Window::interval(0, n as i64 + 1)?.minkowski(base)?;
        let pulled = self.windows(&long)?.remove(0);
        let state = self.windows(base)?.remove(0);
        let (s_lo, s_hi) = state.hull_1d();
        let (p_lo, p_hi) = pulled.hull_1d();
        let src = Window::interval(s_lo.min(p_lo), s_hi.max(p_hi) + 1)?;
        let x = marginal(m, self.s0, &src, budget)?;

        let ws = self.windows(&long)?;
        let mut compiled: Vec<CompiledCode<'_>> = Vec::with_capacity(self.codes.len());
        let mut prev = src.clone();
        for (code, w) in self.codes.iter().zip(&ws[1..]) {
            compiled.push(code.compile(&prev, w)?);
            prev = w.clone();
        }
        let pick = |w: &Window, sub: &Window| -> Result<Vec<usize>> {
            sub.points()
                .iter()
                .map(|&p| w.index_of(p).ok_or_else(|| Error::Window(format!("point {p} outside the coded window"))))
                .collect()
        };
        let long_idx = pick(&prev, &long)?;
        let short_idx = pick(&long, &short)?;
        let state_idx = pick(&src, &Window::interval(s_lo, s_hi + 1)?)?;

        let mut h_long: BTreeMap<Word, f64> = BTreeMap::new();
        let mut h_short: BTreeMap<Word, f64> = BTreeMap::new();
        let mut j_long: BTreeMap<(Word, Word), f64> = BTreeMap::new();
        let mut j_short: BTreeMap<(Word, Word), f64> = BTreeMap::new();
        let mut bufs: Vec<Word> = ws[1..].iter().map(|w| vec![0; w.len()]).collect();
        for (word, p) in x.iter() {
            for k in 0..compiled.len() {
                let (done, rest) = bufs.split_at_mut(k);
                let input: &[Symbol] = if k == 0 { word } else { &done[k - 1] };
                compiled[k].map(input, &mut rest[0])?;
            }
            let top: &[Symbol] = bufs.last().map(Vec::as_slice).unwrap_or(word);
            let y_long: Word = long_idx.iter().map(|&i| top[i]).collect();
            let y_short: Word = short_idx.iter().map(|&i| y_long[i]).collect();
            let s0: Word = state_idx.iter().map(|&i| word[i]).collect();
            *h_long.entry(y_long.clone()).or_insert(0.0) += p;
            *h_short.entry(y_short.clone()).or_insert(0.0) += p;
            *j_long.entry((y_long, s0.clone())).or_insert(0.0) += p;
            *j_short.entry((y_short, s0)).or_insert(0.0) += p;
        }
        let h = |v: &mut dyn Iterator<Item = f64>| -> f64 { v.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum() };
        let hs = h(&mut h_short.values().copied());
        let hl = h(&mut h_long.values().copied());
        let lower = h(&mut j_long.values().copied()) - h(&mut j_short.values().copied());
        Ok((hs, hl, lower))
    }

    fn bounds(
        &self,
        m: &MeasureSpec,
        schedule: &FolnerSchedule,
        base: &Window,
        budget: usize,
    ) -> Result<EntropyBounds> {
        if schedule.dim != self.dim() || base.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim().rank(), found: schedule.dim.rank() });
        }
        let closed_form = self.closed_form(m);
        let sequential = self.dim() == Dim::One && m.is_invariant();
        let mut rows = Vec::new();
        for n in schedule.indices() {
            let f = schedule.window(n)?;
            let e = f.minkowski(base)?;
            let (block, conditional, lower) = if sequential {
                let (hs, hl, lower) = self.interval_terms(m, base, n, budget)?;
                let origin = Window::interval(0, n as i64)?.minkowski(base)?;
                let block = if origin == e { hs } else { partition_entropy(&self.marginal(m, &e, budget)?) };
                (block / f.len() as f64, Some(hl - hs), Some(lower))
            } else {
                (partition_entropy(&self.marginal(m, &e, budget)?) / f.len() as f64, None, None)
            };
            rows.push(EntropyRow { n, size: f.len(), block, conditional, lower });
        }
        let upper =
            rows.iter().flat_map(|r| std::iter::once(r.block).chain(r.conditional)).fold(f64::INFINITY, f64::min);
        let lower = rows.iter().filter_map(|r| r.lower).fold(0.0, f64::max);
        let (lower, upper) = match closed_form {
            Some(h) => (h, h),
            None => (lower.min(upper), upper),
        };
        Ok(EntropyBounds { rows, closed_form, lower, upper })
    }

    /// The bracket at one scale, skipping the sequence when a closed form exists.
    fn interval(&self, m: &MeasureSpec, schedule: &FolnerSchedule, budget: usize) -> Result<(f64, f64)> {
        if let Some(h) = self.closed_form(m) {
            return Ok((h, h));
        }
        let n = schedule.n_max;
        let base = Window::origin(self.dim());
        if self.dim() == Dim::One && m.is_invariant() {
            let (hs, hl, lower) = self.interval_terms(m, &base, n, budget)?;
            let upper = (hs / n as f64).min(hl - hs);
            return Ok((lower.clamp(0.0, upper), upper));
        }
        let f = schedule.window(n)?;
        let upper = partition_entropy(&self.marginal(m, &f, budget)?) / f.len() as f64;
        Ok((0.0, upper))
    }
}

/// Bracketing interval for `h_μ` of the shift on `s`, with the partition by
/// the symbols on `base`.
pub fn entropy_rate(
    m: &MeasureSpec,
    s: &Subshift,
    schedule: &FolnerSchedule,
    base: &Window,
    budget: usize,
) -> Result<EntropyBounds> {
    Coded::plain(s).bounds(m, schedule, base, budget)
}

/// Bracketing interval for the entropy of `π^(level) μ`.
pub fn level_entropy_bounds(
    chain: &SystemChain,
    m: &MeasureSpec,
    level: usize,
    schedule: &FolnerSchedule,
    base: &Window,
    budget: usize,
) -> Result<EntropyBounds> {
    Coded::level(chain, level)?.bounds(m, schedule, base, budget)
}

/// `(lower, upper)` for the entropy of `π^(level) μ` at the schedule's last
/// index; exact when a closed form is known.
pub fn level_entropy_interval(
    chain: &SystemChain,
    m: &MeasureSpec,
    level: usize,
    schedule: &FolnerSchedule,
    budget: usize,
) -> Result<(f64, f64)> {
    Coded::level(chain, level)?.interval(m, schedule, budget)
}

pub(super) fn coded_marginal(
    chain: &SystemChain,
    m: &MeasureSpec,
    level: usize,
    target: &Window,
    budget: usize,
) -> Result<MarginalTable> {
    Coded::level(chain, level)?.marginal(m, target, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::BoxKind;
    use crate::symbolic::DEFAULT_BUDGET;

    fn table(ws: &[(&[Symbol], f64)], len: i64) -> MarginalTable {
        let probs = ws.iter().map(|(w, p)| (w.to_vec(), *p)).collect();
        MarginalTable::new(Window::interval(0, len).unwrap(), probs).unwrap()
    }

    #[test]
    fn partition_entropy_examples() {
        let uniform = table(&[(&[0, 0], 0.25), (&[0, 1], 0.25), (&[1, 0], 0.25), (&[1, 1], 0.25)], 2);
        assert!((partition_entropy(&uniform) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(partition_entropy(&table(&[(&[1], 1.0)], 1)), 0.0);
        let skew = table(&[(&[0], 0.5), (&[1], 0.25), (&[2], 0.25)], 1);
        assert!((partition_entropy(&skew) - 1.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn conditional_entropy_examples() {
        let indep = table(&[(&[0, 0], 0.25), (&[0, 1], 0.25), (&[1, 0], 0.25), (&[1, 1], 0.25)], 2);
        let first = Window::interval(0, 1).unwrap();
        assert!((conditional_entropy(&indep, &first).unwrap() - 2f64.ln()).abs() < 1e-15);
        let equal = table(&[(&[0, 0], 0.5), (&[1, 1], 0.5)], 2);
        assert!(conditional_entropy(&equal, &first).unwrap().abs() < 1e-15);

        let golden = Subshift::golden_mean();
        let parry = MeasureSpec::parry(&golden).unwrap();
        let joint = marginal(&parry, &golden, &Window::interval(0, 2).unwrap(), DEFAULT_BUDGET).unwrap();
        let h = conditional_entropy(&joint, &first).unwrap();
        let log_phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((h - log_phi).abs() < 1e-12, "{h}");
        assert!(conditional_entropy(&joint, &Window::interval(0, 3).unwrap()).is_err());
    }

    #[test]
    fn bernoulli_rate_is_exact() {
        let full = Subshift::full(2, Dim::One).unwrap();
        let sched = FolnerSchedule::new(BoxKind::Origin, Dim::One, 1, 6).unwrap();
        let b =
            entropy_rate(&MeasureSpec::uniform(2), &full, &sched, &Window::origin(Dim::One), DEFAULT_BUDGET).unwrap();
        for r in &b.rows {
            assert!((r.block - 2f64.ln()).abs() < 1e-12);
            assert!((r.conditional.unwrap() - 2f64.ln()).abs() < 1e-12);
            assert!((r.lower.unwrap() - 2f64.ln()).abs() < 1e-12);
        }
        assert_eq!(b.width(), 0.0);
    }

    #[test]
    fn parry_bounds_are_tight() {
        let golden = Subshift::golden_mean();
        let parry = MeasureSpec::parry(&golden).unwrap();
        let sched = FolnerSchedule::new(BoxKind::Origin, Dim::One, 2, 8).unwrap();
        let b = entropy_rate(&parry, &golden, &sched, &Window::origin(Dim::One), DEFAULT_BUDGET).unwrap();
        let log_phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        for r in &b.rows {
            assert!((r.conditional.unwrap() - log_phi).abs() < 1e-9);
            assert!((r.lower.unwrap() - log_phi).abs() < 1e-9);
            assert!(r.block >= log_phi - 1e-12);
        }
    }

    #[test]
    fn hidden_markov_bracket() {
        let chain = SystemChain::full_collapse(&[0, 0, 1, 1], Dim::One).unwrap();
        let m = MeasureSpec::markov(vec![
            vec![0.7, 0.1, 0.1, 0.1],
            vec![0.1, 0.2, 0.3, 0.4],
            vec![0.25, 0.25, 0.25, 0.25],
            vec![0.05, 0.05, 0.45, 0.45],
        ])
        .unwrap();
        let sched = FolnerSchedule::new(BoxKind::Origin, Dim::One, 1, 8).unwrap();
        let b = level_entropy_bounds(&chain, &m, 1, &sched, &Window::origin(Dim::One), DEFAULT_BUDGET).unwrap();
        assert!(b.closed_form.is_none());
        for pair in b.rows.windows(2) {
            assert!(pair[1].block <= pair[0].block + 1e-12);
        }
        for r in &b.rows {
            assert!(r.lower.unwrap() <= r.conditional.unwrap() + 1e-12);
            assert!(r.conditional.unwrap() <= r.block + 1e-12);
        }
        assert!(b.lower <= b.upper && b.width() < 1e-2, "{b:?}");
    }

    #[test]
    fn collapse_of_uniform_has_closed_form() {
        let chain = SystemChain::full_collapse(&[0, 0, 1, 1], Dim::One).unwrap();
        let sched = FolnerSchedule::new(BoxKind::Origin, Dim::One, 1, 3).unwrap();
        let iv = level_entropy_interval(&chain, &MeasureSpec::uniform(4), 1, &sched, DEFAULT_BUDGET).unwrap();
        assert!((iv.0 - 2f64.ln()).abs() < 1e-15 && iv.0 == iv.1);
    }
}
