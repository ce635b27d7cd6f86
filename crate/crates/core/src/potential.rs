//! Locally constant potentials and their Birkhoff-sum suprema over cylinders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Dim, Window};
use crate::symbolic::{enumerate_patterns, Grid, LocalTable, Pattern, Subshift, Symbol, Word, DEFAULT_BUDGET};

/// A potential `f(x) = table(x|_{D_f})`, values in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    name: String,
    table: LocalTable<f64>,
}

impl Potential {
    pub fn new(
        name: impl Into<String>,
        window: Window,
        alphabet_size: usize,
        rows: impl IntoIterator<Item = (Word, f64)>,
    ) -> Result<Self> {
        let mut table = LocalTable::new(window, alphabet_size)?;
        for (local, v) in rows {
            if !v.is_finite() {
                return Err(Error::Invalid(format!("potential value {v} is not finite")));
            }
            table.set(&local, v)?;
        }
        Ok(Potential { name: name.into(), table })
    }

    pub fn single_site(name: impl Into<String>, values: &[f64], dim: Dim) -> Result<Self> {
        Potential::new(
            name,
            Window::origin(dim),
            values.len(),
            values.iter().enumerate().map(|(s, &v)| (vec![s as Symbol], v)),
        )
    }

    pub fn constant(name: impl Into<String>, c: f64, alphabet_size: usize, dim: Dim) -> Result<Self> {
        Potential::single_site(name, &vec![c; alphabet_size], dim)
    }

    pub fn zero(alphabet_size: usize, dim: Dim) -> Result<Self> {
        Potential::constant("zero", 0.0, alphabet_size, dim)
    }

    /// `c · 1[x_0 = symbol]`.
    pub fn indicator(c: f64, symbol: Symbol, alphabet_size: usize, dim: Dim) -> Result<Self> {
        let values: Vec<f64> = (0..alphabet_size).map(|s| if s == symbol as usize { c } else { 0.0 }).collect();
        Potential::single_site(format!("{c}*[x0={symbol}]"), &values, dim)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn window(&self) -> &Window {
        self.table.window()
    }

    pub fn alphabet_size(&self) -> usize {
        self.table.alphabet_size()
    }

    pub fn eval(&self, local: &[Symbol]) -> Option<f64> {
        self.table.get(local)
    }

    pub fn rows(&self) -> Vec<(Word, f64)> {
        self.table.rows()
    }

    pub fn is_single_site(&self) -> bool {
        self.window().len() == 1
    }

    pub fn is_zero(&self) -> bool {
        self.table.values().all(|v| v == 0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.table.values().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.table.values().fold(f64::INFINITY, f64::min)
    }

    /// Checks that the table covers every locally admissible pattern on `D_f`.
    pub fn validate_for(&self, s: &Subshift) -> Result<()> {
        if s.size() != self.alphabet_size() || s.dim() != self.window().dim() {
            return Err(Error::Invalid(format!("potential '{}' does not match the level-0 system", self.name)));
        }
        let set = enumerate_patterns(s, self.window(), DEFAULT_BUDGET)?;
        if let Some(w) = set.words().iter().find(|w| self.eval(w).is_none()) {
            return Err(Error::Invalid(format!("potential '{}' has no value for admissible pattern {w:?}", self.name)));
        }
        Ok(())
    }
}

/// Evaluates `sup_{x ∈ [p]} S_F f(x)` for patterns `p` on a fixed window.
///
/// The supremum is an exact maximum over the locally admissible
/// completions of `p` to `W ∪ (F ⊕ D_f)`.
#[derive(Debug, Clone)]
pub struct SupEvaluator<'a> {
    potential: &'a Potential,
    union: Window,
    grid: Grid,
    placed: Vec<usize>,
    terms: Vec<Vec<usize>>,
    collar: usize,
}

impl<'a> SupEvaluator<'a> {
    pub fn new(potential: &'a Potential, s: &Subshift, f: &Window, pattern_window: &Window) -> Result<Self> {
        let span = f.minkowski(potential.window())?;
        let union = pattern_window.union(&span)?;
        let grid = Grid::new(s, &union)?;
        let placed = pattern_window.points().iter().map(|&p| union.index_of(p).expect("subset of union")).collect();
        let terms = f
            .points()
            .iter()
            .map(|&g| {
                potential.window().points().iter().map(|&d| union.index_of(g + d).expect("subset of union")).collect()
            })
            .collect();
        let collar = union.len() - pattern_window.len();
        Ok(SupEvaluator { potential, union, grid, placed, terms, collar })
    }

    /// Window the maximizing completions live on.
    pub fn union(&self) -> &Window {
        &self.union
    }

    fn birkhoff_sum(&self, full: &[Symbol], local: &mut Word) -> Result<f64> {
        let mut sum = 0.0;
        for taps in &self.terms {
            local.clear();
            local.extend(taps.iter().map(|&t| full[t]));
            sum += self.potential.eval(local).ok_or_else(|| {
                Error::Invalid(format!("potential '{}' has no value for {local:?}", self.potential.name))
            })?;
        }
        Ok(sum)
    }

    pub fn sup(&self, word: &[Symbol]) -> Result<f64> {
        if self.collar == 0 {
            let mut full = vec![0; self.union.len()];
            for (&i, &s) in self.placed.iter().zip(word) {
                full[i] = s;
            }
            return self.birkhoff_sum(&full, &mut Vec::new());
        }
        self.argmax(word).map(|(v, _)| v)
    }

    /// The supremum together with the lexicographically least completion
    /// attaining it.
    pub fn argmax(&self, word: &[Symbol]) -> Result<(f64, Word)> {
        let mut fixed = vec![None; self.union.len()];
        for (&i, &s) in self.placed.iter().zip(word) {
            fixed[i] = Some(s);
        }
        let mut best: Option<(f64, Word)> = None;
        let mut failure = None;
        let mut local = Vec::new();
        self.grid.for_each(&fixed, DEFAULT_BUDGET, |full| match self.birkhoff_sum(full, &mut local) {
            Ok(v) => {
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, full.to_vec()));
                }
            }
            Err(e) => {
                failure.get_or_insert(e);
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        best.ok_or_else(|| Error::EmptyCylinder(format!("pattern {word:?} has no admissible extension")))
    }
}

/// `max` of `Σ_{g∈F} f(q|_{g+D_f})` over admissible completions `q` of `p`.
pub fn birkhoff_sup(f: &Potential, s: &Subshift, window: &Window, p: &Pattern) -> Result<f64> {
    SupEvaluator::new(f, s, window, p.window())?.sup(p.symbols())
}

/// The supremum and the lexicographically least maximizing completion.
pub fn birkhoff_argmax(f: &Potential, s: &Subshift, window: &Window, p: &Pattern) -> Result<(f64, Pattern)> {
    let eval = SupEvaluator::new(f, s, window, p.window())?;
    let (v, w) = eval.argmax(p.symbols())?;
    Ok((v, Pattern::new(eval.union().clone(), w)?))
}
