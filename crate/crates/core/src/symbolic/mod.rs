//! Subshifts over Z^d given by forbidden patterns, locally admissible
//! pattern enumeration, sliding block codes and chains of factor maps.

mod chain;
mod code;
mod grid;

pub use chain::{fiber_decomposition, Fibers, SystemChain};
pub use code::{BlockCode, CompiledCode, LocalTable};
pub(crate) use grid::Grid;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Dim, GroupPoint, Window};

pub type Symbol = u8;
pub type Word = Vec<Symbol>;

/// Default cap on the number of patterns a single enumeration may produce.
pub const DEFAULT_BUDGET: usize = 1 << 25;

/// Largest alphabet a subshift may use.
pub const MAX_ALPHABET: usize = 255;

/// Ordered symbol names. Symbol `i` is the `i`-th name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Empty("alphabet"));
        }
        if names.len() > MAX_ALPHABET {
            return Err(Error::Invalid(format!("alphabet of {} symbols exceeds {MAX_ALPHABET}", names.len())));
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::Invalid("alphabet has duplicate symbols".into()));
        }
        Ok(Alphabet { names })
    }

    /// Symbols named `"0"`, `"1"`, ….
    pub fn numeric(size: usize) -> Result<Self> {
        Alphabet::new((0..size).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name).map(|i| i as Symbol)
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s as usize]
    }

    /// Renders a word by concatenating names, with separators when any name
    /// is longer than one character.
    pub fn render(&self, word: &[Symbol]) -> String {
        let sep = if self.names.iter().all(|n| n.chars().count() == 1) { "" } else { " " };
        word.iter().map(|&s| self.name(s)).collect::<Vec<_>>().join(sep)
    }
}

/// An assignment of symbols to the points of a window, in window order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    window: Window,
    symbols: Word,
}

impl Pattern {
    pub fn new(window: Window, symbols: Word) -> Result<Self> {
        if window.len() != symbols.len() {
            return Err(Error::Window(format!(
                "pattern has {} symbols for a window of {} points",
                symbols.len(),
                window.len()
            )));
        }
        Ok(Pattern { window, symbols })
    }

    /// A word placed on `[start, start + len)` in Z.
    pub fn word_at(start: i64, symbols: &[Symbol]) -> Result<Self> {
        Pattern::new(Window::interval(start, start + symbols.len() as i64)?, symbols.to_vec())
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn get(&self, p: GroupPoint) -> Option<Symbol> {
        self.window.index_of(p).map(|i| self.symbols[i])
    }

    pub fn restrict(&self, sub: &Window) -> Result<Pattern> {
        let symbols = sub
            .points()
            .iter()
            .map(|&p| self.get(p).ok_or_else(|| Error::Window(format!("point {p} outside the pattern window"))))
            .collect::<Result<Word>>()?;
        Ok(Pattern { window: sub.clone(), symbols })
    }

    pub fn translate(&self, g: GroupPoint) -> Pattern {
        Pattern { window: self.window.translate(g), symbols: self.symbols.clone() }
    }
}

/// Locally admissible patterns on one window, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    window: Window,
    words: Vec<Word>,
}

impl PatternSet {
    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, word: &[Symbol]) -> Option<usize> {
        self.words.binary_search_by(|w| w.as_slice().cmp(word)).ok()
    }

    pub fn pattern(&self, i: usize) -> Pattern {
        Pattern { window: self.window.clone(), symbols: self.words[i].clone() }
    }

    pub fn patterns(&self) -> impl Iterator<Item = Pattern> + '_ {
        (0..self.len()).map(|i| self.pattern(i))
    }
}

/// A subshift of `A^{Z^d}` defined by a finite list of forbidden patterns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subshift {
    alphabet: Alphabet,
    dim: Dim,
    forbidden: Vec<Pattern>,
}

impl Subshift {
    pub fn new(alphabet: Alphabet, dim: Dim, forbidden: Vec<Pattern>) -> Result<Self> {
        for p in &forbidden {
            if p.window.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim.rank(), found: p.window.dim().rank() });
            }
            if p.symbols.iter().any(|&s| s as usize >= alphabet.len()) {
                return Err(Error::Invalid("forbidden pattern uses a symbol outside the alphabet".into()));
            }
        }
        Ok(Subshift { alphabet, dim, forbidden })
    }

    pub fn full(size: usize, dim: Dim) -> Result<Self> {
        Subshift::new(Alphabet::numeric(size)?, dim, Vec::new())
    }

    /// The golden-mean shift on {0, 1}: the word `11` is forbidden.
    pub fn golden_mean() -> Self {
        let forbidden = vec![Pattern::word_at(0, &[1, 1]).expect("static word")];
        Subshift::new(Alphabet::numeric(2).expect("static alphabet"), Dim::One, forbidden).expect("static subshift")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    pub fn is_full(&self) -> bool {
        self.forbidden.is_empty()
    }

    /// A Z-subshift whose forbidden windows are single sites or pairs of
    /// adjacent sites.
    pub fn is_nearest_neighbor(&self) -> bool {
        self.dim == Dim::One && self.forbidden.iter().all(|p| p.window.len() <= 2 && p.window.is_interval())
    }

    /// Allowed one-step transitions of a nearest-neighbor subshift, and the
    /// allowed single symbols.
    pub fn transition_mask(&self) -> Result<(Vec<bool>, Vec<Vec<bool>>)> {
        if !self.is_nearest_neighbor() {
            return Err(Error::Unsupported("subshift is not a nearest-neighbor Z-subshift".into()));
        }
        let q = self.size();
        let mut sites = vec![true; q];
        let mut pairs = vec![vec![true; q]; q];
        for p in &self.forbidden {
            match p.symbols.as_slice() {
                [a] => sites[*a as usize] = false,
                [a, b] => pairs[*a as usize][*b as usize] = false,
                _ => unreachable!("nearest-neighbor check"),
            }
        }
        for a in (0..q).filter(|&a| !sites[a]) {
            pairs[a].fill(false);
            for row in pairs.iter_mut() {
                row[a] = false;
            }
        }
        Ok((sites, pairs))
    }

    pub fn is_locally_admissible(&self, p: &Pattern) -> Result<bool> {
        let grid = Grid::new(self, p.window())?;
        Ok(grid.admissible(p.symbols()))
    }
}

/// All locally admissible patterns on `window`, in lexicographic order.
pub fn enumerate_patterns(s: &Subshift, window: &Window, budget: usize) -> Result<PatternSet> {
    let mut words = Vec::new();
    for_each_pattern(s, window, budget, |w| words.push(w.to_vec()))?;
    Ok(PatternSet { window: window.clone(), words })
}

/// Streams the locally admissible patterns on `window` in lexicographic
/// order without storing them. Returns the number visited.
pub fn for_each_pattern(s: &Subshift, window: &Window, budget: usize, visit: impl FnMut(&[Symbol])) -> Result<usize> {
    let grid = Grid::new(s, window)?;
    grid.for_each(&vec![None; window.len()], budget, visit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_repeat_pairs() -> Subshift {
        let forbidden = vec![Pattern::word_at(0, &[0, 1]).unwrap(), Pattern::word_at(0, &[1, 0]).unwrap()];
        Subshift::new(Alphabet::numeric(2).unwrap(), Dim::One, forbidden).unwrap()
    }

    #[test]
    fn counts_on_small_windows() {
        let full2 = Subshift::full(2, Dim::One).unwrap();
        assert_eq!(enumerate_patterns(&full2, &Window::interval(0, 3).unwrap(), 100).unwrap().len(), 8);
        let golden = Subshift::golden_mean();
        assert_eq!(enumerate_patterns(&golden, &Window::interval(0, 5).unwrap(), 100).unwrap().len(), 13);
        let full4 = Subshift::full(4, Dim::One).unwrap();
        assert_eq!(enumerate_patterns(&full4, &Window::interval(0, 1).unwrap(), 100).unwrap().len(), 4);
        let constant = no_repeat_pairs();
        let set = enumerate_patterns(&constant, &Window::interval(0, 4).unwrap(), 100).unwrap();
        assert_eq!(set.words(), &[vec![0, 0, 0, 0], vec![1, 1, 1, 1]]);
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let golden = Subshift::golden_mean();
        let set = enumerate_patterns(&golden, &Window::interval(0, 6).unwrap(), 1000).unwrap();
        assert!(set.words().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(set.index_of(&[1, 0, 1, 0, 1, 0]), Some(set.len() - 1));
        assert_eq!(set.index_of(&[1, 1, 0, 0, 0, 0]), None);
    }

    #[test]
    fn full_shift_count_is_power_in_two_dims() {
        let full = Subshift::full(2, Dim::Two).unwrap();
        let w = Window::cube(Dim::Two, 0, 3).unwrap();
        assert_eq!(enumerate_patterns(&full, &w, 1 << 10).unwrap().len(), 512);
    }

    #[test]
    fn two_dimensional_constraint_applies_in_both_directions() {
        // Forbid a 1 directly above or to the right of a 1 (hard squares).
        let right =
            Pattern::new(Window::new(Dim::Two, [GroupPoint::d2(0, 0), GroupPoint::d2(1, 0)]).unwrap(), vec![1, 1])
                .unwrap();
        let up = Pattern::new(Window::new(Dim::Two, [GroupPoint::d2(0, 0), GroupPoint::d2(0, 1)]).unwrap(), vec![1, 1])
            .unwrap();
        let hard = Subshift::new(Alphabet::numeric(2).unwrap(), Dim::Two, vec![right, up]).unwrap();
        // Independent sets of the 2x2 grid graph (a 4-cycle): 7.
        let w = Window::cube(Dim::Two, 0, 2).unwrap();
        assert_eq!(enumerate_patterns(&hard, &w, 100).unwrap().len(), 7);
    }

    #[test]
    fn budget_turns_into_resource_error() {
        let full = Subshift::full(4, Dim::One).unwrap();
        let err = enumerate_patterns(&full, &Window::interval(0, 6).unwrap(), 100).unwrap_err();
        match err {
            Error::Budget { sites, budget, bound } => {
                assert_eq!(sites, 6);
                assert_eq!(budget, 100);
                assert_eq!(bound, 4096.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn adding_forbidden_patterns_never_increases_count() {
        let w = Window::interval(0, 7).unwrap();
        let full = Subshift::full(2, Dim::One).unwrap();
        let golden = Subshift::golden_mean();
        let mut forb = golden.forbidden().to_vec();
        forb.push(Pattern::word_at(0, &[0, 0, 0]).unwrap());
        let tighter = Subshift::new(Alphabet::numeric(2).unwrap(), Dim::One, forb).unwrap();
        let counts: Vec<usize> =
            [full, golden, tighter].iter().map(|s| enumerate_patterns(s, &w, 1000).unwrap().len()).collect();
        assert!(counts[0] >= counts[1] && counts[1] >= counts[2]);
        assert_eq!(counts[0], 128);
    }

    #[test]
    fn restriction_of_admissible_is_admissible() {
        let golden = Subshift::golden_mean();
        let big = enumerate_patterns(&golden, &Window::interval(0, 6).unwrap(), 1000).unwrap();
        let sub = Window::new(Dim::One, [GroupPoint::d1(1), GroupPoint::d1(2), GroupPoint::d1(4)]).unwrap();
        for p in big.patterns() {
            let r = p.restrict(&sub).unwrap();
            assert!(golden.is_locally_admissible(&r).unwrap());
        }
    }

    #[test]
    fn transition_mask_of_golden_mean() {
        let (sites, pairs) = Subshift::golden_mean().transition_mask().unwrap();
        assert_eq!(sites, vec![true, true]);
        assert_eq!(pairs, vec![vec![true, true], vec![true, false]]);
    }
}
