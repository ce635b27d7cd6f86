use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Dim, GroupPoint, Window};

use super::{Pattern, Symbol, Word};

/// Largest dense lookup table a local rule may allocate.
const MAX_TABLE: usize = 1 << 24;

/// A dense table indexed by the patterns on a fixed local window.
///
/// Entries are addressed by the base-`q` number whose digits are the
/// symbols in window order; missing rows are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTable<T> {
    window: Window,
    q: usize,
    entries: Vec<Option<T>>,
}

impl<T: Copy> LocalTable<T> {
    pub fn new(window: Window, q: usize) -> Result<Self> {
        let size = (q as f64).powi(window.len() as i32);
        if size > MAX_TABLE as f64 {
            return Err(Error::Invalid(format!(
                "local table over {} sites with {q} symbols is too large",
                window.len()
            )));
        }
        Ok(LocalTable { window, q, entries: vec![None; size as usize] })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn alphabet_size(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn index(&self, local: &[Symbol]) -> usize {
        local.iter().fold(0usize, |acc, &s| acc * self.q + s as usize)
    }

    pub fn set(&mut self, local: &[Symbol], value: T) -> Result<()> {
        if local.len() != self.window.len() || local.iter().any(|&s| s as usize >= self.q) {
            return Err(Error::Invalid(format!("row {local:?} does not fit the local window")));
        }
        let i = self.index(local);
        self.entries[i] = Some(value);
        Ok(())
    }

    #[inline]
    pub fn get(&self, local: &[Symbol]) -> Option<T> {
        self.entries.get(self.index(local)).copied().flatten()
    }

    /// All `(local word, value)` rows that are present, in lexicographic order.
    pub fn rows(&self) -> Vec<(Word, T)> {
        let n = self.window.len();
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(mut i, v)| {
                v.map(|v| {
                    let mut w = vec![0; n];
                    for slot in w.iter_mut().rev() {
                        *slot = (i % self.q) as Symbol;
                        i /= self.q;
                    }
                    (w, v)
                })
            })
            .collect()
    }

    pub(crate) fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.entries.iter().filter_map(|v| *v)
    }
}

/// A sliding block code: the image symbol at `g` is `rule(x|_{g + D})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockCode {
    source_size: usize,
    target_size: usize,
    rule: LocalTable<Symbol>,
}

impl BlockCode {
    pub fn new(
        window: Window,
        source_size: usize,
        target_size: usize,
        rows: impl IntoIterator<Item = (Word, Symbol)>,
    ) -> Result<Self> {
        let mut rule = LocalTable::new(window, source_size)?;
        for (local, image) in rows {
            if image as usize >= target_size {
                return Err(Error::Invalid(format!("rule image {image} outside the target alphabet")));
            }
            rule.set(&local, image)?;
        }
        Ok(BlockCode { source_size, target_size, rule })
    }

    /// A total rule given by a function of the local word.
    pub fn from_fn(
        window: Window,
        source_size: usize,
        target_size: usize,
        f: impl Fn(&[Symbol]) -> Symbol,
    ) -> Result<Self> {
        let mut rule = LocalTable::new(window, source_size)?;
        let n = rule.window().len();
        let mut local = vec![0 as Symbol; n];
        let total = rule.entries.len();
        for mut i in 0..total {
            for slot in local.iter_mut().rev() {
                *slot = (i % source_size) as Symbol;
                i /= source_size;
            }
            let image = f(&local);
            if image as usize >= target_size {
                return Err(Error::Invalid(format!("rule image {image} outside the target alphabet")));
            }
            rule.set(&local, image)?;
        }
        Ok(BlockCode { source_size, target_size, rule })
    }

    pub fn identity(size: usize, dim: Dim) -> Result<Self> {
        BlockCode::from_fn(Window::origin(dim), size, size, |w| w[0])
    }

    /// The one-block code `s ↦ map[s]`.
    pub fn symbol_map(map: &[Symbol], target_size: usize, dim: Dim) -> Result<Self> {
        let map = map.to_vec();
        BlockCode::from_fn(Window::origin(dim), map.len(), target_size, move |w| map[w[0] as usize])
    }

    /// The factor map onto the one-point system.
    pub fn to_point(size: usize, dim: Dim) -> Result<Self> {
        BlockCode::from_fn(Window::origin(dim), size, 1, |_| 0)
    }

    pub fn window(&self) -> &Window {
        self.rule.window()
    }

    pub fn dim(&self) -> Dim {
        self.window().dim()
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn rule(&self, local: &[Symbol]) -> Option<Symbol> {
        self.rule.get(local)
    }

    pub fn rows(&self) -> Vec<(Word, Symbol)> {
        self.rule.rows()
    }

    pub fn is_single_site(&self) -> bool {
        self.window().len() == 1
    }

    /// Precomputes the taps for coding patterns on `source` into patterns on
    /// `target`. Requires `target ⊕ D ⊆ source`.
    pub fn compile(&self, source: &Window, target: &Window) -> Result<CompiledCode<'_>> {
        source.check_dim(target)?;
        let taps = target
            .points()
            .iter()
            .map(|&g| {
                self.window()
                    .points()
                    .iter()
                    .map(|&d| {
                        source.index_of(g + d).ok_or_else(|| {
                            Error::Window(format!("source window lacks {} needed for target point {g}", g + d))
                        })
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompiledCode { code: self, taps, local: self.window().len() })
    }

    /// Codes `p` onto `target`: `q(g) = rule(p|_{g + D})`.
    pub fn apply(&self, p: &Pattern, target: &Window) -> Result<Pattern> {
        let compiled = self.compile(p.window(), target)?;
        let mut out = vec![0; target.len()];
        compiled.map(p.symbols(), &mut out)?;
        Pattern::new(target.clone(), out)
    }

    /// Codes `p` onto the largest window it determines, `{g : g + D ⊆ W}`.
    pub fn apply_max(&self, p: &Pattern) -> Result<Pattern> {
        let pts: Vec<GroupPoint> = p.window().erode(self.window());
        let target = Window::new(p.window().dim(), pts)
            .map_err(|_| Error::Window("pattern window too small for the code window".into()))?;
        self.apply(p, &target)
    }
}

/// A block code specialised to fixed source and target windows.
#[derive(Debug, Clone)]
pub struct CompiledCode<'a> {
    code: &'a BlockCode,
    taps: Vec<Vec<usize>>,
    local: usize,
}

impl CompiledCode<'_> {
    /// Writes the image of `src` into `out`. Fails when the rule has no row
    /// for some local pattern.
    #[inline]
    pub fn map(&self, src: &[Symbol], out: &mut [Symbol]) -> Result<()> {
        let q = self.code.source_size;
        for (slot, taps) in out.iter_mut().zip(&self.taps) {
            let idx = taps.iter().fold(0usize, |acc, &t| acc * q + src[t] as usize);
            *slot = self.code.rule.entries[idx].ok_or_else(|| {
                let local: Word = taps.iter().map(|&t| src[t]).collect();
                Error::Invalid(format!("block code has no rule for local pattern {local:?}"))
            })?;
        }
        debug_assert!(self.taps.iter().all(|t| t.len() == self.local));
        Ok(())
    }

    pub fn target_len(&self) -> usize {
        self.taps.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_code_is_identity() {
        let id = BlockCode::identity(3, Dim::One).unwrap();
        let p = Pattern::word_at(0, &[2, 0, 1, 1]).unwrap();
        assert_eq!(id.apply_max(&p).unwrap(), p);
    }

    #[test]
    fn collapse_code_is_symbolwise() {
        let collapse = BlockCode::symbol_map(&[0, 0, 1, 1], 2, Dim::One).unwrap();
        let p = Pattern::word_at(0, &[0, 2, 3]).unwrap();
        assert_eq!(collapse.apply_max(&p).unwrap().symbols(), &[0, 1, 1]);
    }

    #[test]
    fn xor_code_shrinks_the_window() {
        let xor = BlockCode::from_fn(Window::interval(0, 2).unwrap(), 2, 2, |w| w[0] ^ w[1]).unwrap();
        let q = xor.apply_max(&Pattern::word_at(0, &[1, 1, 0]).unwrap()).unwrap();
        assert_eq!(q.window(), &Window::interval(0, 2).unwrap());
        assert_eq!(q.symbols(), &[0, 1]);
    }

    #[test]
    fn apply_rejects_small_source_window() {
        let xor = BlockCode::from_fn(Window::interval(0, 2).unwrap(), 2, 2, |w| w[0] ^ w[1]).unwrap();
        let p = Pattern::word_at(0, &[1, 1, 0]).unwrap();
        assert!(matches!(xor.apply(&p, &Window::interval(0, 3).unwrap()), Err(Error::Window(_))));
    }

    #[test]
    fn partial_rule_reports_missing_row() {
        let code = BlockCode::new(Window::origin(Dim::One), 2, 1, [(vec![0], 0)]).unwrap();
        let p = Pattern::word_at(0, &[0, 1]).unwrap();
        assert!(matches!(code.apply_max(&p), Err(Error::Invalid(_))));
    }

    #[test]
    fn coding_commutes_with_translation() {
        let code =
            BlockCode::from_fn(Window::interval(-1, 2).unwrap(), 3, 3, |w| (w[0] + 2 * w[1] + w[2]) % 3).unwrap();
        let p = Pattern::word_at(0, &[0, 2, 1, 1, 2, 0, 1]).unwrap();
        let g = GroupPoint::d1(5);
        let a = code.apply_max(&p).unwrap().translate(g);
        let b = code.apply_max(&p.translate(g)).unwrap();
        assert_eq!(a, b);
        // Restricting then coding agrees with coding then restricting.
        let sub = Window::interval(2, 6).unwrap();
        let r = code.apply_max(&p.restrict(&sub).unwrap()).unwrap();
        assert_eq!(code.apply_max(&p).unwrap().restrict(r.window()).unwrap(), r);
    }

    #[test]
    fn rows_round_trip() {
        let code = BlockCode::from_fn(Window::interval(0, 2).unwrap(), 3, 2, |w| (w[0] > w[1]) as Symbol).unwrap();
        let again = BlockCode::new(code.window().clone(), 3, 2, code.rows()).unwrap();
        assert_eq!(code, again);
    }
}
