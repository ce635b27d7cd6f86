use crate::error::{Error, Result};
use crate::group::Window;

use super::{Subshift, Symbol};

/// A forbidden pattern placed inside a window, as `(position, symbol)` cells.
#[derive(Debug, Clone)]
struct Placement {
    cells: Vec<(usize, Symbol)>,
}

/// Forbidden-pattern placements compiled against a fixed window.
///
/// Each placement is attached to its largest position, so a depth-first
/// fill in window order can reject it as soon as it is fully assigned.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    len: usize,
    q: usize,
    checks: Vec<Vec<Placement>>,
}

impl Grid {
    pub(crate) fn new(s: &Subshift, window: &Window) -> Result<Self> {
        if s.dim() != window.dim() {
            return Err(Error::DimensionMismatch { expected: s.dim().rank(), found: window.dim().rank() });
        }
        let mut checks: Vec<Vec<Placement>> = vec![Vec::new(); window.len()];
        for forb in s.forbidden() {
            let first = forb.window().points()[0];
            for &anchor in window.points() {
                let g = anchor - first;
                let cells: Option<Vec<(usize, Symbol)>> = forb
                    .window()
                    .points()
                    .iter()
                    .zip(forb.symbols())
                    .map(|(&p, &sym)| window.index_of(p + g).map(|i| (i, sym)))
                    .collect();
                if let Some(cells) = cells {
                    let trigger = cells.iter().map(|c| c.0).max().expect("nonempty window");
                    checks[trigger].push(Placement { cells });
                }
            }
        }
        Ok(Grid { len: window.len(), q: s.size(), checks })
    }

    #[inline]
    fn ok_at(&self, depth: usize, word: &[Symbol]) -> bool {
        self.checks[depth].iter().all(|pl| pl.cells.iter().any(|&(i, s)| word[i] != s))
    }

    pub(crate) fn admissible(&self, word: &[Symbol]) -> bool {
        word.len() == self.len
            && word.iter().all(|&s| (s as usize) < self.q)
            && (0..self.len).all(|d| self.ok_at(d, word))
    }

    fn budget_error(&self, budget: usize) -> Error {
        Error::Budget { sites: self.len, bound: (self.q as f64).powi(self.len as i32), budget }
    }

    /// Depth-first fill in window order. `fixed[i] = Some(s)` pins position
    /// `i`; free positions range over the alphabet in increasing order, so
    /// completions are visited lexicographically.
    pub(crate) fn for_each(
        &self,
        fixed: &[Option<Symbol>],
        budget: usize,
        mut visit: impl FnMut(&[Symbol]),
    ) -> Result<usize> {
        debug_assert_eq!(fixed.len(), self.len);
        let n = self.len;
        let mut word: Vec<Symbol> = vec![0; n];
        let mut next: Vec<usize> = vec![0; n];
        let mut depth = 0usize;
        let mut count = 0usize;
        loop {
            if depth == n {
                count += 1;
                if count > budget {
                    return Err(self.budget_error(budget));
                }
                visit(&word);
                depth -= 1;
                continue;
            }
            let (lo, hi) = match fixed[depth] {
                Some(s) => (s as usize, s as usize + 1),
                None => (0, self.q),
            };
            if next[depth] < lo {
                next[depth] = lo;
            }
            let mut placed = false;
            while next[depth] < hi {
                word[depth] = next[depth] as Symbol;
                next[depth] += 1;
                if self.ok_at(depth, &word) {
                    placed = true;
                    break;
                }
            }
            if placed {
                depth += 1;
                if depth < n {
                    next[depth] = 0;
                }
            } else {
                if depth == 0 {
                    break;
                }
                depth -= 1;
            }
        }
        Ok(count)
    }
}
