use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Dim, Window};

use super::{enumerate_patterns, BlockCode, PatternSet, Subshift, Symbol, Word};

/// Subshifts `X_1 → X_2 → … → X_r` linked by block codes.
///
/// Levels are indexed from 0: level 0 is `X_1`, and `code(i)` maps level
/// `i` onto level `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemChain {
    systems: Vec<Subshift>,
    codes: Vec<BlockCode>,
}

impl SystemChain {
    pub fn new(systems: Vec<Subshift>, codes: Vec<BlockCode>) -> Result<Self> {
        if systems.len() < 2 {
            return Err(Error::Invalid("a chain needs at least two systems".into()));
        }
        if codes.len() + 1 != systems.len() {
            return Err(Error::Invalid(format!(
                "{} systems need {} codes, found {}",
                systems.len(),
                systems.len() - 1,
                codes.len()
            )));
        }
        let dim = systems[0].dim();
        for (i, code) in codes.iter().enumerate() {
            for d in [systems[i + 1].dim(), code.dim()] {
                if d != dim {
                    return Err(Error::DimensionMismatch { expected: dim.rank(), found: d.rank() });
                }
            }
            if code.source_size() != systems[i].size() || code.target_size() != systems[i + 1].size() {
                return Err(Error::Invalid(format!(
                    "code {i} maps {} → {} symbols but the levels have {} and {}",
                    code.source_size(),
                    code.target_size(),
                    systems[i].size(),
                    systems[i + 1].size()
                )));
            }
        }
        Ok(SystemChain { systems, codes })
    }

    /// `X → X` by the identity code.
    pub fn identity(system: Subshift) -> Result<Self> {
        let code = BlockCode::identity(system.size(), system.dim())?;
        SystemChain::new(vec![system.clone(), system], vec![code])
    }

    /// `X → point`.
    pub fn to_point(system: Subshift) -> Result<Self> {
        let code = BlockCode::to_point(system.size(), system.dim())?;
        let point = Subshift::full(1, system.dim())?;
        SystemChain::new(vec![system, point], vec![code])
    }

    /// Full `q`-shift onto full `map.max()+1`-shift by a symbol map.
    pub fn full_collapse(map: &[Symbol], dim: Dim) -> Result<Self> {
        let target = *map.iter().max().ok_or(Error::Empty("collapse map"))? as usize + 1;
        SystemChain::new(
            vec![Subshift::full(map.len(), dim)?, Subshift::full(target, dim)?],
            vec![BlockCode::symbol_map(map, target, dim)?],
        )
    }

    pub fn levels(&self) -> usize {
        self.systems.len()
    }

    pub fn dim(&self) -> Dim {
        self.systems[0].dim()
    }

    pub fn system(&self, level: usize) -> &Subshift {
        &self.systems[level]
    }

    pub fn systems(&self) -> &[Subshift] {
        &self.systems
    }

    pub fn code(&self, level: usize) -> &BlockCode {
        &self.codes[level]
    }

    pub fn codes(&self) -> &[BlockCode] {
        &self.codes
    }

    /// Window in level-0 coordinates that determines one site of `level`:
    /// `D_0 ⊕ … ⊕ D_{level-1}`.
    pub fn composite_window(&self, level: usize) -> Result<Window> {
        let mut w = Window::origin(self.dim());
        for code in &self.codes[..level] {
            w = w.minkowski(code.window())?;
        }
        Ok(w)
    }

    /// The level-0 window needed to code a pattern on `target` at `level`.
    pub fn pullback_window(&self, level: usize, target: &Window) -> Result<Window> {
        target.minkowski(&self.composite_window(level)?)
    }

    /// Codes a level-`from` word on `src` up to level `to` on `dst`, through
    /// the intermediate windows `dst ⊕ D_{to-1} ⊕ …`.
    pub fn push_word(&self, from: usize, to: usize, src: &Window, dst: &Window, word: &[Symbol]) -> Result<Word> {
        if from == to {
            let mut out = Vec::with_capacity(dst.len());
            for &p in dst.points() {
                let i = src.index_of(p).ok_or_else(|| Error::Window(format!("point {p} outside the source")))?;
                out.push(word[i]);
            }
            return Ok(out);
        }
        // Intermediate windows, top down.
        let mut windows = vec![dst.clone()];
        for level in (from + 1..to).rev() {
            let next = windows.last().expect("nonempty").minkowski(self.codes[level].window())?;
            windows.push(next);
        }
        windows.reverse();
        let mut cur_window = src.clone();
        let mut cur = word.to_vec();
        for (k, w) in windows.iter().enumerate() {
            let code = &self.codes[from + k];
            let compiled = code.compile(&cur_window, w)?;
            let mut out = vec![0; w.len()];
            compiled.map(&cur, &mut out)?;
            cur = out;
            cur_window = w.clone();
        }
        Ok(cur)
    }

    /// Spot-checks the factor-map contract on the cube `[0, side)^d`: images of
    /// locally admissible patterns are locally admissible, and every target
    /// pattern has a preimage.
    pub fn spot_check(&self, side: i64, budget: usize) -> Result<()> {
        let e = Window::cube(self.dim(), 0, side)?;
        for level in 0..self.codes.len() {
            let src = e.minkowski(self.codes[level].window())?;
            fiber_decomposition(self, level, &src, &e, budget)?;
        }
        Ok(())
    }
}

/// Level-`i` patterns grouped by their level-`(i+1)` image.
#[derive(Debug, Clone)]
pub struct Fibers {
    pub source: PatternSet,
    pub target: PatternSet,
    /// For each target pattern, the indices of its preimages in `source`.
    pub members: Vec<Vec<usize>>,
    /// For each source pattern, the index of its image in `target`.
    pub image: Vec<usize>,
}

/// Partitions the level-`level` patterns on `src` by their image on `dst`.
///
/// Requires `dst ⊕ D_level ⊆ src`. Fails when an image is not locally
/// admissible at the next level or some target pattern has no preimage.
pub fn fiber_decomposition(
    chain: &SystemChain,
    level: usize,
    src: &Window,
    dst: &Window,
    budget: usize,
) -> Result<Fibers> {
    if level + 1 >= chain.levels() {
        return Err(Error::Invalid(format!("level {level} has no successor")));
    }
    let code = chain.code(level);
    let needed = dst.minkowski(code.window())?;
    if !needed.is_subset(src) {
        return Err(Error::Window(format!(
            "incompatible windows at level {level}: source window does not contain target ⊕ code window"
        )));
    }
    let source = enumerate_patterns(chain.system(level), src, budget)?;
    let target = enumerate_patterns(chain.system(level + 1), dst, budget)?;
    let compiled = code.compile(src, dst)?;
    let mut members = vec![Vec::new(); target.len()];
    let mut image = Vec::with_capacity(source.len());
    let mut buf = vec![0; dst.len()];
    for (i, w) in source.words().iter().enumerate() {
        compiled.map(w, &mut buf)?;
        let j = target.index_of(&buf).ok_or_else(|| {
            Error::InadmissibleSupport(format!(
                "image {buf:?} of a level-{level} pattern is not admissible at level {}",
                level + 1
            ))
        })?;
        members[j].push(i);
        image.push(j);
    }
    if let Some(j) = members.iter().position(Vec::is_empty) {
        return Err(Error::EmptyFiber {
            level: level + 1,
            detail: format!("pattern {:?} has no preimage", target.words()[j]),
        });
    }
    Ok(Fibers { source, target, members, image })
}
