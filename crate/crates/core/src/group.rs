//! Windows in the lattice groups Z and Z^2, box Følner sequences, boundary
//! sets and the running-infimum readout of subadditive limits.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rank of the lattice group acted on by the shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn rank(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    pub fn from_rank(rank: usize) -> Result<Self> {
        match rank {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            other => Err(Error::Invalid(format!("unsupported lattice rank {other}"))),
        }
    }
}

/// An element of Z^d. The second coordinate is always zero when d = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupPoint(pub [i64; 2]);

impl GroupPoint {
    pub const ORIGIN: GroupPoint = GroupPoint([0, 0]);

    pub fn d1(x: i64) -> Self {
        GroupPoint([x, 0])
    }

    pub fn d2(x: i64, y: i64) -> Self {
        GroupPoint([x, y])
    }

    pub fn x(self) -> i64 {
        self.0[0]
    }

    pub fn y(self) -> i64 {
        self.0[1]
    }

    fn fits(self, dim: Dim) -> bool {
        dim == Dim::Two || self.0[1] == 0
    }
}

impl Add for GroupPoint {
    type Output = GroupPoint;
    fn add(self, rhs: GroupPoint) -> GroupPoint {
        GroupPoint([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for GroupPoint {
    type Output = GroupPoint;
    fn sub(self, rhs: GroupPoint) -> GroupPoint {
        GroupPoint([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl Neg for GroupPoint {
    type Output = GroupPoint;
    fn neg(self) -> GroupPoint {
        GroupPoint([-self.0[0], -self.0[1]])
    }
}

impl fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

/// A finite nonempty subset of Z^d, kept sorted and duplicate free.
///
/// The sorted order of the points is the coordinate order used for
/// lexicographic comparison of patterns on the window.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    dim: Dim,
    points: Vec<GroupPoint>,
}

impl Window {
    pub fn new(dim: Dim, points: impl IntoIterator<Item = GroupPoint>) -> Result<Self> {
        let mut points: Vec<GroupPoint> = points.into_iter().collect();
        if points.is_empty() {
            return Err(Error::Empty("window"));
        }
        if let Some(p) = points.iter().find(|p| !p.fits(dim)) {
            return Err(Error::Invalid(format!("point {p} does not lie in Z^{}", dim.rank())));
        }
        points.sort_unstable();
        points.dedup();
        Ok(Window { dim, points })
    }

    /// The interval `[lo, hi)` in Z.
    pub fn interval(lo: i64, hi: i64) -> Result<Self> {
        Window::new(Dim::One, (lo..hi).map(GroupPoint::d1))
    }

    /// The cube `[lo, hi)^d`.
    pub fn cube(dim: Dim, lo: i64, hi: i64) -> Result<Self> {
        match dim {
            Dim::One => Window::interval(lo, hi),
            Dim::Two => Window::new(Dim::Two, (lo..hi).flat_map(|x| (lo..hi).map(move |y| GroupPoint::d2(x, y)))),
        }
    }

    pub fn origin(dim: Dim) -> Self {
        Window { dim, points: vec![GroupPoint::ORIGIN] }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn points(&self) -> &[GroupPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: GroupPoint) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    pub fn index_of(&self, p: GroupPoint) -> Option<usize> {
        self.points.binary_search(&p).ok()
    }

    pub fn is_subset(&self, other: &Window) -> bool {
        self.points.iter().all(|&p| other.contains(p))
    }

    pub fn translate(&self, g: GroupPoint) -> Window {
        Window { dim: self.dim, points: self.points.iter().map(|&p| p + g).collect() }
    }

    pub fn negate(&self) -> Window {
        let mut points: Vec<GroupPoint> = self.points.iter().map(|&p| -p).collect();
        points.sort_unstable();
        Window { dim: self.dim, points }
    }

    /// Minkowski sum `self ⊕ other`.
    pub fn minkowski(&self, other: &Window) -> Result<Window> {
        self.check_dim(other)?;
        Window::new(self.dim, self.points.iter().flat_map(|&p| other.points.iter().map(move |&q| p + q)))
    }

    pub fn union(&self, other: &Window) -> Result<Window> {
        self.check_dim(other)?;
        Window::new(self.dim, self.points.iter().chain(other.points.iter()).copied())
    }

    /// Points of `self` not in `other`.
    pub fn difference(&self, other: &Window) -> Vec<GroupPoint> {
        self.points.iter().copied().filter(|&p| !other.contains(p)).collect()
    }

    /// `{g : g + other ⊆ self}`, the largest window a sliding rule with
    /// window `other` can be evaluated on. May be empty.
    pub fn erode(&self, other: &Window) -> Vec<GroupPoint> {
        let first = other.points[0];
        self.points.iter().map(|&p| p - first).filter(|&g| other.points.iter().all(|&d| self.contains(g + d))).collect()
    }

    /// Bounding interval in Z, as `(min, max)` inclusive.
    pub fn hull_1d(&self) -> (i64, i64) {
        (self.points[0].x(), self.points[self.points.len() - 1].x())
    }

    pub fn is_interval(&self) -> bool {
        let (lo, hi) = self.hull_1d();
        self.dim == Dim::One && (hi - lo + 1) as usize == self.len()
    }

    pub(crate) fn check_dim(&self, other: &Window) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim.rank(), found: other.dim.rank() });
        }
        Ok(())
    }
}

/// `B(F, K) = {g : (K+g) ∩ F ≠ ∅ and (K+g) ⊄ F}`, sorted.
pub fn boundary(f: &Window, k: &Window) -> Result<Vec<GroupPoint>> {
    f.check_dim(k)?;
    let mut candidates: Vec<GroupPoint> =
        f.points().iter().flat_map(|&p| k.points().iter().map(move |&q| p - q)).collect();
    candidates.sort_unstable();
    candidates.dedup();
    Ok(candidates.into_iter().filter(|&g| k.points().iter().any(|&q| !f.contains(q + g))).collect())
}

/// Shape of the boxes in a Følner schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxKind {
    /// `[0, n)^d`
    Origin,
    /// `[-n, n)^d`
    Centered,
}

/// A box Følner sequence `F_n`, `n_min <= n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FolnerSchedule {
    pub kind: BoxKind,
    pub dim: Dim,
    pub n_min: usize,
    pub n_max: usize,
}

impl FolnerSchedule {
    pub fn new(kind: BoxKind, dim: Dim, n_min: usize, n_max: usize) -> Result<Self> {
        if n_min == 0 || n_min > n_max {
            return Err(Error::Invalid(format!("schedule range {n_min}..={n_max} is empty or starts at 0")));
        }
        Ok(FolnerSchedule { kind, dim, n_min, n_max })
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.n_min..=self.n_max
    }

    pub fn window(&self, n: usize) -> Result<Window> {
        if !self.indices().contains(&n) {
            return Err(Error::Invalid(format!("index {n} outside schedule range {}..={}", self.n_min, self.n_max)));
        }
        let n = n as i64;
        match self.kind {
            BoxKind::Origin => Window::cube(self.dim, 0, n),
            BoxKind::Centered => Window::cube(self.dim, -n, n),
        }
    }

    /// Largest `n · |B(F_n, K)| / |F_n|` over the schedule: the constant
    /// `c_K` in `|B(F_n,K)|/|F_n| <= c_K / n`.
    pub fn boundary_constant(&self, k: &Window) -> Result<f64> {
        let mut c: f64 = 0.0;
        for n in self.indices() {
            c = c.max(n as f64 * folner_ratio(self, k, n)?);
        }
        Ok(c)
    }
}

/// `|B(F_n, K)| / |F_n|`.
pub fn folner_ratio(schedule: &FolnerSchedule, k: &Window, n: usize) -> Result<f64> {
    let f = schedule.window(n)?;
    Ok(boundary(&f, k)?.len() as f64 / f.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubadditiveRow {
    pub n: usize,
    pub size: usize,
    pub value: f64,
    pub running_inf: f64,
}

/// Per-index ratios `φ(F_n)/|F_n|` with their running infimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubadditiveReadout {
    pub rows: Vec<SubadditiveRow>,
    /// Final running infimum.
    pub estimate: f64,
    /// Max minus min of the ratios over the trailing indices.
    pub spread: f64,
}

/// Number of trailing indices the spread is taken over.
pub const SPREAD_WINDOW: usize = 3;

/// Running-infimum readout of `φ(F_n)/|F_n|` for a subadditive, invariant φ.
pub fn subadditive_limit(values: &BTreeMap<usize, f64>, sizes: &BTreeMap<usize, usize>) -> Result<SubadditiveReadout> {
    if values.is_empty() {
        return Err(Error::Empty("subadditive values"));
    }
    let mut rows = Vec::with_capacity(values.len());
    let mut inf = f64::INFINITY;
    for (&n, &v) in values {
        let size = *sizes.get(&n).ok_or_else(|| Error::Invalid(format!("missing size for index {n}")))?;
        if size == 0 {
            return Err(Error::Invalid(format!("size for index {n} is zero")));
        }
        let value = v / size as f64;
        inf = inf.min(value);
        rows.push(SubadditiveRow { n, size, value, running_inf: inf });
    }
    let tail = &rows[rows.len().saturating_sub(SPREAD_WINDOW)..];
    let (lo, hi) =
        tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.value), hi.max(r.value)));
    Ok(SubadditiveReadout { rows, estimate: inf, spread: hi - lo })
}
