//! Partition-budgeted measure of noncompactness on finitely represented sets.
//!
//! The measure of a bounded set `B` under a seminorm `p` is the least `d`
//! such that `B` splits into finitely many parts of `p`-diameter at most `d`.
//! On a finite set that infimum is always zero, so the crate works with the
//! budgeted family `alpha_k`: the least achievable maximum part diameter over
//! partitions into at most `k` parts. Every comparison the condensing
//! arguments rely on (strict decrease under a map) survives at fixed `k`.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordered_space::{OrderedSpace, Point, SeminormSpec};
use crate::setmaps::MultiMap;

/// Largest set size solved exactly by branch-and-bound.
pub const DEFAULT_EXACT_THRESHOLD: usize = 14;

/// Default partition budget.
pub const DEFAULT_BUDGET: usize = 3;

/// A nonempty finite point set, deduplicated, in first-occurrence order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct FiniteSet {
    points: Vec<Point>,
}

impl FiniteSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        let mut seen = HashSet::new();
        let mut unique = Vec::with_capacity(points.len());
        for p in points {
            p.check_dim(dim)?;
            if seen.insert(p.key()) {
                unique.push(p);
            }
        }
        Ok(FiniteSet { points: unique })
    }

    pub fn singleton(p: Point) -> Self {
        FiniteSet { points: vec![p] }
    }

    /// Scalar points in `R^1`.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        FiniteSet::new(values.iter().map(|v| Point::scalar(*v)).collect::<Result<_>>()?)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    /// Exact (bitwise) membership.
    pub fn contains(&self, p: &Point) -> bool {
        let key = p.key();
        self.points.iter().any(|q| q.key() == key)
    }

    pub fn union(&self, other: &FiniteSet) -> Result<FiniteSet> {
        FiniteSet::new(self.points.iter().chain(&other.points).cloned().collect())
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    /// Exact `p`-diameter by pairwise maximisation.
    pub fn diam(&self, p: &SeminormSpec) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.max(dist(p, a, b));
            }
        }
        best
    }
}

impl TryFrom<Vec<Point>> for FiniteSet {
    type Error = Error;
    fn try_from(points: Vec<Point>) -> Result<Self> {
        FiniteSet::new(points)
    }
}

impl From<FiniteSet> for Vec<Point> {
    fn from(s: FiniteSet) -> Vec<Point> {
        s.points
    }
}

/// One axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Point,
    pub hi: Point,
}

impl AxisBox {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        hi.check_dim(lo.dim())?;
        if let Some(i) = lo
            .coords()
            .iter()
            .zip(hi.coords())
            .position(|(l, h)| l > h)
        {
            return Err(Error::InvalidBox(i));
        }
        Ok(AxisBox { lo, hi })
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.coords()
            .iter()
            .zip(self.lo.coords().iter().zip(self.hi.coords()))
            .all(|(c, (l, h))| l <= c && c <= h)
    }

    /// Coordinatewise projection of `x` onto the box.
    pub fn clamp(&self, x: &Point) -> Point {
        let coords = x
            .coords()
            .iter()
            .zip(self.lo.coords().iter().zip(self.hi.coords()))
            .map(|(c, (l, h))| c.clamp(*l, *h))
            .collect();
        Point::new(coords).expect("clamped coordinates are finite")
    }

    pub fn centroid(&self) -> Point {
        let coords = self
            .lo
            .coords()
            .iter()
            .zip(self.hi.coords())
            .map(|(l, h)| l + 0.5 * (h - l))
            .collect();
        Point::new(coords).expect("centroid is finite")
    }

    /// All `2^d` vertices (collapsed where `lo_i == hi_i`).
    pub fn vertices(&self) -> Vec<Point> {
        let d = self.lo.dim();
        let free: Vec<usize> = (0..d)
            .filter(|&i| self.lo.coords()[i] != self.hi.coords()[i])
            .collect();
        let mut out = Vec::with_capacity(1 << free.len());
        for mask in 0u64..(1u64 << free.len()) {
            let mut coords = self.lo.coords().to_vec();
            for (bit, &i) in free.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    coords[i] = self.hi.coords()[i];
                }
            }
            out.push(Point::new(coords).expect("vertex is finite"));
        }
        out
    }
}

/// A nonempty finite union of axis-aligned boxes; boxes may overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AxisBox>", into = "Vec<AxisBox>")]
pub struct BoxSet {
    boxes: Vec<AxisBox>,
}

impl BoxSet {
    pub fn new(boxes: Vec<AxisBox>) -> Result<Self> {
        let first = boxes.first().ok_or(Error::EmptySet)?;
        let dim = first.lo.dim();
        for b in &boxes {
            b.lo.check_dim(dim)?;
            AxisBox::new(b.lo.clone(), b.hi.clone())?;
        }
        Ok(BoxSet { boxes })
    }

    pub fn single(lo: Point, hi: Point) -> Result<Self> {
        Ok(BoxSet {
            boxes: vec![AxisBox::new(lo, hi)?],
        })
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn dim(&self) -> usize {
        self.boxes[0].lo.dim()
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.boxes.iter().any(|b| b.contains(x))
    }

    /// Exact `p`-diameter. For boxes `B1`, `B2` the differences `x - y`
    /// sweep the box `[lo1 - hi2, hi1 - lo2]`, whose `p`-maximum is attained
    /// at a vertex.
    pub fn diam(&self, p: &SeminormSpec) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.boxes.iter().enumerate() {
            for b in &self.boxes[i..] {
                let lo: Vec<f64> = a.lo.coords().iter().zip(b.hi.coords()).map(|(x, y)| x - y).collect();
                let hi: Vec<f64> = a.hi.coords().iter().zip(b.lo.coords()).map(|(x, y)| x - y).collect();
                best = best.max(p.max_over_box(&lo, &hi));
            }
        }
        best
    }

    /// Vertex sets plus centroids, the finite stand-in used for measures.
    pub fn discretize(&self) -> FiniteSet {
        let points = self
            .boxes
            .iter()
            .flat_map(|b| {
                let mut v = b.vertices();
                v.push(b.centroid());
                v
            })
            .collect();
        FiniteSet::new(points).expect("boxes are nonempty with a common dimension")
    }
}

impl TryFrom<Vec<AxisBox>> for BoxSet {
    type Error = Error;

    fn try_from(boxes: Vec<AxisBox>) -> Result<Self> {
        BoxSet::new(boxes)
    }
}

impl From<BoxSet> for Vec<AxisBox> {
    fn from(set: BoxSet) -> Self {
        set.boxes
    }
}

/// An element of `Φ`: one nonnegative value per seminorm identifier.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasureValue(pub BTreeMap<String, f64>);

impl MeasureValue {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.0.get(id).copied()
    }

    pub fn insert(&mut self, id: impl Into<String>, value: f64) {
        self.0.insert(id.into(), value);
    }

    pub fn max(&self) -> f64 {
        self.0.values().copied().fold(0.0, f64::max)
    }

    pub fn all_within(&self, tol: f64) -> bool {
        self.0.values().all(|v| *v <= tol)
    }

    /// The pointwise order of `Φ`.
    pub fn leq(&self, other: &MeasureValue) -> bool {
        self.0
            .iter()
            .all(|(id, v)| other.0.get(id).is_some_and(|w| v <= w))
    }
}

/// Result of [`alpha_k`]; `heuristic` is set when the value is a greedy
/// upper bound rather than the exact optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaValue {
    pub value: f64,
    pub heuristic: bool,
}

/// `alpha_k(A)(p)` with the default exact threshold.
///
/// # Panics
///
/// Panics if `k == 0`.
pub fn alpha_k(set: &FiniteSet, p: &SeminormSpec, k: usize) -> AlphaValue {
    alpha_k_with(set, p, k, DEFAULT_EXACT_THRESHOLD)
}

/// The minimum over partitions of `set` into at most `k` parts of the largest
/// part `p`-diameter. Exact for `k == 1`, `k >= |set|` and
/// `|set| <= exact_threshold`; otherwise a farthest-point greedy upper bound.
pub fn alpha_k_with(set: &FiniteSet, p: &SeminormSpec, k: usize, exact_threshold: usize) -> AlphaValue {
    assert!(k >= 1, "partition budget must be at least 1");
    let n = set.len();
    if k >= n {
        return AlphaValue { value: 0.0, heuristic: false };
    }
    if k == 1 {
        return AlphaValue { value: set.diam(p), heuristic: false };
    }
    let d = distance_matrix(set, p);
    let greedy = greedy_partition_value(&d, k);
    if n > exact_threshold {
        return AlphaValue { value: greedy, heuristic: true };
    }
    AlphaValue {
        value: BranchAndBound::solve(&d, k, greedy),
        heuristic: false,
    }
}

/// Per-seminorm `alpha_k` over a whole space; the flag reports whether any
/// entry is heuristic.
pub fn alpha_measure(space: &OrderedSpace, set: &FiniteSet, k: usize, exact_threshold: usize) -> (MeasureValue, bool) {
    let mut m = MeasureValue::default();
    let mut heuristic = false;
    for p in space.seminorms() {
        let a = alpha_k_with(set, p, k, exact_threshold);
        heuristic |= a.heuristic;
        m.insert(p.id.clone(), a.value);
    }
    (m, heuristic)
}

/// Measure of a product set from its factor measures: `max(dx, dy)`.
pub fn alpha_product(dx: f64, dy: f64) -> Result<f64> {
    for v in [dx, dy] {
        if v < 0.0 || v.is_nan() {
            return Err(Error::NegativeInput(v));
        }
    }
    Ok(dx.max(dy))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CondensingOutcome {
    Pass,
    Fail,
    /// The input set already has zero measure, so the condition says nothing.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensingReport {
    pub map: String,
    pub seminorm: String,
    pub k: usize,
    pub strict: bool,
    pub alpha_set: f64,
    pub alpha_image: f64,
    pub image_size: usize,
    pub heuristic: bool,
    pub outcome: CondensingOutcome,
}

/// Image `T(A) = ∪ T(x)` with box images replaced by their discretisation.
pub fn image_of(map: &MultiMap, set: &FiniteSet) -> Result<FiniteSet> {
    let mut points = Vec::new();
    for x in set.points() {
        points.extend(map.eval(x)?.to_finite().into_points());
    }
    FiniteSet::new(points)
}

/// Compares `alpha_k(T(A))(p)` against `alpha_k(A)(p)`.
pub fn condensing_check(
    map: &MultiMap,
    set: &FiniteSet,
    p: &SeminormSpec,
    k: usize,
    strict: bool,
) -> Result<CondensingReport> {
    let image = image_of(map, set)?;
    let a = alpha_k(set, p, k);
    let b = alpha_k(&image, p, k);
    Ok(CondensingReport {
        map: map.name().to_string(),
        seminorm: p.id.clone(),
        k,
        strict,
        alpha_set: a.value,
        alpha_image: b.value,
        image_size: image.len(),
        heuristic: a.heuristic || b.heuristic,
        outcome: compare_measures(a.value, b.value, strict),
    })
}

pub(crate) fn compare_measures(before: f64, after: f64, strict: bool) -> CondensingOutcome {
    if before == 0.0 {
        CondensingOutcome::Vacuous
    } else if (strict && after < before) || (!strict && after <= before) {
        CondensingOutcome::Pass
    } else {
        CondensingOutcome::Fail
    }
}

fn dist(p: &SeminormSpec, a: &Point, b: &Point) -> f64 {
    p.dist(a, b).expect("points of one set share a dimension")
}

fn distance_matrix(set: &FiniteSet, p: &SeminormSpec) -> Vec<Vec<f64>> {
    let pts = set.points();
    let n = pts.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = dist(p, &pts[i], &pts[j]);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Farthest-point centres, nearest-centre assignment (ties to the lower
/// centre index), then the largest resulting part diameter.
fn greedy_partition_value(d: &[Vec<f64>], k: usize) -> f64 {
    let n = d.len();
    let mut centres = vec![0usize];
    let mut nearest: Vec<f64> = d[0].clone();
    while centres.len() < k.min(n) {
        let (far, _) = nearest
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
        centres.push(far);
        for (near, &to_far) in nearest.iter_mut().zip(&d[far]) {
            *near = near.min(to_far);
        }
    }
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); centres.len()];
    // `d` is symmetric, so row `i` holds the distances to every centre.
    for (i, row) in d.iter().enumerate() {
        let best = (1..centres.len()).fold(0, |b, c| if row[centres[c]] < row[centres[b]] { c } else { b });
        parts[best].push(i);
    }
    parts
        .iter()
        .map(|part| {
            let mut m = 0.0f64;
            for (a, &i) in part.iter().enumerate() {
                for &j in &part[a + 1..] {
                    m = m.max(d[i][j]);
                }
            }
            m
        })
        .fold(0.0, f64::max)
}

/// Depth-first assignment of points to parts with canonical part opening
/// and pruning against the incumbent.
struct BranchAndBound<'a> {
    d: &'a [Vec<f64>],
    order: Vec<usize>,
    k: usize,
    best: f64,
    parts: Vec<Vec<usize>>,
}

impl<'a> BranchAndBound<'a> {
    fn solve(d: &'a [Vec<f64>], k: usize, upper: f64) -> f64 {
        let n = d.len();
        let mut order: Vec<usize> = (0..n).collect();
        // Spread-out points first: their placements decide the bound early.
        let reach: Vec<f64> = d.iter().map(|row| row.iter().copied().fold(0.0, f64::max)).collect();
        order.sort_by(|&a, &b| reach[b].total_cmp(&reach[a]).then(a.cmp(&b)));
        let mut search = BranchAndBound {
            d,
            order,
            k,
            best: upper,
            parts: Vec::with_capacity(k),
        };
        search.descend(0, 0.0);
        search.best
    }

    fn descend(&mut self, pos: usize, current: f64) {
        if pos == self.order.len() {
            self.best = current;
            return;
        }
        let i = self.order[pos];
        for part in 0..self.parts.len() {
            let grown = self.parts[part]
                .iter()
                .fold(current, |m, &j| m.max(self.d[i][j]));
            if grown < self.best {
                self.parts[part].push(i);
                self.descend(pos + 1, grown);
                self.parts[part].pop();
            }
        }
        if self.parts.len() < self.k && current < self.best {
            self.parts.push(vec![i]);
            self.descend(pos + 1, current);
            self.parts.pop();
        }
    }
}
