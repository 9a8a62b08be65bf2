//! Two-player zero-sum games on finite strategy grids.
//!
//! Player one picks `x` in grid `A` and gains `K(x, y)`; player two picks `y`
//! in grid `B`. The best-response correspondences
//!
//! ```text
//! N_y = { x : K(x, y) = max_A K(., y) }     M_x = { y : K(x, y) = min_B K(x, .) }
//! ```
//!
//! define `S(x, y) = N_y × {y}` and `T(x, y) = {x} × M_x` on `A × B`. A common
//! fixed point of `(S, T)` is exactly a saddle point of `K`. The same
//! construction with arbitrary section sets finds a point of `Q ∩ Q'`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixpoint_engine::{iterate_common, FixpointRun, PreflightOptions, PreflightReport, SolverOptions};
use crate::noncompactness::{alpha_k, compare_measures, CondensingOutcome, FiniteSet};
use crate::ordered_space::{ConeSpec, OrderedSpace, Point, SeminormKind, SeminormSpec};
use crate::payoff_expr::{bind_coordinates, coordinate_names, parse, Expr};
use crate::setmaps::{
    weakly_isotone_check, Direction, IsotoneClause, MultiMap, OrderViolation, SetRelation, SetValue,
};

/// Evenly spaced one-dimensional grid with both endpoints included exactly.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::InvalidGame("linspace needs at least one point".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidGame("linspace bounds must be finite".into()));
    }
    if n == 1 {
        return Ok(vec![Point::scalar(lo)?]);
    }
    (0..n)
        .map(|i| {
            let v = if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
            };
            Point::scalar(v)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    First,
    Second,
}

/// `X × Y` with the product cone and the product seminorm family
/// `(p × q)(x, y) = max(p(x), q(y))` over all factor pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    x: OrderedSpace,
    y: OrderedSpace,
    joint: OrderedSpace,
    /// `(i, j)` for the joint seminorm built from `x.seminorms()[i]` and `y.seminorms()[j]`.
    pairs: Vec<(usize, usize)>,
}

impl ProductSpace {
    pub fn new(x: OrderedSpace, y: OrderedSpace) -> Result<Self> {
        let (dx, dy) = (x.dim(), y.dim());
        let cone = match (x.cone(), y.cone()) {
            (ConeSpec::Orthant, ConeSpec::Orthant) => ConeSpec::Orthant,
            (cx, cy) => {
                let mut rows = Vec::new();
                for r in cone_rows(cx, dx) {
                    rows.push(pad(&r, 0, dx + dy));
                }
                for r in cone_rows(cy, dy) {
                    rows.push(pad(&r, dx, dx + dy));
                }
                ConeSpec::Polyhedral { rows }
            }
        };
        let mut seminorms = Vec::new();
        let mut pairs = Vec::new();
        for (i, p) in x.seminorms().iter().enumerate() {
            for (j, q) in y.seminorms().iter().enumerate() {
                seminorms.push(product_seminorm(p, q, dx, dy));
                pairs.push((i, j));
            }
        }
        let eps = x.eps().max(y.eps());
        let joint = OrderedSpace::with_tolerance(dx + dy, cone, seminorms, eps)?;
        Ok(ProductSpace { x, y, joint, pairs })
    }

    pub fn x(&self) -> &OrderedSpace {
        &self.x
    }

    pub fn y(&self) -> &OrderedSpace {
        &self.y
    }

    pub fn joint(&self) -> &OrderedSpace {
        &self.joint
    }

    /// Factor seminorms of the `index`-th joint seminorm.
    pub fn factors(&self, index: usize) -> (&SeminormSpec, &SeminormSpec) {
        let (i, j) = self.pairs[index];
        (&self.x.seminorms()[i], &self.y.seminorms()[j])
    }

    pub fn join(&self, x: &Point, y: &Point) -> Result<Point> {
        self.x.check_dim(x)?;
        self.y.check_dim(y)?;
        Ok(x.concat(y))
    }

    pub fn split(&self, z: &Point) -> Result<(Point, Point)> {
        self.joint.check_dim(z)?;
        let (a, b) = z.coords().split_at(self.x.dim());
        Ok((Point::new(a.to_vec())?, Point::new(b.to_vec())?))
    }

    /// `σ(Q) = {(a, q) : q in Q}`.
    pub fn sigma_embed(&self, a: &Point, q: &FiniteSet) -> Result<FiniteSet> {
        let pts = q.points().iter().map(|p| self.join(a, p)).collect::<Result<Vec<_>>>()?;
        FiniteSet::new(pts)
    }

    /// Componentwise projection with deduplication.
    pub fn project(&self, set: &FiniteSet, axis: Axis) -> Result<FiniteSet> {
        let mut pts = Vec::with_capacity(set.len());
        for z in set.points() {
            let (a, b) = self.split(z)?;
            pts.push(match axis {
                Axis::First => a,
                Axis::Second => b,
            });
        }
        FiniteSet::new(pts)
    }
}

fn cone_rows(cone: &ConeSpec, dim: usize) -> Vec<Vec<f64>> {
    match cone {
        ConeSpec::Orthant => (0..dim).map(|i| Point::axis(dim, i, 1.0).into_coords()).collect(),
        ConeSpec::Polyhedral { rows } => rows.clone(),
    }
}

fn pad(row: &[f64], offset: usize, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    out[offset..offset + row.len()].copy_from_slice(row);
    out
}

fn seminorm_rows(p: &SeminormSpec, dim: usize) -> Vec<Vec<f64>> {
    match &p.kind {
        SeminormKind::WeightedSup { weights } => weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(i, w)| Point::axis(dim, i, *w).into_coords())
            .collect(),
        SeminormKind::FunctionalMax { rows } => rows.clone(),
    }
}

fn product_seminorm(p: &SeminormSpec, q: &SeminormSpec, dx: usize, dy: usize) -> SeminormSpec {
    let id = if p.id == q.id {
        p.id.clone()
    } else {
        format!("{}*{}", p.id, q.id)
    };
    match (&p.kind, &q.kind) {
        (SeminormKind::WeightedSup { weights: wp }, SeminormKind::WeightedSup { weights: wq }) => {
            SeminormSpec::weighted_sup(id, wp.iter().chain(wq).copied().collect())
        }
        _ => {
            let mut rows: Vec<Vec<f64>> = seminorm_rows(p, dx).iter().map(|r| pad(r, 0, dx + dy)).collect();
            rows.extend(seminorm_rows(q, dy).iter().map(|r| pad(r, dx, dx + dy)));
            if rows.is_empty() {
                rows.push(vec![0.0; dx + dy]);
            }
            SeminormSpec::functional_max(id, rows)
        }
    }
}

/// Exact-key index of grid points.
fn index_map(points: &[Point]) -> HashMap<Vec<u64>, usize> {
    points.iter().enumerate().map(|(i, p)| (p.key(), i)).collect()
}

fn grid_set(space: &OrderedSpace, points: Vec<Point>, label: &str) -> Result<FiniteSet> {
    if points.is_empty() {
        return Err(Error::InvalidGame(format!("grid {label} is empty")));
    }
    for p in &points {
        space.check_dim(p)?;
    }
    let n = points.len();
    let set = FiniteSet::new(points)?;
    if set.len() != n {
        return Err(Error::InvalidGame(format!("grid {label} contains repeated points")));
    }
    Ok(set)
}

/// Lexicographically smallest grid point.
fn lex_min(points: &[Point]) -> usize {
    (0..points.len())
        .min_by(|&a, &b| points[a].lex_cmp(&points[b]))
        .expect("grids are nonempty")
}

/// A finite zero-sum game `(A, B, K)`.
#[derive(Debug, Clone)]
pub struct Game {
    space: ProductSpace,
    grid_a: FiniteSet,
    grid_b: FiniteSet,
    payoff: Vec<Vec<f64>>,
}

impl Game {
    pub fn new(
        space_x: OrderedSpace,
        space_y: OrderedSpace,
        grid_a: Vec<Point>,
        grid_b: Vec<Point>,
        payoff: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let grid_a = grid_set(&space_x, grid_a, "A")?;
        let grid_b = grid_set(&space_y, grid_b, "B")?;
        if payoff.len() != grid_a.len() {
            return Err(Error::InvalidGame(format!(
                "payoff has {} rows, grid A has {} points",
                payoff.len(),
                grid_a.len()
            )));
        }
        for (i, row) in payoff.iter().enumerate() {
            if row.len() != grid_b.len() {
                return Err(Error::InvalidGame(format!(
                    "payoff row {i} has {} entries, grid B has {} points",
                    row.len(),
                    grid_b.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidGame(format!("payoff entry ({i}, {j}) is not finite")));
            }
        }
        Ok(Game {
            space: ProductSpace::new(space_x, space_y)?,
            grid_a,
            grid_b,
            payoff,
        })
    }

    /// One-dimensional game with the orthant order and sup seminorm.
    pub fn scalar(grid_a: &[f64], grid_b: &[f64], payoff: Vec<Vec<f64>>) -> Result<Self> {
        let a = grid_a.iter().map(|v| Point::scalar(*v)).collect::<Result<_>>()?;
        let b = grid_b.iter().map(|v| Point::scalar(*v)).collect::<Result<_>>()?;
        Game::new(
            OrderedSpace::euclidean_orthant(1),
            OrderedSpace::euclidean_orthant(1),
            a,
            b,
            payoff,
        )
    }

    /// Tabulates `f` over `A × B`.
    pub fn from_fn(
        space_x: OrderedSpace,
        space_y: OrderedSpace,
        grid_a: Vec<Point>,
        grid_b: Vec<Point>,
        f: impl Fn(&Point, &Point) -> Result<f64>,
    ) -> Result<Self> {
        let payoff = grid_a
            .iter()
            .map(|x| grid_b.iter().map(|y| f(x, y)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Game::new(space_x, space_y, grid_a, grid_b, payoff)
    }

    /// Tabulates a payoff expression in the variables of [`payoff_variables`].
    pub fn from_expr(
        space_x: OrderedSpace,
        space_y: OrderedSpace,
        grid_a: Vec<Point>,
        grid_b: Vec<Point>,
        source: &str,
    ) -> Result<Self> {
        let expr = parse(source, &payoff_variables(space_x.dim(), space_y.dim()))?;
        Game::from_fn(space_x, space_y, grid_a, grid_b, |x, y| eval_payoff(&expr, x, y))
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn grid_a(&self) -> &FiniteSet {
        &self.grid_a
    }

    pub fn grid_b(&self) -> &FiniteSet {
        &self.grid_b
    }

    pub fn payoff(&self) -> &[Vec<f64>] {
        &self.payoff
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.grid_a.len(), self.grid_b.len())
    }

    pub fn payoff_range(&self) -> (f64, f64) {
        self.payoff.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        })
    }

    /// `1e-9` times the spread of payoff values.
    pub fn default_tie_eps(&self) -> f64 {
        let (lo, hi) = self.payoff_range();
        1e-9 * (hi - lo)
    }

    /// Index pair of the lexicographically smallest grid pair.
    pub fn default_start(&self) -> (usize, usize) {
        (lex_min(self.grid_a.points()), lex_min(self.grid_b.points()))
    }
}

/// Variable names available to payoff expressions: `x`, `y` in one dimension,
/// `x1..xd`, `y1..yd` in general.
pub fn payoff_variables(dx: usize, dy: usize) -> Vec<String> {
    let mut v = coordinate_names("x", dx);
    v.extend(coordinate_names("y", dy));
    v
}

/// Evaluates a payoff expression at one strategy pair.
pub fn eval_payoff(expr: &Expr, x: &Point, y: &Point) -> Result<f64> {
    let mut env = HashMap::new();
    bind_coordinates(&mut env, "x", x.coords());
    bind_coordinates(&mut env, "y", y.coords());
    Ok(expr.eval(&env)?)
}

/// Best-response values and argsets, ties kept within `tie_eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponseTables {
    /// `phi[i] = min_j K[i][j]`.
    pub phi: Vec<f64>,
    /// `psi[j] = max_i K[i][j]`.
    pub psi: Vec<f64>,
    /// `n_sets[j]`: maximizer responses to `y_j`, ascending indices.
    pub n_sets: Vec<Vec<usize>>,
    /// `m_sets[i]`: minimizer responses to `x_i`, ascending indices.
    pub m_sets: Vec<Vec<usize>>,
    pub tie_eps: f64,
}

impl BestResponseTables {
    pub fn is_saddle(&self, i: usize, j: usize) -> bool {
        self.n_sets[j].binary_search(&i).is_ok() && self.m_sets[i].binary_search(&j).is_ok()
    }
}

pub fn best_response_tables(game: &Game, tie_eps: f64) -> BestResponseTables {
    let k = &game.payoff;
    let (na, nb) = game.shape();
    let phi: Vec<f64> = k.iter().map(|row| row.iter().copied().fold(f64::INFINITY, f64::min)).collect();
    let psi: Vec<f64> = (0..nb)
        .map(|j| (0..na).map(|i| k[i][j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let n_sets = (0..nb)
        .map(|j| (0..na).filter(|&i| psi[j] - k[i][j] <= tie_eps).collect())
        .collect();
    let m_sets = (0..na)
        .map(|i| (0..nb).filter(|&j| k[i][j] - phi[i] <= tie_eps).collect())
        .collect();
    BestResponseTables { phi, psi, n_sets, m_sets, tie_eps }
}

/// Section families on `A × B`: `n_sets[j] ⊆ A` and `m_sets[i] ⊆ B` as index lists.
#[derive(Debug, Clone)]
struct Sections<'a> {
    space: &'a ProductSpace,
    grid_a: &'a FiniteSet,
    grid_b: &'a FiniteSet,
    n_sets: &'a [Vec<usize>],
    m_sets: &'a [Vec<usize>],
}

impl<'a> Sections<'a> {
    /// `S(x, y) = N_y × {y}` and `T(x, y) = {x} × M_x`.
    fn maps(&self) -> (MultiMap, MultiMap) {
        let lookup = Arc::new(GridLookup::new(self.space, self.grid_a, self.grid_b));
        let a: Arc<Vec<Point>> = Arc::new(self.grid_a.points().to_vec());
        let b: Arc<Vec<Point>> = Arc::new(self.grid_b.points().to_vec());
        let n: Arc<Vec<Vec<usize>>> = Arc::new(self.n_sets.to_vec());
        let m: Arc<Vec<Vec<usize>>> = Arc::new(self.m_sets.to_vec());

        let (la, aa, ba) = (lookup.clone(), a.clone(), b.clone());
        let s = MultiMap::new("S", move |z: &Point| {
            let (_, j) = la.locate(z)?;
            let pts = n[j].iter().map(|&i| aa[i].concat(&ba[j])).collect();
            Ok(SetValue::Finite(FiniteSet::new(pts)?))
        });
        let t = MultiMap::new("T", move |z: &Point| {
            let (i, _) = lookup.locate(z)?;
            let pts = m[i].iter().map(|&j| a[i].concat(&b[j])).collect();
            Ok(SetValue::Finite(FiniteSet::new(pts)?))
        });
        (s, t)
    }

    /// `B ⪯ M_x'` for every `x'` in some `N_y`, and `A ⪯ N_y'` for every
    /// `y'` in some `M_x`.
    fn hypothesis3(&self) -> Result<Vec<OrderViolation>> {
        let mut out = Vec::new();
        let a = self.grid_a.points();
        let b = self.grid_b.points();
        let as_set = |idx: &[usize], pts: &[Point]| FiniteSet::new(idx.iter().map(|&i| pts[i].clone()).collect());

        let mut seen = vec![false; a.len()];
        for (j, nj) in self.n_sets.iter().enumerate() {
            for &i in nj {
                if std::mem::replace(&mut seen[i], true) {
                    continue;
                }
                let mi = as_set(&self.m_sets[i], b)?;
                if let Some(witness) = SetRelation::Dhage.violation(self.space.y(), self.grid_b, &mi)? {
                    let z = a[i].concat(&b[j]);
                    out.push(OrderViolation {
                        sample: z.clone(),
                        via: z,
                        clause: IsotoneClause::MinimizerSection,
                        direction: Direction::Increasing,
                        relation: SetRelation::Dhage,
                        witness,
                    });
                }
            }
        }
        let mut seen = vec![false; b.len()];
        for (i, mi) in self.m_sets.iter().enumerate() {
            for &j in mi {
                if std::mem::replace(&mut seen[j], true) {
                    continue;
                }
                let nj = as_set(&self.n_sets[j], a)?;
                if let Some(witness) = SetRelation::Dhage.violation(self.space.x(), self.grid_a, &nj)? {
                    let z = a[i].concat(&b[j]);
                    out.push(OrderViolation {
                        sample: z.clone(),
                        via: z,
                        clause: IsotoneClause::MaximizerSection,
                        direction: Direction::Increasing,
                        relation: SetRelation::Dhage,
                        witness,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// Maps product points back to grid indices by exact coordinates.
#[derive(Debug)]
struct GridLookup {
    dx: usize,
    a: HashMap<Vec<u64>, usize>,
    b: HashMap<Vec<u64>, usize>,
}

impl GridLookup {
    fn new(space: &ProductSpace, grid_a: &FiniteSet, grid_b: &FiniteSet) -> Self {
        GridLookup {
            dx: space.x().dim(),
            a: index_map(grid_a.points()),
            b: index_map(grid_b.points()),
        }
    }

    fn locate(&self, z: &Point) -> Result<(usize, usize)> {
        let key = z.key();
        if key.len() < self.dx {
            return Err(Error::DimensionMismatch {
                expected: self.dx,
                found: key.len(),
            });
        }
        let (ka, kb) = key.split_at(self.dx);
        match (self.a.get(ka), self.b.get(kb)) {
            (Some(&i), Some(&j)) => Ok((i, j)),
            _ => Err(Error::Evaluation {
                map: "grid".into(),
                reason: format!("{z:?} is not a grid point"),
            }),
        }
    }
}

impl Game {
    fn sections<'a>(&'a self, tables: &'a BestResponseTables) -> Sections<'a> {
        Sections {
            space: &self.space,
            grid_a: &self.grid_a,
            grid_b: &self.grid_b,
            n_sets: &tables.n_sets,
            m_sets: &tables.m_sets,
        }
    }

    /// Grid pair `(i, j)` of a product point.
    pub fn locate(&self, z: &Point) -> Result<(usize, usize)> {
        GridLookup::new(&self.space, &self.grid_a, &self.grid_b).locate(z)
    }

    pub fn pair(&self, i: usize, j: usize) -> Point {
        self.grid_a.points()[i].concat(&self.grid_b.points()[j])
    }

    /// All grid pairs in row-major index order.
    pub fn pairs(&self) -> Vec<Point> {
        let (na, nb) = self.shape();
        (0..na).flat_map(|i| (0..nb).map(move |j| (i, j))).map(|(i, j)| self.pair(i, j)).collect()
    }
}

/// `S(x, y) = N_y × {y}` and `T(x, y) = {x} × M_x` on the grid product.
pub fn build_maps(game: &Game, tables: &BestResponseTables) -> (MultiMap, MultiMap) {
    game.sections(tables).maps()
}

/// Both Dhage-order families of the third hypothesis, checked exactly.
pub fn hypothesis3_check(game: &Game, tables: &BestResponseTables) -> Result<Vec<OrderViolation>> {
    game.sections(tables).hypothesis3()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub maxmin: f64,
    pub minmax: f64,
    /// `(i, j)` with `K[i][j]` equal to both its column maximum and row minimum.
    pub saddles: Vec<(usize, usize)>,
}

/// Exhaustive pure-strategy maxmin, minmax and saddle enumeration.
pub fn minimax_oracle(game: &Game) -> OracleResult {
    minimax_oracle_with(game, 0.0)
}

/// As [`minimax_oracle`], with saddle ties accepted within `eps`.
pub fn minimax_oracle_with(game: &Game, eps: f64) -> OracleResult {
    let k = &game.payoff;
    let (na, nb) = game.shape();
    let mut maxmin = f64::NEG_INFINITY;
    let mut row_min = vec![f64::INFINITY; na];
    let mut col_max = vec![f64::NEG_INFINITY; nb];
    for i in 0..na {
        for j in 0..nb {
            row_min[i] = row_min[i].min(k[i][j]);
            col_max[j] = col_max[j].max(k[i][j]);
        }
        maxmin = maxmin.max(row_min[i]);
    }
    let minmax = col_max.iter().copied().fold(f64::INFINITY, f64::min);
    let mut saddles = Vec::new();
    for i in 0..na {
        for j in 0..nb {
            if k[i][j] >= col_max[j] - eps && k[i][j] <= row_min[i] + eps {
                saddles.push((i, j));
            }
        }
    }
    OracleResult { maxmin, minmax, saddles }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameOptions {
    #[serde(flatten)]
    pub solver: SolverOptions,
    /// Argset tolerance; `None` uses [`Game::default_tie_eps`].
    pub tie_eps: Option<f64>,
    /// Partition budget of the embedding diagnostics.
    pub k: usize,
    /// Upper bound on grid pairs sampled by the isotonicity check.
    pub max_samples: usize,
}

impl Default for GameOptions {
    fn default() -> Self {
        GameOptions {
            solver: SolverOptions {
                tol: 1e-9,
                max_iter: 200,
                preflight: Some(PreflightOptions::default()),
                ..SolverOptions::default()
            },
            tie_eps: None,
            k: 3,
            max_samples: 40_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameOutcome {
    SaddleFound,
    NoConvergence,
    HypothesesNotSatisfied,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddlePoint {
    pub i: usize,
    pub j: usize,
    pub x: Point,
    pub y: Point,
    pub value: f64,
}

/// One comparison `alpha(after) <= alpha(before)` for an embedding or projection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingCheck {
    pub map: String,
    pub seminorm: String,
    pub k: usize,
    pub alpha_before: f64,
    pub alpha_after: f64,
    pub strict: CondensingOutcome,
    pub non_strict: CondensingOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisSummary {
    /// Grid pairs on which weak isotonicity was checked.
    pub samples: usize,
    pub isotone_violations_increasing: usize,
    pub isotone_violations_decreasing: usize,
    /// The direction in which `(S, T)` is weakly isotone on the samples.
    pub weakly_isotone: Option<Direction>,
    pub hypothesis3_violations: Vec<OrderViolation>,
    pub preflight: Vec<PreflightReport>,
    pub embeddings: Vec<EmbeddingCheck>,
    /// Weak isotonicity in some direction and an empty hypothesis-3 list.
    pub satisfied: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SaddleReport {
    pub outcome: GameOutcome,
    pub saddle: Option<SaddlePoint>,
    pub oracle: OracleResult,
    pub value_tol: f64,
    /// Whether a reported saddle value lies within `value_tol` of both oracle values.
    pub oracle_agrees: Option<bool>,
    pub grid: (usize, usize),
    pub start: (usize, usize),
    pub hypotheses: HypothesisSummary,
    #[serde(skip)]
    pub tables: BestResponseTables,
    #[serde(skip)]
    pub run: FixpointRun,
}

fn strided<T: Clone>(items: Vec<T>, cap: usize) -> Vec<T> {
    if items.len() <= cap || cap == 0 {
        return items;
    }
    let stride = items.len().div_ceil(cap);
    items.into_iter().step_by(stride).collect()
}

/// Checks the hypotheses, iterates from `start` and certifies the result
/// against the payoff table and the oracle.
pub fn solve_game(game: &Game, start: Option<(usize, usize)>, opts: &GameOptions) -> Result<SaddleReport> {
    let tie_eps = opts.tie_eps.unwrap_or_else(|| game.default_tie_eps());
    if !(tie_eps.is_finite() && tie_eps >= 0.0) {
        return Err(Error::InvalidOptions("tie_eps must be finite and nonnegative".into()));
    }
    if opts.k == 0 {
        return Err(Error::InvalidOptions("budget k must be at least 1".into()));
    }
    let (na, nb) = game.shape();
    let start = start.unwrap_or_else(|| game.default_start());
    if start.0 >= na || start.1 >= nb {
        return Err(Error::InvalidOptions(format!("start {start:?} is outside the {na}×{nb} grid")));
    }

    let tables = best_response_tables(game, tie_eps);
    let (s, t) = build_maps(game, &tables);
    let joint = game.space.joint();

    let samples = strided(game.pairs(), opts.max_samples);
    let inc = weakly_isotone_check(joint, &s, &t, &samples, Direction::Increasing, SetRelation::Dhage)?.len();
    let dec = weakly_isotone_check(joint, &s, &t, &samples, Direction::Decreasing, SetRelation::Dhage)?.len();
    let weakly_isotone = match (inc, dec) {
        (0, _) => Some(Direction::Increasing),
        (_, 0) => Some(Direction::Decreasing),
        _ => None,
    };
    let hyp3 = hypothesis3_check(game, &tables)?;

    let mut solver = opts.solver;
    solver.preflight.get_or_insert_with(PreflightOptions::default);
    let x0 = game.pair(start.0, start.1);
    let run = iterate_common(joint, &s, &t, &x0, &solver)?;
    let embeddings = embedding_checks(game, &run, &x0, opts.k)?;

    let oracle = minimax_oracle(game);
    let saddle = if run.converged() {
        let (i, j) = game.locate(&run.certificate.point)?;
        tables.is_saddle(i, j).then(|| SaddlePoint {
            i,
            j,
            x: game.grid_a.points()[i].clone(),
            y: game.grid_b.points()[j].clone(),
            value: game.payoff[i][j],
        })
    } else {
        None
    };
    let oracle_agrees = saddle
        .as_ref()
        .map(|sp| (sp.value - oracle.maxmin).abs() <= tie_eps && (sp.value - oracle.minmax).abs() <= tie_eps);

    let satisfied = weakly_isotone.is_some() && hyp3.is_empty();
    let outcome = match (&saddle, satisfied) {
        (Some(_), _) => GameOutcome::SaddleFound,
        (None, false) => GameOutcome::HypothesesNotSatisfied,
        (None, true) => GameOutcome::NoConvergence,
    };
    Ok(SaddleReport {
        outcome,
        saddle,
        oracle,
        value_tol: tie_eps,
        oracle_agrees,
        grid: (na, nb),
        start,
        hypotheses: HypothesisSummary {
            samples: samples.len(),
            isotone_violations_increasing: inc,
            isotone_violations_decreasing: dec,
            weakly_isotone,
            hypothesis3_violations: hyp3,
            preflight: run.preflight.clone().unwrap_or_default(),
            embeddings,
            satisfied,
        },
        tables,
        run,
    })
}

/// `σ` and projection comparisons on the visited points.
fn embedding_checks(game: &Game, run: &FixpointRun, x0: &Point, k: usize) -> Result<Vec<EmbeddingCheck>> {
    let ps = &game.space;
    let visited = FiniteSet::new(run.trace.points())?;
    let (a, _) = ps.split(x0)?;
    let q = ps.project(&visited, Axis::Second)?;
    let sigma_q = ps.sigma_embed(&a, &q)?;
    let px = ps.project(&visited, Axis::First)?;
    let mut out = Vec::new();
    let mut push = |map: &str, id: &str, before: f64, after: f64| {
        out.push(EmbeddingCheck {
            map: map.into(),
            seminorm: id.into(),
            k,
            alpha_before: before,
            alpha_after: after,
            strict: compare_measures(before, after, true),
            non_strict: compare_measures(before, after, false),
        });
    };
    for (idx, joint_p) in ps.joint.seminorms().iter().enumerate() {
        let (p, q_norm) = ps.factors(idx);
        let alpha_visited = alpha_k(&visited, joint_p, k).value;
        push("sigma", &joint_p.id, alpha_k(&q, q_norm, k).value, alpha_k(&sigma_q, joint_p, k).value);
        push("project-first", &joint_p.id, alpha_visited, alpha_k(&px, p, k).value);
        push("project-second", &joint_p.id, alpha_visited, alpha_k(&q, q_norm, k).value);
    }
    Ok(out)
}

/// Predicate tables for `Q, Q' ⊆ A × B`.
#[derive(Debug, Clone)]
pub struct SectionedSets {
    space: ProductSpace,
    grid_a: FiniteSet,
    grid_b: FiniteSet,
    q: Vec<Vec<bool>>,
    q_prime: Vec<Vec<bool>>,
}

impl SectionedSets {
    pub fn new(
        space_x: OrderedSpace,
        space_y: OrderedSpace,
        grid_a: Vec<Point>,
        grid_b: Vec<Point>,
        q: Vec<Vec<bool>>,
        q_prime: Vec<Vec<bool>>,
    ) -> Result<Self> {
        let grid_a = grid_set(&space_x, grid_a, "A")?;
        let grid_b = grid_set(&space_y, grid_b, "B")?;
        for (name, table) in [("Q", &q), ("Q'", &q_prime)] {
            if table.len() != grid_a.len() || table.iter().any(|r| r.len() != grid_b.len()) {
                return Err(Error::InvalidGame(format!(
                    "{name} table must be {}×{}",
                    grid_a.len(),
                    grid_b.len()
                )));
            }
        }
        Ok(SectionedSets {
            space: ProductSpace::new(space_x, space_y)?,
            grid_a,
            grid_b,
            q,
            q_prime,
        })
    }

    /// Tables from predicates on grid pairs.
    pub fn from_predicates(
        space_x: OrderedSpace,
        space_y: OrderedSpace,
        grid_a: Vec<Point>,
        grid_b: Vec<Point>,
        q: impl Fn(&Point, &Point) -> Result<bool>,
        q_prime: impl Fn(&Point, &Point) -> Result<bool>,
    ) -> Result<Self> {
        let table = |f: &dyn Fn(&Point, &Point) -> Result<bool>| {
            grid_a
                .iter()
                .map(|x| grid_b.iter().map(|y| f(x, y)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
        };
        let (tq, tq2) = (table(&q)?, table(&q_prime)?);
        SectionedSets::new(space_x, space_y, grid_a, grid_b, tq, tq2)
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn grid_a(&self) -> &FiniteSet {
        &self.grid_a
    }

    pub fn grid_b(&self) -> &FiniteSet {
        &self.grid_b
    }

    pub fn in_q(&self, i: usize, j: usize) -> bool {
        self.q[i][j]
    }

    pub fn in_q_prime(&self, i: usize, j: usize) -> bool {
        self.q_prime[i][j]
    }

    /// `N_y = {x : (x, y) in Q}` per column `j`.
    pub fn n_sets(&self) -> Vec<Vec<usize>> {
        (0..self.grid_b.len())
            .map(|j| (0..self.grid_a.len()).filter(|&i| self.q[i][j]).collect())
            .collect()
    }

    /// `M_x = {y : (x, y) in Q'}` per row `i`.
    pub fn m_sets(&self) -> Vec<Vec<usize>> {
        self.q_prime
            .iter()
            .map(|row| (0..row.len()).filter(|&j| row[j]).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionPoint {
    pub i: usize,
    pub j: usize,
    pub x: Point,
    pub y: Point,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionReport {
    /// A certified point of `Q ∩ Q'`, re-verified against both tables.
    pub point: Option<IntersectionPoint>,
    pub grid: (usize, usize),
    pub start: (usize, usize),
    pub hypothesis3_violations: Vec<OrderViolation>,
    #[serde(skip)]
    pub run: FixpointRun,
}

/// Runs the section iteration; every section must be nonempty.
pub fn intersect_sections(sets: &SectionedSets, opts: &SolverOptions) -> Result<IntersectionReport> {
    let n_sets = sets.n_sets();
    let m_sets = sets.m_sets();
    if let Some(j) = n_sets.iter().position(|s| s.is_empty()) {
        return Err(Error::EmptySection(format!(
            "N_y is empty for y = {:?}",
            sets.grid_b.points()[j]
        )));
    }
    if let Some(i) = m_sets.iter().position(|s| s.is_empty()) {
        return Err(Error::EmptySection(format!(
            "M_x is empty for x = {:?}",
            sets.grid_a.points()[i]
        )));
    }
    let sections = Sections {
        space: &sets.space,
        grid_a: &sets.grid_a,
        grid_b: &sets.grid_b,
        n_sets: &n_sets,
        m_sets: &m_sets,
    };
    let (s, t) = sections.maps();
    let hyp3 = sections.hypothesis3()?;
    let start = (lex_min(sets.grid_a.points()), lex_min(sets.grid_b.points()));
    let x0 = sets.grid_a.points()[start.0].concat(&sets.grid_b.points()[start.1]);
    let run = iterate_common(sets.space.joint(), &s, &t, &x0, opts)?;
    let point = if run.converged() {
        let lookup = GridLookup::new(&sets.space, &sets.grid_a, &sets.grid_b);
        let (i, j) = lookup.locate(&run.certificate.point)?;
        (sets.q[i][j] && sets.q_prime[i][j]).then(|| IntersectionPoint {
            i,
            j,
            x: sets.grid_a.points()[i].clone(),
            y: sets.grid_b.points()[j].clone(),
        })
    } else {
        None
    };
    Ok(IntersectionReport {
        point,
        grid: (sets.grid_a.len(), sets.grid_b.len()),
        start,
        hypothesis3_violations: hyp3,
        run,
    })
}
