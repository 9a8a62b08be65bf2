//! Multimaps and the set orders used to state isotonicity.
//!
//! Two orders on nonempty sets are provided:
//!
//! - the all-pairs order, `A <= B` iff `a <= b` for every `a in A`, `b in B`;
//! - the Dhage order, `A ⪯ B` iff every `a` has some `b >= a` and every `b`
//!   has some `a <= b`.
//!
//! The all-pairs order implies the Dhage order but not conversely. Checks that
//! quantify over a continuum domain are run on caller-supplied samples and the
//! results only speak for those samples.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noncompactness::{BoxSet, FiniteSet};
use crate::ordered_space::{ConeSpec, OrderInterval, OrderedSpace, Point, SeminormSpec, ORDER_EPS};

/// A value of a multimap: a finite point set or a finite union of boxes.
#[derive(Debug, Clone, PartialEq)]
pub enum SetValue {
    Finite(FiniteSet),
    Boxes(BoxSet),
}

impl SetValue {
    pub fn point(p: Point) -> Self {
        SetValue::Finite(FiniteSet::singleton(p))
    }

    pub fn dim(&self) -> usize {
        match self {
            SetValue::Finite(s) => s.dim(),
            SetValue::Boxes(b) => b.dim(),
        }
    }

    /// Finite stand-in: the set itself, or box vertices plus centroids.
    pub fn to_finite(&self) -> FiniteSet {
        match self {
            SetValue::Finite(s) => s.clone(),
            SetValue::Boxes(b) => b.discretize(),
        }
    }

    pub fn as_singleton(&self) -> Option<&Point> {
        match self {
            SetValue::Finite(s) if s.len() == 1 => Some(&s.points()[0]),
            _ => None,
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match self {
            SetValue::Finite(s) => s.contains(x),
            SetValue::Boxes(b) => b.contains(x),
        }
    }

    /// `min_{y in M} p(x - y)`.
    ///
    /// Exact for finite sets. For boxes the candidates are the coordinatewise
    /// projection of `x` and the vertices, which is exact for weighted-sup
    /// seminorms and zero whenever `x` lies in the union.
    pub fn distance(&self, x: &Point, p: &SeminormSpec) -> Result<f64> {
        let mut best = f64::INFINITY;
        for y in self.candidates(Some(x)).points() {
            best = best.min(p.dist(x, y)?);
        }
        Ok(best)
    }

    /// Points the iteration may select from. Boxes contribute the projection
    /// of `prev` (when given), their vertices and their centroid.
    pub fn candidates(&self, prev: Option<&Point>) -> FiniteSet {
        match self {
            SetValue::Finite(s) => s.clone(),
            SetValue::Boxes(b) => {
                let mut pts = Vec::new();
                for bx in b.boxes() {
                    if let Some(x) = prev {
                        if x.dim() == bx.lo.dim() {
                            pts.push(bx.clamp(x));
                        }
                    }
                    pts.extend(bx.vertices());
                    pts.push(bx.centroid());
                }
                FiniteSet::new(pts).expect("box candidates are nonempty")
            }
        }
    }
}

/// Where a multimap is defined (or, as a codomain, where its values must lie).
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Space,
    Interval(OrderInterval),
    Boxes(BoxSet),
    /// The positive cone `E⁺`.
    Cone(ConeSpec),
    Points(FiniteSet),
}

impl Domain {
    pub fn contains(&self, x: &Point) -> Result<bool> {
        match self {
            Domain::Space => Ok(true),
            Domain::Interval(iv) => iv.contains(x),
            Domain::Boxes(b) => Ok(b.contains(x)),
            Domain::Cone(c) => c.contains_within(x, ORDER_EPS),
            Domain::Points(s) => Ok(s.contains(x)),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Domain::Space => "space",
            Domain::Interval(_) => "interval",
            Domain::Boxes(_) => "boxes",
            Domain::Cone(_) => "cone",
            Domain::Points(_) => "points",
        }
    }
}

type Evaluator = dyn Fn(&Point) -> Result<SetValue> + Send + Sync;

/// A map `E -> 2^E` given by an evaluator. Evaluators must be pure.
#[derive(Clone)]
pub struct MultiMap {
    name: String,
    domain: Domain,
    codomain: Domain,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for MultiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiMap")
            .field("name", &self.name)
            .field("domain", &self.domain.label())
            .field("codomain", &self.codomain.label())
            .finish()
    }
}

impl MultiMap {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Point) -> Result<SetValue> + Send + Sync + 'static,
    {
        MultiMap {
            name: name.into(),
            domain: Domain::Space,
            codomain: Domain::Space,
            evaluator: Arc::new(f),
        }
    }

    /// A single-valued map viewed as a singleton-valued multimap.
    pub fn singleton<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    {
        Self::new(name, move |x| f(x).map(SetValue::point))
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_codomain(mut self, codomain: Domain) -> Self {
        self.codomain = codomain;
        self
    }

    /// Same map restricted to `domain` and required to land in `domain`.
    pub fn self_map_on(self, domain: Domain) -> Self {
        self.with_domain(domain.clone()).with_codomain(domain)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn eval(&self, x: &Point) -> Result<SetValue> {
        if !self.domain.contains(x)? {
            return Err(Error::OutsideDomain { map: self.name.clone() });
        }
        let value = (self.evaluator)(x).map_err(|e| match e {
            Error::Evaluation { .. } => e,
            other => Error::Evaluation {
                map: self.name.clone(),
                reason: other.to_string(),
            },
        })?;
        if !matches!(self.codomain, Domain::Space) {
            for y in value.to_finite().points() {
                if !self.codomain.contains(y)? {
                    return Err(Error::CodomainViolation { map: self.name.clone() });
                }
            }
        }
        Ok(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetRelation {
    /// Every element below every element.
    All,
    /// Every element below some element and every element above some element.
    Dhage,
}

impl SetRelation {
    pub fn holds(self, space: &OrderedSpace, a: &FiniteSet, b: &FiniteSet) -> Result<bool> {
        Ok(self.violation(space, a, b)?.is_none())
    }

    pub(crate) fn violation(self, space: &OrderedSpace, a: &FiniteSet, b: &FiniteSet) -> Result<Option<Witness>> {
        match self {
            SetRelation::All => Ok(all_pairs_violation(space, a, b)?.map(|(x, y)| Witness {
                lower: Some(x),
                upper: Some(y),
            })),
            SetRelation::Dhage => dhage_violation(space, a, b),
        }
    }
}

/// `A <= B` in the all-pairs sense.
pub fn set_leq_all(space: &OrderedSpace, a: &FiniteSet, b: &FiniteSet) -> Result<bool> {
    Ok(all_pairs_violation(space, a, b)?.is_none())
}

/// `A ⪯ B` in the Dhage sense.
pub fn set_leq_dhage(space: &OrderedSpace, a: &FiniteSet, b: &FiniteSet) -> Result<bool> {
    Ok(dhage_violation(space, a, b)?.is_none())
}

fn all_pairs_violation(space: &OrderedSpace, a: &FiniteSet, b: &FiniteSet) -> Result<Option<(Point, Point)>> {
    for x in a.points() {
        for y in b.points() {
            if !space.leq(x, y)? {
                return Ok(Some((x.clone(), y.clone())));
            }
        }
    }
    Ok(None)
}

fn dhage_violation(space: &OrderedSpace, a: &FiniteSet, b: &FiniteSet) -> Result<Option<Witness>> {
    for x in a.points() {
        if !any_of(b.points(), |y| space.leq(x, y))? {
            return Ok(Some(Witness { lower: Some(x.clone()), upper: None }));
        }
    }
    for y in b.points() {
        if !any_of(a.points(), |x| space.leq(x, y))? {
            return Ok(Some(Witness { lower: None, upper: Some(y.clone()) }));
        }
    }
    Ok(None)
}

fn any_of(points: &[Point], mut pred: impl FnMut(&Point) -> Result<bool>) -> Result<bool> {
    for p in points {
        if pred(p)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Which product-set order to use: `≪` (factorwise all-pairs) or `⋘`
/// (factorwise Dhage).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductOrderKind {
    Ll,
    Lll,
}

/// `A1 × B1` versus `A2 × B2` under the chosen product order.
pub fn product_order(
    space_x: &OrderedSpace,
    space_y: &OrderedSpace,
    first: (&FiniteSet, &FiniteSet),
    second: (&FiniteSet, &FiniteSet),
    kind: ProductOrderKind,
) -> Result<bool> {
    let rel = match kind {
        ProductOrderKind::Ll => SetRelation::All,
        ProductOrderKind::Lll => SetRelation::Dhage,
    };
    Ok(rel.holds(space_x, first.0, second.0)? && rel.holds(space_y, first.1, second.1)?)
}

/// The pair of elements that broke a set relation. For the all-pairs order
/// both sides are present (`lower` is not below `upper`); for the Dhage order
/// only the element lacking a partner is present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub lower: Option<Point>,
    pub upper: Option<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsotoneClause {
    /// `S(x)` against `T(y)` for `y in S(x)`.
    SThenT,
    /// `T(x)` against `S(y)` for `y in T(x)`.
    TThenS,
    /// `M(x)` against `M(y)` for a sampled pair `x <= y`.
    Pair,
    /// The minimizer's grid against a minimizer section `M_x'`.
    MinimizerSection,
    /// The maximizer's grid against a maximizer section `N_y'`.
    MaximizerSection,
}

/// A reproducible failure of an order condition at one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderViolation {
    pub sample: Point,
    /// The second point the failing condition involved (`y` above).
    pub via: Point,
    pub clause: IsotoneClause,
    pub direction: Direction,
    pub relation: SetRelation,
    pub witness: Witness,
}

/// Checks weak isotonicity of `(S, T)` on `samples`.
///
/// Increasing: `S(x) <= T(y)` for all `y in S(x)` and `T(x) <= S(y)` for all
/// `y in T(x)`. Decreasing reverses both comparisons. Returns every failing
/// (sample, `y`) combination in sample order.
pub fn weakly_isotone_check(
    space: &OrderedSpace,
    s: &MultiMap,
    t: &MultiMap,
    samples: &[Point],
    direction: Direction,
    relation: SetRelation,
) -> Result<Vec<OrderViolation>> {
    let mut out = Vec::new();
    for x in samples {
        for (first, second, clause) in [(s, t, IsotoneClause::SThenT), (t, s, IsotoneClause::TThenS)] {
            let fx = first.eval(x)?.to_finite();
            for y in fx.points() {
                let gy = second.eval(y)?.to_finite();
                let broken = match direction {
                    Direction::Increasing => relation.violation(space, &fx, &gy)?,
                    Direction::Decreasing => relation.violation(space, &gy, &fx)?,
                };
                if let Some(witness) = broken {
                    out.push(OrderViolation {
                        sample: x.clone(),
                        via: y.clone(),
                        clause,
                        direction,
                        relation,
                        witness,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// The direction under which `(S, T)` is weakly isotone on `samples`, if any.
/// Increasing is preferred when both hold.
pub fn detect_direction(
    space: &OrderedSpace,
    s: &MultiMap,
    t: &MultiMap,
    samples: &[Point],
    relation: SetRelation,
) -> Result<Option<Direction>> {
    for d in [Direction::Increasing, Direction::Decreasing] {
        if weakly_isotone_check(space, s, t, samples, d, relation)?.is_empty() {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Isotone nondecreasing (or nonincreasing) on samples: for every sampled pair
/// `x <= y` with `x != y`, `M(x) <= M(y)` (resp. `M(x) >= M(y)`) all-pairs.
pub fn isotone_check(
    space: &OrderedSpace,
    map: &MultiMap,
    samples: &[Point],
    direction: Direction,
) -> Result<Vec<OrderViolation>> {
    let images: Vec<FiniteSet> = samples
        .iter()
        .map(|x| map.eval(x).map(|v| v.to_finite()))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, x) in samples.iter().enumerate() {
        for (j, y) in samples.iter().enumerate() {
            if i == j || x.key() == y.key() || !space.leq(x, y)? {
                continue;
            }
            let broken = match direction {
                Direction::Increasing => all_pairs_violation(space, &images[i], &images[j])?,
                Direction::Decreasing => all_pairs_violation(space, &images[j], &images[i])?,
            };
            if let Some((lo, hi)) = broken {
                out.push(OrderViolation {
                    sample: x.clone(),
                    via: y.clone(),
                    clause: IsotoneClause::Pair,
                    direction,
                    relation: SetRelation::All,
                    witness: Witness { lower: Some(lo), upper: Some(hi) },
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceContinuity {
    pub index: usize,
    pub direction: Direction,
    /// Max-seminorm distance from the final term to the limit point.
    pub approach_gap: f64,
    /// Max-seminorm distance from `f` at the final term to `f` at the limit.
    pub image_gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub map: String,
    pub tol: f64,
    pub sequences: Vec<SequenceContinuity>,
    pub pass: bool,
}

/// Monotone continuity along the supplied monotone sequences converging to `x`:
/// `f(x_n) -> f(x)` is judged by the gap at the final term against `tol`.
pub fn monotone_continuous_check(
    space: &OrderedSpace,
    f: &MultiMap,
    x: &Point,
    sequences: &[Vec<Point>],
    tol: f64,
) -> Result<ContinuityReport> {
    let single = |p: &Point| -> Result<Point> {
        f.eval(p)?
            .as_singleton()
            .cloned()
            .ok_or_else(|| Error::NotSingleton { map: f.name().to_string() })
    };
    let fx = single(x)?;
    let mut results = Vec::with_capacity(sequences.len());
    for (index, seq) in sequences.iter().enumerate() {
        let direction = sequence_direction(space, seq)?.ok_or(Error::NonMonotoneSequence(index))?;
        let last = seq.last().expect("monotone sequences are nonempty");
        let approach_gap = space.max_dist(last, x)?;
        let image_gap = space.max_dist(&single(last)?, &fx)?;
        results.push(SequenceContinuity {
            index,
            direction,
            approach_gap,
            image_gap,
            pass: image_gap <= tol,
        });
    }
    Ok(ContinuityReport {
        map: f.name().to_string(),
        tol,
        pass: results.iter().all(|r| r.pass),
        sequences: results,
    })
}

/// `Some(direction)` if consecutive terms are all ordered the same way.
/// Constant sequences count as increasing.
fn sequence_direction(space: &OrderedSpace, seq: &[Point]) -> Result<Option<Direction>> {
    if seq.is_empty() {
        return Ok(None);
    }
    let mut up = true;
    let mut down = true;
    for w in seq.windows(2) {
        up &= space.leq(&w[0], &w[1])?;
        down &= space.leq(&w[1], &w[0])?;
    }
    Ok(if up {
        Some(Direction::Increasing)
    } else if down {
        Some(Direction::Decreasing)
    } else {
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> OrderedSpace {
        OrderedSpace::euclidean_orthant(1)
    }

    fn s(v: &[f64]) -> FiniteSet {
        FiniteSet::from_scalars(v).unwrap()
    }

    fn pts(v: &[f64]) -> Vec<Point> {
        v.iter().map(|x| Point::scalar(*x).unwrap()).collect()
    }

    #[test]
    fn all_pairs_examples() {
        let e = line();
        assert!(set_leq_all(&e, &s(&[0.0]), &s(&[1.0])).unwrap());
        assert!(!set_leq_all(&e, &s(&[0.0, 0.5]), &s(&[0.0, 1.0])).unwrap());
        assert!(set_leq_all(&e, &s(&[2.0]), &s(&[2.0])).unwrap());
    }

    #[test]
    fn dhage_examples() {
        let e = line();
        assert!(set_leq_dhage(&e, &s(&[0.0, 0.5]), &s(&[0.0, 1.0])).unwrap());
        let a = s(&[0.3, -1.0, 4.0]);
        assert!(set_leq_dhage(&e, &a, &a).unwrap());
        assert!(!set_leq_dhage(&e, &s(&[1.0]), &s(&[0.0])).unwrap());
    }

    #[test]
    fn product_order_examples() {
        let e = line();
        let (a1, b1) = (s(&[0.0, 0.25, 0.5]), s(&[0.0, 0.5, 1.0]));
        let (a2, b2) = (s(&[0.0, 0.5, 1.0]), s(&[0.0, 0.75, 1.5]));
        assert!(product_order(&e, &e, (&a1, &b1), (&a2, &b2), ProductOrderKind::Lll).unwrap());
        assert!(!product_order(&e, &e, (&a1, &b1), (&a2, &b2), ProductOrderKind::Ll).unwrap());
        for kind in [ProductOrderKind::Ll, ProductOrderKind::Lll] {
            let one = s(&[1.0]);
            assert!(product_order(&e, &e, (&one, &one), (&one, &one), kind).unwrap());
            assert!(!product_order(&e, &e, (&one, &one), (&s(&[0.0]), &s(&[0.0])), kind).unwrap());
        }
    }

    #[test]
    fn sqrt_pair_is_weakly_isotone() {
        let e = line();
        let sqrt = MultiMap::singleton("sqrt", |x| Point::scalar(x.coords()[0].sqrt()));
        let v = weakly_isotone_check(&e, &sqrt, &sqrt, &pts(&[0.25, 0.5, 0.9]), Direction::Increasing, SetRelation::All)
            .unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn shift_pair_violates_at_every_sample() {
        let e = line();
        let up = MultiMap::singleton("S", |x| Point::scalar(x.coords()[0] + 1.0));
        let down = MultiMap::singleton("T", |x| Point::scalar(x.coords()[0] - 1.0));
        let samples = pts(&[-2.0, 0.0, 3.5]);
        let v = weakly_isotone_check(&e, &up, &down, &samples, Direction::Increasing, SetRelation::All).unwrap();
        assert_eq!(v.len(), 3);
        assert!(v.iter().all(|o| o.clause == IsotoneClause::SThenT));
        // Reproduce the first failure from its witness.
        let w = &v[0].witness;
        assert!(!e.leq(w.lower.as_ref().unwrap(), w.upper.as_ref().unwrap()).unwrap());
        assert!(weakly_isotone_check(&e, &up, &down, &[], Direction::Increasing, SetRelation::All)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn direction_detection() {
        let e = line();
        let neg = MultiMap::singleton("neg", |x| Point::scalar(-x.coords()[0].abs() - 1.0));
        // From -1 the chain runs -1 -> -2 -> -3.
        let d = detect_direction(&e, &neg, &neg, &pts(&[-1.0]), SetRelation::All).unwrap();
        assert_eq!(d, Some(Direction::Decreasing));
    }

    #[test]
    fn isotone_pairs() {
        let e = line();
        let sq = MultiMap::singleton("sq", |x| Point::scalar(x.coords()[0] * x.coords()[0]));
        assert!(isotone_check(&e, &sq, &pts(&[0.0, 1.0, 2.0]), Direction::Increasing).unwrap().is_empty());
        assert_eq!(isotone_check(&e, &sq, &pts(&[-2.0, 1.0]), Direction::Increasing).unwrap().len(), 1);
    }

    #[test]
    fn continuity_examples() {
        let e = OrderedSpace::euclidean_orthant(2);
        let x = Point::new(vec![1.0, 1.0]).unwrap();
        let below: Vec<Point> = (1..=1000)
            .map(|n| x.sub(&Point::axis(2, 0, 1.0 / n as f64)).unwrap())
            .collect();
        let id = MultiMap::singleton("id", |p| Ok(p.clone()));
        assert!(monotone_continuous_check(&e, &id, &x, std::slice::from_ref(&below), 1e-2).unwrap().pass);

        let step = MultiMap::singleton("step", |p| {
            Point::new(vec![if p.coords()[0] < 1.0 { 0.0 } else { 1.0 }, 0.0])
        });
        let r = monotone_continuous_check(&e, &step, &x, std::slice::from_ref(&below), 1e-2).unwrap();
        assert!(!r.pass);
        assert_eq!(r.sequences[0].image_gap, 1.0);

        let c = MultiMap::singleton("c", |_| Point::new(vec![3.0, 4.0]));
        assert!(monotone_continuous_check(&e, &c, &x, &[below], 1e-12).unwrap().pass);

        let zigzag = vec![
            Point::new(vec![0.0, 0.0]).unwrap(),
            Point::new(vec![1.0, 0.0]).unwrap(),
            Point::new(vec![0.5, 0.0]).unwrap(),
        ];
        assert_eq!(
            monotone_continuous_check(&e, &id, &x, &[zigzag], 1e-2).unwrap_err(),
            Error::NonMonotoneSequence(0)
        );
    }

    #[test]
    fn domain_and_codomain_enforced() {
        let e = line();
        let unit = e.interval(Point::scalar(0.0).unwrap(), Point::scalar(1.0).unwrap()).unwrap();
        let m = MultiMap::singleton("dbl", |x| x.scale(2.0)).self_map_on(Domain::Interval(unit));
        assert!(m.eval(&Point::scalar(0.25).unwrap()).is_ok());
        assert!(matches!(m.eval(&Point::scalar(0.75).unwrap()), Err(Error::CodomainViolation { .. })));
        assert!(matches!(m.eval(&Point::scalar(1.5).unwrap()), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn box_value_distance() {
        let b = SetValue::Boxes(BoxSet::single(Point::scalar(0.0).unwrap(), Point::scalar(2.0).unwrap()).unwrap());
        let p = SeminormSpec::sup(1);
        assert_eq!(b.distance(&Point::scalar(1.0).unwrap(), &p).unwrap(), 0.0);
        assert_eq!(b.distance(&Point::scalar(3.5).unwrap(), &p).unwrap(), 1.5);
        let f = SetValue::Finite(s(&[1.0, 2.0]));
        assert_eq!(f.distance(&Point::scalar(0.0).unwrap(), &p).unwrap(), 1.0);
    }
}
