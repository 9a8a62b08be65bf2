//! Finite-dimensional ordered vector spaces.
//!
//! A space is `R^d` ordered by a closed pointed cone `K` (`x <= y` iff
//! `y - x` lies in `K`) and topologised by a finite, point-separating family
//! of seminorms. Two cone forms are supported: the nonnegative orthant and
//! polyhedral cones `{x : Gx >= 0}`. Every such cone is normal, so order
//! intervals are bounded; [`OrderedSpace::interval_bound`] returns an explicit
//! bound and [`OrderedSpace::sandwich_check`] is an empirical witness of the
//! sandwich property.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance applied to cone functional evaluations.
pub const ORDER_EPS: f64 = 1e-12;

/// Rank tolerance for pointedness and separation checks.
const RANK_EPS: f64 = 1e-10;

/// A point of `R^d` with finite coordinates.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Point(coords))
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Point::new(vec![value])
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    /// Unit vector `e_axis` scaled by `scale`.
    pub fn axis(dim: usize, axis: usize, scale: f64) -> Self {
        let mut coords = vec![0.0; dim];
        coords[axis] = scale;
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    pub fn sub(&self, other: &Point) -> Result<Point> {
        other.check_dim(self.dim())?;
        Point::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Result<Point> {
        other.check_dim(self.dim())?;
        Point::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, factor: f64) -> Result<Point> {
        Point::new(self.0.iter().map(|a| a * factor).collect())
    }

    /// Concatenation `(self, other)`, the product-space embedding.
    pub fn concat(&self, other: &Point) -> Point {
        let mut coords = self.0.clone();
        coords.extend_from_slice(&other.0);
        Point(coords)
    }

    /// Total lexicographic order on coordinates, used for deterministic tie breaks.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.dim().cmp(&other.dim())
    }

    /// Bit-level key for exact lookups (normalises `-0.0` to `0.0`).
    pub fn key(&self) -> Vec<u64> {
        self.0
            .iter()
            .map(|c| if *c == 0.0 { 0u64 } else { c.to_bits() })
            .collect()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// The positive cone of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConeSpec {
    /// `x_i >= 0` for every coordinate.
    Orthant,
    /// `Gx >= 0` componentwise, one row of `G` per linear functional.
    #[serde(alias = "polyhedral-inequalities")]
    Polyhedral { rows: Vec<Vec<f64>> },
}

impl ConeSpec {
    /// Cone membership with the default tolerance.
    pub fn contains(&self, x: &Point) -> Result<bool> {
        self.contains_within(x, ORDER_EPS)
    }

    pub fn contains_within(&self, x: &Point, eps: f64) -> Result<bool> {
        match self {
            ConeSpec::Orthant => Ok(x.coords().iter().all(|c| *c >= -eps)),
            ConeSpec::Polyhedral { rows } => {
                let mut inside = true;
                for row in rows {
                    x.check_dim(row.len())?;
                    if dot(row, x.coords()) < -eps {
                        inside = false;
                    }
                }
                Ok(inside)
            }
        }
    }

    /// Checks shape and pointedness (`K ∩ -K = {0}`) for a `dim`-dimensional space.
    ///
    /// For `Gx >= 0` the lineality space is `ker G`, so the cone is pointed
    /// exactly when `G` has full column rank.
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            ConeSpec::Orthant => Ok(()),
            ConeSpec::Polyhedral { rows } => {
                if rows.is_empty() {
                    return Err(Error::InvalidCone("no inequality rows".into()));
                }
                for row in rows {
                    if row.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: row.len(),
                        });
                    }
                    if row.iter().any(|v| !v.is_finite()) {
                        return Err(Error::InvalidCone("non-finite coefficient".into()));
                    }
                }
                if matrix_from_rows(rows, dim).rank(RANK_EPS) < dim {
                    return Err(Error::InvalidCone(
                        "cone is not pointed: inequality matrix lacks full column rank".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    fn matrix(&self, dim: usize) -> DMatrix<f64> {
        match self {
            ConeSpec::Orthant => DMatrix::identity(dim, dim),
            ConeSpec::Polyhedral { rows } => matrix_from_rows(rows, dim),
        }
    }
}

/// Parameters of one seminorm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SeminormKind {
    /// `p(x) = max_i w_i |x_i|`.
    WeightedSup { weights: Vec<f64> },
    /// `p(x) = max_j |<a_j, x>|`.
    FunctionalMax { rows: Vec<Vec<f64>> },
}

/// A seminorm with a stable identifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormSpec {
    pub id: String,
    #[serde(flatten)]
    pub kind: SeminormKind,
}

impl SeminormSpec {
    pub fn weighted_sup(id: impl Into<String>, weights: Vec<f64>) -> Self {
        SeminormSpec {
            id: id.into(),
            kind: SeminormKind::WeightedSup { weights },
        }
    }

    /// The plain sup-norm on `R^dim`.
    pub fn sup(dim: usize) -> Self {
        Self::weighted_sup("sup", vec![1.0; dim])
    }

    pub fn functional_max(id: impl Into<String>, rows: Vec<Vec<f64>>) -> Self {
        SeminormSpec {
            id: id.into(),
            kind: SeminormKind::FunctionalMax { rows },
        }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match &self.kind {
            SeminormKind::WeightedSup { weights } => weights
                .iter()
                .zip(x.coords())
                .fold(0.0, |m, (w, c)| f64::max(m, w * c.abs())),
            SeminormKind::FunctionalMax { rows } => rows
                .iter()
                .fold(0.0, |m, row| f64::max(m, dot(row, x.coords()).abs())),
        }
    }

    /// `p(x - y)`.
    pub fn dist(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok(self.eval(&x.sub(y)?))
    }

    /// Exact maximum of `p` over the axis-aligned box `[lo, hi]`.
    ///
    /// Both kinds are maxima of absolute values of linear forms, so the
    /// maximum is attained at a vertex and has a coordinatewise closed form.
    pub fn max_over_box(&self, lo: &[f64], hi: &[f64]) -> f64 {
        match &self.kind {
            SeminormKind::WeightedSup { weights } => weights
                .iter()
                .zip(lo.iter().zip(hi))
                .fold(0.0, |m, (w, (l, h))| f64::max(m, w * l.abs().max(h.abs()))),
            SeminormKind::FunctionalMax { rows } => rows.iter().fold(0.0, |m, row| {
                f64::max(m, max_abs_affine_over_box(0.0, row, lo, hi))
            }),
        }
    }

    /// Maximum of `p(offset + L u)` over `u` in the box `[ulo, uhi]`.
    fn max_over_affine_box(
        &self,
        offset: &[f64],
        linear: &DMatrix<f64>,
        ulo: &[f64],
        uhi: &[f64],
    ) -> f64 {
        let rows_of_l: Vec<Vec<f64>> = (0..linear.nrows())
            .map(|i| linear.row(i).iter().copied().collect())
            .collect();
        match &self.kind {
            SeminormKind::WeightedSup { weights } => {
                weights.iter().enumerate().fold(0.0, |m, (i, w)| {
                    f64::max(
                        m,
                        w * max_abs_affine_over_box(offset[i], &rows_of_l[i], ulo, uhi),
                    )
                })
            }
            SeminormKind::FunctionalMax { rows } => rows.iter().fold(0.0, |m, a| {
                let c = dot(a, offset);
                let r: Vec<f64> = (0..linear.ncols())
                    .map(|k| (0..linear.nrows()).map(|i| a[i] * linear[(i, k)]).sum())
                    .collect();
                f64::max(m, max_abs_affine_over_box(c, &r, ulo, uhi))
            }),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        let bad = |reason: &str| Error::InvalidSeminorm {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        match &self.kind {
            SeminormKind::WeightedSup { weights } => {
                if weights.len() != dim {
                    return Err(bad("weight vector length differs from dimension"));
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(bad("weights must be finite and nonnegative"));
                }
            }
            SeminormKind::FunctionalMax { rows } => {
                if rows.is_empty() {
                    return Err(bad("no functional rows"));
                }
                if rows.iter().any(|r| r.len() != dim) {
                    return Err(bad("functional row length differs from dimension"));
                }
                if rows.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(bad("non-finite coefficient"));
                }
            }
        }
        Ok(())
    }

    /// Rows spanning the orthogonal complement of the kernel of `p`.
    fn kernel_rows(&self, dim: usize) -> Vec<Vec<f64>> {
        match &self.kind {
            SeminormKind::WeightedSup { weights } => weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w > 0.0)
                .map(|(i, _)| Point::axis(dim, i, 1.0).into_coords())
                .collect(),
            SeminormKind::FunctionalMax { rows } => rows.clone(),
        }
    }
}

/// Wire form of [`OrderedSpace`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceRepr {
    pub dim: usize,
    #[serde(default = "default_cone")]
    pub cone: ConeSpec,
    #[serde(default)]
    pub seminorms: Vec<SeminormSpec>,
    #[serde(default = "default_eps")]
    pub order_eps: f64,
}

fn default_cone() -> ConeSpec {
    ConeSpec::Orthant
}

fn default_eps() -> f64 {
    ORDER_EPS
}

/// `R^d` with a pointed cone order and a separating seminorm family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct OrderedSpace {
    dim: usize,
    cone: ConeSpec,
    seminorms: Vec<SeminormSpec>,
    eps: f64,
    /// Left inverse of the cone matrix `G` (identity for the orthant).
    cone_left_inverse: DMatrix<f64>,
}

impl OrderedSpace {
    pub fn new(dim: usize, cone: ConeSpec, seminorms: Vec<SeminormSpec>) -> Result<Self> {
        Self::with_tolerance(dim, cone, seminorms, ORDER_EPS)
    }

    pub fn with_tolerance(
        dim: usize,
        cone: ConeSpec,
        seminorms: Vec<SeminormSpec>,
        eps: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be positive".into()));
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidSpace(
                "order tolerance must be finite and nonnegative".into(),
            ));
        }
        cone.validate(dim)?;
        if seminorms.is_empty() {
            return Err(Error::InvalidSpace("seminorm family is empty".into()));
        }
        let mut ids = BTreeSet::new();
        for p in &seminorms {
            p.validate(dim)?;
            if !ids.insert(p.id.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate seminorm id `{}`", p.id)));
            }
        }
        // Separation: the kernels of the family intersect only in 0.
        let stacked: Vec<Vec<f64>> = seminorms.iter().flat_map(|p| p.kernel_rows(dim)).collect();
        if stacked.is_empty() || matrix_from_rows(&stacked, dim).rank(RANK_EPS) < dim {
            return Err(Error::InvalidSpace(
                "seminorm family does not separate points".into(),
            ));
        }
        let g = cone.matrix(dim);
        let cone_left_inverse = match cone {
            ConeSpec::Orthant => g,
            ConeSpec::Polyhedral { .. } => g
                .pseudo_inverse(RANK_EPS)
                .map_err(|e| Error::InvalidCone(e.to_string()))?,
        };
        Ok(OrderedSpace {
            dim,
            cone,
            seminorms,
            eps,
            cone_left_inverse,
        })
    }

    /// `R^dim` with the orthant order and the sup-norm.
    pub fn euclidean_orthant(dim: usize) -> Self {
        Self::new(dim, ConeSpec::Orthant, vec![SeminormSpec::sup(dim)])
            .expect("orthant space with sup-norm is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn seminorms(&self) -> &[SeminormSpec] {
        &self.seminorms
    }

    pub fn seminorm(&self, id: &str) -> Option<&SeminormSpec> {
        self.seminorms.iter().find(|p| p.id == id)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn check_dim(&self, x: &Point) -> Result<()> {
        x.check_dim(self.dim)
    }

    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        let p = Point::new(coords)?;
        self.check_dim(&p)?;
        Ok(p)
    }

    pub fn cone_contains(&self, x: &Point) -> Result<bool> {
        self.check_dim(x)?;
        self.cone.contains_within(x, self.eps)
    }

    /// `x <= y` iff `y - x` lies in the cone.
    pub fn leq(&self, x: &Point, y: &Point) -> Result<bool> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        self.cone.contains_within(&y.sub(x)?, self.eps)
    }

    /// Maximum over the family of `p(x - y)`.
    pub fn max_dist(&self, x: &Point, y: &Point) -> Result<f64> {
        let d = x.sub(y)?;
        Ok(self.seminorms.iter().fold(0.0, |m, p| f64::max(m, p.eval(&d))))
    }

    /// The order interval `[lo, hi]`, flagged empty when `lo` is not below `hi`.
    pub fn interval(&self, lo: Point, hi: Point) -> Result<OrderInterval> {
        let empty = !self.leq(&lo, &hi)?;
        Ok(OrderInterval {
            lo,
            hi,
            cone: self.cone.clone(),
            eps: self.eps,
            empty,
        })
    }

    /// A finite `B` with `p(z) <= B` on the whole interval.
    ///
    /// For the orthant the interval is the box `[lo, hi]` and the bound is the
    /// exact maximum. For a polyhedral cone every `z` in the interval has
    /// `u = G(z - lo)` in the box `[0, G(hi - lo)]` and `z = lo + G⁺u`, so the
    /// maximum of `p(lo + G⁺u)` over that box is a valid (generally not tight)
    /// bound.
    pub fn interval_bound(&self, interval: &OrderInterval, p: &SeminormSpec) -> Result<f64> {
        if interval.is_empty() {
            return Err(Error::EmptyInterval);
        }
        self.check_dim(&interval.lo)?;
        self.check_dim(&interval.hi)?;
        p.validate(self.dim)?;
        match &self.cone {
            ConeSpec::Orthant => Ok(p.max_over_box(interval.lo.coords(), interval.hi.coords())),
            ConeSpec::Polyhedral { rows } => {
                let width = interval.hi.sub(&interval.lo)?;
                let uhi: Vec<f64> = rows
                    .iter()
                    .map(|r| dot(r, width.coords()).max(0.0))
                    .collect();
                let ulo = vec![0.0; rows.len()];
                Ok(p.max_over_affine_box(
                    interval.lo.coords(),
                    &self.cone_left_inverse,
                    &ulo,
                    &uhi,
                ))
            }
        }
    }

    /// Empirical witness of the sandwich property: `0 <= x_n <= y_n` and
    /// `p(y_n) -> 0` should force `p(x_n) -> 0`.
    ///
    /// A sequence counts as vanishing when the maximum of `p` over its second
    /// half is at most `SANDWICH_SHRINK` times the maximum over the whole
    /// sequence (or below `SANDWICH_FLOOR`).
    pub fn sandwich_check(&self, xs: &[Point], ys: &[Point], p: &SeminormSpec) -> SandwichReport {
        let mut violations = Vec::new();
        if xs.len() != ys.len() {
            violations.push(SandwichViolation {
                index: xs.len().min(ys.len()),
                reason: format!("length mismatch: {} vs {}", xs.len(), ys.len()),
            });
        }
        let n = xs.len().min(ys.len());
        let zero = Point::zeros(self.dim);
        for i in 0..n {
            let ok = matches!(self.leq(&zero, &xs[i]), Ok(true))
                && matches!(self.leq(&xs[i], &ys[i]), Ok(true));
            if !ok {
                violations.push(SandwichViolation {
                    index: i,
                    reason: "0 <= x <= y does not hold".into(),
                });
            }
        }
        let px: Vec<f64> = xs[..n].iter().map(|x| p.eval(x)).collect();
        let py: Vec<f64> = ys[..n].iter().map(|y| p.eval(y)).collect();
        let (x_head, x_tail) = head_tail_max(&px);
        let (y_head, y_tail) = head_tail_max(&py);
        let x_vanishing = vanishes(x_head, x_tail);
        let y_vanishing = vanishes(y_head, y_tail);
        SandwichReport {
            pass: violations.is_empty() && (!y_vanishing || x_vanishing),
            x_vanishing,
            y_vanishing,
            x_tail_max: x_tail,
            y_tail_max: y_tail,
            violations,
        }
    }
}

impl TryFrom<SpaceRepr> for OrderedSpace {
    type Error = Error;
    fn try_from(r: SpaceRepr) -> Result<Self> {
        let seminorms = if r.seminorms.is_empty() {
            vec![SeminormSpec::sup(r.dim)]
        } else {
            r.seminorms
        };
        OrderedSpace::with_tolerance(r.dim, r.cone, seminorms, r.order_eps)
    }
}

impl From<OrderedSpace> for SpaceRepr {
    fn from(s: OrderedSpace) -> SpaceRepr {
        SpaceRepr {
            dim: s.dim,
            cone: s.cone,
            seminorms: s.seminorms,
            order_eps: s.eps,
        }
    }
}

/// `[lo, hi] = {z : lo <= z <= hi}`; empty when `lo` is not below `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderInterval {
    lo: Point,
    hi: Point,
    cone: ConeSpec,
    eps: f64,
    empty: bool,
}

impl OrderInterval {
    pub fn lo(&self) -> &Point {
        &self.lo
    }

    pub fn hi(&self) -> &Point {
        &self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn contains(&self, z: &Point) -> Result<bool> {
        z.check_dim(self.lo.dim())?;
        if self.empty {
            return Ok(false);
        }
        Ok(self.cone.contains_within(&z.sub(&self.lo)?, self.eps)?
            && self.cone.contains_within(&self.hi.sub(z)?, self.eps)?)
    }
}

pub const SANDWICH_SHRINK: f64 = 0.1;
pub const SANDWICH_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichViolation {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub pass: bool,
    pub x_vanishing: bool,
    pub y_vanishing: bool,
    pub x_tail_max: f64,
    pub y_tail_max: f64,
    pub violations: Vec<SandwichViolation>,
}

fn head_tail_max(values: &[f64]) -> (f64, f64) {
    let all = values.iter().copied().fold(0.0, f64::max);
    let tail = values[values.len() / 2..].iter().copied().fold(0.0, f64::max);
    (all, tail)
}

fn vanishes(all: f64, tail: f64) -> bool {
    tail <= SANDWICH_FLOOR || tail <= SANDWICH_SHRINK * all
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max_{u in [lo, hi]} |c + <r, u>|`.
fn max_abs_affine_over_box(c: f64, r: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut top = c;
    let mut bottom = c;
    for ((ri, l), h) in r.iter().zip(lo).zip(hi) {
        let (a, b) = (ri * l, ri * h);
        top += a.max(b);
        bottom += a.min(b);
    }
    top.abs().max(bottom.abs())
}

fn matrix_from_rows(rows: &[Vec<f64>], dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn orthant_membership() {
        assert!(ConeSpec::Orthant.contains(&pt(&[1.0, 0.0, 2.0])).unwrap());
        assert!(!ConeSpec::Orthant.contains(&pt(&[1.0, -0.5])).unwrap());
    }

    #[test]
    fn polyhedral_membership() {
        let cone = ConeSpec::Polyhedral {
            rows: vec![vec![1.0, -1.0]],
        };
        assert!(cone.contains(&pt(&[2.0, 1.0])).unwrap());
        assert!(!cone.contains(&pt(&[1.0, 2.0])).unwrap());
        assert!(matches!(
            cone.contains(&pt(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_pointed_cone_rejected() {
        let cone = ConeSpec::Polyhedral {
            rows: vec![vec![1.0, -1.0]],
        };
        assert!(matches!(cone.validate(2), Err(Error::InvalidCone(_))));
        let ok = ConeSpec::Polyhedral {
            rows: vec![vec![1.0, -1.0], vec![0.0, 1.0]],
        };
        assert!(ok.validate(2).is_ok());
    }

    #[test]
    fn leq_examples() {
        let s = OrderedSpace::euclidean_orthant(2);
        assert!(s.leq(&pt(&[0.0, 0.0]), &pt(&[1.0, 2.0])).unwrap());
        assert!(!s.leq(&pt(&[1.0, 0.0]), &pt(&[0.0, 1.0])).unwrap());
        assert!(!s.leq(&pt(&[0.0, 1.0]), &pt(&[1.0, 0.0])).unwrap());
        let x = pt(&[0.3, -7.0]);
        assert!(s.leq(&x, &x).unwrap());
        assert!(s.leq(&x, &pt(&[1.0])).is_err());
    }

    #[test]
    fn interval_membership() {
        let s = OrderedSpace::euclidean_orthant(2);
        let iv = s.interval(pt(&[0.0, 0.0]), pt(&[1.0, 1.0])).unwrap();
        assert!(iv.contains(&pt(&[0.5, 0.5])).unwrap());
        assert!(!iv.contains(&pt(&[0.5, 1.5])).unwrap());
        let empty = s.interval(pt(&[1.0, 0.0]), pt(&[0.0, 1.0])).unwrap();
        assert!(empty.is_empty());
        assert!(!empty.contains(&pt(&[0.5, 0.5])).unwrap());
        assert!(!empty.contains(&pt(&[1.0, 0.0])).unwrap());
    }

    #[test]
    fn interval_bound_examples() {
        let s = OrderedSpace::euclidean_orthant(2);
        let unit = s.interval(pt(&[0.0, 0.0]), pt(&[1.0, 1.0])).unwrap();
        assert_eq!(s.interval_bound(&unit, &SeminormSpec::sup(2)).unwrap(), 1.0);

        let sym = s.interval(pt(&[-1.0, -1.0]), pt(&[1.0, 1.0])).unwrap();
        let sum = SeminormSpec::functional_max("sum", vec![vec![1.0, 1.0]]);
        assert_eq!(s.interval_bound(&sym, &sum).unwrap(), 2.0);

        let line = OrderedSpace::euclidean_orthant(1);
        let single = line.interval(pt(&[-3.5]), pt(&[-3.5])).unwrap();
        assert_eq!(
            line.interval_bound(&single, &SeminormSpec::sup(1)).unwrap(),
            3.5
        );

        let empty = s.interval(pt(&[1.0, 1.0]), pt(&[0.0, 0.0])).unwrap();
        assert_eq!(
            s.interval_bound(&empty, &SeminormSpec::sup(2)),
            Err(Error::EmptyInterval)
        );
    }

    #[test]
    fn polyhedral_identity_bound_matches_orthant() {
        let poly = OrderedSpace::new(
            2,
            ConeSpec::Polyhedral {
                rows: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            },
            vec![SeminormSpec::sup(2)],
        )
        .unwrap();
        let orth = OrderedSpace::euclidean_orthant(2);
        let (lo, hi) = (pt(&[-0.5, 0.25]), pt(&[2.0, 1.0]));
        let a = poly.interval(lo.clone(), hi.clone()).unwrap();
        let b = orth.interval(lo, hi).unwrap();
        let p = SeminormSpec::sup(2);
        assert!((poly.interval_bound(&a, &p).unwrap() - orth.interval_bound(&b, &p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sandwich_examples() {
        let s = OrderedSpace::euclidean_orthant(2);
        let p = SeminormSpec::sup(2);
        let seq = |c: f64| -> Vec<Point> {
            (1..=100).map(|n| Point::axis(2, 0, c / n as f64)).collect()
        };
        let r = s.sandwich_check(&seq(1.0), &seq(1.0), &p);
        assert!(r.pass && r.violations.is_empty());
        let r = s.sandwich_check(&seq(1.0), &seq(2.0), &p);
        assert!(r.pass && r.y_vanishing && r.x_vanishing);
        let r = s.sandwich_check(&seq(2.0), &seq(1.0), &p);
        assert!(!r.pass);
        assert_eq!(r.violations.len(), 100);
    }

    #[test]
    fn space_validation() {
        assert!(OrderedSpace::new(0, ConeSpec::Orthant, vec![SeminormSpec::sup(0)]).is_err());
        let partial = SeminormSpec::weighted_sup("w", vec![1.0, 0.0]);
        assert!(matches!(
            OrderedSpace::new(2, ConeSpec::Orthant, vec![partial.clone()]),
            Err(Error::InvalidSpace(_))
        ));
        let other = SeminormSpec::functional_max("f", vec![vec![0.0, 1.0]]);
        assert!(OrderedSpace::new(2, ConeSpec::Orthant, vec![partial, other]).is_ok());
        let dup = vec![SeminormSpec::sup(2), SeminormSpec::sup(2)];
        assert!(OrderedSpace::new(2, ConeSpec::Orthant, dup).is_err());
        assert!(matches!(
            OrderedSpace::new(2, ConeSpec::Orthant, vec![SeminormSpec::weighted_sup("n", vec![-1.0, 1.0])]),
            Err(Error::InvalidSeminorm { .. })
        ));
    }

    #[test]
    fn space_json_defaults() {
        let s: OrderedSpace = serde_json::from_str(r#"{"dim": 2}"#).unwrap();
        assert_eq!(s, OrderedSpace::euclidean_orthant(2));
        let s: OrderedSpace = serde_json::from_str(
            r#"{"dim": 2, "cone": {"kind": "polyhedral", "rows": [[1, -1], [0, 1]]},
                "seminorms": [{"id": "f", "kind": "functional-max", "rows": [[1, 0], [0, 1]]}]}"#,
        )
        .unwrap();
        assert!(s.leq(&pt(&[0.0, 0.0]), &pt(&[2.0, 1.0])).unwrap());
        let back: OrderedSpace = serde_json::from_value(serde_json::to_value(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<OrderedSpace>(r#"{"dim": 2, "cone": {"kind": "polyhedral", "rows": [[1, -1]]}}"#).is_err());
    }

    #[test]
    fn non_finite_point_rejected() {
        assert_eq!(Point::new(vec![0.0, f64::NAN]), Err(Error::NonFinite(1)));
    }
}
