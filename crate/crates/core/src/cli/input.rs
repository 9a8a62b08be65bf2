//! JSON input documents and their conversion into model objects.

use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fixpoint_engine::{DirectionMode, PreflightOptions, Selector, SolverOptions};
use crate::game_solver::{linspace, payoff_variables, eval_payoff, Game, GameOptions, SectionedSets};
use crate::noncompactness::{AxisBox, BoxSet, FiniteSet};
use crate::ordered_space::{OrderedSpace, Point};
use crate::payoff_expr::{bind_coordinates, coordinate_names, parse, Expr};
use crate::setmaps::{MultiMap, SetValue};

/// A point written either as a bare number (one dimension) or a coordinate list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PointRepr {
    Scalar(f64),
    Coords(Vec<f64>),
}

impl PointRepr {
    pub fn into_point(self) -> Result<Point> {
        match self {
            PointRepr::Scalar(v) => Point::scalar(v),
            PointRepr::Coords(c) => Point::new(c),
        }
    }
}

fn points(reprs: Vec<PointRepr>) -> Result<Vec<Point>> {
    reprs.into_iter().map(PointRepr::into_point).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum GridSpec {
    Linspace((f64, f64, usize)),
    Points(Vec<PointRepr>),
}

impl GridSpec {
    pub fn build(self) -> Result<Vec<Point>> {
        match self {
            GridSpec::Linspace((lo, hi, n)) => linspace(lo, hi, n),
            GridSpec::Points(p) => points(p),
        }
    }
}

fn grid_and_space(grid: GridSpec, space: Option<OrderedSpace>) -> Result<(Vec<Point>, OrderedSpace)> {
    let pts = grid.build()?;
    let dim = pts.first().map(Point::dim).ok_or(Error::EmptySet)?;
    let space = space.unwrap_or_else(|| OrderedSpace::euclidean_orthant(dim));
    Ok((pts, space))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PayoffSpec {
    Table(Vec<Vec<f64>>),
    Expr(String),
}

/// Solver options for games; unset fields keep the game defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameOptionsInput {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub selector: Option<Selector>,
    pub direction: Option<DirectionMode>,
    pub window: Option<usize>,
    pub preflight: Option<PreflightOptions>,
    pub tie_eps: Option<f64>,
    pub k: Option<usize>,
    pub max_samples: Option<usize>,
}

impl GameOptionsInput {
    pub fn resolve(&self) -> GameOptions {
        let mut o = GameOptions::default();
        let s = &mut o.solver;
        s.tol = self.tol.unwrap_or(s.tol);
        s.max_iter = self.max_iter.unwrap_or(s.max_iter);
        s.selector = self.selector.unwrap_or(s.selector);
        s.direction = self.direction.unwrap_or(s.direction);
        s.window = self.window.unwrap_or(s.window);
        if self.preflight.is_some() {
            s.preflight = self.preflight;
        }
        o.tie_eps = self.tie_eps.or(o.tie_eps);
        o.k = self.k.unwrap_or(o.k);
        o.max_samples = self.max_samples.unwrap_or(o.max_samples);
        o
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameInput {
    #[serde(rename = "A")]
    pub a: GridSpec,
    #[serde(rename = "B")]
    pub b: GridSpec,
    #[serde(rename = "X", default)]
    pub x: Option<OrderedSpace>,
    #[serde(rename = "Y", default)]
    pub y: Option<OrderedSpace>,
    pub payoff: PayoffSpec,
    /// Grid index pair; defaults to the lexicographically smallest pair.
    #[serde(default)]
    pub start: Option<(usize, usize)>,
    #[serde(default)]
    pub options: GameOptionsInput,
}

/// A game, its optional starting cell and the resolved options.
pub type GameSetup = (Game, Option<(usize, usize)>, GameOptions);

impl GameInput {
    pub fn build(self) -> Result<GameSetup> {
        let (a, x) = grid_and_space(self.a, self.x)?;
        let (b, y) = grid_and_space(self.b, self.y)?;
        let game = match self.payoff {
            PayoffSpec::Table(t) => Game::new(x, y, a, b, t)?,
            PayoffSpec::Expr(src) => Game::from_expr(x, y, a, b, &src)?,
        };
        Ok((game, self.start, self.options.resolve()))
    }
}

/// Membership predicate on grid pairs.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Predicate {
    Table(Vec<Vec<bool>>),
    /// `expr(x, y) >= 0`.
    Geq(String),
    /// `expr(x, y) > 0`.
    Gt(String),
}

impl Predicate {
    fn table(self, a: &[Point], b: &[Point], vars: &[String]) -> Result<Vec<Vec<bool>>> {
        let (src, strict) = match self {
            Predicate::Table(t) => return Ok(t),
            Predicate::Geq(s) => (s, false),
            Predicate::Gt(s) => (s, true),
        };
        let expr = parse(&src, vars)?;
        a.iter()
            .map(|x| {
                b.iter()
                    .map(|y| {
                        let v = eval_payoff(&expr, x, y)?;
                        Ok(if strict { v > 0.0 } else { v >= 0.0 })
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectInput {
    #[serde(rename = "A")]
    pub a: GridSpec,
    #[serde(rename = "B")]
    pub b: GridSpec,
    #[serde(rename = "X", default)]
    pub x: Option<OrderedSpace>,
    #[serde(rename = "Y", default)]
    pub y: Option<OrderedSpace>,
    #[serde(rename = "Q")]
    pub q: Predicate,
    #[serde(rename = "Q'", alias = "Q_prime")]
    pub q_prime: Predicate,
    #[serde(default)]
    pub options: SolverOptions,
}

impl IntersectInput {
    pub fn build(self) -> Result<(SectionedSets, SolverOptions)> {
        let (a, x) = grid_and_space(self.a, self.x)?;
        let (b, y) = grid_and_space(self.b, self.y)?;
        let vars = payoff_variables(x.dim(), y.dim());
        let q = self.q.table(&a, &b, &vars)?;
        let q2 = self.q_prime.table(&a, &b, &vars)?;
        Ok((SectionedSets::new(x, y, a, b, q, q2)?, self.options))
    }
}

/// One expression, or one per coordinate.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ExprList {
    One(String),
    Many(Vec<String>),
}

impl ExprList {
    fn compile(self, vars: &[String], dim: usize) -> Result<Vec<Expr>> {
        let srcs = match self {
            ExprList::One(s) => vec![s],
            ExprList::Many(v) => v,
        };
        if srcs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: srcs.len(),
            });
        }
        srcs.iter().map(|s| parse(s, vars).map_err(Error::from)).collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    /// Singleton-valued: one expression per output coordinate.
    Expr(ExprList),
    /// Finite set of expression tuples.
    Points(Vec<ExprList>),
    /// The box `[lo(x), hi(x)]`.
    Box { lo: ExprList, hi: ExprList },
}

fn eval_point(exprs: &[Expr], x: &Point) -> Result<Point> {
    let mut env = std::collections::HashMap::new();
    bind_coordinates(&mut env, "x", x.coords());
    let coords = exprs.iter().map(|e| e.eval(&env)).collect::<std::result::Result<Vec<_>, _>>()?;
    Point::new(coords)
}

impl MapSpec {
    pub fn build(self, name: &str, dim: usize) -> Result<MultiMap> {
        let vars = coordinate_names("x", dim);
        Ok(match self {
            MapSpec::Expr(list) => {
                let exprs = Arc::new(list.compile(&vars, dim)?);
                MultiMap::singleton(name, move |x: &Point| eval_point(&exprs, x))
            }
            MapSpec::Points(lists) => {
                if lists.is_empty() {
                    return Err(Error::EmptySet);
                }
                let tuples = lists
                    .into_iter()
                    .map(|l| l.compile(&vars, dim))
                    .collect::<Result<Vec<_>>>()?;
                MultiMap::new(name, move |x: &Point| {
                    let pts = tuples.iter().map(|t| eval_point(t, x)).collect::<Result<Vec<_>>>()?;
                    Ok(SetValue::Finite(FiniteSet::new(pts)?))
                })
            }
            MapSpec::Box { lo, hi } => {
                let lo = lo.compile(&vars, dim)?;
                let hi = hi.compile(&vars, dim)?;
                MultiMap::new(name, move |x: &Point| {
                    Ok(SetValue::Boxes(BoxSet::single(eval_point(&lo, x)?, eval_point(&hi, x)?)?))
                })
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultimapInput {
    pub space: OrderedSpace,
    #[serde(rename = "S")]
    pub s: MapSpec,
    /// Absent for single-map iteration.
    #[serde(rename = "T", default)]
    pub t: Option<MapSpec>,
    pub x0: PointRepr,
    #[serde(default)]
    pub options: SolverOptions,
    /// Extra sample points for the `check` subcommand.
    #[serde(default)]
    pub samples: Option<Vec<PointRepr>>,
}

pub struct MultimapProblem {
    pub space: OrderedSpace,
    pub s: MultiMap,
    pub t: Option<MultiMap>,
    pub x0: Point,
    pub options: SolverOptions,
    pub samples: Vec<Point>,
}

impl MultimapInput {
    pub fn build(self) -> Result<MultimapProblem> {
        let dim = self.space.dim();
        let x0 = self.x0.into_point()?;
        self.space.check_dim(&x0)?;
        self.options.validate()?;
        let s = self.s.build("S", dim)?;
        let t = self.t.map(|t| t.build("T", dim)).transpose()?;
        let mut samples = vec![x0.clone()];
        for p in points(self.samples.unwrap_or_default())? {
            self.space.check_dim(&p)?;
            samples.push(p);
        }
        Ok(MultimapProblem {
            space: self.space,
            s,
            t,
            x0,
            options: self.options,
            samples,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SetSpec {
    Points(Vec<PointRepr>),
    Boxes(Vec<AxisBox>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetInput {
    #[serde(default)]
    pub space: Option<OrderedSpace>,
    pub set: SetSpec,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub exact_threshold: Option<usize>,
}

pub enum SetProblemSet {
    Finite(FiniteSet),
    Boxes(BoxSet),
}

pub struct SetProblem {
    pub space: OrderedSpace,
    pub set: SetProblemSet,
    pub k: Option<usize>,
    pub exact_threshold: Option<usize>,
}

impl SetInput {
    pub fn build(self) -> Result<SetProblem> {
        let set = match self.set {
            SetSpec::Points(p) => SetProblemSet::Finite(FiniteSet::new(points(p)?)?),
            SetSpec::Boxes(b) => SetProblemSet::Boxes(BoxSet::new(b)?),
        };
        let dim = match &set {
            SetProblemSet::Finite(f) => f.dim(),
            SetProblemSet::Boxes(b) => b.dim(),
        };
        let space = self.space.unwrap_or_else(|| OrderedSpace::euclidean_orthant(dim));
        if space.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: dim,
            });
        }
        Ok(SetProblem {
            space,
            set,
            k: self.k,
            exact_threshold: self.exact_threshold,
        })
    }
}
