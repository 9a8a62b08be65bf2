//! Alternating common-fixed-point iteration.
//!
//! From `x_0` the engine builds `x_{2n+1} in S(x_{2n})` and
//! `x_{2n+2} in T(x_{2n+1})`, choosing one element of each image with a
//! deterministic [`Selector`]. Every step from `x_1` on is audited against
//! the chain `x_1 <= x_2 <= ...` (or its reverse). Convergence is declared
//! when the last `window` step sizes are below tolerance on a monotone trace;
//! the limit is then certified by its residuals against both images.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noncompactness::{
    alpha_k, compare_measures, image_of, CondensingOutcome, FiniteSet, MeasureValue,
};
use crate::ordered_space::{OrderedSpace, Point, SeminormSpec};
use crate::setmaps::{Direction, MultiMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    /// A cone-minimal candidate; ties broken lexicographically.
    #[default]
    OrderMinimal,
    /// The candidate closest to the previous iterate (max over seminorms).
    NearestPrevious,
    /// The first candidate in image order.
    First,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionMode {
    Increasing,
    Decreasing,
    /// Fixed by the first strictly ordered pair of consecutive iterates.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreflightOptions {
    pub k: usize,
    pub rounds: usize,
    pub cap: usize,
}

impl Default for PreflightOptions {
    fn default() -> Self {
        PreflightOptions {
            k: crate::noncompactness::DEFAULT_BUDGET,
            rounds: 3,
            cap: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub selector: Selector,
    pub direction: DirectionMode,
    pub window: usize,
    pub preflight: Option<PreflightOptions>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_iter: 1000,
            selector: Selector::default(),
            direction: DirectionMode::default(),
            window: 5,
            preflight: None,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidOptions("tol must be positive and finite".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidOptions("max_iter must be at least 1".into()));
        }
        if self.window == 0 {
            return Err(Error::InvalidOptions("window must be at least 1".into()));
        }
        if let Some(p) = &self.preflight {
            if p.k == 0 {
                return Err(Error::InvalidOptions("preflight budget k must be at least 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub index: usize,
    /// Name of the map that produced this step (`x0` for the start).
    pub map: String,
    pub candidates: Vec<Point>,
    pub selected: Point,
    /// `None` where the chain places no requirement (steps 0 and 1).
    pub order_ok: Option<bool>,
    /// `p(x_i - x_{i-1})` per seminorm; empty at step 0.
    pub step_size: MeasureValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminalStatus {
    /// `x_0` was already a common fixed point.
    AlreadyFixed,
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
    pub status: TerminalStatus,
    /// The chain direction the audit settled on, if any.
    pub direction: Option<Direction>,
}

impl IterationTrace {
    pub fn points(&self) -> Vec<Point> {
        self.steps.iter().map(|s| s.selected.clone()).collect()
    }

    pub fn last_point(&self) -> &Point {
        &self.steps.last().expect("trace has a start step").selected
    }

    /// Number of map applications performed.
    pub fn iterations(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn is_monotone(&self) -> bool {
        self.steps.iter().all(|s| s.order_ok != Some(false))
    }

    /// Indices of steps whose order audit failed.
    pub fn audit_failures(&self) -> Vec<usize> {
        self.steps
            .iter()
            .filter(|s| s.order_ok == Some(false))
            .map(|s| s.index)
            .collect()
    }

    /// Step `2n+1` came from `s_name`, step `2n+2` from `t_name`, indices
    /// contiguous from 0.
    pub fn alternates(&self, s_name: &str, t_name: &str) -> bool {
        self.steps.iter().enumerate().all(|(i, step)| {
            step.index == i
                && match i {
                    0 => true,
                    i if i % 2 == 1 => step.map == s_name,
                    _ => step.map == t_name,
                }
        })
    }

    /// Every selected point is an exact member of its recorded candidates.
    pub fn selections_are_members(&self) -> bool {
        self.steps.iter().all(|s| {
            let key = s.selected.key();
            s.candidates.iter().any(|c| c.key() == key)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixpointCertificate {
    pub point: Point,
    pub residual_s: MeasureValue,
    pub residual_t: MeasureValue,
    pub iterations: usize,
    pub monotone: bool,
    pub tol: f64,
    pub accepted: bool,
}

impl FixpointCertificate {
    fn new(point: Point, residual_s: MeasureValue, residual_t: MeasureValue, trace: &IterationTrace, tol: f64) -> Self {
        let accepted = residual_s.all_within(tol) && residual_t.all_within(tol);
        FixpointCertificate {
            point,
            residual_s,
            residual_t,
            iterations: trace.iterations(),
            monotone: trace.is_monotone(),
            tol,
            accepted,
        }
    }
}

/// Trace plus the certificate evaluated at the final iterate. The run
/// succeeded iff `certificate.accepted`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixpointRun {
    pub trace: IterationTrace,
    pub certificate: FixpointCertificate,
    pub preflight: Option<Vec<PreflightReport>>,
}

impl FixpointRun {
    pub fn converged(&self) -> bool {
        self.certificate.accepted
    }
}

/// Per-seminorm `min_{y in M(x)} p(x - y)`.
pub fn residual(space: &OrderedSpace, x: &Point, map: &MultiMap) -> Result<MeasureValue> {
    space.check_dim(x)?;
    let value = map.eval(x)?;
    let mut out = MeasureValue::default();
    for p in space.seminorms() {
        out.insert(p.id.clone(), value.distance(x, p)?);
    }
    Ok(out)
}

/// Windowed Cauchy test on a monotone trace.
pub fn detect_convergence(trace: &IterationTrace, space: &OrderedSpace, tol: f64, window: usize) -> Result<bool> {
    let available = trace.iterations();
    if window == 0 || window > available {
        return Err(Error::WindowTooLarge { window, available });
    }
    Ok(trace.is_monotone() && tail_within(&trace.steps, space, tol, window))
}

/// The last `window` step sizes are all at most `tol` in every seminorm.
fn tail_within(steps: &[TraceStep], space: &OrderedSpace, tol: f64, window: usize) -> bool {
    let n = steps.len();
    n > window
        && steps[n - window..].iter().all(|s| {
            space
                .seminorms()
                .iter()
                .all(|p| s.step_size.get(&p.id).is_some_and(|v| v <= tol))
        })
}

/// Shared per-step bookkeeping: selection, order audit, step sizes.
struct Stepper<'a> {
    space: &'a OrderedSpace,
    opts: &'a SolverOptions,
    resolved: Option<Direction>,
    trace: Vec<TraceStep>,
}

impl<'a> Stepper<'a> {
    fn start(space: &'a OrderedSpace, opts: &'a SolverOptions, x0: &Point) -> Self {
        let resolved = match opts.direction {
            DirectionMode::Increasing => Some(Direction::Increasing),
            DirectionMode::Decreasing => Some(Direction::Decreasing),
            DirectionMode::Auto => None,
        };
        Stepper {
            space,
            opts,
            resolved,
            trace: vec![TraceStep {
                index: 0,
                map: "x0".into(),
                candidates: vec![x0.clone()],
                selected: x0.clone(),
                order_ok: None,
                step_size: MeasureValue::default(),
            }],
        }
    }

    fn prev(&self) -> &Point {
        &self.trace.last().expect("nonempty trace").selected
    }

    fn step(&mut self, map: &MultiMap) -> Result<()> {
        let prev = self.prev().clone();
        let value = map.eval(&prev)?;
        let candidates = value.candidates(Some(&prev));
        let selected = select(self.space, &candidates, &prev, self.opts.selector)?;
        let index = self.trace.len();
        let order_ok = if index >= 2 { Some(self.audit(&prev, &selected)?) } else { None };
        let mut step_size = MeasureValue::default();
        for p in self.space.seminorms() {
            step_size.insert(p.id.clone(), p.dist(&selected, &prev)?);
        }
        self.trace.push(TraceStep {
            index,
            map: map.name().to_string(),
            candidates: candidates.into_points(),
            selected,
            order_ok,
            step_size,
        });
        Ok(())
    }

    fn audit(&mut self, prev: &Point, next: &Point) -> Result<bool> {
        let up = self.space.leq(prev, next)?;
        let down = self.space.leq(next, prev)?;
        Ok(match self.resolved {
            Some(Direction::Increasing) => up,
            Some(Direction::Decreasing) => down,
            None => {
                if up && !down {
                    self.resolved = Some(Direction::Increasing);
                } else if down && !up {
                    self.resolved = Some(Direction::Decreasing);
                }
                up || down
            }
        })
    }

    fn snapshot(&self, status: TerminalStatus) -> IterationTrace {
        IterationTrace {
            steps: self.trace.clone(),
            status,
            direction: self.resolved,
        }
    }

    fn is_monotone(&self) -> bool {
        self.trace.iter().all(|s| s.order_ok != Some(false))
    }

    /// Cauchy criterion; tightened by 10x once the chain has broken.
    fn settled(&self) -> bool {
        let tol = if self.is_monotone() { self.opts.tol } else { 0.1 * self.opts.tol };
        tail_within(&self.trace, self.space, tol, self.opts.window)
    }
}

fn certify(
    space: &OrderedSpace,
    s: &MultiMap,
    t: &MultiMap,
    trace: IterationTrace,
    tol: f64,
) -> Result<(IterationTrace, FixpointCertificate)> {
    let x = trace.last_point().clone();
    let rs = residual(space, &x, s)?;
    let rt = residual(space, &x, t)?;
    let cert = FixpointCertificate::new(x, rs, rt, &trace, tol);
    Ok((trace, cert))
}

/// Runs the alternating iteration for the pair `(S, T)` from `x0`.
pub fn iterate_common(
    space: &OrderedSpace,
    s: &MultiMap,
    t: &MultiMap,
    x0: &Point,
    opts: &SolverOptions,
) -> Result<FixpointRun> {
    opts.validate()?;
    space.check_dim(x0)?;
    let mut stepper = Stepper::start(space, opts, x0);
    let preflight = run_preflight(space, s, t, x0, opts)?;

    let (trace, cert) = certify(space, s, t, stepper.snapshot(TerminalStatus::AlreadyFixed), opts.tol)?;
    if cert.accepted {
        return Ok(FixpointRun { trace, certificate: cert, preflight });
    }

    for i in 1..=opts.max_iter {
        let map = if i % 2 == 1 { s } else { t };
        stepper.step(map)?;
        if stepper.settled() {
            let (trace, cert) = certify(space, s, t, stepper.snapshot(TerminalStatus::Converged), opts.tol)?;
            if cert.accepted {
                return Ok(FixpointRun { trace, certificate: cert, preflight });
            }
        }
    }
    let (trace, cert) = certify(space, s, t, stepper.snapshot(TerminalStatus::MaxIterations), opts.tol)?;
    Ok(FixpointRun { trace, certificate: cert, preflight })
}

/// Single-map iteration `x_{n+1} in T(x_n)`; for `S = T` this is the same
/// sequence as [`iterate_common`].
pub fn iterate_single(space: &OrderedSpace, map: &MultiMap, x0: &Point, opts: &SolverOptions) -> Result<FixpointRun> {
    opts.validate()?;
    space.check_dim(x0)?;
    let mut stepper = Stepper::start(space, opts, x0);
    let preflight = run_preflight(space, map, map, x0, opts)?;
    let finish = |stepper: &Stepper, status| -> Result<FixpointRun> {
        let trace = stepper.snapshot(status);
        let x = trace.last_point().clone();
        let r = residual(space, &x, map)?;
        let certificate = FixpointCertificate::new(x, r.clone(), r, &trace, opts.tol);
        Ok(FixpointRun { trace, certificate, preflight: preflight.clone() })
    };
    let run = finish(&stepper, TerminalStatus::AlreadyFixed)?;
    if run.converged() {
        return Ok(run);
    }
    for _ in 0..opts.max_iter {
        stepper.step(map)?;
        if stepper.settled() {
            let run = finish(&stepper, TerminalStatus::Converged)?;
            if run.converged() {
                return Ok(run);
            }
        }
    }
    finish(&stepper, TerminalStatus::MaxIterations)
}

fn run_preflight(
    space: &OrderedSpace,
    s: &MultiMap,
    t: &MultiMap,
    x0: &Point,
    opts: &SolverOptions,
) -> Result<Option<Vec<PreflightReport>>> {
    let Some(pf) = opts.preflight else {
        return Ok(None);
    };
    let seed = FiniteSet::singleton(x0.clone());
    space
        .seminorms()
        .iter()
        .map(|p| condensing_preflight(s, t, &seed, pf.k, p, pf.rounds, pf.cap))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Deterministic choice of one candidate.
pub fn select(space: &OrderedSpace, candidates: &FiniteSet, prev: &Point, selector: Selector) -> Result<Point> {
    let pts = candidates.points();
    match selector {
        Selector::First => Ok(pts[0].clone()),
        Selector::NearestPrevious => {
            let mut best: Option<(f64, &Point)> = None;
            for c in pts {
                let d = space.max_dist(c, prev)?;
                best = match best {
                    None => Some((d, c)),
                    Some((bd, bc)) => {
                        if d < bd || (d == bd && c.lex_cmp(bc).is_lt()) {
                            Some((d, c))
                        } else {
                            Some((bd, bc))
                        }
                    }
                };
            }
            Ok(best.expect("candidate sets are nonempty").1.clone())
        }
        Selector::OrderMinimal => {
            let mut minimal: Vec<&Point> = Vec::new();
            for c in pts {
                let mut dominated = false;
                for d in pts {
                    if d.key() != c.key() && space.leq(d, c)? && !space.leq(c, d)? {
                        dominated = true;
                        break;
                    }
                }
                if !dominated {
                    minimal.push(c);
                }
            }
            Ok(minimal
                .into_iter()
                .min_by(|a, b| a.lex_cmp(b))
                .expect("a finite set has a minimal element")
                .clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreflightRound {
    pub round: usize,
    pub size: usize,
    pub alpha_set: f64,
    pub alpha_s: f64,
    pub alpha_t: f64,
    pub outcome: CondensingOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreflightReport {
    pub seminorm: String,
    pub k: usize,
    pub rounds: Vec<PreflightRound>,
    pub outcome: CondensingOutcome,
    /// Always true: images are point-sampled and only finitely many rounds run.
    pub heuristic: bool,
}

/// Grows `A <- {a} ∪ S(A) ∪ T(A)` from `seed` (with `a` its first point) and
/// checks `max(alpha_k(S(A)), alpha_k(T(A))) < alpha_k(A)` at every round
/// where `alpha_k(A) > 0`. Passes when every such round decreases strictly;
/// vacuous when no round has positive measure.
pub fn condensing_preflight(
    s: &MultiMap,
    t: &MultiMap,
    seed: &FiniteSet,
    k: usize,
    p: &SeminormSpec,
    rounds: usize,
    cap: usize,
) -> Result<PreflightReport> {
    let anchor = seed.points()[0].clone();
    let mut set = seed.clone();
    let mut out = Vec::with_capacity(rounds + 1);
    for round in 0..=rounds {
        let sa = image_of(s, &set)?;
        let ta = image_of(t, &set)?;
        let alpha_set = alpha_k(&set, p, k).value;
        let alpha_s = alpha_k(&sa, p, k).value;
        let alpha_t = alpha_k(&ta, p, k).value;
        out.push(PreflightRound {
            round,
            size: set.len(),
            alpha_set,
            alpha_s,
            alpha_t,
            outcome: compare_measures(alpha_set, alpha_s.max(alpha_t), true),
        });
        if round == rounds {
            break;
        }
        set = FiniteSet::singleton(anchor.clone()).union(&sa)?.union(&ta)?;
        if set.len() > cap {
            return Err(Error::ImageExplosion { cap });
        }
    }
    let outcome = if out.iter().any(|r| r.outcome == CondensingOutcome::Fail) {
        CondensingOutcome::Fail
    } else if out.iter().any(|r| r.outcome == CondensingOutcome::Pass) {
        CondensingOutcome::Pass
    } else {
        CondensingOutcome::Vacuous
    };
    Ok(PreflightReport {
        seminorm: p.id.clone(),
        k,
        rounds: out,
        outcome,
        heuristic: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setmaps::{Domain, SetValue};
    use crate::noncompactness::BoxSet;

    fn line() -> OrderedSpace {
        OrderedSpace::euclidean_orthant(1)
    }

    fn x(v: f64) -> Point {
        Point::scalar(v).unwrap()
    }

    fn sqrt_map() -> MultiMap {
        MultiMap::singleton("sqrt", |p| Point::scalar(p.coords()[0].sqrt()))
    }

    #[test]
    fn sqrt_iteration_converges_to_one() {
        let e = line();
        let opts = SolverOptions::default();
        let run = iterate_common(&e, &sqrt_map(), &sqrt_map(), &x(0.25), &opts).unwrap();
        assert!(run.converged());
        assert_eq!(run.trace.status, TerminalStatus::Converged);
        assert!((run.certificate.point.coords()[0] - 1.0).abs() <= 1e-6);
        assert!(run.certificate.monotone);
        assert_eq!(run.trace.direction, Some(Direction::Increasing));
        assert!(run.trace.iterations() <= 100);
        assert!(run.trace.alternates("sqrt", "sqrt"));
        assert!(run.trace.selections_are_members());
        assert!(detect_convergence(&run.trace, &e, 1e-8, 5).unwrap());
    }

    #[test]
    fn identity_is_fixed_immediately() {
        let e = line();
        let id = MultiMap::singleton("id", |p| Ok(p.clone()));
        let run = iterate_common(&e, &id, &id, &x(0.7), &SolverOptions::default()).unwrap();
        assert_eq!(run.trace.status, TerminalStatus::AlreadyFixed);
        assert_eq!(run.trace.iterations(), 0);
        assert_eq!(run.certificate.point, x(0.7));
        assert_eq!(run.certificate.residual_s.max(), 0.0);
    }

    #[test]
    fn affine_pair_common_fixed_point() {
        let e = line();
        let s = MultiMap::singleton("S", |p| Point::scalar((p.coords()[0] + 1.0) / 2.0));
        let t = MultiMap::singleton("T", |p| Point::scalar((p.coords()[0] + 3.0) / 4.0));
        let run = iterate_common(&e, &s, &t, &x(0.0), &SolverOptions::default()).unwrap();
        assert!(run.converged());
        assert!((run.certificate.point.coords()[0] - 1.0).abs() < 1e-7);
        assert!(run.certificate.monotone);
        assert!(run.trace.alternates("S", "T"));
    }

    #[test]
    fn residual_examples() {
        let e = line();
        let id = MultiMap::singleton("id", |p| Ok(p.clone()));
        assert_eq!(residual(&e, &x(3.0), &id).unwrap().max(), 0.0);
        let two = MultiMap::new("two", |_| Ok(SetValue::Finite(FiniteSet::from_scalars(&[1.0, 2.0])?)));
        assert_eq!(residual(&e, &x(0.0), &two).unwrap().get("sup"), Some(1.0));
        let bx = MultiMap::new("box", |_| Ok(SetValue::Boxes(BoxSet::single(Point::scalar(0.0)?, Point::scalar(2.0)?)?)));
        assert_eq!(residual(&e, &x(1.0), &bx).unwrap().get("sup"), Some(0.0));
    }

    #[test]
    fn convergence_detection_examples() {
        let e = line();
        let id = MultiMap::singleton("id", |p| Ok(p.clone()));
        let opts = SolverOptions { max_iter: 6, ..SolverOptions::default() };
        // Force a constant trace by starting the stepper directly.
        let mut st = Stepper::start(&e, &opts, &x(2.0));
        for _ in 0..6 {
            st.step(&id).unwrap();
        }
        let trace = st.snapshot(TerminalStatus::MaxIterations);
        assert!(detect_convergence(&trace, &e, 1e-12, 5).unwrap());
        assert!(matches!(detect_convergence(&trace, &e, 1e-12, 7), Err(Error::WindowTooLarge { .. })));

        let flip = MultiMap::singleton("flip", |p| Point::scalar(1.0 - p.coords()[0]));
        let mut st = Stepper::start(&e, &opts, &x(0.0));
        for _ in 0..6 {
            st.step(&flip).unwrap();
        }
        let trace = st.snapshot(TerminalStatus::MaxIterations);
        assert!(!detect_convergence(&trace, &e, 1e-8, 4).unwrap());
        assert!(!trace.is_monotone());
    }

    #[test]
    fn two_cycle_hits_max_iterations() {
        let e = line();
        let flip = MultiMap::singleton("flip", |p| Point::scalar(1.0 - p.coords()[0]));
        let opts = SolverOptions { max_iter: 40, ..SolverOptions::default() };
        let run = iterate_common(&e, &flip, &flip, &x(0.0), &opts).unwrap();
        assert!(!run.converged());
        assert_eq!(run.trace.status, TerminalStatus::MaxIterations);
        assert_eq!(run.trace.iterations(), 40);
        assert!(!run.certificate.monotone);
    }

    #[test]
    fn order_minimal_selection_on_sets() {
        let e = OrderedSpace::euclidean_orthant(2);
        let cands = FiniteSet::new(vec![
            Point::new(vec![1.0, 1.0]).unwrap(),
            Point::new(vec![0.0, 2.0]).unwrap(),
            Point::new(vec![2.0, 0.0]).unwrap(),
            Point::new(vec![3.0, 3.0]).unwrap(),
        ])
        .unwrap();
        let prev = Point::new(vec![3.0, 3.0]).unwrap();
        assert_eq!(select(&e, &cands, &prev, Selector::OrderMinimal).unwrap().coords(), &[0.0, 2.0]);
        assert_eq!(select(&e, &cands, &prev, Selector::NearestPrevious).unwrap().coords(), &[3.0, 3.0]);
        assert_eq!(select(&e, &cands, &prev, Selector::First).unwrap().coords(), &[1.0, 1.0]);
    }

    #[test]
    fn box_valued_iteration_reaches_fixed_point() {
        // T(x) = [x/2, x/2 + 1] on [0, 4]: fixed points are x in [0, 2].
        let e = line();
        let t = MultiMap::new("T", |p| {
            let c = p.coords()[0] / 2.0;
            Ok(SetValue::Boxes(BoxSet::single(Point::scalar(c)?, Point::scalar(c + 1.0)?)?))
        });
        let opts = SolverOptions { selector: Selector::NearestPrevious, ..SolverOptions::default() };
        let run = iterate_common(&e, &t, &t, &x(4.0), &opts).unwrap();
        assert!(run.converged());
        let v = run.certificate.point.coords()[0];
        assert!((0.0..=2.0 + 1e-9).contains(&v));
    }

    #[test]
    fn preflight_examples() {
        let half = MultiMap::singleton("half", |p| p.scale(0.5));
        let third = MultiMap::singleton("third", |p| p.scale(1.0 / 3.0));
        let seed = FiniteSet::from_scalars(&[0.0, 8.0]).unwrap();
        let p = SeminormSpec::sup(1);
        for k in 1..=3 {
            let r = condensing_preflight(&half, &third, &seed, k, &p, 3, 4096).unwrap();
            assert_eq!(r.outcome, CondensingOutcome::Pass, "k = {k}");
        }
        let id = MultiMap::singleton("id", |p| Ok(p.clone()));
        let r = condensing_preflight(&id, &id, &seed, 1, &p, 3, 4096).unwrap();
        assert_eq!(r.outcome, CondensingOutcome::Fail);
        let lone = FiniteSet::from_scalars(&[5.0]).unwrap();
        let r = condensing_preflight(&id, &id, &lone, 1, &p, 3, 4096).unwrap();
        assert_eq!(r.outcome, CondensingOutcome::Vacuous);
        let split = MultiMap::new("split", |p| {
            let v = p.coords()[0];
            Ok(SetValue::Finite(FiniteSet::from_scalars(&[v + 1.0, v + 2.0])?))
        });
        assert_eq!(
            condensing_preflight(&split, &split, &lone, 1, &p, 10, 5).unwrap_err(),
            Error::ImageExplosion { cap: 5 }
        );
    }

    #[test]
    fn domain_modes_do_not_change_iteration() {
        let e = line();
        let unit = e.interval(x(0.0), x(1.0)).unwrap();
        let opts = SolverOptions::default();
        let free = iterate_common(&e, &sqrt_map(), &sqrt_map(), &x(0.25), &opts).unwrap();
        let on_interval = sqrt_map().self_map_on(Domain::Interval(unit));
        let on_cone = sqrt_map().self_map_on(Domain::Cone(e.cone().clone()));
        let a = iterate_common(&e, &on_interval, &on_interval, &x(0.25), &opts).unwrap();
        let b = iterate_common(&e, &on_cone, &on_cone, &x(0.25), &opts).unwrap();
        assert_eq!(free.trace, a.trace);
        assert_eq!(free.trace, b.trace);
        let outside = iterate_common(&e, &on_interval, &on_interval, &x(2.0), &opts);
        assert!(matches!(outside, Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn options_validation() {
        let bad = SolverOptions { tol: 0.0, ..SolverOptions::default() };
        assert!(bad.validate().is_err());
        let bad = SolverOptions { max_iter: 0, ..SolverOptions::default() };
        assert!(bad.validate().is_err());
        let parsed: SolverOptions = serde_json::from_str(r#"{"tol": 1e-6, "selector": "nearest-previous"}"#).unwrap();
        assert_eq!(parsed.selector, Selector::NearestPrevious);
        assert_eq!(parsed.max_iter, 1000);
    }
}
