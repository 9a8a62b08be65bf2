mod common;

use conefix::fixpoint_engine::{iterate_common, iterate_single, residual};
use conefix::game_solver::{best_response_tables, minimax_oracle, solve_game, Game, GameOptions, ProductSpace};
use conefix::noncompactness::{alpha_k, alpha_k_with};
use conefix::payoff_expr::parse;
use conefix::setmaps::{product_order, set_leq_all, set_leq_dhage, ProductOrderKind};
use conefix::{ConeSpec, FiniteSet, MultiMap, OrderedSpace, Point, SeminormSpec, SolverOptions};
use proptest::prelude::*;

use common::{arb_expr, brute_force_alpha, diam_direct, table_minimax};

/// Lower-triangular `G` with unit diagonal: an invertible, hence pointed, cone.
fn triangular_cone() -> OrderedSpace {
    let rows = vec![vec![1.0, 0.0, 0.0], vec![-1.0, 1.0, 0.0], vec![2.0, -1.0, 1.0]];
    OrderedSpace::new(3, ConeSpec::Polyhedral { rows }, vec![SeminormSpec::sup(3)]).unwrap()
}

/// `k` with `Gk = u` for the cone above, by forward substitution.
fn cone_element(u: &[f64]) -> Vec<f64> {
    let k0 = u[0];
    let k1 = u[1] + k0;
    let k2 = u[2] - 2.0 * k0 + k1;
    vec![k0, k1, k2]
}

fn spaces() -> Vec<OrderedSpace> {
    vec![OrderedSpace::euclidean_orthant(3), triangular_cone()]
}

fn int_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-20i32..=20).prop_map(f64::from), n)
}

fn nonneg_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0i32..=10).prop_map(f64::from), n)
}

fn pt(v: &[f64]) -> Point {
    Point::new(v.to_vec()).unwrap()
}

fn lift(space: &OrderedSpace, u: &[f64]) -> Vec<f64> {
    match space.cone() {
        ConeSpec::Orthant => u.to_vec(),
        ConeSpec::Polyhedral { .. } => cone_element(u),
    }
}

proptest! {
    #[test]
    fn order_axioms(x in int_vec(3), u in nonneg_vec(3), v in nonneg_vec(3), other in int_vec(3)) {
        for space in spaces() {
            let x = pt(&x);
            let y = x.add(&pt(&lift(&space, &u))).unwrap();
            let z = y.add(&pt(&lift(&space, &v))).unwrap();
            prop_assert!(space.leq(&x, &x).unwrap());
            prop_assert!(space.leq(&x, &y).unwrap() && space.leq(&y, &z).unwrap());
            prop_assert!(space.leq(&x, &z).unwrap());
            let w = pt(&other);
            if space.leq(&x, &w).unwrap() && space.leq(&w, &x).unwrap() {
                prop_assert!(space.max_dist(&x, &w).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn translation_and_scaling(x in int_vec(3), y in int_vec(3), z in int_vec(3), e in 0i32..6) {
        let lambda = 2f64.powi(e - 2);
        for space in spaces() {
            let (x, y, z) = (pt(&x), pt(&y), pt(&z));
            let base = space.leq(&x, &y).unwrap();
            prop_assert_eq!(base, space.leq(&x.add(&z).unwrap(), &y.add(&z).unwrap()).unwrap());
            prop_assert_eq!(base, space.leq(&x.scale(lambda).unwrap(), &y.scale(lambda).unwrap()).unwrap());
        }
    }

    #[test]
    fn interval_is_order_sandwich(lo in int_vec(3), hi in int_vec(3), z in int_vec(3)) {
        for space in spaces() {
            let (lo, hi, z) = (pt(&lo), pt(&hi), pt(&z));
            let iv = space.interval(lo.clone(), hi.clone()).unwrap();
            let expected = space.leq(&lo, &z).unwrap() && space.leq(&z, &hi).unwrap();
            prop_assert_eq!(iv.contains(&z).unwrap(), expected);
        }
    }

    #[test]
    fn interval_bound_dominates_samples(lo in int_vec(3), u in nonneg_vec(3), seed in any::<u64>()) {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for space in spaces() {
            let lo_p = pt(&lo);
            let hi_p = lo_p.add(&pt(&lift(&space, &u))).unwrap();
            let iv = space.interval(lo_p.clone(), hi_p).unwrap();
            for p in [SeminormSpec::sup(3), SeminormSpec::functional_max("f", vec![vec![1.0, -2.0, 0.5]])] {
                let bound = space.interval_bound(&iv, &p).unwrap();
                // Members lo + k with k = lift(t) and 0 <= t <= u componentwise.
                for _ in 0..1000 {
                    let t: Vec<f64> = u.iter().map(|ui| ui * rng.random_range(0.0..=1.0)).collect();
                    let z = lo_p.add(&pt(&lift(&space, &t))).unwrap();
                    prop_assert!(p.eval(&z) <= bound + 1e-9, "{} > {}", p.eval(&z), bound);
                }
            }
        }
    }

    #[test]
    fn alpha_budget_properties(pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 1..9)) {
        let w = [1.0, 0.5];
        let p = SeminormSpec::weighted_sup("w", w.to_vec());
        let set = FiniteSet::new(pts.iter().map(|v| pt(v)).collect()).unwrap();
        let n = set.len();
        let raw: Vec<Vec<f64>> = set.points().iter().map(|q| q.coords().to_vec()).collect();
        prop_assert_eq!(alpha_k(&set, &p, 1).value, diam_direct(&w, &raw));
        prop_assert_eq!(alpha_k(&set, &p, n).value, 0.0);
        let mut prev = f64::INFINITY;
        for k in 1..=n {
            let a = alpha_k(&set, &p, k).value;
            prop_assert!(a <= prev);
            prop_assert_eq!(a, brute_force_alpha(&w, &raw, k));
            prev = a;
        }
    }

    #[test]
    fn alpha_subset_and_union(
        a in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 1..6),
        b in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 1..6),
        k1 in 1usize..3,
        k2 in 1usize..3,
    ) {
        let p = SeminormSpec::sup(2);
        let sa = FiniteSet::new(a.iter().map(|v| pt(v)).collect()).unwrap();
        let sb = FiniteSet::new(b.iter().map(|v| pt(v)).collect()).unwrap();
        let u = sa.union(&sb).unwrap();
        for k in 1..=3 {
            prop_assert!(alpha_k(&sa, &p, k).value <= alpha_k(&u, &p, k).value);
        }
        let joint = alpha_k_with(&u, &p, k1 + k2, 64).value;
        prop_assert!(joint <= alpha_k(&sa, &p, k1).value.max(alpha_k(&sb, &p, k2).value));
    }

    #[test]
    fn product_diameter_is_factor_max(
        xs in prop::collection::vec(-5.0f64..5.0, 1..6),
        ys in prop::collection::vec(-5.0f64..5.0, 1..6),
    ) {
        let ps = ProductSpace::new(OrderedSpace::euclidean_orthant(1), OrderedSpace::euclidean_orthant(1)).unwrap();
        let fx = FiniteSet::from_scalars(&xs).unwrap();
        let fy = FiniteSet::from_scalars(&ys).unwrap();
        let prod: Vec<Point> = fx.points().iter().flat_map(|x| fy.points().iter().map(move |y| x.concat(y))).collect();
        let prod = FiniteSet::new(prod).unwrap();
        let sup = SeminormSpec::sup(1);
        prop_assert_eq!(prod.diam(&ps.joint().seminorms()[0]), fx.diam(&sup).max(fy.diam(&sup)));
    }

    #[test]
    fn all_pairs_implies_dhage(
        a in prop::collection::vec(prop::collection::vec(0i32..4, 2), 1..5),
        b in prop::collection::vec(prop::collection::vec(0i32..4, 2), 1..5),
        c in prop::collection::vec(0i32..4, 1..4),
        d in prop::collection::vec(0i32..4, 1..4),
    ) {
        let space = OrderedSpace::euclidean_orthant(2);
        let to_set = |v: &Vec<Vec<i32>>| FiniteSet::new(v.iter().map(|q| pt(&q.iter().map(|c| f64::from(*c)).collect::<Vec<_>>())).collect()).unwrap();
        let (sa, sb) = (to_set(&a), to_set(&b));
        if set_leq_all(&space, &sa, &sb).unwrap() {
            prop_assert!(set_leq_dhage(&space, &sa, &sb).unwrap());
        }
        let one = OrderedSpace::euclidean_orthant(1);
        let scal = |v: &Vec<i32>| FiniteSet::from_scalars(&v.iter().map(|c| f64::from(*c)).collect::<Vec<_>>()).unwrap();
        let (fc, fd) = (scal(&c), scal(&d));
        if product_order(&one, &one, (&fc, &fc), (&fd, &fd), ProductOrderKind::Ll).unwrap() {
            prop_assert!(product_order(&one, &one, (&fc, &fc), (&fd, &fd), ProductOrderKind::Lll).unwrap());
        }
    }

    #[test]
    fn common_iteration_with_equal_maps_is_single_iteration(a in 0.05f64..0.95, b in -3.0f64..3.0, x0 in -10.0f64..10.0) {
        let space = OrderedSpace::euclidean_orthant(1);
        let m = MultiMap::singleton("S", move |x: &Point| Point::scalar(a * x.coords()[0] + b));
        let opts = SolverOptions::default();
        let x0 = Point::scalar(x0).unwrap();
        let common = iterate_common(&space, &m, &m, &x0, &opts).unwrap();
        let single = iterate_single(&space, &m, &x0, &opts).unwrap();
        prop_assert_eq!(common.trace.points(), single.trace.points());
        prop_assert_eq!(common.certificate.accepted, single.certificate.accepted);
    }

    #[test]
    fn accepted_certificates_recompute(a in 0.0f64..0.9, b in -3.0f64..3.0, c in 0.0f64..0.9, x0 in -10.0f64..10.0) {
        // S and T share the fixed point b / (1 - a) when T is the affine map through it with slope c.
        let space = OrderedSpace::euclidean_orthant(1);
        let fix = b / (1.0 - a);
        let s = MultiMap::singleton("S", move |x: &Point| Point::scalar(a * x.coords()[0] + b));
        let t = MultiMap::singleton("T", move |x: &Point| Point::scalar(fix + c * (x.coords()[0] - fix)));
        let opts = SolverOptions::default();
        let run = iterate_common(&space, &s, &t, &Point::scalar(x0).unwrap(), &opts).unwrap();
        if run.certificate.accepted {
            let x = &run.certificate.point;
            prop_assert!(residual(&space, x, &s).unwrap().all_within(opts.tol));
            prop_assert!(residual(&space, x, &t).unwrap().all_within(opts.tol));
            let xv = x.coords()[0];
            prop_assert!((a * xv + b - xv).abs() <= opts.tol);
        }
        prop_assert!(run.trace.alternates("S", "T"));
        prop_assert!(run.trace.selections_are_members());
    }

    #[test]
    fn ast_round_trip(e in arb_expr()) {
        let printed = e.to_string();
        prop_assert_eq!(parse(&printed, &["x", "y"]).unwrap(), e);
    }

    #[test]
    fn oracle_invariants(table in prop::collection::vec(prop::collection::vec(-3i32..=3, 1..6), 1..6)) {
        let nb = table[0].len();
        let k: Vec<Vec<f64>> = table.iter().map(|r| (0..nb).map(|j| f64::from(r[j % r.len()])).collect()).collect();
        let na = k.len();
        let grid_a: Vec<f64> = (0..na).map(|i| i as f64).collect();
        let grid_b: Vec<f64> = (0..nb).map(|j| j as f64).collect();
        let game = Game::scalar(&grid_a, &grid_b, k.clone()).unwrap();
        let o = minimax_oracle(&game);
        prop_assert!(o.maxmin <= o.minmax);
        prop_assert_eq!((o.maxmin, o.minmax), table_minimax(&k));
        let t = best_response_tables(&game, 0.0);
        for i in 0..na {
            for j in 0..nb {
                prop_assert_eq!(o.saddles.contains(&(i, j)), t.is_saddle(i, j));
            }
        }
        let r = solve_game(&game, None, &GameOptions::default()).unwrap();
        if let Some(sp) = &r.saddle {
            // x* maximizes its column and y* minimizes its row, so the chain closes.
            let col_max = (0..na).map(|i| k[i][sp.j]).fold(f64::NEG_INFINITY, f64::max);
            let row_min = k[sp.i].iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(sp.value, col_max);
            prop_assert_eq!(sp.value, row_min);
            prop_assert_eq!((o.maxmin, o.minmax), (sp.value, sp.value));
        }
    }

    #[test]
    fn nonnegative_grids_keep_invariants(table in prop::collection::vec(prop::collection::vec(-3i32..=3, 3), 3)) {
        let k: Vec<Vec<f64>> = table.iter().map(|r| r.iter().map(|v| f64::from(*v)).collect()).collect();
        let game = Game::scalar(&[0.0, 0.5, 2.0], &[0.0, 1.0, 3.0], k.clone()).unwrap();
        let o = minimax_oracle(&game);
        prop_assert!(o.maxmin <= o.minmax);
        let r = solve_game(&game, None, &GameOptions::default()).unwrap();
        if let Some(sp) = r.saddle {
            prop_assert!(o.saddles.contains(&(sp.i, sp.j)));
        }
    }
}
