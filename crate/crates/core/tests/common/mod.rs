//! Independent oracles and generators shared by the integration tests.
//! Nothing here calls into the code under test except to build inputs.
#![allow(dead_code)]

use conefix::payoff_expr::{BinOp, Expr, Func};
use proptest::prelude::*;

/// `max_i w_i |a_i - b_i|`, evaluated directly.
pub fn weighted_dist(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter()
        .zip(a.iter().zip(b))
        .map(|(w, (x, y))| w * (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn diam_direct(w: &[f64], pts: &[Vec<f64>]) -> f64 {
    let mut d = 0.0f64;
    for a in pts {
        for b in pts {
            d = d.max(weighted_dist(w, a, b));
        }
    }
    d
}

/// Exhaustive minimum over all partitions into at most `k` blocks of the
/// largest block diameter, by restricted-growth-string enumeration.
pub fn brute_force_alpha(w: &[f64], pts: &[Vec<f64>], k: usize) -> f64 {
    let n = pts.len();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    fn rec(i: usize, used: usize, k: usize, labels: &mut Vec<usize>, w: &[f64], pts: &[Vec<f64>], best: &mut f64) {
        let n = pts.len();
        if i == n {
            let mut worst = 0.0f64;
            for a in 0..n {
                for b in a + 1..n {
                    if labels[a] == labels[b] {
                        worst = worst.max(weighted_dist(w, &pts[a], &pts[b]));
                    }
                }
            }
            *best = best.min(worst);
            return;
        }
        for l in 0..(used + 1).min(k) {
            labels[i] = l;
            rec(i + 1, used.max(l + 1), k, labels, w, pts, best);
        }
    }
    if n == 0 {
        return 0.0;
    }
    labels[0] = 0;
    rec(1, 1, k, &mut labels, w, pts, &mut best);
    best
}

/// Exhaustive pure-strategy maxmin and minmax written against the raw table.
pub fn table_minimax(k: &[Vec<f64>]) -> (f64, f64) {
    let maxmin = k
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max);
    let minmax = (0..k[0].len())
        .map(|j| k.iter().map(|row| row[j]).fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min);
    (maxmin, minmax)
}

fn arb_leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..1000).prop_map(|v| Expr::Num(v as f64)),
        (0.0f64..1e6).prop_map(Expr::Num),
        prop_oneof![Just("x"), Just("y")].prop_map(|s| Expr::Var(s.to_string())),
    ]
}

/// Random ASTs over `x`, `y`. Literals are nonnegative because the printer
/// writes a negative literal as a negation.
pub fn arb_expr() -> impl Strategy<Value = Expr> {
    arb_leaf().prop_recursive(5, 48, 3, |inner| {
        let ops = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow)
        ];
        let unary = prop_oneof![Just(Func::Abs), Just(Func::Sin), Just(Func::Cos), Just(Func::Exp), Just(Func::Sqrt)];
        let binary = prop_oneof![Just(Func::Min), Just(Func::Max)];
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (ops, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::Binary(op, Box::new(a), Box::new(b))),
            (unary, inner.clone()).prop_map(|(f, a)| Expr::Call(f, vec![a])),
            (binary, inner.clone(), inner).prop_map(|(f, a, b)| Expr::Call(f, vec![a, b])),
        ]
    })
}

pub const GOLDEN_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
pub const SCHEMA_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/schemas");

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str], stdin: &[u8]) -> (i32, String, String) {
    let mut argv = vec!["conefix"];
    argv.extend_from_slice(args);
    let mut input = stdin;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = conefix::cli::run(argv, &mut input, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// The report text with `timing_ms` zeroed, the form golden files store.
pub fn without_timing(report: &str) -> String {
    let mut r: conefix::cli::RunReport = serde_json::from_str(report).expect("report is JSON");
    r.timing_ms = 0.0;
    r.to_json()
}

pub fn load_schema(name: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(format!("{SCHEMA_DIR}/{name}")).unwrap();
    let schema: serde_json::Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

pub fn schema_errors(v: &jsonschema::Validator, doc: &serde_json::Value) -> Vec<String> {
    v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect()
}

/// `(golden name, subcommand args)`; every case reads `<fixture>.json`.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("game_pennies", &["game", "--in", "pennies.json"]),
    ("game_saddle", &["game", "--in", "saddle.json"]),
    ("fixpoint_sqrt", &["fixpoint", "--in", "sqrtmap.json"]),
    ("fixpoint_contraction", &["fixpoint", "--in", "contraction.json", "--seed", "42"]),
    ("mnc_set", &["mnc", "--in", "set.json", "--k", "2"]),
    ("intersect_diagonal", &["intersect", "--in", "diagonal.json"]),
    ("check_contraction", &["check", "--in", "contraction.json"]),
];

/// Runs a golden case with the fixture path resolved; returns the report
/// text with timing zeroed.
pub fn golden_report(args: &[&str]) -> String {
    let args: Vec<String> = args
        .iter()
        .enumerate()
        .map(|(i, a)| if i > 0 && args[i - 1] == "--in" { format!("{GOLDEN_DIR}/{a}") } else { a.to_string() })
        .collect();
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let (code, out, err) = run_cli(&refs, b"");
    assert_eq!(code, 0, "{args:?} failed: {err}");
    without_timing(&out)
}
