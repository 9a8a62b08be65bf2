//! Trace CSV and payoff heatmap SVG. Both are byte-deterministic.

use std::fmt::Write as _;

use crate::fixpoint_engine::IterationTrace;
use crate::game_solver::{Game, SaddleReport};
use crate::ordered_space::OrderedSpace;

/// One row per trace step: `index,map,coords,step_<id>...,audit`.
/// Coordinates are `;`-separated; the step columns of the starting point are empty.
pub fn trace_csv(trace: &IterationTrace, space: &OrderedSpace) -> String {
    let ids: Vec<&str> = space.seminorms().iter().map(|p| p.id.as_str()).collect();
    let mut out = String::from("index,map,coords");
    for id in &ids {
        let _ = write!(out, ",step_{id}");
    }
    out.push_str(",audit\n");
    for step in &trace.steps {
        let coords: Vec<String> = step.selected.coords().iter().map(|c| c.to_string()).collect();
        let _ = write!(out, "{},{},{}", step.index, step.map, coords.join(";"));
        for id in &ids {
            out.push(',');
            if step.index > 0 {
                if let Some(v) = step.step_size.get(id) {
                    let _ = write!(out, "{v}");
                }
            }
        }
        let audit = match step.order_ok {
            Some(true) => "ok",
            Some(false) => "fail",
            None => "na",
        };
        let _ = writeln!(out, ",{audit}");
    }
    out
}

const CELL: usize = 12;

/// Linear blue-to-red ramp; `t` in `[0, 1]`.
fn ramp(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0);
    ((255.0 * t).round() as u8, 0, (255.0 * (1.0 - t)).round() as u8)
}

/// Rows are strategies of `A`, columns strategies of `B`. Oracle saddle
/// cells carry a black outline.
pub fn heatmap_svg(game: &Game, report: &SaddleReport) -> String {
    let (na, nb) = game.shape();
    let (lo, hi) = game.payoff_range();
    let span = hi - lo;
    let (w, h) = (nb * CELL, na * CELL);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, "<title>payoff heatmap {na}x{nb}, range [{lo}, {hi}]</title>");
    for (i, row) in game.payoff().iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let t = if span > 0.0 { (v - lo) / span } else { 0.0 };
            let (r, g, b) = ramp(t);
            let _ = writeln!(
                out,
                r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                j * CELL,
                i * CELL
            );
        }
    }
    for &(i, j) in &report.oracle.saddles {
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="2" class="saddle"/>"#,
            j * CELL + 1,
            i * CELL + 1,
            CELL - 2,
            CELL - 2
        );
    }
    out.push_str("</svg>\n");
    out
}
