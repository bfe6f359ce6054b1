//! Static SVG of a graph and a joint plan.

use std::fmt::Write as _;

use crate::graph::{Graph, Point, VertexId};
use crate::motion::{ActionKind, Plan};
use crate::{Error, Result};

const SCALE: f64 = 40.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn check_vertex(graph: &Graph, agent: usize, v: VertexId) -> Result<()> {
    if v < graph.num_vertices() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "agent {agent}: plan references unknown vertex {v}"
        )))
    }
}

/// Draws edges, vertices, per-agent start (circle) and goal (square)
/// markers, one trajectory polyline per agent and a legend of disk radii.
/// `radii[k]` is agent `k`'s radius.
pub fn render_svg(graph: &Graph, plans: &[Plan], radii: &[f64]) -> Result<String> {
    if radii.len() != plans.len() {
        return Err(Error::invalid(format!(
            "{} radii for {} plans",
            radii.len(),
            plans.len()
        )));
    }
    for p in plans {
        check_vertex(graph, p.agent, p.start)?;
        for ta in &p.actions {
            check_vertex(graph, p.agent, ta.kind().source())?;
            check_vertex(graph, p.agent, ta.kind().target())?;
        }
    }

    let pts = graph.points();
    let rmax = radii.iter().copied().fold(0.0, f64::max);
    let pad = 1.0 + rmax;
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if let Some(first) = pts.first() {
        (x0, y0, x1, y1) = (first.x, first.y, first.x, first.y);
    }
    for p in pts {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let mut legend: Vec<f64> = radii.to_vec();
    legend.sort_by(f64::total_cmp);
    legend.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let legend_h = 0.5 + legend.len() as f64 * (2.0 * rmax + 0.5);
    let width = (x1 - x0 + 2.0 * pad) * SCALE;
    let height = (y1 - y0 + 2.0 * pad + legend_h) * SCALE;
    let px = |p: Point| ((p.x - x0 + pad) * SCALE, (p.y - y0 + pad) * SCALE);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r##"<g id="edges" stroke="#cccccc" stroke-width="1">"##).unwrap();
    for (u, v, _) in graph.edges() {
        let ((ax, ay), (bx, by)) = (px(pts[u]), px(pts[v]));
        writeln!(s, r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, r##"<g id="vertices" fill="#999999">"##).unwrap();
    for &p in pts {
        let (x, y) = px(p);
        writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();

    for (k, p) in plans.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut path = vec![px(pts[p.start])];
        for ta in &p.actions {
            if let ActionKind::Move { to, .. } = ta.kind() {
                path.push(px(pts[to]));
            }
        }
        let coords: Vec<String> = path.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        writeln!(
            s,
            r#"<polyline class="trajectory" data-agent="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            p.agent,
            coords.join(" ")
        )
        .unwrap();
        let (sx, sy) = px(pts[p.start]);
        let r = radii[k] * SCALE;
        writeln!(
            s,
            r#"<circle class="start" cx="{sx:.2}" cy="{sy:.2}" r="{r:.2}" fill="{color}" fill-opacity="0.35" stroke="{color}"/>"#
        )
        .unwrap();
        let (gx, gy) = px(pts[p.goal()]);
        let half = r.min(0.3 * SCALE);
        writeln!(
            s,
            r#"<rect class="goal" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            gx - half,
            gy - half,
            2.0 * half,
            2.0 * half
        )
        .unwrap();
    }

    writeln!(s, r#"<g id="legend" font-family="sans-serif" font-size="12">"#).unwrap();
    let mut y = (y1 - y0 + 2.0 * pad + 0.5 + rmax) * SCALE;
    for r in legend {
        let cx = (pad + rmax) * SCALE;
        writeln!(
            s,
            r##"<circle cx="{cx:.2}" cy="{y:.2}" r="{:.2}" fill="none" stroke="#333333"/>"##,
            r * SCALE
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">disk radius {r:.4}</text>"#,
            cx + (rmax + 0.3) * SCALE,
            y + 4.0
        )
        .unwrap();
        y += (2.0 * rmax + 0.5) * SCALE;
    }
    writeln!(s, "</g>\n</svg>").unwrap();
    Ok(s)
}
