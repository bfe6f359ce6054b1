use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GridMap, Point, VertexId};
use crate::{Error, Result};

/// Parses the line-oriented roadmap format:
///
/// ```text
/// # comment
/// v <id> <x> <y>
/// e <u> <v>
/// ```
///
/// Ids must be dense `0..n`. Edge weights follow from the coordinates.
pub fn load_roadmap(text: &str) -> Result<Graph> {
    let mut points: HashMap<usize, (Point, usize)> = HashMap::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["v", id, x, y] => {
                let id: usize = id
                    .parse()
                    .map_err(|_| Error::parse(no, format!("bad vertex id `{id}`")))?;
                let x: f64 = x
                    .parse()
                    .map_err(|_| Error::parse(no, format!("bad coordinate `{x}`")))?;
                let y: f64 = y
                    .parse()
                    .map_err(|_| Error::parse(no, format!("bad coordinate `{y}`")))?;
                if !(x.is_finite() && y.is_finite()) {
                    return Err(Error::parse(no, "non-finite coordinate"));
                }
                if points.insert(id, (Point::new(x, y), no)).is_some() {
                    return Err(Error::parse(no, format!("duplicate vertex id {id}")));
                }
            }
            ["e", u, v] => {
                let u: usize = u
                    .parse()
                    .map_err(|_| Error::parse(no, format!("bad vertex id `{u}`")))?;
                let v: usize = v
                    .parse()
                    .map_err(|_| Error::parse(no, format!("bad vertex id `{v}`")))?;
                edges.push((u, v, no));
            }
            _ => return Err(Error::parse(no, format!("unrecognized record `{line}`"))),
        }
    }
    let n = points.len();
    let mut ordered = vec![Point::new(0.0, 0.0); n];
    for (&id, &(p, no)) in &points {
        if id >= n {
            return Err(Error::parse(no, format!("vertex ids must be dense 0..{n}, found {id}")));
        }
        ordered[id] = p;
    }
    let mut graph = Graph::new(ordered);
    for (u, v, no) in edges {
        if u >= n || v >= n {
            return Err(Error::parse(
                no,
                format!("edge {u}-{v} references an undeclared vertex"),
            ));
        }
        graph.add_edge(u, v).map_err(|e| Error::parse(no, e.to_string()))?;
    }
    Ok(graph)
}

/// Inverse of [`load_roadmap`]; coordinates are written in shortest
/// round-trip form so reloading reproduces the graph exactly.
pub fn serialize_roadmap(graph: &Graph) -> String {
    let mut out = format!(
        "# roadmap: {} vertices, {} edges\n",
        graph.num_vertices(),
        graph.num_edges()
    );
    for (id, p) in graph.points().iter().enumerate() {
        out.push_str(&format!("v {id} {:?} {:?}\n", p.x, p.y));
    }
    for (u, v, _) in graph.edges() {
        out.push_str(&format!("e {u} {v}\n"));
    }
    out
}

#[derive(Debug, Clone)]
pub struct RoadmapParams<'a> {
    pub width: f64,
    pub height: f64,
    pub n_nodes: usize,
    pub connect_radius: f64,
    pub seed: u64,
    /// When set, samples and edges keep `clearance` from every blocked cell.
    /// Cell `(c, r)` covers `[c-0.5, c+0.5] x [r-0.5, r+0.5]`.
    pub obstacles: Option<&'a GridMap>,
    pub clearance: f64,
}

fn point_box_distance(p: Point, cx: f64, cy: f64) -> f64 {
    let dx = (p.x - cx).abs() - 0.5;
    let dy = (p.y - cy).abs() - 0.5;
    dx.max(0.0).hypot(dy.max(0.0))
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (vx, vy) = (b.x - a.x, b.y - a.y);
    let len2 = vx * vx + vy * vy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * vx + (p.y - a.y) * vy) / len2).clamp(0.0, 1.0)
    };
    p.distance(Point::new(a.x + t * vx, a.y + t * vy))
}

fn segment_hits_box(a: Point, b: Point, cx: f64, cy: f64) -> bool {
    // Liang-Barsky clip against the closed box.
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [
        (-dx, a.x - (cx - 0.5)),
        (dx, (cx + 0.5) - a.x),
        (-dy, a.y - (cy - 0.5)),
        (dy, (cy + 0.5) - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    t0 <= t1
}

fn segment_box_distance(a: Point, b: Point, cx: f64, cy: f64) -> f64 {
    if segment_hits_box(a, b, cx, cy) {
        return 0.0;
    }
    let corners = [
        Point::new(cx - 0.5, cy - 0.5),
        Point::new(cx + 0.5, cy - 0.5),
        Point::new(cx - 0.5, cy + 0.5),
        Point::new(cx + 0.5, cy + 0.5),
    ];
    corners
        .iter()
        .map(|&c| point_segment_distance(c, a, b))
        .chain([point_box_distance(a, cx, cy), point_box_distance(b, cx, cy)])
        .fold(f64::INFINITY, f64::min)
}

fn blocked_near(map: &GridMap, lo: Point, hi: Point, margin: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
    let clamp = |v: f64, n: usize| (v.round().max(0.0) as usize).min(n.saturating_sub(1));
    let x0 = clamp(lo.x - margin - 1.0, map.width());
    let x1 = clamp(hi.x + margin + 1.0, map.width());
    let y0 = clamp(lo.y - margin - 1.0, map.height());
    let y1 = clamp(hi.y + margin + 1.0, map.height());
    (y0..=y1)
        .flat_map(move |y| (x0..=x1).map(move |x| (x, y)))
        .filter(|&(x, y)| map.is_blocked(x, y))
        .map(|(x, y)| (x as f64, y as f64))
}

fn segment_is_clear(map: &GridMap, a: Point, b: Point, clearance: f64) -> bool {
    let lo = Point::new(a.x.min(b.x), a.y.min(b.y));
    let hi = Point::new(a.x.max(b.x), a.y.max(b.y));
    blocked_near(map, lo, hi, clearance).all(|(cx, cy)| segment_box_distance(a, b, cx, cy) >= clearance)
}

/// Random geometric roadmap: uniform samples, edges between samples within
/// `connect_radius`, largest connected component kept and renumbered.
pub fn generate_roadmap(params: &RoadmapParams<'_>) -> Result<Graph> {
    if params.n_nodes < 2 {
        return Err(Error::invalid("a roadmap needs at least two nodes"));
    }
    if !(params.width > 0.0 && params.height > 0.0) {
        return Err(Error::invalid("roadmap extent must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (x_off, y_off) = if params.obstacles.is_some() {
        (-0.5, -0.5)
    } else {
        (0.0, 0.0)
    };
    let mut points = Vec::with_capacity(params.n_nodes);
    let mut attempts = 0usize;
    while points.len() < params.n_nodes {
        attempts += 1;
        if attempts > params.n_nodes * 1000 {
            return Err(Error::invalid("could not place roadmap samples in free space"));
        }
        let p = Point::new(
            x_off + rng.gen::<f64>() * params.width,
            y_off + rng.gen::<f64>() * params.height,
        );
        if let Some(map) = params.obstacles {
            if !segment_is_clear(map, p, p, params.clearance.max(1e-12)) {
                continue;
            }
        }
        if points.iter().any(|q: &Point| q.distance(p) < 1e-9) {
            continue;
        }
        points.push(p);
    }

    let mut edges = Vec::new();
    for u in 0..points.len() {
        for v in u + 1..points.len() {
            if points[u].distance(points[v]) > params.connect_radius {
                continue;
            }
            if let Some(map) = params.obstacles {
                if !segment_is_clear(map, points[u], points[v], params.clearance) {
                    continue;
                }
            }
            edges.push((u, v));
        }
    }
    let full = Graph::from_edges(points, &edges)?;

    let labels = full.components();
    let mut sizes = HashMap::new();
    for &l in &labels {
        *sizes.entry(l).or_insert(0usize) += 1;
    }
    let (&best, &size) = sizes
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .expect("non-empty graph");
    if size < 2 {
        return Err(Error::invalid("largest roadmap component has a single node"));
    }
    let mut remap: Vec<Option<VertexId>> = vec![None; full.num_vertices()];
    let mut kept = Vec::with_capacity(size);
    for (v, &l) in labels.iter().enumerate() {
        if l == best {
            remap[v] = Some(kept.len());
            kept.push(full.point(v));
        }
    }
    let kept_edges: Vec<_> = full
        .edges()
        .filter_map(|(u, v, _)| Some((remap[u]?, remap[v]?)))
        .collect();
    Graph::from_edges(kept, &kept_edges)
}
