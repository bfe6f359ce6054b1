use super::{CellIndex, Graph, Point};
use crate::{Error, Result};

/// Occupancy grid in MovingAI layout: row-major, `(x, y) = (column, row)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    blocked: Vec<bool>,
}

impl GridMap {
    pub fn new(width: usize, height: usize, blocked: Vec<bool>) -> Result<Self> {
        if blocked.len() != width * height {
            return Err(Error::invalid(format!(
                "expected {} cells, got {}",
                width * height,
                blocked.len()
            )));
        }
        Ok(GridMap { width, height, blocked })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        GridMap {
            width,
            height,
            blocked: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_blocked(&self, x: usize, y: usize) -> bool {
        self.blocked[y * self.width + x]
    }

    pub fn set_blocked(&mut self, x: usize, y: usize, blocked: bool) {
        self.blocked[y * self.width + x] = blocked;
    }

    pub fn passable_cells(&self) -> usize {
        self.blocked.iter().filter(|b| !**b).count()
    }

    /// Serializes back to the MovingAI map format.
    pub fn to_movingai(&self) -> String {
        let mut out = format!("type octile\nheight {}\nwidth {}\nmap\n", self.height, self.width);
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(if self.is_blocked(x, y) { '@' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a MovingAI `.map` file.
pub fn load_movingai_map(text: &str) -> Result<GridMap> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let mut height = None;
    let mut width = None;
    let mut has_type = false;
    loop {
        let Some((no, line)) = lines.next() else {
            return Err(Error::parse(text.lines().count().max(1), "missing `map` line"));
        };
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some("type"), Some(_), None) => has_type = true,
            (Some("height"), Some(v), None) => {
                height = Some(v.parse::<usize>().map_err(|_| Error::parse(no, "bad height"))?)
            }
            (Some("width"), Some(v), None) => {
                width = Some(v.parse::<usize>().map_err(|_| Error::parse(no, "bad width"))?)
            }
            (Some("map"), None, None) => {
                if !has_type {
                    return Err(Error::parse(no, "missing `type` header"));
                }
                break;
            }
            _ => return Err(Error::parse(no, format!("malformed header line `{line}`"))),
        }
    }
    let (Some(height), Some(width)) = (height, width) else {
        return Err(Error::parse(1, "missing height or width"));
    };

    let mut blocked = Vec::with_capacity(width * height);
    let mut rows = 0;
    for (no, line) in lines {
        if rows == height {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(no, "more rows than the declared height"));
        }
        if line.chars().count() != width {
            return Err(Error::parse(
                no,
                format!("row has {} cells, expected {width}", line.chars().count()),
            ));
        }
        for c in line.chars() {
            blocked.push(match c {
                '.' | 'G' => false,
                '@' | 'O' | 'T' | 'W' => true,
                other => return Err(Error::parse(no, format!("unknown map character `{other}`"))),
            });
        }
        rows += 1;
    }
    if rows != height {
        return Err(Error::parse(
            text.lines().count(),
            format!("found {rows} rows, expected {height}"),
        ));
    }
    GridMap::new(width, height, blocked)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// The `2^k` move set, counter-clockwise from `(1, 0)`.
///
/// Each round inserts the sum of every pair of angular neighbours between
/// them, starting from the four cardinal moves.
pub fn neighborhood(k: u32) -> Result<Vec<(i64, i64)>> {
    if !(2..=5).contains(&k) {
        return Err(Error::invalid(format!("neighborhood exponent k={k} outside 2..=5")));
    }
    let mut moves = vec![(1, 0), (0, 1), (-1, 0), (0, -1)];
    for _ in 2..k {
        let mut next = Vec::with_capacity(moves.len() * 2);
        for i in 0..moves.len() {
            let (ax, ay) = moves[i];
            let (bx, by) = moves[(i + 1) % moves.len()];
            let (sx, sy) = (ax + bx, ay + by);
            let g = gcd(sx, sy);
            next.push((ax, ay));
            next.push((sx / g, sy / g));
        }
        moves = next;
    }
    Ok(moves)
}

/// True when the segment between the centres of `from` and `to` only touches
/// passable cells. Touching a blocked cell at a corner counts.
fn line_of_sight(map: &GridMap, from: (i64, i64), to: (i64, i64)) -> bool {
    // Doubled coordinates keep cell centres integral.
    let p0 = (2 * from.0 + 1, 2 * from.1 + 1);
    let p1 = (2 * to.0 + 1, 2 * to.1 + 1);
    let normal = (-(p1.1 - p0.1), p1.0 - p0.0);
    let offset = normal.0 * p0.0 + normal.1 * p0.1;
    for cy in from.1.min(to.1)..=from.1.max(to.1) {
        for cx in from.0.min(to.0)..=from.0.max(to.0) {
            let corners = [
                (2 * cx, 2 * cy),
                (2 * cx + 2, 2 * cy),
                (2 * cx, 2 * cy + 2),
                (2 * cx + 2, 2 * cy + 2),
            ];
            let proj = corners.map(|(x, y)| normal.0 * x + normal.1 * y);
            let lo = *proj.iter().min().unwrap();
            let hi = *proj.iter().max().unwrap();
            if lo <= offset && offset <= hi && map.is_blocked(cx as usize, cy as usize) {
                return false;
            }
        }
    }
    true
}

/// Builds the `2^k`-connected graph of a grid.
///
/// One vertex per passable cell at `(column, row)`, numbered row-major. An
/// edge exists when the straight segment between the cell centres touches no
/// blocked cell. `radius` must fit inside a cell; legality does not depend on
/// it.
pub fn build_grid_graph(map: &GridMap, k: u32, radius: f64) -> Result<Graph> {
    let moves = neighborhood(k)?;
    if !(radius > 0.0 && radius < 0.5 * std::f64::consts::SQRT_2) {
        return Err(Error::invalid(format!("radius {radius} does not fit a cell")));
    }
    let (w, h) = (map.width(), map.height());
    let mut index = vec![None; w * h];
    let mut points = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !map.is_blocked(x, y) {
                index[y * w + x] = Some(points.len());
                points.push(Point::new(x as f64, y as f64));
            }
        }
    }
    let mut graph = Graph::new(points);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let Some(u) = index[y as usize * w + x as usize] else {
                continue;
            };
            for &(dx, dy) in &moves {
                let (tx, ty) = (x + dx, y + dy);
                if tx < 0 || ty < 0 || tx >= w as i64 || ty >= h as i64 {
                    continue;
                }
                let Some(v) = index[ty as usize * w + tx as usize] else {
                    continue;
                };
                if u < v && line_of_sight(map, (x, y), (tx, ty)) {
                    graph.add_edge(u, v)?;
                }
            }
        }
    }
    graph.set_cells(CellIndex {
        width: w,
        height: h,
        vertex: index,
    });
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn parses_blocked_cells() {
        let map = load_movingai_map("type octile\nheight 2\nwidth 2\nmap\n..\n.@\n").unwrap();
        assert!(!map.is_blocked(0, 0));
        assert!(!map.is_blocked(1, 0));
        assert!(!map.is_blocked(0, 1));
        assert!(map.is_blocked(1, 1));
    }

    #[test]
    fn empty_16x16_has_256_passable_cells() {
        let text = format!("type octile\nheight 16\nwidth 16\nmap\n{}", ".".repeat(16) + "\n");
        let text = text + &(".".repeat(16) + "\n").repeat(15);
        let map = load_movingai_map(&text).unwrap();
        assert_eq!(map.passable_cells(), 256);
    }

    #[test]
    fn row_length_mismatch_names_the_line() {
        let err = load_movingai_map("type octile\nheight 2\nwidth 2\nmap\n..\n...\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 6, .. }), "{err}");
    }

    #[test]
    fn malformed_header_and_unknown_chars() {
        assert!(matches!(
            load_movingai_map("type octile\nheight x\nwidth 2\nmap\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_movingai_map("type octile\nheight 1\nwidth 2\nmap\n.X\n"),
            Err(Error::Parse { line: 5, .. })
        ));
        assert!(load_movingai_map("type octile\nheight 2\nwidth 2\nmap\n..\n").is_err());
    }

    #[test]
    fn passable_and_blocked_characters() {
        let map = load_movingai_map("type octile\nheight 1\nwidth 6\nmap\n.G@OTW\n").unwrap();
        let blocked: Vec<bool> = (0..6).map(|x| map.is_blocked(x, 0)).collect();
        assert_eq!(blocked, vec![false, false, true, true, true, true]);
    }

    #[test]
    fn movingai_round_trip() {
        let map = load_movingai_map("type octile\nheight 2\nwidth 3\nmap\n.@.\n...\n").unwrap();
        assert_eq!(load_movingai_map(&map.to_movingai()).unwrap(), map);
    }

    #[test]
    fn neighborhood_sizes_and_weights() {
        let k2 = neighborhood(2).unwrap();
        assert_eq!(k2.len(), 4);
        let k3 = neighborhood(3).unwrap();
        assert_eq!(k3.len(), 8);
        assert!(k3.contains(&(1, 1)));
        assert!(k3.contains(&(-1, -1)));
        let k4 = neighborhood(4).unwrap();
        assert_eq!(k4.len(), 16);
        assert!(k4.contains(&(2, 1)));
        let k5 = neighborhood(5).unwrap();
        assert_eq!(k5.len(), 32);
        assert!(k5.contains(&(3, 1)));
        assert!(k5.contains(&(3, 2)));
        assert!(neighborhood(1).is_err());
        assert!(neighborhood(6).is_err());
    }

    #[test]
    fn k5_moves_match_brute_force_enumeration() {
        // Independent enumeration: the 2^5 set is the 32 primitive vectors
        // with components in [-3, 3] built from Farey neighbours of order 3.
        let mut expected: Vec<(i64, i64)> = Vec::new();
        for dx in -3i64..=3 {
            for dy in -3i64..=3 {
                if (dx, dy) != (0, 0) && gcd(dx, dy) == 1 && dx.abs().max(dy.abs()) <= 3 {
                    let (a, b) = (dx.abs().max(dy.abs()), dx.abs().min(dy.abs()));
                    // Primitive directions reached in three rounds: slopes 0, 1/3, 1/2, 2/3, 1.
                    if matches!((a, b), (1, 0) | (3, 1) | (2, 1) | (3, 2) | (1, 1)) {
                        expected.push((dx, dy));
                    }
                }
            }
        }
        let mut got = neighborhood(5).unwrap();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn grid_edge_weights() {
        let map = GridMap::empty(5, 5);
        let g = build_grid_graph(&map, 3, SQRT_2 / 4.0).unwrap();
        let c = g.vertex_at_cell(2, 2).unwrap();
        assert_eq!(g.neighbors(c).len(), 8);
        let diag = g.vertex_at_cell(3, 3).unwrap();
        assert!((g.edge_weight(c, diag).unwrap() - SQRT_2).abs() < 1e-12);

        let g5 = build_grid_graph(&GridMap::empty(7, 7), 5, 0.3).unwrap();
        let c = g5.vertex_at_cell(3, 3).unwrap();
        assert_eq!(g5.neighbors(c).len(), 32);
        let far = g5.vertex_at_cell(6, 4).unwrap();
        assert!((g5.edge_weight(c, far).unwrap() - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn corner_cutting_is_forbidden() {
        let mut map = GridMap::empty(3, 3);
        map.set_blocked(1, 0, true);
        let g = build_grid_graph(&map, 3, 0.3).unwrap();
        let a = g.vertex_at_cell(0, 0).unwrap();
        let b = g.vertex_at_cell(1, 1).unwrap();
        assert_eq!(g.edge_weight(a, b), None);
        let c = g.vertex_at_cell(0, 1).unwrap();
        let d = g.vertex_at_cell(1, 2).unwrap();
        assert!(g.edge_weight(c, d).is_some());
    }

    #[test]
    fn knight_move_checks_touched_cells() {
        let mut map = GridMap::empty(4, 3);
        // The (2,1) move from (0,0) grazes the corner between (1,0) and (1,1).
        map.set_blocked(1, 1, true);
        let g = build_grid_graph(&map, 4, 0.3).unwrap();
        let a = g.vertex_at_cell(0, 0).unwrap();
        let b = g.vertex_at_cell(2, 1).unwrap();
        assert_eq!(g.edge_weight(a, b), None);
    }

    #[test]
    fn rejects_bad_parameters() {
        let map = GridMap::empty(2, 2);
        assert!(build_grid_graph(&map, 6, 0.3).is_err());
        assert!(build_grid_graph(&map, 3, 0.8).is_err());
    }

    #[test]
    fn interior_cells_have_full_degree() {
        for k in 2..=5u32 {
            let g = build_grid_graph(&GridMap::empty(9, 9), k, 0.3).unwrap();
            let c = g.vertex_at_cell(4, 4).unwrap();
            assert_eq!(g.neighbors(c).len(), 1 << k, "k={k}");
        }
    }
}
