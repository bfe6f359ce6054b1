//! Weighted geometric graphs.
//!
//! Vertices carry planar coordinates and every edge weight is the Euclidean
//! length of the edge, which at unit speed is also the move duration.

mod grid;
mod heuristic;
mod roadmap;
mod scen;

pub use grid::{build_grid_graph, load_movingai_map, neighborhood, GridMap};
pub use heuristic::{dh_estimate, dijkstra_heuristic, HeuristicTable};
pub use roadmap::{generate_roadmap, load_roadmap, serialize_roadmap, RoadmapParams};
pub use scen::{load_scen, random_scenario, write_scen, ScenEntry};

use crate::{Error, Result};

pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub to: VertexId,
    pub weight: f64,
}

/// Maps grid cells to vertices for graphs built from a [`GridMap`].
#[derive(Debug, Clone, PartialEq)]
pub struct CellIndex {
    width: usize,
    height: usize,
    vertex: Vec<Option<VertexId>>,
}

impl CellIndex {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn vertex(&self, x: usize, y: usize) -> Option<VertexId> {
        if x >= self.width || y >= self.height {
            return None;
        }
        self.vertex[y * self.width + x]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    points: Vec<Point>,
    adjacency: Vec<Vec<Edge>>,
    cells: Option<CellIndex>,
}

impl Graph {
    pub fn new(points: Vec<Point>) -> Self {
        let adjacency = vec![Vec::new(); points.len()];
        Graph {
            points,
            adjacency,
            cells: None,
        }
    }

    /// Builds a graph from vertex coordinates and undirected edges.
    pub fn from_edges(points: Vec<Point>, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut graph = Graph::new(points);
        for &(u, v) in edges {
            graph.add_edge(u, v)?;
        }
        Ok(graph)
    }

    /// Adds the undirected edge `u`-`v` with Euclidean weight. Adding an
    /// existing edge again is a no-op.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        let n = self.points.len();
        if u >= n || v >= n {
            return Err(Error::invalid(format!("edge {u}-{v} references a missing vertex")));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {u}")));
        }
        let weight = self.points[u].distance(self.points[v]);
        if weight <= 0.0 {
            return Err(Error::invalid(format!("vertices {u} and {v} coincide")));
        }
        if self.edge_weight(u, v).is_some() {
            return Ok(());
        }
        self.adjacency[u].push(Edge { to: v, weight });
        self.adjacency[v].push(Edge { to: u, weight });
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn point(&self, v: VertexId) -> Point {
        self.points[v]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn neighbors(&self, v: VertexId) -> &[Edge] {
        &self.adjacency[v]
    }

    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<f64> {
        self.adjacency.get(u)?.iter().find(|e| e.to == v).map(|e| e.weight)
    }

    pub fn cells(&self) -> Option<&CellIndex> {
        self.cells.as_ref()
    }

    /// Vertex at grid cell `(x, y)`; only defined for grid graphs.
    pub fn vertex_at_cell(&self, x: usize, y: usize) -> Option<VertexId> {
        self.cells.as_ref()?.vertex(x, y)
    }

    pub(crate) fn set_cells(&mut self, cells: CellIndex) {
        self.cells = Some(cells);
    }

    /// Undirected edges as `(u, v)` with `u < v`, in adjacency order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, edges)| edges.iter().filter(move |e| u < e.to).map(move |e| (u, e.to, e.weight)))
    }

    /// Connected component labels, numbered in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let n = self.num_vertices();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for root in 0..n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = next;
            stack.push(root);
            while let Some(u) = stack.pop() {
                for e in &self.adjacency[u] {
                    if label[e.to] == usize::MAX {
                        label[e.to] = next;
                        stack.push(e.to);
                    }
                }
            }
            next += 1;
        }
        label
    }
}
