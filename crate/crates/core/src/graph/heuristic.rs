use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Graph, VertexId};

/// Exact cost-to-go to one target vertex; `f64::INFINITY` where unreachable.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicTable {
    target: VertexId,
    dist: Vec<f64>,
}

impl HeuristicTable {
    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.dist[v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.dist
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, VertexId);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source Dijkstra from `goal`. Edges are symmetric, so this is also
/// the distance *to* the goal.
pub fn dijkstra_heuristic(graph: &Graph, goal: VertexId) -> HeuristicTable {
    let mut dist = vec![f64::INFINITY; graph.num_vertices()];
    let mut heap = BinaryHeap::new();
    dist[goal] = 0.0;
    heap.push(Entry(0.0, goal));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for e in graph.neighbors(u) {
            let nd = d + e.weight;
            if nd < dist[e.to] {
                dist[e.to] = nd;
                heap.push(Entry(nd, e.to));
            }
        }
    }
    HeuristicTable { target: goal, dist }
}

/// Differential heuristic: `max_p |h_p(v) - h_p(target)|` over the pivot
/// tables. Pivots that reach neither vertex contribute nothing; a pivot that
/// reaches exactly one of them proves the pair disconnected.
pub fn dh_estimate(tables: &[HeuristicTable], v: VertexId, target: VertexId) -> f64 {
    if v == target {
        return 0.0;
    }
    let mut best: f64 = 0.0;
    for table in tables {
        let (a, b) = (table.get(v), table.get(target));
        match (a.is_finite(), b.is_finite()) {
            (true, true) => best = best.max((a - b).abs()),
            (false, false) => {}
            _ => return f64::INFINITY,
        }
    }
    best
}
