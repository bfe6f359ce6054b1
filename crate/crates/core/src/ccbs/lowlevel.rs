use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use crate::graph::{dh_estimate, Graph, HeuristicTable, VertexId};
use crate::motion::{Action, Interval, Plan, TimedAction};
use crate::sipp::{
    constrained_departure, departure_for_arrival, gsipp, sipp_plan, ConstraintSet, GoalSpec, SafeIntervalTable, Start,
};

/// Positive constraint: the plan must start the move `from -> to` at some
/// time inside `window`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmark {
    pub from: VertexId,
    pub to: VertexId,
    pub window: Interval,
}

/// Drops landmarks implied by another one: a window containing another
/// window of the same move is satisfied by any plan meeting the inner one.
pub fn normalize_landmarks(landmarks: &[Landmark]) -> Vec<Landmark> {
    let inside = |a: &Landmark, b: &Landmark| {
        (a.from, a.to) == (b.from, b.to) && b.window.lo <= a.window.lo && a.window.hi <= b.window.hi
    };
    let mut out: Vec<Landmark> = Vec::new();
    for (k, lm) in landmarks.iter().enumerate() {
        let implied = landmarks
            .iter()
            .enumerate()
            .any(|(m, other)| m != k && inside(other, lm) && (!inside(lm, other) || m < k));
        if !implied {
            out.push(*lm);
        }
    }
    out.sort_by(|a, b| {
        a.window
            .lo
            .total_cmp(&b.window.lo)
            .then_with(|| a.window.hi.total_cmp(&b.window.hi))
            .then_with(|| (a.from, a.to).cmp(&(b.from, b.to)))
    });
    out
}

/// Single-agent planning under negative constraints and move landmarks.
///
/// Landmarks are normalized first. When the remaining windows are pairwise
/// disjoint every valid plan meets them in window order, and the sequential
/// landmark search applies; otherwise [`landmark_product_search`] is used.
///
/// `goal` is the agent's goal-distance table; `pivots` drive the
/// differential heuristic toward intermediate landmark sources.
pub fn low_level_ds(
    graph: &Graph,
    agent: usize,
    start: VertexId,
    goal: &HeuristicTable,
    pivots: &[HeuristicTable],
    negatives: &ConstraintSet,
    landmarks: &[Landmark],
) -> Option<Plan> {
    let ordered = normalize_landmarks(landmarks);
    let chained = ordered.windows(2).all(|p| p[0].window.hi <= p[1].window.lo);
    if chained {
        sequential_landmarks(graph, agent, start, goal, pivots, negatives, &ordered)
    } else {
        landmark_product_search(graph, agent, start, goal, pivots, negatives, &ordered)
    }
}

/// Landmarks are visited in time order. For each one, GSIPP finds the
/// earliest arrival into every safe interval of the landmark's source that
/// overlaps its window; the landmark move is then appended, keeping for each
/// safe interval of the destination only the earliest arrival. A final SIPP
/// search leads from the surviving states to the goal.
pub fn sequential_landmarks(
    graph: &Graph,
    agent: usize,
    start: VertexId,
    goal: &HeuristicTable,
    pivots: &[HeuristicTable],
    negatives: &ConstraintSet,
    landmarks: &[Landmark],
) -> Option<Plan> {
    let table = SafeIntervalTable::new(negatives);
    let mut ordered = landmarks.to_vec();
    ordered.sort_by(|a, b| {
        a.window
            .lo
            .total_cmp(&b.window.lo)
            .then_with(|| a.window.hi.total_cmp(&b.window.hi))
            .then_with(|| (a.from, a.to).cmp(&(b.from, b.to)))
    });

    let mut starts = vec![Start::initial(start)];
    for lm in &ordered {
        let w = graph.edge_weight(lm.from, lm.to)?;
        let goals: Vec<GoalSpec> = table
            .of(lm.from)
            .iter()
            .filter(|iv| iv.overlaps(&lm.window))
            .map(|&interval| GoalSpec {
                vertex: lm.from,
                interval,
            })
            .collect();
        let h = |v: VertexId| dh_estimate(pivots, v, lm.from);
        let reached = gsipp(graph, negatives, &table, &starts, &goals, &h);

        let forbidden = negatives.move_blocks(lm.from, lm.to);
        let mut next: BTreeMap<usize, Start> = BTreeMap::new();
        for (spec, path) in goals.iter().zip(reached.paths) {
            let Some(path) = path else { continue };
            // Only the initial start has an empty prefix, and it stands at time 0.
            let arrive = path.last().map_or(0.0, TimedAction::end);
            for (k, target) in table.of(lm.to).iter().enumerate() {
                let earliest = arrive.max(lm.window.lo).max(departure_for_arrival(target.lo, w));
                let Some(dep) = constrained_departure(earliest, &spec.interval, forbidden) else {
                    continue;
                };
                if dep >= lm.window.hi || dep + w >= target.hi {
                    continue;
                }
                if next.get(&k).is_some_and(|s| s.time <= dep + w) {
                    continue;
                }
                let mut prefix = path.clone();
                if dep > arrive {
                    prefix.push(Action::wait(lm.from, dep - arrive).at(arrive));
                }
                prefix.push(Action::move_along(graph, lm.from, lm.to).ok()?.at(dep));
                next.insert(
                    k,
                    Start {
                        vertex: lm.to,
                        time: dep + w,
                        prefix,
                    },
                );
            }
        }
        if next.is_empty() {
            return None;
        }
        starts = next.into_values().collect();
    }

    let actions = sipp_plan(graph, negatives, &table, &starts, goal.target(), &|v| goal.get(v))?;
    Some(Plan { agent, start, actions })
}

#[derive(Debug)]
struct ProductNode {
    vertex: VertexId,
    interval: usize,
    mask: u64,
    g: f64,
    parent: Option<usize>,
    /// Departure time of the move that reached this node.
    departure: f64,
}

#[derive(Debug, PartialEq)]
struct ProductOpen {
    f: f64,
    g: f64,
    node: usize,
}

impl Eq for ProductOpen {}

impl Ord for ProductOpen {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for ProductOpen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact planning under arbitrary landmark sets: SIPP over
/// `(vertex, safe interval, met landmarks)`. For each transition the
/// candidate departures are the earliest feasible one and the earliest one
/// past every window bound of landmarks on that move, which covers every
/// distinct set of windows a departure can fall into.
pub fn landmark_product_search(
    graph: &Graph,
    agent: usize,
    start: VertexId,
    goal: &HeuristicTable,
    pivots: &[HeuristicTable],
    negatives: &ConstraintSet,
    landmarks: &[Landmark],
) -> Option<Plan> {
    assert!(landmarks.len() <= 64, "too many landmarks for one agent");
    let table = SafeIntervalTable::new(negatives);
    let full: u64 = if landmarks.len() == 64 {
        u64::MAX
    } else {
        (1u64 << landmarks.len()) - 1
    };
    let weights: Vec<f64> = landmarks
        .iter()
        .map(|lm| graph.edge_weight(lm.from, lm.to))
        .collect::<Option<_>>()?;
    let mut by_move: HashMap<(VertexId, VertexId), Vec<usize>> = HashMap::new();
    for (k, lm) in landmarks.iter().enumerate() {
        by_move.entry((lm.from, lm.to)).or_default().push(k);
    }
    // Lower bound on the remaining cost; infinite once an unmet window has passed.
    let h = |v: VertexId, mask: u64, g: f64| {
        let mut best = goal.get(v);
        for (k, lm) in landmarks.iter().enumerate() {
            if mask & (1 << k) != 0 {
                continue;
            }
            if g >= lm.window.hi {
                return f64::INFINITY;
            }
            let tail = weights[k] + goal.get(lm.to);
            best = best
                .max(dh_estimate(pivots, v, lm.from) + tail)
                .max(lm.window.lo - g + tail);
        }
        best
    };

    let mut nodes: Vec<ProductNode> = Vec::new();
    let mut best: HashMap<(VertexId, usize, u64), f64> = HashMap::new();
    let mut open = BinaryHeap::new();
    let first = table.locate(start, 0.0)?;
    let h0 = h(start, 0, 0.0);
    if !h0.is_finite() {
        return None;
    }
    nodes.push(ProductNode {
        vertex: start,
        interval: first,
        mask: 0,
        g: 0.0,
        parent: None,
        departure: 0.0,
    });
    best.insert((start, first, 0), 0.0);
    open.push(ProductOpen { f: h0, g: 0.0, node: 0 });

    let target = goal.target();
    while let Some(ProductOpen { node, .. }) = open.pop() {
        let (u, iv, mask, g) = {
            let n = &nodes[node];
            (n.vertex, n.interval, n.mask, n.g)
        };
        if best.get(&(u, iv, mask)).is_some_and(|&b| b < g) {
            continue;
        }
        let current = table.of(u)[iv];
        if u == target && mask == full && current.hi.is_infinite() {
            return Some(Plan {
                agent,
                start,
                actions: product_path(graph, &nodes, node),
            });
        }
        for edge in graph.neighbors(u) {
            let (v, w) = (edge.to, edge.weight);
            let forbidden = negatives.move_blocks(u, v);
            let here = by_move.get(&(u, v)).map_or(&[][..], Vec::as_slice);
            let mut bounds: Vec<f64> = here
                .iter()
                .flat_map(|&k| [landmarks[k].window.lo, landmarks[k].window.hi])
                .collect();
            bounds.sort_by(f64::total_cmp);
            for (j, target_iv) in table.of(v).iter().enumerate() {
                if target_iv.hi <= g + w {
                    continue;
                }
                let base = g.max(departure_for_arrival(target_iv.lo, w));
                let mut tried: Vec<f64> = Vec::new();
                for lb in std::iter::once(base).chain(bounds.iter().copied().filter(|&b| b > base)) {
                    let Some(dep) = constrained_departure(lb, &current, forbidden) else {
                        continue;
                    };
                    if dep + w >= target_iv.hi || tried.contains(&dep) {
                        continue;
                    }
                    tried.push(dep);
                    let met = here
                        .iter()
                        .filter(|&&k| landmarks[k].window.contains(dep))
                        .fold(mask, |m, &k| m | (1 << k));
                    let arrival = dep + w;
                    let key = (v, j, met);
                    if best.get(&key).is_some_and(|&b| b <= arrival) {
                        continue;
                    }
                    let hv = h(v, met, arrival);
                    if !hv.is_finite() {
                        continue;
                    }
                    best.insert(key, arrival);
                    nodes.push(ProductNode {
                        vertex: v,
                        interval: j,
                        mask: met,
                        g: arrival,
                        parent: Some(node),
                        departure: dep,
                    });
                    open.push(ProductOpen {
                        f: arrival + hv,
                        g: arrival,
                        node: nodes.len() - 1,
                    });
                }
            }
        }
    }
    None
}

fn product_path(graph: &Graph, nodes: &[ProductNode], last: usize) -> Vec<TimedAction> {
    let mut out = Vec::new();
    let mut cursor = last;
    while let Some(parent) = nodes[cursor].parent {
        let (p, n) = (&nodes[parent], &nodes[cursor]);
        out.push(
            Action::move_along(graph, p.vertex, n.vertex)
                .expect("searched along graph edges")
                .at(n.departure),
        );
        if n.departure > p.g {
            out.push(Action::wait(p.vertex, n.departure - p.g).at(p.g));
        }
        cursor = parent;
    }
    out.reverse();
    out
}
