//! Safe-interval path planning for a single agent under negative
//! constraints, including the generalized multi-start / multi-goal search.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::graph::{Graph, VertexId};
use crate::motion::{Action, Interval, TimedAction};

/// Negative constraints of one agent: time windows in which a vertex may
/// not be occupied, and windows in which a move may not start.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSet {
    vertex: HashMap<VertexId, Vec<Interval>>,
    moves: HashMap<(VertexId, VertexId), Vec<Interval>>,
}

fn insert_merged(list: &mut Vec<Interval>, iv: Interval) {
    list.push(iv);
    list.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut merged: Vec<Interval> = Vec::with_capacity(list.len());
    for &iv in list.iter() {
        match merged.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => merged.push(iv),
        }
    }
    *list = merged;
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn block_vertex(&mut self, v: VertexId, window: Interval) {
        insert_merged(self.vertex.entry(v).or_default(), window);
    }

    pub fn forbid_move(&mut self, from: VertexId, to: VertexId, window: Interval) {
        insert_merged(self.moves.entry((from, to)).or_default(), window);
    }

    /// Sorted, disjoint occupancy blocks of `v`.
    pub fn vertex_blocks(&self, v: VertexId) -> &[Interval] {
        self.vertex.get(&v).map_or(&[], Vec::as_slice)
    }

    /// Sorted, disjoint forbidden departure windows of the move `from -> to`.
    pub fn move_blocks(&self, from: VertexId, to: VertexId) -> &[Interval] {
        self.moves.get(&(from, to)).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.vertex.is_empty() && self.moves.is_empty()
    }

    pub fn blocked_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex.keys().copied()
    }
}

/// Complement of the union of `blocks` within `[0, inf)`.
pub fn compute_safe_intervals(blocks: &[Interval]) -> Vec<Interval> {
    let mut sorted = blocks.to_vec();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut safe = Vec::new();
    let mut t = 0.0f64;
    for b in sorted {
        if b.lo > t {
            safe.push(Interval::new(t, b.lo));
        }
        t = t.max(b.hi);
        if t.is_infinite() {
            return safe;
        }
    }
    safe.push(Interval::new(t, f64::INFINITY));
    safe
}

/// Earliest `t >= arrive` outside every forbidden window, provided the agent
/// can still be waiting inside `current` at that time.
pub fn constrained_departure(arrive: f64, current: &Interval, forbidden: &[Interval]) -> Option<f64> {
    let mut t = arrive;
    while let Some(f) = forbidden.iter().find(|f| f.contains(t)) {
        t = f.hi;
    }
    (t < current.hi).then_some(t)
}

/// Earliest departure over an edge of length `w` whose arrival, as computed
/// in floating point, is not before `lo`.
pub fn departure_for_arrival(lo: f64, w: f64) -> f64 {
    let mut t = lo - w;
    while t + w < lo {
        t = t.next_up();
    }
    t
}

const ALWAYS: [Interval; 1] = [Interval::ALWAYS];

/// Per-vertex safe intervals induced by a [`ConstraintSet`].
#[derive(Debug, Clone)]
pub struct SafeIntervalTable {
    intervals: HashMap<VertexId, Vec<Interval>>,
}

impl SafeIntervalTable {
    pub fn new(constraints: &ConstraintSet) -> Self {
        let intervals = constraints
            .blocked_vertices()
            .map(|v| (v, compute_safe_intervals(constraints.vertex_blocks(v))))
            .collect();
        SafeIntervalTable { intervals }
    }

    pub fn of(&self, v: VertexId) -> &[Interval] {
        self.intervals.get(&v).map_or(&ALWAYS, Vec::as_slice)
    }

    /// Index of the safe interval of `v` containing `t`.
    pub fn locate(&self, v: VertexId, t: f64) -> Option<usize> {
        self.of(v).iter().position(|iv| iv.contains(t))
    }
}

/// A search entry point: the agent stands at `vertex` at `time`, having
/// executed `prefix` (which ends at `time`).
#[derive(Debug, Clone, PartialEq)]
pub struct Start {
    pub vertex: VertexId,
    pub time: f64,
    pub prefix: Vec<TimedAction>,
}

impl Start {
    pub fn initial(vertex: VertexId) -> Self {
        Start {
            vertex,
            time: 0.0,
            prefix: Vec::new(),
        }
    }
}

/// Reach `vertex` at some time within `interval`, which must lie inside a
/// single safe interval of the vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalSpec {
    pub vertex: VertexId,
    pub interval: Interval,
}

#[derive(Debug, Clone, Default)]
pub struct GsippOutput {
    /// Complete action sequence (start prefix included) per goal, ending at
    /// the goal vertex at the earliest feasible arrival time.
    pub paths: Vec<Option<Vec<TimedAction>>>,
    pub expansions: usize,
    /// `f` of every expanded state, in expansion order.
    pub expanded_f: Vec<f64>,
}

struct Node {
    vertex: VertexId,
    interval: usize,
    g: f64,
    parent: Option<usize>,
    start: usize,
    departure: f64,
}

#[derive(PartialEq)]
struct Open {
    f: f64,
    g: f64,
    vertex: VertexId,
    interval: usize,
    node: usize,
}

impl Eq for Open {}

impl Ord for Open {
    // BinaryHeap is a max-heap: "greater" pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.vertex.cmp(&self.vertex))
            .then_with(|| other.interval.cmp(&self.interval))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Best-first search over `(vertex, safe interval)` states seeded with every
/// start; stops once every goal state has been expanded or the open list is
/// exhausted. `h` must be consistent and admissible for all goals.
pub fn gsipp(
    graph: &Graph,
    constraints: &ConstraintSet,
    table: &SafeIntervalTable,
    starts: &[Start],
    goals: &[GoalSpec],
    h: &dyn Fn(VertexId) -> f64,
) -> GsippOutput {
    let mut out = GsippOutput {
        paths: vec![None; goals.len()],
        ..Default::default()
    };
    // Goal state (vertex, interval index) -> goal indices.
    let mut goal_states: HashMap<(VertexId, usize), Vec<usize>> = HashMap::new();
    for (k, goal) in goals.iter().enumerate() {
        if let Some(idx) = table
            .of(goal.vertex)
            .iter()
            .position(|iv| iv.lo <= goal.interval.lo && goal.interval.hi <= iv.hi)
        {
            goal_states.entry((goal.vertex, idx)).or_default().push(k);
        }
    }
    let mut remaining = goal_states.len();
    if remaining == 0 {
        return out;
    }

    let mut nodes: Vec<Node> = Vec::new();
    let mut best: HashMap<(VertexId, usize), f64> = HashMap::new();
    let mut closed: HashMap<(VertexId, usize), usize> = HashMap::new();
    let mut open = BinaryHeap::new();

    for (s, start) in starts.iter().enumerate() {
        let Some(idx) = table.locate(start.vertex, start.time) else {
            continue;
        };
        let hv = h(start.vertex);
        if !hv.is_finite() {
            continue;
        }
        let key = (start.vertex, idx);
        if best.get(&key).is_some_and(|&g| g <= start.time) {
            continue;
        }
        best.insert(key, start.time);
        nodes.push(Node {
            vertex: start.vertex,
            interval: idx,
            g: start.time,
            parent: None,
            start: s,
            departure: start.time,
        });
        open.push(Open {
            f: start.time + hv,
            g: start.time,
            vertex: start.vertex,
            interval: idx,
            node: nodes.len() - 1,
        });
    }

    while let Some(Open { f, node, .. }) = open.pop() {
        let (v, idx, g) = (nodes[node].vertex, nodes[node].interval, nodes[node].g);
        if closed.contains_key(&(v, idx)) || best.get(&(v, idx)).is_some_and(|&b| g > b) {
            continue;
        }
        closed.insert((v, idx), node);
        out.expansions += 1;
        out.expanded_f.push(f);
        if goal_states.contains_key(&(v, idx)) {
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }

        let here = table.of(v)[idx];
        for e in graph.neighbors(v) {
            let forbidden = constraints.move_blocks(v, e.to);
            let hv = h(e.to);
            if !hv.is_finite() {
                continue;
            }
            for (j, target) in table.of(e.to).iter().enumerate() {
                if target.hi <= g + e.weight {
                    continue;
                }
                if target.lo >= here.hi + e.weight {
                    break;
                }
                if closed.contains_key(&(e.to, j)) {
                    continue;
                }
                let Some(dep) =
                    constrained_departure(g.max(departure_for_arrival(target.lo, e.weight)), &here, forbidden)
                else {
                    continue;
                };
                let arrival = dep + e.weight;
                if arrival >= target.hi {
                    continue;
                }
                let key = (e.to, j);
                if best.get(&key).is_some_and(|&b| b <= arrival) {
                    continue;
                }
                best.insert(key, arrival);
                nodes.push(Node {
                    vertex: e.to,
                    interval: j,
                    g: arrival,
                    parent: Some(node),
                    start: nodes[node].start,
                    departure: dep,
                });
                open.push(Open {
                    f: arrival + hv,
                    g: arrival,
                    vertex: e.to,
                    interval: j,
                    node: nodes.len() - 1,
                });
            }
        }
    }

    for (state, ks) in &goal_states {
        let Some(&node) = closed.get(state) else {
            continue;
        };
        let path = reconstruct(graph, &nodes, starts, node);
        for &k in ks {
            let mut p = path.clone();
            let arrive = nodes[node].g;
            if goals[k].interval.lo > arrive {
                p.push(Action::wait(goals[k].vertex, goals[k].interval.lo - arrive).at(arrive));
            }
            if goals[k]
                .interval
                .contains(p.last().map_or(arrive, TimedAction::end).max(arrive))
            {
                out.paths[k] = Some(p);
            }
        }
    }
    out
}

fn reconstruct(graph: &Graph, nodes: &[Node], starts: &[Start], mut node: usize) -> Vec<TimedAction> {
    let mut rev = Vec::new();
    while let Some(parent) = nodes[node].parent {
        let (p, n) = (&nodes[parent], &nodes[node]);
        let mv = Action::move_along(graph, p.vertex, n.vertex).expect("search follows graph edges");
        rev.push(mv.at(n.departure));
        if n.departure > p.g {
            rev.push(Action::wait(p.vertex, n.departure - p.g).at(p.g));
        }
        node = parent;
    }
    let mut path = starts[nodes[node].start].prefix.clone();
    path.extend(rev.into_iter().rev());
    path
}

/// Plan to `goal` that can then wait there forever: the target is the last
/// safe interval of the goal, which must be unbounded.
pub fn sipp_plan(
    graph: &Graph,
    constraints: &ConstraintSet,
    table: &SafeIntervalTable,
    starts: &[Start],
    goal: VertexId,
    h: &dyn Fn(VertexId) -> f64,
) -> Option<Vec<TimedAction>> {
    let target = table.of(goal).len().checked_sub(1)?;
    if table.of(goal)[target].hi.is_finite() {
        return None;
    }
    let mut nodes: Vec<Node> = Vec::new();
    let mut best: HashMap<(VertexId, usize), f64> = HashMap::new();
    let mut closed: HashMap<(VertexId, usize), usize> = HashMap::new();
    let mut open = BinaryHeap::new();
    for (s, start) in starts.iter().enumerate() {
        let Some(idx) = table.locate(start.vertex, start.time) else {
            continue;
        };
        let hv = h(start.vertex);
        if !hv.is_finite() || best.get(&(start.vertex, idx)).is_some_and(|&g| g <= start.time) {
            continue;
        }
        best.insert((start.vertex, idx), start.time);
        nodes.push(Node {
            vertex: start.vertex,
            interval: idx,
            g: start.time,
            parent: None,
            start: s,
            departure: start.time,
        });
        open.push(Open {
            f: start.time + hv,
            g: start.time,
            vertex: start.vertex,
            interval: idx,
            node: nodes.len() - 1,
        });
    }

    while let Some(Open { node, .. }) = open.pop() {
        let (v, idx, g) = (nodes[node].vertex, nodes[node].interval, nodes[node].g);
        if closed.contains_key(&(v, idx)) || best.get(&(v, idx)).is_some_and(|&b| g > b) {
            continue;
        }
        closed.insert((v, idx), node);
        if (v, idx) == (goal, target) {
            return Some(reconstruct(graph, &nodes, starts, node));
        }
        let here = table.of(v)[idx];
        for e in graph.neighbors(v) {
            let hv = h(e.to);
            if !hv.is_finite() {
                continue;
            }
            for (j, iv) in table.of(e.to).iter().enumerate() {
                if iv.hi <= g + e.weight || closed.contains_key(&(e.to, j)) {
                    continue;
                }
                if iv.lo >= here.hi + e.weight {
                    break;
                }
                let Some(dep) = constrained_departure(
                    g.max(departure_for_arrival(iv.lo, e.weight)),
                    &here,
                    constraints.move_blocks(v, e.to),
                ) else {
                    continue;
                };
                let arrival = dep + e.weight;
                if arrival >= iv.hi || best.get(&(e.to, j)).is_some_and(|&b| b <= arrival) {
                    continue;
                }
                best.insert((e.to, j), arrival);
                nodes.push(Node {
                    vertex: e.to,
                    interval: j,
                    g: arrival,
                    parent: Some(node),
                    start: nodes[node].start,
                    departure: dep,
                });
                open.push(Open {
                    f: arrival + hv,
                    g: arrival,
                    vertex: e.to,
                    interval: j,
                    node: nodes.len() - 1,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_grid_graph, dijkstra_heuristic, GridMap, Point};

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn safe_interval_examples() {
        assert_eq!(compute_safe_intervals(&[]), vec![Interval::ALWAYS]);
        assert_eq!(
            compute_safe_intervals(&[iv(3.0, 5.0)]),
            vec![iv(0.0, 3.0), iv(5.0, f64::INFINITY)]
        );
        assert_eq!(
            compute_safe_intervals(&[iv(3.0, 6.0), iv(1.0, 4.0)]),
            vec![iv(0.0, 1.0), iv(6.0, f64::INFINITY)]
        );
        assert_eq!(compute_safe_intervals(&[iv(0.0, 2.0)]), vec![iv(2.0, f64::INFINITY)]);
        assert_eq!(compute_safe_intervals(&[iv(1.0, f64::INFINITY)]), vec![iv(0.0, 1.0)]);
    }

    #[test]
    fn departure_examples() {
        assert_eq!(constrained_departure(3.0, &Interval::ALWAYS, &[]), Some(3.0));
        assert_eq!(
            constrained_departure(3.0, &Interval::ALWAYS, &[iv(2.0, 4.0)]),
            Some(4.0)
        );
        assert_eq!(constrained_departure(3.0, &iv(0.0, 7.0), &[iv(2.0, 9.0)]), None);
        assert_eq!(
            constrained_departure(3.0, &Interval::ALWAYS, &[iv(2.0, 4.0), iv(4.0, 5.0)]),
            Some(5.0)
        );
    }

    #[test]
    fn departure_lands_inside_the_target_interval() {
        let lo = 3.864420387060163;
        for w in [1.0, std::f64::consts::SQRT_2, 5f64.sqrt()] {
            let t = departure_for_arrival(lo, w);
            assert!(t + w >= lo && t <= lo - w + 1e-12);
        }
        assert!((lo - std::f64::consts::SQRT_2) + std::f64::consts::SQRT_2 < lo);
    }

    #[test]
    fn merged_constraints() {
        let mut c = ConstraintSet::new();
        c.block_vertex(1, iv(3.0, 6.0));
        c.block_vertex(1, iv(1.0, 4.0));
        c.block_vertex(1, iv(8.0, 9.0));
        assert_eq!(c.vertex_blocks(1), &[iv(1.0, 6.0), iv(8.0, 9.0)]);
        assert!(c.vertex_blocks(0).is_empty());
    }

    fn line(n: usize) -> Graph {
        let pts = (0..n).map(|i| Point::new(i as f64, 0.0)).collect();
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(pts, &edges).unwrap()
    }

    fn end(p: &[TimedAction]) -> f64 {
        p.last().map_or(0.0, TimedAction::end)
    }

    #[test]
    fn unconstrained_grid_plan() {
        let g = build_grid_graph(&GridMap::empty(5, 5), 2, 0.3).unwrap();
        let (s, t) = (g.vertex_at_cell(0, 0).unwrap(), g.vertex_at_cell(3, 0).unwrap());
        let h = dijkstra_heuristic(&g, t);
        let c = ConstraintSet::new();
        let p = sipp_plan(&g, &c, &SafeIntervalTable::new(&c), &[Start::initial(s)], t, &|v| {
            h.get(v)
        })
        .unwrap();
        assert_eq!(end(&p), 3.0);
        let stay = sipp_plan(&g, &c, &SafeIntervalTable::new(&c), &[Start::initial(t)], t, &|v| {
            h.get(v)
        })
        .unwrap();
        assert!(stay.is_empty());
    }

    #[test]
    fn goal_block_forces_late_arrival() {
        let g = line(3);
        let h = dijkstra_heuristic(&g, 2);
        let mut c = ConstraintSet::new();
        c.block_vertex(2, iv(1.0, 4.5));
        let p = sipp_plan(&g, &c, &SafeIntervalTable::new(&c), &[Start::initial(0)], 2, &|v| {
            h.get(v)
        })
        .unwrap();
        assert_eq!(end(&p), 4.5);
        for ta in &p {
            assert!(!(ta.kind().target() == 2 && ta.end() < 4.5));
        }
    }

    #[test]
    fn two_goal_intervals_two_plans() {
        // Vertex 1 is blocked in [2, 4): one plan arrives before, one after.
        let g = line(3);
        let mut c = ConstraintSet::new();
        c.block_vertex(1, iv(2.0, 4.0));
        let table = SafeIntervalTable::new(&c);
        let goals: Vec<_> = table
            .of(1)
            .iter()
            .map(|&interval| GoalSpec { vertex: 1, interval })
            .collect();
        let out = gsipp(&g, &c, &table, &[Start::initial(0)], &goals, &|_| 0.0);
        let a = out.paths[0].as_ref().unwrap();
        let b = out.paths[1].as_ref().unwrap();
        assert_eq!(end(a), 1.0);
        assert_eq!(end(b), 4.0);
    }

    #[test]
    fn unreachable_goal_is_none() {
        let g = line(3);
        let mut c = ConstraintSet::new();
        c.forbid_move(1, 2, Interval::ALWAYS);
        let table = SafeIntervalTable::new(&c);
        let out = gsipp(
            &g,
            &c,
            &table,
            &[Start::initial(0)],
            &[GoalSpec {
                vertex: 2,
                interval: Interval::ALWAYS,
            }],
            &|_| 0.0,
        );
        assert_eq!(out.paths, vec![None]);
        assert!(sipp_plan(&g, &c, &table, &[Start::initial(0)], 2, &|_| 0.0).is_none());
    }

    #[test]
    fn forbidden_move_delays_departure() {
        let g = line(2);
        let mut c = ConstraintSet::new();
        c.forbid_move(0, 1, iv(0.0, 0.75));
        let p = sipp_plan(&g, &c, &SafeIntervalTable::new(&c), &[Start::initial(0)], 1, &|_| 0.0).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].action, Action::wait(0, 0.75));
        assert_eq!(p[1].start, 0.75);
        assert_eq!(end(&p), 1.75);
    }
}
