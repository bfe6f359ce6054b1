//! Instance generators shared by the integration tests.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use ccbs_core::ccbs::Landmark;
use ccbs_core::graph::{build_grid_graph, random_scenario, Graph, GridMap, VertexId};
use ccbs_core::motion::{ActionKind, Interval, Plan};
use ccbs_core::sipp::ConstraintSet;
use ccbs_core::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `width x height` map with each cell blocked with probability `density`.
pub fn random_map(width: usize, height: usize, density: f64, seed: u64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut map = GridMap::empty(width, height);
    for y in 0..height {
        for x in 0..width {
            if rng.gen::<f64>() < density {
                map.set_blocked(x, y, true);
            }
        }
    }
    map
}

/// Random grid instance with `n` agents whose start/goal pairs are connected.
/// Returns `None` when the map cannot host that many pairs.
pub fn random_instance(map: &GridMap, k: u32, n: usize, radius: f64, seed: u64) -> Option<Instance> {
    let graph = build_grid_graph(map, k, radius).ok()?;
    let scen = random_scenario(&graph, "random", n, seed).ok()?;
    Instance::from_scen(graph, &scen, n, radius).ok()
}

/// Optimal single-agent cost under `negatives` and `landmarks` by uniform-cost
/// enumeration of `(vertex, time, met landmarks)`. Departures are tried now
/// and at every constraint bound shifted back by any sum of up to three edge
/// weights, which covers waiting to arrive exactly when a vertex frees up.
pub fn enumerate_optimum(
    graph: &Graph,
    start: VertexId,
    goal: VertexId,
    negatives: &ConstraintSet,
    landmarks: &[Landmark],
    horizon: f64,
) -> Option<f64> {
    let mut bounds: Vec<f64> = Vec::new();
    let mut push = |iv: &Interval| bounds.extend([iv.lo, iv.hi].into_iter().filter(|t| t.is_finite()));
    for v in 0..graph.num_vertices() {
        negatives.vertex_blocks(v).iter().for_each(&mut push);
        for e in graph.neighbors(v) {
            negatives.move_blocks(v, e.to).iter().for_each(&mut push);
        }
    }
    landmarks.iter().for_each(|lm| push(&lm.window));

    let mut weights: Vec<f64> = graph.edges().map(|(_, _, w)| w).collect();
    weights.sort_by(f64::total_cmp);
    weights.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut shifts = vec![0.0];
    for _ in 0..3 {
        let grown: Vec<f64> = shifts.iter().flat_map(|s| weights.iter().map(move |w| s + w)).collect();
        shifts.extend(grown);
        shifts.sort_by(f64::total_cmp);
        shifts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    }
    let mut cands: Vec<f64> = bounds
        .iter()
        .flat_map(|b| shifts.iter().map(move |s| b - s))
        .filter(|&t| (0.0..=horizon).contains(&t))
        .collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let full = (1u32 << landmarks.len()) - 1;
    let blocked_at = |v: VertexId, t: f64| negatives.vertex_blocks(v).iter().any(|b| b.contains(t));
    let mut seen: HashSet<(VertexId, i64, u32)> = HashSet::new();
    let mut open: BinaryHeap<Reverse<(OrdF64, VertexId, u32)>> = BinaryHeap::new();
    if !blocked_at(start, 0.0) {
        open.push(Reverse((OrdF64(0.0), start, 0)));
    }
    while let Some(Reverse((OrdF64(t), v, mask))) = open.pop() {
        if !seen.insert((v, (t * 1e7).round() as i64, mask)) {
            continue;
        }
        if v == goal && mask == full && negatives.vertex_blocks(v).iter().all(|b| b.hi <= t) {
            return Some(t);
        }
        let deps = std::iter::once(t).chain(cands.iter().copied().filter(|&c| c > t + 1e-12));
        for dep in deps {
            // Waiting over [t, dep] must avoid every block of v.
            if negatives.vertex_blocks(v).iter().any(|b| b.lo <= dep && t < b.hi) {
                break;
            }
            for e in graph.neighbors(v) {
                if negatives.move_blocks(v, e.to).iter().any(|b| b.contains(dep)) {
                    continue;
                }
                let arrival = dep + e.weight;
                if arrival > horizon || blocked_at(e.to, arrival) {
                    continue;
                }
                let mut met = mask;
                for (k, lm) in landmarks.iter().enumerate() {
                    if (lm.from, lm.to) == (v, e.to) && lm.window.contains(dep) {
                        met |= 1 << k;
                    }
                }
                open.push(Reverse((OrdF64(arrival), e.to, met)));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Checks that `plan` is a connected walk from `start` that respects every
/// negative constraint and performs every landmark.
pub fn respects(
    graph: &Graph,
    plan: &Plan,
    start: VertexId,
    negatives: &ConstraintSet,
    landmarks: &[Landmark],
) -> Result<(), String> {
    let mut at = start;
    let mut t = 0.0;
    let mut arrived = 0.0;
    for ta in &plan.actions {
        if (ta.start - t).abs() > 1e-9 {
            return Err(format!("gap before action at {}", ta.start));
        }
        match ta.kind() {
            ActionKind::Wait { at: w } if w != at => return Err(format!("wait at {w} while at {at}")),
            ActionKind::Wait { .. } => {}
            ActionKind::Move { from, to } => {
                if from != at || graph.edge_weight(from, to).is_none() {
                    return Err(format!("bad move {from}->{to} from {at}"));
                }
                if negatives.move_blocks(from, to).iter().any(|b| b.contains(ta.start)) {
                    return Err(format!(
                        "move {from}->{to} starts in a forbidden window at {}",
                        ta.start
                    ));
                }
                if negatives
                    .vertex_blocks(at)
                    .iter()
                    .any(|b| b.lo <= ta.start && arrived < b.hi)
                {
                    return Err(format!("occupies {at} over [{arrived}, {}] inside a block", ta.start));
                }
                at = to;
                arrived = ta.end();
            }
        }
        t = ta.end();
    }
    if negatives.vertex_blocks(at).iter().any(|b| arrived < b.hi) {
        return Err(format!("parks at {at} from {arrived} through a block"));
    }
    for lm in landmarks {
        if !plan.performs(
            ActionKind::Move {
                from: lm.from,
                to: lm.to,
            },
            &lm.window,
        ) {
            return Err(format!(
                "landmark {}->{} in [{}, {}) missed",
                lm.from, lm.to, lm.window.lo, lm.window.hi
            ));
        }
    }
    Ok(())
}
