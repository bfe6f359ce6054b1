//! Independent checks on solver output, plus a brute-force optimum for tiny
//! unit-grid instances.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use crate::graph::{dijkstra_heuristic, Graph, Point, VertexId};
use crate::instance::Instance;
use crate::motion::{collides, ActionKind, Plan};
use crate::{Error, Result, DEFAULT_RADIUS, EPS};

/// Sampling step of the dense cross-check.
pub const SAMPLE_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Collision,
    Discontinuity,
    WrongEndpoint,
    BadDuration,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Collision => "collision",
            ViolationKind::Discontinuity => "discontinuity",
            ViolationKind::WrongEndpoint => "wrong-endpoint",
            ViolationKind::BadDuration => "bad-duration",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub agents: Vec<usize>,
    pub time: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, kind: ViolationKind, agents: Vec<usize>, time: f64, detail: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            agents,
            time,
            detail: detail.into(),
        });
    }
}

/// One line per violation, `ok` when there are none.
impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            let agents: Vec<String> = v.agents.iter().map(usize::to_string).collect();
            writeln!(f, "{} agents={} t={:.6} {}", v.kind, agents.join(","), v.time, v.detail)?;
        }
        Ok(())
    }
}

fn check_plan(graph: &Graph, i: usize, plan: &Plan, start: VertexId, goal: VertexId, report: &mut ValidationReport) {
    if plan.start != start {
        report.push(
            ViolationKind::WrongEndpoint,
            vec![i],
            0.0,
            format!("starts at {} instead of {start}", plan.start),
        );
    }
    let mut t = 0.0;
    let mut at = plan.start;
    for ta in &plan.actions {
        if (ta.start - t).abs() > EPS {
            report.push(
                ViolationKind::Discontinuity,
                vec![i],
                ta.start,
                format!("action starts at {} but previous ended at {t}", ta.start),
            );
        }
        if ta.kind().source() != at {
            report.push(
                ViolationKind::Discontinuity,
                vec![i],
                ta.start,
                format!("action leaves {} while the agent is at {at}", ta.kind().source()),
            );
        }
        let d = ta.action.duration;
        match ta.kind() {
            ActionKind::Move { from, to } => match graph.edge_weight(from, to) {
                Some(w) if (w - d).abs() <= EPS => {}
                Some(w) => report.push(
                    ViolationKind::BadDuration,
                    vec![i],
                    ta.start,
                    format!("move {from}->{to} takes {d}, edge weight is {w}"),
                ),
                None => report.push(
                    ViolationKind::BadDuration,
                    vec![i],
                    ta.start,
                    format!("move {from}->{to} is not an edge"),
                ),
            },
            ActionKind::Wait { at } => {
                if !(d > 0.0 && d.is_finite()) {
                    report.push(
                        ViolationKind::BadDuration,
                        vec![i],
                        ta.start,
                        format!("wait at {at} lasts {d}"),
                    );
                }
            }
        }
        t = ta.end();
        at = ta.kind().target();
    }
    if at != goal {
        report.push(
            ViolationKind::WrongEndpoint,
            vec![i],
            t,
            format!("ends at {at} instead of {goal}"),
        );
    }
}

/// Positions of `plan` at `0, dt, 2dt, ...` for `count` samples.
fn sample(graph: &Graph, plan: &Plan, dt: f64, count: usize) -> Vec<Point> {
    let timeline: Vec<_> = plan.timeline().collect();
    let mut k = 0;
    (0..count)
        .map(|s| {
            let t = s as f64 * dt;
            while k + 1 < timeline.len() && t > timeline[k].end() {
                k += 1;
            }
            let ta = &timeline[k];
            crate::motion::position_at(ta, graph, t.clamp(ta.start, ta.end())).expect("clamped into span")
        })
        .collect()
}

/// Structural checks on every plan, analytic pairwise collision checks
/// (terminal waits included), and a dense sampling cross-check. A sampling
/// hit that the analytic test missed is reported as a collision too.
pub fn validate_solution(instance: &Instance, plans: &[Plan]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let graph = &instance.graph;
    if plans.len() != instance.num_agents() {
        report.push(
            ViolationKind::WrongEndpoint,
            Vec::new(),
            0.0,
            format!("{} plans for {} agents", plans.len(), instance.num_agents()),
        );
        return report;
    }
    for (i, (plan, agent)) in plans.iter().zip(&instance.agents).enumerate() {
        check_plan(graph, i, plan, agent.start, agent.goal, &mut report);
    }
    if !report.ok() {
        return report;
    }

    let n = plans.len();
    let mut analytic = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let (ri, rj) = (instance.agents[i].radius, instance.agents[j].radius);
            for a in plans[i].timeline() {
                for b in plans[j].timeline() {
                    if collides(&a, &b, ri, rj, graph) {
                        analytic[i][j] = true;
                        report.push(
                            ViolationKind::Collision,
                            vec![i, j],
                            a.start.max(b.start),
                            format!("{:?}@{} vs {:?}@{}", a.kind(), a.start, b.kind(), b.start),
                        );
                    }
                }
            }
        }
    }

    let horizon = plans.iter().map(Plan::cost).fold(0.0, f64::max) + 1.0;
    let count = (horizon / SAMPLE_DT).ceil() as usize + 1;
    let samples: Vec<Vec<Point>> = plans.iter().map(|p| sample(graph, p, SAMPLE_DT, count)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if analytic[i][j] {
                continue;
            }
            let r = instance.agents[i].radius + instance.agents[j].radius - EPS;
            if let Some(s) = (0..count).find(|&s| samples[i][s].distance(samples[j][s]) < r) {
                report.push(
                    ViolationKind::Collision,
                    vec![i, j],
                    s as f64 * SAMPLE_DT,
                    "sampling overlap missed by the analytic test",
                );
            }
        }
    }
    report
}

/// Optimal sum of costs by A* over joint states on a 4-connected unit grid,
/// with vertex and swap conflicts only. With radius at most sqrt(2)/4 every
/// lattice solution is collision-free in continuous time, so the result is
/// an upper bound on the continuous optimum. It is not always tight: a
/// fractional wait can let one agent trail another at exact tangency.
/// Agents may park at their goal for good, after which they stop accruing
/// cost.
///
/// Returns `Ok(None)` when the instance has no solution.
pub fn brute_force_soc(instance: &Instance) -> Result<Option<f64>> {
    let g = &instance.graph;
    let n = instance.num_agents();
    if n > 3 || g.num_vertices() > 40 {
        return Err(Error::invalid("brute force is limited to 3 agents and 40 vertices"));
    }
    let unit_grid = g.cells().is_some()
        && g.edges().all(|(u, v, w)| {
            let (a, b) = (g.point(u), g.point(v));
            w == 1.0 && (a.x == b.x || a.y == b.y)
        });
    if !unit_grid {
        return Err(Error::invalid("brute force needs a 4-connected unit grid"));
    }
    if instance.agents.iter().any(|a| a.radius > DEFAULT_RADIUS + 1e-12) {
        return Err(Error::invalid("brute force needs radius at most sqrt(2)/4"));
    }

    let dist: Vec<Vec<f64>> = instance
        .agents
        .iter()
        .map(|a| dijkstra_heuristic(g, a.goal).as_slice().to_vec())
        .collect();
    if instance
        .agents
        .iter()
        .enumerate()
        .any(|(i, a)| !dist[i][a.start].is_finite())
    {
        return Ok(None);
    }
    let goals: Vec<VertexId> = instance.agents.iter().map(|a| a.goal).collect();
    let h = |pos: &[VertexId], parked: u8| -> u64 {
        (0..n)
            .filter(|&i| parked & (1 << i) == 0)
            .map(|i| dist[i][pos[i]] as u64)
            .sum()
    };

    type State = (Vec<VertexId>, u8);
    let start: State = (instance.agents.iter().map(|a| a.start).collect(), 0);
    let all = (1u8 << n) - 1;
    let mut best: HashMap<State, u64> = HashMap::new();
    let mut open = BinaryHeap::new();
    best.insert(start.clone(), 0);
    open.push(Reverse((h(&start.0, 0), 0u64, start)));

    while let Some(Reverse((_, cost, state))) = open.pop() {
        if best.get(&state).is_some_and(|&b| b < cost) {
            continue;
        }
        let (pos, parked) = &state;
        if *parked == all {
            return Ok(Some(cost as f64));
        }
        // Per-agent options: (next vertex, parks now).
        let options: Vec<Vec<(VertexId, bool)>> = (0..n)
            .map(|i| {
                if parked & (1 << i) != 0 {
                    return vec![(pos[i], true)];
                }
                let mut o: Vec<(VertexId, bool)> = vec![(pos[i], false)];
                o.extend(g.neighbors(pos[i]).iter().map(|e| (e.to, false)));
                if pos[i] == goals[i] {
                    o.push((pos[i], true));
                }
                o
            })
            .collect();
        let mut choice = vec![0usize; n];
        'joint: loop {
            let next: Vec<VertexId> = (0..n).map(|i| options[i][choice[i]].0).collect();
            let ok = (0..n).all(|i| {
                (i + 1..n).all(|j| next[i] != next[j] && !(next[i] == pos[j] && next[j] == pos[i] && pos[i] != pos[j]))
            });
            if ok {
                let mut np = 0u8;
                for i in 0..n {
                    if options[i][choice[i]].1 {
                        np |= 1 << i;
                    }
                }
                let step = (0..n).filter(|&i| np & (1 << i) == 0).count() as u64;
                let nc = cost + step;
                let ns: State = (next, np);
                if best.get(&ns).is_none_or(|&b| nc < b) {
                    best.insert(ns.clone(), nc);
                    let f = nc + h(&ns.0, np);
                    open.push(Reverse((f, nc, ns)));
                }
            }
            for i in 0..n {
                choice[i] += 1;
                if choice[i] < options[i].len() {
                    continue 'joint;
                }
                choice[i] = 0;
            }
            break;
        }
    }
    Ok(None)
}
