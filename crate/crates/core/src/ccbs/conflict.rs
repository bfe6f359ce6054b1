use std::cmp::Ordering;
use std::rc::Rc;

use super::{Constraint, Sign};
use crate::graph::Graph;
use crate::motion::{collides, unsafe_interval, wait_block_window, ActionKind, Interval, Plan, TimedAction};

/// Replans computed while evaluating a conflict's cost impact, kept so the
/// children can reuse them.
#[derive(Debug)]
pub struct Impact {
    pub delta_i: f64,
    pub delta_j: f64,
    pub(crate) replan_i: Option<Rc<Plan>>,
    pub(crate) replan_j: Option<Rc<Plan>>,
}

/// Two colliding timed actions of agents `i < j`.
#[derive(Debug, Clone)]
pub struct Conflict {
    pub i: usize,
    pub j: usize,
    pub action_i: TimedAction,
    pub action_j: TimedAction,
    pub unsafe_i: Interval,
    pub unsafe_j: Interval,
    /// Negative constraints that resolve the conflict on either side. For
    /// moves the interval is the unsafe interval; for waits it is the window
    /// during which the vertex is occupied by the other agent's disk.
    pub constraint_i: Constraint,
    pub constraint_j: Constraint,
    pub(crate) impact: Option<Rc<Impact>>,
}

impl Conflict {
    fn new(graph: &Graph, i: usize, a_i: TimedAction, r_i: f64, j: usize, a_j: TimedAction, r_j: f64) -> Self {
        let side = |agent: usize, a: &TimedAction, r: f64, b: &TimedAction, rb: f64| {
            let unsafe_ =
                unsafe_interval(&a.action, a.start, b, r, rb, graph).expect("detected conflicts overlap exactly");
            let window = match a.kind() {
                ActionKind::Move { .. } => unsafe_,
                ActionKind::Wait { at } => {
                    wait_block_window(at, r, b, rb, graph).expect("detected conflicts overlap exactly")
                }
            };
            let constraint = Constraint {
                agent,
                sign: Sign::Negative,
                kind: a.kind(),
                interval: window,
            };
            (unsafe_, constraint)
        };
        let (unsafe_i, constraint_i) = side(i, &a_i, r_i, &a_j, r_j);
        let (unsafe_j, constraint_j) = side(j, &a_j, r_j, &a_i, r_i);
        Conflict {
            i,
            j,
            action_i: a_i,
            action_j: a_j,
            unsafe_i,
            unsafe_j,
            constraint_i,
            constraint_j,
            impact: None,
        }
    }

    pub fn involves(&self, agent: usize) -> bool {
        self.i == agent || self.j == agent
    }

    pub fn start_time(&self) -> f64 {
        self.action_i.start.min(self.action_j.start)
    }

    /// `(delta_i, delta_j)` once the cost impact has been evaluated.
    pub fn deltas(&self) -> Option<(f64, f64)> {
        self.impact.as_ref().map(|im| (im.delta_i, im.delta_j))
    }

    pub(crate) fn same_event(&self, other: &Conflict) -> bool {
        self.i == other.i && self.j == other.j && self.action_i == other.action_i && self.action_j == other.action_j
    }
}

/// Canonical order: earliest start, then agent ids, then action start times.
pub(crate) fn canonical(a: &Conflict, b: &Conflict) -> Ordering {
    a.start_time()
        .total_cmp(&b.start_time())
        .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
        .then_with(|| a.action_i.start.total_cmp(&b.action_i.start))
        .then_with(|| a.action_j.start.total_cmp(&b.action_j.start))
}

fn detect_pair(graph: &Graph, plans: &[Plan], radii: &[f64], i: usize, j: usize, out: &mut Vec<Conflict>) {
    let (i, j) = (i.min(j), i.max(j));
    let ai: Vec<TimedAction> = plans[i].timeline().collect();
    let aj: Vec<TimedAction> = plans[j].timeline().collect();
    let (mut x, mut y) = (0, 0);
    while x < ai.len() && y < aj.len() {
        if collides(&ai[x], &aj[y], radii[i], radii[j], graph) {
            out.push(Conflict::new(graph, i, ai[x], radii[i], j, aj[y], radii[j]));
        }
        match ai[x].end().total_cmp(&aj[y].end()) {
            Ordering::Less => x += 1,
            Ordering::Greater => y += 1,
            Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
}

/// Every colliding pair of timed actions, terminal waits included, in
/// canonical order.
pub fn detect_conflicts(graph: &Graph, plans: &[Plan], radii: &[f64]) -> Vec<Conflict> {
    let mut out = Vec::new();
    for i in 0..plans.len() {
        for j in i + 1..plans.len() {
            detect_pair(graph, plans, radii, i, j, &mut out);
        }
    }
    out.sort_by(canonical);
    out
}

/// Conflict set after agent `k` got a new plan: parent conflicts not
/// involving `k` are kept (with their cached impacts), `k`'s are re-detected.
pub fn update_conflicts(graph: &Graph, parent: &[Conflict], k: usize, plans: &[Plan], radii: &[f64]) -> Vec<Conflict> {
    let mut out: Vec<Conflict> = parent.iter().filter(|c| !c.involves(k)).cloned().collect();
    for other in 0..plans.len() {
        if other != k {
            detect_pair(graph, plans, radii, k, other, &mut out);
        }
    }
    out.sort_by(canonical);
    debug_assert!(
        {
            let full = detect_conflicts(graph, plans, radii);
            full.len() == out.len() && full.iter().zip(&out).all(|(a, b)| a.same_event(b))
        },
        "incremental conflicts diverged from full detection"
    );
    out
}
