//! Constraint-tree search.
//!
//! Each CT node holds a joint plan, the constraints added on its branch and
//! the conflicts of its joint plan. Nodes are expanded best-first on
//! `cost + h`; a conflict-free node is optimal.

mod conflict;
mod heuristic;
mod lowlevel;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::{Duration, Instant};

pub use conflict::{detect_conflicts, update_conflicts, Conflict, Impact};
pub use heuristic::{aggregate, h2_greedy};
pub use lowlevel::{landmark_product_search, low_level_ds, normalize_landmarks, sequential_landmarks, Landmark};

use crate::graph::{dijkstra_heuristic, HeuristicTable};
use crate::instance::Instance;
use crate::motion::{ActionKind, Interval, Plan};
use crate::sipp::ConstraintSet;
use crate::EPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Positive,
}

/// Negative: `agent` may not perform `kind` with a start time in `interval`
/// (for waits: may not occupy the vertex during `interval`). Positive: the
/// agent's plan must start the move `kind` inside `interval`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub agent: usize,
    pub sign: Sign,
    pub kind: ActionKind,
    pub interval: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Splitting {
    Vanilla,
    Disjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConflictChoice {
    First,
    CostImpact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Aggregate {
    #[default]
    Min,
    Max,
    Sum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub splitting: Splitting,
    pub conflict_choice: ConflictChoice,
    pub aggregate: Aggregate,
    pub use_heuristic: bool,
    pub time_limit: Duration,
    /// Record `(cost, h, key)` of every expanded node.
    pub trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::variant(Variant::DsPcH)
    }
}

/// The five configurations compared in the benchmark protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Vanilla,
    Pc,
    Ds,
    DsPc,
    DsPcH,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Vanilla,
        Variant::Pc,
        Variant::Ds,
        Variant::DsPc,
        Variant::DsPcH,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Vanilla => "vanilla",
            Variant::Pc => "pc",
            Variant::Ds => "ds",
            Variant::DsPc => "ds+pc",
            Variant::DsPcH => "ds+pc+h",
        }
    }

    pub fn parse(name: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name() == name.to_ascii_lowercase())
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl SolverConfig {
    pub fn variant(v: Variant) -> Self {
        let ds = matches!(v, Variant::Ds | Variant::DsPc | Variant::DsPcH);
        let pc = matches!(v, Variant::Pc | Variant::DsPc | Variant::DsPcH);
        SolverConfig {
            splitting: if ds { Splitting::Disjoint } else { Splitting::Vanilla },
            conflict_choice: if pc {
                ConflictChoice::CostImpact
            } else {
                ConflictChoice::First
            },
            aggregate: Aggregate::Min,
            use_heuristic: v == Variant::DsPcH,
            time_limit: Duration::from_secs(30),
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    Timeout,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub cost: f64,
    pub h: f64,
    pub key: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: Status,
    /// Joint plan, empty unless solved.
    pub plans: Vec<Plan>,
    pub soc: f64,
    pub expanded: usize,
    pub generated: usize,
    /// Search time, excluding heuristic precomputation.
    pub runtime: Duration,
    pub precompute: Duration,
    pub trace: Vec<Expansion>,
}

/// Goal-distance tables of every agent; they double as the pivots of the
/// differential heuristic toward landmark sources.
pub struct Heuristics {
    tables: Vec<HeuristicTable>,
}

impl Heuristics {
    pub fn new(instance: &Instance) -> Self {
        let tables = instance
            .agents
            .iter()
            .map(|a| dijkstra_heuristic(&instance.graph, a.goal))
            .collect();
        Heuristics { tables }
    }

    pub fn goal(&self, agent: usize) -> &HeuristicTable {
        &self.tables[agent]
    }

    pub fn pivots(&self) -> &[HeuristicTable] {
        &self.tables
    }
}

struct Node {
    parent: Option<usize>,
    added: Vec<Constraint>,
    plans: Vec<Rc<Plan>>,
    cost: f64,
    conflicts: Vec<Conflict>,
    h: f64,
    h_final: bool,
    depth: usize,
}

#[derive(PartialEq)]
struct Entry {
    key: f64,
    conflicts: usize,
    depth: usize,
    id: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.conflicts.cmp(&self.conflicts))
            .then_with(|| self.depth.cmp(&other.depth))
            .then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Search<'a> {
    instance: &'a Instance,
    heuristics: &'a Heuristics,
    config: &'a SolverConfig,
    radii: Vec<f64>,
    nodes: Vec<Node>,
    deadline: Instant,
}

impl<'a> Search<'a> {
    fn constraints_of(&self, node: usize, agent: usize, extra: &[Constraint]) -> (ConstraintSet, Vec<Landmark>) {
        let mut negatives = ConstraintSet::new();
        let mut landmarks = Vec::new();
        let mut add = |c: &Constraint| {
            if c.agent != agent {
                return;
            }
            match (c.sign, c.kind) {
                (Sign::Negative, ActionKind::Wait { at }) => negatives.block_vertex(at, c.interval),
                (Sign::Negative, ActionKind::Move { from, to }) => negatives.forbid_move(from, to, c.interval),
                (Sign::Positive, ActionKind::Move { from, to }) => landmarks.push(Landmark {
                    from,
                    to,
                    window: c.interval,
                }),
                (Sign::Positive, ActionKind::Wait { .. }) => unreachable!("positive constraints are moves"),
            }
        };
        extra.iter().for_each(&mut add);
        let mut cursor = Some(node);
        while let Some(n) = cursor {
            self.nodes[n].added.iter().for_each(&mut add);
            cursor = self.nodes[n].parent;
        }
        (negatives, landmarks)
    }

    fn replan(&self, node: usize, agent: usize, extra: &[Constraint]) -> Option<Rc<Plan>> {
        let (negatives, landmarks) = self.constraints_of(node, agent, extra);
        let a = &self.instance.agents[agent];
        low_level_ds(
            &self.instance.graph,
            agent,
            a.start,
            self.heuristics.goal(agent),
            self.heuristics.pivots(),
            &negatives,
            &landmarks,
        )
        .map(Rc::new)
    }

    /// Evaluates and caches the cost impact of conflict `k` of `node`.
    fn impact(&mut self, node: usize, k: usize) -> Rc<Impact> {
        if let Some(im) = &self.nodes[node].conflicts[k].impact {
            return im.clone();
        }
        let c = &self.nodes[node].conflicts[k];
        let (i, j, ci, cj) = (c.i, c.j, c.constraint_i, c.constraint_j);
        let replan_i = self.replan(node, i, &[ci]);
        let replan_j = self.replan(node, j, &[cj]);
        let plans = &self.nodes[node].plans;
        let delta =
            |p: &Option<Rc<Plan>>, old: &Plan| p.as_ref().map_or(f64::INFINITY, |p| (p.cost() - old.cost()).max(0.0));
        let im = Rc::new(Impact {
            delta_i: delta(&replan_i, &plans[i]),
            delta_j: delta(&replan_j, &plans[j]),
            replan_i,
            replan_j,
        });
        self.nodes[node].conflicts[k].impact = Some(im.clone());
        im
    }

    fn timed_out(&self) -> bool {
        Instant::now() >= self.deadline
    }

    /// Fills every conflict's impact and returns `Some(h)`, or `None` if some
    /// conflict cannot be resolved on either side (dead node) or time ran out.
    fn evaluate_all(&mut self, node: usize) -> Option<f64> {
        let mut weighted = Vec::with_capacity(self.nodes[node].conflicts.len());
        for k in 0..self.nodes[node].conflicts.len() {
            if self.timed_out() {
                return None;
            }
            let im = self.impact(node, k);
            if im.delta_i.is_infinite() && im.delta_j.is_infinite() {
                return None;
            }
            let c = &self.nodes[node].conflicts[k];
            weighted.push((c.i, c.j, aggregate(im.delta_i, im.delta_j, Aggregate::Min)));
        }
        Some(h2_greedy(&weighted))
    }

    fn choose(&mut self, node: usize) -> Option<usize> {
        match self.config.conflict_choice {
            ConflictChoice::First => Some(0),
            ConflictChoice::CostImpact => {
                let mut best: Option<(usize, f64)> = None;
                for k in 0..self.nodes[node].conflicts.len() {
                    if self.timed_out() {
                        return None;
                    }
                    let im = self.impact(node, k);
                    if im.delta_i.is_infinite() && im.delta_j.is_infinite() {
                        return None;
                    }
                    let d = aggregate(im.delta_i, im.delta_j, self.config.aggregate);
                    // Conflicts are in canonical order, so strict `>` keeps
                    // the earliest among equal impacts.
                    if best.is_none_or(|(_, b)| d > b) {
                        best = Some((k, d));
                    }
                }
                best.map(|(k, _)| k)
            }
        }
    }

    /// Child node with `added` constraints where agent `replanned` (if any)
    /// gets `plan`, and agents in `touched` keep their plan but lose cached
    /// impacts because their constraints changed.
    fn child(
        &mut self,
        parent: usize,
        added: Vec<Constraint>,
        replanned: usize,
        plan: Rc<Plan>,
        touched: Option<usize>,
    ) -> usize {
        let p = &self.nodes[parent];
        let mut plans = p.plans.clone();
        plans[replanned] = plan;
        let cost = plans.iter().map(|p| p.cost()).sum::<f64>();
        let owned: Vec<Plan> = plans.iter().map(|p| (**p).clone()).collect();
        let mut conflicts = update_conflicts(&self.instance.graph, &p.conflicts, replanned, &owned, &self.radii);
        if let Some(t) = touched {
            for c in conflicts.iter_mut().filter(|c| c.involves(t)) {
                c.impact = None;
            }
        }
        // Pathmax keeps the child's estimate consistent with its parent's.
        let h = (p.cost + p.h - cost).max(0.0);
        let depth = p.depth + 1;
        self.nodes.push(Node {
            parent: Some(parent),
            added,
            plans,
            cost,
            conflicts,
            h,
            h_final: false,
            depth,
        });
        self.nodes.len() - 1
    }

    fn split(&mut self, node: usize, k: usize) -> Vec<usize> {
        let c = self.nodes[node].conflicts[k].clone();
        let im = self.impact(node, k);
        let mut children = Vec::with_capacity(2);
        let movers: Vec<usize> = [c.i, c.j]
            .into_iter()
            .filter(|&a| {
                if a == c.i {
                    c.action_i.kind().is_move()
                } else {
                    c.action_j.kind().is_move()
                }
            })
            .collect();
        if self.config.splitting == Splitting::Disjoint && !movers.is_empty() {
            let delta = |a: usize| if a == c.i { im.delta_i } else { im.delta_j };
            let chosen = movers
                .iter()
                .copied()
                .min_by(|&a, &b| delta(b).total_cmp(&delta(a)).then(a.cmp(&b)))
                .expect("at least one mover");
            let other = if chosen == c.i { c.j } else { c.i };
            let (neg_chosen, neg_other, unsafe_chosen) = if chosen == c.i {
                (c.constraint_i, c.constraint_j, c.unsafe_i)
            } else {
                (c.constraint_j, c.constraint_i, c.unsafe_j)
            };
            let replan = |a: usize| {
                if a == c.i {
                    im.replan_i.clone()
                } else {
                    im.replan_j.clone()
                }
            };
            if let Some(plan) = replan(chosen) {
                children.push(self.child(node, vec![neg_chosen], chosen, plan, None));
            }
            if let Some(plan) = replan(other) {
                let positive = Constraint {
                    sign: Sign::Positive,
                    interval: unsafe_chosen,
                    ..neg_chosen
                };
                children.push(self.child(node, vec![positive, neg_other], other, plan, Some(chosen)));
            }
        } else {
            if let Some(plan) = im.replan_i.clone() {
                children.push(self.child(node, vec![c.constraint_i], c.i, plan, None));
            }
            if let Some(plan) = im.replan_j.clone() {
                children.push(self.child(node, vec![c.constraint_j], c.j, plan, None));
            }
        }
        children
    }
}

/// Runs CCBS on `instance` under `config`.
pub fn solve(instance: &Instance, config: &SolverConfig) -> Solution {
    let t0 = Instant::now();
    let heuristics = Heuristics::new(instance);
    let precompute = t0.elapsed();
    solve_with(instance, config, &heuristics, precompute)
}

/// [`solve`] with goal-distance tables computed by the caller.
pub fn solve_with(
    instance: &Instance,
    config: &SolverConfig,
    heuristics: &Heuristics,
    precompute: Duration,
) -> Solution {
    let started = Instant::now();
    let mut out = Solution {
        status: Status::Infeasible,
        plans: Vec::new(),
        soc: f64::INFINITY,
        expanded: 0,
        generated: 0,
        runtime: Duration::ZERO,
        precompute,
        trace: Vec::new(),
    };
    let mut search = Search {
        instance,
        heuristics,
        config,
        radii: instance.radii(),
        nodes: Vec::new(),
        deadline: started + config.time_limit,
    };

    let mut root_plans = Vec::with_capacity(instance.num_agents());
    for (i, a) in instance.agents.iter().enumerate() {
        if !heuristics.goal(i).get(a.start).is_finite() {
            out.runtime = started.elapsed();
            return out;
        }
        let table = heuristics.goal(i);
        match low_level_ds(
            &instance.graph,
            i,
            a.start,
            table,
            heuristics.pivots(),
            &ConstraintSet::new(),
            &[],
        ) {
            Some(p) => root_plans.push(Rc::new(p)),
            None => {
                out.runtime = started.elapsed();
                return out;
            }
        }
    }
    let owned: Vec<Plan> = root_plans.iter().map(|p| (**p).clone()).collect();
    let conflicts = detect_conflicts(&instance.graph, &owned, &search.radii);
    let cost = owned.iter().map(Plan::cost).sum();
    search.nodes.push(Node {
        parent: None,
        added: Vec::new(),
        plans: root_plans,
        cost,
        conflicts,
        h: 0.0,
        h_final: false,
        depth: 0,
    });
    out.generated = 1;

    let mut open = BinaryHeap::new();
    let entry = |n: &Node, id: usize| Entry {
        key: n.cost + n.h,
        conflicts: n.conflicts.len(),
        depth: n.depth,
        id,
    };
    open.push(entry(&search.nodes[0], 0));

    while let Some(Entry { id, .. }) = open.pop() {
        if search.timed_out() {
            out.status = Status::Timeout;
            break;
        }
        if config.use_heuristic && !search.nodes[id].h_final {
            let Some(h) = search.evaluate_all(id) else {
                if search.timed_out() {
                    out.status = Status::Timeout;
                    break;
                }
                continue;
            };
            let n = &mut search.nodes[id];
            n.h_final = true;
            if h > n.h + EPS {
                n.h = h;
                open.push(entry(n, id));
                continue;
            }
        }

        let n = &search.nodes[id];
        out.expanded += 1;
        if config.trace {
            out.trace.push(Expansion {
                cost: n.cost,
                h: n.h,
                key: n.cost + n.h,
            });
        }
        if n.conflicts.is_empty() {
            out.status = Status::Solved;
            out.soc = n.cost;
            out.plans = n.plans.iter().map(|p| (**p).clone()).collect();
            break;
        }
        let Some(k) = search.choose(id) else {
            if search.timed_out() {
                out.status = Status::Timeout;
                break;
            }
            continue;
        };
        for child in search.split(id, k) {
            out.generated += 1;
            open.push(entry(&search.nodes[child], child));
        }
    }
    out.runtime = started.elapsed();
    out
}
