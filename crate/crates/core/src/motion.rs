//! Timed actions, plans and the collision geometry of disk agents moving at
//! constant velocity along straight edges.

use crate::graph::{Graph, Point, VertexId};
use crate::{Error, Result, EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Move { from: VertexId, to: VertexId },
    Wait { at: VertexId },
}

impl ActionKind {
    pub fn source(self) -> VertexId {
        match self {
            ActionKind::Move { from, .. } => from,
            ActionKind::Wait { at } => at,
        }
    }

    pub fn target(self) -> VertexId {
        match self {
            ActionKind::Move { to, .. } => to,
            ActionKind::Wait { at } => at,
        }
    }

    pub fn is_move(self) -> bool {
        matches!(self, ActionKind::Move { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Action {
    pub kind: ActionKind,
    /// Edge weight for moves; positive (possibly infinite) for waits.
    pub duration: f64,
}

impl Action {
    pub fn move_along(graph: &Graph, from: VertexId, to: VertexId) -> Result<Self> {
        let duration = graph
            .edge_weight(from, to)
            .ok_or_else(|| Error::invalid(format!("no edge {from}-{to}")))?;
        Ok(Action {
            kind: ActionKind::Move { from, to },
            duration,
        })
    }

    pub fn wait(at: VertexId, duration: f64) -> Self {
        Action {
            kind: ActionKind::Wait { at },
            duration,
        }
    }

    pub fn at(self, start: f64) -> TimedAction {
        TimedAction { action: self, start }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedAction {
    pub action: Action,
    pub start: f64,
}

impl TimedAction {
    pub fn end(&self) -> f64 {
        self.start + self.action.duration
    }

    pub fn kind(&self) -> ActionKind {
        self.action.kind
    }
}

/// Half-open time interval `[lo, hi)`; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ALWAYS: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo < hi, "empty interval [{lo}, {hi})");
        Interval { lo, hi }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t < self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }
}

/// A single agent's timed-action sequence from `start` at time 0. An
/// infinite wait at the goal follows implicitly and costs nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub agent: usize,
    pub start: VertexId,
    pub actions: Vec<TimedAction>,
}

impl Plan {
    /// Schedules `actions` back to back from time 0.
    pub fn from_actions(agent: usize, start: VertexId, actions: impl IntoIterator<Item = Action>) -> Self {
        let mut t = 0.0;
        let actions = actions
            .into_iter()
            .map(|a| {
                let ta = a.at(t);
                t += a.duration;
                ta
            })
            .collect();
        Plan { agent, start, actions }
    }

    pub fn cost(&self) -> f64 {
        plan_cost(self)
    }

    pub fn goal(&self) -> VertexId {
        self.actions.last().map_or(self.start, |ta| ta.kind().target())
    }

    /// Time the last explicit action ends.
    pub fn end_time(&self) -> f64 {
        self.actions.last().map_or(0.0, TimedAction::end)
    }

    pub fn terminal_wait(&self) -> TimedAction {
        Action::wait(self.goal(), f64::INFINITY).at(self.end_time())
    }

    /// Explicit actions followed by the terminal wait.
    pub fn timeline(&self) -> impl Iterator<Item = TimedAction> + '_ {
        self.actions
            .iter()
            .copied()
            .chain(std::iter::once(self.terminal_wait()))
    }

    /// Position at time `t >= 0`.
    pub fn position_at(&self, graph: &Graph, t: f64) -> Point {
        let ta = self
            .actions
            .iter()
            .find(|ta| t <= ta.end())
            .copied()
            .unwrap_or_else(|| self.terminal_wait());
        Sweep::of(graph, &ta).at(t.max(ta.start).min(ta.end()))
    }

    /// True if the plan performs `kind` with a start time inside `window`.
    pub fn performs(&self, kind: ActionKind, window: &Interval) -> bool {
        self.actions
            .iter()
            .any(|ta| ta.kind() == kind && window.contains(ta.start))
    }
}

/// Sum of explicit action durations.
pub fn plan_cost(plan: &Plan) -> f64 {
    plan.actions.iter().map(|ta| ta.action.duration).sum()
}

/// Straight-line, constant-velocity motion over `[t0, t1]`.
#[derive(Debug, Clone, Copy)]
struct Sweep {
    origin: Point,
    vx: f64,
    vy: f64,
    t0: f64,
    t1: f64,
}

impl Sweep {
    fn of(graph: &Graph, ta: &TimedAction) -> Self {
        let d = ta.action.duration;
        match ta.kind() {
            ActionKind::Wait { at } => Sweep {
                origin: graph.point(at),
                vx: 0.0,
                vy: 0.0,
                t0: ta.start,
                t1: ta.start + d,
            },
            ActionKind::Move { from, to } => {
                let (a, b) = (graph.point(from), graph.point(to));
                Sweep {
                    origin: a,
                    vx: (b.x - a.x) / d,
                    vy: (b.y - a.y) / d,
                    t0: ta.start,
                    t1: ta.start + d,
                }
            }
        }
    }

    fn at(&self, t: f64) -> Point {
        let dt = t - self.t0;
        if dt == 0.0 {
            return self.origin;
        }
        Point::new(self.origin.x + self.vx * dt, self.origin.y + self.vy * dt)
    }

    /// Minimum distance to `other` over the shared time window, or `None`
    /// when the windows overlap in at most a single instant.
    fn min_distance(&self, other: &Sweep) -> Option<f64> {
        let lo = self.t0.max(other.t0);
        let hi = self.t1.min(other.t1);
        if (hi - lo).is_nan() || hi - lo <= 0.0 {
            return None;
        }
        let (p, q) = (self.at(lo), other.at(lo));
        let (dx, dy) = (p.x - q.x, p.y - q.y);
        let (wx, wy) = (self.vx - other.vx, self.vy - other.vy);
        let ww = wx * wx + wy * wy;
        let tau = if ww > 0.0 {
            (-(dx * wx + dy * wy) / ww).clamp(0.0, hi - lo)
        } else {
            0.0
        };
        Some((dx + wx * tau).hypot(dy + wy * tau))
    }
}

/// Position of a timed action at time `t`. For waits of infinite duration
/// any `t >= start` is valid.
pub fn position_at(ta: &TimedAction, graph: &Graph, t: f64) -> Result<Point> {
    if !(t >= ta.start - EPS && t <= ta.end() + EPS) {
        return Err(Error::invalid(format!(
            "time {t} outside action span [{}, {}]",
            ta.start,
            ta.end()
        )));
    }
    Ok(Sweep::of(graph, ta).at(t.clamp(ta.start, ta.end())))
}

fn min_distance(ta_i: &TimedAction, ta_j: &TimedAction, graph: &Graph) -> Option<f64> {
    Sweep::of(graph, ta_i).min_distance(&Sweep::of(graph, ta_j))
}

/// Conflict test: the disks overlap at some instant of a shared window of
/// positive length. Contacts closer to tangency than [`EPS`] do not count.
pub fn collides(ta_i: &TimedAction, ta_j: &TimedAction, r_i: f64, r_j: f64, graph: &Graph) -> bool {
    min_distance(ta_i, ta_j, graph).is_some_and(|d| d < r_i + r_j - EPS)
}

/// Strict-overlap test without tolerance; unsafe intervals are computed
/// against this so that their right end is always collision-free.
fn overlaps_exactly(ta_i: &TimedAction, ta_j: &TimedAction, r_i: f64, r_j: f64, graph: &Graph) -> bool {
    min_distance(ta_i, ta_j, graph).is_some_and(|d| d < r_i + r_j)
}

/// Open window of times in which a disk of radius `r_i` parked at `at`
/// overlaps agent `j` performing `ta_j`.
pub fn wait_block_window(at: VertexId, r_i: f64, ta_j: &TimedAction, r_j: f64, graph: &Graph) -> Option<Interval> {
    let p = graph.point(at);
    let s = Sweep::of(graph, ta_j);
    let rr = (r_i + r_j) * (r_i + r_j);
    let (dx, dy) = (s.origin.x - p.x, s.origin.y - p.y);
    let a = s.vx * s.vx + s.vy * s.vy;
    let b = s.vx * dx + s.vy * dy;
    let c = dx * dx + dy * dy - rr;
    let span = s.t1 - s.t0;
    let (lo, hi) = if a == 0.0 {
        if c >= 0.0 {
            return None;
        }
        (0.0, span)
    } else {
        let disc = b * b - a * c;
        if disc <= 0.0 {
            return None;
        }
        let root = disc.sqrt();
        (((-b - root) / a).max(0.0), ((-b + root) / a).min(span))
    };
    (hi > lo).then(|| Interval::new(s.t0 + lo, s.t0 + hi))
}

/// Maximal interval `[t_i, t_u)` of start times at which `a_i` collides with
/// the fixed timed action `ta_j`; `None` if `a_i` at `t_i` does not collide.
/// `t_u` is infinite when no later start is safe.
pub fn unsafe_interval(
    a_i: &Action,
    t_i: f64,
    ta_j: &TimedAction,
    r_i: f64,
    r_j: f64,
    graph: &Graph,
) -> Option<Interval> {
    let at = |s: f64| a_i.at(s);
    if !overlaps_exactly(&at(t_i), ta_j, r_i, r_j, graph) {
        return None;
    }
    let hi = match a_i.kind {
        // A parked disk collides exactly while j passes through its window.
        ActionKind::Wait { at } => wait_block_window(at, r_i, ta_j, r_j, graph)?.hi,
        // Against a parked-forever agent, later starts only add overlap.
        ActionKind::Move { .. } if ta_j.action.duration.is_infinite() => f64::INFINITY,
        ActionKind::Move { .. } => {
            // The set of colliding start shifts is an interval (projection of
            // a convex set), so bisection finds its right end.
            let (mut lo, mut hi) = (t_i, ta_j.end());
            while hi - lo > 1e-12 * hi.abs().max(1.0) {
                let mid = 0.5 * (lo + hi);
                if overlaps_exactly(&at(mid), ta_j, r_i, r_j, graph) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi
        }
    };
    (hi > t_i).then(|| Interval::new(t_i, hi))
}
