mod common;

use ccbs_core::ccbs::{
    detect_conflicts, landmark_product_search, low_level_ds, normalize_landmarks, sequential_landmarks,
    update_conflicts, Landmark,
};
use ccbs_core::graph::{build_grid_graph, dijkstra_heuristic, Graph, GridMap, Point, VertexId};
use ccbs_core::motion::{collides, unsafe_interval, Action, Interval, Plan, TimedAction};
use ccbs_core::planfile::{parse_plans, serialize_plans};
use ccbs_core::sipp::{sipp_plan, ConstraintSet, SafeIntervalTable, Start};
use ccbs_core::DEFAULT_RADIUS;
use proptest::prelude::*;

fn grid(w: usize, h: usize, k: u32) -> Graph {
    build_grid_graph(&GridMap::empty(w, h), k, DEFAULT_RADIUS).unwrap()
}

/// Complete graph on a few fixed points, so any pair of vertices is a move.
fn scatter() -> Graph {
    let pts = vec![
        Point::new(0.0, 0.0),
        Point::new(2.0, 0.0),
        Point::new(0.0, 2.0),
        Point::new(2.0, 2.0),
        Point::new(1.0, 0.5),
        Point::new(3.0, 1.0),
    ];
    let mut edges = Vec::new();
    for u in 0..pts.len() {
        for v in u + 1..pts.len() {
            edges.push((u, v));
        }
    }
    Graph::from_edges(pts, &edges).unwrap()
}

fn timed_action(g: &Graph) -> impl Strategy<Value = TimedAction> {
    let n = g.num_vertices();
    let g = g.clone();
    (0..n, 0..n, 0.0..4.0f64, 0.1..3.0f64, any::<bool>()).prop_map(move |(u, v, start, wait, inf)| {
        if u == v {
            Action::wait(u, if inf { f64::INFINITY } else { wait }).at(start)
        } else {
            Action::move_along(&g, u, v).unwrap().at(start)
        }
    })
}

#[derive(Debug, Clone)]
enum Block {
    Vertex(VertexId, f64, f64),
    Move(usize, f64, f64),
}

fn blocks(n: usize, max: usize) -> impl Strategy<Value = Vec<Block>> {
    let one = prop_oneof![
        (0..n, 0.0..8.0f64, 0.2..3.0f64).prop_map(|(v, lo, len)| Block::Vertex(v, lo, lo + len)),
        (0..64usize, 0.0..8.0f64, 0.2..3.0f64).prop_map(|(e, lo, len)| Block::Move(e, lo, lo + len)),
    ];
    prop::collection::vec(one, 0..max)
}

fn edge_list(g: &Graph) -> Vec<(VertexId, VertexId)> {
    (0..g.num_vertices())
        .flat_map(|u| g.neighbors(u).iter().map(move |e| (u, e.to)))
        .collect()
}

fn constraint_set(g: &Graph, blocks: &[Block], keep_free: &[VertexId]) -> ConstraintSet {
    let edges = edge_list(g);
    let mut c = ConstraintSet::new();
    for b in blocks {
        match *b {
            Block::Vertex(v, lo, hi) if !keep_free.contains(&v) => c.block_vertex(v, Interval::new(lo, hi)),
            Block::Vertex(..) => {}
            Block::Move(e, lo, hi) => {
                let (u, v) = edges[e % edges.len()];
                c.forbid_move(u, v, Interval::new(lo, hi));
            }
        }
    }
    c
}

fn horizon(c: &ConstraintSet, g: &Graph, landmarks: &[Landmark]) -> f64 {
    let mut t: f64 = landmarks.iter().map(|l| l.window.hi).fold(0.0, f64::max);
    for v in 0..g.num_vertices() {
        t = c.vertex_blocks(v).iter().map(|b| b.hi).fold(t, f64::max);
        for e in g.neighbors(v) {
            t = c.move_blocks(v, e.to).iter().map(|b| b.hi).fold(t, f64::max);
        }
    }
    t + 2.0 * g.num_vertices() as f64 + 1.0
}

#[test]
fn arrival_rounding_stays_outside_the_block() {
    let g = grid(3, 3, 3);
    let edges = edge_list(&g);
    let (from, to) = edges[40 % edges.len()];
    let lo = 5.112126828871768;
    let lm = Landmark {
        from,
        to,
        window: Interval::new(lo, lo + 0.3),
    };
    let mut c = ConstraintSet::new();
    c.block_vertex(0, Interval::new(3.0360445549044925, 3.864420387060163));
    let goal = dijkstra_heuristic(&g, 0);
    let plan = low_level_ds(&g, 0, 1, &goal, std::slice::from_ref(&goal), &c, &[lm]).unwrap();
    common::respects(&g, &plan, 1, &c, &[lm]).unwrap();
    let want = common::enumerate_optimum(&g, 1, 0, &c, &[lm], horizon(&c, &g, &[lm])).unwrap();
    assert!((plan.cost() - want).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn collision_is_symmetric(a in timed_action(&scatter()), b in timed_action(&scatter()), ri in 0.1..0.6f64, rj in 0.1..0.6f64) {
        let g = scatter();
        prop_assert_eq!(collides(&a, &b, ri, rj, &g), collides(&b, &a, rj, ri, &g));
    }

    #[test]
    fn unsafe_interval_ends_collision_free(a in timed_action(&scatter()), b in timed_action(&scatter()), r in 0.1..0.6f64) {
        let g = scatter();
        prop_assume!(a.action.duration.is_finite());
        if let Some(iv) = unsafe_interval(&a.action, a.start, &b, r, r, &g) {
            prop_assert_eq!(iv.lo, a.start);
            prop_assert!(collides(&a, &b, r, r, &g) || iv.hi - iv.lo < 1e-6);
            if iv.hi.is_finite() {
                prop_assert!(!collides(&a.action.at(iv.hi), &b, r, r, &g));
            } else {
                prop_assert!(b.action.duration.is_infinite());
                prop_assert!(collides(&a.action.at(a.start + 50.0), &b, r, r, &g) || !a.kind().is_move());
            }
        } else {
            prop_assert!(!collides(&a, &b, r, r, &g));
        }
    }

    #[test]
    fn sipp_is_feasible_and_optimal(bl in blocks(9, 6), s in 0..9usize, t in 0..9usize, k in 2..4u32) {
        let g = grid(3, 3, k);
        let c = constraint_set(&g, &bl, &[s]);
        let h = dijkstra_heuristic(&g, t);
        let got = sipp_plan(&g, &c, &SafeIntervalTable::new(&c), &[Start::initial(s)], t, &|v| h.get(v));
        let want = common::enumerate_optimum(&g, s, t, &c, &[], horizon(&c, &g, &[]));
        match got {
            Some(actions) => {
                let plan = Plan { agent: 0, start: s, actions };
                common::respects(&g, &plan, s, &c, &[]).map_err(TestCaseError::fail)?;
                prop_assert_eq!(plan.goal(), t);
                let want = want.expect("oracle finds a plan whenever sipp does");
                prop_assert!((plan.cost() - want).abs() < 1e-6, "sipp {} oracle {}", plan.cost(), want);
            }
            None => prop_assert!(want.is_none(), "oracle found {:?}", want),
        }
    }

    #[test]
    fn landmark_planning_is_optimal(
        bl in blocks(9, 5),
        lms in prop::collection::vec((0..64usize, 0.0..6.0f64, 0.3..3.0f64), 1..3),
        s in 0..9usize,
        t in 0..9usize,
    ) {
        let g = grid(3, 3, 3);
        let edges = edge_list(&g);
        let landmarks: Vec<Landmark> = lms
            .iter()
            .map(|&(e, lo, len)| {
                let (from, to) = edges[e % edges.len()];
                Landmark { from, to, window: Interval::new(lo, lo + len) }
            })
            .collect();
        let c = constraint_set(&g, &bl, &[s]);
        let goal = dijkstra_heuristic(&g, t);
        let got = low_level_ds(&g, 0, s, &goal, std::slice::from_ref(&goal), &c, &landmarks);
        let want = common::enumerate_optimum(&g, s, t, &c, &landmarks, horizon(&c, &g, &landmarks));
        match got {
            Some(plan) => {
                common::respects(&g, &plan, s, &c, &landmarks).map_err(TestCaseError::fail)?;
                prop_assert_eq!(plan.goal(), t);
                let want = want.expect("oracle finds a plan whenever the planner does");
                prop_assert!((plan.cost() - want).abs() < 1e-6, "planner {} oracle {}", plan.cost(), want);
            }
            None => prop_assert!(want.is_none(), "oracle found {:?}", want),
        }
    }

    #[test]
    fn sequential_matches_product_on_disjoint_windows(
        bl in blocks(16, 6),
        lms in prop::collection::vec((0..64usize, 0.2..2.5f64, 0.3..2.0f64), 1..4),
        s in 0..16usize,
        t in 0..16usize,
    ) {
        let g = grid(4, 4, 3);
        let edges = edge_list(&g);
        let mut lo = 0.0;
        let landmarks: Vec<Landmark> = lms
            .iter()
            .map(|&(e, gap, len)| {
                let (from, to) = edges[e % edges.len()];
                lo += gap;
                let window = Interval::new(lo, lo + len);
                lo += len;
                Landmark { from, to, window }
            })
            .collect();
        prop_assert_eq!(normalize_landmarks(&landmarks).len(), landmarks.len());
        let c = constraint_set(&g, &bl, &[s]);
        let goal = dijkstra_heuristic(&g, t);
        let pivots = std::slice::from_ref(&goal);
        let a = sequential_landmarks(&g, 0, s, &goal, pivots, &c, &landmarks);
        let b = landmark_product_search(&g, 0, s, &goal, pivots, &c, &landmarks);
        prop_assert_eq!(a.is_some(), b.is_some());
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert!((a.cost() - b.cost()).abs() < 1e-6, "sequential {} product {}", a.cost(), b.cost());
            common::respects(&g, &a, s, &c, &landmarks).map_err(TestCaseError::fail)?;
        }
    }

    #[test]
    fn incremental_conflicts_match_full_detection(seed in 0..10_000u64, k in 0..4usize, bl in blocks(25, 6)) {
        let map = common::random_map(5, 5, 0.1, seed);
        let Some(inst) = common::random_instance(&map, 3, 4, DEFAULT_RADIUS, seed) else {
            return Ok(());
        };
        let g = &inst.graph;
        let radii = inst.radii();
        let solo = |i: usize, c: &ConstraintSet| {
            let a = &inst.agents[i];
            let h = dijkstra_heuristic(g, a.goal);
            low_level_ds(g, i, a.start, &h, std::slice::from_ref(&h), c, &[])
        };
        let mut plans: Vec<Plan> = (0..4).map(|i| solo(i, &ConstraintSet::new()).unwrap()).collect();
        let parent = detect_conflicts(g, &plans, &radii);
        let c = constraint_set(g, &bl, &[inst.agents[k].start]);
        let Some(replan) = solo(k, &c) else {
            return Ok(());
        };
        plans[k] = replan;
        let key = |cs: &[ccbs_core::ccbs::Conflict]| -> Vec<String> {
            cs.iter().map(|c| format!("{} {} {:?} {:?} {:?} {:?}", c.i, c.j, c.action_i, c.action_j, c.unsafe_i, c.unsafe_j)).collect()
        };
        let inc = update_conflicts(g, &parent, k, &plans, &radii);
        prop_assert_eq!(key(&inc), key(&detect_conflicts(g, &plans, &radii)));
    }

    #[test]
    fn plan_files_round_trip(seed in 0..10_000u64, n in 1..5usize) {
        let map = common::random_map(6, 6, 0.2, seed);
        let Some(inst) = common::random_instance(&map, 3, n, DEFAULT_RADIUS, seed) else {
            return Ok(());
        };
        let mut c = ConstraintSet::new();
        c.block_vertex(inst.agents[0].goal, Interval::new(0.5, 2.0 + seed as f64 % 3.0));
        let plans: Vec<Plan> = inst
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let h = dijkstra_heuristic(&inst.graph, a.goal);
                let cs = if i == 0 { c.clone() } else { ConstraintSet::new() };
                low_level_ds(&inst.graph, i, a.start, &h, std::slice::from_ref(&h), &cs, &[])
                    .unwrap_or(Plan { agent: i, start: a.start, actions: vec![] })
            })
            .collect();
        prop_assert_eq!(parse_plans(&serialize_plans(&plans)).unwrap(), plans);
    }
}
