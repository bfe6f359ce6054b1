//! Problem instances: a graph plus one start/goal pair per agent.

use crate::graph::{build_grid_graph, load_movingai_map, load_roadmap, load_scen, Graph, ScenEntry, VertexId};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub start: VertexId,
    pub goal: VertexId,
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub agents: Vec<Agent>,
}

impl Instance {
    /// Checks vertex ranges, radii and pairwise-distinct starts and goals.
    pub fn new(graph: Graph, agents: Vec<Agent>) -> Result<Self> {
        let n = graph.num_vertices();
        for (i, a) in agents.iter().enumerate() {
            if a.start >= n || a.goal >= n {
                return Err(Error::invalid(format!("agent {i} references a missing vertex")));
            }
            if !(a.radius > 0.0 && a.radius.is_finite()) {
                return Err(Error::invalid(format!("agent {i} has radius {}", a.radius)));
            }
        }
        for i in 0..agents.len() {
            for j in i + 1..agents.len() {
                if agents[i].start == agents[j].start {
                    return Err(Error::invalid(format!("agents {i} and {j} share a start vertex")));
                }
                if agents[i].goal == agents[j].goal {
                    return Err(Error::invalid(format!("agents {i} and {j} share a goal vertex")));
                }
            }
        }
        Ok(Instance { graph, agents })
    }

    /// The first `n` scenario pairs on a grid graph, all with one radius.
    pub fn from_scen(graph: Graph, entries: &[ScenEntry], n: usize, radius: f64) -> Result<Self> {
        if n > entries.len() {
            return Err(Error::invalid(format!(
                "requested {n} agents but the scenario has {} pairs",
                entries.len()
            )));
        }
        let mut agents = Vec::with_capacity(n);
        for (i, e) in entries[..n].iter().enumerate() {
            let cell = |(x, y): (usize, usize)| {
                graph
                    .vertex_at_cell(x, y)
                    .ok_or_else(|| Error::invalid(format!("pair {i}: cell ({x},{y}) is blocked or off the map")))
            };
            agents.push(Agent {
                start: cell(e.start)?,
                goal: cell(e.goal)?,
                radius,
            });
        }
        Instance::new(graph, agents)
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.radius).collect()
    }
}

/// Parses a roadmap task file: one `start goal` vertex pair per line, `#`
/// comments allowed. Order is preserved.
pub fn load_tasks(text: &str) -> Result<Vec<(VertexId, VertexId)>> {
    let mut tasks = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [s, g] = fields.as_slice() else {
            return Err(Error::parse(i + 1, format!("expected `start goal`, found `{line}`")));
        };
        let parse = |f: &str| {
            f.parse::<usize>()
                .map_err(|_| Error::parse(i + 1, format!("bad vertex id `{f}`")))
        };
        tasks.push((parse(s)?, parse(g)?));
    }
    Ok(tasks)
}

pub fn write_tasks(tasks: &[(VertexId, VertexId)]) -> String {
    tasks.iter().map(|(s, g)| format!("{s} {g}\n")).collect()
}

/// Whether `text` is a MovingAI grid map (as opposed to a roadmap file).
pub fn is_grid_map(text: &str) -> bool {
    text.trim_start().starts_with("type")
}

/// Graph from a MovingAI map (built `2^k`-connected) or a roadmap file.
pub fn load_graph(map_text: &str, k: u32, radius: f64) -> Result<Graph> {
    if is_grid_map(map_text) {
        build_grid_graph(&load_movingai_map(map_text)?, k, radius)
    } else {
        load_roadmap(map_text)
    }
}

/// Instance from a map and its task file: a MovingAI scenario for grid
/// maps, a `start goal` task list for roadmaps. Takes the first `agents`
/// pairs, or all of them.
pub fn load_instance(map_text: &str, task_text: &str, agents: Option<usize>, k: u32, radius: f64) -> Result<Instance> {
    let graph = load_graph(map_text, k, radius)?;
    if is_grid_map(map_text) {
        let entries = load_scen(task_text)?;
        Instance::from_scen(graph, &entries, agents.unwrap_or(entries.len()), radius)
    } else {
        let tasks = load_tasks(task_text)?;
        let n = agents.unwrap_or(tasks.len());
        if n > tasks.len() {
            return Err(Error::invalid(format!(
                "requested {n} agents but the task file has {} pairs",
                tasks.len()
            )));
        }
        let agents = tasks[..n]
            .iter()
            .map(|&(start, goal)| Agent { start, goal, radius })
            .collect();
        Instance::new(graph, agents)
    }
}
