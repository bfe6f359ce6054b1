use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{dijkstra_heuristic, Graph};
use crate::{Error, Result};

/// One line of a MovingAI scenario file. Cells are `(column, row)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenEntry {
    pub bucket: u32,
    pub map: String,
    pub width: usize,
    pub height: usize,
    pub start: (usize, usize),
    pub goal: (usize, usize),
    pub optimal: f64,
}

/// Parses a MovingAI `.scen` (version 1) file, preserving line order.
pub fn load_scen(text: &str) -> Result<Vec<ScenEntry>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    match lines.next() {
        Some((_, header)) if header.split_whitespace().eq(["version", "1"]) => {}
        Some((_, header)) if header.split_whitespace().eq(["version", "1.0"]) => {}
        _ => return Err(Error::parse(1, "missing `version 1` header")),
    }
    let mut entries = Vec::new();
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = if line.contains('\t') {
            line.split('\t').collect()
        } else {
            line.split_whitespace().collect()
        };
        if fields.len() != 9 {
            return Err(Error::parse(no, format!("expected 9 fields, found {}", fields.len())));
        }
        let int = |i: usize, what: &str| -> Result<usize> {
            fields[i]
                .trim()
                .parse()
                .map_err(|_| Error::parse(no, format!("bad {what} `{}`", fields[i])))
        };
        let bucket = int(0, "bucket")? as u32;
        let (width, height) = (int(2, "width")?, int(3, "height")?);
        let start = (int(4, "start x")?, int(5, "start y")?);
        let goal = (int(6, "goal x")?, int(7, "goal y")?);
        let optimal: f64 = fields[8]
            .trim()
            .parse()
            .map_err(|_| Error::parse(no, format!("bad optimal length `{}`", fields[8])))?;
        for (x, y) in [start, goal] {
            if x >= width || y >= height {
                return Err(Error::parse(no, format!("cell ({x},{y}) outside {width}x{height} map")));
            }
        }
        entries.push(ScenEntry {
            bucket,
            map: fields[1].trim().to_string(),
            width,
            height,
            start,
            goal,
            optimal,
        });
    }
    Ok(entries)
}

pub fn write_scen(entries: &[ScenEntry]) -> String {
    let mut out = String::from("version 1\n");
    for e in entries {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.8}\n",
            e.bucket, e.map, e.width, e.height, e.start.0, e.start.1, e.goal.0, e.goal.1, e.optimal
        ));
    }
    out
}

/// Draws `count` start/goal pairs on a grid graph: starts pairwise distinct,
/// goals pairwise distinct, each pair connected. Deterministic in `seed`.
pub fn random_scenario(graph: &Graph, map_name: &str, count: usize, seed: u64) -> Result<Vec<ScenEntry>> {
    let cells = graph
        .cells()
        .ok_or_else(|| Error::invalid("random_scenario needs a grid graph"))?;
    let components = graph.components();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<usize> = (0..graph.num_vertices()).collect();
    let mut goals = starts.clone();
    starts.shuffle(&mut rng);
    goals.shuffle(&mut rng);

    let mut used_goal = vec![false; graph.num_vertices()];
    let mut entries = Vec::with_capacity(count);
    for &s in &starts {
        if entries.len() == count {
            break;
        }
        let Some(&g) = goals
            .iter()
            .find(|&&g| g != s && !used_goal[g] && components[g] == components[s])
        else {
            continue;
        };
        used_goal[g] = true;
        let cell = |v: usize| {
            let p = graph.point(v);
            (p.x as usize, p.y as usize)
        };
        let optimal = dijkstra_heuristic(graph, g).get(s);
        entries.push(ScenEntry {
            bucket: (optimal / 4.0) as u32,
            map: map_name.to_string(),
            width: cells.width(),
            height: cells.height(),
            start: cell(s),
            goal: cell(g),
            optimal,
        });
    }
    if entries.len() < count {
        return Err(Error::invalid(format!(
            "only {} of {count} start/goal pairs fit the map",
            entries.len()
        )));
    }
    Ok(entries)
}
