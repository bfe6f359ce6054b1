//! Line-oriented joint-plan files.
//!
//! ```text
//! agent 0 5
//! move 0.0 1.0 5 6
//! wait 1.0 0.5 6 6
//! agent 1 9
//! ```
//!
//! `agent k s` opens agent `k`'s plan starting at vertex `s` (the vertex may
//! be omitted when the plan has at least one action). Each action line is
//! `move|wait start duration from to`; waits repeat their vertex. Floats are
//! written in shortest round-trip form, so serialization is lossless.

use std::fmt::Write as _;

use crate::graph::VertexId;
use crate::motion::{Action, ActionKind, Plan, TimedAction};
use crate::{Error, Result};

pub fn serialize_plans(plans: &[Plan]) -> String {
    let mut out = String::new();
    for p in plans {
        writeln!(out, "agent {} {}", p.agent, p.start).unwrap();
        for ta in &p.actions {
            let (name, from, to) = match ta.kind() {
                ActionKind::Move { from, to } => ("move", from, to),
                ActionKind::Wait { at } => ("wait", at, at),
            };
            writeln!(out, "{name} {:?} {:?} {from} {to}", ta.start, ta.action.duration).unwrap();
        }
    }
    out
}

struct Draft {
    agent: usize,
    start: Option<VertexId>,
    actions: Vec<TimedAction>,
    line: usize,
}

/// Parses a plan file. Agents must be numbered `0..n` with one block each;
/// the result is indexed by agent.
pub fn parse_plans(text: &str) -> Result<Vec<Plan>> {
    let mut drafts: Vec<Draft> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let int = |f: &str| {
            f.parse::<usize>()
                .map_err(|_| Error::parse(no, format!("bad integer `{f}`")))
        };
        let real = |f: &str| match f.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(Error::parse(no, format!("bad number `{f}`"))),
        };
        match fields.as_slice() {
            ["agent", k, rest @ ..] if rest.len() <= 1 => {
                let start = rest.first().map(|s| int(s)).transpose()?;
                drafts.push(Draft {
                    agent: int(k)?,
                    start,
                    actions: Vec::new(),
                    line: no,
                });
            }
            [kind @ ("move" | "wait"), start, duration, from, to] => {
                let Some(draft) = drafts.last_mut() else {
                    return Err(Error::parse(no, "action before any `agent` line"));
                };
                let (start, duration, from, to) = (real(start)?, real(duration)?, int(from)?, int(to)?);
                if duration <= 0.0 {
                    return Err(Error::parse(no, "duration must be positive"));
                }
                let kind = if *kind == "move" {
                    ActionKind::Move { from, to }
                } else if from == to {
                    ActionKind::Wait { at: from }
                } else {
                    return Err(Error::parse(no, "wait must repeat its vertex"));
                };
                draft.actions.push(Action { kind, duration }.at(start));
            }
            _ => return Err(Error::parse(no, format!("unrecognized line `{line}`"))),
        }
    }

    drafts.sort_by_key(|d| d.agent);
    let mut plans = Vec::with_capacity(drafts.len());
    for (expected, d) in drafts.into_iter().enumerate() {
        if d.agent != expected {
            return Err(Error::parse(
                d.line,
                format!("agent ids must be 0..n without repeats, found {}", d.agent),
            ));
        }
        let start = match (d.start, d.actions.first()) {
            (Some(s), _) => s,
            (None, Some(first)) => first.kind().source(),
            (None, None) => return Err(Error::parse(d.line, "empty plan needs a start vertex")),
        };
        plans.push(Plan {
            agent: d.agent,
            start,
            actions: d.actions,
        });
    }
    Ok(plans)
}
