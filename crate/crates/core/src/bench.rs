//! Incremental-agent benchmark protocol, its CSV records and the
//! expansion-ratio summary.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::ccbs::{solve_with, Heuristics, SolverConfig, Status, Variant};
use crate::graph::{Graph, ScenEntry};
use crate::instance::Instance;
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "map",
    "scen",
    "variant",
    "n",
    "solved",
    "soc",
    "expansions",
    "runtime",
    "precompute",
];

/// One solver run. `soc` is set iff `solved`; timings are in seconds and
/// absent when the sweep was run without timing.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub map: String,
    pub scen: String,
    pub variant: String,
    pub n: usize,
    pub solved: bool,
    pub soc: Option<f64>,
    pub expansions: usize,
    pub runtime: Option<f64>,
    pub precompute: Option<f64>,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv(records: &[BenchRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("writing to memory");
    for r in records {
        w.write_record([
            r.map.clone(),
            r.scen.clone(),
            r.variant.clone(),
            r.n.to_string(),
            r.solved.to_string(),
            opt(r.soc),
            r.expansions.to_string(),
            opt(r.runtime),
            opt(r.precompute),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| Error::parse(1, e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::parse(1, format!("expected header `{}`", CSV_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let no = i + 2;
        let row = row.map_err(|e| Error::parse(no, e.to_string()))?;
        let field = |k: usize| row.get(k).unwrap_or("");
        let bad = |k: usize| Error::parse(no, format!("bad {} `{}`", CSV_HEADER[k], field(k)));
        let real = |k: usize| -> Result<Option<f64>> {
            match field(k) {
                "" => Ok(None),
                f => f.parse().map(Some).map_err(|_| bad(k)),
            }
        };
        let rec = BenchRecord {
            map: field(0).to_string(),
            scen: field(1).to_string(),
            variant: field(2).to_string(),
            n: field(3).parse().map_err(|_| bad(3))?,
            solved: field(4).parse().map_err(|_| bad(4))?,
            soc: real(5)?,
            expansions: field(6).parse().map_err(|_| bad(6))?,
            runtime: real(7)?,
            precompute: real(8)?,
        };
        if rec.solved != rec.soc.is_some() {
            return Err(Error::parse(no, "soc must be present exactly when solved"));
        }
        out.push(rec);
    }
    Ok(out)
}

/// A named scenario: ordered start/goal pairs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub entries: Vec<ScenEntry>,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub time_limit: Duration,
    pub radius: f64,
    /// Upper bound on `n`; defaults to the scenario length.
    pub max_agents: Option<usize>,
    /// Record runtimes; without them the CSV is reproducible byte for byte.
    pub timing: bool,
}

fn run_one(map: &str, graph: &Graph, scen: &Scenario, variant: Variant, opts: &BenchOptions) -> Vec<BenchRecord> {
    let mut config = SolverConfig::variant(variant);
    config.time_limit = opts.time_limit;
    let top = opts.max_agents.unwrap_or(usize::MAX).min(scen.entries.len());
    let mut out = Vec::new();
    for n in 2..=top {
        let mut rec = BenchRecord {
            map: map.to_string(),
            scen: scen.name.clone(),
            variant: variant.name().to_string(),
            n,
            solved: false,
            soc: None,
            expansions: 0,
            runtime: None,
            precompute: None,
        };
        if let Ok(instance) = Instance::from_scen(graph.clone(), &scen.entries, n, opts.radius) {
            let t0 = Instant::now();
            let heuristics = Heuristics::new(&instance);
            let precompute = t0.elapsed();
            let sol = solve_with(&instance, &config, &heuristics, precompute);
            rec.solved = sol.status == Status::Solved;
            rec.soc = rec.solved.then_some(sol.soc);
            rec.expansions = sol.expanded;
            if opts.timing {
                rec.runtime = Some(sol.runtime.as_secs_f64());
                rec.precompute = Some(precompute.as_secs_f64());
            }
        }
        let solved = rec.solved;
        out.push(rec);
        if !solved {
            break;
        }
    }
    out
}

/// For every scenario and variant: `n = 2, 3, ...` agents (the first `n`
/// pairs) until the first unsolved instance, which is recorded too. Runs
/// in parallel; records come back ordered by scenario, variant, `n`.
pub fn run_protocol(
    map: &str,
    graph: &Graph,
    scenarios: &[Scenario],
    variants: &[Variant],
    opts: &BenchOptions,
) -> Vec<BenchRecord> {
    let jobs: Vec<(&Scenario, Variant)> = scenarios
        .iter()
        .flat_map(|s| variants.iter().map(move |&v| (s, v)))
        .collect();
    jobs.into_par_iter()
        .map(|(s, v)| run_one(map, graph, s, v, opts))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Median ratio of expansions (variant b over variant a) for one map and
/// agent count, or over everything when `n` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub map: String,
    pub n: Option<usize>,
    pub common: usize,
    pub median: Option<f64>,
}

fn single_variant<'a>(records: &'a [BenchRecord], which: Option<&str>) -> Result<Vec<&'a BenchRecord>> {
    let picked: Vec<&BenchRecord> = records
        .iter()
        .filter(|r| which.is_none_or(|w| r.variant == w))
        .collect();
    if which.is_none() && picked.iter().any(|r| r.variant != picked[0].variant) {
        return Err(Error::invalid("records mix several variants; pick one"));
    }
    Ok(picked)
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    })
}

/// Pairs runs of `a` and `b` on the same `(map, scen, n)` that both
/// solved and reports the median of `b.expansions / a.expansions` per
/// `(map, n)` plus one overall row per map.
pub fn expansion_ratio(
    a: &[BenchRecord],
    variant_a: Option<&str>,
    b: &[BenchRecord],
    variant_b: Option<&str>,
) -> Result<Vec<RatioRow>> {
    let a = single_variant(a, variant_a)?;
    let b = single_variant(b, variant_b)?;
    let base: HashMap<(&str, &str, usize), usize> = a
        .iter()
        .filter(|r| r.solved)
        .map(|r| ((r.map.as_str(), r.scen.as_str(), r.n), r.expansions))
        .collect();
    let mut per_n: BTreeMap<(&str, usize), Vec<f64>> = BTreeMap::new();
    let mut all_n: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut seen: BTreeMap<(&str, usize), ()> = BTreeMap::new();
    for r in &a {
        seen.insert((r.map.as_str(), r.n), ());
    }
    for r in &b {
        seen.insert((r.map.as_str(), r.n), ());
        if !r.solved {
            continue;
        }
        if let Some(&ea) = base.get(&(r.map.as_str(), r.scen.as_str(), r.n)) {
            if ea > 0 {
                let ratio = r.expansions as f64 / ea as f64;
                per_n.entry((r.map.as_str(), r.n)).or_default().push(ratio);
                all_n.entry(r.map.as_str()).or_default().push(ratio);
            }
        }
    }
    let mut rows = Vec::new();
    let mut maps: Vec<&str> = seen.keys().map(|(m, _)| *m).collect();
    maps.dedup();
    for map in maps {
        for &(m, n) in seen.keys().filter(|(m, _)| *m == map) {
            let xs = per_n.get(&(m, n)).cloned().unwrap_or_default();
            rows.push(RatioRow {
                map: m.to_string(),
                n: Some(n),
                common: xs.len(),
                median: median(xs),
            });
        }
        let xs = all_n.get(map).cloned().unwrap_or_default();
        rows.push(RatioRow {
            map: map.to_string(),
            n: None,
            common: xs.len(),
            median: median(xs),
        });
    }
    Ok(rows)
}

/// CSV table `map,n,common,ratio` with the ratio as a percentage; empty
/// cells mark agent counts without commonly solved instances.
pub fn format_ratio_table(rows: &[RatioRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["map", "n", "common", "ratio"])
        .expect("writing to memory");
    for r in rows {
        w.write_record([
            r.map.clone(),
            r.n.map_or_else(|| "all".to_string(), |n| n.to_string()),
            r.common.to_string(),
            r.median.map(|m| format!("{:.2}%", 100.0 * m)).unwrap_or_default(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}
