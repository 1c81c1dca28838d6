use std::error::Error as StdError;
use std::path::Path;

use mapt_core::layers::{self, cutfile};
use mapt_core::mc::{self, CheckOptions, Heuristic, Indicator, Order, Query, Strategy};
use mapt_core::model::{fixtures, validate};
use mapt_core::petri;
use mapt_core::semantics::graph::Graph;
use mapt_core::semantics::{Bound, System};
use mapt_core::{Model, Semantics};
use serde::Serialize;

use crate::{Format, ModelArgs, RunArgs};

pub type CmdResult = Result<bool, Box<dyn StdError>>;

pub fn load_model(spec: &str) -> Result<Model, Box<dyn StdError>> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        return Ok(fixtures::load(name)?);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| format!("cannot read `{spec}`: {e}"))?;
    Ok(Model::from_json(&text)?)
}

fn emit<T: Serialize>(record: &T) -> Result<(), Box<dyn StdError>> {
    println!("{}", serde_json::to_string(record)?);
    Ok(())
}

fn system<'a>(m: &'a Model, run: &RunArgs) -> Result<System<'a>, Box<dyn StdError>> {
    let bound = Bound::parse(m, &run.bounds)?;
    Ok(System::new(m, run.semantics.into(), bound))
}

#[derive(Serialize)]
struct ValidateRecord<'a> {
    command: &'static str,
    strongly_live: bool,
    liveness: Vec<String>,
    acyclic: bool,
    acyclicity: Vec<String>,
    notes: &'a [String],
    mapt: bool,
}

pub fn validate(args: &ModelArgs, allow_missing_x: bool) -> CmdResult {
    let m = load_model(&args.model)?;
    let report = validate::validate(&m, allow_missing_x);
    let liveness: Vec<String> = report.liveness.iter().map(|v| v.to_string()).collect();
    let acyclicity: Vec<String> = report.acyclicity.iter().map(|v| v.to_string()).collect();
    match args.format {
        Format::Json => emit(&ValidateRecord {
            command: "validate",
            strongly_live: report.strongly_live,
            liveness,
            acyclic: report.acyclic,
            acyclicity,
            notes: &report.notes,
            mapt: report.is_mapt(),
        })?,
        Format::Text => {
            let verdict = |ok: bool| if ok { "ok" } else { "violated" };
            println!("strong liveness: {}", verdict(report.strongly_live));
            for v in &liveness {
                println!("  - {v}");
            }
            println!("acyclicity: {}", verdict(report.acyclic));
            for v in &acyclicity {
                println!("  - {v}");
            }
            for n in &report.notes {
                println!("note: {n}");
            }
            println!("MAPT: {}", if report.is_mapt() { "yes" } else { "no" });
        }
    }
    Ok(report.is_mapt())
}

#[derive(Serialize)]
struct ExploreRecord {
    command: &'static str,
    semantics: Semantics,
    states: usize,
    edges: usize,
    finals: usize,
}

pub fn explore(args: &ModelArgs, run: &RunArgs, dot: Option<&Path>, dot_cap: usize) -> CmdResult {
    let m = load_model(&args.model)?;
    let sys = system(&m, run)?;
    let g = Graph::explore(&sys, run.budget)?;
    let finals = (0..g.len()).filter(|&i| g.is_final(i)).count();
    if let Some(path) = dot {
        std::fs::write(path, g.to_dot(&m, dot_cap)?).map_err(|e| format!("cannot write `{}`: {e}", path.display()))?;
    }
    match args.format {
        Format::Json => emit(&ExploreRecord {
            command: "explore",
            semantics: sys.semantics,
            states: g.len(),
            edges: g.edge_count(),
            finals,
        })?,
        Format::Text => {
            println!("semantics: {}", sys.semantics);
            println!("states: {}", g.len());
            println!("edges: {}", g.edge_count());
            println!("final states: {finals}");
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct CutRecord {
    t: u64,
    localities: Vec<String>,
    clocks: Vec<u64>,
}

pub fn cuts(args: &ModelArgs, exclude_endpoints: bool, select: bool) -> CmdResult {
    let m = load_model(&args.model)?;
    let list = if select {
        layers::select_cut(&m, exclude_endpoints)?.into_iter().collect()
    } else {
        layers::find_cuts(&m, exclude_endpoints)?
    };
    match args.format {
        Format::Json => {
            for c in &list {
                emit(&CutRecord {
                    t: c.t,
                    localities: c.locality_names(&m),
                    clocks: c.clocks.clone(),
                })?;
            }
        }
        Format::Text => print!("{}", cutfile::write(&m, &list)),
    }
    Ok(true)
}

pub struct CheckArgs {
    pub query: String,
    pub strategy: Strategy,
    pub heuristic: Option<String>,
    pub order: Option<Order>,
    pub cuts: String,
    pub strong: Option<Vec<String>>,
    pub weak: Option<Vec<String>>,
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    command: &'static str,
    query: String,
    semantics: Semantics,
    strategy: Strategy,
    heuristic: Option<&'a str>,
    holds: bool,
    expanded: usize,
    borders: usize,
    clusters: usize,
    peak_frontier: usize,
    cut_unclassified: usize,
}

pub fn check(args: &ModelArgs, run: &RunArgs, c: &CheckArgs) -> CmdResult {
    let base = load_model(&args.model)?;
    let m = match (&c.strong, &c.weak) {
        (Some(strong), _) => base.with_strong(strong)?,
        (None, Some(weak)) => {
            for w in weak {
                if base.component_index(w).is_none() {
                    return Err(format!("unknown component `{w}`").into());
                }
            }
            let strong: Vec<String> = base
                .component_names()
                .into_iter()
                .filter(|n| !weak.contains(n))
                .collect();
            base.with_strong(&strong)?
        }
        (None, None) => base,
    };
    let sys = system(&m, run)?;
    let query = Query::parse(&m, &c.query)?;
    let heuristic = match &c.heuristic {
        Some(spec) => {
            let h = Heuristic::parse(&m, spec)?;
            Some(match c.order {
                Some(o) => h.with_order(o),
                None => h,
            })
        }
        None => None,
    };
    let cuts = if c.cuts == "auto" {
        None
    } else {
        let text = std::fs::read_to_string(&c.cuts).map_err(|e| format!("cannot read `{}`: {e}", c.cuts))?;
        Some(cutfile::parse(&m, &text)?)
    };
    let opts = CheckOptions {
        strategy: c.strategy,
        cuts,
        heuristic,
        budget: run.budget,
    };
    let out = mc::check(&sys, &query, &opts)?;
    let s = &out.stats;
    match args.format {
        Format::Json => emit(&CheckRecord {
            command: "check",
            query: query.to_string(),
            semantics: sys.semantics,
            strategy: c.strategy,
            heuristic: opts.heuristic.as_ref().map(|h| h.name.as_str()),
            holds: out.holds,
            expanded: s.expanded,
            borders: s.borders,
            clusters: s.clusters,
            peak_frontier: s.peak_frontier,
            cut_unclassified: s.cut_unclassified,
        })?,
        Format::Text => {
            println!("query: {query}");
            println!("verdict: {}", out.holds);
            println!("expanded: {}", s.expanded);
            println!("borders: {}", s.borders);
            println!("clusters: {}", s.clusters);
            println!("peak frontier: {}", s.peak_frontier);
            if s.cut_unclassified > 0 {
                println!("unclassified cut states: {}", s.cut_unclassified);
            }
        }
    }
    Ok(out.holds)
}

#[derive(Serialize)]
struct Bounds<'a> {
    indicator: &'a str,
    min: String,
    max: String,
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    command: &'static str,
    state: String,
    bounds: Vec<Bounds<'a>>,
}

#[derive(Serialize)]
struct SweepSummary {
    command: &'static str,
    versions: usize,
    expanded: usize,
}

pub fn sweep(args: &ModelArgs, run: &RunArgs, specs: &[String]) -> CmdResult {
    let m = load_model(&args.model)?;
    let sys = system(&m, run)?;
    let indicators = specs
        .iter()
        .map(|s| Indicator::parse(&m, s))
        .collect::<Result<Vec<_>, _>>()?;
    let result = mc::sweep_indicators(&sys, &indicators, run.budget)?;
    for f in &result.finals {
        let bounds: Vec<Bounds<'_>> = result
            .names
            .iter()
            .zip(&f.bounds)
            .map(|(n, r)| Bounds {
                indicator: n,
                min: r.min.to_string(),
                max: r.max.to_string(),
            })
            .collect();
        match args.format {
            Format::Json => emit(&SweepRecord {
                command: "sweep",
                state: f.state.display(&m).to_string(),
                bounds,
            })?,
            Format::Text => {
                let parts: Vec<String> = bounds
                    .iter()
                    .map(|b| format!("{} in [{}, {}]", b.indicator, b.min, b.max))
                    .collect();
                println!("{}  {}", f.state.display(&m), parts.join("  "));
            }
        }
    }
    match args.format {
        Format::Json => emit(&SweepSummary {
            command: "sweep-summary",
            versions: result.finals.len(),
            expanded: result.expanded,
        })?,
        Format::Text => println!("{} final versions, {} states expanded", result.finals.len(), result.expanded),
    }
    Ok(true)
}

#[derive(Serialize)]
struct PetriRecord<'a> {
    command: &'static str,
    semantics: Semantics,
    transitions: Vec<&'a str>,
    equivalent: bool,
    states: usize,
    divergence: Option<&'a str>,
}

pub fn petri_check(args: &ModelArgs, run: &RunArgs) -> CmdResult {
    let m = load_model(&args.model)?;
    let semantics: Semantics = run.semantics.into();
    let bound = Bound::parse(&m, &run.bounds)?;
    let net = petri::translate(&m, semantics == Semantics::Accelerated);
    let report = petri::state_space_equiv(&m, &net, &bound, semantics, run.budget)?;
    match args.format {
        Format::Json => emit(&PetriRecord {
            command: "petri-check",
            semantics,
            transitions: net.transitions.iter().map(|t| t.name.as_str()).collect(),
            equivalent: report.equivalent,
            states: report.states,
            divergence: report.divergence.as_deref(),
        })?,
        Format::Text => {
            print!("{}", net.describe());
            println!("equivalent: {} ({} states compared)", report.equivalent, report.states);
            if let Some(d) = &report.divergence {
                println!("divergence {d}");
            }
        }
    }
    Ok(report.equivalent)
}
