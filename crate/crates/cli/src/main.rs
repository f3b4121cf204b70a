//! Command-line interface over the polygon-sandpile library: group and
//! spanning-tree computation, relation matrices, method comparison,
//! chip-firing simulation and cross-validation sweeps.
//!
//! Exit codes: 0 on success (and full agreement for `compare`/`sweep`),
//! 1 on cross-check mismatch or internal inconsistency, 2 on usage errors.

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use polygon_sandpile::graph::{MultiGraph, PolygonSpec, Topology};
use polygon_sandpile::group::{
    sandpile_group, spanning_trees, GroupMethod, GroupOutcome, TreeMethod,
};
use polygon_sandpile::matrix::IntegerMatrix;
use polygon_sandpile::relations;
use polygon_sandpile::sandpile::{
    enumerate_recurrent, find_identity, stabilize, stabilize_shuffled, Configuration,
};
use polygon_sandpile::{BigInt, Error};

#[derive(Parser)]
#[command(
    name = "polygon-sandpile",
    version,
    about = "Exact sandpile groups and spanning-tree counts of polygon chains, rings and twisted rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the sandpile group (invariant factors and order).
    Group(GroupArgs),
    /// Count spanning trees.
    Trees(TreesArgs),
    /// Print the relation matrix of a ring or twisted ring.
    Matrix(MatrixArgs),
    /// Run every applicable method and report agreement.
    Compare(CompareArgs),
    /// Chip-firing simulation: stabilization, recurrent states, identity.
    Simulate(SimulateArgs),
    /// Cross-validate methods over inclusive parameter ranges.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Topology: chain, ring or twisted.
    #[arg(short = 't', long, value_name = "TOPOLOGY")]
    topology: Option<String>,
    /// Shorthand for --topology chain.
    #[arg(long)]
    chain: bool,
    /// Shorthand for --topology ring.
    #[arg(long)]
    ring: bool,
    /// Shorthand for --topology twisted.
    #[arg(long)]
    twisted: bool,
    /// Number of polygons (used with the uniform -a/-b arcs).
    #[arg(short)]
    n: Option<usize>,
    /// Uniform top arc length per polygon.
    #[arg(short)]
    a: Option<u64>,
    /// Uniform bottom arc length per polygon.
    #[arg(short)]
    b: Option<u64>,
    /// Per-polygon top arcs, comma-separated (alternative to -a).
    #[arg(long, value_name = "LIST")]
    a_list: Option<String>,
    /// Per-polygon bottom arcs, comma-separated (alternative to -b).
    #[arg(long, value_name = "LIST")]
    b_list: Option<String>,
}

#[derive(Args)]
struct GroupArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// auto, laplacian, edge, relation or closed.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Recompute through an independent presentation and fail on mismatch.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct TreesArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// auto, laplacian, det-relation or closed.
    #[arg(long, default_value = "auto")]
    method: String,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct MatrixArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// auto, uniform (printed closed form) or general (transfer products).
    #[arg(long, default_value = "auto")]
    form: String,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Initial chip heights on all vertices in vertex order (sink entry is
    /// ignored); defaults to all zeros.
    #[arg(long, value_name = "LIST")]
    heights: Option<String>,
    /// Sink vertex index.
    #[arg(long, default_value_t = 0)]
    sink: usize,
    /// Enumerate recurrent configurations and compare with the tree count.
    #[arg(long)]
    recurrent: bool,
    /// Locate the identity of the recurrent group.
    #[arg(long)]
    identity: bool,
    /// Stabilize with a seeded random toppling order instead of FIFO.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of stable configurations to enumerate.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Inclusive range for the polygon count, e.g. "2..6" or "4".
    #[arg(long, value_name = "RANGE")]
    n: String,
    /// Inclusive range for the uniform top arc.
    #[arg(long, value_name = "RANGE")]
    a: String,
    /// Inclusive range for the uniform bottom arc.
    #[arg(long, value_name = "RANGE")]
    b: String,
    /// Comma-separated topologies to sweep.
    #[arg(long, default_value = "ring,twisted")]
    topologies: String,
    #[arg(long, default_value = "csv")]
    format: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Group(args) => cmd_group(args),
        Command::Trees(args) => cmd_trees(args),
        Command::Matrix(args) => cmd_matrix(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidSpec(_)
                | Error::Domain(_)
                | Error::UnknownVertex(_)
                | Error::Unsupported { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

fn parse_format(s: &str) -> Result<Format, Error> {
    match s {
        "text" => Ok(Format::Text),
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(Error::InvalidSpec(format!(
            "unknown format {other:?} (expected text, json or csv)"
        ))),
    }
}

fn parse_u64_list(s: &str, what: &str) -> Result<Vec<u64>, Error> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidSpec(format!("bad {what} entry {part:?}")))
        })
        .collect()
}

impl SpecArgs {
    fn resolve(&self) -> Result<PolygonSpec, Error> {
        let mut topology: Option<Topology> = None;
        if let Some(t) = &self.topology {
            topology = Some(t.parse()?);
        }
        for (flag, value) in [
            (self.chain, Topology::Chain),
            (self.ring, Topology::Ring),
            (self.twisted, Topology::Twisted),
        ] {
            if flag {
                if topology.is_some() {
                    return Err(Error::InvalidSpec(
                        "give exactly one topology (via --topology or one of --chain/--ring/--twisted)".into(),
                    ));
                }
                topology = Some(value);
            }
        }
        let topology = topology.ok_or_else(|| {
            Error::InvalidSpec(
                "a topology is required (--topology or --chain/--ring/--twisted)".into(),
            )
        })?;

        match (&self.a_list, &self.b_list) {
            (Some(a), Some(b)) => {
                if self.a.is_some() || self.b.is_some() {
                    return Err(Error::InvalidSpec(
                        "give either uniform -a/-b or --a-list/--b-list, not both".into(),
                    ));
                }
                let a = parse_u64_list(a, "--a-list")?;
                let b = parse_u64_list(b, "--b-list")?;
                if let Some(n) = self.n {
                    if n != a.len() {
                        return Err(Error::InvalidSpec(format!(
                            "-n {n} contradicts the {} listed polygons",
                            a.len()
                        )));
                    }
                }
                PolygonSpec::new(topology, a, b)
            }
            (None, None) => {
                let (Some(n), Some(a), Some(b)) = (self.n, self.a, self.b) else {
                    return Err(Error::InvalidSpec(
                        "uniform specs need -n, -a and -b".into(),
                    ));
                };
                PolygonSpec::uniform(topology, n, a, b)
            }
            _ => Err(Error::InvalidSpec(
                "--a-list and --b-list must be given together".into(),
            )),
        }
    }
}

fn spec_json(spec: &PolygonSpec) -> serde_json::Value {
    json!({
        "topology": spec.topology().as_str(),
        "n": spec.polygon_count(),
        "a": spec.top_arcs(),
        "b": spec.bottom_arcs(),
    })
}

fn spec_csv_fields(spec: &PolygonSpec) -> (String, String, String) {
    let join = |arcs: &[u64]| {
        arcs.iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(";")
    };
    (
        spec.polygon_count().to_string(),
        join(spec.top_arcs()),
        join(spec.bottom_arcs()),
    )
}

fn factor_strings(factors: &[BigInt]) -> Vec<String> {
    factors.iter().map(BigInt::to_string).collect()
}

fn cmd_group(args: GroupArgs) -> Result<ExitCode, Error> {
    let format = parse_format(&args.format)?;
    let spec = args.spec.resolve()?;
    let method: GroupMethod = args.method.parse()?;
    let outcome = sandpile_group(&spec, method, args.verify)?;
    print_group(&spec, &outcome, format);
    Ok(ExitCode::SUCCESS)
}

fn print_group(spec: &PolygonSpec, outcome: &GroupOutcome, format: Format) {
    match format {
        Format::Text => {
            println!("sandpile group: {}", outcome.group);
            println!("order: {}", outcome.group.order());
            println!(
                "invariant factors: [{}]",
                factor_strings(outcome.group.invariant_factors()).join(", ")
            );
            println!("method: {}", outcome.method);
            println!(
                "cross-checked: {}",
                if outcome.cross_checked { "yes" } else { "no" }
            );
        }
        Format::Json => {
            let value = json!({
                "spec": spec_json(spec),
                "method": outcome.method,
                "invariant_factors": factor_strings(outcome.group.invariant_factors()),
                "order": outcome.group.order().to_string(),
                "cross_checked": outcome.cross_checked,
            });
            println!("{value}");
        }
        Format::Csv => {
            let (n, a, b) = spec_csv_fields(spec);
            println!("n,a,b,topology,method,order,factors");
            println!(
                "{n},{a},{b},{},{},{},{}",
                spec.topology(),
                outcome.method,
                outcome.group.order(),
                factor_strings(outcome.group.invariant_factors()).join(";")
            );
        }
    }
}

fn cmd_trees(args: TreesArgs) -> Result<ExitCode, Error> {
    let format = parse_format(&args.format)?;
    let spec = args.spec.resolve()?;
    let method: TreeMethod = args.method.parse()?;
    let outcome = spanning_trees(&spec, method)?;
    match format {
        Format::Text => {
            println!("spanning trees: {}", outcome.count);
            println!("method: {}", outcome.method);
        }
        Format::Json => {
            let value = json!({
                "spec": spec_json(&spec),
                "method": outcome.method,
                "count": outcome.count.to_string(),
            });
            println!("{value}");
        }
        Format::Csv => {
            let (n, a, b) = spec_csv_fields(&spec);
            println!("n,a,b,topology,method,count");
            println!(
                "{n},{a},{b},{},{},{}",
                spec.topology(),
                outcome.method,
                outcome.count
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn relation_matrix_auto(spec: &PolygonSpec, form: &str) -> Result<(String, IntegerMatrix), Error> {
    let uniform_form = || -> Result<IntegerMatrix, Error> {
        let Some((a, b)) = spec.as_uniform() else {
            return Err(Error::unsupported(
                "uniform relation matrix for a non-uniform spec".to_string(),
                "general form",
            ));
        };
        let (hi, lo) = (a.max(b), a.min(b));
        relations::uniform_relation_matrix(spec.polygon_count(), hi, lo, spec.topology())
    };
    let general_form = || -> Result<IntegerMatrix, Error> {
        match spec.topology() {
            Topology::Ring => relations::relation_matrix_ring(spec),
            Topology::Twisted => relations::relation_matrix_twisted(spec),
            Topology::Chain => Err(Error::unsupported(
                "relation matrix for a chain".to_string(),
                "edge presentation",
            )),
        }
    };
    match form {
        "uniform" => Ok(("uniform".into(), uniform_form()?)),
        "general" => Ok(("general".into(), general_form()?)),
        "auto" => {
            if let Ok(m) = uniform_form() {
                Ok(("uniform".into(), m))
            } else {
                Ok(("general".into(), general_form()?))
            }
        }
        other => Err(Error::InvalidSpec(format!(
            "unknown form {other:?} (expected auto, uniform or general)"
        ))),
    }
}

fn cmd_matrix(args: MatrixArgs) -> Result<ExitCode, Error> {
    let format = parse_format(&args.format)?;
    let spec = args.spec.resolve()?;
    let (form, matrix) = relation_matrix_auto(&spec, &args.form)?;
    match format {
        Format::Text => {
            println!("relation matrix ({form} form):");
            print!("{matrix}");
            println!("determinant: {}", matrix.determinant()?);
        }
        Format::Json => {
            let value = json!({
                "spec": spec_json(&spec),
                "form": form,
                "rows": matrix.rows_as_decimal(),
                "determinant": matrix.determinant()?.to_string(),
            });
            println!("{value}");
        }
        Format::Csv => {
            for row in matrix.rows_as_decimal() {
                println!("{}", row.join(","));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

struct MethodReport {
    method: &'static str,
    factors: Vec<BigInt>,
    order: BigInt,
    runtime_ms: f64,
}

/// Runs every applicable group method; methods outside their hypotheses are
/// skipped, any other failure is an error.
fn run_all_methods(spec: &PolygonSpec) -> Result<Vec<MethodReport>, Error> {
    let mut reports = Vec::new();
    for method in [
        GroupMethod::Laplacian,
        GroupMethod::Edge,
        GroupMethod::Relation,
        GroupMethod::Closed,
    ] {
        let start = Instant::now();
        match sandpile_group(spec, method, false) {
            Ok(outcome) => reports.push(MethodReport {
                method: outcome.method,
                factors: outcome.group.invariant_factors().to_vec(),
                order: outcome.group.order().clone(),
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            }),
            Err(Error::Unsupported { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(reports)
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode, Error> {
    let format = parse_format(&args.format)?;
    let spec = args.spec.resolve()?;
    let reports = run_all_methods(&spec)?;
    let agree = reports.windows(2).all(|w| w[0].factors == w[1].factors);
    match format {
        Format::Text => {
            for r in &reports {
                println!(
                    "{}: order {}, factors [{}]  ({:.2} ms)",
                    r.method,
                    r.order,
                    factor_strings(&r.factors).join(", "),
                    r.runtime_ms
                );
            }
            if agree {
                println!(
                    "agree: order {}, factors [{}]",
                    reports[0].order,
                    factor_strings(&reports[0].factors).join(", ")
                );
            } else {
                println!("disagree");
            }
        }
        Format::Json => {
            let value = json!({
                "spec": spec_json(&spec),
                "methods": reports.iter().map(|r| json!({
                    "method": r.method,
                    "invariant_factors": factor_strings(&r.factors),
                    "order": r.order.to_string(),
                    "runtime_ms": r.runtime_ms,
                })).collect::<Vec<_>>(),
                "agree": agree,
            });
            println!("{value}");
        }
        Format::Csv => {
            let (n, a, b) = spec_csv_fields(&spec);
            println!("n,a,b,topology,method,order,factors,runtime_ms");
            for r in &reports {
                println!(
                    "{n},{a},{b},{},{},{},{},{:.3}",
                    spec.topology(),
                    r.method,
                    r.order,
                    factor_strings(&r.factors).join(";"),
                    r.runtime_ms
                );
            }
        }
    }
    Ok(if agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn graph_json(graph: &MultiGraph) -> serde_json::Value {
    json!({
        "vertices": graph.vertex_names(),
        "edges": graph.edges().iter().map(|e| json!({
            "label": e.label,
            "tail": graph.vertex_name(e.tail),
            "head": graph.vertex_name(e.head),
        })).collect::<Vec<_>>(),
    })
}

fn heights_json(graph: &MultiGraph, config: &Configuration) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for v in 0..graph.vertex_count() {
        if v == config.sink() {
            continue;
        }
        map.insert(graph.vertex_name(v).to_string(), json!(config.height(v)));
    }
    serde_json::Value::Object(map)
}

fn heights_text(graph: &MultiGraph, config: &Configuration) -> String {
    // Merged vertex names contain '=', so pair with ':' here.
    (0..graph.vertex_count())
        .filter(|&v| v != config.sink())
        .map(|v| format!("{}:{}", graph.vertex_name(v), config.height(v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, Error> {
    let format = parse_format(&args.format)?;
    let spec = args.spec.resolve()?;
    let graph = spec.build();

    if args.recurrent {
        let recurrent = enumerate_recurrent(&graph, args.sink, args.budget)?;
        let trees = graph.reduced_laplacian(args.sink)?.determinant()?;
        let matches = BigInt::from(recurrent.len() as u64) == trees;
        match format {
            Format::Json => {
                let value = json!({
                    "spec": spec_json(&spec),
                    "sink": graph.vertex_name(args.sink),
                    "recurrent_count": recurrent.len(),
                    "tree_count": trees.to_string(),
                    "match": matches,
                });
                println!("{value}");
            }
            _ => {
                println!("recurrent configurations: {}", recurrent.len());
                println!("reduced laplacian determinant: {trees}");
                println!("match: {}", if matches { "yes" } else { "no" });
            }
        }
        return Ok(if matches {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }

    if args.identity {
        let identity = find_identity(&graph, args.sink, args.budget)?;
        match format {
            Format::Json => {
                let value = json!({
                    "spec": spec_json(&spec),
                    "sink": graph.vertex_name(args.sink),
                    "identity": heights_json(&graph, &identity),
                });
                println!("{value}");
            }
            _ => println!("identity: {}", heights_text(&graph, &identity)),
        }
        return Ok(ExitCode::SUCCESS);
    }

    let heights = match &args.heights {
        Some(list) => {
            let values = parse_u64_list(list, "--heights")?;
            Configuration::new(&graph, args.sink, values)?
        }
        None => Configuration::zero(&graph, args.sink)?,
    };
    let outcome = match args.seed {
        Some(seed) => stabilize_shuffled(&graph, &heights, seed),
        None => stabilize(&graph, &heights),
    };
    match format {
        Format::Json => {
            let value = json!({
                "spec": spec_json(&spec),
                "graph": graph_json(&graph),
                "sink": graph.vertex_name(args.sink),
                "initial": heights_json(&graph, &heights),
                "stable": heights_json(&graph, &outcome.config),
                "total_topples": outcome.total_topples,
            });
            println!("{value}");
        }
        _ => {
            print!("{}", graph.describe());
            println!("initial: {}", heights_text(&graph, &heights));
            println!("stable:  {}", heights_text(&graph, &outcome.config));
            println!("total topples: {}", outcome.total_topples);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_range(s: &str, what: &str) -> Result<(u64, u64), Error> {
    let parse_end = |part: &str| -> Result<u64, Error> {
        part.trim()
            .parse::<u64>()
            .map_err(|_| Error::InvalidSpec(format!("bad {what} range {s:?}")))
    };
    match s.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (parse_end(lo)?, parse_end(hi)?);
            if lo > hi {
                return Err(Error::InvalidSpec(format!("empty {what} range {s:?}")));
            }
            Ok((lo, hi))
        }
        None => {
            let v = parse_end(s)?;
            Ok((v, v))
        }
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let format = parse_format(&args.format)?;
    let (n_lo, n_hi) = parse_range(&args.n, "-n")?;
    if n_lo < 2 {
        return Err(Error::InvalidSpec(
            "sweep covers rings and twisted rings, so n starts at 2".into(),
        ));
    }
    let (a_lo, a_hi) = parse_range(&args.a, "-a")?;
    let (b_lo, b_hi) = parse_range(&args.b, "-b")?;
    let topologies = args
        .topologies
        .split(',')
        .map(|t| t.trim().parse::<Topology>())
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows: Vec<serde_json::Value> = Vec::new();
    let mut csv_lines: Vec<String> = Vec::new();
    let mut instances = 0usize;
    let mut disagreements = 0usize;
    for n in n_lo..=n_hi {
        for a in a_lo..=a_hi {
            for b in b_lo..=b_hi {
                for &topology in &topologies {
                    let spec = PolygonSpec::uniform(topology, n as usize, a, b)?;
                    let reports = run_all_methods(&spec)?;
                    let agree = reports.windows(2).all(|w| w[0].factors == w[1].factors);
                    instances += 1;
                    if !agree {
                        disagreements += 1;
                    }
                    for r in &reports {
                        match format {
                            Format::Json => rows.push(json!({
                                "n": n,
                                "a": a,
                                "b": b,
                                "topology": topology.as_str(),
                                "method": r.method,
                                "order": r.order.to_string(),
                                "invariant_factors": factor_strings(&r.factors),
                                "runtime_ms": r.runtime_ms,
                                "agree": agree,
                            })),
                            _ => csv_lines.push(format!(
                                "{n},{a},{b},{topology},{},{},{},{:.3}",
                                r.method,
                                r.order,
                                factor_strings(&r.factors).join(";"),
                                r.runtime_ms
                            )),
                        }
                    }
                }
            }
        }
    }

    match format {
        Format::Json => {
            let value = json!({
                "rows": rows,
                "summary": {"instances": instances, "disagreements": disagreements},
            });
            println!("{value}");
        }
        Format::Csv => {
            println!("n,a,b,topology,method,order,factors,runtime_ms");
            for line in &csv_lines {
                println!("{line}");
            }
            eprintln!("instances: {instances}, disagreements: {disagreements}");
        }
        Format::Text => {
            for line in &csv_lines {
                println!("{line}");
            }
            println!("instances: {instances}, {disagreements} disagreements");
        }
    }
    Ok(if disagreements == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
