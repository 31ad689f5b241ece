use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rainbow_codes::code::{coloured_logical_basis, predicted_k, Family};
use rainbow_codes::contraction::{
    contractibility_check, contracted_code, default_families, parse_family_specs, ContractibilityReport,
    ContractedGraph, FamilySpec,
};
use rainbow_codes::distance::{exact_cost, exact_distance_upto, isd_upper_bound, DistanceReport, DEFAULT_BUDGET};
use rainbow_codes::io::{dense_rows, load_factors, read_alist};
use rainbow_codes::product::{build_simplex_graph, cartesian_product};
use rainbow_codes::subgraph::{clique_census, dump_json_lines, maximal_subgraphs, rainbow_two};
use rainbow_codes::triorth::{
    ccz_interactions, check_triorthogonality, find_bipartition, interaction_degrees, Bipartition, TriorthReport,
};
use rainbow_codes::{assemble, Assignment, Class, CssCode, Error, Side, SimplexGraph};

const EXIT_OTHER: u8 = 1;
const EXIT_SPEC: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "rainbow", version, about = "Rainbow, pin and colour CSS codes from graph products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code from a product of factor graphs and run tasks on it
    Build(BuildArgs),
    /// Contract edge colours of the product lattice and build a code on the result
    Contract(ContractArgs),
    /// Distance of a code given as two alist check matrices
    Distance(DistanceArgs),
    /// Graph statistics and subgraph dumps
    Inspect(InspectArgs),
}

#[derive(Args, Clone, Serialize)]
struct FactorArgs {
    /// Factor graphs: `cycle:L`, `fig8`, `kbip:A,B` or a JSON file; comma
    /// separated, `*N` repeats an entry
    #[arg(long = "factors", required = true, num_args = 1..)]
    factors: Vec<String>,
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SideArg {
    X,
    Z,
    Both,
}

impl SideArg {
    fn side(self) -> Option<Side> {
        match self {
            SideArg::X => Some(Side::X),
            SideArg::Z => Some(Side::Z),
            SideArg::Both => None,
        }
    }
}

#[derive(Args, Clone, Serialize)]
struct SearchArgs {
    /// Exhaustive search up to this weight
    #[arg(long)]
    wmax: Option<usize>,
    /// Information-set iterations
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "both")]
    side: SideArg,
    /// Cap on enumerated supports for exhaustive search
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Args, Clone, Serialize)]
struct OutputArgs {
    /// Directory for exported matrices
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report file (stdout when absent)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BuildArgs {
    #[command(flatten)]
    factors: FactorArgs,
    #[arg(long = "class", default_value = "generic")]
    class: String,
    /// Defaults to D
    #[arg(long)]
    x: Option<usize>,
    /// Defaults to 2
    #[arg(long)]
    z: Option<usize>,
    /// Comma separated: params, distance, triorth, logicals, export
    #[arg(long, default_value = "params")]
    tasks: String,
    #[command(flatten)]
    search: SearchArgs,
    /// Bipartition file, one 0/1 per line
    #[arg(long)]
    bipartition: Option<PathBuf>,
    /// Samples per colour when choosing coloured logicals for CCZ triples
    #[arg(long, default_value_t = 200)]
    ccz_iters: usize,
    /// Write the simplex graph as JSON
    #[arg(long)]
    dump_graph: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct ContractArgs {
    #[command(flatten)]
    factors: FactorArgs,
    /// Colours to contract, e.g. `0,3`
    #[arg(long)]
    colours: String,
    /// Family spec JSON; defaults to the struck-colour adjacency rule
    #[arg(long)]
    families: Option<PathBuf>,
    #[arg(long)]
    x: Option<usize>,
    #[arg(long)]
    z: Option<usize>,
    /// Comma separated: params, distance, logicals, export
    #[arg(long, default_value = "params")]
    tasks: String,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct DistanceArgs {
    #[arg(long)]
    hx: PathBuf,
    #[arg(long)]
    hz: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct InspectArgs {
    #[command(flatten)]
    factors: FactorArgs,
    /// Dump maximal subgraphs of these colours as JSON lines
    #[arg(long)]
    maximal: Option<String>,
    /// Dump generating rainbow supports of this colour pair as JSON lines
    #[arg(long)]
    rainbow: Option<String>,
    /// Contractibility screen for every colour
    #[arg(long)]
    screen: bool,
}

#[derive(Serialize)]
struct Tool {
    name: &'static str,
    version: &'static str,
}

const TOOL: Tool = Tool { name: "rainbow", version: env!("CARGO_PKG_VERSION") };

#[derive(Serialize, Default)]
struct DistanceSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<DistanceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    isd: Option<DistanceReport>,
}

#[derive(Serialize)]
struct CczSummary {
    logical_colours: Vec<usize>,
    triples: Vec<(usize, usize, usize)>,
    degrees: Vec<usize>,
}

#[derive(Serialize)]
struct LogicalSummary {
    lx_weights: Vec<usize>,
    lz_weights: Vec<usize>,
}

#[derive(Serialize)]
struct ContractionSummary {
    removed_colours: Vec<usize>,
    vertices: usize,
    families: Vec<FamilySpec>,
    screens: Vec<ContractibilityReport>,
}

#[derive(Serialize)]
struct Report<'a, S: Serialize> {
    tool: Tool,
    command: &'static str,
    spec: &'a S,
    seeds: Vec<u64>,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assignment: Option<Assignment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_k: Option<u64>,
    generator_weight_max: (usize, usize),
    #[serde(skip_serializing_if = "Vec::is_empty")]
    families: Vec<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_upper: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_exact_upto: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_certified: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distance: Option<DistanceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    triorth: Option<TriorthReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ccz: Option<CczSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    logicals: Option<LogicalSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    contraction: Option<ContractionSummary>,
}

impl<'a, S: Serialize> Report<'a, S> {
    fn new(command: &'static str, spec: &'a S, code: &CssCode) -> Self {
        Report {
            tool: TOOL,
            command,
            spec,
            seeds: Vec::new(),
            n: code.n(),
            k: None,
            assignment: code.assignment(),
            predicted_k: None,
            generator_weight_max: code.generator_weight_max(),
            families: code.families().to_vec(),
            d_upper: None,
            d_exact_upto: None,
            d_certified: None,
            distance: None,
            triorth: None,
            ccz: None,
            logicals: None,
            contraction: None,
        }
    }
}

struct Tasks(Vec<String>);

impl Tasks {
    fn parse(s: &str, allowed: &[&str]) -> anyhow::Result<Self> {
        let t: Vec<String> = s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect();
        if t.is_empty() {
            return Err(Error::Parse("no tasks given".into()).into());
        }
        if let Some(bad) = t.iter().find(|t| !allowed.contains(&t.as_str())) {
            return Err(Error::Parse(format!("unknown task {bad:?}; expected one of {}", allowed.join(", "))).into());
        }
        Ok(Tasks(t))
    }

    fn has(&self, t: &str) -> bool {
        self.0.iter().any(|x| x == t)
    }
}

fn parse_colours(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.trim_start_matches('c').parse::<usize>().map_err(|_| Error::Parse(format!("bad colour {t:?}")).into())
        })
        .collect()
}

fn lattice(f: &FactorArgs) -> anyhow::Result<(Vec<rainbow_codes::LevelledGraph>, SimplexGraph)> {
    let factors = load_factors(&f.factors)?;
    let g = build_simplex_graph(&cartesian_product(&factors)?);
    Ok((factors, g))
}

fn run_distance<S: Serialize>(code: &CssCode, s: &SearchArgs, report: &mut Report<S>) -> anyhow::Result<()> {
    let (mut wmax, mut iters) = (s.wmax, s.iters);
    if wmax.is_none() && iters.is_none() {
        let sides = if s.side.side().is_some() { 1 } else { 2 };
        if exact_cost(code.n(), 4) * sides <= s.budget {
            wmax = Some(4);
        } else {
            iters = Some(1000);
        }
    }
    let mut summary = DistanceSummary::default();
    if let Some(w) = wmax {
        summary.exact = Some(exact_distance_upto(code, s.side.side(), w, s.budget)?);
    }
    if let Some(i) = iters {
        summary.isd = Some(isd_upper_bound(code, s.side.side(), i, s.seed)?);
        report.seeds.push(s.seed);
    }
    let uppers = [&summary.exact, &summary.isd];
    report.d_upper = uppers.iter().filter_map(|r| r.as_ref()?.best_upper.as_ref().map(|w| w.weight)).min();
    report.d_exact_upto = summary.exact.as_ref().and_then(|r| r.exact_floor);
    if let (Some(f), Some(u)) = (report.d_exact_upto, report.d_upper) {
        if f + 1 == u {
            report.d_certified = Some(u);
        }
    }
    report.distance = Some(summary);
    Ok(())
}

fn logical_summary(code: &CssCode) -> LogicalSummary {
    LogicalSummary {
        lx_weights: (0..code.lx().rows()).map(|i| code.lx().row_weight(i)).collect(),
        lz_weights: (0..code.lz().rows()).map(|i| code.lz().row_weight(i)).collect(),
    }
}

fn export(code: &CssCode, dir: &Path, logicals: bool) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("hx.alist"), CssCode::to_alist(code.hx()))?;
    fs::write(dir.join("hz.alist"), CssCode::to_alist(code.hz()))?;
    if logicals {
        fs::write(dir.join("lx.txt"), dense_rows(code.lx()))?;
        fs::write(dir.join("lz.txt"), dense_rows(code.lz()))?;
    }
    Ok(())
}

fn emit<S: Serialize>(report: &Report<S>, out: &OutputArgs) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    match &out.report {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn build(args: &BuildArgs) -> anyhow::Result<()> {
    let tasks = Tasks::parse(&args.tasks, &["params", "distance", "triorth", "logicals", "export"])?;
    let class: Class = args.class.parse()?;
    let (factors, g) = lattice(&args.factors)?;
    let d = g.dim();
    let a = Assignment::new(class, args.x.unwrap_or(d), args.z.unwrap_or(2));
    if let Some(p) = &args.dump_graph {
        fs::write(p, g.to_json())?;
    }
    let code = assemble(&g, a)?;
    let mut report = Report::new("build", args, &code);
    if tasks.has("params") {
        report.k = Some(code.k());
        let ranks: Vec<usize> = factors.iter().map(|f| f.circuit_rank()).collect();
        report.predicted_k = predicted_k(class, &ranks, d).ok();
    }
    if tasks.has("distance") {
        run_distance(&code, &args.search, &mut report)?;
    }
    if tasks.has("triorth") {
        let b = match &args.bipartition {
            Some(p) => Bipartition::from_lines(&fs::read_to_string(p)?)?,
            None => find_bipartition(&g)?,
        };
        let t = check_triorthogonality(&code, &b)?;
        if t.gate_found {
            report.seeds.push(args.search.seed);
            let (coloured, colours) = coloured_logical_basis(&code, &g, args.ccz_iters, args.search.seed)?;
            let triples = ccz_interactions(&coloured, &b)?;
            let degrees = interaction_degrees(coloured.k(), &triples);
            report.ccz = Some(CczSummary { logical_colours: colours, triples, degrees });
        }
        report.triorth = Some(t);
    }
    if tasks.has("logicals") {
        report.logicals = Some(logical_summary(&code));
    }
    if tasks.has("export") {
        let dir = args.output.out.as_deref().context("export needs --out")?;
        export(&code, dir, tasks.has("logicals"))?;
    }
    emit(&report, &args.output)
}

fn contract_cmd(args: &ContractArgs) -> anyhow::Result<()> {
    let tasks = Tasks::parse(&args.tasks, &["params", "distance", "logicals", "export"])?;
    let (_, g) = lattice(&args.factors)?;
    let d = g.dim();
    let removed = parse_colours(&args.colours)?;
    let families = match &args.families {
        Some(p) => parse_family_specs(&fs::read_to_string(p)?)?,
        None => default_families(d, &removed, args.x.unwrap_or(d), args.z.unwrap_or(2)),
    };
    let screens = removed.iter().map(|&c| contractibility_check(&g, c)).collect::<Result<Vec<_>, _>>()?;
    let cg = ContractedGraph::from_base(g, &removed)?;
    let code = contracted_code(&cg, &families)?;
    let mut report = Report::new("contract", args, &code);
    report.contraction = Some(ContractionSummary {
        removed_colours: cg.removed_colours().to_vec(),
        vertices: cg.vertex_count(),
        families,
        screens,
    });
    if tasks.has("params") {
        report.k = Some(code.k());
    }
    if tasks.has("distance") {
        run_distance(&code, &args.search, &mut report)?;
    }
    if tasks.has("logicals") {
        report.logicals = Some(logical_summary(&code));
    }
    if tasks.has("export") {
        let dir = args.output.out.as_deref().context("export needs --out")?;
        export(&code, dir, tasks.has("logicals"))?;
    }
    emit(&report, &args.output)
}

fn distance_cmd(args: &DistanceArgs) -> anyhow::Result<()> {
    let hx = read_alist(&args.hx).with_context(|| format!("reading {}", args.hx.display()))?;
    let hz = read_alist(&args.hz).with_context(|| format!("reading {}", args.hz.display()))?;
    let code = CssCode::new(hx, hz)?;
    let mut report = Report::new("distance", args, &code);
    report.k = Some(code.k());
    run_distance(&code, &args.search, &mut report)?;
    emit(&report, &args.output)
}

#[derive(Serialize)]
struct InspectReport<'a> {
    tool: Tool,
    spec: &'a InspectArgs,
    factors: Vec<FactorStats>,
    dim: usize,
    flags: usize,
    colour_code_lattice: bool,
    clique_census: Vec<std::collections::BTreeMap<usize, usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    screens: Vec<ContractibilityReport>,
}

#[derive(Serialize)]
struct FactorStats {
    vertices: usize,
    edges: usize,
    circuit_rank: usize,
    girth: Option<usize>,
    all_even_degree: bool,
}

fn inspect(args: &InspectArgs) -> anyhow::Result<()> {
    let (factors, g) = lattice(&args.factors)?;
    if let Some(c) = &args.maximal {
        print!("{}", dump_json_lines(&maximal_subgraphs(&g, &parse_colours(c)?)?));
        return Ok(());
    }
    if let Some(c) = &args.rainbow {
        let pair = parse_colours(c)?;
        if pair.len() != 2 {
            bail!(Error::Parse("--rainbow takes exactly two colours".into()));
        }
        print!("{}", dump_json_lines(&rainbow_two(&g, pair[0], pair[1])?));
        return Ok(());
    }
    let screens = if args.screen {
        (0..=g.dim()).map(|c| contractibility_check(&g, c)).collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let report = InspectReport {
        tool: TOOL,
        spec: args,
        factors: factors
            .iter()
            .map(|f| FactorStats {
                vertices: f.vertex_count(),
                edges: f.edge_count(),
                circuit_rank: f.circuit_rank(),
                girth: f.girth(),
                all_even_degree: f.is_all_even_degree(),
            })
            .collect(),
        dim: g.dim(),
        flags: g.n(),
        colour_code_lattice: g.is_colour_code_lattice(),
        clique_census: (0..=g.dim()).map(|c| clique_census(&g, c)).collect::<Result<Vec<_>, _>>()?,
        screens,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse(_) | Error::Graph(_) | Error::Assignment(_) | Error::Dimension(_) | Error::Json(_)) => {
            EXIT_SPEC
        }
        Some(Error::Precondition(_) | Error::Unsupported(_)) => EXIT_SPEC,
        Some(Error::Commutation { .. } | Error::NotBipartite(_) | Error::Contraction(_)) => EXIT_VALIDATION,
        Some(Error::Budget { .. }) => EXIT_BUDGET,
        _ => EXIT_OTHER,
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("RAINBOW_THREADS") {
        let n: usize = v.parse().map_err(|_| Error::Parse(format!("RAINBOW_THREADS={v:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Build(a) => build(a),
        Command::Contract(a) => contract_cmd(a),
        Command::Distance(a) => distance_cmd(a),
        Command::Inspect(a) => inspect(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
