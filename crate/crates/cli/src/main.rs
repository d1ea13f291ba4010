//! `graphlab`: generate growing graphs, measure densities and distances,
//! run convergence experiments and draw pixel pictures.
//!
//! Exit codes: 0 success, 2 usage or invalid input, 3 size limit, 4 I/O.

mod converge;
mod model;
mod operand;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use graphlab_core::density::{
    hom_density_multigraph, t_density, t_inj, t_kernel_mc, t_kernel_quad,
};
use graphlab_core::distance::{
    cut_distance_graph_kernel, cut_distance_graphs, edit_distance, edit_distance_graph_kernel,
    HeuristicOptions, OverlayResult, SearchMode, MAX_EXACT_OVERLAY_NODES,
};
use graphlab_core::viz::{rasterize, render_series, Drawable, NodeOrdering, RasterSpec};
use graphlab_core::{Error, Graph, Multigraph, PatternGraph, Seed};
use serde::Serialize;

use model::{Generated, Model, Profile};
use operand::Operand;

/// Default directory for generated files when `--out` is not given.
pub const OUT_DIR_ENV: &str = "GRAPHLAB_OUT_DIR";

#[derive(Parser)]
#[command(name = "graphlab", version, about = "Graph-limit laboratory")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a random graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Homomorphism or injective density of a pattern in a graph or kernel.
    Density(DensityArgs),
    /// Cut or edit distance between two graphs, or a graph and a kernel.
    Distance(DistanceArgs),
    /// Statistics of replicated growth runs over a list of sizes, as CSV.
    Converge(converge::ConvergeArgs),
    /// Pixel picture of graphs or kernels as portable graymaps.
    Render(RenderArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// uniform, ranked, prefix, pag, spag, wrandom:<kernel>, prescribed:<kernel>, homogeneous:<c>
    model: String,
    /// Node count.
    n: usize,
    /// Edge count m for pag, density c for spag.
    param: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Boundary profile for homogeneous growth.
    #[arg(long, default_value = "max")]
    profile: String,
    /// Output edge list; defaults to a file in $GRAPHLAB_OUT_DIR or the working directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    /// Pattern: K3, P4, C4, S3, K2x2 or `k; i j [mult]; ...`.
    pattern: String,
    /// Graph file, named:<graph> or kernel:<name>.
    target: String,
    /// exact, inj, mc or quad; defaults to exact for graphs and mc for kernels.
    #[arg(long)]
    method: Option<String>,
    #[arg(long, default_value_t = 128)]
    grid: usize,
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DistanceArgs {
    /// cut or edit.
    kind: String,
    a: String,
    b: String,
    /// exact or heuristic; defaults to exact for graphs with at most 8 nodes.
    #[arg(long)]
    mode: Option<String>,
    /// Random restarts per cut-norm evaluation.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Swap proposals in the heuristic overlay search.
    #[arg(long, default_value_t = 200)]
    swaps: usize,
    /// Kernel sampling points per axis; defaults to the graph's node count.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RenderArgs {
    /// One or more graph files, named:<graph> or kernel:<name>.
    #[arg(required = true)]
    inputs: Vec<String>,
    #[arg(long = "res", default_value_t = 512)]
    resolution: usize,
    /// birth, degree or parity.
    #[arg(long, default_value = "birth")]
    ordering: String,
    /// Output file for one input, output directory for several.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Accepts plain integers and forms like `1e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("expected a nonnegative integer, got {s:?}")),
    }
}

pub fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn emit<T: Serialize>(json: bool, report: &T, text: impl FnOnce() -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        println!("{}", text());
    }
    Ok(())
}

#[derive(Serialize)]
struct GenerateReport {
    model: String,
    nodes: usize,
    edges: u64,
    multigraph: bool,
    seed: u64,
    stream: u64,
    path: String,
}

fn cmd_generate(args: GenerateArgs, json: bool) -> Result<()> {
    let profile: Profile = args.profile.parse()?;
    let model = Model::parse(&args.model, args.param.as_deref(), profile)?;
    let seed = Seed::new(args.seed, args.stream);
    let g = model.generate(args.n, seed)?;
    let path = match args.out {
        Some(p) => p,
        None => {
            let dir = out_dir();
            std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            dir.join(format!(
                "{}_n{}_s{}_r{}.el",
                model.slug(),
                args.n,
                args.seed,
                args.stream
            ))
        }
    };
    let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    match &g {
        Generated::Simple(g) => g.write_edge_list(BufWriter::new(file))?,
        Generated::Multi(g) => g.write_edge_list(BufWriter::new(file))?,
    }
    let report = GenerateReport {
        model: args.model,
        nodes: g.node_count(),
        edges: g.edge_count(),
        multigraph: matches!(g, Generated::Multi(_)),
        seed: args.seed,
        stream: args.stream,
        path: path.display().to_string(),
    };
    emit(json, &report, || {
        format!(
            "{} nodes, {} edges -> {}",
            report.nodes, report.edges, report.path
        )
    })
}

#[derive(Serialize)]
struct DensityReport {
    pattern: String,
    target: String,
    method: String,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<usize>,
}

fn cmd_density(args: DensityArgs, json: bool) -> Result<()> {
    let f: PatternGraph = args.pattern.parse()?;
    let target = Operand::parse(&args.target)?;
    let method = match (&args.method, &target) {
        (Some(m), _) => m.clone(),
        (None, Operand::Kernel(_)) => "mc".to_string(),
        (None, _) => "exact".to_string(),
    };
    let mut report = DensityReport {
        pattern: f.to_string(),
        target: args.target.clone(),
        method: method.clone(),
        value: 0.0,
        stderr: None,
        samples: None,
        grid: None,
    };
    match method.as_str() {
        "exact" => {
            report.value = match &target {
                Operand::Graph(g) if f.is_simple() => t_density(&f, g)?,
                Operand::Graph(g) => hom_density_multigraph(&f, &Multigraph::from_graph(g))?,
                Operand::Multigraph(g) => hom_density_multigraph(&f, g)?,
                Operand::Kernel(_) => bail!(Error::Parameter(
                    "exact densities need a graph target; use --method mc or quad for kernels"
                        .into()
                )),
            }
        }
        "inj" => {
            report.value = match &target {
                Operand::Graph(g) => t_inj(&f, &Multigraph::from_graph(g))?,
                Operand::Multigraph(g) => t_inj(&f, g)?,
                Operand::Kernel(_) => bail!(Error::Parameter(
                    "injective densities need a graph target".into()
                )),
            }
        }
        "mc" => {
            let est = t_kernel_mc(
                &f,
                &target.as_kernel()?,
                args.samples,
                Seed::new(args.seed, 0),
            )?;
            report.value = est.estimate;
            report.stderr = Some(est.stderr);
            report.samples = Some(est.samples);
        }
        "quad" => {
            report.value = t_kernel_quad(&f, &target.as_kernel()?, args.grid)?;
            report.grid = Some(args.grid);
        }
        other => bail!(Error::Parameter(format!(
            "unknown method {other:?} (exact|inj|mc|quad)"
        ))),
    }
    emit(json, &report, || {
        let mut line = format!(
            "t({}, {}) = {:.12}",
            report.pattern, report.target, report.value
        );
        if let Some(se) = report.stderr {
            line += &format!(
                " +- {se:.3e} (stderr, {} samples)",
                report.samples.unwrap_or(0)
            );
        }
        if let Some(grid) = report.grid {
            line += &format!(" (midpoint grid {grid})");
        }
        line + &format!(" [method {}]", report.method)
    })
}

#[derive(Serialize)]
struct DistanceReport {
    kind: String,
    a: String,
    b: String,
    estimate: f64,
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_bound: Option<f64>,
    permutation: Vec<usize>,
}

fn simple(op: Operand, name: &str) -> Result<Operand> {
    match op {
        Operand::Multigraph(_) => bail!(Error::Parameter(format!(
            "{name} is a multigraph; distances need simple graphs"
        ))),
        other => Ok(other),
    }
}

fn cmd_distance(args: DistanceArgs, json: bool) -> Result<()> {
    let a = simple(Operand::parse(&args.a)?, &args.a)?;
    let b = simple(Operand::parse(&args.b)?, &args.b)?;
    let seed = Seed::new(args.seed, 0);
    let cut = match args.kind.as_str() {
        "cut" => true,
        "edit" => false,
        other => bail!(Error::Parameter(format!(
            "unknown distance {other:?} (cut|edit)"
        ))),
    };
    let mode: Option<SearchMode> = args.mode.as_deref().map(str::parse).transpose()?;
    let result: OverlayResult = match (&a, &b) {
        (Operand::Graph(g), Operand::Graph(h)) => {
            let mode = mode.unwrap_or(if g.node_count() <= MAX_EXACT_OVERLAY_NODES {
                SearchMode::Exact
            } else {
                SearchMode::Heuristic
            });
            if cut {
                let options = HeuristicOptions {
                    restarts: args.restarts,
                    swap_proposals: args.swaps,
                };
                cut_distance_graphs(g, h, mode, options, seed)?
            } else {
                edit_distance(g, h, mode, seed)?
            }
        }
        (Operand::Graph(g), Operand::Kernel(w)) | (Operand::Kernel(w), Operand::Graph(g)) => {
            if mode == Some(SearchMode::Exact) {
                bail!(Error::Parameter(
                    "graph-kernel distances have no exact mode".into()
                ));
            }
            let grid = args.grid.unwrap_or(g.node_count());
            if cut {
                cut_distance_graph_kernel(g, w, grid, args.restarts, seed)?
            } else {
                edit_distance_graph_kernel(g, w, grid)?
            }
        }
        _ => bail!(Error::Parameter(
            "need two graphs, or a graph and a kernel".into()
        )),
    };
    let report = DistanceReport {
        kind: args.kind,
        a: args.a,
        b: args.b,
        estimate: result.distance_estimate,
        exact: result.exact,
        lower_bound: result.lower_bound,
        permutation: result.permutation,
    };
    emit(json, &report, || {
        let mut line = format!(
            "{} distance {:.12} ({})",
            report.kind,
            report.estimate,
            if report.exact {
                "exact over permutations"
            } else {
                "heuristic upper estimate"
            }
        );
        if let Some(lb) = report.lower_bound {
            line += &format!(", lower bound {lb:.12}");
        }
        let shown: Vec<String> = report
            .permutation
            .iter()
            .take(16)
            .map(|p| p.to_string())
            .collect();
        let more = if report.permutation.len() > 16 {
            " ..."
        } else {
            ""
        };
        line + &format!("\nalignment: [{}{more}]", shown.join(" "))
    })
}

#[derive(Serialize)]
struct RenderReport {
    files: Vec<String>,
    resolution: usize,
}

fn cmd_render(args: RenderArgs, json: bool) -> Result<()> {
    let ordering: NodeOrdering = args.ordering.parse()?;
    let spec = RasterSpec::new(args.resolution, ordering)?;
    let operands = args
        .inputs
        .iter()
        .map(|s| Operand::parse(s))
        .collect::<Result<Vec<_>>>()?;
    let files: Vec<PathBuf> = if operands.len() == 1 {
        let path = match args.out {
            Some(p) => p,
            None => {
                let dir = out_dir();
                std::fs::create_dir_all(&dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
                dir.join("render.pgm")
            }
        };
        let drawable = match &operands[0] {
            Operand::Graph(g) => Drawable::Graph(g),
            Operand::Multigraph(g) => Drawable::Multigraph(g),
            Operand::Kernel(w) => Drawable::Kernel(w),
        };
        write_raster(drawable, &spec, &path)?;
        vec![path]
    } else {
        let graphs = operands
            .into_iter()
            .zip(&args.inputs)
            .map(|(op, name)| match op {
                Operand::Graph(g) => Ok(g),
                _ => bail!(Error::Parameter(format!(
                    "{name}: a series renders simple graphs only"
                ))),
            })
            .collect::<Result<Vec<Graph>>>()?;
        let dir = args.out.unwrap_or_else(|| out_dir().join("render"));
        render_series(&graphs, &spec, &dir)
            .with_context(|| format!("writing into {}", dir.display()))?
    };
    let report = RenderReport {
        files: files.iter().map(|p| p.display().to_string()).collect(),
        resolution: args.resolution,
    };
    emit(json, &report, || report.files.join("\n"))
}

fn write_raster(drawable: Drawable<'_>, spec: &RasterSpec, path: &Path) -> Result<()> {
    let raster = rasterize(drawable, spec)?;
    raster
        .save(path)
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Exit status for an error: the first library or I/O error in the chain decides.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Size(_) => 3,
                Error::Io(_) => 4,
                _ => 2,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 4;
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(a, cli.json),
        Command::Density(a) => cmd_density(a, cli.json),
        Command::Distance(a) => cmd_distance(a, cli.json),
        Command::Converge(a) => converge::cmd_converge(a, cli.json),
        Command::Render(a) => cmd_render(a, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
