//! Replicated growth runs summarized as CSV.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use graphlab_core::density::{hom_density_multigraph, t_density, t_inj};
use graphlab_core::distance::{cut_distance_graph_kernel, dyadic_lower_bound, FLATTEN_BITS};
use graphlab_core::graphon::flatten_2d;
use graphlab_core::stats::Moments;
use graphlab_core::{BuiltinGraphon, Error, Kernel, Multigraph, PatternGraph, Seed};
use rayon::prelude::*;
use serde::Serialize;

use crate::model::{Generated, Model, Profile};
use crate::{emit, out_dir};

pub const CSV_HEADER: &str = "model,n,rep,statistic,value";

#[derive(Args)]
pub struct ConvergeArgs {
    /// Model tag as for `generate`.
    model: String,
    /// Ascending node counts, comma separated.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Edge count m for pag, density c for spag.
    #[arg(long)]
    param: Option<String>,
    #[arg(long, default_value_t = 10)]
    reps: u64,
    /// edges, t:<pattern>, tinj:<pattern>, cut:<kernel>, dyadic:<kernel>; repeatable.
    #[arg(long = "stat", default_values_t = vec!["edges".to_string()])]
    stats: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "max")]
    profile: String,
    /// Random restarts for cut statistics.
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Statistic {
    Edges,
    Hom(PatternGraph),
    Inj(PatternGraph),
    Cut(Kernel),
    Dyadic(Kernel),
}

impl Statistic {
    fn parse(text: &str) -> Result<Statistic> {
        if text == "edges" {
            return Ok(Statistic::Edges);
        }
        let Some((kind, arg)) = text.split_once(':') else {
            bail!(Error::Parameter(format!("unknown statistic {text:?}")));
        };
        let kernel = |arg: &str| -> Result<Kernel> {
            let w = arg.parse::<BuiltinGraphon>()?.kernel()?;
            Ok(if w.dim() == 2 {
                flatten_2d(&w, FLATTEN_BITS)?
            } else {
                w
            })
        };
        Ok(match kind {
            "t" => Statistic::Hom(arg.parse()?),
            "tinj" => Statistic::Inj(arg.parse()?),
            "cut" => Statistic::Cut(kernel(arg)?),
            "dyadic" => Statistic::Dyadic(kernel(arg)?),
            _ => bail!(Error::Parameter(format!("unknown statistic {text:?}"))),
        })
    }

    fn eval(&self, g: &Generated, restarts: usize, seed: Seed) -> Result<f64> {
        let simple = |what: &str| match g {
            Generated::Simple(g) => Ok(g),
            Generated::Multi(_) => Err(Error::Parameter(format!(
                "{what} needs a simple graph model"
            ))),
        };
        Ok(match self {
            Statistic::Edges => g.edge_count() as f64,
            Statistic::Hom(f) => match g {
                Generated::Simple(g) if f.is_simple() => t_density(f, g)?,
                Generated::Simple(g) => hom_density_multigraph(f, &Multigraph::from_graph(g))?,
                Generated::Multi(g) => hom_density_multigraph(f, g)?,
            },
            Statistic::Inj(f) => match g {
                Generated::Simple(g) => t_inj(f, &Multigraph::from_graph(g))?,
                Generated::Multi(g) => t_inj(f, g)?,
            },
            Statistic::Cut(w) => {
                let g = simple("cut")?;
                let n = g.node_count();
                if n == 0 {
                    return Ok(0.0);
                }
                cut_distance_graph_kernel(g, w, n, restarts, seed)?.distance_estimate
            }
            Statistic::Dyadic(w) => {
                let g = simple("dyadic")?;
                dyadic_lower_bound(g, w, g.node_count().max(64))?
            }
        })
    }
}

/// Twelve significant digits, plain decimal where reasonable.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let e = v.abs().log10().floor() as i32;
    if (-5..=14).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.11e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct Summary {
    n: usize,
    statistic: String,
    mean: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct ConvergeReport {
    path: String,
    rows: usize,
    summary: Vec<Summary>,
}

pub fn cmd_converge(args: ConvergeArgs, json: bool) -> Result<()> {
    if args.n_list.windows(2).any(|w| w[0] >= w[1]) {
        bail!(Error::Parameter("--n must be strictly ascending".into()));
    }
    let profile: Profile = args.profile.parse()?;
    let model = Model::parse(&args.model, args.param.as_deref(), profile)?;
    let stats = args
        .stats
        .iter()
        .map(|s| Statistic::parse(s))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, u64)> = args
        .n_list
        .iter()
        .flat_map(|&n| (0..args.reps).map(move |r| (n, r)))
        .collect();
    let mut rows: Vec<(usize, usize, u64, f64)> = jobs
        .par_iter()
        .map(|&(n, r)| -> Result<Vec<(usize, usize, u64, f64)>> {
            let seed = Seed::new(args.seed, r);
            let g = model.generate(n, seed)?;
            stats
                .iter()
                .enumerate()
                .map(|(s, stat)| {
                    Ok((
                        n,
                        s,
                        r,
                        stat.eval(&g, args.restarts, seed.substream(1 + s as u64))?,
                    ))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by_key(|a| (a.0, a.1, a.2));

    let mut summary = Vec::new();
    if args.reps > 0 {
        for &n in &args.n_list {
            for (s, name) in args.stats.iter().enumerate() {
                let m: Moments = rows
                    .iter()
                    .filter(|row| row.0 == n && row.1 == s)
                    .map(|row| row.3)
                    .collect();
                summary.push(Summary {
                    n,
                    statistic: name.clone(),
                    mean: m.mean,
                    stderr: m.std_error(),
                });
            }
        }
    }

    let path = match args.out {
        Some(p) => p,
        None => {
            let dir = out_dir();
            std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            dir.join(format!("converge_{}_s{}.csv", model.slug(), args.seed))
        }
    };
    let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    let model_field = csv_field(&args.model);
    writeln!(out, "{CSV_HEADER}")?;
    for &(n, s, r, v) in &rows {
        writeln!(
            out,
            "{model_field},{n},{r},{},{}",
            csv_field(&args.stats[s]),
            format_value(v)
        )?;
    }
    for row in &summary {
        let stat = csv_field(&row.statistic);
        writeln!(
            out,
            "{model_field},{},mean,{stat},{}",
            row.n,
            format_value(row.mean)
        )?;
        writeln!(
            out,
            "{model_field},{},stderr,{stat},{}",
            row.n,
            format_value(row.stderr)
        )?;
    }
    out.flush()
        .with_context(|| format!("writing {}", path.display()))?;

    let report = ConvergeReport {
        path: path.display().to_string(),
        rows: rows.len(),
        summary,
    };
    emit(json, &report, || {
        let mut text = format!("{} rows -> {}", report.rows, report.path);
        for s in &report.summary {
            text += &format!(
                "\nn={} {}: mean {} stderr {}",
                s.n,
                s.statistic,
                format_value(s.mean),
                format_value(s.stderr)
            );
        }
        text
    })
}
