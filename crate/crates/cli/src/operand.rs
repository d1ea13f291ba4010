//! Command-line operands: graph files, named graphs and builtin kernels.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};
use graphlab_core::graph::EdgeList;
use graphlab_core::{BuiltinGraphon, Graph, Kernel, Multigraph, StepGraphon};

pub enum Operand {
    Graph(Graph),
    Multigraph(Multigraph),
    Kernel(Kernel),
}

impl Operand {
    /// `kernel:<builtin>`, `named:<graph>`, `graph:<path>` or a bare path.
    pub fn parse(text: &str) -> Result<Operand> {
        if let Some(name) = text.strip_prefix("kernel:") {
            let b: BuiltinGraphon = name.parse()?;
            return Ok(Operand::Kernel(b.kernel()?));
        }
        if let Some(name) = text.strip_prefix("named:") {
            return Ok(Operand::Graph(named_graph(name)?));
        }
        let path = text.strip_prefix("graph:").unwrap_or(text);
        read_edge_list(Path::new(path))
    }

    /// A kernel view: graphs become their step functions.
    pub fn as_kernel(&self) -> Result<Kernel> {
        match self {
            Operand::Graph(g) => Ok(Kernel::from_step(StepGraphon::from_graph(g))),
            Operand::Kernel(w) => Ok(w.clone()),
            Operand::Multigraph(_) => bail!(graphlab_core::Error::Parameter(
                "multigraphs have no [0,1]-valued step function; use a simple graph".into()
            )),
        }
    }
}

pub fn read_edge_list(path: &Path) -> Result<Operand> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let list = EdgeList::read(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(match list {
        EdgeList::Simple(g) => Operand::Graph(g),
        EdgeList::Multi(g) => Operand::Multigraph(g),
    })
}

fn size_arg(name: &str, arg: Option<&str>) -> Result<usize> {
    let Some(arg) = arg else {
        bail!(graphlab_core::Error::Parameter(format!(
            "named:{name} needs a size, e.g. named:{name}:8"
        )));
    };
    arg.parse().map_err(|_| {
        graphlab_core::Error::Parameter(format!("bad size {arg:?} for named:{name}")).into()
    })
}

/// `petersen`, `chessboard:<n>`, `half-graph:<n>`, `complete:<n>`,
/// `empty:<n>`, `cycle:<n>`.
pub fn named_graph(text: &str) -> Result<Graph> {
    let (name, arg) = match text.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (text, None),
    };
    Ok(match name {
        "petersen" => Graph::petersen(),
        "chessboard" => Graph::chessboard(size_arg(name, arg)?),
        "half-graph" => Graph::half_graph(size_arg(name, arg)?),
        "complete" => Graph::complete(size_arg(name, arg)?),
        "empty" => Graph::empty(size_arg(name, arg)?),
        "cycle" => Graph::cycle(size_arg(name, arg)?),
        _ => bail!(graphlab_core::Error::Parameter(format!(
            "unknown named graph {text:?}"
        ))),
    })
}
