//! Pixel pictures as 8-bit portable graymaps.
//!
//! Value `v` is drawn as gray level `255 (1 - v)`, so 1 is black and 0 is
//! white; values outside `[0,1]` are clamped. The origin is the upper-left
//! corner: pixel `(r, c)` shows the function at `((r + 1/2) / res, (c + 1/2) / res)`.
//!
//! Different graphs can have the same picture (a chessboard graph and its
//! parity reordering are an example), so pictures are not decoded back
//! into graphs beyond the block readback used in tests.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Multigraph};
use crate::graphon::{degree_order, flatten_2d, Kernel, StepGraphon};

pub const MIN_RESOLUTION: usize = 16;
pub const MAX_RESOLUTION: usize = 4096;
/// Binary digits per coordinate when drawing a 2-d kernel.
pub const FLATTEN_BITS: u32 = 16;

/// Node order used when drawing a graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeOrdering {
    /// Labels as generated.
    #[default]
    Birth,
    /// Nonincreasing degree, ties by label.
    Degree,
    /// Even labels first, then odd labels.
    Parity,
}

impl FromStr for NodeOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "birth" => Ok(NodeOrdering::Birth),
            "degree" => Ok(NodeOrdering::Degree),
            "parity" => Ok(NodeOrdering::Parity),
            _ => Err(Error::param(format!(
                "unknown ordering {s:?} (birth|degree|parity)"
            ))),
        }
    }
}

impl NodeOrdering {
    /// `order[r]` is the node drawn in row and column `r`.
    fn order(self, g: &Graph) -> Vec<usize> {
        let n = g.node_count();
        match self {
            NodeOrdering::Birth => (0..n).collect(),
            NodeOrdering::Degree => degree_order(g),
            NodeOrdering::Parity => (0..n).step_by(2).chain((1..n).step_by(2)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RasterSpec {
    resolution: usize,
    ordering: NodeOrdering,
}

impl RasterSpec {
    pub fn new(resolution: usize, ordering: NodeOrdering) -> Result<Self> {
        if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&resolution) {
            return Err(Error::param(format!(
                "resolution must lie in [{MIN_RESOLUTION}, {MAX_RESOLUTION}], got {resolution}"
            )));
        }
        Ok(RasterSpec {
            resolution,
            ordering,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn ordering(&self) -> NodeOrdering {
        self.ordering
    }
}

/// Square grayscale image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    size: usize,
    pixels: Vec<u8>,
}

impl Raster {
    fn from_values(size: usize, value: impl Fn(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                pixels.push(gray(value(r, c)));
            }
        }
        Raster { size, pixels }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pixel(&self, r: usize, c: usize) -> u8 {
        self.pixels[r * self.size + c]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Binary (P5) graymap.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.size, self.size)?;
        out.write_all(&self.pixels)?;
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path)?;
        self.write_pgm(BufWriter::new(file))
    }
}

fn gray(v: f64) -> u8 {
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    (255.0 * (1.0 - v)).round() as u8
}

/// Block of `n` equal blocks containing the centre of pixel `r` out of `res`,
/// computed in integers so multiples of `n` split evenly.
fn pixel_block(r: usize, res: usize, n: usize) -> usize {
    ((2 * r + 1) * n) / (2 * res)
}

fn centre(r: usize, res: usize) -> f64 {
    (r as f64 + 0.5) / res as f64
}

pub fn raster_graph(g: &Graph, spec: &RasterSpec) -> Raster {
    let n = g.node_count();
    let res = spec.resolution;
    if n == 0 {
        return Raster::from_values(res, |_, _| 0.0);
    }
    let order = spec.ordering.order(g);
    let block: Vec<usize> = (0..res).map(|r| order[pixel_block(r, res, n)]).collect();
    Raster::from_values(res, |r, c| g.has_edge(block[r], block[c]) as u8 as f64)
}

/// Darkness proportional to multiplicity, the largest multiplicity (loops
/// included, on the diagonal) drawn black. Nodes are drawn in label order.
pub fn raster_multigraph(g: &Multigraph, spec: &RasterSpec) -> Raster {
    let n = g.node_count();
    let res = spec.resolution;
    let top = g.pairs().map(|(_, _, m)| m).max().unwrap_or(0);
    if n == 0 || top == 0 {
        return Raster::from_values(res, |_, _| 0.0);
    }
    let block: Vec<usize> = (0..res).map(|r| pixel_block(r, res, n)).collect();
    Raster::from_values(res, |r, c| {
        g.multiplicity(block[r], block[c]) as f64 / top as f64
    })
}

pub fn raster_step(s: &StepGraphon, spec: &RasterSpec) -> Raster {
    let res = spec.resolution;
    let block: Vec<usize> = (0..res)
        .map(|r| {
            if s.has_equal_measures() {
                pixel_block(r, res, s.block_count())
            } else {
                s.block_of(centre(r, res))
            }
        })
        .collect();
    Raster::from_values(res, |r, c| s.value(block[r], block[c]))
}

/// Two-dimensional kernels are drawn through their flattening to `[0,1]`.
pub fn raster_kernel(w: &Kernel, spec: &RasterSpec) -> Result<Raster> {
    let w = match w.dim() {
        1 => w.clone(),
        _ => flatten_2d(w, FLATTEN_BITS)?,
    };
    let res = spec.resolution;
    Ok(Raster::from_values(res, |r, c| {
        w.eval1(centre(r, res), centre(c, res))
    }))
}

/// Anything that can be drawn.
#[derive(Clone, Copy)]
pub enum Drawable<'a> {
    Graph(&'a Graph),
    Multigraph(&'a Multigraph),
    Step(&'a StepGraphon),
    Kernel(&'a Kernel),
}

pub fn rasterize(obj: Drawable<'_>, spec: &RasterSpec) -> Result<Raster> {
    Ok(match obj {
        Drawable::Graph(g) => raster_graph(g, spec),
        Drawable::Multigraph(g) => raster_multigraph(g, spec),
        Drawable::Step(s) => raster_step(s, spec),
        Drawable::Kernel(w) => raster_kernel(w, spec)?,
    })
}

pub fn render(obj: Drawable<'_>, spec: &RasterSpec, path: &Path) -> Result<()> {
    rasterize(obj, spec)?.save(path)
}

/// Writes `graph_000.pgm`, `graph_001.pgm`, ... into `dir`, creating it if needed.
pub fn render_series(graphs: &[Graph], spec: &RasterSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    if graphs.is_empty() {
        return Err(Error::param("render_series needs at least one graph"));
    }
    fs::create_dir_all(dir)?;
    let width = graphs.len().saturating_sub(1).to_string().len().max(3);
    graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let path = dir.join(format!("graph_{i:0width$}.pgm"));
            raster_graph(g, spec).save(&path)?;
            Ok(path)
        })
        .collect()
}
