//! Growth-model tags shared by `generate` and `converge`.

use std::str::FromStr;

use anyhow::{bail, Result};
use graphlab_core::growth::{
    grow_homogeneous, grow_pag, grow_prefix, grow_prescribed, grow_ranked, grow_spag, grow_uniform,
    pag_edges_for, sample_w_random, LabeledSample,
};
use graphlab_core::{BuiltinGraphon, Error, Graph, Multigraph, Seed};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// `U(x, y) = max(x, y)^c`
    Max,
    /// `U(x, y) = (x y)^(c/2)`
    Product,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> std::result::Result<Self, Error> {
        match s {
            "max" => Ok(Profile::Max),
            "product" => Ok(Profile::Product),
            _ => Err(Error::Parameter(format!(
                "unknown profile {s:?} (max|product)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PagSize {
    Edges(usize),
    /// `m = c n^2 / 2`
    Density(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Uniform,
    Ranked,
    Prefix,
    Pag(PagSize),
    Spag(f64),
    WRandom(BuiltinGraphon),
    Prescribed(BuiltinGraphon),
    Homogeneous(f64, Profile),
}

pub enum Generated {
    Simple(Graph),
    Multi(Multigraph),
}

impl Generated {
    pub fn node_count(&self) -> usize {
        match self {
            Generated::Simple(g) => g.node_count(),
            Generated::Multi(g) => g.node_count(),
        }
    }

    pub fn edge_count(&self) -> u64 {
        match self {
            Generated::Simple(g) => g.edge_count() as u64,
            Generated::Multi(g) => g.edge_count(),
        }
    }
}

fn number<T: FromStr>(what: &str, text: &str) -> Result<T> {
    text.parse()
        .map_err(|_| Error::Parameter(format!("bad {what} {text:?}")).into())
}

impl Model {
    /// Parses `tag` with an optional extra positional `param` (the edge
    /// count of `pag`, the density of `spag`). `pag:<c>` and `spag:<c>`
    /// give the density inline.
    pub fn parse(tag: &str, param: Option<&str>, profile: Profile) -> Result<Model> {
        let (name, inline) = match tag.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (tag, None),
        };
        let no_param = |m: Model| -> Result<Model> {
            if param.is_some() || inline.is_some() {
                bail!(Error::Parameter(format!("model {name} takes no parameter")));
            }
            Ok(m)
        };
        match name {
            "uniform" => no_param(Model::Uniform),
            "ranked" => no_param(Model::Ranked),
            "prefix" => no_param(Model::Prefix),
            "pag" => match (inline, param) {
                (Some(c), None) => Ok(Model::Pag(PagSize::Density(number("density c", c)?))),
                (None, Some(m)) => Ok(Model::Pag(PagSize::Edges(number("edge count m", m)?))),
                _ => bail!(Error::Parameter(
                    "pag needs exactly one of `pag <n> <m>` or `pag:<c>`".into()
                )),
            },
            "spag" => match inline.or(param) {
                Some(c) if inline.is_none() || param.is_none() => {
                    Ok(Model::Spag(number("density c", c)?))
                }
                _ => bail!(Error::Parameter("spag needs its density c".into())),
            },
            "wrandom" | "prescribed" => {
                let Some(b) = inline else {
                    bail!(Error::Parameter(format!(
                        "{name} needs a kernel, e.g. {name}:uniform-limit"
                    )));
                };
                let b: BuiltinGraphon = b.parse()?;
                Ok(if name == "wrandom" {
                    Model::WRandom(b)
                } else {
                    Model::Prescribed(b)
                })
            }
            "homogeneous" => {
                let Some(c) = inline else {
                    bail!(Error::Parameter(
                        "homogeneous needs its degree, e.g. homogeneous:1".into()
                    ));
                };
                Ok(Model::Homogeneous(
                    number("homogeneity degree", c)?,
                    profile,
                ))
            }
            _ => bail!(Error::Parameter(format!("unknown model {tag:?}"))),
        }
    }

    pub fn generate(&self, n: usize, seed: Seed) -> Result<Generated> {
        Ok(match self {
            Model::Uniform => Generated::Simple(grow_uniform(n, seed)?),
            Model::Ranked => Generated::Simple(grow_ranked(n, seed)?),
            Model::Prefix => Generated::Simple(grow_prefix(n, seed)?.0),
            Model::Pag(size) => {
                let m = match *size {
                    PagSize::Edges(m) => m,
                    PagSize::Density(c) => {
                        if !(c >= 0.0) {
                            bail!(Error::Parameter(format!(
                                "density c must be nonnegative, got {c}"
                            )));
                        }
                        pag_edges_for(c, n)
                    }
                };
                Generated::Multi(grow_pag(n, m, seed)?)
            }
            Model::Spag(c) => Generated::Simple(grow_spag(n, *c, seed)?),
            Model::WRandom(b) => {
                let w = b.kernel()?;
                // latent points and edges come from separate streams
                let points = LabeledSample::uniform(n, w.dim(), seed.substream(0));
                Generated::Simple(sample_w_random(&points, &w, seed.substream(1))?)
            }
            Model::Prescribed(b) => Generated::Simple(grow_prescribed(&b.kernel()?, n, seed)?),
            Model::Homogeneous(c, profile) => {
                let c = *c;
                let g = match profile {
                    Profile::Max => grow_homogeneous(c, |_| 0.0, n, seed)?,
                    Profile::Product => {
                        grow_homogeneous(c, move |x| 1.0 - x.powf(c / 2.0), n, seed)?
                    }
                };
                Generated::Simple(g)
            }
        })
    }

    /// File-name friendly tag.
    pub fn slug(&self) -> String {
        match self {
            Model::Uniform => "uniform".into(),
            Model::Ranked => "ranked".into(),
            Model::Prefix => "prefix".into(),
            Model::Pag(PagSize::Edges(m)) => format!("pag-m{m}"),
            Model::Pag(PagSize::Density(c)) => format!("pag-c{c}"),
            Model::Spag(c) => format!("spag-c{c}"),
            Model::WRandom(b) => format!("wrandom-{}", b.to_string().replace(':', "-")),
            Model::Prescribed(b) => format!("prescribed-{}", b.to_string().replace(':', "-")),
            Model::Homogeneous(c, p) => format!(
                "homogeneous-{c}-{}",
                if *p == Profile::Max { "max" } else { "product" }
            ),
        }
    }
}
