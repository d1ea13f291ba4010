//! Kernels on `[0,1]^d` (d = 1 or 2), the built-in limit graphons of the
//! growth models, and block-constant step graphons.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;

type EvalFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// Symmetric function on pairs of latent points in `[0,1]^dim`.
#[derive(Clone)]
pub struct Kernel {
    name: String,
    dim: usize,
    bounded01: bool,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("bounded01", &self.bounded01)
            .finish()
    }
}

impl Kernel {
    /// Wraps `eval`. The caller vouches for symmetry and, when `bounded01`
    /// is set, for the range lying in `[0,1]`.
    pub fn new<F>(name: impl Into<String>, dim: usize, bounded01: bool, eval: F) -> Result<Self>
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim != 1 && dim != 2 {
            return Err(Error::param(format!(
                "kernel dimension must be 1 or 2, got {dim}"
            )));
        }
        Ok(Kernel {
            name: name.into(),
            dim,
            bounded01,
            eval: Arc::new(eval),
        })
    }

    /// One-dimensional kernel from a two-argument function.
    pub fn from_fn<F>(name: impl Into<String>, bounded01: bool, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Kernel::new(name, 1, bounded01, move |u, v| f(u[0], v[0])).expect("dim 1 is valid")
    }

    pub fn constant(value: f64, dim: usize) -> Result<Self> {
        Kernel::new(
            format!("const:{value}"),
            dim,
            (0.0..=1.0).contains(&value),
            move |_, _| value,
        )
    }

    /// The step graphon viewed as a kernel on `[0,1]`.
    pub fn from_step(step: StepGraphon) -> Self {
        Kernel::from_fn("step", step.is_bounded01(), move |x, y| {
            step.value(step.block_of(x), step.block_of(y))
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounded01(&self) -> bool {
        self.bounded01
    }

    #[inline]
    pub fn eval(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        debug_assert_eq!(v.len(), self.dim);
        (self.eval)(u, v)
    }

    /// Evaluation for one-dimensional kernels.
    #[inline]
    pub fn eval1(&self, x: f64, y: f64) -> f64 {
        (self.eval)(&[x], &[y])
    }
}

/// Floor applied to coordinates before taking logarithms; `ln(0)` would
/// otherwise poison sums with infinities.
pub const LOG_COORD_FLOOR: f64 = 1e-300;

/// The limit objects that appear in the growth models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BuiltinGraphon {
    /// `1 - max(x, y)`, limit of uniform attachment.
    UniformLimit,
    /// `1 - xy`, limit of ranked attachment.
    RankedLimit,
    /// `|x - y| / max(x, y)`, the edge-probability profile of prefix
    /// attachment (a weak-* limit only).
    PrefixRatio,
    /// The 0-1 prefix attachment limit on `[0,1]^2`.
    PrefixLimit,
    /// `c ln(x) ln(y)`, unbounded; densities of preferential attachment.
    PrefLog(f64),
    /// `1 - exp(-c ln(x) ln(y))`, limit of simplified preferential attachment.
    SpagLimit(f64),
    /// `1{|x - y| >= 1/2}`, limit of half-graphs in the order `1..n, 1'..n'`.
    HalfGraph,
}

impl BuiltinGraphon {
    pub fn kernel(&self) -> Result<Kernel> {
        let name = self.to_string();
        let k = match *self {
            BuiltinGraphon::UniformLimit => Kernel::from_fn(name, true, |x, y| 1.0 - x.max(y)),
            BuiltinGraphon::RankedLimit => Kernel::from_fn(name, true, |x, y| 1.0 - x * y),
            BuiltinGraphon::PrefixRatio => Kernel::from_fn(name, true, |x, y| {
                let m = x.max(y);
                if m > 0.0 {
                    (x - y).abs() / m
                } else {
                    0.0
                }
            }),
            BuiltinGraphon::PrefixLimit => Kernel::new(name, 2, true, |u, v| {
                if u[0] < v[0] * v[1] || v[0] < u[0] * u[1] {
                    1.0
                } else {
                    0.0
                }
            })?,
            BuiltinGraphon::PrefLog(c) => {
                check_positive(c)?;
                Kernel::from_fn(name, false, move |x, y| c * (log_coord(x) * log_coord(y)))
            }
            BuiltinGraphon::SpagLimit(c) => {
                check_positive(c)?;
                Kernel::from_fn(name, true, move |x, y| {
                    -(-c * (log_coord(x) * log_coord(y))).exp_m1()
                })
            }
            BuiltinGraphon::HalfGraph => {
                Kernel::from_fn(
                    name,
                    true,
                    |x, y| {
                        if (x - y).abs() >= 0.5 {
                            1.0
                        } else {
                            0.0
                        }
                    },
                )
            }
        };
        Ok(k)
    }
}

fn check_positive(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "kernel parameter c must be positive, got {c}"
        )))
    }
}

#[inline]
fn log_coord(x: f64) -> f64 {
    x.max(LOG_COORD_FLOOR).ln()
}

impl fmt::Display for BuiltinGraphon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinGraphon::UniformLimit => write!(f, "uniform-limit"),
            BuiltinGraphon::RankedLimit => write!(f, "ranked-limit"),
            BuiltinGraphon::PrefixRatio => write!(f, "prefix-ratio"),
            BuiltinGraphon::PrefixLimit => write!(f, "prefix-limit"),
            BuiltinGraphon::PrefLog(c) => write!(f, "pref-log:{c}"),
            BuiltinGraphon::SpagLimit(c) => write!(f, "spag-limit:{c}"),
            BuiltinGraphon::HalfGraph => write!(f, "half-graph"),
        }
    }
}

impl FromStr for BuiltinGraphon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, arg) = match s.split_once(':') {
            Some((t, a)) => (t, Some(a)),
            None => (s, None),
        };
        let param = |arg: Option<&str>| -> Result<f64> {
            let a = arg
                .ok_or_else(|| Error::param(format!("{tag} needs a parameter, e.g. {tag}:0.5")))?;
            let c: f64 = a
                .parse()
                .map_err(|_| Error::param(format!("bad kernel parameter {a:?}")))?;
            check_positive(c)?;
            Ok(c)
        };
        let no_param = |g: BuiltinGraphon| -> Result<BuiltinGraphon> {
            match arg {
                None => Ok(g),
                Some(_) => Err(Error::param(format!("{tag} takes no parameter"))),
            }
        };
        match tag {
            "uniform-limit" => no_param(BuiltinGraphon::UniformLimit),
            "ranked-limit" => no_param(BuiltinGraphon::RankedLimit),
            "prefix-ratio" => no_param(BuiltinGraphon::PrefixRatio),
            "prefix-limit" => no_param(BuiltinGraphon::PrefixLimit),
            "half-graph" => no_param(BuiltinGraphon::HalfGraph),
            "pref-log" => Ok(BuiltinGraphon::PrefLog(param(arg)?)),
            "spag-limit" => Ok(BuiltinGraphon::SpagLimit(param(arg)?)),
            _ => Err(Error::param(format!("unknown builtin graphon {s:?}"))),
        }
    }
}

/// Block-constant graphon: `k` blocks of positive measure with a symmetric
/// value matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGraphon {
    k: usize,
    values: Vec<f64>,
    measures: Vec<f64>,
    /// Right endpoints of the blocks.
    cumulative: Vec<f64>,
    equal: bool,
}

impl StepGraphon {
    /// `values` is row-major `k x k`.
    pub fn new(values: Vec<f64>, measures: Vec<f64>) -> Result<Self> {
        let k = measures.len();
        if k == 0 {
            return Err(Error::param("step graphon needs at least one block"));
        }
        if values.len() != k * k {
            return Err(Error::param(format!(
                "expected {} values, got {}",
                k * k,
                values.len()
            )));
        }
        if measures.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::param("block measures must be positive"));
        }
        let total: f64 = measures.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!(
                "block measures sum to {total}, not 1"
            )));
        }
        for i in 0..k {
            for j in 0..i {
                if values[i * k + j] != values[j * k + i] {
                    return Err(Error::param(format!("values not symmetric at ({i},{j})")));
                }
            }
        }
        let equal = measures.iter().all(|&m| m == measures[0]);
        let mut acc = 0.0;
        let cumulative = measures
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        Ok(StepGraphon {
            k,
            values,
            measures,
            cumulative,
            equal,
        })
    }

    /// `k` blocks of measure `1/k`.
    pub fn uniform(k: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("step graphon needs at least one block"));
        }
        let measures = vec![1.0 / k as f64; k];
        // 1/k summed k times can miss 1 by a few ulps; the tolerance covers it.
        StepGraphon::new(values, measures)
    }

    pub fn block_count(&self) -> usize {
        self.k
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.k + j]
    }

    pub fn has_equal_measures(&self) -> bool {
        self.equal
    }

    pub fn is_bounded01(&self) -> bool {
        self.values.iter().all(|v| (0.0..=1.0).contains(v))
    }

    /// Block containing coordinate `x`; coordinates outside `[0,1)` are
    /// clamped to the first or last block.
    pub fn block_of(&self, x: f64) -> usize {
        if self.equal {
            ((x * self.k as f64).floor().max(0.0) as usize).min(self.k - 1)
        } else {
            self.cumulative.partition_point(|&c| c <= x).min(self.k - 1)
        }
    }

    /// Value at `(x, y)` for `x, y` in `[0,1)`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&x) || !(0.0..1.0).contains(&y) {
            return Err(Error::domain(format!(
                "coordinates ({x}, {y}) outside [0,1)"
            )));
        }
        Ok(self.value(self.block_of(x), self.block_of(y)))
    }

    /// `W_G`: `n` equal blocks, value 1 on edges and 0 elsewhere.
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.node_count();
        let mut values = vec![0.0; n * n];
        for (i, j) in g.edges() {
            values[i * n + j] = 1.0;
            values[j * n + i] = 1.0;
        }
        StepGraphon::uniform(n, values).expect("graph has at least one node")
    }

    /// Same partition, values mapped pointwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> StepGraphon {
        StepGraphon {
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    /// Pointwise combination of two step graphons on the same partition.
    pub fn zip_with(
        &self,
        other: &StepGraphon,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<StepGraphon> {
        if self.measures != other.measures {
            return Err(Error::param("step graphons live on different partitions"));
        }
        Ok(StepGraphon {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            ..self.clone()
        })
    }
}

/// Measure-preserving bit interleaving `[0,1] -> [0,1]^2`: the odd-indexed
/// binary digits of `x` (1st, 3rd, ...) form the first coordinate and the
/// even-indexed digits the second. Only the first `2 * bits` digits are used.
pub fn deinterleave(x: f64, bits: u32) -> (f64, f64) {
    let total = 2 * bits;
    let scaled = (x.clamp(0.0, 1.0) * (1u64 << total) as f64).floor() as u64;
    let word = scaled.min((1u64 << total) - 1);
    let (mut a, mut b) = (0u64, 0u64);
    for t in 0..bits {
        // digit 2t+1 (1-based) sits at bit position total-1-2t
        let odd = (word >> (total - 1 - 2 * t)) & 1;
        let even = (word >> (total - 2 - 2 * t)) & 1;
        a = (a << 1) | odd;
        b = (b << 1) | even;
    }
    let scale = (1u64 << bits) as f64;
    (a as f64 / scale, b as f64 / scale)
}

/// Pulls a two-dimensional kernel back to `[0,1]` through [`deinterleave`].
pub fn flatten_2d(kernel: &Kernel, bits: u32) -> Result<Kernel> {
    if kernel.dim() != 2 {
        return Err(Error::param("flatten_2d expects a two-dimensional kernel"));
    }
    if !(8..=26).contains(&bits) {
        return Err(Error::param(format!(
            "bits must lie in [8, 26], got {bits}"
        )));
    }
    let inner = kernel.clone();
    Ok(Kernel::from_fn(
        format!("{}@flat{bits}", kernel.name()),
        kernel.bounded01(),
        move |x, y| {
            let (x1, x2) = deinterleave(x, bits);
            let (y1, y2) = deinterleave(y, bits);
            inner.eval(&[x1, x2], &[y1, y2])
        },
    ))
}

/// Node order by nonincreasing degree, ties by ascending label.
pub fn degree_order(g: &Graph) -> Vec<usize> {
    let deg = g.degrees();
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    order
}

pub fn reorder_by_degree(g: &Graph) -> Graph {
    g.reordered(&degree_order(g))
}
