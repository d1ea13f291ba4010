//! Seeded generators for the randomly growing graph models, and the exact
//! marginal edge probabilities they are tested against.
//!
//! Labelling conventions. Every generator stores nodes 0-based in birth
//! order. The oracles use each model's natural convention:
//!
//! * uniform attachment: labels `0..n`, `P(i ~ j) = 1 - max(i, j) / n`;
//! * ranked attachment: labels `1..n` (the `t`-th node is born at iteration
//!   `t`), `P(i !~ j) = i (j-2)(j-1) / (j (n-1) n)` for `i < j`;
//! * prefix attachment: labels `1..n`, `P(i ~ j) = (j - i) / j` for `i < j`.
//!
//! [`OracleModel::oracle_label`] converts a stored index to the oracle label.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::distributions::Open01;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, Multigraph};
use crate::graphon::{Kernel, StepGraphon};
use crate::math::ln_factorial;
use crate::rng::{Rng, Seed};

/// Latent coordinates of the nodes of a graph, one point per node.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    dim: usize,
    coords: Vec<f64>,
}

impl LabeledSample {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::param(
                "coordinate count is not a multiple of the dimension",
            ));
        }
        if coords.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::param("sample coordinates must lie in [0,1]"));
        }
        Ok(LabeledSample { dim, coords })
    }

    /// The points `0, 1/n, ..., (n-1)/n`.
    pub fn grid(n: usize) -> Self {
        LabeledSample {
            dim: 1,
            coords: (0..n).map(|i| i as f64 / n as f64).collect(),
        }
    }

    /// `n` i.i.d. uniform points of `(0,1)^dim`.
    pub fn uniform(n: usize, dim: usize, seed: Seed) -> Self {
        let mut rng = seed.rng();
        LabeledSample {
            dim,
            coords: (0..n * dim).map(|_| rng.sample(Open01)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.dim)
    }
}

fn require_nodes(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::param("node count must be at least 1"))
    } else {
        Ok(())
    }
}

#[inline]
fn coin(rng: &mut Rng, p: f64) -> bool {
    rng.gen::<f64>() < p
}

/// Connects every currently nonadjacent pair among the first `t` nodes with
/// probability `p`.
fn densify(g: &mut Graph, t: usize, p: f64, rng: &mut Rng) {
    if p <= 0.0 {
        return;
    }
    for i in 0..t {
        for j in i + 1..t {
            if !g.has_edge(i, j) && coin(rng, p) {
                g.add_edge(i, j);
            }
        }
    }
}

/// Uniform attachment: at iteration `t` a node is born and every nonadjacent
/// pair among the `t` nodes is joined with probability `1/t`.
pub fn grow_uniform(n: usize, seed: Seed) -> Result<Graph> {
    require_nodes(n)?;
    let mut rng = seed.rng();
    let mut g = Graph::empty(n);
    for t in 2..=n {
        densify(&mut g, t, 1.0 / t as f64, &mut rng);
    }
    Ok(g)
}

/// Ranked attachment: the node born at iteration `t` (label `t`) joins each
/// older label `i` with probability `1 - i/t`, then every nonadjacent pair is
/// joined with probability `min(1, 2/t)`.
pub fn grow_ranked(n: usize, seed: Seed) -> Result<Graph> {
    require_nodes(n)?;
    let mut rng = seed.rng();
    let mut g = Graph::empty(n);
    for t in 2..=n {
        let newborn = t - 1;
        for label in 1..t {
            if coin(&mut rng, 1.0 - label as f64 / t as f64) {
                g.add_edge(label - 1, newborn);
            }
        }
        densify(&mut g, t, (2.0 / t as f64).min(1.0), &mut rng);
    }
    Ok(g)
}

/// Prefix attachment: node `k` (1-based) draws `z` uniformly from `1..=k`
/// and joins nodes `1..z`. Its latent label is `(k/n, z/k)`.
pub fn grow_prefix(n: usize, seed: Seed) -> Result<(Graph, LabeledSample)> {
    require_nodes(n)?;
    let mut rng = seed.rng();
    let mut g = Graph::empty(n);
    let mut coords = Vec::with_capacity(2 * n);
    for k in 1..=n {
        let z = rng.gen_range(1..=k);
        for i in 1..z {
            g.add_edge(i - 1, k - 1);
        }
        coords.push(k as f64 / n as f64);
        coords.push(z as f64 / k as f64);
    }
    Ok((g, LabeledSample { dim: 2, coords }))
}

/// Preferential attachment on `n` fixed nodes with `m` edges.
///
/// Starts from the sequence `0..n`, appends `2m` entries each copied from a
/// uniformly chosen position of the current sequence, then joins appended
/// entries `2k` and `2k+1`.
pub fn grow_pag(n: usize, m: usize, seed: Seed) -> Result<Multigraph> {
    require_nodes(n)?;
    let mut rng = seed.rng();
    let mut seq: Vec<usize> = Vec::with_capacity(n + 2 * m);
    seq.extend(0..n);
    for _ in 0..2 * m {
        let pick = seq[rng.gen_range(0..seq.len())];
        seq.push(pick);
    }
    Ok(pag_from_sequence(n, &seq[n..]))
}

/// Multigraph obtained by pairing consecutive entries of an appended sequence.
pub fn pag_from_sequence(n: usize, appended: &[usize]) -> Multigraph {
    let mut g = Multigraph::new(n);
    for pair in appended.chunks_exact(2) {
        g.add_edge(pair[0], pair[1]);
    }
    g
}

/// Drops loops and collapses parallel edges.
pub fn simplify_pag(g: &Multigraph) -> Graph {
    Graph::from_edges(
        g.node_count(),
        g.pairs()
            .filter(|&(i, j, _)| i != j)
            .map(|(i, j, _)| (i, j)),
    )
    .expect("pairs are in range")
}

/// Edge count `m = c n^2 / 2` (rounded) at which `PAG(n, m)` has density
/// limit `c ln(x) ln(y)` and its simplification `1 - exp(-c ln(x) ln(y))`.
pub fn pag_edges_for(c: f64, n: usize) -> usize {
    (c * (n * n) as f64 / 2.0).round() as usize
}

/// Simplified preferential attachment graph with `m = c n^2 / 2`.
pub fn grow_spag(n: usize, c: f64, seed: Seed) -> Result<Graph> {
    if !(c >= 0.0) {
        return Err(Error::param(format!("c must be nonnegative, got {c}")));
    }
    Ok(simplify_pag(&grow_pag(n, pag_edges_for(c, n), seed)?))
}

fn check_sample_kernel(s: &LabeledSample, w: &Kernel) -> Result<()> {
    if s.dim() != w.dim() {
        return Err(Error::param(format!(
            "sample dimension {} does not match kernel dimension {}",
            s.dim(),
            w.dim()
        )));
    }
    Ok(())
}

/// `G(S, W)`: pairs joined independently with probability `W(s_i, s_j)`.
pub fn sample_w_random(s: &LabeledSample, w: &Kernel, seed: Seed) -> Result<Graph> {
    check_sample_kernel(s, w)?;
    if !w.bounded01() {
        return Err(Error::param(format!(
            "kernel {} is not [0,1]-valued",
            w.name()
        )));
    }
    let mut rng = seed.rng();
    let n = s.len();
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            let p = w.eval(s.point(i), s.point(j));
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!(
                    "kernel value {p} at pair ({i},{j}) outside [0,1]"
                )));
            }
            if coin(&mut rng, p) {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// `H(S, W)` as a step graphon: equal blocks, edge weights `W(s_i, s_j)`,
/// zero diagonal.
pub fn weighted_h(s: &LabeledSample, w: &Kernel) -> Result<StepGraphon> {
    check_sample_kernel(s, w)?;
    let n = s.len();
    if n == 0 {
        return Err(Error::param("empty sample"));
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = w.eval(s.point(i), s.point(j));
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    StepGraphon::uniform(n, values)
}

/// Grid used to validate monotonicity of prescribed limits.
pub const MONOTONE_PROBE_GRID: usize = 64;
pub const MONOTONE_PROBE_TOL: f64 = 1e-12;

fn check_monotone(w: &Kernel) -> Result<()> {
    let pts: Vec<f64> = (1..=MONOTONE_PROBE_GRID)
        .map(|a| a as f64 / MONOTONE_PROBE_GRID as f64)
        .collect();
    for &y in &pts {
        for pair in pts.windows(2) {
            let (lo, hi) = (w.eval1(pair[0], y), w.eval1(pair[1], y));
            if hi > lo + MONOTONE_PROBE_TOL {
                return Err(Error::param(format!(
                    "kernel {} increases from {lo} to {hi} between x={} and x={} at y={y}",
                    w.name(),
                    pair[0],
                    pair[1]
                )));
            }
        }
    }
    Ok(())
}

/// Growth with a prescribed limit `W` (monotone nonincreasing, `[0,1]`-valued).
///
/// Nodes carry labels `1..n`. When node `t` is born it joins each `j < t`
/// with probability `W(j/t, 1)`; each nonadjacent older pair `i < j < t` is
/// joined with probability
/// `(W(i/t, j/t) - W(i/(t-1), j/(t-1))) / (1 - W(i/(t-1), j/(t-1)))`,
/// which telescopes to `P(i ~ j) = W(i/n, j/n)` after `n` steps.
pub fn grow_prescribed(w: &Kernel, n: usize, seed: Seed) -> Result<Graph> {
    require_nodes(n)?;
    if w.dim() != 1 {
        return Err(Error::param(
            "prescribed growth needs a one-dimensional kernel",
        ));
    }
    if !w.bounded01() {
        return Err(Error::param(format!(
            "kernel {} is not [0,1]-valued",
            w.name()
        )));
    }
    check_monotone(w)?;
    let mut rng = seed.rng();
    let mut g = Graph::empty(n);
    for t in 2..=n {
        let (tf, prev) = (t as f64, (t - 1) as f64);
        for j in 1..t {
            if coin(&mut rng, w.eval1(j as f64 / tf, 1.0)) {
                g.add_edge(j - 1, t - 1);
            }
        }
        for i in 1..t {
            for j in i + 1..t {
                if g.has_edge(i - 1, j - 1) {
                    continue;
                }
                let before = w.eval1(i as f64 / prev, j as f64 / prev);
                let denom = 1.0 - before;
                // denominator 0: the pair is already adjacent almost surely
                let p = if denom > 0.0 {
                    ((w.eval1(i as f64 / tf, j as f64 / tf) - before) / denom).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                if coin(&mut rng, p) {
                    g.add_edge(i - 1, j - 1);
                }
            }
        }
    }
    Ok(g)
}

/// Growth toward `W = 1 - U` with `U` homogeneous of degree `c`.
///
/// `boundary(x)` is `W(x, 1)`. Node `t` joins each older label `i` with
/// probability `boundary(i/t)`; afterwards every nonadjacent older pair is
/// joined with probability `1 - ((t-1)/t)^c`.
pub fn grow_homogeneous<F>(c: f64, boundary: F, n: usize, seed: Seed) -> Result<Graph>
where
    F: Fn(f64) -> f64,
{
    require_nodes(n)?;
    if !(c >= 0.0) {
        return Err(Error::param(format!(
            "homogeneity degree must be nonnegative, got {c}"
        )));
    }
    let mut rng = seed.rng();
    let mut g = Graph::empty(n);
    for t in 2..=n {
        for i in 1..t {
            let p = boundary(i as f64 / t as f64);
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!(
                    "boundary profile value {p} outside [0,1]"
                )));
            }
            if coin(&mut rng, p) {
                g.add_edge(i - 1, t - 1);
            }
        }
        let p = 1.0 - ((t - 1) as f64 / t as f64).powf(c);
        densify(&mut g, t - 1, p, &mut rng);
    }
    Ok(g)
}

/// `P(i ~ j)` after `n` steps of [`grow_homogeneous`], labels `1..n`.
pub fn homogeneous_edge_probability<F>(c: f64, boundary: F, i: usize, j: usize, n: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let (i, j) = (i.min(j), i.max(j));
    1.0 - (1.0 - boundary(i as f64 / j as f64)) * (j as f64 / n as f64).powf(c)
}

/// Models with an exact marginal edge probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleModel {
    Uniform,
    Ranked,
    Prefix,
}

impl OracleModel {
    /// Oracle label of the node stored at index `stored`.
    pub fn oracle_label(self, stored: usize) -> usize {
        match self {
            OracleModel::Uniform => stored,
            OracleModel::Ranked | OracleModel::Prefix => stored + 1,
        }
    }
}

impl FromStr for OracleModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(OracleModel::Uniform),
            "ranked" => Ok(OracleModel::Ranked),
            "prefix" => Ok(OracleModel::Prefix),
            _ => Err(Error::param(format!(
                "no edge-probability oracle for model {s:?}"
            ))),
        }
    }
}

impl fmt::Display for OracleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OracleModel::Uniform => "uniform",
            OracleModel::Ranked => "ranked",
            OracleModel::Prefix => "prefix",
        };
        f.write_str(s)
    }
}

/// Exact `P(i ~ j)` in graph `n` of the model, in the model's own labels
/// (see the module docs).
pub fn edge_prob_oracle(model: OracleModel, i: usize, j: usize, n: usize) -> Result<f64> {
    let (lo, hi) = (i.min(j), i.max(j));
    let (first, last) = match model {
        OracleModel::Uniform => (0, n.saturating_sub(1)),
        OracleModel::Ranked | OracleModel::Prefix => (1, n),
    };
    if lo == hi || lo < first || hi > last || n == 0 {
        return Err(Error::param(format!(
            "invalid pair ({i},{j}) for {model} attachment with n={n}"
        )));
    }
    let (lo, hi, n) = (lo as f64, hi as f64, n as f64);
    Ok(match model {
        OracleModel::Uniform => 1.0 - hi / n,
        OracleModel::Ranked => 1.0 - lo * (hi - 2.0) * (hi - 1.0) / (hi * (n - 1.0) * n),
        OracleModel::Prefix => (hi - lo) / hi,
    })
}

/// [`edge_prob_oracle`] addressed by stored (0-based) node indices.
pub fn stored_edge_probability(model: OracleModel, a: usize, b: usize, n: usize) -> Result<f64> {
    edge_prob_oracle(model, model.oracle_label(a), model.oracle_label(b), n)
}

/// Probability of one particular ordered, oriented insertion history of a
/// multigraph with the given degrees: `d_1! ... d_n! / (n (n+1) ... (n+2m-1))`.
pub fn pag_history_probability(degrees: &[u64], m: u64) -> f64 {
    let n = degrees.len() as u64;
    let ln_num: f64 = degrees.iter().map(|&d| ln_factorial(d)).sum();
    (ln_num - crate::math::ln_rising(n, 2 * m)).exp()
}

/// `P(PAG(n, m) = g)`.
///
/// Counts the distinct insertion histories of `g` (edge orders times
/// orientations of non-loop edges, modulo permuting identical parallel
/// edges or loops) and multiplies by [`pag_history_probability`]:
/// `m! 2^{m'} d_1!...d_n! / (n(n+1)...(n+2m-1)) / prod(mult!)`.
/// The multiplicity correction is 1 when `g` has no repeated edge.
pub fn pag_multigraph_probability(g: &Multigraph, n: usize, m: u64) -> Result<f64> {
    if g.node_count() != n {
        return Err(Error::param(format!(
            "graph has {} nodes, expected {n}",
            g.node_count()
        )));
    }
    if g.edge_count() != m {
        return Err(Error::param(format!(
            "graph has {} edges, expected {m}",
            g.edge_count()
        )));
    }
    let m_prime = g.non_loop_edge_count();
    let ln_degrees: f64 = g.degrees().iter().map(|&d| ln_factorial(d)).sum();
    let ln_repeats: f64 = g.pairs().map(|(_, _, k)| ln_factorial(k as u64)).sum();
    let ln_p = ln_factorial(m) + m_prime as f64 * std::f64::consts::LN_2 + ln_degrees
        - crate::math::ln_rising(n as u64, 2 * m)
        - ln_repeats;
    Ok(ln_p.exp())
}

/// One leaf of the preferential-attachment process tree.
#[derive(Clone, Debug, PartialEq)]
pub struct PagLeaf {
    pub appended: Vec<usize>,
    pub probability: f64,
}

/// Every leaf of the `PAG(n, m)` process: all `n (n+1) ... (n+2m-1)` pick
/// sequences collapsed to the distinct appended-node sequences, with exact
/// probabilities. Exponential; meant for tiny `n`, `m`.
pub fn pag_enumerate(n: usize, m: usize) -> Result<Vec<PagLeaf>> {
    require_nodes(n)?;
    if n.pow(2 * m as u32) > 1 << 20 {
        return Err(Error::size("process tree too large to enumerate"));
    }
    let mut out = Vec::new();
    let mut seq: Vec<usize> = (0..n).collect();
    let mut counts = vec![1usize; n];
    fn rec(
        n: usize,
        target: usize,
        seq: &mut Vec<usize>,
        counts: &mut [usize],
        p: f64,
        out: &mut Vec<PagLeaf>,
    ) {
        if seq.len() == target {
            out.push(PagLeaf {
                appended: seq[n..].to_vec(),
                probability: p,
            });
            return;
        }
        let len = seq.len() as f64;
        for v in 0..n {
            let c = counts[v];
            seq.push(v);
            counts[v] += 1;
            rec(n, target, seq, counts, p * c as f64 / len, out);
            counts[v] -= 1;
            seq.pop();
        }
    }
    rec(n, n + 2 * m, &mut seq, &mut counts, 1.0, &mut out);
    Ok(out)
}

/// Law of `PAG(n, m)` by exhaustive enumeration, keyed by the multigraph's
/// lexicographic pair list.
pub fn pag_exact_law(
    n: usize,
    m: usize,
) -> Result<BTreeMap<Vec<(usize, usize, u32)>, (Multigraph, f64)>> {
    let mut law: BTreeMap<Vec<(usize, usize, u32)>, (Multigraph, f64)> = BTreeMap::new();
    for leaf in pag_enumerate(n, m)? {
        let g = pag_from_sequence(n, &leaf.appended);
        let key: Vec<_> = g.pairs().collect();
        law.entry(key).or_insert_with(|| (g, 0.0)).1 += leaf.probability;
    }
    Ok(law)
}
