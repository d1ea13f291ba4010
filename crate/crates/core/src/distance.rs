//! Cut norm, cut distance, edit distance and rectangle integrals.
//!
//! Distances between graphs are searched over node permutations only, so
//! every reported distance is an upper bound on the overlay infimum.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphon::{degree_order, flatten_2d, Kernel, StepGraphon};
use crate::rng::Seed;

/// Largest block count for exact cut-norm enumeration.
pub const MAX_EXACT_CUT_BLOCKS: usize = 24;
/// Largest graph for the exhaustive permutation search.
pub const MAX_EXACT_OVERLAY_NODES: usize = 8;
/// Dyadic intervals of lengths `1, 1/2, .., 2^-DYADIC_DEPTH` form the lower-bound family.
pub const DYADIC_DEPTH: u32 = 6;
/// Quadrature points per side in [`rect_integral`].
pub const RECT_QUAD_POINTS: usize = 256;
/// Binary digits per coordinate when a 2-d kernel is flattened for comparison.
pub const FLATTEN_BITS: u32 = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutNormResult {
    pub value: f64,
    pub lower_bound: f64,
    pub exact: bool,
    /// Block index sets `(S, T)` attaining `lower_bound`.
    pub witness: (Vec<usize>, Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlayResult {
    pub distance_estimate: f64,
    /// Node `i` of the first graph is matched with node `permutation[i]` of the second.
    pub permutation: Vec<usize>,
    pub exact: bool,
    /// Certified lower bound, where one is available.
    pub lower_bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    Exact,
    Heuristic,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SearchMode::Exact),
            "heuristic" => Ok(SearchMode::Heuristic),
            _ => Err(Error::param(format!(
                "unknown mode {s:?} (exact|heuristic)"
            ))),
        }
    }
}

/// Block-weighted matrix `m_ij = mu_i mu_j w_ij`.
fn weighted(s: &StepGraphon) -> Vec<f64> {
    let k = s.block_count();
    let mu = s.measures();
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            m[i * k + j] = mu[i] * mu[j] * s.value(i, j);
        }
    }
    m
}

/// `integral of W over S x T` for block index sets.
pub fn cut_objective(s: &StepGraphon, set_s: &[usize], set_t: &[usize]) -> f64 {
    let mu = s.measures();
    let mut total = 0.0;
    for &i in set_s {
        for &j in set_t {
            total += mu[i] * mu[j] * s.value(i, j);
        }
    }
    total
}

fn indices(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

/// Exact cut norm of a step function.
///
/// `integral over S x T of W` is bilinear in the indicator functions of `S`
/// and `T`, and each indicator ranges over a product of intervals
/// `[0,1]^blocks` after averaging within blocks, so the supremum is attained
/// at a vertex, i.e. at unions of whole blocks. For fixed `S` the best `T`
/// takes exactly the blocks whose column sum has the favourable sign.
pub fn cut_norm_exact(s: &StepGraphon) -> Result<CutNormResult> {
    let k = s.block_count();
    if k > MAX_EXACT_CUT_BLOCKS {
        return Err(Error::size(format!(
            "exact cut norm enumerates 2^k subsets; k={k} exceeds {MAX_EXACT_CUT_BLOCKS}"
        )));
    }
    let m = weighted(s);
    let mut col = vec![0.0; k];
    let mut in_s = vec![false; k];
    let mut best = 0.0;
    let mut best_s = vec![false; k];
    let mut best_sign = 1.0;
    // Gray-code walk: step g flips the bit at the position of the lowest set bit of g
    for g in 1u64..(1u64 << k) {
        let i = g.trailing_zeros() as usize;
        let sign = if in_s[i] { -1.0 } else { 1.0 };
        in_s[i] = !in_s[i];
        for j in 0..k {
            col[j] += sign * m[i * k + j];
        }
        let (pos, neg) = col.iter().fold(
            (0.0, 0.0),
            |(p, n), &c| {
                if c > 0.0 {
                    (p + c, n)
                } else {
                    (p, n - c)
                }
            },
        );
        if pos > best {
            best = pos;
            best_s.copy_from_slice(&in_s);
            best_sign = 1.0;
        }
        if neg > best {
            best = neg;
            best_s.copy_from_slice(&in_s);
            best_sign = -1.0;
        }
    }
    let set_s = indices(&best_s);
    let set_t: Vec<usize> = (0..k)
        .filter(|&j| best_sign * set_s.iter().map(|&i| m[i * k + j]).sum::<f64>() > 0.0)
        .collect();
    let value = cut_objective(s, &set_s, &set_t).abs();
    Ok(CutNormResult {
        value,
        lower_bound: value,
        exact: true,
        witness: (set_s, set_t),
    })
}

/// Best response: given a mask, the blocks whose weighted sum against it has sign `sign`.
fn respond(m: &[f64], k: usize, given: &[bool], sign: f64, out: &mut [bool]) -> f64 {
    let mut total = 0.0;
    for j in 0..k {
        let mut c = 0.0;
        for i in 0..k {
            if given[i] {
                c += m[i * k + j];
            }
        }
        out[j] = sign * c > 0.0;
        if out[j] {
            total += sign * c;
        }
    }
    total
}

const MAX_ALTERNATIONS: usize = 1000;

/// Alternating maximisation from `restarts` random subsets, for both signs.
/// Restart `r` draws its start from `seed.substream(r)`, so more restarts
/// never lower the result.
pub fn cut_norm_heuristic(s: &StepGraphon, restarts: usize, seed: Seed) -> Result<CutNormResult> {
    if restarts == 0 {
        return Err(Error::param("restarts must be at least 1"));
    }
    let k = s.block_count();
    let m = weighted(s);
    // W is symmetric, so the matrix is its own transpose and one response rule serves both sides
    let runs: Vec<(f64, Vec<bool>, Vec<bool>)> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed.substream(r).rng();
            let start: Vec<bool> = (0..k).map(|_| rng.gen()).collect();
            let mut best = (0.0, vec![false; k], vec![false; k]);
            for sign in [1.0, -1.0] {
                let mut set_s = start.clone();
                let mut set_t = vec![false; k];
                let mut value = respond(&m, k, &set_s, sign, &mut set_t);
                for _ in 0..MAX_ALTERNATIONS {
                    let mut next_s = vec![false; k];
                    let v = respond(&m, k, &set_t, sign, &mut next_s);
                    if v <= value {
                        break;
                    }
                    value = v;
                    set_s = next_s;
                    let mut next_t = vec![false; k];
                    let v = respond(&m, k, &set_s, sign, &mut next_t);
                    if v <= value {
                        break;
                    }
                    value = v;
                    set_t = next_t;
                }
                if value > best.0 {
                    best = (value, set_s, set_t);
                }
            }
            best
        })
        .collect();
    let mut best = (0.0, vec![false; k], vec![false; k]);
    for run in runs {
        if run.0 > best.0 {
            best = run;
        }
    }
    let (set_s, set_t) = (indices(&best.1), indices(&best.2));
    let value = cut_objective(s, &set_s, &set_t).abs();
    Ok(CutNormResult {
        value,
        lower_bound: value,
        exact: false,
        witness: (set_s, set_t),
    })
}

fn require_same_size(g: &Graph, h: &Graph) -> Result<usize> {
    if g.node_count() != h.node_count() {
        return Err(Error::param(format!(
            "graphs have {} and {} nodes; overlays need equal sizes",
            g.node_count(),
            h.node_count()
        )));
    }
    Ok(g.node_count())
}

/// `a_ij - b_{p(i) p(j)}` as integers.
fn int_difference(g: &Graph, h: &Graph, perm: &[usize]) -> Vec<i32> {
    let n = g.node_count();
    let mut d = vec![0i32; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = g.has_edge(i, j) as i32 - h.has_edge(perm[i], perm[j]) as i32;
        }
    }
    d
}

/// Exact cut norm of an integer matrix with unit block weights, as a count.
fn cut_norm_int(n: usize, d: &[i32]) -> i64 {
    let mut col = vec![0i64; n];
    let mut in_s = vec![false; n];
    let mut best = 0i64;
    for g in 1u64..(1u64 << n) {
        let i = g.trailing_zeros() as usize;
        let sign = if in_s[i] { -1 } else { 1 };
        in_s[i] = !in_s[i];
        for j in 0..n {
            col[j] += sign * d[i * n + j] as i64;
        }
        let (pos, neg) = col.iter().fold(
            (0i64, 0i64),
            |(p, q), &c| if c > 0 { (p + c, q) } else { (p, q - c) },
        );
        best = best.max(pos).max(neg);
    }
    best
}

fn step_difference(g: &Graph, h: &Graph, perm: &[usize]) -> StepGraphon {
    let n = g.node_count();
    let values = int_difference(g, h, perm)
        .into_iter()
        .map(f64::from)
        .collect();
    StepGraphon::uniform(n, values).expect("difference of symmetric matrices is symmetric")
}

fn l1_count(g: &Graph, h: &Graph, perm: &[usize]) -> usize {
    let n = g.node_count();
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            count += (g.has_edge(i, j) != h.has_edge(perm[i], perm[j])) as usize;
        }
    }
    count
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n)
            .rev()
            .find(|&j| p[j] > p[i - 1])
            .expect("pivot has a successor");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Smallest score over all permutations; ties go to the lexicographically first.
fn exact_search<F>(n: usize, score: F) -> (i64, Vec<usize>)
where
    F: Fn(&[usize]) -> i64 + Sync,
{
    let perms = all_permutations(n);
    let scores: Vec<i64> = perms.par_iter().map(|p| score(p)).collect();
    let (best, _) = scores
        .iter()
        .enumerate()
        .min_by_key(|&(i, &s)| (s, i))
        .expect("at least one permutation");
    (scores[best], perms[best].clone())
}

/// Degree-sorted initial alignment: the `r`-th highest-degree node of `g`
/// is matched with the `r`-th highest-degree node of `h`.
fn degree_alignment(g: &Graph, h: &Graph) -> Vec<usize> {
    let (og, oh) = (degree_order(g), degree_order(h));
    let mut perm = vec![0; g.node_count()];
    for (a, b) in og.into_iter().zip(oh) {
        perm[a] = b;
    }
    perm
}

/// Options for the heuristic overlay search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeuristicOptions {
    /// Restarts for each heuristic cut-norm evaluation.
    pub restarts: usize,
    /// Random swap proposals tried during hill climbing.
    pub swap_proposals: usize,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        HeuristicOptions {
            restarts: 16,
            swap_proposals: 200,
        }
    }
}

/// Cut distance between two equal-size graphs over node permutations.
pub fn cut_distance_graphs(
    g: &Graph,
    h: &Graph,
    mode: SearchMode,
    options: HeuristicOptions,
    seed: Seed,
) -> Result<OverlayResult> {
    let n = require_same_size(g, h)?;
    if n <= 1 {
        return Ok(OverlayResult {
            distance_estimate: 0.0,
            permutation: (0..n).collect(),
            exact: true,
            lower_bound: Some(0.0),
        });
    }
    let scale = (n * n) as f64;
    match mode {
        SearchMode::Exact => {
            if n > MAX_EXACT_OVERLAY_NODES {
                return Err(Error::size(format!(
                    "exact overlay search needs n <= {MAX_EXACT_OVERLAY_NODES}, got {n}"
                )));
            }
            let (best, perm) = exact_search(n, |p| cut_norm_int(n, &int_difference(g, h, p)));
            let value = best as f64 / scale;
            Ok(OverlayResult {
                distance_estimate: value,
                permutation: perm,
                exact: true,
                lower_bound: Some(value),
            })
        }
        SearchMode::Heuristic => {
            if options.restarts == 0 {
                return Err(Error::param("restarts must be at least 1"));
            }
            // the same seed for every evaluation keeps comparisons between overlays consistent
            let eval = |p: &[usize]| -> Result<f64> {
                Ok(cut_norm_heuristic(&step_difference(g, h, p), options.restarts, seed)?.value)
            };
            let mut perm = degree_alignment(g, h);
            let mut value = eval(&perm)?;
            let mut rng = seed.with_stream(u64::MAX).rng();
            for _ in 0..options.swap_proposals {
                if value == 0.0 {
                    break;
                }
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n - 1);
                let b = if b >= a { b + 1 } else { b };
                perm.swap(a, b);
                let v = eval(&perm)?;
                if v < value {
                    value = v;
                } else {
                    perm.swap(a, b);
                }
            }
            Ok(OverlayResult {
                distance_estimate: value,
                permutation: perm,
                exact: false,
                lower_bound: None,
            })
        }
    }
}

/// Edit distance `||W_G - W_H||_1` between two equal-size graphs over node permutations.
pub fn edit_distance(g: &Graph, h: &Graph, mode: SearchMode, seed: Seed) -> Result<OverlayResult> {
    let n = require_same_size(g, h)?;
    if n <= 1 {
        return Ok(OverlayResult {
            distance_estimate: 0.0,
            permutation: (0..n).collect(),
            exact: true,
            lower_bound: Some(0.0),
        });
    }
    let scale = (n * n) as f64 / 2.0;
    match mode {
        SearchMode::Exact => {
            if n > MAX_EXACT_OVERLAY_NODES {
                return Err(Error::size(format!(
                    "exact overlay search needs n <= {MAX_EXACT_OVERLAY_NODES}, got {n}"
                )));
            }
            let (best, perm) = exact_search(n, |p| l1_count(g, h, p) as i64);
            let value = best as f64 / scale;
            Ok(OverlayResult {
                distance_estimate: value,
                permutation: perm,
                exact: true,
                lower_bound: Some(value),
            })
        }
        SearchMode::Heuristic => {
            let mut perm = degree_alignment(g, h);
            let mut count = l1_count(g, h, &perm) as i64;
            // swapping the images of a and b only changes pairs touching a or b
            let swap_delta = |perm: &[usize], a: usize, b: usize| -> i64 {
                let (pa, pb) = (perm[a], perm[b]);
                let mut delta = 0i64;
                for c in 0..n {
                    if c == a || c == b {
                        continue;
                    }
                    let pc = perm[c];
                    let before = (g.has_edge(a, c) != h.has_edge(pa, pc)) as i64
                        + (g.has_edge(b, c) != h.has_edge(pb, pc)) as i64;
                    let after = (g.has_edge(a, c) != h.has_edge(pb, pc)) as i64
                        + (g.has_edge(b, c) != h.has_edge(pa, pc)) as i64;
                    delta += after - before;
                }
                delta
            };
            let mut order: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .collect();
            let mut rng = seed.rng();
            loop {
                let mut improved = false;
                // visit pairs in a seeded random order each pass
                for i in (1..order.len()).rev() {
                    order.swap(i, rng.gen_range(0..=i));
                }
                for &(a, b) in &order {
                    let d = swap_delta(&perm, a, b);
                    if d < 0 {
                        perm.swap(a, b);
                        count += d;
                        improved = true;
                    }
                }
                if !improved {
                    break;
                }
            }
            Ok(OverlayResult {
                distance_estimate: count as f64 / scale,
                permutation: perm,
                exact: false,
                lower_bound: None,
            })
        }
    }
}

fn comparable_kernel(w: &Kernel) -> Result<Kernel> {
    match w.dim() {
        1 => Ok(w.clone()),
        _ => flatten_2d(w, FLATTEN_BITS),
    }
}

/// Subsample points per block side when discretizing a kernel onto `n` blocks.
fn subsamples(n: usize, grid: usize) -> usize {
    grid.div_ceil(n).max(1)
}

/// `n`-block step function whose block values are midpoint averages of `w`
/// over `s x s` sub-points.
fn discretize(w: &Kernel, n: usize, grid: usize) -> Vec<f64> {
    let s = subsamples(n, grid);
    let offs: Vec<f64> = (0..s).map(|p| (p as f64 + 0.5) / s as f64).collect();
    let mut values = vec![0.0; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
        for b in a..n {
            let mut sum = 0.0;
            for &u in &offs {
                for &v in &offs {
                    sum += w.eval1((a as f64 + u) / n as f64, (b as f64 + v) / n as f64);
                }
            }
            row[b] = sum / (s * s) as f64;
        }
    });
    for a in 0..n {
        for b in 0..a {
            values[a * n + b] = values[b * n + a];
        }
    }
    values
}

/// Cut distance between a graph in birth order and a kernel.
///
/// The kernel is averaged onto the graph's `n` blocks (at least `grid`
/// points per axis) and the heuristic cut norm of the difference is
/// reported. `lower_bound` is the largest `|integral of W_G - W|` over dyadic rectangles.
pub fn cut_distance_graph_kernel(
    g: &Graph,
    w: &Kernel,
    grid: usize,
    restarts: usize,
    seed: Seed,
) -> Result<OverlayResult> {
    let n = g.node_count();
    if n == 0 || grid == 0 {
        return Err(Error::param("need a nonempty graph and a positive grid"));
    }
    let w = comparable_kernel(w)?;
    let disc = discretize(&w, n, grid);
    let values: Vec<f64> = (0..n * n)
        .map(|idx| g.has_edge(idx / n, idx % n) as u8 as f64 - disc[idx])
        .collect();
    let diff = StepGraphon::uniform(n, values)?;
    let norm = cut_norm_heuristic(&diff, restarts, seed)?;
    let bound = dyadic_lower_bound(g, &w, grid)?;
    Ok(OverlayResult {
        distance_estimate: norm.value,
        permutation: (0..n).collect(),
        exact: false,
        lower_bound: Some(bound),
    })
}

/// `||W_G - W||_1` for a graph in birth order, by midpoint sub-sampling
/// of each block with at least `grid` points per axis.
pub fn edit_distance_graph_kernel(g: &Graph, w: &Kernel, grid: usize) -> Result<OverlayResult> {
    let n = g.node_count();
    if n == 0 || grid == 0 {
        return Err(Error::param("need a nonempty graph and a positive grid"));
    }
    let w = comparable_kernel(w)?;
    let s = subsamples(n, grid);
    let offs: Vec<f64> = (0..s).map(|p| (p as f64 + 0.5) / s as f64).collect();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut sum = 0.0;
            for b in 0..n {
                let e = g.has_edge(a, b) as u8 as f64;
                for &u in &offs {
                    for &v in &offs {
                        sum += (e - w.eval1((a as f64 + u) / n as f64, (b as f64 + v) / n as f64))
                            .abs();
                    }
                }
            }
            sum
        })
        .collect();
    let total: f64 = rows.iter().sum();
    Ok(OverlayResult {
        distance_estimate: total / ((n * n * s * s) as f64),
        permutation: (0..n).collect(),
        exact: false,
        lower_bound: None,
    })
}

/// Lengths of the overlaps of `[lo, hi]` with the `n` equal blocks.
fn block_overlaps(n: usize, lo: f64, hi: f64) -> Vec<(usize, f64)> {
    if hi <= lo {
        return Vec::new();
    }
    let first = ((lo * n as f64).floor() as usize).min(n - 1);
    let last = ((hi * n as f64).ceil() as usize).clamp(first + 1, n);
    (first..last)
        .filter_map(|b| {
            let len = (hi.min((b + 1) as f64 / n as f64) - lo.max(b as f64 / n as f64)).max(0.0);
            (len > 0.0).then_some((b, len))
        })
        .collect()
}

/// Exact `integral of W_G over [a,b] x [c,d]`.
fn graph_rect_integral(g: &Graph, s: (f64, f64), t: (f64, f64)) -> f64 {
    let n = g.node_count();
    let rows = block_overlaps(n, s.0, s.1);
    let cols = block_overlaps(n, t.0, t.1);
    let mut total = 0.0;
    for &(i, li) in &rows {
        for &(j, lj) in &cols {
            if g.has_edge(i, j) {
                total += li * lj;
            }
        }
    }
    total
}

fn check_interval(iv: (f64, f64)) -> Result<()> {
    if !(0.0 <= iv.0 && iv.0 <= iv.1 && iv.1 <= 1.0) {
        return Err(Error::param(format!(
            "interval [{}, {}] is not inside [0, 1]",
            iv.0, iv.1
        )));
    }
    Ok(())
}

/// `integral over S x T of (W_G - W)` for intervals `S` and `T`; the graph part is
/// exact and the kernel part uses a midpoint rule with 256 points per side.
pub fn rect_integral(g: &Graph, w: &Kernel, s: (f64, f64), t: (f64, f64)) -> Result<f64> {
    check_interval(s)?;
    check_interval(t)?;
    if w.dim() != 1 {
        return Err(Error::param("rect_integral needs a kernel on [0,1]"));
    }
    if g.node_count() == 0 || s.1 == s.0 || t.1 == t.0 {
        return Ok(0.0);
    }
    let q = RECT_QUAD_POINTS;
    let (hs, ht) = ((s.1 - s.0) / q as f64, (t.1 - t.0) / q as f64);
    let kernel_part: f64 = (0..q)
        .into_par_iter()
        .map(|a| {
            let x = s.0 + (a as f64 + 0.5) * hs;
            (0..q)
                .map(|b| w.eval1(x, t.0 + (b as f64 + 0.5) * ht))
                .sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum::<f64>()
        * hs
        * ht;
    Ok(graph_rect_integral(g, s, t) - kernel_part)
}

/// Largest `|integral of W_G - W|` over `S x T` with `S` and `T` dyadic intervals of
/// length `1, 1/2, .., 2^-DYADIC_DEPTH`. The graph part is exact; the kernel
/// part is integrated over a `64 x 64` cell grid by the midpoint rule with
/// at least `grid` points per axis.
pub fn dyadic_lower_bound(g: &Graph, w: &Kernel, grid: usize) -> Result<f64> {
    if w.dim() != 1 {
        return Err(Error::param("dyadic bound needs a kernel on [0,1]"));
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(0.0);
    }
    let cells = 1usize << DYADIC_DEPTH;
    let q = grid.div_ceil(cells).max(1);
    let h = 1.0 / (cells * q) as f64;
    let mut diff = vec![0.0; cells * cells];
    // kernel cell integrals
    diff.par_chunks_mut(cells).enumerate().for_each(|(a, row)| {
        for (b, cell) in row.iter_mut().enumerate() {
            let mut sum = 0.0;
            for u in 0..q {
                let x = (a * q + u) as f64 * h + h / 2.0;
                for v in 0..q {
                    sum += w.eval1(x, (b * q + v) as f64 * h + h / 2.0);
                }
            }
            *cell = -sum * h * h;
        }
    });
    // graph cell integrals: spread each block over the cells it meets
    let width = 1.0 / cells as f64;
    let cover: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            let (lo, hi) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
            block_overlaps(cells, lo, hi)
                .into_iter()
                .filter_map(|(c, _)| {
                    let len = hi.min((c + 1) as f64 * width) - lo.max(c as f64 * width);
                    (len > 0.0).then_some((c, len))
                })
                .collect()
        })
        .collect();
    for (i, j) in g.edges() {
        for &(a, la) in &cover[i] {
            for &(b, lb) in &cover[j] {
                diff[a * cells + b] += la * lb;
                diff[b * cells + a] += la * lb;
            }
        }
    }
    // 2-d prefix sums
    let side = cells + 1;
    let mut pre = vec![0.0; side * side];
    for a in 0..cells {
        for b in 0..cells {
            pre[(a + 1) * side + b + 1] =
                diff[a * cells + b] + pre[a * side + b + 1] + pre[(a + 1) * side + b]
                    - pre[a * side + b];
        }
    }
    let intervals: Vec<(usize, usize)> = (0..=DYADIC_DEPTH)
        .flat_map(|d| {
            let len = cells >> d;
            (0..1usize << d).map(move |p| (p * len, (p + 1) * len))
        })
        .collect();
    let mut best: f64 = 0.0;
    for &(a0, a1) in &intervals {
        for &(b0, b1) in &intervals {
            let v = pre[a1 * side + b1] - pre[a0 * side + b1] - pre[a1 * side + b0]
                + pre[a0 * side + b0];
            best = best.max(v.abs());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::BuiltinGraphon;
    use crate::growth::grow_uniform;
    use proptest::prelude::*;

    /// All `4^k` pairs of block subsets.
    fn brute_cut_norm(s: &StepGraphon) -> f64 {
        let k = s.block_count();
        let mut best: f64 = 0.0;
        for a in 0u32..(1 << k) {
            let set_s: Vec<usize> = (0..k).filter(|&i| a >> i & 1 == 1).collect();
            for b in 0u32..(1 << k) {
                let set_t: Vec<usize> = (0..k).filter(|&i| b >> i & 1 == 1).collect();
                best = best.max(cut_objective(s, &set_s, &set_t).abs());
            }
        }
        best
    }

    fn random_step(k: usize, seed: u64) -> StepGraphon {
        let mut rng = Seed::new(seed, 9).rng();
        let mut values = vec![0.0; k * k];
        for i in 0..k {
            for j in i..k {
                let v: f64 = rng.gen_range(-1.0..1.0);
                values[i * k + j] = v;
                values[j * k + i] = v;
            }
        }
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut measures: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let head: f64 = measures[..k - 1].iter().sum();
        measures[k - 1] = 1.0 - head;
        StepGraphon::new(values, measures).unwrap()
    }

    #[test]
    fn exact_examples() {
        let zero = StepGraphon::uniform(3, vec![0.0; 9]).unwrap();
        assert_eq!(cut_norm_exact(&zero).unwrap().value, 0.0);
        let c = StepGraphon::uniform(4, vec![0.3; 16]).unwrap();
        let r = cut_norm_exact(&c).unwrap();
        assert!((r.value - 0.3).abs() < 1e-15);
        assert_eq!(r.witness, (vec![0, 1, 2, 3], vec![0, 1, 2, 3]));
        let pm = StepGraphon::uniform(2, vec![1.0, -1.0, -1.0, 1.0]).unwrap();
        let r = cut_norm_exact(&pm).unwrap();
        assert!((r.value - 0.25).abs() < 1e-15);
        assert!(r.exact);
        let big = StepGraphon::uniform(25, vec![0.0; 625]).unwrap();
        assert!(matches!(cut_norm_exact(&big), Err(Error::Size(_))));
    }

    #[test]
    fn exact_matches_brute_force() {
        for seed in 0..40 {
            let s = random_step(1 + seed as usize % 6, seed);
            let r = cut_norm_exact(&s).unwrap();
            assert!((r.value - brute_cut_norm(&s)).abs() < 1e-12);
            let again = cut_objective(&s, &r.witness.0, &r.witness.1).abs();
            assert!((again - r.lower_bound).abs() < 1e-12);
        }
    }

    #[test]
    fn heuristic_examples() {
        let zero = StepGraphon::uniform(3, vec![0.0; 9]).unwrap();
        assert_eq!(
            cut_norm_heuristic(&zero, 4, Seed::default()).unwrap().value,
            0.0
        );
        assert!(cut_norm_heuristic(&zero, 0, Seed::default()).is_err());
        for seed in 0..20 {
            let s = random_step(6, seed);
            let exact = cut_norm_exact(&s).unwrap().value;
            let mut last = 0.0;
            for r in [1, 2, 4, 8, 32] {
                let h = cut_norm_heuristic(&s, r, Seed::new(seed, 0)).unwrap();
                assert!(!h.exact);
                assert!(h.value >= last);
                assert!(h.value <= exact + 1e-12);
                last = h.value;
            }
        }
    }

    #[test]
    fn integer_norm_matches_float() {
        for seed in 0..10 {
            let g = grow_uniform(7, Seed::new(seed, 0)).unwrap();
            let h = grow_uniform(7, Seed::new(seed, 1)).unwrap();
            let id: Vec<usize> = (0..7).collect();
            let a = cut_norm_int(7, &int_difference(&g, &h, &id)) as f64 / 49.0;
            let b = cut_norm_exact(&step_difference(&g, &h, &id)).unwrap().value;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn permutations_enumerated() {
        let p = all_permutations(4);
        assert_eq!(p.len(), 24);
        assert_eq!(p[0], vec![0, 1, 2, 3]);
        assert_eq!(p[23], vec![3, 2, 1, 0]);
        assert_eq!(all_permutations(1), vec![vec![0]]);
    }

    #[test]
    fn overlay_examples() {
        let opts = HeuristicOptions::default();
        let g = grow_uniform(6, Seed::new(3, 0)).unwrap();
        for mode in [SearchMode::Exact, SearchMode::Heuristic] {
            assert_eq!(
                cut_distance_graphs(&g, &g, mode, opts, Seed::default())
                    .unwrap()
                    .distance_estimate,
                0.0
            );
            assert_eq!(
                edit_distance(&g, &g, mode, Seed::default())
                    .unwrap()
                    .distance_estimate,
                0.0
            );
        }
        // relabelled copies are at distance 0
        let shuffled = g.reordered(&[3, 5, 0, 1, 4, 2]);
        assert_eq!(
            cut_distance_graphs(&g, &shuffled, SearchMode::Exact, opts, Seed::default())
                .unwrap()
                .distance_estimate,
            0.0
        );
        // K_{2,2} against the twin blow-up of a single edge
        let k22 = Graph::complete_bipartite(2, 2);
        let blow = Graph::complete(2).blow_up(2);
        assert_eq!(
            cut_distance_graphs(&k22, &blow, SearchMode::Exact, opts, Seed::default())
                .unwrap()
                .distance_estimate,
            0.0
        );
        let e = edit_distance(
            &Graph::empty(8),
            &Graph::complete(8),
            SearchMode::Exact,
            Seed::default(),
        )
        .unwrap();
        assert!((e.distance_estimate - 7.0 / 8.0).abs() < 1e-15);
        assert!(cut_distance_graphs(
            &Graph::empty(3),
            &Graph::empty(4),
            SearchMode::Exact,
            opts,
            Seed::default()
        )
        .is_err());
        assert!(edit_distance(
            &Graph::empty(3),
            &Graph::empty(4),
            SearchMode::Heuristic,
            Seed::default()
        )
        .is_err());
        assert!(cut_distance_graphs(
            &Graph::empty(9),
            &Graph::empty(9),
            SearchMode::Exact,
            opts,
            Seed::default()
        )
        .is_err());
        let one = cut_distance_graphs(
            &Graph::empty(1),
            &Graph::empty(1),
            SearchMode::Exact,
            opts,
            Seed::default(),
        )
        .unwrap();
        assert_eq!(one.distance_estimate, 0.0);
    }

    #[test]
    fn exact_overlays_are_symmetric_and_ordered() {
        let opts = HeuristicOptions::default();
        for seed in 0..6 {
            let g = grow_uniform(6, Seed::new(seed, 0)).unwrap();
            let h = grow_uniform(6, Seed::new(seed, 1)).unwrap();
            let a = cut_distance_graphs(&g, &h, SearchMode::Exact, opts, Seed::default()).unwrap();
            let b = cut_distance_graphs(&h, &g, SearchMode::Exact, opts, Seed::default()).unwrap();
            assert!((a.distance_estimate - b.distance_estimate).abs() < 1e-12);
            let e = edit_distance(&g, &h, SearchMode::Exact, Seed::default()).unwrap();
            assert!(e.distance_estimate >= a.distance_estimate);
            let heur = edit_distance(&g, &h, SearchMode::Heuristic, Seed::new(seed, 0)).unwrap();
            assert!(heur.distance_estimate >= e.distance_estimate);
        }
    }

    #[test]
    fn edit_triangle_inequality() {
        for seed in 0..5 {
            let gs: Vec<Graph> = (0..3)
                .map(|s| grow_uniform(6, Seed::new(seed, s)).unwrap())
                .collect();
            let d = |a: usize, b: usize| {
                edit_distance(&gs[a], &gs[b], SearchMode::Exact, Seed::default())
                    .unwrap()
                    .distance_estimate
            };
            assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
        }
    }

    #[test]
    fn kernel_comparisons() {
        // 16 blocks line up with the 64 dyadic cells and the quadrature grid
        let g = grow_uniform(16, Seed::new(8, 0)).unwrap();
        let density = 2.0 * g.edge_count() as f64 / 256.0;
        let w = Kernel::from_step(StepGraphon::from_graph(&g));
        let r = cut_distance_graph_kernel(&g, &w, 64, 4, Seed::default()).unwrap();
        assert!(r.distance_estimate < 1e-12);
        assert!(r.lower_bound.unwrap() < 1e-12);
        let e = edit_distance_graph_kernel(&g, &w, 64).unwrap();
        assert!(e.distance_estimate < 1e-12);
        let zero = Kernel::constant(0.0, 1).unwrap();
        let e = edit_distance_graph_kernel(&g, &zero, 16).unwrap();
        assert!((e.distance_estimate - density).abs() < 1e-12);
        let r = cut_distance_graph_kernel(&g, &zero, 16, 4, Seed::default()).unwrap();
        assert!((r.distance_estimate - density).abs() < 1e-12);
        assert!((r.lower_bound.unwrap() - density).abs() < 1e-12);
        let p = Graph::petersen();
        let r = cut_distance_graph_kernel(&p, &zero, 10, 4, Seed::default()).unwrap();
        assert!((r.distance_estimate - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rect_examples() {
        let g = grow_uniform(8, Seed::new(2, 0)).unwrap();
        let w = Kernel::from_step(StepGraphon::from_graph(&g));
        let v = rect_integral(&g, &w, (0.0, 0.5), (0.25, 0.75)).unwrap();
        assert!(v.abs() < 1e-12);
        let p = Graph::petersen();
        let wp = Kernel::from_step(StepGraphon::from_graph(&p));
        let v = rect_integral(&p, &wp, (0.0, 0.5), (0.3, 0.9)).unwrap();
        assert!(v.abs() < 0.01);
        assert_eq!(rect_integral(&p, &wp, (0.2, 0.2), (0.0, 1.0)).unwrap(), 0.0);
        assert!(rect_integral(&p, &wp, (0.5, 0.2), (0.0, 1.0)).is_err());
        let zero = Kernel::constant(0.0, 1).unwrap();
        let full = rect_integral(&p, &zero, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert!((full - 0.3).abs() < 1e-12);
        let u = BuiltinGraphon::UniformLimit.kernel().unwrap();
        let k = rect_integral(&Graph::empty(4), &u, (0.0, 1.0), (0.0, 1.0)).unwrap();
        assert!((k + 1.0 / 3.0).abs() < 1e-5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn norm_axioms(k in 1usize..6, seed in any::<u64>(), lambda in -3.0f64..3.0) {
            let u = random_step(k, seed);
            let w = StepGraphon::new(random_step(k, seed ^ 0x55).values().to_vec(), u.measures().to_vec()).unwrap();
            let nu = cut_norm_exact(&u).unwrap().value;
            let scaled = cut_norm_exact(&u.map(|v| lambda * v)).unwrap().value;
            prop_assert!((scaled - lambda.abs() * nu).abs() < 1e-12);
            let sum = cut_norm_exact(&u.zip_with(&w, |a, b| a + b).unwrap()).unwrap().value;
            prop_assert!(sum <= nu + cut_norm_exact(&w).unwrap().value + 1e-12);
            prop_assert!(cut_norm_heuristic(&u, 3, Seed::new(seed, 0)).unwrap().value <= nu + 1e-12);
        }
    }
}
