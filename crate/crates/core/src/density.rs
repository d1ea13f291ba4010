//! Homomorphism and injective densities.
//!
//! Exact counting on graphs and multigraphs, exact integration against step
//! graphons, Monte Carlo and midpoint quadrature against general kernels,
//! and the closed forms for preferential attachment.

use rand::distributions::Open01;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Multigraph};
use crate::graphon::{Kernel, StepGraphon};
use crate::growth::LabeledSample;
use crate::math::{falling, falling_f64, ln_factorial, ln_rising};
use crate::pattern::PatternGraph;
use crate::rng::Seed;
use crate::stats::Moments;

/// Largest pattern for exact step-graphon integration.
pub const MAX_STEP_PATTERN_NODES: usize = 8;
/// Largest block count for exact step-graphon integration.
pub const MAX_STEP_BLOCKS: usize = 64;
/// Cap on the number of block (or grid-point) assignments enumerated.
pub const ASSIGNMENT_BUDGET: f64 = 1e9;
/// Cap on `n * maxdeg^(c-1)` per pattern component `c` for the
/// neighbor-driven searches of [`hom_count`] and [`inj_count`].
pub const SEARCH_BUDGET: f64 = 1e11;
/// Minimum Monte Carlo sample count.
pub const MIN_MC_SAMPLES: u64 = 1000;
/// Samples per Monte Carlo work chunk. Chunk `c` always draws from
/// `seed.substream(c)`, so estimates do not depend on the thread count.
pub const MC_CHUNK: u64 = 1 << 14;

fn check_search(f: &PatternGraph, n: usize, max_degree: usize) -> Result<()> {
    for comp in f.components_bfs() {
        let worst = n as f64 * (max_degree as f64).powi(comp.len() as i32 - 1);
        if worst > SEARCH_BUDGET {
            return Err(Error::size(format!(
                "searching a {}-node pattern component in a graph with {n} nodes and maximum degree {max_degree} exceeds {SEARCH_BUDGET:e} steps",
                comp.len()
            )));
        }
    }
    Ok(())
}

fn require_simple(f: &PatternGraph) -> Result<()> {
    if f.is_simple() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "pattern `{f}` must be simple (no loops or parallel edges)"
        )))
    }
}

/// For each position in `order`, the earlier positions it is adjacent to
/// (with multiplicity) and its loop count.
struct Plan {
    order: Vec<usize>,
    back: Vec<Vec<(usize, u32)>>,
    loops: Vec<u32>,
}

impl Plan {
    fn new(f: &PatternGraph, order: Vec<usize>) -> Self {
        let mut pos = vec![usize::MAX; f.node_count()];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let mut back = vec![Vec::new(); order.len()];
        let mut loops = vec![0; order.len()];
        for (a, b, m) in f.edges() {
            if pos[a] == usize::MAX {
                continue;
            }
            if a == b {
                loops[pos[a]] += m;
            } else {
                let (pa, pb) = (pos[a], pos[b]);
                let (early, late) = (pa.min(pb), pa.max(pb));
                back[late].push((early, m));
            }
        }
        Plan { order, back, loops }
    }
}

/// `hom(F, G)` for simple `F`, by backtracking along a breadth-first order
/// of each component of `F`; components multiply.
pub fn hom_count(f: &PatternGraph, g: &Graph) -> Result<u128> {
    require_simple(f)?;
    let n = g.node_count();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).collect()).collect();
    check_search(f, n, adj.iter().map(Vec::len).max().unwrap_or(0))?;
    let mut total: u128 = 1;
    for comp in f.components_bfs() {
        let plan = Plan::new(f, comp);
        let count = if plan.order.len() == 1 {
            n as u128
        } else {
            let mut assign = vec![0usize; plan.order.len()];
            let mut c = 0u128;
            for v in 0..n {
                assign[0] = v;
                hom_rec(&plan, g, &adj, &mut assign, 1, &mut c);
            }
            c
        };
        total = total
            .checked_mul(count)
            .ok_or_else(|| Error::size("homomorphism count overflows u128"))?;
        if total == 0 {
            break;
        }
    }
    Ok(total)
}

fn hom_rec(
    plan: &Plan,
    g: &Graph,
    adj: &[Vec<usize>],
    assign: &mut [usize],
    d: usize,
    count: &mut u128,
) {
    if d == plan.order.len() {
        *count += 1;
        return;
    }
    // breadth-first order: back[d] is nonempty and its first entry is the parent
    let (parent, _) = plan.back[d][0];
    for &cand in &adj[assign[parent]] {
        if plan.back[d][1..]
            .iter()
            .all(|&(e, _)| g.has_edge(assign[e], cand))
        {
            assign[d] = cand;
            hom_rec(plan, g, adj, assign, d + 1, count);
        }
    }
}

/// `t(F, G) = hom(F, G) / n^k`.
pub fn t_density(f: &PatternGraph, g: &Graph) -> Result<f64> {
    let hom = hom_count(f, g)?;
    Ok(hom as f64 / (g.node_count() as f64).powi(f.node_count() as i32))
}

/// `inj(F, G)`: pairs of injective node and edge maps preserving incidence.
/// A pattern pair of multiplicity `r` mapped onto a target pair of
/// multiplicity `mu` contributes the falling factorial `(mu)_r`.
pub fn inj_count(f: &PatternGraph, g: &Multigraph) -> Result<u128> {
    let n = g.node_count();
    if f.node_count() > n {
        return Ok(0);
    }
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && g.multiplicity(u, v) > 0)
                .collect()
        })
        .collect();
    check_search(f, n, adj.iter().map(Vec::len).max().unwrap_or(0))?;
    let plan = Plan::new(f, f.connected_order());
    let mut used = vec![false; n];
    let mut assign = vec![0usize; plan.order.len()];
    let mut total = 0u128;
    inj_rec(&plan, g, &adj, &mut used, &mut assign, 0, 1, &mut total);
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn inj_rec(
    plan: &Plan,
    g: &Multigraph,
    adj: &[Vec<usize>],
    used: &mut [bool],
    assign: &mut [usize],
    d: usize,
    weight: u128,
    total: &mut u128,
) {
    if d == plan.order.len() {
        *total += weight;
        return;
    }
    let mut visit = |cand: usize, used: &mut [bool], assign: &mut [usize]| {
        if used[cand] {
            return;
        }
        let mut w = weight * falling(g.loops(cand) as u64, plan.loops[d] as u64);
        for &(e, r) in &plan.back[d] {
            if w == 0 {
                break;
            }
            w *= falling(g.multiplicity(assign[e], cand) as u64, r as u64);
        }
        if w == 0 {
            return;
        }
        used[cand] = true;
        assign[d] = cand;
        inj_rec(plan, g, adj, used, assign, d + 1, w, total);
        used[cand] = false;
    };
    match plan.back[d].first() {
        Some(&(parent, _)) => {
            for &cand in &adj[assign[parent]] {
                visit(cand, used, assign);
            }
        }
        None => {
            for cand in 0..g.node_count() {
                visit(cand, used, assign);
            }
        }
    }
}

/// `t_inj(F, G) = inj(F, G) / (n)_k`.
pub fn t_inj(f: &PatternGraph, g: &Multigraph) -> Result<f64> {
    let (n, k) = (g.node_count() as u64, f.node_count() as u64);
    if n < k {
        return Err(Error::size(format!(
            "target has {n} nodes, pattern needs {k}"
        )));
    }
    Ok(inj_count(f, g)? as f64 / falling_f64(n, k))
}

/// Homomorphism-style density of a pattern in a multigraph:
/// `sum over maps phi of prod over pattern edges ab of mu(phi a, phi b)`,
/// divided by `n^k`, where `mu(u, u)` is the loop count at `u`.
pub fn hom_density_multigraph(f: &PatternGraph, g: &Multigraph) -> Result<f64> {
    let n = g.node_count();
    let k = f.node_count();
    if (n as f64).powi(k as i32) > ASSIGNMENT_BUDGET {
        return Err(Error::size("too many maps to enumerate"));
    }
    let plan = Plan::new(f, f.connected_order());
    let mut assign = vec![0usize; k];
    let mut total = 0u128;
    fn rec(plan: &Plan, g: &Multigraph, assign: &mut [usize], d: usize, w: u128, total: &mut u128) {
        if d == plan.order.len() {
            *total += w;
            return;
        }
        for cand in 0..g.node_count() {
            let mut x = w * (g.loops(cand) as u128).pow(plan.loops[d]);
            for &(e, r) in &plan.back[d] {
                x *= (g.multiplicity(assign[e], cand) as u128).pow(r);
            }
            if x > 0 {
                assign[d] = cand;
                rec(plan, g, assign, d + 1, x, total);
            }
        }
    }
    rec(&plan, g, &mut assign, 0, 1, &mut total);
    Ok(total as f64 / (n as f64).powi(k as i32))
}

/// `E t_inj(F, PAG(n, m)) = 2^{l'} r_1! ... r_k! (m)_l / (n (n+1) ... (n+2l-1))`.
pub fn expected_tinj_pag(f: &PatternGraph, n: usize, m: u64) -> Result<f64> {
    if n < f.node_count() {
        return Err(Error::domain(format!(
            "t_inj needs n >= {} pattern nodes, got n={n}",
            f.node_count()
        )));
    }
    let l = f.edge_count();
    if m < l {
        return Ok(0.0);
    }
    let ln_deg: f64 = f.degrees().iter().map(|&r| ln_factorial(r)).sum();
    let ln_falling_m: f64 = (0..l).map(|t| ((m - t) as f64).ln()).sum();
    let ln = f.non_loop_edge_count() as f64 * std::f64::consts::LN_2 + ln_deg + ln_falling_m
        - ln_rising(n as u64, 2 * l);
    Ok(ln.exp())
}

/// `t(F, L_c) = c^l r_1! ... r_k!` for loopless `F`.
pub fn t_log_closed(f: &PatternGraph, c: f64) -> Result<f64> {
    if f.has_loops() {
        return Err(Error::domain(
            "closed form holds only for loopless patterns",
        ));
    }
    if !(c > 0.0) {
        return Err(Error::param(format!("c must be positive, got {c}")));
    }
    let ln_deg: f64 = f.degrees().iter().map(|&r| ln_factorial(r)).sum();
    Ok(c.powi(f.edge_count() as i32) * ln_deg.exp())
}

/// Sum over assignments of pattern nodes to `blocks` blocks of
/// `prod weight(block) * prod value(a, b)^mult`, one component at a time.
fn weighted_assignment_sum(
    f: &PatternGraph,
    blocks: usize,
    weight: &(dyn Fn(usize) -> f64 + Sync),
    value: &(dyn Fn(usize, usize) -> f64 + Sync),
) -> f64 {
    let mut product = 1.0;
    for comp in f.components_bfs() {
        let plan = Plan::new(f, comp);
        // the first level is split across threads; each branch is summed in a
        // fixed order and the branches are reduced in index order
        let branch: Vec<f64> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut assign = vec![0usize; plan.order.len()];
                let w = step_factor(&plan, 0, b, &assign, weight, value);
                if w == 0.0 {
                    return 0.0;
                }
                assign[0] = b;
                step_rec(&plan, blocks, &mut assign, 1, w, weight, value)
            })
            .collect();
        product *= branch.iter().sum::<f64>();
        if product == 0.0 {
            break;
        }
    }
    product
}

#[inline]
fn step_factor(
    plan: &Plan,
    d: usize,
    b: usize,
    assign: &[usize],
    weight: &(dyn Fn(usize) -> f64 + Sync),
    value: &(dyn Fn(usize, usize) -> f64 + Sync),
) -> f64 {
    let mut w = weight(b);
    if plan.loops[d] > 0 {
        w *= value(b, b).powi(plan.loops[d] as i32);
    }
    for &(e, r) in &plan.back[d] {
        if w == 0.0 {
            break;
        }
        let v = value(assign[e], b);
        w *= if r == 1 { v } else { v.powi(r as i32) };
    }
    w
}

fn step_rec(
    plan: &Plan,
    blocks: usize,
    assign: &mut [usize],
    d: usize,
    acc: f64,
    weight: &(dyn Fn(usize) -> f64 + Sync),
    value: &(dyn Fn(usize, usize) -> f64 + Sync),
) -> f64 {
    if d == plan.order.len() {
        return acc;
    }
    let mut sum = 0.0;
    for b in 0..blocks {
        let w = step_factor(plan, d, b, assign, weight, value);
        if w != 0.0 {
            assign[d] = b;
            sum += step_rec(plan, blocks, assign, d + 1, acc * w, weight, value);
        }
    }
    sum
}

fn check_budget(f: &PatternGraph, points: usize) -> Result<()> {
    let worst = f
        .components_bfs()
        .iter()
        .map(|c| (points as f64).powi(c.len() as i32))
        .fold(0.0, f64::max);
    if worst > ASSIGNMENT_BUDGET {
        return Err(Error::size(format!(
            "{points}^{} assignments exceed the budget of {ASSIGNMENT_BUDGET:e}",
            f.node_count()
        )));
    }
    Ok(())
}

/// `t(F, W)` for a step graphon, exactly: the sum over block assignments of
/// the product of block measures and block values.
pub fn t_step_exact(f: &PatternGraph, s: &StepGraphon) -> Result<f64> {
    require_simple(f)?;
    if f.node_count() > MAX_STEP_PATTERN_NODES {
        return Err(Error::size(format!(
            "pattern has {} nodes; exact step integration allows {MAX_STEP_PATTERN_NODES}",
            f.node_count()
        )));
    }
    if s.block_count() > MAX_STEP_BLOCKS {
        return Err(Error::size(format!(
            "step graphon has {} blocks; exact integration allows {MAX_STEP_BLOCKS}",
            s.block_count()
        )));
    }
    check_budget(f, s.block_count())?;
    let measures = s.measures();
    Ok(weighted_assignment_sum(
        f,
        s.block_count(),
        &|b| measures[b],
        &|a, b| s.value(a, b),
    ))
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

fn integrand(f: &PatternGraph, w: &Kernel, x: &[f64]) -> f64 {
    let dim = w.dim();
    let pt = |a: usize| &x[a * dim..(a + 1) * dim];
    let mut prod = 1.0;
    for (a, b, m) in f.edges() {
        let v = w.eval(pt(a), pt(b));
        prod *= if m == 1 { v } else { v.powi(m as i32) };
        if prod == 0.0 {
            break;
        }
    }
    prod
}

/// Plain Monte Carlo over i.i.d. uniform points of the latent cube.
///
/// Patterns may carry multiplicities and loops; each edge contributes its
/// kernel value to the power of its multiplicity.
pub fn t_kernel_mc(f: &PatternGraph, w: &Kernel, samples: u64, seed: Seed) -> Result<McEstimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::param(format!(
            "Monte Carlo needs at least {MIN_MC_SAMPLES} samples, got {samples}"
        )));
    }
    let coords = f.node_count() * w.dim();
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut rng = seed.substream(c).rng();
            let mut x = vec![0.0; coords];
            let mut m = Moments::new();
            for _ in 0..len {
                for xi in x.iter_mut() {
                    *xi = rng.sample(Open01);
                }
                m.push(integrand(f, w, &x));
            }
            m
        })
        .collect();
    let mut total = Moments::new();
    for p in &parts {
        total.merge(p);
    }
    Ok(McEstimate {
        estimate: total.mean,
        stderr: total.std_error(),
        samples,
    })
}

/// Midpoint-rule tensor quadrature with `grid` points per latent axis.
///
/// Equivalent to integrating against the step graphon whose cells carry the
/// kernel's value at their centres, so it is exact for step kernels whose
/// breakpoints lie on the grid.
pub fn t_kernel_quad(f: &PatternGraph, w: &Kernel, grid: usize) -> Result<f64> {
    if grid == 0 {
        return Err(Error::param("quadrature grid must be positive"));
    }
    let points = grid.pow(w.dim() as u32);
    let total = (grid as f64).powi((f.node_count() * w.dim()) as i32);
    if total > ASSIGNMENT_BUDGET {
        return Err(Error::size(format!(
            "grid^(k*dim) = {total:e} exceeds the quadrature budget {ASSIGNMENT_BUDGET:e}"
        )));
    }
    let dim = w.dim();
    let centre = |i: usize| (i as f64 + 0.5) / grid as f64;
    let coords: Vec<f64> = (0..points)
        .flat_map(|p| {
            let (a, b) = (p / grid, p % grid);
            if dim == 1 {
                vec![centre(p)]
            } else {
                vec![centre(a), centre(b)]
            }
        })
        .collect();
    let pt = |p: usize| &coords[p * dim..(p + 1) * dim];
    let weight = 1.0 / points as f64;
    const TABLE_LIMIT: usize = 4096;
    if points <= TABLE_LIMIT {
        let mut table = vec![0.0; points * points];
        table
            .par_chunks_mut(points)
            .enumerate()
            .for_each(|(a, row)| {
                for (b, cell) in row.iter_mut().enumerate() {
                    *cell = w.eval(pt(a), pt(b));
                }
            });
        Ok(weighted_assignment_sum(f, points, &|_| weight, &|a, b| {
            table[a * points + b]
        }))
    } else {
        Ok(weighted_assignment_sum(f, points, &|_| weight, &|a, b| {
            w.eval(pt(a), pt(b))
        }))
    }
}

/// Axis-aligned box `[lo, hi)` in the latent cube (closed at 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Cell {
    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&x, (&l, &h))| x >= l && (x < h || (h == 1.0 && x == 1.0)))
    }

    /// The `m^dim` equal boxes of side `1/m`.
    pub fn grid(m: usize, dim: usize) -> Vec<Cell> {
        let total = m.pow(dim as u32);
        (0..total)
            .map(|mut idx| {
                let mut lo = vec![0.0; dim];
                let mut hi = vec![0.0; dim];
                for d in (0..dim).rev() {
                    let a = idx % m;
                    idx /= m;
                    lo[d] = a as f64 / m as f64;
                    hi[d] = (a + 1) as f64 / m as f64;
                }
                Cell { lo, hi }
            })
            .collect()
    }

    fn overlaps(&self, other: &Cell) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((&l1, &h1), (&l2, &h2))| l1.max(l2) < h1.min(h2))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellDistributionRow {
    pub n: usize,
    pub cell: usize,
    pub fraction: f64,
    pub volume: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellDistributionReport {
    pub rows: Vec<WellDistributionRow>,
}

impl WellDistributionReport {
    /// Largest `|fraction - volume|` over the cells, per sample, in input order.
    pub fn max_deviations(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        let mut last: Option<usize> = None;
        for row in &self.rows {
            if last == Some(row.cell) || row.cell == 0 {
                out.push((row.n, row.deviation.abs()));
            } else if let Some(entry) = out.last_mut() {
                entry.1 = entry.1.max(row.deviation.abs());
            }
            last = Some(row.cell);
        }
        out
    }
}

/// Empirical share of each sample inside each cell versus the cell volume.
pub fn well_distribution_report(
    samples: &[LabeledSample],
    cells: &[Cell],
) -> Result<WellDistributionReport> {
    let dim = cells
        .first()
        .map(|c| c.lo.len())
        .ok_or_else(|| Error::param("no cells"))?;
    for c in cells {
        if c.lo.len() != dim || c.hi.len() != dim {
            return Err(Error::param("cells have mixed dimensions"));
        }
        if c.lo
            .iter()
            .zip(&c.hi)
            .any(|(&l, &h)| !(0.0 <= l && l < h && h <= 1.0))
        {
            return Err(Error::param(format!(
                "cell {c:?} is not a box inside the unit cube"
            )));
        }
    }
    let total: f64 = cells.iter().map(Cell::volume).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::param(format!("cell volumes sum to {total}, not 1")));
    }
    for (i, a) in cells.iter().enumerate() {
        if cells[i + 1..].iter().any(|b| a.overlaps(b)) {
            return Err(Error::param(format!("cell {i} overlaps another cell")));
        }
    }
    let mut rows = Vec::with_capacity(samples.len() * cells.len());
    for s in samples {
        if s.dim() != dim {
            return Err(Error::param("sample and cell dimensions differ"));
        }
        let n = s.len();
        let mut counts = vec![0usize; cells.len()];
        for p in s.points() {
            if let Some(c) = cells.iter().position(|c| c.contains(p)) {
                counts[c] += 1;
            }
        }
        for (cell, (c, count)) in cells.iter().zip(counts).enumerate() {
            let fraction = if n == 0 { 0.0 } else { count as f64 / n as f64 };
            rows.push(WellDistributionRow {
                n,
                cell,
                fraction,
                volume: c.volume(),
                deviation: fraction - c.volume(),
            });
        }
    }
    Ok(WellDistributionReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::{flatten_2d, BuiltinGraphon};
    use crate::growth::{grow_pag, grow_prefix};

    fn k(n: usize) -> PatternGraph {
        PatternGraph::complete(n).unwrap()
    }

    #[test]
    fn search_budget_is_a_size_error() {
        let g = Graph::complete(70);
        assert!(matches!(hom_count(&k(9), &g), Err(Error::Size(_))));
        assert!(matches!(
            inj_count(&k(9), &Multigraph::from_graph(&g)),
            Err(Error::Size(_))
        ));
        // sparse targets stay searchable
        assert_eq!(hom_count(&k(9), &Graph::empty(70)).unwrap(), 0);
    }

    /// Brute force over all n^k maps.
    fn hom_brute(f: &PatternGraph, g: &Graph) -> u128 {
        let (n, kk) = (g.node_count(), f.node_count());
        let mut count = 0;
        let mut map = vec![0usize; kk];
        loop {
            if f.edges().all(|(a, b, _)| g.has_edge(map[a], map[b])) {
                count += 1;
            }
            let mut d = 0;
            loop {
                if d == kk {
                    return count;
                }
                map[d] += 1;
                if map[d] < n {
                    break;
                }
                map[d] = 0;
                d += 1;
            }
        }
    }

    #[test]
    fn hom_examples() {
        assert_eq!(hom_count(&k(2), &Graph::complete(3)).unwrap(), 6);
        assert_eq!(hom_count(&k(3), &Graph::cycle(5)).unwrap(), 0);
        let p = Graph::petersen();
        assert_eq!(hom_count(&k(2), &p).unwrap(), 30);
        assert!(hom_count(&PatternGraph::double_edge(), &p).is_err());
        let two_edges: PatternGraph = "4; 0 1; 2 3".parse().unwrap();
        assert_eq!(hom_count(&two_edges, &p).unwrap(), 900);
        let isolated: PatternGraph = "3; 0 1".parse().unwrap();
        assert_eq!(hom_count(&isolated, &p).unwrap(), 300);
    }

    #[test]
    fn hom_matches_brute_force() {
        let patterns: Vec<PatternGraph> = ["K3", "P4", "C4", "S3", "3; 0 1", "K4"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        for r in 0..15 {
            let g = crate::growth::grow_uniform(7, Seed::new(r, 0)).unwrap();
            for f in &patterns {
                assert_eq!(hom_count(f, &g).unwrap(), hom_brute(f, &g), "{f}");
            }
        }
    }

    #[test]
    fn t_complete_graph_k2() {
        for n in 1..8 {
            let t = t_density(&k(2), &Graph::complete(n)).unwrap();
            assert!((t - (n - 1) as f64 / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn inj_examples() {
        let single = Multigraph::from_graph(&Graph::complete(2));
        assert_eq!(inj_count(&k(2), &single).unwrap(), 2);
        let mut double = Multigraph::new(2);
        double.add_edges(0, 1, 2);
        assert_eq!(inj_count(&PatternGraph::double_edge(), &double).unwrap(), 4);
        assert_eq!(inj_count(&k(3), &single).unwrap(), 0);
        assert!(t_inj(&k(3), &single).is_err());
        for n in 2..7 {
            let kn = Multigraph::from_graph(&Graph::complete(n));
            assert!((t_inj(&k(2), &kn).unwrap() - 1.0).abs() < 1e-15);
        }
        let tri = Multigraph::from_graph(&Graph::complete(3));
        assert_eq!(t_inj(&k(3), &tri).unwrap(), 1.0);
        // loops: pattern loop onto a node with 3 loops gives (3)_1
        let mut l = Multigraph::new(1);
        l.add_edges(0, 0, 3);
        assert_eq!(inj_count(&"1; 0 0".parse().unwrap(), &l).unwrap(), 3);
        assert_eq!(inj_count(&"1; 0 0 2".parse().unwrap(), &l).unwrap(), 6);
    }

    #[test]
    fn expected_tinj_examples() {
        // K2, n=4, m=3: 2 * 1 * 1 * 3 / (4 * 5)
        let v = expected_tinj_pag(&k(2), 4, 3).unwrap();
        assert!((v - 0.3).abs() < 1e-15);
        assert!(expected_tinj_pag(&k(3), 2, 3).is_err());
        assert_eq!(expected_tinj_pag(&k(3), 5, 2).unwrap(), 0.0);
        // m = c n^2 / 2 with large n approaches c^l prod r_i!
        let c = 0.5;
        let n = 20_000usize;
        let m = (c * (n * n) as f64 / 2.0) as u64;
        let v = expected_tinj_pag(&k(3), n, m).unwrap();
        assert!((v - t_log_closed(&k(3), c).unwrap()).abs() < 1e-3);
        // with a loop the limit picks up 2^{l'-l}
        let f: PatternGraph = "2; 0 0; 0 1".parse().unwrap();
        let v = expected_tinj_pag(&f, n, m).unwrap();
        let want = 0.5 * c * c * 6.0;
        assert!((v - want).abs() < 1e-3, "{v} vs {want}");
    }

    #[test]
    fn log_closed_examples() {
        assert_eq!(t_log_closed(&k(2), 1.0).unwrap(), 1.0);
        assert!((t_log_closed(&k(3), 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((t_log_closed(&PatternGraph::path(3).unwrap(), 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(t_log_closed(&"1; 0 0".parse().unwrap(), 1.0).is_err());
        assert!(t_log_closed(&k(2), 0.0).is_err());
    }

    #[test]
    fn sum_rule_over_exact_law() {
        let patterns = [
            k(2),
            PatternGraph::double_edge(),
            PatternGraph::path(2).unwrap(),
        ];
        for m in 0..=2usize {
            let law = crate::growth::pag_exact_law(2, m).unwrap();
            for f in &patterns {
                let mut mean = 0.0;
                for (g, _) in law.values() {
                    let p = crate::growth::pag_multigraph_probability(g, 2, m as u64).unwrap();
                    mean += p * t_inj(f, g).unwrap();
                }
                let want = expected_tinj_pag(f, 2, m as u64).unwrap();
                assert!((mean - want).abs() < 1e-14, "{f} m={m}: {mean} vs {want}");
            }
        }
    }

    #[test]
    fn step_exact_examples() {
        let c = StepGraphon::uniform(3, vec![0.4; 9]).unwrap();
        for f in [k(2), k(3), PatternGraph::cycle(4).unwrap()] {
            let want = 0.4f64.powi(f.edge_count() as i32);
            assert!((t_step_exact(&f, &c).unwrap() - want).abs() < 1e-15);
        }
        let bip = StepGraphon::uniform(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(t_step_exact(&k(3), &bip).unwrap(), 0.0);
        assert!((t_step_exact(&k(2), &bip).unwrap() - 0.5).abs() < 1e-15);
        let g = Graph::petersen();
        let s = StepGraphon::from_graph(&g);
        assert!((t_step_exact(&k(2), &s).unwrap() - t_density(&k(2), &g).unwrap()).abs() < 1e-15);
        assert!(t_step_exact(&k(9), &s).is_err());
        let big = StepGraphon::from_graph(&Graph::empty(65));
        assert!(matches!(t_step_exact(&k(2), &big), Err(Error::Size(_))));
        assert!(t_step_exact(&PatternGraph::double_edge(), &s).is_err());
    }

    #[test]
    fn step_exact_with_unequal_measures() {
        // two blocks of measure 1/4 and 3/4, value 1 across, 0 within
        let s = StepGraphon::new(vec![0.0, 1.0, 1.0, 0.0], vec![0.25, 0.75]).unwrap();
        let t = t_step_exact(&k(2), &s).unwrap();
        assert!((t - 2.0 * 0.25 * 0.75).abs() < 1e-15);
        let p3 = t_step_exact(&PatternGraph::path(3).unwrap(), &s).unwrap();
        // middle node in block a, ends in the other block
        assert!((p3 - (0.25 * 0.75 * 0.75 + 0.75 * 0.25 * 0.25)).abs() < 1e-15);
    }

    #[test]
    fn mc_examples() {
        let one = Kernel::constant(1.0, 1).unwrap();
        let est = t_kernel_mc(&k(3), &one, 5000, Seed::new(1, 0)).unwrap();
        assert_eq!(est.estimate, 1.0);
        assert_eq!(est.stderr, 0.0);
        assert!(t_kernel_mc(&k(3), &one, 999, Seed::default()).is_err());
        let u = BuiltinGraphon::UniformLimit.kernel().unwrap();
        let est = t_kernel_mc(&k(2), &u, 200_000, Seed::new(2, 0)).unwrap();
        assert!((est.estimate - 1.0 / 3.0).abs() < 4.0 * est.stderr);
        let again = t_kernel_mc(&k(2), &u, 200_000, Seed::new(2, 0)).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn quad_oracle_for_uniform_limit() {
        // midpoint sum of 1 - max over a grid vs the exact integral 1/3
        let u = BuiltinGraphon::UniformLimit.kernel().unwrap();
        let q = t_kernel_quad(&k(2), &u, 256).unwrap();
        assert!((q - 1.0 / 3.0).abs() < 1e-5);
        let r = BuiltinGraphon::RankedLimit.kernel().unwrap();
        let q = t_kernel_quad(&k(2), &r, 512).unwrap();
        assert!((q - 0.75).abs() < 1e-4);
        assert!(matches!(
            t_kernel_quad(&k(4), &u, 1000),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn quad_is_exact_on_aligned_step_kernels() {
        let g = Graph::petersen();
        let s = StepGraphon::from_graph(&g);
        let w = Kernel::from_step(s.clone());
        for f in [
            k(2),
            k(3),
            PatternGraph::path(3).unwrap(),
            PatternGraph::cycle(4).unwrap(),
        ] {
            let q = t_kernel_quad(&f, &w, 20).unwrap();
            let e = t_step_exact(&f, &s).unwrap();
            assert!((q - e).abs() < 1e-14, "{f}: {q} vs {e}");
        }
    }

    #[test]
    fn flatten_preserves_prefix_limit_density() {
        let w2 = BuiltinGraphon::PrefixLimit.kernel().unwrap();
        let w1 = flatten_2d(&w2, 20).unwrap();
        let a = t_kernel_mc(&k(2), &w2, 1_000_000, Seed::new(5, 0)).unwrap();
        let b = t_kernel_mc(&k(2), &w1, 1_000_000, Seed::new(6, 0)).unwrap();
        assert!((a.estimate - b.estimate).abs() < 1e-3 + 4.0 * a.stderr.hypot(b.stderr));
        // both estimate t(K2, W_pfx) = 1/2
        assert!((a.estimate - 0.5).abs() < 4.0 * a.stderr);
    }

    #[test]
    fn multigraph_hom_density() {
        let mut g = Multigraph::new(2);
        g.add_edges(0, 1, 2);
        g.add_edge(1, 1);
        // maps of K2x2: (0,1),(1,0) give 2^2 each; (1,1) gives 1^2
        let d = hom_density_multigraph(&PatternGraph::double_edge(), &g).unwrap();
        assert!((d - 9.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn stirling_relation_on_pag_sample() {
        let g = grow_pag(60, 900, Seed::new(4, 0)).unwrap();
        let hom = hom_density_multigraph(&PatternGraph::double_edge(), &g).unwrap();
        let inj = t_inj(&PatternGraph::double_edge(), &g).unwrap() + t_inj(&k(2), &g).unwrap();
        assert!(((inj - hom) / hom).abs() < 0.1);
    }

    #[test]
    fn well_distribution_examples() {
        let cells = Cell::grid(8, 1);
        let report = well_distribution_report(
            &[
                LabeledSample::grid(64),
                LabeledSample::grid(100),
                LabeledSample::grid(1000),
            ],
            &cells,
        )
        .unwrap();
        let devs = report.max_deviations();
        assert_eq!(devs.len(), 3);
        assert_eq!(devs[0].1, 0.0);
        for (n, d) in devs {
            assert!(d <= 1.0 / n as f64 + 1e-12);
        }
        let whole = vec![Cell {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        }];
        let (_, s) = grow_prefix(50, Seed::new(1, 0)).unwrap();
        let r = well_distribution_report(&[s], &whole).unwrap();
        assert_eq!(r.rows[0].fraction, 1.0);
    }

    #[test]
    fn well_distribution_rejects_non_partitions() {
        let s = [LabeledSample::grid(10)];
        let gap = vec![Cell {
            lo: vec![0.0],
            hi: vec![0.5],
        }];
        assert!(well_distribution_report(&s, &gap).is_err());
        let overlap = vec![
            Cell {
                lo: vec![0.0],
                hi: vec![0.6],
            },
            Cell {
                lo: vec![0.4],
                hi: vec![1.0],
            },
            Cell {
                lo: vec![0.6],
                hi: vec![0.8],
            },
        ];
        assert!(well_distribution_report(&s, &overlap).is_err());
        assert!(well_distribution_report(&s, &[]).is_err());
        assert!(well_distribution_report(&s, &Cell::grid(2, 2)).is_err());
    }

    #[test]
    fn prefix_labels_spread_out() {
        let cells = Cell::grid(4, 2);
        let samples: Vec<LabeledSample> = [100usize, 1000, 10_000]
            .iter()
            .map(|&n| grow_prefix(n, Seed::new(3, n as u64)).unwrap().1)
            .collect();
        let devs = well_distribution_report(&samples, &cells)
            .unwrap()
            .max_deviations();
        assert!(devs[2].1 < devs[0].1);
        assert!(devs[2].1 < 0.02);
    }
}
