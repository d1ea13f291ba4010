//! Small pattern multigraphs `F` for density computations.
//!
//! Text format: `k; i j [mult]; ...` with 0-based nodes, e.g. `3; 0 1; 1 2`
//! for the path on three nodes or `2; 0 1 2` for a double edge. Loops are
//! written `i i`. Named patterns are also accepted: `K<k>`, `P<k>` (path on
//! `k` nodes), `C<k>`, `S<k>` (star with `k` leaves) and `K2x2` (two
//! parallel edges).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest pattern accepted anywhere; counting is exponential in it.
pub const MAX_PATTERN_NODES: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternGraph {
    k: usize,
    /// Multiplicity per pair `(a, b)` with `a <= b`.
    edges: BTreeMap<(usize, usize), u32>,
    degrees: Vec<u64>,
    edge_count: u64,
    non_loop_count: u64,
}

impl PatternGraph {
    pub fn new<I>(k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u32)>,
    {
        if k == 0 {
            return Err(Error::param("pattern needs at least one node"));
        }
        if k > MAX_PATTERN_NODES {
            return Err(Error::size(format!(
                "pattern has {k} nodes; at most {MAX_PATTERN_NODES} are supported"
            )));
        }
        let mut map = BTreeMap::new();
        for (a, b, m) in edges {
            if a >= k || b >= k {
                return Err(Error::param(format!(
                    "pattern edge ({a},{b}) out of range for k={k}"
                )));
            }
            if m > 0 {
                *map.entry((a.min(b), a.max(b))).or_insert(0) += m;
            }
        }
        let mut degrees = vec![0u64; k];
        let (mut l, mut l_prime) = (0u64, 0u64);
        for (&(a, b), &m) in &map {
            let m = m as u64;
            l += m;
            if a == b {
                degrees[a] += 2 * m;
            } else {
                l_prime += m;
                degrees[a] += m;
                degrees[b] += m;
            }
        }
        Ok(PatternGraph {
            k,
            edges: map,
            degrees,
            edge_count: l,
            non_loop_count: l_prime,
        })
    }

    pub fn simple<I>(k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        PatternGraph::new(k, edges.into_iter().map(|(a, b)| (a, b, 1)))
    }

    pub fn complete(k: usize) -> Result<Self> {
        PatternGraph::simple(k, (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))))
    }

    pub fn path(k: usize) -> Result<Self> {
        PatternGraph::simple(k, (1..k).map(|a| (a - 1, a)))
    }

    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::param("cycles need at least 3 nodes"));
        }
        PatternGraph::simple(k, (0..k).map(|a| (a, (a + 1) % k)))
    }

    pub fn star(leaves: usize) -> Result<Self> {
        PatternGraph::simple(leaves + 1, (1..=leaves).map(|a| (0, a)))
    }

    /// `K_2^{(2)}`: two nodes joined by two parallel edges.
    pub fn double_edge() -> Self {
        PatternGraph::new(2, [(0, 1, 2)]).expect("static pattern")
    }

    pub fn node_count(&self) -> usize {
        self.k
    }

    /// `(a, b, multiplicity)` with `a <= b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges.iter().map(|(&(a, b), &m)| (a, b, m))
    }

    /// Degree sequence with loops counted twice.
    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// Total number of edges `l`, multiplicities and loops included.
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// Number of non-loop edges `l'`.
    pub fn non_loop_edge_count(&self) -> u64 {
        self.non_loop_count
    }

    pub fn has_loops(&self) -> bool {
        self.edges.keys().any(|&(a, b)| a == b)
    }

    /// No loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|(&(a, b), &m)| a != b && m == 1)
    }

    /// Neighbour lists ignoring multiplicity and loops.
    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.k];
        for &(a, b) in self.edges.keys() {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }

    /// Connected components, each as a node list in breadth-first order.
    pub(crate) fn components_bfs(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.k];
        let mut comps = Vec::new();
        for start in 0..self.k {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut order = vec![start];
            let mut head = 0;
            while head < order.len() {
                let v = order[head];
                head += 1;
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        order.push(w);
                    }
                }
            }
            comps.push(order);
        }
        comps
    }

    /// All nodes in an order where every node after the first of its
    /// component has an earlier neighbour.
    pub(crate) fn connected_order(&self) -> Vec<usize> {
        self.components_bfs().into_iter().flatten().collect()
    }
}

impl fmt::Display for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.k)?;
        for (a, b, m) in self.edges() {
            if m == 1 {
                write!(f, "; {a} {b}")?;
            } else {
                write!(f, "; {a} {b} {m}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for PatternGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(p) = named(s) {
            return p;
        }
        let mut parts = s.split(';');
        let head = parts.next().unwrap_or("").trim();
        let k: usize = head
            .parse()
            .map_err(|_| Error::parse(1, format!("unknown pattern {s:?}")))?;
        let mut edges = Vec::new();
        for part in parts {
            let fields: Vec<&str> = part.split_whitespace().collect();
            let num = |t: &str| -> Result<usize> {
                t.parse()
                    .map_err(|_| Error::parse(1, format!("bad pattern token {t:?}")))
            };
            match fields.as_slice() {
                [] => continue,
                [a, b] => edges.push((num(a)?, num(b)?, 1)),
                [a, b, m] => edges.push((num(a)?, num(b)?, num(m)? as u32)),
                _ => return Err(Error::parse(1, format!("bad pattern edge {part:?}"))),
            }
        }
        PatternGraph::new(k, edges)
    }
}

fn named(s: &str) -> Option<Result<PatternGraph>> {
    if s == "K2x2" || s == "K2^2" {
        return Some(Ok(PatternGraph::double_edge()));
    }
    let (tag, rest) = s.split_at(s.char_indices().nth(1)?.0);
    let k: usize = rest.parse().ok()?;
    Some(match tag {
        "K" => PatternGraph::complete(k),
        "P" => PatternGraph::path(k),
        "C" => PatternGraph::cycle(k),
        "S" => PatternGraph::star(k),
        _ => return None,
    })
}
