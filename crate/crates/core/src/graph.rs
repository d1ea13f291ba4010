//! Simple graphs and multigraphs on birth-ordered nodes `0..n`, plus the
//! text edge-list format shared with the command line.
//!
//! Edge-list format: a header line `n m` (simple) or `n m multi`
//! (multigraph), where `m` is the total edge count including multiplicities
//! and loops, followed by one `i j mult` line per adjacent pair in
//! lexicographic order. Loops are written as `i i count`. Blank lines and
//! lines starting with `#` are ignored when reading.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Simple undirected graph stored as a dense bit matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::param(format!(
                    "edge ({i},{j}) out of range for n={n}"
                )));
            }
            if i == j {
                return Err(Error::param(format!("loop at node {i} in a simple graph")));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    /// Adds edge `ij`; returns false if it was already present.
    pub fn add_edge(&mut self, i: usize, j: usize) -> bool {
        assert!(i != j, "simple graphs have no loops");
        if self.has_edge(i, j) {
            return false;
        }
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.bits[j * self.words + i / 64] |= 1 << (i % 64);
        true
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> bool {
        if !self.has_edge(i, j) {
            return false;
        }
        self.bits[i * self.words + j / 64] &= !(1 << (j % 64));
        self.bits[j * self.words + i / 64] &= !(1 << (i % 64));
        true
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.bits
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Graph whose node `r` is node `order[r]` of `self`.
    pub fn reordered(&self, order: &[usize]) -> Graph {
        assert_eq!(order.len(), self.n, "order must list every node once");
        let mut pos = vec![usize::MAX; self.n];
        for (r, &v) in order.iter().enumerate() {
            assert!(pos[v] == usize::MAX, "order repeats node {v}");
            pos[v] = r;
        }
        let mut g = Graph::empty(self.n);
        for (i, j) in self.edges() {
            g.add_edge(pos[i], pos[j]);
        }
        g
    }

    /// Replaces every node by `t` twins (consecutive labels).
    pub fn blow_up(&self, t: usize) -> Graph {
        let mut g = Graph::empty(self.n * t);
        for (i, j) in self.edges() {
            for a in 0..t {
                for b in 0..t {
                    g.add_edge(i * t + a, j * t + b);
                }
            }
        }
        g
    }

    /// The Petersen graph labelled as in its usual adjacency-matrix printout:
    /// outer 5-cycle on 0..5, inner pentagram on 5..10.
    pub fn petersen() -> Graph {
        const EDGES: [(usize, usize); 15] = [
            (0, 1),
            (0, 4),
            (0, 5),
            (1, 2),
            (1, 6),
            (2, 3),
            (2, 7),
            (3, 4),
            (3, 8),
            (4, 9),
            (5, 7),
            (5, 8),
            (6, 8),
            (6, 9),
            (7, 9),
        ];
        Graph::from_edges(10, EDGES).expect("static edge list")
    }

    /// Half-graph `H_{n,n}`: nodes `0..n` are `1..n`, nodes `n..2n` are
    /// `1'..n'`, and `i ~ j'` iff `i <= j`.
    pub fn half_graph(n: usize) -> Graph {
        let mut g = Graph::empty(2 * n);
        for i in 0..n {
            for j in i..n {
                g.add_edge(i, n + j);
            }
        }
        g
    }

    /// Complete bipartite graph between even and odd labels: its pixel
    /// picture in birth order is an `n x n` chessboard.
    pub fn chessboard(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in (i + 1..n).step_by(2) {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut g = Graph::empty(a + b);
        for i in 0..a {
            for j in a..a + b {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        if n >= 3 {
            for i in 0..n {
                g.add_edge(i, (i + 1) % n);
            }
        }
        g
    }

    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::new();
        writeln!(buf, "{} {}", self.n, self.edge_count()).unwrap();
        for (i, j) in self.edges() {
            writeln!(buf, "{i} {j} 1").unwrap();
        }
        out.write_all(buf.as_bytes())?;
        Ok(())
    }
}

/// Multigraph with loops, as produced by preferential attachment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multigraph {
    n: usize,
    /// Dense symmetric multiplicity matrix; diagonal unused.
    mult: Vec<u32>,
    loops: Vec<u32>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph {
            n,
            mult: vec![0; n * n],
            loops: vec![0; n],
        }
    }

    pub fn from_graph(g: &Graph) -> Self {
        let mut m = Multigraph::new(g.node_count());
        for (i, j) in g.edges() {
            m.add_edge(i, j);
        }
        m
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Adds one edge; `u == v` adds a loop.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.add_edges(u, v, 1);
    }

    pub fn add_edges(&mut self, u: usize, v: usize, count: u32) {
        if u == v {
            self.loops[u] += count;
        } else {
            self.mult[u * self.n + v] += count;
            self.mult[v * self.n + u] += count;
        }
    }

    /// Number of parallel `uv` edges; for `u == v` the number of loops.
    #[inline]
    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        if u == v {
            self.loops[u]
        } else {
            self.mult[u * self.n + v]
        }
    }

    pub fn loops(&self, u: usize) -> u32 {
        self.loops[u]
    }

    /// Degree with each loop counted twice.
    pub fn degree(&self, u: usize) -> u64 {
        let row: u64 = self.mult[u * self.n..(u + 1) * self.n]
            .iter()
            .map(|&m| m as u64)
            .sum();
        row + 2 * self.loops[u] as u64
    }

    pub fn degrees(&self) -> Vec<u64> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    /// Total edge count `m`, loops included.
    pub fn edge_count(&self) -> u64 {
        self.non_loop_edge_count() + self.loops.iter().map(|&l| l as u64).sum::<u64>()
    }

    pub fn non_loop_edge_count(&self) -> u64 {
        self.pairs()
            .filter(|&(i, j, _)| i != j)
            .map(|(_, _, m)| m as u64)
            .sum()
    }

    /// `(i, j, multiplicity)` with `i <= j` for every pair carrying at least
    /// one edge, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i..self.n).filter_map(move |j| {
                let m = self.multiplicity(i, j);
                (m > 0).then_some((i, j, m))
            })
        })
    }

    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = String::new();
        writeln!(buf, "{} {} multi", self.n, self.edge_count()).unwrap();
        for (i, j, m) in self.pairs() {
            writeln!(buf, "{i} {j} {m}").unwrap();
        }
        out.write_all(buf.as_bytes())?;
        Ok(())
    }
}

/// Contents of an edge-list file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeList {
    Simple(Graph),
    Multi(Multigraph),
}

impl EdgeList {
    pub fn node_count(&self) -> usize {
        match self {
            EdgeList::Simple(g) => g.node_count(),
            EdgeList::Multi(g) => g.node_count(),
        }
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        match self {
            EdgeList::Simple(g) => g.write_edge_list(out),
            EdgeList::Multi(g) => g.write_edge_list(out),
        }
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut header: Option<(usize, u64, bool)> = None;
        let mut multi = Multigraph::new(0);
        let mut total = 0u64;
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = text.split_whitespace().collect();
            match header {
                None => {
                    let is_multi = match fields.as_slice() {
                        [_, _] => false,
                        [_, _, "multi"] => true,
                        _ => return Err(Error::parse(lineno, "expected header `n m [multi]`")),
                    };
                    let n = parse_field(fields[0], lineno)?;
                    let m = parse_field(fields[1], lineno)?;
                    multi = Multigraph::new(n as usize);
                    header = Some((n as usize, m, is_multi));
                }
                Some((n, _, is_multi)) => {
                    let (i, j, count) = match fields.as_slice() {
                        [i, j] => (parse_field(i, lineno)?, parse_field(j, lineno)?, 1),
                        [i, j, c] => (
                            parse_field(i, lineno)?,
                            parse_field(j, lineno)?,
                            parse_field(c, lineno)?,
                        ),
                        _ => return Err(Error::parse(lineno, "expected `i j [mult]`")),
                    };
                    let (i, j) = (i as usize, j as usize);
                    if i >= n || j >= n {
                        return Err(Error::parse(lineno, format!("node out of range for n={n}")));
                    }
                    if !is_multi && (i == j || count != 1 || multi.multiplicity(i, j) > 0) {
                        return Err(Error::parse(
                            lineno,
                            "simple edge lists allow neither loops nor multiplicities",
                        ));
                    }
                    let count = u32::try_from(count)
                        .map_err(|_| Error::parse(lineno, "multiplicity too large"))?;
                    multi.add_edges(i, j, count);
                    total += count as u64;
                }
            }
        }
        let (n, m, is_multi) = header.ok_or_else(|| Error::parse(0, "empty edge list"))?;
        if total != m {
            return Err(Error::parse(
                0,
                format!("header says {m} edges, found {total}"),
            ));
        }
        if is_multi {
            Ok(EdgeList::Multi(multi))
        } else {
            let g = Graph::from_edges(n, multi.pairs().map(|(i, j, _)| (i, j)))?;
            Ok(EdgeList::Simple(g))
        }
    }
}

fn parse_field(s: &str, line: usize) -> Result<u64> {
    s.parse::<u64>()
        .map_err(|_| Error::parse(line, format!("not a nonnegative integer: {s:?}")))
}
