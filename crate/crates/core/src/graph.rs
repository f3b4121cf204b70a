//! Multigraphs, polygon chain/ring/twisted-ring constructors, Laplacians and
//! the cycle/cut edge presentation of the sandpile group.
//!
//! A spec `(n; a_1..a_n; b_1..b_n; topology)` describes `n` polygons, the
//! i-th a cycle with `a_i` top edges, `b_i` bottom edges and two shared rung
//! edges (`k_i = a_i + b_i + 2`). Chains keep both end rungs free; rings
//! identify the two free rungs directly; twisted rings identify them with a
//! flip, giving the Moebius-band embedding.
//!
//! Orientation convention: top-path edges point from `v_0` towards `v_n`,
//! bottom-path edges from `u_n` towards `u_0`, rungs from `u_i` to `v_i`
//! (for the twisted closure the merged rung points from `u_0` to `v_0`,
//! which reverses it relative to the ring's merged rung).

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::matrix::IntegerMatrix;
use crate::{Error, Result};

/// How the polygon chain is closed up, if at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    Chain,
    Ring,
    Twisted,
}

impl Topology {
    pub fn as_str(&self) -> &'static str {
        match self {
            Topology::Chain => "chain",
            Topology::Ring => "ring",
            Topology::Twisted => "twisted",
        }
    }
}

impl std::str::FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain" => Ok(Topology::Chain),
            "ring" => Ok(Topology::Ring),
            "twisted" => Ok(Topology::Twisted),
            other => Err(Error::InvalidSpec(format!(
                "unknown topology {other:?} (expected chain, ring or twisted)"
            ))),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters of one polygon chain/ring/twisted-ring instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonSpec {
    topology: Topology,
    a: Vec<u64>,
    b: Vec<u64>,
}

impl PolygonSpec {
    pub fn new(topology: Topology, a: Vec<u64>, b: Vec<u64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidSpec(format!(
                "arc lists differ in length: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        if a.is_empty() {
            return Err(Error::InvalidSpec(
                "at least one polygon is required".into(),
            ));
        }
        if topology != Topology::Chain && a.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "{topology} requires n >= 2 polygons, got {}",
                a.len()
            )));
        }
        Ok(PolygonSpec { topology, a, b })
    }

    /// A spec with every `a_i = a` and every `b_i = b`.
    pub fn uniform(topology: Topology, n: usize, a: u64, b: u64) -> Result<Self> {
        Self::new(topology, vec![a; n], vec![b; n])
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Number of polygons.
    pub fn polygon_count(&self) -> usize {
        self.a.len()
    }

    pub fn top_arcs(&self) -> &[u64] {
        &self.a
    }

    pub fn bottom_arcs(&self) -> &[u64] {
        &self.b
    }

    /// Girth of the i-th polygon (1-based): `k_i = a_i + b_i + 2 >= 2`.
    pub fn girth(&self, i: usize) -> u64 {
        self.a[i - 1] + self.b[i - 1] + 2
    }

    /// `Some((a, b))` when all top arcs equal `a` and all bottom arcs `b`.
    pub fn as_uniform(&self) -> Option<(u64, u64)> {
        let a = self.a[0];
        let b = self.b[0];
        if self.a.iter().all(|&x| x == a) && self.b.iter().all(|&x| x == b) {
            Some((a, b))
        } else {
            None
        }
    }

    /// True when every polygon has both a top and a bottom arc. This is the
    /// hypothesis of the three-generator transfer construction.
    pub fn all_arcs_positive(&self) -> bool {
        self.a.iter().all(|&x| x >= 1) && self.b.iter().all(|&x| x >= 1)
    }

    /// Builds the labeled, oriented multigraph with the closure
    /// identifications applied.
    pub fn build(&self) -> MultiGraph {
        build_graph(self)
    }
}

/// One oriented edge: `tail -> head`. Parallel edges are distinct entries;
/// loops (`tail == head`) arise only from degenerate twisted closures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub label: String,
    pub tail: usize,
    pub head: usize,
}

/// A connected multigraph with labeled oriented edges in a fixed order.
#[derive(Clone, Debug)]
pub struct MultiGraph {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
}

/// An element of the edge lattice: one integer coefficient per edge, in the
/// graph's edge order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedEdgeVector {
    pub coefficients: Vec<BigInt>,
}

impl SignedEdgeVector {
    pub fn dot(&self, other: &SignedEdgeVector) -> BigInt {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(x, y)| x * y)
            .sum()
    }
}

impl MultiGraph {
    /// Builds a multigraph directly from vertex names and labeled oriented
    /// edges. Intended for small hand-built fixtures; polygon graphs come
    /// from [`PolygonSpec::build`].
    pub fn new(vertex_names: Vec<String>, edges: Vec<(String, usize, usize)>) -> Result<Self> {
        let n = vertex_names.len();
        if n == 0 {
            return Err(Error::InvalidSpec("graph needs at least one vertex".into()));
        }
        for (label, tail, head) in &edges {
            if *tail >= n || *head >= n {
                return Err(Error::UnknownVertex(format!(
                    "edge {label}: endpoint out of range"
                )));
            }
        }
        let g = MultiGraph {
            vertex_names,
            edges: edges
                .into_iter()
                .map(|(label, tail, head)| Edge { label, tail, head })
                .collect(),
        };
        if !g.is_connected() {
            return Err(Error::InvalidSpec("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Degree of `v`, not counting loops (a loop returns its chips to the
    /// vertex that fired, so it is invisible to both the Laplacian and the
    /// chip-firing dynamics).
    pub fn degree(&self, v: usize) -> u64 {
        self.edges
            .iter()
            .filter(|e| (e.tail == v) ^ (e.head == v))
            .count() as u64
    }

    /// Edge multiplicity between two distinct vertices.
    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        self.edges
            .iter()
            .filter(|e| (e.tail == u && e.head == v) || (e.tail == v && e.head == u))
            .count() as u64
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for e in &self.edges {
                for w in [e.tail, e.head] {
                    let other = if w == v {
                        if e.tail == v {
                            e.head
                        } else {
                            e.tail
                        }
                    } else {
                        continue;
                    };
                    if !seen[other] {
                        seen[other] = true;
                        count += 1;
                        queue.push_back(other);
                    }
                }
            }
        }
        count == n
    }

    /// The graph Laplacian `L = D - A` with edge multiplicities respected and
    /// loops ignored. Every row and column sums to zero.
    pub fn laplacian(&self) -> IntegerMatrix {
        let n = self.vertex_count();
        let mut l = IntegerMatrix::zeros(n, n);
        for e in &self.edges {
            if e.tail == e.head {
                continue;
            }
            let (u, v) = (e.tail, e.head);
            l.set(u, u, l.at(u, u) + BigInt::one());
            l.set(v, v, l.at(v, v) + BigInt::one());
            l.set(u, v, l.at(u, v) - BigInt::one());
            l.set(v, u, l.at(v, u) - BigInt::one());
        }
        l
    }

    /// The Laplacian with the sink's row and column deleted. Its determinant
    /// is the spanning-tree count and the nontrivial invariant factors of its
    /// Smith normal form are the invariant factors of the sandpile group.
    pub fn reduced_laplacian(&self, sink: usize) -> Result<IntegerMatrix> {
        let n = self.vertex_count();
        if sink >= n {
            return Err(Error::UnknownVertex(format!("sink index {sink} >= {n}")));
        }
        let full = self.laplacian();
        let keep: Vec<usize> = (0..n).filter(|&v| v != sink).collect();
        let mut r = IntegerMatrix::zeros(n - 1, n - 1);
        for (i, &vi) in keep.iter().enumerate() {
            for (j, &vj) in keep.iter().enumerate() {
                r.set(i, j, full.at(vi, vj).clone());
            }
        }
        Ok(r)
    }

    /// Breadth-first spanning tree from vertex 0: `parent[v]` is the edge
    /// index connecting `v` towards the root. Deterministic in edge order.
    fn spanning_tree(&self) -> Vec<Option<usize>> {
        let n = self.vertex_count();
        // Adjacency in edge order so traversal is reproducible.
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (idx, e) in self.edges.iter().enumerate() {
            if e.tail == e.head {
                continue;
            }
            adjacency[e.tail].push((idx, e.head));
            adjacency[e.head].push((idx, e.tail));
        }
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &(idx, w) in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(idx);
                    queue.push_back(w);
                }
            }
        }
        debug_assert!(seen.iter().all(|&s| s), "graph must be connected");
        parent
    }

    /// Fundamental cycles of a breadth-first spanning tree: one per non-tree
    /// edge, `|E| - |V| + 1` in total. A loop's cycle is the loop itself.
    /// Fundamental cycles form a basis of the integral cycle lattice for any
    /// topology, planar or not.
    pub fn cycle_basis(&self) -> Vec<SignedEdgeVector> {
        let parent = self.spanning_tree();
        let in_tree: Vec<bool> = {
            let mut flags = vec![false; self.edge_count()];
            for p in parent.iter().flatten() {
                flags[*p] = true;
            }
            flags
        };
        let mut cycles = Vec::new();
        for (idx, e) in self.edges.iter().enumerate() {
            if in_tree[idx] {
                continue;
            }
            let mut coefficients = vec![BigInt::zero(); self.edge_count()];
            coefficients[idx] = BigInt::one();
            if e.tail != e.head {
                // Close up along the tree path head -> tail.
                let to_root = |mut v: usize| {
                    let mut path = vec![v];
                    while let Some(p) = parent[v] {
                        let pe = &self.edges[p];
                        v = if pe.tail == v { pe.head } else { pe.tail };
                        path.push(v);
                    }
                    path
                };
                let from_head = to_root(e.head);
                let from_tail = to_root(e.tail);
                // Drop the common tail of the two root paths (below the
                // meeting point the paths coincide).
                let mut hi = from_head.len();
                let mut ti = from_tail.len();
                while hi > 1 && ti > 1 && from_head[hi - 2] == from_tail[ti - 2] {
                    hi -= 1;
                    ti -= 1;
                }
                let walk = |path: &[usize], flip: bool, coeffs: &mut Vec<BigInt>| {
                    for w in path.windows(2) {
                        let (x, y) = (w[0], w[1]);
                        let idx = parent[if flip { y } else { x }].expect("tree edge");
                        let pe = &self.edges[idx];
                        let forward = pe.tail == if flip { y } else { x };
                        // Traversal direction x -> y; flip reverses it.
                        let sign = forward ^ flip;
                        coeffs[idx] += if sign { BigInt::one() } else { -BigInt::one() };
                    }
                };
                // head -> meeting point, then meeting point -> tail.
                walk(&from_head[..hi], false, &mut coefficients);
                let mut back: Vec<usize> = from_tail[..ti].to_vec();
                back.reverse();
                walk(&back, true, &mut coefficients);
            }
            cycles.push(SignedEdgeVector { coefficients });
        }
        cycles
    }

    /// Vertex cuts for every vertex except vertex 0 (any single omission
    /// leaves a spanning, independent family; fixing vertex 0 keeps outputs
    /// reproducible). `|V| - 1` vectors, `+1` on outgoing edges, `-1` on
    /// incoming ones, `0` on loops.
    pub fn cut_basis(&self) -> Vec<SignedEdgeVector> {
        (1..self.vertex_count())
            .map(|v| {
                let coefficients = self
                    .edges
                    .iter()
                    .map(|e| {
                        if e.tail == e.head {
                            BigInt::zero()
                        } else if e.tail == v {
                            BigInt::one()
                        } else if e.head == v {
                            -BigInt::one()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect();
                SignedEdgeVector { coefficients }
            })
            .collect()
    }

    /// The square `|E| x |E|` relation matrix of the presentation of the
    /// sandpile group on the edge generators: rows are the fundamental cycles
    /// followed by the vertex cuts, columns follow the edge order. Its Smith
    /// normal form's nontrivial factors are the invariant factors of the
    /// sandpile group, and the absolute determinant is the spanning-tree
    /// count.
    pub fn edge_presentation_matrix(&self) -> IntegerMatrix {
        let m = self.edge_count();
        let mut rows = Vec::with_capacity(m);
        for vector in self.cycle_basis().into_iter().chain(self.cut_basis()) {
            rows.push(vector.coefficients);
        }
        debug_assert_eq!(rows.len(), m, "cycles + cuts must fill the edge count");
        IntegerMatrix::from_rows(rows).expect("rows share the edge count")
    }

    /// Deterministic plain-text description (vertex list, labeled oriented
    /// edge list) for debugging and golden tests.
    pub fn describe(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "vertices: {}", self.vertex_count()).unwrap();
        for (i, name) in self.vertex_names.iter().enumerate() {
            writeln!(out, "  {i}: {name}").unwrap();
        }
        writeln!(out, "edges: {}", self.edge_count()).unwrap();
        for e in &self.edges {
            writeln!(
                out,
                "  {}: {} -> {}",
                e.label, self.vertex_names[e.tail], self.vertex_names[e.head]
            )
            .unwrap();
        }
        out
    }
}

/// Disjoint-set forest for the closure identifications.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let root = self.find(self.0[x]);
            self.0[x] = root;
        }
        self.0[x]
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        // Keep the smaller id as representative for stable vertex order.
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.0[hi] = lo;
    }
}

// Indexing is 1-based by polygon throughout, matching the edge labels.
#[allow(clippy::needless_range_loop)]
fn build_graph(spec: &PolygonSpec) -> MultiGraph {
    let n = spec.polygon_count();
    let a_total: u64 = spec.top_arcs().iter().sum();
    let b_total: u64 = spec.bottom_arcs().iter().sum();
    let top = |t: u64| t as usize; // x_t
    let bottom = |t: u64| (a_total + 1 + t) as usize; // y_t
    let raw_count = (a_total + b_total + 2) as usize;

    // Junction positions: v_i = x_{A_i}, u_i = y_{B_i}.
    let mut a_prefix = vec![0u64; n + 1];
    let mut b_prefix = vec![0u64; n + 1];
    for i in 1..=n {
        a_prefix[i] = a_prefix[i - 1] + spec.top_arcs()[i - 1];
        b_prefix[i] = b_prefix[i - 1] + spec.bottom_arcs()[i - 1];
    }
    let v = |i: usize| top(a_prefix[i]);
    let u = |i: usize| bottom(b_prefix[i]);

    let mut uf = UnionFind::new(raw_count);
    match spec.topology() {
        Topology::Chain => {}
        Topology::Ring => {
            uf.union(v(0), v(n));
            uf.union(u(0), u(n));
        }
        Topology::Twisted => {
            uf.union(v(0), u(n));
            uf.union(u(0), v(n));
        }
    }

    // Compress to contiguous ids ordered by smallest member; merged vertices
    // keep all their original names, joined with '='.
    let mut representative_of = vec![usize::MAX; raw_count];
    let mut names: Vec<String> = Vec::new();
    let raw_name = |id: usize| {
        if id <= a_total as usize {
            format!("x{id}")
        } else {
            format!("y{}", id - (a_total as usize + 1))
        }
    };
    for id in 0..raw_count {
        let root = uf.find(id);
        if representative_of[root] == usize::MAX {
            representative_of[root] = names.len();
            names.push(raw_name(id));
        } else if root != id {
            let slot = representative_of[root];
            names[slot].push('=');
            names[slot].push_str(&raw_name(id));
        }
    }
    let mut map = move |id: usize| representative_of[uf.find(id)];

    let mut edges: Vec<(String, usize, usize)> = Vec::new();
    // Rung edges first. Chains keep e_0..e_n; closed topologies merge the two
    // free rungs into e_n. Ring rungs point u_i -> v_i; the twisted merged
    // rung points u_0 -> v_0, reversing it relative to the ring convention.
    match spec.topology() {
        Topology::Chain => {
            for i in 0..=n {
                edges.push((format!("e{i}"), map(u(i)), map(v(i))));
            }
        }
        Topology::Ring | Topology::Twisted => {
            for i in 1..n {
                edges.push((format!("e{i}"), map(u(i)), map(v(i))));
            }
            edges.push((format!("e{n}"), map(u(0)), map(v(0))));
        }
    }
    // Top-path edges, oriented v_0 -> v_n, polygon by polygon.
    for i in 1..=n {
        for j in 1..=spec.top_arcs()[i - 1] {
            let t = a_prefix[i - 1] + j - 1;
            edges.push((format!("f{i},{j}"), map(top(t)), map(top(t + 1))));
        }
    }
    // Bottom-path edges, oriented u_n -> u_0; `g_{i,1}` leaves u_i.
    for i in 1..=n {
        for j in 1..=spec.bottom_arcs()[i - 1] {
            let t = b_prefix[i] - j + 1;
            edges.push((format!("g{i},{j}"), map(bottom(t)), map(bottom(t - 1))));
        }
    }

    // Closed topologies can produce loops: a ring whose top (or bottom) arcs
    // sum to exactly 1 closes that arc into a loop, and twisted closures with
    // a zero arc total merge rung endpoints. Chains never do.
    if spec.topology() == Topology::Chain {
        assert!(
            edges.iter().all(|(_, t, h)| t != h),
            "chains never produce loops"
        );
    }

    MultiGraph::new(names, edges).expect("polygon graphs are connected by construction")
}
