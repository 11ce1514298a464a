//! Terminal networks: undirected capacitated graphs with an ordered terminal list.
//!
//! The terminal order is significant. Capacity vectors, signatures and demand
//! matrices all index their coordinates by position in `terminals()`, so two
//! networks are only comparable when their terminal lists match.

use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type VertexId = u32;

/// One side of a vertex bipartition. Capacity is computed on demand by
/// [`Network::cut_capacity`]; an empty side has capacity zero by convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub side: BTreeSet<VertexId>,
}

impl Cut {
    pub fn new(side: impl IntoIterator<Item = VertexId>) -> Self {
        Cut {
            side: side.into_iter().collect(),
        }
    }
}

/// Undirected network with exact rational capacities.
///
/// Invariants kept by every constructor and mutation:
/// - edge endpoints are known vertices, stored under the key `(min, max)`
/// - no self-loops; parallel edges are merged by summing capacities
/// - stored capacities are strictly positive (an absent edge means zero)
/// - terminals are distinct known vertices; their order is preserved
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    vertices: BTreeSet<VertexId>,
    terminals: Vec<VertexId>,
    edges: BTreeMap<(VertexId, VertexId), Rational>,
}

impl Network {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        terminals: impl IntoIterator<Item = VertexId>,
    ) -> Result<Self> {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        let mut seen = BTreeSet::new();
        let mut term_list = Vec::new();
        for t in terminals {
            if !vertices.contains(&t) {
                return Err(Error::UnknownVertex(t));
            }
            if !seen.insert(t) {
                return Err(Error::DuplicateTerminal(t));
            }
            term_list.push(t);
        }
        Ok(Network {
            vertices,
            terminals: term_list,
            edges: BTreeMap::new(),
        })
    }

    /// Builds a quasi-bipartite network: terminals plus one fresh center per
    /// capacity vector, the i-th coordinate becoming the capacity of the edge
    /// from that center to the i-th terminal. Zero coordinates produce no edge.
    pub fn star_network(terminals: &[VertexId], stars: &[Vec<Rational>]) -> Result<Self> {
        let base = terminals.iter().copied().max().unwrap_or(0);
        let centers: Vec<VertexId> = (0..stars.len() as u32).map(|i| base + 1 + i).collect();
        let mut net = Network::new(
            terminals.iter().copied().chain(centers.iter().copied()),
            terminals.iter().copied(),
        )?;
        for (center, coords) in centers.iter().zip(stars) {
            if coords.len() != terminals.len() {
                return Err(Error::DimensionMismatch {
                    expected: terminals.len(),
                    got: coords.len(),
                });
            }
            for (t, c) in terminals.iter().zip(coords) {
                net.add_edge(*center, *t, c.clone())?;
            }
        }
        Ok(net)
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        self.vertices.insert(v);
    }

    /// Adds capacity between `u` and `v`, merging with any existing edge.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, capacity: Rational) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        for x in [u, v] {
            if !self.vertices.contains(&x) {
                return Err(Error::UnknownVertex(x));
            }
        }
        if capacity.is_negative() {
            return Err(Error::NegativeCapacity { u, v });
        }
        if capacity.is_zero() {
            return Ok(());
        }
        let key = (u.min(v), u.max(v));
        let slot = self.edges.entry(key).or_insert_with(Rational::zero);
        *slot += capacity;
        Ok(())
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.terminals.contains(&v)
    }

    pub fn terminal_index(&self, v: VertexId) -> Option<usize> {
        self.terminals.iter().position(|&t| t == v)
    }

    pub fn steiner_vertices(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .copied()
            .filter(|v| !self.is_terminal(*v))
            .collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, &Rational)> + '_ {
        self.edges.iter().map(|(&(u, v), c)| (u, v, c))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn capacity(&self, u: VertexId, v: VertexId) -> Rational {
        if u == v {
            return Rational::zero();
        }
        self.edges
            .get(&(u.min(v), u.max(v)))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_capacity(&self) -> Rational {
        self.edges.values().sum()
    }

    pub fn max_vertex_id(&self) -> VertexId {
        self.vertices.iter().copied().max().unwrap_or(0)
    }

    /// True when the non-terminals form an independent set.
    pub fn is_quasi_bipartite(&self) -> bool {
        self.quasi_bipartite_violation().is_none()
    }

    pub fn quasi_bipartite_violation(&self) -> Option<(VertexId, VertexId)> {
        self.edges
            .keys()
            .find(|(u, v)| !self.is_terminal(*u) && !self.is_terminal(*v))
            .copied()
    }

    /// Capacity of the edges leaving `side`. Sides equal to the whole vertex
    /// set or empty have no crossing edges and return zero.
    pub fn cut_capacity(&self, side: &BTreeSet<VertexId>) -> Result<Rational> {
        for v in side {
            if !self.vertices.contains(v) {
                return Err(Error::UnknownVertex(*v));
            }
        }
        let mut total = Rational::zero();
        for ((u, v), c) in &self.edges {
            if side.contains(u) != side.contains(v) {
                total += c;
            }
        }
        Ok(total)
    }

    /// Merges `w` into `v` (or into `w` when only `w` is a terminal), summing
    /// parallel capacities and dropping any edge between the pair. When both
    /// are terminals the merged vertex keeps `v`'s identity and slot and `w`
    /// leaves the terminal list.
    pub fn contract(&self, v: VertexId, w: VertexId) -> Result<Network> {
        if v == w {
            return Err(Error::SelfLoop(v));
        }
        for x in [v, w] {
            if !self.vertices.contains(&x) {
                return Err(Error::UnknownVertex(x));
            }
        }
        let merged = if self.is_terminal(v) || !self.is_terminal(w) {
            v
        } else {
            w
        };
        let gone = if merged == v { w } else { v };
        let terminals: Vec<VertexId> = self
            .terminals
            .iter()
            .copied()
            .filter(|&t| t != gone)
            .collect();
        let vertices = self
            .vertices
            .iter()
            .copied()
            .filter(|&x| x != gone)
            .collect::<Vec<_>>();
        let mut out = Network::new(vertices, terminals)?;
        for ((a, b), c) in &self.edges {
            let ma = if *a == gone { merged } else { *a };
            let mb = if *b == gone { merged } else { *b };
            if ma == mb {
                continue;
            }
            out.add_edge(ma, mb, c.clone())?;
        }
        Ok(out)
    }

    /// Glues two networks that only share vertices from `terminals`, summing
    /// the capacities of edges present in both. Terminals missing from both
    /// inputs are added as isolated vertices.
    pub fn steiner_disjoint_union(
        g1: &Network,
        g2: &Network,
        terminals: &[VertexId],
    ) -> Result<Network> {
        let term_set: BTreeSet<VertexId> = terminals.iter().copied().collect();
        if term_set.len() != terminals.len() {
            return Err(Error::TerminalMismatch(
                "duplicate terminal in union".into(),
            ));
        }
        for v in g1.vertices.intersection(&g2.vertices) {
            if !term_set.contains(v) {
                return Err(Error::SharedSteiner(*v));
            }
        }
        let vertices = g1
            .vertices
            .iter()
            .chain(g2.vertices.iter())
            .copied()
            .chain(terminals.iter().copied());
        let mut out = Network::new(vertices, terminals.iter().copied())?;
        for g in [g1, g2] {
            for ((u, v), c) in &g.edges {
                out.add_edge(*u, *v, c.clone())?;
            }
        }
        Ok(out)
    }

    /// Subgraph induced by `keep`. Terminals retain their relative order.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Network {
        let mut out = Network {
            vertices: self.vertices.intersection(keep).copied().collect(),
            terminals: self
                .terminals
                .iter()
                .copied()
                .filter(|t| keep.contains(t))
                .collect(),
            edges: BTreeMap::new(),
        };
        for ((u, v), c) in &self.edges {
            if keep.contains(u) && keep.contains(v) {
                out.edges.insert((*u, *v), c.clone());
            }
        }
        out
    }

    /// Copy with the edges internal to `set` removed.
    pub fn without_edges_within(&self, set: &BTreeSet<VertexId>) -> Network {
        let mut out = self.clone();
        out.edges
            .retain(|(u, v), _| !(set.contains(u) && set.contains(v)));
        out
    }

    /// Same graph, different terminal list.
    pub fn with_terminals(&self, terminals: impl IntoIterator<Item = VertexId>) -> Result<Network> {
        let mut out = Network::new(self.vertices.iter().copied(), terminals)?;
        out.edges = self.edges.clone();
        Ok(out)
    }

    /// Renames every non-terminal vertex to a fresh id at or above `floor`.
    /// Used before gluing sparsifier outputs so pieces cannot collide.
    pub fn relabel_steiner_from(&self, floor: VertexId) -> Network {
        let mut next = floor;
        let mut map = BTreeMap::new();
        for v in self.vertices.iter().copied() {
            if self.is_terminal(v) {
                map.insert(v, v);
            } else {
                map.insert(v, next);
                next += 1;
            }
        }
        let mut out = Network {
            vertices: map.values().copied().collect(),
            terminals: self.terminals.clone(),
            edges: BTreeMap::new(),
        };
        for ((u, v), c) in &self.edges {
            let (a, b) = (map[u], map[v]);
            out.edges.insert((a.min(b), a.max(b)), c.clone());
        }
        out
    }

    /// Drops non-terminal vertices with no incident edges.
    pub fn strip_isolated_steiner(&self) -> Network {
        let mut incident: BTreeSet<VertexId> = BTreeSet::new();
        for (u, v) in self.edges.keys() {
            incident.insert(*u);
            incident.insert(*v);
        }
        let keep: BTreeSet<VertexId> = self
            .vertices
            .iter()
            .copied()
            .filter(|v| self.is_terminal(*v) || incident.contains(v))
            .collect();
        self.induced(&keep)
    }
}
