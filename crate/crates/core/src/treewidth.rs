//! Reduction from bounded treewidth to small-terminal-count subproblems.
//!
//! Given a tree decomposition, the terminals select a set `Y` of tree nodes
//! (one shallowest bag per terminal, closed under lowest common ancestors so
//! `|Y| <= 2k`). Components of `T - Y` sharing the same pair of boundary
//! nodes form a region; every region's graph meets the rest of the network in
//! at most `2w` vertices. Each region is sparsified independently by a
//! pluggable black box and the pieces are glued back around the subgraph
//! owned by `Y`. An exact black box yields an exact sparsifier; a quality-q
//! box yields quality q overall.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::bipartite::sparsify_cut_contraction;
use crate::error::{Error, Result};
use crate::mincut::min_cut;
use crate::network::{Network, VertexId};
use crate::rational::Rational;

/// Largest region terminal count the mimicking black box accepts; it runs one
/// exact min cut per terminal subset.
pub const MAX_MIMICKING_TERMINALS: usize = 12;

/// A tree decomposition as read from disk, before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTreeDecomposition {
    /// Vertex count declared in the header.
    pub declared_vertices: usize,
    pub bags: BTreeMap<usize, BTreeSet<VertexId>>,
    pub edges: Vec<(usize, usize)>,
}

/// Parses the PACE-style text format: an `s td <bags> <max-bag-size> <n>`
/// header, one `b <id> <v...>` line per bag, then one `<i> <j>` line per tree
/// edge. Lines starting with `c` are comments.
pub fn parse_tree_decomposition(text: &str) -> Result<RawTreeDecomposition> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: BTreeMap<usize, BTreeSet<VertexId>> = BTreeMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = lineno + 1;
        let fail = |msg: String| Error::Parse { line, msg };
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields[0] == "s" {
            if header.is_some() {
                return Err(fail("duplicate header".into()));
            }
            if fields.len() != 5 || fields[1] != "td" {
                return Err(fail("expected 's td <bags> <max-bag-size> <n>'".into()));
            }
            let nums: Vec<usize> = fields[2..]
                .iter()
                .map(|f| f.parse().map_err(|_| fail(format!("bad number '{f}'"))))
                .collect::<Result<_>>()?;
            header = Some((nums[0], nums[1], nums[2]));
            continue;
        }
        let (num_bags, _, _) =
            header.ok_or_else(|| fail("content before the 's td' header".into()))?;
        if fields[0] == "b" {
            if fields.len() < 2 {
                return Err(fail("bag line without an id".into()));
            }
            let id: usize = fields[1]
                .parse()
                .map_err(|_| fail(format!("bad bag id '{}'", fields[1])))?;
            if id == 0 || id > num_bags {
                return Err(fail(format!("bag id {id} outside 1..={num_bags}")));
            }
            let mut bag = BTreeSet::new();
            for f in &fields[2..] {
                let v: VertexId = f
                    .parse()
                    .map_err(|_| fail(format!("bad vertex id '{f}'")))?;
                bag.insert(v);
            }
            if bags.insert(id, bag).is_some() {
                return Err(fail(format!("duplicate bag {id}")));
            }
            continue;
        }
        if fields.len() != 2 {
            return Err(fail("expected a tree edge '<i> <j>'".into()));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| fail(format!("bad node id '{}'", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| fail(format!("bad node id '{}'", fields[1])))?;
        edges.push((i, j));
    }

    let (num_bags, _, declared_vertices) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing 's td' header".into(),
    })?;
    // bags without a 'b' line are empty, as the format allows
    for id in 1..=num_bags {
        bags.entry(id).or_default();
    }
    Ok(RawTreeDecomposition {
        declared_vertices,
        bags,
        edges,
    })
}

pub fn format_tree_decomposition(td: &RawTreeDecomposition) -> String {
    let max_bag = td.bags.values().map(BTreeSet::len).max().unwrap_or(0);
    let mut out = format!("s td {} {} {}\n", td.bags.len(), max_bag, td.declared_vertices);
    for (id, bag) in &td.bags {
        out.push_str(&format!("b {id}"));
        for v in bag {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    for (i, j) in &td.edges {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

/// A validated, normalized tree decomposition rooted at its smallest node id:
/// no two bags are identical, and every graph edge is assigned to the unique
/// root-closest node whose bag contains both endpoints.
#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    root: usize,
    bags: BTreeMap<usize, BTreeSet<VertexId>>,
    parent: BTreeMap<usize, usize>,
    depth: BTreeMap<usize, usize>,
    neighbors: BTreeMap<usize, BTreeSet<usize>>,
    edge_assignment: BTreeMap<(VertexId, VertexId), usize>,
}

impl TreeDecomposition {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.bags.keys().copied()
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn has_node(&self, node: usize) -> bool {
        self.bags.contains_key(&node)
    }

    /// Bag of `node`; the node must exist.
    pub fn bag(&self, node: usize) -> &BTreeSet<VertexId> {
        &self.bags[&node]
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[&node]
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent.get(&node).copied()
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors[&node].iter().copied()
    }

    /// Max bag size minus one.
    pub fn width(&self) -> usize {
        self.bags
            .values()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    pub fn edge_assignment(&self) -> &BTreeMap<(VertexId, VertexId), usize> {
        &self.edge_assignment
    }

    pub fn lca(&self, u: usize, v: usize) -> usize {
        let (mut a, mut b) = (u, v);
        while self.depth[&a] > self.depth[&b] {
            a = self.parent[&a];
        }
        while self.depth[&b] > self.depth[&a] {
            b = self.parent[&b];
        }
        while a != b {
            a = self.parent[&a];
            b = self.parent[&b];
        }
        a
    }

    pub fn is_ancestor(&self, anc: usize, node: usize) -> bool {
        let mut cur = node;
        loop {
            if cur == anc {
                return true;
            }
            match self.parent.get(&cur) {
                Some(&p) => cur = p,
                None => return false,
            }
        }
    }
}

fn tree_path(
    adj: &BTreeMap<usize, BTreeSet<usize>>,
    from: usize,
    to: usize,
) -> Option<Vec<usize>> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = BTreeSet::from([from]);
    while let Some(n) = queue.pop_front() {
        if n == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &m in &adj[&n] {
            if seen.insert(m) {
                prev.insert(m, n);
                queue.push_back(m);
            }
        }
    }
    None
}

/// Validates `raw` against `net` and normalizes it: checks the tree shape,
/// vertex and edge coverage, and the connected-subtree property, then merges
/// identical bags (each merge contracts the tree edge towards the duplicate,
/// which is always into a superset bag) and computes depths and the
/// root-closest edge assignment.
pub fn normalize_decomposition(
    net: &Network,
    raw: &RawTreeDecomposition,
) -> Result<TreeDecomposition> {
    if raw.bags.is_empty() {
        return Err(Error::InvalidDecomposition("no bags".into()));
    }
    let mut adj: BTreeMap<usize, BTreeSet<usize>> =
        raw.bags.keys().map(|&id| (id, BTreeSet::new())).collect();
    let mut seen_edges = BTreeSet::new();
    for &(i, j) in &raw.edges {
        if i == j {
            return Err(Error::InvalidDecomposition(format!("tree self-loop at {i}")));
        }
        for n in [i, j] {
            if !raw.bags.contains_key(&n) {
                return Err(Error::InvalidDecomposition(format!("unknown tree node {n}")));
            }
        }
        if !seen_edges.insert((i.min(j), i.max(j))) {
            return Err(Error::InvalidDecomposition(format!(
                "duplicate tree edge ({i}, {j})"
            )));
        }
        adj.get_mut(&i).unwrap().insert(j);
        adj.get_mut(&j).unwrap().insert(i);
    }
    if seen_edges.len() + 1 != raw.bags.len() {
        return Err(Error::InvalidDecomposition(format!(
            "{} edges cannot form a tree over {} nodes",
            seen_edges.len(),
            raw.bags.len()
        )));
    }
    let start = *raw.bags.keys().next().unwrap();
    let mut reach = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        for &m in &adj[&n] {
            if reach.insert(m) {
                queue.push_back(m);
            }
        }
    }
    if reach.len() != raw.bags.len() {
        return Err(Error::InvalidDecomposition("tree is disconnected".into()));
    }

    for (id, bag) in &raw.bags {
        for &v in bag {
            if !net.contains_vertex(v) {
                return Err(Error::InvalidDecomposition(format!(
                    "bag {id} mentions unknown vertex {v}"
                )));
            }
        }
    }
    let mut covered: BTreeSet<VertexId> = BTreeSet::new();
    for bag in raw.bags.values() {
        covered.extend(bag.iter().copied());
    }
    for v in net.vertices() {
        if !covered.contains(&v) {
            return Err(Error::InvalidDecomposition(format!("vertex {v} is in no bag")));
        }
    }
    for (u, v, _) in net.edges() {
        if !raw
            .bags
            .values()
            .any(|bag| bag.contains(&u) && bag.contains(&v))
        {
            return Err(Error::InvalidDecomposition(format!(
                "edge ({u}, {v}) is covered by no bag"
            )));
        }
    }
    for v in net.vertices() {
        let holders: BTreeSet<usize> = raw
            .bags
            .iter()
            .filter(|(_, bag)| bag.contains(&v))
            .map(|(&id, _)| id)
            .collect();
        let first = *holders.iter().next().unwrap();
        let mut reach = BTreeSet::from([first]);
        let mut queue = VecDeque::from([first]);
        while let Some(n) = queue.pop_front() {
            for &m in &adj[&n] {
                if holders.contains(&m) && reach.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        if reach.len() != holders.len() {
            return Err(Error::InvalidDecomposition(format!(
                "bags containing vertex {v} are not connected"
            )));
        }
    }

    // merge identical bags: contract towards the duplicate along the tree
    // path; running intersection makes every path bag a superset, so the
    // surviving neighbor's bag absorbs the dropped one unchanged
    let mut bags = raw.bags.clone();
    loop {
        let mut pair: Option<(usize, usize)> = None;
        let ids: Vec<usize> = bags.keys().copied().collect();
        'outer: for (i, &u) in ids.iter().enumerate() {
            for &v in &ids[i + 1..] {
                if bags[&u] == bags[&v] {
                    pair = Some((u, v));
                    break 'outer;
                }
            }
        }
        let Some((u, v)) = pair else { break };
        let path = tree_path(&adj, u, v).expect("tree is connected");
        let p = path[1];
        debug_assert!(bags[&p].is_superset(&bags[&u]));
        let u_neighbors: Vec<usize> = adj[&u].iter().copied().collect();
        for w in u_neighbors {
            adj.get_mut(&w).unwrap().remove(&u);
            if w != p {
                adj.get_mut(&w).unwrap().insert(p);
                adj.get_mut(&p).unwrap().insert(w);
            }
        }
        adj.remove(&u);
        bags.remove(&u);
    }

    let root = *bags.keys().next().unwrap();
    let mut parent = BTreeMap::new();
    let mut depth = BTreeMap::from([(root, 0usize)]);
    let mut queue = VecDeque::from([root]);
    while let Some(n) = queue.pop_front() {
        for &m in &adj[&n] {
            if !depth.contains_key(&m) {
                depth.insert(m, depth[&n] + 1);
                parent.insert(m, n);
                queue.push_back(m);
            }
        }
    }

    let mut edge_assignment = BTreeMap::new();
    for (u, v, _) in net.edges() {
        let node = bags
            .iter()
            .filter(|(_, bag)| bag.contains(&u) && bag.contains(&v))
            .map(|(&id, _)| id)
            .min_by_key(|id| (depth[id], *id))
            .expect("edge coverage was validated");
        edge_assignment.insert((u.min(v), u.max(v)), node);
    }

    Ok(TreeDecomposition {
        root,
        bags,
        parent,
        depth,
        neighbors: adj,
        edge_assignment,
    })
}

/// One node per terminal (the shallowest bag containing it, ties by node id)
/// closed under pairwise lowest common ancestors. The closure adds fewer than
/// `k` branching nodes, so the result has at most `2k` nodes.
pub fn build_y_set(td: &TreeDecomposition, terminals: &[VertexId]) -> Result<BTreeSet<usize>> {
    let mut y = BTreeSet::new();
    for &t in terminals {
        let node = td
            .nodes()
            .filter(|&n| td.bag(n).contains(&t))
            .min_by_key(|&n| (td.depth(n), n))
            .ok_or_else(|| {
                Error::InvalidDecomposition(format!("terminal {t} is in no bag"))
            })?;
        y.insert(node);
    }
    loop {
        let current: Vec<usize> = y.iter().copied().collect();
        let mut added = false;
        for (i, &u) in current.iter().enumerate() {
            for &v in &current[i + 1..] {
                if y.insert(td.lca(u, v)) {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    if y.len() > 2 * terminals.len() {
        return Err(Error::Internal(
            "lowest-common-ancestor closure exceeded twice the terminal count".into(),
        ));
    }
    Ok(y)
}

/// Components of `T - Y` grouped by their neighborhood in `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPartition {
    pub y_set: BTreeSet<usize>,
    /// Disjoint node sets covering `V(T) - Y`, sorted by least node id.
    pub regions: Vec<BTreeSet<usize>>,
}

/// Groups the components of `T - Y` by identical neighborhoods in `Y`. Every
/// component of a lowest-common-ancestor-closed `Y` touches at most two of
/// its nodes, one an ancestor of the other; violations are rejected because
/// they certify `y` was not closed.
pub fn partition_regions(td: &TreeDecomposition, y: &BTreeSet<usize>) -> Result<RegionPartition> {
    for &n in y {
        if !td.has_node(n) {
            return Err(Error::InvalidSeparator(format!("unknown tree node {n}")));
        }
    }
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut grouped: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
    for start in td.nodes() {
        if y.contains(&start) || !seen.insert(start) {
            continue;
        }
        let mut comp = BTreeSet::from([start]);
        let mut boundary = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for m in td.neighbors(n) {
                if y.contains(&m) {
                    boundary.insert(m);
                } else if seen.insert(m) {
                    comp.insert(m);
                    queue.push_back(m);
                }
            }
        }
        let nb: Vec<usize> = boundary.iter().copied().collect();
        if nb.len() > 2 {
            return Err(Error::InvalidSeparator(format!(
                "a component touches {} boundary nodes; the node set is not closed under ancestors",
                nb.len()
            )));
        }
        if nb.len() == 2 && !(td.is_ancestor(nb[0], nb[1]) || td.is_ancestor(nb[1], nb[0])) {
            return Err(Error::InvalidSeparator(
                "a component's two boundary nodes are unrelated; the node set is not closed under ancestors"
                    .into(),
            ));
        }
        grouped.entry(nb).or_default().extend(comp);
    }
    let mut regions: Vec<BTreeSet<usize>> = grouped.into_values().collect();
    regions.sort_by_key(|r| *r.iter().next().unwrap());
    Ok(RegionPartition {
        y_set: y.clone(),
        regions,
    })
}

/// One region ready for sparsification: its tree nodes and its graph, whose
/// terminals are the vertices shared with the bags of `Y`.
#[derive(Debug, Clone)]
pub struct Region {
    pub nodes: BTreeSet<usize>,
    pub network: Network,
}

/// The full decomposition of the input into the `Y`-owned subgraph and the
/// per-region subgraphs. Region graphs are pairwise edge-disjoint and
/// edge-disjoint from the terminal part; together they partition the edges.
#[derive(Debug, Clone)]
pub struct ReductionPlan {
    pub y_set: BTreeSet<usize>,
    /// Subgraph on the union of `Y` bags, holding the edges assigned to `Y`
    /// nodes; its terminal list is that whole vertex set.
    pub terminal_part: Network,
    pub regions: Vec<Region>,
}

pub fn plan_reduction(net: &Network, td: &TreeDecomposition) -> Result<ReductionPlan> {
    let y = build_y_set(td, net.terminals())?;
    let partition = partition_regions(td, &y)?;

    let b_y: BTreeSet<VertexId> = y.iter().flat_map(|&n| td.bag(n).iter().copied()).collect();
    let mut terminal_part = Network::new(b_y.iter().copied(), b_y.iter().copied())?;
    for (&(u, v), &node) in td.edge_assignment() {
        if y.contains(&node) {
            terminal_part.add_edge(u, v, net.capacity(u, v))?;
        }
    }

    let mut regions = Vec::new();
    for nodes in &partition.regions {
        let b_r: BTreeSet<VertexId> = nodes
            .iter()
            .flat_map(|&n| td.bag(n).iter().copied())
            .collect();
        let terms: Vec<VertexId> = b_r.intersection(&b_y).copied().collect();
        let mut network = Network::new(b_r.iter().copied(), terms)?;
        for (&(u, v), &node) in td.edge_assignment() {
            if nodes.contains(&node) {
                network.add_edge(u, v, net.capacity(u, v))?;
            }
        }
        regions.push(Region {
            nodes: nodes.clone(),
            network,
        });
    }
    Ok(ReductionPlan {
        y_set: y,
        terminal_part,
        regions,
    })
}

/// Region sparsifier signature: must return a network containing the input's
/// terminal list as terminals.
pub trait RegionSparsifier {
    fn sparsify(&self, region: &Network) -> Result<Network>;
}

impl<F> RegionSparsifier for F
where
    F: Fn(&Network) -> Result<Network>,
{
    fn sparsify(&self, region: &Network) -> Result<Network> {
        self(region)
    }
}

/// Keeps every region verbatim; the reduction then reassembles the input.
pub fn identity_blackbox(region: &Network) -> Result<Network> {
    Ok(region.clone())
}

/// Exact contraction-based region sparsifier: computes the canonical minimum
/// cut for every proper nonempty terminal subset, records for each
/// non-terminal which side it lands on, and contracts vertices with identical
/// side patterns. Each recorded cut survives the contraction, so every
/// terminal min cut is preserved exactly.
pub fn mimicking_blackbox(region: &Network) -> Result<Network> {
    let k = region.k();
    if k == 0 {
        return Network::new([], []);
    }
    if k > MAX_MIMICKING_TERMINALS {
        return Err(Error::TooLarge(format!("{k} region terminals")));
    }
    let steiner = region.steiner_vertices();
    if steiner.is_empty() {
        return Ok(region.clone());
    }
    let mut patterns: BTreeMap<Vec<bool>, Vec<VertexId>> = BTreeMap::new();
    let masks: Vec<BTreeSet<VertexId>> = (1..(1usize << k) - 1)
        .map(|m| {
            region
                .terminals()
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, &t)| t)
                .collect()
        })
        .collect();
    let cuts: Vec<BTreeSet<VertexId>> = masks
        .iter()
        .map(|side| min_cut(region, side).map(|r| r.cut.side))
        .collect::<Result<_>>()?;
    for &s in &steiner {
        let pattern: Vec<bool> = cuts.iter().map(|side| side.contains(&s)).collect();
        patterns.entry(pattern).or_default().push(s);
    }
    let mut out = region.clone();
    for group in patterns.values() {
        for &w in &group[1..] {
            out = out.contract(group[0], w)?;
        }
    }
    Ok(out)
}

/// Quasi-bipartite contraction as a region black box; rejects regions whose
/// non-terminals are not independent.
pub fn cut_contraction_blackbox(region: &Network) -> Result<Network> {
    Ok(sparsify_cut_contraction(region)?.network)
}

/// Deliberately lossy black box for quality tests: multiplies every region
/// capacity by `factor`, making each region a quality-`factor` sparsifier of
/// itself, tight on every cut through region edges.
pub fn scaling_blackbox(factor: Rational) -> impl Fn(&Network) -> Result<Network> {
    move |region: &Network| {
        let mut out = Network::new(region.vertices(), region.terminals().iter().copied())?;
        for (u, v, c) in region.edges() {
            out.add_edge(u, v, c * &factor)?;
        }
        Ok(out)
    }
}

/// Sparsifies every region with `blackbox` and glues the results around the
/// `Y`-owned subgraph. Region non-terminals are renamed to fresh ids so
/// pieces cannot collide; the output keeps the input's terminal list.
pub fn reduce<S: RegionSparsifier>(
    net: &Network,
    td: &TreeDecomposition,
    blackbox: &S,
) -> Result<Network> {
    let plan = plan_reduction(net, td)?;
    let glue: Vec<VertexId> = plan.terminal_part.terminals().to_vec();
    let mut h = plan.terminal_part.clone();
    let mut next = net.max_vertex_id() + 1;
    for region in &plan.regions {
        let sparsified = blackbox.sparsify(&region.network)?;
        for &t in region.network.terminals() {
            if !sparsified.is_terminal(t) {
                return Err(Error::TerminalMismatch(format!(
                    "region sparsifier lost terminal {t}"
                )));
            }
        }
        let piece = sparsified.relabel_steiner_from(next);
        next = next.max(piece.max_vertex_id() + 1);
        h = Network::steiner_disjoint_union(&h, &piece, &glue)?;
    }
    h.with_terminals(net.terminals().iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mincut::verify_cut_sparsifier;
    use crate::rational::rat;

    fn build(vertices: &[u32], terminals: &[u32], edges: &[(u32, u32, i64)]) -> Network {
        let mut net = Network::new(vertices.iter().copied(), terminals.iter().copied()).unwrap();
        for &(u, v, c) in edges {
            net.add_edge(u, v, rat(c, 1)).unwrap();
        }
        net
    }

    fn raw_td(n: usize, bags: &[(usize, &[u32])], edges: &[(usize, usize)]) -> RawTreeDecomposition {
        RawTreeDecomposition {
            declared_vertices: n,
            bags: bags
                .iter()
                .map(|(id, vs)| (*id, vs.iter().copied().collect()))
                .collect(),
            edges: edges.to_vec(),
        }
    }

    /// Path 1-2-3-4 with bags {1,2}, {2,3}, {3,4}.
    fn path_instance() -> (Network, RawTreeDecomposition) {
        let net = build(
            &[1, 2, 3, 4],
            &[1, 4],
            &[(1, 2, 2), (2, 3, 1), (3, 4, 3)],
        );
        let raw = raw_td(4, &[(1, &[1, 2]), (2, &[2, 3]), (3, &[3, 4])], &[(1, 2), (2, 3)]);
        (net, raw)
    }

    #[test]
    fn parses_and_round_trips_pace_format() {
        let text = "c a comment\ns td 3 2 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\n1 2\n2 3\n";
        let td = parse_tree_decomposition(text).unwrap();
        assert_eq!(td.declared_vertices, 4);
        assert_eq!(td.bags.len(), 3);
        assert_eq!(td.bags[&2], [2, 3].into_iter().collect());
        assert_eq!(td.edges, vec![(1, 2), (2, 3)]);
        let again = parse_tree_decomposition(&format_tree_decomposition(&td)).unwrap();
        assert_eq!(td, again);
    }

    #[test]
    fn parser_rejects_malformed_input() {
        assert!(matches!(
            parse_tree_decomposition("b 1 2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_tree_decomposition(""),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_tree_decomposition("s td 2 1 2\nb 1 1\nb 4 2\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn normalization_rejects_non_trees_and_bad_coverage() {
        let net = build(&[1, 2, 3], &[1], &[(1, 2, 1), (2, 3, 1)]);
        // cycle
        let raw = raw_td(
            3,
            &[(1, &[1, 2]), (2, &[2, 3]), (3, &[1, 3])],
            &[(1, 2), (2, 3), (1, 3)],
        );
        assert!(matches!(
            normalize_decomposition(&net, &raw),
            Err(Error::InvalidDecomposition(_))
        ));
        // vertex 3 missing from all bags
        let raw = raw_td(3, &[(1, &[1, 2]), (2, &[2])], &[(1, 2)]);
        assert!(matches!(
            normalize_decomposition(&net, &raw),
            Err(Error::InvalidDecomposition(_))
        ));
        // edge (2,3) covered by no bag
        let raw = raw_td(3, &[(1, &[1, 2]), (2, &[3])], &[(1, 2)]);
        assert!(matches!(
            normalize_decomposition(&net, &raw),
            Err(Error::InvalidDecomposition(_))
        ));
        // bags holding vertex 1 are disconnected in the tree
        let raw = raw_td(
            3,
            &[(1, &[1, 2]), (2, &[2, 3]), (3, &[1, 3])],
            &[(1, 2), (2, 3)],
        );
        assert!(matches!(
            normalize_decomposition(&net, &raw),
            Err(Error::InvalidDecomposition(_))
        ));
    }

    #[test]
    fn normalization_merges_identical_bags() {
        let net = build(&[1, 2, 3], &[1], &[(1, 2, 1), (2, 3, 1)]);
        let raw = raw_td(
            3,
            &[(1, &[1, 2]), (2, &[1, 2]), (3, &[2, 3])],
            &[(1, 2), (2, 3)],
        );
        let td = normalize_decomposition(&net, &raw).unwrap();
        assert_eq!(td.node_count(), 2);
        assert_eq!(td.width(), 1);
        let bags: Vec<&BTreeSet<u32>> = td.nodes().map(|n| td.bag(n)).collect();
        assert!(bags.iter().all(|b| b.len() == 2));
    }

    #[test]
    fn edges_are_assigned_root_closest() {
        let net = build(&[1, 2, 3, 4], &[1], &[(1, 2, 1), (2, 3, 1), (3, 4, 1)]);
        let raw = raw_td(
            4,
            &[(1, &[1, 2]), (2, &[2, 3]), (3, &[2, 3, 4])],
            &[(1, 2), (2, 3)],
        );
        let td = normalize_decomposition(&net, &raw).unwrap();
        assert_eq!(td.root(), 1);
        // edge (2,3) sits in bags 2 and 3; node 2 is closer to the root
        assert_eq!(td.edge_assignment()[&(2, 3)], 2);
        assert_eq!(td.edge_assignment()[&(3, 4)], 3);
    }

    #[test]
    fn y_set_of_a_path_is_both_ends() {
        let (net, raw) = path_instance();
        let td = normalize_decomposition(&net, &raw).unwrap();
        let y = build_y_set(&td, net.terminals()).unwrap();
        assert_eq!(y, BTreeSet::from([1, 3]));
    }

    #[test]
    fn y_set_of_a_single_terminal_is_one_node() {
        let net = build(&[1, 2], &[2], &[(1, 2, 1)]);
        let raw = raw_td(2, &[(1, &[1, 2])], &[]);
        let td = normalize_decomposition(&net, &raw).unwrap();
        let y = build_y_set(&td, net.terminals()).unwrap();
        assert_eq!(y.len(), 1);
    }

    #[test]
    fn y_set_closes_under_ancestors_on_a_binary_tree() {
        // seven isolated vertices, one per bag of a complete binary tree
        let vertices: Vec<u32> = (1..=7).collect();
        let net = Network::new(vertices.iter().copied(), [4u32, 5, 6, 7]).unwrap();
        let raw = raw_td(
            7,
            &[
                (1, &[1]),
                (2, &[2]),
                (3, &[3]),
                (4, &[4]),
                (5, &[5]),
                (6, &[6]),
                (7, &[7]),
            ],
            &[(1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)],
        );
        let td = normalize_decomposition(&net, &raw).unwrap();
        let y = build_y_set(&td, net.terminals()).unwrap();
        assert_eq!(y, BTreeSet::from([1, 2, 3, 4, 5, 6, 7]));
        assert!(y.len() <= 2 * net.k());
    }

    #[test]
    fn single_neighborhood_components_fuse_into_one_region() {
        // star tree with the center in Y: all leaf components share the
        // neighborhood {1} and merge
        let net = Network::new([1u32, 2, 3, 4], [1u32]).unwrap();
        let raw = raw_td(
            4,
            &[(1, &[1]), (2, &[1, 2]), (3, &[1, 3]), (4, &[1, 4])],
            &[(1, 2), (1, 3), (1, 4)],
        );
        let td = normalize_decomposition(&net, &raw).unwrap();
        let partition = partition_regions(&td, &BTreeSet::from([1])).unwrap();
        assert_eq!(partition.regions, vec![BTreeSet::from([2, 3, 4])]);
    }

    #[test]
    fn full_node_set_leaves_no_regions() {
        let (net, raw) = path_instance();
        let td = normalize_decomposition(&net, &raw).unwrap();
        let all: BTreeSet<usize> = td.nodes().collect();
        let partition = partition_regions(&td, &all).unwrap();
        assert!(partition.regions.is_empty());
    }

    #[test]
    fn unclosed_node_sets_are_rejected() {
        // path tree 1-2-3 with Y = {1, 3} is fine; a three-pronged star with
        // Y = its three leaves leaves the center with three boundary nodes
        let net = Network::new([1u32, 2, 3, 4], [1u32]).unwrap();
        let raw = raw_td(
            4,
            &[(1, &[1]), (2, &[1, 2]), (3, &[1, 3]), (4, &[1, 4])],
            &[(1, 2), (1, 3), (1, 4)],
        );
        let td = normalize_decomposition(&net, &raw).unwrap();
        let err = partition_regions(&td, &BTreeSet::from([2, 3, 4])).unwrap_err();
        assert!(matches!(err, Error::InvalidSeparator(_)));
    }

    #[test]
    fn path_example_plans_one_region_with_two_boundary_vertices() {
        let (net, raw) = path_instance();
        let td = normalize_decomposition(&net, &raw).unwrap();
        let plan = plan_reduction(&net, &td).unwrap();
        assert_eq!(plan.y_set, BTreeSet::from([1, 3]));
        assert_eq!(plan.regions.len(), 1);
        let region = &plan.regions[0];
        assert_eq!(region.network.terminals(), &[2, 3]);
        // edge partition: the region owns (2,3), Y owns (1,2) and (3,4)
        assert_eq!(region.network.edge_count(), 1);
        assert_eq!(plan.terminal_part.edge_count(), 2);
        assert_eq!(
            region.network.edge_count() + plan.terminal_part.edge_count(),
            net.edge_count()
        );
    }

    #[test]
    fn identity_blackbox_reassembles_the_input() {
        let (net, raw) = path_instance();
        let td = normalize_decomposition(&net, &raw).unwrap();
        let h = reduce(&net, &td, &identity_blackbox).unwrap();
        assert_eq!(h, net);
    }

    #[test]
    fn mimicking_blackbox_merges_parallel_steiner_paths() {
        // terminals 1, 2; two equivalent length-2 paths through 3 and 4
        let region = build(
            &[1, 2, 3, 4],
            &[1, 2],
            &[(1, 3, 1), (3, 2, 1), (1, 4, 1), (4, 2, 1)],
        );
        let h = mimicking_blackbox(&region).unwrap();
        assert_eq!(h.vertex_count(), 3);
        let report = verify_cut_sparsifier(&region, &h, &rat(1, 1)).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn reduce_with_mimicking_blackbox_is_exact() {
        // path 1-2-3-4-5-6 with interior vertices 3, 4 in one region
        let net = build(
            &[1, 2, 3, 4, 5, 6],
            &[1, 6],
            &[(1, 2, 2), (2, 3, 5), (3, 4, 5), (4, 5, 1), (5, 6, 4)],
        );
        let raw = raw_td(
            6,
            &[
                (1, &[1, 2]),
                (2, &[2, 3]),
                (3, &[3, 4]),
                (4, &[4, 5]),
                (5, &[5, 6]),
            ],
            &[(1, 2), (2, 3), (3, 4), (4, 5)],
        );
        let td = normalize_decomposition(&net, &raw).unwrap();
        let h = reduce(&net, &td, &mimicking_blackbox).unwrap();
        assert!(h.vertex_count() < net.vertex_count());
        let report = verify_cut_sparsifier(&net, &h, &rat(1, 1)).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn scaling_blackbox_gives_exactly_quality_two() {
        let (net, raw) = path_instance();
        let td = normalize_decomposition(&net, &raw).unwrap();
        let h = reduce(&net, &td, &scaling_blackbox(rat(2, 1))).unwrap();
        assert!(!verify_cut_sparsifier(&net, &h, &rat(1, 1)).unwrap().passed());
        let report = verify_cut_sparsifier(&net, &h, &rat(2, 1)).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn blackbox_dropping_terminals_is_rejected() {
        let (net, raw) = path_instance();
        let td = normalize_decomposition(&net, &raw).unwrap();
        let broken = |_: &Network| Network::new([], []);
        let err = reduce(&net, &td, &broken).unwrap_err();
        assert!(matches!(err, Error::TerminalMismatch(_)));
    }

    #[test]
    fn quasi_bipartite_region_accepts_cut_contraction_blackbox() {
        // region of two proportional stars on terminals 1, 2
        let region = build(
            &[1, 2, 3, 4],
            &[1, 2],
            &[(1, 3, 1), (2, 3, 2), (1, 4, 2), (2, 4, 4)],
        );
        let h = cut_contraction_blackbox(&region).unwrap();
        assert_eq!(h.vertex_count(), 3);
        let dense = build(&[1, 2, 3, 4], &[1, 2], &[(1, 3, 1), (3, 4, 1), (4, 2, 1)]);
        assert!(matches!(
            cut_contraction_blackbox(&dense),
            Err(Error::NotQuasiBipartite { .. })
        ));
    }
}
