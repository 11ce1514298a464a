//! Sparsifiers for two structured network classes beyond the quasi-bipartite
//! case: networks covered by a small vertex set, and networks where removing
//! a small separator leaves only constant-size non-terminal components.
//!
//! Both constructions split the input into a part kept verbatim and a part
//! rebuilt from contracted pieces:
//! - vertex cover: the subgraph on terminals plus the cover stays; everything
//!   hanging off the cover forms a quasi-bipartite network with the cover as
//!   its terminal set and is contracted by signature classes.
//! - separator: components of `G - X` without terminals are grouped by a
//!   relabeling-invariant table of cut comparisons and merged vertex-wise
//!   within each group.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use num::{One, Zero};

use crate::bipartite::{sparsify_cut_contraction, sparsify_flow_contraction};
use crate::error::{Error, Result};
use crate::mincut::check_pairwise_merge_precondition;
use crate::network::{Network, VertexId};
use crate::rational::Rational;
use crate::rays::{decompose_in_cone, ConicDecomposition, DecompositionTerm, Ray, TightConstraint};
use crate::signature::validate_capacity_vector;

/// Largest component size `b` for which canonicalization enumerates all `b!`
/// vertex relabelings.
pub const MAX_CANONICAL_COMPONENT: usize = 4;
/// Bound on `b * (a + b)^2` accepted by [`component_conic_decompose`]; the
/// constraint pool and the basis search grow too fast beyond it.
pub const MAX_COMPONENT_DECOMP: usize = 18;
/// Signature tables hold `2^(a + 2b)` comparison bits per component.
const MAX_SIGNATURE_EXPONENT: usize = 20;
/// Above this many separator-side vertices the min-cut replay of each class
/// merge is skipped; it enumerates all terminal bipartitions per merge.
const MERGE_CHECK_VERTEX_LIMIT: usize = 14;

/// Which signature the star contraction buckets by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractionKind {
    /// Weak signatures; preserves all minimum terminal cuts exactly.
    Cut,
    /// Strong signatures; preserves simultaneous flow feasibility exactly.
    Flow,
}

/// Deterministic 2-approximate vertex cover: scan edges in id order and take
/// both endpoints of any edge not yet covered. Convenience for callers that
/// do not know a cover; the sparsifier quality never depends on cover size,
/// only the output size does.
pub fn greedy_vertex_cover(net: &Network) -> BTreeSet<VertexId> {
    let mut cover = BTreeSet::new();
    for (u, v, _) in net.edges() {
        if !cover.contains(&u) && !cover.contains(&v) {
            cover.insert(u);
            cover.insert(v);
        }
    }
    cover
}

/// Exact sparsifier for a network with vertex cover `X`: the subgraph induced
/// by terminals and `X` is kept as is, while the quasi-bipartite remainder
/// (every other vertex is a star on `X`) is contracted by signature. The
/// output has at most `|K| + |X| + #classes` vertices and the original
/// terminal list.
pub fn sparsify_vertex_cover(
    net: &Network,
    cover: &BTreeSet<VertexId>,
    kind: ContractionKind,
) -> Result<Network> {
    for &x in cover {
        if !net.contains_vertex(x) {
            return Err(Error::UnknownVertex(x));
        }
    }
    for (u, v, _) in net.edges() {
        if !cover.contains(&u) && !cover.contains(&v) {
            return Err(Error::NotVertexCover { u, v });
        }
    }
    let terminals = net.terminals().to_vec();
    let term_set: BTreeSet<VertexId> = terminals.iter().copied().collect();

    let keep_k: BTreeSet<VertexId> = term_set.union(cover).copied().collect();
    let g_k = net.induced(&keep_k);

    // the other side gets every non-terminal plus the cover; cover-internal
    // edges stay on the kept side so the union does not double them
    let mut keep_s: BTreeSet<VertexId> =
        net.vertices().filter(|v| !term_set.contains(v)).collect();
    keep_s.extend(cover.iter().copied());
    let g_s = net
        .induced(&keep_s)
        .without_edges_within(cover)
        .with_terminals(cover.iter().copied())?;

    let contracted = match kind {
        ContractionKind::Cut => sparsify_cut_contraction(&g_s)?,
        ContractionKind::Flow => sparsify_flow_contraction(&g_s)?,
    };
    let h_s = contracted
        .network
        .relabel_steiner_from(net.max_vertex_id() + 1);

    let mut union_terminals = terminals.clone();
    union_terminals.extend(cover.iter().copied().filter(|x| !term_set.contains(x)));
    let merged = Network::steiner_disjoint_union(&g_k, &h_s, &union_terminals)?;
    merged.with_terminals(terminals)
}

/// Number of capacity coordinates of one component: `a * b` edges into the
/// separator plus `b * (b - 1) / 2` internal edges.
pub fn component_dim(a: usize, b: usize) -> usize {
    a * b + b * (b - 1) / 2
}

/// Coordinate of the edge between component vertex `i` and separator vertex
/// `j`; separator edges come first, row by row.
fn sep_coord(a: usize, i: usize, j: usize) -> usize {
    i * a + j
}

/// Coordinate of the internal edge between component vertices `i < j`.
fn int_coord(a: usize, b: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < b);
    a * b + i * b - i * (i + 1) / 2 + (j - i - 1)
}

fn validate_component_vector(c: &[Rational], a: usize, b: usize) -> Result<()> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidSeparator(
            "component coordinates need a separator vertex and a component vertex".into(),
        ));
    }
    if a + 2 * b > MAX_SIGNATURE_EXPONENT {
        return Err(Error::TooLarge(format!(
            "signature table needs 2^{} comparison bits",
            a + 2 * b
        )));
    }
    if c.len() != component_dim(a, b) {
        return Err(Error::DimensionMismatch {
            expected: component_dim(a, b),
            got: c.len(),
        });
    }
    validate_capacity_vector(c)
}

/// 0/1 vector marking the coordinates cut by the side `A ∪ B`, where `am`
/// masks separator vertices and `bm` masks component vertices.
fn crossing_vector(a: usize, b: usize, am: usize, bm: usize) -> Vec<Rational> {
    let mut f = vec![Rational::zero(); component_dim(a, b)];
    for i in 0..b {
        for j in 0..a {
            if (bm >> i & 1) != (am >> j & 1) {
                f[sep_coord(a, i, j)] = Rational::one();
            }
        }
    }
    for i in 0..b {
        for j in (i + 1)..b {
            if (bm >> i & 1) != (bm >> j & 1) {
                f[int_coord(a, b, i, j)] = Rational::one();
            }
        }
    }
    f
}

/// Cut values of every side `A ∪ B`, indexed by `(am << b) | bm`.
fn component_cuts(c: &[Rational], a: usize, b: usize) -> Vec<Rational> {
    let mut cuts = vec![Rational::zero(); 1usize << (a + b)];
    for am in 0..1usize << a {
        for bm in 0..1usize << b {
            let mut total = Rational::zero();
            for i in 0..b {
                for j in 0..a {
                    if (bm >> i & 1) != (am >> j & 1) {
                        total += &c[sep_coord(a, i, j)];
                    }
                }
            }
            for i in 0..b {
                for j in (i + 1)..b {
                    if (bm >> i & 1) != (bm >> j & 1) {
                        total += &c[int_coord(a, b, i, j)];
                    }
                }
            }
            cuts[(am << b) | bm] = total;
        }
    }
    cuts
}

/// Full table of cut comparisons of one component: for every separator mask
/// `A` and every ordered pair of component masks `(B, B')`, one bit recording
/// whether `cut(A ∪ B) <= cut(A ∪ B')`. Components with equal tables can be
/// merged vertex-wise without changing any terminal min cut.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentSignature {
    a: usize,
    b: usize,
    bits: Vec<u64>,
}

impl ComponentSignature {
    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// The recorded comparison `cut(A ∪ B) <= cut(A ∪ B')`.
    pub fn holds(&self, am: usize, bm: usize, bm2: usize) -> bool {
        let idx = (((am << self.b) | bm) << self.b) | bm2;
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// True when every comparison `other` satisfies also holds here. A
    /// decomposition term is admissible for a source exactly when the term's
    /// signature refines the source's.
    pub fn refines(&self, other: &ComponentSignature) -> bool {
        self.a == other.a
            && self.b == other.b
            && self.bits.iter().zip(&other.bits).all(|(s, o)| s & o == *o)
    }
}

pub fn component_signature(c: &[Rational], a: usize, b: usize) -> Result<ComponentSignature> {
    validate_component_vector(c, a, b)?;
    let cuts = component_cuts(c, a, b);
    let relations = 1usize << (a + 2 * b);
    let mut bits = vec![0u64; (relations + 63) / 64];
    let mut idx = 0usize;
    for am in 0..1usize << a {
        for bm in 0..1usize << b {
            for bm2 in 0..1usize << b {
                if cuts[(am << b) | bm] <= cuts[(am << b) | bm2] {
                    bits[idx / 64] |= 1 << (idx % 64);
                }
                idx += 1;
            }
        }
    }
    Ok(ComponentSignature { a, b, bits })
}

/// Reindexes component vertices so that new position `i` holds what was at
/// position `perm[i]`.
fn permute_component_vector(c: &[Rational], a: usize, b: usize, perm: &[usize]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); c.len()];
    for i in 0..b {
        for j in 0..a {
            out[sep_coord(a, i, j)] = c[sep_coord(a, perm[i], j)].clone();
        }
    }
    for i in 0..b {
        for j in (i + 1)..b {
            let (p, q) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
            out[int_coord(a, b, i, j)] = c[int_coord(a, b, p, q)].clone();
        }
    }
    out
}

/// Least (signature, vector) pair over all `b!` relabelings of the component
/// vertices, plus the permutation that realizes it. Components equal up to
/// relabeling map to one representative, and equal canonical signatures align
/// the vertex positions that the merge pairs up.
pub fn canonical_component_vector(
    c: &[Rational],
    a: usize,
    b: usize,
) -> Result<(ComponentSignature, Vec<Rational>, Vec<usize>)> {
    validate_component_vector(c, a, b)?;
    if b > MAX_CANONICAL_COMPONENT {
        return Err(Error::TooLarge(format!(
            "canonicalization enumerates {b}! relabelings, bound is {MAX_CANONICAL_COMPONENT}"
        )));
    }
    let mut best: Option<(ComponentSignature, Vec<Rational>, Vec<usize>)> = None;
    for perm in (0..b).permutations(b) {
        let pc = permute_component_vector(c, a, b, &perm);
        let sig = component_signature(&pc, a, b)?;
        let better = match &best {
            None => true,
            Some((bs, bv, _)) => (&sig, &pc) < (&bs, &bv),
        };
        if better {
            best = Some((sig, pc, perm));
        }
    }
    Ok(best.expect("identity permutation always exists"))
}

/// One terminal-free component of `G - X` in separator-relative coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorComponent {
    /// Component vertices in ascending id order; fewer than `b` entries mean
    /// the remaining coordinate rows are zero padding.
    pub vertices: Vec<VertexId>,
    /// Capacities over `component_dim(a, b)` coordinates.
    pub vector: Vec<Rational>,
}

/// A network split along a separator `X`: the subgraph on `X`, the terminals
/// and every component containing a terminal stays a network; each
/// terminal-free component becomes a capacity vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorSplit {
    /// Induced subgraph on `X`, all terminals, and their components,
    /// including the edges internal to `X`.
    pub terminal_part: Network,
    /// Separator in ascending order; coordinate columns follow this order.
    pub separator: Vec<VertexId>,
    /// Padded component size `b`.
    pub bound: usize,
    /// Terminal-free components in ascending order of their least vertex.
    /// Components with no edges at all are dropped.
    pub components: Vec<SeparatorComponent>,
}

/// Splits `net` along `separator`. Terminal-free components larger than
/// `bound` are rejected; components containing a terminal pass through to the
/// terminal part whatever their size.
pub fn split_by_separator(
    net: &Network,
    separator: &BTreeSet<VertexId>,
    bound: usize,
) -> Result<SeparatorSplit> {
    if separator.is_empty() {
        return Err(Error::InvalidSeparator("separator is empty".into()));
    }
    if bound == 0 {
        return Err(Error::InvalidSeparator("component bound is zero".into()));
    }
    for &x in separator {
        if !net.contains_vertex(x) {
            return Err(Error::UnknownVertex(x));
        }
    }
    let sep_list: Vec<VertexId> = separator.iter().copied().collect();
    let a = sep_list.len();

    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (u, v, _) in net.edges() {
        if !separator.contains(&u) && !separator.contains(&v) {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
    }

    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    let mut terminal_side: BTreeSet<VertexId> = separator.clone();
    let mut components = Vec::new();
    for start in net.vertices() {
        if separator.contains(&start) || !seen.insert(start) {
            continue;
        }
        let mut comp = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in adj.get(&v).into_iter().flatten() {
                if seen.insert(w) {
                    comp.insert(w);
                    queue.push_back(w);
                }
            }
        }
        let verts: Vec<VertexId> = comp.iter().copied().collect();
        if verts.iter().any(|&v| net.is_terminal(v)) {
            terminal_side.extend(verts);
            continue;
        }
        if verts.len() > bound {
            return Err(Error::ComponentTooLarge {
                size: verts.len(),
                bound,
            });
        }
        let mut vector = vec![Rational::zero(); component_dim(a, bound)];
        for (i, &v) in verts.iter().enumerate() {
            for (j, &x) in sep_list.iter().enumerate() {
                vector[sep_coord(a, i, j)] = net.capacity(v, x);
            }
            for (j, &w) in verts.iter().enumerate().skip(i + 1) {
                vector[int_coord(a, bound, i, j)] = net.capacity(v, w);
            }
        }
        if vector.iter().all(Zero::is_zero) {
            continue;
        }
        components.push(SeparatorComponent {
            vertices: verts,
            vector,
        });
    }

    let terminal_part = net.induced(&terminal_side);
    Ok(SeparatorSplit {
        terminal_part,
        separator: sep_list,
        bound,
        components,
    })
}

/// Sparsifier produced by merging equal-signature components.
#[derive(Debug, Clone)]
pub struct IntegrityResult {
    pub network: Network,
    /// One entry per signature class: the merged components, each named by
    /// its least original vertex id, in input order.
    pub groups: Vec<Vec<VertexId>>,
}

struct Bucket {
    members: Vec<usize>,
    sum: Vec<Rational>,
}

/// The separator-side network: `X` as terminals plus every terminal-free
/// component, without the edges internal to `X` (those stay on the terminal
/// side of the split).
fn separator_side_network(net: &Network, split: &SeparatorSplit) -> Result<Network> {
    let x: BTreeSet<VertexId> = split.separator.iter().copied().collect();
    let mut keep = x.clone();
    for comp in &split.components {
        keep.extend(comp.vertices.iter().copied());
    }
    net.induced(&keep)
        .without_edges_within(&x)
        .with_terminals(split.separator.iter().copied())
}

fn canonical_position_vertex(
    comp: &SeparatorComponent,
    perm: &[usize],
    pos: usize,
) -> Option<VertexId> {
    comp.vertices.get(perm[pos]).copied()
}

/// Replays each class merge on the separator-side network and checks that
/// gluing the paired vertices moves no terminal min cut. Equal canonical
/// signatures guarantee this, so a failure means the signature table or the
/// canonicalization is wrong, not the input.
fn replay_merge_soundness(
    net: &Network,
    split: &SeparatorSplit,
    buckets: &BTreeMap<ComponentSignature, Bucket>,
    canon: &[(ComponentSignature, Vec<Rational>, Vec<usize>)],
) -> Result<()> {
    let g_s = separator_side_network(net, split)?;
    if g_s.vertex_count() > MERGE_CHECK_VERTEX_LIMIT {
        return Ok(());
    }
    let b = split.bound;
    let mut working = g_s;
    for bucket in buckets.values() {
        if bucket.members.len() < 2 {
            continue;
        }
        let first = bucket.members[0];
        let mut acc: Vec<Option<VertexId>> = (0..b)
            .map(|i| canonical_position_vertex(&split.components[first], &canon[first].2, i))
            .collect();
        for &next in &bucket.members[1..] {
            let incoming: Vec<Option<VertexId>> = (0..b)
                .map(|i| canonical_position_vertex(&split.components[next], &canon[next].2, i))
                .collect();
            let pairs: Vec<(VertexId, VertexId)> = (0..b)
                .filter_map(|i| acc[i].zip(incoming[i]))
                .collect();
            if !pairs.is_empty() {
                if !check_pairwise_merge_precondition(&working, &pairs)? {
                    return Err(Error::Internal(
                        "signature-equal components failed the pairing min-cut check".into(),
                    ));
                }
                for &(v, w) in &pairs {
                    working = working.contract(v, w)?;
                }
            }
            for i in 0..b {
                if acc[i].is_none() {
                    acc[i] = incoming[i];
                }
            }
        }
    }
    Ok(())
}

/// Exact sparsifier for a network whose non-terminal side falls apart into
/// components of at most `bound` vertices once `separator` is removed.
/// Terminal-free components are grouped by canonical signature; each group is
/// replaced by one component carrying the coordinate-wise sum of the group's
/// canonical vectors. Everything else is kept verbatim.
pub fn sparsify_vertex_integrity(
    net: &Network,
    separator: &BTreeSet<VertexId>,
    bound: usize,
) -> Result<IntegrityResult> {
    let split = split_by_separator(net, separator, bound)?;
    let a = split.separator.len();
    let b = split.bound;

    let mut canon = Vec::new();
    for comp in &split.components {
        canon.push(canonical_component_vector(&comp.vector, a, b)?);
    }
    let mut buckets: BTreeMap<ComponentSignature, Bucket> = BTreeMap::new();
    for (idx, (sig, vec, _)) in canon.iter().enumerate() {
        let entry = buckets.entry(sig.clone()).or_insert_with(|| Bucket {
            members: Vec::new(),
            sum: vec![Rational::zero(); component_dim(a, b)],
        });
        entry.members.push(idx);
        for (s, v) in entry.sum.iter_mut().zip(vec) {
            *s += v;
        }
    }

    replay_merge_soundness(net, &split, &buckets, &canon)?;

    let mut h_s = Network::new(
        split.separator.iter().copied(),
        split.separator.iter().copied(),
    )?;
    let mut next = net.max_vertex_id() + 1;
    let mut groups = Vec::new();
    for bucket in buckets.values() {
        let sum = &bucket.sum;
        let mut pos: Vec<Option<VertexId>> = vec![None; b];
        for i in 0..b {
            let live = (0..a).any(|j| !sum[sep_coord(a, i, j)].is_zero())
                || (0..b)
                    .filter(|&j| j != i)
                    .any(|j| !sum[int_coord(a, b, i.min(j), i.max(j))].is_zero());
            if live {
                h_s.add_vertex(next);
                pos[i] = Some(next);
                next += 1;
            }
        }
        for i in 0..b {
            let Some(v) = pos[i] else { continue };
            for (j, &x) in split.separator.iter().enumerate() {
                h_s.add_edge(v, x, sum[sep_coord(a, i, j)].clone())?;
            }
            for j in (i + 1)..b {
                if let Some(w) = pos[j] {
                    h_s.add_edge(v, w, sum[int_coord(a, b, i, j)].clone())?;
                }
            }
        }
        groups.push(
            bucket
                .members
                .iter()
                .map(|&m| split.components[m].vertices[0])
                .collect(),
        );
    }

    let terminals = net.terminals().to_vec();
    let term_set: BTreeSet<VertexId> = terminals.iter().copied().collect();
    let mut union_terminals = terminals.clone();
    union_terminals.extend(
        split
            .separator
            .iter()
            .copied()
            .filter(|x| !term_set.contains(x)),
    );
    let merged = Network::steiner_disjoint_union(&split.terminal_part, &h_s, &union_terminals)?;
    let network = merged.with_terminals(terminals)?;
    Ok(IntegrityResult { network, groups })
}

/// Decomposes a component vector into weighted vectors that each satisfy
/// every cut comparison the source satisfies, summing back exactly. The cone
/// cut out by those comparisons (plus nonnegativity) contains the source in
/// its interior face, so at most `component_dim(a, b)` terms appear.
pub fn component_conic_decompose(
    c: &[Rational],
    a: usize,
    b: usize,
) -> Result<ConicDecomposition> {
    validate_component_vector(c, a, b)?;
    let size = b * (a + b) * (a + b);
    if size > MAX_COMPONENT_DECOMP {
        return Err(Error::TooLarge(format!(
            "decomposition size b*(a+b)^2 = {size} exceeds {MAX_COMPONENT_DECOMP}"
        )));
    }
    let dim = component_dim(a, b);
    let cuts = component_cuts(c, a, b);

    let mut rows: Vec<(Vec<Rational>, TightConstraint)> = Vec::new();
    let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for i in 0..dim {
        let mut f = vec![Rational::zero(); dim];
        f[i] = Rational::one();
        seen.insert(f.clone());
        rows.push((f, TightConstraint::CoordZero(i)));
    }
    let mut triple = 0usize;
    for am in 0..1usize << a {
        for bm in 0..1usize << b {
            for bm2 in 0..1usize << b {
                let idx = triple;
                triple += 1;
                if cuts[(am << b) | bm] > cuts[(am << b) | bm2] {
                    continue;
                }
                let hi = crossing_vector(a, b, am, bm2);
                let lo = crossing_vector(a, b, am, bm);
                let f: Vec<Rational> = hi.iter().zip(&lo).map(|(h, l)| h - l).collect();
                if f.iter().all(Zero::is_zero) {
                    continue;
                }
                if seen.insert(f.clone()) {
                    rows.push((f, TightConstraint::CutRelation(idx)));
                }
            }
        }
    }

    let raw = decompose_in_cone(dim, &rows, c)?;
    let mut terms = Vec::new();
    for (weight, coords, tight_idx) in raw {
        let mut tight: Vec<TightConstraint> = tight_idx.into_iter().map(|i| rows[i].1).collect();
        tight.sort();
        tight.dedup();
        terms.push(DecompositionTerm {
            weight,
            ray: Ray { coords, tight },
        });
    }
    let dec = ConicDecomposition { k: dim, terms };

    // agreement holds by construction; verify anyway, the tables are tiny
    let sig = component_signature(c, a, b)?;
    for t in &dec.terms {
        if !component_signature(&t.ray.coords, a, b)?.refines(&sig) {
            return Err(Error::Internal(
                "decomposition term violates a source cut comparison".into(),
            ));
        }
    }
    if dec.reconstruct() != c {
        return Err(Error::Internal("decomposition does not reconstruct".into()));
    }
    Ok(dec)
}
