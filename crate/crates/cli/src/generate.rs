//! Seeded random instance generators.
//!
//! Every generator draws from a ChaCha stream seeded by the 64-bit seed in
//! `InstanceSpec` and samples in a fixed documented order, so equal specs
//! always produce the same network and sidecar files byte for byte. Small-support
//! mode additionally repeats one star/component shape verbatim, so
//! signature-based contraction always has something to merge.

use num::Zero;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use sparsekit::error::{Error, Result};
use sparsekit::flow::Demand;
use sparsekit::network::{Network, VertexId};
use sparsekit::rational::{rat, Rational};
use sparsekit::treewidth::RawTreeDecomposition;

/// Capacity distribution. Defaults keep numerators and denominators small so
/// exact arithmetic stays cheap while ties still occur.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distribution {
    /// `numer/denom` with `numer` uniform in `lo..=hi` and `denom` uniform
    /// in `1..=max_denominator`.
    UniformRational {
        lo: i64,
        hi: i64,
        max_denominator: i64,
    },
    /// Uniform pick from a fixed value set; the small menu forces repeated
    /// capacities and therefore signature collisions.
    SmallSupport(Vec<Rational>),
}

impl Distribution {
    pub fn default_uniform() -> Self {
        Distribution::UniformRational {
            lo: 1,
            hi: 64,
            max_denominator: 16,
        }
    }

    pub fn default_small_support() -> Self {
        Distribution::SmallSupport(vec![rat(1, 1), rat(2, 1), rat(1, 2)])
    }

    pub fn is_small_support(&self) -> bool {
        matches!(self, Distribution::SmallSupport(_))
    }

    fn validate(&self) -> Result<()> {
        match self {
            Distribution::UniformRational {
                lo,
                hi,
                max_denominator,
            } => {
                if *lo < 1 || hi < lo || *max_denominator < 1 {
                    return Err(Error::InvalidSpec(format!(
                        "uniform-rational({lo}, {hi}, {max_denominator}) cannot produce positive capacities"
                    )));
                }
            }
            Distribution::SmallSupport(values) => {
                if values.is_empty() || values.iter().any(|v| *v <= Rational::from_integer(0.into()))
                {
                    return Err(Error::InvalidSpec(
                        "small-support values must be positive and nonempty".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Rational {
        match self {
            Distribution::UniformRational {
                lo,
                hi,
                max_denominator,
            } => rat(rng.gen_range(*lo..=*hi), rng.gen_range(1..=*max_denominator)),
            Distribution::SmallSupport(values) => {
                values[rng.gen_range(0..values.len())].clone()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    QuasiBipartite,
    VertexCover,
    VertexIntegrity,
    BoundedTreewidth,
}

/// Reproducible instance description. `n` counts all vertices; `a`, `b`,
/// `w` are only read by the kinds that use them (cover surplus, separator
/// size and component bound, decomposition width).
#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub k: usize,
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub w: usize,
    pub distribution: Distribution,
    pub seed: u64,
}

/// Generated network plus whichever sidecar its kind promises.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub network: Network,
    pub cover: Option<Vec<VertexId>>,
    pub separator: Option<Vec<VertexId>>,
    pub decomposition: Option<RawTreeDecomposition>,
}

pub fn generate(spec: &InstanceSpec) -> Result<GeneratedInstance> {
    spec.distribution.validate()?;
    if spec.k < 1 || spec.k > 16 {
        return Err(Error::InvalidSpec(format!("k = {} outside 1..=16", spec.k)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        InstanceKind::QuasiBipartite => quasi_bipartite(spec, &mut rng),
        InstanceKind::VertexCover => vertex_cover(spec, &mut rng),
        InstanceKind::VertexIntegrity => vertex_integrity(spec, &mut rng),
        InstanceKind::BoundedTreewidth => bounded_treewidth(spec, &mut rng),
    }
}

fn terminal_mask(k: usize, rng: &mut ChaCha8Rng) -> u32 {
    rng.gen_range(1..(1u32 << k))
}

/// One star blueprint: which terminals it touches and with what capacity.
type StarShape = Vec<(usize, Rational)>;

/// Vertices incident to at least one edge. The network file format cannot
/// express an isolated non-terminal, so generators must not leave any vertex
/// a sidecar refers to without edges.
fn touched_vertices(net: &Network) -> std::collections::BTreeSet<VertexId> {
    let mut touched = std::collections::BTreeSet::new();
    for (u, v, _) in net.edges() {
        touched.insert(u);
        touched.insert(v);
    }
    touched
}

fn sample_star(k: usize, dist: &Distribution, rng: &mut ChaCha8Rng) -> StarShape {
    let mask = terminal_mask(k, rng);
    (0..k)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| (i, dist.sample(rng)))
        .collect()
}

fn add_terminal_clique_edges(
    net: &mut Network,
    terminals: &[VertexId],
    dist: &Distribution,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    for (i, &u) in terminals.iter().enumerate() {
        for &v in &terminals[i + 1..] {
            if rng.gen_bool(0.25) {
                net.add_edge(u, v, dist.sample(rng))?;
            }
        }
    }
    Ok(())
}

/// Terminals `1..=k`, every other vertex a terminal-leaved star, plus sparse
/// terminal-terminal edges. Small-support mode clones the first star onto
/// the last center.
fn quasi_bipartite(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Result<GeneratedInstance> {
    let (k, n) = (spec.k, spec.n);
    if n < k {
        return Err(Error::InvalidSpec(format!("n = {n} below k = {k}")));
    }
    let terminals: Vec<VertexId> = (1..=k as VertexId).collect();
    let mut net = Network::new(1..=n as VertexId, terminals.iter().copied())?;
    add_terminal_clique_edges(&mut net, &terminals, &spec.distribution, rng)?;
    let centers: Vec<VertexId> = (k as VertexId + 1..=n as VertexId).collect();
    let mut shapes: Vec<StarShape> = centers
        .iter()
        .map(|_| sample_star(k, &spec.distribution, rng))
        .collect();
    if spec.distribution.is_small_support() && shapes.len() >= 2 {
        let first = shapes[0].clone();
        *shapes.last_mut().unwrap() = first;
    }
    for (&center, shape) in centers.iter().zip(&shapes) {
        for (i, cap) in shape {
            net.add_edge(terminals[*i], center, cap.clone())?;
        }
    }
    Ok(GeneratedInstance {
        network: net,
        cover: None,
        separator: None,
        decomposition: None,
    })
}

/// Terminals `1..=k`, cover `1..=k+a` (sparse internal edges), all later
/// vertices independent with edges into the cover only. The sidecar lists
/// the cover.
fn vertex_cover(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Result<GeneratedInstance> {
    let (k, n, a) = (spec.k, spec.n, spec.a);
    let c = k + a;
    if n < c {
        return Err(Error::InvalidSpec(format!("n = {n} below cover size {c}")));
    }
    if c > 16 {
        return Err(Error::InvalidSpec(format!("cover size {c} above 16")));
    }
    let cover: Vec<VertexId> = (1..=c as VertexId).collect();
    let terminals: Vec<VertexId> = (1..=k as VertexId).collect();
    let mut net = Network::new(1..=n as VertexId, terminals.iter().copied())?;
    add_terminal_clique_edges(&mut net, &cover, &spec.distribution, rng)?;
    let independents: Vec<VertexId> = (c as VertexId + 1..=n as VertexId).collect();
    let mut shapes: Vec<StarShape> = independents
        .iter()
        .map(|_| sample_star(c, &spec.distribution, rng))
        .collect();
    if spec.distribution.is_small_support() && shapes.len() >= 2 {
        let first = shapes[0].clone();
        *shapes.last_mut().unwrap() = first;
    }
    for (&v, shape) in independents.iter().zip(&shapes) {
        for (i, cap) in shape {
            net.add_edge(cover[*i], v, cap.clone())?;
        }
    }
    // the sidecar names every cover vertex, so none may end up isolated and
    // vanish in the file round trip
    let touched = touched_vertices(&net);
    for v in k as VertexId + 1..=c as VertexId {
        if !touched.contains(&v) {
            net.add_edge(1, v, spec.distribution.sample(rng))?;
        }
    }
    Ok(GeneratedInstance {
        network: net,
        cover: Some(cover),
        separator: None,
        decomposition: None,
    })
}

/// Terminals `1..=k`, separator `k+1..=k+a`, the rest grouped into
/// components of size at most `b` whose edges stay inside the component or
/// go to the separator. The sidecar lists the separator.
fn vertex_integrity(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Result<GeneratedInstance> {
    let (k, n, a, b) = (spec.k, spec.n, spec.a, spec.b);
    if a < 1 || b < 1 {
        return Err(Error::InvalidSpec(format!("a = {a}, b = {b} must be positive")));
    }
    if n < k + a {
        return Err(Error::InvalidSpec(format!("n = {n} below k + a = {}", k + a)));
    }
    let terminals: Vec<VertexId> = (1..=k as VertexId).collect();
    let separator: Vec<VertexId> = (k as VertexId + 1..=(k + a) as VertexId).collect();
    let mut net = Network::new(1..=n as VertexId, terminals.iter().copied())?;
    add_terminal_clique_edges(&mut net, &terminals, &spec.distribution, rng)?;
    for &t in &terminals {
        for &x in &separator {
            if rng.gen_bool(0.5) {
                net.add_edge(t, x, spec.distribution.sample(rng))?;
            }
        }
    }

    // component blueprint: internal edge flags over index pairs, then one
    // separator star per member
    struct ComponentShape {
        size: usize,
        internal: Vec<(usize, usize)>,
        stars: Vec<StarShape>,
    }
    let mut remaining = n - k - a;
    let mut shapes: Vec<ComponentShape> = Vec::new();
    while remaining > 0 {
        let size = rng.gen_range(1..=b.min(remaining));
        let mut internal = Vec::new();
        for i in 0..size {
            for j in i + 1..size {
                if rng.gen_bool(0.5) {
                    internal.push((i, j));
                }
            }
        }
        let stars = (0..size)
            .map(|_| sample_star(a, &spec.distribution, rng))
            .collect();
        shapes.push(ComponentShape {
            size,
            internal,
            stars,
        });
        remaining -= size;
    }
    if spec.distribution.is_small_support() && shapes.len() >= 2 {
        let last = shapes.len() - 1;
        if shapes[0].size == shapes[last].size {
            shapes[last] = ComponentShape {
                size: shapes[0].size,
                internal: shapes[0].internal.clone(),
                stars: shapes[0].stars.iter().map(|s| s.to_vec()).collect(),
            };
        }
    }
    let mut next = (k + a) as VertexId + 1;
    for shape in &shapes {
        let members: Vec<VertexId> = (next..next + shape.size as VertexId).collect();
        next += shape.size as VertexId;
        for &(i, j) in &shape.internal {
            net.add_edge(members[i], members[j], spec.distribution.sample(rng))?;
        }
        for (member, star) in members.iter().zip(&shape.stars) {
            for (i, cap) in star {
                net.add_edge(separator[*i], *member, cap.clone())?;
            }
        }
    }
    // the sidecar names every separator vertex, so none may end up isolated
    // and vanish in the file round trip
    let touched = touched_vertices(&net);
    for &x in &separator {
        if !touched.contains(&x) {
            net.add_edge(1, x, spec.distribution.sample(rng))?;
        }
    }
    Ok(GeneratedInstance {
        network: net,
        cover: None,
        separator: Some(separator),
        decomposition: None,
    })
}

/// Builds the decomposition first: a root bag of the first `w + 1` vertices,
/// then one bag per further vertex obtained from a random earlier bag by
/// swapping one member for the fresh vertex. Network edges are drawn from
/// the pairs the bags cover, so the decomposition is valid by construction.
fn bounded_treewidth(spec: &InstanceSpec, rng: &mut ChaCha8Rng) -> Result<GeneratedInstance> {
    let (k, n, w) = (spec.k, spec.n, spec.w);
    if w < 1 {
        return Err(Error::InvalidSpec(format!("width {w} below 1")));
    }
    if n < w + 1 {
        return Err(Error::InvalidSpec(format!("n = {n} below w + 1 = {}", w + 1)));
    }
    if k > n {
        return Err(Error::InvalidSpec(format!("k = {k} above n = {n}")));
    }
    let bag_count = n - w;
    let mut bags: Vec<Vec<VertexId>> = vec![(1..=w as VertexId + 1).collect()];
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    let mut fresh = w as VertexId + 2;
    for i in 2..=bag_count {
        let parent = rng.gen_range(1..i);
        let mut bag = bags[parent - 1].clone();
        let drop = rng.gen_range(0..bag.len());
        bag.remove(drop);
        bag.push(fresh);
        bag.sort_unstable();
        fresh += 1;
        bags.push(bag);
        tree_edges.push((parent, i));
    }

    let terminals: Vec<VertexId> = {
        let mut picked: Vec<VertexId> = rand::seq::index::sample(rng, n, k)
            .into_iter()
            .map(|i| i as VertexId + 1)
            .collect();
        picked.sort_unstable();
        picked
    };
    let mut net = Network::new(1..=n as VertexId, terminals)?;
    let mut coverable: std::collections::BTreeSet<(VertexId, VertexId)> =
        std::collections::BTreeSet::new();
    for bag in &bags {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                coverable.insert((u, v));
            }
        }
    }
    for (u, v) in coverable {
        if rng.gen_bool(0.5) {
            net.add_edge(u, v, spec.distribution.sample(rng))?;
        }
    }
    // the decomposition names every vertex, so none may end up isolated and
    // vanish in the file round trip; every vertex shares a bag of size w + 1
    // with at least one other vertex
    let mut touched = touched_vertices(&net);
    for v in 1..=n as VertexId {
        if touched.contains(&v) {
            continue;
        }
        let bag = bags.iter().find(|bag| bag.contains(&v)).unwrap();
        let partner = *bag.iter().find(|&&u| u != v).unwrap();
        net.add_edge(v, partner, spec.distribution.sample(rng))?;
        touched.insert(v);
        touched.insert(partner);
    }
    let raw = RawTreeDecomposition {
        declared_vertices: n,
        bags: bags
            .into_iter()
            .enumerate()
            .map(|(i, bag)| (i + 1, bag.into_iter().collect()))
            .collect(),
        edges: tree_edges,
    };
    Ok(GeneratedInstance {
        network: net,
        cover: None,
        separator: None,
        decomposition: Some(raw),
    })
}

/// Uniform-support random demand with small rational values; always at
/// least one nonzero pair.
pub fn random_demand(k: usize, rng: &mut ChaCha8Rng) -> Result<Demand> {
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let support = rng.gen_range(1..=pairs.len());
    let mut chosen: Vec<(usize, usize)> = pairs
        .choose_multiple(rng, support)
        .copied()
        .collect();
    chosen.sort_unstable();
    let mut d = Demand::new(k);
    for (i, j) in chosen {
        d.add(i, j, rat(rng.gen_range(1..=8), rng.gen_range(1..=4)))?;
    }
    Ok(d)
}

/// Random demand routable in the star with capacity vector `c` (all
/// coordinates positive): raw pair values are scaled down until every
/// terminal load fits, with a random final slack so some runs saturate.
pub fn routable_star_demand(c: &[Rational], rng: &mut ChaCha8Rng) -> Result<Demand> {
    let k = c.len();
    let mut raw: Vec<((usize, usize), Rational)> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let v = rat(rng.gen_range(0..=4), rng.gen_range(1..=2));
            raw.push(((i, j), v));
        }
    }
    if raw.iter().all(|(_, v)| v.is_zero()) {
        raw[0].1 = rat(1, 1);
    }
    let mut loads = vec![Rational::from_integer(0.into()); k];
    for ((i, j), v) in &raw {
        loads[*i] += v;
        loads[*j] += v;
    }
    let mut worst = Rational::from_integer(1.into());
    for (load, cap) in loads.iter().zip(c) {
        if !load.is_zero() {
            let ratio = load / cap;
            if ratio > worst {
                worst = ratio;
            }
        }
    }
    let slack = rat(rng.gen_range(1..=4), 4);
    let scale = slack / worst;
    let mut d = Demand::new(k);
    for ((i, j), v) in raw {
        d.add(i, j, v * &scale)?;
    }
    Ok(d)
}

/// Positive capacity vector of length `k` from the distribution.
pub fn random_capacity_vector(
    k: usize,
    dist: &Distribution,
    rng: &mut ChaCha8Rng,
) -> Vec<Rational> {
    (0..k).map(|_| dist.sample(rng)).collect()
}

/// Whitespace-separated vertex list codec for cover/separator sidecars;
/// `#` starts a comment.
pub fn parse_vertex_list(text: &str) -> Result<Vec<VertexId>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        for tok in content.split_whitespace() {
            let v: VertexId = tok.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("bad vertex id {tok:?}"),
            })?;
            out.push(v);
        }
    }
    Ok(out)
}

pub fn format_vertex_list(vertices: &[VertexId]) -> String {
    let mut out = vertices
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use sparsekit::bipartite::decompose_quasi_bipartite;
    use sparsekit::extensions::split_by_separator;
    use sparsekit::io::format_network;
    use sparsekit::treewidth::{format_tree_decomposition, normalize_decomposition};

    fn spec(kind: InstanceKind, k: usize, n: usize) -> InstanceSpec {
        InstanceSpec {
            kind,
            k,
            n,
            a: 2,
            b: 2,
            w: 2,
            distribution: Distribution::default_uniform(),
            seed: 7,
        }
    }

    #[test]
    fn quasi_bipartite_instances_are_all_stars() {
        let spec = spec(InstanceKind::QuasiBipartite, 3, 50);
        let inst = generate(&spec).unwrap();
        assert!(inst.network.is_quasi_bipartite());
        let dec = decompose_quasi_bipartite(&inst.network).unwrap();
        assert_eq!(dec.star_part.len(), 47);
    }

    #[test]
    fn same_spec_yields_byte_identical_files() {
        for kind in [
            InstanceKind::QuasiBipartite,
            InstanceKind::VertexCover,
            InstanceKind::VertexIntegrity,
            InstanceKind::BoundedTreewidth,
        ] {
            let spec = spec(kind, 3, 14);
            let one = generate(&spec).unwrap();
            let two = generate(&spec).unwrap();
            assert_eq!(format_network(&one.network), format_network(&two.network));
            assert_eq!(one.cover, two.cover);
            assert_eq!(one.separator, two.separator);
            match (&one.decomposition, &two.decomposition) {
                (Some(a), Some(b)) => {
                    assert_eq!(format_tree_decomposition(a), format_tree_decomposition(b))
                }
                (None, None) => {}
                _ => panic!("sidecar mismatch"),
            }
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = spec(InstanceKind::QuasiBipartite, 3, 20);
        let mut b = spec(InstanceKind::QuasiBipartite, 3, 20);
        a.seed = 1;
        b.seed = 2;
        let one = generate(&a).unwrap();
        let two = generate(&b).unwrap();
        assert_ne!(format_network(&one.network), format_network(&two.network));
    }

    #[test]
    fn cover_sidecar_is_a_vertex_cover() {
        let spec = spec(InstanceKind::VertexCover, 3, 12);
        let inst = generate(&spec).unwrap();
        let cover: std::collections::BTreeSet<_> =
            inst.cover.unwrap().into_iter().collect();
        for (u, v, _) in inst.network.edges() {
            assert!(cover.contains(&u) || cover.contains(&v));
        }
    }

    #[test]
    fn integrity_components_respect_the_bound() {
        let spec = spec(InstanceKind::VertexIntegrity, 3, 13);
        let inst = generate(&spec).unwrap();
        let separator: std::collections::BTreeSet<_> =
            inst.separator.unwrap().into_iter().collect();
        let split = split_by_separator(&inst.network, &separator, spec.b).unwrap();
        for comp in &split.components {
            assert!(comp.vertices.len() <= spec.b);
        }
    }

    #[test]
    fn treewidth_sidecar_validates_at_the_declared_width() {
        let spec = spec(InstanceKind::BoundedTreewidth, 3, 12);
        let inst = generate(&spec).unwrap();
        let raw = inst.decomposition.unwrap();
        let td = normalize_decomposition(&inst.network, &raw).unwrap();
        assert!(td.width() <= spec.w);
    }

    #[test]
    fn small_support_repeats_a_star_shape() {
        let mut sp = spec(InstanceKind::QuasiBipartite, 3, 20);
        sp.distribution = Distribution::default_small_support();
        let inst = generate(&sp).unwrap();
        let dec = decompose_quasi_bipartite(&inst.network).unwrap();
        let first = &dec.star_part.first().unwrap().1;
        let last = &dec.star_part.last().unwrap().1;
        assert_eq!(first, last);
    }

    #[test]
    fn routable_star_demands_fit_the_star() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let c = random_capacity_vector(4, &Distribution::default_uniform(), &mut rng);
            let d = routable_star_demand(&c, &mut rng).unwrap();
            assert!(sparsekit::flow::routable_in_star(&c, &d).unwrap());
        }
    }

    #[test]
    fn vertex_list_codec_round_trips() {
        let list = vec![3, 1, 9];
        let parsed = parse_vertex_list(&format_vertex_list(&list)).unwrap();
        assert_eq!(parsed, list);
        assert!(parse_vertex_list("1 x 3").is_err());
    }

    #[test]
    fn file_round_trip_preserves_every_vertex() {
        for kind in [
            InstanceKind::QuasiBipartite,
            InstanceKind::VertexCover,
            InstanceKind::VertexIntegrity,
            InstanceKind::BoundedTreewidth,
        ] {
            for seed in 0..20 {
                let mut sp = spec(kind, 3, 12);
                sp.seed = seed;
                let inst = generate(&sp).unwrap();
                let parsed =
                    sparsekit::io::parse_network(&format_network(&inst.network)).unwrap();
                assert_eq!(
                    parsed.vertex_count(),
                    inst.network.vertex_count(),
                    "{kind:?} seed {seed} lost an isolated vertex"
                );
            }
        }
    }

    #[test]
    fn inconsistent_parameters_are_rejected() {
        let mut sp = spec(InstanceKind::VertexIntegrity, 3, 4);
        assert!(matches!(generate(&sp), Err(Error::InvalidSpec(_))));
        sp.n = 20;
        sp.b = 0;
        assert!(matches!(generate(&sp), Err(Error::InvalidSpec(_))));
    }
}
