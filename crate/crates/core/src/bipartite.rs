//! Contraction sparsifiers for quasi-bipartite networks.
//!
//! A quasi-bipartite network splits into its terminal-induced subgraph and a
//! collection of stars, one per non-terminal. Stars whose capacity vectors
//! have the same cut signature can be merged by summing the vectors without
//! changing any terminal cut; merging by the finer strong signature also
//! preserves every multicommodity flow value. Both sparsifiers bucket the
//! stars by signature, contract each bucket to a single fresh center, and
//! reattach the terminal-terminal edges untouched.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::{Error, Result};
use crate::network::{Network, VertexId};
use crate::rational::Rational;
use crate::signature::{cut_signature, strong_signature, CapacityVector};

/// Largest terminal count accepted by the cut contraction (2^k subset sums).
pub const MAX_CUT_CONTRACTION_TERMINALS: usize = 16;
/// Largest terminal count accepted by the flow contraction (~3^k/2 sign pairs).
pub const MAX_FLOW_CONTRACTION_TERMINALS: usize = 9;

/// A quasi-bipartite network viewed as its terminal subgraph plus stars.
///
/// `star_part` lists every non-terminal with its capacity vector in
/// `terminal_part.terminals()` order, including all-zero vectors for isolated
/// non-terminals, so the Steiner-disjoint union of `terminal_part` and the
/// stars reconstructs the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiBipartiteDecomposition {
    pub terminal_part: Network,
    pub star_part: Vec<(VertexId, CapacityVector)>,
}

pub fn decompose_quasi_bipartite(net: &Network) -> Result<QuasiBipartiteDecomposition> {
    if let Some((u, v)) = net.quasi_bipartite_violation() {
        return Err(Error::NotQuasiBipartite { u, v });
    }
    let terminals = net.terminals().to_vec();
    let mut terminal_part = Network::new(terminals.iter().copied(), terminals.iter().copied())?;
    for (u, v, c) in net.edges() {
        if net.is_terminal(u) && net.is_terminal(v) {
            terminal_part.add_edge(u, v, c.clone())?;
        }
    }
    let star_part = net
        .steiner_vertices()
        .into_iter()
        .map(|s| (s, terminals.iter().map(|&t| net.capacity(s, t)).collect()))
        .collect();
    Ok(QuasiBipartiteDecomposition {
        terminal_part,
        star_part,
    })
}

/// A contracted network together with the bucket membership that produced it.
///
/// `groups` maps each fresh center in `network` to the original centers it
/// absorbed, sorted by fresh center id; centers of all-zero stars appear in
/// no group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionResult {
    pub network: Network,
    pub groups: Vec<(VertexId, Vec<VertexId>)>,
}

fn contract_by<K: Ord>(
    net: &Network,
    classify: impl Fn(&[Rational]) -> Result<K>,
) -> Result<ContractionResult> {
    let dec = decompose_quasi_bipartite(net)?;
    let k = net.k();
    let mut buckets: BTreeMap<K, (Vec<VertexId>, CapacityVector)> = BTreeMap::new();
    for (center, coords) in &dec.star_part {
        if coords.iter().all(Rational::is_zero) {
            continue;
        }
        let entry = buckets
            .entry(classify(coords)?)
            .or_insert_with(|| (Vec::new(), vec![Rational::zero(); k]));
        entry.0.push(*center);
        for (slot, c) in entry.1.iter_mut().zip(coords) {
            *slot += c;
        }
    }
    let sums: Vec<CapacityVector> = buckets.values().map(|(_, sum)| sum.clone()).collect();
    let mut network = Network::star_network(net.terminals(), &sums)?;
    for (u, v, c) in dec.terminal_part.edges() {
        network.add_edge(u, v, c.clone())?;
    }
    let base = net.terminals().iter().copied().max().unwrap_or(0);
    let groups = buckets
        .into_values()
        .enumerate()
        .map(|(i, (members, _))| (base + 1 + i as VertexId, members))
        .collect();
    Ok(ContractionResult { network, groups })
}

/// Contracts stars with equal cut signatures; every terminal cut of the
/// output equals the corresponding minimum cut of the input exactly.
pub fn sparsify_cut_contraction(net: &Network) -> Result<ContractionResult> {
    if net.k() > MAX_CUT_CONTRACTION_TERMINALS {
        return Err(Error::TooLarge(format!(
            "cut contraction supports at most {MAX_CUT_CONTRACTION_TERMINALS} terminals, got {}",
            net.k()
        )));
    }
    contract_by(net, |c| cut_signature(c))
}

/// Contracts stars with equal strong signatures; the output preserves every
/// multicommodity flow value exactly (and therefore every terminal cut).
pub fn sparsify_flow_contraction(net: &Network) -> Result<ContractionResult> {
    if net.k() > MAX_FLOW_CONTRACTION_TERMINALS {
        return Err(Error::TooLarge(format!(
            "flow contraction supports at most {MAX_FLOW_CONTRACTION_TERMINALS} terminals, got {}",
            net.k()
        )));
    }
    contract_by(net, |c| strong_signature(c))
}

/// Counts distinct cut and strong signatures among the non-zero stars.
pub fn class_count_report(net: &Network) -> Result<(usize, usize)> {
    if net.k() > MAX_FLOW_CONTRACTION_TERMINALS {
        return Err(Error::TooLarge(format!(
            "class report supports at most {MAX_FLOW_CONTRACTION_TERMINALS} terminals, got {}",
            net.k()
        )));
    }
    let dec = decompose_quasi_bipartite(net)?;
    let mut weak = std::collections::BTreeSet::new();
    let mut strong = std::collections::BTreeSet::new();
    for (_, coords) in &dec.star_part {
        if coords.iter().all(Rational::is_zero) {
            continue;
        }
        weak.insert(cut_signature(coords)?);
        strong.insert(strong_signature(coords)?);
    }
    Ok((weak.len(), strong.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{flow_factor, Demand, Lambda};
    use crate::mincut::verify_cut_sparsifier;
    use crate::rational::rat;
    use crate::rays::enumerate_basic_stars;

    fn rats(vals: &[i64]) -> CapacityVector {
        vals.iter().map(|&v| rat(v, 1)).collect()
    }

    fn star_net(k: usize, stars: &[&[i64]]) -> Network {
        let terminals: Vec<VertexId> = (1..=k as VertexId).collect();
        let vectors: Vec<CapacityVector> = stars.iter().map(|s| rats(s)).collect();
        Network::star_network(&terminals, &vectors).unwrap()
    }

    #[test]
    fn decompose_pure_bipartite_has_edgeless_terminal_part() {
        let net = star_net(2, &[&[1, 2], &[3, 4]]);
        let dec = decompose_quasi_bipartite(&net).unwrap();
        assert_eq!(dec.terminal_part.edge_count(), 0);
        assert_eq!(
            dec.star_part,
            vec![(3, rats(&[1, 2])), (4, rats(&[3, 4]))]
        );
    }

    #[test]
    fn decompose_keeps_terminal_edge() {
        let mut net = star_net(2, &[&[1, 2]]);
        net.add_edge(1, 2, rat(5, 1)).unwrap();
        let dec = decompose_quasi_bipartite(&net).unwrap();
        assert_eq!(dec.terminal_part.edge_count(), 1);
        assert_eq!(dec.terminal_part.capacity(1, 2), rat(5, 1));
        assert_eq!(dec.star_part, vec![(3, rats(&[1, 2]))]);
    }

    #[test]
    fn decompose_rejects_steiner_steiner_edge() {
        let mut net = Network::new([1, 2, 3, 4], [1, 2]).unwrap();
        net.add_edge(3, 4, rat(1, 1)).unwrap();
        match decompose_quasi_bipartite(&net) {
            Err(Error::NotQuasiBipartite { u: 3, v: 4 }) => {}
            other => panic!("expected NotQuasiBipartite(3,4), got {other:?}"),
        }
    }

    #[test]
    fn cut_contraction_merges_matching_buckets() {
        let net = star_net(2, &[&[1, 2], &[2, 5], &[2, 1]]);
        let out = sparsify_cut_contraction(&net).unwrap();
        // (1,2) and (2,5) share the signature biased toward t2; (2,1) differs.
        let dec = decompose_quasi_bipartite(&out.network).unwrap();
        let vectors: Vec<CapacityVector> =
            dec.star_part.iter().map(|(_, c)| c.clone()).collect();
        assert_eq!(vectors, vec![rats(&[3, 7]), rats(&[2, 1])]);
        assert_eq!(out.groups, vec![(3, vec![3, 4]), (4, vec![5])]);
        let report = verify_cut_sparsifier(&net, &out.network, &rat(1, 1)).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn cut_contraction_merges_scalar_multiples() {
        let net = star_net(3, &[&[1, 2, 3], &[2, 4, 6], &[5, 10, 15]]);
        let out = sparsify_cut_contraction(&net).unwrap();
        assert_eq!(out.network.steiner_vertices().len(), 1);
        assert_eq!(out.network.capacity(4, 1), rat(8, 1));
        assert_eq!(out.network.capacity(4, 2), rat(16, 1));
        assert_eq!(out.network.capacity(4, 3), rat(24, 1));
    }

    #[test]
    fn cut_contraction_without_steiner_is_identity() {
        let mut net = Network::new([1, 2, 3], [1, 2, 3]).unwrap();
        net.add_edge(1, 2, rat(4, 1)).unwrap();
        net.add_edge(2, 3, rat(7, 2)).unwrap();
        let out = sparsify_cut_contraction(&net).unwrap();
        assert_eq!(out.network, net);
        assert!(out.groups.is_empty());
    }

    #[test]
    fn cut_contraction_drops_zero_stars() {
        let net = star_net(2, &[&[0, 0], &[1, 1]]);
        let out = sparsify_cut_contraction(&net).unwrap();
        assert_eq!(out.network.steiner_vertices().len(), 1);
        assert_eq!(out.groups, vec![(3, vec![4])]);
    }

    #[test]
    fn cut_contraction_is_idempotent() {
        let mut net = star_net(3, &[&[1, 2, 3], &[3, 2, 1], &[2, 4, 6], &[1, 1, 1]]);
        net.add_edge(1, 3, rat(2, 1)).unwrap();
        let once = sparsify_cut_contraction(&net).unwrap().network;
        let twice = sparsify_cut_contraction(&once).unwrap().network;
        assert_eq!(once, twice);
    }

    #[test]
    fn cut_contraction_ignores_star_order() {
        let forward = star_net(3, &[&[1, 2, 3], &[3, 2, 1], &[2, 4, 6]]);
        let backward = star_net(3, &[&[2, 4, 6], &[3, 2, 1], &[1, 2, 3]]);
        let a = sparsify_cut_contraction(&forward).unwrap().network;
        let b = sparsify_cut_contraction(&backward).unwrap().network;
        assert_eq!(a, b);
    }

    #[test]
    fn flow_contraction_merges_proportional_stars() {
        let net = star_net(2, &[&[1, 2], &[2, 4]]);
        let out = sparsify_flow_contraction(&net).unwrap();
        let dec = decompose_quasi_bipartite(&out.network).unwrap();
        assert_eq!(dec.star_part, vec![(3, rats(&[3, 6]))]);
        let mut d = Demand::new(2);
        d.add(0, 1, rat(3, 1)).unwrap();
        let lg = flow_factor(&net, &d).unwrap().lambda;
        let lh = flow_factor(&out.network, &d).unwrap().lambda;
        assert_eq!(lg, Lambda::Finite(rat(1, 1)));
        assert_eq!(lg, lh);
    }

    #[test]
    fn flow_contraction_keeps_distinct_signs_apart() {
        let net = star_net(2, &[&[1, 2], &[1, 1]]);
        let out = sparsify_flow_contraction(&net).unwrap();
        assert_eq!(out.network.steiner_vertices().len(), 2);
    }

    #[test]
    fn flow_refines_cut_on_weak_equal_strong_unequal_pair() {
        // (1,2,2) and (2,3,4) have equal cut signatures but differ on the
        // ({t2},{t3}) comparison, so only the cut contraction merges them.
        let net = star_net(3, &[&[1, 2, 2], &[2, 3, 4]]);
        let cut = sparsify_cut_contraction(&net).unwrap();
        let flow = sparsify_flow_contraction(&net).unwrap();
        assert_eq!(cut.network.steiner_vertices().len(), 1);
        assert_eq!(flow.network.steiner_vertices().len(), 2);
        assert!(flow.network.steiner_vertices().len() >= cut.network.steiner_vertices().len());
        for out in [&cut, &flow] {
            let report = verify_cut_sparsifier(&net, &out.network, &rat(1, 1)).unwrap();
            assert!(report.passed(), "violations: {:?}", report.violations);
        }
    }

    #[test]
    fn merging_weak_unequal_stars_loses_a_flow() {
        // (1,2,4) and (1,3,3) disagree already on the {t1,t2} vs {t3} cut;
        // merging them to (2,5,7) inflates the demand (0,2,5), which the
        // original pair cannot route at factor 1.
        let net = star_net(3, &[&[1, 2, 4], &[1, 3, 3]]);
        let merged = star_net(3, &[&[2, 5, 7]]);
        let mut d = Demand::new(3);
        d.add(0, 2, rat(2, 1)).unwrap();
        d.add(1, 2, rat(5, 1)).unwrap();
        let rg = flow_factor(&net, &d).unwrap();
        let rh = flow_factor(&merged, &d).unwrap();
        let lg = rg.lambda.as_finite().unwrap();
        let lh = rh.lambda.as_finite().unwrap();
        assert_eq!(*lh, rat(1, 1));
        assert_eq!(*lg, rat(6, 7));
        // The flow contraction never performs this merge.
        let out = sparsify_flow_contraction(&net).unwrap();
        assert_eq!(out.network.steiner_vertices().len(), 2);
    }

    #[test]
    fn flow_contraction_preserves_single_pair_flows() {
        let net = star_net(3, &[&[1, 2, 2], &[2, 4, 4], &[1, 0, 3]]);
        let out = sparsify_flow_contraction(&net).unwrap();
        assert_eq!(out.network.steiner_vertices().len(), 2);
        for i in 0..3 {
            for j in (i + 1)..3 {
                let mut d = Demand::new(3);
                d.add(i, j, rat(1, 1)).unwrap();
                let lg = flow_factor(&net, &d).unwrap().lambda;
                let lh = flow_factor(&out.network, &d).unwrap().lambda;
                assert_eq!(lg, lh, "pair ({i},{j})");
            }
        }
    }

    #[test]
    fn class_counts_on_small_instances() {
        let one = star_net(3, &[&[1, 2, 3]]);
        assert_eq!(class_count_report(&one).unwrap(), (1, 1));

        let rays = enumerate_basic_stars(2, false, false).unwrap();
        let vectors: Vec<CapacityVector> =
            rays.iter().map(|r| r.coords.clone()).collect();
        let net = Network::star_network(&[1, 2], &vectors).unwrap();
        let (weak, strong) = class_count_report(&net).unwrap();
        assert_eq!(weak, 3);
        assert_eq!(strong, 3);
    }

    #[test]
    fn contraction_respects_terminal_guardrails() {
        let terminals: Vec<VertexId> = (1..=17).collect();
        let net = Network::new(terminals.clone(), terminals).unwrap();
        assert!(matches!(
            sparsify_cut_contraction(&net),
            Err(Error::TooLarge(_))
        ));
        let terminals: Vec<VertexId> = (1..=10).collect();
        let net = Network::new(terminals.clone(), terminals).unwrap();
        assert!(matches!(
            sparsify_flow_contraction(&net),
            Err(Error::TooLarge(_))
        ));
    }
}
