//! Exact minimum terminal cuts.
//!
//! `min_cut` answers "cheapest cut separating terminal set A from the rest of
//! the terminals" with an exact rational value and a canonical witness: the
//! inclusion-minimal source side, read off residual reachability. Internally
//! capacities are scaled by the least common denominator and the flow runs on
//! integers (augmenting paths terminate because scaled capacities are
//! integral); the scale divides back out of the answer. Gadget attachments
//! use a genuine infinity sentinel, never a large number.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::traits::ToPrimitive;
use num::Zero;

use crate::error::{Error, Result};
use crate::network::{Cut, Network, VertexId};
use crate::rational::{common_denominator, Rational};

#[derive(Debug, Clone)]
pub struct MinCutResult {
    pub value: Rational,
    /// Minimal source side. Empty by convention when the terminal side is
    /// empty or covers every terminal.
    pub cut: Cut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutViolation {
    /// Terminal ids on the separated side.
    pub side: Vec<VertexId>,
    pub kappa_g: Rational,
    pub kappa_h: Rational,
}

#[derive(Debug, Clone)]
pub struct CutVerifyReport {
    pub checked: usize,
    pub violations: Vec<CutViolation>,
}

impl CutVerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

trait FlowInt: Clone + Ord + Zero {
    fn add_in(&mut self, other: &Self);
    fn sub_in(&mut self, other: &Self);
}

impl FlowInt for i128 {
    fn add_in(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_in(&mut self, other: &Self) {
        *self -= other;
    }
}

impl FlowInt for BigInt {
    fn add_in(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_in(&mut self, other: &Self) {
        *self -= other;
    }
}

#[derive(Clone)]
enum Cap<T> {
    Fin(T),
    Inf,
}

impl<T: FlowInt> Cap<T> {
    fn is_positive(&self) -> bool {
        match self {
            Cap::Fin(v) => *v > T::zero(),
            Cap::Inf => true,
        }
    }
    fn shrink(&mut self, by: &T) {
        if let Cap::Fin(v) = self {
            v.sub_in(by);
        }
    }
    fn grow(&mut self, by: &T) {
        if let Cap::Fin(v) = self {
            v.add_in(by);
        }
    }
}

struct Arc<T> {
    to: usize,
    rev: usize,
    cap: Cap<T>,
}

struct Dinic<T> {
    adj: Vec<Vec<Arc<T>>>,
}

impl<T: FlowInt> Dinic<T> {
    fn new(n: usize) -> Self {
        Dinic {
            adj: (0..n).map(|_| Vec::new()).collect(),
        }
    }

    fn add(&mut self, u: usize, v: usize, forward: Cap<T>, backward: Cap<T>) {
        let ru = self.adj[u].len();
        let rv = self.adj[v].len();
        self.adj[u].push(Arc {
            to: v,
            rev: rv,
            cap: forward,
        });
        self.adj[v].push(Arc {
            to: u,
            rev: ru,
            cap: backward,
        });
    }

    fn levels(&self, s: usize) -> Vec<i32> {
        let mut level = vec![-1; self.adj.len()];
        let mut queue = std::collections::VecDeque::new();
        level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for arc in &self.adj[u] {
                if arc.cap.is_positive() && level[arc.to] < 0 {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn augment(
        &mut self,
        u: usize,
        t: usize,
        limit: Option<T>,
        level: &[i32],
        iter: &mut [usize],
    ) -> Result<Option<T>> {
        if u == t {
            return match limit {
                Some(v) => Ok(Some(v)),
                None => Err(Error::Internal("unbounded augmenting path".into())),
            };
        }
        while iter[u] < self.adj[u].len() {
            let (to, cap_limit) = {
                let arc = &self.adj[u][iter[u]];
                if !arc.cap.is_positive() || level[arc.to] != level[u] + 1 {
                    iter[u] += 1;
                    continue;
                }
                let tightened = match (&arc.cap, &limit) {
                    (Cap::Fin(c), Some(l)) => Some(c.clone().min(l.clone())),
                    (Cap::Fin(c), None) => Some(c.clone()),
                    (Cap::Inf, l) => l.clone(),
                };
                (arc.to, tightened)
            };
            if let Some(pushed) = self.augment(to, t, cap_limit, level, iter)? {
                let rev = {
                    let arc = &mut self.adj[u][iter[u]];
                    arc.cap.shrink(&pushed);
                    arc.rev
                };
                self.adj[to][rev].cap.grow(&pushed);
                return Ok(Some(pushed));
            }
            iter[u] += 1;
        }
        Ok(None)
    }

    /// Runs to completion; returns the flow value and the residual
    /// reachability indicator from `s`.
    fn max_flow(&mut self, s: usize, t: usize) -> Result<(T, Vec<bool>)> {
        let mut total = T::zero();
        loop {
            let level = self.levels(s);
            if level[t] < 0 {
                let reach: Vec<bool> = level.iter().map(|&l| l >= 0).collect();
                return Ok((total, reach));
            }
            let mut iter = vec![0usize; self.adj.len()];
            while let Some(pushed) = self.augment(s, t, None, &level, &mut iter)? {
                total.add_in(&pushed);
            }
        }
    }
}

struct FlowProblem<'a> {
    net: &'a Network,
    ids: Vec<VertexId>,
    sources: Vec<usize>,
    sinks: Vec<usize>,
    inf_pairs: Vec<(usize, usize)>,
    scale: BigInt,
    scaled: Vec<(usize, usize, BigInt)>,
}

impl<'a> FlowProblem<'a> {
    fn build(
        net: &'a Network,
        sources: &BTreeSet<VertexId>,
        sinks: &BTreeSet<VertexId>,
        inf_pairs: &[(VertexId, VertexId)],
    ) -> Result<Self> {
        if let Some(v) = sources.intersection(sinks).next() {
            return Err(Error::Internal(format!(
                "vertex {v} attached to both sides"
            )));
        }
        let ids: Vec<VertexId> = net.vertices().collect();
        let index = |v: VertexId| -> Result<usize> {
            ids.binary_search(&v).map_err(|_| Error::UnknownVertex(v))
        };
        let scale = common_denominator(net.edges().map(|(_, _, c)| c));
        let mut scaled = Vec::with_capacity(net.edge_count());
        for (u, v, c) in net.edges() {
            let int = (c * Rational::from_integer(scale.clone()))
                .to_integer();
            scaled.push((index(u)?, index(v)?, int));
        }
        Ok(FlowProblem {
            net,
            sources: sources.iter().map(|&v| index(v)).collect::<Result<_>>()?,
            sinks: sinks.iter().map(|&v| index(v)).collect::<Result<_>>()?,
            inf_pairs: inf_pairs
                .iter()
                .map(|&(a, b)| Ok((index(a)?, index(b)?)))
                .collect::<Result<_>>()?,
            ids,
            scale,
            scaled,
        })
    }

    fn run_as<T: FlowInt>(&self, conv: impl Fn(&BigInt) -> T) -> Result<(T, BTreeSet<VertexId>)> {
        let n = self.ids.len();
        let (s, t) = (n, n + 1);
        let mut dinic: Dinic<T> = Dinic::new(n + 2);
        for (u, v, c) in &self.scaled {
            // one undirected edge: both residuals start at capacity
            dinic.add(*u, *v, Cap::Fin(conv(c)), Cap::Fin(conv(c)));
        }
        for &u in &self.sources {
            dinic.add(s, u, Cap::Inf, Cap::Fin(T::zero()));
        }
        for &u in &self.sinks {
            dinic.add(u, t, Cap::Inf, Cap::Fin(T::zero()));
        }
        for &(a, b) in &self.inf_pairs {
            dinic.add(a, b, Cap::Inf, Cap::Inf);
        }
        let (value, reach) = dinic.max_flow(s, t)?;
        if reach[t] {
            return Err(Error::Internal("sink reachable after max flow".into()));
        }
        let witness: BTreeSet<VertexId> = (0..n)
            .filter(|&i| reach[i])
            .map(|i| self.ids[i])
            .collect();
        Ok((value, witness))
    }

    fn solve(&self) -> Result<MinCutResult> {
        let total: BigInt = self.scaled.iter().map(|(_, _, c)| c).sum();
        let (flow, witness) = if total.to_i128().map_or(false, |t| t < i128::MAX / 4) {
            let (value, witness) = self.run_as(|c| c.to_i128().expect("fits by total bound"))?;
            (BigInt::from(value), witness)
        } else {
            self.run_as(|c| c.clone())?
        };
        let value = Rational::new(flow, self.scale.clone());
        debug_assert!(self
            .net
            .cut_capacity(&witness)
            .map(|c| c == value || !self.inf_pairs.is_empty())
            .unwrap_or(false));
        Ok(MinCutResult {
            value,
            cut: Cut { side: witness },
        })
    }
}

fn validate_terminal_side(net: &Network, side: &BTreeSet<VertexId>) -> Result<BTreeSet<VertexId>> {
    for &v in side {
        if net.terminal_index(v).is_none() {
            return Err(Error::TerminalMismatch(format!(
                "cut side contains non-terminal {v}"
            )));
        }
    }
    Ok(net
        .terminals()
        .iter()
        .copied()
        .filter(|t| !side.contains(t))
        .collect())
}

/// Minimum cut separating terminal side `A` from the remaining terminals.
/// Degenerate sides (empty, or all terminals) have value zero and an empty
/// witness by convention.
pub fn min_cut(net: &Network, side: &BTreeSet<VertexId>) -> Result<MinCutResult> {
    let complement = validate_terminal_side(net, side)?;
    if side.is_empty() || complement.is_empty() {
        return Ok(MinCutResult {
            value: Rational::zero(),
            cut: Cut::new([]),
        });
    }
    FlowProblem::build(net, side, &complement, &[])?.solve()
}

/// `min_cut` with extra requirements: `forced_source` vertices must land on
/// the separated side, `forced_sink` vertices on the other side, and each
/// pair in `infinite_pairs` must stay together (modeled as an
/// infinite-capacity edge, which no finite cut may cross).
pub fn min_cut_constrained(
    net: &Network,
    side: &BTreeSet<VertexId>,
    forced_source: &[VertexId],
    forced_sink: &[VertexId],
    infinite_pairs: &[(VertexId, VertexId)],
) -> Result<MinCutResult> {
    let complement = validate_terminal_side(net, side)?;
    let mut sources = side.clone();
    sources.extend(forced_source.iter().copied());
    let mut sinks = complement;
    sinks.extend(forced_sink.iter().copied());
    for &v in forced_source.iter().chain(forced_sink) {
        if !net.contains_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
    }
    if sources.is_empty() || sinks.is_empty() {
        return Ok(MinCutResult {
            value: Rational::zero(),
            cut: Cut::new([]),
        });
    }
    FlowProblem::build(net, &sources, &sinks, infinite_pairs)?.solve()
}

/// Exhaustive reference oracle: tries every assignment of non-terminals to
/// the two sides. Only for small networks; used to cross-check `min_cut`.
pub fn brute_force_min_cut(net: &Network, side: &BTreeSet<VertexId>) -> Result<Rational> {
    let complement = validate_terminal_side(net, side)?;
    if side.is_empty() || complement.is_empty() {
        return Ok(Rational::zero());
    }
    let steiner = net.steiner_vertices();
    if steiner.len() > 24 {
        return Err(Error::TooLarge(format!(
            "{} non-terminals in exhaustive cut enumeration",
            steiner.len()
        )));
    }
    let mut best: Option<Rational> = None;
    for mask in 0u64..(1 << steiner.len()) {
        let mut x: BTreeSet<VertexId> = side.clone();
        for (i, v) in steiner.iter().enumerate() {
            if mask >> i & 1 == 1 {
                x.insert(*v);
            }
        }
        let cap = net.cut_capacity(&x)?;
        if best.as_ref().map_or(true, |b| cap < *b) {
            best = Some(cap);
        }
    }
    Ok(best.expect("at least the all-steiner-out cut exists"))
}

fn subset_from_mask(terminals: &[VertexId], mask: u64) -> BTreeSet<VertexId> {
    terminals
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &t)| t)
        .collect()
}

/// Checks the sandwich `kappa_g(A) <= kappa_h(A) <= quality * kappa_g(A)` for
/// every terminal bipartition of `g`. `h` must carry `g`'s terminals as a
/// prefix of its own list; extra vertices of `h` are just internal.
pub fn verify_cut_sparsifier(
    g: &Network,
    h: &Network,
    quality: &Rational,
) -> Result<CutVerifyReport> {
    if *quality < Rational::one() {
        return Err(Error::Internal(format!("quality {quality} below one")));
    }
    let k = g.k();
    if h.terminals().len() < k || h.terminals()[..k] != *g.terminals() {
        return Err(Error::TerminalMismatch(
            "sparsifier must carry the source terminals in order".into(),
        ));
    }
    if k > 20 {
        return Err(Error::TooLarge(format!("{k} terminals in verification")));
    }
    let hv = if h.terminals().len() == k {
        h.clone()
    } else {
        h.with_terminals(g.terminals().iter().copied())?
    };
    let mut report = CutVerifyReport {
        checked: 0,
        violations: Vec::new(),
    };
    for mask in 1..(1u64 << k) - 1 {
        let side = subset_from_mask(g.terminals(), mask);
        let kappa_g = min_cut(g, &side)?.value;
        let kappa_h = min_cut(&hv, &side)?.value;
        report.checked += 1;
        if kappa_h < kappa_g || kappa_h > quality * &kappa_g {
            report.violations.push(CutViolation {
                side: side.into_iter().collect(),
                kappa_g,
                kappa_h,
            });
        }
    }
    Ok(report)
}

use num::One;

/// True when for every terminal bipartition some minimum cut keeps `v` and
/// `w` on a common side, which licenses contracting them without changing
/// any terminal cut value.
pub fn check_equiv_merge_precondition(net: &Network, v: VertexId, w: VertexId) -> Result<bool> {
    if v == w {
        return Err(Error::SelfLoop(v));
    }
    let k = net.k();
    if k > 20 {
        return Err(Error::TooLarge(format!("{k} terminals")));
    }
    for mask in 1..(1u64 << k) - 1 {
        let side = subset_from_mask(net.terminals(), mask);
        let base = min_cut(net, &side)?.value;
        let both_in = min_cut_constrained(net, &side, &[v, w], &[], &[])?.value;
        if both_in == base {
            continue;
        }
        let both_out = min_cut_constrained(net, &side, &[], &[v, w], &[])?.value;
        if both_out != base {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Variant for merging whole groups: every listed pair must admit, for every
/// bipartition, a minimum cut that does not separate it. Implemented by
/// adding an infinite edge inside each pair and asking whether any min-cut
/// value moved.
pub fn check_pairwise_merge_precondition(
    net: &Network,
    pairs: &[(VertexId, VertexId)],
) -> Result<bool> {
    let k = net.k();
    if k > 20 {
        return Err(Error::TooLarge(format!("{k} terminals")));
    }
    for mask in 1..(1u64 << k) - 1 {
        let side = subset_from_mask(net.terminals(), mask);
        let base = min_cut(net, &side)?.value;
        let glued = min_cut_constrained(net, &side, &[], &[], pairs)?.value;
        if glued != base {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn stars(vectors: &[Vec<Rational>]) -> Network {
        let k = vectors.first().map_or(2, Vec::len);
        let terminals: Vec<VertexId> = (1..=k as u32).collect();
        Network::star_network(&terminals, vectors).unwrap()
    }

    fn side(ids: &[VertexId]) -> BTreeSet<VertexId> {
        ids.iter().copied().collect()
    }

    #[test]
    fn two_star_cut_values() {
        let net = stars(&[vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(5, 1)]]);
        let r = min_cut(&net, &side(&[1])).unwrap();
        assert_eq!(r.value, rat(3, 1));
        // the minimal source side is just t1: both center detours cost more
        assert_eq!(r.cut.side, side(&[1]));
        let r = min_cut(&net, &side(&[2])).unwrap();
        assert_eq!(r.value, rat(3, 1));
        assert_eq!(net.cut_capacity(&r.cut.side).unwrap(), rat(3, 1));
    }

    #[test]
    fn degenerate_sides_are_zero() {
        let net = stars(&[vec![rat(1, 1), rat(2, 1)]]);
        assert_eq!(min_cut(&net, &side(&[])).unwrap().value, rat(0, 1));
        assert_eq!(min_cut(&net, &side(&[1, 2])).unwrap().value, rat(0, 1));
        assert!(matches!(
            min_cut(&net, &side(&[3])),
            Err(Error::TerminalMismatch(_))
        ));
    }

    #[test]
    fn rational_capacities_survive_scaling() {
        let net = stars(&[vec![rat(1, 3), rat(1, 2)], vec![rat(2, 7), rat(5, 1)]]);
        let r = min_cut(&net, &side(&[1])).unwrap();
        // cheapest: cut t1's two star edges
        assert_eq!(r.value, rat(1, 3) + rat(2, 7));
        assert_eq!(
            brute_force_min_cut(&net, &side(&[1])).unwrap(),
            r.value
        );
    }

    #[test]
    fn witness_is_minimal_source_side() {
        // t1 -- v (cap 5) -- t2 (cap 1): min cut cuts the v-t2 edge, and the
        // minimal source side includes v.
        let mut net = Network::new([1, 2, 9], [1, 2]).unwrap();
        net.add_edge(1, 9, rat(5, 1)).unwrap();
        net.add_edge(9, 2, rat(1, 1)).unwrap();
        let r = min_cut(&net, &side(&[1])).unwrap();
        assert_eq!(r.value, rat(1, 1));
        assert_eq!(r.cut.side, side(&[1, 9]));
    }

    #[test]
    fn matches_brute_force_on_a_denser_graph() {
        let mut net = Network::new(1..=6, [1, 2, 3]).unwrap();
        let caps = [
            (1, 4, rat(3, 2)),
            (2, 4, rat(1, 1)),
            (2, 5, rat(7, 3)),
            (3, 5, rat(1, 2)),
            (4, 5, rat(2, 1)),
            (4, 6, rat(1, 5)),
            (5, 6, rat(4, 1)),
            (1, 6, rat(1, 1)),
            (1, 2, rat(1, 4)),
        ];
        for (u, v, c) in caps {
            net.add_edge(u, v, c).unwrap();
        }
        for mask in 1u64..4 {
            let a = subset_from_mask(net.terminals(), mask);
            let fast = min_cut(&net, &a).unwrap();
            let slow = brute_force_min_cut(&net, &a).unwrap();
            assert_eq!(fast.value, slow, "side {a:?}");
            assert_eq!(net.cut_capacity(&fast.cut.side).unwrap(), fast.value);
        }
    }

    #[test]
    fn verify_accepts_exact_merge_and_rejects_bad_one() {
        // (1,2) and (2,5) share a signature and may merge exactly.
        let g = stars(&[vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(5, 1)]]);
        let h = g.contract(3, 4).unwrap();
        let report = verify_cut_sparsifier(&g, &h, &Rational::one()).unwrap();
        assert!(report.passed());
        assert_eq!(report.checked, 2);

        // (1,2) and (2,1) may not: merging to (3,3) overshoots kappa({t1}) = 2.
        let g = stars(&[vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(1, 1)]]);
        let h = g.contract(3, 4).unwrap();
        let report = verify_cut_sparsifier(&g, &h, &Rational::one()).unwrap();
        assert!(!report.passed());
        let v = &report.violations[0];
        assert_eq!(v.side, vec![1]);
        assert_eq!(v.kappa_g, rat(2, 1));
        assert_eq!(v.kappa_h, rat(3, 1));
    }

    #[test]
    fn verify_honors_quality_slack() {
        let g = stars(&[vec![rat(1, 1), rat(2, 1)]]);
        // doubled capacities: a quality-2 sparsifier
        let h = Network::star_network(&[1, 2], &[vec![rat(2, 1), rat(4, 1)]]).unwrap();
        assert!(verify_cut_sparsifier(&g, &h, &rat(2, 1)).unwrap().passed());
        assert!(!verify_cut_sparsifier(&g, &h, &Rational::one())
            .unwrap()
            .passed());
        assert!(verify_cut_sparsifier(&g, &h, &rat(1, 2)).is_err());
    }

    #[test]
    fn equiv_merge_precondition_matches_the_worked_pairs() {
        let good = stars(&[vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(5, 1)]]);
        assert!(check_equiv_merge_precondition(&good, 3, 4).unwrap());
        let bad = stars(&[vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(1, 1)]]);
        assert!(!check_equiv_merge_precondition(&bad, 3, 4).unwrap());
    }

    #[test]
    fn pairwise_precondition_via_infinite_edges() {
        let good = stars(&[vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(5, 1)]]);
        assert!(check_pairwise_merge_precondition(&good, &[(3, 4)]).unwrap());
        let bad = stars(&[vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(1, 1)]]);
        assert!(!check_pairwise_merge_precondition(&bad, &[(3, 4)]).unwrap());
    }

    #[test]
    fn constrained_cuts_respect_forcing() {
        let net = stars(&[vec![rat(1, 1), rat(2, 1)]]);
        // forcing the center onto t1's side makes the cut pay the t2 edge
        let r = min_cut_constrained(&net, &side(&[1]), &[3], &[], &[]).unwrap();
        assert_eq!(r.value, rat(2, 1));
        let r = min_cut_constrained(&net, &side(&[1]), &[], &[3], &[]).unwrap();
        assert_eq!(r.value, rat(1, 1));
    }
}
