//! Splits a demand routable through a merged star into per-star parts.
//!
//! Given two stars whose capacity vectors have equal strong signatures and a
//! demand `d` routable in the star with capacities `c1 + c2`, [`split_demand`]
//! produces `d1 + d2 = d` with `d1` routable under `c1` and `d2` under `c2`.
//! Residual demand is assigned greedily wherever both endpoint capacities
//! have slack. A blocked pair has each star saturated at exactly one of the
//! two endpoints, on opposite endpoints; a rotation then walks the demand
//! graph (one node per star copy of each terminal, arcs carrying the current
//! per-star pair assignments) from a saturated endpoint to a node with slack,
//! flipping every traversed pair assignment to the opposite star. Interior
//! node loads cancel, so the rotation frees room exactly at the start node.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::{BigInt, Signed, Zero};

use crate::error::{Error, Result};
use crate::flow::{routable_in_star, Demand};
use crate::rational::Rational;
use crate::signature::{strong_signature, validate_capacity_vector};

/// A node of the demand graph: (star index in {0, 1}, terminal index).
pub type DemandNode = (usize, usize);

/// Outcome of a path search in the demand graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathSearch {
    /// Nodes from the start to the first reachable node with spare capacity;
    /// a start that itself has slack yields a single-node path.
    Path(Vec<DemandNode>),
    /// Every node reachable along positive arcs is capacity-saturated. Under
    /// the split preconditions this set cannot exist; it certifies that the
    /// input demand was not routable in the merged star.
    Saturated(BTreeSet<DemandNode>),
}

/// Working state of a split: per-star capacities, assignments, loads, and
/// the demand not yet assigned to either star.
#[derive(Debug, Clone)]
pub struct SplitState {
    caps: [Vec<Rational>; 2],
    assigned: [Demand; 2],
    load: [Vec<Rational>; 2],
    remaining: Demand,
}

impl SplitState {
    pub fn new(c1: &[Rational], c2: &[Rational], d: &Demand) -> Result<Self> {
        validate_capacity_vector(c1)?;
        validate_capacity_vector(c2)?;
        if c1.len() != c2.len() || c1.len() != d.k() {
            return Err(Error::DimensionMismatch {
                expected: c1.len(),
                got: if c1.len() != c2.len() { c2.len() } else { d.k() },
            });
        }
        let k = c1.len();
        Ok(SplitState {
            caps: [c1.to_vec(), c2.to_vec()],
            assigned: [Demand::new(k), Demand::new(k)],
            load: [vec![Rational::zero(); k], vec![Rational::zero(); k]],
            remaining: d.clone(),
        })
    }

    pub fn k(&self) -> usize {
        self.caps[0].len()
    }

    pub fn assigned(&self, star: usize) -> &Demand {
        &self.assigned[star]
    }

    pub fn remaining(&self) -> &Demand {
        &self.remaining
    }

    /// Spare capacity at a node: capacity minus current load.
    pub fn room(&self, (star, t): DemandNode) -> Rational {
        &self.caps[star][t] - &self.load[star][t]
    }

    fn assign(&mut self, star: usize, i: usize, j: usize, amount: &Rational) -> Result<()> {
        self.assigned[star].add(i, j, amount.clone())?;
        self.remaining.subtract(i, j, amount)?;
        self.load[star][i] += amount;
        self.load[star][j] += amount;
        Ok(())
    }

    /// Assigns as much of the remaining (i, j) demand to `star` as both
    /// endpoint rooms allow; returns the amount moved.
    fn greedy(&mut self, star: usize, i: usize, j: usize) -> Result<Rational> {
        let amount = self
            .remaining
            .get(i, j)
            .min(self.room((star, i)))
            .min(self.room((star, j)));
        if amount.is_positive() {
            self.assign(star, i, j, &amount)?;
        }
        Ok(amount)
    }
}

/// Breadth-first search from `start` along arcs with a positive pair
/// assignment, passing only through saturated nodes and stopping at the
/// first node with spare capacity.
pub fn find_augmenting_path(state: &SplitState, start: DemandNode) -> PathSearch {
    if state.room(start).is_positive() {
        return PathSearch::Path(vec![start]);
    }
    let k = state.k();
    let mut parent: BTreeMap<DemandNode, DemandNode> = BTreeMap::new();
    let mut visited: BTreeSet<DemandNode> = BTreeSet::from([start]);
    let mut queue: VecDeque<DemandNode> = VecDeque::from([start]);
    while let Some(node @ (star, t)) = queue.pop_front() {
        for u in 0..k {
            if u == t {
                continue;
            }
            let next = (1 - star, u);
            if visited.contains(&next) || !state.assigned[star].get(t, u).is_positive() {
                continue;
            }
            visited.insert(next);
            parent.insert(next, node);
            if state.room(next).is_positive() {
                let mut path = vec![next];
                let mut cur = next;
                while let Some(&p) = parent.get(&cur) {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return PathSearch::Path(path);
            }
            queue.push_back(next);
        }
    }
    PathSearch::Saturated(visited)
}

/// Result of a demand split, with counters for test instrumentation.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub d1: Demand,
    pub d2: Demand,
    /// Number of path rotations performed.
    pub rotations: usize,
    /// Number of per-pair work iterations, each bounded-progress.
    pub iterations: usize,
}

/// Flips every pair assignment along `path` to the opposite star by `tau`
/// and checks the load deltas exactly: the net effect must be the symbolic
/// per-node coefficient times `tau`, nonnegative rooms everywhere.
fn rotate(state: &mut SplitState, path: &[DemandNode], tau: &Rational) -> Result<()> {
    let mut flips: BTreeMap<(usize, (usize, usize)), u32> = BTreeMap::new();
    let mut coeff: BTreeMap<DemandNode, i64> = BTreeMap::new();
    for r in 0..path.len() - 1 {
        let (star, a) = path[r];
        let (next_star, b) = path[r + 1];
        if next_star != 1 - star {
            return Err(Error::Internal("rotation path does not alternate stars".into()));
        }
        *flips.entry((star, (a.min(b), a.max(b)))).or_insert(0) += 1;
        *coeff.entry((star, a)).or_insert(0) -= 1;
        *coeff.entry((star, b)).or_insert(0) -= 1;
        *coeff.entry((1 - star, a)).or_insert(0) += 1;
        *coeff.entry((1 - star, b)).or_insert(0) += 1;
    }
    let before = state.load.clone();
    for (&(star, (a, b)), &mult) in &flips {
        let moved = tau * Rational::from(BigInt::from(mult));
        state.assigned[star].subtract(a, b, &moved)?;
        state.assigned[1 - star].add(a, b, moved.clone())?;
        state.load[star][a] -= &moved;
        state.load[star][b] -= &moved;
        state.load[1 - star][a] += &moved;
        state.load[1 - star][b] += &moved;
    }
    for star in 0..2 {
        for t in 0..state.k() {
            let delta = coeff.get(&(star, t)).copied().unwrap_or(0);
            let expected = &before[star][t] + tau * Rational::from(BigInt::from(delta));
            if state.load[star][t] != expected {
                return Err(Error::Internal(format!(
                    "rotation changed load at star {star} terminal {t} by an unexpected amount"
                )));
            }
            if state.load[star][t] > state.caps[star][t] || state.load[star][t].is_negative() {
                return Err(Error::Internal(format!(
                    "rotation violated capacity at star {star} terminal {t}"
                )));
            }
        }
    }
    Ok(())
}

/// Largest rotation amount the path supports: each flipped pair must keep a
/// nonnegative assignment (divided by its flip multiplicity) and each node
/// with a positive net load coefficient must stay within capacity.
fn rotation_capacity(state: &SplitState, path: &[DemandNode]) -> Result<Rational> {
    let mut flips: BTreeMap<(usize, (usize, usize)), u32> = BTreeMap::new();
    let mut coeff: BTreeMap<DemandNode, i64> = BTreeMap::new();
    for r in 0..path.len() - 1 {
        let (star, a) = path[r];
        let (_, b) = path[r + 1];
        *flips.entry((star, (a.min(b), a.max(b)))).or_insert(0) += 1;
        *coeff.entry((star, a)).or_insert(0) -= 1;
        *coeff.entry((star, b)).or_insert(0) -= 1;
        *coeff.entry((1 - star, a)).or_insert(0) += 1;
        *coeff.entry((1 - star, b)).or_insert(0) += 1;
    }
    let mut cap: Option<Rational> = None;
    let mut shrink = |bound: Rational| {
        if cap.as_ref().map_or(true, |c| bound < *c) {
            cap = Some(bound);
        }
    };
    for (&(star, (a, b)), &mult) in &flips {
        shrink(state.assigned[star].get(a, b) / Rational::from(BigInt::from(mult)));
    }
    for (&node, &delta) in &coeff {
        if delta > 0 {
            shrink(state.room(node) / Rational::from(BigInt::from(delta)));
        }
    }
    cap.ok_or_else(|| Error::Internal("rotation path has no arcs".into()))
}

fn run_split(
    c1: &[Rational],
    c2: &[Rational],
    d: &Demand,
    order: &[(usize, usize)],
) -> Result<SplitResult> {
    let mut state = SplitState::new(c1, c2, d)?;
    let k = state.k();
    let iteration_cap = d.support_size() * (2 * k + 1);
    let mut iterations = 0usize;
    let mut rotations = 0usize;
    for &(i, j) in order {
        while state.remaining.get(i, j).is_positive() {
            iterations += 1;
            if iterations > iteration_cap {
                return Err(Error::Internal(format!(
                    "split exceeded {iteration_cap} iterations on pair ({i}, {j})"
                )));
            }
            state.greedy(0, i, j)?;
            state.greedy(1, i, j)?;
            let residual = state.remaining.get(i, j);
            if !residual.is_positive() {
                break;
            }
            // Both stars are blocked, each saturated at one endpoint. The
            // merged-routability bound d(t) <= c1(t) + c2(t) leaves room for
            // the whole residual on the opposite star of each endpoint, so
            // the saturated endpoints lie on opposite stars.
            let star_at_i = if state.room((0, i)).is_zero() { 0 } else { 1 };
            if !state.room((star_at_i, i)).is_zero()
                || !state.room((1 - star_at_i, j)).is_zero()
            {
                return Err(Error::Internal(format!(
                    "blocked pair ({i}, {j}) lacks the opposite-star saturation pattern"
                )));
            }
            // Start from a saturated endpoint that has assignments to walk;
            // a zero-capacity node has none, but then strong agreement puts
            // positive load on the other pattern node.
            let (start, other) = if state.load[star_at_i][i].is_positive() {
                ((star_at_i, i), j)
            } else if state.load[1 - star_at_i][j].is_positive() {
                ((1 - star_at_i, j), i)
            } else {
                return Err(Error::Internal(format!(
                    "blocked pair ({i}, {j}) has no assignments to rotate"
                )));
            };
            let path = match find_augmenting_path(&state, start) {
                PathSearch::Path(p) => p,
                PathSearch::Saturated(x) => {
                    return Err(Error::Internal(format!(
                        "no augmenting path from ({}, {}); saturated set of {} nodes",
                        start.0,
                        start.1,
                        x.len()
                    )));
                }
            };
            let tau_cap = rotation_capacity(&state, &path)?;
            // A path ending at the blocked pair's other endpoint inside the
            // start star spends the very room the final assignment needs;
            // rotating half the residual leaves both stars exactly enough.
            let end = *path.last().expect("path is nonempty");
            let tau_res = if end == (start.0, other) {
                residual / Rational::from(BigInt::from(2))
            } else {
                residual.clone()
            };
            let tau = tau_cap.min(tau_res);
            if !tau.is_positive() {
                return Err(Error::Internal("rotation amount fell to zero".into()));
            }
            rotate(&mut state, &path, &tau)?;
            rotations += 1;
            let moved = &state.greedy(0, i, j)? + &state.greedy(1, i, j)?;
            if !moved.is_positive() {
                return Err(Error::Internal(format!(
                    "rotation freed no room for pair ({i}, {j})"
                )));
            }
        }
    }
    if !state.remaining.is_zero() {
        return Err(Error::Internal("split left demand unassigned".into()));
    }
    let [d1, d2] = state.assigned;
    for ((i, j), value) in d.pairs() {
        if &(&d1.get(i, j) + &d2.get(i, j)) != value {
            return Err(Error::Internal(format!(
                "split does not reconstruct demand on pair ({i}, {j})"
            )));
        }
    }
    if !routable_in_star(c1, &d1)? || !routable_in_star(c2, &d2)? {
        return Err(Error::Internal("split produced an unroutable part".into()));
    }
    Ok(SplitResult {
        d1,
        d2,
        rotations,
        iterations,
    })
}

fn check_preconditions(c1: &[Rational], c2: &[Rational], d: &Demand) -> Result<()> {
    if c1.len() != c2.len() {
        return Err(Error::DimensionMismatch {
            expected: c1.len(),
            got: c2.len(),
        });
    }
    let s1 = strong_signature(c1)?;
    let s2 = strong_signature(c2)?;
    if !s1.agrees(&s2) {
        return Err(Error::SignatureMismatch(format!(
            "strong signatures {} and {} differ",
            s1.to_hex(),
            s2.to_hex()
        )));
    }
    let merged: Vec<Rational> = c1.iter().zip(c2).map(|(a, b)| a + b).collect();
    if !routable_in_star(&merged, d)? {
        let t = (0..merged.len())
            .find(|&i| d.row_sum(i) > merged[i])
            .expect("some row exceeds capacity");
        return Err(Error::InvalidDemand(format!(
            "demand at terminal {t} exceeds the merged capacity {}",
            merged[t]
        )));
    }
    Ok(())
}

/// Splits `d` into per-star parts, processing pairs in lexicographic order.
pub fn split_demand(c1: &[Rational], c2: &[Rational], d: &Demand) -> Result<SplitResult> {
    check_preconditions(c1, c2, d)?;
    let order: Vec<(usize, usize)> = d.pairs().map(|(p, _)| p).collect();
    run_split(c1, c2, d, &order)
}

/// Splits `d` processing the listed pairs first (deduplicated, normalized to
/// (low, high)), then any remaining support pairs in lexicographic order.
/// Exists so tests can steer the greedy phase into saturating one star and
/// force rotations.
pub fn split_demand_with_order(
    c1: &[Rational],
    c2: &[Rational],
    d: &Demand,
    preferred: &[(usize, usize)],
) -> Result<SplitResult> {
    check_preconditions(c1, c2, d)?;
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    for &(i, j) in preferred {
        if i == j || i >= d.k() || j >= d.k() {
            return Err(Error::InvalidDemand(format!(
                "bad pair ({i}, {j}) in processing order"
            )));
        }
        let p = (i.min(j), i.max(j));
        if seen.insert(p) {
            order.push(p);
        }
    }
    for (p, _) in d.pairs() {
        if seen.insert(p) {
            order.push(p);
        }
    }
    run_split(c1, c2, d, &order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn rats(vals: &[i64]) -> Vec<Rational> {
        vals.iter().map(|&v| rat(v, 1)).collect()
    }

    fn demand(k: usize, entries: &[(usize, usize, i64, i64)]) -> Demand {
        let mut d = Demand::new(k);
        for &(i, j, n, m) in entries {
            d.add(i, j, rat(n, m)).unwrap();
        }
        d
    }

    #[test]
    fn greedy_split_of_single_pair() {
        let d = demand(2, &[(0, 1, 3, 1)]);
        let out = split_demand(&rats(&[1, 2]), &rats(&[2, 4]), &d).unwrap();
        assert_eq!(out.d1.get(0, 1), rat(1, 1));
        assert_eq!(out.d2.get(0, 1), rat(2, 1));
        assert_eq!(out.rotations, 0);
    }

    #[test]
    fn zero_demand_splits_to_zero() {
        let d = Demand::new(3);
        let out = split_demand(&rats(&[1, 1, 0]), &rats(&[2, 2, 0]), &d).unwrap();
        assert!(out.d1.is_zero());
        assert!(out.d2.is_zero());
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn zero_capacity_coordinate_split() {
        let d = demand(3, &[(0, 1, 3, 1)]);
        let out = split_demand(&rats(&[1, 1, 0]), &rats(&[2, 2, 0]), &d).unwrap();
        assert!(out.d1.get(0, 1) <= rat(1, 1));
        assert_eq!(&out.d1.get(0, 1) + &out.d2.get(0, 1), rat(3, 1));
    }

    #[test]
    fn rejects_disagreeing_stars() {
        let d = demand(2, &[(0, 1, 1, 1)]);
        match split_demand(&rats(&[1, 2]), &rats(&[1, 1]), &d) {
            Err(Error::SignatureMismatch(_)) => {}
            other => panic!("expected signature mismatch, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unroutable_demand() {
        let d = demand(2, &[(0, 1, 8, 1)]);
        match split_demand(&rats(&[1, 2]), &rats(&[2, 4]), &d) {
            Err(Error::InvalidDemand(_)) => {}
            other => panic!("expected invalid demand, got {other:?}"),
        }
    }

    #[test]
    fn rotation_resolves_the_triangle() {
        // Unit capacities and three unit demands admit only the half-half
        // split; the greedy phase lands on an integer corner and the
        // rotation must move half a unit to finish.
        let d = demand(3, &[(0, 1, 1, 1), (0, 2, 1, 1), (1, 2, 1, 1)]);
        let out = split_demand(&rats(&[1, 1, 1]), &rats(&[1, 1, 1]), &d).unwrap();
        assert_eq!(out.rotations, 1);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(out.d1.get(i, j), rat(1, 2), "d1 pair ({i},{j})");
            assert_eq!(out.d2.get(i, j), rat(1, 2), "d2 pair ({i},{j})");
        }
    }

    #[test]
    fn path_search_returns_trivial_path_on_slack_start() {
        let d = demand(2, &[(0, 1, 1, 1)]);
        let state = SplitState::new(&rats(&[1, 1]), &rats(&[1, 1]), &d).unwrap();
        assert_eq!(
            find_augmenting_path(&state, (0, 0)),
            PathSearch::Path(vec![(0, 0)])
        );
    }

    #[test]
    fn path_search_crosses_one_positive_arc() {
        let d = demand(2, &[(0, 1, 2, 1)]);
        let mut state = SplitState::new(&rats(&[1, 1]), &rats(&[2, 2]), &d).unwrap();
        state.assign(0, 0, 1, &rat(1, 1)).unwrap();
        // Star 0 is saturated at both terminals; its arc leads to star 1
        // where both nodes have room.
        assert_eq!(
            find_augmenting_path(&state, (0, 0)),
            PathSearch::Path(vec![(0, 0), (1, 1)])
        );
    }

    #[test]
    fn path_search_reports_saturated_set() {
        let d = demand(2, &[(0, 1, 3, 1)]);
        let mut state = SplitState::new(&rats(&[1, 1]), &rats(&[1, 1]), &d).unwrap();
        state.assign(0, 0, 1, &rat(1, 1)).unwrap();
        state.assign(1, 0, 1, &rat(1, 1)).unwrap();
        match find_augmenting_path(&state, (0, 0)) {
            PathSearch::Saturated(x) => {
                assert_eq!(x, BTreeSet::from([(0, 0), (1, 1)]));
            }
            other => panic!("expected saturated witness, got {other:?}"),
        }
    }

    #[test]
    fn adversarial_order_still_splits() {
        let d = demand(3, &[(0, 1, 1, 1), (0, 2, 1, 1), (1, 2, 1, 1)]);
        let c1 = rats(&[2, 1, 1]);
        let c2 = rats(&[2, 1, 1]);
        for order in [
            vec![(0, 1), (0, 2), (1, 2)],
            vec![(1, 2), (0, 2), (0, 1)],
            vec![(2, 1), (1, 0), (2, 0)],
        ] {
            let out = split_demand_with_order(&c1, &c2, &d, &order).unwrap();
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                assert_eq!(
                    &out.d1.get(i, j) + &out.d2.get(i, j),
                    rat(1, 1),
                    "pair ({i},{j}) under {order:?}"
                );
            }
            assert!(routable_in_star(&c1, &out.d1).unwrap());
            assert!(routable_in_star(&c2, &out.d2).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn random_scaled_pairs_split_cleanly(
            coords in proptest::collection::vec(0i64..5, 2..=4),
            num in 1i64..4,
            den in 1i64..4,
            picks in proptest::collection::vec((0usize..4, 0usize..4, 1i64..4), 1..6),
        ) {
            let k = coords.len();
            let c1: Vec<Rational> = coords.iter().map(|&v| rat(v, 1)).collect();
            let c2: Vec<Rational> = c1.iter().map(|c| c * rat(num, den)).collect();
            let merged: Vec<Rational> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
            let mut d = Demand::new(k);
            for (i, j, v) in picks {
                let (i, j) = (i % k, j % k);
                if i != j {
                    d.add(i, j, rat(v, 2)).unwrap();
                }
            }
            // Scale the demand into the merged star's row bounds.
            let mut worst = rat(1, 1);
            for i in 0..k {
                let row = d.row_sum(i);
                if row > merged[i] {
                    let ratio = &merged[i] / &row;
                    if ratio < worst {
                        worst = ratio;
                    }
                }
            }
            let d = d.scaled(&worst).unwrap();
            let out = split_demand(&c1, &c2, &d).unwrap();
            for ((i, j), value) in d.pairs() {
                prop_assert_eq!(&out.d1.get(i, j) + &out.d2.get(i, j), value.clone());
            }
            prop_assert!(routable_in_star(&c1, &out.d1).unwrap());
            prop_assert!(routable_in_star(&c2, &out.d2).unwrap());
        }
    }
}
