//! Concurrent-flow values, exactly.
//!
//! `flow_factor` answers: what is the largest lambda such that lambda times
//! the demand matrix routes simultaneously in the network? It builds the
//! edge-flow linear program (one flow variable per commodity per arc, one
//! coupling capacity row per edge) and solves it with the exact simplex from
//! [`crate::lp`]. The returned witness is re-checked against conservation,
//! balance and capacity on every call, so a buggy pivot cannot slip through
//! silently.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, LpOutcome, LpRow};
use crate::network::{Network, VertexId};
use crate::rational::Rational;

/// Symmetric demand matrix over terminal indices `0..k`, positive entries
/// only. Indices refer to positions in a network's terminal list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Demand {
    k: usize,
    pairs: BTreeMap<(usize, usize), Rational>,
}

impl Demand {
    pub fn new(k: usize) -> Self {
        Demand {
            k,
            pairs: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Adds demand between terminal indices `i` and `j`, accumulating with
    /// any existing amount. Zero is a no-op, negatives and diagonals are
    /// rejected.
    pub fn add(&mut self, i: usize, j: usize, value: Rational) -> Result<()> {
        if i == j {
            return Err(Error::InvalidDemand(format!(
                "demand between terminal {i} and itself"
            )));
        }
        if i >= self.k || j >= self.k {
            return Err(Error::InvalidDemand(format!(
                "terminal index out of range: ({i}, {j}) with k = {}",
                self.k
            )));
        }
        if value.is_negative() {
            return Err(Error::InvalidDemand(format!("negative demand {value}")));
        }
        if value.is_zero() {
            return Ok(());
        }
        *self
            .pairs
            .entry((i.min(j), i.max(j)))
            .or_insert_with(Rational::zero) += value;
        Ok(())
    }

    /// Removes demand between `i` and `j`. The pair must currently hold at
    /// least `value`; entries that reach zero are dropped.
    pub fn subtract(&mut self, i: usize, j: usize, value: &Rational) -> Result<()> {
        if value.is_negative() {
            return Err(Error::InvalidDemand(format!("negative demand {value}")));
        }
        if value.is_zero() {
            return Ok(());
        }
        let key = (i.min(j), i.max(j));
        let Some(slot) = self.pairs.get_mut(&key) else {
            return Err(Error::InvalidDemand(format!(
                "cannot remove {value} from empty pair ({i}, {j})"
            )));
        };
        if *slot < *value {
            return Err(Error::InvalidDemand(format!(
                "cannot remove {value} from pair ({i}, {j}) holding {slot}"
            )));
        }
        *slot -= value;
        if slot.is_zero() {
            self.pairs.remove(&key);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.pairs
            .get(&(i.min(j), i.max(j)))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Total demand incident to terminal index `i`.
    pub fn row_sum(&self, i: usize) -> Rational {
        self.pairs
            .iter()
            .filter(|((a, b), _)| *a == i || *b == i)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> + '_ {
        self.pairs.iter().map(|(&p, v)| (p, v))
    }

    pub fn is_zero(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.pairs.len()
    }

    pub fn scaled(&self, by: &Rational) -> Result<Demand> {
        let mut out = Demand::new(self.k);
        for (&(i, j), v) in &self.pairs {
            out.add(i, j, v * by)?;
        }
        Ok(out)
    }
}

/// A flow value, with a genuine infinity for the zero demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lambda {
    Finite(Rational),
    Infinite,
}

impl Lambda {
    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            Lambda::Finite(r) => Some(r),
            Lambda::Infinite => None,
        }
    }
}

impl std::fmt::Display for Lambda {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Lambda::Finite(r) => write!(f, "{r}"),
            Lambda::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CommodityFlow {
    pub source: VertexId,
    pub sink: VertexId,
    pub demand: Rational,
    /// Directed arc flows, positive entries only.
    pub arcs: BTreeMap<(VertexId, VertexId), Rational>,
}

#[derive(Debug, Clone)]
pub struct FlowFactorResult {
    pub lambda: Lambda,
    pub commodities: Vec<CommodityFlow>,
}

const MAX_LP_TERMINALS: usize = 12;
const MAX_LP_EDGES: usize = 400;

/// Largest exact lambda with `lambda * demand` simultaneously routable,
/// plus a per-commodity witness flow at that lambda.
pub fn flow_factor(net: &Network, demand: &Demand) -> Result<FlowFactorResult> {
    if demand.k() != net.k() {
        return Err(Error::DimensionMismatch {
            expected: net.k(),
            got: demand.k(),
        });
    }
    if net.k() > MAX_LP_TERMINALS {
        return Err(Error::TooLarge(format!("{} terminals", net.k())));
    }
    if net.edge_count() > MAX_LP_EDGES {
        return Err(Error::TooLarge(format!("{} edges", net.edge_count())));
    }
    if demand.is_zero() {
        return Ok(FlowFactorResult {
            lambda: Lambda::Infinite,
            commodities: Vec::new(),
        });
    }

    let vertices: Vec<VertexId> = net.vertices().collect();
    let vindex: BTreeMap<VertexId, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edges: Vec<(usize, usize, Rational)> = net
        .edges()
        .map(|(u, v, c)| (vindex[&u], vindex[&v], c.clone()))
        .collect();
    let mut arcs: Vec<(usize, usize)> = Vec::with_capacity(edges.len() * 2);
    for &(u, v, _) in &edges {
        arcs.push((u, v));
        arcs.push((v, u));
    }

    struct Commodity {
        src: usize,
        dst: usize,
        amount: Rational,
    }
    let commodities: Vec<Commodity> = demand
        .pairs()
        .map(|((i, j), v)| Commodity {
            src: vindex[&net.terminals()[i]],
            dst: vindex[&net.terminals()[j]],
            amount: v.clone(),
        })
        .collect();

    // variable 0 is lambda; flow variables follow per commodity per arc.
    // Arcs into a source or out of a sink never help and are omitted.
    let mut var_of: Vec<Vec<Option<usize>>> = Vec::with_capacity(commodities.len());
    let mut num_vars = 1usize;
    for com in &commodities {
        let mut per_arc = Vec::with_capacity(arcs.len());
        for &(u, v) in &arcs {
            if v == com.src || u == com.dst {
                per_arc.push(None);
            } else {
                per_arc.push(Some(num_vars));
                num_vars += 1;
            }
        }
        var_of.push(per_arc);
    }

    let mut rows: Vec<LpRow> = Vec::new();
    // capacity coupling: both directions of every commodity share the edge
    for (e, &(_, _, ref cap)) in edges.iter().enumerate() {
        let mut coeffs = Vec::new();
        for per_arc in &var_of {
            for a in [2 * e, 2 * e + 1] {
                if let Some(j) = per_arc[a] {
                    coeffs.push((j, Rational::one()));
                }
            }
        }
        rows.push(LpRow {
            coeffs,
            cmp: Cmp::Le,
            rhs: cap.clone(),
        });
    }
    // conservation and source balance
    for (c, com) in commodities.iter().enumerate() {
        let mut incident: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); vertices.len()];
        for (a, &(u, v)) in arcs.iter().enumerate() {
            if let Some(j) = var_of[c][a] {
                incident[u].push((j, Rational::one()));  // outgoing at u
                incident[v].push((j, -Rational::one())); // incoming at v
            }
        }
        for (v, coeffs) in incident.into_iter().enumerate() {
            if v == com.dst {
                continue; // implied by the rest
            }
            let mut coeffs = coeffs;
            let rhs = Rational::zero();
            if v == com.src {
                coeffs.push((0, -com.amount.clone()));
            } else if coeffs.is_empty() {
                continue;
            }
            rows.push(LpRow {
                coeffs,
                cmp: Cmp::Eq,
                rhs,
            });
        }
    }

    let lp = LinearProgram {
        num_vars,
        objective: vec![(0, Rational::one())],
        rows,
    };
    let solution = match crate::lp::maximize(&lp)? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Unbounded => {
            return Err(Error::Internal(
                "flow factor unbounded for a nonzero demand".into(),
            ))
        }
        LpOutcome::Infeasible => {
            return Err(Error::Internal(
                "flow factor infeasible although zero routes".into(),
            ))
        }
    };

    let lambda = solution.values[0].clone();
    let mut out_commodities = Vec::with_capacity(commodities.len());
    for (c, com) in commodities.iter().enumerate() {
        let mut arc_flows = BTreeMap::new();
        for (a, &(u, v)) in arcs.iter().enumerate() {
            if let Some(j) = var_of[c][a] {
                let f = &solution.values[j];
                if f.is_positive() {
                    arc_flows.insert((vertices[u], vertices[v]), f.clone());
                }
            }
        }
        out_commodities.push(CommodityFlow {
            source: vertices[com.src],
            sink: vertices[com.dst],
            demand: com.amount.clone(),
            arcs: arc_flows,
        });
    }
    let result = FlowFactorResult {
        lambda: Lambda::Finite(lambda),
        commodities: out_commodities,
    };
    verify_witness(net, &result)?;
    Ok(result)
}

/// Exact feasibility check of a witness: conservation at interior vertices,
/// balance `lambda * demand` at endpoints, and edge capacities. Runs on
/// every solve.
fn verify_witness(net: &Network, result: &FlowFactorResult) -> Result<()> {
    let lambda = match &result.lambda {
        Lambda::Finite(l) => l,
        Lambda::Infinite => return Ok(()),
    };
    let fail = |msg: String| Err(Error::Internal(format!("witness check failed: {msg}")));
    let mut edge_load: BTreeMap<(VertexId, VertexId), Rational> = BTreeMap::new();
    for com in &result.commodities {
        let mut balance: BTreeMap<VertexId, Rational> = BTreeMap::new();
        for (&(u, v), f) in &com.arcs {
            if f.is_negative() {
                return fail(format!("negative arc flow on ({u}, {v})"));
            }
            *balance.entry(u).or_insert_with(Rational::zero) += f;
            *balance.entry(v).or_insert_with(Rational::zero) -= f;
            *edge_load
                .entry((u.min(v), u.max(v)))
                .or_insert_with(Rational::zero) += f;
        }
        let want = lambda * &com.demand;
        for (v, b) in balance {
            let expect = if v == com.source {
                want.clone()
            } else if v == com.sink {
                -want.clone()
            } else {
                Rational::zero()
            };
            if b != expect {
                return fail(format!(
                    "balance at {v} is {b}, expected {expect} for ({}, {})",
                    com.source, com.sink
                ));
            }
        }
    }
    for ((u, v), load) in edge_load {
        if load > net.capacity(u, v) {
            return fail(format!("edge ({u}, {v}) overloaded: {load}"));
        }
    }
    Ok(())
}

/// Whether a single star with coordinate vector `c` routes `d` outright:
/// every terminal's total demand fits its spoke.
pub fn routable_in_star(c: &[Rational], d: &Demand) -> Result<bool> {
    if c.len() != d.k() {
        return Err(Error::DimensionMismatch {
            expected: c.len(),
            got: d.k(),
        });
    }
    Ok((0..c.len()).all(|i| d.row_sum(i) <= c[i]))
}

/// Closed-form flow factor of a single star: the worst spoke ratio
/// `c_i / d(i)`. Serves as an independent oracle for the LP path.
pub fn star_flow_factor(c: &[Rational], d: &Demand) -> Result<Lambda> {
    if c.len() != d.k() {
        return Err(Error::DimensionMismatch {
            expected: c.len(),
            got: d.k(),
        });
    }
    let mut best: Option<Rational> = None;
    for i in 0..c.len() {
        let load = d.row_sum(i);
        if load.is_zero() {
            continue;
        }
        let ratio = &c[i] / load;
        if best.as_ref().map_or(true, |b| ratio < *b) {
            best = Some(ratio);
        }
    }
    Ok(match best {
        Some(r) => Lambda::Finite(r),
        None => Lambda::Infinite,
    })
}

#[derive(Debug, Clone)]
pub struct FlowViolation {
    pub demand_index: usize,
    pub lambda_g: Lambda,
    pub lambda_h: Lambda,
}

#[derive(Debug, Clone)]
pub struct FlowVerifyReport {
    pub checked: usize,
    pub violations: Vec<FlowViolation>,
}

impl FlowVerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `lambda_g(d) <= lambda_h(d) <= quality * lambda_g(d)` for each
/// given demand. Terminal prefix rules match the cut verifier.
pub fn verify_flow_sparsifier(
    g: &Network,
    h: &Network,
    demands: &[Demand],
    quality: &Rational,
) -> Result<FlowVerifyReport> {
    if *quality < Rational::one() {
        return Err(Error::Internal(format!("quality {quality} below one")));
    }
    let k = g.k();
    if h.terminals().len() < k || h.terminals()[..k] != *g.terminals() {
        return Err(Error::TerminalMismatch(
            "sparsifier must carry the source terminals in order".into(),
        ));
    }
    let hv = if h.terminals().len() == k {
        h.clone()
    } else {
        h.with_terminals(g.terminals().iter().copied())?
    };
    let mut report = FlowVerifyReport {
        checked: 0,
        violations: Vec::new(),
    };
    for (idx, d) in demands.iter().enumerate() {
        let lg = flow_factor(g, d)?.lambda;
        let lh = flow_factor(&hv, d)?.lambda;
        report.checked += 1;
        let ok = match (&lg, &lh) {
            (Lambda::Infinite, Lambda::Infinite) => true,
            (Lambda::Finite(a), Lambda::Finite(b)) => b >= a && *b <= quality * a,
            // a zero demand is infinite on both sides; mixed cases are bugs
            _ => false,
        };
        if !ok {
            report.violations.push(FlowViolation {
                demand_index: idx,
                lambda_g: lg,
                lambda_h: lh,
            });
        }
    }
    Ok(report)
}
