//! Acceptance criteria for the workspace: seeded end-to-end checks, one per
//! headline guarantee, all at zero tolerance. Failures are reported in the
//! returned record, never thrown; errors from the library count as failures
//! of the criterion that hit them.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num::{One, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sparsekit::bipartite::{sparsify_cut_contraction, sparsify_flow_contraction};
use sparsekit::error::Result;
use sparsekit::extensions::{
    sparsify_vertex_cover, sparsify_vertex_integrity, split_by_separator, ContractionKind,
};
use sparsekit::flow::{flow_factor, routable_in_star, verify_flow_sparsifier, Demand, Lambda};
use sparsekit::mincut::{brute_force_min_cut, min_cut, verify_cut_sparsifier};
use sparsekit::network::{Network, VertexId};
use sparsekit::rational::{format_rational, rat, Rational};
use sparsekit::rays::{build_basic_star_sparsifier, caratheodory_decompose};
use sparsekit::signature::{cut_signature, strong_signature};
use sparsekit::split::{split_demand, split_demand_with_order, SplitResult};
use sparsekit::treewidth::{
    mimicking_blackbox, normalize_decomposition, plan_reduction, reduce, scaling_blackbox,
};

use crate::generate::{
    generate, random_capacity_vector, random_demand, routable_star_demand, Distribution,
    InstanceKind, InstanceSpec,
};

pub const SUITES: &[&str] = &["cut", "flow", "polyhedral", "extensions", "treewidth", "all"];

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionReport {
    /// Human-readable status line.
    pub fn line(&self) -> String {
        format!(
            "{}: {} [{:.1}s] {}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }

    /// Tab-separated record for the machine-readable summary file.
    pub fn record(&self) -> String {
        format!(
            "{}\t{}\t{:.3}\t{}",
            self.name,
            if self.passed { "pass" } else { "fail" },
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Pass detail or failure detail; library errors convert into failures.
type Outcome = std::result::Result<String, String>;

fn chk<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("error: {e}"))
}

fn run_criterion(name: &'static str, body: impl FnOnce() -> Outcome) -> CriterionReport {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(detail) => (true, detail),
        Err(detail) => (false, detail),
    };
    CriterionReport {
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn lambda_str(l: &Lambda) -> String {
    match l.as_finite() {
        Some(r) => format_rational(r),
        None => "inf".into(),
    }
}

fn alternating_distribution(i: usize) -> Distribution {
    if i % 2 == 0 {
        Distribution::default_uniform()
    } else {
        Distribution::default_small_support()
    }
}

fn quasi_bipartite_spec(k: usize, stars: usize, dist: Distribution, seed: u64) -> InstanceSpec {
    InstanceSpec {
        kind: InstanceKind::QuasiBipartite,
        k,
        n: k + stars,
        a: 0,
        b: 0,
        w: 0,
        distribution: dist,
        seed,
    }
}

fn cut_case(k: usize, i: usize, one: &Rational) -> std::result::Result<usize, String> {
    let seed = 0xC1_0000 + (k as u64) * 1009 + i as u64;
    let mut meta = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let stars = meta.gen_range(1..=200);
    let spec = quasi_bipartite_spec(k, stars, alternating_distribution(i), seed);
    let g = chk(generate(&spec))?.network;
    let h = chk(sparsify_cut_contraction(&g))?.network;
    let report = chk(verify_cut_sparsifier(&g, &h, one))?;
    if !report.passed() {
        let v = &report.violations[0];
        return Err(format!(
            "k={k} seed={seed}: side {:?} has cut {} in the input but {} in the sparsifier",
            v.side,
            format_rational(&v.kappa_g),
            format_rational(&v.kappa_h)
        ));
    }
    Ok(report.checked)
}

/// Criterion: contraction by weak signature is an exact cut sparsifier on
/// random quasi-bipartite inputs, every bipartition checked.
pub fn criterion_cut_exactness() -> CriterionReport {
    run_criterion("cut-exactness", || {
        let one = Rational::one();
        let cases: Vec<(usize, usize)> = (2..=6usize)
            .flat_map(|k| (0..100usize).map(move |i| (k, i)))
            .collect();
        let instances = cases.len();
        let counts = cases
            .into_par_iter()
            .map(|(k, i)| cut_case(k, i, &one))
            .collect::<std::result::Result<Vec<_>, String>>()?;
        let bipartitions: usize = counts.iter().sum();
        Ok(format!(
            "{instances} instances, {bipartitions} bipartitions exact"
        ))
    })
}

/// Criterion: rebuilding every star from its conic decomposition yields an
/// exact sparsifier within the size bound, and each decomposition is short,
/// exact, and signature-respecting.
pub fn criterion_basic_star() -> CriterionReport {
    run_criterion("basic-star-construction", || {
        let one = Rational::one();
        let mut decomposed = 0usize;
        for k in 2..=4usize {
            let terminals: Vec<VertexId> = (1..=k as VertexId).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(0xBA51C + k as u64);
            let stars: Vec<Vec<Rational>> = (0..200)
                .map(|i| random_capacity_vector(k, &alternating_distribution(i), &mut rng))
                .collect();
            let g = chk(Network::star_network(&terminals, &stars))?;
            let h = chk(build_basic_star_sparsifier(&stars, &terminals, false))?;
            if h.vertex_count() > k + (1usize << (k * k)) {
                return Err(format!(
                    "k={k}: {} vertices exceed the k + 2^(k^2) bound",
                    h.vertex_count()
                ));
            }
            let report = chk(verify_cut_sparsifier(&g, &h, &one))?;
            if !report.passed() {
                return Err(format!("k={k}: rebuilt star network is not cut-exact"));
            }
            for star in &stars {
                let dec = chk(caratheodory_decompose(star, false, false))?;
                if dec.terms.len() > k {
                    return Err(format!(
                        "k={k}: decomposition used {} terms",
                        dec.terms.len()
                    ));
                }
                if dec.reconstruct() != *star {
                    return Err(format!("k={k}: decomposition does not reconstruct"));
                }
                let sig = chk(cut_signature(star))?;
                for term in &dec.terms {
                    if !chk(cut_signature(&term.ray.coords))?.superset_of(&sig) {
                        return Err(format!("k={k}: term leaves the signature cone"));
                    }
                }
                decomposed += 1;
            }
        }
        Ok(format!(
            "600 stars rebuilt exactly, {decomposed} decompositions within k terms"
        ))
    })
}

fn unit_pair_demands(k: usize) -> Result<Vec<Demand>> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let mut d = Demand::new(k);
            d.add(i, j, Rational::one())?;
            out.push(d);
        }
    }
    Ok(out)
}

fn scale_all_edges(net: &Network, factor: &Rational) -> Result<Network> {
    let mut out = Network::new(net.vertices(), net.terminals().iter().copied())?;
    for (u, v, c) in net.edges() {
        out.add_edge(u, v, c * factor)?;
    }
    Ok(out)
}

/// Criterion: contraction by strong signature preserves the flow factor of
/// every tested demand exactly, and merging a strong-unequal pair is caught.
/// With `fault_injection`, additionally corrupts one sparsifier and demands
/// the verifier notice.
fn flow_instance(
    k: usize,
    max_stars: usize,
    i: usize,
) -> std::result::Result<(u64, Network, Vec<Demand>), String> {
    let seed = 0xF7_0000 + (k as u64) * 131 + i as u64;
    let mut meta = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let stars = meta.gen_range(2..=max_stars);
    let spec = quasi_bipartite_spec(k, stars, alternating_distribution(i), seed);
    let g = chk(generate(&spec))?.network;
    let mut demands = chk(unit_pair_demands(k))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xDE);
    for _ in 0..50 {
        demands.push(chk(random_demand(k, &mut rng))?);
    }
    Ok((seed, g, demands))
}

fn flow_case(k: usize, max_stars: usize, i: usize, one: &Rational) -> std::result::Result<usize, String> {
    let (seed, g, demands) = flow_instance(k, max_stars, i)?;
    let h = chk(sparsify_flow_contraction(&g))?.network;
    let report = chk(verify_flow_sparsifier(&g, &h, &demands, one))?;
    if !report.passed() {
        let v = &report.violations[0];
        return Err(format!(
            "k={k} seed={seed}: demand {} has flow factor {} in the input but {} in the sparsifier",
            v.demand_index,
            lambda_str(&v.lambda_g),
            lambda_str(&v.lambda_h)
        ));
    }
    Ok(report.checked)
}

pub fn criterion_flow_exactness(fault_injection: bool) -> CriterionReport {
    run_criterion("flow-exactness", || {
        let one = Rational::one();
        let cases: Vec<(usize, usize, usize)> = [(2usize, 30usize), (3, 30), (4, 30)]
            .iter()
            .flat_map(|&(k, m)| (0..10usize).map(move |i| (k, m, i)))
            .collect();
        let instances = cases.len();
        let counts = cases
            .into_par_iter()
            .map(|(k, m, i)| flow_case(k, m, i, &one))
            .collect::<std::result::Result<Vec<_>, String>>()?;
        let lambda_checks: usize = counts.iter().sum();

        let mut injected = String::new();
        if fault_injection {
            let (_, g, demands) = flow_instance(2, 30, 0)?;
            let h = chk(sparsify_flow_contraction(&g))?.network;
            let bad = chk(scale_all_edges(&h, &rat(2, 1)))?;
            let rep = chk(verify_flow_sparsifier(&g, &bad, &demands, &one))?;
            let Some(v) = rep.violations.first() else {
                return Err("fault injection: doubled sparsifier passed verification".into());
            };
            injected = format!(
                "; injected fault detected at demand {} (lambda {} vs {})",
                v.demand_index,
                lambda_str(&v.lambda_g),
                lambda_str(&v.lambda_h)
            );
        }

        // negative control: two stars whose strong signatures differ; the
        // merged star must change some flow factor, pinned at d = (0, 2, 5)
        let terminals: Vec<VertexId> = vec![1, 2, 3];
        let g = chk(Network::star_network(
            &terminals,
            &[
                vec![rat(1, 1), rat(2, 1), rat(4, 1)],
                vec![rat(1, 1), rat(3, 1), rat(3, 1)],
            ],
        ))?;
        let h = chk(Network::star_network(
            &terminals,
            &[vec![rat(2, 1), rat(5, 1), rat(7, 1)]],
        ))?;
        let mut discrepancy: Option<(i64, i64, i64)> = None;
        'search: for d12 in 0..=5i64 {
            for d13 in 0..=5i64 {
                for d23 in 0..=5i64 {
                    if d12 == 0 && d13 == 0 && d23 == 0 {
                        continue;
                    }
                    let mut d = Demand::new(3);
                    chk(d.add(0, 1, rat(d12, 1)))?;
                    chk(d.add(0, 2, rat(d13, 1)))?;
                    chk(d.add(1, 2, rat(d23, 1)))?;
                    let lg = chk(flow_factor(&g, &d))?.lambda;
                    let lh = chk(flow_factor(&h, &d))?.lambda;
                    if lg != lh {
                        discrepancy = Some((d12, d13, d23));
                        break 'search;
                    }
                }
            }
        }
        if discrepancy.is_none() {
            return Err("negative control: merged strong-unequal pair kept all flow factors".into());
        }
        let mut frozen = Demand::new(3);
        chk(frozen.add(0, 2, rat(2, 1)))?;
        chk(frozen.add(1, 2, rat(5, 1)))?;
        let lg = chk(flow_factor(&g, &frozen))?.lambda;
        let lh = chk(flow_factor(&h, &frozen))?.lambda;
        if lg != Lambda::Finite(rat(6, 7)) || lh != Lambda::Finite(rat(1, 1)) {
            return Err(format!(
                "negative control drifted: demand (0, 2, 5) gives {} vs {}",
                lambda_str(&lg),
                lambda_str(&lh)
            ));
        }
        Ok(format!(
            "{instances} instances, {lambda_checks} flow factors exact; negative control caught at demand (0, 2, 5): 6/7 vs 1{injected}"
        ))
    })
}

fn check_split(
    c1: &[Rational],
    c2: &[Rational],
    d: &Demand,
    out: &SplitResult,
) -> std::result::Result<(), String> {
    let mut sum = Demand::new(d.k());
    for ((i, j), v) in out.d1.pairs() {
        chk(sum.add(i, j, v.clone()))?;
    }
    for ((i, j), v) in out.d2.pairs() {
        chk(sum.add(i, j, v.clone()))?;
    }
    if sum != *d {
        return Err("split parts do not re-add to the demand".into());
    }
    if !chk(routable_in_star(c1, &out.d1))? {
        return Err("first part is not routable in its star".into());
    }
    if !chk(routable_in_star(c2, &out.d2))? {
        return Err("second part is not routable in its star".into());
    }
    let bound = d.support_size() * (2 * d.k() + 1);
    if out.iterations > bound {
        return Err(format!(
            "{} iterations exceed the {bound} bound",
            out.iterations
        ));
    }
    Ok(())
}

/// Criterion: splitting a routable demand across a strongly-agreeing star
/// pair always succeeds with routable, exactly re-adding parts inside the
/// iteration bound; a scaled unit-triangle family forces path rotations.
pub fn criterion_demand_splitting() -> CriterionReport {
    run_criterion("demand-splitting", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5B117);
        let mut rotation_runs = 0usize;
        for _ in 0..440usize {
            let k = rng.gen_range(2..=5);
            let c1 = random_capacity_vector(k, &Distribution::default_uniform(), &mut rng);
            let c2 = agreeing_partner(&c1, &mut rng);
            let merged: Vec<Rational> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
            let d = chk(routable_star_demand(&merged, &mut rng))?;
            let out = chk(split_demand(&c1, &c2, &d))?;
            check_split(&c1, &c2, &d, &out)?;
            if out.rotations > 0 {
                rotation_runs += 1;
            }
        }
        // adversarial family: unit triangle scaled by s admits only the
        // half-half split, so every processing order must rotate
        for _ in 0..60usize {
            let s = rat(rng.gen_range(1..=6), rng.gen_range(1..=3));
            let c = vec![s.clone(), s.clone(), s.clone()];
            let mut d = Demand::new(3);
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                chk(d.add(i, j, s.clone()))?;
            }
            let mut order = [(0usize, 1usize), (0, 2), (1, 2)];
            order.shuffle(&mut rng);
            let out = chk(split_demand_with_order(&c, &c, &d, &order))?;
            check_split(&c, &c, &d, &out)?;
            if out.rotations == 0 {
                return Err("triangle instance split without rotating".into());
            }
            rotation_runs += 1;
        }
        if rotation_runs < 50 {
            return Err(format!(
                "only {rotation_runs} runs exercised the rotation branch"
            ));
        }
        Ok(format!(
            "500 splits exact and routable, {rotation_runs} exercised rotation"
        ))
    })
}

/// Companion star with the same strong signature: usually a scaled copy,
/// sometimes a perturbation that is kept only when the signature survives.
fn agreeing_partner(c1: &[Rational], rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let scaled = |rng: &mut ChaCha8Rng| {
        let f = rat(rng.gen_range(1..=5), rng.gen_range(1..=3));
        c1.iter().map(|x| x * &f).collect::<Vec<Rational>>()
    };
    if rng.gen_bool(0.5) {
        return scaled(rng);
    }
    let base = strong_signature(c1).expect("capacity vector is valid");
    for _ in 0..5 {
        let candidate: Vec<Rational> = c1
            .iter()
            .map(|x| x * (Rational::one() + rat(rng.gen_range(-1..=1), 64)))
            .collect();
        if candidate.iter().any(|x| *x <= Rational::zero()) {
            continue;
        }
        if let Ok(sig) = strong_signature(&candidate) {
            if sig.agrees(&base) {
                return candidate;
            }
        }
    }
    scaled(rng)
}

/// Criterion: the vertex-cover and vertex-integrity reductions are exact,
/// respect their size accounting, and actually contract on small-support
/// instances in every parameter configuration.
pub fn criterion_cover_integrity() -> CriterionReport {
    run_criterion("cover-and-integrity", || {
        let one = Rational::one();
        // vertex cover: configurations (k, a) with k terminals and a extra
        // cover vertices; the first sweep is small-support so every
        // configuration sees a duplicated star
        let mut vc_fired: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut vc_configs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for idx in 0..50usize {
            let k = 2 + (idx / 4) % 4;
            let a = idx % 4;
            vc_configs.insert((k, a));
            let seed = 0x5C_0000 + idx as u64;
            let mut meta = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
            let extra = meta.gen_range(3..=10);
            let dist = if idx < 16 {
                Distribution::default_small_support()
            } else {
                alternating_distribution(idx)
            };
            let spec = InstanceSpec {
                kind: InstanceKind::VertexCover,
                k,
                n: k + a + extra,
                a,
                b: 0,
                w: 0,
                distribution: dist,
                seed,
            };
            let inst = chk(generate(&spec))?;
            let g = inst.network;
            let cover: BTreeSet<VertexId> = inst.cover.expect("cover sidecar").into_iter().collect();
            let h = chk(sparsify_vertex_cover(&g, &cover, ContractionKind::Cut))?;
            let g_recast = chk(g.with_terminals(h.terminals().iter().copied()))?;
            let report = chk(verify_cut_sparsifier(&g_recast, &h, &one))?;
            if !report.passed() {
                return Err(format!("cover instance seed={seed} is not cut-exact"));
            }
            if h.vertex_count() > g.vertex_count() {
                return Err(format!("cover instance seed={seed} grew"));
            }
            if h.vertex_count() < g.vertex_count() {
                vc_fired.insert((k, a));
            }
        }
        if vc_fired != vc_configs {
            return Err(format!(
                "cover contraction never fired for configurations {:?}",
                vc_configs.difference(&vc_fired).collect::<Vec<_>>()
            ));
        }

        // vertex integrity: configurations (a, b, k); small-support sweeps
        // guarantee two same-shape components
        let mut vi_fired: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        let mut vi_configs: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        let mut merged_groups = 0usize;
        for idx in 0..50usize {
            let a = 1 + idx % 3;
            let b = 1 + (idx / 3) % 2;
            let k = 2 + (idx / 6) % 4;
            vi_configs.insert((a, b, k));
            let seed = 0x51_0000 + idx as u64;
            let mut meta = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
            let body = meta.gen_range(2 * b + 1..=2 * b + 6);
            let dist = if idx < 24 {
                Distribution::default_small_support()
            } else {
                alternating_distribution(idx)
            };
            let spec = InstanceSpec {
                kind: InstanceKind::VertexIntegrity,
                k,
                n: k + a + body,
                a,
                b,
                w: 0,
                distribution: dist,
                seed,
            };
            let inst = chk(generate(&spec))?;
            let g = inst.network;
            let separator: BTreeSet<VertexId> =
                inst.separator.expect("separator sidecar").into_iter().collect();
            let result = chk(sparsify_vertex_integrity(&g, &separator, b))?;
            let report = chk(verify_cut_sparsifier(&g, &result.network, &one))?;
            if !report.passed() {
                return Err(format!("integrity instance seed={seed} is not cut-exact"));
            }
            let bound = k * b + a + result.groups.len() * b;
            if result.network.vertex_count() > bound {
                return Err(format!(
                    "integrity instance seed={seed}: {} vertices exceed the bound {bound}",
                    result.network.vertex_count()
                ));
            }
            let input_components = chk(split_by_separator(&g, &separator, b))?.components.len();
            if result.groups.len() < input_components {
                vi_fired.insert((a, b, k));
                merged_groups += input_components - result.groups.len();
            }
        }
        if vi_fired != vi_configs {
            return Err(format!(
                "integrity contraction never fired for configurations {:?}",
                vi_configs.difference(&vi_fired).collect::<Vec<_>>()
            ));
        }
        Ok(format!(
            "100 instances exact within size bounds; contraction fired in all {} cover and {} integrity configurations ({merged_groups} components merged)",
            vc_configs.len(),
            vi_configs.len()
        ))
    })
}

/// Criterion: the treewidth reduction's structural bounds hold, the
/// mimicking black box composes to an exact sparsifier, and a quality-2
/// black box stays inside the quality-2 sandwich.
pub fn criterion_treewidth_reduction() -> CriterionReport {
    run_criterion("treewidth-reduction", || {
        let one = Rational::one();
        let two = rat(2, 1);
        let mut regions_seen = 0usize;
        for idx in 0..50usize {
            let w = 1 + idx % 3;
            let k = 2 + (idx / 3) % 4;
            let seed = 0x7D_0000 + idx as u64;
            let mut meta = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
            let n = w + 1 + meta.gen_range(5..=11);
            let spec = InstanceSpec {
                kind: InstanceKind::BoundedTreewidth,
                k,
                n,
                a: 0,
                b: 0,
                w,
                distribution: alternating_distribution(idx),
                seed,
            };
            let inst = chk(generate(&spec))?;
            let g = inst.network;
            let raw = inst.decomposition.expect("decomposition sidecar");
            let td = chk(normalize_decomposition(&g, &raw))?;
            let plan = chk(plan_reduction(&g, &td))?;
            if plan.y_set.len() > 2 * k {
                return Err(format!(
                    "seed={seed}: {} selected nodes exceed 2k",
                    plan.y_set.len()
                ));
            }
            if plan.regions.len() > 2 * plan.y_set.len() {
                return Err(format!(
                    "seed={seed}: {} regions exceed twice the node set",
                    plan.regions.len()
                ));
            }
            let mut region_edges = 0usize;
            for region in &plan.regions {
                if region.network.k() > 2 * w {
                    return Err(format!(
                        "seed={seed}: a region has {} terminals, above 2w = {}",
                        region.network.k(),
                        2 * w
                    ));
                }
                region_edges += region.network.edge_count();
            }
            if region_edges + plan.terminal_part.edge_count() != g.edge_count() {
                return Err(format!("seed={seed}: edge partition identity failed"));
            }
            regions_seen += plan.regions.len();

            let h = chk(reduce(&g, &td, &mimicking_blackbox))?;
            let report = chk(verify_cut_sparsifier(&g, &h, &one))?;
            if !report.passed() {
                return Err(format!("seed={seed}: mimicking reduction is not exact"));
            }
            let h2 = chk(reduce(&g, &td, &scaling_blackbox(two.clone())))?;
            let report2 = chk(verify_cut_sparsifier(&g, &h2, &two))?;
            if !report2.passed() {
                let v = &report2.violations[0];
                return Err(format!(
                    "seed={seed}: quality-2 sandwich broken at side {:?} ({} vs {})",
                    v.side,
                    format_rational(&v.kappa_g),
                    format_rational(&v.kappa_h)
                ));
            }
        }
        Ok(format!(
            "50 instances: structural bounds hold over {regions_seen} regions, mimicking exact, quality-2 sandwich tight"
        ))
    })
}

/// Criterion: the exact min-cut oracle matches brute-force enumeration, and
/// the flow LP matches the closed-form star flow factor.
pub fn criterion_oracle_consistency() -> CriterionReport {
    run_criterion("oracle-consistency", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1E);
        let dist = Distribution::default_uniform();
        let mut cut_checks = 0usize;
        for _ in 0..200usize {
            let n = rng.gen_range(2..=10usize);
            let k = rng.gen_range(2..=5usize.min(n));
            let terminals: Vec<VertexId> = (1..=k as VertexId).collect();
            let mut net = chk(Network::new(
                1..=n as VertexId,
                terminals.iter().copied(),
            ))?;
            for u in 1..=n as VertexId {
                for v in u + 1..=n as VertexId {
                    if rng.gen_bool(0.5) {
                        chk(net.add_edge(u, v, dist.sample(&mut rng)))?;
                    }
                }
            }
            for mask in 1u32..(1u32 << k) - 1 {
                let side: BTreeSet<VertexId> = terminals
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &t)| t)
                    .collect();
                let fast = chk(min_cut(&net, &side))?.value;
                let brute = chk(brute_force_min_cut(&net, &side))?;
                if fast != brute {
                    return Err(format!(
                        "min cut {} disagrees with enumeration {} on a {n}-vertex network",
                        format_rational(&fast),
                        format_rational(&brute)
                    ));
                }
                cut_checks += 1;
            }
        }
        let mut flow_checks = 0usize;
        for _ in 0..200usize {
            let k = rng.gen_range(2..=5usize);
            let c = random_capacity_vector(k, &dist, &mut rng);
            let terminals: Vec<VertexId> = (1..=k as VertexId).collect();
            let star = chk(Network::star_network(&terminals, &[c.clone()]))?;
            let d = chk(random_demand(k, &mut rng))?;
            let lp = chk(flow_factor(&star, &d))?.lambda;
            let mut closed: Option<Rational> = None;
            for i in 0..k {
                let load = d.row_sum(i);
                if load.is_zero() {
                    continue;
                }
                let ratio = &c[i] / load;
                if closed.as_ref().map_or(true, |b| ratio < *b) {
                    closed = Some(ratio);
                }
            }
            let expect = closed.map(Lambda::Finite).unwrap_or(Lambda::Infinite);
            if lp != expect {
                return Err(format!(
                    "star flow factor {} disagrees with closed form {}",
                    lambda_str(&lp),
                    lambda_str(&expect)
                ));
            }
            flow_checks += 1;
        }
        Ok(format!(
            "{cut_checks} cuts match enumeration, {flow_checks} star flow factors match the closed form"
        ))
    })
}

/// Runs one named suite; `None` for an unknown name. The fault-injection
/// flag only affects the flow criterion.
pub fn run_suite(suite: &str, fault_injection: bool) -> Option<Vec<CriterionReport>> {
    let reports = match suite {
        "cut" => vec![criterion_cut_exactness()],
        "flow" => vec![
            criterion_flow_exactness(fault_injection),
            criterion_demand_splitting(),
        ],
        "polyhedral" => vec![criterion_basic_star()],
        "extensions" => vec![criterion_cover_integrity()],
        "treewidth" => vec![criterion_treewidth_reduction()],
        "all" => vec![
            criterion_cut_exactness(),
            criterion_basic_star(),
            criterion_flow_exactness(fault_injection),
            criterion_demand_splitting(),
            criterion_cover_integrity(),
            criterion_treewidth_reduction(),
            criterion_oracle_consistency(),
        ],
        _ => return None,
    };
    Some(reports)
}
