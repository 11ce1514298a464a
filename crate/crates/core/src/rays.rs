//! Basic stars and conic decomposition.
//!
//! The capacity vectors compatible with a fixed signature form a polyhedral
//! cone. Its extreme rays, normalized to coordinate sum 1, are the basic
//! stars: any star decomposes exactly as a nonnegative combination of at
//! most k basic stars whose signatures agree with its own. The
//! decomposition is constructive: repeatedly pick an extreme ray of the
//! minimal face containing the residual, subtract as much of it as fits,
//! and the face shrinks each round.
//!
//! All arithmetic is exact; ties in the ratio test go to the first
//! candidate in a fixed enumeration order, so results are deterministic.

use itertools::Itertools;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::network::{Network, VertexId};
use crate::rational::Rational;
use crate::signature::{
    cut_signature, strong_pairs, strong_signature, subset_sums, validate_capacity_vector,
    CapacityVector,
};

/// Largest k for which weak-mode enumeration and decomposition run without
/// `force`; the constraint pool is exponential in k.
pub const MAX_WEAK_TERMINALS: usize = 4;
/// Strong mode compares all disjoint subset pairs, so its bound is lower.
pub const MAX_STRONG_TERMINALS: usize = 3;

/// One equality that can pin down a basic star.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TightConstraint {
    /// x_i = 0
    CoordZero(usize),
    /// x(S) = x(K \ S), S given as a mask
    SubsetBalance(usize),
    /// x(A) = x(B) for disjoint masks A, B
    PairEqual(usize, usize),
    /// Two component cuts are balanced; the index identifies the ordered
    /// triple (separator side, component side, component side) it came from.
    CutRelation(usize),
}

/// A normalized basic star together with the equalities that define it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ray {
    pub coords: Vec<Rational>,
    pub tight: Vec<TightConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTerm {
    pub weight: Rational,
    pub ray: Ray,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConicDecomposition {
    pub k: usize,
    pub terms: Vec<DecompositionTerm>,
}

impl ConicDecomposition {
    pub fn reconstruct(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.k];
        for term in &self.terms {
            for (o, q) in out.iter_mut().zip(&term.ray.coords) {
                *o += &term.weight * q;
            }
        }
        out
    }
}

fn dot(f: &[Rational], x: &[Rational]) -> Rational {
    f.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Incremental row echelon form used to pick independent tight rows.
struct Echelon {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    /// Returns true when `row` is independent of what is stored, and keeps
    /// its reduced image in that case.
    fn try_insert(&mut self, row: &[Rational]) -> bool {
        let mut r = row.to_vec();
        for (p, er) in &self.rows {
            if !r[*p].is_zero() {
                let factor = &r[*p] / &er[*p];
                for (x, e) in r.iter_mut().zip(er) {
                    *x -= &factor * e;
                }
            }
        }
        match r.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }
}

/// Solves a square system exactly; None when singular.
fn solve_unique(mut rows: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    debug_assert!(rows.iter().all(|r| r.len() == n) && rows.len() == n);
    for col in 0..n {
        let pivot = (col..n).find(|&i| !rows[i][col].is_zero())?;
        rows.swap(col, pivot);
        rhs.swap(col, pivot);
        for i in (col + 1)..n {
            if rows[i][col].is_zero() {
                continue;
            }
            let factor = &rows[i][col] / &rows[col][col];
            for j in col..n {
                let sub = &factor * &rows[col][j];
                rows[i][j] -= sub;
            }
            let sub = &factor * &rhs[col];
            rhs[i] -= sub;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i].clone();
        for j in (i + 1)..n {
            acc -= &rows[i][j] * &x[j];
        }
        x[i] = acc / &rows[i][i];
    }
    Some(x)
}

/// Pool of candidate equalities for basic stars, with labels.
fn weak_pool(k: usize) -> Vec<(Vec<Rational>, TightConstraint)> {
    let full = (1usize << k) - 1;
    let mut pool = Vec::new();
    for i in 0..k {
        let mut f = vec![Rational::zero(); k];
        f[i] = Rational::one();
        pool.push((f, TightConstraint::CoordZero(i)));
    }
    for m in 1..=full {
        let comp = full & !m;
        if m < comp {
            let f = (0..k)
                .map(|i| {
                    if m >> i & 1 == 1 {
                        Rational::one()
                    } else {
                        -Rational::one()
                    }
                })
                .collect();
            pool.push((f, TightConstraint::SubsetBalance(m)));
        }
    }
    pool
}

fn pair_functional(k: usize, a: usize, b: usize) -> Vec<Rational> {
    (0..k)
        .map(|i| {
            if a >> i & 1 == 1 {
                Rational::one()
            } else if b >> i & 1 == 1 {
                -Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

fn strong_pool(k: usize) -> Vec<(Vec<Rational>, TightConstraint)> {
    strong_pairs(k)
        .into_iter()
        .filter(|&(a, b)| (a, b) != (0, 0))
        .map(|(a, b)| (pair_functional(k, a, b), TightConstraint::PairEqual(a, b)))
        .collect()
}

fn check_enumeration_size(k: usize, strong: bool, force: bool) -> Result<()> {
    let bound = if strong {
        MAX_STRONG_TERMINALS
    } else {
        MAX_WEAK_TERMINALS
    };
    if k > bound && !force {
        return Err(Error::GuardrailExceeded(format!(
            "{} enumeration over k = {k} terminals (bound {bound})",
            if strong { "strong" } else { "weak" },
        )));
    }
    Ok(())
}

/// All basic stars on k terminals: nonnegative, coordinate sum 1, pinned by
/// k-1 independent equalities from the candidate pool. Deduplicated by
/// exact coordinates, sorted, each keeping the first defining system found.
pub fn enumerate_basic_stars(k: usize, strong: bool, force: bool) -> Result<Vec<Ray>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    check_enumeration_size(k, strong, force)?;
    let pool = if strong { strong_pool(k) } else { weak_pool(k) };
    let mut seen = std::collections::BTreeMap::new();
    for combo in (0..pool.len()).combinations(k.saturating_sub(1)) {
        let mut rows: Vec<Vec<Rational>> = combo.iter().map(|&i| pool[i].0.clone()).collect();
        rows.push(vec![Rational::one(); k]);
        let mut rhs = vec![Rational::zero(); k];
        rhs[k - 1] = Rational::one();
        let Some(x) = solve_unique(rows, rhs) else {
            continue;
        };
        if x.iter().any(|v| v.is_negative()) {
            continue;
        }
        seen.entry(x).or_insert_with(|| {
            combo.iter().map(|&i| pool[i].1).collect::<Vec<_>>()
        });
    }
    Ok(seen
        .into_iter()
        .map(|(coords, tight)| Ray { coords, tight })
        .collect())
}

/// Inequality description of the cone of vectors whose signature is at
/// least as constrained as c's: ties in c stay ties, strict comparisons may
/// not flip.
fn cone_of(c: &[Rational], strong: bool) -> Vec<(Vec<Rational>, TightConstraint)> {
    let k = c.len();
    let sums = subset_sums(c);
    let full = (1usize << k) - 1;
    let mut rows = Vec::new();
    if strong {
        for (a, b) in strong_pairs(k) {
            if (a, b) == (0, 0) {
                continue;
            }
            // keep x(a) <= x(b) when c has it, and the reverse likewise;
            // a tie emits both rows and forces equality
            if sums[a] <= sums[b] {
                rows.push((pair_functional(k, b, a), TightConstraint::PairEqual(a, b)));
            }
            if sums[b] <= sums[a] {
                rows.push((pair_functional(k, a, b), TightConstraint::PairEqual(a, b)));
            }
        }
    } else {
        for i in 0..k {
            let mut f = vec![Rational::zero(); k];
            f[i] = Rational::one();
            rows.push((f, TightConstraint::CoordZero(i)));
        }
        let total = sums[full].clone();
        for m in 0..=full {
            if &sums[m] + &sums[m] <= total {
                // x(K \ m) - x(m) >= 0
                rows.push((
                    pair_functional(k, full & !m, m),
                    TightConstraint::SubsetBalance(m),
                ));
            }
        }
    }
    rows
}

/// Decomposes `c` into at most k weighted basic stars of agreeing
/// signature. Exact: the weighted sum reproduces `c` coordinate for
/// coordinate.
pub fn caratheodory_decompose(
    c: &[Rational],
    strong: bool,
    force: bool,
) -> Result<ConicDecomposition> {
    validate_capacity_vector(c)?;
    let k = c.len();
    check_enumeration_size(k, strong, force)?;
    let cone = cone_of(c, strong);
    let terms_raw = decompose_in_cone(k, &cone, c)?;

    let mut terms = Vec::new();
    for (weight, coords, tight_idx) in terms_raw {
        let mut tight: Vec<TightConstraint> =
            tight_idx.into_iter().map(|i| cone[i].1).collect();
        tight.sort();
        tight.dedup();
        terms.push(DecompositionTerm {
            weight,
            ray: Ray { coords, tight },
        });
    }
    let dec = ConicDecomposition { k, terms };

    // agreement is guaranteed by construction; verify anyway, it is cheap
    if strong {
        let sig = strong_signature(c)?;
        for t in &dec.terms {
            if !sig.admits(&strong_signature(&t.ray.coords)?) {
                return Err(Error::Internal(
                    "decomposition term violates the strong signature".into(),
                ));
            }
        }
    } else {
        let sig = cut_signature(c)?;
        for t in &dec.terms {
            if !cut_signature(&t.ray.coords)?.superset_of(&sig) {
                return Err(Error::Internal(
                    "decomposition term violates the cut signature".into(),
                ));
            }
        }
    }
    if dec.reconstruct() != c {
        return Err(Error::Internal("decomposition does not reconstruct".into()));
    }
    Ok(dec)
}

/// Carathéodory inside an explicit cone `{x : f.x >= 0 for all f}`.
/// Returns (weight, normalized ray, indices of tight rows) triples.
pub(crate) fn decompose_in_cone(
    dim: usize,
    cone: &[(Vec<Rational>, TightConstraint)],
    target: &[Rational],
) -> Result<Vec<(Rational, Vec<Rational>, Vec<usize>)>> {
    for (f, _) in cone {
        if dot(f, target).is_negative() {
            return Err(Error::Internal("target violates its own cone".into()));
        }
    }
    let mut r = target.to_vec();
    let mut terms = Vec::new();
    while r.iter().any(|x| !x.is_zero()) {
        if terms.len() >= dim {
            return Err(Error::Internal("conic decomposition failed to terminate".into()));
        }
        // independent equalities already tight at the residual
        let mut ech = Echelon::new();
        let mut basis: Vec<usize> = Vec::new();
        for (i, (f, _)) in cone.iter().enumerate() {
            if dot(f, &r).is_zero() && ech.try_insert(f) {
                basis.push(i);
            }
        }
        let rho = basis.len();
        if rho >= dim {
            return Err(Error::Internal("tight system pins a nonzero residual".into()));
        }

        let mut found: Option<(Vec<Rational>, Vec<usize>)> = None;
        'combos: for combo in (0..cone.len()).combinations(dim - 1 - rho) {
            let mut rows: Vec<Vec<Rational>> =
                basis.iter().map(|&i| cone[i].0.clone()).collect();
            rows.extend(combo.iter().map(|&i| cone[i].0.clone()));
            rows.push(vec![Rational::one(); dim]);
            let mut rhs = vec![Rational::zero(); dim];
            rhs[dim - 1] = Rational::one();
            let Some(q) = solve_unique(rows, rhs) else {
                continue;
            };
            let mut tight = Vec::new();
            for (i, (f, _)) in cone.iter().enumerate() {
                let v = dot(f, &q);
                if v.is_negative() {
                    continue 'combos;
                }
                if v.is_zero() {
                    tight.push(i);
                }
            }
            found = Some((q, tight));
            break;
        }
        let (q, tight) = found
            .ok_or_else(|| Error::Internal("no extreme ray in the residual face".into()))?;

        // exact ratio test; first minimizer wins
        let mut lambda: Option<Rational> = None;
        for (f, _) in cone {
            let fq = dot(f, &q);
            if fq.is_positive() {
                let ratio = dot(f, &r) / fq;
                if lambda.as_ref().map_or(true, |l| &ratio < l) {
                    lambda = Some(ratio);
                }
            }
        }
        let lam = lambda
            .ok_or_else(|| Error::Internal("ray direction is unbounded in the cone".into()))?;
        if !lam.is_positive() {
            return Err(Error::Internal("ratio test produced a zero step".into()));
        }
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= &lam * qi;
        }
        terms.push((lam, q, tight));
    }
    Ok(terms)
}

/// Replaces a list of stars over shared terminals by weighted basic stars:
/// decompose each star in weak mode, pool weights by ray, and rebuild. The
/// result has the same minimum cut as the input for every terminal
/// bipartition, with at most k + (number of distinct rays) vertices.
pub fn build_basic_star_sparsifier(
    stars: &[CapacityVector],
    terminals: &[VertexId],
    force: bool,
) -> Result<Network> {
    let k = terminals.len();
    let mut weights: std::collections::BTreeMap<Vec<Rational>, Rational> =
        std::collections::BTreeMap::new();
    for star in stars {
        if star.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: star.len(),
            });
        }
        for term in caratheodory_decompose(star, false, force)?.terms {
            *weights.entry(term.ray.coords).or_default() += term.weight;
        }
    }
    let rebuilt: Vec<CapacityVector> = weights
        .into_iter()
        .map(|(coords, w)| coords.into_iter().map(|x| x * &w).collect())
        .collect();
    Network::star_network(terminals, &rebuilt)
}
