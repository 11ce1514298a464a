//! Exact linear programming.
//!
//! A small dense two-phase simplex working entirely in exact arithmetic.
//! The tableau holds big integers plus one common positive denominator and
//! pivots with the fraction-free update
//! `t'[i][j] = (t[i][j] * t[p][q] - t[i][q] * t[p][j]) / d`,
//! whose division is exact because every entry stays a minor of the original
//! integer data. That is ordinary rational Gauss-Jordan in a representation
//! that avoids per-operation gcds.
//!
//! Pricing is by most negative reduced cost; after a run of degenerate
//! pivots the solver switches to Bland's rule, which cannot cycle, and
//! switches back once the objective moves. Ratio-test ties always fall to
//! the smallest basis index.

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    /// Sparse coefficients as (variable, value); variables are 0-based.
    pub coeffs: Vec<(usize, Rational)>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

/// maximize `objective . x` subject to the rows and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<(usize, Rational)>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: Rational,
    pub values: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Unbounded,
    Infeasible,
}

const DEGENERATE_STREAK_LIMIT: usize = 24;
const ITERATION_LIMIT: usize = 200_000;

struct Tableau {
    rows: Vec<Vec<BigInt>>,
    /// phase-1 and phase-2 reduced-cost rows, same column layout as `rows`
    z1: Vec<BigInt>,
    z2: Vec<BigInt>,
    denom: BigInt,
    basis: Vec<usize>,
    first_artificial: usize,
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, p: usize, q: usize) {
        debug_assert!(self.rows[p][q].is_positive());
        let pivot_row = std::mem::take(&mut self.rows[p]);
        let piv = pivot_row[q].clone();
        let update = |row: &mut Vec<BigInt>, denom: &BigInt| {
            let factor = row[q].clone();
            if factor.is_zero() {
                for cell in row.iter_mut() {
                    if !cell.is_zero() {
                        *cell = &*cell * &piv / denom;
                    }
                }
            } else {
                for (cell, pcell) in row.iter_mut().zip(&pivot_row) {
                    *cell = (&*cell * &piv - &factor * pcell) / denom;
                }
            }
        };
        for i in 0..self.rows.len() {
            if i != p {
                let mut row = std::mem::take(&mut self.rows[i]);
                update(&mut row, &self.denom);
                self.rows[i] = row;
            }
        }
        let mut z = std::mem::take(&mut self.z1);
        update(&mut z, &self.denom);
        self.z1 = z;
        let mut z = std::mem::take(&mut self.z2);
        update(&mut z, &self.denom);
        self.z2 = z;
        self.rows[p] = pivot_row;
        self.denom = piv;
        self.basis[p] = q;
    }

    /// Ratio test: smallest `rhs/col` over positive column entries, ties to
    /// the smallest basic variable index (Bland-compatible).
    fn leaving_row(&self, q: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in 0..self.rows.len() {
            let t = &self.rows[i][q];
            if !t.is_positive() {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) => {
                    // compare rhs[i]/t[i] against rhs[b]/t[b]
                    let lhs = &self.rows[i][self.rhs] * &self.rows[b][q];
                    let rhs = &self.rows[b][self.rhs] * t;
                    if lhs < rhs || (lhs == rhs && self.basis[i] < self.basis[b]) {
                        best = Some(i);
                    }
                }
            }
        }
        best
    }

    fn entering_column(&self, z: &[BigInt], bland: bool, allow_artificial: bool) -> Option<usize> {
        let limit = if allow_artificial {
            self.rhs
        } else {
            self.first_artificial
        };
        let mut best: Option<usize> = None;
        for j in 0..limit {
            if z[j].is_negative() {
                if bland {
                    return Some(j);
                }
                match best {
                    None => best = Some(j),
                    Some(b) => {
                        if z[j] < z[b] {
                            best = Some(j);
                        }
                    }
                }
            }
        }
        best
    }

    fn objective_of(&self, z: &[BigInt]) -> Rational {
        // z[rhs] = -denom * objective
        -Rational::new(z[self.rhs].clone(), self.denom.clone())
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

fn run_phase(t: &mut Tableau, phase_one: bool, iterations: &mut usize) -> Result<PhaseEnd> {
    let mut bland = false;
    let mut streak = 0usize;
    let mut last = if phase_one {
        t.objective_of(&t.z1)
    } else {
        t.objective_of(&t.z2)
    };
    loop {
        *iterations += 1;
        if *iterations > ITERATION_LIMIT {
            return Err(Error::Internal("simplex iteration limit exceeded".into()));
        }
        let z = if phase_one { &t.z1 } else { &t.z2 };
        let q = match t.entering_column(z, bland, false) {
            Some(q) => q,
            None => return Ok(PhaseEnd::Optimal),
        };
        let p = match t.leaving_row(q) {
            Some(p) => p,
            None => {
                if phase_one {
                    // phase-1 objective is bounded below by zero
                    return Err(Error::Internal("phase one unbounded".into()));
                }
                return Ok(PhaseEnd::Unbounded);
            }
        };
        t.pivot(p, q);
        let now = if phase_one {
            t.objective_of(&t.z1)
        } else {
            t.objective_of(&t.z2)
        };
        if now == last {
            streak += 1;
            if streak >= DEGENERATE_STREAK_LIMIT {
                bland = true;
            }
        } else {
            streak = 0;
            bland = false;
            last = now;
        }
    }
}

pub fn maximize(lp: &LinearProgram) -> Result<LpOutcome> {
    let n = lp.num_vars;
    for (j, _) in &lp.objective {
        if *j >= n {
            return Err(Error::DimensionMismatch { expected: n, got: *j });
        }
    }
    let num_slack = lp.rows.iter().filter(|r| r.cmp == Cmp::Le).count();

    // layout: [vars][slacks][artificials][rhs]
    let first_slack = n;
    let first_artificial = n + num_slack;
    let mut rows_int: Vec<Vec<BigInt>> = Vec::with_capacity(lp.rows.len());
    let mut needs_artificial: Vec<bool> = Vec::with_capacity(lp.rows.len());
    let mut slack_of_row: Vec<Option<usize>> = Vec::with_capacity(lp.rows.len());
    let mut next_slack = first_slack;
    for row in &lp.rows {
        let scale = common_denominator(
            row.coeffs
                .iter()
                .map(|(_, c)| c)
                .chain(std::iter::once(&row.rhs)),
        );
        let scale_r = Rational::from_integer(scale);
        let mut dense = vec![BigInt::zero(); n];
        for (j, c) in &row.coeffs {
            if *j >= n {
                return Err(Error::DimensionMismatch { expected: n, got: *j });
            }
            dense[*j] += (c * &scale_r).to_integer();
        }
        let mut rhs_int = (&row.rhs * &scale_r).to_integer();
        let mut slack_coeff = BigInt::zero();
        let slack_idx = if row.cmp == Cmp::Le {
            slack_coeff = BigInt::one();
            let idx = next_slack;
            next_slack += 1;
            Some(idx)
        } else {
            None
        };
        let negate = rhs_int.is_negative();
        if negate {
            for c in dense.iter_mut() {
                *c = -std::mem::take(c);
            }
            slack_coeff = -slack_coeff;
            rhs_int = -rhs_int;
        }
        // basic slack requires coefficient +1
        let slack_is_basic = slack_idx.is_some() && !negate;
        needs_artificial.push(!slack_is_basic);
        slack_of_row.push(slack_idx);
        let mut full = dense;
        full.resize(first_artificial, BigInt::zero());
        if let Some(idx) = slack_idx {
            full[idx] = slack_coeff;
        }
        full.push(rhs_int); // temporarily rhs right after; artificials spliced below
        rows_int.push(full);
    }
    let num_artificial = needs_artificial.iter().filter(|b| **b).count();
    let rhs_col = first_artificial + num_artificial;
    let ncols = rhs_col + 1;

    let mut basis = Vec::with_capacity(rows_int.len());
    let mut art_cursor = first_artificial;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(rows_int.len());
    for (i, mut partial) in rows_int.into_iter().enumerate() {
        let rhs_val = partial.pop().expect("rhs present");
        partial.resize(rhs_col, BigInt::zero());
        partial.push(rhs_val);
        if needs_artificial[i] {
            partial[art_cursor] = BigInt::one();
            basis.push(art_cursor);
            art_cursor += 1;
        } else {
            basis.push(slack_of_row[i].expect("slack-basic row"));
        }
        rows.push(partial);
    }

    // phase-1 reduced costs: minimize the sum of artificials
    let mut z1 = vec![BigInt::zero(); ncols];
    for j in first_artificial..rhs_col {
        z1[j] = BigInt::one();
    }
    for (i, row) in rows.iter().enumerate() {
        if basis[i] >= first_artificial {
            for j in 0..ncols {
                z1[j] -= &row[j];
            }
        }
    }
    // phase-2 reduced costs: minimize the negated objective; initial basics
    // all carry zero cost so the raw coefficients are already reduced
    let obj_scale = common_denominator(lp.objective.iter().map(|(_, c)| c));
    let obj_scale_r = Rational::from_integer(obj_scale);
    let mut z2 = vec![BigInt::zero(); ncols];
    for (j, c) in &lp.objective {
        z2[*j] -= (c * &obj_scale_r).to_integer();
    }

    let mut t = Tableau {
        rows,
        z1,
        z2,
        denom: BigInt::one(),
        basis,
        first_artificial,
        rhs: rhs_col,
    };

    let mut iterations = 0usize;
    if num_artificial > 0 {
        match run_phase(&mut t, true, &mut iterations)? {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded => unreachable!("phase one cannot be unbounded"),
        }
        if !t.objective_of(&t.z1).is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // remove leftover degenerate artificials from the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= t.first_artificial {
                debug_assert!(t.rows[i][t.rhs].is_zero());
                let col = (0..t.first_artificial).find(|&j| !t.rows[i][j].is_zero());
                match col {
                    Some(j) => {
                        if t.rows[i][j].is_negative() {
                            for cell in t.rows[i].iter_mut() {
                                *cell = -std::mem::take(cell);
                            }
                        }
                        t.pivot(i, j);
                    }
                    None => {
                        // all-zero row: the constraint was redundant
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    match run_phase(&mut t, false, &mut iterations)? {
        PhaseEnd::Unbounded => return Ok(LpOutcome::Unbounded),
        PhaseEnd::Optimal => {}
    }

    let mut values = vec![Rational::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            values[b] = Rational::new(t.rows[i][t.rhs].clone(), t.denom.clone());
        }
    }
    let objective = lp
        .objective
        .iter()
        .map(|(j, c)| c * &values[*j])
        .sum();
    Ok(LpOutcome::Optimal(LpSolution { objective, values }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn row(coeffs: &[(usize, i64)], cmp: Cmp, rhs: i64) -> LpRow {
        LpRow {
            coeffs: coeffs.iter().map(|&(j, c)| (j, rat(c, 1))).collect(),
            cmp,
            rhs: rat(rhs, 1),
        }
    }

    fn opt(outcome: LpOutcome) -> LpSolution {
        match outcome {
            LpOutcome::Optimal(s) => s,
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn one_variable_box() {
        let lp = LinearProgram {
            num_vars: 1,
            objective: vec![(0, rat(1, 1))],
            rows: vec![row(&[(0, 1)], Cmp::Le, 5)],
        };
        let s = opt(maximize(&lp).unwrap());
        assert_eq!(s.objective, rat(5, 1));
        assert_eq!(s.values, vec![rat(5, 1)]);
    }

    #[test]
    fn two_variable_vertex() {
        // max x+y st x+2y<=4, 3x+y<=6: optimum at (8/5, 6/5)
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![(0, rat(1, 1)), (1, rat(1, 1))],
            rows: vec![
                row(&[(0, 1), (1, 2)], Cmp::Le, 4),
                row(&[(0, 3), (1, 1)], Cmp::Le, 6),
            ],
        };
        let s = opt(maximize(&lp).unwrap());
        assert_eq!(s.objective, rat(14, 5));
        assert_eq!(s.values, vec![rat(8, 5), rat(6, 5)]);
    }

    #[test]
    fn equalities_via_artificials() {
        // max y st x+y=2, x<=2
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![(1, rat(1, 1))],
            rows: vec![row(&[(0, 1), (1, 1)], Cmp::Eq, 2), row(&[(0, 1)], Cmp::Le, 2)],
        };
        let s = opt(maximize(&lp).unwrap());
        assert_eq!(s.objective, rat(2, 1));
        assert_eq!(s.values, vec![rat(0, 1), rat(2, 1)]);
    }

    #[test]
    fn duplicate_equality_rows_are_dropped() {
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![(0, rat(1, 1))],
            rows: vec![
                row(&[(0, 1), (1, 1)], Cmp::Eq, 2),
                row(&[(0, 1), (1, 1)], Cmp::Eq, 2),
            ],
        };
        let s = opt(maximize(&lp).unwrap());
        assert_eq!(s.objective, rat(2, 1));
    }

    #[test]
    fn infeasible_and_unbounded_are_reported() {
        let lp = LinearProgram {
            num_vars: 1,
            objective: vec![(0, rat(1, 1))],
            rows: vec![row(&[(0, 1)], Cmp::Le, 1), row(&[(0, -1)], Cmp::Le, -2)],
        };
        assert!(matches!(maximize(&lp).unwrap(), LpOutcome::Infeasible));

        let lp = LinearProgram {
            num_vars: 1,
            objective: vec![(0, rat(1, 1))],
            rows: vec![],
        };
        assert!(matches!(maximize(&lp).unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn rational_data_stays_exact() {
        // max x st (2/3)x <= 5/7
        let lp = LinearProgram {
            num_vars: 1,
            objective: vec![(0, rat(1, 1))],
            rows: vec![LpRow {
                coeffs: vec![(0, rat(2, 3))],
                cmp: Cmp::Le,
                rhs: rat(5, 7),
            }],
        };
        let s = opt(maximize(&lp).unwrap());
        assert_eq!(s.values[0], rat(15, 14));
    }

    #[test]
    fn zero_rhs_equalities_start_feasible() {
        // max x st x - y = 0, x + y <= 3
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![(0, rat(1, 1))],
            rows: vec![
                row(&[(0, 1), (1, -1)], Cmp::Eq, 0),
                row(&[(0, 1), (1, 1)], Cmp::Le, 3),
            ],
        };
        let s = opt(maximize(&lp).unwrap());
        assert_eq!(s.objective, rat(3, 2));
        assert_eq!(s.values, vec![rat(3, 2), rat(3, 2)]);
    }
}
