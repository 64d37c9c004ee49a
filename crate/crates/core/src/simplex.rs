//! Dense two-phase primal simplex with Bland's rule.
//!
//! Solves `maximize c·x` subject to rows `a_i·x (≤ | = | ≥) b_i` and `x ≥ 0`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// One constraint row, stored sparsely as `(column, coefficient)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
    max_pivots: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn pivot(&mut self, r: usize, q: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.max_pivots {
            return Err(Error::SimplexCycleGuardTripped(self.pivots));
        }
        let w = self.width;
        let inv = 1.0 / self.at(r, q);
        let row_r = r * w;
        for v in &mut self.data[row_r..row_r + w] {
            *v *= inv;
        }
        self.data[row_r + q] = 1.0;
        let nz: Vec<usize> = (0..w).filter(|&j| self.data[row_r + j] != 0.0).collect();
        let pivot_row: Vec<f64> = nz.iter().map(|&j| self.data[row_r + j]).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            for (&j, &v) in nz.iter().zip(&pivot_row) {
                row[j] -= f * v;
            }
            row[q] = 0.0;
        }
        let f = self.cost[q];
        if f != 0.0 {
            for (&j, &v) in nz.iter().zip(&pivot_row) {
                self.cost[j] -= f * v;
            }
            self.cost[q] = 0.0;
        }
        self.basis[r] = q;
        Ok(())
    }

    /// Runs Bland's rule over the allowed columns. Returns `false` when the
    /// objective is unbounded below.
    fn optimize(&mut self, allowed: &[bool]) -> Result<bool> {
        loop {
            let Some(q) = (0..self.width - 1).find(|&j| allowed[j] && self.cost[j] < -COST_TOL)
            else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, q);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((k, r)) => {
                        let tie = (ratio - r).abs() <= 1e-12 * (1.0 + r.abs());
                        if ratio < r && !tie || tie && self.basis[i] < self.basis[k] {
                            Some((i, ratio))
                        } else {
                            Some((k, r))
                        }
                    }
                };
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, q)?,
            }
        }
    }
}

/// Solves the program. Fails only when the pivot guard trips, which Bland's
/// rule should prevent.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    let m = lp.rows.len();
    let n = lp.vars;
    // Column layout: structural, slack/surplus, artificial, rhs.
    let slack_count = lp
        .rows
        .iter()
        .filter(|r| r.relation != Relation::Eq)
        .count();
    let mut needs_artificial = Vec::with_capacity(m);
    for row in &lp.rows {
        let flipped = row.rhs < 0.0;
        let rel = match (row.relation, flipped) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (rel, _) => rel,
        };
        needs_artificial.push(rel != Relation::Le);
    }
    let art_count = needs_artificial.iter().filter(|&&b| b).count();
    let total = n + slack_count + art_count;
    let width = total + 1;
    let mut t = Tableau {
        rows: m,
        width,
        data: vec![0.0; m * width],
        cost: vec![0.0; width],
        basis: vec![0; m],
        pivots: 0,
        max_pivots: 50 * (m + total) + 1000,
    };
    let (mut next_slack, mut next_art) = (n, n + slack_count);
    for (i, row) in lp.rows.iter().enumerate() {
        let sign = if row.rhs < 0.0 { -1.0 } else { 1.0 };
        let base = i * width;
        for &(j, v) in &row.coeffs {
            t.data[base + j] += sign * v;
        }
        t.data[base + total] = sign * row.rhs;
        if row.relation != Relation::Eq {
            let slack_sign = if row.relation == Relation::Le {
                1.0
            } else {
                -1.0
            };
            t.data[base + next_slack] = sign * slack_sign;
            if !needs_artificial[i] {
                t.basis[i] = next_slack;
            }
            next_slack += 1;
        }
        if needs_artificial[i] {
            t.data[base + next_art] = 1.0;
            t.basis[i] = next_art;
            next_art += 1;
        }
    }

    // Phase 1: minimize the sum of artificials.
    if art_count > 0 {
        for (i, &art) in needs_artificial.iter().enumerate() {
            if art {
                for j in 0..width {
                    t.cost[j] -= t.data[i * width + j];
                }
            }
        }
        for j in n + slack_count..total {
            t.cost[j] += 1.0;
        }
        let allowed = vec![true; total];
        t.optimize(&allowed)?;
        let infeasibility = -t.cost[total];
        let scale = 1.0 + lp.rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if infeasibility > 1e-9 * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; n],
                value: f64::NAN,
                pivots: t.pivots,
            });
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if t.basis[i] >= n + slack_count {
                if let Some(q) = (0..n + slack_count).find(|&j| t.at(i, j).abs() > PIVOT_TOL) {
                    t.pivot(i, q)?;
                }
            }
        }
    }

    // Phase 2: minimize -c·x over non-artificial columns.
    t.cost = vec![0.0; width];
    for (j, &c) in lp.objective.iter().enumerate() {
        t.cost[j] = -c;
    }
    for i in 0..m {
        let cb = t.cost[t.basis[i]];
        if cb != 0.0 {
            for j in 0..width {
                t.cost[j] -= cb * t.data[i * width + j];
            }
        }
    }
    let allowed: Vec<bool> = (0..total).map(|j| j < n + slack_count).collect();
    let bounded = t.optimize(&allowed)?;
    let mut x = vec![0.0; n];
    for i in 0..m {
        if t.basis[i] < n {
            x[t.basis[i]] = t.rhs(i).max(0.0);
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: if bounded {
            LpStatus::Optimal
        } else {
            LpStatus::Unbounded
        },
        x,
        value,
        pivots: t.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(coeffs: &[(usize, f64)], relation: Relation, rhs: f64) -> Row {
        Row {
            coeffs: coeffs.to_vec(),
            relation,
            rhs,
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36.
        let lp = LinearProgram {
            vars: 2,
            objective: vec![3.0, 5.0],
            rows: vec![
                row(&[(0, 1.0)], Relation::Le, 4.0),
                row(&[(1, 2.0)], Relation::Le, 12.0),
                row(&[(0, 3.0), (1, 2.0)], Relation::Le, 18.0),
            ],
        };
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_surplus_rows() {
        // max -x - y, x + y = 3, x - y ≥ 1, y ≥ 0.5 → value -3.
        let lp = LinearProgram {
            vars: 2,
            objective: vec![-1.0, -1.0],
            rows: vec![
                row(&[(0, 1.0), (1, 1.0)], Relation::Eq, 3.0),
                row(&[(0, 1.0), (1, -1.0)], Relation::Ge, 1.0),
                row(&[(1, 1.0)], Relation::Ge, 0.5),
            ],
        };
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value + 3.0).abs() < 1e-12);
        assert!(s.x[0] - s.x[1] >= 1.0 - 1e-12 && s.x[1] >= 0.5 - 1e-12);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // -x ≤ -2 means x ≥ 2; max -x → x = 2.
        let lp = LinearProgram {
            vars: 1,
            objective: vec![-1.0],
            rows: vec![row(&[(0, -1.0)], Relation::Le, -2.0)],
        };
        let s = solve(&lp).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram {
            vars: 1,
            objective: vec![1.0],
            rows: vec![
                row(&[(0, 1.0)], Relation::Le, 1.0),
                row(&[(0, 1.0)], Relation::Ge, 2.0),
            ],
        };
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
        let lp = LinearProgram {
            vars: 2,
            objective: vec![1.0, 0.0],
            rows: vec![row(&[(0, 1.0), (1, -1.0)], Relation::Le, 1.0)],
        };
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's example cycles under the largest-coefficient rule.
        // max 3/4 x4 - 20 x5 + 1/2 x6 - 6 x7 in the usual four-variable form.
        let lp = LinearProgram {
            vars: 4,
            objective: vec![0.75, -20.0, 0.5, -6.0],
            rows: vec![
                row(
                    &[(0, 0.25), (1, -8.0), (2, -1.0), (3, 9.0)],
                    Relation::Le,
                    0.0,
                ),
                row(
                    &[(0, 0.5), (1, -12.0), (2, -0.5), (3, 3.0)],
                    Relation::Le,
                    0.0,
                ),
                row(&[(2, 1.0)], Relation::Le, 1.0),
            ],
        };
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.25).abs() < 1e-12, "{}", s.value);
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram {
            vars: 2,
            objective: vec![1.0, 2.0],
            rows: vec![
                row(&[(0, 1.0), (1, 1.0)], Relation::Eq, 2.0),
                row(&[(0, 2.0), (1, 2.0)], Relation::Eq, 4.0),
            ],
        };
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 4.0).abs() < 1e-12);
    }
}
