//! Dense two-phase tableau simplex.
//!
//! Small enough for the fitting problems here (a few hundred rows after
//! deduplication). Entering variables follow Dantzig's rule until a run of
//! degenerate pivots, then Bland's rule takes over to rule out cycling.

use alloc::vec;
use alloc::vec::Vec;

const PIVOT_EPS: f64 = 1e-9;
const FEAS_EPS: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;
const MAX_PIVOTS: usize = 200_000;
const REFRESH_EVERY: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    NonNegative,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("infeasible")]
    Infeasible,
    #[error("unbounded")]
    Unbounded,
    #[error("pivot limit reached")]
    PivotLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// `maximize c·x` subject to linear rows; variables are nonnegative or free.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    kinds: Vec<VarKind>,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl LinearProgram {
    pub fn new(kinds: Vec<VarKind>) -> Self {
        let n = kinds.len();
        LinearProgram {
            kinds,
            objective: vec![0.0; n],
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn maximize(&mut self, c: Vec<f64>) {
        assert_eq!(c.len(), self.kinds.len());
        self.objective = c;
    }

    pub fn minimize(&mut self, c: Vec<f64>) {
        self.maximize(c.into_iter().map(|x| -x).collect());
    }

    pub fn add(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.kinds.len());
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        // structural columns: free variables become x⁺ − x⁻
        let mut col_of = Vec::with_capacity(self.kinds.len());
        let mut ncols = 0;
        for k in &self.kinds {
            col_of.push(ncols);
            ncols += if *k == VarKind::Free { 2 } else { 1 };
        }
        let structural = ncols;
        let nrows = self.rows.len();
        let slacks = self.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(nrows);
        for (coeffs, rel, rhs) in &self.rows {
            let mut expanded = vec![0.0; structural];
            for (v, &c) in coeffs.iter().enumerate() {
                expanded[col_of[v]] = c;
                if self.kinds[v] == VarKind::Free {
                    expanded[col_of[v] + 1] = -c;
                }
            }
            // rows with a zero right side go in as ≤ so a slack can start in the basis
            if *rhs < 0.0 || (*rhs == 0.0 && *rel == Relation::Ge) {
                expanded.iter_mut().for_each(|x| *x = -*x);
                let flipped = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                rows.push((expanded, flipped, -rhs));
            } else {
                rows.push((expanded, *rel, *rhs));
            }
        }
        let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let width = structural + slacks + artificials;
        let mut t = Tableau {
            a: vec![vec![0.0; width + 1]; nrows],
            basis: vec![0; nrows],
            width,
            pivots: 0,
            blocked: vec![false; width],
        };
        let (mut s, mut art) = (structural, structural + slacks);
        for (r, (coeffs, rel, rhs)) in rows.iter().enumerate() {
            t.a[r][..structural].copy_from_slice(coeffs);
            t.a[r][width] = *rhs;
            match rel {
                Relation::Le => {
                    t.a[r][s] = 1.0;
                    t.basis[r] = s;
                    s += 1;
                }
                Relation::Ge => {
                    t.a[r][s] = -1.0;
                    s += 1;
                    t.a[r][art] = 1.0;
                    t.basis[r] = art;
                    art += 1;
                }
                Relation::Eq => {
                    t.a[r][art] = 1.0;
                    t.basis[r] = art;
                    art += 1;
                }
            }
        }
        let first_art = structural + slacks;

        if artificials > 0 {
            let mut c1 = vec![0.0; width];
            c1[first_art..].iter_mut().for_each(|x| *x = -1.0);
            t.optimize(&c1)?;
            let z: f64 = (0..nrows).map(|r| c1[t.basis[r]] * t.a[r][width]).sum();
            let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
            if z < -FEAS_EPS * scale {
                return Err(LpError::Infeasible);
            }
            // drive zero-level artificials out of the basis
            let mut r = 0;
            while r < t.a.len() {
                if t.basis[r] >= first_art {
                    match (0..first_art).find(|&j| t.a[r][j].abs() > PIVOT_EPS) {
                        Some(j) => t.pivot(r, j),
                        None => {
                            t.a.remove(r);
                            t.basis.remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
            t.blocked[first_art..].iter_mut().for_each(|b| *b = true);
        }

        let mut c2 = vec![0.0; width];
        for (v, &c) in self.objective.iter().enumerate() {
            c2[col_of[v]] = c;
            if self.kinds[v] == VarKind::Free {
                c2[col_of[v] + 1] = -c;
            }
        }
        t.optimize(&c2)?;

        let mut cols = vec![0.0; width];
        for (r, &b) in t.basis.iter().enumerate() {
            cols[b] = t.a[r][width];
        }
        let x: Vec<f64> = self
            .kinds
            .iter()
            .enumerate()
            .map(|(v, k)| match k {
                VarKind::NonNegative => cols[col_of[v]],
                VarKind::Free => cols[col_of[v]] - cols[col_of[v] + 1],
            })
            .collect();
        let objective = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution { x, objective, pivots: t.pivots })
    }
}

struct Tableau {
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
    pivots: usize,
    blocked: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.a[r][j];
        self.a[r].iter_mut().for_each(|x| *x /= p);
        let pivot_row = core::mem::take(&mut self.a[r]);
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
                row[j] = 0.0;
            }
        }
        self.a[r] = pivot_row;
        self.basis[r] = j;
        self.pivots += 1;
    }

    fn reduced_costs(&self, c: &[f64]) -> Vec<f64> {
        let mut d = c.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = c[b];
            if cb != 0.0 {
                for (dj, a) in d.iter_mut().zip(&self.a[r]) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    fn optimize(&mut self, c: &[f64]) -> Result<(), LpError> {
        let w = self.width;
        let mut d = self.reduced_costs(c);
        let mut streak = 0;
        let mut since_refresh = 0;
        let mut fresh = true;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(LpError::PivotLimit);
            }
            if since_refresh >= REFRESH_EVERY {
                d = self.reduced_costs(c);
                since_refresh = 0;
                fresh = true;
            }
            let bland = streak >= DEGENERATE_STREAK;
            let candidates = (0..w).filter(|&j| !self.blocked[j] && d[j] > PIVOT_EPS);
            let entering = if bland {
                candidates.min()
            } else {
                candidates.max_by(|&x, &y| d[x].total_cmp(&d[y]).then(y.cmp(&x)))
            };
            let Some(j) = entering else {
                if fresh {
                    return Ok(());
                }
                // confirm optimality against drift-free reduced costs
                d = self.reduced_costs(c);
                since_refresh = 0;
                fresh = true;
                continue;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.a.len() {
                let arj = self.a[r][j];
                if arj > PIVOT_EPS {
                    let ratio = self.a[r][w].max(0.0) / arj;
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < best - 1e-12 || (ratio <= best + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                if fresh {
                    return Err(LpError::Unbounded);
                }
                d = self.reduced_costs(c);
                since_refresh = 0;
                fresh = true;
                continue;
            };
            streak = if ratio <= 1e-12 { streak + 1 } else { 0 };
            self.pivot(r, j);
            let f = d[j];
            for (dj, a) in d.iter_mut().zip(&self.a[r]) {
                *dj -= f * a;
            }
            d[j] = 0.0;
            since_refresh += 1;
            fresh = false;
        }
    }
}
