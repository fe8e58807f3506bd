//! Max-margin linear programs recovering affine-maximizer and
//! weighted-welfare representations from a mechanism's grid choices.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::domain::{Alternative, TypeGrid, TypeProfile};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpError, Relation, VarKind};
use crate::mechanism::Mechanism;
use crate::random::sample_indices;
use crate::tolerance::Tolerances;

/// Most violating profiles listed in an infeasible fit.
pub const MAX_VIOLATIONS: usize = 10;

/// Differences are bucketed at this resolution before deduplication.
const DEDUP_QUANTUM: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitStatus {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub status: FitStatus,
    /// Normalized so that `Σλ = 1`.
    pub lambda: Vec<f64>,
    /// `κ(first) = 0`; empty for ordering fits.
    pub kappa: Vec<f64>,
    pub margin: f64,
    pub violating_profiles: Vec<usize>,
    pub agreement: f64,
    /// Constraint rows after deduplication.
    pub rows: usize,
    /// For ordering fits: whether the indifference data pins λ down.
    pub unique: Option<bool>,
    pub notes: Vec<String>,
}

impl FitResult {
    pub fn feasible(&self) -> bool {
        self.status == FitStatus::Feasible
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FitOptions {
    /// Fit on a seeded subsample of `count` profiles, then verify on the full grid.
    pub subsample: Option<(usize, u64)>,
}

pub(crate) fn lp_error(e: LpError) -> Error {
    Error::Solver(format!("{e}"))
}

/// Grid data for a fit: profile `t` (minus `shift` on each column) was mapped
/// to `choices[t]`.
struct FitData<'a> {
    grid: &'a TypeGrid,
    choices: &'a [Alternative],
    shift: Option<&'a [f64]>,
}

impl FitData<'_> {
    fn profile(&self, idx: usize, t: &mut TypeProfile) {
        self.grid.write_profile(idx, t);
        if let Some(delta) = self.shift {
            for i in 0..t.agents() {
                for (a, d) in delta.iter().enumerate() {
                    t.set(i, a, t.get(i, a) - d);
                }
            }
        }
    }
}

fn quantize(v: f64) -> i64 {
    let q = v / DEDUP_QUANTUM;
    if q >= 0.0 {
        (q + 0.5) as i64
    } else {
        (q - 0.5) as i64
    }
}

fn score(t: &TypeProfile, lambda: &[f64], kappa: &[f64], a: Alternative) -> f64 {
    (0..t.agents()).map(|i| lambda[i] * t.get(i, a)).sum::<f64>() - kappa[a]
}

fn solve_fit(
    data: &FitData<'_>,
    indices: &[usize],
    weighted_only: bool,
) -> Result<(Vec<f64>, Vec<f64>, f64, usize)> {
    let n = data.grid.agents();
    let m = data.grid.alternatives();
    let mut rows: BTreeMap<(Alternative, Alternative, Vec<i64>), ()> = BTreeMap::new();
    let mut t = TypeProfile::zeros(n, m);
    for &idx in indices {
        data.profile(idx, &mut t);
        let a = data.choices[idx];
        for b in (0..m).filter(|&b| b != a) {
            let key: Vec<i64> = (0..n)
                .map(|i| quantize(t.get(i, a) - t.get(i, b)))
                .collect();
            if weighted_only && key.iter().all(|&k| k == 0) {
                continue;
            }
            rows.insert((a, b, key), ());
        }
    }
    // variables: λ (n), κ_1..κ_{m-1} unless weighted-only, γ
    let nk = if weighted_only { 0 } else { m - 1 };
    let nv = n + nk + 1;
    let mut kinds = vec![VarKind::NonNegative; n];
    kinds.extend(core::iter::repeat_n(VarKind::Free, nk + 1));
    let mut lp = LinearProgram::new(kinds);
    let mut c = vec![0.0; nv];
    c[nv - 1] = 1.0;
    lp.maximize(c);
    for (a, b, key) in rows.keys() {
        let mut row = vec![0.0; nv];
        for i in 0..n {
            row[i] = key[i] as f64 * DEDUP_QUANTUM;
        }
        if !weighted_only {
            if *a > 0 {
                row[n + a - 1] -= 1.0;
            }
            if *b > 0 {
                row[n + b - 1] += 1.0;
            }
        }
        row[nv - 1] = -1.0;
        lp.add(row, Relation::Ge, 0.0);
    }
    let mut norm = vec![0.0; nv];
    norm[..n].iter_mut().for_each(|x| *x = 1.0);
    lp.add(norm, Relation::Eq, 1.0);
    let mut cap = vec![0.0; nv];
    cap[nv - 1] = 1.0;
    lp.add(cap, Relation::Le, 1.0);
    let count = rows.len();
    let sol = lp.solve().map_err(lp_error)?;
    let lambda = sol.x[..n].to_vec();
    let mut kappa = vec![0.0; m];
    if !weighted_only {
        kappa[1..].copy_from_slice(&sol.x[n..n + nk]);
    }
    Ok((lambda, kappa, sol.x[nv - 1], count))
}

fn fit_data(
    data: &FitData<'_>,
    opts: &FitOptions,
    weighted_only: bool,
    tol: &Tolerances,
) -> Result<FitResult> {
    let count = data.grid.profile_count();
    let (indices, sub) = match opts.subsample {
        Some((k, seed)) if k < count => (sample_indices(seed, count, k), true),
        _ => ((0..count).collect(), false),
    };
    let (lambda, kappa, margin, rows) = solve_fit(data, &indices, weighted_only)?;
    let mut status = if margin >= -tol.fit { FitStatus::Feasible } else { FitStatus::Infeasible };
    let mut notes = Vec::new();
    if sub {
        notes.push(format!("fitted on {} of {count} profiles", indices.len()));
    }

    // full-grid verification at the max-margin optimum
    let mut t = TypeProfile::zeros(data.grid.agents(), data.grid.alternatives());
    let mut agree = 0usize;
    let mut violating = Vec::new();
    let mut violations = 0usize;
    for idx in 0..count {
        data.profile(idx, &mut t);
        let a = data.choices[idx];
        let sa = score(&t, &lambda, &kappa, a);
        let worst = (0..kappa.len())
            .filter(|&b| b != a)
            .map(|b| sa - score(&t, &lambda, &kappa, b))
            .fold(f64::INFINITY, f64::min);
        if worst >= -tol.fit {
            agree += 1;
        } else {
            violations += 1;
            if violating.len() < MAX_VIOLATIONS {
                violating.push(idx);
            }
        }
    }
    if status == FitStatus::Feasible && violations > 0 {
        status = FitStatus::Infeasible;
        notes.push(format!("full-grid verification found {violations} violating profiles"));
    }
    if status == FitStatus::Infeasible && violations > 0 {
        notes.push(format!("{violations} profiles violate the max-margin fit"));
    }
    Ok(FitResult {
        status,
        lambda,
        kappa,
        margin,
        violating_profiles: violating,
        agreement: agree as f64 / count as f64,
        rows,
        unique: None,
        notes,
    })
}

/// Fits `argmax_a Σλ_i t_i^a − κ(a)` to `f` on the grid by maximizing the
/// worst-case margin `γ`; feasible iff `γ ≥ −τ_fit`.
pub fn fit_affine_maximizer(f: &Mechanism, grid: &TypeGrid, opts: &FitOptions, tol: &Tolerances) -> Result<FitResult> {
    let choices = f.tabulate(grid, tol)?;
    fit_affine_choices(grid, &choices, opts, tol)
}

pub fn fit_affine_choices(grid: &TypeGrid, choices: &[Alternative], opts: &FitOptions, tol: &Tolerances) -> Result<FitResult> {
    fit_data(&FitData { grid, choices, shift: None }, opts, false, tol)
}

/// Weighted-welfare fit (`κ ≡ 0`) of the data `t − 1_shift ↦ choices[t]`.
pub fn fit_weighted_welfare(
    grid: &TypeGrid,
    choices: &[Alternative],
    shift: Option<&[f64]>,
    opts: &FitOptions,
    tol: &Tolerances,
) -> Result<FitResult> {
    fit_data(&FitData { grid, choices, shift }, opts, true, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Interval;
    use crate::mechanism::AffineMaximizer;

    #[test]
    fn affine_round_trip() {
        let grid = TypeGrid::uniform(2, Interval::new(0.0, 1.0).unwrap(), 4, 3).unwrap();
        let tol = Tolerances::for_grid(&grid);
        let f = Mechanism::Affine(AffineMaximizer::new(vec![0.7, 0.3], vec![0.0, 0.2, 0.4]).unwrap());
        let fit = fit_affine_maximizer(&f, &grid, &FitOptions::default(), &tol).unwrap();
        assert!(fit.feasible());
        assert_eq!(fit.agreement, 1.0);
        assert!((fit.lambda.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(fit.kappa[0], 0.0);
    }

    #[test]
    fn single_profile_is_feasible() {
        let grid = TypeGrid::uniform(1, Interval::new(0.0, 1.0).unwrap(), 1, 3).unwrap();
        let tol = Tolerances::for_grid(&grid);
        let fit = fit_affine_choices(&grid, &[2], &FitOptions::default(), &tol).unwrap();
        assert!(fit.feasible());
        assert_eq!(fit.agreement, 1.0);
    }

    #[test]
    fn non_affine_table_is_infeasible() {
        // one agent, two alternatives: choose b exactly when t^a > t^b
        let grid = TypeGrid::uniform(1, Interval::new(0.0, 1.0).unwrap(), 3, 2).unwrap();
        let tol = Tolerances::for_grid(&grid);
        let choices: Vec<usize> = grid.profiles().map(|(_, t)| usize::from(t.get(0, 0) > t.get(0, 1))).collect();
        let fit = fit_affine_choices(&grid, &choices, &FitOptions::default(), &tol).unwrap();
        assert!(!fit.feasible());
        assert!(!fit.violating_profiles.is_empty());
        assert!(fit.agreement < 1.0);
    }

    #[test]
    fn weighted_fit_on_shifted_data() {
        let grid = TypeGrid::uniform(2, Interval::new(-1.0, 1.0).unwrap(), 4, 3).unwrap();
        let tol = Tolerances::for_grid(&grid);
        let kappa = vec![0.0, 0.25, 0.5];
        let f = Mechanism::Affine(AffineMaximizer::new(vec![0.6, 0.4], kappa.clone()).unwrap());
        let choices = f.tabulate(&grid, &tol).unwrap();
        let fit = fit_weighted_welfare(&grid, &choices, Some(&kappa), &FitOptions::default(), &tol).unwrap();
        assert!(fit.feasible());
        assert_eq!(fit.agreement, 1.0);
        let plain = fit_weighted_welfare(&grid, &choices, None, &FitOptions::default(), &tol).unwrap();
        assert!(!plain.feasible());
    }
}
