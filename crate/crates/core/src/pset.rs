//! Empirical membership in the difference sets
//! `P(a,b) = {α : ∃t, t^a − t^b = α, a ∈ C(t)}` and spot checks of their laws.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::choice::choice_set;
use crate::domain::{Alternative, TypeGrid, TypeProfile};
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::properties::{check_neutral, SampleOptions};
use crate::random::rng;
use crate::report::{CheckReport, Counterexample, Verdict};
use crate::tolerance::Tolerances;

/// Value for a column that must lose to both `x` and `y` for one agent:
/// one grid step below the smaller, or halfway to the lower bound when that
/// step leaves the box.
pub fn fill_value(lower: f64, x: f64, y: f64, step: f64) -> f64 {
    let low = x.min(y);
    if low - step > lower {
        low - step
    } else {
        0.5 * (lower + low)
    }
}

/// Profile with columns `a = x`, `b = y` and every other column filled low.
pub fn host_profile(grid: &TypeGrid, a: Alternative, b: Alternative, x: &[f64], y: &[f64]) -> TypeProfile {
    let n = grid.agents();
    let m = grid.alternatives();
    let mut t = TypeProfile::zeros(n, m);
    for i in 0..n {
        let fill = fill_value(grid.space().interval(i).lower, x[i], y[i], grid.step(i));
        for c in 0..m {
            let v = if c == a {
                x[i]
            } else if c == b {
                y[i]
            } else {
                fill
            };
            t.set(i, c, v);
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PSetVerdict {
    Member,
    NoWitnessFound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PSetSample {
    pub pair: (Alternative, Alternative),
    pub alpha: Vec<f64>,
    pub verdict: PSetVerdict,
    /// Rows of a profile with `t^a − t^b = α` and `a ∈ C(t)`.
    pub witness: Option<Vec<Vec<f64>>>,
}

/// Searches `t^b` over the grid coordinates with `t^a = t^b + α` strictly
/// inside the box. `Unrepresentable` when no placement fits.
pub fn pset_member(
    f: &Mechanism,
    a: Alternative,
    b: Alternative,
    alpha: &[f64],
    grid: &TypeGrid,
    tol: &Tolerances,
) -> Result<PSetSample> {
    let n = grid.agents();
    let m = grid.alternatives();
    if a == b || a >= m || b >= m {
        return Err(Error::invalid("pair must be two distinct alternatives"));
    }
    if alpha.len() != n {
        return Err(Error::Dimension(format!("α has {} entries for {n} agents", alpha.len())));
    }
    // per agent, the coordinates that leave room for the shift
    let options: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let iv = grid.space().interval(i);
            grid.coordinates(i).iter().copied().filter(|&y| iv.contains(y + alpha[i])).collect()
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return Err(Error::Unrepresentable);
    }
    let mut cursor = vec![0usize; n];
    let mut y = vec![0.0; n];
    let mut x = vec![0.0; n];
    loop {
        for i in 0..n {
            y[i] = options[i][cursor[i]];
            x[i] = y[i] + alpha[i];
        }
        let t = host_profile(grid, a, b, &x, &y);
        match choice_set(f, &t, tol) {
            Ok(cs) if cs.contains(a) => {
                return Ok(PSetSample {
                    pair: (a, b),
                    alpha: alpha.to_vec(),
                    verdict: PSetVerdict::Member,
                    witness: Some((0..n).map(|i| t.row(i).to_vec()).collect()),
                });
            }
            Ok(_) | Err(Error::DomainViolation(_)) => {}
            Err(e) => return Err(e),
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(PSetSample { pair: (a, b), alpha: alpha.to_vec(), verdict: PSetVerdict::NoWitnessFound, witness: None });
            }
            i -= 1;
            cursor[i] += 1;
            if cursor[i] < options[i].len() {
                break;
            }
            cursor[i] = 0;
        }
    }
}

fn is_member(
    f: &Mechanism,
    a: Alternative,
    b: Alternative,
    alpha: &[f64],
    grid: &TypeGrid,
    tol: &Tolerances,
) -> Result<Option<bool>> {
    match pset_member(f, a, b, alpha, grid, tol) {
        Ok(s) => Ok(Some(s.verdict == PSetVerdict::Member)),
        Err(Error::Unrepresentable) => Ok(None),
        Err(e) => Err(e),
    }
}

fn cx(explanation: alloc::string::String) -> Counterexample {
    Counterexample { profiles: Vec::new(), agent: None, explanation, margin: 1.0 }
}

/// Samples random `(a, b, c, α, β)` and checks, on each draw:
///
/// * `β − h ∈ P(a,b)` rules out `−β ∈ P(b,a)` (a witness for both fails);
/// * `β ∈ P(a,b)` and `α ∈ P(b,c)` give `β + α ∈ P(a,c)` (no witness is inconclusive);
/// * membership of `α` agrees across ordered pairs; a disagreement fails only
///   when `neutral` (computed with [`check_neutral`] when `None`) holds.
pub fn check_pset_laws(
    f: &Mechanism,
    grid: &TypeGrid,
    samples: usize,
    seed: u64,
    neutral: Option<bool>,
    tol: &Tolerances,
) -> Result<CheckReport> {
    let n = grid.agents();
    let m = grid.alternatives();
    if m < 3 {
        return Err(Error::invalid("this check needs at least three alternatives"));
    }
    let neutral = match neutral {
        Some(v) => v,
        None => check_neutral(f, grid, tol, &SampleOptions::default())?.passed(),
    };
    let mut report = CheckReport::new("pset-laws");
    let mut rng = rng(seed);
    let widths: Vec<f64> = grid.space().intervals().iter().map(|iv| iv.width()).collect();
    let mut disagreements = 0u64;
    let mut alts: Vec<Alternative> = (0..m).collect();
    for _ in 0..samples {
        alts.shuffle(&mut rng);
        let (a, b, c) = (alts[0], alts[1], alts[2]);
        let alpha: Vec<f64> = widths.iter().map(|w| rng.gen_range(-0.25 * w..0.25 * w)).collect();
        let beta: Vec<f64> = widths.iter().map(|w| rng.gen_range(-0.25 * w..0.25 * w)).collect();
        report.stats.profiles_examined += 1;

        let lowered: Vec<f64> = (0..n).map(|i| beta[i] - grid.step(i)).collect();
        let neg: Vec<f64> = beta.iter().map(|v| -v).collect();
        match (is_member(f, a, b, &lowered, grid, tol)?, is_member(f, b, a, &neg, grid, tol)?) {
            (Some(true), Some(true)) => report.violation(cx(format!(
                "β − h ∈ P({a},{b}) and −β ∈ P({b},{a}) for β = {beta:?}"
            ))),
            (None, _) | (_, None) => report.stats.skipped += 1,
            _ => report.stats.comparisons += 1,
        }

        if let (Some(true), Some(true)) = (is_member(f, a, b, &beta, grid, tol)?, is_member(f, b, c, &alpha, grid, tol)?) {
            let sum: Vec<f64> = (0..n).map(|i| beta[i] + alpha[i]).collect();
            match is_member(f, a, c, &sum, grid, tol)? {
                Some(true) => report.stats.comparisons += 1,
                Some(false) => report.stats.inconclusive += 1,
                None => report.stats.skipped += 1,
            }
        }

        let mut seen = None;
        let mut differs = false;
        for p in 0..m {
            for q in (0..m).filter(|&q| q != p) {
                if let Some(v) = is_member(f, p, q, &alpha, grid, tol)? {
                    differs |= seen.is_some_and(|s| s != v);
                    seen = Some(v);
                }
            }
        }
        if differs {
            disagreements += 1;
            if neutral {
                report.violation(cx(format!("membership of α = {alpha:?} differs across pairs")));
            }
        }
    }
    if disagreements > 0 && !neutral {
        report.note(format!(
            "membership differs across pairs for {disagreements} of {samples} draws; expected since f is not neutral"
        ));
    }
    if report.stats.inconclusive > 0 {
        report.note(format!("{} closure cases had no witness on the grid", report.stats.inconclusive));
    }
    if report.stats.comparisons == 0 && report.verdict == Verdict::Pass {
        report.verdict = Verdict::Inconclusive;
    }
    Ok(report.finish(false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Interval;
    use crate::mechanism::AffineMaximizer;

    fn setup() -> (Mechanism, TypeGrid, Tolerances) {
        let grid = TypeGrid::uniform(2, Interval::new(-2.0, 2.0).unwrap(), 5, 3).unwrap();
        let tol = Tolerances::for_grid(&grid);
        let f = Mechanism::Affine(AffineMaximizer::weighted_welfare(vec![1.0, 1.0], 3).unwrap());
        (f, grid, tol)
    }

    #[test]
    fn fill_stays_inside() {
        assert_eq!(fill_value(0.0, 0.5, 0.7, 0.1), 0.4);
        assert_eq!(fill_value(0.0, 0.05, 0.7, 0.1), 0.025);
    }

    #[test]
    fn weighted_welfare_memberships() {
        let (f, grid, tol) = setup();
        let s = pset_member(&f, 0, 1, &[1.0, 1.0], &grid, &tol).unwrap();
        assert_eq!(s.verdict, PSetVerdict::Member);
        let w = s.witness.unwrap();
        assert!((w[0][0] - w[0][1] - 1.0).abs() < 1e-12);
        assert_eq!(pset_member(&f, 0, 1, &[0.0, 0.0], &grid, &tol).unwrap().verdict, PSetVerdict::Member);
        assert_eq!(pset_member(&f, 0, 1, &[-1.0, -1.0], &grid, &tol).unwrap().verdict, PSetVerdict::NoWitnessFound);
    }

    #[test]
    fn too_wide_is_unrepresentable() {
        let (f, grid, tol) = setup();
        assert_eq!(pset_member(&f, 0, 1, &[4.5, 0.0], &grid, &tol).unwrap_err(), Error::Unrepresentable);
    }

    #[test]
    fn laws_hold_for_weighted_welfare() {
        let (f, grid, tol) = setup();
        let r = check_pset_laws(&f, &grid, 20, 7, None, &tol).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn offsets_break_pair_agreement_without_failing() {
        let grid = TypeGrid::uniform(2, Interval::new(-2.0, 2.0).unwrap(), 5, 3).unwrap();
        let tol = Tolerances::for_grid(&grid);
        let f = Mechanism::Affine(AffineMaximizer::new(vec![0.5, 0.5], vec![0.0, 0.3, 0.7]).unwrap());
        let r = check_pset_laws(&f, &grid, 30, 1, None, &tol).unwrap();
        assert!(!r.failed());
        assert!(r.notes.iter().any(|n| n.contains("differs across pairs")));
    }
}
