//! Offset calibration and the neutralize-then-fit pipeline.
//!
//! `κ(a)` is the smallest uniform raise of column `a` above the all-zeros
//! profile that brings `a` into the choice set. Shifting `f` by `κ` yields a
//! neutral mechanism whose weighted-welfare fit, combined with `κ`, is an
//! affine-maximizer representation of `f`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::choice::choice_set;
use crate::domain::{Alternative, TypeGrid, TypeProfile, TypeSpace};
use crate::error::{Error, Result};
use crate::fit::{fit_weighted_welfare, FitOptions, FitResult};
use crate::mechanism::Mechanism;
use crate::properties::{check_neutral, SampleOptions};
use crate::report::CheckReport;
use crate::tolerance::Tolerances;

/// Bisection stops when the bracket is this fraction of the box width.
pub const BISECTION_FRACTION: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaCalibration {
    pub kappa: Vec<f64>,
    /// Bracket width at which bisection stopped.
    pub tolerance: f64,
    /// Choice set at the all-zeros profile.
    pub base_choice_set: Vec<Alternative>,
    /// Whether every alternative is in the choice set at `t^a = κ(a)·1`.
    pub lemma_zero: bool,
    pub warnings: Vec<String>,
}

fn not_calibratable(alternative: Option<Alternative>, reason: impl Into<String>) -> Error {
    Error::NotCalibratable { alternative, reason: reason.into() }
}

fn raised(n: usize, m: usize, a: Alternative, eps: f64) -> TypeProfile {
    let mut t = TypeProfile::zeros(n, m);
    t.boost_column(a, eps);
    t
}

pub fn calibrate_kappa(f: &Mechanism, space: &TypeSpace, tol: &Tolerances) -> Result<KappaCalibration> {
    if !space.is_symmetric() {
        return Err(not_calibratable(None, "the box must be finite and symmetric about 0"));
    }
    let n = space.agents();
    let m = f.alternatives();
    let half = space.intervals().iter().map(|iv| iv.upper).fold(f64::INFINITY, f64::min);
    let width = 2.0 * half;
    let smallest_rung = tol.ladder()[2];
    let member = |a: Alternative, eps: f64| -> Result<bool> {
        match choice_set(f, &raised(n, m, a, eps), tol) {
            Ok(cs) => Ok(cs.contains(a)),
            Err(Error::DomainViolation(msg)) => Err(not_calibratable(Some(a), msg)),
            Err(e) => Err(e),
        }
    };

    let zero = TypeProfile::zeros(n, m);
    let base = match choice_set(f, &zero, tol) {
        Ok(cs) => cs,
        Err(Error::DomainViolation(msg)) => return Err(not_calibratable(None, msg)),
        Err(e) => return Err(e),
    };
    let stop = BISECTION_FRACTION * width;
    let mut kappa = vec![0.0; m];
    for (a, k) in kappa.iter_mut().enumerate() {
        if base.contains(a) {
            continue;
        }
        let mut hi = half - 2.0 * tol.boost;
        if !member(a, hi)? {
            return Err(not_calibratable(
                Some(a),
                format!("never enters the choice set for raises up to {hi}"),
            ));
        }
        let mut lo = 0.0;
        while hi - lo > stop {
            let mid = 0.5 * (lo + hi);
            if member(a, mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // membership needs the smallest boost rung to win, so the bracket sits one rung low
        *k = 0.5 * (lo + hi) + smallest_rung;
    }

    let mut at_kappa = TypeProfile::zeros(n, m);
    for (a, k) in kappa.iter().enumerate() {
        at_kappa.boost_column(a, *k);
    }
    let mut warnings = Vec::new();
    let lemma_zero = match choice_set(f, &at_kappa, tol) {
        Ok(cs) => cs.members().len() == m,
        Err(e) => {
            warnings.push(format!("choice set at the calibrated profile: {e}"));
            false
        }
    };
    if !lemma_zero {
        warnings.push("choice set at t^a = κ(a)·1 is not every alternative".into());
    }
    Ok(KappaCalibration {
        kappa,
        tolerance: stop,
        base_choice_set: base.members(),
        lemma_zero,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeutralizedFit {
    pub calibration: KappaCalibration,
    /// Neutrality of `f^κ` on the grid.
    pub neutrality: CheckReport,
    /// Combined representation; agreement is measured against `f` itself.
    pub fit: FitResult,
}

pub fn neutralize_and_fit(
    f: &Mechanism,
    space: &TypeSpace,
    grid: &TypeGrid,
    tol: &Tolerances,
    opts: &SampleOptions,
    fit_opts: &FitOptions,
) -> Result<NeutralizedFit> {
    let calibration = calibrate_kappa(f, space, tol)?;
    let kappa = calibration.kappa.clone();
    let g = Mechanism::shifted(f.clone(), kappa.clone())?;
    let neutrality = check_neutral(&g, grid, tol, opts)?;
    // g(t' − κ) = f(t'), so the weighted fit of g runs on the κ-shifted grid
    let choices = f.tabulate(grid, tol)?;
    let mut fit = fit_weighted_welfare(grid, &choices, Some(&kappa), fit_opts, tol)?;
    let scale: f64 = fit.lambda.iter().sum();
    fit.kappa = kappa.iter().map(|k| (k - kappa[0]) * scale).collect();
    fit.notes.push(format!("neutrality of the shifted mechanism: {}", neutrality.verdict.as_str()));
    Ok(NeutralizedFit { calibration, neutrality, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Interval;
    use crate::mechanism::AffineMaximizer;

    fn space(half: f64) -> TypeSpace {
        TypeSpace::uniform(2, Interval::new(-half, half).unwrap()).unwrap()
    }

    #[test]
    fn recovers_affine_offsets() {
        let s = space(2.0);
        let tol = Tolerances::for_space(&s);
        let f = Mechanism::Affine(AffineMaximizer::new(vec![0.5, 0.5], vec![0.0, 0.3, 0.7]).unwrap());
        let cal = calibrate_kappa(&f, &s, &tol).unwrap();
        assert_eq!(cal.base_choice_set, [0]);
        for (k, want) in cal.kappa.iter().zip([0.0, 0.3, 0.7]) {
            assert!((k - want).abs() < 1e-5, "{k} vs {want}");
        }
        assert!(cal.lemma_zero);
    }

    #[test]
    fn weighted_welfare_needs_no_offsets() {
        let s = space(1.0);
        let tol = Tolerances::for_space(&s);
        let f = Mechanism::Affine(AffineMaximizer::weighted_welfare(vec![0.3, 0.7], 3).unwrap());
        let cal = calibrate_kappa(&f, &s, &tol).unwrap();
        assert_eq!(cal.base_choice_set, [0, 1, 2]);
        assert_eq!(cal.kappa, [0.0; 3]);
    }

    #[test]
    fn example1_is_not_calibratable() {
        let s = TypeSpace::uniform(2, Interval::new(0.0, 1.0).unwrap()).unwrap();
        let err = calibrate_kappa(&Mechanism::Example1, &s, &Tolerances::for_space(&s)).unwrap_err();
        assert!(matches!(err, Error::NotCalibratable { alternative: None, .. }));
    }

    #[test]
    fn unreachable_alternative() {
        let s = space(1.0);
        let tol = Tolerances::for_space(&s);
        let f = Mechanism::Affine(AffineMaximizer::new(vec![0.5, 0.5], vec![0.0, 0.0, 5.0]).unwrap());
        let err = calibrate_kappa(&f, &s, &tol).unwrap_err();
        assert!(matches!(err, Error::NotCalibratable { alternative: Some(2), .. }));
    }

    #[test]
    fn pipeline_round_trip() {
        let s = space(3.0);
        let grid = TypeGrid::new(s.clone(), vec![5, 5], 3).unwrap();
        let tol = Tolerances::for_grid(&grid);
        let f = Mechanism::Affine(AffineMaximizer::new(vec![0.6, 0.4], vec![0.0, 0.5, 1.0]).unwrap());
        let out = neutralize_and_fit(&f, &s, &grid, &tol, &SampleOptions::default(), &FitOptions::default()).unwrap();
        assert!(out.neutrality.passed());
        assert!(out.fit.feasible());
        assert_eq!(out.fit.agreement, 1.0);
    }
}
