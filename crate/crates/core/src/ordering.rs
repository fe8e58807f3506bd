//! The ordering a mechanism induces on utility vectors: `x` is compared with
//! `y` by hosting them as two columns of one profile, every other column
//! filled low, and reading the choice set.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::Serialize;

use crate::choice::{choice_set, Membership};
use crate::domain::{Permutation, TypeGrid};
use crate::error::{Error, Result};
use crate::fit::{lp_error, FitResult, FitStatus};
use crate::lp::{LinearProgram, Relation, VarKind};
use crate::mechanism::Mechanism;
use crate::pset::host_profile;
use crate::random::rng;
use crate::report::{CheckReport, Counterexample, Verdict};
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `x P y`
    Prefers,
    Indifferent,
    /// `y P x`
    Dispreferred,
    Inconclusive,
}

impl Comparison {
    pub fn converse(self) -> Self {
        match self {
            Comparison::Prefers => Comparison::Dispreferred,
            Comparison::Dispreferred => Comparison::Prefers,
            c => c,
        }
    }

    /// `x R y`: at least as good.
    pub fn weakly_prefers(self) -> bool {
        matches!(self, Comparison::Prefers | Comparison::Indifferent)
    }
}

/// Compares `x` and `y` hosted as alternatives 0 and 1.
pub fn induced_compare(f: &Mechanism, x: &[f64], y: &[f64], grid: &TypeGrid, tol: &Tolerances) -> Result<Comparison> {
    let space = grid.space();
    if x.len() != grid.agents() || y.len() != grid.agents() {
        return Err(Error::Dimension(format!("vectors must have {} entries", grid.agents())));
    }
    if !space.contains_vector(x) || !space.contains_vector(y) {
        return Err(Error::domain("compared vectors must lie inside the box"));
    }
    let cs = choice_set(f, &host_profile(grid, 0, 1, x, y), tol)?;
    Ok(match (cs.verdicts[0], cs.verdicts[1]) {
        (Membership::In, Membership::In) => Comparison::Indifferent,
        (Membership::In, Membership::Out) => Comparison::Prefers,
        (Membership::Out, Membership::In) => Comparison::Dispreferred,
        _ => Comparison::Inconclusive,
    })
}

fn key(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Memoized induced comparisons.
pub struct OrderingRelation<'a> {
    f: &'a Mechanism,
    grid: &'a TypeGrid,
    tol: Tolerances,
    cache: BTreeMap<(Vec<u64>, Vec<u64>), Comparison>,
}

impl<'a> OrderingRelation<'a> {
    pub fn new(f: &'a Mechanism, grid: &'a TypeGrid, tol: &Tolerances) -> Self {
        OrderingRelation { f, grid, tol: *tol, cache: BTreeMap::new() }
    }

    pub fn compare(&mut self, x: &[f64], y: &[f64]) -> Result<Comparison> {
        let k = (key(x), key(y));
        if let Some(c) = self.cache.get(&k) {
            return Ok(*c);
        }
        let c = induced_compare(self.f, x, y, self.grid, &self.tol)?;
        self.cache.insert(k, c);
        Ok(c)
    }

    pub fn evaluations(&self) -> usize {
        self.cache.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabeledComparison {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub result: Comparison,
}

/// Half the sampled region's margin to the box edge, as a fraction of the width.
const INSET: f64 = 0.1;

fn uniform_point<R: Rng>(rng: &mut R, grid: &TypeGrid) -> Vec<f64> {
    grid.space()
        .intervals()
        .iter()
        .map(|iv| {
            let w = iv.width();
            rng.gen_range(iv.lower + INSET * w..iv.upper - INSET * w)
        })
        .collect()
}

/// Seeded sample points and translation shifts for [`check_order_axioms`].
/// Shifts stay within a tenth of each agent's width.
pub fn axiom_samples(grid: &TypeGrid, count: usize, shifts: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut rng = rng(seed);
    let points = (0..count).map(|_| uniform_point(&mut rng, grid)).collect();
    let moves = (0..shifts)
        .map(|_| {
            grid.space()
                .intervals()
                .iter()
                .map(|iv| {
                    let w = INSET * iv.width();
                    rng.gen_range(-w..w)
                })
                .collect()
        })
        .collect();
    (points, moves)
}

/// Bisects `s ↦ pred(y0 + s·1)` on `[lo, hi]` given `pred(lo) != pred(hi)`.
fn edge(rel: &mut OrderingRelation<'_>, x: &[f64], y0: &[f64], mut lo: f64, mut hi: f64, want: Comparison) -> Result<f64> {
    let at = |s: f64| -> Vec<f64> { y0.iter().map(|v| v + s).collect() };
    let low_side = rel.compare(x, &at(lo))? == want;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (rel.compare(x, &at(mid))? == want) == low_side {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Draws `count` labelled comparisons, alternating uniform pairs with pairs
/// placed inside the indifference band: `y` slides along the diagonal until
/// both band edges are bracketed, and the midpoint is labelled.
pub fn sample_comparisons(
    f: &Mechanism,
    grid: &TypeGrid,
    count: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<LabeledComparison>> {
    let mut rng = rng(seed);
    let mut rel = OrderingRelation::new(f, grid, tol);
    let mut out = Vec::with_capacity(count);
    let bounds: Vec<(f64, f64)> = grid
        .space()
        .intervals()
        .iter()
        .map(|iv| (iv.lower + 0.5 * INSET * iv.width(), iv.upper - 0.5 * INSET * iv.width()))
        .collect();
    while out.len() < count {
        let x = uniform_point(&mut rng, grid);
        let y0 = uniform_point(&mut rng, grid);
        if out.len() % 2 == 1 {
            // range of s keeping y0 + s·1 inside the inset box
            let s_lo = bounds.iter().zip(&y0).map(|((l, _), v)| l - v).fold(f64::NEG_INFINITY, f64::max);
            let s_hi = bounds.iter().zip(&y0).map(|((_, u), v)| u - v).fold(f64::INFINITY, f64::min);
            let at = |s: f64| -> Vec<f64> { y0.iter().map(|v| v + s).collect() };
            if s_lo < s_hi
                && rel.compare(&x, &at(s_lo))? == Comparison::Prefers
                && rel.compare(&x, &at(s_hi))? == Comparison::Dispreferred
            {
                let first = edge(&mut rel, &x, &y0, s_lo, s_hi, Comparison::Prefers)?;
                let second = edge(&mut rel, &x, &y0, s_lo, s_hi, Comparison::Dispreferred)?;
                let y = at(0.5 * (first + second));
                let result = rel.compare(&x, &y)?;
                out.push(LabeledComparison { x, y, result });
                continue;
            }
        }
        let result = rel.compare(&x, &y0)?;
        out.push(LabeledComparison { x, y: y0, result });
    }
    Ok(out)
}

fn cx(explanation: alloc::string::String) -> Counterexample {
    Counterexample { profiles: Vec::new(), agent: None, explanation, margin: 1.0 }
}

/// Checks completeness, reflexivity, antisymmetry of strict preference,
/// transitivity, weak Pareto, translation invariance under `shifts` and, when
/// `anonymous`, invariance under agent transpositions, all on `samples`.
/// Continuity is not tested directly; the linear fit is its proxy.
pub fn check_order_axioms(
    f: &Mechanism,
    samples: &[Vec<f64>],
    shifts: &[Vec<f64>],
    grid: &TypeGrid,
    anonymous: bool,
    tol: &Tolerances,
) -> Result<CheckReport> {
    let mut rel = OrderingRelation::new(f, grid, tol);
    let mut report = CheckReport::new("order-axioms");
    report.stats.profiles_examined = samples.len();
    let k = samples.len();
    let mut table = vec![Comparison::Inconclusive; k * k];
    for i in 0..k {
        for j in 0..k {
            table[i * k + j] = rel.compare(&samples[i], &samples[j])?;
        }
    }
    let at = |i: usize, j: usize| table[i * k + j];
    for i in 0..k {
        for j in 0..k {
            report.stats.comparisons += 1;
            let v = at(i, j);
            if v == Comparison::Inconclusive {
                report.stats.inconclusive += 1;
                report.violation(cx(format!("completeness: samples {i} and {j} are not comparable")));
                continue;
            }
            if i == j && v != Comparison::Indifferent {
                report.violation(cx(format!("reflexivity: sample {i} is not indifferent to itself")));
            }
            if i < j && at(j, i) != Comparison::Inconclusive && at(j, i) != v.converse() {
                report.violation(cx(format!("antisymmetry: samples {i}, {j} give {v:?} and {:?}", at(j, i))));
            }
            let xi = &samples[i];
            let xj = &samples[j];
            if xi.iter().zip(xj).all(|(a, b)| a - b > tol.numeric) && v != Comparison::Prefers {
                report.violation(cx(format!("weak Pareto: sample {i} dominates {j} but is not preferred")));
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            let ij = at(i, j);
            if !ij.weakly_prefers() {
                continue;
            }
            for l in 0..k {
                let jl = at(j, l);
                if !jl.weakly_prefers() {
                    continue;
                }
                report.stats.comparisons += 1;
                let want = if ij == Comparison::Prefers || jl == Comparison::Prefers {
                    Comparison::Prefers
                } else {
                    Comparison::Indifferent
                };
                if at(i, l) != want {
                    report.violation(cx(format!(
                        "transitivity: samples {i}, {j}, {l} give {ij:?}, {jl:?} but {:?}",
                        at(i, l)
                    )));
                }
            }
        }
    }
    let space = grid.space();
    for z in shifts {
        for i in 0..k {
            for j in (i + 1)..k {
                let xi: Vec<f64> = samples[i].iter().zip(z).map(|(a, b)| a + b).collect();
                let xj: Vec<f64> = samples[j].iter().zip(z).map(|(a, b)| a + b).collect();
                if !space.contains_vector(&xi) || !space.contains_vector(&xj) {
                    report.stats.skipped += 1;
                    continue;
                }
                report.stats.comparisons += 1;
                let v = rel.compare(&xi, &xj)?;
                if v != at(i, j) {
                    report.violation(cx(format!(
                        "invariance: shifting samples {i}, {j} by {z:?} turns {:?} into {v:?}",
                        at(i, j)
                    )));
                }
            }
        }
    }
    if anonymous {
        let n = grid.agents();
        let perms: Vec<Permutation> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| Permutation::transposition(n, a, b)))
            .collect();
        for (i, x) in samples.iter().enumerate() {
            for sigma in &perms {
                let mut y = vec![0.0; n];
                for (a, v) in x.iter().enumerate() {
                    y[sigma.image(a)] = *v;
                }
                report.stats.comparisons += 1;
                let v = rel.compare(x, &y)?;
                if v != Comparison::Indifferent {
                    report.violation(cx(format!(
                        "anonymity: sample {i} and its relabeling {:?} give {v:?}",
                        sigma.images()
                    )));
                }
            }
        }
    }
    report.note("continuity is not tested directly; the linear representation fit is its proxy");
    if report.stats.comparisons == 0 {
        report.verdict = Verdict::Inconclusive;
    }
    Ok(report.finish(false))
}

/// Numerical rank by Gaussian elimination with partial pivoting.
fn rank(rows: &[Vec<f64>], eps: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            break;
        };
        if a[p][c].abs() <= eps * scale {
            continue;
        }
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot = &head[r];
        for row in tail {
            let factor = row[c] / pivot[c];
            for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= factor * p;
            }
        }
        r += 1;
    }
    r
}

/// Fits `λ ≥ 0, Σλ = 1` to labelled comparisons.
///
/// The first program maximizes the strict margin `γ` with indifferences held
/// within `τ_fit`; the data is linearly representable iff `γ ≥ τ_fit` (or
/// there are no strict rows). A second program then minimizes the largest
/// indifference residual with strict rows held at `τ_fit`, which pins λ down
/// when the indifference differences span `n − 1` dimensions.
pub fn fit_linear_order(comparisons: &[LabeledComparison], agents: usize, tol: &Tolerances) -> Result<FitResult> {
    let n = agents;
    let mut strict = Vec::new();
    let mut indiff = Vec::new();
    let mut skipped = 0usize;
    for c in comparisons {
        if c.x.len() != n || c.y.len() != n {
            return Err(Error::Dimension(format!("comparison vectors must have {n} entries")));
        }
        let d: Vec<f64> = c.x.iter().zip(&c.y).map(|(a, b)| a - b).collect();
        match c.result {
            Comparison::Prefers => strict.push(d),
            Comparison::Dispreferred => strict.push(d.iter().map(|v| -v).collect()),
            Comparison::Indifferent => indiff.push(d),
            Comparison::Inconclusive => skipped += 1,
        }
    }
    let mut notes = Vec::new();
    if skipped > 0 {
        notes.push(format!("{skipped} inconclusive comparisons ignored"));
    }
    let uniform = vec![1.0 / n as f64; n];
    let unique = Some(n <= 1 || rank(&indiff, 1e-9) >= n - 1);

    // max γ  s.t.  λ·d ≥ γ (strict), |λ·d| ≤ τ_fit (indifferent), Σλ = 1, γ ≤ 1
    let mut lp = LinearProgram::new({
        let mut k = vec![VarKind::NonNegative; n];
        k.push(VarKind::Free);
        k
    });
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    lp.maximize(c);
    for d in &strict {
        let mut row = d.clone();
        row.push(-1.0);
        lp.add(row, Relation::Ge, 0.0);
    }
    for d in &indiff {
        let mut row = d.clone();
        row.push(0.0);
        lp.add(row.clone(), Relation::Le, tol.fit);
        lp.add(row, Relation::Ge, -tol.fit);
    }
    lp.add([vec![1.0; n], vec![0.0]].concat(), Relation::Eq, 1.0);
    let mut cap = vec![0.0; n + 1];
    cap[n] = 1.0;
    lp.add(cap, Relation::Le, 1.0);
    let first = match lp.solve() {
        Ok(s) => s,
        Err(crate::lp::LpError::Infeasible) => {
            notes.push("no λ keeps every indifference within τ_fit".into());
            return Ok(FitResult {
                status: FitStatus::Infeasible,
                lambda: uniform,
                kappa: Vec::new(),
                margin: f64::NEG_INFINITY,
                violating_profiles: Vec::new(),
                agreement: agreement(&strict, &indiff, &vec![1.0 / n as f64; n], tol),
                rows: strict.len() + indiff.len(),
                unique,
                notes,
            });
        }
        Err(e) => return Err(lp_error(e)),
    };
    let gamma = if strict.is_empty() { 0.0 } else { first.x[n] };
    let feasible = strict.is_empty() || gamma >= tol.fit;
    let mut lambda = first.x[..n].to_vec();

    if indiff.iter().all(|d| d.iter().all(|v| *v == 0.0)) && strict.is_empty() {
        lambda = uniform;
    } else if feasible && !indiff.is_empty() {
        // min ρ  s.t.  |λ·d| ≤ ρ (indifferent), λ·d ≥ τ_fit (strict), Σλ = 1
        let mut lp = LinearProgram::new(vec![VarKind::NonNegative; n + 1]);
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        lp.minimize(c);
        for d in &indiff {
            let mut row = d.clone();
            row.push(-1.0);
            lp.add(row, Relation::Le, 0.0);
            let mut row: Vec<f64> = d.iter().map(|v| -v).collect();
            row.push(-1.0);
            lp.add(row, Relation::Le, 0.0);
        }
        for d in &strict {
            let mut row = d.clone();
            row.push(0.0);
            lp.add(row, Relation::Ge, tol.fit);
        }
        lp.add([vec![1.0; n], vec![0.0]].concat(), Relation::Eq, 1.0);
        let second = lp.solve().map_err(lp_error)?;
        lambda = second.x[..n].to_vec();
        notes.push(format!("largest indifference residual {:.3e}", second.objective));
    }
    if !feasible {
        notes.push(format!("strict comparisons cannot be separated: best margin {gamma:.3e}"));
    }
    Ok(FitResult {
        status: if feasible { FitStatus::Feasible } else { FitStatus::Infeasible },
        agreement: agreement(&strict, &indiff, &lambda, tol),
        lambda,
        kappa: Vec::new(),
        margin: gamma,
        violating_profiles: Vec::new(),
        rows: strict.len() + indiff.len(),
        unique,
        notes,
    })
}

fn agreement(strict: &[Vec<f64>], indiff: &[Vec<f64>], lambda: &[f64], tol: &Tolerances) -> f64 {
    let total = strict.len() + indiff.len();
    if total == 0 {
        return 1.0;
    }
    let dot = |d: &Vec<f64>| d.iter().zip(lambda).map(|(a, b)| a * b).sum::<f64>();
    let slack = 1e-12;
    let ok = strict.iter().filter(|d| dot(d) > slack).count()
        + indiff.iter().filter(|d| dot(d).abs() <= tol.fit + slack).count();
    ok as f64 / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Interval;
    use crate::mechanism::AffineMaximizer;

    fn setup(lambda: Vec<f64>, half: f64) -> (Mechanism, TypeGrid, Tolerances) {
        let grid = TypeGrid::uniform(lambda.len(), Interval::new(-half, half).unwrap(), 5, 3).unwrap();
        let tol = Tolerances::for_grid(&grid);
        let f = Mechanism::Affine(AffineMaximizer::weighted_welfare(lambda, 3).unwrap());
        (f, grid, tol)
    }

    #[test]
    fn compares_by_weighted_sum() {
        let (f, grid, tol) = setup(vec![1.0, 1.0], 3.0);
        assert_eq!(induced_compare(&f, &[1.0, 0.0], &[0.0, 2.0], &grid, &tol).unwrap(), Comparison::Dispreferred);
        assert_eq!(induced_compare(&f, &[1.0, 0.0], &[0.0, 1.0], &grid, &tol).unwrap(), Comparison::Indifferent);
        assert_eq!(induced_compare(&f, &[0.6, 0.6], &[1.0, 0.0], &grid, &tol).unwrap(), Comparison::Prefers);
        assert!(matches!(
            induced_compare(&f, &[5.0, 0.0], &[0.0, 0.0], &grid, &tol),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn transitive_triple() {
        let (f, grid, tol) = setup(vec![1.0, 1.0], 2.0);
        let samples = vec![vec![1.0, 0.0], vec![0.6, 0.6], vec![0.0, 1.0]];
        let shifts = vec![vec![0.1, -0.2]];
        let r = check_order_axioms(&f, &samples, &shifts, &grid, true, &tol).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn weights_break_anonymity_axiom() {
        let (f, grid, tol) = setup(vec![2.0, 1.0], 2.0);
        let samples = vec![vec![1.0, 0.0], vec![0.0, 0.5]];
        let r = check_order_axioms(&f, &samples, &[], &grid, true, &tol).unwrap();
        assert!(r.failed());
        let r = check_order_axioms(&f, &samples, &[], &grid, false, &tol).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn recovers_weights_from_samples() {
        let (f, grid, tol) = setup(vec![0.7, 0.3], 1.0);
        let data = sample_comparisons(&f, &grid, 40, 3, &tol).unwrap();
        assert!(data.iter().any(|c| c.result == Comparison::Indifferent));
        let fit = fit_linear_order(&data, 2, &tol).unwrap();
        assert!(fit.feasible());
        assert_eq!(fit.unique, Some(true));
        assert!((fit.lambda[0] - 0.7).abs() < 1e-6, "{:?}", fit.lambda);
        assert_eq!(fit.agreement, 1.0);
    }

    #[test]
    fn zero_indifferences_give_uniform_weights() {
        let tol = Tolerances::default();
        let data = vec![LabeledComparison { x: vec![0.2, 0.2], y: vec![0.2, 0.2], result: Comparison::Indifferent }];
        let fit = fit_linear_order(&data, 2, &tol).unwrap();
        assert_eq!(fit.lambda, [0.5, 0.5]);
        assert_eq!(fit.unique, Some(false));
    }

    #[test]
    fn cyclic_preferences_do_not_fit() {
        let tol = Tolerances::default();
        let p = |x: [f64; 2], y: [f64; 2]| LabeledComparison { x: x.to_vec(), y: y.to_vec(), result: Comparison::Prefers };
        let data = vec![p([1.0, 0.0], [0.0, 1.0]), p([0.0, 1.0], [1.0, 0.0])];
        assert!(!fit_linear_order(&data, 2, &tol).unwrap().feasible());
    }
}
