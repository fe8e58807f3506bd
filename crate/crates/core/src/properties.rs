//! Structural property checkers on a grid: PAD, non-imposition, neutrality,
//! scf-neutrality, anonymity, binary independence and the lowering lemma.
//!
//! Membership mismatches are discrete, so their counterexamples carry margin 1.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::choice::{choice_set, GridChoices};
use crate::domain::{Alternative, Permutation, TypeGrid, TypeProfile};
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::random::{rng, sample_indices};
use crate::report::{CheckReport, Counterexample, Verdict};
use crate::tolerance::Tolerances;

/// Which grid profiles a checker visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleOptions {
    /// Every profile is visited when the grid has at most this many.
    pub max_profiles: usize,
    pub seed: u64,
    /// Partner profiles per column pair for binary independence.
    pub max_partners: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            max_profiles: 20_000,
            seed: 0,
            max_partners: 64,
        }
    }
}

impl SampleOptions {
    pub fn profiles(&self, grid: &TypeGrid) -> Vec<usize> {
        sample_indices(self.seed, grid.profile_count(), self.max_profiles)
    }
}

fn discrete(profiles: Vec<usize>, agent: Option<usize>, explanation: String) -> Counterexample {
    Counterexample { profiles, agent, explanation, margin: 1.0 }
}

fn require_three(m: usize) -> Result<()> {
    if m < 3 {
        return Err(Error::invalid("this check needs at least three alternatives"));
    }
    Ok(())
}

/// Coordinate indices `digits[i][a]` of a grid profile.
fn digits(grid: &TypeGrid, idx: usize) -> Vec<Vec<usize>> {
    (0..grid.agents())
        .map(|i| {
            let mut d = vec![0; grid.alternatives()];
            grid.type_digits(i, grid.agent_type(idx, i), &mut d);
            d
        })
        .collect()
}

fn index_of_digits(grid: &TypeGrid, digits: &[Vec<usize>]) -> usize {
    digits
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let r = grid.resolution(i);
            d.iter().fold(0, |acc, &x| acc * r + x) * grid.stride(i)
        })
        .sum()
}

/// Steps a mixed-radix odometer; false once it wraps around.
fn advance(cursor: &mut [usize], lists: &[&Vec<usize>]) -> bool {
    for i in (0..cursor.len()).rev() {
        cursor[i] += 1;
        if cursor[i] < lists[i].len() {
            return true;
        }
        cursor[i] = 0;
    }
    false
}

/// Positive association of differences: raising the chosen alternative's
/// values strictly more than every other alternative's keeps it chosen.
pub fn check_pad(f: &Mechanism, grid: &TypeGrid, tol: &Tolerances) -> Result<CheckReport> {
    let choices = f.tabulate(grid, tol)?;
    Ok(pad_from_choices(grid, &choices, tol))
}

pub fn pad_from_choices(grid: &TypeGrid, choices: &[Alternative], tol: &Tolerances) -> CheckReport {
    let n = grid.agents();
    let m = grid.alternatives();
    let types: Vec<Vec<Vec<f64>>> = (0..n).map(|i| grid.grid_points(i)).collect();
    // dominators[i][a][k]: own types s with s^a − t^a > s^b − t^b + τ for all b ≠ a, t = type k
    let dominators: Vec<Vec<Vec<Vec<usize>>>> = (0..n)
        .map(|i| {
            (0..m)
                .map(|a| {
                    types[i]
                        .iter()
                        .map(|t| {
                            (0..types[i].len())
                                .filter(|&s| {
                                    let s = &types[i][s];
                                    let da = s[a] - t[a];
                                    (0..m).all(|b| b == a || da > s[b] - t[b] + tol.numeric)
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut report = CheckReport::new("pad");
    report.stats.profiles_examined = grid.profile_count();
    let mut cursor = vec![0usize; n];
    for (idx, &a) in choices.iter().enumerate() {
        let lists: Vec<&Vec<usize>> = (0..n).map(|i| &dominators[i][a][grid.agent_type(idx, i)]).collect();
        if lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        cursor.iter_mut().for_each(|c| *c = 0);
        loop {
            let sidx: usize = (0..n).map(|i| lists[i][cursor[i]] * grid.stride(i)).sum();
            report.stats.comparisons += 1;
            if choices[sidx] != a {
                let margin = (0..n)
                    .flat_map(|i| {
                        let t = &types[i][grid.agent_type(idx, i)];
                        let s = &types[i][lists[i][cursor[i]]];
                        (0..m).filter(move |&b| b != a).map(move |b| (s[a] - t[a]) - (s[b] - t[b]))
                    })
                    .fold(f64::INFINITY, f64::min);
                report.violation(Counterexample {
                    profiles: vec![idx, sidx],
                    agent: None,
                    explanation: format!(
                        "f(t)={a} at profile {idx}, the profile {sidx} raises {a} relative to every other alternative but f={}",
                        choices[sidx]
                    ),
                    margin,
                });
                break;
            }
            if !advance(&mut cursor, &lists) {
                break;
            }
        }
    }
    report.finish(false)
}

/// Every alternative is chosen at some grid profile.
pub fn check_non_imposition(f: &Mechanism, grid: &TypeGrid, tol: &Tolerances) -> Result<CheckReport> {
    let choices = f.tabulate(grid, tol)?;
    let m = grid.alternatives();
    let mut first = vec![None; m];
    for (idx, &a) in choices.iter().enumerate() {
        first[a].get_or_insert(idx);
    }
    let mut report = CheckReport::new("non-imposition");
    report.stats.profiles_examined = choices.len();
    for (a, w) in first.iter().enumerate() {
        match w {
            Some(idx) => report.note(format!("alternative {a} first chosen at profile {idx}")),
            None => report.violation(discrete(vec![], None, format!("alternative {a} is never chosen on the grid"))),
        }
    }
    Ok(report.finish(false))
}

/// Choice sets commute with relabelings of alternatives.
pub fn check_neutral(f: &Mechanism, grid: &TypeGrid, tol: &Tolerances, opts: &SampleOptions) -> Result<CheckReport> {
    require_three(grid.alternatives())?;
    let m = grid.alternatives();
    let perms = Permutation::generating_set(m);
    let mut cs = GridChoices::new(f, grid, tol);
    let mut report = CheckReport::new("neutrality");
    let samples = opts.profiles(grid);
    report.stats.profiles_examined = samples.len();
    for idx in samples {
        let c = cs.get(idx)?;
        let t = grid.profile(idx);
        for rho in &perms {
            let sidx = grid
                .profile_index(&t.permute_alternatives(rho))
                .ok_or_else(|| Error::invalid("grid is not closed under relabeling"))?;
            let d = cs.get(sidx)?;
            report.stats.comparisons += 1;
            let mut bad = None;
            for a in 0..m {
                let b = rho.image(a);
                if !(c.conclusive(a) && d.conclusive(b)) {
                    report.stats.inconclusive += 1;
                    continue;
                }
                if c.contains(a) != d.contains(b) {
                    bad = Some((a, b));
                }
            }
            if let Some((a, b)) = bad {
                report.violation(discrete(
                    vec![idx, sidx],
                    None,
                    format!(
                        "relabeling {:?}: {a} {} C(t) but {b} {} C(ρt)",
                        rho.images(),
                        if c.contains(a) { "∈" } else { "∉" },
                        if d.contains(b) { "∈" } else { "∉" }
                    ),
                ));
            }
        }
    }
    if report.stats.inconclusive > 0 {
        report.note(format!("{} membership entries inconclusive and excluded", report.stats.inconclusive));
    }
    if report.stats.comparisons == 0 {
        report.verdict = Verdict::Inconclusive;
    }
    Ok(report.finish(false))
}

/// Pointwise equivariance `f(ρt) = ρ(f(t))` away from ties.
pub fn check_scf_neutral(f: &Mechanism, grid: &TypeGrid, tol: &Tolerances, opts: &SampleOptions) -> Result<CheckReport> {
    require_three(grid.alternatives())?;
    let choices = f.tabulate(grid, tol)?;
    let perms = Permutation::generating_set(grid.alternatives());
    let mut cs = GridChoices::new(f, grid, tol);
    let mut report = CheckReport::new("scf-neutrality");
    let samples = opts.profiles(grid);
    report.stats.profiles_examined = samples.len();
    for idx in samples {
        if cs.get(idx)?.len() > 1 {
            report.stats.skipped += 1;
            continue;
        }
        let t = grid.profile(idx);
        for rho in &perms {
            let sidx = grid
                .profile_index(&t.permute_alternatives(rho))
                .ok_or_else(|| Error::invalid("grid is not closed under relabeling"))?;
            if sidx == idx {
                continue;
            }
            report.stats.comparisons += 1;
            if choices[sidx] != rho.image(choices[idx]) {
                report.violation(discrete(
                    vec![idx, sidx],
                    None,
                    format!(
                        "relabeling {:?}: f(t)={} but f(ρt)={}",
                        rho.images(),
                        choices[idx],
                        choices[sidx]
                    ),
                ));
            }
        }
    }
    if report.stats.skipped > 0 {
        report.note(format!("{} tie profiles excluded", report.stats.skipped));
    }
    Ok(report.finish(false))
}

/// Invariance under relabeling agents; tie profiles compare choice sets.
pub fn check_anonymous(f: &Mechanism, grid: &TypeGrid, tol: &Tolerances, opts: &SampleOptions) -> Result<CheckReport> {
    if !grid.agents_identical() {
        return Err(Error::BoxMismatch("anonymity needs identical intervals and resolutions".into()));
    }
    let choices = f.tabulate(grid, tol)?;
    let perms = Permutation::generating_set(grid.agents());
    let mut cs = GridChoices::new(f, grid, tol);
    let mut report = CheckReport::new("anonymity");
    let samples = opts.profiles(grid);
    report.stats.profiles_examined = samples.len();
    for idx in samples {
        let t = grid.profile(idx);
        for sigma in &perms {
            let sidx = grid
                .profile_index(&t.permute_agents(sigma))
                .ok_or_else(|| Error::invalid("grid is not closed under agent relabeling"))?;
            if sidx == idx {
                continue;
            }
            report.stats.comparisons += 1;
            let c = cs.get(idx)?;
            if c.len() > 1 {
                let d = cs.get(sidx)?;
                let known = !(c.unknown | d.unknown);
                if (c.members ^ d.members) & known != 0 {
                    report.violation(discrete(
                        vec![idx, sidx],
                        None,
                        format!("agent relabeling {:?} changes the choice set at a tie", sigma.images()),
                    ));
                }
            } else if choices[idx] != choices[sidx] {
                report.violation(discrete(
                    vec![idx, sidx],
                    None,
                    format!(
                        "agent relabeling {:?}: f(t)={} but f(σt)={}",
                        sigma.images(),
                        choices[idx],
                        choices[sidx]
                    ),
                ));
            }
        }
    }
    Ok(report.finish(false))
}

/// Binary independence of choice-set membership: profiles agreeing on
/// columns `a` and `b` must not reverse their relative standing.
pub fn check_binary_independence(
    f: &Mechanism,
    grid: &TypeGrid,
    tol: &Tolerances,
    opts: &SampleOptions,
) -> Result<CheckReport> {
    let m = grid.alternatives();
    require_three(m)?;
    let n = grid.agents();
    let mut cs = GridChoices::new(f, grid, tol);
    let mut report = CheckReport::new("binary-independence");
    let samples = opts.profiles(grid);
    report.stats.profiles_examined = samples.len();
    let free_cells = n * (m - 2);
    let combos: Option<usize> = (0..n)
        .map(|i| grid.resolution(i).checked_pow((m - 2) as u32))
        .try_fold(1usize, |acc, x| acc.checked_mul(x?));
    let enumerate = combos.is_some_and(|c| c <= opts.max_partners);
    let mut rng = rng(opts.seed ^ 0x6269_6e61_7279);
    let mut partner = vec![0usize; free_cells];
    for idx in samples {
        let c = cs.get(idx)?;
        let base = digits(grid, idx);
        for a in 0..m {
            for b in a + 1..m {
                let others: Vec<usize> = (0..m).filter(|&x| x != a && x != b).collect();
                let count = if enumerate { combos.unwrap() } else { opts.max_partners };
                for q in 0..count {
                    // fill the free cells either from q's mixed-radix digits or at random
                    let mut rest = q;
                    for (cell, slot) in partner.iter_mut().enumerate() {
                        let r = grid.resolution(cell / (m - 2));
                        *slot = if enumerate {
                            let d = rest % r;
                            rest /= r;
                            d
                        } else {
                            rng.gen_range(0..r)
                        };
                    }
                    let mut d = base.clone();
                    for i in 0..n {
                        for (k, &x) in others.iter().enumerate() {
                            d[i][x] = partner[i * (m - 2) + k];
                        }
                    }
                    let sidx = index_of_digits(grid, &d);
                    if sidx == idx {
                        continue;
                    }
                    let s = cs.get(sidx)?;
                    for (x, y) in [(a, b), (b, a)] {
                        if !(c.conclusive(x) && c.conclusive(y) && s.conclusive(x) && s.conclusive(y)) {
                            report.stats.inconclusive += 1;
                            continue;
                        }
                        report.stats.comparisons += 1;
                        let both = c.contains(x) && c.contains(y);
                        let only_x = c.contains(x) && !c.contains(y);
                        if both && s.contains(x) != s.contains(y) {
                            report.violation(discrete(
                                vec![idx, sidx],
                                None,
                                format!("{x},{y} ∈ C(t) but exactly one of them is in C(s)"),
                            ));
                        } else if only_x && s.contains(y) {
                            report.violation(discrete(
                                vec![idx, sidx],
                                None,
                                format!("{x} ∈ C(t), {y} ∉ C(t) but {y} ∈ C(s)"),
                            ));
                        }
                    }
                }
            }
        }
    }
    if report.stats.inconclusive > 0 {
        report.note(format!("{} pair comparisons skipped on inconclusive entries", report.stats.inconclusive));
    }
    Ok(report.finish(false))
}

/// Lowering the sole chosen column a little keeps it in the choice set.
/// Never fails: the lemma's ε is existential, so a miss is inconclusive.
pub fn check_ch1(f: &Mechanism, grid: &TypeGrid, tol: &Tolerances, opts: &SampleOptions) -> Result<CheckReport> {
    let mut cs = GridChoices::new(f, grid, tol);
    let mut report = CheckReport::new("ch1");
    let samples = opts.profiles(grid);
    report.stats.profiles_examined = samples.len();
    let mut first_miss = None;
    for idx in samples {
        let c = cs.get(idx)?;
        if !c.is_singleton() {
            report.stats.skipped += 1;
            continue;
        }
        let a = c.first().unwrap();
        let t = grid.profile(idx);
        let mut found = false;
        for div in [2.0, 4.0, 8.0] {
            let mut s: TypeProfile = t.clone();
            for i in 0..grid.agents() {
                s.set(i, a, t.get(i, a) - grid.step(i) / div);
            }
            report.stats.comparisons += 1;
            match choice_set(f, &s, tol) {
                Ok(r) if r.contains(a) => {
                    found = true;
                    break;
                }
                Ok(_) | Err(Error::DomainViolation(_)) => {}
                Err(e) => return Err(e),
            }
        }
        if !found {
            report.stats.inconclusive += 1;
            first_miss.get_or_insert(idx);
        }
    }
    if let Some(idx) = first_miss {
        report.note(format!(
            "{} singleton profiles found no working ε in {{h/2, h/4, h/8}}, first at profile {idx}",
            report.stats.inconclusive
        ));
    }
    Ok(report.finish(true))
}
