//! Social choice functions.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::domain::{Alternative, TypeGrid, TypeProfile};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// `argmax_a Σ λ_i t_i^a − κ(a)` with a fixed tie-break order.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMaximizer {
    lambda: Vec<f64>,
    kappa: Vec<f64>,
    tiebreak: Vec<Alternative>,
}

impl AffineMaximizer {
    pub fn new(lambda: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::invalid("λ needs one weight per agent"));
        }
        if lambda.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::invalid("λ must be finite and nonnegative"));
        }
        if lambda.iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid("λ must not be identically zero"));
        }
        if kappa.len() < 2 || kappa.iter().any(|k| !k.is_finite()) {
            return Err(Error::invalid("κ needs a finite offset for each of at least two alternatives"));
        }
        let tiebreak = (0..kappa.len()).collect();
        Ok(AffineMaximizer { lambda, kappa, tiebreak })
    }

    pub fn weighted_welfare(lambda: Vec<f64>, alternatives: usize) -> Result<Self> {
        Self::new(lambda, alloc::vec![0.0; alternatives])
    }

    pub fn efficient(agents: usize, alternatives: usize) -> Result<Self> {
        Self::weighted_welfare(alloc::vec![1.0; agents], alternatives)
    }

    /// Replaces the lexicographic tie-break with `order` (earlier wins).
    pub fn with_tiebreak(mut self, order: Vec<Alternative>) -> Result<Self> {
        let mut seen = alloc::vec![false; self.kappa.len()];
        if order.len() != seen.len() || order.iter().any(|&a| a >= seen.len() || core::mem::replace(&mut seen[a], true)) {
            return Err(Error::invalid("tie-break order must list every alternative once"));
        }
        self.tiebreak = order;
        Ok(self)
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn tiebreak(&self) -> &[Alternative] {
        &self.tiebreak
    }

    pub fn agents(&self) -> usize {
        self.lambda.len()
    }

    pub fn alternatives(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_weighted_welfare(&self) -> bool {
        self.kappa.iter().all(|&k| k == 0.0)
    }

    pub fn score(&self, t: &TypeProfile, a: Alternative) -> f64 {
        (0..t.agents()).map(|i| self.lambda[i] * t.get(i, a)).sum::<f64>() - self.kappa[a]
    }

    pub fn scores(&self, t: &TypeProfile) -> Vec<f64> {
        (0..self.alternatives()).map(|a| self.score(t, a)).collect()
    }

    pub fn choose(&self, t: &TypeProfile, tie: f64) -> Alternative {
        argmax_with_tiebreak(&self.scores(t), &self.tiebreak, tie)
    }

    /// Every alternative within `tie` of the best score.
    pub fn argmax_set(&self, t: &TypeProfile, tie: f64) -> Vec<Alternative> {
        let s = self.scores(t);
        let best = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..s.len()).filter(|&a| s[a] >= best - tie).collect()
    }
}

/// First alternative in `order` whose score is within `tie` of the maximum.
pub fn argmax_with_tiebreak(scores: &[f64], order: &[Alternative], tie: f64) -> Alternative {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    *order
        .iter()
        .find(|&&a| scores[a] >= best - tie)
        .expect("nonempty score vector")
}

/// Affine-maximizer choice for raw parameters.
pub fn eval_affine(
    lambda: &[f64],
    kappa: &[f64],
    tiebreak: &[Alternative],
    t: &TypeProfile,
    tie: f64,
) -> Alternative {
    let scores: Vec<f64> = (0..kappa.len())
        .map(|a| (0..t.agents()).map(|i| lambda[i] * t.get(i, a)).sum::<f64>() - kappa[a])
        .collect();
    argmax_with_tiebreak(&scores, tiebreak, tie)
}

/// A mechanism given by its choice at every profile of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TableMechanism {
    grid: TypeGrid,
    choices: Vec<Alternative>,
}

impl TableMechanism {
    pub fn new(grid: TypeGrid, choices: Vec<Alternative>) -> Result<Self> {
        if choices.len() != grid.profile_count() {
            return Err(Error::Dimension(format!(
                "table has {} entries for {} grid profiles",
                choices.len(),
                grid.profile_count()
            )));
        }
        if let Some(bad) = choices.iter().find(|&&a| a >= grid.alternatives()) {
            return Err(Error::invalid(format!("table entry {bad} is not an alternative")));
        }
        Ok(TableMechanism { grid, choices })
    }

    /// Tabulates `f` on every profile of `grid`.
    pub fn tabulate(f: &Mechanism, grid: &TypeGrid, tol: &Tolerances) -> Result<Self> {
        Ok(TableMechanism {
            grid: grid.clone(),
            choices: f.tabulate(grid, tol)?,
        })
    }

    pub fn grid(&self) -> &TypeGrid {
        &self.grid
    }

    pub fn choices(&self) -> &[Alternative] {
        &self.choices
    }

    pub fn choices_mut(&mut self) -> &mut [Alternative] {
        &mut self.choices
    }

    pub fn choice(&self, profile: usize) -> Alternative {
        self.choices[profile]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Mechanism {
    Affine(AffineMaximizer),
    /// The two-agent, three-alternative mechanism on `(0,1)` that is
    /// implementable but not an affine maximizer.
    Example1,
    Table(TableMechanism),
    /// `f^δ(t) = f(t + 1_δ)`.
    Shifted { base: Box<Mechanism>, delta: Vec<f64> },
    Constant { alternatives: usize, choice: Alternative },
}

impl Mechanism {
    pub fn shifted(base: Mechanism, delta: Vec<f64>) -> Result<Self> {
        if delta.len() != base.alternatives() {
            return Err(Error::Dimension(format!(
                "shift has {} entries for {} alternatives",
                delta.len(),
                base.alternatives()
            )));
        }
        Ok(Mechanism::Shifted { base: Box::new(base), delta })
    }

    pub fn constant(alternatives: usize, choice: Alternative) -> Result<Self> {
        if choice >= alternatives {
            return Err(Error::invalid("constant choice is not an alternative"));
        }
        Ok(Mechanism::Constant { alternatives, choice })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Mechanism::Affine(am) if am.is_weighted_welfare() => "weighted-welfare",
            Mechanism::Affine(_) => "affine",
            Mechanism::Example1 => "example1",
            Mechanism::Table(_) => "table",
            Mechanism::Shifted { .. } => "shifted",
            Mechanism::Constant { .. } => "constant",
        }
    }

    pub fn alternatives(&self) -> usize {
        match self {
            Mechanism::Affine(am) => am.alternatives(),
            Mechanism::Example1 => 3,
            Mechanism::Table(t) => t.grid.alternatives(),
            Mechanism::Shifted { base, .. } => base.alternatives(),
            Mechanism::Constant { alternatives, .. } => *alternatives,
        }
    }

    /// Number of agents if the mechanism fixes it.
    pub fn agents(&self) -> Option<usize> {
        match self {
            Mechanism::Affine(am) => Some(am.agents()),
            Mechanism::Example1 => Some(2),
            Mechanism::Table(t) => Some(t.grid.agents()),
            Mechanism::Shifted { base, .. } => base.agents(),
            Mechanism::Constant { .. } => None,
        }
    }

    /// The grid a tabulated mechanism is defined on.
    pub fn grid(&self) -> Option<&TypeGrid> {
        match self {
            Mechanism::Table(t) => Some(&t.grid),
            Mechanism::Shifted { base, .. } => base.grid(),
            _ => None,
        }
    }

    pub fn evaluate(&self, t: &TypeProfile, tol: &Tolerances) -> Result<Alternative> {
        match self {
            Mechanism::Affine(am) => {
                t.check_shape(am.agents(), am.alternatives())?;
                if t.values().iter().any(|v| !v.is_finite()) {
                    return Err(Error::domain("non-finite valuation"));
                }
                Ok(am.choose(t, tol.tie))
            }
            Mechanism::Example1 => eval_example1(t, tol),
            Mechanism::Table(table) => {
                let idx = table
                    .grid
                    .profile_index(t)
                    .ok_or_else(|| Error::domain("profile is not on the table's grid"))?;
                Ok(table.choices[idx])
            }
            Mechanism::Shifted { base, delta } => {
                if t.alternatives() != delta.len() {
                    return Err(Error::Dimension("shift and profile disagree on alternatives".into()));
                }
                base.evaluate(&t.shifted(delta), tol)
            }
            Mechanism::Constant { alternatives, choice } => {
                if t.alternatives() != *alternatives {
                    return Err(Error::Dimension("profile has the wrong number of alternatives".into()));
                }
                Ok(*choice)
            }
        }
    }

    /// Choices at every grid profile, in grid order.
    pub fn tabulate(&self, grid: &TypeGrid, tol: &Tolerances) -> Result<Vec<Alternative>> {
        if let Mechanism::Table(table) = self {
            if table.grid == *grid {
                return Ok(table.choices.clone());
            }
        }
        let mut out = Vec::with_capacity(grid.profile_count());
        let mut t = TypeProfile::zeros(grid.agents(), grid.alternatives());
        for idx in 0..grid.profile_count() {
            grid.write_profile(idx, &mut t);
            out.push(self.evaluate(&t, tol)?);
        }
        Ok(out)
    }
}

fn check_example1_domain(t: &TypeProfile) -> Result<()> {
    t.check_shape(2, 3)?;
    if let Some(v) = t.values().iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
        return Err(Error::domain(format!("value {v} outside (0,1)")));
    }
    Ok(())
}

/// Membership in the region where Example 1 maximizes its shifted welfare.
/// Points within `τ_num` of either boundary count as outside.
pub fn example1_in_region(t: &TypeProfile, tol: &Tolerances) -> bool {
    t.get(0, 2) < t.get(0, 1) + 0.5 - tol.numeric || t.get(1, 2) > t.get(1, 1) - 0.5 + tol.numeric
}

pub fn eval_example1(t: &TypeProfile, tol: &Tolerances) -> Result<Alternative> {
    check_example1_domain(t)?;
    if !example1_in_region(t, tol) {
        return Ok(2);
    }
    let scores = [
        -1.5 + t.get(0, 0) + t.get(1, 0),
        t.get(0, 1) + t.get(1, 1),
        t.get(0, 2) + t.get(1, 2),
    ];
    Ok(argmax_with_tiebreak(&scores, &[0, 1, 2], tol.tie))
}
