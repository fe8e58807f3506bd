//! Choice sets: the alternatives that stay chosen under every small uniform
//! boost of their own column.
//!
//! Closed-form mechanisms are probed with the ladder `{ε, ε/10, ε/100}` and
//! membership needs every evaluable rung to agree. Tabulated mechanisms are
//! probed with a boost of one grid step per agent, since any smaller boost
//! leaves the grid.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::Serialize;

use crate::domain::{Alternative, TypeGrid, TypeProfile};
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    In,
    Out,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChoiceSetResult {
    /// Verdict for each alternative.
    pub verdicts: Vec<Membership>,
    /// Boost magnitudes tried: the ladder, or one grid step per agent.
    pub epsilons: Vec<f64>,
}

impl ChoiceSetResult {
    pub fn members(&self) -> Vec<Alternative> {
        self.with(Membership::In)
    }

    pub fn inconclusive(&self) -> Vec<Alternative> {
        self.with(Membership::Inconclusive)
    }

    fn with(&self, v: Membership) -> Vec<Alternative> {
        (0..self.verdicts.len()).filter(|&a| self.verdicts[a] == v).collect()
    }

    pub fn contains(&self, a: Alternative) -> bool {
        self.verdicts[a] == Membership::In
    }

    pub fn mask(&self) -> ChoiceMask {
        let mut m = ChoiceMask::default();
        for (a, v) in self.verdicts.iter().enumerate() {
            match v {
                Membership::In => m.members |= 1 << a,
                Membership::Inconclusive => m.unknown |= 1 << a,
                Membership::Out => {}
            }
        }
        m
    }
}

/// Bit-set form of a choice set (alternatives below 64).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ChoiceMask {
    pub members: u64,
    pub unknown: u64,
}

impl ChoiceMask {
    pub fn verdict(&self, a: Alternative) -> Membership {
        if self.unknown >> a & 1 == 1 {
            Membership::Inconclusive
        } else if self.members >> a & 1 == 1 {
            Membership::In
        } else {
            Membership::Out
        }
    }

    pub fn contains(&self, a: Alternative) -> bool {
        self.members >> a & 1 == 1
    }

    pub fn conclusive(&self, a: Alternative) -> bool {
        self.unknown >> a & 1 == 0
    }

    pub fn len(&self) -> u32 {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn is_singleton(&self) -> bool {
        self.len() == 1
    }

    pub fn first(&self) -> Option<Alternative> {
        (self.members != 0).then(|| self.members.trailing_zeros() as usize)
    }
}

pub fn choice_set(f: &Mechanism, t: &TypeProfile, tol: &Tolerances) -> Result<ChoiceSetResult> {
    let m = t.alternatives();
    if m > 64 {
        return Err(Error::invalid("choice sets support at most 64 alternatives"));
    }
    f.evaluate(t, tol)?;
    let mut verdicts = Vec::with_capacity(m);
    let mut boosted = t.clone();
    if let Some(grid) = f.grid() {
        let steps = grid.steps().to_vec();
        for a in 0..m {
            for (i, h) in steps.iter().enumerate() {
                boosted.set(i, a, t.get(i, a) + h);
            }
            verdicts.push(match f.evaluate(&boosted, tol) {
                Ok(x) if x == a => Membership::In,
                Ok(_) => Membership::Out,
                Err(Error::DomainViolation(_)) => Membership::Inconclusive,
                Err(e) => return Err(e),
            });
            boosted.set_column(a, &t.column(a));
        }
        return Ok(ChoiceSetResult { verdicts, epsilons: steps });
    }
    let ladder = tol.ladder();
    for a in 0..m {
        let mut evaluated = 0;
        let mut unanimous = true;
        for eps in ladder {
            boosted.boost_column(a, eps);
            match f.evaluate(&boosted, tol) {
                Ok(x) => {
                    evaluated += 1;
                    unanimous &= x == a;
                }
                Err(Error::DomainViolation(_)) => {}
                Err(e) => return Err(e),
            }
            boosted.set_column(a, &t.column(a));
        }
        verdicts.push(match (evaluated, unanimous) {
            (0, _) => Membership::Inconclusive,
            (_, true) => Membership::In,
            (_, false) => Membership::Out,
        });
    }
    Ok(ChoiceSetResult { verdicts, epsilons: ladder.to_vec() })
}

/// Grids up to this many profiles cache choice sets in a flat vector.
const DENSE_CACHE_LIMIT: usize = 1 << 22;

enum Cache {
    Dense(Vec<Option<ChoiceMask>>),
    Sparse(BTreeMap<usize, ChoiceMask>),
}

/// Lazily computed choice sets at grid profiles.
pub struct GridChoices<'a> {
    f: &'a Mechanism,
    grid: &'a TypeGrid,
    tol: Tolerances,
    cache: Cache,
    computed: usize,
    scratch: TypeProfile,
}

impl<'a> GridChoices<'a> {
    pub fn new(f: &'a Mechanism, grid: &'a TypeGrid, tol: &Tolerances) -> Self {
        GridChoices {
            f,
            grid,
            tol: *tol,
            cache: if grid.profile_count() <= DENSE_CACHE_LIMIT {
                Cache::Dense(alloc::vec![None; grid.profile_count()])
            } else {
                Cache::Sparse(BTreeMap::new())
            },
            computed: 0,
            scratch: TypeProfile::zeros(grid.agents(), grid.alternatives()),
        }
    }

    pub fn grid(&self) -> &TypeGrid {
        self.grid
    }

    pub fn get(&mut self, idx: usize) -> Result<ChoiceMask> {
        let hit = match &self.cache {
            Cache::Dense(v) => v[idx],
            Cache::Sparse(map) => map.get(&idx).copied(),
        };
        if let Some(m) = hit {
            return Ok(m);
        }
        self.grid.write_profile(idx, &mut self.scratch);
        let m = choice_set(self.f, &self.scratch, &self.tol)?.mask();
        match &mut self.cache {
            Cache::Dense(v) => v[idx] = Some(m),
            Cache::Sparse(map) => {
                map.insert(idx, m);
            }
        }
        self.computed += 1;
        Ok(m)
    }

    pub fn computed(&self) -> usize {
        self.computed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Interval;
    use crate::mechanism::{AffineMaximizer, TableMechanism};
    use alloc::vec;

    fn ww(lambda: Vec<f64>) -> Mechanism {
        Mechanism::Affine(AffineMaximizer::weighted_welfare(lambda, 3).unwrap())
    }

    #[test]
    fn strict_winner_is_sole_member() {
        let t = TypeProfile::new(vec![vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap();
        let cs = choice_set(&ww(vec![1.0, 1.0]), &t, &Tolerances::default()).unwrap();
        assert_eq!(cs.members(), [0]);
        assert!(cs.inconclusive().is_empty());
    }

    #[test]
    fn equal_columns_share_membership() {
        let tol = Tolerances::default();
        let f = ww(vec![1.0, 2.0]);
        let t = TypeProfile::new(vec![vec![0.4, 0.4, 0.1], vec![0.2, 0.2, 0.9]]).unwrap();
        let cs = choice_set(&f, &t, &tol).unwrap();
        assert_eq!(cs.contains(0), cs.contains(1));
        let t = TypeProfile::new(vec![vec![0.4, 0.4, 0.1], vec![0.6, 0.6, 0.2]]).unwrap();
        let cs = choice_set(&f, &t, &tol).unwrap();
        assert_eq!(cs.members(), [0, 1]);
    }

    #[test]
    fn chosen_alternative_is_member_on_grid() {
        let grid = TypeGrid::uniform(2, Interval::new(0.0, 1.0).unwrap(), 3, 3).unwrap();
        let tol = Tolerances::for_grid(&grid);
        let f = ww(vec![1.0, 1.0]);
        for (_, t) in grid.profiles() {
            let cs = choice_set(&f, &t, &tol).unwrap();
            assert!(cs.contains(f.evaluate(&t, &tol).unwrap()));
        }
    }

    #[test]
    fn table_boost_leaving_grid_is_inconclusive() {
        let grid = TypeGrid::uniform(1, Interval::new(0.0, 1.0).unwrap(), 2, 2).unwrap();
        let tol = Tolerances::for_grid(&grid);
        let f = Mechanism::Affine(AffineMaximizer::efficient(1, 2).unwrap());
        let table = Mechanism::Table(TableMechanism::tabulate(&f, &grid, &tol).unwrap());
        let top = grid.profile(grid.profile_count() - 1);
        let cs = choice_set(&table, &top, &tol).unwrap();
        assert_eq!(cs.inconclusive(), [0, 1]);
        let low = grid.profile(0);
        let cs = choice_set(&table, &low, &tol).unwrap();
        assert_eq!(cs.members(), [0, 1]);
    }

    #[test]
    fn off_domain_profile_is_an_error() {
        let t = TypeProfile::new(vec![vec![1.5, 0.5, 0.5], vec![0.5, 0.5, 0.5]]).unwrap();
        assert!(matches!(
            choice_set(&Mechanism::Example1, &t, &Tolerances::default()),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn example1_boost_beyond_box_skips_rungs() {
        let tol = Tolerances::default();
        let t = TypeProfile::new(vec![vec![0.99995, 0.2, 0.1], vec![0.99995, 0.2, 0.1]]).unwrap();
        let cs = choice_set(&Mechanism::Example1, &t, &tol).unwrap();
        assert_eq!(cs.verdicts[0], Membership::In);
    }
}
