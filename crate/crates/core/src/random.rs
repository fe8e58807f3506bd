//! Seeded mechanism generators. Every generator draws from [`PRNG_NAME`]
//! seeded with [`rng`], so equal seeds give equal mechanisms.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Alternative, Permutation, TypeGrid};
use crate::error::{Error, Result};
use crate::mechanism::{AffineMaximizer, Mechanism, TableMechanism};
use crate::tolerance::Tolerances;

pub const PRNG_NAME: &str = "ChaCha8Rng";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub enum RandomKind {
    /// λ uniform on the simplex, κ(a) uniform on `[0, kappa_max]`.
    Affine {
        agents: usize,
        alternatives: usize,
        kappa_max: f64,
    },
    /// Tabulated base with `flip_count` profiles reassigned to wrong alternatives.
    PerturbedTable {
        base: Mechanism,
        grid: TypeGrid,
        flip_count: usize,
    },
    /// Like `PerturbedTable`, but every flip is applied to a whole orbit under
    /// agent and alternative permutations so the table stays anonymous and
    /// neutral.
    SymmetricPerturbedTable {
        base: Mechanism,
        grid: TypeGrid,
        flip_count: usize,
    },
}

#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub seed: u64,
    pub kind: RandomKind,
}

/// Uniform point of the probability simplex from sorted-uniform gaps.
pub fn simplex_point<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.gen::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(n);
    let mut prev = 0.0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(1.0 - prev);
    out
}

pub fn random_mechanism(spec: &RandomSpec, tol: &Tolerances) -> Result<Mechanism> {
    let mut rng = rng(spec.seed);
    match &spec.kind {
        RandomKind::Affine { agents, alternatives, kappa_max } => {
            if !(kappa_max.is_finite() && *kappa_max >= 0.0) {
                return Err(Error::invalid("κ_max must be finite and nonnegative"));
            }
            let mut lambda = simplex_point(&mut rng, *agents);
            if lambda.iter().sum::<f64>() <= 0.0 {
                lambda = alloc::vec![1.0 / *agents as f64; *agents];
            }
            let kappa = (0..*alternatives)
                .map(|_| if *kappa_max == 0.0 { 0.0 } else { rng.gen_range(0.0..=*kappa_max) })
                .collect();
            Ok(Mechanism::Affine(AffineMaximizer::new(lambda, kappa)?))
        }
        RandomKind::PerturbedTable { base, grid, flip_count } => {
            let mut table = TableMechanism::tabulate(base, grid, tol)?;
            let m = grid.alternatives();
            if *flip_count > grid.profile_count() {
                return Err(Error::invalid("more flips than grid profiles"));
            }
            let mut picks = index::sample(&mut rng, grid.profile_count(), *flip_count).into_vec();
            picks.sort_unstable();
            for idx in picks {
                let cur = table.choice(idx);
                let mut alt = rng.gen_range(0..m - 1);
                if alt >= cur {
                    alt += 1;
                }
                table.choices_mut()[idx] = alt;
            }
            Ok(Mechanism::Table(table))
        }
        RandomKind::SymmetricPerturbedTable { base, grid, flip_count } => {
            if !grid.agents_identical() {
                return Err(Error::BoxMismatch("symmetric perturbation needs identical agent grids".into()));
            }
            let mut table = TableMechanism::tabulate(base, grid, tol)?;
            let m = grid.alternatives();
            let agent_perms = Permutation::all(grid.agents());
            let alt_perms = Permutation::all(m);
            let mut flipped = 0;
            let mut attempts = 0;
            while flipped < *flip_count {
                attempts += 1;
                if attempts > 1000 * (*flip_count + 1) {
                    return Err(Error::invalid("could not find orbits to perturb"));
                }
                let idx = rng.gen_range(0..grid.profile_count());
                let cur = table.choice(idx);
                let mut alt = rng.gen_range(0..m - 1);
                if alt >= cur {
                    alt += 1;
                }
                if let Some(orbit) = orbit_assignment(grid, idx, alt, &agent_perms, &alt_perms) {
                    for (j, a) in orbit {
                        table.choices_mut()[j] = a;
                    }
                    flipped += 1;
                }
            }
            Ok(Mechanism::Table(table))
        }
    }
}

/// Assignment `ρσ(t) ↦ ρ(alt)` over the orbit of profile `idx`, or `None`
/// when the stabilizer makes it inconsistent.
fn orbit_assignment(
    grid: &TypeGrid,
    idx: usize,
    alt: Alternative,
    agent_perms: &[Permutation],
    alt_perms: &[Permutation],
) -> Option<BTreeMap<usize, Alternative>> {
    let t = grid.profile(idx);
    let mut out = BTreeMap::new();
    for sigma in agent_perms {
        let ts = t.permute_agents(sigma);
        for rho in alt_perms {
            let j = grid.profile_index(&ts.permute_alternatives(rho))?;
            let a = rho.image(alt);
            if let Some(prev) = out.insert(j, a) {
                if prev != a {
                    return None;
                }
            }
        }
    }
    Some(out)
}

/// Sorted sample of `k` distinct indices below `n`, or all of them when `k >= n`.
pub fn sample_indices(seed: u64, n: usize, k: usize) -> Vec<usize> {
    if k >= n {
        return (0..n).collect();
    }
    let mut v = index::sample(&mut rng(seed), n, k).into_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Interval;

    #[test]
    fn same_seed_same_mechanism() {
        let tol = Tolerances::default();
        let spec = RandomSpec {
            seed: 7,
            kind: RandomKind::Affine { agents: 3, alternatives: 4, kappa_max: 0.5 },
        };
        let a = random_mechanism(&spec, &tol).unwrap();
        let b = random_mechanism(&spec, &tol).unwrap();
        assert_eq!(a, b);
        let Mechanism::Affine(am) = a else { panic!() };
        assert!((am.lambda().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(am.kappa().iter().all(|k| (0.0..=0.5).contains(k)));
    }

    #[test]
    fn zero_kappa_max_is_weighted_welfare() {
        let spec = RandomSpec {
            seed: 3,
            kind: RandomKind::Affine { agents: 2, alternatives: 3, kappa_max: 0.0 },
        };
        let f = random_mechanism(&spec, &Tolerances::default()).unwrap();
        assert_eq!(f.kind(), "weighted-welfare");
    }

    #[test]
    fn perturbed_table_flips() {
        let tol = Tolerances::default();
        let grid = TypeGrid::uniform(2, Interval::new(0.0, 1.0).unwrap(), 3, 3).unwrap();
        let base = Mechanism::Affine(AffineMaximizer::efficient(2, 3).unwrap());
        let tab = base.tabulate(&grid, &tol).unwrap();
        let make = |flips| {
            random_mechanism(
                &RandomSpec {
                    seed: 11,
                    kind: RandomKind::PerturbedTable { base: base.clone(), grid: grid.clone(), flip_count: flips },
                },
                &tol,
            )
            .unwrap()
        };
        let Mechanism::Table(t0) = make(0) else { panic!() };
        assert_eq!(t0.choices(), &tab[..]);
        let Mechanism::Table(t3) = make(3) else { panic!() };
        let diff = t3.choices().iter().zip(&tab).filter(|(x, y)| x != y).count();
        assert_eq!(diff, 3);
        assert_eq!(make(3), make(3));
    }

    #[test]
    fn simplex_points_sum_to_one() {
        let mut r = rng(1);
        for n in 1..6 {
            let p = simplex_point(&mut r, n);
            assert_eq!(p.len(), n);
            assert!(p.iter().all(|x| *x >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
