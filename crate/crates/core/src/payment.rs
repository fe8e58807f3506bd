//! Payment rules. Every rule is evaluated together with the outcome the
//! mechanism selects at the same profile.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{Alternative, TypeGrid, TypeProfile};
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq)]
pub enum PaymentRule {
    /// `p_i = (1/λ_i)[Σ_{j≠i} λ_j t_j^o − κ(o)] − h_i`, and `p_i = 0` when `λ_i = 0`.
    WeightedVcg {
        lambda: Vec<f64>,
        kappa: Vec<f64>,
        offsets: Vec<f64>,
    },
    Example1,
    /// Per-agent payment at every grid profile.
    Table { grid: TypeGrid, payments: Vec<Vec<f64>> },
    /// `p^δ_i(t) = p_i(t + 1_δ) + δ(f^δ(t))`.
    Shifted { base: Box<PaymentRule>, delta: Vec<f64> },
    Zero { agents: usize },
}

impl PaymentRule {
    pub fn weighted_vcg(lambda: Vec<f64>, alternatives: usize) -> Self {
        let n = lambda.len();
        PaymentRule::WeightedVcg {
            lambda,
            kappa: vec![0.0; alternatives],
            offsets: vec![0.0; n],
        }
    }

    /// VCG-style payments for an affine maximizer, `h ≡ 0`.
    pub fn for_affine(am: &crate::AffineMaximizer) -> Self {
        PaymentRule::WeightedVcg {
            lambda: am.lambda().to_vec(),
            kappa: am.kappa().to_vec(),
            offsets: vec![0.0; am.agents()],
        }
    }

    pub fn with_offsets(self, h: Vec<f64>) -> Result<Self> {
        match self {
            PaymentRule::WeightedVcg { lambda, kappa, .. } if h.len() == lambda.len() => {
                Ok(PaymentRule::WeightedVcg { lambda, kappa, offsets: h })
            }
            PaymentRule::WeightedVcg { .. } => Err(Error::Dimension("one offset per agent".into())),
            _ => Err(Error::invalid("offsets apply to weighted VCG payments only")),
        }
    }

    pub fn shifted(base: PaymentRule, delta: Vec<f64>) -> Self {
        PaymentRule::Shifted { base: Box::new(base), delta }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PaymentRule::WeightedVcg { .. } => "weighted-vcg",
            PaymentRule::Example1 => "example1",
            PaymentRule::Table { .. } => "table",
            PaymentRule::Shifted { .. } => "shifted",
            PaymentRule::Zero { .. } => "zero",
        }
    }

    /// Payments at `t` given that the mechanism chose `outcome` there.
    pub fn evaluate(&self, t: &TypeProfile, outcome: Alternative) -> Result<Vec<f64>> {
        match self {
            PaymentRule::WeightedVcg { lambda, kappa, offsets } => {
                t.check_shape(lambda.len(), kappa.len())?;
                Ok(weighted_vcg_payments(lambda, kappa, offsets, t, outcome))
            }
            PaymentRule::Example1 => example1_payments(t, outcome),
            PaymentRule::Table { grid, payments } => {
                let idx = grid
                    .profile_index(t)
                    .ok_or_else(|| Error::domain("profile is not on the payment table's grid"))?;
                Ok(payments.iter().map(|p| p[idx]).collect())
            }
            PaymentRule::Shifted { base, delta } => {
                let mut p = base.evaluate(&t.shifted(delta), outcome)?;
                for x in &mut p {
                    *x += delta[outcome];
                }
                Ok(p)
            }
            PaymentRule::Zero { agents } => Ok(vec![0.0; *agents]),
        }
    }

    /// Per-agent payments at every grid profile given the tabulated choices.
    pub fn tabulate(&self, grid: &TypeGrid, choices: &[Alternative]) -> Result<Vec<Vec<f64>>> {
        if let PaymentRule::Table { grid: g, payments } = self {
            if g == grid {
                return Ok(payments.clone());
            }
        }
        let n = grid.agents();
        let mut out = vec![Vec::with_capacity(grid.profile_count()); n];
        let mut t = TypeProfile::zeros(n, grid.alternatives());
        for (idx, &o) in choices.iter().enumerate() {
            grid.write_profile(idx, &mut t);
            let p = self.evaluate(&t, o)?;
            if p.len() != n {
                return Err(Error::Dimension(format!("{} payments for {n} agents", p.len())));
            }
            for (i, v) in p.into_iter().enumerate() {
                out[i].push(v);
            }
        }
        Ok(out)
    }

    /// Convenience: evaluate the mechanism and then the payments.
    pub fn at(&self, f: &Mechanism, t: &TypeProfile, tol: &Tolerances) -> Result<Vec<f64>> {
        let o = f.evaluate(t, tol)?;
        self.evaluate(t, o)
    }
}

pub fn weighted_vcg_payments(
    lambda: &[f64],
    kappa: &[f64],
    offsets: &[f64],
    t: &TypeProfile,
    outcome: Alternative,
) -> Vec<f64> {
    let total: f64 = (0..lambda.len()).map(|j| lambda[j] * t.get(j, outcome)).sum();
    (0..lambda.len())
        .map(|i| {
            if lambda[i] == 0.0 {
                0.0
            } else {
                (total - lambda[i] * t.get(i, outcome) - kappa[outcome]) / lambda[i] - offsets[i]
            }
        })
        .collect()
}

pub fn example1_payments(t: &TypeProfile, outcome: Alternative) -> Result<Vec<f64>> {
    t.check_shape(2, 3)?;
    if let Some(v) = t.values().iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
        return Err(Error::domain(format!("value {v} outside (0,1)")));
    }
    let (t1, t2) = (t.row(0), t.row(1));
    Ok(match outcome {
        0 => vec![t2[0], t1[0]],
        1 => vec![(1.5 + t2[1]).min(2.0 + t2[2]), 1.5 + t1[1]],
        2 => vec![1.5 + t2[2], (1.5 + t1[2]).min(2.0 + t1[1])],
        _ => return Err(Error::invalid("Example 1 has three alternatives")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(rows: &[&[f64]]) -> TypeProfile {
        TypeProfile::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn vcg_examples() {
        let t = profile(&[&[3.0, 1.0, 0.0], &[0.0, 1.0, 2.0]]);
        let p = weighted_vcg_payments(&[1.0, 1.0], &[0.0; 3], &[0.0; 2], &t, 0);
        assert!(close(&p, &[0.0, 3.0]));
        let p = weighted_vcg_payments(&[2.0, 1.0], &[0.0; 3], &[0.0; 2], &t, 0);
        assert!(close(&p, &[0.0, 6.0]));
        for o in 0..3 {
            let p = weighted_vcg_payments(&[1.0, 0.0], &[0.0; 3], &[0.0; 2], &t, o);
            assert_eq!(p[1], 0.0);
        }
        let shifted = PaymentRule::weighted_vcg(vec![1.0, 1.0], 3).with_offsets(vec![5.0, 5.0]).unwrap();
        assert!(close(&shifted.evaluate(&t, 0).unwrap(), &[-5.0, -2.0]));
    }

    #[test]
    fn example1_payment_cases() {
        let b = profile(&[&[0.9, 0.8, 0.1], &[0.9, 0.7, 0.2]]);
        assert!(close(&example1_payments(&b, 1).unwrap(), &[2.2, 2.3]));
        let c = profile(&[&[0.1, 0.2, 0.8], &[0.1, 0.8, 0.2]]);
        assert!(close(&example1_payments(&c, 2).unwrap(), &[1.7, 2.2]));
        let a = profile(&[&[0.95, 0.05, 0.05], &[0.95, 0.05, 0.05]]);
        assert!(close(&example1_payments(&a, 0).unwrap(), &[0.95, 0.95]));
    }

    #[test]
    fn shifted_payment_adds_delta_of_outcome() {
        let t = profile(&[&[0.1, 0.2, 0.3], &[0.4, 0.5, 0.6]]);
        let base = PaymentRule::weighted_vcg(vec![1.0, 2.0], 3);
        let delta = vec![0.25, -0.5, 1.0];
        let p = PaymentRule::shifted(base.clone(), delta.clone());
        for o in 0..3 {
            let lhs = p.evaluate(&t, o).unwrap();
            let rhs = base.evaluate(&t.shifted(&delta), o).unwrap();
            for i in 0..2 {
                assert!((lhs[i] - rhs[i] - delta[o]).abs() < 1e-12);
            }
        }
        let zero = PaymentRule::shifted(base.clone(), vec![0.0; 3]);
        assert_eq!(zero.evaluate(&t, 1).unwrap(), base.evaluate(&t, 1).unwrap());
    }
}
