//! Builds the mechanism and payments a config describes and runs its checks.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use dsic_core::audit::{check_cycle_monotonicity, check_revenue_equivalence, synthesize_payments, verify_ic};
use dsic_core::fit::{fit_affine_maximizer, FitOptions, FitResult};
use dsic_core::kappa::{calibrate_kappa, neutralize_and_fit, KappaCalibration};
use dsic_core::ordering::{axiom_samples, check_order_axioms, fit_linear_order, sample_comparisons};
use dsic_core::properties::{
    check_anonymous, check_binary_independence, check_ch1, check_neutral, check_non_imposition, check_pad,
    check_scf_neutral, SampleOptions,
};
use dsic_core::pset::check_pset_laws;
use dsic_core::random::{random_mechanism, RandomKind, RandomSpec, PRNG_NAME};
use dsic_core::{
    AffineMaximizer, CheckReport, Mechanism, PaymentRule, TableMechanism, Tolerances, TypeGrid, TypeSpace,
};

use crate::config::{schema, AuditConfig, CheckSpec, ConfigError, Expectation, MechanismSpec, PaymentSpec};

pub const DEFAULT_PSET_SAMPLES: usize = 20;
pub const DEFAULT_ORDER_SAMPLES: usize = 20;
pub const DEFAULT_ORDER_SHIFTS: usize = 3;
pub const DEFAULT_ORDER_COMPARISONS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
    Error,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Error => "error",
        }
    }

    fn matches(self, e: Expectation) -> bool {
        self.as_str() == e.as_str()
    }
}

impl From<dsic_core::Verdict> for Outcome {
    fn from(v: dsic_core::Verdict) -> Self {
        match v {
            dsic_core::Verdict::Pass => Outcome::Pass,
            dsic_core::Verdict::Fail => Outcome::Fail,
            dsic_core::Verdict::Inconclusive => Outcome::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub verdict: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expectation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation_met: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<KappaCalibration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckOutcome {
    fn new(name: &str, verdict: Outcome) -> Self {
        CheckOutcome {
            name: name.into(),
            verdict,
            expected: None,
            expectation_met: None,
            report: None,
            fit: None,
            calibration: None,
            error: None,
        }
    }

    fn from_report(report: CheckReport) -> Self {
        let mut out = CheckOutcome::new(&report.check.clone(), report.verdict.into());
        out.report = Some(report);
        out
    }

    fn from_fit(name: &str, fit: FitResult) -> Self {
        let mut out = CheckOutcome::new(name, if fit.feasible() { Outcome::Pass } else { Outcome::Fail });
        out.fit = Some(fit);
        out
    }

    fn from_error(name: &str, e: impl ToString) -> Self {
        let mut out = CheckOutcome::new(name, Outcome::Error);
        out.error = Some(e.to_string());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    pub agents: usize,
    pub alternatives: usize,
    pub resolution: Vec<usize>,
    pub profiles: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckTiming {
    pub name: String,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub total_millis: f64,
    pub checks: Vec<CheckTiming>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub tool: String,
    pub version: String,
    pub config: AuditConfig,
    pub seed: u64,
    pub prng: String,
    pub mechanism: String,
    pub payments: String,
    pub grid: GridSummary,
    pub tolerances: Tolerances,
    pub checks: Vec<CheckOutcome>,
    pub overall: Outcome,
    pub expectations_met: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthesized_payments: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl AuditReport {
    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.overall == Outcome::Pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// The JSON rendering without timing, for byte-level comparisons.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.timing = None;
        copy.to_json()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub jobs: usize,
    pub timing: bool,
    /// Attach the synthesized payment table to the report.
    pub include_payments: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { jobs: 1, timing: true, include_payments: false }
    }
}

struct Context {
    space: TypeSpace,
    grid: TypeGrid,
    tol: Tolerances,
    seed: u64,
    sample: SampleOptions,
    f: Mechanism,
    payments: Result<PaymentRule, String>,
    synthesized: Option<Result<PaymentRule, String>>,
}

fn build_mechanism(
    config: &AuditConfig,
    spec: &MechanismSpec,
    grid: &TypeGrid,
    tol: &Tolerances,
    seed: u64,
) -> Result<Mechanism, ConfigError> {
    let n = config.agents;
    let m = config.alternatives.len();
    let core = |e: dsic_core::Error| schema("mechanism", e.to_string());
    Ok(match spec {
        MechanismSpec::Affine { lambda, kappa } => {
            Mechanism::Affine(AffineMaximizer::new(lambda.clone(), kappa.clone()).map_err(core)?)
        }
        MechanismSpec::WeightedWelfare { lambda } => {
            Mechanism::Affine(AffineMaximizer::weighted_welfare(lambda.clone(), m).map_err(core)?)
        }
        MechanismSpec::Efficient {} => Mechanism::Affine(AffineMaximizer::efficient(n, m).map_err(core)?),
        MechanismSpec::Example1 {} => Mechanism::Example1,
        MechanismSpec::Constant { choice } => {
            Mechanism::constant(m, config.label_index(choice, "mechanism.choice")?).map_err(core)?
        }
        MechanismSpec::RandomAffine { kappa_max, seed: own } => random_mechanism(
            &RandomSpec {
                seed: own.unwrap_or(seed),
                kind: RandomKind::Affine { agents: n, alternatives: m, kappa_max: *kappa_max },
            },
            tol,
        )
        .map_err(core)?,
        MechanismSpec::PerturbedTable { base, flip_count, symmetric, seed: own } => {
            let base = build_mechanism(config, base, grid, tol, seed)?;
            let grid = grid.clone();
            let flip_count = *flip_count;
            let kind = if *symmetric {
                RandomKind::SymmetricPerturbedTable { base, grid, flip_count }
            } else {
                RandomKind::PerturbedTable { base, grid, flip_count }
            };
            random_mechanism(&RandomSpec { seed: own.unwrap_or(seed), kind }, tol).map_err(core)?
        }
        MechanismSpec::Shifted { base, delta } => {
            Mechanism::shifted(build_mechanism(config, base, grid, tol, seed)?, delta.clone()).map_err(core)?
        }
        MechanismSpec::Table { choices } => {
            let idx = choices
                .iter()
                .map(|c| config.label_index(c, "mechanism.choices"))
                .collect::<Result<Vec<_>, _>>()?;
            Mechanism::Table(TableMechanism::new(grid.clone(), idx).map_err(core)?)
        }
    })
}

/// VCG payments for an affine maximizer, shifted alongside shifted mechanisms.
fn vcg_for(f: &Mechanism, offsets: Option<&Vec<f64>>) -> Option<Result<PaymentRule, String>> {
    match f {
        Mechanism::Affine(am) => {
            let p = PaymentRule::for_affine(am);
            Some(match offsets {
                Some(h) => p.with_offsets(h.clone()).map_err(|e| e.to_string()),
                None => Ok(p),
            })
        }
        Mechanism::Shifted { base, delta } => {
            vcg_for(base, offsets).map(|p| p.map(|p| PaymentRule::shifted(p, delta.clone())))
        }
        _ => None,
    }
}

fn payments_label(config: &AuditConfig, f: &Mechanism) -> String {
    match &config.payments {
        Some(PaymentSpec::Vcg { .. }) => "vcg".into(),
        Some(PaymentSpec::Example1 {}) => "example1".into(),
        Some(PaymentSpec::Zero {}) => "zero".into(),
        Some(PaymentSpec::Synthesized {}) => "synthesized".into(),
        None => match f {
            Mechanism::Affine(_) | Mechanism::Shifted { .. } if vcg_for(f, None).is_some() => "vcg (default)".into(),
            Mechanism::Example1 => "example1 (default)".into(),
            _ => "synthesized (default)".into(),
        },
    }
}

fn needs_synthesized(config: &AuditConfig, f: &Mechanism, include: bool) -> bool {
    let uses_default = match &config.payments {
        Some(PaymentSpec::Synthesized {}) => true,
        Some(_) => false,
        None => vcg_for(f, None).is_none() && !matches!(f, Mechanism::Example1),
    };
    include
        || config.checks.iter().any(|c| {
            c.name == "revenue-equivalence" || (c.name == "ic-verify" && uses_default)
        })
}

fn context(config: &AuditConfig, include_payments: bool) -> Result<Context, ConfigError> {
    let space = config.space()?;
    let grid = config.grid()?;
    let tol = config.tolerances()?;
    let seed = config.seed.unwrap_or(0);
    let f = build_mechanism(config, &config.mechanism, &grid, &tol, seed)?;
    let synthesized = needs_synthesized(config, &f, include_payments)
        .then(|| synthesize_payments(&f, &grid, &tol).map_err(|e| e.to_string()));
    let missing = || -> Result<PaymentRule, String> {
        synthesized.clone().unwrap_or_else(|| Err("synthesized payments were not computed".into()))
    };
    let payments = match &config.payments {
        Some(PaymentSpec::Vcg { offsets }) => {
            vcg_for(&f, offsets.as_ref()).unwrap_or_else(|| Err("vcg payments need an affine maximizer".into()))
        }
        Some(PaymentSpec::Example1 {}) => Ok(PaymentRule::Example1),
        Some(PaymentSpec::Zero {}) => Ok(PaymentRule::Zero { agents: config.agents }),
        Some(PaymentSpec::Synthesized {}) => missing(),
        None => match vcg_for(&f, None) {
            Some(p) => p,
            None if matches!(f, Mechanism::Example1) => Ok(PaymentRule::Example1),
            None => missing(),
        },
    };
    let sample = SampleOptions {
        max_profiles: config.sampling.max_profiles,
        seed,
        max_partners: config.sampling.max_partners,
    };
    Ok(Context { space, grid, tol, seed, sample, f, payments, synthesized })
}

fn run_check(ctx: &Context, spec: &CheckSpec) -> CheckOutcome {
    let name = spec.name.as_str();
    let (f, grid, tol, seed) = (&ctx.f, &ctx.grid, &ctx.tol, ctx.seed);
    let opts = &spec.options;
    let report = |r: dsic_core::Result<CheckReport>| match r {
        Ok(r) => CheckOutcome::from_report(r),
        Err(e) => CheckOutcome::from_error(name, e),
    };
    let fit = |r: dsic_core::Result<FitResult>| match r {
        Ok(r) => CheckOutcome::from_fit(name, r),
        Err(e) => CheckOutcome::from_error(name, e),
    };
    match name {
        "cycle-monotonicity" => report(check_cycle_monotonicity(f, grid, tol)),
        "ic-verify" => match &ctx.payments {
            Ok(p) => report(verify_ic(f, p, grid, tol)),
            Err(e) => CheckOutcome::from_error(name, e),
        },
        "revenue-equivalence" => match (ctx.synthesized.as_ref(), &ctx.payments) {
            (Some(Ok(s)), Ok(p)) => report(check_revenue_equivalence(s, p, f, grid, tol)),
            (Some(Err(e)), _) | (_, Err(e)) => CheckOutcome::from_error(name, e),
            (None, _) => CheckOutcome::from_error(name, "synthesized payments were not computed"),
        },
        "pad" => report(check_pad(f, grid, tol)),
        "non-imposition" => report(check_non_imposition(f, grid, tol)),
        "neutrality" => report(check_neutral(f, grid, tol, &ctx.sample)),
        "scf-neutrality" => report(check_scf_neutral(f, grid, tol, &ctx.sample)),
        "anonymity" => report(check_anonymous(f, grid, tol, &ctx.sample)),
        "binary-independence" => report(check_binary_independence(f, grid, tol, &ctx.sample)),
        "ch1" => report(check_ch1(f, grid, tol, &ctx.sample)),
        "pset-laws" => report(check_pset_laws(f, grid, opts.samples.unwrap_or(DEFAULT_PSET_SAMPLES), seed, None, tol)),
        "affine-fit" => fit(fit_affine_maximizer(
            f,
            grid,
            &FitOptions { subsample: opts.subsample.map(|k| (k, seed)) },
            tol,
        )),
        "calibrate-kappa" => match calibrate_kappa(f, &ctx.space, tol) {
            Ok(c) => {
                let mut out = CheckOutcome::new(name, if c.lemma_zero { Outcome::Pass } else { Outcome::Fail });
                out.calibration = Some(c);
                out
            }
            Err(e) => CheckOutcome::from_error(name, e),
        },
        "neutralize-and-fit" => {
            let fit_opts = FitOptions { subsample: opts.subsample.map(|k| (k, seed)) };
            match neutralize_and_fit(f, &ctx.space, grid, tol, &ctx.sample, &fit_opts) {
                Ok(r) => {
                    let mut out = CheckOutcome::from_fit(name, r.fit);
                    out.calibration = Some(r.calibration);
                    out.report = Some(r.neutrality);
                    out
                }
                Err(e) => CheckOutcome::from_error(name, e),
            }
        }
        "order-axioms" => {
            let (points, shifts) = axiom_samples(
                grid,
                opts.samples.unwrap_or(DEFAULT_ORDER_SAMPLES),
                opts.shifts.unwrap_or(DEFAULT_ORDER_SHIFTS),
                seed,
            );
            let anonymous = opts
                .anonymous
                .unwrap_or_else(|| check_anonymous(f, grid, tol, &ctx.sample).is_ok_and(|r| r.passed()));
            report(check_order_axioms(f, &points, &shifts, grid, anonymous, tol))
        }
        "order-fit" => {
            match sample_comparisons(f, grid, opts.comparisons.unwrap_or(DEFAULT_ORDER_COMPARISONS), seed, tol) {
                Ok(data) => fit(fit_linear_order(&data, grid.agents(), tol)),
                Err(e) => CheckOutcome::from_error(name, e),
            }
        }
        other => CheckOutcome::from_error(other, "unknown check"),
    }
}

fn run_all(ctx: &Context, checks: &[CheckSpec], jobs: usize) -> Vec<(CheckOutcome, f64)> {
    let timed = |spec: &CheckSpec| {
        let start = Instant::now();
        let out = run_check(ctx, spec);
        (out, start.elapsed().as_secs_f64() * 1e3)
    };
    if jobs <= 1 || checks.len() <= 1 {
        return checks.iter().map(timed).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<(CheckOutcome, f64)>>> = Mutex::new(vec![None; checks.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs.min(checks.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(spec) = checks.get(i) else { break };
                let result = timed(spec);
                slots.lock().expect("no worker panicked")[i] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every check ran"))
        .collect()
}

pub fn run_audit(config: &AuditConfig, opts: &RunOptions) -> Result<AuditReport, ConfigError> {
    let start = Instant::now();
    let ctx = context(config, opts.include_payments)?;
    let results = run_all(&ctx, &config.checks, opts.jobs);
    let mut checks = Vec::with_capacity(results.len());
    let mut timings = Vec::with_capacity(results.len());
    for ((mut outcome, millis), spec) in results.into_iter().zip(&config.checks) {
        if let Some(e) = spec.expect {
            outcome.expected = Some(e);
            outcome.expectation_met = Some(outcome.verdict.matches(e));
        }
        timings.push(CheckTiming { name: outcome.name.clone(), millis });
        checks.push(outcome);
    }
    let overall = if checks.iter().all(|c| c.verdict == Outcome::Pass) { Outcome::Pass } else { Outcome::Fail };
    let expectations_met = checks
        .iter()
        .all(|c| c.expectation_met.unwrap_or(c.verdict == Outcome::Pass));
    let synthesized_payments = if opts.include_payments {
        match &ctx.synthesized {
            Some(Ok(PaymentRule::Table { payments, .. })) => Some(payments.clone()),
            _ => None,
        }
    } else {
        None
    };
    Ok(AuditReport {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        seed: ctx.seed,
        prng: PRNG_NAME.into(),
        mechanism: ctx.f.kind().into(),
        payments: payments_label(config, &ctx.f),
        grid: GridSummary {
            agents: ctx.grid.agents(),
            alternatives: ctx.grid.alternatives(),
            resolution: ctx.grid.resolutions().to_vec(),
            profiles: ctx.grid.profile_count(),
        },
        tolerances: ctx.tol,
        checks,
        overall,
        expectations_met,
        synthesized_payments,
        timing: opts.timing.then(|| Timing { total_millis: start.elapsed().as_secs_f64() * 1e3, checks: timings }),
    })
}
