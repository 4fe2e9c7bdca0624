//! The three worked examples as runnable fixtures with expected verdicts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::certificate::{Statement, Verdict, Witness};
use crate::classify::{analyze, Analysis, ClassifyConfig, DepthSchedule};
use crate::error::Result;
use crate::input::{resolve_function, resolve_specs, FunctionContext, FunctionSpec, Loaded, MapSpec};
use crate::oracle::{surjectivity_infeasibility, Feasibility, OracleResult};
use crate::sample;
use crate::tree::TreeSpec;
use crate::wco::WeightedCompOp;

/// Extra per-fixture checks beyond the certificate verdicts.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixtureProbe {
    /// Re-run the isometry check at each depth and compare `‖ψC_φ f‖∞`
    /// with `‖f‖∞` on random bounded `f`.
    IsometrySweep {
        depths: Vec<usize>,
        random_functions: usize,
    },
    /// `sup_{|φ| ≥ N'} |ψ||φ|` on each truncation `N' = 1..=N`, for the main
    /// weight and every companion.
    TruncationTails,
    /// No preimage of `g` in the unit ball of `ℒ`.
    Infeasible { g: FunctionSpec, amplitude: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Companion {
    pub label: String,
    pub psi: FunctionSpec,
    pub expected: Vec<(Statement, Verdict)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fixture {
    pub name: String,
    pub summary: String,
    pub tree: TreeSpec,
    pub psi: FunctionSpec,
    pub phi: MapSpec,
    pub expected: Vec<(Statement, Verdict)>,
    pub companions: Vec<Companion>,
    pub probe: FixtureProbe,
}

impl Fixture {
    /// The same fixture on the integer line of another depth.
    pub fn at_depth(&self, depth: usize) -> Fixture {
        Fixture {
            tree: TreeSpec::zline(depth),
            ..self.clone()
        }
    }
}

fn builtin(name: &str) -> FunctionSpec {
    FunctionSpec::builtin(name, Value::Null)
}

pub fn worked_examples() -> Vec<Fixture> {
    use Statement::*;
    use Verdict::*;
    vec![
        Fixture {
            name: "z-isometry".into(),
            summary: "folding map of the integer line with the weight vanishing on odd negatives: an isometry of L∞"
                .into(),
            tree: TreeSpec::zline(8),
            psi: builtin("zfold_weight"),
            phi: MapSpec::builtin("zfold", Value::Null),
            expected: vec![(LinfIsometry, Holds), (LinfBoundedBelow, Holds), (LipNoIsometry, Holds)],
            companions: vec![],
            probe: FixtureProbe::IsometrySweep {
                depths: vec![4, 6, 8],
                random_functions: 50,
            },
        },
        Fixture {
            name: "bounded-not-compact".into(),
            summary: "ψ = 1/(|φ|+1) on the identity: bounded but not compact from ℒ; its square is compact".into(),
            tree: TreeSpec::zline(16),
            psi: FunctionSpec::builtin("inv_phi", json!({"power": 1.0})),
            phi: MapSpec::builtin("identity", Value::Null),
            expected: vec![(LipBounded, TrendConsistent), (LipCompact, TrendInconsistent)],
            companions: vec![Companion {
                label: "squared weight".into(),
                psi: FunctionSpec::builtin("inv_phi", json!({"power": 2.0})),
                expected: vec![(LipBounded, TrendConsistent), (LipCompact, TrendConsistent)],
            }],
            probe: FixtureProbe::TruncationTails,
        },
        Fixture {
            name: "not-surjective-2n".into(),
            summary: "φ(n) = 2n with ψ(n) = 1/n (ψ(0) = 1): injective, misses the odd integers, not onto".into(),
            tree: TreeSpec::zline(8),
            psi: builtin("reciprocal"),
            phi: MapSpec::builtin("double", Value::Null),
            expected: vec![(LinfBoundedBelow, Fails), (LipBoundedBelow, Fails)],
            companions: vec![],
            probe: FixtureProbe::Infeasible {
                g: FunctionSpec::builtin("alternating", json!({"amplitude": 1.0})),
                amplitude: 1.0,
            },
        },
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureCheck {
    pub what: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompanionReport {
    pub label: String,
    pub analysis: Analysis,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureReport {
    pub name: String,
    pub summary: String,
    pub passed: bool,
    pub checks: Vec<FixtureCheck>,
    pub analysis: Analysis,
    pub companions: Vec<CompanionReport>,
    pub details: Value,
}

impl FixtureReport {
    pub fn check(&self, what: &str) -> Option<&FixtureCheck> {
        self.checks.iter().find(|c| c.what == what)
    }
}

fn check(
    what: impl Into<String>,
    expected: impl Into<String>,
    observed: impl Into<String>,
    passed: bool,
) -> FixtureCheck {
    FixtureCheck {
        what: what.into(),
        expected: expected.into(),
        observed: observed.into(),
        passed,
    }
}

fn verdict_checks(prefix: &str, analysis: &Analysis, expected: &[(Statement, Verdict)]) -> Vec<FixtureCheck> {
    expected
        .iter()
        .map(|&(s, v)| {
            let observed = analysis.certificate(s).map(|c| c.verdict);
            check(
                format!(
                    "{prefix}{}",
                    serde_json::to_value(s).expect("statement").as_str().unwrap_or_default()
                ),
                format!("{v:?}"),
                observed.map_or("missing".into(), |o| format!("{o:?}")),
                observed == Some(v),
            )
        })
        .collect()
}

fn load(fixture: &Fixture, psi: &FunctionSpec, seed: u64) -> Result<Loaded> {
    resolve_specs(&fixture.tree, Some(psi), Some(&fixture.phi), seed)
}

fn truncation_depth(fixture: &Fixture, seed: u64) -> Result<usize> {
    Ok(load(fixture, &fixture.psi, seed)?.tree.truncation_depth())
}

/// `(N', sup_{|φ| ≥ N'} |ψ||φ|)` computed afresh on each truncation.
pub fn lip_tail_by_truncation(fixture: &Fixture, psi: &FunctionSpec, seed: u64) -> Result<Vec<(usize, f64)>> {
    let n = truncation_depth(fixture, seed)?;
    (1..=n)
        .map(|d| {
            let l = load(&fixture.at_depth(d), psi, seed)?;
            let op = WeightedCompOp::new(l.psi, l.phi)?;
            Ok((d, op.lip_ess_norm_tail(d - 1)?))
        })
        .collect()
}

/// Run a fixture end to end and compare with its expectations.
pub fn run_fixture(fixture: &Fixture, seed: u64) -> Result<FixtureReport> {
    let cfg = ClassifyConfig::default();
    let main = load(fixture, &fixture.psi, seed)?;
    let schedule = DepthSchedule::geometric(main.tree.truncation_depth());
    let op = WeightedCompOp::new(main.psi.clone(), main.phi.clone())?;
    let analysis = analyze(&op, &schedule, &cfg);
    let mut checks = verdict_checks("", &analysis, &fixture.expected);
    checks.push(check(
        "cross checks",
        "all pass",
        format!(
            "{} of {} pass",
            analysis.cross_checks.iter().filter(|c| c.passed).count(),
            analysis.cross_checks.len()
        ),
        analysis.all_checks_pass(),
    ));

    let mut companions = Vec::new();
    for c in &fixture.companions {
        let l = load(fixture, &c.psi, seed)?;
        let a = analyze(&WeightedCompOp::new(l.psi, l.phi)?, &schedule, &cfg);
        checks.extend(verdict_checks(&format!("{}: ", c.label), &a, &c.expected));
        companions.push(CompanionReport {
            label: c.label.clone(),
            analysis: a,
        });
    }

    let details = match &fixture.probe {
        FixtureProbe::IsometrySweep {
            depths,
            random_functions,
        } => isometry_sweep(fixture, depths, *random_functions, seed, &mut checks)?,
        FixtureProbe::TruncationTails => truncation_tails(fixture, seed, &mut checks)?,
        FixtureProbe::Infeasible { g, amplitude } => infeasibility(&op, g, *amplitude, seed, &mut checks)?,
    };

    Ok(FixtureReport {
        name: fixture.name.clone(),
        summary: fixture.summary.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        analysis,
        companions,
        details,
    })
}

fn isometry_sweep(
    fixture: &Fixture,
    depths: &[usize],
    random_functions: usize,
    seed: u64,
    checks: &mut Vec<FixtureCheck>,
) -> Result<Value> {
    let mut rows = Vec::new();
    for &n in depths {
        let l = load(&fixture.at_depth(n), &fixture.psi, seed)?;
        let op = WeightedCompOp::new(l.psi, l.phi)?;
        let verdict = op.isometry_check_linf().verdict;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
        let mut worst = 0.0f64;
        for i in 0..random_functions {
            let f = sample::function(&mut rng, &l.tree, 1.0 + i as f64);
            worst = worst.max((op.apply(&f)?.sup_norm() - f.sup_norm()).abs());
        }
        checks.push(check(
            format!("isometry at depth {n}"),
            "Holds",
            format!("{verdict:?}"),
            verdict == Verdict::Holds,
        ));
        checks.push(check(
            format!("‖ψC_φ f‖∞ = ‖f‖∞ at depth {n}"),
            "max deviation ≤ 1e-12",
            format!("{worst:e}"),
            worst <= 1e-12,
        ));
        rows.push(
            json!({"depth": n, "verdict": verdict, "random_functions": random_functions, "max_deviation": worst}),
        );
    }
    Ok(json!({ "isometry_by_depth": rows }))
}

fn truncation_tails(fixture: &Fixture, seed: u64, checks: &mut Vec<FixtureCheck>) -> Result<Value> {
    let main = lip_tail_by_truncation(fixture, &fixture.psi, seed)?;
    let last = main.last().map_or(0.0, |p| p.1);
    let increasing = main.windows(2).all(|w| w[1].1 > w[0].1);
    checks.push(check(
        "lip tail increases toward 1",
        "strictly increasing, final ≥ 0.8",
        format!("final {last:.6}, increasing: {increasing}"),
        increasing && (0.8..1.0).contains(&last),
    ));
    let mut out = json!({ "lip_tail_by_truncation": main });
    for c in &fixture.companions {
        let seq = lip_tail_by_truncation(fixture, &c.psi, seed)?;
        let last = seq.last().map_or(0.0, |p| p.1);
        let decreasing = seq.windows(2).all(|w| w[1].1 < w[0].1);
        checks.push(check(
            format!("{}: lip tail decreases", c.label),
            "strictly decreasing, final < 0.1",
            format!("final {last:.6}, decreasing: {decreasing}"),
            decreasing && last < 0.1,
        ));
        out[format!("{} lip_tail_by_truncation", c.label)] = json!(seq);
    }
    Ok(out)
}

/// Why the weighted upper bound differs from the value quoted with this
/// example.
pub const INF_NOTE: &str = "inf over the truncation of |ψ(n)|(1+|φ(n)|) is 1, attained at n = 0 \
     (ψ(0) = 1, φ(0) = 0); over n ≠ 0 the terms are 2 + 1/|n|, whose infimum 2 is the value \
     usually stated for this example. Both bound the surjectivity modulus from above.";

fn infeasibility(
    op: &WeightedCompOp,
    g: &FunctionSpec,
    amplitude: f64,
    seed: u64,
    checks: &mut Vec<FixtureCheck>,
) -> Result<Value> {
    let source = op.phi().source();
    let target = op.phi().target();
    let g = resolve_function(
        g,
        &FunctionContext {
            tree: source,
            phi: Some(op.phi()),
            seed,
        },
        "g",
    )?;
    let result: OracleResult = surjectivity_infeasibility(op, &g, None)?;
    checks.push(check(
        "g has no preimage in the unit ball",
        "Infeasible",
        format!("{:?}", result.feasibility),
        result.feasibility == Some(Feasibility::Infeasible),
    ));

    // The certifying pair should be two forced values f(2n), f(2n+2).
    let pair = result.witnesses.iter().find_map(|w| match w {
        Witness::Pair {
            first, second, value, ..
        } => Some((*first, *second, *value)),
        _ => None,
    });
    let pair_ok = pair.is_some_and(|(a, b, q)| {
        let (la, lb) = (target.zline_label(a), target.zline_label(b));
        matches!((la, lb), (Some(x), Some(y)) if x % 2 == 0 && y % 2 == 0 && (x - y).abs() == 2) && q > 1.0
    });
    let pair_labels = pair.map(|(a, b, q)| (target.zline_label(a), target.zline_label(b), q));
    checks.push(check(
        "forced pair |f(2n+2) - f(2n)|/2 > 1",
        "adjacent even labels, quotient > 1",
        format!("{pair_labels:?}"),
        pair_ok,
    ));

    // Smallest n ≥ 0 with M(2n+1) > 2 and 2n+2 inside the truncation.
    let n_depth = target.truncation_depth() as i64;
    let witness_n = (0..)
        .take_while(|n| 2 * n + 2 <= n_depth)
        .find(|&n| amplitude * (2 * n + 1) as f64 > 2.0);
    checks.push(check(
        "M(2n+1) > 2 within the truncation",
        "some n with 2n+2 ≤ N",
        format!("{witness_n:?}"),
        witness_n.is_some(),
    ));

    let (bracket, argmin) = op.k_lip_bracket();
    let argmin_label = argmin.and_then(|v| source.zline_label(v));
    let inf_nonzero = op
        .phi()
        .pairs()
        .filter(|(v, _)| source.zline_label(*v) != Some(0))
        .map(|(v, w)| op.psi().get(v).abs() * (1.0 + target.depth(w) as f64))
        .fold(f64::INFINITY, f64::min);
    checks.push(check(
        "inf |ψ|(1+|φ|) reported",
        "1 at n = 0",
        format!("{} at n = {argmin_label:?}", bracket.upper),
        (bracket.upper - 1.0).abs() < 1e-12 && argmin_label == Some(0),
    ));

    Ok(json!({
        "probe_amplitude": amplitude,
        "infeasibility": result,
        "surjectivity_modulus_bracket": bracket,
        "inf_weighted_upper": {"value": bracket.upper, "argmin_label": argmin_label},
        "inf_weighted_upper_excluding_0": inf_nonzero,
        "note": INF_NOTE,
    }))
}
