//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treewco::certificate::{Verdict, Witness};
use treewco::classify::{is_coherent, seven_equivalences, ClassifyConfig, DepthSchedule};
use treewco::fixtures::{lip_tail_by_truncation, run_fixture, worked_examples, Fixture};
use treewco::input::resolve_specs;
use treewco::oracle::{
    j_oracle_linf_bracket, norm_oracle_linf, norm_oracle_lip, point_eval_lip_norm, range_miss_search,
    surjectivity_infeasibility, Feasibility, OracleConfig, PointEvalMethod, SIGN_GRID,
};
use treewco::sample;
use treewco::{RootedTree, SelfMap, VertexFunction, WeightedCompOp};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> Fixture {
    worked_examples()
        .into_iter()
        .find(|f| f.name == name)
        .expect("fixture exists")
}

fn norm_identity() -> Outcome {
    let start = Instant::now();
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut largest = 0;
    for _ in 0..100 {
        let op = sample::operator(&mut rng, 16);
        largest = largest.max(op.phi().target().len());
        let oracle = norm_oracle_linf(&op, &SIGN_GRID, &cfg).expect("within cap").value;
        let formula = op.linf_op_norm();
        let sup = op.psi().sup_norm();
        worst = worst.max((oracle - formula).abs()).max((formula - sup).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(10),
        format!("max deviation {worst:.1e}, largest tree {largest} vertices, {elapsed:.2?}"),
    )
}

fn point_evaluation() -> Outcome {
    let cfg = OracleConfig::default();
    let trees = [
        Arc::new(RootedTree::zline(6)),
        Arc::new(RootedTree::homogeneous(2, 4).expect("valid")),
    ];
    let mut worst_exact = 0.0f64;
    let mut worst_pair = 0.0f64;
    let mut count = 0;
    for t in &trees {
        for w in t.vertices() {
            let expect = t.depth(w).max(1) as f64;
            let path = point_eval_lip_norm(t, w, PointEvalMethod::PathExtremal, &cfg)
                .expect("path")
                .value;
            let grid = point_eval_lip_norm(t, w, PointEvalMethod::GridRefine, &cfg)
                .expect("grid")
                .value;
            worst_exact = worst_exact.max((path - expect).abs()).max((grid - expect).abs());
            worst_pair = worst_pair.max((path - grid).abs());
            count += 1;
        }
    }
    outcome(
        worst_exact <= 1e-6 && worst_pair <= 1e-6,
        format!("{count} vertices, max |oracle - max(1,|w|)| {worst_exact:.1e}, method gap {worst_pair:.1e}"),
    )
}

fn sandwich() -> Outcome {
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let op = sample::operator(&mut rng, 16);
        let b = op.lip_bounds();
        let oracle = norm_oracle_lip(&op, &cfg).expect("oracle").value;
        let exact = op.lip_exact_norm();
        worst = worst.max((oracle - exact).abs());
        if !(b.lower <= exact + 1e-12 && exact <= b.upper + 1e-12) {
            violations += 1;
        }
    }
    outcome(
        violations == 0 && worst <= 1e-9,
        format!("200 instances, bracket violations {violations}, max |oracle - exact| {worst:.1e}"),
    )
}

fn moduli() -> Outcome {
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut below = 0;
    let mut identity_gap = 0.0f64;
    let mut identities = 0;
    let mut k_checks = 0;
    let mut k_failures = 0;
    for i in 0..50 {
        let tree = sample::small_tree(&mut rng, 12);
        let psi = sample::weight(&mut rng, &tree);
        let phi = if i % 5 == 0 {
            SelfMap::identity(&tree)
        } else {
            sample::map(&mut rng, &tree)
        };
        let is_identity = i % 5 == 0;
        let op = WeightedCompOp::new(psi, phi).expect("same tree");
        let b = j_oracle_linf_bracket(&op, 3, &cfg).expect("within cap");
        if b.upper < b.lower - 1e-9 {
            below += 1;
        }
        if is_identity {
            identities += 1;
            identity_gap = identity_gap.max(b.gap.abs());
        }
        let has_zero = op.phi().domain().iter().any(|v| op.psi().get(v) == 0.0);
        if !op.phi().is_injective() || has_zero {
            k_checks += 1;
            let miss = range_miss_search(&op, &cfg).expect("within cap");
            if op.k_linf() != 0.0 || miss.value != 1.0 {
                k_failures += 1;
            }
        }
    }
    outcome(
        below == 0 && identity_gap <= 1e-9 && k_failures == 0 && k_checks > 0,
        format!(
            "50 instances: oracle below formula {below}, identity gap {identity_gap:.1e} over {identities}, \
             k = 0 confirmed exhaustively on {k_checks} (failures {k_failures})"
        ),
    )
}

fn z_isometry() -> Outcome {
    let f = fixture("z-isometry");
    let mut details = Vec::new();
    let mut ok = true;
    for n in [4usize, 6, 8] {
        let fx = f.at_depth(n);
        let l = resolve_specs(&fx.tree, Some(&fx.psi), Some(&fx.phi), 0).expect("fixture loads");
        let op = WeightedCompOp::new(l.psi, l.phi).expect("same tree");
        let verdict = op.isometry_check_linf().verdict;
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let scale = rng.gen_range(0.1..10.0);
            let g = sample::function(&mut rng, &l.tree, scale);
            worst = worst.max((op.apply(&g).expect("same tree").sup_norm() - g.sup_norm()).abs());
        }
        ok &= verdict == Verdict::Holds && worst <= 1e-12;
        details.push(format!("N={n}: {verdict:?}, dev {worst:.0e}"));
    }
    let report = run_fixture(&f, 0).expect("fixture runs");
    ok &= report.passed;
    outcome(ok, details.join("; "))
}

fn bounded_not_compact() -> Outcome {
    let f = fixture("bounded-not-compact");
    let main = lip_tail_by_truncation(&f, &f.psi, 0).expect("tails");
    let sq = lip_tail_by_truncation(&f, &f.companions[0].psi, 0).expect("tails");
    let increasing = main.windows(2).all(|w| w[1].1 > w[0].1) && main.iter().all(|p| p.1 < 1.0);
    let decreasing = sq.windows(2).all(|w| w[1].1 < w[0].1);
    let (last_main, last_sq) = (main.last().expect("N >= 1"), sq.last().expect("N >= 1"));
    let report = run_fixture(&f, 0).expect("fixture runs");
    outcome(
        increasing && last_main.0 == 16 && last_main.1 >= 0.8 && decreasing && last_sq.1 < 0.1 && report.passed,
        format!(
            "ψ tail at N=16 {:.4} (increasing {increasing}), ψ² tail {:.4} (decreasing {decreasing}), verdicts {}",
            last_main.1,
            last_sq.1,
            if report.passed { "as expected" } else { "unexpected" }
        ),
    )
}

fn not_surjective() -> Outcome {
    let f = fixture("not-surjective-2n");
    let l = resolve_specs(&f.tree, Some(&f.psi), Some(&f.phi), 0).expect("fixture loads");
    let op = WeightedCompOp::new(l.psi, l.phi).expect("same tree");
    let src = op.phi().source().clone();
    let g = VertexFunction::from_fn(&src, |v| {
        if src.zline_label(v).expect("line") % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })
    .expect("valid");
    let r = surjectivity_infeasibility(&op, &g, None).expect("injective");
    let tgt = op.phi().target();
    let pair = r.witnesses.iter().find_map(|w| match w {
        Witness::Pair {
            first, second, value, ..
        } => Some((tgt.zline_label(*first)?, tgt.zline_label(*second)?, *value)),
        _ => None,
    });
    let pair_ok = pair.is_some_and(|(a, b, q)| a % 2 == 0 && b % 2 == 0 && (a - b).abs() == 2 && q > 1.0);

    let report = run_fixture(&f, 0).expect("fixture runs");
    let inf = report.details["inf_weighted_upper"]["value"].as_f64();
    let note = report.details["note"].as_str().unwrap_or_default();
    let note_ok = note.contains("is 1, attained at n = 0") && note.contains("infimum 2");
    outcome(
        r.feasibility == Some(Feasibility::Infeasible) && pair_ok && inf == Some(1.0) && note_ok && report.passed,
        format!(
            "{:?}, pair (labels, quotient) {pair:?}, reported inf |ψ|(1+|φ|) {inf:?}, note present {note_ok}",
            r.feasibility
        ),
    )
}

fn g_norm_law() -> Outcome {
    // Closed form written out independently of the library.
    let closed = |n: f64, r: f64| {
        let x = n - n.sqrt();
        n / x * (x.powf(r + 1.0) - (x - 1.0).powf(r + 1.0)) / x.powf(r)
    };
    let tree = Arc::new(RootedTree::zline(256));
    let mut worst = 0.0f64;
    let mut monotone = true;
    let mut rows = Vec::new();
    for r in [0.25, 0.5] {
        let mut prev_gap = f64::INFINITY;
        for n in [16usize, 64, 256] {
            let norm = VertexFunction::g_test(&tree, n, r).expect("valid").lip_norm();
            worst = worst.max((norm - closed(n as f64, r)).abs());
            let gap = (norm - (r + 1.0)).abs();
            monotone &= gap < prev_gap;
            prev_gap = gap;
            rows.push(format!("{norm:.4}"));
        }
    }
    outcome(
        worst <= 1e-9 && monotone,
        format!(
            "max |computed - closed form| {worst:.1e}, norms {}, monotone approach {monotone}",
            rows.join("/")
        ),
    )
}

fn universal_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut growth_fail = 0;
    let mut d_fail = 0;
    let mut tail_fail = 0;
    for i in 0..1000 {
        let tree = sample::small_tree(&mut rng, 40);
        let f = if i % 2 == 0 {
            sample::function(&mut rng, &tree, 5.0)
        } else {
            sample::weight(&mut rng, &tree)
        };
        if !f.growth_check().holds {
            growth_fail += 1;
        }
        let r = f.norms();
        if r.d_sup > 2.0 * r.sup_norm + 1e-12 {
            d_fail += 1;
        }
        let op = WeightedCompOp::new(f.clone(), sample::map(&mut rng, &tree)).expect("same tree");
        let tails = [
            r.tail_profile,
            op.linf_ess_profile().points,
            op.lip_ess_profile().points,
        ];
        if tails.iter().any(|p| p.windows(2).any(|w| w[1].1 > w[0].1)) {
            tail_fail += 1;
        }
    }

    let tree = Arc::new(RootedTree::zline(8));
    let schedule = DepthSchedule::geometric(8);
    let cfg = ClassifyConfig::default();
    let mut incoherent = 0;
    for i in 0..20 {
        let phi = if i % 2 == 0 {
            let depth = rng.gen_range(0..=4);
            sample::finite_range_map(&mut rng, &tree, depth).expect("valid depth")
        } else {
            sample::depth_preserving_map(&mut rng, &tree)
        };
        if !is_coherent(&seven_equivalences(&phi, &schedule, &cfg)) {
            incoherent += 1;
        }
    }
    outcome(
        growth_fail + d_fail + tail_fail + incoherent == 0,
        format!(
            "1000 functions: growth failures {growth_fail}, ‖Df‖∞ > 2‖f‖∞ {d_fail}, increasing tails {tail_fail}; \
             20 maps: incoherent equivalences {incoherent}"
        ),
    )
}

fn main() {
    let start = Instant::now();
    let criteria: [Criterion; 9] = [
        ("norm identity on L∞", norm_identity),
        ("point-evaluation gate", point_evaluation),
        ("ℒ → L∞ norm sandwich", sandwich),
        ("injectivity and surjectivity moduli", moduli),
        ("fixture z-isometry", z_isometry),
        ("fixture bounded-not-compact", bounded_not_compact),
        ("fixture not-surjective-2n", not_surjective),
        ("g_(n,r) norm law", g_norm_law),
        ("universal properties", universal_properties),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!(
            "criterion {} {name}: {} ({}) [{:.2?}]",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed()
        );
    }
    let total = start.elapsed();
    let within = total < Duration::from_secs(60);
    println!(
        "acceptance total {total:.2?} ({} the 60 s budget)",
        if within { "within" } else { "over" }
    );
    if failures > 0 || !within {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
