//! Certificates for boundedness, compactness, isometry and lower bounds of
//! `ψC_φ` on `L∞` and from `ℒ` to `L∞`.
//!
//! Statements that can be settled on the truncation (isometry, range of
//! `φ`, stabilized finite range) get `Holds`/`Fails`. Limit statements get a
//! trend verdict from the values at the last schedule depths.

use serde::Serialize;

use crate::certificate::{Certificate, Statement, Verdict, Witness};
use crate::error::{Error, Result};
use crate::tree::RootedTree;
use crate::wco::{SelfMap, WeightedCompOp};

/// Target depths at which profiles are sampled, a subset of `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DepthSchedule(Vec<usize>);

impl DepthSchedule {
    pub fn new(mut depths: Vec<usize>, truncation_depth: usize) -> Result<Self> {
        depths.sort_unstable();
        depths.dedup();
        if depths.is_empty() {
            return Err(Error::InvalidParameter("depth schedule is empty".into()));
        }
        for &d in &depths {
            if d == 0 || d > truncation_depth {
                return Err(Error::DepthOutOfRange {
                    depth: d,
                    min: 1,
                    max: truncation_depth,
                });
            }
        }
        Ok(DepthSchedule(depths))
    }

    /// Powers of two below `n`, then `n` itself.
    pub fn geometric(n: usize) -> Self {
        let mut depths: Vec<usize> = std::iter::successors(Some(1usize), |d| d.checked_mul(2))
            .take_while(|&d| d < n)
            .collect();
        depths.push(n.max(1));
        DepthSchedule(depths)
    }

    pub fn depths(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> usize {
        *self.0.last().expect("non-empty")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyConfig {
    /// Compact when the tail shrinks by at least this factor over the last
    /// three schedule depths.
    pub compact_decay_factor: f64,
    /// Values below this count as zero.
    pub zero_tol: f64,
    /// Bounded when the growth exponent `log(b/a)/log(d2/d1)` between the
    /// last two schedule depths stays below this.
    pub bounded_growth_exponent: f64,
    /// Relative tolerance for "flat" profiles.
    pub flat_tol: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            compact_decay_factor: 1.5,
            zero_tol: 1e-6,
            bounded_growth_exponent: 0.5,
            flat_tol: 1e-12,
        }
    }
}

impl ClassifyConfig {
    /// Vanishing trend over the last three points: below `zero_tol`, or
    /// non-increasing with an overall drop by `compact_decay_factor`.
    pub fn vanishing_trend(&self, profile: &[(usize, f64)]) -> bool {
        let Some(&(_, last)) = profile.last() else { return true };
        if last < self.zero_tol {
            return true;
        }
        let tail = &profile[profile.len().saturating_sub(3)..];
        if tail.len() < 2 {
            return false;
        }
        let non_increasing = tail.windows(2).all(|w| w[1].1 <= w[0].1);
        non_increasing && tail[0].1 >= self.compact_decay_factor * last
    }

    /// Bounded trend from the last two points of a non-decreasing profile.
    pub fn bounded_trend(&self, profile: &[(usize, f64)]) -> bool {
        if profile.len() < 2 {
            return true;
        }
        let (d1, a) = profile[profile.len() - 2];
        let (d2, b) = profile[profile.len() - 1];
        if b - a <= self.flat_tol * b.abs().max(1.0) {
            return true;
        }
        if a < self.zero_tol {
            return b < self.zero_tol;
        }
        let exponent = (b / a).ln() / (d2 as f64 / d1 as f64).ln();
        exponent < self.bounded_growth_exponent
    }

    fn flat(&self, profile: &[(usize, f64)]) -> bool {
        let tail = &profile[profile.len().saturating_sub(3)..];
        tail.windows(2)
            .all(|w| (w[1].1 - w[0].1).abs() <= self.flat_tol * w[0].1.abs().max(1.0))
    }
}

fn target_depth(op: &WeightedCompOp) -> usize {
    op.phi().target().truncation_depth()
}

fn scope(op: &WeightedCompOp, schedule: &DepthSchedule) -> String {
    format!(
        "truncation depth {} ({} vertices), schedule {:?}",
        target_depth(op),
        op.phi().target().len(),
        schedule.depths()
    )
}

/// Per image depth `k = 0..=N`: `max_{|φ(v)| = k} term(ψ(v), k)`.
fn image_layers(op: &WeightedCompOp, term: impl Fn(f64, usize) -> f64) -> Vec<f64> {
    let t = op.phi().target();
    let mut layers = vec![0.0f64; t.truncation_depth() + 1];
    for (v, w) in op.phi().pairs() {
        let k = t.depth(w);
        layers[k] = layers[k].max(term(op.psi().get(v).abs(), k));
    }
    layers
}

/// `(d, sup_{|φ(v)| ≥ d} term)` at the schedule depths.
fn tail_at(layers: &[f64], schedule: &DepthSchedule) -> Vec<(usize, f64)> {
    schedule
        .depths()
        .iter()
        .map(|&d| (d, layers[d..].iter().copied().fold(0.0, f64::max)))
        .collect()
}

/// `(d, sup_{|φ(v)| ≤ d} term)` at the schedule depths.
fn head_at(layers: &[f64], schedule: &DepthSchedule) -> Vec<(usize, f64)> {
    schedule
        .depths()
        .iter()
        .map(|&d| (d, layers[..=d].iter().copied().fold(0.0, f64::max)))
        .collect()
}

/// `(d, sup_{v ∈ dom φ, |v| ≤ d'} |ψ(v)|)` with `d'` the schedule depth
/// rescaled to the source truncation.
fn psi_sup_profile(op: &WeightedCompOp, schedule: &DepthSchedule) -> Vec<(usize, f64)> {
    let s: &RootedTree = op.phi().source();
    let mut layers = vec![0.0f64; s.truncation_depth() + 1];
    for v in op.phi().domain().iter() {
        let k = s.depth(v);
        layers[k] = layers[k].max(op.psi().get(v).abs());
    }
    let (ns, nt) = (s.truncation_depth(), target_depth(op).max(1));
    schedule
        .depths()
        .iter()
        .map(|&d| {
            let ds = (d * ns).div_ceil(nt).min(ns);
            (d, layers[..=ds].iter().copied().fold(0.0, f64::max))
        })
        .collect()
}

fn frontier_sequence(layers: &[f64]) -> Vec<(usize, f64)> {
    layers.iter().copied().enumerate().skip(1).collect()
}

fn trend(positive: bool) -> Verdict {
    if positive {
        Verdict::TrendConsistent
    } else {
        Verdict::TrendInconsistent
    }
}

/// Bounded-below verdict shared by both spaces: needs `φ` onto the
/// truncation, then a profile of `min_{|w| ≤ d} sup_{φ⁻¹(w)} |ψ|` that stays
/// positive.
fn bounded_below(
    op: &WeightedCompOp,
    statement: Statement,
    schedule: &DepthSchedule,
    cfg: &ClassifyConfig,
) -> Certificate {
    let full = op.inf_preimage_sup_profile();
    let profile: Vec<(usize, f64)> = schedule.depths().iter().map(|&d| full[d]).collect();
    let cert = |v| Certificate::new(statement, v, scope(op, schedule)).with_profile(profile.clone());
    if let Some(w) = op.missed_vertex() {
        return cert(Verdict::Fails).with_witness(Witness::vertex("not in range of φ", w, None));
    }
    let (m, argmin) = op.inf_preimage_sup();
    let last = profile.last().map_or(m, |p| p.1);
    let verdict = if last < cfg.zero_tol || (last > 0.0 && cfg.vanishing_trend(&profile)) {
        Verdict::TrendInconsistent
    } else if cfg.flat(&profile) {
        Verdict::Holds
    } else {
        Verdict::TrendConsistent
    };
    let mut c = cert(verdict).with_witness(Witness::vertex(
        "vertex minimizing the preimage sup of |ψ|",
        argmin,
        Some(m),
    ));
    if statement == Statement::LipBoundedBelow {
        let b = op.j_lip_bracket();
        c = c.with_witness(Witness::Bracket {
            name: "injectivity modulus".into(),
            lower: b.lower,
            upper: b.upper,
        });
    } else {
        c = c.with_witness(Witness::value("injectivity modulus", op.j_linf()));
    }
    c
}

/// Certificates for `ψC_φ` on `L∞`: bounded, compact, isometry, bounded
/// below.
pub fn classify_linf(op: &WeightedCompOp, schedule: &DepthSchedule, cfg: &ClassifyConfig) -> Vec<Certificate> {
    let sc = scope(op, schedule);

    let sup_profile = psi_sup_profile(op, schedule);
    let dominating = head_at(&image_layers(op, |a, k| a * (1.0 + k as f64)), schedule);
    let own = cfg.bounded_trend(&sup_profile);
    let bounded = Certificate::new(
        Statement::LinfBounded,
        trend(own || cfg.bounded_trend(&dominating)),
        sc.clone(),
    )
    .with_profile(sup_profile)
    .with_witness(Witness::value("‖ψC_φ‖ = ‖ψ‖∞ on the truncation", op.linf_op_norm()));

    let layers = image_layers(op, |a, _| a);
    let tails = tail_at(&layers, schedule);
    let mut compact = match op.phi().finite_range_trend() {
        Some(fr) => Certificate::new(Statement::LinfCompact, Verdict::Holds, sc.clone())
            .with_witness(Witness::value("max image depth", fr.max_image_depth as f64))
            .with_witness(Witness::value(
                "range stabilized at source depth",
                fr.stabilized_at as f64,
            )),
        None => Certificate::new(Statement::LinfCompact, trend(cfg.vanishing_trend(&tails)), sc.clone()),
    };
    compact = compact.with_profile(tails).with_witness(Witness::Sequence {
        name: "max |ψ| on each image layer".into(),
        points: frontier_sequence(&layers),
    });

    let preimage_sups = op.inf_preimage_sup_profile();
    let isometry = op
        .isometry_check_linf()
        .with_profile(schedule.depths().iter().map(|&d| preimage_sups[d]).collect());
    let isometry = Certificate {
        scope: sc.clone(),
        ..isometry
    };

    vec![
        bounded,
        compact,
        isometry,
        bounded_below(op, Statement::LinfBoundedBelow, schedule, cfg),
    ]
}

/// Certificates for `ψC_φ : ℒ → L∞`: bounded, compact, not an isometry,
/// bounded below.
pub fn classify_lip(op: &WeightedCompOp, schedule: &DepthSchedule, cfg: &ClassifyConfig) -> Vec<Certificate> {
    let sc = scope(op, schedule);

    let weighted = head_at(&image_layers(op, |a, k| a * (1.0 + k as f64)), schedule);
    let b = op.lip_bounds();
    let bounded = Certificate::new(Statement::LipBounded, trend(cfg.bounded_trend(&weighted)), sc.clone())
        .with_profile(weighted)
        .with_witness(Witness::Bracket {
            name: "operator norm".into(),
            lower: b.lower,
            upper: b.upper,
        })
        .with_witness(Witness::value("operator norm on the truncation", op.lip_exact_norm()));

    let layers = image_layers(op, |a, k| a * k as f64);
    let tails = tail_at(&layers, schedule);
    let compact = match op.phi().finite_range_trend() {
        Some(fr) => Certificate::new(Statement::LipCompact, Verdict::Holds, sc.clone())
            .with_witness(Witness::value("max image depth", fr.max_image_depth as f64)),
        None => Certificate::new(Statement::LipCompact, trend(cfg.vanishing_trend(&tails)), sc.clone()),
    }
    .with_profile(tails)
    .with_witness(Witness::Sequence {
        name: "max |ψ||φ| on each image layer".into(),
        points: frontier_sequence(&layers),
    });

    let no_isometry = match op.isometry_check_lip() {
        Ok(c) => Certificate { scope: sc.clone(), ..c },
        Err(_) => Certificate::new(Statement::LipNoIsometry, Verdict::TrendConsistent, sc.clone())
            .with_witness(Witness::note("truncation too shallow for a depth witness")),
    };

    vec![
        bounded,
        compact,
        no_isometry,
        bounded_below(op, Statement::LipBoundedBelow, schedule, cfg),
    ]
}

/// One automatic consistency check between certificates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub linf: Vec<Certificate>,
    pub lip: Vec<Certificate>,
    pub cross_checks: Vec<CrossCheck>,
}

impl Analysis {
    pub fn certificate(&self, s: Statement) -> Option<&Certificate> {
        self.linf.iter().chain(&self.lip).find(|c| c.statement == s)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.cross_checks.iter().all(|c| c.passed)
    }
}

fn non_increasing(p: &[(usize, f64)]) -> bool {
    p.windows(2).all(|w| w[1].1 <= w[0].1)
}

fn non_decreasing(p: &[(usize, f64)]) -> bool {
    p.windows(2).all(|w| w[1].1 >= w[0].1)
}

/// Both certificate lists plus the cross-implication checks.
pub fn analyze(op: &WeightedCompOp, schedule: &DepthSchedule, cfg: &ClassifyConfig) -> Analysis {
    let linf = classify_linf(op, schedule, cfg);
    let lip = classify_lip(op, schedule, cfg);
    let get = |s| {
        linf.iter()
            .chain(&lip)
            .find(|c: &&Certificate| c.statement == s)
            .expect("all statements present")
    };
    let check = |name: &str, passed: bool| CrossCheck {
        name: name.into(),
        passed,
    };

    let iso = get(Statement::LinfIsometry);
    let below = get(Statement::LinfBoundedBelow);
    let lip_bounded = get(Statement::LipBounded);
    let linf_bounded = get(Statement::LinfBounded);
    let weighted_bounded = cfg.bounded_trend(&lip_bounded.depth_profile);
    let cross_checks = vec![
        check(
            "isometry on L∞ implies bounded below on L∞",
            iso.verdict != Verdict::Holds || below.verdict == Verdict::Holds,
        ),
        check(
            "bounded ψ(1+|φ|) profile: bounded on L∞ implies bounded from ℒ",
            !(linf_bounded.verdict.is_positive() && weighted_bounded) || lip_bounded.verdict.is_positive(),
        ),
        check(
            "bounded from ℒ implies bounded on L∞",
            !lip_bounded.verdict.is_positive() || linf_bounded.verdict.is_positive(),
        ),
        check(
            "compact and bounded below on L∞ exclude each other",
            !(get(Statement::LinfCompact).verdict.is_positive() && below.verdict == Verdict::Holds),
        ),
        check(
            "tail profiles are non-increasing",
            non_increasing(&get(Statement::LinfCompact).depth_profile)
                && non_increasing(&get(Statement::LipCompact).depth_profile),
        ),
        check(
            "per-depth suprema are non-decreasing",
            non_decreasing(&linf_bounded.depth_profile) && non_decreasing(&lip_bounded.depth_profile),
        ),
        check(
            "preimage-sup minima are non-increasing",
            non_increasing(&below.depth_profile),
        ),
    ];
    Analysis {
        linf,
        lip,
        cross_checks,
    }
}

/// The seven conditions on `C_φ` (`ψ ≡ 1`) that are all equivalent to
/// `φ` having finite range, each evaluated from its own quantity:
///
/// 1. bounded `ℒ → L∞` and 2. bounded `ℒ₀ → L∞`: growth of
///    `sup_{|φ(v)| ≤ d} (1 + |φ(v)|)`;
/// 3. compact on `L∞`: tails of `sup_{|φ(v)| ≥ d} 1`;
/// 4. compact `ℒ → L∞` and 5. compact `ℒ₀ → L∞`: tails of
///    `sup_{|φ(v)| ≥ d} |φ(v)|`;
/// 6. compact on `ℒ` and 7. finite range: stabilization of the range.
///
/// `ℒ₀` membership is not observable on a truncation, so items 2 and 5
/// share the `ℒ` quantities. Items disagreeing means a bug.
pub fn seven_equivalences(phi: &SelfMap, schedule: &DepthSchedule, cfg: &ClassifyConfig) -> Certificate {
    let op = WeightedCompOp::composition(phi.clone());
    let bounded_profile = head_at(&image_layers(&op, |_, k| 1.0 + k as f64), schedule);
    let linf_tails = tail_at(&image_layers(&op, |_, _| 1.0), schedule);
    let lip_tails = tail_at(&image_layers(&op, |_, k| k as f64), schedule);
    let finite = phi.finite_range_trend();

    let bounded = trend(cfg.bounded_trend(&bounded_profile));
    let range = if finite.is_some() {
        Verdict::Holds
    } else {
        Verdict::TrendInconsistent
    };
    let items = [
        ("(i) bounded ℒ → L∞", bounded),
        ("(ii) bounded ℒ₀ → L∞", bounded),
        ("(iii) compact on L∞", trend(cfg.vanishing_trend(&linf_tails))),
        ("(iv) compact ℒ → L∞", trend(cfg.vanishing_trend(&lip_tails))),
        ("(v) compact ℒ₀ → L∞", trend(cfg.vanishing_trend(&lip_tails))),
        ("(vi) compact on ℒ", range),
        ("(vii) finite range", range),
    ];
    let positives = items.iter().filter(|i| i.1.is_positive()).count();
    let verdict = match positives {
        7 if finite.is_some() => Verdict::Holds,
        7 => Verdict::TrendConsistent,
        _ => Verdict::TrendInconsistent,
    };
    let mut cert = Certificate::new(
        Statement::FiniteRangeEquivalences,
        verdict,
        format!(
            "truncation depth {}, schedule {:?}",
            phi.target().truncation_depth(),
            schedule.depths()
        ),
    )
    .with_profile(phi.range_profile().into_iter().map(|(d, m)| (d, m as f64)).collect());
    for (name, v) in items {
        cert = cert.with_witness(Witness::Item {
            name: name.into(),
            verdict: v,
        });
    }
    if positives != 0 && positives != 7 {
        cert = cert.with_witness(Witness::note(format!(
            "incoherent: {positives} of 7 items positive; the items are equivalent, so this is an implementation bug"
        )));
    }
    cert
}

/// Whether all item witnesses of an equivalence certificate agree.
pub fn is_coherent(cert: &Certificate) -> bool {
    let signs: Vec<bool> = cert
        .witnesses
        .iter()
        .filter_map(|w| match w {
            Witness::Item { verdict, .. } => Some(verdict.is_positive()),
            _ => None,
        })
        .collect();
    signs.iter().all(|&s| s) || signs.iter().all(|&s| !s)
}
