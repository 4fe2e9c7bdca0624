//! Brute-force checks of the closed forms on small truncations.
//!
//! Nothing here calls the norm or modulus formulas of [`crate::wco`] or the
//! norms of [`crate::func`]: the oracle reads raw weights, images and tree
//! adjacency and evaluates `‖ψC_φ f‖∞` and `‖f‖_ℒ` with its own loops.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::Witness;
use crate::error::{Error, Result};
use crate::func::VertexFunction;
use crate::tree::{RootedTree, VertexId};
use crate::wco::WeightedCompOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    OpNormLinf,
    OpNormLip,
    PointEvalNormLip,
    JLinfUpper,
    SurjInfeasibility,
    /// 1 when a grid function outside the range of `ψC_φ` exists, else 0.
    OutsideRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ExhaustiveSigns,
    GridRefine,
    PathExtremal,
    IncrementBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Feasibility {
    /// No function in the unit ball of `ℒ` is mapped onto the target.
    Infeasible,
    /// An explicit preimage in the unit ball was found.
    Feasible,
    /// The increment bound is inconclusive.
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub quantity: Quantity,
    pub value: f64,
    pub method: Method,
    /// Number of candidates examined (patterns, grid points, pairs).
    pub search_size: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremizer: Option<VertexFunction>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasibility: Option<Feasibility>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl OracleResult {
    fn new(quantity: Quantity, value: f64, method: Method, search_size: u64) -> Self {
        OracleResult {
            quantity,
            value,
            method,
            search_size,
            extremizer: None,
            witnesses: Vec::new(),
            feasibility: None,
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Vertex cap for exhaustive maximization.
    pub max_vertices_max_problem: usize,
    /// Vertex cap for exhaustive minimization.
    pub max_vertices_min_problem: usize,
    /// Cap on the number of grid patterns in one exhaustive search.
    pub max_patterns: u128,
    pub seed: u64,
    /// Random starts per grid point in `GridRefine`.
    pub grid_refine_starts: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_vertices_max_problem: 16,
            max_vertices_min_problem: 12,
            max_patterns: 50_000_000,
            seed: 0,
            grid_refine_starts: 3,
        }
    }
}

pub const SIGN_GRID: [f64; 3] = [-1.0, 0.0, 1.0];

/// `|f(o)| + max |f(v) - f(parent(v))|`, evaluated directly.
fn lip_norm_direct(tree: &RootedTree, values: &[f64]) -> f64 {
    let mut d_sup = 0.0f64;
    for v in tree.vertices() {
        if let Some(p) = tree.parent(v) {
            d_sup = d_sup.max((values[v.0] - values[p.0]).abs());
        }
    }
    values[tree.root().0].abs() + d_sup
}

/// Vertices in root-first order, independent of id labelling.
fn root_first(tree: &RootedTree) -> Vec<VertexId> {
    let mut order = Vec::with_capacity(tree.len());
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(tree.children(v).iter().rev().copied());
    }
    order
}

/// Weighted terms `|ψ(v)|` grouped by image position in the target.
struct Terms {
    by_target: Vec<Vec<f64>>,
}

impl Terms {
    fn new(op: &WeightedCompOp) -> Self {
        let mut by_target = vec![Vec::new(); op.phi().target().len()];
        for (v, img) in op.phi().images().iter().enumerate() {
            if let Some(w) = img {
                by_target[w.0].push(op.psi().values()[v].abs());
            }
        }
        Terms { by_target }
    }
}

struct Enumeration<'a> {
    terms: &'a Terms,
    grid_abs: Vec<f64>,
    unit: Vec<bool>,
    levels: usize,
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    index: u128,
}

impl Enumeration<'_> {
    /// Depth-first walk over all patterns with the first digits fixed.
    /// Partial maxima are carried down so each leaf costs one group scan.
    /// `minimize` switches to a pruned minimization: the running maximum
    /// only grows with depth, so branches at or above the incumbent cannot
    /// improve it.
    fn walk(&self, pos: usize, index: u128, running: f64, has_unit: bool, minimize: bool, best: &mut Option<Best>) {
        let n = self.terms.by_target.len();
        if pos == n {
            if !has_unit {
                return;
            }
            let better = match best {
                None => true,
                Some(b) if minimize => running < b.value,
                Some(b) => running > b.value,
            };
            if better {
                *best = Some(Best { value: running, index });
            }
            return;
        }
        for digit in 0..self.levels {
            let g = self.grid_abs[digit];
            let mut m = running;
            for &a in &self.terms.by_target[pos] {
                m = m.max(a * g);
            }
            if minimize {
                if let Some(b) = best {
                    if m >= b.value {
                        continue;
                    }
                }
            }
            self.walk(
                pos + 1,
                index * self.levels as u128 + digit as u128,
                m,
                has_unit || self.unit[digit],
                minimize,
                best,
            );
        }
    }

    fn decode(&self, mut index: u128, grid: &[f64]) -> Vec<f64> {
        let n = self.terms.by_target.len();
        let mut out = vec![0.0; n];
        for slot in out.iter_mut().rev() {
            *slot = grid[(index % self.levels as u128) as usize];
            index /= self.levels as u128;
        }
        out
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|g| g.is_nan() || g.abs() > 1.0) {
        return Err(Error::InvalidParameter("grid values must lie in [-1, 1]".into()));
    }
    if !grid.iter().any(|g| g.abs() == 1.0) {
        return Err(Error::InvalidParameter(
            "grid must contain ±1 to reach the unit sphere".into(),
        ));
    }
    Ok(())
}

fn pattern_count(levels: usize, n: usize, cap: u128) -> Result<u128> {
    let mut total: u128 = 1;
    for _ in 0..n {
        total = total.saturating_mul(levels as u128);
    }
    if total > cap {
        return Err(Error::SearchCapExceeded { size: total, cap });
    }
    Ok(total)
}

fn exhaustive<'a>(
    terms: &'a Terms,
    grid: &[f64],
    minimize: bool,
    seed_best: Option<Best>,
) -> (Option<Best>, Enumeration<'a>) {
    let e = Enumeration {
        terms,
        grid_abs: grid.iter().map(|g| g.abs()).collect(),
        unit: grid.iter().map(|g| g.abs() == 1.0).collect(),
        levels: grid.len(),
    };
    let n = terms.by_target.len();
    let split = n.min(2);
    let prefixes = pattern_count(grid.len(), split, u128::MAX).unwrap_or(1) as usize;
    let best = (0..prefixes)
        .into_par_iter()
        .map(|p| {
            let mut best = seed_best;
            let mut running = 0.0f64;
            let mut has_unit = false;
            let mut rest = p;
            let mut digits = vec![0usize; split];
            for d in digits.iter_mut().rev() {
                *d = rest % grid.len();
                rest /= grid.len();
            }
            let mut index: u128 = 0;
            for (pos, &d) in digits.iter().enumerate() {
                for &a in &terms.by_target[pos] {
                    running = running.max(a * e.grid_abs[d]);
                }
                has_unit |= e.unit[d];
                index = index * grid.len() as u128 + d as u128;
            }
            e.walk(split, index, running, has_unit, minimize, &mut best);
            best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some(x), Some(y)) => {
                    let x_wins = if minimize {
                        x.value < y.value || (x.value == y.value && x.index <= y.index)
                    } else {
                        x.value > y.value || (x.value == y.value && x.index <= y.index)
                    };
                    Some(if x_wins { x } else { y })
                }
            },
        );
    (best, e)
}

/// `max ‖ψC_φ f‖∞` over all grid-valued `f` on the target with `‖f‖∞ = 1`.
///
/// With the default `{-1, 0, 1}` grid this is the operator norm on `L∞`
/// for real scalars, because the extreme points of the unit ball have
/// `|f| ≡ 1`.
pub fn norm_oracle_linf(op: &WeightedCompOp, grid: &[f64], cfg: &OracleConfig) -> Result<OracleResult> {
    validate_grid(grid)?;
    let n = op.phi().target().len();
    if n > cfg.max_vertices_max_problem {
        return Err(Error::SearchCapExceeded {
            size: n as u128,
            cap: cfg.max_vertices_max_problem as u128,
        });
    }
    let total = pattern_count(grid.len(), n, cfg.max_patterns)?;
    let terms = Terms::new(op);
    let (best, e) = exhaustive(&terms, grid, false, None);
    let best = best.expect("the grid reaches the unit sphere");
    let mut out = OracleResult::new(Quantity::OpNormLinf, best.value, Method::ExhaustiveSigns, total as u64);
    out.extremizer = Some(VertexFunction::new(
        op.phi().target().clone(),
        e.decode(best.index, grid),
    )?);
    Ok(out)
}

/// Upper bound on the injectivity modulus on `L∞` from an exhaustive
/// search, paired with the formula value it must dominate.
#[derive(Debug, Clone, Serialize)]
pub struct JBracket {
    /// `min ‖ψC_φ f‖∞` over grid functions on the unit sphere.
    pub upper: f64,
    /// `inf_w sup_{φ⁻¹(w)} |ψ|` (0 for non-surjective `φ`).
    pub lower: f64,
    pub gap: f64,
    pub search: OracleResult,
}

/// Exhaustive minimization of `‖ψC_φ f‖∞` over the `levels`-point grid on
/// `[-1, 1]`; the indicators `χ_w` are always among the candidates.
pub fn j_oracle_linf_bracket(op: &WeightedCompOp, levels: usize, cfg: &OracleConfig) -> Result<JBracket> {
    if levels < 3 || levels.is_multiple_of(2) {
        return Err(Error::InvalidParameter("grid levels must be odd and at least 3".into()));
    }
    let grid: Vec<f64> = (0..levels)
        .map(|i| -1.0 + 2.0 * i as f64 / (levels - 1) as f64)
        .collect();
    let n = op.phi().target().len();
    if n > cfg.max_vertices_min_problem {
        return Err(Error::SearchCapExceeded {
            size: n as u128,
            cap: cfg.max_vertices_min_problem as u128,
        });
    }
    let total = pattern_count(levels, n, cfg.max_patterns)?;

    // Indicator candidates first; they seed the pruning bound.
    let terms = Terms::new(op);
    let one = levels - 1;
    let zero = levels / 2;
    let mut seed: Option<Best> = None;
    for w in 0..n {
        let value = terms.by_target[w].iter().fold(0.0f64, |m, &a| m.max(a));
        let mut index: u128 = 0;
        for pos in 0..n {
            index = index * levels as u128 + if pos == w { one } else { zero } as u128;
        }
        let better = seed.is_none_or(|b| value < b.value || (value == b.value && index < b.index));
        if better {
            seed = Some(Best { value, index });
        }
    }
    let seed = seed.expect("trees are non-empty");
    let (best, e) = exhaustive(&terms, &grid, true, Some(seed));
    let best = best.unwrap_or(seed);

    let mut search = OracleResult::new(Quantity::JLinfUpper, best.value, Method::ExhaustiveSigns, total as u64);
    search.extremizer = Some(VertexFunction::new(
        op.phi().target().clone(),
        e.decode(best.index, &grid),
    )?);
    let lower = op.j_linf();
    if best.value < lower - 1e-9 {
        return Err(Error::Internal(format!(
            "oracle found ‖ψC_φ f‖∞ = {} below the formula value {lower}",
            best.value
        )));
    }
    Ok(JBracket {
        upper: best.value,
        lower,
        gap: best.value - lower,
        search,
    })
}

/// Ways to maximize `|f(w)|` over the unit ball of `ℒ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointEvalMethod {
    /// One-parameter family supported on the root path to `w`.
    PathExtremal,
    /// Grid over the split between `|f(o)|` and `‖Df‖∞`, with coordinate
    /// relaxation on all vertex values from random starts.
    GridRefine,
}

/// `sup { |f(w)| : ‖f‖_ℒ ≤ 1 }` on the truncation.
pub fn point_eval_lip_norm(
    tree: &Arc<RootedTree>,
    w: VertexId,
    method: PointEvalMethod,
    cfg: &OracleConfig,
) -> Result<OracleResult> {
    tree.check(w)?;
    match method {
        PointEvalMethod::PathExtremal => point_eval_path(tree, w),
        PointEvalMethod::GridRefine => point_eval_grid(tree, w, cfg),
    }
}

fn point_eval_path(tree: &Arc<RootedTree>, w: VertexId) -> Result<OracleResult> {
    // Position along the root path to w of each path vertex.
    let mut on_path = vec![None; tree.len()];
    let mut path = vec![w];
    while let Some(p) = tree.parent(*path.last().expect("non-empty")) {
        path.push(p);
    }
    path.reverse();
    for (k, v) in path.iter().enumerate() {
        on_path[v.0] = Some(k);
    }
    // Off the path a vertex copies the position of its deepest path ancestor.
    let mut steps = vec![0usize; tree.len()];
    for v in root_first(tree) {
        steps[v.0] = match (on_path[v.0], tree.parent(v)) {
            (Some(k), _) => k,
            (None, Some(p)) => steps[p.0],
            (None, None) => 0,
        };
    }
    let family = |a: f64| -> Vec<f64> { steps.iter().map(|&k| a + (1.0 - a) * k as f64).collect() };
    let mut best = (f64::NEG_INFINITY, 0.0);
    let samples = 101;
    for i in 0..samples {
        let a = i as f64 / (samples - 1) as f64;
        let value = family(a)[w.0];
        if value > best.0 {
            best = (value, a);
        }
    }
    let f = family(best.1);
    let norm = lip_norm_direct(tree, &f);
    if norm > 1.0 + 1e-9 {
        return Err(Error::Internal(format!(
            "path extremal left the unit ball: ‖f‖_ℒ = {norm}"
        )));
    }
    let mut out = OracleResult::new(Quantity::PointEvalNormLip, best.0, Method::PathExtremal, samples);
    out.extremizer = Some(VertexFunction::new(tree.clone(), f)?);
    out.witnesses.push(Witness::value("root value a", best.1));
    Ok(out)
}

/// Greatest `f` with `|f(o)| ≤ s` and `|f(u) - f(v)| ≤ 1 - s` on edges.
///
/// Starts from `start` shifted above every feasible value (those are at most
/// `1 + depth`) and lowers one coordinate at a time to the tightest
/// neighbor constraint until nothing moves.
fn relax_from_above(tree: &RootedTree, s: f64, start: &[f64]) -> Vec<f64> {
    let t = 1.0 - s;
    let lift = tree.truncation_depth() as f64 + 2.0;
    let mut f: Vec<f64> = start.iter().map(|x| x.abs() + lift).collect();
    for _ in 0..tree.len() + 1 {
        let mut changed = false;
        for v in tree.vertices() {
            let mut cap = if v == tree.root() { s } else { f64::INFINITY };
            for u in tree.neighbors(v) {
                cap = cap.min(f[u.0] + t);
            }
            if cap < f[v.0] {
                f[v.0] = cap;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    f
}

fn point_eval_grid(tree: &Arc<RootedTree>, w: VertexId, cfg: &OracleConfig) -> Result<OracleResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (w.0 as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut evaluations = 0u64;
    let mut solve = |s: f64, rng: &mut ChaCha8Rng| -> (f64, Vec<f64>) {
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for _ in 0..cfg.grid_refine_starts.max(1) {
            let start: Vec<f64> = (0..tree.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let f = relax_from_above(tree, s, &start);
            evaluations += 1;
            if f[w.0] > best.0 {
                best = (f[w.0], f);
            }
        }
        best
    };
    let mut best_s = 0.0;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for i in 0..=10 {
        let s = i as f64 / 10.0;
        let r = solve(s, &mut rng);
        if r.0 > best.0 {
            best = r;
            best_s = s;
        }
    }
    let mut step = 0.1;
    for _ in 0..6 {
        step /= 4.0;
        let centre = best_s;
        for k in -2i32..=2 {
            let s = (centre + k as f64 * step).clamp(0.0, 1.0);
            let r = solve(s, &mut rng);
            if r.0 > best.0 {
                best = r;
                best_s = s;
            }
        }
    }
    let norm = lip_norm_direct(tree, &best.1);
    if norm > 1.0 + 1e-9 {
        return Err(Error::Internal(format!(
            "relaxation left the unit ball: ‖f‖_ℒ = {norm}"
        )));
    }
    let mut out = OracleResult::new(Quantity::PointEvalNormLip, best.0, Method::GridRefine, evaluations);
    out.extremizer = Some(VertexFunction::new(tree.clone(), best.1)?);
    out.witnesses.push(Witness::value("root budget s", best_s));
    Ok(out)
}

/// `‖ψC_φ‖_{ℒ→L∞} = sup_v |ψ(v)| · sup_{‖f‖_ℒ ≤ 1} |f(φ(v))|`, with the
/// inner supremum from the path-extremal point evaluation.
pub fn norm_oracle_lip(op: &WeightedCompOp, cfg: &OracleConfig) -> Result<OracleResult> {
    let target = op.phi().target();
    let mut cache: Vec<Option<OracleResult>> = vec![None; target.len()];
    let mut best: Option<(f64, VertexId)> = None;
    for (v, img) in op.phi().images().iter().enumerate() {
        let Some(w) = *img else { continue };
        if cache[w.0].is_none() {
            cache[w.0] = Some(point_eval_lip_norm(target, w, PointEvalMethod::PathExtremal, cfg)?);
        }
        let value = op.psi().values()[v].abs() * cache[w.0].as_ref().expect("cached").value;
        if best.is_none_or(|b| value > b.0) {
            best = Some((value, w));
        }
    }
    let evaluated = cache.iter().filter(|c| c.is_some()).count() as u64;
    let Some((value, w)) = best else {
        let mut out = OracleResult::new(Quantity::OpNormLip, 0.0, Method::PathExtremal, 0);
        out.notes.push("empty domain".into());
        return Ok(out);
    };
    let mut out = OracleResult::new(Quantity::OpNormLip, value, Method::PathExtremal, evaluated);
    out.extremizer = cache[w.0].take().and_then(|r| r.extremizer);
    out.witnesses
        .push(Witness::vertex("image vertex attaining the norm", w, Some(value)));
    out.notes.push(
        "sup over the unit ball and sup over vertices commute (both are suprema of |ψ(v) f(φ(v))|), so the exchange is exact"
            .into(),
    );
    Ok(out)
}

/// Try to certify that `g` has no preimage under `ψC_φ` in the unit ball
/// of `ℒ`.
///
/// For injective `φ` the values of a preimage on the range are forced:
/// `f(φ(v)) = g(v)/ψ(v)`. Any interpolant then has
/// `‖Df‖∞ ≥ |f(u) - f(u')| / d(u, u')` for forced `u, u'`, so a quotient
/// above 1 proves infeasibility. The test is sound but incomplete.
///
/// A `hint` that is a genuine preimage in the unit ball is reported as
/// feasible; the bound never contradicts it.
pub fn surjectivity_infeasibility(
    op: &WeightedCompOp,
    g: &VertexFunction,
    hint: Option<&VertexFunction>,
) -> Result<OracleResult> {
    let phi = op.phi();
    if !phi.is_injective() {
        return Err(Error::InvalidParameter(
            "infeasibility test needs an injective map".into(),
        ));
    }
    if !Arc::ptr_eq(g.tree(), phi.source()) && **g.tree() != **phi.source() {
        return Err(Error::TreeMismatch);
    }
    let target = phi.target();
    let mut forced: Vec<Option<f64>> = vec![None; target.len()];
    for (v, img) in phi.images().iter().enumerate() {
        let Some(w) = *img else { continue };
        let psi = op.psi().values()[v];
        let gv = g.values()[v];
        if psi == 0.0 {
            if gv != 0.0 {
                return Err(Error::ForcedValue {
                    vertex: VertexId(v),
                    target: gv,
                });
            }
            continue;
        }
        forced[w.0] = Some(gv / psi);
    }
    let points: Vec<(VertexId, f64)> = forced
        .iter()
        .enumerate()
        .filter_map(|(i, x)| x.map(|x| (VertexId(i), x)))
        .collect();

    let mut best: Option<(f64, VertexId, VertexId)> = None;
    let mut violating = 0u64;
    let mut first_violation: Option<(f64, VertexId, VertexId)> = None;
    let mut pairs = 0u64;
    for (i, &(u, fu)) in points.iter().enumerate() {
        for &(u2, fu2) in &points[i + 1..] {
            pairs += 1;
            let q = (fu - fu2).abs() / target.distance(u, u2)? as f64;
            if q > 1.0 + 1e-12 {
                violating += 1;
                if first_violation.is_none() {
                    first_violation = Some((q, u, u2));
                }
            }
            if best.is_none_or(|b| q > b.0) {
                best = Some((q, u, u2));
            }
        }
    }
    let bound = best.map_or(0.0, |b| b.0);
    let mut out = OracleResult::new(Quantity::SurjInfeasibility, bound, Method::IncrementBound, pairs);
    if let Some((q, a, b)) = best {
        out.witnesses.push(Witness::Pair {
            role: "forced pair with the largest increment quotient".into(),
            first: a,
            second: b,
            value: q,
        });
    }
    if let Some((q, a, b)) = first_violation {
        out.witnesses.push(Witness::Pair {
            role: "first forced pair with quotient above 1".into(),
            first: a,
            second: b,
            value: q,
        });
    }
    out.witnesses
        .push(Witness::value("forced pairs with quotient above 1", violating as f64));
    out.notes
        .push("lower bound on ‖Df‖∞ of every interpolant by telescoping along the path; sound but incomplete".into());

    // Candidate interpolant: forced values where set, parent's value elsewhere.
    let mut fill = vec![0.0; target.len()];
    for v in root_first(target) {
        fill[v.0] = forced[v.0].unwrap_or_else(|| target.parent(v).map_or(0.0, |p| fill[p.0]));
    }
    let fill_norm = lip_norm_direct(target, &fill);

    let hint_ok = match hint {
        Some(h) => {
            let maps_onto = phi
                .images()
                .iter()
                .enumerate()
                .filter_map(|(v, img)| img.map(|w| (v, w)))
                .all(|(v, w)| (op.psi().values()[v] * h.values()[w.0] - g.values()[v]).abs() <= 1e-9);
            maps_onto && lip_norm_direct(target, h.values()) <= 1.0 + 1e-9
        }
        None => false,
    };

    out.feasibility = Some(if bound > 1.0 + 1e-12 {
        if hint_ok {
            return Err(Error::Internal(
                "increment bound contradicts a feasible preimage".into(),
            ));
        }
        Feasibility::Infeasible
    } else if hint_ok {
        out.extremizer = hint.cloned();
        out.notes.push("supplied preimage lies in the unit ball".into());
        Feasibility::Feasible
    } else if fill_norm <= 1.0 + 1e-12 {
        out.extremizer = Some(VertexFunction::new(target.clone(), fill)?);
        out.witnesses
            .push(Witness::value("‖f‖_ℒ of the constructed preimage", fill_norm));
        Feasibility::Feasible
    } else {
        Feasibility::Undetermined
    });
    Ok(out)
}

/// Whether `g` on the source equals `ψ·(f∘φ)` for some `f` on the target.
fn in_range(images: &[Option<VertexId>], psi: &[f64], g: &[f64], forced: &mut [Option<f64>]) -> bool {
    forced.iter_mut().for_each(|x| *x = None);
    for (v, img) in images.iter().enumerate() {
        match *img {
            None => {
                if g[v] != 0.0 {
                    return false;
                }
            }
            Some(w) => {
                if psi[v] == 0.0 {
                    if g[v] != 0.0 {
                        return false;
                    }
                    continue;
                }
                let q = g[v] / psi[v];
                match forced[w.0] {
                    Some(prev) if (prev - q).abs() > 1e-12 * prev.abs().max(1.0) => return false,
                    Some(_) => {}
                    None => forced[w.0] = Some(q),
                }
            }
        }
    }
    true
}

/// Exhaustive search over `{-1, 0, 1}`-valued `g` on the source for one
/// that is not `ψC_φ f` for any `f`. Finding one shows the operator is not
/// onto, so its surjectivity modulus is 0.
pub fn range_miss_search(op: &WeightedCompOp, cfg: &OracleConfig) -> Result<OracleResult> {
    let source = op.phi().source();
    let n = source.len();
    if n > cfg.max_vertices_min_problem {
        return Err(Error::SearchCapExceeded {
            size: n as u128,
            cap: cfg.max_vertices_min_problem as u128,
        });
    }
    let total = pattern_count(3, n, cfg.max_patterns)?;
    let images = op.phi().images();
    let psi = op.psi().values();
    let mut forced = vec![None; op.phi().target().len()];
    let mut digits = vec![0usize; n];
    let mut g = vec![-1.0; n];
    let mut examined = 0u64;
    loop {
        examined += 1;
        if !in_range(images, psi, &g, &mut forced) {
            let mut out = OracleResult::new(Quantity::OutsideRange, 1.0, Method::ExhaustiveSigns, examined);
            out.extremizer = Some(VertexFunction::new(source.clone(), g)?);
            out.notes.push("this g has no preimage of any norm".into());
            return Ok(out);
        }
        // Odometer over the last coordinate first.
        let mut pos = n;
        loop {
            if pos == 0 {
                let mut out = OracleResult::new(Quantity::OutsideRange, 0.0, Method::ExhaustiveSigns, total as u64);
                out.notes.push("every grid function is in the range".into());
                return Ok(out);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < 3 {
                g[pos] = SIGN_GRID[digits[pos]];
                break;
            }
            digits[pos] = 0;
            g[pos] = SIGN_GRID[0];
        }
    }
}

/// Smallest observed `‖ψC_φ f‖∞ / M` over sampled `f` on the unit sphere of
/// `ℒ`, where `M = inf_w sup_{φ⁻¹(w)} |ψ|`. Every ratio is at least `1/3`;
/// how close samples get is recorded without drawing a conclusion.
#[derive(Debug, Clone, Serialize)]
pub struct JLipRatioProbe {
    pub m: f64,
    pub min_ratio: f64,
    pub samples: u64,
}

pub fn j_lip_ratio_probe(op: &WeightedCompOp, samples: usize, seed: u64) -> Option<JLipRatioProbe> {
    let m = op.j_linf();
    if m <= 0.0 {
        return None;
    }
    let target = op.phi().target();
    let order = root_first(target);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eval = |f: &[f64]| -> f64 {
        let mut s = 0.0f64;
        for (v, img) in op.phi().images().iter().enumerate() {
            if let Some(w) = img {
                s = s.max((op.psi().values()[v] * f[w.0]).abs());
            }
        }
        s
    };
    let mut min_ratio = f64::INFINITY;
    let mut count = 0u64;
    let mut consider = |f: Vec<f64>| {
        let norm = lip_norm_direct(target, &f);
        if norm > 0.0 {
            let scaled: Vec<f64> = f.iter().map(|x| x / norm).collect();
            min_ratio = min_ratio.min(eval(&scaled) / m);
            count += 1;
        }
    };
    // Alternating function: |f(o)| = 1/3 and jumps of 2/3.
    let mut alt = vec![0.0; target.len()];
    for &v in &order {
        alt[v.0] = if target.depth(v).is_multiple_of(2) {
            1.0 / 3.0
        } else {
            -1.0 / 3.0
        };
    }
    consider(alt);
    for _ in 0..samples {
        let mut f = vec![0.0; target.len()];
        for &v in &order {
            f[v.0] = match target.parent(v) {
                None => rng.gen_range(-1.0..=1.0),
                Some(p) => f[p.0] + rng.gen_range(-1.0..=1.0),
            };
        }
        consider(f);
    }
    Some(JLipRatioProbe {
        m,
        min_ratio,
        samples: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wco::{weights, SelfMap};

    fn zline(n: usize) -> Arc<RootedTree> {
        Arc::new(RootedTree::zline(n))
    }

    #[test]
    fn linf_oracle_zero_and_constant() {
        let t = zline(2);
        let cfg = OracleConfig::default();
        let zero = WeightedCompOp::new(VertexFunction::zero(&t), SelfMap::identity(&t)).unwrap();
        assert_eq!(norm_oracle_linf(&zero, &SIGN_GRID, &cfg).unwrap().value, 0.0);

        let c = t.zline_vertex(-1).unwrap();
        let op = WeightedCompOp::composition(SelfMap::constant(&t, c).unwrap());
        let r = norm_oracle_linf(&op, &SIGN_GRID, &cfg).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.extremizer.unwrap().get(c).abs(), 1.0);
        assert_eq!(r.search_size, 243);
    }

    #[test]
    fn linf_oracle_refuses_large_trees() {
        let t = zline(8);
        let op = WeightedCompOp::composition(SelfMap::identity(&t));
        assert!(matches!(
            norm_oracle_linf(&op, &SIGN_GRID, &OracleConfig::default()),
            Err(Error::SearchCapExceeded { .. })
        ));
    }

    #[test]
    fn point_evaluation_small_cases() {
        let t = zline(4);
        let cfg = OracleConfig::default();
        for (n, expect) in [(0i64, 1.0), (1, 1.0), (-1, 1.0), (3, 3.0), (-4, 4.0)] {
            let w = t.zline_vertex(n).unwrap();
            for m in [PointEvalMethod::PathExtremal, PointEvalMethod::GridRefine] {
                let r = point_eval_lip_norm(&t, w, m, &cfg).unwrap();
                assert!((r.value - expect).abs() < 1e-9, "{m:?} at {n}: {}", r.value);
            }
        }
    }

    #[test]
    fn lip_oracle_on_identity() {
        let t = zline(4);
        let op = WeightedCompOp::composition(SelfMap::identity(&t));
        assert_eq!(norm_oracle_lip(&op, &OracleConfig::default()).unwrap().value, 4.0);
    }

    #[test]
    fn j_bracket_identity_has_no_gap() {
        let t = zline(2);
        let psi = VertexFunction::from_fn(&t, |v| 0.3 + 0.1 * v.0 as f64).unwrap();
        let op = WeightedCompOp::multiplication(psi);
        let b = j_oracle_linf_bracket(&op, 3, &OracleConfig::default()).unwrap();
        assert!((b.upper - 0.3).abs() < 1e-12);
        assert!(b.gap.abs() < 1e-9);
    }

    #[test]
    fn j_bracket_non_surjective_is_zero() {
        let t = zline(2);
        let op = WeightedCompOp::composition(SelfMap::constant(&t, t.root()).unwrap());
        let b = j_oracle_linf_bracket(&op, 3, &OracleConfig::default()).unwrap();
        assert_eq!((b.upper, b.lower), (0.0, 0.0));
        let f = b.search.extremizer.unwrap();
        assert_eq!(f.values().iter().filter(|x| **x != 0.0).count(), 1);
        assert_eq!(f.get(t.root()), 0.0);
    }

    fn doubling(n: usize) -> WeightedCompOp {
        let phi = SelfMap::double(&zline(n)).unwrap();
        let psi = weights::reciprocal(phi.source()).unwrap();
        WeightedCompOp::new(psi, phi).unwrap()
    }

    fn alternating(op: &WeightedCompOp, m: f64) -> VertexFunction {
        let s = op.phi().source().clone();
        VertexFunction::from_fn(&s, |v| m * if s.zline_label(v).unwrap() % 2 == 0 { 1.0 } else { -1.0 }).unwrap()
    }

    #[test]
    fn doubling_is_not_onto() {
        let op = doubling(8);
        let r = surjectivity_infeasibility(&op, &alternating(&op, 1.0), None).unwrap();
        assert_eq!(r.feasibility, Some(Feasibility::Infeasible));
        assert!((r.value - 3.5).abs() < 1e-12);

        let r0 = surjectivity_infeasibility(&op, &alternating(&op, 0.0), None).unwrap();
        assert_eq!(r0.feasibility, Some(Feasibility::Feasible));
    }

    #[test]
    fn identity_preimage_of_indicator() {
        let t = zline(3);
        let op = WeightedCompOp::composition(SelfMap::identity(&t));
        let w = t.zline_vertex(2).unwrap();
        let chi = VertexFunction::indicator(&t, w).unwrap();
        let r = surjectivity_infeasibility(&op, &chi, Some(&chi)).unwrap();
        assert_eq!(r.feasibility, Some(Feasibility::Feasible));
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn zero_weight_at_needed_vertex() {
        let t = zline(3);
        let psi = VertexFunction::indicator(&t, t.root()).unwrap();
        let op = WeightedCompOp::multiplication(psi);
        let g = VertexFunction::constant(&t, 0.5).unwrap();
        assert!(matches!(
            surjectivity_infeasibility(&op, &g, None),
            Err(Error::ForcedValue { .. })
        ));
    }

    #[test]
    fn range_miss() {
        let t = zline(2);
        let cfg = OracleConfig::default();
        let id = WeightedCompOp::composition(SelfMap::identity(&t));
        let r = range_miss_search(&id, &cfg).unwrap();
        assert_eq!((r.value, r.search_size), (0.0, 243));

        let c = WeightedCompOp::composition(SelfMap::constant(&t, t.root()).unwrap());
        assert_eq!(range_miss_search(&c, &cfg).unwrap().value, 1.0);

        let mut psi = vec![1.0; t.len()];
        psi[3] = 0.0;
        let m = WeightedCompOp::multiplication(VertexFunction::new(t.clone(), psi).unwrap());
        let r = range_miss_search(&m, &cfg).unwrap();
        assert_eq!(r.value, 1.0);
        assert_ne!(r.extremizer.unwrap().get(VertexId(3)), 0.0);
    }

    #[test]
    fn ratio_probe_respects_third() {
        let t = zline(4);
        let op = WeightedCompOp::composition(SelfMap::identity(&t));
        let p = j_lip_ratio_probe(&op, 200, 1).unwrap();
        assert!(p.min_ratio >= 1.0 / 3.0 - 1e-12);
        assert!(
            (p.min_ratio - 1.0 / 3.0).abs() < 1e-12,
            "alternating function is extremal here"
        );
    }
}
