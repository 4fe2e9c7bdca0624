//! Self-maps, weights and the weighted composition operator
//! `ψC_φ f(v) = ψ(v) f(φ(v))`, with the closed-form norms, essential-norm
//! tails and minimum moduli for `L∞ → L∞` and `ℒ → L∞`.
//!
//! A [`SelfMap`] goes from a *source* truncation to a *target* truncation of
//! the same tree family. Test functions `f` live on the target; the
//! operator output and the weight `ψ` live on the source. For most maps the
//! two coincide. Maps such as `n ↦ 2n` on the integer line cannot be total
//! into a truncation of the same depth, so their source is cut shallower
//! (or restricted to a domain) instead of clipping images.

use std::sync::Arc;

use serde::Serialize;

use crate::certificate::{Certificate, Statement, Verdict, Witness};
use crate::error::{Error, Result};
use crate::func::{same_tree, VertexFunction};
use crate::tree::{Family, RootedTree, VertexId, VertexSet};

/// Tolerance for "equals 1" in isometry criteria.
pub const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SelfMap {
    source: Arc<RootedTree>,
    target: Arc<RootedTree>,
    images: Vec<Option<VertexId>>,
    domain: VertexSet,
    preimages: Vec<Vec<VertexId>>,
    injective: bool,
    surjective: bool,
}

/// Evidence that the range of a map stopped growing inside the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FiniteRange {
    /// `max |φ(v)|` over the domain.
    pub max_image_depth: usize,
    /// Shallowest source depth by which that maximum is attained.
    pub stabilized_at: usize,
}

impl SelfMap {
    /// Map from `source` into `target`; `None` marks vertices outside the
    /// domain. Images must lie in the target truncation.
    pub fn new(source: Arc<RootedTree>, target: Arc<RootedTree>, images: Vec<Option<VertexId>>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::InvalidParameter(format!(
                "map has {} entries for {} source vertices",
                images.len(),
                source.len()
            )));
        }
        let mut preimages = vec![Vec::new(); target.len()];
        let mut domain = Vec::new();
        for (i, img) in images.iter().enumerate() {
            if let Some(w) = *img {
                if !target.contains(w) {
                    return Err(Error::InvalidParameter(format!(
                        "image of vertex {i} is {w}, outside the target truncation of {} vertices",
                        target.len()
                    )));
                }
                preimages[w.0].push(VertexId(i));
                domain.push(VertexId(i));
            }
        }
        let injective = preimages.iter().all(|p| p.len() <= 1);
        let surjective = preimages.iter().all(|p| !p.is_empty());
        Ok(SelfMap {
            source,
            target,
            images,
            domain: VertexSet::from_unsorted(domain),
            preimages,
            injective,
            surjective,
        })
    }

    /// Total self-map of a single truncation.
    pub fn total(tree: &Arc<RootedTree>, images: Vec<VertexId>) -> Result<Self> {
        Self::new(tree.clone(), tree.clone(), images.into_iter().map(Some).collect())
    }

    pub fn from_fn(tree: &Arc<RootedTree>, f: impl Fn(VertexId) -> VertexId) -> Result<Self> {
        Self::total(tree, tree.vertices().map(f).collect())
    }

    pub fn identity(tree: &Arc<RootedTree>) -> Self {
        Self::from_fn(tree, |v| v).expect("identity is total")
    }

    pub fn constant(tree: &Arc<RootedTree>, c: VertexId) -> Result<Self> {
        tree.check(c)?;
        Self::from_fn(tree, |_| c)
    }

    /// `φ(n) = 2n` on the integer line, from the depth-`⌊N/2⌋` truncation
    /// into `target = {-N..N}`.
    pub fn double(target: &Arc<RootedTree>) -> Result<Self> {
        require_zline(target)?;
        let source = Arc::new(target.retruncate(target.truncation_depth() / 2)?);
        let images = source
            .vertices()
            .map(|v| target.zline_vertex(2 * source.zline_label(v).expect("zline")))
            .collect::<Vec<_>>();
        if images.iter().any(Option::is_none) {
            return Err(Error::Internal("double map left the target".into()));
        }
        Self::new(source, target.clone(), images)
    }

    /// The folding map of the integer line: `n ↦ n` for `n ≥ 0`, `n ↦ -n`
    /// for odd negative `n`, `n ↦ n/2` for even negative `n`.
    ///
    /// It is onto `{-N..N}` only from a deeper source, so the source is the
    /// depth-`2N` line restricted to the preimage of the target.
    pub fn zfold(target: &Arc<RootedTree>) -> Result<Self> {
        require_zline(target)?;
        let source = Arc::new(target.retruncate(2 * target.truncation_depth())?);
        let images = source
            .vertices()
            .map(|v| target.zline_vertex(zfold(source.zline_label(v).expect("zline"))))
            .collect();
        Self::new(source, target.clone(), images)
    }

    pub fn source(&self) -> &Arc<RootedTree> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RootedTree> {
        &self.target
    }

    pub fn image(&self, v: VertexId) -> Option<VertexId> {
        self.images[v.0]
    }

    pub fn images(&self) -> &[Option<VertexId>] {
        &self.images
    }

    pub fn domain(&self) -> &VertexSet {
        &self.domain
    }

    /// `φ⁻¹(w)` within the domain.
    pub fn preimage(&self, w: VertexId) -> &[VertexId] {
        &self.preimages[w.0]
    }

    /// Injective on the truncation.
    pub fn is_injective(&self) -> bool {
        self.injective
    }

    /// Onto the target truncation.
    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    /// Domain pairs `(v, φ(v))`.
    pub fn pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.domain
            .iter()
            .map(|v| (v, self.images[v.0].expect("domain vertex")))
    }

    pub fn image_depth(&self, v: VertexId) -> Option<usize> {
        self.images[v.0].map(|w| self.target.depth(w))
    }

    /// `(n, max_{|v| ≤ n} |φ(v)|)` over the source depths.
    pub fn range_profile(&self) -> Vec<(usize, usize)> {
        let mut per_layer = vec![0usize; self.source.truncation_depth() + 1];
        for (v, w) in self.pairs() {
            let d = self.source.depth(v);
            per_layer[d] = per_layer[d].max(self.target.depth(w));
        }
        let mut acc = 0;
        per_layer
            .into_iter()
            .enumerate()
            .map(|(n, m)| {
                acc = acc.max(m);
                (n, acc)
            })
            .collect()
    }

    /// `Some` when the range stays strictly inside the target truncation
    /// and stops growing before the deepest source layer.
    pub fn finite_range_trend(&self) -> Option<FiniteRange> {
        let profile = self.range_profile();
        let max_image_depth = profile.last().map_or(0, |p| p.1);
        let stabilized_at = profile.iter().find(|p| p.1 == max_image_depth).map_or(0, |p| p.0);
        (max_image_depth < self.target.truncation_depth() && stabilized_at < self.source.truncation_depth()).then_some(
            FiniteRange {
                max_image_depth,
                stabilized_at,
            },
        )
    }
}

fn require_zline(tree: &RootedTree) -> Result<()> {
    if *tree.family() == Family::Zline {
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "map is only defined on the integer line".into(),
        ))
    }
}

fn zfold(n: i64) -> i64 {
    if n >= 0 {
        n
    } else if n % 2 != 0 {
        -n
    } else {
        n / 2
    }
}

/// Weights used by the worked examples.
pub mod weights {
    use super::*;

    /// `ψ(n) = 0` on odd negative integers and 1 elsewhere; with the
    /// folding map this gives an isometry of `L∞`.
    pub fn zfold(tree: &Arc<RootedTree>) -> Result<VertexFunction> {
        require_zline(tree)?;
        VertexFunction::from_fn(tree, |v| {
            let n = tree.zline_label(v).expect("zline");
            if n < 0 && n % 2 != 0 {
                0.0
            } else {
                1.0
            }
        })
    }

    /// `ψ(n) = 1/n`, `ψ(0) = 1` on the integer line.
    pub fn reciprocal(tree: &Arc<RootedTree>) -> Result<VertexFunction> {
        require_zline(tree)?;
        VertexFunction::from_fn(tree, |v| match tree.zline_label(v).expect("zline") {
            0 => 1.0,
            n => 1.0 / n as f64,
        })
    }

    /// `ψ(v) = (|φ(v)| + 1)^(-power)` on the domain, 0 off it.
    pub fn inverse_image_depth(phi: &SelfMap, power: f64) -> Result<VertexFunction> {
        VertexFunction::from_fn(phi.source(), |v| {
            phi.image_depth(v).map_or(0.0, |d| (d as f64 + 1.0).powf(-power))
        })
    }

    /// `ψ(v) = (|v| + 1)^(-power)`.
    pub fn decay(tree: &Arc<RootedTree>, power: f64) -> Result<VertexFunction> {
        VertexFunction::from_fn(tree, |v| (tree.depth(v) as f64 + 1.0).powf(-power))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

/// A per-depth sequence of suprema with its least-squares slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailProfile {
    pub points: Vec<(usize, f64)>,
    pub slope: f64,
}

impl TailProfile {
    pub fn new(points: Vec<(usize, f64)>) -> Self {
        let slope = least_squares_slope(&points);
        TailProfile { points, slope }
    }

    pub fn last(&self) -> Option<f64> {
        self.points.last().map(|p| p.1)
    }
}

pub fn least_squares_slope(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 as f64 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// The pair `(ψ, φ)`.
#[derive(Debug, Clone)]
pub struct WeightedCompOp {
    psi: VertexFunction,
    phi: SelfMap,
}

/// How `ψC_φ : ℒ → L∞` fails to be an isometry.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonIsometryWitness {
    /// `w ∉ φ(T)`: `ψC_φ χ_w = 0` while `‖χ_w‖_ℒ = 1`.
    NotInRange { vertex: VertexId },
    /// `‖ψC_φ χ_w‖∞ = sup_{φ⁻¹(w)} |ψ| ≠ 1 = ‖χ_w‖_ℒ`.
    PreimageSupNotOne { vertex: VertexId, sup: f64 },
    /// `|w| > 1`: `‖ψC_φ F_N‖∞ ≥ |w|·sup_{φ⁻¹(w)} |ψ| = |w| > 1 = ‖F_N‖_ℒ`.
    NormExceedsOne { vertex: VertexId, lower_bound: f64 },
}

impl WeightedCompOp {
    pub fn new(psi: VertexFunction, phi: SelfMap) -> Result<Self> {
        if !same_tree(psi.tree(), phi.source()) {
            return Err(Error::TreeMismatch);
        }
        Ok(WeightedCompOp { psi, phi })
    }

    /// `C_φ`, i.e. `ψ ≡ 1`.
    pub fn composition(phi: SelfMap) -> Self {
        let psi = VertexFunction::constant(phi.source(), 1.0).expect("finite");
        WeightedCompOp { psi, phi }
    }

    /// `M_ψ`, i.e. `φ = id`.
    pub fn multiplication(psi: VertexFunction) -> Self {
        let phi = SelfMap::identity(psi.tree());
        WeightedCompOp { psi, phi }
    }

    pub fn psi(&self) -> &VertexFunction {
        &self.psi
    }

    pub fn phi(&self) -> &SelfMap {
        &self.phi
    }

    fn abs_psi(&self, v: VertexId) -> f64 {
        self.psi.get(v).abs()
    }

    fn target_depth(&self) -> usize {
        self.phi.target.truncation_depth()
    }

    /// `v ↦ ψ(v) f(φ(v))` on the domain; zero off the domain.
    pub fn apply(&self, f: &VertexFunction) -> Result<VertexFunction> {
        if !same_tree(f.tree(), self.phi.target()) {
            return Err(Error::TreeMismatch);
        }
        VertexFunction::from_fn(self.phi.source(), |v| match self.phi.image(v) {
            Some(w) => self.psi.get(v) * f.get(w),
            None => 0.0,
        })
    }

    fn sup_over_domain(&self, mut term: impl FnMut(VertexId, VertexId) -> Option<f64>) -> f64 {
        self.phi.pairs().filter_map(|(v, w)| term(v, w)).fold(0.0, f64::max)
    }

    /// `‖ψC_φ‖_{L∞→L∞} = ‖ψ‖∞`.
    pub fn linf_op_norm(&self) -> f64 {
        self.sup_over_domain(|v, _| Some(self.abs_psi(v)))
    }

    fn check_tail_depth(&self, n: usize) -> Result<()> {
        if n < self.target_depth() {
            Ok(())
        } else {
            Err(Error::DepthOutOfRange {
                depth: n,
                min: 0,
                max: self.target_depth().saturating_sub(1),
            })
        }
    }

    /// `sup_{|φ(v)| > n} |ψ(v)|`, the depth-`n` approximant of the
    /// essential norm on `L∞`; 0 on an empty index set.
    pub fn linf_ess_norm_tail(&self, n: usize) -> Result<f64> {
        self.check_tail_depth(n)?;
        let t = &self.phi.target;
        Ok(self.sup_over_domain(|v, w| (t.depth(w) > n).then(|| self.abs_psi(v))))
    }

    pub fn linf_ess_profile(&self) -> TailProfile {
        self.tail_profile(|v, _| self.abs_psi(v))
    }

    /// `(max{‖ψ‖∞, ‖ψ|φ|‖∞}, ‖ψ(1+|φ|)‖∞)`, the sandwich around
    /// `‖ψC_φ‖_{ℒ→L∞}`.
    pub fn lip_bounds(&self) -> Bracket {
        let t = &self.phi.target;
        let sup_psi = self.linf_op_norm();
        let sup_psi_phi = self.sup_over_domain(|v, w| Some(self.abs_psi(v) * t.depth(w) as f64));
        let upper = self.sup_over_domain(|v, w| Some(self.abs_psi(v) * (1.0 + t.depth(w) as f64)));
        Bracket {
            lower: sup_psi.max(sup_psi_phi),
            upper,
        }
    }

    /// `sup_v |ψ(v)|·max(1, |φ(v)|)`, exchanging the suprema over the unit
    /// ball and over `v`; `max(1, |w|)` is the norm of evaluation at `w`
    /// on the unit ball of `ℒ`, which the oracle module checks
    /// independently.
    pub fn lip_exact_norm(&self) -> f64 {
        let t = &self.phi.target;
        self.sup_over_domain(|v, w| Some(self.abs_psi(v) * (t.depth(w).max(1) as f64)))
    }

    /// `sup_{|φ(v)| > n} |ψ(v)||φ(v)|`; 0 on an empty index set.
    pub fn lip_ess_norm_tail(&self, n: usize) -> Result<f64> {
        self.check_tail_depth(n)?;
        let t = &self.phi.target;
        Ok(self.sup_over_domain(|v, w| {
            let d = t.depth(w);
            (d > n).then(|| self.abs_psi(v) * d as f64)
        }))
    }

    pub fn lip_ess_profile(&self) -> TailProfile {
        let t = self.phi.target.clone();
        self.tail_profile(move |v, w| self.abs_psi(v) * t.depth(w) as f64)
    }

    /// Tails `sup_{|φ(v)| > n} term(v, φ(v))` for `n = 0..N`, from one pass
    /// over the domain followed by suffix maxima.
    fn tail_profile(&self, term: impl Fn(VertexId, VertexId) -> f64) -> TailProfile {
        let n = self.target_depth();
        let mut per_layer = vec![0.0f64; n + 1];
        for (v, w) in self.phi.pairs() {
            let d = self.phi.target.depth(w);
            per_layer[d] = per_layer[d].max(term(v, w));
        }
        let mut tails = vec![0.0f64; n + 1];
        for k in (0..n).rev() {
            tails[k] = tails[k + 1].max(per_layer[k + 1]);
        }
        TailProfile::new((0..n).map(|k| (k, tails[k])).collect())
    }

    /// `sup_{v ∈ φ⁻¹(w)} |ψ(v)|`, `None` for an empty preimage.
    pub fn preimage_sup(&self, w: VertexId) -> Option<f64> {
        let pre = self.phi.preimage(w);
        (!pre.is_empty()).then(|| pre.iter().map(|&v| self.abs_psi(v)).fold(0.0, f64::max))
    }

    /// `inf_w sup_{φ⁻¹(w)} |ψ|` with its minimizing target vertex; an empty
    /// preimage counts as 0.
    pub fn inf_preimage_sup(&self) -> (f64, VertexId) {
        self.phi
            .target
            .vertices()
            .map(|w| (w, self.preimage_sup(w).unwrap_or(0.0)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(w, m)| (m, w))
            .expect("trees are non-empty")
    }

    /// Per target depth `d`: `min_{|w| ≤ d} sup_{φ⁻¹(w)} |ψ|`.
    pub fn inf_preimage_sup_profile(&self) -> Vec<(usize, f64)> {
        let t = &self.phi.target;
        let mut per_layer = vec![f64::INFINITY; t.truncation_depth() + 1];
        for w in t.vertices() {
            let d = t.depth(w);
            per_layer[d] = per_layer[d].min(self.preimage_sup(w).unwrap_or(0.0));
        }
        let mut acc = f64::INFINITY;
        per_layer
            .into_iter()
            .enumerate()
            .map(|(d, m)| {
                acc = acc.min(m);
                (d, acc)
            })
            .collect()
    }

    /// First target vertex outside the range, if any.
    pub fn missed_vertex(&self) -> Option<VertexId> {
        self.phi.target.vertices().find(|&w| self.phi.preimage(w).is_empty())
    }

    /// Injectivity modulus on `L∞`: 0 for non-surjective `φ`, otherwise
    /// `inf_w sup_{φ⁻¹(w)} |ψ|`.
    pub fn j_linf(&self) -> f64 {
        if self.phi.is_surjective() {
            self.inf_preimage_sup().0
        } else {
            0.0
        }
    }

    fn inf_abs_psi(&self) -> f64 {
        self.phi
            .domain()
            .iter()
            .map(|v| self.abs_psi(v))
            .fold(f64::INFINITY, f64::min)
    }

    /// Surjectivity modulus on `L∞`: 0 for non-injective `φ`, otherwise
    /// `inf_v |ψ(v)|`.
    pub fn k_linf(&self) -> f64 {
        if !self.phi.is_injective() || self.phi.domain().is_empty() {
            return 0.0;
        }
        self.inf_abs_psi()
    }

    /// `(M/3, M)` around the injectivity modulus of `ψC_φ : ℒ → L∞`.
    pub fn j_lip_bracket(&self) -> Bracket {
        let m = self.j_linf();
        Bracket {
            lower: m / 3.0,
            upper: m,
        }
    }

    /// Bracket around the surjectivity modulus of `ψC_φ : ℒ → L∞`:
    /// `(inf|ψ|/3, inf |ψ|(1+|φ|))` for injective `φ` and zero-free `ψ`,
    /// `(0, 0)` otherwise. The second component is the minimizing vertex
    /// of the upper bound.
    pub fn k_lip_bracket(&self) -> (Bracket, Option<VertexId>) {
        let zero = (Bracket { lower: 0.0, upper: 0.0 }, None);
        if !self.phi.is_injective() || self.phi.domain().is_empty() {
            return zero;
        }
        if self.phi.domain().iter().any(|v| self.psi.get(v) == 0.0) {
            return zero;
        }
        let t = &self.phi.target;
        let (argmin, upper) = self
            .phi
            .pairs()
            .map(|(v, w)| (v, self.abs_psi(v) * (1.0 + t.depth(w) as f64)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("non-empty domain");
        (
            Bracket {
                lower: self.inf_abs_psi() / 3.0,
                upper,
            },
            Some(argmin),
        )
    }

    fn scope(&self) -> String {
        format!(
            "target truncation depth {} ({} vertices), source depth {} ({} domain vertices)",
            self.phi.target.truncation_depth(),
            self.phi.target.len(),
            self.phi.source.truncation_depth(),
            self.phi.domain().len()
        )
    }

    /// Isometry on `L∞` of the truncation: `φ` onto the target and every
    /// preimage supremum equal to 1.
    pub fn isometry_check_linf(&self) -> Certificate {
        let cert = |v| Certificate::new(Statement::LinfIsometry, v, self.scope());
        if let Some(w) = self.missed_vertex() {
            return cert(Verdict::Fails).with_witness(Witness::vertex("not in range of φ", w, None));
        }
        for w in self.phi.target.vertices() {
            let s = self.preimage_sup(w).expect("surjective");
            if (s - 1.0).abs() > ISOMETRY_TOL {
                return cert(Verdict::Fails).with_witness(Witness::vertex(
                    "preimage sup of |ψ| differs from 1",
                    w,
                    Some(s),
                ));
            }
        }
        cert(Verdict::Holds).with_witness(Witness::note(
            "φ is onto the truncation and every preimage sup of |ψ| is 1",
        ))
    }

    /// The explicit reason `ψC_φ : ℒ → L∞` is not an isometry.
    pub fn non_isometry_witness(&self) -> Result<NonIsometryWitness> {
        let t = &self.phi.target;
        if t.truncation_depth() < 2 {
            return Err(Error::DepthOutOfRange {
                depth: t.truncation_depth(),
                min: 2,
                max: usize::MAX,
            });
        }
        if let Some(w) = self.missed_vertex() {
            return Ok(NonIsometryWitness::NotInRange { vertex: w });
        }
        for w in t.vertices() {
            let s = self.preimage_sup(w).expect("surjective");
            if (s - 1.0).abs() > ISOMETRY_TOL {
                return Ok(NonIsometryWitness::PreimageSupNotOne { vertex: w, sup: s });
            }
        }
        let w = t.vertices().find(|&w| t.depth(w) > 1).expect("depth >= 2");
        let lower_bound = t.depth(w) as f64 * self.preimage_sup(w).expect("surjective");
        Ok(NonIsometryWitness::NormExceedsOne { vertex: w, lower_bound })
    }

    /// Always "not an isometry", with the witness that rules it out.
    pub fn isometry_check_lip(&self) -> Result<Certificate> {
        let witness = self.non_isometry_witness()?;
        let w = match &witness {
            NonIsometryWitness::NotInRange { vertex } => {
                Witness::vertex("not in range: ‖ψC_φ χ_w‖∞ = 0 while ‖χ_w‖_ℒ = 1", *vertex, Some(0.0))
            }
            NonIsometryWitness::PreimageSupNotOne { vertex, sup } => {
                Witness::vertex("‖ψC_φ χ_w‖∞ differs from ‖χ_w‖_ℒ = 1", *vertex, Some(*sup))
            }
            NonIsometryWitness::NormExceedsOne { vertex, lower_bound } => Witness::vertex(
                "|w| > 1 forces ‖ψC_φ‖ ≥ |w|·sup_{φ⁻¹(w)} |ψ| > 1",
                *vertex,
                Some(*lower_bound),
            ),
        };
        Ok(Certificate::new(Statement::LipNoIsometry, Verdict::Holds, self.scope()).with_witness(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zline(n: usize) -> Arc<RootedTree> {
        Arc::new(RootedTree::zline(n))
    }

    fn z(t: &RootedTree, n: i64) -> VertexId {
        t.zline_vertex(n).unwrap()
    }

    fn zfold_op(n: usize) -> WeightedCompOp {
        let t = zline(n);
        let phi = SelfMap::zfold(&t).unwrap();
        let psi = weights::zfold(phi.source()).unwrap();
        WeightedCompOp::new(psi, phi).unwrap()
    }

    #[test]
    fn identity_and_unit_weight_is_identity() {
        let t = zline(3);
        let op = WeightedCompOp::composition(SelfMap::identity(&t));
        let f = VertexFunction::from_fn(&t, |v| v.0 as f64 - 2.5).unwrap();
        assert_eq!(op.apply(&f).unwrap().values(), f.values());
    }

    #[test]
    fn apply_to_indicator_is_weight_on_preimage() {
        let t = Arc::new(RootedTree::homogeneous(2, 2).unwrap());
        let phi = SelfMap::from_fn(&t, |v| t.parent(v).unwrap_or(v)).unwrap();
        let psi = VertexFunction::from_fn(&t, |v| 0.5 + v.0 as f64).unwrap();
        let op = WeightedCompOp::new(psi.clone(), phi.clone()).unwrap();
        for w in t.vertices() {
            let out = op.apply(&VertexFunction::indicator(&t, w).unwrap()).unwrap();
            for v in t.vertices() {
                let expect = if phi.image(v) == Some(w) { psi.get(v) } else { 0.0 };
                assert_eq!(out.get(v), expect);
            }
        }
    }

    #[test]
    fn zfold_table() {
        let op = zfold_op(6);
        let src = op.phi().source();
        let tgt = op.phi().target();
        for n in -12i64..=12 {
            let v = z(src, n);
            let expect = if n >= 0 {
                n
            } else if n % 2 != 0 {
                -n
            } else {
                n / 2
            };
            let img = op.phi().image(v);
            if expect.abs() <= 6 {
                assert_eq!(img, Some(z(tgt, expect)), "n = {n}");
            } else {
                assert_eq!(img, None, "n = {n}");
            }
        }
        assert!(op.phi().is_surjective());
        assert!(!op.phi().is_injective());
    }

    #[test]
    fn zfold_on_identity_line_values() {
        let op = zfold_op(4);
        let tgt = op.phi().target().clone();
        let f = VertexFunction::from_fn(&tgt, |w| tgt.zline_label(w).unwrap() as f64).unwrap();
        let out = op.apply(&f).unwrap();
        let src = op.phi().source();
        for v in op.phi().domain().iter() {
            let img = tgt.zline_label(op.phi().image(v).unwrap()).unwrap() as f64;
            assert_eq!(out.get(v), op.psi().get(v) * img);
        }
        assert_eq!(out.get(z(src, 5)), 0.0, "outside the domain");
    }

    #[test]
    fn linf_norms() {
        let t = zline(4);
        let c = WeightedCompOp::composition(SelfMap::from_fn(&t, |v| t.parent(v).unwrap_or(v)).unwrap());
        assert_eq!(c.linf_op_norm(), 1.0);
        let psi = weights::decay(&t, 1.0).unwrap();
        let m = WeightedCompOp::multiplication(psi.clone());
        assert_eq!(m.linf_op_norm(), psi.sup_norm());
        assert_eq!(m.linf_op_norm(), 1.0);
    }

    #[test]
    fn linf_tails() {
        let t = zline(6);
        let constant = WeightedCompOp::composition(SelfMap::constant(&t, z(&t, -2)).unwrap());
        for n in 2..6 {
            assert_eq!(constant.linf_ess_norm_tail(n).unwrap(), 0.0);
        }
        let id = WeightedCompOp::composition(SelfMap::identity(&t));
        assert!(id.linf_ess_profile().points.iter().all(|p| p.1 == 1.0));
        assert!(id.linf_ess_norm_tail(6).is_err());

        // ψ(v) = 1/(1+|φ(v)|) with φ(n) = 2n: attained |φ| are even, so the
        // tail at n is 1/(1 + n') with n' the smallest even depth above n.
        let phi = SelfMap::double(&zline(8)).unwrap();
        let psi = weights::inverse_image_depth(&phi, 1.0).unwrap();
        let op = WeightedCompOp::new(psi, phi).unwrap();
        for n in 0..8usize {
            let next_even = if n % 2 == 0 { n + 2 } else { n + 1 };
            assert!((op.linf_ess_norm_tail(n).unwrap() - 1.0 / (1.0 + next_even as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn lip_bounds_examples() {
        let t = zline(4);
        let id = WeightedCompOp::composition(SelfMap::identity(&t));
        assert_eq!(id.lip_bounds(), Bracket { lower: 4.0, upper: 5.0 });
        assert_eq!(id.lip_exact_norm(), 4.0);

        let zero = WeightedCompOp::new(VertexFunction::zero(&t), SelfMap::identity(&t)).unwrap();
        assert_eq!(zero.lip_bounds(), Bracket { lower: 0.0, upper: 0.0 });
        assert_eq!(zero.lip_exact_norm(), 0.0);

        let phi = SelfMap::identity(&zline(10));
        let psi = weights::inverse_image_depth(&phi, 1.0).unwrap();
        let op = WeightedCompOp::new(psi, phi).unwrap();
        let b = op.lip_bounds();
        assert!((b.upper - 1.0).abs() < 1e-12);
        // ‖ψ‖∞ = 1 dominates sup ψ|φ| = 10/11.
        assert!((b.lower - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lip_exact_norm_with_root_weight() {
        let t = Arc::new(RootedTree::homogeneous(2, 3).unwrap());
        let deep = t.layer(3).unwrap().as_slice()[4];
        let psi = VertexFunction::indicator(&t, t.root()).unwrap();
        for target in [t.root(), t.children(t.root())[1], deep] {
            let phi = SelfMap::from_fn(&t, |v| if v == t.root() { target } else { v }).unwrap();
            let op = WeightedCompOp::new(psi.clone(), phi).unwrap();
            assert_eq!(op.lip_exact_norm(), t.depth(target).max(1) as f64);
        }
    }

    #[test]
    fn lip_tails_for_reciprocal_weights() {
        let phi = SelfMap::identity(&zline(12));
        let psi = weights::inverse_image_depth(&phi, 1.0).unwrap();
        let op = WeightedCompOp::new(psi, phi.clone()).unwrap();
        for (n, s) in op.lip_ess_profile().points {
            assert!(n < 12);
            assert!((s - 12.0 / 13.0).abs() < 1e-12);
        }
        let psi2 = weights::inverse_image_depth(&phi, 2.0).unwrap();
        let op2 = WeightedCompOp::new(psi2, phi).unwrap();
        for (n, s) in op2.lip_ess_profile().points {
            let k = (n + 1) as f64;
            assert!((s - k / (k + 1.0).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn moduli_on_linf() {
        let t = zline(3);
        let psi = VertexFunction::from_fn(&t, |v| 0.5 + v.0 as f64 / 10.0).unwrap();
        let m = WeightedCompOp::multiplication(psi.clone());
        assert_eq!(m.j_linf(), 0.5);
        assert_eq!(m.k_linf(), 0.5);

        assert_eq!(zfold_op(5).j_linf(), 1.0);

        let c = WeightedCompOp::composition(SelfMap::constant(&t, t.root()).unwrap());
        assert_eq!(c.j_linf(), 0.0);
        assert_eq!(c.k_linf(), 0.0);

        let inj = WeightedCompOp::composition(SelfMap::identity(&t));
        assert_eq!(inj.k_linf(), 1.0);

        let with_zero = psi.map(|x| if x == 0.5 { 0.0 } else { x }).unwrap();
        assert_eq!(WeightedCompOp::multiplication(with_zero).k_linf(), 0.0);
    }

    #[test]
    fn brackets_on_lip() {
        let zf = zfold_op(6);
        assert_eq!(
            zf.j_lip_bracket(),
            Bracket {
                lower: 1.0 / 3.0,
                upper: 1.0
            }
        );

        let t = zline(5);
        let c = WeightedCompOp::composition(SelfMap::constant(&t, t.root()).unwrap());
        assert_eq!(c.j_lip_bracket(), Bracket { lower: 0.0, upper: 0.0 });

        let half = WeightedCompOp::new(VertexFunction::constant(&t, 0.5).unwrap(), SelfMap::identity(&t)).unwrap();
        assert_eq!(
            half.j_lip_bracket(),
            Bracket {
                lower: 0.5 / 3.0,
                upper: 0.5
            }
        );

        let shift = SelfMap::from_fn(&t, |v| t.children(v).first().copied().unwrap_or(v)).unwrap();
        assert!(!shift.is_injective());
        let c_inj = WeightedCompOp::composition(SelfMap::identity(&t));
        assert_eq!(
            c_inj.k_lip_bracket().0,
            Bracket {
                lower: 1.0 / 3.0,
                upper: 1.0
            }
        );
    }

    #[test]
    fn doubling_example_brackets() {
        let phi = SelfMap::double(&zline(8)).unwrap();
        assert!(phi.is_injective());
        assert!(!phi.is_surjective());
        let psi = weights::reciprocal(phi.source()).unwrap();
        let op = WeightedCompOp::new(psi, phi).unwrap();
        let (b, argmin) = op.k_lip_bracket();
        assert!((b.lower - 0.25 / 3.0).abs() < 1e-15);
        assert_eq!(b.upper, 1.0);
        assert_eq!(argmin, Some(op.phi().source().root()));
    }

    #[test]
    fn isometry_on_linf() {
        for n in [4, 6, 8] {
            assert_eq!(zfold_op(n).isometry_check_linf().verdict, Verdict::Holds);
        }
        let t = zline(3);
        let unimodular = VertexFunction::from_fn(&t, |v| if v.0 % 2 == 0 { 1.0 } else { -1.0 }).unwrap();
        assert_eq!(
            WeightedCompOp::multiplication(unimodular).isometry_check_linf().verdict,
            Verdict::Holds
        );
        let half = WeightedCompOp::multiplication(VertexFunction::constant(&t, 0.5).unwrap());
        let cert = half.isometry_check_linf();
        assert_eq!(cert.verdict, Verdict::Fails);
        assert!(!cert.witnesses.is_empty());
    }

    #[test]
    fn no_isometry_into_linf_from_lip() {
        assert!(matches!(
            zfold_op(4).non_isometry_witness().unwrap(),
            NonIsometryWitness::NormExceedsOne { lower_bound, .. } if lower_bound == 2.0
        ));
        let t = zline(4);
        let c = WeightedCompOp::composition(SelfMap::constant(&t, t.root()).unwrap());
        assert!(matches!(
            c.non_isometry_witness().unwrap(),
            NonIsometryWitness::NotInRange { .. }
        ));
        let id = WeightedCompOp::composition(SelfMap::identity(&t));
        assert_eq!(id.isometry_check_lip().unwrap().verdict, Verdict::Holds);
        assert!(matches!(
            id.non_isometry_witness().unwrap(),
            NonIsometryWitness::NormExceedsOne { lower_bound, .. } if lower_bound == 2.0
        ));
        assert!(WeightedCompOp::composition(SelfMap::identity(&zline(1)))
            .isometry_check_lip()
            .is_err());
    }

    #[test]
    fn finite_range_detection() {
        let t = zline(8);
        let clamp = SelfMap::from_fn(&t, |v| {
            if t.depth(v) <= 3 {
                v
            } else {
                t.ancestor_at_depth(v, 3).unwrap()
            }
        })
        .unwrap();
        assert_eq!(
            clamp.finite_range_trend(),
            Some(FiniteRange {
                max_image_depth: 3,
                stabilized_at: 3
            })
        );
        assert_eq!(SelfMap::identity(&t).finite_range_trend(), None);
    }

    #[test]
    fn maps_out_of_truncation_are_rejected() {
        let t = zline(2);
        let err = SelfMap::total(&t, vec![VertexId(9); t.len()]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn slope() {
        assert_eq!(least_squares_slope(&[(0, 1.0), (1, 3.0), (2, 5.0)]), 2.0);
        assert_eq!(least_squares_slope(&[(3, 1.0)]), 0.0);
    }
}
