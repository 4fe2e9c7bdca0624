//! Real functions on the vertices of a truncated tree, the discrete
//! derivative `Df(v) = f(v) - f(parent(v))` (zero at the root), the sup and
//! Lipschitz norms, and the special test functions used to probe operators.

use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tree::{RootedTree, VertexId};

#[derive(Debug, Clone)]
pub struct VertexFunction {
    tree: Arc<RootedTree>,
    values: Vec<f64>,
}

/// Norms of a function on the truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub sup_norm: f64,
    /// `|f(o)| + ‖Df‖∞`
    pub lip_norm: f64,
    pub value_at_root: f64,
    /// `‖Df‖∞`
    pub d_sup: f64,
    /// `(n, sup_{|v| > n} |Df(v)|)` for `n = 0..N`.
    pub tail_profile: Vec<(usize, f64)>,
}

impl NormReport {
    /// Whether the derivative tail is below `tol` at the deepest layer.
    /// This is evidence about the trend only, never membership in the
    /// little Lipschitz space of the infinite tree.
    pub fn little_lipschitz_trend(&self, tol: f64) -> bool {
        self.tail_profile.last().is_none_or(|&(_, s)| s < tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub holds: bool,
    /// Vertex with the smallest slack `|f(o)| + |v|‖Df‖∞ - |f(v)|`.
    pub worst_vertex: VertexId,
    pub slack: f64,
}

pub(crate) fn same_tree(a: &Arc<RootedTree>, b: &Arc<RootedTree>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl VertexFunction {
    pub fn new(tree: Arc<RootedTree>, values: Vec<f64>) -> Result<Self> {
        if values.len() != tree.len() {
            return Err(Error::InvalidParameter(format!(
                "function has {} values for {} vertices",
                values.len(),
                tree.len()
            )));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value at vertex {i}")));
        }
        Ok(VertexFunction { tree, values })
    }

    pub fn from_fn(tree: &Arc<RootedTree>, mut f: impl FnMut(VertexId) -> f64) -> Result<Self> {
        let values = tree.vertices().map(&mut f).collect();
        Self::new(tree.clone(), values)
    }

    pub fn zero(tree: &Arc<RootedTree>) -> Self {
        VertexFunction {
            tree: tree.clone(),
            values: vec![0.0; tree.len()],
        }
    }

    pub fn constant(tree: &Arc<RootedTree>, c: f64) -> Result<Self> {
        Self::new(tree.clone(), vec![c; tree.len()])
    }

    pub fn tree(&self) -> &Arc<RootedTree> {
        &self.tree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> f64 {
        self.values[v.0]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.tree.clone(), self.values.iter().map(|&x| f(x)).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_tree(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self::new(self.tree.clone(), values)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same_tree(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self::new(self.tree.clone(), values)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|x| c * x)
    }

    fn ensure_same_tree(&self, other: &Self) -> Result<()> {
        if same_tree(&self.tree, &other.tree) {
            Ok(())
        } else {
            Err(Error::TreeMismatch)
        }
    }

    /// `Df(v) = f(v) - f(v⁻)`, `Df(o) = 0`.
    pub fn derivative(&self) -> VertexFunction {
        let values = self
            .tree
            .vertices()
            .map(|v| match self.tree.parent(v) {
                Some(p) => self.values[v.0] - self.values[p.0],
                None => 0.0,
            })
            .collect();
        VertexFunction {
            tree: self.tree.clone(),
            values,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn lip_norm(&self) -> f64 {
        self.get(self.tree.root()).abs() + self.derivative().sup_norm()
    }

    pub fn norms(&self) -> NormReport {
        let d = self.derivative();
        let n = self.tree.truncation_depth();
        // Per-layer maxima of |Df|, then suffix maxima give the tails.
        let mut layer_max = vec![0.0f64; n + 1];
        for v in self.tree.vertices() {
            let k = self.tree.depth(v);
            layer_max[k] = layer_max[k].max(d.get(v).abs());
        }
        let mut tail = vec![0.0f64; n + 1];
        for k in (0..n).rev() {
            tail[k] = tail[k + 1].max(layer_max[k + 1]);
        }
        let value_at_root = self.get(self.tree.root());
        let d_sup = d.sup_norm();
        NormReport {
            sup_norm: self.sup_norm(),
            lip_norm: value_at_root.abs() + d_sup,
            value_at_root,
            d_sup,
            tail_profile: (0..n).map(|k| (k, tail[k])).collect(),
        }
    }

    /// Check `|f(v)| <= |f(o)| + |v|·‖Df‖∞` at every vertex.
    ///
    /// This is a theorem; a failing check means a bug upstream.
    pub fn growth_check(&self) -> GrowthCheck {
        let root = self.get(self.tree.root()).abs();
        let d_sup = self.derivative().sup_norm();
        let (worst_vertex, slack) = self
            .tree
            .vertices()
            .map(|v| (v, root + self.tree.depth(v) as f64 * d_sup - self.get(v).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("trees are non-empty");
        let scale = 1.0 + root + self.tree.truncation_depth() as f64 * d_sup;
        GrowthCheck {
            holds: slack >= -1e-12 * scale,
            worst_vertex,
            slack,
        }
    }

    /// `χ_w`, the indicator of the single vertex `w`.
    pub fn indicator(tree: &Arc<RootedTree>, w: VertexId) -> Result<Self> {
        tree.check(w)?;
        Self::from_fn(tree, |v| if v == w { 1.0 } else { 0.0 })
    }

    /// `η_v`, the indicator of the sector determined by `v`.
    pub fn sector_indicator(tree: &Arc<RootedTree>, v: VertexId) -> Result<Self> {
        let sector = tree.sector(v)?;
        Self::from_fn(tree, |u| if sector.contains(u) { 1.0 } else { 0.0 })
    }

    /// `F_N(v) = min(|v|, N)`.
    pub fn f_cap(tree: &Arc<RootedTree>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("F_N needs N >= 1".into()));
        }
        Self::from_fn(tree, |v| tree.depth(v).min(n) as f64)
    }

    /// The piecewise test function `g_{n,r}`: zero below depth `√n`, a
    /// `(r+1)`-power ramp up to depth `n`, and the plateau `n` beyond.
    pub fn g_test(tree: &Arc<RootedTree>, n: usize, r: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidParameter(format!("g_(n,r) needs n >= 4, got {n}")));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!("g_(n,r) needs r in (0,1), got {r}")));
        }
        if tree.truncation_depth() < n {
            return Err(Error::DepthOutOfRange {
                depth: n,
                min: 4,
                max: tree.truncation_depth(),
            });
        }
        let nf = n as f64;
        let root_n = nf.sqrt();
        let span = nf - root_n;
        Self::from_fn(tree, |v| {
            let d = tree.depth(v) as f64;
            if d < root_n {
                0.0
            } else if d < nf {
                nf / span * (d - root_n).powf(r + 1.0) / span.powf(r)
            } else {
                nf
            }
        })
    }

    /// `K_N f`: keep `f` up to depth `cut`, zero beyond.
    pub fn truncate(&self, cut: usize) -> Result<Self> {
        self.check_depth(cut)?;
        Self::from_fn(
            &self.tree,
            |v| if self.tree.depth(v) <= cut { self.get(v) } else { 0.0 },
        )
    }

    /// `K_n f`: keep `f` up to depth `cut`, beyond it repeat the value at
    /// the depth-`cut` ancestor.
    pub fn freeze(&self, cut: usize) -> Result<Self> {
        self.check_depth(cut)?;
        let mut values = self.values.clone();
        for v in self.tree.vertices() {
            if self.tree.depth(v) > cut {
                values[v.0] = self.get(self.tree.ancestor_at_depth(v, cut)?);
            }
        }
        Self::new(self.tree.clone(), values)
    }

    fn check_depth(&self, cut: usize) -> Result<()> {
        if cut > self.tree.truncation_depth() {
            Err(Error::DepthOutOfRange {
                depth: cut,
                min: 0,
                max: self.tree.truncation_depth(),
            })
        } else {
            Ok(())
        }
    }
}

/// Closed form of `‖g_{n,r}‖_ℒ`, the largest increment of the ramp.
pub fn g_test_norm_closed_form(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    let x = nf - nf.sqrt();
    nf / x * (x.powf(r + 1.0) - (x - 1.0).powf(r + 1.0)) / x.powf(r)
}

/// Serialized in the table shape accepted by the function spec loader.
impl Serialize for VertexFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Values<'a>(&'a [f64]);
        impl Serialize for Values<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = serializer.serialize_map(Some(self.0.len()))?;
                for (i, x) in self.0.iter().enumerate() {
                    m.serialize_entry(&i.to_string(), x)?;
                }
                m.end()
            }
        }
        let mut m = serializer.serialize_map(Some(2))?;
        m.serialize_entry("kind", "table")?;
        m.serialize_entry("values", &Values(&self.values))?;
        m.end()
    }
}
