//! Rooted trees without terminal vertices, materialized to a finite depth.
//!
//! Every infinite family is represented by its truncation at depth `N`.
//! Vertices at depth `N` are *frontier* vertices: they have no children in
//! the truncation, which is an artifact of the cut and not a terminal of
//! the underlying tree.
//!
//! Generated families use dense ids in breadth-first order, so the
//! truncation at depth `M < N` of the same family is an id-prefix of the
//! truncation at depth `N`. The integer line uses the bijection
//! `0 -> 0`, `n -> 2n - 1` for `n > 0`, `n -> -2n` for `n < 0`.

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Strictly increasing list of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<VertexId>);

impl VertexSet {
    pub fn from_unsorted(mut ids: Vec<VertexId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Explicit,
    Homogeneous {
        q: usize,
    },
    Zline,
    Random {
        seed: u64,
        min_children: usize,
        max_children: usize,
    },
}

/// JSON description of a tree.
///
/// ```json
/// {"family": "homogeneous", "depth": 3, "q": 2}
/// {"family": "explicit", "root": 0, "edges": [[0, 1], [1, 2]]}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", try_from = "RawTreeSpec")]
pub enum TreeSpec {
    Zline {
        depth: usize,
        #[serde(default, skip_serializing)]
        schema: Option<u32>,
    },
    Homogeneous {
        depth: usize,
        q: usize,
        #[serde(default, skip_serializing)]
        schema: Option<u32>,
    },
    Random {
        depth: usize,
        seed: u64,
        #[serde(default = "default_min_children")]
        min_children: usize,
        #[serde(default = "default_max_children")]
        max_children: usize,
        #[serde(default, skip_serializing)]
        schema: Option<u32>,
    },
    Explicit {
        root: usize,
        edges: Vec<[usize; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<usize>,
        #[serde(default, skip_serializing)]
        schema: Option<u32>,
    },
}

/// Flat form of [`TreeSpec`] so parse errors keep their field path and
/// line number.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTreeSpec {
    family: String,
    depth: Option<usize>,
    q: Option<usize>,
    seed: Option<u64>,
    min_children: Option<usize>,
    max_children: Option<usize>,
    root: Option<usize>,
    edges: Option<Vec<[usize; 2]>>,
    schema: Option<u32>,
}

impl TryFrom<RawTreeSpec> for TreeSpec {
    type Error = String;

    fn try_from(r: RawTreeSpec) -> std::result::Result<Self, String> {
        let family = r.family.as_str();
        let need = |x: Option<usize>, name: &str| x.ok_or_else(|| format!("family {family:?} needs field `{name}`"));
        let unused = |present: bool, name: &str| {
            if present {
                Err(format!("field `{name}` is not used by family {family:?}"))
            } else {
                Ok(())
            }
        };
        let spec = match family {
            "zline" => {
                unused(r.q.is_some(), "q")?;
                unused(
                    r.seed.is_some() || r.min_children.is_some() || r.max_children.is_some(),
                    "seed",
                )?;
                unused(r.root.is_some() || r.edges.is_some(), "edges")?;
                TreeSpec::Zline {
                    depth: need(r.depth, "depth")?,
                    schema: r.schema,
                }
            }
            "homogeneous" => {
                unused(
                    r.seed.is_some() || r.min_children.is_some() || r.max_children.is_some(),
                    "seed",
                )?;
                unused(r.root.is_some() || r.edges.is_some(), "edges")?;
                TreeSpec::Homogeneous {
                    depth: need(r.depth, "depth")?,
                    q: need(r.q, "q")?,
                    schema: r.schema,
                }
            }
            "random" => {
                unused(r.q.is_some(), "q")?;
                unused(r.root.is_some() || r.edges.is_some(), "edges")?;
                TreeSpec::Random {
                    depth: need(r.depth, "depth")?,
                    seed: r.seed.ok_or_else(|| format!("family {family:?} needs field `seed`"))?,
                    min_children: r.min_children.unwrap_or_else(default_min_children),
                    max_children: r.max_children.unwrap_or_else(default_max_children),
                    schema: r.schema,
                }
            }
            "explicit" => {
                unused(r.q.is_some(), "q")?;
                unused(
                    r.seed.is_some() || r.min_children.is_some() || r.max_children.is_some(),
                    "seed",
                )?;
                TreeSpec::Explicit {
                    root: need(r.root, "root")?,
                    edges: r
                        .edges
                        .ok_or_else(|| format!("family {family:?} needs field `edges`"))?,
                    depth: r.depth,
                    schema: r.schema,
                }
            }
            other => {
                return Err(format!(
                    "unknown family {other:?}; expected zline, homogeneous, random or explicit"
                ))
            }
        };
        Ok(spec)
    }
}

fn default_min_children() -> usize {
    1
}

fn default_max_children() -> usize {
    3
}

impl TreeSpec {
    pub fn zline(depth: usize) -> Self {
        TreeSpec::Zline { depth, schema: None }
    }

    pub fn homogeneous(q: usize, depth: usize) -> Self {
        TreeSpec::Homogeneous { depth, q, schema: None }
    }

    pub fn random(depth: usize, seed: u64, min_children: usize, max_children: usize) -> Self {
        TreeSpec::Random {
            depth,
            seed,
            min_children,
            max_children,
            schema: None,
        }
    }

    pub fn explicit(root: usize, edges: Vec<[usize; 2]>) -> Self {
        TreeSpec::Explicit {
            root,
            edges,
            depth: None,
            schema: None,
        }
    }

    fn schema(&self) -> Option<u32> {
        match self {
            TreeSpec::Zline { schema, .. }
            | TreeSpec::Homogeneous { schema, .. }
            | TreeSpec::Random { schema, .. }
            | TreeSpec::Explicit { schema, .. } => *schema,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    root: VertexId,
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    depth: Vec<usize>,
    layers: Vec<Vec<VertexId>>,
    truncation_depth: usize,
    family: Family,
}

/// Build a tree from its JSON spec.
pub fn build_tree(spec: &TreeSpec) -> Result<RootedTree> {
    if let Some(s) = spec.schema() {
        if s != 1 {
            return Err(Error::InvalidParameter(format!("unsupported schema version {s}")));
        }
    }
    match spec {
        TreeSpec::Zline { depth, .. } => Ok(RootedTree::zline(*depth)),
        TreeSpec::Homogeneous { depth, q, .. } => RootedTree::homogeneous(*q, *depth),
        TreeSpec::Random {
            depth,
            seed,
            min_children,
            max_children,
            ..
        } => RootedTree::random(*depth, *seed, *min_children, *max_children),
        TreeSpec::Explicit { root, edges, depth, .. } => RootedTree::explicit(*root, edges, *depth),
    }
}

impl RootedTree {
    /// Grow a tree breadth-first, asking `fanout` how many children each
    /// non-frontier vertex gets.
    fn grow(depth: usize, family: Family, mut fanout: impl FnMut(VertexId, usize) -> usize) -> Self {
        let mut parent = vec![None];
        let mut children: Vec<Vec<VertexId>> = vec![Vec::new()];
        let mut depths = vec![0usize];
        let mut queue = VecDeque::from([VertexId(0)]);
        while let Some(v) = queue.pop_front() {
            let d = depths[v.0];
            if d == depth {
                continue;
            }
            let k = fanout(v, d);
            for _ in 0..k {
                let c = VertexId(parent.len());
                parent.push(Some(v));
                children.push(Vec::new());
                depths.push(d + 1);
                children[v.0].push(c);
                queue.push_back(c);
            }
        }
        Self::assemble(VertexId(0), parent, children, depths, depth, family)
    }

    fn assemble(
        root: VertexId,
        parent: Vec<Option<VertexId>>,
        mut children: Vec<Vec<VertexId>>,
        depth: Vec<usize>,
        truncation_depth: usize,
        family: Family,
    ) -> Self {
        for c in &mut children {
            c.sort_unstable();
        }
        let mut layers = vec![Vec::new(); truncation_depth + 1];
        for (i, &d) in depth.iter().enumerate() {
            layers[d].push(VertexId(i));
        }
        RootedTree {
            root,
            parent,
            children,
            depth,
            layers,
            truncation_depth,
            family,
        }
    }

    /// The integer line `{-N..N}` rooted at 0 with parent `n - sign(n)`.
    pub fn zline(depth: usize) -> Self {
        Self::grow(depth, Family::Zline, |v, _| if v.0 == 0 { 2 } else { 1 })
    }

    /// Homogeneous tree of degree `q + 1`: the root has `q + 1` children and
    /// every other vertex has `q`.
    pub fn homogeneous(q: usize, depth: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!(
                "homogeneous tree needs q >= 2, got {q}"
            )));
        }
        Ok(Self::grow(depth, Family::Homogeneous { q }, |v, _| {
            if v.0 == 0 {
                q + 1
            } else {
                q
            }
        }))
    }

    /// Random tree whose interior vertices have between `min_children` and
    /// `max_children` children, deterministic in `seed`.
    pub fn random(depth: usize, seed: u64, min_children: usize, max_children: usize) -> Result<Self> {
        if min_children == 0 || max_children < min_children {
            return Err(Error::InvalidParameter(format!(
                "children bounds must satisfy 1 <= min <= max, got {min_children}..={max_children}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let family = Family::Random {
            seed,
            min_children,
            max_children,
        };
        Ok(Self::grow(depth, family, |_, _| {
            rng.gen_range(min_children..=max_children)
        }))
    }

    /// Tree from an undirected edge list over the dense ids `0..n`.
    ///
    /// When `depth` is omitted the truncation depth is the largest depth
    /// present. Every vertex above the truncation depth must have a child.
    pub fn explicit(root: usize, edges: &[[usize; 2]], depth: Option<usize>) -> Result<Self> {
        let n = edges
            .iter()
            .flat_map(|e| e.iter().copied())
            .max()
            .map_or(1, |m| m + 1)
            .max(root + 1);
        if edges.len() + 1 != n {
            return Err(Error::Structural(format!(
                "{} vertices need exactly {} edges, got {}",
                n,
                n - 1,
                edges.len()
            )));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &[u, v] in edges {
            if u == v {
                return Err(Error::Structural(format!("loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut parent = vec![None; n];
        let mut depths = vec![usize::MAX; n];
        let mut children: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        depths[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if depths[w] == usize::MAX {
                    depths[w] = depths[u] + 1;
                    parent[w] = Some(VertexId(u));
                    children[u].push(VertexId(w));
                    queue.push_back(w);
                } else if parent[u] != Some(VertexId(w)) {
                    return Err(Error::Structural(format!("cycle through edge [{u}, {w}]")));
                }
            }
        }
        if let Some(missing) = depths.iter().position(|&d| d == usize::MAX) {
            return Err(Error::Structural(format!(
                "vertex {missing} is not connected to root {root}"
            )));
        }
        let max_depth = depths.iter().copied().max().unwrap_or(0);
        let truncation_depth = depth.unwrap_or(max_depth);
        if max_depth > truncation_depth {
            return Err(Error::Structural(format!(
                "vertex at depth {max_depth} exceeds declared depth {truncation_depth}"
            )));
        }
        for v in 0..n {
            if depths[v] < truncation_depth && children[v].is_empty() {
                return Err(Error::Structural(format!(
                    "vertex {v} at depth {} is terminal below the truncation depth {truncation_depth}",
                    depths[v]
                )));
            }
        }
        Ok(Self::assemble(
            VertexId(root),
            parent,
            children,
            depths,
            truncation_depth,
            Family::Explicit,
        ))
    }

    /// Same family materialized to a different depth. Explicit trees can
    /// only be cut shallower.
    pub fn retruncate(&self, depth: usize) -> Result<Self> {
        match &self.family {
            Family::Zline => Ok(Self::zline(depth)),
            Family::Homogeneous { q } => Self::homogeneous(*q, depth),
            Family::Random {
                seed,
                min_children,
                max_children,
            } if depth <= self.truncation_depth => {
                // Truncating a random tree must keep the sampled branching.
                let keep = |v: &VertexId| self.depth[v.0] <= depth;
                self.restrict(
                    depth,
                    keep,
                    Family::Random {
                        seed: *seed,
                        min_children: *min_children,
                        max_children: *max_children,
                    },
                )
            }
            Family::Explicit if depth <= self.truncation_depth => {
                self.restrict(depth, |v: &VertexId| self.depth[v.0] <= depth, Family::Explicit)
            }
            _ => Err(Error::DepthOutOfRange {
                depth,
                min: 0,
                max: self.truncation_depth,
            }),
        }
    }

    fn restrict(&self, depth: usize, keep: impl Fn(&VertexId) -> bool, family: Family) -> Result<Self> {
        let kept: Vec<VertexId> = (0..self.len()).map(VertexId).filter(|v| keep(v)).collect();
        if kept.iter().enumerate().any(|(i, v)| v.0 != i) {
            // Only breadth-first labelled trees truncate to an id prefix.
            return Err(Error::Structural("truncation is not an id prefix".into()));
        }
        let n = kept.len();
        let parent = self.parent[..n].to_vec();
        let children = self.children[..n]
            .iter()
            .map(|cs| cs.iter().copied().filter(|c| c.0 < n).collect())
            .collect();
        let depths = self.depth[..n].to_vec();
        Ok(Self::assemble(self.root, parent, children, depths, depth, family))
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Number of vertices in the truncation.
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn truncation_depth(&self) -> usize {
        self.truncation_depth
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len()).map(VertexId)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.len()
    }

    pub fn check(&self, v: VertexId) -> Result<VertexId> {
        if self.contains(v) {
            Ok(v)
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v.0]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.0]
    }

    /// `|v|`, the number of edges between the root and `v`.
    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v.0]
    }

    pub fn is_frontier(&self, v: VertexId) -> bool {
        self.depth[v.0] == self.truncation_depth
    }

    /// Neighbours of `v` within the truncation (parent first).
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.parent[v.0].into_iter().chain(self.children[v.0].iter().copied())
    }

    /// `v` together with all of its descendants in the truncation.
    pub fn sector(&self, v: VertexId) -> Result<VertexSet> {
        self.check(v)?;
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend(self.children[u.0].iter().copied());
        }
        Ok(VertexSet::from_unsorted(out))
    }

    /// Number of edges on the unique path between `v` and `w`.
    pub fn distance(&self, v: VertexId, w: VertexId) -> Result<usize> {
        self.check(v)?;
        self.check(w)?;
        let (mut a, mut b) = (v, w);
        let mut steps = 0;
        while self.depth[a.0] > self.depth[b.0] {
            a = self.parent[a.0].expect("non-root has a parent");
            steps += 1;
        }
        while self.depth[b.0] > self.depth[a.0] {
            b = self.parent[b.0].expect("non-root has a parent");
            steps += 1;
        }
        while a != b {
            a = self.parent[a.0].expect("non-root has a parent");
            b = self.parent[b.0].expect("non-root has a parent");
            steps += 2;
        }
        Ok(steps)
    }

    /// All vertices at depth `n`.
    pub fn layer(&self, n: usize) -> Result<VertexSet> {
        self.layers
            .get(n)
            .map(|l| VertexSet(l.clone()))
            .ok_or(Error::DepthOutOfRange {
                depth: n,
                min: 0,
                max: self.truncation_depth,
            })
    }

    /// Number of vertices with depth at most `n`.
    pub fn count_up_to(&self, n: usize) -> usize {
        self.layers.iter().take(n + 1).map(Vec::len).sum()
    }

    /// The vertex at depth `n` on the path from the root to `v`.
    pub fn ancestor_at_depth(&self, v: VertexId, n: usize) -> Result<VertexId> {
        self.check(v)?;
        let d = self.depth[v.0];
        if n > d {
            return Err(Error::DepthOutOfRange {
                depth: n,
                min: 0,
                max: d,
            });
        }
        let mut u = v;
        for _ in n..d {
            u = self.parent[u.0].expect("non-root has a parent");
        }
        Ok(u)
    }

    /// Edge list `[parent, child]` in id order.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        self.vertices()
            .filter_map(|v| self.parent[v.0].map(|p| [p.0, v.0]))
            .collect()
    }

    /// Explicit spec reproducing this tree id-for-id.
    pub fn to_explicit_spec(&self) -> TreeSpec {
        TreeSpec::Explicit {
            root: self.root.0,
            edges: self.edges(),
            depth: Some(self.truncation_depth),
            schema: Some(1),
        }
    }

    /// Integer label of a vertex of the integer line.
    pub fn zline_label(&self, v: VertexId) -> Option<i64> {
        if self.family != Family::Zline || !self.contains(v) {
            return None;
        }
        let i = v.0 as i64;
        Some(if i == 0 {
            0
        } else if i % 2 == 1 {
            (i + 1) / 2
        } else {
            -(i / 2)
        })
    }

    /// Vertex carrying integer label `n` on the integer line.
    pub fn zline_vertex(&self, n: i64) -> Option<VertexId> {
        if self.family != Family::Zline || n.unsigned_abs() as usize > self.truncation_depth {
            return None;
        }
        Some(VertexId(zline_id(n)))
    }
}

/// Id of the integer `n` under the line bijection.
pub fn zline_id(n: i64) -> usize {
    match n {
        0 => 0,
        n if n > 0 => (2 * n - 1) as usize,
        n => (-2 * n) as usize,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(t: &RootedTree, n: i64) -> VertexId {
        t.zline_vertex(n).unwrap()
    }

    #[test]
    fn zline_structure() {
        let t = RootedTree::zline(3);
        assert_eq!(t.len(), 7);
        assert_eq!(t.parent(z(&t, 2)), Some(z(&t, 1)));
        assert_eq!(t.parent(z(&t, -2)), Some(z(&t, -1)));
        assert_eq!(t.depth(z(&t, -3)), 3);
        for v in t.vertices() {
            assert_eq!(t.depth(v) as i64, t.zline_label(v).unwrap().abs());
            assert_eq!(z(&t, t.zline_label(v).unwrap()), v);
        }
    }

    #[test]
    fn homogeneous_counts() {
        let t = RootedTree::homogeneous(2, 2).unwrap();
        assert_eq!(t.len(), 10);
        assert_eq!(t.children(t.root()).len(), 3);
        assert_eq!(t.layer(2).unwrap().len(), 6);
        assert_eq!(RootedTree::homogeneous(2, 3).unwrap().len(), 22);
        assert!(RootedTree::homogeneous(1, 2).is_err());
    }

    #[test]
    fn explicit_rejects_interior_terminal() {
        // 0 - 1 - 2 - 3 and 0 - 4 where 4 (depth 1) has no child.
        let err = RootedTree::explicit(0, &[[0, 1], [1, 2], [2, 3], [0, 4]], Some(3)).unwrap_err();
        assert!(matches!(err, Error::Structural(_)), "{err}");
    }

    #[test]
    fn explicit_rejects_cycles_and_disconnection() {
        assert!(RootedTree::explicit(0, &[[0, 1], [1, 2], [2, 0]], None).is_err());
        assert!(RootedTree::explicit(0, &[[0, 1], [2, 3], [3, 2]], None).is_err());
        assert!(RootedTree::explicit(0, &[[0, 1], [2, 3]], None).is_err());
    }

    #[test]
    fn sectors() {
        let t = RootedTree::zline(3);
        assert_eq!(t.sector(t.root()).unwrap().len(), 7);
        let s = t.sector(z(&t, 2)).unwrap();
        assert_eq!(s.as_slice(), &[z(&t, 2), z(&t, 3)]);
        let h = RootedTree::homogeneous(2, 2).unwrap();
        let c = h.children(h.root())[0];
        assert_eq!(h.sector(c).unwrap().len(), 3);
        assert!(matches!(t.sector(VertexId(99)), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn distances() {
        let t = RootedTree::zline(3);
        assert_eq!(t.distance(z(&t, -2), z(&t, 3)).unwrap(), 5);
        assert_eq!(t.distance(z(&t, 3), z(&t, 3)).unwrap(), 0);
        let h = RootedTree::homogeneous(2, 2).unwrap();
        let c = h.children(h.root())[0];
        let g = h.children(c);
        assert_eq!(h.distance(g[0], g[1]).unwrap(), 2);
    }

    #[test]
    fn layers_and_ancestors() {
        let t = RootedTree::zline(3);
        assert_eq!(t.layer(2).unwrap().as_slice(), &[z(&t, 2), z(&t, -2)]);
        assert_eq!(t.ancestor_at_depth(z(&t, -3), 1).unwrap(), z(&t, -1));
        assert!(t.layer(4).is_err());
        assert!(t.ancestor_at_depth(z(&t, 1), 2).is_err());
    }

    #[test]
    fn random_is_deterministic_and_terminal_free() {
        let a = RootedTree::random(4, 7, 1, 3).unwrap();
        let b = RootedTree::random(4, 7, 1, 3).unwrap();
        assert_eq!(a, b);
        for v in a.vertices() {
            assert!(a.is_frontier(v) || !a.children(v).is_empty());
        }
    }

    #[test]
    fn retruncation_is_an_id_prefix() {
        let big = RootedTree::zline(6);
        let small = big.retruncate(3).unwrap();
        assert_eq!(small, RootedTree::zline(3));
        let r = RootedTree::random(4, 3, 1, 2).unwrap();
        let cut = r.retruncate(2).unwrap();
        assert_eq!(cut.len(), r.count_up_to(2));
        for v in cut.vertices() {
            assert_eq!(cut.parent(v), r.parent(v));
        }
    }

    #[test]
    fn explicit_round_trip() {
        let h = RootedTree::homogeneous(3, 2).unwrap();
        let back = build_tree(&h.to_explicit_spec()).unwrap();
        assert_eq!(back.edges(), h.edges());
        assert_eq!(back.truncation_depth(), 2);
    }
}
