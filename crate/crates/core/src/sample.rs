//! Seeded random trees, weights and maps for property tests and oracle
//! cross-checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::func::VertexFunction;
use crate::tree::{RootedTree, VertexId};
use crate::wco::{SelfMap, WeightedCompOp};

/// A tree with at most `max_vertices` vertices (at least 3), drawn from
/// integer-line, homogeneous and random-branching families.
pub fn small_tree<R: Rng>(rng: &mut R, max_vertices: usize) -> Arc<RootedTree> {
    let max_vertices = max_vertices.max(3);
    loop {
        let tree = match rng.gen_range(0..4) {
            0 => RootedTree::zline(rng.gen_range(1..=((max_vertices - 1) / 2).max(1))),
            1 => match RootedTree::homogeneous(rng.gen_range(2..=3), rng.gen_range(1..=2)) {
                Ok(t) => t,
                Err(_) => continue,
            },
            _ => {
                let depth = rng.gen_range(1..=4);
                let max_children = rng.gen_range(1..=3);
                match RootedTree::random(depth, rng.gen(), 1, max_children) {
                    Ok(t) => t,
                    Err(_) => continue,
                }
            }
        };
        if tree.len() <= max_vertices {
            return Arc::new(tree);
        }
    }
}

/// Weights mixing sign changes, exact zeros and values bounded away from 0.
pub fn weight<R: Rng>(rng: &mut R, tree: &Arc<RootedTree>) -> VertexFunction {
    let style = rng.gen_range(0..4);
    let values = tree
        .vertices()
        .map(|_| match style {
            0 => rng.gen_range(-2.0..=2.0),
            1 => {
                if rng.gen_bool(0.25) {
                    0.0
                } else {
                    rng.gen_range(-2.0..=2.0)
                }
            }
            2 => rng.gen_range(0.5..=1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            _ => f64::from(rng.gen_range(-3i32..=3)) / 2.0,
        })
        .collect();
    VertexFunction::new(tree.clone(), values).expect("one value per vertex")
}

/// Bounded function with values in `[-scale, scale]`.
pub fn function<R: Rng>(rng: &mut R, tree: &Arc<RootedTree>, scale: f64) -> VertexFunction {
    let values = tree.vertices().map(|_| rng.gen_range(-scale..=scale)).collect();
    VertexFunction::new(tree.clone(), values).expect("one value per vertex")
}

/// Total self-map: uniform, a permutation, or depth-preserving.
pub fn map<R: Rng>(rng: &mut R, tree: &Arc<RootedTree>) -> SelfMap {
    match rng.gen_range(0..4) {
        0 => permutation(rng, tree),
        1 => depth_preserving_map(rng, tree),
        _ => {
            let images = tree
                .vertices()
                .map(|_| VertexId(rng.gen_range(0..tree.len())))
                .collect();
            SelfMap::total(tree, images).expect("images inside the tree")
        }
    }
}

pub fn permutation<R: Rng>(rng: &mut R, tree: &Arc<RootedTree>) -> SelfMap {
    let mut images: Vec<VertexId> = tree.vertices().collect();
    images.shuffle(rng);
    SelfMap::total(tree, images).expect("images inside the tree")
}

/// `|φ(v)| = |v|` with `φ(v)` uniform in the layer of `v`.
pub fn depth_preserving_map<R: Rng>(rng: &mut R, tree: &Arc<RootedTree>) -> SelfMap {
    let images = tree
        .vertices()
        .map(|v| {
            let layer = tree.layer(tree.depth(v)).expect("depth inside truncation");
            layer.as_slice()[rng.gen_range(0..layer.len())]
        })
        .collect();
    SelfMap::total(tree, images).expect("images inside the tree")
}

/// Images of depth at most `max_depth`; the root already reaches that
/// depth, so the range stabilizes immediately.
pub fn finite_range_map<R: Rng>(rng: &mut R, tree: &Arc<RootedTree>, max_depth: usize) -> Result<SelfMap> {
    let max_depth = max_depth.min(tree.truncation_depth());
    let pool: Vec<VertexId> = tree.vertices().filter(|&v| tree.depth(v) <= max_depth).collect();
    let deepest = tree.layer(max_depth)?;
    let images = tree
        .vertices()
        .map(|v| {
            if v == tree.root() {
                deepest.as_slice()[rng.gen_range(0..deepest.len())]
            } else {
                pool[rng.gen_range(0..pool.len())]
            }
        })
        .collect();
    SelfMap::total(tree, images)
}

/// A random operator on a random small tree.
pub fn operator<R: Rng>(rng: &mut R, max_vertices: usize) -> WeightedCompOp {
    let tree = small_tree(rng, max_vertices);
    let phi = map(rng, &tree);
    WeightedCompOp::new(weight(rng, &tree), phi).expect("same tree")
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn sizes_respect_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t = small_tree(&mut rng, 12);
            assert!(t.len() <= 12 && t.len() >= 2);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = operator(&mut ChaCha8Rng::seed_from_u64(3), 16);
        let b = operator(&mut ChaCha8Rng::seed_from_u64(3), 16);
        assert_eq!(a.psi().values(), b.psi().values());
        assert_eq!(a.phi().images(), b.phi().images());
    }

    #[test]
    fn finite_range_maps_stabilize() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = Arc::new(RootedTree::zline(8));
        for _ in 0..20 {
            let phi = finite_range_map(&mut rng, &t, 3).unwrap();
            let fr = phi.finite_range_trend().unwrap();
            assert_eq!((fr.max_image_depth, fr.stabilized_at), (3, 0));
        }
    }
}
