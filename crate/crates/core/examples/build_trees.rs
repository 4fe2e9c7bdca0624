//! Build each tree family, look at layers and distances, and retruncate.

use treewco::tree::build_tree;
use treewco::{RootedTree, TreeSpec};

fn main() -> treewco::Result<()> {
    let line = RootedTree::zline(3);
    println!("integer line, depth 3: {} vertices", line.len());
    for v in line.vertices() {
        println!("  id {} is the integer {}", v.0, line.zline_label(v).unwrap());
    }

    let binary = RootedTree::homogeneous(2, 3)?;
    for n in 0..=3 {
        println!("homogeneous q=2, layer {n}: {} vertices", binary.layer(n)?.len());
    }
    let leaves = binary.layer(3)?;
    let (a, b) = (leaves.as_slice()[0], *leaves.as_slice().last().unwrap());
    println!("distance between the first and last leaf: {}", binary.distance(a, b)?);

    let random = build_tree(&TreeSpec::random(5, 7, 1, 3))?;
    let small = random.retruncate(2)?;
    println!(
        "random tree: {} vertices at depth 5, {} after retruncating to depth 2",
        random.len(),
        small.len()
    );

    let spec = random.to_explicit_spec();
    let again = build_tree(&spec)?;
    println!("explicit spec reproduces the tree: {}", again.edges() == random.edges());
    println!(
        "{}",
        serde_json::to_string(&TreeSpec::explicit(0, vec![[0, 1], [0, 2], [1, 3]])).unwrap()
    );
    Ok(())
}
