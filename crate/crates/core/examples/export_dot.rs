//! Write Graphviz files for a tree and for the doubling map on the line.
//! Render with `dot -Tsvg tree.dot -o tree.svg`.

use std::sync::Arc;

use treewco::dot::to_dot;
use treewco::{RootedTree, SelfMap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| ".".into());
    let tree = RootedTree::homogeneous(2, 3)?;
    let path = format!("{dir}/homogeneous.dot");
    std::fs::write(&path, to_dot(&tree, None))?;
    println!("wrote {path}");

    let line = Arc::new(RootedTree::zline(4));
    let double = SelfMap::double(&line)?;
    let path = format!("{dir}/double.dot");
    std::fs::write(&path, to_dot(&line, Some(&double)))?;
    println!(
        "wrote {path} ({} source vertices, {} target vertices)",
        double.source().len(),
        line.len()
    );
    Ok(())
}
