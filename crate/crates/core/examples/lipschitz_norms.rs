//! Sup norm, Lipschitz norm, derivative tails and the growth estimate.

use std::sync::Arc;

use treewco::{RootedTree, VertexFunction};

fn main() -> treewco::Result<()> {
    let tree = Arc::new(RootedTree::zline(64));

    // |n| grows without bound but its derivative is 1 everywhere.
    let depth = VertexFunction::from_fn(&tree, |v| tree.depth(v) as f64)?;
    let n = depth.norms();
    println!("f(v) = |v|: sup {}, lip {}, ‖Df‖∞ {}", n.sup_norm, n.lip_norm, n.d_sup);

    for r in [0.25, 0.5] {
        for cut in [16, 64] {
            let g = VertexFunction::g_test(&tree, cut, r)?;
            println!("‖g_({cut},{r})‖_ℒ = {:.6} (r + 1 = {})", g.lip_norm(), r + 1.0);
        }
    }

    let decay = VertexFunction::from_fn(&tree, |v| 1.0 / (1.0 + tree.depth(v) as f64))?;
    let report = decay.norms();
    println!("1/(1+|v|) derivative tails:");
    for (d, s) in report.tail_profile.iter().filter(|(d, _)| d.is_power_of_two()) {
        println!("  beyond depth {d}: {s:.6}");
    }
    println!(
        "little Lipschitz trend at tol 0.01: {}",
        report.little_lipschitz_trend(0.01)
    );

    let check = decay.growth_check();
    println!(
        "growth |f(v)| ≤ |f(o)| + |v|‖Df‖∞ holds: {}, tightest at vertex {} with slack {:.3}",
        check.holds, check.worst_vertex.0, check.slack
    );
    Ok(())
}
