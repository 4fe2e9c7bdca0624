//! Certificates for boundedness, compactness, isometry and bounded-below
//! on a few operators, plus the finite-range equivalences for C_φ.

use std::sync::Arc;

use treewco::classify::{analyze, is_coherent, seven_equivalences, ClassifyConfig, DepthSchedule};
use treewco::wco::weights;
use treewco::{RootedTree, SelfMap, VertexFunction, WeightedCompOp};

fn show(title: &str, op: &WeightedCompOp, schedule: &DepthSchedule, cfg: &ClassifyConfig) {
    let a = analyze(op, schedule, cfg);
    println!("{title}");
    for c in a.linf.iter().chain(&a.lip) {
        println!(
            "  {:<20} {:?}",
            serde_json::to_value(c.statement).unwrap().as_str().unwrap(),
            c.verdict
        );
    }
    println!("  cross checks pass: {}", a.all_checks_pass());
}

fn main() -> treewco::Result<()> {
    let tree = Arc::new(RootedTree::zline(32));
    let schedule = DepthSchedule::geometric(32);
    let cfg = ClassifyConfig::default();

    let identity = SelfMap::identity(&tree);
    show(
        "identity, ψ ≡ 1",
        &WeightedCompOp::composition(identity.clone()),
        &schedule,
        &cfg,
    );
    let decay = weights::decay(&tree, 2.0)?;
    show(
        "identity, ψ = 1/(1+|v|)²",
        &WeightedCompOp::new(decay, identity.clone())?,
        &schedule,
        &cfg,
    );

    let root = SelfMap::constant(&tree, tree.root())?;
    let half = VertexFunction::constant(&tree, 0.5)?;
    show(
        "constant map to the root, ψ ≡ 1/2",
        &WeightedCompOp::new(half, root.clone())?,
        &schedule,
        &cfg,
    );

    for (name, phi) in [("identity", &identity), ("constant", &root)] {
        let eq = seven_equivalences(phi, &schedule, &cfg);
        println!(
            "finite-range equivalences for C_φ with φ = {name}: {:?}, coherent {}",
            eq.verdict,
            is_coherent(&eq)
        );
    }
    Ok(())
}
