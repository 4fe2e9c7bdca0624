//! Closed-form operator norms, brackets and moduli of a weighted
//! composition operator.

use serde_json::json;

use treewco::input::{load_specs, FunctionSpec, MapSpec};

fn main() -> treewco::Result<()> {
    let tree = r#"{"family":"zline","depth":32}"#;
    let psi = serde_json::to_string(&FunctionSpec::builtin("decay", json!({"power": 1.0}))).unwrap();
    let phi = serde_json::to_string(&MapSpec::builtin("identity", json!({}))).unwrap();
    let loaded = load_specs(tree, Some(&psi), Some(&phi), 0)?;
    let op = treewco::WeightedCompOp::new(loaded.psi, loaded.phi)?;

    println!("‖ψC_φ‖ on L∞          = {:.6}", op.linf_op_norm());
    let b = op.lip_bounds();
    println!("‖ψC_φ‖ from ℒ bracket = [{:.6}, {:.6}]", b.lower, b.upper);
    println!("‖ψC_φ‖ from ℒ exact   = {:.6}", op.lip_exact_norm());
    println!("j on L∞               = {:.6}", op.j_linf());
    println!("k on L∞               = {:.6}", op.k_linf());
    let j = op.j_lip_bracket();
    println!("j from ℒ bracket      = [{:.6}, {:.6}]", j.lower, j.upper);

    println!("essential-norm tails (L∞, ℒ):");
    let (linf, lip) = (op.linf_ess_profile(), op.lip_ess_profile());
    for ((d, a), (_, b)) in linf.points.iter().zip(&lip.points).filter(|((d, _), _)| d % 8 == 0) {
        println!("  |φ| ≥ {d:2}: {a:.6} {b:.6}");
    }
    Ok(())
}
