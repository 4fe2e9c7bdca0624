//! Brute-force oracles next to the closed forms on small random operators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treewco::oracle::{
    j_oracle_linf_bracket, norm_oracle_linf, norm_oracle_lip, point_eval_lip_norm, OracleConfig, PointEvalMethod,
    SIGN_GRID,
};
use treewco::{sample, RootedTree};

fn main() -> treewco::Result<()> {
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    println!(
        "{:>3} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "n", "L∞ oracle", "formula", "ℒ oracle", "exact", "j gap"
    );
    for _ in 0..8 {
        let op = sample::operator(&mut rng, 10);
        let linf = norm_oracle_linf(&op, &SIGN_GRID, &cfg)?;
        let lip = norm_oracle_lip(&op, &cfg)?;
        let j = j_oracle_linf_bracket(&op, 3, &cfg)?;
        println!(
            "{:>3} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.2e}",
            op.phi().target().len(),
            linf.value,
            op.linf_op_norm(),
            lip.value,
            op.lip_exact_norm(),
            j.gap
        );
    }

    let tree = std::sync::Arc::new(RootedTree::homogeneous(2, 3)?);
    let w = tree.layer(3)?.as_slice()[0];
    for method in [PointEvalMethod::PathExtremal, PointEvalMethod::GridRefine] {
        let r = point_eval_lip_norm(&tree, w, method, &cfg)?;
        println!(
            "‖δ_w‖ at depth 3 via {:?}: {:.6} ({} evaluations)",
            r.method, r.value, r.search_size
        );
    }
    Ok(())
}
