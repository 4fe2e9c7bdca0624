//! The `treewco` command: request handling, report files and exit codes.
//!
//! Exit codes: 0 on success, 1 on spec or runtime errors, 2 when fixture
//! reports drift from the golden files or miss their expectations.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classify::{analyze, seven_equivalences, ClassifyConfig, DepthSchedule};
use crate::error::{Error, Result};
use crate::fixtures::{run_fixture, worked_examples};
use crate::input::{parse_json, read_spec_arg, resolve_specs_named, FunctionSpec, Loaded, MapSpec, SpecNames};
use crate::oracle::{
    j_lip_ratio_probe, j_oracle_linf_bracket, norm_oracle_linf, norm_oracle_lip, point_eval_lip_norm, OracleConfig,
    PointEvalMethod, SIGN_GRID,
};
use crate::report::{first_difference, to_canonical, to_canonical_string};
use crate::tree::TreeSpec;
use crate::wco::WeightedCompOp;

pub const GOLDEN_DIR_ENV: &str = "TREEWCO_GOLDEN_DIR";

/// Relative tolerance when comparing reports against golden files.
pub const GOLDEN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Certificates for L∞ and ℒ → L∞.
    Analyze,
    /// Norms of ψ and the closed-form operator quantities.
    Norms,
    /// Brute-force oracles next to the closed forms.
    Oracle,
    /// Run the worked-example fixtures against the golden files.
    Examples,
    /// Graphviz DOT of the tree with φ overlaid.
    Export,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisRequest {
    #[serde(default)]
    pub schema: Option<u32>,
    pub mode: Mode,
    #[serde(default)]
    pub tree: Option<TreeSpec>,
    #[serde(default)]
    pub psi: Option<FunctionSpec>,
    #[serde(default)]
    pub phi: Option<MapSpec>,
    #[serde(default)]
    pub depths: Option<Vec<usize>>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// `examples` mode: rewrite the golden files instead of comparing.
    #[serde(default)]
    pub update_golden: bool,
    #[serde(skip)]
    pub names: Option<SpecNames>,
}

fn default_tol() -> f64 {
    1e-6
}

impl AnalysisRequest {
    pub fn new(mode: Mode) -> Self {
        AnalysisRequest {
            schema: None,
            mode,
            tree: None,
            psi: None,
            phi: None,
            depths: None,
            tol: default_tol(),
            seed: 0,
            out: None,
            update_golden: false,
            names: None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "treewco",
    version,
    about = "Weighted composition operators on truncated trees"
)]
pub struct Args {
    #[arg(value_enum)]
    pub mode: Mode,
    /// Tree spec: a JSON file or inline JSON.
    #[arg(long)]
    pub tree: Option<String>,
    /// Weight spec (default ψ ≡ 1).
    #[arg(long)]
    pub psi: Option<String>,
    /// Map spec (default identity).
    #[arg(long)]
    pub phi: Option<String>,
    /// Comma-separated schedule depths within 1..=N (default: powers of two and N).
    #[arg(long, value_delimiter = ',')]
    pub depths: Option<Vec<usize>>,
    /// Values below this count as zero in trend verdicts.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// A request JSON file with all of the above; flags given alongside override it.
    #[arg(long)]
    pub request: Option<String>,
    /// Rewrite the golden files in `examples` mode.
    #[arg(long)]
    pub update_golden: bool,
}

impl Args {
    pub fn into_request(self) -> Result<AnalysisRequest> {
        let mut req = match &self.request {
            Some(arg) => {
                let (text, name) = read_spec_arg(arg)?;
                let mut r: AnalysisRequest = parse_json(&text, &name)?;
                if let Some(s) = r.schema.filter(|&s| s != crate::input::SCHEMA_VERSION) {
                    return Err(Error::Load {
                        source_name: name,
                        pointer: "/schema".into(),
                        message: format!("unsupported schema version {s}"),
                    });
                }
                r.mode = self.mode;
                r
            }
            None => AnalysisRequest::new(self.mode),
        };
        let mut names = SpecNames::default();
        if let Some(arg) = &self.tree {
            let (text, name) = read_spec_arg(arg)?;
            req.tree = Some(parse_json(&text, &name)?);
            names.tree = name;
        }
        if let Some(arg) = &self.psi {
            let (text, name) = read_spec_arg(arg)?;
            req.psi = Some(parse_json(&text, &name)?);
            names.psi = name;
        }
        if let Some(arg) = &self.phi {
            let (text, name) = read_spec_arg(arg)?;
            req.phi = Some(parse_json(&text, &name)?);
            names.phi = name;
        }
        req.names = Some(names);
        if self.depths.is_some() {
            req.depths = self.depths;
        }
        if self.tol != default_tol() {
            req.tol = self.tol;
        }
        if self.seed != 0 {
            req.seed = self.seed;
        }
        if self.out.is_some() {
            req.out = self.out;
        }
        req.update_golden |= self.update_golden;
        Ok(req)
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    /// Report text (JSON or DOT).
    pub output: String,
    pub files: Vec<PathBuf>,
}

fn golden_dir() -> PathBuf {
    std::env::var_os(GOLDEN_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden"))
}

fn load(req: &AnalysisRequest) -> Result<Loaded> {
    let tree = req.tree.as_ref().ok_or_else(|| Error::Load {
        source_name: "request".into(),
        pointer: "/tree".into(),
        message: format!("mode {:?} needs a tree spec", req.mode),
    })?;
    let names = req.names.clone().unwrap_or_default();
    resolve_specs_named(tree, req.psi.as_ref(), req.phi.as_ref(), req.seed, &names)
}

fn schedule(req: &AnalysisRequest, loaded: &Loaded) -> Result<DepthSchedule> {
    let n = loaded.tree.truncation_depth();
    match &req.depths {
        Some(d) => DepthSchedule::new(d.clone(), n),
        None => Ok(DepthSchedule::geometric(n)),
    }
}

fn describe(loaded: &Loaded) -> Value {
    json!({
        "truncation_depth": loaded.tree.truncation_depth(),
        "vertices": loaded.tree.len(),
        "source_depth": loaded.phi.source().truncation_depth(),
        "domain_size": loaded.phi.domain().len(),
        "injective": loaded.phi.is_injective(),
        "surjective": loaded.phi.is_surjective(),
    })
}

fn analyze_mode(req: &AnalysisRequest) -> Result<Value> {
    let loaded = load(req)?;
    let sched = schedule(req, &loaded)?;
    let cfg = ClassifyConfig {
        zero_tol: req.tol,
        ..ClassifyConfig::default()
    };
    let op = WeightedCompOp::new(loaded.psi.clone(), loaded.phi.clone())?;
    let analysis = analyze(&op, &sched, &cfg);
    let equivalences = seven_equivalences(&loaded.phi, &sched, &cfg);
    Ok(json!({
        "mode": "analyze",
        "operator": describe(&loaded),
        "schedule": sched,
        "config": cfg,
        "analysis": analysis,
        "composition_equivalences": equivalences,
    }))
}

fn norms_mode(req: &AnalysisRequest) -> Result<Value> {
    let loaded = load(req)?;
    let op = WeightedCompOp::new(loaded.psi.clone(), loaded.phi.clone())?;
    let (k_bracket, k_argmin) = op.k_lip_bracket();
    let (m, m_at) = op.inf_preimage_sup();
    Ok(json!({
        "mode": "norms",
        "operator": describe(&loaded),
        "psi": loaded.psi.norms(),
        "psi_growth": loaded.psi.growth_check(),
        "linf": {
            "norm": op.linf_op_norm(),
            "ess_tail_profile": op.linf_ess_profile(),
            "injectivity_modulus": op.j_linf(),
            "surjectivity_modulus": op.k_linf(),
        },
        "lip": {
            "norm_bounds": op.lip_bounds(),
            "norm": op.lip_exact_norm(),
            "ess_tail_profile": op.lip_ess_profile(),
            "injectivity_modulus_bracket": op.j_lip_bracket(),
            "surjectivity_modulus_bracket": k_bracket,
            "surjectivity_upper_argmin": k_argmin,
        },
        "inf_preimage_sup": {"value": m, "at": m_at},
        "range_profile": loaded.phi.range_profile(),
        "finite_range": loaded.phi.finite_range_trend(),
    }))
}

fn agreement(formula: f64, oracle: f64, tol: f64) -> Value {
    json!({"formula": formula, "oracle": oracle, "agree": (formula - oracle).abs() <= tol})
}

fn oracle_mode(req: &AnalysisRequest) -> Result<Value> {
    let loaded = load(req)?;
    let op = WeightedCompOp::new(loaded.psi.clone(), loaded.phi.clone())?;
    let cfg = OracleConfig {
        seed: req.seed,
        ..OracleConfig::default()
    };
    let target = loaded.phi.target();
    let mut out = json!({"mode": "oracle", "operator": describe(&loaded)});

    out["linf_norm"] = match norm_oracle_linf(&op, &SIGN_GRID, &cfg) {
        Ok(r) => json!({"check": agreement(op.linf_op_norm(), r.value, 1e-9), "result": r}),
        Err(e @ Error::SearchCapExceeded { .. }) => json!({"skipped": e.to_string()}),
        Err(e) => return Err(e),
    };
    let lip = norm_oracle_lip(&op, &cfg)?;
    out["lip_norm"] = json!({
        "check": agreement(op.lip_exact_norm(), lip.value, 1e-9),
        "bounds": op.lip_bounds(),
        "result": lip,
    });
    out["injectivity_modulus_linf"] = match j_oracle_linf_bracket(&op, 3, &cfg) {
        Ok(b) => serde_json::to_value(b)?,
        Err(e @ Error::SearchCapExceeded { .. }) => json!({"skipped": e.to_string()}),
        Err(e) => return Err(e),
    };

    let mut worst = 0.0f64;
    for w in target.vertices() {
        let expect = target.depth(w).max(1) as f64;
        for m in [PointEvalMethod::PathExtremal, PointEvalMethod::GridRefine] {
            worst = worst.max((point_eval_lip_norm(target, w, m, &cfg)?.value - expect).abs());
        }
    }
    out["point_evaluation"] = json!({"vertices": target.len(), "max_deviation_from_max(1,|w|)": worst});
    if let Some(p) = j_lip_ratio_probe(&op, 200, req.seed) {
        out["injectivity_ratio_probe_lip"] = serde_json::to_value(p)?;
    }
    Ok(out)
}

fn export_mode(req: &AnalysisRequest) -> Result<String> {
    let loaded = load(req)?;
    let phi = req.phi.as_ref().map(|_| &loaded.phi);
    Ok(crate::dot::to_dot(&loaded.tree, phi))
}

fn examples_mode(req: &AnalysisRequest) -> Result<(Value, bool, Vec<PathBuf>)> {
    let dir = golden_dir();
    let mut rows = Vec::new();
    let mut ok = true;
    let mut files = Vec::new();
    for f in worked_examples() {
        let report = run_fixture(&f, req.seed)?;
        let actual = to_canonical(&report)?;
        let path = dir.join(format!("{}.json", f.name));
        let golden = if req.update_golden {
            std::fs::create_dir_all(&dir)?;
            std::fs::write(&path, to_canonical_string(&report)?)?;
            files.push(path.clone());
            json!("updated")
        } else {
            match std::fs::read_to_string(&path) {
                Ok(text) => {
                    let expected: Value = parse_json(&text, &path.display().to_string())?;
                    match first_difference(&expected, &actual, GOLDEN_TOLERANCE) {
                        None => json!("match"),
                        Some((pointer, msg)) => json!({"drift": pointer, "detail": msg}),
                    }
                }
                Err(e) => json!({"missing": format!("{}: {e}", path.display())}),
            }
        };
        let fixture_ok = report.passed && (golden == json!("match") || golden == json!("updated"));
        ok &= fixture_ok;
        rows.push(json!({
            "name": f.name,
            "expectations_met": report.passed,
            "golden": golden,
            "failed_checks": report.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>(),
        }));
    }
    Ok((
        json!({"mode": "examples", "golden_dir": dir.display().to_string(), "fixtures": rows, "ok": ok}),
        ok,
        files,
    ))
}

/// Execute a request; errors become exit code 1 in [`main_with_args`].
pub fn run(req: &AnalysisRequest) -> Result<Outcome> {
    let (output, exit_code, mut files) = match req.mode {
        Mode::Analyze => (to_canonical_string(&analyze_mode(req)?)?, 0, vec![]),
        Mode::Norms => (to_canonical_string(&norms_mode(req)?)?, 0, vec![]),
        Mode::Oracle => (to_canonical_string(&oracle_mode(req)?)?, 0, vec![]),
        Mode::Export => (export_mode(req)?, 0, vec![]),
        Mode::Examples => {
            let (v, ok, files) = examples_mode(req)?;
            (to_canonical_string(&v)?, if ok { 0 } else { 2 }, files)
        }
    };
    if let Some(path) = &req.out {
        std::fs::write(path, &output)?;
        files.push(path.clone());
    }
    Ok(Outcome {
        exit_code,
        output,
        files,
    })
}

/// Parse arguments, run, print, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = args.into_request().and_then(|req| run(&req).map(|o| (req, o)));
    match result {
        Ok((req, outcome)) => {
            if req.out.is_none() {
                print!("{}", outcome.output);
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// A request built from specs instead of flags.
pub fn request_for(tree: TreeSpec, psi: Option<FunctionSpec>, phi: Option<MapSpec>, mode: Mode) -> AnalysisRequest {
    AnalysisRequest {
        tree: Some(tree),
        psi,
        phi,
        ..AnalysisRequest::new(mode)
    }
}
