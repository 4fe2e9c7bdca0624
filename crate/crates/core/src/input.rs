//! JSON specs for trees, functions and maps, and their validated loading.
//!
//! ```json
//! {"family": "zline", "depth": 8}
//! {"kind": "table", "values": {"0": 1.0, "1": 0.5, "2": 0.5}}
//! {"kind": "builtin", "name": "g", "params": {"n": 16, "r": 0.5}}
//! {"kind": "table", "map": {"0": 0, "1": 0, "2": 1}}
//! {"kind": "builtin", "name": "zfold"}
//! ```
//!
//! Every document may carry `"schema": 1`. Errors name the offending field
//! by JSON pointer; syntax and type errors also carry line and column.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::VertexFunction;
use crate::sample;
use crate::tree::{build_tree, RootedTree, TreeSpec, VertexId};
use crate::wco::{weights, SelfMap};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawSpec")]
pub enum FunctionSpec {
    Table {
        values: BTreeMap<String, f64>,
        /// Value for vertices missing from `values`; without it the table
        /// must be total.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<f64>,
        #[serde(default, skip_serializing)]
        schema: Option<u32>,
    },
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
        params: serde_json::Value,
        #[serde(default, skip_serializing)]
        schema: Option<u32>,
    },
}

impl FunctionSpec {
    pub fn builtin(name: &str, params: serde_json::Value) -> Self {
        FunctionSpec::Builtin {
            name: name.into(),
            params,
            schema: None,
        }
    }

    fn schema(&self) -> Option<u32> {
        match self {
            FunctionSpec::Table { schema, .. } | FunctionSpec::Builtin { schema, .. } => *schema,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawSpec")]
pub enum MapSpec {
    Table {
        map: BTreeMap<String, usize>,
        #[serde(default, skip_serializing)]
        schema: Option<u32>,
    },
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
        params: serde_json::Value,
        #[serde(default, skip_serializing)]
        schema: Option<u32>,
    },
}

impl MapSpec {
    pub fn builtin(name: &str, params: serde_json::Value) -> Self {
        MapSpec::Builtin {
            name: name.into(),
            params,
            schema: None,
        }
    }

    fn schema(&self) -> Option<u32> {
        match self {
            MapSpec::Table { schema, .. } | MapSpec::Builtin { schema, .. } => *schema,
        }
    }
}

/// Flat form shared by function and map specs so parse errors keep their
/// field path and line number.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: String,
    values: Option<BTreeMap<String, f64>>,
    default: Option<f64>,
    map: Option<BTreeMap<String, usize>>,
    name: Option<String>,
    #[serde(default)]
    params: serde_json::Value,
    schema: Option<u32>,
}

impl RawSpec {
    fn builtin(self, what: &str) -> std::result::Result<(String, serde_json::Value, Option<u32>), String> {
        if self.values.is_some() || self.default.is_some() || self.map.is_some() {
            return Err(format!("a builtin {what} takes only `name` and `params`"));
        }
        let name = self
            .name
            .ok_or_else(|| format!("a builtin {what} needs field `name`"))?;
        Ok((name, self.params, self.schema))
    }
}

impl TryFrom<RawSpec> for FunctionSpec {
    type Error = String;

    fn try_from(r: RawSpec) -> std::result::Result<Self, String> {
        match r.kind.as_str() {
            "table" => {
                if r.map.is_some() || r.name.is_some() || !r.params.is_null() {
                    return Err("a function table takes only `values` and `default`".into());
                }
                Ok(FunctionSpec::Table {
                    values: r.values.ok_or("a function table needs field `values`")?,
                    default: r.default,
                    schema: r.schema,
                })
            }
            "builtin" => {
                let (name, params, schema) = r.builtin("function")?;
                Ok(FunctionSpec::Builtin { name, params, schema })
            }
            other => Err(format!("unknown kind {other:?}; expected table or builtin")),
        }
    }
}

impl TryFrom<RawSpec> for MapSpec {
    type Error = String;

    fn try_from(r: RawSpec) -> std::result::Result<Self, String> {
        match r.kind.as_str() {
            "table" => {
                if r.values.is_some() || r.default.is_some() || r.name.is_some() || !r.params.is_null() {
                    return Err("a map table takes only `map`".into());
                }
                Ok(MapSpec::Table {
                    map: r.map.ok_or("a map table needs field `map`")?,
                    schema: r.schema,
                })
            }
            "builtin" => {
                let (name, params, schema) = r.builtin("map")?;
                Ok(MapSpec::Builtin { name, params, schema })
            }
            other => Err(format!("unknown kind {other:?}; expected table or builtin")),
        }
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    out
}

/// Parse `text` as `T`, reporting failures with a JSON pointer and the
/// line/column from the parser.
pub fn parse_json<T: DeserializeOwned>(text: &str, source_name: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        Error::load(source_name, pointer, e.into_inner().to_string())
    })?;
    Ok(value)
}

fn parse_params<T: DeserializeOwned>(params: &serde_json::Value, source_name: &str) -> Result<T> {
    let params = if params.is_null() {
        serde_json::Value::Object(Default::default())
    } else {
        params.clone()
    };
    serde_path_to_error::deserialize(params).map_err(|e| {
        let pointer = format!("/params{}", pointer_of(e.path()));
        Error::load(source_name, pointer, e.into_inner().to_string())
    })
}

fn check_schema(schema: Option<u32>, source_name: &str) -> Result<()> {
    match schema {
        Some(s) if s != SCHEMA_VERSION => Err(Error::load(
            source_name,
            "/schema",
            format!("unsupported schema version {s}, expected {SCHEMA_VERSION}"),
        )),
        _ => Ok(()),
    }
}

fn vertex_key(key: &str, tree: &RootedTree, source_name: &str, pointer: &str) -> Result<VertexId> {
    let id: usize = key
        .parse()
        .map_err(|_| Error::load(source_name, pointer, format!("key {key:?} is not a vertex id")))?;
    if id >= tree.len() {
        return Err(Error::load(
            source_name,
            pointer,
            format!("vertex {id} is outside the truncation ({} vertices)", tree.len()),
        ));
    }
    Ok(VertexId(id))
}

fn param_vertex(id: usize, tree: &RootedTree, source_name: &str) -> Result<VertexId> {
    if id < tree.len() {
        Ok(VertexId(id))
    } else {
        Err(Error::load(
            source_name,
            "/params/vertex",
            format!("vertex {id} is outside the truncation ({} vertices)", tree.len()),
        ))
    }
}

pub fn load_tree_spec(text: &str, source_name: &str) -> Result<TreeSpec> {
    parse_json(text, source_name)
}

pub fn resolve_tree(spec: &TreeSpec, source_name: &str) -> Result<Arc<RootedTree>> {
    build_tree(spec)
        .map(Arc::new)
        .map_err(|e| Error::load(source_name, "", e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CapParams {
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GParams {
    n: usize,
    r: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexParams {
    vertex: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValueParams {
    value: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerParams {
    #[serde(default = "one")]
    power: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeParams {
    #[serde(default = "one")]
    amplitude: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedParams {
    seed: Option<u64>,
}

fn one() -> f64 {
    1.0
}

pub const FUNCTION_BUILTINS: &[&str] = &[
    "F_N",
    "g",
    "chi",
    "eta",
    "const",
    "decay",
    "inv_phi",
    "zfold_weight",
    "reciprocal",
    "alternating",
    "random",
];

pub const MAP_BUILTINS: &[&str] = &["identity", "double", "zfold", "constant", "random"];

/// Context a function spec is resolved in: the tree it lives on, the map
/// (for `inv_phi`) and the seed for `random`.
pub struct FunctionContext<'a> {
    pub tree: &'a Arc<RootedTree>,
    pub phi: Option<&'a SelfMap>,
    pub seed: u64,
}

pub fn resolve_function(spec: &FunctionSpec, ctx: &FunctionContext<'_>, source_name: &str) -> Result<VertexFunction> {
    check_schema(spec.schema(), source_name)?;
    let tree = ctx.tree;
    let wrap = |e: Error| Error::load(source_name, "/params", e.to_string());
    match spec {
        FunctionSpec::Table { values, default, .. } => {
            let mut out = vec![None; tree.len()];
            for (key, &x) in values {
                let pointer = format!("/values/{key}");
                let v = vertex_key(key, tree, source_name, &pointer)?;
                if !x.is_finite() {
                    return Err(Error::load(source_name, pointer, "value is not finite"));
                }
                out[v.0] = Some(x);
            }
            let mut filled = Vec::with_capacity(tree.len());
            for (i, x) in out.into_iter().enumerate() {
                match x.or(*default) {
                    Some(x) => filled.push(x),
                    None => {
                        return Err(Error::load(
                            source_name,
                            "/values",
                            format!("no value for vertex {i} and no default"),
                        ))
                    }
                }
            }
            VertexFunction::new(tree.clone(), filled)
        }
        FunctionSpec::Builtin { name, params, .. } => match name.as_str() {
            "F_N" => {
                let p: CapParams = parse_params(params, source_name)?;
                VertexFunction::f_cap(tree, p.n).map_err(wrap)
            }
            "g" => {
                let p: GParams = parse_params(params, source_name)?;
                VertexFunction::g_test(tree, p.n, p.r).map_err(wrap)
            }
            "chi" => {
                let p: VertexParams = parse_params(params, source_name)?;
                VertexFunction::indicator(tree, param_vertex(p.vertex, tree, source_name)?)
            }
            "eta" => {
                let p: VertexParams = parse_params(params, source_name)?;
                VertexFunction::sector_indicator(tree, param_vertex(p.vertex, tree, source_name)?)
            }
            "const" => {
                let p: ValueParams = parse_params(params, source_name)?;
                VertexFunction::constant(tree, p.value).map_err(wrap)
            }
            "decay" => {
                let p: PowerParams = parse_params(params, source_name)?;
                weights::decay(tree, p.power).map_err(wrap)
            }
            "inv_phi" => {
                let p: PowerParams = parse_params(params, source_name)?;
                let phi = ctx
                    .phi
                    .ok_or_else(|| Error::load(source_name, "/name", "inv_phi needs a map"))?;
                weights::inverse_image_depth(phi, p.power).map_err(wrap)
            }
            "zfold_weight" => {
                let _: Empty = parse_params(params, source_name)?;
                weights::zfold(tree).map_err(|e| Error::load(source_name, "/name", e.to_string()))
            }
            "reciprocal" => {
                let _: Empty = parse_params(params, source_name)?;
                weights::reciprocal(tree).map_err(|e| Error::load(source_name, "/name", e.to_string()))
            }
            "alternating" => {
                let p: AmplitudeParams = parse_params(params, source_name)?;
                let labels: Option<Vec<i64>> = tree.vertices().map(|v| tree.zline_label(v)).collect();
                let labels =
                    labels.ok_or_else(|| Error::load(source_name, "/name", "alternating needs the integer line"))?;
                VertexFunction::new(
                    tree.clone(),
                    labels
                        .into_iter()
                        .map(|n| if n % 2 == 0 { p.amplitude } else { -p.amplitude })
                        .collect(),
                )
            }
            "random" => {
                let p: SeedParams = parse_params(params, source_name)?;
                let mut rng = ChaCha8Rng::seed_from_u64(p.seed.unwrap_or(ctx.seed));
                Ok(sample::weight(&mut rng, tree))
            }
            other => Err(Error::load(
                source_name,
                "/name",
                format!("unknown function builtin {other:?}; expected one of {FUNCTION_BUILTINS:?}"),
            )),
        },
    }
}

/// Resolve a map spec against the truncation it maps into.
///
/// Tables and most builtins map the tree into itself; `double` and `zfold`
/// map a shallower or deeper truncation of the integer line into it.
pub fn resolve_map(spec: &MapSpec, tree: &Arc<RootedTree>, seed: u64, source_name: &str) -> Result<SelfMap> {
    check_schema(spec.schema(), source_name)?;
    match spec {
        MapSpec::Table { map, .. } => {
            let mut images = vec![None; tree.len()];
            for (key, &w) in map {
                let pointer = format!("/map/{key}");
                let v = vertex_key(key, tree, source_name, &pointer)?;
                if w >= tree.len() {
                    return Err(Error::load(
                        source_name,
                        pointer,
                        format!(
                            "image {w} is outside the truncation ({} vertices, depth {}); images are never clipped",
                            tree.len(),
                            tree.truncation_depth()
                        ),
                    ));
                }
                images[v.0] = Some(VertexId(w));
            }
            if let Some(i) = images.iter().position(Option::is_none) {
                return Err(Error::load(
                    source_name,
                    "/map",
                    format!("map is not total: vertex {i} has no image"),
                ));
            }
            SelfMap::new(tree.clone(), tree.clone(), images)
        }
        MapSpec::Builtin { name, params, .. } => {
            let on_line = |r: Result<SelfMap>| r.map_err(|e| Error::load(source_name, "/name", e.to_string()));
            match name.as_str() {
                "identity" => {
                    let _: Empty = parse_params(params, source_name)?;
                    Ok(SelfMap::identity(tree))
                }
                "double" => {
                    let _: Empty = parse_params(params, source_name)?;
                    on_line(SelfMap::double(tree))
                }
                "zfold" => {
                    let _: Empty = parse_params(params, source_name)?;
                    on_line(SelfMap::zfold(tree))
                }
                "constant" => {
                    let p: VertexParams = parse_params(params, source_name)?;
                    SelfMap::constant(tree, param_vertex(p.vertex, tree, source_name)?)
                }
                "random" => {
                    let p: SeedParams = parse_params(params, source_name)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(p.seed.unwrap_or(seed));
                    Ok(sample::map(&mut rng, tree))
                }
                other => Err(Error::load(
                    source_name,
                    "/name",
                    format!("unknown map builtin {other:?}; expected one of {MAP_BUILTINS:?}"),
                )),
            }
        }
    }
}

/// Validated operator data.
#[derive(Debug, Clone)]
pub struct Loaded {
    /// The truncation `φ` maps into.
    pub tree: Arc<RootedTree>,
    /// Weight on the source truncation of `φ`.
    pub psi: VertexFunction,
    pub phi: SelfMap,
}

/// Names used in load errors for the three specs.
#[derive(Debug, Clone)]
pub struct SpecNames {
    pub tree: String,
    pub psi: String,
    pub phi: String,
}

impl Default for SpecNames {
    fn default() -> Self {
        SpecNames {
            tree: "tree".into(),
            psi: "psi".into(),
            phi: "phi".into(),
        }
    }
}

/// Resolve a tree spec, a map (default identity) and a weight (default
/// `ψ ≡ 1`); the map is resolved first because the weight lives on its
/// source.
pub fn resolve_specs(tree: &TreeSpec, psi: Option<&FunctionSpec>, phi: Option<&MapSpec>, seed: u64) -> Result<Loaded> {
    resolve_specs_named(tree, psi, phi, seed, &SpecNames::default())
}

pub fn resolve_specs_named(
    tree: &TreeSpec,
    psi: Option<&FunctionSpec>,
    phi: Option<&MapSpec>,
    seed: u64,
    names: &SpecNames,
) -> Result<Loaded> {
    let t = resolve_tree(tree, &names.tree)?;
    let phi = match phi {
        Some(spec) => resolve_map(spec, &t, seed, &names.phi)?,
        None => SelfMap::identity(&t),
    };
    let psi = match psi {
        Some(spec) => resolve_function(
            spec,
            &FunctionContext {
                tree: phi.source(),
                phi: Some(&phi),
                seed,
            },
            &names.psi,
        )?,
        None => VertexFunction::constant(phi.source(), 1.0)?,
    };
    Ok(Loaded { tree: t, psi, phi })
}

/// Read a spec argument: inline JSON when it starts with `{`, a file path
/// otherwise. Returns the text and a name for error messages.
pub fn read_spec_arg(arg: &str) -> Result<(String, String)> {
    if arg.trim_start().starts_with('{') {
        Ok((arg.to_string(), "<inline>".into()))
    } else {
        let text = std::fs::read_to_string(Path::new(arg))
            .map_err(|e| Error::load(arg, "", format!("cannot read file: {e}")))?;
        Ok((text, arg.to_string()))
    }
}

/// Load tree, weight and map from files or inline JSON.
pub fn load_specs(tree: &str, psi: Option<&str>, phi: Option<&str>, seed: u64) -> Result<Loaded> {
    let (text, tree_name) = read_spec_arg(tree)?;
    let tree_spec: TreeSpec = parse_json(&text, &tree_name)?;
    let mut names = SpecNames {
        tree: tree_name,
        ..SpecNames::default()
    };
    let phi_spec: Option<MapSpec> = match phi {
        Some(arg) => {
            let (text, name) = read_spec_arg(arg)?;
            let spec = parse_json(&text, &name)?;
            names.phi = name;
            Some(spec)
        }
        None => None,
    };
    let psi_spec: Option<FunctionSpec> = match psi {
        Some(arg) => {
            let (text, name) = read_spec_arg(arg)?;
            let spec = parse_json(&text, &name)?;
            names.psi = name;
            Some(spec)
        }
        None => None,
    };
    resolve_specs_named(&tree_spec, psi_spec.as_ref(), phi_spec.as_ref(), seed, &names)
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;

    fn pointer(e: Error) -> String {
        match e {
            Error::Load { pointer, .. } => pointer,
            other => panic!("expected a load error, got {other}"),
        }
    }

    fn zline(n: usize) -> Arc<RootedTree> {
        Arc::new(RootedTree::zline(n))
    }

    #[test]
    fn zfold_builtin_table() {
        let t = zline(6);
        let spec: MapSpec = parse_json(r#"{"kind":"builtin","name":"zfold"}"#, "m").unwrap();
        let phi = resolve_map(&spec, &t, 0, "m").unwrap();
        for n in -12i64..=12 {
            let v = phi.source().zline_vertex(n).unwrap();
            let expect = if n >= 0 {
                n
            } else if n % 2 != 0 {
                -n
            } else {
                n / 2
            };
            match phi.image(v) {
                Some(w) => assert_eq!(t.zline_label(w), Some(expect)),
                None => assert!(expect.abs() > 6, "{n} should map inside"),
            }
        }
    }

    #[test]
    fn g_builtin() {
        let t = zline(20);
        let spec = FunctionSpec::builtin("g", json!({"n": 16, "r": 0.5}));
        let ctx = FunctionContext {
            tree: &t,
            phi: None,
            seed: 0,
        };
        let f = resolve_function(&spec, &ctx, "g").unwrap();
        let direct = VertexFunction::g_test(&t, 16, 0.5).unwrap();
        assert_eq!(f.values(), direct.values());
    }

    #[test]
    fn map_out_of_truncation() {
        let t = zline(1);
        let text = r#"{"kind":"table","map":{"0":0,"1":0,"2":9}}"#;
        let spec: MapSpec = parse_json(text, "m").unwrap();
        assert_eq!(pointer(resolve_map(&spec, &t, 0, "m").unwrap_err()), "/map/2");
    }

    #[test]
    fn partial_map_rejected() {
        let t = zline(1);
        let spec: MapSpec = parse_json(r#"{"kind":"table","map":{"0":0}}"#, "m").unwrap();
        assert_eq!(pointer(resolve_map(&spec, &t, 0, "m").unwrap_err()), "/map");
    }

    #[test]
    fn unknown_builtin() {
        let t = zline(1);
        let spec = MapSpec::builtin("shift", serde_json::Value::Null);
        assert_eq!(pointer(resolve_map(&spec, &t, 0, "m").unwrap_err()), "/name");
    }

    #[test]
    fn type_error_has_pointer_and_line() {
        let text = "{\n  \"family\": \"zline\",\n  \"depth\": \"deep\"\n}";
        let e = load_tree_spec(text, "t.json").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert_eq!(pointer(e), "/depth");
    }

    #[test]
    fn bad_params_pointer() {
        let t = zline(4);
        let spec = FunctionSpec::builtin("g", json!({"n": 16, "r": "half"}));
        let ctx = FunctionContext {
            tree: &t,
            phi: None,
            seed: 0,
        };
        assert_eq!(pointer(resolve_function(&spec, &ctx, "g").unwrap_err()), "/params/r");
    }

    #[test]
    fn schema_version_checked() {
        let t = zline(1);
        let spec: FunctionSpec = parse_json(r#"{"kind":"table","values":{},"default":1,"schema":2}"#, "f").unwrap();
        let ctx = FunctionContext {
            tree: &t,
            phi: None,
            seed: 0,
        };
        assert_eq!(pointer(resolve_function(&spec, &ctx, "f").unwrap_err()), "/schema");
    }

    #[test]
    fn table_round_trip() {
        let t = Arc::new(RootedTree::homogeneous(2, 2).unwrap());
        let f = VertexFunction::f_cap(&t, 2).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        let spec: FunctionSpec = parse_json(&text, "f").unwrap();
        let ctx = FunctionContext {
            tree: &t,
            phi: None,
            seed: 0,
        };
        assert_eq!(resolve_function(&spec, &ctx, "f").unwrap().values(), f.values());
    }

    #[test]
    fn weight_lives_on_map_source() {
        let loaded = resolve_specs(
            &TreeSpec::zline(8),
            Some(&FunctionSpec::builtin("reciprocal", serde_json::Value::Null)),
            Some(&MapSpec::builtin("double", serde_json::Value::Null)),
            0,
        )
        .unwrap();
        assert_eq!(loaded.psi.tree().truncation_depth(), 4);
        assert_eq!(loaded.tree.truncation_depth(), 8);
    }
}
