//! JSON file formats. Output is canonical: object keys sorted, compact, and
//! scalars written as reduced literal strings, so reruns are byte-identical.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::component::{classify, ComponentError, ComponentKind, ComponentStructure};
use crate::encoding::GridEncoding;
use crate::homology::{FilteredComplex, HomologyError};
use crate::linalg::{Field, LinalgError, Matrix};
use crate::pmodule::{ModuleError, NaturalTransformation, PersistenceModule};
use crate::poset::{Poset, PosetError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad format: {0}")]
    Format(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Component(#[from] ComponentError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

pub fn canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("values serialise")
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialise")
}

pub fn read_json(path: &Path) -> Result<Value, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes `text` to `path`, creating missing parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    let err = |source| IoError::File {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(err)?;
    }
    std::fs::write(path, text).map_err(err)
}

fn obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object().ok_or_else(|| bad(format!("{what} must be an object")))
}

fn arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn string<'a>(v: &'a Value, what: &str) -> Result<&'a str, IoError> {
    v.as_str().ok_or_else(|| bad(format!("{what} must be a string")))
}

fn uint(v: &Value, what: &str) -> Result<usize, IoError> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| bad(format!("{what} must be a non-negative integer")))
}

pub fn poset_to_json(p: &Poset) -> Value {
    let covers: Vec<Value> = p
        .covers()
        .iter()
        .map(|&(a, b)| json!([p.id(a), p.id(b)]))
        .collect();
    json!({ "elements": p.ids(), "covers": covers })
}

pub fn poset_from_json(v: &Value) -> Result<Poset, IoError> {
    let o = obj(v, "poset")?;
    let ids = arr(o.get("elements").ok_or_else(|| bad("poset needs \"elements\""))?, "elements")?
        .iter()
        .map(|x| string(x, "element id").map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    let covers = match o.get("covers") {
        None => Vec::new(),
        Some(c) => arr(c, "covers")?
            .iter()
            .map(|pair| match pair.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok((string(a, "cover")?.to_string(), string(b, "cover")?.to_string())),
                _ => Err(bad("each cover is a pair [lower, upper]")),
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok(Poset::new(&ids, &covers)?)
}

/// Poset given inline or as a path relative to `base`.
fn poset_field(v: Option<&Value>, base: Option<&Path>) -> Result<Poset, IoError> {
    match v {
        Some(Value::String(rel)) => {
            let path = base.map_or_else(|| PathBuf::from(rel), |b| b.join(rel));
            poset_from_json(&read_json(&path)?)
        }
        Some(x) => poset_from_json(x),
        None => Err(bad("missing \"poset\"")),
    }
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array(m.row(r).iter().map(|x| Value::String(x.to_literal())).collect()))
            .collect(),
    )
}

/// Rows of literal strings or integers; a matrix with no rows is `[]`.
pub fn matrix_from_json(v: &Value, field: Field, rows: usize, cols: usize) -> Result<Matrix, IoError> {
    let data = arr(v, "matrix")?;
    if data.len() != rows {
        return Err(bad(format!("matrix has {} rows, expected {rows}", data.len())));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for row in data {
        let row = arr(row, "matrix row")?;
        if row.len() != cols {
            return Err(bad(format!("matrix row has {} entries, expected {cols}", row.len())));
        }
        for x in row {
            let lit = match x {
                Value::String(s) => s.clone(),
                Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
                _ => return Err(bad("matrix entries are integers or literal strings")),
            };
            entries.push(field.parse(&lit)?);
        }
    }
    Ok(Matrix::from_rows(field, rows, cols, entries)?)
}

fn cover_key(p: &Poset, a: usize, b: usize) -> String {
    format!("{}->{}", p.id(a), p.id(b))
}

pub fn module_to_json(m: &PersistenceModule) -> Value {
    let p = m.poset();
    let dims: Map<String, Value> = (0..p.len()).map(|e| (p.id(e).to_string(), json!(m.dim(e)))).collect();
    let maps: Map<String, Value> = p
        .covers()
        .iter()
        .enumerate()
        .map(|(ci, &(a, b))| (cover_key(p, a, b), matrix_to_json(m.map(ci))))
        .collect();
    json!({
        "field": m.field().to_string(),
        "poset": poset_to_json(p),
        "dims": dims,
        "maps": maps,
    })
}

/// Reads a module. `field` overrides the file's field; maps missing from the
/// file are zero.
pub fn module_from_json(
    v: &Value,
    base: Option<&Path>,
    field: Option<Field>,
) -> Result<PersistenceModule, IoError> {
    let o = obj(v, "module")?;
    let field = match field {
        Some(f) => f,
        None => match o.get("field") {
            Some(f) => string(f, "field")?.parse()?,
            None => Field::Rationals,
        },
    };
    let poset = Arc::new(poset_field(o.get("poset"), base)?);
    module_over(o, poset, field)
}

fn module_over(
    o: &Map<String, Value>,
    poset: Arc<Poset>,
    field: Field,
) -> Result<PersistenceModule, IoError> {
    let dims_v = obj(o.get("dims").ok_or_else(|| bad("missing \"dims\""))?, "dims")?;
    let mut dims = vec![0usize; poset.len()];
    for (id, d) in dims_v {
        dims[poset.index_of(id)?] = uint(d, "dimension")?;
    }
    let empty = Map::new();
    let maps_v = match o.get("maps") {
        Some(m) => obj(m, "maps")?,
        None => &empty,
    };
    for key in maps_v.keys() {
        let (a, b) = key.split_once("->").ok_or_else(|| bad(format!("map key {key:?} is not \"lo->hi\"")))?;
        let (a, b) = (poset.index_of(a)?, poset.index_of(b)?);
        if poset.cover_index(a, b).is_none() {
            return Err(bad(format!("{key} is not a cover relation")));
        }
    }
    let maps = poset
        .covers()
        .iter()
        .map(|&(a, b)| match maps_v.get(&cover_key(&poset, a, b)) {
            Some(x) => matrix_from_json(x, field, dims[b], dims[a]),
            None => Ok(Matrix::zeros(field, dims[b], dims[a])),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PersistenceModule::new(poset, field, dims, maps)?)
}

pub fn read_module(path: &Path, field: Option<Field>) -> Result<PersistenceModule, IoError> {
    module_from_json(&read_json(path)?, path.parent(), field)
}

fn kind_name(k: ComponentKind) -> &'static str {
    match k {
        ComponentKind::Component => "Component",
        ComponentKind::SemiComponent => "SemiComponent",
    }
}

/// Module file plus `"kind"` and `"generators"`.
pub fn structure_to_json(cs: &ComponentStructure) -> Value {
    let mut v = module_to_json(cs.module());
    let p = cs.module().poset();
    let gens: Vec<Value> = cs.generators().iter().map(|&(e, k)| json!([p.id(e), k])).collect();
    let o = v.as_object_mut().expect("object");
    o.insert("kind".into(), json!(kind_name(cs.kind())));
    o.insert("generators".into(), Value::Array(gens));
    v
}

/// Reads a module and classifies it; stored kind and generators, when
/// present, must agree with the recomputed ones.
pub fn structure_from_json(
    v: &Value,
    base: Option<&Path>,
    field: Option<Field>,
) -> Result<ComponentStructure, IoError> {
    let m = Arc::new(module_from_json(v, base, field)?);
    let cs = classify(&m)?;
    let o = obj(v, "module")?;
    if let Some(k) = o.get("kind") {
        if string(k, "kind")? != kind_name(cs.kind()) {
            return Err(bad(format!("stored kind {k} disagrees with the recomputed kind")));
        }
    }
    if let Some(g) = o.get("generators") {
        let p = m.poset();
        let stored = arr(g, "generators")?
            .iter()
            .map(|x| match x.as_array().map(Vec::as_slice) {
                Some([e, k]) => Ok((p.index_of(string(e, "generator element")?)?, uint(k, "generator index")?)),
                _ => Err(bad("each generator is [element, index]")),
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        if stored != cs.generators() {
            return Err(bad("stored generators disagree with the recomputed generators"));
        }
    }
    Ok(cs)
}

pub fn complex_to_json(x: &FilteredComplex) -> Value {
    let p = x.poset();
    let levels: Map<String, Value> = (0..p.len())
        .map(|e| {
            let edges: Vec<Value> = x.edges(e).iter().map(|(u, v)| json!([u, v])).collect();
            (
                p.id(e).to_string(),
                json!({ "vertices": x.vertices(e), "edges": edges }),
            )
        })
        .collect();
    json!({ "poset": poset_to_json(p), "cumulative": true, "levels": levels })
}

/// Levels are cumulative unless `"cumulative": false`, in which case each
/// level lists only what appears there. Missing levels are empty.
pub fn complex_from_json(v: &Value, base: Option<&Path>) -> Result<FilteredComplex, IoError> {
    let o = obj(v, "complex")?;
    let poset = Arc::new(poset_field(o.get("poset"), base)?);
    let cumulative = match o.get("cumulative") {
        None => true,
        Some(c) => c.as_bool().ok_or_else(|| bad("\"cumulative\" must be a boolean"))?,
    };
    let n = poset.len();
    let mut vertices = vec![BTreeSet::new(); n];
    let mut edges = vec![Vec::new(); n];
    if let Some(levels) = o.get("levels") {
        for (id, level) in obj(levels, "levels")? {
            let e = poset.index_of(id)?;
            let lv = obj(level, "level")?;
            if let Some(vs) = lv.get("vertices") {
                for x in arr(vs, "vertices")? {
                    vertices[e].insert(string(x, "vertex")?.to_string());
                }
            }
            if let Some(es) = lv.get("edges") {
                for pair in arr(es, "edges")? {
                    match pair.as_array().map(Vec::as_slice) {
                        Some([a, b]) => edges[e].push((string(a, "vertex")?.to_string(), string(b, "vertex")?.to_string())),
                        _ => return Err(bad("each edge is a pair of vertex ids")),
                    }
                }
            }
        }
    }
    Ok(if cumulative {
        FilteredComplex::new(poset, vertices, edges)?
    } else {
        FilteredComplex::from_deltas(poset, vertices, edges)?
    })
}

pub fn encoding_to_json(enc: &GridEncoding, source: &Poset) -> Value {
    let pi: Map<String, Value> = (0..enc.grid.len())
        .map(|y| {
            let key = enc
                .coords(y)
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",");
            (key, json!(source.id(enc.pi[y])))
        })
        .collect();
    let chains: Vec<Vec<&str>> = enc
        .chains
        .iter()
        .map(|c| c.iter().map(|&e| source.id(e)).collect())
        .collect();
    json!({
        "axes": enc.axes(),
        "bounds": enc.bounds,
        "chains": chains,
        "pi": pi,
        "module": module_to_json(&enc.module),
    })
}

pub fn transformation_to_json(t: &NaturalTransformation) -> Value {
    let p = t.source().poset();
    let comps: Map<String, Value> = (0..p.len())
        .map(|e| (p.id(e).to_string(), matrix_to_json(t.component(e))))
        .collect();
    json!({ "components": comps })
}

/// Per-element matrices keyed by element id, of shape `rows(e) x cols(e)`;
/// missing elements are zero.
pub fn matrices_from_json(
    v: &Value,
    poset: &Poset,
    field: Field,
    shape: impl Fn(usize) -> (usize, usize),
) -> Result<Vec<Matrix>, IoError> {
    let o = obj(v, "components")?;
    for id in o.keys() {
        poset.index_of(id)?;
    }
    (0..poset.len())
        .map(|e| {
            let (r, c) = shape(e);
            match o.get(poset.id(e)) {
                Some(x) => matrix_from_json(x, field, r, c),
                None => Ok(Matrix::zeros(field, r, c)),
            }
        })
        .collect()
}

/// A transformation file `{"components": {id: matrix}}` between given modules.
pub fn transformation_from_json(
    v: &Value,
    source: &Arc<PersistenceModule>,
    target: &Arc<PersistenceModule>,
) -> Result<NaturalTransformation, IoError> {
    let comps_v = obj(v, "transformation")?
        .get("components")
        .ok_or_else(|| bad("missing \"components\""))?;
    let comps = matrices_from_json(comps_v, source.poset(), source.field(), |e| {
        (target.dim(e), source.dim(e))
    })?;
    Ok(NaturalTransformation::new(source.clone(), target.clone(), comps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_round_trip_is_byte_stable() {
        let q = Field::Rationals;
        let p = Arc::new(Poset::chain(&["a", "b", "c"]).unwrap());
        let maps = vec![
            Matrix::from_i64(q, &[&[1], &[-1]]),
            Matrix::zeros(q, 0, 2),
        ];
        let m = PersistenceModule::new(p, q, vec![1, 2, 0], maps).unwrap();
        let text = canonical(&module_to_json(&m));
        let back = module_from_json(&serde_json::from_str(&text).unwrap(), None, None).unwrap();
        assert_eq!(back, m);
        assert_eq!(canonical(&module_to_json(&back)), text);
        assert!(text.contains("\"b->c\":[]"));
    }

    #[test]
    fn integers_and_field_override() {
        let v = json!({
            "poset": {"elements": ["a", "b"], "covers": [["a", "b"]]},
            "dims": {"a": 1, "b": 2},
            "maps": {"a->b": [[-1], ["1/1"]]}
        });
        let m = module_from_json(&v, None, Some(Field::prime(11).unwrap())).unwrap();
        assert_eq!(m.map(0).get(0, 0).as_residue(), Some(10));
        let bad = json!({"poset": {"elements": ["a"]}, "dims": {"z": 1}});
        assert!(module_from_json(&bad, None, None).is_err());
    }

    #[test]
    fn delta_complexes() {
        let v = json!({
            "poset": {"elements": ["p", "q"], "covers": [["p", "q"]]},
            "cumulative": false,
            "levels": {"p": {"vertices": ["u", "v"]}, "q": {"edges": [["u", "v"]]}}
        });
        let x = complex_from_json(&v, None).unwrap();
        assert_eq!(x.vertices(1).len(), 2);
        let again = complex_from_json(&complex_to_json(&x), None).unwrap();
        assert_eq!(again, x);
    }
}
