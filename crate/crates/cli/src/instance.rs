//! Instance files: schema validation, then typed parsing.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::report::sha256_hex;

pub const INSTANCE_SCHEMA: &str = include_str!("../schemas/instance.schema.json");
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report.schema.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Instance {
    GroupSets {
        moduli: Vec<u64>,
        sets: Vec<Vec<Vec<i64>>>,
    },
    BasisSystem {
        p: u64,
        k: usize,
        r: usize,
        bases: Vec<Vec<Vec<i64>>>,
    },
    BlockLattice {
        p: u64,
        k: usize,
        r: usize,
        generators: Vec<Vec<i64>>,
    },
    IntLattice {
        dim: usize,
        basis: Vec<Vec<i64>>,
    },
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::GroupSets { .. } => "group_sets",
            Instance::BasisSystem { .. } => "basis_system",
            Instance::BlockLattice { .. } => "block_lattice",
            Instance::IntLattice { .. } => "int_lattice",
        }
    }
}

pub struct Loaded {
    pub instance: Instance,
    pub digest: String,
}

fn schema_errors(schema_src: &str, value: &Value) -> Vec<String> {
    let schema: Value = serde_json::from_str(schema_src).expect("bundled schema is valid JSON");
    errors_against(&schema, value)
}

fn errors_against(schema: &Value, value: &Value) -> Vec<String> {
    let validator = jsonschema::validator_for(schema).expect("bundled schema compiles");
    validator
        .iter_errors(value)
        .map(|e| {
            let path = e.instance_path().to_string();
            format!("{}: {}", if path.is_empty() { "/" } else { path.as_str() }, e)
        })
        .collect()
}

/// Schema errors for an instance. A failed `oneOf` says little, so when the
/// `kind` names a known variant the errors come from that variant alone.
fn instance_errors(value: &Value) -> Vec<String> {
    let mut schema: Value = serde_json::from_str(INSTANCE_SCHEMA).expect("bundled schema is valid JSON");
    let errors = errors_against(&schema, value);
    if errors.is_empty() {
        return errors;
    }
    let kind = value.get("kind").and_then(Value::as_str);
    match kind.filter(|k| schema["$defs"].get(*k).is_some()) {
        Some(k) => {
            let obj = schema.as_object_mut().expect("schema is an object");
            obj.remove("oneOf");
            obj.insert("$ref".into(), Value::String(format!("#/$defs/{k}")));
            let narrowed = errors_against(&schema, value);
            if narrowed.is_empty() {
                errors
            } else {
                narrowed
            }
        }
        None => vec![format!(
            "/kind: expected one of group_sets, basis_system, block_lattice, int_lattice, got {}",
            value.get("kind").map_or("nothing".to_string(), Value::to_string)
        )],
    }
}

pub fn validate_report(value: &Value) -> Vec<String> {
    schema_errors(REPORT_SCHEMA, value)
}

/// Reads, hashes, schema-validates and parses an instance file.
pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::validation("unreadable_input", format!("{}: {e}", path.display())))?;
    parse(&bytes)
}

pub fn parse(bytes: &[u8]) -> Result<Loaded, CliError> {
    let digest = sha256_hex(bytes);
    let value: Value =
        serde_json::from_slice(bytes).map_err(|e| CliError::validation("invalid_json", e.to_string()))?;
    let errors = instance_errors(&value);
    if !errors.is_empty() {
        return Err(CliError::validation("schema_violation", errors.join("; ")));
    }
    let instance: Instance =
        serde_json::from_value(value).map_err(|e| CliError::validation("schema_violation", e.to_string()))?;
    check_shapes(&instance)?;
    Ok(Loaded { instance, digest })
}

fn shape_error(msg: impl Into<String>) -> CliError {
    CliError::validation("dimension_mismatch", msg.into())
}

/// Length consistency that the schema cannot express.
fn check_shapes(inst: &Instance) -> Result<(), CliError> {
    match inst {
        Instance::GroupSets { moduli, sets } => {
            for (i, set) in sets.iter().enumerate() {
                if let Some(v) = set.iter().find(|v| v.len() != moduli.len()) {
                    return Err(shape_error(format!(
                        "set {i} has an element with {} coordinates, expected {}",
                        v.len(),
                        moduli.len()
                    )));
                }
            }
        }
        Instance::BasisSystem { k, r, bases, .. } => {
            if bases.len() != *k {
                return Err(shape_error(format!("k = {k} but {} bases given", bases.len())));
            }
            for (i, b) in bases.iter().enumerate() {
                if b.iter().any(|v| v.len() != *r) {
                    return Err(shape_error(format!(
                        "basis {i} has a vector whose length is not r = {r}"
                    )));
                }
            }
        }
        Instance::BlockLattice { k, r, generators, .. } => {
            if generators.iter().any(|g| g.len() != k * r) {
                return Err(shape_error(format!("generators must have length k*r = {}", k * r)));
            }
        }
        Instance::IntLattice { dim, basis } => {
            if basis.iter().any(|g| g.len() != *dim) {
                return Err(shape_error(format!("basis vectors must have length dim = {dim}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_each_kind() {
        let docs = [
            r#"{"kind":"group_sets","moduli":[3],"sets":[[[1]],[[1]]]}"#,
            r#"{"kind":"basis_system","p":3,"k":2,"r":1,"bases":[[[1]],[[2]]]}"#,
            r#"{"kind":"block_lattice","p":5,"k":3,"r":1,"generators":[[1,0,4],[0,1,4]]}"#,
            r#"{"kind":"int_lattice","dim":2,"basis":[[1,2],[0,3]]}"#,
        ];
        for d in docs {
            parse(d.as_bytes()).unwrap();
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let bad = [
            (
                r#"{"kind":"group_sets","moduli":[1],"sets":[[[0]]]}"#,
                "schema_violation",
            ),
            (
                r#"{"kind":"group_sets","moduli":[3],"sets":[[[0]]],"extra":1}"#,
                "schema_violation",
            ),
            (r#"{"kind":"nope"}"#, "schema_violation"),
            (
                r#"{"kind":"group_sets","moduli":[3,3],"sets":[[[0]]]}"#,
                "dimension_mismatch",
            ),
            (
                r#"{"kind":"basis_system","p":3,"k":2,"r":1,"bases":[[[1]]]}"#,
                "dimension_mismatch",
            ),
            ("{not json", "invalid_json"),
        ];
        for (doc, code) in bad {
            let err = parse(doc.as_bytes()).err().expect(doc);
            assert_eq!(err.code, code, "{doc}");
            assert_eq!(err.exit, 2);
        }
    }

    #[test]
    fn digest_is_of_raw_bytes() {
        let a = parse(br#"{"kind":"int_lattice","dim":1,"basis":[[2]]}"#).unwrap();
        let b = parse(br#"{"kind":"int_lattice", "dim":1,"basis":[[2]]}"#).unwrap();
        assert_ne!(a.digest, b.digest);
        assert_eq!(a.instance, b.instance);
    }
}
