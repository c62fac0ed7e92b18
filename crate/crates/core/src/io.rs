//! JSON formats for graphs, structures and enumeration results.
//!
//! Graphs are read from `{"n": N, "edges": [[i, j, mult], ...]}` with
//! 1-based vertices, or from `{"matrix": [[...], ...]}`. Structures are
//! `{"r": [...], "d": [...]}`; results are
//! `{"count": N, "complete": bool, "method": "...", "structures": [...]}`.
//! Integers of any size are written as plain JSON numbers.

use std::collections::BTreeSet;
use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::multigraph::{strip_loops, Multigraph};
use crate::scalar::Int;
use crate::structures::{ArithStructure, EnumerationResult, Method};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn to_int(v: &Value, what: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            BigInt::from_str(&n.to_string()).map_err(|_| perr(format!("{what}: {n} is not an integer")))
        }
        _ => Err(perr(format!("{what}: expected an integer, found {v}"))),
    }
}

fn to_usize(v: &Value, what: &str) -> Result<usize> {
    to_int(v, what)?
        .try_into()
        .map_err(|_| perr(format!("{what}: {v} is not a valid count")))
}

fn int_list(v: &Value, what: &str) -> Result<Vec<BigInt>> {
    v.as_array()
        .ok_or_else(|| perr(format!("{what}: expected an array")))?
        .iter()
        .map(|x| to_int(x, what))
        .collect()
}

/// Integer as a JSON number, exact at any size.
pub fn number<T: Int>(v: &T) -> Value {
    Value::Number(Number::from_str(&v.to_string()).expect("integers are valid JSON numbers"))
}

pub fn numbers<T: Int>(v: &[T]) -> Value {
    Value::Array(v.iter().map(number).collect())
}

/// A parsed graph plus the 0-based vertices whose loops were dropped.
#[derive(Clone, Debug)]
pub struct GraphInput {
    pub graph: Multigraph<BigInt>,
    pub stripped_loops: Vec<usize>,
}

pub fn parse_graph(text: &str) -> Result<GraphInput> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr(format!("graph JSON: {e}")))?;
    let obj = v.as_object().ok_or_else(|| perr("graph JSON: expected an object"))?;
    if let Some(rows) = obj.get("matrix") {
        let rows = rows.as_array().ok_or_else(|| perr("matrix: expected an array of rows"))?;
        let mut matrix = rows.iter().map(|r| int_list(r, "matrix")).collect::<Result<Vec<_>>>()?;
        if matrix.iter().any(|r| r.len() != matrix.len()) {
            return Err(Error::NotSquare);
        }
        let stripped = strip_loops(&mut matrix);
        return Ok(GraphInput { graph: Multigraph::from_matrix(matrix)?, stripped_loops: stripped });
    }
    let n = to_usize(obj.get("n").ok_or_else(|| perr("graph JSON: missing \"n\""))?, "n")?;
    let edges = obj
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| perr("graph JSON: missing \"edges\" array"))?;
    let mut seen = BTreeSet::new();
    let mut list = Vec::new();
    let mut stripped = Vec::new();
    for e in edges {
        let t = e.as_array().filter(|t| t.len() == 3).ok_or_else(|| perr(format!("edge {e}: expected [i, j, mult]")))?;
        let (i, j) = (to_usize(&t[0], "edge endpoint")?, to_usize(&t[1], "edge endpoint")?);
        let mult = to_int(&t[2], "edge multiplicity")?;
        for v in [i, j] {
            if v == 0 || v > n {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
        }
        if mult < BigInt::from(1) {
            return Err(perr(format!("edge {e}: multiplicity must be at least 1")));
        }
        let key = (i.min(j), i.max(j));
        if !seen.insert(key) {
            return Err(perr(format!("edge ({}, {}) listed twice", key.0, key.1)));
        }
        if i == j {
            stripped.push(i - 1);
            continue;
        }
        list.push((i - 1, j - 1, mult));
    }
    Ok(GraphInput { graph: Multigraph::from_edges(n, &list)?, stripped_loops: stripped })
}

/// Edge-list JSON, 1-based with `i < j`.
pub fn graph_json<T: Int>(g: &Multigraph<T>) -> Value {
    let mut edges = Vec::new();
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            let m = g.mult(i, j);
            if !m.is_zero() {
                edges.push(json!([i + 1, j + 1, number(m)]));
            }
        }
    }
    json!({ "n": g.n(), "edges": edges })
}

/// `r` and, when present, `d` of a structure file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureInput {
    pub r: Vec<BigInt>,
    pub d: Option<Vec<BigInt>>,
}

pub fn parse_structure(text: &str) -> Result<StructureInput> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr(format!("structure JSON: {e}")))?;
    let obj = v.as_object().ok_or_else(|| perr("structure JSON: expected an object"))?;
    let r = int_list(obj.get("r").ok_or_else(|| perr("structure JSON: missing \"r\""))?, "r")?;
    let d = obj.get("d").map(|d| int_list(d, "d")).transpose()?;
    Ok(StructureInput { r, d })
}

pub fn structure_json<T: Int>(s: &ArithStructure<T>) -> Value {
    json!({ "r": numbers(&s.r), "d": numbers(&s.d) })
}

pub fn result_json<T: Int>(res: &EnumerationResult<T>) -> Value {
    let mut obj = Map::new();
    obj.insert("count".into(), json!(res.count()));
    obj.insert("complete".into(), json!(res.complete));
    obj.insert("method".into(), json!(res.method.to_string()));
    obj.insert("structures".into(), Value::Array(res.structures.iter().map(structure_json).collect()));
    obj.insert("elapsed_ms".into(), json!(res.elapsed.as_millis() as u64));
    Value::Object(obj)
}

/// Reads back the output of [`result_json`]; timing is not restored.
pub fn parse_result(text: &str) -> Result<EnumerationResult<BigInt>> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr(format!("result JSON: {e}")))?;
    let method: Method = serde_json::from_value(v.get("method").cloned().unwrap_or(Value::Null))
        .map_err(|e| perr(format!("method: {e}")))?;
    let complete = v.get("complete").and_then(Value::as_bool).ok_or_else(|| perr("missing \"complete\""))?;
    let structures = v
        .get("structures")
        .and_then(Value::as_array)
        .ok_or_else(|| perr("missing \"structures\""))?
        .iter()
        .map(|s| {
            let inp = parse_structure(&s.to_string())?;
            let d = inp.d.ok_or_else(|| perr("structure without \"d\""))?;
            Ok(ArithStructure::new(inp.r, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let count = v.get("count").map(|c| to_usize(c, "count")).transpose()?;
    if count.is_some_and(|c| c != structures.len()) {
        return Err(perr("count does not match the structure list"));
    }
    Ok(EnumerationResult { method, complete, structures, elapsed: Default::default() })
}
