//! Class file format: UTF-8 JSON `{"g":..,"n":..,"coeffs":{key:rational}}`.
//!
//! Keys: `lambda`, `delta0`, `omega:<i>`, `psi:<i>` (accepted on input only,
//! expanded on ingest), `delta:<i>:{a,b,...}`. Serialization always emits
//! canonical keys with ascending marks, in canonical basis order; parsing is
//! lenient about non-canonical but *stable* boundary indices (they are
//! canonicalized) and rejects unknown keys and unstable indices.

use serde_json::{Map, Value};

use crate::basis::{BasisElement, BoundaryIndex, MarkSet, SpaceId};
use crate::class::DivisorClass;
use crate::error::{Error, Result};
use crate::families::{Component, ComponentTree, Edge, MovingPoint, TestFamily};
use crate::maps::PullbackMap;
use crate::rational::{format_rational, parse_rational};

/// Renders a basis element as a class-file key.
pub fn element_key(e: &BasisElement) -> String {
    match e {
        BasisElement::Lambda => "lambda".to_string(),
        BasisElement::DeltaIrr => "delta0".to_string(),
        BasisElement::Omega(i) => format!("omega:{i}"),
        BasisElement::Psi(i) => format!("psi:{i}"),
        BasisElement::Boundary(b) => format!("delta:{}:{}", b.genus, b.marks),
    }
}

fn parse_mark_set(text: &str) -> Result<MarkSet> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| Error::ParseError(format!("mark set `{text}` is not brace-delimited")))?;
    if inner.is_empty() {
        return Ok(MarkSet::EMPTY);
    }
    let mut marks = Vec::new();
    for part in inner.split(',') {
        let m: u32 = part
            .trim()
            .parse()
            .map_err(|_| Error::ParseError(format!("bad mark `{part}` in `{text}`")))?;
        marks.push(m);
    }
    MarkSet::from_marks(marks).map_err(|e| Error::ParseError(e.to_string()))
}

/// Parses a class-file key into a (possibly non-canonical) basis element.
pub fn parse_element_key(key: &str) -> Result<BasisElement> {
    match key {
        "lambda" => return Ok(BasisElement::Lambda),
        "delta0" => return Ok(BasisElement::DeltaIrr),
        _ => {}
    }
    if let Some(rest) = key.strip_prefix("omega:") {
        let i: u32 = rest
            .parse()
            .map_err(|_| Error::ParseError(format!("bad omega index in `{key}`")))?;
        return Ok(BasisElement::Omega(i));
    }
    if let Some(rest) = key.strip_prefix("psi:") {
        let i: u32 = rest
            .parse()
            .map_err(|_| Error::ParseError(format!("bad psi index in `{key}`")))?;
        return Ok(BasisElement::Psi(i));
    }
    if let Some(rest) = key.strip_prefix("delta:") {
        let (genus_text, marks_text) = rest
            .split_once(':')
            .ok_or_else(|| Error::ParseError(format!("malformed boundary key `{key}`")))?;
        let genus: u32 = genus_text
            .parse()
            .map_err(|_| Error::ParseError(format!("bad side genus in `{key}`")))?;
        let marks = parse_mark_set(marks_text)?;
        return Ok(BasisElement::Boundary(BoundaryIndex { genus, marks }));
    }
    Err(Error::ParseError(format!("unknown coefficient key `{key}`")))
}

/// Serializes a class to a JSON value with deterministic key order.
pub fn class_to_value(d: &DivisorClass) -> Value {
    let mut coeffs = Map::new();
    for (k, v) in d.iter() {
        coeffs.insert(element_key(k), Value::String(format_rational(v)));
    }
    let mut doc = Map::new();
    doc.insert("g".into(), Value::from(d.space().g));
    doc.insert("n".into(), Value::from(d.space().n));
    doc.insert("coeffs".into(), Value::Object(coeffs));
    Value::Object(doc)
}

/// Serializes a class to its canonical one-line JSON text.
pub fn serialize_class(d: &DivisorClass) -> String {
    class_to_value(d).to_string()
}

fn get_u32(map: &Map<String, Value>, field: &str) -> Result<u32> {
    map.get(field)
        .and_then(Value::as_u64)
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| Error::ParseError(format!("missing or invalid `{field}` field")))
}

/// Parses a class from a JSON value.
pub fn class_from_value(value: &Value) -> Result<DivisorClass> {
    let map = value
        .as_object()
        .ok_or_else(|| Error::ParseError("class document must be a JSON object".into()))?;
    for key in map.keys() {
        if key != "g" && key != "n" && key != "coeffs" {
            return Err(Error::ParseError(format!("unknown top-level field `{key}`")));
        }
    }
    let g = get_u32(map, "g")?;
    let n = get_u32(map, "n")?;
    let space = SpaceId::new(g, n).map_err(|e| Error::ParseError(e.to_string()))?;
    let coeffs = map
        .get("coeffs")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::ParseError("missing `coeffs` object".into()))?;
    let mut d = DivisorClass::zero(space);
    for (key, raw) in coeffs {
        let element = parse_element_key(key)?;
        let text = raw
            .as_str()
            .ok_or_else(|| Error::ParseError(format!("coefficient of `{key}` must be a string")))?;
        let coeff = parse_rational(text)?;
        d.add_term(element, coeff)
            .map_err(|e| Error::ParseError(format!("key `{key}`: {e}")))?;
    }
    Ok(d)
}

/// Parses a class from JSON text.
pub fn parse_class(text: &str) -> Result<DivisorClass> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::ParseError(format!("invalid JSON: {e}")))?;
    class_from_value(&value)
}

/// Parses a class and checks it lives on the expected space.
pub fn parse_class_on(text: &str, space: SpaceId) -> Result<DivisorClass> {
    let d = parse_class(text)?;
    if d.space() != space {
        return Err(Error::SpaceMismatch(format!(
            "expected a class on {space}, found {}",
            d.space()
        )));
    }
    Ok(d)
}

/// Serializes a test family: components with genus and mark lists, edge
/// list, base component, and the moving-point selector.
pub fn family_to_value(f: &TestFamily) -> Value {
    let tree = f.tree();
    let components: Vec<Value> = tree
        .components()
        .iter()
        .map(|c| {
            let mut doc = Map::new();
            doc.insert("genus".into(), Value::from(c.genus));
            doc.insert(
                "marks".into(),
                Value::Array(c.marks.iter().map(Value::from).collect()),
            );
            Value::Object(doc)
        })
        .collect();
    let edges: Vec<Value> = tree
        .edges()
        .iter()
        .map(|e| Value::Array(vec![Value::from(e.ends.0 as u64), Value::from(e.ends.1 as u64)]))
        .collect();
    let mut moving = Map::new();
    match f.moving() {
        MovingPoint::Mark(j) => moving.insert("mark".into(), Value::from(j)),
        MovingPoint::NodeEnd(k) => moving.insert("node-end".into(), Value::from(k as u64)),
    };
    let mut doc = Map::new();
    doc.insert("g".into(), Value::from(f.space().g));
    doc.insert("n".into(), Value::from(f.space().n));
    doc.insert("components".into(), Value::Array(components));
    doc.insert("edges".into(), Value::Array(edges));
    doc.insert("base".into(), Value::from(f.base() as u64));
    doc.insert("moving".into(), Value::Object(moving));
    Value::Object(doc)
}

fn get_usize(value: &Value, what: &str) -> Result<usize> {
    value
        .as_u64()
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| Error::ParseError(format!("{what} must be a nonnegative integer")))
}

/// Parses a test family, re-running all tree and family validation.
pub fn family_from_value(value: &Value) -> Result<TestFamily> {
    let map = value
        .as_object()
        .ok_or_else(|| Error::ParseError("family document must be a JSON object".into()))?;
    for key in map.keys() {
        if !matches!(key.as_str(), "g" | "n" | "components" | "edges" | "base" | "moving") {
            return Err(Error::ParseError(format!("unknown family field `{key}`")));
        }
    }
    let g = get_u32(map, "g")?;
    let n = get_u32(map, "n")?;
    let space = SpaceId::new(g, n).map_err(|e| Error::ParseError(e.to_string()))?;

    let mut components = Vec::new();
    for doc in map
        .get("components")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::ParseError("missing `components` array".into()))?
    {
        let doc = doc
            .as_object()
            .ok_or_else(|| Error::ParseError("component must be an object".into()))?;
        let genus = get_u32(doc, "genus")?;
        let mut marks = MarkSet::EMPTY;
        for m in doc
            .get("marks")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::ParseError("component needs a `marks` array".into()))?
        {
            let m = m
                .as_u64()
                .and_then(|v| u32::try_from(v).ok())
                .ok_or_else(|| Error::ParseError("marks must be integers".into()))?;
            marks = marks
                .with(m)
                .map_err(|e| Error::ParseError(e.to_string()))?;
        }
        components.push(Component { genus, marks });
    }

    let mut edges = Vec::new();
    for doc in map
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::ParseError("missing `edges` array".into()))?
    {
        let pair = doc
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::ParseError("edge must be a two-element array".into()))?;
        edges.push(Edge {
            ends: (get_usize(&pair[0], "edge end")?, get_usize(&pair[1], "edge end")?),
        });
    }

    let base = get_usize(
        map.get("base")
            .ok_or_else(|| Error::ParseError("missing `base` field".into()))?,
        "`base`",
    )?;
    let moving_doc = map
        .get("moving")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::ParseError("missing `moving` object".into()))?;
    let moving = match (moving_doc.get("mark"), moving_doc.get("node-end")) {
        (Some(v), None) => MovingPoint::Mark(
            v.as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| Error::ParseError("`moving.mark` must be an integer".into()))?,
        ),
        (None, Some(v)) => MovingPoint::NodeEnd(get_usize(v, "`moving.node-end`")?),
        _ => {
            return Err(Error::ParseError(
                "`moving` must have exactly one of `mark` or `node-end`".into(),
            ))
        }
    };

    let tree = ComponentTree::new(space, components, edges)
        .map_err(|e| Error::ParseError(e.to_string()))?;
    TestFamily::new(tree, base, moving).map_err(|e| Error::ParseError(e.to_string()))
}

/// Serializes a family to its canonical one-line JSON text.
pub fn serialize_family(f: &TestFamily) -> String {
    family_to_value(f).to_string()
}

/// Parses a family from JSON text.
pub fn parse_family(text: &str) -> Result<TestFamily> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::ParseError(format!("invalid JSON: {e}")))?;
    family_from_value(&value)
}

/// Exports a pullback table: a manifest with source and destination spaces
/// and one class document per basis element of the source, in canonical
/// basis order.
pub fn pullback_table_to_value(map: &PullbackMap) -> Value {
    let mut rows = Map::new();
    for (element, image) in map.rows() {
        rows.insert(element_key(element), class_to_value(image));
    }
    let mut doc = Map::new();
    let (source, dest) = (map.source_space(), map.dest_space());
    doc.insert(
        "source".into(),
        Value::Object(Map::from_iter([
            ("g".to_string(), Value::from(source.g)),
            ("n".to_string(), Value::from(source.n)),
        ])),
    );
    doc.insert(
        "dest".into(),
        Value::Object(Map::from_iter([
            ("g".to_string(), Value::from(dest.g)),
            ("n".to_string(), Value::from(dest.n)),
        ])),
    );
    doc.insert("rows".into(), Value::Object(rows));
    Value::Object(doc)
}
