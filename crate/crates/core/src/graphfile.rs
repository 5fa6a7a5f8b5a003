//! JSON graph files.
//!
//! ```json
//! {
//!   "n": 2,
//!   "vertices": ["p", "q"],
//!   "edges": [{"from": "p", "to": "q", "alpha": [1, 0]}],
//!   "classes": {"f": {"p": [{"coeff": 1, "exp": [-1, 0]}],
//!                     "q": [{"coeff": "1", "exp": [1, 0]}]}}
//! }
//! ```
//!
//! Each listed edge implies its reverse with weight `-alpha`. Coefficients
//! may be JSON integers or decimal strings (for values beyond 64 bits).
//! Vertices missing from a class map get the value `0`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::charring::LaurentPoly;
use crate::error::{Error, Result};
use crate::gkm::{
    validate_action, validate_class, values_by_name, GkmAction, KClass, RawAction, Violation,
};
use crate::lattice::Weight;

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileEdge {
    from: String,
    to: String,
    alpha: Vec<i64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum Coeff {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileTerm {
    coeff: Coeff,
    exp: Vec<i64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct FileGraph {
    n: usize,
    vertices: Vec<String>,
    edges: Vec<FileEdge>,
    #[serde(default)]
    classes: BTreeMap<String, BTreeMap<String, Vec<FileTerm>>>,
}

/// A parsed graph file: raw action data plus named classes, keyed by
/// vertex name.
#[derive(Clone, Debug)]
pub struct GraphFile {
    pub raw: RawAction,
    pub classes: BTreeMap<String, HashMap<String, LaurentPoly>>,
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let file: FileGraph = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e)))?;
    let mut index = HashMap::new();
    for (i, v) in file.vertices.iter().enumerate() {
        if index.insert(v.clone(), i).is_some() {
            return Err(Error::Parse(format!("vertices: duplicate id `{v}`")));
        }
    }
    let lookup = |name: &str, field: String| -> Result<usize> {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Parse(format!("{field}: unknown vertex `{name}`")))
    };
    let mut edges = Vec::new();
    for (k, e) in file.edges.iter().enumerate() {
        let s = lookup(&e.from, format!("edges[{k}].from"))?;
        let t = lookup(&e.to, format!("edges[{k}].to"))?;
        if e.alpha.len() != file.n {
            return Err(Error::Parse(format!(
                "edges[{k}].alpha: expected {} entries, found {}",
                file.n,
                e.alpha.len()
            )));
        }
        edges.push((s, t, e.alpha.clone()));
    }
    let raw = RawAction::from_geometric(file.n, file.vertices.clone(), edges);

    let mut classes = BTreeMap::new();
    for (name, values) in &file.classes {
        let mut named = HashMap::new();
        for (vertex, terms) in values {
            lookup(vertex, format!("classes.{name}"))?;
            let mut poly = LaurentPoly::zero(file.n);
            for (k, t) in terms.iter().enumerate() {
                let field = format!("classes.{name}.{vertex}[{k}]");
                if t.exp.len() != file.n {
                    return Err(Error::Parse(format!(
                        "{field}.exp: expected {} entries, found {}",
                        file.n,
                        t.exp.len()
                    )));
                }
                let c = match &t.coeff {
                    Coeff::Int(i) => BigInt::from(*i),
                    Coeff::Text(s) => s.trim().parse::<BigInt>().map_err(|_| {
                        Error::Parse(format!("{field}.coeff: `{s}` is not an integer"))
                    })?,
                };
                poly.add_term(Weight(t.exp.clone()), c);
            }
            named.insert(vertex.clone(), poly);
        }
        classes.insert(name.clone(), named);
    }
    Ok(GraphFile { raw, classes })
}

impl GraphFile {
    pub fn action(&self) -> std::result::Result<Arc<GkmAction>, Vec<Violation>> {
        validate_action(&self.raw).map(Arc::new)
    }

    pub fn class_names(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(|s| s.as_str())
    }

    /// Looks up and validates a named class.
    pub fn class(&self, action: &Arc<GkmAction>, name: &str) -> Result<KClass> {
        let named = self.classes.get(name).ok_or_else(|| Error::Unknown {
            kind: "class",
            name: name.to_string(),
        })?;
        let values = values_by_name(action, named.clone())?;
        Ok(validate_class(action, values)?)
    }
}

/// Serializes an action (one entry per geometric edge) and some classes in
/// the file format, with coefficients as strings.
pub fn to_json(action: &GkmAction, classes: &[(&str, &KClass)]) -> Value {
    let edges: Vec<Value> = action
        .geometric_edges()
        .map(|e| {
            let ed = action.edge(e);
            json!({
                "from": action.vertex_name(ed.source),
                "to": action.vertex_name(ed.target),
                "alpha": action.axial(e).0,
            })
        })
        .collect();
    let mut cls = serde_json::Map::new();
    for (name, class) in classes {
        let mut m = serde_json::Map::new();
        for p in action.vertices() {
            m.insert(action.vertex_name(p).to_string(), class.value(p).to_json());
        }
        cls.insert(name.to_string(), Value::Object(m));
    }
    json!({
        "n": action.n(),
        "vertices": action.vertex_names(),
        "edges": edges,
        "classes": cls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cp1_fixture, flag3};

    const CP1: &str = r#"{
        "n": 2,
        "vertices": ["p", "q"],
        "edges": [{"from": "p", "to": "q", "alpha": [1, 0]}],
        "classes": {"f": {"p": [{"coeff": 1, "exp": [-1, 0]}],
                          "q": [{"coeff": "1", "exp": [1, 0]}]}}
    }"#;

    #[test]
    fn parses_cp1() {
        let g = parse_graph(CP1).unwrap();
        let action = g.action().unwrap();
        let (expected, class) = cp1_fixture();
        assert_eq!(*action, *expected);
        assert_eq!(
            g.class(&action, "f").unwrap().values(),
            class.class().values()
        );
        assert!(matches!(g.class(&action, "g"), Err(Error::Unknown { .. })));
    }

    #[test]
    fn reports_positions() {
        let err = parse_graph("{\n  \"n\": 2,\n  \"vertices\": [\"p\",]\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = parse_graph(&CP1.replace("\"to\": \"q\"", "\"to\": \"r\"")).unwrap_err();
        assert!(err.to_string().contains("edges[0].to"), "{err}");
        let err = parse_graph(&CP1.replace("\"exp\": [1, 0]", "\"exp\": [1]")).unwrap_err();
        assert!(err.to_string().contains("classes.f.q[0].exp"), "{err}");
    }

    #[test]
    fn round_trip() {
        let action = flag3();
        let one = KClass::constant(&action, &LaurentPoly::one(3));
        let text = to_json(&action, &[("one", &one)]).to_string();
        let g = parse_graph(&text).unwrap();
        let parsed = g.action().unwrap();
        assert_eq!(*parsed, *action);
        assert_eq!(g.class(&parsed, "one").unwrap(), one);
    }
}
