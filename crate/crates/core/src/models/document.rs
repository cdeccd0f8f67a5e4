//! JSON structure documents.
//!
//! ```json
//! {"kind": "credal",
//!  "worlds": [{"id": "1", "props": []}, {"id": "2", "props": ["q2"]}],
//!  "measures": [{"1": "1/2", "2": "1/2"}, {"2": "1"}]}
//! ```
//!
//! Weights are rational strings; worlds missing from a weight map get 0.

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{
    BeliefStructure, CredalStructure, ModelError, PossibilityStructure, ProbabilityStructure,
    Structure, World, WorldMask, WorldSet,
};
use crate::rational::{parse_rational, Rational};
use crate::syntax::parser::is_valid_prop_name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, LoadError> {
    Err(LoadError::Schema(msg.into()))
}

fn only_fields(obj: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<(), LoadError> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return schema(format!("unknown field `{key}` in {what}"));
        }
    }
    Ok(())
}

fn rational_field(v: &Value, what: &str) -> Result<Rational, LoadError> {
    match v {
        Value::String(s) => {
            parse_rational(s).or_else(|e| schema(format!("{what}: {e}")))
        }
        _ => schema(format!("{what} must be a rational string such as \"3/8\"")),
    }
}

fn load_worlds(v: Option<&Value>) -> Result<WorldSet, LoadError> {
    let Some(Value::Array(items)) = v else {
        return schema("`worlds` must be a list");
    };
    let mut worlds = Vec::new();
    for item in items {
        let Value::Object(obj) = item else {
            return schema("each world must be an object");
        };
        only_fields(obj, &["id", "props"], "world")?;
        let Some(Value::String(id)) = obj.get("id") else {
            return schema("world `id` must be a string");
        };
        let mut props = Vec::new();
        match obj.get("props") {
            None => {}
            Some(Value::Array(ps)) => {
                for p in ps {
                    match p {
                        Value::String(s) if is_valid_prop_name(s) => props.push(s.clone()),
                        _ => return schema(format!("world `{id}` has an invalid proposition {p}")),
                    }
                }
            }
            Some(_) => return schema(format!("`props` of world `{id}` must be a list")),
        }
        worlds.push(World::new(id.clone(), props));
    }
    Ok(WorldSet::new(worlds)?)
}

fn load_weights(worlds: &WorldSet, v: &Value, what: &str) -> Result<Vec<Rational>, LoadError> {
    let Value::Object(obj) = v else {
        return schema(format!("`{what}` must map world ids to rationals"));
    };
    let mut out = vec![Rational::from_integer(0.into()); worlds.len()];
    for (id, value) in obj {
        let i = worlds
            .index_of(id)
            .ok_or_else(|| ModelError::UnknownWorld(id.clone()))?;
        out[i] = rational_field(value, &format!("{what}[{id}]"))?;
    }
    Ok(out)
}

fn load_mass(worlds: &WorldSet, v: &Value) -> Result<Vec<(WorldMask, Rational)>, LoadError> {
    let Value::Array(items) = v else {
        return schema("`mass` must be a list of {\"set\", \"m\"} entries");
    };
    let mut focal = Vec::new();
    for item in items {
        let Value::Object(obj) = item else {
            return schema("mass entries must be objects");
        };
        only_fields(obj, &["set", "m"], "mass entry")?;
        let Some(Value::Array(ids)) = obj.get("set") else {
            return schema("mass entry `set` must be a list of world ids");
        };
        if ids.is_empty() {
            return schema("focal element empty");
        }
        let mut names = Vec::new();
        for id in ids {
            match id {
                Value::String(s) => names.push(s.as_str()),
                _ => return schema("world ids in `set` must be strings"),
            }
        }
        let mask = worlds.mask_of(&names)?;
        let Some(m) = obj.get("m") else {
            return schema("mass entry needs `m`");
        };
        focal.push((mask, rational_field(m, "m")?));
    }
    Ok(focal)
}

/// Parses and validates a structure document.
pub fn load_structure(text: &str) -> Result<Structure, LoadError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| LoadError::Json(e.to_string()))?;
    let Value::Object(obj) = &doc else {
        return schema("document must be an object");
    };
    let Some(Value::String(kind)) = obj.get("kind") else {
        return schema("`kind` must be one of prob, credal, belief, poss, plain");
    };
    let payload = match kind.as_str() {
        "plain" => None,
        "prob" => Some("mu"),
        "credal" => Some("measures"),
        "belief" => Some("mass"),
        "poss" => Some("poss"),
        other => return schema(format!("unknown kind `{other}`")),
    };
    let mut allowed = vec!["kind", "worlds"];
    allowed.extend(payload);
    only_fields(obj, &allowed, "structure")?;
    let worlds = load_worlds(obj.get("worlds"))?;
    let body = match payload {
        Some(key) => match obj.get(key) {
            Some(v) => v,
            None => return schema(format!("{kind} structure needs `{key}`")),
        },
        None => &Value::Null,
    };
    Ok(match kind.as_str() {
        "plain" => Structure::Plain(worlds),
        "prob" => {
            let mu = load_weights(&worlds, body, "mu")?;
            Structure::Prob(ProbabilityStructure::new(worlds, mu)?)
        }
        "credal" => {
            let Value::Array(items) = body else {
                return schema("`measures` must be a list");
            };
            let measures = items
                .iter()
                .enumerate()
                .map(|(k, m)| load_weights(&worlds, m, &format!("measures[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Structure::Credal(CredalStructure::new(worlds, measures)?)
        }
        "belief" => {
            let focal = load_mass(&worlds, body)?;
            Structure::Belief(BeliefStructure::new(worlds, focal)?)
        }
        "poss" => {
            let poss = load_weights(&worlds, body, "poss")?;
            Structure::Poss(PossibilityStructure::new(worlds, poss)?)
        }
        _ => unreachable!(),
    })
}

fn weights_doc(worlds: &WorldSet, values: &[Rational]) -> Value {
    let mut m = Map::new();
    for (w, v) in worlds.worlds().iter().zip(values) {
        m.insert(w.id.clone(), Value::String(v.to_string()));
    }
    Value::Object(m)
}

/// Inverse of [`load_structure`] as a JSON value.
pub fn to_document(s: &Structure) -> Value {
    let worlds = s.worlds();
    let ws: Vec<Value> = worlds
        .worlds()
        .iter()
        .map(|w| json!({"id": w.id, "props": w.props.iter().collect::<Vec<_>>()}))
        .collect();
    let mut doc = Map::new();
    doc.insert("kind".into(), Value::String(s.kind().name().into()));
    doc.insert("worlds".into(), Value::Array(ws));
    match s {
        Structure::Plain(_) => {}
        Structure::Prob(p) => {
            doc.insert("mu".into(), weights_doc(worlds, &p.mu));
        }
        Structure::Credal(c) => {
            let ms = c.measures.iter().map(|m| weights_doc(worlds, m)).collect();
            doc.insert("measures".into(), Value::Array(ms));
        }
        Structure::Belief(b) => {
            let ms = b
                .focal
                .iter()
                .map(|(set, m)| json!({"set": worlds.ids_of(*set), "m": m.to_string()}))
                .collect();
            doc.insert("mass".into(), Value::Array(ms));
        }
        Structure::Poss(p) => {
            doc.insert("poss".into(), weights_doc(worlds, &p.poss));
        }
    }
    Value::Object(doc)
}

pub fn to_document_string(s: &Structure) -> String {
    serde_json::to_string_pretty(&to_document(s)).expect("documents serialize")
}
