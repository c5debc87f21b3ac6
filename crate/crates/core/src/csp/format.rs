//! JSON instance files.
//!
//! ```json
//! {"constraint":{"kind":"AllDifferent","scope":["X1","X2"]},
//!  "variables":[{"domain":[1,2],"id":"X1"},{"domain":[1,2],"id":"X2"}]}
//! ```
//!
//! Serialization is canonical: object keys sorted, domains and value sets
//! ascending, compact output followed by a single newline.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ConstraintSpec, CspError, DomainMap, Instance, Value, VarId};

#[derive(Serialize, Deserialize)]
struct WireVariable {
    id: VarId,
    domain: Vec<Value>,
}

#[derive(Serialize, Deserialize)]
struct WireInstance {
    variables: Vec<WireVariable>,
    constraint: ConstraintSpec,
}

pub fn parse_instance(text: &[u8]) -> Result<Instance, CspError> {
    let wire: WireInstance = serde_json::from_slice(text).map_err(|e| CspError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut domains = DomainMap::new();
    let mut variables = Vec::with_capacity(wire.variables.len());
    for (i, var) in wire.variables.into_iter().enumerate() {
        let set: BTreeSet<Value> = var.domain.iter().copied().collect();
        if set.len() != var.domain.len() {
            return Err(CspError::invariant(
                format!("variables[{i}].domain"),
                "domain lists a value more than once",
            ));
        }
        if domains.get(&var.id).is_some() {
            return Err(CspError::invariant(
                format!("variables[{i}].id"),
                format!("duplicate variable `{}`", var.id),
            ));
        }
        domains.insert(var.id.clone(), set);
        variables.push(var.id);
    }
    Instance::new(variables, domains, wire.constraint)
}

pub fn serialize_instance(instance: &Instance) -> Vec<u8> {
    let wire = WireInstance {
        variables: instance
            .variables()
            .iter()
            .map(|v| WireVariable {
                id: v.clone(),
                domain: instance
                    .domain(v)
                    .map(|d| d.iter().copied().collect())
                    .unwrap_or_default(),
            })
            .collect(),
        constraint: instance.constraint().clone(),
    };
    // Going through `Value` sorts object keys.
    let value = serde_json::to_value(&wire).expect("instance is always representable as JSON");
    let mut out = serde_json::to_vec(&value).expect("JSON value serializes");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALLDIFF: &str = r#"{
        "variables": [
            {"id": "X1", "domain": [2, 1]},
            {"id": "X2", "domain": [1, 2]},
            {"id": "X3", "domain": [3, 1, 2]}
        ],
        "constraint": {"kind": "AllDifferent", "scope": ["X1", "X2", "X3"]}
    }"#;

    #[test]
    fn parses_and_canonicalizes() {
        let inst = parse_instance(ALLDIFF.as_bytes()).unwrap();
        assert_eq!(inst.variables().len(), 3);
        let text = String::from_utf8(serialize_instance(&inst)).unwrap();
        assert!(text.starts_with(r#"{"constraint":{"kind":"AllDifferent""#), "{text}");
        assert!(text.contains(r#"{"domain":[1,2,3],"id":"X3"}"#), "{text}");
        assert_eq!(parse_instance(text.as_bytes()).unwrap(), inst);
    }

    #[test]
    fn undeclared_variable_is_an_invariant_error() {
        let text = ALLDIFF.replace(r#""X3"]}"#, r#""X4"]}"#);
        let err = parse_instance(text.as_bytes()).unwrap_err();
        assert!(matches!(err, CspError::Invariant { .. }), "{err}");
    }

    #[test]
    fn malformed_json_reports_location() {
        let err = parse_instance(b"{\n  \"variables\": [,]\n}").unwrap_err();
        match err {
            CspError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn empty_domain_round_trips() {
        let text = r#"{"variables":[{"id":"X","domain":[]}],
                       "constraint":{"kind":"AllDifferent","scope":["X"]}}"#;
        let inst = parse_instance(text.as_bytes()).unwrap();
        assert!(inst.domain(&VarId::from("X")).unwrap().is_empty());
        let again = parse_instance(&serialize_instance(&inst)).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn disjoint_example_file() {
        let text = r#"{"variables":[
            {"id":"X1","domain":[1,2]},{"id":"X2","domain":[1,3]},
            {"id":"Y1","domain":[1,2]},{"id":"Y2","domain":[1,3]},{"id":"Y3","domain":[2,3]}],
          "constraint":{"kind":"Disjoint","scope":["X1","X2","Y1","Y2","Y3"],"split":2}}"#;
        let inst = parse_instance(text.as_bytes()).unwrap();
        let names: Vec<&str> = inst.variables().iter().map(|v| v.as_str()).collect();
        assert_eq!(names, ["X1", "X2", "Y1", "Y2", "Y3"]);
    }
}
