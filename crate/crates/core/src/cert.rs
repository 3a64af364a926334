//! JSON certificates for derivations.
//!
//! A node is `{"sequent": {"ant": [...], "suc": "..."}, "rule": "...",
//! "principal": "...", "premises": [...]}`. Antecedents list every
//! occurrence in canonical order; `principal` is omitted for rules without
//! one. Cut nodes carry the cut formula as their principal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{Derivation, Rule};
use crate::formula::{parse, Formula};
use crate::sequent::{Multiset, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("malformed certificate JSON: {0}")]
    Json(String),
    #[error("at {path}: cannot parse formula {text:?}: {message}")]
    Formula { path: String, text: String, message: String },
    #[error("at {path}: unknown rule {name:?}")]
    UnknownRule { path: String, name: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequentJson {
    ant: Vec<String>,
    suc: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Node {
    sequent: SequentJson,
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    principal: Option<String>,
    #[serde(default)]
    premises: Vec<Node>,
}

fn to_node(d: &Derivation) -> Node {
    Node {
        sequent: SequentJson {
            ant: d.sequent.ant.occurrences().map(Formula::to_string).collect(),
            suc: d.sequent.suc.to_string(),
        },
        rule: d.rule.name().to_string(),
        principal: d.principal.as_ref().map(Formula::to_string),
        premises: d.premises.iter().map(to_node).collect(),
    }
}

fn from_node(n: &Node, path: &str) -> Result<Derivation, CertError> {
    let formula = |text: &str| {
        parse(text).map_err(|e| CertError::Formula {
            path: path.to_string(),
            text: text.to_string(),
            message: e.to_string(),
        })
    };
    let ant = n.sequent.ant.iter().map(|s| formula(s)).collect::<Result<Multiset, _>>()?;
    let sequent = Sequent::new(ant, formula(&n.sequent.suc)?);
    let rule = Rule::from_name(&n.rule)
        .ok_or_else(|| CertError::UnknownRule { path: path.to_string(), name: n.rule.clone() })?;
    let principal = n.principal.as_deref().map(formula).transpose()?;
    let premises =
        n.premises.iter().enumerate().map(|(i, p)| from_node(p, &format!("{path}.{i}"))).collect::<Result<_, _>>()?;
    Ok(Derivation::node(sequent, rule, principal, premises))
}

/// Pretty-printed certificate; equal derivations give identical bytes.
pub fn to_json(d: &Derivation) -> String {
    serde_json::to_string_pretty(&to_node(d)).expect("certificate serializes")
}

/// Parses a certificate without checking it; see `Derivation::check`.
pub fn from_json(text: &str) -> Result<Derivation, CertError> {
    let node: Node = serde_json::from_str(text).map_err(|e| CertError::Json(e.to_string()))?;
    from_node(&node, "root")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::search::decide;
    use crate::sequent::parse_sequent;

    #[test]
    fn roundtrip() {
        let d = decide(&parse("([]p -> p) -> p").unwrap()).proof().unwrap().clone();
        let text = to_json(&d);
        assert_eq!(from_json(&text), Ok(d.clone()));
        assert_eq!(to_json(&from_json(&text).unwrap()), text);

        let s = parse_sequent("p, p => p").unwrap();
        let leaf = Derivation::leaf(s, Rule::IdP);
        let text = to_json(&leaf);
        assert!(text.contains(
            r#""ant": [
      "p",
      "p"
    ]"#
        ));
        assert_eq!(from_json(&text), Ok(leaf));
    }

    #[test]
    fn errors() {
        assert!(matches!(from_json("[]"), Err(CertError::Json(_))));
        let bad_rule = r#"{"sequent":{"ant":[],"suc":"p"},"rule":"Foo","premises":[]}"#;
        assert_eq!(from_json(bad_rule), Err(CertError::UnknownRule { path: "root".into(), name: "Foo".into() }));
        let bad_formula = r#"{"sequent":{"ant":[],"suc":"p"},"rule":"ImpR","premises":[
            {"sequent":{"ant":["p /\\"],"suc":"p"},"rule":"IdP"}]}"#;
        match from_json(bad_formula) {
            Err(CertError::Formula { path, .. }) => assert_eq!(path, "root.0"),
            r => panic!("{r:?}"),
        }
    }
}
