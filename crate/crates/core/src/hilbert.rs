//! The Hilbert calculus: axiom schemas A1–A11 with rules Ax, El, MP and Nec,
//! a derivation checker, and a bridge to the sequent prover.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse, Formula};
use crate::search::decide;

/// Schema metavariables, written as ordinary variables in the schema table.
pub const METAVARIABLES: [&str; 3] = ["phi", "psi", "chi"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
}

impl AxiomId {
    pub const ALL: [AxiomId; 11] = [
        AxiomId::A1,
        AxiomId::A2,
        AxiomId::A3,
        AxiomId::A4,
        AxiomId::A5,
        AxiomId::A6,
        AxiomId::A7,
        AxiomId::A8,
        AxiomId::A9,
        AxiomId::A10,
        AxiomId::A11,
    ];

    pub fn name(self) -> &'static str {
        ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11"][self as usize]
    }

    pub fn from_name(s: &str) -> Option<AxiomId> {
        AxiomId::ALL.into_iter().find(|a| a.name() == s)
    }

    pub fn schema_text(self) -> &'static str {
        match self {
            AxiomId::A1 => "phi -> psi -> phi",
            AxiomId::A2 => "(phi -> psi -> chi) -> (phi -> psi) -> phi -> chi",
            AxiomId::A3 => "phi -> phi \\/ psi",
            AxiomId::A4 => "psi -> phi \\/ psi",
            AxiomId::A5 => "(phi -> chi) -> (psi -> chi) -> phi \\/ psi -> chi",
            AxiomId::A6 => "phi /\\ psi -> phi",
            AxiomId::A7 => "phi /\\ psi -> psi",
            AxiomId::A8 => "(phi -> psi) -> (phi -> chi) -> phi -> psi /\\ chi",
            AxiomId::A9 => "# -> phi",
            AxiomId::A10 => "[](phi -> psi) -> []phi -> []psi",
            AxiomId::A11 => "([]phi -> phi) -> phi",
        }
    }

    pub fn schema(self) -> Formula {
        parse(self.schema_text()).expect("schema table parses")
    }

    pub fn metavariables(self) -> Vec<&'static str> {
        let vars = self.schema().vars();
        METAVARIABLES.into_iter().filter(|m| vars.contains(*m)).collect()
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type Substitution = BTreeMap<String, Formula>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HilbertError {
    #[error("substitution for {axiom} is missing metavariable {var}")]
    MissingMetavariable { axiom: AxiomId, var: String },
    #[error("bad Hilbert derivation JSON: {0}")]
    Json(String),
}

/// Instantiates the schema of `a`. Entries of `subst` for names that are
/// not metavariables of `a` are ignored.
pub fn axiom_instance(a: AxiomId, subst: &Substitution) -> Result<Formula, HilbertError> {
    for var in a.metavariables() {
        if !subst.contains_key(var) {
            return Err(HilbertError::MissingMetavariable { axiom: a, var: var.to_string() });
        }
    }
    Ok(a.schema().substitute(&|name| subst.get(name).cloned()))
}

/// Whether the sequent prover proves the instance; `false` if the
/// substitution is incomplete.
pub fn bridge_check(a: AxiomId, subst: &Substitution) -> bool {
    axiom_instance(a, subst).map(|f| decide(&f).is_proved()).unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HilbertRule {
    Ax(AxiomId, Substitution),
    El,
    /// Children conclude `phi` and `phi -> psi`, in that order.
    Mp,
    Nec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertDerivation {
    pub context: BTreeSet<Formula>,
    pub conclusion: Formula,
    pub rule: HilbertRule,
    pub children: Vec<HilbertDerivation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at {path}: {reason}")]
pub struct HilbertViolation {
    pub path: String,
    pub reason: String,
}

impl HilbertDerivation {
    pub fn ax(context: BTreeSet<Formula>, a: AxiomId, subst: Substitution) -> Result<Self, HilbertError> {
        let conclusion = axiom_instance(a, &subst)?;
        Ok(HilbertDerivation { context, conclusion, rule: HilbertRule::Ax(a, subst), children: Vec::new() })
    }

    pub fn el(context: BTreeSet<Formula>, conclusion: Formula) -> Self {
        HilbertDerivation { context, conclusion, rule: HilbertRule::El, children: Vec::new() }
    }

    /// Modus ponens on `minor: Γ ⊢ φ` and `major: Γ ⊢ φ → ψ`, taking Γ from
    /// `minor`. `None` if `major` does not conclude an implication.
    pub fn mp(minor: HilbertDerivation, major: HilbertDerivation) -> Option<Self> {
        let Formula::Imp(_, b) = &major.conclusion else { return None };
        Some(HilbertDerivation {
            context: minor.context.clone(),
            conclusion: (**b).clone(),
            rule: HilbertRule::Mp,
            children: vec![minor, major],
        })
    }

    pub fn nec(context: BTreeSet<Formula>, premise: HilbertDerivation) -> Self {
        HilbertDerivation {
            context,
            conclusion: Formula::boxed(premise.conclusion.clone()),
            rule: HilbertRule::Nec,
            children: vec![premise],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(HilbertDerivation::size).sum::<usize>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_node()).expect("derivation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, HilbertError> {
        let node: Node = serde_json::from_str(text).map_err(|e| HilbertError::Json(e.to_string()))?;
        HilbertDerivation::from_node(&node, "root")
    }

    fn to_node(&self) -> Node {
        let (rule, axiom, subst) = match &self.rule {
            HilbertRule::Ax(a, s) => {
                ("Ax", Some(a.name().to_string()), Some(s.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()))
            }
            HilbertRule::El => ("El", None, None),
            HilbertRule::Mp => ("MP", None, None),
            HilbertRule::Nec => ("Nec", None, None),
        };
        Node {
            context: self.context.iter().map(Formula::to_string).collect(),
            conclusion: self.conclusion.to_string(),
            rule: rule.to_string(),
            axiom,
            subst,
            children: self.children.iter().map(HilbertDerivation::to_node).collect(),
        }
    }

    fn from_node(n: &Node, path: &str) -> Result<Self, HilbertError> {
        let formula = |s: &str| parse(s).map_err(|e| HilbertError::Json(format!("at {path}: {e} in {s:?}")));
        let context = n.context.iter().map(|s| formula(s)).collect::<Result<_, _>>()?;
        let conclusion = formula(&n.conclusion)?;
        let rule = match n.rule.as_str() {
            "Ax" => {
                let name =
                    n.axiom.as_deref().ok_or_else(|| HilbertError::Json(format!("at {path}: Ax without axiom")))?;
                let a = AxiomId::from_name(name)
                    .ok_or_else(|| HilbertError::Json(format!("at {path}: unknown axiom {name:?}")))?;
                let mut subst = Substitution::new();
                for (k, v) in n.subst.iter().flatten() {
                    subst.insert(k.clone(), formula(v)?);
                }
                HilbertRule::Ax(a, subst)
            }
            "El" => HilbertRule::El,
            "MP" => HilbertRule::Mp,
            "Nec" => HilbertRule::Nec,
            other => return Err(HilbertError::Json(format!("at {path}: unknown rule {other:?}"))),
        };
        let children = n
            .children
            .iter()
            .enumerate()
            .map(|(i, c)| HilbertDerivation::from_node(c, &format!("{path}.{i}")))
            .collect::<Result<_, _>>()?;
        Ok(HilbertDerivation { context, conclusion, rule, children })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Node {
    #[serde(default)]
    context: Vec<String>,
    conclusion: String,
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axiom: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subst: Option<BTreeMap<String, String>>,
    #[serde(default)]
    children: Vec<Node>,
}

/// Checks every node's side condition, reporting the first failure by path.
pub fn check_hilbert(d: &HilbertDerivation) -> Result<(), HilbertViolation> {
    check_at(d, "root")
}

fn check_at(d: &HilbertDerivation, path: &str) -> Result<(), HilbertViolation> {
    let fail = |reason: String| Err(HilbertViolation { path: path.to_string(), reason });
    let arity = match d.rule {
        HilbertRule::Ax(..) | HilbertRule::El => 0,
        HilbertRule::Nec => 1,
        HilbertRule::Mp => 2,
    };
    if d.children.len() != arity {
        return fail(format!("expected {arity} children, found {}", d.children.len()));
    }
    match &d.rule {
        HilbertRule::Ax(a, subst) => match axiom_instance(*a, subst) {
            Ok(f) if f == d.conclusion => {}
            Ok(f) => return fail(format!("{} is not the {a} instance {f}", d.conclusion)),
            Err(e) => return fail(e.to_string()),
        },
        HilbertRule::El => {
            if !d.context.contains(&d.conclusion) {
                return fail(format!("{} is not in the context", d.conclusion));
            }
        }
        HilbertRule::Mp => {
            let (minor, major) = (&d.children[0], &d.children[1]);
            if minor.context != d.context || major.context != d.context {
                return fail("premises must share the conclusion's context".to_string());
            }
            let expected = Formula::imp(minor.conclusion.clone(), d.conclusion.clone());
            if major.conclusion != expected {
                return fail(format!("second premise concludes {}, expected {expected}", major.conclusion));
            }
        }
        HilbertRule::Nec => {
            let child = &d.children[0];
            if !child.context.is_empty() {
                return fail("the premise of Nec must have an empty context".to_string());
            }
            if d.conclusion != Formula::boxed(child.conclusion.clone()) {
                return fail(format!("{} is not the box of {}", d.conclusion, child.conclusion));
            }
        }
    }
    for (i, c) in d.children.iter().enumerate() {
        check_at(c, &format!("{path}.{i}"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn sub(pairs: &[(&str, &str)]) -> Substitution {
        pairs.iter().map(|(k, v)| (k.to_string(), f(v))).collect()
    }

    #[test]
    fn instances() {
        assert_eq!(axiom_instance(AxiomId::A11, &sub(&[("phi", "p")])), Ok(f("([]p -> p) -> p")));
        assert_eq!(axiom_instance(AxiomId::A9, &sub(&[("phi", "q")])), Ok(f("# -> q")));
        assert_eq!(axiom_instance(AxiomId::A1, &sub(&[("phi", "p"), ("psi", "p")])), Ok(f("p -> p -> p")));
        assert_eq!(
            axiom_instance(AxiomId::A10, &sub(&[("phi", "psi"), ("psi", "phi")])),
            Ok(f("[](psi -> phi) -> []psi -> []phi"))
        );
        assert_eq!(
            axiom_instance(AxiomId::A2, &sub(&[("phi", "p")])),
            Err(HilbertError::MissingMetavariable { axiom: AxiomId::A2, var: "psi".into() })
        );
        assert_eq!(AxiomId::A5.metavariables(), vec!["phi", "psi", "chi"]);
    }

    #[test]
    fn bridge() {
        assert!(bridge_check(AxiomId::A11, &sub(&[("phi", "p")])));
        assert!(bridge_check(AxiomId::A10, &sub(&[("phi", "p"), ("psi", "q")])));
        assert!(bridge_check(AxiomId::A5, &sub(&[("phi", "[]p"), ("psi", "q /\\ r"), ("chi", "p -> q")])));
        assert!(!bridge_check(AxiomId::A5, &sub(&[("phi", "p")])));
    }

    #[test]
    fn checking() {
        let empty = BTreeSet::new();
        let ax = HilbertDerivation::ax(empty.clone(), AxiomId::A1, sub(&[("phi", "p"), ("psi", "p")])).unwrap();
        assert_eq!(check_hilbert(&ax), Ok(()));
        let ctx: BTreeSet<Formula> = [f("p")].into();
        assert_eq!(check_hilbert(&HilbertDerivation::el(ctx.clone(), f("p"))), Ok(()));
        assert!(check_hilbert(&HilbertDerivation::el(ctx.clone(), f("q"))).is_err());

        let bad = HilbertDerivation::nec(empty.clone(), HilbertDerivation::el(ctx.clone(), f("p")));
        let v = check_hilbert(&bad).unwrap_err();
        assert_eq!(v.path, "root");
        let good = HilbertDerivation::nec(ctx.clone(), ax.clone());
        assert_eq!(check_hilbert(&good), Ok(()));

        // p ⊢ q -> p from A1 by MP
        let a1 = HilbertDerivation::ax(ctx.clone(), AxiomId::A1, sub(&[("phi", "p"), ("psi", "q")])).unwrap();
        let mp = HilbertDerivation::mp(HilbertDerivation::el(ctx.clone(), f("p")), a1).unwrap();
        assert_eq!(mp.conclusion, f("q -> p"));
        assert_eq!(check_hilbert(&mp), Ok(()));
        let mut wrong = mp.clone();
        wrong.children[1].context = empty;
        assert_eq!(check_hilbert(&wrong).unwrap_err().path, "root");
        let mut wrong = mp.clone();
        wrong.children[0].conclusion = f("q");
        assert!(check_hilbert(&wrong).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let ctx: BTreeSet<Formula> = [f("p")].into();
        let a1 = HilbertDerivation::ax(ctx.clone(), AxiomId::A1, sub(&[("phi", "p"), ("psi", "q")])).unwrap();
        let mp = HilbertDerivation::mp(HilbertDerivation::el(ctx, f("p")), a1).unwrap();
        let text = mp.to_json();
        assert_eq!(HilbertDerivation::from_json(&text), Ok(mp));
        assert!(HilbertDerivation::from_json(r#"{"conclusion":"p","rule":"Foo"}"#).is_err());
        assert!(HilbertDerivation::from_json(r#"{"conclusion":"p ->","rule":"El"}"#).is_err());
    }
}
