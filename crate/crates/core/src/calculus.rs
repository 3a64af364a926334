//! The rules of G4iSLt read backwards, derivation trees and the checker.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::Formula;
use crate::sequent::{msum, partition_boxed, Sequent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    BotL,
    IdP,
    AndL,
    AndR,
    OrL,
    OrR1,
    OrR2,
    AtomImpL,
    ImpR,
    AndImpL,
    OrImpL,
    ImpImpL,
    BoxImpL,
    SLtR,
    /// Additive cut. Only allowed in certificates, never produced by search.
    Cut,
}

impl Rule {
    /// The rules of the cut-free calculus.
    pub const CALCULUS: [Rule; 14] = [
        Rule::BotL,
        Rule::IdP,
        Rule::AndL,
        Rule::AndR,
        Rule::OrL,
        Rule::OrR1,
        Rule::OrR2,
        Rule::AtomImpL,
        Rule::ImpR,
        Rule::AndImpL,
        Rule::OrImpL,
        Rule::ImpImpL,
        Rule::BoxImpL,
        Rule::SLtR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::BotL => "BotL",
            Rule::IdP => "IdP",
            Rule::AndL => "AndL",
            Rule::AndR => "AndR",
            Rule::OrL => "OrL",
            Rule::OrR1 => "OrR1",
            Rule::OrR2 => "OrR2",
            Rule::AtomImpL => "AtomImpL",
            Rule::ImpR => "ImpR",
            Rule::AndImpL => "AndImpL",
            Rule::OrImpL => "OrImpL",
            Rule::ImpImpL => "ImpImpL",
            Rule::BoxImpL => "BoxImpL",
            Rule::SLtR => "SLtR",
            Rule::Cut => "Cut",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Rule::CALCULUS.into_iter().chain([Rule::Cut]).find(|r| r.name() == s)
    }

    /// Rules that consume a designated antecedent occurrence (plus Cut,
    /// whose "principal" is the cut formula).
    pub fn has_principal(self) -> bool {
        matches!(
            self,
            Rule::AndL
                | Rule::OrL
                | Rule::AtomImpL
                | Rule::AndImpL
                | Rule::OrImpL
                | Rule::ImpImpL
                | Rule::BoxImpL
                | Rule::Cut
        )
    }

    /// Rules whose premises are derivable whenever the conclusion is, with
    /// no increase in height.
    pub fn is_invertible(self) -> bool {
        matches!(self, Rule::AndR | Rule::AndL | Rule::OrL | Rule::ImpR | Rule::AtomImpL | Rule::AndImpL | Rule::OrImpL)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Premises of `rule` applied backwards to `s`, or the reason it does not
/// apply. This is the single source of truth for the rule schemas: search,
/// the checker and the proof transformations all go through it.
pub fn premises(rule: Rule, principal: Option<&Formula>, s: &Sequent) -> Result<Vec<Sequent>, String> {
    if rule.has_principal() != principal.is_some() {
        return Err(if principal.is_some() {
            format!("{rule} takes no principal formula")
        } else {
            format!("{rule} needs a principal formula")
        });
    }
    let ant = &s.ant;
    let suc = &s.suc;
    let seq = Sequent::new;
    if rule == Rule::Cut {
        let cf = principal.unwrap();
        return Ok(vec![seq(ant.clone(), cf.clone()), seq(ant.with(cf.clone()), suc.clone())]);
    }
    let rest = match principal {
        Some(p) => {
            let mut rest = ant.clone();
            rest.remove(p).map_err(|_| format!("principal `{p}` is not in the antecedent"))?;
            rest
        }
        None => ant.clone(),
    };
    let shape = || format!("{rule} does not match `{s}`");
    let r: Vec<Sequent> = match (rule, principal) {
        (Rule::BotL, _) => {
            if !ant.contains(&Formula::Bot) {
                return Err("`#` is not in the antecedent".into());
            }
            vec![]
        }
        (Rule::IdP, _) => match suc {
            Formula::Var(_) if ant.contains(suc) => vec![],
            Formula::Var(_) => return Err(format!("`{suc}` is not in the antecedent")),
            _ => return Err("IdP needs an atomic succedent".into()),
        },
        (Rule::AndR, _) => match suc {
            Formula::And(a, b) => vec![seq(ant.clone(), (**a).clone()), seq(ant.clone(), (**b).clone())],
            _ => return Err(shape()),
        },
        (Rule::OrR1, _) => match suc {
            Formula::Or(a, _) => vec![seq(ant.clone(), (**a).clone())],
            _ => return Err(shape()),
        },
        (Rule::OrR2, _) => match suc {
            Formula::Or(_, b) => vec![seq(ant.clone(), (**b).clone())],
            _ => return Err(shape()),
        },
        (Rule::ImpR, _) => match suc {
            Formula::Imp(a, b) => vec![seq(ant.with((**a).clone()), (**b).clone())],
            _ => return Err(shape()),
        },
        (Rule::SLtR, _) => match suc {
            Formula::Box(a) => {
                let (phi, gamma) = partition_boxed(ant);
                let mut m = msum(&phi, &gamma);
                m.insert(suc.clone());
                vec![seq(m, (**a).clone())]
            }
            _ => return Err(shape()),
        },
        (Rule::AndL, Some(Formula::And(a, b))) => {
            let mut m = rest;
            m.insert((**a).clone());
            m.insert((**b).clone());
            vec![seq(m, suc.clone())]
        }
        (Rule::OrL, Some(Formula::Or(a, b))) => {
            vec![seq(rest.with((**a).clone()), suc.clone()), seq(rest.with((**b).clone()), suc.clone())]
        }
        (Rule::AtomImpL, Some(Formula::Imp(p, b))) if p.is_var() => {
            if !rest.contains(p) {
                return Err(format!("`{p}` is not in the antecedent"));
            }
            vec![seq(rest.with((**b).clone()), suc.clone())]
        }
        (Rule::AndImpL, Some(Formula::Imp(l, c))) => match &**l {
            Formula::And(a, b) => {
                let curried = Formula::imp((**a).clone(), Formula::imp((**b).clone(), (**c).clone()));
                vec![seq(rest.with(curried), suc.clone())]
            }
            _ => return Err(shape()),
        },
        (Rule::OrImpL, Some(Formula::Imp(l, c))) => match &**l {
            Formula::Or(a, b) => {
                let mut m = rest;
                m.insert(Formula::imp((**a).clone(), (**c).clone()));
                m.insert(Formula::imp((**b).clone(), (**c).clone()));
                vec![seq(m, suc.clone())]
            }
            _ => return Err(shape()),
        },
        (Rule::ImpImpL, Some(Formula::Imp(l, c))) => match &**l {
            Formula::Imp(_, b) => vec![
                seq(rest.with(Formula::imp((**b).clone(), (**c).clone())), (**l).clone()),
                seq(rest.with((**c).clone()), suc.clone()),
            ],
            _ => return Err(shape()),
        },
        (Rule::BoxImpL, Some(Formula::Imp(l, b))) => match &**l {
            Formula::Box(a) => {
                let (phi, gamma) = partition_boxed(&rest);
                let mut m = msum(&phi, &gamma);
                m.insert((**b).clone());
                m.insert((**l).clone());
                vec![seq(m, (**a).clone()), seq(rest.with((**b).clone()), suc.clone())]
            }
            _ => return Err(shape()),
        },
        _ => return Err(shape()),
    };
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleInstance {
    pub rule: Rule,
    pub principal: Option<Formula>,
    pub conclusion: Sequent,
    pub premises: Vec<Sequent>,
}

impl RuleInstance {
    /// Re-derives the premises from the schema and compares.
    pub fn matches_schema(&self) -> bool {
        premises(self.rule, self.principal.as_ref(), &self.conclusion).as_deref() == Ok(&self.premises[..])
    }
}

/// Candidate principal formulas of a left rule in `s`.
fn left_candidates(rule: Rule, s: &Sequent) -> impl Iterator<Item = &Formula> {
    s.ant.distinct().filter(move |f| match (rule, f) {
        (Rule::AndL, Formula::And(..)) | (Rule::OrL, Formula::Or(..)) => true,
        (Rule::AtomImpL, Formula::Imp(p, _)) => p.is_var(),
        (Rule::AndImpL, Formula::Imp(l, _)) => matches!(**l, Formula::And(..)),
        (Rule::OrImpL, Formula::Imp(l, _)) => matches!(**l, Formula::Or(..)),
        (Rule::ImpImpL, Formula::Imp(l, _)) => matches!(**l, Formula::Imp(..)),
        (Rule::BoxImpL, Formula::Imp(l, _)) => matches!(**l, Formula::Box(..)),
        _ => false,
    })
}

/// Every instance of `rule` with conclusion `s`, one per distinct principal.
pub fn instances_of(rule: Rule, s: &Sequent, out: &mut Vec<RuleInstance>) {
    let mut push = |principal: Option<&Formula>| {
        if let Ok(ps) = premises(rule, principal, s) {
            out.push(RuleInstance { rule, principal: principal.cloned(), conclusion: s.clone(), premises: ps });
        }
    };
    if rule == Rule::Cut {
        return;
    }
    if rule.has_principal() {
        for f in left_candidates(rule, s) {
            push(Some(f));
        }
    } else {
        push(None);
    }
}

/// All rule instances of the calculus whose conclusion is `s`.
pub fn expand(s: &Sequent) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    for rule in Rule::CALCULUS {
        instances_of(rule, s, &mut out);
    }
    out
}

/// A finite tree of sequents, each node labelled with the rule that
/// concludes it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub sequent: Sequent,
    pub rule: Rule,
    pub principal: Option<Formula>,
    pub premises: Vec<Derivation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {reason}")]
pub struct Violation {
    /// Dotted child indices from the root, e.g. `root.0.1`.
    pub path: String,
    pub reason: String,
}

impl Derivation {
    pub fn leaf(sequent: Sequent, rule: Rule) -> Self {
        Derivation { sequent, rule, principal: None, premises: vec![] }
    }

    pub fn node(sequent: Sequent, rule: Rule, principal: Option<Formula>, premises: Vec<Derivation>) -> Self {
        Derivation { sequent, rule, principal, premises }
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn count_rule(&self, rule: Rule) -> usize {
        usize::from(self.rule == rule) + self.premises.iter().map(|d| d.count_rule(rule)).sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        self.count_rule(Rule::Cut) == 0
    }

    /// Checks a cut-free proof.
    pub fn check(&self) -> Result<(), Violation> {
        check_node(self, false, &mut "root".to_string())
    }

    /// Checks a proof that may contain additive cuts.
    pub fn check_with_cuts(&self) -> Result<(), Violation> {
        check_node(self, true, &mut "root".to_string())
    }

    /// Indented tree, conclusion first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, depth: usize) {
        let _ = write!(out, "{:indent$}{}  [{}", "", self.sequent, self.rule, indent = depth * 2);
        if let Some(p) = &self.principal {
            let _ = write!(out, ": {p}");
        }
        out.push_str("]\n");
        for d in &self.premises {
            d.write_text(out, depth + 1);
        }
    }

    /// Graphviz rendering with edges from conclusion to premises.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph proof {\n  node [shape=box, fontname=\"monospace\"];\n");
        let mut next = 0;
        self.write_dot(&mut out, &mut next);
        out.push_str("}\n");
        out
    }

    fn write_dot(&self, out: &mut String, next: &mut usize) -> usize {
        let id = *next;
        *next += 1;
        let seq = self.sequent.to_string().replace('\\', "\\\\").replace('"', "\\\"");
        let _ = writeln!(out, "  n{id} [label=\"{seq}\\n{}\"];", self.rule);
        for d in &self.premises {
            let child = d.write_dot(out, next);
            let _ = writeln!(out, "  n{id} -> n{child};");
        }
        id
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn check_node(d: &Derivation, allow_cut: bool, path: &mut String) -> Result<(), Violation> {
    let fail = |path: &str, reason: String| Violation { path: path.to_string(), reason };
    if d.rule == Rule::Cut && !allow_cut {
        return Err(fail(path, "cut is not a rule of the calculus".into()));
    }
    let expected = premises(d.rule, d.principal.as_ref(), &d.sequent).map_err(|r| fail(path, r))?;
    if expected.len() != d.premises.len() {
        return Err(fail(path, format!("{} expects {} premises, found {}", d.rule, expected.len(), d.premises.len())));
    }
    for (i, (want, child)) in expected.iter().zip(&d.premises).enumerate() {
        if *want != child.sequent {
            return Err(fail(path, format!("premise {i} should be `{want}`, found `{}`", child.sequent)));
        }
    }
    let len = path.len();
    for (i, child) in d.premises.iter().enumerate() {
        let _ = write!(path, ".{i}");
        check_node(child, allow_cut, path)?;
        path.truncate(len);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::sequent::parse_sequent;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn sq(s: &str) -> Sequent {
        parse_sequent(s).unwrap()
    }

    fn find(s: &Sequent, rule: Rule) -> Vec<RuleInstance> {
        expand(s).into_iter().filter(|i| i.rule == rule).collect()
    }

    #[test]
    fn sltr_instance() {
        let i = find(&sq("=> []p"), Rule::SLtR);
        assert_eq!(i.len(), 1);
        assert_eq!(i[0].premises, vec![sq("[]p => p")]);
    }

    #[test]
    fn box_imp_instance() {
        let i = find(&sq("[]p -> q, []r => s"), Rule::BoxImpL);
        assert_eq!(i.len(), 1);
        assert_eq!(i[0].principal, Some(f("[]p -> q")));
        assert_eq!(i[0].premises, vec![sq("r, q, []p => p"), sq("[]r, q => s")]);
    }

    #[test]
    fn bot_left() {
        let i = find(&sq("#, p => q"), Rule::BotL);
        assert_eq!(i.len(), 1);
        assert!(i[0].premises.is_empty());
    }

    #[test]
    fn one_instance_per_principal_value() {
        let s = sq("p /\\ q, p /\\ q, q /\\ p => r");
        assert_eq!(find(&s, Rule::AndL).len(), 2);
    }

    #[test]
    fn atom_imp_keeps_atom() {
        let i = find(&sq("p, p -> q => q"), Rule::AtomImpL);
        assert_eq!(i[0].premises, vec![sq("p, q => q")]);
        assert!(find(&sq("p -> q => q"), Rule::AtomImpL).is_empty());
    }

    #[test]
    fn imp_imp_premises() {
        let i = find(&sq("(p -> q) -> r, s => t"), Rule::ImpImpL);
        assert_eq!(i[0].premises, vec![sq("q -> r, s => p -> q"), sq("r, s => t")]);
    }

    #[test]
    fn no_rule_for_bot_implication() {
        let s = sq("# -> p => q");
        assert!(expand(&s).is_empty());
    }

    fn a11_proof() -> Derivation {
        let root = sq("=> ([]p -> p) -> p");
        let mid = sq("[]p -> p => p");
        Derivation::node(
            root,
            Rule::ImpR,
            None,
            vec![Derivation::node(
                mid,
                Rule::BoxImpL,
                Some(f("[]p -> p")),
                vec![Derivation::leaf(sq("p, []p => p"), Rule::IdP), Derivation::leaf(sq("p => p"), Rule::IdP)],
            )],
        )
    }

    #[test]
    fn check_accepts_hand_proof() {
        let d = a11_proof();
        assert_eq!(d.check(), Ok(()));
        assert_eq!(d.height(), 3);
        assert_eq!(d.size(), 4);
    }

    #[test]
    fn check_rejects() {
        let bad = Derivation::leaf(sq("=> p"), Rule::IdP);
        assert_eq!(bad.check().unwrap_err().path, "root");

        // SLtR premise that keeps the boxed context
        let bad = Derivation::node(
            sq("[]q => []p"),
            Rule::SLtR,
            None,
            vec![Derivation::leaf(sq("[]q, []p => p"), Rule::IdP)],
        );
        let v = bad.check().unwrap_err();
        assert_eq!(v.path, "root");
        assert!(v.reason.contains("premise 0"));

        let mut d = a11_proof();
        d.premises[0].premises[1] = Derivation::leaf(sq("p => q"), Rule::IdP);
        assert_eq!(d.check().unwrap_err().path, "root.0");

        let mut d = a11_proof();
        d.premises[0].premises[0].principal = Some(f("p"));
        assert_eq!(d.check().unwrap_err().path, "root.0.0");
    }

    #[test]
    fn heights() {
        let leaf = Derivation::leaf(sq("p => p"), Rule::IdP);
        assert_eq!(leaf.height(), 1);
        let two = Derivation::node(sq("=> p -> p"), Rule::ImpR, None, vec![leaf.clone()]);
        let mut five = leaf.clone();
        for _ in 0..4 {
            five = Derivation::node(five.sequent.clone(), Rule::ImpR, None, vec![five]);
        }
        let n = Derivation::node(sq("=> p"), Rule::AndR, None, vec![two, five]);
        assert_eq!(n.height(), 6);
    }

    #[test]
    fn cut_needs_extended_checker() {
        let left = Derivation::leaf(sq("p => p"), Rule::IdP);
        let right = Derivation::leaf(sq("p, p => p"), Rule::IdP);
        let d = Derivation::node(sq("p => p"), Rule::Cut, Some(f("p")), vec![left, right]);
        assert!(d.check().is_err());
        assert_eq!(d.check_with_cuts(), Ok(()));
    }

    #[test]
    fn rule_names_roundtrip() {
        for r in Rule::CALCULUS.into_iter().chain([Rule::Cut]) {
            assert_eq!(Rule::from_name(r.name()), Some(r));
        }
        assert_eq!(Rule::from_name("Exc"), None);
    }

    #[test]
    fn renders() {
        let d = a11_proof();
        let text = d.to_text();
        assert!(text.starts_with("=> ([]p -> p) -> p  [ImpR]\n"));
        assert!(text.contains("    p => p  [IdP]\n"));
        let dot = d.to_dot();
        assert!(dot.contains("n0 -> n1;"));
        assert!(dot.contains("[label=\"p, []p => p\\nIdP\"]"));
    }
}
