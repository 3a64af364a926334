//! Finite birelational Kripke models: frame conditions, forcing, exhaustive
//! enumeration of small models, and bounded countermodel search.
//!
//! Worlds are `0..n` with `n <= 64`; relations and truth sets are bitmasks,
//! row `w` of a relation holding the successors of `w`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::sequent::Sequent;

/// Largest model size `enumerate_models` accepts.
pub const DEFAULT_WORLD_BOUND: usize = 3;

const MAX_WORLDS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KripkeModel {
    worlds: usize,
    leq: Vec<u64>,
    r: Vec<u64>,
    valuation: BTreeMap<Arc<str>, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelViolation {
    LeqNotReflexive(usize),
    LeqNotTransitive(usize, usize, usize),
    RNotTransitive(usize, usize, usize),
    RReflexive(usize),
    /// `w <= v`, `v R u` but not `w R u`.
    Composition(usize, usize, usize),
    /// `w R v` but not `w <= v`.
    Inclusion(usize, usize),
    /// `w` is in `I(p)`, `w <= v`, `v` is not.
    Persistence(String, usize, usize),
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelViolation::LeqNotReflexive(w) => write!(f, "<= is not reflexive at {w}"),
            ModelViolation::LeqNotTransitive(a, b, c) => write!(f, "<= is not transitive on {a}, {b}, {c}"),
            ModelViolation::RNotTransitive(a, b, c) => write!(f, "R is not transitive on {a}, {b}, {c}"),
            ModelViolation::RReflexive(w) => write!(f, "R is reflexive at {w}"),
            ModelViolation::Composition(w, v, u) => write!(f, "{w} <= {v} R {u} but not {w} R {u}"),
            ModelViolation::Inclusion(w, v) => write!(f, "{w} R {v} but not {w} <= {v}"),
            ModelViolation::Persistence(p, w, v) => write!(f, "{p} holds at {w} but not at {v} >= {w}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("world {0} does not exist")]
    UnknownWorld(usize),
    #[error("models must have between 1 and {MAX_WORLDS} worlds, got {0}")]
    WorldCount(usize),
    #[error("{requested} worlds exceeds the enumeration bound {bound}")]
    BoundExceeded { requested: usize, bound: usize },
    #[error("model violates the frame conditions: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ModelViolation>),
    #[error("bad model JSON: {0}")]
    Json(String),
}

fn bit(w: usize) -> u64 {
    1u64 << w
}

fn all(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        bit(n) - 1
    }
}

fn has(set: u64, w: usize) -> bool {
    set & bit(w) != 0
}

impl KripkeModel {
    /// Builds a model from explicit pairs; `leq` pairs are taken as given
    /// (reflexivity is not added). Does not validate.
    pub fn new(
        worlds: usize,
        leq: &[(usize, usize)],
        r: &[(usize, usize)],
        valuation: &[(&str, &[usize])],
    ) -> Result<Self, SemanticsError> {
        if worlds == 0 || worlds > MAX_WORLDS {
            return Err(SemanticsError::WorldCount(worlds));
        }
        let rel = |pairs: &[(usize, usize)]| -> Result<Vec<u64>, SemanticsError> {
            let mut rows = vec![0u64; worlds];
            for &(a, b) in pairs {
                for x in [a, b] {
                    if x >= worlds {
                        return Err(SemanticsError::UnknownWorld(x));
                    }
                }
                rows[a] |= bit(b);
            }
            Ok(rows)
        };
        let mut val = BTreeMap::new();
        for (p, ws) in valuation {
            let mut set = 0;
            for &w in *ws {
                if w >= worlds {
                    return Err(SemanticsError::UnknownWorld(w));
                }
                set |= bit(w);
            }
            val.insert(Arc::from(*p), set);
        }
        Ok(KripkeModel { worlds, leq: rel(leq)?, r: rel(r)?, valuation: val })
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn leq(&self, w: usize, v: usize) -> bool {
        has(self.leq[w], v)
    }

    pub fn r(&self, w: usize, v: usize) -> bool {
        has(self.r[w], v)
    }

    /// Worlds where `p` holds; unlisted variables hold nowhere.
    pub fn valuation(&self, p: &str) -> u64 {
        self.valuation.get(p).copied().unwrap_or(0)
    }

    fn pairs(&self, rows: &[u64]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (w, &row) in rows.iter().enumerate() {
            for v in 0..self.worlds {
                if has(row, v) {
                    out.push((w, v));
                }
            }
        }
        out
    }

    pub fn leq_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs(&self.leq)
    }

    pub fn r_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs(&self.r)
    }

    /// The set of worlds forcing `f`.
    pub fn truth_set(&self, f: &Formula) -> u64 {
        match f {
            Formula::Var(p) => self.valuation(p),
            Formula::Bot => 0,
            Formula::And(a, b) => self.truth_set(a) & self.truth_set(b),
            Formula::Or(a, b) => self.truth_set(a) | self.truth_set(b),
            Formula::Imp(a, b) => {
                let (ta, tb) = (self.truth_set(a), self.truth_set(b));
                (0..self.worlds).filter(|&w| self.leq[w] & ta & !tb == 0).fold(0, |s, w| s | bit(w))
            }
            Formula::Box(a) => {
                let ta = self.truth_set(a);
                (0..self.worlds).filter(|&w| self.r[w] & !ta == 0).fold(0, |s, w| s | bit(w))
            }
        }
    }

    /// Worlds forcing every antecedent formula but not the succedent.
    pub fn refuting_worlds(&self, s: &Sequent) -> u64 {
        let ant = s.ant.distinct().fold(all(self.worlds), |acc, f| acc & self.truth_set(f));
        ant & !self.truth_set(&s.suc)
    }

    pub fn to_json(&self) -> String {
        let j = ModelJson {
            worlds: self.worlds,
            leq: self.leq_pairs().into_iter().map(|(a, b)| [a, b]).collect(),
            r: self.r_pairs().into_iter().map(|(a, b)| [a, b]).collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(p, &s)| (p.to_string(), (0..self.worlds).filter(|&w| has(s, w)).collect()))
                .collect(),
        };
        serde_json::to_string(&j).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SemanticsError> {
        let j: ModelJson = serde_json::from_str(text).map_err(|e| SemanticsError::Json(e.to_string()))?;
        let pairs = |v: &[[usize; 2]]| v.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>();
        let val: Vec<(&str, &[usize])> = j.valuation.iter().map(|(p, ws)| (p.as_str(), ws.as_slice())).collect();
        KripkeModel::new(j.worlds, &pairs(&j.leq), &pairs(&j.r), &val)
    }
}

impl fmt::Debug for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    worlds: usize,
    leq: Vec<[usize; 2]>,
    r: Vec<[usize; 2]>,
    valuation: BTreeMap<String, Vec<usize>>,
}

/// Every violated frame condition, or `Ok` for a model of the logic.
pub fn validate_model(m: &KripkeModel) -> Result<(), Vec<ModelViolation>> {
    let n = m.worlds;
    let mut out = Vec::new();
    for w in 0..n {
        if !m.leq(w, w) {
            out.push(ModelViolation::LeqNotReflexive(w));
        }
        if m.r(w, w) {
            out.push(ModelViolation::RReflexive(w));
        }
    }
    for a in 0..n {
        for b in 0..n {
            if m.r(a, b) && !m.leq(a, b) {
                out.push(ModelViolation::Inclusion(a, b));
            }
            for c in 0..n {
                if m.leq(a, b) && m.leq(b, c) && !m.leq(a, c) {
                    out.push(ModelViolation::LeqNotTransitive(a, b, c));
                }
                if m.r(a, b) && m.r(b, c) && !m.r(a, c) {
                    out.push(ModelViolation::RNotTransitive(a, b, c));
                }
                if m.leq(a, b) && m.r(b, c) && !m.r(a, c) {
                    out.push(ModelViolation::Composition(a, b, c));
                }
            }
        }
    }
    for (p, &set) in &m.valuation {
        for w in 0..n {
            for v in 0..n {
                if has(set, w) && m.leq(w, v) && !has(set, v) {
                    out.push(ModelViolation::Persistence(p.to_string(), w, v));
                }
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn check_valid(m: &KripkeModel) -> Result<(), SemanticsError> {
    validate_model(m).map_err(SemanticsError::Invalid)
}

pub fn forces(m: &KripkeModel, w: usize, f: &Formula) -> Result<bool, SemanticsError> {
    if w >= m.worlds {
        return Err(SemanticsError::UnknownWorld(w));
    }
    check_valid(m)?;
    Ok(has(m.truth_set(f), w))
}

/// Whether every world forcing the antecedent of `s` forces its succedent.
pub fn valid(m: &KripkeModel, s: &Sequent) -> Result<bool, SemanticsError> {
    check_valid(m)?;
    Ok(m.refuting_worlds(s) == 0)
}

/// Calls `visit` on every model with `1..=max_worlds` worlds over `vars`,
/// in a fixed order, until it returns `false`.
fn for_each_model(max_worlds: usize, vars: &[Arc<str>], visit: &mut dyn FnMut(&KripkeModel) -> bool) {
    for n in 1..=max_worlds {
        let cells = n * n;
        let rows = |code: u64| -> Vec<u64> { (0..n).map(|w| (code >> (w * n)) & all(n)).collect() };
        for leq_code in 0..(1u64 << cells) {
            let leq = rows(leq_code);
            let preorder = (0..n).all(|w| has(leq[w], w))
                && (0..n).all(|a| (0..n).filter(|&b| has(leq[a], b)).all(|b| leq[b] & !leq[a] == 0));
            if !preorder {
                continue;
            }
            let upsets: Vec<u64> = (0..=all(n)).filter(|&s| (0..n).all(|w| !has(s, w) || leq[w] & !s == 0)).collect();
            for r_code in 0..(1u64 << cells) {
                let r = rows(r_code);
                let ok = (0..n).all(|w| {
                    !has(r[w], w)
                        && r[w] & !leq[w] == 0
                        && (0..n).filter(|&v| has(r[w], v)).all(|v| r[v] & !r[w] == 0)
                        && (0..n).filter(|&v| has(leq[w], v)).all(|v| r[v] & !r[w] == 0)
                });
                if !ok {
                    continue;
                }
                let mut choice = vec![0usize; vars.len()];
                loop {
                    let valuation = vars.iter().zip(&choice).map(|(p, &i)| (p.clone(), upsets[i])).collect();
                    let m = KripkeModel { worlds: n, leq: leq.clone(), r: r.clone(), valuation };
                    if !visit(&m) {
                        return;
                    }
                    // odometer over valuations
                    let mut k = 0;
                    while k < choice.len() {
                        choice[k] += 1;
                        if choice[k] < upsets.len() {
                            break;
                        }
                        choice[k] = 0;
                        k += 1;
                    }
                    if k == choice.len() {
                        break;
                    }
                }
            }
        }
    }
}

/// All models of the logic with at most `max_worlds` worlds over `vars`,
/// one per labelled structure (isomorphic copies are kept).
pub fn enumerate_models(max_worlds: usize, vars: &[&str]) -> Result<Vec<KripkeModel>, SemanticsError> {
    if max_worlds > DEFAULT_WORLD_BOUND {
        return Err(SemanticsError::BoundExceeded { requested: max_worlds, bound: DEFAULT_WORLD_BOUND });
    }
    let vars: Vec<Arc<str>> = vars.iter().map(|&v| Arc::from(v)).collect();
    let mut out = Vec::new();
    for_each_model(max_worlds, &vars, &mut |m| {
        out.push(m.clone());
        true
    });
    Ok(out)
}

/// The first enumerated model refuting `s`, with its least refuting world.
/// `None` only means no countermodel exists within the bound.
pub fn find_countermodel(s: &Sequent, max_worlds: usize) -> Result<Option<(KripkeModel, usize)>, SemanticsError> {
    if max_worlds > DEFAULT_WORLD_BOUND {
        return Err(SemanticsError::BoundExceeded { requested: max_worlds, bound: DEFAULT_WORLD_BOUND });
    }
    let vars: Vec<Arc<str>> = s.vars().into_iter().collect();
    let mut found = None;
    for_each_model(max_worlds, &vars, &mut |m| {
        let bad = m.refuting_worlds(s);
        if bad != 0 {
            found = Some((m.clone(), bad.trailing_zeros() as usize));
            return false;
        }
        true
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::sequent::parse_sequent;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn two_world(p_at: &[usize]) -> KripkeModel {
        KripkeModel::new(2, &[(0, 0), (0, 1), (1, 1)], &[(0, 1)], &[("p", p_at)]).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(validate_model(&two_world(&[1])), Ok(()));
        let v = validate_model(&two_world(&[0])).unwrap_err();
        assert_eq!(v, vec![ModelViolation::Persistence("p".into(), 0, 1)]);
        let m = KripkeModel::new(1, &[(0, 0)], &[(0, 0)], &[]).unwrap();
        assert!(validate_model(&m).unwrap_err().contains(&ModelViolation::RReflexive(0)));
        let m = KripkeModel::new(2, &[(0, 0), (1, 1)], &[(0, 1)], &[]).unwrap();
        assert!(validate_model(&m).unwrap_err().contains(&ModelViolation::Inclusion(0, 1)));
        assert!(KripkeModel::new(2, &[(0, 2)], &[], &[]).is_err());
    }

    #[test]
    fn forcing() {
        let m = two_world(&[1]);
        assert_eq!(forces(&m, 0, &f("[]p")), Ok(true));
        assert_eq!(forces(&m, 0, &f("p")), Ok(false));
        assert_eq!(forces(&m, 0, &f("[]p -> p")), Ok(false));
        assert_eq!(forces(&m, 1, &f("[]p -> p")), Ok(true));
        assert_eq!(forces(&m, 0, &f("#")), Ok(false));
        assert_eq!(forces(&m, 2, &f("p")), Err(SemanticsError::UnknownWorld(2)));
        let single = KripkeModel::new(1, &[(0, 0)], &[], &[]).unwrap();
        assert_eq!(forces(&single, 0, &f("[]#")), Ok(true));
    }

    #[test]
    fn validity() {
        let m = two_world(&[1]);
        assert_eq!(valid(&m, &parse_sequent("p => p").unwrap()), Ok(true));
        assert_eq!(valid(&m, &parse_sequent("=> []p -> p").unwrap()), Ok(false));
        assert_eq!(valid(&m, &parse_sequent("# => q").unwrap()), Ok(true));
    }

    #[test]
    fn enumeration() {
        let ms = enumerate_models(1, &["p"]).unwrap();
        assert_eq!(ms.len(), 2);
        assert!(ms.iter().all(|m| m.r_pairs().is_empty()));
        assert!(enumerate_models(4, &["p"]).is_err());
        for m in enumerate_models(3, &["p"]).unwrap() {
            assert_eq!(validate_model(&m), Ok(()));
        }
    }

    #[test]
    fn countermodels() {
        let s = parse_sequent("=> []p -> p").unwrap();
        let (m, w) = find_countermodel(&s, 2).unwrap().unwrap();
        assert!(m.worlds() <= 2);
        assert_eq!(forces(&m, w, &s.suc), Ok(false));
        assert_eq!(find_countermodel(&parse_sequent("=> ([]p -> p) -> p").unwrap(), 3), Ok(None));
        let peirce = parse_sequent("=> ((p -> q) -> p) -> p").unwrap();
        let (m, w) = find_countermodel(&peirce, 2).unwrap().unwrap();
        assert!(m.r_pairs().is_empty());
        assert_eq!(forces(&m, w, &peirce.suc), Ok(false));
    }

    #[test]
    fn json_roundtrip() {
        let m = two_world(&[1]);
        let text = m.to_json();
        assert_eq!(text, r#"{"worlds":2,"leq":[[0,0],[0,1],[1,1]],"r":[[0,1]],"valuation":{"p":[1]}}"#);
        assert_eq!(KripkeModel::from_json(&text), Ok(m));
        assert!(KripkeModel::from_json("{\"worlds\":1}").is_err());
    }
}
