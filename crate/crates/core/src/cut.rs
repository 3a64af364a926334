//! Additive cut: admissibility as a proof-combining procedure, and
//! elimination of cut nodes from certificates.
//!
//! `cut(φ, π₁ : Γ => φ, π₂ : φ, Γ => χ)` dispatches on the last rule of π₁
//! and then of π₂. Every recursive call is on a lighter cut formula, or on
//! the same cut formula with a conclusion of smaller Θ; the trace records
//! these keys so tests can confirm the descent.

use std::cmp::Ordering;

use thiserror::Error;

use crate::calculus::{Derivation, Rule, Violation};
use crate::formula::Formula;
use crate::measure::{theta, Theta};
use crate::sequent::{msum, partition_boxed, Multiset, Sequent};
use crate::structural::{
    box_imp_lir_raw, contract_raw, fit, id_general, imp_imp_lil_raw, imp_imp_lir_raw, invert_imp_r_raw,
    invert_left_raw, wkn_raw, TransformError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("input proof is not valid: {0}")]
    InvalidProof(Violation),
    #[error("input proof already contains a cut")]
    NotCutFree,
    #[error("malformed cut: {0}")]
    Malformed(String),
    #[error("cut on `{formula}` at `{sequent}` does not descend below its caller")]
    NotWellFounded { formula: Formula, sequent: Sequent },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

type Result<T> = std::result::Result<T, CutError>;

/// The two premises of an additive cut, with the data they share.
#[derive(Debug, Clone)]
pub struct CutInstance {
    pub left: Derivation,
    pub right: Derivation,
    pub cut_formula: Formula,
    pub context: Multiset,
    pub goal: Formula,
}

impl CutInstance {
    /// `left` must prove `Γ => φ` and `right` must prove `φ, Γ => χ`.
    pub fn new(left: Derivation, right: Derivation) -> Result<Self> {
        let cut_formula = left.sequent.suc.clone();
        let context = left.sequent.ant.clone();
        if right.sequent.ant != context.with(cut_formula.clone()) {
            return Err(CutError::Malformed(format!(
                "right premise `{}` is not `{}` plus the context of `{}`",
                right.sequent, cut_formula, left.sequent
            )));
        }
        let goal = right.sequent.suc.clone();
        Ok(CutInstance { left, right, cut_formula, context, goal })
    }

    pub fn conclusion(&self) -> Sequent {
        Sequent::new(self.context.clone(), self.goal.clone())
    }
}

/// One recursive call of the cut procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    /// Index of the calling entry; `None` for the outermost call.
    pub parent: Option<usize>,
    pub weight: usize,
    pub theta: Theta,
}

impl TraceEntry {
    /// Lexicographic order on (weight, Θ) with Θ in shortlex.
    pub fn key_cmp(&self, other: &TraceEntry) -> Ordering {
        self.weight.cmp(&other.weight).then_with(|| self.theta.shortlex_cmp(&other.theta))
    }
}

/// A cut-free proof of the conclusion of `c`.
pub fn cut_admissible(c: &CutInstance) -> Result<Derivation> {
    cut_admissible_traced(c).map(|(d, _)| d)
}

/// As [`cut_admissible`], also returning every recursive call made.
pub fn cut_admissible_traced(c: &CutInstance) -> Result<(Derivation, Vec<TraceEntry>)> {
    for d in [&c.left, &c.right] {
        if !d.is_cut_free() {
            return Err(CutError::NotCutFree);
        }
        d.check().map_err(CutError::InvalidProof)?;
    }
    let mut cutter = Cutter { trace: Vec::new() };
    let out = cutter.cut(&c.cut_formula, &c.left, &c.right, None)?;
    Ok((out, cutter.trace))
}

/// Replaces every cut in `d`, topmost first, by its admissible reduction.
pub fn eliminate(d: &Derivation) -> Result<Derivation> {
    d.check_with_cuts().map_err(CutError::InvalidProof)?;
    let mut cutter = Cutter { trace: Vec::new() };
    cutter.eliminate(d)
}

struct Cutter {
    trace: Vec<TraceEntry>,
}

fn imp_parts(f: &Formula) -> (&Formula, &Formula) {
    match f {
        Formula::Imp(a, b) => (a, b),
        _ => unreachable!("`{f}` is not an implication"),
    }
}

fn bin_parts(f: &Formula) -> (&Formula, &Formula) {
    match f {
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => (a, b),
        _ => unreachable!("`{f}` is not binary"),
    }
}

/// `Γ => A -> B` from a proof of `Γ, A => B`.
fn imp_intro(a: &Formula, p: Derivation) -> Result<Derivation> {
    let mut ant = p.sequent.ant.clone();
    ant.remove(a).map_err(|_| CutError::Malformed(format!("`{a}` missing from `{}`", p.sequent)))?;
    let s = Sequent::new(ant, Formula::imp(a.clone(), p.sequent.suc.clone()));
    Ok(Derivation::node(s, Rule::ImpR, None, vec![p]))
}

/// Unboxes exactly the occurrences in `designated`.
fn unbox_some(d: &Derivation, designated: &Multiset) -> Result<Derivation> {
    let mut t = d.sequent.clone();
    t.ant = msum(&t.ant.minus(designated), &designated.unbox_all());
    Ok(fit(d, &t)?)
}

/// The boxed part of `ant`.
fn boxed_part(ant: &Multiset) -> Multiset {
    ant.iter().filter(|(f, _)| f.is_boxed()).map(|(f, &n)| (f.clone(), n)).collect()
}

impl Cutter {
    fn eliminate(&mut self, d: &Derivation) -> Result<Derivation> {
        let premises = d.premises.iter().map(|p| self.eliminate(p)).collect::<Result<Vec<_>>>()?;
        if d.rule == Rule::Cut {
            let phi = d.principal.as_ref().expect("checked cut has a cut formula");
            return self.cut(phi, &premises[0], &premises[1], None);
        }
        Ok(Derivation::node(d.sequent.clone(), d.rule, d.principal.clone(), premises))
    }

    fn cut(
        &mut self,
        phi: &Formula,
        left: &Derivation,
        right: &Derivation,
        parent: Option<usize>,
    ) -> Result<Derivation> {
        let gamma = &left.sequent.ant;
        let chi = &right.sequent.suc;
        let goal = Sequent::new(gamma.clone(), chi.clone());
        debug_assert_eq!(&left.sequent.suc, phi);
        debug_assert_eq!(right.sequent.ant, gamma.with(phi.clone()));
        let entry = TraceEntry { parent, weight: phi.weight(), theta: theta(&goal) };
        if let Some(p) = parent {
            if entry.key_cmp(&self.trace[p]) != Ordering::Less {
                return Err(CutError::NotWellFounded { formula: phi.clone(), sequent: goal });
            }
        }
        self.trace.push(entry);
        let me = Some(self.trace.len() - 1);
        let out = self.dispatch(phi, left, right, &goal, me)?;
        debug_assert_eq!(out.sequent, goal);
        Ok(out)
    }

    fn dispatch(
        &mut self,
        phi: &Formula,
        left: &Derivation,
        right: &Derivation,
        goal: &Sequent,
        me: Option<usize>,
    ) -> Result<Derivation> {
        let gamma = &goal.ant;
        if gamma.contains(phi) {
            // the cut formula is already available: contraction suffices
            return Ok(contract_raw(right, phi)?);
        }
        match left.rule {
            Rule::BotL => Ok(Derivation::leaf(goal.clone(), Rule::BotL)),
            Rule::IdP => unreachable!("atomic cut formula is in the context"),
            Rule::Cut => Err(CutError::NotCutFree),
            Rule::AndL | Rule::OrL | Rule::AtomImpL | Rule::AndImpL | Rule::OrImpL => {
                let q = left.principal.as_ref().unwrap();
                let mut children = Vec::with_capacity(left.premises.len());
                for (i, lp) in left.premises.iter().enumerate() {
                    let rp = invert_left_raw(right, left.rule, q, i)?;
                    children.push(self.cut(phi, lp, &rp, me)?);
                }
                Ok(Derivation::node(goal.clone(), left.rule, Some(q.clone()), children))
            }
            Rule::ImpImpL | Rule::BoxImpL => {
                let q = left.principal.as_ref().unwrap();
                let rp = invert_left_raw(right, left.rule, q, 1)?;
                let rc = self.cut(phi, &left.premises[1], &rp, me)?;
                Ok(Derivation::node(goal.clone(), left.rule, Some(q.clone()), vec![left.premises[0].clone(), rc]))
            }
            Rule::AndR => {
                let (a, b) = bin_parts(phi);
                let inv = invert_left_raw(right, Rule::AndL, phi, 0)?;
                let lb = wkn_raw(&left.premises[1], a)?;
                let with_a = self.cut(b, &lb, &inv, me)?;
                self.cut(a, &left.premises[0], &with_a, me)
            }
            Rule::OrR1 | Rule::OrR2 => {
                let i = usize::from(left.rule == Rule::OrR2);
                let (a, b) = bin_parts(phi);
                let ai = if i == 0 { a } else { b };
                let inv = invert_left_raw(right, Rule::OrL, phi, i)?;
                self.cut(ai, &left.premises[0], &inv, me)
            }
            Rule::ImpR | Rule::SLtR => self.right_side(phi, left, right, goal, me),
        }
    }

    /// Cut formula introduced on the right by the left proof: dispatch on
    /// the right proof.
    fn right_side(
        &mut self,
        phi: &Formula,
        left: &Derivation,
        right: &Derivation,
        goal: &Sequent,
        me: Option<usize>,
    ) -> Result<Derivation> {
        let gamma = &goal.ant;
        let node = |rule: Rule, principal: Option<&Formula>, children: Vec<Derivation>| {
            Derivation::node(goal.clone(), rule, principal.cloned(), children)
        };
        if right.principal.as_ref() == Some(phi) {
            return self.principal_cut(phi, left, right, goal, me);
        }
        match right.rule {
            Rule::BotL | Rule::IdP => Ok(node(right.rule, None, vec![])),
            Rule::AndR | Rule::OrR1 | Rule::OrR2 => {
                let children =
                    right.premises.iter().map(|rp| self.cut(phi, left, rp, me)).collect::<Result<Vec<_>>>()?;
                Ok(node(right.rule, None, children))
            }
            Rule::ImpR => {
                let (c, _) = imp_parts(&goal.suc);
                let lw = wkn_raw(left, c)?;
                let child = self.cut(phi, &lw, &right.premises[0], me)?;
                Ok(node(Rule::ImpR, None, vec![child]))
            }
            Rule::AndL | Rule::OrL | Rule::AtomImpL | Rule::AndImpL | Rule::OrImpL => {
                let q = right.principal.as_ref().unwrap();
                let mut children = Vec::with_capacity(right.premises.len());
                for (i, rp) in right.premises.iter().enumerate() {
                    let lp = invert_left_raw(left, right.rule, q, i)?;
                    children.push(self.cut(phi, &lp, rp, me)?);
                }
                Ok(node(right.rule, Some(q), children))
            }
            Rule::ImpImpL => {
                let q = right.principal.as_ref().unwrap();
                let (cd, _) = imp_parts(q);
                let (_, d) = imp_parts(cd);
                let de = Formula::imp(d.clone(), imp_parts(q).1.clone());
                // left branch: Γ', D -> E => C -> D
                let mut l = imp_imp_lil_raw(left, q)?;
                l = contract_raw(&l, &de)?;
                let r0 = invert_imp_r_raw(&right.premises[0])?;
                let inner = self.cut(phi, &l, &r0, me)?;
                let (c, _) = imp_parts(cd);
                let lc = imp_intro(c, inner)?;
                let lr = imp_imp_lir_raw(left, q)?;
                let rc = self.cut(phi, &lr, &right.premises[1], me)?;
                Ok(node(Rule::ImpImpL, Some(q), vec![lc, rc]))
            }
            Rule::BoxImpL => {
                let q = right.principal.as_ref().unwrap();
                let (bc, _) = imp_parts(q);
                let mut rest = gamma.clone();
                rest.remove(q).expect("principal occurs in the context");
                let boxed_rest = boxed_part(&rest);
                let lc = if phi.is_boxed() {
                    let a = phi.unboxed().unwrap();
                    let lp = &left.premises[0];
                    let x = box_imp_lir_raw(&wkn_raw(lp, bc)?, q)?;
                    let y = wkn_raw(&right.premises[0], phi)?;
                    let z = self.cut(a, &x, &y, me)?;
                    let w = box_imp_lir_raw(&wkn_raw(&unbox_some(left, &boxed_rest)?, bc)?, q)?;
                    self.cut(phi, &w, &z, me)?
                } else {
                    let l = unbox_some(&box_imp_lir_raw(&wkn_raw(left, bc)?, q)?, &boxed_rest)?;
                    self.cut(phi, &l, &right.premises[0], me)?
                };
                let lr = box_imp_lir_raw(left, q)?;
                let rc = self.cut(phi, &lr, &right.premises[1], me)?;
                Ok(node(Rule::BoxImpL, Some(q), vec![lc, rc]))
            }
            Rule::SLtR => {
                let boxed_ctx = boxed_part(gamma);
                let diag = &goal.suc;
                let base = wkn_raw(&unbox_some(left, &boxed_ctx)?, diag)?;
                let child = if phi.is_boxed() {
                    let a = phi.unboxed().unwrap();
                    let x = wkn_raw(&left.premises[0], diag)?;
                    let y = wkn_raw(&right.premises[0], phi)?;
                    let z = self.cut(a, &x, &y, me)?;
                    self.cut(phi, &base, &z, me)?
                } else {
                    self.cut(phi, &base, &right.premises[0], me)?
                };
                Ok(node(Rule::SLtR, None, vec![child]))
            }
            Rule::Cut => Err(CutError::NotCutFree),
        }
    }

    /// Both proofs end with rules introducing the cut formula `A -> B`.
    fn principal_cut(
        &mut self,
        phi: &Formula,
        left: &Derivation,
        right: &Derivation,
        goal: &Sequent,
        me: Option<usize>,
    ) -> Result<Derivation> {
        debug_assert_eq!(left.rule, Rule::ImpR);
        let gamma = &goal.ant;
        let (a, b) = imp_parts(phi);
        let lp = &left.premises[0];
        match right.rule {
            Rule::AtomImpL => {
                let gb = contract_raw(lp, a)?;
                self.cut(b, &gb, &right.premises[0], me)
            }
            Rule::AndImpL => {
                let (c, d) = bin_parts(a);
                let inv = invert_left_raw(lp, Rule::AndL, a, 0)?;
                let curried = imp_intro(c, imp_intro(d, inv)?)?;
                self.cut(&curried.sequent.suc.clone(), &curried, &right.premises[0], me)
            }
            Rule::OrImpL => {
                let (c, d) = bin_parts(a);
                let cb = Formula::imp(c.clone(), b.clone());
                let db = Formula::imp(d.clone(), b.clone());
                let g_cb = imp_intro(c, invert_left_raw(lp, Rule::OrL, a, 0)?)?;
                let g_db = imp_intro(d, invert_left_raw(lp, Rule::OrL, a, 1)?)?;
                let c1 = self.cut(&cb, &wkn_raw(&g_cb, &db)?, &right.premises[0], me)?;
                self.cut(&db, &g_db, &c1, me)
            }
            Rule::ImpImpL => {
                let (c, d) = imp_parts(a);
                let u = imp_intro(c, id_general(d, &gamma.with(c.clone())))?;
                let v = self.cut(a, &u, &wkn_raw(lp, d)?, me)?;
                let db = Formula::imp(d.clone(), b.clone());
                let x = self.cut(&db, &imp_intro(d, v)?, &right.premises[0], me)?;
                let y = self.cut(a, &x, lp, me)?;
                self.cut(b, &y, &right.premises[1], me)
            }
            Rule::BoxImpL => {
                let boxed_ctx = boxed_part(gamma);
                let lpu = unbox_some(lp, &boxed_ctx)?;
                let ac = self.cut(b, &lpu, &right.premises[0], me)?;
                let (phi0, gamma0) = partition_boxed(gamma);
                debug_assert_eq!(ac.sequent.ant, msum(&phi0, &gamma0).with(a.clone()));
                let sltr = Derivation::node(Sequent::new(gamma.clone(), a.clone()), Rule::SLtR, None, vec![ac]);
                let gb = self.cut(a, &sltr, lp, me)?;
                self.cut(b, &gb, &right.premises[1], me)
            }
            r => Err(CutError::Malformed(format!("{r} cannot have `{phi}` as principal"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::search::prove;
    use crate::sequent::parse_sequent;
    use crate::structural::weaken;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn proof(s: &str) -> Derivation {
        prove(&parse_sequent(s).unwrap()).proof().cloned().unwrap_or_else(|| panic!("{s} unprovable"))
    }

    fn run(l: &str, r: &str) -> (Derivation, Vec<TraceEntry>) {
        let c = CutInstance::new(proof(l), proof(r)).unwrap();
        let (d, trace) = cut_admissible_traced(&c).unwrap();
        assert_eq!(d.check(), Ok(()));
        assert_eq!(d.sequent, c.conclusion());
        for e in &trace {
            if let Some(p) = e.parent {
                assert_eq!(e.key_cmp(&trace[p]), Ordering::Less);
            }
        }
        (d, trace)
    }

    #[test]
    fn against_identity() {
        let left = proof("q => p -> q");
        let right = crate::structural::id_general(&f("p -> q"), &Multiset::singleton(f("q")));
        let c = CutInstance::new(left.clone(), right).unwrap();
        let d = cut_admissible(&c).unwrap();
        assert_eq!(d.check(), Ok(()));
        assert_eq!(d.sequent, left.sequent);
    }

    #[test]
    fn nested_boxes_in_context() {
        // the SLtR case has to strip both boxes of `[][]p` from the context
        let gamma = "[][]p /\\ r, []p \\/ (r \\/ p) -> p, []p";
        let phi = "[](p -> #) -> [][]r";
        run(&format!("{gamma} => {phi}"), &format!("{gamma}, {phi} => []r"));
    }

    #[test]
    fn boxed_cut() {
        let left = proof("p => []p");
        let right = weaken(&proof("[]p => []p"), &f("p")).unwrap();
        let c = CutInstance::new(left, right).unwrap();
        let d = cut_admissible(&c).unwrap();
        assert_eq!(d.check(), Ok(()));
        assert!(d.is_cut_free());
        assert_eq!(d.sequent, parse_sequent("p => []p").unwrap());
    }

    /// A proof of `s` ending with `rule` on `principal`, premises by search.
    fn by_rule(s: &str, rule: Rule, principal: Option<&str>) -> Derivation {
        let s = parse_sequent(s).unwrap();
        let principal = principal.map(f);
        let ps = crate::calculus::premises(rule, principal.as_ref(), &s).unwrap();
        let children = ps.iter().map(|p| prove(p).proof().cloned().unwrap()).collect();
        Derivation::node(s, rule, principal, children)
    }

    #[test]
    fn principal_cases() {
        let cases = [
            ("p, q => p -> q", "p, q, p -> q => q \\/ t", Rule::AtomImpL, "p -> q"),
            ("p, q, r => (p /\\ q) -> r", "p, q, r, (p /\\ q) -> r => r \\/ t", Rule::AndImpL, "(p /\\ q) -> r"),
            ("p, r => (p \\/ q) -> r", "p, r, (p \\/ q) -> r => r \\/ t", Rule::OrImpL, "(p \\/ q) -> r"),
            ("q, r => (p -> q) -> r", "q, r, (p -> q) -> r => r \\/ t", Rule::ImpImpL, "(p -> q) -> r"),
            ("p, r => []p -> r", "p, r, []p -> r => r \\/ t", Rule::BoxImpL, "[]p -> r"),
        ];
        for (l, r, rule, q) in cases {
            let c = CutInstance::new(proof(l), by_rule(r, rule, Some(q))).unwrap();
            let (d, trace) = cut_admissible_traced(&c).unwrap();
            assert_eq!(d.check(), Ok(()));
            assert_eq!(d.sequent, c.conclusion());
            assert!(trace.len() > 1, "{rule}");
        }
        run("=> []([]p -> p) -> []p", "[]([]p -> p) -> []p => []([]p -> p) -> []p");
        run("p => []p -> p", "p, []p -> p => p /\\ []p");
    }

    #[test]
    fn malformed() {
        let l = proof("p => p");
        let r = proof("q, q => q");
        assert!(matches!(CutInstance::new(l, r), Err(CutError::Malformed(_))));
    }

    #[test]
    fn eliminate_nested() {
        let inner = Derivation::node(
            parse_sequent("p => []p").unwrap(),
            Rule::Cut,
            Some(f("[]p")),
            vec![proof("p => []p"), weaken(&proof("[]p => []p"), &f("p")).unwrap()],
        );
        let right = weaken(&proof("p, []p => p /\\ []p"), &f("p")).unwrap();
        let right = contract_raw(&right, &f("p")).unwrap();
        let outer =
            Derivation::node(parse_sequent("p => p /\\ []p").unwrap(), Rule::Cut, Some(f("[]p")), vec![inner, right]);
        assert_eq!(outer.check_with_cuts(), Ok(()));
        let d = eliminate(&outer).unwrap();
        assert!(d.is_cut_free());
        assert_eq!(d.check(), Ok(()));
        assert_eq!(d.sequent, outer.sequent);
        let plain = proof("p => p");
        assert_eq!(eliminate(&plain).unwrap(), plain);
    }
}
