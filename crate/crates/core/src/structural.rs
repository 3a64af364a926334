//! Admissible rules as executable proof transformations.
//!
//! Every public function checks its input proofs first and then works on
//! trusted trees. The crate-internal `*_raw` variants skip the check and are
//! what the cut procedure composes.
//!
//! All transformations recurse on the input proof and rebuild each node by
//! re-instantiating its rule at the new conclusion with [`premises`]. The new
//! premise sequents then differ from the old ones only by formulas added to
//! the antecedent or boxed formulas that lost their box, which
//! [`fit`] repairs with weakening and unboxing.

use thiserror::Error;

use crate::calculus::{premises, Derivation, Rule, RuleInstance, Violation};
use crate::formula::Formula;
use crate::sequent::{msum, partition_boxed, Multiset, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("input proof is not valid: {0}")]
    InvalidProof(Violation),
    #[error("`{0}` does not occur in the antecedent")]
    Absent(Formula),
    #[error("`{0}` is not a boxed formula")]
    NotBoxed(Formula),
    #[error("`{0}` must occur at least twice in the antecedent")]
    NotDuplicated(Formula),
    #[error("{0} is not height-preserving invertible")]
    NotInvertible(Rule),
    #[error("`{0}` does not have the required shape")]
    Shape(Formula),
    #[error("rule instance does not match the proof: {0}")]
    InstanceMismatch(String),
    #[error("contexts of the two proofs do not match")]
    ContextMismatch,
    #[error("internal error: {0}")]
    Internal(String),
}

type Result<T> = std::result::Result<T, TransformError>;

/// The admissible rules, labelled by whether they preserve height.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProofTransform {
    Wkn,
    Ctr,
    Unbox,
    BoxImpLIR,
    ImpImpLIR,
    ImpImpLIL,
    IdGen,
    ImpL,
    Invert(Rule),
}

impl ProofTransform {
    pub fn height_preserving(self) -> bool {
        match self {
            ProofTransform::Wkn
            | ProofTransform::Unbox
            | ProofTransform::BoxImpLIR
            | ProofTransform::ImpImpLIR
            | ProofTransform::Invert(_) => true,
            ProofTransform::Ctr | ProofTransform::ImpImpLIL | ProofTransform::IdGen | ProofTransform::ImpL => false,
        }
    }
}

fn checked(d: &Derivation) -> Result<()> {
    d.check().map_err(TransformError::InvalidProof)
}

fn internal(msg: impl Into<String>) -> TransformError {
    TransformError::Internal(msg.into())
}

fn instantiate(rule: Rule, principal: Option<&Formula>, s: &Sequent) -> Result<Vec<Sequent>> {
    premises(rule, principal, s).map_err(|e| internal(format!("{rule} at `{s}`: {e}")))
}

/// `d` with its last rule re-instantiated at `target`, every subproof
/// adjusted by [`fit`].
fn rebuild(d: &Derivation, target: Sequent) -> Result<Derivation> {
    let tps = instantiate(d.rule, d.principal.as_ref(), &target)?;
    let children = d.premises.iter().zip(&tps).map(|(c, tp)| fit(c, tp)).collect::<Result<_>>()?;
    Ok(Derivation::node(target, d.rule, d.principal.clone(), children))
}

/// Turns a proof of `Γ => χ` into one of `Δ => χ`, where `Δ` arises from `Γ`
/// by unboxing some boxed formulas (possibly several times) and adding
/// others. Height-preserving.
pub(crate) fn fit(d: &Derivation, target: &Sequent) -> Result<Derivation> {
    if d.sequent.suc != target.suc {
        return Err(internal(format!("cannot fit `{}` to `{target}`", d.sequent)));
    }
    if d.sequent == *target {
        return Ok(d.clone());
    }
    let mut cur = None;
    // unboxing may expose another excess box, as in `[][]A` to `A`
    loop {
        let have = cur.as_ref().unwrap_or(d);
        let Some(f) = have.sequent.ant.minus(&target.ant).distinct().next().cloned() else { break };
        if !f.is_boxed() {
            return Err(internal(format!("cannot fit `{}` to `{target}`", d.sequent)));
        }
        cur = Some(unbox_one_raw(have, &f)?);
    }
    let have = cur.as_ref().unwrap_or(d);
    let added = target.ant.minus(&have.sequent.ant);
    for f in added.occurrences() {
        cur = Some(wkn_raw(cur.as_ref().unwrap_or(d), f)?);
    }
    Ok(cur.unwrap_or_else(|| d.clone()))
}

pub(crate) fn wkn_raw(d: &Derivation, f: &Formula) -> Result<Derivation> {
    let mut t = d.sequent.clone();
    t.ant.insert(f.clone());
    rebuild(d, t)
}

fn unbox_one_raw(d: &Derivation, boxed: &Formula) -> Result<Derivation> {
    let body = boxed.unboxed().ok_or_else(|| TransformError::NotBoxed(boxed.clone()))?;
    let mut t = d.sequent.clone();
    t.ant.remove(boxed).map_err(|_| TransformError::Absent(boxed.clone()))?;
    t.ant.insert(body.clone());
    rebuild(d, t)
}

/// Replaces the antecedent occurrence `p` by the multiset `p_new` all the
/// way up the proof. At nodes where `p` is principal, `principal_case`
/// produces the subproof instead.
fn replace_left(
    d: &Derivation,
    p: &Formula,
    p_new: &Multiset,
    principal_case: &dyn Fn(&Derivation) -> Result<Derivation>,
) -> Result<Derivation> {
    if d.principal.as_ref() == Some(p) {
        return principal_case(d);
    }
    let mut t = d.sequent.clone();
    t.ant.remove(p).map_err(|_| TransformError::Absent(p.clone()))?;
    t.ant = msum(&t.ant, p_new);
    let tps = instantiate(d.rule, d.principal.as_ref(), &t)?;
    let mut children = Vec::with_capacity(tps.len());
    for (c, tp) in d.premises.iter().zip(&tps) {
        let c2 = replace_left(c, p, p_new, principal_case)?;
        children.push(fit(&c2, tp)?);
    }
    Ok(Derivation::node(t, d.rule, d.principal.clone(), children))
}

/// From a proof of the conclusion of `rule` with principal `q`, a proof of
/// its `i`-th premise. Valid for premises sharing the conclusion's
/// succedent: every premise of the invertible left rules, and the right
/// premise of ImpImpL and BoxImpL.
pub(crate) fn invert_left_raw(d: &Derivation, rule: Rule, q: &Formula, i: usize) -> Result<Derivation> {
    let ps = premises(rule, Some(q), &d.sequent).map_err(TransformError::InstanceMismatch)?;
    let target = ps.get(i).ok_or_else(|| internal(format!("{rule} has no premise {i}")))?;
    if target.suc != d.sequent.suc {
        return Err(internal(format!("premise {i} of {rule} changes the succedent")));
    }
    let mut rest = d.sequent.ant.clone();
    rest.remove(q).map_err(|_| TransformError::Absent(q.clone()))?;
    let p_new = target.ant.minus(&rest);
    let out = replace_left(d, q, &p_new, &|n: &Derivation| {
        if n.rule != rule {
            return Err(internal(format!("`{q}` principal for {} instead of {rule}", n.rule)));
        }
        Ok(n.premises[i].clone())
    })?;
    debug_assert_eq!(&out.sequent, target);
    Ok(out)
}

pub(crate) fn box_imp_lir_raw(d: &Derivation, q: &Formula) -> Result<Derivation> {
    invert_left_raw(d, Rule::BoxImpL, q, 1)
}

pub(crate) fn imp_imp_lir_raw(d: &Derivation, q: &Formula) -> Result<Derivation> {
    invert_left_raw(d, Rule::ImpImpL, q, 1)
}

pub(crate) fn imp_imp_lil_raw(d: &Derivation, q: &Formula) -> Result<Derivation> {
    let (a, b, c) = match q {
        Formula::Imp(l, c) => match &**l {
            Formula::Imp(a, b) => ((**a).clone(), (**b).clone(), (**c).clone()),
            _ => return Err(TransformError::Shape(q.clone())),
        },
        _ => return Err(TransformError::Shape(q.clone())),
    };
    let bc = Formula::imp(b, c);
    let p_new: Multiset = [a.clone(), bc.clone(), bc.clone()].into_iter().collect();
    replace_left(d, q, &p_new, &|n: &Derivation| {
        // n: Γ, q => χ by ImpImpL with premises Γ, B->C => A->B and Γ, C => χ
        let left = invert_imp_r_raw(&n.premises[0])?;
        let right = wkn_raw(&wkn_raw(&n.premises[1], &a)?, &bc)?;
        imp_left_raw(&left, &right)
    })
}

/// From a proof of `Γ => A -> B`, a proof of `Γ, A => B`.
pub(crate) fn invert_imp_r_raw(d: &Derivation) -> Result<Derivation> {
    let (a, b) = match &d.sequent.suc {
        Formula::Imp(a, b) => ((**a).clone(), (**b).clone()),
        f => return Err(TransformError::Shape(f.clone())),
    };
    let target = Sequent::new(d.sequent.ant.with(a), b);
    invert_right(d, target, Rule::ImpR, 0)
}

/// From a proof of `Γ => A /\ B`, a proof of `Γ => A` (`k = 0`) or `Γ => B`.
pub(crate) fn invert_and_r_raw(d: &Derivation, k: usize) -> Result<Derivation> {
    let target = match &d.sequent.suc {
        Formula::And(a, b) => Sequent::new(d.sequent.ant.clone(), if k == 0 { (**a).clone() } else { (**b).clone() }),
        f => return Err(TransformError::Shape(f.clone())),
    };
    invert_right(d, target, Rule::AndR, k)
}

fn invert_right(d: &Derivation, target: Sequent, rule: Rule, k: usize) -> Result<Derivation> {
    if d.rule == rule {
        return Ok(d.premises[k].clone());
    }
    match d.rule {
        Rule::BotL => return Ok(Derivation::leaf(target, Rule::BotL)),
        r if r.has_principal() && r != Rule::Cut => {}
        r => return Err(internal(format!("{r} cannot conclude `{}`", d.sequent))),
    }
    let extra = target.ant.minus(&d.sequent.ant);
    let tps = instantiate(d.rule, d.principal.as_ref(), &target)?;
    let mut children = Vec::with_capacity(tps.len());
    for (c, tp) in d.premises.iter().zip(&tps) {
        if c.sequent.suc == tp.suc {
            children.push(fit(c, tp)?);
        } else {
            let t2 = Sequent::new(msum(&c.sequent.ant, &extra), tp.suc.clone());
            let c2 = invert_right(c, t2, rule, k)?;
            children.push(fit(&c2, tp)?);
        }
    }
    Ok(Derivation::node(target, d.rule, d.principal.clone(), children))
}

/// From proofs of `Γ => A` and `Γ, B => χ`, a proof of `Γ, A -> B => χ`.
pub(crate) fn imp_left_raw(p1: &Derivation, p2: &Derivation) -> Result<Derivation> {
    let gamma = &p1.sequent.ant;
    let a = &p1.sequent.suc;
    let added = p2.sequent.ant.minus(gamma);
    if !gamma.is_sub(&p2.sequent.ant) || added.len() != 1 {
        return Err(TransformError::ContextMismatch);
    }
    let b = added.distinct().next().unwrap().clone();
    let ab = Formula::imp(a.clone(), b.clone());
    let target = Sequent::new(gamma.with(ab.clone()), p2.sequent.suc.clone());
    let out = match p1.rule {
        Rule::BotL => Derivation::leaf(target, Rule::BotL),
        Rule::IdP => Derivation::node(target, Rule::AtomImpL, Some(ab), vec![p2.clone()]),
        Rule::AndR => {
            let (c, d) = a.bin_parts();
            let db = imp_left_raw(&p1.premises[1], p2)?;
            let cdb = imp_left_raw(&p1.premises[0], &db)?;
            debug_assert_eq!(cdb.sequent.ant, gamma.with(Formula::imp(c.clone(), Formula::imp(d.clone(), b))));
            Derivation::node(target, Rule::AndImpL, Some(ab), vec![cdb])
        }
        Rule::OrR1 | Rule::OrR2 => {
            let (c, d) = a.bin_parts();
            let other = if p1.rule == Rule::OrR1 { d } else { c };
            let ob = Formula::imp(other.clone(), b);
            let q1 = wkn_raw(&p1.premises[0], &ob)?;
            let q2 = wkn_raw(p2, &ob)?;
            let inner = imp_left_raw(&q1, &q2)?;
            let tp = instantiate(Rule::OrImpL, Some(&ab), &target)?.remove(0);
            Derivation::node(target, Rule::OrImpL, Some(ab), vec![fit(&inner, &tp)?])
        }
        Rule::ImpR => {
            let (_, d) = a.bin_parts();
            let db = Formula::imp(d.clone(), b);
            Derivation::node(target, Rule::ImpImpL, Some(ab), vec![wkn_raw(p1, &db)?, p2.clone()])
        }
        Rule::SLtR => {
            let tps = instantiate(Rule::BoxImpL, Some(&ab), &target)?;
            let left = fit(&p1.premises[0], &tps[0])?;
            Derivation::node(target, Rule::BoxImpL, Some(ab), vec![left, p2.clone()])
        }
        Rule::ImpImpL | Rule::BoxImpL => {
            let q = p1.principal.as_ref().unwrap();
            let tps = instantiate(p1.rule, Some(q), &target)?;
            let left = fit(&p1.premises[0], &tps[0])?;
            let inv = invert_left_raw(p2, p1.rule, q, 1)?;
            let right = imp_left_raw(&p1.premises[1], &inv)?;
            Derivation::node(target, p1.rule, Some(q.clone()), vec![left, fit(&right, &tps[1])?])
        }
        Rule::AndL | Rule::OrL | Rule::AtomImpL | Rule::AndImpL | Rule::OrImpL => {
            let q = p1.principal.as_ref().unwrap();
            let tps = instantiate(p1.rule, Some(q), &target)?;
            let mut children = Vec::with_capacity(tps.len());
            for (i, (c, tp)) in p1.premises.iter().zip(&tps).enumerate() {
                let inv = invert_left_raw(p2, p1.rule, q, i)?;
                children.push(fit(&imp_left_raw(c, &inv)?, tp)?);
            }
            Derivation::node(target, p1.rule, Some(q.clone()), children)
        }
        Rule::Cut => return Err(internal("cut in a cut-free proof")),
    };
    Ok(out)
}

/// A proof of `Γ, f => f` for any `f`.
pub fn id_general(f: &Formula, ctx: &Multiset) -> Derivation {
    let target = Sequent::new(ctx.with(f.clone()), f.clone());
    match f {
        Formula::Var(_) => Derivation::leaf(target, Rule::IdP),
        Formula::Bot => Derivation::leaf(target, Rule::BotL),
        Formula::And(a, b) => {
            let base = ctx.with((**a).clone()).with((**b).clone());
            let prem = Sequent::new(base, f.clone());
            let left = id_general(a, &ctx.with((**b).clone()));
            let right = id_general(b, &ctx.with((**a).clone()));
            let and_r = Derivation::node(prem, Rule::AndR, None, vec![left, right]);
            Derivation::node(target, Rule::AndL, Some(f.clone()), vec![and_r])
        }
        Formula::Or(a, b) => {
            let l = Derivation::node(
                Sequent::new(ctx.with((**a).clone()), f.clone()),
                Rule::OrR1,
                None,
                vec![id_general(a, ctx)],
            );
            let r = Derivation::node(
                Sequent::new(ctx.with((**b).clone()), f.clone()),
                Rule::OrR2,
                None,
                vec![id_general(b, ctx)],
            );
            Derivation::node(target, Rule::OrL, Some(f.clone()), vec![l, r])
        }
        Formula::Imp(a, b) => {
            let ca = ctx.with((**a).clone());
            let p1 = id_general(a, ctx);
            let p2 = id_general(b, &ca);
            let inner = imp_left_raw(&p1, &p2).expect("identity subproofs share their context");
            Derivation::node(target, Rule::ImpR, None, vec![inner])
        }
        Formula::Box(a) => {
            let (phi, gamma) = partition_boxed(ctx);
            let inner = id_general(a, &msum(&phi, &gamma).with(f.clone()));
            Derivation::node(target, Rule::SLtR, None, vec![inner])
        }
    }
}

/// From a proof of `Γ, f, f => χ`, a proof of `Γ, f => χ`.
pub(crate) fn contract_raw(d: &Derivation, f: &Formula) -> Result<Derivation> {
    if d.sequent.ant.count(f) < 2 {
        return Err(TransformError::NotDuplicated(f.clone()));
    }
    let mut target = d.sequent.clone();
    target.ant.remove(f).unwrap();
    if d.principal.as_ref() != Some(f) {
        let tps = instantiate(d.rule, d.principal.as_ref(), &target)?;
        let mut children = Vec::with_capacity(tps.len());
        for (c, tp) in d.premises.iter().zip(&tps) {
            let removed = c.sequent.ant.minus(&tp.ant);
            let c2 = match removed.len() {
                0 => fit(c, tp)?,
                1 => {
                    let x = removed.distinct().next().unwrap();
                    debug_assert!(x.weight() <= f.weight());
                    fit(&contract_raw(c, x)?, tp)?
                }
                _ => return Err(internal(format!("contracting `{f}` in `{}`", c.sequent))),
            };
            children.push(c2);
        }
        return Ok(Derivation::node(target, d.rule, d.principal.clone(), children));
    }
    let tps = instantiate(d.rule, Some(f), &target)?;
    let children: Vec<Derivation> = match d.rule {
        Rule::AndL | Rule::OrL | Rule::AtomImpL | Rule::AndImpL | Rule::OrImpL => {
            let mut out = Vec::with_capacity(tps.len());
            for (i, (c, tp)) in d.premises.iter().zip(&tps).enumerate() {
                let mut cur = invert_left_raw(c, d.rule, f, i)?;
                // cur proves tp plus a second copy of each new formula
                let extra = cur.sequent.ant.minus(&tp.ant);
                for x in extra.occurrences() {
                    debug_assert!(x.weight() < f.weight());
                    cur = contract_raw(&cur, x)?;
                }
                out.push(fit(&cur, tp)?);
            }
            out
        }
        Rule::ImpImpL => {
            let (a, b, c) = f.imp_imp_parts();
            let bc = Formula::imp(b, c.clone());
            let mut l = imp_imp_lil_raw(&d.premises[0], f)?;
            l = contract_raw(&l, &bc)?;
            l = contract_raw(&l, &bc)?;
            l = invert_imp_r_raw(&l)?;
            l = contract_raw(&l, &a)?;
            let left = Derivation::node(tps[0].clone(), Rule::ImpR, None, vec![fit(&l, &tps[0].with_imp_premise())?]);
            let r = contract_raw(&imp_imp_lir_raw(&d.premises[1], f)?, &c)?;
            vec![left, fit(&r, &tps[1])?]
        }
        Rule::BoxImpL => {
            let b = f.bin_parts().1.clone();
            let l = contract_raw(&box_imp_lir_raw(&d.premises[0], f)?, &b)?;
            let r = contract_raw(&box_imp_lir_raw(&d.premises[1], f)?, &b)?;
            vec![fit(&l, &tps[0])?, fit(&r, &tps[1])?]
        }
        r => return Err(internal(format!("{r} with a principal formula"))),
    };
    Ok(Derivation::node(target, d.rule, Some(f.clone()), children))
}

impl Formula {
    fn bin_parts(&self) -> (&Formula, &Formula) {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => (a, b),
            _ => panic!("`{self}` is not a binary formula"),
        }
    }

    fn imp_parts(&self) -> (&Formula, &Formula) {
        match self {
            Formula::Imp(a, b) => (a, b),
            _ => panic!("`{self}` is not an implication"),
        }
    }

    /// `(A -> B) -> C` split into `A`, `B`, `C`.
    fn imp_imp_parts(&self) -> (Formula, Formula, Formula) {
        let (l, c) = self.imp_parts();
        let (a, b) = l.imp_parts();
        (a.clone(), b.clone(), c.clone())
    }
}

impl Sequent {
    /// For `Γ => A -> B`, the sequent `Γ, A => B`.
    fn with_imp_premise(&self) -> Sequent {
        let (a, b) = self.suc.imp_parts();
        Sequent::new(self.ant.with(a.clone()), b.clone())
    }
}

/// Wkn: from `Γ => χ` to `Γ, f => χ`. Height-preserving.
pub fn weaken(p: &Derivation, f: &Formula) -> Result<Derivation> {
    checked(p)?;
    wkn_raw(p, f)
}

/// ⊠: strips one box from each designated antecedent occurrence.
/// Height-preserving.
pub fn unbox_left(p: &Derivation, designated: &Multiset) -> Result<Derivation> {
    checked(p)?;
    for f in designated.distinct() {
        if !f.is_boxed() {
            return Err(TransformError::NotBoxed(f.clone()));
        }
    }
    if !designated.is_sub(&p.sequent.ant) {
        let missing = designated.minus(&p.sequent.ant);
        return Err(TransformError::Absent(missing.distinct().next().unwrap().clone()));
    }
    let mut cur = p.clone();
    for f in designated.occurrences() {
        cur = unbox_one_raw(&cur, f)?;
    }
    Ok(cur)
}

/// Ctr: from `Γ, f, f => χ` to `Γ, f => χ`.
pub fn contract(p: &Derivation, f: &Formula) -> Result<Derivation> {
    checked(p)?;
    contract_raw(p, f)
}

/// Height-preserving inversion: given a proof of the conclusion of `instance`,
/// proofs of each of its premises, none taller than the input.
pub fn invert(rule: Rule, p: &Derivation, instance: &RuleInstance) -> Result<Vec<Derivation>> {
    if !rule.is_invertible() {
        return Err(TransformError::NotInvertible(rule));
    }
    checked(p)?;
    if instance.rule != rule {
        return Err(TransformError::InstanceMismatch(format!("instance is for {}", instance.rule)));
    }
    if instance.conclusion != p.sequent {
        return Err(TransformError::InstanceMismatch("conclusion differs from the proved sequent".into()));
    }
    if !instance.matches_schema() {
        return Err(TransformError::InstanceMismatch("premises do not follow the rule".into()));
    }
    let out = (0..instance.premises.len())
        .map(|i| match rule {
            Rule::ImpR => invert_imp_r_raw(p),
            Rule::AndR => invert_and_r_raw(p, i),
            _ => invert_left_raw(p, rule, instance.principal.as_ref().unwrap(), i),
        })
        .collect::<Result<Vec<_>>>()?;
    for (d, s) in out.iter().zip(&instance.premises) {
        if d.sequent != *s {
            return Err(internal(format!("inversion produced `{}` instead of `{s}`", d.sequent)));
        }
    }
    Ok(out)
}

fn require_shape(p: &Derivation, q: &Formula, ok: bool) -> Result<()> {
    if !ok {
        return Err(TransformError::Shape(q.clone()));
    }
    if !p.sequent.ant.contains(q) {
        return Err(TransformError::Absent(q.clone()));
    }
    Ok(())
}

/// □→LIR: from `Γ, []A -> B => χ` to `Γ, B => χ`. Height-preserving.
pub fn box_imp_lir(p: &Derivation, q: &Formula) -> Result<Derivation> {
    checked(p)?;
    require_shape(p, q, matches!(q, Formula::Imp(l, _) if l.is_boxed()))?;
    box_imp_lir_raw(p, q)
}

/// →→LIR: from `Γ, (A -> B) -> C => χ` to `Γ, C => χ`. Height-preserving.
pub fn imp_imp_lir(p: &Derivation, q: &Formula) -> Result<Derivation> {
    checked(p)?;
    require_shape(p, q, matches!(q, Formula::Imp(l, _) if matches!(**l, Formula::Imp(..))))?;
    imp_imp_lir_raw(p, q)
}

/// →→LIL: from `Γ, (A -> B) -> C => χ` to `Γ, A, B -> C, B -> C => χ`.
pub fn imp_imp_lil(p: &Derivation, q: &Formula) -> Result<Derivation> {
    checked(p)?;
    require_shape(p, q, matches!(q, Formula::Imp(l, _) if matches!(**l, Formula::Imp(..))))?;
    imp_imp_lil_raw(p, q)
}

/// →L: from `Γ => A` and `Γ, B => χ` to `Γ, A -> B => χ`.
pub fn imp_left(p1: &Derivation, p2: &Derivation) -> Result<Derivation> {
    checked(p1)?;
    checked(p2)?;
    imp_left_raw(p1, p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::search::prove;
    use crate::sequent::parse_sequent;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn sq(s: &str) -> Sequent {
        parse_sequent(s).unwrap()
    }

    fn proof(s: &str) -> Derivation {
        prove(&sq(s)).proof().cloned().unwrap_or_else(|| panic!("{s} unprovable"))
    }

    fn ok(d: &Derivation, root: &str) {
        assert_eq!(d.check(), Ok(()), "{d:?}");
        assert_eq!(d.sequent, sq(root));
    }

    #[test]
    fn flags() {
        assert!(ProofTransform::Wkn.height_preserving());
        assert!(ProofTransform::Invert(Rule::OrL).height_preserving());
        assert!(!ProofTransform::Ctr.height_preserving());
        assert!(!ProofTransform::ImpL.height_preserving());
    }

    #[test]
    fn weakening() {
        let id = proof("p => p");
        let w = weaken(&id, &f("q")).unwrap();
        ok(&w, "p, q => p");
        assert_eq!(w.height(), 1);
        let w = weaken(&proof("# => r"), &f("[]s")).unwrap();
        ok(&w, "#, []s => r");
        let a11 = proof("=> ([]p -> p) -> p");
        let w = weaken(&a11, &f("r")).unwrap();
        ok(&w, "r => ([]p -> p) -> p");
        assert!(w.height() <= a11.height());
        let w = weaken(&a11, &f("[]q")).unwrap();
        ok(&w, "[]q => ([]p -> p) -> p");
    }

    #[test]
    fn unboxing() {
        let d = proof("[]p => []p");
        let u = unbox_left(&d, &Multiset::singleton(f("[]p"))).unwrap();
        ok(&u, "p => []p");
        assert!(u.height() <= d.height());
        let d = proof("[]q, []p -> q => []q");
        assert_eq!(unbox_left(&d, &Multiset::new()).unwrap(), d);
        assert!(matches!(unbox_left(&d, &Multiset::singleton(f("q"))), Err(TransformError::NotBoxed(_))));
        assert!(matches!(unbox_left(&d, &Multiset::singleton(f("[]r"))), Err(TransformError::Absent(_))));
    }

    #[test]
    fn contraction() {
        let d = weaken(&proof("p => p"), &f("p")).unwrap();
        ok(&contract(&d, &f("p")).unwrap(), "p => p");
        let d = proof("p -> q, p -> q, p => q");
        ok(&contract(&d, &f("p -> q")).unwrap(), "p -> q, p => q");
        assert!(matches!(contract(&proof("p => p"), &f("p")), Err(TransformError::NotDuplicated(_))));
        let d = proof("(p -> q) -> r, (p -> q) -> r, q => r");
        ok(&contract(&d, &f("(p -> q) -> r")).unwrap(), "(p -> q) -> r, q => r");
        let d = proof("[]p -> p, []p -> p => p");
        ok(&contract(&d, &f("[]p -> p")).unwrap(), "[]p -> p => p");
    }

    #[test]
    fn inversions() {
        let d = proof("q => p -> p /\\ q");
        let inst = RuleInstance {
            rule: Rule::ImpR,
            principal: None,
            conclusion: d.sequent.clone(),
            premises: vec![sq("q, p => p /\\ q")],
        };
        let out = invert(Rule::ImpR, &d, &inst).unwrap();
        ok(&out[0], "q, p => p /\\ q");
        assert!(out[0].height() <= d.height());

        let d = proof("p /\\ q => q");
        let inst = crate::calculus::expand(&d.sequent).into_iter().find(|i| i.rule == Rule::AndL).unwrap();
        ok(&invert(Rule::AndL, &d, &inst).unwrap()[0], "p, q => q");

        let d = proof("(p -> q) -> r, r -> s => (p -> q) -> s");
        let inst = crate::calculus::expand(&d.sequent).into_iter().find(|i| i.rule == Rule::ImpImpL).unwrap();
        assert_eq!(invert(Rule::ImpImpL, &d, &inst), Err(TransformError::NotInvertible(Rule::ImpImpL)));
    }

    #[test]
    fn box_imp_right_inversion() {
        let d = proof("[]p -> p => p");
        assert_eq!(d.rule, Rule::BoxImpL);
        let out = box_imp_lir(&d, &f("[]p -> p")).unwrap();
        assert_eq!(out, d.premises[1]);
        let d = proof("[]p -> q, r => r");
        ok(&box_imp_lir(&d, &f("[]p -> q")).unwrap(), "q, r => r");
        assert!(box_imp_lir(&d, &f("[]q -> q")).is_err());
    }

    #[test]
    fn imp_imp_inversions() {
        let d = proof("(p -> q) -> r, q -> r => (p -> q) -> r");
        ok(&imp_imp_lir(&d, &f("(p -> q) -> r")).unwrap(), "r, q -> r => (p -> q) -> r");
        let l = imp_imp_lil(&d, &f("(p -> q) -> r")).unwrap();
        ok(&l, "p, q -> r, q -> r, q -> r => (p -> q) -> r");
        let d = proof("(p -> q) -> r, q => r");
        ok(&imp_imp_lil(&d, &f("(p -> q) -> r")).unwrap(), "p, q, q -> r, q -> r => r");
    }

    #[test]
    fn identities() {
        let d = id_general(&f("p"), &Multiset::new());
        assert_eq!(d.rule, Rule::IdP);
        let d = id_general(&f("p -> q"), &Multiset::new());
        ok(&d, "p -> q => p -> q");
        assert_eq!(d.rule, Rule::ImpR);
        assert_eq!(d.premises[0].rule, Rule::AtomImpL);
        assert_eq!(d.premises[0].premises[0].rule, Rule::IdP);
        ok(&id_general(&f("[]p"), &Multiset::new()), "[]p => []p");
        let ctx: Multiset = [f("[]r"), f("s")].into_iter().collect();
        for g in ["(p /\\ q) -> []r", "((p -> q) -> r) -> (p \\/ #)", "[]([]p -> p) /\\ (q \\/ []q)"] {
            ok(&id_general(&f(g), &ctx), &format!("[]r, s, {g} => {g}"));
        }
    }

    #[test]
    fn left_implication() {
        let p1 = proof("p => p");
        let p2 = proof("p, q => q");
        ok(&imp_left(&p1, &p2).unwrap(), "p, p -> q => q");
        let p2 = proof("r, q => q");
        assert_eq!(imp_left(&p1, &p2), Err(TransformError::ContextMismatch));
        let p1 = proof("[]a, b => []a /\\ (b \\/ c)");
        let p2 = proof("[]a, b, s => s");
        ok(&imp_left(&p1, &p2).unwrap(), "[]a, b, ([]a /\\ (b \\/ c)) -> s => s");
    }
}
