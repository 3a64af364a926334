//! Property checks over single inputs, shared by the integration tests and
//! the acceptance runner. Each returns a description of the first failure.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::calculus::{expand, Derivation, Rule};
use crate::cut::{cut_admissible_traced, eliminate, CutInstance};
use crate::formula::Formula;
use crate::measure::{shortlex_less, theta};
use crate::random::Gen;
use crate::search::prove;
use crate::semantics::KripkeModel;
use crate::sequent::{msum, partition_boxed, Sequent};
use crate::structural::{
    box_imp_lir, contract, id_general, imp_imp_lil, imp_imp_lir, imp_left, invert, unbox_left, weaken, TransformError,
};

type Outcome<T = ()> = Result<T, String>;

/// Every premise of every rule instance ending in `s` has smaller Θ.
/// Returns the number of premises compared.
pub fn theta_descends(s: &Sequent) -> Outcome<usize> {
    let t = theta(s);
    let mut n = 0;
    for inst in expand(s) {
        for p in &inst.premises {
            if !shortlex_less(&theta(p), &t) {
                return Err(format!("{} premise `{p}` of `{s}` has Θ {} ≥ {t}", inst.rule, theta(p)));
            }
            n += 1;
        }
    }
    Ok(n)
}

fn accept(
    name: &str,
    out: Result<Derivation, TransformError>,
    expected: &Sequent,
    max_height: Option<usize>,
) -> Outcome<Derivation> {
    let d = out.map_err(|e| format!("{name}: {e}"))?;
    if d.sequent != *expected {
        return Err(format!("{name}: concluded `{}`, expected `{expected}`", d.sequent));
    }
    d.check().map_err(|v| format!("{name}: output rejected: {v}"))?;
    if let Some(h) = max_height {
        if d.height() > h {
            return Err(format!("{name}: height grew from {h} to {}", d.height()));
        }
    }
    Ok(d)
}

fn replaced(s: &Sequent, q: &Formula, with: &[Formula]) -> Sequent {
    let mut ant = s.ant.clone();
    ant.remove(q).expect("q occurs in the antecedent");
    for f in with {
        ant.insert(f.clone());
    }
    Sequent::new(ant, s.suc.clone())
}

/// Runs every admissible-rule transform that applies to the cut-free proof
/// `d`, using `extra` as the formula to add where one is needed. The
/// height-preserving ones must not grow the proof. Returns the number of
/// transforms run.
pub fn transforms(d: &Derivation, extra: &Formula) -> Outcome<usize> {
    let s = &d.sequent;
    let h = Some(d.height());
    let mut n = 0;

    accept("Wkn", weaken(d, extra), &Sequent::new(s.ant.with(extra.clone()), s.suc.clone()), h)?;
    n += 1;

    let boxed = partition_boxed(&s.ant).1.boxed();
    if !boxed.is_empty() {
        let expected = Sequent::new(msum(&s.ant.minus(&boxed), &boxed.unbox_all()), s.suc.clone());
        accept("Unbox", unbox_left(d, &boxed), &expected, h)?;
        n += 1;
    }

    for q in s.ant.distinct() {
        if let Formula::Imp(l, r) = q {
            match &**l {
                Formula::Box(_) => {
                    accept("BoxImpLIR", box_imp_lir(d, q), &replaced(s, q, &[(**r).clone()]), h)?;
                    n += 1;
                }
                Formula::Imp(a, b) => {
                    accept("ImpImpLIR", imp_imp_lir(d, q), &replaced(s, q, &[(**r).clone()]), h)?;
                    let bc = Formula::imp((**b).clone(), (**r).clone());
                    let expected = replaced(s, q, &[(**a).clone(), bc.clone(), bc]);
                    accept("ImpImpLIL", imp_imp_lil(d, q), &expected, None)?;
                    n += 2;
                }
                _ => {}
            }
        }
        let dup = weaken(d, q).map_err(|e| format!("Wkn: {e}"))?;
        accept("Ctr", contract(&dup, q), s, None)?;
        n += 1;
    }

    for inst in expand(s).into_iter().filter(|i| i.rule.is_invertible()) {
        let outs = invert(inst.rule, d, &inst).map_err(|e| format!("invert {}: {e}", inst.rule))?;
        for (o, p) in outs.into_iter().zip(&inst.premises) {
            accept(&format!("invert {}", inst.rule), Ok(o), p, h)?;
            n += 1;
        }
    }

    if let Some(a) = s.ant.distinct().next() {
        let mut rest = s.ant.clone();
        rest.remove(a).expect("a occurs");
        let p1 = id_general(a, &rest);
        let p2 = weaken(d, extra).map_err(|e| format!("Wkn: {e}"))?;
        let expected = Sequent::new(s.ant.with(Formula::imp(a.clone(), extra.clone())), s.suc.clone());
        accept("ImpL", imp_left(&p1, &p2), &expected, None)?;
        n += 1;
    }

    accept("IdGen", Ok(id_general(extra, &s.ant)), &Sequent::new(s.ant.with(extra.clone()), extra.clone()), None)?;
    Ok(n + 1)
}

/// Admits the cut of `left : Γ => φ` against `right : φ, Γ => χ` and checks
/// the result and the descent of its trace. Returns the trace length.
pub fn cut_pair(left: &Derivation, right: &Derivation) -> Outcome<usize> {
    let c = CutInstance::new(left.clone(), right.clone()).map_err(|e| e.to_string())?;
    let (d, trace) = cut_admissible_traced(&c).map_err(|e| format!("cut on `{}`: {e}", c.cut_formula))?;
    if d.sequent != c.conclusion() {
        return Err(format!("cut concluded `{}`, expected `{}`", d.sequent, c.conclusion()));
    }
    if !d.is_cut_free() {
        return Err("cut output contains a cut".into());
    }
    d.check().map_err(|v| format!("cut output rejected: {v}"))?;
    for (i, e) in trace.iter().enumerate() {
        if let Some(p) = e.parent {
            if p >= i || e.key_cmp(&trace[p]).is_ge() {
                return Err(format!("trace entry {i} does not descend below entry {p}"));
            }
        }
    }
    Ok(trace.len())
}

/// A random cut: `Γ => φ` and `φ, Γ => χ` both provable, with `φ` not
/// already in `Γ`. `None` if the sampled triple does not qualify.
pub fn random_cut(g: &Gen, rng: &mut impl Rng) -> Option<(Derivation, Derivation)> {
    let gamma = g.multiset(rng);
    let phi = g.formula(rng);
    if gamma.contains(&phi) {
        return None;
    }
    let left = prove(&Sequent::new(gamma.clone(), phi.clone())).proof()?.clone();
    let chi = g.formula(rng);
    let right = prove(&Sequent::new(gamma.with(phi), chi)).proof()?.clone();
    Some((left, right))
}

fn subformulas(f: &Formula, out: &mut Vec<Formula>) {
    out.push(f.clone());
    match f {
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            subformulas(a, out);
            subformulas(b, out);
        }
        Formula::Box(a) => subformulas(a, out),
        Formula::Var(_) | Formula::Bot => {}
    }
}

/// Replaces node `target` (in preorder) of `d` by a cut whose left premise
/// proves a lemma and whose right premise is a fresh search proof.
fn inject_at(d: &Derivation, target: &mut usize, rng: &mut impl Rng) -> Option<Derivation> {
    if *target == 0 {
        let s = &d.sequent;
        let mut candidates = Vec::new();
        for f in s.ant.distinct().chain([&s.suc]) {
            subformulas(f, &mut candidates);
        }
        candidates.shuffle(rng);
        for phi in candidates {
            if s.ant.contains(&phi) {
                continue;
            }
            if let Some(left) = prove(&Sequent::new(s.ant.clone(), phi.clone())).proof() {
                let right = prove(&Sequent::new(s.ant.with(phi.clone()), s.suc.clone())).proof()?.clone();
                return Some(Derivation::node(s.clone(), Rule::Cut, Some(phi), vec![left.clone(), right]));
            }
        }
        return None;
    }
    *target -= 1;
    let mut premises = d.premises.clone();
    for p in premises.iter_mut() {
        let size = p.size();
        if *target < size {
            *p = inject_at(p, target, rng)?;
            return Some(Derivation::node(d.sequent.clone(), d.rule, d.principal.clone(), premises));
        }
        *target -= size;
    }
    unreachable!("target within the tree")
}

fn node_at(d: &Derivation, mut target: usize) -> &Derivation {
    if target == 0 {
        return d;
    }
    target -= 1;
    for p in &d.premises {
        if target < p.size() {
            return node_at(p, target);
        }
        target -= p.size();
    }
    unreachable!("target within the tree")
}

/// `d` with `count` cuts inserted at random cut-free subtrees, so later
/// cuts may sit inside the premises of earlier ones. `None` if the chosen
/// nodes admit no useful lemma.
pub fn inject_cuts(d: &Derivation, count: usize, rng: &mut impl Rng) -> Option<Derivation> {
    let mut cur = d.clone();
    for _ in 0..count {
        let mut target = rng.gen_range(0..cur.size());
        while !node_at(&cur, target).is_cut_free() {
            target = rng.gen_range(0..cur.size());
        }
        cur = inject_at(&cur, &mut target, rng)?;
    }
    Some(cur)
}

/// Eliminates the cuts of `d` and checks the result proves the same root.
pub fn eliminates(d: &Derivation) -> Outcome<Derivation> {
    let out = eliminate(d).map_err(|e| e.to_string())?;
    if out.sequent != d.sequent {
        return Err(format!("root changed from `{}` to `{}`", d.sequent, out.sequent));
    }
    if !out.is_cut_free() {
        return Err("output still contains a cut".into());
    }
    out.check().map_err(|v| format!("output rejected: {v}"))?;
    Ok(out)
}

/// `s` holds at every world of every model.
pub fn sound_in(s: &Sequent, models: &[KripkeModel]) -> Outcome {
    for m in models {
        let bad = m.refuting_worlds(s);
        if bad != 0 {
            return Err(format!("`{s}` fails at world {} of {}", bad.trailing_zeros(), m.to_json()));
        }
    }
    Ok(())
}

/// Forcing of `f` is upward closed along `<=` in every model.
pub fn persistent_in(f: &Formula, models: &[KripkeModel]) -> Outcome {
    for m in models {
        let t = m.truth_set(f);
        for w in 0..m.worlds() {
            for v in 0..m.worlds() {
                if m.leq(w, v) && t >> w & 1 == 1 && t >> v & 1 == 0 {
                    return Err(format!("`{f}` holds at {w} but not at {v} in {}", m.to_json()));
                }
            }
        }
    }
    Ok(())
}
