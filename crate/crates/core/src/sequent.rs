//! Finite multisets of formulas and sequents `Γ => φ`.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;

use thiserror::Error;

use crate::formula::{lex, Formula, ParseError, Parser, Token};

/// A finite multiset of formulas kept in canonical sorted form, so two
/// multisets are equal iff they have the same elements with the same
/// multiplicities.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset {
    entries: BTreeMap<Formula, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula `{0}` does not occur in the multiset")]
pub struct Absent(pub Formula);

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(f: Formula) -> Self {
        let mut m = Self::new();
        m.insert(f);
        m
    }

    pub fn insert(&mut self, f: Formula) {
        self.insert_n(f, 1);
    }

    pub fn insert_n(&mut self, f: Formula, n: usize) {
        if n > 0 {
            *self.entries.entry(f).or_insert(0) += n;
        }
    }

    /// Removes one occurrence of `f` in place.
    pub fn remove(&mut self, f: &Formula) -> Result<(), Absent> {
        match self.entries.get_mut(f) {
            Some(n) if *n > 1 => {
                *n -= 1;
                Ok(())
            }
            Some(_) => {
                self.entries.remove(f);
                Ok(())
            }
            None => Err(Absent(f.clone())),
        }
    }

    /// A copy with `f` added once.
    pub fn with(&self, f: Formula) -> Self {
        let mut m = self.clone();
        m.insert(f);
        m
    }

    pub fn count(&self, f: &Formula) -> usize {
        self.entries.get(f).copied().unwrap_or(0)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.entries.contains_key(f)
    }

    /// Total number of occurrences.
    pub fn len(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct formulas with their multiplicities, in canonical order.
    pub fn iter(&self) -> btree_map::Iter<'_, Formula, usize> {
        self.entries.iter()
    }

    /// Distinct formulas in canonical order.
    pub fn distinct(&self) -> impl Iterator<Item = &Formula> {
        self.entries.keys()
    }

    /// Every occurrence, repetitions expanded, in canonical order.
    pub fn occurrences(&self) -> impl Iterator<Item = &Formula> {
        self.entries.iter().flat_map(|(f, &n)| std::iter::repeat_n(f, n))
    }

    /// `self ⊆ other` as multisets.
    pub fn is_sub(&self, other: &Multiset) -> bool {
        self.entries.iter().all(|(f, &n)| other.count(f) >= n)
    }

    /// Multiset difference, saturating at zero.
    pub fn minus(&self, other: &Multiset) -> Multiset {
        let mut out = Multiset::new();
        for (f, &n) in &self.entries {
            let k = n.saturating_sub(other.count(f));
            out.insert_n(f.clone(), k);
        }
        out
    }

    /// `□Γ`: boxes every element, preserving multiplicities.
    pub fn boxed(&self) -> Multiset {
        self.entries.iter().map(|(f, &n)| (Formula::boxed(f.clone()), n)).collect()
    }

    /// Strips one top-level box from each boxed element; others unchanged.
    pub fn unbox_all(&self) -> Multiset {
        self.entries.iter().map(|(f, &n)| (f.unbox_once().clone(), n)).collect()
    }
}

impl FromIterator<Formula> for Multiset {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for f in iter {
            m.insert(f);
        }
        m
    }
}

impl FromIterator<(Formula, usize)> for Multiset {
    fn from_iter<I: IntoIterator<Item = (Formula, usize)>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for (f, n) in iter {
            m.insert_n(f, n);
        }
        m
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.occurrences()).finish()
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.occurrences().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

pub fn msum(a: &Multiset, b: &Multiset) -> Multiset {
    let mut out = a.clone();
    for (f, &n) in b.iter() {
        out.insert_n(f.clone(), n);
    }
    out
}

pub fn mremove(a: &Multiset, f: &Formula) -> Result<Multiset, Absent> {
    let mut out = a.clone();
    out.remove(f)?;
    Ok(out)
}

/// Splits `a` into its non-boxed part `Φ` and the unboxing `Γ` of its boxed
/// part, so that `a = Φ ⊎ □Γ`.
pub fn partition_boxed(a: &Multiset) -> (Multiset, Multiset) {
    let mut phi = Multiset::new();
    let mut gamma = Multiset::new();
    for (f, &n) in a.iter() {
        match f.unboxed() {
            Some(body) => gamma.insert_n(body.clone(), n),
            None => phi.insert_n(f.clone(), n),
        }
    }
    (phi, gamma)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub ant: Multiset,
    pub suc: Formula,
}

impl Sequent {
    pub fn new(ant: Multiset, suc: Formula) -> Self {
        Sequent { ant, suc }
    }

    /// `=> f`.
    pub fn goal(f: Formula) -> Self {
        Sequent { ant: Multiset::new(), suc: f }
    }

    pub fn vars(&self) -> std::collections::BTreeSet<std::sync::Arc<str>> {
        let mut out = self.suc.vars();
        for f in self.ant.distinct() {
            f.collect_vars(&mut out);
        }
        out
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ant.is_empty() {
            write!(f, "=> {}", self.suc)
        } else {
            write!(f, "{} => {}", self.ant, self.suc)
        }
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl std::str::FromStr for Sequent {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequent(s)
    }
}

/// Parses `f1, ..., fn => g` (the antecedent may be empty).
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser::new(&tokens, text.len());
    let mut ant = Multiset::new();
    if p.peek() != Some(&Token::Turnstile) {
        loop {
            ant.insert(p.formula()?);
            match p.peek() {
                Some(Token::Comma) => {
                    p.bump();
                }
                Some(Token::Turnstile) => break,
                Some(t) => return Err(p.error(format!("expected `,` or `=>`, found {t}"))),
                None => return Err(p.error("expected `=>`, found end of input")),
            }
        }
    }
    p.bump();
    let suc = p.formula()?;
    if !p.at_end() {
        return Err(p.error("trailing input after sequent"));
    }
    Ok(Sequent { ant, suc })
}
