//! The Θ measure: a weight histogram of the unboxed antecedent together with
//! the succedent, ordered by shortlex.

use std::cmp::Ordering;
use std::fmt;

use crate::sequent::Sequent;

/// Counts of topmost formulas per weight. The rightmost entry counts weight
/// 1, and the list is exactly as long as the maximal weight present.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Theta(pub Vec<usize>);

impl Theta {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Shortlex comparison: shorter lists are smaller, equal lengths compare
    /// lexicographically from the left.
    pub fn shortlex_cmp(&self, other: &Theta) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("]")
    }
}

/// Histogram of a list of weights (each at least 1).
pub fn histogram(weights: impl IntoIterator<Item = usize>) -> Theta {
    let mut counts: Vec<usize> = Vec::new();
    for w in weights {
        assert!(w >= 1, "formulas have positive weight");
        if counts.len() < w {
            counts.resize(w, 0);
        }
        counts[w - 1] += 1;
    }
    counts.reverse();
    Theta(counts)
}

pub fn theta(s: &Sequent) -> Theta {
    let ant = s.ant.iter().flat_map(|(f, &n)| std::iter::repeat_n(f.unbox_once().weight(), n));
    histogram(ant.chain([s.suc.weight()]))
}

pub fn shortlex_less(a: &Theta, b: &Theta) -> bool {
    a.shortlex_cmp(b) == Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::expand;
    use crate::formula::parse;
    use crate::sequent::parse_sequent;

    fn th(s: &str) -> Vec<usize> {
        theta(&parse_sequent(s).unwrap()).0
    }

    #[test]
    fn worked_values() {
        assert_eq!(th("[](p /\\ q), p \\/ q => q -> p"), vec![1, 2, 0, 0]);
        assert_eq!(th("[]p => p"), vec![2]);
        assert_eq!(th("=> []p"), vec![1, 0]);
        assert_eq!(th("=> p"), vec![1]);
        assert_eq!(th("[][]p => p"), vec![1, 1]);
    }

    #[test]
    fn shortlex() {
        assert!(shortlex_less(&Theta(vec![2]), &Theta(vec![1, 0])));
        assert!(shortlex_less(&Theta(vec![1, 2, 0, 0]), &Theta(vec![1, 2, 0, 1])));
        assert!(!shortlex_less(&Theta(vec![0]), &Theta(vec![0])));
        assert!(shortlex_less(&Theta(vec![]), &Theta(vec![0])));
        assert!(shortlex_less(&Theta(vec![5, 5]), &Theta(vec![1, 0, 0])));
    }

    #[test]
    fn empty_histogram() {
        assert_eq!(histogram([]), Theta(vec![]));
    }

    /// Measuring the antecedent without unboxing fails to decrease on SLtR.
    #[test]
    fn unboxing_is_needed() {
        let naive = |s: &str| {
            let s = parse_sequent(s).unwrap();
            histogram(s.ant.occurrences().map(|f| f.weight()).chain([s.suc.weight()]))
        };
        assert!(!shortlex_less(&naive("[]p => p"), &naive("=> []p")));
        assert!(shortlex_less(&theta(&parse_sequent("[]p => p").unwrap()), &theta(&parse_sequent("=> []p").unwrap())));
    }

    #[test]
    fn doubled_diagonal_is_smaller() {
        for s in ["p", "p -> q", "[]p /\\ q", "(p -> q) -> r"] {
            let f = parse(s).unwrap();
            let two = histogram([f.weight(), f.weight()]);
            let boxed = histogram([crate::formula::Formula::boxed(f).weight()]);
            assert!(shortlex_less(&two, &boxed));
        }
    }

    #[test]
    fn premises_decrease_on_samples() {
        for s in [
            "[]p -> q, []r => s",
            "(p -> q) -> r, s => t",
            "p /\\ q, p \\/ q => []p",
            "(p /\\ q) -> r, (p \\/ q) -> r, p, p -> q => q -> p",
        ] {
            let s = parse_sequent(s).unwrap();
            for i in expand(&s) {
                for p in &i.premises {
                    assert!(shortlex_less(&theta(p), &theta(&s)), "{} on {s}", i.rule);
                }
            }
        }
    }
}
