//! Seeded random formulas and sequents for property tests and benchmarks.

use rand::Rng;

use crate::formula::Formula;
use crate::sequent::{Multiset, Sequent};

const NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

/// Shape parameters for random generation.
#[derive(Debug, Clone, Copy)]
pub struct Gen {
    /// Number of distinct variables, at most 6.
    pub vars: usize,
    /// Maximal formula depth.
    pub depth: usize,
    /// Probability of stopping early at an inner position.
    pub leaf_prob: f64,
    /// Probability that a leaf is `#` rather than a variable.
    pub bot_prob: f64,
    /// Maximal number of antecedent formulas.
    pub max_ant: usize,
    /// Upper bound on the summed weight of a sequent's formulas, enforced
    /// by resampling.
    pub max_weight: Option<usize>,
}

impl Gen {
    pub fn new(vars: usize, depth: usize) -> Self {
        assert!((1..=NAMES.len()).contains(&vars));
        Gen { vars, depth, leaf_prob: 0.3, bot_prob: 0.1, max_ant: 3, max_weight: None }
    }

    pub fn leaf_prob(mut self, p: f64) -> Self {
        self.leaf_prob = p;
        self
    }

    pub fn max_ant(mut self, n: usize) -> Self {
        self.max_ant = n;
        self
    }

    pub fn max_weight(mut self, w: usize) -> Self {
        self.max_weight = Some(w);
        self
    }

    pub fn formula(&self, rng: &mut impl Rng) -> Formula {
        self.formula_at(rng, self.depth)
    }

    pub fn formula_at(&self, rng: &mut impl Rng, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(self.leaf_prob) {
            return if rng.gen_bool(self.bot_prob) {
                Formula::Bot
            } else {
                Formula::var(NAMES[rng.gen_range(0..self.vars)])
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..9) {
            0 | 1 => Formula::and(self.formula_at(rng, d), self.formula_at(rng, d)),
            2 | 3 => Formula::or(self.formula_at(rng, d), self.formula_at(rng, d)),
            4..=6 => Formula::imp(self.formula_at(rng, d), self.formula_at(rng, d)),
            _ => Formula::boxed(self.formula_at(rng, d)),
        }
    }

    pub fn multiset(&self, rng: &mut impl Rng) -> Multiset {
        let n = rng.gen_range(0..=self.max_ant);
        (0..n).map(|_| self.formula(rng)).collect()
    }

    pub fn sequent(&self, rng: &mut impl Rng) -> Sequent {
        loop {
            let ant = self.multiset(rng);
            let s = Sequent::new(ant, self.formula(rng));
            match self.max_weight {
                Some(w) if sequent_weight(&s) > w => continue,
                _ => return s,
            }
        }
    }
}

/// Sum of the weights of all formula occurrences in `s`.
pub fn sequent_weight(s: &Sequent) -> usize {
    s.ant.occurrences().map(Formula::weight).sum::<usize>() + s.suc.weight()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bounded_and_reproducible() {
        let g = Gen::new(3, 4);
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let s = g.sequent(&mut a);
            assert_eq!(s, g.sequent(&mut b));
            assert!(s.ant.len() <= 3);
            assert!(s.suc.depth() <= 4);
            assert!(s.vars().len() <= 3);
        }
        let g = g.max_weight(10);
        for _ in 0..200 {
            assert!(sequent_weight(&g.sequent(&mut a)) <= 10);
        }
    }
}
