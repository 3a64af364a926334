//! Backward proof search over G4iSLt.
//!
//! Every rule lowers Θ in the shortlex order, so plain depth-first search
//! terminates under any rule order without loop checking. The default
//! configuration memoizes verdicts and tries cheap rules first; the naive
//! configuration drops memoization and shuffles the rule order at every node.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::calculus::{instances_of, Derivation, Rule, RuleInstance};
use crate::formula::Formula;
use crate::measure::{shortlex_less, theta, Theta};
use crate::sequent::Sequent;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    Proved(Derivation),
    /// No proof exists. `explored` counts node expansions, which in the
    /// memoizing mode is the number of distinct sequents visited.
    Unprovable {
        explored: usize,
    },
}

impl SearchResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, SearchResult::Proved(_))
    }

    pub fn proof(&self) -> Option<&Derivation> {
        match self {
            SearchResult::Proved(d) => Some(d),
            SearchResult::Unprovable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("budget exceeded after {0} node expansions")]
pub struct BudgetExceeded(pub u64);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub explored: usize,
    /// Longest branch seen, in nodes.
    pub max_depth: usize,
    /// Parent/child pairs where Θ failed to decrease strictly, or a sequent
    /// repeated on its own branch. Only counted with `check_branches`.
    pub branch_violations: usize,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub memoize: bool,
    /// Rule order; a rule missing from the list is never tried.
    pub order: Vec<Rule>,
    /// Seed for reshuffling `order` at every node. `None` keeps it fixed.
    pub shuffle_seed: Option<u64>,
    /// Maximum number of node expansions.
    pub budget: Option<u64>,
    pub check_branches: bool,
    /// Stop trying alternatives at a node once an invertible rule fails.
    pub commit_invertible: bool,
}

/// Zero-premise rules, then one-premise invertible rules, then branching
/// invertible rules, then the non-invertible ones, with SLtR last.
pub const DEFAULT_ORDER: [Rule; 14] = [
    Rule::BotL,
    Rule::IdP,
    Rule::AndL,
    Rule::ImpR,
    Rule::AtomImpL,
    Rule::AndImpL,
    Rule::OrImpL,
    Rule::AndR,
    Rule::OrL,
    Rule::OrR1,
    Rule::OrR2,
    Rule::ImpImpL,
    Rule::BoxImpL,
    Rule::SLtR,
];

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            memoize: true,
            order: DEFAULT_ORDER.to_vec(),
            shuffle_seed: None,
            budget: None,
            check_branches: cfg!(debug_assertions),
            commit_invertible: true,
        }
    }
}

impl SearchConfig {
    /// Unmemoized search in a random rule order, checking every branch.
    pub fn naive(seed: u64) -> Self {
        SearchConfig {
            memoize: false,
            order: DEFAULT_ORDER.to_vec(),
            shuffle_seed: Some(seed),
            budget: None,
            check_branches: true,
            commit_invertible: false,
        }
    }

    pub fn with_budget(mut self, budget: Option<u64>) -> Self {
        self.budget = budget;
        self
    }
}

/// Decides `s` with the default configuration.
pub fn prove(s: &Sequent) -> SearchResult {
    match search(s, &SearchConfig::default()) {
        Ok((r, _)) => r,
        Err(_) => unreachable!("no budget configured"),
    }
}

/// Decides `=> f`.
pub fn decide(f: &Formula) -> SearchResult {
    prove(&Sequent::goal(f.clone()))
}

pub fn search(s: &Sequent, config: &SearchConfig) -> Result<(SearchResult, SearchStats), BudgetExceeded> {
    let mut st = Searcher {
        config,
        memo: HashMap::new(),
        rng: config.shuffle_seed.map(ChaCha8Rng::seed_from_u64),
        stats: SearchStats::default(),
        path: Vec::new(),
        on_path: HashSet::new(),
    };
    let proof = if config.memoize {
        if st.provable(s)? {
            Some(st.rebuild(s))
        } else {
            None
        }
    } else {
        st.naive(s)?
    };
    let result = match proof {
        Some(d) => SearchResult::Proved(d),
        None => SearchResult::Unprovable { explored: st.stats.explored },
    };
    Ok((result, st.stats))
}

struct Searcher<'a> {
    config: &'a SearchConfig,
    memo: HashMap<Sequent, bool>,
    rng: Option<ChaCha8Rng>,
    stats: SearchStats,
    path: Vec<Theta>,
    on_path: HashSet<Sequent>,
}

impl Searcher<'_> {
    fn rule_order(&mut self) -> Vec<Rule> {
        let mut order = self.config.order.clone();
        if let Some(rng) = &mut self.rng {
            order.shuffle(rng);
        }
        order
    }

    fn instances(&mut self, s: &Sequent) -> Vec<RuleInstance> {
        let mut out = Vec::new();
        for rule in self.rule_order() {
            instances_of(rule, s, &mut out);
        }
        if let Some(rng) = &mut self.rng {
            // keep rule groups but vary principal choice too
            out.shuffle(rng);
        }
        out
    }

    fn enter(&mut self, s: &Sequent) -> Result<(), BudgetExceeded> {
        self.stats.explored += 1;
        if let Some(b) = self.config.budget {
            if self.stats.explored as u64 > b {
                return Err(BudgetExceeded(b));
            }
        }
        if self.config.check_branches {
            let t = theta(s);
            if let Some(parent) = self.path.last() {
                if !shortlex_less(&t, parent) {
                    self.stats.branch_violations += 1;
                }
            }
            if !self.on_path.insert(s.clone()) {
                self.stats.branch_violations += 1;
            }
            self.path.push(t);
            debug_assert_eq!(self.stats.branch_violations, 0, "Θ did not decrease below {s}");
        } else {
            self.path.push(Theta::default());
        }
        self.stats.max_depth = self.stats.max_depth.max(self.path.len());
        Ok(())
    }

    fn leave(&mut self, s: &Sequent) {
        self.path.pop();
        if self.config.check_branches {
            self.on_path.remove(s);
        }
    }

    fn provable(&mut self, s: &Sequent) -> Result<bool, BudgetExceeded> {
        if let Some(&v) = self.memo.get(s) {
            return Ok(v);
        }
        self.enter(s)?;
        let mut verdict = false;
        'instances: for inst in self.instances(s) {
            let mut all = true;
            for p in &inst.premises {
                if !self.provable(p)? {
                    all = false;
                    break;
                }
            }
            if all {
                verdict = true;
                break 'instances;
            }
            if self.config.commit_invertible && inst.rule.is_invertible() {
                break 'instances;
            }
        }
        self.leave(s);
        self.memo.insert(s.clone(), verdict);
        Ok(verdict)
    }

    /// Replays the search on a sequent known to be provable, picking the
    /// first instance whose premises are all provable.
    fn rebuild(&mut self, s: &Sequent) -> Derivation {
        for inst in self.instances(s) {
            let ok = inst.premises.iter().all(|p| self.provable(p).unwrap_or(false));
            if ok {
                let premises = inst.premises.iter().map(|p| self.rebuild(p)).collect();
                return Derivation::node(s.clone(), inst.rule, inst.principal, premises);
            }
        }
        unreachable!("rebuild called on unprovable sequent {s}")
    }

    fn naive(&mut self, s: &Sequent) -> Result<Option<Derivation>, BudgetExceeded> {
        self.enter(s)?;
        let mut found = None;
        'instances: for inst in self.instances(s) {
            let mut children = Vec::with_capacity(inst.premises.len());
            for p in &inst.premises {
                match self.naive(p)? {
                    Some(d) => children.push(d),
                    None => continue 'instances,
                }
            }
            found = Some(Derivation::node(s.clone(), inst.rule, inst.principal, children));
            break;
        }
        self.leave(s);
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::sequent::parse_sequent;

    fn decide_str(s: &str) -> SearchResult {
        decide(&parse(s).unwrap())
    }

    #[test]
    fn verdicts() {
        for s in ["([]p -> p) -> p", "p -> []p", "[]([]p -> p) -> []p", "[](p -> q) -> []p -> []q"] {
            let r = decide_str(s);
            let d = r.proof().unwrap_or_else(|| panic!("{s} should be provable"));
            assert_eq!(d.check(), Ok(()));
            assert_eq!(d.sequent, Sequent::goal(parse(s).unwrap()));
        }
        for s in ["[]p -> p", "((p -> q) -> p) -> p", "p \\/ (p -> #)", "p", "#"] {
            assert!(!decide_str(s).is_proved(), "{s} should be unprovable");
        }
    }

    #[test]
    fn deterministic() {
        let s = parse_sequent("(p -> q) -> r, []s -> p => (q \\/ []s) /\\ r").unwrap();
        assert_eq!(prove(&s), prove(&s));
        let f = parse("[]p -> p").unwrap();
        assert_eq!(decide(&f), decide(&f));
    }

    #[test]
    fn explored_counts_distinct_sequents() {
        match decide_str("#") {
            SearchResult::Unprovable { explored } => assert_eq!(explored, 1),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn naive_agrees() {
        for s in ["([]p -> p) -> p", "[]p -> p", "((p -> q) -> p) -> p", "[](p -> q) -> []p -> []q"] {
            let goal = Sequent::goal(parse(s).unwrap());
            let expected = prove(&goal).is_proved();
            for seed in 0..5 {
                let (r, stats) = search(&goal, &SearchConfig::naive(seed)).unwrap();
                assert_eq!(r.is_proved(), expected, "{s} seed {seed}");
                assert_eq!(stats.branch_violations, 0);
                if let Some(d) = r.proof() {
                    assert_eq!(d.check(), Ok(()));
                }
            }
        }
    }

    #[test]
    fn budget_aborts() {
        let goal = parse_sequent("=> ((p -> q) -> p) -> p").unwrap();
        let cfg = SearchConfig::default().with_budget(Some(2));
        assert_eq!(search(&goal, &cfg).unwrap_err(), BudgetExceeded(2));
    }
}
