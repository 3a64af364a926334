use std::sync::OnceLock;

use islt_core::audit;
use islt_core::hilbert::{bridge_check, AxiomId, Substitution, METAVARIABLES};
use islt_core::random::Gen;
use islt_core::search::{search, SearchConfig};
use islt_core::semantics::{enumerate_models, KripkeModel};
use islt_core::{expand, parse, print, prove, Formula};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn models() -> &'static [KripkeModel] {
    static M: OnceLock<Vec<KripkeModel>> = OnceLock::new();
    M.get_or_init(|| enumerate_models(2, &["p", "q", "r"]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn premises_have_smaller_theta(seed: u64) {
        let s = Gen::new(4, 5).sequent(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(audit::theta_descends(&s).is_ok(), "{:?}", audit::theta_descends(&s));
    }

    #[test]
    fn expand_follows_the_schemas(seed: u64) {
        let s = Gen::new(3, 4).sequent(&mut ChaCha8Rng::seed_from_u64(seed));
        for inst in expand(&s) {
            prop_assert!(inst.matches_schema());
            prop_assert_eq!(&inst.conclusion, &s);
        }
    }

    #[test]
    fn curried_implication_is_lighter(seed: u64) {
        let g = Gen::new(4, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g2, h) = (g.formula(&mut rng), g.formula(&mut rng), g.formula(&mut rng));
        let curried = Formula::imp(f.clone(), Formula::imp(g2.clone(), h.clone()));
        let paired = Formula::imp(Formula::and(f, g2), h);
        prop_assert!(curried.weight() < paired.weight());
    }

    #[test]
    fn printing_roundtrips(seed: u64) {
        let f = Gen::new(4, 6).formula(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(parse(&print(&f)).unwrap(), f);
    }

    #[test]
    fn proofs_check_and_are_sound(seed: u64) {
        let s = Gen::new(3, 4).sequent(&mut ChaCha8Rng::seed_from_u64(seed));
        if let Some(d) = prove(&s).proof() {
            prop_assert!(d.check().is_ok());
            prop_assert_eq!(&d.sequent, &s);
            prop_assert!(audit::sound_in(&s, models()).is_ok());
        }
    }

    #[test]
    fn forcing_persists(seed: u64) {
        let f = Gen::new(3, 5).formula(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(audit::persistent_in(&f, models()).is_ok());
    }

    #[test]
    fn naive_search_agrees(seed: u64) {
        let s = Gen::new(3, 4).max_weight(18).sequent(&mut ChaCha8Rng::seed_from_u64(seed));
        let (r, stats) = search(&s, &SearchConfig::naive(seed).with_budget(Some(1_000_000))).unwrap();
        prop_assert_eq!(r.is_proved(), prove(&s).is_proved());
        prop_assert_eq!(stats.branch_violations, 0);
    }

    #[test]
    fn axiom_instances_are_theorems(seed: u64, axiom in 0usize..11) {
        let g = Gen::new(3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let subst: Substitution = METAVARIABLES.iter().map(|m| (m.to_string(), g.formula(&mut rng))).collect();
        prop_assert!(bridge_check(AxiomId::ALL[axiom], &subst));
    }
}
