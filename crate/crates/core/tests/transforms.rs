use islt_core::audit;
use islt_core::cert;
use islt_core::random::Gen;
use islt_core::{prove, Derivation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn proofs(seed: u64, n: usize) -> Vec<Derivation> {
    let g = Gen::new(3, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        if let Some(d) = prove(&g.sequent(&mut rng)).proof() {
            out.push(d.clone());
        }
    }
    out
}

#[test]
fn admissible_rules_on_prover_output() {
    let g = Gen::new(3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut total = 0;
    for d in proofs(1, 150) {
        let extra = g.formula(&mut rng);
        total += audit::transforms(&d, &extra).unwrap_or_else(|e| panic!("{}: {e}", d.sequent));
    }
    assert!(total > 600, "only {total} transforms ran");
}

#[test]
fn random_cuts_are_admissible() {
    let g = Gen::new(3, 3).max_ant(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    let mut nontrivial = 0;
    while done < 150 {
        if let Some((l, r)) = audit::random_cut(&g, &mut rng) {
            let calls = audit::cut_pair(&l, &r).unwrap_or_else(|e| panic!("{} / {}: {e}", l.sequent, r.sequent));
            nontrivial += usize::from(calls > 1);
            done += 1;
        }
    }
    assert!(nontrivial > 20, "only {nontrivial} cuts recursed");
}

#[test]
fn injected_cuts_are_eliminated() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    for d in proofs(2, 120) {
        let k = rng.gen_range(1..=3);
        let Some(with_cuts) = audit::inject_cuts(&d, k, &mut rng) else { continue };
        assert_eq!(with_cuts.count_rule(islt_core::Rule::Cut), k);
        let reread = cert::from_json(&cert::to_json(&with_cuts)).unwrap();
        assert_eq!(reread, with_cuts);
        audit::eliminates(&with_cuts).unwrap_or_else(|e| panic!("{}: {e}", d.sequent));
        done += 1;
    }
    assert!(done > 60, "only {done} certificates had cuts injected");
}
