mod common;

use common::{random_string, related_string, si_agrees, si_group};
use isokit::luks::{coset_union, shift_string, Solver, SolverConfig, StringInstance, Symbol};
use isokit::oracle::{brute_string_iso, coset_matches_elements, OracleConfig};
use isokit::partition::PartitionSequence;
use isokit::perm::{Coset, Perm, StabChain};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn recursive() -> Solver {
    // force the recursion instead of whole-group enumeration
    Solver::new(SolverConfig { brute_cap: 4, ..Default::default() })
}

#[test]
fn sweep_against_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (plain, deep) = (Solver::default(), recursive());
    for i in 0..150 {
        let g = si_group(&mut rng, i);
        let x = random_string(&mut rng, g.degree(), 3);
        let y = related_string(&mut rng, &g, &x, 3);
        let solver = if i % 2 == 0 { &plain } else { &deep };
        if let Err(e) = si_agrees(solver, &g, &x, &y) {
            panic!("instance {i}: {e}");
        }
    }
    assert!(deep.stats().calls > 150);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn random_instances(seed in any::<u64>(), alphabet in 1u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = rng.gen_range(0..100);
        let g = si_group(&mut rng, pick);
        let x = random_string(&mut rng, g.degree(), alphabet);
        let y = related_string(&mut rng, &g, &x, alphabet);
        prop_assert_eq!(si_agrees(&recursive(), &g, &x, &y), Ok(()));
    }

    #[test]
    fn isomorphisms_map_x_to_y(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = si_group(&mut rng, 1);
        let x = random_string(&mut rng, g.degree(), 2);
        let y = related_string(&mut rng, &g, &x, 2);
        let seq = PartitionSequence::auto(g.clone()).unwrap();
        if let Some(c) = recursive().string_iso_main(&seq, &x, &y).unwrap() {
            for _ in 0..5 {
                let h = c.subgroup.random_element(&mut rng).then(&c.rep);
                prop_assert!((0..g.degree()).all(|a| x[a] == y[h.apply(a)]));
            }
        }
    }
}

#[test]
fn window_and_shift() {
    let g = StabChain::wreath(&StabChain::symmetric(2), &StabChain::symmetric(3));
    let seq = PartitionSequence::auto(g.clone()).unwrap();
    let x: Vec<Symbol> = vec![0, 1, 0, 0, 1, 1];
    let y: Vec<Symbol> = vec![1, 0, 1, 1, 0, 0];
    let solver = Solver::default();
    let window: Vec<usize> = (0..6).collect();
    let all = solver.string_iso_window(&seq, &x, &y, Some(&window)).unwrap();
    let want = brute_string_iso(6, g.generators(), &x, &y, &window, &OracleConfig::default()).unwrap();
    assert!(coset_matches_elements(all.as_ref(), &want));

    let r = Perm::parse(6, "(1 3 5)(2 4 6)").unwrap();
    let coset = Coset::new(g.clone(), r.clone()).unwrap();
    let shifted = solver.iso_window_shift(&seq, &coset, &x, &y, None).unwrap();
    // Iso over G r equals Iso over G, since r ∈ G
    assert!(coset_matches_elements(shifted.as_ref(), &want));
    let y2 = shift_string(&y, &r);
    assert_eq!(y2.len(), 6);
}

#[test]
fn union_of_cosets() {
    let s3 = StabChain::symmetric(3);
    let a3 = StabChain::alternating(3);
    let odd = Perm::parse(3, "(1 2)").unwrap();
    let u = coset_union(&[Some(Coset::group(a3.clone())), None, Some(Coset::new(a3, odd).unwrap())]).unwrap().unwrap();
    assert!(u.subgroup.same_group(&s3));
    assert!(coset_union(&[None, None]).unwrap().is_none());
}

#[test]
fn instance_json_roundtrip() {
    let text = r#"{"group": {"n": 4, "gens": ["(1 2 3 4)"]}, "x": "abab", "y": "baba"}"#;
    let inst = StringInstance::from_json(text).unwrap();
    let r = inst.solve(&Solver::default()).unwrap().unwrap();
    assert_eq!(r.subgroup.order_u64(), Some(2));
    let again = StringInstance::from_json_value(&inst.to_json_value()).unwrap();
    assert_eq!(again.x, inst.x);
}

#[test]
fn bad_strings_are_errors() {
    let seq = PartitionSequence::two_level(StabChain::symmetric(3), 3);
    assert!(Solver::default().string_iso_main(&seq, &[0, 1], &[0, 1, 2]).is_err());
}

#[test]
fn trace_satisfies_subproblem_bound() {
    let g = StabChain::wreath(&StabChain::symmetric(2), &StabChain::symmetric(4));
    let seq = PartitionSequence::auto(g).unwrap();
    let solver = recursive();
    solver.string_iso_main(&seq, &[0, 1, 1, 0, 0, 0, 1, 1], &[1, 0, 0, 1, 1, 1, 0, 0]).unwrap();
    let stats = solver.stats();
    assert!(!stats.trace.is_empty());
    assert!(stats.max_depth >= 1);
}
