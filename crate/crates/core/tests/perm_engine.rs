mod common;

use common::engine::check_against_enumeration;
use common::random_group;
use isokit::oracle::closure;
use isokit::perm::{GeneratorList, Giant, Perm, StabChain};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn perm_strategy(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap())
}

proptest! {
    #[test]
    fn composition_laws(a in perm_strategy(7), b in perm_strategy(7), c in perm_strategy(7)) {
        prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
        prop_assert!(a.then(&a.inverse()).is_identity());
        for p in 0..7 {
            prop_assert_eq!(a.then(&b).apply(p), b.apply(a.apply(p)));
        }
    }

    #[test]
    fn cycle_notation_roundtrip(a in perm_strategy(9)) {
        let text = a.to_string();
        prop_assert_eq!(Perm::parse(9, &text).unwrap(), a);
    }

    #[test]
    fn random_groups_match_enumeration(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_group(&mut rng, n);
        prop_assert_eq!(check_against_enumeration(&g, &mut rng), Ok(()));
    }

    #[test]
    fn setwise_stabilizer_and_transporter(seed in any::<u64>(), mask in 0u32..256) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_group(&mut rng, 8);
        let set: Vec<usize> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
        let els = closure(8, g.generators(), 100_000).unwrap();
        let fixes = |e: &Perm| e.image_of_set(&set) == set;
        let want = els.iter().filter(|e| fixes(e)).count() as u64;
        let stab = g.setwise_stabilizer(&set);
        prop_assert_eq!(stab.order_u64(), Some(want));
        prop_assert!(stab.generators().iter().all(fixes));
        let e = &els[els.len() / 2];
        let target = e.image_of_set(&set);
        let t = g.set_transporter(&set, &target).unwrap();
        prop_assert!(g.contains(&t));
        prop_assert_eq!(t.image_of_set(&set), target);
    }
}

#[test]
fn standard_groups() {
    assert_eq!(StabChain::symmetric(8).order_u64(), Some(40320));
    assert_eq!(StabChain::alternating(9).order_u64(), Some(181_440));
    assert_eq!(StabChain::cyclic(6).order_u64(), Some(6));
    assert_eq!(StabChain::symmetric(7).is_giant(), Giant::Sym);
    assert_eq!(StabChain::alternating(7).is_giant(), Giant::Alt);
    assert_eq!(StabChain::cyclic(7).is_giant(), Giant::Neither);
    let w = StabChain::wreath(&StabChain::symmetric(2), &StabChain::symmetric(5));
    assert_eq!(w.order_u64(), Some(32 * 120));
    let c2a9 = StabChain::wreath(&StabChain::cyclic(2), &StabChain::alternating(9));
    assert_eq!(c2a9.order_u64(), Some(512 * 181_440));
}

#[test]
fn sweep_of_small_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..120 {
        let g = random_group(&mut rng, 1 + i % 8);
        if let Err(e) = check_against_enumeration(&g, &mut rng) {
            panic!("group {i} {:?}: {e}", g.generators());
        }
    }
}

#[test]
fn generator_list_json() {
    let text = r#"{"n": 5, "gens": ["(1 2 3 4 5)", "(1 2)"]}"#;
    let g = GeneratorList::from_json(text).unwrap().to_group();
    assert_eq!(g.order_u64(), Some(120));
    assert!(GeneratorList::from_json(r#"{"n": 3, "gens": ["(1 4)"]}"#).is_err());
}

#[test]
fn conjugation_and_restriction() {
    let g = StabChain::new(6, vec![Perm::parse(6, "(1 2 3)").unwrap(), Perm::parse(6, "(4 5)").unwrap()]).unwrap();
    let c = Perm::parse(6, "(1 4)(2 5)(3 6)").unwrap();
    let h = g.conjugate(&c);
    assert!(h.contains(&Perm::parse(6, "(4 5 6)").unwrap()));
    assert!(h.contains(&Perm::parse(6, "(1 2)").unwrap()));
    let r = g.restrict(&[0, 1, 2]).unwrap();
    assert_eq!(r.order_u64(), Some(3));
}
