mod common;

use common::{n, naive_times, random_relation};
use matchbound::relation::RelationSemiring;
use matchbound::semiring::check_semiring_laws;
use matchbound::{Boolean, Fuzzy, FuzzyValue, Natural, Relation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fuzzy_value() -> impl Strategy<Value = FuzzyValue> {
    prop_oneof![
        Just(FuzzyValue::PosInf),
        (-5i64..10).prop_map(FuzzyValue::Int),
    ]
}

fn fuzzy_edges(nodes: u32) -> impl Strategy<Value = Vec<(u32, u32, FuzzyValue)>> {
    prop::collection::vec((1..=nodes, 1..=nodes, fuzzy_value()), 0..40)
}

fn build(edges: &[(u32, u32, FuzzyValue)]) -> Relation<FuzzyValue> {
    Relation::from_edges(edges.iter().map(|&(p, q, w)| (n(p), n(q), w)), |a, b| {
        Ok(*a.max(b))
    })
    .unwrap()
}

proptest! {
    #[test]
    fn product_matches_triple_loop(a in fuzzy_edges(15), b in fuzzy_edges(15)) {
        let (r, s) = (build(&a), build(&b));
        let fast = r.times(&s, &Fuzzy).unwrap();
        prop_assert_eq!(&fast, &naive_times(&Fuzzy, &r, &s, 15));
        prop_assert!(fast.is_consistent());
    }

    #[test]
    fn mirror_holds_after_operations(a in fuzzy_edges(8), b in fuzzy_edges(8)) {
        let (r, s) = (build(&a), build(&b));
        for rel in [r.plus(&s, &Fuzzy).unwrap(), r.times(&s, &Fuzzy).unwrap(), Relation::diff(&r, &s)] {
            prop_assert_eq!(rel.to_edges(), rel.to_edges_via_back());
            prop_assert!(rel.is_consistent());
        }
    }

    #[test]
    fn diff_is_exactly_the_changed_entries(a in fuzzy_edges(6), b in fuzzy_edges(6)) {
        let (new, old) = (build(&a), build(&b));
        let d = Relation::diff(&new, &old);
        for (p, q, w) in new.iter() {
            prop_assert_eq!(d.get(p, q).is_some(), old.get(p, q) != Some(w));
        }
        prop_assert!(d.iter().all(|(p, q, w)| new.get(p, q) == Some(w)));
    }
}

#[test]
fn product_matches_triple_loop_natural_and_boolean() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let nodes = rng.gen_range(1..=15);
        let density = rng.gen_range(0.05..0.5);
        let r = random_relation(&mut rng, nodes, density, |g| g.gen_range(1..50u64));
        let s = random_relation(&mut rng, nodes, density, |g| g.gen_range(1..50u64));
        assert_eq!(
            r.times(&s, &Natural).unwrap(),
            naive_times(&Natural, &r, &s, nodes)
        );

        let r = random_relation(&mut rng, nodes, density, |_| true);
        let s = random_relation(&mut rng, nodes, density, |_| true);
        assert_eq!(
            r.times(&s, &Boolean).unwrap(),
            naive_times(&Boolean, &r, &s, nodes)
        );
    }
}

#[test]
fn relations_form_a_semiring() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let states: Vec<_> = (1..=3).map(n).collect();
    let fuzzy = RelationSemiring {
        ops: Fuzzy,
        states: states.clone(),
    };
    let samples: Vec<_> = (0..5)
        .map(|_| random_relation(&mut rng, 3, 0.4, |g| FuzzyValue::Int(g.gen_range(0..4))))
        .chain([Relation::empty(), fuzzy.one_relation()])
        .collect();
    let report = check_semiring_laws(&fuzzy, &samples);
    assert!(report.is_empty(), "{:?}", &report[..report.len().min(3)]);

    let boolean = RelationSemiring {
        ops: Boolean,
        states,
    };
    let samples: Vec<_> = (0..6)
        .map(|_| random_relation(&mut rng, 3, 0.3, |_| true))
        .collect();
    assert!(check_semiring_laws(&boolean, &samples).is_empty());
}

trait OneRelation {
    fn one_relation(&self) -> Relation<FuzzyValue>;
}

impl OneRelation for RelationSemiring<Fuzzy> {
    fn one_relation(&self) -> Relation<FuzzyValue> {
        use matchbound::Semiring;
        self.one()
    }
}
