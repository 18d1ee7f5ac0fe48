mod common;

use std::collections::BTreeSet;

use common::{example_figure, isomorphic, labelled_edges, n, oracle_violations, single_mutations};
use matchbound::certificate::Failure;
use matchbound::completion::{Firing, LimitKind};
use matchbound::{prove, verify, Certificate, Limits, Options, Outcome, Rule, Symbol};

fn alphabet(s: &str) -> BTreeSet<Symbol> {
    s.split_whitespace().map(Symbol::new).collect()
}

fn example() -> (Outcome, Certificate, Vec<Firing>) {
    let (outcome, state) = prove(
        alphabet("a b"),
        vec![Rule::from_tokens("a a", "a b a")],
        Options::default(),
    )
    .unwrap();
    (
        outcome,
        Certificate::from_state(&state),
        state.trace().to_vec(),
    )
}

#[test]
fn reproduces_the_worked_example() {
    let (outcome, cert, _) = example();
    assert_eq!(outcome, Outcome::Success { bound: 2 });
    assert_eq!(cert.states.len(), 7);
    assert_eq!(cert.bound, 2);
    let edges = labelled_edges(&cert);
    assert_eq!(edges, example_figure());
    assert!(isomorphic(&edges, &example_figure(), 7));
}

#[test]
fn firing_order() {
    let (_, _, trace) = example();
    let kinds: Vec<&str> = trace
        .iter()
        .map(|f| match f {
            Firing::Transitive(_) => "transitive",
            Firing::Inverse(_) => "inverse",
            Firing::Rewrite { .. } => "rewrite",
        })
        .collect();
    assert_eq!(kinds, ["rewrite", "inverse", "rewrite", "inverse"]);
    assert_eq!(
        trace[0],
        Firing::Rewrite {
            rule: 0,
            p: n(1),
            q: n(1),
            from: n(1),
            to: n(1)
        }
    );
    assert_eq!(trace[1], Firing::Inverse(vec![(n(4), n(1)), (n(4), n(2))]));
    assert_eq!(trace[3], Firing::Inverse(vec![(n(7), n(2))]));
}

#[test]
fn completion_is_deterministic() {
    let (_, a, ta) = example();
    let (_, b, tb) = example();
    assert_eq!(a, b);
    assert_eq!(ta, tb);
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn certificate_round_trips_and_verifies() {
    let (_, cert, _) = example();
    let back = Certificate::from_json(&cert.to_json()).unwrap();
    assert_eq!(back, cert);
    assert!(verify(&back).is_ok(), "{:?}", verify(&back));
    assert!(oracle_violations(&cert).is_empty());
}

#[test]
fn mutation_sweep_agrees_with_path_enumeration() {
    let (_, cert, _) = example();
    let mutants = single_mutations(&cert);
    assert_eq!(mutants.len(), 3 + 6);
    for (what, m) in &mutants {
        let expected = oracle_violations(m);
        let verdict = verify(m);
        let found: Vec<_> = verdict
            .failures
            .iter()
            .filter_map(|f| match f {
                Failure::Incompatible { rule, p, q, .. } => Some((*rule, *p, *q)),
                _ => None,
            })
            .collect();
        assert_eq!(found, expected, "{what}");
    }
}

#[test]
fn specific_mutations() {
    let (_, cert, _) = example();
    let find = |name: &str| {
        single_mutations(&cert)
            .into_iter()
            .find(|(w, _)| w == name)
            .unwrap()
            .1
    };

    let deleted = find("delete ε 4 -> 2");
    assert!(oracle_violations(&deleted).contains(&(0, n(1), n(2))));
    assert!(!verify(&deleted).is_ok());

    let lowered = find("lower 3 -> 5 a:2");
    assert!(oracle_violations(&lowered).contains(&(0, n(3), n(2))));
    assert!(!verify(&lowered).is_ok());
}

#[test]
fn self_embedding_rule_hits_a_limit() {
    let rules = || vec![Rule::from_tokens("a", "a a")];
    let bounded = Options {
        limits: Limits {
            max_steps: 100,
            ..Limits::default()
        },
        ..Options::default()
    };
    let (outcome, _) = prove(alphabet("a"), rules(), bounded).unwrap();
    assert!(matches!(
        outcome,
        Outcome::Limit {
            kind: LimitKind::MaxHeight,
            ..
        }
    ));

    let tall = Options {
        limits: Limits {
            max_steps: 100,
            max_height: 1000,
            ..Limits::default()
        },
        ..Options::default()
    };
    let (outcome, state) = prove(alphabet("a"), rules(), tall).unwrap();
    assert!(matches!(
        outcome,
        Outcome::Limit {
            kind: LimitKind::MaxSteps,
            ..
        }
    ));
    assert_eq!(state.stats().steps, 100);
}

#[test]
fn empty_rhs_and_identity_rules() {
    let (outcome, state) = prove(
        alphabet("a b"),
        vec![Rule::from_tokens("a b", "")],
        Options::default(),
    )
    .unwrap();
    assert!(matches!(outcome, Outcome::Success { .. }));
    assert!(verify(&Certificate::from_state(&state)).is_ok());

    let (outcome, _) = prove(
        alphabet("a"),
        vec![Rule::from_tokens("a", "a")],
        Options::default(),
    )
    .unwrap();
    assert!(matches!(outcome, Outcome::Limit { .. }));
}
