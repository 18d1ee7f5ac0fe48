#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use matchbound::certificate::{CertEdge, Certificate, LabelKind};
use matchbound::incremental::Edge;
use matchbound::{FuzzyValue, NodeId, Relation, Semiring, Weight};
use rand::Rng;

pub mod tracking;

pub fn n(i: u32) -> NodeId {
    NodeId(i)
}

/// Random relation over nodes `1..=nodes` with roughly `density` of all pairs set.
pub fn random_relation<W, R, G>(rng: &mut R, nodes: u32, density: f64, mut weight: G) -> Relation<W>
where
    W: Weight,
    R: Rng,
    G: FnMut(&mut R) -> W,
{
    let mut r = Relation::empty();
    for p in 1..=nodes {
        for q in 1..=nodes {
            if rng.gen_bool(density) {
                r.set(n(p), n(q), weight(rng));
            }
        }
    }
    r
}

/// Textbook product over nodes `1..=nodes`: `Σ_m r(p,m)·s(m,q)` for every cell.
pub fn naive_times<S: Semiring>(
    ops: &S,
    r: &Relation<S::Elem>,
    s: &Relation<S::Elem>,
    nodes: u32,
) -> Relation<S::Elem> {
    let mut out = Relation::empty();
    for p in 1..=nodes {
        for q in 1..=nodes {
            let mut acc = ops.zero();
            for m in 1..=nodes {
                let prod = ops
                    .times(&r.lookup(n(p), n(m)), &s.lookup(n(m), n(q)))
                    .unwrap();
                acc = ops.plus(&acc, &prod).unwrap();
            }
            out.set(n(p), n(q), acc);
        }
    }
    out
}

pub fn random_word<R: Rng>(rng: &mut R, letters: &[char], max_len: usize) -> Vec<char> {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| letters[rng.gen_range(0..letters.len())])
        .collect()
}

pub fn random_batch<W, R, G>(
    rng: &mut R,
    letters: &[char],
    nodes: u32,
    max_edges: usize,
    mut weight: G,
) -> Vec<Edge<char, W>>
where
    R: Rng,
    G: FnMut(&mut R) -> W,
{
    let count = rng.gen_range(0..=max_edges);
    (0..count)
        .map(|_| {
            Edge::new(
                n(rng.gen_range(1..=nodes)),
                letters[rng.gen_range(0..letters.len())],
                n(rng.gen_range(1..=nodes)),
                weight(rng),
            )
        })
        .collect()
}

pub fn random_fuzzy<R: Rng>(rng: &mut R) -> FuzzyValue {
    match rng.gen_range(0..10) {
        0 => FuzzyValue::PosInf,
        _ => FuzzyValue::Int(rng.gen_range(-3..=6)),
    }
}

/// Compatibility of a certificate at `(p, q)` for an ε-interleaved word,
/// computed by enumerating every path explicitly: an ε step (reflexive loops
/// included) before, between and after the letters.
pub fn enumerate_paths(cert: &Certificate, word: &[&str], p: NodeId, q: NodeId) -> FuzzyValue {
    let mut eps: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut plain: BTreeMap<(NodeId, &str), Vec<(NodeId, i64)>> = BTreeMap::new();
    for e in &cert.edges {
        match e.label.kind {
            LabelKind::Lambda => eps.entry(e.from).or_default().push(e.to),
            LabelKind::Plain => plain
                .entry((e.from, e.label.symbol.as_ref().unwrap().as_str()))
                .or_default()
                .push((e.to, e.height.unwrap())),
            _ => {}
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        at: NodeId,
        pos: usize,
        before_letter: bool,
        min: FuzzyValue,
        word: &[&str],
        goal: NodeId,
        eps: &BTreeMap<NodeId, Vec<NodeId>>,
        plain: &BTreeMap<(NodeId, &str), Vec<(NodeId, i64)>>,
        best: &mut FuzzyValue,
    ) {
        if before_letter {
            // ε step
            for &next in eps.get(&at).into_iter().flatten() {
                if pos == word.len() {
                    if next == goal {
                        *best = (*best).max(min);
                    }
                } else {
                    walk(next, pos, false, min, word, goal, eps, plain, best);
                }
            }
        } else {
            for &(next, h) in plain.get(&(at, word[pos])).into_iter().flatten() {
                walk(
                    next,
                    pos + 1,
                    true,
                    min.min(FuzzyValue::Int(h)),
                    word,
                    goal,
                    eps,
                    plain,
                    best,
                );
            }
        }
    }

    let mut best = FuzzyValue::NegInf;
    walk(
        p,
        0,
        true,
        FuzzyValue::PosInf,
        word,
        q,
        &eps,
        &plain,
        &mut best,
    );
    best
}

/// Every `(rule, p, q)` where the path-enumeration oracle finds
/// `lhs <_0 rhs` violated.
pub fn oracle_violations(cert: &Certificate) -> Vec<(usize, NodeId, NodeId)> {
    let mut out = Vec::new();
    for (ri, rule) in cert.rules.iter().enumerate() {
        let lhs: Vec<&str> = rule.lhs.iter().map(|s| s.as_str()).collect();
        let rhs: Vec<&str> = rule.rhs.iter().map(|s| s.as_str()).collect();
        for &p in &cert.states {
            for &q in &cert.states {
                let l = enumerate_paths(cert, &lhs, p, q);
                let r = enumerate_paths(cert, &rhs, p, q);
                let ok = l < r || (l == FuzzyValue::NegInf && r == FuzzyValue::NegInf);
                if !ok {
                    out.push((ri, p, q));
                }
            }
        }
    }
    out
}

/// Single-edge mutations: drop one non-reflexive ε edge, or lower one plain
/// height by one.
pub fn single_mutations(cert: &Certificate) -> Vec<(String, Certificate)> {
    let mut out = Vec::new();
    for (i, e) in cert.edges.iter().enumerate() {
        match e.label.kind {
            LabelKind::Lambda if e.from != e.to => {
                let mut m = cert.clone();
                m.edges.remove(i);
                out.push((format!("delete ε {} -> {}", e.from, e.to), m));
            }
            LabelKind::Plain if e.height.unwrap_or(0) > 0 => {
                let mut m = cert.clone();
                m.edges[i] = CertEdge {
                    height: e.height.map(|h| h - 1),
                    ..e.clone()
                };
                out.push((
                    format!("lower {} -> {} {}", e.from, e.to, e.display_label()),
                    m,
                ));
            }
            _ => {}
        }
    }
    out
}

/// Edges of a certificate as `(from, label, to)`, reflexive ε loops dropped.
pub fn labelled_edges(cert: &Certificate) -> BTreeSet<(u32, String, u32)> {
    cert.edges
        .iter()
        .filter(|e| !(e.is_epsilon() && e.from == e.to))
        .map(|e| (e.from.0, e.display_label(), e.to.0))
        .collect()
}

/// The final automaton for `a a -> a b a`: flower at 1, then the two
/// rewrite paths and the three non-reflexive ε edges.
pub fn example_figure() -> BTreeSet<(u32, String, u32)> {
    [
        (1, "a:0", 1),
        (1, "b:0", 1),
        (1, "a:1", 2),
        (2, "b:1", 3),
        (3, "a:1", 4),
        (4, "→a:0", 1),
        (3, "a:2", 5),
        (5, "b:2", 6),
        (6, "a:2", 7),
        (7, "→a:1", 4),
        (4, "ε", 1),
        (4, "ε", 2),
        (7, "ε", 2),
    ]
    .into_iter()
    .map(|(p, l, q)| (p, l.to_string(), q))
    .collect()
}

/// Whether some bijection of `1..=states` maps `a` onto `b` exactly.
pub fn isomorphic(
    a: &BTreeSet<(u32, String, u32)>,
    b: &BTreeSet<(u32, String, u32)>,
    states: u32,
) -> bool {
    fn search(
        perm: &mut Vec<u32>,
        used: &mut Vec<bool>,
        states: u32,
        a: &BTreeSet<(u32, String, u32)>,
        b: &BTreeSet<(u32, String, u32)>,
    ) -> bool {
        if perm.len() == states as usize {
            let mapped: BTreeSet<_> = a
                .iter()
                .map(|(p, l, q)| (perm[*p as usize - 1], l.clone(), perm[*q as usize - 1]))
                .collect();
            return &mapped == b;
        }
        for target in 1..=states {
            if !used[target as usize] {
                used[target as usize] = true;
                perm.push(target);
                if search(perm, used, states, a, b) {
                    return true;
                }
                perm.pop();
                used[target as usize] = false;
            }
        }
        false
    }
    a.len() == b.len()
        && search(
            &mut Vec::new(),
            &mut vec![false; states as usize + 1],
            states,
            a,
            b,
        )
}

/// Evaluates a word left to right from per-letter relations, with no chain.
pub fn word_relation<L: Ord + Clone, S: Semiring>(
    ops: &S,
    edges: &[Edge<L, S::Elem>],
    word: &[L],
    nodes: u32,
) -> Relation<S::Elem> {
    let mut letters: BTreeMap<L, Relation<S::Elem>> = BTreeMap::new();
    for e in edges {
        letters
            .entry(e.letter.clone())
            .or_default()
            .insert_with(e.from, e.to, e.weight.clone(), |a, b| ops.plus(a, b))
            .unwrap();
    }
    let get = |c: &L| letters.get(c).cloned().unwrap_or_default();
    let mut acc = get(&word[0]);
    for c in &word[1..] {
        acc = naive_times(ops, &acc, &get(c), nodes);
    }
    acc
}
