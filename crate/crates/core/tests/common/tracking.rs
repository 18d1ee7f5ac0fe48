use matchbound::weights::{mk_edge_val, EWeight};
use matchbound::{Matchbox, NodeId, Relation};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::n;

pub type Graph = Vec<Relation<EWeight>>;

/// One relation per letter over nodes `1..=nodes`, every entry a plain edge
/// weight naming itself.
pub fn random_graph(rng: &mut ChaCha8Rng, letters: usize, nodes: u32) -> Graph {
    (0..letters)
        .map(|_| {
            let mut r = Relation::empty();
            for p in 1..=nodes {
                for q in 1..=nodes {
                    if rng.gen_bool(0.45) {
                        r.set(n(p), n(q), mk_edge_val(rng.gen_range(0..4), n(p), n(q)));
                    }
                }
            }
            r
        })
        .collect()
}

/// Multiplies the word's letter relations under a random binary bracketing.
pub fn bracketed(rng: &mut ChaCha8Rng, g: &Graph, word: &[usize]) -> Relation<EWeight> {
    if word.len() == 1 {
        return g[word[0]].clone();
    }
    let split = rng.gen_range(1..word.len());
    let l = bracketed(rng, g, &word[..split]);
    let r = bracketed(rng, g, &word[split..]);
    l.times(&r, &Matchbox).unwrap()
}

fn height_of(w: &EWeight) -> u32 {
    w.height().expect("plain edge")
}

/// All paths from `p` spelling `word`, as lists of `(from, to, height)`.
pub fn paths(g: &Graph, word: &[usize], p: NodeId) -> Vec<Vec<(NodeId, NodeId, u32)>> {
    let Some((&c, rest)) = word.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for (&q, w) in g[c].successors(p).into_iter().flatten() {
        for mut tail in paths(g, rest, q) {
            tail.insert(0, (p, q, height_of(w)));
            out.push(tail);
        }
    }
    out
}

/// Checks one random word against explicit path enumeration; returns the number of `(p, q)` cells compared.
pub fn check_word(rng: &mut ChaCha8Rng) -> usize {
    let nodes = rng.gen_range(2..=4);
    let letters = rng.gen_range(1..=3);
    let g = random_graph(rng, letters, nodes);
    let len = rng.gen_range(1..=6);
    let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..letters)).collect();
    let product = bracketed(rng, &g, &word);

    let mut cells = 0;
    for p in 1..=nodes {
        for q in 1..=nodes {
            let (p, q) = (n(p), n(q));
            let candidates: Vec<_> = paths(&g, &word, p)
                .into_iter()
                .filter(|path| path.last().unwrap().1 == q)
                .collect();
            let best = candidates
                .iter()
                .map(|path| path.iter().map(|e| e.2).min().unwrap())
                .max();
            let got = product.lookup(p, q);
            cells += 1;
            match (best, got) {
                (None, EWeight::Zero) => {}
                (Some(h), EWeight::Val { height, track }) => {
                    assert_eq!(height, h, "word {word:?} at ({p},{q})");
                    assert_eq!(track.total as usize, len);
                    let k = track.offset as usize;
                    // Some maximal path has a minimal edge at the tracked position.
                    assert!(
                        candidates.iter().any(|path| {
                            path.iter().map(|e| e.2).min() == Some(h) && path[k] == (track.from, track.to, h)
                        }),
                        "word {word:?} at ({p},{q}): tracked {track:?} is not a minimal edge of a best path"
                    );
                }
                (best, got) => {
                    panic!("word {word:?} at ({p},{q}): paths give {best:?}, product gives {got:?}")
                }
            }
        }
    }
    cells
}
