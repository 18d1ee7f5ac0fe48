//! Multiplication chains: a DAG of binary products covering a fixed set of
//! query words, built with a RePair-style most-frequent-pair heuristic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything usable as a chain letter.
pub trait Letter: Clone + Ord + Hash + fmt::Debug + Send + Sync {}

impl<T: Clone + Ord + Hash + fmt::Debug + Send + Sync> Letter for T {}

/// An alphabet symbol of a rewriting system. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Letters of the extended alphabet used by certificate construction.
///
/// `PreInv(c)` is a formal left inverse written before `c`: the pattern
/// `PreInv(c) Lambda c` collapses. `PostInv(c)` is written after `c`:
/// `c Lambda PostInv(c)` collapses. `Lambda` labels ε transitions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtLetter {
    Plain(Symbol),
    Lambda,
    PreInv(Symbol),
    PostInv(Symbol),
}

impl fmt::Debug for ExtLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtLetter::Plain(c) => write!(f, "{c}"),
            ExtLetter::Lambda => f.write_str("ε"),
            ExtLetter::PreInv(c) => write!(f, "→{c}"),
            ExtLetter::PostInv(c) => write!(f, "←{c}"),
        }
    }
}

/// Index of a node within a [`Chain`].
pub type ChainIndex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeDef<L> {
    Unit(L),
    Times(ChainIndex, ChainIndex),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainNode<L> {
    pub id: ChainIndex,
    pub def: NodeDef<L>,
    pub word: Vec<L>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain<L> {
    nodes: Vec<ChainNode<L>>,
    query_index: BTreeMap<Vec<L>, ChainIndex>,
}

impl<L: Letter> Chain<L> {
    /// Builds a chain for `words` (treated as a set).
    ///
    /// Every word is kept as a sequence of node indexes. While some sequence
    /// is longer than two, the adjacent pair with the most non-overlapping
    /// occurrences becomes a new product node and its occurrences are
    /// replaced left to right; ties go to the pair occurring first. Remaining
    /// pairs then become product nodes, identical products being shared.
    pub fn build<I, W>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = W>,
        W: AsRef<[L]>,
    {
        let words: BTreeSet<Vec<L>> = words.into_iter().map(|w| w.as_ref().to_vec()).collect();
        if words.iter().any(Vec::is_empty) {
            return Err(Error::EmptyWord);
        }

        let mut chain = Chain {
            nodes: Vec::new(),
            query_index: BTreeMap::new(),
        };
        let letters: BTreeSet<&L> = words.iter().flatten().collect();
        let mut unit_of = BTreeMap::new();
        for c in letters {
            let id = chain.push(NodeDef::Unit(c.clone()), vec![c.clone()]);
            unit_of.insert(c.clone(), id);
        }
        let mut products: HashMap<(ChainIndex, ChainIndex), ChainIndex> = HashMap::new();

        let mut seqs: Vec<Vec<ChainIndex>> = words
            .iter()
            .map(|w| w.iter().map(|c| unit_of[c]).collect())
            .collect();

        while seqs.iter().any(|s| s.len() > 2) {
            let (pair, _) =
                most_frequent_pair(&seqs).expect("a sequence longer than two has pairs");
            let id = chain.times(&mut products, pair.0, pair.1);
            for seq in &mut seqs {
                replace_pair(seq, pair, id);
            }
        }
        for seq in &mut seqs {
            if let [l, r] = seq[..] {
                let id = chain.times(&mut products, l, r);
                *seq = vec![id];
            }
        }
        for (word, seq) in words.into_iter().zip(seqs) {
            chain.query_index.insert(word, seq[0]);
        }
        Ok(chain)
    }

    fn push(&mut self, def: NodeDef<L>, word: Vec<L>) -> ChainIndex {
        let id = self.nodes.len();
        self.nodes.push(ChainNode { id, def, word });
        id
    }

    fn times(
        &mut self,
        products: &mut HashMap<(ChainIndex, ChainIndex), ChainIndex>,
        l: ChainIndex,
        r: ChainIndex,
    ) -> ChainIndex {
        if let Some(&id) = products.get(&(l, r)) {
            return id;
        }
        let word = [self.nodes[l].word.as_slice(), self.nodes[r].word.as_slice()].concat();
        let id = self.push(NodeDef::Times(l, r), word);
        products.insert((l, r), id);
        id
    }

    /// Assembles a chain from explicit parts without any validation.
    pub fn from_parts(nodes: Vec<ChainNode<L>>, query_index: BTreeMap<Vec<L>, ChainIndex>) -> Self {
        Chain { nodes, query_index }
    }

    pub fn nodes(&self) -> &[ChainNode<L>] {
        &self.nodes
    }

    pub fn node(&self, id: ChainIndex) -> &ChainNode<L> {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn query_index(&self) -> &BTreeMap<Vec<L>, ChainIndex> {
        &self.query_index
    }

    pub fn lookup(&self, word: &[L]) -> Option<ChainIndex> {
        self.query_index.get(word).copied()
    }

    /// Number of product nodes, i.e. relation multiplications per full evaluation.
    pub fn cost(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.def, NodeDef::Times(..)))
            .count()
    }

    /// Nodes grouped by height: units at level 0, a product one above the
    /// higher of its factors. Nodes within a level are independent.
    pub fn levels(&self) -> Vec<Vec<ChainIndex>> {
        let mut height = vec![0usize; self.nodes.len()];
        let mut levels: Vec<Vec<ChainIndex>> = Vec::new();
        for node in &self.nodes {
            let h = match node.def {
                NodeDef::Unit(_) => 0,
                NodeDef::Times(l, r) => 1 + height[l].max(height[r]),
            };
            height[node.id] = h;
            if levels.len() <= h {
                levels.resize_with(h + 1, Vec::new);
            }
            levels[h].push(node.id);
        }
        levels
    }

    /// Checks that this is a valid multiplication chain for `words`.
    pub fn is_chain_for<W: AsRef<[L]>>(&self, words: &[W]) -> bool {
        let units: BTreeSet<&L> = self
            .nodes
            .iter()
            .filter_map(|n| match &n.def {
                NodeDef::Unit(c) => Some(c),
                NodeDef::Times(..) => None,
            })
            .collect();
        let letters_covered = words
            .iter()
            .flat_map(|w| w.as_ref().iter())
            .all(|c| units.contains(c));

        let well_formed = self.nodes.iter().enumerate().all(|(i, n)| {
            n.id == i
                && match &n.def {
                    NodeDef::Unit(c) => n.word.len() == 1 && n.word[0] == *c,
                    NodeDef::Times(l, r) => {
                        *l < i
                            && *r < i
                            && n.word.len() == self.nodes[*l].word.len() + self.nodes[*r].word.len()
                            && n.word.starts_with(&self.nodes[*l].word)
                            && n.word.ends_with(&self.nodes[*r].word)
                    }
                }
        });

        let index_ok = self
            .query_index
            .iter()
            .all(|(w, &id)| id < self.nodes.len() && self.nodes[id].word == *w);
        let covered = words.iter().all(|w| {
            let w = w.as_ref();
            self.nodes.iter().any(|n| n.word == w)
        });
        letters_covered && well_formed && index_ok && covered
    }

    /// Rebuilds the word of node `id` by walking its product tree.
    pub fn expand(&self, id: ChainIndex) -> Vec<L> {
        match &self.nodes[id].def {
            NodeDef::Unit(c) => vec![c.clone()],
            NodeDef::Times(l, r) => {
                let mut w = self.expand(*l);
                w.extend(self.expand(*r));
                w
            }
        }
    }
}

impl<L: Letter + fmt::Display> fmt::Display for Chain<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |w: &[L]| {
            w.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let queries: BTreeSet<ChainIndex> = self.query_index.values().copied().collect();
        for n in &self.nodes {
            let def = match &n.def {
                NodeDef::Unit(c) => format!("unit {c}"),
                NodeDef::Times(l, r) => format!("#{l} * #{r}"),
            };
            let mark = if queries.contains(&n.id) {
                "  [query]"
            } else {
                ""
            };
            writeln!(f, "#{:<4} {:<14} {}{}", n.id, def, show(&n.word), mark)?;
        }
        writeln!(f, "cost {}", self.cost())
    }
}

type Position = (usize, usize);

/// The adjacent pair with the most non-overlapping occurrences, with the
/// position `(sequence, offset)` of its first occurrence.
fn most_frequent_pair(
    seqs: &[Vec<ChainIndex>],
) -> Option<((ChainIndex, ChainIndex), (usize, usize))> {
    // pair -> (count, first occurrence, end of last counted occurrence per seq)
    let mut stats: HashMap<(ChainIndex, ChainIndex), (usize, Position, Position)> = HashMap::new();
    for (si, seq) in seqs.iter().enumerate() {
        for (pos, w) in seq.windows(2).enumerate() {
            let pair = (w[0], w[1]);
            let entry = stats.entry(pair).or_insert((0, (si, pos), (usize::MAX, 0)));
            // skip an occurrence overlapping the previously counted one
            if entry.2 .0 == si && entry.2 .1 > pos {
                continue;
            }
            entry.0 += 1;
            entry.2 = (si, pos + 2);
        }
    }
    stats
        .into_iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then_with(|| b.1 .1.cmp(&a.1 .1)))
        .map(|(pair, (_, first, _))| (pair, first))
}

fn replace_pair(seq: &mut Vec<ChainIndex>, pair: (ChainIndex, ChainIndex), id: ChainIndex) {
    let mut out = Vec::with_capacity(seq.len());
    let mut i = 0;
    while i < seq.len() {
        if i + 1 < seq.len() && (seq[i], seq[i + 1]) == pair {
            out.push(id);
            i += 2;
        } else {
            out.push(seq[i]);
            i += 1;
        }
    }
    *seq = out;
}
