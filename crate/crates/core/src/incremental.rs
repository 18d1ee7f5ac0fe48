//! Incremental maintenance of all chain-node relations under edge insertion.
//!
//! For a product node `t = l·r`, inserting edges changes its relation by
//!
//! ```text
//! D(t) = Δ(l)·A(r) + A(l)·Δ(r) + Δ(l)·Δ(r)
//! ```
//!
//! computed from the relations as they were *before* the batch. `Δ(t)` is then
//! pruned to the entries of `A(t) + D(t)` that actually differ from `A(t)`, so
//! each product in the sweep has at least one small factor.

use std::collections::BTreeMap;
use std::fmt;

use crate::chain::{Chain, ChainIndex, Letter, NodeDef};
use crate::error::{Error, Result};
use crate::relation::{NodeId, Relation};
use crate::semiring::Semiring;

/// One labelled, weighted edge of an automaton.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge<L, W> {
    pub from: NodeId,
    pub letter: L,
    pub to: NodeId,
    pub weight: W,
}

impl<L, W> Edge<L, W> {
    pub fn new(from: NodeId, letter: L, to: NodeId, weight: W) -> Self {
        Edge {
            from,
            letter,
            to,
            weight,
        }
    }
}

pub type EdgeBatch<L, W> = Vec<Edge<L, W>>;

/// How the per-level products of a sweep are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Evaluates the independent nodes of each chain level on the rayon pool.
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

/// Counters for one `apply_delta` sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepStats {
    /// `|Δ(w)|` for every chain node, indexed by chain index.
    pub delta_sizes: Vec<usize>,
    /// Relation products actually evaluated (products with an empty factor are skipped).
    pub multiplications: usize,
}

impl SweepStats {
    pub fn changed_entries(&self) -> usize {
        self.delta_sizes.iter().sum()
    }
}

#[derive(Clone)]
pub struct IncrementalAutomaton<L, S: Semiring> {
    chain: Chain<L>,
    semiring: S,
    base: BTreeMap<L, Relation<S::Elem>>,
    /// Relations of product nodes; `None` for unit nodes, which read `base`.
    products: Vec<Option<Relation<S::Elem>>>,
    levels: Vec<Vec<ChainIndex>>,
    execution: Execution,
}

impl<L: Letter, S: Semiring + fmt::Debug> fmt::Debug for IncrementalAutomaton<L, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IncrementalAutomaton")
            .field("semiring", &self.semiring)
            .field("chain_nodes", &self.chain.len())
            .field("letters", &self.base.len())
            .finish()
    }
}

impl<L: Letter, S: Semiring> IncrementalAutomaton<L, S> {
    /// Builds the chain for `query_words`, installs `base_edges` and computes
    /// every product node from scratch.
    pub fn new<I, W>(query_words: I, base_edges: &[Edge<L, S::Elem>], semiring: S) -> Result<Self>
    where
        I: IntoIterator<Item = W>,
        W: AsRef<[L]>,
    {
        if !semiring.is_idempotent() {
            return Err(Error::NotIdempotent);
        }
        let words: Vec<Vec<L>> = query_words
            .into_iter()
            .map(|w| w.as_ref().to_vec())
            .collect();
        if words.is_empty() {
            return Err(Error::EmptyQuerySet);
        }
        let chain = Chain::build(&words)?;
        let levels = chain.levels();
        let mut automaton = IncrementalAutomaton {
            products: vec![None; chain.len()],
            chain,
            semiring,
            base: BTreeMap::new(),
            levels,
            execution: Execution::default(),
        };
        automaton.base = automaton.fold_batch(base_edges)?;
        for node in automaton.chain.nodes() {
            if let NodeDef::Unit(c) = &node.def {
                automaton.base.entry(c.clone()).or_default();
            }
        }
        automaton.recompute_full()?;
        Ok(automaton)
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn set_execution(&mut self, execution: Execution) {
        self.execution = execution;
    }

    pub fn chain(&self) -> &Chain<L> {
        &self.chain
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }

    /// One-letter relations, keyed by letter.
    pub fn base(&self) -> &BTreeMap<L, Relation<S::Elem>> {
        &self.base
    }

    pub fn base_relation(&self, letter: &L) -> Option<&Relation<S::Elem>> {
        self.base.get(letter)
    }

    /// Replaces the base relation of `letter` without updating products.
    /// Call [`recompute_full`](Self::recompute_full) afterwards.
    pub fn set_base_relation(&mut self, letter: L, relation: Relation<S::Elem>) {
        self.base.insert(letter, relation);
    }

    /// The stored relation of chain node `id`.
    pub fn node_relation(&self, id: ChainIndex) -> &Relation<S::Elem> {
        let rel = match &self.chain.node(id).def {
            NodeDef::Unit(c) => self.base.get(c),
            NodeDef::Times(..) => self.products[id].as_ref(),
        };
        rel.expect("every chain letter has a base relation and every product is computed")
    }

    /// The relation `A(word)` of a registered query word.
    pub fn relation(&self, word: &[L]) -> Result<&Relation<S::Elem>> {
        let id = self
            .chain
            .lookup(word)
            .ok_or_else(|| Error::UnknownQuery(format!("{word:?}")))?;
        Ok(self.node_relation(id))
    }

    /// `A(word)(p, q)`, a single lookup.
    pub fn query(&self, word: &[L], p: NodeId, q: NodeId) -> Result<S::Elem> {
        Ok(self.relation(word)?.lookup(p, q))
    }

    fn fold_batch(&self, batch: &[Edge<L, S::Elem>]) -> Result<BTreeMap<L, Relation<S::Elem>>> {
        let mut by_letter: BTreeMap<L, Relation<S::Elem>> = BTreeMap::new();
        for e in batch {
            by_letter.entry(e.letter.clone()).or_default().insert_with(
                e.from,
                e.to,
                e.weight.clone(),
                |a, b| self.semiring.plus(a, b),
            )?;
        }
        Ok(by_letter)
    }

    /// Recomputes every product node from the base relations.
    pub fn recompute_full(&mut self) -> Result<()> {
        for level in self.levels.iter().skip(1) {
            let computed = self.map_level(level, |this, id| {
                let (l, r) = factors(&this.chain, id);
                let prod = this
                    .node_relation(l)
                    .times(this.node_relation(r), &this.semiring)?;
                Ok(prod)
            })?;
            for (id, rel) in computed {
                self.products[id] = Some(rel);
            }
        }
        Ok(())
    }

    /// Compares every stored product against a fresh recomputation, using the
    /// semiring's equivalence. Returns the chain indexes that disagree.
    pub fn check_against_full(&self) -> Result<Vec<ChainIndex>> {
        let mut fresh = self.clone();
        fresh.recompute_full()?;
        let mut bad = Vec::new();
        for node in self.chain.nodes() {
            let a = self.node_relation(node.id);
            let b = fresh.node_relation(node.id);
            let same = a.len() == b.len()
                && a.iter()
                    .all(|(p, q, w)| b.get(p, q).is_some_and(|v| self.semiring.equiv(w, v)));
            if !same {
                bad.push(node.id);
            }
        }
        Ok(bad)
    }

    /// Inserts a batch of edges and updates every chain node bottom-up.
    pub fn apply_delta(&mut self, batch: &[Edge<L, S::Elem>]) -> Result<SweepStats> {
        let mut stats = SweepStats {
            delta_sizes: vec![0; self.chain.len()],
            multiplications: 0,
        };
        let mut deltas: Vec<Option<Relation<S::Elem>>> = vec![None; self.chain.len()];

        // unit nodes and letters outside the chain
        let mut letter_deltas = BTreeMap::new();
        for (letter, added) in self.fold_batch(batch)? {
            let old = self.base.get(&letter);
            let mut d = Relation::empty();
            for (p, q, w) in added.iter() {
                let merged = match old.and_then(|o| o.get(p, q)) {
                    Some(o) => {
                        let m = self.semiring.plus(o, w)?;
                        if m == *o {
                            continue;
                        }
                        m
                    }
                    None => w.clone(),
                };
                d.set(p, q, merged);
            }
            if !d.is_empty() {
                letter_deltas.insert(letter, d);
            }
        }
        for node in self.chain.nodes() {
            if let NodeDef::Unit(c) = &node.def {
                if let Some(d) = letter_deltas.get(c) {
                    stats.delta_sizes[node.id] = d.len();
                    deltas[node.id] = Some(d.clone());
                }
            }
        }

        for level in self.levels.iter().skip(1) {
            let deltas_ref = &deltas;
            let computed = self.map_level(level, |this, id| {
                let (l, r) = factors(&this.chain, id);
                this.node_delta(id, deltas_ref[l].as_ref(), deltas_ref[r].as_ref(), l, r)
            })?;
            for (id, (d, mults)) in computed {
                stats.multiplications += mults;
                if let Some(d) = d {
                    stats.delta_sizes[id] = d.len();
                    deltas[id] = Some(d);
                }
            }
        }

        // install, now that every delta was computed from old values
        for (letter, d) in letter_deltas {
            let rel = self.base.entry(letter).or_default();
            for (p, q, w) in d.iter() {
                rel.set(p, q, w.clone());
            }
        }
        for (id, d) in deltas.into_iter().enumerate() {
            if let (Some(d), Some(rel)) = (d, self.products[id].as_mut()) {
                for (p, q, w) in d.iter() {
                    rel.set(p, q, w.clone());
                }
            }
        }
        Ok(stats)
    }

    /// `Δ(t)` for a product node, as changed entries carrying their new
    /// weights, together with the number of products evaluated.
    fn node_delta(
        &self,
        id: ChainIndex,
        dl: Option<&Relation<S::Elem>>,
        dr: Option<&Relation<S::Elem>>,
        l: ChainIndex,
        r: ChainIndex,
    ) -> Result<(Option<Relation<S::Elem>>, usize)> {
        let ops = &self.semiring;
        let al = self.node_relation(l);
        let ar = self.node_relation(r);
        let mut terms = Vec::with_capacity(3);
        if let Some(dl) = dl {
            terms.push(dl.times(ar, ops)?);
        }
        if let Some(dr) = dr {
            terms.push(al.times(dr, ops)?);
        }
        if let (Some(dl), Some(dr)) = (dl, dr) {
            terms.push(dl.times(dr, ops)?);
        }
        let mults = terms.len();
        let mut sum: Option<Relation<S::Elem>> = None;
        for t in terms {
            sum = Some(match sum {
                None => t,
                Some(s) => s.plus(&t, ops)?,
            });
        }
        let Some(sum) = sum else {
            return Ok((None, 0));
        };

        let current = self.node_relation(id);
        let mut d = Relation::empty();
        for (p, q, w) in sum.iter() {
            match current.get(p, q) {
                Some(old) => {
                    let merged = ops.plus(old, w)?;
                    if merged != *old {
                        d.set(p, q, merged);
                    }
                }
                None => d.set(p, q, w.clone()),
            }
        }
        Ok(((!d.is_empty()).then_some(d), mults))
    }

    fn map_level<T, F>(&self, level: &[ChainIndex], f: F) -> Result<Vec<(ChainIndex, T)>>
    where
        T: Send,
        F: Fn(&Self, ChainIndex) -> Result<T> + Sync,
        S::Elem: Send + Sync,
    {
        #[cfg(feature = "parallel")]
        if self.execution == Execution::Parallel && level.len() > 1 {
            use rayon::prelude::*;
            return level
                .par_iter()
                .map(|&id| f(self, id).map(|t| (id, t)))
                .collect();
        }
        level
            .iter()
            .map(|&id| f(self, id).map(|t| (id, t)))
            .collect()
    }
}

fn factors<L: Letter>(chain: &Chain<L>, id: ChainIndex) -> (ChainIndex, ChainIndex) {
    match chain.node(id).def {
        NodeDef::Times(l, r) => (l, r),
        NodeDef::Unit(_) => unreachable!("levels above 0 hold product nodes only"),
    }
}
