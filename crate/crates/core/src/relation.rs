//! Sparse weighted relations stored as a mirrored pair of nested ordered maps.
//!
//! `fore` maps a source to its successors, `back` maps a target to its
//! predecessors. Both always hold the same entries, and neither ever holds a
//! zero weight.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;
use crate::semiring::{Semiring, Weight};

/// A state of a graph or automaton. Allocated densely from 1 and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Counter handing out fresh [`NodeId`]s, starting at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIds {
    next: u32,
}

impl Default for NodeIds {
    fn default() -> Self {
        NodeIds { next: 1 }
    }
}

impl NodeIds {
    pub fn fresh(&mut self) -> NodeId {
        let id = NodeId(self.next);
        self.next += 1;
        id
    }

    /// Number of ids handed out so far.
    pub fn allocated(&self) -> usize {
        (self.next - 1) as usize
    }
}

pub type Row<W> = BTreeMap<NodeId, W>;
type Index<W> = BTreeMap<NodeId, Row<W>>;

#[derive(Clone, PartialEq)]
pub struct Relation<W> {
    fore: Index<W>,
    back: Index<W>,
}

impl<W> Default for Relation<W> {
    fn default() -> Self {
        Relation {
            fore: BTreeMap::new(),
            back: BTreeMap::new(),
        }
    }
}

impl<W: fmt::Debug> fmt::Debug for Relation<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(
                self.fore
                    .iter()
                    .flat_map(|(p, row)| row.iter().map(move |(q, w)| ((p.0, q.0), w))),
            )
            .finish()
    }
}

fn index_insert<W>(index: &mut Index<W>, outer: NodeId, inner: NodeId, w: W) {
    index.entry(outer).or_default().insert(inner, w);
}

fn index_remove<W>(index: &mut Index<W>, outer: NodeId, inner: NodeId) {
    if let Some(row) = index.get_mut(&outer) {
        row.remove(&inner);
        if row.is_empty() {
            index.remove(&outer);
        }
    }
}

impl<W: Weight> Relation<W> {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `(q, q) ↦ unit` for every `q` in `states`.
    pub fn identity(states: impl IntoIterator<Item = NodeId>, unit: W) -> Self {
        let mut r = Self::empty();
        if unit.is_zero() {
            return r;
        }
        for q in states {
            r.set(q, q, unit.clone());
        }
        r
    }

    /// Builds a relation from edges, merging parallel edges with `f`.
    pub fn from_edges<F>(
        edges: impl IntoIterator<Item = (NodeId, NodeId, W)>,
        f: F,
    ) -> Result<Self, AlgebraError>
    where
        F: Fn(&W, &W) -> Result<W, AlgebraError>,
    {
        let mut r = Self::empty();
        for (p, q, w) in edges {
            r.insert_with(p, q, w, &f)?;
        }
        Ok(r)
    }

    pub fn is_empty(&self) -> bool {
        self.fore.is_empty()
    }

    /// Number of stored (nonzero) entries.
    pub fn len(&self) -> usize {
        self.fore.values().map(BTreeMap::len).sum()
    }

    pub fn get(&self, p: NodeId, q: NodeId) -> Option<&W> {
        self.fore.get(&p).and_then(|row| row.get(&q))
    }

    /// The weight at `(p, q)`, or zero.
    pub fn lookup(&self, p: NodeId, q: NodeId) -> W {
        self.get(p, q).cloned().unwrap_or_else(W::zero)
    }

    pub fn successors(&self, p: NodeId) -> Option<&Row<W>> {
        self.fore.get(&p)
    }

    pub fn predecessors(&self, q: NodeId) -> Option<&Row<W>> {
        self.back.get(&q)
    }

    /// Sources with at least one outgoing entry, ascending.
    pub fn sources(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.fore.keys().copied()
    }

    /// All entries in ascending `(p, q)` order, read from the forward index.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId, &W)> + '_ {
        self.fore
            .iter()
            .flat_map(|(&p, row)| row.iter().map(move |(&q, w)| (p, q, w)))
    }

    pub fn to_edges(&self) -> Vec<(NodeId, NodeId, W)> {
        self.iter().map(|(p, q, w)| (p, q, w.clone())).collect()
    }

    /// All entries read from the backward index, in ascending `(p, q)` order.
    pub fn to_edges_via_back(&self) -> Vec<(NodeId, NodeId, W)> {
        let mut edges: Vec<_> = self
            .back
            .iter()
            .flat_map(|(&q, col)| col.iter().map(move |(&p, w)| (p, q, w.clone())))
            .collect();
        edges.sort_by_key(|&(p, q, _)| (p, q));
        edges
    }

    /// True when both indexes agree and no zero is stored.
    pub fn is_consistent(&self) -> bool {
        let fore = self.to_edges();
        fore.iter().all(|(_, _, w)| !w.is_zero())
            && self.fore.values().all(|row| !row.is_empty())
            && self.back.values().all(|col| !col.is_empty())
            && fore == self.to_edges_via_back()
    }

    /// Overwrites the entry at `(p, q)`. A zero weight removes it.
    pub fn set(&mut self, p: NodeId, q: NodeId, w: W) {
        if w.is_zero() {
            index_remove(&mut self.fore, p, q);
            index_remove(&mut self.back, q, p);
        } else {
            index_insert(&mut self.back, q, p, w.clone());
            index_insert(&mut self.fore, p, q, w);
        }
    }

    /// Adds `w` at `(p, q)`, combining with an existing entry as `f(old, w)`.
    pub fn insert_with<F>(&mut self, p: NodeId, q: NodeId, w: W, f: F) -> Result<(), AlgebraError>
    where
        F: Fn(&W, &W) -> Result<W, AlgebraError>,
    {
        let merged = match self.get(p, q) {
            Some(old) => f(old, &w)?,
            None => w,
        };
        self.set(p, q, merged);
        Ok(())
    }

    /// Entrywise union; where both sides hold a weight the result is
    /// `f(self, other)`. Entries combining to zero are dropped.
    ///
    /// The larger operand is cloned and the smaller one is merged into it.
    pub fn plus_with<F>(&self, other: &Self, f: F) -> Result<Self, AlgebraError>
    where
        F: Fn(&W, &W) -> Result<W, AlgebraError>,
    {
        if self.len() >= other.len() {
            let mut acc = self.clone();
            for (p, q, w) in other.iter() {
                acc.insert_with(p, q, w.clone(), &f)?;
            }
            Ok(acc)
        } else {
            let mut acc = other.clone();
            for (p, q, w) in self.iter() {
                let merged = match acc.get(p, q) {
                    Some(theirs) => f(w, theirs)?,
                    None => w.clone(),
                };
                acc.set(p, q, merged);
            }
            Ok(acc)
        }
    }

    /// Relational product `(r·s)(p,q) = Σ_f { g(r(p,m), s(m,q)) | m }`.
    ///
    /// Middle nodes are found by intersecting `back(self)` with `fore(other)`,
    /// walking the smaller index and probing the larger; each middle node
    /// contributes the outer product of its column and row, and the partial
    /// products are summed in ascending middle-node order.
    pub fn times_with<F, G>(&self, other: &Self, f: F, g: G) -> Result<Self, AlgebraError>
    where
        F: Fn(&W, &W) -> Result<W, AlgebraError>,
        G: Fn(&W, &W) -> Result<W, AlgebraError>,
    {
        let mut acc: Index<W> = BTreeMap::new();
        let mut add = |col: &Row<W>, row: &Row<W>| -> Result<(), AlgebraError> {
            for (&p, wp) in col {
                for (&q, wq) in row {
                    let w = g(wp, wq)?;
                    if w.is_zero() {
                        continue;
                    }
                    let slot = acc.entry(p).or_default();
                    match slot.get_mut(&q) {
                        Some(old) => *old = f(old, &w)?,
                        None => {
                            slot.insert(q, w);
                        }
                    }
                }
            }
            Ok(())
        };
        if self.back.len() <= other.fore.len() {
            for (m, col) in &self.back {
                if let Some(row) = other.fore.get(m) {
                    add(col, row)?;
                }
            }
        } else {
            for (m, row) in &other.fore {
                if let Some(col) = self.back.get(m) {
                    add(col, row)?;
                }
            }
        }
        Ok(Self::from_fore(acc))
    }

    /// Semiring sum of two relations.
    pub fn plus<S: Semiring<Elem = W>>(&self, other: &Self, ops: &S) -> Result<Self, AlgebraError> {
        self.plus_with(other, |a, b| ops.plus(a, b))
    }

    /// Semiring product of two relations.
    pub fn times<S: Semiring<Elem = W>>(
        &self,
        other: &Self,
        ops: &S,
    ) -> Result<Self, AlgebraError> {
        self.times_with(other, |a, b| ops.plus(a, b), |a, b| ops.times(a, b))
    }

    /// The entries of `new` whose weight differs from `old` at the same pair,
    /// including entries absent from `old`.
    pub fn diff(new: &Self, old: &Self) -> Self {
        let mut d = Self::empty();
        for (p, q, w) in new.iter() {
            if old.get(p, q) != Some(w) {
                d.set(p, q, w.clone());
            }
        }
        d
    }

    fn from_fore(mut fore: Index<W>) -> Self {
        fore.retain(|_, row| {
            row.retain(|_, w| !w.is_zero());
            !row.is_empty()
        });
        let mut back: Index<W> = BTreeMap::new();
        for (&p, row) in &fore {
            for (&q, w) in row {
                index_insert(&mut back, q, p, w.clone());
            }
        }
        Relation { fore, back }
    }
}

impl<W: Weight> Weight for Relation<W> {
    fn zero() -> Self {
        Relation::empty()
    }

    fn is_zero(&self) -> bool {
        self.is_empty()
    }
}

/// Relations over a fixed state set, with the identity on that set as one.
#[derive(Debug, Clone)]
pub struct RelationSemiring<S> {
    pub ops: S,
    pub states: Vec<NodeId>,
}

impl<S: Semiring> Semiring for RelationSemiring<S> {
    type Elem = Relation<S::Elem>;

    fn one(&self) -> Self::Elem {
        Relation::identity(self.states.iter().copied(), self.ops.one())
    }

    fn plus(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, AlgebraError> {
        a.plus(b, &self.ops)
    }

    fn times(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, AlgebraError> {
        a.times(b, &self.ops)
    }

    fn is_idempotent(&self) -> bool {
        self.ops.is_idempotent()
    }
}

/// Outer product of a column (predecessors of some middle node) with a row
/// (its successors): `(p, q) ↦ g(col[p], row[q])`, zero products dropped.
pub fn combine<W, G>(g: G, col: &Row<W>, row: &Row<W>) -> Result<Relation<W>, AlgebraError>
where
    W: Weight,
    G: Fn(&W, &W) -> Result<W, AlgebraError>,
{
    let mut fore: Index<W> = BTreeMap::new();
    for (&p, wp) in col {
        let mut out = BTreeMap::new();
        for (&q, wq) in row {
            out.insert(q, g(wp, wq)?);
        }
        fore.insert(p, out);
    }
    Ok(Relation::from_fore(fore))
}
