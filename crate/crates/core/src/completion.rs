//! Matchbound certificate construction by completion.
//!
//! Starting from a flower automaton, three rules are applied until none fires:
//!
//! * transitive: close the ε relation under composition,
//! * inverse: add `p ε→ q` whenever a formal inverse collapses against its
//!   letter between `p` and `q`,
//! * rewrite: for a rule `l → r` with `A_ε(l)(p,q) ≮₀ A_ε(r)(p,q)`, take the
//!   minimal edge `p' c:h→ q'` of the maximal `l`-path, split `l = s c t` and
//!   add a fresh path `←s_k…←s_1 r →t_j…→t_1` from `p'` to `q'`, the
//!   rhs at height `h+1` and the inverses at height `h`.
//!
//! Rewrite only fires once the first two rules are saturated. All relation
//! queries go through one [`IncrementalAutomaton`] over [`Matchbox`] weights.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::chain::{ExtLetter, Symbol};
use crate::error::{Error, Result};
use crate::incremental::{Edge, EdgeBatch, Execution, IncrementalAutomaton, SweepStats};
use crate::relation::{NodeId, NodeIds, Relation};
use crate::weights::{lt_zero, mk_edge_val, mk_inv, mk_one, EWeight, Height, Matchbox, Side};

pub type MatchboxAutomaton = IncrementalAutomaton<ExtLetter, Matchbox>;
pub type MatchboxEdge = Edge<ExtLetter, EWeight>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub lhs: Vec<Symbol>,
    pub rhs: Vec<Symbol>,
}

impl Rule {
    pub fn new(lhs: Vec<Symbol>, rhs: Vec<Symbol>) -> Result<Self> {
        if lhs.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Rule { lhs, rhs })
    }

    /// Parses `"a a"`-style token lists; panics on an empty lhs.
    pub fn from_tokens(lhs: &str, rhs: &str) -> Self {
        let toks = |s: &str| s.split_whitespace().map(Symbol::new).collect::<Vec<_>>();
        Rule::new(toks(lhs), toks(rhs)).expect("nonempty lhs")
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |w: &[Symbol]| w.iter().map(Symbol::as_str).collect::<Vec<_>>().join(" ");
        write!(f, "{} -> {}", show(&self.lhs), show(&self.rhs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_steps: usize,
    pub max_states: usize,
    pub max_height: Height,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_steps: 10_000,
            max_states: 100_000,
            max_height: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    MaxSteps,
    MaxStates,
    MaxHeight,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::MaxSteps => "max-steps",
            LimitKind::MaxStates => "max-states",
            LimitKind::MaxHeight => "max-height",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub limits: Limits,
    pub execution: Execution,
    /// Cross-check every sweep against a full recomputation (slow).
    pub check_incremental: bool,
    /// Time a full recomputation after every sweep, for comparison only.
    pub profile_recompute: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    /// Rewrite steps performed.
    pub steps: usize,
    pub transitive_edges: usize,
    pub inverse_edges: usize,
    pub saturation_rounds: usize,
    pub sweeps: usize,
    pub multiplications: usize,
    pub delta_entries: usize,
    pub max_delta: usize,
    pub delta_time: Duration,
    pub recompute_time: Duration,
}

impl Stats {
    fn record(&mut self, sweep: &SweepStats, elapsed: Duration) {
        self.sweeps += 1;
        self.multiplications += sweep.multiplications;
        self.delta_entries += sweep.changed_entries();
        self.max_delta = self
            .max_delta
            .max(sweep.delta_sizes.iter().copied().max().unwrap_or(0));
        self.delta_time += elapsed;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub steps: usize,
    pub states: usize,
    pub max_height: Height,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Index into the rule list.
    pub rule: usize,
    pub p: NodeId,
    pub q: NodeId,
    pub witness: EWeight,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Success { bound: Height },
    Limit { kind: LimitKind, stats: Stats },
}

/// Rule firings in the order they happened; ε additions of one saturation
/// round are recorded per rule kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Firing {
    Transitive(Vec<(NodeId, NodeId)>),
    Inverse(Vec<(NodeId, NodeId)>),
    Rewrite {
        rule: usize,
        p: NodeId,
        q: NodeId,
        from: NodeId,
        to: NodeId,
    },
}

/// `λ w_1 λ w_2 … λ w_n λ`; the empty word becomes `λ`.
pub fn lambda_interleave(word: &[Symbol]) -> Vec<ExtLetter> {
    let mut out = Vec::with_capacity(2 * word.len() + 1);
    out.push(ExtLetter::Lambda);
    for c in word {
        out.push(ExtLetter::Plain(c.clone()));
        out.push(ExtLetter::Lambda);
    }
    out
}

fn inverse_patterns(c: &Symbol) -> [Vec<ExtLetter>; 2] {
    [
        vec![
            ExtLetter::PreInv(c.clone()),
            ExtLetter::Lambda,
            ExtLetter::Plain(c.clone()),
        ],
        vec![
            ExtLetter::Plain(c.clone()),
            ExtLetter::Lambda,
            ExtLetter::PostInv(c.clone()),
        ],
    ]
}

/// The query words needed by the three completion rules.
pub fn query_words(alphabet: &BTreeSet<Symbol>, rules: &[Rule]) -> BTreeSet<Vec<ExtLetter>> {
    let mut words = BTreeSet::new();
    words.insert(vec![ExtLetter::Lambda, ExtLetter::Lambda]);
    for c in alphabet {
        words.extend(inverse_patterns(c));
    }
    for rule in rules {
        words.insert(lambda_interleave(&rule.lhs));
        words.insert(lambda_interleave(&rule.rhs));
    }
    words
}

pub struct CompletionState {
    automaton: MatchboxAutomaton,
    alphabet: BTreeSet<Symbol>,
    rules: Vec<Rule>,
    lhs_words: Vec<Vec<ExtLetter>>,
    rhs_words: Vec<Vec<ExtLetter>>,
    ids: NodeIds,
    options: Options,
    stats: Stats,
    trace: Vec<Firing>,
}

impl CompletionState {
    /// The flower automaton: state 1 with a height-0 loop per letter and a
    /// reflexive ε loop.
    pub fn flower(alphabet: BTreeSet<Symbol>, rules: Vec<Rule>, options: Options) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut ids = NodeIds::default();
        let root = ids.fresh();
        let mut edges: EdgeBatch<ExtLetter, EWeight> = alphabet
            .iter()
            .map(|c| {
                Edge::new(
                    root,
                    ExtLetter::Plain(c.clone()),
                    root,
                    mk_edge_val(0, root, root),
                )
            })
            .collect();
        edges.push(Edge::new(root, ExtLetter::Lambda, root, mk_one()));

        let words = query_words(&alphabet, &rules);
        let automaton =
            IncrementalAutomaton::new(&words, &edges, Matchbox)?.with_execution(options.execution);
        Ok(CompletionState {
            lhs_words: rules.iter().map(|r| lambda_interleave(&r.lhs)).collect(),
            rhs_words: rules.iter().map(|r| lambda_interleave(&r.rhs)).collect(),
            automaton,
            alphabet,
            rules,
            ids,
            options,
            stats: Stats::default(),
            trace: Vec::new(),
        })
    }

    pub fn automaton(&self) -> &MatchboxAutomaton {
        &self.automaton
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn trace(&self) -> &[Firing] {
        &self.trace
    }

    pub fn state_count(&self) -> usize {
        self.ids.allocated()
    }

    pub fn states(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.ids.allocated() as u32).map(NodeId)
    }

    pub fn edge_count(&self) -> usize {
        self.automaton.base().values().map(Relation::len).sum()
    }

    /// Highest height on a plain-letter edge.
    pub fn bound(&self) -> Height {
        self.automaton
            .base()
            .iter()
            .filter(|(l, _)| matches!(l, ExtLetter::Plain(_)))
            .flat_map(|(_, rel)| rel.iter().filter_map(|(_, _, w)| w.height()))
            .max()
            .unwrap_or(0)
    }

    fn lambda(&self) -> Result<&Relation<EWeight>> {
        self.automaton
            .base_relation(&ExtLetter::Lambda)
            .ok_or_else(|| Error::Invariant("no ε relation".to_string()))
    }

    /// ε edges `p → q` present in `A(λλ)` but missing from `A(λ)`.
    pub fn find_transitive(&self) -> Result<Vec<MatchboxEdge>> {
        let two = self
            .automaton
            .relation(&[ExtLetter::Lambda, ExtLetter::Lambda])?;
        Ok(Relation::diff(two, self.lambda()?)
            .iter()
            .map(|(p, q, _)| Edge::new(p, ExtLetter::Lambda, q, mk_one()))
            .collect())
    }

    /// ε edges `p → q` demanded by a collapsing inverse pattern.
    pub fn find_inverse(&self) -> Result<Vec<MatchboxEdge>> {
        let lambda = self.lambda()?;
        let mut found = BTreeSet::new();
        for c in &self.alphabet {
            for word in inverse_patterns(c) {
                for (p, q, w) in self.automaton.relation(&word)?.iter() {
                    if *w == EWeight::One && lambda.get(p, q).is_none() {
                        found.insert((p, q));
                    }
                }
            }
        }
        Ok(found
            .into_iter()
            .map(|(p, q)| Edge::new(p, ExtLetter::Lambda, q, mk_one()))
            .collect())
    }

    /// The first incompatible `(rule, p, q)` in rule order, then `(p, q)` order.
    pub fn find_rewrite(&self) -> Result<Option<Violation>> {
        for (rule, (lw, rw)) in self.lhs_words.iter().zip(&self.rhs_words).enumerate() {
            let lhs = self.automaton.relation(lw)?;
            let rhs = self.automaton.relation(rw)?;
            for (p, q, w) in lhs.iter() {
                if !lt_zero(w, &rhs.lookup(p, q))? {
                    if !matches!(w, EWeight::Val { .. }) {
                        return Err(Error::Invariant(format!(
                            "rewrite witness at ({p},{q}) is {w:?}, not an edge weight"
                        )));
                    }
                    return Ok(Some(Violation {
                        rule,
                        p,
                        q,
                        witness: *w,
                    }));
                }
            }
        }
        Ok(None)
    }

    /// The fresh path repairing `v`, or the limit it would exceed.
    pub fn rewrite_path(
        &mut self,
        v: &Violation,
    ) -> Result<std::result::Result<Vec<MatchboxEdge>, LimitKind>> {
        let EWeight::Val { height: h, track } = v.witness else {
            return Err(Error::Invariant(format!(
                "witness {:?} is not an edge weight",
                v.witness
            )));
        };
        let rule = &self.rules[v.rule];
        let offset = track.offset as usize;
        if offset >= rule.lhs.len() || track.total as usize != rule.lhs.len() {
            return Err(Error::Invariant(format!(
                "witness offset {offset}/{} does not fit lhs of length {}",
                track.total,
                rule.lhs.len()
            )));
        }
        let (s, t) = (&rule.lhs[..offset], &rule.lhs[offset + 1..]);

        let mut labels: Vec<(ExtLetter, EWeight)> = Vec::new();
        for c in s.iter().rev() {
            labels.push((ExtLetter::PostInv(c.clone()), mk_inv(Side::Post, h)));
        }
        if !rule.rhs.is_empty() {
            if h >= self.options.limits.max_height {
                return Ok(Err(LimitKind::MaxHeight));
            }
            for c in &rule.rhs {
                // tracking filled in once endpoints are known
                labels.push((ExtLetter::Plain(c.clone()), EWeight::One));
            }
        }
        for c in t.iter().rev() {
            labels.push((ExtLetter::PreInv(c.clone()), mk_inv(Side::Pre, h)));
        }

        let (from, to) = (track.from, track.to);
        if labels.is_empty() {
            return Ok(Ok(vec![Edge::new(from, ExtLetter::Lambda, to, mk_one())]));
        }
        let fresh = labels.len() - 1;
        if self.ids.allocated() + fresh > self.options.limits.max_states {
            return Ok(Err(LimitKind::MaxStates));
        }
        let mut path = vec![from];
        for _ in 0..fresh {
            path.push(self.ids.fresh());
        }
        path.push(to);

        let mut edges = Vec::with_capacity(2 * labels.len());
        for (i, (letter, weight)) in labels.into_iter().enumerate() {
            let (a, b) = (path[i], path[i + 1]);
            let weight = match letter {
                ExtLetter::Plain(_) => mk_edge_val(h + 1, a, b),
                _ => weight,
            };
            edges.push(Edge::new(a, letter, b, weight));
        }
        for &q in &path[1..path.len() - 1] {
            edges.push(Edge::new(q, ExtLetter::Lambda, q, mk_one()));
        }
        Ok(Ok(edges))
    }

    fn apply(&mut self, batch: &[MatchboxEdge]) -> Result<()> {
        let started = Instant::now();
        let sweep = self.automaton.apply_delta(batch)?;
        self.stats.record(&sweep, started.elapsed());
        if self.options.profile_recompute {
            let mut scratch = self.automaton.clone();
            let started = Instant::now();
            scratch.recompute_full()?;
            self.stats.recompute_time += started.elapsed();
        }
        if self.options.check_incremental {
            let bad = self.automaton.check_against_full()?;
            if !bad.is_empty() {
                return Err(Error::Invariant(format!(
                    "incremental products differ from full recomputation at chain nodes {bad:?}"
                )));
            }
        }
        Ok(())
    }

    /// Applies transitive and inverse until neither adds an ε edge.
    pub fn saturate(&mut self) -> Result<()> {
        loop {
            let transitive = self.find_transitive()?;
            let inverse = self.find_inverse()?;
            if transitive.is_empty() && inverse.is_empty() {
                return Ok(());
            }
            self.stats.saturation_rounds += 1;
            let pairs = |es: &[MatchboxEdge]| es.iter().map(|e| (e.from, e.to)).collect::<Vec<_>>();
            let mut seen = HashSet::new();
            let mut batch = Vec::new();
            if !transitive.is_empty() {
                self.stats.transitive_edges += transitive.len();
                self.trace.push(Firing::Transitive(pairs(&transitive)));
            }
            if !inverse.is_empty() {
                let fresh: Vec<_> = inverse
                    .iter()
                    .filter(|e| !transitive.iter().any(|t| t.from == e.from && t.to == e.to))
                    .cloned()
                    .collect();
                self.stats.inverse_edges += fresh.len();
                self.trace.push(Firing::Inverse(pairs(&inverse)));
            }
            for e in transitive.into_iter().chain(inverse) {
                if seen.insert((e.from, e.to)) {
                    batch.push(e);
                }
            }
            self.apply(&batch)?;
        }
    }

    pub fn run(&mut self) -> Result<Outcome> {
        self.run_with_progress(|_| {})
    }

    pub fn run_with_progress<F: FnMut(&Progress)>(&mut self, mut progress: F) -> Result<Outcome> {
        loop {
            self.saturate()?;
            let Some(v) = self.find_rewrite()? else {
                return Ok(Outcome::Success {
                    bound: self.bound(),
                });
            };
            if self.stats.steps >= self.options.limits.max_steps {
                return Ok(self.limit(LimitKind::MaxSteps));
            }
            let batch = match self.rewrite_path(&v)? {
                Ok(batch) => batch,
                Err(kind) => return Ok(self.limit(kind)),
            };
            let track = v.witness.track().copied().expect("checked by rewrite_path");
            self.trace.push(Firing::Rewrite {
                rule: v.rule,
                p: v.p,
                q: v.q,
                from: track.from,
                to: track.to,
            });
            self.apply(&batch)?;
            self.stats.steps += 1;
            progress(&Progress {
                steps: self.stats.steps,
                states: self.state_count(),
                max_height: self.bound(),
            });
        }
    }

    fn limit(&self, kind: LimitKind) -> Outcome {
        Outcome::Limit {
            kind,
            stats: self.stats.clone(),
        }
    }
}

/// Runs completion for `rules` over `alphabet` from the flower.
pub fn prove(
    alphabet: BTreeSet<Symbol>,
    rules: Vec<Rule>,
    options: Options,
) -> Result<(Outcome, CompletionState)> {
    let mut state = CompletionState::flower(alphabet, rules, options)?;
    let outcome = state.run()?;
    Ok((outcome, state))
}
