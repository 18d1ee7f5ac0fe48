//! Matchbound certificates: serialization and an independent checker.
//!
//! [`verify`] deliberately avoids the incremental engine and the enriched
//! weights. It rebuilds dense fuzzy matrices from the edge list and multiplies
//! them naively, left to right.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::chain::{ExtLetter, Symbol};
use crate::completion::{CompletionState, Rule};
use crate::error::Result;
use crate::relation::NodeId;
use crate::semiring::{fuzzy_plus, fuzzy_times, FuzzyValue};
use crate::weights::EWeight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Plain,
    Lambda,
    Pre,
    Post,
}

/// Edge label as stored in JSON: `{"kind": "pre", "symbol": "a"}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub kind: LabelKind,
    pub symbol: Option<Symbol>,
}

impl From<&ExtLetter> for Label {
    fn from(letter: &ExtLetter) -> Self {
        let (kind, symbol) = match letter {
            ExtLetter::Plain(c) => (LabelKind::Plain, Some(c.clone())),
            ExtLetter::Lambda => (LabelKind::Lambda, None),
            ExtLetter::PreInv(c) => (LabelKind::Pre, Some(c.clone())),
            ExtLetter::PostInv(c) => (LabelKind::Post, Some(c.clone())),
        };
        Label { kind, symbol }
    }
}

impl Label {
    pub fn letter(&self) -> Option<ExtLetter> {
        match (self.kind, &self.symbol) {
            (LabelKind::Lambda, None) => Some(ExtLetter::Lambda),
            (LabelKind::Plain, Some(c)) => Some(ExtLetter::Plain(c.clone())),
            (LabelKind::Pre, Some(c)) => Some(ExtLetter::PreInv(c.clone())),
            (LabelKind::Post, Some(c)) => Some(ExtLetter::PostInv(c.clone())),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertEdge {
    pub from: NodeId,
    pub label: Label,
    pub to: NodeId,
    /// `null` for ε edges.
    pub height: Option<i64>,
}

impl CertEdge {
    pub fn is_epsilon(&self) -> bool {
        self.label.kind == LabelKind::Lambda
    }

    /// `a:1`, `→a:0`, `←b:2`, or `ε`.
    pub fn display_label(&self) -> String {
        let h = self.height.map(|h| h.to_string()).unwrap_or_default();
        let sym = self
            .label
            .symbol
            .as_ref()
            .map(Symbol::as_str)
            .unwrap_or("?");
        match self.label.kind {
            LabelKind::Lambda => "ε".to_string(),
            LabelKind::Plain => format!("{sym}:{h}"),
            LabelKind::Pre => format!("→{sym}:{h}"),
            LabelKind::Post => format!("←{sym}:{h}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub alphabet: Vec<Symbol>,
    pub rules: Vec<Rule>,
    pub states: Vec<NodeId>,
    pub edges: Vec<CertEdge>,
    pub bound: i64,
}

impl Certificate {
    /// Snapshot of the base relations of a completion run.
    pub fn from_state(state: &CompletionState) -> Self {
        let mut edges = Vec::new();
        for (letter, rel) in state.automaton().base() {
            for (p, q, w) in rel.iter() {
                let height = match w {
                    EWeight::Val { height, .. } | EWeight::Inv { height, .. } => {
                        Some(i64::from(*height))
                    }
                    EWeight::One | EWeight::Zero => None,
                };
                edges.push(CertEdge {
                    from: p,
                    label: Label::from(letter),
                    to: q,
                    height,
                });
            }
        }
        Certificate {
            alphabet: state.alphabet().iter().cloned().collect(),
            rules: state.rules().to_vec(),
            states: state.states().collect(),
            edges,
            bound: i64::from(state.bound()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Graphviz rendering; reflexive ε loops are omitted, other ε edges dashed.
    pub fn to_dot(&self) -> String {
        let mut out =
            String::from("digraph certificate {\n  rankdir=LR;\n  node [shape=circle];\n");
        for q in &self.states {
            let _ = writeln!(out, "  {q};");
        }
        for e in &self.edges {
            if e.is_epsilon() {
                if e.from != e.to {
                    let _ = writeln!(out, "  {} -> {} [style=dashed];", e.from, e.to);
                }
            } else {
                let _ = writeln!(
                    out,
                    "  {} -> {} [label=\"{}\"];",
                    e.from,
                    e.to,
                    e.display_label()
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    DanglingNode {
        edge: usize,
        node: NodeId,
    },
    NegativeHeight {
        edge: usize,
        height: i64,
    },
    MissingHeight {
        edge: usize,
    },
    EpsilonWithHeight {
        edge: usize,
    },
    MalformedLabel {
        edge: usize,
    },
    UnknownSymbol {
        symbol: Symbol,
    },
    EmptyLhs {
        rule: usize,
    },
    NoFlower,
    NotReflexive {
        state: NodeId,
    },
    NotTransitive {
        p: NodeId,
        q: NodeId,
    },
    Incompatible {
        rule: usize,
        p: NodeId,
        q: NodeId,
        lhs: FuzzyValue,
        rhs: FuzzyValue,
    },
    BoundMismatch {
        claimed: i64,
        actual: i64,
    },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::DanglingNode { edge, node } => {
                write!(f, "edge {edge} uses undeclared state {node}")
            }
            Failure::NegativeHeight { edge, height } => {
                write!(f, "edge {edge} has negative height {height}")
            }
            Failure::MissingHeight { edge } => write!(f, "edge {edge} has no height"),
            Failure::EpsilonWithHeight { edge } => write!(f, "ε edge {edge} carries a height"),
            Failure::MalformedLabel { edge } => write!(f, "edge {edge} has a malformed label"),
            Failure::UnknownSymbol { symbol } => {
                write!(f, "symbol {symbol} is not in the alphabet")
            }
            Failure::EmptyLhs { rule } => write!(f, "rule {rule} has an empty lhs"),
            Failure::NoFlower => f.write_str("no state carries a height-0 loop for every letter"),
            Failure::NotReflexive { state } => write!(f, "ε relation not reflexive at {state}"),
            Failure::NotTransitive { p, q } => {
                write!(f, "ε relation not transitive: missing {p} -> {q}")
            }
            Failure::Incompatible {
                rule,
                p,
                q,
                lhs,
                rhs,
            } => write!(
                f,
                "rule {rule} incompatible at ({p},{q}): lhs {lhs} is not below rhs {rhs}"
            ),
            Failure::BoundMismatch { claimed, actual } => {
                write!(f, "claimed bound {claimed}, highest plain edge is {actual}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Verdict {
    pub failures: Vec<Failure>,
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

type Matrix = Vec<Vec<FuzzyValue>>;

/// Sparse rows of a letter matrix: `rows[k]` lists `(j, weight)`.
type SparseRows = Vec<Vec<(usize, FuzzyValue)>>;

fn to_sparse(m: &Matrix) -> SparseRows {
    m.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, w)| **w != FuzzyValue::NegInf)
                .map(|(j, w)| (j, *w))
                .collect()
        })
        .collect()
}

/// `(a·b)[i][j] = max_k min(a[i][k], b[k][j])`
fn multiply(a: &Matrix, b: &SparseRows) -> Matrix {
    let n = a.len();
    let mut c = vec![vec![FuzzyValue::NegInf; n]; n];
    for i in 0..n {
        for (k, &aik) in a[i].iter().enumerate() {
            if aik == FuzzyValue::NegInf {
                continue;
            }
            for &(j, bkj) in &b[k] {
                c[i][j] = fuzzy_plus(c[i][j], fuzzy_times(aik, bkj));
            }
        }
    }
    c
}

fn lt_zero(x: FuzzyValue, y: FuzzyValue) -> bool {
    x < y || (x == FuzzyValue::NegInf && y == FuzzyValue::NegInf)
}

/// Checks flower, ε closure, compatibility and well-formedness. Returns every
/// failure found.
pub fn verify(cert: &Certificate) -> Verdict {
    let mut failures = Vec::new();
    let index: BTreeMap<NodeId, usize> = cert
        .states
        .iter()
        .enumerate()
        .map(|(i, &q)| (q, i))
        .collect();
    let alphabet: BTreeSet<&Symbol> = cert.alphabet.iter().collect();
    let n = cert.states.len();

    for (ri, rule) in cert.rules.iter().enumerate() {
        if rule.lhs.is_empty() {
            failures.push(Failure::EmptyLhs { rule: ri });
        }
        for c in rule.lhs.iter().chain(&rule.rhs) {
            if !alphabet.contains(c) {
                failures.push(Failure::UnknownSymbol { symbol: c.clone() });
            }
        }
    }

    let mut eps = vec![vec![FuzzyValue::NegInf; n]; n];
    let mut letters: BTreeMap<&Symbol, Matrix> = cert
        .alphabet
        .iter()
        .map(|c| (c, vec![vec![FuzzyValue::NegInf; n]; n]))
        .collect();
    let mut max_plain = 0i64;

    for (ei, e) in cert.edges.iter().enumerate() {
        let (Some(&i), Some(&j)) = (index.get(&e.from), index.get(&e.to)) else {
            for node in [e.from, e.to] {
                if !index.contains_key(&node) {
                    failures.push(Failure::DanglingNode { edge: ei, node });
                }
            }
            continue;
        };
        let Some(letter) = e.label.letter() else {
            failures.push(Failure::MalformedLabel { edge: ei });
            continue;
        };
        match (&letter, e.height) {
            (ExtLetter::Lambda, None) => eps[i][j] = FuzzyValue::PosInf,
            (ExtLetter::Lambda, Some(_)) => failures.push(Failure::EpsilonWithHeight { edge: ei }),
            (_, None) => failures.push(Failure::MissingHeight { edge: ei }),
            (_, Some(h)) if h < 0 => failures.push(Failure::NegativeHeight {
                edge: ei,
                height: h,
            }),
            (ExtLetter::Plain(c), Some(h)) => match letters.get_mut(c) {
                Some(m) => {
                    m[i][j] = fuzzy_plus(m[i][j], FuzzyValue::Int(h));
                    max_plain = max_plain.max(h);
                }
                None => failures.push(Failure::UnknownSymbol { symbol: c.clone() }),
            },
            // inverse letters take no part in compatibility
            (ExtLetter::PreInv(_) | ExtLetter::PostInv(_), Some(_)) => {}
        }
    }

    let zero_loops: BTreeSet<(NodeId, &Symbol)> = cert
        .edges
        .iter()
        .filter(|e| e.from == e.to && e.label.kind == LabelKind::Plain && e.height == Some(0))
        .filter_map(|e| e.label.symbol.as_ref().map(|c| (e.from, c)))
        .collect();
    let flower = cert
        .states
        .iter()
        .any(|&q| cert.alphabet.iter().all(|c| zero_loops.contains(&(q, c))));
    if !flower {
        failures.push(Failure::NoFlower);
    }

    for (i, &q) in cert.states.iter().enumerate() {
        if eps[i][i] == FuzzyValue::NegInf {
            failures.push(Failure::NotReflexive { state: q });
        }
    }
    let eps_sparse = to_sparse(&eps);
    let eps2 = multiply(&eps, &eps_sparse);
    for i in 0..n {
        for j in 0..n {
            if eps2[i][j] != FuzzyValue::NegInf && eps[i][j] == FuzzyValue::NegInf {
                failures.push(Failure::NotTransitive {
                    p: cert.states[i],
                    q: cert.states[j],
                });
            }
        }
    }

    let sparse: BTreeMap<&Symbol, SparseRows> =
        letters.iter().map(|(c, m)| (*c, to_sparse(m))).collect();
    let interleaved = |word: &[Symbol]| -> Option<Matrix> {
        let mut acc = eps.clone();
        for c in word {
            acc = multiply(&acc, sparse.get(c)?);
            acc = multiply(&acc, &eps_sparse);
        }
        Some(acc)
    };
    for (ri, rule) in cert.rules.iter().enumerate() {
        let (Some(l), Some(r)) = (interleaved(&rule.lhs), interleaved(&rule.rhs)) else {
            continue;
        };
        for i in 0..n {
            for j in 0..n {
                if !lt_zero(l[i][j], r[i][j]) {
                    failures.push(Failure::Incompatible {
                        rule: ri,
                        p: cert.states[i],
                        q: cert.states[j],
                        lhs: l[i][j],
                        rhs: r[i][j],
                    });
                }
            }
        }
    }

    if cert.bound != max_plain {
        failures.push(Failure::BoundMismatch {
            claimed: cert.bound,
            actual: max_plain,
        });
    }
    Verdict { failures }
}
