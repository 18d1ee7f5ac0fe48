//! The enriched fuzzy weights driving certificate construction.
//!
//! A [`EWeight`] is a fuzzy height that also remembers *which* edge of a
//! multiplied path attains the minimal height and how many plain letters
//! precede it, plus formal inverse heights used to detect collapsing
//! `→c c` / `c ←c` patterns. Projected onto heights, `plus` is max over
//! alternative paths and `times` is min along a path.

use std::cmp::Ordering;
use std::fmt;

use crate::error::AlgebraError;
use crate::relation::NodeId;
use crate::semiring::{Semiring, Weight};

pub type Height = u32;

/// Position of the minimal edge inside an evaluated word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrackInfo {
    pub from: NodeId,
    pub to: NodeId,
    /// Plain letters strictly before the tracked edge.
    pub offset: u32,
    /// Plain letters in the evaluated word.
    pub total: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// Written before its letter (`→c`).
    Pre,
    /// Written after its letter (`←c`).
    Post,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EWeight {
    Zero,
    One,
    Val { height: Height, track: TrackInfo },
    Inv { side: Side, height: Height },
}

impl Weight for EWeight {
    fn zero() -> Self {
        EWeight::Zero
    }

    fn is_zero(&self) -> bool {
        matches!(self, EWeight::Zero)
    }
}

/// Height rank: Zero below every height, One above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rank {
    Bottom,
    Height(Height),
    Top,
}

impl EWeight {
    /// Rank of Zero, One and Val. Inverse weights have no rank.
    pub fn rank(&self) -> Option<Rank> {
        match self {
            EWeight::Zero => Some(Rank::Bottom),
            EWeight::One => Some(Rank::Top),
            EWeight::Val { height, .. } => Some(Rank::Height(*height)),
            EWeight::Inv { .. } => None,
        }
    }

    pub fn height(&self) -> Option<Height> {
        match self {
            EWeight::Val { height, .. } | EWeight::Inv { height, .. } => Some(*height),
            _ => None,
        }
    }

    pub fn track(&self) -> Option<&TrackInfo> {
        match self {
            EWeight::Val { track, .. } => Some(track),
            _ => None,
        }
    }
}

impl fmt::Display for EWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EWeight::Zero => f.write_str("0"),
            EWeight::One => f.write_str("inf"),
            EWeight::Val { height, .. } => write!(f, "{height}"),
            EWeight::Inv {
                side: Side::Pre,
                height,
            } => write!(f, "->{height}"),
            EWeight::Inv {
                side: Side::Post,
                height,
            } => write!(f, "<-{height}"),
        }
    }
}

/// Weight of a single plain edge: it tracks itself.
pub fn mk_edge_val(height: Height, from: NodeId, to: NodeId) -> EWeight {
    EWeight::Val {
        height,
        track: TrackInfo {
            from,
            to,
            offset: 0,
            total: 1,
        },
    }
}

pub fn mk_inv(side: Side, height: Height) -> EWeight {
    EWeight::Inv { side, height }
}

/// Weight of every ε edge.
pub fn mk_one() -> EWeight {
    EWeight::One
}

fn undefined(op: &'static str, a: &EWeight, b: &EWeight) -> AlgebraError {
    AlgebraError::Undefined {
        op,
        left: format!("{a:?}"),
        right: format!("{b:?}"),
    }
}

/// Sum over alternative paths: keeps the higher weight, the left one on ties.
pub fn eplus(a: &EWeight, b: &EWeight) -> Result<EWeight, AlgebraError> {
    use EWeight::*;
    match (a, b) {
        (Zero, x) | (x, Zero) => Ok(*x),
        (One, One) | (One, Val { .. }) | (Val { .. }, One) => Ok(One),
        (Val { height: h1, .. }, Val { height: h2, .. }) => Ok(if h2 > h1 { *b } else { *a }),
        (
            Inv {
                side: s1,
                height: f,
            },
            Inv {
                side: s2,
                height: g,
            },
        ) if s1 == s2 => Ok(Inv {
            side: *s1,
            height: (*f).min(*g),
        }),
        _ => Err(undefined("plus", a, b)),
    }
}

/// Product along a path: keeps the lower edge, the left one on ties, and
/// shifts offsets by the plain letters to the left.
pub fn etimes(a: &EWeight, b: &EWeight) -> Result<EWeight, AlgebraError> {
    use EWeight::*;
    match (a, b) {
        (Zero, _) | (_, Zero) => Ok(Zero),
        (One, x) | (x, One) => Ok(*x),
        (
            Val {
                height: h1,
                track: t1,
            },
            Val {
                height: h2,
                track: t2,
            },
        ) => {
            let total = t1
                .total
                .checked_add(t2.total)
                .ok_or(AlgebraError::Overflow)?;
            Ok(if h1 <= h2 {
                Val {
                    height: *h1,
                    track: TrackInfo { total, ..*t1 },
                }
            } else {
                Val {
                    height: *h2,
                    track: TrackInfo {
                        offset: t1.total + t2.offset,
                        total,
                        ..*t2
                    },
                }
            })
        }
        (
            Inv {
                side: Side::Pre,
                height: f,
            },
            Val { height: g, .. },
        )
        | (
            Val { height: g, .. },
            Inv {
                side: Side::Post,
                height: f,
            },
        ) => Ok(if f <= g { One } else { Zero }),
        _ => Err(undefined("times", a, b)),
    }
}

/// `a <_0 b`: strictly below, or both zero. Undefined for inverse weights.
pub fn lt_zero(a: &EWeight, b: &EWeight) -> Result<bool, AlgebraError> {
    match (a.rank(), b.rank()) {
        (Some(Rank::Bottom), Some(Rank::Bottom)) => Ok(true),
        (Some(x), Some(y)) => Ok(x.cmp(&y) == Ordering::Less),
        _ => Err(undefined("compare", a, b)),
    }
}

/// Equal kind and rank (inverse weights: equal side and height).
pub fn weight_equiv(a: &EWeight, b: &EWeight) -> bool {
    match (a, b) {
        (EWeight::Inv { .. }, _) | (_, EWeight::Inv { .. }) => a == b,
        _ => a.rank() == b.rank(),
    }
}

/// The enriched semiring as a [`Semiring`] instance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Matchbox;

impl Semiring for Matchbox {
    type Elem = EWeight;

    fn one(&self) -> EWeight {
        EWeight::One
    }

    fn plus(&self, a: &EWeight, b: &EWeight) -> Result<EWeight, AlgebraError> {
        eplus(a, b)
    }

    fn times(&self, a: &EWeight, b: &EWeight) -> Result<EWeight, AlgebraError> {
        etimes(a, b)
    }

    fn is_idempotent(&self) -> bool {
        true
    }

    fn equiv(&self, a: &EWeight, b: &EWeight) -> bool {
        weight_equiv(a, b)
    }
}
