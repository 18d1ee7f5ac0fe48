//! Semiring algebra: the trait used by relations and automata, plus the
//! Boolean, natural-number and fuzzy `(max, min)` instances.

use std::fmt;

use crate::error::AlgebraError;

/// An element type that can be stored in a sparse relation.
///
/// Every weight type has a canonical zero, which relations never store.
pub trait Weight: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

/// Semiring operations over an element type.
///
/// `plus` and `times` are fallible so that partial instances (the enriched
/// matchbox weights) and overflow-checked arithmetic can report misuse
/// instead of silently producing garbage.
pub trait Semiring: Clone + Send + Sync {
    type Elem: Weight;

    fn zero(&self) -> Self::Elem {
        Self::Elem::zero()
    }

    fn one(&self) -> Self::Elem;

    fn plus(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, AlgebraError>;

    fn times(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, AlgebraError>;

    /// Whether `plus(a, a) == a` holds for all elements.
    fn is_idempotent(&self) -> bool {
        false
    }

    /// The equivalence used when comparing results of different evaluation
    /// orders. Structural by default.
    fn equiv(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a == b
    }
}

impl Weight for bool {
    fn zero() -> Self {
        false
    }
}

impl Weight for u64 {
    fn zero() -> Self {
        0
    }
}

/// `({0,1}, or, and, 0, 1)`
#[derive(Debug, Clone, Copy, Default)]
pub struct Boolean;

impl Semiring for Boolean {
    type Elem = bool;

    fn one(&self) -> bool {
        true
    }

    fn plus(&self, a: &bool, b: &bool) -> Result<bool, AlgebraError> {
        Ok(*a || *b)
    }

    fn times(&self, a: &bool, b: &bool) -> Result<bool, AlgebraError> {
        Ok(*a && *b)
    }

    fn is_idempotent(&self) -> bool {
        true
    }
}

/// Natural numbers with ordinary addition and multiplication, overflow checked.
#[derive(Debug, Clone, Copy, Default)]
pub struct Natural;

impl Semiring for Natural {
    type Elem = u64;

    fn one(&self) -> u64 {
        1
    }

    fn plus(&self, a: &u64, b: &u64) -> Result<u64, AlgebraError> {
        a.checked_add(*b).ok_or(AlgebraError::Overflow)
    }

    fn times(&self, a: &u64, b: &u64) -> Result<u64, AlgebraError> {
        a.checked_mul(*b).ok_or(AlgebraError::Overflow)
    }
}

/// Element of the fuzzy semiring: integers extended by both infinities.
///
/// The derived order is the intended total order: `NegInf < Int(_) < PosInf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FuzzyValue {
    NegInf,
    Int(i64),
    PosInf,
}

impl Weight for FuzzyValue {
    fn zero() -> Self {
        FuzzyValue::NegInf
    }
}

impl fmt::Display for FuzzyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuzzyValue::NegInf => f.write_str("-inf"),
            FuzzyValue::Int(n) => write!(f, "{n}"),
            FuzzyValue::PosInf => f.write_str("inf"),
        }
    }
}

pub fn fuzzy_plus(a: FuzzyValue, b: FuzzyValue) -> FuzzyValue {
    a.max(b)
}

pub fn fuzzy_times(a: FuzzyValue, b: FuzzyValue) -> FuzzyValue {
    a.min(b)
}

/// `({-inf} ∪ Z ∪ {+inf}, max, min, -inf, +inf)`
#[derive(Debug, Clone, Copy, Default)]
pub struct Fuzzy;

impl Semiring for Fuzzy {
    type Elem = FuzzyValue;

    fn one(&self) -> FuzzyValue {
        FuzzyValue::PosInf
    }

    fn plus(&self, a: &FuzzyValue, b: &FuzzyValue) -> Result<FuzzyValue, AlgebraError> {
        Ok(fuzzy_plus(*a, *b))
    }

    fn times(&self, a: &FuzzyValue, b: &FuzzyValue) -> Result<FuzzyValue, AlgebraError> {
        Ok(fuzzy_times(*a, *b))
    }

    fn is_idempotent(&self) -> bool {
        true
    }
}

/// A single failed instance of a semiring law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawViolation {
    pub law: &'static str,
    pub instance: String,
}

impl fmt::Display for LawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at {}", self.law, self.instance)
    }
}

/// Checks the semiring axioms over all triples drawn from `samples`, using
/// structural equality.
pub fn check_semiring_laws<S: Semiring>(ops: &S, samples: &[S::Elem]) -> Vec<LawViolation> {
    check_semiring_laws_with(ops, samples, |a, b| a == b)
}

/// Like [`check_semiring_laws`] but compares results with `eq`.
///
/// An operation that returns an error counts as a violation of the law being
/// evaluated.
pub fn check_semiring_laws_with<S, E>(ops: &S, samples: &[S::Elem], eq: E) -> Vec<LawViolation>
where
    S: Semiring,
    E: Fn(&S::Elem, &S::Elem) -> bool,
{
    let mut report = Vec::new();
    let zero = ops.zero();
    let one = ops.one();
    let plus = |a: &S::Elem, b: &S::Elem| ops.plus(a, b);
    let times = |a: &S::Elem, b: &S::Elem| ops.times(a, b);

    let mut check = |law: &'static str,
                     lhs: Result<S::Elem, AlgebraError>,
                     rhs: Result<S::Elem, AlgebraError>,
                     instance: &dyn Fn() -> String| {
        let ok = match (lhs, rhs) {
            (Ok(l), Ok(r)) => eq(&l, &r),
            _ => false,
        };
        if !ok {
            report.push(LawViolation {
                law,
                instance: instance(),
            });
        }
    };

    for a in samples {
        let show = || format!("a={a:?}");
        check("plus left identity", plus(&zero, a), Ok(a.clone()), &show);
        check("plus right identity", plus(a, &zero), Ok(a.clone()), &show);
        check("times left identity", times(&one, a), Ok(a.clone()), &show);
        check("times right identity", times(a, &one), Ok(a.clone()), &show);
        check(
            "left annihilation",
            times(&zero, a),
            Ok(zero.clone()),
            &show,
        );
        check(
            "right annihilation",
            times(a, &zero),
            Ok(zero.clone()),
            &show,
        );
        for b in samples {
            let show = || format!("a={a:?}, b={b:?}");
            check("plus commutativity", plus(a, b), plus(b, a), &show);
            for c in samples {
                let show = || format!("a={a:?}, b={b:?}, c={c:?}");
                check(
                    "plus associativity",
                    plus(a, b).and_then(|ab| plus(&ab, c)),
                    plus(b, c).and_then(|bc| plus(a, &bc)),
                    &show,
                );
                check(
                    "times associativity",
                    times(a, b).and_then(|ab| times(&ab, c)),
                    times(b, c).and_then(|bc| times(a, &bc)),
                    &show,
                );
                check(
                    "left distributivity",
                    plus(b, c).and_then(|bc| times(a, &bc)),
                    times(a, b).and_then(|ab| times(a, c).and_then(|ac| plus(&ab, &ac))),
                    &show,
                );
                check(
                    "right distributivity",
                    plus(a, b).and_then(|ab| times(&ab, c)),
                    times(a, c).and_then(|ac| times(b, c).and_then(|bc| plus(&ac, &bc))),
                    &show,
                );
            }
        }
    }
    report
}
