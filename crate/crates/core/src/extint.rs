//! Extended integers `Z ∪ {−∞, +∞}` with saturating arithmetic and a total
//! order. Dimensions of (possibly empty) sets and perversity values live here.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtInt {
    NegInf,
    Fin(i64),
    PosInf,
}

impl ExtInt {
    pub fn fin(v: i64) -> Self {
        ExtInt::Fin(v)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtInt::Fin(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Fin(v) => Some(v),
            _ => None,
        }
    }

    /// Saturating addition. `−∞ + +∞` is not a meaningful quantity for any
    /// computation done here; it panics rather than silently picking a side.
    pub fn add(self, other: ExtInt) -> ExtInt {
        use ExtInt::*;
        match (self, other) {
            (NegInf, PosInf) | (PosInf, NegInf) => {
                panic!("indeterminate sum of opposite infinities")
            }
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Fin(a), Fin(b)) => Fin(a.checked_add(b).expect("extint overflow")),
        }
    }

    pub fn neg(self) -> ExtInt {
        match self {
            ExtInt::NegInf => ExtInt::PosInf,
            ExtInt::PosInf => ExtInt::NegInf,
            ExtInt::Fin(v) => ExtInt::Fin(-v),
        }
    }

    /// `self − other`, saturating; used for dual perversities where
    /// `t̄ − (+∞) = −∞` and `t̄ − (−∞) = +∞`.
    pub fn sub(self, other: ExtInt) -> ExtInt {
        self.add(other.neg())
    }
}

impl From<i64> for ExtInt {
    fn from(v: i64) -> Self {
        ExtInt::Fin(v)
    }
}

impl PartialOrd for ExtInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtInt {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtInt::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) => Ordering::Less,
            (_, NegInf) => Ordering::Greater,
            (PosInf, _) => Ordering::Greater,
            (_, PosInf) => Ordering::Less,
            (Fin(a), Fin(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::PosInf => write!(f, "+inf"),
            ExtInt::Fin(v) => write!(f, "{v}"),
        }
    }
}
