//! The genus-one torus algebra, in two tagged copies (the ρ side and the σ side).
//!
//! Elements are basis elements only: the two idempotents, the six Reeb
//! elements, and an explicit zero. Sums live in the structures that use them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("cannot multiply elements from different sides ({0:?} and {1:?})")]
    SideMismatch(Side, Side),
    #[error("unrecognized algebra element `{0}`")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Rho,
    Sigma,
}

impl Side {
    pub fn prefix(self) -> char {
        match self {
            Side::Rho => 'r',
            Side::Sigma => 's',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Rho => "rho",
            Side::Sigma => "sigma",
        })
    }
}

impl FromStr for Side {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rho" => Ok(Side::Rho),
            "sigma" => Ok(Side::Sigma),
            _ => Err(AlgebraError::Parse(s.to_string())),
        }
    }
}

/// One of the two idempotents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Idem {
    I0,
    I1,
}

impl Idem {
    pub fn element(self) -> Kind {
        match self {
            Idem::I0 => Kind::Iota0,
            Idem::I1 => Kind::Iota1,
        }
    }
}

impl fmt::Display for Idem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Idem::I0 => "i0",
            Idem::I1 => "i1",
        })
    }
}

impl FromStr for Idem {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "i0" => Ok(Idem::I0),
            "i1" => Ok(Idem::I1),
            _ => Err(AlgebraError::Parse(s.to_string())),
        }
    }
}

/// A basis element of the torus algebra, side-free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    Iota0,
    Iota1,
    R1,
    R2,
    R3,
    R12,
    R23,
    R123,
    Zero,
}

impl Kind {
    pub const ALL: [Kind; 9] =
        [Kind::Iota0, Kind::Iota1, Kind::R1, Kind::R2, Kind::R3, Kind::R12, Kind::R23, Kind::R123, Kind::Zero];

    /// The six Reeb elements.
    pub const REEB: [Kind; 6] = [Kind::R1, Kind::R2, Kind::R3, Kind::R12, Kind::R23, Kind::R123];

    /// Non-zero basis elements.
    pub const BASIS: [Kind; 8] =
        [Kind::Iota0, Kind::Iota1, Kind::R1, Kind::R2, Kind::R3, Kind::R12, Kind::R23, Kind::R123];

    pub fn is_zero(self) -> bool {
        self == Kind::Zero
    }

    pub fn is_idempotent(self) -> bool {
        matches!(self, Kind::Iota0 | Kind::Iota1)
    }

    pub fn is_reeb(self) -> bool {
        !self.is_zero() && !self.is_idempotent()
    }

    pub fn source(self) -> Option<Idem> {
        match self {
            Kind::Iota0 | Kind::R1 | Kind::R3 | Kind::R12 | Kind::R123 => Some(Idem::I0),
            Kind::Iota1 | Kind::R2 | Kind::R23 => Some(Idem::I1),
            Kind::Zero => None,
        }
    }

    pub fn target(self) -> Option<Idem> {
        match self {
            Kind::Iota0 | Kind::R2 | Kind::R12 => Some(Idem::I0),
            Kind::Iota1 | Kind::R1 | Kind::R3 | Kind::R23 | Kind::R123 => Some(Idem::I1),
            Kind::Zero => None,
        }
    }

    /// Consecutive arc indices of a Reeb chord, e.g. `R123 -> [1, 2, 3]`.
    pub fn letters(self) -> &'static [u8] {
        match self {
            Kind::R1 => &[1],
            Kind::R2 => &[2],
            Kind::R3 => &[3],
            Kind::R12 => &[1, 2],
            Kind::R23 => &[2, 3],
            Kind::R123 => &[1, 2, 3],
            _ => &[],
        }
    }

    /// The Reeb chord covering the consecutive arcs `lo..=hi`.
    pub fn chord(lo: u8, hi: u8) -> Kind {
        match (lo, hi) {
            (1, 1) => Kind::R1,
            (2, 2) => Kind::R2,
            (3, 3) => Kind::R3,
            (1, 2) => Kind::R12,
            (2, 3) => Kind::R23,
            (1, 3) => Kind::R123,
            _ => Kind::Zero,
        }
    }

    /// Product in the torus algebra.
    pub fn mul(self, other: Kind) -> Kind {
        match (self, other) {
            (Kind::Zero, _) | (_, Kind::Zero) => Kind::Zero,
            (a, b) if a.is_idempotent() => {
                if a.target() == b.source() {
                    b
                } else {
                    Kind::Zero
                }
            }
            (a, b) if b.is_idempotent() => {
                if a.target() == b.source() {
                    a
                } else {
                    Kind::Zero
                }
            }
            (a, b) => {
                let (la, lb) = (a.letters(), b.letters());
                if la[la.len() - 1] + 1 == lb[0] {
                    Kind::chord(la[0], lb[lb.len() - 1])
                } else {
                    Kind::Zero
                }
            }
        }
    }

    /// Text form on the given side: `i0`, `r12`, `s3`, `0`.
    pub fn render(self, side: Side) -> String {
        match self {
            Kind::Iota0 => "i0".into(),
            Kind::Iota1 => "i1".into(),
            Kind::Zero => "0".into(),
            k => {
                let mut s = String::new();
                s.push(side.prefix());
                for l in k.letters() {
                    s.push(char::from(b'0' + l));
                }
                s
            }
        }
    }

    /// Parses a rendered element; idempotents and zero carry no side.
    pub fn parse(s: &str) -> Result<(Option<Side>, Kind), AlgebraError> {
        let err = || AlgebraError::Parse(s.to_string());
        match s {
            "i0" => return Ok((None, Kind::Iota0)),
            "i1" => return Ok((None, Kind::Iota1)),
            "0" => return Ok((None, Kind::Zero)),
            _ => {}
        }
        let mut chars = s.chars();
        let side = match chars.next() {
            Some('r') => Side::Rho,
            Some('s') => Side::Sigma,
            _ => return Err(err()),
        };
        let digits: Vec<u8> =
            chars.map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(err)).collect::<Result<_, _>>()?;
        let kind = match digits.as_slice() {
            [a] => Kind::chord(*a, *a),
            [a, b] if *b == a + 1 => Kind::chord(*a, *b),
            [1, 2, 3] => Kind::R123,
            _ => Kind::Zero,
        };
        if kind.is_zero() {
            return Err(err());
        }
        Ok((Some(side), kind))
    }
}

/// A basis element tagged with its side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusElement {
    pub side: Side,
    pub kind: Kind,
}

impl TorusElement {
    pub fn new(side: Side, kind: Kind) -> Self {
        TorusElement { side, kind }
    }

    pub fn zero(side: Side) -> Self {
        TorusElement::new(side, Kind::Zero)
    }

    pub fn source_idempotent(&self) -> Option<Idem> {
        self.kind.source()
    }

    pub fn target_idempotent(&self) -> Option<Idem> {
        self.kind.target()
    }

    pub fn is_zero(&self) -> bool {
        self.kind.is_zero()
    }
}

/// Product of two same-side elements.
pub fn multiply(a: TorusElement, b: TorusElement) -> Result<TorusElement, AlgebraError> {
    if a.side != b.side {
        return Err(AlgebraError::SideMismatch(a.side, b.side));
    }
    Ok(TorusElement::new(a.side, a.kind.mul(b.kind)))
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.kind.render(self.side))
    }
}

impl FromStr for TorusElement {
    type Err = AlgebraError;

    /// Idempotents and zero parse onto the ρ side; use [`Kind::parse`] when
    /// the side must come from context.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (side, kind) = Kind::parse(s)?;
        Ok(TorusElement::new(side.unwrap_or(Side::Rho), kind))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(k: Kind) -> TorusElement {
        TorusElement::new(Side::Rho, k)
    }

    #[test]
    fn unit_and_basic_products() {
        assert_eq!(multiply(r(Kind::Iota0), r(Kind::R1)).unwrap(), r(Kind::R1));
        assert_eq!(multiply(r(Kind::R2), r(Kind::R3)).unwrap(), r(Kind::R23));
        assert_eq!(multiply(r(Kind::R3), r(Kind::R2)).unwrap(), r(Kind::Zero));
        assert_eq!(multiply(r(Kind::R1), r(Kind::R1)).unwrap(), r(Kind::Zero));
        assert_eq!(multiply(r(Kind::R1), r(Kind::R23)).unwrap(), r(Kind::R123));
        assert_eq!(multiply(r(Kind::R12), r(Kind::R3)).unwrap(), r(Kind::R123));
        assert_eq!(multiply(r(Kind::R1), r(Kind::R2)).unwrap(), r(Kind::R12));
        assert_eq!(multiply(r(Kind::Iota1), r(Kind::R1)).unwrap(), r(Kind::Zero));
    }

    #[test]
    fn side_mismatch_is_error() {
        let s = TorusElement::new(Side::Sigma, Kind::R2);
        assert!(matches!(multiply(r(Kind::R1), s), Err(AlgebraError::SideMismatch(..))));
    }

    #[test]
    fn associativity_exhaustive() {
        for a in Kind::ALL {
            for b in Kind::ALL {
                for c in Kind::ALL {
                    assert_eq!(a.mul(b).mul(c), a.mul(b.mul(c)), "{a:?} {b:?} {c:?}");
                }
            }
        }
    }

    #[test]
    fn nonzero_products_respect_idempotents() {
        for a in Kind::ALL {
            for b in Kind::ALL {
                if !a.mul(b).is_zero() {
                    assert_eq!(a.target(), b.source());
                }
            }
        }
    }

    #[test]
    fn rendering_round_trips() {
        let texts = ["i0", "i1", "r1", "r2", "r3", "r12", "r23", "r123"];
        for (t, k) in texts.iter().zip(Kind::BASIS) {
            assert_eq!(k.render(Side::Rho), *t);
        }
        assert_eq!(Kind::R123.render(Side::Sigma), "s123");
        for k in Kind::REEB {
            for side in [Side::Rho, Side::Sigma] {
                assert_eq!(Kind::parse(&k.render(side)).unwrap(), (Some(side), k));
            }
        }
        assert!(Kind::parse("r13").is_err());
        assert!(Kind::parse("x1").is_err());
    }
}
