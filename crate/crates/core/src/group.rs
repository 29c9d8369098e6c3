//! Exact arithmetic in PSL(2,Z).
//!
//! Elements are stored as sign-canonical 2x2 integer matrices of determinant
//! one: of the two matrices `M` and `-M` representing the same element we keep
//! the one whose first nonzero entry (in the order a, b, c, d) is positive.
//! All arithmetic is checked; overflow is reported, never wrapped.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2x2 integer matrix `(a b; c d)`, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2::new(1, 0, 0, 1);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Matrix2 { a, b, c, d }
    }

    /// Determinant, computed in 128 bits so it never overflows.
    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    pub fn checked_mul(&self, rhs: &Matrix2) -> Result<Matrix2> {
        let dot = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
                .ok_or(Error::Overflow)
        };
        Ok(Matrix2 {
            a: dot(self.a, rhs.a, self.b, rhs.c)?,
            b: dot(self.a, rhs.b, self.b, rhs.d)?,
            c: dot(self.c, rhs.a, self.d, rhs.c)?,
            d: dot(self.c, rhs.b, self.d, rhs.d)?,
        })
    }

    pub fn checked_neg(&self) -> Result<Matrix2> {
        let n = |x: i64| x.checked_neg().ok_or(Error::Overflow);
        Ok(Matrix2 {
            a: n(self.a)?,
            b: n(self.b)?,
            c: n(self.c)?,
            d: n(self.d)?,
        })
    }

    fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "matrix({},{},{},{})", self.a, self.b, self.c, self.d)
    }
}

/// An element of PSL(2,Z), held as its sign-canonical matrix.
///
/// Equality and hashing are structural on the canonical representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(Matrix2);

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement(Matrix2::IDENTITY);

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    pub fn matrix(&self) -> Matrix2 {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn mul(&self, rhs: &GroupElement) -> Result<GroupElement> {
        canonicalize(self.0.checked_mul(&rhs.0)?)
    }

    /// `(a b; c d)^-1 = (d -b; -c a)` in SL(2,Z).
    pub fn inverse(&self) -> Result<GroupElement> {
        let Matrix2 { a, b, c, d } = self.0;
        let neg = |x: i64| x.checked_neg().ok_or(Error::Overflow);
        canonicalize(Matrix2::new(d, neg(b)?, neg(c)?, a))
    }

    /// Right multiplication by a generator, `g * s`.
    pub fn step(&self, s: Letter) -> Result<GroupElement> {
        self.mul(&generator(s))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Picks the representative of `{m, -m}` whose first nonzero entry is positive.
pub fn canonicalize(m: Matrix2) -> Result<GroupElement> {
    let det = m.det();
    if det != 1 {
        return Err(Error::Determinant {
            a: m.a,
            b: m.b,
            c: m.c,
            d: m.d,
            det,
        });
    }
    // det = 1 rules out the zero matrix, so some entry is nonzero.
    let lead = m.entries().into_iter().find(|&x| x != 0).unwrap_or(1);
    // Both signs must be representable, otherwise canonicalize(m) and
    // canonicalize(-m) could disagree on success.
    let negated = m.checked_neg()?;
    Ok(GroupElement(if lead > 0 { m } else { negated }))
}

/// The three letters of the symmetric generating set. `r` is an involution in
/// PSL(2,Z), so it is its own inverse and there is no separate `r̄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    R,
    U,
    Uinv,
}

impl Letter {
    /// Canonical order used for BFS discovery and all letter-indexed tables.
    pub const ALL: [Letter; 3] = [Letter::R, Letter::U, Letter::Uinv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::R => Letter::R,
            Letter::U => Letter::Uinv,
            Letter::Uinv => Letter::U,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Letter> {
        Letter::ALL.get(i).copied()
    }

    /// Serialized symbol: `r`, `u`, and `U` for ū.
    pub fn symbol(self) -> char {
        match self {
            Letter::R => 'r',
            Letter::U => 'u',
            Letter::Uinv => 'U',
        }
    }

    pub fn from_symbol(c: char) -> Option<Letter> {
        match c {
            'r' => Some(Letter::R),
            'u' => Some(Letter::U),
            'U' => Some(Letter::Uinv),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

const R_MATRIX: Matrix2 = Matrix2::new(0, 1, -1, 0);
const U_MATRIX: Matrix2 = Matrix2::new(1, 1, 0, 1);
const UINV_MATRIX: Matrix2 = Matrix2::new(1, -1, 0, 1);

/// The generator matrices `r = (0 1; -1 0)` and `u = (1 1; 0 1)`, plus `u^-1`.
/// All three are already sign-canonical.
pub fn generator(s: Letter) -> GroupElement {
    GroupElement(match s {
        Letter::R => R_MATRIX,
        Letter::U => U_MATRIX,
        Letter::Uinv => UINV_MATRIX,
    })
}

pub fn mul(g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    g.mul(h)
}
