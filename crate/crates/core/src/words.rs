//! Words over the alphabet `{r, u, ū}`.
//!
//! Words serialize as compact strings with `r`, `u` and `U` (for ū); the empty
//! word is written `e`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cayley::Ball;
use crate::error::{Error, Result};
use crate::group::{GroupElement, Letter};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, s: Letter) {
        self.0.push(s);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// The formal inverse: reversed, each letter inverted.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|s| s.inverse()).collect())
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn suffix(&self, len: usize) -> Word {
        Word(self.0[self.0.len() - len..].to_vec())
    }

    pub fn contains_subword(&self, needle: &Word) -> bool {
        needle.is_empty() || self.0.windows(needle.len()).any(|w| w == needle.letters())
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }
}

impl From<&[Letter]> for Word {
    fn from(letters: &[Letter]) -> Self {
        Word(letters.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        self.0.iter().try_for_each(|s| write!(f, "{}", s.symbol()))
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "e" {
            return Ok(Word::empty());
        }
        if s.is_empty() {
            return Err(Error::InvalidWord(s.to_string()));
        }
        s.chars()
            .map(|c| Letter::from_symbol(c).ok_or_else(|| Error::InvalidWord(s.to_string())))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// Left-to-right product of the generators.
pub fn evaluate(w: &Word) -> Result<GroupElement> {
    w.letters()
        .iter()
        .try_fold(GroupElement::IDENTITY, |g, &s| g.step(s))
}

/// Cancels adjacent inverse pairs until none remain. Since `r` is its own
/// inverse, `rr` cancels too.
pub fn free_reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &s in w.letters() {
        if out.last() == Some(&s.inverse()) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    Word(out)
}

pub fn is_freely_reduced(w: &Word) -> bool {
    w.letters().windows(2).all(|p| p[1] != p[0].inverse())
}

/// The primitive relators of `⟨r, u | r², (ru)³⟩` as listed for this
/// presentation: `rr`, `rururu`, `rUrUrU`, `ururur`, `UrUrUr`.
///
/// This list is not exhaustive: `(ruuru)²` is a primitive relator of length 10
/// that contains none of these. See [`is_primitive_relator`] for the
/// evaluation-based test.
pub fn primitive_relators() -> &'static [Word] {
    use std::sync::OnceLock;
    static SET: OnceLock<Vec<Word>> = OnceLock::new();
    SET.get_or_init(|| {
        ["rr", "rururu", "rUrUrU", "ururur", "UrUrUr"]
            .iter()
            .map(|s| s.parse().expect("static relator"))
            .collect()
    })
}

pub fn is_listed_primitive_relator(w: &Word) -> bool {
    primitive_relators().contains(w)
}

/// True iff `w` is a relator and no proper non-empty subword evaluates to the
/// identity. Quadratic in the length; fine for short words.
pub fn is_primitive_relator(w: &Word) -> Result<bool> {
    let n = w.len();
    if n == 0 || !evaluate(w)?.is_identity() {
        return Ok(false);
    }
    for i in 0..n {
        let mut g = GroupElement::IDENTITY;
        for j in i..n {
            g = g.step(w.letters()[j])?;
            if g.is_identity() && (i, j + 1) != (0, n) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Freely reduced and free of every listed primitive relator. The listed set
/// omits the trivial cancellations `uū`, `ūu`, which is why free reduction is
/// checked separately.
pub fn is_reduced_in_g(w: &Word) -> bool {
    is_freely_reduced(w) && !primitive_relators().iter().any(|r| w.contains_subword(r))
}

/// Split of two equivalent geodesics `v = v0·v1·x`, `w = w0·w1·x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDecomposition {
    pub v0: Word,
    pub v1: Word,
    pub w0: Word,
    pub w1: Word,
    pub x: Word,
}

impl PathDecomposition {
    /// `v1 · w̄1`, a relator by construction.
    pub fn relator(&self) -> Word {
        self.v1.concat(&self.w1.inverse())
    }
}

fn check_geodesic(w: &Word, ball: &Ball) -> Result<GroupElement> {
    let g = evaluate(w)?;
    let norm = crate::cayley::norm(&g, ball)?;
    if norm != w.len() {
        return Err(Error::NotGeodesic {
            word: w.to_string(),
            length: w.len(),
            norm,
        });
    }
    Ok(g)
}

/// Splits two distinct equivalent geodesics at their largest common suffix `x`,
/// then takes the shortest non-empty equivalent suffixes `v1`, `w1` of what
/// remains.
pub fn decompose_equivalent_paths(v: &Word, w: &Word, ball: &Ball) -> Result<PathDecomposition> {
    if v == w {
        return Err(Error::IdenticalWords(v.to_string()));
    }
    let gv = check_geodesic(v, ball)?;
    let gw = check_geodesic(w, ball)?;
    if gv != gw {
        return Err(Error::NotEquivalent(v.to_string(), w.to_string()));
    }
    let n = v.len();
    let common = v
        .letters()
        .iter()
        .rev()
        .zip(w.letters().iter().rev())
        .take_while(|(a, b)| a == b)
        .count();
    let (vr, wr) = (v.prefix(n - common), w.prefix(n - common));
    let m = vr.len();
    // Walk suffixes of both remainders, accumulating their values right to left.
    let mut sv = GroupElement::IDENTITY;
    let mut sw = GroupElement::IDENTITY;
    for k in 1..=m {
        sv = crate::group::generator(vr.letters()[m - k]).mul(&sv)?;
        sw = crate::group::generator(wr.letters()[m - k]).mul(&sw)?;
        if sv == sw {
            return Ok(PathDecomposition {
                v0: vr.prefix(m - k),
                v1: vr.suffix(k),
                w0: wr.prefix(m - k),
                w1: wr.suffix(k),
                x: v.suffix(common),
            });
        }
    }
    // The full remainders are equivalent, so the loop always returns.
    unreachable!("equivalent remainders {vr} and {wr} have no equivalent suffix")
}

/// A suffix pair of two equivalent geodesics where `y·z̄` is reduced in G yet appears in no
/// listed primitive relator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixPairCounterexample {
    pub v: Word,
    pub w: Word,
    pub y: Word,
    pub z: Word,
}

/// Scans every ordered pair of distinct geodesics for every element of norm
/// at most `max_norm`, every common suffix `x`, and non-empty suffixes `y`, `z`
/// of the remainders with `|y|, |z| <= max_len`. Reports each `(v, w, y, z)`
/// where `y·z̄` is reduced in G but is not a subword of a listed relator.
pub fn suffix_pair_counterexamples(
    ball: &Ball,
    max_norm: usize,
    max_len: usize,
) -> Result<Vec<SuffixPairCounterexample>> {
    if max_norm > ball.radius() {
        return Err(Error::InsufficientRadius {
            radius: ball.radius(),
            required: max_norm,
        });
    }
    let mut out = Vec::new();
    for idx in ball.indices().filter(|&i| ball.node(i).norm <= max_norm) {
        let geodesics = ball.geodesic_words_at(idx);
        for v in &geodesics {
            for w in geodesics.iter().filter(|w| *w != v) {
                let n = v.len();
                let common = v
                    .letters()
                    .iter()
                    .rev()
                    .zip(w.letters().iter().rev())
                    .take_while(|(a, b)| a == b)
                    .count();
                for x_len in 0..=common {
                    let rest = n - x_len;
                    for ly in 1..=max_len.min(rest) {
                        for lz in 1..=max_len.min(rest) {
                            let y = Word::from(&v.letters()[rest - ly..rest]);
                            let z = Word::from(&w.letters()[rest - lz..rest]);
                            let yz = y.concat(&z.inverse());
                            if is_reduced_in_g(&yz)
                                && !primitive_relators().iter().any(|r| r.contains_subword(&yz))
                            {
                                out.push(SuffixPairCounterexample {
                                    v: v.clone(),
                                    w: w.clone(),
                                    y,
                                    z,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
