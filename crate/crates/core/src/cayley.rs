//! Balls in the Cayley graph of PSL(2,Z) over `{r, u, ū}`.
//!
//! The graph is 3-regular. A [`Ball`] of radius `R` holds every element of word
//! norm at most `R`, discovered breadth-first in letter order `r, u, ū`, so
//! node indices are a deterministic BFS order.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, Letter};
use crate::words::Word;

/// Default cap on the number of stored elements (roughly 1.5 GB).
pub const DEFAULT_NODE_LIMIT: usize = 10_000_000;

/// A subset of `{r, u, ū}` as a 3-bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LetterSet(u8);

impl LetterSet {
    pub const EMPTY: LetterSet = LetterSet(0);
    pub const FULL: LetterSet = LetterSet(0b111);

    pub fn contains(self, s: Letter) -> bool {
        self.0 & (1 << s.index()) != 0
    }

    pub fn insert(&mut self, s: Letter) {
        self.0 |= 1 << s.index();
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(self, other: LetterSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: LetterSet) -> LetterSet {
        LetterSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Letter> {
        Letter::ALL.into_iter().filter(move |&s| self.contains(s))
    }
}

impl FromIterator<Letter> for LetterSet {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        let mut set = LetterSet::EMPTY;
        iter.into_iter().for_each(|s| set.insert(s));
        set
    }
}

impl fmt::Display for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        for (i, s) in self.iter().enumerate() {
            if i > 0 {
                f.write_char(',')?;
            }
            f.write_char(s.symbol())?;
        }
        f.write_char('}')
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeRecord {
    pub element: GroupElement,
    pub norm: usize,
    /// Letters `s` with `|gs| = |g| - 1`. Exact for every node of the ball.
    pub s_minus: LetterSet,
    /// Letters `s` with `|gs| = |g| + 1`; `None` on the boundary sphere.
    pub s_plus: Option<LetterSet>,
    /// BFS parent and the letter leading from it to this node.
    pub parent: Option<(usize, Letter)>,
}

#[derive(Clone, Debug)]
pub struct Ball {
    radius: usize,
    nodes: Vec<NodeRecord>,
    index: HashMap<GroupElement, usize>,
    neighbors: Vec<[Option<usize>; 3]>,
    spheres: Vec<usize>,
    geodesic_counts: Vec<u64>,
}

pub fn build_ball(radius: usize) -> Result<Ball> {
    build_ball_with_limit(radius, DEFAULT_NODE_LIMIT)
}

pub fn build_ball_with_limit(radius: usize, node_limit: usize) -> Result<Ball> {
    let mut nodes = vec![NodeRecord {
        element: GroupElement::IDENTITY,
        norm: 0,
        s_minus: LetterSet::EMPTY,
        s_plus: None,
        parent: None,
    }];
    let mut index = HashMap::from([(GroupElement::IDENTITY, 0usize)]);
    let mut spheres = vec![1usize];

    // Nodes are appended in BFS order, so a cursor over `nodes` is the queue.
    let mut cursor = 0;
    while cursor < nodes.len() {
        let (g, norm) = (nodes[cursor].element, nodes[cursor].norm);
        if norm < radius {
            for s in Letter::ALL {
                let h = g.step(s)?;
                if index.contains_key(&h) {
                    continue;
                }
                if nodes.len() >= node_limit {
                    return Err(Error::ResourceLimit { limit: node_limit });
                }
                index.insert(h, nodes.len());
                nodes.push(NodeRecord {
                    element: h,
                    norm: norm + 1,
                    s_minus: LetterSet::EMPTY,
                    s_plus: None,
                    parent: Some((cursor, s)),
                });
                if spheres.len() <= norm + 1 {
                    spheres.push(0);
                }
                spheres[norm + 1] += 1;
            }
        }
        cursor += 1;
    }

    let mut neighbors = Vec::with_capacity(nodes.len());
    for node in &nodes {
        let mut row = [None; 3];
        for s in Letter::ALL {
            row[s.index()] = index.get(&node.element.step(s)?).copied();
        }
        neighbors.push(row);
    }
    for (i, row) in neighbors.iter().enumerate() {
        let norm = nodes[i].norm;
        let mut minus = LetterSet::EMPTY;
        let mut plus = LetterSet::EMPTY;
        for s in Letter::ALL {
            if let Some(j) = row[s.index()] {
                let other = nodes[j].norm;
                if other + 1 == norm {
                    minus.insert(s);
                } else if other == norm + 1 {
                    plus.insert(s);
                }
            }
        }
        nodes[i].s_minus = minus;
        nodes[i].s_plus = (norm < radius).then_some(plus);
    }

    let mut geodesic_counts = vec![0u64; nodes.len()];
    geodesic_counts[0] = 1;
    for i in 1..nodes.len() {
        // Predecessors have smaller indices in BFS order.
        geodesic_counts[i] = nodes[i]
            .s_minus
            .iter()
            .map(|s| geodesic_counts[neighbors[i][s.index()].expect("predecessor in ball")])
            .sum();
    }

    Ok(Ball {
        radius,
        nodes,
        index,
        neighbors,
        spheres,
        geodesic_counts,
    })
}

impl Ball {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        0..self.nodes.len()
    }

    pub fn node(&self, i: usize) -> &NodeRecord {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn index_of(&self, g: &GroupElement) -> Result<usize> {
        self.index.get(g).copied().ok_or(Error::NotInBall(*g))
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    /// Index of `g·s`, if it lies in the ball.
    pub fn neighbor(&self, i: usize, s: Letter) -> Option<usize> {
        self.neighbors[i][s.index()]
    }

    /// Element counts per sphere, `spheres()[n] = #{g : |g| = n}`.
    pub fn spheres(&self) -> &[usize] {
        &self.spheres
    }

    /// Number of geodesic words of each length `n <= R`.
    pub fn geodesic_word_counts(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.radius + 1];
        for (node, &c) in self.nodes.iter().zip(&self.geodesic_counts) {
            out[node.norm] += c;
        }
        out
    }

    pub fn geodesic_count(&self, i: usize) -> u64 {
        self.geodesic_counts[i]
    }

    /// Errors unless `g` is in the ball with `|g| <= R - margin`.
    pub fn require_margin(&self, g: &GroupElement, margin: usize) -> Result<usize> {
        let i = self.index_of(g)?;
        self.require_margin_at(i, margin)?;
        Ok(i)
    }

    pub fn require_margin_at(&self, i: usize, margin: usize) -> Result<()> {
        let norm = self.nodes[i].norm;
        if norm + margin > self.radius {
            return Err(Error::Boundary {
                element: self.nodes[i].element,
                norm,
                radius: self.radius,
                max_norm: self.radius.saturating_sub(margin),
            });
        }
        Ok(())
    }

    /// The word obtained by following BFS parents back to the identity.
    pub fn representative_word(&self, mut i: usize) -> Word {
        let mut letters = Vec::with_capacity(self.nodes[i].norm);
        while let Some((p, s)) = self.nodes[i].parent {
            letters.push(s);
            i = p;
        }
        letters.reverse();
        Word::new(letters)
    }

    /// All geodesic words for node `i`, by backward descent along `s_minus`.
    /// Sorted.
    pub fn geodesic_words_at(&self, i: usize) -> Vec<Word> {
        fn walk(ball: &Ball, i: usize, tail: &mut Vec<Letter>, out: &mut Vec<Word>) {
            let node = &ball.nodes[i];
            if node.norm == 0 {
                out.push(Word::new(tail.iter().rev().copied().collect()));
                return;
            }
            for s in node.s_minus.iter() {
                // g = (g s) s̄, so the last letter of this geodesic is s̄.
                tail.push(s.inverse());
                walk(ball, ball.neighbors[i][s.index()].expect("predecessor"), tail, out);
                tail.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, i, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    pub fn geodesic_words(&self, g: &GroupElement) -> Result<Vec<Word>> {
        Ok(self.geodesic_words_at(self.index_of(g)?))
    }

    /// True iff every edge inside the ball joins consecutive spheres.
    pub fn is_bipartite_by_norm(&self) -> bool {
        self.indices().all(|i| {
            Letter::ALL.iter().all(|&s| match self.neighbor(i, s) {
                Some(j) => self.nodes[i].norm.abs_diff(self.nodes[j].norm) == 1,
                None => self.nodes[i].norm == self.radius,
            })
        })
    }

    /// Geodesic suffix letters: `s` such that some geodesic for node `i` ends
    /// in `s`, i.e. `|g s̄| = |g| - 1`.
    pub fn suffix_letters_at(&self, i: usize) -> LetterSet {
        self.nodes[i].s_minus.iter().map(Letter::inverse).collect()
    }

    /// Length-2 geodesic suffixes `s·t` of node `i`, sorted.
    pub fn suffixes2_at(&self, i: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for t in self.suffix_letters_at(i).iter() {
            let j = self.neighbors[i][t.inverse().index()].expect("predecessor");
            for s in self.suffix_letters_at(j).iter() {
                out.push(Word::new(vec![s, t]));
            }
        }
        out.sort();
        out
    }

    /// Level-2 starred suffix set of node `i`: the length-2 suffixes if any,
    /// else the length-1 suffixes, else empty (only at the identity).
    ///
    /// Only predecessors are consulted, so this is exact at every node.
    pub fn suffix_profile_at(&self, i: usize) -> SuffixProfile {
        let two = self.suffixes2_at(i);
        if !two.is_empty() {
            return SuffixProfile {
                level: 2,
                suffixes: two,
            };
        }
        let one: Vec<Word> = self
            .suffix_letters_at(i)
            .iter()
            .map(|s| Word::new(vec![s]))
            .collect();
        if !one.is_empty() {
            return SuffixProfile {
                level: 1,
                suffixes: one,
            };
        }
        SuffixProfile {
            level: 0,
            suffixes: Vec::new(),
        }
    }

    /// Newline-delimited `matrix(a,b,c,d) norm s_minus s_plus` records in BFS
    /// order. `s_plus` is `?` on the boundary sphere.
    pub fn export_records(&self) -> String {
        let mut out = String::new();
        for node in &self.nodes {
            let plus = node
                .s_plus
                .map_or_else(|| "?".to_string(), |p| p.to_string());
            let _ = writeln!(
                out,
                "{} {} {} {}",
                node.element, node.norm, node.s_minus, plus
            );
        }
        out
    }

    /// `n,count` CSV of sphere sizes with a header line.
    pub fn sphere_csv(&self) -> String {
        let mut out = String::from("n,count\n");
        for (n, c) in self.spheres.iter().enumerate() {
            let _ = writeln!(out, "{n},{c}");
        }
        out
    }

    /// Undirected DOT graph; nodes are labelled by their BFS representative
    /// word, each edge appears once and is labelled `r` or `u` (the `ū` edge
    /// is the `u` edge read backwards).
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph cayley {\n");
        for i in self.indices() {
            let _ = writeln!(
                out,
                "  n{i} [label=\"{}\", norm={}];",
                self.representative_word(i),
                self.nodes[i].norm
            );
        }
        for i in self.indices() {
            for s in [Letter::R, Letter::U] {
                if let Some(j) = self.neighbor(i, s) {
                    if s == Letter::R && j < i {
                        continue;
                    }
                    let _ = writeln!(out, "  n{i} -- n{j} [label=\"{s}\"];");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn norm(g: &GroupElement, ball: &Ball) -> Result<usize> {
    Ok(ball.node(ball.index_of(g)?).norm)
}

pub fn suffix_sets(g: &GroupElement, ball: &Ball) -> Result<SuffixProfile> {
    Ok(ball.suffix_profile_at(ball.index_of(g)?))
}

/// Combinatorial Laplacian `(Δh)_g = 3 h_g - Σ_s h_{gs}` with `h` extended by
/// zero outside the ball. `h` is indexed like the ball's nodes.
pub fn apply_laplacian(h: &[f64], ball: &Ball) -> Result<Vec<f64>> {
    if h.len() != ball.len() {
        return Err(Error::InvalidArgument(format!(
            "function has {} values for a ball of {} nodes",
            h.len(),
            ball.len()
        )));
    }
    Ok(ball
        .neighbors
        .iter()
        .zip(h)
        .map(|(row, &hg)| 3.0 * hg - row.iter().flatten().map(|&j| h[j]).sum::<f64>())
        .collect())
}

/// Canonicalized starred suffix set, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SuffixProfile {
    pub level: u8,
    pub suffixes: Vec<Word>,
}

impl fmt::Display for SuffixProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        for (i, w) in self.suffixes.iter().enumerate() {
            if i > 0 {
                f.write_char(',')?;
            }
            write!(f, "{w}")?;
        }
        f.write_char('}')
    }
}

/// `u` or `ū`, the letter written `a` in the profile catalogue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parabolic {
    U,
    Uinv,
}

impl Parabolic {
    pub fn letter(self) -> Letter {
        match self {
            Parabolic::U => Letter::U,
            Parabolic::Uinv => Letter::Uinv,
        }
    }

    pub fn bar(self) -> Parabolic {
        match self {
            Parabolic::U => Parabolic::Uinv,
            Parabolic::Uinv => Parabolic::U,
        }
    }

    fn from_letter(s: Letter) -> Option<Parabolic> {
        match s {
            Letter::U => Some(Parabolic::U),
            Letter::Uinv => Some(Parabolic::Uinv),
            Letter::R => None,
        }
    }
}

/// The eight possible starred suffix sets, `a ∈ {u, ū}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProfileShape {
    /// ∅
    Empty,
    /// {r}
    R,
    /// {ar}
    AR(Parabolic),
    /// {a}
    A(Parabolic),
    /// {ra}
    RA(Parabolic),
    /// {a²}
    AA(Parabolic),
    /// {ra, a²}
    RaAa(Parabolic),
    /// {ra, ār}
    RaBarAr(Parabolic),
}

impl ProfileShape {
    pub fn classify(profile: &SuffixProfile) -> Option<ProfileShape> {
        use Letter::R;
        let pair = |w: &Word| -> Option<(Letter, Letter)> {
            match w.letters() {
                [x, y] => Some((*x, *y)),
                _ => None,
            }
        };
        let para = Parabolic::from_letter;
        match (profile.level, profile.suffixes.as_slice()) {
            (0, []) => Some(ProfileShape::Empty),
            (1, [w]) => match w.letters() {
                [R] => Some(ProfileShape::R),
                [x] => para(*x).map(ProfileShape::A),
                _ => None,
            },
            (2, [w]) => match pair(w)? {
                (x, R) => para(x).map(ProfileShape::AR),
                (R, y) => para(y).map(ProfileShape::RA),
                (x, y) if x == y => para(x).map(ProfileShape::AA),
                _ => None,
            },
            (2, [w1, w2]) => {
                let (p, q) = (pair(w1)?, pair(w2)?);
                // Both orders, since the profile is sorted lexicographically.
                [(p, q), (q, p)].into_iter().find_map(|(ra, other)| {
                    let (R, a) = ra else { return None };
                    let a = para(a)?;
                    if other == (a.letter(), a.letter()) {
                        Some(ProfileShape::RaAa(a))
                    } else if other == (a.bar().letter(), R) {
                        Some(ProfileShape::RaBarAr(a))
                    } else {
                        None
                    }
                })
            }
            _ => None,
        }
    }

    /// Expected starred profiles of the successors, from the case analysis of
    /// level-2 suffix types.
    pub fn successor_shapes(self) -> Vec<ProfileShape> {
        use ProfileShape::*;
        let mut v = match self {
            Empty => vec![R, A(Parabolic::U), A(Parabolic::Uinv)],
            R => vec![RA(Parabolic::U), RA(Parabolic::Uinv)],
            AR(a) => vec![RaBarAr(a), RA(a.bar())],
            A(a) | AA(a) => vec![AR(a), AA(a)],
            RA(a) | RaAa(a) => vec![RaBarAr(a.bar()), AA(a)],
            RaBarAr(a) => vec![RaAa(a)],
        };
        v.sort();
        v
    }
}

/// A forbidden combination of geodesic suffixes found at some node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForbiddenSuffix {
    pub element: String,
    pub rule: &'static str,
    pub suffixes1: String,
    pub suffixes2: Vec<String>,
}

/// Checks the four forbidden suffix patterns at node `i`:
/// `{u, ū}`, `{ur, ūr}`, `{ar, ā²}` and `{ar, a}` for `a ∈ {u, ū}`.
pub fn forbidden_suffixes_at(ball: &Ball, i: usize) -> Vec<ForbiddenSuffix> {
    let s1 = ball.suffix_letters_at(i);
    let s2 = ball.suffixes2_at(i);
    let has2 = |x: Letter, y: Letter| s2.iter().any(|w| w.letters() == [x, y]);
    let mut rules = Vec::new();
    if s1.contains(Letter::U) && s1.contains(Letter::Uinv) {
        rules.push("u and ū");
    }
    if has2(Letter::U, Letter::R) && has2(Letter::Uinv, Letter::R) {
        rules.push("ur and ūr");
    }
    for a in [Letter::U, Letter::Uinv] {
        let abar = a.inverse();
        if has2(a, Letter::R) && has2(abar, abar) {
            rules.push(if a == Letter::U { "ur and ū²" } else { "ūr and u²" });
        }
        if has2(a, Letter::R) && s1.contains(a) {
            rules.push(if a == Letter::U { "ur and u" } else { "ūr and ū" });
        }
    }
    rules
        .into_iter()
        .map(|rule| ForbiddenSuffix {
            element: ball.node(i).element.to_string(),
            rule,
            suffixes1: s1.to_string(),
            suffixes2: s2.iter().map(Word::to_string).collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::evaluate;

    fn at(ball: &Ball, w: &str) -> usize {
        ball.index_of(&evaluate(&w.parse().unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn small_balls() {
        assert_eq!(build_ball(0).unwrap().len(), 1);
        let b1 = build_ball(1).unwrap();
        assert_eq!(b1.len(), 4);
        assert_eq!(b1.spheres(), &[1, 3]);
        assert_eq!(build_ball(2).unwrap().spheres(), &[1, 3, 6]);
        assert_eq!(build_ball(3).unwrap().spheres(), &[1, 3, 6, 10]);
    }

    #[test]
    fn resource_limit() {
        assert!(matches!(
            build_ball_with_limit(10, 100),
            Err(Error::ResourceLimit { limit: 100 })
        ));
    }

    #[test]
    fn norms() {
        let ball = build_ball(6).unwrap();
        assert_eq!(norm(&GroupElement::IDENTITY, &ball).unwrap(), 0);
        // ururur is a relator, so this freely reduced word collapses to r.
        assert_eq!(norm(&evaluate(&"ururu".parse().unwrap()).unwrap(), &ball).unwrap(), 1);
        assert_eq!(norm(&evaluate(&"uuruu".parse().unwrap()).unwrap(), &ball).unwrap(), 5);
        assert_eq!(norm(&crate::group::generator(Letter::R), &ball).unwrap(), 1);
        let far = evaluate(&"uuuuuuu".parse().unwrap()).unwrap();
        assert!(matches!(norm(&far, &ball), Err(Error::NotInBall(_))));
    }

    #[test]
    fn suffix_examples() {
        let ball = build_ball(5).unwrap();
        let p = |w: &str| ball.suffix_profile_at(at(&ball, w)).to_string();
        assert_eq!(p("e"), "{}");
        assert_eq!(p("r"), "{r}");
        assert_eq!(p("ur"), "{ur}");
        assert_eq!(p("ru"), "{ru}");
        assert_eq!(p("uru"), "{ru,Ur}");
        assert_eq!(ball.suffix_profile_at(at(&ball, "r")).level, 1);
    }

    #[test]
    fn classify_catalogue() {
        let ball = build_ball(5).unwrap();
        let shape = |w: &str| ProfileShape::classify(&ball.suffix_profile_at(at(&ball, w)));
        assert_eq!(shape("e"), Some(ProfileShape::Empty));
        assert_eq!(shape("r"), Some(ProfileShape::R));
        assert_eq!(shape("U"), Some(ProfileShape::A(Parabolic::Uinv)));
        assert_eq!(shape("ur"), Some(ProfileShape::AR(Parabolic::U)));
        assert_eq!(shape("uu"), Some(ProfileShape::AA(Parabolic::U)));
        assert_eq!(shape("uru"), Some(ProfileShape::RaBarAr(Parabolic::U)));
        assert_eq!(shape("uruu"), Some(ProfileShape::RaAa(Parabolic::U)));
        let bogus = SuffixProfile {
            level: 2,
            suffixes: vec!["uu".parse().unwrap(), "UU".parse().unwrap()],
        };
        assert_eq!(ProfileShape::classify(&bogus), None);
    }

    #[test]
    fn laplacian_examples() {
        let ball = build_ball(3).unwrap();
        let ones = vec![1.0; ball.len()];
        let lap = apply_laplacian(&ones, &ball).unwrap();
        for i in ball.indices().filter(|&i| ball.node(i).norm < 3) {
            assert_eq!(lap[i], 0.0);
        }
        let mut delta = vec![0.0; ball.len()];
        delta[0] = 1.0;
        let lap = apply_laplacian(&delta, &ball).unwrap();
        assert_eq!(lap[0], 3.0);
        assert_eq!(lap[at(&ball, "r")], -1.0);
        assert!(apply_laplacian(&[1.0], &ball).is_err());
    }

    #[test]
    fn laplacian_is_symmetric() {
        let ball = build_ball(6).unwrap();
        let f = |i: usize, k: f64| {
            if ball.node(i).norm < 6 {
                ((i as f64) * k).sin()
            } else {
                0.0
            }
        };
        let h: Vec<f64> = ball.indices().map(|i| f(i, 0.7)).collect();
        let h2: Vec<f64> = ball.indices().map(|i| f(i, 1.3)).collect();
        let a: f64 = apply_laplacian(&h, &ball).unwrap().iter().zip(&h2).map(|(x, y)| x * y).sum();
        let b: f64 = apply_laplacian(&h2, &ball).unwrap().iter().zip(&h).map(|(x, y)| x * y).sum();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn structure_invariants() {
        let ball = build_ball(10).unwrap();
        assert!(ball.is_bipartite_by_norm());
        for (i, node) in ball.nodes().iter().enumerate() {
            if let Some(plus) = node.s_plus {
                assert!(plus.is_disjoint(node.s_minus));
                assert_eq!(plus.union(node.s_minus), LetterSet::FULL);
            }
            assert_eq!(node.s_minus.is_empty(), i == 0);
            assert!(forbidden_suffixes_at(&ball, i).is_empty());
            assert!(ProfileShape::classify(&ball.suffix_profile_at(i)).is_some());
        }
    }

    #[test]
    fn geodesic_words_match_counts() {
        let ball = build_ball(6).unwrap();
        for i in ball.indices() {
            let words = ball.geodesic_words_at(i);
            assert_eq!(words.len() as u64, ball.geodesic_count(i));
            for w in &words {
                assert_eq!(evaluate(w).unwrap(), ball.node(i).element);
                assert_eq!(w.len(), ball.node(i).norm);
            }
        }
        assert_eq!(ball.geodesic_word_counts(), vec![1, 3, 6, 12, 20, 36, 62]);
        assert!(ball
            .geodesic_words_at(at(&ball, "uru"))
            .contains(&"rUr".parse().unwrap()));
    }

    #[test]
    fn exports() {
        let ball = build_ball(1).unwrap();
        assert_eq!(
            ball.export_records(),
            "matrix(1,0,0,1) 0 {} {r,u,U}\n\
             matrix(0,1,-1,0) 1 {r} ?\n\
             matrix(1,1,0,1) 1 {U} ?\n\
             matrix(1,-1,0,1) 1 {u} ?\n"
        );
        assert_eq!(ball.sphere_csv(), "n,count\n0,1\n1,3\n");
        let dot = ball.to_dot();
        assert_eq!(dot.matches(" -- ").count(), 3);
    }
}
