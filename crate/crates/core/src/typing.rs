//! The six cone types of PSL(2,Z) over `{r, u, ū}` and their successor table.
//!
//! A node's type is read off its starred level-2 suffix set:
//!
//! | type | suffix set |
//! |------|------------|
//! | 0 | ∅ |
//! | 1 | {r} |
//! | 2 | {ar} |
//! | 3 | {a} or {a²} |
//! | 4 | {ra} or {ra, a²} |
//! | 5 | {ra, ār} |
//!
//! with `a ∈ {u, ū}`. The set `{ar, rā}` is `{rb, b̄r}` for `b = ā`, so it is
//! type 5 as well.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cayley::{Ball, ProfileShape};
use crate::error::{Error, Result};
use crate::group::GroupElement;

pub const TYPE_COUNT: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypeId(u8);

impl TypeId {
    pub fn new(value: usize) -> Option<TypeId> {
        (value < TYPE_COUNT).then_some(TypeId(value as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = TypeId> {
        (0..TYPE_COUNT as u8).map(TypeId)
    }

    pub fn from_shape(shape: ProfileShape) -> TypeId {
        use ProfileShape::*;
        TypeId(match shape {
            Empty => 0,
            R => 1,
            AR(_) => 2,
            A(_) | AA(_) => 3,
            RA(_) | RaAa(_) => 4,
            RaBarAr(_) => 5,
        })
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Successor-type multiset for each type, each row sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionTable {
    rows: [Vec<TypeId>; TYPE_COUNT],
}

impl TransitionTable {
    pub fn from_rows(rows: [Vec<usize>; TYPE_COUNT]) -> Result<Self> {
        let rows = rows.map(|row| -> Result<Vec<TypeId>> {
            let mut row: Vec<TypeId> = row
                .into_iter()
                .map(|t| TypeId::new(t).ok_or_else(|| Error::InvalidArgument(format!("type {t}"))))
                .collect::<Result<_>>()?;
            row.sort();
            Ok(row)
        });
        let [a, b, c, d, e, f] = rows;
        Ok(TransitionTable {
            rows: [a?, b?, c?, d?, e?, f?],
        })
    }

    /// Type 0 has one type-1 and two type-3 successors; 1 → {4,4}; 2 → {4,5};
    /// 3 → {2,3}; 4 → {3,5}; 5 → {4}.
    pub fn theorem() -> Self {
        Self::from_rows([
            vec![1, 3, 3],
            vec![4, 4],
            vec![4, 5],
            vec![2, 3],
            vec![3, 5],
            vec![4],
        ])
        .expect("static table")
    }

    pub fn row(&self, t: TypeId) -> &[TypeId] {
        &self.rows[t.index()]
    }

    /// Replaces one row; used to build corrupted tables for mutation tests.
    pub fn with_row(mut self, t: TypeId, row: Vec<usize>) -> Result<Self> {
        let mut rows = self.rows.clone().map(|r| r.into_iter().map(TypeId::index).collect());
        rows[t.index()] = row;
        self = Self::from_rows(rows)?;
        Ok(self)
    }

    /// Number of predecessors of any element of type `t`: the complement of its
    /// successor count in the 3-letter alphabet. Zero for the root type.
    pub fn in_degree(&self, t: TypeId) -> usize {
        if t.index() == 0 {
            0
        } else {
            3usize.saturating_sub(self.row(t).len())
        }
    }
}

impl fmt::Display for TransitionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, row) in self.rows.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            let items: Vec<String> = row.iter().map(|t| t.to_string()).collect();
            write!(f, "{k}->{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

impl Serialize for TransitionTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<usize>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|t| t.index()).collect())
            .collect();
        rows.serialize(serializer)
    }
}

pub(crate) fn type_at(ball: &Ball, i: usize) -> Result<TypeId> {
    let profile = ball.suffix_profile_at(i);
    ProfileShape::classify(&profile)
        .map(TypeId::from_shape)
        .ok_or_else(|| Error::Unclassifiable(profile.to_string()))
}

pub(crate) fn successor_indices(ball: &Ball, i: usize) -> Result<Vec<usize>> {
    ball.require_margin_at(i, 1)?;
    let plus = ball.node(i).s_plus.expect("interior node");
    Ok(plus
        .iter()
        .map(|s| ball.neighbor(i, s).expect("successor in ball"))
        .collect())
}

fn successor_types_at(ball: &Ball, i: usize) -> Result<Vec<TypeId>> {
    let mut types = successor_indices(ball, i)?
        .into_iter()
        .map(|j| type_at(ball, j))
        .collect::<Result<Vec<_>>>()?;
    types.sort();
    Ok(types)
}

/// Type of `g`. The suffix set only looks at predecessors, so every node of
/// the ball has an exact type, boundary included.
pub fn type_of(g: &GroupElement, ball: &Ball) -> Result<TypeId> {
    type_at(ball, ball.index_of(g)?)
}

/// Sorted multiset of the types of the successors of `g`. Needs `|g| <= R-1`.
pub fn successor_types(g: &GroupElement, ball: &Ball) -> Result<Vec<TypeId>> {
    successor_types_at(ball, ball.require_margin(g, 1)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeCounterexample {
    pub element: String,
    pub word: String,
    pub type_id: usize,
    pub expected: Vec<usize>,
    pub observed: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeCounterexample {
    pub element: String,
    pub word: String,
    pub shape: String,
    pub expected: Vec<String>,
    pub observed: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompatibilityReport {
    pub radius: usize,
    pub nodes_checked: usize,
    pub nodes_per_type: [usize; TYPE_COUNT],
    pub expected_table: TransitionTable,
    pub counterexamples: Vec<TypeCounterexample>,
    pub shape_counterexamples: Vec<ShapeCounterexample>,
    pub unclassified: Vec<String>,
    pub passed: bool,
}

enum NodeCheck {
    Ok(TypeId),
    Mismatch(TypeId, Box<(Option<TypeCounterexample>, Option<ShapeCounterexample>)>),
    Unclassified(String),
}

fn check_node(ball: &Ball, table: &TransitionTable, i: usize) -> NodeCheck {
    let classify = |j: usize| {
        let profile = ball.suffix_profile_at(j);
        ProfileShape::classify(&profile).ok_or(profile)
    };
    let shape = match classify(i) {
        Ok(shape) => shape,
        Err(p) => return NodeCheck::Unclassified(format!("{} {p}", ball.node(i).element)),
    };
    let succ = successor_indices(ball, i).expect("margin checked by caller");
    let mut succ_shapes = Vec::with_capacity(succ.len());
    for j in succ {
        match classify(j) {
            Ok(s) => succ_shapes.push(s),
            Err(p) => return NodeCheck::Unclassified(format!("{} {p}", ball.node(j).element)),
        }
    }
    succ_shapes.sort();
    let t = TypeId::from_shape(shape);
    let mut observed: Vec<TypeId> = succ_shapes.iter().map(|&s| TypeId::from_shape(s)).collect();
    observed.sort();

    let word = || ball.representative_word(i).to_string();
    let type_cx = (observed.as_slice() != table.row(t)).then(|| TypeCounterexample {
        element: ball.node(i).element.to_string(),
        word: word(),
        type_id: t.index(),
        expected: table.row(t).iter().map(|x| x.index()).collect(),
        observed: observed.iter().map(|x| x.index()).collect(),
    });
    let expected_shapes = shape.successor_shapes();
    let shape_cx = (succ_shapes != expected_shapes).then(|| ShapeCounterexample {
        element: ball.node(i).element.to_string(),
        word: word(),
        shape: format!("{shape:?}"),
        expected: expected_shapes.iter().map(|s| format!("{s:?}")).collect(),
        observed: succ_shapes.iter().map(|s| format!("{s:?}")).collect(),
    });
    if type_cx.is_none() && shape_cx.is_none() {
        NodeCheck::Ok(t)
    } else {
        NodeCheck::Mismatch(t, Box::new((type_cx, shape_cx)))
    }
}

/// Checks, for every node with `|g| <= R-1`, that its successor types equal
/// the table row of its own type, and that its successors' suffix shapes match
/// the finer shape-level transition rules.
pub fn verify_compatibility(ball: &Ball, table: &TransitionTable) -> Result<CompatibilityReport> {
    if ball.radius() < 3 {
        return Err(Error::InsufficientRadius {
            radius: ball.radius(),
            required: 3,
        });
    }
    let interior: Vec<usize> = ball
        .indices()
        .filter(|&i| ball.node(i).norm < ball.radius())
        .collect();
    let checks: Vec<NodeCheck> = interior
        .par_iter()
        .map(|&i| check_node(ball, table, i))
        .collect();

    let mut report = CompatibilityReport {
        radius: ball.radius(),
        nodes_checked: interior.len(),
        nodes_per_type: [0; TYPE_COUNT],
        expected_table: table.clone(),
        counterexamples: Vec::new(),
        shape_counterexamples: Vec::new(),
        unclassified: Vec::new(),
        passed: false,
    };
    for check in checks {
        match check {
            NodeCheck::Ok(t) => report.nodes_per_type[t.index()] += 1,
            NodeCheck::Mismatch(t, cx) => {
                let (tc, sc) = *cx;
                report.nodes_per_type[t.index()] += 1;
                report.counterexamples.extend(tc);
                report.shape_counterexamples.extend(sc);
            }
            NodeCheck::Unclassified(s) => report.unclassified.push(s),
        }
    }
    report.passed = report.counterexamples.is_empty()
        && report.shape_counterexamples.is_empty()
        && report.unclassified.is_empty();
    Ok(report)
}

/// Reads the successor table off the ball. Every type must be inhabited by a
/// node with `|g| <= R-1` and all nodes of a type must agree.
pub fn extract_transition_table(ball: &Ball) -> Result<TransitionTable> {
    if ball.radius() < 4 {
        return Err(Error::InsufficientRadius {
            radius: ball.radius(),
            required: 4,
        });
    }
    let mut rows: [Option<Vec<TypeId>>; TYPE_COUNT] = Default::default();
    for i in ball.indices().filter(|&i| ball.node(i).norm < ball.radius()) {
        let t = type_at(ball, i)?;
        let observed = successor_types_at(ball, i)?;
        match &rows[t.index()] {
            None => rows[t.index()] = Some(observed),
            Some(prev) if *prev != observed => {
                return Err(Error::InconsistentTable {
                    type_id: t.index(),
                    first: prev.iter().map(|x| x.index()).collect(),
                    second: observed.iter().map(|x| x.index()).collect(),
                })
            }
            Some(_) => {}
        }
    }
    let mut out: [Vec<usize>; TYPE_COUNT] = Default::default();
    for (k, row) in rows.into_iter().enumerate() {
        out[k] = row
            .ok_or(Error::UninhabitedType(k))?
            .into_iter()
            .map(TypeId::index)
            .collect();
    }
    TransitionTable::from_rows(out)
}

/// Number of length-`n` paths from type 0 through the table, `n = 0..=n_max`.
/// Each path spells a geodesic word, so this counts geodesic words, not
/// elements.
pub fn automaton_geodesic_counts(table: &TransitionTable, n_max: usize) -> Vec<u64> {
    let mut state = [0u64; TYPE_COUNT];
    state[0] = 1;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        out.push(state.iter().sum());
        if n == n_max {
            break;
        }
        let mut next = [0u64; TYPE_COUNT];
        for t in TypeId::all() {
            for s in table.row(t) {
                next[s.index()] += state[t.index()];
            }
        }
        state = next;
    }
    out
}

/// Number of elements of each norm `n = 0..=n_max` predicted by the table.
///
/// Each element of type `k` is reached once from each of its predecessors,
/// so the edge count into type `k` is divided by [`TransitionTable::in_degree`].
pub fn automaton_sphere_counts(table: &TransitionTable, n_max: usize) -> Result<Vec<u64>> {
    let mut state = [0u64; TYPE_COUNT];
    state[0] = 1;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        out.push(state.iter().sum());
        if n == n_max {
            break;
        }
        let mut edges = [0u64; TYPE_COUNT];
        for t in TypeId::all() {
            for s in table.row(t) {
                edges[s.index()] += state[t.index()];
            }
        }
        for t in TypeId::all() {
            let k = t.index();
            let deg = table.in_degree(t) as u64;
            state[k] = match (edges[k], deg) {
                (0, _) => 0,
                (e, d) if d > 0 && e % d == 0 => e / d,
                (e, d) => {
                    return Err(Error::InvalidArgument(format!(
                        "{e} edges into type {k} with in-degree {d}"
                    )))
                }
            };
        }
    }
    Ok(out)
}

/// Number of elements of norm at most `radius`, from the theorem table,
/// saturating instead of overflowing. Cheap; used to refuse oversized balls
/// before building them.
pub fn estimated_ball_size(radius: usize) -> u64 {
    let table = TransitionTable::theorem();
    let mut state = [0u64; TYPE_COUNT];
    state[0] = 1;
    let mut total = 1u64;
    for _ in 0..radius {
        let mut edges = [0u64; TYPE_COUNT];
        for t in TypeId::all() {
            for s in table.row(t) {
                edges[s.index()] = edges[s.index()].saturating_add(state[t.index()]);
            }
        }
        for t in TypeId::all() {
            state[t.index()] = edges[t.index()] / table.in_degree(t).max(1) as u64;
        }
        total = state.iter().fold(total, |acc, &x| acc.saturating_add(x));
    }
    total
}
