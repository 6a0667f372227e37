//! Simply-laced Cartan data built from a finite simple graph, weights stored by
//! their pairings with the simple roots, Weyl reflections and braid words.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CartanError {
    #[error("edge {0}-{0} is a loop")]
    Loop(usize),
    #[error("edge {0}-{1} listed twice")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range 1..={count}")]
    UnknownVertex { vertex: usize, count: usize },
    #[error("weight has {got} pairings but the Cartan datum has {expected} vertices")]
    RankMismatch { expected: usize, got: usize },
    #[error("graph spec line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown graph preset {0:?}")]
    UnknownPreset(String),
}

/// Vertices `1..=n` and undirected edges without loops or repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl SimpleGraph {
    /// Edges use 1-based vertex labels.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, CartanError> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            for v in [a, b] {
                if v == 0 || v > vertex_count {
                    return Err(CartanError::UnknownVertex {
                        vertex: v,
                        count: vertex_count,
                    });
                }
            }
            if a == b {
                return Err(CartanError::Loop(a));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(CartanError::DuplicateEdge(a, b));
            }
        }
        Ok(Self {
            vertex_count,
            edges: set,
        })
    }

    /// Path graph on `n` vertices (type `A_n`).
    pub fn type_a(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|k| (k, k + 1)).collect();
        Self::new(n, &edges).expect("path graph is simple")
    }

    /// Type `D_n` for `n >= 3`: a path `1 - ... - (n-1)` with `n` attached to `n-2`.
    pub fn type_d(n: usize) -> Option<Self> {
        if n < 3 {
            return None;
        }
        let mut edges: Vec<_> = (1..n - 1).map(|k| (k, k + 1)).collect();
        edges.push((n - 2, n));
        Self::new(n, &edges).ok()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Parses either a preset (`A3`, `D4`) or the line format
    /// `vertices: n` followed by `edge: i j` lines.
    pub fn parse_spec(text: &str) -> Result<Self, CartanError> {
        let trimmed = text.trim();
        if let Some(g) = Self::preset(trimmed) {
            return Ok(g);
        }
        if !trimmed.contains(':') {
            return Err(CartanError::UnknownPreset(trimmed.to_string()));
        }
        let mut count: Option<usize> = None;
        let mut edges = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |reason: &str| CartanError::Syntax {
                line: k + 1,
                reason: reason.to_string(),
            };
            let (key, rest) = line.split_once(':').ok_or_else(|| syntax("expected `key: value`"))?;
            match key.trim() {
                "vertices" => {
                    if count.is_some() {
                        return Err(syntax("`vertices` given twice"));
                    }
                    count = Some(rest.trim().parse().map_err(|_| syntax("bad vertex count"))?);
                }
                "edge" => {
                    let ends: Vec<usize> = rest
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| syntax("bad edge endpoint")))
                        .collect::<Result<_, _>>()?;
                    if ends.len() != 2 {
                        return Err(syntax("an edge needs two endpoints"));
                    }
                    edges.push((ends[0], ends[1]));
                }
                other => return Err(syntax(&format!("unknown key `{other}`"))),
            }
        }
        let count = count.ok_or(CartanError::Syntax {
            line: 1,
            reason: "missing `vertices:` line".into(),
        })?;
        Self::new(count, &edges)
    }

    fn preset(name: &str) -> Option<Self> {
        let (kind, rank) = name.split_at(name.find(|c: char| c.is_ascii_digit())?);
        let rank: usize = rank.parse().ok()?;
        match kind {
            "A" if rank >= 1 => Some(Self::type_a(rank)),
            "D" => Self::type_d(rank),
            _ => None,
        }
    }
}

/// A simply-laced Cartan datum: `C_ii = 2`, `C_ij = -1` on edges, `0` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanData {
    graph: SimpleGraph,
    matrix: Vec<Vec<i64>>,
}

pub fn cartan_from_graph(graph: SimpleGraph) -> CartanData {
    let n = graph.vertex_count();
    let matrix = (1..=n)
        .map(|a| {
            (1..=n)
                .map(|b| {
                    if a == b {
                        2
                    } else if graph.adjacent(a, b) {
                        -1
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    CartanData { graph, matrix }
}

impl CartanData {
    pub fn type_a(rank: usize) -> Self {
        cartan_from_graph(SimpleGraph::type_a(rank))
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn rank(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Entry `C_ij` for 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[i - 1][j - 1]
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.graph.adjacent(i, j)
    }

    pub fn check_index(&self, i: usize) -> Result<(), CartanError> {
        if i == 0 || i > self.rank() {
            Err(CartanError::UnknownVertex {
                vertex: i,
                count: self.rank(),
            })
        } else {
            Ok(())
        }
    }

    /// The simple root `alpha_i` as a weight (its pairings are row `i` of `C`).
    pub fn simple_root(&self, i: usize) -> Weight {
        Weight::from_pairings(self.matrix[i - 1].clone())
    }

    /// Fundamental weight: pairings `delta_i`.
    pub fn fundamental_weight(&self, i: usize) -> Weight {
        Weight::from_pairings((1..=self.rank()).map(|j| i64::from(i == j)).collect())
    }

    /// Reflection `s_i(lambda) = lambda - <lambda, alpha_i> alpha_i`.
    pub fn reflect(&self, weight: &Weight, i: usize) -> Weight {
        let d = weight.pairing(i);
        let pairings = weight
            .pairings
            .iter()
            .enumerate()
            .map(|(j, dj)| dj - d * self.matrix[i - 1][j])
            .collect();
        let content = weight.content.as_ref().map(|c| c.swapped(i));
        Weight { pairings, content }
    }

    /// `lambda + r alpha_i`.
    pub fn shift_by_root(&self, weight: &Weight, i: usize, r: i64) -> Weight {
        let pairings = weight
            .pairings
            .iter()
            .enumerate()
            .map(|(j, dj)| dj + r * self.matrix[i - 1][j])
            .collect();
        let content = weight.content.as_ref().map(|c| c.add_root(i, r));
        Weight { pairings, content }
    }

    pub fn check_weight(&self, weight: &Weight) -> Result<(), CartanError> {
        if weight.pairings.len() != self.rank() {
            return Err(CartanError::RankMismatch {
                expected: self.rank(),
                got: weight.pairings.len(),
            });
        }
        Ok(())
    }
}

/// The `sl_n` content of a weight: a vector in `Z^n` whose entries are the
/// multiplicities of each letter. Entries may go negative during bookkeeping;
/// such a content has no basis vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Content(pub Vec<i64>);

impl Content {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_dominant_realizable(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Pairings `d_i = lambda_{i+1} - lambda_i`, since `alpha_i = (.., -1, 1, ..)`
    /// with `-1` in position `i`.
    pub fn pairings(&self) -> Vec<i64> {
        self.0.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn pairing(&self, i: usize) -> i64 {
        self.0[i] - self.0[i - 1]
    }

    /// `lambda + r alpha_i`: moves `r` from slot `i` to slot `i + 1`.
    pub fn add_root(&self, i: usize, r: i64) -> Self {
        let mut v = self.0.clone();
        v[i - 1] -= r;
        v[i] += r;
        Self(v)
    }

    pub fn swapped(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.swap(i - 1, i);
        Self(v)
    }

    pub fn weight(&self) -> Weight {
        Weight::from_content(self.clone())
    }
}

impl fmt::Display for Content {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Content {
    type Err = String;

    /// `(2,0,1)`; parentheses optional.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Result<Vec<i64>, _> = inner.split(',').map(|t| t.trim().parse::<i64>()).collect();
        match parts {
            Ok(v) if !v.is_empty() => Ok(Content(v)),
            _ => Err(format!("cannot parse weight {s:?}; expected e.g. (2,0,1)")),
        }
    }
}

/// A weight, identified by its pairings `<lambda, alpha_i>`. For `sl_n` the
/// composition it came from can ride along.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weight {
    pairings: Vec<i64>,
    content: Option<Content>,
}

impl Weight {
    pub fn from_pairings(pairings: Vec<i64>) -> Self {
        Self {
            pairings,
            content: None,
        }
    }

    pub fn from_content(content: Content) -> Self {
        Self {
            pairings: content.pairings(),
            content: Some(content),
        }
    }

    pub fn pairings(&self) -> &[i64] {
        &self.pairings
    }

    pub fn content(&self) -> Option<&Content> {
        self.content.as_ref()
    }

    /// `<lambda, alpha_i>` for a 1-based index. Panics on an index outside the
    /// rank; see [`Weight::try_pairing`].
    pub fn pairing(&self, i: usize) -> i64 {
        self.pairings[i - 1]
    }

    pub fn try_pairing(&self, i: usize) -> Result<i64, CartanError> {
        if i == 0 || i > self.pairings.len() {
            return Err(CartanError::UnknownVertex {
                vertex: i,
                count: self.pairings.len(),
            });
        }
        Ok(self.pairings[i - 1])
    }

    /// False when an attached content has left `N^n`.
    pub fn is_realizable(&self) -> bool {
        self.content.as_ref().is_none_or(Content::is_dominant_realizable)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.content {
            Some(c) => write!(f, "{c}"),
            None => write!(f, "<{}>", self.pairings.iter().map(i64::to_string).collect::<Vec<_>>().join(",")),
        }
    }
}

/// Standalone form of [`CartanData::reflect`].
pub fn reflect(cartan: &CartanData, weight: &Weight, i: usize) -> Weight {
    cartan.reflect(weight, i)
}

pub fn pairing(weight: &Weight, i: usize) -> Result<i64, CartanError> {
    weight.try_pairing(i)
}

/// A letter `sigma_i^{+-1}` of a braid word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BraidLetter {
    pub index: usize,
    pub inverse: bool,
}

impl BraidLetter {
    pub fn pos(index: usize) -> Self {
        Self { index, inverse: false }
    }

    pub fn neg(index: usize) -> Self {
        Self { index, inverse: true }
    }

    fn cancels(&self, other: &Self) -> bool {
        self.index == other.index && self.inverse != other.inverse
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BraidWord(pub Vec<BraidLetter>);

impl BraidWord {
    pub fn new(letters: Vec<BraidLetter>) -> Self {
        Self(letters)
    }

    pub fn letters(&self) -> &[BraidLetter] {
        &self.0
    }

    pub fn validate(&self, cartan: &CartanData) -> Result<(), CartanError> {
        self.0.iter().try_for_each(|l| cartan.check_index(l.index))
    }

    /// Free reduction with a stack; the result is the unique reduced word.
    pub fn free_reduce(&self) -> BraidWord {
        let mut stack: Vec<BraidLetter> = Vec::with_capacity(self.0.len());
        for letter in &self.0 {
            match stack.last() {
                Some(top) if top.cancels(letter) => {
                    stack.pop();
                }
                _ => stack.push(*letter),
            }
        }
        BraidWord(stack)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].cancels(&w[1]))
    }

    /// Image in the Weyl group acting on a weight: letters act right to left,
    /// and `sigma_i^{-1}` maps to the same reflection as `sigma_i`.
    pub fn act_on_weight(&self, cartan: &CartanData, weight: &Weight) -> Weight {
        self.0.iter().rev().fold(weight.clone(), |w, l| cartan.reflect(&w, l.index))
    }
}

pub fn free_reduce(word: &BraidWord) -> BraidWord {
    word.free_reduce()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartan_matrices() {
        let a2 = cartan_from_graph(SimpleGraph::new(2, &[(1, 2)]).unwrap());
        assert_eq!(a2.matrix(), &[vec![2, -1], vec![-1, 2]]);
        let a1 = cartan_from_graph(SimpleGraph::new(1, &[]).unwrap());
        assert_eq!(a1.matrix(), &[vec![2]]);
        let a1a1 = cartan_from_graph(SimpleGraph::new(2, &[]).unwrap());
        assert_eq!(a1a1.matrix(), &[vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert_eq!(SimpleGraph::new(2, &[(1, 1)]), Err(CartanError::Loop(1)));
        assert_eq!(
            SimpleGraph::new(2, &[(1, 2), (2, 1)]),
            Err(CartanError::DuplicateEdge(2, 1))
        );
        assert!(matches!(
            SimpleGraph::new(2, &[(1, 3)]),
            Err(CartanError::UnknownVertex { vertex: 3, .. })
        ));
    }

    #[test]
    fn graph_specs() {
        assert_eq!(SimpleGraph::parse_spec("A3").unwrap(), SimpleGraph::type_a(3));
        let d4 = SimpleGraph::parse_spec("D4").unwrap();
        assert!(d4.adjacent(2, 4) && d4.adjacent(2, 3) && !d4.adjacent(3, 4));
        let text = "vertices: 3\nedge: 1 2\n# comment\nedge: 2 3\n";
        assert_eq!(SimpleGraph::parse_spec(text).unwrap(), SimpleGraph::type_a(3));
        assert!(matches!(
            SimpleGraph::parse_spec("vertices: 2\nedge: 1 1"),
            Err(CartanError::Loop(1))
        ));
        assert!(matches!(SimpleGraph::parse_spec("B2"), Err(CartanError::UnknownPreset(_))));
        assert!(matches!(
            SimpleGraph::parse_spec("vertices: 2\nedge: 1"),
            Err(CartanError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn pairings() {
        let w = Content(vec![1, 0]).weight();
        assert_eq!(pairing(&w, 1), Ok(-1));
        assert_eq!(pairing(&Content(vec![1, 1]).weight(), 1), Ok(0));
        let a2 = CartanData::type_a(2);
        assert_eq!(a2.simple_root(1).pairing(1), 2);
        assert_eq!(a2.fundamental_weight(2).pairings(), &[0, 1]);
        assert!(pairing(&w, 2).is_err());
    }

    #[test]
    fn reflections() {
        let a2 = CartanData::type_a(2);
        let w = Weight::from_pairings(vec![1, 0]);
        assert_eq!(a2.reflect(&w, 1).pairings(), &[-1, 1]);
        let a1 = CartanData::type_a(1);
        let c = Content(vec![2, 0]).weight();
        let r = a1.reflect(&c, 1);
        assert_eq!(r.content(), Some(&Content(vec![0, 2])));
        assert_eq!(c.pairing(1), -2);
        assert_eq!(r.pairing(1), 2);
        // content swap and pairing formula agree
        let c3 = Content(vec![3, 1, 0]).weight();
        let a3 = CartanData::type_a(2);
        let r3 = a3.reflect(&c3, 2);
        assert_eq!(r3, Weight::from_content(Content(vec![3, 0, 1])));
    }

    #[test]
    fn free_reduction_examples() {
        let w = BraidWord(vec![BraidLetter::pos(1), BraidLetter::neg(1)]);
        assert!(w.free_reduce().letters().is_empty());
        let w = BraidWord(vec![
            BraidLetter::pos(1),
            BraidLetter::pos(2),
            BraidLetter::neg(2),
            BraidLetter::pos(1),
        ]);
        assert_eq!(w.free_reduce().letters(), &[BraidLetter::pos(1), BraidLetter::pos(1)]);
        let r = BraidWord(vec![BraidLetter::pos(1), BraidLetter::pos(2), BraidLetter::neg(1)]);
        assert_eq!(r.free_reduce(), r);
        assert!(r.validate(&CartanData::type_a(2)).is_ok());
        assert!(r.validate(&CartanData::type_a(1)).is_err());
    }
}
