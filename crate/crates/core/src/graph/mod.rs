//! Weighted graphs `(b, c, m)` over a countable vertex set.
//!
//! A graph is either an explicit [`WeightedGraph`] on the dense ids
//! `0..n`, or a [`ProceduralGraph`] whose neighbors are produced lazily by a
//! [`NeighborOracle`]. Both are reached through [`GraphSource`], which is all
//! the operator and moment code needs: neighbor lists, `m` and `c`.

pub mod format;
mod procedural;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use format::{parse_graph, write_graph, ParseError};
pub use procedural::{FnOracle, IntegerLine, NeighborOracle, ProceduralGraph};

/// Vertex identifier. Finite graphs use `0..n`; procedural sources may use
/// any integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub i64);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i as i64)
    }
}

impl From<i64> for VertexId {
    fn from(i: i64) -> Self {
        VertexId(i)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Combinatorial distance, possibly infinite (or beyond the search cutoff).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "INF"),
        }
    }
}

/// A violated weighted-graph axiom.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Asymmetry { x: usize, y: usize, b_xy: f64, b_yx: f64 },
    NonzeroDiagonal { x: usize, b: f64 },
    NegativeWeight { x: usize, y: usize, b: f64 },
    NonpositiveMeasure { x: usize, m: f64 },
    NegativeKilling { x: usize, c: f64 },
    NonFinite { what: &'static str, x: usize },
    OutOfRange { x: usize, y: usize },
    LengthMismatch { m: usize, c: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Asymmetry { x, y, b_xy, b_yx } => {
                write!(f, "asymmetry at ({x},{y}): b(x,y)={b_xy}, b(y,x)={b_yx}")
            }
            Violation::NonzeroDiagonal { x, b } => write!(f, "nonzero diagonal b({x},{x})={b}"),
            Violation::NegativeWeight { x, y, b } => write!(f, "negative weight b({x},{y})={b}"),
            Violation::NonpositiveMeasure { x, m } => write!(f, "nonpositive measure at {x}: {m}"),
            Violation::NegativeKilling { x, c } => write!(f, "negative killing term at {x}: {c}"),
            Violation::NonFinite { what, x } => write!(f, "non-finite {what} at {x}"),
            Violation::OutOfRange { x, y } => write!(f, "entry ({x},{y}) out of range"),
            Violation::LengthMismatch { m, c } => {
                write!(f, "m has {m} entries but c has {c}")
            }
        }
    }
}

/// Raw, unchecked graph data: directed weight entries plus `m` and `c`.
///
/// Entries not listed are zero. Repeated `(x, y)` entries are summed.
#[derive(Debug, Clone, Default)]
pub struct GraphData {
    pub m: Vec<f64>,
    pub c: Vec<f64>,
    pub b: Vec<(usize, usize, f64)>,
}

impl GraphData {
    fn weight_map(&self) -> BTreeMap<(usize, usize), f64> {
        let mut map = BTreeMap::new();
        for &(x, y, w) in &self.b {
            *map.entry((x, y)).or_insert(0.0) += w;
        }
        map
    }
}

/// Lists every violated axiom in `data`. Empty means the data describes a
/// valid weighted graph.
pub fn validate(data: &GraphData) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = data.m.len();
    if data.c.len() != n {
        out.push(Violation::LengthMismatch { m: n, c: data.c.len() });
    }
    for (x, &m) in data.m.iter().enumerate() {
        if !m.is_finite() {
            out.push(Violation::NonFinite { what: "measure", x });
        } else if m <= 0.0 {
            out.push(Violation::NonpositiveMeasure { x, m });
        }
    }
    for (x, &c) in data.c.iter().enumerate() {
        if !c.is_finite() {
            out.push(Violation::NonFinite { what: "killing term", x });
        } else if c < 0.0 {
            out.push(Violation::NegativeKilling { x, c });
        }
    }
    let weights = data.weight_map();
    for (&(x, y), &w) in &weights {
        if x >= n || y >= n {
            out.push(Violation::OutOfRange { x, y });
            continue;
        }
        if !w.is_finite() {
            out.push(Violation::NonFinite { what: "weight", x });
            continue;
        }
        if w < 0.0 {
            out.push(Violation::NegativeWeight { x, y, b: w });
        }
        if x == y {
            if w != 0.0 {
                out.push(Violation::NonzeroDiagonal { x, b: w });
            }
            continue;
        }
        let back = weights.get(&(y, x)).copied().unwrap_or(0.0);
        // report each asymmetric pair once, from its smaller endpoint
        if back != w && (x < y || !weights.contains_key(&(y, x))) {
            let (a, b) = if x < y { (x, y) } else { (y, x) };
            let (b_ab, b_ba) = if x < y { (w, back) } else { (back, w) };
            out.push(Violation::Asymmetry { x: a, y: b, b_xy: b_ab, b_yx: b_ba });
        }
    }
    out
}

/// A finite weighted graph on the vertices `0..n`.
///
/// Each undirected edge is stored once per endpoint with the same weight, so
/// `b(x,y) = b(y,x)` holds by construction. Adjacency lists are sorted by
/// neighbor id. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    m: Vec<f64>,
    c: Vec<f64>,
    adj: Vec<Vec<(VertexId, f64)>>,
}

impl WeightedGraph {
    /// Builds a graph from raw data, rejecting it if [`validate`] reports
    /// anything. Zero weights are dropped.
    pub fn from_data(data: &GraphData) -> Result<Self> {
        let violations = validate(data);
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations));
        }
        let n = data.m.len();
        let mut adj = vec![Vec::new(); n];
        for ((x, y), w) in data.weight_map() {
            if w > 0.0 {
                adj[x].push((VertexId::from(y), w));
            }
        }
        Ok(WeightedGraph { m: data.m.clone(), c: data.c.clone(), adj })
    }

    pub fn builder(n: usize) -> GraphBuilder {
        GraphBuilder::new(n)
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len()).map(VertexId::from)
    }

    pub fn contains(&self, x: VertexId) -> bool {
        x.0 >= 0 && (x.0 as usize) < self.len()
    }

    fn check(&self, x: VertexId) -> Result<usize> {
        if self.contains(x) {
            Ok(x.index())
        } else {
            Err(Error::UnknownVertex(x))
        }
    }

    pub fn measure(&self, x: VertexId) -> Result<f64> {
        Ok(self.m[self.check(x)?])
    }

    pub fn killing(&self, x: VertexId) -> Result<f64> {
        Ok(self.c[self.check(x)?])
    }

    pub fn measures(&self) -> &[f64] {
        &self.m
    }

    pub fn killings(&self) -> &[f64] {
        &self.c
    }

    pub fn neighbors(&self, x: VertexId) -> Result<&[(VertexId, f64)]> {
        Ok(&self.adj[self.check(x)?])
    }

    /// `b(x, y)`, zero for non-adjacent pairs.
    pub fn weight(&self, x: VertexId, y: VertexId) -> Result<f64> {
        self.check(y)?;
        let list = self.neighbors(x)?;
        Ok(list
            .binary_search_by_key(&y, |&(z, _)| z)
            .map(|i| list[i].1)
            .unwrap_or(0.0))
    }

    pub fn edge_set(&self) -> EdgeSet {
        let mut edges = BTreeSet::new();
        for (x, list) in self.adj.iter().enumerate() {
            for &(y, _) in list {
                if (x as i64) < y.0 {
                    edges.insert((VertexId::from(x), y));
                }
            }
        }
        EdgeSet { edges }
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Re-checks the axioms on the stored data.
    pub fn validate(&self) -> Vec<Violation> {
        validate(&self.to_data())
    }

    pub fn to_data(&self) -> GraphData {
        let mut b = Vec::new();
        for (x, list) in self.adj.iter().enumerate() {
            for &(y, w) in list {
                b.push((x, y.index(), w));
            }
        }
        GraphData { m: self.m.clone(), c: self.c.clone(), b }
    }

    /// True iff every pair of vertices is joined by a path. A graph with at
    /// most one vertex is connected.
    pub fn is_connected(&self) -> bool {
        if self.len() <= 1 {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adj[x] {
                let y = y.index();
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == self.len()
    }
}

/// Incremental construction of a [`WeightedGraph`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    data: GraphData,
}

impl GraphBuilder {
    /// `n` vertices with unit measure and no killing term.
    pub fn new(n: usize) -> Self {
        GraphBuilder { data: GraphData { m: vec![1.0; n], c: vec![0.0; n], b: Vec::new() } }
    }

    pub fn measure(mut self, x: usize, m: f64) -> Self {
        self.data.m[x] = m;
        self
    }

    pub fn killing(mut self, x: usize, c: f64) -> Self {
        self.data.c[x] = c;
        self
    }

    /// Adds the undirected edge `{x, y}` with weight `b`, mirrored.
    pub fn edge(mut self, x: usize, y: usize, b: f64) -> Self {
        self.data.b.push((x, y, b));
        self.data.b.push((y, x, b));
        self
    }

    pub fn build(self) -> Result<WeightedGraph> {
        WeightedGraph::from_data(&self.data)
    }
}

/// Unordered pairs `{x, y}` with `b(x, y) > 0`, stored as `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSet {
    pub edges: BTreeSet<(VertexId, VertexId)>,
}

impl EdgeSet {
    pub fn contains(&self, x: VertexId, y: VertexId) -> bool {
        let key = if x <= y { (x, y) } else { (y, x) };
        self.edges.contains(&key)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// A neighbor list, either borrowed from a finite graph or shared out of a
/// procedural cache.
pub enum Neighbors<'a> {
    Borrowed(&'a [(VertexId, f64)]),
    Shared(Arc<[(VertexId, f64)]>),
}

impl Deref for Neighbors<'_> {
    type Target = [(VertexId, f64)];

    fn deref(&self) -> &Self::Target {
        match self {
            Neighbors::Borrowed(s) => s,
            Neighbors::Shared(s) => s,
        }
    }
}

/// Either an explicit finite graph or a lazily generated locally finite one.
#[derive(Clone)]
pub enum GraphSource {
    Finite(Arc<WeightedGraph>),
    Procedural(Arc<ProceduralGraph>),
}

impl fmt::Debug for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::Finite(g) => f.debug_tuple("Finite").field(&g.len()).finish(),
            GraphSource::Procedural(_) => f.write_str("Procedural"),
        }
    }
}

impl From<WeightedGraph> for GraphSource {
    fn from(g: WeightedGraph) -> Self {
        GraphSource::Finite(Arc::new(g))
    }
}

impl From<Arc<WeightedGraph>> for GraphSource {
    fn from(g: Arc<WeightedGraph>) -> Self {
        GraphSource::Finite(g)
    }
}

impl From<ProceduralGraph> for GraphSource {
    fn from(g: ProceduralGraph) -> Self {
        GraphSource::Procedural(Arc::new(g))
    }
}

impl GraphSource {
    pub fn as_finite(&self) -> Option<&WeightedGraph> {
        match self {
            GraphSource::Finite(g) => Some(g),
            GraphSource::Procedural(_) => None,
        }
    }

    pub fn contains(&self, x: VertexId) -> bool {
        match self {
            GraphSource::Finite(g) => g.contains(x),
            GraphSource::Procedural(p) => p.contains(x),
        }
    }

    pub fn measure(&self, x: VertexId) -> Result<f64> {
        match self {
            GraphSource::Finite(g) => g.measure(x),
            GraphSource::Procedural(p) => p.measure(x),
        }
    }

    pub fn killing(&self, x: VertexId) -> Result<f64> {
        match self {
            GraphSource::Finite(g) => g.killing(x),
            GraphSource::Procedural(p) => p.killing(x),
        }
    }

    pub fn neighbors(&self, x: VertexId) -> Result<Neighbors<'_>> {
        match self {
            GraphSource::Finite(g) => g.neighbors(x).map(Neighbors::Borrowed),
            GraphSource::Procedural(p) => p.neighbors(x).map(Neighbors::Shared),
        }
    }

    pub fn weight(&self, x: VertexId, y: VertexId) -> Result<f64> {
        if !self.contains(y) {
            return Err(Error::UnknownVertex(y));
        }
        let list = self.neighbors(x)?;
        Ok(list
            .binary_search_by_key(&y, |&(z, _)| z)
            .map(|i| list[i].1)
            .unwrap_or(0.0))
    }

    /// Shortest path length from `x` to `y` in the edge set, by breadth-first
    /// search up to radius `cutoff`. Procedural sources require a cutoff.
    pub fn combinatorial_distance(
        &self,
        x: VertexId,
        y: VertexId,
        cutoff: Option<usize>,
    ) -> Result<Distance> {
        if !self.contains(x) {
            return Err(Error::UnknownVertex(x));
        }
        if !self.contains(y) {
            return Err(Error::UnknownVertex(y));
        }
        let cutoff = match (self, cutoff) {
            (_, Some(c)) => c,
            (GraphSource::Finite(g), None) => g.len(),
            (GraphSource::Procedural(_), None) => return Err(Error::CutoffRequired),
        };
        if x == y {
            return Ok(Distance::Finite(0));
        }
        let mut seen = BTreeSet::from([x]);
        let mut frontier = vec![x];
        for depth in 1..=cutoff {
            let mut next = Vec::new();
            for &v in &frontier {
                for &(w, _) in self.neighbors(v)?.iter() {
                    if w == y {
                        return Ok(Distance::Finite(depth));
                    }
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(Distance::Infinite)
    }

    /// `Deg(x) = (sum_z b(x,z) + c(x)) / m(x)`.
    pub fn degree(&self, x: VertexId) -> Result<f64> {
        let sum: f64 = self.neighbors(x)?.iter().map(|&(_, w)| w).sum();
        Ok((sum + self.killing(x)?) / self.measure(x)?)
    }

    /// Vertices within distance `radius` of `x`, keyed by id, with their
    /// distance.
    pub fn ball_vertices(&self, x: VertexId, radius: usize) -> Result<BTreeMap<VertexId, usize>> {
        if !self.contains(x) {
            return Err(Error::UnknownVertex(x));
        }
        let mut dist = BTreeMap::from([(x, 0usize)]);
        let mut frontier = vec![x];
        for depth in 1..=radius {
            let mut next = Vec::new();
            for &v in &frontier {
                for &(w, _) in self.neighbors(v)?.iter() {
                    if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                        e.insert(depth);
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(dist)
    }

    /// Induced subgraph on the vertices within distance `radius` of `x`.
    ///
    /// Local ids are assigned in increasing order of the original ids, so the
    /// relabeling is monotone and neighbor lists keep their order. Oracle
    /// answers that are not symmetric are reported as invalid graph data.
    pub fn ball(&self, x: VertexId, radius: usize) -> Result<Ball> {
        let members = self.ball_vertices(x, radius)?;
        let ids: Vec<VertexId> = members.keys().copied().collect();
        let local: BTreeMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut data = GraphData::default();
        for (i, &v) in ids.iter().enumerate() {
            data.m.push(self.measure(v)?);
            data.c.push(self.killing(v)?);
            for &(w, b) in self.neighbors(v)?.iter() {
                if let Some(&j) = local.get(&w) {
                    data.b.push((i, j, b));
                }
            }
        }
        let graph = WeightedGraph::from_data(&data)?;
        Ok(Ball { center: x, ids, graph })
    }
}

/// A materialized ball: the induced subgraph plus the map from local index to
/// original vertex id.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: VertexId,
    pub ids: Vec<VertexId>,
    pub graph: WeightedGraph,
}

impl Ball {
    pub fn local(&self, v: VertexId) -> Option<VertexId> {
        self.ids.binary_search(&v).ok().map(VertexId::from)
    }

    pub fn original(&self, local: VertexId) -> VertexId {
        self.ids[local.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> WeightedGraph {
        let mut b = WeightedGraph::builder(n);
        for i in 0..n.saturating_sub(1) {
            b = b.edge(i, i + 1, 1.0);
        }
        b.build().unwrap()
    }

    fn v(i: i64) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn validate_accepts_symmetric_data() {
        let data = GraphData { m: vec![1.0, 1.0], c: vec![0.0, 0.0], b: vec![(0, 1, 1.0), (1, 0, 1.0)] };
        assert!(validate(&data).is_empty());
    }

    #[test]
    fn validate_reports_asymmetry() {
        let data = GraphData { m: vec![1.0, 1.0], c: vec![0.0, 0.0], b: vec![(0, 1, 1.0), (1, 0, 2.0)] };
        assert_eq!(
            validate(&data),
            vec![Violation::Asymmetry { x: 0, y: 1, b_xy: 1.0, b_yx: 2.0 }]
        );
        let one_sided = GraphData { m: vec![1.0, 1.0], c: vec![0.0, 0.0], b: vec![(1, 0, 3.0)] };
        assert_eq!(
            validate(&one_sided),
            vec![Violation::Asymmetry { x: 0, y: 1, b_xy: 0.0, b_yx: 3.0 }]
        );
    }

    #[test]
    fn validate_reports_measure_diagonal_and_sign() {
        let data = GraphData {
            m: vec![0.0, 1.0],
            c: vec![0.0, -1.0],
            b: vec![(0, 1, 1.0), (1, 0, 1.0), (1, 1, 0.5)],
        };
        let found = validate(&data);
        assert!(found.contains(&Violation::NonpositiveMeasure { x: 0, m: 0.0 }));
        assert!(found.contains(&Violation::NegativeKilling { x: 1, c: -1.0 }));
        assert!(found.contains(&Violation::NonzeroDiagonal { x: 1, b: 0.5 }));

        let neg = GraphData { m: vec![1.0, 1.0], c: vec![0.0, 0.0], b: vec![(0, 1, -1.0), (1, 0, -1.0)] };
        assert_eq!(validate(&neg).len(), 2);
        assert!(WeightedGraph::from_data(&neg).is_err());
    }

    #[test]
    fn distance_examples() {
        let g = GraphSource::from(path(3));
        assert_eq!(g.combinatorial_distance(v(0), v(2), Some(10)).unwrap(), Distance::Finite(2));
        assert_eq!(g.combinatorial_distance(v(1), v(1), Some(10)).unwrap(), Distance::Finite(0));
        let two = WeightedGraph::builder(4).edge(0, 1, 1.0).edge(2, 3, 1.0).build().unwrap();
        let two = GraphSource::from(two);
        assert_eq!(g.combinatorial_distance(v(0), v(2), Some(1)).unwrap(), Distance::Infinite);
        assert_eq!(two.combinatorial_distance(v(0), v(3), Some(10)).unwrap(), Distance::Infinite);
        assert!(matches!(
            two.combinatorial_distance(v(0), v(9), None),
            Err(Error::UnknownVertex(VertexId(9)))
        ));
    }

    #[test]
    fn connectivity() {
        assert!(path(3).is_connected());
        assert!(path(1).is_connected());
        let two = WeightedGraph::builder(4).edge(0, 1, 1.0).edge(2, 3, 1.0).build().unwrap();
        assert!(!two.is_connected());
    }

    #[test]
    fn degree_examples() {
        let g = GraphSource::from(path(2));
        assert_eq!(g.degree(v(0)).unwrap(), 1.0);
        let g = WeightedGraph::builder(3)
            .edge(0, 1, 2.0)
            .edge(0, 2, 3.0)
            .killing(0, 1.0)
            .measure(0, 2.0)
            .build()
            .unwrap();
        assert_eq!(GraphSource::from(g).degree(v(0)).unwrap(), 3.0);
        let iso = GraphSource::from(WeightedGraph::builder(1).build().unwrap());
        assert_eq!(iso.degree(v(0)).unwrap(), 0.0);
    }

    #[test]
    fn ball_on_path() {
        let g = GraphSource::from(path(4));
        let b = g.ball(v(0), 1).unwrap();
        assert_eq!(b.ids, vec![v(0), v(1)]);
        assert_eq!(b.graph.edge_count(), 1);
        let b0 = g.ball(v(2), 0).unwrap();
        assert_eq!(b0.ids, vec![v(2)]);
        assert_eq!(b0.graph.edge_count(), 0);
    }

    #[test]
    fn ball_on_integer_line() {
        let line = GraphSource::from(ProceduralGraph::new(IntegerLine::default()));
        let b = line.ball(v(0), 2).unwrap();
        assert_eq!(b.ids, (-2..=2).map(VertexId).collect::<Vec<_>>());
        assert_eq!(b.graph.edge_count(), 4);
        assert_eq!(b.local(v(-2)), Some(v(0)));
        assert_eq!(b.original(v(4)), v(2));
    }

    #[test]
    fn procedural_distance_needs_cutoff() {
        let line = GraphSource::from(ProceduralGraph::new(IntegerLine::default()));
        assert!(matches!(line.combinatorial_distance(v(0), v(3), None), Err(Error::CutoffRequired)));
        assert_eq!(line.combinatorial_distance(v(-2), v(3), Some(10)).unwrap(), Distance::Finite(5));
        assert_eq!(line.combinatorial_distance(v(-2), v(3), Some(4)).unwrap(), Distance::Infinite);
    }

    #[test]
    fn edge_set_has_no_loops_and_matches_weights() {
        let g = path(4);
        let e = g.edge_set();
        assert_eq!(e.len(), 3);
        assert!(e.contains(v(2), v(1)));
        assert!(!e.contains(v(0), v(2)));
        assert_eq!(g.weight(v(1), v(2)).unwrap(), 1.0);
        assert_eq!(g.weight(v(0), v(3)).unwrap(), 0.0);
    }
}
