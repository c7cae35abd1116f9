use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::VertexId;
use crate::error::{Error, Result};

/// Deterministic description of a locally finite weighted graph.
///
/// `neighbors` must be symmetric: `y` is listed for `x` with weight `w`
/// exactly when `x` is listed for `y` with weight `w`. Symmetry is checked
/// when a ball is materialized.
pub trait NeighborOracle: Send + Sync {
    fn neighbors(&self, x: VertexId) -> Vec<(VertexId, f64)>;

    fn measure(&self, _x: VertexId) -> f64 {
        1.0
    }

    fn killing(&self, _x: VertexId) -> f64 {
        0.0
    }

    fn contains(&self, _x: VertexId) -> bool {
        true
    }

    /// Uniform bound on the number of neighbors, if the oracle declares one.
    fn max_degree(&self) -> Option<usize> {
        None
    }
}

/// The integer line: `b(n, n+1) = weight`, unit measure, no killing term.
#[derive(Debug, Clone, Copy)]
pub struct IntegerLine {
    pub weight: f64,
}

impl Default for IntegerLine {
    fn default() -> Self {
        IntegerLine { weight: 1.0 }
    }
}

impl NeighborOracle for IntegerLine {
    fn neighbors(&self, x: VertexId) -> Vec<(VertexId, f64)> {
        vec![(VertexId(x.0 - 1), self.weight), (VertexId(x.0 + 1), self.weight)]
    }

    fn max_degree(&self) -> Option<usize> {
        Some(2)
    }
}

type NeighborFn = dyn Fn(VertexId) -> Vec<(VertexId, f64)> + Send + Sync;
type ScalarFn = dyn Fn(VertexId) -> f64 + Send + Sync;
type MemberFn = dyn Fn(VertexId) -> bool + Send + Sync;

/// Oracle assembled from closures.
pub struct FnOracle {
    neighbors: Box<NeighborFn>,
    measure: Box<ScalarFn>,
    killing: Box<ScalarFn>,
    contains: Box<MemberFn>,
    max_degree: Option<usize>,
}

impl FnOracle {
    pub fn new(neighbors: impl Fn(VertexId) -> Vec<(VertexId, f64)> + Send + Sync + 'static) -> Self {
        FnOracle {
            neighbors: Box::new(neighbors),
            measure: Box::new(|_| 1.0),
            killing: Box::new(|_| 0.0),
            contains: Box::new(|_| true),
            max_degree: None,
        }
    }

    pub fn with_measure(mut self, m: impl Fn(VertexId) -> f64 + Send + Sync + 'static) -> Self {
        self.measure = Box::new(m);
        self
    }

    pub fn with_killing(mut self, c: impl Fn(VertexId) -> f64 + Send + Sync + 'static) -> Self {
        self.killing = Box::new(c);
        self
    }

    pub fn with_domain(mut self, contains: impl Fn(VertexId) -> bool + Send + Sync + 'static) -> Self {
        self.contains = Box::new(contains);
        self
    }

    pub fn with_max_degree(mut self, d: usize) -> Self {
        self.max_degree = Some(d);
        self
    }
}

impl NeighborOracle for FnOracle {
    fn neighbors(&self, x: VertexId) -> Vec<(VertexId, f64)> {
        (self.neighbors)(x)
    }

    fn measure(&self, x: VertexId) -> f64 {
        (self.measure)(x)
    }

    fn killing(&self, x: VertexId) -> f64 {
        (self.killing)(x)
    }

    fn contains(&self, x: VertexId) -> bool {
        (self.contains)(x)
    }

    fn max_degree(&self) -> Option<usize> {
        self.max_degree
    }
}

/// A procedural graph with a cache of oracle answers.
///
/// Neighbor lists are validated (positive finite weights, no self-loops, no
/// duplicates, declared degree bound) and sorted by id the first time they are
/// requested. Concurrent fills of the same vertex write identical data.
pub struct ProceduralGraph {
    oracle: Box<dyn NeighborOracle>,
    cache: RwLock<HashMap<VertexId, Arc<[(VertexId, f64)]>>>,
}

impl ProceduralGraph {
    pub fn new(oracle: impl NeighborOracle + 'static) -> Self {
        ProceduralGraph { oracle: Box::new(oracle), cache: RwLock::new(HashMap::new()) }
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.oracle.contains(x)
    }

    fn check(&self, x: VertexId) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(x))
        }
    }

    pub fn measure(&self, x: VertexId) -> Result<f64> {
        self.check(x)?;
        let m = self.oracle.measure(x);
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Oracle { vertex: x, reason: format!("measure {m} is not positive") });
        }
        Ok(m)
    }

    pub fn killing(&self, x: VertexId) -> Result<f64> {
        self.check(x)?;
        let c = self.oracle.killing(x);
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Oracle { vertex: x, reason: format!("killing term {c} is negative") });
        }
        Ok(c)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.oracle.max_degree()
    }

    pub fn cached_vertices(&self) -> usize {
        self.cache.read().expect("cache lock poisoned").len()
    }

    pub fn neighbors(&self, x: VertexId) -> Result<Arc<[(VertexId, f64)]>> {
        if let Some(hit) = self.cache.read().expect("cache lock poisoned").get(&x) {
            return Ok(Arc::clone(hit));
        }
        self.check(x)?;
        let mut list = self.oracle.neighbors(x);
        list.sort_by_key(|&(y, _)| y);
        let oracle_err = |reason: String| Error::Oracle { vertex: x, reason };
        for pair in list.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(oracle_err(format!("neighbor {} listed twice", pair[0].0)));
            }
        }
        for &(y, w) in &list {
            if y == x {
                return Err(oracle_err("self-loop".into()));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(oracle_err(format!("weight {w} to {y} is not positive")));
            }
            if !self.oracle.contains(y) {
                return Err(oracle_err(format!("neighbor {y} outside the vertex set")));
            }
        }
        if let Some(bound) = self.oracle.max_degree() {
            if list.len() > bound {
                return Err(oracle_err(format!("{} neighbors exceed declared bound {bound}", list.len())));
            }
        }
        let list: Arc<[(VertexId, f64)]> = list.into();
        let mut cache = self.cache.write().expect("cache lock poisoned");
        Ok(Arc::clone(cache.entry(x).or_insert(list)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSource;

    #[test]
    fn cache_is_filled_once() {
        let g = ProceduralGraph::new(IntegerLine::default());
        let a = g.neighbors(VertexId(3)).unwrap();
        let b = g.neighbors(VertexId(3)).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(g.cached_vertices(), 1);
        assert_eq!(&a[..], &[(VertexId(2), 1.0), (VertexId(4), 1.0)]);
    }

    #[test]
    fn rejects_bad_oracle_answers() {
        let looped = ProceduralGraph::new(FnOracle::new(|x| vec![(x, 1.0)]));
        assert!(looped.neighbors(VertexId(0)).is_err());
        let negative = ProceduralGraph::new(FnOracle::new(|x| vec![(VertexId(x.0 + 1), -1.0)]));
        assert!(negative.neighbors(VertexId(0)).is_err());
        let crowded = ProceduralGraph::new(
            FnOracle::new(|x| (1..=3).map(|k| (VertexId(x.0 + k), 1.0)).collect()).with_max_degree(2),
        );
        assert!(crowded.neighbors(VertexId(0)).is_err());
    }

    #[test]
    fn asymmetric_oracle_fails_ball() {
        // forward edges only: 0 lists 1 but 1 does not list 0
        let g = GraphSource::from(ProceduralGraph::new(FnOracle::new(|x| vec![(VertexId(x.0 + 1), 1.0)])));
        assert!(matches!(g.ball(VertexId(0), 2), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn concurrent_fills_agree() {
        let g = Arc::new(ProceduralGraph::new(IntegerLine { weight: 0.5 }));
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let g = Arc::clone(&g);
                std::thread::spawn(move || {
                    (0..50).map(|i| g.neighbors(VertexId(i)).unwrap().to_vec()).collect::<Vec<_>>()
                })
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(g.cached_vertices(), 50);
    }
}
