//! Built-in graph families.
//!
//! Specs: `path:n`, `cycle:n`, `complete:n`, `star:n` (all with unit weights
//! and measure, `n` vertices) and
//! `random:n:p:seed[:wmin:wmax:mmin:mmax][:c]`, an Erdos-Renyi graph with
//! uniform weights in `[wmin, wmax]` (default `[0.1, 2]`), uniform measure in
//! `[mmin, mmax]` (default `[0.5, 2]`) and, with the `c` suffix, a uniform
//! killing term in `[0, 1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub fn path(n: usize) -> WeightedGraph {
    let mut b = WeightedGraph::builder(n);
    for i in 1..n {
        b = b.edge(i - 1, i, 1.0);
    }
    b.build().expect("path graph is valid")
}

/// Cycle on `n >= 3` vertices.
pub fn cycle(n: usize) -> WeightedGraph {
    assert!(n >= 3, "a cycle needs at least three vertices");
    let mut b = WeightedGraph::builder(n);
    for i in 0..n {
        b = b.edge(i, (i + 1) % n, 1.0);
    }
    b.build().expect("cycle graph is valid")
}

pub fn complete(n: usize) -> WeightedGraph {
    let mut b = WeightedGraph::builder(n);
    for i in 0..n {
        for j in i + 1..n {
            b = b.edge(i, j, 1.0);
        }
    }
    b.build().expect("complete graph is valid")
}

/// Star with center `0` and leaves `1..n`.
pub fn star(n: usize) -> WeightedGraph {
    let mut b = WeightedGraph::builder(n);
    for i in 1..n {
        b = b.edge(0, i, 1.0);
    }
    b.build().expect("star graph is valid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub weight: (f64, f64),
    pub measure: (f64, f64),
    pub killing: bool,
}

impl RandomSpec {
    pub fn new(n: usize, p: f64, seed: u64) -> Self {
        RandomSpec { n, p, seed, weight: (0.1, 2.0), measure: (0.5, 2.0), killing: false }
    }

    pub fn with_killing(mut self) -> Self {
        self.killing = true;
        self
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Deterministic for a fixed spec. Draw order: edges in `(i, j)` row order,
/// then measures, then killing terms.
pub fn random(spec: &RandomSpec) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = WeightedGraph::builder(spec.n);
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            if rng.gen::<f64>() < spec.p {
                let w = uniform(&mut rng, spec.weight);
                b = b.edge(i, j, w);
            }
        }
    }
    for x in 0..spec.n {
        let m = uniform(&mut rng, spec.measure);
        b = b.measure(x, m);
    }
    if spec.killing {
        for x in 0..spec.n {
            let c = uniform(&mut rng, (0.0, 1.0));
            b = b.killing(x, c);
        }
    }
    b.build().expect("random graph is valid")
}

/// Parses a generator spec and builds the graph.
pub fn from_spec(spec: &str) -> Result<WeightedGraph> {
    let fail = |reason: &str| Error::GeneratorSpec { spec: spec.to_string(), reason: reason.to_string() };
    let parts: Vec<&str> = spec.split(':').collect();
    let count = |s: &str| s.parse::<usize>().map_err(|_| fail("vertex count must be a non-negative integer"));
    let real = |s: &str| -> Result<f64> {
        s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| fail("expected a finite number"))
    };
    match parts.as_slice() {
        ["path", n] => Ok(path(count(n)?)),
        ["cycle", n] => {
            let n = count(n)?;
            if n < 3 {
                return Err(fail("a cycle needs at least three vertices"));
            }
            Ok(cycle(n))
        }
        ["complete", n] => Ok(complete(count(n)?)),
        ["star", n] => Ok(star(count(n)?)),
        ["random", n, p, seed, rest @ ..] => {
            let mut r = RandomSpec::new(
                count(n)?,
                real(p)?,
                seed.parse().map_err(|_| fail("seed must be a non-negative integer"))?,
            );
            if !(0.0..=1.0).contains(&r.p) {
                return Err(fail("edge probability must lie in [0, 1]"));
            }
            let rest = match rest {
                [head @ .., "c"] => {
                    r.killing = true;
                    head
                }
                other => other,
            };
            match rest {
                [] => {}
                [wmin, wmax, mmin, mmax] => {
                    r.weight = (real(wmin)?, real(wmax)?);
                    r.measure = (real(mmin)?, real(mmax)?);
                    if !(r.weight.0 > 0.0 && r.weight.0 <= r.weight.1) {
                        return Err(fail("weight range must satisfy 0 < wmin <= wmax"));
                    }
                    if !(r.measure.0 > 0.0 && r.measure.0 <= r.measure.1) {
                        return Err(fail("measure range must satisfy 0 < mmin <= mmax"));
                    }
                }
                _ => return Err(fail("expected random:n:p:seed[:wmin:wmax:mmin:mmax][:c]")),
            }
            Ok(random(&r))
        }
        _ => Err(fail("expected path:n, cycle:n, complete:n, star:n or random:n:p:seed[...]")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;

    #[test]
    fn named_families() {
        let p3 = from_spec("path:3").unwrap();
        assert_eq!((p3.len(), p3.edge_count()), (3, 2));
        let k3 = from_spec("complete:3").unwrap();
        assert_eq!(k3.edge_count(), 3);
        let s = from_spec("star:4").unwrap();
        assert_eq!(s.neighbors(VertexId(0)).unwrap().len(), 3);
        assert_eq!(from_spec("cycle:5").unwrap().edge_count(), 5);
    }

    #[test]
    fn random_is_reproducible() {
        let a = from_spec("random:10:0.4:7").unwrap();
        let b = from_spec("random:10:0.4:7").unwrap();
        assert_eq!(a, b);
        assert_ne!(a, from_spec("random:10:0.4:8").unwrap());
        assert!(a.validate().is_empty());
        for x in a.vertices() {
            let m = a.measure(x).unwrap();
            assert!((0.5..2.0).contains(&m));
            assert_eq!(a.killing(x).unwrap(), 0.0);
            for &(_, w) in a.neighbors(x).unwrap() {
                assert!((0.1..2.0).contains(&w));
            }
        }
    }

    #[test]
    fn random_options() {
        let g = from_spec("random:6:1:3:1:1:2:2:c").unwrap();
        assert_eq!(g.edge_count(), 15);
        assert!(g.vertices().all(|x| g.measure(x).unwrap() == 2.0));
        assert!(g.vertices().any(|x| g.killing(x).unwrap() > 0.0));
        assert!(from_spec("random:6:0.5:3:c").is_ok());
    }

    #[test]
    fn malformed_specs() {
        for bad in ["path", "path:x", "cycle:2", "random:5:1.5:1", "random:5:0.5", "random:5:0.5:1:1:2", "grid:3"] {
            assert!(matches!(from_spec(bad), Err(Error::GeneratorSpec { .. })), "{bad}");
        }
    }
}
