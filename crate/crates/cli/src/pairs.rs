use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use graphheat::VertexId;

/// Default cap on the number of pairs an `all` selection expands to.
pub const PAIR_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum PairSelection {
    All,
    List(Vec<(VertexId, VertexId)>),
    Sample(usize),
}

impl FromStr for PairSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "all" {
            return Ok(PairSelection::All);
        }
        if let Some(k) = s.strip_prefix("sample:") {
            return k
                .parse()
                .map(PairSelection::Sample)
                .map_err(|_| format!("sample size `{k}` is not a non-negative integer"));
        }
        let mut pairs = Vec::new();
        for item in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (x, y) = item.split_once(',').ok_or_else(|| format!("pair `{item}` is not of the form x,y"))?;
            let id = |v: &str| {
                v.trim()
                    .parse::<i64>()
                    .map(VertexId)
                    .map_err(|_| format!("vertex `{}` is not an integer", v.trim()))
            };
            pairs.push((id(x)?, id(y)?));
        }
        Ok(PairSelection::List(pairs))
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SelectionError {
    #[error("random pair sampling requires --seed")]
    SeedRequired,
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
}

fn nth_pair(n: usize, mut k: usize) -> (VertexId, VertexId) {
    for x in 0..n {
        let row = n - x - 1;
        if k < row {
            return (VertexId::from(x), VertexId::from(x + 1 + k));
        }
        k -= row;
    }
    unreachable!("pair index out of range")
}

fn sample(n: usize, k: usize, seed: u64) -> Vec<(VertexId, VertexId)> {
    let total = n * n.saturating_sub(1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = index::sample(&mut rng, total, k.min(total)).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| nth_pair(n, i)).collect()
}

/// Expands a selection for a graph on `n` vertices. `all` means every
/// unordered pair `x < y`; beyond `cap` pairs a seeded sample is drawn
/// instead (seed 0 when none is given). Output is sorted by `(x, y)`.
pub fn resolve(
    sel: &PairSelection,
    n: usize,
    seed: Option<u64>,
    cap: usize,
) -> Result<(Vec<(VertexId, VertexId)>, bool), SelectionError> {
    match sel {
        PairSelection::All => {
            let total = n * n.saturating_sub(1) / 2;
            if total > cap {
                Ok((sample(n, cap, seed.unwrap_or(0)), true))
            } else {
                Ok(((0..total).map(|i| nth_pair(n, i)).collect(), false))
            }
        }
        PairSelection::Sample(k) => {
            let seed = seed.ok_or(SelectionError::SeedRequired)?;
            Ok((sample(n, *k, seed), false))
        }
        PairSelection::List(pairs) => {
            for &(x, y) in pairs {
                for v in [x, y] {
                    if v.0 < 0 || v.index() >= n {
                        return Err(SelectionError::UnknownVertex(v));
                    }
                }
            }
            let mut pairs = pairs.clone();
            pairs.sort_unstable();
            Ok((pairs, false))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: i64) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn parse_selections() {
        assert_eq!("all".parse::<PairSelection>().unwrap(), PairSelection::All);
        assert_eq!("sample:7".parse::<PairSelection>().unwrap(), PairSelection::Sample(7));
        assert_eq!(
            "0,1; 2,3".parse::<PairSelection>().unwrap(),
            PairSelection::List(vec![(v(0), v(1)), (v(2), v(3))])
        );
        assert_eq!("".parse::<PairSelection>().unwrap(), PairSelection::List(vec![]));
        assert!("0-1".parse::<PairSelection>().is_err());
        assert!("sample:x".parse::<PairSelection>().is_err());
    }

    #[test]
    fn all_pairs_in_order() {
        let (pairs, capped) = resolve(&PairSelection::All, 3, None, PAIR_CAP).unwrap();
        assert_eq!(pairs, vec![(v(0), v(1)), (v(0), v(2)), (v(1), v(2))]);
        assert!(!capped);
    }

    #[test]
    fn cap_samples_deterministically() {
        let (a, capped) = resolve(&PairSelection::All, 10, None, 5).unwrap();
        assert!(capped);
        assert_eq!(a.len(), 5);
        assert_eq!(a, resolve(&PairSelection::All, 10, None, 5).unwrap().0);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(a.iter().all(|(x, y)| x < y));
    }

    #[test]
    fn sampling_needs_a_seed() {
        assert_eq!(resolve(&PairSelection::Sample(3), 5, None, PAIR_CAP), Err(SelectionError::SeedRequired));
        let (a, _) = resolve(&PairSelection::Sample(3), 5, Some(1), PAIR_CAP).unwrap();
        assert_eq!(a, resolve(&PairSelection::Sample(3), 5, Some(1), PAIR_CAP).unwrap().0);
        assert_eq!(a.len(), 3);
        assert_eq!(resolve(&PairSelection::Sample(100), 5, Some(1), PAIR_CAP).unwrap().0.len(), 10);
    }

    #[test]
    fn unknown_vertices_rejected() {
        let sel = PairSelection::List(vec![(v(0), v(9))]);
        assert_eq!(resolve(&sel, 3, None, PAIR_CAP), Err(SelectionError::UnknownVertex(v(9))));
    }
}
