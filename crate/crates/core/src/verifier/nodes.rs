//! Node placements with separation fixed by construction.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::Separation;
use crate::error::{Error, Result};
use crate::trigpoly::NodeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Equispaced,
    Clustered,
    RandomSeparated,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [
        StrategyKind::Equispaced,
        StrategyKind::Clustered,
        StrategyKind::RandomSeparated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Equispaced => "equispaced",
            StrategyKind::Clustered => "clustered",
            StrategyKind::RandomSeparated => "random-separated",
        }
    }

    /// Random parameters sized for degree `n`.
    ///
    /// Equispaced uses `r ∈ [2, 4N]`; clustered uses `c ∈ [1, 2N]` pairs at gap
    /// `jπ/(16c)`, `j ∈ [1, 16]`; random-separated draws `2..=4N` points on
    /// the grid `kπ/(8N)`.
    pub fn sample<R: Rng>(self, n: u32, rng: &mut R) -> NodeStrategy {
        let n = n.max(1) as usize;
        match self {
            StrategyKind::Equispaced => NodeStrategy::Equispaced {
                r: rng.random_range(2..=4 * n),
            },
            StrategyKind::Clustered => {
                let pairs = rng.random_range(1..=2 * n) as i64;
                let j = rng.random_range(1..=16i64);
                NodeStrategy::Clustered {
                    pairs: pairs as usize,
                    gap: Ratio::new(j, 16 * pairs),
                }
            }
            StrategyKind::RandomSeparated => {
                let grid = 8 * n;
                NodeStrategy::RandomSeparated {
                    r: rng.random_range(2..=4 * n),
                    grid,
                }
            }
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "equispaced" => Ok(StrategyKind::Equispaced),
            "clustered" => Ok(StrategyKind::Clustered),
            "random-separated" | "random" => Ok(StrategyKind::RandomSeparated),
            other => Err(Error::Validation(format!("unknown node strategy '{other}'"))),
        }
    }
}

/// Concrete node placement. Text form: `equispaced:R`, `clustered:C:GAP`
/// (GAP a π literal such as `pi/16`), `random-separated:R:GRID`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NodeStrategy {
    /// `r` nodes `π(2j + 2 - r)/r`.
    Equispaced { r: usize },
    /// Pairs `L_i = π(-1 + (2i+1)/c)` and `L_i + gap·π`, with `gap ≤ 1/c`, so
    /// the separation is exactly `gap·π`.
    Clustered { pairs: usize, gap: Ratio<i64> },
    /// `r` distinct grid points `kπ/grid`, `k ∈ (-grid, grid]`.
    RandomSeparated { r: usize, grid: usize },
}

impl NodeStrategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            NodeStrategy::Equispaced { .. } => StrategyKind::Equispaced,
            NodeStrategy::Clustered { .. } => StrategyKind::Clustered,
            NodeStrategy::RandomSeparated { .. } => StrategyKind::RandomSeparated,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NodeStrategy::Equispaced { r } if r < 2 => {
                Err(Error::Validation("equispaced strategy needs r ≥ 2".into()))
            }
            NodeStrategy::Clustered { pairs, gap } => {
                if pairs == 0 {
                    return Err(Error::Validation("clustered strategy needs at least one pair".into()));
                }
                let zero = Ratio::from_integer(0);
                if gap <= zero || gap > Ratio::new(1, pairs as i64) {
                    return Err(Error::Validation(format!(
                        "cluster gap {gap}·π must lie in (0, π/{pairs}]"
                    )));
                }
                Ok(())
            }
            NodeStrategy::RandomSeparated { r, grid } => {
                if r < 2 || r > 2 * grid {
                    return Err(Error::Validation(format!(
                        "random-separated needs 2 ≤ r ≤ 2·grid, got r={r}, grid={grid}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Builds the node set; only random-separated consumes randomness.
    pub fn nodes<R: Rng>(&self, rng: &mut R) -> Result<NodeSet> {
        self.validate()?;
        match *self {
            NodeStrategy::Equispaced { r } => NodeSet::equispaced(r),
            NodeStrategy::Clustered { pairs, gap } => {
                let c = pairs as i64;
                let mut fr = Vec::with_capacity(2 * pairs);
                for i in 0..c {
                    let left = Ratio::new(2 * i + 1 - c, c);
                    fr.push(left);
                    fr.push(left + gap);
                }
                NodeSet::from_pi_rationals(fr)
            }
            NodeStrategy::RandomSeparated { r, grid } => {
                let g = grid as i64;
                let mut ks: Vec<i64> = index::sample(rng, 2 * grid, r)
                    .into_iter()
                    .map(|i| i as i64 - g + 1)
                    .collect();
                ks.sort_unstable();
                NodeSet::from_pi_rationals(ks.into_iter().map(|k| Ratio::new(k, g)).collect())
            }
        }
    }

    /// Separation fixed by the construction; `None` for random placements.
    pub fn separation(&self) -> Option<Result<Separation>> {
        match *self {
            NodeStrategy::Equispaced { r } => Some(Separation::pi_fraction(2, r as i64)),
            NodeStrategy::Clustered { gap, .. } => Some(Separation::pi_multiple(gap)),
            NodeStrategy::RandomSeparated { .. } => None,
        }
    }
}

impl fmt::Display for NodeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NodeStrategy::Equispaced { r } => write!(f, "equispaced:{r}"),
            NodeStrategy::Clustered { pairs, gap } => match Separation::pi_multiple(gap) {
                Ok(sep) => write!(f, "clustered:{pairs}:{sep}"),
                Err(_) => write!(f, "clustered:{pairs}:{gap}pi"),
            },
            NodeStrategy::RandomSeparated { r, grid } => write!(f, "random-separated:{r}:{grid}"),
        }
    }
}

impl FromStr for NodeStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let int = |t: &str| -> Result<usize> {
            t.trim()
                .parse()
                .map_err(|_| Error::Validation(format!("expected a non-negative integer, got '{t}'")))
        };
        let strategy = match (parts[0].parse::<StrategyKind>()?, parts.len()) {
            (StrategyKind::Equispaced, 2) => NodeStrategy::Equispaced { r: int(parts[1])? },
            (StrategyKind::Clustered, 3) => {
                let sep: Separation = parts[2].parse()?;
                let gap = sep.pi_rational().ok_or_else(|| {
                    Error::Validation("cluster gap must be a π literal such as pi/16".into())
                })?;
                NodeStrategy::Clustered {
                    pairs: int(parts[1])?,
                    gap,
                }
            }
            (StrategyKind::RandomSeparated, 3) => NodeStrategy::RandomSeparated {
                r: int(parts[1])?,
                grid: int(parts[2])?,
            },
            _ => {
                return Err(Error::Validation(format!(
                    "malformed node strategy '{s}'; expected equispaced:R, clustered:C:GAP or random-separated:R:GRID"
                )))
            }
        };
        strategy.validate()?;
        Ok(strategy)
    }
}

impl TryFrom<String> for NodeStrategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NodeStrategy> for String {
    fn from(s: NodeStrategy) -> Self {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clustered_separation_is_the_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for pairs in 1..6usize {
            for j in 1..=4i64 {
                let gap = Ratio::new(j, 4 * pairs as i64);
                let nodes = NodeStrategy::Clustered { pairs, gap }.nodes(&mut rng).unwrap();
                assert_eq!(nodes.len(), 2 * pairs);
                assert_eq!(nodes.separation().pi_rational(), Some(gap));
            }
        }
    }

    #[test]
    fn equispaced_separation() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let nodes = NodeStrategy::Equispaced { r: 12 }.nodes(&mut rng).unwrap();
        assert_eq!(nodes.separation().pi_rational(), Some(Ratio::new(1, 6)));
    }

    #[test]
    fn random_separated_is_seeded() {
        let s = NodeStrategy::RandomSeparated { r: 9, grid: 32 };
        let a = s.nodes(&mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = s.nodes(&mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 9);
        let d = a.separation().pi_rational().unwrap();
        assert!(d >= Ratio::new(1, 32));
    }

    #[test]
    fn text_round_trip() {
        for text in ["equispaced:7", "clustered:3:pi/12", "random-separated:5:40"] {
            let s: NodeStrategy = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert!("clustered:3:pi/2".parse::<NodeStrategy>().is_err());
        assert!("equispaced:0".parse::<NodeStrategy>().is_err());
        assert!("spiral:3".parse::<NodeStrategy>().is_err());
    }

    #[test]
    fn sampled_strategies_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..10 {
            for kind in StrategyKind::ALL {
                let s = kind.sample(n, &mut rng);
                assert_eq!(s.kind(), kind);
                s.nodes(&mut rng).unwrap();
            }
        }
    }
}
