//! Checks whether a point configuration represents a metric space in one of
//! several senses, from full order preservation down to keeping the nearest
//! neighbour.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::space::{EdgeOrder, MetricSpace, PointConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepresentationKind {
    /// Every comparison of two pairs is preserved.
    Order,
    /// Comparisons of pairs sharing a point are preserved.
    LocalOrder,
    /// Nearest and farthest neighbours are preserved.
    ExtremalNeighbours,
    Nearest,
    Farthest,
    /// The set of the two nearest neighbours of each point is preserved.
    TwoNearestSet,
    /// Nearest and second-nearest neighbour are both preserved.
    FirstAndSecondNearest,
}

impl RepresentationKind {
    pub const ALL: [RepresentationKind; 7] = [
        RepresentationKind::Order,
        RepresentationKind::LocalOrder,
        RepresentationKind::ExtremalNeighbours,
        RepresentationKind::Nearest,
        RepresentationKind::Farthest,
        RepresentationKind::TwoNearestSet,
        RepresentationKind::FirstAndSecondNearest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RepresentationKind::Order => "order",
            RepresentationKind::LocalOrder => "local-order",
            RepresentationKind::ExtremalNeighbours => "extremal",
            RepresentationKind::Nearest => "nearest",
            RepresentationKind::Farthest => "farthest",
            RepresentationKind::TwoNearestSet => "two-nearest-set",
            RepresentationKind::FirstAndSecondNearest => "first-second-nearest",
        }
    }
}

impl fmt::Display for RepresentationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RepresentationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RepresentationKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown representation kind {s:?}")))
    }
}

/// Whether `config` represents `space` in the sense of `kind`.
///
/// Order and LocalOrder require the relevant image distances to be distinct
/// and fail with [`Error::Ties`] otherwise. The neighbour kinds treat a tied
/// image neighbour as not preserved.
pub fn check_representation(space: &MetricSpace, config: &PointConfig, kind: RepresentationKind) -> Result<bool> {
    if space.n() != config.n() {
        return Err(Error::SizeMismatch { expected: space.n(), got: config.n() });
    }
    let n = space.n();
    match kind {
        RepresentationKind::Order => Ok(EdgeOrder::from_config(config)? == EdgeOrder::from_space(space)),
        RepresentationKind::LocalOrder => {
            for x in 0..n {
                let (ys, tied) = sorted_from(n, x, |y| config.distance_key(x, y));
                if let Some(i) = tied.iter().position(|&t| t) {
                    let (a, b) = (ys[i], ys[i + 1]);
                    return Err(Error::Ties((x.min(a), x.max(a)), (x.min(b), x.max(b))));
                }
            }
            for x in 0..n {
                for y in 0..n {
                    for z in y + 1..n {
                        if y == x || z == x {
                            continue;
                        }
                        let s = space.d(x, y) < space.d(x, z);
                        let c = config.distance_key(x, y) < config.distance_key(x, z);
                        if s != c {
                            return Ok(false);
                        }
                    }
                }
            }
            Ok(true)
        }
        RepresentationKind::Nearest => Ok(ranks_preserved(space, config, &[Rank::First])),
        RepresentationKind::Farthest => Ok(ranks_preserved(space, config, &[Rank::Last])),
        RepresentationKind::ExtremalNeighbours => Ok(ranks_preserved(space, config, &[Rank::First, Rank::Last])),
        RepresentationKind::FirstAndSecondNearest => {
            Ok(ranks_preserved(space, config, &[Rank::First, Rank::Second]))
        }
        RepresentationKind::TwoNearestSet => Ok(two_nearest_preserved(space, config)),
    }
}

#[derive(Clone, Copy)]
enum Rank {
    First,
    Second,
    Last,
}

/// Other points sorted by distance from `x` with a flag marking positions
/// whose value ties with a neighbour.
fn sorted_from(n: usize, x: usize, key: impl Fn(usize) -> f64) -> (Vec<usize>, Vec<bool>) {
    let mut ys: Vec<usize> = (0..n).filter(|&y| y != x).collect();
    ys.sort_by(|&a, &b| key(a).total_cmp(&key(b)));
    let mut tied = vec![false; ys.len()];
    for i in 1..ys.len() {
        if key(ys[i - 1]) == key(ys[i]) {
            tied[i - 1] = true;
            tied[i] = true;
        }
    }
    (ys, tied)
}

fn ranks_preserved(space: &MetricSpace, config: &PointConfig, ranks: &[Rank]) -> bool {
    let n = space.n();
    for x in 0..n {
        let (s, _) = sorted_from(n, x, |y| space.d(x, y));
        let (c, tied) = sorted_from(n, x, |y| config.distance_key(x, y));
        for &r in ranks {
            let pos = match r {
                Rank::First => 0,
                Rank::Second => 1,
                Rank::Last => n - 2,
            };
            if pos >= s.len() {
                continue;
            }
            if tied[pos] || s[pos] != c[pos] {
                return false;
            }
        }
    }
    true
}

fn two_nearest_preserved(space: &MetricSpace, config: &PointConfig) -> bool {
    let n = space.n();
    for x in 0..n {
        let (s, _) = sorted_from(n, x, |y| space.d(x, y));
        let (c, _) = sorted_from(n, x, |y| config.distance_key(x, y));
        let k = 2.min(s.len());
        if k < s.len() && config.distance_key(x, c[k - 1]) == config.distance_key(x, c[k]) {
            return false;
        }
        let mut a = s[..k].to_vec();
        let mut b = c[..k].to_vec();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Metric;
    use RepresentationKind::*;

    fn cfg(points: &[(f64, f64)]) -> PointConfig {
        PointConfig::from_points(&points.iter().map(|p| vec![p.0, p.1]).collect::<Vec<_>>(), Metric::Euclidean)
            .unwrap()
    }

    #[test]
    fn isometric_copy_passes_every_kind() {
        let c = cfg(&[(0.0, 0.0), (1.0, 0.2), (3.1, 0.7), (0.4, 2.9), (2.2, 2.0)]);
        let s = MetricSpace::from_config(&c).unwrap();
        for k in RepresentationKind::ALL {
            assert!(check_representation(&s, &c, k).unwrap(), "{k}");
        }
    }

    #[test]
    fn swapping_the_two_shortest_pairs() {
        // {0,1} = 1.0 and {2,3} = 1.2 are the two shortest pairs and share no point
        let c = cfg(&[(0.0, 0.0), (1.0, 0.0), (5.0, 3.0), (5.0, 4.2)]);
        let s = MetricSpace::from_config(&c).unwrap();
        let moved = cfg(&[(0.0, 0.0), (1.3, 0.0), (5.0, 3.0), (5.0, 4.2)]);
        let o = EdgeOrder::from_space(&s);
        let m = EdgeOrder::from_config(&moved).unwrap();
        assert_eq!(crate::accuracy::discordant_pairs(&o, &m).unwrap(), 1);
        assert!(!check_representation(&s, &moved, Order).unwrap());
        assert!(check_representation(&s, &moved, LocalOrder).unwrap());
    }

    #[test]
    fn tied_nearest_is_not_preserved() {
        let s = MetricSpace::from_config(&cfg(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.5)])).unwrap();
        let tied = cfg(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        assert!(!check_representation(&s, &tied, Nearest).unwrap());
        assert!(check_representation(&s, &tied, Order).is_err());
    }

    #[test]
    fn size_mismatch() {
        let s = MetricSpace::from_config(&cfg(&[(0.0, 0.0), (1.0, 0.0)])).unwrap();
        let c = cfg(&[(0.0, 0.0), (1.0, 0.0), (0.0, 3.0)]);
        assert!(check_representation(&s, &c, Order).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in RepresentationKind::ALL {
            assert_eq!(k.name().parse::<RepresentationKind>().unwrap(), k);
        }
    }
}
