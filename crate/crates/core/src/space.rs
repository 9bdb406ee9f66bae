//! Finite metric spaces, point configurations and the linear order they
//! induce on unordered pairs of points.
//!
//! Pairs `{i, j}` with `i < j` are indexed lexicographically:
//! `(0,1), (0,2), …, (0,n-1), (1,2), …`.

use std::cmp::Ordering;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Number of unordered pairs of `n` points.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic index of the pair `{i, j}`; the arguments may come in any order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// All pairs of `n` points in index order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// How `MetricSpace::new` deals with tied off-diagonal distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiePolicy {
    Reject,
    Perturb,
}

/// A finite symmetric distance matrix with positive, pairwise distinct
/// off-diagonal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    n: usize,
    dist: Vec<f64>,
    triangle_ok: bool,
}

impl MetricSpace {
    /// Validates `matrix` and builds a space from it.
    ///
    /// Under [`TiePolicy::Perturb`] the `k`-th entry (counting from zero, upper
    /// triangle in row-major order) of every group of equal values is raised by
    /// `k·ε` with `ε = gap / (2·C(n,2))`, where `gap` is the smallest nonzero
    /// difference between distinct off-diagonal values (or the smallest value
    /// when all entries are equal). Every strict comparison survives.
    pub fn new(matrix: &[Vec<f64>], policy: TiePolicy) -> Result<Self> {
        let n = matrix.len();
        if n < 2 {
            return Err(Error::TooFewPoints { min: 2, got: n });
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), n });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = matrix[i][j];
                if !v.is_finite() {
                    return Err(Error::NonFinite(i, j));
                }
                if v < 0.0 {
                    return Err(Error::Negative(i, j));
                }
            }
            if matrix[i][i] != 0.0 {
                return Err(Error::NonZeroDiagonal(i));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::Asymmetric(i, j));
                }
                if matrix[i][j] == 0.0 {
                    return Err(Error::ZeroDistance(i, j));
                }
            }
        }

        let mut upper: Vec<f64> = pairs(n).iter().map(|&(i, j)| matrix[i][j]).collect();
        match policy {
            TiePolicy::Reject => {
                if let Some((p, q)) = first_tie(&upper) {
                    let all = pairs(n);
                    return Err(Error::Ties(all[p], all[q]));
                }
            }
            TiePolicy::Perturb => {
                perturb_ties(&mut upper);
                if let Some((p, q)) = first_tie(&upper) {
                    let all = pairs(n);
                    return Err(Error::Ties(all[p], all[q]));
                }
            }
        }

        let mut dist = vec![0.0; n * n];
        for (idx, &(i, j)) in pairs(n).iter().enumerate() {
            dist[i * n + j] = upper[idx];
            dist[j * n + i] = upper[idx];
        }
        let triangle_ok = triangle_check(n, &dist);
        Ok(MetricSpace { n, dist, triangle_ok })
    }

    /// The space induced by a point configuration; fails on tied distances.
    pub fn from_config(config: &PointConfig) -> Result<Self> {
        let n = config.n();
        let matrix: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { config.distance(i, j) }).collect())
            .collect();
        MetricSpace::new(&matrix, TiePolicy::Reject)
    }

    /// A space realizing `order`, with all distances in `(1, 2)` so that the
    /// triangle inequality holds.
    pub fn from_order(order: &EdgeOrder) -> Self {
        let n = order.n();
        let m = order.len() as f64;
        let mut dist = vec![0.0; n * n];
        for (idx, &(i, j)) in pairs(n).iter().enumerate() {
            let d = 1.0 + (order.ranking()[idx] as f64 + 1.0) / (m + 1.0);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
        MetricSpace { n, dist, triangle_ok: true }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Whether the triangle inequality holds for every triple (within a
    /// relative tolerance of 1e-12).
    pub fn triangle_ok(&self) -> bool {
        self.triangle_ok
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.dist[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    /// Off-diagonal distances in pair-index order.
    pub fn pair_distances(&self) -> Vec<f64> {
        pairs(self.n).iter().map(|&(i, j)| self.d(i, j)).collect()
    }
}

fn first_tie(values: &[f64]) -> Option<(usize, usize)> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx.windows(2)
        .find(|w| values[w[0]] == values[w[1]])
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

fn perturb_ties(values: &mut [f64]) {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let gap = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let gap = if gap.is_finite() { gap } else { sorted[0] };
    let eps = gap / (2.0 * values.len() as f64);
    let original = values.to_vec();
    for (idx, v) in values.iter_mut().enumerate() {
        let k = original[..idx].iter().filter(|&&u| u == original[idx]).count();
        *v += k as f64 * eps;
    }
}

fn triangle_check(n: usize, dist: &[f64]) -> bool {
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x == y || y == z || x == z {
                    continue;
                }
                let lhs = dist[x * n + y] + dist[y * n + z];
                let rhs = dist[x * n + z];
                if lhs < rhs * (1.0 - 1e-12) {
                    return false;
                }
            }
        }
    }
    true
}

/// Metric on the image space of a point configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    /// L1 distance; only allowed in the plane.
    Manhattan,
}

/// `n` points in `R^m` together with the metric used to measure them.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    n: usize,
    m: usize,
    coords: Vec<f64>,
    metric: Metric,
}

impl PointConfig {
    /// `coords` is row-major, `n·m` values.
    pub fn new(n: usize, m: usize, coords: Vec<f64>, metric: Metric) -> Result<Self> {
        if n < 1 {
            return Err(Error::TooFewPoints { min: 1, got: n });
        }
        if m < 1 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if coords.len() != n * m {
            return Err(Error::SizeMismatch { expected: n * m, got: coords.len() });
        }
        if metric == Metric::Manhattan && m != 2 {
            return Err(Error::InvalidParameter("Manhattan metric requires m = 2".into()));
        }
        if let Some(k) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(k / m, k % m));
        }
        Ok(PointConfig { n, m, coords, metric })
    }

    pub fn from_points(points: &[Vec<f64>], metric: Metric) -> Result<Self> {
        let n = points.len();
        let m = points.first().map_or(0, Vec::len);
        if let Some(p) = points.iter().find(|p| p.len() != m) {
            return Err(Error::SizeMismatch { expected: m, got: p.len() });
        }
        PointConfig::new(n, m, points.concat(), metric)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.m..(i + 1) * self.m]
    }

    pub fn point_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.m..(i + 1) * self.m]
    }

    /// A monotone proxy for the distance: squared length for the Euclidean
    /// metric, the distance itself for L1. Order comparisons use this.
    #[inline]
    pub fn distance_key(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.point(i), self.point(j));
        match self.metric {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match self.metric {
            Metric::Euclidean => self.distance_key(i, j).sqrt(),
            Metric::Manhattan => self.distance_key(i, j),
        }
    }

    /// Distance keys in pair-index order.
    pub fn pair_keys(&self) -> Vec<f64> {
        pairs(self.n).iter().map(|&(i, j)| self.distance_key(i, j)).collect()
    }
}

/// A strict linear order on the pairs of `{0, …, n-1}`; rank 0 is the
/// shortest pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeOrder {
    n: usize,
    ranking: Vec<usize>,
    sequence: Vec<usize>,
}

impl EdgeOrder {
    /// `ranking[p]` is the rank of pair index `p`.
    pub fn from_ranking(n: usize, ranking: Vec<usize>) -> Result<Self> {
        let m = pair_count(n);
        if ranking.len() != m {
            return Err(Error::SizeMismatch { expected: m, got: ranking.len() });
        }
        let mut sequence = vec![usize::MAX; m];
        for (p, &r) in ranking.iter().enumerate() {
            if r >= m || sequence[r] != usize::MAX {
                return Err(Error::InvalidParameter("ranking is not a bijection".into()));
            }
            sequence[r] = p;
        }
        Ok(EdgeOrder { n, ranking, sequence })
    }

    /// `sequence[r]` is the pair index holding rank `r`.
    pub fn from_sequence(n: usize, sequence: Vec<usize>) -> Result<Self> {
        let m = pair_count(n);
        if sequence.len() != m {
            return Err(Error::SizeMismatch { expected: m, got: sequence.len() });
        }
        let mut ranking = vec![usize::MAX; m];
        for (r, &p) in sequence.iter().enumerate() {
            if p >= m || ranking[p] != usize::MAX {
                return Err(Error::InvalidParameter("sequence is not a permutation".into()));
            }
            ranking[p] = r;
        }
        Ok(EdgeOrder { n, ranking, sequence })
    }

    /// Orders pairs by the given keys (pair-index order); equal keys are an error.
    pub fn from_keys(n: usize, keys: &[f64]) -> Result<Self> {
        let mut seq: Vec<usize> = (0..keys.len()).collect();
        seq.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
        if let Some(w) = seq.windows(2).find(|w| keys[w[0]] == keys[w[1]]) {
            let all = pairs(n);
            return Err(Error::Ties(all[w[0].min(w[1])], all[w[0].max(w[1])]));
        }
        EdgeOrder::from_sequence(n, seq)
    }

    pub fn from_space(space: &MetricSpace) -> Self {
        EdgeOrder::from_keys(space.n(), &space.pair_distances())
            .expect("metric spaces have distinct distances")
    }

    /// Fails when the configuration induces tied distances.
    pub fn from_config(config: &PointConfig) -> Result<Self> {
        EdgeOrder::from_keys(config.n(), &config.pair_keys())
    }

    /// A uniformly random order on the pairs of `n` points.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut seq: Vec<usize> = (0..pair_count(n)).collect();
        seq.shuffle(rng);
        EdgeOrder::from_sequence(n, seq).expect("shuffle is a permutation")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of pairs, `C(n,2)`.
    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.ranking[pair_index(self.n, i, j)]
    }

    /// Compares `{a, b}` with `{c, d}`.
    pub fn cmp_pairs(&self, a: usize, b: usize, c: usize, d: usize) -> Ordering {
        self.rank(a, b).cmp(&self.rank(c, d))
    }

    pub fn reversed(&self) -> Self {
        let mut seq = self.sequence.clone();
        seq.reverse();
        EdgeOrder::from_sequence(self.n, seq).expect("reversal is a permutation")
    }
}

impl fmt::Display for EdgeOrder {
    /// Space-separated `i-j` tokens in ascending order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let all = pairs(self.n);
        for (r, &p) in self.sequence.iter().enumerate() {
            if r > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}-{}", all[p].0, all[p].1)?;
        }
        Ok(())
    }
}

/// Nearest and farthest neighbour of every point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighbourMaps {
    pub nn: Vec<usize>,
    pub fn_: Vec<usize>,
}

pub fn neighbour_maps(space: &MetricSpace) -> NeighbourMaps {
    let n = space.n();
    let mut nn = vec![0; n];
    let mut fn_ = vec![0; n];
    for x in 0..n {
        let others = (0..n).filter(|&y| y != x);
        nn[x] = others.clone().min_by(|&a, &b| space.d(x, a).total_cmp(&space.d(x, b))).unwrap();
        fn_[x] = others.max_by(|&a, &b| space.d(x, a).total_cmp(&space.d(x, b))).unwrap();
    }
    NeighbourMaps { nn, fn_ }
}

/// Neighbour maps read off an edge order.
pub fn order_neighbour_maps(order: &EdgeOrder) -> NeighbourMaps {
    let n = order.n();
    let mut nn = vec![0; n];
    let mut fn_ = vec![0; n];
    for x in 0..n {
        let others = (0..n).filter(|&y| y != x);
        nn[x] = others.clone().min_by_key(|&y| order.rank(x, y)).unwrap();
        fn_[x] = others.max_by_key(|&y| order.rank(x, y)).unwrap();
    }
    NeighbourMaps { nn, fn_ }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(points: &[(f64, f64)]) -> Vec<Vec<f64>> {
        points
            .iter()
            .map(|a| points.iter().map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()).collect())
            .collect()
    }

    #[test]
    fn pair_index_is_lexicographic() {
        let n = 6;
        for (k, &(i, j)) in pairs(n).iter().enumerate() {
            assert_eq!(pair_index(n, i, j), k);
            assert_eq!(pair_index(n, j, i), k);
        }
    }

    #[test]
    fn smallest_space() {
        let s = MetricSpace::new(&[vec![0.0, 1.0], vec![1.0, 0.0]], TiePolicy::Reject).unwrap();
        assert_eq!(s.n(), 2);
        assert!(s.triangle_ok());
    }

    #[test]
    fn rejects_ties() {
        let m = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 2.0], vec![1.0, 2.0, 0.0]];
        assert!(matches!(MetricSpace::new(&m, TiePolicy::Reject), Err(Error::Ties(..))));
    }

    #[test]
    fn rejects_malformed() {
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert_eq!(MetricSpace::new(&asym, TiePolicy::Reject), Err(Error::Asymmetric(0, 1)));
        let neg = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        assert!(matches!(MetricSpace::new(&neg, TiePolicy::Reject), Err(Error::Negative(..))));
        let zero = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert_eq!(MetricSpace::new(&zero, TiePolicy::Reject), Err(Error::ZeroDistance(0, 1)));
        let single = vec![vec![0.0]];
        assert!(matches!(MetricSpace::new(&single, TiePolicy::Reject), Err(Error::TooFewPoints { .. })));
        let ragged = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(MetricSpace::new(&ragged, TiePolicy::Reject), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn perturbation_breaks_ties_and_keeps_strict_order() {
        let m = vec![
            vec![0.0, 1.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![1.0, 1.0, 0.0, 2.5],
            vec![3.0, 2.0, 2.5, 0.0],
        ];
        let s = MetricSpace::new(&m, TiePolicy::Perturb).unwrap();
        // first tied entry is untouched, later ones grow in row-major order
        assert_eq!(s.d(0, 1), 1.0);
        assert!(s.d(0, 1) < s.d(0, 2) && s.d(0, 2) < s.d(1, 2));
        assert!(s.d(1, 2) < s.d(1, 3));
        let order = EdgeOrder::from_space(&s);
        assert_eq!(order.rank(2, 3), 4);
    }

    #[test]
    fn four_points_distances() {
        // (0,0),(1,0),(5,0),(2,7): 1, 5, √53, 4, √50, √58, all distinct
        let s = MetricSpace::new(&euclid(&[(0.0, 0.0), (1.0, 0.0), (5.0, 0.0), (2.0, 7.0)]), TiePolicy::Reject)
            .unwrap();
        assert!(s.triangle_ok());
        let d = s.pair_distances();
        let expect = [1.0, 5.0, 53f64.sqrt(), 4.0, 50f64.sqrt(), 58f64.sqrt()];
        for (a, b) in d.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn detects_triangle_violation() {
        let m = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 2.0], vec![5.0, 2.0, 0.0]];
        let s = MetricSpace::new(&m, TiePolicy::Reject).unwrap();
        assert!(!s.triangle_ok());
    }

    #[test]
    fn collinear_order() {
        let c = PointConfig::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]], Metric::Euclidean)
            .unwrap();
        let o = EdgeOrder::from_config(&c).unwrap();
        // {0,1} < {1,2} < {0,2}
        assert_eq!(o.sequence(), &[0, 2, 1]);
        assert_eq!(o.to_string(), "0-1 1-2 0-2");
    }

    #[test]
    fn degenerate_config_is_an_error() {
        let c = PointConfig::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]], Metric::Euclidean)
            .unwrap();
        assert!(matches!(EdgeOrder::from_config(&c), Err(Error::Ties(..))));
    }

    #[test]
    fn order_invariant_under_monotone_relabel() {
        let m = euclid(&[(0.0, 0.0), (1.0, 0.0), (5.0, 0.0), (2.0, 7.0)]);
        let s = MetricSpace::new(&m, TiePolicy::Reject).unwrap();
        let warped: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&v| v.powi(3) + v.exp() - 1.0).collect()).collect();
        let t = MetricSpace::new(&warped, TiePolicy::Reject).unwrap();
        assert_eq!(EdgeOrder::from_space(&s), EdgeOrder::from_space(&t));
    }

    #[test]
    fn neighbour_maps_small() {
        let two = MetricSpace::new(&[vec![0.0, 1.0], vec![1.0, 0.0]], TiePolicy::Reject).unwrap();
        let nm = neighbour_maps(&two);
        assert_eq!(nm.nn, vec![1, 0]);
        assert_eq!(nm.fn_, nm.nn);

        let line = MetricSpace::new(&euclid(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]), TiePolicy::Reject).unwrap();
        let nm = neighbour_maps(&line);
        assert_eq!(nm.nn, vec![1, 0, 1]);
        assert_eq!(nm.fn_, vec![2, 2, 0]);
        assert_eq!(order_neighbour_maps(&EdgeOrder::from_space(&line)), nm);
    }

    #[test]
    fn manhattan_needs_plane() {
        assert!(PointConfig::new(1, 3, vec![0.0; 3], Metric::Manhattan).is_err());
        assert!(PointConfig::new(2, 2, vec![0.0, 0.0, f64::NAN, 1.0], Metric::Euclidean).is_err());
    }
}
