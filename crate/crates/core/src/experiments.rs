//! Random sampling, order coverage and the binomial confidence bound.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::represent::RepresentationKind;
use crate::space::{order_neighbour_maps, pair_count, EdgeOrder, Metric, PointConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleDomain {
    UnitSquare,
    /// the unit cube of the given dimension
    UnitCube(usize),
}

impl SampleDomain {
    pub fn dim(self) -> usize {
        match self {
            SampleDomain::UnitSquare => 2,
            SampleDomain::UnitCube(d) => d,
        }
    }
}

const SAMPLE_RETRIES: usize = 100;

/// `n` independent uniform points of `domain`, redrawn if two induced
/// distances tie.
pub fn sample_config(n: usize, domain: SampleDomain, metric: Metric, seed: u64) -> Result<PointConfig> {
    if n < 2 {
        return Err(Error::TooFewPoints { min: 2, got: n });
    }
    let m = domain.dim();
    if m == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLE_RETRIES {
        let coords: Vec<f64> = (0..n * m).map(|_| rng.gen::<f64>()).collect();
        let config = PointConfig::new(n, m, coords, metric)?;
        if EdgeOrder::from_config(&config).is_ok() {
            return Ok(config);
        }
    }
    Err(Error::RetriesExhausted(format!("{SAMPLE_RETRIES} samples of {n} points all had tied distances")))
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Lehmer rank of an order's ranking vector among all `C(n,2)!` orders.
pub fn order_rank(order: &EdgeOrder) -> u64 {
    let r = order.ranking();
    let m = r.len();
    let mut rank = 0;
    for i in 0..m {
        let smaller = r[i + 1..].iter().filter(|&&v| v < r[i]).count() as u64;
        rank += smaller * factorial(m - 1 - i);
    }
    rank
}

/// Inverse of [`order_rank`].
pub fn order_unrank(n: usize, mut rank: u64) -> EdgeOrder {
    let m = pair_count(n);
    let mut pool: Vec<usize> = (0..m).collect();
    let mut ranking = Vec::with_capacity(m);
    for i in 0..m {
        let f = factorial(m - 1 - i);
        let k = (rank / f) as usize;
        rank %= f;
        ranking.push(pool.remove(k));
    }
    EdgeOrder::from_ranking(n, ranking).expect("a permutation")
}

/// Which of the `C(n,2)!` orders on four or five points have been seen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageStore {
    n: usize,
    bits: Vec<u64>,
    count: u64,
}

impl CoverageStore {
    pub fn new(n: usize) -> Result<Self> {
        if !(4..=5).contains(&n) {
            return Err(Error::InvalidParameter(format!("coverage is kept for 4 or 5 points, got {n}")));
        }
        let total = factorial(pair_count(n));
        Ok(CoverageStore { n, bits: vec![0; total.div_ceil(64) as usize], count: 0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of orders on the pairs, `C(n,2)!`.
    pub fn total(&self) -> u64 {
        factorial(pair_count(self.n))
    }

    /// Marks an order by its rank; true if it was new.
    pub fn insert_rank(&mut self, rank: u64) -> bool {
        let (w, b) = ((rank / 64) as usize, rank % 64);
        let new = self.bits[w] >> b & 1 == 0;
        if new {
            self.bits[w] |= 1 << b;
            self.count += 1;
        }
        new
    }

    pub fn insert(&mut self, order: &EdgeOrder) -> bool {
        self.insert_rank(order_rank(order))
    }

    pub fn contains(&self, order: &EdgeOrder) -> bool {
        let r = order_rank(order);
        self.bits[(r / 64) as usize] >> (r % 64) & 1 == 1
    }

    pub fn distinct(&self) -> u64 {
        self.count
    }

    pub fn fraction(&self) -> f64 {
        self.count as f64 / self.total() as f64
    }

    /// Union with another store on the same `n`.
    pub fn merge(&mut self, other: &CoverageStore) {
        assert_eq!(self.n, other.n, "stores on different point counts");
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        self.count = self.bits.iter().map(|w| w.count_ones() as u64).sum();
    }

    /// Ranks of the stored orders, ascending.
    pub fn ranks(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w as u64 * 64 + b)
        })
    }

    pub fn orders(&self) -> impl Iterator<Item = EdgeOrder> + '_ {
        let n = self.n;
        self.ranks().map(move |r| order_unrank(n, r))
    }
}

/// Points other than `x`, nearest first.
fn by_distance(order: &EdgeOrder, x: usize) -> Vec<usize> {
    let mut ys: Vec<usize> = (0..order.n()).filter(|&y| y != x).collect();
    ys.sort_by_key(|&y| order.rank(x, y));
    ys
}

/// What a representation of kind `kind` has to preserve, packed into an
/// integer. Two orders have the same key exactly when a map representing
/// one of them in that sense represents the other.
pub fn structure_key(order: &EdgeOrder, kind: RepresentationKind) -> u64 {
    let n = order.n();
    let mut key = 0u64;
    let mut push = |v: usize| key = key * n as u64 + v as u64;
    match kind {
        RepresentationKind::Order => return order_rank(order),
        RepresentationKind::LocalOrder => {
            for x in 0..n {
                by_distance(order, x).into_iter().for_each(&mut push);
            }
        }
        RepresentationKind::ExtremalNeighbours => {
            let maps = order_neighbour_maps(order);
            maps.nn.into_iter().chain(maps.fn_).for_each(&mut push);
        }
        RepresentationKind::Nearest => order_neighbour_maps(order).nn.into_iter().for_each(&mut push),
        RepresentationKind::Farthest => order_neighbour_maps(order).fn_.into_iter().for_each(&mut push),
        RepresentationKind::TwoNearestSet => {
            for x in 0..n {
                let ys = by_distance(order, x);
                push(ys[0].min(ys[1]));
                push(ys[0].max(ys[1]));
            }
        }
        RepresentationKind::FirstAndSecondNearest => {
            for x in 0..n {
                let ys = by_distance(order, x);
                push(ys[0]);
                push(ys[1]);
            }
        }
    }
    key
}

#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub n: usize,
    pub kind: RepresentationKind,
    pub trials: u64,
    /// orders known to have a representation of the given kind
    pub distinct_orders_found: u64,
    /// all orders on the pairs, `C(n,2)!`
    pub total_orders: u64,
    /// the orders induced by the samples themselves
    pub sampled: CoverageStore,
}

impl CoverageReport {
    pub fn fraction_of_factorial(&self) -> f64 {
        self.distinct_orders_found as f64 / self.total_orders as f64
    }
}

/// Samples `trials` configurations of `n` points in the unit square and
/// counts the orders shown to have a representation of kind `kind`: an
/// order counts once some sample has the same structure key, since that
/// sample's points represent it.
pub fn coverage_experiment(n: usize, metric: Metric, kind: RepresentationKind, trials: u64, seed: u64) -> Result<CoverageReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let empty = CoverageStore::new(n)?;
    let sampled = (0..trials)
        .into_par_iter()
        .try_fold(
            || empty.clone(),
            |mut store, t| {
                let config = sample_config(n, SampleDomain::UnitSquare, metric, seed ^ t)?;
                store.insert(&EdgeOrder::from_config(&config)?);
                Ok::<_, Error>(store)
            },
        )
        .try_reduce(
            || empty.clone(),
            |mut a, b| {
                a.merge(&b);
                Ok(a)
            },
        )?;
    let found = if kind == RepresentationKind::Order {
        sampled.distinct()
    } else {
        let keys: HashSet<u64> = sampled.orders().map(|o| structure_key(&o, kind)).collect();
        let sizes = class_sizes(n, kind);
        keys.iter().map(|k| sizes[k]).sum()
    };
    Ok(CoverageReport { n, kind, trials, distinct_orders_found: found, total_orders: sampled.total(), sampled })
}

/// Number of orders sharing each structure key.
fn class_sizes(n: usize, kind: RepresentationKind) -> HashMap<u64, u64> {
    let total = factorial(pair_count(n));
    let chunk = 1 << 14;
    (0..total.div_ceil(chunk))
        .into_par_iter()
        .fold(HashMap::new, |mut h, c| {
            for r in c * chunk..((c + 1) * chunk).min(total) {
                *h.entry(structure_key(&order_unrank(n, r), kind)).or_insert(0u64) += 1;
            }
            h
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

/// The standard normal quantile.
pub fn normal_quantile(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!("quantile level must lie in (0, 1), got {beta}")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(beta))
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").cdf(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceQuery {
    pub successes: f64,
    pub trials: u64,
    /// confidence level in (0.5, 1)
    pub beta: f64,
}

/// Lower confidence bound for a success probability,
/// `(s + c^2/2 - c sqrt(s - s^2/N + c^2/4)) / (N + c^2)` with `c` the
/// normal quantile of `beta`. The caller adds the half success of the
/// continuity correction to `s` when wanted.
pub fn confidence_lower_bound(q: ConfidenceQuery) -> Result<f64> {
    let ConfidenceQuery { successes: s, trials, beta } = q;
    let n = trials as f64;
    if trials == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    if !(0.0..=n).contains(&s) {
        return Err(Error::InvalidParameter(format!("{s} successes out of {trials}")));
    }
    if !(0.5..1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("confidence level must lie in [0.5, 1), got {beta}")));
    }
    let c = normal_quantile(beta)?;
    let c2 = c * c;
    let root = (s - s * s / n + c2 / 4.0).max(0.0).sqrt();
    Ok(((s + c2 / 2.0 - c * root) / (n + c2)).clamp(0.0, 1.0))
}

/// A plane configuration as SVG: labelled points, with optional arrows
/// from each point to its nearest (blue) and farthest (red) neighbour.
pub fn render_svg(config: &PointConfig, nn: Option<&[usize]>, fn_: Option<&[usize]>) -> Result<String> {
    if config.dim() != 2 {
        return Err(Error::InvalidParameter(format!("only plane configurations can be drawn, got dimension {}", config.dim())));
    }
    let n = config.n();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for i in 0..n {
        for k in 0..2 {
            lo[k] = lo[k].min(config.point(i)[k]);
            hi[k] = hi[k].max(config.point(i)[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let size = 480.0;
    let pad = 30.0;
    let at = |i: usize| {
        let p = config.point(i);
        (pad + (p[0] - lo[0]) / span * size, pad + (hi[1] - p[1]) / span * size)
    };
    let side = size + 2.0 * pad;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}">"#);
    let _ = writeln!(
        out,
        r#"<defs><marker id="tip" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z"/></marker></defs>"#
    );
    for (map, colour) in [(nn, "blue"), (fn_, "red")] {
        let Some(map) = map else { continue };
        if map.len() != n {
            return Err(Error::SizeMismatch { expected: n, got: map.len() });
        }
        for (x, &y) in map.iter().enumerate() {
            let ((x1, y1), (x2, y2)) = (at(x), at(y));
            let _ = writeln!(
                out,
                r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{colour}" stroke-width="1" marker-end="url(#tip)"/>"#
            );
        }
    }
    for i in 0..n {
        let (x, y) = at(i);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="black"/>"#);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#, x + 6.0, y - 6.0, label(i));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn label(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        i.to_string()
    }
}
