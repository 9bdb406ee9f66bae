//! Stepwise maximization of order accuracy.
//!
//! Every comparison `{x,y} < {z,w}` of the target order that the current
//! configuration gets wrong pulls `x` and `y` together and pushes `z` and `w`
//! apart by a fixed fraction of their current distances.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::accuracy::concordance_of_keys;
use crate::error::{Error, Result};
use crate::space::{pairs, EdgeOrder, Metric, MetricSpace, PointConfig};

const COINCIDENT: f64 = 1e-12;
const JITTER: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanOrder {
    /// All comparisons in a fresh random order every epoch.
    Shuffled,
    /// Comparisons by ascending target rank of the shorter pair, then the longer.
    Lexicographic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RubberBandParams {
    pub fraction: f64,
    pub max_epochs: usize,
    pub stall_epochs: usize,
    pub seed: u64,
    pub dim: usize,
    pub scan: ScanOrder,
}

impl Default for RubberBandParams {
    fn default() -> Self {
        RubberBandParams {
            fraction: 0.05,
            max_epochs: 1000,
            stall_epochs: 50,
            seed: 0,
            dim: 2,
            scan: ScanOrder::Shuffled,
        }
    }
}

impl RubberBandParams {
    fn validate(&self) -> Result<()> {
        if !(self.fraction > 0.0 && self.fraction < 0.5) {
            return Err(Error::InvalidParameter(format!("fraction {} not in (0, 0.5)", self.fraction)));
        }
        if self.max_epochs == 0 || self.stall_epochs == 0 || self.dim == 0 {
            return Err(Error::InvalidParameter("epochs and dimension must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    RandomUnitCube,
    WarmStart(PointConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    /// Best configuration seen.
    pub config: PointConfig,
    /// Accuracy of the initial configuration followed by one entry per epoch.
    pub accuracy_trace: Vec<Ratio<i64>>,
    pub epochs_used: usize,
    pub success: bool,
}

impl OptimizeResult {
    pub fn best_accuracy(&self) -> Ratio<i64> {
        self.accuracy_trace.iter().copied().max().expect("trace is never empty")
    }
}

/// Comparisons as `(shorter pair, longer pair)` index pairs, ordered by rank.
fn comparisons(target: &EdgeOrder) -> Vec<(usize, usize)> {
    let seq = target.sequence();
    let mut out = Vec::with_capacity(seq.len() * seq.len().saturating_sub(1) / 2);
    for a in 0..seq.len() {
        for b in a + 1..seq.len() {
            out.push((seq[a], seq[b]));
        }
    }
    out
}

fn dist(c: &[f64], m: usize, i: usize, j: usize) -> f64 {
    (0..m).map(|k| (c[i * m + k] - c[j * m + k]).powi(2)).sum::<f64>().sqrt()
}

/// Moves `i` and `j` along their difference so that their distance changes
/// by `delta` (negative contracts), each endpoint taking half.
fn shift_pair<R: Rng + ?Sized>(c: &mut [f64], m: usize, i: usize, j: usize, delta: f64, rng: &mut R) {
    let mut e = dist(c, m, i, j);
    if e < COINCIDENT {
        if delta <= 0.0 {
            return;
        }
        let dir = random_unit(m, rng);
        for k in 0..m {
            c[j * m + k] += JITTER * dir[k];
        }
        e = dist(c, m, i, j);
    }
    let step = delta / 2.0 / e;
    for k in 0..m {
        let diff = c[j * m + k] - c[i * m + k];
        c[i * m + k] -= step * diff;
        c[j * m + k] += step * diff;
    }
}

fn random_unit<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn epoch_in_place<R: Rng + ?Sized>(
    c: &mut [f64],
    m: usize,
    all_pairs: &[(usize, usize)],
    comps: &mut [(usize, usize)],
    fraction: f64,
    scan: ScanOrder,
    rng: &mut R,
) {
    if scan == ScanOrder::Shuffled {
        comps.shuffle(rng);
    }
    for &(short, long) in comps.iter() {
        let (x, y) = all_pairs[short];
        let (z, w) = all_pairs[long];
        let exy = dist(c, m, x, y);
        let ezw = dist(c, m, z, w);
        if exy >= ezw {
            shift_pair(c, m, x, y, -fraction * exy, rng);
            shift_pair(c, m, z, w, fraction * ezw, rng);
        }
    }
}

/// One sweep over all comparisons of `target`, updating points immediately.
pub fn rubber_band_epoch<R: Rng + ?Sized>(
    config: &PointConfig,
    target: &EdgeOrder,
    fraction: f64,
    scan: ScanOrder,
    rng: &mut R,
) -> Result<PointConfig> {
    check_config(config, target)?;
    let mut out = config.clone();
    let mut comps = comparisons(target);
    let m = out.dim();
    epoch_in_place(out.coords_mut(), m, &pairs(target.n()), &mut comps, fraction, scan, rng);
    Ok(out)
}

fn check_config(config: &PointConfig, target: &EdgeOrder) -> Result<()> {
    if config.n() != target.n() {
        return Err(Error::SizeMismatch { expected: target.n(), got: config.n() });
    }
    if config.metric() != Metric::Euclidean {
        return Err(Error::InvalidParameter("rubber band needs the Euclidean metric".into()));
    }
    Ok(())
}

fn concordant(target: &EdgeOrder, config: &PointConfig) -> u64 {
    concordance_of_keys(target, &config.pair_keys()).expect("sizes checked").concordant
}

/// Runs epochs from `init` until the target order is reached, accuracy
/// stalls, or the epoch budget is spent.
pub fn optimize(target: &EdgeOrder, params: &RubberBandParams, init: &Init) -> Result<OptimizeResult> {
    params.validate()?;
    let n = target.n();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut config = match init {
        Init::RandomUnitCube => {
            let coords = (0..n * params.dim).map(|_| rng.gen::<f64>()).collect();
            PointConfig::new(n, params.dim, coords, Metric::Euclidean)?
        }
        Init::WarmStart(c) => {
            if c.dim() != params.dim {
                return Err(Error::SizeMismatch { expected: params.dim, got: c.dim() });
            }
            c.clone()
        }
    };
    check_config(&config, target)?;

    let total = crate::accuracy::comparison_count(n);
    let as_ratio = |k: u64| if total == 0 { Ratio::from_integer(1) } else { Ratio::new(k as i64, total as i64) };
    let all_pairs = pairs(n);
    let mut comps = comparisons(target);
    let mut current = concordant(target, &config);
    let mut trace = vec![as_ratio(current)];
    let mut best = (current, config.clone());
    let mut stall = 0;
    while current < total && trace.len() <= params.max_epochs && stall < params.stall_epochs {
        let m = config.dim();
        epoch_in_place(config.coords_mut(), m, &all_pairs, &mut comps, params.fraction, params.scan, &mut rng);
        current = concordant(target, &config);
        trace.push(as_ratio(current));
        if current > best.0 {
            best = (current, config.clone());
            stall = 0;
        } else {
            stall += 1;
        }
    }
    Ok(OptimizeResult {
        success: best.0 == total,
        config: best.1,
        epochs_used: trace.len() - 1,
        accuracy_trace: trace,
    })
}

/// Independent runs with seeds `seed ^ r`; the most accurate wins, the
/// lowest restart index on ties.
pub fn optimize_restarts(
    target: &EdgeOrder,
    params: &RubberBandParams,
    init: &Init,
    restarts: usize,
) -> Result<OptimizeResult> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    let runs: Vec<OptimizeResult> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| {
            let p = RubberBandParams { seed: params.seed ^ r, ..params.clone() };
            optimize(target, &p, init)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.best_accuracy() > runs[best].best_accuracy() {
            best = i;
        }
    }
    Ok(runs.into_iter().nth(best).expect("at least one run"))
}

/// Relative spread `(max q − min q) / min q` of the per-pair quotients
/// `q = original distance / image distance`.
pub fn stretch_spread(space: &MetricSpace, config: &PointConfig) -> Result<f64> {
    if space.n() != config.n() {
        return Err(Error::SizeMismatch { expected: space.n(), got: config.n() });
    }
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for (i, j) in pairs(space.n()) {
        let e = config.distance(i, j);
        if e == 0.0 {
            return Err(Error::Coincident(i, j));
        }
        let q = space.d(i, j) / e;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    if lo.is_infinite() {
        return Ok(0.0);
    }
    Ok((hi - lo) / lo)
}
