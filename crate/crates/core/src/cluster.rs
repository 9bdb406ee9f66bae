//! Cluster trees and their integer line representations.
//!
//! A cluster tree is stored as its merge sequence: level `k + 1` arises from
//! level `k` by joining the two clusters of `merges[k - 1]`. The line
//! construction places the two halves of every merge next to each other at a
//! gap larger than the width of any existing cluster, so every cross distance
//! of a merge exceeds every distance inside a cluster of that level.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::accuracy::count_inversions;
use crate::error::{Error, Result};
use crate::space::{pair_index, MetricSpace, PointConfig};

/// One join: two disjoint clusters, each sorted, with `a[0] < b[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Merge {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl Merge {
    fn new(mut x: Vec<usize>, mut y: Vec<usize>) -> Self {
        x.sort_unstable();
        y.sort_unstable();
        if x[0] < y[0] {
            Merge { a: x, b: y }
        } else {
            Merge { a: y, b: x }
        }
    }
}

/// A chain of partitions from singletons to one cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterTree {
    n: usize,
    merges: Vec<Merge>,
}

impl ClusterTree {
    /// Checks that every merge joins two clusters of the current partition
    /// and that the chain ends in a single cluster.
    pub fn new(n: usize, merges: Vec<Merge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewPoints { min: 1, got: 0 });
        }
        if merges.len() != n - 1 {
            return Err(Error::InvalidParameter(format!("{n} points need {} merges, got {}", n - 1, merges.len())));
        }
        let mut owner: Vec<usize> = (0..n).collect();
        let mut members: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
        let mut normal = Vec::with_capacity(merges.len());
        for (k, m) in merges.into_iter().enumerate() {
            let bad = || Error::InvalidParameter(format!("merge {} does not join two current clusters", k + 1));
            let (Some(&x), Some(&y)) = (m.a.first(), m.b.first()) else {
                return Err(bad());
            };
            if x >= n || y >= n {
                return Err(bad());
            }
            let (ca, cb) = (owner[x], owner[y]);
            let mut sa = m.a.clone();
            let mut sb = m.b.clone();
            sa.sort_unstable();
            sb.sort_unstable();
            if ca == cb || sa != members[ca] || sb != members[cb] {
                return Err(bad());
            }
            for &v in &members[cb] {
                owner[v] = ca;
            }
            let moved = std::mem::take(&mut members[cb]);
            members[ca].extend(moved);
            members[ca].sort_unstable();
            normal.push(Merge::new(sa, sb));
        }
        Ok(ClusterTree { n, merges: normal })
    }

    /// Builds a tree by joining two uniformly chosen clusters at every level.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut clusters: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
        let mut merges = Vec::with_capacity(n.saturating_sub(1));
        while clusters.len() > 1 {
            let i = rng.gen_range(0..clusters.len());
            let x = clusters.swap_remove(i);
            let j = rng.gen_range(0..clusters.len());
            let y = clusters.swap_remove(j);
            let m = Merge::new(x, y);
            clusters.push([m.a.clone(), m.b.clone()].concat());
            merges.push(m);
        }
        ClusterTree { n, merges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Partition at level `k` (1-based), clusters sorted by least member.
    pub fn partition(&self, k: usize) -> Vec<Vec<usize>> {
        assert!(k >= 1 && k <= self.n, "level {k} out of range");
        let mut parts: Vec<Vec<usize>> = (0..self.n).map(|x| vec![x]).collect();
        for m in &self.merges[..k - 1] {
            parts.retain(|c| c[0] != m.a[0] && c[0] != m.b[0]);
            let mut c = [m.a.clone(), m.b.clone()].concat();
            c.sort_unstable();
            parts.push(c);
        }
        parts.sort_by_key(|c| c[0]);
        parts
    }
}

/// Single linkage: repeatedly join the two clusters at the smallest minimum
/// distance, which for distinct distances is Kruskal's algorithm.
pub fn single_linkage(space: &MetricSpace) -> ClusterTree {
    let n = space.n();
    let mut edges: Vec<(usize, usize)> = crate::space::pairs(n);
    edges.sort_by(|p, q| space.d(p.0, p.1).total_cmp(&space.d(q.0, q.1)));
    let mut owner: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for (x, y) in edges {
        let (cx, cy) = (owner[x], owner[y]);
        if cx == cy {
            continue;
        }
        merges.push(Merge::new(members[cx].clone(), members[cy].clone()));
        for &v in &members[cy] {
            owner[v] = cx;
        }
        let moved = std::mem::take(&mut members[cy]);
        members[cx].extend(moved);
    }
    ClusterTree { n, merges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    Single,
    Complete,
}

/// Agglomerative clustering under `dist`. Returns `None` when the smallest
/// linkage value is tied at some level, since the merge is then not
/// determined.
pub fn agglomerate(n: usize, linkage: Linkage, dist: impl Fn(usize, usize) -> f64) -> Option<ClusterTree> {
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        let mut tied = false;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let cross = clusters[i].iter().flat_map(|&x| clusters[j].iter().map(move |&y| (x, y)));
                let v = match linkage {
                    Linkage::Single => cross.map(|(x, y)| dist(x, y)).fold(f64::INFINITY, f64::min),
                    Linkage::Complete => cross.map(|(x, y)| dist(x, y)).fold(f64::NEG_INFINITY, f64::max),
                };
                match best {
                    Some((b, _, _)) if v == b => tied = true,
                    Some((b, _, _)) if v > b => {}
                    _ => {
                        best = Some((v, i, j));
                        tied = false;
                    }
                }
            }
        }
        if tied {
            return None;
        }
        let (_, i, j) = best?;
        let y = clusters.swap_remove(j);
        let x = clusters.swap_remove(i);
        let m = Merge::new(x, y);
        clusters.push([m.a.clone(), m.b.clone()].concat());
        merges.push(m);
    }
    Some(ClusterTree { n, merges })
}

/// Whether every merge of `tree` is forced by the joining property under
/// `dist`: all cross distances of the merge are smaller than every distance
/// between two other clusters of that level.
pub fn forced_at_every_level(tree: &ClusterTree, dist: impl Fn(usize, usize) -> f64) -> bool {
    let n = tree.n;
    let dist = &dist;
    let mut owner: Vec<usize> = (0..n).collect();
    for m in &tree.merges {
        let (ca, cb) = (owner[m.a[0]], owner[m.b[0]]);
        let cross = m.a.iter().flat_map(|&x| m.b.iter().map(move |&y| dist(x, y))).fold(f64::NEG_INFINITY, f64::max);
        for x in 0..n {
            for y in x + 1..n {
                let inside = |c: usize| c == ca || c == cb;
                if owner[x] != owner[y] && !(inside(owner[x]) && inside(owner[y])) && dist(x, y) <= cross {
                    return false;
                }
            }
        }
        for o in owner.iter_mut() {
            if *o == cb {
                *o = ca;
            }
        }
    }
    true
}

/// Per-step record of the line construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeStep {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// gap between the two halves
    pub delta: u64,
    pub width_a: u64,
    pub width_b: u64,
    /// whether both halves were mirrored before joining
    pub reflected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineRepresentation {
    pub coords: Vec<u64>,
    pub steps: Vec<MergeStep>,
}

impl LineRepresentation {
    pub fn width(&self) -> u64 {
        self.coords.iter().copied().max().unwrap_or(0)
    }

    pub fn to_config(&self) -> PointConfig {
        let pts: Vec<f64> = self.coords.iter().map(|&c| c as f64).collect();
        PointConfig::new(pts.len(), 1, pts, crate::space::Metric::Euclidean).expect("finite coordinates")
    }

    /// `|f(x) - f(y)|`, exact for coordinates below 2^53.
    pub fn gap(&self, x: usize, y: usize) -> f64 {
        self.coords[x].abs_diff(self.coords[y]) as f64
    }
}

/// Floor of `(1 + sqrt 2)^n / 4` via `b_1 = 0, b_2 = 1, b_{i+1} = 2 b_i + b_{i-1} + 1`.
pub fn width_bound(n: usize) -> Option<u64> {
    let (mut prev, mut cur) = (0u64, 0u64);
    if n == 0 {
        return Some(0);
    }
    for i in 1..n {
        let next = if i == 1 { 1 } else { cur.checked_mul(2)?.checked_add(prev)?.checked_add(1)? };
        prev = cur;
        cur = next;
    }
    Some(cur)
}

fn overflow() -> Error {
    Error::Overflow("line coordinates exceed 64 bits".into())
}

/// Runs the construction over the merges of `tree`; `reflect` decides per
/// step whether both halves are mirrored first.
fn assemble(tree: &ClusterTree, mut reflect: impl FnMut(&[u64], &Merge) -> bool) -> Result<LineRepresentation> {
    let n = tree.n;
    let mut f = vec![0u64; n];
    let mut width = vec![0u64; n];
    let mut owner: Vec<usize> = (0..n).collect();
    let mut delta = 1u64;
    let mut steps = Vec::with_capacity(n.saturating_sub(1));
    for m in &tree.merges {
        let (ca, cb) = (owner[m.a[0]], owner[m.b[0]]);
        let (wa, wb) = (width[ca], width[cb]);
        let flip = reflect(&f, m);
        if flip {
            for &x in &m.a {
                f[x] = wa - f[x];
            }
            for &y in &m.b {
                f[y] = wb - f[y];
            }
        }
        let shift = delta.checked_add(wa).ok_or_else(overflow)?;
        for &y in &m.b {
            f[y] = f[y].checked_add(shift).ok_or_else(overflow)?;
            owner[y] = ca;
        }
        let w = shift.checked_add(wb).ok_or_else(overflow)?;
        width[ca] = w;
        steps.push(MergeStep { a: m.a.clone(), b: m.b.clone(), delta, width_a: wa, width_b: wb, reflected: flip });
        delta = w.checked_add(1).ok_or_else(overflow)?;
    }
    Ok(LineRepresentation { coords: f, steps })
}

/// Integer line representation of a cluster tree.
pub fn cluster_embed_line(tree: &ClusterTree) -> Result<LineRepresentation> {
    assemble(tree, |_, _| false)
}

/// Whether single and complete linkage on the image distances both
/// reproduce `tree`. Ties that leave a merge undetermined count as failure.
pub fn verify_cluster_representation(tree: &ClusterTree, dist: impl Fn(usize, usize) -> f64) -> bool {
    [Linkage::Single, Linkage::Complete]
        .into_iter()
        .all(|l| agglomerate(tree.n, l, &dist).as_ref() == Some(tree))
}

/// As [`verify_cluster_representation`] for line coordinates.
pub fn verify_line(tree: &ClusterTree, line: &LineRepresentation) -> bool {
    tree.n == line.coords.len() && verify_cluster_representation(tree, |x, y| line.gap(x, y))
}

/// As [`verify_cluster_representation`] for a point configuration.
pub fn verify_config(tree: &ClusterTree, config: &PointConfig) -> bool {
    tree.n == config.n() && verify_cluster_representation(tree, |x, y| config.distance_key(x, y))
}

/// Outcome of splitting a cluster into two halves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisectionCertificate {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// total weight of pairs with one member in each half
    pub cut: u64,
    /// total weight of all pairs
    pub total: u64,
}

impl BisectionCertificate {
    pub fn holds(&self) -> bool {
        2 * self.cut >= self.total
    }
}

/// Splits `members` into halves of sizes `floor(k/2)` and `ceil(k/2)` with
/// cut weight at least half the total: members are taken in shuffled pairs,
/// each pair put on the two sides in whichever orientation cuts more weight
/// to the members already placed, then single swaps improve the cut.
fn bisect(members: &[usize], weight: &dyn Fn(usize, usize) -> u64, seed: u64) -> BisectionCertificate {
    let k = members.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(&mut rng);
    let w = |i: usize, j: usize| weight(members[i], members[j]);
    // side[i]: Some(false) for A, Some(true) for B
    let mut side: Vec<Option<bool>> = vec![None; k];
    let against = |side: &[Option<bool>], i: usize, s: bool| -> u64 {
        (0..k).filter(|&j| side[j] == Some(!s)).map(|j| w(i, j)).sum()
    };
    for pair in order.chunks(2) {
        match *pair {
            [u, v] => {
                let keep = against(&side, u, false) + against(&side, v, true);
                let swap = against(&side, u, true) + against(&side, v, false);
                let u_in_b = swap > keep;
                side[u] = Some(u_in_b);
                side[v] = Some(!u_in_b);
            }
            [u] => {
                // the odd member goes to whichever side cuts more
                side[u] = Some(against(&side, u, true) > against(&side, u, false));
            }
            _ => unreachable!(),
        }
    }
    let mut in_b: Vec<bool> = side.into_iter().map(|s| s.expect("every member placed")).collect();
    // gain[i]: cut change if i alone switched sides
    let gain_of = |in_b: &[bool], i: usize| -> i64 {
        (0..k).filter(|&j| j != i).map(|j| if in_b[j] == in_b[i] { w(i, j) as i64 } else { -(w(i, j) as i64) }).sum()
    };
    let mut gain: Vec<i64> = (0..k).map(|i| gain_of(&in_b, i)).collect();
    loop {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in (0..k).filter(|&i| !in_b[i]) {
            for j in (0..k).filter(|&j| in_b[j]) {
                let g = gain[i] + gain[j] + 2 * w(i, j) as i64;
                if g > 0 && best.is_none_or(|b| g > b.0) {
                    best = Some((g, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        in_b[i] = true;
        in_b[j] = false;
        gain = (0..k).map(|x| gain_of(&in_b, x)).collect();
    }
    let mut a = Vec::with_capacity(k / 2);
    let mut b = Vec::with_capacity(k - k / 2);
    for i in 0..k {
        if in_b[i] {
            b.push(members[i]);
        } else {
            a.push(members[i]);
        }
    }
    let mut cut = 0;
    let mut total = 0;
    for i in 0..k {
        for j in i + 1..k {
            total += w(i, j);
            if in_b[i] != in_b[j] {
                cut += w(i, j);
            }
        }
    }
    a.sort_unstable();
    b.sort_unstable();
    let cert = BisectionCertificate { a, b, cut, total };
    assert!(cert.holds(), "pair placement guarantees half the weight");
    cert
}

/// Splits an even number of members into two equal halves with cut weight at
/// least half the total weight.
pub fn balanced_bisection(members: &[usize], weight: impl Fn(usize, usize) -> u64, seed: u64) -> Result<BisectionCertificate> {
    if !members.len().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("cannot halve {} members", members.len())));
    }
    Ok(bisect(members, &weight, seed))
}

/// Record of one join of the accuracy construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepCertificate {
    pub bisection: BisectionCertificate,
    /// cross-pair comparisons kept by the plain placement
    pub gamma: u64,
    /// cross-pair comparisons kept after mirroring both halves
    pub gamma_prime: u64,
    pub reflected: bool,
}

impl StepCertificate {
    /// `max(gamma, gamma') >= |A||B|(|A||B| - 1)/4`, in integers.
    pub fn orientation_holds(&self) -> bool {
        let p = (self.bisection.a.len() * self.bisection.b.len()) as u64;
        4 * self.gamma.max(self.gamma_prime) >= p * p.saturating_sub(1)
    }
}

#[derive(Debug, Clone)]
pub struct LineEmbedding {
    pub line: LineRepresentation,
    pub tree: ClusterTree,
    /// one per join, in join order
    pub certificates: Vec<StepCertificate>,
}

/// Cross-pair comparisons of a join that the plain placement keeps (first)
/// and that the mirrored placement keeps (second).
fn orientation_counts(space: &MetricSpace, f: &[u64], m: &Merge) -> (u64, u64) {
    let mut cross: Vec<(f64, i64)> = Vec::with_capacity(m.a.len() * m.b.len());
    for &x in &m.a {
        for &y in &m.b {
            cross.push((space.d(x, y), f[y] as i64 - f[x] as i64));
        }
    }
    let p = cross.len() as u64;
    if p <= 1 << 12 {
        let (mut g, mut g2) = (0, 0);
        for s in &cross {
            for t in &cross {
                if t.0 < s.0 {
                    if t.1 < s.1 {
                        g += 1;
                    }
                    if t.1 > s.1 {
                        g2 += 1;
                    }
                }
            }
        }
        (g, g2)
    } else {
        // the offsets of distinct cross pairs are distinct, so every pair of
        // cross pairs is kept by exactly one of the two placements
        cross.sort_by(|s, t| s.0.total_cmp(&t.0));
        let offsets: Vec<i64> = cross.iter().map(|c| c.1).collect();
        let inv = count_inversions(&offsets);
        (p * (p - 1) / 2 - inv, inv)
    }
}

/// Line map built from a halving cluster tree, mirroring each join when that
/// keeps more cross-pair comparisons. For `n` a power of two the order
/// accuracy is at least `3/7 - O(1/n)`; other `n` are split as evenly as
/// possible and carry no such guarantee.
pub fn line_embed(space: &MetricSpace, seed: u64) -> Result<LineEmbedding> {
    let n = space.n();
    let mut splits: Vec<BisectionCertificate> = Vec::with_capacity(n.saturating_sub(1));
    let mut clusters: Vec<Vec<usize>> = vec![(0..n).collect()];
    while let Some(ix) = (0..clusters.len())
        .filter(|&i| clusters[i].len() > 1)
        .max_by(|&i, &j| clusters[i].len().cmp(&clusters[j].len()).then(clusters[j][0].cmp(&clusters[i][0])))
    {
        let c = clusters.swap_remove(ix);
        let mut ds: Vec<f64> = Vec::with_capacity(c.len() * (c.len() - 1) / 2);
        for (i, &x) in c.iter().enumerate() {
            for &y in &c[i + 1..] {
                ds.push(space.d(x, y));
            }
        }
        ds.sort_by(f64::total_cmp);
        // rank of a pair among the pairs of the cluster
        let weight = |x: usize, y: usize| ds.partition_point(|&v| v < space.d(x, y)) as u64;
        let cert = bisect(&c, &weight, seed ^ splits.len() as u64);
        clusters.push(cert.a.clone());
        clusters.push(cert.b.clone());
        splits.push(cert);
    }
    splits.reverse();
    let merges: Vec<Merge> = splits.iter().map(|s| Merge::new(s.a.clone(), s.b.clone())).collect();
    let tree = ClusterTree::new(n, merges)?;
    let mut counts = Vec::with_capacity(splits.len());
    let line = assemble(&tree, |f, m| {
        let (g, g2) = orientation_counts(space, f, m);
        counts.push((g, g2));
        g2 > g
    })?;
    let certificates = splits
        .into_iter()
        .zip(counts)
        .zip(&line.steps)
        .map(|((bisection, (gamma, gamma_prime)), step)| StepCertificate { bisection, gamma, gamma_prime, reflected: step.reflected })
        .collect();
    Ok(LineEmbedding { line, tree, certificates })
}

/// [`line_embed`] restricted to `n = 2^p`, where the accuracy bound applies.
pub fn line_embed_halving(space: &MetricSpace, seed: u64) -> Result<LineEmbedding> {
    let n = space.n();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("the accuracy guarantee needs a power of two points, got {n}")));
    }
    line_embed(space, seed)
}

/// Image distances of a line representation as keys in pair-index order.
pub fn line_keys(line: &LineRepresentation) -> Vec<f64> {
    let n = line.coords.len();
    let mut keys = vec![0.0; crate::space::pair_count(n)];
    for x in 0..n {
        for y in x + 1..n {
            keys[pair_index(n, x, y)] = line.gap(x, y);
        }
    }
    keys
}
