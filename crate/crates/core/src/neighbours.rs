//! Nearest and farthest neighbour digraphs: their structure, plane
//! nearest-neighbour feasibility for small forests, and plane embeddings
//! that realise a given nearest or farthest neighbour graph.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::space::{neighbour_maps, EdgeOrder, Metric, MetricSpace, PointConfig};

/// A digraph on `0..n` without self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge {u} {v} out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at {u}")));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Digraph { n, edges })
    }

    /// The digraph `x -> succ[x]`.
    pub fn from_successors(succ: &[usize]) -> Result<Self> {
        Digraph::new(succ.len(), succ.iter().enumerate().map(|(x, &y)| (x, y)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in ascending order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, _) in &self.edges {
            deg[u] += 1;
        }
        deg
    }

    /// The unique out-neighbour of every vertex.
    pub fn successors(&self) -> Result<Vec<usize>> {
        let deg = self.out_degrees();
        if let Some(v) = deg.iter().position(|&d| d != 1) {
            return Err(Error::OutDegree { vertex: v, degree: deg[v] });
        }
        let mut succ = vec![0; self.n];
        for &(u, v) in &self.edges {
            succ[u] = v;
        }
        Ok(succ)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Nearest,
    Farthest,
}

/// Edges from every point to its nearest or farthest neighbour.
pub fn neighbour_digraph(space: &MetricSpace, which: Which) -> Digraph {
    let maps = neighbour_maps(space);
    let succ = match which {
        Which::Nearest => maps.nn,
        Which::Farthest => maps.fn_,
    };
    Digraph::from_successors(&succ).expect("neighbours are distinct points")
}

/// One component: two roots joined by a double edge and the down-trees
/// hanging off them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// the bi-root, smaller index first
    pub roots: (usize, usize),
    /// vertices in ascending order
    pub vertices: Vec<usize>,
    /// longest path from a vertex to its root
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiRootedForest {
    /// out-neighbour of every vertex; roots point at each other
    pub succ: Vec<usize>,
    /// components ordered by smaller root
    pub components: Vec<Component>,
    /// component index of every vertex
    pub component_of: Vec<usize>,
    /// distance from every vertex to the root of its tree
    pub level: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    Valid(BiRootedForest),
    Invalid(String),
}

/// Splits a digraph with out-degree one everywhere into bi-rooted components,
/// or explains which component has a cycle other than a double edge.
pub fn decompose_bi_rooted(g: &Digraph) -> Result<Decomposition> {
    let succ = g.successors()?;
    let n = succ.len();
    // walk every vertex forward to its cycle; state 0 new, 1 on the current path, 2 done
    let mut state = vec![0u8; n];
    let mut cycle_id = vec![usize::MAX; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        let mut path = Vec::new();
        let mut v = s;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = succ[v];
        }
        if state[v] == 1 {
            let start = path.iter().position(|&p| p == v).expect("on path");
            let cyc = path[start..].to_vec();
            for &c in &cyc {
                cycle_id[c] = cycles.len();
            }
            cycles.push(cyc);
        }
        for p in path {
            state[p] = 2;
        }
    }
    if let Some(c) = cycles.iter().find(|c| c.len() != 2) {
        let mut c = c.clone();
        c.sort_unstable();
        return Ok(Decomposition::Invalid(format!(
            "the component containing vertex {} has a cycle of length {} instead of a double edge",
            c[0],
            c.len()
        )));
    }
    // level and component by memoised walks
    let mut level = vec![usize::MAX; n];
    let mut comp = vec![usize::MAX; n];
    for (i, c) in cycles.iter().enumerate() {
        for &v in c {
            level[v] = 0;
            comp[v] = i;
        }
    }
    for s in 0..n {
        let mut path = Vec::new();
        let mut v = s;
        while level[v] == usize::MAX {
            path.push(v);
            v = succ[v];
        }
        let (mut l, c) = (level[v], comp[v]);
        for &p in path.iter().rev() {
            l += 1;
            level[p] = l;
            comp[p] = c;
        }
    }
    let mut order: Vec<usize> = (0..cycles.len()).collect();
    order.sort_by_key(|&i| cycles[i].iter().min().copied());
    let mut rank = vec![0; cycles.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let mut components: Vec<Component> = order
        .iter()
        .map(|&i| {
            let (a, b) = (cycles[i][0], cycles[i][1]);
            Component { roots: (a.min(b), a.max(b)), vertices: Vec::new(), depth: 0 }
        })
        .collect();
    let component_of: Vec<usize> = comp.iter().map(|&c| rank[c]).collect();
    for v in 0..n {
        let c = &mut components[component_of[v]];
        c.vertices.push(v);
        c.depth = c.depth.max(level[v]);
    }
    Ok(Decomposition::Valid(BiRootedForest { succ, components, component_of, level }))
}

impl BiRootedForest {
    pub fn n(&self) -> usize {
        self.succ.len()
    }

    /// Vertices with an edge into `x` but no edge back.
    pub fn proper_children(&self, x: usize) -> Vec<usize> {
        (0..self.n()).filter(|&y| self.succ[y] == x && self.succ[x] != y).collect()
    }

    pub fn max_proper_children(&self) -> usize {
        let mut count = vec![0; self.n()];
        for y in 0..self.n() {
            let x = self.succ[y];
            if self.succ[x] != y {
                count[x] += 1;
            }
        }
        count.into_iter().max().unwrap_or(0)
    }

    /// Largest depth over all components.
    pub fn depth(&self) -> usize {
        self.components.iter().map(|c| c.depth).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
    /// at most four proper children everywhere but ten or more vertices
    OutOfScope,
}

/// Whether a forest can be the nearest neighbour graph of points in the
/// plane, as far as the five-children obstruction and the nine-vertex
/// characterisation decide it.
pub fn plane_nn_feasible(d: &BiRootedForest) -> Feasibility {
    if d.max_proper_children() >= 5 {
        Feasibility::Infeasible
    } else if d.n() <= 9 {
        Feasibility::Feasible
    } else {
        Feasibility::OutOfScope
    }
}

/// Required relative gap between the distance a verification relies on and
/// its nearest competitor.
pub const VERIFY_SLACK: f64 = 1e-9;

/// Whether `succ` is the nearest (or farthest) neighbour map of the points,
/// with every deciding comparison holding by a relative margin of `slack`.
fn realises(points: &[[f64; 2]], succ: &[usize], which: Which, slack: f64) -> bool {
    let n = points.len();
    let d = |i: usize, j: usize| (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]);
    (0..n).all(|x| {
        let target = d(x, succ[x]);
        if !(target > 0.0) {
            return false;
        }
        (0..n).filter(|&y| y != x && y != succ[x]).all(|y| match which {
            Which::Nearest => d(x, y) > target * (1.0 + slack),
            Which::Farthest => d(x, y) * (1.0 + slack) < target,
        })
    })
}

fn to_config(points: &[[f64; 2]]) -> PointConfig {
    let coords = points.iter().flat_map(|p| p.iter().copied()).collect();
    PointConfig::new(points.len(), 2, coords, Metric::Euclidean).expect("finite plane points")
}

/// Angular spacing (degrees) of neighbouring children around a vertex on the
/// first attempts; later attempts add seeded jitter.
const CHILD_SPACING: [f64; 6] = [65.0, 68.0, 62.0, 70.0, 64.0, 66.0];
const NN_ATTEMPTS: usize = 400;

/// Places a feasible forest in the plane so that its nearest neighbour graph
/// is exactly `d`. Bi-roots are 100 apart; a child at level `k` sits at
/// distance `100 + k` from its parent, its siblings fanned out opposite the
/// parent's own out-edge.
pub fn nn_embed_plane(d: &BiRootedForest) -> Result<PointConfig> {
    if plane_nn_feasible(d) != Feasibility::Feasible {
        return Err(Error::InvalidParameter(
            "forest is not known to have a plane nearest neighbour representation".into(),
        ));
    }
    let n = d.n();
    let children: Vec<Vec<usize>> = (0..n).map(|x| d.proper_children(x)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e6e);
    for attempt in 0..NN_ATTEMPTS {
        let spacing = CHILD_SPACING[attempt % CHILD_SPACING.len()];
        let jitter = if attempt < CHILD_SPACING.len() { 0.0 } else { 4.0 };
        let mut pts = vec![[0.0f64; 2]; n];
        // direction (radians) from each placed vertex to its out-neighbour
        let mut out_dir = vec![0.0f64; n];
        for (ci, comp) in d.components.iter().enumerate() {
            let origin = [ci as f64 * 1.0e5, 0.0];
            let (a, b) = comp.roots;
            pts[a] = origin;
            pts[b] = [origin[0] + 100.0, origin[1]];
            out_dir[a] = 0.0;
            out_dir[b] = PI;
            let mut stack = vec![a, b];
            while let Some(x) = stack.pop() {
                let kids = &children[x];
                let c = kids.len() as f64;
                for (j, &y) in kids.iter().enumerate() {
                    let offset = (j as f64 - (c - 1.0) / 2.0) * spacing + rng.gen_range(-jitter..=jitter);
                    let dir = out_dir[x] + PI + offset.to_radians();
                    // edges differ slightly in length so that no two distances tie
                    let len = 100.0 + d.level[y] as f64 + 0.001 * y as f64;
                    pts[y] = [pts[x][0] + len * dir.cos(), pts[x][1] + len * dir.sin()];
                    out_dir[y] = dir + PI;
                    stack.push(y);
                }
            }
        }
        if realises(&pts, &d.succ, Which::Nearest, VERIFY_SLACK) {
            return Ok(to_config(&pts));
        }
    }
    Err(Error::RetriesExhausted(format!("no verified nearest neighbour embedding after {NN_ATTEMPTS} attempts")))
}

/// Minimum pairwise distance bound for `n` points on the unit sphere.
pub fn fejes_toth_delta(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need n >= 3, got {n}")));
    }
    let x = n as f64 / (n as f64 - 2.0) * PI / 6.0;
    let radicand = 4.0 - 1.0 / (x.sin() * x.sin());
    if radicand < 0.0 {
        return Err(Error::InvalidParameter(format!("negative radicand for n = {n}")));
    }
    Ok(radicand.sqrt())
}

/// Fraction of points that are nobody's nearest neighbour.
pub fn non_nn_fraction_of(nn: &[usize]) -> Ratio<i64> {
    let mut hit = vec![false; nn.len()];
    for &y in nn {
        hit[y] = true;
    }
    let miss = hit.iter().filter(|&&h| !h).count();
    Ratio::new(miss as i64, nn.len().max(1) as i64)
}

pub fn non_nn_fraction(space: &MetricSpace) -> Ratio<i64> {
    non_nn_fraction_of(&neighbour_maps(space).nn)
}

/// Nearest or farthest neighbour of every point of a configuration; the
/// lowest index wins a tie.
pub fn config_neighbours(config: &PointConfig, which: Which) -> Vec<usize> {
    let n = config.n();
    (0..n)
        .map(|x| {
            let others = (0..n).filter(|&y| y != x);
            let key = |y: usize| config.distance_key(x, y);
            match which {
                Which::Nearest => others.min_by(|&a, &b| key(a).total_cmp(&key(b))),
                Which::Farthest => others.rev().max_by(|&a, &b| key(a).total_cmp(&key(b))),
            }
            .expect("at least two points")
        })
        .collect()
}

/// As [`non_nn_fraction`], reading distances off a configuration.
pub fn non_nn_fraction_config(config: &PointConfig) -> Ratio<i64> {
    non_nn_fraction_of(&config_neighbours(config, Which::Nearest))
}

/// Nearest neighbours of points in the unit square by bucketing.
pub fn grid_nearest(points: &[[f64; 2]]) -> Vec<usize> {
    let n = points.len();
    let cells = ((n as f64).sqrt().ceil() as usize).max(1);
    let cell = |v: f64| ((v * cells as f64) as usize).min(cells - 1);
    let mut grid: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry((cell(p[0]), cell(p[1]))).or_default().push(i);
    }
    let d2 = |i: usize, j: usize| {
        let (dx, dy) = (points[i][0] - points[j][0], points[i][1] - points[j][1]);
        dx * dx + dy * dy
    };
    (0..n)
        .map(|i| {
            let (cx, cy) = (cell(points[i][0]) as i64, cell(points[i][1]) as i64);
            let mut best = (f64::INFINITY, usize::MAX);
            let mut r = 0i64;
            loop {
                // scan the ring of cells at Chebyshev radius r
                for gx in cx - r..=cx + r {
                    for gy in cy - r..=cy + r {
                        if (gx - cx).abs() != r && (gy - cy).abs() != r {
                            continue;
                        }
                        if gx < 0 || gy < 0 {
                            continue;
                        }
                        if let Some(list) = grid.get(&(gx as usize, gy as usize)) {
                            for &j in list {
                                if j != i {
                                    let dd = d2(i, j);
                                    if dd < best.0 {
                                        best = (dd, j);
                                    }
                                }
                            }
                        }
                    }
                }
                // every unscanned point is at least r cells away
                let reach = r as f64 / cells as f64;
                if best.1 != usize::MAX && best.0.sqrt() <= reach {
                    break;
                }
                if r as usize > cells {
                    break;
                }
                r += 1;
            }
            best.1
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NnStats {
    /// fraction of points in a mutual nearest-neighbour pair
    pub biroot_prob: f64,
    /// components of the nearest neighbour graph per point
    pub components_per_point: f64,
    /// fraction of uniformly random orders whose nearest neighbour graph has
    /// at most four proper children at every vertex
    pub four_children_pass_rate: f64,
}

/// Monte Carlo statistics of nearest neighbour graphs of uniform samples in
/// the unit square, and of random orders. Trial `t` uses seed `seed ^ t`.
pub fn nn_statistics(n: usize, trials: usize, seed: u64) -> Result<NnStats> {
    if n < 2 || trials == 0 {
        return Err(Error::InvalidParameter("need n >= 2 and trials >= 1".into()));
    }
    let sums: Vec<(usize, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t as u64);
            let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen(), rng.gen()]).collect();
            let nn = grid_nearest(&pts);
            let mutual = (0..n).filter(|&x| nn[nn[x]] == x).count();
            // an independent stream for the random order
            let mut orng = ChaCha8Rng::seed_from_u64(!(seed ^ t as u64));
            let order_nn = random_order_nearest(n, &mut orng);
            let pass = max_proper_children_of(&order_nn) <= 4;
            (mutual, pass)
        })
        .collect();
    let mutual: usize = sums.iter().map(|s| s.0).sum();
    let passes = sums.iter().filter(|s| s.1).count();
    let total = (n * trials) as f64;
    Ok(NnStats {
        biroot_prob: mutual as f64 / total,
        // one component per mutual pair
        components_per_point: mutual as f64 / 2.0 / total,
        four_children_pass_rate: passes as f64 / trials as f64,
    })
}

/// Nearest neighbour map of a uniformly random order on the pairs of `n`
/// points, drawn as independent uniform keys.
fn random_order_nearest<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    if n <= 12 {
        let order = EdgeOrder::random(n, rng);
        return crate::space::order_neighbour_maps(&order).nn;
    }
    let mut best = vec![(f64::INFINITY, 0usize); n];
    for i in 0..n {
        for j in i + 1..n {
            let k: f64 = rng.gen();
            if k < best[i].0 {
                best[i] = (k, j);
            }
            if k < best[j].0 {
                best[j] = (k, i);
            }
        }
    }
    best.into_iter().map(|b| b.1).collect()
}

fn max_proper_children_of(succ: &[usize]) -> usize {
    let mut count = vec![0; succ.len()];
    for (y, &x) in succ.iter().enumerate() {
        if succ[x] != y {
            count[x] += 1;
        }
    }
    count.into_iter().max().unwrap_or(0)
}

/// Points on the two circles of one component of the farthest neighbour
/// construction.
#[derive(Debug, Clone, Copy)]
pub struct FnCurves {
    pub component: usize,
    pub lambda: f64,
}

impl FnCurves {
    /// Base angle of component `j`: `2^(-j-1) pi`.
    fn base(&self) -> f64 {
        PI * 0.5f64.powi(self.component as i32 + 1)
    }

    /// Point with parameter `xi` on circle `q`.
    pub fn point(&self, q: usize, xi: f64) -> [f64; 2] {
        let b = self.base();
        let sign = if q == 0 { 1.0 } else { -1.0 };
        let centre = [sign * b.cos(), sign * b.sin()];
        let theta = q as f64 * PI + b + self.lambda * xi * PI;
        [centre[0] + 2.0 * theta.cos(), centre[1] + 2.0 * theta.sin()]
    }
}

/// Curve parameter of the vertex at `path` below a root, where `path[i]`
/// is the birth index among siblings. Unoccupied siblings are evaluated on
/// demand.
fn xi(path: &[usize], memo: &mut HashMap<Vec<usize>, f64>) -> f64 {
    if let Some(&v) = memo.get(path) {
        return v;
    }
    let v = match path.len() {
        0 => 0.0,
        1 => 1.0 + 0.5f64.powi(path[0] as i32),
        len => {
            let m = path[len - 1];
            let parent = &path[..len - 1];
            let mut next = parent.to_vec();
            next[len - 2] += 1;
            let w = 0.5f64.powi(m as i32);
            let a = xi(parent, memo);
            let b = xi(&next, memo);
            (1.0 + w) * a + (1.0 - w) * b
        }
    };
    memo.insert(path.to_vec(), v);
    v
}

const FN_HALVINGS: usize = 60;

/// Plane points whose farthest neighbour graph equals that of `space`.
///
/// Each component gets two circles of radius 2 centred at `±e^(i 2^(-j-1) pi)`.
/// A vertex at birth path `t` below the first root sits on circle `q(t)` at
/// parameter `xi(t)`, its mirror below the second root on the other circle at
/// `-xi(t)`. One coefficient `lambda` is shared by all components and halved
/// until the recomputed graph matches.
pub fn fn_embed_plane(space: &MetricSpace) -> Result<PointConfig> {
    let g = neighbour_digraph(space, Which::Farthest);
    let forest = match decompose_bi_rooted(&g)? {
        Decomposition::Valid(f) => f,
        Decomposition::Invalid(r) => return Err(Error::Construction(r)),
    };
    fn_embed_forest(&forest)
}

/// As [`fn_embed_plane`], for a given bi-rooted forest.
pub fn fn_embed_forest(forest: &BiRootedForest) -> Result<PointConfig> {
    let n = forest.n();
    let children: Vec<Vec<usize>> = (0..n).map(|x| forest.proper_children(x)).collect();
    // (component, circle parity, parameter) per vertex
    let mut place = vec![(0usize, 0usize, 0.0f64); n];
    let mut memo = HashMap::new();
    for (j, comp) in forest.components.iter().enumerate() {
        for (root, mirrored) in [(comp.roots.0, false), (comp.roots.1, true)] {
            let mut stack = vec![(root, Vec::<usize>::new())];
            while let Some((v, path)) = stack.pop() {
                let parity = path.len() % 2;
                let x = xi(&path, &mut memo);
                place[v] = if mirrored { (j, 1 - parity, -x) } else { (j, parity, x) };
                for (m, &c) in children[v].iter().enumerate() {
                    let mut p = path.clone();
                    p.push(m);
                    stack.push((c, p));
                }
            }
        }
    }
    let depth = forest.depth();
    let mut lambda = 1.0 / (2.0 * 2f64.powi(depth as i32 + 1));
    for _ in 0..FN_HALVINGS {
        let pts: Vec<[f64; 2]> = place
            .iter()
            .map(|&(j, q, x)| FnCurves { component: j, lambda }.point(q, x))
            .collect();
        if realises(&pts, &forest.succ, Which::Farthest, VERIFY_SLACK) {
            return Ok(to_config(&pts));
        }
        lambda /= 2.0;
    }
    Err(Error::RetriesExhausted("farthest neighbour embedding failed verification".into()))
}
