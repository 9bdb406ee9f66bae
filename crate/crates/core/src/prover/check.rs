//! Independent verification of rendered transcripts.
//!
//! The checker reads only the text. It rebuilds the order from the header,
//! re-derives which angle comparisons the stated mode allows, and checks every
//! line against the lines it cites with exact rational arithmetic. It shares
//! no code with the prover's rule engine.

use std::collections::{HashMap, HashSet};

use num_rational::Ratio;

use super::render::{COLUMNS, EXTREMAL_HEADER, FULL_HEADER, NOTE_PREFIX, SPLIT_END};
use crate::error::{Error, Result};

type Q = Ratio<i64>;
/// apex, smaller arm, larger arm
type Ang = (usize, usize, usize);

/// What a valid transcript establishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckOutcome {
    /// every branch ends in a contradiction
    Refutation,
    /// every line is valid but the transcript does not close
    NonRefutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Upper,
    Lower,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::Upper => Side::Lower,
            Side::Lower => Side::Upper,
        }
    }
}

/// A configuration statement: `apex` sees `middle` between the other two,
/// or (`middle == None`) lies inside the triangle of `others`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Config {
    apex: usize,
    others: [usize; 3],
    middle: Option<usize>,
}

#[derive(Debug, Clone, Default)]
struct Claim {
    bounds: Vec<(Ang, Side, Q, bool)>,
    configs: Vec<(Config, bool)>,
    boundary: Vec<usize>,
}

/// Convex quadrilateral with the given diagonal through the first point, or
/// one point inside the triangle of the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Convex(usize, usize),
    Inside(usize),
}

fn shapes(q: [usize; 4]) -> Vec<Shape> {
    let mut v: Vec<Shape> = (1..4).map(|k| Shape::Convex(q[0], q[k])).collect();
    v.extend(q.iter().map(|&p| Shape::Inside(p)));
    v
}

fn diagonal(q: [usize; 4], s: Shape, x: usize, y: usize) -> bool {
    let Shape::Convex(a, b) = s else { return false };
    let first = (x == a && y == b) || (x == b && y == a);
    let rest: Vec<usize> = q.iter().copied().filter(|&p| p != a && p != b).collect();
    let second = (x == rest[0] && y == rest[1]) || (x == rest[1] && y == rest[0]);
    first || second
}

fn satisfies(q: [usize; 4], s: Shape, c: &Config) -> bool {
    match c.middle {
        // the middle ray is the opposite vertex of a convex quadrilateral or
        // the point inside the triangle
        Some(m) => diagonal(q, s, c.apex, m) || s == Shape::Inside(m),
        None => s == Shape::Inside(c.apex),
    }
}

fn quad_of(c: &Config) -> [usize; 4] {
    let mut q = [c.apex, c.others[0], c.others[1], c.others[2]];
    q.sort_unstable();
    q
}

struct Frame {
    kind: FrameKind,
    closed: bool,
}

enum FrameKind {
    Root,
    Split { apex: usize, others: [usize; 3], seen: Vec<Option<usize>>, vis_len: usize },
    Branch,
}

struct Checker {
    n: usize,
    rank: HashMap<(usize, usize), usize>,
    extremal: bool,
    nn: Vec<usize>,
    fnb: Vec<usize>,
    claims: HashMap<usize, Claim>,
    visible: Vec<usize>,
    visible_set: HashSet<usize>,
    line_no: usize,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn point(c: char, n: usize) -> Option<usize> {
    let p = (c as u32).checked_sub('a' as u32)? as usize;
    (p < n).then_some(p)
}

fn parse_dec(s: &str) -> Option<Q> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if frac.len() > 15 {
        return None;
    }
    let den = 10i64.pow(frac.len() as u32);
    let num = int.parse::<i64>().ok()? * den + if frac.is_empty() { 0 } else { frac.parse::<i64>().ok()? };
    let q = Q::new(num, den);
    Some(if neg { -q } else { q })
}

fn tokens(s: &str) -> Vec<String> {
    s.replace('(', " ( ").replace(')', " ) ").replace(',', " , ").split_whitespace().map(str::to_string).collect()
}

fn cmp_side(c: &str) -> Option<(Side, bool)> {
    match c {
        "<" => Some((Side::Upper, true)),
        "<=" => Some((Side::Upper, false)),
        ">" => Some((Side::Lower, true)),
        ">=" => Some((Side::Lower, false)),
        _ => None,
    }
}

fn arms(a: Ang) -> [usize; 2] {
    [a.1, a.2]
}

/// The arm two angles at the same apex share, if exactly one.
fn shared_arm(x: Ang, y: Ang) -> Option<usize> {
    if x.0 != y.0 {
        return None;
    }
    let common: Vec<usize> = arms(x).into_iter().filter(|p| arms(y).contains(p)).collect();
    (common.len() == 1).then(|| common[0])
}

fn other_arm(x: Ang, p: usize) -> usize {
    if x.1 == p {
        x.2
    } else {
        x.1
    }
}

fn mk(apex: usize, a: usize, b: usize) -> Ang {
    (apex, a.min(b), a.max(b))
}

fn q(v: i64) -> Q {
    Q::from_integer(v)
}

impl Checker {
    fn angle(&self, tok: &str) -> Option<Ang> {
        let c: Vec<char> = tok.chars().collect();
        if c.len() != 4 || c[1] != ':' {
            return None;
        }
        let (z, x, y) = (point(c[0], self.n)?, point(c[2], self.n)?, point(c[3], self.n)?);
        (z != x && z != y && x != y).then(|| mk(z, x, y))
    }

    fn config(&self, toks: &[String]) -> Option<Config> {
        match toks {
            [one] => {
                let c: Vec<char> = one.chars().collect();
                if c.len() != 5 || c[1] != ':' {
                    return None;
                }
                let p: Vec<usize> = [c[0], c[2], c[3], c[4]].iter().map(|&ch| point(ch, self.n)).collect::<Option<_>>()?;
                let mut others = [p[1], p[2], p[3]];
                others.sort_unstable();
                let distinct: HashSet<usize> = p.iter().copied().collect();
                (distinct.len() == 4).then_some(Config { apex: p[0], others, middle: Some(p[2]) })
            }
            [a, kw, t] if kw == "in" => {
                let a: Vec<char> = a.chars().collect();
                let t: Vec<char> = t.chars().collect();
                if a.len() != 1 || t.len() != 3 {
                    return None;
                }
                let apex = point(a[0], self.n)?;
                let mut others = [point(t[0], self.n)?, point(t[1], self.n)?, point(t[2], self.n)?];
                others.sort_unstable();
                let distinct: HashSet<usize> = [apex, others[0], others[1], others[2]].into();
                (distinct.len() == 4).then_some(Config { apex, others, middle: None })
            }
            _ => None,
        }
    }

    fn d_less(&self, s: usize, x: usize, y: usize) -> bool {
        // whether d(s,x) < d(s,y) is available
        let r = |a: usize, b: usize| self.rank[&(a.min(b), a.max(b))];
        if self.extremal {
            self.nn[s] == x || self.fnb[s] == y
        } else {
            r(s, x) < r(s, y)
        }
    }

    /// Whether two angles of one triangle are known to compare `x < y`.
    fn known_less(&self, x: Ang, y: Ang) -> bool {
        let Some(w) = self.third(x, y) else { return false };
        // the sides opposite a and b meet at the third vertex
        let direct = |a: Ang, b: Ang| self.third(a, b).is_some_and(|t| self.d_less(t.0, b.0, a.0));
        direct(x, y) || (direct(x, w) && direct(w, y))
    }

    /// The third angle of the triangle containing `x` and `y`.
    fn third(&self, x: Ang, y: Ang) -> Option<Ang> {
        if x.0 == y.0 {
            return None;
        }
        let tx: HashSet<usize> = [x.0, x.1, x.2].into();
        let ty: HashSet<usize> = [y.0, y.1, y.2].into();
        if tx != ty {
            return None;
        }
        let z = *tx.iter().find(|&&p| p != x.0 && p != y.0)?;
        Some(mk(z, x.0, y.0))
    }

    fn cited<'a>(&'a self, refs: &'a [usize]) -> impl Iterator<Item = &'a Claim> + 'a {
        refs.iter().filter_map(|r| self.claims.get(r))
    }

    /// Tightest bound on `a` in direction `side` among the cited lines,
    /// defaulting to the open interval (0, 180).
    fn best(&self, a: Ang, side: Side, refs: &[usize]) -> (Q, bool) {
        let mut best = match side {
            Side::Upper => (q(180), true),
            Side::Lower => (q(0), true),
        };
        for c in self.cited(refs) {
            for &(b, s, v, strict) in &c.bounds {
                if b != a || s != side {
                    continue;
                }
                let better = match side {
                    Side::Upper => v < best.0,
                    Side::Lower => v > best.0,
                };
                if better || (v == best.0 && strict && !best.1) {
                    best = (v, strict);
                }
            }
        }
        best
    }

    /// Strictness with which the cited lines give `a < v` (upper) or `a > v`
    /// (lower), or `None` if they do not.
    fn entails(&self, a: Ang, side: Side, v: Q, refs: &[usize]) -> Option<bool> {
        let (b, strict) = self.best(a, side, refs);
        let better = match side {
            Side::Upper => b < v,
            Side::Lower => b > v,
        };
        if better {
            Some(true)
        } else if b == v {
            Some(strict)
        } else {
            None
        }
    }

    fn domain(&self, quad: [usize; 4], refs: &[usize]) -> Vec<Shape> {
        let mut dom = shapes(quad);
        for c in self.cited(refs) {
            for (cfg, holds) in &c.configs {
                if quad_of(cfg) == quad {
                    dom.retain(|&s| satisfies(quad, s, cfg) == *holds);
                }
            }
            for p in &c.boundary {
                dom.retain(|&s| s != Shape::Inside(*p));
            }
        }
        dom
    }

    fn body_line(&mut self, num: usize, tag: &str, prop: &str, refs: &[usize]) -> Result<(Claim, bool)> {
        let ln = self.line_no;
        for r in refs {
            if *r != 0 && !self.visible_set.contains(r) {
                return err(ln, format!("line {num} cites {r}, which is not available here"));
            }
        }
        let t = tokens(prop);
        let mut claim = Claim::default();
        match tag {
            "smallest" | "dominated" | "largest" => {
                let (cmp, val) = match t.as_slice() {
                    [.., c, v] => (c.as_str(), parse_dec(v)),
                    _ => return err(ln, "malformed seed line"),
                };
                let (want_side, want_val) = match tag {
                    "smallest" => (Side::Upper, 60),
                    "dominated" => (Side::Upper, 90),
                    _ => (Side::Lower, 60),
                };
                if cmp_side(cmp) != Some((want_side, true)) || val != Some(q(want_val)) {
                    return err(ln, format!("{tag} line must state a strict bound of {want_val}"));
                }
                for tok in t[..t.len() - 2].iter().filter(|s| *s != ",") {
                    let a = self.angle(tok).ok_or_else(|| perr(ln, format!("bad angle {tok}")))?;
                    let mut others = Vec::new();
                    for p in [a.1, a.2] {
                        others.push(mk(p, a.0, other_arm(a, p)));
                    }
                    let below = others.iter().filter(|&&o| self.known_less(a, o)).count();
                    let above = others.iter().filter(|&&o| self.known_less(o, a)).count();
                    let ok = match tag {
                        "smallest" => below == 2,
                        "dominated" => below >= 1,
                        _ => above == 2,
                    };
                    if !ok {
                        return err(ln, format!("{tok} is not {tag} in its triangle"));
                    }
                    claim.bounds.push((a, want_side, q(want_val), true));
                }
            }
            "on bndry" => {
                let pos = t.iter().position(|s| s == "since").ok_or_else(|| perr(ln, "missing since"))?;
                for tok in t[..pos].iter().filter(|s| *s != ",") {
                    let ch: Vec<char> = tok.chars().collect();
                    let p = (ch.len() == 1).then(|| point(ch[0], self.n)).flatten();
                    let p = p.ok_or_else(|| perr(ln, format!("bad point {tok}")))?;
                    if !self.fnb.contains(&p) {
                        return err(ln, format!("{tok} is nobody's farthest neighbour"));
                    }
                    claim.boundary.push(p);
                }
            }
            "tripod" | "sum" | "circ" | "triangle" | "larger" | "smaller" | "order" => {
                let b = self.bound_line(tag, &t, refs)?;
                claim.bounds.push(b);
            }
            "not" | "hence" | "new sum" | "new circ" => {
                let pos = t.iter().position(|s| s == "since").unwrap_or(t.len());
                let cfg = self.config(&t[..pos]).ok_or_else(|| perr(ln, "bad configuration"))?;
                let holds = tag != "not";
                let since = &t[(pos + 1).min(t.len())..];
                if !holds && since.iter().any(|s| s == "<") {
                    self.angle_refutation(&cfg, since, refs)?;
                } else {
                    match (tag, cfg.middle) {
                        ("new sum", None) | ("new circ", Some(_)) => return err(ln, "tag does not match configuration"),
                        _ => {}
                    }
                    let quad = quad_of(&cfg);
                    let dom = self.domain(quad, refs);
                    if !dom.iter().all(|&s| satisfies(quad, s, &cfg) == holds) {
                        return err(ln, "configuration does not follow from the cited lines");
                    }
                }
                claim.configs.push((cfg, holds));
            }
            "contradiction!" => {
                if !t.is_empty() {
                    return err(ln, "contradiction lines carry no proposition");
                }
                if !self.is_contradictory(refs) {
                    return err(ln, "cited lines are consistent");
                }
                return Ok((claim, true));
            }
            other => return err(ln, format!("unknown line type {other:?}")),
        }
        Ok((claim, false))
    }

    fn is_contradictory(&self, refs: &[usize]) -> bool {
        let mut angles = HashSet::new();
        let mut quads = HashSet::new();
        for c in self.cited(refs) {
            angles.extend(c.bounds.iter().map(|b| b.0));
            quads.extend(c.configs.iter().map(|(cfg, _)| quad_of(cfg)));
        }
        let interval = angles.iter().any(|&a| {
            let (hi, hs) = self.best(a, Side::Upper, refs);
            let (lo, ls) = self.best(a, Side::Lower, refs);
            hi < lo || (hi == lo && (hs || ls))
        });
        interval || quads.iter().any(|&qd| self.domain(qd, refs).is_empty())
    }

    fn angle_refutation(&self, cfg: &Config, since: &[String], refs: &[usize]) -> Result<()> {
        let ln = self.line_no;
        let s: Vec<&str> = since.iter().map(String::as_str).collect();
        match (cfg.middle, s.as_slice()) {
            (Some(m), [o, "<", p1, "+", p2]) => {
                let (o, p1, p2) = self.angles3(o, p1, p2)?;
                let outer: Vec<usize> = cfg.others.iter().copied().filter(|&p| p != m).collect();
                let ok = o == mk(cfg.apex, outer[0], outer[1])
                    && shared_arm(p1, p2) == Some(m)
                    && p1.0 == cfg.apex
                    && [other_arm(p1, m), other_arm(p2, m)].iter().all(|p| outer.contains(p))
                    && other_arm(p1, m) != other_arm(p2, m);
                if !ok {
                    return err(ln, "angles do not match the configuration");
                }
                let (ho, so) = self.best(o, Side::Upper, refs);
                let (l1, s1) = self.best(p1, Side::Lower, refs);
                let (l2, s2) = self.best(p2, Side::Lower, refs);
                if ho < l1 + l2 || (ho == l1 + l2 && (so || s1 || s2)) {
                    Ok(())
                } else {
                    err(ln, "cited bounds do not force the inequality")
                }
            }
            (None, [a, "+", b, "+", c, "<", "360"]) => {
                let (a, b, c) = self.angles3(a, b, c)?;
                let [x, y, z] = cfg.others;
                let mut want = vec![mk(cfg.apex, x, y), mk(cfg.apex, y, z), mk(cfg.apex, x, z)];
                let mut got = vec![a, b, c];
                want.sort_unstable();
                got.sort_unstable();
                if want != got {
                    return err(ln, "angles do not match the configuration");
                }
                let mut sum = q(0);
                let mut strict = false;
                for g in got {
                    let (v, s) = self.best(g, Side::Upper, refs);
                    sum += v;
                    strict |= s;
                }
                if sum < q(360) || (sum == q(360) && strict) {
                    Ok(())
                } else {
                    err(ln, "cited bounds do not force the inequality")
                }
            }
            _ => err(ln, "unrecognised refutation"),
        }
    }

    fn angles3(&self, a: &str, b: &str, c: &str) -> Result<(Ang, Ang, Ang)> {
        let f = |s: &str| self.angle(s).ok_or_else(|| perr(self.line_no, format!("bad angle {s}")));
        Ok((f(a)?, f(b)?, f(c)?))
    }

    /// Checks a derived bound and returns it.
    fn bound_line(&self, tag: &str, t: &[String], refs: &[usize]) -> Result<(Ang, Side, Q, bool)> {
        let ln = self.line_no;
        let s: Vec<&str> = t.iter().map(String::as_str).collect();
        let ang = |x: &str| self.angle(x).ok_or_else(|| perr(ln, format!("bad angle {x}")));
        let num = |x: &str| parse_dec(x).ok_or_else(|| perr(ln, format!("bad number {x}")));
        let side_of = |c: &str| cmp_side(c).ok_or_else(|| perr(ln, format!("bad comparator {c}")));
        // operand must be entailed with the given side; returns its strictness
        let need = |a: Ang, side: Side, v: Q| {
            self.entails(a, side, v, refs).ok_or_else(|| perr(ln, "operand bound not supported by cited lines"))
        };
        let fact_cited = |cfg: Config| {
            self.cited(refs).any(|c| c.configs.iter().any(|(f, h)| *h && *f == cfg))
        };
        let finish = |x: Ang, side: Side, claim_strict: bool, value: Q, stated: Q, strict: bool| {
            if value != stated {
                return err(ln, "arithmetic does not match");
            }
            if claim_strict && !strict {
                return err(ln, "claimed strict bound is only weak");
            }
            Ok((x, side, value, claim_strict))
        };
        match (tag, s.as_slice()) {
            ("tripod", [x, "<=", y, "+", z, c, yv, "+", zv, "=", v]) => {
                let (x, y, z) = (ang(x)?, ang(y)?, ang(z)?);
                let (side, cs) = side_of(c)?;
                let w = shared_arm(y, z).ok_or_else(|| perr(ln, "angles do not form a tripod"))?;
                if side != Side::Upper || x != mk(y.0, other_arm(y, w), other_arm(z, w)) {
                    return err(ln, "angles do not form a tripod");
                }
                let (yv, zv) = (num(yv)?, num(zv)?);
                let st = need(y, Side::Upper, yv)? | need(z, Side::Upper, zv)?;
                finish(x, side, cs, yv + zv, num(v)?, st)
            }
            ("tripod", [x, ">=", o, "-", z, c, ov, "-", zv, "=", v]) => {
                let (x, o, z) = (ang(x)?, ang(o)?, ang(z)?);
                let (side, cs) = side_of(c)?;
                let w = shared_arm(x, z).ok_or_else(|| perr(ln, "angles do not form a tripod"))?;
                if side != Side::Lower || o != mk(x.0, other_arm(x, w), other_arm(z, w)) {
                    return err(ln, "angles do not form a tripod");
                }
                let (ov, zv) = (num(ov)?, num(zv)?);
                let st = need(o, Side::Lower, ov)? | need(z, Side::Upper, zv)?;
                finish(x, side, cs, ov - zv, num(v)?, st)
            }
            ("tripod", [x, "<=", "360", "-", y, "-", z, c, "360", "-", yv, "-", zv, "=", v]) => {
                let (x, y, z) = (ang(x)?, ang(y)?, ang(z)?);
                let (side, cs) = side_of(c)?;
                if side != Side::Upper || !self.three_rays(x, y, z) {
                    return err(ln, "angles are not the three angles of three rays");
                }
                let (yv, zv) = (num(yv)?, num(zv)?);
                let st = need(y, Side::Lower, yv)? | need(z, Side::Lower, zv)?;
                finish(x, side, cs, q(360) - yv - zv, num(v)?, st)
            }
            ("sum", [x, "=", y, "+", z, c, yv, "+", zv, "=", v]) => {
                let (x, y, z) = (ang(x)?, ang(y)?, ang(z)?);
                let (side, cs) = side_of(c)?;
                let w = shared_arm(y, z).ok_or_else(|| perr(ln, "angles do not split"))?;
                if x != mk(y.0, other_arm(y, w), other_arm(z, w)) || !fact_cited(self.between(x, w)) {
                    return err(ln, "no cited betweenness for this sum");
                }
                let (yv, zv) = (num(yv)?, num(zv)?);
                let st = need(y, side, yv)? | need(z, side, zv)?;
                finish(x, side, cs, yv + zv, num(v)?, st)
            }
            ("sum", [x, "=", o, "-", z, c, ov, "-", zv, "=", v]) => {
                let (x, o, z) = (ang(x)?, ang(o)?, ang(z)?);
                let (side, cs) = side_of(c)?;
                let w = shared_arm(x, z).ok_or_else(|| perr(ln, "angles do not split"))?;
                if o != mk(x.0, other_arm(x, w), other_arm(z, w)) || !fact_cited(self.between(o, w)) {
                    return err(ln, "no cited betweenness for this difference");
                }
                let (ov, zv) = (num(ov)?, num(zv)?);
                let st = need(o, side, ov)? | need(z, side.flip(), zv)?;
                finish(x, side, cs, ov - zv, num(v)?, st)
            }
            ("circ", [x, "=", "360", "-", y, "-", z, c, "360", "-", yv, "-", zv, "=", v]) => {
                let (x, y, z) = (ang(x)?, ang(y)?, ang(z)?);
                let (side, cs) = side_of(c)?;
                if !self.three_rays(x, y, z) {
                    return err(ln, "angles are not the three angles of three rays");
                }
                let mut pts: Vec<usize> = vec![x.1, x.2, y.1, y.2, z.1, z.2];
                pts.sort_unstable();
                pts.dedup();
                let others = [pts[0], pts[1], pts[2]];
                if !fact_cited(Config { apex: x.0, others, middle: None }) {
                    return err(ln, "no cited containment for this sum");
                }
                let (yv, zv) = (num(yv)?, num(zv)?);
                let st = need(y, side.flip(), yv)? | need(z, side.flip(), zv)?;
                finish(x, side, cs, q(360) - yv - zv, num(v)?, st)
            }
            ("triangle", [x, "=", "180", "-", y, "-", z, c, "180", "-", yv, "-", zv, "=", v]) => {
                let (x, y, z) = (ang(x)?, ang(y)?, ang(z)?);
                let (side, cs) = side_of(c)?;
                if self.third(x, y) != Some(z) {
                    return err(ln, "angles are not the angles of one triangle");
                }
                let (yv, zv) = (num(yv)?, num(zv)?);
                let st = need(y, side.flip(), yv)? | need(z, side.flip(), zv)?;
                finish(x, side, cs, q(180) - yv - zv, num(v)?, st)
            }
            ("larger" | "smaller", [x, c, "(", "180", "-", z, ")", "/", "2", c2, "(", "180", "-", zv, ")", "/", "2", "=", v]) => {
                let (x, z) = (ang(x)?, ang(z)?);
                let (side, cs) = side_of(c)?;
                if c != c2 || !cs {
                    return err(ln, "malformed halving chain");
                }
                let w = self.third(x, z).ok_or_else(|| perr(ln, "angles are not in one triangle"))?;
                let ok = match (tag, side) {
                    ("larger", Side::Lower) => self.known_less(w, x),
                    ("smaller", Side::Upper) => self.known_less(x, w),
                    _ => false,
                };
                if !ok {
                    return err(ln, "the order does not give this comparison");
                }
                let zv = num(zv)?;
                need(z, side.flip(), zv)?;
                // x and w share 180 - z, and x is the larger or smaller of the two
                finish(x, side, true, (q(180) - zv) / q(2), num(v)?, true)
            }
            ("order", [x, c0, y, c, yv]) => {
                let (x, y) = (ang(x)?, ang(y)?);
                let (side, first_strict) = side_of(c0)?;
                let (side2, cs) = side_of(c)?;
                if side != side2 || !first_strict {
                    return err(ln, "malformed order chain");
                }
                let ok = match side {
                    Side::Upper => self.known_less(x, y),
                    Side::Lower => self.known_less(y, x),
                };
                if !ok {
                    return err(ln, "the order does not give this comparison");
                }
                let yv = num(yv)?;
                let st = need(y, side, yv)?;
                if cs && !st {
                    return err(ln, "claimed strict bound is only weak");
                }
                Ok((x, side, yv, true))
            }
            _ => err(ln, format!("unrecognised {tag} line")),
        }
    }

    /// `outer` split by the ray to `w`.
    fn between(&self, outer: Ang, w: usize) -> Config {
        let mut others = [outer.1, outer.2, w];
        others.sort_unstable();
        Config { apex: outer.0, others, middle: Some(w) }
    }

    fn three_rays(&self, x: Ang, y: Ang, z: Ang) -> bool {
        if x.0 != y.0 || x.0 != z.0 || x == y || y == z || x == z {
            return false;
        }
        let set: HashSet<usize> = [x.1, x.2, y.1, y.2, z.1, z.2].into();
        set.len() == 3
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_header(lines: &[&str]) -> Result<(usize, HashMap<(usize, usize), usize>, bool, usize)> {
    let mut it = lines.iter().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (i, first) = it.next().ok_or_else(|| perr(1, "empty transcript"))?;
    let body = first.trim().strip_prefix("TEST OF EDGE ORDER ").ok_or_else(|| perr(i + 1, "missing order header"))?;
    let toks: Vec<&str> = body.split(" < ").map(str::trim).collect();
    let m = toks.len();
    let n = (1..=26).find(|&n| n * (n - 1) / 2 == m).ok_or_else(|| perr(i + 1, "order length is not a pair count"))?;
    let mut rank = HashMap::new();
    for (r, t) in toks.iter().enumerate() {
        let c: Vec<char> = t.chars().collect();
        let pair = match c.as_slice() {
            [a, b] => point(*a, n).zip(point(*b, n)),
            _ => None,
        };
        let (a, b) = pair.filter(|(a, b)| a != b).ok_or_else(|| perr(i + 1, format!("bad pair {t}")))?;
        if rank.insert((a.min(b), a.max(b)), r).is_some() {
            return err(i + 1, format!("pair {t} repeated"));
        }
    }
    let (j, mode) = it.next().ok_or_else(|| perr(i + 2, "missing mode line"))?;
    let extremal = match mode.trim() {
        EXTREMAL_HEADER => true,
        FULL_HEADER => false,
        _ => return err(j + 1, "unknown mode line"),
    };
    let start = lines.iter().position(|l| l.trim() == COLUMNS).ok_or_else(|| perr(j + 1, "missing column header"))?;
    Ok((n, rank, extremal, start + 1))
}

/// Verifies a rendered transcript.
pub fn check_proof(text: &str) -> Result<CheckOutcome> {
    let lines: Vec<&str> = text.lines().collect();
    let (n, rank, extremal, body) = parse_header(&lines)?;
    let r = |a: usize, b: usize| rank[&(a.min(b), a.max(b))];
    let nn: Vec<usize> = (0..n).map(|s| (0..n).filter(|&t| t != s).min_by_key(|&t| r(s, t)).expect("n >= 2")).collect();
    let fnb: Vec<usize> = (0..n).map(|s| (0..n).filter(|&t| t != s).max_by_key(|&t| r(s, t)).expect("n >= 2")).collect();
    let mut ck = Checker {
        n,
        rank,
        extremal,
        nn,
        fnb,
        claims: HashMap::new(),
        visible: Vec::new(),
        visible_set: HashSet::new(),
        line_no: 0,
    };
    let mut stack = vec![Frame { kind: FrameKind::Root, closed: false }];
    let mut expected = 1;
    let mut noted = false;

    for (idx, raw) in lines.iter().enumerate().skip(body) {
        let ln = idx + 1;
        ck.line_no = ln;
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        if noted {
            return err(ln, "text after the closing note");
        }
        if let Some(rest) = text.strip_prefix("CASE ANALYSIS using points ") {
            let top = stack.last().expect("root frame");
            if top.closed || matches!(top.kind, FrameKind::Split { .. }) {
                return err(ln, "case analysis in a closed block");
            }
            let spec = rest.strip_suffix(':').ok_or_else(|| perr(ln, "missing colon"))?;
            let cfg = spec
                .split_once(',')
                .and_then(|(a, t)| ck.config(&[a.to_string(), "in".to_string(), t.to_string()]))
                .ok_or_else(|| perr(ln, "bad case points"))?;
            stack.push(Frame {
                kind: FrameKind::Split { apex: cfg.apex, others: cfg.others, seen: Vec::new(), vis_len: ck.visible.len() },
                closed: false,
            });
            continue;
        }
        if text == SPLIT_END {
            close_branch(&mut stack, &mut ck, ln)?;
            match stack.pop() {
                Some(Frame { kind: FrameKind::Split { seen, .. }, .. }) if seen.len() == 4 => {}
                _ => return err(ln, "case analysis does not have four cases"),
            }
            stack.last_mut().expect("parent frame").closed = true;
            continue;
        }
        if let Some(note) = text.strip_prefix(NOTE_PREFIX) {
            if stack.len() != 1 || note.is_empty() {
                return err(ln, "note inside a case analysis");
            }
            noted = true;
            continue;
        }
        let fields: Vec<&str> = text.splitn(4, '\t').collect();
        let num = fields[0]
            .strip_suffix('.')
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| perr(ln, "missing line number"))?;
        if num != expected {
            return err(ln, format!("expected line {expected}, found {num}"));
        }
        expected += 1;
        let tag = fields.get(1).copied().unwrap_or("");
        if let Some(rest) = tag.strip_prefix('(') {
            // an assumption opening the next case
            let (roman, rest) = rest.split_once(") ASSUMING ").ok_or_else(|| perr(ln, "bad assumption"))?;
            let fact = rest.strip_suffix("...").ok_or_else(|| perr(ln, "bad assumption"))?;
            if matches!(stack.last().map(|f| &f.kind), Some(FrameKind::Branch)) {
                close_branch(&mut stack, &mut ck, ln)?;
            }
            let cfg = ck.config(&tokens(fact)).ok_or_else(|| perr(ln, "bad assumption"))?;
            let Some(Frame { kind: FrameKind::Split { apex, others, seen, .. }, .. }) = stack.last_mut() else {
                return err(ln, "assumption outside a case analysis");
            };
            let want = ["i", "ii", "iii", "iv"].get(seen.len()).copied();
            if want != Some(roman) || cfg.apex != *apex || cfg.others != *others || seen.contains(&cfg.middle) {
                return err(ln, "assumption does not continue the case analysis");
            }
            seen.push(cfg.middle);
            stack.push(Frame { kind: FrameKind::Branch, closed: false });
            ck.claims.insert(num, Claim { configs: vec![(cfg, true)], ..Claim::default() });
            ck.visible.push(num);
            ck.visible_set.insert(num);
            continue;
        }
        let top = stack.last().expect("root frame");
        if top.closed || matches!(top.kind, FrameKind::Split { .. }) {
            return err(ln, "line in a closed block");
        }
        let prop = fields.get(2).copied().unwrap_or("");
        let refs: Vec<usize> = fields
            .get(3)
            .copied()
            .unwrap_or("")
            .split('.')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<usize>().map_err(|_| perr(ln, "bad reference")))
            .collect::<Result<_>>()?;
        if refs.iter().any(|&r| r >= num) {
            return err(ln, "reference to a later line");
        }
        let (claim, closes) = ck.body_line(num, tag, prop, &refs)?;
        ck.claims.insert(num, claim);
        ck.visible.push(num);
        ck.visible_set.insert(num);
        if closes {
            stack.last_mut().expect("frame").closed = true;
        }
    }
    match stack.as_slice() {
        [root] if root.closed && !noted => Ok(CheckOutcome::Refutation),
        [root] if !root.closed => Ok(CheckOutcome::NonRefutation),
        [_] => err(lines.len(), "closed transcript carries a failure note"),
        _ => err(lines.len(), "unterminated case analysis"),
    }
}

fn close_branch(stack: &mut Vec<Frame>, ck: &mut Checker, ln: usize) -> Result<()> {
    match stack.pop() {
        Some(Frame { kind: FrameKind::Branch, closed: true }) => {}
        _ => return err(ln, "case does not end in a contradiction"),
    }
    if let Some(Frame { kind: FrameKind::Split { vis_len, .. }, .. }) = stack.last() {
        for r in ck.visible.drain(*vis_len..) {
            ck.visible_set.remove(&r);
        }
    }
    Ok(())
}
