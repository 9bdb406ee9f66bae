//! Angle intervals, four-point configuration domains and the propagation
//! rules connecting them.

use std::sync::Arc;

use super::log::{BoundRule, Line, LineId, Prop, SlotReason, Tag};
use super::setup::{Setup, ALL_TYPES};
use super::types::{Alt, Angle, Bnd, Dir, Fact, DEG_180, DEG_360, MIN_STEP, UNIT};

pub const NONE: LineId = usize::MAX;

/// What removed a configuration type from a quad's domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Origin {
    Boundary,
    /// alternative `k` of slot `slot`, asserted (`true`) or refuted
    Fact { slot: u32, k: u8, holds: bool },
}

#[derive(Debug, Clone, Copy)]
struct Elim {
    line: LineId,
    origin: Origin,
}

const NO_ELIM: Elim = Elim { line: NONE, origin: Origin::Boundary };

/// Result of running the rules to a fixpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Fixpoint,
    /// The line number of the contradiction.
    Contradiction(LineId),
}

type Step = Result<bool, LineId>;

#[derive(Debug, Clone)]
pub struct State {
    pub(crate) setup: Arc<Setup>,
    lo: Vec<Bnd>,
    hi: Vec<Bnd>,
    lo_j: Vec<LineId>,
    hi_j: Vec<LineId>,
    dom: Vec<u8>,
    elim: Vec<[Elim; 7]>,
    truth: Vec<[LineId; 4]>,
    dirty: Vec<bool>,
    boundary_line: LineId,
    pub(crate) next_id: LineId,
    pub(crate) log: Option<Vec<Line>>,
}

impl State {
    /// All angles open in `(0, 180)`, all configurations possible.
    pub(crate) fn new(setup: Arc<Setup>, recording: bool) -> Self {
        let na = setup.angles.len();
        let nq = setup.quads.len();
        let ns = setup.slots.len();
        State {
            lo: vec![Bnd { value: 0, strict: true }; na],
            hi: vec![Bnd { value: DEG_180, strict: true }; na],
            lo_j: vec![0; na],
            hi_j: vec![0; na],
            dom: vec![ALL_TYPES; nq],
            elim: vec![[NO_ELIM; 7]; nq],
            truth: vec![[NONE; 4]; ns],
            dirty: vec![false; nq],
            boundary_line: NONE,
            next_id: 1,
            log: recording.then(Vec::new),
            setup,
        }
    }

    /// `Some(true)` if the alternative is established, `Some(false)` if it is
    /// excluded, `None` if open.
    pub fn status(&self, slot: usize, k: usize) -> Option<bool> {
        let q = self.setup.slots[slot].quad;
        let types = self.setup.alt_types(slot, k);
        if self.dom[q] & types == 0 {
            Some(false)
        } else if self.dom[q] & !types == 0 {
            Some(true)
        } else {
            None
        }
    }

    pub(crate) fn has_true(&self, slot: usize) -> bool {
        self.truth[slot].iter().any(|&l| l != NONE)
    }

    fn emit(&mut self, tag: Tag, refs: impl FnOnce() -> Vec<LineId>, prop: impl FnOnce(&Setup) -> Prop) -> LineId {
        let id = self.next_id;
        self.next_id += 1;
        if let Some(log) = self.log.as_mut() {
            log.push(Line { number: id, tag, prop: prop(&self.setup), refs: refs() });
        }
        id
    }

    fn contradiction(&mut self, refs: Vec<LineId>) -> LineId {
        self.emit(Tag::Contradiction, || refs, |_| Prop::Contradiction)
    }

    /// Tightens the upper bound of angle `a` if `b` improves it enough or
    /// empties the interval.
    fn set_hi(&mut self, a: usize, b: Bnd, tag: Tag, refs: &[LineId], rule: impl FnOnce() -> BoundRule) -> Step {
        let cur = self.hi[a];
        if !(b.value < cur.value || (b.value == cur.value && b.strict && !cur.strict)) {
            return Ok(false);
        }
        let lo = self.lo[a];
        let empty = b.value < lo.value || (b.value == lo.value && (b.strict || lo.strict));
        if !empty && b.value > cur.value - MIN_STEP && b.value != cur.value {
            return Ok(false);
        }
        let angle = self.setup.angle(a);
        let id = self.emit(tag, || refs.to_vec(), |_| Prop::Bound { angle, dir: Dir::Upper, bound: b, rule: rule() });
        self.hi[a] = b;
        self.hi_j[a] = id;
        if empty {
            let lj = self.lo_j[a];
            return Err(self.contradiction(vec![id, lj]));
        }
        Ok(true)
    }

    fn set_lo(&mut self, a: usize, b: Bnd, tag: Tag, refs: &[LineId], rule: impl FnOnce() -> BoundRule) -> Step {
        let cur = self.lo[a];
        if !(b.value > cur.value || (b.value == cur.value && b.strict && !cur.strict)) {
            return Ok(false);
        }
        let hi = self.hi[a];
        let empty = b.value > hi.value || (b.value == hi.value && (b.strict || hi.strict));
        if !empty && b.value < cur.value + MIN_STEP && b.value != cur.value {
            return Ok(false);
        }
        let angle = self.setup.angle(a);
        let id = self.emit(tag, || refs.to_vec(), |_| Prop::Bound { angle, dir: Dir::Lower, bound: b, rule: rule() });
        self.lo[a] = b;
        self.lo_j[a] = id;
        if empty {
            let hj = self.hi_j[a];
            return Err(self.contradiction(vec![hj, id]));
        }
        Ok(true)
    }

    fn eliminate(&mut self, q: usize, types: u8, line: LineId, origin: Origin) {
        let hit = self.dom[q] & types;
        if hit == 0 {
            return;
        }
        for t in 0..7 {
            if hit >> t & 1 == 1 {
                self.elim[q][t] = Elim { line, origin };
            }
        }
        self.dom[q] &= !types;
        self.dirty[q] = true;
    }

    /// Seeds the bounds implied by the side orders of triangles and marks
    /// farthest neighbours as hull vertices.
    pub(crate) fn seed(&mut self) {
        let setup = self.setup.clone();
        let mut classes: [Vec<usize>; 3] = Default::default();
        for t in &setup.tris {
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                let (lj, lk) = (t.less[i][j], t.less[i][k]);
                let (gj, gk) = (t.less[j][i], t.less[k][i]);
                if lj && lk {
                    classes[0].push(t.angles[i]);
                } else if lj || lk {
                    classes[1].push(t.angles[i]);
                } else if gj && gk {
                    classes[2].push(t.angles[i]);
                }
            }
        }
        let spec = [(Tag::Smallest, Dir::Upper, 60), (Tag::Dominated, Dir::Upper, 90), (Tag::Largest, Dir::Lower, 60)];
        for (ids, (tag, dir, deg)) in classes.iter_mut().zip(spec) {
            if ids.is_empty() {
                continue;
            }
            ids.sort_by_key(|&a| setup.angle(a));
            let value = deg * UNIT;
            let list = ids.clone();
            let line = self.emit(tag, Vec::new, |s| Prop::Seeds {
                angles: list.iter().map(|&a| s.angle(a)).collect(),
                dir,
                value,
            });
            for &a in ids.iter() {
                let b = Bnd { value, strict: true };
                match dir {
                    Dir::Upper => {
                        self.hi[a] = b;
                        self.hi_j[a] = line;
                    }
                    Dir::Lower => {
                        self.lo[a] = b;
                        self.lo_j[a] = line;
                    }
                }
            }
        }
        if !setup.fn_image.is_empty() {
            let pts = setup.fn_image.clone();
            let line = self.emit(Tag::OnBoundary, Vec::new, |_| Prop::OnBoundary { points: pts });
            self.boundary_line = line;
            for (q, quad) in setup.quads.iter().enumerate() {
                for (i, p) in quad.iter().enumerate() {
                    if setup.fn_image.binary_search(p).is_ok() {
                        self.eliminate(q, 1 << (3 + i), line, Origin::Boundary);
                    }
                }
            }
        }
    }

    /// Adds alternative `k` of `slot` as a case assumption.
    pub(crate) fn assume(&mut self, slot: usize, k: usize, case: usize) {
        let fact = self.setup.slots[slot].fact(k);
        let line = self.emit(Tag::Assume, Vec::new, |_| Prop::Assume { fact, case });
        self.truth[slot][k] = line;
        let q = self.setup.slots[slot].quad;
        let types = self.setup.alt_types(slot, k);
        self.eliminate(q, ALL_TYPES & !types, line, Origin::Fact { slot: slot as u32, k: k as u8, holds: true });
    }

    /// Adds a bound as a premise line.
    pub(crate) fn give_bound(&mut self, a: usize, dir: Dir, b: Bnd) -> Result<(), LineId> {
        let angle = self.setup.angle(a);
        let id = self.emit(Tag::Assume, Vec::new, |_| Prop::Given { angle, dir, bound: b });
        let (empty, other) = match dir {
            Dir::Upper => {
                self.hi[a] = b;
                self.hi_j[a] = id;
                let lo = self.lo[a];
                (b.value < lo.value || (b.value == lo.value && (b.strict || lo.strict)), self.lo_j[a])
            }
            Dir::Lower => {
                self.lo[a] = b;
                self.lo_j[a] = id;
                let hi = self.hi[a];
                (b.value > hi.value || (b.value == hi.value && (b.strict || hi.strict)), self.hi_j[a])
            }
        };
        if empty {
            return Err(self.contradiction(vec![other, id]));
        }
        Ok(())
    }

    /// Applies all rules until nothing changes.
    pub fn propagate(&mut self) -> Propagation {
        match self.run() {
            Ok(()) => Propagation::Fixpoint,
            Err(line) => Propagation::Contradiction(line),
        }
    }

    fn run(&mut self) -> Result<(), LineId> {
        let setup = self.setup.clone();
        let mut changed = true;
        // quads touched by seeding or assumptions
        for q in 0..setup.quads.len() {
            if self.dirty[q] {
                self.settle(q)?;
            }
        }
        while changed {
            changed = false;
            for t in 0..setup.tris.len() {
                changed |= self.triangle_rules(&setup, t)?;
            }
            for s in 0..setup.slots.len() {
                changed |= self.slot_rules(&setup, s)?;
                let q = setup.slots[s].quad;
                if self.dirty[q] {
                    changed |= self.settle(q)?;
                }
            }
        }
        Ok(())
    }

    fn triangle_rules(&mut self, setup: &Setup, t: usize) -> Step {
        let tri = &setup.tris[t];
        let mut changed = false;
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let (x, y, z) = (tri.angles[i], tri.angles[j], tri.angles[k]);
            let (ya, za) = (setup.angle(y), setup.angle(z));

            let (ly, lz) = (self.lo[y], self.lo[z]);
            let b = Bnd { value: DEG_180 - ly.value - lz.value, strict: ly.strict || lz.strict };
            changed |= self.set_hi(x, b, Tag::Triangle, &[self.lo_j[y], self.lo_j[z]], || BoundRule::Triangle {
                y: ya,
                z: za,
                yb: ly,
                zb: lz,
            })?;
            let (hy, hz) = (self.hi[y], self.hi[z]);
            let b = Bnd { value: DEG_180 - hy.value - hz.value, strict: hy.strict || hz.strict };
            changed |= self.set_lo(x, b, Tag::Triangle, &[self.hi_j[y], self.hi_j[z]], || BoundRule::Triangle {
                y: ya,
                z: za,
                yb: hy,
                zb: hz,
            })?;

            for (j, k) in [(j, k), (k, j)] {
                if !tri.less[i][j] {
                    continue;
                }
                // angle i < angle j, with k the third angle
                let (aj, ak) = (tri.angles[j], tri.angles[k]);
                let (xa, ja, ka) = (setup.angle(x), setup.angle(aj), setup.angle(ak));
                let hj = self.hi[aj];
                changed |= self.set_hi(x, Bnd { value: hj.value, strict: true }, Tag::Order, &[self.hi_j[aj]], || {
                    BoundRule::Order { y: ja, yb: hj }
                })?;
                let li = self.lo[x];
                changed |= self.set_lo(aj, Bnd { value: li.value, strict: true }, Tag::Order, &[self.lo_j[x]], || {
                    BoundRule::Order { y: xa, yb: li }
                })?;
                let lk = self.lo[ak];
                let v = DEG_180 - lk.value;
                let up = Bnd { value: v.div_euclid(2) + v.rem_euclid(2), strict: true };
                changed |= self.set_hi(x, up, Tag::Smaller, &[self.lo_j[ak]], || BoundRule::Half { z: ka, zb: lk })?;
                let hk = self.hi[ak];
                let v = DEG_180 - hk.value;
                let down = Bnd { value: v.div_euclid(2), strict: true };
                changed |= self.set_lo(aj, down, Tag::Larger, &[self.hi_j[ak]], || BoundRule::Half { z: ka, zb: hk })?;
            }
        }
        Ok(changed)
    }

    fn slot_rules(&mut self, setup: &Setup, s: usize) -> Step {
        let slot = &setup.slots[s];
        let mut changed = false;
        let (u01, u12, u02) = (slot.u01, slot.u12, slot.u02);

        for (x, y, z) in [(u02, u01, u12), (u12, u01, u02), (u01, u02, u12)] {
            let (xa, ya, za) = (setup.angle(x), setup.angle(y), setup.angle(z));
            let (hy, hz) = (self.hi[y], self.hi[z]);
            let b = Bnd { value: hy.value + hz.value, strict: hy.strict || hz.strict };
            changed |= self.set_hi(x, b, Tag::Tripod, &[self.hi_j[y], self.hi_j[z]], || BoundRule::TripodUpper {
                y: ya,
                z: za,
                yb: hy,
                zb: hz,
            })?;
            for (p, o, oa) in [(y, z, za), (z, y, ya)] {
                let (lx, ho) = (self.lo[x], self.hi[o]);
                let b = Bnd { value: lx.value - ho.value, strict: lx.strict || ho.strict };
                changed |= self.set_lo(p, b, Tag::Tripod, &[self.lo_j[x], self.hi_j[o]], || BoundRule::TripodLower {
                    outer: xa,
                    other: oa,
                    ob: lx,
                    tb: ho,
                })?;
            }
            let (ly, lz) = (self.lo[y], self.lo[z]);
            let b = Bnd { value: DEG_360 - ly.value - lz.value, strict: ly.strict || lz.strict };
            changed |= self.set_hi(x, b, Tag::Tripod, &[self.lo_j[y], self.lo_j[z]], || BoundRule::TripodCirc {
                y: ya,
                z: za,
                yb: ly,
                zb: lz,
            })?;
        }

        let q = slot.quad;
        for k in 0..4 {
            let types = setup.alt_types(s, k);
            if self.dom[q] & types == 0 {
                continue;
            }
            let refuted = if k < 3 {
                let (o, p1, p2) = slot.between_angles(k);
                let (ho, l1, l2) = (self.hi[o], self.lo[p1], self.lo[p2]);
                let sum = l1.value + l2.value;
                if ho.value < sum || (ho.value == sum && (ho.strict || l1.strict || l2.strict)) {
                    let reason = SlotReason::AngleSum { outer: setup.angle(o), parts: [setup.angle(p1), setup.angle(p2)] };
                    Some((vec![self.hi_j[o], self.lo_j[p1], self.lo_j[p2]], reason))
                } else {
                    None
                }
            } else {
                let hs = [self.hi[u01], self.hi[u12], self.hi[u02]];
                let sum: i64 = hs.iter().map(|b| b.value).sum();
                if sum < DEG_360 || (sum == DEG_360 && hs.iter().any(|b| b.strict)) {
                    let reason = SlotReason::HullSum { angles: [setup.angle(u01), setup.angle(u12), setup.angle(u02)] };
                    Some((vec![self.hi_j[u01], self.hi_j[u12], self.hi_j[u02]], reason))
                } else {
                    None
                }
            };
            if let Some((refs, reason)) = refuted {
                let fact = slot.fact(k);
                let line = self.emit(Tag::Not, || refs, |_| Prop::Fact { fact, holds: false, reason });
                self.eliminate(q, types, line, Origin::Fact { slot: s as u32, k: k as u8, holds: false });
                changed = true;
            }
        }

        for k in 0..4 {
            let fl = self.truth[s][k];
            if fl == NONE {
                continue;
            }
            if k < 3 {
                let (o, p1, p2) = slot.between_angles(k);
                let (oa, a1, a2) = (setup.angle(o), setup.angle(p1), setup.angle(p2));
                let (l1, l2) = (self.lo[p1], self.lo[p2]);
                let b = Bnd { value: l1.value + l2.value, strict: l1.strict || l2.strict };
                changed |= self.set_lo(o, b, Tag::Sum, &[fl, self.lo_j[p1], self.lo_j[p2]], || BoundRule::SumOuter {
                    y: a1,
                    z: a2,
                    yb: l1,
                    zb: l2,
                })?;
                for (p, q2, qa) in [(p1, p2, a2), (p2, p1, a1)] {
                    let (ho, lq) = (self.hi[o], self.lo[q2]);
                    let b = Bnd { value: ho.value - lq.value, strict: ho.strict || lq.strict };
                    changed |= self.set_hi(p, b, Tag::Sum, &[fl, self.hi_j[o], self.lo_j[q2]], || BoundRule::SumPart {
                        outer: oa,
                        other: qa,
                        ob: ho,
                        tb: lq,
                    })?;
                    let (lo_o, hq) = (self.lo[o], self.hi[q2]);
                    let b = Bnd { value: lo_o.value - hq.value, strict: lo_o.strict || hq.strict };
                    changed |= self.set_lo(p, b, Tag::Sum, &[fl, self.lo_j[o], self.hi_j[q2]], || BoundRule::SumPart {
                        outer: oa,
                        other: qa,
                        ob: lo_o,
                        tb: hq,
                    })?;
                }
            } else {
                for (x, y, z) in [(u01, u12, u02), (u12, u01, u02), (u02, u01, u12)] {
                    let (ya, za) = (setup.angle(y), setup.angle(z));
                    let (hy, hz) = (self.hi[y], self.hi[z]);
                    let b = Bnd { value: DEG_360 - hy.value - hz.value, strict: hy.strict || hz.strict };
                    changed |= self.set_lo(x, b, Tag::Circ, &[fl, self.hi_j[y], self.hi_j[z]], || BoundRule::Circ {
                        y: ya,
                        z: za,
                        yb: hy,
                        zb: hz,
                    })?;
                }
            }
        }
        Ok(changed)
    }

    /// Reports an empty domain or records alternatives that became certain.
    fn settle(&mut self, q: usize) -> Step {
        self.dirty[q] = false;
        let setup = self.setup.clone();
        if self.dom[q] == 0 {
            let mut refs: Vec<LineId> = self.elim[q].iter().map(|e| e.line).collect();
            refs.sort_unstable();
            refs.dedup();
            return Err(self.contradiction(refs));
        }
        let mut changed = false;
        for &s in &setup.quad_slots[q] {
            for k in 0..4 {
                if self.truth[s][k] != NONE {
                    continue;
                }
                let types = setup.alt_types(s, k);
                if self.dom[q] & !types != 0 {
                    continue;
                }
                let cause: Vec<Elim> = (0..7)
                    .filter(|t| (ALL_TYPES & !types) >> t & 1 == 1)
                    .map(|t| self.elim[q][t])
                    .collect();
                let mut refs: Vec<LineId> = cause.iter().map(|e| e.line).collect();
                refs.sort_unstable();
                refs.dedup();
                let local = cause.iter().all(|e| match e.origin {
                    Origin::Boundary => true,
                    Origin::Fact { slot, .. } => slot as usize == s,
                });
                let fact = setup.slots[s].fact(k);
                let tag = match (local, fact.alt) {
                    (true, _) => Tag::Hence,
                    (false, Alt::Middle(_)) => Tag::NewSum,
                    (false, Alt::Hull) => Tag::NewCirc,
                };
                let mut cited: Vec<Fact> = Vec::new();
                for e in &cause {
                    if let Origin::Fact { slot, k, holds: true } = e.origin {
                        let f = setup.slots[slot as usize].fact(k as usize);
                        if !cited.contains(&f) {
                            cited.push(f);
                        }
                    }
                }
                let line = self.emit(tag, || refs, |_| Prop::Fact {
                    fact,
                    holds: true,
                    reason: SlotReason::FourPoint { cited },
                });
                self.truth[s][k] = line;
                changed = true;
            }
        }
        Ok(changed)
    }

    pub fn bounds_of(&self, a: Angle) -> (Bnd, Bnd) {
        let id = self.setup.angle_id(a);
        (self.lo[id], self.hi[id])
    }
}
