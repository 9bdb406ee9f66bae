//! Static data derived from the order under test: which angle comparisons
//! are known, and the index tables for angles, triangles, four-point sets
//! and slots.

use super::types::{Alt, Angle, Fact};
use super::ConstraintMode;
use crate::space::{order_neighbour_maps, pair_count, pair_index, EdgeOrder};

/// A triangle `{p0 < p1 < p2}`; `angles[k]` is the angle at `p_k`.
#[derive(Debug, Clone)]
pub struct Tri {
    pub angles: [usize; 3],
    /// `less[i][j]`: angle `i` is known to be smaller than angle `j`.
    pub less: [[bool; 3]; 3],
}

/// An apex with a sorted triple of further points.
#[derive(Debug, Clone)]
pub struct Slot {
    pub apex: usize,
    pub t: [usize; 3],
    pub quad: usize,
    /// local index of the apex in its quad
    pub la: usize,
    /// local indices of `t` in the quad
    pub lt: [usize; 3],
    /// angle ids `(t0,t1)`, `(t1,t2)`, `(t0,t2)`
    pub u01: usize,
    pub u12: usize,
    pub u02: usize,
}

/// Alternatives of a slot in case order: middle `t1`, middle `t0`, middle
/// `t2`, hull.
pub const CASE_ORDER: [usize; 4] = [1, 0, 2, 3];

impl Slot {
    /// Alternative `k`: 0..3 is "t_k in the middle", 3 is "apex inside".
    pub fn fact(&self, k: usize) -> Fact {
        let alt = if k == 3 { Alt::Hull } else { Alt::Middle(self.t[k]) };
        Fact::new(self.apex, self.t, alt)
    }

    /// For a middle alternative: (outer angle, the two parts).
    pub fn between_angles(&self, k: usize) -> (usize, usize, usize) {
        match k {
            0 => (self.u12, self.u01, self.u02),
            1 => (self.u02, self.u01, self.u12),
            2 => (self.u01, self.u02, self.u12),
            _ => unreachable!("hull alternative has no outer angle"),
        }
    }
}

/// Convex split containing the local pair `{i, j}`.
pub fn split_of(i: usize, j: usize) -> usize {
    let other = if i == 0 { j } else if j == 0 { i } else { 6 - i - j };
    other - 1
}

/// Configuration types of a quad compatible with alternative `u` seen from
/// local apex `a` (`u == a` is the hull alternative). Bits 0..3 are the
/// convex splits, bit `3 + i` is "point `i` inside the other three".
pub fn types_of(a: usize, u: usize) -> u8 {
    if u == a {
        1 << (3 + a)
    } else {
        (1 << split_of(a, u)) | (1 << (3 + u))
    }
}

pub const ALL_TYPES: u8 = 0x7f;

#[derive(Debug, Clone)]
pub struct Setup {
    pub n: usize,
    pub m: usize,
    pub mode: ConstraintMode,
    pub order: EdgeOrder,
    pub angles: Vec<Option<Angle>>,
    pub tris: Vec<Tri>,
    pub quads: Vec<[usize; 4]>,
    pub slots: Vec<Slot>,
    /// slot ids of each quad, by local apex
    pub quad_slots: Vec<[usize; 4]>,
    /// sorted, deduplicated farthest-neighbour image
    pub fn_image: Vec<usize>,
}

impl Setup {
    pub fn new(order: &EdgeOrder, mode: ConstraintMode) -> Self {
        let n = order.n();
        let m = pair_count(n);
        let maps = order_neighbour_maps(order);
        let mut angles = vec![None; n * m];
        for z in 0..n {
            for x in 0..n {
                for y in x + 1..n {
                    if x != z && y != z {
                        angles[z * m + pair_index(n, x, y)] = Some(Angle::new(z, x, y));
                    }
                }
            }
        }
        let known_shorter = |x: usize, y: usize, z: usize| -> bool {
            // d(x,y) < d(x,z), as far as the mode reveals it
            match mode {
                ConstraintMode::FullOrder => order.rank(x, y) < order.rank(x, z),
                ConstraintMode::ExtremalOnly => maps.nn[x] == y || maps.fn_[x] == z,
            }
        };
        let mut tris = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let p = [a, b, c];
                    let ang = |k: usize| {
                        let (x, y) = (p[(k + 1) % 3], p[(k + 2) % 3]);
                        p[k] * m + pair_index(n, x, y)
                    };
                    // angle k is opposite the side {p[k+1], p[k+2]}; angle i < angle j iff
                    // the side opposite i is shorter, and those sides share p[k] for the third k
                    let mut less = [[false; 3]; 3];
                    for i in 0..3 {
                        for j in 0..3 {
                            if i != j {
                                let shared = 3 - i - j;
                                less[i][j] = known_shorter(p[shared], p[j], p[i]);
                            }
                        }
                    }
                    for k in 0..3 {
                        for i in 0..3 {
                            for j in 0..3 {
                                if less[i][k] && less[k][j] {
                                    less[i][j] = true;
                                }
                            }
                        }
                    }
                    tris.push(Tri { angles: [ang(0), ang(1), ang(2)], less });
                }
            }
        }
        let mut quads = Vec::new();
        let mut slots = Vec::new();
        let mut quad_slots = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let q = [a, b, c, d];
                        let qi = quads.len();
                        quads.push(q);
                        let mut ids = [0; 4];
                        for (la, &z) in q.iter().enumerate() {
                            let lt: Vec<usize> = (0..4).filter(|&i| i != la).collect();
                            let t = [q[lt[0]], q[lt[1]], q[lt[2]]];
                            let id = |x: usize, y: usize| z * m + pair_index(n, x, y);
                            ids[la] = slots.len();
                            slots.push(Slot {
                                apex: z,
                                t,
                                quad: qi,
                                la,
                                lt: [lt[0], lt[1], lt[2]],
                                u01: id(t[0], t[1]),
                                u12: id(t[1], t[2]),
                                u02: id(t[0], t[2]),
                            });
                        }
                        quad_slots.push(ids);
                    }
                }
            }
        }
        let mut fn_image = maps.fn_.clone();
        fn_image.sort_unstable();
        fn_image.dedup();
        Setup { n, m, mode, order: order.clone(), angles, tris, quads, slots, quad_slots, fn_image }
    }

    pub fn angle(&self, id: usize) -> Angle {
        self.angles[id].expect("valid angle id")
    }

    pub fn angle_id(&self, a: Angle) -> usize {
        a.apex * self.m + pair_index(self.n, a.arms.0, a.arms.1)
    }

    /// Slot of `apex` with the triple `others` (sorted).
    pub fn slot_id(&self, apex: usize, others: [usize; 3]) -> usize {
        let mut q = [apex, others[0], others[1], others[2]];
        q.sort_unstable();
        let qi = self.quads.binary_search(&q).expect("quad exists");
        let la = q.iter().position(|&p| p == apex).expect("apex in quad");
        self.quad_slots[qi][la]
    }

    /// Alternative index of `fact` within its slot.
    pub fn alt_index(&self, slot: usize, fact: &Fact) -> usize {
        match fact.alt {
            Alt::Hull => 3,
            Alt::Middle(m) => self.slots[slot].t.iter().position(|&p| p == m).expect("middle in triple"),
        }
    }

    /// Local quad index of alternative `k` of a slot, as used by [`types_of`].
    pub fn alt_local(&self, slot: usize, k: usize) -> usize {
        let s = &self.slots[slot];
        if k == 3 {
            s.la
        } else {
            s.lt[k]
        }
    }

    pub fn alt_types(&self, slot: usize, k: usize) -> u8 {
        types_of(self.slots[slot].la, self.alt_local(slot, k))
    }
}
