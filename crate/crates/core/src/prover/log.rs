//! Structured proof transcripts.

use super::types::{Angle, Bnd, Dir, Fact};
use super::ConstraintMode;
use crate::space::EdgeOrder;

/// Line numbers; 0 is the edge order under test.
pub type LineId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Smallest,
    Dominated,
    Largest,
    OnBoundary,
    Tripod,
    Sum,
    Circ,
    Triangle,
    Larger,
    Smaller,
    Order,
    Not,
    Hence,
    NewSum,
    NewCirc,
    Assume,
    Contradiction,
}

impl Tag {
    pub fn name(self) -> &'static str {
        match self {
            Tag::Smallest => "smallest",
            Tag::Dominated => "dominated",
            Tag::Largest => "largest",
            Tag::OnBoundary => "on bndry",
            Tag::Tripod => "tripod",
            Tag::Sum => "sum",
            Tag::Circ => "circ",
            Tag::Triangle => "triangle",
            Tag::Larger => "larger",
            Tag::Smaller => "smaller",
            Tag::Order => "order",
            Tag::Not => "not",
            Tag::Hence => "hence",
            Tag::NewSum => "new sum",
            Tag::NewCirc => "new circ",
            Tag::Assume => "assume",
            Tag::Contradiction => "contradiction!",
        }
    }
}

/// How a bound on an angle `X` was obtained. Operand bounds are the values
/// used, in the direction the rule needs them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundRule {
    /// `X <= Y + Z`
    TripodUpper { y: Angle, z: Angle, yb: Bnd, zb: Bnd },
    /// `X >= O - Z`
    TripodLower { outer: Angle, other: Angle, ob: Bnd, tb: Bnd },
    /// `X <= 360 - Y - Z`
    TripodCirc { y: Angle, z: Angle, yb: Bnd, zb: Bnd },
    /// `X = Y + Z` under a between fact
    SumOuter { y: Angle, z: Angle, yb: Bnd, zb: Bnd },
    /// `X = O - Z` under a between fact
    SumPart { outer: Angle, other: Angle, ob: Bnd, tb: Bnd },
    /// `X = 360 - Y - Z` under a hull fact
    Circ { y: Angle, z: Angle, yb: Bnd, zb: Bnd },
    /// `X = 180 - Y - Z` in a triangle
    Triangle { y: Angle, z: Angle, yb: Bnd, zb: Bnd },
    /// `X > (180 - Z) / 2` or `X < (180 - Z) / 2` when `X` is known larger or
    /// smaller than the third angle of its triangle
    Half { z: Angle, zb: Bnd },
    /// `X < Y` or `X > Y` from the edge order
    Order { y: Angle, yb: Bnd },
}

/// Why a four-point fact was refuted by angle bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotReason {
    /// outer < part + part
    AngleSum { outer: Angle, parts: [Angle; 2] },
    /// the three angles sum to less than 360
    HullSum { angles: [Angle; 3] },
    /// follows from the cited four-point facts
    FourPoint { cited: Vec<Fact> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    /// all listed angles `< value` or `> value`
    Seeds { angles: Vec<Angle>, dir: Dir, value: i64 },
    OnBoundary { points: Vec<usize> },
    Bound { angle: Angle, dir: Dir, bound: Bnd, rule: BoundRule },
    Fact { fact: Fact, holds: bool, reason: SlotReason },
    Assume { fact: Fact, case: usize },
    /// a bound taken as a premise
    Given { angle: Angle, dir: Dir, bound: Bnd },
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub number: LineId,
    pub tag: Tag,
    pub prop: Prop,
    pub refs: Vec<LineId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Block {
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Line(Line),
    Cases(CaseSplit),
}

/// A four-way split over the configurations of `apex` and `others`. Each
/// branch starts with its assumption line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseSplit {
    pub apex: usize,
    pub others: [usize; 3],
    pub branches: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLog {
    pub order: EdgeOrder,
    pub mode: ConstraintMode,
    pub root: Block,
    /// Set when the search gave up; rendered after the last line.
    pub note: Option<String>,
}

impl ProofLog {
    pub fn empty(order: EdgeOrder, mode: ConstraintMode) -> Self {
        ProofLog { order, mode, root: Block::default(), note: None }
    }

    /// All lines in document order.
    pub fn lines(&self) -> Vec<&Line> {
        fn walk<'a>(b: &'a Block, out: &mut Vec<&'a Line>) {
            for e in &b.entries {
                match e {
                    Entry::Line(l) => out.push(l),
                    Entry::Cases(c) => c.branches.iter().for_each(|br| walk(br, out)),
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn line_count(&self) -> usize {
        self.lines().len()
    }
}

impl Block {
    /// Whether every path through the block ends in a contradiction.
    pub fn is_closed(&self) -> bool {
        match self.entries.last() {
            Some(Entry::Line(l)) => l.tag == Tag::Contradiction,
            Some(Entry::Cases(c)) => c.branches.len() == 4 && c.branches.iter().all(Block::is_closed),
            None => false,
        }
    }
}
