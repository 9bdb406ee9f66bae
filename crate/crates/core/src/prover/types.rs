//! Angles, bounds and four-point facts shared by the prover and its log.

use std::fmt;

/// Fixed-point angle unit: 1/1024 of a degree. Every bound the rules can
/// produce from multiples of 30° by sums, differences and halving is a dyadic
/// rational, so it is represented exactly until halving runs out of bits, at
/// which point bounds are rounded outward.
pub const UNIT: i64 = 1024;
pub const DEG_180: i64 = 180 * UNIT;
pub const DEG_360: i64 = 360 * UNIT;

/// Smallest improvement of a bound worth recording. Smaller gains are only
/// used to detect an empty interval.
pub const MIN_STEP: i64 = UNIT / 64;

pub fn label(p: usize) -> char {
    (b'a' + p as u8) as char
}

/// Exact decimal rendering of a fixed-point value.
pub fn format_units(v: i64) -> String {
    let sign = if v < 0 { "-" } else { "" };
    let a = v.unsigned_abs();
    let int = a / UNIT as u64;
    let mut frac = a % UNIT as u64;
    if frac == 0 {
        return format!("{sign}{int}");
    }
    let mut digits = String::new();
    while frac != 0 {
        frac *= 10;
        digits.push(char::from(b'0' + (frac / UNIT as u64) as u8));
        frac %= UNIT as u64;
    }
    format!("{sign}{int}.{digits}")
}

/// The angle at `apex` between the rays to `arms.0 < arms.1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle {
    pub apex: usize,
    pub arms: (usize, usize),
}

impl Angle {
    pub fn new(apex: usize, x: usize, y: usize) -> Self {
        debug_assert!(apex != x && apex != y && x != y);
        Angle { apex, arms: (x.min(y), x.max(y)) }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}{}", label(self.apex), label(self.arms.0), label(self.arms.1))
    }
}

/// A one-sided bound `> value` / `>= value` or `< value` / `<= value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bnd {
    pub value: i64,
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Lower,
    Upper,
}

/// Which of the four mutually exclusive configurations of a point `apex`
/// and three further points holds: one of the three lies angularly between
/// the other two as seen from `apex`, or `apex` lies inside their triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alt {
    Middle(usize),
    Hull,
}

/// A statement about `apex` and the sorted triple `others`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub apex: usize,
    pub others: [usize; 3],
    pub alt: Alt,
}

impl Fact {
    pub fn new(apex: usize, mut others: [usize; 3], alt: Alt) -> Self {
        others.sort_unstable();
        Fact { apex, others, alt }
    }

    /// For `Middle(m)`, the two outer points in ascending order.
    pub fn outer(&self) -> Option<(usize, usize)> {
        match self.alt {
            Alt::Middle(m) => {
                let o: Vec<usize> = self.others.iter().copied().filter(|&p| p != m).collect();
                Some((o[0], o[1]))
            }
            Alt::Hull => None,
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.others.map(label);
        match self.alt {
            Alt::Middle(m) => {
                let (x, y) = self.outer().expect("middle fact");
                write!(f, "{}:{}{}{}", label(self.apex), label(x), label(m), label(y))
            }
            Alt::Hull => write!(f, "{} in {a}{b}{c}", label(self.apex)),
        }
    }
}
