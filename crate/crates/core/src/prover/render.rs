//! Plain-text transcripts.

use std::fmt::Write;

use super::log::{Block, BoundRule, CaseSplit, Entry, Line, ProofLog, Prop, SlotReason};
use super::types::{format_units, label, Angle, Bnd, Dir, Fact, UNIT};
use super::ConstraintMode;

pub const EXTREMAL_HEADER: &str = "USING ONLY EXTREMAL NEIGHBOURS INFORMATION";
pub const FULL_HEADER: &str = "USING THE FULL EDGE ORDER";
pub const COLUMNS: &str = "line\ttype\tproposition\tfollows from";
pub const SPLIT_END: &str = "CONTRADICTION in all four cases!";
pub const NOTE_PREFIX: &str = "NO CONTRADICTION FOUND: ";
const ROMAN: [&str; 4] = ["i", "ii", "iii", "iv"];

pub fn roman(case: usize) -> &'static str {
    ROMAN[case]
}

/// Renders an order as `de < ad < ...`.
pub fn order_text(order: &crate::space::EdgeOrder) -> String {
    let all = crate::space::pairs(order.n());
    order
        .sequence()
        .iter()
        .map(|&p| format!("{}{}", label(all[p].0), label(all[p].1)))
        .collect::<Vec<_>>()
        .join(" < ")
}

/// Parses `de < ad < ...`, the inverse of [`order_text`].
pub fn parse_order_text(text: &str) -> crate::error::Result<crate::space::EdgeOrder> {
    use crate::error::Error;
    let toks: Vec<&str> = text.split('<').map(str::trim).collect();
    let m = toks.len();
    let n = (2..=26)
        .find(|&n| n * (n - 1) / 2 == m)
        .ok_or_else(|| Error::InvalidParameter(format!("{m} pairs is not a pair count")))?;
    let mut seq = Vec::with_capacity(m);
    for t in toks {
        let c: Vec<u8> = t.bytes().collect();
        let pt = |b: u8| (b.is_ascii_lowercase() && ((b - b'a') as usize) < n).then(|| (b - b'a') as usize);
        match c.as_slice() {
            [a, b] => match (pt(*a), pt(*b)) {
                (Some(x), Some(y)) if x != y => seq.push(crate::space::pair_index(n, x, y)),
                _ => return Err(Error::InvalidParameter(format!("bad pair {t:?}"))),
            },
            _ => return Err(Error::InvalidParameter(format!("bad pair {t:?}"))),
        }
    }
    crate::space::EdgeOrder::from_sequence(n, seq)
}

fn cmp(dir: Dir, strict: bool) -> &'static str {
    match (dir, strict) {
        (Dir::Upper, true) => "<",
        (Dir::Upper, false) => "<=",
        (Dir::Lower, true) => ">",
        (Dir::Lower, false) => ">=",
    }
}

fn f(v: i64) -> String {
    format_units(v)
}

/// Exact decimal rendering of `v / 2` units, `v >= 0`.
fn half(v: i64) -> String {
    let den = 2 * UNIT as u64;
    let v = v as u64;
    let mut frac = v % den;
    if frac == 0 {
        return (v / den).to_string();
    }
    let mut digits = String::new();
    while frac != 0 {
        frac *= 10;
        digits.push(char::from(b'0' + (frac / den) as u8));
        frac %= den;
    }
    format!("{}.{digits}", v / den)
}

fn bound_text(angle: Angle, dir: Dir, bound: Bnd, rule: &BoundRule) -> String {
    let c = cmp(dir, bound.strict);
    let v = f(bound.value);
    match rule {
        BoundRule::TripodUpper { y, z, yb, zb } => {
            format!("{angle} <= {y} + {z} {c} {} + {} = {v}", f(yb.value), f(zb.value))
        }
        BoundRule::TripodLower { outer, other, ob, tb } => {
            format!("{angle} >= {outer} - {other} {c} {} - {} = {v}", f(ob.value), f(tb.value))
        }
        BoundRule::TripodCirc { y, z, yb, zb } => {
            format!("{angle} <= 360 - {y} - {z} {c} 360 - {} - {} = {v}", f(yb.value), f(zb.value))
        }
        BoundRule::SumOuter { y, z, yb, zb } => {
            format!("{angle} = {y} + {z} {c} {} + {} = {v}", f(yb.value), f(zb.value))
        }
        BoundRule::SumPart { outer, other, ob, tb } => {
            format!("{angle} = {outer} - {other} {c} {} - {} = {v}", f(ob.value), f(tb.value))
        }
        BoundRule::Circ { y, z, yb, zb } => {
            format!("{angle} = 360 - {y} - {z} {c} 360 - {} - {} = {v}", f(yb.value), f(zb.value))
        }
        BoundRule::Triangle { y, z, yb, zb } => {
            format!("{angle} = 180 - {y} - {z} {c} 180 - {} - {} = {v}", f(yb.value), f(zb.value))
        }
        BoundRule::Half { z, zb } => {
            // the exact half, which the stored bound rounds outward
            let exact = half(180 * UNIT - zb.value);
            format!("{angle} {c} (180 - {z}) / 2 {c} (180 - {}) / 2 = {exact}", f(zb.value))
        }
        BoundRule::Order { y, yb } => {
            let first = cmp(dir, true);
            format!("{angle} {first} {y} {} {}", cmp(dir, yb.strict), f(yb.value))
        }
    }
}

fn fact_text(fact: &Fact, holds: bool, reason: &SlotReason) -> String {
    let mut s = if holds { fact.to_string() } else { format!("not {fact}") };
    match reason {
        SlotReason::AngleSum { outer, parts } => {
            let _ = write!(s, " since {outer} < {} + {}", parts[0], parts[1]);
        }
        SlotReason::HullSum { angles } => {
            let _ = write!(s, " since {} + {} + {} < 360", angles[0], angles[1], angles[2]);
        }
        SlotReason::FourPoint { cited } => {
            if !cited.is_empty() {
                let list: Vec<String> = cited.iter().map(Fact::to_string).collect();
                let _ = write!(s, " since {}", list.join(" and "));
            }
        }
    }
    s
}

/// The proposition column of a line.
pub fn prop_text(prop: &Prop) -> String {
    match prop {
        Prop::Seeds { angles, dir, value } => {
            let list: Vec<String> = angles.iter().map(Angle::to_string).collect();
            format!("{} {} {}", list.join(", "), cmp(*dir, true), f(*value))
        }
        Prop::OnBoundary { points } => {
            let list: Vec<String> = points.iter().map(|&p| label(p).to_string()).collect();
            format!("{} since in fn[X]", list.join(","))
        }
        Prop::Bound { angle, dir, bound, rule } => bound_text(*angle, *dir, *bound, rule),
        Prop::Fact { fact, holds, reason } => {
            let s = fact_text(fact, *holds, reason);
            // the tag already says "not"
            s.strip_prefix("not ").map(str::to_string).unwrap_or(s)
        }
        Prop::Assume { fact, .. } => format!("{fact}"),
        Prop::Given { angle, dir, bound } => format!("{angle} {} {}", cmp(*dir, bound.strict), f(bound.value)),
        Prop::Contradiction => String::new(),
    }
}

fn refs_text(refs: &[usize]) -> String {
    refs.iter().map(|r| format!("{r}.")).collect()
}

fn line_text(out: &mut String, indent: &str, line: &Line) {
    if let Prop::Assume { fact, case } = &line.prop {
        let _ = writeln!(out, "{indent}{}.\t({}) ASSUMING {fact}...\t\t", line.number, roman(*case));
        return;
    }
    let _ = writeln!(
        out,
        "{indent}{}.\t{}\t{}\t{}",
        line.number,
        line.tag.name(),
        prop_text(&line.prop),
        refs_text(&line.refs)
    );
}

fn block_text(out: &mut String, depth: usize, block: &Block) {
    let indent = "    ".repeat(depth);
    for e in &block.entries {
        match e {
            Entry::Line(l) => line_text(out, &indent, l),
            Entry::Cases(c) => split_text(out, depth, c),
        }
    }
}

fn split_text(out: &mut String, depth: usize, split: &CaseSplit) {
    let indent = "    ".repeat(depth);
    let [a, b, c] = split.others.map(label);
    let _ = writeln!(out, "{indent}CASE ANALYSIS using points {},{a}{b}{c}:", label(split.apex));
    for br in &split.branches {
        block_text(out, depth + 1, br);
    }
    let _ = writeln!(out, "{indent}{SPLIT_END}");
}

/// Renders a transcript as tab-separated text.
pub fn render_proof(log: &ProofLog) -> String {
    let mut out = String::new();
    let n = log.order.n();
    let _ = writeln!(out, "TEST OF EDGE ORDER {}", order_text(&log.order));
    let _ = writeln!(
        out,
        "{}",
        match log.mode {
            ConstraintMode::ExtremalOnly => EXTREMAL_HEADER,
            ConstraintMode::FullOrder => FULL_HEADER,
        }
    );
    out.push('\n');
    let names: Vec<String> = (0..n).map(|p| label(p).to_string()).collect();
    let _ = writeln!(out, "points are labeled {}", names.join(","));
    let _ = writeln!(out, "xy is a segment, xyz is a triangle, x:yz is the angle in xyz at vertex x");
    let _ = writeln!(out, "x:ywz means that x:yz = x:yw + x:wz");
    let _ = writeln!(out, "x in yzw means that x lies inside the triangle yzw");
    let _ = writeln!(out, "line 0 is the edge order above");
    out.push('\n');
    let _ = writeln!(out, "{COLUMNS}");
    block_text(&mut out, 0, &log.root);
    if let Some(note) = &log.note {
        let _ = writeln!(out, "{NOTE_PREFIX}{note}");
    }
    out
}
