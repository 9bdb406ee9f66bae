//! Plain-text file formats.
//!
//! * distance matrix: first line `n`, then `n` rows of `n` numbers;
//! * points: first line `n m metric` with metric `l2` or `l1`, then `n` rows
//!   of `m` numbers;
//! * edge order: a single line of `C(n,2)` tokens `i-j`, shortest first;
//! * digraph: one edge `u v` per line;
//! * coordinates: one number per line.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::space::{pair_count, pair_index, EdgeOrder, Metric, PointConfig};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn number<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("bad number {tok:?}")))
}

pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = content_lines(text);
    let (l, first) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let n: usize = number(l, first)?;
    let mut rows = Vec::with_capacity(n);
    for (l, row) in lines {
        let r = row.split_whitespace().map(|t| number(l, t)).collect::<Result<Vec<f64>>>()?;
        rows.push(r);
    }
    if rows.len() != n {
        return Err(parse_err(0, format!("expected {n} rows, found {}", rows.len())));
    }
    Ok(rows)
}

pub fn write_matrix(matrix: &[Vec<f64>]) -> String {
    let mut s = format!("{}\n", matrix.len());
    for row in matrix {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_points(text: &str) -> Result<PointConfig> {
    let mut lines = content_lines(text);
    let (l, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(parse_err(l, "header must be `n m metric`"));
    }
    let n: usize = number(l, h[0])?;
    let m: usize = number(l, h[1])?;
    let metric = match h[2] {
        "l2" => Metric::Euclidean,
        "l1" => Metric::Manhattan,
        other => return Err(parse_err(l, format!("unknown metric {other:?}"))),
    };
    let mut coords = Vec::with_capacity(n * m);
    let mut rows = 0;
    for (l, row) in lines {
        let r = row.split_whitespace().map(|t| number(l, t)).collect::<Result<Vec<f64>>>()?;
        if r.len() != m {
            return Err(parse_err(l, format!("expected {m} coordinates, found {}", r.len())));
        }
        coords.extend(r);
        rows += 1;
    }
    if rows != n {
        return Err(parse_err(0, format!("expected {n} points, found {rows}")));
    }
    PointConfig::new(n, m, coords, metric)
}

pub fn write_points(config: &PointConfig) -> String {
    let metric = match config.metric() {
        Metric::Euclidean => "l2",
        Metric::Manhattan => "l1",
    };
    let mut s = format!("{} {} {}\n", config.n(), config.dim(), metric);
    for i in 0..config.n() {
        let cells: Vec<String> = config.point(i).iter().map(|v| format!("{v}")).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_order(text: &str) -> Result<EdgeOrder> {
    let mut toks = Vec::new();
    for (l, line) in content_lines(text) {
        for t in line.split_whitespace() {
            let (a, b) = t.split_once('-').ok_or_else(|| parse_err(l, format!("bad pair token {t:?}")))?;
            toks.push((l, number::<usize>(l, a)?, number::<usize>(l, b)?));
        }
    }
    let m = toks.len();
    let n = (1..).find(|&n| pair_count(n) >= m).unwrap_or(0);
    if n < 2 || pair_count(n) != m {
        return Err(parse_err(1, format!("{m} tokens is not C(n,2) for any n >= 2")));
    }
    let mut seq = Vec::with_capacity(m);
    for (l, a, b) in toks {
        if a == b || a >= n || b >= n {
            return Err(parse_err(l, format!("invalid pair {a}-{b} for n = {n}")));
        }
        seq.push(pair_index(n, a, b));
    }
    EdgeOrder::from_sequence(n, seq).map_err(|_| parse_err(1, "repeated pair"))
}

pub fn write_order(order: &EdgeOrder) -> String {
    format!("{order}\n")
}

pub fn parse_edges(text: &str) -> Result<Vec<(usize, usize)>> {
    content_lines(text)
        .map(|(l, line)| {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 2 {
                return Err(parse_err(l, "edge line must be `u v`"));
            }
            Ok((number(l, t[0])?, number(l, t[1])?))
        })
        .collect()
}

pub fn write_edges(edges: &[(usize, usize)]) -> String {
    let mut s = String::new();
    for (u, v) in edges {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn parse_coords(text: &str) -> Result<Vec<f64>> {
    content_lines(text).map(|(l, line)| number(l, line)).collect()
}

pub fn write_coords<T: std::fmt::Display>(coords: &[T]) -> String {
    let mut s = String::new();
    for c in coords {
        let _ = writeln!(s, "{c}");
    }
    s
}
