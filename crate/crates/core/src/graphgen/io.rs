//! Text edge-list format.
//!
//! ```text
//! n <n> r <r> b <b>
//! <u> <v> <R|B>
//! ...
//! ```
//!
//! Vertex ids are 0-based with `u < v` on every edge line; a red and a blue
//! edge on the same pair appear as two lines. Lines end in `\n`. Writing a
//! parsed file reproduces it byte for byte.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{Color, ColoredGraph, Edge};
use crate::error::{Error, Result};

pub fn write_graph<W: Write>(g: &ColoredGraph, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "n {} r {} b {}", g.n(), g.red_degree(), g.blue_degree())?;
    for e in g.edges() {
        writeln!(w, "{} {} {}", e.u, e.v, e.color.letter())?;
    }
    w.flush()?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what}")))
}

pub fn parse_graph(text: &str) -> Result<ColoredGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 6 || toks[0] != "n" || toks[2] != "r" || toks[4] != "b" {
        return Err(parse_err(1, "header must read `n <n> r <r> b <b>`"));
    }
    let n: usize = field(Some(toks[1]), 1, "n")?;
    let r: usize = field(Some(toks[3]), 1, "r")?;
    let b: usize = field(Some(toks[5]), 1, "b")?;

    let mut edges = Vec::with_capacity(n * (r + b) / 2);
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let u: u32 = field(it.next(), ln, "vertex u")?;
        let v: u32 = field(it.next(), ln, "vertex v")?;
        let color = match it.next() {
            Some("R") => Color::Red,
            Some("B") => Color::Blue,
            _ => return Err(parse_err(ln, "color must be R or B")),
        };
        if it.next().is_some() {
            return Err(parse_err(ln, "trailing fields"));
        }
        if u >= v {
            return Err(parse_err(ln, "edge endpoints must satisfy u < v"));
        }
        edges.push(Edge::new(u, v, color));
    }
    ColoredGraph::from_edges(n, r, b, edges)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<ColoredGraph> {
    parse_graph(&fs::read_to_string(path)?)
}
