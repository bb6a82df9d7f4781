//! Plain-text mesh exchange format:
//!
//! ```text
//! v=<nv> t=<nt>
//! x y            (nv lines)
//! i j k          (nt lines, 0-based, counterclockwise)
//! ```

use std::io::{BufRead, Write};

use super::Mesh;
use crate::error::{Error, Result};

pub fn write_mesh<W: Write>(mesh: &Mesh, mut out: W) -> Result<()> {
    writeln!(out, "v={} t={}", mesh.num_vertices(), mesh.num_triangles())?;
    for v in &mesh.vertices {
        writeln!(out, "{:.17e} {:.17e}", v[0], v[1])?;
    }
    for t in &mesh.triangles {
        writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

pub fn read_mesh<R: BufRead>(input: R) -> Result<Mesh> {
    let mut lines = input
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let parse_err = |line: usize, msg: &str| Error::MeshParse {
        line: line + 1,
        msg: msg.to_string(),
    };

    let (n, header) = lines.next().ok_or_else(|| parse_err(0, "empty file"))?;
    let header = header?;
    let mut nv = None;
    let mut nt = None;
    for tok in header.split_whitespace() {
        if let Some(v) = tok.strip_prefix("v=") {
            nv = v.parse::<usize>().ok();
        } else if let Some(t) = tok.strip_prefix("t=") {
            nt = t.parse::<usize>().ok();
        }
    }
    let (nv, nt) = match (nv, nt) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(parse_err(n, "expected header `v=<nv> t=<nt>`")),
    };

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, line) = lines.next().ok_or_else(|| parse_err(0, "missing vertex lines"))?;
        let line = line?;
        let xs: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(n, "vertex coordinates must be numbers"))?;
        if xs.len() != 2 {
            return Err(parse_err(n, "vertex line needs exactly two coordinates"));
        }
        vertices.push([xs[0], xs[1]]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (n, line) = lines.next().ok_or_else(|| parse_err(0, "missing triangle lines"))?;
        let line = line?;
        let ids: Vec<usize> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(n, "triangle indices must be nonnegative integers"))?;
        if ids.len() != 3 {
            return Err(parse_err(n, "triangle line needs exactly three indices"));
        }
        triangles.push([ids[0], ids[1], ids[2]]);
    }
    if let Some((n, _)) = lines.next() {
        return Err(parse_err(n, "trailing data after triangles"));
    }
    Mesh::from_triangles(vertices, triangles)
}
