//! Plain-text mesh format:
//!
//! ```text
//! smf 1
//! vertices <Nv>
//! x y            (Nv lines)
//! triangles <Nt>
//! i j k          (Nt lines, 0-based, counter-clockwise)
//! boundary_edges <Nb>
//! i j label      (Nb lines; label 0 = Dirichlet, 1..255 = transmission segment)
//! ```
//!
//! `#` starts a comment that runs to the end of the line; blank lines are ignored.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{BoundaryEdge, TriMesh};
use crate::error::{Error, Result};

pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    read_smf(std::io::BufReader::new(file), path)
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
    path: PathBuf,
}

impl<R: BufRead> Lines<R> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.line,
            message: message.into(),
        }
    }

    /// Next non-empty line with comments stripped, split on whitespace.
    fn next_tokens(&mut self) -> Result<Vec<String>> {
        loop {
            let Some(line) = self.inner.next() else {
                return Err(self.err("unexpected end of file"));
            };
            self.line += 1;
            let line = line?;
            let content = line.split('#').next().unwrap_or("");
            let tokens: Vec<String> = content.split_whitespace().map(str::to_owned).collect();
            if !tokens.is_empty() {
                return Ok(tokens);
            }
        }
    }

    fn header(&mut self, keyword: &str) -> Result<usize> {
        let toks = self.next_tokens()?;
        if toks.len() != 2 || toks[0] != keyword {
            return Err(self.err(format!("expected `{keyword} <count>`, found `{}`", toks.join(" "))));
        }
        self.parse(&toks[1])
    }

    fn parse<T: FromStr>(&self, tok: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.err(format!("cannot parse `{tok}`")))
    }

    fn record<T: FromStr, const K: usize>(&mut self) -> Result<[T; K]> {
        let toks = self.next_tokens()?;
        if toks.len() != K {
            return Err(self.err(format!("expected {K} fields, found {}", toks.len())));
        }
        let mut out = Vec::with_capacity(K);
        for t in &toks {
            out.push(self.parse::<T>(t)?);
        }
        Ok(out.try_into().ok().unwrap())
    }
}

pub fn read_smf(reader: impl BufRead, path: impl AsRef<Path>) -> Result<TriMesh> {
    let mut lines = Lines {
        inner: reader.lines(),
        line: 0,
        path: path.as_ref().to_owned(),
    };
    let magic = lines.next_tokens()?;
    if magic != ["smf", "1"] {
        return Err(lines.err("missing `smf 1` header"));
    }

    let nv = lines.header("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        vertices.push(lines.record::<f64, 2>()?);
    }

    let nt = lines.header("triangles")?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let tri = lines.record::<usize, 3>()?;
        if tri.iter().any(|&v| v >= nv) {
            return Err(lines.err(format!("vertex index out of range in {tri:?}")));
        }
        triangles.push(tri);
    }

    let nb = lines.header("boundary_edges")?;
    let mut edges = Vec::with_capacity(nb);
    for _ in 0..nb {
        let toks = lines.next_tokens()?;
        if toks.len() != 3 {
            return Err(lines.err(format!("expected 3 fields, found {}", toks.len())));
        }
        let a: usize = lines.parse(&toks[0])?;
        let b: usize = lines.parse(&toks[1])?;
        let label: u8 = lines.parse(&toks[2])?;
        if a >= nv || b >= nv {
            return Err(lines.err(format!("vertex index out of range in edge ({a}, {b})")));
        }
        edges.push(BoundaryEdge { a, b, label });
    }

    TriMesh::new(vertices, triangles, edges)
}

/// Writes `mesh` in a form that [`read_smf`] reproduces exactly (shortest
/// round-trip float formatting).
pub fn write_smf(mesh: &TriMesh, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "smf 1")?;
    writeln!(w, "vertices {}", mesh.num_vertices())?;
    for v in mesh.vertices() {
        writeln!(w, "{:?} {:?}", v[0], v[1])?;
    }
    writeln!(w, "triangles {}", mesh.num_triangles())?;
    for t in mesh.triangles() {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "boundary_edges {}", mesh.boundary_edges().len())?;
    for e in mesh.boundary_edges() {
        writeln!(w, "{} {} {}", e.a, e.b, e.label)?;
    }
    Ok(())
}
