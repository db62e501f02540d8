//! Line-oriented text formats. Blank lines and `#` comments are ignored
//! everywhere; rationals are written `p/q` or as integers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::connection::{ConnectionError, DiscreteConnection};
use crate::lattice::{LatticeFunction, LatticeTriangle, Rect, Site};
use crate::linalg::Mat2;
use crate::mesh::{FaceColor, MeshError, TriangleId, TriangulatedSurface, VertexId};
use crate::opalgebra::DifferenceOperator;
use crate::scalar::{fmt_rational, parse_rational, Rational};
use crate::simplicial::{SimplicialComplexK, SimplicialError};

pub const SURFACE_HEADER: &str = "tri-surface v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

/// Non-empty lines with comments stripped, split into words, numbered from 1.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn int<T: std::str::FromStr>(line: usize, w: &str) -> Result<T, ParseError> {
    w.parse().map_err(|_| syntax(line, format!("expected an integer, found `{w}`")))
}

fn rational(line: usize, w: &str) -> Result<Rational, ParseError> {
    parse_rational(w).ok_or_else(|| syntax(line, format!("expected a rational, found `{w}`")))
}

fn expect_arity(line: usize, words: &[&str], n: usize) -> Result<(), ParseError> {
    if words.len() != n {
        return Err(syntax(line, format!("`{}` takes {} fields, found {}", words[0], n - 1, words.len() - 1)));
    }
    Ok(())
}

fn unknown(line: usize, w: &str) -> ParseError {
    syntax(line, format!("unknown record `{w}`"))
}

/// `tri-surface v1`, `v <count>`, then `t i j k` lines.
pub fn parse_surface(text: &str) -> Result<TriangulatedSurface, ParseError> {
    let mut header = false;
    let mut count: Option<usize> = None;
    let mut tris = Vec::new();
    for (line, w) in records(text) {
        if !header {
            if w.join(" ") != SURFACE_HEADER {
                return Err(syntax(line, format!("expected header `{SURFACE_HEADER}`")));
            }
            header = true;
            continue;
        }
        match w[0] {
            "v" => {
                expect_arity(line, &w, 2)?;
                if count.is_some() {
                    return Err(syntax(line, "repeated `v` line"));
                }
                count = Some(int(line, w[1])?);
            }
            "t" => {
                expect_arity(line, &w, 4)?;
                tris.push([int(line, w[1])?, int(line, w[2])?, int(line, w[3])?]);
            }
            other => return Err(unknown(line, other)),
        }
    }
    if !header {
        return Err(syntax(1, format!("expected header `{SURFACE_HEADER}`")));
    }
    let count = count.ok_or_else(|| syntax(1, "missing `v <count>` line"))?;
    Ok(TriangulatedSurface::with_vertex_count(count, &tris)?)
}

pub fn write_surface(s: &TriangulatedSurface) -> String {
    let mut out = format!("{SURFACE_HEADER}\nv {}\n", s.vertex_count());
    for t in s.triangles() {
        let _ = writeln!(out, "t {} {} {}", t[0], t[1], t[2]);
    }
    out
}

/// `d <triangle>` lines; indices are checked against `surface`.
pub fn parse_domain(text: &str, surface: &TriangulatedSurface) -> Result<Vec<TriangleId>, ParseError> {
    let mut out = Vec::new();
    for (line, w) in records(text) {
        match w[0] {
            "d" => {
                expect_arity(line, &w, 2)?;
                let t: TriangleId = int(line, w[1])?;
                if t >= surface.triangle_count() {
                    return Err(syntax(line, format!("no triangle {t}")));
                }
                out.push(t);
            }
            other => return Err(unknown(line, other)),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// `b <triangle> <local 0|1|2> <p/q>`; unlisted coefficients are 1.
pub fn parse_connection<'a>(text: &str, surface: &'a TriangulatedSurface) -> Result<DiscreteConnection<'a>, ParseError> {
    let mut coeffs = vec![[Rational::one(), Rational::one(), Rational::one()]; surface.triangle_count()];
    for (line, w) in records(text) {
        match w[0] {
            "b" => {
                expect_arity(line, &w, 4)?;
                let t: usize = int(line, w[1])?;
                let i: usize = int(line, w[2])?;
                if t >= coeffs.len() || i > 2 {
                    return Err(syntax(line, format!("no corner ({t}, {i})")));
                }
                coeffs[t][i] = rational(line, w[3])?;
            }
            other => return Err(unknown(line, other)),
        }
    }
    Ok(DiscreteConnection::new(surface, coeffs)?)
}

pub fn write_connection(conn: &DiscreteConnection<'_>) -> String {
    let mut out = String::new();
    for t in 0..conn.surface().triangle_count() {
        for (i, b) in conn.coefficients(t).iter().enumerate() {
            if !b.is_one() {
                let _ = writeln!(out, "b {t} {i} {}", fmt_rational(b));
            }
        }
    }
    out
}

/// `R <v1> <v2> a b c d`: the matrix `[[a, b], [c, d]]` on the oriented
/// edge; the reverse direction gets the inverse unless listed.
pub fn parse_representation(text: &str) -> Result<BTreeMap<(VertexId, VertexId), Mat2>, ParseError> {
    let mut out = BTreeMap::new();
    for (line, w) in records(text) {
        match w[0] {
            "R" => {
                expect_arity(line, &w, 7)?;
                let (a, b): (VertexId, VertexId) = (int(line, w[1])?, int(line, w[2])?);
                let r: Vec<Rational> = w[3..].iter().map(|x| rational(line, x)).collect::<Result<_, _>>()?;
                out.insert((a, b), Mat2::new(r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone()));
            }
            other => return Err(unknown(line, other)),
        }
    }
    Ok(out)
}

/// `psi <vertex> <p/q>`.
pub fn parse_vertex_values(text: &str) -> Result<BTreeMap<VertexId, Rational>, ParseError> {
    let mut out = BTreeMap::new();
    for (line, w) in records(text) {
        match w[0] {
            "psi" => {
                expect_arity(line, &w, 3)?;
                if out.insert(int(line, w[1])?, rational(line, w[2])?).is_some() {
                    return Err(syntax(line, "vertex listed twice"));
                }
            }
            other => return Err(unknown(line, other)),
        }
    }
    Ok(out)
}

pub fn write_vertex_values(values: &[Rational]) -> String {
    values.iter().enumerate().fold(String::new(), |mut out, (v, x)| {
        let _ = writeln!(out, "psi {v} {}", fmt_rational(x));
        out
    })
}

/// `f <n1> <n2> <p/q>`, as a function on the listed sites.
pub fn parse_lattice_function(text: &str) -> Result<LatticeFunction, ParseError> {
    let mut out = BTreeMap::new();
    for (line, w) in records(text) {
        match w[0] {
            "f" => {
                expect_arity(line, &w, 4)?;
                let s = Site::new(int(line, w[1])?, int(line, w[2])?);
                if out.insert(s, rational(line, w[3])?).is_some() {
                    return Err(syntax(line, "site listed twice"));
                }
            }
            other => return Err(unknown(line, other)),
        }
    }
    Ok(LatticeFunction::from_map(out))
}

pub fn write_lattice_function(f: &LatticeFunction) -> String {
    f.iter().fold(String::new(), |mut out, (s, v)| {
        let _ = writeln!(out, "f {} {} {}", s.x, s.y, fmt_rational(v));
        out
    })
}

/// `d b <n1> <n2>` or `d w <n1> <n2>`: black or white lattice triangles
/// by their anchor.
pub fn parse_lattice_domain(text: &str) -> Result<Vec<LatticeTriangle>, ParseError> {
    let mut out = Vec::new();
    for (line, w) in records(text) {
        match w[0] {
            "d" => {
                expect_arity(line, &w, 4)?;
                let anchor = Site::new(int(line, w[2])?, int(line, w[3])?);
                out.push(match w[1] {
                    "b" => LatticeTriangle::black(anchor),
                    "w" => LatticeTriangle::white(anchor),
                    c => return Err(syntax(line, format!("triangle colour must be `b` or `w`, found `{c}`"))),
                });
            }
            other => return Err(unknown(line, other)),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn write_lattice_domain(tris: &[LatticeTriangle]) -> String {
    tris.iter().fold(String::new(), |mut out, t| {
        let c = if t.color == FaceColor::Black { 'b' } else { 'w' };
        let _ = writeln!(out, "d {c} {} {}", t.anchor.x, t.anchor.y);
        out
    })
}

/// `op <a1> <a2>` starts a term; `c <n1> <n2> <value>` lines give its
/// coefficient. The window is the bounding box of all `c` sites and
/// missing coefficients are zero.
pub fn parse_operator(text: &str) -> Result<DifferenceOperator<Rational>, ParseError> {
    let mut terms: BTreeMap<(i64, i64), BTreeMap<Site, Rational>> = BTreeMap::new();
    let mut current: Option<(i64, i64)> = None;
    for (line, w) in records(text) {
        match w[0] {
            "op" => {
                expect_arity(line, &w, 3)?;
                let a = (int(line, w[1])?, int(line, w[2])?);
                terms.entry(a).or_default();
                current = Some(a);
            }
            "c" => {
                expect_arity(line, &w, 4)?;
                let a = current.ok_or_else(|| syntax(line, "`c` before any `op` line"))?;
                let s = Site::new(int(line, w[1])?, int(line, w[2])?);
                if terms.get_mut(&a).expect("opened").insert(s, rational(line, w[3])?).is_some() {
                    return Err(syntax(line, "coefficient listed twice"));
                }
            }
            other => return Err(unknown(line, other)),
        }
    }
    let rect = Rect::bounding(terms.values().flat_map(|m| m.keys().copied()))
        .ok_or_else(|| syntax(1, "operator has no coefficients"))?;
    let mut op = DifferenceOperator::zero(rect);
    for (a, c) in &terms {
        op = op.with_term(*a, |n| c.get(&n).cloned().unwrap_or_else(Rational::zero));
    }
    Ok(op)
}

pub fn write_operator(op: &DifferenceOperator<Rational>) -> String {
    let mut out = String::new();
    for a in op.shifts() {
        let _ = writeln!(out, "op {} {}", a.0, a.1);
        for n in op.rect().sites() {
            let c = op.coeff(a, n).expect("in window");
            if !c.is_zero() {
                let _ = writeln!(out, "c {} {} {}", n.x, n.y, fmt_rational(&c));
            }
        }
    }
    out
}

/// `s v0 … vk` lines; `k` is fixed by the first line.
pub fn parse_complex(text: &str) -> Result<SimplicialComplexK, ParseError> {
    let mut simplices = Vec::new();
    let mut arity = None;
    for (line, w) in records(text) {
        match w[0] {
            "s" => {
                let n = *arity.get_or_insert(w.len());
                if n < 2 {
                    return Err(syntax(line, "a simplex needs at least one vertex"));
                }
                expect_arity(line, &w, n)?;
                simplices.push(w[1..].iter().map(|x| int(line, x)).collect::<Result<Vec<usize>, _>>()?);
            }
            other => return Err(unknown(line, other)),
        }
    }
    Ok(SimplicialComplexK::new(&simplices)?)
}

pub fn write_complex(x: &SimplicialComplexK) -> String {
    x.simplices().iter().fold(String::new(), |mut out, s| {
        let words: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "s {}", words.join(" "));
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::{frac, rat};

    #[test]
    fn surface_round_trip() {
        let s = fixtures::octahedron();
        let text = write_surface(&s);
        assert_eq!(parse_surface(&text).unwrap().triangles(), s.triangles());
        let commented = format!("# octahedron\n\n{}", text.replace("v 6", "v 6   # six"));
        assert_eq!(parse_surface(&commented).unwrap().triangles(), s.triangles());
    }

    #[test]
    fn surface_errors() {
        assert!(matches!(parse_surface("v 3\nt 0 1 2\n"), Err(ParseError::Syntax { line: 1, .. })));
        assert!(matches!(parse_surface("tri-surface v1\nt 0 1 2\n"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_surface("tri-surface v1\nv 3\nt 0 1\n"), Err(ParseError::Syntax { line: 3, .. })));
        let bad = "tri-surface v1\nv 5\nt 0 1 2\nt 0 1 3\nt 0 1 4\n";
        assert!(matches!(parse_surface(bad), Err(ParseError::Mesh(MeshError::NonManifoldEdge { count: 3, .. }))));
    }

    #[test]
    fn connection_defaults_and_zero() {
        let s = fixtures::octahedron();
        let c = parse_connection("b 0 1 -2/3\n", &s).unwrap();
        assert_eq!(c.coefficients(0)[1], frac(-2, 3));
        assert_eq!(c.coefficients(1)[0], rat(1));
        assert_eq!(write_connection(&c), "b 0 1 -2/3\n");
        assert!(matches!(parse_connection("b 0 0 0\n", &s), Err(ParseError::Connection(_))));
        assert!(parse_connection("b 0 3 1\n", &s).is_err());
    }

    #[test]
    fn small_formats() {
        let r = parse_representation("R 0 1 0 1 1 0\n").unwrap();
        assert_eq!(r[&(0, 1)], Mat2::swap());
        let p = parse_vertex_values("psi 2 1/2\npsi 0 -1\n").unwrap();
        assert_eq!(p[&2], frac(1, 2));
        assert!(parse_vertex_values("psi 0 1\npsi 0 2\n").is_err());
        let f = parse_lattice_function("f 1 -1 3\n").unwrap();
        assert_eq!(parse_lattice_function(&write_lattice_function(&f)).unwrap(), f);
        let d = parse_lattice_domain("d b 0 0\nd w 1 0\n").unwrap();
        assert_eq!(parse_lattice_domain(&write_lattice_domain(&d)).unwrap(), d);
        assert!(parse_lattice_domain("d x 0 0\n").is_err());
    }

    #[test]
    fn operator_round_trip() {
        let text = "op 0 0\nc 0 0 1\nc 1 1 2\nop 1 0\nc 0 1 -1/2\n";
        let op = parse_operator(text).unwrap();
        assert_eq!(op.rect(), Rect { x0: 0, x1: 1, y0: 0, y1: 1 });
        assert_eq!(op.coeff((1, 0), Site::new(0, 1)), Some(frac(-1, 2)));
        assert_eq!(op.coeff((0, 0), Site::new(1, 0)), Some(rat(0)));
        assert_eq!(parse_operator(&write_operator(&op)).unwrap(), op);
        assert!(parse_operator("c 0 0 1\n").is_err());
    }

    #[test]
    fn complex_arity() {
        let x = parse_complex("s 0 1\ns 1 2\ns 2 0\n").unwrap();
        assert_eq!((x.k(), x.simplex_count()), (1, 3));
        assert_eq!(parse_complex(&write_complex(&x)).unwrap(), x);
        assert!(matches!(parse_complex("s 0 1\ns 1 2 3\n"), Err(ParseError::Syntax { line: 2, .. })));
    }
}
