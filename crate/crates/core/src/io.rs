//! Line-oriented text formats. Vertex ids are 1-based on disk and 0-based
//! in memory. Lines starting with `c` are comments; blank lines are skipped.
//!
//! ```text
//! p tri <V> <F>          p emb <V> <E> <W>       p bip <V> <E>
//! k <c1> ... <cV>        n <part bits>           n <part bits>
//! f <i> <j> <k>          e <i> <j>               e <i> <j>
//!                        w <v1> ... <vk>
//! ```
//!
//! Colors in the optional `k` line are `1..=3`. Bipartite scripts hold one
//! operation per line: `I v w`, `II u v p q`, `III x y z w`, `I' w`,
//! `II' u p q v`, `III' w`. Flip sites are written `kind:v1,v2,...`.

use std::str::FromStr;

use thiserror::Error;

use crate::bipartite::{BipError, BipGraph, BipOp, Part};
use crate::embeddings::{EmbeddingError, EvenEmbedding};
use crate::flips::{FlipError, FlipKind, FlipSite};
use crate::surface::{Coloring, ColoringError, Triangulation, ValidationError, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(ValidationError),
    #[error("{0}")]
    Coloring(ColoringError),
    #[error("{0}")]
    Embedding(EmbeddingError),
    #[error("{0}")]
    Graph(BipError),
    #[error("bad site `{0}`: {1}")]
    Site(String, String),
}

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax {
        line,
        msg: msg.into(),
    })
}

/// Non-comment lines as `(line number, first token, remaining tokens)`.
fn records(text: &str) -> impl Iterator<Item = (usize, &str, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let mut tok = l.split_whitespace();
        let head = tok.next()?;
        (head != "c").then(|| (i + 1, head, tok.collect()))
    })
}

fn num<T: FromStr>(line: usize, s: &str) -> Result<T, ParseError> {
    s.parse()
        .or_else(|_| syntax(line, format!("`{s}` is not a number")))
}

/// Parses a 1-based id in `1..=n`.
fn id(line: usize, s: &str, n: usize) -> Result<Vertex, ParseError> {
    let v: usize = num(line, s)?;
    if v == 0 || v > n {
        return syntax(line, format!("vertex {v} out of range 1..={n}"));
    }
    Ok(v - 1)
}

fn header(
    line: usize,
    rest: &[&str],
    kind: &str,
    fields: usize,
) -> Result<Vec<usize>, ParseError> {
    if rest.first() != Some(&kind) || rest.len() != fields + 1 {
        return syntax(line, format!("expected `p {kind}` with {fields} counts"));
    }
    rest[1..].iter().map(|s| num(line, s)).collect()
}

fn parts_line(line: usize, rest: &[&str], n: usize) -> Result<Vec<Part>, ParseError> {
    let bits: String = rest.concat();
    if bits.len() != n || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return syntax(line, format!("expected {n} part bits"));
    }
    Ok(bits.bytes().map(|b| b - b'0').collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriFile {
    pub triangulation: Triangulation,
    pub coloring: Option<Coloring>,
}

pub fn parse_tri(text: &str) -> Result<TriFile, ParseError> {
    let mut dims = None;
    let mut colors = None;
    let mut faces = Vec::new();
    for (line, head, rest) in records(text) {
        match head {
            "p" if dims.is_none() => {
                let d = header(line, &rest, "tri", 2)?;
                dims = Some((d[0], d[1]));
            }
            _ if dims.is_none() => return syntax(line, "expected `p tri V F` header first"),
            "k" if colors.is_none() => {
                let n = dims.unwrap().0;
                if rest.len() != n {
                    return syntax(line, format!("expected {n} colors, got {}", rest.len()));
                }
                let mut c = Vec::with_capacity(n);
                for s in rest {
                    match num::<u8>(line, s)? {
                        x @ 1..=3 => c.push(x - 1),
                        x => return syntax(line, format!("color {x} out of range 1..=3")),
                    }
                }
                colors = Some(c);
            }
            "f" => {
                let n = dims.unwrap().0;
                if rest.len() != 3 {
                    return syntax(line, "a face needs 3 vertices");
                }
                faces.push([id(line, rest[0], n)?, id(line, rest[1], n)?, id(line, rest[2], n)?]);
            }
            other => return syntax(line, format!("unexpected record `{other}`")),
        }
    }
    let Some((n, f)) = dims else {
        return syntax(0, "missing `p tri V F` header");
    };
    if faces.len() != f {
        return syntax(0, format!("header declares {f} faces, found {}", faces.len()));
    }
    let t = Triangulation::from_faces(faces).map_err(|e| ParseError::Invalid(e.one_based()))?;
    if t.vertex_count() != n {
        return syntax(0, format!("header declares {n} vertices, faces use {}", t.vertex_count()));
    }
    let coloring = match colors {
        Some(c) => Some(Coloring::for_triangulation(&t, c).map_err(|e| {
            ParseError::Coloring(match e {
                ColoringError::Improper(a, b) => ColoringError::Improper(a + 1, b + 1),
                e => e,
            })
        })?),
        None => None,
    };
    Ok(TriFile {
        triangulation: t,
        coloring,
    })
}

pub fn write_tri(t: &Triangulation, col: Option<&Coloring>) -> String {
    let mut out = format!("p tri {} {}\n", t.vertex_count(), t.face_count());
    if let Some(c) = col {
        out.push('k');
        for &x in c.as_slice() {
            out.push_str(&format!(" {}", x + 1));
        }
        out.push('\n');
    }
    for f in t.faces() {
        out.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
    }
    out
}

pub fn parse_emb(text: &str) -> Result<EvenEmbedding, ParseError> {
    let mut dims = None;
    let mut parts = None;
    let mut edges = Vec::new();
    let mut walks = Vec::new();
    for (line, head, rest) in records(text) {
        match head {
            "p" if dims.is_none() => {
                let d = header(line, &rest, "emb", 3)?;
                dims = Some((d[0], d[1], d[2]));
            }
            _ if dims.is_none() => return syntax(line, "expected `p emb V E W` header first"),
            "n" if parts.is_none() => parts = Some(parts_line(line, &rest, dims.unwrap().0)?),
            "e" => {
                let n = dims.unwrap().0;
                if rest.len() != 2 {
                    return syntax(line, "an edge needs 2 vertices");
                }
                edges.push((id(line, rest[0], n)?, id(line, rest[1], n)?));
            }
            "w" => {
                let n = dims.unwrap().0;
                let w: Result<Vec<_>, _> = rest.iter().map(|s| id(line, s, n)).collect();
                walks.push(w?);
            }
            other => return syntax(line, format!("unexpected record `{other}`")),
        }
    }
    let Some((_, e, w)) = dims else {
        return syntax(0, "missing `p emb V E W` header");
    };
    let Some(parts) = parts else {
        return syntax(0, "missing `n` part line");
    };
    if edges.len() != e || walks.len() != w {
        return syntax(
            0,
            format!("header declares {e} edges and {w} walks, found {} and {}", edges.len(), walks.len()),
        );
    }
    EvenEmbedding::new(parts, edges, walks).map_err(ParseError::Embedding)
}

fn bits(parts: &[Part]) -> String {
    parts.iter().map(|p| char::from(b'0' + p)).collect()
}

pub fn write_emb(h: &EvenEmbedding) -> String {
    let mut out = format!(
        "p emb {} {} {}\nn {}\n",
        h.vertex_count(),
        h.edge_count(),
        h.walk_count(),
        bits(h.parts())
    );
    for &(a, b) in h.edges() {
        out.push_str(&format!("e {} {}\n", a + 1, b + 1));
    }
    for w in h.walks() {
        out.push('w');
        for v in w {
            out.push_str(&format!(" {}", v + 1));
        }
        out.push('\n');
    }
    out
}

/// Reads a bipartite graph; vertex `i` on disk gets id `i - 1`.
pub fn parse_bip(text: &str) -> Result<BipGraph, ParseError> {
    let mut dims = None;
    let mut g = None;
    let mut edges = 0;
    for (line, head, rest) in records(text) {
        match head {
            "p" if dims.is_none() => {
                let d = header(line, &rest, "bip", 2)?;
                dims = Some((d[0], d[1]));
            }
            _ if dims.is_none() => return syntax(line, "expected `p bip V E` header first"),
            "n" if g.is_none() => {
                let parts = parts_line(line, &rest, dims.unwrap().0)?;
                g = Some(BipGraph::from_edges(&parts, &[]).unwrap());
            }
            "e" => {
                let Some(graph) = g.as_mut() else {
                    return syntax(line, "`n` part line must precede edges");
                };
                let n = dims.unwrap().0;
                if rest.len() != 2 {
                    return syntax(line, "an edge needs 2 vertices");
                }
                let (a, b) = (id(line, rest[0], n)?, id(line, rest[1], n)?);
                if graph.has_edge(a, b) {
                    return syntax(line, format!("edge {} {} repeated", a + 1, b + 1));
                }
                graph.add_edge(a, b).or_else(|e| syntax(line, e.to_string()))?;
                edges += 1;
            }
            other => return syntax(line, format!("unexpected record `{other}`")),
        }
    }
    let Some((_, e)) = dims else {
        return syntax(0, "missing `p bip V E` header");
    };
    let Some(g) = g else {
        return syntax(0, "missing `n` part line");
    };
    if edges != e {
        return syntax(0, format!("header declares {e} edges, found {edges}"));
    }
    Ok(g)
}

/// Writes a graph whose ids are `0..V`.
pub fn write_bip(g: &BipGraph) -> String {
    let parts: Vec<Part> = g.vertices().map(|v| g.part(v)).collect();
    let mut out = format!("p bip {} {}\nn {}\n", g.vertex_count(), g.edge_count(), bits(&parts));
    for (a, b) in g.edges() {
        out.push_str(&format!("e {} {}\n", a + 1, b + 1));
    }
    out
}

pub fn parse_script(text: &str) -> Result<Vec<BipOp>, ParseError> {
    let mut ops = Vec::new();
    for (line, head, rest) in records(text) {
        let arity = match head {
            "I" => 2,
            "II" | "III" => 4,
            "I'" | "III'" => 1,
            "II'" => 4,
            other => return syntax(line, format!("unknown operation `{other}`")),
        };
        if rest.len() != arity {
            return syntax(line, format!("`{head}` takes {arity} vertices"));
        }
        let mut v = Vec::with_capacity(arity);
        for s in &rest {
            let x: usize = num(line, s)?;
            if x == 0 {
                return syntax(line, "vertex ids start at 1");
            }
            v.push(x - 1);
        }
        ops.push(match head {
            "I" => BipOp::I { v: v[0], w: v[1] },
            "II" => BipOp::II {
                u: v[0],
                v: v[1],
                p: v[2],
                q: v[3],
            },
            "III" => BipOp::III {
                x: v[0],
                y: v[1],
                z: v[2],
                w: v[3],
            },
            "I'" => BipOp::IPrime { w: v[0] },
            "II'" => BipOp::IIPrime {
                u: v[0],
                p: v[1],
                q: v[2],
                v: v[3],
            },
            _ => BipOp::IIIPrime { w: v[0] },
        });
    }
    Ok(ops)
}

pub fn write_script(ops: &[BipOp]) -> String {
    ops.iter()
        .map(|op| {
            let mut parts = op.to_string().split(' ').map(str::to_string).collect::<Vec<_>>();
            for p in parts.iter_mut().skip(1) {
                *p = (p.parse::<usize>().unwrap() + 1).to_string();
            }
            parts.join(" ") + "\n"
        })
        .collect()
}

/// Parses `kind:v1,v2,...` with 1-based ids.
pub fn parse_site(s: &str) -> Result<FlipSite, ParseError> {
    let bad = |m: String| ParseError::Site(s.to_string(), m);
    let (kind, list) = s
        .trim()
        .split_once(':')
        .ok_or_else(|| bad("expected kind:v1,v2,...".into()))?;
    let kind: FlipKind = kind.parse().map_err(|e: crate::flips::UnknownKind| bad(e.to_string()))?;
    let mut verts = Vec::new();
    for x in list.split(',') {
        match x.trim().parse::<usize>() {
            Ok(v) if v > 0 => verts.push(v - 1),
            _ => return Err(bad(format!("`{x}` is not a vertex id"))),
        }
    }
    FlipSite::new(kind, verts).map_err(|e: FlipError| bad(e.to_string()))
}

pub fn format_site(site: &FlipSite) -> String {
    let ids: Vec<String> = site.vertices().iter().map(|v| (v + 1).to_string()).collect();
    format!("{}:{}", site.kind(), ids.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::build_octahedron;

    #[test]
    fn tri_round_trip() {
        let (t, c) = build_octahedron();
        let text = write_tri(&t, Some(&c));
        assert!(text.starts_with("p tri 6 8\nk 1 1 2 2 3 3\nf 1 3 5\n"));
        let back = parse_tri(&text).unwrap();
        assert_eq!(write_tri(&back.triangulation, back.coloring.as_ref()), text);
    }

    #[test]
    fn tri_errors_carry_line_numbers() {
        let err = parse_tri("c hi\np tri 3 1\nf 1 2 x\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 3,
                msg: "`x` is not a number".into()
            }
        );
        let err = parse_tri("p tri 4 5\nf 1 2 3\nf 1 2 4\nf 1 3 4\nf 2 3 4\nf 1 2 5\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 6, .. }));
        let err = parse_tri("p tri 5 5\nf 1 2 3\nf 1 2 4\nf 1 3 4\nf 2 3 4\nf 1 2 5\n").unwrap_err();
        assert_eq!(err, ParseError::Invalid(ValidationError::NonManifoldEdge(1, 2, 3)));
    }

    #[test]
    fn emb_round_trip() {
        let h = crate::embeddings::prism(4);
        let text = write_emb(&h);
        assert_eq!(parse_emb(&text).unwrap(), h);
    }

    #[test]
    fn script_and_site_round_trip() {
        let text = "I 1 7\nII 1 4 8 9\nIII 1 2 4 10\nI' 7\nII' 1 8 9 4\nIII' 10\n";
        let ops = parse_script(text).unwrap();
        assert_eq!(ops[0], BipOp::I { v: 0, w: 6 });
        assert_eq!(write_script(&ops), text);
        let s = parse_site("bes:1,3,5,6").unwrap();
        assert_eq!(s.vertices(), &[0, 2, 4, 5]);
        assert_eq!(format_site(&s), "bes:1,3,5,6");
        assert!(parse_site("bes:1,3").is_err());
        assert!(parse_site("zz:1").is_err());
    }

    #[test]
    fn bip_round_trip() {
        let text = "p bip 4 4\nn 0101\ne 1 2\ne 1 4\ne 2 3\ne 3 4\n";
        let g = parse_bip(text).unwrap();
        assert_eq!(write_bip(&g), text);
        assert!(parse_bip("p bip 2 1\nn 00\ne 1 2\n").is_err());
    }
}
