//! The plain-text file format for complexes, maps, sequences and triples.
//!
//! ```text
//! ring Z/3[e]
//! complex L
//!   degrees 0..1
//!   ranks 1 1
//!   d 0 [[e]]
//! map j 1 [[1]]
//! endo v 1 [[e]]
//! ```
//!
//! `map NAME SRC -> TGT` and `endo NAME on C` declare where a map lives.
//! Undeclared `j`, `q` default to `K -> L`, `L -> M`; undeclared endos
//! `u`, `v`, `w` act on `K`, `L`, `M`. Missing components are zero and `#`
//! starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::complex::{ChainMap, PerfectComplex};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ring::{RingElem, RingSpec};
use crate::ses::{EndoTriple, ShortExactSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Map,
    Endo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedMap {
    pub name: String,
    pub kind: MapKind,
    pub map: ChainMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub ring: RingSpec,
    pub complexes: Vec<(String, PerfectComplex)>,
    pub maps: Vec<NamedMap>,
}

fn err(line: usize, msg: impl AsRef<str>) -> Error {
    Error::Parse(format!("line {line}: {}", msg.as_ref()))
}

/// Parses `[[a,b],[c,d]]`. An empty list `[]` gives a `0 x 0` matrix.
pub fn parse_matrix(ring: RingSpec, s: &str) -> Result<Matrix> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad matrix `{s}`"));
    let inner = compact.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    if inner.is_empty() {
        return Ok(Matrix::zero(ring, 0, 0));
    }
    let body = inner.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    let mut rows = Vec::new();
    for row in body.split("],[") {
        if row.contains(['[', ']']) {
            return Err(bad());
        }
        let entries = if row.is_empty() {
            Vec::new()
        } else {
            row.split(',').map(|e| ring.parse_elem(e)).collect::<Result<Vec<RingElem>>>()?
        };
        rows.push(entries);
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!("ragged matrix `{s}`")));
    }
    Matrix::from_rows(ring, cols, rows)
}

fn parse_int(line: usize, s: &str) -> Result<i64> {
    s.parse().map_err(|_| err(line, format!("expected an integer, got `{s}`")))
}

struct ComplexDraft {
    name: String,
    line: usize,
    window: Option<(i64, i64)>,
    ranks: Option<Vec<usize>>,
    diffs: Vec<(usize, i64, String)>,
}

struct MapDraft {
    kind: MapKind,
    decl: Option<(usize, String, String)>,
    comps: Vec<(usize, i64, String)>,
}

/// Splits `NAME DEG MATRIX`.
fn split_component(line: usize, rest: &str) -> Result<(String, i64, String)> {
    let mut it = rest.splitn(3, char::is_whitespace);
    let name = it.next().filter(|s| !s.is_empty()).ok_or_else(|| err(line, "missing name"))?;
    let deg = it.next().ok_or_else(|| err(line, "missing degree"))?;
    let m = it.next().ok_or_else(|| err(line, "missing matrix"))?;
    Ok((name.to_string(), parse_int(line, deg)?, m.trim().to_string()))
}

pub fn parse_document(src: &str) -> Result<Document> {
    let mut ring: Option<RingSpec> = None;
    let mut complexes: Vec<ComplexDraft> = Vec::new();
    let mut maps: Vec<(String, MapDraft)> = Vec::new();
    let mut in_complex = false;

    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap_or("");
        if text.trim().is_empty() {
            continue;
        }
        let indented = text.starts_with([' ', '\t']);
        let text = text.trim();
        let (head, rest) = text.split_once(char::is_whitespace).map(|(h, r)| (h, r.trim())).unwrap_or((text, ""));
        if indented && in_complex {
            let c = complexes.last_mut().expect("open complex");
            match head {
                "degrees" => {
                    let (a, b) = rest.split_once("..").ok_or_else(|| err(line, "expected `degrees LO..HI`"))?;
                    let (a, b) = (parse_int(line, a.trim())?, parse_int(line, b.trim())?);
                    if b < a {
                        return Err(err(line, "empty degree window"));
                    }
                    c.window = Some((a, b));
                }
                "ranks" => {
                    let r = rest
                        .split_whitespace()
                        .map(|x| x.parse::<usize>().map_err(|_| err(line, format!("bad rank `{x}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    c.ranks = Some(r);
                }
                "d" => {
                    let (deg, m) =
                        rest.split_once(char::is_whitespace).ok_or_else(|| err(line, "expected `d DEG MATRIX`"))?;
                    c.diffs.push((line, parse_int(line, deg)?, m.trim().to_string()));
                }
                _ => return Err(err(line, format!("unknown complex field `{head}`"))),
            }
            continue;
        }
        in_complex = false;
        match head {
            "ring" => {
                if ring.is_some() {
                    return Err(err(line, "ring declared twice"));
                }
                ring = Some(rest.parse().map_err(|e: Error| err(line, e.to_string()))?);
            }
            "complex" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(err(line, "expected `complex NAME`"));
                }
                if complexes.iter().any(|c| c.name == rest) {
                    return Err(err(line, format!("complex `{rest}` declared twice")));
                }
                complexes.push(ComplexDraft { name: rest.into(), line, window: None, ranks: None, diffs: Vec::new() });
                in_complex = true;
            }
            "map" | "endo" => {
                let kind = if head == "map" { MapKind::Map } else { MapKind::Endo };
                let words: Vec<&str> = rest.split_whitespace().collect();
                let decl = match (kind, words.as_slice()) {
                    (MapKind::Map, [n, s, "->", t]) => Some((n.to_string(), s.to_string(), t.to_string())),
                    (MapKind::Endo, [n, "on", c]) => Some((n.to_string(), c.to_string(), c.to_string())),
                    _ => None,
                };
                let name = match &decl {
                    Some((n, _, _)) => n.clone(),
                    None => split_component(line, rest)?.0,
                };
                let idx = match maps.iter().position(|(n, _)| *n == name) {
                    Some(idx) => {
                        if maps[idx].1.kind != kind {
                            return Err(err(line, format!("`{name}` used both as map and endo")));
                        }
                        idx
                    }
                    None => {
                        maps.push((name.clone(), MapDraft { kind, decl: None, comps: Vec::new() }));
                        maps.len() - 1
                    }
                };
                let draft = &mut maps[idx].1;
                match decl {
                    Some((_, s, t)) => {
                        if draft.decl.is_some() {
                            return Err(err(line, format!("`{name}` declared twice")));
                        }
                        draft.decl = Some((line, s, t));
                    }
                    None => {
                        let (_, deg, m) = split_component(line, rest)?;
                        draft.comps.push((line, deg, m));
                    }
                }
            }
            _ => return Err(err(line, format!("unknown directive `{head}`"))),
        }
    }

    let ring = ring.ok_or_else(|| err(1, "missing `ring` line"))?;
    let matrix = |line: usize, s: &str, rows: usize, cols: usize| -> Result<Matrix> {
        let m = parse_matrix(ring, s).map_err(|e| err(line, e.to_string()))?;
        if m.shape() == (rows, cols) || (m.rows() == 0 && (rows == 0 || cols == 0)) {
            return Ok(if m.shape() == (rows, cols) { m } else { Matrix::zero(ring, rows, cols) });
        }
        Err(err(line, format!("matrix is {}x{}, expected {rows}x{cols}", m.rows(), m.cols())))
    };

    let mut built: Vec<(String, PerfectComplex)> = Vec::new();
    for c in complexes {
        let (lo, hi) = c.window.ok_or_else(|| err(c.line, format!("complex `{}` has no degrees", c.name)))?;
        let ranks = c.ranks.ok_or_else(|| err(c.line, format!("complex `{}` has no ranks", c.name)))?;
        if ranks.len() as i64 != hi - lo + 1 {
            return Err(err(c.line, format!("complex `{}`: {} ranks for window {lo}..{hi}", c.name, ranks.len())));
        }
        let rank = |n: i64| if n < lo || n > hi { 0 } else { ranks[(n - lo) as usize] };
        let mut diffs = BTreeMap::new();
        for (line, n, m) in &c.diffs {
            if *n < lo || *n >= hi {
                return Err(err(*line, format!("differential d^{n} outside window {lo}..{hi}")));
            }
            if diffs.insert(*n, matrix(*line, m, rank(n + 1), rank(*n))?).is_some() {
                return Err(err(*line, format!("d^{n} given twice")));
            }
        }
        let k = PerfectComplex::new(ring, lo, ranks.clone(), diffs).map_err(|e| err(c.line, e.to_string()))?;
        built.push((c.name, k));
    }
    let find = |line: usize, name: &str| -> Result<PerfectComplex> {
        built
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, k)| k.clone())
            .ok_or_else(|| err(line, format!("unknown complex `{name}`")))
    };

    let mut out_maps = Vec::new();
    for (name, d) in maps {
        let first_line = d.decl.as_ref().map(|x| x.0).or(d.comps.first().map(|x| x.0)).unwrap_or(1);
        let (src, tgt) = match (&d.decl, d.kind, name.as_str()) {
            (Some((_, s, t)), _, _) => (s.clone(), t.clone()),
            (None, MapKind::Map, "j") => ("K".into(), "L".into()),
            (None, MapKind::Map, "q") => ("L".into(), "M".into()),
            (None, MapKind::Endo, "u") => ("K".into(), "K".into()),
            (None, MapKind::Endo, "v") => ("L".into(), "L".into()),
            (None, MapKind::Endo, "w") => ("M".into(), "M".into()),
            _ => return Err(err(first_line, format!("`{name}` needs a declaration"))),
        };
        let (s, t) = (find(first_line, &src)?, find(first_line, &tgt)?);
        let mut comps = BTreeMap::new();
        for (line, n, m) in &d.comps {
            if comps.insert(*n, matrix(*line, m, t.rank(*n), s.rank(*n))?).is_some() {
                return Err(err(*line, format!("component {n} of `{name}` given twice")));
            }
        }
        let map = ChainMap::new(s, t, comps).map_err(|e| err(first_line, e.to_string()))?;
        out_maps.push(NamedMap { name, kind: d.kind, map });
    }
    Ok(Document { ring, complexes: built, maps: out_maps })
}

impl Document {
    pub fn complex(&self, name: &str) -> Option<&PerfectComplex> {
        self.complexes.iter().find(|(n, _)| n == name).map(|(_, k)| k)
    }

    pub fn map(&self, name: &str) -> Option<&ChainMap> {
        self.maps.iter().find(|m| m.name == name).map(|m| &m.map)
    }

    fn require_map(&self, name: &str) -> Result<&ChainMap> {
        self.map(name).ok_or_else(|| Error::Parse(format!("file has no map `{name}`")))
    }

    /// The sequence given by `j` and `q`.
    pub fn ses(&self) -> Result<ShortExactSequence> {
        ShortExactSequence::new(self.require_map("j")?.clone(), self.require_map("q")?.clone())
    }

    /// The triple `u`, `v`, `w`; absent endos are zero.
    pub fn triple(&self) -> Result<EndoTriple> {
        let s = self.ses()?;
        let zero = EndoTriple::zero(&s);
        Ok(EndoTriple {
            u: self.map("u").cloned().unwrap_or(zero.u),
            v: self.map("v").cloned().unwrap_or(zero.v),
            w: self.map("w").cloned().unwrap_or(zero.w),
        })
    }
}

fn default_ends(kind: MapKind, name: &str) -> Option<(&'static str, &'static str)> {
    match (kind, name) {
        (MapKind::Map, "j") => Some(("K", "L")),
        (MapKind::Map, "q") => Some(("L", "M")),
        (MapKind::Endo, "u") => Some(("K", "K")),
        (MapKind::Endo, "v") => Some(("L", "L")),
        (MapKind::Endo, "w") => Some(("M", "M")),
        _ => None,
    }
}

pub fn format_complex(name: &str, k: &PerfectComplex) -> String {
    let mut s = format!("complex {name}\n  degrees {}..{}\n  ranks", k.lo(), k.hi());
    for r in k.ranks() {
        let _ = write!(s, " {r}");
    }
    s.push('\n');
    for n in k.lo()..k.hi() {
        let d = k.diff(n);
        if d.rows() > 0 && d.cols() > 0 {
            let _ = writeln!(s, "  d {n} {d}");
        }
    }
    s
}

pub fn format_document(doc: &Document) -> String {
    let mut s = format!("ring {}\n", doc.ring);
    for (name, k) in &doc.complexes {
        s.push_str(&format_complex(name, k));
    }
    let name_of = |k: &PerfectComplex| doc.complexes.iter().find(|(_, c)| c == k).map(|(n, _)| n.as_str());
    for m in &doc.maps {
        let word = if m.kind == MapKind::Map { "map" } else { "endo" };
        let (src, tgt) = (name_of(m.map.source()), name_of(m.map.target()));
        let comps: Vec<(i64, Matrix)> = m.map.components().into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let defaulted = match default_ends(m.kind, &m.name) {
            Some((a, b)) => doc.complex(a) == Some(m.map.source()) && doc.complex(b) == Some(m.map.target()),
            None => false,
        };
        if !defaulted || comps.is_empty() {
            match (m.kind, src, tgt) {
                (MapKind::Map, Some(a), Some(b)) => {
                    let _ = writeln!(s, "map {} {a} -> {b}", m.name);
                }
                (MapKind::Endo, Some(a), _) => {
                    let _ = writeln!(s, "endo {} on {a}", m.name);
                }
                _ => {}
            }
        }
        for (n, c) in comps {
            let _ = writeln!(s, "{word} {} {n} {c}", m.name);
        }
    }
    s
}

fn ses_document(s: &ShortExactSequence, t: Option<&EndoTriple>) -> Document {
    let mut maps = vec![
        NamedMap { name: "j".into(), kind: MapKind::Map, map: s.j.clone() },
        NamedMap { name: "q".into(), kind: MapKind::Map, map: s.q.clone() },
    ];
    if let Some(t) = t {
        for (name, f) in [("u", &t.u), ("v", &t.v), ("w", &t.w)] {
            maps.push(NamedMap { name: name.into(), kind: MapKind::Endo, map: f.clone() });
        }
    }
    Document {
        ring: s.k.ring(),
        complexes: vec![("K".into(), s.k.clone()), ("L".into(), s.l.clone()), ("M".into(), s.m.clone())],
        maps,
    }
}

pub fn format_ses_file(s: &ShortExactSequence) -> String {
    format_document(&ses_document(s, None))
}

pub fn format_triple_file(s: &ShortExactSequence, t: &EndoTriple) -> String {
    format_document(&ses_document(s, Some(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS_FILE: &str = "\
ring Z/3[e]
complex K
  degrees 1..1
  ranks 1
complex L
  degrees 0..1
  ranks 1 1
  d 0 [[e]]
complex M
  degrees 0..0
  ranks 1
map j 1 [[1]]
map q 0 [[1]]
endo v 1 [[e]]
";

    #[test]
    fn parse_eps_file() {
        let doc = parse_document(EPS_FILE).unwrap();
        let r = RingSpec::dual(3);
        assert_eq!(doc.ring, r);
        assert_eq!(doc.complex("L").unwrap().diff(0), Matrix::scalar(r.epsilon().unwrap(), 1));
        let s = doc.ses().unwrap();
        s.validate().unwrap();
        let t = doc.triple().unwrap();
        assert!(t.u.components().values().all(Matrix::is_zero));
        assert_eq!(t.v.comp(1), Matrix::scalar(r.epsilon().unwrap(), 1));
    }

    #[test]
    fn round_trip() {
        let doc = parse_document(EPS_FILE).unwrap();
        let text = format_document(&doc);
        assert_eq!(parse_document(&text).unwrap(), doc);
        assert_eq!(format_document(&parse_document(&text).unwrap()), text);
    }

    #[test]
    fn matrices() {
        let r = RingSpec::zmod(4);
        assert_eq!(parse_matrix(r, "[[1, 2], [3, -1]]").unwrap(), Matrix::from_ints(r, &[&[1, 2], &[3, 3]]));
        assert_eq!(parse_matrix(r, "[]").unwrap().shape(), (0, 0));
        assert_eq!(parse_matrix(r, "[[],[]]").unwrap().shape(), (2, 0));
        assert!(parse_matrix(r, "[[1,2],[3]]").is_err());
        assert!(parse_matrix(r, "[1,2]").is_err());
        assert!(parse_matrix(r, "[[e]]").is_err());
    }

    #[test]
    fn errors_cite_lines() {
        let bad = "ring Z/4\ncomplex K\n  degrees 0..1\n  ranks 1 1\n  d 0 [[1,1]]\n";
        let e = parse_document(bad).unwrap_err().to_string();
        assert!(e.contains("line 5"), "{e}");
        let e = parse_document("ring Z/4\nfoo\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        let e = parse_document("ring Z/1\n").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
        let e = parse_document("ring Z/4\nmap f 0 [[1]]\n").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("declaration"), "{e}");
    }

    #[test]
    fn declared_maps() {
        let src = "ring Z/5\ncomplex A\n  degrees 0..0\n  ranks 2\nmap f A -> A\nmap f 0 [[1,2],[3,4]]\nendo g on A\n";
        let doc = parse_document(src).unwrap();
        assert_eq!(doc.map("f").unwrap().comp(0), Matrix::from_ints(RingSpec::zmod(5), &[&[1, 2], &[3, 4]]));
        assert!(doc.map("g").unwrap().comp(0).is_zero());
        assert_eq!(parse_document(&format_document(&doc)).unwrap(), doc);
    }
}
