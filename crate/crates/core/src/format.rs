//! Versioned text format for workspaces: spaces, complexes, sheaves,
//! kernels, refinement maps and stop configurations.
//!
//! ```text
//! strata v1
//! field q
//! space I simplicial
//! vertices 0 1
//! simplex 0
//! simplex 1
//! simplex 0 1
//! end
//! sheaf k on I
//! stalk 0 0 1
//! stalk 1 0 1
//! stalk 0-1 0 1
//! rho 0-1 0 0 1x1 [1]
//! rho 0-1 1 0 1x1 [1]
//! end
//! ```
//!
//! Matrices are dense with exact entries: `2x3 [1 0 -1/2; 0 1 0]`.
//! `rho s t n M` is the degree-`n` restriction `F(t) → F(s)` along a
//! covering relation `s ⋖ t`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::complex::{ChainMap, Complex};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{Cell, FacePoset, MapKind, PosetMap, SimplicialComplex};
use crate::kernels::Kernel;
use crate::matrix::Matrix;
use crate::sheaf::Sheaf;
use crate::wrap1d::StopConfig;

pub const HEADER: &str = "strata v1";

/// How a space was built; kept for byte-exact output.
#[derive(Clone, Debug)]
pub enum SpaceDef {
    Simplicial(SimplicialComplex),
    Cells,
    Product(Vec<String>),
}

#[derive(Clone, Debug)]
pub struct Space {
    pub poset: Arc<FacePoset>,
    pub def: SpaceDef,
}

#[derive(Clone, Debug)]
pub enum Item {
    Space(Space),
    Complex(Arc<Complex>),
    Sheaf { space: String, sheaf: Arc<Sheaf> },
    Kernel { source: String, target: String, kernel: Kernel },
    Map { source: String, target: String, map: PosetMap },
    Stops(StopConfig),
}

impl Item {
    fn kind(&self) -> &'static str {
        match self {
            Item::Space(_) => "space",
            Item::Complex(_) => "complex",
            Item::Sheaf { .. } => "sheaf",
            Item::Kernel { .. } => "kernel",
            Item::Map { .. } => "map",
            Item::Stops(_) => "stops",
        }
    }
}

/// Named objects over one field, in insertion order.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub field: Field,
    items: Vec<(String, Item)>,
}

impl Workspace {
    pub fn new(field: Field) -> Workspace {
        Workspace { field, items: Vec::new() }
    }

    pub fn items(&self) -> &[(String, Item)] {
        &self.items
    }

    pub fn insert(&mut self, name: &str, item: Item) -> Result<()> {
        if self.items.iter().any(|(n, _)| n == name) {
            return Err(Error::Precondition(format!("duplicate name '{name}'")));
        }
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::Precondition(format!("bad name '{name}'")));
        }
        self.items.push((name.to_string(), item));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Item> {
        self.items
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, i)| i)
            .ok_or_else(|| Error::Precondition(format!("no object named '{name}'")))
    }

    pub fn space(&self, name: &str) -> Result<&Space> {
        match self.get(name)? {
            Item::Space(s) => Ok(s),
            other => Err(wrong(name, "space", other)),
        }
    }

    pub fn complex(&self, name: &str) -> Result<&Arc<Complex>> {
        match self.get(name)? {
            Item::Complex(c) => Ok(c),
            other => Err(wrong(name, "complex", other)),
        }
    }

    pub fn sheaf(&self, name: &str) -> Result<&Arc<Sheaf>> {
        match self.get(name)? {
            Item::Sheaf { sheaf, .. } => Ok(sheaf),
            Item::Kernel { kernel, .. } => Ok(kernel.sheaf()),
            other => Err(wrong(name, "sheaf", other)),
        }
    }

    pub fn kernel(&self, name: &str) -> Result<&Kernel> {
        match self.get(name)? {
            Item::Kernel { kernel, .. } => Ok(kernel),
            other => Err(wrong(name, "kernel", other)),
        }
    }

    pub fn map(&self, name: &str) -> Result<&PosetMap> {
        match self.get(name)? {
            Item::Map { map, .. } => Ok(map),
            other => Err(wrong(name, "map", other)),
        }
    }

    pub fn stops(&self, name: &str) -> Result<&StopConfig> {
        match self.get(name)? {
            Item::Stops(s) => Ok(s),
            other => Err(wrong(name, "stops", other)),
        }
    }

    /// Name of a space with this poset, if the workspace has one.
    pub fn space_name_of(&self, p: &FacePoset) -> Option<&str> {
        self.items.iter().find_map(|(n, i)| match i {
            Item::Space(s) if s.poset.as_ref() == p => Some(n.as_str()),
            _ => None,
        })
    }

    pub fn add_simplicial(&mut self, name: &str, k: &SimplicialComplex) -> Result<Arc<FacePoset>> {
        let poset = k.face_poset();
        self.insert(name, Item::Space(Space { poset: poset.clone(), def: SpaceDef::Simplicial(k.clone()) }))?;
        Ok(poset)
    }

    pub fn add_sheaf(&mut self, name: &str, space: &str, sheaf: Sheaf) -> Result<()> {
        let p = &self.space(space)?.poset;
        if p.as_ref() != sheaf.base().as_ref() {
            return Err(Error::BaseMismatch(format!("sheaf '{name}' is not on '{space}'")));
        }
        self.insert(name, Item::Sheaf { space: space.into(), sheaf: Arc::new(sheaf) })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        let _ = writeln!(out, "field {}", self.field);
        for (name, item) in &self.items {
            match item {
                Item::Space(s) => write_space(&mut out, name, s),
                Item::Complex(c) => {
                    let _ = writeln!(out, "complex {name}");
                    write_complex_body(&mut out, c);
                    out.push_str("end\n");
                }
                Item::Sheaf { space, sheaf } => {
                    let _ = writeln!(out, "sheaf {name} on {space}");
                    write_sheaf_body(&mut out, sheaf);
                    out.push_str("end\n");
                }
                Item::Kernel { source, target, kernel } => {
                    let _ = writeln!(out, "kernel {name} on {source} {target}");
                    write_sheaf_body(&mut out, kernel.sheaf());
                    out.push_str("end\n");
                }
                Item::Map { source, target, map } => {
                    let _ = writeln!(out, "map {name} {source} {target} {}", map.kind());
                    for s in 0..map.source().len() {
                        let _ = writeln!(out, "send {} {}", map.source().name(s), map.target().name(map.apply(s)));
                    }
                    out.push_str("end\n");
                }
                Item::Stops(cfg) => {
                    let _ = writeln!(out, "stops {name}");
                    for l in cfg.to_text().lines().skip(1) {
                        out.push_str(l);
                        out.push('\n');
                    }
                    out.push_str("end\n");
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Workspace> {
        Parser::new(text).workspace()
    }
}

fn wrong(name: &str, want: &str, got: &Item) -> Error {
    Error::Precondition(format!("'{name}' is a {}, expected a {want}", got.kind()))
}

fn write_space(out: &mut String, name: &str, s: &Space) {
    match &s.def {
        SpaceDef::Simplicial(k) => {
            let _ = writeln!(out, "space {name} simplicial");
            let _ = writeln!(out, "vertices {}", k.vertex_names().join(" "));
            for simp in k.simplices() {
                let names: Vec<&str> = simp.iter().map(|v| k.vertex_names()[*v].as_str()).collect();
                let _ = writeln!(out, "simplex {}", names.join(" "));
            }
            out.push_str("end\n");
        }
        SpaceDef::Cells => {
            let p = &s.poset;
            let _ = writeln!(out, "space {name} cells");
            let _ = writeln!(out, "vertices {}", p.vertex_names().join(" "));
            for c in 0..p.len() {
                let cell = p.cell(c);
                let verts: Vec<&str> = cell.vertices.iter().map(|v| p.vertex_names()[*v].as_str()).collect();
                let _ = write!(out, "cell {} {} vertices {}", p.name(c), cell.dim, verts.join(" "));
                if !p.faces(c).is_empty() {
                    out.push_str(" faces");
                    for (t, inc) in p.faces(c) {
                        let _ = write!(out, " {}:{}", p.name(*t), inc);
                    }
                }
                out.push('\n');
            }
            out.push_str("end\n");
        }
        SpaceDef::Product(parts) => {
            let _ = writeln!(out, "space {name} product {}", parts.join(" "));
        }
    }
}

pub fn matrix_text(m: &Matrix) -> String {
    let rows: Vec<String> = m
        .dense()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    format!("{}x{} [{}]", m.rows(), m.cols(), rows.join("; "))
}

fn write_complex_body(out: &mut String, c: &Complex) {
    if c.is_zero() {
        out.push_str("zero\n");
        return;
    }
    let dims: Vec<String> = (c.lo()..=c.hi()).map(|n| c.dim(n).to_string()).collect();
    let _ = writeln!(out, "lo {}", c.lo());
    let _ = writeln!(out, "dims {}", dims.join(" "));
    for n in c.lo()..c.hi() {
        let d = c.d(n);
        if !d.is_zero() {
            let _ = writeln!(out, "d {n} {}", matrix_text(&d));
        }
    }
}

fn write_sheaf_body(out: &mut String, f: &Sheaf) {
    let p = f.base();
    for s in 0..p.len() {
        let c = f.stalk(s);
        if c.is_zero() {
            continue;
        }
        let dims: Vec<String> = (c.lo()..=c.hi()).map(|n| c.dim(n).to_string()).collect();
        let _ = writeln!(out, "stalk {} {} {}", p.name(s), c.lo(), dims.join(" "));
    }
    for s in 0..p.len() {
        let c = f.stalk(s);
        for n in c.lo()..c.hi() {
            let d = c.d(n);
            if !c.is_zero() && !d.is_zero() {
                let _ = writeln!(out, "d {} {n} {}", p.name(s), matrix_text(&d));
            }
        }
    }
    for s in 0..p.len() {
        for &t in p.poset().upper_covers(s) {
            if f.stalk(s).is_zero() || f.stalk(t).is_zero() {
                continue;
            }
            let lo = f.stalk(s).lo().max(f.stalk(t).lo());
            let hi = f.stalk(s).hi().min(f.stalk(t).hi());
            for n in lo..=hi {
                let m = f.restriction_matrix(s, t, n);
                if !m.is_zero() {
                    let _ = writeln!(out, "rho {} {} {n} {}", p.name(s), p.name(t), matrix_text(&m));
                }
            }
        }
    }
}

/// Serializes one sheaf as a self-contained workspace over its base.
pub fn sheaf_document(name: &str, f: &Sheaf) -> String {
    sheaf_document_in(None, name, f)
}

/// Like [`sheaf_document`], reusing the space names of `from` where the
/// base (or a factor of it) is one of its spaces.
pub fn sheaf_document_in(from: Option<&Workspace>, name: &str, f: &Sheaf) -> String {
    let mut ws = Workspace::new(f.field());
    let space = import_base(&mut ws, from, "X", f.base()).unwrap_or_else(|_| "X".into());
    let _ = ws.insert(name, Item::Sheaf { space, sheaf: Arc::new(f.clone()) });
    ws.to_text()
}

/// Serializes one kernel with its source and target spaces.
pub fn kernel_document_in(from: Option<&Workspace>, name: &str, k: &Kernel) -> Result<String> {
    let mut ws = Workspace::new(k.field());
    let source = import_base(&mut ws, from, "S", k.source())?;
    let target = import_base(&mut ws, from, "T", k.target())?;
    ws.insert(name, Item::Kernel { source, target, kernel: k.clone() })?;
    Ok(ws.to_text())
}

/// Adds a face poset (and its factors, for products) as cell spaces.
pub fn add_base(ws: &mut Workspace, name: &str, p: &Arc<FacePoset>) -> Result<String> {
    import_base(ws, None, name, p)
}

/// Adds the space `p` to `ws`, copying its definition and name from
/// `from` when it is there, and as a cell space named `fallback` otherwise.
pub fn import_base(ws: &mut Workspace, from: Option<&Workspace>, fallback: &str, p: &Arc<FacePoset>) -> Result<String> {
    if let Some(n) = ws.space_name_of(p) {
        return Ok(n.to_string());
    }
    if let Some(src) = from {
        if let Some(n) = src.space_name_of(p) {
            let space = src.space(n)?.clone();
            if let SpaceDef::Product(parts) = &space.def {
                for part in parts {
                    let q = src.space(part)?.poset.clone();
                    import_base(ws, from, part, &q)?;
                }
            }
            let n = n.to_string();
            ws.insert(&n, Item::Space(space))?;
            return Ok(n);
        }
    }
    let mut name = fallback.to_string();
    while ws.get(&name).is_ok() {
        name.push('\'');
    }
    if p.is_product() {
        let mut parts = Vec::new();
        for (i, f) in p.factor_list().iter().enumerate() {
            parts.push(import_base(ws, from, &format!("{name}{}", i + 1), f)?);
        }
        ws.insert(&name, Item::Space(Space { poset: p.clone(), def: SpaceDef::Product(parts) }))?;
    } else {
        ws.insert(&name, Item::Space(Space { poset: p.clone(), def: SpaceDef::Cells }))?;
    }
    Ok(name)
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    toks: Vec<(usize, &'a str)>,
}

fn tokenize(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        let lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(i, l)| Line { no: i + 1, text: l, toks: tokenize(l) })
            .collect();
        Parser { lines, pos: 0 }
    }

    fn err(line: &Line, tok: usize, msg: impl Into<String>) -> Error {
        let col = line.toks.get(tok).map_or(line.text.len() + 1, |t| t.0 + 1);
        Error::Parse { line: line.no, col, msg: msg.into() }
    }

    fn next(&mut self) -> Option<&Line<'a>> {
        let l = self.lines.get(self.pos);
        self.pos += 1;
        l
    }

    fn last_line_no(&self) -> usize {
        self.lines.last().map_or(1, |l| l.no)
    }

    fn workspace(mut self) -> Result<Workspace> {
        let first = self.next().ok_or(Error::Parse { line: 1, col: 1, msg: "empty input".into() })?;
        if first.text.trim() != HEADER {
            return Err(Parser::err(first, 0, format!("expected header `{HEADER}`")));
        }
        let fl = self.next().ok_or(Error::Parse { line: 2, col: 1, msg: "missing field line".into() })?;
        if fl.toks.len() != 2 || fl.toks[0].1 != "field" {
            return Err(Parser::err(fl, 0, "expected `field q` or `field fp:<p>`"));
        }
        let field: Field = fl.toks[1].1.parse().map_err(|e: Error| Parser::err(fl, 1, e.to_string()))?;
        let mut ws = Workspace::new(field);
        while self.pos < self.lines.len() {
            let head = &self.lines[self.pos];
            self.pos += 1;
            let kw = head.toks[0].1;
            let name = head.toks.get(1).map(|t| t.1).ok_or_else(|| Parser::err(head, 1, "missing name"))?;
            let (no, col) = (head.no, head.toks[1].0 + 1);
            let item = match kw {
                "space" => self.space(&ws, head_index(self.pos))?,
                "complex" => Item::Complex(Arc::new(self.complex_body(field)?)),
                "sheaf" | "kernel" => self.sheaf_item(&ws, field, head_index(self.pos), kw == "kernel")?,
                "map" => self.map_item(&ws, head_index(self.pos))?,
                "stops" => Item::Stops(self.stops_body()?),
                _ => return Err(Parser::err(head, 0, format!("unknown section '{kw}'"))),
            };
            ws.insert(name, item).map_err(|e| Error::Parse { line: no, col, msg: e.to_string() })?;
        }
        Ok(ws)
    }

    fn head(&self, idx: usize) -> &Line<'a> {
        &self.lines[idx]
    }

    /// Body lines up to `end`.
    fn body(&mut self) -> Result<(usize, usize)> {
        let start = self.pos;
        while let Some(l) = self.lines.get(self.pos) {
            self.pos += 1;
            if l.toks[0].1 == "end" {
                return Ok((start, self.pos - 1));
            }
        }
        Err(Error::Parse { line: self.last_line_no(), col: 1, msg: "missing `end`".into() })
    }

    fn space(&mut self, ws: &Workspace, hi: usize) -> Result<Item> {
        let head = self.head(hi);
        let kind = head.toks.get(2).map(|t| t.1).ok_or_else(|| Parser::err(head, 2, "missing space kind"))?;
        match kind {
            "product" => {
                let head = self.head(hi);
                let mut parts = Vec::new();
                let mut posets = Vec::new();
                for (k, t) in head.toks.iter().enumerate().skip(3) {
                    let s = ws.space(t.1).map_err(|e| Parser::err(head, k, e.to_string()))?;
                    parts.push(t.1.to_string());
                    posets.push(s.poset.clone());
                }
                if parts.len() < 2 {
                    return Err(Parser::err(head, 3, "a product needs at least two factors"));
                }
                Ok(Item::Space(Space { poset: FacePoset::product(&posets), def: SpaceDef::Product(parts) }))
            }
            "simplicial" | "cells" => {
                let (a, b) = self.body()?;
                let first = &self.lines[a.min(b)];
                if a == b || first.toks[0].1 != "vertices" {
                    return Err(Parser::err(first, 0, "expected `vertices ...`"));
                }
                let vnames: Vec<String> = first.toks[1..].iter().map(|t| t.1.to_string()).collect();
                let vindex: HashMap<&str, usize> = vnames.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
                let vid = |l: &Line, k: usize| -> Result<usize> {
                    vindex.get(l.toks[k].1).copied().ok_or_else(|| Parser::err(l, k, format!("unknown vertex '{}'", l.toks[k].1)))
                };
                if kind == "simplicial" {
                    let mut simplices = Vec::new();
                    for l in &self.lines[a + 1..b] {
                        if l.toks[0].1 != "simplex" || l.toks.len() < 2 {
                            return Err(Parser::err(l, 0, "expected `simplex <vertices>`"));
                        }
                        simplices.push((1..l.toks.len()).map(|k| vid(l, k)).collect::<Result<Vec<_>>>()?);
                    }
                    let k = SimplicialComplex::from_facets(vnames.clone(), &simplices)
                        .map_err(|e| Parser::err(first, 0, e.to_string()))?;
                    Ok(Item::Space(Space { poset: k.face_poset(), def: SpaceDef::Simplicial(k) }))
                } else {
                    let body = &self.lines[a + 1..b];
                    let cnames: Vec<&str> = body.iter().map(|l| l.toks.get(1).map_or("", |t| t.1)).collect();
                    let cindex: HashMap<&str, usize> = cnames.iter().enumerate().map(|(i, c)| (*c, i)).collect();
                    let mut cells = Vec::new();
                    let mut faces = Vec::new();
                    for l in body {
                        if l.toks.len() < 4 || l.toks[0].1 != "cell" || l.toks[3].1 != "vertices" {
                            return Err(Parser::err(l, 0, "expected `cell <name> <dim> vertices ... [faces f:±1 ...]`"));
                        }
                        let dim: usize = l.toks[2].1.parse().map_err(|_| Parser::err(l, 2, "bad dimension"))?;
                        let fpos = l.toks.iter().position(|t| t.1 == "faces").unwrap_or(l.toks.len());
                        let verts = (4..fpos).map(|k| vid(l, k)).collect::<Result<Vec<_>>>()?;
                        let mut fs = Vec::new();
                        for k in fpos + 1..l.toks.len() {
                            let (f, inc) = l.toks[k].1.rsplit_once(':').ok_or_else(|| Parser::err(l, k, "expected face:incidence"))?;
                            let t = *cindex.get(f).ok_or_else(|| Parser::err(l, k, format!("unknown cell '{f}'")))?;
                            let inc: i64 = inc.parse().map_err(|_| Parser::err(l, k, "bad incidence"))?;
                            fs.push((t, inc));
                        }
                        cells.push(Cell { dim, vertices: verts });
                        faces.push(fs);
                    }
                    let names = cnames.iter().map(|s| s.to_string()).collect();
                    let p = FacePoset::from_cells(names, cells, faces, vnames.clone())
                        .map_err(|e| Parser::err(first, 0, e.to_string()))?;
                    Ok(Item::Space(Space { poset: Arc::new(p), def: SpaceDef::Cells }))
                }
            }
            _ => Err(Parser::err(head, 2, "space kind must be simplicial, cells or product")),
        }
    }

    fn matrix(field: Field, l: &Line, k: usize) -> Result<Matrix> {
        let shape = l.toks.get(k).ok_or_else(|| Parser::err(l, k, "missing matrix"))?;
        let (r, c) = shape.1.split_once('x').ok_or_else(|| Parser::err(l, k, "expected <rows>x<cols>"))?;
        let rows: usize = r.parse().map_err(|_| Parser::err(l, k, "bad row count"))?;
        let cols: usize = c.parse().map_err(|_| Parser::err(l, k, "bad column count"))?;
        let rest_start = l.toks.get(k + 1).map_or(l.text.len(), |t| t.0);
        let rest = &l.text[rest_start..];
        let col0 = rest_start + 1;
        let inner = rest
            .trim_end()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or(Error::Parse { line: l.no, col: col0, msg: "matrix entries must be in [ ]".into() })?;
        let mut trip = Vec::new();
        let row_texts: Vec<&str> = if inner.trim().is_empty() { Vec::new() } else { inner.split(';').collect() };
        if row_texts.len() != rows && !(rows == 0 || cols == 0) {
            return Err(Error::Parse { line: l.no, col: col0, msg: format!("expected {rows} rows, found {}", row_texts.len()) });
        }
        let mut offset = col0 + 1;
        for (i, rt) in row_texts.iter().enumerate() {
            let entries = tokenize(rt);
            if entries.len() != cols {
                return Err(Error::Parse { line: l.no, col: offset, msg: format!("row {i} has {} entries, expected {cols}", entries.len()) });
            }
            for (j, (p, e)) in entries.iter().enumerate() {
                let v = field.parse(e).map_err(|m| Error::Parse { line: l.no, col: offset + p, msg: m })?;
                if !v.is_zero() {
                    trip.push((i, j, v));
                }
            }
            offset += rt.len() + 1;
        }
        Ok(Matrix::from_triplets(field, rows, cols, trip))
    }

    fn complex_body(&mut self, field: Field) -> Result<Complex> {
        let (a, b) = self.body()?;
        let body = &self.lines[a..b];
        if body.len() == 1 && body[0].toks[0].1 == "zero" {
            return Ok(Complex::zero(field));
        }
        let mut lo = None;
        let mut dims: Vec<usize> = Vec::new();
        let mut ds: BTreeMap<i32, Matrix> = BTreeMap::new();
        for l in body {
            match l.toks[0].1 {
                "lo" => lo = Some(int(l, 1)?),
                "dims" => dims = (1..l.toks.len()).map(|k| uint(l, k)).collect::<Result<_>>()?,
                "d" => {
                    let n = int(l, 1)?;
                    ds.insert(n, Parser::matrix(field, l, 2)?);
                }
                _ => return Err(Parser::err(l, 0, "expected lo, dims or d")),
            }
        }
        let lo = lo.ok_or(Error::Parse { line: self.lines[a.saturating_sub(1)].no, col: 1, msg: "missing `lo`".into() })?;
        let diffs: Vec<Matrix> = (0..dims.len().saturating_sub(1))
            .map(|i| {
                let n = lo + i as i32;
                ds.remove(&n).unwrap_or_else(|| Matrix::zeros(field, dims[i + 1], dims[i]))
            })
            .collect();
        if let Some((n, _)) = ds.into_iter().next() {
            return Err(Error::Parse { line: self.lines[a].no, col: 1, msg: format!("differential in degree {n} outside the complex") });
        }
        Complex::new(field, lo, dims, diffs).map_err(|e| Error::Parse { line: self.lines[a.saturating_sub(1)].no, col: 1, msg: e.to_string() })
    }

    fn sheaf_item(&mut self, ws: &Workspace, field: Field, hi: usize, kernel: bool) -> Result<Item> {
        let head = self.head(hi);
        let want = if kernel { 5 } else { 4 };
        if head.toks.len() != want || head.toks[2].1 != "on" {
            let msg = if kernel { "expected `kernel <name> on <source> <target>`" } else { "expected `sheaf <name> on <space>`" };
            return Err(Parser::err(head, 0, msg));
        }
        let base = if kernel {
            let s = ws.space(head.toks[3].1).map_err(|e| Parser::err(head, 3, e.to_string()))?;
            let t = ws.space(head.toks[4].1).map_err(|e| Parser::err(head, 4, e.to_string()))?;
            FacePoset::product(&[s.poset.clone(), t.poset.clone()])
        } else {
            ws.space(head.toks[3].1).map_err(|e| Parser::err(head, 3, e.to_string()))?.poset.clone()
        };
        let names: Vec<String> = head.toks[3..].iter().map(|t| t.1.to_string()).collect();
        let head_no = head.no;
        let (a, b) = self.body()?;
        let body = &self.lines[a..b];
        let cell = |l: &Line, k: usize| -> Result<usize> {
            let t = l.toks.get(k).ok_or_else(|| Parser::err(l, k, "missing cell"))?;
            base.index_of(t.1).ok_or_else(|| Parser::err(l, k, format!("unknown cell '{}'", t.1)))
        };
        let mut shape: Vec<Option<(i32, Vec<usize>)>> = vec![None; base.len()];
        let mut diffs: HashMap<(usize, i32), Matrix> = HashMap::new();
        let mut rhos: HashMap<(usize, usize), BTreeMap<i32, Matrix>> = HashMap::new();
        for l in body {
            match l.toks[0].1 {
                "stalk" => {
                    let s = cell(l, 1)?;
                    let lo = int(l, 2)?;
                    let dims = (3..l.toks.len()).map(|k| uint(l, k)).collect::<Result<Vec<_>>>()?;
                    shape[s] = Some((lo, dims));
                }
                "d" => {
                    let s = cell(l, 1)?;
                    diffs.insert((s, int(l, 2)?), Parser::matrix(field, l, 3)?);
                }
                "rho" => {
                    let s = cell(l, 1)?;
                    let t = cell(l, 2)?;
                    rhos.entry((s, t)).or_default().insert(int(l, 3)?, Parser::matrix(field, l, 4)?);
                }
                _ => return Err(Parser::err(l, 0, "expected stalk, d or rho")),
            }
        }
        let mut stalks = Vec::with_capacity(base.len());
        for (s, sh) in shape.iter().enumerate() {
            let c = match sh {
                None => Complex::zero(field),
                Some((lo, dims)) => {
                    let ds: Vec<Matrix> = (0..dims.len().saturating_sub(1))
                        .map(|i| {
                            let n = lo + i as i32;
                            diffs.remove(&(s, n)).unwrap_or_else(|| Matrix::zeros(field, dims[i + 1], dims[i]))
                        })
                        .collect();
                    Complex::new(field, *lo, dims.clone(), ds).map_err(|e| Error::Parse {
                        line: head_no,
                        col: 1,
                        msg: format!("stalk at {}: {e}", base.name(s)),
                    })?
                }
            };
            stalks.push(Arc::new(c));
        }
        if let Some(((s, n), _)) = diffs.into_iter().next() {
            return Err(Error::Parse { line: head_no, col: 1, msg: format!("differential at {} in degree {n} outside its stalk", base.name(s)) });
        }
        let mut covers = HashMap::new();
        for ((s, t), comps) in rhos {
            let m = ChainMap::from_parts(stalks[t].clone(), stalks[s].clone(), comps);
            covers.insert((s, t), m);
        }
        let sheaf = Sheaf::new(base.clone(), field, stalks, covers).map_err(|e| Error::Parse { line: head_no, col: 1, msg: e.to_string() })?;
        let sheaf = Arc::new(sheaf);
        if kernel {
            let s = ws.space(&names[0])?.poset.clone();
            let t = ws.space(&names[1])?.poset.clone();
            let kernel = Kernel::new(sheaf, s, t)?;
            Ok(Item::Kernel { source: names[0].clone(), target: names[1].clone(), kernel })
        } else {
            Ok(Item::Sheaf { space: names[0].clone(), sheaf })
        }
    }

    fn map_item(&mut self, ws: &Workspace, hi: usize) -> Result<Item> {
        let head = self.head(hi);
        if head.toks.len() != 5 {
            return Err(Parser::err(head, 0, "expected `map <name> <source> <target> <kind>`"));
        }
        let src = ws.space(head.toks[2].1).map_err(|e| Parser::err(head, 2, e.to_string()))?.poset.clone();
        let tgt = ws.space(head.toks[3].1).map_err(|e| Parser::err(head, 3, e.to_string()))?.poset.clone();
        let kind = match head.toks[4].1 {
            "general" => MapKind::General,
            "open-inclusion" => MapKind::OpenInclusion,
            "closed-inclusion" => MapKind::ClosedInclusion,
            "refinement" => MapKind::Refinement,
            "projection" => MapKind::Projection,
            "diagonal" => MapKind::Diagonal,
            _ => return Err(Parser::err(head, 4, "unknown map kind")),
        };
        let (source, target) = (head.toks[2].1.to_string(), head.toks[3].1.to_string());
        let head_no = head.no;
        let (a, b) = self.body()?;
        let mut map = vec![usize::MAX; src.len()];
        for l in &self.lines[a..b] {
            if l.toks.len() != 3 || l.toks[0].1 != "send" {
                return Err(Parser::err(l, 0, "expected `send <cell> <cell>`"));
            }
            let s = src.index_of(l.toks[1].1).ok_or_else(|| Parser::err(l, 1, "unknown source cell"))?;
            let t = tgt.index_of(l.toks[2].1).ok_or_else(|| Parser::err(l, 2, "unknown target cell"))?;
            map[s] = t;
        }
        if let Some(s) = map.iter().position(|t| *t == usize::MAX) {
            return Err(Error::Parse { line: head_no, col: 1, msg: format!("no image for {}", src.name(s)) });
        }
        let map = PosetMap::new(src, tgt, map, kind).map_err(|e| Error::Parse { line: head_no, col: 1, msg: e.to_string() })?;
        Ok(Item::Map { source, target, map })
    }

    fn stops_body(&mut self) -> Result<StopConfig> {
        let (a, b) = self.body()?;
        let mut text = String::from("stops v1\n");
        for l in &self.lines[a..b] {
            text.push_str(l.text);
            text.push('\n');
        }
        let base_line = self.lines.get(a).map_or(1, |l| l.no);
        StopConfig::parse(&text).map_err(|e| match e {
            Error::Parse { line, col, msg } => {
                let real = self.lines.get(a + line.saturating_sub(2)).map_or(base_line, |l| l.no);
                Error::Parse { line: real, col, msg }
            }
            other => other,
        })
    }
}

fn head_index(pos: usize) -> usize {
    pos - 1
}

fn int(l: &Line, k: usize) -> Result<i32> {
    l.toks.get(k).and_then(|t| t.1.parse().ok()).ok_or_else(|| Parser::err(l, k, "expected an integer"))
}

fn uint(l: &Line, k: usize) -> Result<usize> {
    l.toks.get(k).and_then(|t| t.1.parse().ok()).ok_or_else(|| Parser::err(l, k, "expected a nonnegative integer"))
}

/// The bundled interval fixture: the interval with its constant sheaf.
pub fn interval_fixture() -> Workspace {
    let mut ws = Workspace::new(Field::Rationals);
    let k = SimplicialComplex::interval();
    let p = ws.add_simplicial("I", &k).expect("fresh workspace");
    ws.add_sheaf("k", "I", Sheaf::constant(p, Field::Rationals)).expect("constant sheaf");
    ws
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_fixture_round_trips() {
        let t = interval_fixture().to_text();
        let ws = Workspace::parse(&t).unwrap();
        assert_eq!(ws.to_text(), t);
        let f = ws.sheaf("k").unwrap();
        assert_eq!(f.as_ref(), &Sheaf::constant(ws.space("I").unwrap().poset.clone(), Field::Rationals));
    }

    #[test]
    fn empty_complex_round_trips() {
        let mut ws = Workspace::new(Field::Rationals);
        ws.insert("z", Item::Complex(Arc::new(Complex::zero(Field::Rationals)))).unwrap();
        let t = ws.to_text();
        assert_eq!(Workspace::parse(&t).unwrap().to_text(), t);
    }

    #[test]
    fn rejects_d_squared() {
        let t = "strata v1\nfield q\ncomplex c\nlo 0\ndims 1 1 1\nd 0 1x1 [1]\nd 1 1x1 [1]\nend\n";
        let e = Workspace::parse(t).unwrap_err();
        assert!(e.to_string().contains("between degrees 0 and 2"), "{e}");
    }

    #[test]
    fn reports_position() {
        let t = "strata v1\nfield q\ncomplex c\nlo 0\ndims 1 1\nd 0 1x1 [1/0]\nend\n";
        match Workspace::parse(t).unwrap_err() {
            Error::Parse { line, col, .. } => assert_eq!((line, col), (6, 10)),
            e => panic!("{e}"),
        }
    }
}
