//! Text formats for arcs (projective systems) and additive codes.
//!
//! Arc file: a header `arc q=<p^e> r=<r> h=<h> n=<n>`, then `n` blocks of `h`
//! rows of `r` coordinates, blocks separated by blank lines. Each row is a run
//! of single digits, or whitespace-separated integer encodings when `q > 10`.
//! Several arcs may follow each other in one file.
//!
//! Code file: a header `code q=<p^e> h=<h> r=<r> n=<n>`, then `r` rows of `n`
//! element tokens of `F_{q^h}` (`0`, `1`, `w`, `w^k` or integer encodings).
//! An optional `ext=<descriptor>` header field overrides the modulus of `F_{q^h}`.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::code::{AdditiveCode, CodeError};
use crate::field::{Field, FieldError, FieldTower};
use crate::geometry::{GeometryError, ProjectiveSystem, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

/// Short field descriptor: the order for prime fields with the pinned modulus,
/// `p^e` for pinned extension fields, the full descriptor otherwise.
fn field_token(f: &Field) -> String {
    match Field::new(f.p(), f.e(), None) {
        Ok(d) if d.modulus() == f.modulus() => {
            if f.e() == 1 {
                f.p().to_string()
            } else {
                format!("{}^{}", f.p(), f.e())
            }
        }
        _ => f.descriptor(),
    }
}

struct Header {
    kind: String,
    fields: HashMap<String, String>,
}

fn parse_header(line_no: usize, line: &str) -> Result<Header, FormatError> {
    let mut toks = line.split_whitespace();
    let kind = toks.next().ok_or_else(|| syntax(line_no, "empty header"))?.to_string();
    let mut fields = HashMap::new();
    for t in toks {
        let (k, v) = t.split_once('=').ok_or_else(|| syntax(line_no, format!("expected key=value, got `{t}`")))?;
        if fields.insert(k.to_string(), v.to_string()).is_some() {
            return Err(syntax(line_no, format!("repeated header field `{k}`")));
        }
    }
    Ok(Header { kind, fields })
}

impl Header {
    fn get(&self, line: usize, key: &str) -> Result<&str, FormatError> {
        self.fields.get(key).map(|s| s.as_str()).ok_or_else(|| syntax(line, format!("missing header field `{key}`")))
    }
    fn usize(&self, line: usize, key: &str) -> Result<usize, FormatError> {
        let v = self.get(line, key)?;
        v.parse().map_err(|_| syntax(line, format!("`{key}` must be a nonnegative integer, got `{v}`")))
    }
    fn check_keys(&self, line: usize, allowed: &[&str]) -> Result<(), FormatError> {
        match self.fields.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(syntax(line, format!("unknown header field `{k}`"))),
            None => Ok(()),
        }
    }
}

/// Numbered lines with trailing whitespace removed.
fn lines(text: &str) -> Vec<(usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end())).collect()
}

fn parse_row(line_no: usize, s: &str, field: &Field, r: usize) -> Result<Vec<u32>, FormatError> {
    let s = s.trim();
    let toks: Vec<&str> =
        if s.contains(char::is_whitespace) { s.split_whitespace().collect() } else { s.split("").filter(|t| !t.is_empty()).collect() };
    if toks.len() != r {
        return Err(syntax(line_no, format!("expected {r} coordinates, got {}", toks.len())));
    }
    toks.iter()
        .map(|t| {
            t.parse::<u32>()
                .ok()
                .filter(|&v| v < field.order())
                .ok_or_else(|| syntax(line_no, format!("`{t}` is not an element of F_{}", field.order())))
        })
        .collect()
}

/// Parses a file holding one or more arcs.
pub fn parse_arcs(text: &str) -> Result<Vec<ProjectiveSystem>, FormatError> {
    let ls = lines(text);
    let mut i = 0;
    let mut out = Vec::new();
    let skip_blank = |i: &mut usize| {
        while *i < ls.len() && ls[*i].1.trim().is_empty() {
            *i += 1;
        }
    };
    loop {
        skip_blank(&mut i);
        if i == ls.len() {
            break;
        }
        let (hl, htext) = ls[i];
        let hdr = parse_header(hl, htext)?;
        if hdr.kind != "arc" {
            return Err(syntax(hl, format!("expected `arc` header, got `{}`", hdr.kind)));
        }
        hdr.check_keys(hl, &["q", "r", "h", "n"])?;
        let field = Field::parse_descriptor(hdr.get(hl, "q")?)?;
        let (r, h, n) = (hdr.usize(hl, "r")?, hdr.usize(hl, "h")?, hdr.usize(hl, "n")?);
        i += 1;
        let mut elements = Vec::with_capacity(n);
        for b in 0..n {
            if b > 0 {
                if i >= ls.len() || !ls[i].1.trim().is_empty() {
                    let at = ls.get(i).map_or(ls.len() + 1, |l| l.0);
                    return Err(syntax(at, "expected a blank line between blocks"));
                }
                skip_blank(&mut i);
            }
            let mut rows = Vec::with_capacity(h);
            for _ in 0..h {
                let Some(&(ln, t)) = ls.get(i) else {
                    return Err(syntax(ls.len() + 1, format!("arc ends inside block {}", b + 1)));
                };
                if t.trim().is_empty() {
                    return Err(syntax(ln, format!("block {} has fewer than {h} rows", b + 1)));
                }
                rows.push(parse_row(ln, t, &field, r)?);
                i += 1;
            }
            let sub = if rows.is_empty() { Subspace::zero(&field, r) } else { Subspace::from_rows(&field, r, &rows)? };
            elements.push(sub);
        }
        if i < ls.len() && !ls[i].1.trim().is_empty() && !ls[i].1.trim_start().starts_with("arc") {
            return Err(syntax(ls[i].0, format!("more than {n} blocks")));
        }
        out.push(ProjectiveSystem::new(&field, r, h, elements)?);
    }
    Ok(out)
}

/// Parses a file holding exactly one arc.
pub fn parse_arc(text: &str) -> Result<ProjectiveSystem, FormatError> {
    let mut all = parse_arcs(text)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        n => Err(syntax(1, format!("expected one arc, found {n}"))),
    }
}

fn coordinate_row(field: &Field, v: &[u32]) -> String {
    if field.order() <= 10 {
        v.iter().map(|d| d.to_string()).collect()
    } else {
        v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
    }
}

/// Serializes one arc; elements of dimension below `h` are padded with zero rows.
pub fn write_arc(sys: &ProjectiveSystem) -> String {
    let f = sys.field();
    let mut out = format!("arc q={} r={} h={} n={}\n", field_token(f), sys.r(), sys.h(), sys.len());
    for (b, e) in sys.elements().iter().enumerate() {
        if b > 0 {
            out.push('\n');
        }
        let mut rows = e.basis().row_vecs();
        rows.resize(sys.h(), vec![0; sys.r()]);
        for row in rows {
            out.push_str(&coordinate_row(f, &row));
            out.push('\n');
        }
    }
    out
}

pub fn write_arcs(systems: &[ProjectiveSystem]) -> String {
    systems.iter().map(write_arc).collect::<Vec<_>>().join("\n")
}

/// Parses a code file.
pub fn parse_code(text: &str) -> Result<AdditiveCode, FormatError> {
    let ls: Vec<(usize, &str)> = lines(text).into_iter().filter(|(_, l)| !l.trim().is_empty()).collect();
    let Some(&(hl, htext)) = ls.first() else {
        return Err(syntax(1, "empty code file"));
    };
    let hdr = parse_header(hl, htext)?;
    if hdr.kind != "code" {
        return Err(syntax(hl, format!("expected `code` header, got `{}`", hdr.kind)));
    }
    hdr.check_keys(hl, &["q", "h", "r", "n", "ext"])?;
    let base = Field::parse_descriptor(hdr.get(hl, "q")?)?;
    let (h, r, n) = (hdr.usize(hl, "h")?, hdr.usize(hl, "r")?, hdr.usize(hl, "n")?);
    if h == 0 {
        return Err(syntax(hl, "h must be positive"));
    }
    let ext = match hdr.fields.get("ext") {
        Some(d) => Field::parse_descriptor(d)?,
        None => {
            let order = (base.order() as u64).checked_pow(h as u32).filter(|&o| o <= crate::field::MAX_ORDER);
            Field::of_order(order.ok_or(FieldError::TooLarge(base.order() as u64))? as u32)?
        }
    };
    let tower = Arc::new(FieldTower::new(base, ext, None)?);
    if tower.h() != h {
        return Err(syntax(hl, format!("ext field has degree {} over the base, header says h={h}", tower.h())));
    }
    if ls.len() - 1 != r {
        return Err(syntax(hl, format!("expected {r} generator rows, found {}", ls.len() - 1)));
    }
    let ext = tower.ext().clone();
    let mut rows = Vec::with_capacity(r);
    for &(ln, t) in &ls[1..] {
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != n {
            return Err(syntax(ln, format!("expected {n} entries, got {}", toks.len())));
        }
        let row = toks
            .iter()
            .map(|tok| ext.parse_element(tok).map_err(|_| syntax(ln, format!("bad element `{tok}`"))))
            .collect::<Result<Vec<u32>, _>>()?;
        rows.push(row);
    }
    if r == 0 {
        return Ok(AdditiveCode::zero(tower, n));
    }
    Ok(AdditiveCode::new(tower, n, rows)?)
}

/// Serializes a code; the `ext` field is written only for a non-default modulus.
pub fn write_code(c: &AdditiveCode) -> String {
    let tower = c.tower();
    let ext = tower.ext();
    let mut out = format!("code q={} h={} r={} n={}", field_token(tower.base()), c.h(), c.r(), c.n());
    let default_ext = Field::new(ext.p(), ext.e(), None).map(|d| d.modulus() == ext.modulus()).unwrap_or(false);
    if !default_ext {
        out.push_str(&format!(" ext={}", ext.descriptor()));
    }
    out.push('\n');
    for row in c.rows() {
        let toks: Vec<String> = row.iter().map(|&x| ext.format_element(x)).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}
