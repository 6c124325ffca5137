//! Facet files: a line-oriented text format and a JSON mirror.
//!
//! Text lines hold four base-10 labels separated by single spaces; lines
//! starting with `#` are comments and blank lines are skipped.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex3, Tetra};
use crate::error::{Error, Result};

pub fn parse_tet(text: &str) -> Result<Complex3> {
    let mut facets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(' ').collect();
        if parts.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 4 labels separated by single spaces, got {line:?}"),
            });
        }
        let mut t = [0u32; 4];
        for (slot, p) in t.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid vertex label {p:?}"),
            })?;
        }
        if crate::complex::canonical(t).is_none() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("facet {t:?} repeats a vertex"),
            });
        }
        facets.push(t);
    }
    if facets.is_empty() {
        return Err(Error::Empty);
    }
    Complex3::new(facets)
}

/// Canonical text: sorted vertices per line, lines in lexicographic order.
pub fn write_tet(k: &Complex3) -> String {
    let mut out = String::new();
    for t in k.facets() {
        let _ = writeln!(out, "{} {} {} {}", t[0], t[1], t[2], t[3]);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct FacetsJson {
    facets: Vec<Vec<serde_json::Value>>,
}

pub fn parse_json(text: &str) -> Result<Complex3> {
    let doc: FacetsJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut facets: Vec<Tetra> = Vec::with_capacity(doc.facets.len());
    for (i, f) in doc.facets.iter().enumerate() {
        let bad = |message: String| Error::Parse {
            line: i + 1,
            message: format!("facet {i}: {message}"),
        };
        if f.len() != 4 {
            return Err(bad(format!("expected 4 labels, got {}", f.len())));
        }
        let mut t = [0u32; 4];
        for (slot, v) in t.iter_mut().zip(f) {
            *slot = v
                .as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| bad(format!("invalid vertex label {v}")))?;
        }
        if crate::complex::canonical(t).is_none() {
            return Err(bad(format!("facet {t:?} repeats a vertex")));
        }
        facets.push(t);
    }
    Complex3::new(facets)
}

pub fn write_json(k: &Complex3) -> String {
    let facets: Vec<Tetra> = k.facets().copied().collect();
    serde_json::json!({ "facets": facets }).to_string()
}

/// Parses either format, choosing JSON when the text starts with `{`.
pub fn parse_any(text: &str) -> Result<Complex3> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_tet(text)
    }
}
