//! Line-oriented body format: `dim d` followed by one vertex per line.

use thiserror::Error;

use super::{ConvexBody, GeomError};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseBodyError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

pub(super) fn write_body<T: Scalar>(body: &ConvexBody<T>) -> String {
    let mut out = format!("dim {}\n", body.dim());
    for v in body.vertices() {
        let tokens: Vec<String> = v.iter().map(Scalar::to_fraction_token).collect();
        out.push_str(&tokens.join(" "));
        out.push('\n');
    }
    out
}

pub(super) fn read_body<T: Scalar>(text: &str) -> Result<ConvexBody<T>, ParseBodyError> {
    let syntax = |line: usize, message: String| ParseBodyError::Syntax { line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (first_no, first) = lines.next().ok_or_else(|| syntax(1, "missing `dim` header".into()))?;
    let dim: usize = first
        .strip_prefix("dim")
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or_else(|| syntax(first_no, format!("expected `dim <d>`, found `{first}`")))?;
    let mut points = Vec::new();
    for (no, line) in lines {
        let coords: Vec<T> = line
            .split_whitespace()
            .map(|tok| T::parse_token(tok).ok_or_else(|| syntax(no, format!("bad rational `{tok}`"))))
            .collect::<Result<_, _>>()?;
        if coords.len() != dim {
            return Err(syntax(no, format!("expected {dim} coordinates, found {}", coords.len())));
        }
        points.push(coords);
    }
    if points.is_empty() {
        return Err(syntax(first_no, "no vertices".into()));
    }
    Ok(ConvexBody::hull(&points)?)
}
