//! Instance files.
//!
//! ```text
//! [curve]
//! mode number_field
//! place inf archimedean 1
//! place 2 nonarchimedean 1 2
//! [polytope]
//! 0
//! 1
//! [place inf]
//! -1 1
//! ```
//!
//! Curve lines are `place <label> <kind> <weight> [step base]`. Polytope lines
//! are vertices; place sections list affine pieces as `gradient… offset`.
//! `#` starts a comment.

use num_traits::Zero;

use super::{MetrizedToricDivisor, ToricError};
use crate::adelic::{AdelicCurve, CurveMode, Locus, Place, PlaceKind};
use crate::roof::{AffinePiece, PiecewiseLinearConcave};
use crate::scalar::Scalar;
use crate::{ConvexBody, Rational};

fn parse_err(line: usize, message: impl Into<String>) -> ToricError {
    ToricError::Parse { line, message: message.into() }
}

fn rational(line: usize, token: &str) -> Result<Rational, ToricError> {
    Rational::parse_token(token).ok_or_else(|| parse_err(line, format!("bad number {token:?}")))
}

fn locus_for(label: &str, kind: PlaceKind, base: Option<u64>) -> Locus {
    match (kind, label.parse::<u64>()) {
        (_, _) if label == "inf" => Locus::Infinity,
        (PlaceKind::NonArchimedean, Ok(p)) if Some(p) == base => Locus::Prime(p),
        _ => Locus::Abstract,
    }
}

enum Section {
    None,
    Curve,
    Polytope,
    Place,
}

impl MetrizedToricDivisor {
    pub fn from_text(text: &str) -> Result<Self, ToricError> {
        let mut mode = CurveMode::NumberField;
        let mut places: Vec<Place> = Vec::new();
        let mut vertices: Vec<Vec<Rational>> = Vec::new();
        let mut polytope_line = 0;
        let mut roofs: Vec<(String, usize, Vec<AffinePiece<Rational>>)> = Vec::new();
        let mut section = Section::None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(header) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let words: Vec<&str> = header.split_whitespace().collect();
                section = match words.as_slice() {
                    ["curve"] => Section::Curve,
                    ["polytope"] => {
                        polytope_line = line;
                        Section::Polytope
                    }
                    ["place", label] => {
                        if roofs.iter().any(|(l, _, _)| l == label) {
                            return Err(parse_err(line, format!("place {label} listed twice")));
                        }
                        roofs.push((label.to_string(), line, Vec::new()));
                        Section::Place
                    }
                    _ => return Err(parse_err(line, format!("unknown section [{header}]"))),
                };
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match &section {
                Section::None => return Err(parse_err(line, "content before the first section")),
                Section::Curve => match tokens.as_slice() {
                    ["mode", m] => {
                        mode = CurveMode::parse(m).ok_or_else(|| parse_err(line, format!("unknown mode {m}")))?;
                    }
                    ["place", label, kind, weight, rest @ ..] => {
                        let kind = PlaceKind::parse(kind).ok_or_else(|| parse_err(line, format!("unknown place kind {kind}")))?;
                        let weight = rational(line, weight)?;
                        let step_base = match rest {
                            [] => None,
                            [b] => Some(b.parse::<u64>().map_err(|_| parse_err(line, format!("bad step base {b:?}")))?),
                            _ => return Err(parse_err(line, "too many fields in place line")),
                        };
                        if kind == PlaceKind::NonArchimedean && step_base.is_none() {
                            return Err(parse_err(line, format!("place {label} needs a step base")));
                        }
                        places.push(Place {
                            label: label.to_string(),
                            kind,
                            weight,
                            step_base,
                            locus: locus_for(label, kind, step_base),
                        });
                    }
                    _ => return Err(parse_err(line, format!("expected `mode` or `place` line, got {content:?}"))),
                },
                Section::Polytope => {
                    let v = tokens.iter().map(|t| rational(line, t)).collect::<Result<Vec<_>, _>>()?;
                    if let Some(first) = vertices.first() {
                        if first.len() != v.len() {
                            return Err(parse_err(line, format!("vertex has {} coordinates, expected {}", v.len(), first.len())));
                        }
                    }
                    vertices.push(v);
                }
                Section::Place => {
                    let mut vals = tokens.iter().map(|t| rational(line, t)).collect::<Result<Vec<_>, _>>()?;
                    if vals.len() < 2 {
                        return Err(parse_err(line, "affine piece needs a gradient and an offset"));
                    }
                    let offset = vals.pop().expect("nonempty");
                    roofs.last_mut().expect("inside a place section").2.push(AffinePiece { gradient: vals, offset });
                }
            }
        }
        if places.is_empty() {
            return Err(parse_err(text.lines().count().max(1), "missing [curve] places"));
        }
        if vertices.is_empty() {
            return Err(parse_err(text.lines().count().max(1), "missing [polytope] vertices"));
        }
        let curve = AdelicCurve::new(places, mode).map_err(|e| parse_err(1, e.to_string()))?;
        let polytope = ConvexBody::hull(&vertices).map_err(|e| parse_err(polytope_line, e.to_string()))?;
        let d = polytope.dim();
        let mut labeled = Vec::new();
        for (label, line, pieces) in roofs {
            if curve.index_of(&label).is_none() {
                return Err(parse_err(line, format!("place {label} is not on the curve")));
            }
            if pieces.is_empty() {
                return Err(parse_err(line, format!("place {label} has no affine pieces")));
            }
            if let Some(p) = pieces.iter().find(|p| p.gradient.len() != d) {
                return Err(parse_err(line, format!("piece gradient has {} entries, polytope dimension is {d}", p.gradient.len())));
            }
            let roof = PiecewiseLinearConcave::new(polytope.clone(), pieces).map_err(|e| parse_err(line, e.to_string()))?;
            labeled.push((label, roof));
        }
        MetrizedToricDivisor::new(curve, polytope, labeled)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("[curve]\n");
        out.push_str(&format!("mode {}\n", self.curve.mode.name()));
        for p in &self.curve.places {
            out.push_str(&format!("place {} {} {}", p.label, p.kind.name(), p.weight.to_token()));
            if let Some(b) = p.step_base {
                out.push_str(&format!(" {b}"));
            }
            out.push('\n');
        }
        out.push_str("[polytope]\n");
        for v in self.polytope.vertices() {
            let t: Vec<String> = v.iter().map(Scalar::to_token).collect();
            out.push_str(&t.join(" "));
            out.push('\n');
        }
        for (p, roof) in self.curve.places.iter().zip(&self.roofs) {
            let zero = roof.is_constant() && roof.pieces().iter().all(|q| q.offset.is_zero());
            if zero {
                continue;
            }
            out.push_str(&format!("[place {}]\n", p.label));
            for piece in roof.pieces() {
                let mut t: Vec<String> = piece.gradient.iter().map(Scalar::to_token).collect();
                t.push(piece.offset.to_token());
                out.push_str(&t.join(" "));
                out.push('\n');
            }
        }
        out
    }
}
