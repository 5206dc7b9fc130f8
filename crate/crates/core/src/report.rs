//! Named numeric checks shared by the suites and the CLI summary.

/// One row of a check report: an estimate compared against a reference.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub estimate: f64,
    pub reference: f64,
    pub gap: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `|estimate − reference| ≤ tolerance`.
    pub fn close(name: impl Into<String>, estimate: f64, reference: f64, tolerance: f64) -> Self {
        let gap = (estimate - reference).abs();
        Check { name: name.into(), estimate, reference, gap, pass: gap <= tolerance }
    }

    /// Passes when the relative gap is at most `tolerance`.
    pub fn relative(name: impl Into<String>, estimate: f64, reference: f64, tolerance: f64) -> Self {
        let gap = (estimate - reference).abs() / reference.abs().max(1e-300);
        Check { name: name.into(), estimate, reference, gap, pass: gap <= tolerance }
    }

    /// Passes when `estimate ≤ reference + slack`; the gap is `estimate − reference`.
    pub fn at_most(name: impl Into<String>, estimate: f64, reference: f64, slack: f64) -> Self {
        let gap = estimate - reference;
        Check { name: name.into(), estimate, reference, gap, pass: gap <= slack }
    }

    /// Passes when `estimate ≥ reference − slack`; the gap is `reference − estimate`.
    pub fn at_least(name: impl Into<String>, estimate: f64, reference: f64, slack: f64) -> Self {
        let gap = reference - estimate;
        Check { name: name.into(), estimate, reference, gap, pass: gap <= slack }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Check { name: name.into(), estimate: v, reference: 1.0, gap: 1.0 - v, pass: ok }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
