use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of one numerical lemma check.
///
/// `pass` is only meaningful when `applicable`; a failed precondition is
/// reported as not applicable rather than as a failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub measured: f64,
    pub bound_lo: Option<f64>,
    pub bound_hi: Option<f64>,
    pub pass: bool,
    pub applicable: bool,
    pub worst_location: Option<f64>,
    pub details: BTreeMap<String, f64>,
    pub note: String,
}

impl LemmaReport {
    /// Report whose pass flag is `measured ∈ [lo, hi]`.
    pub fn bracket(lemma: &str, measured: f64, lo: Option<f64>, hi: Option<f64>) -> Self {
        let pass = measured.is_finite() && lo.is_none_or(|l| measured >= l) && hi.is_none_or(|h| measured <= h);
        Self {
            lemma: lemma.into(),
            measured,
            bound_lo: lo,
            bound_hi: hi,
            pass,
            applicable: true,
            worst_location: None,
            details: BTreeMap::new(),
            note: String::new(),
        }
    }

    pub fn not_applicable(lemma: &str, note: impl Into<String>) -> Self {
        Self {
            lemma: lemma.into(),
            measured: f64::NAN,
            bound_lo: None,
            bound_hi: None,
            pass: false,
            applicable: false,
            worst_location: None,
            details: BTreeMap::new(),
            note: note.into(),
        }
    }

    pub fn at(mut self, x: f64) -> Self {
        self.worst_location = Some(x);
        self
    }

    pub fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.into(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Applicable and passing.
    pub fn ok(&self) -> bool {
        self.applicable && self.pass
    }
}

/// `max / min` of positive values; infinite when the minimum is not positive.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else if max == 0.0 && min == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}
