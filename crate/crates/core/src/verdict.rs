//! Three-valued outcomes of checkers, verifiers and searches.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Violated,
    Inconclusive,
}

/// Outcome of a single check.
///
/// `checked` counts the comparisons that were actually judged and `skipped`
/// counts those that were deliberately not judged (a `0/0` ratio, a
/// zero-probability window). A violation always carries a witness payload that
/// is enough to replay the failing comparison by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: String,
    pub status: Status,
    pub checked: u64,
    pub skipped: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn holds(property: impl Into<String>) -> Self {
        Verdict {
            property: property.into(),
            status: Status::Holds,
            checked: 0,
            skipped: 0,
            witness: None,
            notes: Vec::new(),
        }
    }

    pub fn violated(property: impl Into<String>, witness: Value) -> Self {
        Verdict {
            status: Status::Violated,
            witness: Some(witness),
            ..Verdict::holds(property)
        }
    }

    pub fn inconclusive(property: impl Into<String>, reason: impl Into<String>) -> Self {
        Verdict {
            status: Status::Inconclusive,
            notes: vec![reason.into()],
            ..Verdict::holds(property)
        }
    }

    /// Maps a cap error to an inconclusive verdict; other errors pass through.
    pub fn from_cap(property: impl Into<String>, err: Error) -> Result<Self, Error> {
        match err {
            Error::CapExceeded { .. } => Ok(Verdict::inconclusive(property, err.to_string())),
            other => Err(other),
        }
    }

    pub fn is_holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn is_violated(&self) -> bool {
        self.status == Status::Violated
    }

    pub fn is_inconclusive(&self) -> bool {
        self.status == Status::Inconclusive
    }

    pub fn with_counts(mut self, checked: u64, skipped: u64) -> Self {
        self.checked = checked;
        self.skipped = skipped;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Combines verdicts: any violation wins (the first one is kept as witness),
    /// then any inconclusive part, otherwise the aggregate holds. Counts add up.
    pub fn aggregate(property: impl Into<String>, parts: impl IntoIterator<Item = Verdict>) -> Self {
        let mut out = Verdict::holds(property);
        for part in parts {
            out.absorb(part);
        }
        out
    }

    pub fn absorb(&mut self, part: Verdict) {
        self.checked += part.checked;
        self.skipped += part.skipped;
        match (self.status, part.status) {
            (Status::Violated, _) => {}
            (_, Status::Violated) => {
                self.status = Status::Violated;
                self.witness = part.witness;
            }
            (_, Status::Inconclusive) => {
                self.status = Status::Inconclusive;
                for n in part.notes {
                    if !self.notes.contains(&n) {
                        self.notes.push(n);
                    }
                }
            }
            _ => {
                for n in part.notes {
                    if !self.notes.contains(&n) {
                        self.notes.push(n);
                    }
                }
            }
        }
    }
}

/// Running tally used by checkers that loop over many comparisons.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    pub checked: u64,
    pub skipped: u64,
    pub witness: Option<Value>,
}

impl Tally {
    /// Records the outcome of one comparison; `None` means skipped.
    /// Returns `true` when the comparison failed.
    pub fn record(&mut self, outcome: Option<bool>, witness: impl FnOnce() -> Value) -> bool {
        match outcome {
            None => {
                self.skipped += 1;
                false
            }
            Some(true) => {
                self.checked += 1;
                false
            }
            Some(false) => {
                self.checked += 1;
                if self.witness.is_none() {
                    self.witness = Some(witness());
                }
                true
            }
        }
    }

    pub fn failed(&self) -> bool {
        self.witness.is_some()
    }

    pub fn finish(self, property: impl Into<String>) -> Verdict {
        let v = match self.witness {
            Some(w) => Verdict::violated(property, w),
            None => Verdict::holds(property),
        };
        v.with_counts(self.checked, self.skipped)
    }
}
