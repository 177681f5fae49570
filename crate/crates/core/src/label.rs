use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// Review class.
///
/// The project-wide sign convention maps truthful to +1 and deceptive to −1,
/// so positive SVM weights point at truthful reviews.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Truthful,
    Deceptive,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Truthful, Label::Deceptive];

    pub fn sign(self) -> f64 {
        match self {
            Label::Truthful => 1.0,
            Label::Deceptive => -1.0,
        }
    }

    /// Label for a decision value; exactly zero goes to truthful.
    pub fn from_margin(margin: f64) -> Label {
        if margin >= 0.0 {
            Label::Truthful
        } else {
            Label::Deceptive
        }
    }

    pub fn index(self) -> usize {
        match self {
            Label::Truthful => 0,
            Label::Deceptive => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Truthful => "truthful",
            Label::Deceptive => "deceptive",
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Truthful => Label::Deceptive,
            Label::Deceptive => Label::Truthful,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label token {0:?}")]
pub struct UnknownLabel(pub alloc::string::String);

impl FromStr for Label {
    type Err = UnknownLabel;

    /// Accepts the full names plus the single-letter forms `t`/`d` and the
    /// `T`/`D` judge notation.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "truthful" | "t" => Ok(Label::Truthful),
            "deceptive" | "d" => Ok(Label::Deceptive),
            _ => Err(UnknownLabel(s.into())),
        }
    }
}
