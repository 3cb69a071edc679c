use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which family of equations is being sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// `z^2 + h(x,y) z = f(x,y)` with both `h` and `f` random.
    GeneralizedBQ,
    /// `z^2 = f(x,y)`, i.e. `h = 0`.
    PlainBQ,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::GeneralizedBQ => "gbq",
            ModelKind::PlainBQ => "quartic",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gbq" | "generalized" => Ok(ModelKind::GeneralizedBQ),
            "quartic" | "plain" => Ok(ModelKind::PlainBQ),
            other => Err(format!("unknown model `{other}` (expected quartic or gbq)")),
        }
    }
}
