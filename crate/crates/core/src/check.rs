//! Outcome of a budgeted identity check.

use std::fmt;

/// An identity compared coefficientwise: `residual` is the valuation of the
/// difference (capped at the precision of the comparison), `required` the
/// budget it must reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub residual: i32,
    pub required: i32,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: i32, required: i32) -> Self {
        Check { name: name.into(), residual, required }
    }

    /// A yes/no fact, rendered as residual 1 (holds) or 0 against budget 1.
    pub fn boolean(name: impl Into<String>, holds: bool) -> Self {
        Check { name: name.into(), residual: i32::from(holds), required: 1 }
    }

    pub fn passed(&self) -> bool {
        self.residual >= self.required
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let st = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{st} {} (residual {} >= {})", self.name, self.residual, self.required)
    }
}
