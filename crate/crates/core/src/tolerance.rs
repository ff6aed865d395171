//! Absolute + relative tolerance pairs for floating comparisons.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    /// Default for algebraic identities.
    pub const IDENTITY: Tolerance = Tolerance { abs: 1e-12, rel: 1e-9 };

    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    pub const fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    pub const fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    /// `|a - b| <= abs + rel * max(|a|, |b|)`
    pub fn close(&self, a: f64, b: f64) -> bool {
        if a == b {
            return true;
        }
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }

    pub fn bound(&self, reference: f64) -> f64 {
        self.abs + self.rel * reference.abs()
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::IDENTITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn close_uses_both_parts() {
        let t = Tolerance::new(0.1, 0.0);
        assert!(t.close(12.0, 12.09));
        assert!(!t.close(12.0, 12.2));
        let t = Tolerance::relative(0.005);
        assert!(t.close(833.3, 833.333));
        assert!(!t.close(833.3, 840.0));
    }
}
