use serde::{Deserialize, Serialize};

/// Two sides of an identity or inequality, their signed difference
/// `gap = lhs - rhs`, and the tolerance scale `max(|lhs|, |rhs|, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub scale: f64,
}

impl Gap {
    pub fn signed(lhs: f64, rhs: f64) -> Self {
        Gap {
            lhs,
            rhs,
            gap: lhs - rhs,
            scale: lhs.abs().max(rhs.abs()).max(1.0),
        }
    }

    /// For matrix or complex identities: `diff` is the norm of `lhs - rhs`,
    /// the sides are recorded by magnitude.
    pub fn norm(lhs_norm: f64, rhs_norm: f64, diff: f64) -> Self {
        Gap {
            lhs: lhs_norm,
            rhs: rhs_norm,
            gap: diff,
            scale: lhs_norm.max(rhs_norm).max(1.0),
        }
    }

    pub fn relative(&self) -> f64 {
        self.gap / self.scale
    }

    /// `|gap| <= tol * scale`.
    pub fn within(&self, tol: f64) -> bool {
        self.gap.abs() <= tol * self.scale
    }

    /// `gap >= -tol * scale`.
    pub fn nonnegative(&self, tol: f64) -> bool {
        self.gap >= -tol * self.scale
    }

    /// `gap <= tol * scale`.
    pub fn nonpositive(&self, tol: f64) -> bool {
        self.gap <= tol * self.scale
    }
}
