//! Generic real scalar used by the flow and target math.
//!
//! Density and transform code is written once over [`Scalar`] and evaluated
//! either with plain `f64` (sampling, estimation) or with tape variables
//! ([`crate::autodiff::Var`]) when gradients are needed. Branch decisions
//! (bin search, max picking) read the primal value through [`Scalar::val`];
//! the derivative follows the branch taken.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// Primal value.
    fn val(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn tanh(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn recip(self) -> Self;
    /// `self * b + c` as a single fused operation.
    fn mul_add(self, b: Self, c: Self) -> Self;
    /// Pick the larger operand by primal value.
    fn max_val(self, other: Self) -> Self;
}

impl Scalar for f64 {
    fn val(self) -> f64 {
        self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn mul_add(self, b: Self, c: Self) -> Self {
        f64::mul_add(self, b, c)
    }
    fn max_val(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

/// `softplus(x) = ln(1 + e^x)`, switching to the identity for large inputs
/// to avoid overflow.
pub fn softplus<S: Scalar>(x: S) -> S {
    if x.val() > 30.0 {
        x
    } else {
        (x.exp() + 1.0).ln()
    }
}

/// Numerically stable `ln(sum_i exp(x_i))` with a single max shift.
pub fn log_sum_exp<S: Scalar>(xs: &[S]) -> S {
    debug_assert!(!xs.is_empty());
    let mut m = xs[0];
    for &x in &xs[1..] {
        m = m.max_val(x);
    }
    let mut sum = (xs[0] - m).exp();
    for &x in &xs[1..] {
        sum = sum + (x - m).exp();
    }
    m + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_handles_large_shifts() {
        let xs = [-1000.0, -1001.0, -999.0];
        let got: f64 = log_sum_exp(&xs);
        let want = -999.0 + (1.0f64 + (-1.0f64).exp() + (-2.0f64).exp()).ln();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn softplus_matches_definition_and_saturates() {
        assert!((softplus(0.0f64) - 2.0f64.ln()).abs() < 1e-15);
        assert_eq!(softplus(100.0f64), 100.0);
    }
}
