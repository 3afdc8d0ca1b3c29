//! The l-Pochhammer symbol `(a)_{k,l} = a (a + l) ... (a + (k-1) l)` and the
//! coefficient stream `(-a)_{i,l} / i!` of the l-fractional difference
//! operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarRef};

/// Parameters `(a, l)` of the operator: fractional order `a` and Pochhammer
/// step `l`. Any sign is allowed and either may be zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec<S> {
    pub order: S,
    pub step: S,
}

impl<S: Scalar> OperatorSpec<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    pub fn new(order: S, step: S) -> Self {
        OperatorSpec { order, step }
    }

    /// The spec of the inverse operator, `(-a, l)`.
    pub fn inverse(&self) -> Self {
        OperatorSpec::new(-self.order.clone(), self.step.clone())
    }

    /// If `a = m * l` for a nonnegative integer `m`, returns `m`: the stream
    /// then has exactly `m + 1` nonzero terms.
    pub fn finite_support(&self) -> Option<usize> {
        if self.order.is_zero() {
            return Some(0);
        }
        if self.step.is_zero() {
            return None;
        }
        let ratio = &self.order / &self.step;
        let f = ratio.to_f64();
        if !(f >= 0.0 && f.is_finite() && f < 1e9) {
            return None;
        }
        let m = f.round();
        if S::from_i64(m as i64) == ratio {
            Some(m as usize)
        } else {
            None
        }
    }
}

/// `(a)_{k,l}`: 1 for `k = 0`, otherwise the product of `a + j l` for
/// `j < k`.
pub fn l_pochhammer<S: Scalar>(a: &S, l: &S, k: usize) -> Result<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let mut acc = S::one();
    for j in 0..k {
        let factor = a + &(&S::from_usize(j) * l);
        acc = &acc * &factor;
        if !acc.is_finite() {
            return Err(Error::Overflow { index: j });
        }
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// `n!` as a scalar.
pub fn factorial<S: Scalar>(n: usize) -> S
where
    for<'a> &'a S: ScalarRef<S>,
{
    (1..=n).fold(S::one(), |acc, i| &acc * &S::from_usize(i))
}

/// The coefficients `(-a)_{i,l} / i!` for `i = 0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientStream<S> {
    pub spec: OperatorSpec<S>,
    pub coeffs: Vec<S>,
}

impl<S: Scalar> CoefficientStream<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    /// Number of leading terms up to and including the last nonzero one.
    pub fn support_len(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(0, |i| i + 1)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient `i`, zero beyond the computed range.
    pub fn get(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }
}

/// Computes `coeffs[0..=n]` by the ratio recurrence
/// `coeffs[i+1] = coeffs[i] * (-a + i l) / (i + 1)`.
pub fn coefficient_stream<S: Scalar>(
    spec: &OperatorSpec<S>,
    n: usize,
) -> Result<CoefficientStream<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let neg_a = -spec.order.clone();
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut current = S::one();
    coeffs.push(current.clone());
    for i in 0..n {
        if current.is_zero() {
            // a zero factor annihilates every later term
            coeffs.resize(n + 1, S::zero());
            break;
        }
        let factor = &neg_a + &(&S::from_usize(i) * &spec.step);
        current = &(&current * &factor) / &S::from_usize(i + 1);
        if !current.is_finite() {
            return Err(Error::Overflow { index: i + 1 });
        }
        coeffs.push(current.clone());
    }
    Ok(CoefficientStream {
        spec: spec.clone(),
        coeffs,
    })
}
