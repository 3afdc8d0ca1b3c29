//! Application of the l-fractional difference operator to finite prefixes,
//! composition of orders and the inverse operator.

use std::ops::Deref;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pochhammer::{coefficient_stream, CoefficientStream, OperatorSpec};
use crate::scalar::{Scalar, ScalarRef};

/// Finite prefix `x_0 .. x_{N-1}` of a sequence. Terms at negative indices
/// read as zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SequencePrefix<S> {
    terms: Vec<S>,
}

impl<S: Scalar> SequencePrefix<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    pub fn new(terms: Vec<S>) -> Self {
        SequencePrefix { terms }
    }

    pub fn zeros(n: usize) -> Self {
        SequencePrefix::new(vec![S::zero(); n])
    }

    /// `x_k`, or zero when `k` is negative or past the prefix.
    pub fn at(&self, k: isize) -> S {
        if k < 0 {
            return S::zero();
        }
        self.terms.get(k as usize).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> &[S] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<S> {
        self.terms
    }

    pub fn truncate(&self, n: usize) -> Self {
        SequencePrefix::new(self.terms[..n.min(self.terms.len())].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(Zero::is_zero)
    }

    /// `alpha * self + beta * other`, termwise over the shorter length.
    pub fn combine(&self, alpha: &S, other: &Self, beta: &S) -> Self {
        self.terms
            .iter()
            .zip(&other.terms)
            .map(|(x, z)| &(alpha * x) + &(beta * z))
            .collect()
    }

    pub fn scale(&self, alpha: &S) -> Self {
        self.terms.iter().map(|x| alpha * x).collect()
    }
}

impl<S> Deref for SequencePrefix<S> {
    type Target = [S];

    fn deref(&self) -> &[S] {
        &self.terms
    }
}

impl<S> FromIterator<S> for SequencePrefix<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        SequencePrefix {
            terms: iter.into_iter().collect(),
        }
    }
}

impl<S> From<Vec<S>> for SequencePrefix<S> {
    fn from(terms: Vec<S>) -> Self {
        SequencePrefix { terms }
    }
}

/// Lower-triangular convolution `y_k = sum_{i<=k} coeffs[i] x_{k-i}`, only
/// visiting the nonzero support of the stream.
pub(crate) fn convolve<S: Scalar>(stream: &CoefficientStream<S>, x: &[S]) -> Result<Vec<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let support = stream.support_len();
    let mut out = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let mut acc = S::zero();
        for i in 0..support.min(k + 1) {
            acc = &acc + &(&stream.coeffs[i] * &x[k - i]);
        }
        if !acc.is_finite() {
            return Err(Error::Overflow { index: k });
        }
        out.push(acc);
    }
    Ok(out)
}

/// `y_k = sum_{i=0}^{k} (-a)_{i,l}/i! * x_{k-i}` for every `k` in the prefix.
pub fn apply<S: Scalar>(spec: &OperatorSpec<S>, x: &SequencePrefix<S>) -> Result<SequencePrefix<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    if x.is_empty() {
        return Ok(SequencePrefix::new(Vec::new()));
    }
    let stream = coefficient_stream(spec, x.len() - 1)?;
    convolve(&stream, x).map(SequencePrefix::new)
}

/// `sum_{i=0}^{m} [(-b)_{i,l}/i!] [(-a)_{m-i,l}/(m-i)!]`, the coefficient of
/// `x_{k-m}` in the composition of the `(a, l)` and `(b, l)` operators.
pub fn convolve_orders<S: Scalar>(a: &S, b: &S, l: &S, m: usize) -> Result<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let sa = coefficient_stream(&OperatorSpec::new(a.clone(), l.clone()), m)?;
    let sb = coefficient_stream(&OperatorSpec::new(b.clone(), l.clone()), m)?;
    let mut acc = S::zero();
    for i in 0..=m {
        acc = &acc + &(&sb.coeffs[i] * &sa.coeffs[m - i]);
    }
    if !acc.is_finite() {
        return Err(Error::Overflow { index: m });
    }
    Ok(acc)
}

/// Applies `spec_b` then `spec_a`. Both must share the step `l`.
pub fn compose<S: Scalar>(
    spec_a: &OperatorSpec<S>,
    spec_b: &OperatorSpec<S>,
    x: &SequencePrefix<S>,
) -> Result<SequencePrefix<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    if spec_a.step != spec_b.step {
        return Err(Error::StepMismatch {
            left: spec_a.step.to_canonical(),
            right: spec_b.step.to_canonical(),
        });
    }
    apply(spec_a, &apply(spec_b, x)?)
}

/// Applies the inverse operator `(-a, l)`.
pub fn inverse_apply<S: Scalar>(
    spec: &OperatorSpec<S>,
    y: &SequencePrefix<S>,
) -> Result<SequencePrefix<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    apply(&spec.inverse(), y)
}
