//! The weighted cumulative transform `y_n = sum_{j<=n} v_j (Δ^(a;l) x)_j`,
//! its lower-triangular matrix `C`, and the reconstruction of `x` from `y`.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::operator::{apply, inverse_apply, SequencePrefix};
use crate::pochhammer::{coefficient_stream, OperatorSpec};
use crate::scalar::{Scalar, ScalarRef};

/// A weight sequence with every term nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence<S> {
    terms: Vec<S>,
}

impl<S: Scalar> WeightSequence<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    pub fn new(terms: Vec<S>) -> Result<Self> {
        if let Some(index) = terms.iter().position(Zero::is_zero) {
            return Err(Error::ZeroWeight { index });
        }
        Ok(WeightSequence { terms })
    }

    /// All-ones weights of length `n`.
    pub fn unit(n: usize) -> Self {
        WeightSequence {
            terms: vec![S::one(); n],
        }
    }

    pub fn terms(&self) -> &[S] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn require(&self, needed: usize) -> Result<()> {
        if self.terms.len() < needed {
            return Err(Error::LengthMismatch {
                what: "weight sequence",
                needed,
                got: self.terms.len(),
            });
        }
        Ok(())
    }
}

/// An `N x N` lower-triangular matrix; row `n` stores columns `0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangularKernel<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> LowerTriangularKernel<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    /// Builds a kernel from rows where row `n` has exactly `n + 1` entries.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        for (n, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n + 1, "row {n} must have {} entries", n + 1);
        }
        LowerTriangularKernel { rows }
    }

    /// Takes the lower triangle of a dense square matrix, discarding anything
    /// above the diagonal.
    pub fn from_dense_lower(dense: &[Vec<S>]) -> Self {
        let rows = dense
            .iter()
            .enumerate()
            .map(|(n, row)| {
                (0..=n)
                    .map(|m| row.get(m).cloned().unwrap_or_else(S::zero))
                    .collect()
            })
            .collect();
        LowerTriangularKernel { rows }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|r| {
                (0..=r)
                    .map(|c| if c == r { S::one() } else { S::zero() })
                    .collect()
            })
            .collect();
        LowerTriangularKernel { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Entry `(n, m)`; zero above the diagonal.
    pub fn get(&self, n: usize, m: usize) -> S {
        if m > n {
            S::zero()
        } else {
            self.rows[n][m].clone()
        }
    }

    pub fn row(&self, n: usize) -> &[S] {
        &self.rows[n]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    /// Leading `n x n` block.
    pub fn truncate(&self, n: usize) -> Self {
        LowerTriangularKernel {
            rows: self.rows[..n.min(self.rows.len())].to_vec(),
        }
    }

    /// `(K x)_n = sum_{m<=n} k_{nm} x_m`, over the rows covered by `x`.
    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .take(x.len())
            .map(|row| {
                row.iter()
                    .zip(x)
                    .fold(S::zero(), |acc, (k, xm)| &acc + &(k * xm))
            })
            .collect()
    }

    /// CSV dump with one `n,m,value` line per nonzero entry, row-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (n, row) in self.rows.iter().enumerate() {
            for (m, value) in row.iter().enumerate() {
                if !value.is_zero() {
                    writeln!(out, "{n},{m},{}", value.to_canonical()).unwrap();
                }
            }
        }
        out
    }
}

/// `y_n = sum_{j=0}^{n} v_j (Δ^(a;l) x)_j`, without materializing `C`.
pub fn forward_transform<S: Scalar>(
    spec: &OperatorSpec<S>,
    v: &WeightSequence<S>,
    x: &SequencePrefix<S>,
) -> Result<SequencePrefix<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    v.require(x.len())?;
    let diff = apply(spec, x)?;
    let mut acc = S::zero();
    let mut out = Vec::with_capacity(x.len());
    for (n, (d, w)) in diff.iter().zip(v.terms()).enumerate() {
        acc = &acc + &(w * d);
        if !acc.is_finite() {
            return Err(Error::Overflow { index: n });
        }
        out.push(acc.clone());
    }
    Ok(SequencePrefix::new(out))
}

/// The `n x n` matrix `C` with `c_{nm} = sum_{i=0}^{n-m} (-a)_{i,l}/i! v_{i+m}`.
pub fn build_c<S: Scalar>(
    spec: &OperatorSpec<S>,
    v: &WeightSequence<S>,
    n: usize,
) -> Result<LowerTriangularKernel<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    v.require(n)?;
    if n == 0 {
        return Ok(LowerTriangularKernel { rows: Vec::new() });
    }
    let stream = coefficient_stream(spec, n - 1)?;
    let w = v.terms();
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(n);
    for r in 0..n {
        // c_{r,m} = c_{r-1,m} + coeff[r-m] v_r
        let mut row = Vec::with_capacity(r + 1);
        for m in 0..=r {
            let prev = if m < r {
                rows[r - 1][m].clone()
            } else {
                S::zero()
            };
            let entry = &prev + &(&stream.coeffs[r - m] * &w[r]);
            if !entry.is_finite() {
                return Err(Error::Overflow { index: r });
            }
            row.push(entry);
        }
        rows.push(row);
    }
    Ok(LowerTriangularKernel { rows })
}

/// Recovers `x` from `y`: `x = Δ^(-a;l) u` with `u_n = (y_n - y_{n-1}) / v_n`
/// and `y_{-1} = 0`.
pub fn reconstruct<S: Scalar>(
    spec: &OperatorSpec<S>,
    v: &WeightSequence<S>,
    y: &SequencePrefix<S>,
) -> Result<SequencePrefix<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    v.require(y.len())?;
    let u: SequencePrefix<S> = (0..y.len())
        .map(|n| &(&y[n] - &y.at(n as isize - 1)) / &v.terms()[n])
        .collect();
    if let Some(index) = u.iter().position(|t| !t.is_finite()) {
        return Err(Error::Overflow { index });
    }
    inverse_apply(spec, &u)
}
