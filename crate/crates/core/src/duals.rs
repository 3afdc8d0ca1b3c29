//! Dual-space machinery: the matrices `D` and `E` obtained by substituting
//! the reconstruction of `x` from `y`, and finite-truncation checks of the
//! matrix-class conditions A1–A5 that characterize the α-, β- and γ-duals.
//!
//! With `x = reconstruct(y)`:
//!
//! * `(D y)_n = z_n x_n`, so `z` is in the α-dual iff `D ∈ (μ : l₁)` (A1);
//! * `(E y)_n = sum_{r<=n} z_r x_r`, so β- and γ-duals reduce to `E ∈ (μ : c)`
//!   (A2 with A3, A4 or A4 and A5) and `E ∈ (μ : l∞)` (A4).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SequencePrefix;
use crate::pochhammer::{coefficient_stream, OperatorSpec};
use crate::scalar::{Mode, Scalar, ScalarRef};
use crate::transform::{LowerTriangularKernel, WeightSequence};
use crate::verdict::{
    bounded_trend, doubling_levels, vanishing_trend, window_start, ConditionId, ConditionVerdict,
    Report, SpaceTag, Status, Tolerances, SCHEMA_VERSION,
};

/// Candidate dual sequence `z` together with the space parameters, checked at
/// truncation `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualTestInput<S> {
    pub spec: OperatorSpec<S>,
    pub v: WeightSequence<S>,
    pub z: SequencePrefix<S>,
    pub n: usize,
}

impl<S: Scalar> DualTestInput<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    pub fn new(
        spec: OperatorSpec<S>,
        v: WeightSequence<S>,
        z: SequencePrefix<S>,
        n: usize,
    ) -> Result<Self> {
        v.require(n)?;
        if z.len() < n {
            return Err(Error::LengthMismatch {
                what: "dual candidate z",
                needed: n,
                got: z.len(),
            });
        }
        Ok(DualTestInput { spec, v, z, n })
    }
}

fn reciprocals<S: Scalar>(v: &WeightSequence<S>, n: usize) -> Result<Vec<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let one = S::one();
    v.terms()[..n]
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let r = &one / w;
            if r.is_finite() {
                Ok(r)
            } else {
                Err(Error::Overflow { index: k })
            }
        })
        .collect()
}

/// `d_{nn} = z_n / v_n` and, for `k < n`,
/// `d_{nk} = z_n ((a)_{n-k,l} / ((n-k)! v_k) - (a)_{n-k-1,l} / ((n-k-1)! v_{k+1}))`.
pub fn build_d<S: Scalar>(input: &DualTestInput<S>) -> Result<LowerTriangularKernel<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let n = input.n;
    if n == 0 {
        return Ok(LowerTriangularKernel::from_rows(Vec::new()));
    }
    // (a)_{i,l} / i! is the stream of the inverse operator
    let c = coefficient_stream(&input.spec.inverse(), n)?.coeffs;
    let inv = reciprocals(&input.v, n)?;
    let z = input.z.terms();
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let mut row = Vec::with_capacity(r + 1);
        for k in 0..r {
            let bracket = &(&c[r - k] * &inv[k]) - &(&c[r - k - 1] * &inv[k + 1]);
            row.push(&z[r] * &bracket);
        }
        row.push(&z[r] * &inv[r]);
        if row.iter().any(|e| !e.is_finite()) {
            return Err(Error::Overflow { index: r });
        }
        rows.push(row);
    }
    Ok(LowerTriangularKernel::from_rows(rows))
}

/// `e_{nn} = z_n / v_n` and, for `k < n`,
/// `e_{nk} = (1/v_k) sum_{i<=n-k} (a)_{i,l}/i! z_{k+i} - (1/v_{k+1}) sum_{i<=n-k-1} (a)_{i,l}/i! z_{k+i+1}`.
///
/// Rows are built incrementally: with `s_k(n) = sum_{i<=n-k} c_i z_{k+i}`,
/// `e_{nk} = s_k(n)/v_k - s_{k+1}(n)/v_{k+1}` and `s_k(n) = s_k(n-1) + c_{n-k} z_n`.
pub fn build_e<S: Scalar>(input: &DualTestInput<S>) -> Result<LowerTriangularKernel<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let n = input.n;
    if n == 0 {
        return Ok(LowerTriangularKernel::from_rows(Vec::new()));
    }
    let c = coefficient_stream(&input.spec.inverse(), n)?.coeffs;
    let inv = reciprocals(&input.v, n)?;
    let z = input.z.terms();
    let mut partial: Vec<S> = Vec::with_capacity(n + 1);
    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        for (k, s) in partial.iter_mut().enumerate() {
            *s = &*s + &(&c[r - k] * &z[r]);
        }
        partial.push(z[r].clone());
        let mut row = Vec::with_capacity(r + 1);
        for k in 0..r {
            row.push(&(&partial[k] * &inv[k]) - &(&partial[k + 1] * &inv[k + 1]));
        }
        row.push(&partial[r] * &inv[r]);
        if row.iter().any(|e| !e.is_finite()) {
            return Err(Error::Overflow { index: r });
        }
        rows.push(row);
    }
    Ok(LowerTriangularKernel::from_rows(rows))
}

/// Options shared by the condition checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub tolerances: Tolerances,
    /// Largest truncation for which A1 is evaluated exactly.
    pub exact_subset_limit: usize,
    /// Random restarts of the A1 lower-bound search past the exact limit.
    pub search_starts: usize,
    pub seed: u64,
}

impl CheckOptions {
    pub fn for_mode(mode: Mode) -> Self {
        CheckOptions {
            tolerances: Tolerances::for_mode(mode),
            exact_subset_limit: 20,
            search_starts: 32,
            seed: 0,
        }
    }
}

/// `sup_K sum_n |sum_{k in K} d_{nk}|` over all column subsets `K` of the
/// truncated kernel, computed exactly.
///
/// Uses the dual form `max_s sum_k max(0, sum_n s_n d_{nk})` over row sign
/// vectors `s`, enumerated in Gray-code order. Since `-s` is scored together
/// with `s`, only `2^(N-1)` vectors are visited.
pub fn subset_sup<S: Scalar>(kernel: &LowerTriangularKernel<S>) -> S
where
    for<'a> &'a S: ScalarRef<S>,
{
    let n = kernel.dim();
    if n == 0 {
        return S::zero();
    }
    assert!(n < 64, "exact subset evaluation needs fewer than 64 rows");
    let mut signs = vec![true; n];
    let mut cols: Vec<S> = (0..n)
        .map(|k| (k..n).fold(S::zero(), |acc, r| &acc + kernel.row(r).get(k).unwrap()))
        .collect();
    let score = |cols: &[S]| {
        let mut pos = S::zero();
        let mut neg = S::zero();
        for c in cols {
            if *c > S::zero() {
                pos = &pos + c;
            } else {
                neg = &neg - c;
            }
        }
        S::max_of(pos, neg)
    };
    let doubled: Vec<Vec<(usize, S)>> = kernel
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .map(|(k, e)| (k, e + e))
                .collect()
        })
        .collect();
    let mut best = score(&cols);
    for t in 1u64..(1u64 << (n - 1)) {
        let r = t.trailing_zeros() as usize + 1;
        for (k, twice) in &doubled[r] {
            let k = *k;
            cols[k] = if signs[r] {
                &cols[k] - twice
            } else {
                &cols[k] + twice
            };
        }
        signs[r] = !signs[r];
        let value = score(&cols);
        if value > best {
            best = value;
        }
    }
    best
}

/// Reference evaluation of `sup_K sum_n |sum_{k in K} d_{nk}|` by visiting
/// every column subset directly. Exponential; meant for cross-checking
/// [`subset_sup`] on small kernels.
pub fn subset_sup_brute_force<S: Scalar>(kernel: &LowerTriangularKernel<S>) -> S
where
    for<'a> &'a S: ScalarRef<S>,
{
    let n = kernel.dim();
    assert!(n < 32, "brute force is limited to fewer than 32 columns");
    let mut best = S::zero();
    for mask in 0u64..(1u64 << n) {
        let mut total = S::zero();
        for r in 0..n {
            let mut row_sum = S::zero();
            for k in 0..=r {
                if mask >> k & 1 == 1 {
                    row_sum = &row_sum + &kernel.get(r, k);
                }
            }
            total = &total + &row_sum.abs();
        }
        if total > best {
            best = total;
        }
    }
    best
}

/// Lower bound on the subset supremum by alternating maximization from
/// seeded random sign vectors, plus the trivial upper bound `sum |d_{nk}|`.
pub fn subset_sup_bounds<S: Scalar>(
    kernel: &LowerTriangularKernel<S>,
    starts: usize,
    seed: u64,
) -> (S, S)
where
    for<'a> &'a S: ScalarRef<S>,
{
    let n = kernel.dim();
    let upper = kernel
        .rows()
        .iter()
        .flatten()
        .fold(S::zero(), |acc, e| &acc + &e.abs());
    if n == 0 {
        return (S::zero(), upper);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = S::zero();
    for start in 0..starts.max(1) {
        let mut signs: Vec<bool> = if start == 0 {
            vec![true; n]
        } else {
            (0..n).map(|_| rng.gen()).collect()
        };
        let mut value = S::zero();
        for _ in 0..4 * n + 8 {
            // best subset for fixed signs: columns with positive signed sum
            let chosen: Vec<bool> = (0..n)
                .map(|k| {
                    let col = (k..n).fold(S::zero(), |acc, r| {
                        let e = kernel.get(r, k);
                        if signs[r] {
                            &acc + &e
                        } else {
                            &acc - &e
                        }
                    });
                    col > S::zero()
                })
                .collect();
            // best signs for fixed subset, scoring it
            let mut total = S::zero();
            let mut next = Vec::with_capacity(n);
            for r in 0..n {
                let row_sum = kernel
                    .row(r)
                    .iter()
                    .zip(&chosen)
                    .filter(|(_, &c)| c)
                    .fold(S::zero(), |acc, (e, _)| &acc + e);
                next.push(row_sum >= S::zero());
                total = &total + &row_sum.abs();
            }
            let improved = total > value;
            value = S::max_of(value, total);
            if !improved || next == signs {
                break;
            }
            signs = next;
        }
        best = S::max_of(best, value);
    }
    (best, upper)
}

/// A1 evaluated on an explicit kernel (normally `D`).
pub fn check_a1_kernel<S: Scalar>(
    kernel: &LowerTriangularKernel<S>,
    opts: &CheckOptions,
) -> ConditionVerdict<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let mut evidence: Vec<(usize, S)> = Vec::new();
    let mut bounded_from: Option<(usize, S)> = None;
    let mut running = S::zero();
    for level in doubling_levels(kernel.dim()) {
        let block = kernel.truncate(level);
        let value = if level <= opts.exact_subset_limit {
            subset_sup(&block)
        } else {
            let (lower, upper) =
                subset_sup_bounds(&block, opts.search_starts, opts.seed ^ level as u64);
            bounded_from = Some((level, upper));
            lower
        };
        // a subset optimal for a smaller block stays admissible for a larger one
        running = S::max_of(running, value);
        evidence.push((level, running.clone()));
    }
    let values: Vec<S> = evidence.iter().map(|(_, v)| v.clone()).collect();
    let status = bounded_trend(&values, &opts.tolerances).into();
    let mut note = String::from("F read as all finite subsets of the column index set");
    if let Some((level, upper)) = bounded_from {
        note.push_str(&format!(
            "; evidence from N = {level} upward is a sampled lower bound (trivial upper bound {})",
            upper.to_canonical()
        ));
    }
    ConditionVerdict {
        condition: ConditionId::A1,
        status,
        evidence,
        tolerance: opts.tolerances.tail,
        note: Some(note),
    }
}

fn oscillation<S: Scalar>(values: impl IntoIterator<Item = S>) -> S
where
    for<'a> &'a S: ScalarRef<S>,
{
    let mut it = values.into_iter();
    let Some(first) = it.next() else {
        return S::zero();
    };
    let (lo, hi) = it.fold((first.clone(), first), |(lo, hi), v| {
        (S::min_of(lo, v.clone()), S::max_of(hi, v))
    });
    &hi - &lo
}

/// A2: every column limit `lim_n e_{nk}` exists. Evidence at level `L` is the
/// largest oscillation over rows `[L/2, L)` of a column `k < L/2`.
pub fn check_a2_kernel<S: Scalar>(
    kernel: &LowerTriangularKernel<S>,
    opts: &CheckOptions,
) -> ConditionVerdict<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let evidence: Vec<(usize, S)> = doubling_levels(kernel.dim())
        .into_iter()
        .map(|level| {
            let w = window_start(level);
            let worst = (0..w)
                .map(|k| oscillation((w..level).map(|r| kernel.get(r, k))))
                .fold(S::zero(), S::max_of);
            (level, worst)
        })
        .collect();
    finish(ConditionId::A2, evidence, opts, |v, t| {
        vanishing_trend(v, t, false)
    })
}

/// A3: `lim_n sum_k |e_{nk}| = sum_k |lim_n e_{nk}|`. Evidence at level `L`
/// is the absolute mass of row `L-1` lying in columns past `L/2`, i.e. the
/// gap between the row sum and the estimated column limits.
pub fn check_a3_kernel<S: Scalar>(
    kernel: &LowerTriangularKernel<S>,
    opts: &CheckOptions,
) -> ConditionVerdict<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let evidence: Vec<(usize, S)> = doubling_levels(kernel.dim())
        .into_iter()
        .map(|level| {
            let row = kernel.row(level - 1);
            let w = window_start(level);
            let escaped = row[(w + 1).min(row.len())..]
                .iter()
                .fold(S::zero(), |acc, e| &acc + &e.abs());
            (level, escaped)
        })
        .collect();
    finish(ConditionId::A3, evidence, opts, |v, t| {
        vanishing_trend(v, t, true)
    })
}

/// A4: `sup_n sum_k |e_{nk}| < ∞`. Evidence is the running supremum of the
/// row absolute sums.
pub fn check_a4_kernel<S: Scalar>(
    kernel: &LowerTriangularKernel<S>,
    opts: &CheckOptions,
) -> ConditionVerdict<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let row_abs: Vec<S> = kernel
        .rows()
        .iter()
        .map(|row| row.iter().fold(S::zero(), |acc, e| &acc + &e.abs()))
        .collect();
    let evidence: Vec<(usize, S)> = doubling_levels(kernel.dim())
        .into_iter()
        .map(|level| {
            (
                level,
                row_abs[..level].iter().cloned().fold(S::zero(), S::max_of),
            )
        })
        .collect();
    finish(ConditionId::A4, evidence, opts, bounded_trend)
}

/// A5: `lim_n sum_k e_{nk}` exists. Evidence at level `L` is the oscillation
/// of the row sums over rows `[L/2, L)`.
pub fn check_a5_kernel<S: Scalar>(
    kernel: &LowerTriangularKernel<S>,
    opts: &CheckOptions,
) -> ConditionVerdict<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let row_sums: Vec<S> = kernel
        .rows()
        .iter()
        .map(|row| row.iter().fold(S::zero(), |acc, e| &acc + e))
        .collect();
    let evidence: Vec<(usize, S)> = doubling_levels(kernel.dim())
        .into_iter()
        .map(|level| {
            (
                level,
                oscillation(row_sums[window_start(level)..level].iter().cloned()),
            )
        })
        .collect();
    finish(ConditionId::A5, evidence, opts, |v, t| {
        vanishing_trend(v, t, true)
    })
}

fn finish<S: Scalar>(
    condition: ConditionId,
    evidence: Vec<(usize, S)>,
    opts: &CheckOptions,
    grade: impl Fn(&[S], &Tolerances) -> crate::verdict::Trend,
) -> ConditionVerdict<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let values: Vec<S> = evidence.iter().map(|(_, v)| v.clone()).collect();
    ConditionVerdict {
        condition,
        status: grade(&values, &opts.tolerances).into(),
        evidence,
        tolerance: opts.tolerances.tail,
        note: None,
    }
}

pub fn check_a1<S: Scalar>(
    input: &DualTestInput<S>,
    opts: &CheckOptions,
) -> Result<ConditionVerdict<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    Ok(check_a1_kernel(&build_d(input)?, opts))
}

pub fn check_a2<S: Scalar>(
    input: &DualTestInput<S>,
    opts: &CheckOptions,
) -> Result<ConditionVerdict<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    Ok(check_a2_kernel(&build_e(input)?, opts))
}

pub fn check_a3<S: Scalar>(
    input: &DualTestInput<S>,
    opts: &CheckOptions,
) -> Result<ConditionVerdict<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    Ok(check_a3_kernel(&build_e(input)?, opts))
}

pub fn check_a4<S: Scalar>(
    input: &DualTestInput<S>,
    opts: &CheckOptions,
) -> Result<ConditionVerdict<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    Ok(check_a4_kernel(&build_e(input)?, opts))
}

pub fn check_a5<S: Scalar>(
    input: &DualTestInput<S>,
    opts: &CheckOptions,
) -> Result<ConditionVerdict<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    Ok(check_a5_kernel(&build_e(input)?, opts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualKind {
    Alpha,
    Beta,
    Gamma,
}

impl DualKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DualKind::Alpha => "alpha",
            DualKind::Beta => "beta",
            DualKind::Gamma => "gamma",
        }
    }
}

impl fmt::Display for DualKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DualKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" | "α" => Ok(DualKind::Alpha),
            "beta" | "β" => Ok(DualKind::Beta),
            "gamma" | "γ" => Ok(DualKind::Gamma),
            other => Err(Error::Parse(format!(
                "unknown dual `{other}` (expected alpha, beta or gamma)"
            ))),
        }
    }
}

/// Conditions whose intersection is the requested dual.
pub fn dual_conditions(space: SpaceTag, dual: DualKind) -> &'static [ConditionId] {
    use ConditionId::*;
    match (dual, space) {
        (DualKind::Alpha, _) => &[A1],
        (DualKind::Beta, SpaceTag::LInf) => &[A2, A3],
        (DualKind::Beta, SpaceTag::C0) => &[A2, A4],
        (DualKind::Beta, SpaceTag::C) => &[A2, A4, A5],
        (DualKind::Gamma, _) => &[A4],
    }
}

/// Composite verdict for membership of `z` in a dual space.
#[derive(Clone, Debug, PartialEq)]
pub struct DualVerdict<S> {
    pub space: SpaceTag,
    pub dual: DualKind,
    /// Weakest member status.
    pub status: Status,
    pub members: Vec<ConditionVerdict<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualReport {
    pub schema: u32,
    pub space: SpaceTag,
    pub dual: DualKind,
    pub status: String,
    pub mode: Mode,
    pub conditions: Vec<Report>,
}

impl<S: Scalar> DualVerdict<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    pub fn to_report(&self) -> DualReport {
        DualReport {
            schema: SCHEMA_VERSION,
            space: self.space,
            dual: self.dual,
            status: self.status.as_str().to_string(),
            mode: S::MODE,
            conditions: self
                .members
                .iter()
                .map(ConditionVerdict::to_report)
                .collect(),
        }
    }
}

/// Evaluates the conditions characterizing the `dual` of `space` and combines
/// them; A1 runs on `D`, the others on `E`.
pub fn dual_membership<S: Scalar>(
    input: &DualTestInput<S>,
    space: SpaceTag,
    dual: DualKind,
    opts: &CheckOptions,
) -> Result<DualVerdict<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let conditions = dual_conditions(space, dual);
    let d = if conditions.contains(&ConditionId::A1) {
        Some(build_d(input)?)
    } else {
        None
    };
    let e = if conditions.iter().any(|c| *c != ConditionId::A1) {
        Some(build_e(input)?)
    } else {
        None
    };
    let members: Vec<ConditionVerdict<S>> = conditions
        .iter()
        .map(|c| match c {
            ConditionId::A1 => check_a1_kernel(d.as_ref().unwrap(), opts),
            ConditionId::A2 => check_a2_kernel(e.as_ref().unwrap(), opts),
            ConditionId::A3 => check_a3_kernel(e.as_ref().unwrap(), opts),
            ConditionId::A4 => check_a4_kernel(e.as_ref().unwrap(), opts),
            ConditionId::A5 => check_a5_kernel(e.as_ref().unwrap(), opts),
        })
        .collect();
    let status = members
        .iter()
        .fold(Status::SatisfiedAtTruncation, |acc, m| {
            acc.weakest(m.status)
        });
    Ok(DualVerdict {
        space,
        dual,
        status,
        members,
    })
}
