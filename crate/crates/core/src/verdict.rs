//! Finite-evidence verdicts for asymptotic conditions.
//!
//! A prefix cannot decide a limit or a supremum over an infinite index set.
//! Checks therefore sample evidence at doubling truncations `N, N/2, N/4, ...`
//! and grade it three ways. Divergence is only declared on sustained growth
//! across at least three doublings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar, ScalarRef};

/// Report schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Ratio between successive increments (or tails) below which evidence is
/// read as converging geometrically.
pub const CONTRACTION: f64 = 0.75;

/// Fewest doublings that may support a growth or contraction verdict.
pub const MIN_DOUBLINGS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    SatisfiedAtTruncation,
    ViolatedGrowth,
    Inconclusive,
}

impl Status {
    fn strength(self) -> u8 {
        match self {
            Status::ViolatedGrowth => 0,
            Status::Inconclusive => 1,
            Status::SatisfiedAtTruncation => 2,
        }
    }

    /// The weaker of two statuses: violated < inconclusive < satisfied.
    pub fn weakest(self, other: Status) -> Status {
        if other.strength() < self.strength() {
            other
        } else {
            self
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::SatisfiedAtTruncation => "satisfied-at-truncation",
            Status::ViolatedGrowth => "violated-growth",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Matrix-class conditions used by the dual characterizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    A1,
    A2,
    A3,
    A4,
    A5,
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The classical spaces `l∞`, `c₀` and `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceTag {
    #[serde(rename = "l_inf")]
    LInf,
    #[serde(rename = "c0")]
    C0,
    #[serde(rename = "c")]
    C,
}

impl SpaceTag {
    pub const ALL: [SpaceTag; 3] = [SpaceTag::LInf, SpaceTag::C0, SpaceTag::C];

    pub fn as_str(self) -> &'static str {
        match self {
            SpaceTag::LInf => "l_inf",
            SpaceTag::C0 => "c0",
            SpaceTag::C => "c",
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpaceTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l_inf" | "linf" | "l∞" => Ok(SpaceTag::LInf),
            "c0" | "c_0" | "c₀" => Ok(SpaceTag::C0),
            "c" => Ok(SpaceTag::C),
            other => Err(Error::Parse(format!(
                "unknown space `{other}` (expected l_inf, c0 or c)"
            ))),
        }
    }
}

/// Tolerances shared by all checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Tail (or increment) magnitude treated as zero. Zero means exact
    /// equality.
    pub tail: f64,
    /// Evidence above this value, while still growing, counts as divergence.
    pub divergence: f64,
}

impl Tolerances {
    pub fn for_mode(mode: Mode) -> Self {
        Tolerances {
            tail: match mode {
                Mode::Exact => 0.0,
                Mode::Float => 1e-10,
            },
            divergence: 1e6,
        }
    }
}

/// Truncation levels `N >> j` in increasing order, without zero.
pub fn doubling_levels(n: usize) -> Vec<usize> {
    let mut levels: Vec<usize> = (0..usize::BITS)
        .map(|j| n >> j)
        .take_while(|&l| l > 0)
        .collect();
    levels.reverse();
    levels
}

/// First row of the tail window `[L/2, L)` at truncation level `L`.
pub fn window_start(level: usize) -> usize {
    level / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Trend {
    Settled,
    Diverging,
    Unsettled,
}

fn negligible<S: Scalar>(v: &S, tol: f64) -> bool
where
    for<'a> &'a S: ScalarRef<S>,
{
    v.is_zero() || (tol > 0.0 && v.abs().to_f64() <= tol)
}

/// `next` is at most `CONTRACTION` times `prev` (or negligible).
fn contracts<S: Scalar>(prev: &S, next: &S, tol: f64) -> bool
where
    for<'a> &'a S: ScalarRef<S>,
{
    if negligible(next, tol) {
        return true;
    }
    if negligible(prev, tol) || *next < S::zero() {
        return false;
    }
    (next / prev).to_f64() <= CONTRACTION
}

/// Grades nondecreasing evidence that must stay bounded (a supremum).
pub(crate) fn bounded_trend<S: Scalar>(values: &[S], tol: &Tolerances) -> Trend
where
    for<'a> &'a S: ScalarRef<S>,
{
    if values.iter().all(|v| negligible(v, tol.tail)) {
        return Trend::Settled;
    }
    if values.len() < MIN_DOUBLINGS + 1 {
        return Trend::Unsettled;
    }
    let incs: Vec<S> = values.windows(2).map(|w| &w[1] - &w[0]).collect();
    let last3 = &incs[incs.len() - 3..];
    let growing = last3
        .iter()
        .all(|d| *d > S::zero() && !negligible(d, tol.tail));
    let last = values.last().unwrap().to_f64();
    if growing && (last > tol.divergence || (last3[1] >= last3[0] && last3[2] >= last3[1])) {
        return Trend::Diverging;
    }
    if negligible(&last3[1], tol.tail) && negligible(&last3[2], tol.tail) {
        return Trend::Settled;
    }
    if contracts(&last3[0], &last3[1], tol.tail) && contracts(&last3[1], &last3[2], tol.tail) {
        return Trend::Settled;
    }
    Trend::Unsettled
}

/// Grades nonnegative tail evidence that must tend to zero.
pub(crate) fn vanishing_trend<S: Scalar>(
    tails: &[S],
    tol: &Tolerances,
    allow_violation: bool,
) -> Trend
where
    for<'a> &'a S: ScalarRef<S>,
{
    if tails.iter().all(|v| negligible(v, tol.tail)) {
        return Trend::Settled;
    }
    if tails.len() < MIN_DOUBLINGS + 1 {
        return Trend::Unsettled;
    }
    let last3 = &tails[tails.len() - 3..];
    if negligible(&last3[2], tol.tail) {
        return Trend::Settled;
    }
    if contracts(&last3[0], &last3[1], tol.tail) && contracts(&last3[1], &last3[2], tol.tail) {
        return Trend::Settled;
    }
    if allow_violation {
        let positive = last3.iter().all(|t| !negligible(t, tol.tail));
        let non_decaying = last3[1] >= last3[0] && last3[2] >= last3[1];
        if positive && (non_decaying || last3[2].to_f64() > tol.divergence) {
            return Trend::Diverging;
        }
    }
    Trend::Unsettled
}

impl From<Trend> for Status {
    fn from(t: Trend) -> Status {
        match t {
            Trend::Settled => Status::SatisfiedAtTruncation,
            Trend::Diverging => Status::ViolatedGrowth,
            Trend::Unsettled => Status::Inconclusive,
        }
    }
}

/// Outcome of one condition at finite truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionVerdict<S> {
    pub condition: ConditionId,
    pub status: Status,
    /// `(truncation, value)` pairs in increasing truncation.
    pub evidence: Vec<(usize, S)>,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl<S: Scalar> ConditionVerdict<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    pub fn to_report(&self) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            condition: self.condition.to_string(),
            status: self.status.as_str().to_string(),
            evidence: evidence_json(&self.evidence),
            tolerance: self.tolerance,
            mode: S::MODE,
            norm_estimate: None,
            note: self.note.clone(),
        }
    }
}

pub(crate) fn evidence_json<S: Scalar>(evidence: &[(usize, S)]) -> Vec<(usize, serde_json::Value)>
where
    for<'a> &'a S: ScalarRef<S>,
{
    evidence.iter().map(|(n, v)| (*n, v.to_json())).collect()
}

/// Structured report shared by condition checks and space classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub condition: String,
    pub status: String,
    pub evidence: Vec<(usize, serde_json::Value)>,
    pub tolerance: f64,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_estimate: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}
