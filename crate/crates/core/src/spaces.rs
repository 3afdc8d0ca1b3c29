//! The norm `‖x‖ = sup_n |y_n|` of the weighted difference space, where
//! `y = forward_transform(x)`, and finite-evidence membership diagnostics for
//! `l∞`, `c` and `c₀`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SequencePrefix;
use crate::pochhammer::OperatorSpec;
use crate::scalar::{Mode, Scalar, ScalarRef};
use crate::transform::{forward_transform, WeightSequence};
use crate::verdict::{
    bounded_trend, doubling_levels, evidence_json, vanishing_trend, window_start, SpaceTag, Status,
    Tolerances, SCHEMA_VERSION,
};

/// Truncated norm: `max_{n<N} |y_n|`.
pub fn norm<S: Scalar>(
    spec: &OperatorSpec<S>,
    v: &WeightSequence<S>,
    x: &SequencePrefix<S>,
) -> Result<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    if x.is_empty() {
        return Err(Error::LengthMismatch {
            what: "sequence x",
            needed: 1,
            got: 0,
        });
    }
    let y = forward_transform(spec, v, x)?;
    Ok(y.iter().fold(S::zero(), |acc, t| S::max_of(acc, t.abs())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport<S> {
    pub space: SpaceTag,
    pub status: Status,
    /// Norm over the whole prefix.
    pub norm_estimate: S,
    /// `(N, max_{n<N} |y_n|)` at each doubling level.
    pub trend: Vec<(usize, S)>,
    /// Space-specific evidence: the running sup for `l∞`, the oscillation of
    /// `y` over `[N/2, N)` for `c`, and `max |y_n|` over `[N/2, N)` for `c₀`.
    pub evidence: Vec<(usize, S)>,
    pub tolerance: f64,
    pub note: Option<String>,
}

/// Membership statuses read "consistent" rather than "satisfied".
pub fn membership_status_str(status: Status) -> &'static str {
    match status {
        Status::SatisfiedAtTruncation => "consistent-at-truncation",
        other => other.as_str(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipJson {
    pub schema: u32,
    pub space: SpaceTag,
    pub status: String,
    pub evidence: Vec<(usize, serde_json::Value)>,
    pub trend: Vec<(usize, serde_json::Value)>,
    pub tolerance: f64,
    pub mode: Mode,
    pub norm_estimate: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl<S: Scalar> MembershipReport<S>
where
    for<'a> &'a S: ScalarRef<S>,
{
    pub fn to_report(&self) -> MembershipJson {
        MembershipJson {
            schema: SCHEMA_VERSION,
            space: self.space,
            status: membership_status_str(self.status).to_string(),
            evidence: evidence_json(&self.evidence),
            trend: evidence_json(&self.trend),
            tolerance: self.tolerance,
            mode: S::MODE,
            norm_estimate: self.norm_estimate.to_json(),
            note: self.note.clone(),
        }
    }
}

struct Evidence<S> {
    sup: Vec<(usize, S)>,
    oscillation: Vec<(usize, S)>,
    tail: Vec<(usize, S)>,
}

fn values<S: Clone>(e: &[(usize, S)]) -> Vec<S> {
    e.iter().map(|(_, v)| v.clone()).collect()
}

/// Classifies `x` against `space` from the transform `y` at doubling
/// truncations. All three spaces are graded on the same evidence and the
/// inclusions `c₀ ⊂ c ⊂ l∞` are imposed on the results.
pub fn classify<S: Scalar>(
    spec: &OperatorSpec<S>,
    v: &WeightSequence<S>,
    x: &SequencePrefix<S>,
    space: SpaceTag,
    tol: &Tolerances,
) -> Result<MembershipReport<S>>
where
    for<'a> &'a S: ScalarRef<S>,
{
    let norm_estimate = norm(spec, v, x)?;
    let y = forward_transform(spec, v, x)?;
    let mut ev = Evidence {
        sup: Vec::new(),
        oscillation: Vec::new(),
        tail: Vec::new(),
    };
    let mut running = S::zero();
    let mut seen = 0;
    for level in doubling_levels(y.len()) {
        for t in &y[seen..level] {
            running = S::max_of(running, t.abs());
        }
        seen = level;
        let window = &y[window_start(level)..level];
        let lo = window.iter().cloned().fold(window[0].clone(), S::min_of);
        let hi = window.iter().cloned().fold(window[0].clone(), S::max_of);
        ev.sup.push((level, running.clone()));
        ev.oscillation.push((level, &hi - &lo));
        ev.tail.push((
            level,
            window
                .iter()
                .fold(S::zero(), |acc, t| S::max_of(acc, t.abs())),
        ));
    }

    let raw_c0: Status = vanishing_trend(&values(&ev.tail), tol, true).into();
    let raw_c: Status = vanishing_trend(&values(&ev.oscillation), tol, true).into();
    let raw_linf: Status = bounded_trend(&values(&ev.sup), tol).into();
    let c0 = raw_c0;
    let c = if c0 == Status::SatisfiedAtTruncation {
        c0
    } else {
        raw_c
    };
    let linf = if c == Status::SatisfiedAtTruncation {
        c
    } else {
        raw_linf
    };

    let (status, raw, evidence) = match space {
        SpaceTag::C0 => (c0, raw_c0, ev.tail),
        SpaceTag::C => (c, raw_c, ev.oscillation),
        SpaceTag::LInf => (linf, raw_linf, ev.sup.clone()),
    };
    let note = (status != raw).then(|| {
        format!(
            "own evidence graded {}; implied by membership in a smaller space",
            membership_status_str(raw)
        )
    });
    Ok(MembershipReport {
        space,
        status,
        norm_estimate,
        trend: ev.sup,
        evidence,
        tolerance: tol.tail,
        note,
    })
}
