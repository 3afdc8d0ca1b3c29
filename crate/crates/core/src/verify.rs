//! Seeded randomized identity suites, run exactly over big rationals.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::duals::{build_d, build_e, subset_sup, subset_sup_brute_force, DualTestInput};
use crate::error::{Error, Result};
use crate::operator::{apply, compose, convolve_orders, inverse_apply, SequencePrefix};
use crate::pochhammer::{factorial, l_pochhammer, OperatorSpec};
use crate::scalar::{Rational, Scalar};
use crate::spaces::norm;
use crate::transform::{
    build_c, forward_transform, reconstruct, LowerTriangularKernel, WeightSequence,
};

/// Deterministic source of small random rationals `p/q` with `|p| <= bound`
/// and `1 <= q <= bound`.
pub struct Sampler {
    rng: ChaCha8Rng,
    bound: i64,
}

impl Sampler {
    pub fn new(seed: u64, bound: i64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bound,
        }
    }

    pub fn rational(&mut self) -> Rational {
        let p = self.rng.gen_range(-self.bound..=self.bound);
        let q = self.rng.gen_range(1..=self.bound);
        Rational::from_ratio(p, q)
    }

    pub fn nonzero(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn sequence(&mut self, n: usize) -> SequencePrefix<Rational> {
        (0..n).map(|_| self.rational()).collect()
    }

    pub fn weights(&mut self, n: usize) -> WeightSequence<Rational> {
        WeightSequence::new((0..n).map(|_| self.nonzero()).collect()).expect("weights are nonzero")
    }

    pub fn lower_triangular(&mut self, n: usize) -> LowerTriangularKernel<Rational> {
        LowerTriangularKernel::from_rows(
            (0..n)
                .map(|r| (0..=r).map(|_| self.rational()).collect())
                .collect(),
        )
    }

    pub fn f64_in(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn index(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Composition,
    Convolution,
    Roundtrip,
    Matrix,
    Duals,
    A1Oracle,
    Norm,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Composition,
        Suite::Convolution,
        Suite::Roundtrip,
        Suite::Matrix,
        Suite::Duals,
        Suite::A1Oracle,
        Suite::Norm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Composition => "composition",
            Suite::Convolution => "convolution",
            Suite::Roundtrip => "roundtrip",
            Suite::Matrix => "matrix",
            Suite::Duals => "duals",
            Suite::A1Oracle => "a1-oracle",
            Suite::Norm => "norm",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
    /// Largest `m` in the convolution suite.
    pub m_max: usize,
    /// Sequence length for roundtrip cases and the bound for matrix and norm
    /// cases. Composition cases use twice this length.
    pub length: usize,
    pub suites: Vec<Suite>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            trials: 100,
            m_max: 32,
            length: 32,
            suites: Suite::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub passed: usize,
    pub failed: usize,
    /// Description of the first failing case.
    pub first_failure: Option<String>,
}

impl SuiteOutcome {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

fn tally(
    suite: Suite,
    trials: usize,
    mut case: impl FnMut(usize) -> std::result::Result<(), String>,
) -> SuiteOutcome {
    let mut out = SuiteOutcome {
        suite,
        passed: 0,
        failed: 0,
        first_failure: None,
    };
    for t in 0..trials {
        match case(t) {
            Ok(()) => out.passed += 1,
            Err(msg) => {
                out.failed += 1;
                out.first_failure.get_or_insert(format!("case {t}: {msg}"));
            }
        }
    }
    out
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Runs one suite. Each suite draws from its own stream derived from `seed`,
/// so filtering suites does not change their cases.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> SuiteOutcome {
    let mut s = Sampler::new(
        opts.seed ^ (suite as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        9,
    );
    let trials = opts.trials;
    match suite {
        Suite::Composition => tally(suite, trials, |_| {
            let (a, b, l) = (s.rational(), s.rational(), s.rational());
            let x = s.sequence(opts.length.max(1) * 2);
            let first = OperatorSpec::new(a.clone(), l.clone());
            let second = OperatorSpec::new(b.clone(), l.clone());
            let lhs = lift(compose(&first, &second, &x))?;
            let rhs = lift(apply(
                &OperatorSpec::new(a.clone() + b.clone(), l.clone()),
                &x,
            ))?;
            check(lhs == rhs, || format!("a={a} b={b} l={l}"))
        }),
        Suite::Convolution => tally(suite, trials, |_| {
            let (a, b, l) = (s.rational(), s.rational(), s.rational());
            for m in 0..=opts.m_max {
                let lhs = lift(convolve_orders(&a, &b, &l, m))?;
                let rhs = lift(l_pochhammer(&-(a.clone() + b.clone()), &l, m))?
                    / factorial::<Rational>(m);
                check(lhs == rhs, || format!("a={a} b={b} l={l} m={m}"))?;
            }
            Ok(())
        }),
        Suite::Roundtrip => tally(suite, trials, |_| {
            let spec = OperatorSpec::new(s.rational(), s.rational());
            let n = opts.length;
            let x = s.sequence(n);
            let v = s.weights(n);
            let back = lift(apply(&spec, &lift(inverse_apply(&spec, &x))?))?;
            check(back == x, || format!("apply(inverse_apply) at {spec:?}"))?;
            let y = lift(forward_transform(&spec, &v, &x))?;
            let again = lift(forward_transform(
                &spec,
                &v,
                &lift(reconstruct(&spec, &v, &y))?,
            ))?;
            check(again == y, || format!("forward(reconstruct) at {spec:?}"))
        }),
        Suite::Matrix => tally(suite, trials, |_| {
            let spec = OperatorSpec::new(s.rational(), s.rational());
            let n = s.index(1, opts.length.max(1));
            let v = s.weights(n);
            let x = s.sequence(n);
            let c = lift(build_c(&spec, &v, n))?;
            let y = lift(forward_transform(&spec, &v, &x))?;
            check(c.mul_vec(&x) == y.terms(), || {
                format!("C x != y at N={n}, {spec:?}")
            })
        }),
        Suite::Duals => tally(suite, trials, |_| {
            let spec = OperatorSpec::new(s.rational(), s.rational());
            let n = 16;
            let v = s.weights(n);
            let z = s.sequence(n);
            let y = s.sequence(n);
            let input = lift(DualTestInput::new(spec.clone(), v.clone(), z.clone(), n))?;
            let x = lift(reconstruct(&spec, &v, &y))?;
            let dy = lift(build_d(&input))?.mul_vec(&y);
            let ey = lift(build_e(&input))?.mul_vec(&y);
            let mut partial = Rational::zero();
            for k in 0..n {
                let term = &z[k] * &x[k];
                partial = &partial + &term;
                check(dy[k] == term, || format!("(Dy)_{k} != z_{k} x_{k}"))?;
                check(ey[k] == partial, || format!("(Ey)_{k} != partial sum"))?;
            }
            Ok(())
        }),
        Suite::A1Oracle => tally(suite, trials.clamp(1, 20), |_| {
            let n = s.index(1, 12);
            let d = s.lower_triangular(n);
            let fast = subset_sup(&d);
            let slow = subset_sup_brute_force(&d);
            check(fast == slow, || {
                format!("N={n}: evaluator {fast} vs enumeration {slow}")
            })
        }),
        Suite::Norm => tally(suite, trials, |_| {
            let spec = OperatorSpec::new(s.rational(), s.rational());
            let n = s.index(1, opts.length.max(1));
            let v = s.weights(n);
            let x = s.sequence(n);
            let w = s.sequence(n);
            let alpha = s.rational();
            let nx = lift(norm(&spec, &v, &x))?;
            let one = Rational::from_i64(1);
            check(nx.is_zero() == x.is_zero(), || "definiteness".into())?;
            check(
                lift(norm(&spec, &v, &SequencePrefix::zeros(n)))?.is_zero(),
                || "norm of zero".into(),
            )?;
            check(
                lift(norm(&spec, &v, &x.scale(&alpha)))? == alpha.abs() * nx.clone(),
                || "homogeneity".into(),
            )?;
            let sum = lift(norm(&spec, &v, &x.combine(&one, &w, &one)))?;
            check(sum <= nx + lift(norm(&spec, &v, &w))?, || {
                "triangle inequality".into()
            })
        }),
    }
}

pub fn run(opts: &VerifyOptions) -> Vec<SuiteOutcome> {
    opts.suites
        .iter()
        .map(|&suite| run_suite(suite, opts))
        .collect()
}
