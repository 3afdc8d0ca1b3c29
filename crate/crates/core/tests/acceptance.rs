//! Acceptance gate. Every criterion runs, prints one `criterion N` line with
//! its outcome, measured time and budget, and the test fails if any failed.

use std::time::{Duration, Instant};

use lfd_core::verify::Sampler;
use lfd_core::{
    apply, build_c, build_d, build_e, check_a1_kernel, classify, coefficient_stream, compose,
    convolve_orders, factorial, forward_transform, inverse_apply, l_pochhammer, norm, reconstruct,
    subset_sup, CheckOptions, DualTestInput, LowerTriangularKernel, Mode, OperatorSpec, Rational,
    Scalar, SequencePrefix, SpaceTag, Status, Tolerances, WeightSequence,
};
use num_traits::Zero;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn report(
    id: u32,
    name: &str,
    start: Instant,
    budget: Duration,
    failures: &[String],
    detail: &str,
) -> bool {
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < budget;
    println!(
        "criterion {id} [{name}]: {} ({detail}; {:.3}s of {:.0}s budget)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    for f in failures.iter().take(5) {
        println!("    {f}");
    }
    if failures.len() > 5 {
        println!("    ... {} more", failures.len() - 5);
    }
    ok
}

fn stream(a: Rational, l: Rational, n: usize) -> Vec<Rational> {
    coefficient_stream(&OperatorSpec::new(a, l), n)
        .unwrap()
        .coeffs
}

fn criterion_1_coefficient_reproduction() -> bool {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut expect = |label: &str, got: Vec<Rational>, want: Vec<Rational>| {
        if got != want {
            failures.push(format!("{label}: got {got:?}"));
        }
    };
    expect(
        "(1/2, 1/4)",
        stream(q(1, 2), q(1, 4), 5),
        vec![q(1, 1), q(-1, 2), q(1, 16), q(0, 1), q(0, 1), q(0, 1)],
    );
    expect(
        "(-1/2, 1/4)",
        stream(q(-1, 2), q(1, 4), 4),
        vec![q(1, 1), q(1, 2), q(3, 16), q(1, 16), q(5, 256)],
    );
    for a in [q(1, 3), q(-5, 2), q(7, 1)] {
        let mut want = vec![q(1, 1), -a.clone()];
        want.extend(std::iter::repeat_n(q(0, 1), 4));
        expect("(a, a)", stream(a.clone(), a, 5), want);
    }
    let l = q(3, 7);
    expect(
        "(2l, l), l = 3/7",
        stream(q(6, 7), l.clone(), 5),
        vec![q(1, 1), q(-6, 7), l.clone() * l, q(0, 1), q(0, 1), q(0, 1)],
    );
    expect(
        "(1, 1)",
        stream(q(1, 1), q(1, 1), 4),
        vec![q(1, 1), q(-1, 1), q(0, 1), q(0, 1), q(0, 1)],
    );
    report(
        1,
        "coefficient streams",
        start,
        Duration::from_secs(1),
        &failures,
        "5 families, exact",
    )
}

fn criterion_2_composition_identity() -> bool {
    let start = Instant::now();
    let mut s = Sampler::new(2, 9);
    let mut failures = Vec::new();
    for t in 0..100 {
        let (a, b, l) = (s.rational(), s.rational(), s.rational());
        let x = s.sequence(64);
        let lhs = compose(
            &OperatorSpec::new(a.clone(), l.clone()),
            &OperatorSpec::new(b.clone(), l.clone()),
            &x,
        )
        .unwrap();
        let rhs = apply(&OperatorSpec::new(a.clone() + b.clone(), l.clone()), &x).unwrap();
        if lhs != rhs {
            failures.push(format!("case {t}: a={a} b={b} l={l}"));
        }
    }
    report(
        2,
        "composition",
        start,
        Duration::from_secs(10),
        &failures,
        "100 triples, N = 64, exact",
    )
}

fn criterion_3_convolution_identity() -> bool {
    let start = Instant::now();
    let mut s = Sampler::new(3, 9);
    let mut failures = Vec::new();
    for t in 0..100 {
        let (a, b, l) = (s.rational(), s.rational(), s.rational());
        for m in 0..=32 {
            let lhs = convolve_orders(&a, &b, &l, m).unwrap();
            let rhs =
                l_pochhammer(&-(a.clone() + b.clone()), &l, m).unwrap() / factorial::<Rational>(m);
            if lhs != rhs {
                failures.push(format!("case {t}: a={a} b={b} l={l} m={m}"));
            }
        }
    }
    report(
        3,
        "convolution",
        start,
        Duration::from_secs(5),
        &failures,
        "100 triples, m <= 32, exact",
    )
}

fn rel_err(got: &[f64], want: &[f64]) -> f64 {
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = got
        .iter()
        .zip(want)
        .fold(0.0f64, |m, (g, w)| m.max((g - w).abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn criterion_4_roundtrip() -> bool {
    let start = Instant::now();
    let n = 32;
    let mut s = Sampler::new(4, 9);
    let mut failures = Vec::new();
    for t in 0..100 {
        let spec = OperatorSpec::new(s.rational(), s.rational());
        let x = s.sequence(n);
        let v = s.weights(n);
        if apply(&spec, &inverse_apply(&spec, &x).unwrap()).unwrap() != x {
            failures.push(format!("exact case {t}: apply(inverse_apply) at {spec:?}"));
        }
        let y = forward_transform(&spec, &v, &x).unwrap();
        if forward_transform(&spec, &v, &reconstruct(&spec, &v, &y).unwrap()).unwrap() != y {
            failures.push(format!("exact case {t}: forward(reconstruct) at {spec:?}"));
        }
    }

    let float_cases = 100;
    let mut worst = 0.0f64;
    let mut float_failed = 0;
    let mut check = |label: String, err: f64, failures: &mut Vec<String>| {
        worst = worst.max(err);
        if err.is_nan() || err > 1e-9 {
            float_failed += 1;
            failures.push(format!("{label}: relative error {err:.3e}"));
        }
    };
    for t in 0..float_cases {
        let (a, l) = (s.f64_in(-2.0, 2.0), s.f64_in(-2.0, 2.0));
        let spec = OperatorSpec::new(a, l);
        let x: SequencePrefix<f64> = (0..n).map(|_| s.f64_in(-1.0, 1.0)).collect();
        let v = WeightSequence::new(
            (0..n)
                .map(|_| {
                    let w = s.f64_in(0.5, 2.0);
                    if s.index(0, 1) == 0 {
                        w
                    } else {
                        -w
                    }
                })
                .collect(),
        )
        .unwrap();
        let label = format!("float case {t} (a={a:.4}, l={l:.4})");
        match inverse_apply(&spec, &x).and_then(|u| apply(&spec, &u)) {
            Ok(back) => check(
                format!("{label} apply(inverse_apply)"),
                rel_err(&back, &x),
                &mut failures,
            ),
            Err(e) => check(
                format!("{label} apply(inverse_apply): {e}"),
                f64::INFINITY,
                &mut failures,
            ),
        }
        let y = forward_transform(&spec, &v, &x).unwrap();
        match reconstruct(&spec, &v, &y).and_then(|xr| forward_transform(&spec, &v, &xr)) {
            Ok(again) => check(
                format!("{label} forward(reconstruct)"),
                rel_err(&again, &y),
                &mut failures,
            ),
            Err(e) => check(
                format!("{label} forward(reconstruct): {e}"),
                f64::INFINITY,
                &mut failures,
            ),
        }
    }
    let detail = format!(
        "100 exact cases N = 32; float: {float_failed} of {} roundtrips above 1e-9, worst {worst:.2e}",
        2 * float_cases
    );
    report(
        4,
        "inverse and roundtrip",
        start,
        Duration::from_secs(10),
        &failures,
        &detail,
    )
}

fn criterion_5_matrix_consistency() -> bool {
    let start = Instant::now();
    let mut s = Sampler::new(5, 9);
    let mut failures = Vec::new();
    for t in 0..50 {
        let spec = OperatorSpec::new(s.rational(), s.rational());
        let n = s.index(1, 32);
        let v = s.weights(n);
        let x = s.sequence(n);
        let c = build_c(&spec, &v, n).unwrap();
        // plain row-by-column product, independent of the kernel's own mul_vec
        let cx: Vec<Rational> = (0..n)
            .map(|r| (0..=r).fold(Rational::zero(), |acc, m| acc + c.get(r, m) * x[m].clone()))
            .collect();
        if cx.as_slice() != forward_transform(&spec, &v, &x).unwrap().terms() {
            failures.push(format!("case {t}: N={n} {spec:?}"));
        }
    }
    report(
        5,
        "matrix consistency",
        start,
        Duration::from_secs(5),
        &failures,
        "50 cases, N <= 32, exact",
    )
}

fn criterion_6_dual_semantic_identities() -> bool {
    let start = Instant::now();
    let n = 16;
    let mut s = Sampler::new(6, 9);
    let mut failures = Vec::new();
    for t in 0..50 {
        let spec = OperatorSpec::new(s.rational(), s.rational());
        let v = s.weights(n);
        let z = s.sequence(n);
        let y = s.sequence(n);
        let input = DualTestInput::new(spec.clone(), v.clone(), z.clone(), n).unwrap();
        let x = reconstruct(&spec, &v, &y).unwrap();
        let d = build_d(&input).unwrap();
        let e = build_e(&input).unwrap();
        let mut partial = Rational::zero();
        for r in 0..n {
            let dy = (0..=r).fold(Rational::zero(), |acc, k| acc + d.get(r, k) * y[k].clone());
            let ey = (0..=r).fold(Rational::zero(), |acc, k| acc + e.get(r, k) * y[k].clone());
            let term = z[r].clone() * x[r].clone();
            partial += term.clone();
            if dy != term {
                failures.push(format!("case {t}: (Dy)_{r}"));
            }
            if ey != partial {
                failures.push(format!("case {t}: (Ey)_{r}"));
            }
        }
    }
    report(
        6,
        "dual identities",
        start,
        Duration::from_secs(5),
        &failures,
        "50 cases, N = 16, exact",
    )
}

/// Direct enumeration of every column subset.
fn enumerate_subsets(d: &LowerTriangularKernel<Rational>) -> Rational {
    let n = d.dim();
    let mut best = Rational::zero();
    for mask in 0u32..(1 << n) {
        let total = (0..n).fold(Rational::zero(), |acc, r| {
            let row: Rational = (0..n)
                .filter(|k| mask & (1 << k) != 0)
                .map(|k| d.get(r, k))
                .sum();
            acc + row.abs()
        });
        if total > best {
            best = total;
        }
    }
    best
}

fn criterion_7_a1_oracle_equality() -> bool {
    let start = Instant::now();
    let mut s = Sampler::new(7, 9);
    let mut failures = Vec::new();
    let mut sizes = Vec::new();
    for t in 0..20 {
        let n = if t < 8 { t + 5 } else { 12 };
        sizes.push(n);
        let d = s.lower_triangular(n);
        let fast = subset_sup(&d);
        let slow = enumerate_subsets(&d);
        if fast != slow {
            failures.push(format!(
                "case {t}: N={n}: evaluator {fast} vs enumeration {slow}"
            ));
        }
    }
    let detail = format!(
        "20 matrices, N in {:?}..={:?}, exact",
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap()
    );
    report(
        7,
        "A1 oracle",
        start,
        Duration::from_secs(30),
        &failures,
        &detail,
    )
}

fn criterion_8_norm_axioms() -> bool {
    let start = Instant::now();
    let mut s = Sampler::new(8, 9);
    let mut failures = Vec::new();
    let one = q(1, 1);
    for t in 0..100 {
        let spec = OperatorSpec::new(s.rational(), s.rational());
        let n = s.index(1, 24);
        let v = s.weights(n);
        // a quarter of the cases are zero prefixes
        let x = if t % 4 == 0 {
            SequencePrefix::zeros(n)
        } else {
            s.sequence(n)
        };
        let w = s.sequence(n);
        let alpha = s.rational();
        let nx = norm(&spec, &v, &x).unwrap();
        if nx.is_zero() != x.iter().all(Zero::is_zero) {
            failures.push(format!("case {t}: definiteness"));
        }
        if norm(&spec, &v, &x.scale(&alpha)).unwrap() != alpha.abs() * nx.clone() {
            failures.push(format!("case {t}: homogeneity"));
        }
        let sum = norm(&spec, &v, &x.combine(&one, &w, &one)).unwrap();
        if sum > nx + norm(&spec, &v, &w).unwrap() {
            failures.push(format!("case {t}: triangle inequality"));
        }
    }
    report(
        8,
        "norm axioms",
        start,
        Duration::from_secs(5),
        &failures,
        "100 cases, exact",
    )
}

fn criterion_9_verdict_sanity() -> bool {
    let start = Instant::now();
    let mut failures = Vec::new();
    let opts = CheckOptions::for_mode(Mode::Exact);

    let identity = check_a1_kernel(&LowerTriangularKernel::<Rational>::identity(12), &opts);
    if identity.status != Status::ViolatedGrowth {
        failures.push(format!("identity A1: {}", identity.status));
    }

    // every row holds 2^-(n+k), so the supremum is the full sum, bounded by 4
    let geometric = LowerTriangularKernel::from_rows(
        (0..12)
            .map(|r: i64| (0..=r).map(|k| q(1, 1 << (r + k))).collect())
            .collect(),
    );
    let geometric = check_a1_kernel(&geometric, &opts);
    if geometric.status != Status::SatisfiedAtTruncation {
        failures.push(format!("geometric A1: {}", geometric.status));
    }

    let x: SequencePrefix<Rational> = (0..64).map(|k| q(k, 1)).collect();
    let spec = OperatorSpec::new(q(1, 1), q(1, 1));
    let linear = classify(
        &spec,
        &WeightSequence::unit(64),
        &x,
        SpaceTag::LInf,
        &Tolerances::for_mode(Mode::Exact),
    )
    .unwrap();
    if linear.status != Status::ViolatedGrowth {
        failures.push(format!("x_n = n in l_inf: {}", linear.status));
    }
    report(
        9,
        "verdict sanity",
        start,
        Duration::from_secs(1),
        &failures,
        "identity, geometric row, x_n = n",
    )
}

#[test]
fn acceptance() {
    let criteria: [fn() -> bool; 9] = [
        criterion_1_coefficient_reproduction,
        criterion_2_composition_identity,
        criterion_3_convolution_identity,
        criterion_4_roundtrip,
        criterion_5_matrix_consistency,
        criterion_6_dual_semantic_identities,
        criterion_7_a1_oracle_equality,
        criterion_8_norm_axioms,
        criterion_9_verdict_sanity,
    ];
    let failed: Vec<usize> = criteria
        .iter()
        .enumerate()
        .filter(|(_, c)| !c())
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
