//! Fixtures shared by the benchmarks.

use lfd_core::verify::Sampler;
use lfd_core::{
    DualTestInput, LowerTriangularKernel, OperatorSpec, Rational, SequencePrefix, WeightSequence,
};

pub fn exact_spec() -> OperatorSpec<Rational> {
    OperatorSpec::new(
        Rational::new(1.into(), 2.into()),
        Rational::new(1.into(), 4.into()),
    )
}

pub fn float_spec() -> OperatorSpec<f64> {
    OperatorSpec::new(0.5, 0.25)
}

pub fn exact_sequence(n: usize, seed: u64) -> SequencePrefix<Rational> {
    Sampler::new(seed, 9).sequence(n)
}

pub fn float_sequence(n: usize) -> SequencePrefix<f64> {
    (0..n)
        .map(|k| ((k * 37 % 101) as f64 - 50.0) / 50.0)
        .collect()
}

pub fn exact_dual_input(n: usize, seed: u64) -> DualTestInput<Rational> {
    let mut s = Sampler::new(seed, 9);
    let v = s.weights(n);
    let z = s.sequence(n);
    DualTestInput::new(exact_spec(), v, z, n).expect("lengths match")
}

pub fn float_dual_input(n: usize) -> DualTestInput<f64> {
    let z: SequencePrefix<f64> = (0..n).map(|k| 0.5f64.powi(k as i32)).collect();
    DualTestInput::new(float_spec(), WeightSequence::unit(n), z, n).expect("lengths match")
}

pub fn random_kernel(n: usize, seed: u64) -> LowerTriangularKernel<Rational> {
    Sampler::new(seed, 9).lower_triangular(n)
}
