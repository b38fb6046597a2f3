//! Seeded random step functions.
//!
//! Corpora are drawn from `ChaCha8Rng::seed_from_u64(seed)`; each cell value
//! of the rank-`r` base function is `re + i·im` with `re`, `im` independent
//! standard normals, drawn in cell order `t = 0..M_r`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::group::RadixSystem;
use crate::spectral::StepFunction;
use crate::Scalar;

/// A random function measurable with respect to rank-`rank` cylinders, i.e.
/// depending only on `x_0..x_{rank-1}`. `rank` is clamped to the depth.
pub fn random_step_function<T: Scalar, R: Rng + ?Sized>(
    sys: &RadixSystem,
    rank: usize,
    rng: &mut R,
) -> StepFunction<T> {
    let rank = rank.min(sys.depth());
    let base: Vec<Complex<T>> = (0..sys.product(rank))
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
        })
        .collect();
    let period = base.len();
    StepFunction::from_fn(sys, |t| base[t % period])
}

/// `count` functions; member `i` has rank `ranks[i % ranks.len()]`.
pub fn seeded_corpus<T: Scalar>(
    sys: &RadixSystem,
    count: usize,
    ranks: &[usize],
    seed: u64,
) -> Vec<StepFunction<T>> {
    assert!(!ranks.is_empty(), "corpus needs at least one rank");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| random_step_function(sys, ranks[i % ranks.len()], &mut rng))
        .collect()
}
