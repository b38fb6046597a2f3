//! `L_p` norms, Lebesgue constants and the digit-variation functions `v`, `v*`.

use std::ops::RangeInclusive;

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::group::{RadixSystem, VilenkinIndex};
use crate::spectral::{dirichlet_kernel, RootTable, StepFunction};
use crate::{Rational, Scalar};

/// Absolute slack allowed before a `v`/`v*` bound on `L_n` counts as violated.
pub const BOUND_SLACK: f64 = 1e-9;

const COMPENSATED_ABOVE: usize = 1 << 16;

/// Kahan–Babuška (Neumaier) summation.
pub fn compensated_sum<T: Scalar>(xs: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `(∫|f|^p dμ)^{1/p}`; a quasi-norm for `0 < p < 1`.
pub fn lp_norm<T: Scalar>(f: &StepFunction<T>, p: T) -> Result<T> {
    if p.is_nan() || p <= T::zero() || p.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "p must be positive, got {p}"
        )));
    }
    let values = f.values();
    let terms = values.iter().map(|v| {
        let a = v.norm();
        if p == T::one() {
            a
        } else {
            a.powf(p)
        }
    });
    let sum = if values.len() > COMPENSATED_ABOVE {
        compensated_sum(terms)
    } else {
        terms.sum()
    };
    let mean = sum / T::from_u64_exact(f.sys().order());
    Ok(if p == T::one() {
        mean
    } else {
        mean.powf(p.recip())
    })
}

pub fn l1_norm<T: Scalar>(f: &StepFunction<T>) -> T {
    lp_norm(f, T::one()).expect("p = 1 is valid")
}

/// Smallest depth at which `D_n` is measurable: `|n| + 1`, capped at `N`.
fn kernel_depth(n: u64, sys: &RadixSystem) -> usize {
    sys.products()
        .iter()
        .position(|&m| n < m)
        .unwrap_or(sys.depth())
        .clamp(1, sys.depth())
}

fn check_lebesgue_index(n: u64, sys: &RadixSystem) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Lebesgue constant is defined for n ≥ 1".into(),
        ));
    }
    if n > sys.order() {
        return Err(out_of_range("n", n, sys.order()));
    }
    Ok(())
}

/// `L_n = ‖D_n‖_1`, from the kernel realized at depth `|n| + 1`.
pub fn lebesgue_constant<T: Scalar>(n: u64, sys: &RadixSystem) -> Result<T> {
    check_lebesgue_index(n, sys)?;
    let coarse = sys.truncate(kernel_depth(n, sys))?;
    Ok(l1_norm(&dirichlet_kernel::<T>(n, &coarse)?))
}

/// `L_n` without materializing `D_n`.
///
/// On the set where `x_0 = … = x_{z-1} = 0` and `x_z = a ≠ 0` (measure
/// `1/M_{z+1}`) the kernel has constant modulus
/// `|M_z Σ_{s<n_z} ω^{sa} + ω^{n_z a} (n mod M_z)|` with `ω = exp(2πi/m_z)`,
/// and at the origin `D_n = n`. Cost `O(Σ m_z²)` per `n`.
pub fn lebesgue_constant_by_cylinders<T: Scalar>(n: u64, sys: &RadixSystem) -> Result<T> {
    check_lebesgue_index(n, sys)?;
    if n == sys.order() {
        return Ok(T::one());
    }
    let roots = RootTable::<T>::new(sys);
    let mut total = T::from_u64_exact(n) / T::from_u64_exact(sys.order());
    for z in 0..sys.depth() {
        let digit = sys.digit(n, z) as u64;
        let below = T::from_u64_exact(n % sys.product(z));
        let width = T::from_u64_exact(sys.product(z));
        let mut level = T::zero();
        for a in 1..sys.radix(z) as u64 {
            let geometric: Complex<T> = (0..digit).map(|s| roots.root(z, s * a)).sum();
            level += (geometric * width + roots.root(z, digit * a) * below).norm();
        }
        total += level / T::from_u64_exact(sys.product(z + 1));
    }
    Ok(total)
}

/// Digit statistics `δ_j`, `δ*_j`, `v(n)`, `v*(n)` of an index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariationProfile {
    pub n: VilenkinIndex,
    /// `δ_j = sign n_j`.
    pub delta: Vec<u32>,
    /// `δ*_j = |⊖n_j − 1| δ_j` with `⊖n_j = (m_j − n_j) mod m_j`.
    pub delta_star: Vec<u32>,
    pub v: u32,
    pub v_star: u64,
}

pub fn variation_profile(n: u64, sys: &RadixSystem) -> Result<VariationProfile> {
    let idx = sys.decompose(n)?;
    let delta: Vec<u32> = idx.digits().iter().map(|&d| (d != 0) as u32).collect();
    let delta_star: Vec<u32> = idx
        .digits()
        .iter()
        .zip(sys.radices())
        .map(|(&d, &m)| if d == 0 { 0 } else { ((m - d) % m).abs_diff(1) })
        .collect();
    let (v, v_star) = variation(n, sys);
    Ok(VariationProfile {
        n: idx,
        delta,
        delta_star,
        v,
        v_star,
    })
}

/// `(v(n), v*(n))` for `n < M_N`, allocation free.
pub fn variation(n: u64, sys: &RadixSystem) -> (u32, u64) {
    let mut rest = n;
    let mut prev = 0u32;
    let mut v = 0u32;
    let mut v_star = 0u64;
    for (j, &m) in sys.radices().iter().enumerate() {
        let d = (rest % m as u64) as u32;
        rest /= m as u64;
        let delta = (d != 0) as u32;
        if j == 0 {
            v += delta;
        } else {
            v += delta.abs_diff(prev);
        }
        if d != 0 {
            v_star += ((m - d) % m).abs_diff(1) as u64;
        }
        prev = delta;
    }
    // δ_N = 0 closes the last block.
    v += prev;
    (v, v_star)
}

/// One `n` of the two-sided Lebesgue-constant bound
/// `v/(4λ) + v*/λ + 1/(2λ) ≤ L_n ≤ 3v/2 + 4v* − 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma2Row {
    pub n: u64,
    pub v: u32,
    pub v_star: u64,
    pub lebesgue: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub lower_slack: f64,
    pub upper_slack: f64,
}

impl Lemma2Row {
    pub fn violated(&self) -> bool {
        self.lower_slack < -BOUND_SLACK || self.upper_slack < -BOUND_SLACK
    }
}

/// Requires `1 ≤ n < M_N`: `v*(M_N)` depends on the radix `m_N`, which lies
/// past the truncation.
pub fn check_lemma2(n: u64, sys: &RadixSystem) -> Result<Lemma2Row> {
    if n >= sys.order() {
        return Err(out_of_range("n", n, sys.order() - 1));
    }
    let lebesgue = lebesgue_constant_by_cylinders::<f64>(n, sys)?;
    let (v, v_star) = variation(n, sys);
    Ok(lemma2_row(n, v, v_star, lebesgue, sys.lambda()))
}

fn lemma2_row(n: u64, v: u32, v_star: u64, lebesgue: f64, lambda: u32) -> Lemma2Row {
    let lambda = lambda as f64;
    let (vf, vs) = (v as f64, v_star as f64);
    let lower_bound = vf / (4.0 * lambda) + vs / lambda + 1.0 / (2.0 * lambda);
    let upper_bound = 1.5 * vf + 4.0 * vs - 1.0;
    Lemma2Row {
        n,
        v,
        v_star,
        lebesgue,
        lower_bound,
        upper_bound,
        lower_slack: lebesgue - lower_bound,
        upper_slack: upper_bound - lebesgue,
    }
}

/// Result of scanning the Lebesgue-constant bounds over a range of `n`.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub from: u64,
    pub to: u64,
    pub rows: Vec<Lemma2Row>,
    pub violations: Vec<u64>,
    pub min_lower_slack: f64,
    pub min_upper_slack: f64,
}

/// Checks every `n` in `range` (inclusive, within `[1, M_N)`). Rows come back
/// in increasing `n` regardless of thread count.
pub fn scan_lemma2(sys: &RadixSystem, range: RangeInclusive<u64>) -> Result<LemmaReport> {
    let (from, to) = (*range.start(), *range.end());
    if from == 0 || to >= sys.order() || from > to {
        return Err(Error::InvalidArgument(format!(
            "scan range {from}..={to} not within [1, {})",
            sys.order()
        )));
    }
    let rows = (from..=to)
        .into_par_iter()
        .map(|n| check_lemma2(n, sys))
        .collect::<Result<Vec<_>>>()?;
    let violations = rows.iter().filter(|r| r.violated()).map(|r| r.n).collect();
    let min_lower_slack = rows
        .iter()
        .map(|r| r.lower_slack)
        .fold(f64::INFINITY, f64::min);
    let min_upper_slack = rows
        .iter()
        .map(|r| r.upper_slack)
        .fold(f64::INFINITY, f64::min);
    Ok(LemmaReport {
        from,
        to,
        rows,
        violations,
        min_lower_slack,
        min_upper_slack,
    })
}

/// Average of `v(k)` over `1 ≤ k < M_n`, under both normalizations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1Average {
    pub level: usize,
    pub sum_v: u64,
    /// `Σ v(k) / (n M_n)`.
    pub by_level_and_size: Rational,
    /// `Σ v(k) / M_n`.
    pub by_size: Rational,
}

pub fn lemma1_average(level: usize, sys: &RadixSystem) -> Result<Lemma1Average> {
    if level == 0 || level > sys.depth() {
        return Err(out_of_range("level", level as u64, sys.depth() as u64));
    }
    let size = sys.product(level);
    let sum_v: u64 = (1..size)
        .into_par_iter()
        .map(|k| variation(k, sys).0 as u64)
        .sum();
    Ok(Lemma1Average {
        level,
        sum_v,
        by_level_and_size: Rational::new(sum_v, level as u64 * size),
        by_size: Rational::new(sum_v, size),
    })
}

/// Averages of `v` for levels `1..=N` plus the running minimum of the
/// `n·M_n` normalization.
pub fn lemma1_scan(sys: &RadixSystem) -> Result<(Vec<Lemma1Average>, Rational)> {
    let rows = (1..=sys.depth())
        .map(|level| lemma1_average(level, sys))
        .collect::<Result<Vec<_>>>()?;
    let c_estimate = rows
        .iter()
        .map(|r| r.by_level_and_size)
        .min()
        .unwrap_or_else(Rational::zero);
    Ok((rows, c_estimate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::character;

    #[test]
    fn lp_norm_examples() {
        let s = RadixSystem::new(&[2, 3, 2]).unwrap();
        let c = StepFunction::constant(&s, Complex::new(3.0f64, 4.0));
        for p in [0.5, 1.0, 2.0, 3.5] {
            assert!((lp_norm(&c, p).unwrap() - 5.0).abs() < 1e-12);
        }
        for k in [1, 5, 11] {
            let psi = character::<f64>(k, &s).unwrap();
            for p in [0.5, 1.0, 2.0] {
                assert!((lp_norm(&psi, p).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        assert!(lp_norm(&c, 0.0).is_err());
        assert!(lp_norm(&c, -1.0).is_err());
        assert!(lp_norm(&c, f64::NAN).is_err());
    }

    #[test]
    fn kernel_at_products_has_unit_norm() {
        for s in [
            RadixSystem::dyadic(6).unwrap(),
            RadixSystem::new(&[2, 3, 4, 3]).unwrap(),
        ] {
            for k in 0..=s.depth() {
                let d = dirichlet_kernel::<f64>(s.product(k), &s).unwrap();
                assert!((l1_norm(&d) - 1.0).abs() < 1e-12);
                let l = lebesgue_constant::<f64>(s.product(k), &s).unwrap();
                assert!((l - 1.0).abs() < 1e-12);
                let l = lebesgue_constant_by_cylinders::<f64>(s.product(k), &s).unwrap();
                assert!((l - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lebesgue_examples() {
        let s = RadixSystem::dyadic(4).unwrap();
        assert!((lebesgue_constant::<f64>(2, &s).unwrap() - 1.0).abs() < 1e-15);
        assert!((lebesgue_constant::<f64>(3, &s).unwrap() - 1.5).abs() < 1e-15);
        assert!(matches!(
            lebesgue_constant::<f64>(0, &s),
            Err(Error::InvalidArgument(_))
        ));
        assert!(lebesgue_constant::<f64>(17, &s).is_err());
        assert!(lebesgue_constant_by_cylinders::<f64>(0, &s).is_err());
    }

    #[test]
    fn cylinder_formula_matches_kernel() {
        for s in [
            RadixSystem::dyadic(7).unwrap(),
            RadixSystem::constant(3, 4).unwrap(),
            RadixSystem::new(&[2, 3, 4, 5]).unwrap(),
        ] {
            for n in 1..=s.order() {
                let direct = l1_norm(&dirichlet_kernel::<f64>(n, &s).unwrap());
                let fast = lebesgue_constant_by_cylinders::<f64>(n, &s).unwrap();
                assert!(
                    (direct - fast).abs() < 1e-10,
                    "{s} n={n}: {direct} vs {fast}"
                );
            }
        }
    }

    #[test]
    fn lebesgue_is_depth_independent() {
        let shallow = RadixSystem::periodic(&[2, 3, 4], 4).unwrap();
        let deep = RadixSystem::periodic(&[2, 3, 4], 6).unwrap();
        for n in 1..shallow.order() {
            let a = l1_norm(&dirichlet_kernel::<f64>(n, &shallow).unwrap());
            let b = l1_norm(&dirichlet_kernel::<f64>(n, &deep).unwrap());
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn variation_examples() {
        let d = RadixSystem::dyadic(3).unwrap();
        let p = variation_profile(5, &d).unwrap();
        assert_eq!((p.v, p.v_star), (4, 0));
        assert_eq!(p.delta, vec![1, 0, 1]);
        let p = variation_profile(7, &d).unwrap();
        assert_eq!((p.v, p.v_star), (2, 0));
        let p = variation_profile(0, &d).unwrap();
        assert_eq!((p.v, p.v_star), (0, 0));

        let s = RadixSystem::new(&[4, 4]).unwrap();
        let p = variation_profile(2, &s).unwrap();
        assert_eq!(p.delta, vec![1, 0]);
        assert_eq!(p.delta_star, vec![1, 0]);
        assert_eq!((p.v, p.v_star), (2, 1));
        // n_0 = 1 under m_0 = 4: ⊖1 = 3, δ* = 2.
        let p = variation_profile(1, &s).unwrap();
        assert_eq!(p.delta_star, vec![2, 0]);

        assert!(variation_profile(16, &s).is_err());
    }

    #[test]
    fn variation_profile_invariants() {
        for s in [
            RadixSystem::dyadic(10).unwrap(),
            RadixSystem::new(&[2, 3, 4, 5, 3]).unwrap(),
        ] {
            for n in 0..s.order() {
                let p = variation_profile(n, &s).unwrap();
                assert!(p.delta.iter().all(|&d| d <= 1));
                for (j, &d) in p.n.digits().iter().enumerate() {
                    if d == 0 {
                        assert_eq!(p.delta_star[j], 0);
                    }
                }
                if n >= 1 {
                    assert!(p.v >= 1);
                }
                if s.is_dyadic() {
                    assert_eq!(p.v_star, 0);
                }
                // Recompute v from the profile's own δ vector.
                let mut ext = p.delta.clone();
                ext.push(0);
                let v: u32 = ext.windows(2).map(|w| w[0].abs_diff(w[1])).sum::<u32>() + ext[0];
                assert_eq!(v, p.v);
                assert_eq!(
                    p.delta_star.iter().map(|&d| d as u64).sum::<u64>(),
                    p.v_star
                );
            }
        }
    }

    #[test]
    fn lemma2_examples() {
        let d = RadixSystem::dyadic(4).unwrap();
        let r = check_lemma2(1, &d).unwrap();
        assert_eq!(r.v, 2);
        assert!((r.lower_bound - 0.5).abs() < 1e-15);
        assert!((r.upper_bound - 2.0).abs() < 1e-15);
        assert!((r.lebesgue - 1.0).abs() < 1e-12);
        assert!(!r.violated());
        let r = check_lemma2(3, &d).unwrap();
        assert!((r.lower_bound - 0.5).abs() < 1e-15);
        assert!((r.lebesgue - 1.5).abs() < 1e-12);
        assert!((r.upper_bound - 2.0).abs() < 1e-15);
        assert!(check_lemma2(0, &d).is_err());
    }

    #[test]
    fn lemma2_dyadic_exhaustive() {
        let s = RadixSystem::dyadic(12).unwrap();
        let report = scan_lemma2(&s, 1..=s.order() - 1).unwrap();
        assert_eq!(report.rows.len(), 4095);
        assert!(report.violations.is_empty());
        assert!(report.min_lower_slack > 0.0);
        assert!(report.min_upper_slack >= 0.0);
        assert!(scan_lemma2(&s, 0..=5).is_err());
    }

    #[test]
    fn lemma1_examples() {
        let d = RadixSystem::dyadic(12).unwrap();
        let a = lemma1_average(3, &d).unwrap();
        assert_eq!(a.sum_v, 16);
        assert_eq!(a.by_level_and_size, Rational::new(2, 3));
        assert_eq!(a.by_size, Rational::new(2, 1));
        let a = lemma1_average(1, &d).unwrap();
        assert_eq!(a.by_level_and_size, Rational::from_integer(1));
        let (rows, c) = lemma1_scan(&d).unwrap();
        assert_eq!(rows.len(), 12);
        assert!(rows
            .iter()
            .all(|r| r.by_level_and_size >= Rational::new(1, 4)));
        assert!(c > Rational::zero());
        assert!(lemma1_average(0, &d).is_err());
        assert!(lemma1_average(13, &d).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = std::iter::once(1e16)
            .chain(std::iter::repeat_n(1.0, 1000))
            .chain(std::iter::once(-1e16));
        assert_eq!(compensated_sum(xs), 1000.0);
    }
}
