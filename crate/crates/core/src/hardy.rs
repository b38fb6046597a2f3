//! Martingale maximal function, `H_1` norm, and the counterexample
//! `f = Σ_k a_k / α_k^{1/2}` with `a_k = D_{M_{α_k+1}} − D_{M_{α_k}}`, whose
//! partial sums have unbounded Cesàro-averaged `L_1` norms.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::group::RadixSystem;
use crate::norms::{l1_norm, lebesgue_constant};
use crate::spectral::{
    character, dirichlet_kernel, fejer_mean, inverse, partial_sum, PartialSums, SpectralVector,
    StepFunction,
};
use crate::Scalar;

/// Indices per independently checkpointed chunk in partial-sum scans. Fixed,
/// so results do not depend on the thread count.
const SCAN_CHUNK: u64 = 256;

/// `averages[n][r]` is the mean of `f` over the rank-`n` cylinder of cells
/// `t ≡ r (mod M_n)`, for `n = 0..=N`.
pub fn cylinder_averages<T: Scalar>(f: &StepFunction<T>) -> Vec<Vec<Complex<T>>> {
    let sys = f.sys();
    let depth = sys.depth();
    let mut levels = vec![Vec::new(); depth + 1];
    levels[depth] = f.values().to_vec();
    for n in (0..depth).rev() {
        let width = sys.product(n) as usize;
        let m = sys.radix(n) as usize;
        let inv = T::from_u64_exact(m as u64).recip();
        let finer = &levels[n + 1];
        let coarse: Vec<Complex<T>> = (0..width)
            .map(|r| (0..m).map(|c| finer[r + c * width]).sum::<Complex<T>>() * inv)
            .collect();
        levels[n] = coarse;
    }
    levels
}

/// `f*(x) = max_{0≤n≤N} |(1/|I_n(x)|) ∫_{I_n(x)} f dμ|`, stored as real values.
pub fn maximal_function<T: Scalar>(f: &StepFunction<T>) -> StepFunction<T> {
    let averages = cylinder_averages(f);
    StepFunction::from_fn(f.sys(), |t| {
        let sup = averages
            .iter()
            .map(|level| level[t % level.len()].norm())
            .fold(T::zero(), T::max);
        Complex::from(sup)
    })
}

/// `‖f‖_{H_1} = ‖f*‖_1`.
pub fn h1_norm<T: Scalar>(f: &StepFunction<T>) -> T {
    l1_norm(&maximal_function(f))
}

/// A function together with its maximal function and the partial sums
/// `S_{M_n} f`, `n = 0..=N`.
#[derive(Clone, Debug)]
pub struct HardyProfile<T> {
    pub f: StepFunction<T>,
    pub maximal: StepFunction<T>,
    pub h1_norm: T,
    pub dyadic_partial_sums: Vec<StepFunction<T>>,
}

pub fn hardy_profile<T: Scalar>(f: &StepFunction<T>) -> HardyProfile<T> {
    let maximal = maximal_function(f);
    let h1 = l1_norm(&maximal);
    HardyProfile {
        f: f.clone(),
        maximal,
        h1_norm: h1,
        dyadic_partial_sums: product_partial_sums(f),
    }
}

/// `S_{M_n} f` for `n = 0..=N`, through the spectral route.
fn product_partial_sums<T: Scalar>(f: &StepFunction<T>) -> Vec<StepFunction<T>> {
    let coeffs = crate::spectral::forward_fast(f);
    f.sys()
        .products()
        .iter()
        .map(|&m| partial_sum(&coeffs, m).expect("M_n ≤ M_N"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormEquivalenceReport {
    /// `‖f*‖_1`.
    pub h1_norm: f64,
    /// `‖sup_n |S_{M_n} f|‖_1`.
    pub sup_partial_sums_norm: f64,
    /// `max_x |f*(x) − sup_n |S_{M_n} f(x)||`.
    pub max_pointwise_deviation: f64,
}

/// Compares the cylinder-average maximal function with the supremum of the
/// partial sums `S_{M_n} f` computed from Fourier coefficients.
pub fn check_norm_equivalence<T: Scalar>(f: &StepFunction<T>) -> NormEquivalenceReport {
    let maximal = maximal_function(f);
    let sums = product_partial_sums(f);
    let sup = StepFunction::from_fn(f.sys(), |t| {
        Complex::from(
            sums.iter()
                .map(|s| s.values()[t].norm())
                .fold(T::zero(), T::max),
        )
    });
    NormEquivalenceReport {
        h1_norm: l1_norm(&maximal).to_f64_lossy(),
        sup_partial_sums_norm: l1_norm(&sup).to_f64_lossy(),
        max_pointwise_deviation: maximal
            .max_abs_diff(&sup)
            .expect("same system")
            .to_f64_lossy(),
    }
}

/// Parameters of the truncated counterexample `f_K = Σ_{k≤K} a_k / α_k^{1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleSpec {
    alphas: Vec<u32>,
    sys: RadixSystem,
}

impl CounterexampleSpec {
    /// `alphas` must be strictly increasing positive integers with
    /// `α_K + 1 ≤ N`.
    pub fn new(alphas: Vec<u32>, sys: RadixSystem) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidArgument("at least one α is required".into()));
        }
        if alphas[0] == 0 {
            return Err(Error::InvalidArgument("α_k must be positive".into()));
        }
        if alphas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "α_k must be strictly increasing".into(),
            ));
        }
        let needed = *alphas.last().expect("non-empty") as usize + 1;
        if needed > sys.depth() {
            return Err(Error::DepthInsufficient {
                depth: sys.depth(),
                needed,
            });
        }
        Ok(Self { alphas, sys })
    }

    /// `α_k = k^4` for `k = 1..=terms`, so that `Σ α_k^{-1/2} = Σ k^{-2}`.
    pub fn quartic(terms: usize, sys: RadixSystem) -> Result<Self> {
        let alphas = (1..=terms as u32).map(|k| k.pow(4)).collect();
        Self::new(alphas, sys)
    }

    pub fn alphas(&self) -> &[u32] {
        &self.alphas
    }

    pub fn terms(&self) -> usize {
        self.alphas.len()
    }

    pub fn sys(&self) -> &RadixSystem {
        &self.sys
    }

    /// The first `terms` blocks only.
    pub fn truncated(&self, terms: usize) -> Result<Self> {
        if terms == 0 || terms > self.alphas.len() {
            return Err(out_of_range(
                "terms",
                terms as u64,
                self.alphas.len() as u64,
            ));
        }
        Self::new(self.alphas[..terms].to_vec(), self.sys.clone())
    }

    /// `Σ_{k≤K} α_k^{-1/2}`.
    pub fn summability(&self) -> f64 {
        self.alphas.iter().map(|&a| (a as f64).sqrt().recip()).sum()
    }

    /// Coefficient block `[M_{α_k}, M_{α_k+1})` of term `k` (0-based).
    pub fn block(&self, k: usize) -> (u64, u64) {
        let a = self.alphas[k] as usize;
        (self.sys.product(a), self.sys.product(a + 1))
    }

    /// Term whose coefficient block contains `j`.
    pub fn block_of(&self, j: u64) -> Option<usize> {
        (0..self.terms()).find(|&k| {
            let (lo, hi) = self.block(k);
            lo <= j && j < hi
        })
    }
}

/// `a_k = D_{M_{α+1}} − D_{M_α}`, using `D_{M_n} = M_n` on `I_n`, `0` off it.
pub fn counterexample_atom<T: Scalar>(alpha: u32, sys: &RadixSystem) -> Result<StepFunction<T>> {
    let a = alpha as usize;
    if a + 1 > sys.depth() {
        return Err(Error::DepthInsufficient {
            depth: sys.depth(),
            needed: a + 1,
        });
    }
    let (lo, hi) = (sys.product(a), sys.product(a + 1));
    Ok(StepFunction::from_fn(sys, |t| {
        let t = t as u64;
        let mut v = 0u64 as i64;
        if t.is_multiple_of(hi) {
            v += hi as i64;
        }
        if t.is_multiple_of(lo) {
            v -= lo as i64;
        }
        Complex::from(T::from_f64_lossy(v as f64))
    }))
}

/// `f_K = Σ_{k≤K} a_k / α_k^{1/2}` as a step function.
pub fn build_counterexample<T: Scalar>(spec: &CounterexampleSpec) -> StepFunction<T> {
    let sys = spec.sys();
    let mut acc = StepFunction::zeros(sys);
    for &alpha in spec.alphas() {
        let atom = counterexample_atom::<T>(alpha, sys).expect("validated by spec");
        let weight = T::from_f64_lossy((alpha as f64).sqrt().recip());
        for (dst, v) in acc.values_mut().iter_mut().zip(atom.values()) {
            *dst += *v * weight;
        }
    }
    acc
}

/// The block-constant coefficient vector `f̂(j) = α_k^{-1/2}` on
/// `[M_{α_k}, M_{α_k+1})`, zero elsewhere.
pub fn counterexample_coefficients<T: Scalar>(spec: &CounterexampleSpec) -> SpectralVector<T> {
    let mut c = SpectralVector::zeros(spec.sys());
    for (k, &alpha) in spec.alphas().iter().enumerate() {
        let (lo, hi) = spec.block(k);
        let w = Complex::from(T::from_f64_lossy((alpha as f64).sqrt().recip()));
        for v in &mut c.coeffs_mut()[lo as usize..hi as usize] {
            *v = w;
        }
    }
    c
}

/// `S_j f = III_1 + III_2` for `j` in the coefficient block of term `k`:
/// `III_1 = S_{M_{α_k}} f` and `III_2 = α_k^{-1/2} ψ_{M_{α_k}} D_{j − M_{α_k}}`.
#[derive(Clone, Debug)]
pub struct PartialSumDecomposition<T> {
    pub term: usize,
    pub alpha: u32,
    pub iii1: StepFunction<T>,
    pub iii2: StepFunction<T>,
}

impl<T: Scalar> PartialSumDecomposition<T> {
    pub fn sum(&self) -> StepFunction<T> {
        self.iii1.add(&self.iii2).expect("same system")
    }
}

pub fn partial_sum_decomposition<T: Scalar>(
    spec: &CounterexampleSpec,
    coeffs: &SpectralVector<T>,
    j: u64,
) -> Result<PartialSumDecomposition<T>> {
    if coeffs.sys() != spec.sys() {
        return Err(Error::SystemMismatch);
    }
    let term = spec
        .block_of(j)
        .ok_or_else(|| Error::InvalidArgument(format!("j = {j} lies in no coefficient block")))?;
    let alpha = spec.alphas()[term];
    let (lo, _) = spec.block(term);
    let sys = spec.sys();
    let iii1 = partial_sum(coeffs, lo)?;
    let weight = Complex::from(T::from_f64_lossy((alpha as f64).sqrt().recip()));
    let iii2 = character::<T>(lo, sys)?
        .mul(&dirichlet_kernel(j - lo, sys)?)?
        .scale(weight);
    Ok(PartialSumDecomposition {
        term,
        alpha,
        iii1,
        iii2,
    })
}

/// `α_k^{-1/2} L_{j − M_{α_k}}`, the predicted `‖III_2‖_1` (zero when
/// `j = M_{α_k}`).
pub fn predicted_iii2_norm(spec: &CounterexampleSpec, j: u64) -> Result<f64> {
    let term = spec
        .block_of(j)
        .ok_or_else(|| Error::InvalidArgument(format!("j = {j} lies in no coefficient block")))?;
    let (lo, _) = spec.block(term);
    if j == lo {
        return Ok(0.0);
    }
    let alpha = spec.alphas()[term] as f64;
    Ok(lebesgue_constant::<f64>(j - lo, spec.sys())? / alpha.sqrt())
}

/// Evaluates `eval(l, S_l f)` for every `l` in `from..=to`. Each chunk of
/// [`SCAN_CHUNK`] indices restarts from an inverse-transform checkpoint and
/// advances with `S_{l+1} = S_l + f̂(l) ψ_l`.
pub fn scan_partial_sums<T, F>(
    coeffs: &SpectralVector<T>,
    from: u64,
    to: u64,
    eval: F,
) -> Result<Vec<T>>
where
    T: Scalar,
    F: Fn(u64, &StepFunction<T>) -> T + Sync,
{
    let order = coeffs.sys().order();
    if to > order {
        return Err(out_of_range("n", to, order));
    }
    if from > to {
        return Ok(Vec::new());
    }
    let starts: Vec<u64> = (from..=to).step_by(SCAN_CHUNK as usize).collect();
    let chunks = starts
        .into_par_iter()
        .map(|lo| {
            let hi = (lo + SCAN_CHUNK - 1).min(to);
            let mut sums = PartialSums::starting_at(coeffs, lo)?;
            let mut out = Vec::with_capacity((hi - lo + 1) as usize);
            out.push(eval(lo, sums.current()));
            for l in lo + 1..=hi {
                let s = sums.advance().expect("l ≤ M_N");
                out.push(eval(l, s));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// `(1/n) Σ_{m=1}^{n} ‖S_m f‖_1`.
pub fn strong_sum_average<T: Scalar>(coeffs: &SpectralVector<T>, n: u64) -> Result<T> {
    if n == 0 || n > coeffs.sys().order() {
        return Err(out_of_range("n", n, coeffs.sys().order()));
    }
    let norms = scan_partial_sums(coeffs, 1, n, |_, s| l1_norm(s))?;
    Ok(norms.into_iter().sum::<T>() / T::from_u64_exact(n))
}

/// `B = (1/M_{α+1}) Σ_{M_α ≤ l ≤ 2M_α} ‖S_l f‖_1`.
pub fn window_average<T: Scalar>(coeffs: &SpectralVector<T>, alpha: u32) -> Result<T> {
    let sys = coeffs.sys();
    let a = alpha as usize;
    if a + 1 > sys.depth() {
        return Err(Error::DepthInsufficient {
            depth: sys.depth(),
            needed: a + 1,
        });
    }
    let lo = sys.product(a);
    let norms = scan_partial_sums(coeffs, lo, 2 * lo, |_, s| l1_norm(s))?;
    Ok(norms.into_iter().sum::<T>() / T::from_u64_exact(sys.product(a + 1)))
}

/// Logarithmic means of partial-sum norms at `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GatAverages {
    /// `(1/ln n) Σ_{k=1}^{n} ‖S_k f − f‖_1 / k`.
    pub convergence: f64,
    /// `(1/ln n) Σ_{k=1}^{n} ‖S_k f‖_1 / k`.
    pub bounded: f64,
}

pub fn gat_log_average<T: Scalar>(coeffs: &SpectralVector<T>, n: u64) -> Result<GatAverages> {
    gat_log_averages(coeffs, &[n]).map(|v| v[0])
}

/// [`gat_log_average`] at several `n` sharing one partial-sum scan.
pub fn gat_log_averages<T: Scalar>(
    coeffs: &SpectralVector<T>,
    ns: &[u64],
) -> Result<Vec<GatAverages>> {
    let order = coeffs.sys().order();
    for &n in ns {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "logarithmic mean needs n ≥ 2, got {n}"
            )));
        }
        if n > order {
            return Err(out_of_range("n", n, order));
        }
    }
    let Some(&max_n) = ns.iter().max() else {
        return Ok(Vec::new());
    };
    let f = inverse(coeffs);
    let pairs = scan_partial_sums(coeffs, 1, max_n, |k, s| {
        l1_norm(&s.sub(&f).expect("same system")) / T::from_u64_exact(k)
    })?;
    let plain = scan_partial_sums(coeffs, 1, max_n, |k, s| l1_norm(s) / T::from_u64_exact(k))?;
    let mut conv_prefix = Vec::with_capacity(pairs.len());
    let mut plain_prefix = Vec::with_capacity(plain.len());
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for (x, y) in pairs.iter().zip(&plain) {
        a += x.to_f64_lossy();
        b += y.to_f64_lossy();
        conv_prefix.push(a);
        plain_prefix.push(b);
    }
    Ok(ns
        .iter()
        .map(|&n| {
            let log = (n as f64).ln();
            GatAverages {
                convergence: conv_prefix[(n - 1) as usize] / log,
                bounded: plain_prefix[(n - 1) as usize] / log,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FejerReport {
    /// `max_{1≤n≤n_max} ‖σ_n f‖_1`.
    pub sup_norm: f64,
    pub argmax: u64,
    pub h1_norm: f64,
    /// `sup_norm / h1_norm` (zero for `f = 0`).
    pub ratio: f64,
}

/// `‖σ_n f‖_1` for `n = 1..=n_max`, using `n σ_n = Σ_{k<n} S_k` per chunk.
pub fn fejer_norms<T: Scalar>(coeffs: &SpectralVector<T>, n_max: u64) -> Result<Vec<T>> {
    let sys = coeffs.sys();
    if n_max > sys.order() {
        return Err(out_of_range("n_max", n_max, sys.order()));
    }
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let starts: Vec<u64> = (1..=n_max).step_by(SCAN_CHUNK as usize).collect();
    let chunks = starts
        .into_par_iter()
        .map(|lo| {
            let hi = (lo + SCAN_CHUNK - 1).min(n_max);
            // running = Σ_{k<lo} S_k = lo σ_lo; sums holds S_lo.
            let lo_t = T::from_u64_exact(lo);
            let mut running: Vec<Complex<T>> = fejer_mean(coeffs, lo)?
                .into_values()
                .into_iter()
                .map(|v| v * lo_t)
                .collect();
            let mut sums = PartialSums::starting_at(coeffs, lo)?;
            let mut out = Vec::with_capacity((hi - lo + 1) as usize);
            let mut n = lo;
            loop {
                let inv = T::from_u64_exact(n).recip();
                let norm = running.iter().map(|v| v.norm()).sum::<T>() * inv
                    / T::from_u64_exact(sys.order());
                out.push(norm);
                if n == hi {
                    break;
                }
                for (r, s) in running.iter_mut().zip(sums.current().values()) {
                    *r += *s;
                }
                sums.advance();
                n += 1;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

pub fn fejer_maximal_check<T: Scalar>(
    coeffs: &SpectralVector<T>,
    n_max: u64,
) -> Result<FejerReport> {
    let norms = fejer_norms(coeffs, n_max)?;
    let (argmax, sup) = norms
        .iter()
        .enumerate()
        .fold((0u64, 0.0f64), |(best_n, best), (i, v)| {
            let v = v.to_f64_lossy();
            if v > best {
                (i as u64 + 1, v)
            } else {
                (best_n, best)
            }
        });
    let h1 = h1_norm(&inverse(coeffs)).to_f64_lossy();
    Ok(FejerReport {
        sup_norm: sup,
        argmax,
        h1_norm: h1,
        ratio: if h1.is_zero() { 0.0 } else { sup / h1 },
    })
}

/// One term of the divergence experiment on `f_K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub k: usize,
    pub alpha: u32,
    pub m_alpha: u64,
    /// `B_k = (1/M_{α_k+1}) Σ_{M_{α_k} ≤ l ≤ 2M_{α_k}} ‖S_l f_K‖_1`.
    pub window_average: f64,
    pub sqrt_alpha: f64,
    /// `B_k / α_k^{1/2}`.
    pub ratio: f64,
    /// `‖f_k‖_{H_1}` of the truncation to the first `k` terms.
    pub h1_norm_truncation: f64,
}

/// Window averages of `f_K` for each `k ≤ K`, with the `H_1` norm of every
/// truncation `f_k`.
pub fn divergence_profile(spec: &CounterexampleSpec) -> Result<Vec<DivergenceRow>> {
    let f = build_counterexample::<f64>(spec);
    let coeffs = crate::spectral::forward_fast(&f);
    let sys = spec.sys();
    (0..spec.terms())
        .map(|k| {
            let alpha = spec.alphas()[k];
            let b = window_average(&coeffs, alpha)?;
            let fk = build_counterexample::<f64>(&spec.truncated(k + 1)?);
            let sqrt_alpha = (alpha as f64).sqrt();
            Ok(DivergenceRow {
                k: k + 1,
                alpha,
                m_alpha: sys.product(alpha as usize),
                window_average: b,
                sqrt_alpha,
                ratio: b / sqrt_alpha,
                h1_norm_truncation: h1_norm(&fk),
            })
        })
        .collect()
}
