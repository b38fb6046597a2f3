//! Vilenkin characters and the operators built from them.
//!
//! `ψ_n(x) = Π_k r_k(x)^{n_k}` with `r_k(x) = exp(2πi x_k / m_k)`. Every
//! character value is a product of entries of per-level root-of-unity tables,
//! so no transcendental function is evaluated after table construction.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{out_of_range, Error, Result};
use crate::group::{CellIndex, RadixSystem, VilenkinIndex};
use crate::Scalar;

/// `exp(2πi j / m_k)` for every level `k` and `j < m_k`.
#[derive(Clone, Debug)]
pub struct RootTable<T> {
    levels: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> RootTable<T> {
    pub fn new(sys: &RadixSystem) -> Self {
        let levels = sys.radices().iter().map(|&m| roots_of_unity(m)).collect();
        Self { levels }
    }

    /// `exp(2πi j / m_k)`; `j` is reduced mod `m_k`.
    #[inline]
    pub fn root(&self, level: usize, j: u64) -> Complex<T> {
        let row = &self.levels[level];
        row[(j % row.len() as u64) as usize]
    }

    pub fn level(&self, level: usize) -> &[Complex<T>] {
        &self.levels[level]
    }
}

fn roots_of_unity<T: Scalar>(m: u32) -> Vec<Complex<T>> {
    let m = m as u64;
    (0..m)
        .map(|j| {
            // Quarter turns are exact.
            let (re, im) = match (4 * j) % (4 * m) {
                0 => (1.0, 0.0),
                q if q == m => (0.0, 1.0),
                q if q == 2 * m => (-1.0, 0.0),
                q if q == 3 * m => (0.0, -1.0),
                _ => {
                    let angle = std::f64::consts::TAU * j as f64 / m as f64;
                    (angle.cos(), angle.sin())
                }
            };
            Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
        })
        .collect()
}

/// A complex function constant on rank-`N` cells, stored as `M_N` cell values.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction<T> {
    sys: RadixSystem,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> StepFunction<T> {
    pub fn new(sys: RadixSystem, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != sys.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} cell values, got {}",
                sys.len(),
                values.len()
            )));
        }
        Ok(Self { sys, values })
    }

    pub fn zeros(sys: &RadixSystem) -> Self {
        Self::constant(sys, Complex::zero())
    }

    pub fn constant(sys: &RadixSystem, c: Complex<T>) -> Self {
        Self {
            sys: sys.clone(),
            values: vec![c; sys.len()],
        }
    }

    /// Builds `f(t)` cell by cell.
    pub fn from_fn(sys: &RadixSystem, f: impl FnMut(usize) -> Complex<T>) -> Self {
        Self {
            sys: sys.clone(),
            values: (0..sys.len()).map(f).collect(),
        }
    }

    pub fn sys(&self) -> &RadixSystem {
        &self.sys
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    /// `∫ f dμ = (1/M_N) Σ_t f(t)`.
    pub fn integral(&self) -> Complex<T> {
        let sum: Complex<T> = self.values.iter().copied().sum();
        sum / T::from_u64_exact(self.sys.order())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.sys != other.sys {
            return Err(Error::SystemMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            sys: self.sys.clone(),
            values: self.values.iter().map(|&v| v * c).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
    ) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            sys: self.sys.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    /// `max_t |f(t) − g(t)|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same(other)?;
        Ok(max_abs_diff(&self.values, &other.values))
    }

    /// Re-expresses the function on a deeper system sharing the same leading
    /// radices (cell values are replicated).
    pub fn refine(&self, deeper: &RadixSystem) -> Result<Self> {
        if deeper.depth() < self.sys.depth()
            || deeper.radices()[..self.sys.depth()] != *self.sys.radices()
        {
            return Err(Error::SystemMismatch);
        }
        let coarse = self.sys.len();
        Ok(Self::from_fn(deeper, |t| self.values[t % coarse]))
    }
}

/// Fourier coefficients `f̂(k)`, `k < M_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVector<T> {
    sys: RadixSystem,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> SpectralVector<T> {
    pub fn new(sys: RadixSystem, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != sys.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                sys.len(),
                coeffs.len()
            )));
        }
        Ok(Self { sys, coeffs })
    }

    pub fn zeros(sys: &RadixSystem) -> Self {
        Self {
            sys: sys.clone(),
            coeffs: vec![Complex::zero(); sys.len()],
        }
    }

    /// Coefficient vector of `ψ_k`.
    pub fn unit(sys: &RadixSystem, k: u64) -> Result<Self> {
        if k >= sys.order() {
            return Err(out_of_range("k", k, sys.order()));
        }
        let mut c = Self::zeros(sys);
        c.coeffs[k as usize] = Complex::one();
        Ok(c)
    }

    pub fn sys(&self) -> &RadixSystem {
        &self.sys
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    /// `Σ |f̂(k)|²`.
    pub fn energy(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.sys != other.sys {
            return Err(Error::SystemMismatch);
        }
        Ok(max_abs_diff(&self.coeffs, &other.coeffs))
    }
}

pub(crate) fn max_abs_diff<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).norm())
        .fold(T::zero(), T::max)
}

/// Generalized Rademacher function `r_k(x) = exp(2πi x_k / m_k)`.
pub fn rademacher<T: Scalar>(k: usize, x: &CellIndex, sys: &RadixSystem) -> Result<Complex<T>> {
    if k >= sys.depth() {
        return Err(out_of_range("level", k as u64, sys.depth() as u64));
    }
    if x.coords().len() != sys.depth() {
        return Err(Error::SystemMismatch);
    }
    Ok(RootTable::new(sys).root(k, x.coord(k) as u64))
}

/// `ψ_n(x) = Π_k r_k(x)^{n_k}`.
pub fn vilenkin_char<T: Scalar>(
    n: &VilenkinIndex,
    x: &CellIndex,
    sys: &RadixSystem,
) -> Result<Complex<T>> {
    if n.digits().len() != sys.depth() || x.coords().len() != sys.depth() {
        return Err(Error::SystemMismatch);
    }
    let roots = RootTable::new(sys);
    Ok(char_value(&roots, n.digits(), x.coords()))
}

#[inline]
fn char_value<T: Scalar>(roots: &RootTable<T>, n: &[u32], x: &[u32]) -> Complex<T> {
    n.iter()
        .zip(x)
        .enumerate()
        .filter(|(_, (&d, &c))| d != 0 && c != 0)
        .fold(Complex::one(), |acc, (k, (&d, &c))| {
            acc * roots.root(k, d as u64 * c as u64)
        })
}

/// All cell values of `ψ_n`, built level by level as a tensor product.
pub fn character<T: Scalar>(n: u64, sys: &RadixSystem) -> Result<StepFunction<T>> {
    if n >= sys.order() {
        return Err(out_of_range("n", n, sys.order()));
    }
    let roots = RootTable::new(sys);
    let mut out = vec![Complex::zero(); sys.len()];
    fill_character(&roots, sys, n, &mut out);
    Ok(StepFunction {
        sys: sys.clone(),
        values: out,
    })
}

fn fill_character<T: Scalar>(
    roots: &RootTable<T>,
    sys: &RadixSystem,
    n: u64,
    out: &mut [Complex<T>],
) {
    out[0] = Complex::one();
    for k in 0..sys.depth() {
        let width = sys.product(k) as usize;
        let digit = sys.digit(n, k) as u64;
        for x in (1..sys.radix(k) as usize).rev() {
            let w = roots.root(k, digit * x as u64);
            let (low, high) = out.split_at_mut(x * width);
            for (dst, &src) in high[..width].iter_mut().zip(&low[..width]) {
                *dst = src * w;
            }
        }
    }
}

/// `f̂(k) = (1/M_N) Σ_t f(t) conj(ψ_k(t))`, straight from the definition.
/// Quadratic in `M_N`; the reference path for [`forward_fast`].
pub fn forward_naive<T: Scalar>(f: &StepFunction<T>) -> SpectralVector<T> {
    let sys = &f.sys;
    let roots = RootTable::new(sys);
    let scale = T::from_u64_exact(sys.order()).recip();
    let coeffs = (0..sys.order())
        .into_par_iter()
        .map_init(
            || vec![Complex::zero(); sys.len()],
            |psi, k| {
                fill_character(&roots, sys, k, psi);
                let s: Complex<T> = f
                    .values
                    .iter()
                    .zip(psi.iter())
                    .map(|(&v, p)| v * p.conj())
                    .sum();
                s * scale
            },
        )
        .collect();
    SpectralVector {
        sys: sys.clone(),
        coeffs,
    }
}

/// Forward transform by decimation in the mixed-radix digits: one length-`m_k`
/// DFT along every level. Cost `O(M_N Σ_k m_k)`.
pub fn forward_fast<T: Scalar>(f: &StepFunction<T>) -> SpectralVector<T> {
    let mut data = f.values.clone();
    transform_in_place(&f.sys, &mut data, true);
    let scale = T::from_u64_exact(f.sys.order()).recip();
    for v in &mut data {
        *v *= scale;
    }
    SpectralVector {
        sys: f.sys.clone(),
        coeffs: data,
    }
}

/// `Σ_k c_k ψ_k`, i.e. `S_{M_N}` of the coefficient vector.
pub fn inverse<T: Scalar>(c: &SpectralVector<T>) -> StepFunction<T> {
    let mut data = c.coeffs.clone();
    transform_in_place(&c.sys, &mut data, false);
    StepFunction {
        sys: c.sys.clone(),
        values: data,
    }
}

fn transform_in_place<T: Scalar>(sys: &RadixSystem, data: &mut [Complex<T>], conjugate: bool) {
    let roots = RootTable::new(sys);
    let max_m = sys.lambda() as usize;
    let mut input = vec![Complex::zero(); max_m];
    let mut output = vec![Complex::zero(); max_m];
    for k in 0..sys.depth() {
        let m = sys.radix(k) as usize;
        let stride = sys.product(k) as usize;
        let block = sys.product(k + 1) as usize;
        let row: Vec<Complex<T>> = roots
            .level(k)
            .iter()
            .map(|w| if conjugate { w.conj() } else { *w })
            .collect();
        for base in (0..data.len()).step_by(block) {
            for r in 0..stride {
                let start = base + r;
                for c in 0..m {
                    input[c] = data[start + c * stride];
                }
                for (j, out) in output[..m].iter_mut().enumerate() {
                    let mut acc = input[0];
                    for c in 1..m {
                        acc += input[c] * row[(j * c) % m];
                    }
                    *out = acc;
                }
                for c in 0..m {
                    data[start + c * stride] = output[c];
                }
            }
        }
    }
}

/// `S_n f = Σ_{k<n} f̂(k) ψ_k`, with `S_0 f = 0`.
pub fn partial_sum<T: Scalar>(c: &SpectralVector<T>, n: u64) -> Result<StepFunction<T>> {
    if n > c.sys.order() {
        return Err(out_of_range("n", n, c.sys.order()));
    }
    let mut truncated = c.clone();
    for v in &mut truncated.coeffs[n as usize..] {
        *v = Complex::zero();
    }
    Ok(inverse(&truncated))
}

/// Incremental evaluation of `S_0 f, S_1 f, …` via `S_{n+1} = S_n + f̂(n) ψ_n`.
pub struct PartialSums<'a, T> {
    coeffs: &'a SpectralVector<T>,
    roots: RootTable<T>,
    current: StepFunction<T>,
    next: u64,
    scratch: Vec<Complex<T>>,
}

impl<'a, T: Scalar> PartialSums<'a, T> {
    /// Starts at `S_0 f = 0`.
    pub fn new(coeffs: &'a SpectralVector<T>) -> Self {
        Self {
            roots: RootTable::new(&coeffs.sys),
            current: StepFunction::zeros(&coeffs.sys),
            next: 0,
            scratch: vec![Complex::zero(); coeffs.sys.len()],
            coeffs,
        }
    }

    /// Starts at the checkpoint `S_n f`, computed by one inverse transform.
    pub fn starting_at(coeffs: &'a SpectralVector<T>, n: u64) -> Result<Self> {
        let current = partial_sum(coeffs, n)?;
        Ok(Self {
            current,
            next: n,
            ..Self::new(coeffs)
        })
    }

    /// Index `n` of the partial sum currently held.
    pub fn index(&self) -> u64 {
        self.next
    }

    pub fn current(&self) -> &StepFunction<T> {
        &self.current
    }

    /// Advances from `S_n f` to `S_{n+1} f`; `None` once `n = M_N`.
    pub fn advance(&mut self) -> Option<&StepFunction<T>> {
        let sys = &self.coeffs.sys;
        if self.next >= sys.order() {
            return None;
        }
        let c = self.coeffs.coeffs[self.next as usize];
        if !c.is_zero() {
            fill_character(&self.roots, sys, self.next, &mut self.scratch);
            for (v, &p) in self.current.values.iter_mut().zip(&self.scratch) {
                *v += c * p;
            }
        }
        self.next += 1;
        Some(&self.current)
    }
}

/// `D_n = Σ_{k<n} ψ_k`, evaluated through the digit expansion of `n`:
/// `D_n = Σ_j ψ_{P_j} D_{M_j} Σ_{s<n_j} r_j^s` with `P_j = Σ_{i>j} n_i M_i`,
/// where `D_{M_j} = M_j` on `I_j` and vanishes off it. Cost `O(N M_N)`.
pub fn dirichlet_kernel<T: Scalar>(n: u64, sys: &RadixSystem) -> Result<StepFunction<T>> {
    if n > sys.order() {
        return Err(out_of_range("n", n, sys.order()));
    }
    if n == sys.order() {
        // D_{M_N} = M_N 1_{I_N}.
        let mut d = StepFunction::zeros(sys);
        d.values[0] = Complex::from(T::from_u64_exact(n));
        return Ok(d);
    }
    let depth = sys.depth();
    let roots = RootTable::new(sys);
    let mut digits = vec![0u32; depth];
    sys.digits_into(n, &mut digits);
    // geometric[j][x] = Σ_{s<n_j} exp(2πi s x / m_j)
    let geometric: Vec<Vec<Complex<T>>> = (0..depth)
        .map(|j| {
            let m = sys.radix(j) as u64;
            (0..m)
                .map(|x| {
                    (0..digits[j] as u64)
                        .map(|s| roots.root(j, s * x))
                        .sum::<Complex<T>>()
                })
                .collect()
        })
        .collect();
    let weights: Vec<T> = (0..depth)
        .map(|j| T::from_u64_exact(sys.product(j)))
        .collect();

    let values = (0..sys.len())
        .into_par_iter()
        .map_init(
            || vec![0u32; depth],
            |x, t| {
                sys.digits_into(t as u64, x);
                let first_nonzero = x.iter().position(|&c| c != 0).unwrap_or(depth);
                let mut phase: Complex<T> = Complex::one();
                let mut acc: Complex<T> = Complex::zero();
                for j in (0..depth).rev() {
                    if j <= first_nonzero && digits[j] != 0 {
                        acc += phase * geometric[j][x[j] as usize] * weights[j];
                    }
                    if digits[j] != 0 && x[j] != 0 {
                        phase *= roots.root(j, digits[j] as u64 * x[j] as u64);
                    }
                }
                acc
            },
        )
        .collect();
    Ok(StepFunction {
        sys: sys.clone(),
        values,
    })
}

/// `σ_n f = (1/n) Σ_{k<n} S_k f = Σ_{k<n} ((n − 1 − k)/n) f̂(k) ψ_k`.
pub fn fejer_mean<T: Scalar>(c: &SpectralVector<T>, n: u64) -> Result<StepFunction<T>> {
    check_fejer_index(c, n)?;
    let nn = T::from_u64_exact(n);
    let mut weighted = c.clone();
    for (k, v) in weighted.coeffs.iter_mut().enumerate() {
        let k = k as u64;
        *v = if k + 1 < n {
            *v * (T::from_u64_exact(n - 1 - k) / nn)
        } else {
            Complex::zero()
        };
    }
    Ok(inverse(&weighted))
}

/// `σ_n f = (1/n) Σ_{k<n} S_k f`, averaging the partial sums directly.
pub fn fejer_mean_direct<T: Scalar>(c: &SpectralVector<T>, n: u64) -> Result<StepFunction<T>> {
    check_fejer_index(c, n)?;
    let mut sums = PartialSums::new(c);
    let mut acc = vec![Complex::zero(); c.sys.len()];
    for _ in 0..n {
        for (a, v) in acc.iter_mut().zip(sums.current().values()) {
            *a += *v;
        }
        sums.advance();
    }
    let inv = T::from_u64_exact(n).recip();
    StepFunction::new(c.sys.clone(), acc.into_iter().map(|a| a * inv).collect())
}

fn check_fejer_index<T: Scalar>(c: &SpectralVector<T>, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("Fejér mean needs n ≥ 1".into()));
    }
    if n > c.sys.order() {
        return Err(out_of_range("n", n, c.sys.order()));
    }
    Ok(())
}
