//! Exact computational harmonic analysis on bounded Vilenkin groups.
//!
//! A bounded Vilenkin group is truncated at a finite depth `N`; every function
//! is then a step function on the `M_N` rank-`N` cylinders, and every quantity
//! the analysis needs (Fourier coefficients, partial sums, Dirichlet kernels,
//! Lebesgue constants, martingale maximal functions) becomes a finite
//! computation.
//!
//! The numeric layer is generic over the scalar type through [`Scalar`]
//! (implemented for `f32` and `f64`); exact quantities such as cylinder
//! measures and digit-variation averages are returned as rationals.
//!
//! Modules:
//! - [`group`]: mixed-radix number system, digits, group law, cylinder measure.
//! - [`spectral`]: characters, transforms, Dirichlet kernels, partial sums, Fejér means.
//! - [`norms`]: `L_p` norms, Lebesgue constants, variation functions `v`, `v*`.
//! - [`hardy`]: maximal function, `H_1` norm, and the divergence counterexample.
//! - [`io`]: JSON interchange for step functions and spectral vectors.
//! - [`corpus`]: seeded random step functions.

pub mod corpus;
pub mod error;
pub mod group;
pub mod hardy;
pub mod io;
pub mod norms;
mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use group::{CellIndex, RadixSystem, VilenkinIndex};
pub use scalar::Scalar;
pub use spectral::{SpectralVector, StepFunction};

/// Exact rational used for cylinder measures and variation averages.
pub type Rational = num_rational::Ratio<u64>;

pub type Complex<T> = num_complex::Complex<T>;
pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

pub type StepFunction64 = StepFunction<f64>;
pub type StepFunction32 = StepFunction<f32>;
pub type SpectralVector64 = SpectralVector<f64>;
pub type SpectralVector32 = SpectralVector<f32>;
