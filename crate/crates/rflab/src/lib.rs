//! A numerical laboratory for random trigonometric and Taylor series.
//!
//! The crate models the product space `Q = Ω × 𝕋` at desk scale: `Ω` is an
//! ensemble of `S` seeded ±1 sign rows, `𝕋` a uniform dyadic grid. On top of
//! that model it provides
//!
//! * moment estimators for linear and bilinear sign chaos and for the
//!   logarithm of unit-norm random trigonometric polynomials (`moments`),
//! * extremal sup/L² ratio checks for exponential polynomials and root
//!   machinery (`turan`),
//! * shift Gram matrices, approximate spectra and the localization
//!   certificate for functions with almost linearly dependent small shifts
//!   (`exploc`),
//! * the bilinear correlation operator of a set, white/black interval
//!   partitioning, local approximation with a certified pointwise error,
//!   set spreading, and a difference-inequality solver (`spreading`),
//! * zero counting for truncated random Taylor series by the argument
//!   principle and by root finding, plus the range experiment (`taylor`).
//!
//! Every operation is a pure function of its inputs and an explicit 64-bit
//! seed; repeated runs reproduce results bit for bit.

pub mod error;
pub mod exploc;
pub mod fft;
pub mod hermitian;
pub mod moments;
pub mod poly;
pub mod quad;
pub mod rng;
pub mod space;
pub mod spreading;
pub mod taylor;
pub mod turan;

pub mod cli;

pub use error::RfError;

/// `e(x) = exp(2πix)`, the standard character.
pub fn e(x: f64) -> num_complex::Complex64 {
    let arg = 2.0 * std::f64::consts::PI * x;
    num_complex::Complex64::new(arg.cos(), arg.sin())
}

/// Sum of a slice in pairwise order. Deterministic and considerably more
/// accurate than a running sum on long accumulations.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Pairwise sum of complex values.
pub fn pairwise_sum_c(xs: &[num_complex::Complex64]) -> num_complex::Complex64 {
    match xs.len() {
        0 => num_complex::Complex64::new(0.0, 0.0),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
        }
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}
