//! Counter-based random number generation.
//!
//! Every random quantity in the laboratory is a pure function of
//! `(seed, stream, index)`. There is no generator state to advance, so
//! results are identical no matter in which order (or on how many threads)
//! samples are drawn. The mixer is splitmix64, applied to the seed, a
//! stream id and a counter.

use num_complex::Complex64;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64 mixed bits for the triple `(seed, stream, index)`.
#[inline]
pub fn bits(seed: u64, stream: u64, index: u64) -> u64 {
    let a = mix(seed ^ GOLDEN.wrapping_mul(stream.wrapping_add(1)));
    mix(a ^ GOLDEN.wrapping_mul(index.wrapping_add(0x243f_6a88_85a3_08d3)))
}

/// A Rademacher sign in `{-1.0, +1.0}`.
#[inline]
pub fn sign(seed: u64, stream: u64, index: u64) -> f64 {
    if bits(seed, stream, index) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Uniform in `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform(seed: u64, stream: u64, index: u64) -> f64 {
    (bits(seed, stream, index) >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Uniform in `[lo, hi)`.
#[inline]
pub fn uniform_in(seed: u64, stream: u64, index: u64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(seed, stream, index)
}

/// Uniform integer in `[0, n)`.
#[inline]
pub fn index(seed: u64, stream: u64, idx: u64, n: usize) -> usize {
    debug_assert!(n > 0);
    (uniform(seed, stream, idx) * n as f64) as usize % n
}

/// Standard complex Gaussian (unit variance overall) via Box-Muller.
pub fn complex_gaussian(seed: u64, stream: u64, index: u64) -> Complex64 {
    let u1 = uniform(seed, stream, index.wrapping_mul(2)).max(f64::MIN_POSITIVE);
    let u2 = uniform(seed, stream, index.wrapping_mul(2).wrapping_add(1));
    let r = (-u1.ln()).sqrt();
    let arg = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * arg.cos(), r * arg.sin())
}

/// Uniform point of the complex disk of the given radius.
pub fn complex_in_disk(seed: u64, stream: u64, index: u64, radius: f64) -> Complex64 {
    let r = radius * uniform(seed, stream, index.wrapping_mul(2)).sqrt();
    let arg = 2.0 * std::f64::consts::PI * uniform(seed, stream, index.wrapping_mul(2).wrapping_add(1));
    Complex64::new(r * arg.cos(), r * arg.sin())
}

/// Steinhaus variable: a uniform point of the unit circle.
pub fn steinhaus(seed: u64, stream: u64, index: u64) -> Complex64 {
    let arg = 2.0 * std::f64::consts::PI * uniform(seed, stream, index);
    Complex64::new(arg.cos(), arg.sin())
}
