//! Thin wrapper over `rustfft` with a thread-local plan cache.
//!
//! Conventions: `forward` computes `X[d] = Σ_j x[j] e(-jd/N)`, `inverse`
//! computes `X[j] = Σ_d x[d] e(+jd/N)`; neither is normalized.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn rustfft::Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn run(buf: &mut [Complex64], inverse: bool) {
    PLANS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        let plan = cache
            .entry((buf.len(), inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(buf.len())
                } else {
                    planner.plan_fft_forward(buf.len())
                }
            })
            .clone();
        plan.process(buf);
    });
}

/// In-place unnormalized forward transform.
pub fn forward(buf: &mut [Complex64]) {
    run(buf, false);
}

/// In-place unnormalized inverse transform.
pub fn inverse(buf: &mut [Complex64]) {
    run(buf, true);
}

/// Evaluates the trigonometric polynomial with coefficients `coeffs` on
/// frequencies `k_min..=k_min+coeffs.len()-1` at the `grid_size` points
/// `θ_j = j/grid_size`. Requires `grid_size >= coeffs.len()`.
pub fn eval_on_grid(coeffs: &[Complex64], k_min: i64, grid_size: usize) -> Vec<Complex64> {
    assert!(grid_size >= coeffs.len(), "grid too small for the window");
    let g = grid_size as i64;
    let mut buf = vec![Complex64::new(0.0, 0.0); grid_size];
    for (off, &c) in coeffs.iter().enumerate() {
        let k = k_min + off as i64;
        let slot = k.rem_euclid(g) as usize;
        buf[slot] += c;
    }
    inverse(&mut buf);
    buf
}
