//! Gauss-Legendre quadrature: fixed-order rules with nodes computed by
//! Newton iteration, composite adaptive integration by interval halving,
//! and a log-space variant for integrands spanning many orders of
//! magnitude.

use crate::error::{Result, RfError};
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rule32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

fn rule16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// 32-point Gauss-Legendre approximation of `∫_a^b f`.
pub fn fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule32();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in nodes.iter().zip(weights) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Adaptive composite Gauss-Legendre integration of `f` over `[a, b]`,
/// halving panels until the relative change drops below `rel_tol`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let mut panels = 1usize;
    let mut prev = composite(f, a, b, panels);
    for _ in 0..22 {
        panels *= 2;
        let cur = composite(f, a, b, panels);
        let scale = cur.abs().max(prev.abs()).max(f64::MIN_POSITIVE);
        if (cur - prev).abs() <= rel_tol * scale {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(RfError::Numeric(format!(
        "quadrature did not converge on [{a}, {b}]: last two panel counts {panels}/{} gave {prev:.17e}",
        panels / 2
    )))
}

fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        acc += fixed(f, a + i as f64 * h, a + (i + 1) as f64 * h);
    }
    acc
}

/// `log(Σ e^{x_i})` computed stably.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// Adaptive integration of a positive integrand given through its
/// logarithm: returns `log ∫_a^b exp(log_f)`. Interval halving continues
/// until the log-integral (equivalently, the relative value) is stable to
/// `log_tol`. Errors with a refinement trace if 2^22 panels do not settle.
pub fn adaptive_log<F: Fn(f64) -> f64>(log_f: &F, a: f64, b: f64, log_tol: f64) -> Result<f64> {
    let mut panels = 1usize;
    let mut prev = composite_log(log_f, a, b, panels);
    let mut trace = vec![(panels, prev)];
    for _ in 0..22 {
        panels *= 2;
        let cur = composite_log(log_f, a, b, panels);
        trace.push((panels, cur));
        if (cur - prev).abs() <= log_tol || (cur == f64::NEG_INFINITY && prev == f64::NEG_INFINITY)
        {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(RfError::Numeric(format!(
        "log-space quadrature did not converge on [{a}, {b}]; refinement trace: {trace:?}"
    )))
}

fn composite_log<F: Fn(f64) -> f64>(log_f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = rule16();
    let h = (b - a) / panels as f64;
    let mut terms = Vec::with_capacity(panels * nodes.len());
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let c = lo + 0.5 * h;
        let half = 0.5 * h;
        for (&x, &w) in nodes.iter().zip(weights) {
            terms.push((w * half).ln() + log_f(c + half * x));
        }
    }
    logsumexp(&terms)
}
