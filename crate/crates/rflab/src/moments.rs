//! Moment estimators and exact computations: linear and bilinear sign
//! chaos, logarithmic moments of unit-norm grid functions, distributional
//! ratios over subsets of `Q`, and the deterministic `sin^{2N}`
//! counterexample family.

use crate::error::{Result, RfError};
use crate::quad;
use crate::space::{CoefficientSeq, GridFunction, ProductSet, RandomConstant};
use crate::{pairwise_sum, rng};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;

/// A Monte Carlo (or exact) moment value with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct MomentEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples: usize,
    pub p: f64,
}

/// `(E|Σ_k ξ_k a_k|^p)^{1/p}`. Exact at `p = 2`; Monte Carlo above, with a
/// delta-method standard error.
pub fn khinchin_moment(
    coeffs: &CoefficientSeq,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if p < 2.0 {
        return Err(RfError::Argument(format!("p = {p} below the p >= 2 range")));
    }
    if p == 2.0 {
        return Ok(MomentEstimate {
            value: coeffs.norm_sqr().sqrt(),
            standard_error: 0.0,
            samples: 0,
            p,
        });
    }
    if samples < 100 {
        return Err(RfError::Argument(format!(
            "{samples} samples cannot support a p = {p} moment estimate; need at least 100"
        )));
    }
    let powers: Vec<f64> = (0..samples)
        .map(|s| {
            let x: Complex64 = coeffs
                .values
                .iter()
                .enumerate()
                .map(|(off, &a)| a * rng::sign(seed, s as u64, off as u64))
                .sum();
            x.norm().powf(p)
        })
        .collect();
    Ok(estimate_from_powers(&powers, p))
}

/// `(E|Σ_{k≠ℓ} a_{kℓ} ξ_k ξ_ℓ|^p)^{1/p}` for a zero-diagonal coefficient
/// matrix.
pub fn bilinear_moment(
    matrix: &[Vec<Complex64>],
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    let d = matrix.len();
    if d == 0 || matrix.iter().any(|r| r.len() != d) {
        return Err(RfError::Argument("coefficient matrix must be square".into()));
    }
    if (0..d).any(|k| matrix[k][k].norm() != 0.0) {
        return Err(RfError::Argument(
            "bilinear chaos requires an exactly zero diagonal".into(),
        ));
    }
    if p < 2.0 {
        return Err(RfError::Argument(format!("p = {p} below the p >= 2 range")));
    }
    if p > 2.0 && samples < 100 {
        return Err(RfError::Argument(format!(
            "{samples} samples cannot support a p = {p} moment estimate; need at least 100"
        )));
    }
    let powers: Vec<f64> = (0..samples)
        .map(|s| {
            let xi: Vec<f64> = (0..d).map(|k| rng::sign(seed, s as u64, k as u64)).collect();
            let mut x = Complex64::new(0.0, 0.0);
            for k in 0..d {
                let mut inner = Complex64::new(0.0, 0.0);
                for l in 0..d {
                    inner += matrix[k][l] * xi[l];
                }
                x += inner * xi[k];
            }
            x.norm().powf(p)
        })
        .collect();
    Ok(estimate_from_powers(&powers, p))
}

fn estimate_from_powers(powers: &[f64], p: f64) -> MomentEstimate {
    let n = powers.len() as f64;
    let mean = pairwise_sum(powers) / n;
    let centered: Vec<f64> = powers.iter().map(|&y| (y - mean) * (y - mean)).collect();
    let var = pairwise_sum(&centered) / (n - 1.0).max(1.0);
    let se_mean = (var / n).sqrt();
    let value = mean.powf(1.0 / p);
    // d/dm m^{1/p} = m^{1/p - 1}/p.
    let standard_error = if mean > 0.0 {
        se_mean * mean.powf(1.0 / p - 1.0) / p
    } else {
        0.0
    };
    MomentEstimate {
        value,
        standard_error,
        samples: powers.len(),
        p,
    }
}

/// Result of a logarithmic moment: the integral together with the count of
/// grid cells where `|f - b|` fell below the representable floor.
#[derive(Clone, Copy, Debug)]
pub struct LogMoment {
    pub estimate: MomentEstimate,
    pub flagged_cells: usize,
}

/// `∫_Q |log|f - b||^p dμ` over the discretized `Q`. Requires a unit-norm
/// `f` and `‖b‖_∞ < 1/20`. Cells with `|f - b| < 1e-300` are excluded from
/// the average and counted in `flagged_cells`.
pub fn log_moment(f: &GridFunction, b: &RandomConstant, p: f64) -> Result<LogMoment> {
    if p < 1.0 {
        return Err(RfError::Argument(format!("p = {p} below the p >= 1 range")));
    }
    let norm = f.norm_sqr().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(RfError::Precondition(format!(
            "log moments require a unit-norm function; got ‖f‖₂ = {norm}"
        )));
    }
    if b.values.len() != f.rows() {
        return Err(RfError::Argument("random constant row count mismatch".into()));
    }
    if b.sup_norm() >= 1.0 / 20.0 {
        return Err(RfError::Precondition(format!(
            "‖b‖_∞ = {} is not below 1/20",
            b.sup_norm()
        )));
    }
    let mut flagged = 0usize;
    let mut per_row = Vec::with_capacity(f.rows());
    for (i, row) in f.values.iter().enumerate() {
        let bi = b.values[i];
        let terms: Vec<f64> = row
            .iter()
            .filter_map(|&v| {
                let m = (v - bi).norm();
                if m < 1e-300 {
                    flagged += 1;
                    None
                } else {
                    Some(m.ln().abs().powf(p))
                }
            })
            .collect();
        per_row.push(pairwise_sum(&terms));
    }
    let cells = f.rows() * f.grid_size();
    let value = pairwise_sum(&per_row) / cells as f64;
    Ok(LogMoment {
        estimate: MomentEstimate {
            value,
            standard_error: 0.0,
            samples: cells - flagged,
            p,
        },
        flagged_cells: flagged,
    })
}

/// `(∫_Q |f|² dμ) / (∫_E |f - b|² dμ)`. A vanishing denominator is the
/// distinct infinite-ratio signal, not an overflow.
pub fn distributional_ratio(
    f: &GridFunction,
    e_set: &ProductSet,
    b: &RandomConstant,
) -> Result<f64> {
    if e_set.rows() != f.rows() || e_set.grid_log2 != f.grid_log2 {
        return Err(RfError::Argument("set shape does not match the function".into()));
    }
    if e_set.measure() <= 0.0 {
        return Err(RfError::Degenerate("set of measure zero".into()));
    }
    let fnorm = f.norm_sqr_grid();
    if b.sup_norm() >= fnorm.sqrt() / 20.0 {
        return Err(RfError::Precondition(format!(
            "‖b‖_∞ = {} is not below ‖f‖₂/20 = {}",
            b.sup_norm(),
            fnorm.sqrt() / 20.0
        )));
    }
    let mut per_row = Vec::with_capacity(f.rows());
    for (i, row) in f.values.iter().enumerate() {
        let bi = b.values[i];
        let terms: Vec<f64> = row
            .iter()
            .enumerate()
            .filter(|(j, _)| e_set.get(i, *j))
            .map(|(_, &v)| (v - bi).norm_sqr())
            .collect();
        per_row.push(pairwise_sum(&terms));
    }
    let denom = pairwise_sum(&per_row) / (f.rows() * f.grid_size()) as f64;
    if denom == 0.0 {
        return Err(RfError::InfiniteRatio(
            "∫_E |f-b|² vanished on the given set".into(),
        ));
    }
    Ok(fnorm / denom)
}

/// Exact binomial coefficient as a big integer.
pub fn binomial_exact(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `ln Γ(x)` by the Stirling series with upward recursion; adequate for
/// the integer arguments used here.
pub fn ln_gamma(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 12.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0
        - inv * inv2 * inv2 * inv2 / 1680.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series + shift
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Fourier coefficients of `sin(2πθ)^{2N}` on the window `[-2N, 2N]`:
/// `a_{2n} = (-1)^n binom(2N, N+n) / 4^N`, odd harmonics zero. Exact big
/// integers feed the values for `N ≤ 64`; log-gamma beyond.
pub fn counterexample_coeffs(n_param: u32) -> CoefficientSeq {
    let nn = n_param as i64;
    let two_n = 2 * n_param as u64;
    let width = (4 * nn + 1) as usize;
    let mut values = vec![Complex64::new(0.0, 0.0); width];
    for h in -nn..=nn {
        let sign = if h.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let k = (nn + h) as u64;
        let magnitude = if n_param <= 64 {
            // Division by 4^N is an exact exponent shift.
            let b = binomial_exact(two_n, k).to_f64().unwrap_or(f64::INFINITY);
            b * 2f64.powi(-2 * n_param as i32)
        } else {
            (ln_binomial(two_n, k) - 2.0 * n_param as f64 * 2f64.ln()).exp()
        };
        values[(2 * h + 2 * nn) as usize] = Complex64::new(sign * magnitude, 0.0);
    }
    CoefficientSeq::fourier(-2 * nn, values).expect("window is nonempty")
}

/// Summary of one counterexample evaluation.
#[derive(Clone, Copy, Debug)]
pub struct CounterexampleRecord {
    pub n_param: u32,
    pub c_param: f64,
    /// `μ(E_N) = 2^{-(2N+1)} · m(T_N)`.
    pub mu_en: f64,
    pub log_mu_en: f64,
    /// `∫_Q |f_N|² = binom(4N, 2N)/16^N`, exact.
    pub int_q: f64,
    /// `log ∫_{E_N} |f_N|²`, from log-space quadrature.
    pub log_int_en: f64,
    /// `∫_Q |f_N|² / ∫_{E_N} |f_N|²`; may overflow to +inf for large `N`.
    pub ratio: f64,
    pub log_ratio: f64,
}

/// Evaluates the counterexample at order `N`: the event that every sign is
/// `+1` crossed with the interval `T_N = [-e^{-CN}, e^{-CN}]`. All
/// integrals are deterministic; the `T_N` integral runs in log space.
pub fn counterexample_report(n_param: u32, c_param: f64) -> Result<CounterexampleRecord> {
    let two_pi = 2.0 * std::f64::consts::PI;
    if c_param <= two_pi.ln() {
        return Err(RfError::Precondition(format!(
            "C = {c_param} must exceed log(2π) = {:.6} for the smallness of g_N on T_N",
            two_pi.ln()
        )));
    }
    if n_param == 0 {
        return Err(RfError::Argument("counterexample order must be positive".into()));
    }
    let nf = n_param as f64;
    let half_len = (-c_param * nf).exp();
    let ln2 = 2f64.ln();

    // log ∫_{T_N} sin(2πθ)^{4N} dm: even integrand, log-space quadrature.
    let exponent = 4.0 * nf;
    let log_int_tn = ln2
        + quad::adaptive_log(
            &|theta: f64| exponent * (two_pi * theta).sin().abs().max(1e-320).ln(),
            0.0,
            half_len,
            1e-8,
        )?;

    let log_mu_en = -(2.0 * nf + 1.0) * ln2 + (2.0 * half_len).ln();
    let log_int_en = -(2.0 * nf + 1.0) * ln2 + log_int_tn;

    let (int_q, log_int_q) = if n_param <= 64 {
        let b = binomial_exact(4 * n_param as u64, 2 * n_param as u64)
            .to_f64()
            .unwrap_or(f64::INFINITY);
        let v = b * 2f64.powi(-4 * n_param as i32);
        (v, v.ln())
    } else {
        let lv = ln_binomial(4 * n_param as u64, 2 * n_param as u64) - 4.0 * nf * ln2;
        (lv.exp(), lv)
    };

    let log_ratio = log_int_q - log_int_en;
    Ok(CounterexampleRecord {
        n_param,
        c_param,
        mu_en: log_mu_en.exp(),
        log_mu_en,
        int_q,
        log_int_en,
        ratio: log_ratio.exp(),
        log_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{evaluate_grid, sample_sign_ensemble, SignEnsemble};
    use crate::{e, ls_slope};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn khinchin_exact_at_p_two() {
        let coeffs = CoefficientSeq::fourier(
            0,
            vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)],
        )
        .unwrap();
        let est = khinchin_moment(&coeffs, 2.0, 0, 1).unwrap();
        assert_eq!(est.value, 5.0);
        assert_eq!(est.standard_error, 0.0);
    }

    #[test]
    fn khinchin_single_term_is_one_for_every_p() {
        let coeffs = CoefficientSeq::fourier(0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        for p in [2.0, 4.0, 9.0] {
            let est = khinchin_moment(&coeffs, p, 500, 3).unwrap();
            assert!((est.value - 1.0).abs() < 1e-12, "p={p}: {}", est.value);
        }
    }

    #[test]
    fn khinchin_rejects_thin_sampling() {
        let coeffs = CoefficientSeq::fourier(0, vec![Complex64::new(1.0, 0.0); 4]).unwrap();
        assert!(khinchin_moment(&coeffs, 4.0, 50, 1).is_err());
        assert!(khinchin_moment(&coeffs, 1.5, 1000, 1).is_err());
    }

    #[test]
    fn khinchin_growth_slope_is_sub_half_power() {
        let dim = 16usize;
        let coeffs = CoefficientSeq::fourier(
            0,
            vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim],
        )
        .unwrap();
        let ps = [2.0, 4.0, 8.0, 16.0];
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        let mut prev: Option<MomentEstimate> = None;
        for &p in &ps {
            let est = khinchin_moment(&coeffs, p, 20_000, 7).unwrap();
            lx.push(p.ln());
            ly.push(est.value.ln());
            // Monotone within twice the combined standard error.
            if let Some(q) = prev {
                assert!(est.value >= q.value - 2.0 * (est.standard_error + q.standard_error));
            }
            prev = Some(est);
        }
        let slope = ls_slope(&lx, &ly);
        assert!(slope <= 0.65, "slope {slope}");
    }

    #[test]
    fn bilinear_single_entry_and_zero_matrix() {
        let mut m = vec![vec![Complex64::new(0.0, 0.0); 3]; 3];
        m[1][2] = Complex64::new(1.0, 0.0);
        let est = bilinear_moment(&m, 2.0, 400, 5).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);

        let z = vec![vec![Complex64::new(0.0, 0.0); 3]; 3];
        let est = bilinear_moment(&z, 4.0, 400, 5).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn bilinear_rejects_nonzero_diagonal() {
        let mut m = vec![vec![Complex64::new(0.0, 0.0); 2]; 2];
        m[0][0] = Complex64::new(0.5, 0.0);
        assert!(bilinear_moment(&m, 2.0, 400, 5).is_err());
    }

    #[test]
    fn log_moment_of_unimodular_function_vanishes() {
        let coeffs = CoefficientSeq::fourier(0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let signs = sample_sign_ensemble(3, 8, 0, 0).unwrap();
        let f = evaluate_grid(&coeffs, &signs, 5).unwrap();
        let lm = log_moment(&f, &RandomConstant::zero(8), 1.0).unwrap();
        assert!(lm.estimate.value < 1e-12);
        assert_eq!(lm.flagged_cells, 0);
    }

    #[test]
    fn log_moment_matches_scalar_quadrature_oracle() {
        // f = (φ_1 + φ_{-1})/√2: |f| = √2 |cos 2πθ| for every sign row.
        // Oracle computed by high-precision quadrature ahead of the build:
        //   ∫_𝕋 |log(√2 |cos 2πθ|)| dθ = 0.5831218080616376.
        let oracle = 0.5831218080616376;
        let inv = 1.0 / 2f64.sqrt();
        let coeffs = CoefficientSeq::fourier(
            -1,
            vec![
                Complex64::new(inv, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(inv, 0.0),
            ],
        )
        .unwrap();
        let signs = sample_sign_ensemble(11, 4, -1, 1).unwrap();
        let f = evaluate_grid(&coeffs, &signs, 12).unwrap();
        let lm = log_moment(&f, &RandomConstant::zero(4), 1.0).unwrap();
        // cos(2πθ) vanishes exactly at the grid nodes θ = 1/4, 3/4.
        assert_eq!(lm.flagged_cells, 2 * 4);
        assert!(
            (lm.estimate.value - oracle).abs() <= 5e-3,
            "grid value {} vs oracle {oracle}",
            lm.estimate.value
        );
    }

    #[test]
    fn log_moment_two_point_exact_value() {
        // Ensemble with exactly one +1 row and one -1 row; b ≡ 1/21.
        let signs = SignEnsemble::from_rows(0, vec![vec![1], vec![-1]]).unwrap();
        let coeffs = CoefficientSeq::fourier(0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let f = evaluate_grid(&coeffs, &signs, 4).unwrap();
        let b = RandomConstant::constant(2, Complex64::new(1.0 / 21.0, 0.0));
        let lm = log_moment(&f, &b, 1.0).unwrap();
        let want = 0.04765508990216243; // (log(21/20) + log(22/21))/2
        assert!((lm.estimate.value - want).abs() < 1e-13);
    }

    #[test]
    fn log_moment_rejects_large_b() {
        let coeffs = CoefficientSeq::fourier(0, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let signs = sample_sign_ensemble(3, 4, 0, 0).unwrap();
        let f = evaluate_grid(&coeffs, &signs, 4).unwrap();
        let b = RandomConstant::constant(4, Complex64::new(0.06, 0.0));
        assert!(log_moment(&f, &b, 1.0).is_err());
    }

    #[test]
    fn log_moment_power_mean_monotonicity() {
        let dim = 9usize;
        let norm = 1.0 / (dim as f64).sqrt();
        let coeffs = CoefficientSeq::fourier(-4, vec![Complex64::new(norm, 0.0); dim]).unwrap();
        let signs = sample_sign_ensemble(17, 8, -4, 4).unwrap();
        let f = evaluate_grid(&coeffs, &signs, 8).unwrap();
        let b = RandomConstant::sample_disk(23, 8, 0.04);
        let mut prev = 0.0f64;
        for p in [1.0, 2.0, 3.0] {
            let lm = log_moment(&f, &b, p).unwrap();
            let root = lm.estimate.value.powf(1.0 / p);
            assert!(root + 1e-6 >= prev, "power mean dropped at p={p}");
            prev = root;
        }
    }

    #[test]
    fn ratio_is_one_on_the_full_set() {
        let coeffs = CoefficientSeq::fourier(
            -2,
            (0..5).map(|i| Complex64::new(0.1 * (i + 1) as f64, 0.0)).collect(),
        )
        .unwrap();
        let signs = sample_sign_ensemble(31, 6, -2, 2).unwrap();
        let f = evaluate_grid(&coeffs, &signs, 5).unwrap();
        let q = ProductSet::full(6, 5);
        let r = distributional_ratio(&f, &q, &RandomConstant::zero(6)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_at_least_one_for_zero_b_subsets() {
        let coeffs = CoefficientSeq::fourier(
            -3,
            (0..7).map(|i| Complex64::new((i as f64 * 0.9).sin(), 0.2)).collect(),
        )
        .unwrap();
        let signs = sample_sign_ensemble(37, 4, -3, 3).unwrap();
        let f = evaluate_grid(&coeffs, &signs, 6).unwrap();
        for seed in 0..10u64 {
            let e_set = ProductSet::random(seed, 4, 6, 0.5);
            if e_set.measure() == 0.0 {
                continue;
            }
            let r = distributional_ratio(&f, &e_set, &RandomConstant::zero(4)).unwrap();
            assert!(r >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn infinite_ratio_is_signalled() {
        let g = 16usize;
        let mut vals = vec![vec![Complex64::new(0.0, 0.0); g]; 1];
        vals[0][5] = Complex64::new(1.0, 0.0);
        let f = GridFunction::from_values(vals, 4).unwrap();
        let mut e_set = ProductSet::empty(1, 4);
        e_set.set(0, 0, true);
        let err = distributional_ratio(&f, &e_set, &RandomConstant::zero(1)).unwrap_err();
        assert!(matches!(err, RfError::InfiniteRatio(_)));
    }

    #[test]
    fn counterexample_coefficients_small_orders() {
        let c0 = counterexample_coeffs(0);
        assert_eq!(c0.values.len(), 1);
        assert!((c0.values[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let c1 = counterexample_coeffs(1);
        // Window [-2, 2]: (-1/4, 0, 1/2, 0, -1/4).
        assert_eq!(c1.k_min, -2);
        let want = [-0.25, 0.0, 0.5, 0.0, -0.25];
        for (v, w) in c1.values.iter().zip(want) {
            assert!((v.re - w).abs() < 1e-15 && v.im == 0.0);
        }
        assert!((c1.norm_sqr() - 3.0 / 8.0).abs() < 1e-15);
    }

    /// Exact-rational coefficients of sin^{2N} for the convolution oracle.
    fn rational_coeffs(n_param: u32) -> Vec<BigRational> {
        let nn = n_param as i64;
        let four_n = BigInt::from(4u32).pow(n_param);
        let mut out = vec![BigRational::from(BigInt::from(0)); (4 * n_param + 1) as usize];
        for h in -nn..=nn {
            let b = binomial_exact(2 * n_param as u64, (nn + h) as u64);
            let signed = if h.rem_euclid(2) == 0 {
                BigInt::from(b)
            } else {
                -BigInt::from(b)
            };
            out[(2 * h + 2 * nn) as usize] = BigRational::new(signed, four_n.clone());
        }
        out
    }

    #[test]
    fn convolution_square_reproduces_doubled_order() {
        // sin^{2N} · sin^{2N} = sin^{4N}: the coefficient convolution must
        // equal the order-2N family exactly, in rational arithmetic.
        for n_param in 1..=8u32 {
            let a = rational_coeffs(n_param);
            let b = rational_coeffs(2 * n_param);
            let mut conv = vec![BigRational::from(BigInt::from(0)); 2 * a.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in a.iter().enumerate() {
                    conv[i + j] += x * y;
                }
            }
            assert_eq!(conv.len(), b.len());
            for (c, want) in conv.iter().zip(&b) {
                assert_eq!(c, want, "N = {n_param}");
            }
            // And the f64 family agrees with the rationals to 1e-12.
            let float = counterexample_coeffs(n_param);
            for (v, r) in float.values.iter().zip(&a) {
                let rf = r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap();
                assert!((v.re - rf).abs() <= 1e-12 * rf.abs().max(1e-12));
            }
        }
    }

    #[test]
    fn counterexample_norm_identity() {
        // Σ a² = binom(4N, 2N)/16^N.
        for n_param in [1u32, 4, 16, 64] {
            let coeffs = counterexample_coeffs(n_param);
            let want = binomial_exact(4 * n_param as u64, 2 * n_param as u64)
                .to_f64()
                .unwrap()
                * 2f64.powi(-4 * n_param as i32);
            assert!((coeffs.norm_sqr() - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn counterexample_value_at_quarter_is_one() {
        // sin(π/2)^{2N} = 1 with all-plus signs.
        for n_param in [1u32, 3, 8] {
            let coeffs = counterexample_coeffs(n_param);
            let signs = SignEnsemble::all_plus(coeffs.k_min, coeffs.k_max());
            let mut m = 4u32;
            while (1i64 << m) <= 4 * n_param as i64 {
                m += 1;
            }
            let f = evaluate_grid(&coeffs, &signs, m).unwrap();
            let quarter = (1usize << m) / 4;
            assert!((f.values[0][quarter] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn report_matches_plain_quadrature_at_small_order() {
        let rec = counterexample_report(1, 2.0).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let t = (-2.0f64).exp();
        let plain = 2.0
            * crate::quad::adaptive(&|th: f64| (two_pi * th).sin().powi(4), 0.0, t, 1e-10)
                .unwrap();
        let log_direct = -3.0 * 2f64.ln() + plain.ln();
        assert!((rec.log_int_en - log_direct).abs() < 1e-6);
        assert!(rec.ratio >= 1.0);
        assert!((rec.mu_en - 2f64.powi(-3) * 2.0 * t).abs() < 1e-15);
    }

    #[test]
    fn report_lower_bounds_and_growth() {
        let c_param = 2.5;
        for n_param in [4u32, 8, 16, 32] {
            let rec = counterexample_report(n_param, c_param).unwrap();
            let nf = n_param as f64;
            // μ(E_N) ≥ 2^{-(2N+1)} e^{-CN}.
            let floor = -(2.0 * nf + 1.0) * 2f64.ln() - c_param * nf;
            assert!(rec.log_mu_en >= floor);
            // ∫_Q ≥ c/N via the exact binomial.
            assert!(rec.int_q >= 0.35 / nf);
            // Quadratic growth of the log-ratio.
            assert!(rec.log_ratio / (nf * nf) >= 0.1);
        }
    }

    #[test]
    fn report_slope_is_at_least_quadratic() {
        let c_param = 2.5;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for n_param in [4u32, 8, 16, 32] {
            let rec = counterexample_report(n_param, c_param).unwrap();
            xs.push((2f64.ln() - rec.log_mu_en).ln());
            ys.push(rec.log_ratio.ln());
        }
        let slope = ls_slope(&xs, &ys);
        assert!(slope >= 1.7, "slope {slope}");
    }

    #[test]
    fn report_rejects_small_c() {
        assert!(counterexample_report(4, 1.0).is_err());
    }

    #[test]
    fn deterministic_grid_ratio_grows_like_exp_quadratic() {
        // Counterexample inputs at N = 8 on the boundary cells of the grid:
        // the two cells meeting θ = 0 realize the small-neighbourhood event
        // at grid resolution. Values are built pointwise in log space, so
        // no cancellation floor hides the decay of sin^{2N} near 0.
        let n_param = 8u32;
        let c_param = 2.5f64;
        let g_log2 = 12u32;
        let g = 1usize << g_log2;
        let two_pi = 2.0 * std::f64::consts::PI;
        let vals: Vec<Complex64> = (0..g)
            .map(|j| {
                let s = (two_pi * j as f64 / g as f64).sin();
                if s == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new((2.0 * n_param as f64 * s.abs().ln()).exp(), 0.0)
                }
            })
            .collect();
        let f = GridFunction::from_values(vec![vals], g_log2).unwrap();
        let mut e_set = ProductSet::empty(1, g_log2);
        e_set.set(0, 0, true);
        e_set.set(0, g - 1, true);
        let ratio = distributional_ratio(&f, &e_set, &RandomConstant::zero(1)).unwrap();
        // Derived from |sin 2πθ| ≤ 2π e^{-CN} on T_N: c = 2(C - log 2π).
        let c_derived = 2.0 * (c_param - two_pi.ln());
        assert!(
            ratio.ln() >= c_derived * (n_param * n_param) as f64,
            "log ratio {} below {}",
            ratio.ln(),
            c_derived * 64.0
        );
    }

    #[test]
    fn exact_binomials_and_lgamma_agree() {
        for (n, k) in [(10u64, 3u64), (64, 31), (128, 64), (200, 77)] {
            let exact = binomial_exact(n, k).to_f64().unwrap().ln();
            let viagamma = ln_binomial(n, k);
            assert!((exact - viagamma).abs() < 1e-9 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn character_consistency_of_counterexample() {
        // Direct check that Σ a_k e(kθ) = sin(2πθ)^{2N} at a few θ.
        let coeffs = counterexample_coeffs(3);
        for &theta in &[0.1, 0.37, 0.62] {
            let lhs: Complex64 = coeffs
                .values
                .iter()
                .enumerate()
                .map(|(off, &a)| a * e((coeffs.k_min + off as i64) as f64 * theta))
                .sum();
            let want = (2.0 * std::f64::consts::PI * theta).sin().powi(6);
            assert!((lhs - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
    }
}
