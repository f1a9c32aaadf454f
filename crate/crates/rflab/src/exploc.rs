//! Machinery for functions with almost linearly dependent small shifts:
//! shift Gram matrices and the localization error κ(t), certificates over a
//! shift range, the averaged root profile ρ²(m), approximate spectra with
//! the damping weight Θ, and the exact arithmetic-progression measure
//! bound used to pick good shift denominators.

use crate::error::{Result, RfError};
use crate::hermitian::{eigen_sorted_ascending, HermitianMatrix};
use crate::space::GridFunction;
use crate::{e, pairwise_sum};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Eigenvalues of a numerically singular Gram sit in the roundoff band
/// `~1e-16·trace`; anything below this relative floor is treated as an
/// exact linear dependence, so κ comes out as exactly zero there.
const RANK_FLOOR: f64 = 1e-13;

/// Shift Gram matrix at one shift step `t`.
#[derive(Clone, Debug)]
pub struct ShiftGram {
    pub t: f64,
    pub order: usize,
    pub matrix: HermitianMatrix,
}

/// Output of one Gram/κ computation.
#[derive(Clone, Debug)]
pub struct GramKappa {
    pub gram: ShiftGram,
    /// `κ(t) = min over unit coefficient vectors of ‖Σ a_k g_{kt}‖`.
    pub kappa: f64,
    /// The minimizing unit coefficient vector `a(t)`.
    pub coefficients: Vec<Complex64>,
}

/// Builds the `(n+1) × (n+1)` Gram of the shifts `g_{0·t}, …, g_{n·t}` from
/// the power spectrum (exact, spectral shifts) and extracts the smallest
/// eigenpair. The matrix is indexed so that the quadratic form of a
/// coefficient vector `a` is exactly `‖Σ_k a_k g_{kt}‖²`; its entries are
/// `M[j][k] = Σ_m W(m) e(m t (k - j))`.
pub fn gram_kappa(g: &GridFunction, t: f64, n: usize) -> Result<GramKappa> {
    if n < 1 {
        return Err(RfError::Argument("shift order must be at least 1".into()));
    }
    let norm = g.norm_sqr();
    if norm <= 0.0 {
        return Err(RfError::Degenerate("zero function has no shift structure".into()));
    }
    let spectrum = g.power_spectrum();
    let k_min = g.k_min;

    // c[d] = Σ_m W(m) e(m t d) for lag d = 0..=n.
    let lags: Vec<Complex64> = (0..=n)
        .map(|d| {
            spectrum
                .iter()
                .enumerate()
                .map(|(off, &w)| e((k_min + off as i64) as f64 * t * d as f64) * w)
                .sum()
        })
        .collect();

    let dim = n + 1;
    let mut m = HermitianMatrix::zero(dim);
    for j in 0..dim {
        for k in 0..dim {
            let v = if k >= j {
                lags[k - j]
            } else {
                lags[j - k].conj()
            };
            m.set(j, k, v);
        }
    }
    let pairs = eigen_sorted_ascending(&m)?;
    let smallest = &pairs[0];
    let trace = m.trace();
    let kappa_sqr = if smallest.value <= RANK_FLOOR * trace {
        0.0
    } else {
        smallest.value
    };
    let coefficients = smallest.vector.clone();

    // Independent evaluation of the combination norm through q_t.
    let direct = combination_norm_sqr(&spectrum, k_min, t, &coefficients);
    if (direct - smallest.value.max(0.0)).abs() > 1e-8 * trace.max(1.0) {
        return Err(RfError::Numeric(format!(
            "gram eigenpair inconsistent: direct ‖Σ a_k g_kt‖² = {direct:.3e}, eigenvalue = {:.3e}",
            smallest.value
        )));
    }
    Ok(GramKappa {
        gram: ShiftGram {
            t,
            order: n,
            matrix: m,
        },
        kappa: kappa_sqr.sqrt(),
        coefficients,
    })
}

/// `‖Σ_k a_k g_{kt}‖² = Σ_m W(m) |q_t(e(tm))|²` with `q_t(z) = Σ a_k z^k`.
pub fn combination_norm_sqr(
    spectrum: &[f64],
    k_min: i64,
    t: f64,
    coefficients: &[Complex64],
) -> f64 {
    let terms: Vec<f64> = spectrum
        .iter()
        .enumerate()
        .map(|(off, &w)| {
            let m = (k_min + off as i64) as f64;
            w * eval_shift_poly(coefficients, m * t).norm_sqr()
        })
        .collect();
    pairwise_sum(&terms)
}

/// `q(e(x)) = Σ_k a_k e(kx)`.
fn eval_shift_poly(coefficients: &[Complex64], x: f64) -> Complex64 {
    coefficients
        .iter()
        .enumerate()
        .map(|(k, &a)| a * e(k as f64 * x))
        .sum()
}

/// Per-node record of a localization certificate.
#[derive(Clone, Debug)]
pub struct CertificateNode {
    pub t: f64,
    pub kappa_t: f64,
    pub coefficients: Vec<Complex64>,
}

/// Localization certificate: κ over a sampled shift range.
#[derive(Clone, Debug)]
pub struct ExpLocCertificate {
    pub order: usize,
    pub tau: f64,
    /// `max over the sampled t ∈ (0, τ) of κ(t)`.
    pub kappa: f64,
    pub nodes: Vec<CertificateNode>,
}

/// Evaluates `gram_kappa` on the midpoints of `t_nodes` equal cells of
/// `(0, τ)`; the coefficient vectors are taken piecewise constant on the
/// cells.
pub fn exploc_certificate(
    g: &GridFunction,
    n: usize,
    tau: f64,
    t_nodes: usize,
) -> Result<ExpLocCertificate> {
    if t_nodes < 16 {
        return Err(RfError::Argument("need at least 16 shift nodes".into()));
    }
    if tau <= 0.0 {
        return Err(RfError::Argument("localization range must be positive".into()));
    }
    let mut nodes = Vec::with_capacity(t_nodes);
    let mut kappa: f64 = 0.0;
    for i in 0..t_nodes {
        let t = (i as f64 + 0.5) * tau / t_nodes as f64;
        let gk = gram_kappa(g, t, n)?;
        kappa = kappa.max(gk.kappa);
        nodes.push(CertificateNode {
            t,
            kappa_t: gk.kappa,
            coefficients: gk.coefficients,
        });
    }
    Ok(ExpLocCertificate {
        order: n,
        tau,
        kappa,
        nodes,
    })
}

/// The averaged squared profile `ρ²(m)` with its Parseval-weighted sum.
#[derive(Clone, Debug)]
pub struct RhoProfile {
    pub m_min: i64,
    pub rho_sqr: Vec<f64>,
    /// `Σ_m W(m) ρ²(m)`, which the certificate bounds by `κ²`.
    pub weighted_sum: f64,
    pub kappa_sqr: f64,
}

/// `ρ²(m) = (1/τ)∫_0^τ |q_t(e(tm))|² dt` with the certificate's piecewise
/// constant coefficients, evaluated by the midpoint rule on the
/// certificate cells.
pub fn rho_profile(
    g: &GridFunction,
    cert: &ExpLocCertificate,
    m_range: (i64, i64),
) -> Result<RhoProfile> {
    if m_range.1 < m_range.0 {
        return Err(RfError::Argument("empty frequency window".into()));
    }
    let spectrum = g.power_spectrum();
    let count = cert.nodes.len() as f64;
    let rho_sqr: Vec<f64> = (m_range.0..=m_range.1)
        .map(|m| {
            let terms: Vec<f64> = cert
                .nodes
                .iter()
                .map(|node| eval_shift_poly(&node.coefficients, m as f64 * node.t).norm_sqr())
                .collect();
            pairwise_sum(&terms) / count
        })
        .collect();

    // Weighted identity over the coefficient window of g.
    let weighted: Vec<f64> = spectrum
        .iter()
        .enumerate()
        .map(|(off, &w)| {
            let m = g.k_min + off as i64;
            if m >= m_range.0 && m <= m_range.1 {
                w * rho_sqr[(m - m_range.0) as usize]
            } else {
                let terms: Vec<f64> = cert
                    .nodes
                    .iter()
                    .map(|node| eval_shift_poly(&node.coefficients, m as f64 * node.t).norm_sqr())
                    .collect();
                w * (pairwise_sum(&terms) / count)
            }
        })
        .collect();
    Ok(RhoProfile {
        m_min: m_range.0,
        rho_sqr,
        weighted_sum: pairwise_sum(&weighted),
        kappa_sqr: cert.kappa * cert.kappa,
    })
}

/// `θ_τ(x) = min(1, τ|x|)`.
pub fn theta_tau(tau: f64, x: f64) -> f64 {
    (tau * x.abs()).min(1.0)
}

/// A set of distinct approximate frequencies with its damping scale.
#[derive(Clone, Debug)]
pub struct FrequencyWeight {
    pub frequencies: Vec<f64>,
    pub tau: f64,
}

impl FrequencyWeight {
    pub fn new(mut frequencies: Vec<f64>, tau: f64) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(RfError::Argument("need at least one frequency".into()));
        }
        frequencies.sort_by(f64::total_cmp);
        if frequencies.windows(2).any(|w| w[0] == w[1]) {
            return Err(RfError::Argument("frequencies must be distinct".into()));
        }
        Ok(Self { frequencies, tau })
    }

    /// `Θ_{τ,Λ}(m) = Π_λ θ_τ(m - λ)`.
    pub fn theta(&self, m: f64) -> f64 {
        self.frequencies
            .iter()
            .map(|&l| theta_tau(self.tau, m - l))
            .product()
    }
}

/// Result of the approximate-spectrum extraction.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub lambda: FrequencyWeight,
    /// `Σ_m W(m) Θ²_{τ,Λ}(m)` after refinement.
    pub residual: f64,
    /// The sublevel threshold applied to ρ²(m).
    pub threshold: f64,
    /// Covering intervals of the sublevel set (possibly empty).
    pub covering: Vec<(f64, f64)>,
    /// A shift denominator in `(τ/2, τ)` avoiding the inflated difference
    /// set of the covering, when the covering is nonempty.
    pub good_t0: Option<f64>,
}

/// Extracts `n` approximate frequencies: thresholds ρ²(m), covers the
/// sublevel set by at most `n` intervals of length `2δ/τ` (leftmost
/// first), seeds Λ with the interval centers (topping up from spectral
/// peaks), and refines Λ by coordinate descent on the damped residual.
///
/// The sublevel threshold is the theoretical level `(δ/A)^{2n}/(4(n+1))`
/// with `δ = 1/(8n(n+1))`, floored at 1e-10: double precision cannot
/// distinguish the theoretical level from an exact dependence, so below
/// the floor a profile value counts as vanished.
pub fn approximate_spectrum(
    g: &GridFunction,
    cert: &ExpLocCertificate,
    a_constant: f64,
) -> Result<SpectrumResult> {
    let n = cert.order;
    let tau = cert.tau;
    let delta = 1.0 / (8.0 * n as f64 * (n + 1) as f64);
    let margin = (1.0 / tau).ceil() as i64;
    let m_range = (g.k_min - margin, g.k_max() + margin);
    let profile = rho_profile(g, cert, m_range)?;

    let theoretical = (delta / a_constant).powi(2 * n as i32) / (4.0 * (n + 1) as f64);
    let threshold = theoretical.max(1e-10);
    let sublevel: Vec<i64> = (m_range.0..=m_range.1)
        .filter(|&m| profile.rho_sqr[(m - m_range.0) as usize] < threshold)
        .collect();

    // Greedy leftmost cover by intervals of length 2δ/τ.
    let cover_len = 2.0 * delta / tau;
    let mut covering: Vec<(f64, f64)> = Vec::new();
    let mut idx = 0usize;
    while idx < sublevel.len() {
        let start = sublevel[idx] as f64;
        covering.push((start, start + cover_len));
        while idx < sublevel.len() && (sublevel[idx] as f64) <= start + cover_len {
            idx += 1;
        }
    }
    if covering.len() > n {
        return Err(RfError::Numeric(format!(
            "sublevel set of ρ² needs {} intervals of length {cover_len:.6}, more than the order {n}: \
             the covering claim fails at A = {a_constant}",
            covering.len()
        )));
    }

    let good_t0 = if covering.is_empty() {
        None
    } else {
        Some(find_good_t0(&covering, delta, tau, cert.nodes.len().max(64))?)
    };

    // Seed Λ: covering centers, then the strongest spectral peaks.
    let spectrum = g.power_spectrum();
    let mut lambda: Vec<f64> = covering.iter().map(|&(a, b)| 0.5 * (a + b)).collect();
    let mut peaks: Vec<(f64, i64)> = spectrum
        .iter()
        .enumerate()
        .map(|(off, &w)| (w, g.k_min + off as i64))
        .collect();
    peaks.sort_by(|x, y| y.0.total_cmp(&x.0));
    for &(w, m) in &peaks {
        if lambda.len() >= n {
            break;
        }
        if w <= 0.0 {
            break;
        }
        if lambda.iter().all(|&l| (l - m as f64).abs() > 1e-9) {
            lambda.push(m as f64);
        }
    }
    // Degenerate spectra may still leave gaps; spread remaining slots.
    let mut fill = 0;
    while lambda.len() < n {
        let cand = m_range.0 as f64 + fill as f64;
        if lambda.iter().all(|&l| (l - cand).abs() > 1e-9) {
            lambda.push(cand);
        }
        fill += 1;
    }

    let residual_of = |freqs: &[f64]| -> f64 {
        let terms: Vec<f64> = spectrum
            .iter()
            .enumerate()
            .map(|(off, &w)| {
                let m = (g.k_min + off as i64) as f64;
                let theta: f64 = freqs.iter().map(|&l| theta_tau(tau, m - l)).product();
                w * theta * theta
            })
            .collect();
        pairwise_sum(&terms)
    };

    // Candidate positions: the τ/8 grid over the padded window plus every
    // integer frequency carrying spectral mass.
    let mut candidates: Vec<f64> = Vec::new();
    let lo = m_range.0 as f64;
    let hi = m_range.1 as f64;
    let step = tau / 8.0;
    let mut x = lo;
    while x <= hi {
        candidates.push(x);
        x += step;
    }
    for (off, &w) in spectrum.iter().enumerate() {
        if w > 0.0 {
            candidates.push((g.k_min + off as i64) as f64);
        }
    }

    let mut best = residual_of(&lambda);
    for _sweep in 0..20 {
        let mut improved = false;
        for slot in 0..lambda.len() {
            let mut local_best = best;
            let mut local_pos = lambda[slot];
            for &cand in &candidates {
                if lambda
                    .iter()
                    .enumerate()
                    .any(|(s, &l)| s != slot && (l - cand).abs() < 1e-12)
                {
                    continue;
                }
                let saved = lambda[slot];
                lambda[slot] = cand;
                let r = residual_of(&lambda);
                lambda[slot] = saved;
                if r < local_best {
                    local_best = r;
                    local_pos = cand;
                }
            }
            if local_best < best {
                best = local_best;
                lambda[slot] = local_pos;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }

    Ok(SpectrumResult {
        lambda: FrequencyWeight::new(lambda, tau)?,
        residual: best,
        threshold,
        covering,
        good_t0,
    })
}

/// Scans `(τ/2, τ)` for a node `t` such that no `k/t`, `k ∈ ℕ`, falls in
/// the difference set of the covering intervals inflated to twice their
/// length. Errors if no sampled node qualifies.
fn find_good_t0(covering: &[(f64, f64)], delta: f64, tau: f64, nodes: usize) -> Result<f64> {
    // Inflated intervals: same centers, length 4δ/τ.
    let inflated: Vec<(f64, f64)> = covering
        .iter()
        .map(|&(a, b)| {
            let c = 0.5 * (a + b);
            (c - 2.0 * delta / tau, c + 2.0 * delta / tau)
        })
        .collect();
    // Positive part of the difference set.
    let mut diffs: Vec<(f64, f64)> = Vec::new();
    for &(a1, b1) in &inflated {
        for &(a2, b2) in &inflated {
            let lo = a1 - b2;
            let hi = b1 - a2;
            if hi > 0.0 {
                diffs.push((lo.max(1e-12), hi));
            }
        }
    }
    'node: for i in 0..nodes {
        let t = tau / 2.0 + (i as f64 + 0.5) * (tau / 2.0) / nodes as f64;
        for &(lo, hi) in &diffs {
            // k/t ∈ (lo, hi) ⟺ k ∈ (t·lo, t·hi).
            let k_first = (t * lo).floor() + 1.0;
            if k_first < t * hi && k_first >= 1.0 {
                continue 'node;
            }
        }
        return Ok(t);
    }
    Err(RfError::Numeric(
        "no good shift denominator found at the sampled resolution".into(),
    ))
}

/// Exact check of the arithmetic-progression measure bound
/// `m(V_G) < τ² m(G)` with `V_G = {t ∈ (τ/2, τ): ∃k∈ℕ, k/t ∈ G}`.
#[derive(Clone, Debug)]
pub struct ProgressionRecord {
    pub m_vg: f64,
    pub bound: f64,
    pub ok: bool,
}

fn to_rational(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(RfError::Argument("non-finite endpoint".into()));
    }
    let (mantissa, exponent, sign) = integer_decode(x);
    let mut num = BigInt::from(mantissa) * BigInt::from(sign);
    let mut den = BigInt::from(1);
    if exponent >= 0 {
        num <<= exponent as usize;
    } else {
        den <<= (-exponent) as usize;
    }
    Ok(BigRational::new(num, den))
}

fn integer_decode(x: f64) -> (u64, i16, i8) {
    let bits = x.to_bits();
    let sign: i8 = if bits >> 63 == 0 { 1 } else { -1 };
    let mut exponent: i16 = ((bits >> 52) & 0x7ff) as i16;
    let mantissa = if exponent == 0 {
        (bits & 0xf_ffff_ffff_ffff) << 1
    } else {
        (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000
    };
    exponent -= 1075;
    (mantissa, exponent, sign)
}

/// Computes `m(V_G)` exactly in rational arithmetic (f64 endpoints are
/// exact rationals) and compares against `τ²·m(G)`; for a set of measure
/// zero the check degenerates to `m(V_G) = 0`.
pub fn progression_measure_check(
    g_intervals: &[(f64, f64)],
    tau: f64,
) -> Result<ProgressionRecord> {
    if tau <= 0.0 {
        return Err(RfError::Argument("τ must be positive".into()));
    }
    if g_intervals.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite())) {
        return Err(RfError::Argument("unbounded interval in G".into()));
    }
    if g_intervals.iter().any(|&(a, b)| a < 0.0 || b < a) {
        return Err(RfError::Argument("G must be a union of intervals in ℝ₊".into()));
    }
    let tau_r = to_rational(tau)?;
    let half_tau = &tau_r / BigRational::from(BigInt::from(2));

    // Collect contributions (k/b, k/a) ∩ (τ/2, τ) for every interval
    // (a, b) of G and every admissible k.
    let mut pieces: Vec<(BigRational, BigRational)> = Vec::new();
    let mut m_g = BigRational::zero();
    for &(a, b) in g_intervals {
        let a_r = to_rational(a)?;
        let b_r = to_rational(b)?;
        m_g += &b_r - &a_r;
        // k/t ∈ (a, b) with t < τ needs k < τ·b.
        let k_max = (tau * b).ceil() as i64 + 1;
        for k in 1..=k_max {
            let k_r = BigRational::from(BigInt::from(k));
            // t ∈ (k/b, k/a); a = 0 sends the upper end to +∞, capped by τ.
            let lo_t = if b_r.is_zero() { continue } else { &k_r / &b_r };
            let hi_t = if a_r.is_zero() { tau_r.clone() } else { &k_r / &a_r };
            let lo = if lo_t > half_tau { lo_t } else { half_tau.clone() };
            let hi = if hi_t < tau_r { hi_t } else { tau_r.clone() };
            if lo < hi {
                pieces.push((lo, hi));
            }
        }
    }

    // Union measure of the rational intervals.
    pieces.sort_by(|x, y| x.0.cmp(&y.0));
    let mut m_vg = BigRational::zero();
    let mut current: Option<(BigRational, BigRational)> = None;
    for (lo, hi) in pieces {
        match current.take() {
            None => current = Some((lo, hi)),
            Some((clo, chi)) => {
                if lo <= chi {
                    current = Some((clo, if hi > chi { hi } else { chi }));
                } else {
                    m_vg += &chi - &clo;
                    current = Some((lo, hi));
                }
            }
        }
    }
    if let Some((clo, chi)) = current {
        m_vg += &chi - &clo;
    }

    let bound = &tau_r * &tau_r * &m_g;
    let ok = if m_g.is_zero() {
        m_vg.is_zero()
    } else {
        m_vg < bound
    };
    Ok(ProgressionRecord {
        m_vg: m_vg.to_f64().unwrap_or(f64::NAN),
        bound: bound.to_f64().unwrap_or(f64::NAN),
        ok,
    })
}
