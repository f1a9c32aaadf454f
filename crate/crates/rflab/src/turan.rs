//! Exponential polynomials `p(t) = Σ a_k e^{iλ_k t}` and the extremal
//! sup/L² ratio checks between an interval and a positive-measure subset,
//! plus algebraic-polynomial root machinery and the radial projection of
//! zeroes to the unit circle.

use crate::error::{Result, RfError};
use crate::poly;
use crate::quad;
use num_complex::Complex64;

/// Default value of the unspecified extremal constant; checks report
/// margins against it rather than asserting a sharp value.
pub const DEFAULT_TURAN_CONSTANT: f64 = 300.0;

/// `Σ a_k e^{iλ_k t}` with strictly increasing real frequencies.
#[derive(Clone, Debug)]
pub struct ExpPoly {
    pub frequencies: Vec<f64>,
    pub coefficients: Vec<Complex64>,
}

impl ExpPoly {
    pub fn new(frequencies: Vec<f64>, coefficients: Vec<Complex64>) -> Result<Self> {
        if frequencies.is_empty() || frequencies.len() != coefficients.len() {
            return Err(RfError::Argument(
                "frequencies and coefficients must be nonempty and matched".into(),
            ));
        }
        if frequencies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RfError::Argument(
                "frequencies must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            frequencies,
            coefficients,
        })
    }

    /// Number of terms minus one; the exponent in the extremal bounds.
    pub fn order(&self) -> usize {
        self.frequencies.len() - 1
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.frequencies
            .iter()
            .zip(&self.coefficients)
            .map(|(&l, &a)| {
                let arg = l * t;
                a * Complex64::new(arg.cos(), arg.sin())
            })
            .sum()
    }

    pub fn eval_many(&self, points: &[f64]) -> Vec<Complex64> {
        points.iter().map(|&t| self.eval(t)).collect()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            frequencies: self.frequencies.clone(),
            coefficients: self.coefficients.iter().map(|&a| a * c).collect(),
        }
    }

    /// The polynomial `t ↦ p(t + s)`: coefficient phases rotate by
    /// `e^{iλ_k s}`.
    pub fn translate(&self, s: f64) -> Self {
        Self {
            frequencies: self.frequencies.clone(),
            coefficients: self
                .frequencies
                .iter()
                .zip(&self.coefficients)
                .map(|(&l, &a)| {
                    let arg = l * s;
                    a * Complex64::new(arg.cos(), arg.sin())
                })
                .collect(),
        }
    }
}

/// Sorted disjoint intervals inside a reference interval.
#[derive(Clone, Debug)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Normalizes: sorts, rejects overlaps and empty pieces.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(RfError::Argument("interval union must be nonempty".into()));
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in intervals.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(RfError::Argument(format!(
                    "intervals overlap: ({}, {}) and ({}, {})",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        if intervals.iter().any(|&(a, b)| b <= a) {
            return Err(RfError::Argument("degenerate interval".into()));
        }
        Ok(Self { intervals })
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_inside(&self, interval: (f64, f64)) -> bool {
        self.intervals
            .iter()
            .all(|&(a, b)| a >= interval.0 - 1e-12 && b <= interval.1 + 1e-12)
    }

    pub fn translate(&self, s: f64) -> Self {
        Self {
            intervals: self.intervals.iter().map(|&(a, b)| (a + s, b + s)).collect(),
        }
    }
}

/// Maximum of `f` over `[a, b]`: dense samples, then golden-section on
/// every bracketed local maximum. Ties keep the first bracketing sample.
fn max_on_interval<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, samples: usize) -> f64 {
    let n = samples.max(8);
    let xs: Vec<f64> = (0..=n)
        .map(|i| a + (b - a) * i as f64 / n as f64)
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = vs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for i in 0..=n {
        let left_ok = i == 0 || vs[i] >= vs[i - 1];
        let right_ok = i == n || vs[i] >= vs[i + 1];
        if left_ok && right_ok {
            let lo = xs[i.saturating_sub(1)];
            let hi = xs[(i + 1).min(n)];
            best = best.max(golden_max(f, lo, hi));
        }
    }
    best
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs() + b.abs()) {
            break;
        }
    }
    fc.max(fd)
}

/// Result of the sup-norm extremal check.
#[derive(Clone, Copy, Debug)]
pub struct TuranSupRecord {
    pub max_j: f64,
    pub sup_e: f64,
    /// `(max_J / sup_E)^{1/n} · m(E)/m(J)` for order `n ≥ 1`; the plain
    /// ratio for a single exponential.
    pub empirical_constant: f64,
    pub bound_ok: bool,
    /// `(C·m(J)/m(E))^n · sup_E − max_J`; positive means the bound holds.
    pub margin: f64,
}

/// Checks `max_J |p| ≤ (C·m(J)/m(E))^n · sup_E |p|` by dense sampling with
/// golden-section refinement on both sets.
pub fn turan_sup_check(
    p: &ExpPoly,
    j_interval: (f64, f64),
    e_set: &IntervalUnion,
    samples_per_interval: usize,
    c_constant: f64,
) -> Result<TuranSupRecord> {
    if j_interval.1 <= j_interval.0 {
        return Err(RfError::Argument("empty reference interval".into()));
    }
    if !e_set.is_inside(j_interval) {
        return Err(RfError::Argument("subset leaves the reference interval".into()));
    }
    let modulus = |t: f64| p.eval(t).norm();
    let m_j = j_interval.1 - j_interval.0;
    let m_e = e_set.measure();
    let n = p.order();

    let j_samples = samples_per_interval.max(64) * (n + 1);
    let max_j = max_on_interval(&modulus, j_interval.0, j_interval.1, j_samples);
    let sup_e = e_set
        .pieces()
        .iter()
        .map(|&(a, b)| max_on_interval(&modulus, a, b, samples_per_interval))
        .fold(f64::NEG_INFINITY, f64::max);

    if sup_e <= 1e-300 {
        return Err(RfError::Degenerate(
            "polynomial vanishes on the subset within tolerance".into(),
        ));
    }
    let empirical_constant = if n >= 1 {
        (max_j / sup_e).powf(1.0 / n as f64) * m_e / m_j
    } else {
        max_j / sup_e
    };
    let rhs = (c_constant * m_j / m_e).powi(n as i32) * sup_e;
    Ok(TuranSupRecord {
        max_j,
        sup_e,
        empirical_constant,
        bound_ok: max_j <= rhs,
        margin: rhs - max_j,
    })
}

/// Result of the L² extremal check, exponent `n + 1/2`.
#[derive(Clone, Copy, Debug)]
pub struct TuranL2Record {
    pub l2_j: f64,
    pub l2_e: f64,
    pub bound_ok: bool,
    pub margin: f64,
}

/// Checks `‖p‖_{L²(J)} ≤ (C·m(J)/m(E))^{n+1/2} ‖p‖_{L²(E)}` with composite
/// Gauss-Legendre norms.
pub fn turan_l2_check(
    p: &ExpPoly,
    j_interval: (f64, f64),
    e_set: &IntervalUnion,
    rel_tol: f64,
    c_constant: f64,
) -> Result<TuranL2Record> {
    if j_interval.1 <= j_interval.0 {
        return Err(RfError::Argument("empty reference interval".into()));
    }
    if !e_set.is_inside(j_interval) {
        return Err(RfError::Argument("subset leaves the reference interval".into()));
    }
    let sq = |t: f64| p.eval(t).norm_sqr();
    let l2_j = quad::adaptive(&sq, j_interval.0, j_interval.1, rel_tol)?.max(0.0).sqrt();
    let mut e_sq = 0.0;
    for &(a, b) in e_set.pieces() {
        e_sq += quad::adaptive(&sq, a, b, rel_tol)?;
    }
    let l2_e = e_sq.max(0.0).sqrt();
    if l2_e <= 1e-300 {
        return Err(RfError::Degenerate(
            "polynomial has no L² mass on the subset".into(),
        ));
    }
    let m_j = j_interval.1 - j_interval.0;
    let m_e = e_set.measure();
    let rhs = (c_constant * m_j / m_e).powf(p.order() as f64 + 0.5) * l2_e;
    Ok(TuranL2Record {
        l2_j,
        l2_e,
        bound_ok: l2_j <= rhs,
        margin: rhs - l2_j,
    })
}

/// All roots of the algebraic polynomial (constant term first).
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    poly::roots(coeffs)
}

/// Radial projection of the zeroes of `g` to the unit circle.
#[derive(Clone, Debug)]
pub struct RadialProjection {
    /// Monic coefficients of `h(z) = Π (z - z_j/|z_j|)`.
    pub h_coeffs: Vec<Complex64>,
    /// Max over the circle grid of `|h(z)| - 2^n |g(z)|`; the projection
    /// inequality demands this stay below 1e-8.
    pub max_violation: f64,
}

/// Builds `h` from the radially projected zeroes of `g` and measures the
/// worst excess of `|h|` over `2^n |g|` on a 4096-point circle grid.
/// Preconditions: no zero of `g` at the origin and `sup_{|z|=1} |g| ≥ 1`.
pub fn radial_zero_projection(g_coeffs: &[Complex64]) -> Result<RadialProjection> {
    let roots = poly::roots(g_coeffs)?;
    if roots.is_empty() {
        return Err(RfError::Argument(
            "constant polynomial has no zeroes to project".into(),
        ));
    }
    if roots.iter().any(|r| r.norm() < 1e-12) {
        return Err(RfError::Precondition("zero of g at the origin".into()));
    }
    let grid = 4096usize;
    let circle: Vec<Complex64> = (0..grid).map(|j| crate::e(j as f64 / grid as f64)).collect();
    let sup_g = circle
        .iter()
        .map(|&z| poly::eval(g_coeffs, z).norm())
        .fold(0.0f64, f64::max);
    if sup_g < 1.0 - 1e-12 {
        return Err(RfError::Precondition(format!(
            "sup of |g| on the circle is {sup_g}, below the required 1"
        )));
    }
    let projected: Vec<Complex64> = roots.iter().map(|&r| r / r.norm()).collect();
    let h_coeffs = poly::from_roots(&projected);
    let factor = 2f64.powi(roots.len() as i32);
    let max_violation = circle
        .iter()
        .map(|&z| poly::eval(&h_coeffs, z).norm() - factor * poly::eval(g_coeffs, z).norm())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(RadialProjection {
        h_coeffs,
        max_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use std::f64::consts::PI;

    const TAU: f64 = 2.0 * PI;

    #[test]
    fn eval_examples() {
        let constant = ExpPoly::new(vec![0.0], vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert!((constant.eval(0.7) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let wave = ExpPoly::new(vec![1.0], vec![Complex64::new(1.0, 0.0)]).unwrap();
        for &t in &[0.0, 1.0, -2.5] {
            assert!((wave.eval(t).norm() - 1.0).abs() < 1e-15);
        }

        // 1 - e^{2πit} at t = 1/2 equals 2.
        let p = ExpPoly::new(
            vec![0.0, TAU],
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        )
        .unwrap();
        assert!((p.eval(0.5) - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn frequencies_must_increase() {
        assert!(ExpPoly::new(vec![1.0, 1.0], vec![Complex64::new(1.0, 0.0); 2]).is_err());
        assert!(ExpPoly::new(vec![2.0, 1.0], vec![Complex64::new(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn eval_matches_grid_transform_for_integer_frequencies() {
        // λ_k = 2πk matches the e(kθ) grid evaluation.
        use crate::space::{evaluate_grid, CoefficientSeq, SignEnsemble};
        let coeffs: Vec<Complex64> = (0..5)
            .map(|i| Complex64::new(0.3 * i as f64, 1.0 - 0.2 * i as f64))
            .collect();
        let p = ExpPoly::new((0..5).map(|k| TAU * k as f64).collect(), coeffs.clone()).unwrap();
        let seq = CoefficientSeq::fourier(0, coeffs).unwrap();
        let signs = SignEnsemble::all_plus(0, 4);
        let f = evaluate_grid(&seq, &signs, 5).unwrap();
        for j in 0..32 {
            let theta = j as f64 / 32.0;
            assert!(
                (p.eval(theta) - f.values[0][j]).norm() <= 1e-10 * p.eval(theta).norm().max(1.0)
            );
        }
    }

    #[test]
    fn sup_check_constant_modulus() {
        let p = ExpPoly::new(vec![3.0], vec![Complex64::new(0.0, 2.0)]).unwrap();
        let e_set = IntervalUnion::new(vec![(0.25, 0.75)]).unwrap();
        let rec = turan_sup_check(&p, (0.0, 1.0), &e_set, 64, DEFAULT_TURAN_CONSTANT).unwrap();
        assert!((rec.max_j - rec.sup_e).abs() < 1e-10);
        assert!((rec.empirical_constant - 1.0).abs() < 1e-10);
        assert!(rec.bound_ok);
    }

    #[test]
    fn sup_check_finds_interior_maximum() {
        // p = 1 - e(t) on [0, 1]; |p| peaks at t = 1/2 with value 2,
        // inside E = [1/4, 3/4].
        let p = ExpPoly::new(
            vec![0.0, TAU],
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        )
        .unwrap();
        let e_set = IntervalUnion::new(vec![(0.25, 0.75)]).unwrap();
        let rec = turan_sup_check(&p, (0.0, 1.0), &e_set, 64, DEFAULT_TURAN_CONSTANT).unwrap();
        assert!((rec.max_j - 2.0).abs() < 1e-10);
        assert!((rec.sup_e - 2.0).abs() < 1e-10);
        assert!(rec.bound_ok && rec.margin > 0.0);
    }

    fn random_exp_poly(seed: u64, max_order: usize) -> ExpPoly {
        let n = 1 + rng::index(seed, 50, 0, max_order);
        let mut freqs: Vec<f64> = (0..=n)
            .map(|i| rng::uniform_in(seed, 51, i as u64, -30.0, 30.0))
            .collect();
        freqs.sort_by(f64::total_cmp);
        freqs.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let coeffs: Vec<Complex64> = (0..freqs.len())
            .map(|i| {
                Complex64::new(
                    rng::uniform_in(seed, 52, i as u64, -1.0, 1.0),
                    rng::uniform_in(seed, 53, i as u64, -1.0, 1.0),
                )
            })
            .collect();
        ExpPoly::new(freqs, coeffs).unwrap()
    }

    fn random_subset(seed: u64, j_interval: (f64, f64)) -> IntervalUnion {
        // Two disjoint pieces with total measure at least m(J)/4.
        let len = j_interval.1 - j_interval.0;
        let a = j_interval.0 + 0.05 * len;
        let w1 = len * rng::uniform_in(seed, 60, 1, 0.15, 0.3);
        let gap = len * rng::uniform_in(seed, 60, 2, 0.05, 0.2);
        let w2 = len * rng::uniform_in(seed, 60, 3, 0.15, 0.3);
        IntervalUnion::new(vec![
            (a, a + w1),
            (a + w1 + gap, (a + w1 + gap + w2).min(j_interval.1 - 1e-9)),
        ])
        .unwrap()
    }

    #[test]
    fn survey_bound_holds_and_reports_finite_constants() {
        let mut worst = 0.0f64;
        for seed in 0..200u64 {
            let p = random_exp_poly(seed, 8);
            let j_interval = (0.0, 1.0);
            let e_set = random_subset(seed, j_interval);
            let rec = turan_sup_check(&p, j_interval, &e_set, 64, DEFAULT_TURAN_CONSTANT).unwrap();
            assert!(rec.bound_ok, "sup bound failed at seed {seed}");
            assert!(rec.empirical_constant.is_finite());
            worst = worst.max(rec.empirical_constant);

            let rec2 =
                turan_l2_check(&p, j_interval, &e_set, 1e-10, DEFAULT_TURAN_CONSTANT).unwrap();
            assert!(rec2.bound_ok, "l2 bound failed at seed {seed}");
        }
        assert!(worst.is_finite() && worst > 0.0);
    }

    #[test]
    fn empirical_constant_scaling_and_translation_invariance() {
        for seed in 0..20u64 {
            let p = random_exp_poly(seed, 6);
            let j_interval = (0.0, 1.0);
            let e_set = random_subset(seed, j_interval);
            let base = turan_sup_check(&p, j_interval, &e_set, 64, DEFAULT_TURAN_CONSTANT).unwrap();

            let scaled = p.scale(Complex64::new(0.0, -3.7));
            let rec =
                turan_sup_check(&scaled, j_interval, &e_set, 64, DEFAULT_TURAN_CONSTANT).unwrap();
            assert!((rec.empirical_constant - base.empirical_constant).abs() <= 1e-10);

            let s = 2.31;
            let moved = p.translate(s);
            let rec2 = turan_sup_check(
                &moved,
                (j_interval.0 - s, j_interval.1 - s),
                &e_set.translate(-s),
                64,
                DEFAULT_TURAN_CONSTANT,
            )
            .unwrap();
            assert!(
                (rec2.empirical_constant - base.empirical_constant).abs() <= 1e-10,
                "seed {seed}: {} vs {}",
                rec2.empirical_constant,
                base.empirical_constant
            );
        }
    }

    #[test]
    fn l2_check_closed_form() {
        // ∫_a^b |1 - e(t)|² dt = 2(b-a) - (sin 2πb - sin 2πa)/π.
        let p = ExpPoly::new(
            vec![0.0, TAU],
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        )
        .unwrap();
        let e_set = IntervalUnion::new(vec![(0.0, 0.5)]).unwrap();
        let rec = turan_l2_check(&p, (0.0, 1.0), &e_set, 1e-12, DEFAULT_TURAN_CONSTANT).unwrap();
        assert!((rec.l2_j - 2f64.sqrt()).abs() < 1e-10);
        assert!((rec.l2_e - 1.0).abs() < 1e-10);
        assert!(rec.bound_ok);

        let full = IntervalUnion::new(vec![(0.0, 1.0)]).unwrap();
        let rec = turan_l2_check(&p, (0.0, 1.0), &full, 1e-12, DEFAULT_TURAN_CONSTANT).unwrap();
        assert!((rec.l2_j - rec.l2_e).abs() < 1e-12);
    }

    #[test]
    fn degenerate_subset_is_signalled() {
        let p = ExpPoly::new(vec![0.0, TAU], vec![Complex64::new(0.0, 0.0); 2]).unwrap();
        let e_set = IntervalUnion::new(vec![(0.2, 0.4)]).unwrap();
        assert!(turan_sup_check(&p, (0.0, 1.0), &e_set, 32, 300.0).is_err());
    }

    #[test]
    fn roots_small_cases() {
        let rs = poly_roots(&[
            Complex64::new(-0.25, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(rs.len(), 2);
        let rs2 = poly_roots(&[Complex64::new(-2.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        assert!((rs2[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn radial_projection_linear_case() {
        // g = z - 2 → h = z - 1; at z = -1, |h| = 2 ≤ 2·|g| = 6.
        let g = [Complex64::new(-2.0, 0.0), Complex64::new(1.0, 0.0)];
        let proj = radial_zero_projection(&g).unwrap();
        assert_eq!(proj.h_coeffs.len(), 2);
        assert!((proj.h_coeffs[0] + Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert!(proj.max_violation <= 1e-8);
        let at_minus_one = poly::eval(&proj.h_coeffs, Complex64::new(-1.0, 0.0)).norm();
        assert!((at_minus_one - 2.0).abs() < 1e-9);
    }

    #[test]
    fn radial_projection_fixes_circle_roots() {
        // Monic with all roots already on the circle: h = g.
        let roots: Vec<Complex64> = (0..4).map(|j| crate::e(j as f64 / 4.0 + 0.1)).collect();
        let g = poly::from_roots(&roots);
        let proj = radial_zero_projection(&g).unwrap();
        for (a, b) in proj.h_coeffs.iter().zip(&g) {
            assert!((a - b).norm() < 1e-7);
        }
        assert!(proj.max_violation <= 1e-8);
    }

    #[test]
    fn radial_projection_random_annulus() {
        for seed in 0..20u64 {
            let roots: Vec<Complex64> = (0..8)
                .map(|i| {
                    let r = rng::uniform_in(seed, 70, i, 0.3, 3.0);
                    let ang = rng::uniform_in(seed, 71, i, 0.0, 1.0);
                    crate::e(ang) * r
                })
                .collect();
            let mut g = poly::from_roots(&roots);
            // Rescale so the circle sup is at least 1.
            let sup = (0..4096)
                .map(|j| poly::eval(&g, crate::e(j as f64 / 4096.0)).norm())
                .fold(0.0f64, f64::max);
            let c = Complex64::new(1.5 / sup, 0.0);
            for a in g.iter_mut() {
                *a *= c;
            }
            let proj = radial_zero_projection(&g).unwrap();
            assert!(
                proj.max_violation <= 1e-8,
                "violation {} at seed {seed}",
                proj.max_violation
            );
        }
    }

    #[test]
    fn radial_projection_rejects_origin_roots_and_small_sup() {
        // Root at the origin.
        let g = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(radial_zero_projection(&g).is_err());
        // Tiny polynomial: sup below 1.
        let g = [Complex64::new(-0.001, 0.0), Complex64::new(0.01, 0.0)];
        assert!(radial_zero_projection(&g).is_err());
    }
}
