//! The discretized product space `Q = Ω × 𝕋`.
//!
//! `Ω` is an ensemble of `S` equally weighted sign rows, `𝕋` a uniform grid
//! of `G = 2^m` points `θ_j = j/G`. All integrals over `Q` are exact finite
//! averages with cell weight `1/(S·G)`. Shifts of functions act spectrally
//! (multiplier `e(kt)` on coefficient `k`), so arbitrary real shifts are
//! exact for trigonometric polynomials; shifts of sets are restricted to
//! grid multiples.

use crate::error::{Result, RfError};
use crate::{e, fft, pairwise_sum, rng};
use num_complex::Complex64;

/// How a coefficient window is to be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpretation {
    /// Fourier coefficients on a window of ℤ.
    Fourier,
    /// Taylor coefficients on a window of ℤ₊.
    Taylor,
}

/// Complex coefficients `a_k` for `k ∈ [k_min, k_max]`.
#[derive(Clone, Debug)]
pub struct CoefficientSeq {
    pub k_min: i64,
    pub values: Vec<Complex64>,
    pub interpretation: Interpretation,
}

impl CoefficientSeq {
    pub fn fourier(k_min: i64, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(RfError::Argument("empty coefficient window".into()));
        }
        Ok(Self {
            k_min,
            values,
            interpretation: Interpretation::Fourier,
        })
    }

    pub fn taylor(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(RfError::Argument("empty coefficient window".into()));
        }
        Ok(Self {
            k_min: 0,
            values,
            interpretation: Interpretation::Taylor,
        })
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.values.len() as i64 - 1
    }

    /// `Σ |a_k|²`, exact.
    pub fn norm_sqr(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|c| c.norm_sqr()).collect();
        pairwise_sum(&sq)
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k < self.k_min || k > self.k_max() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[(k - self.k_min) as usize]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|c| c.norm() == 0.0)
    }
}

/// `S` rows of ±1 signs over a coefficient window. Entry `(i, k)` is a pure
/// function of `(seed, i, k)`, so any sub-range of any row can be
/// regenerated independently of evaluation order.
#[derive(Clone, Debug)]
pub struct SignEnsemble {
    pub seed: u64,
    pub k_min: i64,
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

/// Draws a fresh sign ensemble over the window `[k_min, k_max]`.
pub fn sample_sign_ensemble(seed: u64, rows: usize, k_min: i64, k_max: i64) -> Result<SignEnsemble> {
    if rows == 0 {
        return Err(RfError::Argument("ensemble needs at least one row".into()));
    }
    if k_max < k_min {
        return Err(RfError::Argument("empty sign window".into()));
    }
    let cols = (k_max - k_min + 1) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for c in 0..cols {
            let k = k_min + c as i64;
            data.push(if rng::sign(seed, i as u64, k as u64) > 0.0 { 1 } else { -1 });
        }
    }
    Ok(SignEnsemble {
        seed,
        k_min,
        rows,
        cols,
        data,
    })
}

impl SignEnsemble {
    /// Deterministic ensemble from explicit rows (tests, extreme events).
    pub fn from_rows(k_min: i64, rows: Vec<Vec<i8>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(RfError::Argument("empty ensemble".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(RfError::Argument("ragged ensemble rows".into()));
        }
        if rows.iter().flatten().any(|&s| s != 1 && s != -1) {
            return Err(RfError::Argument("ensemble entries must be ±1".into()));
        }
        Ok(Self {
            seed: 0,
            k_min,
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// The all-plus ensemble (a single deterministic row).
    pub fn all_plus(k_min: i64, k_max: i64) -> Self {
        let cols = (k_max - k_min + 1) as usize;
        Self {
            seed: 0,
            k_min,
            rows: 1,
            cols,
            data: vec![1; cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.cols as i64 - 1
    }

    #[inline]
    pub fn sign(&self, row: usize, k: i64) -> f64 {
        debug_assert!(k >= self.k_min && k <= self.k_max());
        self.data[row * self.cols + (k - self.k_min) as usize] as f64
    }

    /// Mean of column `k` over the rows.
    pub fn column_mean(&self, k: i64) -> f64 {
        (0..self.rows).map(|i| self.sign(i, k)).sum::<f64>() / self.rows as f64
    }
}

/// Values of `f(ω_i, θ_j)` on the `S × G` grid together with the per-row
/// spectral form that produced them.
#[derive(Clone, Debug)]
pub struct GridFunction {
    pub grid_log2: u32,
    pub k_min: i64,
    /// `S × W` per-row coefficients; row `i`, offset `k - k_min`.
    pub row_coeffs: Vec<Vec<Complex64>>,
    /// `S × G` grid values.
    pub values: Vec<Vec<Complex64>>,
}

/// Evaluates `f(ω_i, θ_j) = Σ_k ξ_k(ω_i) a_k e(kθ_j)` on the dyadic grid.
pub fn evaluate_grid(
    coeffs: &CoefficientSeq,
    signs: &SignEnsemble,
    grid_log2: u32,
) -> Result<GridFunction> {
    if coeffs.k_min < signs.k_min || coeffs.k_max() > signs.k_max() {
        return Err(RfError::Argument(format!(
            "coefficient window [{}, {}] exceeds the sign window [{}, {}]",
            coeffs.k_min,
            coeffs.k_max(),
            signs.k_min,
            signs.k_max()
        )));
    }
    let row_coeffs: Vec<Vec<Complex64>> = (0..signs.rows())
        .map(|i| {
            coeffs
                .values
                .iter()
                .enumerate()
                .map(|(off, &a)| a * signs.sign(i, coeffs.k_min + off as i64))
                .collect()
        })
        .collect();
    GridFunction::from_row_coeffs(row_coeffs, coeffs.k_min, grid_log2)
}

impl GridFunction {
    /// Builds from explicit per-row coefficients; checks the no-aliasing
    /// condition `G > 2·max(|k_min|, |k_max|)`.
    pub fn from_row_coeffs(
        row_coeffs: Vec<Vec<Complex64>>,
        k_min: i64,
        grid_log2: u32,
    ) -> Result<Self> {
        if row_coeffs.is_empty() || row_coeffs[0].is_empty() {
            return Err(RfError::Argument("empty grid function".into()));
        }
        let w = row_coeffs[0].len();
        if row_coeffs.iter().any(|r| r.len() != w) {
            return Err(RfError::Argument("ragged coefficient rows".into()));
        }
        let g = 1usize << grid_log2;
        let k_max = k_min + w as i64 - 1;
        let reach = k_min.unsigned_abs().max(k_max.unsigned_abs());
        if (g as u64) <= 2 * reach {
            return Err(RfError::Argument(format!(
                "grid of {g} points aliases a window reaching frequency {reach}; need G > {}",
                2 * reach
            )));
        }
        let values = row_coeffs
            .iter()
            .map(|rc| fft::eval_on_grid(rc, k_min, g))
            .collect();
        Ok(Self {
            grid_log2,
            k_min,
            row_coeffs,
            values,
        })
    }

    /// Builds from explicit grid values. The spectral form is recovered by
    /// a forward transform on the full window `[-G/2, G/2)`.
    pub fn from_values(values: Vec<Vec<Complex64>>, grid_log2: u32) -> Result<Self> {
        if values.is_empty() || values[0].is_empty() {
            return Err(RfError::Argument("empty grid function".into()));
        }
        let g = 1usize << grid_log2;
        if values.iter().any(|r| r.len() != g) {
            return Err(RfError::Argument("row length does not match the grid".into()));
        }
        let half = (g / 2) as i64;
        let row_coeffs = values
            .iter()
            .map(|row| {
                let mut buf = row.clone();
                fft::forward(&mut buf);
                // slot d holds Σ_j f_j e(-jd/G); coefficient of e(kθ) is slot k mod G, /G.
                (-half..half)
                    .map(|k| buf[k.rem_euclid(g as i64) as usize] / g as f64)
                    .collect()
            })
            .collect();
        Ok(Self {
            grid_log2,
            k_min: -half,
            row_coeffs,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn grid_size(&self) -> usize {
        1 << self.grid_log2
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.row_coeffs[0].len() as i64 - 1
    }

    /// `‖f‖²_{L²(Q)}` from the spectral form (exact by Parseval).
    pub fn norm_sqr(&self) -> f64 {
        let per_row: Vec<f64> = self
            .row_coeffs
            .iter()
            .map(|rc| pairwise_sum(&rc.iter().map(|c| c.norm_sqr()).collect::<Vec<_>>()))
            .collect();
        pairwise_sum(&per_row) / self.rows() as f64
    }

    /// `‖f‖²_{L²(Q)}` as a plain grid average.
    pub fn norm_sqr_grid(&self) -> f64 {
        let per_row: Vec<f64> = self
            .values
            .iter()
            .map(|row| pairwise_sum(&row.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>()))
            .collect();
        pairwise_sum(&per_row) / (self.rows() * self.grid_size()) as f64
    }

    /// Per-row mean of |f|² then row mean; equals `norm_sqr_grid` up to
    /// summation order.
    pub fn norm_sqr_rowwise(&self) -> f64 {
        let per_row: Vec<f64> = self
            .values
            .iter()
            .map(|row| {
                pairwise_sum(&row.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>())
                    / self.grid_size() as f64
            })
            .collect();
        pairwise_sum(&per_row) / self.rows() as f64
    }

    /// The shift `g_t(ω, θ) = g(ω, θ + t)`: multiplier `e(kt)` on
    /// coefficient `k`, exact for any real `t`.
    pub fn shift(&self, t: f64) -> Self {
        let row_coeffs: Vec<Vec<Complex64>> = self
            .row_coeffs
            .iter()
            .map(|rc| {
                rc.iter()
                    .enumerate()
                    .map(|(off, &c)| c * e((self.k_min + off as i64) as f64 * t))
                    .collect()
            })
            .collect();
        let values = row_coeffs
            .iter()
            .map(|rc| fft::eval_on_grid(rc, self.k_min, self.grid_size()))
            .collect();
        Self {
            grid_log2: self.grid_log2,
            k_min: self.k_min,
            row_coeffs,
            values,
        }
    }

    /// Mean squared coefficient per frequency: `W(m) = (1/S) Σ_i |c_i(m)|²`.
    pub fn power_spectrum(&self) -> Vec<f64> {
        let w = self.row_coeffs[0].len();
        let mut spec = vec![0.0; w];
        for rc in &self.row_coeffs {
            for (off, c) in rc.iter().enumerate() {
                spec[off] += c.norm_sqr();
            }
        }
        for s in &mut spec {
            *s /= self.rows() as f64;
        }
        spec
    }
}

/// A complex value per ensemble row; the discretization of a function on
/// `Q` that does not depend on `θ`.
#[derive(Clone, Debug)]
pub struct RandomConstant {
    pub values: Vec<Complex64>,
}

impl RandomConstant {
    pub fn zero(rows: usize) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); rows],
        }
    }

    /// Uniform draw from the disk of the given radius, one value per row.
    pub fn sample_disk(seed: u64, rows: usize, radius: f64) -> Self {
        Self {
            values: (0..rows)
                .map(|i| rng::complex_in_disk(seed, 0xb0, i as u64, radius))
                .collect(),
        }
    }

    pub fn constant(rows: usize, v: Complex64) -> Self {
        Self {
            values: vec![v; rows],
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * c).collect(),
        }
    }
}

/// A subset `E ⊂ Q` as one boolean mask per row; cell weight `1/(S·G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSet {
    pub grid_log2: u32,
    rows: usize,
    mask: Vec<bool>,
}

impl ProductSet {
    pub fn empty(rows: usize, grid_log2: u32) -> Self {
        let g = 1usize << grid_log2;
        Self {
            grid_log2,
            rows,
            mask: vec![false; rows * g],
        }
    }

    pub fn full(rows: usize, grid_log2: u32) -> Self {
        let g = 1usize << grid_log2;
        Self {
            grid_log2,
            rows,
            mask: vec![true; rows * g],
        }
    }

    /// `Ω₁ × [lo, hi)` for a row subset and a grid-aligned interval given
    /// in cells.
    pub fn rows_times_cells(
        rows: usize,
        grid_log2: u32,
        selected_rows: &[usize],
        cell_lo: usize,
        cell_hi: usize,
    ) -> Self {
        let mut s = Self::empty(rows, grid_log2);
        let g = s.grid_size();
        for &i in selected_rows {
            for j in cell_lo..cell_hi.min(g) {
                s.set(i, j, true);
            }
        }
        s
    }

    /// Independent coin flips with the given density.
    pub fn random(seed: u64, rows: usize, grid_log2: u32, density: f64) -> Self {
        let g = 1usize << grid_log2;
        let mut s = Self::empty(rows, grid_log2);
        for i in 0..rows {
            for j in 0..g {
                if rng::uniform(seed, 0xe0 + i as u64, j as u64) < density {
                    s.set(i, j, true);
                }
            }
        }
        s
    }

    /// One random grid-aligned arc per row, each of the given length in
    /// cells.
    pub fn random_row_arcs(seed: u64, rows: usize, grid_log2: u32, arc_cells: usize) -> Self {
        let g = 1usize << grid_log2;
        let mut s = Self::empty(rows, grid_log2);
        for i in 0..rows {
            let start = rng::index(seed, 0xa1, i as u64, g);
            for d in 0..arc_cells.min(g) {
                s.set(i, (start + d) % g, true);
            }
        }
        s
    }

    /// Sublevel set `{(ω,θ): |f - b| ≤ s}` trimmed/padded to approximately
    /// the requested measure by choosing `s` as the empirical quantile.
    pub fn sublevel(f: &GridFunction, b: &RandomConstant, measure: f64) -> Self {
        let mut all: Vec<f64> = Vec::with_capacity(f.rows() * f.grid_size());
        for (i, row) in f.values.iter().enumerate() {
            let bi = b.values[i];
            all.extend(row.iter().map(|&v| (v - bi).norm()));
        }
        let mut sorted = all.clone();
        sorted.sort_by(f64::total_cmp);
        let want = ((all.len() as f64 * measure) as usize).clamp(1, all.len());
        let s = sorted[want - 1];
        let g = f.grid_size();
        let mut set = Self::empty(f.rows(), f.grid_log2);
        for i in 0..f.rows() {
            for j in 0..g {
                if all[i * g + j] <= s {
                    set.set(i, j, true);
                }
            }
        }
        set
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn grid_size(&self) -> usize {
        1 << self.grid_log2
    }

    #[inline]
    pub fn get(&self, row: usize, cell: usize) -> bool {
        self.mask[row * self.grid_size() + cell]
    }

    #[inline]
    pub fn set(&mut self, row: usize, cell: usize, v: bool) {
        let g = self.grid_size();
        self.mask[row * g + cell] = v;
    }

    pub fn section(&self, row: usize) -> &[bool] {
        let g = self.grid_size();
        &self.mask[row * g..(row + 1) * g]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// `μ(E) = #cells / (S·G)`.
    pub fn measure(&self) -> f64 {
        self.count() as f64 / (self.rows * self.grid_size()) as f64
    }

    /// Length of the section `E_ω` for one row.
    pub fn section_measure(&self, row: usize) -> f64 {
        self.section(row).iter().filter(|&&b| b).count() as f64 / self.grid_size() as f64
    }

    /// `E + t` for a shift of `t_cells` grid cells: `(i, j) ∈ E+t ⟺
    /// (i, j - t) ∈ E`, cyclically.
    pub fn shifted(&self, t_cells: i64) -> Self {
        let g = self.grid_size() as i64;
        let mut out = Self::empty(self.rows, self.grid_log2);
        for i in 0..self.rows {
            for j in 0..g {
                let src = (j - t_cells).rem_euclid(g) as usize;
                if self.get(i, src) {
                    out.set(i, j as usize, true);
                }
            }
        }
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        assert_eq!(self.mask.len(), other.mask.len());
        Self {
            grid_log2: self.grid_log2,
            rows: self.rows,
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| a | b)
                .collect(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.mask.len(), other.mask.len());
        Self {
            grid_log2: self.grid_log2,
            rows: self.rows,
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(&a, &b)| a & b)
                .collect(),
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            grid_log2: self.grid_log2,
            rows: self.rows,
            mask: self.mask.iter().map(|&a| !a).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }
}

/// `Δ_t(E) = μ((E+t) ∖ E)` for a shift of `t_cells` grid cells.
pub fn delta_t(set: &ProductSet, t_cells: i64) -> f64 {
    let g = set.grid_size() as i64;
    let mut gained = 0usize;
    for i in 0..set.rows() {
        for j in 0..g {
            let in_shifted = set.get(i, (j - t_cells).rem_euclid(g) as usize);
            if in_shifted && !set.get(i, j as usize) {
                gained += 1;
            }
        }
    }
    gained as f64 / (set.rows() * set.grid_size()) as f64
}

/// `Δ_t(E)` for every grid lag at once, via per-row mask autocorrelation.
/// Counts are integers, so the transform output is rounded back exactly.
pub fn delta_all_lags(set: &ProductSet) -> Vec<f64> {
    let g = set.grid_size();
    let total_cells = (set.rows() * g) as f64;
    let mut overlap = vec![0.0f64; g];
    for i in 0..set.rows() {
        let mut buf: Vec<Complex64> = set
            .section(i)
            .iter()
            .map(|&b| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0))
            .collect();
        fft::forward(&mut buf);
        for v in buf.iter_mut() {
            *v = Complex64::new(v.norm_sqr(), 0.0);
        }
        fft::inverse(&mut buf);
        for (t, v) in buf.iter().enumerate() {
            overlap[t] += v.re / g as f64;
        }
    }
    let count = set.count() as f64;
    (0..g)
        .map(|t| {
            let joint = overlap[t].round();
            (count - joint) / total_cells
        })
        .collect()
}

/// `σ_F(r)` and the normalized coefficients `â_k(r) = a_k r^k / σ`.
pub fn sigma_and_hat(coeffs: &CoefficientSeq, r: f64) -> Result<(f64, CoefficientSeq)> {
    if coeffs.interpretation != Interpretation::Taylor {
        return Err(RfError::Argument(
            "sigma normalization applies to Taylor windows".into(),
        ));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(RfError::Argument(format!("radius {r} outside [0, 1)")));
    }
    if coeffs.is_zero() {
        return Err(RfError::Degenerate(
            "all-zero coefficients have no sigma normalization".into(),
        ));
    }
    let weighted: Vec<f64> = coeffs
        .values
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm_sqr() * r.powi(2 * k as i32))
        .collect();
    let sigma_sqr = pairwise_sum(&weighted);
    if sigma_sqr <= 0.0 {
        return Err(RfError::Degenerate(
            "sigma vanishes at this radius".into(),
        ));
    }
    let sigma = sigma_sqr.sqrt();
    let hat = CoefficientSeq::taylor(
        coeffs
            .values
            .iter()
            .enumerate()
            .map(|(k, &a)| a * r.powi(k as i32) / sigma)
            .collect(),
    )?;
    Ok((sigma, hat))
}
