//! Cyclic Jacobi eigendecomposition for small dense complex Hermitian
//! matrices. Matrices here are tiny (shift Grams of order ≤ 65, bilinear
//! operators on coefficient windows), so the quadratic sweep cost is
//! irrelevant and the method's accuracy and simplicity win.

use crate::error::{Result, RfError};
use num_complex::Complex64;

/// Dense Hermitian matrix stored row-major.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim);
            data.extend_from_slice(row);
        }
        Self { dim, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn off_norm_sqr(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    acc += self.get(i, j).norm_sqr();
                }
            }
        }
        acc
    }

    pub fn mat_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// One eigenpair: real eigenvalue and unit eigenvector.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<Complex64>,
}

/// Full eigendecomposition by cyclic Jacobi rotations. Converged when the
/// off-diagonal Frobenius norm falls below `1e-12 · |trace|` (or an
/// absolute floor for traceless input).
pub fn eigen_hermitian(a: &HermitianMatrix) -> Result<Vec<EigenPair>> {
    let n = a.dim;
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = a
        .trace()
        .abs()
        .max(a.hs_norm())
        .max(f64::MIN_POSITIVE);
    let target = (1e-12 * scale).powi(2);

    let mut m = a.clone();
    // Symmetrize roundoff so the iteration sees an exactly Hermitian matrix.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m.get(i, j) + m.get(j, i).conj());
            m.set(i, j, avg);
            m.set(j, i, avg.conj());
        }
        let d = m.get(i, i);
        m.set(i, i, Complex64::new(d.re, 0.0));
    }

    let mut vecs = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        vecs[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let mut converged = false;
    for _sweep in 0..60 {
        if m.off_norm_sqr() <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = m.get(p, q);
                let babs = beta.norm();
                if babs * babs <= target / (n * n) as f64 {
                    continue;
                }
                let phase = beta / babs;
                let alpha = m.get(p, p).re;
                let gamma = m.get(q, q).re;
                let theta = (gamma - alpha) / (2.0 * babs);
                let t = if theta >= 0.0 {
                    -1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = t * c;
                let s = sigma * phase.conj();

                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = m.get(i, p);
                    let aiq = m.get(i, q);
                    let new_p = aip * c + aiq * s;
                    let new_q = -aip * s.conj() + aiq * c;
                    m.set(i, p, new_p);
                    m.set(p, i, new_p.conj());
                    m.set(i, q, new_q);
                    m.set(q, i, new_q.conj());
                }
                let new_alpha = c * c * alpha + 2.0 * c * sigma * babs + sigma * sigma * gamma;
                let new_gamma = sigma * sigma * alpha - 2.0 * c * sigma * babs + c * c * gamma;
                m.set(p, p, Complex64::new(new_alpha, 0.0));
                m.set(q, q, Complex64::new(new_gamma, 0.0));
                m.set(p, q, Complex64::new(0.0, 0.0));
                m.set(q, p, Complex64::new(0.0, 0.0));

                for i in 0..n {
                    let vip = vecs[i * n + p];
                    let viq = vecs[i * n + q];
                    vecs[i * n + p] = vip * c + viq * s;
                    vecs[i * n + q] = -vip * s.conj() + viq * c;
                }
            }
        }
    }
    if !converged && m.off_norm_sqr() > target {
        return Err(RfError::Numeric(format!(
            "jacobi eigensolver did not reach off-norm {:.3e} (got {:.3e}) on a {n}x{n} matrix",
            target.sqrt(),
            m.off_norm_sqr().sqrt()
        )));
    }

    Ok((0..n)
        .map(|j| EigenPair {
            value: m.get(j, j).re,
            vector: (0..n).map(|i| vecs[i * n + j]).collect(),
        })
        .collect())
}

/// Eigenpairs sorted by eigenvalue, smallest first.
pub fn eigen_sorted_ascending(a: &HermitianMatrix) -> Result<Vec<EigenPair>> {
    let mut pairs = eigen_hermitian(a)?;
    pairs.sort_by(|x, y| x.value.total_cmp(&y.value));
    Ok(pairs)
}

/// Eigenpairs sorted by |eigenvalue|, largest first.
pub fn eigen_sorted_by_magnitude(a: &HermitianMatrix) -> Result<Vec<EigenPair>> {
    let mut pairs = eigen_hermitian(a)?;
    pairs.sort_by(|x, y| y.value.abs().total_cmp(&x.value.abs()));
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn random_hermitian(dim: usize, seed: u64) -> HermitianMatrix {
        let mut m = HermitianMatrix::zero(dim);
        for i in 0..dim {
            m.set(
                i,
                i,
                Complex64::new(rng::uniform_in(seed, 0, i as u64, -1.0, 1.0), 0.0),
            );
            for j in (i + 1)..dim {
                let idx = (i * dim + j) as u64;
                let v = Complex64::new(
                    rng::uniform_in(seed, 1, idx, -1.0, 1.0),
                    rng::uniform_in(seed, 2, idx, -1.0, 1.0),
                );
                m.set(i, j, v);
                m.set(j, i, v.conj());
            }
        }
        m
    }

    #[test]
    fn two_by_two_known_eigenvalues() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = HermitianMatrix::from_rows(&[
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)],
        ]);
        let pairs = eigen_sorted_ascending(&m).unwrap();
        assert!((pairs[0].value - 1.0).abs() < 1e-12);
        assert!((pairs[1].value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn residuals_and_orthonormality_on_random_matrices() {
        for seed in 1..6u64 {
            let dim = 3 + 2 * seed as usize;
            let m = random_hermitian(dim, seed);
            let pairs = eigen_hermitian(&m).unwrap();
            let scale = m.hs_norm();
            for p in &pairs {
                let av = m.mat_vec(&p.vector);
                let res: f64 = av
                    .iter()
                    .zip(&p.vector)
                    .map(|(a, v)| (a - v * p.value).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-10 * scale.max(1.0), "residual {res}");
                let norm: f64 = p.vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
            for a in 0..pairs.len() {
                for b in (a + 1)..pairs.len() {
                    let dot: Complex64 = pairs[a]
                        .vector
                        .iter()
                        .zip(&pairs[b].vector)
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    assert!(dot.norm() < 1e-10, "eigenvectors not orthogonal");
                }
            }
            // Trace and HS identities.
            let tr: f64 = pairs.iter().map(|p| p.value).sum();
            assert!((tr - m.trace()).abs() <= 1e-10 * scale.max(1.0));
            let hs2: f64 = pairs.iter().map(|p| p.value * p.value).sum();
            assert!((hs2 - m.hs_norm().powi(2)).abs() <= 1e-9 * scale.max(1.0).powi(2));
        }
    }

    #[test]
    fn rank_one_matrix_has_single_nonzero_eigenvalue() {
        // v v* for unit v: eigenvalues 1, 0, 0.
        let v = [
            Complex64::new(0.5, 0.5),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.5),
        ];
        let mut m = HermitianMatrix::zero(3);
        for i in 0..3 {
            for j in 0..3 {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        let pairs = eigen_sorted_by_magnitude(&m).unwrap();
        assert!((pairs[0].value - 1.0).abs() < 1e-12);
        assert!(pairs[1].value.abs() < 1e-12);
        assert!(pairs[2].value.abs() < 1e-12);
    }
}
