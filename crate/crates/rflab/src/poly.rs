//! Complex polynomial utilities: Horner evaluation, simultaneous root
//! iteration (Aberth-Ehrlich), and a companion-matrix QR fallback for the
//! rare stalls.

use crate::error::{Result, RfError};
use num_complex::Complex64;

/// Evaluates `Σ coeffs[k] z^k` by Horner's rule.
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Coefficients of the derivative.
pub fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Monic expansion of `Π (z - roots[i])`.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        coeffs = next;
    }
    coeffs
}

/// Strips trailing (near-)zero leading coefficients relative to the largest.
fn effective_degree(coeffs: &[Complex64]) -> usize {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let mut deg = coeffs.len().saturating_sub(1);
    while deg > 0 && coeffs[deg].norm() <= 1e-300 * scale.max(1.0) {
        deg -= 1;
    }
    deg
}

/// All roots of the polynomial with the given coefficients (constant term
/// first). The leading coefficient must be nonzero. Roots come back in no
/// particular order; each satisfies `|p(root)| ≤ 1e-8 · ‖p‖ · max(1,|root|)^deg`
/// or an error is returned.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = effective_degree(coeffs);
    if coeffs.is_empty() || (deg == 0 && coeffs[0].norm() == 0.0) {
        return Err(RfError::Degenerate("zero polynomial has no defined roots".into()));
    }
    if coeffs[deg].norm() == 0.0 {
        return Err(RfError::Argument("leading coefficient is zero".into()));
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    let p = &coeffs[..=deg];
    match aberth(p) {
        Some(rs) if residuals_ok(p, &rs) => Ok(rs),
        _ => {
            let rs = companion_qr(p)?;
            let rs = polish(p, rs);
            if residuals_ok(p, &rs) {
                Ok(rs)
            } else {
                Err(RfError::Numeric(
                    "root finding failed the residual check after the companion fallback".into(),
                ))
            }
        }
    }
}

fn residuals_ok(coeffs: &[Complex64], roots: &[Complex64]) -> bool {
    let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let deg = coeffs.len() - 1;
    roots.iter().all(|&r| {
        let bound = 1e-8 * norm * r.norm().max(1.0).powi(deg as i32);
        eval(coeffs, r).norm() <= bound
    })
}

/// Aberth-Ehrlich simultaneous iteration. Returns `None` on stall.
fn aberth(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let dcoeffs = derivative(coeffs);

    // Cauchy-style radius and slightly irrational angular spacing for the
    // initial circle; keeps starting points off any symmetry axis.
    let lead = coeffs[deg].norm();
    let radius = 1.0
        + coeffs[..deg]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0f64, f64::max);
    let radius = radius.min(1e6).max(1e-6);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|i| {
            let ang = 2.0 * std::f64::consts::PI * (i as f64 + 0.354) / deg as f64 + 0.7;
            Complex64::new(radius * 0.8 * ang.cos(), radius * 0.8 * ang.sin())
        })
        .collect();

    for _iter in 0..400 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let pz = eval(coeffs, z[i]);
            let dpz = eval(&dcoeffs, z[i]);
            if pz.norm() == 0.0 {
                continue;
            }
            let newton = if dpz.norm() > 0.0 {
                pz / dpz
            } else {
                Complex64::new(1e-8, 1e-8)
            };
            let mut repulse = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() < 1e-300 {
                        return None;
                    }
                    repulse += Complex64::new(1.0, 0.0) / d;
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulse;
            let step = if denom.norm() > 1e-300 { newton / denom } else { newton };
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-14 {
            return Some(z);
        }
    }
    None
}

/// Guarded Newton polish: a step is kept only while it shrinks the
/// residual, so clustered roots cannot be made worse by noise in p/p'.
fn polish(coeffs: &[Complex64], mut roots: Vec<Complex64>) -> Vec<Complex64> {
    let dcoeffs = derivative(coeffs);
    for r in roots.iter_mut() {
        let mut best = *r;
        let mut best_val = eval(coeffs, best).norm();
        let mut cur = *r;
        for _ in 0..20 {
            let pz = eval(coeffs, cur);
            let dpz = eval(&dcoeffs, cur);
            if dpz.norm() < 1e-300 {
                break;
            }
            let step = pz / dpz;
            cur -= step;
            let val = eval(coeffs, cur).norm();
            if val < best_val {
                best_val = val;
                best = cur;
            }
            if step.norm() <= 1e-15 * cur.norm().max(1.0) {
                break;
            }
        }
        *r = best;
    }
    roots
}

/// Eigenvalues of the companion matrix by shifted Hessenberg QR with
/// Givens rotations. The companion matrix is already upper Hessenberg.
fn companion_qr(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let n = deg;
    // h[i][j], upper Hessenberg companion of the monic polynomial.
    let mut h = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 1..n {
        h[i][i - 1] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        h[i][n - 1] = -coeffs[i] / lead;
    }

    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is 0..hi
    let mut iters_since_deflate = 0usize;
    let mut total_iters = 0usize;
    while hi > 0 {
        if total_iters > 200 * n {
            return Err(RfError::Numeric(
                "companion QR exceeded the iteration budget".into(),
            ));
        }
        // Deflate tiny subdiagonals.
        let mut deflated = false;
        for i in (1..hi).rev() {
            let tol = 1e-16 * (h[i - 1][i - 1].norm() + h[i][i].norm()).max(1e-300);
            if h[i][i - 1].norm() <= tol {
                if i == hi - 1 {
                    eigs.push(h[hi - 1][hi - 1]);
                    hi -= 1;
                    iters_since_deflate = 0;
                    deflated = true;
                    break;
                }
            }
        }
        if deflated {
            continue;
        }
        if hi == 1 {
            eigs.push(h[0][0]);
            hi = 0;
            continue;
        }

        // Wilkinson shift from the trailing 2x2 block; occasional ad-hoc
        // shift to break symmetry stalls.
        let a = h[hi - 2][hi - 2];
        let b = h[hi - 2][hi - 1];
        let c = h[hi - 1][hi - 2];
        let d = h[hi - 1][hi - 1];
        let tr = a + d;
        let det = a * d - b * c;
        let disc = (tr * tr - det * 4.0).sqrt();
        let l1 = (tr + disc) * 0.5;
        let l2 = (tr - disc) * 0.5;
        let mut shift = if (l1 - d).norm() < (l2 - d).norm() { l1 } else { l2 };
        if iters_since_deflate > 0 && iters_since_deflate % 12 == 0 {
            shift += Complex64::new(0.5, 0.3) * c.norm();
        }

        for i in 0..hi {
            h[i][i] -= shift;
        }
        // QR by Givens rotations on each subdiagonal, then RQ.
        let mut rots = Vec::with_capacity(hi - 1);
        for i in 0..hi - 1 {
            let x = h[i][i];
            let y = h[i + 1][i];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cg, sg) = if r < 1e-300 {
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                (x.conj() / r, y.conj() / r)
            };
            for j in i..hi {
                let hij = h[i][j];
                let hi1j = h[i + 1][j];
                h[i][j] = cg * hij + sg * hi1j;
                h[i + 1][j] = -sg.conj() * hij + cg.conj() * hi1j;
            }
            rots.push((cg, sg));
        }
        for (i, (cg, sg)) in rots.iter().enumerate() {
            for r_idx in 0..(i + 2).min(hi) {
                let hri = h[r_idx][i];
                let hri1 = h[r_idx][i + 1];
                h[r_idx][i] = hri * cg.conj() + hri1 * sg.conj();
                h[r_idx][i + 1] = -hri * *sg + hri1 * *cg;
            }
        }
        for i in 0..hi {
            h[i][i] += shift;
        }
        iters_since_deflate += 1;
        total_iters += 1;
    }
    Ok(eigs)
}
