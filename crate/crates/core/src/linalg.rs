//! Dense matrices and the two eigensolvers behind the analyses.
//!
//! The matrices here are tiny by numerical-linear-algebra standards (tens
//! of rows), so the solvers favor robustness and testability over blocked
//! performance: cyclic Jacobi for symmetric Gram matrices, and for general
//! real matrices closed-form characteristic roots up to 4×4 with a
//! Hessenberg + Francis double-shift QR fallback above that. Eigenvectors
//! of the general solver come from a full-pivot null-space solve of
//! `A - γI`, which also yields proper bases for repeated eigenvalues.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> DMat {
        DMat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> DMat {
        let mut m = DMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<DMat> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(DMat {
            rows: n_rows,
            cols: n_cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> DMat {
        let mut out = DMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &DMat) -> Result<DMat> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the off-diagonal part.
    fn off_diagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    sum += self[(i, j)] * self[(i, j)];
                }
            }
        }
        sum.sqrt()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for DMat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen decomposition of a symmetric matrix: `eigenvalues` descending,
/// `vectors` holding the matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub eigenvalues: Vec<f64>,
    pub vectors: DMat,
}

/// Off-diagonal convergence threshold of the Jacobi sweep, relative to the
/// input's Frobenius norm.
const JACOBI_RELATIVE_THRESHOLD: f64 = 1e-12;

/// Sweep cap; exceeding it signals pathological input.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigen decomposition of a symmetric matrix.
///
/// Sweeps Givens rotations over every off-diagonal pair until the
/// off-diagonal Frobenius norm falls below 1e-12 of the input norm.
/// Eigenvalues come back sorted descending; each eigenvector column is
/// sign-normalized so its largest-magnitude component is positive.
pub fn jacobi_eigen_sym(a: &DMat) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "symmetric eigen needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows();
    let mut work = a.clone();
    let mut q = DMat::identity(n);
    let threshold = JACOBI_RELATIVE_THRESHOLD * a.frobenius_norm();
    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if work.off_diagonal_norm() <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                rotate(&mut work, &mut q, p, r);
            }
        }
    }
    if !converged && work.off_diagonal_norm() > threshold {
        return Err(Error::Convergence(format!(
            "Jacobi sweep cap {JACOBI_MAX_SWEEPS} exceeded"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(j, j)].total_cmp(&work[(i, i)]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| work[(i, i)]).collect();
    let mut vectors = DMat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        let column = sign_normalize(q.column(old_col));
        for i in 0..n {
            vectors[(i, new_col)] = column[i];
        }
    }
    Ok(SymmetricEigen {
        eigenvalues,
        vectors,
    })
}

/// One two-sided Givens rotation zeroing `work[(p, r)]`.
fn rotate(work: &mut DMat, q: &mut DMat, p: usize, r: usize) {
    let apr = work[(p, r)];
    if apr == 0.0 {
        return;
    }
    let tau = (work[(r, r)] - work[(p, p)]) / (2.0 * apr);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = work.rows();
    for k in 0..n {
        let wkp = work[(k, p)];
        let wkr = work[(k, r)];
        work[(k, p)] = c * wkp - s * wkr;
        work[(k, r)] = s * wkp + c * wkr;
    }
    for k in 0..n {
        let wpk = work[(p, k)];
        let wrk = work[(r, k)];
        work[(p, k)] = c * wpk - s * wrk;
        work[(r, k)] = s * wpk + c * wrk;
    }
    for k in 0..n {
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = c * qkp - s * qkr;
        q[(k, r)] = s * qkp + c * qkr;
    }
}

/// Flips a vector's sign so the first largest-magnitude component is
/// positive.
fn sign_normalize(mut v: Vec<f64>) -> Vec<f64> {
    let mut best = 0;
    for (i, value) in v.iter().enumerate() {
        if value.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).copied().unwrap_or(0.0) < 0.0 {
        for value in &mut v {
            *value = -*value;
        }
    }
    v
}

/// Eigen decomposition of a general real matrix; the spectrum may be
/// complex. `vectors[k]` is the unit eigenvector of `eigenvalues[k]`,
/// phase-normalized so its largest-magnitude component is real positive.
#[derive(Debug, Clone)]
pub struct GeneralEigen {
    pub eigenvalues: Vec<Complex64>,
    pub vectors: Vec<Vec<Complex64>>,
}

/// Residual bound of the general solver, relative to `‖A‖_F`.
const GENERAL_EIGEN_RESIDUAL: f64 = 1e-8;

/// General real eigensolver.
///
/// Up to 4×4 the characteristic polynomial (Faddeev–LeVerrier) is solved
/// in closed form and Newton-polished; larger matrices go through
/// Householder Hessenberg reduction and Francis double-shift QR.
/// Imaginary parts below noise are squashed, remaining complex eigenvalues
/// are paired into exact conjugates, and every returned pair satisfies
/// `‖Av − γv‖ ≤ 1e-8·‖A‖_F`.
pub fn eigen_general(a: &DMat) -> Result<GeneralEigen> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "general eigen needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(GeneralEigen {
            eigenvalues: Vec::new(),
            vectors: Vec::new(),
        });
    }
    let scale = a.frobenius_norm();

    let mut eigenvalues = if n <= 4 {
        let coeffs = characteristic_polynomial(a);
        let mut roots = polynomial_roots(&coeffs)?;
        for root in &mut roots {
            *root = newton_polish(&coeffs, *root);
        }
        roots
    } else {
        let hessenberg = hessenberg_reduce(a);
        francis_qr_eigenvalues(hessenberg)?
    };

    realify_and_pair(&mut eigenvalues, scale);
    eigenvalues.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });

    let vectors = eigenvectors_by_null_space(a, &eigenvalues)?;

    let residual_bound = GENERAL_EIGEN_RESIDUAL * scale.max(f64::MIN_POSITIVE);
    for (value, vector) in eigenvalues.iter().zip(&vectors) {
        let mut residual = 0.0f64;
        for i in 0..n {
            let mut avi = Complex64::new(0.0, 0.0);
            for j in 0..n {
                avi += a[(i, j)] * vector[j];
            }
            residual += (avi - value * vector[i]).norm_sqr();
        }
        if residual.sqrt() > residual_bound {
            return Err(Error::Convergence(format!(
                "eigenpair residual {:.3e} exceeds bound {:.3e}",
                residual.sqrt(),
                residual_bound
            )));
        }
    }

    Ok(GeneralEigen {
        eigenvalues,
        vectors,
    })
}

/// Monic characteristic polynomial by the Faddeev–LeVerrier recurrence.
/// Returned ascending: `coeffs[k]` multiplies λ^k, `coeffs[n] = 1`.
fn characteristic_polynomial(a: &DMat) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = a.clone();
    for k in 1..=n {
        let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
        let c = -trace / k as f64;
        coeffs[n - k] = c;
        if k == n {
            break;
        }
        for i in 0..n {
            m[(i, i)] += c;
        }
        m = a.matmul(&m).expect("square by construction");
    }
    coeffs
}

/// Evaluates a real-coefficient polynomial and its derivative at `z`.
fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut derivative = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        derivative = derivative * z + value;
        value = value * z + c;
    }
    (value, derivative)
}

fn newton_polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    for _ in 0..6 {
        let (value, derivative) = horner(coeffs, z);
        if derivative.norm() == 0.0 {
            break;
        }
        let step = value / derivative;
        z -= step;
        if step.norm() <= 1e-14 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Closed-form roots of a monic polynomial of degree 1 to 4 (ascending
/// coefficients).
fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let degree = coeffs.len() - 1;
    match degree {
        1 => Ok(vec![Complex64::new(-coeffs[0], 0.0)]),
        2 => Ok(quadratic_roots(coeffs[1], coeffs[0])),
        3 => Ok(cubic_roots(coeffs[2], coeffs[1], coeffs[0])),
        4 => Ok(quartic_roots(coeffs[3], coeffs[2], coeffs[1], coeffs[0])),
        other => Err(Error::Dimension(format!(
            "no closed form for degree {other}"
        ))),
    }
}

/// Roots of λ² + bλ + c.
fn quadratic_roots(b: f64, c: f64) -> Vec<Complex64> {
    let disc = Complex64::new(b * b - 4.0 * c, 0.0).sqrt();
    let b = Complex64::new(b, 0.0);
    vec![(-b + disc) / 2.0, (-b - disc) / 2.0]
}

/// Roots of λ³ + aλ² + bλ + c by Cardano's method in complex arithmetic.
fn cubic_roots(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    // Depress: λ = y − a/3 gives y³ + py + q.
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = Complex64::new(-a / 3.0, 0.0);
    if p == 0.0 && q == 0.0 {
        return vec![shift; 3];
    }
    let disc = Complex64::new(q * q / 4.0 + p * p * p / 27.0, 0.0).sqrt();
    let base = Complex64::new(-q / 2.0, 0.0);
    // Pick the larger cube-root argument for numerical headroom.
    let u0 = if (base + disc).norm() >= (base - disc).norm() {
        base + disc
    } else {
        base - disc
    }
    .cbrt();
    let omega = Complex64::new(-0.5, 0.75f64.sqrt());
    (0..3)
        .map(|k| {
            let u = u0 * omega.powu(k);
            let y = if u.norm() == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                u - Complex64::new(p / 3.0, 0.0) / u
            };
            y + shift
        })
        .collect()
}

/// Roots of λ⁴ + aλ³ + bλ² + cλ + d by Ferrari's method.
fn quartic_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<Complex64> {
    // Depress: λ = y − a/4 gives y⁴ + py² + qy + r.
    let p = b - 3.0 * a * a / 8.0;
    let q = c - a * b / 2.0 + a * a * a / 8.0;
    let r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a * a * a * a / 256.0;
    let shift = Complex64::new(-a / 4.0, 0.0);

    let scale = p.abs().max(q.abs()).max(r.abs()).max(1.0);
    if q.abs() <= 1e-14 * scale {
        // Biquadratic: y² solves z² + pz + r.
        let mut roots = Vec::with_capacity(4);
        for z in quadratic_roots(p, r) {
            let y = z.sqrt();
            roots.push(y + shift);
            roots.push(-y + shift);
        }
        return roots;
    }

    // Resolvent cubic 8m³ + 8pm² + (2p² − 8r)m − q² = 0; any root with
    // 2m ≠ 0 splits the quartic into two quadratics.
    let resolvent = cubic_roots(p, (2.0 * p * p - 8.0 * r) / 8.0, -q * q / 8.0);
    let m = resolvent
        .into_iter()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .expect("cubic has three roots");
    let s = (2.0 * m).sqrt();
    let q_over = Complex64::new(q, 0.0) / (2.0 * s);
    let half_p_plus_m = Complex64::new(p / 2.0, 0.0) + m;
    let mut roots = Vec::with_capacity(4);
    // y² + sy + (p/2 + m − q/(2s)) and y² − sy + (p/2 + m + q/(2s)).
    for (linear, constant) in [(s, half_p_plus_m - q_over), (-s, half_p_plus_m + q_over)] {
        let disc = (linear * linear - 4.0 * constant).sqrt();
        roots.push((-linear + disc) / 2.0 + shift);
        roots.push((-linear - disc) / 2.0 + shift);
    }
    roots
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg_reduce(a: &DMat) -> DMat {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let mut norm = 0.0;
        for i in k + 1..n {
            norm += h[(i, k)] * h[(i, k)];
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if h[(k + 1, k)] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (0..n)
            .map(|i| if i > k { h[(i, k)] } else { 0.0 })
            .collect();
        v[k + 1] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for value in &mut v {
            *value /= vnorm;
        }
        // H ← (I − 2vvᵀ) H (I − 2vvᵀ)
        for j in 0..n {
            let dot: f64 = (k + 1..n).map(|i| v[i] * h[(i, j)]).sum();
            for i in k + 1..n {
                h[(i, j)] -= 2.0 * v[i] * dot;
            }
        }
        for i in 0..n {
            let dot: f64 = (k + 1..n).map(|j| v[j] * h[(i, j)]).sum();
            for j in k + 1..n {
                h[(i, j)] -= 2.0 * v[j] * dot;
            }
        }
    }
    h
}

/// Iteration cap per eigenvalue of the QR stage.
const QR_MAX_ITERATIONS: usize = 50;

/// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues
/// only. Classic algorithm (Wilkinson's, as in the widely ported hqr
/// routines), with exceptional shifts after 10 and 20 stalled iterations.
fn francis_qr_eigenvalues(mut h: DMat) -> Result<Vec<Complex64>> {
    let size = h.rows();
    let mut eigenvalues: Vec<Complex64> = Vec::with_capacity(size);
    let eps = f64::EPSILON;
    let norm: f64 = {
        let mut sum = 0.0;
        for i in 0..size {
            for j in i.saturating_sub(1)..size {
                sum += h[(i, j)].abs();
            }
        }
        sum
    };
    if norm == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); size]);
    }

    let mut n = size as isize - 1;
    let mut exshift = 0.0;
    let mut iter = 0usize;
    while n >= 0 {
        // Find the smallest l with a negligible subdiagonal below it.
        let mut l = n;
        while l > 0 {
            let s = h[(l as usize - 1, l as usize - 1)].abs() + h[(l as usize, l as usize)].abs();
            let s = if s == 0.0 { norm } else { s };
            if h[(l as usize, l as usize - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One real eigenvalue deflates.
            eigenvalues.push(Complex64::new(h[(n as usize, n as usize)] + exshift, 0.0));
            n -= 1;
            iter = 0;
            continue;
        }
        let nn = n as usize;
        if l == n - 1 {
            // A 2x2 block deflates to a real or conjugate pair.
            let w = h[(nn, nn - 1)] * h[(nn - 1, nn)];
            let p = (h[(nn - 1, nn - 1)] - h[(nn, nn)]) / 2.0;
            let q = p * p + w;
            let z = q.abs().sqrt();
            let x = h[(nn, nn)] + exshift;
            if q >= 0.0 {
                let z = if p >= 0.0 { p + z } else { p - z };
                eigenvalues.push(Complex64::new(x + z, 0.0));
                eigenvalues.push(Complex64::new(
                    if z != 0.0 { x - w / z } else { x + z },
                    0.0,
                ));
            } else {
                eigenvalues.push(Complex64::new(x + p, z));
                eigenvalues.push(Complex64::new(x + p, -z));
            }
            n -= 2;
            iter = 0;
            continue;
        }

        if iter == QR_MAX_ITERATIONS {
            return Err(Error::Convergence(format!(
                "QR iteration cap {QR_MAX_ITERATIONS} exceeded"
            )));
        }

        let mut x = h[(nn, nn)];
        let mut y = h[(nn - 1, nn - 1)];
        let mut w = h[(nn, nn - 1)] * h[(nn - 1, nn)];
        if iter == 10 || iter == 20 {
            // Exceptional shift.
            exshift += x;
            for i in 0..=nn {
                h[(i, i)] -= x;
            }
            let s = h[(nn, nn - 1)].abs() + h[(nn - 1, nn - 2)].abs();
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }
        iter += 1;

        // Look for two consecutive small subdiagonals.
        let lu = l as usize;
        let mut m = nn - 2;
        let (mut p, mut q, mut r);
        loop {
            let z = h[(m, m)];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / h[(m + 1, m)] + h[(m, m + 1)];
            q = h[(m + 1, m + 1)] - z - rr - ss;
            r = h[(m + 2, m + 1)];
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == lu {
                break;
            }
            let lhs = h[(m, m - 1)].abs() * (q.abs() + r.abs());
            let rhs = p.abs()
                * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
            if lhs < eps * rhs {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=nn {
            h[(i, i - 2)] = 0.0;
            if i > m + 2 {
                h[(i, i - 3)] = 0.0;
            }
        }

        // Double QR sweep over rows l..n.
        for k in m..nn {
            let notlast = k != nn - 1;
            if k != m {
                p = h[(k, k - 1)];
                q = h[(k + 1, k - 1)];
                r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                x = p.abs() + q.abs() + r.abs();
                if x == 0.0 {
                    continue;
                }
                p /= x;
                q /= x;
                r /= x;
            }
            let s = (p * p + q * q + r * r).sqrt();
            let s = if p < 0.0 { -s } else { s };
            if s == 0.0 {
                continue;
            }
            if k != m {
                h[(k, k - 1)] = -s * x;
            } else if lu != m {
                h[(k, k - 1)] = -h[(k, k - 1)];
            }
            p += s;
            x = p / s;
            y = q / s;
            let z = r / s;
            q /= p;
            r /= p;

            for j in k..size {
                let mut pp = h[(k, j)] + q * h[(k + 1, j)];
                if notlast {
                    pp += r * h[(k + 2, j)];
                    h[(k + 2, j)] -= pp * z;
                }
                h[(k, j)] -= pp * x;
                h[(k + 1, j)] -= pp * y;
            }
            let upper = nn.min(k + 3);
            for i in 0..=upper {
                let mut pp = x * h[(i, k)] + y * h[(i, k + 1)];
                if notlast {
                    pp += z * h[(i, k + 2)];
                    h[(i, k + 2)] -= pp * r;
                }
                h[(i, k)] -= pp;
                h[(i, k + 1)] -= pp * q;
            }
        }
    }
    Ok(eigenvalues)
}

/// Squashes noise-level imaginary parts to zero and welds the remaining
/// complex eigenvalues into exact conjugate pairs.
fn realify_and_pair(eigenvalues: &mut [Complex64], scale: f64) {
    let zero_tolerance = 1e-9 * (1.0 + scale);
    for value in eigenvalues.iter_mut() {
        if value.im.abs() <= zero_tolerance {
            value.im = 0.0;
        }
    }
    let mut pool: Vec<usize> = (0..eigenvalues.len())
        .filter(|&i| eigenvalues[i].im != 0.0)
        .collect();
    while let Some(position) = pool
        .iter()
        .enumerate()
        .max_by(|(_, &a), (_, &b)| {
            eigenvalues[a].im.abs().total_cmp(&eigenvalues[b].im.abs())
        })
        .map(|(pos, _)| pos)
    {
        let i = pool.swap_remove(position);
        let target = eigenvalues[i].conj();
        let Some(partner_position) = pool
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| {
                (eigenvalues[a] - target)
                    .norm()
                    .total_cmp(&(eigenvalues[b] - target).norm())
            })
            .map(|(pos, _)| pos)
        else {
            // No partner left; the imaginary part was spurious.
            eigenvalues[i].im = 0.0;
            continue;
        };
        let j = pool.swap_remove(partner_position);
        // The mean is oriented like eigenvalues[i]; the partner takes the
        // conjugate.
        let mean = (eigenvalues[i] + eigenvalues[j].conj()) / 2.0;
        eigenvalues[i] = mean;
        eigenvalues[j] = mean.conj();
    }
}

/// Eigenvectors by null-space extraction of `A − γI`, with multiplicity
/// handled by walking the null-space basis.
fn eigenvectors_by_null_space(
    a: &DMat,
    eigenvalues: &[Complex64],
) -> Result<Vec<Vec<Complex64>>> {
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(eigenvalues.len());
    let mut index = 0;
    while index < eigenvalues.len() {
        let value = eigenvalues[index];
        // Count how many copies of this eigenvalue sit together.
        let mut multiplicity = 1;
        while index + multiplicity < eigenvalues.len()
            && (eigenvalues[index + multiplicity] - value).norm()
                <= 1e-7 * (1.0 + value.norm())
        {
            multiplicity += 1;
        }
        let basis = null_space_basis(a, value, multiplicity);
        for copy in 0..multiplicity {
            let raw = basis[copy.min(basis.len() - 1)].clone();
            vectors.push(normalize_phase(raw));
        }
        index += multiplicity;
    }
    Ok(vectors)
}

/// A basis (up to `want` vectors) of the null space of `A − γI`, by
/// full-pivot Gaussian elimination in complex arithmetic. Always returns
/// at least one vector: if the shifted matrix is numerically regular, the
/// weakest pivot direction serves as the null vector.
fn null_space_basis(a: &DMat, gamma: Complex64, want: usize) -> Vec<Vec<Complex64>> {
    let n = a.rows();
    let mut m: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut entry = Complex64::new(a[(i, j)], 0.0);
                    if i == j {
                        entry -= gamma;
                    }
                    entry
                })
                .collect()
        })
        .collect();
    let mut column_order: Vec<usize> = (0..n).collect();
    let initial_max = m
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    let pivot_tolerance = 1e-10 * initial_max.max(1.0);

    let mut rank = n;
    for step in 0..n {
        // Full pivot over the trailing submatrix.
        let mut best = (step, step);
        let mut best_norm = 0.0;
        for i in step..n {
            for j in step..n {
                let norm = m[i][j].norm();
                if norm > best_norm {
                    best_norm = norm;
                    best = (i, j);
                }
            }
        }
        if best_norm <= pivot_tolerance {
            rank = step;
            break;
        }
        m.swap(step, best.0);
        if best.1 != step {
            for row in &mut m {
                row.swap(step, best.1);
            }
            column_order.swap(step, best.1);
        }
        for i in step + 1..n {
            let factor = m[i][step] / m[step][step];
            if factor.norm() == 0.0 {
                continue;
            }
            for j in step..n {
                let sub = factor * m[step][j];
                m[i][j] -= sub;
            }
        }
    }
    // A numerically regular matrix still owes us one direction: treat the
    // weakest pivot as free.
    if rank == n {
        rank = n - 1;
    }

    let free = (rank..n).take(want.max(1));
    let mut basis = Vec::new();
    for free_index in free {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        x[free_index] = Complex64::new(1.0, 0.0);
        for i in (0..rank).rev() {
            let mut sum = Complex64::new(0.0, 0.0);
            for j in i + 1..n {
                sum += m[i][j] * x[j];
            }
            x[i] = -sum / m[i][i];
        }
        let mut vector = vec![Complex64::new(0.0, 0.0); n];
        for (position, &original_column) in column_order.iter().enumerate() {
            vector[original_column] = x[position];
        }
        basis.push(vector);
    }
    basis
}

/// Scales to unit norm and rotates the phase so the largest-magnitude
/// component is real positive.
fn normalize_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in &mut v {
            *z /= norm;
        }
    }
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() {
            best = i;
        }
    }
    let pivot = v[best];
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        for z in &mut v {
            *z *= phase;
        }
    }
    v
}
