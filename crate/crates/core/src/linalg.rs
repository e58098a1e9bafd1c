//! Dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Absolute eigenvalue floor used when checking positivity.
pub const PSD_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn kron_all<'a>(mats: impl IntoIterator<Item = &'a Mat>) -> Mat {
    mats.into_iter()
        .fold(Mat::from_element(1, 1, cr(1.0)), |acc, m| acc.kronecker(m))
}

pub fn kron_vec(a: &Vector, b: &Vector) -> Vector {
    a.kronecker(b)
}

/// Hermitian part `(m + m†)/2`.
pub fn hermitian_part(m: &Mat) -> Mat {
    (m + m.adjoint()) * cr(0.5)
}

/// The QL iteration occasionally returns NaN on exactly decoupled inputs. A
/// fixed pseudo-random rotation breaks the structure; results are rotated back.
const EIGEN_RETRIES: u64 = 4;

fn finite_eigen(h: Mat, vectors: bool) -> (DVector<f64>, Option<Mat>) {
    let n = h.nrows();
    let mut w: Option<Mat> = None;
    for attempt in 0..=EIGEN_RETRIES {
        let a = match &w {
            Some(w) => hermitian_part(&(w.adjoint() * &h * w)),
            None => h.clone(),
        };
        let (values, vecs) = if vectors {
            let e = a.symmetric_eigen();
            (e.eigenvalues, Some(e.eigenvectors))
        } else {
            (a.symmetric_eigenvalues(), None)
        };
        let ok = values.iter().all(|v| v.is_finite()) && vecs.as_ref().is_none_or(|v| v.iter().all(|z| z.is_finite()));
        if ok {
            let vecs = match (&w, vecs) {
                (Some(w), Some(v)) => Some(w * v),
                (_, v) => v,
            };
            return (values, vecs);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(attempt);
        w = Some(haar_unitary(n, &mut rng));
    }
    panic!("hermitian eigen-decomposition did not produce finite values");
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let (eigenvalues, eigenvectors) = finite_eigen(hermitian_part(m), true);
    let eigenvectors = eigenvectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
    let values = order.iter().map(|&i| eigenvalues[i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = finite_eigen(hermitian_part(m), false).0.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(m: &Mat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Reassembles `V f(Λ) V†` from an eigen-decomposition.
pub fn spectral_map(values: &[f64], vectors: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        let mut col = scaled.column_mut(j);
        col *= cr(f(v));
    }
    &scaled * vectors.adjoint()
}

/// Square root of a positive semidefinite matrix. Eigenvalues down to
/// `-PSD_TOL` (scaled by the spectral radius) are clipped to zero.
pub fn psd_sqrt(m: &Mat) -> Result<Mat> {
    let (values, vectors) = hermitian_eigen(m);
    let scale = values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    if let Some(&lo) = values.first() {
        if lo < -PSD_TOL * scale {
            return Err(Error::NotPsd { min_eigenvalue: lo });
        }
    }
    Ok(spectral_map(&values, &vectors, |v| v.max(0.0).sqrt()))
}

/// Pseudo-inverse square root on the support (eigenvalues above `cutoff`)
/// together with the support projector.
pub fn psd_pinv_sqrt(m: &Mat, cutoff: f64) -> (Mat, Mat) {
    let (values, vectors) = hermitian_eigen(m);
    let inv = spectral_map(&values, &vectors, |v| if v > cutoff { 1.0 / v.sqrt() } else { 0.0 });
    let proj = spectral_map(&values, &vectors, |v| if v > cutoff { 1.0 } else { 0.0 });
    (inv, proj)
}

pub fn trace(m: &Mat) -> C64 {
    m.trace()
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn commutator_norm(a: &Mat, b: &Mat) -> f64 {
    (a * b - b * a).norm()
}

pub fn is_unitary(m: &Mat, tol: f64) -> bool {
    m.is_square() && (m.adjoint() * m - identity(m.ncols())).norm() <= tol
}

pub fn is_isometry(m: &Mat, tol: f64) -> bool {
    (m.adjoint() * m - identity(m.ncols())).norm() <= tol
}

/// Computes `(a ⊗ b) · m` without forming the Kronecker product.
pub fn apply_kron_left(a: &Mat, b: &Mat, m: &Mat) -> Mat {
    let (p, q) = (a.nrows(), b.nrows());
    assert_eq!(a.ncols() * b.ncols(), m.nrows(), "kron dimension mismatch");
    let (pc, qc) = (a.ncols(), b.ncols());
    let bt = b.transpose();
    let mut out = Mat::zeros(p * q, m.ncols());
    for col in 0..m.ncols() {
        let x = Mat::from_fn(pc, qc, |i, j| m[(i * qc + j, col)]);
        let y = a * x * &bt;
        for i in 0..p {
            for j in 0..q {
                out[(i * q + j, col)] = y[(i, j)];
            }
        }
    }
    out
}

/// Pairwise (cascade) summation; result independent of evaluation order
/// of the inputs once they are collected.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

pub fn pairwise_sum_mat(values: &[Mat], rows: usize, cols: usize) -> Mat {
    match values.len() {
        0 => Mat::zeros(rows, cols),
        1 => values[0].clone(),
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum_mat(l, rows, cols) + pairwise_sum_mat(r, rows, cols)
        }
    }
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * (0.5_f64).sqrt()
    })
}

/// Haar-random isometry `rows × cols` (`rows ≥ cols`) via QR of a Ginibre matrix.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = ginibre(rows, rows, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q.clone();
    for j in 0..rows {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
        let col = u.column(j) * phase;
        u.set_column(j, &col);
    }
    u.columns(0, cols).into_owned()
}

pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    haar_isometry(n, n, rng)
}

/// Haar-random special unitary: a Haar unitary divided by a d-th root of its determinant.
pub fn haar_special_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let u = haar_unitary(n, rng);
    let det = u.determinant();
    let root = C64::from_polar(1.0, det.arg() / n as f64);
    u / root
}

/// Random density matrix from a square Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let g = ginibre(n, n, rng);
    let m = &g * g.adjoint();
    let t = m.trace();
    m / t
}

/// Orthonormal basis of the kernel of `m` (columns), singular values below
/// `tol · max(1, σ_max)` counted as zero.
pub fn kernel_basis(m: &Mat, tol: f64) -> Mat {
    let n = m.ncols();
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(n);
    }
    // M†M gives the full right-singular basis from a Hermitian solve.
    let g = m.adjoint() * m;
    let (values, vectors) = hermitian_eigen(&g);
    let scale = values.last().copied().unwrap_or(0.0).max(1.0);
    let keep: Vec<usize> = (0..n).filter(|&i| values[i].max(0.0).sqrt() <= tol * scale.sqrt()).collect();
    Mat::from_fn(n, keep.len(), |i, j| vectors[(i, keep[j])])
}

/// Löwdin orthonormalization matrix `(W†W)^{-1/2}` for linearly independent columns.
pub fn lowdin(w: &Mat) -> Mat {
    let g = w.adjoint() * w;
    let (values, vectors) = hermitian_eigen(&g);
    spectral_map(&values, &vectors, |v| 1.0 / v.sqrt())
}

/// Orthonormal basis for the column range of `m`, tolerance relative to the
/// largest singular value.
pub fn range_basis(m: &Mat, tol: f64) -> Mat {
    let g = m * m.adjoint();
    let (values, vectors) = hermitian_eigen(&g);
    let scale = values.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..values.len()).rev().filter(|&i| values[i] > tol * scale).collect();
    Mat::from_fn(m.nrows(), keep.len(), |i, j| vectors[(i, keep[j])])
}
