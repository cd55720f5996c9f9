//! Small dense complex/real matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::logval::LogValue;

pub type ComplexMatrix = DMatrix<Complex64>;

/// Relative threshold below which eigenvalues of a PSD matrix are clamped to zero.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn scaled_identity(n: usize, s: f64) -> ComplexMatrix {
    ComplexMatrix::from_diagonal_element(n, n, Complex64::new(s, 0.0))
}

pub fn from_real(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Complex matrix from real entries given row by row.
pub fn real_matrix(rows: usize, cols: usize, row_major: &[f64]) -> ComplexMatrix {
    from_real(&DMatrix::from_row_slice(rows, cols, row_major))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Frobenius norm.
pub fn norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// (A + Aᴴ)/2.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn check_square(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Domain(format!("{what} must be square, got {}×{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

pub fn is_hermitian(m: &ComplexMatrix, rel_tol: f64) -> bool {
    m.nrows() == m.ncols() && norm(&(m - m.adjoint())) <= rel_tol * norm(m).max(f64::MIN_POSITIVE)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in ascending order.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_square(m, "Hermitian eigenproblem input")?;
    if !is_finite(m) {
        return Err(Error::Domain("Hermitian eigenproblem input has non-finite entries".into()));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_square(m, "Hermitian eigenproblem input")?;
    if !is_finite(m) {
        return Err(Error::Domain("Hermitian eigenproblem input has non-finite entries".into()));
    }
    let mut v: Vec<f64> = SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
pub fn hermitian_function<F: Fn(f64) -> f64>(m: &ComplexMatrix, f: F) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(m)?;
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &v) in values.iter().enumerate() {
        let fv = Complex64::new(f(v), 0.0);
        for r in 0..n {
            scaled[(r, c)] *= fv;
        }
    }
    Ok(hermitian_part(&(scaled * vectors.adjoint())))
}

/// Hermitian square root of a PSD matrix; eigenvalues within
/// `CLAMP_TOLERANCE · ‖A‖` below zero are treated as round-off and clamped.
pub fn hermitian_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, _) = hermitian_eigen(m)?;
    let scale = values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if let Some(&min) = values.first() {
        if min < -CLAMP_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NumericalConsistency(format!(
                "square root of a matrix with negative eigenvalue {min:e}"
            )));
        }
    }
    hermitian_function(m, |v| v.max(0.0).sqrt())
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn hermitian_pd_inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, _) = hermitian_eigen(m)?;
    if values.first().is_some_and(|&v| v <= 0.0) {
        return Err(Error::Domain("matrix is not positive definite".into()));
    }
    hermitian_function(m, |v| 1.0 / v)
}

pub fn is_positive_definite(m: &ComplexMatrix) -> bool {
    matches!(hermitian_eigenvalues(m), Ok(v) if v.first().is_some_and(|&x| x > 0.0))
}

/// ln det of a Hermitian positive-definite matrix.
pub fn ln_det_hermitian_pd(m: &ComplexMatrix) -> Result<f64> {
    let values = hermitian_eigenvalues(m)?;
    if values.first().is_some_and(|&v| v <= 0.0) {
        return Err(Error::Domain("matrix is not positive definite".into()));
    }
    Ok(values.iter().map(|v| v.ln()).sum())
}

/// det of a general complex square matrix via partial-pivot LU.
pub fn det_complex(m: &ComplexMatrix) -> Complex64 {
    m.clone().lu().determinant()
}

/// LU factorization of a small real matrix with log-determinant access.
#[derive(Debug, Clone)]
pub struct RealLu {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
}

impl RealLu {
    pub fn new(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        RealLu { lu: m.lu(), n }
    }

    pub fn ln_det(&self) -> LogValue {
        let u = self.lu.u();
        let mut acc = LogValue::from_f64(self.lu.p().determinant::<f64>());
        for i in 0..self.n {
            acc = acc * LogValue::from_f64(u[(i, i)]);
        }
        acc
    }

    /// min |uᵢᵢ| / max |uᵢᵢ|, a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        let u = self.lu.u();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for i in 0..self.n {
            let v = u[(i, i)].abs();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    pub fn solve(&self, rhs: &DMatrix<f64>) -> Option<DMatrix<f64>> {
        self.lu.solve(rhs)
    }
}

/// Signed log-determinant of a real square matrix.
pub fn ln_det_real(m: DMatrix<f64>) -> LogValue {
    RealLu::new(m).ln_det()
}
