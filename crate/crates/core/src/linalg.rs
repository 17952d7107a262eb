//! Dense complex linear algebra: Kronecker products, Hermitian matrix
//! exponentials, partial traces and the density-matrix type.
//!
//! All operators in the simulator are small dense matrices; Hermitian
//! exponentials go through an eigendecomposition (LAPACK `zheevd`), which
//! also provides the spectral data used by the branch evolution.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

/// Cap on the dimension of any operator handled by the dense paths
/// (`kron`, `expm_hermitian`). Larger spaces must use the branch evolution.
pub const MAX_HILBERT_DIM: usize = 4096;

/// Elementwise tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

pub fn identity(n: usize) -> CMatrix {
    Array2::eye(n)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨a|b⟩ with the conjugate on the left argument.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let d = m - &dagger(m);
    max_abs(&d)
}

fn check_hermitian(m: &CMatrix, tolerance: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let deviation = hermiticity_deviation(m);
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            deviation,
            tolerance,
        });
    }
    Ok(())
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a
        .nrows()
        .checked_mul(b.nrows())
        .ok_or(Error::DimensionOverflow {
            dim: usize::MAX,
            max: MAX_HILBERT_DIM,
        })?;
    let cols = a
        .ncols()
        .checked_mul(b.ncols())
        .ok_or(Error::DimensionOverflow {
            dim: usize::MAX,
            max: MAX_HILBERT_DIM,
        })?;
    let dim = rows.max(cols);
    if dim > MAX_HILBERT_DIM {
        return Err(Error::DimensionOverflow {
            dim,
            max: MAX_HILBERT_DIM,
        });
    }
    let mut out = Array2::zeros((rows, cols));
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let aij = a[(i, j)];
            for k in 0..b.nrows() {
                for l in 0..b.ncols() {
                    out[(i * b.nrows() + k, j * b.ncols() + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of state vectors (uncapped; states may exceed the
/// operator dimension cap).
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = Array1::zeros(a.len() * b.len());
    for (i, &ai) in a.iter().enumerate() {
        for (k, &bk) in b.iter().enumerate() {
            out[i * b.len() + k] = ai * bk;
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues ascending,
/// eigenvectors as columns (LAPACK `zheevd`).
pub fn eigh(h: &CMatrix) -> Result<(Array1<f64>, CMatrix)> {
    check_hermitian(h, HERMITICITY_TOL)?;
    let n = h.nrows();
    // column-major copy for LAPACK
    let mut a: Vec<C64> = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            a.push(h[(i, j)]);
        }
    }
    let mut w = vec![0.0f64; n];
    let n_i = n as i32;
    let mut info = 0i32;
    // workspace query, then the real call
    let mut work_len = C64::new(0.0, 0.0);
    let mut rwork_len = 0.0f64;
    let mut iwork_len = 0i32;
    unsafe {
        lapack_sys::zheevd_(
            &(b'V' as i8),
            &(b'L' as i8),
            &n_i,
            a.as_mut_ptr() as *mut _,
            &n_i,
            w.as_mut_ptr(),
            &mut work_len as *mut C64 as *mut _,
            &(-1i32),
            &mut rwork_len,
            &(-1i32),
            &mut iwork_len,
            &(-1i32),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigen(format!("zheevd workspace query failed: info = {info}")));
    }
    let mut work = vec![C64::new(0.0, 0.0); work_len.re as usize];
    let mut rwork = vec![0.0f64; rwork_len as usize];
    let mut iwork = vec![0i32; iwork_len as usize];
    unsafe {
        lapack_sys::zheevd_(
            &(b'V' as i8),
            &(b'L' as i8),
            &n_i,
            a.as_mut_ptr() as *mut _,
            &n_i,
            w.as_mut_ptr(),
            work.as_mut_ptr() as *mut _,
            &(work.len() as i32),
            rwork.as_mut_ptr(),
            &(rwork.len() as i32),
            iwork.as_mut_ptr(),
            &(iwork.len() as i32),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigen(format!("zheevd failed: info = {info}")));
    }
    let vecs = CMatrix::from_shape_fn((n, n), |(i, j)| a[j * n + i]);
    Ok((Array1::from(w), vecs))
}

/// exp(−i·theta·h) for Hermitian h, via spectral decomposition.
pub fn expm_hermitian(h: &CMatrix, theta: f64) -> Result<CMatrix> {
    if h.nrows() > MAX_HILBERT_DIM {
        return Err(Error::DimensionOverflow {
            dim: h.nrows(),
            max: MAX_HILBERT_DIM,
        });
    }
    let (vals, vecs) = eigh(h)?;
    let mut scaled = vecs.clone();
    for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
        let phase = C64::new(0.0, -theta * vals[j]).exp();
        col.mapv_inplace(|z| z * phase);
    }
    Ok(scaled.dot(&dagger(&vecs)))
}

/// Mixed-radix offset tables for a subsystem selection: one flat offset per
/// combined index of the selected subsystems, in row-major order.
fn offsets(dims: &[usize], selected: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let total: usize = selected.iter().map(|&s| dims[s]).product();
    let mut out = Vec::with_capacity(total);
    for mut combined in 0..total {
        let mut offset = 0;
        for &s in selected.iter().rev() {
            offset += (combined % dims[s]) * strides[s];
            combined /= dims[s];
        }
        out.push(offset);
    }
    out
}

fn validate_trace_args(total: usize, dims: &[usize], keep: &[usize]) -> Result<Vec<usize>> {
    let prod: usize = dims.iter().product();
    if prod != total {
        return Err(Error::DimensionMismatch {
            expected: prod,
            found: total,
        });
    }
    if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "kept subsystem indices must be non-empty, sorted and unique".into(),
        ));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::UnknownSubsystem(format!("subsystem index {bad}")));
    }
    Ok((0..dims.len()).filter(|i| !keep.contains(i)).collect())
}

/// Partial trace of a density operator over the subsystems not in `keep`.
/// `dims` are the subsystem dimensions in row-major (leftmost slowest) order;
/// `keep` is a sorted list of subsystem indices.
pub fn partial_trace(rho: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_hermitian(rho, f64::INFINITY)?; // square check only
    let traced = validate_trace_args(rho.nrows(), dims, keep)?;
    let keep_off = offsets(dims, keep);
    let trace_off = offsets(dims, &traced);
    let kd = keep_off.len();
    let mut out = Array2::zeros((kd, kd));
    for a in 0..kd {
        for b in a..kd {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &trace_off {
                acc += rho[(keep_off[a] + t, keep_off[b] + t)];
            }
            out[(a, b)] = acc;
            if a != b {
                // mirror of the (b, a) sum for a Hermitian input
                out[(b, a)] = trace_off
                    .iter()
                    .map(|&t| rho[(keep_off[b] + t, keep_off[a] + t)])
                    .sum();
            }
        }
    }
    Ok(out)
}

/// Reduced density matrix of a pure state without forming the full
/// |ψ⟩⟨ψ| projector. Hermitian by construction.
pub fn reduced_from_state(state: &CVector, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let traced = validate_trace_args(state.len(), dims, keep)?;
    let keep_off = offsets(dims, keep);
    let trace_off = offsets(dims, &traced);
    let kd = keep_off.len();
    let mut out = Array2::zeros((kd, kd));
    for a in 0..kd {
        for b in a..kd {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &trace_off {
                acc += state[keep_off[a] + t] * state[keep_off[b] + t].conj();
            }
            out[(a, b)] = acc;
            out[(b, a)] = acc.conj();
        }
    }
    Ok(out)
}

/// A validated density operator: Hermitian, unit trace, positive
/// semidefinite.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Full validation, including the spectral positivity check.
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        let dm = Self::from_reduction(mat)?;
        let min = dm.min_eigenvalue()?;
        if min < -1e-10 {
            return Err(Error::InvariantViolation(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(dm)
    }

    /// Validation without the eigenvalue check, for matrices that are
    /// positive by construction (Gram-type reductions of pure states).
    pub(crate) fn from_reduction(mat: CMatrix) -> Result<Self> {
        check_hermitian(&mat, 1e-10)?;
        let tr = mat.diag().iter().map(|z| z.re).sum::<f64>();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvariantViolation(format!(
                "density matrix trace {tr} deviates from 1"
            )));
        }
        Ok(Self { mat })
    }

    /// |ψ⟩⟨ψ| of a normalized state.
    pub fn from_pure(state: &CVector) -> Result<Self> {
        let n = vec_norm(state);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvariantViolation(format!(
                "state norm {n} deviates from 1"
            )));
        }
        let d = state.len();
        let mut mat = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                mat[(i, j)] = state[i] * state[j].conj();
            }
        }
        Self::from_reduction(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.diag().iter().map(|z| z.re).sum()
    }

    /// Real parts of the diagonal (the position-basis probabilities).
    pub fn diag_probs(&self) -> Vec<f64> {
        self.mat.diag().iter().map(|z| z.re).collect()
    }

    pub fn purity(&self) -> f64 {
        self.mat.dot(&self.mat).diag().iter().map(|z| z.re).sum()
    }

    /// Largest off-diagonal magnitude.
    pub fn max_offdiag(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if i != j {
                    m = m.max(self.mat[(i, j)].norm());
                }
            }
        }
        m
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = eigh(&self.mat)?;
        Ok(vals[0])
    }

    /// Partial trace by subsystem index (see [`partial_trace`]).
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
        let out = partial_trace(&self.mat, dims, keep)?;
        DensityMatrix::from_reduction(out)
    }
}
