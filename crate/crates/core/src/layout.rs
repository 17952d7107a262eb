//! Named-subsystem bookkeeping for the composite Hilbert space
//! photonA ⊗ photonB ⊗ pointerA ⊗ pointerB: operator embedding, product
//! states and named partial traces.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, DensityMatrix};

pub const PHOTON_A: &str = "photonA";
pub const PHOTON_B: &str = "photonB";
pub const POINTER_A: &str = "pointerA";
pub const POINTER_B: &str = "pointerB";

/// Ordered registry of named subsystems with their dimensions.
#[derive(Debug, Clone)]
pub struct SubsystemLayout {
    parts: Vec<(String, usize)>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(parts: Vec<(S, usize)>) -> Result<Self> {
        let parts: Vec<(String, usize)> = parts.into_iter().map(|(n, d)| (n.into(), d)).collect();
        if parts.is_empty() {
            return Err(Error::InvalidConfig("layout must have subsystems".into()));
        }
        for (i, (name, dim)) in parts.iter().enumerate() {
            if *dim < 2 {
                return Err(Error::InvalidConfig(format!(
                    "subsystem `{name}` has dimension {dim} < 2"
                )));
            }
            if parts[..i].iter().any(|(other, _)| other == name) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate subsystem name `{name}`"
                )));
            }
        }
        Ok(Self { parts })
    }

    /// The experiment layout: two photon qubits followed by two N-site
    /// pointers, in this fixed order.
    pub fn canonical(n_sites: usize) -> Result<Self> {
        Self::new(vec![
            (PHOTON_A, 2),
            (PHOTON_B, 2),
            (POINTER_A, n_sites),
            (POINTER_B, n_sites),
        ])
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|(_, d)| *d).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|(_, d)| *d).product()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.parts
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::UnknownSubsystem(name.into()))
    }

    pub fn dim_of(&self, name: &str) -> Result<usize> {
        Ok(self.parts[self.index_of(name)?].1)
    }

    /// Kronecker product over the canonical order, with the assigned local
    /// operators in place and identities elsewhere.
    pub fn embed(&self, assignments: &[(&str, &CMatrix)]) -> Result<CMatrix> {
        for (name, m) in assignments {
            let dim = self.dim_of(name)?;
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.nrows().max(m.ncols()),
                });
            }
            if assignments.iter().filter(|(n, _)| n == name).count() > 1 {
                return Err(Error::InvalidConfig(format!(
                    "subsystem `{name}` assigned more than once"
                )));
            }
        }
        let mut out = linalg::identity(1);
        for (name, dim) in &self.parts {
            let factor = assignments
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, m)| (*m).clone())
                .unwrap_or_else(|| linalg::identity(*dim));
            out = linalg::kron(&out, &factor)?;
        }
        Ok(out)
    }

    /// Kronecker product of state factors in canonical order. Each factor
    /// covers one subsystem or a contiguous group of subsystems; together
    /// they must cover the layout exactly once.
    pub fn product_state(&self, factors: &[(&[&str], &CVector)]) -> Result<CVector> {
        let mut covered = vec![false; self.parts.len()];
        // (first subsystem index, factor) pairs, for canonical ordering
        let mut placed: Vec<(usize, &CVector)> = Vec::with_capacity(factors.len());
        for (names, vec) in factors {
            if names.is_empty() {
                return Err(Error::InvalidConfig("empty factor group".into()));
            }
            let first = self.index_of(names[0])?;
            let mut dim = 1usize;
            for (k, name) in names.iter().enumerate() {
                let idx = self.index_of(name)?;
                if idx != first + k {
                    return Err(Error::InvalidConfig(format!(
                        "factor group {names:?} is not contiguous in canonical order"
                    )));
                }
                if covered[idx] {
                    return Err(Error::InvalidConfig(format!(
                        "subsystem `{name}` covered more than once"
                    )));
                }
                covered[idx] = true;
                dim *= self.parts[idx].1;
            }
            if vec.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: vec.len(),
                });
            }
            placed.push((first, vec));
        }
        if let Some(gap) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidConfig(format!(
                "subsystem `{}` not covered by any factor",
                self.parts[gap].0
            )));
        }
        placed.sort_by_key(|(first, _)| *first);
        let mut out = CVector::from_elem(1, linalg::C64::new(1.0, 0.0));
        for (_, vec) in placed {
            out = linalg::kron_vec(&out, vec);
        }
        Ok(out)
    }

    /// Reduced density matrix of a pure state, keeping the named
    /// subsystems (in canonical order).
    pub fn reduced_density(&self, state: &CVector, keep: &[&str]) -> Result<DensityMatrix> {
        let idx = self.keep_indices(keep)?;
        let mat = linalg::reduced_from_state(state, &self.dims(), &idx)?;
        DensityMatrix::from_reduction(mat)
    }

    /// Named partial trace of a density operator.
    pub fn partial_trace(&self, rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
        let idx = self.keep_indices(keep)?;
        rho.partial_trace(&self.dims(), &idx)
    }

    fn keep_indices(&self, keep: &[&str]) -> Result<Vec<usize>> {
        let mut idx = keep
            .iter()
            .map(|n| self.index_of(n))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        Ok(idx)
    }
}
