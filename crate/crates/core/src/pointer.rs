//! The apparatus pointer as a cyclic position lattice.
//!
//! The momentum operator is built in the Fourier basis,
//! P = F† diag(2πk/N) F with k over the symmetric integer range, so that
//! exp(−i s P) is an exact cyclic shift by s sites for integer s. The
//! pointer starts at the central site, either as a point mass (delta mode)
//! or as a discrete Gaussian ψ(x) ∝ exp(−(x−c)²/(2σ²)) (gaussian mode),
//! and is read out by assigning each site to the nearest of the three
//! displaced centers {center−d, center, center+d}.

use ndarray::{Array1, Array2};
use serde::Serialize;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, DensityMatrix, C64};

/// Initial pointer wavefunction shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointerMode {
    Delta,
    Gaussian { sigma: f64 },
}

/// Readout bin of a lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bin {
    Plus,
    Neutral,
    Minus,
}

/// Cyclic pointer lattice with its momentum operator and readout
/// partition for a given nominal displacement.
#[derive(Debug, Clone)]
pub struct PointerSpace {
    n_sites: usize,
    displacement: i64,
    mode: PointerMode,
    momentum: CMatrix,
    bins: Vec<Bin>,
}

/// Symmetric integer frequency for DFT index i on an N-site lattice.
fn symmetric_freq(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Discrete momentum operator P = F† diag(2πk/N) F.
pub fn momentum_operator(n_sites: usize) -> Result<CMatrix> {
    if n_sites < 3 {
        return Err(Error::InvalidConfig(format!(
            "pointer lattice needs at least 3 sites, got {n_sites}"
        )));
    }
    let n = n_sites as f64;
    let mut p = Array2::zeros((n_sites, n_sites));
    for x in 0..n_sites {
        for y in 0..n_sites {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n_sites {
                let omega = TAU * symmetric_freq(i, n_sites) as f64 / n;
                let phase = TAU * (i as f64) * ((x as f64) - (y as f64)) / n;
                acc += C64::new(0.0, phase).exp() * omega;
            }
            p[(x, y)] = acc / n;
        }
    }
    Ok(p)
}

fn cyclic_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

impl PointerSpace {
    /// A lattice of `n_sites` sites whose readout geometry is built for
    /// displacements of ±`displacement` sites from the center.
    pub fn new(n_sites: usize, mode: PointerMode, displacement: i64) -> Result<Self> {
        let momentum = momentum_operator(n_sites)?;
        // d = 0 (zero interaction) is allowed: all sites read out neutral
        let d = displacement.unsigned_abs() as usize;
        if 2 * d >= n_sites {
            return Err(Error::InvalidConfig(format!(
                "displacement {d} too large for a {n_sites}-site lattice (need |d| < N/2)"
            )));
        }
        if let PointerMode::Gaussian { sigma } = mode {
            if !(sigma > 0.0) {
                return Err(Error::InvalidConfig("gaussian sigma must be > 0".into()));
            }
            // A width approaching the displacement makes the three readout
            // regions indistinguishable; reject it as a configuration error.
            if d > 0 && sigma >= d as f64 {
                return Err(Error::InvalidConfig(format!(
                    "gaussian sigma {sigma} too large for displacement {d}"
                )));
            }
        }
        let center = n_sites / 2;
        let plus_center = (center + d) % n_sites;
        let minus_center = (center + n_sites - d) % n_sites;
        let bins = (0..n_sites)
            .map(|x| {
                let dn = cyclic_distance(x, center, n_sites);
                let dp = cyclic_distance(x, plus_center, n_sites);
                let dm = cyclic_distance(x, minus_center, n_sites);
                // nearest center wins; ties resolve neutral > plus > minus
                if dn <= dp && dn <= dm {
                    Bin::Neutral
                } else if dp <= dm {
                    Bin::Plus
                } else {
                    Bin::Minus
                }
            })
            .collect();
        Ok(Self {
            n_sites,
            displacement,
            mode,
            momentum,
            bins,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn mode(&self) -> PointerMode {
        self.mode
    }

    pub fn displacement(&self) -> i64 {
        self.displacement
    }

    pub fn center(&self) -> usize {
        self.n_sites / 2
    }

    pub fn momentum(&self) -> &CMatrix {
        &self.momentum
    }

    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    /// Unitary translation by `displacement` sites (any real number;
    /// integer values shift position basis states exactly).
    pub fn translation(&self, displacement: f64) -> Result<CMatrix> {
        if 2.0 * displacement.abs() >= self.n_sites as f64 {
            return Err(Error::InvalidConfig(format!(
                "translation by {displacement} wraps around a {}-site lattice",
                self.n_sites
            )));
        }
        let n = self.n_sites as f64;
        let mut t = Array2::zeros((self.n_sites, self.n_sites));
        for x in 0..self.n_sites {
            for y in 0..self.n_sites {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..self.n_sites {
                    let omega = TAU * symmetric_freq(i, self.n_sites) as f64 / n;
                    let phase = TAU * (i as f64) * ((x as f64) - (y as f64)) / n;
                    acc += C64::new(0.0, phase).exp() * C64::new(0.0, -displacement * omega).exp();
                }
                t[(x, y)] = acc / n;
            }
        }
        Ok(t)
    }

    /// The pointer's initial state, centered on the lattice.
    pub fn initial_state(&self) -> CVector {
        let c = self.center();
        match self.mode {
            PointerMode::Delta => {
                let mut v = Array1::zeros(self.n_sites);
                v[c] = C64::new(1.0, 0.0);
                v
            }
            PointerMode::Gaussian { sigma } => {
                let v: CVector = Array1::from_shape_fn(self.n_sites, |x| {
                    let d = cyclic_distance(x, c, self.n_sites) as f64;
                    C64::new((-d * d / (2.0 * sigma * sigma)).exp(), 0.0)
                });
                let norm = linalg::vec_norm(&v);
                v.mapv(|z| z / norm)
            }
        }
    }

    /// Initial state displaced by `sign` × the nominal displacement.
    pub fn displaced_state(&self, sign: i8) -> Result<CVector> {
        let t = self.translation(sign as f64 * self.displacement as f64)?;
        Ok(t.dot(&self.initial_state()))
    }

    /// |⟨ψ⁺|ψ⁻⟩|, computed by direct inner product of the displaced states.
    pub fn displaced_overlap(&self) -> Result<f64> {
        let plus = self.displaced_state(1)?;
        let minus = self.displaced_state(-1)?;
        Ok(linalg::inner(&plus, &minus).norm())
    }

    /// Bin occupancies (plus, neutral, minus) of a pointer density matrix.
    pub fn readout(&self, density: &DensityMatrix) -> Result<(f64, f64, f64)> {
        if density.dim() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites,
                found: density.dim(),
            });
        }
        let probs = density.diag_probs();
        let mut out = (0.0, 0.0, 0.0);
        for (x, p) in probs.iter().enumerate() {
            match self.bins[x] {
                Bin::Plus => out.0 += p,
                Bin::Neutral => out.1 += p,
                Bin::Minus => out.2 += p,
            }
        }
        Ok(out)
    }
}
