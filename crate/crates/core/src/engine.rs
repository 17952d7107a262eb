//! The von Neumann measurement engine.
//!
//! Builds the station interaction Hamiltonians H_A = λ A ⊗ P_A and
//! H_B = λ B ⊗ P_B on the composite space photonA ⊗ photonB ⊗ pointerA ⊗
//! pointerB, evolves the joint system by three independent methods, and
//! reduces to the pointer density matrix whose diagonal carries the
//! outcome probabilities.
//!
//! Unit convention: the evolution phase is exp(−i t H), so only the
//! product ε = tλ is observable.
//!
//! The three evolution methods:
//! - exact: one Hermitian exponential of H_A + H_B (the oracle; capped in
//!   dimension),
//! - factorized: exp(−itH_A)·exp(−itH_B), which matches the exact result
//!   precisely when [H_A, H_B] = 0,
//! - branch: decompose the biphoton into the four analyzer eigenbranches
//!   and translate each pointer by ±ε according to the branch eigenvalue.
//!   This path never builds a joint operator and scales to large lattices.
//!
//! The nonlocal counterexample couples station B's pointer to *photon A*
//! through an observable that does not commute with A's own. Naive
//! cross-couplings (photon A's observable itself, or any operator on B's
//! side alone) still commute with H_A and would falsely pass every
//! locality diagnostic; the non-commuting same-photon pair is the minimal
//! construction with [H_A, H_B'] ≠ 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::layout::{self, SubsystemLayout};
use crate::linalg::{self, CMatrix, CVector, DensityMatrix};
use crate::photon::{self, AnalyzerSettings, StationObservable};
use crate::pointer::{Bin, PointerMode, PointerSpace};
use crate::stats::OutcomeDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Station {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Factorized,
    Branch,
}

/// Full configuration of one experiment run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub settings: AnalyzerSettings,
    pub pointer_sites: usize,
    pub pointer_mode: PointerMode,
    /// Interaction time t (dimensionless).
    pub time: f64,
    /// Interaction strength λ, the same at both stations.
    pub coupling: f64,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            settings: AnalyzerSettings::new(0.0, 22.5f64.to_radians()),
            pointer_sites: 3,
            pointer_mode: PointerMode::Delta,
            time: 1.0,
            coupling: 1.0,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    /// The pointer displacement ε = tλ, in lattice sites.
    pub fn epsilon(&self) -> f64 {
        self.time * self.coupling
    }

    /// Rounded displacement, after checking ε is integer-valued.
    pub fn displacement(&self) -> Result<i64> {
        let eps = self.epsilon();
        let rounded = eps.round();
        if (eps - rounded).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "ε = tλ = {eps} must be an integer number of lattice sites"
            )));
        }
        Ok(rounded as i64)
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub method: Method,
    pub final_state: CVector,
    pub pointer_density: DensityMatrix,
    pub outcomes: OutcomeDistribution,
}

/// Gap between applying the two station evolutions in either order.
#[derive(Debug, Clone, Serialize)]
pub struct OrderSwapGap {
    /// ‖(U_A U_B − U_B U_A)|Ψ_initial⟩‖.
    pub state_gap: f64,
    /// Max difference of outcome probabilities between the two orders.
    pub prob_gap: f64,
}

/// Frobenius norm of the commutator [a, b].
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    let comm = &a.dot(b) - &b.dot(a);
    linalg::frobenius_norm(&comm)
}

pub struct Engine {
    config: ExperimentConfig,
    layout: SubsystemLayout,
    pointer: PointerSpace,
    observable_a: StationObservable,
    observable_b: StationObservable,
}

impl Engine {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let layout = SubsystemLayout::canonical(config.pointer_sites)?;
        let pointer = PointerSpace::new(
            config.pointer_sites,
            config.pointer_mode,
            config.displacement()?,
        )?;
        let observable_a = photon::observable(config.settings.alpha);
        let observable_b = photon::observable(config.settings.beta);
        Ok(Self {
            config,
            layout,
            pointer,
            observable_a,
            observable_b,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn pointer(&self) -> &PointerSpace {
        &self.pointer
    }

    /// |φ+⟩ ⊗ |Ψ_A⁰⟩ ⊗ |Ψ_B⁰⟩.
    pub fn initial_state(&self) -> Result<CVector> {
        let biphoton = photon::bell_phi_plus();
        let ground = self.pointer.initial_state();
        self.layout.product_state(&[
            (&[layout::PHOTON_A, layout::PHOTON_B], &biphoton),
            (&[layout::POINTER_A], &ground),
            (&[layout::POINTER_B], &ground),
        ])
    }

    /// H = λ · (station observable) ⊗ (station pointer momentum), embedded
    /// in the full space.
    pub fn local_hamiltonian(&self, station: Station) -> Result<CMatrix> {
        let (photon_name, pointer_name, obs) = match station {
            Station::A => (layout::PHOTON_A, layout::POINTER_A, &self.observable_a),
            Station::B => (layout::PHOTON_B, layout::POINTER_B, &self.observable_b),
        };
        let embedded = self.layout.embed(&[
            (photon_name, &obs.matrix),
            (pointer_name, self.pointer.momentum()),
        ])?;
        Ok(embedded.mapv(|z| z * self.config.coupling))
    }

    /// The counterexample H_B′: station B's local term plus a cross-station
    /// coupling of strength μ between *photon A* (measured at angle β) and
    /// B's pointer.
    pub fn nonlocal_hamiltonian_b(&self, mu: f64) -> Result<CMatrix> {
        let local = self.local_hamiltonian(Station::B)?;
        let cross_obs = photon::observable(self.config.settings.beta);
        let cross = self.layout.embed(&[
            (layout::PHOTON_A, &cross_obs.matrix),
            (layout::POINTER_B, self.pointer.momentum()),
        ])?;
        Ok(&local + &cross.mapv(|z| z * mu))
    }

    /// Eq.-(3)-style evolution: a single Hermitian exponential of the total
    /// Hamiltonian.
    pub fn evolve_exact(&self, h_total: &CMatrix, initial: &CVector) -> Result<CVector> {
        let u = linalg::expm_hermitian(h_total, self.config.time)?;
        let out = u.dot(initial);
        self.check_norm(&out)?;
        Ok(out)
    }

    /// Factorized evolution exp(−itH_A)·exp(−itH_B), A applied last.
    pub fn evolve_factorized(
        &self,
        h_a: &CMatrix,
        h_b: &CMatrix,
        initial: &CVector,
    ) -> Result<CVector> {
        let u_a = linalg::expm_hermitian(h_a, self.config.time)?;
        let u_b = linalg::expm_hermitian(h_b, self.config.time)?;
        let out = u_a.dot(&u_b.dot(initial));
        self.check_norm(&out)?;
        Ok(out)
    }

    /// Branch evolution: expand the biphoton in the analyzer eigenbranches
    /// |±A⟩|±B⟩ and translate each pointer by ±ε according to the branch
    /// eigenvalue. Valid exactly when each station's Hamiltonian acts on
    /// its own photon and pointer alone.
    pub fn evolve_branch(&self) -> Result<CVector> {
        let eps = self.config.epsilon();
        let biphoton = photon::bell_phi_plus();
        let ground = self.pointer.initial_state();
        let shifted_plus = self.pointer.translation(eps)?.dot(&ground);
        let shifted_minus = self.pointer.translation(-eps)?.dot(&ground);
        let branches_a = [(&self.observable_a.plus, 1), (&self.observable_a.minus, -1)];
        let branches_b = [(&self.observable_b.plus, 1), (&self.observable_b.minus, -1)];

        let dim = self.layout.total_dim();
        let mut out: CVector = ndarray::Array1::zeros(dim);
        for (vec_a, sign_a) in branches_a {
            for (vec_b, sign_b) in branches_b {
                // branch coefficient ⟨s_A s_B | φ+⟩ from the analyzer bases
                let branch_pair = linalg::kron_vec(vec_a, vec_b);
                let coeff = linalg::inner(&branch_pair, &biphoton);
                let pa = if sign_a > 0 { &shifted_plus } else { &shifted_minus };
                let pb = if sign_b > 0 { &shifted_plus } else { &shifted_minus };
                let term = linalg::kron_vec(&branch_pair, &linalg::kron_vec(pa, pb));
                out = &out + &term.mapv(|z| z * coeff);
            }
        }
        self.check_norm(&out)?;
        Ok(out)
    }

    /// ρ_reduced over pointerA ⊗ pointerB: trace out both photons.
    pub fn reduced_pointer_density(&self, final_state: &CVector) -> Result<DensityMatrix> {
        self.layout
            .reduced_density(final_state, &[layout::POINTER_A, layout::POINTER_B])
    }

    /// Joint readout-bin occupancies of the two pointers. Mass in any
    /// neutral bin is inconclusive and reported separately.
    pub fn outcome_probabilities(&self, density: &DensityMatrix) -> Result<OutcomeDistribution> {
        let n = self.pointer.n_sites();
        if density.dim() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: density.dim(),
            });
        }
        let bins = self.pointer.bins();
        let probs = density.diag_probs();
        let mut p = [0.0f64; 4];
        let mut inconclusive = 0.0;
        for (i, &mass) in probs.iter().enumerate() {
            let (bin_a, bin_b) = (bins[i / n], bins[i % n]);
            match (bin_a, bin_b) {
                (Bin::Plus, Bin::Plus) => p[0] += mass,
                (Bin::Plus, Bin::Minus) => p[1] += mass,
                (Bin::Minus, Bin::Plus) => p[2] += mass,
                (Bin::Minus, Bin::Minus) => p[3] += mass,
                _ => inconclusive += mass,
            }
        }
        OutcomeDistribution::new(p, inconclusive, self.config.settings)
    }

    /// Run the full pipeline with the chosen evolution method.
    pub fn run(&self, method: Method) -> Result<EvolutionResult> {
        let final_state = match method {
            Method::Exact => {
                let h_a = self.local_hamiltonian(Station::A)?;
                let h_b = self.local_hamiltonian(Station::B)?;
                self.evolve_exact(&(&h_a + &h_b), &self.initial_state()?)?
            }
            Method::Factorized => {
                let h_a = self.local_hamiltonian(Station::A)?;
                let h_b = self.local_hamiltonian(Station::B)?;
                self.evolve_factorized(&h_a, &h_b, &self.initial_state()?)?
            }
            Method::Branch => self.evolve_branch()?,
        };
        let pointer_density = self.reduced_pointer_density(&final_state)?;
        let outcomes = self.outcome_probabilities(&pointer_density)?;
        Ok(EvolutionResult {
            method,
            final_state,
            pointer_density,
            outcomes,
        })
    }

    /// Largest coherence between distinct outcome branches of the pointer
    /// density: max over (s_A,s_B) ≠ (u_A,u_B) of
    /// |⟨ψ^{s_A} ψ^{s_B}| ρ |ψ^{u_A} ψ^{u_B}⟩|. In delta mode the branch
    /// states are position basis states and this coincides with the
    /// position-basis off-diagonal maximum over the branch support; in
    /// gaussian mode it is the quantity bounded by the displaced-state
    /// overlap.
    pub fn branch_coherence_max(&self, density: &DensityMatrix) -> Result<f64> {
        let plus = self.pointer.displaced_state(1)?;
        let minus = self.pointer.displaced_state(-1)?;
        let branch_states: Vec<CVector> = [
            (&plus, &plus),
            (&plus, &minus),
            (&minus, &plus),
            (&minus, &minus),
        ]
        .iter()
        .map(|(a, b)| linalg::kron_vec(a, b))
        .collect();
        let applied: Vec<CVector> = branch_states
            .iter()
            .map(|v| density.matrix().dot(v))
            .collect();
        let mut max = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    max = max.max(linalg::inner(&branch_states[i], &applied[j]).norm());
                }
            }
        }
        Ok(max)
    }

    /// Norm of (U_A U_B − U_B U_A)|Ψ_initial⟩ and the largest
    /// outcome-probability difference between the two application orders.
    pub fn order_swap_gap(&self, h_a: &CMatrix, h_b: &CMatrix) -> Result<OrderSwapGap> {
        let initial = self.initial_state()?;
        let u_a = linalg::expm_hermitian(h_a, self.config.time)?;
        let u_b = linalg::expm_hermitian(h_b, self.config.time)?;
        let ab = u_a.dot(&u_b.dot(&initial));
        let ba = u_b.dot(&u_a.dot(&initial));
        let state_gap = linalg::vec_norm(&(&ab - &ba));

        let probs_of = |state: &CVector| -> Result<(OutcomeDistribution, f64)> {
            let density = self.reduced_pointer_density(state)?;
            let d = self.outcome_probabilities(&density)?;
            let inconclusive = d.p_inconclusive;
            Ok((d, inconclusive))
        };
        let (d_ab, inc_ab) = probs_of(&ab)?;
        let (d_ba, inc_ba) = probs_of(&ba)?;
        let mut prob_gap = (inc_ab - inc_ba).abs();
        for k in 0..4 {
            prob_gap = prob_gap.max((d_ab.p[k] - d_ba.p[k]).abs());
        }
        Ok(OrderSwapGap {
            state_gap,
            prob_gap,
        })
    }

    /// Frobenius gap between the joint exponential and the product of the
    /// two station exponentials.
    pub fn factorization_gap(&self, h_a: &CMatrix, h_b: &CMatrix) -> Result<f64> {
        let t = self.config.time;
        let joint = linalg::expm_hermitian(&(h_a + h_b), t)?;
        let product = linalg::expm_hermitian(h_a, t)?.dot(&linalg::expm_hermitian(h_b, t)?);
        Ok(linalg::frobenius_norm(&(&joint - &product)))
    }

    fn check_norm(&self, state: &CVector) -> Result<()> {
        let n = linalg::vec_norm(state);
        if (n - 1.0).abs() > self.config.tolerance {
            return Err(Error::InvariantViolation(format!(
                "evolved state norm {n} deviates from 1"
            )));
        }
        Ok(())
    }
}

/// Convenience: run the branch pipeline of `base` at other analyzer
/// angles, returning the outcome distribution.
pub fn distribution_at(base: &ExperimentConfig, alpha: f64, beta: f64) -> Result<OutcomeDistribution> {
    let mut config = base.clone();
    config.settings = AnalyzerSettings::new(alpha, beta);
    Ok(Engine::new(config)?.run(Method::Branch)?.outcomes)
}
