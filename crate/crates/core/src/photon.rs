//! Biphoton source and station observables.
//!
//! The analyzer at angle θ measures in the basis |+⟩ = (cos θ, sin θ),
//! |−⟩ = (−sin θ, cos θ) relative to the linear-polarization axes {x, y};
//! the corresponding ±1-valued observable is
//! [[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]].

use ndarray::array;
use serde::Serialize;

use crate::linalg::{CMatrix, CVector, C64};

/// Analyzer orientations at the two stations, in radians.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnalyzerSettings {
    pub alpha: f64,
    pub beta: f64,
}

impl AnalyzerSettings {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn difference(&self) -> f64 {
        self.alpha - self.beta
    }
}

/// A station's ±1-valued polarization observable with its eigenbasis.
/// The plus branch (eigenvalue +1) always comes first.
#[derive(Debug, Clone)]
pub struct StationObservable {
    pub theta: f64,
    pub matrix: CMatrix,
    pub plus: CVector,
    pub minus: CVector,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The symmetric polarization-entangled state
/// (1/√2)(|x_A x_B⟩ + |y_A y_B⟩), amplitudes ordered
/// |xx⟩, |xy⟩, |yx⟩, |yy⟩.
pub fn bell_phi_plus() -> CVector {
    let s = 1.0 / 2f64.sqrt();
    array![c(s), c(0.0), c(0.0), c(s)]
}

/// Analyzer eigenbasis at angle θ: (|+⟩, |−⟩) in the {x, y} basis.
pub fn analyzer_basis(theta: f64) -> (CVector, CVector) {
    let (sin, cos) = theta.sin_cos();
    (array![c(cos), c(sin)], array![c(-sin), c(cos)])
}

/// The ±1 observable measured by an analyzer at angle θ.
pub fn observable(theta: f64) -> StationObservable {
    let (sin2, cos2) = (2.0 * theta).sin_cos();
    let matrix = array![[c(cos2), c(sin2)], [c(sin2), c(-cos2)]];
    let (plus, minus) = analyzer_basis(theta);
    StationObservable {
        theta,
        matrix,
        plus,
        minus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, inner, max_abs, reduced_from_state, vec_norm};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn bell_state_amplitudes_and_norm() {
        let phi = bell_phi_plus();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((phi[0].re - s).abs() < 1e-15);
        assert!(phi[1].norm() == 0.0 && phi[2].norm() == 0.0);
        assert!((phi[3].re - s).abs() < 1e-15);
        assert!((vec_norm(&phi) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_state_marginals_are_maximally_mixed() {
        let phi = bell_phi_plus();
        for keep in [0usize, 1] {
            let red = reduced_from_state(&phi, &[2, 2], &[keep]).unwrap();
            let half = identity(2).mapv(|z| z * 0.5);
            assert!(max_abs(&(&red - &half)) < 1e-15);
        }
    }

    #[test]
    fn analyzer_basis_at_zero_and_right_angle() {
        let (p, m) = analyzer_basis(0.0);
        assert!((p[0].re - 1.0).abs() < 1e-15 && p[1].norm() < 1e-15);
        assert!(m[0].norm() < 1e-15 && (m[1].re - 1.0).abs() < 1e-15);
        let (p, m) = analyzer_basis(FRAC_PI_2);
        assert!(p[0].norm() < 1e-15 && (p[1].re - 1.0).abs() < 1e-15);
        assert!((m[0].re + 1.0).abs() < 1e-15 && m[1].norm() < 1e-15);
    }

    #[test]
    fn observable_closed_forms() {
        let z = observable(0.0);
        assert!((z.matrix[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((z.matrix[(1, 1)].re + 1.0).abs() < 1e-15);
        assert!(z.matrix[(0, 1)].norm() < 1e-15);
        let x = observable(FRAC_PI_4);
        assert!(x.matrix[(0, 0)].norm() < 1e-15);
        assert!((x.matrix[(0, 1)].re - 1.0).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn basis_is_orthonormal(theta in 0.0..PI) {
            let (p, m) = analyzer_basis(theta);
            prop_assert!((vec_norm(&p) - 1.0).abs() < 1e-14);
            prop_assert!((vec_norm(&m) - 1.0).abs() < 1e-14);
            prop_assert!(inner(&p, &m).norm() < 1e-14);
        }

        #[test]
        fn x_reconstructs_from_basis(theta in 0.0..PI) {
            // |x⟩ = |+⟩cos θ − |−⟩sin θ
            let (p, m) = analyzer_basis(theta);
            let x = &p.mapv(|z| z * theta.cos()) - &m.mapv(|z| z * theta.sin());
            prop_assert!((x[0].re - 1.0).abs() < 1e-12);
            prop_assert!(x[1].norm() < 1e-12);
        }

        #[test]
        fn observable_is_involutory_traceless(theta in -PI..PI) {
            let o = observable(theta);
            let sq = o.matrix.dot(&o.matrix);
            prop_assert!(max_abs(&(&sq - &identity(2))) < 1e-12);
            let tr = o.matrix[(0, 0)] + o.matrix[(1, 1)];
            prop_assert!(tr.norm() < 1e-12);
        }

        #[test]
        fn eigenbranches_have_unit_eigenvalues(theta in -PI..PI) {
            let o = observable(theta);
            let op = o.matrix.dot(&o.plus);
            prop_assert!(vec_norm(&(&op - &o.plus)) < 1e-12);
            let om = o.matrix.dot(&o.minus);
            prop_assert!(vec_norm(&(&om + &o.minus)) < 1e-12);
        }

        #[test]
        fn spectral_reconstruction_matches_closed_form(theta in -PI..PI) {
            // (+1)|+⟩⟨+| + (−1)|−⟩⟨−|
            let o = observable(theta);
            let mut spectral = ndarray::Array2::zeros((2, 2));
            for i in 0..2 {
                for j in 0..2 {
                    spectral[(i, j)] = o.plus[i] * o.plus[j].conj() - o.minus[i] * o.minus[j].conj();
                }
            }
            prop_assert!(max_abs(&(&spectral - &o.matrix)) < 1e-12);
        }

        #[test]
        fn observable_is_half_turn_periodic(theta in -PI..PI) {
            let a = observable(theta);
            let b = observable(theta + PI);
            prop_assert!(max_abs(&(&a.matrix - &b.matrix)) < 1e-12);
        }
    }

    #[test]
    fn bell_correlation_matches_angle_difference_law() {
        // ⟨φ+| A(α)⊗B(β) |φ+⟩ = cos 2(α−β), cross-checked against the
        // probabilities ½cos²(α−β), ½sin²(α−β) summed with their signs.
        let phi = bell_phi_plus();
        for i in 0..19 {
            for j in 0..19 {
                let alpha = i as f64 * PI / 19.0;
                let beta = j as f64 * PI / 19.0;
                let ab = crate::linalg::kron(&observable(alpha).matrix, &observable(beta).matrix)
                    .unwrap();
                let e = inner(&phi, &ab.dot(&phi)).re;
                let d = alpha - beta;
                let brute = 0.5 * d.cos().powi(2) * 2.0 - 0.5 * d.sin().powi(2) * 2.0;
                assert!((e - (2.0 * d).cos()).abs() < 1e-10);
                assert!((e - brute).abs() < 1e-10);
            }
        }
    }
}
