//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (run with `--nocapture` to see them).

use std::f64::consts::PI;
use std::time::Instant;

use bellsim::engine::{commutator_norm, Engine, ExperimentConfig, Method, Station};
use bellsim::linalg::vec_norm;
use bellsim::photon::AnalyzerSettings;
use bellsim::pointer::PointerMode;
use bellsim::stats;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn delta_config(alpha: f64, beta: f64) -> ExperimentConfig {
    ExperimentConfig {
        settings: AnalyzerSettings::new(alpha, beta),
        ..ExperimentConfig::default()
    }
}

fn gaussian_config(alpha: f64, beta: f64, sites: usize, epsilon: f64, sigma: f64) -> ExperimentConfig {
    ExperimentConfig {
        settings: AnalyzerSettings::new(alpha, beta),
        pointer_sites: sites,
        pointer_mode: PointerMode::Gaussian { sigma },
        time: 1.0,
        coupling: epsilon,
        ..ExperimentConfig::default()
    }
}

fn grid_19() -> Vec<f64> {
    (0..19).map(|i| i as f64 * PI / 19.0).collect()
}

fn report(name: &str, pass: bool) {
    println!(
        "criterion {name}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {name} failed");
}

#[test]
fn criterion_01_outcome_law_reproduction() {
    let start = Instant::now();
    let grid = grid_19();
    let mut max_err = 0.0f64;
    for &alpha in &grid {
        for &beta in &grid {
            let engine = Engine::new(delta_config(alpha, beta)).unwrap();
            let outcomes = engine.run(Method::Exact).unwrap().outcomes;
            max_err = max_err.max(outcomes.max_deviation_from_ideal());
            max_err = max_err.max(outcomes.p_inconclusive.abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!("  max |P - ideal| = {max_err:.3e}, runtime {elapsed:.2}s");
    report(
        "01 outcome-law reproduction (19x19 grid, delta mode)",
        max_err <= 1e-10 && elapsed < 5.0,
    );
}

#[test]
fn criterion_02_reduced_density_diagonality() {
    let grid = grid_19();
    let mut max_offdiag = 0.0f64;
    for &alpha in &grid {
        for &beta in &grid {
            let engine = Engine::new(delta_config(alpha, beta)).unwrap();
            let result = engine.run(Method::Exact).unwrap();
            max_offdiag = max_offdiag.max(result.pointer_density.max_offdiag());
        }
    }
    println!("  max off-diagonal = {max_offdiag:.3e}");
    report("02 reduced-density diagonality", max_offdiag <= 1e-10);
}

#[test]
fn criterion_03_locality_factorization() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(303);
    let mut max_comm = 0.0f64;
    let mut max_gap = 0.0f64;
    for _ in 0..50 {
        let engine = Engine::new(delta_config(
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
        ))
        .unwrap();
        let h_a = engine.local_hamiltonian(Station::A).unwrap();
        let h_b = engine.local_hamiltonian(Station::B).unwrap();
        max_comm = max_comm.max(commutator_norm(&h_a, &h_b));
        max_gap = max_gap.max(engine.factorization_gap(&h_a, &h_b).unwrap());
    }
    let engine = Engine::new(delta_config(0.0, PI / 4.0)).unwrap();
    let h_a = engine.local_hamiltonian(Station::A).unwrap();
    let h_b = engine.nonlocal_hamiltonian_b(1.0).unwrap();
    let nl_comm = commutator_norm(&h_a, &h_b);
    let nl_gap = engine.factorization_gap(&h_a, &h_b).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "  local: max commutator {max_comm:.3e}, max gap {max_gap:.3e}; \
         nonlocal: commutator {nl_comm:.3e}, gap {nl_gap:.3e}; runtime {elapsed:.2}s"
    );
    report(
        "03 locality factorization",
        max_comm <= 1e-10 && max_gap <= 1e-9 && nl_comm > 1e-2 && nl_gap > 1e-2 && elapsed < 10.0,
    );
}

#[test]
fn criterion_04_frame_order_invariance() {
    let mut rng = StdRng::seed_from_u64(404);
    let mut max_state_gap = 0.0f64;
    for _ in 0..50 {
        let engine = Engine::new(delta_config(
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
        ))
        .unwrap();
        let h_a = engine.local_hamiltonian(Station::A).unwrap();
        let h_b = engine.local_hamiltonian(Station::B).unwrap();
        let gap = engine.order_swap_gap(&h_a, &h_b).unwrap();
        max_state_gap = max_state_gap.max(gap.state_gap);
    }
    let engine = Engine::new(delta_config(0.0, PI / 4.0)).unwrap();
    let h_a = engine.local_hamiltonian(Station::A).unwrap();
    let h_b = engine.nonlocal_hamiltonian_b(1.0).unwrap();
    let nl = engine.order_swap_gap(&h_a, &h_b).unwrap();
    println!(
        "  local max state gap {max_state_gap:.3e}; nonlocal state gap {:.3e}, prob gap {:.3e}",
        nl.state_gap, nl.prob_gap
    );
    report(
        "04 frame-order invariance",
        max_state_gap <= 1e-9 && nl.state_gap > 1e-2 && nl.prob_gap > 1e-3,
    );
}

#[test]
fn criterion_05_three_method_agreement() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(505);
    let mut max_diff = 0.0f64;
    for run in 0..50 {
        let (alpha, beta) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
        let config = if run < 46 {
            // random split of ε = 1 between t and λ
            let t = rng.gen_range(0.2..2.0);
            ExperimentConfig {
                time: t,
                coupling: 1.0 / t,
                ..delta_config(alpha, beta)
            }
        } else {
            let t = rng.gen_range(0.2..2.0);
            ExperimentConfig {
                time: t,
                coupling: 2.0 / t,
                ..gaussian_config(alpha, beta, 16, 2.0, 0.5)
            }
        };
        let engine = Engine::new(config).unwrap();
        let exact = engine.run(Method::Exact).unwrap().final_state;
        let factorized = engine.run(Method::Factorized).unwrap().final_state;
        let branch = engine.run(Method::Branch).unwrap().final_state;
        max_diff = max_diff
            .max(vec_norm(&(&exact - &factorized)))
            .max(vec_norm(&(&exact - &branch)))
            .max(vec_norm(&(&factorized - &branch)));
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!("  max pairwise final-state difference = {max_diff:.3e}, runtime {elapsed:.2}s");
    report(
        "05 three-method agreement (46 delta + 4 gaussian configs)",
        max_diff <= 1e-10 && elapsed < 60.0,
    );
}

#[test]
fn criterion_06_chsh_tsirelson() {
    let base = delta_config(0.0, 0.0);
    let correlate = |a: f64, b: f64| -> bellsim::Result<f64> {
        stats::correlation(&bellsim::engine::distribution_at(&base, a, b)?)
    };
    let optimal = stats::chsh(
        correlate,
        0.0,
        45f64.to_radians(),
        22.5f64.to_radians(),
        67.5f64.to_radians(),
    )
    .unwrap();
    let tsirelson = 2.0 * 2f64.sqrt();

    let mut rng = StdRng::seed_from_u64(606);
    let mut scan_max = optimal.s.abs();
    for _ in 0..10_000 {
        let r = stats::chsh(
            correlate,
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
        )
        .unwrap();
        scan_max = scan_max.max(r.s.abs());
    }
    println!(
        "  S(optimal) = {:.9} (2√2 = {tsirelson:.9}); scan max |S| = {scan_max:.9}",
        optimal.s
    );
    report(
        "06 CHSH Tsirelson bound",
        (optimal.s - tsirelson).abs() <= 1e-6 && scan_max <= tsirelson + 1e-9,
    );
}

#[test]
fn criterion_07_no_signaling() {
    let base = delta_config(0.0, 0.0);
    let grid = grid_19();
    let audit = stats::no_signaling_audit(
        |a, b| bellsim::engine::distribution_at(&base, a, b),
        &grid,
        &grid,
    )
    .unwrap();
    println!(
        "  max marginal deviation {:.3e}, remote dependence A {:.3e} / B {:.3e}",
        audit.max_marginal_deviation, audit.max_remote_dependence_a, audit.max_remote_dependence_b
    );
    report(
        "07 no-signaling marginals",
        audit.max_marginal_deviation <= 1e-10
            && audit.max_remote_dependence_a <= 1e-10
            && audit.max_remote_dependence_b <= 1e-10,
    );
}

#[test]
fn criterion_08_epsilon_equivalence() {
    let mut rng = StdRng::seed_from_u64(808);
    let reference = Engine::new(delta_config(0.3, 1.1))
        .unwrap()
        .run(Method::Exact)
        .unwrap()
        .final_state;
    let mut max_diff = 0.0f64;
    for _ in 0..10 {
        let t = rng.gen_range(0.05..5.0);
        let config = ExperimentConfig {
            time: t,
            coupling: 1.0 / t,
            ..delta_config(0.3, 1.1)
        };
        let state = Engine::new(config)
            .unwrap()
            .run(Method::Exact)
            .unwrap()
            .final_state;
        max_diff = max_diff.max(vec_norm(&(&state - &reference)));
    }
    println!("  max final-state difference over (t, λ) splits = {max_diff:.3e}");
    report("08 epsilon-equivalence of (t, λ) splits", max_diff <= 1e-12);
}

#[test]
fn criterion_09_sampler_fidelity() {
    // α − β = 30°: probabilities (0.375, 0.125, 0.125, 0.375)
    let engine = Engine::new(delta_config(30f64.to_radians(), 0.0)).unwrap();
    let dist = engine.run(Method::Branch).unwrap().outcomes;
    let n = 100_000usize;
    let seq = stats::sample(&dist, n, 20240).unwrap();
    let counts = seq.counts();
    let expected = [0.375, 0.125, 0.125, 0.375];
    let mut freq_ok = true;
    for k in 0..4 {
        let freq = counts[k] as f64 / n as f64;
        let se = (expected[k] * (1.0 - expected[k]) / n as f64).sqrt();
        if (freq - expected[k]).abs() > 4.0 * se {
            freq_ok = false;
        }
    }
    let mut exceedances = 0;
    for seed in 0..100u64 {
        let seq = stats::sample(&dist, n, seed).unwrap();
        let (statistic, dof) = stats::chi_square_self_test(&seq, &dist).unwrap();
        assert_eq!(dof, 3);
        if statistic > 11.34 {
            exceedances += 1;
        }
    }
    println!("  frequencies within 4 SE: {freq_ok}; χ² exceedances: {exceedances}/100");
    report(
        "09 sampler fidelity",
        freq_ok && exceedances <= 5,
    );
}

#[test]
fn criterion_10_gaussian_mode_degradation() {
    let mut prev_deviation = f64::INFINITY;
    let mut all_ok = true;
    let mut lines = Vec::new();
    // decreasing σ must give decreasing deviation from the ideal law
    for &sigma in &[4.0, 2.0, 1.0] {
        let config = gaussian_config(0.0, 22.5f64.to_radians(), 64, 8.0, sigma);
        let engine = Engine::new(config).unwrap();
        let result = engine.run(Method::Branch).unwrap();
        let coherence = engine
            .branch_coherence_max(&result.pointer_density)
            .unwrap();
        let overlap = engine.pointer().displaced_overlap().unwrap();
        let deviation = result.outcomes.max_deviation_from_ideal();
        lines.push(format!(
            "  σ={sigma}: coherence {coherence:.3e} (bound {overlap:.3e}), deviation {deviation:.3e}"
        ));
        if coherence > overlap + 1e-10 || deviation >= prev_deviation {
            all_ok = false;
        }
        prev_deviation = deviation;
    }
    for l in &lines {
        println!("{l}");
    }
    report("10 gaussian-mode degradation", all_ok);
}
