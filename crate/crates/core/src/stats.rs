//! Derived observables over outcome distributions: correlation, CHSH,
//! no-signaling audit, and seeded outcome sampling with a chi-square
//! self-test.
//!
//! Sampling uses the ChaCha8 stream cipher PRNG (`rand_chacha::ChaCha8Rng`)
//! seeded directly with the configured 64-bit seed, so sequences are
//! reproducible for a given (seed, distribution, n).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::photon::AnalyzerSettings;

/// One conclusive run of the experiment: the pair of pointer readings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    #[serde(rename = "++")]
    PlusPlus,
    #[serde(rename = "+-")]
    PlusMinus,
    #[serde(rename = "-+")]
    MinusPlus,
    #[serde(rename = "--")]
    MinusMinus,
}

pub const ALL_OUTCOMES: [Outcome; 4] = [
    Outcome::PlusPlus,
    Outcome::PlusMinus,
    Outcome::MinusPlus,
    Outcome::MinusMinus,
];

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::PlusPlus => "++",
            Outcome::PlusMinus => "+-",
            Outcome::MinusPlus => "-+",
            Outcome::MinusMinus => "--",
        }
    }

    /// Product of the two ±1 readings.
    pub fn parity(&self) -> f64 {
        match self {
            Outcome::PlusPlus | Outcome::MinusMinus => 1.0,
            Outcome::PlusMinus | Outcome::MinusPlus => -1.0,
        }
    }
}

/// Probabilities of the four conclusive outcomes, plus the mass left in
/// neutral readout bins.
#[derive(Debug, Clone, Serialize)]
pub struct OutcomeDistribution {
    /// ++, +−, −+, −− in this order.
    pub p: [f64; 4],
    pub p_inconclusive: f64,
    pub settings: AnalyzerSettings,
}

impl OutcomeDistribution {
    pub fn new(p: [f64; 4], p_inconclusive: f64, settings: AnalyzerSettings) -> Result<Self> {
        let dist = Self {
            p,
            p_inconclusive,
            settings,
        };
        dist.validate()?;
        Ok(dist)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p.iter().chain([&self.p_inconclusive]).any(|&x| x < -1e-12) {
            return Err(Error::InvariantViolation(format!(
                "negative outcome probability in {:?}",
                self.p
            )));
        }
        let total: f64 = self.p.iter().sum::<f64>() + self.p_inconclusive;
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvariantViolation(format!(
                "outcome probabilities sum to {total}, not 1"
            )));
        }
        Ok(())
    }

    pub fn get(&self, o: Outcome) -> f64 {
        self.p[ALL_OUTCOMES.iter().position(|&x| x == o).unwrap()]
    }

    pub fn conclusive_total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Probabilities renormalized over the conclusive outcomes.
    pub fn renormalized(&self) -> Result<[f64; 4]> {
        let total = self.conclusive_total();
        if total <= 1e-12 {
            return Err(Error::InvariantViolation(
                "distribution has no conclusive mass".into(),
            ));
        }
        Ok(self.p.map(|x| x.max(0.0) / total))
    }

    /// The probabilities the pointer model should reproduce in delta mode:
    /// (½cos²(α−β), ½sin²(α−β), ½sin²(α−β), ½cos²(α−β)).
    pub fn ideal(settings: AnalyzerSettings) -> Self {
        let d = settings.difference();
        let c = 0.5 * d.cos().powi(2);
        let s = 0.5 * d.sin().powi(2);
        Self {
            p: [c, s, s, c],
            p_inconclusive: 0.0,
            settings,
        }
    }

    /// Largest deviation from the ideal closed-form law.
    pub fn max_deviation_from_ideal(&self) -> f64 {
        let ideal = Self::ideal(self.settings);
        self.p
            .iter()
            .zip(ideal.p.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Correlation E = P(++) + P(−−) − P(+−) − P(−+), over the conclusive
/// outcomes.
pub fn correlation(dist: &OutcomeDistribution) -> Result<f64> {
    let p = dist.renormalized()?;
    Ok(p[0] + p[3] - p[1] - p[2])
}

#[derive(Debug, Clone, Serialize)]
pub struct ChshResult {
    pub s: f64,
    /// E(a,b), E(a,b′), E(a′,b), E(a′,b′).
    pub correlations: [f64; 4],
}

/// CHSH combination S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′), with E
/// supplied by the measurement pipeline.
pub fn chsh<E>(correlate: E, a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<ChshResult>
where
    E: Fn(f64, f64) -> Result<f64>,
{
    let e_ab = correlate(a, b)?;
    let e_abp = correlate(a, b_prime)?;
    let e_apb = correlate(a_prime, b)?;
    let e_apbp = correlate(a_prime, b_prime)?;
    Ok(ChshResult {
        s: e_ab - e_abp + e_apb + e_apbp,
        correlations: [e_ab, e_abp, e_apb, e_apbp],
    })
}

/// Station marginals checked for dependence on the remote setting.
#[derive(Debug, Clone, Serialize)]
pub struct NoSignalingReport {
    /// max |P_A(+|α,β) − ½| and |P_B(+|α,β) − ½| over the grid.
    pub max_marginal_deviation: f64,
    /// max |P_A(+|α,β₁) − P_A(+|α,β₂)| over remote-setting pairs.
    pub max_remote_dependence_a: f64,
    /// Same for station B against α pairs.
    pub max_remote_dependence_b: f64,
}

/// Audits no-signaling over an angle grid. `distribution` runs the full
/// pipeline at the given (α, β).
pub fn no_signaling_audit<F>(
    distribution: F,
    alphas: &[f64],
    betas: &[f64],
) -> Result<NoSignalingReport>
where
    F: Fn(f64, f64) -> Result<OutcomeDistribution>,
{
    let mut marg_a = vec![vec![0.0; betas.len()]; alphas.len()];
    let mut marg_b = vec![vec![0.0; betas.len()]; alphas.len()];
    let mut max_marg: f64 = 0.0;
    for (i, &alpha) in alphas.iter().enumerate() {
        for (j, &beta) in betas.iter().enumerate() {
            let d = distribution(alpha, beta)?;
            let pa = d.get(Outcome::PlusPlus) + d.get(Outcome::PlusMinus);
            let pb = d.get(Outcome::PlusPlus) + d.get(Outcome::MinusPlus);
            marg_a[i][j] = pa;
            marg_b[i][j] = pb;
            max_marg = max_marg.max((pa - 0.5).abs()).max((pb - 0.5).abs());
        }
    }
    let mut dep_a: f64 = 0.0;
    let mut dep_b: f64 = 0.0;
    for i in 0..alphas.len() {
        for j in 0..betas.len() {
            for k in 0..betas.len() {
                dep_a = dep_a.max((marg_a[i][j] - marg_a[i][k]).abs());
            }
            for k in 0..alphas.len() {
                dep_b = dep_b.max((marg_b[i][j] - marg_b[k][j]).abs());
            }
        }
    }
    Ok(NoSignalingReport {
        max_marginal_deviation: max_marg,
        max_remote_dependence_a: dep_a,
        max_remote_dependence_b: dep_b,
    })
}

/// A reproducible sequence of sampled outcomes.
#[derive(Debug, Clone, Serialize)]
pub struct OutcomeSequence {
    pub settings: AnalyzerSettings,
    pub seed: u64,
    pub outcomes: Vec<Outcome>,
}

impl OutcomeSequence {
    pub fn counts(&self) -> [u64; 4] {
        let mut counts = [0u64; 4];
        for o in &self.outcomes {
            counts[ALL_OUTCOMES.iter().position(|x| x == o).unwrap()] += 1;
        }
        counts
    }
}

/// Draws n i.i.d. outcomes from the conclusive part of the distribution
/// by inverse CDF, using ChaCha8 seeded with `seed`.
pub fn sample(dist: &OutcomeDistribution, n: usize, seed: u64) -> Result<OutcomeSequence> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample size must be >= 1".into()));
    }
    let p = dist.renormalized()?;
    // rounding fallback: the last cell with nonzero probability
    let last_live = (0..4).rev().find(|&k| p[k] > 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = ALL_OUTCOMES[last_live];
        for (k, &pk) in p.iter().enumerate() {
            acc += pk;
            if u < acc {
                chosen = ALL_OUTCOMES[k];
                break;
            }
        }
        outcomes.push(chosen);
    }
    Ok(OutcomeSequence {
        settings: dist.settings,
        seed,
        outcomes,
    })
}

/// Pearson chi-square statistic of a sequence against its generating
/// distribution. Cells with (near-)zero probability are excluded;
/// dof = live cells − 1.
pub fn chi_square_self_test(
    seq: &OutcomeSequence,
    dist: &OutcomeDistribution,
) -> Result<(f64, usize)> {
    let n = seq.outcomes.len();
    if n < 1000 {
        return Err(Error::InvalidConfig(format!(
            "chi-square self-test needs n >= 1000, got {n}"
        )));
    }
    let p = dist.renormalized()?;
    let counts = seq.counts();
    let mut statistic = 0.0;
    let mut live = 0usize;
    for k in 0..4 {
        let expected = p[k] * n as f64;
        if p[k] <= 1e-12 {
            if counts[k] > 0 {
                return Err(Error::InvariantViolation(format!(
                    "outcome {} observed {} times but has zero probability",
                    ALL_OUTCOMES[k].label(),
                    counts[k]
                )));
            }
            continue;
        }
        if expected < 5.0 {
            return Err(Error::InvalidConfig(format!(
                "expected count {expected:.2} for outcome {} below 5",
                ALL_OUTCOMES[k].label()
            )));
        }
        let diff = counts[k] as f64 - expected;
        statistic += diff * diff / expected;
        live += 1;
    }
    Ok((statistic, live.saturating_sub(1)))
}
