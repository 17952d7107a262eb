//! Command-line front end: configuration parsing, experiment
//! orchestration, JSON/CSV output.
//!
//! Angles are taken in degrees on the command line and converted to
//! radians at this boundary. Every output artifact carries a metadata
//! block echoing the resolved configuration.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::engine::{self, commutator_norm, Engine, ExperimentConfig, Method, Station};
use crate::error::{Error, Result};
use crate::photon::AnalyzerSettings;
use crate::pointer::PointerMode;
use crate::stats::{self, OutcomeDistribution};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "bellsim",
    version,
    about = "von Neumann pointer-model simulator of a two-station Bell experiment"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Outcome probabilities at one pair of analyzer angles
    Probs(ProbsArgs),
    /// Probabilities and correlation over an (α, β) grid
    Scan(ScanArgs),
    /// CHSH S-value for four analyzer angles
    Chsh(ChshArgs),
    /// Locality diagnostics for local and nonlocal Hamiltonians
    Locality(LocalityArgs),
    /// Sample an outcome sequence with a chi-square self-test
    Sample(SampleArgs),
    /// Gaussian-mode deviation from the ideal outcome law vs σ
    Converge(ConvergeArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum PointerKind {
    Delta,
    Gaussian,
}

#[derive(Args, Debug, Clone)]
struct CommonOpts {
    /// Output path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, value_enum, default_value_t = PointerKind::Delta)]
    pointer: PointerKind,
    /// Pointer lattice sites N
    #[arg(long, default_value_t = 3)]
    sites: usize,
    /// Gaussian initial-state width, in lattice sites
    #[arg(long)]
    sigma: Option<f64>,
    /// Interaction area ε = tλ, in lattice sites
    #[arg(long)]
    epsilon: Option<f64>,
    /// Interaction time t
    #[arg(long)]
    time: Option<f64>,
    /// Interaction strength λ
    #[arg(long)]
    coupling: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
}

impl CommonOpts {
    fn pointer_mode(&self) -> Result<PointerMode> {
        match self.pointer {
            PointerKind::Delta => {
                if self.sigma.is_some() {
                    return Err(Error::InvalidConfig(
                        "--sigma only applies to --pointer gaussian".into(),
                    ));
                }
                Ok(PointerMode::Delta)
            }
            PointerKind::Gaussian => {
                let sigma = self.sigma.ok_or_else(|| {
                    Error::InvalidConfig("--pointer gaussian requires --sigma".into())
                })?;
                Ok(PointerMode::Gaussian { sigma })
            }
        }
    }

    /// Resolve (t, λ) from whichever of --epsilon/--time/--coupling were
    /// given; the default is ε = 1 split as t = λ = 1.
    fn time_coupling(&self) -> Result<(f64, f64)> {
        match (self.epsilon, self.time, self.coupling) {
            (None, None, None) => Ok((1.0, 1.0)),
            (Some(eps), None, None) => Ok((eps, 1.0)),
            (None, Some(t), Some(l)) => Ok((t, l)),
            (Some(eps), Some(t), None) => {
                if t == 0.0 {
                    return Err(Error::InvalidConfig("--time must be nonzero".into()));
                }
                Ok((t, eps / t))
            }
            (Some(eps), None, Some(l)) => {
                if l == 0.0 && eps != 0.0 {
                    return Err(Error::InvalidConfig(
                        "--coupling 0 is inconsistent with a nonzero --epsilon".into(),
                    ));
                }
                if l == 0.0 {
                    return Ok((1.0, 0.0));
                }
                Ok((eps / l, l))
            }
            (Some(eps), Some(t), Some(l)) => {
                if (t * l - eps).abs() > 1e-12 {
                    return Err(Error::InvalidConfig(format!(
                        "--epsilon {eps} conflicts with --time {t} × --coupling {l}"
                    )));
                }
                Ok((t, l))
            }
            _ => Err(Error::InvalidConfig(
                "--time and --coupling must be given together (or use --epsilon)".into(),
            )),
        }
    }

    fn config(&self, alpha_deg: f64, beta_deg: f64) -> Result<ExperimentConfig> {
        let (time, coupling) = self.time_coupling()?;
        Ok(ExperimentConfig {
            settings: AnalyzerSettings::new(alpha_deg.to_radians(), beta_deg.to_radians()),
            pointer_sites: self.sites,
            pointer_mode: self.pointer_mode()?,
            time,
            coupling,
            tolerance: self.tolerance,
            seed: self.seed,
        })
    }
}

#[derive(Args, Debug)]
struct ProbsArgs {
    /// Station A analyzer angle, degrees
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Station B analyzer angle, degrees
    #[arg(long, default_value_t = 22.5)]
    beta: f64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Grid resolution per axis over [0°, 180°)
    #[arg(long, default_value_t = 19)]
    grid: usize,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct ChshArgs {
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long = "a-prime", default_value_t = 45.0)]
    a_prime: f64,
    #[arg(long, default_value_t = 22.5)]
    b: f64,
    #[arg(long = "b-prime", default_value_t = 67.5)]
    b_prime: f64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct LocalityArgs {
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 45.0)]
    beta: f64,
    /// Cross-station coupling strength of the nonlocal counterexample
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 22.5)]
    beta: f64,
    /// Number of trials
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 22.5)]
    beta: f64,
    /// Comma-separated list of gaussian widths to compare
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    sigmas: Vec<f64>,
    #[command(flatten)]
    common: CommonOpts,
}

/// Parse arguments and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Probs(args) => cmd_probs(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Chsh(args) => cmd_chsh(args),
        Command::Locality(args) => cmd_locality(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Converge(args) => cmd_converge(args),
    }
}

#[derive(Serialize)]
struct Metadata {
    command: String,
    version: &'static str,
    config: ExperimentConfig,
}

fn metadata(command: &str, config: &ExperimentConfig) -> Metadata {
    Metadata {
        command: command.into(),
        version: VERSION,
        config: config.clone(),
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:.15e}")
}

struct Output {
    out: Option<PathBuf>,
    format: Format,
}

impl Output {
    fn new(common: &CommonOpts) -> Self {
        Self {
            out: common.out.clone(),
            format: common.format,
        }
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(File::create(path)?),
            None => Box::new(std::io::stdout().lock()),
        })
    }

    fn emit<T: Serialize>(
        &self,
        meta: &Metadata,
        data: &T,
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) -> Result<()> {
        let mut w = self.writer()?;
        match self.format {
            Format::Json => {
                let doc = json!({ "metadata": meta, "data": data });
                serde_json::to_writer_pretty(&mut w, &doc)
                    .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))?;
                writeln!(w)?;
            }
            Format::Csv => {
                let meta_json = serde_json::to_string(meta)
                    .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))?;
                writeln!(w, "# {meta_json}")?;
                writeln!(w, "{}", header.join(","))?;
                for row in rows {
                    writeln!(w, "{}", row.join(","))?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct ProbsBlock {
    #[serde(rename = "++")]
    pp: f64,
    #[serde(rename = "+-")]
    pm: f64,
    #[serde(rename = "-+")]
    mp: f64,
    #[serde(rename = "--")]
    mm: f64,
}

impl ProbsBlock {
    fn new(p: &[f64; 4]) -> Self {
        Self {
            pp: p[0],
            pm: p[1],
            mp: p[2],
            mm: p[3],
        }
    }
}

fn cmd_probs(args: ProbsArgs) -> Result<()> {
    let config = args.common.config(args.alpha, args.beta)?;
    let engine = Engine::new(config.clone())?;
    let result = engine.run(Method::Branch)?;
    let ideal = OutcomeDistribution::ideal(config.settings);

    #[derive(Serialize)]
    struct Data {
        alpha_deg: f64,
        beta_deg: f64,
        probabilities: ProbsBlock,
        p_inconclusive: f64,
        ideal: ProbsBlock,
        max_deviation_from_ideal: f64,
        correlation: f64,
    }
    let data = Data {
        alpha_deg: args.alpha,
        beta_deg: args.beta,
        probabilities: ProbsBlock::new(&result.outcomes.p),
        p_inconclusive: result.outcomes.p_inconclusive,
        ideal: ProbsBlock::new(&ideal.p),
        max_deviation_from_ideal: result.outcomes.max_deviation_from_ideal(),
        correlation: stats::correlation(&result.outcomes)?,
    };

    let header = [
        "alpha_deg",
        "beta_deg",
        "p_pp",
        "p_pm",
        "p_mp",
        "p_mm",
        "p_inconclusive",
        "ideal_pp",
        "ideal_pm",
        "ideal_mp",
        "ideal_mm",
        "correlation",
    ];
    let mut row = vec![fmt_float(args.alpha), fmt_float(args.beta)];
    row.extend(result.outcomes.p.iter().map(|&x| fmt_float(x)));
    row.push(fmt_float(result.outcomes.p_inconclusive));
    row.extend(ideal.p.iter().map(|&x| fmt_float(x)));
    row.push(fmt_float(data.correlation));
    Output::new(&args.common).emit(&metadata("probs", &config), &data, &header, vec![row])
}

fn cmd_scan(args: ScanArgs) -> Result<()> {
    if args.grid < 2 {
        return Err(Error::InvalidConfig("--grid must be at least 2".into()));
    }
    let base = args.common.config(0.0, 0.0)?;

    #[derive(Serialize)]
    struct Row {
        alpha_deg: f64,
        beta_deg: f64,
        probabilities: ProbsBlock,
        p_inconclusive: f64,
        correlation: f64,
    }

    let step = 180.0 / args.grid as f64;
    let mut rows_json = Vec::new();
    let mut rows_csv = Vec::new();
    for i in 0..args.grid {
        for j in 0..args.grid {
            let (alpha_deg, beta_deg) = (i as f64 * step, j as f64 * step);
            let dist = engine::distribution_at(
                &base,
                alpha_deg.to_radians(),
                beta_deg.to_radians(),
            )?;
            let correlation = stats::correlation(&dist)?;
            let mut row = vec![fmt_float(alpha_deg), fmt_float(beta_deg)];
            row.extend(dist.p.iter().map(|&x| fmt_float(x)));
            row.push(fmt_float(dist.p_inconclusive));
            row.push(fmt_float(correlation));
            rows_csv.push(row);
            rows_json.push(Row {
                alpha_deg,
                beta_deg,
                probabilities: ProbsBlock::new(&dist.p),
                p_inconclusive: dist.p_inconclusive,
                correlation,
            });
        }
    }
    let header = [
        "alpha_deg",
        "beta_deg",
        "p_pp",
        "p_pm",
        "p_mp",
        "p_mm",
        "p_inconclusive",
        "correlation",
    ];
    Output::new(&args.common).emit(&metadata("scan", &base), &rows_json, &header, rows_csv)
}

fn cmd_chsh(args: ChshArgs) -> Result<()> {
    let base = args.common.config(args.a, args.b)?;
    let result = stats::chsh(
        |x, y| stats::correlation(&engine::distribution_at(&base, x, y)?),
        args.a.to_radians(),
        args.a_prime.to_radians(),
        args.b.to_radians(),
        args.b_prime.to_radians(),
    )?;

    #[derive(Serialize)]
    struct Data {
        a_deg: f64,
        a_prime_deg: f64,
        b_deg: f64,
        b_prime_deg: f64,
        s: f64,
        e_ab: f64,
        e_ab_prime: f64,
        e_a_prime_b: f64,
        e_a_prime_b_prime: f64,
    }
    let data = Data {
        a_deg: args.a,
        a_prime_deg: args.a_prime,
        b_deg: args.b,
        b_prime_deg: args.b_prime,
        s: result.s,
        e_ab: result.correlations[0],
        e_ab_prime: result.correlations[1],
        e_a_prime_b: result.correlations[2],
        e_a_prime_b_prime: result.correlations[3],
    };
    let header = [
        "a_deg",
        "a_prime_deg",
        "b_deg",
        "b_prime_deg",
        "s",
        "e_ab",
        "e_ab_prime",
        "e_a_prime_b",
        "e_a_prime_b_prime",
    ];
    let row = vec![
        fmt_float(args.a),
        fmt_float(args.a_prime),
        fmt_float(args.b),
        fmt_float(args.b_prime),
        fmt_float(result.s),
        fmt_float(result.correlations[0]),
        fmt_float(result.correlations[1]),
        fmt_float(result.correlations[2]),
        fmt_float(result.correlations[3]),
    ];
    Output::new(&args.common).emit(&metadata("chsh", &base), &data, &header, vec![row])
}

fn cmd_locality(args: LocalityArgs) -> Result<()> {
    let config = args.common.config(args.alpha, args.beta)?;
    let engine = Engine::new(config.clone())?;
    let h_a = engine.local_hamiltonian(Station::A)?;
    let h_b_local = engine.local_hamiltonian(Station::B)?;
    let h_b_nonlocal = engine.nonlocal_hamiltonian_b(args.mu)?;

    #[derive(Serialize)]
    struct Diagnostics {
        commutator_norm: f64,
        factorization_gap: f64,
        order_swap_state_gap: f64,
        order_swap_prob_gap: f64,
    }
    let diag = |h_b: &crate::linalg::CMatrix| -> Result<Diagnostics> {
        let gap = engine.order_swap_gap(&h_a, h_b)?;
        Ok(Diagnostics {
            commutator_norm: commutator_norm(&h_a, h_b),
            factorization_gap: engine.factorization_gap(&h_a, h_b)?,
            order_swap_state_gap: gap.state_gap,
            order_swap_prob_gap: gap.prob_gap,
        })
    };
    let local = diag(&h_b_local)?;
    let nonlocal = diag(&h_b_nonlocal)?;

    #[derive(Serialize)]
    struct Data {
        alpha_deg: f64,
        beta_deg: f64,
        mu: f64,
        local: Diagnostics,
        nonlocal: Diagnostics,
    }
    let data = Data {
        alpha_deg: args.alpha,
        beta_deg: args.beta,
        mu: args.mu,
        local,
        nonlocal,
    };
    let header = [
        "hamiltonians",
        "commutator_norm",
        "factorization_gap",
        "order_swap_state_gap",
        "order_swap_prob_gap",
    ];
    let rows = vec![
        vec![
            "local".into(),
            fmt_float(data.local.commutator_norm),
            fmt_float(data.local.factorization_gap),
            fmt_float(data.local.order_swap_state_gap),
            fmt_float(data.local.order_swap_prob_gap),
        ],
        vec![
            "nonlocal".into(),
            fmt_float(data.nonlocal.commutator_norm),
            fmt_float(data.nonlocal.factorization_gap),
            fmt_float(data.nonlocal.order_swap_state_gap),
            fmt_float(data.nonlocal.order_swap_prob_gap),
        ],
    ];
    Output::new(&args.common).emit(&metadata("locality", &config), &data, &header, rows)
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let config = args.common.config(args.alpha, args.beta)?;
    let engine = Engine::new(config.clone())?;
    let dist = engine.run(Method::Branch)?.outcomes;
    let seq = stats::sample(&dist, args.n, config.seed)?;
    let counts = seq.counts();
    let chi = if args.n >= 1000 {
        Some(stats::chi_square_self_test(&seq, &dist)?)
    } else {
        None
    };

    #[derive(Serialize)]
    struct Data {
        n: usize,
        seed: u64,
        probabilities: ProbsBlock,
        counts: [u64; 4],
        frequencies: [f64; 4],
        chi_square: Option<f64>,
        chi_square_dof: Option<usize>,
        outcomes: Vec<&'static str>,
    }
    let frequencies = counts.map(|c| c as f64 / args.n as f64);
    let data = Data {
        n: args.n,
        seed: config.seed,
        probabilities: ProbsBlock::new(&dist.p),
        counts,
        frequencies,
        chi_square: chi.map(|(s, _)| s),
        chi_square_dof: chi.map(|(_, d)| d),
        outcomes: seq.outcomes.iter().map(|o| o.label()).collect(),
    };
    let header = ["trial", "outcome"];
    let rows = seq
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| vec![i.to_string(), o.label().to_string()])
        .collect();
    Output::new(&args.common).emit(&metadata("sample", &config), &data, &header, rows)
}

fn cmd_converge(args: ConvergeArgs) -> Result<()> {
    if args.sigmas.is_empty() {
        return Err(Error::InvalidConfig("--sigmas must be non-empty".into()));
    }
    // gaussian geometry defaults: N = 64, ε = 8 unless overridden
    let mut common = args.common.clone();
    if common.sites == 3 {
        common.sites = 64;
    }
    if common.epsilon.is_none() && common.time.is_none() && common.coupling.is_none() {
        common.epsilon = Some(8.0);
    }

    #[derive(Serialize)]
    struct Row {
        sigma: f64,
        probabilities: ProbsBlock,
        p_inconclusive: f64,
        max_deviation_from_ideal: f64,
        branch_coherence_max: f64,
        displaced_overlap: f64,
    }
    let mut rows_json = Vec::new();
    let mut rows_csv = Vec::new();
    let mut meta_config = None;
    for &sigma in &args.sigmas {
        let mut per_sigma = common.clone();
        per_sigma.pointer = PointerKind::Gaussian;
        per_sigma.sigma = Some(sigma);
        let config = per_sigma.config(args.alpha, args.beta)?;
        let engine = Engine::new(config.clone())?;
        let result = engine.run(Method::Branch)?;
        let coherence = engine.branch_coherence_max(&result.pointer_density)?;
        let overlap = engine.pointer().displaced_overlap()?;
        let deviation = result.outcomes.max_deviation_from_ideal();
        rows_csv.push(vec![
            fmt_float(sigma),
            fmt_float(result.outcomes.p[0]),
            fmt_float(result.outcomes.p[1]),
            fmt_float(result.outcomes.p[2]),
            fmt_float(result.outcomes.p[3]),
            fmt_float(result.outcomes.p_inconclusive),
            fmt_float(deviation),
            fmt_float(coherence),
            fmt_float(overlap),
        ]);
        rows_json.push(Row {
            sigma,
            probabilities: ProbsBlock::new(&result.outcomes.p),
            p_inconclusive: result.outcomes.p_inconclusive,
            max_deviation_from_ideal: deviation,
            branch_coherence_max: coherence,
            displaced_overlap: overlap,
        });
        meta_config = Some(config);
    }
    let header = [
        "sigma",
        "p_pp",
        "p_pm",
        "p_mp",
        "p_mm",
        "p_inconclusive",
        "max_deviation_from_ideal",
        "branch_coherence_max",
        "displaced_overlap",
    ];
    let config = meta_config.expect("at least one sigma");
    Output::new(&args.common).emit(&metadata("converge", &config), &rows_json, &header, rows_csv)
}
