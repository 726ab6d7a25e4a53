//! Command-line interface: exact spectra, gaps, mixing curves, cutoff
//! sweeps, trajectory samples, orbit classification, stationary-phase
//! diagnostics, assumption audits, and preset model families.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use cyclemix::asymptotics::{
    classify_orbits, closed_form_r, estimates_check, gamma_from_saddle, saddle_approx,
    SaddleReport,
};
use cyclemix::cache;
use cyclemix::kernels::{audit_assumptions, simulate, DEFAULT_STATE_CAP};
use cyclemix::mixing::{cutoff_sweep, exact_tv_curve, worst_case_tv_curve};
use cyclemix::models::{build_asep, build_constant, build_dimer, ModelReport};
use cyclemix::report::{
    classification_table, cutoff_sweep_table, mixing_curve_table, render_config,
    spectrum_table, step_law_fingerprint, write_atomic, write_json_report, CsvTable,
};
use cyclemix::rng::stream_rng;
use cyclemix::{full_spectrum, gap, ChainModel, CircleConfig, Error, Result, StepDistribution};

#[derive(Parser)]
#[command(
    name = "cyclemix",
    version,
    about = "Exact spectral and mixing analysis of non-crossing particle chains on a circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export the per-orbit spectrum as CSV (with JSON sidecar when written
    /// to a file).
    Spectrum(SpectrumArgs),
    /// Print the spectral-gap report as JSON.
    Gap(GapArgs),
    /// Export a mixing curve (t, tv, l2_sq, lower_bound) as CSV.
    Mix(MixArgs),
    /// Sweep cutoff diagnostics across a list of instances.
    Cutoff(CutoffArgs),
    /// Sample a trajectory under a fixed seed and export it as CSV.
    Sample(SampleArgs),
    /// Classify rotation orbits by transport distance; optionally attach
    /// eigenvalue-decay estimates at a fixed degree.
    Classify(ClassifyArgs),
    /// Stationary-phase diagnostics for the ground-state symmetric function.
    Saddle(SaddleArgs),
    /// Audit the standing assumptions on a step law.
    Audit(AuditArgs),
    /// Build a preset family and print its report as JSON.
    Model(ModelArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    /// Fixed step law given via --p.
    Constant,
    /// Conditioned ±1 walks with rates --alpha, --beta.
    Asep,
    /// Dimer slice process with edge weights --a1, --a2.
    Dimer,
}

#[derive(Args, Debug)]
struct ChainArgs {
    /// Circle size n.
    #[arg(long)]
    n: u32,
    /// Particle count k.
    #[arg(long)]
    k: u32,
    /// Step law as comma-separated `step:weight` pairs, e.g. "-1:0.25,0:0.5,1:0.25".
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Preset family instead of an explicit step law.
    #[arg(long, value_enum)]
    model: Option<FamilyArg>,
    /// Clockwise jump rate (asep).
    #[arg(long)]
    alpha: Option<f64>,
    /// Anticlockwise jump rate (asep).
    #[arg(long)]
    beta: Option<f64>,
    /// Weight of traversed edges (dimer).
    #[arg(long)]
    a1: Option<f64>,
    /// Weight of resting edges (dimer).
    #[arg(long)]
    a2: Option<f64>,
    /// State-space enumeration cap.
    #[arg(long)]
    cap: Option<u64>,
}

impl ChainArgs {
    fn parse_law(&self) -> Result<StepDistribution> {
        self.p
            .as_deref()
            .ok_or_else(|| Error::invalid("--p is required for this family"))?
            .parse()
    }

    fn require(value: Option<f64>, flag: &str) -> Result<f64> {
        value.ok_or_else(|| Error::invalid(format!("{flag} is required for this family")))
    }

    fn build(&self) -> Result<(ChainModel, Option<ModelReport>)> {
        let (model, report) = match self.model {
            None => {
                let law = self.parse_law()?;
                (ChainModel::new(self.n, self.k, law)?, None)
            }
            Some(FamilyArg::Constant) => {
                let preset = build_constant(self.n, self.k, &self.parse_law()?)?;
                (preset.model, Some(preset.report))
            }
            Some(FamilyArg::Asep) => {
                let alpha = Self::require(self.alpha, "--alpha")?;
                let beta = Self::require(self.beta, "--beta")?;
                let preset = build_asep(self.n, self.k, alpha, beta)?;
                (preset.model, Some(preset.report))
            }
            Some(FamilyArg::Dimer) => {
                let a1 = Self::require(self.a1, "--a1")?;
                let a2 = Self::require(self.a2, "--a2")?;
                let preset = build_dimer(self.n, self.k, a1, a2)?;
                (preset.model, Some(preset.report))
            }
        };
        let model = match self.cap {
            Some(cap) => model.with_cap(cap),
            None => model,
        };
        Ok((model, report))
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// Output CSV path; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the artifact cache even when CYCLEMIX_CACHE_DIR is set.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct GapArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// Output JSON path; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StartArg {
    /// Start from the ground configuration.
    Ground,
    /// Scan all starts and track the worst one.
    Worst,
}

#[derive(Args)]
struct MixArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// Number of steps to evaluate; defaults to a gap-based horizon.
    #[arg(long)]
    tmax: Option<u64>,
    /// Starting configuration rule.
    #[arg(long, value_enum, default_value_t = StartArg::Ground)]
    start: StartArg,
    /// Output CSV path; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CutoffArgs {
    /// Instances to sweep, comma-separated `n:k` pairs, e.g. "8:4,12:6,16:8".
    #[arg(long)]
    instances: String,
    /// Step law shared by every instance (constant family).
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Preset family applied at each instance size.
    #[arg(long, value_enum)]
    model: Option<FamilyArg>,
    /// Clockwise jump rate (asep).
    #[arg(long)]
    alpha: Option<f64>,
    /// Anticlockwise jump rate (asep).
    #[arg(long)]
    beta: Option<f64>,
    /// Weight of traversed edges (dimer).
    #[arg(long)]
    a1: Option<f64>,
    /// Weight of resting edges (dimer).
    #[arg(long)]
    a2: Option<f64>,
    /// Window coordinates, comma-separated; default -4..4 in steps of 0.5.
    #[arg(long, allow_hyphen_values = true)]
    s_grid: Option<String>,
    /// Distance thresholds, comma-separated; default 0.5,0.25,0.1,0.05.
    #[arg(long)]
    eps_grid: Option<String>,
    /// State-space enumeration cap.
    #[arg(long)]
    cap: Option<u64>,
    /// Output CSV path; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// Trajectory length in steps.
    #[arg(long)]
    steps: u64,
    /// Random seed; identical seeds give identical trajectories.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Circle size n.
    #[arg(long)]
    n: u32,
    /// Particle count k.
    #[arg(long)]
    k: u32,
    /// Far-mass budget constant.
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    /// Depth-margin constant.
    #[arg(long, default_value_t = 10.0)]
    c2: f64,
    /// When set, print eigenvalue-decay estimates at this degree as JSON
    /// instead of the classification CSV.
    #[arg(long)]
    ell: Option<u32>,
    /// State-space enumeration cap.
    #[arg(long)]
    cap: Option<u64>,
    /// Output path; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SaddleArgs {
    /// Circle size n.
    #[arg(long)]
    n: u32,
    /// Particle count k.
    #[arg(long)]
    k: u32,
    /// Degree ℓ of the symmetric function (1 ≤ ℓ ≤ k/2).
    #[arg(long)]
    ell: u32,
    /// Output JSON path; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Circle size n.
    #[arg(long)]
    n: u32,
    /// Particle count k.
    #[arg(long)]
    k: u32,
    /// Step law as comma-separated `step:weight` pairs.
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    /// Output JSON path; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    /// Family to build.
    #[arg(value_enum)]
    family: FamilyArg,
    #[command(flatten)]
    chain: ChainArgs,
    /// Output JSON path; prints to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => print_stdout(text),
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            write_json_report(path, value)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => print_stdout(&(serde_json::to_string_pretty(value)? + "\n")),
    }
}

fn parse_f64_list(text: &str, flag: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| Error::invalid(format!("{flag} entry {part:?}: {e}")))
        })
        .collect()
}

fn default_s_grid() -> Vec<f64> {
    (-8..=8).map(|i| i as f64 * 0.5).collect()
}

fn default_eps_grid() -> Vec<f64> {
    vec![0.5, 0.25, 0.1, 0.05]
}

fn spectrum_artifact(model: &ChainModel, use_cache: bool) -> Result<(String, bool)> {
    let cache_dir = if use_cache { cache::default_dir() } else { None };
    let key = cache::spectrum_key(model.n(), model.k(), model.p());
    if let Some(dir) = &cache_dir {
        if let Some(bytes) = cache::load(dir, "spectrum", &key) {
            if let Ok(text) = String::from_utf8(bytes) {
                if CsvTable::parse_and_verify(&text).is_ok() {
                    return Ok((text, true));
                }
            }
            eprintln!("cache entry failed verification; recomputing");
        }
    }
    let entries = full_spectrum(model)?;
    let text = spectrum_table(model, &entries)?.render()?;
    if let Some(dir) = &cache_dir {
        cache::store(dir, "spectrum", &key, text.as_bytes())?;
    }
    Ok((text, false))
}

fn write_sidecar(csv_path: &Path, artifact: &str) -> Result<()> {
    let header = artifact
        .lines()
        .next()
        .and_then(|line| line.strip_prefix("# "))
        .ok_or_else(|| Error::invalid("artifact is missing its header line"))?;
    let mut meta: serde_json::Value = serde_json::from_str(header)?;
    if let Some(object) = meta.as_object_mut() {
        object.insert(
            "csv".to_string(),
            json!(csv_path.file_name().and_then(|s| s.to_str())),
        );
    }
    let sidecar = csv_path.with_extension("json");
    write_atomic(
        &sidecar,
        (serde_json::to_string_pretty(&meta)? + "\n").as_bytes(),
    )
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Spectrum(args) => {
            let (model, _) = args.chain.build()?;
            let (artifact, from_cache) = spectrum_artifact(&model, !args.no_cache)?;
            if from_cache {
                eprintln!("spectrum loaded from cache");
            }
            match &args.out {
                Some(path) => {
                    write_atomic(path, artifact.as_bytes())?;
                    write_sidecar(path, &artifact)?;
                    eprintln!("wrote {}", path.display());
                    Ok(())
                }
                None => print_stdout(&artifact),
            }
        }
        Command::Gap(args) => {
            let (model, _) = args.chain.build()?;
            emit_json(&gap(&model)?, args.out.as_deref())
        }
        Command::Mix(args) => {
            let (model, _) = args.chain.build()?;
            let t_max = match args.tmax {
                Some(t) => t,
                None => cyclemix::mixing::default_horizon(&model)?,
            };
            let curve = match args.start {
                StartArg::Ground => exact_tv_curve(&model, t_max, &model.ground())?,
                StartArg::Worst => worst_case_tv_curve(&model, t_max)?.0,
            };
            curve.validate()?;
            let table = mixing_curve_table(&model, &curve)?;
            emit_text(&table.render()?, args.out.as_deref())
        }
        Command::Cutoff(args) => {
            let mut models = Vec::new();
            let mut family = String::new();
            for pair in args.instances.split(',') {
                let Some((n_text, k_text)) = pair.trim().split_once(':') else {
                    return Err(Error::invalid(format!(
                        "instance {pair:?} is not of the form n:k"
                    )));
                };
                let n: u32 = n_text
                    .parse()
                    .map_err(|e| Error::invalid(format!("instance size {n_text:?}: {e}")))?;
                let k: u32 = k_text
                    .parse()
                    .map_err(|e| Error::invalid(format!("particle count {k_text:?}: {e}")))?;
                let chain = ChainArgs {
                    n,
                    k,
                    p: args.p.clone(),
                    model: args.model,
                    alpha: args.alpha,
                    beta: args.beta,
                    a1: args.a1,
                    a2: args.a2,
                    cap: args.cap,
                };
                let (model, _) = chain.build()?;
                if family.is_empty() {
                    family = match args.model {
                        None | Some(FamilyArg::Constant) => {
                            format!("constant p={}", step_law_fingerprint(model.p()))
                        }
                        Some(FamilyArg::Asep) => format!(
                            "asep alpha={} beta={}",
                            args.alpha.unwrap_or_default(),
                            args.beta.unwrap_or_default()
                        ),
                        Some(FamilyArg::Dimer) => format!(
                            "dimer a1={} a2={}",
                            args.a1.unwrap_or_default(),
                            args.a2.unwrap_or_default()
                        ),
                    };
                }
                models.push(model);
            }
            if models.is_empty() {
                return Err(Error::invalid("no instances given"));
            }
            let s_grid = match &args.s_grid {
                Some(text) => parse_f64_list(text, "--s-grid")?,
                None => default_s_grid(),
            };
            let eps_grid = match &args.eps_grid {
                Some(text) => parse_f64_list(text, "--eps-grid")?,
                None => default_eps_grid(),
            };
            let sweep = cutoff_sweep(&models, &family, &s_grid, &eps_grid)?;
            let table = cutoff_sweep_table(&sweep)?;
            emit_text(&table.render()?, args.out.as_deref())
        }
        Command::Sample(args) => {
            let (model, _) = args.chain.build()?;
            let mut rng = stream_rng(args.seed, 0);
            let start = model.ground();
            let trajectory = simulate(&mut rng, &model, &start, args.steps)?;
            let rows = trajectory
                .iter()
                .enumerate()
                .map(|(t, config)| vec![t.to_string(), render_config(config)])
                .collect();
            let table = CsvTable::new(
                json!({
                    "kind": "trajectory",
                    "n": model.n(),
                    "k": model.k(),
                    "p": step_law_fingerprint(model.p()),
                    "seed": args.seed,
                    "start": render_config(&start),
                }),
                vec!["t".to_string(), "config".to_string()],
                rows,
            )?;
            emit_text(&table.render()?, args.out.as_deref())
        }
        Command::Classify(args) => {
            let cap = args.cap.unwrap_or(DEFAULT_STATE_CAP);
            match args.ell {
                Some(ell) => {
                    let report = estimates_check(args.n, args.k, ell, args.c1, args.c2, cap)?;
                    emit_json(&report, args.out.as_deref())
                }
                None => {
                    let records = classify_orbits(args.n, args.k, cap, args.c1, args.c2)?;
                    let table =
                        classification_table(args.n, args.k, (args.c1, args.c2), &records)?;
                    emit_text(&table.render()?, args.out.as_deref())
                }
            }
        }
        Command::Saddle(args) => {
            #[derive(Serialize)]
            struct SaddleCliReport {
                report: SaddleReport,
                closed_form_radius: f64,
                radius_gap: f64,
                gamma_from_radius: f64,
                gamma_exact: f64,
            }
            let report = saddle_approx(args.n, args.k, args.ell)?;
            let gamma_exact = 1.0
                - cyclemix::spectral::lambda_i1_closed_form(args.n, args.k, args.ell)?.norm();
            let combined = SaddleCliReport {
                closed_form_radius: closed_form_r(args.n, args.k, args.ell),
                radius_gap: report.data.closed_form_gap(),
                gamma_from_radius: gamma_from_saddle(args.n, args.k, args.ell)?,
                gamma_exact,
                report,
            };
            emit_json(&combined, args.out.as_deref())
        }
        Command::Audit(args) => {
            let law: StepDistribution = args.p.parse()?;
            CircleConfig::ground(args.n, args.k)?;
            let audit = audit_assumptions(&law, args.n, args.k);
            emit_json(&audit, args.out.as_deref())
        }
        Command::Model(args) => {
            let mut chain = args.chain;
            chain.model = Some(args.family);
            let (_, report) = chain.build()?;
            emit_json(
                &report.expect("preset build returns a report"),
                args.out.as_deref(),
            )
        }
    }
}
