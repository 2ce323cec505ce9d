//! The `dyadic-pose` command line: scene generation, pixel encoding,
//! solving, verification, and the perturbation stability experiment.
//!
//! Exit codes: 0 on success, 1 when a solver reports a failure status (the
//! status name goes to stderr), 2 on malformed input.

use crate::files::{
    parse_candidates, parse_correspondences, write_correspondences, CandidateFile, FileError,
    TruthFile,
};
use crate::perturb::{perturb_correspondences, PerturbationSpec};
use crate::scene::{gen_scene, Scene, SceneParams};
use clap::{Args, Parser, Subcommand};
use dyadic_core::encoding::{encode_pixel, PixelGrid};
use dyadic_core::pose::{
    solve_5pt, solve_7pt, solve_8pt, Correspondence, EssentialCandidate, PoseError, SolveMethod,
};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "dyadic-pose",
    about = "Exact 2-adic relative pose: encode pixels, solve 8/7/5-point problems, verify candidates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an exact synthetic scene with its ground truth
    Generate(GenerateArgs),
    /// Encode "x y" pixel lines as 2-adic digit strings
    Encode(EncodeArgs),
    /// Solve a relative pose problem from a correspondence file
    Solve(SolveArgs),
    /// Re-verify a candidate file against correspondences
    Verify(VerifyArgs),
    /// Run the perturbation stability experiment end to end
    Stability(StabilityArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// RNG seed; the same seed reproduces byte-identical files
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of correspondences to generate
    #[arg(long, default_value_t = 8)]
    points: usize,
    /// Coordinate box half-width for 3D points
    #[arg(long, default_value_t = 64)]
    bound: i64,
    /// Correspondence output (line-delimited JSON)
    #[arg(long, default_value = "corrs.jsonl")]
    corrs: PathBuf,
    /// Ground-truth output (JSON)
    #[arg(long, default_value = "truth.json")]
    truth: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    /// Pixel grid as WIDTHxHEIGHT, e.g. 640x480
    #[arg(long)]
    grid: String,
    /// Input file of "x y" lines; stdin when omitted
    input: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Which minimal solver to run
    #[arg(long)]
    method: SolveMethod,
    /// Working precision: candidates are residues modulo 2^N
    #[arg(long, env = "DYADIC_POSE_PRECISION", default_value_t = 32)]
    precision: u32,
    /// Also write the candidates as JSON
    #[arg(long)]
    out: Option<PathBuf>,
    /// Correspondence file (line-delimited JSON)
    corrs: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, env = "DYADIC_POSE_PRECISION", default_value_t = 32)]
    precision: u32,
    /// Candidate file produced by `solve --out`
    candidates: PathBuf,
    /// Correspondence file the candidates were solved from
    corrs: PathBuf,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long, env = "DYADIC_POSE_PRECISION", default_value_t = 16)]
    precision: u32,
    /// Number of scenes per solver
    #[arg(long, default_value_t = 20)]
    scenes: u64,
    /// Base RNG seed for scene generation
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

enum CliError {
    /// Malformed input or I/O problem: exit code 2.
    Input(String),
    /// A solver failure status: exit code 1, status name on stderr.
    Solver(String),
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PoseError> for CliError {
    fn from(e: PoseError) -> Self {
        CliError::Solver(format!("{}: {e}", e.status_name()))
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate(&args),
        Command::Encode(args) => encode(&args),
        Command::Solve(args) => solve(&args),
        Command::Verify(args) => verify(&args),
        Command::Stability(args) => stability(&args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Solver(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn generate(args: &GenerateArgs) -> Result<ExitCode, CliError> {
    let params = SceneParams {
        points: args.points,
        coordinate_bound: args.bound,
    };
    let scene = gen_scene(args.seed, &params);
    write_file(&args.corrs, &write_correspondences(&scene.correspondences)?)?;
    let truth = serde_json::to_string_pretty(&TruthFile::from(&scene)).expect("serializable");
    write_file(&args.truth, &format!("{truth}\n"))?;
    println!(
        "scene seed {}: {} correspondences -> {}, ground truth -> {}",
        args.seed,
        scene.correspondences.len(),
        args.corrs.display(),
        args.truth.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn encode(args: &EncodeArgs) -> Result<ExitCode, CliError> {
    let (w, h) = args
        .grid
        .split_once('x')
        .and_then(|(a, b)| Some((a.parse::<u64>().ok()?, b.parse::<u64>().ok()?)))
        .ok_or_else(|| CliError::Input(format!("grid {:?} is not WIDTHxHEIGHT", args.grid)))?;
    let grid = PixelGrid::new(w, h).map_err(|e| CliError::Input(e.to_string()))?;

    let text = match &args.input {
        Some(path) => read_to_string(path)?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Input(e.to_string()))?;
            buf
        }
    };
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let coords: Option<(u64, u64)> = (|| {
            let x = parts.next()?.parse().ok()?;
            let y = parts.next()?.parse().ok()?;
            parts.next().is_none().then_some((x, y))
        })();
        let Some((x, y)) = coords else {
            return Err(CliError::Input(format!(
                "line {}: expected \"x y\", got {line:?}",
                idx + 1
            )));
        };
        let point = encode_pixel(x, y, &grid).map_err(|e| CliError::Input(e.to_string()))?;
        println!("{} {}", point.x, point.y);
    }
    Ok(ExitCode::SUCCESS)
}

fn load_correspondences(
    path: &Path,
    method: SolveMethod,
    precision: u32,
) -> Result<Vec<Correspondence>, CliError> {
    let raw = parse_correspondences(&read_to_string(path)?)?;
    let needed = method.point_count();
    if raw.len() < needed {
        return Err(CliError::Input(format!(
            "{} needs {needed} correspondences, file has {}",
            method,
            raw.len()
        )));
    }
    if raw.len() > needed {
        eprintln!(
            "note: using the first {needed} of {} correspondences",
            raw.len()
        );
    }
    raw[..needed]
        .iter()
        .map(|(u, v)| Correspondence::from_integers(u, v, precision).map_err(CliError::from))
        .collect()
}

fn run_solver(
    method: SolveMethod,
    corrs: &[Correspondence],
    precision: u32,
) -> Result<Vec<EssentialCandidate>, PoseError> {
    match method {
        SolveMethod::EightPoint => solve_8pt(corrs, precision).map(|c| vec![c]),
        SolveMethod::SevenPoint => solve_7pt(corrs, precision),
        SolveMethod::FivePoint => solve_5pt(corrs, precision),
    }
}

fn solve(args: &SolveArgs) -> Result<ExitCode, CliError> {
    let corrs = load_correspondences(&args.corrs, args.method, args.precision)?;
    let candidates = run_solver(args.method, &corrs, args.precision)?;

    println!("method: {}", args.method);
    println!("precision: {}", args.precision);
    println!("candidates: {}", candidates.len());
    for (k, cand) in candidates.iter().enumerate() {
        println!("candidate {}:", k + 1);
        for r in 0..3 {
            let row: Vec<String> = (0..3)
                .map(|c| cand.matrix.get(r, c).residue().to_string())
                .collect();
            println!("  [{}]", row.join(", "));
        }
        for (i, entry) in cand.matrix.entries().iter().enumerate() {
            println!(
                "  e{}{} = {}",
                i / 3 + 1,
                i % 3 + 1,
                entry.to_digit_string()
            );
        }
        if let Some(minor) = cand.witness_minor {
            println!("  rank-2 witness minor: {minor}");
        }
        println!("  iterations: {}", cand.iterations);
    }

    if let Some(out) = &args.out {
        let file = CandidateFile::from_candidates(args.method, args.precision, &candidates);
        write_file(out, &format!("{}\n", file.to_json()))?;
        println!("wrote {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let file = parse_candidates(&read_to_string(&args.candidates)?)?;
    let corrs = parse_correspondences(&read_to_string(&args.corrs)?)?;
    let n = args.precision.min(file.precision);

    let mut all_ok = true;
    for (k, record) in file.candidates.iter().enumerate() {
        let matrix = record.matrix(file.precision)?.truncate(n);
        let det_ok = num_traits::Zero::is_zero(matrix.det().residue());
        // valuation of every epipolar residual must reach the precision
        let mut worst: Option<u32> = None;
        for (u, v) in &corrs {
            let c = Correspondence::from_integers(u, v, n).map_err(CliError::from)?;
            let residual = c.epipolar_residual(&matrix);
            let val = residual.valuation();
            if !val.at_precision_floor {
                worst = Some(worst.map_or(val.exponent, |w| w.min(val.exponent)));
            }
        }
        match worst {
            None => println!(
                "candidate {}: all residual valuations >= {n}, det {} zero",
                k + 1,
                if det_ok { "is" } else { "is NOT" }
            ),
            Some(v) => {
                all_ok = false;
                println!(
                    "candidate {}: residual valuation {v} below precision {n}",
                    k + 1
                );
            }
        }
        if !det_ok {
            all_ok = false;
        }
    }
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Outcome of one solver run, comparable across the perturbation.
#[derive(PartialEq, Eq)]
enum Outcome {
    Candidates(Vec<EssentialCandidate>),
    Status(String),
}

fn outcome(method: SolveMethod, corrs: &[Correspondence], precision: u32) -> Outcome {
    match run_solver(method, corrs, precision) {
        Ok(c) => Outcome::Candidates(c),
        Err(e) => Outcome::Status(e.status_name().to_string()),
    }
}

/// Smallest digit position where two candidate sets differ, if any.
fn first_divergent_digit(a: &Outcome, b: &Outcome, precision: u32) -> Option<u32> {
    match (a, b) {
        (Outcome::Status(s), Outcome::Status(t)) => (s != t).then_some(0),
        (Outcome::Candidates(ca), Outcome::Candidates(cb)) => {
            if ca.len() != cb.len() {
                return Some(0);
            }
            let mut worst: Option<u32> = None;
            for (x, y) in ca.iter().zip(cb) {
                for (ex, ey) in x.matrix.entries().iter().zip(y.matrix.entries()) {
                    let diff = ex.sub(ey);
                    let val = diff.valuation();
                    if !val.at_precision_floor {
                        worst = Some(worst.map_or(val.exponent, |w| w.min(val.exponent)));
                    }
                }
            }
            let _ = precision;
            worst
        }
        _ => Some(0),
    }
}

fn stability(args: &StabilityArgs) -> Result<ExitCode, CliError> {
    let n = args.precision;
    let mut divergence: Option<u32> = None;
    let mut solved = [0usize; 3];
    let methods = [
        SolveMethod::EightPoint,
        SolveMethod::SevenPoint,
        SolveMethod::FivePoint,
    ];

    for idx in 0..args.scenes {
        let scene: Scene = gen_scene(args.seed.wrapping_add(idx), &SceneParams::default());
        let perturbed = perturb_correspondences(
            &scene.correspondences,
            &PerturbationSpec::new(n, args.seed.wrapping_add(idx) ^ 0x9e37_79b9),
        );
        for (m, method) in methods.iter().enumerate() {
            let count = method.point_count();
            let base: Vec<Correspondence> = scene.correspondences[..count]
                .iter()
                .map(|(u, v)| Correspondence::from_integers(u, v, n))
                .collect::<Result<_, _>>()?;
            let noisy: Vec<Correspondence> = perturbed[..count]
                .iter()
                .map(|(u, v)| Correspondence::from_integers(u, v, n))
                .collect::<Result<_, _>>()?;

            let before = outcome(*method, &base, n);
            let after = outcome(*method, &noisy, n);
            if matches!(before, Outcome::Candidates(ref c) if !c.is_empty()) {
                solved[m] += 1;
            }
            if let Some(d) = first_divergent_digit(&before, &after, n) {
                divergence = Some(divergence.map_or(d, |w| w.min(d)));
            }
        }
    }

    for (m, method) in methods.iter().enumerate() {
        println!(
            "{}: {} of {} scenes produced candidates",
            method, solved[m], args.scenes
        );
    }
    match divergence {
        None => {
            println!("first divergent digit: >= {n}");
            Ok(ExitCode::SUCCESS)
        }
        Some(d) => {
            println!("first divergent digit: {d}");
            Ok(ExitCode::from(1))
        }
    }
}
