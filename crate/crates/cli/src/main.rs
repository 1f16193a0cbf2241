//! `nonrank`: rank influential nodes of a multilayer network.
//!
//! The pipeline reads one node roster observed under several relations
//! (edge lists, or pre-computed similarity CSVs), derives per-layer
//! similarities from shortest paths, folds them element-wise with the
//! orthogonal sum of evidence theory, and ranks nodes by their total fused
//! similarity to the rest of the network.

mod inputs;
mod output;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonrank::{
    all_pairs_distances, fuse_layers, fuse_layers_traced, FusedNetwork, FusionError,
    InfluenceRanking, ParseError, Scoring, SimilarityError, SimilarityMatrix,
};
use thiserror::Error;

use inputs::{load_edge_lists, load_matrices, LoadedInput};
use output::ReportContext;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{path}: file not found")]
    NotFound { path: String },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Listing { path: String, source: ParseError },
    #[error("{path}: matrix listings take labels from CSV headers; drop the `nodes:` directive")]
    RosterInMatrixListing { path: String },
    #[error("{path}: {source}")]
    Matrix {
        path: String,
        source: SimilarityError,
    },
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

/// Exit-code contract: 0 success, 2 input or validation error, 3 fusion
/// conflict, 4 internal invariant violation.
fn exit_code(err: &AppError) -> u8 {
    match err {
        AppError::Fusion(FusionError::TotalConflict { .. }) => 3,
        AppError::Internal(_) => 4,
        _ => 2,
    }
}

#[derive(Parser)]
#[command(
    name = "nonrank",
    version,
    about = "Rank influential nodes of a multilayer network by fusing \
             per-layer shortest-path similarities with evidence combination"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print per-layer all-pairs hop-distance matrices.
    Distances {
        /// Manifest naming the per-layer edge-list files.
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
        /// Write `distances_<layer>.csv` files here instead of stdout.
        #[arg(long, value_name = "DIR")]
        output: Option<PathBuf>,
    },
    /// Fuse per-layer similarities into one comprehensive scalar matrix.
    Fuse {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        options: PipelineArgs,
        /// Write `fused.csv` here instead of stdout.
        #[arg(long, value_name = "DIR")]
        output: Option<PathBuf>,
        /// Log every element's fold steps (stderr, or `transcript.txt`
        /// under --output).
        #[arg(long)]
        transcript: bool,
    },
    /// Rank nodes by total fused similarity, most influential first.
    Rank {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        options: PipelineArgs,
        /// Shape of the ranking document.
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write `ranking.csv` / `report.txt` here instead of stdout.
        #[arg(long, value_name = "DIR")]
        output: Option<PathBuf>,
        /// Log every element's fold steps (stderr, or `transcript.txt`
        /// under --output).
        #[arg(long)]
        transcript: bool,
    },
}

/// Exactly one input route: edge lists (similarity computed from shortest
/// paths) or pre-computed similarity matrices (graph stage skipped).
#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Manifest naming per-layer edge-list files.
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
    /// Listing naming per-layer similarity CSV files.
    #[arg(long, value_name = "FILE")]
    matrices: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct PipelineArgs {
    /// Similarity precision fed into mass-assignment construction.
    #[arg(long, value_enum, default_value = "full-precision")]
    mode: Mode,
    /// Scalar read of a fused mass assignment.
    #[arg(long, value_enum, default_value = "mass-y")]
    score: Score,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Use similarities exactly as computed or loaded.
    FullPrecision,
    /// Round similarities to two decimals first, matching hand-published
    /// matrices.
    PaperRounded,
}

impl Mode {
    fn label(self) -> &'static str {
        match self {
            Mode::FullPrecision => "full-precision",
            Mode::PaperRounded => "paper-rounded",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Score {
    /// Mass assigned to the similar singleton.
    MassY,
    /// Pignistic probability: frame mass split between the singletons.
    Pignistic,
}

impl Score {
    fn label(self) -> &'static str {
        match self {
            Score::MassY => "mass-y",
            Score::Pignistic => "pignistic",
        }
    }
}

impl From<Score> for Scoring {
    fn from(score: Score) -> Self {
        match score {
            Score::MassY => Scoring::SimilarMass,
            Score::Pignistic => Scoring::Pignistic,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    /// `rank,label,score` rows, scores at full precision.
    Csv,
    /// Human-oriented report with provenance header.
    StructuredText,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Distances { manifest, output } => cmd_distances(&manifest, output.as_deref()),
        Command::Fuse {
            input,
            options,
            output,
            transcript,
        } => cmd_fuse(&input, options, output.as_deref(), transcript),
        Command::Rank {
            input,
            options,
            format,
            output,
            transcript,
        } => cmd_rank(&input, options, format, output.as_deref(), transcript),
    }
}

fn cmd_distances(manifest: &Path, output: Option<&Path>) -> Result<(), AppError> {
    let loaded = load_edge_lists(manifest)?;
    let network = loaded
        .network
        .expect("edge-list route always builds the network");
    let mut blocks = String::new();
    for layer in network.layers() {
        let dist = all_pairs_distances(layer, network.node_count());
        let csv = output::distances_csv(&dist, network.labels());
        match output {
            Some(dir) => emit(Some(dir), &format!("distances_{}.csv", layer.name()), &csv)?,
            None => {
                blocks.push_str(&format!("# layer {}\n", layer.name()));
                blocks.push_str(&csv);
            }
        }
    }
    if output.is_none() {
        print!("{blocks}");
    }
    Ok(())
}

fn cmd_fuse(
    input: &InputArgs,
    options: PipelineArgs,
    output: Option<&Path>,
    transcript: bool,
) -> Result<(), AppError> {
    let loaded = load(input)?;
    let matrices = apply_mode(loaded.matrices, options.mode);
    let fused = fuse_and_log(&matrices, transcript, output)?;
    let csv = fused.scalar_matrix(options.score.into()).to_csv();
    emit(output, "fused.csv", &csv)
}

fn cmd_rank(
    input: &InputArgs,
    options: PipelineArgs,
    format: Format,
    output: Option<&Path>,
    transcript: bool,
) -> Result<(), AppError> {
    let loaded = load(input)?;
    let matrices = apply_mode(loaded.matrices, options.mode);
    let fused = fuse_and_log(&matrices, transcript, output)?;
    let scoring: Scoring = options.score.into();
    let ranking = fused.rank(scoring);
    verify_scores(&fused, &ranking, scoring)?;
    match format {
        Format::Csv => emit(output, "ranking.csv", &output::ranking_csv(&ranking)),
        Format::StructuredText => {
            let ctx = ReportContext {
                mode: options.mode.label(),
                score: options.score.label(),
                layer_names: &loaded.layer_names,
                digest: &loaded.digest,
            };
            emit(
                output,
                "report.txt",
                &output::ranking_report(&ranking, &ctx),
            )
        }
    }
}

fn load(input: &InputArgs) -> Result<LoadedInput, AppError> {
    match (&input.manifest, &input.matrices) {
        (Some(path), None) => load_edge_lists(path),
        (None, Some(path)) => load_matrices(path),
        _ => unreachable!("clap enforces exactly one input route"),
    }
}

fn apply_mode(matrices: Vec<SimilarityMatrix>, mode: Mode) -> Vec<SimilarityMatrix> {
    match mode {
        Mode::FullPrecision => matrices,
        Mode::PaperRounded => matrices
            .iter()
            .map(SimilarityMatrix::rounded_two_dp)
            .collect(),
    }
}

fn fuse_and_log(
    matrices: &[SimilarityMatrix],
    transcript: bool,
    output: Option<&Path>,
) -> Result<FusedNetwork, AppError> {
    if transcript {
        let (fused, traces) = fuse_layers_traced(matrices)?;
        let text = output::transcript(&traces);
        match output {
            Some(dir) => emit(Some(dir), "transcript.txt", &text)?,
            None => eprint!("{text}"),
        }
        Ok(fused)
    } else {
        Ok(fuse_layers(matrices)?)
    }
}

/// Cross-check the ranking against a direct row-sum recomputation; a drift
/// beyond tolerance means the two score paths disagree, which is a bug, not
/// bad input.
fn verify_scores(
    fused: &FusedNetwork,
    ranking: &InfluenceRanking,
    scoring: Scoring,
) -> Result<(), AppError> {
    for (idx, &label) in fused.labels().iter().enumerate() {
        let mut naive = 0.0;
        for j in 0..fused.node_count() {
            if j != idx {
                naive += fused.scalar(idx, j, scoring);
            }
        }
        let got = ranking
            .score(label)
            .ok_or_else(|| AppError::Internal(format!("node {label} missing from ranking")))?;
        if (got - naive).abs() > 1e-9 {
            return Err(AppError::Internal(format!(
                "score of node {label} drifted: ranked {got}, recomputed {naive}"
            )));
        }
    }
    Ok(())
}

fn emit(output: Option<&Path>, file_name: &str, content: &str) -> Result<(), AppError> {
    match output {
        Some(dir) => {
            let wrap = |source: io::Error, path: &Path| AppError::Io {
                path: path.display().to_string(),
                source,
            };
            fs::create_dir_all(dir).map_err(|e| wrap(e, dir))?;
            let path = dir.join(file_name);
            fs::write(&path, content).map_err(|e| wrap(e, &path))?;
        }
        None => print!("{content}"),
    }
    Ok(())
}
