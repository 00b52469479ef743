use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fmcw_bilat::config::{load_config, PipelineConfig};
use fmcw_bilat::pipeline::{self, CANDIDATES_FILE, DETECTIONS_FILE};
use fmcw_bilat::{io, selftest, Error};

/// Two-radar FMCW localization: simulate, detect, localize and track.
#[derive(Debug, Parser)]
#[command(name = "fmcw-bilat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// `key = value` configuration file; missing keys use defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `pipeline.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct Input {
    /// Scene file, one `id,x_m,y_m,vx_m_s,vy_m_s,rcs_dbsm` target per line.
    #[arg(long, conflicts_with = "frames")]
    scene: Option<PathBuf>,
    /// Frames file written by `simulate`.
    #[arg(long)]
    frames: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize beat-signal frames for both radars into <out>/frames.csv.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scene: PathBuf,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
    },
    /// Range FFT and CA-CFAR detection into <out>/detections.csv.
    Detect {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: Input,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
    },
    /// Bilaterate <out>/detections.csv into <out>/candidates.csv.
    Localize {
        #[command(flatten)]
        common: Common,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
    },
    /// Track <out>/candidates.csv into <out>/tracks.csv and <out>/map.svg.
    Track {
        #[command(flatten)]
        common: Common,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
        /// Also write tentative tracks.
        #[arg(long)]
        include_tentative: bool,
    },
    /// Run every stage and write all outputs into <out>.
    Pipeline {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: Input,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
        /// Also write tentative tracks.
        #[arg(long)]
        include_tentative: bool,
    },
    /// Run the built-in invariant checks.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Usage(String),
    Data(Error),
    Selftest,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Data(e)
        }
    }
}

fn config_of(common: &Common) -> Result<PipelineConfig, Failure> {
    let mut config = match &common.config {
        Some(path) => load_config(path).map_err(|e| Failure::Usage(e.to_string()))?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn input_frames(config: &PipelineConfig, input: &Input) -> Result<Vec<fmcw_bilat::Frame>, Failure> {
    if input.scene.is_none() && input.frames.is_none() {
        return Err(Failure::Usage("one of --scene or --frames is required".into()));
    }
    Ok(pipeline::load_frames(
        config,
        input.scene.as_deref(),
        input.frames.as_deref(),
    )?)
}

fn report(path: &Path) {
    eprintln!("wrote {}", path.display());
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Simulate { common, scene, out } => {
            let config = config_of(&common)?;
            let targets = io::read_scene(&scene)?;
            let frames = pipeline::simulate(&config, &targets)?;
            report(&pipeline::write_frames_file(&out, &frames)?);
        }
        Command::Detect { common, input, out } => {
            let config = config_of(&common)?;
            let frames = input_frames(&config, &input)?;
            let (_, detections) = pipeline::detect_frames(&config, &frames)?;
            report(&pipeline::write_detections_file(&out, &detections)?);
        }
        Command::Localize { common, out } => {
            let config = config_of(&common)?;
            let detections = io::read_detections(out.join(DETECTIONS_FILE))?;
            let localized = pipeline::localize(&config, &detections);
            eprintln!(
                "{} candidates, {} pairs gated, {} infeasible",
                localized.candidates.len(),
                localized.gated_pairs,
                localized.infeasible_pairs
            );
            report(&pipeline::write_candidates_file(&out, &localized.candidates)?);
        }
        Command::Track {
            common,
            out,
            include_tentative,
        } => {
            let config = config_of(&common)?;
            let candidates = io::read_candidates(out.join(CANDIDATES_FILE))?;
            let rows = pipeline::track(&config, &candidates, config.frames as u64)?;
            report(&pipeline::write_tracks_file(&out, &rows, include_tentative)?);
            report(&pipeline::write_map_file(&out, &config, &rows)?);
        }
        Command::Pipeline {
            common,
            input,
            out,
            include_tentative,
        } => {
            let config = config_of(&common)?;
            let frames = input_frames(&config, &input)?;
            let output = pipeline::run(&config, &frames)?;
            pipeline::write_outputs(&out, &config, &output, include_tentative)?;
            eprintln!(
                "{} frames, {} detections, {} candidates ({} pairs gated), confirmed tracks {:?}",
                pipeline::frame_span(&frames),
                output.detections.len(),
                output.localized.candidates.len(),
                output.localized.gated_pairs,
                output.confirmed_track_ids()
            );
            eprintln!("wrote outputs to {}", out.display());
        }
        Command::Selftest { common } => {
            let config = config_of(&common)?;
            let result = selftest::run(&config);
            for check in &result.checks {
                println!("{check}");
            }
            if !result.passed() {
                return Err(Failure::Selftest);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Selftest) => ExitCode::from(3),
    }
}
