use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use signrec::config::PipelineConfig;
use signrec::db::{load_db, save_db};
use signrec::error::{Error, Result};
use signrec::pipeline::{
    enroll, evaluate, labeled_sequences_from_dir, recognize_image, watch, FrameSequence,
};
use signrec::temporal::SimilaritySense;

#[derive(Parser)]
#[command(
    name = "signrec",
    about = "Hand-sign recognition over recorded PPM/PGM frame sequences",
    version
)]
struct Cli {
    /// Template database file.
    #[arg(long, global = true, default_value = "templates.signdb")]
    db: PathBuf,

    /// Config file of `key = value` lines; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the histogram similarity threshold.
    #[arg(long, global = true)]
    tau_hist: Option<f64>,

    /// Override the consecutive-similar-pairs trigger count.
    #[arg(long, global = true)]
    n_trigger: Option<u32>,

    /// Override which side of the threshold counts as similar.
    #[arg(long, global = true)]
    similarity_sense: Option<SimilaritySense>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a template database from a directory with one subdirectory per
    /// label.
    Enroll { train_dir: PathBuf },
    /// Classify a single image against the database.
    Recognize { image: PathBuf },
    /// Replay a frame directory through the held-pose detector and classify
    /// each trigger.
    Watch { frames_dir: PathBuf },
    /// Classify a labeled test directory and print per-symbol success rates.
    Eval {
        test_dir: PathBuf,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print database summary information.
    DbInfo,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(tau) = cli.tau_hist {
        cfg.tau_hist = tau;
    }
    if let Some(n) = cli.n_trigger {
        cfg.n_trigger = n;
    }
    if let Some(sense) = cli.similarity_sense {
        cfg.similarity_sense = sense;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Enroll { train_dir } => {
            let sets = labeled_sequences_from_dir(train_dir)?;
            let db = enroll(&sets, &cfg)?;
            save_db(&db, &cli.db)?;
            println!(
                "enrolled {} templates from {} labels -> {}",
                db.len(),
                sets.len(),
                cli.db.display()
            );
        }
        Command::Recognize { image } => {
            let db = load_db(&cli.db)?;
            let result = recognize_image(image, &db, &cfg)?;
            println!("recognized: {}", result.label);
            println!("score: {}", result.best_score);
        }
        Command::Watch { frames_dir } => {
            let db = load_db(&cli.db)?;
            let seq = FrameSequence::from_dir(frames_dir)?;
            let events = watch(&seq, &db, &cfg)?;
            for (index, result) in &events {
                println!("frame {index}: {} score {}", result.label, result.best_score);
            }
            // one entry per held pose: collapse consecutive repeats
            let mut signs: Vec<&str> = Vec::new();
            for (_, result) in &events {
                if signs.last() != Some(&result.label.as_str()) {
                    signs.push(&result.label);
                }
            }
            println!("signs: {}", signs.join(" "));
        }
        Command::Eval { test_dir, csv } => {
            let db = load_db(&cli.db)?;
            let sets = labeled_sequences_from_dir(test_dir)?;
            let report = evaluate(&sets, &db, &cfg)?;
            print!("{}", report.render_text());
            if let Some(csv_path) = csv {
                std::fs::write(csv_path, report.render_csv()).map_err(|source| Error::Io {
                    path: csv_path.clone(),
                    source,
                })?;
                println!("csv written: {}", csv_path.display());
            }
        }
        Command::DbInfo => {
            let db = load_db(&cli.db)?;
            println!("format: SIGNDB v1");
            println!("templates: {}", db.len());
            if let Some(t) = db.templates().first() {
                println!("vector length: {}", t.features.dim());
            }
            let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
            for t in db.templates() {
                *counts.entry(t.label.as_str()).or_default() += 1;
            }
            let summary: Vec<String> = counts
                .iter()
                .map(|(label, n)| format!("{label}({n})"))
                .collect();
            println!("labels: {}", summary.join(" "));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints help/version through the error path with status 0
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
