use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use socmine::binning::GapPolicy;
use socmine::ingest::{load_corpus, to_json_lines, write_atomic};
use socmine::pipeline::{
    self, load_binned, load_classified, load_classifier, load_stopwords, PipelineError, RunConfig,
    BINNED_FILE, CLASSIFIED_FILE, DEFAULT_FEATURES, DEFAULT_K,
};
use socmine::synth;

#[derive(Parser)]
#[command(name = "socmine", version, about = "Classify, bin and report on profile records")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ClassifierArgs {
    /// Pre-classified sample corpus (JSON lines: id, label, text)
    #[arg(long)]
    corpus: PathBuf,
    /// Stopword file, one word per line ('#' comments)
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Number of highest-TF terms kept as features
    #[arg(long, default_value_t = DEFAULT_FEATURES)]
    features: usize,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage end to end
    Run {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        classifier: ClassifierArgs,
        #[arg(long = "ref-date")]
        ref_date: NaiveDate,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "gap-policy", default_value = "five_is_low")]
        gap_policy: GapPolicy,
        #[arg(long = "run-id", default_value = "run")]
        run_id: String,
    },
    /// Validate raw records and persist the accepted corpus
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Reject birthdays after this date
        #[arg(long = "ref-date")]
        ref_date: Option<NaiveDate>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify the about_me text of an ingested corpus
    Classify {
        /// corpus.jsonl written by `ingest`
        #[arg(long)]
        profiles: PathBuf,
        #[command(flatten)]
        classifier: ClassifierArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive age ranges and numeric classes for classified profiles
    Bin {
        /// classified.jsonl written by `classify`
        #[arg(long)]
        classified: PathBuf,
        #[arg(long = "ref-date")]
        ref_date: NaiveDate,
        #[arg(long = "gap-policy", default_value = "five_is_low")]
        gap_policy: GapPolicy,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the ARFF dataset for binned profiles
    Arff {
        /// binned.jsonl written by `bin`
        #[arg(long)]
        binned: PathBuf,
        /// Output .arff file
        #[arg(long)]
        out: PathBuf,
    },
    /// Write distribution tables, charts and a manifest
    Report {
        #[arg(long)]
        binned: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "run-id", default_value = "run")]
        run_id: String,
    },
    /// Generate a seeded synthetic sample corpus
    SynthCorpus {
        #[arg(long, default_value_t = 2012)]
        seed: u64,
        #[arg(long = "per-class", default_value_t = 60)]
        per_class: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate seeded synthetic raw profile records
    SynthProfiles {
        #[arg(long, default_value_t = 1753)]
        seed: u64,
        #[arg(long, default_value_t = 1340)]
        count: usize,
        #[arg(long = "ref-date")]
        ref_date: NaiveDate,
        #[arg(long)]
        out: PathBuf,
    },
}

fn classifier_from(args: &ClassifierArgs) -> Result<socmine::knn::Classifier, PipelineError> {
    let stops = load_stopwords(args.stopwords.as_deref())?;
    load_classifier(&args.corpus, stops, args.features, args.k)
}

fn write_lines<T: serde::Serialize>(path: &Path, records: &[T]) -> Result<(), PipelineError> {
    Ok(write_atomic(path, to_json_lines(records).as_bytes())?)
}

fn execute(cmd: Command) -> Result<(), PipelineError> {
    match cmd {
        Command::Run {
            input,
            classifier,
            ref_date,
            out,
            gap_policy,
            run_id,
        } => {
            let config = RunConfig {
                input_path: input,
                corpus_path: classifier.corpus,
                stopword_path: classifier.stopwords,
                n_features: classifier.features,
                k: classifier.k,
                reference_date: ref_date,
                output_dir: out,
                gap_policy,
                run_id,
            };
            let s = pipeline::run_pipeline(&config)?;
            println!(
                "ingested={} accepted={} rejected={} classified={} unclassifiable={} artifacts={}",
                s.ingested,
                s.accepted,
                s.rejected,
                s.classified,
                s.unclassifiable,
                s.artifacts.len()
            );
        }
        Command::Ingest { input, ref_date, out } => {
            let o = pipeline::stage_ingest(&input, ref_date, &out)?;
            println!(
                "ingested={} accepted={} rejected={}",
                o.ingested, o.report.accepted_count, o.report.rejected_count
            );
        }
        Command::Classify {
            profiles,
            classifier,
            out,
        } => {
            let classifier = classifier_from(&classifier)?;
            let profiles = load_corpus(&profiles)?;
            let classified = pipeline::stage_classify(profiles, &classifier, &out)?;
            println!("classified={} -> {}", classified.len(), out.join(CLASSIFIED_FILE).display());
        }
        Command::Bin {
            classified,
            ref_date,
            gap_policy,
            out,
        } => {
            let binned = pipeline::stage_bin(load_classified(&classified)?, ref_date, gap_policy, &out)?;
            println!("binned={} -> {}", binned.len(), out.join(BINNED_FILE).display());
        }
        Command::Arff { binned, out } => {
            pipeline::stage_arff(&load_binned(&binned)?, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Report { binned, out, run_id } => {
            let manifest = pipeline::stage_report(&load_binned(&binned)?, &out, &run_id)?;
            println!(
                "wrote {} artifacts under {}",
                manifest.artifacts.len(),
                pipeline::report_dir(&out, &run_id).display()
            );
        }
        Command::SynthCorpus { seed, per_class, out } => {
            write_lines(&out, &synth::sample_corpus(seed, per_class))?;
        }
        Command::SynthProfiles {
            seed,
            count,
            ref_date,
            out,
        } => {
            write_lines(&out, &synth::profiles(seed, count, ref_date))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let PipelineError::Config(_) = e {
                return ExitCode::from(2);
            }
            ExitCode::FAILURE
        }
    }
}

