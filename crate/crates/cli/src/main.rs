//! `fakenews` command-line tool: train, evaluate and apply fake-news
//! classifiers, and generate synthetic corpora.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fakenews_core::artifact::{load_model, save_model};
use fakenews_core::corpus::{corpus_stats, load_corpus, CorpusFormat};
use fakenews_core::evaluation::{render_report, EvaluationReport, ReportFormat};
use fakenews_core::pipeline::{
    evaluate_corpus, now_timestamp, predict_records, train_on_corpus, LabeledOutput, PipelineError, RunConfig,
};
use fakenews_core::synth::{generate, SynthConfig, DEFAULT_FAKE_FRACTION};
use fakenews_core::{ClassifierType, FeatureType};

#[derive(Parser)]
#[command(name = "fakenews", version, about = "Bangla fake-news detection with naive Bayes and linear SVM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a labeled corpus, train a classifier and evaluate it on the held-out part.
    Train(TrainArgs),
    /// Label raw texts with a trained model (one JSON line per document).
    Predict(PredictArgs),
    /// Evaluate a trained model on a labeled corpus.
    Evaluate(EvaluateArgs),
    /// Write a seeded synthetic labeled corpus as JSONL.
    GenSynth(GenSynthArgs),
    /// Print per-class counts and percentages of a labeled corpus.
    Stats(StatsArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// TOML run configuration; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// jsonl or csv (default: from the file extension)
    #[arg(long)]
    format: Option<CorpusFormat>,
    /// mnb or svm
    #[arg(long)]
    classifier: Option<ClassifierType>,
    /// count or tfidf
    #[arg(long)]
    features: Option<FeatureType>,
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Seeds both the split and the SVM coordinate order.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "c")]
    c_param: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_epochs: Option<usize>,
    /// Where to write the model artifact (default: model.json).
    #[arg(long)]
    model_out: Option<PathBuf>,
    #[arg(long)]
    report_out: Option<PathBuf>,
    /// Also write the held-out split as JSONL.
    #[arg(long)]
    test_out: Option<PathBuf>,
    /// Keep SVM dual variables in the artifact.
    #[arg(long)]
    keep_dual_vars: bool,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    text: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    format: Option<CorpusFormat>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    format: Option<CorpusFormat>,
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct GenSynthArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_FAKE_FRACTION)]
    fake_fraction: f64,
    #[arg(long, default_value_t = 2000)]
    vocab: usize,
    #[arg(long, default_value_t = 0.8)]
    separation: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    format: Option<CorpusFormat>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => train(args),
        Command::Predict(args) => predict(args),
        Command::Evaluate(args) => evaluate(args),
        Command::GenSynth(args) => gen_synth(args),
        Command::Stats(args) => stats(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn format_for(path: &Path, explicit: Option<CorpusFormat>) -> CorpusFormat {
    explicit.unwrap_or_else(|| CorpusFormat::from_path(path))
}

fn run_config(args: &TrainArgs) -> Result<RunConfig, PipelineError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let src = fs::read_to_string(path)?;
            toml::from_str::<RunConfig>(&src).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(input) = &args.input {
        cfg.input = input.clone();
    }
    if cfg.input.as_os_str().is_empty() {
        return Err(PipelineError::Config("no input corpus given (--input)".into()));
    }
    if args.format.is_some() {
        cfg.format = args.format;
    }
    if let Some(c) = args.classifier {
        cfg.classifier = c;
    }
    if let Some(f) = args.features {
        cfg.features = f;
    }
    if let Some(f) = args.test_fraction {
        cfg.split.test_fraction = f;
    }
    if let Some(seed) = args.seed {
        cfg.split.seed = seed;
        cfg.train.seed = seed;
    }
    if let Some(a) = args.alpha {
        cfg.train.alpha = a;
    }
    if let Some(c) = args.c_param {
        cfg.train.c_param = c;
    }
    if let Some(t) = args.tol {
        cfg.train.tol = t;
    }
    if let Some(m) = args.max_epochs {
        cfg.train.max_epochs = m;
    }
    if args.model_out.is_some() {
        cfg.model_out = args.model_out.clone();
    }
    if args.report_out.is_some() {
        cfg.report_out = args.report_out.clone();
    }
    cfg.keep_dual_vars |= args.keep_dual_vars;
    Ok(cfg)
}

fn write_report(report: &EvaluationReport, path: Option<&Path>) -> Result<(), PipelineError> {
    print!("{}", render_report(report, ReportFormat::TextTable));
    if let Some(path) = path {
        let mut json = render_report(report, ReportFormat::Json);
        json.push('\n');
        fs::write(path, json)?;
    }
    Ok(())
}

fn train(args: TrainArgs) -> Result<(), PipelineError> {
    let cfg = run_config(&args)?;
    let corpus = load_corpus(&cfg.input, cfg.corpus_format())?;
    let outcome = train_on_corpus(&corpus, &cfg, now_timestamp())?;

    let model_out = cfg.model_out.clone().unwrap_or_else(|| PathBuf::from("model.json"));
    save_model(&model_out, &outcome.artifact)?;
    if let Some(path) = &args.test_out {
        outcome.test.write_jsonl(BufWriter::new(File::create(path)?))?;
    }
    eprintln!(
        "trained {} on {} features ({} train / {} test documents, {} terms); model written to {}",
        cfg.classifier,
        cfg.features,
        outcome.train.len(),
        outcome.test.len(),
        outcome.artifact.pipeline.vocabulary.len(),
        model_out.display()
    );
    write_report(&outcome.report, cfg.report_out.as_deref())
}

fn predict(args: PredictArgs) -> Result<(), PipelineError> {
    let pipeline = load_model(&args.model)?.to_pipeline();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut emit = |line: &LabeledOutput| -> io::Result<()> {
        serde_json::to_writer(&mut out, line)?;
        out.write_all(b"\n")
    };
    if let Some(text) = &args.text {
        let p = pipeline.predict_text(text)?;
        emit(&LabeledOutput::new("text", p))?;
        return Ok(());
    }
    let path = args.input.as_deref().expect("clap enforces --text or --input");
    let file = File::open(path)?;
    for result in predict_records(&pipeline, file, format_for(path, args.format)) {
        match result {
            Ok(line) => emit(&line)?,
            Err((line, msg)) => eprintln!("line {line}: {msg}"),
        }
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), PipelineError> {
    let pipeline = load_model(&args.model)?.to_pipeline();
    let corpus = load_corpus(&args.input, format_for(&args.input, args.format))?;
    let report = evaluate_corpus(&pipeline, &corpus)?;
    write_report(&report, args.report_out.as_deref())
}

fn gen_synth(args: GenSynthArgs) -> Result<(), PipelineError> {
    let corpus = generate(&SynthConfig {
        n_docs: args.n,
        fake_fraction: args.fake_fraction,
        vocab_size: args.vocab,
        separation: args.separation,
        seed: args.seed,
    })?;
    corpus.write_jsonl(BufWriter::new(File::create(&args.out)?))?;
    eprintln!("{}", corpus_stats(&corpus));
    Ok(())
}

fn stats(args: StatsArgs) -> Result<(), PipelineError> {
    let corpus = load_corpus(&args.input, format_for(&args.input, args.format))?;
    println!("{}", corpus_stats(&corpus));
    Ok(())
}
