//! End-to-end train / evaluate / predict flows shared by the CLI and tests.

use std::io::Read;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::artifact::{corpus_fingerprint, ArtifactError, FittedPipeline, ModelArtifact, Provenance};
use crate::classifiers::{ClassifierError, ClassifierType, Model, Prediction, TrainConfig};
use crate::corpus::{read_records, split_corpus, CorpusError, CorpusFormat, LabeledCorpus, SplitConfig};
use crate::evaluation::{confusion, report, EvalError, EvaluationReport};
use crate::features::{FeatureError, FeatureType, Vectorizer};
use crate::preprocess::{FilterRules, TextCleaner};
use crate::synth::SynthError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Artifact(#[from] ArtifactError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl PipelineError {
    /// 2 for bad input, 3 for failures while fitting.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Feature(_) | PipelineError::Classifier(_) => 3,
            _ => 2,
        }
    }
}

/// Everything `train` needs besides the corpus file itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: Option<CorpusFormat>,
    pub split: SplitConfig,
    pub features: FeatureType,
    pub classifier: ClassifierType,
    pub train: TrainConfig,
    pub filter: FilterRules,
    pub model_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
    pub keep_dual_vars: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            format: None,
            split: SplitConfig::default(),
            features: FeatureType::Tfidf,
            classifier: ClassifierType::Svm,
            train: TrainConfig::default(),
            filter: FilterRules::default(),
            model_out: None,
            report_out: None,
            keep_dual_vars: false,
        }
    }
}

impl RunConfig {
    pub fn corpus_format(&self) -> CorpusFormat {
        self.format.unwrap_or_else(|| CorpusFormat::from_path(&self.input))
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub artifact: ModelArtifact,
    pub pipeline: FittedPipeline,
    pub report: EvaluationReport,
    pub train: LabeledCorpus,
    pub test: LabeledCorpus,
}

/// Split, fit features on the training half, train, evaluate on the test half.
pub fn train_on_corpus(
    corpus: &LabeledCorpus,
    config: &RunConfig,
    timestamp: String,
) -> Result<TrainOutcome, PipelineError> {
    let (train, test) = split_corpus(corpus, &config.split)?;
    let cleaner = TextCleaner::new(config.filter);

    let train_tokens: Vec<_> = train.iter().map(|d| cleaner.preprocess(&d.text)).collect();
    let vectorizer = Vectorizer::fit(&train_tokens, config.features)?;
    let matrix = vectorizer.transform_all(&train_tokens, &train.labels());
    let model = Model::train(config.classifier, &matrix, &config.train)?;

    let pipeline = FittedPipeline {
        cleaner,
        vectorizer,
        model,
    };
    let report = evaluate_corpus(&pipeline, &test)?;

    let mut artifact = ModelArtifact::new(
        &pipeline,
        config.train,
        Provenance {
            seed: config.split.seed,
            test_fraction: config.split.test_fraction,
            corpus_fingerprint: corpus_fingerprint(corpus),
            timestamp,
        },
    );
    if !config.keep_dual_vars {
        artifact = artifact.without_dual_vars();
    }
    Ok(TrainOutcome {
        artifact,
        pipeline,
        report,
        train,
        test,
    })
}

pub fn now_timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn evaluate_corpus(pipeline: &FittedPipeline, corpus: &LabeledCorpus) -> Result<EvaluationReport, PipelineError> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyInput.into());
    }
    let texts: Vec<&str> = corpus.iter().map(|d| d.text.as_str()).collect();
    let predicted: Vec<_> = pipeline.predict_texts(&texts)?.into_iter().map(|p| p.label).collect();
    Ok(report(&confusion(&corpus.labels(), &predicted)?)?)
}

/// One line of `predict` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledOutput {
    pub id: String,
    pub label: crate::corpus::Label,
    pub score: f64,
}

impl LabeledOutput {
    pub fn new(id: impl Into<String>, p: Prediction) -> Self {
        Self {
            id: id.into(),
            label: p.label,
            score: p.score,
        }
    }
}

/// Outcome for one input record: a prediction, or a message for the line
/// that could not be used.
pub type RecordResult = Result<LabeledOutput, (usize, String)>;

/// Predicts every record of an unlabeled (or labeled) input stream. Bad
/// records are reported with their line number and skipped.
pub fn predict_records<R: Read>(pipeline: &FittedPipeline, reader: R, format: CorpusFormat) -> Vec<RecordResult> {
    read_records(reader, format)
        .map(|item| {
            let (line, index, record) = item.map_err(|e| match e {
                CorpusError::MalformedRecord { line, reason } => (line, reason),
                other => (0, other.to_string()),
            })?;
            let text = record.text.ok_or((line, "missing `text`".to_string()))?;
            let id = record.id.unwrap_or_else(|| index.to_string());
            pipeline
                .predict_text(&text)
                .map(|p| LabeledOutput::new(id, p))
                .map_err(|e| (line, e.to_string()))
        })
        .collect()
}
