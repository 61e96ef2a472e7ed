//! Multinomial naive Bayes and linear SVM classifiers over sparse document
//! vectors.

mod mnb;
mod svm;

pub use mnb::{predict_mnb, train_mnb, MnbModel};
pub use svm::{predict_svm, train_svm, SvmModel};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;
use crate::features::{DocumentTermMatrix, FeatureError, SparseVector};

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("training data is empty")]
    EmptyTrainingSet,
    #[error("training data contains only `{0}` documents; both classes are required")]
    SingleClassCorpus(Label),
    #[error("smoothing alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("solver made no progress: objective became non-finite (check feature scaling)")]
    NoProgress,
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: Box<ClassifierError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Additive smoothing for naive Bayes.
    pub alpha: f64,
    /// SVM regularization constant.
    pub c_param: f64,
    /// SVM stop threshold on the largest projected-gradient violation in an epoch.
    pub tol: f64,
    pub max_epochs: usize,
    /// Seeds the SVM coordinate permutation.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            c_param: 1.0,
            tol: 1e-4,
            max_epochs: 1000,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierType {
    Mnb,
    Svm,
}

impl std::str::FromStr for ClassifierType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mnb" => Ok(ClassifierType::Mnb),
            "svm" => Ok(ClassifierType::Svm),
            other => Err(format!("unknown classifier {other:?}")),
        }
    }
}

impl std::fmt::Display for ClassifierType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClassifierType::Mnb => "mnb",
            ClassifierType::Svm => "svm",
        })
    }
}

/// A predicted label with its score. For naive Bayes the score is the
/// log-posterior margin of the winner (>= 0); for the SVM it is the signed
/// decision value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

pub trait Classifier {
    fn n_features(&self) -> usize;

    fn predict(&self, x: &SparseVector) -> Result<Prediction, ClassifierError>;
}

/// Applies `model` to every row, in order. The first failing row aborts the
/// batch and its index is attached to the error.
pub fn predict_batch<C: Classifier + ?Sized>(
    model: &C,
    rows: &[SparseVector],
) -> Result<Vec<Prediction>, ClassifierError> {
    rows.iter()
        .enumerate()
        .map(|(row, x)| {
            model.predict(x).map_err(|e| ClassifierError::Row {
                row,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Either trained classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Model {
    Mnb(MnbModel),
    Svm(SvmModel),
}

impl Model {
    pub fn train(
        kind: ClassifierType,
        matrix: &DocumentTermMatrix,
        config: &TrainConfig,
    ) -> Result<Self, ClassifierError> {
        Ok(match kind {
            ClassifierType::Mnb => Model::Mnb(train_mnb(matrix, config)?),
            ClassifierType::Svm => Model::Svm(train_svm(matrix, config)?),
        })
    }

    pub fn kind(&self) -> ClassifierType {
        match self {
            Model::Mnb(_) => ClassifierType::Mnb,
            Model::Svm(_) => ClassifierType::Svm,
        }
    }
}

impl Classifier for Model {
    fn n_features(&self) -> usize {
        match self {
            Model::Mnb(m) => m.n_features(),
            Model::Svm(m) => m.n_features(),
        }
    }

    fn predict(&self, x: &SparseVector) -> Result<Prediction, ClassifierError> {
        match self {
            Model::Mnb(m) => m.predict(x),
            Model::Svm(m) => m.predict(x),
        }
    }
}

/// Shared precondition: nonempty with both classes present.
fn check_two_classes(matrix: &DocumentTermMatrix) -> Result<(), ClassifierError> {
    let labels = matrix.labels();
    let first = *labels.first().ok_or(ClassifierError::EmptyTrainingSet)?;
    if labels.iter().all(|&l| l == first) {
        return Err(ClassifierError::SingleClassCorpus(first));
    }
    Ok(())
}
