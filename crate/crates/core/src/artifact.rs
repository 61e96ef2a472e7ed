//! Versioned JSON model artifact. An artifact carries everything prediction
//! needs: filter rules, vocabulary, IDF weights and classifier parameters.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classifiers::{predict_batch, Classifier, ClassifierError, ClassifierType, Model, Prediction, TrainConfig};
use crate::corpus::LabeledCorpus;
use crate::features::{FeatureType, IdfWeights, SparseVector, Vectorizer, Vocabulary, IDF_VARIANT};
use crate::preprocess::{FilterRules, TextCleaner};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("artifact format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u32 },
    #[error("corrupt artifact: {0}")]
    CorruptArtifact(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec {
    pub filter_rules: FilterRules,
    pub feature_type: FeatureType,
    pub idf_variant: String,
    pub vocabulary: Vocabulary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idf: Option<IdfWeights>,
    pub classifier_type: ClassifierType,
    pub classifier: Model,
    pub train_config: TrainConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub test_fraction: f64,
    pub corpus_fingerprint: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format_version: u32,
    pub pipeline: PipelineSpec,
    pub provenance: Provenance,
}

/// SHA-256 over ids, texts and labels in corpus order.
pub fn corpus_fingerprint(corpus: &LabeledCorpus) -> String {
    let mut hasher = Sha256::new();
    for doc in corpus {
        hasher.update(doc.id.as_bytes());
        hasher.update([0u8]);
        hasher.update(doc.text.as_bytes());
        hasher.update([0u8]);
        hasher.update(doc.label.as_str().as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

/// In-memory form of a trained pipeline: text in, prediction out.
#[derive(Debug, Clone)]
pub struct FittedPipeline {
    pub cleaner: TextCleaner,
    pub vectorizer: Vectorizer,
    pub model: Model,
}

impl FittedPipeline {
    pub fn features(&self, text: &str) -> SparseVector {
        self.vectorizer.transform(&self.cleaner.preprocess(text))
    }

    pub fn predict_text(&self, text: &str) -> Result<Prediction, ClassifierError> {
        self.model.predict(&self.features(text))
    }

    pub fn predict_texts<S: AsRef<str>>(&self, texts: &[S]) -> Result<Vec<Prediction>, ClassifierError> {
        let rows: Vec<_> = texts.iter().map(|t| self.features(t.as_ref())).collect();
        predict_batch(&self.model, &rows)
    }
}

impl ModelArtifact {
    pub fn new(
        pipeline: &FittedPipeline,
        train_config: TrainConfig,
        provenance: Provenance,
    ) -> Self {
        ModelArtifact {
            format_version: FORMAT_VERSION,
            pipeline: PipelineSpec {
                filter_rules: *pipeline.cleaner.rules(),
                feature_type: pipeline.vectorizer.feature_type,
                idf_variant: IDF_VARIANT.to_string(),
                vocabulary: pipeline.vectorizer.vocabulary.clone(),
                idf: pipeline.vectorizer.idf.clone(),
                classifier_type: pipeline.model.kind(),
                classifier: pipeline.model.clone(),
                train_config,
            },
            provenance,
        }
    }

    /// Drops SVM dual variables; prediction only needs the weights.
    pub fn without_dual_vars(mut self) -> Self {
        if let Model::Svm(m) = &mut self.pipeline.classifier {
            m.dual_vars = None;
        }
        self
    }

    pub fn validate(&self) -> Result<(), ArtifactError> {
        let corrupt = |msg: String| Err(ArtifactError::CorruptArtifact(msg));
        if self.format_version != FORMAT_VERSION {
            return Err(ArtifactError::VersionMismatch {
                found: self.format_version.into(),
                expected: FORMAT_VERSION,
            });
        }
        let p = &self.pipeline;
        if p.idf_variant != IDF_VARIANT {
            return corrupt(format!("unsupported idf variant {:?}", p.idf_variant));
        }
        let v = p.vocabulary.len();
        if v == 0 {
            return corrupt("vocabulary is empty".into());
        }
        match (p.feature_type, &p.idf) {
            (FeatureType::Count, Some(_)) => return corrupt("count features carry idf weights".into()),
            (FeatureType::Tfidf, None) => return corrupt("tfidf features without idf weights".into()),
            (_, Some(idf)) => {
                if idf.len() != v {
                    return corrupt(format!("{} idf weights for {v} terms", idf.len()));
                }
                if let Some(i) = idf.idf.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
                    return corrupt(format!("idf weight {i} is not positive"));
                }
            }
            (FeatureType::Count, None) => {}
        }
        if p.classifier.kind() != p.classifier_type {
            return corrupt(format!(
                "classifier_type {} but parameters are for {}",
                p.classifier_type,
                p.classifier.kind()
            ));
        }
        if p.classifier.n_features() != v {
            return corrupt(format!(
                "classifier expects {} features, vocabulary has {v}",
                p.classifier.n_features()
            ));
        }
        let check = match &p.classifier {
            Model::Mnb(m) => m.validate(),
            Model::Svm(m) => m.validate(),
        };
        check.map_err(ArtifactError::CorruptArtifact)
    }

    pub fn to_pipeline(&self) -> FittedPipeline {
        FittedPipeline {
            cleaner: TextCleaner::new(self.pipeline.filter_rules),
            vectorizer: Vectorizer {
                feature_type: self.pipeline.feature_type,
                vocabulary: self.pipeline.vocabulary.clone(),
                idf: self.pipeline.idf.clone(),
            },
            model: self.pipeline.classifier.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("artifact is plain data")
    }

    /// Parses and validates. The version is checked before the rest of the
    /// schema so that future formats fail with `VersionMismatch`.
    pub fn from_json(json: &str) -> Result<Self, ArtifactError> {
        let value: serde_json::Value =
            serde_json::from_str(json).map_err(|e| ArtifactError::CorruptArtifact(e.to_string()))?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| ArtifactError::CorruptArtifact("missing format_version".into()))?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(ArtifactError::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let artifact: ModelArtifact =
            serde_json::from_value(value).map_err(|e| ArtifactError::CorruptArtifact(e.to_string()))?;
        artifact.validate()?;
        Ok(artifact)
    }
}

pub fn save_model(path: impl AsRef<Path>, artifact: &ModelArtifact) -> Result<(), ArtifactError> {
    fs::write(path, artifact.to_json())?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelArtifact, ArtifactError> {
    ModelArtifact::from_json(&fs::read_to_string(path)?)
}
