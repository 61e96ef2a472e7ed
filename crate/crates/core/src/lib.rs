//! Fake-news detection for Bangla news articles.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`corpus`] loads labeled articles and makes the seeded 70/30 split,
//! 2. [`preprocess`] strips special characters, digits, English letters and
//!    emoji, then splits on whitespace,
//! 3. [`features`] fits a vocabulary (and IDF weights) on the training split
//!    and produces count or TF-IDF vectors,
//! 4. [`classifiers`] trains multinomial naive Bayes or a linear SVM,
//! 5. [`evaluation`] reports the confusion matrix, per-class and macro
//!    precision/recall/F1 and accuracy.
//!
//! [`artifact`] persists a trained pipeline as JSON, [`synth`] generates
//! labeled stand-in corpora, and [`pipeline`] wires the stages together.

pub mod artifact;
pub mod classifiers;
pub mod corpus;
pub mod evaluation;
pub mod features;
pub mod pipeline;
pub mod preprocess;
pub mod synth;

pub use classifiers::{ClassifierType, Model, Prediction, TrainConfig};
pub use corpus::{Document, Label, LabeledCorpus};
pub use features::FeatureType;
