//! Vocabulary, count vectors and TF-IDF weighting.
//!
//! TF-IDF follows the plain product `tfidf(t, d) = tf(t, d) * idf(t)` with the
//! raw term count as `tf` and no row normalization. The IDF is the add-one
//! smoothed variant
//!
//! ```text
//! idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1
//! ```
//!
//! which is strictly positive, so TF-IDF never changes the sparsity pattern.

use std::collections::{BTreeMap, HashMap};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::corpus::Label;
use crate::preprocess::TokenList;

/// Identifier written into model artifacts for the IDF formula above.
pub const IDF_VARIANT: &str = "smooth_plus_one";

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("training corpus contains no tokens")]
    EmptyTrainingCorpus,
    #[error("term id {id} out of range for {size} features")]
    TermIdOutOfRange { id: usize, size: usize },
    #[error("unsupported idf variant {0:?}")]
    UnsupportedIdfVariant(String),
}

/// Dense term ↔ id bijection, ids assigned in first-occurrence order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    term_to_id: HashMap<String, usize>,
    id_to_term: Vec<String>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.id_to_term.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_term.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.term_to_id.get(term).copied()
    }

    pub fn term(&self, id: usize) -> Option<&str> {
        self.id_to_term.get(id).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.id_to_term
    }

    fn insert(&mut self, term: &str) -> usize {
        if let Some(&id) = self.term_to_id.get(term) {
            return id;
        }
        let id = self.id_to_term.len();
        self.term_to_id.insert(term.to_owned(), id);
        self.id_to_term.push(term.to_owned());
        id
    }

    /// Rebuilds a vocabulary from terms listed in id order. Fails on repeats.
    pub fn from_terms<I, S>(terms: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vocab = Vocabulary::default();
        for term in terms {
            let term = term.as_ref();
            if vocab.term_to_id.contains_key(term) {
                return Err(format!("duplicate term {term:?}"));
            }
            vocab.insert(term);
        }
        Ok(vocab)
    }
}

// Serialized as a `term -> id` map written in id order.
impl Serialize for Vocabulary {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_map(self.id_to_term.iter().enumerate().map(|(id, t)| (t, id)))
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = HashMap::<String, usize>::deserialize(deserializer)?;
        let n_terms = map.len();
        let by_id: BTreeMap<usize, String> = map.into_iter().map(|(t, id)| (id, t)).collect();
        if by_id.len() != n_terms {
            return Err(D::Error::custom("vocabulary maps two terms to one id"));
        }
        if by_id.keys().enumerate().any(|(expected, &id)| expected != id) {
            return Err(D::Error::custom("vocabulary ids are not dense 0..V-1"));
        }
        Vocabulary::from_terms(by_id.into_values()).map_err(D::Error::custom)
    }
}

pub fn build_vocabulary<'a, I>(train_docs: I) -> Result<Vocabulary, FeatureError>
where
    I: IntoIterator<Item = &'a TokenList>,
{
    let mut vocab = Vocabulary::default();
    for doc in train_docs {
        for token in doc.iter() {
            vocab.insert(token);
        }
    }
    if vocab.is_empty() {
        return Err(FeatureError::EmptyTrainingCorpus);
    }
    Ok(vocab)
}

/// Sparse nonnegative weights with strictly increasing term ids and no
/// explicit zeros.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from arbitrary `(id, weight)` pairs: sorts by id, sums
    /// duplicates and drops zero weights.
    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (id, w) in pairs {
            *acc.entry(id).or_insert(0.0) += w;
        }
        Self {
            entries: acc.into_iter().filter(|&(_, w)| w != 0.0).collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum()
    }

    pub fn max_id(&self) -> Option<usize> {
        self.entries.last().map(|&(id, _)| id)
    }

    /// Errors if any id is `>= size`.
    pub fn check_ids(&self, size: usize) -> Result<(), FeatureError> {
        match self.max_id() {
            Some(id) if id >= size => Err(FeatureError::TermIdOutOfRange { id, size }),
            _ => Ok(()),
        }
    }

    /// Inner product with a dense vector. Ids must already be in range.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(id, w)| w * dense[id]).sum()
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_pairs(self.iter().map(|(id, w)| (id, w * factor)))
    }
}

pub fn vectorize_counts(doc: &TokenList, vocab: &Vocabulary) -> SparseVector {
    let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
    for id in doc.iter().filter_map(|t| vocab.id(t)) {
        *counts.entry(id).or_insert(0) += 1;
    }
    SparseVector {
        entries: counts.into_iter().map(|(id, c)| (id, f64::from(c))).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdfWeights {
    pub idf: Vec<f64>,
    pub n_docs: usize,
}

impl IdfWeights {
    pub fn len(&self) -> usize {
        self.idf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idf.is_empty()
    }
}

/// Smoothed IDF for a term seen in `df` of `n_docs` documents.
pub fn smooth_idf(n_docs: usize, df: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

pub fn compute_idf(
    rows: &[SparseVector],
    vocab_size: usize,
    n_docs: usize,
) -> Result<IdfWeights, FeatureError> {
    if n_docs == 0 {
        return Err(FeatureError::EmptyTrainingCorpus);
    }
    let mut df = vec![0usize; vocab_size];
    for row in rows {
        row.check_ids(vocab_size)?;
        for (id, _) in row.iter() {
            df[id] += 1;
        }
    }
    Ok(IdfWeights {
        idf: df.into_iter().map(|d| smooth_idf(n_docs, d)).collect(),
        n_docs,
    })
}

pub fn transform_tfidf(counts: &SparseVector, idf: &IdfWeights) -> Result<SparseVector, FeatureError> {
    counts.check_ids(idf.len())?;
    Ok(SparseVector {
        entries: counts.iter().map(|(id, tf)| (id, tf * idf.idf[id])).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureType {
    Count,
    Tfidf,
}

impl std::str::FromStr for FeatureType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "count" => Ok(FeatureType::Count),
            "tfidf" | "tf-idf" => Ok(FeatureType::Tfidf),
            other => Err(format!("unknown feature type {other:?}")),
        }
    }
}

impl std::fmt::Display for FeatureType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FeatureType::Count => "count",
            FeatureType::Tfidf => "tfidf",
        })
    }
}

/// Frozen feature extractor: vocabulary plus, for TF-IDF, the IDF fitted on
/// the training split.
#[derive(Debug, Clone, PartialEq)]
pub struct Vectorizer {
    pub feature_type: FeatureType,
    pub vocabulary: Vocabulary,
    pub idf: Option<IdfWeights>,
}

impl Vectorizer {
    pub fn fit(train_docs: &[TokenList], feature_type: FeatureType) -> Result<Self, FeatureError> {
        let vocabulary = build_vocabulary(train_docs)?;
        let idf = match feature_type {
            FeatureType::Count => None,
            FeatureType::Tfidf => {
                let rows: Vec<_> = train_docs.iter().map(|d| vectorize_counts(d, &vocabulary)).collect();
                Some(compute_idf(&rows, vocabulary.len(), train_docs.len())?)
            }
        };
        Ok(Self {
            feature_type,
            vocabulary,
            idf,
        })
    }

    pub fn n_features(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn transform(&self, doc: &TokenList) -> SparseVector {
        let counts = vectorize_counts(doc, &self.vocabulary);
        match &self.idf {
            // ids come from the same vocabulary the idf was sized for
            Some(idf) => transform_tfidf(&counts, idf).expect("vocabulary and idf sizes agree"),
            None => counts,
        }
    }

    pub fn transform_all(&self, docs: &[TokenList], labels: &[Label]) -> DocumentTermMatrix {
        DocumentTermMatrix::new(
            docs.iter().map(|d| self.transform(d)).collect(),
            labels.to_vec(),
            self.n_features(),
        )
        .expect("rows built from this vocabulary")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("document-term matrix is inconsistent: {0}")]
pub struct MatrixShapeError(pub String);

/// Rows of feature vectors with their gold labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentTermMatrix {
    rows: Vec<SparseVector>,
    labels: Vec<Label>,
    n_features: usize,
}

impl DocumentTermMatrix {
    pub fn new(rows: Vec<SparseVector>, labels: Vec<Label>, n_features: usize) -> Result<Self, MatrixShapeError> {
        if rows.len() != labels.len() {
            return Err(MatrixShapeError(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some((i, id)) = rows
            .iter()
            .enumerate()
            .find_map(|(i, r)| r.max_id().filter(|&id| id >= n_features).map(|id| (i, id)))
        {
            return Err(MatrixShapeError(format!(
                "row {i} references term {id} but there are {n_features} features"
            )));
        }
        Ok(Self {
            rows,
            labels,
            n_features,
        })
    }

    pub fn rows(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SparseVector, Label)> {
        self.rows.iter().zip(self.labels.iter().copied())
    }
}
