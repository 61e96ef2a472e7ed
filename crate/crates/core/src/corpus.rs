//! Labeled news corpora: ingestion from JSONL/CSV, class statistics and the
//! seeded train/test split.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Binary article label. `Real` sorts first everywhere a fixed class order is
/// needed (confusion matrices, tie-breaks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Real,
    Fake,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Real, Label::Fake];

    /// Position in the fixed `[Real, Fake]` order.
    pub fn index(self) -> usize {
        match self {
            Label::Real => 0,
            Label::Fake => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Label::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Real => "real",
            Label::Fake => "fake",
        }
    }

    /// SVM target encoding: Fake is the positive class.
    pub fn sign(self) -> f64 {
        match self {
            Label::Real => -1.0,
            Label::Fake => 1.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "real" => Ok(Label::Real),
            "fake" => Ok(Label::Fake),
            _ => Err(CorpusError::UnknownLabel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Label,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("unknown label {0:?} (expected \"real\" or \"fake\")")]
    UnknownLabel(String),
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("corpus has {0} document(s); at least 2 are required to split")]
    CorpusTooSmall(usize),
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidTestFraction(f64),
}

/// Ordered collection of documents with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledCorpus {
    documents: Vec<Document>,
}

impl LabeledCorpus {
    pub fn new(documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Self { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.documents.iter().map(|d| d.label).collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.documents.iter().filter(|d| d.label == label).count()
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    /// Writes the corpus as JSONL (`id`, `text`, `label` per line).
    pub fn write_jsonl<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for doc in &self.documents {
            serde_json::to_writer(&mut out, doc)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a LabeledCorpus {
    type Item = &'a Document;
    type IntoIter = std::slice::Iter<'a, Document>;

    fn into_iter(self) -> Self::IntoIter {
        self.documents.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(format!("unknown corpus format {other:?}")),
        }
    }
}

impl CorpusFormat {
    /// Guesses the format from a file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

/// One input record before label validation. Shared with unlabeled
/// prediction input, where `label` is optional.
#[derive(Debug, Clone, Deserialize)]
pub struct RawRecord {
    pub id: Option<String>,
    pub text: Option<String>,
    pub label: Option<String>,
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<LabeledCorpus, CorpusError> {
    let file = File::open(path)?;
    read_corpus(BufReader::new(file), format)
}

pub fn read_corpus<R: Read>(reader: R, format: CorpusFormat) -> Result<LabeledCorpus, CorpusError> {
    let mut documents = Vec::new();
    for item in read_records(reader, format) {
        let (line, index, record) = item?;
        documents.push(into_document(line, index, record)?);
    }
    LabeledCorpus::new(documents)
}

fn into_document(line: usize, index: usize, record: RawRecord) -> Result<Document, CorpusError> {
    let text = match record.text {
        Some(t) if !t.is_empty() => t,
        Some(_) => return Err(malformed(line, "empty `text`")),
        None => return Err(malformed(line, "missing `text`")),
    };
    let label = record
        .label
        .ok_or_else(|| malformed(line, "missing `label`"))?
        .parse::<Label>()?;
    Ok(Document {
        id: record.id.unwrap_or_else(|| index.to_string()),
        text,
        label,
    })
}

fn malformed(line: usize, reason: impl Into<String>) -> CorpusError {
    CorpusError::MalformedRecord {
        line,
        reason: reason.into(),
    }
}

/// Iterates raw records as `(1-based line number, 0-based record index, record)`.
/// Blank JSONL lines are skipped but still counted for line numbers and ids.
pub fn read_records<'r, R: Read + 'r>(
    reader: R,
    format: CorpusFormat,
) -> Box<dyn Iterator<Item = Result<(usize, usize, RawRecord), CorpusError>> + 'r> {
    match format {
        CorpusFormat::Jsonl => {
            let lines = BufReader::new(reader).lines().enumerate();
            Box::new(lines.filter_map(|(i, line)| {
                let line_no = i + 1;
                match line {
                    Err(e) => Some(Err(CorpusError::Io(e))),
                    Ok(l) if l.trim().is_empty() => None,
                    Ok(l) => Some(
                        serde_json::from_str::<RawRecord>(&l)
                            .map(|r| (line_no, i, r))
                            .map_err(|e| malformed(line_no, e.to_string())),
                    ),
                }
            }))
        }
        CorpusFormat::Csv => {
            let rdr = csv::ReaderBuilder::new()
                .has_headers(true)
                .from_reader(reader);
            Box::new(rdr.into_deserialize::<RawRecord>().enumerate().map(|(i, rec)| {
                // header occupies line 1
                let line_no = i + 2;
                rec.map(|r| (line_no, i, r)).map_err(|e| {
                    let line = e.position().map(|p| p.line() as usize).unwrap_or(line_no);
                    malformed(line, e.to_string())
                })
            }))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassStat {
    pub count: usize,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub total: usize,
    pub real: ClassStat,
    pub fake: ClassStat,
}

impl CorpusStats {
    pub fn get(&self, label: Label) -> ClassStat {
        match label {
            Label::Real => self.real,
            Label::Fake => self.fake,
        }
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<6} {:>8} {:>8}", "type", "count", "percent")?;
        for label in Label::ALL {
            let s = self.get(label);
            writeln!(f, "{:<6} {:>8} {:>7.2}%", label.as_str(), s.count, s.percentage)?;
        }
        write!(f, "{:<6} {:>8}", "total", self.total)
    }
}

pub fn corpus_stats(corpus: &LabeledCorpus) -> CorpusStats {
    let total = corpus.len();
    let stat = |label| {
        let count = corpus.count(label);
        let percentage = if total == 0 {
            0.0
        } else {
            100.0 * count as f64 / total as f64
        };
        ClassStat { count, percentage }
    };
    CorpusStats {
        total,
        real: stat(Label::Real),
        fake: stat(Label::Fake),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            test_fraction: 0.3,
            seed: 42,
        }
    }
}

impl SplitConfig {
    pub fn new(test_fraction: f64, seed: u64) -> Result<Self, CorpusError> {
        let config = Self { test_fraction, seed };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.test_fraction > 0.0 && self.test_fraction < 1.0 {
            Ok(())
        } else {
            Err(CorpusError::InvalidTestFraction(self.test_fraction))
        }
    }

    /// `floor((1 - f) * n)`. The epsilon absorbs representation error in
    /// products that are exact integers in decimal (e.g. 0.7 * 10).
    pub fn train_size(&self, n: usize) -> usize {
        (((1.0 - self.test_fraction) * n as f64) + 1e-9).floor() as usize
    }
}

/// Seeded random train/test partition. Both halves keep the corpus' original
/// relative order.
pub fn split_corpus(
    corpus: &LabeledCorpus,
    config: &SplitConfig,
) -> Result<(LabeledCorpus, LabeledCorpus), CorpusError> {
    config.validate()?;
    let n = corpus.len();
    if n < 2 {
        return Err(CorpusError::CorpusTooSmall(n));
    }
    let n_train = config.train_size(n);

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    order.shuffle(&mut rng);

    let mut in_train = vec![false; n];
    for &i in &order[..n_train] {
        in_train[i] = true;
    }
    let (mut train, mut test) = (Vec::with_capacity(n_train), Vec::with_capacity(n - n_train));
    for (doc, &flag) in corpus.documents.iter().zip(&in_train) {
        if flag {
            train.push(doc.clone());
        } else {
            test.push(doc.clone());
        }
    }
    for label in Label::ALL {
        if !train.iter().any(|d| d.label == label) {
            log::warn!("training split contains no `{label}` documents");
        }
    }
    Ok((LabeledCorpus { documents: train }, LabeledCorpus { documents: test }))
}
