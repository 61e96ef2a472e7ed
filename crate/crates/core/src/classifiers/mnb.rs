use serde::{Deserialize, Serialize};

use super::{check_two_classes, Classifier, ClassifierError, Prediction, TrainConfig};
use crate::corpus::Label;
use crate::features::{DocumentTermMatrix, SparseVector};

/// Log-posterior differences within this relative band count as ties, which
/// resolve to `Real`. Equal posteriors reached through different sums of logs
/// can otherwise differ in the last few ulps.
const TIE_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Multinomial naive Bayes parameters. Class-indexed arrays use the fixed
/// `[Real, Fake]` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnbModel {
    /// `ln P(c)`
    pub class_log_prior: [f64; 2],
    /// `ln P(t | c)`, one row of length `vocab_size` per class.
    pub feature_log_prob: [Vec<f64>; 2],
    pub alpha: f64,
    pub vocab_size: usize,
}

impl MnbModel {
    /// Per-class `ln P(c) + sum_t x_t ln P(t | c)`.
    pub fn joint_log_likelihood(&self, x: &SparseVector) -> Result<[f64; 2], ClassifierError> {
        x.check_ids(self.vocab_size)?;
        Ok([0, 1].map(|c| self.class_log_prior[c] + x.dot(&self.feature_log_prob[c])))
    }

    /// Checks the normalization invariants; used when loading artifacts.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(format!("alpha must be positive, got {}", self.alpha));
        }
        let prior_mass: f64 = self.class_log_prior.iter().map(|lp| lp.exp()).sum();
        if prior_mass.is_nan() || (prior_mass - 1.0).abs() > 1e-9 {
            return Err(format!("class priors sum to {prior_mass}, expected 1"));
        }
        for (c, row) in self.feature_log_prob.iter().enumerate() {
            if row.len() != self.vocab_size {
                return Err(format!(
                    "class {c} has {} term probabilities for {} terms",
                    row.len(),
                    self.vocab_size
                ));
            }
            let mass: f64 = row.iter().map(|lp| lp.exp()).sum();
            if mass.is_nan() || (mass - 1.0).abs() > 1e-9 {
                return Err(format!("term distribution of class {c} sums to {mass}, expected 1"));
            }
        }
        Ok(())
    }
}

impl Classifier for MnbModel {
    fn n_features(&self) -> usize {
        self.vocab_size
    }

    fn predict(&self, x: &SparseVector) -> Result<Prediction, ClassifierError> {
        predict_mnb(self, x)
    }
}

pub fn train_mnb(matrix: &DocumentTermMatrix, config: &TrainConfig) -> Result<MnbModel, ClassifierError> {
    let alpha = config.alpha;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ClassifierError::NonPositiveAlpha(alpha));
    }
    check_two_classes(matrix)?;
    let vocab_size = matrix.n_features();

    let mut docs_per_class = [0usize; 2];
    let mut term_mass = [vec![0.0; vocab_size], vec![0.0; vocab_size]];
    for (row, label) in matrix.iter() {
        let c = label.index();
        docs_per_class[c] += 1;
        for (id, w) in row.iter() {
            term_mass[c][id] += w;
        }
    }

    let n_docs = matrix.len() as f64;
    let class_log_prior = docs_per_class.map(|n| (n as f64 / n_docs).ln());
    let feature_log_prob = term_mass.map(|mass| {
        let denom = (mass.iter().sum::<f64>() + alpha * vocab_size as f64).ln();
        mass.into_iter().map(|m| (m + alpha).ln() - denom).collect()
    });

    Ok(MnbModel {
        class_log_prior,
        feature_log_prob,
        alpha,
        vocab_size,
    })
}

pub fn predict_mnb(model: &MnbModel, x: &SparseVector) -> Result<Prediction, ClassifierError> {
    let [real, fake] = model.joint_log_likelihood(x)?;
    let margin = real - fake;
    let tie_band = TIE_RELATIVE_TOLERANCE * (1.0 + real.abs() + fake.abs());
    Ok(if margin.abs() <= tie_band {
        Prediction {
            label: Label::Real,
            score: 0.0,
        }
    } else if margin > 0.0 {
        Prediction {
            label: Label::Real,
            score: margin,
        }
    } else {
        Prediction {
            label: Label::Fake,
            score: -margin,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // vocab {x:0, y:1, z:2}; real = "x x y", fake = "z"
    fn toy() -> DocumentTermMatrix {
        DocumentTermMatrix::new(
            vec![
                SparseVector::from_pairs([(0, 2.0), (1, 1.0)]),
                SparseVector::from_pairs([(2, 1.0)]),
            ],
            vec![Label::Real, Label::Fake],
            3,
        )
        .unwrap()
    }

    fn probs(m: &MnbModel, c: Label) -> Vec<f64> {
        m.feature_log_prob[c.index()].iter().map(|lp| lp.exp()).collect()
    }

    #[test]
    fn hand_computed_parameters() {
        let m = train_mnb(&toy(), &TrainConfig::default()).unwrap();
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
        assert!(close(&probs(&m, Label::Real), &[3.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0]));
        assert!(close(&probs(&m, Label::Fake), &[1.0 / 4.0, 1.0 / 4.0, 2.0 / 4.0]));
        assert!(close(&m.class_log_prior.map(f64::exp), &[0.5, 0.5]));
        m.validate().unwrap();
    }

    #[test]
    fn duplicated_rows_keep_priors() {
        let base = toy();
        let doubled = DocumentTermMatrix::new(
            base.rows().iter().chain(base.rows()).cloned().collect(),
            base.labels().iter().chain(base.labels()).copied().collect(),
            3,
        )
        .unwrap();
        let cfg = TrainConfig::default();
        let a = train_mnb(&base, &cfg).unwrap();
        let b = train_mnb(&doubled, &cfg).unwrap();
        assert_eq!(a.class_log_prior, b.class_log_prior);
        assert_eq!(a.vocab_size, b.vocab_size);
        // with a fixed alpha the smoothed likelihoods shift; they agree as alpha -> 0
        let cfg_tiny = TrainConfig { alpha: 1e-12, ..cfg };
        let a = train_mnb(&base, &cfg_tiny).unwrap();
        let b = train_mnb(&doubled, &cfg_tiny).unwrap();
        for c in 0..2 {
            for (x, y) in a.feature_log_prob[c].iter().zip(&b.feature_log_prob[c]) {
                assert!((x.exp() - y.exp()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn alpha_must_be_positive() {
        let cfg = TrainConfig {
            alpha: 0.0,
            ..TrainConfig::default()
        };
        assert_eq!(train_mnb(&toy(), &cfg), Err(ClassifierError::NonPositiveAlpha(0.0)));
    }

    #[test]
    fn single_class_rejected() {
        let m = DocumentTermMatrix::new(vec![SparseVector::new(); 2], vec![Label::Fake; 2], 1).unwrap();
        assert_eq!(
            train_mnb(&m, &TrainConfig::default()),
            Err(ClassifierError::SingleClassCorpus(Label::Fake))
        );
    }

    #[test]
    fn predicts_hand_example() {
        let m = train_mnb(&toy(), &TrainConfig::default()).unwrap();
        let p = predict_mnb(&m, &SparseVector::from_pairs([(0, 1.0)])).unwrap();
        assert_eq!(p.label, Label::Real);
        // (ln 1/2 + ln 1/2) - (ln 1/2 + ln 1/4) = ln 2
        assert!((p.score - 2f64.ln()).abs() < 1e-12);

        let p = predict_mnb(&m, &SparseVector::from_pairs([(2, 1.0)])).unwrap();
        assert_eq!(p.label, Label::Fake);
    }

    #[test]
    fn empty_vector_ties_to_real() {
        let m = train_mnb(&toy(), &TrainConfig::default()).unwrap();
        assert_eq!(
            predict_mnb(&m, &SparseVector::new()).unwrap(),
            Prediction {
                label: Label::Real,
                score: 0.0
            }
        );
    }

    #[test]
    fn out_of_range_term() {
        let m = train_mnb(&toy(), &TrainConfig::default()).unwrap();
        assert!(matches!(
            predict_mnb(&m, &SparseVector::from_pairs([(3, 1.0)])),
            Err(ClassifierError::Feature(_))
        ));
    }

    #[test]
    fn doubling_document_doubles_margin() {
        // brute-force over 3-term count vectors
        let m = train_mnb(&toy(), &TrainConfig::default()).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let x = SparseVector::from_pairs([(0, a as f64), (1, b as f64), (2, c as f64)]);
                    let single = predict_mnb(&m, &x).unwrap();
                    let double = predict_mnb(&m, &x.scaled(2.0)).unwrap();
                    let [r1, f1] = m.joint_log_likelihood(&x).unwrap();
                    let [r2, f2] = m.joint_log_likelihood(&x.scaled(2.0)).unwrap();
                    let prior_gap = m.class_log_prior[0] - m.class_log_prior[1];
                    // margin(2x) = 2 margin(x) - prior gap
                    assert!(((r2 - f2) - (2.0 * (r1 - f1) - prior_gap)).abs() < 1e-12);
                    if prior_gap == 0.0 {
                        assert_eq!(single.label, double.label);
                        assert!((double.score - 2.0 * single.score).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn corrupt_distribution_detected() {
        let mut m = train_mnb(&toy(), &TrainConfig::default()).unwrap();
        m.feature_log_prob[1][0] += 0.1;
        assert!(m.validate().is_err());
    }
}
