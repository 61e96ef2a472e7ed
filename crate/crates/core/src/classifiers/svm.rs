//! L2-regularized L1-loss (hinge) linear SVM trained by dual coordinate
//! descent.
//!
//! Each training vector is augmented with a constant feature `1.0`, so the
//! bias is the last weight and is regularized like every other coordinate.
//! That removes the `sum_i alpha_i y_i = 0` constraint and leaves a box
//! constrained dual
//!
//! ```text
//! max_alpha  sum_i alpha_i - 1/2 || sum_i alpha_i y_i x_i ||^2,   0 <= alpha_i <= C
//! ```
//!
//! in which every single-coordinate step has a closed form. Labels are
//! encoded `Fake = +1`, `Real = -1`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_two_classes, Classifier, ClassifierError, Prediction, TrainConfig};
use crate::corpus::Label;
use crate::features::{DocumentTermMatrix, SparseVector};

/// Value of the implicit constant feature.
const BIAS_FEATURE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    /// `V` feature weights followed by the bias weight.
    pub weights: Vec<f64>,
    /// One dual variable per training row; omitted from compact artifacts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_vars: Option<Vec<f64>>,
    pub c_param: f64,
    pub converged: bool,
    pub epochs: usize,
    pub primal_objective: f64,
    /// Primal minus dual objective at termination.
    pub final_gap: f64,
}

impl SvmModel {
    pub fn bias(&self) -> f64 {
        self.weights.last().copied().unwrap_or(0.0)
    }

    pub fn feature_weights(&self) -> &[f64] {
        &self.weights[..self.weights.len().saturating_sub(1)]
    }

    pub fn relative_gap(&self) -> f64 {
        self.final_gap / (1.0 + self.primal_objective.abs())
    }

    pub fn decision_value(&self, x: &SparseVector) -> Result<f64, ClassifierError> {
        let features = self.feature_weights();
        x.check_ids(features.len())?;
        Ok(x.dot(features) + self.bias() * BIAS_FEATURE)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.weights.is_empty() {
            return Err("weight vector is empty (the bias weight is required)".into());
        }
        if let Some(i) = self.weights.iter().position(|w| !w.is_finite()) {
            return Err(format!("weight {i} is not finite"));
        }
        if !(self.c_param > 0.0 && self.c_param.is_finite()) {
            return Err(format!("C must be positive, got {}", self.c_param));
        }
        if let Some(alpha) = &self.dual_vars {
            if let Some(i) = alpha.iter().position(|&a| !(0.0..=self.c_param).contains(&a)) {
                return Err(format!("dual variable {i} = {} outside [0, C]", alpha[i]));
            }
        }
        Ok(())
    }
}

impl Classifier for SvmModel {
    fn n_features(&self) -> usize {
        self.feature_weights().len()
    }

    fn predict(&self, x: &SparseVector) -> Result<Prediction, ClassifierError> {
        predict_svm(self, x)
    }
}

fn check_config(config: &TrainConfig) -> Result<(), ClassifierError> {
    if !(config.c_param > 0.0 && config.c_param.is_finite()) {
        return Err(ClassifierError::InvalidConfig(format!(
            "C must be positive, got {}",
            config.c_param
        )));
    }
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(ClassifierError::InvalidConfig(format!(
            "tolerance must be positive, got {}",
            config.tol
        )));
    }
    if config.max_epochs == 0 {
        return Err(ClassifierError::InvalidConfig("max_epochs must be at least 1".into()));
    }
    Ok(())
}

/// `w . x_hat` for the augmented vector.
fn augmented_dot(w: &[f64], x: &SparseVector) -> f64 {
    let bias_id = w.len() - 1;
    x.dot(&w[..bias_id]) + w[bias_id] * BIAS_FEATURE
}

/// `w += scale * x_hat`
fn augmented_axpy(w: &mut [f64], scale: f64, x: &SparseVector) {
    let bias_id = w.len() - 1;
    for (id, v) in x.iter() {
        w[id] += scale * v;
    }
    w[bias_id] += scale * BIAS_FEATURE;
}

pub fn train_svm(matrix: &DocumentTermMatrix, config: &TrainConfig) -> Result<SvmModel, ClassifierError> {
    check_config(config)?;
    check_two_classes(matrix)?;

    let rows = matrix.rows();
    let y: Vec<f64> = matrix.labels().iter().map(|l| l.sign()).collect();
    let n = rows.len();
    let c = config.c_param;

    let diag: Vec<f64> = rows
        .iter()
        .map(|x| x.squared_norm() + BIAS_FEATURE * BIAS_FEATURE)
        .collect();
    if diag.iter().any(|q| !q.is_finite()) {
        return Err(ClassifierError::NoProgress);
    }

    let mut w = vec![0.0; matrix.n_features() + 1];
    let mut alpha = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut converged = false;
    let mut epochs = 0;
    while epochs < config.max_epochs {
        epochs += 1;
        order.shuffle(&mut rng);
        let mut max_violation: f64 = 0.0;
        for &i in &order {
            let grad = y[i] * augmented_dot(&w, &rows[i]) - 1.0;
            let projected = if alpha[i] <= 0.0 {
                grad.min(0.0)
            } else if alpha[i] >= c {
                grad.max(0.0)
            } else {
                grad
            };
            max_violation = max_violation.max(projected.abs());
            if projected != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - grad / diag[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * y[i];
                if step != 0.0 {
                    augmented_axpy(&mut w, step, &rows[i]);
                }
            }
        }
        if !max_violation.is_finite() {
            return Err(ClassifierError::NoProgress);
        }
        if max_violation < config.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("svm solver stopped after {epochs} epochs without reaching tol {}", config.tol);
    }

    let sq_norm: f64 = w.iter().map(|v| v * v).sum();
    let hinge: f64 = rows
        .iter()
        .zip(&y)
        .map(|(x, &yi)| (1.0 - yi * augmented_dot(&w, x)).max(0.0))
        .sum();
    let primal = 0.5 * sq_norm + c * hinge;
    let dual = alpha.iter().sum::<f64>() - 0.5 * sq_norm;
    if !(primal.is_finite() && dual.is_finite()) {
        return Err(ClassifierError::NoProgress);
    }

    Ok(SvmModel {
        weights: w,
        dual_vars: Some(alpha),
        c_param: c,
        converged,
        epochs,
        primal_objective: primal,
        final_gap: primal - dual,
    })
}

pub fn predict_svm(model: &SvmModel, x: &SparseVector) -> Result<Prediction, ClassifierError> {
    let score = model.decision_value(x)?;
    let label = if score > 0.0 { Label::Fake } else { Label::Real };
    Ok(Prediction { label, score })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_pair() -> DocumentTermMatrix {
        // x = +1 (fake) and x = -1 (real); a negative count is fine for the solver
        DocumentTermMatrix::new(
            vec![
                SparseVector::from_pairs([(0, 1.0)]),
                SparseVector::from_pairs([(0, -1.0)]),
            ],
            vec![Label::Fake, Label::Real],
            1,
        )
        .unwrap()
    }

    #[test]
    fn symmetric_two_point_closed_form() {
        let m = train_svm(&symmetric_pair(), &TrainConfig::default()).unwrap();
        assert!(m.converged);
        let alpha = m.dual_vars.as_ref().unwrap();
        assert!((alpha[0] - 0.5).abs() < 1e-6 && (alpha[1] - 0.5).abs() < 1e-6);
        assert!((m.weights[0] - 1.0).abs() < 1e-6);
        assert!(m.weights[1].abs() < 1e-6);

        let p = predict_svm(&m, &SparseVector::from_pairs([(0, 1.0)])).unwrap();
        assert_eq!(p.label, Label::Fake);
        assert!((p.score - 1.0).abs() < 1e-6);
    }

    #[test]
    fn empty_vector_scores_bias() {
        let m = train_svm(&symmetric_pair(), &TrainConfig::default()).unwrap();
        assert_eq!(predict_svm(&m, &SparseVector::new()).unwrap().score, m.bias());
    }

    #[test]
    fn zero_score_is_real() {
        let m = SvmModel {
            weights: vec![0.0; 4],
            dual_vars: None,
            c_param: 1.0,
            converged: true,
            epochs: 0,
            primal_objective: 0.0,
            final_gap: 0.0,
        };
        let p = predict_svm(&m, &SparseVector::from_pairs([(1, 3.0)])).unwrap();
        assert_eq!((p.label, p.score), (Label::Real, 0.0));
        assert!(predict_svm(&m, &SparseVector::from_pairs([(3, 1.0)])).is_err());
    }

    #[test]
    fn single_class_rejected() {
        let m = DocumentTermMatrix::new(vec![SparseVector::new(); 3], vec![Label::Real; 3], 1).unwrap();
        assert_eq!(
            train_svm(&m, &TrainConfig::default()),
            Err(ClassifierError::SingleClassCorpus(Label::Real))
        );
    }

    #[test]
    fn non_finite_input_is_no_progress() {
        let m = DocumentTermMatrix::new(
            vec![
                SparseVector::from_pairs([(0, f64::INFINITY)]),
                SparseVector::from_pairs([(0, 1.0)]),
            ],
            vec![Label::Real, Label::Fake],
            1,
        )
        .unwrap();
        assert_eq!(train_svm(&m, &TrainConfig::default()), Err(ClassifierError::NoProgress));
    }

    #[test]
    fn bad_config() {
        let cfg = TrainConfig {
            c_param: -1.0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train_svm(&symmetric_pair(), &cfg),
            Err(ClassifierError::InvalidConfig(_))
        ));
    }

    #[test]
    fn epoch_cap_reports_not_converged() {
        let m = DocumentTermMatrix::new(
            (0..20)
                .map(|i| SparseVector::from_pairs([(i % 3, 1.0 + i as f64), ((i + 1) % 3, 0.5)]))
                .collect(),
            (0..20).map(|i| if i % 2 == 0 { Label::Real } else { Label::Fake }).collect(),
            3,
        )
        .unwrap();
        let cfg = TrainConfig {
            max_epochs: 1,
            tol: 1e-12,
            ..TrainConfig::default()
        };
        let model = train_svm(&m, &cfg).unwrap();
        assert!(!model.converged);
        assert_eq!(model.epochs, 1);
        assert!(model.final_gap >= -1e-12);
    }
}
