//! Perturbation-based training pairs and the minibatch training loop.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::layout::Layout;
use super::model::{PreparedLayout, ScorerModel};
use crate::corpus::{Example, ExampleLibrary};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedSample {
    pub layout: Layout,
    pub degree: f64,
}

/// Which kind of comparison a pair encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPattern {
    /// Original design against a perturbed one.
    OriginalVsPerturbed,
    /// Two perturbations of one design with degrees at least 2× apart.
    PerturbedVsPerturbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub left: Layout,
    pub right: Layout,
    /// `[1, 0]` when the left layout is better, `[0, 1]` otherwise.
    pub label: [f64; 2],
    pub pattern: PairPattern,
    pub example_id: String,
    /// Perturbation degrees of the left and right layouts (0 for an original).
    pub degrees: [f64; 2],
}

impl TrainingPair {
    pub fn left_is_better(&self) -> bool {
        self.label[0] > self.label[1]
    }
}

pub const MIN_DEGREE_RATIO: f64 = 2.0;

/// Moves or rescales one element; the applied change (after keeping the box
/// on the canvas) defines the degree.
pub fn perturb_with(e: &Example, r: &mut Rng) -> PerturbedSample {
    let base = Layout::from(e);
    let (w, h) = (base.width, base.height);
    let diag = base.diagonal();
    loop {
        let mut layout = base.clone();
        let k = r.random_range(0..layout.elements.len());
        let old = layout.elements[k].bbox;
        let degree = if r.random_bool(0.5) {
            let sigma = r.random_range(0.01..0.15) * diag;
            let n = Normal::new(0.0, sigma).expect("positive sigma");
            let (dx, dy) = (n.sample(r), n.sample(r));
            let moved = old.translate(dx, dy).clamp_into(w, h);
            layout.elements[k].bbox = moved;
            (moved.x_l - old.x_l).hypot(moved.y_l - old.y_l) / diag
        } else {
            let tau: f64 = r.random_range(0.02..0.3);
            let eps: f64 = Normal::new(0.0, tau).expect("positive tau").sample(r);
            let cap = (w / old.width()).min(h / old.height());
            let s = eps.exp().min(cap);
            layout.elements[k].bbox = old.scale_about_center(s).clamp_into(w, h);
            (s - 1.0).abs()
        };
        if degree > 0.0 {
            return PerturbedSample { layout, degree };
        }
    }
}

pub fn perturb(e: &Example, seed: u64) -> PerturbedSample {
    perturb_with(e, &mut rng::seeded(seed))
}

fn make_pair(lib: &ExampleLibrary, pattern: PairPattern, r: &mut Rng) -> TrainingPair {
    let e = &lib.examples[r.random_range(0..lib.examples.len())];
    let (better, worse) = match pattern {
        PairPattern::OriginalVsPerturbed => {
            let p = perturb_with(e, r);
            ((Layout::from(e), 0.0), (p.layout, p.degree))
        }
        PairPattern::PerturbedVsPerturbed => loop {
            let a = perturb_with(e, r);
            let b = perturb_with(e, r);
            let (lo, hi) = if a.degree <= b.degree { (a, b) } else { (b, a) };
            if hi.degree >= MIN_DEGREE_RATIO * lo.degree {
                break ((lo.layout, lo.degree), (hi.layout, hi.degree));
            }
        },
    };
    let (left, right, label) = if r.random_bool(0.5) { (better, worse, [1.0, 0.0]) } else { (worse, better, [0.0, 1.0]) };
    TrainingPair {
        degrees: [left.1, right.1],
        left: left.0,
        right: right.0,
        label,
        pattern,
        example_id: e.id.clone(),
    }
}

fn make_pairs(lib: &ExampleLibrary, n: usize, r: &mut Rng) -> Vec<TrainingPair> {
    (0..n)
        .map(|i| {
            let pattern =
                if i % 2 == 0 { PairPattern::OriginalVsPerturbed } else { PairPattern::PerturbedVsPerturbed };
            make_pair(lib, pattern, r)
        })
        .collect()
}

/// Half of each set compares an original with a perturbation, half compares
/// two perturbations; the better side is placed left or right at random.
pub fn build_training_set(
    lib: &ExampleLibrary,
    n_train: usize,
    n_val: usize,
    seed: u64,
) -> (Vec<TrainingPair>, Vec<TrainingPair>) {
    assert!(!lib.examples.is_empty(), "library is empty");
    let train = make_pairs(lib, n_train, &mut rng::derive(seed, 0));
    let val = make_pairs(lib, n_val, &mut rng::derive(seed, 1));
    (train, val)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { hidden: 64, learning_rate: 1e-3, momentum: 0.9, batch_size: 32, epochs: 80, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
    pub val_accuracy_original: f64,
    pub val_accuracy_perturbed: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("training set or validation set is empty")]
    EmptySet,
    #[error("loss became non-finite in epoch {epoch}, batch {batch} (learning rate {learning_rate})")]
    Diverged { epoch: usize, batch: usize, learning_rate: f64 },
}

pub struct Prepared {
    left: PreparedLayout,
    right: PreparedLayout,
    label: [f64; 2],
    pattern: PairPattern,
}

pub fn prepare(pairs: &[TrainingPair]) -> Vec<Prepared> {
    pairs
        .iter()
        .map(|p| Prepared {
            left: PreparedLayout::new(&p.left),
            right: PreparedLayout::new(&p.right),
            label: p.label,
            pattern: p.pattern,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Evaluation {
    pub loss: f64,
    pub accuracy: f64,
    pub accuracy_original: f64,
    pub accuracy_perturbed: f64,
}

pub fn evaluate(model: &ScorerModel, set: &[Prepared]) -> Evaluation {
    let (mut loss, mut hits) = (0.0, [0usize; 2]);
    let mut totals = [0usize; 2];
    for p in set {
        let (a, b) = model.compare(&model.encode(&p.left), &model.encode(&p.right));
        loss += super::model::cross_entropy([a, b], p.label);
        let slot = (p.pattern == PairPattern::PerturbedVsPerturbed) as usize;
        totals[slot] += 1;
        if (a > b) == (p.label[0] > p.label[1]) && a != b {
            hits[slot] += 1;
        }
    }
    let ratio = |h: usize, t: usize| if t == 0 { 0.0 } else { h as f64 / t as f64 };
    Evaluation {
        loss: loss / set.len().max(1) as f64,
        accuracy: ratio(hits[0] + hits[1], totals[0] + totals[1]),
        accuracy_original: ratio(hits[0], totals[0]),
        accuracy_perturbed: ratio(hits[1], totals[1]),
    }
}

/// Momentum SGD on the pairwise cross-entropy. Returns the model with the
/// best overall validation accuracy and the per-epoch log.
pub fn train(
    model: ScorerModel,
    train_set: &[TrainingPair],
    val_set: &[TrainingPair],
    config: &TrainConfig,
) -> Result<(ScorerModel, Vec<EpochMetrics>), TrainError> {
    train_with(model, train_set, val_set, config, |_| {})
}

pub fn train_with(
    mut model: ScorerModel,
    train_set: &[TrainingPair],
    val_set: &[TrainingPair],
    config: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochMetrics),
) -> Result<(ScorerModel, Vec<EpochMetrics>), TrainError> {
    if train_set.is_empty() || val_set.is_empty() {
        return Err(TrainError::EmptySet);
    }
    let train_p = prepare(train_set);
    let val_p = prepare(val_set);
    let n = model.params().len();
    let mut velocity = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut order: Vec<usize> = (0..train_p.len()).collect();
    let mut r = rng::derive(config.seed, 2);
    let mut best: Option<(f64, ScorerModel)> = None;
    let mut log = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        order.shuffle(&mut r);
        let mut epoch_loss = 0.0;
        for (batch, chunk) in order.chunks(config.batch_size.max(1)).enumerate() {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut batch_loss = 0.0;
            for &i in chunk {
                let p = &train_p[i];
                batch_loss += model.loss_and_grad(&p.left, &p.right, p.label, &mut grad);
            }
            if !batch_loss.is_finite() {
                return Err(TrainError::Diverged { epoch, batch, learning_rate: config.learning_rate });
            }
            epoch_loss += batch_loss;
            let scale = config.learning_rate / chunk.len() as f64;
            for ((p, v), g) in model.params_mut().iter_mut().zip(&mut velocity).zip(&grad) {
                *v = config.momentum * *v - scale * g;
                *p += *v;
            }
        }
        if !model.is_finite() {
            return Err(TrainError::Diverged { epoch, batch: order.len() / config.batch_size.max(1), learning_rate: config.learning_rate });
        }
        let eval = evaluate(&model, &val_p);
        let metrics = EpochMetrics {
            epoch,
            train_loss: epoch_loss / train_p.len() as f64,
            val_loss: eval.loss,
            val_accuracy: eval.accuracy,
            val_accuracy_original: eval.accuracy_original,
            val_accuracy_perturbed: eval.accuracy_perturbed,
        };
        on_epoch(&metrics);
        log.push(metrics);
        if best.as_ref().is_none_or(|(acc, _)| eval.accuracy > *acc) {
            best = Some((eval.accuracy, model.clone()));
        }
    }
    let model = best.map(|(_, m)| m).unwrap_or(model);
    Ok((model, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::gen_synthetic_corpus;

    #[test]
    fn perturb_is_reproducible_and_nonzero() {
        let lib = gen_synthetic_corpus(7, 10);
        for (i, e) in lib.examples.iter().enumerate() {
            let a = perturb(e, i as u64);
            assert_eq!(a, perturb(e, i as u64));
            assert!(a.degree > 0.0);
            assert_ne!(a.layout, Layout::from(e));
            let canvas = e.canvas.bounds();
            assert!(a.layout.elements.iter().all(|el| canvas.contains(&el.bbox, 1e-9)));
        }
    }

    #[test]
    fn mean_degree_in_range() {
        let lib = gen_synthetic_corpus(7, 50);
        let mut r = rng::seeded(99);
        let n = 10_000;
        let total: f64 = (0..n).map(|i| perturb_with(&lib.examples[i % 50], &mut r).degree).sum();
        let mean = total / n as f64;
        assert!((0.01..=0.2).contains(&mean), "mean degree {mean}");
    }

    #[test]
    fn training_set_shape() {
        let lib = gen_synthetic_corpus(7, 50);
        let (train, val) = build_training_set(&lib, 2000, 200, 5);
        assert_eq!((train.len(), val.len()), (2000, 200));
        let pattern1 = train.iter().filter(|p| p.pattern == PairPattern::OriginalVsPerturbed).count();
        assert_eq!(pattern1, 1000);
        for p in &train {
            let [dl, dr] = p.degrees;
            assert_eq!(p.left_is_better(), dl < dr);
            if p.pattern == PairPattern::PerturbedVsPerturbed {
                assert!(dl.max(dr) >= MIN_DEGREE_RATIO * dl.min(dr));
            }
        }
        let (again, _) = build_training_set(&lib, 2000, 200, 5);
        assert_eq!(again, train);
    }

    #[test]
    fn label_balance_at_paper_scale() {
        let lib = gen_synthetic_corpus(7, 50);
        let (train, _) = build_training_set(&lib, 20_000, 0, 11);
        let left = train.iter().filter(|p| p.left_is_better()).count() as f64 / 20_000.0;
        assert!((left - 0.5).abs() <= 0.02, "left share {left}");
    }
}
