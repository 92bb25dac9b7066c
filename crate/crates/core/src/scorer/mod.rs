//! Pairwise layout scorer.
//!
//! A layout is cut into a guillotine tree ([`build_tree`]), each node is
//! encoded bottom-up by one of four two-layer perceptrons (box, horizontal,
//! vertical, overlap), and the two root vectors of a pair are compared by a
//! small softmax head. Training pairs come from perturbing corpus examples.

mod io;
mod layout;
mod model;
mod train;
mod tree;

pub use io::{from_bytes, load_model, load_model_with_config, save_model, to_bytes, ModelError, FORMAT_VERSION, MAGIC};
pub use layout::{Layout, LayoutElement};
pub use model::{cross_entropy, scale_builtin, Block, PreparedLayout, ScorerModel, BOX_INPUT, LAYER_NAMES};
pub use train::{
    build_training_set, evaluate, perturb, perturb_with, prepare, train, train_with, EpochMetrics, Evaluation,
    PairPattern, PerturbedSample, TrainConfig, TrainError, TrainingPair, MIN_DEGREE_RATIO,
};
pub use tree::{build_tree, LayoutNode, NodeKind};

use crate::init::Draft;

/// Anything that can rank two layouts. Encodings let callers cache the
/// per-layout work when one side of many comparisons is fixed.
pub trait PairScorer {
    type Encoding: Clone;

    fn encode(&self, layout: &Layout) -> Self::Encoding;

    /// Probabilities `(d_a, d_b)` that `a` (resp. `b`) is the better layout.
    fn compare(&self, a: &Self::Encoding, b: &Self::Encoding) -> (f64, f64);

    fn score_layouts(&self, a: &Layout, b: &Layout) -> (f64, f64) {
        self.compare(&self.encode(a), &self.encode(b))
    }
}

impl PairScorer for ScorerModel {
    type Encoding = Vec<f64>;

    fn encode(&self, layout: &Layout) -> Vec<f64> {
        self.extract_features(layout)
    }

    fn compare(&self, a: &Vec<f64>, b: &Vec<f64>) -> (f64, f64) {
        ScorerModel::compare(self, a, b)
    }
}

pub fn score_pair<S: PairScorer>(scorer: &S, a: &Draft, b: &Draft) -> (f64, f64) {
    scorer.score_layouts(&Layout::from(a), &Layout::from(b))
}

pub fn extract_features(model: &ScorerModel, d: &Draft) -> Vec<f64> {
    model.extract_features(&Layout::from(d))
}
