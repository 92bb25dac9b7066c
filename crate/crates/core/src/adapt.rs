//! Stochastic refinement of an initial draft.
//!
//! Each step moves or resizes one element and accepts the candidate with
//! probability `min(1, d_cand / d_cur)`, where both numbers come from one
//! pairwise scorer call. Because the scorer only ranks pairs, the best draft
//! seen is tracked by comparing each accepted state with the starting draft.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::assets::{PICTOGRAPH_MAX_COUNT, PICTOGRAPH_MIN_COUNT};
use crate::geometry::BoundingBox;
use crate::init::{fit_graphic, Content, Draft};
use crate::rng::{self, Rng};
use crate::scorer::{Layout, PairScorer};

pub const DEFAULT_SNAP_EPSILON: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProposalParams {
    /// Standard deviation of a move, as a fraction of the canvas diagonal.
    pub sigma_pos: f64,
    /// Standard deviation of the log scale factor.
    pub sigma_size: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for ProposalParams {
    fn default() -> Self {
        ProposalParams { sigma_pos: 0.02, sigma_size: 0.05, iterations: 1000, seed: 0 }
    }
}

impl ProposalParams {
    pub fn validate(&self) -> Result<(), AdaptError> {
        if !(self.sigma_pos > 0.0 && self.sigma_pos.is_finite()) {
            return Err(AdaptError::InvalidParams(format!("sigma_pos must be positive, got {}", self.sigma_pos)));
        }
        if !(self.sigma_size > 0.0 && self.sigma_size.is_finite()) {
            return Err(AdaptError::InvalidParams(format!("sigma_size must be positive, got {}", self.sigma_size)));
        }
        if self.iterations == 0 {
            return Err(AdaptError::InvalidParams("iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdaptError {
    #[error("invalid proposal parameters: {0}")]
    InvalidParams(String),
    #[error("draft has no pictograph element")]
    NoPictograph,
    #[error("draft has no elements")]
    EmptyDraft,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dynamic {
    Move { element: usize, dx: f64, dy: f64 },
    Resize { element: usize, scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub dynamic: Dynamic,
    pub accepted: bool,
    pub d_current: f64,
    pub d_candidate: f64,
    pub alpha: f64,
    pub draw: f64,
    /// Score of the accepted state against the starting draft.
    pub anchor_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AdaptionTrace {
    pub steps: Vec<TraceStep>,
    pub initial_anchor_score: f64,
    pub final_anchor_score: f64,
}

impl AdaptionTrace {
    pub fn acceptance_rate(&self) -> f64 {
        self.steps.iter().filter(|s| s.accepted).count() as f64 / self.steps.len().max(1) as f64
    }

    pub fn to_json_lines(&self) -> String {
        self.steps.iter().map(|s| serde_json::to_string(s).expect("trace serializes") + "\n").collect()
    }
}

/// Copy of `d` with one element moved or resized; boxes stay on the canvas.
pub fn propose(d: &Draft, params: &ProposalParams, r: &mut Rng) -> (Draft, Dynamic) {
    let mut out = d.clone();
    let (w, h) = (d.canvas.width, d.canvas.height);
    let k = r.random_range(0..d.elements.len());
    let old = d.elements[k].bbox;
    let dynamic = if r.random_bool(0.5) {
        let n = Normal::new(0.0, params.sigma_pos * d.canvas.diagonal()).expect("positive sigma");
        let (dx, dy) = (n.sample(r), n.sample(r));
        out.elements[k].bbox = old.translate(dx, dy).clamp_into(w, h);
        Dynamic::Move { element: k, dx, dy }
    } else {
        let eps = Normal::new(0.0, params.sigma_size).expect("positive sigma").sample(r);
        let scale = eps.exp().min((w / old.width()).min(h / old.height()));
        out.elements[k].bbox = old.scale_about_center(scale).clamp_into(w, h);
        out.elements[k].refit_text();
        Dynamic::Resize { element: k, scale }
    };
    (out, dynamic)
}

/// Returns `(accepted, α, draw)`; the uniform draw is consumed every call.
pub fn accept(d_cur: f64, d_cand: f64, r: &mut Rng) -> (bool, f64, f64) {
    let alpha = (d_cand / d_cur).min(1.0);
    let draw: f64 = r.random();
    (draw <= alpha, alpha, draw)
}

pub fn refine<S: PairScorer>(d0: &Draft, scorer: &S, params: &ProposalParams) -> Result<(Draft, AdaptionTrace), AdaptError> {
    params.validate()?;
    if d0.elements.is_empty() {
        return Err(AdaptError::EmptyDraft);
    }
    let mut r = rng::seeded(params.seed);
    let anchor = scorer.encode(&Layout::from(d0));
    let mut current = d0.clone();
    let mut current_enc = anchor.clone();
    let initial = scorer.compare(&anchor, &anchor).0;
    let (mut best, mut best_score) = (d0.clone(), initial);
    let mut steps = Vec::with_capacity(params.iterations);
    for iteration in 0..params.iterations {
        let (candidate, dynamic) = propose(&current, params, &mut r);
        let cand_enc = scorer.encode(&Layout::from(&candidate));
        let (d_current, d_candidate) = scorer.compare(&current_enc, &cand_enc);
        let (accepted, alpha, draw) = accept(d_current, d_candidate, &mut r);
        let mut anchor_score = None;
        if accepted {
            let s = scorer.compare(&cand_enc, &anchor).0;
            anchor_score = Some(s);
            if s > best_score {
                best_score = s;
                best = candidate.clone();
            }
            current = candidate;
            current_enc = cand_enc;
        }
        steps.push(TraceStep { iteration, dynamic, accepted, d_current, d_candidate, alpha, draw, anchor_score });
    }
    Ok((best, AdaptionTrace { steps, initial_anchor_score: initial, final_anchor_score: best_score }))
}

/// Index of the first pictograph element.
pub fn pictograph_index(d: &Draft) -> Option<usize> {
    d.elements.iter().position(|e| matches!(e.content, Content::Pictograph(_)))
}

/// Copy of `d` with the pictograph showing `count` icons, refitted into its slot.
pub fn with_pictograph_count(d: &Draft, count: u32) -> Result<Draft, AdaptError> {
    let k = pictograph_index(d).ok_or(AdaptError::NoPictograph)?;
    let mut out = d.clone();
    let el = &mut out.elements[k];
    let Content::Pictograph(spec) = &mut el.content else { unreachable!("checked above") };
    spec.count = count;
    let aspect = spec.aspect_ratio();
    el.bbox = fit_graphic(&el.slot.unwrap_or(el.bbox), aspect);
    el.source_builtin = aspect;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PictographChoice {
    pub draft: Draft,
    pub count: u32,
    pub trace: AdaptionTrace,
    /// Round-robin wins per count, in count order.
    pub tally: Vec<(u32, usize)>,
}

/// Refines one variant per icon count and keeps the round-robin winner.
pub fn choose_pictograph_count<S: PairScorer>(
    d_template: &Draft,
    scorer: &S,
    params: &ProposalParams,
) -> Result<PictographChoice, AdaptError> {
    pictograph_index(d_template).ok_or(AdaptError::NoPictograph)?;
    let mut variants = Vec::new();
    for n in PICTOGRAPH_MIN_COUNT..=PICTOGRAPH_MAX_COUNT {
        let v = with_pictograph_count(d_template, n)?;
        let (refined, trace) = refine(&v, scorer, params)?;
        let enc = scorer.encode(&Layout::from(&refined));
        variants.push((n, refined, trace, enc));
    }
    let mut wins = vec![0usize; variants.len()];
    for i in 0..variants.len() {
        for j in i + 1..variants.len() {
            let (a, b) = scorer.compare(&variants[i].3, &variants[j].3);
            if b > a {
                wins[j] += 1;
            } else {
                wins[i] += 1;
            }
        }
    }
    let top = *wins.iter().max().expect("eight variants");
    let winner = wins.iter().position(|&w| w == top).expect("max exists");
    let tally = variants.iter().zip(&wins).map(|(v, &w)| (v.0, w)).collect();
    let (count, draft, trace, _) = variants.swap_remove(winner);
    Ok(PictographChoice { draft, count, trace, tally })
}

fn edges_x(b: &BoundingBox) -> [f64; 3] {
    [b.x_l, b.x_r, (b.x_l + b.x_r) / 2.0]
}

fn edges_y(b: &BoundingBox) -> [f64; 3] {
    [b.y_l, b.y_r, (b.y_l + b.y_r) / 2.0]
}

const ALIGNED: f64 = 1e-9;

/// Offset that aligns `edges` of a box with the matching edges of an anchor,
/// or `None` when it is already aligned or nothing is within `eps`.
fn snap_offset(own: [f64; 3], anchors: &[[f64; 3]], eps: f64) -> Option<Vec<f64>> {
    let aligned = anchors.iter().any(|a| a.iter().zip(&own).any(|(x, y)| (x - y).abs() <= ALIGNED));
    if aligned {
        return None;
    }
    let mut offsets: Vec<f64> = anchors
        .iter()
        .flat_map(|a| a.iter().zip(&own).map(|(x, y)| x - y))
        .filter(|d| d.abs() <= eps)
        .collect();
    offsets.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
    (!offsets.is_empty()).then_some(offsets)
}

/// Moves smaller elements onto nearby edges (left, right or center on x;
/// top, bottom or center on y) of larger ones.
pub fn snap_align(d: &Draft, epsilon_px: f64) -> Draft {
    let mut out = d.clone();
    let canvas = d.canvas.bounds();
    let mut order: Vec<usize> = (0..d.elements.len()).collect();
    order.sort_by(|&a, &b| d.elements[b].bbox.area().total_cmp(&d.elements[a].bbox.area()).then(a.cmp(&b)));
    for _ in 0..10 {
        let mut changed = false;
        for (rank, &i) in order.iter().enumerate() {
            let anchors: Vec<BoundingBox> = order[..rank].iter().map(|&j| out.elements[j].bbox).collect();
            if anchors.is_empty() {
                continue;
            }
            let b = out.elements[i].bbox;
            let ax: Vec<[f64; 3]> = anchors.iter().map(edges_x).collect();
            if let Some(offsets) = snap_offset(edges_x(&b), &ax, epsilon_px) {
                if let Some(dx) = offsets.into_iter().find(|dx| canvas.contains(&b.translate(*dx, 0.0), ALIGNED)) {
                    out.elements[i].bbox = b.translate(dx, 0.0);
                    changed = true;
                }
            }
            let b = out.elements[i].bbox;
            let ay: Vec<[f64; 3]> = anchors.iter().map(edges_y).collect();
            if let Some(offsets) = snap_offset(edges_y(&b), &ay, epsilon_px) {
                if let Some(dy) = offsets.into_iter().find(|dy| canvas.contains(&b.translate(0.0, *dy), ALIGNED)) {
                    out.elements[i].bbox = b.translate(0.0, dy);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    out
}

/// Scores every pair as a tie.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantScorer;

impl PairScorer for ConstantScorer {
    type Encoding = ();

    fn encode(&self, _: &Layout) {}

    fn compare(&self, _: &(), _: &()) -> (f64, f64) {
        (0.5, 0.5)
    }
}
