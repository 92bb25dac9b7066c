//! Recursive feature extractor and pairwise scorer with hand-written
//! reverse-mode gradients.
//!
//! All parameters live in one flat vector. Its order is the on-disk order:
//! the box, horizontal, vertical and overlap layers (each `W1, b1, W2, b2`),
//! then the head's hidden layer `(W, b)` and output layer `(W, b)`. Weight
//! matrices are row-major with one row per output unit.

use rand::Rng as _;
use serde::Serialize;

use super::layout::Layout;
use super::tree::{build_tree, LayoutNode, NodeKind};
use crate::corpus::ElementType;
use crate::rng;

pub const BOX_INPUT: usize = 15;
pub const LAYER_NAMES: [&str; 4] = ["box", "horizontal", "vertical", "overlap"];

/// Scaled builtin attribute fed to the box layer.
pub fn scale_builtin(t: ElementType, builtin: f64) -> f64 {
    if t.is_textual() {
        (1.0 + builtin).ln() / 101f64.ln()
    } else {
        builtin.clamp(0.1, 10.0).ln() / 10f64.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Mlp {
    input: usize,
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Shape {
    hidden: usize,
    layers: [Mlp; 4],
    fc_w: usize,
    fc_b: usize,
    out_w: usize,
    out_b: usize,
    len: usize,
}

impl Shape {
    fn new(h: usize) -> Shape {
        let mut at = 0;
        let mut take = |n: usize| {
            let o = at;
            at += n;
            o
        };
        let mut layer = |input: usize| Mlp { input, w1: take(h * input), b1: take(h), w2: take(h * h), b2: take(h) };
        let layers = [layer(BOX_INPUT), layer(2 * h + 5), layer(2 * h + 5), layer(2 * h + 5)];
        let fc_w = take(2 * h * h);
        let fc_b = take(h);
        let out_w = take(2 * h);
        let out_b = take(2);
        Shape { hidden: h, layers, fc_w, fc_b, out_w, out_b, len: at }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScorerModel {
    shape: Shape,
    params: Vec<f64>,
}

/// Name and extent of a contiguous parameter block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

impl ScorerModel {
    pub fn param_count(hidden: usize) -> usize {
        Shape::new(hidden).len
    }

    /// He-uniform weights and zero biases.
    pub fn new(hidden: usize, seed: u64) -> ScorerModel {
        assert!(hidden >= 1);
        let shape = Shape::new(hidden);
        let mut params = vec![0.0; shape.len];
        let mut r = rng::seeded(seed);
        let mut fill = |offset: usize, fan_in: usize, fan_out: usize, params: &mut Vec<f64>| {
            let limit = (6.0 / fan_in as f64).sqrt();
            for p in &mut params[offset..offset + fan_in * fan_out] {
                *p = r.random_range(-limit..limit);
            }
        };
        for l in shape.layers {
            fill(l.w1, l.input, hidden, &mut params);
            fill(l.w2, hidden, hidden, &mut params);
        }
        fill(shape.fc_w, 2 * hidden, hidden, &mut params);
        fill(shape.out_w, hidden, 2, &mut params);
        ScorerModel { shape, params }
    }

    pub fn zeros(hidden: usize) -> ScorerModel {
        let shape = Shape::new(hidden);
        ScorerModel { shape, params: vec![0.0; shape.len] }
    }

    pub fn from_params(hidden: usize, params: Vec<f64>) -> Option<ScorerModel> {
        let shape = Shape::new(hidden);
        (params.len() == shape.len).then_some(ScorerModel { shape, params })
    }

    pub fn hidden(&self) -> usize {
        self.shape.hidden
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    pub fn blocks(&self) -> Vec<Block> {
        let s = &self.shape;
        let h = s.hidden;
        let mut out = Vec::new();
        for (name, l) in LAYER_NAMES.iter().zip(&s.layers) {
            out.push(Block { name: format!("{name}.w1"), offset: l.w1, len: h * l.input });
            out.push(Block { name: format!("{name}.b1"), offset: l.b1, len: h });
            out.push(Block { name: format!("{name}.w2"), offset: l.w2, len: h * h });
            out.push(Block { name: format!("{name}.b2"), offset: l.b2, len: h });
        }
        out.push(Block { name: "head.fc.w".into(), offset: s.fc_w, len: 2 * h * h });
        out.push(Block { name: "head.fc.b".into(), offset: s.fc_b, len: h });
        out.push(Block { name: "head.out.w".into(), offset: s.out_w, len: 2 * h });
        out.push(Block { name: "head.out.b".into(), offset: s.out_b, len: 2 });
        out
    }

    pub fn extract_features(&self, layout: &Layout) -> Vec<f64> {
        self.encode(&PreparedLayout::new(layout))
    }

    /// Root feature vector of a prepared layout.
    pub fn encode(&self, p: &PreparedLayout) -> Vec<f64> {
        let mut trace = Trace::default();
        self.forward_tree(p, &mut trace);
        trace.outputs.pop().expect("root")
    }

    /// Softmax probabilities `(d_a, d_b)` from two root vectors.
    pub fn compare(&self, fa: &[f64], fb: &[f64]) -> (f64, f64) {
        let mut input = Vec::with_capacity(fa.len() * 2);
        input.extend_from_slice(fa);
        input.extend_from_slice(fb);
        let head = self.forward_head(&input);
        (head.probs[0], head.probs[1])
    }

    pub fn score_pair(&self, a: &Layout, b: &Layout) -> (f64, f64) {
        self.compare(&self.extract_features(a), &self.extract_features(b))
    }

    fn forward_tree(&self, p: &PreparedLayout, t: &mut Trace) {
        let h = self.shape.hidden;
        t.inputs.clear();
        t.hidden.clear();
        t.outputs.clear();
        for node in &p.nodes {
            let x = match &node.children {
                None => node.extra.clone(),
                Some((l, r)) => {
                    let mut x = Vec::with_capacity(2 * h + 5);
                    x.extend_from_slice(&t.outputs[*l]);
                    x.extend_from_slice(&t.outputs[*r]);
                    x.extend_from_slice(&node.extra);
                    x
                }
            };
            let l = &self.shape.layers[node.layer];
            let mut a1 = affine(&self.params, l.w1, l.b1, h, &x);
            a1.iter_mut().for_each(|v| *v = v.max(0.0));
            let out = affine(&self.params, l.w2, l.b2, h, &a1);
            t.inputs.push(x);
            t.hidden.push(a1);
            t.outputs.push(out);
        }
    }

    fn forward_head(&self, input: &[f64]) -> HeadTrace {
        let s = &self.shape;
        let mut hidden = affine(&self.params, s.fc_w, s.fc_b, s.hidden, input);
        hidden.iter_mut().for_each(|v| *v = v.max(0.0));
        let logits = affine(&self.params, s.out_w, s.out_b, 2, &hidden);
        let m = logits[0].max(logits[1]);
        let e = [(logits[0] - m).exp(), (logits[1] - m).exp()];
        let z = e[0] + e[1];
        HeadTrace { input: input.to_vec(), hidden, probs: [e[0] / z, e[1] / z] }
    }

    /// Cross-entropy of one pair; adds its gradient into `grad`.
    pub fn loss_and_grad(&self, a: &PreparedLayout, b: &PreparedLayout, label: [f64; 2], grad: &mut [f64]) -> f64 {
        let h = self.shape.hidden;
        let (mut ta, mut tb) = (Trace::default(), Trace::default());
        self.forward_tree(a, &mut ta);
        self.forward_tree(b, &mut tb);
        let mut input = ta.outputs.last().expect("root").clone();
        input.extend_from_slice(tb.outputs.last().expect("root"));
        let head = self.forward_head(&input);
        let loss = cross_entropy(head.probs, label);

        let s = &self.shape;
        let dlogits = [head.probs[0] - label[0], head.probs[1] - label[1]];
        let dhidden = affine_backward(&self.params, grad, s.out_w, s.out_b, h, &head.hidden, &dlogits);
        let dz: Vec<f64> = dhidden.iter().zip(&head.hidden).map(|(d, a)| if *a > 0.0 { *d } else { 0.0 }).collect();
        let dinput = affine_backward(&self.params, grad, s.fc_w, s.fc_b, 2 * h, &head.input, &dz);
        self.backward_tree(a, &ta, &dinput[..h], grad);
        self.backward_tree(b, &tb, &dinput[h..], grad);
        loss
    }

    pub fn loss(&self, a: &PreparedLayout, b: &PreparedLayout, label: [f64; 2]) -> f64 {
        let (pa, pb) = self.compare(&self.encode(a), &self.encode(b));
        cross_entropy([pa, pb], label)
    }

    fn backward_tree(&self, p: &PreparedLayout, t: &Trace, droot: &[f64], grad: &mut [f64]) {
        let h = self.shape.hidden;
        let mut douts: Vec<Vec<f64>> = vec![vec![0.0; h]; p.nodes.len()];
        douts.last_mut().expect("root").copy_from_slice(droot);
        for k in (0..p.nodes.len()).rev() {
            let node = &p.nodes[k];
            let l = &self.shape.layers[node.layer];
            let dout = std::mem::take(&mut douts[k]);
            let da1 = affine_backward(&self.params, grad, l.w2, l.b2, h, &t.hidden[k], &dout);
            let dz1: Vec<f64> = da1.iter().zip(&t.hidden[k]).map(|(d, a)| if *a > 0.0 { *d } else { 0.0 }).collect();
            let dx = affine_backward(&self.params, grad, l.w1, l.b1, l.input, &t.inputs[k], &dz1);
            if let Some((left, right)) = node.children {
                douts[left].iter_mut().zip(&dx[..h]).for_each(|(g, d)| *g += d);
                douts[right].iter_mut().zip(&dx[h..2 * h]).for_each(|(g, d)| *g += d);
            }
        }
    }

    /// Signs of every hidden pre-activation for a pair; used to detect ReLU
    /// kinks when comparing against finite differences.
    pub fn activation_pattern(&self, a: &PreparedLayout, b: &PreparedLayout) -> Vec<bool> {
        let (mut ta, mut tb) = (Trace::default(), Trace::default());
        self.forward_tree(a, &mut ta);
        self.forward_tree(b, &mut tb);
        let mut input = ta.outputs.last().expect("root").clone();
        input.extend_from_slice(tb.outputs.last().expect("root"));
        let head = self.forward_head(&input);
        ta.hidden.iter().chain(&tb.hidden).chain(std::iter::once(&head.hidden)).flatten().map(|v| *v > 0.0).collect()
    }
}

pub fn cross_entropy(probs: [f64; 2], label: [f64; 2]) -> f64 {
    -(label[0] * probs[0].max(f64::MIN_POSITIVE).ln() + label[1] * probs[1].max(f64::MIN_POSITIVE).ln())
}

/// `W x + b` with `W` stored row-major at `w` with `rows × x.len()` entries.
fn affine(params: &[f64], w: usize, b: usize, rows: usize, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..rows)
        .map(|r| {
            let row = &params[w + r * n..w + (r + 1) * n];
            params[b + r] + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
        })
        .collect()
}

/// Accumulates `dW += dy xᵀ`, `db += dy` and returns `Wᵀ dy`.
fn affine_backward(params: &[f64], grad: &mut [f64], w: usize, b: usize, n: usize, x: &[f64], dy: &[f64]) -> Vec<f64> {
    let mut dx = vec![0.0; n];
    for (r, &g) in dy.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        grad[b + r] += g;
        let row = w + r * n;
        for c in 0..n {
            grad[row + c] += g * x[c];
            dx[c] += params[row + c] * g;
        }
    }
    dx
}

#[derive(Default)]
struct Trace {
    inputs: Vec<Vec<f64>>,
    hidden: Vec<Vec<f64>>,
    outputs: Vec<Vec<f64>>,
}

struct HeadTrace {
    input: Vec<f64>,
    hidden: Vec<f64>,
    probs: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
struct PreparedNode {
    layer: usize,
    children: Option<(usize, usize)>,
    /// Leaf input, or relation plus cut ratio for composites.
    extra: Vec<f64>,
}

/// A layout's tree flattened in post-order with its fixed inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedLayout {
    nodes: Vec<PreparedNode>,
}

impl PreparedLayout {
    pub fn new(layout: &Layout) -> Self {
        Self::from_tree(layout, &build_tree(layout))
    }

    pub fn from_tree(layout: &Layout, tree: &LayoutNode) -> Self {
        let mut nodes = Vec::with_capacity(tree.node_count());
        flatten(layout, tree, &mut nodes);
        PreparedLayout { nodes }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

fn flatten(layout: &Layout, node: &LayoutNode, out: &mut Vec<PreparedNode>) -> usize {
    let prepared = match node.kind {
        NodeKind::Leaf => {
            let e = &layout.elements[node.element.expect("leaf element")];
            let mut x = vec![0.0; BOX_INPUT];
            x[e.element_type.index()] = 1.0;
            x[10] = e.bbox.x_l / layout.width;
            x[11] = e.bbox.y_l / layout.height;
            x[12] = e.bbox.x_r / layout.width;
            x[13] = e.bbox.y_r / layout.height;
            x[14] = scale_builtin(e.element_type, e.builtin);
            PreparedNode { layer: 0, children: None, extra: x }
        }
        kind => {
            let l = flatten(layout, &node.children[0], out);
            let r = flatten(layout, &node.children[1], out);
            let layer = match kind {
                NodeKind::Horizontal => 1,
                NodeKind::Vertical => 2,
                _ => 3,
            };
            let mut extra = node.relation.to_vec();
            extra.push(node.cut_ratio.unwrap_or(0.0));
            PreparedNode { layer, children: Some((l, r)), extra }
        }
    };
    out.push(prepared);
    out.len() - 1
}
