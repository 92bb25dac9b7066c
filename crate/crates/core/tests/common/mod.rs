//! Independent reference implementations and random instance generators
//! shared by the integration and acceptance tests.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use infogen::corpus::{Canvas, ColorSpec, DesignChoiceDistribution, ElementType, Example, ExampleLibrary, VisualElement};
use infogen::geometry::BoundingBox;
use infogen::retrieval::ElementDescriptor;
use infogen::rng::Rng;
use infogen::scorer::{Layout, LayoutElement, LayoutNode, NodeKind, PreparedLayout, ScorerModel};
use rand::Rng as _;

// ---------------------------------------------------------------- generators

pub fn random_type(r: &mut Rng) -> ElementType {
    ElementType::ALL[r.random_range(0..ElementType::ALL.len())]
}

fn grid_box(r: &mut Rng, w: f64, h: f64, cells: u32) -> BoundingBox {
    let (cw, ch) = (w / cells as f64, h / cells as f64);
    let x0 = r.random_range(0..cells);
    let y0 = r.random_range(0..cells);
    let x1 = r.random_range(x0 + 1..=cells);
    let y1 = r.random_range(y0 + 1..=cells);
    BoundingBox::new(x0 as f64 * cw, y0 as f64 * ch, x1 as f64 * cw, y1 as f64 * ch)
}

/// Boxes snapped to a coarse grid so that shared and touching edges are common.
pub fn random_layout(r: &mut Rng, max_elements: usize) -> Layout {
    let (width, height) = (400.0, 300.0);
    let n = r.random_range(1..=max_elements);
    let elements = (0..n)
        .map(|_| {
            let t = random_type(r);
            let builtin = if t.is_textual() { r.random_range(1..60) as f64 } else { r.random_range(0.3..5.0) };
            LayoutElement { element_type: t, builtin, bbox: grid_box(r, width, height, 8) }
        })
        .collect();
    Layout { width, height, elements }
}

pub fn toy_library(r: &mut Rng, max_examples: usize) -> ExampleLibrary {
    let n = r.random_range(1..=max_examples);
    let examples = (0..n)
        .map(|i| {
            let k = r.random_range(1..=5);
            let elements = (0..k)
                .map(|_| VisualElement {
                    element_type: random_type(r),
                    builtin: 1.0,
                    bbox: grid_box(r, 200.0, 200.0, 4),
                    color: ColorSpec::solid("#000000"),
                    text_style: None,
                })
                .collect();
            Example {
                id: format!("toy-{i}"),
                topic: None,
                canvas: Canvas { width: 200.0, height: 200.0, color: ColorSpec::solid("#FFFFFF") },
                elements,
            }
        })
        .collect();
    ExampleLibrary { examples }
}

pub fn random_descriptors(r: &mut Rng, max: usize) -> Vec<ElementDescriptor> {
    let n = r.random_range(0..=max);
    (0..n)
        .map(|_| {
            // few types so that same-type pairs are frequent
            let t = [ElementType::Number, ElementType::After, ElementType::Pie][r.random_range(0..3)];
            ElementDescriptor::new(t, r.random_range(1..40) as f64 / 4.0)
        })
        .collect()
}

// ---------------------------------------------------------- distribution

fn category_name(t: ElementType) -> &'static str {
    match t.name() {
        "before" | "modifier" | "number" | "after" => "semantic_segments",
        "single_icon" => "icon",
        other => other,
    }
}

/// Counts each example's category set by linear search over seen sets.
pub fn count_choices_by_hand(lib: &ExampleLibrary) -> Vec<(BTreeSet<&'static str>, usize)> {
    let mut seen: Vec<(BTreeSet<&'static str>, usize)> = Vec::new();
    for e in &lib.examples {
        let mut set = BTreeSet::new();
        for el in &e.elements {
            set.insert(category_name(el.element_type));
        }
        match seen.iter_mut().find(|(s, _)| *s == set) {
            Some(entry) => entry.1 += 1,
            None => seen.push((set, 1)),
        }
    }
    seen.sort();
    seen
}

pub fn distribution_as_sets(dist: &DesignChoiceDistribution) -> Vec<(BTreeSet<&'static str>, usize)> {
    let mut out: Vec<_> =
        dist.counts().iter().map(|(c, &n)| (c.categories().map(|k| k.name()).collect::<BTreeSet<_>>(), n)).collect();
    out.sort();
    out
}

// ---------------------------------------------------------------- distance

fn cost(a: &ElementDescriptor, q: &ElementDescriptor) -> f64 {
    if a.element_type == q.element_type {
        (a.builtin - q.builtin).abs() / q.builtin
    } else {
        1.0
    }
}

/// Minimum over every partial one-to-one matching; unmatched elements cost 1.
pub fn exhaustive_distance(index: &[ElementDescriptor], query: &[ElementDescriptor]) -> f64 {
    fn go(i: usize, index: &[ElementDescriptor], query: &[ElementDescriptor], used: &mut Vec<bool>) -> f64 {
        if i == index.len() {
            return used.iter().filter(|u| !**u).count() as f64;
        }
        let mut best = 1.0 + go(i + 1, index, query, used);
        for j in 0..query.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(cost(&index[i], &query[j]) + go(i + 1, index, query, used));
                used[j] = false;
            }
        }
        best
    }
    go(0, index, query, &mut vec![false; query.len()])
}

// ------------------------------------------------------------------- tree

type Edge = fn(&BoundingBox) -> f64;

#[derive(Debug, Clone, PartialEq)]
pub enum RefTree {
    Leaf(usize),
    Node { kind: NodeKind, cut_ratio: Option<f64>, relation: [f64; 4], left: Box<RefTree>, right: Box<RefTree> },
}

fn union_of(layout: &Layout, ids: &[usize]) -> BoundingBox {
    let mut b = layout.elements[ids[0]].bbox;
    for &i in &ids[1..] {
        let o = layout.elements[i].bbox;
        b = BoundingBox::new(b.x_l.min(o.x_l), b.y_l.min(o.y_l), b.x_r.max(o.x_r), b.y_r.max(o.y_r));
    }
    b
}

fn relation(layout: &Layout, l: &BoundingBox, r: &BoundingBox) -> [f64; 4] {
    [
        (r.x_l - l.x_l) / layout.width,
        (r.y_l - l.y_l) / layout.height,
        (r.x_r - l.x_r) / layout.width,
        (r.y_r - l.y_r) / layout.height,
    ]
}

/// Tries every element edge as a straight line along one axis and keeps the
/// partition whose clearance gap is widest (lowest gap start on ties).
fn try_lines(layout: &Layout, ids: &[usize], lo: Edge, hi: Edge) -> Option<(Vec<usize>, Vec<usize>, f64)> {
    let mut best: Option<(f64, f64, Vec<usize>, Vec<usize>)> = None;
    let mut lines: Vec<f64> = ids.iter().flat_map(|&i| [lo(&layout.elements[i].bbox), hi(&layout.elements[i].bbox)]).collect();
    lines.sort_by(f64::total_cmp);
    for &y in &lines {
        let crosses = ids.iter().any(|&i| {
            let b = &layout.elements[i].bbox;
            lo(b) < y && y < hi(b)
        });
        if crosses {
            continue;
        }
        let first: Vec<usize> = ids.iter().copied().filter(|&i| hi(&layout.elements[i].bbox) <= y).collect();
        let second: Vec<usize> = ids.iter().copied().filter(|&i| hi(&layout.elements[i].bbox) > y).collect();
        if first.is_empty() || second.is_empty() {
            continue;
        }
        let gap_lo = first.iter().map(|&i| hi(&layout.elements[i].bbox)).fold(f64::MIN, f64::max);
        let gap_hi = second.iter().map(|&i| lo(&layout.elements[i].bbox)).fold(f64::MAX, f64::min);
        let width = gap_hi - gap_lo;
        let better = match &best {
            None => true,
            Some((bw, blo, _, _)) => width > *bw || (width == *bw && gap_lo < *blo),
        };
        if better {
            best = Some((width, gap_lo, first, second));
        }
    }
    best.map(|(w, glo, a, b)| (a, b, glo + w / 2.0))
}

fn fold_key(layout: &Layout, i: usize) -> [f64; 8] {
    let e = &layout.elements[i];
    let b = e.bbox;
    [-(b.width() * b.height()), b.x_l, b.y_l, b.x_r, b.y_r, e.element_type.index() as f64, e.builtin, i as f64]
}

fn reference(layout: &Layout, ids: &[usize]) -> RefTree {
    if ids.len() == 1 {
        return RefTree::Leaf(ids[0]);
    }
    let region = union_of(layout, ids);
    let axes: [(NodeKind, Edge, Edge, f64, f64); 2] = [
        (NodeKind::Horizontal, |b| b.y_l, |b| b.y_r, region.y_l, region.y_r),
        (NodeKind::Vertical, |b| b.x_l, |b| b.x_r, region.x_l, region.x_r),
    ];
    for (kind, lo, hi, rlo, rhi) in axes {
        if let Some((a, b, cut)) = try_lines(layout, ids, lo, hi) {
            let rel = relation(layout, &union_of(layout, &a), &union_of(layout, &b));
            return RefTree::Node {
                kind,
                cut_ratio: Some((cut - rlo) / (rhi - rlo)),
                relation: rel,
                left: Box::new(reference(layout, &a)),
                right: Box::new(reference(layout, &b)),
            };
        }
    }
    // selection by smallest key, repeatedly
    let mut rest = ids.to_vec();
    let mut order = Vec::new();
    while !rest.is_empty() {
        let mut k = 0;
        for j in 1..rest.len() {
            let (a, b) = (fold_key(layout, rest[j]), fold_key(layout, rest[k]));
            if a.partial_cmp(&b) == Some(std::cmp::Ordering::Less) {
                k = j;
            }
        }
        order.push(rest.remove(k));
    }
    let mut tree = RefTree::Leaf(order[0]);
    let mut covered = vec![order[0]];
    for &i in &order[1..] {
        let rel = relation(layout, &union_of(layout, &covered), &layout.elements[i].bbox);
        tree = RefTree::Node {
            kind: NodeKind::IndivisiblePair,
            cut_ratio: None,
            relation: rel,
            left: Box::new(tree),
            right: Box::new(RefTree::Leaf(i)),
        };
        covered.push(i);
    }
    tree
}

pub fn reference_tree(layout: &Layout) -> RefTree {
    let ids: Vec<usize> = (0..layout.elements.len()).collect();
    reference(layout, &ids)
}

/// Structural equality with a small tolerance on the real-valued node fields.
pub fn same_tree(a: &LayoutNode, b: &RefTree) -> bool {
    const TOL: f64 = 1e-12;
    match b {
        RefTree::Leaf(i) => a.kind == NodeKind::Leaf && a.element == Some(*i),
        RefTree::Node { kind, cut_ratio, relation, left, right } => {
            let cut_ok = match (a.cut_ratio, cut_ratio) {
                (None, None) => true,
                (Some(x), Some(y)) => (x - y).abs() <= TOL,
                _ => false,
            };
            a.kind == *kind
                && cut_ok
                && a.relation.iter().zip(relation).all(|(x, y)| (x - y).abs() <= TOL)
                && a.children.len() == 2
                && same_tree(&a.children[0], left)
                && same_tree(&a.children[1], right)
        }
    }
}

// ---------------------------------------------------------- gradient check

pub struct GradCheck {
    pub max_rel_error: f64,
    pub checked: usize,
    pub skipped: usize,
}

/// Central differences against `loss_and_grad` on every parameter. Steps that
/// change a ReLU activation are skipped since the loss is not smooth there.
pub fn gradient_check(model: &ScorerModel, a: &Layout, b: &Layout, label: [f64; 2], step: f64) -> GradCheck {
    let (pa, pb) = (PreparedLayout::new(a), PreparedLayout::new(b));
    let mut grad = vec![0.0; model.params().len()];
    model.loss_and_grad(&pa, &pb, label, &mut grad);
    let pattern = model.activation_pattern(&pa, &pb);
    let mut m = model.clone();
    let mut out = GradCheck { max_rel_error: 0.0, checked: 0, skipped: 0 };
    for k in 0..grad.len() {
        let orig = m.params()[k];
        m.params_mut()[k] = orig + step;
        let (up, up_pattern) = (m.loss(&pa, &pb, label), m.activation_pattern(&pa, &pb));
        m.params_mut()[k] = orig - step;
        let (down, down_pattern) = (m.loss(&pa, &pb, label), m.activation_pattern(&pa, &pb));
        m.params_mut()[k] = orig;
        if up_pattern != pattern || down_pattern != pattern {
            out.skipped += 1;
            continue;
        }
        let numeric = (up - down) / (2.0 * step);
        let denom = grad[k].abs().max(numeric.abs()).max(1e-6);
        out.max_rel_error = out.max_rel_error.max((grad[k] - numeric).abs() / denom);
        out.checked += 1;
    }
    out
}

/// H = 4 model with every parameter, biases included, drawn uniformly.
pub fn random_small_model(r: &mut Rng) -> ScorerModel {
    let mut m = ScorerModel::new(4, r.random());
    for p in m.params_mut() {
        *p = r.random_range(-0.6..0.6);
    }
    m
}

pub fn random_label(r: &mut Rng) -> [f64; 2] {
    if r.random_bool(0.5) {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    }
}
