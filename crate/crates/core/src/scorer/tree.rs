//! Guillotine decomposition of a layout into a binary tree.
//!
//! A node is split by a horizontal line first (children stacked top and
//! bottom), then by a vertical line (children side by side). Among the valid
//! lines on an axis the one in the widest clearance gap wins, ties going to
//! the topmost or leftmost gap, and the line sits in the middle of the gap.
//! Elements that cannot be separated are folded into pairs of overlapping
//! nodes, largest area first.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::layout::Layout;
use crate::geometry::BoundingBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// Split by a horizontal line; the left child is the upper part.
    Horizontal,
    /// Split by a vertical line; the left child is the left part.
    Vertical,
    IndivisiblePair,
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutNode {
    pub kind: NodeKind,
    pub children: Vec<LayoutNode>,
    /// Element index for leaves.
    pub element: Option<usize>,
    /// Cut position relative to the node's extent along the cut axis.
    pub cut_ratio: Option<f64>,
    /// Offset of the right child's bounds from the left child's, divided by
    /// canvas width/height: `(dx_l, dy_l, dx_r, dy_r)`.
    pub relation: [f64; 4],
    /// Union of the boxes below this node.
    pub bounds: BoundingBox,
}

impl LayoutNode {
    fn leaf(element: usize, bounds: BoundingBox) -> Self {
        LayoutNode { kind: NodeKind::Leaf, children: vec![], element: Some(element), cut_ratio: None, relation: [0.0; 4], bounds }
    }

    fn join(kind: NodeKind, left: LayoutNode, right: LayoutNode, cut_ratio: Option<f64>, w: f64, h: f64) -> Self {
        let (l, r) = (left.bounds, right.bounds);
        let relation = [(r.x_l - l.x_l) / w, (r.y_l - l.y_l) / h, (r.x_r - l.x_r) / w, (r.y_r - l.y_r) / h];
        LayoutNode { kind, bounds: l.union(&r), children: vec![left, right], element: None, cut_ratio, relation }
    }

    /// Element indices in left-to-right leaf order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self.element {
            Some(e) => out.push(e),
            None => self.children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(LayoutNode::node_count).sum::<usize>()
    }
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Y,
}

fn span(b: &BoundingBox, axis: Axis) -> (f64, f64) {
    match axis {
        Axis::X => (b.x_l, b.x_r),
        Axis::Y => (b.y_l, b.y_r),
    }
}

/// Cut position in the widest gap between merged intervals, if any.
fn best_cut(layout: &Layout, members: &[usize], axis: Axis) -> Option<f64> {
    let mut iv: Vec<(f64, f64)> = members.iter().map(|&i| span(&layout.elements[i].bbox, axis)).collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<(f64, f64)> = None; // (gap width, cut)
    let mut reach = iv[0].1;
    for &(lo, hi) in &iv[1..] {
        if lo >= reach {
            let gap = lo - reach;
            if best.is_none_or(|(g, _)| gap > g) {
                best = Some((gap, (reach + lo) / 2.0));
            }
        }
        reach = reach.max(hi);
    }
    best.map(|(_, cut)| cut)
}

/// Deterministic fold order: larger area first, then geometry, then type.
fn fold_order(layout: &Layout, a: usize, b: usize) -> Ordering {
    let (ea, eb) = (&layout.elements[a], &layout.elements[b]);
    let key = |e: &super::layout::LayoutElement| [e.bbox.x_l, e.bbox.y_l, e.bbox.x_r, e.bbox.y_r];
    eb.bbox
        .area()
        .total_cmp(&ea.bbox.area())
        .then_with(|| {
            key(ea).iter().zip(key(eb).iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
        })
        .then_with(|| ea.element_type.cmp(&eb.element_type))
        .then_with(|| ea.builtin.total_cmp(&eb.builtin))
        .then_with(|| a.cmp(&b))
}

fn build(layout: &Layout, members: &[usize]) -> LayoutNode {
    let (w, h) = (layout.width, layout.height);
    if let [only] = members {
        return LayoutNode::leaf(*only, layout.elements[*only].bbox);
    }
    let region = BoundingBox::enclosing(members.iter().map(|&i| &layout.elements[i].bbox)).expect("non-empty");
    for (axis, kind) in [(Axis::Y, NodeKind::Horizontal), (Axis::X, NodeKind::Vertical)] {
        if let Some(cut) = best_cut(layout, members, axis) {
            let (first, second): (Vec<usize>, Vec<usize>) =
                members.iter().partition(|&&i| span(&layout.elements[i].bbox, axis).1 <= cut);
            let (lo, hi) = span(&region, axis);
            let ratio = (cut - lo) / (hi - lo);
            return LayoutNode::join(kind, build(layout, &first), build(layout, &second), Some(ratio), w, h);
        }
    }
    let mut order = members.to_vec();
    order.sort_by(|&a, &b| fold_order(layout, a, b));
    let mut node = LayoutNode::leaf(order[0], layout.elements[order[0]].bbox);
    for &i in &order[1..] {
        let leaf = LayoutNode::leaf(i, layout.elements[i].bbox);
        node = LayoutNode::join(NodeKind::IndivisiblePair, node, leaf, None, w, h);
    }
    node
}

pub fn build_tree(layout: &Layout) -> LayoutNode {
    assert!(!layout.elements.is_empty(), "layout has no elements");
    let all: Vec<usize> = (0..layout.elements.len()).collect();
    build(layout, &all)
}
