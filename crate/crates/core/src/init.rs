//! Transfers a retrieved example's design onto the query content.

use serde::{Deserialize, Serialize};

use crate::assets::{ChartSpec, IconAsset, IconLibrary, PictographSpec, PICTOGRAPH_MAX_COUNT, PICTOGRAPH_MIN_COUNT};
use crate::corpus::{Canvas, ColorSpec, DesignChoice, ElementType, Example, TextStyle};
use crate::geometry::BoundingBox;
use crate::retrieval::{self, Binding, ElementDescriptor, Query};
use crate::text::METRICS;

/// Concrete content of a draft element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Content {
    Text { text: String, style: TextStyle, font_size_px: u32 },
    Icon(IconAsset),
    Chart(ChartSpec),
    Pictograph(PictographSpec),
}

impl Content {
    /// Aspect ratio of graphical content; `None` for text.
    pub fn aspect_ratio(&self) -> Option<f64> {
        match self {
            Content::Text { .. } => None,
            Content::Icon(i) => Some(i.aspect_ratio),
            Content::Chart(c) => Some(c.aspect_ratio),
            Content::Pictograph(p) => Some(p.aspect_ratio()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DraftElement {
    #[serde(rename = "type")]
    pub element_type: ElementType,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub color: ColorSpec,
    pub content: Content,
    pub source_builtin: f64,
    /// Space the element was allotted at initialization.
    #[serde(default)]
    pub slot: Option<BoundingBox>,
}

impl DraftElement {
    /// Re-fits the font size of a text element to its current box.
    pub fn refit_text(&mut self) {
        if let Content::Text { text, style, font_size_px } = &mut self.content {
            *font_size_px = METRICS.fit_font(&self.bbox, text, style);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub example_id: String,
    #[serde(default)]
    pub choice: Option<DesignChoice>,
    #[serde(default)]
    pub distance: Option<f64>,
    /// Draft element indices that had no counterpart in the example.
    #[serde(default)]
    pub unmatched: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Draft {
    pub canvas: Canvas,
    pub elements: Vec<DraftElement>,
    pub provenance: Provenance,
}

impl Draft {
    pub fn all_inside(&self, tol: f64) -> bool {
        let c = self.canvas.bounds();
        self.elements.iter().all(|e| e.bbox.is_valid() && c.contains(&e.bbox, tol))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("drafts serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Draft> {
        serde_json::from_str(s)
    }

    /// Draft that reproduces an example's layout with placeholder content of
    /// matching length and aspect.
    pub fn from_example(e: &Example) -> Draft {
        let icons = IconLibrary::bundled();
        let elements = e
            .elements
            .iter()
            .map(|el| {
                let content = match el.element_type {
                    t if t.is_textual() => {
                        let style = el.text_style.clone().unwrap_or_default();
                        let text = placeholder_text(t, el.builtin.round().max(1.0) as usize);
                        let font_size_px = METRICS.fit_font(&el.bbox, &text, &style);
                        Content::Text { text, style, font_size_px }
                    }
                    ElementType::SingleIcon => Content::Icon(IconAsset { aspect_ratio: el.builtin, ..icons.fallback() }),
                    ElementType::Pie => Content::Chart(ChartSpec::pie(0.5)),
                    ElementType::Donut => Content::Chart(ChartSpec::donut(0.5)),
                    ElementType::Bar => Content::Chart(ChartSpec::bar(0.5, el.builtin)),
                    _ => {
                        let icon = icons.fallback();
                        let count = (el.builtin / icon.aspect_ratio)
                            .round()
                            .clamp(PICTOGRAPH_MIN_COUNT as f64, PICTOGRAPH_MAX_COUNT as f64)
                            as u32;
                        Content::Pictograph(PictographSpec { icon, count, percentage: 0.5 })
                    }
                };
                DraftElement {
                    element_type: el.element_type,
                    bbox: el.bbox,
                    color: el.color.clone(),
                    content,
                    source_builtin: el.builtin,
                    slot: Some(el.bbox),
                }
            })
            .collect();
        Draft {
            canvas: e.canvas.clone(),
            elements,
            provenance: Provenance { example_id: e.id.clone(), ..Provenance::default() },
        }
    }
}

fn placeholder_text(t: ElementType, n: usize) -> String {
    const WORDS: &str = "lorem ipsum dolor sit amet consectetur adipiscing elit sed do eiusmod tempor ";
    let source = if t == ElementType::Number { "1234567890" } else { WORDS };
    let mut s: String = source.chars().cycle().take(n).collect();
    if s.ends_with(' ') {
        s.pop();
        s.push('s');
    }
    s
}

/// Largest box of aspect `new_aspect` inside `old`, sharing its top-left corner.
pub fn fit_graphic(old: &BoundingBox, new_aspect: f64) -> BoundingBox {
    let (w, h) = (old.width(), old.height());
    if h * new_aspect <= w {
        BoundingBox::from_origin(old.x_l, old.y_l, h * new_aspect, h)
    } else {
        BoundingBox::from_origin(old.x_l, old.y_l, w, w / new_aspect)
    }
}

pub fn fit_font(bbox: &BoundingBox, text: &str, style: &TextStyle) -> u32 {
    METRICS.fit_font(bbox, text, style)
}

/// Largest axis-aligned rectangle inside the canvas that overlaps none of
/// `occupied`. Candidate edges are the canvas and box edges.
pub fn largest_empty_rect(width: f64, height: f64, occupied: &[BoundingBox]) -> Option<BoundingBox> {
    let mut xs = vec![0.0, width];
    let mut ys = vec![0.0, height];
    for b in occupied {
        xs.extend([b.x_l.clamp(0.0, width), b.x_r.clamp(0.0, width)]);
        ys.extend([b.y_l.clamp(0.0, height), b.y_r.clamp(0.0, height)]);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let mut best: Option<BoundingBox> = None;
    for (i, &x1) in xs.iter().enumerate() {
        for &x2 in &xs[i + 1..] {
            for (j, &y1) in ys.iter().enumerate() {
                for &y2 in &ys[j + 1..] {
                    let r = BoundingBox::new(x1, y1, x2, y2);
                    if best.is_some_and(|b| r.area() <= b.area()) {
                        continue;
                    }
                    if occupied.iter().all(|o| !o.overlaps(&r)) {
                        best = Some(r);
                    }
                }
            }
        }
    }
    best
}

const DEFAULT_TEXT_COLOR: &str = "#333333";

fn content_for(binding: &Binding, style: TextStyle, bbox: &BoundingBox) -> Content {
    match binding {
        Binding::Text(text) => {
            let font_size_px = METRICS.fit_font(bbox, text, &style);
            Content::Text { text: text.clone(), style, font_size_px }
        }
        Binding::Icon(i) => Content::Icon(i.clone()),
        Binding::Chart(c) => Content::Chart(*c),
        Binding::Pictograph(p) => Content::Pictograph(p.clone()),
    }
}

fn place(binding: &Binding, slot: &BoundingBox) -> BoundingBox {
    match binding {
        Binding::Text(_) => *slot,
        g => fit_graphic(slot, g.builtin()),
    }
}

/// Initial draft for `q` laid out like `example`.
pub fn initialize(example: &Example, q: &Query) -> Draft {
    let index: Vec<ElementDescriptor> =
        example.elements.iter().map(|e| ElementDescriptor::new(e.element_type, e.builtin)).collect();
    let m = retrieval::match_descriptors(&index, &q.descriptors());

    let mut matched: Vec<(usize, usize)> = m.pairs.clone();
    matched.sort_unstable();
    let mut elements = Vec::with_capacity(q.elements.len());
    for &(i, j) in &matched {
        let ex = &example.elements[i];
        let qe = &q.elements[j];
        let style = ex.text_style.clone().unwrap_or_default();
        let bbox = place(&qe.binding, &ex.bbox);
        elements.push(DraftElement {
            element_type: qe.descriptor.element_type,
            bbox,
            color: ex.color.clone(),
            content: content_for(&qe.binding, style, &bbox),
            source_builtin: qe.descriptor.builtin,
            slot: Some(ex.bbox),
        });
    }

    let mut unmatched = Vec::new();
    for &j in &m.unmatched_query {
        let qe = &q.elements[j];
        let occupied: Vec<BoundingBox> = elements.iter().map(|e| e.bbox).collect();
        let slot = largest_empty_rect(example.canvas.width, example.canvas.height, &occupied)
            .unwrap_or_else(|| example.canvas.bounds());
        let textual = qe.descriptor.element_type.is_textual();
        let donor = example
            .elements
            .iter()
            .find(|e| e.element_type.is_textual() == textual)
            .or_else(|| example.elements.first());
        let color = donor.map(|d| d.color.clone()).unwrap_or_else(|| ColorSpec::solid(DEFAULT_TEXT_COLOR));
        let style = donor.and_then(|d| d.text_style.clone()).unwrap_or_default();
        let bbox = place(&qe.binding, &slot);
        unmatched.push(elements.len());
        elements.push(DraftElement {
            element_type: qe.descriptor.element_type,
            bbox,
            color,
            content: content_for(&qe.binding, style, &bbox),
            source_builtin: qe.descriptor.builtin,
            slot: Some(slot),
        });
    }

    Draft {
        canvas: example.canvas.clone(),
        elements,
        provenance: Provenance {
            example_id: example.id.clone(),
            choice: Some(q.choice.clone()),
            distance: Some(m.cost),
            unmatched,
        },
    }
}
