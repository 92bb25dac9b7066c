//! Deterministic synthetic example library.
//!
//! Layouts come from a fixed set of grid templates: elements are stacked in
//! rows and columns with one margin and one gap per example, aligned on shared
//! edges, and never overlap. Text boxes are sized for their character count
//! under the crate's text metric model.

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{Canvas, ColorSpec, ElementType, Example, ExampleLibrary, TextStyle, VisualElement};
use crate::assets::IconLibrary;
use crate::geometry::BoundingBox;
use crate::rng::{self, Rng};
use crate::text::METRICS;

const PALETTES: [[&str; 4]; 8] = [
    ["#FFFFFF", "#1F2937", "#EF4444", "#374151"],
    ["#0F172A", "#F8FAFC", "#38BDF8", "#E2E8F0"],
    ["#FEF3C7", "#78350F", "#F59E0B", "#92400E"],
    ["#ECFDF5", "#064E3B", "#10B981", "#065F46"],
    ["#F5F3FF", "#3B0764", "#8B5CF6", "#4C1D95"],
    ["#FFF1F2", "#881337", "#F43F5E", "#9F1239"],
    ["#F0F9FF", "#0C4A6E", "#0EA5E9", "#075985"],
    ["#FAFAFA", "#262626", "#F97316", "#404040"],
];

const FONTS: [&str; 7] = ["Montserrat", "Roboto", "Lato", "Open Sans", "Oswald", "Georgia", "Playfair Display"];

const TOPICS: [&str; 10] = [
    "education", "health", "commerce", "ecology", "diet", "sports", "animals", "wedding", "technology", "medical",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Template {
    DonutIconNumberAfter,
    PictographNumberAfter,
    StatementPieIcon,
    IconNumberAfter,
    StatementBar,
    SegmentsBar,
    StatementPictograph,
    ModifierNumberAfterPie,
    StatementDonut,
    SegmentsIconBar,
    StatementOnly,
    NumberDonutAfter,
}

const TEMPLATES: [(Template, u32); 12] = [
    (Template::DonutIconNumberAfter, 12),
    (Template::PictographNumberAfter, 8),
    (Template::StatementPieIcon, 8),
    (Template::IconNumberAfter, 10),
    (Template::StatementBar, 6),
    (Template::SegmentsBar, 5),
    (Template::StatementPictograph, 5),
    (Template::ModifierNumberAfterPie, 6),
    (Template::StatementDonut, 5),
    (Template::SegmentsIconBar, 4),
    (Template::StatementOnly, 3),
    (Template::NumberDonutAfter, 6),
];

struct Builder<'r> {
    rng: &'r mut Rng,
    palette: [&'static str; 4],
    font: &'static str,
    margin: f64,
    gap: f64,
    elements: Vec<VisualElement>,
}

impl Builder<'_> {
    fn pick<T: Copy>(&mut self, options: &[T]) -> T {
        options[self.rng.random_range(0..options.len())]
    }

    fn chars(&mut self, t: ElementType) -> usize {
        match t {
            ElementType::Number => self.pick(&[3, 3, 3, 4, 4, 6]),
            ElementType::Modifier => self.pick(&[4, 5, 6, 8, 9]),
            ElementType::Before => self.rng.random_range(12..=32),
            ElementType::After => self.rng.random_range(16..=56),
            ElementType::Statement => self.rng.random_range(28..=88),
            _ => unreachable!("graphical type"),
        }
    }

    /// Box size for `n` characters at `font`, wrapped to `max_width`.
    fn text_size(&self, n: usize, font: f64, max_width: f64, bold: bool) -> (f64, f64) {
        let adv = METRICS.advance * font * if bold { METRICS.bold_factor } else { 1.0 };
        let per_line = ((max_width / adv).floor() as usize).max(1);
        let lines = n.div_ceil(per_line);
        let w = (n.min(per_line) as f64 * adv).ceil();
        let h = (lines as f64 * METRICS.line_height * font).ceil();
        (w, h)
    }

    /// Adds a text element with its top-left at (x, y); returns its box.
    fn text(&mut self, t: ElementType, font: f64, x: f64, y: f64, max_width: f64) -> BoundingBox {
        let n = self.chars(t);
        let bold = t == ElementType::Number || self.rng.random_bool(0.2);
        let italic = t != ElementType::Number && self.rng.random_bool(0.1);
        let (w, h) = self.text_size(n, font, max_width, bold);
        let bbox = BoundingBox::from_origin(x, y, w, h);
        let color = if t == ElementType::Number { self.palette[2] } else { self.palette[1] };
        self.elements.push(VisualElement {
            element_type: t,
            builtin: n as f64,
            bbox,
            color: ColorSpec::solid(color),
            text_style: Some(TextStyle { font_family: self.font.to_string(), bold, italic }),
        });
        bbox
    }

    fn graphic(&mut self, t: ElementType, bbox: BoundingBox) -> BoundingBox {
        let color = match t {
            ElementType::SingleIcon | ElementType::Pictograph => ColorSpec::with_outline(self.palette[2], self.palette[3]),
            _ => ColorSpec::solid(self.palette[2]),
        };
        self.elements.push(VisualElement { element_type: t, builtin: bbox.aspect(), bbox, color, text_style: None });
        bbox
    }

    fn icon_aspect(&mut self) -> f64 {
        let icons = IconLibrary::bundled();
        let names: Vec<&str> = icons.names().collect();
        let name = self.pick(&names);
        icons.get(name).expect("listed").aspect_ratio
    }

    /// Icon of the given height at (x, y).
    fn icon(&mut self, x: f64, y: f64, height: f64) -> BoundingBox {
        let a = self.icon_aspect();
        self.graphic(ElementType::SingleIcon, BoundingBox::from_origin(x, y, (height * a).round(), height))
    }

    fn square(&mut self, t: ElementType, x: f64, y: f64, size: f64) -> BoundingBox {
        self.graphic(t, BoundingBox::from_origin(x, y, size, size))
    }

    fn bar(&mut self, x: f64, y: f64, width: f64) -> BoundingBox {
        let aspect: f64 = self.pick(&[6.0, 8.0, 10.0, 12.0]);
        let h = (width / aspect).round().max(8.0);
        self.graphic(ElementType::Bar, BoundingBox::from_origin(x, y, width, h))
    }

    /// Row of icons at most `width` wide and `max_height` tall.
    fn pictograph(&mut self, x: f64, y: f64, width: f64, max_height: f64) -> BoundingBox {
        let count = self.rng.random_range(5..=10) as f64;
        let a = self.icon_aspect() * count;
        let mut h = (width / a).floor().min(max_height);
        let mut w = (h * a).round();
        if w > width {
            w = width;
            h = (w / a).floor();
        }
        self.graphic(ElementType::Pictograph, BoundingBox::from_origin(x, y, w, h))
    }

    fn centered(&self, canvas_w: f64, w: f64) -> f64 {
        ((canvas_w - w) / 2.0).floor()
    }
}

fn build(template: Template, b: &mut Builder<'_>) -> (f64, f64) {
    use ElementType::*;
    let (m, g) = (b.margin, b.gap);
    let number_font: f64 = b.pick(&[48.0, 56.0, 64.0]);
    let body_font: f64 = b.pick(&[16.0, 18.0, 20.0, 22.0]);
    match template {
        Template::DonutIconNumberAfter => {
            let w: f64 = b.pick(&[600.0, 640.0]);
            let s: f64 = b.pick(&[160.0, 180.0, 200.0]);
            b.square(Donut, m, m, s);
            let x1 = m + s + g;
            let col = w - m - x1;
            let icon = b.icon(x1, m, 56.0);
            let num = b.text(Number, number_font, x1, icon.y_r + g, col);
            let after = b.text(After, body_font, x1, num.y_r + g, col);
            (w, m + s.max(after.y_r - m) + m)
        }
        Template::PictographNumberAfter => {
            let w: f64 = b.pick(&[560.0, 600.0]);
            let num = b.text(Number, number_font, m, m, 240.0);
            let x = num.x_r + g;
            let after = b.text(After, body_font, x, m, w - m - x);
            let y = num.y_r.max(after.y_r) + g;
            let p = b.pictograph(m, y, w - 2.0 * m, 100.0);
            (w, p.y_r + m)
        }
        Template::StatementPieIcon => {
            let w: f64 = b.pick(&[400.0, 440.0]);
            let s = (w - 2.0 * m).min(200.0);
            let pie = b.square(Pie, b.centered(w, s), m, s);
            let icon = b.icon(m, pie.y_r + g, 64.0);
            let x = icon.x_r + g;
            let st = b.text(Statement, body_font, x, pie.y_r + g, w - m - x);
            (w, icon.y_r.max(st.y_r) + m)
        }
        Template::IconNumberAfter => {
            let w: f64 = b.pick(&[500.0, 540.0]);
            let ih: f64 = b.pick(&[120.0, 140.0, 160.0]);
            let icon = b.icon(m, m, ih);
            let x1 = icon.x_r + g;
            let col = w - m - x1;
            let num = b.text(Number, number_font, x1, m, col);
            let after = b.text(After, body_font, x1, num.y_r + g, col);
            (w, icon.y_r.max(after.y_r) + m)
        }
        Template::StatementBar => {
            let w = 600.0;
            let st = b.text(Statement, body_font + 4.0, m, m, w - 2.0 * m);
            let bar = b.bar(m, st.y_r + g, w - 2.0 * m);
            (w, bar.y_r + m)
        }
        Template::SegmentsBar => {
            let w = 600.0;
            let cw = w - 2.0 * m;
            let before = b.text(Before, body_font, m, m, cw);
            let y2 = before.y_r + g;
            let (mw, mh) = {
                let n_font = body_font + 6.0;
                let bx = b.text(Modifier, n_font, m, y2, 200.0);
                (bx.width(), bx.height())
            };
            let num = b.text(Number, number_font, m + mw + g, y2, 260.0);
            // bottom-align the modifier with the number
            let shift = (num.height() - mh).max(0.0);
            let modifier = b.elements.len() - 2;
            b.elements[modifier].bbox = b.elements[modifier].bbox.translate(0.0, shift);
            let after = b.text(After, body_font, m, num.y_r + g, cw);
            let bar = b.bar(m, after.y_r + g, cw);
            (w, bar.y_r + m)
        }
        Template::StatementPictograph => {
            let w = 600.0;
            let st = b.text(Statement, body_font + 2.0, m, m, w - 2.0 * m);
            let p = b.pictograph(m, st.y_r + g, w - 2.0 * m, 90.0);
            (w, p.y_r + m)
        }
        Template::ModifierNumberAfterPie => {
            let w = 560.0;
            let s: f64 = b.pick(&[160.0, 180.0, 200.0]);
            b.square(Pie, m, m, s);
            let x1 = m + s + g;
            let col = w - m - x1;
            let md = b.text(Modifier, body_font + 4.0, x1, m, col);
            let num = b.text(Number, number_font, x1, md.y_r + g, col);
            let after = b.text(After, body_font, x1, num.y_r + g, col);
            (w, m + s.max(after.y_r - m) + m)
        }
        Template::StatementDonut => {
            let w: f64 = b.pick(&[320.0, 360.0]);
            let s = w - 2.0 * m - 40.0;
            let donut = b.square(Donut, b.centered(w, s), m, s);
            let idx = b.elements.len();
            let st = b.text(Statement, body_font, m, donut.y_r + g, w - 2.0 * m);
            let x = b.centered(w, st.width());
            b.elements[idx].bbox = st.translate(x - m, 0.0);
            (w, st.y_r + m)
        }
        Template::SegmentsIconBar => {
            let w = 600.0;
            let icon = b.icon(m, m, 150.0);
            let x1 = icon.x_r + g;
            let col = w - m - x1;
            let before = b.text(Before, body_font, x1, m, col);
            let num = b.text(Number, number_font, x1, before.y_r + g, col);
            let after = b.text(After, body_font, x1, num.y_r + g, col);
            let bar = b.bar(m, icon.y_r.max(after.y_r) + g, w - 2.0 * m);
            (w, bar.y_r + m)
        }
        Template::StatementOnly => {
            let w = 500.0;
            let idx = b.elements.len();
            let font: f64 = b.pick(&[28.0, 32.0, 36.0]);
            let st = b.text(Statement, font, m, m, w - 2.0 * m);
            let x = b.centered(w, st.width());
            b.elements[idx].bbox = st.translate(x - m, 0.0);
            (w, st.y_r + m)
        }
        Template::NumberDonutAfter => {
            let w = 400.0;
            let i_num = b.elements.len();
            let num = b.text(Number, number_font, m, m, w - 2.0 * m);
            b.elements[i_num].bbox = num.translate(b.centered(w, num.width()) - m, 0.0);
            let s = 180.0;
            let donut = b.square(Donut, b.centered(w, s), num.y_r + g, s);
            let i_after = b.elements.len();
            let after = b.text(After, body_font, m, donut.y_r + g, w - 2.0 * m);
            b.elements[i_after].bbox = after.translate(b.centered(w, after.width()) - m, 0.0);
            (w, after.y_r + m)
        }
    }
}

fn generate_example(rng: &mut Rng, template: Template, id: String) -> Example {
    let palette = PALETTES[rng.random_range(0..PALETTES.len())];
    let font = FONTS[rng.random_range(0..FONTS.len())];
    let topic = TOPICS[rng.random_range(0..TOPICS.len())];
    let margin = [24.0, 28.0, 32.0, 36.0, 40.0][rng.random_range(0..5)];
    let gap = [12.0, 16.0, 20.0, 24.0][rng.random_range(0..4)];
    let mut b = Builder { rng, palette, font, margin, gap, elements: Vec::new() };
    let (width, height) = build(template, &mut b);
    Example {
        id,
        topic: Some(topic.to_string()),
        canvas: Canvas { width, height, color: ColorSpec::solid(palette[0]) },
        elements: b.elements,
    }
}

/// Generates `n` examples. The first twelve use each template once (in a
/// seeded order); the rest are drawn with fixed template weights.
pub fn gen_synthetic_corpus(seed: u64, n: usize) -> ExampleLibrary {
    assert!(n >= 1, "corpus size must be at least 1");
    let mut rng = rng::seeded(seed);
    let mut order: Vec<Template> = TEMPLATES.iter().map(|(t, _)| *t).collect();
    order.shuffle(&mut rng);
    let total: u32 = TEMPLATES.iter().map(|(_, w)| w).sum();
    let examples = (0..n)
        .map(|i| {
            let template = if i < order.len() {
                order[i]
            } else {
                let mut r = rng.random_range(0..total);
                TEMPLATES
                    .iter()
                    .find(|(_, w)| {
                        if r < *w {
                            true
                        } else {
                            r -= w;
                            false
                        }
                    })
                    .map(|(t, _)| *t)
                    .expect("weights cover range")
            };
            generate_example(&mut rng, template, format!("syn-{seed}-{i:03}"))
        })
        .collect();
    ExampleLibrary { examples }
}
