//! Standalone SVG 1.1 output.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use crate::assets::{chart_geometry, pictograph_geometry, IconAsset, Shape, ShapeRole};
use crate::corpus::ColorSpec;
use crate::geometry::BoundingBox;
use crate::init::{Content, Draft, DraftElement};
use crate::text::METRICS;

pub const TRACK_COLOR: &str = "#E6E6E6";

#[derive(Debug, Clone, PartialEq)]
pub struct SvgDocument {
    pub width: f64,
    pub height: f64,
    pub body: String,
}

impl SvgDocument {
    pub fn to_svg_string(&self) -> String {
        let (w, h) = (num(self.width), num(self.height));
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             {}</svg>\n",
            self.body
        )
    }
}

/// Escapes text for use in XML content and attribute values.
pub fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Fixed-precision number without trailing zeros.
fn num(x: f64) -> String {
    let s = format!("{:.3}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn track_color(c: &ColorSpec) -> &str {
    c.secondary.as_deref().unwrap_or(TRACK_COLOR)
}

fn point(cx: f64, cy: f64, r: f64, angle: f64) -> (f64, f64) {
    (cx + r * angle.cos(), cy - r * angle.sin())
}

/// Path for an annular (or full) sector; angles in math orientation.
fn sector_path(cx: f64, cy: f64, outer: f64, inner: f64, start: f64, sweep: f64) -> String {
    let flag = if sweep < 0.0 { 1 } else { 0 };
    let back = 1 - flag;
    if sweep.abs() >= TAU - 1e-12 {
        // full ring: two half circles, plus the hole for donuts
        let circle = |r: f64, f: i32| {
            format!(
                "M{} {} A{r} {r} 0 1 {f} {} {} A{r} {r} 0 1 {f} {} {} Z",
                num(cx + r),
                num(cy),
                num(cx - r),
                num(cy),
                num(cx + r),
                num(cy),
                r = num(r),
            )
        };
        let mut d = circle(outer, flag);
        if inner > 0.0 {
            d.push(' ');
            d.push_str(&circle(inner, back));
        }
        return d;
    }
    let large = if sweep.abs() > PI { 1 } else { 0 };
    let (x0, y0) = point(cx, cy, outer, start);
    let (x1, y1) = point(cx, cy, outer, start + sweep);
    let mut d = format!("M{} {} A{o} {o} 0 {large} {flag} {} {}", num(x0), num(y0), num(x1), num(y1), o = num(outer));
    if inner > 0.0 {
        let (x2, y2) = point(cx, cy, inner, start + sweep);
        let (x3, y3) = point(cx, cy, inner, start);
        let _ = write!(d, " L{} {} A{i} {i} 0 {large} {back} {} {} Z", num(x2), num(y2), num(x3), num(y3), i = num(inner));
    } else {
        let _ = write!(d, " L{} {} Z", num(cx), num(cy));
    }
    d
}

fn icon_markup(icon: &IconAsset, bbox: &BoundingBox, color: &ColorSpec, fill: &str) -> String {
    let k = bbox.height().min(bbox.width() / icon.aspect_ratio);
    let x = bbox.x_l + (bbox.width() - k * icon.aspect_ratio) / 2.0;
    let y = bbox.y_l + (bbox.height() - k) / 2.0;
    let stroke = match &color.secondary {
        Some(s) if fill == color.primary => {
            format!(" stroke=\"{}\" stroke-width=\"{}\"", xml_escape(s), num(0.02))
        }
        _ => String::new(),
    };
    format!(
        "<g transform=\"translate({} {}) scale({})\"><path d=\"{}\" fill=\"{}\" fill-rule=\"evenodd\"{stroke}/></g>",
        num(x),
        num(y),
        num(k),
        xml_escape(&icon.path_data),
        xml_escape(fill)
    )
}

fn element_markup(k: usize, el: &DraftElement, out: &mut String) {
    let b = &el.bbox;
    let primary = xml_escape(&el.color.primary);
    let _ = writeln!(out, "<g id=\"element-{k}\" data-type=\"{}\">", el.element_type.name());
    match &el.content {
        Content::Text { text, style, font_size_px } => {
            let size = *font_size_px as f64;
            let (lines, _) = METRICS.wrap(text, size, style, b.width());
            let family = xml_escape(&style.font_family);
            let weight = if style.bold { " font-weight=\"bold\"" } else { "" };
            let slant = if style.italic { " font-style=\"italic\"" } else { "" };
            for (i, line) in lines.iter().enumerate() {
                let baseline = b.y_l + METRICS.line_height * size * i as f64 + size;
                let _ = writeln!(
                    out,
                    "<text x=\"{}\" y=\"{}\" font-family=\"{family}, sans-serif\" font-size=\"{}\"{weight}{slant} fill=\"{primary}\">{}</text>",
                    num(b.x_l),
                    num(baseline),
                    num(size),
                    xml_escape(line)
                );
            }
        }
        Content::Icon(icon) => {
            let _ = writeln!(out, "{}", icon_markup(icon, b, &el.color, &el.color.primary));
        }
        Content::Chart(spec) => {
            for shape in chart_geometry(spec, b) {
                let fill = match shape.role() {
                    ShapeRole::Filled => primary.clone(),
                    ShapeRole::Track => xml_escape(track_color(&el.color)),
                };
                match shape {
                    Shape::Rect { bbox: r, .. } => {
                        let _ = writeln!(
                            out,
                            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>",
                            num(r.x_l),
                            num(r.y_l),
                            num(r.width()),
                            num(r.height())
                        );
                    }
                    Shape::Sector { cx, cy, outer, inner, start, sweep, .. } => {
                        if sweep == 0.0 {
                            continue;
                        }
                        let _ = writeln!(
                            out,
                            "<path d=\"{}\" fill=\"{fill}\" fill-rule=\"evenodd\"/>",
                            sector_path(cx, cy, outer, inner, start, sweep)
                        );
                    }
                }
            }
        }
        Content::Pictograph(spec) => {
            let track = track_color(&el.color).to_string();
            for (i, p) in pictograph_geometry(spec, b).iter().enumerate() {
                if p.fill < 1.0 {
                    let _ = writeln!(out, "{}", icon_markup(&spec.icon, &p.bbox, &el.color, &track));
                }
                if p.fill >= 1.0 {
                    let _ = writeln!(out, "{}", icon_markup(&spec.icon, &p.bbox, &el.color, &el.color.primary));
                } else if p.fill > 0.0 {
                    let id = format!("clip-{k}-{i}");
                    let _ = writeln!(
                        out,
                        "<clipPath id=\"{id}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>",
                        num(p.bbox.x_l),
                        num(p.bbox.y_l),
                        num(p.bbox.width() * p.fill),
                        num(p.bbox.height())
                    );
                    let _ = writeln!(
                        out,
                        "<g clip-path=\"url(#{id})\">{}</g>",
                        icon_markup(&spec.icon, &p.bbox, &el.color, &el.color.primary)
                    );
                }
            }
        }
    }
    out.push_str("</g>\n");
}

pub fn render(d: &Draft) -> SvgDocument {
    let mut body = String::new();
    let _ = writeln!(
        body,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
        num(d.canvas.width),
        num(d.canvas.height),
        xml_escape(&d.canvas.color.primary)
    );
    for (k, el) in d.elements.iter().enumerate() {
        element_markup(k, el, &mut body);
    }
    SvgDocument { width: d.canvas.width, height: d.canvas.height, body }
}

pub fn render_to_string(d: &Draft) -> String {
    render(d).to_svg_string()
}
