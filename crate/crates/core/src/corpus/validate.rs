use std::fmt;

use super::{ColorSpec, Example};

/// A single broken invariant in an [`Example`]. Element indices refer to
/// positions in `Example::elements`.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyId,
    NoElements,
    InvalidCanvas,
    InvalidBox { element: usize },
    OutsideCanvas { element: usize },
    TextualBuiltin { element: usize, value: f64 },
    GraphicalBuiltin { element: usize, value: f64 },
    MissingTextStyle { element: usize },
    UnexpectedTextStyle { element: usize },
    BadColor { element: Option<usize>, value: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyId => write!(f, "id must be non-empty"),
            Violation::NoElements => write!(f, "elements list must be non-empty"),
            Violation::InvalidCanvas => write!(f, "canvas width and height must be finite and positive"),
            Violation::InvalidBox { element } => write!(
                f,
                "element {element}: BoundingBox requires x_l < x_r and y_l < y_r with finite non-negative coordinates"
            ),
            Violation::OutsideCanvas { element } => write!(f, "element {element}: box extends past the canvas"),
            Violation::TextualBuiltin { element, value } => {
                write!(f, "element {element}: textual builtin must be an integer >= 1, got {value}")
            }
            Violation::GraphicalBuiltin { element, value } => {
                write!(f, "element {element}: graphical builtin must be finite and > 0, got {value}")
            }
            Violation::MissingTextStyle { element } => write!(f, "element {element}: textual element needs text_style"),
            Violation::UnexpectedTextStyle { element } => {
                write!(f, "element {element}: graphical element must not have text_style")
            }
            Violation::BadColor { element: Some(i), value } => write!(f, "element {i}: `{value}` is not #RRGGBB"),
            Violation::BadColor { element: None, value } => write!(f, "canvas: `{value}` is not #RRGGBB"),
        }
    }
}

pub(crate) fn is_hex_color(s: &str) -> bool {
    s.len() == 7 && s.starts_with('#') && s[1..].chars().all(|c| c.is_ascii_hexdigit())
}

fn check_color(c: &ColorSpec, element: Option<usize>, out: &mut Vec<Violation>) {
    for value in std::iter::once(&c.primary).chain(c.secondary.as_ref()) {
        if !is_hex_color(value) {
            out.push(Violation::BadColor { element, value: value.clone() });
        }
    }
}

/// Lists every violated invariant; an empty report means the example is valid.
pub fn validate_example(e: &Example) -> Vec<Violation> {
    let mut out = Vec::new();
    if e.id.trim().is_empty() {
        out.push(Violation::EmptyId);
    }
    let canvas_ok = e.canvas.width.is_finite() && e.canvas.height.is_finite() && e.canvas.width > 0.0 && e.canvas.height > 0.0;
    if !canvas_ok {
        out.push(Violation::InvalidCanvas);
    }
    check_color(&e.canvas.color, None, &mut out);
    if e.elements.is_empty() {
        out.push(Violation::NoElements);
    }
    let bounds = e.canvas.bounds();
    for (i, el) in e.elements.iter().enumerate() {
        if !el.bbox.is_valid() {
            out.push(Violation::InvalidBox { element: i });
        } else if canvas_ok && !bounds.contains(&el.bbox, 0.0) {
            out.push(Violation::OutsideCanvas { element: i });
        }
        if el.element_type.is_textual() {
            if !(el.builtin.is_finite() && el.builtin >= 1.0 && el.builtin.fract() == 0.0) {
                out.push(Violation::TextualBuiltin { element: i, value: el.builtin });
            }
            if el.text_style.is_none() {
                out.push(Violation::MissingTextStyle { element: i });
            }
        } else {
            if !(el.builtin.is_finite() && el.builtin > 0.0) {
                out.push(Violation::GraphicalBuiltin { element: i, value: el.builtin });
            }
            if el.text_style.is_some() {
                out.push(Violation::UnexpectedTextStyle { element: i });
            }
        }
        check_color(&el.color, Some(i), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Canvas, ElementType, TextStyle, VisualElement};
    use crate::geometry::BoundingBox;

    fn example() -> Example {
        Example {
            id: "ok".into(),
            topic: Some("health".into()),
            canvas: Canvas { width: 200.0, height: 100.0, color: ColorSpec::solid("#FFFFFF") },
            elements: vec![
                VisualElement {
                    element_type: ElementType::Number,
                    builtin: 3.0,
                    bbox: BoundingBox::new(10.0, 10.0, 90.0, 60.0),
                    color: ColorSpec::solid("#112233"),
                    text_style: Some(TextStyle::default()),
                },
                VisualElement {
                    element_type: ElementType::SingleIcon,
                    builtin: 0.8,
                    bbox: BoundingBox::new(100.0, 10.0, 140.0, 60.0),
                    color: ColorSpec::with_outline("#112233", "#000000"),
                    text_style: None,
                },
            ],
        }
    }

    #[test]
    fn well_formed_is_clean() {
        assert!(validate_example(&example()).is_empty());
    }

    #[test]
    fn zero_builtin_text() {
        let mut e = example();
        e.elements[0].builtin = 0.0;
        assert_eq!(validate_example(&e), vec![Violation::TextualBuiltin { element: 0, value: 0.0 }]);
    }

    #[test]
    fn past_right_edge() {
        let mut e = example();
        e.elements[1].bbox.x_r = 201.0;
        assert_eq!(validate_example(&e), vec![Violation::OutsideCanvas { element: 1 }]);
    }

    #[test]
    fn style_presence_follows_type() {
        let mut e = example();
        e.elements[0].text_style = None;
        e.elements[1].text_style = Some(TextStyle::default());
        let v = validate_example(&e);
        assert_eq!(v, vec![Violation::MissingTextStyle { element: 0 }, Violation::UnexpectedTextStyle { element: 1 }]);
    }

    #[test]
    fn colors_must_be_hex() {
        let mut e = example();
        e.canvas.color.primary = "white".into();
        assert_eq!(validate_example(&e), vec![Violation::BadColor { element: None, value: "white".into() }]);
    }
}
