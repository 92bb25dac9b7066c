use serde::{Deserialize, Serialize};

use crate::corpus::{ElementType, Example};
use crate::geometry::BoundingBox;
use crate::init::Draft;

/// The geometric view of a design that the scorer sees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutElement {
    #[serde(rename = "type")]
    pub element_type: ElementType,
    pub builtin: f64,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub width: f64,
    pub height: f64,
    pub elements: Vec<LayoutElement>,
}

impl Layout {
    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }
}

impl From<&Example> for Layout {
    fn from(e: &Example) -> Self {
        Layout {
            width: e.canvas.width,
            height: e.canvas.height,
            elements: e
                .elements
                .iter()
                .map(|el| LayoutElement { element_type: el.element_type, builtin: el.builtin, bbox: el.bbox })
                .collect(),
        }
    }
}

impl From<&Draft> for Layout {
    fn from(d: &Draft) -> Self {
        Layout {
            width: d.canvas.width,
            height: d.canvas.height,
            elements: d
                .elements
                .iter()
                .map(|el| LayoutElement { element_type: el.element_type, builtin: el.source_builtin, bbox: el.bbox })
                .collect(),
        }
    }
}
