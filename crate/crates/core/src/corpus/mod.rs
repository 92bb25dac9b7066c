//! The labeled example library.
//!
//! Each [`Example`] is one proportion infographic with its canvas and typed,
//! attributed elements. The library is stored as a single JSON document (see
//! the README for the schema); unknown keys are rejected at parse time while
//! geometric and typing rules are checked by [`validate_example`].

mod choice;
mod synthetic;
mod validate;

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::geometry::BoundingBox;

pub use choice::{design_choice_of, learn_distribution, Category, DesignChoice, DesignChoiceDistribution};
pub use synthetic::gen_synthetic_corpus;
pub use validate::{validate_example, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementType {
    Before,
    Modifier,
    Number,
    After,
    Statement,
    SingleIcon,
    Donut,
    Pie,
    Bar,
    Pictograph,
}

impl ElementType {
    pub const ALL: [ElementType; 10] = [
        ElementType::Before,
        ElementType::Modifier,
        ElementType::Number,
        ElementType::After,
        ElementType::Statement,
        ElementType::SingleIcon,
        ElementType::Donut,
        ElementType::Pie,
        ElementType::Bar,
        ElementType::Pictograph,
    ];

    pub fn is_textual(self) -> bool {
        matches!(
            self,
            ElementType::Before | ElementType::Modifier | ElementType::Number | ElementType::After | ElementType::Statement
        )
    }

    /// Position in [`ElementType::ALL`]; used for one-hot encodings.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementType::Before => "before",
            ElementType::Modifier => "modifier",
            ElementType::Number => "number",
            ElementType::After => "after",
            ElementType::Statement => "statement",
            ElementType::SingleIcon => "single_icon",
            ElementType::Donut => "donut",
            ElementType::Pie => "pie",
            ElementType::Bar => "bar",
            ElementType::Pictograph => "pictograph",
        }
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Up to two sRGB colors. `secondary` is the outline color of icons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorSpec {
    pub primary: String,
    #[serde(default)]
    pub secondary: Option<String>,
}

impl ColorSpec {
    pub fn solid(primary: impl Into<String>) -> Self {
        ColorSpec { primary: primary.into(), secondary: None }
    }

    pub fn with_outline(primary: impl Into<String>, secondary: impl Into<String>) -> Self {
        ColorSpec { primary: primary.into(), secondary: Some(secondary.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextStyle {
    pub font_family: String,
    pub bold: bool,
    pub italic: bool,
}

impl Default for TextStyle {
    fn default() -> Self {
        TextStyle { font_family: "Helvetica".into(), bold: false, italic: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisualElement {
    #[serde(rename = "type")]
    pub element_type: ElementType,
    /// Character count for textual types, width/height for graphical ones.
    pub builtin: f64,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub color: ColorSpec,
    #[serde(default)]
    pub text_style: Option<TextStyle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
    pub color: ColorSpec,
}

impl Canvas {
    pub fn bounds(&self) -> BoundingBox {
        BoundingBox::new(0.0, 0.0, self.width, self.height)
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example {
    pub id: String,
    #[serde(default)]
    pub topic: Option<String>,
    pub canvas: Canvas,
    pub elements: Vec<VisualElement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleLibrary {
    pub examples: Vec<Example>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed corpus: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("example `{id}` is invalid: {violation}")]
    Invalid { id: String, violation: Violation },
    #[error("duplicate example id `{0}`")]
    DuplicateId(String),
    #[error("corpus contains no examples")]
    Empty,
}

impl ExampleLibrary {
    /// Parses and validates a library from its JSON text.
    pub fn from_json(text: &str) -> Result<Self, CorpusError> {
        let lib: ExampleLibrary = serde_json::from_str(text)?;
        lib.validate()?;
        Ok(lib)
    }

    /// Fails on the first invalid example, duplicate id, or an empty library.
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.examples.is_empty() {
            return Err(CorpusError::Empty);
        }
        let mut seen = HashSet::new();
        for e in &self.examples {
            if !seen.insert(e.id.as_str()) {
                return Err(CorpusError::DuplicateId(e.id.clone()));
            }
            if let Some(violation) = validate_example(e).into_iter().next() {
                return Err(CorpusError::Invalid { id: e.id.clone(), violation });
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.examples.len()
    }

    pub fn get(&self, id: &str) -> Option<&Example> {
        self.examples.iter().find(|e| e.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("library serialization is infallible")
    }
}

pub fn load_library(path: impl AsRef<Path>) -> Result<ExampleLibrary, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
    ExampleLibrary::from_json(&text)
}

pub fn save_library(lib: &ExampleLibrary, path: impl AsRef<Path>) -> std::io::Result<()> {
    let mut text = lib.to_json();
    text.push('\n');
    std::fs::write(path, text)
}
