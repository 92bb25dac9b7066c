use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ElementType, Example, ExampleLibrary};

/// Coarse element category used when counting design choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Statement,
    SemanticSegments,
    Icon,
    Bar,
    Pie,
    Donut,
    Pictograph,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Statement,
        Category::SemanticSegments,
        Category::Icon,
        Category::Bar,
        Category::Pie,
        Category::Donut,
        Category::Pictograph,
    ];

    pub fn of(t: ElementType) -> Category {
        match t {
            ElementType::Before | ElementType::Modifier | ElementType::Number | ElementType::After => {
                Category::SemanticSegments
            }
            ElementType::Statement => Category::Statement,
            ElementType::SingleIcon => Category::Icon,
            ElementType::Bar => Category::Bar,
            ElementType::Pie => Category::Pie,
            ElementType::Donut => Category::Donut,
            ElementType::Pictograph => Category::Pictograph,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Statement => "statement",
            Category::SemanticSegments => "semantic_segments",
            Category::Icon => "icon",
            Category::Bar => "bar",
            Category::Pie => "pie",
            Category::Donut => "donut",
            Category::Pictograph => "pictograph",
        }
    }
}

/// The set of categories an infographic uses (presence, not multiplicity).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DesignChoice(BTreeSet<Category>);

impl DesignChoice {
    pub fn new(categories: impl IntoIterator<Item = Category>) -> Self {
        DesignChoice(categories.into_iter().collect())
    }

    pub fn contains(&self, c: Category) -> bool {
        self.0.contains(&c)
    }

    pub fn categories(&self) -> impl Iterator<Item = Category> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for DesignChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.0.iter().map(|c| c.name()).collect();
        f.write_str(&names.join("+"))
    }
}

pub fn design_choice_of(e: &Example) -> DesignChoice {
    DesignChoice::new(e.elements.iter().map(|el| Category::of(el.element_type)))
}

/// Occurrence counts of design choices over a library of `total` examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignChoiceDistribution {
    counts: BTreeMap<DesignChoice, usize>,
    total: usize,
}

impl DesignChoiceDistribution {
    /// Builds from raw counts; `None` when the counts are empty or contain zeros.
    pub fn from_counts(counts: BTreeMap<DesignChoice, usize>) -> Option<Self> {
        if counts.is_empty() || counts.values().any(|&c| c == 0) {
            return None;
        }
        let total = counts.values().sum();
        Some(DesignChoiceDistribution { counts, total })
    }

    pub fn total_examples(&self) -> usize {
        self.total
    }

    pub fn count(&self, choice: &DesignChoice) -> usize {
        self.counts.get(choice).copied().unwrap_or(0)
    }

    pub fn probability(&self, choice: &DesignChoice) -> f64 {
        self.count(choice) as f64 / self.total as f64
    }

    /// `(choice, probability)` in the canonical choice order.
    pub fn entries(&self) -> impl Iterator<Item = (&DesignChoice, f64)> + '_ {
        self.counts.iter().map(move |(c, &n)| (c, n as f64 / self.total as f64))
    }

    pub fn counts(&self) -> &BTreeMap<DesignChoice, usize> {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

pub fn learn_distribution(lib: &ExampleLibrary) -> DesignChoiceDistribution {
    let mut counts = BTreeMap::new();
    for e in &lib.examples {
        *counts.entry(design_choice_of(e)).or_insert(0) += 1;
    }
    DesignChoiceDistribution::from_counts(counts).expect("library has at least one example")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Canvas, ColorSpec, TextStyle, VisualElement};
    use crate::geometry::BoundingBox;

    pub(crate) fn example_with(id: &str, types: &[ElementType]) -> Example {
        let elements = types
            .iter()
            .enumerate()
            .map(|(i, &t)| VisualElement {
                element_type: t,
                builtin: if t.is_textual() { 5.0 } else { 1.0 },
                bbox: BoundingBox::from_origin(10.0 * i as f64, 0.0, 10.0, 10.0),
                color: ColorSpec::solid("#000000"),
                text_style: t.is_textual().then(TextStyle::default),
            })
            .collect();
        Example {
            id: id.into(),
            topic: None,
            canvas: Canvas { width: 200.0, height: 100.0, color: ColorSpec::solid("#FFFFFF") },
            elements,
        }
    }

    use ElementType::*;

    #[test]
    fn number_after_donut_icon() {
        let e = example_with("x", &[Number, After, Donut, SingleIcon]);
        assert_eq!(
            design_choice_of(&e),
            DesignChoice::new([Category::SemanticSegments, Category::Donut, Category::Icon])
        );
    }

    #[test]
    fn pie_icon_statement() {
        let e = example_with("x", &[Statement, Pie, SingleIcon]);
        assert_eq!(design_choice_of(&e), DesignChoice::new([Category::Statement, Category::Pie, Category::Icon]));
        assert_eq!(design_choice_of(&e).to_string(), "statement+icon+pie");
    }

    #[test]
    fn singleton_and_multiplicity() {
        assert_eq!(design_choice_of(&example_with("x", &[Statement])), DesignChoice::new([Category::Statement]));
        let two_icons = example_with("x", &[SingleIcon, SingleIcon, Number]);
        assert_eq!(design_choice_of(&two_icons).len(), 2);
    }

    #[test]
    fn statement_and_segments_may_coexist() {
        let e = example_with("x", &[Statement, Number]);
        let c = design_choice_of(&e);
        assert!(c.contains(Category::Statement) && c.contains(Category::SemanticSegments));
    }

    #[test]
    fn toy_distribution() {
        let lib = ExampleLibrary {
            examples: vec![
                example_with("a", &[Statement]),
                example_with("b", &[Statement]),
                example_with("c", &[Number, Pie]),
                example_with("d", &[Bar, After]),
            ],
        };
        let p = learn_distribution(&lib);
        assert_eq!(p.probability(&DesignChoice::new([Category::Statement])), 0.5);
        assert_eq!(p.probability(&DesignChoice::new([Category::SemanticSegments, Category::Pie])), 0.25);
        assert_eq!(p.probability(&DesignChoice::new([Category::SemanticSegments, Category::Bar])), 0.25);
        assert_eq!(p.total_examples(), 4);
    }

    #[test]
    fn single_example_has_probability_one() {
        let lib = ExampleLibrary { examples: vec![example_with("a", &[Pictograph, Number])] };
        let p = learn_distribution(&lib);
        assert_eq!(p.len(), 1);
        assert_eq!(p.entries().next().unwrap().1, 1.0);
    }

    #[test]
    fn serializes_as_list() {
        let c = DesignChoice::new([Category::Pie, Category::Statement]);
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"["statement","pie"]"#);
    }
}
