//! Rule-based segmentation of a proportion statement into
//! before / modifier / number / after.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::ElementType;

/// Qualifiers recognized directly in front of the number (case-insensitive).
pub const MODIFIERS: [&str; 11] = [
    "more than",
    "less than",
    "over",
    "under",
    "only",
    "around",
    "nearly",
    "about",
    "almost",
    "up to",
    "at least",
];

static PROPORTION: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?ix)
        \b(?:
            (?P<pct>\d+(?:\.\d+)?)\s?%
          | (?P<oa>\d+)\s+out\s+of\s+(?P<ob>\d+)\b
          | (?P<ia>\d+)\s+in\s+(?P<ib>\d+)\b
          | (?P<fa>\d+)\s*/\s*(?P<fb>\d+)\b
        )",
    )
    .expect("static pattern")
});

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SegmentError {
    #[error("statement is empty")]
    Empty,
    #[error("no proportion found in `{0}` (expected X%, A in B, A out of B or A/B)")]
    NoProportion(String),
    #[error("statement is ambiguous: found {count} proportions ({found})")]
    MultipleProportions { count: usize, found: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentedStatement {
    /// Whitespace-normalized input.
    pub raw: String,
    pub before: Option<String>,
    pub modifier: Option<String>,
    pub number: String,
    pub after: Option<String>,
    pub percentage: f64,
}

impl SegmentedStatement {
    /// Present segments in reading order with their element types.
    pub fn segments(&self) -> Vec<(ElementType, &str)> {
        let mut out = Vec::with_capacity(4);
        if let Some(b) = &self.before {
            out.push((ElementType::Before, b.as_str()));
        }
        if let Some(m) = &self.modifier {
            out.push((ElementType::Modifier, m.as_str()));
        }
        out.push((ElementType::Number, self.number.as_str()));
        if let Some(a) = &self.after {
            out.push((ElementType::After, a.as_str()));
        }
        out
    }

    /// Text for a textual element type; `statement` is the whole input.
    pub fn text_for(&self, t: ElementType) -> Option<&str> {
        match t {
            ElementType::Statement => Some(&self.raw),
            ElementType::Before => self.before.as_deref(),
            ElementType::Modifier => self.modifier.as_deref(),
            ElementType::Number => Some(&self.number),
            ElementType::After => self.after.as_deref(),
            _ => None,
        }
    }
}

pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn ratio(a: &str, b: &str) -> Option<f64> {
    let a: u64 = a.parse().ok()?;
    let b: u64 = b.parse().ok()?;
    (a >= 1 && a <= b).then(|| a as f64 / b as f64)
}

fn percentage_of(caps: &regex::Captures<'_>) -> Option<f64> {
    if let Some(p) = caps.name("pct") {
        let v: f64 = p.as_str().parse().ok()?;
        return (v > 0.0 && v <= 100.0).then_some(v / 100.0);
    }
    for (a, b) in [("oa", "ob"), ("ia", "ib"), ("fa", "fb")] {
        if let (Some(a), Some(b)) = (caps.name(a), caps.name(b)) {
            return ratio(a.as_str(), b.as_str());
        }
    }
    None
}

fn non_empty(s: &str) -> Option<String> {
    let t = s.trim();
    (!t.is_empty()).then(|| t.to_string())
}

/// Splits `prefix` into (before, modifier) using the longest trailing modifier.
fn split_modifier(prefix: &str) -> (Option<String>, Option<String>) {
    let prefix = prefix.trim_end();
    let mut best: Option<usize> = None;
    for m in MODIFIERS {
        if prefix.len() < m.len() {
            continue;
        }
        let at = prefix.len() - m.len();
        if !prefix.is_char_boundary(at) || !prefix[at..].eq_ignore_ascii_case(m) {
            continue;
        }
        let word_start = prefix[..at].chars().next_back().is_none_or(char::is_whitespace);
        if word_start && best.is_none_or(|b| at < b) {
            best = Some(at);
        }
    }
    match best {
        Some(at) => (non_empty(&prefix[..at]), non_empty(&prefix[at..])),
        None => (non_empty(prefix), None),
    }
}

pub fn segment(input: &str) -> Result<SegmentedStatement, SegmentError> {
    let raw = normalize_whitespace(input);
    if raw.is_empty() {
        return Err(SegmentError::Empty);
    }
    let matches: Vec<_> = PROPORTION
        .captures_iter(&raw)
        .filter_map(|caps| {
            let whole = caps.get(0).expect("group 0");
            percentage_of(&caps).map(|p| (whole.start(), whole.end(), p))
        })
        .collect();
    let (start, end, percentage) = match matches.as_slice() {
        [] => return Err(SegmentError::NoProportion(raw)),
        [one] => *one,
        many => {
            let found = many.iter().map(|(s, e, _)| &raw[*s..*e]).collect::<Vec<_>>().join(", ");
            return Err(SegmentError::MultipleProportions { count: many.len(), found });
        }
    };
    let (before, modifier) = split_modifier(&raw[..start]);
    Ok(SegmentedStatement {
        number: raw[start..end].to_string(),
        after: non_empty(&raw[end..]),
        before,
        modifier,
        percentage,
        raw,
    })
}

/// Unicode scalar counts of each present textual element, plus `statement`.
pub fn char_counts(s: &SegmentedStatement) -> BTreeMap<ElementType, usize> {
    let mut out = BTreeMap::new();
    out.insert(ElementType::Statement, s.raw.chars().count());
    for (t, text) in s.segments() {
        out.insert(t, text.chars().count());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn more_than_74_percent() {
        let s = segment("More than 74% of users are female").unwrap();
        assert_eq!(s.before, None);
        assert_eq!(s.modifier.as_deref(), Some("More than"));
        assert_eq!(s.number, "74%");
        assert_eq!(s.after.as_deref(), Some("of users are female"));
        assert_eq!(s.percentage, 0.74);
    }

    #[test]
    fn one_out_of_three() {
        let s = segment("1 out of 3 patients have used a portal to connect with doctors.").unwrap();
        assert_eq!(s.before, None);
        assert_eq!(s.modifier, None);
        assert_eq!(s.number, "1 out of 3");
        assert_eq!(s.after.as_deref(), Some("patients have used a portal to connect with doctors."));
        assert_eq!(s.percentage, 1.0 / 3.0);
    }

    #[test]
    fn bare_percentage() {
        let s = segment("50%").unwrap();
        assert_eq!((s.before, s.modifier, s.after), (None, None, None));
        assert_eq!(s.number, "50%");
        assert_eq!(s.percentage, 0.5);
    }

    #[test]
    fn longest_modifier_wins() {
        let s = segment("Today at least 12.5% of homes are empty").unwrap();
        assert_eq!(s.before.as_deref(), Some("Today"));
        assert_eq!(s.modifier.as_deref(), Some("at least"));
        assert_eq!(s.number, "12.5%");
        assert_eq!(s.percentage, 0.125);
    }

    #[test]
    fn modifier_must_start_a_word() {
        // "Moreover" ends with "over" but is not the modifier
        let s = segment("Moreover 30% of kids walk").unwrap();
        assert_eq!(s.modifier, None);
        assert_eq!(s.before.as_deref(), Some("Moreover"));
    }

    #[test]
    fn errors() {
        assert_eq!(segment("   "), Err(SegmentError::Empty));
        assert!(matches!(segment("no numbers here"), Err(SegmentError::NoProportion(_))));
        assert!(matches!(segment("150% growth"), Err(SegmentError::NoProportion(_))));
        assert!(matches!(segment("5 out of 3 people"), Err(SegmentError::NoProportion(_))));
        assert!(matches!(
            segment("20% of men and 30% of women"),
            Err(SegmentError::MultipleProportions { count: 2, .. })
        ));
    }

    #[test]
    fn counts_for_74_percent() {
        let s = segment("More than 74% of users are female").unwrap();
        let c = char_counts(&s);
        assert_eq!(c[&ElementType::Statement], 33);
        assert_eq!(c[&ElementType::Modifier], 9);
        assert_eq!(c[&ElementType::Number], 3);
        assert_eq!(c[&ElementType::After], 19);
        assert!(!c.contains_key(&ElementType::Before));
    }

    #[test]
    fn counts_for_bare() {
        let c = char_counts(&segment("50%").unwrap());
        assert_eq!(c.len(), 2);
        assert_eq!((c[&ElementType::Statement], c[&ElementType::Number]), (3, 3));
    }

    #[test]
    fn counts_are_scalar_values() {
        let s = segment("Über 50 % der Nutzer sind glücklich").unwrap();
        assert_eq!(s.number, "50 %");
        let c = char_counts(&s);
        assert_eq!(c[&ElementType::Before], 4);
        assert_eq!(c[&ElementType::Number], 4);
        assert_eq!(c[&ElementType::After], "der Nutzer sind glücklich".chars().count());
        assert_eq!(c[&ElementType::Statement], 35);
        assert!("Über".len() > 4);
    }

    #[test]
    fn whitespace_is_normalized() {
        let s = segment("  Nearly\t 9 in   10  adults   agree ").unwrap();
        assert_eq!(s.raw, "Nearly 9 in 10 adults agree");
        assert_eq!(s.number, "9 in 10");
        assert_eq!(s.modifier.as_deref(), Some("Nearly"));
    }

    proptest! {
        #[test]
        fn fraction_forms_agree(b in 1u32..=1000, a_frac in 0.0f64..1.0) {
            let a = 1 + ((b - 1) as f64 * a_frac) as u32;
            let expected = a as f64 / b as f64;
            let forms = [format!("{a} in {b} people"), format!("{a} out of {b} people"), format!("{a}/{b} people")];
            for text in forms {
                prop_assert_eq!(segment(&text).unwrap().percentage, expected);
            }
        }
    }
}
