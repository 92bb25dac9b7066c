//! Affine text metric model shared by font fitting and rendering.
//!
//! A glyph advances `advance × size` pixels (times `bold_factor` for bold),
//! a line occupies `line_height × size` pixels, and lines wrap greedily at
//! spaces. Characters are unicode scalar values.

use crate::corpus::TextStyle;
use crate::geometry::BoundingBox;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextMetrics {
    pub advance: f64,
    pub line_height: f64,
    pub bold_factor: f64,
}

pub const METRICS: TextMetrics = TextMetrics { advance: 0.58, line_height: 1.2, bold_factor: 1.05 };

const SLACK: f64 = 1e-9;

impl TextMetrics {
    pub fn char_advance(&self, size: f64, style: &TextStyle) -> f64 {
        let a = self.advance * size;
        if style.bold {
            a * self.bold_factor
        } else {
            a
        }
    }

    /// Wraps `text` to lines no wider than `width` at the given size.
    /// Returns the lines and whether any single word overflowed.
    pub fn wrap(&self, text: &str, size: f64, style: &TextStyle, width: f64) -> (Vec<String>, bool) {
        let adv = self.char_advance(size, style);
        let fits = |chars: usize| chars as f64 * adv <= width + SLACK;
        let mut lines: Vec<String> = Vec::new();
        let mut current = String::new();
        let mut current_len = 0usize;
        let mut overflow = false;
        for word in text.split_whitespace() {
            let wlen = word.chars().count();
            if current_len == 0 {
                current.push_str(word);
                current_len = wlen;
            } else if fits(current_len + 1 + wlen) {
                current.push(' ');
                current.push_str(word);
                current_len += 1 + wlen;
            } else {
                lines.push(std::mem::take(&mut current));
                current.push_str(word);
                current_len = wlen;
            }
            if !fits(wlen) {
                overflow = true;
            }
        }
        if current_len > 0 {
            lines.push(current);
        }
        (lines, overflow)
    }

    /// Whether the whole text fits in the box at `size` without overflow.
    pub fn fits(&self, text: &str, size: f64, style: &TextStyle, bbox: &BoundingBox) -> bool {
        let (lines, overflow) = self.wrap(text, size, style, bbox.width());
        !overflow && lines.len() as f64 * self.line_height * size <= bbox.height() + SLACK
    }

    /// Largest integer size at which the text fits, never below 1.
    pub fn fit_font(&self, bbox: &BoundingBox, text: &str, style: &TextStyle) -> u32 {
        let upper = (bbox.height() / self.line_height + SLACK).floor();
        if upper.is_nan() || upper < 1.0 {
            return 1;
        }
        let mut size = upper.min(4096.0) as u32;
        while size > 1 {
            if self.fits(text, size as f64, style, bbox) {
                return size;
            }
            size -= 1;
        }
        1
    }
}
