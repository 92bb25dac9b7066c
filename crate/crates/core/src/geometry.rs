use serde::{Deserialize, Serialize};

/// Axis-aligned box in canvas pixels, serialized as `[x_l, y_l, x_r, y_r]`.
///
/// Deserialization does not check the ordering invariant; library loading
/// reports malformed boxes as validation violations instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    pub x_l: f64,
    pub y_l: f64,
    pub x_r: f64,
    pub y_r: f64,
}

impl From<[f64; 4]> for BoundingBox {
    fn from(v: [f64; 4]) -> Self {
        BoundingBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.x_l, b.y_l, b.x_r, b.y_r]
    }
}

impl BoundingBox {
    pub const fn new(x_l: f64, y_l: f64, x_r: f64, y_r: f64) -> Self {
        BoundingBox { x_l, y_l, x_r, y_r }
    }

    pub fn from_origin(x: f64, y: f64, width: f64, height: f64) -> Self {
        BoundingBox::new(x, y, x + width, y + height)
    }

    pub fn width(&self) -> f64 {
        self.x_r - self.x_l
    }

    pub fn height(&self) -> f64 {
        self.y_r - self.y_l
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn aspect(&self) -> f64 {
        self.width() / self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x_l + self.x_r) / 2.0, (self.y_l + self.y_r) / 2.0)
    }

    /// Finite, non-negative, and strictly ordered on both axes.
    pub fn is_valid(&self) -> bool {
        let coords = [self.x_l, self.y_l, self.x_r, self.y_r];
        coords.iter().all(|c| c.is_finite() && *c >= 0.0) && self.x_l < self.x_r && self.y_l < self.y_r
    }

    pub fn contains(&self, other: &BoundingBox, tol: f64) -> bool {
        other.x_l >= self.x_l - tol
            && other.y_l >= self.y_l - tol
            && other.x_r <= self.x_r + tol
            && other.y_r <= self.y_r + tol
    }

    /// True when the open interiors intersect.
    pub fn overlaps(&self, other: &BoundingBox) -> bool {
        self.x_l < other.x_r && other.x_l < self.x_r && self.y_l < other.y_r && other.y_l < self.y_r
    }

    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        BoundingBox::new(
            self.x_l.min(other.x_l),
            self.y_l.min(other.y_l),
            self.x_r.max(other.x_r),
            self.y_r.max(other.y_r),
        )
    }

    pub fn translate(&self, dx: f64, dy: f64) -> BoundingBox {
        let (w, h) = (self.width(), self.height());
        BoundingBox::from_origin(self.x_l + dx, self.y_l + dy, w, h)
    }

    /// Scales about the box center.
    pub fn scale_about_center(&self, factor: f64) -> BoundingBox {
        let (cx, cy) = self.center();
        let (hw, hh) = (self.width() * factor / 2.0, self.height() * factor / 2.0);
        BoundingBox::new(cx - hw, cy - hh, cx + hw, cy + hh)
    }

    /// Rigidly shifts the box so it lies inside `[0,width]×[0,height]`.
    /// Boxes larger than the canvas are pinned to the top-left corner.
    pub fn clamp_into(&self, width: f64, height: f64) -> BoundingBox {
        let dx = if self.x_l < 0.0 {
            -self.x_l
        } else if self.x_r > width {
            (width - self.x_r).max(-self.x_l)
        } else {
            0.0
        };
        let dy = if self.y_l < 0.0 {
            -self.y_l
        } else if self.y_r > height {
            (height - self.y_r).max(-self.y_l)
        } else {
            0.0
        };
        if dx == 0.0 && dy == 0.0 {
            *self
        } else {
            self.translate(dx, dy)
        }
    }

    /// Union of a non-empty set of boxes.
    pub fn enclosing<'a>(mut boxes: impl Iterator<Item = &'a BoundingBox>) -> Option<BoundingBox> {
        let first = *boxes.next()?;
        Some(boxes.fold(first, |acc, b| acc.union(b)))
    }
}
