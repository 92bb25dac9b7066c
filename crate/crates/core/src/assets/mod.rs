//! Concrete graphical content: icons, charts and pictographs.

mod icons;

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::geometry::BoundingBox;

pub use icons::{IconAsset, IconError, IconLibrary, KeywordEntry, FALLBACK_ICON};

/// Inner radius of a donut as a fraction of its outer radius.
pub const DONUT_INNER_RATIO: f64 = 0.6;
/// Aspect ratio given to bar charts generated for a query.
pub const DEFAULT_BAR_ASPECT: f64 = 6.0;
/// Horizontal gap between pictograph icons, as a fraction of icon width.
pub const PICTOGRAPH_GAP: f64 = 0.1;
pub const PICTOGRAPH_MIN_COUNT: u32 = 3;
pub const PICTOGRAPH_MAX_COUNT: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Pie,
    Donut,
    Bar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub kind: ChartKind,
    pub percentage: f64,
    pub aspect_ratio: f64,
}

impl ChartSpec {
    pub fn pie(percentage: f64) -> Self {
        ChartSpec { kind: ChartKind::Pie, percentage, aspect_ratio: 1.0 }
    }

    pub fn donut(percentage: f64) -> Self {
        ChartSpec { kind: ChartKind::Donut, percentage, aspect_ratio: 1.0 }
    }

    pub fn bar(percentage: f64, aspect_ratio: f64) -> Self {
        ChartSpec { kind: ChartKind::Bar, percentage, aspect_ratio }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PictographSpec {
    pub icon: IconAsset,
    pub count: u32,
    pub percentage: f64,
}

impl PictographSpec {
    /// Single-row layout: `count` icons side by side.
    pub fn aspect_ratio(&self) -> f64 {
        self.count as f64 * self.icon.aspect_ratio
    }

    /// Number of icon-equivalents that are filled.
    pub fn filled_amount(&self) -> f64 {
        let x = self.percentage * self.count as f64;
        let r = x.round();
        if (x - r).abs() < 1e-9 {
            r
        } else {
            x
        }
    }
}

/// Which part of a chart a shape draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeRole {
    Filled,
    Track,
}

/// Chart primitive in canvas coordinates. Angles are radians in the usual
/// math orientation (counter-clockwise from +x, y up); a negative sweep runs
/// clockwise on screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Sector { cx: f64, cy: f64, outer: f64, inner: f64, start: f64, sweep: f64, role: ShapeRole },
    Rect { bbox: BoundingBox, role: ShapeRole },
}

impl Shape {
    pub fn role(&self) -> ShapeRole {
        match self {
            Shape::Sector { role, .. } | Shape::Rect { role, .. } => *role,
        }
    }

    /// Conservative bounds (full circle for sectors).
    pub fn bounds(&self) -> BoundingBox {
        match *self {
            Shape::Sector { cx, cy, outer, .. } => BoundingBox::new(cx - outer, cy - outer, cx + outer, cy + outer),
            Shape::Rect { bbox, .. } => bbox,
        }
    }
}

pub fn chart_geometry(spec: &ChartSpec, bbox: &BoundingBox) -> Vec<Shape> {
    chart_geometry_with(spec, bbox, DONUT_INNER_RATIO)
}

/// Pie/donut: filled sector from 12 o'clock clockwise plus the remainder.
/// Bar: full-width track plus a filled rect of width `percentage × width`.
pub fn chart_geometry_with(spec: &ChartSpec, bbox: &BoundingBox, inner_ratio: f64) -> Vec<Shape> {
    let p = spec.percentage.clamp(0.0, 1.0);
    match spec.kind {
        ChartKind::Bar => {
            let filled = BoundingBox::new(bbox.x_l, bbox.y_l, bbox.x_l + p * bbox.width(), bbox.y_r);
            vec![Shape::Rect { bbox: *bbox, role: ShapeRole::Track }, Shape::Rect { bbox: filled, role: ShapeRole::Filled }]
        }
        ChartKind::Pie | ChartKind::Donut => {
            let (cx, cy) = bbox.center();
            let outer = bbox.width().min(bbox.height()) / 2.0;
            let inner = if spec.kind == ChartKind::Donut { outer * inner_ratio } else { 0.0 };
            let sweep = -TAU * p;
            let mut shapes = vec![Shape::Sector { cx, cy, outer, inner, start: FRAC_PI_2, sweep, role: ShapeRole::Filled }];
            let rest = -TAU - sweep;
            if rest < 0.0 {
                shapes.push(Shape::Sector {
                    cx,
                    cy,
                    outer,
                    inner,
                    start: FRAC_PI_2 + sweep,
                    sweep: rest,
                    role: ShapeRole::Track,
                });
            }
            shapes
        }
    }
}

/// One icon slot of a pictograph; `fill` ∈ [0,1] is the filled fraction,
/// clipped from the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IconPlacement {
    pub bbox: BoundingBox,
    pub fill: f64,
}

/// Lays `count` icons in one row with gaps of 10% of the icon width, centered
/// vertically, uniformly scaled to fit the box.
pub fn pictograph_geometry(spec: &PictographSpec, bbox: &BoundingBox) -> Vec<IconPlacement> {
    let n = spec.count.max(1) as f64;
    let a = spec.icon.aspect_ratio;
    let per_width = bbox.width() / (n + PICTOGRAPH_GAP * (n - 1.0));
    let icon_w = per_width.min(bbox.height() * a);
    let icon_h = icon_w / a;
    let row_w = icon_w * (n + PICTOGRAPH_GAP * (n - 1.0));
    let x0 = bbox.x_l + (bbox.width() - row_w) / 2.0;
    let y0 = bbox.y_l + (bbox.height() - icon_h) / 2.0;
    let filled = spec.filled_amount();
    (0..spec.count)
        .map(|i| {
            let x = x0 + i as f64 * icon_w * (1.0 + PICTOGRAPH_GAP);
            let fill = (filled - i as f64).clamp(0.0, 1.0);
            IconPlacement { bbox: BoundingBox::from_origin(x, y0, icon_w, icon_h), fill }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sweep_of(s: &Shape) -> f64 {
        match s {
            Shape::Sector { sweep, .. } => *sweep,
            _ => panic!("not a sector"),
        }
    }

    #[test]
    fn quarter_pie() {
        let b = BoundingBox::new(0.0, 0.0, 100.0, 100.0);
        let shapes = chart_geometry(&ChartSpec::pie(0.25), &b);
        match shapes[0] {
            Shape::Sector { start, sweep, cx, cy, outer, inner, role } => {
                assert_eq!(role, ShapeRole::Filled);
                assert!((start.to_degrees() - 90.0).abs() < 1e-12);
                assert!(((start + sweep).to_degrees() - 0.0).abs() < 1e-12);
                assert!((sweep.to_degrees() + 90.0).abs() < 1e-12);
                assert_eq!((cx, cy, outer, inner), (50.0, 50.0, 50.0, 0.0));
            }
            _ => panic!(),
        }
        assert_eq!(shapes.len(), 2);
    }

    #[test]
    fn bar_fill_width() {
        let b = BoundingBox::new(10.0, 0.0, 210.0, 30.0);
        let shapes = chart_geometry(&ChartSpec::bar(0.74, 200.0 / 30.0), &b);
        match shapes[1] {
            Shape::Rect { bbox, role: ShapeRole::Filled } => assert!((bbox.width() - 148.0).abs() < 1e-9),
            _ => panic!(),
        }
    }

    #[test]
    fn full_donut_is_one_annulus() {
        let b = BoundingBox::new(0.0, 0.0, 80.0, 80.0);
        let shapes = chart_geometry(&ChartSpec::donut(1.0), &b);
        assert_eq!(shapes.len(), 1);
        match shapes[0] {
            Shape::Sector { outer, inner, sweep, .. } => {
                assert!((sweep.abs() - TAU).abs() < 1e-12);
                assert!((inner - 0.6 * outer).abs() < 1e-12);
            }
            _ => panic!(),
        }
    }

    fn spec(count: u32, percentage: f64) -> PictographSpec {
        PictographSpec { icon: IconLibrary::bundled().fallback(), count, percentage }
    }

    fn fills(count: u32, p: f64) -> Vec<f64> {
        let s = spec(count, p);
        let b = BoundingBox::from_origin(0.0, 0.0, 100.0 * s.aspect_ratio(), 100.0);
        pictograph_geometry(&s, &b).iter().map(|pl| pl.fill).collect()
    }

    #[test]
    fn one_third_of_three() {
        assert_eq!(fills(3, 1.0 / 3.0), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn seventy_four_of_ten() {
        let f = fills(10, 0.74);
        assert_eq!(&f[..7], &[1.0; 7]);
        assert!((f[7] - 0.4).abs() < 1e-9);
        assert_eq!(&f[8..], &[0.0, 0.0]);
    }

    #[test]
    fn all_filled() {
        assert_eq!(fills(4, 1.0), vec![1.0; 4]);
    }

    #[test]
    fn pictograph_gaps_are_uniform() {
        let s = spec(5, 0.5);
        let b = BoundingBox::from_origin(3.0, 7.0, 100.0 * s.aspect_ratio(), 100.0);
        let pl = pictograph_geometry(&s, &b);
        let w = pl[0].bbox.width();
        for pair in pl.windows(2) {
            assert!((pair[1].bbox.x_l - pair[0].bbox.x_r - 0.1 * w).abs() < 1e-9);
        }
        assert!((pl[0].bbox.aspect() - s.icon.aspect_ratio).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn pie_sweeps_total_full_turn(p in 0.0001f64..=1.0, donut in any::<bool>()) {
            let spec = if donut { ChartSpec::donut(p) } else { ChartSpec::pie(p) };
            let shapes = chart_geometry(&spec, &BoundingBox::new(0.0, 0.0, 50.0, 50.0));
            let total: f64 = shapes.iter().map(sweep_of).sum();
            prop_assert!((total.abs() - TAU).abs() < 1e-9);
        }

        #[test]
        fn chart_shapes_stay_in_box(p in 0.0001f64..=1.0, kind in 0u8..3,
                                    x in 0.0f64..500.0, y in 0.0f64..500.0, w in 1.0f64..300.0, h in 1.0f64..300.0) {
            let b = BoundingBox::from_origin(x, y, w, h);
            let spec = match kind { 0 => ChartSpec::pie(p), 1 => ChartSpec::donut(p), _ => ChartSpec::bar(p, w / h) };
            for s in chart_geometry(&spec, &b) {
                prop_assert!(b.contains(&s.bounds(), 1e-9));
            }
        }

        #[test]
        fn pictograph_fill_and_containment(count in 3u32..=10, p in 0.0001f64..=1.0,
                                           x in 0.0f64..500.0, y in 0.0f64..500.0, w in 1.0f64..300.0, h in 1.0f64..300.0) {
            let s = spec(count, p);
            let b = BoundingBox::from_origin(x, y, w, h);
            let pl = pictograph_geometry(&s, &b);
            prop_assert_eq!(pl.len(), count as usize);
            let total: f64 = pl.iter().map(|i| i.fill).sum();
            prop_assert!((total - p * count as f64).abs() < 1e-9);
            for i in &pl {
                prop_assert!(b.contains(&i.bbox, 1e-9));
            }
        }
    }
}
