use std::fmt::Write as _;

use tripet::{ConvexPolygon, Scalar};

const SQRT3: f64 = 1.7320508075688772;
const PANEL: f64 = 480.0;
const GAP: f64 = 24.0;

pub const PALETTE: [&str; 12] = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
];

pub struct Shape {
  pub points: Vec<(f64, f64)>,
  pub class: usize,
  pub stroke_only: bool,
}

impl Shape {
  pub fn from_polygon<S: Scalar>(p: &ConvexPolygon<S>, class: usize) -> Self {
    Shape { points: p.vertices().iter().map(|v| (v.x.to_f64(), v.y.to_f64() * SQRT3)).collect(), class, stroke_only: false }
  }
  pub fn outline<S: Scalar>(p: &ConvexPolygon<S>, class: usize) -> Self {
    Shape { stroke_only: true, ..Self::from_polygon(p, class) }
  }
}

/// Viewport and palette shared by every panel.
pub struct RenderSpec {
  pub viewport: (f64, f64, f64, f64),
  pub palette: &'static [&'static str],
}

impl RenderSpec {
  pub fn covering(panels: &[Vec<Shape>]) -> Self {
    let pts = panels.iter().flatten().flat_map(|s| s.points.iter());
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in pts {
      x0 = x0.min(x);
      y0 = y0.min(y);
      x1 = x1.max(x);
      y1 = y1.max(y);
    }
    if x0 > x1 {
      (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    RenderSpec { viewport: (x0, y0, x1, y1), palette: &PALETTE }
  }
}

pub fn svg(panels: &[Vec<Shape>]) -> String {
  let spec = RenderSpec::covering(panels);
  let (x0, y0, x1, y1) = spec.viewport;
  let k = PANEL / (x1 - x0).max(y1 - y0).max(1e-12);
  let h = (y1 - y0) * k;
  let w = panels.len() as f64 * (PANEL + GAP) - GAP;
  let mut out = String::new();
  writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="-8 -8 {:.1} {:.1}">"#, w + 16.0, h + 16.0, w + 16.0, h + 16.0).unwrap();
  for (i, shapes) in panels.iter().enumerate() {
    let dx = i as f64 * (PANEL + GAP);
    writeln!(out, r#"<g transform="translate({dx:.1},0)">"#).unwrap();
    for s in shapes {
      let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.4},{:.4}", (x - x0) * k, (y1 - y) * k)).collect();
      let color = spec.palette[s.class % spec.palette.len()];
      if s.stroke_only {
        writeln!(out, r#"<polygon points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" ")).unwrap();
      } else {
        writeln!(out, r#"<polygon points="{}" fill="{color}" fill-opacity="0.8" stroke="black" stroke-width="0.4"/>"#, pts.join(" ")).unwrap();
      }
    }
    writeln!(out, "</g>").unwrap();
  }
  out.push_str("</svg>\n");
  out
}
