//! Exact planar convex geometry in rescaled coordinates `(x, y/√3)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::GeomError;
use crate::scalar::{Scalar, Sign};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point2<S> {
  pub x: S,
  pub y: S,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector2<S> {
  pub dx: S,
  pub dy: S,
}

impl<S: Scalar> Point2<S> {
  pub fn new(x: S, y: S) -> Self {
    Point2 { x, y }
  }
  pub fn origin() -> Self {
    Point2::new(S::zero(), S::zero())
  }
  pub fn to_vec(&self) -> Vector2<S> {
    Vector2::new(self.x.clone(), self.y.clone())
  }
  pub fn to_f64(&self) -> (f64, f64) {
    (self.x.to_f64(), self.y.to_f64())
  }
}

impl<S: Scalar> Vector2<S> {
  pub fn new(dx: S, dy: S) -> Self {
    Vector2 { dx, dy }
  }
  pub fn zero() -> Self {
    Vector2::new(S::zero(), S::zero())
  }
  pub fn is_zero(&self) -> bool {
    self.dx.is_zero() && self.dy.is_zero()
  }
  pub fn scale(&self, k: &S) -> Self {
    Vector2::new(self.dx.clone() * k.clone(), self.dy.clone() * k.clone())
  }
  pub fn cross(&self, o: &Vector2<S>) -> S {
    self.dx.clone() * o.dy.clone() - self.dy.clone() * o.dx.clone()
  }
  /// Squared length in the true metric (y is stored divided by √3).
  pub fn norm2(&self) -> S {
    self.dx.clone() * self.dx.clone() + S::from_int(3) * self.dy.clone() * self.dy.clone()
  }
}

impl<S: Scalar> Add<&Vector2<S>> for &Point2<S> {
  type Output = Point2<S>;
  fn add(self, v: &Vector2<S>) -> Point2<S> {
    Point2::new(self.x.clone() + v.dx.clone(), self.y.clone() + v.dy.clone())
  }
}

impl<S: Scalar> Sub<&Vector2<S>> for &Point2<S> {
  type Output = Point2<S>;
  fn sub(self, v: &Vector2<S>) -> Point2<S> {
    Point2::new(self.x.clone() - v.dx.clone(), self.y.clone() - v.dy.clone())
  }
}

impl<S: Scalar> Sub<&Point2<S>> for &Point2<S> {
  type Output = Vector2<S>;
  fn sub(self, p: &Point2<S>) -> Vector2<S> {
    Vector2::new(self.x.clone() - p.x.clone(), self.y.clone() - p.y.clone())
  }
}

impl<S: Scalar> Add for Vector2<S> {
  type Output = Vector2<S>;
  fn add(self, v: Vector2<S>) -> Vector2<S> {
    Vector2::new(self.dx + v.dx, self.dy + v.dy)
  }
}

impl<S: Scalar> Sub for Vector2<S> {
  type Output = Vector2<S>;
  fn sub(self, v: Vector2<S>) -> Vector2<S> {
    Vector2::new(self.dx - v.dx, self.dy - v.dy)
  }
}

impl<S: Scalar> Neg for Vector2<S> {
  type Output = Vector2<S>;
  fn neg(self) -> Vector2<S> {
    Vector2::new(-self.dx, -self.dy)
  }
}

impl<S: Scalar> fmt::Display for Point2<S> {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "({}, {})", self.x, self.y)
  }
}

impl<S: Scalar> fmt::Display for Vector2<S> {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "<{}, {}>", self.dx, self.dy)
  }
}

/// `orient(a, b, c) > 0` iff the turn a → b → c is counter-clockwise.
pub fn orient<S: Scalar>(a: &Point2<S>, b: &Point2<S>, c: &Point2<S>) -> S {
  (b - a).cross(&(c - a))
}

/// Closed half-plane `a·x + b·y + c ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfPlane<S> {
  pub a: S,
  pub b: S,
  pub c: S,
}

impl<S: Scalar> HalfPlane<S> {
  /// Half-plane to the left of the directed line p → q.
  pub fn left_of(p: &Point2<S>, q: &Point2<S>) -> Self {
    let a = p.y.clone() - q.y.clone();
    let b = q.x.clone() - p.x.clone();
    let c = -(a.clone() * p.x.clone() + b.clone() * p.y.clone());
    HalfPlane { a, b, c }
  }
  pub fn eval(&self, p: &Point2<S>) -> S {
    self.a.clone() * p.x.clone() + self.b.clone() * p.y.clone() + self.c.clone()
  }
  pub fn flip(&self) -> Self {
    HalfPlane { a: -self.a.clone(), b: -self.b.clone(), c: -self.c.clone() }
  }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
  Interior,
  Boundary,
  Outside,
}

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug)]
pub struct ConvexPolygon<S> {
  vertices: Vec<Point2<S>>,
}

impl<S: Scalar> ConvexPolygon<S> {
  /// Convex hull of the points; `None` when the hull has zero area.
  pub fn hull(points: &[Point2<S>]) -> Option<Self> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
      return None;
    }
    let mut lower: Vec<Point2<S>> = Vec::new();
    for p in &pts {
      while lower.len() >= 2 && !orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
        lower.pop();
      }
      lower.push(p.clone());
    }
    let mut upper: Vec<Point2<S>> = Vec::new();
    for p in pts.iter().rev() {
      while upper.len() >= 2 && !orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
        upper.pop();
      }
      upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
      return None;
    }
    Some(ConvexPolygon { vertices: lower })
  }

  /// Validating builder: the input must already be the vertex list of a strictly convex polygon.
  pub fn new(vertices: Vec<Point2<S>>) -> Result<Self, GeomError> {
    let h = Self::hull(&vertices).ok_or(GeomError::DegeneratePolygon)?;
    if h.vertices.len() != vertices.len() {
      return Err(GeomError::DegeneratePolygon);
    }
    Ok(h)
  }

  /// Parallelogram with corner `v` and edge vectors `u`, `w`.
  pub fn parallelogram(v: &Point2<S>, u: &Vector2<S>, w: &Vector2<S>) -> Option<Self> {
    let p1 = v + u;
    let p2 = &p1 + w;
    let p3 = v + w;
    Self::hull(&[v.clone(), p1, p2, p3])
  }

  pub fn vertices(&self) -> &[Point2<S>] {
    &self.vertices
  }

  pub fn len(&self) -> usize {
    self.vertices.len()
  }

  pub fn is_empty(&self) -> bool {
    self.vertices.is_empty()
  }

  pub fn edges(&self) -> impl Iterator<Item = (&Point2<S>, &Point2<S>)> {
    let n = self.vertices.len();
    (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
  }

  pub fn halfplanes(&self) -> Vec<HalfPlane<S>> {
    self.edges().map(|(p, q)| HalfPlane::left_of(p, q)).collect()
  }

  pub fn area(&self) -> S {
    let mut acc = S::zero();
    for (p, q) in self.edges() {
      acc = acc + p.x.clone() * q.y.clone() - p.y.clone() * q.x.clone();
    }
    acc.half()
  }

  /// Vertex average, an interior point.
  pub fn centroid(&self) -> Point2<S> {
    let n = S::from_int(self.vertices.len() as i64);
    let mut x = S::zero();
    let mut y = S::zero();
    for p in &self.vertices {
      x = x + p.x.clone();
      y = y + p.y.clone();
    }
    Point2::new(x / n.clone(), y / n)
  }

  pub fn bbox(&self) -> (Point2<S>, Point2<S>) {
    let mut lo = self.vertices[0].clone();
    let mut hi = self.vertices[0].clone();
    for p in &self.vertices[1..] {
      if p.x < lo.x {
        lo.x = p.x.clone();
      }
      if p.y < lo.y {
        lo.y = p.y.clone();
      }
      if p.x > hi.x {
        hi.x = p.x.clone();
      }
      if p.y > hi.y {
        hi.y = p.y.clone();
      }
    }
    (lo, hi)
  }

  fn bbox_overlap(&self, o: &Self) -> bool {
    let (a0, a1) = self.bbox();
    let (b0, b1) = o.bbox();
    a0.x < b1.x && b0.x < a1.x && a0.y < b1.y && b0.y < a1.y
  }

  pub fn locate(&self, p: &Point2<S>) -> Location {
    let mut on_edge = false;
    for (a, b) in self.edges() {
      match orient(a, b, p).sign() {
        Sign::Negative => return Location::Outside,
        Sign::Zero => on_edge = true,
        Sign::Positive => {}
      }
    }
    if on_edge {
      Location::Boundary
    } else {
      Location::Interior
    }
  }

  /// Clips to the closed half-plane; `None` when the remainder has zero area.
  pub fn clip(&self, h: &HalfPlane<S>) -> Option<Self> {
    let vals: Vec<S> = self.vertices.iter().map(|p| h.eval(p)).collect();
    if vals.iter().all(|v| !v.is_negative()) {
      return Some(self.clone());
    }
    if vals.iter().all(|v| !v.is_positive()) {
      return None;
    }
    let n = self.vertices.len();
    let mut out: Vec<Point2<S>> = Vec::with_capacity(n + 1);
    for i in 0..n {
      let j = (i + 1) % n;
      let (p, fp) = (&self.vertices[i], &vals[i]);
      let (qv, fq) = (&self.vertices[j], &vals[j]);
      if !fp.is_negative() {
        out.push(p.clone());
      }
      if (fp.is_positive() && fq.is_negative()) || (fp.is_negative() && fq.is_positive()) {
        let t = fp.clone() / (fp.clone() - fq.clone());
        let d = qv - p;
        out.push(p + &d.scale(&t));
      }
    }
    Self::cleanup(out)
  }

  fn cleanup(mut pts: Vec<Point2<S>>) -> Option<Self> {
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
      pts.pop();
    }
    let mut changed = true;
    while changed && pts.len() >= 3 {
      changed = false;
      let n = pts.len();
      for i in 0..n {
        let a = &pts[(i + n - 1) % n];
        let b = &pts[i];
        let c = &pts[(i + 1) % n];
        if orient(a, b, c).is_zero() {
          pts.remove(i);
          changed = true;
          break;
        }
      }
    }
    if pts.len() < 3 {
      return None;
    }
    Some(ConvexPolygon { vertices: pts })
  }

  /// Intersection with positive area, or `None` when interiors are disjoint.
  pub fn intersection(&self, o: &Self) -> Option<Self> {
    if !self.bbox_overlap(o) {
      return None;
    }
    let mut cur = self.clone();
    for h in o.halfplanes() {
      cur = cur.clip(&h)?;
    }
    Some(cur)
  }

  /// `self \ o` as interior-disjoint convex pieces.
  pub fn difference(&self, o: &Self) -> Vec<Self> {
    if !self.bbox_overlap(o) {
      return vec![self.clone()];
    }
    let mut out = Vec::new();
    let mut cur = self.clone();
    for h in o.halfplanes() {
      if let Some(outside) = cur.clip(&h.flip()) {
        out.push(outside);
      }
      match cur.clip(&h) {
        Some(c) => cur = c,
        None => break,
      }
    }
    out
  }

  /// Closed containment of `o` in `self`.
  pub fn contains(&self, o: &Self) -> bool {
    o.vertices.iter().all(|p| self.locate(p) != Location::Outside)
  }

  /// Points of the closed intersection (possibly degenerate), as hull vertices.
  pub fn closed_intersection_points(&self, o: &Self) -> Vec<Point2<S>> {
    let mut pts = self.vertices.clone();
    for h in o.halfplanes() {
      let mut next = Vec::new();
      let n = pts.len();
      for i in 0..n {
        let p = &pts[i];
        let qv = &pts[(i + 1) % n];
        let fp = h.eval(p);
        let fq = h.eval(qv);
        if !fp.is_negative() {
          next.push(p.clone());
        }
        if (fp.is_positive() && fq.is_negative()) || (fp.is_negative() && fq.is_positive()) {
          let t = fp.clone() / (fp - fq);
          next.push(p + &(qv - p).scale(&t));
        }
      }
      next.dedup();
      pts = next;
      if pts.is_empty() {
        break;
      }
    }
    pts.sort();
    pts.dedup();
    pts
  }

  pub fn translate(&self, v: &Vector2<S>) -> Self {
    ConvexPolygon { vertices: self.vertices.iter().map(|p| p + v).collect() }
  }

  /// Image under a map that is affine and injective.
  pub fn map_points(&self, f: impl Fn(&Point2<S>) -> Point2<S>) -> Self {
    let pts: Vec<Point2<S>> = self.vertices.iter().map(f).collect();
    Self::hull(&pts).expect("injective affine image of a polygon")
  }

  /// Vertex list rotated to start at the smallest vertex.
  pub fn canonical(&self) -> Vec<Point2<S>> {
    let k = (0..self.vertices.len()).min_by(|&i, &j| self.vertices[i].cmp(&self.vertices[j])).unwrap_or(0);
    let mut v = self.vertices[k..].to_vec();
    v.extend_from_slice(&self.vertices[..k]);
    v
  }

  pub fn max_side_norm2(&self) -> S {
    self.edges().map(|(p, q)| (q - p).norm2()).max().unwrap()
  }

  pub fn side_norm2s(&self) -> Vec<S> {
    self.edges().map(|(p, q)| (q - p).norm2()).collect()
  }
}

impl<S: Scalar> PartialEq for ConvexPolygon<S> {
  fn eq(&self, o: &Self) -> bool {
    self.vertices.len() == o.vertices.len() && self.canonical() == o.canonical()
  }
}

impl<S: Scalar> Eq for ConvexPolygon<S> {}

impl<S: Scalar> fmt::Display for ConvexPolygon<S> {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "[")?;
    for (i, p) in self.vertices.iter().enumerate() {
      if i > 0 {
        write!(f, ", ")?;
      }
      write!(f, "{p}")?;
    }
    write!(f, "]")
  }
}

pub fn polygon_intersection<S: Scalar>(p: &ConvexPolygon<S>, q: &ConvexPolygon<S>) -> Option<ConvexPolygon<S>> {
  p.intersection(q)
}

pub fn polygon_area<S: Scalar>(p: &ConvexPolygon<S>) -> S {
  p.area()
}

pub fn polygon_locate<S: Scalar>(p: &ConvexPolygon<S>, x: &Point2<S>) -> Location {
  p.locate(x)
}

/// `p ↦ L·p + t`, with `L` conformal for the true metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Similarity2<S> {
  pub m: [[S; 2]; 2],
  pub t: Vector2<S>,
}

impl<S: Scalar> Similarity2<S> {
  /// Rejects linear parts that are not a scaled isometry of the true metric.
  pub fn new(m: [[S; 2]; 2], t: Vector2<S>) -> Result<Self, GeomError> {
    let s = Similarity2 { m, t };
    // columns c1, c2 must satisfy <c1,c1> = <c2,c2>, <c1,c2> = 0 in the metric diag(1, 3)
    let [[a, b], [c, d]] = s.m.clone();
    let three = S::from_int(3);
    let g11 = a.clone() * a.clone() + three.clone() * c.clone() * c.clone();
    let g22 = (b.clone() * b.clone() + three.clone() * d.clone() * d.clone()) / three.clone();
    let g12 = a * b + three * c * d;
    if g11 != g22 || !g12.is_zero() || g11.is_zero() {
      return Err(GeomError::NotSimilarity);
    }
    Ok(s)
  }

  pub fn identity() -> Self {
    Similarity2 { m: [[S::one(), S::zero()], [S::zero(), S::one()]], t: Vector2::zero() }
  }

  pub fn translation(v: Vector2<S>) -> Self {
    Similarity2 { t: v, ..Self::identity() }
  }

  /// Counter-clockwise rotation by `k·60°` about `c`.
  pub fn rotation60(k: i64, c: &Point2<S>) -> Self {
    let r = Similarity2 {
      m: [[S::one().half(), -S::from_int(3).half()], [S::one().half(), S::one().half()]],
      t: Vector2::zero(),
    };
    let mut lin = Self::identity();
    for _ in 0..k.rem_euclid(6) {
      lin = r.compose(&lin);
    }
    lin.about(c)
  }

  /// Homothety with ratio `k` about `c`.
  pub fn homothety(k: S, c: &Point2<S>) -> Self {
    Similarity2 { m: [[k.clone(), S::zero()], [S::zero(), k]], t: Vector2::zero() }.about(c)
  }

  /// Reflection in the vertical line `x = x0`.
  pub fn reflect_vertical(x0: S) -> Self {
    Similarity2 {
      m: [[-S::one(), S::zero()], [S::zero(), S::one()]],
      t: Vector2::new(x0.clone() + x0, S::zero()),
    }
  }

  /// Conjugates the linear part so that it fixes `c`.
  pub fn about(&self, c: &Point2<S>) -> Self {
    let img = self.apply_vec(&c.to_vec());
    Similarity2 { m: self.m.clone(), t: c.to_vec() - img }
  }

  pub fn apply_vec(&self, v: &Vector2<S>) -> Vector2<S> {
    let [[a, b], [c, d]] = &self.m;
    Vector2::new(
      a.clone() * v.dx.clone() + b.clone() * v.dy.clone(),
      c.clone() * v.dx.clone() + d.clone() * v.dy.clone(),
    )
  }

  pub fn apply(&self, p: &Point2<S>) -> Point2<S> {
    let v = self.apply_vec(&p.to_vec());
    Point2::new(v.dx + self.t.dx.clone(), v.dy + self.t.dy.clone())
  }

  pub fn det(&self) -> S {
    let [[a, b], [c, d]] = self.m.clone();
    a * d - b * c
  }

  /// Square of the linear scale factor; equals the area ratio.
  pub fn scale2(&self) -> S {
    self.det().abs()
  }

  /// `self ∘ o`.
  pub fn compose(&self, o: &Self) -> Self {
    let [[a, b], [c, d]] = self.m.clone();
    let [[e, f], [g, h]] = o.m.clone();
    let m = [
      [a.clone() * e.clone() + b.clone() * g.clone(), a * f.clone() + b * h.clone()],
      [c.clone() * e + d.clone() * g, c * f + d * h],
    ];
    let t = self.apply_vec(&o.t) + self.t.clone();
    Similarity2 { m, t }
  }

  pub fn inverse(&self) -> Self {
    let det = self.det();
    let [[a, b], [c, d]] = self.m.clone();
    let m = [[d / det.clone(), -b / det.clone()], [-c / det.clone(), a / det]];
    let lin = Similarity2 { m, t: Vector2::zero() };
    let t = -lin.apply_vec(&self.t);
    Similarity2 { t, ..lin }
  }

  pub fn apply_polygon(&self, p: &ConvexPolygon<S>) -> ConvexPolygon<S> {
    let mut v: Vec<Point2<S>> = p.vertices().iter().map(|x| self.apply(x)).collect();
    if self.det().is_negative() {
      v.reverse();
    }
    ConvexPolygon { vertices: v }
  }
}

pub fn apply_similarity<S: Scalar>(s: &Similarity2<S>, p: &ConvexPolygon<S>) -> ConvexPolygon<S> {
  s.apply_polygon(p)
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::scalar::{q, qi, Rational};

  fn pt(x: Rational, y: Rational) -> Point2<Rational> {
    Point2::new(x, y)
  }

  #[test]
  fn clip_and_difference_conserve_area() {
    let sq = ConvexPolygon::hull(&[pt(qi(0), qi(0)), pt(qi(2), qi(0)), pt(qi(2), qi(2)), pt(qi(0), qi(2))]).unwrap();
    let tri = ConvexPolygon::hull(&[pt(qi(1), qi(1)), pt(qi(3), qi(1)), pt(qi(1), qi(3))]).unwrap();
    let i = sq.intersection(&tri).unwrap();
    let d: Rational = sq.difference(&tri).iter().map(|p| p.area()).sum();
    assert_eq!(i.area() + d, sq.area());
    assert_eq!(i.area(), q(1, 1));
  }

  #[test]
  fn rotation_is_similarity() {
    let r = Similarity2::<Rational>::rotation60(1, &Point2::origin());
    assert!(Similarity2::new(r.m.clone(), r.t.clone()).is_ok());
    let mut acc = Similarity2::identity();
    for _ in 0..6 {
      acc = r.compose(&acc);
    }
    assert_eq!(acc, Similarity2::identity());
  }
}
