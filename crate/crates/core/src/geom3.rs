//! Exact convex polytopes in (x, y, s) space.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::GeomError;
use crate::geom2::{ConvexPolygon, Point2};
use crate::scalar::{qi, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point3 {
  pub x: Rational,
  pub y: Rational,
  pub s: Rational,
}

impl Point3 {
  pub fn new(x: Rational, y: Rational, s: Rational) -> Self {
    Point3 { x, y, s }
  }
  fn arr(&self) -> [&Rational; 3] {
    [&self.x, &self.y, &self.s]
  }
  fn sub(&self, o: &Point3) -> [Rational; 3] {
    [&self.x - &o.x, &self.y - &o.y, &self.s - &o.s]
  }
}

impl fmt::Display for Point3 {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "({}, {}, {})", self.x, self.y, self.s)
  }
}

fn cross(a: &[Rational; 3], b: &[Rational; 3]) -> [Rational; 3] {
  [&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]]
}

fn dot(a: &[Rational; 3], b: &[Rational; 3]) -> Rational {
  &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn det3(a: &[Rational; 3], b: &[Rational; 3], c: &[Rational; 3]) -> Rational {
  dot(a, &cross(b, c))
}

/// Closed half-space `n·p + d ≥ 0`, scaled so the first nonzero coefficient has absolute value 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plane {
  pub n: [Rational; 3],
  pub d: Rational,
}

impl Plane {
  pub fn new(n: [Rational; 3], d: Rational) -> Option<Self> {
    let k = n.iter().chain(std::iter::once(&d)).find(|c| !c.is_zero())?.abs();
    if n.iter().all(|c| c.is_zero()) {
      return None;
    }
    Some(Plane { n: n.map(|c| c / &k), d: d / k })
  }
  /// `a·x + b·y + c·s + d ≥ 0` from integer-like rationals.
  pub fn from_coeffs(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
    Plane::new([a, b, c], d).expect("nonzero normal")
  }
  pub fn eval(&self, p: &Point3) -> Rational {
    let a = p.arr();
    &self.n[0] * a[0] + &self.n[1] * a[1] + &self.n[2] * a[2] + &self.d
  }
  pub fn flip(&self) -> Plane {
    Plane { n: self.n.clone().map(|c| -c), d: -self.d.clone() }
  }
  fn as_row(&self) -> [Rational; 4] {
    [self.n[0].clone(), self.n[1].clone(), self.n[2].clone(), self.d.clone()]
  }
}

/// Convex polytope with cross-validated vertex and facet descriptions.
#[derive(Clone, Debug)]
pub struct Polytope3 {
  vertices: Vec<Point3>,
  facets: Vec<Plane>,
  degenerate: bool,
}

fn affine_rank(pts: &[Point3]) -> usize {
  if pts.is_empty() {
    return 0;
  }
  let o = &pts[0];
  let mut basis: Vec<[Rational; 3]> = Vec::new();
  for p in &pts[1..] {
    let v = p.sub(o);
    let independent = match basis.len() {
      0 => v.iter().any(|c| !c.is_zero()),
      1 => cross(&basis[0], &v).iter().any(|c| !c.is_zero()),
      2 => !det3(&basis[0], &basis[1], &v).is_zero(),
      _ => false,
    };
    if independent {
      basis.push(v);
      if basis.len() == 3 {
        break;
      }
    }
  }
  basis.len()
}

fn solve3(planes: [&Plane; 3]) -> Option<Point3> {
  let [a, b, c] = planes;
  let det = det3(&a.n, &b.n, &c.n);
  if det.is_zero() {
    return None;
  }
  let rhs = [-a.d.clone(), -b.d.clone(), -c.d.clone()];
  let mut out: Vec<Rational> = Vec::with_capacity(3);
  for k in 0..3 {
    let mut m = [a.n.clone(), b.n.clone(), c.n.clone()];
    for (row, r) in m.iter_mut().zip(rhs.iter()) {
      row[k] = r.clone();
    }
    out.push(det3(&m[0], &m[1], &m[2]) / &det);
  }
  let [x, y, s] = <[Rational; 3]>::try_from(out).ok()?;
  Some(Point3::new(x, y, s))
}

impl Polytope3 {
  /// Convex hull; fails on coplanar input unless `allow_degenerate`.
  pub fn from_vertices(pts: &[Point3], allow_degenerate: bool) -> Result<Self, GeomError> {
    let mut pts = pts.to_vec();
    pts.sort();
    pts.dedup();
    if affine_rank(&pts) < 3 {
      if allow_degenerate {
        return Ok(Polytope3 { vertices: pts, facets: Vec::new(), degenerate: true });
      }
      return Err(GeomError::DegeneratePolytope);
    }
    let n = pts.len();
    let mut facets: Vec<Plane> = Vec::new();
    for i in 0..n {
      for j in i + 1..n {
        for k in j + 1..n {
          let nrm = cross(&pts[j].sub(&pts[i]), &pts[k].sub(&pts[i]));
          let Some(pl) = Plane::new(nrm.clone(), -dot(&nrm, &[pts[i].x.clone(), pts[i].y.clone(), pts[i].s.clone()])) else {
            continue;
          };
          let mut pos = false;
          let mut neg = false;
          for p in &pts {
            let v = pl.eval(p);
            if v.is_positive() {
              pos = true;
            } else if v.is_negative() {
              neg = true;
            }
            if pos && neg {
              break;
            }
          }
          if pos && neg {
            continue;
          }
          let pl = if neg { pl.flip() } else { pl };
          if !facets.contains(&pl) {
            facets.push(pl);
          }
        }
      }
    }
    Ok(Self::finish(pts, facets))
  }

  /// Keeps extreme points and supporting facets.
  fn finish(pts: Vec<Point3>, facets: Vec<Plane>) -> Self {
    let vertices: Vec<Point3> = pts
      .into_iter()
      .filter(|p| {
        let on: Vec<&Plane> = facets.iter().filter(|f| f.eval(p).is_zero()).collect();
        normals_rank(&on) == 3
      })
      .collect();
    let facets: Vec<Plane> = facets
      .into_iter()
      .filter(|f| {
        let on: Vec<Point3> = vertices.iter().filter(|p| f.eval(p).is_zero()).cloned().collect();
        affine_rank(&on) == 2
      })
      .collect();
    Polytope3 { vertices, facets, degenerate: false }
  }

  /// Intersection of half-spaces; `None` unless full-dimensional.
  pub fn from_halfspaces(planes: &[Plane]) -> Option<Self> {
    let mut hs = planes.to_vec();
    hs.sort();
    hs.dedup();
    let m = hs.len();
    let mut pts: Vec<Point3> = Vec::new();
    for i in 0..m {
      for j in i + 1..m {
        for k in j + 1..m {
          let Some(p) = solve3([&hs[i], &hs[j], &hs[k]]) else { continue };
          if hs.iter().all(|h| !h.eval(&p).is_negative()) {
            pts.push(p);
          }
        }
      }
    }
    pts.sort();
    pts.dedup();
    if affine_rank(&pts) < 3 {
      return None;
    }
    Some(Self::finish(pts, hs))
  }

  pub fn vertices(&self) -> &[Point3] {
    &self.vertices
  }

  pub fn facets(&self) -> &[Plane] {
    &self.facets
  }

  pub fn is_degenerate(&self) -> bool {
    self.degenerate
  }

  /// Every vertex lies on at least three facets and every facet carries at least three vertices.
  pub fn cross_validate(&self) -> bool {
    if self.degenerate {
      return true;
    }
    let vert_ok = self.vertices.iter().all(|p| {
      self.facets.iter().all(|f| !f.eval(p).is_negative()) && self.facets.iter().filter(|f| f.eval(p).is_zero()).count() >= 3
    });
    let fac_ok = self.facets.iter().all(|f| self.vertices.iter().filter(|p| f.eval(p).is_zero()).count() >= 3);
    vert_ok && fac_ok
  }

  pub fn s_range(&self) -> (Rational, Rational) {
    let lo = self.vertices.iter().map(|p| p.s.clone()).min().unwrap();
    let hi = self.vertices.iter().map(|p| p.s.clone()).max().unwrap();
    (lo, hi)
  }

  fn bbox(&self) -> ([Rational; 3], [Rational; 3]) {
    let mut lo = [self.vertices[0].x.clone(), self.vertices[0].y.clone(), self.vertices[0].s.clone()];
    let mut hi = lo.clone();
    for p in &self.vertices[1..] {
      for (k, c) in p.arr().into_iter().enumerate() {
        if *c < lo[k] {
          lo[k] = c.clone();
        }
        if *c > hi[k] {
          hi[k] = c.clone();
        }
      }
    }
    (lo, hi)
  }

  fn bbox_overlap(&self, o: &Self) -> bool {
    let (a0, a1) = self.bbox();
    let (b0, b1) = o.bbox();
    (0..3).all(|k| a0[k] < b1[k] && b0[k] < a1[k])
  }

  pub fn centroid(&self) -> Point3 {
    let n = Rational::from_integer(self.vertices.len().into());
    let mut acc = [qi(0), qi(0), qi(0)];
    for p in &self.vertices {
      for (k, c) in p.arr().into_iter().enumerate() {
        acc[k] += c;
      }
    }
    let [x, y, s] = acc;
    Point3::new(x / &n, y / &n, s / n)
  }

  /// Exact volume by fanning facet triangles from the centroid.
  pub fn volume(&self) -> Rational {
    if self.degenerate {
      return qi(0);
    }
    let o = self.centroid();
    let mut vol = qi(0);
    for f in &self.facets {
      let on: Vec<&Point3> = self.vertices.iter().filter(|p| f.eval(p).is_zero()).collect();
      let drop = (0..3).max_by_key(|&k| f.n[k].abs()).unwrap();
      let proj = |p: &Point3| -> Point2<Rational> {
        let a = p.arr();
        let r: Vec<Rational> = (0..3).filter(|&k| k != drop).map(|k| a[k].clone()).collect();
        Point2::new(r[0].clone(), r[1].clone())
      };
      let projected: Vec<Point2<Rational>> = on.iter().map(|p| proj(p)).collect();
      let Some(h) = ConvexPolygon::hull(&projected) else { continue };
      let ordered: Vec<&Point3> = h.vertices().iter().map(|q| on[projected.iter().position(|r| r == q).unwrap()]).collect();
      for i in 1..ordered.len() - 1 {
        let d = det3(&ordered[0].sub(&o), &ordered[i].sub(&o), &ordered[i + 1].sub(&o));
        vol += d.abs();
      }
    }
    vol / qi(6)
  }

  /// Closed containment.
  pub fn contains(&self, o: &Polytope3) -> bool {
    o.vertices.iter().all(|p| self.facets.iter().all(|f| !f.eval(p).is_negative()))
  }

  pub fn contains_point(&self, p: &Point3) -> bool {
    self.facets.iter().all(|f| !f.eval(p).is_negative())
  }

  /// Full-dimensional intersection, or `None` when interiors are disjoint.
  pub fn intersection(&self, o: &Polytope3) -> Option<Polytope3> {
    if self.degenerate || o.degenerate || !self.bbox_overlap(o) {
      return None;
    }
    if o.contains(self) {
      return Some(self.clone());
    }
    if self.contains(o) {
      return Some(o.clone());
    }
    for f in &o.facets {
      if self.vertices.iter().all(|p| !f.eval(p).is_positive()) {
        return None;
      }
    }
    for f in &self.facets {
      if o.vertices.iter().all(|p| !f.eval(p).is_positive()) {
        return None;
      }
    }
    let mut hs = self.facets.clone();
    hs.extend(o.facets.iter().cloned());
    Polytope3::from_halfspaces(&hs)
  }

  pub fn clip(&self, h: &Plane) -> Option<Polytope3> {
    if self.vertices.iter().all(|p| !h.eval(p).is_negative()) {
      return Some(self.clone());
    }
    if self.vertices.iter().all(|p| !h.eval(p).is_positive()) {
      return None;
    }
    let mut hs = self.facets.clone();
    hs.push(h.clone());
    Polytope3::from_halfspaces(&hs)
  }

  /// `self \ o` as interior-disjoint convex pieces.
  pub fn difference(&self, o: &Polytope3) -> Vec<Polytope3> {
    if self.intersection(o).is_none() {
      return vec![self.clone()];
    }
    let mut out = Vec::new();
    let mut cur = self.clone();
    for f in &o.facets {
      if let Some(outside) = cur.clip(&f.flip()) {
        out.push(outside);
      }
      match cur.clip(f) {
        Some(c) => cur = c,
        None => break,
      }
    }
    out
  }

  /// The slice at `s = s0`, or `None` when it has zero area.
  pub fn cross_section(&self, s0: &Rational) -> Option<ConvexPolygon<Rational>> {
    let mut pts = Vec::new();
    for (i, p) in self.vertices.iter().enumerate() {
      if &p.s == s0 {
        pts.push(Point2::new(p.x.clone(), p.y.clone()));
      }
      for q in &self.vertices[i + 1..] {
        let (lo, hi) = if p.s < q.s { (p, q) } else { (q, p) };
        if &lo.s < s0 && s0 < &hi.s {
          let t = (s0 - &lo.s) / (&hi.s - &lo.s);
          pts.push(Point2::new(&lo.x + (&hi.x - &lo.x) * &t, &lo.y + (&hi.y - &lo.y) * &t));
        }
      }
    }
    ConvexPolygon::hull(&pts)
  }

  /// Image under a projective map positive on the polytope.
  pub fn map(&self, m: &Map3) -> Result<Polytope3, GeomError> {
    let vertices = self.vertices.iter().map(|p| m.apply(p)).collect::<Result<Vec<_>, _>>()?;
    if self.degenerate {
      return Polytope3::from_vertices(&vertices, true);
    }
    let inv = m.inverse().ok_or(GeomError::DegeneratePolytope)?;
    let facets = self.facets.iter().map(|f| inv.pull_plane(f)).collect::<Vec<_>>();
    let mut p = Polytope3 { vertices, facets, degenerate: false };
    p.vertices.sort();
    Ok(p)
  }
}

impl PartialEq for Polytope3 {
  fn eq(&self, o: &Self) -> bool {
    let mut a = self.vertices.clone();
    let mut b = o.vertices.clone();
    a.sort();
    b.sort();
    a == b
  }
}

fn normals_rank(planes: &[&Plane]) -> usize {
  let mut basis: Vec<&[Rational; 3]> = Vec::new();
  for p in planes {
    let independent = match basis.len() {
      0 => true,
      1 => cross(basis[0], &p.n).iter().any(|c| !c.is_zero()),
      2 => !det3(basis[0], basis[1], &p.n).is_zero(),
      _ => false,
    };
    if independent {
      basis.push(&p.n);
      if basis.len() == 3 {
        break;
      }
    }
  }
  basis.len()
}

/// Homogeneous 4×4 map on (x, y, s, 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Map3 {
  pub m: [[Rational; 4]; 4],
}

impl Map3 {
  pub fn identity() -> Self {
    let mut m: [[Rational; 4]; 4] = Default::default();
    for (i, row) in m.iter_mut().enumerate() {
      for (j, c) in row.iter_mut().enumerate() {
        *c = if i == j { Rational::one() } else { Rational::zero() };
      }
    }
    Map3 { m }
  }

  pub fn apply(&self, p: &Point3) -> Result<Point3, GeomError> {
    let v = [p.x.clone(), p.y.clone(), p.s.clone(), Rational::one()];
    let r: Vec<Rational> = self.m.iter().map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum()).collect();
    if !r[3].is_positive() {
      return Err(GeomError::ProjectiveInfinity);
    }
    Ok(Point3::new(&r[0] / &r[3], &r[1] / &r[3], &r[2] / &r[3]))
  }

  pub fn compose(&self, o: &Map3) -> Map3 {
    let mut m: [[Rational; 4]; 4] = Default::default();
    for (i, row) in m.iter_mut().enumerate() {
      for (j, c) in row.iter_mut().enumerate() {
        *c = (0..4).map(|k| &self.m[i][k] * &o.m[k][j]).sum();
      }
    }
    Map3 { m }
  }

  /// Plane whose preimage under `self⁻¹` is `f`; `self` is the inverse map.
  fn pull_plane(&self, f: &Plane) -> Plane {
    let row = f.as_row();
    let c: Vec<Rational> = (0..4).map(|j| (0..4).map(|k| &row[k] * &self.m[k][j]).sum()).collect();
    Plane::new([c[0].clone(), c[1].clone(), c[2].clone()], c[3].clone()).expect("plane image")
  }

  pub fn inverse(&self) -> Option<Map3> {
    let mut a: Vec<Vec<Rational>> = self.m.iter().map(|r| r.to_vec()).collect();
    let mut inv: Vec<Vec<Rational>> = Map3::identity().m.iter().map(|r| r.to_vec()).collect();
    for col in 0..4 {
      let piv = (col..4).find(|&r| !a[r][col].is_zero())?;
      a.swap(col, piv);
      inv.swap(col, piv);
      let p = a[col][col].clone();
      for j in 0..4 {
        a[col][j] = &a[col][j] / &p;
        inv[col][j] = &inv[col][j] / &p;
      }
      for r in 0..4 {
        if r != col && !a[r][col].is_zero() {
          let k = a[r][col].clone();
          for j in 0..4 {
            let t = &a[col][j] * &k;
            a[r][j] -= t;
            let t = &inv[col][j] * &k;
            inv[r][j] -= t;
          }
        }
      }
    }
    let mut m: [[Rational; 4]; 4] = Default::default();
    for i in 0..4 {
      for j in 0..4 {
        m[i][j] = inv[i][j].clone();
      }
    }
    Some(Map3 { m })
  }
}

pub fn polytope_from_vertices(pts: &[Point3]) -> Result<Polytope3, GeomError> {
  Polytope3::from_vertices(pts, false)
}

pub fn polytope_volume(p: &Polytope3) -> Rational {
  p.volume()
}

pub fn polytope_intersection(p: &Polytope3, q: &Polytope3) -> Option<Polytope3> {
  p.intersection(q)
}

pub fn polytope_contains(p: &Polytope3, q: &Polytope3) -> bool {
  p.contains(q)
}

pub fn cross_section(p: &Polytope3, s0: &Rational) -> Option<ConvexPolygon<Rational>> {
  p.cross_section(s0)
}

#[cfg(test)]
mod tests {
  use super::*;
  use crate::scalar::q;

  fn p(x: i64, y: i64, s: i64) -> Point3 {
    Point3::new(qi(x), qi(y), qi(s))
  }

  #[test]
  fn unit_tetrahedron() {
    let t = Polytope3::from_vertices(&[p(0, 0, 0), p(1, 0, 0), p(0, 1, 0), p(0, 0, 1)], false).unwrap();
    assert_eq!(t.facets().len(), 4);
    assert_eq!(t.volume(), q(1, 6));
    assert!(t.cross_validate());
    let c = t.cross_section(&qi(0)).unwrap();
    assert_eq!(c.area(), q(1, 2));
  }

  #[test]
  fn cube_split() {
    let pts: Vec<Point3> = (0..8).map(|i| p(i & 1, (i >> 1) & 1, (i >> 2) & 1)).collect();
    let c = Polytope3::from_vertices(&pts, false).unwrap();
    assert_eq!(c.facets().len(), 6);
    assert_eq!(c.volume(), qi(1));
    let h = Plane::from_coeffs(qi(1), qi(1), qi(1), q(-3, 2));
    let a = c.clip(&h).unwrap();
    let b = c.clip(&h.flip()).unwrap();
    assert_eq!(a.volume() + b.volume(), qi(1));
  }
}
