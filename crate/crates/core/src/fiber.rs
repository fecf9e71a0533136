//! Piecewise translations on fiber bundles over parameter intervals, table IO and interval certificates.

use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CertError;
use crate::geom3::{Map3, Plane, Point3, Polytope3};
use crate::pet::{build_triple_pet, pieces_same_map, PieceMap};
use crate::scalar::{q, qi, LinFormS, Rational, Scalar};
use crate::geom2::Vector2;

pub type Mat2 = [[Rational; 2]; 2];

pub fn rot60() -> Mat2 {
  [[q(1, 2), q(-3, 2)], [q(1, 2), q(1, 2)]]
}

pub fn rot120() -> Mat2 {
  mat_mul(&rot60(), &rot60())
}

pub fn flip() -> Mat2 {
  [[q(-1, 2), q(-3, 2)], [q(-1, 2), q(1, 2)]]
}

pub fn mirror() -> Mat2 {
  [[qi(-1), qi(0)], [qi(0), qi(1)]]
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
  let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
  [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// A translation vector whose components are affine in s.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BShift {
  pub x: LinFormS,
  pub y: LinFormS,
}

impl BShift {
  pub fn new(x: LinFormS, y: LinFormS) -> Self {
    BShift { x, y }
  }
  pub fn zero() -> Self {
    BShift::new(LinFormS::zero(), LinFormS::zero())
  }
  /// `(m0·s + m1, n0·s + n1)`.
  pub fn from_tuple(t: &[Rational; 4]) -> Self {
    BShift::new(LinFormS::new(t[0].clone(), t[1].clone()), LinFormS::new(t[2].clone(), t[3].clone()))
  }
  /// `((a·s + b)/2, (c·s + d)/2)`.
  pub fn from_coeff(c: &[i64; 4]) -> Self {
    let h = |a: i64, b: i64| LinFormS::new(q(a, 2), q(b, 2));
    BShift::new(h(c[0], c[1]), h(c[2], c[3]))
  }
  pub fn tuple(&self) -> [Rational; 4] {
    [self.x.m.clone(), self.x.n.clone(), self.y.m.clone(), self.y.n.clone()]
  }
  pub fn eval(&self, s: &Rational) -> Vector2<Rational> {
    Vector2::new(self.x.eval(s), self.y.eval(s))
  }
  pub fn add(&self, o: &BShift) -> BShift {
    BShift::new(self.x.clone() + o.x.clone(), self.y.clone() + o.y.clone())
  }
  pub fn neg(&self) -> BShift {
    BShift::new(-self.x.clone(), -self.y.clone())
  }
  pub fn linear(&self, m: &Mat2) -> BShift {
    BShift::new(
      self.x.scale(&m[0][0]) + self.y.scale(&m[0][1]),
      self.x.scale(&m[1][0]) + self.y.scale(&m[1][1]),
    )
  }
  /// Multiplies both components by the affine factor `k`; one side must be constant.
  pub fn times(&self, k: &LinFormS) -> Option<BShift> {
    Some(BShift::new(self.x.try_mul(k).ok()?, self.y.try_mul(k).ok()?))
  }
  pub fn as_map(&self) -> Map3 {
    affine_map(&[[qi(1), qi(0)], [qi(0), qi(1)]], self)
  }
}

/// `(x, y, s) ↦ (m·(x, y) + t(s), s)`.
pub fn affine_map(m: &Mat2, t: &BShift) -> Map3 {
  let mut a = Map3::identity();
  a.m[0] = [m[0][0].clone(), m[0][1].clone(), t.x.m.clone(), t.x.n.clone()];
  a.m[1] = [m[1][0].clone(), m[1][1].clone(), t.y.m.clone(), t.y.n.clone()];
  a
}

/// Rotation or reflection `p ↦ m·(p − c(s)) + c(s)` fixing the moving point `c`.
pub fn about_map(m: &Mat2, c: &BShift) -> Map3 {
  let mc = c.linear(m);
  affine_map(m, &c.add(&mc.neg()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BPiece {
  pub body: Polytope3,
  pub shift: BShift,
}

impl BPiece {
  pub fn image(&self) -> Polytope3 {
    self.body.map(&self.shift.as_map()).expect("translation")
  }
}

/// F(x, y, s) = (f_s(x, y), s) as a list of polytope pieces.
#[derive(Clone, Debug)]
pub struct BundleMap {
  pub pieces: Vec<BPiece>,
}

impl BundleMap {
  pub fn inverse(&self) -> BundleMap {
    BundleMap { pieces: self.pieces.iter().map(|p| BPiece { body: p.image(), shift: p.shift.neg() }).collect() }
  }

  /// Applies `self` first, then `then`.
  pub fn compose(&self, then: &BundleMap) -> BundleMap {
    let pieces = self
      .pieces
      .par_iter()
      .flat_map_iter(|p| {
        let img = p.image();
        then
          .pieces
          .iter()
          .filter_map(|r| {
            let i = img.intersection(&r.body)?;
            Some(BPiece { body: i.map(&p.shift.neg().as_map()).ok()?, shift: p.shift.add(&r.shift) })
          })
          .collect::<Vec<_>>()
      })
      .collect();
    BundleMap { pieces }
  }

  pub fn merged(&self) -> BundleMap {
    BundleMap { pieces: merge_bpieces(self.pieces.clone()) }
  }

  /// Restriction to `lo ≤ s ≤ hi`.
  pub fn restrict(&self, lo: &Rational, hi: &Rational) -> BundleMap {
    let slab = [s_at_least(lo), s_at_most(hi)];
    let pieces = self
      .pieces
      .iter()
      .filter(|p| !p.body.is_degenerate())
      .filter_map(|p| {
        let b = p.body.clip(&slab[0])?.clip(&slab[1])?;
        Some(BPiece { body: b, shift: p.shift.clone() })
      })
      .collect();
    BundleMap { pieces }
  }

  pub fn slice(&self, s: &Rational) -> Vec<PieceMap<Rational>> {
    self
      .pieces
      .iter()
      .filter_map(|p| Some(PieceMap { cell: p.body.cross_section(s)?, shift: p.shift.eval(s) }))
      .collect()
  }

  pub fn volume(&self) -> Rational {
    self.pieces.iter().map(|p| p.body.volume()).sum()
  }
}

pub fn s_at_least(lo: &Rational) -> Plane {
  Plane::from_coeffs(qi(0), qi(0), qi(1), -lo.clone())
}

pub fn s_at_most(hi: &Rational) -> Plane {
  Plane::from_coeffs(qi(0), qi(0), qi(-1), hi.clone())
}

fn hull_volume(a: &Polytope3, b: &Polytope3) -> Option<Polytope3> {
  let mut pts = a.vertices().to_vec();
  pts.extend_from_slice(b.vertices());
  let h = Polytope3::from_vertices(&pts, false).ok()?;
  (h.volume() == a.volume() + b.volume()).then_some(h)
}

/// Greedy merge of same-shift bodies whose union is convex.
pub fn merge_bpieces(pieces: Vec<BPiece>) -> Vec<BPiece> {
  let mut groups: Vec<(BShift, Vec<Polytope3>)> = Vec::new();
  for p in pieces {
    if p.body.is_degenerate() {
      continue;
    }
    match groups.iter_mut().find(|g| g.0 == p.shift) {
      Some(g) => g.1.push(p.body),
      None => groups.push((p.shift, vec![p.body])),
    }
  }
  let mut out = Vec::new();
  for (shift, mut bodies) in groups {
    'outer: loop {
      for i in 0..bodies.len() {
        for j in i + 1..bodies.len() {
          if let Some(h) = hull_volume(&bodies[i], &bodies[j]) {
            bodies[i] = h;
            bodies.swap_remove(j);
            continue 'outer;
          }
        }
      }
      break;
    }
    out.extend(bodies.into_iter().map(|body| BPiece { body, shift: shift.clone() }));
  }
  out
}

/// Equality of two bundle maps as sets of (point, translation) pairs, up to null sets.
pub fn bundle_same_map(a: &[BPiece], b: &[BPiece]) -> bool {
  let va: Rational = a.iter().map(|p| p.body.volume()).sum();
  let vb: Rational = b.iter().map(|p| p.body.volume()).sum();
  if va != vb {
    return false;
  }
  let acc: Rational = a
    .par_iter()
    .map(|p| b.iter().filter(|r| r.shift == p.shift).filter_map(|r| p.body.intersection(&r.body)).map(|i| i.volume()).sum::<Rational>())
    .reduce(|| qi(0), |x, y| x + y);
  acc == va
}

/// 𝒳 over `[lo, hi]`: `|y| ≤ s/2`, `|x − y| ≤ 1`.
pub fn x_bundle(lo: &Rational, hi: &Rational) -> Polytope3 {
  let h = |a: i64, b: i64, c: Rational, d: i64| Plane::from_coeffs(qi(a), qi(b), c, qi(d));
  Polytope3::from_halfspaces(&[
    s_at_least(lo),
    s_at_most(hi),
    h(0, 1, q(1, 2), 0),
    h(0, -1, q(1, 2), 0),
    h(1, -1, qi(0), 1),
    h(-1, 1, qi(0), 1),
  ])
  .expect("nonempty interval")
}

/// Hull of the fibers at both endpoints of a bundle whose vertices move affinely in s.
pub fn linear_bundle(verts: &[(LinFormS, LinFormS)], lo: &Rational, hi: &Rational) -> Result<Polytope3, CertError> {
  let mut pts = Vec::new();
  for s in [lo, hi] {
    for (x, y) in verts {
      pts.push(Point3::new(x.eval(s), y.eval(s), s.clone()));
    }
  }
  Ok(Polytope3::from_vertices(&pts, false)?)
}

fn lf(m: Rational, n: Rational) -> LinFormS {
  LinFormS::new(m, n)
}

/// The triple-lattice construction lifted to LinFormS coordinates, then merged.
pub fn recompute_domains(lo: &Rational, hi: &Rational) -> Result<Vec<BPiece>, CertError> {
  let mid = (lo + hi) / qi(2);
  crate::pet::check_parameter(lo)?;
  crate::pet::check_parameter(hi)?;
  let a1 = mid.recip().floor();
  let f0 = x_bundle(lo, hi);
  let c = BShift::new(lf(q(-1, 2), qi(-1)), lf(q(-1, 2), qi(0)));
  let r1 = about_map(&rot120(), &c);
  let r2 = about_map(&mat_mul(&rot120(), &rot120()), &c);
  let f = [f0.clone(), f0.map(&r1)?, f0.map(&r2)?];
  let g0 = [BShift::new(lf(qi(1), qi(0)), lf(qi(1), qi(0))), BShift::new(lf(qi(0), qi(-1)), lf(qi(0), qi(1)))];
  let lat = |m: &Mat2| [g0[0].linear(m), g0[1].linear(m)];
  let l = [g0.clone(), lat(&rot120()), lat(&mat_mul(&rot120(), &rot120()))];
  let mut cells = vec![(f0.clone(), BShift::zero())];
  for i in 0..3 {
    cells = chase_lattice(cells, &f[(i + 1) % 3], &l[i]);
  }
  let fp: Vec<BPiece> = cells
    .into_iter()
    .map(|(img, sh)| Ok(BPiece { body: img.map(&sh.neg().as_map())?, shift: sh }))
    .collect::<Result<_, CertError>>()?;
  let fp = BundleMap { pieces: merge_bpieces(fp) };
  let op = op_bundle(lo, hi, &a1);
  Ok(op.inverse().compose(&fp).compose(&op).merged().pieces)
}

fn op_bundle(lo: &Rational, hi: &Rational, a1: &Rational) -> BundleMap {
  let x = x_bundle(lo, hi);
  let two_a1 = a1 * qi(2);
  let cut = Plane::from_coeffs(qi(-1), qi(1), -two_a1.clone(), qi(1));
  let mut pieces = Vec::new();
  if let Some(red) = x.clip(&cut) {
    pieces.push(BPiece { body: red, shift: BShift::new(lf(two_a1.clone(), qi(0)), LinFormS::zero()) });
  }
  if let Some(rest) = x.clip(&cut.flip()) {
    pieces.push(BPiece { body: rest, shift: BShift::new(lf(two_a1, qi(-2)), LinFormS::zero()) });
  }
  BundleMap { pieces }
}

/// Lattice coordinates of (x, y) at the point's own s.
fn lattice_coords(p: &Point3, g: &[BShift; 2]) -> (Rational, Rational) {
  let u = g[0].eval(&p.s);
  let v = g[1].eval(&p.s);
  let det = &u.dx * &v.dy - &u.dy * &v.dx;
  let a = (&p.x * &v.dy - &p.y * &v.dx) / &det;
  let b = (&u.dx * &p.y - &u.dy * &p.x) / &det;
  (a, b)
}

fn coord_range(body: &Polytope3, g: &[BShift; 2]) -> [(Rational, Rational); 2] {
  let cs: Vec<(Rational, Rational)> = body.vertices().iter().map(|p| lattice_coords(p, g)).collect();
  let mm = |k: usize| {
    let it = cs.iter().map(|c| if k == 0 { c.0.clone() } else { c.1.clone() });
    let v: Vec<Rational> = it.collect();
    (v.iter().min().unwrap().clone(), v.iter().max().unwrap().clone())
  };
  [mm(0), mm(1)]
}

fn chase_lattice(cells: Vec<(Polytope3, BShift)>, target: &Polytope3, g: &[BShift; 2]) -> Vec<(Polytope3, BShift)> {
  let tr = coord_range(target, g);
  cells
    .par_iter()
    .flat_map_iter(|(img, sh)| {
      let ir = coord_range(img, g);
      let span = |k: usize| {
        let lo = (&tr[k].0 - &ir[k].1).floor().to_i64().unwrap();
        let hi = (&tr[k].1 - &ir[k].0).ceil().to_i64().unwrap();
        lo..=hi
      };
      let mut out = Vec::new();
      for a in span(0) {
        for b in span(1) {
          let v = BShift::new(
            g[0].x.scale(&qi(a)) + g[1].x.scale(&qi(b)),
            g[0].y.scale(&qi(a)) + g[1].y.scale(&qi(b)),
          );
          let Ok(moved) = img.map(&v.as_map()) else { continue };
          if let Some(piece) = moved.intersection(target) {
            out.push((piece, sh.add(&v)));
          }
        }
      }
      out
    })
    .collect()
}

/// One row of a maximal-domain table.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalDomain {
  pub index: usize,
  pub interval: (Rational, Rational),
  pub vertices: Vec<Point3>,
  pub body: Polytope3,
  pub tuple: [Rational; 4],
}

impl MaximalDomain {
  pub fn shift(&self) -> BShift {
    BShift::from_tuple(&self.tuple)
  }
}

/// One return domain given by affine vertex rows and a coefficient row.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnDomain {
  pub index: usize,
  pub interval: (Rational, Rational),
  pub rows: Vec<[i64; 4]>,
  pub coeff: [i64; 4],
  pub body: Polytope3,
}

impl ReturnDomain {
  pub fn shift(&self) -> BShift {
    BShift::from_coeff(&self.coeff)
  }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnDomainTable {
  pub entries: Vec<ReturnDomain>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DomainTable {
  Maximal(Vec<MaximalDomain>),
  Return(ReturnDomainTable),
}

impl DomainTable {
  pub fn len(&self) -> usize {
    match self {
      DomainTable::Maximal(d) => d.len(),
      DomainTable::Return(t) => t.entries.len(),
    }
  }
  pub fn is_empty(&self) -> bool {
    self.len() == 0
  }
  pub fn interval(&self) -> Option<(Rational, Rational)> {
    match self {
      DomainTable::Maximal(d) => d.first().map(|e| e.interval.clone()),
      DomainTable::Return(t) => t.entries.first().map(|e| e.interval.clone()),
    }
  }
  pub fn pieces(&self) -> Vec<BPiece> {
    match self {
      DomainTable::Maximal(d) => d.iter().map(|e| BPiece { body: e.body.clone(), shift: e.shift() }).collect(),
      DomainTable::Return(t) => t.entries.iter().map(|e| BPiece { body: e.body.clone(), shift: e.shift() }).collect(),
    }
  }
  pub fn as_map(&self) -> BundleMap {
    BundleMap { pieces: self.pieces() }
  }
  pub fn maximal(&self) -> Option<&[MaximalDomain]> {
    match self {
      DomainTable::Maximal(d) => Some(d),
      _ => None,
    }
  }
}

fn row_point(r: &[i64; 4], s: &Rational) -> Point3 {
  Point3::new((qi(r[0]) * s + qi(r[1])) / qi(2), (qi(r[2]) * s + qi(r[3])) / qi(2), s.clone())
}

enum Block {
  Vertices(Vec<Point3>, Option<[Rational; 4]>),
  Rows(Vec<[i64; 4]>, Option<[i64; 4]>),
}

/// Parses the line-oriented table format; blank lines and `#` comments are ignored.
pub fn load_domain_table(text: &str) -> Result<DomainTable, CertError> {
  let perr = |line: usize, msg: &str| CertError::Parse { line, msg: msg.to_string() };
  let mut heads: Vec<(usize, usize, Rational, Rational, Block)> = Vec::new();
  for (ln, raw) in text.lines().enumerate() {
    let ln = ln + 1;
    let line = raw.trim();
    if line.is_empty() || line.starts_with('#') {
      continue;
    }
    let toks: Vec<&str> = line.split_whitespace().collect();
    match toks[0] {
      "D" => {
        let rest = line[1..].trim();
        let (idx, iv) = rest.split_once("over").ok_or_else(|| perr(ln, "expected 'over'"))?;
        let idx: usize = idx.trim().parse().map_err(|_| perr(ln, "bad index"))?;
        let iv = iv.trim().strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(|| perr(ln, "bad interval"))?;
        let (a, b) = iv.split_once(',').ok_or_else(|| perr(ln, "bad interval"))?;
        let a = Rational::parse(a.trim()).map_err(|_| perr(ln, "bad interval endpoint"))?;
        let b = Rational::parse(b.trim()).map_err(|_| perr(ln, "bad interval endpoint"))?;
        heads.push((ln, idx, a, b, Block::Vertices(Vec::new(), None)));
      }
      "v" | "w" | "r" | "c" => {
        let cur = heads.last_mut().ok_or_else(|| perr(ln, "line before header"))?;
        if toks.len() != if toks[0] == "v" { 4 } else { 5 } {
          return Err(perr(ln, "wrong field count"));
        }
        match (toks[0], &mut cur.4) {
          ("v", Block::Vertices(v, None)) => {
            let r: Vec<Rational> = toks[1..].iter().map(|t| Rational::parse(t)).collect::<Result<_, _>>().map_err(|_| perr(ln, "bad rational"))?;
            v.push(Point3::new(r[0].clone(), r[1].clone(), r[2].clone()));
          }
          ("w", Block::Vertices(v, w @ None)) if !v.is_empty() => {
            let r: Vec<Rational> = toks[1..].iter().map(|t| Rational::parse(t)).collect::<Result<_, _>>().map_err(|_| perr(ln, "bad rational"))?;
            *w = Some([r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone()]);
          }
          ("r", b) => {
            let ints = parse_ints(&toks[1..]).ok_or_else(|| perr(ln, "bad integer"))?;
            match b {
              Block::Rows(rows, None) => rows.push(ints),
              Block::Vertices(v, None) if v.is_empty() => *b = Block::Rows(vec![ints], None),
              _ => return Err(perr(ln, "unexpected row")),
            }
          }
          ("c", Block::Rows(rows, c @ None)) if !rows.is_empty() => {
            *c = Some(parse_ints(&toks[1..]).ok_or_else(|| perr(ln, "bad integer"))?);
          }
          _ => return Err(perr(ln, "unexpected line")),
        }
      }
      _ => return Err(perr(ln, "unknown line tag")),
    }
  }
  let mut maximal = Vec::new();
  let mut ret = Vec::new();
  for (ln, index, lo, hi, block) in heads {
    match block {
      Block::Vertices(vertices, Some(tuple)) => {
        let body = Polytope3::from_vertices(&vertices, false).map_err(|_| CertError::Validation(index))?;
        maximal.push(MaximalDomain { index, interval: (lo, hi), vertices, body, tuple });
      }
      Block::Rows(rows, Some(coeff)) => {
        let mut pts: Vec<Point3> = rows.iter().map(|r| row_point(r, &lo)).collect();
        pts.extend(rows.iter().map(|r| row_point(r, &hi)));
        let body = Polytope3::from_vertices(&pts, false).map_err(|_| CertError::Validation(index))?;
        ret.push(ReturnDomain { index, interval: (lo, hi), rows, coeff, body });
      }
      _ => return Err(perr(ln, "incomplete block")),
    }
  }
  match (maximal.is_empty(), ret.is_empty()) {
    (false, true) => Ok(DomainTable::Maximal(maximal)),
    (true, false) => Ok(DomainTable::Return(ReturnDomainTable { entries: ret })),
    (true, true) => Err(perr(0, "empty table")),
    _ => Err(perr(0, "mixed table kinds")),
  }
}

fn parse_ints(t: &[&str]) -> Option<[i64; 4]> {
  let v: Vec<i64> = t.iter().map(|x| x.parse().ok()).collect::<Option<_>>()?;
  v.try_into().ok()
}

pub fn format_domain_table(t: &DomainTable) -> String {
  let mut out = String::new();
  match t {
    DomainTable::Maximal(d) => {
      for (k, e) in d.iter().enumerate() {
        if k > 0 {
          out.push('\n');
        }
        writeln!(out, "D {} over [{}, {}]", e.index, e.interval.0, e.interval.1).unwrap();
        for v in &e.vertices {
          writeln!(out, "v {} {} {}", v.x, v.y, v.s).unwrap();
        }
        let [a, b, c, d] = &e.tuple;
        writeln!(out, "w {a} {b} {c} {d}").unwrap();
      }
    }
    DomainTable::Return(r) => {
      for (k, e) in r.entries.iter().enumerate() {
        if k > 0 {
          out.push('\n');
        }
        writeln!(out, "D {} over [{}, {}]", e.index, e.interval.0, e.interval.1).unwrap();
        for [m, n, p, q] in &e.rows {
          writeln!(out, "r {m} {n} {p} {q}").unwrap();
        }
        let [a, b, c, d] = e.coeff;
        writeln!(out, "c {a} {b} {c} {d}").unwrap();
      }
    }
  }
  out
}

/// Vertex rows of a body whose vertices all sit on the two end fibers, paired along lateral edges.
pub fn body_rows(body: &Polytope3, lo: &Rational, hi: &Rational) -> Option<Vec<[i64; 4]>> {
  let bottom: Vec<&Point3> = body.vertices().iter().filter(|p| &p.s == lo).collect();
  let top: Vec<&Point3> = body.vertices().iter().filter(|p| &p.s == hi).collect();
  if bottom.len() + top.len() != body.vertices().len() {
    return None;
  }
  let shared = |a: &Point3, b: &Point3| body.facets().iter().filter(|f| Zero::is_zero(&f.eval(a)) && Zero::is_zero(&f.eval(b))).count();
  let ds = hi - lo;
  let as_int = |x: Rational| x.is_integer().then(|| x.to_integer().to_i64()).flatten();
  let mut rows = Vec::new();
  let mut used_top = vec![false; top.len()];
  for a in &bottom {
    let mut found = false;
    for (k, b) in top.iter().enumerate() {
      if shared(a, b) >= 2 {
        let mx = (&b.x - &a.x) * qi(2) / &ds;
        let nx = &a.x * qi(2) - &mx * lo;
        let my = (&b.y - &a.y) * qi(2) / &ds;
        let ny = &a.y * qi(2) - &my * lo;
        rows.push([as_int(mx)?, as_int(nx)?, as_int(my)?, as_int(ny)?]);
        used_top[k] = true;
        found = true;
      }
    }
    if !found {
      return None;
    }
  }
  if used_top.iter().any(|u| !u) {
    return None;
  }
  rows.sort();
  rows.dedup();
  Some(rows)
}

pub fn verify_domain_partition(domains: &[MaximalDomain], lo: &Rational, hi: &Rational) -> bool {
  let map = BundleMap { pieces: domains.iter().map(|d| BPiece { body: d.body.clone(), shift: d.shift() }).collect() }.restrict(lo, hi);
  let bodies: Vec<&Polytope3> = map.pieces.iter().map(|p| &p.body).collect();
  let disjoint = (0..bodies.len()).into_par_iter().all(|i| (i + 1..bodies.len()).all(|j| bodies[i].intersection(bodies[j]).is_none()));
  disjoint && map.volume() == x_bundle(lo, hi).volume()
}

pub fn verify_coefficients(domains: &[MaximalDomain], samples: &[Rational]) -> bool {
  let map = BundleMap { pieces: domains.iter().map(|d| BPiece { body: d.body.clone(), shift: d.shift() }).collect() };
  samples.par_iter().all(|s| match build_triple_pet(s) {
    Ok(f) => pieces_same_map(&map.slice(s), &f.pieces),
    Err(_) => false,
  })
}

/// A returned piece: its source body in the start region, total shift and return time.
#[derive(Clone, Debug)]
pub struct Returned {
  pub source: Polytope3,
  pub shift: BShift,
  pub time: usize,
}

impl Returned {
  pub fn piece(&self) -> BPiece {
    BPiece { body: self.source.clone(), shift: self.shift.clone() }
  }
}

/// First return of `start` to `region` under `f`, chasing polytopes against the pieces of `f`.
pub fn chase_return(f: &BundleMap, start: &Polytope3, region: &Polytope3, cap: usize) -> Result<Vec<Returned>, usize> {
  let mut frontier = vec![(start.clone(), BShift::zero())];
  let mut out = Vec::new();
  for time in 1..=cap {
    let step: Vec<(Vec<(Polytope3, BShift)>, Vec<(Polytope3, BShift)>)> = frontier
      .par_iter()
      .map(|(img, sh)| {
        let mut back = Vec::new();
        let mut next = Vec::new();
        for p in &f.pieces {
          let Some(part) = img.intersection(&p.body) else { continue };
          let moved = part.map(&p.shift.as_map()).expect("translation");
          let total = sh.add(&p.shift);
          if let Some(inside) = moved.intersection(region) {
            back.push((inside.map(&total.neg().as_map()).expect("translation"), total.clone()));
          }
          for outside in moved.difference(region) {
            next.push((outside, total.clone()));
          }
        }
        (back, next)
      })
      .collect();
    frontier = Vec::new();
    for (back, next) in step {
      out.extend(back.into_iter().map(|(source, shift)| Returned { source, shift, time }));
      frontier.extend(next);
    }
    if frontier.is_empty() {
      return Ok(out);
    }
  }
  Err(frontier.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BaseInterval {
  I0,
  I1,
  I2,
}

impl BaseInterval {
  pub fn j(self) -> i64 {
    match self {
      BaseInterval::I0 => 0,
      BaseInterval::I1 => 1,
      BaseInterval::I2 => 2,
    }
  }
  pub fn range(self) -> (Rational, Rational) {
    let j = self.j();
    (q(j + 1, j + 2), q(j + 2, j + 3))
  }
  pub fn parse(t: &str) -> Option<Self> {
    match t {
      "I0" => Some(BaseInterval::I0),
      "I1" => Some(BaseInterval::I1),
      "I2" => Some(BaseInterval::I2),
      _ => None,
    }
  }
}

/// 𝒴 over I_j: `s/2 − b ≤ y ≤ s/2`, `−1 ≤ x − y ≤ 1 − 2s` with `b = (j+1)s − j`.
pub fn y_bundle(iv: BaseInterval) -> Polytope3 {
  let j = iv.j();
  let (lo, hi) = iv.range();
  Polytope3::from_halfspaces(&[
    s_at_least(&lo),
    s_at_most(&hi),
    Plane::from_coeffs(qi(0), qi(-1), q(1, 2), qi(0)),
    Plane::from_coeffs(qi(0), qi(1), q(1, 2) + qi(j), qi(-j)),
    Plane::from_coeffs(qi(1), qi(-1), qi(0), qi(1)),
    Plane::from_coeffs(qi(-1), qi(1), qi(-2), qi(1)),
  ])
  .expect("nonempty")
}

/// Ψ⁻¹ on (x, y, t): `s = (1 + j t)/(1 + (j+1) t)`, `p = b·M·q + c(s)` with `b = 1/(1 + (j+1) t)`.
pub fn psi_inverse(iv: BaseInterval) -> Map3 {
  let j = qi(iv.j());
  let mut m = Map3::identity();
  m.m[0] = [q(-1, 2), q(-3, 2), -&j / qi(2), qi(-1)];
  m.m[1] = [q(-1, 2), q(1, 2), &j / qi(2), qi(0)];
  m.m[2] = [qi(0), qi(0), j.clone(), qi(1)];
  m.m[3] = [qi(0), qi(0), j + qi(1), qi(1)];
  m
}

/// The shift of Ψ⁻¹ ∘ F ∘ Ψ on Ψ⁻¹(D) when F translates D by `w`.
pub fn pushed_shift(iv: BaseInterval, w: &BShift) -> BShift {
  let j = iv.j();
  let one_minus_s = lf(qi(-1), qi(1));
  let b = lf(qi(j + 1), qi(-j));
  let x = one_minus_s.scale(&w.x.m) + b.scale(&w.x.n);
  let y = one_minus_s.scale(&w.y.m) + b.scale(&w.y.n);
  BShift::new(x, y).linear(&flip())
}

#[derive(Clone, Debug, Serialize)]
pub struct DomainCertificate {
  pub index: usize,
  pub pieces: usize,
  pub max_time: usize,
  pub contained: bool,
  pub shifts_match: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseCertificate {
  pub interval: BaseInterval,
  pub domains: Vec<DomainCertificate>,
  pub well_defined: bool,
  pub containment: bool,
  pub disjoint: bool,
  pub filling: bool,
  pub volume_y: String,
  pub volume_images: String,
}

impl BaseCertificate {
  pub fn verdict(&self) -> bool {
    self.well_defined && self.containment && self.disjoint && self.filling && self.domains.iter().all(|d| d.shifts_match)
  }
}

pub const DEFAULT_CAP: usize = 64;

pub fn base_case_certify(iv: BaseInterval, domains: &[MaximalDomain], cap: usize) -> Result<BaseCertificate, CertError> {
  let (lo, hi) = iv.range();
  let y = y_bundle(iv);
  let f = BundleMap { pieces: domains.iter().map(|d| BPiece { body: d.body.clone(), shift: d.shift() }).collect() }.restrict(&lo, &hi);
  let pinv = psi_inverse(iv);
  let t_lo = q(1, 2);
  let t_hi = qi(1);
  let results: Vec<Result<(DomainCertificate, Vec<Polytope3>), CertError>> = domains
    .par_iter()
    .filter(|d| !d.body.is_degenerate())
    .map(|d| {
      let Some(body) = d.body.clip(&s_at_least(&t_lo)).and_then(|b| b.clip(&s_at_most(&t_hi))) else {
        return Ok((DomainCertificate { index: d.index, pieces: 0, max_time: 0, contained: true, shifts_match: true }, Vec::new()));
      };
      let start = body.map(&pinv)?;
      let target = body.map(&d.shift().as_map())?.map(&pinv)?;
      let expect = pushed_shift(iv, &d.shift());
      let ret = chase_return(&f, &start, &y, cap).map_err(|_| CertError::CapExceeded { cap, index: d.index })?;
      let images: Vec<Polytope3> = ret.iter().map(|r| r.source.map(&r.shift.as_map())).collect::<Result<_, _>>()?;
      let contained = images.iter().all(|m| target.contains(m));
      let shifts_match = ret.iter().all(|r| r.shift == expect);
      let cert = DomainCertificate {
        index: d.index,
        pieces: ret.len(),
        max_time: ret.iter().map(|r| r.time).max().unwrap_or(0),
        contained,
        shifts_match,
      };
      Ok((cert, images))
    })
    .collect();
  let mut certs = Vec::new();
  let mut images = Vec::new();
  for r in results {
    let (c, im) = r?;
    certs.push(c);
    images.extend(im);
  }
  let disjoint = (0..images.len()).into_par_iter().all(|i| (i + 1..images.len()).all(|k| images[i].intersection(&images[k]).is_none()));
  let vol_images: Rational = images.iter().map(|m| m.volume()).sum();
  let vol_y = y.volume();
  Ok(BaseCertificate {
    interval: iv,
    well_defined: true,
    containment: certs.iter().all(|c| c.contained),
    disjoint,
    filling: vol_images == vol_y,
    volume_y: vol_y.to_string(),
    volume_images: vol_images.to_string(),
    domains: certs,
  })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Symmetry {
  RotationAB,
  ReflectionAC,
  ReflectionPQ,
}

impl Symmetry {
  pub fn parse(t: &str) -> Option<Self> {
    match t {
      "rotationAB" => Some(Symmetry::RotationAB),
      "reflectionAC" => Some(Symmetry::ReflectionAC),
      "reflectionPQ" => Some(Symmetry::ReflectionPQ),
      _ => None,
    }
  }
}

pub fn symmetry_range() -> (Rational, Rational) {
  (q(8, 13), q(13, 21))
}

fn v(xm: Rational, xn: Rational, ym: Rational, yn: Rational) -> (LinFormS, LinFormS) {
  (lf(xm, xn), lf(ym, yn))
}

/// Vertices of A_s: v0, v1 = v0 + (s, −s), v2 = v0 − (1 − s)(1, 1), v3 = v1 − (2(1 − s), 0).
pub fn trapezoid_a_vertices() -> Vec<(LinFormS, LinFormS)> {
  vec![
    v(q(1, 2), qi(-1), q(1, 2), qi(0)),
    v(q(3, 2), qi(-1), q(-1, 2), qi(0)),
    v(q(3, 2), qi(-2), q(3, 2), qi(-1)),
    v(q(7, 2), qi(-3), q(-1, 2), qi(0)),
  ]
}

/// Vertices of P_s.
pub fn region_p_vertices() -> Vec<(LinFormS, LinFormS)> {
  vec![
    v(q(1, 2), qi(-1), q(1, 2), qi(0)),
    v(q(9, 2), qi(-3), q(1, 2), qi(0)),
    v(q(3, 2), qi(-1), q(7, 2), qi(-2)),
    v(q(-1, 2), qi(0), q(3, 2), qi(-1)),
  ]
}

/// μ: rotation by +60° about (s/2 − 1, s/2).
pub fn mu_map() -> (Map3, Mat2) {
  let c = BShift::new(lf(q(1, 2), qi(-1)), lf(q(1, 2), qi(0)));
  (about_map(&rot60(), &c), rot60())
}

/// ν = ι: reflection in the vertical line x = 3s/2 − 1.
pub fn nu_map() -> (Map3, Mat2) {
  let t = BShift::new(lf(qi(3), qi(-2)), LinFormS::zero());
  (affine_map(&mirror(), &t), mirror())
}

fn push(pieces: &[BPiece], m: &Map3, lin: &Mat2) -> Result<Vec<BPiece>, CertError> {
  pieces.iter().map(|p| Ok(BPiece { body: p.body.map(m)?, shift: p.shift.linear(lin) })).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryCertificate {
  pub which: Symmetry,
  pub return_domains: usize,
  pub max_time: usize,
  pub table_matches: bool,
  pub conjugacy: bool,
}

impl SymmetryCertificate {
  pub fn verdict(&self) -> bool {
    self.table_matches && self.conjugacy
  }
}

/// Chased merged return domains of `region` under `f`.
pub fn return_domains(f: &BundleMap, region: &Polytope3, cap: usize) -> Result<(Vec<BPiece>, usize), CertError> {
  let ret = chase_return(f, region, region, cap).map_err(|_| CertError::CapExceeded { cap, index: 0 })?;
  let time = ret.iter().map(|r| r.time).max().unwrap_or(0);
  Ok((merge_bpieces(ret.iter().map(|r| r.piece()).collect()), time))
}

pub fn symmetry_certify(which: Symmetry, table: &ReturnDomainTable, domains: &[MaximalDomain], cap: usize) -> Result<SymmetryCertificate, CertError> {
  let (lo, hi) = symmetry_range();
  let f = BundleMap { pieces: domains.iter().map(|d| BPiece { body: d.body.clone(), shift: d.shift() }).collect() }.restrict(&lo, &hi);
  let finv = f.inverse();
  let tab: Vec<BPiece> = table.entries.iter().map(|e| BPiece { body: e.body.clone(), shift: e.shift() }).collect();
  let (base, forward, sym) = match which {
    Symmetry::RotationAB => (linear_bundle(&trapezoid_a_vertices(), &lo, &hi)?, true, mu_map()),
    Symmetry::ReflectionAC => (linear_bundle(&trapezoid_a_vertices(), &lo, &hi)?, true, nu_map()),
    Symmetry::ReflectionPQ => (linear_bundle(&region_p_vertices(), &lo, &hi)?, false, nu_map()),
  };
  let other = base.map(&sym.0)?;
  let (first, t1) = return_domains(if forward { &f } else { &finv }, &base, cap)?;
  let (second, t2) = return_domains(if forward { &finv } else { &f }, &other, cap)?;
  let pushed = push(&first, &sym.0, &sym.1)?;
  let conjugacy = bundle_same_map(&pushed, &second);
  let table_matches = match which {
    Symmetry::ReflectionPQ => bundle_same_map(&second, &tab),
    _ => bundle_same_map(&first, &tab),
  };
  if !table_matches {
    return Err(CertError::TableMismatch);
  }
  Ok(SymmetryCertificate {
    which,
    return_domains: if which == Symmetry::ReflectionPQ { second.len() } else { first.len() },
    max_time: t1.max(t2),
    table_matches,
    conjugacy,
  })
}

/// Rebuilds a maximal-domain table from pieces, ordered and indexed like `reference` where shifts agree.
pub fn pieces_to_maximal(pieces: &[BPiece], lo: &Rational, hi: &Rational, reference: Option<&[MaximalDomain]>) -> Vec<MaximalDomain> {
  let mut order: Vec<(usize, &BPiece)> = pieces
    .iter()
    .map(|p| {
      let k = reference
        .and_then(|r| {
          r.iter()
            .filter(|d| d.shift() == p.shift)
            .max_by_key(|d| d.body.intersection(&p.body).map(|i| i.volume()).unwrap_or_else(|| qi(0)))
            .map(|d| d.index)
        })
        .unwrap_or(usize::MAX);
      (k, p)
    })
    .collect();
  order.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.body.vertices().cmp(b.1.body.vertices())));
  order
    .into_iter()
    .enumerate()
    .map(|(i, (_, p))| MaximalDomain {
      index: i,
      interval: (lo.clone(), hi.clone()),
      vertices: p.body.vertices().to_vec(),
      body: p.body.clone(),
      tuple: p.shift.tuple(),
    })
    .collect()
}

/// Rebuilds a return-domain table; `None` if some body is not expressible in row form.
pub fn pieces_to_return(pieces: &[BPiece], lo: &Rational, hi: &Rational, reference: Option<&ReturnDomainTable>) -> Option<ReturnDomainTable> {
  let as_int = |x: Rational| x.is_integer().then(|| x.to_integer().to_i64()).flatten();
  let mut entries = Vec::new();
  for p in pieces {
    let rows = body_rows(&p.body, lo, hi)?;
    let t = p.shift.tuple();
    let coeff = [as_int(&t[0] * qi(2))?, as_int(&t[1] * qi(2))?, as_int(&t[2] * qi(2))?, as_int(&t[3] * qi(2))?];
    let key = reference
      .and_then(|r| {
        r.entries
          .iter()
          .filter(|e| e.coeff == coeff)
          .max_by_key(|e| e.body.intersection(&p.body).map(|i| i.volume()).unwrap_or_else(|| qi(0)))
          .map(|e| e.index)
      })
      .unwrap_or(usize::MAX);
    entries.push((key, ReturnDomain { index: 0, interval: (lo.clone(), hi.clone()), rows, coeff, body: p.body.clone() }));
  }
  entries.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.rows.cmp(&b.1.rows)));
  let entries = entries
    .into_iter()
    .enumerate()
    .map(|(i, (_, mut e))| {
      e.index = i;
      e
    })
    .collect();
  Some(ReturnDomainTable { entries })
}

/// Corrected tables shipped with the crate, plus verbatim transcriptions for comparison.
pub mod builtin {
  pub const DOMAINS: &str = include_str!("../../../data/domains.txt");
  pub const RETURN_A: &str = include_str!("../../../data/return_a.txt");
  pub const RETURN_Q: &str = include_str!("../../../data/return_q.txt");
  pub const DOMAINS_VERBATIM: &str = include_str!("../../../data/domains_as_printed.txt");
  pub const RETURN_A_VERBATIM: &str = include_str!("../../../data/return_a_as_printed.txt");
  pub const RETURN_Q_VERBATIM: &str = include_str!("../../../data/return_q_as_printed.txt");
}
