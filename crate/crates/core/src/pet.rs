//! Triple lattice PETs: lattices, the maps g and f′ = g³, cut-and-paste, orbits and periodic tiles.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::PetError;
use crate::geom2::{ConvexPolygon, Location, Point2, Similarity2, Vector2};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice2<S> {
  pub g1: Vector2<S>,
  pub g2: Vector2<S>,
}

impl<S: Scalar> Lattice2<S> {
  pub fn new(g1: Vector2<S>, g2: Vector2<S>) -> Option<Self> {
    if g1.cross(&g2).is_zero() {
      None
    } else {
      Some(Lattice2 { g1, g2 })
    }
  }

  pub fn covolume(&self) -> S {
    self.g1.cross(&self.g2).abs()
  }

  /// Coordinates of `v` in the basis (g1, g2).
  pub fn coords(&self, v: &Vector2<S>) -> (S, S) {
    let det = self.g1.cross(&self.g2);
    (v.cross(&self.g2) / det.clone(), self.g1.cross(v) / det)
  }

  pub fn at(&self, a: i64, b: i64) -> Vector2<S> {
    self.g1.scale(&S::from_int(a)) + self.g2.scale(&S::from_int(b))
  }

  pub fn map(&self, sim: &Similarity2<S>) -> Self {
    Lattice2 { g1: sim.apply_vec(&self.g1), g2: sim.apply_vec(&self.g2) }
  }

  /// Coefficient box containing every lattice vector `v` with `(P + v) ∩ T ≠ ∅`.
  pub fn coeff_box(&self, from: &[Point2<S>], to: &[Point2<S>]) -> ((i64, i64), (i64, i64)) {
    let ext = |pts: &[Point2<S>]| {
      let cs: Vec<(S, S)> = pts.iter().map(|p| self.coords(&p.to_vec())).collect();
      let amin = cs.iter().map(|c| c.0.clone()).min().unwrap();
      let amax = cs.iter().map(|c| c.0.clone()).max().unwrap();
      let bmin = cs.iter().map(|c| c.1.clone()).min().unwrap();
      let bmax = cs.iter().map(|c| c.1.clone()).max().unwrap();
      (amin, amax, bmin, bmax)
    };
    let (pa0, pa1, pb0, pb1) = ext(from);
    let (ta0, ta1, tb0, tb1) = ext(to);
    let lo = |x: S| x.floor().to_i64().unwrap();
    let hi = |x: S| x.ceil().to_i64().unwrap();
    ((lo(ta0 - pa1), hi(ta1 - pa0)), (lo(tb0 - pb1), hi(tb1 - pb0)))
  }

  pub fn candidates(&self, from: &[Point2<S>], to: &[Point2<S>]) -> Vec<Vector2<S>> {
    let ((a0, a1), (b0, b1)) = self.coeff_box(from, to);
    let mut out = Vec::new();
    for a in a0..=a1 {
      for b in b0..=b1 {
        out.push(self.at(a, b));
      }
    }
    out
  }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceMap<S: Scalar> {
  pub cell: ConvexPolygon<S>,
  pub shift: Vector2<S>,
}

impl<S: Scalar> PieceMap<S> {
  pub fn image(&self) -> ConvexPolygon<S> {
    self.cell.translate(&self.shift)
  }
}

#[derive(Clone, Debug)]
pub struct PiecewiseTranslation<S: Scalar> {
  pub ambient: ConvexPolygon<S>,
  pub pieces: Vec<PieceMap<S>>,
  pub parameter: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicTile<S: Scalar> {
  pub cell: ConvexPolygon<S>,
  pub period: usize,
  pub coding: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinedCell<S: Scalar> {
  pub cell: ConvexPolygon<S>,
  pub shift: Vector2<S>,
  pub word: Vec<usize>,
}

fn pairwise_disjoint<S: Scalar>(cells: &[ConvexPolygon<S>]) -> bool {
  for i in 0..cells.len() {
    for j in i + 1..cells.len() {
      if cells[i].intersection(&cells[j]).is_some() {
        return false;
      }
    }
  }
  true
}

/// Greedy merge of same-shift cells whose union is convex.
pub fn merge_pieces<S: Scalar>(pieces: Vec<PieceMap<S>>) -> Vec<PieceMap<S>> {
  let mut groups: Vec<(Vector2<S>, Vec<ConvexPolygon<S>>)> = Vec::new();
  for p in pieces {
    match groups.iter_mut().find(|g| g.0 == p.shift) {
      Some(g) => g.1.push(p.cell),
      None => groups.push((p.shift, vec![p.cell])),
    }
  }
  let mut out = Vec::new();
  for (shift, mut cells) in groups {
    'outer: loop {
      for i in 0..cells.len() {
        for j in i + 1..cells.len() {
          let mut pts = cells[i].vertices().to_vec();
          pts.extend_from_slice(cells[j].vertices());
          if let Some(h) = ConvexPolygon::hull(&pts) {
            if h.area() == cells[i].area() + cells[j].area() {
              cells[i] = h;
              cells.swap_remove(j);
              continue 'outer;
            }
          }
        }
      }
      break;
    }
    if cells.len() > 2 {
      let pts: Vec<Point2<S>> = cells.iter().flat_map(|c| c.vertices().to_vec()).collect();
      if let Some(h) = ConvexPolygon::hull(&pts) {
        let total = cells.iter().fold(S::zero(), |a, c| a + c.area());
        if h.area() == total {
          cells = vec![h];
        }
      }
    }
    for cell in cells {
      out.push(PieceMap { cell, shift: shift.clone() });
    }
  }
  out
}

impl<S: Scalar> PiecewiseTranslation<S> {
  /// Builds and certifies both partitions.
  pub fn new(ambient: ConvexPolygon<S>, pieces: Vec<PieceMap<S>>, parameter: S) -> Result<Self, PetError> {
    let f = PiecewiseTranslation { ambient, pieces, parameter };
    f.check_partitions()?;
    Ok(f)
  }

  pub fn unchecked(ambient: ConvexPolygon<S>, pieces: Vec<PieceMap<S>>, parameter: S) -> Self {
    PiecewiseTranslation { ambient, pieces, parameter }
  }

  pub fn identity(ambient: ConvexPolygon<S>, parameter: S) -> Self {
    let pieces = vec![PieceMap { cell: ambient.clone(), shift: Vector2::zero() }];
    PiecewiseTranslation { ambient, pieces, parameter }
  }

  pub fn len(&self) -> usize {
    self.pieces.len()
  }

  pub fn is_empty(&self) -> bool {
    self.pieces.is_empty()
  }

  pub fn cells(&self) -> Vec<ConvexPolygon<S>> {
    self.pieces.iter().map(|p| p.cell.clone()).collect()
  }

  pub fn images(&self) -> Vec<ConvexPolygon<S>> {
    self.pieces.iter().map(|p| p.image()).collect()
  }

  pub fn check_partitions(&self) -> Result<(), PetError> {
    let total = self.ambient.area();
    for (name, fam) in [("source", self.cells()), ("image", self.images())] {
      let sum = fam.iter().fold(S::zero(), |a, c| a + c.area());
      if sum != total {
        return Err(PetError::Partition(format!("{name} areas sum to {sum}, ambient {total}")));
      }
      if !fam.iter().all(|c| self.ambient.contains(c)) {
        return Err(PetError::Partition(format!("{name} cell leaves the ambient polygon")));
      }
      if !pairwise_disjoint(&fam) {
        return Err(PetError::Partition(format!("{name} cells overlap")));
      }
    }
    Ok(())
  }

  /// Applies `self` first, then `then`.
  pub fn compose(&self, then: &Self) -> Self {
    let mut out = Vec::new();
    for p in &self.pieces {
      let img = p.image();
      for q in &then.pieces {
        if let Some(piece) = img.intersection(&q.cell) {
          out.push(PieceMap { cell: piece.translate(&-p.shift.clone()), shift: p.shift.clone() + q.shift.clone() });
        }
      }
    }
    PiecewiseTranslation { ambient: self.ambient.clone(), pieces: out, parameter: self.parameter.clone() }
  }

  pub fn inverse(&self) -> Self {
    let pieces = self.pieces.iter().map(|p| PieceMap { cell: p.image(), shift: -p.shift.clone() }).collect();
    PiecewiseTranslation { ambient: self.ambient.clone(), pieces, parameter: self.parameter.clone() }
  }

  pub fn merged(&self) -> Self {
    PiecewiseTranslation {
      ambient: self.ambient.clone(),
      pieces: merge_pieces(self.pieces.clone()),
      parameter: self.parameter.clone(),
    }
  }

  /// Index of the cell whose interior contains `p`.
  pub fn locate_piece(&self, p: &Point2<S>) -> Result<usize, PetError> {
    for (i, piece) in self.pieces.iter().enumerate() {
      match piece.cell.locate(p) {
        Location::Interior => return Ok(i),
        Location::Boundary => return Err(PetError::UndefinedOnBoundary { step: 0 }),
        Location::Outside => {}
      }
    }
    Err(PetError::UndefinedOnBoundary { step: 0 })
  }

  pub fn evaluate(&self, p: &Point2<S>) -> Result<Point2<S>, PetError> {
    let i = self.locate_piece(p)?;
    Ok(p + &self.pieces[i].shift)
  }

  /// Equality of the underlying maps as sets of (point, translation) pairs.
  pub fn same_map(&self, o: &Self) -> bool {
    pieces_same_map(&self.pieces, &o.pieces)
  }
}

/// Two piece lists define the same map up to a null set.
pub fn pieces_same_map<S: Scalar>(a: &[PieceMap<S>], b: &[PieceMap<S>]) -> bool {
  let ta = a.iter().fold(S::zero(), |x, p| x + p.cell.area());
  let tb = b.iter().fold(S::zero(), |x, p| x + p.cell.area());
  if ta != tb {
    return false;
  }
  let mut acc = S::zero();
  for p in a {
    for q in b {
      if p.shift != q.shift {
        continue;
      }
      if let Some(i) = p.cell.intersection(&q.cell) {
        acc = acc + i.area();
      }
    }
  }
  acc == ta
}

/// The three fundamental domains and lattices of the triple lattice construction.
#[derive(Clone, Debug)]
pub struct TripleLattice<S> {
  pub s: S,
  pub f: [ConvexPolygon<S>; 3],
  pub l: [Lattice2<S>; 3],
}

/// X_s: centered parallelogram with sides (2, 0) and (s, s).
pub fn x_s<S: Scalar>(s: &S) -> ConvexPolygon<S> {
  let v = lower_left(s);
  ConvexPolygon::parallelogram(&v, &Vector2::new(S::from_int(2), S::zero()), &Vector2::new(s.clone(), s.clone()))
    .expect("X_s is nondegenerate for s > 0")
}

/// Lower-left vertex (−1 − s/2, −s/2) of X_s.
pub fn lower_left<S: Scalar>(s: &S) -> Point2<S> {
  Point2::new(-S::one() - s.half(), -s.half())
}

pub fn check_parameter<S: Scalar>(s: &S) -> Result<(), PetError> {
  if !s.is_positive() || *s > S::one() {
    return Err(PetError::ParameterOutOfRange(s.to_string()));
  }
  Ok(())
}

impl<S: Scalar> TripleLattice<S> {
  pub fn new(s: &S) -> Result<Self, PetError> {
    check_parameter(s)?;
    let f0 = x_s(s);
    let c = lower_left(s);
    let r1 = Similarity2::rotation60(2, &c);
    let r2 = Similarity2::rotation60(4, &c);
    let l0 = Lattice2::new(Vector2::new(s.clone(), s.clone()), Vector2::new(-S::one(), S::one())).unwrap();
    let l1 = l0.map(&r1);
    let l2 = l0.map(&r2);
    let f1 = r1.apply_polygon(&f0);
    let f2 = r2.apply_polygon(&f0);
    Ok(TripleLattice { s: s.clone(), f: [f0, f1, f2], l: [l0, l1, l2] })
  }

  /// Image cells with accumulated shifts after moving into `target` by `lattice`.
  fn chase(cells: Vec<(ConvexPolygon<S>, Vector2<S>)>, target: &ConvexPolygon<S>, lattice: &Lattice2<S>) -> Vec<(ConvexPolygon<S>, Vector2<S>)> {
    let mut out = Vec::new();
    for (img, sh) in cells {
      for v in lattice.candidates(img.vertices(), target.vertices()) {
        if let Some(piece) = img.translate(&v).intersection(target) {
          out.push((piece, sh.clone() + v));
        }
      }
    }
    out
  }

  /// f′ = g³ as a merged piecewise translation on F_0.
  pub fn fprime(&self) -> PiecewiseTranslation<S> {
    let mut cells = vec![(self.f[0].clone(), Vector2::zero())];
    for i in 0..3 {
      cells = Self::chase(cells, &self.f[(i + 1) % 3], &self.l[i]);
    }
    let pieces = cells.into_iter().map(|(img, sh)| PieceMap { cell: img.translate(&-sh.clone()), shift: sh }).collect();
    PiecewiseTranslation::unchecked(self.f[0].clone(), merge_pieces(pieces), self.s.clone())
  }

  /// Pointwise g³, one lattice reduction per step.
  pub fn fprime_at(&self, p: &Point2<S>) -> Result<Point2<S>, PetError> {
    let mut cur = p.clone();
    for i in 0..3 {
      let v = lattice_translate(&cur, &self.l[i], &self.f[(i + 1) % 3])?;
      cur = &cur + &v;
    }
    Ok(cur)
  }
}

/// The unique `v ∈ L` with `p + v` interior to `target`.
pub fn lattice_translate<S: Scalar>(p: &Point2<S>, l: &Lattice2<S>, target: &ConvexPolygon<S>) -> Result<Vector2<S>, PetError> {
  let mut hit = None;
  let mut boundary = false;
  for v in l.candidates(std::slice::from_ref(p), target.vertices()) {
    match target.locate(&(p + &v)) {
      Location::Interior => {
        if hit.is_some() {
          return Err(PetError::AmbiguousOnBoundary);
        }
        hit = Some(v)
      }
      Location::Boundary => boundary = true,
      Location::Outside => {}
    }
  }
  match hit {
    Some(v) => Ok(v),
    None if boundary => Err(PetError::AmbiguousOnBoundary),
    None => Err(PetError::NoLatticeVector),
  }
}

/// Checks area = covolume and that lattice translates tile a box around `f` without overlap.
pub fn verify_fundamental_domain<S: Scalar>(f: &ConvexPolygon<S>, l: &Lattice2<S>) -> bool {
  if f.area() != l.covolume() {
    return false;
  }
  let (lo, hi) = f.bbox();
  let d = (hi.x.clone() - lo.x.clone()).max(hi.y.clone() - lo.y.clone());
  let r = ConvexPolygon::hull(&[
    Point2::new(lo.x.clone() - d.clone(), lo.y.clone() - d.clone()),
    Point2::new(hi.x.clone() + d.clone(), lo.y.clone() - d.clone()),
    Point2::new(hi.x.clone() + d.clone(), hi.y.clone() + d.clone()),
    Point2::new(lo.x.clone() - d.clone(), hi.y.clone() + d),
  ])
  .unwrap();
  let mut pieces = Vec::new();
  for v in l.candidates(f.vertices(), r.vertices()) {
    if let Some(p) = f.translate(&v).intersection(&r) {
      pieces.push(p);
    }
  }
  let sum = pieces.iter().fold(S::zero(), |a, p| a + p.area());
  sum == r.area() && pairwise_disjoint(&pieces)
}

/// The corner cut-and-paste 𝒪𝒫 on X_s.
pub fn op_map<S: Scalar>(s: &S) -> PiecewiseTranslation<S> {
  let x = x_s(s);
  let a1 = S::from_rational(num_rational::BigRational::from_integer(s.recip().floor()));
  let two = S::from_int(2);
  let w = two.clone() - two.clone() * a1 * s.clone();
  if w.is_zero() {
    return PiecewiseTranslation::identity(x, s.clone());
  }
  let v = lower_left(s);
  let slant = Vector2::new(s.clone(), s.clone());
  let red = ConvexPolygon::parallelogram(&v, &Vector2::new(w.clone(), S::zero()), &slant).unwrap();
  let rest_corner = &v + &Vector2::new(w.clone(), S::zero());
  let rest = ConvexPolygon::parallelogram(&rest_corner, &Vector2::new(two.clone() - w.clone(), S::zero()), &slant).unwrap();
  let pieces = vec![
    PieceMap { cell: red, shift: Vector2::new(two - w.clone(), S::zero()) },
    PieceMap { cell: rest, shift: Vector2::new(-w, S::zero()) },
  ];
  PiecewiseTranslation::unchecked(x, pieces, s.clone())
}

/// Conjugates `f` by 𝒪𝒫: the result is 𝒪𝒫 ∘ f ∘ 𝒪𝒫⁻¹.
pub fn cut_and_paste<S: Scalar>(f: &PiecewiseTranslation<S>, s: &S) -> PiecewiseTranslation<S> {
  let op = op_map(s);
  op.inverse().compose(f).compose(&op).merged()
}

/// f_s on X_s with both partitions certified.
pub fn build_triple_pet<S: Scalar>(s: &S) -> Result<PiecewiseTranslation<S>, PetError> {
  let t = TripleLattice::new(s)?;
  let f = cut_and_paste(&t.fprime(), s);
  f.check_partitions()?;
  Ok(f)
}

/// Pointwise f_s built from three lattice reductions and the corner map; independent of cell chasing.
pub fn f_at<S: Scalar>(t: &TripleLattice<S>, p: &Point2<S>) -> Result<Point2<S>, PetError> {
  let op = op_map(&t.s);
  let q = op.inverse().evaluate(p)?;
  let r = t.fprime_at(&q)?;
  op.evaluate(&r)
}

pub fn evaluate<S: Scalar>(f: &PiecewiseTranslation<S>, p: &Point2<S>) -> Result<Point2<S>, PetError> {
  f.evaluate(p)
}

pub fn orbit_coding<S: Scalar>(f: &PiecewiseTranslation<S>, p: &Point2<S>, n: usize) -> Result<Vec<usize>, PetError> {
  let mut cur = p.clone();
  let mut word = Vec::with_capacity(n);
  for step in 0..n {
    let i = f.locate_piece(&cur).map_err(|_| PetError::UndefinedOnBoundary { step })?;
    word.push(i);
    cur = &cur + &f.pieces[i].shift;
  }
  Ok(word)
}

fn refine_step<S: Scalar>(f: &PiecewiseTranslation<S>, cells: Vec<RefinedCell<S>>) -> Vec<RefinedCell<S>> {
  let mut out = Vec::new();
  for c in cells {
    let img = c.cell.translate(&c.shift);
    for (j, p) in f.pieces.iter().enumerate() {
      if let Some(piece) = img.intersection(&p.cell) {
        let mut word = c.word.clone();
        word.push(j);
        out.push(RefinedCell { cell: piece.translate(&-c.shift.clone()), shift: c.shift.clone() + p.shift.clone(), word });
      }
    }
  }
  out
}

/// Cells of the n-th refinement 𝒜_n with their composed shifts and codings.
pub fn refine_partition<S: Scalar>(f: &PiecewiseTranslation<S>, n: usize) -> Vec<RefinedCell<S>> {
  let mut cells = vec![RefinedCell { cell: f.ambient.clone(), shift: Vector2::zero(), word: Vec::new() }];
  if n == 0 {
    return f.pieces.iter().enumerate().map(|(i, p)| RefinedCell { cell: p.cell.clone(), shift: Vector2::zero(), word: vec![i] }).collect();
  }
  for _ in 0..n {
    cells = refine_step(f, cells);
  }
  cells
}

/// Periodic tiles of period at most `max_period`, each with its minimal period and coding.
pub fn periodic_tiles<S: Scalar>(f: &PiecewiseTranslation<S>, max_period: usize) -> Vec<PeriodicTile<S>> {
  let mut active = vec![RefinedCell { cell: f.ambient.clone(), shift: Vector2::zero(), word: Vec::new() }];
  let mut tiles = Vec::new();
  for n in 1..=max_period {
    let next = refine_step(f, active);
    active = Vec::new();
    for c in next {
      if c.shift.is_zero() {
        tiles.push(PeriodicTile { cell: c.cell, period: n, coding: c.word });
      } else {
        active.push(c);
      }
    }
  }
  tiles
}

/// `x` has denominator dividing `2q`.
pub fn on_half_grid(x: &num_rational::BigRational, q: &BigInt) -> bool {
  let scaled = x * num_rational::BigRational::from_integer(q * 2);
  scaled.is_integer()
}
