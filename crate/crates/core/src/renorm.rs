//! The renormalization map R, return regions Y_s, similarities ψ_s and first-return maps.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::PetError;
use crate::geom2::{ConvexPolygon, Point2, Similarity2, Vector2};
use crate::pet::{build_triple_pet, op_map, pieces_same_map, x_s, PieceMap, PiecewiseTranslation};
use crate::scalar::{Rational, Scalar};

fn out_of_range<S: Scalar>(s: &S) -> PetError {
  PetError::ParameterOutOfRange(s.to_string())
}

fn open_unit<S: Scalar>(s: &S) -> Result<(), PetError> {
  if !s.is_positive() || *s >= S::one() {
    return Err(out_of_range(s));
  }
  Ok(())
}

fn int<S: Scalar>(n: BigInt) -> S {
  S::from_rational(Rational::from_integer(n))
}

/// R₁(s) = s / (1 + s − s⌊1/s⌋).
pub fn r1<S: Scalar>(s: &S) -> S {
  let a1: S = int(s.recip().floor());
  s.clone() / (S::one() + s.clone() - s.clone() * a1)
}

/// The three-branch renormalization map on (0, 1).
pub fn renorm_r<S: Scalar>(s: &S) -> Result<S, PetError> {
  open_unit(s)?;
  let half = S::one().half();
  let two_thirds = S::from_int(2) / S::from_int(3);
  if *s < half {
    Ok(r1(s))
  } else if *s < two_thirds {
    Ok((S::one() - s.clone()) / s.clone())
  } else {
    Ok(r1(&((S::one() - s.clone()) / s.clone())))
  }
}

/// Continued fraction digits (a₁, …, a_n) of s ∈ (0, 1).
pub fn cfe(s: &Rational) -> Result<Vec<BigInt>, PetError> {
  open_unit(s)?;
  let mut num = s.numer().clone();
  let mut den = s.denom().clone();
  let mut out = Vec::new();
  while !num.is_zero() {
    let (d, r) = den.div_rem(&num);
    out.push(d);
    den = num;
    num = r;
  }
  Ok(out)
}

/// Where s falls: below 1/2 (with a₁ = ⌊1/s⌋) or in I_j = [(j+1)/(j+2), (j+2)/(j+3)).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
  Low { a1: i64 },
  Upper { j: i64 },
}

pub fn branch<S: Scalar>(s: &S) -> Result<Branch, PetError> {
  open_unit(s)?;
  if *s < S::one().half() {
    return Ok(Branch::Low { a1: s.recip().floor().to_i64().unwrap() });
  }
  let k = (s.clone() / (S::one() - s.clone())).floor();
  Ok(Branch::Upper { j: k.to_i64().unwrap() - 1 })
}

/// The return region, a union of interior-disjoint convex pieces.
#[derive(Clone, Debug)]
pub struct ReturnRegion<S: Scalar> {
  pub pieces: Vec<ConvexPolygon<S>>,
  pub parameter: S,
}

impl<S: Scalar> ReturnRegion<S> {
  pub fn area(&self) -> S {
    self.pieces.iter().fold(S::zero(), |a, p| a + p.area())
  }
}

fn centered<S: Scalar>(c: &Point2<S>, u: &Vector2<S>, w: &Vector2<S>) -> ConvexPolygon<S> {
  let corner = c - &(u.clone() + w.clone()).scale(&S::one().half());
  ConvexPolygon::parallelogram(&corner, u, w).unwrap()
}

/// The diamonds ◇⁰_k and ◇¹_k, k = 1 … a₁−1, for s < 1/2.
pub fn diamonds<S: Scalar>(s: &S) -> Result<(Vec<ConvexPolygon<S>>, Vec<ConvexPolygon<S>>), PetError> {
  let Branch::Low { a1 } = branch(s)? else {
    return Ok((Vec::new(), Vec::new()));
  };
  let two = S::from_int(2);
  let horiz = Vector2::new(two.clone() * s.clone(), S::zero());
  let mut d0 = Vec::new();
  let mut d1 = Vec::new();
  for k in 1..a1 {
    let k = S::from_int(k);
    let c0 = Point2::new(S::one() - (two.clone() * k.clone() + S::one()) * s.clone(), S::zero());
    d0.push(centered(&c0, &horiz, &Vector2::new(s.clone(), s.clone())));
    let c1 = Point2::new(two.clone() * k * s.clone() - S::one(), S::zero());
    d1.push(centered(&c1, &horiz, &Vector2::new(-s.clone(), s.clone())));
  }
  Ok((d0, d1))
}

/// λ = 1 − (a₁ − 1)s, the width ratio of Y_s for s < 1/2.
fn lambda<S: Scalar>(s: &S, a1: i64) -> S {
  S::one() - S::from_int(a1 - 1) * s.clone()
}

fn lower_right<S: Scalar>(s: &S) -> Point2<S> {
  Point2::new(S::one() - s.half(), -s.half())
}

/// b_s = (j+1)s − j and the center of Y_s for s ∈ I_j.
fn upper_data<S: Scalar>(s: &S, j: i64) -> (S, Point2<S>) {
  let jj = S::from_int(j);
  let b = (jj.clone() + S::one()) * s.clone() - jj.clone();
  let c = Point2::new((jj.clone() - (jj.clone() + S::from_int(2)) * s.clone()).half(), (jj * (S::one() - s.clone())).half());
  (b, c)
}

pub fn build_y<S: Scalar>(s: &S) -> Result<ReturnRegion<S>, PetError> {
  let two = S::from_int(2);
  let piece = match branch(s)? {
    Branch::Low { a1 } => {
      let lam = lambda(s, a1);
      let w = Vector2::new(two * lam, S::zero());
      let corner = &lower_right(s) - &w;
      ConvexPolygon::parallelogram(&corner, &w, &Vector2::new(s.clone(), s.clone())).unwrap()
    }
    Branch::Upper { j } => {
      let (b, _) = upper_data(s, j);
      let v0 = Point2::new(s.half() - S::one(), s.half());
      let a = S::one() - s.clone();
      ConvexPolygon::parallelogram(&v0, &Vector2::new(two * a, S::zero()), &Vector2::new(-b.clone(), -b)).unwrap()
    }
  };
  Ok(ReturnRegion { pieces: vec![piece], parameter: s.clone() })
}

/// The flip-and-rotate matrix shared by the upper branches, in rescaled coordinates.
pub fn flip_matrix<S: Scalar>() -> [[S; 2]; 2] {
  let h = S::one().half();
  [[-h.clone(), -S::from_int(3) * h.clone()], [-h.clone(), h]]
}

/// ψ_s with ψ_s(Y_s) = X_{R(s)}.
pub fn build_psi<S: Scalar>(s: &S) -> Result<Similarity2<S>, PetError> {
  match branch(s)? {
    Branch::Low { a1 } => {
      let lam = lambda(s, a1);
      let u = s.clone() / lam.clone();
      let k = lam.recip();
      let h = Similarity2::homothety(k, &Point2::origin());
      let t = lower_right(&u).to_vec() - h.apply_vec(&lower_right(s).to_vec());
      Ok(Similarity2 { t, ..h })
    }
    Branch::Upper { j } => {
      let (b, c) = upper_data(s, j);
      let m = flip_matrix::<S>().map(|row| row.map(|x| x / b.clone()));
      let lin = Similarity2 { m, t: Vector2::zero() };
      let t = -lin.apply_vec(&c.to_vec());
      Ok(Similarity2 { t, ..lin })
    }
  }
}

/// Induced map on a region with per-cell return times.
#[derive(Clone, Debug)]
pub struct FirstReturn<S: Scalar> {
  pub pieces: Vec<(PieceMap<S>, usize)>,
}

impl<S: Scalar> FirstReturn<S> {
  pub fn piece_maps(&self) -> Vec<PieceMap<S>> {
    self.pieces.iter().map(|p| p.0.clone()).collect()
  }
  pub fn max_time(&self) -> usize {
    self.pieces.iter().map(|p| p.1).max().unwrap_or(0)
  }
}

struct Walker<S> {
  img: ConvexPolygon<S>,
  shift: Vector2<S>,
}

/// Cell-chases the region forward until every piece re-enters it.
pub fn first_return<S: Scalar>(f: &PiecewiseTranslation<S>, y: &ReturnRegion<S>, cap: usize) -> Result<FirstReturn<S>, PetError> {
  let mut frontier: Vec<Walker<S>> = y.pieces.iter().map(|p| Walker { img: p.clone(), shift: Vector2::zero() }).collect();
  let mut out = Vec::new();
  let mut time = 0;
  while !frontier.is_empty() {
    if time >= cap {
      let left = frontier.iter().fold(S::zero(), |a, w| a + w.img.area());
      return Err(PetError::CapExceeded { cap, unreturned: left.to_string() });
    }
    time += 1;
    let steps: Vec<(Vec<PieceMap<S>>, Vec<Walker<S>>)> = frontier
      .par_iter()
      .map(|w| {
        let mut done = Vec::new();
        let mut more = Vec::new();
        for p in &f.pieces {
          let Some(piece) = w.img.intersection(&p.cell) else { continue };
          let nimg = piece.translate(&p.shift);
          let nsh = w.shift.clone() + p.shift.clone();
          let mut rest = vec![nimg.clone()];
          for yp in &y.pieces {
            if let Some(inside) = nimg.intersection(yp) {
              done.push(PieceMap { cell: inside.translate(&-nsh.clone()), shift: nsh.clone() });
            }
            rest = rest.into_iter().flat_map(|r| r.difference(yp)).collect();
          }
          more.extend(rest.into_iter().map(|img| Walker { img, shift: nsh.clone() }));
        }
        (done, more)
      })
      .collect();
    frontier = Vec::new();
    for (done, more) in steps {
      out.extend(done.into_iter().map(|d| (d, time)));
      frontier.extend(more);
    }
  }
  Ok(FirstReturn { pieces: out })
}

/// Default cap: ten times the inverse area ratio of Y_s in X_s.
pub fn default_cap<S: Scalar>(s: &S) -> Result<usize, PetError> {
  let y = build_y(s)?;
  let r = x_s(s).area() * S::from_int(10) / y.area();
  Ok(r.ceil().to_usize().unwrap_or(usize::MAX))
}

#[derive(Clone, Debug, Serialize)]
pub struct PieceReport {
  pub cell: Vec<[String; 2]>,
  pub shift: [String; 2],
  pub return_time: usize,
  pub matched: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyReport {
  pub parameter: String,
  pub target: String,
  pub per_piece: Vec<PieceReport>,
  pub verdict: bool,
}

pub fn polygon_strings<S: Scalar>(p: &ConvexPolygon<S>) -> Vec<[String; 2]> {
  p.vertices().iter().map(|v| [v.x.to_string(), v.y.to_string()]).collect()
}

/// ψ-pullback of f_t's pieces to Y_s.
pub fn pullback<S: Scalar>(ft: &PiecewiseTranslation<S>, psi: &Similarity2<S>) -> Vec<PieceMap<S>> {
  let inv = psi.inverse();
  ft.pieces.iter().map(|p| PieceMap { cell: inv.apply_polygon(&p.cell), shift: inv.apply_vec(&p.shift) }).collect()
}

/// Checks f_s|_{Y_s} = ψ_s⁻¹ ∘ f_t ∘ ψ_s for t = R(s).
pub fn verify_conjugacy<S: Scalar>(s: &S, cap: usize) -> Result<ConjugacyReport, PetError> {
  let t = renorm_r(s)?;
  let fs = build_triple_pet(s)?;
  let ft = build_triple_pet(&t)?;
  let y = build_y(s)?;
  let psi = build_psi(s)?;
  let fr = first_return(&fs, &y, cap)?;
  let pulled = pullback(&ft, &psi);
  let merged = crate::pet::merge_pieces(fr.piece_maps());
  let mut per_piece = Vec::new();
  for (pm, time) in &fr.pieces {
    let matched = pulled.iter().any(|q| q.shift == pm.shift && q.cell.contains(&pm.cell));
    per_piece.push(PieceReport {
      cell: polygon_strings(&pm.cell),
      shift: [pm.shift.dx.to_string(), pm.shift.dy.to_string()],
      return_time: *time,
      matched,
    });
  }
  let verdict = per_piece.iter().all(|p| p.matched) && pieces_same_map(&merged, &pulled);
  Ok(ConjugacyReport { parameter: s.to_string(), target: t.to_string(), per_piece, verdict })
}

/// OP applied to the region X_s minus the ◇⁰ diamonds.
pub fn y_from_diamonds<S: Scalar>(s: &S) -> Result<Vec<ConvexPolygon<S>>, PetError> {
  let (d0, _) = diamonds(s)?;
  let mut rest = vec![x_s(s)];
  for d in &d0 {
    rest = rest.into_iter().flat_map(|r| r.difference(d)).collect();
  }
  let op = op_map(s);
  let mut out = Vec::new();
  for r in rest {
    for p in &op.pieces {
      if let Some(i) = r.intersection(&p.cell) {
        out.push(i.translate(&p.shift));
      }
    }
  }
  Ok(out)
}
