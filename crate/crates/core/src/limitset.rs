//! The limit set at s = φ: marked trapezoids, the three-map substitution, chains and dimension.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::LimitError;
use crate::geom2::{ConvexPolygon, Point2, Similarity2, Vector2};
use crate::pet::PiecewiseTranslation;
use crate::scalar::{q, Golden, Scalar};

pub const MAX_CHAIN_DEPTH: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedTrapezoid<S: Scalar> {
  pub polygon: ConvexPolygon<S>,
  pub frame: Similarity2<S>,
  pub depth: usize,
  pub label: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct Chain<S: Scalar> {
  pub depth: usize,
  pub trapezoids: Vec<MarkedTrapezoid<S>>,
}

fn pt<S: Scalar>(x: S, y: S) -> Point2<S> {
  Point2::new(x, y)
}

/// [v0, v1, v2, v3] with v1 = v0 + (s, −s), v2 = v0 − (1 − s)(1, 1), v3 = v1 − (2(1 − s), 0).
pub fn a_vertices<S: Scalar>(s: &S) -> [Point2<S>; 4] {
  let one = S::one();
  let w = one.clone() - s.clone();
  let v0 = pt(s.half() - one, s.half());
  let v1 = &v0 + &Vector2::new(s.clone(), -s.clone());
  let v2 = &v0 + &Vector2::new(-w.clone(), -w.clone());
  let v3 = &v1 + &Vector2::new(-(w.clone() + w), S::zero());
  [v0, v1, v2, v3]
}

pub fn trapezoid_a<S: Scalar>(s: &S) -> ConvexPolygon<S> {
  let [v0, v1, v2, v3] = a_vertices(s);
  ConvexPolygon::new(vec![v0, v2, v3, v1]).expect("A_s is a trapezoid")
}

pub fn v0<S: Scalar>(s: &S) -> Point2<S> {
  pt(s.half() - S::one(), s.half())
}

/// Rotation by +60° about v0.
pub fn mu<S: Scalar>(s: &S) -> Similarity2<S> {
  Similarity2::rotation60(1, &v0(s))
}

/// Reflection in the vertical line x = 3s/2 − 1.
pub fn nu<S: Scalar>(s: &S) -> Similarity2<S> {
  Similarity2::reflect_vertical(S::from_int(3).half() * s.clone() - S::one())
}

pub fn check_symmetry_parameter<S: Scalar>(s: &S) -> Result<(), LimitError> {
  let lo = S::from_rational(q(8, 13));
  let hi = S::from_rational(q(13, 21));
  if *s < lo || *s > hi {
    return Err(LimitError::ParameterOutOfRange);
  }
  Ok(())
}

/// A, B = μ(A) and C = ν(A) as depth-0 marked trapezoids.
pub fn fundamental_trapezoids<S: Scalar>(s: &S) -> Result<[MarkedTrapezoid<S>; 3], LimitError> {
  check_symmetry_parameter(s)?;
  let a = trapezoid_a(s);
  let mk = |frame: Similarity2<S>, l: u8| MarkedTrapezoid { polygon: frame.apply_polygon(&a), frame, depth: 0, label: vec![l] };
  Ok([mk(Similarity2::identity(), b'A'), mk(mu(s), b'B'), mk(nu(s), b'C')])
}

pub fn phi() -> Golden {
  Golden::gen()
}

/// ξ(p) = φ·M·p − (φ, 0); this is ψ_φ⁻¹ and fixes v0.
pub fn xi() -> Similarity2<Golden> {
  let f = phi();
  let h = f.half();
  let m = [[-h.clone(), -(h.clone() + h.clone() + h.clone())], [-h.clone(), h]];
  Similarity2::new(m, Vector2::new(-f, Golden::zero())).expect("similarity")
}

/// Reflection (x, y) ↦ (x/2 + 3y/2, x/2 − y/2) about (φ − 1, 0); it maps A onto itself.
pub fn iota1() -> Similarity2<Golden> {
  let h = Golden::one().half();
  let m = [[h.clone(), Golden::from_int(3).half()], [h.clone(), -h]];
  let lin = Similarity2::new(m, Vector2::zero()).expect("similarity");
  lin.about(&pt(phi() - Golden::one(), Golden::zero()))
}

/// The three model maps σ1 = μ⁻¹∘ξ, σ2: p ↦ v3 − φ²(p − v0), σ3 = ι₁∘σ1.
pub fn model_maps() -> [Similarity2<Golden>; 3] {
  let s = phi();
  let [v0, _, _, v3] = a_vertices(&s);
  let k = s.clone() * s.clone();
  let sigma1 = mu(&s).inverse().compose(&xi());
  let lin = Similarity2 { m: [[-k.clone(), Golden::zero()], [Golden::zero(), -k]], t: Vector2::zero() };
  let sigma2 = Similarity2::translation(v3.to_vec()).compose(&lin).compose(&Similarity2::translation(-v0.to_vec()));
  let sigma3 = iota1().compose(&sigma1);
  [sigma1, sigma2, sigma3]
}

/// P_0: apex-down equilateral triangle of side 4φ − 2 with bottom vertex v1.
pub fn p0() -> ConvexPolygon<Golden> {
  let s = phi();
  let a = s.clone() + s.clone() - Golden::one();
  let v1 = pt(Golden::from_int(3).half() * s.clone() - Golden::one(), -s.half());
  ConvexPolygon::hull(&[v1.clone(), &v1 + &Vector2::new(a.clone(), a.clone()), &v1 + &Vector2::new(-a.clone(), a)]).expect("triangle")
}

/// The two triangles filling A minus its three children: ξ(P_0) and σ1∘ι₁∘σ1(P_0).
pub fn complement_triangles() -> [ConvexPolygon<Golden>; 2] {
  let [s1, _, _] = model_maps();
  let t = p0();
  [xi().apply_polygon(&t), s1.compose(&iota1()).compose(&s1).apply_polygon(&t)]
}

pub fn substitute(t: &MarkedTrapezoid<Golden>) -> [MarkedTrapezoid<Golden>; 3] {
  let a = trapezoid_a(&phi());
  let maps = model_maps();
  let mk = |k: usize| {
    let frame = t.frame.compose(&maps[k]);
    let mut label = t.label.clone();
    label.push(b'1' + k as u8);
    MarkedTrapezoid { polygon: frame.apply_polygon(&a), frame, depth: t.depth + 1, label }
  };
  [mk(0), mk(1), mk(2)]
}

pub fn chain(n: usize) -> Result<Chain<Golden>, LimitError> {
  if n > MAX_CHAIN_DEPTH {
    return Err(LimitError::DepthTooLarge(n));
  }
  let mut cur: Vec<MarkedTrapezoid<Golden>> = fundamental_trapezoids(&phi())?.to_vec();
  for _ in 0..n {
    cur = cur.par_iter().flat_map_iter(|t| substitute(t)).collect();
  }
  Ok(Chain { depth: n, trapezoids: cur })
}

pub fn chain_area(n: usize) -> Result<Golden, LimitError> {
  Ok(chain(n)?.trapezoids.iter().fold(Golden::zero(), |a, t| a + t.polygon.area()))
}

/// Closed form: area(C_n) = 3·area(A)·(2φ² + φ⁴)ⁿ.
pub fn chain_area_closed(n: usize) -> Golden {
  let s = phi();
  let r = area_ratio();
  let mut acc = Golden::from_int(3) * trapezoid_a(&s).area();
  for _ in 0..n {
    acc = acc * r.clone();
  }
  acc
}

pub fn area_ratio() -> Golden {
  let s2 = phi() * phi();
  s2.clone() + s2.clone() + s2.clone() * s2
}

/// P_0, ξ(P_0), …, ξⁿ(P_0).
pub fn shield_sequence(n: usize) -> Vec<ConvexPolygon<Golden>> {
  let z = xi();
  let mut out = vec![p0()];
  for _ in 0..n {
    let next = z.apply_polygon(out.last().unwrap());
    out.push(next);
  }
  out
}

/// The line l_0 through v0 and v1, which carries A ∩ B.
pub fn l0_contains(p: &Point2<Golden>) -> bool {
  let s = phi();
  let a = v0(&s);
  (p.x.clone() - a.x) + (p.y.clone() - a.y) == Golden::zero()
}

/// The points ξⁿ(V_0) for the bottom vertex V_0 of P_0, n = 0..=k.
pub fn contact_points(k: usize) -> Vec<Point2<Golden>> {
  let z = xi();
  let v = p0().vertices().iter().min_by(|a, b| a.y.cmp(&b.y)).unwrap().clone();
  let mut out = vec![v];
  for _ in 0..k {
    let n = z.apply(out.last().unwrap());
    out.push(n);
  }
  out
}

#[derive(Clone, Debug, Serialize)]
pub struct Dimension {
  pub value: String,
  pub approx: f64,
  pub residual: String,
}

const PREC: usize = 512;

fn to_decimal(x: &BigFloat, cc: &mut Consts) -> String {
  x.format(Radix::Dec, RoundingMode::ToEven, cc).expect("finite")
}

/// d = ln(√2 − 1)/ln φ, the root of 2φ^d + φ^{2d} = 1.
pub fn hausdorff_dimension() -> Dimension {
  let rm = RoundingMode::ToEven;
  let mut cc = Consts::new().expect("constants");
  let one = BigFloat::from_word(1, PREC);
  let two = BigFloat::from_word(2, PREC);
  let five = BigFloat::from_word(5, PREC);
  let x = two.sqrt(PREC, rm).sub(&one, PREC, rm);
  let f = five.sqrt(PREC, rm).sub(&one, PREC, rm).div(&two, PREC, rm);
  let d = x.ln(PREC, rm, &mut cc).div(&f.ln(PREC, rm, &mut cc), PREC, rm);
  let residual = two.mul(&x, PREC, rm).add(&x.mul(&x, PREC, rm), PREC, rm).sub(&one, PREC, rm);
  let value = to_decimal(&d, &mut cc);
  let approx = decimal_to_f64(&value);
  Dimension { value, approx, residual: to_decimal(&residual.abs(), &mut cc) }
}

fn decimal_to_f64(t: &str) -> f64 {
  t.parse().unwrap_or_else(|_| t.replace("e+0", "").parse().unwrap_or(f64::NAN))
}

/// |2x + x² − 1| at x = √2 − 1 is below 10^-k.
pub fn residual_below(k: u32) -> bool {
  let rm = RoundingMode::ToEven;
  let mut cc = Consts::new().expect("constants");
  let one = BigFloat::from_word(1, PREC);
  let two = BigFloat::from_word(2, PREC);
  let x = two.sqrt(PREC, rm).sub(&one, PREC, rm);
  let r = two.mul(&x, PREC, rm).add(&x.mul(&x, PREC, rm), PREC, rm).sub(&one, PREC, rm).abs();
  let bound = BigFloat::parse(&format!("1e-{k}"), Radix::Dec, PREC, rm, &mut cc);
  r.cmp(&bound).is_some_and(|c| c < 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
  pub epsilon: String,
  pub depth: usize,
  pub longest_side: f64,
  pub patches: usize,
  pub periodic_triangles: usize,
}

/// Smallest depth at which every marked trapezoid has longest side at most `eps`.
pub fn density_witness(eps: &Golden) -> DensityReport {
  let a = trapezoid_a(&phi());
  let mut l2 = a.max_side_norm2();
  let e2 = eps.clone() * eps.clone();
  let f2 = phi() * phi();
  let mut n = 0;
  while l2 > e2 {
    l2 = l2 * f2.clone();
    n += 1;
  }
  let patches = 3usize.saturating_mul(3usize.saturating_pow(n as u32));
  DensityReport {
    epsilon: eps.to_string(),
    depth: n,
    longest_side: l2.to_f64().sqrt(),
    patches,
    periodic_triangles: patches.saturating_sub(3),
  }
}

/// The three images σ_i(A) lie in A with pairwise disjoint interiors.
pub fn open_set_condition() -> bool {
  let a = trapezoid_a(&phi());
  let kids: Vec<ConvexPolygon<Golden>> = model_maps().iter().map(|m| m.apply_polygon(&a)).collect();
  let inside = kids.iter().all(|k| a.contains(k));
  let disjoint = (0..3).all(|i| (i + 1..3).all(|j| kids[i].intersection(&kids[j]).is_none()));
  inside && disjoint
}

/// A minus the three children equals the two complement triangles, checked by area and containment.
pub fn complement_is_two_triangles() -> bool {
  let a = trapezoid_a(&phi());
  let kids: Vec<ConvexPolygon<Golden>> = model_maps().iter().map(|m| m.apply_polygon(&a)).collect();
  let tris = complement_triangles();
  let mut all: Vec<&ConvexPolygon<Golden>> = kids.iter().collect();
  all.extend(tris.iter());
  let total = all.iter().fold(Golden::zero(), |acc, p| acc + p.area());
  let inside = all.iter().all(|p| a.contains(p));
  let disjoint = (0..all.len()).all(|i| (i + 1..all.len()).all(|j| all[i].intersection(all[j]).is_none()));
  inside && disjoint && total == a.area() && tris.iter().all(|t| t.len() == 3)
}

/// Period of `t` as a tile: each iterate lies in one cell and the orbit closes with zero total shift.
pub fn tile_period<S: Scalar>(f: &PiecewiseTranslation<S>, t: &ConvexPolygon<S>, max: usize) -> Option<usize> {
  let mut cur = t.clone();
  let mut total = Vector2::zero();
  for n in 1..=max {
    let piece = f.pieces.iter().find(|p| p.cell.contains(&cur))?;
    cur = cur.translate(&piece.shift);
    total = total + piece.shift.clone();
    if total.is_zero() && cur == *t {
      return Some(n);
    }
  }
  None
}
