//! Exact scalars: big rationals, real quadratic extensions and linear forms in `s`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ScalarError;

pub type Rational = BigRational;

/// Shorthand for building a rational from two machine integers.
pub fn q(n: i64, d: i64) -> Rational {
  Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Rational {
  Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
  Negative,
  Zero,
  Positive,
}

impl Sign {
  pub fn of_ordering(o: Ordering) -> Sign {
    match o {
      Ordering::Less => Sign::Negative,
      Ordering::Equal => Sign::Zero,
      Ordering::Greater => Sign::Positive,
    }
  }
}

/// An ordered field element with exact arithmetic.
pub trait Scalar:
  Clone
  + Eq
  + Ord
  + Hash
  + fmt::Debug
  + fmt::Display
  + Send
  + Sync
  + 'static
  + Add<Output = Self>
  + Sub<Output = Self>
  + Mul<Output = Self>
  + Div<Output = Self>
  + Neg<Output = Self>
{
  fn zero() -> Self;
  fn one() -> Self;
  fn from_rational(q: Rational) -> Self;
  fn sign(&self) -> Sign;
  fn to_f64(&self) -> f64;
  fn floor(&self) -> BigInt;
  /// Parses the textual exact format.
  fn parse(s: &str) -> Result<Self, ScalarError>;

  fn from_int(n: i64) -> Self {
    Self::from_rational(qi(n))
  }
  fn is_zero(&self) -> bool {
    self.sign() == Sign::Zero
  }
  fn is_positive(&self) -> bool {
    self.sign() == Sign::Positive
  }
  fn is_negative(&self) -> bool {
    self.sign() == Sign::Negative
  }
  fn abs(&self) -> Self {
    if self.is_negative() {
      -self.clone()
    } else {
      self.clone()
    }
  }
  fn ceil(&self) -> BigInt {
    -((-self.clone()).floor())
  }
  fn half(&self) -> Self {
    self.clone() / Self::from_int(2)
  }
  fn recip(&self) -> Self {
    Self::one() / self.clone()
  }
}

impl Scalar for Rational {
  fn zero() -> Self {
    <Rational as Zero>::zero()
  }
  fn one() -> Self {
    <Rational as One>::one()
  }
  fn from_rational(q: Rational) -> Self {
    q
  }
  fn sign(&self) -> Sign {
    if Zero::is_zero(self) {
      Sign::Zero
    } else if Signed::is_positive(self) {
      Sign::Positive
    } else {
      Sign::Negative
    }
  }
  fn to_f64(&self) -> f64 {
    ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
  }
  fn floor(&self) -> BigInt {
    self.numer().div_floor(self.denom())
  }
  fn parse(s: &str) -> Result<Self, ScalarError> {
    parse_rational(s)
  }
}

pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
  let t = s.trim();
  let bad = || ScalarError::Parse(s.to_string());
  match t.split_once('/') {
    Some((n, d)) => {
      let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
      let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
      if d.is_zero() {
        return Err(bad());
      }
      Ok(Rational::new(n, d))
    }
    None => Ok(Rational::from_integer(BigInt::from_str(t).map_err(|_| bad())?)),
  }
}

/// Defining polynomial `σ² = ασ + β` of a real quadratic field; σ is the positive root.
pub trait Modulus: Copy + Default + fmt::Debug + Eq + Ord + Hash + Send + Sync + 'static {
  const ALPHA: (i64, i64);
  const BETA: (i64, i64);
  const SYMBOL: &'static str;

  fn alpha() -> Rational {
    q(Self::ALPHA.0, Self::ALPHA.1)
  }
  fn beta() -> Rational {
    q(Self::BETA.0, Self::BETA.1)
  }
  /// Discriminant α² + 4β of the defining polynomial.
  fn disc() -> Rational {
    Self::alpha() * Self::alpha() + qi(4) * Self::beta()
  }
}

/// σ² = 1 − σ, so σ = (√5 − 1)/2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phi;

impl Modulus for Phi {
  const ALPHA: (i64, i64) = (-1, 1);
  const BETA: (i64, i64) = (1, 1);
  const SYMBOL: &'static str = "phi";
}

/// `a + b·σ` in Q(σ).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt<M: Modulus> {
  pub a: Rational,
  pub b: Rational,
  _m: PhantomData<M>,
}

pub type Golden = QuadExt<Phi>;

impl<M: Modulus> QuadExt<M> {
  pub fn new(a: Rational, b: Rational) -> Self {
    QuadExt { a, b, _m: PhantomData }
  }

  /// The generator σ itself.
  pub fn gen() -> Self {
    Self::new(qi(0), qi(1))
  }

  pub fn rational(a: Rational) -> Self {
    Self::new(a, qi(0))
  }

  pub fn conj(&self) -> Self {
    Self::new(&self.a + &self.b * M::alpha(), -self.b.clone())
  }

  /// Field norm, a rational.
  pub fn norm(&self) -> Rational {
    // (a + bσ)(a + bα − bσ) = a² + abα − b²β
    &self.a * &self.a + &self.a * &self.b * M::alpha() - &self.b * &self.b * M::beta()
  }

  pub fn as_rational(&self) -> Option<&Rational> {
    if Zero::is_zero(&self.b) {
      Some(&self.a)
    } else {
      None
    }
  }

  fn sign_exact(&self) -> Sign {
    // a + bσ = u + v√D with u = a + bα/2, v = b/2
    let u = &self.a + &self.b * M::alpha() / qi(2);
    let v = &self.b / qi(2);
    let su = Scalar::sign(&u);
    let sv = Scalar::sign(&v);
    if sv == Sign::Zero {
      return su;
    }
    if su == Sign::Zero || su == sv {
      return sv;
    }
    match (&u * &u).cmp(&(&v * &v * M::disc())) {
      Ordering::Greater => su,
      Ordering::Less => sv,
      Ordering::Equal => Sign::Zero,
    }
  }

  fn sign_fast(&self) -> Option<Sign> {
    let a = ToPrimitive::to_f64(&self.a)?;
    let b = ToPrimitive::to_f64(&self.b)?;
    let sig = sigma_f64::<M>();
    let v = a + b * sig;
    let mag = a.abs() + (b * sig).abs();
    if !v.is_finite() || !mag.is_finite() || mag == 0.0 {
      return None;
    }
    if v.abs() > 1e-9 * mag {
      Some(if v > 0.0 { Sign::Positive } else { Sign::Negative })
    } else {
      None
    }
  }
}

fn sigma_f64<M: Modulus>() -> f64 {
  let al = ToPrimitive::to_f64(&M::alpha()).unwrap();
  let d = ToPrimitive::to_f64(&M::disc()).unwrap();
  (al + d.sqrt()) / 2.0
}

impl<M: Modulus> Add for QuadExt<M> {
  type Output = Self;
  fn add(self, o: Self) -> Self {
    Self::new(self.a + o.a, self.b + o.b)
  }
}

impl<M: Modulus> Sub for QuadExt<M> {
  type Output = Self;
  fn sub(self, o: Self) -> Self {
    Self::new(self.a - o.a, self.b - o.b)
  }
}

impl<M: Modulus> Neg for QuadExt<M> {
  type Output = Self;
  fn neg(self) -> Self {
    Self::new(-self.a, -self.b)
  }
}

impl<M: Modulus> Mul for QuadExt<M> {
  type Output = Self;
  fn mul(self, o: Self) -> Self {
    let bd = &self.b * &o.b;
    let a = &self.a * &o.a + &bd * M::beta();
    let b = &self.a * &o.b + &self.b * &o.a + bd * M::alpha();
    Self::new(a, b)
  }
}

impl<M: Modulus> Div for QuadExt<M> {
  type Output = Self;
  fn div(self, o: Self) -> Self {
    let n = o.norm();
    assert!(!Zero::is_zero(&n), "division by zero in QuadExt");
    let num = self * o.conj();
    Self::new(num.a / &n, num.b / n)
  }
}

impl<M: Modulus> PartialOrd for QuadExt<M> {
  fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
    Some(self.cmp(o))
  }
}

impl<M: Modulus> Ord for QuadExt<M> {
  fn cmp(&self, o: &Self) -> Ordering {
    match (self.clone() - o.clone()).sign() {
      Sign::Negative => Ordering::Less,
      Sign::Zero => Ordering::Equal,
      Sign::Positive => Ordering::Greater,
    }
  }
}

impl<M: Modulus> fmt::Display for QuadExt<M> {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if Zero::is_zero(&self.b) {
      return write!(f, "{}", self.a);
    }
    if Zero::is_zero(&self.a) {
      return write!(f, "{}*{}", self.b, M::SYMBOL);
    }
    if Signed::is_negative(&self.b) {
      write!(f, "{}-{}*{}", self.a, -self.b.clone(), M::SYMBOL)
    } else {
      write!(f, "{}+{}*{}", self.a, self.b, M::SYMBOL)
    }
  }
}

impl<M: Modulus> Scalar for QuadExt<M> {
  fn zero() -> Self {
    Self::rational(qi(0))
  }
  fn one() -> Self {
    Self::rational(qi(1))
  }
  fn from_rational(q: Rational) -> Self {
    Self::rational(q)
  }
  fn sign(&self) -> Sign {
    self.sign_fast().unwrap_or_else(|| self.sign_exact())
  }
  fn to_f64(&self) -> f64 {
    Scalar::to_f64(&self.a) + Scalar::to_f64(&self.b) * sigma_f64::<M>()
  }
  fn floor(&self) -> BigInt {
    if let Some(r) = self.as_rational() {
      return Scalar::floor(r);
    }
    let mut k = BigInt::from(Scalar::to_f64(self).floor() as i64);
    loop {
      let kq = Self::rational(Rational::from_integer(k.clone()));
      if kq > *self {
        k -= 1;
      } else if kq + Self::one() <= *self {
        k += 1;
      } else {
        return k;
      }
    }
  }
  fn parse(s: &str) -> Result<Self, ScalarError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let sym = M::SYMBOL;
    let Some(head) = t.strip_suffix(sym) else {
      return Ok(Self::rational(parse_rational(&t)?));
    };
    let head = head.strip_suffix('*').unwrap_or(head);
    let split = head
      .char_indices()
      .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
      .map(|(i, _)| i)
      .last();
    let (a_txt, b_txt) = match split {
      Some(i) => (&head[..i], &head[i..]),
      None => ("", head),
    };
    let a = if a_txt.is_empty() { qi(0) } else { parse_rational(a_txt)? };
    let b_txt = b_txt.strip_prefix('+').unwrap_or(b_txt);
    let b = match b_txt {
      "" => qi(1),
      "-" => qi(-1),
      other => parse_rational(other)?,
    };
    Ok(Self::new(a, b))
  }
}

/// The value `m·s + n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinFormS {
  pub m: Rational,
  pub n: Rational,
}

impl LinFormS {
  pub fn new(m: Rational, n: Rational) -> Self {
    LinFormS { m, n }
  }
  pub fn constant(n: Rational) -> Self {
    LinFormS { m: qi(0), n }
  }
  pub fn zero() -> Self {
    Self::constant(qi(0))
  }
  pub fn eval<S: Scalar>(&self, s: &S) -> S {
    S::from_rational(self.m.clone()) * s.clone() + S::from_rational(self.n.clone())
  }
  pub fn scale(&self, k: &Rational) -> Self {
    LinFormS::new(&self.m * k, &self.n * k)
  }
  /// Products stay affine only when one factor is constant.
  pub fn try_mul(&self, o: &LinFormS) -> Result<LinFormS, ScalarError> {
    if !Zero::is_zero(&self.m) && !Zero::is_zero(&o.m) {
      return Err(ScalarError::DegreeOverflow);
    }
    Ok(LinFormS::new(&self.m * &o.n + &self.n * &o.m, &self.n * &o.n))
  }
  pub fn is_zero(&self) -> bool {
    Zero::is_zero(&self.m) && Zero::is_zero(&self.n)
  }
}

impl Add for LinFormS {
  type Output = LinFormS;
  fn add(self, o: LinFormS) -> LinFormS {
    LinFormS::new(self.m + o.m, self.n + o.n)
  }
}

impl Sub for LinFormS {
  type Output = LinFormS;
  fn sub(self, o: LinFormS) -> LinFormS {
    LinFormS::new(self.m - o.m, self.n - o.n)
  }
}

impl Neg for LinFormS {
  type Output = LinFormS;
  fn neg(self) -> LinFormS {
    LinFormS::new(-self.m, -self.n)
  }
}

impl fmt::Display for LinFormS {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{}*s+{}", self.m, self.n)
  }
}

pub fn scalar_sign<S: Scalar>(x: &S) -> Sign {
  x.sign()
}

pub fn linform_eval<S: Scalar>(f: &LinFormS, s: &S) -> S {
  f.eval(s)
}
