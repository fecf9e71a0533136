use std::collections::BTreeSet;

use proptest::prelude::*;
use tripet::limitset::{self, *};
use tripet::pet::periodic_tiles;
use tripet::{build_triple_pet, q, ConvexPolygon, Golden, LimitError, Point2, Rational, Scalar};

fn g(r: Rational) -> Golden {
  Golden::from_rational(r)
}

fn canon(p: &ConvexPolygon<Golden>) -> Vec<Point2<Golden>> {
  p.canonical()
}

#[test]
fn trapezoids_at_8_13() {
  let s = q(8, 13);
  let [a, b, c] = fundamental_trapezoids(&s).unwrap();
  assert_eq!(limitset::v0(&s), Point2::new(q(-9, 13), q(4, 13)));
  assert!(a.polygon.vertices().contains(&Point2::new(q(-9, 13), q(4, 13))));
  assert_eq!(b.polygon, mu(&s).apply_polygon(&a.polygon));
  assert_eq!(c.polygon, nu(&s).apply_polygon(&a.polygon));
  assert_eq!(a.polygon.area(), b.polygon.area());
  assert!(matches!(fundamental_trapezoids(&q(1, 2)), Err(LimitError::ParameterOutOfRange)));
}

#[test]
fn trapezoid_side_lengths() {
  for s in [q(8, 13), q(13, 21), q(5, 8)] {
    let a = trapezoid_a(&s);
    let mut got = a.side_norm2s();
    got.sort();
    let w = Rational::from_integer(1.into()) - s.clone();
    let mut want = vec![(s.clone() * q(2, 1)).pow(2), (w.clone() * q(2, 1)).pow(2), (w.clone() * q(2, 1)).pow(2), ((s.clone() * q(2, 1) - q(1, 1)) * q(2, 1)).pow(2)];
    want.sort();
    assert_eq!(got, want, "s={s}");
  }
}

#[test]
fn substitution_children() {
  let [a, ..] = fundamental_trapezoids(&phi()).unwrap();
  let kids = substitute(&a);
  let f2 = phi() * phi();
  let ratios: Vec<Golden> = kids.iter().map(|k| k.polygon.area() / a.polygon.area()).collect();
  assert_eq!(ratios, vec![f2.clone(), f2.clone() * f2.clone(), f2.clone()]);
  for (i, k) in kids.iter().enumerate() {
    assert!(a.polygon.contains(&k.polygon));
    for l in &kids[i + 1..] {
      assert!(k.polygon.intersection(&l.polygon).is_none());
    }
  }
  let [t1, t2] = complement_triangles();
  let total = kids.iter().fold(Golden::zero(), |acc, k| acc + k.polygon.area()) + t1.area() + t2.area();
  assert_eq!(total, a.polygon.area());
  assert!(open_set_condition());
  assert!(complement_is_two_triangles());
}

#[test]
fn chain_counts_and_nesting() {
  assert_eq!(chain(0).unwrap().trapezoids.len(), 3);
  assert_eq!(chain(2).unwrap().trapezoids.len(), 27);
  assert!(matches!(chain(10), Err(LimitError::DepthTooLarge(10))));
  for n in 0..3 {
    let outer = chain(n).unwrap();
    let inner = chain(n + 1).unwrap();
    for t in &inner.trapezoids {
      let holders = outer.trapezoids.iter().filter(|o| o.polygon.contains(&t.polygon)).count();
      assert_eq!(holders, 1);
    }
  }
}

#[test]
fn chain_area_law() {
  let r = area_ratio();
  assert_eq!(chain_area(1).unwrap(), chain_area(0).unwrap() * r.clone());
  assert!(r < Golden::one());
  assert_eq!(chain_area(0).unwrap(), trapezoid_a(&phi()).area() * Golden::from_int(3));
}

#[test]
fn attractor_identity() {
  let maps = model_maps();
  for n in 0..4 {
    let a_part = |c: &Chain<Golden>| -> BTreeSet<Vec<Point2<Golden>>> { c.trapezoids.iter().filter(|t| t.label[0] == b'A').map(|t| canon(&t.polygon)).collect() };
    let next = a_part(&chain(n + 1).unwrap());
    let cur = chain(n).unwrap();
    let mapped: BTreeSet<_> = cur.trapezoids.iter().filter(|t| t.label[0] == b'A').flat_map(|t| maps.iter().map(|m| canon(&m.apply_polygon(&t.polygon)))).collect();
    assert_eq!(next, mapped, "n={n}");
  }
}

#[test]
fn shield_pattern() {
  let sh = shield_sequence(12);
  let side = phi() * Golden::from_int(4) - Golden::from_int(2);
  assert!(sh[0].side_norm2s().iter().all(|l| *l == side.clone() * side.clone()));
  let z = xi();
  for k in 0..12 {
    assert_eq!(sh[k + 1], z.apply_polygon(&sh[k]));
    assert_eq!(sh[k + 1].area(), sh[k].area() * phi() * phi());
    assert_eq!(sh[k].vertices().iter().filter(|v| l0_contains(v)).count(), 2);
  }
  let contacts = contact_points(13);
  for i in 0..sh.len() {
    for j in i + 1..sh.len() {
      let pts = sh[i].closed_intersection_points(&sh[j]);
      if j == i + 1 {
        assert_eq!(pts, vec![contacts[i + 1].clone()], "P{i}∩P{j}");
      } else {
        assert!(pts.is_empty(), "P{i}∩P{j}");
      }
    }
  }
}

#[test]
fn a_b_contacts_shrink_to_shield_points() {
  let contacts = contact_points(10);
  for n in 1..=4 {
    let c = chain(n).unwrap();
    let (ta, tb): (Vec<_>, Vec<_>) = c.trapezoids.iter().filter(|t| t.label[0] != b'C').partition(|t| t.label[0] == b'A');
    let radius = trapezoid_a(&phi()).max_side_norm2().to_f64().sqrt() * phi().to_f64().powi(n as i32);
    for a in &ta {
      for b in &tb {
        for p in a.polygon.closed_intersection_points(&b.polygon) {
          let (x, y) = p.to_f64();
          let near = contacts.iter().any(|c| {
            let (cx, cy) = c.to_f64();
            ((x - cx).powi(2) + 3.0 * (y - cy).powi(2)).sqrt() <= radius
          });
          assert!(near, "n={n} ({x}, {y})");
        }
      }
    }
  }
}

#[test]
fn periodic_tiles_lie_in_trapezoids() {
  let f = build_triple_pet(&phi()).unwrap();
  let abc = fundamental_trapezoids(&phi()).unwrap();
  let mut outside = Vec::new();
  for t in periodic_tiles(&f, 20) {
    let cov = abc.iter().fold(Golden::zero(), |a, m| a + m.polygon.intersection(&t.cell).map(|i| i.area()).unwrap_or_else(Golden::zero));
    if cov != t.cell.area() {
      outside.push(t);
    }
  }
  assert_eq!(outside.len(), 3);
  assert!(outside.iter().all(|t| t.period == 1 && t.cell.len() == 3));
  let [t1, t2] = complement_triangles();
  assert_eq!(tile_period(&f, &t1, 100), Some(2));
  assert_eq!(tile_period(&f, &t2, 100), Some(4));
}

#[test]
fn dimension_bounds() {
  let d = hausdorff_dimension();
  assert!(d.approx > 1.0 && d.approx < 2.0);
  assert!(residual_below(30));
  // Independent double-precision evaluation.
  let want = (2f64.sqrt() - 1.0).ln() / ((5f64.sqrt() - 1.0) / 2.0).ln();
  assert!((d.approx - want).abs() < 1e-13);
}

#[test]
fn density_depths() {
  let l0 = trapezoid_a(&phi()).max_side_norm2().to_f64().sqrt();
  assert_eq!(density_witness(&g(q(2, 1))).depth, 0);
  for (n, d) in [(1, 10), (1, 100), (1, 1000), (3, 7)] {
    let eps = n as f64 / d as f64;
    let want = ((eps / l0).ln() / phi().to_f64().ln()).ceil().max(0.0) as usize;
    assert_eq!(density_witness(&g(q(n, d))).depth, want, "eps={eps}");
  }
}

proptest! {
  #![proptest_config(ProptestConfig::with_cases(24))]

  #[test]
  fn every_node_has_two_periodic_triangles(depth in 0usize..4, pick in 0usize..1000) {
    let c = chain(depth).unwrap();
    let t = &c.trapezoids[pick % c.trapezoids.len()];
    let kids = substitute(t);
    let tris: Vec<ConvexPolygon<Golden>> = complement_triangles().iter().map(|p| t.frame.apply_polygon(p)).collect();
    let total = kids.iter().map(|k| k.polygon.area()).chain(tris.iter().map(|p| p.area())).fold(Golden::zero(), |a, x| a + x);
    prop_assert_eq!(total, t.polygon.area());
    prop_assert!(tris.iter().all(|p| p.len() == 3 && t.polygon.contains(p)));
  }
}
