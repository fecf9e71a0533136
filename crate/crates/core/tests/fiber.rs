use proptest::prelude::*;
use tripet::fiber::{
  self, builtin, bundle_same_map, format_domain_table, load_domain_table, return_domains, s_at_least, symmetry_certify, verify_coefficients, verify_domain_partition, y_bundle,
  BaseInterval, BundleMap, DomainTable, MaximalDomain, ReturnDomainTable, Symmetry,
};
use tripet::pet::{merge_pieces, pieces_same_map};
use tripet::renorm::{build_y, first_return};
use tripet::{build_triple_pet, q, qi, CertError, Rational};

fn domains() -> Vec<MaximalDomain> {
  load_domain_table(builtin::DOMAINS).unwrap().maximal().unwrap().to_vec()
}

fn returns(text: &str) -> ReturnDomainTable {
  match load_domain_table(text).unwrap() {
    DomainTable::Return(t) => t,
    _ => panic!("expected return table"),
  }
}

const SAMPLES: [(i64, i64); 8] = [(8, 13), (13, 21), (16, 25), (7, 10), (13, 17), (17, 21), (3, 4), (5, 9)];

#[test]
fn table_counts() {
  let d = domains();
  assert_eq!(d.len(), 12);
  assert_eq!(d[0].tuple, [qi(0), qi(0), qi(0), qi(0)]);
  assert_eq!(returns(builtin::RETURN_A).entries.len(), 12);
  assert_eq!(returns(builtin::RETURN_Q).entries.len(), 10);
  let (lo, hi) = fiber::symmetry_range();
  assert_eq!(returns(builtin::RETURN_A).entries[0].interval, (lo, hi));
  assert_eq!(load_domain_table(builtin::DOMAINS_VERBATIM).unwrap().len(), 12);
  assert_eq!(load_domain_table(builtin::RETURN_A_VERBATIM).unwrap().len(), 12);
  assert_eq!(load_domain_table(builtin::RETURN_Q_VERBATIM).unwrap().len(), 10);
}

#[test]
fn parse_errors() {
  assert!(matches!(load_domain_table("D 0 over [1/2, 1]\nv 1 2\n"), Err(CertError::Parse { .. })));
  assert!(matches!(load_domain_table("x nonsense\n"), Err(CertError::Parse { .. })));
  let flat = "D 0 over [1/2, 1]\nv 0 0 1\nv 1 0 1\nv 0 1 1\nv 1 1 1\nw 0 0 0 0\n";
  assert!(matches!(load_domain_table(flat), Err(CertError::Validation { .. })));
}

#[test]
fn format_round_trip() {
  for text in [builtin::DOMAINS, builtin::RETURN_A, builtin::RETURN_Q] {
    let t = load_domain_table(text).unwrap();
    assert_eq!(load_domain_table(&format_domain_table(&t)).unwrap(), t);
  }
}

#[test]
fn vertex_forms() {
  for d in domains() {
    for v in &d.vertices {
      assert!([q(1, 2), q(2, 3), qi(1)].contains(&v.s), "D{} s={}", d.index, v.s);
      let den = qi(2) * Rational::from_integer(v.s.denom().clone());
      assert!((&v.x * &den).is_integer() && (&v.y * &den).is_integer(), "D{} {:?}", d.index, v);
    }
  }
  let (lo, hi) = fiber::symmetry_range();
  for t in [returns(builtin::RETURN_A), returns(builtin::RETURN_Q)] {
    for e in &t.entries {
      assert!(e.body.vertices().iter().all(|v| v.s == lo || v.s == hi));
    }
  }
}

#[test]
fn partition_and_its_negatives() {
  let d = domains();
  let (lo, hi) = (q(1, 2), qi(1));
  assert!(verify_domain_partition(&d, &lo, &hi));
  let mut dup = d.clone();
  dup.push(d[3].clone());
  assert!(!verify_domain_partition(&dup, &lo, &hi));
  let mut less = d.clone();
  less.remove(5);
  assert!(!verify_domain_partition(&less, &lo, &hi));
  assert!(d.iter().all(|x| fiber::x_bundle(&lo, &hi).contains(&x.body)));
  assert!(d[1].body.intersection(&d[4].body).is_none());
}

#[test]
fn coefficients_and_perturbation() {
  let d = domains();
  let samples: Vec<Rational> = SAMPLES.iter().map(|&(n, m)| q(n, m)).collect();
  assert!(verify_coefficients(&d, &samples));
  assert!(d[7].body.cross_section(&q(3, 4)).is_none());
  let mut bad = d.clone();
  bad[1].tuple[1] += qi(1);
  assert!(!verify_coefficients(&bad, &[q(8, 13)]));
}

#[test]
fn degenerate_domain_above_two_thirds() {
  let d = domains();
  let upper = d[7].body.clip(&s_at_least(&q(2, 3)));
  assert!(upper.map(|p| p.volume()).unwrap_or_else(|| qi(0)) == qi(0));
  assert!(d[7].body.volume() > qi(0));
}

#[test]
fn verbatim_tables_fail() {
  let v = load_domain_table(builtin::DOMAINS_VERBATIM).unwrap();
  let v = v.maximal().unwrap();
  let samples: Vec<Rational> = SAMPLES.iter().map(|&(n, m)| q(n, m)).collect();
  assert!(!(verify_domain_partition(v, &q(1, 2), &qi(1)) && verify_coefficients(v, &samples)));
  let d = domains();
  for (which, text) in [(Symmetry::RotationAB, builtin::RETURN_A_VERBATIM), (Symmetry::ReflectionPQ, builtin::RETURN_Q_VERBATIM)] {
    let ok = symmetry_certify(which, &returns(text), &d, fiber::DEFAULT_CAP).map(|c| c.verdict()).unwrap_or(false);
    assert!(!ok, "{which:?}");
  }
}

#[test]
fn zeroed_coefficient_row_is_a_mismatch() {
  let mut t = returns(builtin::RETURN_A);
  t.entries[0].coeff = [0, 0, 0, 0];
  let r = symmetry_certify(Symmetry::RotationAB, &t, &domains(), fiber::DEFAULT_CAP);
  assert!(matches!(r, Err(CertError::TableMismatch)));
}

#[test]
fn cap_exceeded_names_a_domain() {
  let r = fiber::base_case_certify(BaseInterval::I0, &domains(), 1);
  assert!(matches!(r, Err(CertError::CapExceeded { .. })));
}

#[test]
fn recomputed_domains_match_table() {
  let (lo, hi) = (q(1, 2), qi(1));
  let rec = fiber::recompute_domains(&lo, &hi).unwrap();
  assert!(bundle_same_map(&rec, &load_domain_table(builtin::DOMAINS).unwrap().pieces()));
}

#[test]
fn return_table_matches_chase() {
  let (lo, hi) = fiber::symmetry_range();
  let f = BundleMap { pieces: load_domain_table(builtin::DOMAINS).unwrap().pieces() }.restrict(&lo, &hi);
  let a = fiber::linear_bundle(&fiber::trapezoid_a_vertices(), &lo, &hi).unwrap();
  let (rd, _) = return_domains(&f, &a, fiber::DEFAULT_CAP).unwrap();
  assert_eq!(rd.len(), 10);
  assert!(bundle_same_map(&rd, &load_domain_table(builtin::RETURN_A).unwrap().pieces()));
}

proptest! {
  #![proptest_config(ProptestConfig::with_cases(6))]

  /// Slicing the 3D first return over I₀ reproduces the 2D first return at s.
  #[test]
  fn chase_slices_match_planar_return(k in 1i64..60) {
    let s = q(1, 2) + q(k, 6 * 61);
    let (lo, hi) = BaseInterval::I0.range();
    let f = BundleMap { pieces: load_domain_table(builtin::DOMAINS).unwrap().pieces() }.restrict(&lo, &hi);
    let y = y_bundle(BaseInterval::I0);
    let (rd, _) = return_domains(&f, &y, fiber::DEFAULT_CAP).unwrap();
    let sliced = BundleMap { pieces: rd }.slice(&s);
    let fs = build_triple_pet(&s).unwrap();
    let planar = first_return(&fs, &build_y(&s).unwrap(), 64).unwrap();
    prop_assert!(pieces_same_map(&sliced, &merge_pieces(planar.piece_maps())));
    prop_assert_eq!(y.cross_section(&s).unwrap(), build_y(&s).unwrap().pieces[0].clone());
  }
}
