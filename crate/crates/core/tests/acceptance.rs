//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use rayon::prelude::*;
use tripet::fiber::{self, builtin, BaseInterval, DomainTable, MaximalDomain, Symmetry};
use tripet::limitset::{self, area_ratio, chain, chain_area, complement_is_two_triangles, hausdorff_dimension, open_set_condition, residual_below, substitute, MarkedTrapezoid};
use tripet::pet::{f_at, periodic_tiles, pieces_same_map};
use tripet::renorm::{default_cap, renorm_r, verify_conjugacy};
use tripet::{build_triple_pet, q, Golden, Location, PieceMap, Point2, Rational, Scalar, TripleLattice};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
  if ok {
    Ok(detail)
  } else {
    Err(detail)
  }
}

fn domains() -> Vec<MaximalDomain> {
  fiber::load_domain_table(builtin::DOMAINS).unwrap().maximal().unwrap().to_vec()
}

fn renormalization_values() -> Outcome {
  let cases = [((5, 23), (5, 8)), ((8, 13), (5, 8)), ((5, 18), (5, 8)), ((18, 23), (5, 8)), ((16, 25), (9, 16)), ((7, 10), (3, 4))];
  let bad: Vec<String> = cases
    .iter()
    .filter_map(|&((a, b), (c, d))| {
      let r = renorm_r(&q(a, b)).unwrap();
      (r != q(c, d)).then(|| format!("R({a}/{b}) = {r}"))
    })
    .collect();
  check(bad.is_empty(), if bad.is_empty() { "6 exact values".into() } else { bad.join(", ") })
}

fn table_slices(d: &[MaximalDomain], s: &Rational) -> Vec<PieceMap<Rational>> {
  d.iter().filter_map(|e| e.body.cross_section(s).map(|cell| PieceMap { cell, shift: e.shift().eval(s) })).collect()
}

fn cross_sections() -> Outcome {
  let d = domains();
  let verbatim = fiber::load_domain_table(builtin::DOMAINS_VERBATIM).unwrap();
  let verbatim = verbatim.maximal().unwrap();
  let mut notes = Vec::new();
  let mut ok = true;
  for (n, m) in [(8, 13), (13, 21), (16, 25), (7, 10), (13, 17), (17, 21)] {
    let s = q(n, m);
    let f = build_triple_pet(&s).unwrap();
    let slices = table_slices(&d, &s);
    let same = pieces_same_map(&slices, &f.pieces);
    ok &= same;
    let vb = pieces_same_map(&table_slices(verbatim, &s), &f.pieces);
    notes.push(format!("{s}: {} slices{}{}", slices.len(), if same { "" } else { " MISMATCH" }, if vb { "" } else { " (as-printed table differs)" }));
  }
  check(ok, notes.join("; "))
}

fn base_case() -> Outcome {
  let d = domains();
  let mut notes = Vec::new();
  let mut ok = true;
  for iv in [BaseInterval::I0, BaseInterval::I1, BaseInterval::I2] {
    match fiber::base_case_certify(iv, &d, fiber::DEFAULT_CAP) {
      Ok(c) => {
        ok &= c.verdict() && c.volume_y == c.volume_images;
        notes.push(format!("{iv:?}: verdict {} vol {} = {}", c.verdict(), c.volume_y, c.volume_images));
      }
      Err(e) => {
        ok = false;
        notes.push(format!("{iv:?}: {e}"));
      }
    }
  }
  check(ok, notes.join("; "))
}

fn conjugacy() -> Outcome {
  let params = [(8, 13), (16, 25), (7, 10), (17, 21), (5, 18), (18, 23), (21, 79), (7, 24)];
  let results: Vec<(String, bool)> = params
    .par_iter()
    .map(|&(n, m)| {
      let s = q(n, m);
      let r = default_cap(&s).and_then(|cap| verify_conjugacy(&s, cap));
      match r {
        Ok(r) => (format!("{s}->{}", r.target), r.verdict),
        Err(e) => (format!("{s}: {e}"), false),
      }
    })
    .collect();
  let ok = results.iter().all(|r| r.1);
  check(ok, results.iter().map(|r| format!("{}{}", r.0, if r.1 { "" } else { " FALSE" })).collect::<Vec<_>>().join(", "))
}

fn symmetry() -> Outcome {
  let d = domains();
  let mut notes = Vec::new();
  let mut ok = true;
  for (w, text) in [(Symmetry::RotationAB, builtin::RETURN_A), (Symmetry::ReflectionAC, builtin::RETURN_A), (Symmetry::ReflectionPQ, builtin::RETURN_Q)] {
    let DomainTable::Return(t) = fiber::load_domain_table(text).unwrap() else { unreachable!() };
    match fiber::symmetry_certify(w, &t, &d, fiber::DEFAULT_CAP) {
      Ok(c) => {
        ok &= c.verdict();
        notes.push(format!("{w:?}: {} ({} return domains, max time {})", c.verdict(), c.return_domains, c.max_time));
      }
      Err(e) => {
        ok = false;
        notes.push(format!("{w:?}: {e}"));
      }
    }
  }
  check(ok, notes.join("; "))
}

fn hp_dimension() -> BigFloat {
  let p = 256;
  let rm = RoundingMode::ToEven;
  let mut cc = Consts::new().unwrap();
  // √2 − 1 and (√5 − 1)/2 from fixed 60-digit decimals.
  let x = BigFloat::parse("0.414213562373095048801688724209698078569671875376948073176680", Radix::Dec, p, rm, &mut cc);
  let f = BigFloat::parse("0.618033988749894848204586834365638117720309179805762862135449", Radix::Dec, p, rm, &mut cc);
  x.ln(p, rm, &mut cc).div(&f.ln(p, rm, &mut cc), p, rm)
}

fn dimension() -> Outcome {
  let d = hausdorff_dimension();
  let rm = RoundingMode::ToEven;
  let mut cc = Consts::new().unwrap();
  let ours = BigFloat::parse(&d.value, Radix::Dec, 256, rm, &mut cc);
  let diff = ours.sub(&hp_dimension(), 256, rm).abs();
  let tol = BigFloat::parse("1e-12", Radix::Dec, 256, rm, &mut cc);
  let oracle = diff.cmp(&tol).is_some_and(|c| c < 0);
  let printed = (d.approx - 1.83147).abs() < 1e-4;
  let resid = residual_below(30);
  check(
    oracle && printed && resid,
    format!(
      "d = {:.12}; high-precision oracle {}; |d - 1.83147| = {:.3e} {} 1e-4; residual < 1e-30 {}",
      d.approx,
      if oracle { "agrees" } else { "DISAGREES" },
      (d.approx - 1.83147).abs(),
      if printed { "<" } else { ">=" },
      resid
    ),
  )
}

fn chain_laws() -> Outcome {
  let r = area_ratio();
  let area = |c: &[MarkedTrapezoid<Golden>]| c.par_iter().map(|t| t.polygon.area()).reduce(Golden::zero, |a, b| a + b);
  let mut level = chain(0).unwrap().trapezoids;
  let mut ok = level.len() == 3 && area(&level) == chain_area(0).unwrap();
  for n in 1..=limitset::MAX_CHAIN_DEPTH {
    let next: Vec<MarkedTrapezoid<Golden>> = level.par_iter().flat_map_iter(|t| substitute(t)).collect();
    ok &= next.len() == 3usize.pow(n as u32 + 1);
    ok &= area(&next) == area(&level) * r.clone();
    level = next;
  }
  ok &= chain(2).unwrap().trapezoids.len() == 27 && chain_area(2).unwrap() == chain_area(0).unwrap() * r.clone() * r.clone();
  let osc = open_set_condition();
  let comp = complement_is_two_triangles();
  check(ok && osc && comp, format!("counts and area ratio {r} through depth 9: {ok}; open set {osc}; complement {comp}"))
}

fn oracle_tiles() -> Outcome {
  let s = q(3, 5);
  let f = build_triple_pet(&s).unwrap();
  let lat = TripleLattice::new(&s).unwrap();
  let tiles = periodic_tiles(&f, 20);
  let (lo, hi) = f.ambient.bbox();
  let k = 40i64;
  let kq = Rational::from_integer(k.into());
  let (nx, ny) = (Scalar::ceil(&((&hi.x - &lo.x) * &kq)), Scalar::ceil(&((&hi.y - &lo.y) * &kq)));
  let (nx, ny): (i64, i64) = (nx.try_into().unwrap(), ny.try_into().unwrap());
  let found: Vec<(Vec<usize>, Point2<Rational>)> = (0..nx)
    .into_par_iter()
    .flat_map_iter(|i| {
      let f = &f;
      let lat = &lat;
      let lo = &lo;
      (0..ny).filter_map(move |j| {
        let p = Point2::new(&lo.x + q(3 * i + 1, 3 * k), &lo.y + q(7 * j + 1, 7 * k));
        if f.ambient.locate(&p) != Location::Interior {
          return None;
        }
        let mut cur = p.clone();
        let mut word = Vec::new();
        for _ in 0..20 {
          word.push(f.locate_piece(&cur).ok()?);
          cur = f_at(lat, &cur).ok()?;
          if cur == p {
            return Some((word, p));
          }
        }
        None
      })
    })
    .collect();
  let mut groups: BTreeMap<Vec<usize>, Vec<Point2<Rational>>> = BTreeMap::new();
  for (w, p) in found {
    groups.entry(w).or_default().push(p);
  }
  let oracle: BTreeSet<(Vec<usize>, usize)> = groups.keys().map(|w| (w.clone(), w.len())).collect();
  let ours: BTreeSet<(Vec<usize>, usize)> = tiles.iter().map(|t| (t.coding.clone(), t.period)).collect();
  let mut inside = true;
  for t in &tiles {
    if let Some(pts) = groups.get(&t.coding) {
      inside &= pts.iter().all(|p| t.cell.locate(p) == Location::Interior);
    }
  }
  check(
    oracle == ours && inside,
    format!("{} tiles, {} oracle classes, {} sampled grid points in tiles; sets equal {}", ours.len(), oracle.len(), groups.values().map(|v| v.len()).sum::<usize>(), oracle == ours),
  )
}

fn main() {
  let criteria: [(&str, fn() -> Outcome); 8] = [
    ("renormalization map values", renormalization_values),
    ("cross-section ground truth", cross_sections),
    ("base-case certification", base_case),
    ("per-parameter conjugacy", conjugacy),
    ("symmetry checks", symmetry),
    ("Hausdorff dimension", dimension),
    ("limit-set chain laws", chain_laws),
    ("oracle equivalence of periodic tiles", oracle_tiles),
  ];
  let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
  let mut failed = 0;
  for (i, (name, run)) in criteria.iter().enumerate() {
    if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
      continue;
    }
    let t0 = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>().map(String::as_str).or(e.downcast_ref::<&str>().copied()))));
    let secs = t0.elapsed().as_secs_f64();
    match out {
      Ok(d) => println!("criterion {} PASS  {name} ({secs:.1}s): {d}", i + 1),
      Err(d) => {
        failed += 1;
        println!("criterion {} FAIL  {name} ({secs:.1}s): {d}", i + 1);
      }
    }
  }
  if failed > 0 {
    println!("{failed} acceptance criteria failed");
    std::process::exit(1);
  }
}
