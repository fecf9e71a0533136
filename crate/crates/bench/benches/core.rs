use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tripet::fiber::{self, builtin, BaseInterval};
use tripet::pet::periodic_tiles;
use tripet::renorm::verify_conjugacy;
use tripet::{build_triple_pet, limitset, q, Golden};

fn pet(c: &mut Criterion) {
  c.bench_function("build_triple_pet 8/13", |b| b.iter(|| build_triple_pet(black_box(&q(8, 13))).unwrap()));
  c.bench_function("build_triple_pet phi", |b| b.iter(|| build_triple_pet(black_box(&Golden::gen())).unwrap()));
  let f = build_triple_pet(&q(3, 5)).unwrap();
  c.bench_function("periodic_tiles 3/5 p<=12", |b| b.iter(|| periodic_tiles(black_box(&f), 12)));
}

fn renorm(c: &mut Criterion) {
  let mut g = c.benchmark_group("renorm");
  g.sample_size(10);
  g.bench_function("verify_conjugacy 8/13", |b| b.iter(|| verify_conjugacy(black_box(&q(8, 13)), 64).unwrap()));
  g.finish();
}

fn certify(c: &mut Criterion) {
  let table = fiber::load_domain_table(builtin::DOMAINS).unwrap();
  let d = table.maximal().unwrap();
  let mut g = c.benchmark_group("certify");
  g.sample_size(10);
  g.bench_function("base_case I0", |b| b.iter(|| fiber::base_case_certify(BaseInterval::I0, d, 64).unwrap()));
  g.finish();
}

fn limit(c: &mut Criterion) {
  c.bench_function("chain 5", |b| b.iter(|| limitset::chain(black_box(5)).unwrap()));
}

criterion_group!(benches, pet, renorm, certify, limit);
criterion_main!(benches);
