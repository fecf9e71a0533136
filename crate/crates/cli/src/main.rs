mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use render::{svg, Shape};
use tripet::fiber::{self, builtin, BaseInterval, DomainTable, Symmetry};
use tripet::pet::periodic_tiles;
use tripet::renorm::{default_cap, polygon_strings, verify_conjugacy};
use tripet::{build_triple_pet, limitset, CertError, Golden, PiecewiseTranslation, Rational, Scalar};

#[derive(Parser)]
#[command(name = "tripet", version, about = "Triple lattice PET toolkit")]
struct Cli {
  #[command(subcommand)]
  cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
  Svg,
  Json,
}

#[derive(clap::Args)]
struct Output {
  /// Write to this file instead of stdout.
  #[arg(long)]
  out: Option<PathBuf>,
  #[arg(long, value_enum, default_value = "json")]
  format: Format,
}

#[derive(Subcommand)]
enum Cmd {
  /// The partitions 𝒜_s (domain cells) and ℬ_s (image cells).
  Partition {
    #[arg(long)]
    param: String,
    #[command(flatten)]
    output: Output,
  },
  /// Periodic tiles up to a period bound.
  Tiles {
    #[arg(long)]
    param: String,
    #[arg(long, default_value_t = 20)]
    max_period: usize,
    #[command(flatten)]
    output: Output,
  },
  /// Conjugacy of the first return to Y_s with f at R(s).
  Renorm {
    #[arg(long)]
    param: Option<String>,
    /// Parameter given positionally.
    value: Option<String>,
    #[arg(long)]
    cap: Option<usize>,
    #[command(flatten)]
    output: Output,
  },
  /// Interval certificates over fiber bundles.
  Certify {
    #[command(subcommand)]
    what: Certify,
  },
  /// Recompute a table from scratch and print it in the data-file format.
  Tables {
    #[arg(value_parser = ["domains", "return-a", "return-q"])]
    which: String,
    #[arg(long, default_value_t = fiber::DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
  },
  /// Limit-set chain C_n at s = φ.
  Limitset {
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[command(flatten)]
    output: Output,
  },
  /// Hausdorff dimension of the limit set.
  Dimension {
    /// JSON report instead of the bare decimal.
    #[arg(long, value_enum)]
    format: Option<Format>,
  },
}

#[derive(Subcommand)]
enum Certify {
  /// Base-case checks on I0, I1 or I2.
  BaseCase {
    #[arg(value_parser = ["I0", "I1", "I2"])]
    interval: String,
    /// Maximal-domain table; defaults to the bundled corrected table.
    data_file: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = fiber::DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
  },
  /// Symmetry checks on [8/13, 13/21].
  Symmetry {
    #[arg(value_parser = ["rotationAB", "reflectionAC", "reflectionPQ"])]
    which: String,
    /// Return-domain table; defaults to the bundled corrected table.
    data_file: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Maximal-domain table used for F.
    #[arg(long)]
    domains: Option<PathBuf>,
    #[arg(long, default_value_t = fiber::DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
  },
}

enum Param {
  Rational(Rational),
  Phi,
}

fn parse_param(t: &str) -> Result<Param> {
  if t.trim() == "phi" {
    return Ok(Param::Phi);
  }
  let r = Rational::parse(t).map_err(|e| anyhow!("bad parameter {t:?}: {e}"))?;
  Ok(Param::Rational(r))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
  match out {
    Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
    None => {
      print!("{text}");
      Ok(())
    }
  }
}

fn emit_json(out: Option<&Path>, v: &impl Serialize) -> Result<()> {
  emit(out, &(serde_json::to_string_pretty(v)? + "\n"))
}

fn read_table(path: Option<&Path>, fallback: &str) -> Result<DomainTable> {
  let text = match path {
    Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
    None => fallback.to_string(),
  };
  Ok(fiber::load_domain_table(&text)?)
}

fn piece_json<S: Scalar>(f: &PiecewiseTranslation<S>) -> Value {
  let cells: Vec<Value> = f
    .pieces
    .iter()
    .map(|p| json!({ "polygon": polygon_strings(&p.cell), "shift": [p.shift.dx.to_string(), p.shift.dy.to_string()] }))
    .collect();
  let images: Vec<Value> = f.pieces.iter().map(|p| json!({ "polygon": polygon_strings(&p.image()) })).collect();
  json!({ "parameter": f.parameter.to_string(), "cells": cells, "images": images })
}

fn partition<S: Scalar>(s: &S, o: &Output) -> Result<bool> {
  let f = build_triple_pet(s)?;
  let j = piece_json(&f);
  match o.format {
    Format::Json => emit_json(o.out.as_deref(), &j)?,
    Format::Svg => {
      let a: Vec<Shape> = f.pieces.iter().enumerate().map(|(i, p)| Shape::from_polygon(&p.cell, i)).collect();
      let b: Vec<Shape> = f.pieces.iter().enumerate().map(|(i, p)| Shape::from_polygon(&p.image(), i)).collect();
      emit(o.out.as_deref(), &svg(&[a, b]))?;
      if let Some(p) = &o.out {
        emit_json(Some(&p.with_extension("json")), &j)?;
      }
    }
  }
  Ok(true)
}

fn tiles<S: Scalar>(s: &S, max_period: usize, o: &Output) -> Result<bool> {
  let f = build_triple_pet(s)?;
  let t = periodic_tiles(&f, max_period);
  match o.format {
    Format::Json => {
      let tiles: Vec<Value> = t.iter().map(|t| json!({ "polygon": polygon_strings(&t.cell), "period": t.period, "coding": t.coding })).collect();
      emit_json(o.out.as_deref(), &json!({ "parameter": s.to_string(), "max_period": max_period, "tiles": tiles }))?;
    }
    Format::Svg => {
      let mut shapes: Vec<Shape> = vec![Shape::outline(&f.ambient, 9)];
      shapes.extend(t.iter().map(|t| Shape::from_polygon(&t.cell, t.period)));
      emit(o.out.as_deref(), &svg(&[shapes]))?;
    }
  }
  Ok(true)
}

fn renorm<S: Scalar>(s: &S, cap: Option<usize>, o: &Output) -> Result<bool> {
  let cap = match cap {
    Some(c) => c,
    None => default_cap(s)?,
  };
  let r = verify_conjugacy(s, cap)?;
  if o.format == Format::Svg {
    bail!("renorm emits JSON only");
  }
  emit_json(o.out.as_deref(), &r)?;
  Ok(r.verdict)
}

fn limitset_cmd(depth: usize, o: &Output) -> Result<bool> {
  let mut levels = Vec::new();
  for n in 0..=depth {
    levels.push(limitset::chain(n)?);
  }
  let last = levels.last().unwrap();
  match o.format {
    Format::Json => {
      let area = last.trapezoids.iter().fold(Golden::zero(), |a, t| a + t.polygon.area());
      let traps: Vec<Value> = last
        .trapezoids
        .iter()
        .map(|t| json!({ "label": String::from_utf8_lossy(&t.label), "polygon": polygon_strings(&t.polygon) }))
        .collect();
      emit_json(o.out.as_deref(), &json!({ "depth": depth, "count": traps.len(), "area": area.to_string(), "trapezoids": traps }))?;
    }
    Format::Svg => {
      let mut shapes = Vec::new();
      for (d, c) in levels.iter().enumerate() {
        shapes.extend(c.trapezoids.iter().map(|t| Shape::from_polygon(&t.polygon, d)));
      }
      for t in limitset::complement_triangles() {
        shapes.push(Shape::outline(&t, 2));
      }
      emit(o.out.as_deref(), &svg(&[shapes]))?;
    }
  }
  Ok(true)
}

fn certify(what: &Certify) -> Result<bool> {
  match what {
    Certify::BaseCase { interval, data_file, data, cap, out } => {
      let iv = BaseInterval::parse(interval).ok_or_else(|| anyhow!("unknown interval {interval}"))?;
      let table = read_table(data.as_deref().or(data_file.as_deref()), builtin::DOMAINS)?;
      let domains = table.maximal().ok_or_else(|| anyhow!("expected a maximal-domain table"))?;
      let c = fiber::base_case_certify(iv, domains, *cap)?;
      emit_json(out.as_deref(), &c)?;
      Ok(c.verdict())
    }
    Certify::Symmetry { which, data_file, data, domains, cap, out } => {
      let w = Symmetry::parse(which).ok_or_else(|| anyhow!("unknown symmetry {which}"))?;
      let fallback = if w == Symmetry::ReflectionPQ { builtin::RETURN_Q } else { builtin::RETURN_A };
      let DomainTable::Return(table) = read_table(data.as_deref().or(data_file.as_deref()), fallback)? else {
        bail!("expected a return-domain table");
      };
      let d = read_table(domains.as_deref(), builtin::DOMAINS)?;
      let d = d.maximal().ok_or_else(|| anyhow!("expected a maximal-domain table"))?;
      match fiber::symmetry_certify(w, &table, d, *cap) {
        Ok(c) => {
          emit_json(out.as_deref(), &c)?;
          Ok(c.verdict())
        }
        Err(CertError::TableMismatch) => {
          emit_json(out.as_deref(), &json!({ "which": which, "table_matches": false }))?;
          Ok(false)
        }
        Err(e) => Err(e.into()),
      }
    }
  }
}

fn tables(which: &str, cap: usize, out: Option<&Path>) -> Result<bool> {
  let builtin_domains = fiber::load_domain_table(builtin::DOMAINS)?;
  let reference = builtin_domains.maximal().unwrap();
  let (lo, hi) = fiber::symmetry_range();
  let table = match which {
    "domains" => {
      let (a, b) = (Rational::parse("1/2")?, Rational::one());
      let rec = fiber::recompute_domains(&a, &b)?;
      DomainTable::Maximal(fiber::pieces_to_maximal(&rec, &a, &b, Some(reference)))
    }
    _ => {
      let f = fiber::BundleMap { pieces: builtin_domains.pieces() }.restrict(&lo, &hi);
      let (region, fallback) = if which == "return-a" {
        (fiber::linear_bundle(&fiber::trapezoid_a_vertices(), &lo, &hi)?, builtin::RETURN_A)
      } else {
        (fiber::linear_bundle(&fiber::region_p_vertices(), &lo, &hi)?.map(&fiber::nu_map().0)?, builtin::RETURN_Q)
      };
      let (rd, _) = fiber::return_domains(&f, &region, cap)?;
      let DomainTable::Return(refr) = fiber::load_domain_table(fallback)? else { unreachable!() };
      DomainTable::Return(fiber::pieces_to_return(&rd, &lo, &hi, Some(&refr)).ok_or_else(|| anyhow!("return domains not expressible as rows"))?)
    }
  };
  emit(out, &fiber::format_domain_table(&table))?;
  Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
  match &cli.cmd {
    Cmd::Partition { param, output } => match parse_param(param)? {
      Param::Rational(s) => partition(&s, output),
      Param::Phi => partition(&Golden::gen(), output),
    },
    Cmd::Tiles { param, max_period, output } => match parse_param(param)? {
      Param::Rational(s) => tiles(&s, *max_period, output),
      Param::Phi => tiles(&Golden::gen(), *max_period, output),
    },
    Cmd::Renorm { param, value, cap, output } => {
      let t = param.as_ref().or(value.as_ref()).ok_or_else(|| anyhow!("missing parameter"))?;
      match parse_param(t)? {
        Param::Rational(s) => renorm(&s, *cap, output),
        Param::Phi => renorm(&Golden::gen(), *cap, output),
      }
    }
    Cmd::Certify { what } => certify(what),
    Cmd::Tables { which, cap, out } => tables(which, *cap, out.as_deref()),
    Cmd::Limitset { depth, output } => limitset_cmd(*depth, output),
    Cmd::Dimension { format } => {
      let d = limitset::hausdorff_dimension();
      match format {
        None => println!("{}", d.value),
        Some(Format::Json) => emit_json(None, &d)?,
        Some(Format::Svg) => bail!("dimension emits text or JSON"),
      }
      Ok(true)
    }
  }
}

fn main() -> ExitCode {
  let cli = match Cli::try_parse() {
    Ok(c) => c,
    Err(e) => {
      let _ = e.print();
      return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
    }
  };
  match run(cli) {
    Ok(true) => ExitCode::from(0),
    Ok(false) => ExitCode::from(1),
    Err(e) => {
      eprintln!("error: {e:#}");
      ExitCode::from(2)
    }
  }
}
