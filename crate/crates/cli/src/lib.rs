//! Command-line front end: reads polytope and cone JSON, runs computations
//! and theorem checks, and emits JSON reports.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use ehrhart_core::cones::{self, RationalCone};
use ehrhart_core::corpus::{self, Corpus};
use ehrhart_core::enumerate::{count_dilate, ehrhart, reciprocity_check, EhrhartResult};
use ehrhart_core::polytope::{RationalPolytope, Region};
use ehrhart_core::ratpoly::{parse_rat, HStarData, Rat};
use ehrhart_core::report::{Report, Verdict};
use ehrhart_core::semimagic::adg_report;
use ehrhart_core::structure::{
    ab_check, athanasiadis_check, hibi_check, monotonicity_check, profile, stanley_inequalities,
    stapledon_inequalities,
};
use ehrhart_core::triangulate::{betke_mcmullen, betke_mcmullen_check, h_vector_bound_check, Triangulation};
use ehrhart_core::{Error, Result};

pub const DEFAULT_SEED: u64 = 1729;

/// Environment variable naming the default corpus directory.
pub const CORPUS_ENV: &str = "EHRHART_CORPUS";

/// Evaluation points for the series specialization when none are given.
const DEFAULT_X0: [&str; 3] = ["1/2", "1/3", "-2/5"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Flavor {
    /// Place the vertices only.
    Vertices,
    /// Place every lattice point.
    AllPoints,
}

impl Flavor {
    fn all_points(self) -> bool {
        self == Flavor::AllPoints
    }
}

#[derive(Debug, Parser)]
#[command(name = "ehrhart", version, about = "Exact Ehrhart theory computations and theorem checks")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice points in the dilates nP for n = 0..=max-dilate.
    Count {
        polytope: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_dilate: i64,
        /// Count relative-interior points instead.
        #[arg(long)]
        interior: bool,
    },
    /// Ehrhart (quasi)polynomial and h*.
    Ehrhart { polytope: PathBuf },
    /// h*-vector with degree and codegree.
    Hstar { polytope: PathBuf },
    /// ehr(-n) = (-1)^dim ehr°(n).
    Reciprocity {
        polytope: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_dilate: i64,
    },
    /// σ_K(1/z) = (-1)^dim σ_K°(z) at random rational points.
    ConeReciprocity {
        cone: PathBuf,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Ehrhart series as a specialization of the cone generating function.
    Specialize {
        polytope: PathBuf,
        /// Rational evaluation points, comma separated.
        #[arg(long, value_delimiter = ',')]
        x0: Vec<String>,
        #[arg(long, default_value_t = 8)]
        truncation: usize,
    },
    /// h* from a triangulation via links and box polynomials.
    Decompose {
        polytope: PathBuf,
        #[arg(long, value_enum, default_value_t = Flavor::Vertices)]
        triangulation: Flavor,
    },
    /// Placing triangulation with f- and h-vectors.
    Triangulate {
        polytope: PathBuf,
        #[arg(long, value_enum, default_value_t = Flavor::Vertices)]
        triangulation: Flavor,
    },
    /// Linear inequalities satisfied by h*.
    Inequalities { polytope: PathBuf },
    /// Palindromic h* versus reflexive dilate.
    Hibi { polytope: PathBuf },
    /// The a/b decomposition of h*.
    Ab { polytope: PathBuf },
    /// P ⊆ Q implies h*_P <= h*_Q.
    Monotonic { inner: PathBuf, outer: PathBuf },
    /// Semimagic square counts and their structure.
    Semimagic {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        rmax: u32,
    },
    /// Every applicable check over a corpus directory.
    CorpusVerify {
        /// Corpus directory with polytopes/ and cones/ subdirectories.
        #[arg(long, env = CORPUS_ENV)]
        corpus: Option<PathBuf>,
        /// Additional random lattice polytopes.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
}

/// Exit status and JSON document of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub json: Value,
}

impl Outcome {
    fn from_reports(json: Value, reports: &[&Report]) -> Self {
        let failed = reports.iter().any(|r| r.verdict == Verdict::Fail);
        Outcome {
            exit_code: i32::from(failed),
            json,
        }
    }

    fn ok(json: Value) -> Self {
        Outcome { exit_code: 0, json }
    }

    fn error(e: &Error) -> Self {
        Outcome {
            exit_code: 1,
            json: json!({ "error": e.to_string() }),
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(&self.json).expect("serializable") + "\n"
    }
}

/// Default corpus location: the environment variable, else `corpus/` at the workspace root.
pub fn default_corpus_dir() -> PathBuf {
    std::env::var_os(CORPUS_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"))
}

pub fn run(config: &RunConfig) -> Outcome {
    match dispatch(&config.command) {
        Ok(o) => o,
        Err(e) => Outcome::error(&e),
    }
}

fn hstar_json(h: &HStarData) -> Value {
    match h.integer_coeffs() {
        Some(c) => json!(c
            .iter()
            .map(|x| x.to_string().parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::from(x.to_string())))
            .collect::<Vec<_>>()),
        None => json!(h.coeffs.iter().map(Rat::to_string).collect::<Vec<_>>()),
    }
}

fn ehrhart_json(e: &EhrhartResult) -> Value {
    let constituents: Vec<String> = e.quasi.constituents().iter().map(|c| c.format_with("n")).collect();
    let interior: Vec<String> = e
        .quasi_interior
        .constituents()
        .iter()
        .map(|c| c.format_with("n"))
        .collect();
    let mut v = json!({
        "name": e.name,
        "dim": e.dim,
        "period": e.period,
        "minimal_period": e.minimal_period(),
        "constituents": constituents,
        "interior_constituents": interior,
        "hstar": hstar_json(&e.hstar),
    });
    if e.period == 1 {
        v["poly"] = json!(constituents[0]);
    }
    v
}

fn polytope_checks(p: &RationalPolytope, trials_x0: &[Rat]) -> Result<Vec<Report>> {
    let e = ehrhart(p)?;
    let mut reports = vec![reciprocity_check(p, &e, 5, 5)?];
    for x0 in trials_x0 {
        reports.push(cones::specialization_check(p, x0, 6)?);
    }
    if !p.is_lattice() {
        return Ok(reports);
    }
    for flavor in [Flavor::Vertices, Flavor::AllPoints] {
        let t = Triangulation::placing(p, flavor.all_points())?;
        reports.push(betke_mcmullen_check(p, &t)?);
        reports.push(h_vector_bound_check(p, &t)?);
    }
    let pr = profile(&e.hstar)?;
    reports.push(stanley_inequalities(&pr, p.name()));
    reports.push(stapledon_inequalities(&pr, p.name()));
    reports.push(ab_check(&pr, p.name()).1);
    reports.push(hibi_check(p)?);
    reports.push(athanasiadis_check(p)?);
    Ok(reports)
}

fn cone_checks(k: &RationalCone, trials: usize, seed: u64) -> Result<Vec<Report>> {
    Ok(vec![
        cones::stanley_reciprocity_check(k, trials, seed)?,
        cones::partition_check(k, 4)?,
    ])
}

fn default_x0() -> Vec<Rat> {
    DEFAULT_X0.iter().map(|s| parse_rat(s).expect("valid default")).collect()
}

fn corpus_verify(dir: &Path, random: usize, seed: u64, trials: usize) -> Result<Outcome> {
    let Corpus { mut polytopes, cones } = corpus::load_corpus(dir)?;
    polytopes.extend(corpus::random_polytopes(random, seed));
    let x0 = default_x0();
    let poly_results: Vec<(String, Result<Vec<Report>>)> = polytopes
        .par_iter()
        .map(|p| (p.name().to_string(), polytope_checks(p, &x0)))
        .collect();
    let cone_results: Vec<(String, Result<Vec<Report>>)> = cones
        .par_iter()
        .map(|c| (c.name.clone(), cone_checks(&c.cone, trials, seed)))
        .collect();
    let (mut pass, mut fail, mut hyp) = (0usize, 0usize, 0usize);
    let mut entries = Vec::new();
    for (kind, (name, res)) in poly_results
        .into_iter()
        .map(|r| ("polytope", r))
        .chain(cone_results.into_iter().map(|r| ("cone", r)))
    {
        match res {
            Ok(reports) => {
                for r in &reports {
                    match r.verdict {
                        Verdict::Pass => pass += 1,
                        Verdict::Fail => fail += 1,
                        Verdict::HypothesisNotMet => hyp += 1,
                    }
                }
                entries.push(json!({"kind": kind, "name": name, "reports": reports}));
            }
            Err(e) => {
                fail += 1;
                entries.push(json!({"kind": kind, "name": name, "error": e.to_string()}));
            }
        }
    }
    let verdict = if fail > 0 { "fail" } else { "pass" };
    Ok(Outcome {
        exit_code: i32::from(fail > 0),
        json: json!({
            "seed": seed,
            "random_polytopes": random,
            "entries": entries,
            "summary": {"pass": pass, "fail": fail, "hypothesis-not-met": hyp},
            "verdict": verdict,
        }),
    })
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    let load = |p: &PathBuf| corpus::read_polytope(p);
    match cmd {
        Command::Count {
            polytope,
            max_dilate,
            interior,
        } => {
            let p = load(polytope)?;
            let region = if *interior {
                Region::RelativeInterior
            } else {
                Region::Closed
            };
            let counts = (0..=*max_dilate)
                .map(|n| count_dilate(&p, n, region))
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome::ok(json!({"name": p.name(), "region": region, "counts": counts})))
        }
        Command::Ehrhart { polytope } => Ok(Outcome::ok(ehrhart_json(&ehrhart(&load(polytope)?)?))),
        Command::Hstar { polytope } => {
            let e = ehrhart(&load(polytope)?)?;
            Ok(Outcome::ok(json!({
                "name": e.name,
                "dim": e.dim,
                "period": e.period,
                "hstar": hstar_json(&e.hstar),
                "degree": e.hstar.degree,
                "codegree": e.hstar.codegree,
            })))
        }
        Command::Reciprocity { polytope, max_dilate } => {
            let p = load(polytope)?;
            let r = reciprocity_check(&p, &ehrhart(&p)?, *max_dilate, *max_dilate)?;
            Ok(Outcome::from_reports(json!(r), &[&r]))
        }
        Command::ConeReciprocity { cone, trials, seed } => {
            let k = corpus::read_cone(cone)?;
            let r = cones::stanley_reciprocity_check(&k, *trials, *seed)?;
            Ok(Outcome::from_reports(json!(r), &[&r]))
        }
        Command::Specialize {
            polytope,
            x0,
            truncation,
        } => {
            let p = load(polytope)?;
            let points = if x0.is_empty() {
                default_x0()
            } else {
                x0.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?
            };
            let reports = points
                .iter()
                .map(|x| cones::specialization_check(&p, x, *truncation))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&Report> = reports.iter().collect();
            Ok(Outcome::from_reports(json!({"reports": reports}), &refs))
        }
        Command::Decompose {
            polytope,
            triangulation,
        } => {
            let p = load(polytope)?;
            let t = Triangulation::placing(&p, triangulation.all_points())?;
            let bm = betke_mcmullen(&t)?;
            let check = betke_mcmullen_check(&p, &t)?;
            let bound = h_vector_bound_check(&p, &t)?;
            Ok(Outcome::from_reports(
                json!({
                    "name": p.name(),
                    "triangulation": t.to_file(),
                    "unimodular": t.is_unimodular(),
                    "hstar": hstar_json(&bm),
                    "reports": [&check, &bound],
                }),
                &[&check, &bound],
            ))
        }
        Command::Triangulate {
            polytope,
            triangulation,
        } => {
            let p = load(polytope)?;
            let t = Triangulation::placing(&p, triangulation.all_points())?;
            let file = t.to_file();
            Ok(Outcome::ok(json!({
                "name": p.name(),
                "points": file.points,
                "cells": file.cells,
                "f_vector": t.f_vector(),
                "h_vector": t.h_polynomial(),
                "unimodular": t.is_unimodular(),
                "normalized_volume": t.normalized_volume().to_string(),
            })))
        }
        Command::Inequalities { polytope } => {
            let p = load(polytope)?;
            let pr = profile(&ehrhart(&p)?.hstar)?;
            let reports = vec![
                stanley_inequalities(&pr, p.name()),
                stapledon_inequalities(&pr, p.name()),
                athanasiadis_check(&p)?,
            ];
            let refs: Vec<&Report> = reports.iter().collect();
            Ok(Outcome::from_reports(json!({"profile": pr, "reports": reports}), &refs))
        }
        Command::Hibi { polytope } => {
            let r = hibi_check(&load(polytope)?)?;
            Ok(Outcome::from_reports(json!(r), &[&r]))
        }
        Command::Ab { polytope } => {
            let p = load(polytope)?;
            let pr = profile(&ehrhart(&p)?.hstar)?;
            let (ab, r) = ab_check(&pr, p.name());
            Ok(Outcome::from_reports(json!({"profile": pr, "decomposition": ab, "report": r}), &[&r]))
        }
        Command::Monotonic { inner, outer } => {
            let r = monotonicity_check(&load(inner)?, &load(outer)?)?;
            Ok(Outcome::from_reports(json!(r), &[&r]))
        }
        Command::Semimagic { n, rmax } => {
            let (table, r) = adg_report(*n, *rmax)?;
            Ok(Outcome::from_reports(json!({"table": table, "report": r}), &[&r]))
        }
        Command::CorpusVerify {
            corpus,
            random,
            seed,
            trials,
        } => {
            let dir = corpus.clone().unwrap_or_else(default_corpus_dir);
            corpus_verify(&dir, *random, *seed, *trials)
        }
    }
}

/// Parses arguments, runs, and writes the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return i32::from(e.use_stderr());
        }
    };
    let outcome = run(&config);
    let text = outcome.render();
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{text}"),
    }
    outcome.exit_code
}
