//! Command-line interface: parse polynomial expressions over a chosen
//! coefficient field, dispatch to the library computations, and render text
//! or JSON reports. The `examples` subcommand reruns a fixed regression
//! table of known singularities and checks every value exactly.

mod examples;
mod render;

use clap::{Parser, Subcommand};
use milnor_core::branch::{construct_q, BranchData};
use milnor_core::expr::parse_poly;
use milnor_core::fibration::smoothing_verdict;
use milnor_core::field::make_field;
use milnor_core::invariants::{invariant_report, is_mu_stable, mu_unit_multiple};
use milnor_core::series::Prec;
use milnor_core::{Error, FieldCtx, TruncSeries};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use render::{extnat_json, extnat_text, stability_json, stability_text};
use serde_json::json;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "milnor",
    version,
    about = "Exact invariants of hypersurface and plane-curve singularities in arbitrary characteristic"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Field characteristic (0 for the rationals)
    #[arg(long = "char", global = true, default_value_t = 0)]
    characteristic: u64,
    /// Extension degree over the prime field
    #[arg(long, global = true, default_value_t = 1)]
    ext: usize,
    /// Series truncation degree
    #[arg(long, global = true, default_value_t = 64)]
    prec: u32,
    /// Parametrization precision in t (default: adaptive)
    #[arg(long, global = true)]
    tprec: Option<usize>,
    /// Randomized-estimator trials
    #[arg(long, global = true, default_value_t = 6)]
    trials: u32,
    /// RNG seed; fixed seed gives byte-identical output
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Stability search bound for the exponent l
    #[arg(long, global = true, default_value_t = 6)]
    lmax: u32,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Milnor/Tjurina numbers, e_0(T(f)), isolatedness, mu-stability
    Invariants {
        expr: String,
        /// Also compute mu(u*f) for this unit (nonzero constant term)
        #[arg(long)]
        unit: Option<String>,
    },
    /// Rerun the built-in regression table of known singularities
    Examples {
        /// Only rows whose id contains this string
        #[arg(long)]
        only: Option<String>,
        /// Append a row with a deliberately wrong expectation
        #[arg(long, hide = true)]
        self_test_fail: bool,
    },
    /// Semigroup of values of a plane branch
    Semigroup { expr: String },
    /// Intersection multiplicity I(f, g); g may be f_X or f_Y
    Intersect { f: String, g: String },
    /// mu-stability verdict
    Stability { expr: String },
    /// Certified jacobian-ideal element of value s + c(f) - 1
    Qpoly {
        expr: String,
        #[arg(long)]
        s: u64,
    },
    /// Local-smoothing verdict with critical-curve witness
    Fibration { expr: String },
}

enum CliError {
    /// Bad expression or usage: exit code 2.
    Parse(String),
    /// Domain failure inside a computation: exit code 1.
    Domain(String),
    /// The examples table had a failing row: exit code 1.
    ExamplesFailed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Domain(e.to_string())
    }
}

struct Config {
    ctx: FieldCtx,
    characteristic: u64,
    ext: usize,
    prec: u32,
    tprec: Option<usize>,
    trials: u32,
    seed: u64,
    lmax: u32,
    json: bool,
}

impl Config {
    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn json_value(&self) -> serde_json::Value {
        json!({
            "char": self.characteristic,
            "ext": self.ext,
            "prec": self.prec,
            "tprec": self.tprec,
            "trials": self.trials,
            "seed": self.seed,
            "lmax": self.lmax,
        })
    }
}

fn parse_input(src: &str, ctx: &FieldCtx) -> Result<TruncSeries, CliError> {
    parse_poly(src, ctx, 2).map_err(|e| CliError::Parse(format!("{src}: {e}")))
}

fn emit(cfg: &Config, input: serde_json::Value, results: serde_json::Value, text: String) {
    if cfg.json {
        let doc = json!({
            "schema_version": 1,
            "config": cfg.json_value(),
            "input": input,
            "results": results,
        });
        println!("{doc}");
    } else {
        print!("{text}");
    }
}

fn cmd_invariants(cfg: &Config, expr: &str, unit: Option<&str>) -> Result<(), CliError> {
    let f = parse_input(expr, &cfg.ctx)?;
    let mut rng = cfg.rng();
    let rep = invariant_report(&f, cfg.trials, cfg.lmax, &mut rng)?;
    let mu_unit = match unit {
        Some(u) => {
            let us = parse_input(u, &cfg.ctx)?;
            Some((u.to_string(), mu_unit_multiple(&f, &us)?))
        }
        None => None,
    };
    let mut results = json!({
        "mu": extnat_json(&rep.mu),
        "tau": extnat_json(&rep.tau),
        "tilde_mu": extnat_json(&rep.tilde_mu),
        "isolated": rep.isolated,
        "in_jacobian_closure": rep.in_closure_numeric,
        "stability": stability_json(&rep.stability),
        "quasihomogeneous_degree": rep.euler.as_ref().map(|e| e.degree),
    });
    let mut text = format!(
        "mu        = {}\ntau       = {}\ntilde_mu  = {}\nisolated  = {}\nin J(f)~  = {}\nstability = {}\n",
        extnat_text(&rep.mu),
        extnat_text(&rep.tau),
        extnat_text(&rep.tilde_mu),
        rep.isolated,
        rep.in_closure_numeric,
        stability_text(&rep.stability),
    );
    if let Some(e) = &rep.euler {
        text.push_str(&format!(
            "quasihomogeneous of degree {} (weights {:?})\n",
            e.degree, e.weights
        ));
    }
    if let Some((usrc, m)) = mu_unit {
        results["mu_unit_multiple"] = json!({ "unit": usrc, "mu": extnat_json(&m) });
        text.push_str(&format!("mu(({usrc})*f) = {}\n", extnat_text(&m)));
    }
    emit(cfg, json!({ "f": expr }), results, text);
    Ok(())
}

fn cmd_semigroup(cfg: &Config, expr: &str) -> Result<(), CliError> {
    let f = parse_input(expr, &cfg.ctx)?;
    let bd = BranchData::analyze(&f, cfg.tprec)?;
    let s = bd.semigroup();
    let p = cfg.ctx.characteristic();
    let results = json!({
        "generators": s.generators(),
        "multiplicity": s.multiplicity(),
        "conductor": s.conductor(),
        "genus": s.genus(),
        "apery": s.apery_set(),
        "tame": s.is_tame(p),
        "symmetric": s.is_symmetric(),
        "strongly_increasing": s.is_strongly_increasing(),
        "swapped_axes": bd.swapped(),
    });
    let text = format!(
        "generators          = {:?}\nmultiplicity        = {}\nconductor           = {}\ngenus               = {}\ntame                = {}\nsymmetric           = {}\nstrongly_increasing = {}\n",
        s.generators(),
        s.multiplicity(),
        s.conductor(),
        s.genus(),
        s.is_tame(p),
        s.is_symmetric(),
        s.is_strongly_increasing(),
    );
    emit(cfg, json!({ "f": expr }), results, text);
    Ok(())
}

fn cmd_intersect(cfg: &Config, fsrc: &str, gsrc: &str) -> Result<(), CliError> {
    let f = parse_input(fsrc, &cfg.ctx)?;
    let g = match gsrc {
        "f_X" => f.partial(0),
        "f_Y" => f.partial(1),
        _ => parse_input(gsrc, &cfg.ctx)?,
    };
    let bd = BranchData::analyze(&f, cfg.tprec)?;
    let i = bd.intersection(&g);
    let results = json!({ "intersection": extnat_json(&i) });
    let text = format!("I(f, g) = {}\n", extnat_text(&i));
    emit(cfg, json!({ "f": fsrc, "g": gsrc }), results, text);
    Ok(())
}

fn cmd_stability(cfg: &Config, expr: &str) -> Result<(), CliError> {
    let f = parse_input(expr, &cfg.ctx)?;
    let mut rng = cfg.rng();
    let v = is_mu_stable(&f, cfg.lmax, cfg.trials, &mut rng)?;
    let results = json!({ "stability": stability_json(&v) });
    let text = format!("stability = {}\n", stability_text(&v));
    emit(cfg, json!({ "f": expr }), results, text);
    Ok(())
}

fn cmd_qpoly(cfg: &Config, expr: &str, s: u64) -> Result<(), CliError> {
    let f = parse_input(expr, &cfg.ctx)?;
    let bd = BranchData::analyze(&f, cfg.tprec)?;
    let q = construct_q(&bd, s)?;
    let rendered = q.q.to_series(Prec::Trunc(q.q.x_prec() as u32)).to_string();
    let results = json!({
        "s": q.s,
        "q": rendered,
        "value": extnat_json(&q.value),
        "degree_ok": q.degree_ok,
        "value_ok": q.value_ok,
        "in_jacobian": q.in_jacobian,
    });
    let text = format!(
        "s           = {}\nq           = {}\nI(f, q)     = {}   (expected s + c - 1 = {})\ndegree_ok   = {}\nvalue_ok    = {}\nin_jacobian = {}\n",
        q.s,
        rendered,
        extnat_text(&q.value),
        q.s + bd.conductor() - 1,
        q.degree_ok,
        q.value_ok,
        q.in_jacobian,
    );
    emit(cfg, json!({ "f": expr }), results, text);
    Ok(())
}

fn cmd_fibration(cfg: &Config, expr: &str) -> Result<(), CliError> {
    let f = parse_input(expr, &cfg.ctx)?;
    let mut rng = cfg.rng();
    let rep = smoothing_verdict(&f, cfg.tprec.unwrap_or(64), &mut rng)?;
    let verdict = match rep.verdict {
        milnor_core::fibration::Verdict::Smoothing => "smoothing",
        milnor_core::fibration::Verdict::NotSmoothing => "not_smoothing",
    };
    let samples: Vec<serde_json::Value> = rep
        .samples
        .iter()
        .map(|sp| {
            json!({
                "point": sp.point.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "s": sp.s.to_string(),
            })
        })
        .collect();
    let results = json!({
        "verdict": verdict,
        "mu": extnat_json(&rep.mu),
        "witness_factor": rep.witness_factor.as_ref().map(|w| w.to_string()),
        "samples": samples,
    });
    let mut text = format!("verdict = {verdict}\nmu      = {}\n", extnat_text(&rep.mu));
    if let Some(w) = &rep.witness_factor {
        text.push_str(&format!("witness common factor of partials: {w}\n"));
    }
    for sp in &rep.samples {
        let pt: Vec<String> = sp.point.iter().map(|c| c.to_string()).collect();
        text.push_str(&format!(
            "singular fiber point ({}) on fiber s = {}\n",
            pt.join(", "),
            sp.s
        ));
    }
    emit(cfg, json!({ "f": expr }), results, text);
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut seed_rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let ctx = make_field(cli.characteristic, cli.ext.max(1), &mut seed_rng)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let cfg = Config {
        ctx,
        characteristic: cli.characteristic,
        ext: cli.ext,
        prec: cli.prec,
        tprec: cli.tprec,
        trials: cli.trials,
        seed: cli.seed,
        lmax: cli.lmax,
        json: cli.json,
    };
    match &cli.cmd {
        Cmd::Invariants { expr, unit } => cmd_invariants(&cfg, expr, unit.as_deref()),
        Cmd::Examples {
            only,
            self_test_fail,
        } => examples::cmd_examples(&cfg, only.as_deref(), *self_test_fail),
        Cmd::Semigroup { expr } => cmd_semigroup(&cfg, expr),
        Cmd::Intersect { f, g } => cmd_intersect(&cfg, f, g),
        Cmd::Stability { expr } => cmd_stability(&cfg, expr),
        Cmd::Qpoly { expr, s } => cmd_qpoly(&cfg, expr, *s),
        Cmd::Fibration { expr } => cmd_fibration(&cfg, expr),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::ExamplesFailed) => ExitCode::from(1),
    }
}
