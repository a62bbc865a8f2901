//! Command-line front end. Exit status: 0 success or passing verdict,
//! 1 failing verdict, 2 usage or input error, 3 numerical failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{self, Cell, ClosedFormFamily, Constants};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::geometry::SpaceParams;
use crate::io::{read_profile_file, write_profile, write_profile_file};
use crate::profile::{MuStats, Profile};
use crate::residuals::{verify, ResidualReport, Verdict};
use crate::solver::{
    classify_endpoint, integrate, shoot, EndpointClass, FreeParam, IntegrateOptions, IvpState, OutputGrid,
    RadialCompleteness, ShootTarget, ShootingProblem, Side,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "warp-einstein", version, about = "Warped-product (λ, n+m)-Einstein numerics")]
pub struct Cli {
    /// TOML run configuration; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report format (default toml; `catalog --list` defaults to a text table).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Report destination instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Toml,
    Json,
    Text,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Take λ and k from a catalog family (with `--n`, `--m`, `--const`).
    #[arg(long)]
    pub family: Option<String>,
    /// Family constants, e.g. `c=2,kbar=-1`.
    #[arg(long = "const", allow_hyphen_values = true)]
    pub constants: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InitialArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub u0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub du0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub f0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub df0: Option<f64>,
    /// `f''` at a critical starting point (`u0 = 0`).
    #[arg(long, allow_negative_numbers = true)]
    pub ddf0: Option<f64>,
    /// Integration interval `a,b`; `inf` allowed.
    #[arg(long, allow_hyphen_values = true)]
    pub t_span: Option<String>,
    #[arg(long)]
    pub ode_tol: Option<f64>,
    #[arg(long)]
    pub event_tol: Option<f64>,
    /// Output nodes of the integrated profile.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Continue through zeros of `f`.
    #[arg(long)]
    pub cross_boundary: bool,
    /// Where to write the integrated profile.
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a profile against the reduced equations.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Integrate an initial-value problem.
    Solve {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        initial: InitialArgs,
    },
    /// Find one free initial datum reaching a target endpoint.
    Shoot {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        initial: InitialArgs,
        #[arg(long, value_enum)]
        target: Option<TargetArg>,
        #[arg(long, value_enum)]
        free: Option<FreeArg>,
        /// `a,b`
        #[arg(long, allow_hyphen_values = true)]
        bracket: Option<String>,
        /// +1 or -1.
        #[arg(long, allow_negative_numbers = true)]
        direction: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// List or sample closed-form families.
    Catalog {
        #[arg(long, conflicts_with = "emit")]
        list: bool,
        /// Family to sample.
        #[arg(long)]
        emit: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        /// `a,b,N`; defaults to 201 nodes strictly inside the domain.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long = "const", allow_hyphen_values = true)]
        constants: Option<String>,
        /// Profile destination (standard output when absent).
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Classify both ends of a profile.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Verify catalog families over many dimensions in parallel.
    Sweep {
        /// Comma-separated family names (default all).
        #[arg(long)]
        families: Option<String>,
        /// Comma-separated values of n.
        #[arg(long, default_value = "3,4,5")]
        n: String,
        /// Comma-separated values of m.
        #[arg(long, default_value = "2,3")]
        m: String,
        #[arg(long, default_value_t = 501)]
        nodes: usize,
        #[arg(long)]
        tol: Option<f64>,
        /// Directory receiving one profile per run.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Boundary,
    CriticalMin,
    CriticalMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FreeArg {
    U0,
    Du0,
    F0,
    Df0,
    Ddf0,
}

#[derive(Debug, Clone, Serialize)]
pub struct EndpointsReport {
    pub left: EndpointClass,
    pub right: EndpointClass,
    pub completeness: RadialCompleteness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completeness_case: Option<u8>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShootReport {
    pub target: String,
    pub free_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ddf0: Option<f64>,
    pub iterations: usize,
    pub mismatch: f64,
    pub initial: IvpState,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySummary {
    pub name: String,
    pub lambda_sign: String,
    pub mu_sign: String,
    pub tabulated_metric: String,
    pub tabulated_potential: String,
    pub resolved_warping: String,
    pub resolved_potential: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub n: u32,
    pub m: u32,
    pub verdict: Verdict,
    pub r_second_norm: f64,
    pub r_compat_norm: f64,
    pub r_first_norm: f64,
    pub mu_spread: f64,
    pub mu_expected: f64,
    pub mu_mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
}

/// Machine-readable result of one command.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<SpaceParams>,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<MuStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoints: Option<EndpointsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shooting: Option<ShootReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<ClosedFormFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<Cell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<FamilySummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<Vec<SweepRow>>,
}

impl Report {
    fn new(command: &str) -> Self {
        Report { command: command.to_string(), ..Default::default() }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string())),
            Format::Toml | Format::Text => toml::to_string(self).map_err(|e| Error::Io(e.to_string())),
        }
    }
}

fn parse_list(s: &str, expect: usize, what: &str) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    let v = v.map_err(|_| Error::Parse(format!("{what}: `{s}` is not a comma-separated list of numbers")))?;
    if v.len() != expect {
        return Err(Error::Parse(format!("{what}: expected {expect} values, got {}", v.len())));
    }
    Ok(v)
}

fn parse_constants(s: Option<&str>, base: Constants) -> Result<Constants> {
    let mut c = base;
    let Some(s) = s else { return Ok(c) };
    for item in s.split(',').filter(|x| !x.trim().is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("constant `{item}` is not key=value")))?;
        let v: f64 = value.trim().parse().map_err(|_| Error::Parse(format!("constant `{item}`: bad number")))?;
        match key.trim().to_ascii_lowercase().as_str() {
            "c" | "a" => c.c = Some(v),
            "kbar" => c.kbar = Some(v),
            "k" => c.k = Some(v),
            other => return Err(Error::Parse(format!("unknown constant `{other}`"))),
        }
    }
    Ok(c)
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let v = parse_list(s, 3, "grid")?;
    let n = v[2];
    if !(n >= 2.0 && n.fract() == 0.0) || !(v[1] > v[0]) {
        return Err(Error::InvalidParams(format!("grid `{s}` needs a < b and an integer N >= 2")));
    }
    let n = n as usize;
    Ok((0..n).map(|i| v[0] + (v[1] - v[0]) * i as f64 / (n - 1) as f64).collect())
}

fn need<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParams(format!("missing {what}")))
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParams(format!("{what} must be positive")))
    }
}

struct Ctx {
    cfg: RunConfig,
    format: Option<Format>,
    output: Option<PathBuf>,
}

impl Ctx {
    fn params(&self, a: &ParamArgs) -> Result<(SpaceParams, Option<ClosedFormFamily>)> {
        let p = &self.cfg.params;
        let family = a.family.clone().or_else(|| self.cfg.catalog.family.clone());
        let n = need(a.n.or(p.n), "--n")?;
        let m = need(a.m.or(p.m), "--m")?;
        if let Some(name) = family {
            let constants = parse_constants(a.constants.as_deref(), self.cfg.catalog.constants)?;
            let fam = catalog::instantiate(&name, n, m, &constants)?;
            let mut params = fam.params;
            if let Some(l) = a.lambda {
                params.lambda = l;
            }
            if let Some(k) = a.k {
                params.k = k;
            }
            return Ok((params, Some(fam)));
        }
        let lambda = need(a.lambda.or(p.lambda), "--lambda")?;
        let k = need(a.k.or(p.k), "--k")?;
        Ok((SpaceParams::new(n, m, lambda, k)?, None))
    }

    fn input(&self, flag: &Option<PathBuf>) -> Result<PathBuf> {
        need(flag.clone().or_else(|| self.cfg.input.clone()), "--input")
    }

    fn emit(&self, report: &Report, out: &mut dyn Write, default: Format) -> Result<()> {
        let text = report.render(self.format.unwrap_or(default))?;
        match self.output.as_ref().or(self.cfg.output.as_ref()) {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
            None => out.write_all(text.as_bytes()).map_err(Error::from),
        }
    }

    fn initial(&self, a: &InitialArgs) -> Result<(IvpState, (f64, f64), IntegrateOptions)> {
        let c = &self.cfg.initial;
        let t0 = a.t0.or(c.t0).unwrap_or(0.0);
        let state = IvpState::new(
            t0,
            need(a.u0.or(c.u0), "--u0")?,
            need(a.du0.or(c.du0), "--du0")?,
            need(a.f0.or(c.f0), "--f0")?,
            need(a.df0.or(c.df0), "--df0")?,
        );
        let span = match (&a.t_span, c.t_span) {
            (Some(s), _) => {
                let v = parse_list(s, 2, "t-span")?;
                (v[0], v[1])
            }
            (None, Some([lo, hi])) => (lo, hi),
            (None, None) => (f64::NEG_INFINITY, f64::INFINITY),
        };
        let tol = &self.cfg.tolerances;
        let mut opts = IntegrateOptions {
            ddf0: a.ddf0.or(c.ddf0),
            cross_boundary: a.cross_boundary || c.cross_boundary.unwrap_or(false),
            grid: OutputGrid::Uniform(a.nodes.or(self.cfg.grid.nodes).unwrap_or(201)),
            ..Default::default()
        };
        if let Some(v) = a.ode_tol.or(tol.ode_tol) {
            opts.tol = positive(v, "ode tolerance")?;
        }
        if let Some(v) = a.event_tol.or(tol.event_tol) {
            opts.event_tol = positive(v, "event tolerance")?;
        }
        if let Some(v) = tol.classify_tol {
            opts.classify_tol = positive(v, "classify tolerance")?;
        }
        if matches!(opts.grid, OutputGrid::Uniform(n) if n < 2) {
            return Err(Error::InvalidParams("nodes must be at least 2".into()));
        }
        Ok((state, span, opts))
    }

    fn profile_out(&self, flag: &Option<PathBuf>) -> Option<PathBuf> {
        flag.clone().or_else(|| self.cfg.profile_out.clone())
    }
}

fn endpoints(profile: &Profile) -> EndpointsReport {
    let completeness = profile.radial_completeness();
    EndpointsReport {
        left: profile.left_end.clone(),
        right: profile.right_end.clone(),
        completeness,
        completeness_case: completeness.case(),
    }
}

fn write_profile_to(path: Option<&Path>, profile: &Profile, out: &mut dyn Write) -> Result<Option<String>> {
    match path {
        Some(p) => {
            write_profile_file(p, profile)?;
            Ok(Some(p.display().to_string()))
        }
        None => {
            write_profile(&mut *out, profile)?;
            Ok(None)
        }
    }
}

fn cmd_verify(ctx: &Ctx, params: &ParamArgs, input: &Option<PathBuf>, tol: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let (p, family) = ctx.params(params)?;
    let tol = positive(tol.or(ctx.cfg.tolerances.verify_tol).unwrap_or(1e-9), "verify tolerance")?;
    let path = ctx.input(input)?;
    let profile = read_profile_file(&path, p)?;
    let residuals = verify(&profile, tol)?;
    let mut r = Report::new("verify");
    r.params = Some(p);
    r.tolerances.insert("verify_tol".into(), tol);
    r.profile = Some(path.display().to_string());
    r.nodes = Some(profile.len());
    r.mu = profile.mu_stats().ok();
    r.family = family;
    let code = if residuals.verdict == Verdict::Pass { EXIT_OK } else { EXIT_FAIL };
    r.residuals = Some(residuals);
    ctx.emit(&r, out, Format::Toml)?;
    Ok(code)
}

fn cmd_solve(ctx: &Ctx, params: &ParamArgs, initial: &InitialArgs, out: &mut dyn Write) -> Result<i32> {
    let (p, _) = ctx.params(params)?;
    let (state, span, opts) = ctx.initial(initial)?;
    let profile = integrate(&state, &p, span, &opts)?;
    let mut r = Report::new("solve");
    r.params = Some(p);
    r.tolerances.insert("ode_tol".into(), opts.tol);
    r.tolerances.insert("event_tol".into(), opts.event_tol);
    r.tolerances.insert("verify_tol".into(), 100.0 * opts.tol);
    r.nodes = Some(profile.len());
    r.mu = profile.mu_stats().ok();
    r.residuals = verify(&profile, 100.0 * opts.tol).ok();
    r.endpoints = Some(endpoints(&profile));
    if let Some(path) = ctx.profile_out(&initial.profile_out) {
        write_profile_file(&path, &profile)?;
        r.profile = Some(path.display().to_string());
    }
    ctx.emit(&r, out, Format::Toml)?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_shoot(
    ctx: &Ctx,
    params: &ParamArgs,
    initial: &InitialArgs,
    target: Option<TargetArg>,
    free: Option<FreeArg>,
    bracket: &Option<String>,
    direction: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    out: &mut dyn Write,
) -> Result<i32> {
    let (p, _) = ctx.params(params)?;
    let sc = &ctx.cfg.shoot;
    let target = match target {
        Some(TargetArg::Boundary) => ShootTarget::Boundary,
        Some(TargetArg::CriticalMin) => ShootTarget::CriticalMin,
        Some(TargetArg::CriticalMax) => ShootTarget::CriticalMax,
        None => match sc.target.as_deref() {
            Some("boundary") => ShootTarget::Boundary,
            Some("critical-min") => ShootTarget::CriticalMin,
            Some("critical-max") => ShootTarget::CriticalMax,
            Some(other) => return Err(Error::InvalidParams(format!("unknown target `{other}`"))),
            None => return Err(Error::InvalidParams("missing --target".into())),
        },
    };
    let free = match free {
        Some(FreeArg::U0) => FreeParam::U0,
        Some(FreeArg::Du0) => FreeParam::Du0,
        Some(FreeArg::F0) => FreeParam::F0,
        Some(FreeArg::Df0) => FreeParam::Df0,
        Some(FreeArg::Ddf0) => FreeParam::Ddf0,
        None => match sc.free.as_deref() {
            Some("u0") => FreeParam::U0,
            Some("du0") => FreeParam::Du0,
            Some("f0") => FreeParam::F0,
            Some("df0") => FreeParam::Df0,
            Some("ddf0") => FreeParam::Ddf0,
            Some(other) => return Err(Error::InvalidParams(format!("unknown free parameter `{other}`"))),
            None => return Err(Error::InvalidParams("missing --free".into())),
        },
    };
    let bracket = match (bracket, sc.bracket) {
        (Some(s), _) => {
            let v = parse_list(s, 2, "bracket")?;
            (v[0], v[1])
        }
        (None, Some([a, b])) => (a, b),
        (None, None) => return Err(Error::InvalidParams("missing --bracket".into())),
    };
    // The free component needs no value on the command line.
    let mut init = initial.clone();
    let slot = match free {
        FreeParam::U0 => &mut init.u0,
        FreeParam::Du0 => &mut init.du0,
        FreeParam::F0 => &mut init.f0,
        FreeParam::Df0 => &mut init.df0,
        FreeParam::Ddf0 => &mut init.ddf0,
    };
    slot.get_or_insert(bracket.0);
    let (state, _, options) = ctx.initial(&init)?;
    let direction = direction.or(sc.direction).unwrap_or(1.0);
    if direction != 1.0 && direction != -1.0 {
        return Err(Error::InvalidParams("direction must be 1 or -1".into()));
    }
    let tol = positive(tol.or(sc.tol).unwrap_or(1e-10), "shooting tolerance")?;
    let problem = ShootingProblem {
        params: p,
        target,
        free,
        fixed: state,
        bracket,
        direction,
        tol,
        max_iter: max_iter.or(sc.max_iter).unwrap_or(60),
        options,
    };
    let res = shoot(&problem)?;
    let mut r = Report::new("shoot");
    r.params = Some(p);
    r.tolerances.insert("shoot_tol".into(), tol);
    r.tolerances.insert("ode_tol".into(), problem.options.tol);
    r.nodes = Some(res.profile.len());
    r.mu = res.profile.mu_stats().ok();
    r.endpoints = Some(endpoints(&res.profile));
    r.shooting = Some(ShootReport {
        target: res.endpoint.kind.as_str().to_string(),
        free_value: res.free_value,
        ddf0: res.ddf0,
        iterations: res.iterations,
        mismatch: res.mismatch,
        initial: res.initial,
    });
    if let Some(path) = ctx.profile_out(&initial.profile_out) {
        write_profile_file(&path, &res.profile)?;
        r.profile = Some(path.display().to_string());
    }
    ctx.emit(&r, out, Format::Toml)?;
    Ok(EXIT_OK)
}

fn list_text(cells: &[Cell], families: &[FamilySummary]) -> String {
    let mut s = String::new();
    s.push_str(&format!("{:<8} {:<22} {:<22} {:<22}\n", "", "lambda > 0", "lambda = 0", "lambda < 0"));
    for (row, label) in ["mu > 0", "mu = 0", "mu < 0"].iter().enumerate() {
        s.push_str(&format!("{label:<8}"));
        for c in &cells[3 * row..3 * row + 3] {
            s.push_str(&format!(" {:<22}", c.family.as_deref().unwrap_or("None")));
        }
        s.push('\n');
    }
    s.push('\n');
    for f in families {
        s.push_str(&format!(
            "{:<20} lambda {} mu {}  {} ; {}\n",
            f.name, f.lambda_sign, f.mu_sign, f.resolved_warping, f.resolved_potential
        ));
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn cmd_catalog(
    ctx: &Ctx,
    list: bool,
    emit: &Option<String>,
    n: Option<u32>,
    m: Option<u32>,
    grid: &Option<String>,
    constants: &Option<String>,
    profile_out: &Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<i32> {
    let name = emit.clone().or_else(|| ctx.cfg.catalog.family.clone());
    if list || name.is_none() {
        let cells = catalog::cells();
        let families: Vec<FamilySummary> = catalog::FAMILY_NAMES
            .iter()
            .map(|name| {
                let kind = catalog::FamilyKind::from_name(name)?;
                let fam = catalog::instantiate(name, 3, 2, &Constants::default())?;
                let (l, mu) = kind.cell();
                Ok(FamilySummary {
                    name: name.to_string(),
                    lambda_sign: l.symbol().into(),
                    mu_sign: mu.symbol().into(),
                    tabulated_metric: fam.tabulated.metric,
                    tabulated_potential: fam.tabulated.potential,
                    resolved_warping: fam.resolved.metric,
                    resolved_potential: fam.resolved.potential,
                })
            })
            .collect::<Result<_>>()?;
        if ctx.format.unwrap_or(Format::Text) == Format::Text {
            out.write_all(list_text(&cells, &families).as_bytes())?;
        } else {
            let mut r = Report::new("catalog");
            r.cells = Some(cells);
            r.families = Some(families);
            ctx.emit(&r, out, Format::Toml)?;
        }
        return Ok(EXIT_OK);
    }
    let name = name.unwrap_or_default();
    let n = need(n.or(ctx.cfg.params.n), "--n")?;
    let m = need(m.or(ctx.cfg.params.m), "--m")?;
    let constants = parse_constants(constants.as_deref(), ctx.cfg.catalog.constants)?;
    let fam = catalog::instantiate(&name, n, m, &constants)?;
    let g = &ctx.cfg.grid;
    let nodes = match grid {
        Some(s) => parse_grid(s)?,
        None => match (g.t_min, g.t_max, g.nodes) {
            (Some(a), Some(b), Some(k)) => parse_grid(&format!("{a},{b},{k}"))?,
            _ => fam.interior_grid(g.nodes.unwrap_or(201)),
        },
    };
    let profile = fam.sample(&nodes)?;
    let path = ctx.profile_out(profile_out);
    let written = write_profile_to(path.as_deref(), &profile, out)?;
    if written.is_some() || ctx.output.is_some() || ctx.cfg.output.is_some() {
        let mut r = Report::new("catalog");
        r.params = Some(fam.params);
        r.profile = written;
        r.nodes = Some(profile.len());
        r.mu = profile.mu_stats().ok();
        r.endpoints = Some(endpoints(&profile));
        r.family = Some(fam);
        ctx.emit(&r, out, Format::Toml)?;
    }
    Ok(EXIT_OK)
}

fn cmd_classify(ctx: &Ctx, params: &ParamArgs, input: &Option<PathBuf>, tol: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let (p, _) = ctx.params(params)?;
    let tol = positive(tol.or(ctx.cfg.tolerances.classify_tol).unwrap_or(1e-6), "classify tolerance")?;
    let path = ctx.input(input)?;
    let mut profile = read_profile_file(&path, p)?;
    profile.left_end = classify_endpoint(&profile, Side::Left, tol)?;
    profile.right_end = classify_endpoint(&profile, Side::Right, tol)?;
    let mut r = Report::new("classify");
    r.params = Some(p);
    r.tolerances.insert("classify_tol".into(), tol);
    r.profile = Some(path.display().to_string());
    r.nodes = Some(profile.len());
    r.mu = profile.mu_stats().ok();
    r.endpoints = Some(endpoints(&profile));
    ctx.emit(&r, out, Format::Toml)?;
    Ok(EXIT_OK)
}

fn parse_u32s(s: &str, what: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| Error::Parse(format!("{what}: `{s}` is not a list of integers"))))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    ctx: &Ctx,
    families: &Option<String>,
    ns: &str,
    ms: &str,
    nodes: usize,
    tol: Option<f64>,
    output_dir: &Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<i32> {
    let names: Vec<String> = match families {
        Some(s) => s.split(',').map(|x| x.trim().to_string()).collect(),
        None => catalog::FAMILY_NAMES.iter().map(|s| s.to_string()).collect(),
    };
    let tol = positive(tol.or(ctx.cfg.tolerances.verify_tol).unwrap_or(1e-9), "verify tolerance")?;
    if nodes < 2 {
        return Err(Error::InvalidParams("nodes must be at least 2".into()));
    }
    let mut jobs = Vec::new();
    for name in &names {
        catalog::FamilyKind::from_name(name)?;
        for &n in &parse_u32s(ns, "--n")? {
            for &m in &parse_u32s(ms, "--m")? {
                jobs.push((name.clone(), n, m));
            }
        }
    }
    if let Some(dir) = output_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|(name, n, m)| -> Result<SweepRow> {
            let fam = catalog::instantiate(name, *n, *m, &Constants::default())?;
            let profile = fam.sample(&fam.interior_grid(nodes))?;
            let rep = verify(&profile, tol)?;
            let mu = profile.mu_stats()?;
            let path = match output_dir {
                Some(dir) => {
                    let p = dir.join(format!("{name}-n{n}-m{m}.csv"));
                    write_profile_file(&p, &profile)?;
                    Some(p.display().to_string())
                }
                None => None,
            };
            Ok(SweepRow {
                family: name.clone(),
                n: *n,
                m: *m,
                verdict: rep.verdict,
                r_second_norm: rep.r_second_norm,
                r_compat_norm: rep.r_compat_norm,
                r_first_norm: rep.r_first_norm,
                mu_spread: mu.spread(),
                mu_expected: fam.expected_mu,
                mu_mean: mu.mean,
                profile: path,
            })
        })
        .collect::<Result<_>>()?;
    let all_pass = rows.iter().all(|r| r.verdict == Verdict::Pass);
    let mut r = Report::new("sweep");
    r.tolerances.insert("verify_tol".into(), tol);
    r.nodes = Some(nodes);
    r.runs = Some(rows);
    ctx.emit(&r, out, Format::Toml)?;
    Ok(if all_pass { EXIT_OK } else { EXIT_FAIL })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx { cfg, format: cli.format, output: cli.output };
    match &cli.command {
        Command::Verify { params, input, tol } => cmd_verify(&ctx, params, input, *tol, out),
        Command::Solve { params, initial } => cmd_solve(&ctx, params, initial, out),
        Command::Shoot { params, initial, target, free, bracket, direction, tol, max_iter } => {
            cmd_shoot(&ctx, params, initial, *target, *free, bracket, *direction, *tol, *max_iter, out)
        }
        Command::Catalog { list, emit, n, m, grid, constants, profile_out } => {
            cmd_catalog(&ctx, *list, emit, *n, *m, grid, constants, profile_out, out)
        }
        Command::Classify { params, input, tol } => cmd_classify(&ctx, params, input, *tol, out),
        Command::Sweep { families, n, m, nodes, tol, output_dir } => {
            cmd_sweep(&ctx, families, n, m, *nodes, *tol, output_dir, out)
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
