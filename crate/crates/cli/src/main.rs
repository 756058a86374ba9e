//! `spcluster`: ground states, constants, configurations, reduced-energy
//! maximizers, residual checks and quadrature oracles from the command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or violated
//! precondition, 3 numerical failure (no convergence, unresolved tail, no
//! interior maximum).

mod cache;
mod config;
mod emit;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use spcluster::ansatz_residual::{residual_bound_check, MultiPeakAnsatz, ResidualKernel};
use spcluster::ground_state::ProfileShape;
use spcluster::oracle_quadrature::{
    h_two_peak, pair_coulomb_energy_with, schrodinger_energy_two_peak, two_peak_interaction_with,
};
use spcluster::radial_poisson::RadialDensity;
use spcluster::reduced_energy::{geometric_list, sweep_csv, ReducedModel};
use spcluster::{fmt_sig, log_inv_eps2, PeakConfiguration, PolytopeKind};

use crate::cache::{load_or_solve, Loaded};
use crate::config::RunConfig;
use crate::emit::{csv_row, deliver, to_json};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] spcluster::Error),
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) | CliError::Validation(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "spcluster", version, about = "Cluster states of the semiclassical Schrödinger–Poisson equation")]
struct Cli {
    /// RunConfig JSON file; flags given here override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Space dimension N.
    #[arg(long = "dim", global = true)]
    dimension: Option<usize>,
    /// Exponent p of f(t) = |t|^{p-1} t.
    #[arg(long = "power", global = true)]
    exponent: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Profile cache directory (also SPCLUSTER_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Base directory for relative --output paths.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Disable data-parallel evaluation.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve (or load) the ground state and print its key numbers.
    GroundState,
    /// Print every interaction constant.
    Constants {
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build a configuration and emit it.
    Config {
        #[arg(value_enum)]
        family: FamilyName,
        #[command(flatten)]
        params: FamilyArgs,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the reduced functional at one radius.
    Reduce {
        #[command(flatten)]
        family: FamilyFlag,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Maximize the reduced functional over the admissible range, or the
    /// model function α_{ε,C} with --alpha-c.
    Maximize {
        #[command(flatten)]
        family: FamilyFlag,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        alpha_c: Option<f64>,
    },
    /// Maximizers over a geometric ε list start:end:count.
    Sweep {
        #[command(flatten)]
        family: FamilyFlag,
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum, default_value_t = Emit::Csv)]
        emit: Emit,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Residual brackets of the multi-peak ansatz on the standard sample set.
    Residual {
        #[command(flatten)]
        family: FamilyFlag,
        #[arg(long)]
        eps: f64,
        /// Cluster radius; defaults to the maximizer r_ε.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Two-peak quadrature oracle as a convergence table.
    Oracle {
        #[arg(value_enum)]
        name: OracleName,
        /// Comma-separated separations.
        #[arg(long, value_delimiter = ',', required = true)]
        d_list: Vec<f64>,
        /// Signs of the two peaks, e.g. "+-".
        #[arg(long, default_value = "++")]
        signs: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// SVG figures.
    Plot {
        #[arg(value_enum)]
        figure: PlotKind,
        #[command(flatten)]
        family: FamilyFlag,
        /// ε for the α plot, or start:end:count for the convergence plot.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Emit {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FamilyName {
    Polygon,
    Polytope,
    Nested,
    Rings,
    Raw,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OracleName {
    /// ∫ f(w₁) w₂, limit 2γ₀ w(d).
    Interaction,
    /// H for two signed peaks, limit 0 relative to w(d).
    H,
    /// Pair Coulomb energy, limit (∫w²)² d^{2-N}.
    Coulomb,
    /// Two-peak Schrödinger energy, limit 2I - 2λ₁λ₂γ₀ w(d).
    Energy,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum PlotKind {
    Profile,
    Alpha,
    Convergence,
    Config,
}

#[derive(Args, Debug, Clone, Default)]
struct FamilyArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    m1: Option<usize>,
    #[arg(long)]
    m2: Option<usize>,
    /// Polytope kind: simplex, hypercube, cross, dodecahedron, icosahedron, 600-cell.
    #[arg(long)]
    kind: Option<PolytopeKind>,
    /// Dimension of the polytope's span.
    #[arg(long)]
    h: Option<usize>,
    /// JSON file {"points": [[..]], "signs": [..]} for the raw family.
    #[arg(long)]
    points: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct FamilyFlag {
    #[arg(long, value_enum, default_value_t = FamilyName::Polygon)]
    family: FamilyName,
    #[command(flatten)]
    params: FamilyArgs,
}

fn need(v: Option<usize>, family: &str, flag: &str) -> Result<usize, CliError> {
    v.ok_or_else(|| CliError::Validation(format!("{family} needs --{flag}")))
}

fn build_configuration(name: FamilyName, a: &FamilyArgs, dimension: usize) -> Result<PeakConfiguration, CliError> {
    Ok(match name {
        FamilyName::Polygon => PeakConfiguration::polygon(need(a.k, "polygon", "k")?, dimension)?,
        FamilyName::Polytope => {
            let kind = a
                .kind
                .ok_or_else(|| CliError::Validation("polytope needs --kind".into()))?;
            let h = a.h.unwrap_or(match kind {
                PolytopeKind::Dodecahedron | PolytopeKind::Icosahedron => 3,
                PolytopeKind::Cell600 => 4,
                _ => dimension,
            });
            PeakConfiguration::polytope(kind, h, dimension)?
        }
        FamilyName::Nested => {
            PeakConfiguration::nested(need(a.k, "nested", "k")?, need(a.m, "nested", "m")?, dimension)?
        }
        FamilyName::Rings => PeakConfiguration::rings(
            need(a.q, "rings", "q")?,
            need(a.m1, "rings", "m1")?,
            need(a.m2, "rings", "m2")?,
            dimension,
        )?,
        FamilyName::Raw => {
            let path = a
                .points
                .as_ref()
                .ok_or_else(|| CliError::Validation("raw needs --points FILE".into()))?;
            #[derive(serde::Deserialize)]
            struct RawInput {
                points: Vec<Vec<f64>>,
                signs: Vec<i8>,
            }
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let raw: RawInput = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            if raw.points.iter().any(|p| p.len() != dimension) {
                return Err(CliError::Validation(format!("raw points must have {dimension} coordinates")));
            }
            PeakConfiguration::raw(raw.points, raw.signs)?
        }
    })
}

fn parse_eps_list(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Validation(format!("ε list '{spec}' is not start:end:count"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single.trim().parse().map_err(|_| bad())?]),
        [a, b, n] => {
            let start: f64 = a.trim().parse().map_err(|_| bad())?;
            let end: f64 = b.trim().parse().map_err(|_| bad())?;
            let count: usize = n.trim().parse().map_err(|_| bad())?;
            Ok(geometric_list(start, end, count)?)
        }
        _ => Err(bad()),
    }
}

fn parse_signs(s: &str) -> Result<(i8, i8), CliError> {
    let sign = |c: char| match c {
        '+' => Ok(1),
        '-' => Ok(-1),
        _ => Err(CliError::Validation(format!("signs '{s}' must be two of '+' and '-'"))),
    };
    let chars: Vec<char> = s.chars().collect();
    match chars.as_slice() {
        [a, b] => Ok((sign(*a)?, sign(*b)?)),
        _ => Err(CliError::Validation(format!("signs '{s}' must be two of '+' and '-'"))),
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.dimension {
        cfg.dimension = n;
    }
    if let Some(p) = cli.exponent {
        cfg.exponent = p;
    }
    if let Some(b) = cli.beta {
        cfg.reduction.beta = b;
    }
    if cli.sigma.is_some() {
        cfg.reduction.sigma = cli.sigma;
    }
    if let Some(m) = cli.mu {
        cfg.reduction.mu = m;
    }
    if cli.sequential {
        cfg.sequential = true;
    }
    if let Some(d) = &cli.out_dir {
        cfg.paths.output_dir = Some(d.clone());
    }
    cfg.override_cache_dir(cli.cache_dir.clone());
    cfg.validate()?;
    Ok(cfg)
}

struct Context {
    cfg: RunConfig,
}

impl Context {
    fn load(&self) -> Result<Loaded, CliError> {
        let loaded = load_or_solve(&self.cfg)?;
        eprintln!(
            "profile cache {} ({})",
            loaded.path.display(),
            if loaded.hit { "hit" } else { "written" }
        );
        Ok(loaded)
    }

    fn output(&self, path: &Option<PathBuf>) -> Option<PathBuf> {
        path.as_ref().map(|p| self.cfg.output_path(p))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Context {
        cfg: resolve_config(&cli)?,
    };
    let cfg = &ctx.cfg;
    let dim = cfg.dimension;
    match &cli.command {
        Command::GroundState => {
            let loaded = ctx.load()?;
            let p = &loaded.profile;
            let mut out = format!(
                "w(0) = {}\nA_N = {}\nA_N_limit = {}\n",
                fmt_sig(p.center_value()),
                fmt_sig(p.tail().amplitude),
                fmt_sig(p.limit_amplitude())
            );
            out.push_str(&format!("I[w] = {}\n", fmt_sig(spcluster::ground_state::energy_i(p))));
            // The profile is useful even when the constants are not computable.
            if let Ok(c) = &loaded.constants {
                out.push_str(&format!("gamma0 = {}\nC2 = {}\n", fmt_sig(c.gamma0), fmt_sig(c.c2)));
            }
            deliver(None, &out)?;
            loaded.constants().map(|_| ())
        }
        Command::Constants { emit, output } => {
            let c = ctx.load()?.constants()?;
            let text = match emit {
                Emit::Json => to_json(&c),
                Emit::Text | Emit::Csv => {
                    let v = serde_json::to_value(c).expect("constants serialize");
                    let mut s = String::new();
                    for (k, v) in v.as_object().expect("object") {
                        let cell = v.as_f64().map(fmt_sig).unwrap_or_else(|| v.to_string());
                        s.push_str(&if *emit == Emit::Csv {
                            csv_row([k.clone(), cell])
                        } else {
                            format!("{k} = {cell}\n")
                        });
                    }
                    s
                }
                Emit::Svg => return Err(CliError::Validation("constants have no SVG form".into())),
            };
            deliver(ctx.output(output).as_deref(), &text)
        }
        Command::Config {
            family,
            params,
            emit,
            output,
        } => {
            let c = build_configuration(*family, params, dim)?;
            let text = match emit {
                Emit::Json => to_json(&c.to_json()),
                Emit::Csv => c.to_csv(),
                Emit::Svg => svg::configuration(&format!("{} configuration", c.family().name()), c.points(), c.signs()),
                Emit::Text => return Err(CliError::Validation("config emits json, csv or svg".into())),
            };
            deliver(ctx.output(output).as_deref(), &text)
        }
        Command::Reduce { family, r, eps } => {
            let c = build_configuration(family.family, &family.params, dim)?;
            let loaded = ctx.load()?;
            let constants = loaded.constants()?;
            let model = ReducedModel::new(&loaded.profile, &constants, cfg.reduction_parameters()?);
            if !(*eps > 0.0 && *eps < 1.0 && *r > 0.0) {
                return Err(spcluster::Error::DomainViolation {
                    value: *eps,
                    reason: "need r > 0 and ε ∈ (0, 1)".into(),
                }
                .into());
            }
            let ev = model.reduced_m(&c, *r, *eps);
            let v = json!({
                "r": r,
                "eps": eps,
                "in_gamma": c.gamma_membership(*r, *eps, model.params()),
                "evaluation": ev,
            });
            deliver(None, &to_json(&v))
        }
        Command::Maximize { family, eps, alpha_c } => {
            let loaded = ctx.load()?;
            let constants = loaded.constants()?;
            let model = ReducedModel::new(&loaded.profile, &constants, cfg.reduction_parameters()?);
            let v = match alpha_c {
                Some(cc) => json!({"alpha": model.maximize_alpha(*eps, *cc)?, "eps": eps, "C": cc}),
                None => {
                    let c = build_configuration(family.family, &family.params, dim)?;
                    json!({"maximizer": model.maximize_m(&c, *eps)?, "eps": eps, "family": c.family().name()})
                }
            };
            deliver(None, &to_json(&v))
        }
        Command::Sweep {
            family,
            eps,
            emit,
            output,
        } => {
            let c = build_configuration(family.family, &family.params, dim)?;
            let list = parse_eps_list(eps)?;
            let loaded = ctx.load()?;
            let constants = loaded.constants()?;
            let model = ReducedModel::new(&loaded.profile, &constants, cfg.reduction_parameters()?);
            let rows = model.sweep(&c, &list, cfg.execution())?;
            let text = match emit {
                Emit::Csv => sweep_csv(&rows),
                Emit::Json => to_json(&rows),
                _ => return Err(CliError::Validation("sweep emits csv or json".into())),
            };
            deliver(ctx.output(output).as_deref(), &text)
        }
        Command::Residual {
            family,
            eps,
            r,
            emit,
            output,
        } => {
            if *emit != Emit::Json {
                return Err(CliError::Validation("residual emits json".into()));
            }
            let c = build_configuration(family.family, &family.params, dim)?;
            let loaded = ctx.load()?;
            let params = cfg.reduction_parameters()?;
            let radius = match r {
                Some(r) => *r,
                None => {
                    let constants = loaded.constants()?;
                    ReducedModel::new(&loaded.profile, &constants, params)
                        .maximize_m(&c, *eps)?
                        .argmax
                }
            };
            let kernel = ResidualKernel::new(&loaded.profile);
            let ansatz = MultiPeakAnsatz::new(&c, &kernel, radius, *eps)?;
            let report = residual_bound_check(&ansatz, &params, cfg.execution());
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["config"] = c.to_json();
            deliver(ctx.output(output).as_deref(), &to_json(&v))
        }
        Command::Oracle {
            name,
            d_list,
            signs,
            output,
        } => {
            let signs = parse_signs(signs)?;
            let loaded = ctx.load()?;
            let p = &loaded.profile;
            let q = cfg.quadrature;
            let mut text = csv_row(["d", "value", "normalized", "limit"].map(String::from));
            for &d in d_list {
                let wd = p.value(d);
                let (value, normalized, limit) = match name {
                    OracleName::Interaction => {
                        let v = two_peak_interaction_with(p, d, q)?;
                        (v, v / wd, 2.0 * loaded.constants()?.gamma0)
                    }
                    OracleName::H => {
                        let v = h_two_peak(p, d, signs)?;
                        (v, v / wd, 0.0)
                    }
                    OracleName::Coulomb => {
                        let v = pair_coulomb_energy_with(p, d, q)?;
                        let m = RadialDensity::square_of(p).mass();
                        (v, v * d.powi(dim as i32 - 2), m * m)
                    }
                    OracleName::Energy => {
                        let v = schrodinger_energy_two_peak(p, d, signs)?;
                        let i = spcluster::ground_state::energy_i(p);
                        let lam = (signs.0 * signs.1) as f64;
                        (v, (v - 2.0 * i) / wd, -2.0 * lam * loaded.constants()?.gamma0)
                    }
                };
                text.push_str(&csv_row([fmt_sig(d), fmt_sig(value), fmt_sig(normalized), fmt_sig(limit)]));
            }
            deliver(ctx.output(output).as_deref(), &text)
        }
        Command::Plot {
            figure,
            family,
            eps,
            output,
        } => {
            let text = plot(&ctx, *figure, family, eps.as_deref())?;
            deliver(ctx.output(output).as_deref(), &text)
        }
    }
}

fn plot(ctx: &Context, kind: PlotKind, family: &FamilyFlag, eps: Option<&str>) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let dim = cfg.dimension;
    let params = cfg.reduction_parameters()?;
    match kind {
        PlotKind::Config => {
            let c = build_configuration(family.family, &family.params, dim)?;
            Ok(svg::configuration(&format!("{} configuration", c.family().name()), c.points(), c.signs()))
        }
        PlotKind::Profile => {
            let loaded = ctx.load()?;
            let pts: Vec<(f64, f64)> = (0..=200).map(|i| {
                let r = 0.05 * i as f64;
                (r, loaded.profile.value(r))
            }).collect();
            Ok(svg::line_plot(
                &format!("ground state, N = {dim}, p = {}", fmt_sig(cfg.exponent)),
                "r",
                "w(r)",
                &[svg::Series { points: &pts, color: "black", label: "w" }],
                &[],
            ))
        }
        PlotKind::Alpha => {
            let eps: f64 = eps
                .unwrap_or("1e-3")
                .parse()
                .map_err(|_| CliError::Validation("alpha plot needs a single --eps value".into()))?;
            let c = build_configuration(family.family, &family.params, dim)?;
            let loaded = ctx.load()?;
            let constants = loaded.constants()?;
            let model = ReducedModel::new(&loaded.profile, &constants, params);
            let lead = model.leading_reduction(&c)?;
            let best = model.maximize_alpha(eps, lead.coefficient)?;
            let l = log_inv_eps2(eps);
            let (lo, hi) = (params.beta * params.beta * l, 2.5 * l);
            let pts: Vec<(f64, f64)> = (0..=400)
                .map(|i| {
                    let rho = lo + (hi - lo) * i as f64 / 400.0;
                    (rho, model.alpha_unchecked(rho, eps, lead.coefficient))
                })
                .collect();
            Ok(svg::line_plot(
                &format!("α(ρ) for {}, ε = {}", c.family().name(), fmt_sig(eps)),
                "ρ",
                "α",
                &[svg::Series { points: &pts, color: "#2c5aa0", label: "α_{ε,C}" }],
                &[svg::Marker {
                    x: best.argmax,
                    y: best.value,
                    label: format!("ρ_ε = {}", fmt_sig(best.argmax)),
                }],
            ))
        }
        PlotKind::Convergence => {
            let list = parse_eps_list(eps.unwrap_or("1e-3:1e-9:13"))?;
            let c = build_configuration(family.family, &family.params, dim)?;
            let loaded = ctx.load()?;
            let constants = loaded.constants()?;
            let model = ReducedModel::new(&loaded.profile, &constants, params);
            let rows = model.sweep(&c, &list, cfg.execution())?;
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| r.normalized.map(|n| (log_inv_eps2(r.eps), n)))
                .collect();
            let ones: Vec<(f64, f64)> = pts.iter().map(|&(x, _)| (x, 1.0)).collect();
            Ok(svg::line_plot(
                &format!("r_ε s / (ε log(1/ε²)) for {}", c.family().name()),
                "log(1/ε²)",
                "normalized radius",
                &[
                    svg::Series { points: &pts, color: "#c0392b", label: "computed" },
                    svg::Series { points: &ones, color: "gray", label: "limit 1" },
                ],
                &[],
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
