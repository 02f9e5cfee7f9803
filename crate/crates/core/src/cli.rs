//! Command-line front end.
//!
//! Every parameter can come from a flag or from a `key = value` file given
//! with `--config`; flags win. Outputs start with a provenance block: `#`
//! comment lines for CSV, a `provenance` object for JSON.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config::ConfigFile;
use crate::continuation;
use crate::criteria::{self, CriteriaOptions};
use crate::elliptic;
use crate::error::{Error, Result};
use crate::evolution::{self, ExperimentConfig, Perturbation};
use crate::galerkin::{self, ZeroTolerance};
use crate::klcurve;
use crate::multiplier::MultiplierSymbol;
use crate::profile::{self, build_dnoidal};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "wavestab",
    version,
    about = "Periodic travelling waves: construction, spectra and stability criteria"
)]
pub struct Cli {
    /// Plain-text key = value file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

impl Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complete integrals, Legendre relation and dn identities on a k grid.
    EllipticCheck {
        #[arg(long)]
        k_min: Option<f64>,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve the period constraint over a k grid.
    Sweep {
        #[arg(long)]
        k_min: Option<f64>,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        omega: Option<f64>,
        /// Worker threads for the root finding.
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fourier coefficients of the dnoidal wave on the branch.
    Profile {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        /// Truncation order.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Eigenvalues of the linearized operator.
    Spectrum {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        /// Absolute zero threshold (default: scale-aware policy).
        #[arg(long)]
        tol_zero: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Full stability report at (k, ω [, A]).
    Criteria {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long = "A", alias = "a")]
        a: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Newton continuation over an (ω, A) patch around the dnoidal wave.
    Continue {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long = "A", alias = "a")]
        a: Option<f64>,
        #[arg(long)]
        d_omega: Option<f64>,
        #[arg(long = "d-A", alias = "d-a")]
        d_a: Option<f64>,
        #[arg(long)]
        extent_omega: Option<usize>,
        #[arg(long = "extent-A", alias = "extent-a")]
        extent_a: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evolve a perturbed wave and record the orbital distance.
    Evolve {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Perturbed mode for `--perturbation mode`.
        #[arg(long)]
        mode: Option<usize>,
        /// mode, random or mean.
        #[arg(long)]
        perturbation: Option<String>,
        /// Highest mode of a random perturbation.
        #[arg(long)]
        band: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Keep F and M at the wave's values.
        #[arg(long)]
        fix_f: Option<bool>,
        /// Horizon in time units (default: 10 temporal periods).
        #[arg(long = "T", alias = "horizon")]
        t: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        sample_every: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write (k, L1) and (k, p) along the branch.
    ReproduceFigure1 {
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        k_min: Option<f64>,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Directory receiving the two CSV files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::EllipticCheck { .. } => "elliptic-check",
            Command::Sweep { .. } => "sweep",
            Command::Profile { .. } => "profile",
            Command::Spectrum { .. } => "spectrum",
            Command::Criteria { .. } => "criteria",
            Command::Continue { .. } => "continue",
            Command::Evolve { .. } => "evolve",
            Command::ReproduceFigure1 { .. } => "reproduce-figure1",
        }
    }
}

#[derive(Debug)]
enum CliError {
    Missing(&'static str),
    /// Already reported; exit with this code.
    Exit(i32),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Resolves parameters from flags and the config file, recording the
/// values used.
struct Params {
    file: ConfigFile,
    used: Vec<(String, String)>,
}

impl Params {
    fn opt<T: FromStr + Display + Clone>(
        &mut self,
        key: &'static str,
        flag: Option<T>,
    ) -> CliResult<Option<T>> {
        let v = match flag {
            Some(v) => Some(v),
            None => self.file.get::<T>(key)?,
        };
        if let Some(v) = &v {
            self.used.push((key.to_owned(), v.to_string()));
        }
        Ok(v)
    }

    fn or<T: FromStr + Display + Clone>(
        &mut self,
        key: &'static str,
        flag: Option<T>,
        default: T,
    ) -> CliResult<T> {
        match self.opt(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.used.push((key.to_owned(), default.to_string()));
                Ok(default)
            }
        }
    }

    fn req<T: FromStr + Display + Clone>(
        &mut self,
        key: &'static str,
        flag: Option<T>,
    ) -> CliResult<T> {
        self.opt(key, flag)?.ok_or(CliError::Missing(key))
    }

    fn note(&mut self, key: &str, value: impl Display) {
        self.used.push((key.to_owned(), value.to_string()));
    }
}

struct Artifact {
    csv: String,
    json: Value,
}

fn provenance_lines(command: &str, params: &Params) -> String {
    let mut s = format!("# wavestab {VERSION}\n# command: {command}\n");
    for (k, v) in &params.used {
        s.push_str(&format!("# {k}: {v}\n"));
    }
    s
}

fn provenance_json(command: &str, params: &Params) -> Value {
    let p: serde_json::Map<String, Value> = params
        .used
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    json!({ "version": VERSION, "command": command, "parameters": p })
}

fn render(command: &str, params: &Params, art: &Artifact, format: Format) -> String {
    match format {
        Format::Csv => format!("{}{}", provenance_lines(command, params), art.csv),
        Format::Json => {
            let v = json!({ "provenance": provenance_json(command, params), "data": art.json });
            serde_json::to_string_pretty(&v).expect("json renders") + "\n"
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn check_modulus(k: f64) -> Result<()> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::domain(format!("k must lie in (0, 1), got {k}")));
    }
    Ok(())
}

fn check_speed(omega: f64) -> Result<()> {
    if !(omega.is_finite() && omega != 0.0) {
        return Err(Error::invalid(format!(
            "omega must be finite and nonzero, got {omega}"
        )));
    }
    Ok(())
}

fn check_truncation(n: usize) -> Result<()> {
    if !(profile::MIN_TRUNCATION..=1024).contains(&n) {
        return Err(Error::invalid(format!(
            "n must be in {}..=1024, got {n}",
            profile::MIN_TRUNCATION
        )));
    }
    Ok(())
}

fn tol_metadata(p: &mut Params) {
    p.note("tol_newton", continuation::RESIDUAL_TOL);
    p.note(
        "tol_zero_policy",
        "1e-6*low_mode_scale + 64*eps*max|lambda|",
    );
}

fn dispatch(cmd: &Command, p: &mut Params) -> CliResult<()> {
    let name = cmd.name();
    match cmd {
        Command::EllipticCheck {
            k_min,
            k_max,
            steps,
            output,
        } => {
            let k_min = p.or("k_min", *k_min, 0.1)?;
            let k_max = p.or("k_max", *k_max, 0.9)?;
            let steps = p.or("steps", *steps, 9)?;
            let format = p.or("format", output.format, Format::Csv)?;
            let out = p.opt("out", output.out.as_ref().map(|o| o.display().to_string()))?;
            for k in [k_min, k_max] {
                if !(0.0..1.0).contains(&k) {
                    return Err(Error::domain(format!("k must lie in [0, 1), got {k}")).into());
                }
            }
            let mut csv =
                String::from("k,K,E,Kp,Ep,legendre_residual,dn0_err,dnK_err,dn_period_err\n");
            let mut rows = Vec::new();
            for k in klcurve::linear_grid(k_min, k_max, steps) {
                let ep = elliptic::complete_integrals(k)?;
                let dn0 = (elliptic::dn(0.0, k)? - 1.0).abs();
                let dnk = (elliptic::dn(ep.k1, k)? - (1.0 - k * k).sqrt()).abs();
                let x = 0.37;
                let per = (elliptic::dn(x + 2.0 * ep.k1, k)? - elliptic::dn(x, k)?).abs();
                let leg = ep.legendre_residual();
                csv.push_str(&format!(
                    "{k},{},{},{},{},{leg:.3e},{dn0:.3e},{dnk:.3e},{per:.3e}\n",
                    ep.k1, ep.e1, ep.k1p, ep.e1p
                ));
                rows.push(json!({"k": k, "K": ep.k1, "E": ep.e1, "Kp": ep.k1p, "Ep": ep.e1p,
                    "legendre_residual": leg, "dn0_err": dn0, "dnK_err": dnk, "dn_period_err": per}));
            }
            let art = Artifact {
                csv,
                json: Value::Array(rows),
            };
            emit(
                &render(name, p, &art, format),
                out.as_deref().map(Path::new),
            )?;
        }
        Command::Sweep {
            k_min,
            k_max,
            steps,
            omega,
            jobs,
            output,
        } => {
            let k_min = p.or("k_min", *k_min, 0.54)?;
            let k_max = p.or("k_max", *k_max, 0.99)?;
            let steps = p.or("steps", *steps, 200)?;
            let omega = p.or("omega", *omega, 1.0)?;
            let jobs = p.or("jobs", *jobs, 1)?;
            let format = p.or("format", output.format, Format::Csv)?;
            let out = p.opt("out", output.out.as_ref().map(|o| o.display().to_string()))?;
            check_modulus(k_min)?;
            check_modulus(k_max)?;
            check_speed(omega)?;
            let rows = klcurve::sweep(
                &klcurve::linear_grid(k_min, k_max, steps),
                omega,
                jobs.max(1),
            )?;
            let art = Artifact {
                csv: klcurve::sweep_csv(&rows),
                json: serde_json::to_value(&rows).expect("rows serialize"),
            };
            emit(
                &render(name, p, &art, format),
                out.as_deref().map(Path::new),
            )?;
        }
        Command::Profile {
            k,
            omega,
            n,
            output,
        } => {
            let k = p.req("k", *k)?;
            let omega = p.or("omega", *omega, 1.0)?;
            let n = p.or("n", *n, profile::DEFAULT_TRUNCATION)?;
            let format = p.or("format", output.format, Format::Csv)?;
            let out = p.opt("out", output.out.as_ref().map(|o| o.display().to_string()))?;
            check_modulus(k)?;
            check_speed(omega)?;
            check_truncation(n)?;
            let pt = klcurve::branch_point(k)?;
            let (params, psi) = build_dnoidal(k, pt.period, omega, n)?;
            let (_, resid) = profile::extract_a(&psi, omega, &MultiplierSymbol::kawahara());
            for (key, v) in [
                ("period", pt.period),
                ("a", params.a),
                ("b", params.b),
                ("d", params.d),
                ("A", params.a_const),
                ("residual", resid),
            ] {
                p.note(key, v);
            }
            let mut csv = String::from("n,coeff\n");
            for (i, c) in psi.coeffs().iter().enumerate() {
                csv.push_str(&format!("{i},{c:.17e}\n"));
            }
            let art = Artifact {
                csv,
                json: json!({"params": params, "coeffs": psi.coeffs(), "residual": resid}),
            };
            emit(
                &render(name, p, &art, format),
                out.as_deref().map(Path::new),
            )?;
        }
        Command::Spectrum {
            k,
            omega,
            n,
            tol_zero,
            output,
        } => {
            let k = p.req("k", *k)?;
            let omega = p.or("omega", *omega, 1.0)?;
            let n = p.or("n", *n, 256)?;
            let tol = p.opt("tol_zero", *tol_zero)?;
            let format = p.or("format", output.format, Format::Csv)?;
            let out = p.opt("out", output.out.as_ref().map(|o| o.display().to_string()))?;
            check_modulus(k)?;
            check_speed(omega)?;
            check_truncation(n)?;
            let pt = klcurve::branch_point(k)?;
            let (_, psi) = build_dnoidal(k, pt.period, omega, n)?;
            let op = galerkin::assemble(&psi, omega, &MultiplierSymbol::kawahara());
            let policy = tol.map_or(ZeroTolerance::Default, ZeroTolerance::Absolute);
            let rep = galerkin::spectrum(&op, policy)?;
            p.note("tol_zero", rep.tol_zero);
            p.note("n_neg", rep.n_neg);
            p.note("n_zero", rep.n_zero);
            p.note("kernel_corr", rep.kernel_corr);
            p.note("assumption_h", rep.assumption_h());
            let art = Artifact {
                csv: rep.to_csv(),
                json: serde_json::to_value(&rep).expect("report serializes"),
            };
            emit(
                &render(name, p, &art, format),
                out.as_deref().map(Path::new),
            )?;
        }
        Command::Criteria {
            k,
            omega,
            a,
            n,
            output,
        } => {
            let k = p.req("k", *k)?;
            let omega = p.req("omega", *omega)?;
            let a = p.opt("A", *a)?;
            let n = p.or("n", *n, profile::DEFAULT_TRUNCATION)?;
            let format = p.or("format", output.format, Format::Json)?;
            let out = p.opt("out", output.out.as_ref().map(|o| o.display().to_string()))?;
            check_modulus(k)?;
            check_speed(omega)?;
            check_truncation(n)?;
            let rep = criteria::analyze_dnoidal(
                k,
                omega,
                a,
                &CriteriaOptions {
                    truncation: n,
                    ..Default::default()
                },
            )?;
            let value = serde_json::to_value(&rep).expect("report serializes");
            let mut csv = String::from("key,value\n");
            flatten_json("", &value, &mut csv);
            let art = Artifact { csv, json: value };
            emit(
                &render(name, p, &art, format),
                out.as_deref().map(Path::new),
            )?;
        }
        Command::Continue {
            k,
            omega,
            a,
            d_omega,
            d_a,
            extent_omega,
            extent_a,
            n,
            output,
        } => {
            let k = p.req("k", *k)?;
            let omega = p.req("omega", *omega)?;
            let a = p.opt("A", *a)?;
            let d_omega = p.or("d_omega", *d_omega, 0.01)?;
            let d_a = p.or("d_A", *d_a, 0.01)?;
            let ei = p.or("extent_omega", *extent_omega, 2)?;
            let ej = p.or("extent_A", *extent_a, 2)?;
            let n = p.or("n", *n, 64)?;
            let format = p.or("format", output.format, Format::Csv)?;
            let out = p.opt("out", output.out.as_ref().map(|o| o.display().to_string()))?;
            check_modulus(k)?;
            check_speed(omega)?;
            check_truncation(n)?;
            let sym = MultiplierSymbol::kawahara();
            let pt = klcurve::branch_point(k)?;
            let (params, psi) = build_dnoidal(k, pt.period, omega, n)?;
            let center =
                continuation::newton_solve(&psi, omega, a.unwrap_or(params.a_const), &sym)?;
            let patch = continuation::surface_patch(&center, &sym, d_omega, d_a, (ei, ej))?;
            let missing = patch.points.iter().filter(|x| x.is_none()).count();
            p.note("unreached_points", missing);
            let rows: Vec<Value> = patch
                .points
                .iter()
                .flatten()
                .map(|c| json!({"omega": c.omega, "A": c.a_const, "mean": c.psi.mean(), "F": 0.5 * c.psi.norm_sq(), "residual": c.residual_norm}))
                .collect();
            let art = Artifact {
                csv: patch.to_csv(),
                json: Value::Array(rows),
            };
            emit(
                &render(name, p, &art, format),
                out.as_deref().map(Path::new),
            )?;
        }
        Command::Evolve {
            k,
            omega,
            delta,
            mode,
            perturbation,
            band,
            seed,
            fix_f,
            t,
            dt,
            n,
            sample_every,
            output,
        } => {
            let k = p.req("k", *k)?;
            let omega = p.req("omega", *omega)?;
            let delta = p.or("delta", *delta, 1e-3)?;
            let kind = p.or("perturbation", perturbation.clone(), "mode".to_owned())?;
            let n = p.or("n", *n, 42)?;
            check_modulus(k)?;
            check_speed(omega)?;
            check_truncation(n)?;
            let pert = match kind.as_str() {
                "mode" => Perturbation::Mode {
                    mode: p.or("mode", *mode, 1)?,
                },
                "random" => Perturbation::Random {
                    max_mode: p.or("band", *band, 4)?,
                    seed: p.or("seed", *seed, 0)?,
                },
                "mean" => Perturbation::MeanShift,
                other => {
                    return Err(Error::invalid(format!(
                        "unknown perturbation {other:?} (mode, random, mean)"
                    ))
                    .into())
                }
            };
            let fix_f = p.or("fix_f", *fix_f, false)?;
            let pt = klcurve::branch_point(k)?;
            let t_period = pt.period / omega.abs();
            let horizon = p.or("T", *t, 10.0 * t_period)?;
            let sym = MultiplierSymbol::kawahara();
            let (params, psi) = build_dnoidal(k, pt.period, omega, n)?;
            let dt = match p.opt("dt", *dt)? {
                Some(v) => v,
                None => {
                    let v =
                        evolution::default_dt(&evolution::EvolutionState::from_profile(&psi), &sym);
                    p.note("dt", v);
                    v
                }
            };
            let sample_every = p.or("sample_every", *sample_every, 100)?;
            let format = p.or("format", output.format, Format::Csv)?;
            let out = p.opt("out", output.out.as_ref().map(|o| o.display().to_string()))?;
            if !(delta.is_finite() && delta >= 0.0) {
                return Err(Error::invalid("delta must be nonnegative").into());
            }
            let label = criteria::analyze_dnoidal(
                k,
                omega,
                None,
                &CriteriaOptions {
                    truncation: n.max(64),
                    ..Default::default()
                },
            )
            .map(|r| r.verdict.to_string())?;
            p.note("predicted_verdict", &label);
            p.note("horizon_note", "finite horizon only");
            let cfg = ExperimentConfig {
                delta,
                perturbation: pert,
                fix_f,
                horizon,
                dt,
                sample_every,
            };
            let rep =
                evolution::stability_experiment(&psi, omega, params.a_const, &sym, &cfg, &label)?;
            p.note("rho0", rep.rho0);
            p.note("max_rho", rep.max_rho);
            p.note("on_level_set", rep.on_level_set);
            p.note("max_compat", rep.max_compat);
            let art = Artifact {
                csv: rep.to_csv(),
                json: serde_json::to_value(&rep).expect("report serializes"),
            };
            emit(
                &render(name, p, &art, format),
                out.as_deref().map(Path::new),
            )?;
            if let Some(msg) = &rep.blowup {
                eprintln!("error: {msg}");
                return Err(CliError::Exit(4));
            }
        }
        Command::ReproduceFigure1 {
            steps,
            k_min,
            k_max,
            jobs,
            out_dir,
        } => {
            let steps = p.or("steps", *steps, 200)?;
            let k_min = p.or("k_min", *k_min, 0.54)?;
            let k_max = p.or("k_max", *k_max, 0.999)?;
            let jobs = p.or("jobs", *jobs, 1)?;
            let dir = p.or(
                "out_dir",
                out_dir.as_ref().map(|o| o.display().to_string()),
                ".".to_owned(),
            )?;
            check_modulus(k_min)?;
            check_modulus(k_max)?;
            let fig = figure1(k_min, k_max, steps, jobs.max(1))?;
            match fig.sign_change {
                Some(k) => p.note("p_sign_change_k", k),
                None => p.note("p_sign_change_k", "none"),
            }
            p.note("p_positive_rows", fig.positive_rows);
            let dir = PathBuf::from(dir);
            std::fs::create_dir_all(&dir)
                .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            let head = provenance_lines(name, p);
            emit(
                &format!("{head}{}", fig.l1_csv),
                Some(&dir.join("figure1_kl.csv")),
            )?;
            emit(
                &format!("{head}{}", fig.p_csv),
                Some(&dir.join("figure1_p.csv")),
            )?;
            println!(
                "wrote {} and {}; p > 0 on {} of {} points; sign change at k = {}",
                dir.join("figure1_kl.csv").display(),
                dir.join("figure1_p.csv").display(),
                fig.positive_rows,
                steps,
                fig.sign_change
                    .map_or("none".to_owned(), |k| format!("{k:.12}"))
            );
        }
    }
    Ok(())
}

fn flatten_json(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_json(&key, x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten_json(&format!("{prefix}.{i}"), x, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix},{s}\n")),
        other => out.push_str(&format!("{prefix},{other}\n")),
    }
}

/// Data behind the two panels of the branch figure.
#[derive(Debug, Clone)]
pub struct Figure1 {
    pub l1_csv: String,
    pub p_csv: String,
    pub positive_rows: usize,
    pub sign_change: Option<f64>,
}

pub fn figure1(k_min: f64, k_max: f64, steps: usize, jobs: usize) -> Result<Figure1> {
    let grid = klcurve::linear_grid(k_min, k_max, steps);
    let rows = klcurve::sweep(&grid, 1.0, jobs)?;
    let mut l1_csv = String::from("k,L1\n");
    let mut p_csv = String::from("k,p\n");
    let mut positive_rows = 0;
    let mut bracket = None;
    let mut prev: Option<(f64, f64)> = None;
    for r in &rows {
        match r.point {
            Some(pt) => {
                l1_csv.push_str(&format!("{},{}\n", r.k, pt.l1));
                p_csv.push_str(&format!("{},{}\n", r.k, pt.p_value));
                if pt.p_value > 0.0 {
                    positive_rows += 1;
                }
                if let Some((k0, p0)) = prev {
                    if bracket.is_none() && (p0 > 0.0) != (pt.p_value > 0.0) {
                        bracket = Some((k0, r.k));
                    }
                }
                prev = Some((r.k, pt.p_value));
            }
            None => {
                l1_csv.push_str(&format!("{},\n", r.k));
                p_csv.push_str(&format!("{},\n", r.k));
                prev = None;
            }
        }
    }
    let sign_change = match bracket {
        Some((a, b)) => Some(klcurve::p_sign_change(a, b)?),
        None => None,
    };
    Ok(Figure1 {
        l1_csv,
        p_csv,
        positive_rows,
        sign_change,
    })
}

/// Parses `args` (including the program name), runs and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let file = match cli.config.as_deref().map(ConfigFile::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let mut params = Params {
        file,
        used: Vec::new(),
    };
    if let Some(c) = &cli.config {
        params.note("config", c.display());
    }
    tol_metadata(&mut params);
    match dispatch(&cli.command, &mut params) {
        Ok(()) => 0,
        Err(CliError::Missing(key)) => {
            let name = cli.command.name();
            eprintln!(
                "error: missing required parameter `{key}` (flag --{} or config key {key})\n",
                key.replace('_', "-")
            );
            let mut cmd = Cli::command();
            cmd.build();
            if let Some(sub) = cmd.find_subcommand_mut(name) {
                eprintln!("{}", sub.render_help());
            }
            2
        }
        Err(CliError::Exit(code)) => code,
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
