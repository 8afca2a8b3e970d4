//! Command-line front end. Exit codes: 0 when a verdict or result is reached,
//! 2 for an undecided trace, 1 on any error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytic::bigfloat::bits_for_digits;
use crate::analytic::curve::{CurveModel, Weierstrass};
use crate::analytic::modular::atkin_lehner_sign;
use crate::error::{Error, Result};
use crate::experiment::{
    experiment_finite, heegner_form, heegner_form_stable, trace_point, BaseChoice, ExperimentSpec, HeegnerTau, Mode,
    Verdict,
};
use crate::quad::{kernel_classes, order_data, reduced_forms};

#[derive(Parser, Debug)]
#[command(name = "cartan-trace", version, about = "Cartan level structures and Heegner trace experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BaseArg {
    Stable,
    SmallestB,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    SignoMinus,
    MainPlus,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Embedding, two-to-one coset map, w_p pairing and alpha_l checks.
    FiniteCheck {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        dk: i64,
        #[arg(long, default_value_t = 1)]
        f: i64,
        #[arg(long, default_value_t = 1)]
        m: i64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Reduced forms of the order of conductor f, and the kernel at p.
    Classgroup {
        #[arg(long, allow_hyphen_values = true)]
        dk: i64,
        #[arg(long, default_value_t = 1)]
        f: i64,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// A Heegner form (A, B, C) with N | A and discriminant c^2 dK.
    Heegner {
        #[arg(long)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        dk: i64,
        #[arg(long)]
        c: i64,
        /// Restrict to B = 0 mod p^2.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Galois trace of the Heegner orbit of conductor p f.
    Trace {
        /// a1,a2,a3,a4,a6
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        dk: i64,
        #[arg(long, default_value_t = 1)]
        f: i64,
        #[arg(long, env = "CARTAN_TRACE_DIGITS", default_value_t = 60)]
        digits: u32,
        /// Trust this conductor instead of running Tate's algorithm.
        #[arg(long)]
        conductor: Option<i64>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, value_enum, default_value_t = BaseArg::Stable)]
        base: BaseArg,
        #[arg(long, default_value_t = 24)]
        max_torsion: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Atkin-Lehner eigenvalue w_Q (Q defaults to p^2).
    Sign {
        #[arg(long, allow_hyphen_values = true)]
        curve: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<i64>,
        #[arg(long, env = "CARTAN_TRACE_DIGITS", default_value_t = 60)]
        digits: u32,
        #[arg(long)]
        conductor: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn parse_curve(s: &str) -> Result<Weierstrass> {
    let cleaned = s.trim().trim_start_matches('[').trim_end_matches(']');
    let nums: std::result::Result<Vec<i64>, _> =
        cleaned.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(str::parse).collect();
    let nums = nums.map_err(|e| Error::Invalid(format!("bad curve coefficients {s:?}: {e}")))?;
    Weierstrass::from_slice(&nums)
}

fn curve_model(curve: &str, p: Option<u64>, conductor: Option<i64>) -> Result<CurveModel> {
    let e = parse_curve(curve)?;
    match (p, conductor) {
        (Some(p), Some(n)) => CurveModel::with_conductor(e, p, n),
        (Some(p), None) => CurveModel::new(e, p),
        (None, Some(n)) => {
            let p = crate::arith::factorize(n as u64)
                .into_iter()
                .find(|&(q, k)| q > 2 && k == 2)
                .map(|(q, _)| q)
                .ok_or(Error::BadLevel { conductor: n, p: 0 })?;
            CurveModel::with_conductor(e, p, n)
        }
        (None, None) => CurveModel::new(e, CurveModel::guess_p(&e)?),
    }
}

fn write_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Invalid(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct HeegnerOut {
    form: (i64, i64, i64),
    disc: i64,
    tau: (String, String),
}

#[derive(Serialize)]
struct SignOut {
    q: i64,
    conductor: i64,
    eigenvalue: i32,
    root_number: Option<i32>,
    digits: u32,
}

#[derive(Serialize)]
struct ClassOut {
    disc: i64,
    class_number: usize,
    forms: Vec<(i64, i64, i64)>,
    kernel: Option<Vec<(String, (i64, i64), (i64, i64, i64))>>,
}

fn run(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::Invalid(e.to_string());
    match cmd {
        Command::FiniteCheck { p, dk, f, m, json } => {
            let report = experiment_finite(&ExperimentSpec::finite(p, m, dk, f))?;
            for c in &report.checks {
                writeln!(out, "{:<16} {}  {}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail).map_err(io)?;
            }
            writeln!(out, "fibers {} (index {})", report.fibers, report.index_ns_plus).map_err(io)?;
            write_json(&json, &report)?;
            Ok(if report.all_passed { 0 } else { 1 })
        }
        Command::Classgroup { dk, f, p, json } => {
            let order = order_data(dk, f)?;
            let forms = reduced_forms(order.disc)?;
            writeln!(out, "disc {}  h = {}", order.disc, forms.len()).map_err(io)?;
            for g in &forms {
                writeln!(out, "  {g}").map_err(io)?;
            }
            let kernel = match p {
                None => None,
                Some(p) => {
                    let k = kernel_classes(&order, p)?;
                    writeln!(out, "kernel of Pic({}) -> Pic({}): {} classes", k.suborder.disc, order.disc, k.len())
                        .map_err(io)?;
                    for e in &k.entries {
                        writeln!(out, "  {}  {:?}  {}", e.class, e.generator, e.form).map_err(io)?;
                    }
                    Some(k.entries.iter().map(|e| (e.class.to_string(), e.generator, e.form.as_tuple())).collect())
                }
            };
            let value = ClassOut {
                disc: order.disc,
                class_number: forms.len(),
                forms: forms.iter().map(|g| g.as_tuple()).collect(),
                kernel,
            };
            write_json(&json, &value)?;
            Ok(0)
        }
        Command::Heegner { n, dk, c, p, json } => {
            let form = match p {
                Some(p) => heegner_form_stable(n, p, dk, c)?,
                None => heegner_form(n, dk, c)?,
            };
            let h = HeegnerTau::new(form, c, bits_for_digits(30));
            let tau = h.tau.to_decimal(20);
            writeln!(out, "form {form}  disc {}  tau = {} + {} i", form.disc(), tau.0, tau.1).map_err(io)?;
            write_json(&json, &HeegnerOut { form: form.as_tuple(), disc: form.disc(), tau })?;
            Ok(0)
        }
        Command::Trace { curve, p, dk, f, digits, conductor, mode, base, max_torsion, json } => {
            let model = curve_model(&curve, p, conductor)?;
            let mode = match mode {
                Some(ModeArg::SignoMinus) => Mode::SignoMinus,
                Some(ModeArg::MainPlus) => Mode::MainPlus,
                None => {
                    let q = (model.p * model.p) as i64;
                    if atkin_lehner_sign(&model, q, digits)? == -1 {
                        Mode::SignoMinus
                    } else {
                        Mode::MainPlus
                    }
                }
            };
            let mut spec = ExperimentSpec::new(model, dk, f, digits, mode);
            spec.base = match base {
                BaseArg::Stable => BaseChoice::Stable,
                BaseArg::SmallestB => BaseChoice::SmallestB,
            };
            spec.max_torsion = max_torsion;
            let r = trace_point(&spec)?;
            writeln!(out, "w_p = {:+}  base {}  orbit {} points  n_max {}", r.wp, r.base_form, r.orbit.len(), r.n_max)
                .map_err(io)?;
            writeln!(out, "trace z = {} + {} i", r.trace_z.re, r.trace_z.im).map_err(io)?;
            writeln!(out, "torsion residual 10^{:.1}", r.torsion_residual_log10).map_err(io)?;
            if let Some(pt) = &r.recognized {
                writeln!(out, "point ({}, {}) on curve: {}", pt.x, pt.y, pt.on_curve).map_err(io)?;
            }
            let v = serde_json::to_value(r.verdict).map_err(|e| Error::Invalid(e.to_string()))?;
            writeln!(out, "verdict {}  expected {}", v.as_str().unwrap_or("?"), r.expected).map_err(io)?;
            write_json(&json, &r)?;
            Ok(if r.verdict == Verdict::Undecided { 2 } else { 0 })
        }
        Command::Sign { curve, p, q, digits, conductor, json } => {
            let model = curve_model(&curve, p, conductor)?;
            let q = q.unwrap_or((model.p * model.p) as i64);
            let eps = atkin_lehner_sign(&model, q, digits)?;
            let root = (q == model.conductor).then_some(-eps);
            writeln!(out, "w_{q} = {eps:+}").map_err(io)?;
            if let Some(r) = root {
                writeln!(out, "root number {r:+}").map_err(io)?;
            }
            write_json(&json, &SignOut { q, conductor: model.conductor, eigenvalue: eps, root_number: root, digits })?;
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs one subcommand,
/// writing the summary to `out` and errors to `err`.
pub fn run_cli_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = if code == 0 { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    match run(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn run_cli() -> i32 {
    run_cli_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
