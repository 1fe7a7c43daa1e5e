//! Command-line front end.
//!
//! [`run`] parses arguments, dispatches to the library and returns a
//! [`CommandOutcome`]; the binary only prints it and sets the exit code.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::constants::{
    bh_upper_bound, equivalence_gap, interpolate, khinchin_a, solve_p0, sqrt2_baseline,
};
use crate::cotype::{
    bilinear_cotype_certificate, cotype_bounds, extremal_instance, CotypeInstance,
};
use crate::error::Error;
use crate::forms::{self, sup_norm_with, MultilinearForm, SupNormOptions, DEFAULT_SUP_BUDGET};
use crate::mixed_norms::{
    admissible, bh_exponents, minkowski_compare, mixed_norm, parse_number, ExponentTuple,
};
use crate::search::{certify, equivalence_demo, growth_witness, optimize_ratio_with, OptimizeOptions};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const DEFAULT_SEARCH_BUDGET: u64 = 10_000;
const DEFAULT_P0_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "littlewood", version, about = "Mixed norms, sup norms and ratio certificates for real multilinear forms")]
struct Cli {
    /// Emit one JSON document instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Evaluation budget (sup norm vertices, or search candidates)
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Seed for randomized searches
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Tolerance for root finding
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct FormArg {
    /// Catalog name (littlewood2, triple221), a path, or @path to force a file
    #[arg(long)]
    form: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sup norm of a form over the unit balls of c0
    Norm(FormArg),
    /// Evaluate a form at one point per slot
    Evaluate {
        #[command(flatten)]
        form: FormArg,
        /// Comma-separated coordinates, repeated once per slot
        #[arg(long = "point", value_parser = parse_vector, required = true)]
        points: Vec<Vec<f64>>,
    },
    /// Nested mixed norm of the coefficients
    Mixed {
        #[command(flatten)]
        form: FormArg,
        /// "q1,q2,..." or "n1:q1|n2:q2|..."
        #[arg(long, value_parser = parse_exps)]
        exps: ExponentTuple,
    },
    /// Whether Σ 1/q_j ≤ (k+1)/2
    Admissible {
        #[arg(long, value_parser = parse_exps)]
        exps: ExponentTuple,
    },
    /// The exponents 2m/(m+1) repeated m times
    BhExponents {
        #[arg(long)]
        m: usize,
    },
    /// Both nesting orders of a bilinear mixed norm
    Minkowski {
        #[command(flatten)]
        form: FormArg,
        #[arg(long, value_parser = parse_real)]
        p: f64,
        #[arg(long, value_parser = parse_real)]
        q: f64,
    },
    /// Lift an (m−1)-linear form to an m-linear one
    Lift {
        #[command(flatten)]
        form: FormArg,
        /// Write the lifted form here instead of printing it
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ratio certificate mixed_norm / sup_norm for one form
    Certify {
        #[command(flatten)]
        form: FormArg,
        #[arg(long, value_parser = parse_exps)]
        exps: ExponentTuple,
    },
    /// Search coefficient tensors for a large ratio
    Optimize {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, value_parser = parse_exps)]
        exps: ExponentTuple,
        /// Finish with a line search over real coefficients
        #[arg(long)]
        refine: bool,
    },
    /// Best ratios on square shapes (n, ..., n)
    Growth {
        #[arg(long, value_parser = parse_exps)]
        exps: ExponentTuple,
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 4)]
        trials: u64,
        #[arg(long)]
        refine: bool,
    },
    /// Interpolate multiple exponents and their constants
    Interpolate {
        /// One unblocked exponent tuple, repeated
        #[arg(long = "tuple", value_parser = parse_exps, required = true)]
        tuples: Vec<ExponentTuple>,
        /// Weights (default: uniform)
        #[arg(long, value_parser = parse_real, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[arg(long, value_parser = parse_real, value_delimiter = ',', required = true)]
        constants: Vec<f64>,
    },
    /// Sharp real Khinchin constant A_p
    Khinchin {
        #[arg(long, value_parser = parse_real)]
        p: f64,
    },
    /// Root of Γ((p+1)/2) = √π/2
    P0,
    /// Upper bound for the Bohnenblust–Hille constant from the Khinchin recursion
    BhBound {
        #[arg(long)]
        m: usize,
    },
    /// The constant (√2)^(m−1)
    Baseline {
        #[arg(long)]
        m: usize,
    },
    /// A_{(2m−2)/m}^{-1}
    EquivGap {
        #[arg(long)]
        m: usize,
    },
    /// Exact cotype-2 ratio of a vector family in ℓ_r
    CotypeRatio {
        /// Instance file {"r", "s", "vectors"}
        #[arg(long, conflicts_with = "extremal", required_unless_present = "extremal")]
        instance: Option<String>,
        /// Use the pair (1,1), (1,−1) with s = r
        #[arg(long, requires = "r")]
        extremal: bool,
        #[arg(long, value_parser = parse_real)]
        r: Option<f64>,
    },
    /// Known bounds on C_{2,r}(ℓ_r)
    CotypeBounds {
        #[arg(long, value_parser = parse_real)]
        r: f64,
    },
    /// Lower bound on C_{2,r}(ℓ_r) witnessed by a bilinear form
    CotypeCertificate {
        #[command(flatten)]
        form: FormArg,
        #[arg(long, value_parser = parse_real)]
        r: f64,
    },
    /// Write the catalog forms as JSON files
    Catalog {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check the lifting identity for a form of degree m−1
    EquivalenceDemo {
        #[command(flatten)]
        form: FormArg,
        #[arg(long)]
        m: usize,
    },
}

fn parse_exps(s: &str) -> Result<ExponentTuple, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A real number, a fraction `a/b`, or `sqrt(x)`.
fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        return parse_number(inner).map(f64::sqrt).map_err(|e| e.to_string());
    }
    parse_number(t).map_err(|e| e.to_string())
}

fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_real).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutcome {
    pub status: Status,
    pub command: String,
    pub payload: Value,
    pub message: Option<String>,
    /// 0 ok, 1 domain error, 2 usage error
    pub exit_code: i32,
    pub json: bool,
}

impl CommandOutcome {
    /// The single JSON document of JSON mode.
    pub fn to_json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("status".into(), serde_json::to_value(self.status).expect("status"));
        doc.insert("command".into(), Value::String(self.command.clone()));
        doc.insert("version".into(), Value::String(VERSION.into()));
        match self.status {
            Status::Ok => doc.insert("result".into(), self.payload.clone()),
            Status::Error => doc.insert(
                "message".into(),
                Value::String(self.message.clone().unwrap_or_default()),
            ),
        };
        serde_json::to_string_pretty(&Value::Object(doc)).expect("values serialize")
    }

    /// What goes to standard output.
    pub fn stdout(&self) -> String {
        if self.json {
            return self.to_json() + "\n";
        }
        match self.status {
            Status::Ok => {
                if let Value::String(text) = &self.payload {
                    return text.clone();
                }
                let mut out = String::new();
                render_text(&self.payload, "", &mut out);
                out
            }
            Status::Error => String::new(),
        }
    }

    /// What goes to standard error.
    pub fn stderr(&self) -> String {
        match (&self.status, &self.message) {
            (Status::Error, Some(m)) => format!("error: {m}\n"),
            _ => String::new(),
        }
    }
}

/// Formats with 12 significant digits.
pub fn format_number(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s
        }
    } else {
        let s = format!("{v:.11e}");
        match s.split_once('e') {
            Some((mantissa, exp)) if mantissa.contains('.') => format!(
                "{}e{exp}",
                mantissa.trim_end_matches('0').trim_end_matches('.')
            ),
            _ => s,
        }
    }
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (_, Some(i)) => i.to_string(),
            _ => format_number(n.as_f64().unwrap_or(f64::NAN)),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => Some(
            format!(
                "[{}]",
                items
                    .iter()
                    .filter_map(scalar_text)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ),
        _ => None,
    }
}

fn render_text(v: &Value, prefix: &str, out: &mut String) {
    if let Some(s) = scalar_text(v) {
        if prefix.is_empty() {
            out.push_str(&s);
        } else {
            out.push_str(&format!("{prefix}: {s}"));
        }
        out.push('\n');
        return;
    }
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_owned()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                render_text(child, &key(k), out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                render_text(child, &key(&(i + 1).to_string()), out);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

fn resolve_form(arg: &FormArg) -> Result<MultilinearForm, Error> {
    let name = arg.form.as_str();
    if let Some(path) = name.strip_prefix('@') {
        return MultilinearForm::read(path);
    }
    if forms::CATALOG_NAMES.contains(&name) {
        return forms::by_name(name);
    }
    if Path::new(name).exists() {
        return MultilinearForm::read(name);
    }
    Err(Error::InvalidForm(format!(
        "`{name}` is neither a catalog form ({}) nor an existing file",
        forms::CATALOG_NAMES.join(", ")
    )))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Norm(_) => "norm",
        Command::Evaluate { .. } => "evaluate",
        Command::Mixed { .. } => "mixed",
        Command::Admissible { .. } => "admissible",
        Command::BhExponents { .. } => "bh-exponents",
        Command::Minkowski { .. } => "minkowski",
        Command::Lift { .. } => "lift",
        Command::Certify { .. } => "certify",
        Command::Optimize { .. } => "optimize",
        Command::Growth { .. } => "growth",
        Command::Interpolate { .. } => "interpolate",
        Command::Khinchin { .. } => "khinchin",
        Command::P0 => "p0",
        Command::BhBound { .. } => "bh-bound",
        Command::Baseline { .. } => "baseline",
        Command::EquivGap { .. } => "equiv-gap",
        Command::CotypeRatio { .. } => "cotype-ratio",
        Command::CotypeBounds { .. } => "cotype-bounds",
        Command::CotypeCertificate { .. } => "cotype-certificate",
        Command::Catalog { .. } => "catalog",
        Command::EquivalenceDemo { .. } => "equivalence-demo",
    }
}

fn execute(cli: &Cli) -> Result<Value, Error> {
    let search_opts = |refine| OptimizeOptions {
        budget: cli.budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
        seed: cli.seed,
        refine,
    };
    Ok(match &cli.command {
        Command::Norm(f) => {
            let form = resolve_form(f)?;
            let opts = SupNormOptions {
                budget: cli.budget.unwrap_or(DEFAULT_SUP_BUDGET),
                seed: cli.seed,
                ..Default::default()
            };
            let r = sup_norm_with(&form, &opts)?;
            json!({
                "form": form.label(),
                "dims": form.dims(),
                "value": r.value,
                "exact": r.exact,
                "evaluations": r.evaluations,
            })
        }
        Command::Evaluate { form, points } => {
            let form = resolve_form(form)?;
            let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
            json!({ "value": form.evaluate(&refs)? })
        }
        Command::Mixed { form, exps } => {
            let form = resolve_form(form)?;
            let r = mixed_norm(&form, exps)?;
            json!({ "exponents": exps, "value": r.value, "ragged": r.ragged })
        }
        Command::Admissible { exps } => {
            let ok = admissible(exps)?;
            let sum: f64 = exps.exponents().iter().map(|q| 1.0 / q).sum();
            json!({
                "exponents": exps,
                "admissible": ok,
                "sum_of_inverses": sum,
                "bound": (exps.len() as f64 + 1.0) / 2.0,
            })
        }
        Command::BhExponents { m } => json!({ "m": m, "exponents": bh_exponents(*m)? }),
        Command::Minkowski { form, p, q } => {
            let form = resolve_form(form)?;
            to_value(&minkowski_compare(&form, *p, *q)?)
        }
        Command::Lift { form, out } => {
            let lifted = resolve_form(form)?.lift();
            match out {
                Some(path) => {
                    lifted.write(path)?;
                    json!({ "written": path.display().to_string(), "dims": lifted.dims() })
                }
                None => to_value(&forms::FormFile::from(&lifted)),
            }
        }
        Command::Certify { form, exps } => to_value(&certify(&resolve_form(form)?, exps)?),
        Command::Optimize { dims, exps, refine } => {
            to_value(&optimize_ratio_with(dims, exps, &search_opts(*refine))?)
        }
        Command::Growth {
            exps,
            n_list,
            trials,
            refine,
        } => {
            let rows = growth_witness(exps, n_list, *trials, &search_opts(*refine))?;
            json!({ "exponents": exps, "trials": trials, "rows": rows })
        }
        Command::Interpolate {
            tuples,
            weights,
            constants,
        } => {
            let weights = weights
                .clone()
                .unwrap_or_else(|| vec![1.0 / tuples.len() as f64; tuples.len()]);
            to_value(&interpolate(tuples, &weights, constants)?)
        }
        Command::Khinchin { p } => to_value(&khinchin_a(*p)?),
        Command::P0 => {
            let tol = cli.tol.unwrap_or(DEFAULT_P0_TOL);
            let p0 = solve_p0(tol)?;
            let residual = crate::constants::gamma((p0 + 1.0) / 2.0) - std::f64::consts::PI.sqrt() / 2.0;
            json!({ "p0": p0, "residual": residual, "tol": tol })
        }
        Command::BhBound { m } => json!({
            "m": m,
            "bound": bh_upper_bound(*m)?,
            "baseline": sqrt2_baseline(*m)?,
        }),
        Command::Baseline { m } => json!({ "m": m, "value": sqrt2_baseline(*m)? }),
        Command::EquivGap { m } => json!({
            "m": m,
            "p": (2.0 * *m as f64 - 2.0) / *m as f64,
            "gap": equivalence_gap(*m)?,
        }),
        Command::CotypeRatio {
            instance,
            extremal,
            r,
        } => {
            let inst = match (instance, extremal, r) {
                (_, true, Some(r)) => extremal_instance(*r)?,
                (Some(path), false, _) => {
                    CotypeInstance::read(path.strip_prefix('@').unwrap_or(path))?
                }
                _ => unreachable!("clap enforces one source"),
            };
            to_value(&inst)
        }
        Command::CotypeBounds { r } => to_value(&cotype_bounds(*r)?),
        Command::CotypeCertificate { form, r } => {
            let form = resolve_form(form)?;
            json!({
                "r": r,
                "value": bilinear_cotype_certificate(&form, *r)?,
                "bounds": cotype_bounds(*r)?,
            })
        }
        Command::Catalog { out } => {
            std::fs::create_dir_all(out)?;
            let mut written = Vec::new();
            for name in forms::CATALOG_NAMES {
                let path = out.join(format!("{name}.json"));
                forms::by_name(name)?.write(&path)?;
                written.push(path.display().to_string());
            }
            json!({ "written": written })
        }
        Command::EquivalenceDemo { form, m } => {
            to_value(&equivalence_demo(&resolve_form(form)?, *m)?)
        }
    })
}

pub fn run<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let json = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutcome {
                    status: Status::Ok,
                    command: "help".into(),
                    payload: Value::String(e.render().to_string()),
                    message: None,
                    exit_code: 0,
                    json: false,
                },
                _ => CommandOutcome {
                    status: Status::Error,
                    command: "usage".into(),
                    payload: Value::Null,
                    message: Some(
                        e.render()
                            .to_string()
                            .trim_start_matches("error: ")
                            .trim_end()
                            .to_owned(),
                    ),
                    exit_code: 2,
                    json,
                },
            };
        }
    };
    let command = command_name(&cli.command).to_owned();
    match execute(&cli) {
        Ok(payload) => CommandOutcome {
            status: Status::Ok,
            command,
            payload,
            message: None,
            exit_code: 0,
            json: cli.json,
        },
        Err(e) => CommandOutcome {
            status: Status::Error,
            command,
            payload: Value::Null,
            message: Some(e.to_string()),
            exit_code: 1,
            json: cli.json,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(std::f64::consts::SQRT_2), "1.41421356237");
        assert_eq!(format_number(2.0), "2");
        assert_eq!(format_number(1234.5), "1234.5");
        assert_eq!(format_number(0.000123456789012345), "0.000123456789012");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1e-8), "1e-8");
        assert_eq!(format_number(-2.5e-7), "-2.5e-7");
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn real_parsing() {
        assert_eq!(parse_real("4/3").unwrap(), 4.0 / 3.0);
        assert_eq!(parse_real("sqrt(2)").unwrap(), 2f64.sqrt());
        assert!(parse_real("sqrt(x)").is_err());
    }
}
