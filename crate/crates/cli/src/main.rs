mod cache;
mod config;
mod records;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpz_core::acceptance::Suite;
use qpz_core::exact::with_bernoulli_override;
use rug::Rational;
use serde_json::{json, Value};

use cache::{cache_key, Cache};
use config::{OutputFormat, Overrides, RunConfig};

const EXIT_DOMAIN: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Zeta values of real quadratic fields and period polynomials of cusp forms
/// attached to binary quadratic forms.
#[derive(Parser, Debug)]
#[command(name = "qpz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Tuning {
    /// Largest c in direct family zeta sums.
    #[arg(long = "cmax")]
    c_max: Option<u64>,
    /// Initial |a'| bound of the Fourier coefficient sums; doubled until stable.
    #[arg(long = "bbound")]
    b_bound: Option<u64>,
    /// Working precision in bits (at least 64).
    #[arg(long = "prec")]
    prec: Option<u32>,
    /// Absolute quadrature tolerance.
    #[arg(long = "tol")]
    tol: Option<f64>,
    /// Print the JSON record instead of text.
    #[arg(long)]
    json: bool,
    /// Result cache file (JSON lines).
    #[arg(long = "cache")]
    cache: Option<PathBuf>,
    /// Flat key = value configuration file.
    #[arg(long = "config")]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Family {
    #[arg(long = "k")]
    k: i64,
    #[arg(long = "N")]
    n: i64,
    #[arg(long = "D")]
    d: i64,
    #[arg(long = "rho", allow_hyphen_values = true)]
    rho: i64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dedekind zeta value of Q(sqrt D) at even k from the divisor-sum formula.
    Dedekind {
        #[arg(long = "k")]
        k: i64,
        #[arg(long = "N")]
        n: i64,
        #[arg(long = "D")]
        d: i64,
        /// Assume the plus-space vanishing hypothesis for levels outside the built-in table.
        #[arg(long)]
        assume_plus_space_vanishes: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Exact odd-weight difference zeta(rho) - zeta(-rho) against direct sums.
    ZetaDiff {
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Identity component of the period polynomial: closed form against quadrature.
    Period {
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Forms of the family with ac < 0 and the algebraic part they produce.
    Forms {
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Family zeta value by direct summation and by its Euler product.
    Zeta {
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::Fast)]
        suite: SuiteArg,
        /// Replace one Bernoulli number, as `n=p/q`, to check that the suite notices.
        #[arg(long, hide = true, value_parser = parse_tamper)]
        tamper_bernoulli: Option<(u32, Rational)>,
        #[command(flatten)]
        tuning: Tuning,
    },
}

fn parse_tamper(s: &str) -> Result<(u32, Rational), String> {
    let (n, v) = s.split_once('=').ok_or("expected n=p/q")?;
    let n = n.trim().parse().map_err(|_| format!("bad index {n:?}"))?;
    let v = v.trim().parse().map_err(|_| format!("bad rational {v:?}"))?;
    Ok((n, v))
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Fast,
    Full,
}

impl Command {
    fn tuning(&self) -> &Tuning {
        match self {
            Command::Dedekind { tuning, .. }
            | Command::ZetaDiff { tuning, .. }
            | Command::Period { tuning, .. }
            | Command::Forms { tuning, .. }
            | Command::Zeta { tuning, .. }
            | Command::Verify { tuning, .. } => tuning,
        }
    }
}

fn resolve_config(t: &Tuning) -> Result<RunConfig, String> {
    let env: BTreeMap<String, String> = std::env::vars().filter(|(k, _)| k.starts_with("QPZ_")).collect();
    let flags = Overrides {
        precision_bits: t.prec,
        c_max: t.c_max,
        b_bound_initial: t.b_bound,
        quadrature_tol: t.tol,
        cache_path: t.cache.clone(),
        json: t.json,
    };
    RunConfig::resolve(t.config.as_deref(), &env, &flags)
}

/// Canonical description of a computation: everything its record depends on.
fn cache_identity(command: &Command, cfg: &RunConfig) -> Option<Value> {
    let tol = |x: f64| format!("{x:e}");
    let fam = |f: &Family| json!({"k": f.k, "N": f.n, "D": f.d, "rho": f.rho});
    Some(match command {
        Command::Dedekind {
            k,
            n,
            d,
            assume_plus_space_vanishes,
            ..
        } => json!({
            "command": "dedekind",
            "params": {"k": k, "N": n, "D": d, "assume": assume_plus_space_vanishes},
            "precision_bits": cfg.precision_bits,
        }),
        Command::ZetaDiff { family, .. } => json!({
            "command": "zeta-diff",
            "params": fam(family),
            "precision_bits": cfg.precision_bits,
            "c_max": cfg.c_max,
        }),
        Command::Zeta { family, .. } => json!({
            "command": "zeta",
            "params": fam(family),
            "precision_bits": cfg.precision_bits,
            "c_max": cfg.c_max,
        }),
        Command::Period { family, .. } => json!({
            "command": "period",
            "params": fam(family),
            "precision_bits": cfg.precision_bits,
            "b_bound_initial": cfg.b_bound_initial,
            "quadrature_tol": tol(cfg.quadrature_tol),
            "series_tol": tol(cfg.series_tol),
        }),
        Command::Forms { family, .. } => json!({"command": "forms", "params": fam(family)}),
        Command::Verify { .. } => return None,
    })
}

fn compute(command: &Command, cfg: &RunConfig) -> qpz_core::Result<Value> {
    match command {
        Command::Dedekind {
            k,
            n,
            d,
            assume_plus_space_vanishes,
            ..
        } => records::dedekind(*k, *n, *d, *assume_plus_space_vanishes, cfg),
        Command::ZetaDiff { family: f, .. } => records::zeta_diff(f.k, f.n, f.d, f.rho, cfg),
        Command::Period { family: f, .. } => records::period(f.k, f.n, f.d, f.rho, cfg),
        Command::Forms { family: f, .. } => records::forms(f.k, f.n, f.d, f.rho),
        Command::Zeta { family: f, .. } => records::zeta(f.k, f.n, f.d, f.rho, cfg),
        Command::Verify { .. } => unreachable!("verify is handled separately"),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
}

fn emit(record_text: &str, cfg: &RunConfig) {
    match cfg.output_format {
        OutputFormat::Json => out(&format!("{record_text}\n")),
        OutputFormat::Text => {
            let v: Value = serde_json::from_str(record_text).expect("records are valid JSON");
            out(&records::to_text(&v));
        }
    }
}

fn run_verify(suite: SuiteArg, tamper: Option<(u32, Rational)>, cfg: &RunConfig) -> ExitCode {
    let suite = match suite {
        SuiteArg::Fast => Suite::Fast,
        SuiteArg::Full => Suite::Full,
    };
    let (record, outcomes) = match tamper {
        Some((n, v)) => with_bernoulli_override(n, v, || records::verify(suite)),
        None => records::verify(suite),
    };
    match cfg.output_format {
        OutputFormat::Json => out(&format!("{record}\n")),
        OutputFormat::Text => outcomes.iter().for_each(|o| out(&format!("{o}\n"))),
    }
    if outcomes.iter().all(|o| o.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let cfg = match resolve_config(cli.command.tuning()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Command::Verify {
        suite,
        tamper_bernoulli,
        ..
    } = &cli.command
    {
        return run_verify(*suite, tamper_bernoulli.clone(), &cfg);
    }

    let cache = cfg.cache_path.as_ref().map(Cache::new);
    let key = cache_identity(&cli.command, &cfg).map(|id| cache_key(&id));
    if let (Some(cache), Some(key)) = (&cache, &key) {
        match cache.get(key) {
            Ok(Some(hit)) => {
                emit(&hit, &cfg);
                return ExitCode::SUCCESS;
            }
            Ok(None) => {}
            Err(e) => eprintln!("warning: cache unreadable: {e}"),
        }
    }
    let record = match compute(&cli.command, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            return ExitCode::from(EXIT_DOMAIN);
        }
    };
    let text = record.to_string();
    if let (Some(cache), Some(key)) = (&cache, &key) {
        if let Err(e) = cache.put(key, &text) {
            eprintln!("warning: cache not written: {e}");
        }
    }
    emit(&text, &cfg);
    ExitCode::SUCCESS
}
