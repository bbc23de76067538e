use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zeta_gram::divisor::build_table;
use zeta_gram::io::{decode_divisor_table, encode_divisor_table, encode_resonator, fmt_f64, write_atomic};
use zeta_gram::verify::{
    critical_set, maxscan_table, parse_exponents, points_csv, points_json, render_maxscan, resonate, run_suite, Format,
    RunConfig, Suite,
};
use zeta_gram::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "zeta-gram", version, about = "Zeta values at generalized Gram points and discrete moment checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Rotation angle φ in [0, π).
    #[arg(long)]
    phi: Option<f64>,
    /// Height T up to which Gram points are enumerated.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Directory for cached Gram point tables.
    #[arg(long = "cache-dir")]
    cache_dir: Option<PathBuf>,
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SuiteArg {
    Prop1,
    Thm2,
    Thm1,
    Cor1,
    Cor2,
    Divisor,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classified Gram points as `n,phi,t,zeta_re,zeta_im,z,sign`.
    Points(Common),
    /// Run a verification suite; exits nonzero if any asserted criterion fails.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[command(flatten)]
        common: Common,
        /// Numerator of the exponent k = p/q for the `thm1` suite.
        #[arg(long, requires = "q")]
        p: Option<u32>,
        /// Denominator of the exponent k = p/q for the `thm1` suite.
        #[arg(long, requires = "p")]
        q: Option<u32>,
    },
    /// Running maxima of |ζ| per sign class at logarithmic checkpoints.
    Maxscan(Common),
    /// Resonator ratio and Σf(n)² for each length X.
    Resonate {
        /// Resonator lengths.
        #[arg(long = "x", value_delimiter = ',', default_values_t = vec![1e3, 1e4, 1e5, 1e6])]
        x: Vec<f64>,
        /// Write the support of the last resonator as `n,f` here.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Table of d_k(n) for n up to a limit, or a summary of a saved table.
    Divisor {
        /// Order κ of the divisor function.
        #[arg(long, default_value_t = 3.0)]
        k: f64,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
        /// Read and validate a saved table instead of building one.
        #[arg(long)]
        load: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            RunConfig::from_config_text(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = common.phi {
        cfg.phi = v;
    }
    if let Some(v) = common.t_max {
        cfg.t_max = v;
    }
    if let Some(v) = common.threads {
        cfg.threads = v;
    }
    if let Some(v) = common.format {
        cfg.format = match v {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(v) = &common.cache_dir {
        cfg.cache_dir = Some(v.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.output {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(f)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Points(common) => {
            let cfg = load_config(&common)?;
            let set = in_pool(cfg.threads, || critical_set(&cfg))?;
            let text = match cfg.format {
                Format::Csv => points_csv(&set),
                Format::Json => points_json(&set, &cfg)?,
            };
            emit(&common, &text)?;
            Ok(true)
        }
        Command::Verify { suite, common, p, q } => {
            let mut cfg = load_config(&common)?;
            if let (Some(p), Some(q)) = (p, q) {
                cfg.exponents = parse_exponents(&format!("{p}/{q}"))?;
            }
            let suite = match suite {
                SuiteArg::Prop1 => Suite::Prop1,
                SuiteArg::Thm2 => Suite::Thm2,
                SuiteArg::Thm1 => Suite::Thm1,
                SuiteArg::Cor1 => Suite::Cor1,
                SuiteArg::Cor2 => Suite::Cor2,
                SuiteArg::Divisor => Suite::Divisor,
                SuiteArg::All => Suite::All,
            };
            let bundle = in_pool(cfg.threads, || run_suite(&cfg, suite))?;
            for c in bundle.criteria.iter().filter(|c| c.asserted && !c.passed) {
                eprintln!("FAIL {}: {}", c.id, c.detail);
            }
            emit(&common, &bundle.render(cfg.format)?)?;
            Ok(bundle.all_passed())
        }
        Command::Maxscan(common) => {
            let cfg = load_config(&common)?;
            let rows = in_pool(cfg.threads, || maxscan_table(&cfg))?;
            emit(&common, &render_maxscan(&rows, cfg.format)?)?;
            Ok(true)
        }
        Command::Resonate { x, dump, common } => {
            let cfg = load_config(&common)?;
            if matches!(cfg.format, Format::Json) {
                return Err(Error::Unsupported("resonate writes CSV only".into()));
            }
            let mut out = String::from("X,support,sum_f2,numerator,ratio\n");
            let mut last = None;
            for &xv in &x {
                let (res, ratio) = resonate(xv)?;
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_f64(xv),
                    res.len(),
                    fmt_f64(ratio.denominator),
                    fmt_f64(ratio.numerator),
                    fmt_f64(ratio.ratio)
                ));
                last = Some(res);
            }
            if let (Some(path), Some(res)) = (dump, last) {
                write_atomic(&path, &encode_resonator(&res))?;
            }
            emit(&common, &out)?;
            Ok(true)
        }
        Command::Divisor { k, limit, load, common } => {
            if matches!(load_config(&common)?.format, Format::Json) {
                return Err(Error::Unsupported("divisor writes CSV only".into()));
            }
            let table = match load {
                Some(path) => {
                    let text =
                        std::fs::read_to_string(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                    let table = decode_divisor_table(&text)?;
                    let sum: f64 = table.values.iter().sum();
                    emit(
                        &common,
                        &format!("kappa,limit,sum\n{},{},{}\n", fmt_f64(table.kappa), table.limit, fmt_f64(sum)),
                    )?;
                    return Ok(true);
                }
                None => build_table(k, limit)?,
            };
            emit(&common, &encode_divisor_table(&table))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
