use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use pirbatch::array_code::{build_rk_batch, five_batch_code, ArrayCodeParams};
use pirbatch::curves::{self, Which};
use pirbatch::gf::Elem;
use pirbatch::multiplicity::code_profile;
use pirbatch::verify::{certify_batch, certify_code_pir, enumerate_requests, generator_of, Report, EXHAUSTIVE_LIMIT};
use pirbatch::{AvailabilityCode, Descriptor, RestrictedWord};

#[derive(Parser)]
#[command(name = "pirbatch", version, about = "Build and certify PIR and batch codes")]
struct Cli {
    /// Worker threads for certification (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// More log output; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a code descriptor and print its profile.
    Build {
        #[command(subcommand)]
        family: BuildFamily,
        /// Descriptor path; stdout if omitted.
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Check the recovering sets of a code with linear algebra.
    Certify(CertifyArgs),
    /// Emit asymptotic redundancy curves as CSV.
    Curves {
        which: Which,
        #[arg(long, default_value = "1/20")]
        step: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Encode a random message and recover every target through every set.
    Roundtrip {
        #[arg(long)]
        code: PathBuf,
        /// Use the all-zero message.
        #[arg(long)]
        zero: bool,
    },
    /// Encode a message (comma-separated field elements; random if omitted).
    Encode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        message: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Recover one symbol from the entries of one of its recovering sets.
    Recover {
        #[arg(long)]
        code: PathBuf,
        /// Codeword file, comma or whitespace separated.
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        target: usize,
        /// Which recovering set of the target to read.
        #[arg(long, default_value_t = 0)]
        set: usize,
    },
}

#[derive(Subcommand)]
enum BuildFamily {
    Multiplicity {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        q: u32,
        /// Modulus coefficients, constant term first.
        #[arg(long, value_delimiter = ',')]
        modulus: Option<Vec<u32>>,
    },
    /// Diagonal array code: `--r --k` picks p and S automatically,
    /// `--five-batch --p` builds the global-parity 5-batch code.
    Array {
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long = "slopes", value_delimiter = ',')]
        slopes: Option<Vec<usize>>,
        #[arg(long)]
        global_parity: bool,
        #[arg(long)]
        five_batch: bool,
    },
    /// Binary image of a code over a field of characteristic 2.
    Binary {
        #[arg(long)]
        base: PathBuf,
    },
    Replicated {
        #[arg(long)]
        copies: usize,
        #[arg(long)]
        base: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Pir,
    Batch,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Request size for batch mode.
    #[arg(long)]
    k: Option<usize>,
    /// Enumerate all multisets when there are at most this many.
    #[arg(long, default_value_t = EXHAUSTIVE_LIMIT)]
    limit: u64,
    /// Random requests drawn when enumeration is too large.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Per-request CSV report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// JSON summary; printed to stdout as well.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Serialize)]
struct SummaryOut<'a> {
    code: String,
    mode: &'a str,
    k: usize,
    total: usize,
    passed: usize,
    failed: usize,
    seed: u64,
    exhaustive: bool,
}

fn usage(msg: impl std::fmt::Display) -> anyhow::Error {
    anyhow::anyhow!("{msg}")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` means a check ran and failed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let seed = cli.seed;
    match cli.command {
        Command::Build { family, out } => build(family, out.as_deref()),
        Command::Certify(args) => certify(args, seed),
        Command::Curves { which, step, out } => {
            let step = curves::parse_rational(&step).map_err(usage)?;
            let rows = curves::curves(which, step).map_err(usage)?;
            let mut buf = Vec::new();
            curves::write_csv(&rows, &mut buf)?;
            emit(out.as_deref(), &buf)?;
            let cross = curves::batch_crossover();
            if !cross.agrees() {
                info!("batch crossover at ε = {} by formula; quoted value {}", cross.by_formula, cross.quoted);
            }
            Ok(true)
        }
        Command::Roundtrip { code, zero } => roundtrip(&code, zero, seed),
        Command::Encode { code, message, out } => {
            let code = load(&code)?;
            let message = match message {
                Some(text) => parse_elems(&text)?,
                None => random_message(code.as_ref(), seed),
            };
            let word = code.encode(&message).map_err(usage)?;
            emit(out.as_deref(), format!("{}\n", join(&word)).as_bytes())?;
            Ok(true)
        }
        Command::Recover { code, word, target, set } => {
            let code = load(&code)?;
            let text = fs::read_to_string(&word).with_context(|| format!("reading {}", word.display()))?;
            let word = parse_elems(&text)?;
            if word.len() != code.length() {
                return Err(usage(format!("codeword has {} entries, expected {}", word.len(), code.length())));
            }
            let sets = code.pir_sets(target).map_err(usage)?;
            let chosen =
                sets.get(set).ok_or_else(|| usage(format!("target {target} has {} recovering sets", sets.len())))?;
            let restricted = RestrictedWord::new(&word, code.symbol_width(), chosen.iter().copied())?;
            let symbol = code.recover(&restricted, target, chosen)?;
            println!("{}", join(&symbol));
            Ok(true)
        }
    }
}

fn build(family: BuildFamily, out: Option<&Path>) -> anyhow::Result<bool> {
    let descriptor = match family {
        BuildFamily::Multiplicity { m, d, s, q, modulus } => Descriptor::Multiplicity { m, d, s, q, modulus },
        BuildFamily::Array { r, k, p, slopes, global_parity, five_batch } => {
            let params = match (five_batch, r, k, p, slopes) {
                (true, None, None, Some(p), None) => five_batch_code(p),
                (false, Some(r), Some(k), None, None) => build_rk_batch(r, k),
                (false, Some(r), None, Some(p), Some(slopes)) => ArrayCodeParams::new(r, p, slopes, global_parity),
                _ => {
                    return Err(usage(
                        "array needs one of: --r --k | --five-batch --p | --r --p --slopes [--global-parity]",
                    ))
                }
            }
            .map_err(usage)?;
            Descriptor::array(&params)
        }
        BuildFamily::Binary { base } => Descriptor::BinaryExpansion { base: Box::new(read_descriptor(&base)?) },
        BuildFamily::Replicated { copies, base } => {
            Descriptor::Replicated { copies, base: Box::new(read_descriptor(&base)?) }
        }
    };
    let code = descriptor.build().map_err(usage)?;
    eprintln!("{}", profile_line(&descriptor, code.as_ref()));
    emit(out, format!("{}\n", descriptor.to_json()).as_bytes())?;
    Ok(true)
}

fn profile_line(descriptor: &Descriptor, code: &dyn AvailabilityCode) -> String {
    let big_n = code.num_symbols() as i64;
    let n = Ratio::new(code.dimension() as i64, code.symbol_width() as i64);
    let mut line = format!(
        "{}: N={} n={} k={} redundancy={} rate={}",
        code.describe(),
        big_n,
        n,
        code.availability(),
        Ratio::from_integer(big_n) - n,
        n / big_n
    );
    if let Some(Ok(params)) = descriptor.mult_params() {
        let p = code_profile(&params);
        line += &format!(" distance>={}", p.distance_bound);
    }
    if let Descriptor::Array { p, .. } = descriptor {
        line += &format!(" p={p}");
    }
    line
}

fn certify(args: CertifyArgs, seed: u64) -> anyhow::Result<bool> {
    let descriptor = read_descriptor(&args.code)?;
    let code = descriptor.build().map_err(usage)?;
    info!("extracting generator matrix of {}", code.describe());
    let g = generator_of(code.as_ref(), seed)?;
    let (report, mode, k): (Report, &str, usize) = match args.mode {
        Mode::Pir => (certify_code_pir(code.as_ref(), &g)?, "pir", code.availability()),
        Mode::Batch => {
            let k = args.k.ok_or_else(|| usage("batch mode needs --k"))?;
            let requests = enumerate_requests(&code.targets(), k, args.limit, args.samples, seed);
            info!(
                "{} {} requests of size {k}",
                requests.requests.len(),
                if requests.exhaustive { "exhaustive" } else { "sampled" }
            );
            (certify_batch(&g, |r| code.plan_batch(r), &requests), "batch", k)
        }
    };
    debug!("{} of {} entries passed", report.passed(), report.total());
    if let Some(path) = &args.report {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        report.write_csv(file)?;
    }
    let summary = SummaryOut {
        code: code.describe(),
        mode,
        k,
        total: report.total(),
        passed: report.passed(),
        failed: report.failed(),
        seed,
        exhaustive: report.exhaustive,
    };
    let json = serde_json::to_string_pretty(&summary)? + "\n";
    if let Some(path) = &args.summary {
        fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{json}");
    for f in report.failures().take(5) {
        eprintln!("failed request {:?}: {}", f.request, f.detail);
    }
    Ok(report.all_passed())
}

fn roundtrip(path: &Path, zero: bool, seed: u64) -> anyhow::Result<bool> {
    let code = load(path)?;
    let message = if zero { vec![Elem(0); code.dimension()] } else { random_message(code.as_ref(), seed) };
    let word = code.encode(&message)?;
    let w = code.symbol_width();
    let (mut checked, mut mismatches) = (0usize, 0usize);
    for t in code.targets() {
        for set in code.pir_sets(t)? {
            let restricted = RestrictedWord::new(&word, w, set.iter().copied())?;
            let ok = matches!(code.recover(&restricted, t, &set), Ok(sym) if sym == word[t * w..(t + 1) * w]);
            if !ok {
                debug!("symbol {t} not recovered from {set:?}");
                mismatches += 1;
            }
            checked += 1;
        }
    }
    println!("{}: {checked} recoveries, {mismatches} mismatches, seed {seed}", code.describe());
    Ok(mismatches == 0)
}

fn random_message(code: &dyn AvailabilityCode, seed: u64) -> Vec<Elem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = code.field().order();
    (0..code.dimension()).map(|_| Elem(rng.gen_range(0..q))).collect()
}

fn read_descriptor(path: &Path) -> anyhow::Result<Descriptor> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Descriptor::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> anyhow::Result<Box<dyn AvailabilityCode>> {
    read_descriptor(path)?.build().map_err(usage)
}

fn parse_elems(text: &str) -> anyhow::Result<Vec<Elem>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().map(Elem).map_err(|_| usage(format!("not a field element: {t:?}"))))
        .collect()
}

fn join(v: &[Elem]) -> String {
    v.iter().map(|e| e.0.to_string()).collect::<Vec<_>>().join(",")
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}
