use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rootcong::arith::factorize;
use rootcong::classifier::{classify_with, scan, ClassifyOptions};
use rootcong::congruence::sum_valuation;
use rootcong::cyclotomic::verify_averaging_identity;
use rootcong::{Verdict, DEFAULT_N0};
use rootcong_cli::{RecordWriter, ReportRecord, ScanFormat};

const EX_USAGE: u8 = 64;
const EX_CANTCREAT: u8 = 73;
const EX_IOERR: u8 = 74;

/// Scans are classified in blocks of this many moduli so output streams.
const SCAN_BLOCK: u64 = 256;

#[derive(Parser)]
#[command(name = "rootcong", version, about = "Averaged binomial congruences over roots of unity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide C_t for one modulus d.
    Classify {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = DEFAULT_N0, allow_hyphen_values = true)]
        n0: i64,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
        /// Seconds allowed for the direct check.
        #[arg(long, default_value_t = 900)]
        budget_secs: u64,
    },
    /// Classify every d in dmin..=dmax.
    Scan {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        dmin: u64,
        #[arg(long)]
        dmax: u64,
        #[arg(long, env = "CONGRUENCE_JOBS", default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ScanFormat::Json)]
        format: ScanFormat,
        #[arg(long, default_value_t = DEFAULT_N0, allow_hyphen_values = true)]
        n0: i64,
        #[arg(long, default_value_t = 900)]
        budget_secs: u64,
        /// Report elapsed_ms as 0 so output is byte-for-byte reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Report the valuation of the averaged excess at one c, per prime divisor of d.
    Witness {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        c: u64,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_N0, allow_hyphen_values = true)]
        n0: i64,
    },
    /// Check the averaging identity on random (c, n) samples.
    VerifyLemma {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        cmax: u64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples n uniformly from [-nmax, nmax].
        #[arg(long, default_value_t = 40)]
        nmax: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    Json,
    Text,
}

enum Failure {
    Usage(String),
    CantCreate(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EX_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EX_USAGE)
        }
        Err(Failure::CantCreate(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EX_CANTCREAT)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EX_IOERR)
        }
    }
}

fn positive(name: &str, v: u64) -> Result<(), Failure> {
    if v == 0 {
        return Err(Failure::Usage(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn options(n0: i64, budget_secs: u64) -> ClassifyOptions {
    ClassifyOptions {
        n0,
        budget: Some(Duration::from_secs(budget_secs)),
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Classify {
            t,
            d,
            n0,
            format,
            budget_secs,
        } => {
            positive("t", t)?;
            positive("d", d)?;
            let result = classify_with(t, d, &options(n0, budget_secs))
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let record = ReportRecord::from(&result);
            let mut out = io::stdout().lock();
            match format {
                TextFormat::Json => {
                    serde_json::to_writer(&mut out, &record).map_err(io::Error::other)?;
                    writeln!(out)?;
                }
                TextFormat::Text => write_text(&mut out, &result, &record)?,
            }
            Ok(ExitCode::from(match result.verdict {
                Verdict::Holds => 0,
                Verdict::Fails => 1,
                Verdict::Undecided => 2,
            }))
        }
        Command::Scan {
            t,
            dmin,
            dmax,
            jobs,
            out,
            format,
            n0,
            budget_secs,
            no_timing,
        } => {
            positive("t", t)?;
            positive("dmin", dmin)?;
            positive("jobs", jobs as u64)?;
            if dmin > dmax {
                return Err(Failure::Usage(format!("--dmin {dmin} exceeds --dmax {dmax}")));
            }
            let sink: Box<dyn Write> = match &out {
                Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
                    Failure::CantCreate(format!("cannot create {}: {e}", path.display()))
                })?)),
                None => Box::new(io::stdout().lock()),
            };
            let mut writer = RecordWriter::new(sink, format)?;
            let opts = options(n0, budget_secs);
            let mut lo = dmin;
            loop {
                let hi = lo.saturating_add(SCAN_BLOCK - 1).min(dmax);
                let block = scan(t, lo, hi, jobs, &opts).map_err(|e| Failure::Usage(e.to_string()))?;
                for r in &block {
                    let mut record = ReportRecord::from(r);
                    if no_timing {
                        record.elapsed_ms = 0;
                    }
                    writer.write(&record)?;
                }
                writer.flush()?;
                if hi == dmax {
                    break;
                }
                lo = hi + 1;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Witness {
            t,
            d,
            c,
            prime,
            n0,
        } => {
            positive("t", t)?;
            positive("d", d)?;
            if c >= d {
                return Err(Failure::Usage(format!("--c {c} must be below --d {d}")));
            }
            let fact = factorize(d).map_err(|e| Failure::Usage(e.to_string()))?;
            let primes: Vec<(u64, u32)> = match prime {
                Some(p) if fact.exponent_of(p) > 0 => vec![(p, fact.exponent_of(p))],
                Some(p) => return Err(Failure::Usage(format!("{p} is not a prime divisor of {d}"))),
                None => fact.factors().to_vec(),
            };
            let mut out = io::stdout().lock();
            for (p, r) in primes {
                let found = sum_valuation(t, d, c, n0, p).map_err(|e| Failure::Usage(e.to_string()))?;
                let ok = found.at_least(r as i64);
                writeln!(out, "p={p} found={found} required={r} satisfied={ok}")?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyLemma {
            t,
            d,
            cmax,
            trials,
            seed,
            nmax,
        } => {
            positive("t", t)?;
            positive("d", d)?;
            positive("trials", trials)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = io::stdout().lock();
            for _ in 0..trials {
                let c = rng.gen_range(0..=cmax);
                let n = rng.gen_range(-nmax.abs()..=nmax.abs());
                if !verify_averaging_identity(t, n, d, c) {
                    writeln!(out, "counterexample: t={t} d={d} c={c} n={n}")?;
                    return Ok(ExitCode::FAILURE);
                }
            }
            writeln!(out, "verified {trials} instances (t={t}, d={d}, c<={cmax}, seed={seed})")?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn write_text(
    out: &mut impl Write,
    result: &rootcong::ClassificationResult,
    record: &ReportRecord,
) -> io::Result<()> {
    writeln!(out, "t={} d={} verdict={}", record.t, record.d, record.verdict.as_str())?;
    writeln!(out, "decided by {}", record.decisive_criterion)?;
    if let (Some(c), Some(p), Some(found), Some(required)) = (
        record.witness_c,
        record.witness_prime,
        record.found_valuation,
        record.required_valuation,
    ) {
        writeln!(out, "witness c={c} p={p} found={found} required={required}")?;
    }
    let trail: Vec<String> = result
        .provenance
        .iter()
        .map(|v| format!("{}:{}", v.criterion.id(), outcome_name(v.outcome)))
        .collect();
    writeln!(out, "consulted {}", trail.join(" "))?;
    writeln!(out, "elapsed {} ms", record.elapsed_ms)
}

fn outcome_name(o: rootcong::Outcome) -> &'static str {
    match o {
        rootcong::Outcome::Holds => "holds",
        rootcong::Outcome::Fails => "fails",
        rootcong::Outcome::Inconclusive => "inconclusive",
    }
}
