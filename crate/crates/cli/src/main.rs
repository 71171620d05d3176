//! `descramble`: forward primitives, trace generation, capture parsing, the
//! eavesdropper attack, and candidate scoring for the legacy 8-byte
//! challenge-response login.
//!
//! Exit codes: 0 success, 1 negative verification or an attack that ends
//! with no candidates, 2 usage, parse, or pipeline errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use descramble_cli::{capture_io, report, svg, write_atomic};
use descramble_core::{
    hash_password, run_attack, scramble, score_candidates, verify, AttackConfig, CandidateSet,
    HashHalves, ScrambleParams,
};

/// Real traffic XORs two 31-bit hash halves, so seeds stay below 2^31 even
/// though the strip geometry spans the full 2^32 square.
const TEXT_LOGIN_SEED_BOUND: u64 = 1 << 31;

#[derive(Parser)]
#[command(
    name = "descramble",
    about = "Cryptanalysis toolkit for the legacy 8-byte challenge-response login",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a password's hash halves as "h1:h2"
    Hash {
        /// Password text; whitespace inside is ignored by the hash
        password: String,
    },
    /// Print the response a client sends for a challenge
    Scramble {
        #[arg(long)]
        challenge: String,
        #[command(flatten)]
        secret: Secret,
    },
    /// Check a response against a password; exit 1 on mismatch
    Verify {
        #[arg(long)]
        challenge: String,
        /// Response as 16 hex digits
        #[arg(long)]
        response: String,
        #[command(flatten)]
        secret: Secret,
    },
    /// Write simulated login sessions for a known password
    Gen {
        #[arg(long)]
        password: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trace file to write
        #[arg(long)]
        out: PathBuf,
        /// Also write the sessions as a framed binary capture
        #[arg(long)]
        capture: Option<PathBuf>,
    },
    /// Convert a binary handshake capture into a trace file
    Parse {
        #[arg(long)]
        capture: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover password-hash candidates from an observed trace
    Attack {
        #[arg(long)]
        trace: PathBuf,
        /// Pairs inverted into polygon sets before cell filtering
        #[arg(long = "p1-pairs", default_value_t = 5)]
        p1_pairs: usize,
        /// Comma-separated descending cell-side exponents
        #[arg(long, default_value = "24,20,16,12")]
        cells: String,
        /// Max lattice points to extract; accepts "2^24" or a plain integer
        #[arg(long, default_value = "2^24")]
        budget: String,
        /// Candidates file to write, one "h1:h2" per line, sorted
        #[arg(long)]
        out: PathBuf,
        /// Directory for per-stage SVG drawings
        #[arg(long)]
        svg: Option<PathBuf>,
        /// JSON report path
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Score candidates against fresh random challenges
    Score {
        /// Candidates file, one "h1:h2" per line
        #[arg(long)]
        candidates: PathBuf,
        /// The true hash the scoreboard is judged against
        #[arg(long)]
        truth: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A password given either as text or directly as hash halves.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Secret {
    #[arg(long)]
    password: Option<String>,
    /// Hash halves "h1:h2" (the attack's output is enough to log in)
    #[arg(long)]
    hash: Option<String>,
}

impl Secret {
    fn resolve(&self) -> Result<HashHalves> {
        match (&self.password, &self.hash) {
            (Some(text), None) => Ok(hash_password(text.as_bytes())),
            (None, Some(literal)) => Ok(HashHalves::from_str(literal)?),
            _ => bail!("give exactly one of --password or --hash"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    let params = ScrambleParams::deployed();
    match command {
        Command::Hash { password } => {
            println!("{}", hash_password(password.as_bytes()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Scramble { challenge, secret } => {
            let hash = secret.resolve()?;
            let response = scramble(hash, hash_password(challenge.as_bytes()), &params);
            println!("{response}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            challenge,
            response,
            secret,
        } => {
            let hash = secret.resolve()?;
            let bytes = hex::decode(&response).context("response is not valid hex")?;
            if verify(hash, challenge.as_bytes(), &bytes, &params)? {
                println!("match");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("mismatch");
                Ok(ExitCode::from(1))
            }
        }
        Command::Gen {
            password,
            count,
            seed,
            out,
            capture,
        } => {
            let records = capture_io::generate_trace(password.as_bytes(), seed, count, &params);
            capture_io::write_trace(&out, &records)?;
            if let Some(path) = capture {
                let sessions: Vec<(String, capture_io::TraceRecord)> = records
                    .iter()
                    .map(|r| ("client".to_string(), *r))
                    .collect();
                capture_io::write_capture(&path, &sessions)?;
            }
            eprintln!("wrote {count} sessions to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Parse { capture, out } => {
            let sessions = capture_io::read_capture(&capture)?;
            let records: Vec<capture_io::TraceRecord> =
                sessions.into_iter().map(|(_, record)| record).collect();
            capture_io::write_trace(&out, &records)?;
            eprintln!("wrote {} sessions to {}", records.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Attack {
            trace,
            p1_pairs,
            cells,
            budget,
            out,
            svg,
            report,
        } => cmd_attack(
            &params,
            &trace,
            p1_pairs,
            &cells,
            &budget,
            &out,
            svg.as_deref(),
            report.as_deref(),
        ),
        Command::Score {
            candidates,
            truth,
            trials,
            seed,
        } => cmd_score(&params, &candidates, &truth, trials, seed),
    }
}

fn parse_cells(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| anyhow!("bad cell exponent {part:?}"))
        })
        .collect()
}

/// "2^24" or a plain integer.
fn parse_budget(text: &str) -> Result<u64> {
    if let Some(exponent) = text.strip_prefix("2^") {
        let e: u32 = exponent.parse().map_err(|_| anyhow!("bad budget {text:?}"))?;
        if e >= 64 {
            bail!("budget 2^{e} overflows");
        }
        return Ok(1 << e);
    }
    text.parse().map_err(|_| anyhow!("bad budget {text:?}"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_attack(
    params: &ScrambleParams,
    trace: &Path,
    p1_pairs: usize,
    cells: &str,
    budget: &str,
    out: &Path,
    svg_dir: Option<&Path>,
    report_path: Option<&Path>,
) -> Result<ExitCode> {
    let records = capture_io::read_trace(trace)?;
    let pairs: Vec<_> = records.iter().map(|r| r.to_pair()).collect();
    let config = AttackConfig {
        p1_pairs,
        cell_exponents: parse_cells(cells)?,
        sieve_budget: parse_budget(budget)?,
        stop_when_unique: true,
        seed_bound: Some(TEXT_LOGIN_SEED_BOUND),
    };
    let started = Instant::now();
    let result = run_attack(&pairs, &config, params)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let mut lines = String::new();
    for point in &result.candidates.points {
        lines.push_str(&point.to_string());
        lines.push('\n');
    }
    write_atomic(out, lines.as_bytes())?;

    if let Some(dir) = svg_dir {
        std::fs::create_dir_all(dir)?;
        for (index, sets) in result.polygon_sets.iter().enumerate() {
            let drawing = svg::render_polygons(
                sets.iter().flat_map(|set| set.polygons.iter()),
                params,
                &format!("pair {index}: seed-space polygon set"),
            );
            write_atomic(
                &dir.join(format!("pair-{index:02}-polygons.svg")),
                drawing.as_bytes(),
            )?;
        }
        for (round, pieces) in result.round_pieces.iter().enumerate() {
            let drawing = svg::render_polygons(
                pieces.iter().map(|piece| &piece.fragment),
                params,
                &format!("cell-filter round {round}: surviving fragments"),
            );
            write_atomic(
                &dir.join(format!("round-{round:02}-cells.svg")),
                drawing.as_bytes(),
            )?;
        }
    }

    if let Some(path) = report_path {
        let built = report::build(&result, &config, params, pairs.len(), wall_ms);
        write_atomic(path, report::to_json(&built).as_bytes())?;
    }

    eprintln!(
        "{} candidates (survived {} pairs) in {:.1}s; wrote {}",
        result.candidates.len(),
        result.candidates.pairs_survived,
        wall_ms / 1e3,
        out.display()
    );
    if result.candidates.is_empty() {
        eprintln!("no candidate survived: the trace is inconsistent with one password");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_score(
    params: &ScrambleParams,
    candidates_path: &Path,
    truth: &str,
    trials: usize,
    seed: u64,
) -> Result<ExitCode> {
    if trials == 0 {
        bail!("need at least one trial");
    }
    let truth = HashHalves::from_str(truth)?;
    let text = std::fs::read_to_string(candidates_path)
        .with_context(|| format!("reading {}", candidates_path.display()))?;
    let mut points = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let point = HashHalves::from_str(line)
            .with_context(|| format!("candidates line {}", index + 1))?;
        points.push(point);
    }
    let candidates = CandidateSet {
        points,
        pairs_survived: 0,
    };
    let rates = score_candidates(&candidates, &truth, trials, seed, params);
    for (point, rate) in candidates.points.iter().zip(rates) {
        println!("{point} {rate:.3}");
    }
    Ok(ExitCode::SUCCESS)
}
