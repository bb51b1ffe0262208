//! `qjw`: verify, prove, export and specialize the Jones-Wenzl projector
//! identities on `M(mu) (x) V1^{(x) n}`.
//!
//! Exit codes: 0 all claims pass, 1 a claim failed, 2 usage error,
//! 3 I/O error, 4 degenerate specialization.

use clap::{Parser, Subcommand, ValueEnum};
use num::{One, Signed, Zero};
use qjw::maps::{BlockExport, BlockedMap, CheckMode};
use qjw::operators::{parse_operator, Mutation};
use qjw::projectors::{ejw, jw, verify_jw, verify_lemmas, verify_theorem};
use qjw::prover::{prove_all, prove_commutation, ProveTarget};
use qjw::repmod::Gen;
use qjw::report::{all_pass, VerificationReport};
use qjw::scalar::{quantum_bracket, Rational};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_PASS: u8 = 0;
const EXIT_CLAIM_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qjw",
    version,
    about = "Exact Jones-Wenzl and extended Jones-Wenzl projector verifier for U_q(sl2)"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Report output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,

    /// Worker threads (also settable via QJW_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Deliberately defective variant driven by the soundness probes
    #[arg(long, global = true, hide = true, value_parser = parse_mutation)]
    mutation: Option<Mutation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Pretty,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the extended projector identities (classical ones with --jw)
    Verify {
        /// Number of V1 strands
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Highest weight level checked
        #[arg(long, default_value_t = 5)]
        depth: i64,
        /// Check the classical projector on strands alone
        #[arg(long)]
        jw: bool,
    },
    /// Export the classical projector blocks as JSON
    Jw {
        /// Number of V1 strands
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Highest level exported
        #[arg(long, default_value_t = 5)]
        depth: i64,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the extended projector blocks as JSON
    Ejw {
        /// Number of V1 strands
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Highest level exported
        #[arg(long, default_value_t = 5)]
        depth: i64,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a named operator's blocks as JSON
    Op {
        /// Identifier: coev, ev, e[i], ev[i], coev[i], E[c], F[c], E_tower[n], F_tower[n]
        name: String,
        /// Number of V1 strands in the ambient chain
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Highest level exported
        #[arg(long, default_value_t = 5)]
        depth: i64,
        /// Index/shift for bare names (e.g. `op ev --i 1` for the padded cap)
        #[arg(long)]
        i: Option<i64>,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the structural identities symbolically for a generic index
    Prove {
        /// Run every symbolic claim (the default)
        #[arg(long)]
        all: bool,
        /// Restrict to one intertwiner: E_mu or F_mu
        #[arg(long, conflicts_with = "all")]
        target: Option<String>,
        /// Restrict to one generator: K, E or F
        #[arg(long, requires = "target")]
        gen: Option<String>,
    },
    /// Re-run the verification suites with q and q^mu set to exact rationals
    Specialize {
        /// Number of V1 strands
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Highest weight level checked
        #[arg(long, default_value_t = 5)]
        depth: i64,
        /// Value for q, e.g. 3/2; anything but 0, 1, -1
        #[arg(long)]
        q0: Option<String>,
        /// Integer weight exponent; needs mu0 >= depth + n + 1
        #[arg(long)]
        mu0: Option<i64>,
        /// Draw missing q0/mu0 from a seeded generator
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    Mutation::parse(s).ok_or_else(|| {
        format!(
            "unknown mutation `{s}` (expected jw-sign-flip, drop-ejw-normalizer or perturb-f-mu)"
        )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads.or_else(threads_from_env) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .ok();
    }
    ExitCode::from(run(cli))
}

fn threads_from_env() -> Option<usize> {
    std::env::var("QJW_THREADS").ok()?.parse().ok()
}

fn usage(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn run(cli: Cli) -> u8 {
    let mutation = cli.mutation;
    match cli.command {
        Cmd::Verify { n, depth, jw } => {
            if n < 1 {
                return usage("--n must be at least 1");
            }
            if depth < 0 {
                return usage("--depth must be nonnegative");
            }
            let reports = if jw {
                verify_jw(n, &CheckMode::Exact, mutation)
            } else {
                verify_theorem(n, depth, &CheckMode::Exact, mutation)
            };
            finish_reports(&reports, cli.format)
        }
        Cmd::Jw { n, depth, out } => {
            if n < 1 {
                return usage("--n must be at least 1");
            }
            if depth < 0 {
                return usage("--depth must be nonnegative");
            }
            emit_blocks(&jw(n), depth, &out)
        }
        Cmd::Ejw { n, depth, out } => {
            if n < 1 {
                return usage("--n must be at least 1");
            }
            if depth < 0 {
                return usage("--depth must be nonnegative");
            }
            emit_blocks(&ejw(n), depth, &out)
        }
        Cmd::Op {
            name,
            n,
            depth,
            i,
            out,
        } => {
            if depth < 0 {
                return usage("--depth must be nonnegative");
            }
            match parse_operator(&name, n, i) {
                Ok(map) => emit_blocks(&map, depth, &out),
                Err(e) => usage(&e.to_string()),
            }
        }
        Cmd::Prove {
            all: _,
            target,
            gen,
        } => {
            let reports = match target {
                None => prove_all(mutation),
                Some(t) => {
                    let Some(target) = ProveTarget::parse(&t) else {
                        return usage(&format!("unknown target `{t}` (expected E_mu or F_mu)"));
                    };
                    let gens = match gen.as_deref() {
                        None => vec![Gen::K, Gen::E, Gen::F],
                        Some("K") => vec![Gen::K],
                        Some("E") => vec![Gen::E],
                        Some("F") => vec![Gen::F],
                        Some(g) => return usage(&format!("unknown generator `{g}`")),
                    };
                    gens.into_iter()
                        .map(|g| prove_commutation(target, g, mutation))
                        .collect()
                }
            };
            finish_reports(&reports, cli.format)
        }
        Cmd::Specialize {
            n,
            depth,
            q0,
            mu0,
            seed,
        } => {
            if n < 1 {
                return usage("--n must be at least 1");
            }
            if depth < 0 {
                return usage("--depth must be nonnegative");
            }
            run_specialize(n, depth, q0, mu0, seed, mutation, cli.format)
        }
    }
}

fn finish_reports(reports: &[VerificationReport], format: Format) -> u8 {
    match format {
        Format::Pretty => {
            for r in reports {
                println!("{}", r.pretty());
            }
        }
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(reports).expect("reports serialize")
            );
        }
    }
    if all_pass(reports) {
        EXIT_PASS
    } else {
        EXIT_CLAIM_FAILED
    }
}

fn emit_blocks(map: &BlockedMap, depth: i64, out: &Option<PathBuf>) -> u8 {
    let top = map.domain().max_level().map_or(depth, |max| max.min(depth));
    let blocks: Vec<BlockExport> = (0..=top).map(|level| map.export_block(level)).collect();
    let mut body = serde_json::to_string_pretty(&blocks).expect("blocks serialize");
    body.push('\n');
    match out {
        None => {
            print!("{body}");
            EXIT_PASS
        }
        Some(path) => match std::fs::write(path, body) {
            Ok(()) => EXIT_PASS,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                EXIT_IO
            }
        },
    }
}

fn parse_q0(text: &str) -> Result<Rational, String> {
    let q0: Rational = text
        .parse()
        .map_err(|_| format!("cannot parse `{text}` as a rational number"))?;
    if q0.is_zero() || q0.abs().is_one() {
        return Err("--q0 must avoid 0, 1 and -1".into());
    }
    Ok(q0)
}

/// A specialization is degenerate when any bracket that can appear in a
/// denominator vanishes at (q0, mu0).
fn degenerate(q0: &Rational, mu0: i64, n: usize, depth: i64) -> bool {
    let bound = n as i64 + depth + 1;
    for k in 1..=bound {
        for bracket in [quantum_bracket(0, 0, k), quantum_bracket(1, 0, k)] {
            match bracket.specialize(q0, mu0, 0) {
                Ok(v) if !v.is_zero() => {}
                _ => return true,
            }
        }
    }
    false
}

fn draw_q0(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let num: i64 = rng.gen_range(-9..=9);
        let den: i64 = rng.gen_range(1..=9);
        if num == 0 || num.abs() == den {
            continue;
        }
        return Rational::new(num.into(), den.into());
    }
}

fn run_specialize(
    n: usize,
    depth: i64,
    q0_text: Option<String>,
    mu0_given: Option<i64>,
    seed: Option<u64>,
    mutation: Option<Mutation>,
    format: Format,
) -> u8 {
    let fixed_q0 = match q0_text.as_deref().map(parse_q0) {
        Some(Ok(q0)) => Some(q0),
        Some(Err(msg)) => return usage(&msg),
        None => None,
    };
    if let Some(mu0) = mu0_given {
        if mu0 < depth + n as i64 + 1 {
            return usage(&format!(
                "--mu0 must be at least depth + n + 1 = {}",
                depth + n as i64 + 1
            ));
        }
    }
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    if fixed_q0.is_none() && rng.is_none() {
        return usage("provide --q0 or --seed");
    }
    let mu0_floor = (depth + n as i64 + 1).max(20);
    let attempts = if rng.is_some() && fixed_q0.is_none() {
        16
    } else {
        1
    };
    for attempt in 0..attempts {
        let q0 = match (&fixed_q0, &mut rng) {
            (Some(q0), _) => q0.clone(),
            (None, Some(rng)) => draw_q0(rng),
            (None, None) => unreachable!("validated above"),
        };
        let mu0 = mu0_given.unwrap_or_else(|| match &mut rng {
            Some(rng) => mu0_floor + rng.gen_range(0..=10),
            None => mu0_floor,
        });
        if degenerate(&q0, mu0, n, depth) {
            if attempt + 1 < attempts {
                continue;
            }
            eprintln!("error: specialization q0={q0}, mu0={mu0} hits a vanishing bracket");
            return EXIT_DEGENERATE;
        }
        eprintln!("specializing at q0={q0}, mu0={mu0}");
        let mode = CheckMode::Specialized { q0, mu0 };
        let mut reports = verify_jw(n, &mode, mutation);
        reports.extend(verify_theorem(n, depth, &mode, mutation));
        reports.extend(verify_lemmas(depth, &mode, mutation));
        return finish_reports(&reports, format);
    }
    unreachable!("loop always returns")
}
