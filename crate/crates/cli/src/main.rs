use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use mvnet::experiment::{run_experiment, write_csv, ExperimentConfig, ExperimentName};
use mvnet::{
    compile_term, decode_network, encode_network, eval_network, eval_term, extract_network_with,
    format_term, grid_witness, parse_term, pwl_witness, term_pwl, ExtractOptions, Logic, Scalar,
    Term, TermProgram,
};

#[derive(Parser)]
#[command(name = "mvnet", version, about = "Translate between ReLU networks and Łukasiewicz terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogicArg {
    Mv,
    Dmv,
    Rmv,
}

impl From<LogicArg> for Logic {
    fn from(l: LogicArg) -> Logic {
        match l {
            LogicArg::Mv => Logic::Mv,
            LogicArg::Dmv => Logic::Dmv,
            LogicArg::Rmv => Logic::Rmv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Breakpoints,
    Grid,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a term into a ReLU network file.
    Compile {
        #[arg(long)]
        term: String,
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract a term from a network file.
    Extract {
        #[arg(long)]
        network: PathBuf,
        #[arg(long, value_enum)]
        logic: LogicArg,
        #[arg(long)]
        max_lcm: Option<u64>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Evaluate a term or a network at a point.
    Eval {
        #[arg(long, conflicts_with = "network", required_unless_present = "network")]
        term: Option<String>,
        #[arg(long)]
        network: Option<PathBuf>,
        /// Comma-separated coordinates such as "1/2,1/3".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Check two terms for functional equivalence.
    Verify {
        #[arg(long)]
        term_a: String,
        #[arg(long)]
        term_b: String,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 29)]
        denominator: u64,
        #[arg(long, default_value_t = 300)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a length experiment and write its CSV report.
    Experiment {
        #[arg(long)]
        name: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        max_s: Option<u32>,
        #[arg(long)]
        max_len: Option<usize>,
    },
}

fn parse_any(text: &str) -> Result<Term> {
    parse_term(text, usize::MAX).with_context(|| format!("cannot parse term {text:?}"))
}

fn parse_point(text: &str) -> Result<Vec<Scalar>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Scalar>().map_err(anyhow::Error::from))
        .collect()
}

fn show(values: &[Scalar]) -> String {
    values.iter().map(Scalar::to_string).collect::<Vec<_>>().join(", ")
}

/// Returns whether the terms were found equivalent.
fn verify(a: &Term, b: &Term, mode: Mode, denominator: u64, samples: usize, seed: u64) -> Result<bool> {
    match mode {
        Mode::Breakpoints => {
            if a.max_var() > 1 || b.max_var() > 1 {
                bail!("breakpoint mode needs terms in x1 only; use --mode grid");
            }
            let (pa, pb) = (term_pwl(a)?, term_pwl(b)?);
            match pwl_witness(&pa, &pb) {
                None => Ok(true),
                Some(x) => {
                    println!("NOT EQUIVALENT at x1 = {x}: {} vs {}", pa.eval(&x), pb.eval(&x));
                    Ok(false)
                }
            }
        }
        Mode::Grid => {
            let dim = a.max_var().max(b.max_var()).max(1);
            let (pa, pb) = (TermProgram::new(a), TermProgram::new(b));
            let witness: Option<Vec<Scalar>> = if a.logic() == Logic::Rmv || b.logic() == Logic::Rmv {
                grid_witness::<f64>(|p| pa.eval(p), |p| pb.eval(p), dim, denominator, samples, seed)
                    .map(|p| p.into_iter().map(Scalar::real).collect())
            } else {
                grid_witness::<BigRational>(|p| pa.eval(p), |p| pb.eval(p), dim, denominator, samples, seed)
                    .map(|p| p.into_iter().map(Scalar::Rational).collect())
            };
            match witness {
                None => Ok(true),
                Some(p) => {
                    println!(
                        "NOT EQUIVALENT at ({}): {} vs {}",
                        show(&p),
                        eval_term(a, &p)?,
                        eval_term(b, &p)?
                    );
                    Ok(false)
                }
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Compile { term, arity, out } => {
            let t = parse_term(&term, arity).with_context(|| format!("cannot parse term {term:?}"))?;
            let net = compile_term(&t, arity)?;
            fs::write(&out, encode_network(&net))
                .with_context(|| format!("cannot write {}", out.display()))?;
        }
        Command::Extract {
            network,
            logic,
            max_lcm,
            eps,
        } => {
            let text = fs::read_to_string(&network)
                .with_context(|| format!("cannot read {}", network.display()))?;
            let net = decode_network(&text)?;
            let mut opts = ExtractOptions::default();
            if let Some(k) = max_lcm {
                opts.max_lcm = k;
            }
            if let Some(e) = eps {
                opts.eps = e;
            }
            let t = extract_network_with(&net, logic.into(), &opts)?;
            println!("{}", format_term(&t));
            println!("length {}", t.length());
        }
        Command::Eval {
            term,
            network,
            point,
        } => {
            let p = parse_point(&point)?;
            let values = match (term, network) {
                (Some(t), _) => vec![eval_term(&parse_any(&t)?, &p)?],
                (None, Some(path)) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("cannot read {}", path.display()))?;
                    eval_network(&decode_network(&text)?, &p)?
                }
                (None, None) => bail!("one of --term or --network is required"),
            };
            println!("{}", show(&values));
        }
        Command::Verify {
            term_a,
            term_b,
            mode,
            denominator,
            samples,
            seed,
        } => {
            let (a, b) = (parse_any(&term_a)?, parse_any(&term_b)?);
            if !verify(&a, &b, mode, denominator, samples, seed)? {
                return Ok(ExitCode::from(1));
            }
            println!("EQUIVALENT");
        }
        Command::Experiment {
            name,
            seed,
            out,
            trials,
            max_s,
            max_len,
        } => {
            let cfg = ExperimentConfig {
                name: name.parse::<ExperimentName>()?,
                seed,
                trials,
                max_s,
                max_len,
            };
            let start = Instant::now();
            let rows = run_experiment(&cfg)?;
            let file = fs::File::create(&out)
                .with_context(|| format!("cannot create {}", out.display()))?;
            write_csv(&rows, BufWriter::new(file))?;
            eprintln!(
                "{}: {} rows verified in {:.2}s",
                cfg.name,
                rows.len(),
                start.elapsed().as_secs_f64()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
