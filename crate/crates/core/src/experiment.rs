//! Length experiments: sawtooth networks, random terms in one and three
//! variables, and compositions of short random terms.
//!
//! Every row is checked for functional equivalence before it is reported;
//! a failed check aborts the run with the witness.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::compile::{build_sawtooth, compile_term, Architecture};
use crate::error::{Error, Result};
use crate::extract::extract_network;
use crate::oracle::{grid_witness, pwl_witness, term_pwl, Pwl1D};
use crate::term::{random_term_with, substitute, Logic, Term, TermProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentName {
    Sawtooth,
    Random1d,
    Compose,
    Random3d,
}

impl ExperimentName {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Sawtooth => "sawtooth",
            ExperimentName::Random1d => "random1d",
            ExperimentName::Compose => "compose",
            ExperimentName::Random3d => "random3d",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            ExperimentName::Sawtooth => 1,
            ExperimentName::Random3d => 100,
            ExperimentName::Random1d | ExperimentName::Compose => 500,
        }
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExperimentName> {
        match s {
            "sawtooth" => Ok(ExperimentName::Sawtooth),
            "random1d" => Ok(ExperimentName::Random1d),
            "compose" => Ok(ExperimentName::Compose),
            "random3d" => Ok(ExperimentName::Random3d),
            other => Err(Error::InvalidParameter(format!("unknown experiment {other:?}"))),
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Largest sawtooth depth accepted.
pub const MAX_SAWTOOTH_S: u32 = 12;
/// Shallow sawtooth networks are only extracted up to this `s`.
pub const MAX_SHALLOW_SAWTOOTH_S: u32 = 3;
pub const MAX_RANDOM1D_LEN: usize = 30;
pub const MAX_COMPOSE_S: u32 = 6;
pub const MAX_RANDOM3D_LEN: usize = 16;

/// Grid used to compare three-variable terms.
pub const GRID_DENOMINATOR: u64 = 29;
pub const GRID_SAMPLES: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    pub seed: u64,
    /// Trials per parameter value; defaults per experiment when `None`.
    pub trials: Option<usize>,
    /// Largest `s` for `sawtooth` (default 8) and `compose` (default 5).
    pub max_s: Option<u32>,
    /// Largest term length for `random1d` (default 14) and `random3d`
    /// (default 10).
    pub max_len: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(name: ExperimentName, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            name,
            seed,
            trials: None,
            max_s: None,
            max_len: None,
        }
    }
}

/// One verified measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub experiment: ExperimentName,
    /// `s` for sawtooth/compose, the sampled term length otherwise.
    pub param: u64,
    pub trial: usize,
    pub method: &'static str,
    /// Length of the source term, if there is one.
    pub input_length: Option<u64>,
    pub extracted_length: u64,
    /// Interior breakpoints (one-variable experiments only).
    pub breakpoints: Option<usize>,
}

pub const CSV_HEADER: &str =
    "experiment,param,trial,method,input_length,extracted_length,breakpoints,verdict";

impl Row {
    pub fn csv_line(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},EQUIVALENT",
            self.experiment,
            self.param,
            self.trial,
            self.method,
            opt(self.input_length.map(|v| v.to_string())),
            self.extracted_length,
            opt(self.breakpoints.map(|v| v.to_string())),
        )
    }
}

pub fn write_csv<W: Write>(rows: &[Row], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial, independent of scheduling.
pub fn trial_seed(master: u64, param: u64, trial: usize) -> u64 {
    mix(mix(master ^ mix(param)) ^ trial as u64)
}

/// The sawtooth `g_s` as breakpoints: 0 at even multiples of `2^-s`, 1 at odd ones.
pub fn sawtooth_pwl(s: u32) -> Pwl1D {
    let n = 1i64 << s;
    let pts = (0..=n)
        .map(|k| {
            (
                BigRational::new(BigInt::from(k), BigInt::from(n)),
                BigRational::from_integer(BigInt::from(k % 2)),
            )
        })
        .collect();
    Pwl1D::new(pts).expect("valid sawtooth")
}

fn check_1d(expected: &Pwl1D, got: &Term, what: &str) -> Result<usize> {
    let pwl = term_pwl(got)?;
    if let Some(x) = pwl_witness(expected, &pwl) {
        return Err(Error::NotEquivalent(format!(
            "{what}: values differ at x1 = {x} (expected {}, extracted {})",
            expected.eval(&x),
            pwl.eval(&x)
        )));
    }
    Ok(pwl.interior_breakpoints())
}

fn check_grid(expected: &Term, got: &Term, dim: usize, seed: u64, what: &str) -> Result<()> {
    let (a, b) = (TermProgram::new(expected), TermProgram::new(got));
    match grid_witness::<BigRational>(
        |p| a.eval(p),
        |p| b.eval(p),
        dim,
        GRID_DENOMINATOR,
        GRID_SAMPLES,
        seed,
    ) {
        None => Ok(()),
        Some(p) => {
            let shown: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            Err(Error::NotEquivalent(format!(
                "{what}: values differ at ({})",
                shown.join(", ")
            )))
        }
    }
}

/// Compiles `t`, extracts it back and verifies the result.
fn round_trip(t: &Term, arity: usize, seed: u64, what: &str) -> Result<(u64, Option<usize>)> {
    let net = compile_term(t, arity)?;
    let back = extract_network(&net, Logic::Mv)?;
    let breakpoints = if arity == 1 {
        Some(check_1d(&term_pwl(t)?, &back, what)?)
    } else {
        check_grid(t, &back, arity, seed, what)?;
        None
    };
    Ok((back.length(), breakpoints))
}

fn sawtooth_rows(max_s: u32) -> Result<Vec<Row>> {
    let mut jobs: Vec<(Architecture, u32)> = (1..=max_s).map(|s| (Architecture::Deep, s)).collect();
    jobs.extend((1..=max_s.min(MAX_SHALLOW_SAWTOOTH_S)).map(|s| (Architecture::Shallow, s)));
    jobs.into_par_iter()
        .map(|(arch, s)| {
            let method = match arch {
                Architecture::Deep => "deep-nn",
                Architecture::Shallow => "shallow-nn",
            };
            let t = extract_network(&build_sawtooth(arch, s)?, Logic::Mv)?;
            let bp = check_1d(&sawtooth_pwl(s), &t, &format!("sawtooth {method} s={s}"))?;
            Ok(Row {
                experiment: ExperimentName::Sawtooth,
                param: s as u64,
                trial: 0,
                method,
                input_length: None,
                extracted_length: t.length(),
                breakpoints: Some(bp),
            })
        })
        .collect()
}

fn random_rows(
    name: ExperimentName,
    params: Vec<u64>,
    trials: usize,
    seed: u64,
    make: impl Fn(&mut ChaCha8Rng, u64) -> (Term, usize) + Sync,
) -> Result<Vec<Row>> {
    let jobs: Vec<(u64, usize)> = params
        .iter()
        .flat_map(|&p| (0..trials).map(move |t| (p, t)))
        .collect();
    jobs.into_par_iter()
        .map(|(param, trial)| {
            let ts = trial_seed(seed, param, trial);
            let mut rng = ChaCha8Rng::seed_from_u64(ts);
            let (t, arity) = make(&mut rng, param);
            let what = format!("{name} param={param} trial={trial} term {t}");
            let (len, bp) = round_trip(&t, arity, ts, &what)?;
            Ok(Row {
                experiment: name,
                param,
                trial,
                method: "deep-nn",
                input_length: Some(t.length()),
                extracted_length: len,
                breakpoints: bp,
            })
        })
        .collect()
}

/// `τ_1 ∘ τ_2 ∘ … ∘ τ_s` for random one-variable terms of length 2 or 3.
pub fn random_composition<R: Rng + ?Sized>(rng: &mut R, s: u32) -> Term {
    let parts: Vec<Term> = (0..s)
        .map(|_| {
            let len = rng.gen_range(2..=3);
            random_term_with(rng, len, 1)
        })
        .collect();
    let mut acc = parts[parts.len() - 1].clone();
    for t in parts[..parts.len() - 1].iter().rev() {
        acc = substitute(t, &std::collections::HashMap::from([(1, acc)]));
    }
    acc
}

fn check_cap<T: PartialOrd + fmt::Display>(value: T, min: T, cap: T, what: &str) -> Result<T> {
    if value < min || value > cap {
        return Err(Error::InvalidParameter(format!(
            "{what} = {value} outside the supported range [{min}, {cap}]"
        )));
    }
    Ok(value)
}

/// Runs an experiment; rows are ordered by parameter, then trial, and do
/// not depend on the number of worker threads.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    let trials = cfg.trials.unwrap_or(cfg.name.default_trials());
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    match cfg.name {
        ExperimentName::Sawtooth => {
            let max_s = check_cap(cfg.max_s.unwrap_or(8), 1, MAX_SAWTOOTH_S, "max-s")?;
            sawtooth_rows(max_s)
        }
        ExperimentName::Random1d => {
            let max_len = check_cap(cfg.max_len.unwrap_or(14), 4, MAX_RANDOM1D_LEN, "max-len")?;
            random_rows(cfg.name, (4..=max_len as u64).collect(), trials, cfg.seed, |rng, len| {
                (random_term_with(rng, len as usize, 1), 1)
            })
        }
        ExperimentName::Compose => {
            let max_s = check_cap(cfg.max_s.unwrap_or(5), 1, MAX_COMPOSE_S, "max-s")?;
            random_rows(cfg.name, (1..=max_s as u64).collect(), trials, cfg.seed, |rng, s| {
                (random_composition(rng, s as u32), 1)
            })
        }
        ExperimentName::Random3d => {
            let max_len = check_cap(cfg.max_len.unwrap_or(10), 4, MAX_RANDOM3D_LEN, "max-len")?;
            random_rows(cfg.name, (4..=max_len as u64).collect(), trials, cfg.seed, |rng, len| {
                (random_term_with(rng, len as usize, 3), 3)
            })
        }
    }
}
