//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits nonzero if any fails.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mvnet::experiment::sawtooth_pwl;
use mvnet::{
    build_sawtooth, compile_term, extract_network, extract_network_detailed,
    extract_neuron_integer, extract_neuron_rational, extract_neuron_real, format_term,
    grid_equal, min_max_encode, parse_term, pwl_equal, random_term, relu_to_crelu,
    sample_term_pwl, substitute, term_pwl, validate_network, Activation, AffineRow,
    Architecture, ExtractOptions, Logic, MinMax, Network, OutputActivation, Scalar, Term,
    TermProgram,
};

type Q = BigRational;

fn q(p: i64, d: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(d))
}

fn qi(p: i64) -> Q {
    Q::from_integer(BigInt::from(p))
}

fn sigma(x: &Q) -> Q {
    x.clone().max(Q::zero()).min(Q::one())
}

fn oplus(x: &Q, y: &Q) -> Q {
    (x + y).min(Q::one())
}

fn odot(x: &Q, y: &Q) -> Q {
    (x + y - Q::one()).max(Q::zero())
}

fn sigma_f(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn random_point<R: Rng>(rng: &mut R, n: usize, max_den: i64) -> Vec<Q> {
    (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=max_den);
            q(rng.gen_range(0..=d), d)
        })
        .collect()
}

fn affine(m: &[Q], b: &Q, p: &[Q]) -> Q {
    m.iter().zip(p).fold(b.clone(), |acc, (c, x)| acc + c * x)
}

fn phi_g() -> Network {
    Network::new(
        1,
        vec![
            vec![AffineRow::ints(&[2], 0), AffineRow::ints(&[2], -1)],
            vec![AffineRow::ints(&[1, -2], 0)],
        ],
        Activation::Relu,
        OutputActivation::Same,
    )
    .unwrap()
}

fn equal_on_grid(a: &Term, b: &Term, dim: usize, den: u64, samples: usize, seed: u64) -> bool {
    let (pa, pb) = (TermProgram::new(a), TermProgram::new(b));
    grid_equal::<Q>(|p| pa.eval(p), |p| pb.eval(p), dim, den, samples, seed)
}

fn ac1() -> String {
    let neuron = |m: &[i64], b: i64| format_term(&extract_neuron_integer(&AffineRow::ints(m, b)).unwrap());
    assert_eq!(neuron(&[1, -1, 1], -1), "x1 * (x3 * ~x2)");
    let single = Network::new(
        3,
        vec![vec![AffineRow::ints(&[1, -1, 1], -1)]],
        Activation::Crelu,
        OutputActivation::Same,
    )
    .unwrap();
    assert_eq!(format_term(&extract_network(&single, Logic::Mv).unwrap()), "x1 * (x3 * ~x2)");

    let e16 = neuron(&[2], 0);
    let e17 = neuron(&[2], -1);
    let e18 = neuron(&[1, -1], 0);
    assert_eq!(e16, "x1 + x1");
    assert_eq!(e17, "x1 * x1");
    assert_eq!(e18, "x1 * ~x2");

    let psi = relu_to_crelu(&phi_g()).unwrap();
    let e19 = format_term(&extract_network(&psi, Logic::Mv).unwrap());
    assert_eq!(e19, "(x1 + x1) * ~(x1 * x1)");
    assert_eq!(format_term(&extract_network(&phi_g(), Logic::Mv).unwrap()), e19);

    let by_sub = substitute(
        &parse_term(&e18, 2).unwrap(),
        &HashMap::from([
            (1, parse_term(&e16, 1).unwrap()),
            (2, parse_term(&e17, 1).unwrap()),
        ]),
    );
    assert_eq!(format_term(&by_sub), e19);
    format!("{e16} | {e17} | {e18} | {e19}")
}

fn ac2() -> String {
    let mut lengths = Vec::new();
    for s in 1..=8u32 {
        let t = extract_network(&build_sawtooth(Architecture::Deep, s).unwrap(), Logic::Mv).unwrap();
        assert_eq!(t.length(), 4u64.pow(s), "deep length at s={s}");
        let reference = sawtooth_pwl(s);
        if s <= 5 {
            let sampled = sample_term_pwl(&t, t.length()).unwrap();
            assert!(pwl_equal(&sampled, &reference), "breakpoint oracle at s={s}");
        } else {
            let den = 1i64 << (s + 1);
            let prog = TermProgram::new(&t);
            for k in 0..=den {
                let x = q(k, den);
                assert_eq!(prog.eval(std::slice::from_ref(&x)), reference.eval(&x), "g_{s}({x})");
            }
        }
        lengths.push(t.length());
    }
    format!("lengths {lengths:?}")
}

fn ac3() -> String {
    let mut report = Vec::new();
    for s in 1..=3u32 {
        let net = build_sawtooth(Architecture::Shallow, s).unwrap();
        let ex = extract_network_detailed(&net, Logic::Mv, &ExtractOptions::default()).unwrap();
        for layer in &ex.layers {
            for n in layer {
                let m: i64 = n.row.coeffs.iter().map(|c| c.to_exact().unwrap().abs().to_integer().to_i64().unwrap()).sum();
                if m < 63 {
                    assert!(n.term.length() < 1u64 << m, "per-neuron bound at s={s}");
                }
            }
        }
        let len = ex.term.length();
        if s >= 2 {
            assert!(len > 4u64.pow(s), "shallow not longer than deep at s={s}");
        }
        assert!(len <= 1u64 << (1u32 << (s + 1)), "envelope at s={s}");
        assert!(pwl_equal(&term_pwl(&ex.term).unwrap(), &sawtooth_pwl(s)), "equivalence at s={s}");
        report.push(len);
    }
    format!("shallow lengths {report:?} vs deep [4, 16, 64]")
}

fn ac4() -> String {
    let mut means = Vec::new();
    let mut ratios = Vec::new();
    for len in 4..=14usize {
        let mut total = 0u64;
        for trial in 0..500u64 {
            let t = random_term(len, 1, (len as u64) << 32 | trial);
            let back = extract_network(&compile_term(&t, 1).unwrap(), Logic::Mv).unwrap();
            let a = sample_term_pwl(&t, t.length()).unwrap();
            let b = sample_term_pwl(&back, back.length().max(1)).unwrap();
            assert!(pwl_equal(&a, &b), "round trip of {} gave {}", format_term(&t), format_term(&back));
            total += back.length();
            ratios.push(back.length() as f64 / t.length() as f64);
        }
        means.push(format!("{len}:{:.2}", total as f64 / 500.0));
    }
    ratios.sort_by(f64::total_cmp);
    let median = ratios[ratios.len() / 2];
    assert!(median <= 2.0, "median length ratio {median}");
    format!("5500/5500 equivalent, median ratio {median:.2}, mean extracted length {}", means.join(" "))
}

fn ac5() -> String {
    let mut count = 0;
    for len in 4..=10usize {
        for trial in 0..100u64 {
            let seed = 0xA5 << 40 | (len as u64) << 32 | trial;
            let t = random_term(len, 3, seed);
            let back = extract_network(&compile_term(&t, 3).unwrap(), Logic::Mv).unwrap();
            assert!(
                equal_on_grid(&t, &back, 3, 29, 300, seed),
                "3-variable round trip of {} gave {}",
                format_term(&t),
                format_term(&back)
            );
            count += 1;
        }
    }
    format!("{count}/{count} equivalent on the denominator-29 grid")
}

fn ac6() -> String {
    const N: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // σ(f) = (σ(f∘) ⊕ x1) ⊙ σ(f∘ + 1), f∘ = f - x1; plus extraction and its length bound
    for _ in 0..N {
        let n = rng.gen_range(1..=4);
        let mut m: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
        m[0] = rng.gen_range(1..=5);
        let b = rng.gen_range(-5..=5);
        let p = random_point(&mut rng, n, 20);
        let mq: Vec<Q> = m.iter().map(|&c| qi(c)).collect();
        let f = affine(&mq, &qi(b), &p);
        let f0 = &f - &p[0];
        let rhs = odot(&oplus(&sigma(&f0), &p[0]), &sigma(&(&f0 + Q::one())));
        assert_eq!(sigma(&f), rhs, "peeling identity for {m:?}, {b}");
        let t = extract_neuron_integer(&AffineRow::ints(&m, b)).unwrap();
        assert_eq!(TermProgram::new(&t).eval(&p), sigma(&f), "extraction of {m:?}, {b}");
        let total: i64 = m.iter().map(|c| c.abs()).sum();
        assert!(t.length() < 1u64 << total);
    }

    // real case: σ(f) = (σ(f∘) ⊕ m·x1) ⊙ σ(f∘ + 1), m ∈ (0, 1]
    for _ in 0..N {
        let n = rng.gen_range(1..=4);
        let mut m: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        m[0] = 1.0 - rng.gen::<f64>();
        let b = rng.gen_range(-4.0..4.0);
        let p: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let f: f64 = b + m.iter().zip(&p).map(|(c, x)| c * x).sum::<f64>();
        let f0 = f - m[0] * p[0];
        let rhs = (sigma_f(f0) + m[0] * p[0]).min(1.0) + sigma_f(f0 + 1.0) - 1.0;
        assert!((sigma_f(f) - rhs.max(0.0)).abs() <= 1e-9, "real peeling identity");
    }

    // s·σ(x) = Σ_{i<s} σ(s·x - i)
    let mut checks = 0;
    for s in 2..=12i64 {
        for _ in 0..1000 {
            let d = rng.gen_range(1..=50);
            let x = q(rng.gen_range(-d..=2 * d), d);
            let sum = (0..s).fold(Q::zero(), |acc, i| acc + sigma(&(qi(s) * &x - qi(i))));
            assert_eq!(qi(s) * sigma(&x), sum);
            checks += 1;
        }
    }
    assert!(checks >= N);

    let x = |i| Term::var(i);
    let min = TermProgram::new(&min_max_encode(MinMax::Min, x(1), x(2)));
    let max = TermProgram::new(&min_max_encode(MinMax::Max, x(1), x(2)));
    for _ in 0..N {
        let p = random_point(&mut rng, 2, 30);
        assert_eq!(min.eval(&p), p[0].clone().min(p[1].clone()));
        assert_eq!(max.eval(&p), p[0].clone().max(p[1].clone()));
    }

    let axioms = [
        ("x1 + (x2 + x3)", "(x1 + x2) + x3"),
        ("x1 + x2", "x2 + x1"),
        ("x1 + 0", "x1"),
        ("~~x1", "x1"),
        ("x1 + ~0", "~0"),
        ("~(~x1 + x2) + x2", "~(~x2 + x1) + x1"),
    ];
    for (lhs, rhs) in axioms {
        let l = TermProgram::new(&parse_term(lhs, 3).unwrap());
        let r = TermProgram::new(&parse_term(rhs, 3).unwrap());
        for _ in 0..N {
            let p = random_point(&mut rng, 3, 30);
            assert_eq!(l.eval(&p), r.eval(&p), "{lhs} = {rhs}");
        }
    }
    format!("{N} checks each: integer peeling, real peeling, min/max, 6 axioms; {checks} sσ checks")
}

fn random_relu_network<R: Rng>(rng: &mut R) -> Network {
    let n = rng.gen_range(1..=3);
    let depth = rng.gen_range(1..=3);
    let mut width = n;
    let mut layers = Vec::new();
    for l in 0..depth {
        let out = if l + 1 == depth { 1 } else { rng.gen_range(1..=4) };
        layers.push(
            (0..out)
                .map(|_| {
                    let m: Vec<i64> = (0..width).map(|_| rng.gen_range(-3..=3)).collect();
                    AffineRow::ints(&m, rng.gen_range(-3..=3))
                })
                .collect(),
        );
        width = out;
    }
    Network::new(n, layers, Activation::Relu, OutputActivation::Identity).unwrap()
}

fn ac7() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut accepted, mut attempts) = (0, 0);
    while accepted < 200 {
        attempts += 1;
        assert!(attempts < 100_000, "could not generate range-validated networks");
        let mut net = random_relu_network(&mut rng);
        let bounds = validate_network(&net, true).output_bounds.unwrap();
        let hi = bounds[0].upper.to_exact().unwrap();
        let shift = Q::one() - hi;
        let last = net.layers.last_mut().unwrap();
        let bias = last[0].bias.to_exact().unwrap() + shift;
        last[0].bias = Scalar::int(bias.to_integer().to_i64().unwrap());
        if !validate_network(&net, true).is_clean() {
            continue;
        }
        accepted += 1;
        let lowered = relu_to_crelu(&net).unwrap();
        assert_eq!(lowered.activation, Activation::Crelu);
        let grid: Vec<Q> = (0..=7).map(|k| q(k, 7)).collect();
        let mut idx = vec![0usize; net.input_dim];
        loop {
            let p: Vec<Scalar> = idx.iter().map(|&i| Scalar::Rational(grid[i].clone())).collect();
            assert_eq!(
                mvnet::eval_network(&net, &p).unwrap(),
                mvnet::eval_network(&lowered, &p).unwrap()
            );
            let Some(k) = idx.iter().position(|&i| i < 7) else { break };
            idx[k] += 1;
            idx[..k].iter_mut().for_each(|i| *i = 0);
        }
    }
    let psi = relu_to_crelu(&phi_g()).unwrap();
    assert_eq!(
        psi.layers,
        vec![
            vec![AffineRow::ints(&[2], 0), AffineRow::ints(&[2], -1)],
            vec![AffineRow::ints(&[1, -1], 0)],
        ]
    );
    format!("200 networks ({attempts} generated) agree with their lowering; Psi_g weights exact")
}

fn ac8() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let opts = ExtractOptions::default();
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let den = rng.gen_range(1..=12);
        let m: Vec<Q> = (0..n).map(|_| q(rng.gen_range(-2 * den..=2 * den), den)).collect();
        let b = q(rng.gen_range(-2 * den..=2 * den), den);
        let row = AffineRow::new(
            m.iter().map(|c| Scalar::Rational(c.clone())).collect(),
            Scalar::Rational(b.clone()),
        );
        let prog = TermProgram::new(&extract_neuron_rational(&row, &opts).unwrap());
        for _ in 0..100 {
            let p = random_point(&mut rng, n, 12);
            assert_eq!(prog.eval(&p), sigma(&affine(&m, &b, &p)), "rational row {row:?}");
        }
    }
    let mut worst = 0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let m: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..=4.0)).collect();
        let b = rng.gen_range(-4.0..=4.0);
        let prog = TermProgram::new(&extract_neuron_real(&AffineRow::reals(&m, b), &opts).unwrap());
        for _ in 0..100 {
            let p: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            let want = sigma_f(b + m.iter().zip(&p).map(|(c, x)| c * x).sum::<f64>());
            let err = (prog.eval(&p) - want).abs();
            worst = worst.max(err);
            assert!(err <= 1e-9, "real row {m:?}, {b}: error {err}");
        }
    }
    let example = format_term(
        &extract_neuron_real(&AffineRow::reals(&[std::f64::consts::FRAC_1_SQRT_2, -2.0], 0.0), &opts)
            .unwrap(),
    );
    let factor = example
        .strip_prefix('s')
        .and_then(|r| r.strip_suffix("(x1) * ~(x2 + x2)"))
        .expect("shape of the worked example");
    assert!((factor.parse::<f64>().unwrap() - 0.5f64.sqrt()).abs() <= 1e-12);
    format!("1000 rational + 1000 real neurons, max real error {worst:.1e}; {example}")
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    run: fn() -> String,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: "AC1", title: "worked examples", budget: Duration::from_secs(1), run: ac1 },
        Criterion { id: "AC2", title: "deep sawtooth lengths", budget: Duration::from_secs(10), run: ac2 },
        Criterion { id: "AC3", title: "shallow sawtooth dichotomy", budget: Duration::from_secs(30), run: ac3 },
        Criterion { id: "AC4", title: "1-D round trip", budget: Duration::from_secs(60), run: ac4 },
        Criterion { id: "AC5", title: "3-variable round trip", budget: Duration::from_secs(30), run: ac5 },
        Criterion { id: "AC6", title: "identity suites", budget: Duration::from_secs(10), run: ac6 },
        Criterion { id: "AC7", title: "ReLU to CReLU lowering", budget: Duration::from_secs(20), run: ac7 },
        Criterion { id: "AC8", title: "rational and real neurons", budget: Duration::from_secs(20), run: ac8 },
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let default_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_empty() || only.iter().any(|o| o == c.id)) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => {
                let note = if elapsed > c.budget { " (over time budget)" } else { "" };
                println!("{} PASS {} [{:.2}s]{}: {}", c.id, c.title, elapsed.as_secs_f64(), note, detail);
            }
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("{} FAIL {} [{:.2}s]: {}", c.id, c.title, elapsed.as_secs_f64(), msg);
            }
        }
    }
    std::panic::set_hook(default_hook);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
