//! Network-to-term extraction.
//!
//! ReLU networks are first lowered to CReLU networks ([`relu_to_crelu`]).
//! Every CReLU neuron `σ(m·x + b)` then gets a term over the previous layer's
//! outputs, and the per-layer terms are composed by substitution.

mod lower;
mod neuron;

use std::collections::HashMap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::network::{
    output_preactivation_bounds, Activation, AffineRow, Dense, Network, OutputActivation,
};
use crate::scalar::{Number, Scalar, ScalarKind};
use crate::term::{simplify, Logic, Substituter, Term};

pub(crate) use lower::lower_dense;
pub use lower::relu_to_crelu;
use neuron::{real_entries, IntMemo, RealMemo};
pub use neuron::{
    extract_neuron_integer, extract_neuron_rational, extract_neuron_real, ExtractOptions,
};

/// One CReLU neuron of the lowered network and its term over the previous
/// layer's outputs `x1, x2, …`.
#[derive(Debug, Clone)]
pub struct NeuronTerm {
    pub row: AffineRow,
    pub term: Term,
}

/// Result of [`extract_network_detailed`].
#[derive(Debug, Clone)]
pub struct Extraction {
    pub term: Term,
    /// The CReLU network the terms were read from.
    pub lowered: Network,
    /// Per-layer neuron terms in local variables.
    pub layers: Vec<Vec<NeuronTerm>>,
}

fn logic_of(kind: ScalarKind) -> Logic {
    match kind {
        ScalarKind::Integer => Logic::Mv,
        ScalarKind::Rational => Logic::Dmv,
        ScalarKind::Real => Logic::Rmv,
    }
}

/// Term whose function equals the network function on `[0,1]^n`.
pub fn extract_network(net: &Network, logic: Logic) -> Result<Term> {
    extract_network_with(net, logic, &ExtractOptions::default())
}

pub fn extract_network_with(net: &Network, logic: Logic, opts: &ExtractOptions) -> Result<Term> {
    Ok(extract_network_detailed(net, logic, opts)?.term)
}

/// Extraction keeping the lowered network and the per-neuron terms.
pub fn extract_network_detailed(
    net: &Network,
    logic: Logic,
    opts: &ExtractOptions,
) -> Result<Extraction> {
    net.check_shape()?;
    if logic < logic_of(net.scalar_kind) {
        return Err(Error::UnsupportedLogic {
            logic: logic.to_string(),
            kind: net.scalar_kind.to_string(),
        });
    }
    if net.output_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: net.output_dim(),
        });
    }
    let lowered = match net.activation {
        Activation::Relu => relu_to_crelu(net)?,
        Activation::Crelu => net.clone(),
    };
    if lowered.output_activation == OutputActivation::Identity {
        check_output_range(&lowered, opts.eps)?;
    }

    let mut int_memo = IntMemo::default();
    let mut real_memo = RealMemo::new(opts.eps);
    let mut layers = Vec::with_capacity(lowered.depth());
    for rows in &lowered.layers {
        let terms = rows
            .iter()
            .map(|row| {
                let term = match net.scalar_kind {
                    ScalarKind::Integer | ScalarKind::Rational => {
                        neuron::rational_with(row, opts, &mut int_memo)?
                    }
                    ScalarKind::Real => {
                        let (m, b) = real_entries(row, opts)?;
                        real_memo.extract(&m, b)
                    }
                };
                Ok(NeuronTerm {
                    row: row.clone(),
                    term,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        layers.push(terms);
    }

    let mut below: Vec<Term> = layers[0].iter().map(|n| n.term.clone()).collect();
    for layer in &layers[1..] {
        let bindings: HashMap<usize, Term> = below
            .iter()
            .enumerate()
            .map(|(j, t)| (j + 1, t.clone()))
            .collect();
        let mut sub = Substituter::new(bindings);
        below = layer.iter().map(|n| sub.apply(&n.term)).collect();
    }
    Ok(Extraction {
        term: simplify(&below[0]),
        lowered,
        layers,
    })
}

/// Ensures that an affine output stays in `[0,1]`, so that reading it as
/// `σ(output)` changes nothing.
///
/// Interval bounds (exact for one input) decide most cases. When they are
/// inconclusive for several inputs the output is evaluated on a grid, and
/// only a witnessed excursion is reported.
fn check_output_range(net: &Network, eps: f64) -> Result<()> {
    fn run<N: Number>(net: &Network, eps: f64) -> Result<()> {
        let dense: Dense<N> = net.dense();
        let (lo, hi) = output_preactivation_bounds(&dense).pop().expect("one output");
        let tol = if N::EXACT { 0.0 } else { eps };
        let inside = lo.to_scalar() >= Scalar::real(-tol) && hi.to_scalar() <= Scalar::real(1.0 + tol);
        if inside {
            return Ok(());
        }
        let violation = |lo: &N, hi: &N| Error::RangeViolation {
            lower: lo.to_string(),
            upper: hi.to_string(),
        };
        if dense.input_dim == 1 {
            return Err(violation(&lo, &hi));
        }
        let per_axis = (4096f64.powf(1.0 / dense.input_dim as f64).floor() as u64).max(2) - 1;
        let coords: Vec<N> = (0..=per_axis)
            .map(|a| N::from_scalar(&Scalar::ratio(a as i64, per_axis as i64)))
            .collect();
        let mut idx = vec![0usize; dense.input_dim];
        let (mut seen_lo, mut seen_hi) = (N::one(), N::zero());
        loop {
            let p: Vec<N> = idx.iter().map(|&i| coords[i].clone()).collect();
            let v = dense.eval(&p).pop().unwrap();
            seen_lo = seen_lo.min_of(&v);
            seen_hi = seen_hi.max_of(&v);
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] <= per_axis as usize {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        let out = seen_lo.to_scalar() < Scalar::real(-tol) || seen_hi.to_scalar() > Scalar::real(1.0 + tol);
        if out {
            Err(violation(&seen_lo, &seen_hi))
        } else {
            Ok(())
        }
    }
    if net.is_exact() {
        run::<BigRational>(net, eps)
    } else {
        run::<f64>(net, eps)
    }
}
