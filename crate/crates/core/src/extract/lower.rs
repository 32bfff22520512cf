//! Lowering of ReLU networks to CReLU networks.
//!
//! A ReLU neuron whose pre-activation `t` never exceeds `B` over the input
//! box satisfies `ρ(t) = σ(t) + σ(t-1) + … + σ(t-k+1)` with `k = ⌈B⌉`, so it
//! is replaced by `k` shifted CReLU copies feeding the next layer with the
//! original outgoing weights. Neurons with `B ≤ 0` are dropped.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::network::{
    affine_interval, dense_bounds, output_preactivation_bounds, Activation, Dense, DenseLayer,
    Network, OutputActivation,
};
use crate::scalar::{crelu, Number};

/// Lowers every hidden layer of `dense` to CReLU; the last affine layer is
/// re-expressed over the lowered neurons and its output activation kept.
pub(crate) fn lower_dense<N: Number>(dense: &Dense<N>) -> Dense<N> {
    assert_eq!(dense.activation, Activation::Relu, "only ReLU networks are lowered");
    let orig = dense_bounds(dense);
    let depth = dense.layers.len();
    let mut layers = Vec::with_capacity(depth);
    let mut inputs = vec![(N::zero(), N::one()); dense.input_dim];
    let mut current = dense.layers[0].clone();
    for l in 0..depth - 1 {
        let next = &dense.layers[l + 1];
        // (row, bias, outgoing column)
        let mut neurons: Vec<(Vec<N>, N, Vec<N>)> = Vec::new();
        for j in 0..current.width() {
            let (_, hi) = affine_interval(&current.weights[j], &current.bias[j], &inputs);
            let upper = hi.min_of(&orig[l][j].1);
            if upper <= N::zero() {
                continue;
            }
            let column: Vec<N> = next.weights.iter().map(|r| r[j].clone()).collect();
            for k in 0..upper.ceil_i64() {
                let bias = current.bias[j].sub(&N::from_i64(k));
                match neurons
                    .iter_mut()
                    .find(|(w, b, _)| *b == bias && *w == current.weights[j])
                {
                    Some((_, _, col)) => {
                        for (c, v) in col.iter_mut().zip(&column) {
                            *c = c.add(v);
                        }
                    }
                    None => neurons.push((current.weights[j].clone(), bias, column.clone())),
                }
            }
        }
        neurons.retain(|(_, _, col)| col.iter().any(|c| *c != N::zero()));
        if neurons.is_empty() {
            // the layer is constant zero; keep a placeholder
            let width = current.weights.first().map_or(0, Vec::len);
            neurons.push((vec![N::zero(); width], N::zero(), vec![N::zero(); next.width()]));
        }
        inputs = neurons
            .iter()
            .map(|(w, b, _)| {
                let (lo, hi) = affine_interval(w, b, &inputs);
                (crelu(&lo), crelu(&hi))
            })
            .collect();
        let lowered = DenseLayer {
            weights: neurons.iter().map(|(w, _, _)| w.clone()).collect(),
            bias: neurons.iter().map(|(_, b, _)| b.clone()).collect(),
        };
        current = DenseLayer {
            weights: (0..next.width())
                .map(|r| neurons.iter().map(|(_, _, col)| col[r].clone()).collect())
                .collect(),
            bias: next.bias.clone(),
        };
        layers.push(lowered);
    }
    layers.push(current);
    Dense {
        input_dim: dense.input_dim,
        layers,
        activation: Activation::Crelu,
        output_activation: dense.output_activation,
    }
}

/// Appends `y ↦ y` so that a ReLU applied to the output becomes a hidden
/// activation.
fn with_identity_tail<N: Number>(dense: &Dense<N>) -> Dense<N> {
    let width = dense.layers.last().unwrap().width();
    let mut out = dense.clone();
    out.layers.push(DenseLayer {
        weights: (0..width)
            .map(|j| (0..width).map(|k| if j == k { N::one() } else { N::zero() }).collect())
            .collect(),
        bias: vec![N::zero(); width],
    });
    out.output_activation = OutputActivation::Identity;
    out
}

pub(crate) fn lower_dense_exact<N: Number>(dense: &Dense<N>) -> Dense<N> {
    if dense.output_activation == OutputActivation::Same {
        let bounds = output_preactivation_bounds(dense);
        if bounds.iter().any(|(_, hi)| *hi > N::one()) {
            return lower_dense(&with_identity_tail(dense));
        }
    }
    lower_dense(dense)
}

/// Pointwise-equal CReLU network.
///
/// Hidden layers are lowered as described in the module docs. An output
/// followed by ReLU keeps `σ` when its upper bound is at most 1; otherwise
/// the output is lowered as well and summed by an extra affine layer.
pub fn relu_to_crelu(net: &Network) -> Result<Network> {
    if net.activation != Activation::Relu {
        return Err(Error::Unsupported("network already uses CReLU".into()));
    }
    if net.is_exact() {
        lower_dense_exact(&net.dense::<BigRational>()).to_network(net.scalar_kind)
    } else {
        lower_dense_exact(&net.dense::<f64>()).to_network(net.scalar_kind)
    }
}
