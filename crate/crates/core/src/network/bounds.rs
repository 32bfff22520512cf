//! Interval propagation over the input box `[0,1]^n`.

use super::{Dense, Network, OutputActivation};
use crate::scalar::{Number, Scalar};
use num_rational::BigRational;

/// Pre-activation interval `[lower, upper]` of one neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronBound {
    pub lower: Scalar,
    pub upper: Scalar,
}

/// Interval of `w·x + b` for `x` in the box `inputs`.
pub(crate) fn affine_interval<N: Number>(w: &[N], b: &N, inputs: &[(N, N)]) -> (N, N) {
    let mut lo = b.clone();
    let mut hi = b.clone();
    for (c, (a, z)) in w.iter().zip(inputs) {
        if *c > N::zero() {
            lo = lo.add(&c.mul(a));
            hi = hi.add(&c.mul(z));
        } else if *c < N::zero() {
            lo = lo.add(&c.mul(z));
            hi = hi.add(&c.mul(a));
        }
    }
    (lo, hi)
}

/// Pre-activation intervals of every layer of `dense` over `[0,1]^n`.
pub(crate) fn dense_bounds<N: Number>(dense: &Dense<N>) -> Vec<Vec<(N, N)>> {
    let mut inputs = vec![(N::zero(), N::one()); dense.input_dim];
    let mut out = Vec::with_capacity(dense.layers.len());
    for layer in &dense.layers {
        let pre: Vec<(N, N)> = (0..layer.width())
            .map(|j| affine_interval(&layer.weights[j], &layer.bias[j], &inputs))
            .collect();
        inputs = pre
            .iter()
            .map(|(a, z)| (dense.activation.apply(a), dense.activation.apply(z)))
            .collect();
        out.push(pre);
    }
    out
}

/// Sound pre-activation bounds for every neuron, computed by interval
/// arithmetic (exact for integer and rational networks).
pub fn propagate_bounds(net: &Network) -> Vec<Vec<NeuronBound>> {
    fn wrap<N: Number>(b: Vec<Vec<(N, N)>>) -> Vec<Vec<NeuronBound>> {
        b.into_iter()
            .map(|layer| {
                layer
                    .into_iter()
                    .map(|(lo, hi)| NeuronBound {
                        lower: lo.to_scalar(),
                        upper: hi.to_scalar(),
                    })
                    .collect()
            })
            .collect()
    }
    if net.is_exact() {
        wrap(dense_bounds::<BigRational>(&net.dense()))
    } else {
        wrap(dense_bounds::<f64>(&net.dense()))
    }
}

impl NeuronBound {
    /// Bound after applying the output activation of `net`.
    pub(crate) fn after_output(&self, net: &Network) -> NeuronBound {
        match net.output_activation {
            OutputActivation::Identity => self.clone(),
            OutputActivation::Same => {
                let f = |s: &Scalar| match s.to_exact() {
                    Some(q) => net.activation.apply(&q).to_scalar(),
                    None => net.activation.apply(&s.to_f64()).to_scalar(),
                };
                NeuronBound {
                    lower: f(&self.lower),
                    upper: f(&self.upper),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::{phi_g, phi_tau};
    use crate::network::{Activation, AffineRow};

    fn b(lo: i64, hi: i64) -> NeuronBound {
        NeuronBound {
            lower: Scalar::int(lo),
            upper: Scalar::int(hi),
        }
    }

    #[test]
    fn hat_first_layer() {
        let bounds = propagate_bounds(&phi_g());
        assert_eq!(bounds[0], vec![b(0, 2), b(-1, 1)]);
        assert_eq!(bounds[1], vec![b(-2, 2)]);
    }

    #[test]
    fn shifted_relu() {
        let n = Network::new(
            1,
            vec![vec![AffineRow::ints(&[1], -2)]],
            Activation::Relu,
            OutputActivation::Same,
        )
        .unwrap();
        assert_eq!(propagate_bounds(&n)[0], vec![b(-2, -1)]);
    }

    #[test]
    fn tau_network_first_neuron() {
        assert_eq!(propagate_bounds(&phi_tau())[0][0], b(-1, 1));
    }
}
