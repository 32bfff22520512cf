//! Sequential composition of networks.

use super::{Activation, AffineRow, Network, OutputActivation};
use crate::error::{Error, Result};

/// The network computing `outer ∘ inner`, of depth `depth(outer) + depth(inner)`.
///
/// If `inner` already applies its activation to the output, the layer lists
/// are concatenated. Otherwise the last affine output `y` of `inner` is passed
/// through the activation as `ρ(y) - ρ(-y) = y`, which needs ReLU.
pub fn compose_networks(outer: &Network, inner: &Network) -> Result<Network> {
    if inner.output_dim() != outer.input_dim {
        return Err(Error::DimensionMismatch {
            expected: outer.input_dim,
            got: inner.output_dim(),
        });
    }
    if inner.scalar_kind != outer.scalar_kind {
        return Err(Error::KindMismatch(format!(
            "cannot compose {} network with {} network",
            outer.scalar_kind, inner.scalar_kind
        )));
    }
    if inner.activation != outer.activation {
        return Err(Error::Unsupported(format!(
            "cannot compose {} network with {} network",
            outer.activation.as_str(),
            inner.activation.as_str()
        )));
    }
    let mut layers = inner.layers.clone();
    match inner.output_activation {
        OutputActivation::Same => layers.extend(outer.layers.iter().cloned()),
        OutputActivation::Identity => {
            if inner.activation != Activation::Relu {
                return Err(Error::Unsupported(
                    "identity passing through a clipped activation".into(),
                ));
            }
            let last = layers.pop().expect("networks have layers");
            let negated = last.iter().map(|r| AffineRow {
                coeffs: r.coeffs.iter().map(|c| c.neg()).collect(),
                bias: r.bias.neg(),
            });
            let doubled: Vec<AffineRow> = last.iter().cloned().chain(negated).collect();
            layers.push(doubled);
            let mut rest = outer.layers.iter().cloned();
            let first: Vec<AffineRow> = rest
                .next()
                .expect("networks have layers")
                .into_iter()
                .map(|r| {
                    let neg: Vec<_> = r.coeffs.iter().map(|c| c.neg()).collect();
                    AffineRow {
                        coeffs: r.coeffs.into_iter().chain(neg).collect(),
                        bias: r.bias,
                    }
                })
                .collect();
            layers.push(first);
            layers.extend(rest);
        }
    }
    Network::with_kind(
        inner.input_dim,
        layers,
        inner.activation,
        outer.output_activation,
        inner.scalar_kind,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::eval_network;
    use crate::network::fixtures::{phi_g, phi_tau};
    use crate::scalar::Scalar;

    #[test]
    fn hat_twice() {
        let g = phi_g();
        let g2 = compose_networks(&g, &g).unwrap();
        assert_eq!(g2.depth(), 4);
        assert_eq!(eval_network(&g2, &[Scalar::ratio(1, 4)]).unwrap(), vec![Scalar::int(1)]);
        assert_eq!(eval_network(&g2, &[Scalar::ratio(1, 2)]).unwrap(), vec![Scalar::int(0)]);
    }

    #[test]
    fn identity_outer_is_neutral() {
        let id = Network::new(
            1,
            vec![vec![AffineRow::ints(&[1], 0)]],
            Activation::Relu,
            OutputActivation::Identity,
        )
        .unwrap();
        let net = phi_tau();
        let c = compose_networks(&id, &net).unwrap();
        assert_eq!(c.depth(), net.depth() + 1);
        for a in 0..=7 {
            for b in 0..=7 {
                let p = [Scalar::ratio(a, 7), Scalar::ratio(b, 7)];
                assert_eq!(eval_network(&c, &p).unwrap(), eval_network(&net, &p).unwrap());
            }
        }
    }

    #[test]
    fn mismatches() {
        let g = phi_g();
        assert!(matches!(
            compose_networks(&phi_tau(), &g),
            Err(Error::DimensionMismatch { .. })
        ));
        let real = Network::with_kind(
            1,
            g.layers.clone(),
            Activation::Relu,
            OutputActivation::Same,
            crate::ScalarKind::Real,
        )
        .unwrap();
        assert!(matches!(compose_networks(&real, &g), Err(Error::KindMismatch(_))));
    }
}
