//! Feed-forward ReLU / CReLU networks on the unit cube.
//!
//! A [`Network`] is a list of affine layers. The hidden activation
//! (`ρ(x) = max{0,x}` or `σ(x) = min{1, max{0,x}}`) follows every layer but
//! the last; the last layer is followed by the same activation or by
//! nothing, depending on [`OutputActivation`].

mod bounds;
mod codec;
mod compose;
mod validate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{crelu, relu, Number, Scalar, ScalarKind};

pub use bounds::{propagate_bounds, NeuronBound};
pub(crate) use bounds::{affine_interval, dense_bounds};
pub use codec::{decode_network, encode_network};
pub use compose::compose_networks;
pub(crate) use validate::output_preactivation_bounds;
pub use validate::{validate_network, ValidationReport};

/// One neuron's pre-activation `m·x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineRow {
    pub coeffs: Vec<Scalar>,
    pub bias: Scalar,
}

impl AffineRow {
    pub fn new(coeffs: Vec<Scalar>, bias: Scalar) -> AffineRow {
        AffineRow { coeffs, bias }
    }

    /// Row with integer entries.
    pub fn ints(coeffs: &[i64], bias: i64) -> AffineRow {
        AffineRow {
            coeffs: coeffs.iter().map(|&c| Scalar::int(c)).collect(),
            bias: Scalar::int(bias),
        }
    }

    /// Row with real entries.
    pub fn reals(coeffs: &[f64], bias: f64) -> AffineRow {
        AffineRow {
            coeffs: coeffs.iter().map(|&c| Scalar::real(c)).collect(),
            bias: Scalar::real(bias),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &Scalar> {
        self.coeffs.iter().chain(std::iter::once(&self.bias))
    }

    /// Widest kind among the entries.
    pub fn kind(&self) -> ScalarKind {
        self.entries()
            .map(Scalar::kind)
            .fold(ScalarKind::Integer, ScalarKind::join)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Activation {
    #[serde(rename = "relu")]
    Relu,
    #[serde(rename = "crelu")]
    Crelu,
}

impl Activation {
    pub fn apply<N: Number>(self, x: &N) -> N {
        match self {
            Activation::Relu => relu(x),
            Activation::Crelu => crelu(x),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Crelu => "crelu",
        }
    }
}

/// What follows the last affine layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutputActivation {
    /// The hidden activation is applied to the output as well.
    #[serde(rename = "same")]
    Same,
    /// The output is the last affine map.
    #[serde(rename = "none")]
    Identity,
}

impl OutputActivation {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputActivation::Same => "same",
            OutputActivation::Identity => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub input_dim: usize,
    pub layers: Vec<Vec<AffineRow>>,
    pub activation: Activation,
    pub output_activation: OutputActivation,
    pub scalar_kind: ScalarKind,
}

impl Network {
    /// Builds a network whose kind is the widest kind among its entries; all
    /// entries are widened to that kind.
    pub fn new(
        input_dim: usize,
        layers: Vec<Vec<AffineRow>>,
        activation: Activation,
        output_activation: OutputActivation,
    ) -> Result<Network> {
        let kind = layers
            .iter()
            .flatten()
            .map(AffineRow::kind)
            .fold(ScalarKind::Integer, ScalarKind::join);
        Network::with_kind(input_dim, layers, activation, output_activation, kind)
    }

    /// Builds a network of the given kind, converting every entry; narrowing
    /// conversions must be exact.
    pub fn with_kind(
        input_dim: usize,
        layers: Vec<Vec<AffineRow>>,
        activation: Activation,
        output_activation: OutputActivation,
        kind: ScalarKind,
    ) -> Result<Network> {
        let layers = layers
            .into_iter()
            .map(|rows| {
                rows.into_iter()
                    .map(|r| {
                        Ok(AffineRow {
                            coeffs: r
                                .coeffs
                                .iter()
                                .map(|c| c.convert(kind))
                                .collect::<Result<_>>()?,
                            bias: r.bias.convert(kind)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let net = Network {
            input_dim,
            layers,
            activation,
            output_activation,
            scalar_kind: kind,
        };
        net.check_shape()?;
        if net.layers.iter().flatten().flat_map(AffineRow::entries).any(|s| !s.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(net)
    }

    /// Verifies that the layer dimensions chain.
    pub fn check_shape(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::Malformed("input dimension must be positive".into()));
        }
        if self.layers.is_empty() {
            return Err(Error::Malformed("network has no layers".into()));
        }
        let mut width = self.input_dim;
        for (l, rows) in self.layers.iter().enumerate() {
            if rows.is_empty() {
                return Err(Error::Malformed(format!("layer {} has no neurons", l + 1)));
            }
            for row in rows {
                if row.coeffs.len() != width {
                    return Err(Error::DimensionMismatch {
                        expected: width,
                        got: row.coeffs.len(),
                    });
                }
            }
            width = rows.len();
        }
        Ok(())
    }

    /// Number of affine layers.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Vec::len)
    }

    /// Output widths of every layer.
    pub fn widths(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.scalar_kind != ScalarKind::Real
    }

    pub(crate) fn dense<N: Number>(&self) -> Dense<N> {
        Dense {
            input_dim: self.input_dim,
            layers: self
                .layers
                .iter()
                .map(|rows| DenseLayer {
                    weights: rows
                        .iter()
                        .map(|r| r.coeffs.iter().map(N::from_scalar).collect())
                        .collect(),
                    bias: rows.iter().map(|r| N::from_scalar(&r.bias)).collect(),
                })
                .collect(),
            activation: self.activation,
            output_activation: self.output_activation,
        }
    }
}

/// Evaluates the network at `point`.
///
/// Integer and rational networks evaluated at exact points are exact.
pub fn eval_network(net: &Network, point: &[Scalar]) -> Result<Vec<Scalar>> {
    if point.len() != net.input_dim {
        return Err(Error::DimensionMismatch {
            expected: net.input_dim,
            got: point.len(),
        });
    }
    if net.is_exact() && point.iter().all(|p| p.to_exact().is_some()) {
        let pt: Vec<_> = point.iter().map(|p| p.to_exact().unwrap()).collect();
        Ok(net.dense().eval(&pt).iter().map(Number::to_scalar).collect())
    } else {
        let pt: Vec<f64> = point.iter().map(Scalar::to_f64).collect();
        Ok(net.dense::<f64>().eval(&pt).iter().map(Number::to_scalar).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DenseLayer<N> {
    pub weights: Vec<Vec<N>>,
    pub bias: Vec<N>,
}

impl<N: Number> DenseLayer<N> {
    pub fn width(&self) -> usize {
        self.bias.len()
    }

    pub fn row_value(&self, j: usize, x: &[N]) -> N {
        self.weights[j]
            .iter()
            .zip(x)
            .fold(self.bias[j].clone(), |acc, (w, v)| acc.add(&w.mul(v)))
    }

    pub fn apply(&self, x: &[N]) -> Vec<N> {
        (0..self.width()).map(|j| self.row_value(j, x)).collect()
    }
}

/// Homogeneous numeric view of a network used by the evaluators.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Dense<N> {
    pub input_dim: usize,
    pub layers: Vec<DenseLayer<N>>,
    pub activation: Activation,
    pub output_activation: OutputActivation,
}

impl<N: Number> Dense<N> {
    pub fn eval(&self, point: &[N]) -> Vec<N> {
        let last = self.layers.len() - 1;
        let mut x = point.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut y = layer.apply(&x);
            if l < last || self.output_activation == OutputActivation::Same {
                for v in &mut y {
                    *v = self.activation.apply(v);
                }
            }
            x = y;
        }
        x
    }

    pub fn to_network(&self, kind: ScalarKind) -> Result<Network> {
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                layer
                    .weights
                    .iter()
                    .zip(&layer.bias)
                    .map(|(w, b)| AffineRow {
                        coeffs: w.iter().map(Number::to_scalar).collect(),
                        bias: b.to_scalar(),
                    })
                    .collect()
            })
            .collect();
        Network::with_kind(
            self.input_dim,
            layers,
            self.activation,
            self.output_activation,
            kind,
        )
    }
}
