//! Structural and range checks.

use num_rational::BigRational;

use super::{dense_bounds, Activation, Dense, Network, NeuronBound};
use crate::extract::lower_dense;
use crate::oracle::network_polylines;
use crate::scalar::{Number, Scalar};

/// Bounds on the last affine layer over `[0,1]^n`.
///
/// Intersects plain interval propagation with interval propagation through
/// the CReLU lowering, which is tighter because every lowered hidden neuron
/// lies in `[0,1]`. One-dimensional networks are additionally traced exactly.
pub(crate) fn output_preactivation_bounds<N: Number>(dense: &Dense<N>) -> Vec<(N, N)> {
    let mut bounds = dense_bounds(dense).pop().expect("networks have layers");
    let mut tighten = |other: Vec<(N, N)>| {
        for ((lo, hi), (a, z)) in bounds.iter_mut().zip(other) {
            *lo = lo.max_of(&a);
            *hi = hi.min_of(&z);
        }
    };
    if dense.activation == Activation::Relu && dense.layers.len() > 1 {
        tighten(dense_bounds(&lower_dense(dense)).pop().unwrap());
    }
    if dense.input_dim == 1 {
        let exact: Dense<BigRational> = Dense {
            input_dim: 1,
            layers: dense
                .layers
                .iter()
                .map(|l| super::DenseLayer {
                    weights: l
                        .weights
                        .iter()
                        .map(|r| r.iter().map(|w| BigRational::from_scalar(&w.to_scalar())).collect())
                        .collect(),
                    bias: l.bias.iter().map(|b| BigRational::from_scalar(&b.to_scalar())).collect(),
                })
                .collect(),
            activation: dense.activation,
            output_activation: dense.output_activation,
        };
        tighten(
            network_polylines(&exact)
                .iter()
                .map(|p| {
                    let (lo, hi) = p.range();
                    (N::from_scalar(&Scalar::Rational(lo)), N::from_scalar(&Scalar::Rational(hi)))
                })
                .collect(),
        );
    }
    bounds
}

/// Outcome of [`validate_network`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    /// Entries whose kind differs from the declared scalar kind.
    pub kind_violations: Vec<String>,
    pub dimension_errors: Vec<String>,
    /// Output bounds after the output activation, when requested.
    pub output_bounds: Option<Vec<NeuronBound>>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.kind_violations.is_empty() && self.dimension_errors.is_empty() && self.warnings.is_empty()
    }
}

/// Checks kind homogeneity and dimension chaining, and with `expect_range`
/// bounds the output over `[0,1]^n`, warning when it may leave `[0,1]`.
pub fn validate_network(net: &Network, expect_range: bool) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (l, rows) in net.layers.iter().enumerate() {
        for (j, row) in rows.iter().enumerate() {
            for s in row.entries() {
                if s.kind() != net.scalar_kind {
                    report.kind_violations.push(format!(
                        "layer {} neuron {}: {} entry {} in a {} network",
                        l + 1,
                        j + 1,
                        s.kind(),
                        s,
                        net.scalar_kind
                    ));
                }
            }
        }
    }
    if let Err(e) = net.check_shape() {
        report.dimension_errors.push(e.to_string());
    }
    if !expect_range || !report.dimension_errors.is_empty() {
        return report;
    }
    let exact = net.layers.iter().flatten().flat_map(|r| r.entries()).all(|s| s.to_exact().is_some());
    let pre: Vec<NeuronBound> = if exact {
        to_bounds(output_preactivation_bounds::<BigRational>(&net.dense()))
    } else {
        to_bounds(output_preactivation_bounds::<f64>(&net.dense()))
    };
    let post: Vec<NeuronBound> = pre.iter().map(|b| b.after_output(net)).collect();
    for (j, b) in post.iter().enumerate() {
        if b.lower < Scalar::int(0) || b.upper > Scalar::int(1) {
            report.warnings.push(format!(
                "output {} bounded by [{}, {}], not contained in [0,1]",
                j + 1,
                b.lower,
                b.upper
            ));
        }
    }
    report.output_bounds = Some(post);
    report
}

fn to_bounds<N: Number>(b: Vec<(N, N)>) -> Vec<NeuronBound> {
    b.into_iter()
        .map(|(lo, hi)| NeuronBound {
            lower: lo.to_scalar(),
            upper: hi.to_scalar(),
        })
        .collect()
}
