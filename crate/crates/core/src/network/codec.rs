//! JSON network documents.
//!
//! ```json
//! {
//!   "version": 1,
//!   "scalar_kind": "int",
//!   "activation": "relu",
//!   "output_activation": "same",
//!   "input_dim": 1,
//!   "layers": [{"weights": [[2], [2]], "bias": [0, -1]}, ...]
//! }
//! ```
//!
//! Integers are JSON numbers of any size, rationals are `"p/q"` strings and
//! reals are shortest round-trip decimal strings.

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use super::{Activation, AffineRow, Network, OutputActivation};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind};

const VERSION: u64 = 1;

fn encode_scalar(s: &Scalar) -> Value {
    match s {
        Scalar::Int(i) => Value::Number(
            serde_json::Number::from_str(&i.to_string()).expect("integer literal"),
        ),
        Scalar::Rational(r) => Value::String(format!("{}/{}", r.numer(), r.denom())),
        Scalar::Real(v) => Value::String(format!("{v}")),
    }
}

pub fn encode_network(net: &Network) -> String {
    let layers: Vec<Value> = net
        .layers
        .iter()
        .map(|rows| {
            let weights: Vec<Value> = rows
                .iter()
                .map(|r| Value::Array(r.coeffs.iter().map(encode_scalar).collect()))
                .collect();
            let bias: Vec<Value> = rows.iter().map(|r| encode_scalar(&r.bias)).collect();
            json!({ "weights": weights, "bias": bias })
        })
        .collect();
    let doc = json!({
        "version": VERSION,
        "scalar_kind": net.scalar_kind,
        "activation": net.activation,
        "output_activation": net.output_activation,
        "input_dim": net.input_dim,
        "layers": layers,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    text
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| malformed(format!("missing field {key:?}")))
}

fn decode_scalar(v: &Value, kind: ScalarKind) -> Result<Scalar> {
    let mismatch = || Error::KindMismatch(format!("value {v} in a {kind} network"));
    let s = match (kind, v) {
        (ScalarKind::Integer, Value::Number(n)) => {
            Scalar::Int(BigInt::from_str(&n.to_string()).map_err(|_| mismatch())?)
        }
        (ScalarKind::Rational, Value::String(s)) => {
            Scalar::from_str(s).map_err(|_| malformed(format!("bad rational {s:?}")))?
        }
        (ScalarKind::Real, Value::String(s)) => {
            Scalar::Real(s.trim().parse().map_err(|_| malformed(format!("bad real {s:?}")))?)
        }
        (ScalarKind::Real, Value::Number(n)) => {
            Scalar::Real(n.as_f64().ok_or_else(|| malformed(format!("bad real {n}")))?)
        }
        _ => return Err(mismatch()),
    };
    if kind == ScalarKind::Rational && s.kind() == ScalarKind::Real {
        return Err(mismatch());
    }
    s.convert(kind).map_err(|_| mismatch())
}

fn decode_enum<T: serde::de::DeserializeOwned>(v: &Value, what: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|_| malformed(format!("bad {what}: {v}")))
}

pub fn decode_network(text: &str) -> Result<Network> {
    let doc: Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let obj = doc.as_object().ok_or_else(|| malformed("document is not an object"))?;
    match field(obj, "version")?.as_u64() {
        Some(VERSION) => {}
        _ => return Err(malformed("unsupported version")),
    }
    let kind: ScalarKind = decode_enum(field(obj, "scalar_kind")?, "scalar_kind")?;
    let activation: Activation = decode_enum(field(obj, "activation")?, "activation")?;
    let output_activation: OutputActivation =
        decode_enum(field(obj, "output_activation")?, "output_activation")?;
    let input_dim = field(obj, "input_dim")?
        .as_u64()
        .ok_or_else(|| malformed("input_dim must be a non-negative integer"))? as usize;
    let layers = field(obj, "layers")?
        .as_array()
        .ok_or_else(|| malformed("layers must be an array"))?
        .iter()
        .enumerate()
        .map(|(l, layer)| {
            let layer = layer
                .as_object()
                .ok_or_else(|| malformed(format!("layer {} is not an object", l + 1)))?;
            let weights = field(layer, "weights")?
                .as_array()
                .ok_or_else(|| malformed("weights must be an array"))?;
            let bias = field(layer, "bias")?
                .as_array()
                .ok_or_else(|| malformed("bias must be an array"))?;
            if weights.len() != bias.len() {
                return Err(Error::DimensionMismatch {
                    expected: weights.len(),
                    got: bias.len(),
                });
            }
            weights
                .iter()
                .zip(bias)
                .map(|(row, b)| {
                    let coeffs = row
                        .as_array()
                        .ok_or_else(|| malformed("weight rows must be arrays"))?
                        .iter()
                        .map(|c| decode_scalar(c, kind))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(AffineRow::new(coeffs, decode_scalar(b, kind)?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Network::with_kind(input_dim, layers, activation, output_activation, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::phi_g;

    #[test]
    fn hat_document() {
        let text = encode_network(&phi_g());
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["layers"][0]["weights"], json!([[2], [2]]));
        assert_eq!(doc["layers"][0]["bias"], json!([0, -1]));
        assert_eq!(doc["scalar_kind"], json!("int"));
        assert_eq!(decode_network(&text).unwrap(), phi_g());
    }

    #[test]
    fn rational_and_real_entries() {
        let net = Network::new(
            1,
            vec![vec![AffineRow::new(vec![Scalar::ratio(1, 3)], Scalar::ratio(-2, 1))]],
            Activation::Relu,
            OutputActivation::Identity,
        )
        .unwrap();
        let text = encode_network(&net);
        assert!(text.contains("\"1/3\""));
        assert_eq!(decode_network(&text).unwrap(), net);

        let real = Network::new(
            1,
            vec![vec![AffineRow::reals(&[std::f64::consts::FRAC_1_SQRT_2], 0.1)]],
            Activation::Crelu,
            OutputActivation::Same,
        )
        .unwrap();
        let back = decode_network(&encode_network(&real)).unwrap();
        assert_eq!(back, real);
        assert!(matches!(back.layers[0][0].coeffs[0], Scalar::Real(v) if v == std::f64::consts::FRAC_1_SQRT_2));
    }

    #[test]
    fn huge_integers_survive() {
        let big = BigInt::from(10).pow(40);
        let net = Network::new(
            1,
            vec![vec![AffineRow::new(vec![Scalar::Int(big.clone())], Scalar::int(0))]],
            Activation::Relu,
            OutputActivation::Identity,
        )
        .unwrap();
        let back = decode_network(&encode_network(&net)).unwrap();
        assert!(matches!(&back.layers[0][0].coeffs[0], Scalar::Int(i) if *i == big));
    }

    #[test]
    fn rejects_bad_documents() {
        let good = encode_network(&phi_g());
        assert!(matches!(decode_network("[1,2"), Err(Error::Malformed(_))));
        let frac = good.replacen("-1", "\"1/2\"", 1);
        assert!(matches!(decode_network(&frac), Err(Error::KindMismatch(_))));
        let chain = good.replacen("[\n          1,\n          -2\n        ]", "[1]", 1);
        assert_ne!(chain, good);
        assert!(matches!(decode_network(&chain), Err(Error::DimensionMismatch { .. })));
        let version = good.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(matches!(decode_network(&version), Err(Error::Malformed(_))));
    }
}
