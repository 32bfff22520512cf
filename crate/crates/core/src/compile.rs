//! Term-to-network compilation and the sawtooth constructions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::network::{Activation, AffineRow, Network, OutputActivation};
use crate::oracle::Pwl1D;
use crate::scalar::{Scalar, ScalarKind};
use crate::term::{Logic, Node, Term};

/// Elementary operations realized by small networks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GadgetKind {
    Oplus,
    Odot,
    Not,
    Delta(u64),
    Scale(f64),
}

/// Network realizing one connective on its domain.
pub fn gadget(kind: GadgetKind) -> Result<Network> {
    let (input_dim, layers) = match kind {
        GadgetKind::Oplus => (
            2,
            vec![vec![AffineRow::ints(&[-1, -1], 1)], vec![AffineRow::ints(&[-1], 1)]],
        ),
        GadgetKind::Odot => (
            2,
            vec![vec![AffineRow::ints(&[1, 1], -1)], vec![AffineRow::ints(&[1], 0)]],
        ),
        GadgetKind::Not => (1, vec![vec![AffineRow::ints(&[-1], 1)]]),
        GadgetKind::Delta(0) => {
            return Err(Error::InvalidParameter("division by zero".into()));
        }
        GadgetKind::Delta(k) => (
            1,
            vec![vec![AffineRow::new(
                vec![Scalar::Rational(BigRational::new(BigInt::one(), BigInt::from(k)))],
                Scalar::int(0),
            )]],
        ),
        GadgetKind::Scale(r) => {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidParameter(format!("scale factor {r} outside [0,1]")));
            }
            (1, vec![vec![AffineRow::reals(&[r], 0.0)]])
        }
    };
    Network::new(input_dim, layers, Activation::Relu, OutputActivation::Identity)
}

/// A ReLU network with one affine output, as a list of layers over `n` inputs.
#[derive(Clone)]
struct Fragment {
    layers: Vec<Vec<AffineRow>>,
}

impl Fragment {
    fn depth(&self) -> usize {
        self.layers.len()
    }

    fn out(&mut self) -> &mut AffineRow {
        &mut self.layers.last_mut().unwrap()[0]
    }

    fn affine(mut self, scale: &Scalar, shift: &Scalar) -> Fragment {
        let row = self.out();
        row.coeffs = row.coeffs.iter().map(|c| c.mul(scale)).collect();
        row.bias = row.bias.mul(scale).add(shift);
        self
    }

    /// One more layer computing `ρ(y) = y`, valid since outputs lie in `[0,1]`.
    fn deepen(mut self) -> Fragment {
        self.layers.push(vec![AffineRow::ints(&[1], 0)]);
        self
    }

    /// `sign·(y_a + y_b) + bias`, followed by ReLU and `out_scale·t + out_bias`.
    fn join(a: Fragment, b: Fragment, sign: i64, bias: i64, out: (i64, i64)) -> Fragment {
        let (mut a, mut b) = (a, b);
        while a.depth() < b.depth() {
            a = a.deepen();
        }
        while b.depth() < a.depth() {
            b = b.deepen();
        }
        let depth = a.depth();
        let s = Scalar::int(sign);
        let mut layers = Vec::with_capacity(depth + 1);
        for l in 0..depth - 1 {
            if l == 0 {
                layers.push(a.layers[0].iter().chain(&b.layers[0]).cloned().collect());
            } else {
                let (wa, wb) = (a.layers[l - 1].len(), b.layers[l - 1].len());
                let pad = |row: &AffineRow, before: usize, after: usize| AffineRow {
                    coeffs: std::iter::repeat_n(Scalar::int(0), before)
                        .chain(row.coeffs.iter().cloned())
                        .chain(std::iter::repeat_n(Scalar::int(0), after))
                        .collect(),
                    bias: row.bias.clone(),
                };
                let mut rows: Vec<AffineRow> = a.layers[l].iter().map(|r| pad(r, 0, wb)).collect();
                rows.extend(b.layers[l].iter().map(|r| pad(r, wa, 0)));
                layers.push(rows);
            }
        }
        let (ra, rb) = (&a.layers[depth - 1][0], &b.layers[depth - 1][0]);
        let coeffs: Vec<Scalar> = if depth == 1 {
            ra.coeffs.iter().zip(&rb.coeffs).map(|(x, y)| x.add(y).mul(&s)).collect()
        } else {
            ra.coeffs.iter().chain(&rb.coeffs).map(|x| x.mul(&s)).collect()
        };
        let merged_bias = ra.bias.add(&rb.bias).mul(&s).add(&Scalar::int(bias));
        layers.push(vec![AffineRow::new(coeffs, merged_bias)]);
        layers.push(vec![AffineRow::ints(&[out.0], out.1)]);
        Fragment { layers }
    }
}

/// ReLU network computing the term function of `t` on `[0,1]^arity`.
///
/// The scalar kind follows the term's logic: integer for MV, rational for
/// DMV, real for RMV. The output is the last affine map.
pub fn compile_term(t: &Term, arity: usize) -> Result<Network> {
    if t.max_var() > arity {
        return Err(Error::VariableOutOfRange {
            index: t.max_var(),
            arity,
        });
    }
    if arity == 0 {
        return Err(Error::InvalidParameter("arity must be positive".into()));
    }
    let zero_row = |bias: i64| AffineRow::ints(&vec![0; arity], bias);
    let frag = t.fold(&mut |node: &Term, kids: &[Fragment]| match node.node() {
        Node::Zero => Fragment {
            layers: vec![vec![zero_row(0)]],
        },
        Node::Var(i) => {
            let mut row = zero_row(0);
            row.coeffs[i - 1] = Scalar::int(1);
            Fragment {
                layers: vec![vec![row]],
            }
        }
        Node::Not(_) => kids[0].clone().affine(&Scalar::int(-1), &Scalar::int(1)),
        Node::Delta(k, _) => kids[0].clone().affine(
            &Scalar::Rational(BigRational::new(BigInt::one(), BigInt::from(*k))),
            &Scalar::int(0),
        ),
        Node::Scale(r, _) => kids[0].clone().affine(&Scalar::real(*r), &Scalar::int(0)),
        // 1 - ρ(1 - a - b)
        Node::Oplus(..) => Fragment::join(kids[0].clone(), kids[1].clone(), -1, 1, (-1, 1)),
        // ρ(a + b - 1)
        Node::Odot(..) => Fragment::join(kids[0].clone(), kids[1].clone(), 1, -1, (1, 0)),
    });
    let kind = match t.logic() {
        Logic::Mv => ScalarKind::Integer,
        Logic::Dmv => ScalarKind::Rational,
        Logic::Rmv => ScalarKind::Real,
    };
    Network::with_kind(arity, frag.layers, Activation::Relu, OutputActivation::Identity, kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    Deep,
    Shallow,
}

/// Widest hidden layer accepted by [`build_sawtooth`].
pub const MAX_SHALLOW_S: u32 = 20;

/// Network realizing the `s`-fold composition of the hat function
/// `g(x) = min{2x, 2 - 2x}`.
///
/// The deep variant stacks `s` copies of `ρ ∘ (1, -2) ∘ ρ ∘ (2x, 2x - 1)`;
/// the shallow one is `ρ ∘ (1, -2, 2, …, -2) ∘ ρ ∘ (2^s x - k)_k`.
pub fn build_sawtooth(arch: Architecture, s: u32) -> Result<Network> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be positive".into()));
    }
    let layers = match arch {
        Architecture::Deep => {
            if s > 64 {
                return Err(Error::InvalidParameter(format!("deep sawtooth depth {s} too large")));
            }
            let block = [
                vec![AffineRow::ints(&[2], 0), AffineRow::ints(&[2], -1)],
                vec![AffineRow::ints(&[1, -2], 0)],
            ];
            (0..s).flat_map(|_| block.iter().cloned()).collect()
        }
        Architecture::Shallow => {
            if s > MAX_SHALLOW_S {
                return Err(Error::InvalidParameter(format!(
                    "shallow sawtooth needs width 2^{s}, above the limit 2^{MAX_SHALLOW_S}"
                )));
            }
            let width = 1i64 << s;
            let first = (0..width).map(|k| AffineRow::ints(&[width], -k)).collect();
            let out: Vec<i64> = (0..width)
                .map(|k| match k {
                    0 => 1,
                    k if k % 2 == 1 => -2,
                    _ => 2,
                })
                .collect();
            vec![first, vec![AffineRow::ints(&out, 0)]]
        }
    };
    Network::new(1, layers, Activation::Relu, OutputActivation::Same)
}

/// One-hidden-layer network `f(0) + c_0 ρ(x) + Σ_k c_k ρ(x - t_k)` with one
/// neuron per interior breakpoint `t_k` and slope changes `c_k`.
pub fn build_shallow_from_pwl(f: &Pwl1D) -> Result<Network> {
    let pts = f.breakpoints();
    let slope = |i: usize| -> BigRational {
        let ((x0, y0), (x1, y1)) = (&pts[i], &pts[i + 1]);
        (y1 - y0) / (x1 - x0)
    };
    let mut hidden = vec![AffineRow::ints(&[1], 0)];
    let mut out = vec![Scalar::Rational(slope(0))];
    for i in 1..pts.len() - 1 {
        hidden.push(AffineRow::new(
            vec![Scalar::int(1)],
            Scalar::Rational(-pts[i].0.clone()),
        ));
        out.push(Scalar::Rational(slope(i) - slope(i - 1)));
    }
    let layers = vec![hidden, vec![AffineRow::new(out, Scalar::Rational(pts[0].1.clone()))]];
    let integral = layers
        .iter()
        .flatten()
        .flat_map(AffineRow::entries)
        .all(|s| s.narrowest_kind() == ScalarKind::Integer);
    let kind = if integral {
        ScalarKind::Integer
    } else {
        ScalarKind::Rational
    };
    Network::with_kind(1, layers, Activation::Relu, OutputActivation::Identity, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::eval_network;
    use crate::oracle::{grid_equal, term_pwl};
    use crate::term::{eval_term, parse_term, TermProgram};

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn net_at(net: &Network, p: &[Scalar]) -> Scalar {
        eval_network(net, p).unwrap().pop().unwrap()
    }

    #[test]
    fn gadgets() {
        let odot = gadget(GadgetKind::Odot).unwrap();
        let v = net_at(&odot, &[Scalar::real(0.7), Scalar::real(0.6)]);
        assert!((v.to_f64() - 0.3).abs() < 1e-12);
        let oplus = gadget(GadgetKind::Oplus).unwrap();
        assert_eq!(oplus.layers[0], vec![AffineRow::ints(&[-1, -1], 1)]);
        assert_eq!(oplus.layers[1], vec![AffineRow::ints(&[-1], 1)]);
        assert_eq!(net_at(&oplus, &[q(1, 2), q(2, 3)]), Scalar::int(1));
        let d3 = gadget(GadgetKind::Delta(3)).unwrap();
        assert_eq!(d3.scalar_kind, ScalarKind::Rational);
        assert_eq!(net_at(&d3, &[Scalar::int(1)]), q(1, 3));
        assert_eq!(net_at(&gadget(GadgetKind::Not).unwrap(), &[q(1, 4)]), q(3, 4));
        assert_eq!(gadget(GadgetKind::Scale(0.5)).unwrap().scalar_kind, ScalarKind::Real);
        assert!(gadget(GadgetKind::Delta(0)).is_err());
        assert!(gadget(GadgetKind::Scale(1.5)).is_err());
    }

    #[test]
    fn compile_tau_matches_three_layer_network() {
        let t = parse_term("(x1 + x1) * ~x2", 2).unwrap();
        let net = compile_term(&t, 2).unwrap();
        assert_eq!(net.scalar_kind, ScalarKind::Integer);
        let reference = crate::network::fixtures::phi_tau();
        for a in 0..=11 {
            for b in 0..=11 {
                let p = [q(a, 11), q(b, 11)];
                assert_eq!(net_at(&net, &p), net_at(&reference, &p));
                assert_eq!(net_at(&net, &p), eval_term(&t, &p).unwrap());
            }
        }
    }

    #[test]
    fn compile_variable_and_division() {
        let x = compile_term(&parse_term("x1", 1).unwrap(), 1).unwrap();
        assert_eq!(x.layers, vec![vec![AffineRow::ints(&[1], 0)]]);
        let d = compile_term(&parse_term("d2(x1)", 1).unwrap(), 1).unwrap();
        assert_eq!(d.scalar_kind, ScalarKind::Rational);
        assert_eq!(net_at(&d, &[q(1, 2)]), q(1, 4));
        let s = compile_term(&parse_term("s0.5(x1) + x1", 1).unwrap(), 1).unwrap();
        assert_eq!(s.scalar_kind, ScalarKind::Real);
        assert!(compile_term(&parse_term("x2", 2).unwrap(), 1).is_err());
    }

    #[test]
    fn compile_agrees_with_term_in_three_variables() {
        let t = parse_term("~(x1 * x2 + ~x3) * (x2 + x2 + x1) + x3 * x3", 3).unwrap();
        let net = compile_term(&t, 3).unwrap();
        let prog = TermProgram::new(&t);
        let dense = net.dense::<BigRational>();
        assert!(grid_equal::<BigRational>(
            |p| prog.eval(p),
            |p| dense.eval(p).pop().unwrap(),
            3,
            6,
            1000,
            0
        ));
    }

    #[test]
    fn sawtooth_values() {
        let deep = build_sawtooth(Architecture::Deep, 2).unwrap();
        let shallow = build_sawtooth(Architecture::Shallow, 2).unwrap();
        assert_eq!(deep.depth(), 4);
        assert_eq!(shallow.widths(), vec![4, 1]);
        assert_eq!(net_at(&deep, &[q(1, 4)]), Scalar::int(1));
        assert_eq!(net_at(&shallow, &[q(1, 4)]), Scalar::int(1));
        for k in 0..=16 {
            assert_eq!(net_at(&deep, &[q(k, 16)]), net_at(&shallow, &[q(k, 16)]));
        }
        for arch in [Architecture::Deep, Architecture::Shallow] {
            let g = build_sawtooth(arch, 1).unwrap();
            assert_eq!(net_at(&g, &[q(0, 1)]), Scalar::int(0));
            assert_eq!(net_at(&g, &[q(1, 1)]), Scalar::int(0));
        }
        let deep5 = build_sawtooth(Architecture::Deep, 5).unwrap();
        for k in 0..=32 {
            assert_eq!(net_at(&deep5, &[q(k, 32)]), Scalar::int(k % 2));
        }
        assert!(build_sawtooth(Architecture::Shallow, 30).is_err());
        assert!(build_sawtooth(Architecture::Deep, 0).is_err());
    }

    #[test]
    fn shallow_from_breakpoints() {
        let g = term_pwl(&parse_term("(x + x) * ~(x * x)", 1).unwrap()).unwrap();
        let net = build_shallow_from_pwl(&g).unwrap();
        assert_eq!(net.widths(), vec![2, 1]);
        for k in 0..=8 {
            let x = q(k, 8);
            let want = if k <= 4 { q(2 * k, 8) } else { q(16 - 2 * k, 8) };
            assert_eq!(net_at(&net, &[x]), want);
        }
        let id = term_pwl(&parse_term("x", 1).unwrap()).unwrap();
        assert_eq!(build_shallow_from_pwl(&id).unwrap().widths(), vec![1, 1]);

        let g2 = term_pwl(&parse_term("((x + x) * ~(x * x) + (x + x) * ~(x * x)) * ~(((x + x) * ~(x * x)) * ((x + x) * ~(x * x)))", 1).unwrap()).unwrap();
        let net2 = build_shallow_from_pwl(&g2).unwrap();
        assert_eq!(net2.widths(), vec![4, 1]);
        let saw = build_sawtooth(Architecture::Shallow, 2).unwrap();
        for k in 0..=24 {
            assert_eq!(net_at(&net2, &[q(k, 24)]), net_at(&saw, &[q(k, 24)]));
        }
    }
}
