//! Exact univariate polylines on `[0,1]`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::network::Dense;
use crate::scalar::{rational_from_f64_checked, rational_from_u64};
use crate::term::{Node, Term};

type Q = BigRational;

/// Continuous piecewise-linear function on `[0,1]` given by its vertices.
///
/// The first vertex is at `x = 0`, the last at `x = 1`, and `x` strictly
/// increases. Values are unrestricted.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Polyline {
    pub pts: Vec<(Q, Q)>,
}

impl Polyline {
    pub fn identity() -> Polyline {
        Polyline {
            pts: vec![(Q::zero(), Q::zero()), (Q::one(), Q::one())],
        }
    }

    pub fn constant(c: Q) -> Polyline {
        Polyline {
            pts: vec![(Q::zero(), c.clone()), (Q::one(), c)],
        }
    }

    pub fn eval(&self, x: &Q) -> Q {
        let i = self.pts.partition_point(|(px, _)| px < x);
        if i < self.pts.len() && &self.pts[i].0 == x {
            return self.pts[i].1.clone();
        }
        let (x0, y0) = &self.pts[i - 1];
        let (x1, y1) = &self.pts[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Minimum and maximum value.
    pub fn range(&self) -> (Q, Q) {
        let mut lo = self.pts[0].1.clone();
        let mut hi = lo.clone();
        for (_, y) in &self.pts[1..] {
            if *y < lo {
                lo = y.clone();
            }
            if *y > hi {
                hi = y.clone();
            }
        }
        (lo, hi)
    }

    /// `bias + Σ w_i p_i`.
    pub fn combine(terms: &[(Q, &Polyline)], bias: &Q) -> Polyline {
        let mut xs: Vec<&Q> = terms.iter().flat_map(|(_, p)| p.pts.iter().map(|(x, _)| x)).collect();
        xs.sort();
        xs.dedup();
        if xs.is_empty() {
            return Polyline::constant(bias.clone());
        }
        // walk each polyline alongside the merged abscissae
        let mut cursors = vec![0usize; terms.len()];
        let pts = xs
            .into_iter()
            .map(|x| {
                let mut y = bias.clone();
                for ((w, p), c) in terms.iter().zip(cursors.iter_mut()) {
                    if w.is_zero() {
                        continue;
                    }
                    while p.pts[*c].0 < *x {
                        *c += 1;
                    }
                    let v = if p.pts[*c].0 == *x {
                        p.pts[*c].1.clone()
                    } else {
                        let (x0, y0) = &p.pts[*c - 1];
                        let (x1, y1) = &p.pts[*c];
                        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                    };
                    y += w * v;
                }
                (x.clone(), y)
            })
            .collect();
        Polyline { pts }.minimal()
    }

    /// `min{hi, max{lo, f}}` with either side optional.
    pub fn clamp(&self, lo: Option<&Q>, hi: Option<&Q>) -> Polyline {
        let cuts: Vec<&Q> = lo.into_iter().chain(hi).collect();
        let mut pts = Vec::with_capacity(self.pts.len() + 2);
        for (i, (x, y)) in self.pts.iter().enumerate() {
            if i > 0 {
                let (x0, y0) = &self.pts[i - 1];
                let mut crossings: Vec<Q> = cuts
                    .iter()
                    .filter(|c| (y0 < c && y > c) || (y0 > c && y < c))
                    .map(|c| x0 + (*c - y0) * (x - x0) / (y - y0))
                    .collect();
                crossings.sort();
                pts.extend(crossings.into_iter().map(|cx| (cx, Q::zero())));
            }
            pts.push((x.clone(), Q::zero()));
        }
        // fill values from the unclamped function, then clamp
        for p in &mut pts {
            let mut v = self.eval(&p.0);
            if let Some(l) = lo {
                if v < *l {
                    v = l.clone();
                }
            }
            if let Some(h) = hi {
                if v > *h {
                    v = h.clone();
                }
            }
            p.1 = v;
        }
        Polyline { pts }.minimal()
    }

    pub fn map_affine(&self, scale: &Q, shift: &Q) -> Polyline {
        Polyline {
            pts: self
                .pts
                .iter()
                .map(|(x, y)| (x.clone(), y * scale + shift))
                .collect(),
        }
        .minimal()
    }

    /// Drops vertices interior to a straight segment.
    pub fn minimal(self) -> Polyline {
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(self.pts.len());
        for p in self.pts {
            while out.len() >= 2 {
                let (x0, y0) = &out[out.len() - 2];
                let (x1, y1) = &out[out.len() - 1];
                if (y1 - y0) * (&p.0 - x1) == (&p.1 - y1) * (x1 - x0) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        Polyline { pts: out }
    }
}

/// Exact polyline of a term in at most one variable.
pub(crate) fn term_polyline(t: &Term) -> Result<Polyline> {
    if t.max_var() > 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: t.max_var(),
        });
    }
    let one = Q::one();
    let zero = Q::zero();
    let mut failed = None;
    let line = t.fold(&mut |node: &Term, kids: &[Polyline]| match node.node() {
        Node::Zero => Polyline::constant(Q::zero()),
        Node::Var(_) => Polyline::identity(),
        Node::Not(_) => kids[0].map_affine(&-&one, &one),
        Node::Delta(k, _) => kids[0].map_affine(&(Q::one() / rational_from_u64(*k)), &zero),
        Node::Scale(r, _) => match rational_from_f64_checked(*r) {
            Some(q) => kids[0].map_affine(&q, &zero),
            None => {
                failed = Some(Error::NonFinite);
                Polyline::constant(Q::zero())
            }
        },
        Node::Oplus(..) => {
            Polyline::combine(&[(one.clone(), &kids[0]), (one.clone(), &kids[1])], &zero)
                .clamp(None, Some(&one))
        }
        Node::Odot(..) => {
            Polyline::combine(&[(one.clone(), &kids[0]), (one.clone(), &kids[1])], &-&one)
                .clamp(Some(&zero), None)
        }
    });
    match failed {
        Some(e) => Err(e),
        None => Ok(line),
    }
}

/// Exact polylines of the last affine layer of a one-input network.
pub(crate) fn network_polylines(dense: &Dense<Q>) -> Vec<Polyline> {
    assert_eq!(dense.input_dim, 1, "polylines need a single input");
    let zero = Q::zero();
    let one = Q::one();
    let mut current = vec![Polyline::identity()];
    let last = dense.layers.len() - 1;
    for (l, layer) in dense.layers.iter().enumerate() {
        let pre: Vec<Polyline> = (0..layer.width())
            .map(|j| {
                let terms: Vec<(Q, &Polyline)> = layer.weights[j]
                    .iter()
                    .cloned()
                    .zip(current.iter())
                    .collect();
                Polyline::combine(&terms, &layer.bias[j])
            })
            .collect();
        if l == last {
            return pre;
        }
        current = pre
            .iter()
            .map(|p| match dense.activation {
                crate::network::Activation::Relu => p.clamp(Some(&zero), None),
                crate::network::Activation::Crelu => p.clamp(Some(&zero), Some(&one)),
            })
            .collect();
    }
    unreachable!("loop returns at the last layer")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn hat_polyline() {
        let t = parse_term("(x + x) * ~(x * x)", 1).unwrap();
        let p = term_polyline(&t).unwrap();
        assert_eq!(
            p.pts,
            vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 1)), (q(1, 1), q(0, 1))]
        );
    }

    #[test]
    fn clamp_inserts_crossings() {
        let line = Polyline {
            pts: vec![(q(0, 1), q(-1, 1)), (q(1, 1), q(2, 1))],
        };
        let c = line.clamp(Some(&q(0, 1)), Some(&q(1, 1)));
        assert_eq!(
            c.pts,
            vec![
                (q(0, 1), q(0, 1)),
                (q(1, 3), q(0, 1)),
                (q(2, 3), q(1, 1)),
                (q(1, 1), q(1, 1))
            ]
        );
    }

    #[test]
    fn division_breakpoint_beyond_length() {
        let t = parse_term("x + x + d3(1)", 1).unwrap();
        let p = term_polyline(&t).unwrap();
        assert_eq!(p.pts[1], (q(1, 3), q(1, 1)));
    }
}
