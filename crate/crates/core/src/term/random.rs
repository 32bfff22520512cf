//! Random MV terms of a prescribed length.
//!
//! Length 1 yields `x_i` or `¬x_i`. Longer terms pick `⊕` or `⊙`, split the
//! length uniformly into two positive parts, recurse, and negate the result
//! with probability 1/2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Term;

pub fn random_term(length: usize, arity: usize, seed: u64) -> Term {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_term_with(&mut rng, length, arity)
}

pub fn random_term_with<R: Rng + ?Sized>(rng: &mut R, length: usize, arity: usize) -> Term {
    assert!(length >= 1, "random terms have positive length");
    assert!(arity >= 1, "random terms need at least one variable");
    if length == 1 {
        let v = Term::var(rng.gen_range(1..=arity));
        return if rng.gen_bool(0.5) {
            Term::negation(v)
        } else {
            v
        };
    }
    let use_oplus = rng.gen_bool(0.5);
    let k = rng.gen_range(1..length);
    let left = random_term_with(rng, k, arity);
    let right = random_term_with(rng, length - k, arity);
    let t = if use_oplus {
        Term::oplus(left, right)
    } else {
        Term::odot(left, right)
    };
    if rng.gen_bool(0.5) {
        Term::negation(t)
    } else {
        t
    }
}
