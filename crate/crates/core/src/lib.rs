//! Translation between ReLU networks on the unit cube and formulas of
//! Łukasiewicz logic (MV terms) and its rational (DMV) and real (RMV)
//! extensions.
//!
//! - [`term`]: syntax, semantics and rewriting of terms.
//! - [`network`]: ReLU/CReLU networks, evaluation, composition, JSON codec.
//! - [`compile`]: terms to networks, sawtooth constructions.
//! - [`extract`]: networks to terms.
//! - [`oracle`]: exact and grid-based equivalence checks.
//! - [`experiment`]: the length experiments behind the CLI.

pub mod compile;
pub mod error;
pub mod experiment;
pub mod extract;
pub mod network;
pub mod oracle;
pub mod scalar;
pub mod term;

pub use compile::{build_sawtooth, build_shallow_from_pwl, compile_term, gadget, Architecture, GadgetKind};
pub use error::{Error, Result};
pub use extract::{
    extract_network, extract_network_detailed, extract_network_with, extract_neuron_integer,
    extract_neuron_rational, extract_neuron_real, relu_to_crelu, ExtractOptions, Extraction,
    NeuronTerm,
};
pub use network::{
    compose_networks, decode_network, encode_network, eval_network, propagate_bounds,
    validate_network, Activation, AffineRow, Network, NeuronBound, OutputActivation,
    ValidationReport,
};
pub use oracle::{
    count_breakpoints, grid_equal, grid_witness, pwl_equal, pwl_witness, sample_pwl, sample_term_pwl, term_pwl,
    Pwl1D,
};
pub use scalar::{Number, Scalar, ScalarKind};
pub use term::{
    eval_term, format_term, min_max_encode, parse_term, random_term, simplify, substitute,
    term_length, Logic, MinMax, Term, TermProgram,
};
