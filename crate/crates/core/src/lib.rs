//! Exact computation in the Higman-Thompson groups `V_n`.
//!
//! Elements are reduced prefix-replacement tables between complete prefix
//! antichains of `{1..n}^*`; see [`element`]. On top of the group
//! arithmetic sit the involutions `sigma_dot`, `tau` and the spinal
//! elements `s_alpha` ([`constructions`]), exact checks of the identities
//! relating them ([`verify`]) and ball growth in finitely generated
//! subgroups ([`search`]).
//!
//! Products use the convention that the right factor acts first, and
//! `g^h = h^-1 g h`, `[g, h] = g h g^-1 h^-1`.

pub mod constructions;
pub mod element;
pub mod error;
pub mod search;
pub mod verify;
pub mod words;

pub use constructions::{
    dot, embed, make_s_alpha, make_s_alpha_direct, make_t, make_tau, plan_alpha, sidon_generate,
    sigma_dot, AlphaPlan, AlphaSequence, Permutation, SidonSet, SidonStrategy,
};
pub use element::{ConeStatus, Order, ProbeOutcome, Sign, SupportReport, VnElement};
pub use error::{Error, Result};
pub use search::{find_element, grow_ball, load_ball, save_ball, Ball, GeneratorSet};
pub use verify::{Verdict, VerificationReport};
pub use words::{is_partition_set, point_normalize, Alphabet, PartitionSet, RationalPoint, Word};
