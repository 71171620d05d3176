//! Cryptanalysis toolkit for the legacy MySQL (3.23-era) challenge-response
//! login.
//!
//! The server sends an eight character challenge, the client answers with
//! eight bytes derived from the stored password hash and the challenge via a
//! weak keyed generator. An eavesdropper who records a handful of such
//! exchanges can recover the stored hash outright. This crate provides the
//! three building blocks:
//!
//! * [`legacy_auth`]: the password hash, the generator, and the scramble
//!   itself, parameterised so that shrunken "toy" domains can be enumerated
//!   exhaustively in tests.
//! * [`exact_geometry`]: exact rational convex polygons with half-open edge
//!   semantics. The attack reduces each observed byte to a family of linear
//!   strip constraints in the plane, so every predicate here is exact; there
//!   are no epsilons anywhere.
//! * [`attack_engine`]: the eavesdropper attack proper. Procedure 1 turns one
//!   exchange into a union of convex polygons guaranteed to contain the
//!   password point, Procedure 2 intersects several exchanges on a dyadic
//!   grid, Procedure 3 sieves the surviving lattice points by forward
//!   evaluation.
//!
//! The crate is `no_std` compatible (with `alloc`); the companion CLI crate
//! carries file formats and IO.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod attack_engine;
pub mod exact_geometry;
pub mod legacy_auth;

pub use attack_engine::{
    extract_points, initial_pieces, procedure1, procedure2, procedure3, recover_w9, run_attack,
    score_candidates, AttackConfig, AttackError, AttackResult, CandidateSet, CellPiece,
    ChallengeResponsePair, PolygonSet, StageRecord,
};
pub use exact_geometry::{ConvexPolygon, DyadicCell, GeometryError, HalfPlane, Point, Rational};
pub use legacy_auth::{
    byte_in_range, form_value, hash_password, linear_coefficients, prng_step,
    random_challenge_text, scramble, scramble_seeds, verify, AuthError, HashHalves, LinearForm,
    PrngState, Response, ScrambleParams, CHALLENGE_LENGTH,
};
