use alloc::vec::Vec;

use rand_core::SeedableRng;

use super::{AttackError, CandidateSet, CellPiece, ChallengeResponsePair};
use crate::legacy_auth::{
    hash_password, random_challenge_text, scramble, HashHalves, ScrambleParams,
};

/// Enumerates every lattice point of the surviving fragments and maps each
/// seed pair back to password space through the pair's challenge. The
/// output reproduces the base pair's response by construction, hence
/// `pairs_survived = 1`.
pub fn extract_points(
    pieces: &[CellPiece],
    pair: &ChallengeResponsePair,
    budget: u64,
) -> Result<CandidateSet, AttackError> {
    let c1 = pair.challenge_hash.h1;
    let c2 = pair.challenge_hash.h2;
    let mut points: Vec<HashHalves> = Vec::new();
    let mut remaining = budget;
    for piece in pieces {
        let complete = piece.fragment.visit_lattice_points(|x, y| {
            if remaining == 0 {
                return false;
            }
            remaining -= 1;
            points.push(HashHalves::new((x as u64) as u32 ^ c1, (y as u64) as u32 ^ c2));
            true
        });
        if !complete {
            return Err(AttackError::BudgetExceeded { budget });
        }
    }
    points.sort_unstable();
    points.dedup();
    Ok(CandidateSet {
        points,
        pairs_survived: 1,
    })
}

/// Keeps the candidates whose forward scramble reproduces the pair's
/// response. The true hash always passes, so it is never eliminated.
pub fn procedure3(
    candidates: &CandidateSet,
    pair: &ChallengeResponsePair,
    params: &ScrambleParams,
) -> CandidateSet {
    let points = candidates
        .points
        .iter()
        .filter(|p| scramble(**p, pair.challenge_hash, params) == pair.response)
        .copied()
        .collect();
    CandidateSet {
        points,
        pairs_survived: candidates.pairs_survived + 1,
    }
}

/// Pass rate of each candidate against `trials` fresh random challenges,
/// judged by agreement with the true hash's response. Deterministic for a
/// given seed; the true hash scores exactly 1.0.
pub fn score_candidates(
    candidates: &CandidateSet,
    truth: &HashHalves,
    trials: usize,
    seed: u64,
    params: &ScrambleParams,
) -> Vec<f64> {
    assert!(trials >= 1, "need at least one trial");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut hits = alloc::vec![0usize; candidates.points.len()];
    for _ in 0..trials {
        let text = random_challenge_text(&mut rng);
        let challenge = hash_password(&text);
        let expected = scramble(*truth, challenge, params);
        for (hit, candidate) in hits.iter_mut().zip(&candidates.points) {
            if scramble(*candidate, challenge, params) == expected {
                *hit += 1;
            }
        }
    }
    hits.into_iter()
        .map(|h| h as f64 / trials as f64)
        .collect()
}
