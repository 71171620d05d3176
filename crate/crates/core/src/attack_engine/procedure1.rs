use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{rational_to_f64, AttackError, CellPiece, ChallengeResponsePair};
use crate::exact_geometry::{ConvexPolygon, DyadicCell, HalfPlane, Rational};
use crate::legacy_auth::{linear_coefficients, LinearForm, ScrambleParams};

/// The exact preimage of one response under one mask digit: a union of
/// convex regions of seed space whose lattice points all scramble to the
/// observed bytes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolygonSet {
    pub pair: ChallengeResponsePair,
    pub w9: u8,
    pub polygons: Vec<ConvexPolygon>,
}

impl PolygonSet {
    pub fn polygon_count(&self) -> usize {
        self.polygons.len()
    }

    /// Polygons not cut by the seed-domain boundary. A cut leaves an edge of
    /// positive length on a domain side; region boundaries never run along
    /// the axes (their normals have two positive components), so two ring
    /// vertices on one side identify a cut exactly.
    pub fn full_translate_count(&self, params: &ScrambleParams) -> usize {
        let side = Rational::from_integer(BigInt::from(params.half_width()));
        let zero = Rational::zero();
        self.polygons
            .iter()
            .filter(|poly| {
                let on_line = |f: &dyn Fn(&crate::exact_geometry::Point) -> bool| {
                    poly.vertices().iter().filter(|v| f(v)).count() >= 2
                };
                !(on_line(&|v| v.x == zero)
                    || on_line(&|v| v.x == side)
                    || on_line(&|v| v.y == zero)
                    || on_line(&|v| v.y == side))
            })
            .count()
    }

    pub fn total_area(&self) -> f64 {
        self.polygons
            .iter()
            .map(|p| rational_to_f64(&p.area()))
            .sum()
    }

    /// True when some polygon contains the seed point.
    pub fn contains_seed(&self, x: u64, y: u64) -> bool {
        self.polygons
            .iter()
            .any(|p| p.contains_int(x as i64, y as i64))
    }
}

/// Digit sequence implied by a response under mask digit `k`: the masked
/// byte digits, then `k` itself as the final generator digit. `None` when
/// any digit falls outside the generator's range, which rules `k` out.
fn masked_digits(response: &[u8], k: u8, params: &ScrambleParams) -> Option<Vec<u64>> {
    if (k as u64) >= params.digit_span {
        return None;
    }
    let mut digits = Vec::with_capacity(response.len() + 1);
    for &byte in response {
        let digit = (byte ^ k).wrapping_sub(params.digit_offset) as u64;
        if digit >= params.digit_span {
            return None;
        }
        digits.push(digit);
    }
    digits.push(k as u64);
    Some(digits)
}

/// One digit's strip pair: `lo <= alpha*x + beta*y < hi` where
/// `lo = (n/span)*d + delta*n - additive*gamma` and `hi` is one digit step
/// higher.
fn strip_halfplanes(
    form: &LinearForm,
    digit: u64,
    delta: &BigInt,
    params: &ScrambleParams,
) -> (HalfPlane, HalfPlane) {
    let n = BigInt::from(params.modulus);
    let span = BigInt::from(params.digit_span);
    let gamma_term = Rational::from_integer(
        BigInt::from(form.gamma.clone()) * BigInt::from(params.additive),
    );
    let lo = Rational::new(&n * BigInt::from(digit), span.clone()) + Rational::from_integer(delta * &n)
        - gamma_term.clone();
    let hi = Rational::new(&n * BigInt::from(digit + 1), span) + Rational::from_integer(delta * &n)
        - gamma_term;
    let alpha = BigInt::from(form.alpha.clone());
    let beta = BigInt::from(form.beta.clone());
    let lower = HalfPlane::new(-alpha.clone(), -beta.clone(), -lo, true);
    let upper = HalfPlane::new(alpha, beta, hi, false);
    (lower, upper)
}

/// Wrap counts whose strip can meet a region where `alpha*x + beta*y`
/// ranges over `[vlo, vhi]` (the `additive*gamma` constant included).
fn delta_range(
    form: &LinearForm,
    digit: u64,
    vlo: &Rational,
    vhi: &Rational,
    params: &ScrambleParams,
) -> Option<(BigInt, BigInt)> {
    let n = Rational::from_integer(BigInt::from(params.modulus));
    let span = BigInt::from(params.digit_span);
    let lo_edge = Rational::new(
        BigInt::from(params.modulus) * BigInt::from(digit),
        span.clone(),
    );
    let hi_edge = Rational::new(BigInt::from(params.modulus) * BigInt::from(digit + 1), span);
    // Strip [lo_edge + dn, hi_edge + dn) meets [vlo, vhi] iff
    // (vlo - hi_edge)/n < d <= (vhi - lo_edge)/n.
    let mut lo = ((vlo - hi_edge) / n.clone()).floor().to_integer() + BigInt::one();
    let mut hi = ((vhi - lo_edge) / n).floor().to_integer();
    if lo.is_negative() {
        lo = BigInt::zero();
    }
    let max = BigInt::from(form.delta_max.clone());
    if hi > max {
        hi = max;
    }
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Branch-and-prune strip intersection: clips the seed square through one
/// strip per digit, branching only over wrap counts whose strip meets the
/// live fragment, then deduplicates regions reachable along several paths.
fn strip_search(digits: &[u64], params: &ScrambleParams) -> Vec<ConvexPolygon> {
    let mut regions = vec![ConvexPolygon::half_open_square(params.half_width())];
    for (idx, &digit) in digits.iter().enumerate() {
        let form = linear_coefficients(idx + 1, params);
        let alpha = BigInt::from(form.alpha.clone());
        let beta = BigInt::from(form.beta.clone());
        let gamma_term = Rational::from_integer(
            BigInt::from(form.gamma.clone()) * BigInt::from(params.additive),
        );
        let mut next = Vec::new();
        for region in &regions {
            let (flo, fhi) = match region.functional_range(&alpha, &beta) {
                Some(range) => range,
                None => continue,
            };
            let vlo = flo + gamma_term.clone();
            let vhi = fhi + gamma_term.clone();
            let (dlo, dhi) = match delta_range(&form, digit, &vlo, &vhi, params) {
                Some(range) => range,
                None => continue,
            };
            let mut delta = dlo;
            while delta <= dhi {
                let (lower, upper) = strip_halfplanes(&form, digit, &delta, params);
                let clipped = region.intersect_halfplane(&lower).intersect_halfplane(&upper);
                if !clipped.is_empty() {
                    next.push(clipped);
                }
                delta += 1;
            }
        }
        regions = next;
        if regions.is_empty() {
            break;
        }
    }
    regions.sort_by(|a, b| a.canonical_cmp(b));
    regions.dedup_by(|a, b| a.same_region(b));
    regions
}

/// Tries every mask digit and keeps those with a nonempty region system.
/// Soundness: the true seed pair always lies in the set for the true mask
/// digit; empirically exactly one digit survives.
pub fn recover_w9(pair: &ChallengeResponsePair, params: &ScrambleParams) -> Vec<PolygonSet> {
    let mut sets = Vec::new();
    for k in 0..32u8 {
        let digits = match masked_digits(pair.response.as_bytes(), k, params) {
            Some(d) => d,
            None => continue,
        };
        let polygons = strip_search(&digits, params);
        if !polygons.is_empty() {
            sets.push(PolygonSet {
                pair: pair.clone(),
                w9: k,
                polygons,
            });
        }
    }
    sets
}

/// Inverts one pair into its seed-space polygon set. When several mask
/// digits survive (never observed) the regions are unioned under the
/// smallest digit so that no preimage point is ever dropped.
pub fn procedure1(
    pair: &ChallengeResponsePair,
    params: &ScrambleParams,
) -> Result<PolygonSet, AttackError> {
    let mut sets = recover_w9(pair, params).into_iter();
    let mut first = match sets.next() {
        Some(set) => set,
        None => return Err(AttackError::NoPolygons { pair_index: None }),
    };
    for set in sets {
        first.polygons.extend(set.polygons);
    }
    first.polygons.sort_by(|a, b| a.canonical_cmp(b));
    first.polygons.dedup_by(|a, b| a.same_region(b));
    Ok(first)
}

/// Wraps whole polygons as pieces of the all-covering root cell, ready for
/// the first cell-filter round.
pub fn initial_pieces(sets: &[PolygonSet], params: &ScrambleParams) -> Vec<CellPiece> {
    let root = DyadicCell::new(0, 0, params.half_width_bits);
    let mut pieces = Vec::new();
    for (source, set) in sets.iter().enumerate() {
        for poly in &set.polygons {
            pieces.push(CellPiece {
                cell: root,
                fragment: poly.clone(),
                source,
            });
        }
    }
    pieces
}
