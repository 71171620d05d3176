use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CellPiece, ChallengeResponsePair, PolygonSet};
use crate::exact_geometry::{ConvexPolygon, DyadicCell, HalfPlane, Rational};

/// Cross-pair filtering at dyadic resolution.
///
/// XOR with a constant maps the integer points of a side-2^m dyadic cell
/// onto exactly one cell of the same size: below bit m the points permute in
/// place, above it only the cell index changes. Two pairs' seed spaces
/// therefore agree at resolution m exactly when their cell indices, each
/// XORed into password space by its own challenge, coincide. `current`'s
/// fragments are re-clipped to cells of exponent `m`; a piece survives iff
/// `other` occupies the matching cell. Only the first argument is cut and
/// filtered; the second contributes occupancy alone.
pub fn procedure2(
    current: &[CellPiece],
    current_pair: &ChallengeResponsePair,
    other: &PolygonSet,
    m: u32,
) -> Vec<CellPiece> {
    assert!(m < 64, "cell exponent out of range");
    let cur_x = (current_pair.challenge_hash.h1 as u64) >> m;
    let cur_y = (current_pair.challenge_hash.h2 as u64) >> m;
    let oth_x = (other.pair.challenge_hash.h1 as u64) >> m;
    let oth_y = (other.pair.challenge_hash.h2 as u64) >> m;
    let mut occupancy: BTreeMap<(u64, u64), bool> = BTreeMap::new();
    let mut survivors = Vec::new();
    for piece in current {
        for refined in split_to_cells(&piece.fragment, m, piece.source) {
            let probe = (
                refined.cell.ix ^ cur_x ^ oth_x,
                refined.cell.iy ^ cur_y ^ oth_y,
            );
            let hit = *occupancy.entry(probe).or_insert_with(|| {
                let cell = DyadicCell::new(probe.0, probe.1, m);
                other.polygons.iter().any(|poly| occupies(poly, &cell))
            });
            if hit {
                survivors.push(refined);
            }
        }
    }
    survivors
}

/// Exact nonemptiness of `poly` within `cell`, with a bounding-box fast
/// path that only ever rejects certainly disjoint closures.
fn occupies(poly: &ConvexPolygon, cell: &DyadicCell) -> bool {
    let (xmin, xmax, ymin, ymax) = match poly.bounding_box() {
        Some(b) => b,
        None => return false,
    };
    let xl = Rational::from_integer(BigInt::from(cell.x_lo()));
    let xh = Rational::from_integer(BigInt::from(cell.x_hi()));
    let yl = Rational::from_integer(BigInt::from(cell.y_lo()));
    let yh = Rational::from_integer(BigInt::from(cell.y_hi()));
    if xmax < xl || xmin > xh || ymax < yl || ymin > yh {
        return false;
    }
    !poly.clip_to_cell(cell).is_empty()
}

/// Cuts a fragment into its nonempty intersections with the exponent-`m`
/// cell grid, scanning cell rows so that the work is proportional to the
/// cells actually met rather than to the bounding box.
pub(crate) fn split_to_cells(fragment: &ConvexPolygon, m: u32, source: usize) -> Vec<CellPiece> {
    let (_, _, ymin, ymax) = match fragment.bounding_box() {
        Some(b) => b,
        None => return Vec::new(),
    };
    let side = BigInt::one() << m;
    let side_r = Rational::from_integer(side.clone());
    debug_assert!(!ymin.is_negative(), "fragments live in the seed domain");
    let iy_lo = (ymin / side_r.clone()).floor().to_integer();
    let iy_hi = (ymax / side_r.clone()).floor().to_integer();
    let mut pieces = Vec::new();
    let mut iy = iy_lo;
    while iy <= iy_hi {
        let y_lo = &iy * &side;
        let y_hi = &y_lo + &side;
        let band = fragment
            .intersect_halfplane(&HalfPlane::new(
                BigInt::zero(),
                BigInt::from(-1),
                Rational::from_integer(-y_lo),
                true,
            ))
            .intersect_halfplane(&HalfPlane::new(
                BigInt::zero(),
                BigInt::one(),
                Rational::from_integer(y_hi),
                false,
            ));
        if let Some((xmin, xmax, _, _)) = band.bounding_box() {
            let ix_lo = (xmin / side_r.clone()).floor().to_integer();
            let ix_hi = (xmax / side_r.clone()).floor().to_integer();
            let mut ix = ix_lo;
            while ix <= ix_hi {
                let x_lo = &ix * &side;
                let x_hi = &x_lo + &side;
                let piece = band
                    .intersect_halfplane(&HalfPlane::new(
                        BigInt::from(-1),
                        BigInt::zero(),
                        Rational::from_integer(-x_lo),
                        true,
                    ))
                    .intersect_halfplane(&HalfPlane::new(
                        BigInt::one(),
                        BigInt::zero(),
                        Rational::from_integer(x_hi.clone()),
                        false,
                    ));
                if !piece.is_empty() {
                    pieces.push(CellPiece {
                        cell: DyadicCell::new(
                            ix.to_u64().expect("cell index fits u64"),
                            iy.to_u64().expect("cell index fits u64"),
                            m,
                        ),
                        fragment: piece,
                        source,
                    });
                }
                ix += 1;
            }
        }
        iy += 1;
    }
    pieces
}
