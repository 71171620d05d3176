use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ConvexPolygon, GeometryError, HalfPlane, Rational};

/// An axis-aligned square `[ix*2^e, (ix+1)*2^e) x [iy*2^e, (iy+1)*2^e)`,
/// low edges included, high edges excluded.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DyadicCell {
    pub ix: u64,
    pub iy: u64,
    pub exponent: u32,
}

impl DyadicCell {
    pub fn new(ix: u64, iy: u64, exponent: u32) -> Self {
        assert!(exponent < 64);
        DyadicCell { ix, iy, exponent }
    }

    /// Cell of the given size containing the point.
    pub fn containing(x: u64, y: u64, exponent: u32) -> Self {
        assert!(exponent < 64);
        DyadicCell {
            ix: x >> exponent,
            iy: y >> exponent,
            exponent,
        }
    }

    pub fn side(&self) -> u128 {
        1u128 << self.exponent
    }

    pub fn x_lo(&self) -> u128 {
        (self.ix as u128) << self.exponent
    }

    pub fn y_lo(&self) -> u128 {
        (self.iy as u128) << self.exponent
    }

    pub fn x_hi(&self) -> u128 {
        self.x_lo() + self.side()
    }

    pub fn y_hi(&self) -> u128 {
        self.y_lo() + self.side()
    }

    /// The four boundary half-planes, in clipping order.
    pub fn halfplanes(&self) -> [HalfPlane; 4] {
        let xl = Rational::from_integer(BigInt::from(self.x_lo()));
        let xh = Rational::from_integer(BigInt::from(self.x_hi()));
        let yl = Rational::from_integer(BigInt::from(self.y_lo()));
        let yh = Rational::from_integer(BigInt::from(self.y_hi()));
        [
            HalfPlane::new(BigInt::from(-1), BigInt::zero(), -xl, true),
            HalfPlane::new(BigInt::one(), BigInt::zero(), xh, false),
            HalfPlane::new(BigInt::zero(), BigInt::from(-1), -yl, true),
            HalfPlane::new(BigInt::zero(), BigInt::one(), yh, false),
        ]
    }
}

impl ConvexPolygon {
    /// Intersection with a half-open dyadic cell.
    pub fn clip_to_cell(&self, cell: &DyadicCell) -> ConvexPolygon {
        let mut out = self.clone();
        for hp in cell.halfplanes() {
            if out.is_empty() {
                return out;
            }
            out = out.intersect_halfplane(&hp);
        }
        out
    }

    /// Inclusive range of integer x with `(x, y)` in the region, for one
    /// integer row y. Half-open constraints exclude their boundary exactly.
    pub fn row_interval(&self, y: &BigInt) -> Option<(BigInt, BigInt)> {
        if self.is_empty() {
            return None;
        }
        let (xmin, xmax, _, _) = self.bounding_box().expect("nonempty polygon has a bbox");
        let mut lo = xmin.ceil().to_integer();
        let mut hi = xmax.floor().to_integer();
        let y_r = Rational::from_integer(y.clone());
        for h in self.constraints() {
            let rest = h.bound.clone() - Rational::from_integer(h.b.clone()) * &y_r;
            if h.a.is_zero() {
                let ok = rest.is_positive() || (h.closed && rest.is_zero());
                if !ok {
                    return None;
                }
            } else if h.a.is_positive() {
                let q = rest / Rational::from_integer(h.a.clone());
                let cand = if h.closed { floor_int(&q) } else { floor_strict(&q) };
                if cand < hi {
                    hi = cand;
                }
            } else {
                let q = rest / Rational::from_integer(h.a.clone());
                let cand = if h.closed { ceil_int(&q) } else { ceil_strict(&q) };
                if cand > lo {
                    lo = cand;
                }
            }
        }
        if lo <= hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Calls `f` for every lattice point of the region in row-major order
    /// (ascending y, then ascending x). Returns false if `f` aborted the
    /// walk by returning false.
    pub fn visit_lattice_points(&self, mut f: impl FnMut(i64, i64) -> bool) -> bool {
        let (_, _, ymin, ymax) = match self.bounding_box() {
            Some(b) => b,
            None => return true,
        };
        let y0 = ceil_int(&ymin);
        let y1 = floor_int(&ymax);
        let mut y = y0;
        while y <= y1 {
            if let Some((lo, hi)) = self.row_interval(&y) {
                let mut x = lo;
                let yi = big_to_i64(&y);
                while x <= hi {
                    if !f(big_to_i64(&x), yi) {
                        return false;
                    }
                    x += 1;
                }
            }
            y += 1;
        }
        true
    }

    /// All lattice points of the region, row-major ascending.
    pub fn lattice_points(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        self.visit_lattice_points(|x, y| {
            out.push((x, y));
            true
        });
        out
    }

    /// As `lattice_points`, but fails once more than `budget` points exist.
    pub fn lattice_points_budgeted(&self, budget: u64) -> Result<Vec<(i64, i64)>, GeometryError> {
        let mut out = Vec::new();
        let complete = self.visit_lattice_points(|x, y| {
            if out.len() as u64 >= budget {
                return false;
            }
            out.push((x, y));
            true
        });
        if complete {
            Ok(out)
        } else {
            Err(GeometryError::BudgetExceeded { budget })
        }
    }

    /// Number of lattice points, without materializing them.
    pub fn lattice_count(&self) -> u128 {
        let (_, _, ymin, ymax) = match self.bounding_box() {
            Some(b) => b,
            None => return 0,
        };
        let mut total: u128 = 0;
        let mut y = ceil_int(&ymin);
        let y1 = floor_int(&ymax);
        while y <= y1 {
            if let Some((lo, hi)) = self.row_interval(&y) {
                let width = (&hi - &lo) + BigInt::one();
                total += width.to_u128().expect("row width fits u128");
            }
            y += 1;
        }
        total
    }
}

fn floor_int(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

fn ceil_int(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// Largest integer strictly below q.
fn floor_strict(q: &Rational) -> BigInt {
    if q.is_integer() {
        q.to_integer() - BigInt::one()
    } else {
        floor_int(q)
    }
}

/// Smallest integer strictly above q.
fn ceil_strict(q: &Rational) -> BigInt {
    if q.is_integer() {
        q.to_integer() + BigInt::one()
    } else {
        ceil_int(q)
    }
}

fn big_to_i64(v: &BigInt) -> i64 {
    v.to_i64().expect("lattice coordinate fits i64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn half_open_square_counts() {
        let sq = ConvexPolygon::half_open_square(4);
        assert_eq!(sq.lattice_count(), 16);
        let pts = sq.lattice_points();
        assert_eq!(pts.len(), 16);
        assert_eq!(pts[0], (0, 0));
        assert_eq!(pts[15], (3, 3));
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        assert_eq!(pts, sorted);
    }

    #[test]
    fn closed_square_counts_boundary() {
        let sq = ConvexPolygon::from_closed_ints(&[(0, 0), (4, 0), (4, 4), (0, 4)]);
        assert_eq!(sq.lattice_count(), 25);
    }

    #[test]
    fn open_hypotenuse_excluded() {
        let sq = ConvexPolygon::half_open_square(8);
        let tri = sq.intersect_halfplane(&HalfPlane::from_ints(1, 1, 4, false));
        // x + y < 4, x, y >= 0: rows 0..=3 with 4 - y points each... row y
        // has x in [0, 3 - y], so 4 + 3 + 2 + 1.
        assert_eq!(tri.lattice_count(), 10);
        assert!(tri.lattice_points().iter().all(|&(x, y)| x + y < 4));
        let closed = sq.intersect_halfplane(&HalfPlane::from_ints(1, 1, 4, true));
        assert_eq!(closed.lattice_count(), 15);
    }

    #[test]
    fn degenerate_rows() {
        let seg = ConvexPolygon::from_closed_ints(&[(2, 1), (2, 5)]);
        assert_eq!(seg.lattice_count(), 5);
        assert_eq!(
            seg.lattice_points(),
            vec![(2, 1), (2, 2), (2, 3), (2, 4), (2, 5)]
        );
        let dot = ConvexPolygon::from_closed_ints(&[(3, 3)]);
        assert_eq!(dot.lattice_points(), vec![(3, 3)]);
        let diag = ConvexPolygon::from_closed_ints(&[(0, 0), (3, 3)]);
        assert_eq!(diag.lattice_points(), vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        // A segment with non-integer lattice-free rows.
        let skew = ConvexPolygon::from_closed_ints(&[(0, 0), (3, 2)]);
        assert_eq!(skew.lattice_points(), vec![(0, 0), (3, 2)]);
        assert!(ConvexPolygon::empty().lattice_points().is_empty());
        assert_eq!(ConvexPolygon::empty().lattice_count(), 0);
    }

    #[test]
    fn row_interval_respects_openness() {
        let sq = ConvexPolygon::half_open_square(4);
        assert_eq!(
            sq.row_interval(&BigInt::from(0)),
            Some((BigInt::from(0), BigInt::from(3)))
        );
        assert_eq!(sq.row_interval(&BigInt::from(4)), None);
        assert_eq!(sq.row_interval(&BigInt::from(-1)), None);
    }

    #[test]
    fn budget_enforced() {
        let sq = ConvexPolygon::half_open_square(4);
        assert_eq!(
            sq.lattice_points_budgeted(15),
            Err(GeometryError::BudgetExceeded { budget: 15 })
        );
        assert_eq!(sq.lattice_points_budgeted(16).unwrap().len(), 16);
        assert_eq!(sq.lattice_points_budgeted(100).unwrap().len(), 16);
    }

    #[test]
    fn cell_clipping() {
        let sq = ConvexPolygon::half_open_square(16);
        let cell = DyadicCell::new(1, 2, 2);
        let piece = sq.clip_to_cell(&cell);
        assert_eq!(piece.lattice_count(), 16);
        assert!(piece.contains_int(4, 8));
        assert!(piece.contains_int(7, 11));
        assert!(!piece.contains_int(8, 8));
        assert!(!piece.contains_int(4, 12));
        assert_eq!(DyadicCell::containing(7, 11, 2), cell);
        assert_eq!(DyadicCell::containing(8, 11, 2), DyadicCell::new(2, 2, 2));
        // Cell wholly outside.
        let outside = sq.clip_to_cell(&DyadicCell::new(5, 0, 2));
        assert!(outside.is_empty());
        // Everything at exponent 0 is a unit cell holding one lattice point.
        let unit = sq.clip_to_cell(&DyadicCell::new(3, 3, 0));
        assert_eq!(unit.lattice_points(), vec![(3, 3)]);
    }

    #[test]
    fn visitor_abort_propagates() {
        let sq = ConvexPolygon::half_open_square(4);
        let mut seen: Vec<(i64, i64)> = Vec::new();
        let completed = sq.visit_lattice_points(|x, y| {
            seen.push((x, y));
            seen.len() < 5
        });
        assert!(!completed);
        assert_eq!(seen.len(), 5);
        assert_eq!(seen, vec![(0, 0), (1, 0), (2, 0), (3, 0), (0, 1)]);
    }
}
