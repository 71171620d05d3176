//! Property tests pitting the exact polygon kernel against brute-force
//! integer enumeration over small boxes. Every predicate here is exact, so
//! the comparisons are equality, never tolerance.

use descramble_core::{ConvexPolygon, DyadicCell, GeometryError, HalfPlane};
use num_bigint::BigInt;
use proptest::prelude::*;

const SIDE: i64 = 32;

#[derive(Clone, Debug)]
struct Hp {
    a: i64,
    b: i64,
    bound: i64,
    closed: bool,
}

impl Hp {
    fn admits(&self, x: i64, y: i64) -> bool {
        let v = self.a * x + self.b * y;
        if self.closed {
            v <= self.bound
        } else {
            v < self.bound
        }
    }

    fn to_halfplane(&self) -> HalfPlane {
        HalfPlane::from_ints(self.a, self.b, self.bound, self.closed)
    }
}

fn hp_strategy() -> impl Strategy<Value = Hp> {
    (
        -9i64..=9,
        -9i64..=9,
        -600i64..=600,
        any::<bool>(),
    )
        .prop_filter_map("degenerate normal", |(a, b, bound, closed)| {
            if a == 0 && b == 0 {
                None
            } else {
                Some(Hp { a, b, bound, closed })
            }
        })
}

fn hps_strategy() -> impl Strategy<Value = Vec<Hp>> {
    proptest::collection::vec(hp_strategy(), 0..6)
}

fn clip_all(hps: &[Hp]) -> ConvexPolygon {
    let mut poly = ConvexPolygon::half_open_square(SIDE as u64);
    for hp in hps {
        poly = poly.intersect_halfplane(&hp.to_halfplane());
    }
    poly
}

/// Row-major (y outer, x inner), matching the lattice visitor's order.
fn brute_points(hps: &[Hp]) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for y in 0..SIDE {
        for x in 0..SIDE {
            if hps.iter().all(|hp| hp.admits(x, y)) {
                out.push((x, y));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn lattice_points_match_brute_enumeration(hps in hps_strategy()) {
        let poly = clip_all(&hps);
        let expected = brute_points(&hps);
        prop_assert_eq!(poly.lattice_points(), expected.clone());
        prop_assert_eq!(poly.lattice_count(), expected.len() as u128);
        if poly.is_empty() {
            prop_assert_eq!(expected.len(), 0);
        }
    }

    #[test]
    fn membership_agrees_pointwise(hps in hps_strategy(), x in -2i64..SIDE + 2, y in -2i64..SIDE + 2) {
        let poly = clip_all(&hps);
        let in_box = (0..SIDE).contains(&x) && (0..SIDE).contains(&y);
        let expected = in_box && hps.iter().all(|hp| hp.admits(x, y));
        prop_assert_eq!(poly.contains_int(x, y), expected);
    }

    #[test]
    fn translation_shifts_every_lattice_point(hps in hps_strategy(), dx in -40i64..=40, dy in -40i64..=40) {
        let poly = clip_all(&hps);
        let moved = poly.translate(&BigInt::from(dx), &BigInt::from(dy));
        let expected: Vec<(i64, i64)> =
            poly.lattice_points().iter().map(|&(x, y)| (x + dx, y + dy)).collect();
        prop_assert_eq!(moved.lattice_points(), expected);
    }

    #[test]
    fn functional_range_bounds_every_lattice_value(hps in hps_strategy(), a in -9i64..=9, b in -9i64..=9) {
        let poly = clip_all(&hps);
        let (ba, bb) = (BigInt::from(a), BigInt::from(b));
        match poly.functional_range(&ba, &bb) {
            None => prop_assert!(poly.is_empty()),
            Some((lo, hi)) => {
                prop_assert!(lo <= hi);
                for (x, y) in poly.lattice_points() {
                    let v = descramble_core::Rational::from_integer(BigInt::from(a * x + b * y));
                    prop_assert!(lo.clone() <= v && v <= hi.clone(), "({x},{y}) out of [{lo},{hi}]");
                }
            }
        }
    }

    #[test]
    fn bounding_box_contains_all_vertices_and_points(hps in hps_strategy()) {
        let poly = clip_all(&hps);
        match poly.bounding_box() {
            None => prop_assert!(poly.is_empty()),
            Some((xmin, xmax, ymin, ymax)) => {
                for (x, y) in poly.lattice_points() {
                    let (rx, ry) = (
                        descramble_core::Rational::from_integer(BigInt::from(x)),
                        descramble_core::Rational::from_integer(BigInt::from(y)),
                    );
                    prop_assert!(xmin.clone() <= rx && rx <= xmax.clone());
                    prop_assert!(ymin.clone() <= ry && ry <= ymax.clone());
                }
            }
        }
    }

    #[test]
    fn cell_clipping_restricts_points_to_the_cell(hps in hps_strategy(), ix in 0u64..4, iy in 0u64..4) {
        let poly = clip_all(&hps);
        let cell = DyadicCell::new(ix, iy, 3);
        let clipped = poly.clip_to_cell(&cell);
        let expected: Vec<(i64, i64)> = poly
            .lattice_points()
            .into_iter()
            .filter(|&(x, y)| {
                (x as u64) >> 3 == ix && (y as u64) >> 3 == iy && x >= 0 && y >= 0
            })
            .collect();
        prop_assert_eq!(clipped.lattice_points(), expected);
    }

    #[test]
    fn budget_is_enforced_exactly(hps in hps_strategy()) {
        let poly = clip_all(&hps);
        let points = poly.lattice_points();
        match poly.lattice_points_budgeted(7) {
            Ok(got) => {
                prop_assert!(points.len() <= 7);
                prop_assert_eq!(got, points);
            }
            Err(GeometryError::BudgetExceeded { budget }) => {
                prop_assert_eq!(budget, 7);
                prop_assert!(points.len() > 7);
            }
            Err(other) => prop_assert!(false, "unexpected error {:?}", other),
        }
    }

    #[test]
    fn area_stays_within_the_clip_square(hps in hps_strategy()) {
        let poly = clip_all(&hps);
        let area = poly.area();
        let zero = descramble_core::Rational::from_integer(BigInt::from(0));
        let full = descramble_core::Rational::from_integer(BigInt::from(SIDE * SIDE));
        prop_assert!(area >= zero);
        prop_assert!(area <= full);
    }
}

/// The half-open square itself: edges at x=0 and y=0 belong to the region,
/// the far edges do not.
#[test]
fn half_open_square_boundary_semantics() {
    let sq = ConvexPolygon::half_open_square(4);
    assert!(sq.contains_int(0, 0));
    assert!(sq.contains_int(3, 3));
    assert!(!sq.contains_int(4, 0));
    assert!(!sq.contains_int(0, 4));
    assert_eq!(sq.lattice_count(), 16);
}
