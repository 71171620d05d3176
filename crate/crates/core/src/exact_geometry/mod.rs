//! Exact rational geometry in the plane.
//!
//! The attack's regions are intersections of half-open strips, so polygons
//! here carry per-constraint closedness and every predicate is decided in
//! exact big-rational arithmetic. Vertices store the *closure* of a region;
//! membership is always answered from the constraint list, which is what
//! keeps half-open boundaries and degenerate (zero-area) regions honest.

mod lattice;
mod polygon;

use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub use lattice::DyadicCell;
pub use polygon::ConvexPolygon;

/// Exact scalar: arbitrary-precision rational, always reduced, denominator
/// positive.
pub type Rational = BigRational;

/// A point with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_int(x: i64, y: i64) -> Self {
        Point {
            x: Rational::from_integer(BigInt::from(x)),
            y: Rational::from_integer(BigInt::from(y)),
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (
            self.x.to_f64().unwrap_or(f64::NAN),
            self.y.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// The set `{(x, y) : a*x + b*y <= bound}`, or `<` when `open`.
///
/// `(a, b)` is never zero and is stored divided by `gcd(|a|, |b|)`, so equal
/// half-planes compare equal structurally.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct HalfPlane {
    pub a: BigInt,
    pub b: BigInt,
    pub bound: Rational,
    pub closed: bool,
}

impl HalfPlane {
    pub fn new(a: BigInt, b: BigInt, bound: Rational, closed: bool) -> Self {
        assert!(
            !a.is_zero() || !b.is_zero(),
            "half-plane normal must be nonzero"
        );
        let g = a.abs().gcd(&b.abs());
        let scale = Rational::from_integer(g.clone());
        HalfPlane {
            a: a / &g,
            b: b / &g,
            bound: bound / scale,
            closed,
        }
    }

    pub fn closed_halfplane(a: BigInt, b: BigInt, bound: Rational) -> Self {
        HalfPlane::new(a, b, bound, true)
    }

    pub fn open_halfplane(a: BigInt, b: BigInt, bound: Rational) -> Self {
        HalfPlane::new(a, b, bound, false)
    }

    /// Convenience for integer data (tests and cell edges).
    pub fn from_ints(a: i64, b: i64, bound: i64, closed: bool) -> Self {
        HalfPlane::new(
            BigInt::from(a),
            BigInt::from(b),
            Rational::from_integer(BigInt::from(bound)),
            closed,
        )
    }

    pub fn eval(&self, p: &Point) -> Rational {
        Rational::from_integer(self.a.clone()) * &p.x
            + Rational::from_integer(self.b.clone()) * &p.y
    }

    /// `bound - (a*x + b*y)`: nonnegative on the closure of the half-plane.
    pub fn slack(&self, p: &Point) -> Rational {
        self.bound.clone() - self.eval(p)
    }

    pub fn admits(&self, p: &Point) -> bool {
        let s = self.slack(p);
        s.is_positive() || (self.closed && s.is_zero())
    }

    pub fn translate(&self, dx: &BigInt, dy: &BigInt) -> Self {
        HalfPlane {
            a: self.a.clone(),
            b: self.b.clone(),
            bound: self.bound.clone() + Rational::from_integer(&self.a * dx + &self.b * dy),
            closed: self.closed,
        }
    }
}

/// Total order on points of a vertex ring: lexicographic by `(x, y)`.
pub(crate) fn point_cmp(a: &Point, b: &Point) -> Ordering {
    a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GeometryError {
    /// Lattice enumeration would exceed the caller's point budget.
    BudgetExceeded { budget: u64 },
    /// An operation that needs a nonempty polygon was given an empty one.
    EmptyPolygon,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::BudgetExceeded { budget } => {
                write!(f, "lattice enumeration exceeded the budget of {budget} points")
            }
            GeometryError::EmptyPolygon => write!(f, "operation undefined on an empty polygon"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GeometryError {}
