use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{point_cmp, HalfPlane, Point, Rational};

/// A (possibly degenerate, possibly half-open) convex region.
///
/// `verts` is the vertex ring of the region's closure: counter-clockwise,
/// collinear and duplicate points removed, rotated so the lexicographically
/// smallest vertex comes first. It has 0 entries for the empty region, 1 for
/// a point, 2 for a segment. `constraints` is the exact membership test: the
/// region is the intersection of those half-planes, each tight somewhere on
/// the closure. Geometric measures (area, ranges, bounding box) come from
/// the ring, membership from the constraints.
#[derive(Clone, Debug)]
pub struct ConvexPolygon {
    verts: Vec<Point>,
    constraints: Vec<HalfPlane>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        ConvexPolygon {
            verts: Vec::new(),
            constraints: Vec::new(),
        }
    }

    /// The half-open square `[0, side) x [0, side)`.
    pub fn half_open_square(side: u64) -> Self {
        let s = BigInt::from(side);
        assert!(s.is_positive());
        let zero = Rational::zero();
        let side_r = Rational::from_integer(s.clone());
        let constraints = vec![
            HalfPlane::new(BigInt::from(-1), BigInt::zero(), zero.clone(), true),
            HalfPlane::new(BigInt::zero(), BigInt::from(-1), zero, true),
            HalfPlane::new(BigInt::one(), BigInt::zero(), side_r.clone(), false),
            HalfPlane::new(BigInt::zero(), BigInt::one(), side_r, false),
        ];
        let verts = vec![
            Point::from_int(0, 0),
            Point {
                x: Rational::from_integer(s.clone()),
                y: Rational::zero(),
            },
            Point {
                x: Rational::from_integer(s.clone()),
                y: Rational::from_integer(s.clone()),
            },
            Point {
                x: Rational::zero(),
                y: Rational::from_integer(s),
            },
        ];
        ConvexPolygon { verts, constraints }
    }

    /// Closed convex hull of the given points (all edges inclusive).
    ///
    /// The points must already be the vertices of a convex polygon in ring
    /// order (either orientation); collinear and repeated points are allowed
    /// and removed.
    pub fn from_closed_ring(points: &[Point]) -> Self {
        let mut verts: Vec<Point> = points.to_vec();
        dedupe_ring(&mut verts);
        strip_collinear(&mut verts);
        if verts.is_empty() {
            return ConvexPolygon::empty();
        }
        if signed_area_twice(&verts).is_negative() {
            verts.reverse();
        }
        rotate_to_min(&mut verts);
        let constraints = match verts.len() {
            1 => {
                let p = &verts[0];
                vec![
                    cap_through(&BigInt::one(), &BigInt::zero(), p),
                    cap_through(&BigInt::from(-1), &BigInt::zero(), p),
                    cap_through(&BigInt::zero(), &BigInt::one(), p),
                    cap_through(&BigInt::zero(), &BigInt::from(-1), p),
                ]
            }
            2 => segment_constraints(&verts[0], &verts[1]),
            _ => {
                let m = verts.len();
                (0..m)
                    .map(|i| edge_halfplane(&verts[i], &verts[(i + 1) % m]))
                    .collect()
            }
        };
        let mut poly = ConvexPolygon { verts, constraints };
        poly.tidy_constraints();
        poly
    }

    pub fn from_closed_ints(points: &[(i64, i64)]) -> Self {
        let pts: Vec<Point> = points.iter().map(|&(x, y)| Point::from_int(x, y)).collect();
        ConvexPolygon::from_closed_ring(&pts)
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.verts
    }

    pub fn constraints(&self) -> &[HalfPlane] {
        &self.constraints
    }

    pub fn contains(&self, p: &Point) -> bool {
        !self.is_empty() && self.constraints.iter().all(|h| h.admits(p))
    }

    pub fn contains_int(&self, x: i64, y: i64) -> bool {
        self.contains(&Point::from_int(x, y))
    }

    /// Area of the closure (degenerate regions have area zero).
    pub fn area(&self) -> Rational {
        if self.verts.len() < 3 {
            return Rational::zero();
        }
        let twice = signed_area_twice(&self.verts);
        twice.abs() / Rational::from_integer(BigInt::from(2))
    }

    /// Intersection with one more half-plane.
    pub fn intersect_halfplane(&self, hp: &HalfPlane) -> Self {
        if self.is_empty() {
            return ConvexPolygon::empty();
        }
        let slacks: Vec<Rational> = self.verts.iter().map(|v| hp.slack(v)).collect();
        let inside: Vec<bool> = slacks
            .iter()
            .map(|s| s.is_positive() || (hp.closed && s.is_zero()))
            .collect();
        if inside.iter().all(|&b| b) {
            return self.clone();
        }
        if slacks.iter().all(|s| s.is_negative())
            || (!hp.closed && slacks.iter().all(|s| !s.is_positive()))
        {
            return ConvexPolygon::empty();
        }
        // Single closure point remaining exactly on a closed boundary.
        if self.verts.len() == 1 {
            // inside[0] is false here, and the not-all-outside test above
            // passed, which is contradictory for one vertex.
            return ConvexPolygon::empty();
        }
        let m = self.verts.len();
        let mut ring: Vec<Point> = Vec::with_capacity(m + 1);
        for i in 0..m {
            let j = (i + 1) % m;
            if inside[i] {
                ring.push(self.verts[i].clone());
            }
            // The closure boundary crosses the line strictly between the two
            // classifications; with mixed signs the denominator is nonzero
            // unless one endpoint sits exactly on the line, in which case the
            // crossing is that endpoint itself.
            if inside[i] != inside[j] {
                let cut = if slacks[i].is_zero() {
                    self.verts[i].clone()
                } else if slacks[j].is_zero() {
                    self.verts[j].clone()
                } else if slacks[i].is_positive() == slacks[j].is_positive() {
                    // Same strict side but different closed/open classification
                    // cannot happen: classifications differ only via a zero
                    // slack, handled above.
                    unreachable!("mixed classification without a sign change")
                } else {
                    let t = slacks[i].clone() / (slacks[i].clone() - slacks[j].clone());
                    Point {
                        x: self.verts[i].x.clone()
                            + t.clone() * (self.verts[j].x.clone() - self.verts[i].x.clone()),
                        y: self.verts[i].y.clone()
                            + t * (self.verts[j].y.clone() - self.verts[i].y.clone()),
                    }
                };
                ring.push(cut);
            }
        }
        let mut constraints = self.constraints.clone();
        constraints.push(hp.clone());
        ConvexPolygon::from_ring_and_constraints(ring, constraints)
    }

    /// Rebuilds canonical form from a closure ring and a covering constraint
    /// list, dropping slack constraints and rejecting emptied regions.
    fn from_ring_and_constraints(mut ring: Vec<Point>, constraints: Vec<HalfPlane>) -> Self {
        dedupe_ring(&mut ring);
        strip_collinear(&mut ring);
        if ring.is_empty() {
            return ConvexPolygon::empty();
        }
        if signed_area_twice(&ring).is_negative() {
            ring.reverse();
        }
        rotate_to_min(&mut ring);
        let mut poly = ConvexPolygon {
            verts: ring,
            constraints,
        };
        poly.tidy_constraints();
        // A degenerate closure may be entirely carved away by open
        // constraints (for example a segment lying on an open boundary).
        if poly.verts.len() <= 2 && !poly.has_admissible_point() {
            return ConvexPolygon::empty();
        }
        poly
    }

    /// Keeps constraints that are tight at some closure vertex, deduplicated
    /// and sorted; anything strictly slack everywhere is implied by the rest.
    fn tidy_constraints(&mut self) {
        let verts = &self.verts;
        self.constraints.retain(|h| {
            verts.iter().any(|v| h.slack(v).is_zero())
        });
        self.constraints.sort();
        self.constraints.dedup();
        // An open and a closed copy of the same boundary can both be tight;
        // the open one subsumes the closed one.
        let mut keep: Vec<HalfPlane> = Vec::with_capacity(self.constraints.len());
        for h in self.constraints.drain(..) {
            if let Some(prev) = keep.last() {
                if prev.a == h.a && prev.b == h.b && prev.bound == h.bound {
                    // Sorted order puts the closed copy after the open one.
                    continue;
                }
            }
            keep.push(h);
        }
        self.constraints = keep;
    }

    /// True when some point of the closure satisfies every constraint.
    fn has_admissible_point(&self) -> bool {
        match self.verts.len() {
            0 => false,
            1 => self.contains(&self.verts[0]),
            2 => {
                if self.contains(&self.verts[0]) || self.contains(&self.verts[1]) {
                    return true;
                }
                let two = Rational::from_integer(BigInt::from(2));
                let mid = Point {
                    x: (self.verts[0].x.clone() + self.verts[1].x.clone()) / two.clone(),
                    y: (self.verts[0].y.clone() + self.verts[1].y.clone()) / two,
                };
                self.contains(&mid)
            }
            _ => true,
        }
    }

    pub fn translate(&self, dx: &BigInt, dy: &BigInt) -> Self {
        if self.is_empty() {
            return ConvexPolygon::empty();
        }
        let dxr = Rational::from_integer(dx.clone());
        let dyr = Rational::from_integer(dy.clone());
        ConvexPolygon {
            verts: self
                .verts
                .iter()
                .map(|p| Point {
                    x: p.x.clone() + dxr.clone(),
                    y: p.y.clone() + dyr.clone(),
                })
                .collect(),
            constraints: self
                .constraints
                .iter()
                .map(|h| h.translate(dx, dy))
                .collect(),
        }
    }

    /// `(min, max)` of `a*x + b*y` over the closure.
    pub fn functional_range(&self, a: &BigInt, b: &BigInt) -> Option<(Rational, Rational)> {
        if self.is_empty() {
            return None;
        }
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for v in &self.verts {
            let val = Rational::from_integer(a.clone()) * &v.x
                + Rational::from_integer(b.clone()) * &v.y;
            match &mut lo {
                Some(cur) if *cur <= val => {}
                _ => lo = Some(val.clone()),
            }
            match &mut hi {
                Some(cur) if *cur >= val => {}
                _ => hi = Some(val),
            }
        }
        Some((lo.unwrap(), hi.unwrap()))
    }

    /// `(xmin, xmax, ymin, ymax)` of the closure.
    pub fn bounding_box(&self) -> Option<(Rational, Rational, Rational, Rational)> {
        let (xmin, xmax) = self.functional_range(&BigInt::one(), &BigInt::zero())?;
        let (ymin, ymax) = self.functional_range(&BigInt::zero(), &BigInt::one())?;
        Some((xmin, xmax, ymin, ymax))
    }

    /// True when the i-th closure edge is excluded from the region (some open
    /// constraint is tight along it).
    fn edge_open(&self, i: usize) -> bool {
        let m = self.verts.len();
        let u = &self.verts[i];
        let v = &self.verts[(i + 1) % m];
        self.constraints
            .iter()
            .any(|h| !h.closed && h.slack(u).is_zero() && h.slack(v).is_zero())
    }

    /// Semantic equality: identical point sets, including which boundary
    /// pieces are excluded.
    pub fn same_region(&self, other: &ConvexPolygon) -> bool {
        if self.verts != other.verts {
            return false;
        }
        let m = self.verts.len();
        if m == 0 {
            return true;
        }
        for i in 0..m {
            if self.contains(&self.verts[i]) != other.contains(&self.verts[i]) {
                return false;
            }
        }
        if m >= 3 {
            for i in 0..m {
                if self.edge_open(i) != other.edge_open(i) {
                    return false;
                }
            }
        }
        true
    }

    /// Deterministic total order used for sorting and deduplication.
    pub fn canonical_cmp(&self, other: &ConvexPolygon) -> Ordering {
        let by_len = self.verts.len().cmp(&other.verts.len());
        if by_len != Ordering::Equal {
            return by_len;
        }
        for (a, b) in self.verts.iter().zip(&other.verts) {
            let c = point_cmp(a, b);
            if c != Ordering::Equal {
                return c;
            }
        }
        self.constraints.cmp(&other.constraints)
    }
}

impl PartialEq for ConvexPolygon {
    fn eq(&self, other: &Self) -> bool {
        self.same_region(other)
    }
}

impl Eq for ConvexPolygon {}

fn signed_area_twice(ring: &[Point]) -> BigRational {
    let m = ring.len();
    let mut acc = BigRational::zero();
    for i in 0..m {
        let j = (i + 1) % m;
        acc += ring[i].x.clone() * ring[j].y.clone() - ring[j].x.clone() * ring[i].y.clone();
    }
    acc
}

fn dedupe_ring(ring: &mut Vec<Point>) {
    ring.dedup();
    while ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
}

/// Drops ring vertices that are not extreme points (interior of a straight
/// edge). A fully collinear ring collapses to its two extreme endpoints, a
/// repeated single point to one.
fn strip_collinear(ring: &mut Vec<Point>) {
    if ring.len() < 3 {
        return;
    }
    if is_fully_collinear(ring) {
        let mut lo = 0;
        let mut hi = 0;
        for (i, p) in ring.iter().enumerate() {
            if point_cmp(p, &ring[lo]) == Ordering::Less {
                lo = i;
            }
            if point_cmp(p, &ring[hi]) == Ordering::Greater {
                hi = i;
            }
        }
        let a = ring[lo].clone();
        let b = ring[hi].clone();
        ring.clear();
        ring.push(a);
        if ring[0] != b {
            ring.push(b);
        }
        return;
    }
    loop {
        let m = ring.len();
        if m < 3 {
            return;
        }
        let mut removed = false;
        let mut i = 0;
        while i < ring.len() && ring.len() >= 3 {
            let m = ring.len();
            let prev = &ring[(i + m - 1) % m];
            let cur = &ring[i];
            let next = &ring[(i + 1) % m];
            if cross(prev, cur, next).is_zero() {
                ring.remove(i);
                removed = true;
            } else {
                i += 1;
            }
        }
        if !removed {
            return;
        }
    }
}

fn is_fully_collinear(ring: &[Point]) -> bool {
    if ring.len() < 3 {
        return true;
    }
    let a = &ring[0];
    let b = ring.iter().find(|p| *p != a);
    let b = match b {
        Some(b) => b,
        None => return true,
    };
    ring.iter().all(|p| cross(a, b, p).is_zero())
}

fn cross(a: &Point, b: &Point, c: &Point) -> BigRational {
    (b.x.clone() - a.x.clone()) * (c.y.clone() - a.y.clone())
        - (b.y.clone() - a.y.clone()) * (c.x.clone() - a.x.clone())
}

fn rotate_to_min(ring: &mut [Point]) {
    if ring.len() < 2 {
        return;
    }
    let mut min = 0;
    for i in 1..ring.len() {
        if point_cmp(&ring[i], &ring[min]) == Ordering::Less {
            min = i;
        }
    }
    ring.rotate_left(min);
}

/// Closed inward half-plane of the directed edge `u -> v` of a CCW ring.
fn edge_halfplane(u: &Point, v: &Point) -> HalfPlane {
    // Outward normal of CCW edge (u, v) is (dy, -dx); inside satisfies
    // dy*x - dx*y <= dy*ux - dx*uy.
    let dx = v.x.clone() - u.x.clone();
    let dy = v.y.clone() - u.y.clone();
    // Clear denominators so the normal is integral.
    let denom_lcm = lcm_big(dx.denom(), dy.denom());
    let scale = Rational::from_integer(denom_lcm);
    let a_r = dy.clone() * scale.clone();
    let b_r = -dx * scale;
    let a = a_r.to_integer();
    let b = b_r.to_integer();
    let bound = Rational::from_integer(a.clone()) * &u.x + Rational::from_integer(b.clone()) * &u.y;
    HalfPlane::new(a, b, bound, true)
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}

/// Closed half-plane `a*x + b*y <= a*px + b*py` through `p`.
fn cap_through(a: &BigInt, b: &BigInt, p: &Point) -> HalfPlane {
    let bound = Rational::from_integer(a.clone()) * &p.x + Rational::from_integer(b.clone()) * &p.y;
    HalfPlane::new(a.clone(), b.clone(), bound, true)
}

/// Constraints describing the closed segment `[u, v]`: both sides of the
/// carrying line plus caps at the endpoints.
fn segment_constraints(u: &Point, v: &Point) -> Vec<HalfPlane> {
    let side = edge_halfplane(u, v);
    let flipped = HalfPlane::new(
        -side.a.clone(),
        -side.b.clone(),
        -side.bound.clone(),
        true,
    );
    // Direction of the segment as an integral vector for the caps.
    let dx = v.x.clone() - u.x.clone();
    let dy = v.y.clone() - u.y.clone();
    let denom_lcm = lcm_big(dx.denom(), dy.denom());
    let scale = Rational::from_integer(denom_lcm);
    let da = (dx * scale.clone()).to_integer();
    let db = (dy * scale).to_integer();
    let cap_hi = cap_through(&da, &db, v);
    let cap_lo = cap_through(&(-da.clone()), &(-db.clone()), u);
    vec![side, flipped, cap_lo, cap_hi]
}
