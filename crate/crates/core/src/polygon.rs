//! Lower convex hulls of valuation point sets with exact rational ordinates.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A point `(s, u)`; `u = None` is ⊥ (+∞ at the working precision), in
/// which case `lower_bound` may record the smallest ordinate it could have.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolygonPoint {
    pub s: usize,
    pub u: Option<Rational64>,
    pub lower_bound: Option<Rational64>,
}

impl PolygonPoint {
    pub fn new(s: usize, u: i64) -> Self {
        PolygonPoint {
            s,
            u: Some(Rational64::from_integer(u)),
            lower_bound: None,
        }
    }

    pub fn rational(s: usize, u: Rational64) -> Self {
        PolygonPoint {
            s,
            u: Some(u),
            lower_bound: None,
        }
    }

    pub fn unknown(s: usize, lower_bound: Option<i64>) -> Self {
        PolygonPoint {
            s,
            u: None,
            lower_bound: lower_bound.map(Rational64::from_integer),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub s: usize,
    #[serde(serialize_with = "ser_rat")]
    pub u: Rational64,
}

fn ser_rat<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// One side; for a negative slope `-h/e` the pair `(h, e)` is coprime and positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Side {
    pub start: Vertex,
    pub end: Vertex,
    #[serde(serialize_with = "ser_rat")]
    pub slope: Rational64,
    pub h: i64,
    pub e: i64,
}

impl Side {
    pub fn length(&self) -> usize {
        self.end.s - self.start.s
    }

    /// Number of lattice segments of slope `-h/e` (length / e).
    pub fn degree(&self) -> usize {
        self.length() / self.e as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<Vertex>,
    pub sides: Vec<Side>,
    /// True when a ⊥ point could lie on or below the hull at higher precision.
    pub dropped_may_interfere: bool,
}

fn make_side(a: Vertex, b: Vertex) -> Side {
    let slope = (b.u - a.u) / Rational64::from_integer((b.s - a.s) as i64);
    let (h, e) = if slope.is_negative() {
        (-*slope.numer(), *slope.denom())
    } else {
        (*slope.numer(), *slope.denom())
    };
    Side {
        start: a,
        end: b,
        slope,
        h,
        e,
    }
}

fn cross_ok(o: &Vertex, a: &Vertex, b: &Vertex) -> bool {
    // keeps `a` iff it is strictly below the segment o–b
    let dx1 = Rational64::from_integer((a.s - o.s) as i64);
    let dx2 = Rational64::from_integer((b.s - o.s) as i64);
    (a.u - o.u) * dx2 < (b.u - o.u) * dx1
}

/// Standard lower convex hull (monotone chain) of the finite points.
pub fn lower_hull(points: &[PolygonPoint]) -> Result<NewtonPolygon> {
    let mut pts: Vec<Vertex> = points
        .iter()
        .filter_map(|p| p.u.map(|u| Vertex { s: p.s, u }))
        .collect();
    if pts.is_empty() {
        return Err(Error::EmptyInput);
    }
    pts.sort_by(|a, b| a.s.cmp(&b.s).then(a.u.cmp(&b.u)));
    pts.dedup_by(|b, a| a.s == b.s);
    let mut hull: Vec<Vertex> = Vec::new();
    for p in pts {
        while hull.len() >= 2 && !cross_ok(&hull[hull.len() - 2], &hull[hull.len() - 1], &p) {
            hull.pop();
        }
        hull.push(p);
    }
    let sides = hull.windows(2).map(|w| make_side(w[0], w[1])).collect();
    let mut poly = NewtonPolygon {
        vertices: hull,
        sides,
        dropped_may_interfere: false,
    };
    for p in points.iter().filter(|p| p.u.is_none()) {
        let lo = poly.vertices[0].s;
        let hi = poly.vertices.last().unwrap().s;
        let interferes = match p.lower_bound {
            None => false,
            Some(b) => p.s < lo || p.s > hi || b <= poly.value_at(p.s).unwrap(),
        };
        poly.dropped_may_interfere |= interferes;
    }
    Ok(poly)
}

impl NewtonPolygon {
    /// Ordinate of the polygon at abscissa `s` (inside its range).
    pub fn value_at(&self, s: usize) -> Option<Rational64> {
        let first = self.vertices.first()?;
        if s == first.s {
            return Some(first.u);
        }
        for sd in &self.sides {
            if sd.start.s <= s && s <= sd.end.s {
                return Some(
                    sd.start.u + sd.slope * Rational64::from_integer((s - sd.start.s) as i64),
                );
            }
        }
        None
    }

    /// Abscissa of the right end point.
    pub fn length(&self) -> usize {
        self.vertices.last().map_or(0, |v| v.s)
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    /// Side of exactly the given slope, if any.
    pub fn side_of_slope(&self, slope: Rational64) -> Option<&Side> {
        self.sides.iter().find(|s| s.slope == slope)
    }
}

/// The sides of negative slope.
pub fn principal_part(n: &NewtonPolygon) -> NewtonPolygon {
    let sides: Vec<Side> = n
        .sides
        .iter()
        .copied()
        .filter(|s| s.slope.is_negative())
        .collect();
    let vertices = if sides.is_empty() {
        vec![]
    } else {
        let mut v = vec![sides[0].start];
        v.extend(sides.iter().map(|s| s.end));
        v
    };
    NewtonPolygon {
        vertices,
        sides,
        dropped_may_interfere: n.dropped_may_interfere,
    }
}

/// Intercept at abscissa 0 of the supporting line of slope `lambda`.
pub fn line_touch_value(n: &NewtonPolygon, lambda: Rational64) -> Rational64 {
    n.vertices
        .iter()
        .map(|v| v.u - lambda * Rational64::from_integer(v.s as i64))
        .min()
        .unwrap_or_else(Rational64::zero)
}

/// Abscissas of the points lying on the supporting line of slope `lambda`.
pub fn touching_range(n: &NewtonPolygon, lambda: Rational64) -> Option<(usize, usize)> {
    let h = line_touch_value(n, lambda);
    let on: Vec<usize> = n
        .vertices
        .iter()
        .filter(|v| v.u - lambda * Rational64::from_integer(v.s as i64) == h)
        .map(|v| v.s)
        .collect();
    Some((*on.iter().min()?, *on.iter().max()?))
}

/// `(h, e)` of a slope `-h/e` in lowest terms.
pub fn slope_parts(h: i64, e: i64) -> (i64, i64) {
    let g = h.gcd(&e);
    (h / g, e / g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn two_points() {
        let n = lower_hull(&[PolygonPoint::new(0, 1), PolygonPoint::new(2, 0)]).unwrap();
        assert_eq!(n.sides.len(), 1);
        assert_eq!(n.sides[0].slope, r(-1, 2));
        assert_eq!((n.sides[0].h, n.sides[0].e), (1, 2));
        assert_eq!(line_touch_value(&n, r(-1, 2)), r(1, 1));
    }

    #[test]
    fn principal_part_drops_flat() {
        let pts = [
            PolygonPoint::new(0, 3),
            PolygonPoint::new(1, 1),
            PolygonPoint::new(2, 0),
            PolygonPoint::new(3, 0),
        ];
        let n = lower_hull(&pts).unwrap();
        let slopes: Vec<_> = n.sides.iter().map(|s| s.slope).collect();
        assert_eq!(slopes, vec![r(-2, 1), r(-1, 1), r(0, 1)]);
        let pp = principal_part(&n);
        assert_eq!(pp.sides.len(), 2);
        assert_eq!(pp.length(), 2);
    }

    #[test]
    fn touch_values() {
        let n = lower_hull(&[PolygonPoint::new(1, 5)]).unwrap();
        assert_eq!(line_touch_value(&n, r(-3, 1)), r(8, 1));
        let n = lower_hull(&[PolygonPoint::new(0, 3), PolygonPoint::new(2, 0)]).unwrap();
        assert_eq!(line_touch_value(&n, r(-1, 1)), r(2, 1));
        assert!(principal_part(
            &lower_hull(&[PolygonPoint::new(0, 0), PolygonPoint::new(1, 2)]).unwrap()
        )
        .is_empty());
    }

    #[test]
    fn dropped_points() {
        let pts = [
            PolygonPoint::new(0, 4),
            PolygonPoint::unknown(1, Some(1)),
            PolygonPoint::new(2, 0),
        ];
        assert!(lower_hull(&pts).unwrap().dropped_may_interfere);
        let pts = [
            PolygonPoint::new(0, 4),
            PolygonPoint::unknown(1, Some(3)),
            PolygonPoint::new(2, 0),
        ];
        assert!(!lower_hull(&pts).unwrap().dropped_may_interfere);
        assert_eq!(
            lower_hull(&[PolygonPoint::unknown(0, None)]),
            Err(Error::EmptyInput)
        );
    }
}
