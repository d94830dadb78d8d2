//! Orientation and in-circle predicates.
//!
//! Each predicate first evaluates the determinant in floating point and
//! accepts the sign when it clears a forward error bound. Otherwise the
//! inputs are decoded into integers on a common binary exponent and the
//! determinant is evaluated exactly with big integers. Only the sign of the
//! returned value is meaningful.

use num_bigint::BigInt;
use num_traits::{Float, Signed, Zero};

use crate::geometry::Point;

const EPSILON: f64 = f64::EPSILON * 0.5;
const CCW_ERRBOUND: f64 = (3.0 + 16.0 * EPSILON) * EPSILON;
const ICC_ERRBOUND: f64 = (10.0 + 96.0 * EPSILON) * EPSILON;

/// Positive when `c` lies to the left of the directed line `a -> b`,
/// negative to the right, zero when collinear.
pub fn orient2d(a: Point, b: Point, c: Point) -> f64 {
    let detleft = (a.x - c.x) * (b.y - c.y);
    let detright = (a.y - c.y) * (b.x - c.x);
    let det = detleft - detright;
    let detsum = detleft.abs() + detright.abs();
    if det.abs() > CCW_ERRBOUND * detsum {
        return det;
    }
    orient2d_exact(a, b, c)
}

/// Positive when `d` lies strictly inside the circle through `a`, `b`, `c`
/// (which must be counter-clockwise), negative outside, zero on it.
pub fn incircle(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let adx = a.x - d.x;
    let ady = a.y - d.y;
    let bdx = b.x - d.x;
    let bdy = b.y - d.y;
    let cdx = c.x - d.x;
    let cdy = c.y - d.y;

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let alift = adx * adx + ady * ady;
    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let blift = bdx * bdx + bdy * bdy;
    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;
    let clift = cdx * cdx + cdy * cdy;

    let det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * alift
        + (cdxady.abs() + adxcdy.abs()) * blift
        + (adxbdy.abs() + bdxady.abs()) * clift;
    if det.abs() > ICC_ERRBOUND * permanent && det.is_finite() {
        return det;
    }
    incircle_exact(a, b, c, d)
}

fn sign_of(v: &BigInt) -> f64 {
    if v.is_zero() {
        0.0
    } else if v.is_positive() {
        1.0
    } else {
        -1.0
    }
}

/// Decodes every coordinate into an integer scaled by `2^-min_exponent`.
/// The common scale is positive so determinant signs are preserved.
fn to_common_integers(coords: &[f64]) -> Vec<BigInt> {
    let decoded: Vec<(u64, i16, i8)> = coords.iter().map(|v| v.integer_decode()).collect();
    let min_exp = decoded
        .iter()
        .filter(|(m, _, _)| *m != 0)
        .map(|(_, e, _)| *e)
        .min()
        .unwrap_or(0);
    decoded
        .iter()
        .map(|&(mantissa, exp, sign)| {
            let mut v = BigInt::from(mantissa) << ((exp - min_exp) as usize);
            if sign < 0 {
                v = -v;
            }
            v
        })
        .collect()
}

fn orient2d_exact(a: Point, b: Point, c: Point) -> f64 {
    let v = to_common_integers(&[a.x, a.y, b.x, b.y, c.x, c.y]);
    let (ax, ay, bx, by, cx, cy) = (&v[0], &v[1], &v[2], &v[3], &v[4], &v[5]);
    let det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
    sign_of(&det)
}

fn incircle_exact(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let v = to_common_integers(&[a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y]);
    let adx = &v[0] - &v[6];
    let ady = &v[1] - &v[7];
    let bdx = &v[2] - &v[6];
    let bdy = &v[3] - &v[7];
    let cdx = &v[4] - &v[6];
    let cdy = &v[5] - &v[7];
    let alift = &adx * &adx + &ady * &ady;
    let blift = &bdx * &bdx + &bdy * &bdy;
    let clift = &cdx * &cdx + &cdy * &cdy;
    let det = alift * (&bdx * &cdy - &cdx * &bdy)
        + blift * (&cdx * &ady - &adx * &cdy)
        + clift * (&adx * &bdy - &bdx * &ady);
    sign_of(&det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn orientation_signs() {
        assert!(orient2d(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)) > 0.0);
        assert!(orient2d(p(0.0, 0.0), p(1.0, 0.0), p(0.0, -1.0)) < 0.0);
        assert_eq!(orient2d(p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)), 0.0);
    }

    #[test]
    fn near_collinear_is_decided_exactly() {
        // Classic failure case for naive evaluation: points on y = x perturbed by one ulp.
        let a = p(0.5, 0.5);
        let b = p(12.0, 12.0);
        let c = p(24.0, 24.0);
        assert_eq!(orient2d(a, b, c), 0.0);
        let c_up = p(24.0, 24.0f64.next_up());
        assert!(orient2d(a, b, c_up) > 0.0);
        let c_down = p(24.0, 24.0f64.next_down());
        assert!(orient2d(a, b, c_down) < 0.0);
    }

    #[test]
    fn incircle_signs() {
        let (a, b, c) = (p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0));
        assert!(incircle(a, b, c, p(0.5, 0.5)) > 0.0);
        assert!(incircle(a, b, c, p(2.0, 2.0)) < 0.0);
        assert_eq!(incircle(a, b, c, p(1.0, 1.0)), 0.0);
    }

    #[test]
    fn cocircular_with_awkward_coordinates() {
        let r = 0.1;
        let pts: Vec<Point> = [0.0f64, 0.5, 1.0, 1.5]
            .iter()
            .map(|t| p(r * (t * std::f64::consts::PI).cos(), r * (t * std::f64::consts::PI).sin()))
            .collect();
        // Exact decision must agree with the mathematical sign of the rounded inputs,
        // which the exact path computes; compare against the independent crate.
        let ours = incircle(pts[0], pts[1], pts[2], pts[3]);
        let theirs = robust::incircle(
            robust::Coord { x: pts[0].x, y: pts[0].y },
            robust::Coord { x: pts[1].x, y: pts[1].y },
            robust::Coord { x: pts[2].x, y: pts[2].y },
            robust::Coord { x: pts[3].x, y: pts[3].y },
        );
        assert_eq!(sgn(ours), sgn(theirs));
    }

    fn sgn(v: f64) -> i8 {
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    }

    #[test]
    fn handles_zero_and_tiny_coordinates() {
        assert!(orient2d(p(0.0, 0.0), p(1e-300, 0.0), p(0.0, 1e-300)) > 0.0);
        assert!(orient2d(p(0.0, 0.0), p(1e300, 0.0), p(1e-300, 1e-300)) > 0.0);
    }
}
