//! Poincaré-disk model of the hyperbolic plane (curvature −1).
//!
//! Every geodesic computation is done in the frame of a Möbius isometry that
//! sends one endpoint to the origin, where geodesics are diameters and
//! hyperbolic distance from the origin is `2 artanh |w|`.

use num_complex::Complex64;

pub(crate) fn to_c(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub(crate) fn from_c(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Disk automorphism `z ↦ (z − a) / (1 − conj(a) z)`; sends `a` to 0.
pub(crate) fn to_frame(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// Inverse of [`to_frame`].
pub(crate) fn from_frame(a: Complex64, w: Complex64) -> Complex64 {
    to_frame(-a, w)
}

/// `d(x, y) = 2 asinh(|x − y| / sqrt((1 − |x|²)(1 − |y|²)))`, which equals
/// the arccosh form but keeps full relative precision for close points.
pub(crate) fn distance(x: &[f64; 2], y: &[f64; 2]) -> f64 {
    let dx = x[0] - y[0];
    let dy = x[1] - y[1];
    let num = dx.hypot(dy);
    if num == 0.0 {
        return 0.0;
    }
    let cx = (1.0 - x[0] * x[0] - x[1] * x[1]).max(f64::MIN_POSITIVE);
    let cy = (1.0 - y[0] * y[0] - y[1] * y[1]).max(f64::MIN_POSITIVE);
    2.0 * (num / (cx.sqrt() * cy.sqrt())).asinh()
}

/// Euclidean radius of the point at hyperbolic distance `s` from the origin.
pub(crate) fn radius_at(s: f64) -> f64 {
    (0.5 * s).tanh()
}

/// Point at hyperbolic distance `s` from `x` toward `y` (clamped to `[x, y]`).
pub(crate) fn toward(x: &[f64; 2], y: &[f64; 2], s: f64) -> [f64; 2] {
    let a = to_c(x);
    let w = to_frame(a, to_c(y));
    let r = w.norm();
    if r == 0.0 || s <= 0.0 {
        return *x;
    }
    let d = distance(x, y);
    if s >= d {
        return *y;
    }
    from_c(from_frame(a, w / r * radius_at(s)))
}

/// Alexandrov angle at `apex` between the geodesics to `y` and `z`; the
/// model is conformal, so it is the Euclidean angle in the apex frame.
pub(crate) fn angle(apex: &[f64; 2], y: &[f64; 2], z: &[f64; 2]) -> f64 {
    let a = to_c(apex);
    let u = to_frame(a, to_c(y));
    let v = to_frame(a, to_c(z));
    let cross = u.re * v.im - u.im * v.re;
    let dot = u.re * v.re + u.im * v.im;
    cross.abs().atan2(dot)
}

/// Nearest point of `[x, y]` to `p`.
///
/// In the frame sending `x` to 0 and `y` onto the positive real axis, the
/// perpendicular from `p' = a + ib` meets the real diameter at
/// `2a / (1 + |p'|² + sqrt((1 + |p'|²)² − 4a²))`; distance to the diameter is
/// convex along it, so clamping the foot to `[0, |y'|]` gives the projection.
pub(crate) fn project(p: &[f64; 2], x: &[f64; 2], y: &[f64; 2]) -> [f64; 2] {
    let a = to_c(x);
    let w = to_frame(a, to_c(y));
    let r = w.norm();
    if r == 0.0 {
        return *x;
    }
    let rot = w.conj() / r;
    let q = to_frame(a, to_c(p)) * rot;
    let s = 1.0 + q.norm_sqr();
    let disc = (s * s - 4.0 * q.re * q.re).max(0.0);
    let foot = (2.0 * q.re / (s + disc.sqrt())).clamp(0.0, r);
    if foot == r {
        return *y;
    }
    if foot == 0.0 {
        return *x;
    }
    from_c(from_frame(a, Complex64::new(foot, 0.0) / rot))
}

/// Point at distance `h` from `q` along the geodesic leaving `q` at a right
/// angle (counter-clockwise when `side > 0`) to the direction toward `toward`.
pub(crate) fn perpendicular(q: &[f64; 2], toward: &[f64; 2], side: f64, h: f64) -> Option<[f64; 2]> {
    let a = to_c(q);
    let w = to_frame(a, to_c(toward));
    let r = w.norm();
    if r == 0.0 {
        return None;
    }
    let dir = w / r * Complex64::new(0.0, side.signum());
    Some(from_c(from_frame(a, dir * radius_at(h))))
}

/// Point at distance `s` beyond `y` on the geodesic from `x` through `y`.
pub(crate) fn extend(x: &[f64; 2], y: &[f64; 2], s: f64) -> Option<[f64; 2]> {
    let b = to_c(y);
    let w = to_frame(b, to_c(x));
    let r = w.norm();
    if r == 0.0 {
        return None;
    }
    Some(from_c(from_frame(b, -w / r * radius_at(s))))
}

/// Point at distance `s` from `p` in the direction making angle `theta`
/// (counter-clockwise) with the direction from `p` toward `reference`; when
/// `reference == p` the angle is measured from the frame's real axis.
pub(crate) fn shoot(p: &[f64; 2], reference: &[f64; 2], theta: f64, s: f64) -> [f64; 2] {
    let a = to_c(p);
    let w = to_frame(a, to_c(reference));
    let r = w.norm();
    let base = if r == 0.0 { Complex64::new(1.0, 0.0) } else { w / r };
    let dir = base * Complex64::from_polar(1.0, theta);
    from_c(from_frame(a, dir * radius_at(s)))
}
