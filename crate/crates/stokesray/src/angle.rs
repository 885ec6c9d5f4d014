//! Angle arithmetic on the circle.
//!
//! Every stored angle is in radians, normalized to `[0, 2π)`. All arithmetic
//! goes through [`normalize`] so that branch cuts cannot leak into callers.

use std::f64::consts::TAU;

/// A direction `e^{iθ}·ℝ⁺` in the plane, stored as a normalized angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray(f64);

impl Ray {
    pub fn new(angle: f64) -> Self {
        Ray(normalize(angle))
    }

    /// Angle in radians, guaranteed in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        self.0
    }

    pub fn rotated(self, delta: f64) -> Self {
        Ray::new(self.0 + delta)
    }
}

/// Maps any finite angle into `[0, 2π)`.
///
/// `rem_euclid` can return exactly `2π` for tiny negative inputs (the sum
/// rounds up), so the result is folded once more.
pub fn normalize(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r >= TAU {
        r - TAU
    } else {
        r
    }
}

/// Counterclockwise distance from `from` to `to`, in `[0, 2π)`.
pub fn ccw_distance(from: f64, to: f64) -> f64 {
    normalize(to - from)
}

/// Shortest circular distance between two angles, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = ccw_distance(a, b);
    d.min(TAU - d)
}

/// True when the two directions coincide within `tol`.
pub fn same_ray(a: f64, b: f64, tol: f64) -> bool {
    circular_distance(a, b) <= tol
}

/// True when the two directions span the same line through the origin.
pub fn same_line(a: f64, b: f64, tol: f64) -> bool {
    same_ray(a, b, tol) || same_ray(a, b + std::f64::consts::PI, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn normalize_stays_in_range() {
        for &a in &[-1e-18, -0.0, 0.0, TAU, -TAU, 7.0 * PI, -1e-9, 1e300] {
            let r = normalize(a);
            assert!((0.0..TAU).contains(&r), "normalize({a}) = {r}");
        }
    }

    #[test]
    fn ccw_distance_wraps() {
        assert!((ccw_distance(3.0 * PI / 2.0, PI / 2.0) - PI).abs() < 1e-15);
        assert!(ccw_distance(1.0, 1.0).abs() < 1e-15);
    }

    #[test]
    fn circular_distance_symmetric() {
        let d1 = circular_distance(0.1, TAU - 0.1);
        let d2 = circular_distance(TAU - 0.1, 0.1);
        assert!((d1 - 0.2).abs() < 1e-12);
        assert!((d1 - d2).abs() < 1e-15);
    }

    #[test]
    fn same_line_detects_opposite_rays() {
        assert!(same_line(0.25, 0.25 + PI, 1e-9));
        assert!(!same_line(0.25, 0.25 + PI / 2.0, 1e-9));
    }
}
