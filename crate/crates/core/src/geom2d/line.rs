use super::{GeomError, Point, Vec2};

/// A line `{p : n·p + d = 0}` with unit normal `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    normal: Vec2,
    offset: f64,
}

impl Line {
    /// Builds the line `normal·p + offset = 0`, rescaling so the normal has unit length.
    pub fn new(normal: Vec2, offset: f64) -> Result<Self, GeomError> {
        if !normal.is_finite() || !offset.is_finite() {
            return Err(GeomError::NonFinite);
        }
        let len = normal.norm();
        if len == 0.0 {
            return Err(GeomError::ZeroNormal);
        }
        Ok(Self {
            normal: normal / len,
            offset: offset / len,
        })
    }

    /// Line through two distinct points.
    pub fn through(p: Point, q: Point) -> Result<Self, GeomError> {
        let dir = q - p;
        let normal = dir.perp();
        Line::new(normal, -normal.dot(p))
    }

    /// Line through `p` with the given direction.
    pub fn through_with_direction(p: Point, dir: Vec2) -> Result<Self, GeomError> {
        let normal = dir.perp();
        Line::new(normal, -normal.dot(p))
    }

    #[inline]
    pub fn normal(&self) -> Vec2 {
        self.normal
    }

    #[inline]
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Unit direction, the normal rotated a quarter turn counterclockwise.
    #[inline]
    pub fn direction(&self) -> Vec2 {
        self.normal.perp()
    }

    /// Signed distance of `p` from the line.
    #[inline]
    pub fn signed_distance(&self, p: Point) -> f64 {
        self.normal.dot(p) + self.offset
    }

    /// Foot of the perpendicular from the origin.
    #[inline]
    pub fn closest_point_to_origin(&self) -> Point {
        self.normal * (-self.offset)
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn project(&self, p: Point) -> Point {
        p - self.normal * self.signed_distance(p)
    }

    /// Image of the line under `p ↦ -p`.
    pub fn point_reflected(&self) -> Line {
        Line {
            normal: -self.normal,
            offset: self.offset,
        }
    }

    /// Same point set, possibly with flipped orientation of the normal.
    pub fn same_line(&self, other: &Line, tol: f64) -> bool {
        let s = if self.normal.dot(other.normal) >= 0.0 { 1.0 } else { -1.0 };
        (self.normal - other.normal * s).norm() <= tol && (self.offset - other.offset * s).abs() <= tol
    }
}

/// Mirror image of `p` across `line`.
pub fn reflect_across_line(p: Point, line: &Line) -> Point {
    p - line.normal * (2.0 * line.signed_distance(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflect_across_x_axis() {
        let axis = Line::new(Vec2::new(0.0, 1.0), 0.0).unwrap();
        assert_eq!(reflect_across_line(Vec2::new(0.0, 1.0), &axis), Vec2::new(0.0, -1.0));
    }

    #[test]
    fn point_on_line_is_fixed() {
        let l = Line::through(Vec2::new(1.0, 2.0), Vec2::new(3.0, -1.0)).unwrap();
        let p = Vec2::new(2.0, 0.5);
        assert!((reflect_across_line(p, &l) - p).norm() < 1e-15);
    }

    #[test]
    fn reflect_across_tilted_line() {
        let dir = Vec2::new(-0.5, 3f64.sqrt() / 2.0);
        let l = Line::through_with_direction(Vec2::ZERO, dir).unwrap();
        let q = reflect_across_line(Vec2::new(-1.0, 0.0), &l);
        assert!((q - Vec2::new(0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_normal_rejected() {
        assert_eq!(Line::new(Vec2::ZERO, 1.0), Err(GeomError::ZeroNormal));
        assert!(Line::through(Vec2::new(1.0, 1.0), Vec2::new(1.0, 1.0)).is_err());
    }

    #[test]
    fn constructor_normalizes() {
        let l = Line::new(Vec2::new(3.0, 4.0), 10.0).unwrap();
        assert!((l.normal().norm() - 1.0).abs() < 1e-15);
        assert!((l.offset() - 2.0).abs() < 1e-15);
    }
}
