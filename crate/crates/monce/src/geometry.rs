//! Axis-aligned boxes and overlap computation.

use crate::{Error, Result};

/// Axis-aligned bounding box in pixel coordinates. `x`/`y` is the top-left
/// corner; width and height are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    /// Build a box, rejecting degenerate or non-finite geometry.
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "bounding box has non-finite coordinates ({x}, {y}, {w}, {h})"
            )));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "bounding box must have positive extent, got w={w}, h={h}"
            )));
        }
        Ok(BoundingBox { x, y, w, h })
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// Intersection-over-union with another box. Always in `[0, 1]`;
    /// identical boxes yield exactly 1.0 and disjoint boxes exactly 0.0.
    ///
    /// Intersection and areas are all derived from the corner extents, so
    /// they stay mutually consistent even when `x + w` rounds: the
    /// intersection can never exceed either area, which pins the ratio
    /// inside the unit interval.
    pub fn iou(&self, other: &BoundingBox) -> f64 {
        let (ar, ab) = (self.right(), self.bottom());
        let (br, bb) = (other.right(), other.bottom());
        let ix = (ar.min(br) - self.x.max(other.x)).max(0.0);
        let iy = (ab.min(bb) - self.y.max(other.y)).max(0.0);
        let inter = ix * iy;
        if inter <= 0.0 {
            return 0.0;
        }
        let area_a = (ar - self.x) * (ab - self.y);
        let area_b = (br - other.x) * (bb - other.y);
        let union = area_a + area_b - inter;
        inter / union
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x: f64, y: f64, w: f64, h: f64) -> BoundingBox {
        BoundingBox::new(x, y, w, h).unwrap()
    }

    #[test]
    fn identical_boxes_overlap_exactly_one() {
        let a = bb(3.5, -2.0, 17.0, 9.0);
        assert_eq!(a.iou(&a), 1.0);
        // Tiny box far from the origin: x + w rounds, but the overlap of
        // a box with itself must still be exactly 1.
        let far = bb(0.0, 211513.82113054395, 0.001, 0.001);
        assert_eq!(far.iou(&far), 1.0);
    }

    #[test]
    fn disjoint_boxes_overlap_zero() {
        let a = bb(0.0, 0.0, 10.0, 10.0);
        let b = bb(20.0, 0.0, 10.0, 10.0);
        assert_eq!(a.iou(&b), 0.0);
        // Boxes that only share an edge still count as disjoint.
        let c = bb(10.0, 0.0, 10.0, 10.0);
        assert_eq!(a.iou(&c), 0.0);
    }

    #[test]
    fn half_shifted_unit_squares() {
        // (0,0,2,2) vs (1,0,2,2): intersection 1x2 = 2, union 4+4-2 = 6.
        let a = bb(0.0, 0.0, 2.0, 2.0);
        let b = bb(1.0, 0.0, 2.0, 2.0);
        assert_eq!(a.iou(&b), 1.0 / 3.0);
    }

    #[test]
    fn contained_box() {
        // 2x2 inside 4x4: intersection 4, union 16.
        let a = bb(0.0, 0.0, 4.0, 4.0);
        let b = bb(1.0, 1.0, 2.0, 2.0);
        assert_eq!(a.iou(&b), 0.25);
    }

    #[test]
    fn iou_is_symmetric() {
        let a = bb(0.0, 0.0, 5.0, 3.0);
        let b = bb(2.0, 1.0, 6.0, 4.0);
        assert_eq!(a.iou(&b), b.iou(&a));
    }

    #[test]
    fn degenerate_boxes_are_rejected() {
        assert!(BoundingBox::new(0.0, 0.0, 0.0, 5.0).is_err());
        assert!(BoundingBox::new(0.0, 0.0, 5.0, -1.0).is_err());
        assert!(BoundingBox::new(f64::NAN, 0.0, 5.0, 5.0).is_err());
        assert!(BoundingBox::new(0.0, f64::INFINITY, 5.0, 5.0).is_err());
    }
}
