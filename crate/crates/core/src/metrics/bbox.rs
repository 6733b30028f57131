use crate::Scalar;

use super::MetricsError;

/// Axis-aligned box in `x, y, w, h` form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox<T> {
    pub x: T,
    pub y: T,
    pub w: T,
    pub h: T,
}

impl<T: Scalar> BBox<T> {
    /// Checked constructor: extents must be positive and finite.
    pub fn new(x: T, y: T, w: T, h: T) -> Result<Self, MetricsError> {
        let b = Self { x, y, w, h };
        if !(w > T::zero() && h > T::zero()) || !(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(MetricsError::DegenerateBox(
                x.to_f64_lossless(),
                y.to_f64_lossless(),
                w.to_f64_lossless(),
                h.to_f64_lossless(),
            ));
        }
        Ok(b)
    }

    pub fn from_xywh(b: [T; 4]) -> Self {
        Self { x: b[0], y: b[1], w: b[2], h: b[3] }
    }

    pub fn area(&self) -> T {
        self.w * self.h
    }

    pub fn intersection(&self, o: &Self) -> T {
        let iw = (self.x + self.w).min(o.x + o.w) - self.x.max(o.x);
        let ih = (self.y + self.h).min(o.y + o.h) - self.y.max(o.y);
        if iw <= T::zero() || ih <= T::zero() {
            T::zero()
        } else {
            iw * ih
        }
    }

    /// IoU without extent checks; 0 when the union is empty.
    pub fn iou_unchecked(&self, o: &Self) -> T {
        let inter = self.intersection(o);
        let union = self.area() + o.area() - inter;
        if union <= T::zero() {
            T::zero()
        } else {
            inter / union
        }
    }
}

/// Intersection over union of two boxes with positive extent.
pub fn iou<T: Scalar>(a: &BBox<T>, b: &BBox<T>) -> Result<T, MetricsError> {
    BBox::new(a.x, a.y, a.w, a.h)?;
    BBox::new(b.x, b.y, b.w, b.h)?;
    Ok(a.iou_unchecked(b))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn examples() {
        let a = BBox::new(0.0f64, 0.0, 10.0, 10.0).unwrap();
        assert_eq!(iou(&a, &a).unwrap(), 1.0);
        let b = BBox::new(5.0, 5.0, 10.0, 10.0).unwrap();
        assert!((iou(&a, &b).unwrap() - 1.0 / 7.0).abs() < 1e-15);
        let c = BBox::new(20.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(iou(&a, &c).unwrap(), 0.0);
        let touching = BBox::new(10.0, 0.0, 5.0, 5.0).unwrap();
        assert_eq!(iou(&a, &touching).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(matches!(BBox::new(0.0, 0.0, 0.0, 1.0), Err(MetricsError::DegenerateBox(..))));
        let bad = BBox::from_xywh([0.0f32, 0.0, 1.0, -1.0]);
        let ok = BBox::from_xywh([0.0f32, 0.0, 1.0, 1.0]);
        assert!(iou(&bad, &ok).is_err());
    }

    #[test]
    fn works_in_f32() {
        let a = BBox::new(0.0f32, 0.0, 10.0, 10.0).unwrap();
        let b = BBox::new(5.0f32, 5.0, 10.0, 10.0).unwrap();
        assert!((iou(&a, &b).unwrap() - 1.0 / 7.0).abs() < 1e-6);
    }

    fn boxes() -> impl Strategy<Value = BBox<f64>> {
        (-50.0f64..50.0, -50.0f64..50.0, 0.1f64..40.0, 0.1f64..40.0).prop_map(|(x, y, w, h)| BBox { x, y, w, h })
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(a in boxes(), b in boxes()) {
            let ab = iou(&a, &b).unwrap();
            prop_assert_eq!(ab, iou(&b, &a).unwrap());
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }
}
