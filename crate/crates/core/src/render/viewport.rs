use num_complex::Complex;

use super::RenderError;

/// Which coordinate a dynamical-plane viewport is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plane {
    /// `Z`, where `Cov₀` is `Z² + ZW + W² = 3`.
    Big,
    /// `z`, with `Z = (az + 1)/(z + 1)`.
    Small,
}

impl Plane {
    pub fn name(&self) -> &'static str {
        match self {
            Plane::Big => "big",
            Plane::Small => "small",
        }
    }
}

/// A rectangle of the complex plane sampled at pixel centres, with square
/// pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub centre: Complex<f64>,
    pub width: f64,
    pub width_px: usize,
    pub height_px: usize,
    pub plane: Plane,
}

impl Viewport {
    pub fn new(
        centre: Complex<f64>,
        width: f64,
        width_px: usize,
        height_px: usize,
    ) -> Result<Self, RenderError> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(RenderError::InvalidViewport("width must be positive"));
        }
        if width_px == 0 || height_px == 0 {
            return Err(RenderError::InvalidViewport("pixel dimensions must be positive"));
        }
        if !(centre.re.is_finite() && centre.im.is_finite()) {
            return Err(RenderError::InvalidViewport("centre must be finite"));
        }
        Ok(Self {
            centre,
            width,
            width_px,
            height_px,
            plane: Plane::Big,
        })
    }

    pub fn square(centre: Complex<f64>, width: f64, px: usize) -> Result<Self, RenderError> {
        Self::new(centre, width, px, px)
    }

    pub fn in_plane(mut self, plane: Plane) -> Self {
        self.plane = plane;
        self
    }

    pub fn pixel_size(&self) -> f64 {
        self.width / self.width_px as f64
    }

    pub fn height(&self) -> f64 {
        self.pixel_size() * self.height_px as f64
    }

    /// Centre of pixel `(col, row)`, row 0 at the top.
    ///
    /// Offsets are odd multiples of half a pixel computed from integers, so
    /// mirrored pixels of a viewport centred on an axis map to exactly
    /// negated coordinates.
    #[inline]
    pub fn pixel_point(&self, col: usize, row: usize) -> Complex<f64> {
        let half = 0.5 * self.pixel_size();
        let dx = (2 * col + 1) as f64 - self.width_px as f64;
        let dy = self.height_px as f64 - (2 * row + 1) as f64;
        Complex::new(self.centre.re + dx * half, self.centre.im + dy * half)
    }

    /// Fractional pixel coordinates `(col, row)` of a plane point, pixel
    /// centres at integers.
    pub fn to_pixel(&self, z: Complex<f64>) -> (f64, f64) {
        let px = self.pixel_size();
        let col = (z.re - self.centre.re) / px + (self.width_px as f64 - 1.0) / 2.0;
        let row = (self.centre.im - z.im) / px + (self.height_px as f64 - 1.0) / 2.0;
        (col, row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate() {
        assert!(Viewport::new(Complex::new(0.0, 0.0), 0.0, 10, 10).is_err());
        assert!(Viewport::new(Complex::new(0.0, 0.0), -1.0, 10, 10).is_err());
        assert!(Viewport::new(Complex::new(0.0, 0.0), 1.0, 0, 10).is_err());
    }

    #[test]
    fn pixel_round_trip() {
        let v = Viewport::new(Complex::new(1.5, -0.25), 3.0, 30, 20).unwrap();
        let (c, r) = v.to_pixel(v.pixel_point(7, 13));
        assert!((c - 7.0).abs() < 1e-12 && (r - 13.0).abs() < 1e-12);
        assert!((v.height() - 2.0).abs() < 1e-15);
        // top-left pixel centre
        let tl = v.pixel_point(0, 0);
        assert!((tl - Complex::new(0.05, 0.7)).norm() < 1e-14);
    }

    #[test]
    fn mirrored_rows_are_exact_conjugates() {
        let v = Viewport::new(Complex::new(4.0, 0.0), 6.2, 33, 64).unwrap();
        for row in 0..64 {
            for col in [0, 5, 32] {
                assert_eq!(v.pixel_point(col, row), v.pixel_point(col, 63 - row).conj());
            }
        }
    }
}
