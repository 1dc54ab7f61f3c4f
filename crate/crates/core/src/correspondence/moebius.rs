use num_complex::Complex;

use super::{CorrespondenceError, SpherePoint};
use crate::Real;

/// `Z ↦ (pZ + q) / (rZ + s)` acting on the Riemann sphere.
///
/// Evaluated as `p/r − (det/r²)/(Z − pole)` when `r ≠ 0`, which stays
/// accurate next to the pole where `rZ + s` cancels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap<T> {
    p: Complex<T>,
    q: Complex<T>,
    r: Complex<T>,
    s: Complex<T>,
    /// `p/r`, `−s/r` and `det/r²`; unused when `r = 0`.
    at_infinity: Complex<T>,
    pole: Complex<T>,
    residue: Complex<T>,
}

impl<T: Real> MoebiusMap<T> {
    pub fn new(
        p: Complex<T>,
        q: Complex<T>,
        r: Complex<T>,
        s: Complex<T>,
    ) -> Result<Self, CorrespondenceError> {
        let det = p * s - q * r;
        if det == Complex::new(T::zero(), T::zero()) || !(det.re.is_finite() && det.im.is_finite())
        {
            return Err(CorrespondenceError::DegenerateMoebius);
        }
        Ok(Self::from_coefficients(p, q, r, s))
    }

    fn from_coefficients(p: Complex<T>, q: Complex<T>, r: Complex<T>, s: Complex<T>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let (at_infinity, pole, residue) = if r == zero {
            (zero, zero, zero)
        } else {
            (p / r, -s / r, (p * s - q * r) / (r * r))
        };
        Self { p, q, r, s, at_infinity, pole, residue }
    }

    pub fn coefficients(&self) -> [Complex<T>; 4] {
        [self.p, self.q, self.r, self.s]
    }

    pub fn determinant(&self) -> Complex<T> {
        self.p * self.s - self.q * self.r
    }

    pub fn inverse(&self) -> Self {
        Self::from_coefficients(self.s, -self.q, -self.r, self.p)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_coefficients(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s,
        )
    }

    pub fn apply(&self, z: SpherePoint<T>) -> SpherePoint<T> {
        let zero = Complex::new(T::zero(), T::zero());
        match z {
            SpherePoint::Infinity => {
                if self.r == zero {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::from(self.at_infinity)
                }
            }
            SpherePoint::Finite(z) if self.r == zero => SpherePoint::from((self.p * z + self.q) / self.s),
            SpherePoint::Finite(z) => {
                let offset = z - self.pole;
                if offset == zero {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::from(self.at_infinity - self.residue / offset)
                }
            }
        }
    }

    /// Derivative at a finite, non-polar point: `det / (rZ + s)²`.
    pub fn derivative(&self, z: Complex<T>) -> Option<Complex<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        if self.r == zero {
            return Some(self.p / self.s);
        }
        let offset = z - self.pole;
        if offset == zero {
            None
        } else {
            Some(self.residue / (offset * offset))
        }
    }

    /// The point sent to `∞`, if finite.
    pub fn pole(&self) -> SpherePoint<T> {
        if self.r == Complex::new(T::zero(), T::zero()) {
            SpherePoint::Infinity
        } else {
            SpherePoint::from(self.pole)
        }
    }
}
