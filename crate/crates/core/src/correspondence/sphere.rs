use std::fmt;

use num_complex::Complex;

use crate::Real;

/// A point of the Riemann sphere: a finite complex value or `∞`.
///
/// Non-finite complex inputs (an infinite or NaN component) collapse to
/// [`SpherePoint::Infinity`], so a `Finite` value never carries NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> SpherePoint<T> {
    /// Bitwise equality, telling `0.0` from `−0.0`.
    pub fn identical(&self, other: &Self) -> bool {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => true,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                a.re.integer_decode() == b.re.integer_decode()
                    && a.im.integer_decode() == b.im.integer_decode()
            }
            _ => false,
        }
    }

    pub fn new(re: T, im: T) -> Self {
        Self::from(Complex::new(re, im))
    }

    pub fn real(x: T) -> Self {
        Self::new(x, T::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex<T>> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            SpherePoint::Finite(z) => SpherePoint::Finite(z.conj()),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    pub fn neg(&self) -> Self {
        match *self {
            SpherePoint::Finite(z) => SpherePoint::Finite(-z),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    /// Chordal distance on the unit sphere, in `[0, 2]`.
    pub fn chordal_distance(&self, other: &Self) -> T {
        let two = T::lit(2.0);
        match (*self, *other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => T::zero(),
            (SpherePoint::Finite(z), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
                two / (T::one() + z.norm_sqr()).sqrt()
            }
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                two * (z - w).norm()
                    / ((T::one() + z.norm_sqr()).sqrt() * (T::one() + w.norm_sqr()).sqrt())
            }
        }
    }

    /// `|self − other| / max(1, |other|)` for finite points; `0` when both
    /// are `∞` and `+∞` when exactly one is.
    pub fn relative_distance(&self, other: &Self) -> T {
        match (*self, *other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => T::zero(),
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                (z - w).norm() / T::one().max(w.norm())
            }
            _ => T::infinity(),
        }
    }

    /// Maps to a different scalar type.
    pub fn cast<U: Real>(&self) -> SpherePoint<U> {
        match *self {
            SpherePoint::Finite(z) => SpherePoint::new(
                U::lit(z.re.to_f64_lossy()),
                U::lit(z.im.to_f64_lossy()),
            ),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }
}

impl<T: Real> From<Complex<T>> for SpherePoint<T> {
    fn from(z: Complex<T>) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

impl<T: Real> From<T> for SpherePoint<T> {
    fn from(x: T) -> Self {
        SpherePoint::real(x)
    }
}

impl<T: Real> fmt::Display for SpherePoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => {
                if z.im.is_sign_negative() {
                    write!(f, "{}-{}i", z.re, -z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
            SpherePoint::Infinity => f.write_str("inf"),
        }
    }
}
