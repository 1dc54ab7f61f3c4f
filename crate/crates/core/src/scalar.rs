use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

/// Real scalar the dynamics are computed over.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssignOps + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every literal used in this crate is
    /// representable in `f32`, so this never fails for the builtin floats.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssignOps + Debug + Display + Send + Sync + 'static
{
}

#[inline]
pub(crate) fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Principal square root with the cut on the negative real axis.
///
/// Written out instead of going through polar form so that
/// `sqrt(conj z) == conj(sqrt z)` holds bit-for-bit off the cut, which the
/// mirror-symmetry checks on rendered images rely on.
pub(crate) fn principal_sqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let (x, y) = (z.re, z.im);
    if x == T::zero() && y == T::zero() {
        return Complex::new(T::zero(), y);
    }
    let half = T::lit(0.5);
    let m = x.hypot(y);
    let t = ((m + x.abs()) * half).sqrt();
    if x >= T::zero() {
        Complex::new(t, y / (t + t))
    } else {
        Complex::new(y.abs() / (t + t), t.copysign(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_matches_num_complex_off_cut() {
        let samples = [
            (3.0, 4.0),
            (-3.0, 4.0),
            (-3.0, -4.0),
            (1e-300, 1e-300),
            (-9.0, 0.0),
            (0.0, -2.0),
            (1e150, -1e150),
        ];
        for (x, y) in samples {
            let z = Complex::new(x, y);
            let ours = principal_sqrt(z);
            let theirs = z.sqrt();
            assert!((ours - theirs).norm() <= 1e-14 * theirs.norm(), "{z}: {ours} vs {theirs}");
            assert!((ours * ours - z).norm() <= 1e-14 * z.norm());
        }
    }

    #[test]
    fn sqrt_commutes_with_conjugation_exactly() {
        for k in 0..500 {
            let t = k as f64 * 0.0137;
            let z = Complex::new((3.1 * t).cos() * (1.0 + t), (1.7 * t).sin() * (2.0 - t));
            if z.im == 0.0 {
                continue;
            }
            assert_eq!(principal_sqrt(z.conj()), principal_sqrt(z).conj());
        }
    }

    #[test]
    fn sqrt_of_negative_real_is_positive_imaginary() {
        let r = principal_sqrt(Complex::new(-4.0_f64, 0.0));
        assert_eq!(r, Complex::new(0.0, 2.0));
        let r32 = principal_sqrt(Complex::new(-4.0_f32, 0.0));
        assert_eq!(r32, Complex::new(0.0, 2.0));
    }
}
