//! First-order repelling Fatou coordinate at the parabolic point `P`.
//!
//! Works in `ζ = Z − 1`, where the branch fixing `P` is
//! `g(ζ) = ζ + bζ² + …` with `b = c₂(a)`. The approximation
//! `Φₙ(ζ) = 1/(−b·g⁻ⁿ(ζ)) + n` converges to a Fatou coordinate on a
//! repelling petal; no logarithmic correction is applied, so only the Abel
//! residual `|Φₙ(g⁻¹ζ) − Φₙ(ζ) + 1|` is meaningful.

use num_complex::Complex;

use super::DynamicsError;
use crate::correspondence::{f_preimages, parabolic_jet, Parameter, SpherePoint};
use crate::Real;

/// The inverse of the branch fixing `ζ = 0`: the preimage of `1 + ζ` nearer
/// to `P`.
pub fn inverse_fixed_branch<T: Real>(a: &Parameter<T>, zeta: Complex<T>) -> Option<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    let pre = f_preimages(a, SpherePoint::Finite(one + zeta));
    let (p, q) = (pre.first.finite()?, pre.second.finite()?);
    let w = if (p - one).norm() <= (q - one).norm() { p } else { q };
    Some(w - one)
}

/// `Φₙ(ζ) = 1/(−b·g⁻ⁿ(ζ)) + n`.
///
/// Fails at `a = 7` (`b = 0`) and when the backward orbit stops shrinking
/// towards `0` for three consecutive steps, i.e. `ζ` is not in a repelling
/// petal.
pub fn fatou_repelling<T: Real>(
    a: &Parameter<T>,
    zeta: Complex<T>,
    n: usize,
) -> Result<Complex<T>, DynamicsError> {
    let b = parabolic_jet(a).c2;
    if a.is_triple_petal() || b.norm() == T::zero() {
        return Err(DynamicsError::TriplePetal);
    }
    let mut current = zeta;
    let mut previous = zeta.norm();
    let mut stalled = 0;
    for step in 1..=n {
        current = inverse_fixed_branch(a, current).ok_or(DynamicsError::NonFinite)?;
        let size = current.norm();
        if !size.is_finite() {
            return Err(DynamicsError::NonFinite);
        }
        if size >= previous {
            stalled += 1;
            if stalled >= 3 {
                return Err(DynamicsError::PetalExit { step });
            }
        } else {
            stalled = 0;
        }
        previous = size;
    }
    if current.norm() == T::zero() {
        return Err(DynamicsError::NonFinite);
    }
    Ok(Complex::new(T::one(), T::zero()) / (-b * current) + T::lit(n as f64))
}

/// `|Φₙ(g⁻¹ζ) − Φₙ(ζ) + 1|`.
pub fn abel_residual<T: Real>(
    a: &Parameter<T>,
    zeta: Complex<T>,
    n: usize,
) -> Result<T, DynamicsError> {
    let pulled = inverse_fixed_branch(a, zeta).ok_or(DynamicsError::NonFinite)?;
    let here = fatou_repelling(a, zeta, n)?;
    let there = fatou_repelling(a, pulled, n)?;
    Ok((there - here + T::one()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::{f_images, repelling_direction, RepellingDirection};

    fn param(re: f64, im: f64) -> Parameter<f64> {
        Parameter::from_parts(re, im).unwrap()
    }

    fn direction(a: &Parameter<f64>) -> Complex<f64> {
        match repelling_direction(a) {
            RepellingDirection::Single(v) => v,
            RepellingDirection::Triple(_) => unreachable!(),
        }
    }

    #[test]
    fn inverse_branch_undoes_forward_branch() {
        let a = param(4.0, 0.0);
        let zeta = Complex::new(-0.03, 0.01);
        let back = inverse_fixed_branch(&a, zeta).unwrap();
        let img = f_images(&a, SpherePoint::Finite(Complex::new(1.0, 0.0) + back));
        assert!(img.contains(&SpherePoint::Finite(Complex::new(1.0, 0.0) + zeta), 1e-14));
    }

    #[test]
    fn rejected_at_a7() {
        let a = param(7.0, 0.0);
        assert_eq!(
            fatou_repelling(&a, Complex::new(-0.05, 0.0), 10),
            Err(DynamicsError::TriplePetal)
        );
    }

    #[test]
    fn attracting_side_is_not_a_repelling_petal() {
        let a = param(4.0, 0.0);
        let v = direction(&a);
        let r = fatou_repelling(&a, -v * 0.05, 200);
        assert!(matches!(r, Err(DynamicsError::PetalExit { .. })), "{r:?}");
    }

    #[test]
    fn abel_residual_shrinks_with_depth() {
        let a = param(4.0, 0.0);
        let zeta = direction(&a) * 0.05;
        let r: Vec<f64> = [50, 100, 200]
            .iter()
            .map(|&n| abel_residual(&a, zeta, n).unwrap())
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
        assert!(r[2] < 1e-4, "{r:?}");
    }

    #[test]
    fn asymptotic_to_first_order_model() {
        let a = param(5.0, 1.0);
        let b = parabolic_jet(&a).c2;
        let v = direction(&a);
        let mut last = f64::INFINITY;
        for t in [1e-2, 1e-3, 1e-4] {
            let zeta = v * t;
            let phi = fatou_repelling(&a, zeta, 100).unwrap();
            let err = (phi * (-b * zeta) - 1.0).norm();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-2);
    }
}
