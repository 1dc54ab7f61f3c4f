//! Arithmetic of the correspondence `𝓕ₐ = J ∘ Cov₀` in the big coordinate
//! `Z = (az + 1)/(z + 1)`.
//!
//! `Cov₀` is the deleted covering correspondence of `Q(Z) = Z³ − 3Z`,
//! i.e. the relation `Z² + ZW + W² = 3`, and `J` is the Möbius involution
//! fixing `1` and `a`. The parabolic fixed point `P` sits at `Z = 1` and its
//! other preimage `S` at `Z = −2`.

mod moebius;
mod sphere;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{cplx, principal_sqrt};
use crate::Real;

pub use moebius::MoebiusMap;
pub use sphere::SpherePoint;

/// `Z` coordinate of the parabolic fixed point `P`.
pub const P_COORD: f64 = 1.0;
/// `Z` coordinate of `S`, the preimage of `P` other than `P` itself.
pub const S_COORD: f64 = -2.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum CorrespondenceError {
    #[error("the correspondence is undefined at a = 1")]
    ParameterIsOne,
    #[error("parameter must be a finite complex number")]
    NonFiniteParameter,
    #[error("Möbius map has zero determinant")]
    DegenerateMoebius,
    #[error("branch derivative is singular at this point")]
    SingularDerivative,
}

/// The family parameter `a ≠ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Parameter<T> {
    a: Complex<T>,
}

impl<T: Real> Parameter<T> {
    pub fn new(a: Complex<T>) -> Result<Self, CorrespondenceError> {
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(CorrespondenceError::NonFiniteParameter);
        }
        if a == Complex::new(T::one(), T::zero()) {
            return Err(CorrespondenceError::ParameterIsOne);
        }
        Ok(Self { a })
    }

    pub fn from_parts(re: T, im: T) -> Result<Self, CorrespondenceError> {
        Self::new(Complex::new(re, im))
    }

    pub fn value(&self) -> Complex<T> {
        self.a
    }

    pub fn conj(&self) -> Self {
        Self { a: self.a.conj() }
    }

    /// Whether `a` lies in the closed disc `{|a − 4| ≤ 3}`.
    pub fn in_standard_disc(&self) -> bool {
        (self.a - cplx::<T>(4.0, 0.0)).norm() <= T::lit(3.0)
    }

    /// `true` exactly at `a = 7`, where the parabolic point has three petals.
    pub fn is_triple_petal(&self) -> bool {
        self.a == cplx::<T>(7.0, 0.0)
    }

    /// The involution `J(Z) = ((a+1)Z − 2a) / (2Z − (a+1))`.
    pub fn involution(&self) -> MoebiusMap<T> {
        let one = Complex::new(T::one(), T::zero());
        let two = Complex::new(T::lit(2.0), T::zero());
        MoebiusMap::new(self.a + one, -(two * self.a), two, -(self.a + one))
            .expect("determinant −(a−1)² is non-zero for a ≠ 1")
    }

    /// `z ↦ Z = (az + 1)/(z + 1)`.
    pub fn small_to_big(&self) -> MoebiusMap<T> {
        let one = Complex::new(T::one(), T::zero());
        MoebiusMap::new(self.a, one, one, one).expect("determinant a − 1 is non-zero")
    }
}

/// The two images (or preimages) of a point, in a fixed canonical order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchPair<T> {
    pub first: SpherePoint<T>,
    pub second: SpherePoint<T>,
}

impl<T: Real> BranchPair<T> {
    pub fn new(first: SpherePoint<T>, second: SpherePoint<T>) -> Self {
        Self { first, second }
    }

    pub fn as_array(&self) -> [SpherePoint<T>; 2] {
        [self.first, self.second]
    }

    pub fn map(&self, f: impl Fn(SpherePoint<T>) -> SpherePoint<T>) -> Self {
        Self::new(f(self.first), f(self.second))
    }

    /// Whether `p` is one of the two members, up to relative distance `tol`.
    pub fn contains(&self, p: &SpherePoint<T>, tol: T) -> bool {
        self.first.relative_distance(p) <= tol || self.second.relative_distance(p) <= tol
    }

    /// Distance between the pairs as unordered sets: the better of the two
    /// matchings, each scored by its worse member.
    pub fn set_distance(&self, other: &Self) -> T {
        let straight = self
            .first
            .relative_distance(&other.first)
            .max(self.second.relative_distance(&other.second));
        let crossed = self
            .first
            .relative_distance(&other.second)
            .max(self.second.relative_distance(&other.first));
        straight.min(crossed)
    }
}

/// Coefficients of `ζ², ζ³, ζ⁴` for the branch of `𝓕ₐ` fixing `ζ = Z − 1 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorJet<T> {
    pub c2: Complex<T>,
    pub c3: Complex<T>,
    pub c4: Complex<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    SmallToBig,
    BigToSmall,
}

/// Repelling direction(s) at `P` in the `ζ = Z − 1` coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RepellingDirection<T> {
    Single(Complex<T>),
    /// `a = 7`: unit vectors at arguments `0, 2π/3, 4π/3`.
    Triple([Complex<T>; 3]),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint<T> {
    pub point: SpherePoint<T>,
    /// The collided value of `Cov₀` over the critical point.
    pub cov_value: SpherePoint<T>,
    /// `J(cov_value)`, the critical value of `𝓕ₐ`.
    pub value: SpherePoint<T>,
}

/// Both solutions `W` of `Z² + ZW + W² = 3`.
///
/// Order: `(−Z + √(12 − 3Z²))/2` first, principal square root. The root of
/// smaller modulus is recovered from the product `W₁W₂ = Z² − 3`, which
/// avoids cancellation where one root is near zero (`Z ≈ ±√3`).
pub fn cov0_branches<T: Real>(z: SpherePoint<T>) -> BranchPair<T> {
    let z = match z {
        SpherePoint::Infinity => {
            return BranchPair::new(SpherePoint::Infinity, SpherePoint::Infinity)
        }
        SpherePoint::Finite(z) => z,
    };
    let half = T::lit(0.5);
    if z.norm() > T::max_value().sqrt() / T::lit(16.0) {
        // W = Z·(−1 ± √(12/Z² − 3))/2, avoiding overflow in Z².
        let u = principal_sqrt(cplx::<T>(12.0, 0.0) / z / z - cplx::<T>(3.0, 0.0));
        let one = Complex::new(T::one(), T::zero());
        let plus = z * (u - one) * half;
        let minus = -(z * (u + one) * half);
        return BranchPair::new(plus.into(), minus.into());
    }
    let three = T::lit(3.0);
    let s = principal_sqrt(Complex::new(T::lit(12.0), T::zero()) - z * z * three);
    let plus = (s - z) * half;
    let minus = -(s + z) * half;
    let root3 = three.sqrt();
    let product = (z - root3) * (z + root3);
    let (plus, minus) = if plus.norm_sqr() >= minus.norm_sqr() {
        (plus, product / plus)
    } else {
        (product / minus, minus)
    };
    BranchPair::new(plus.into(), minus.into())
}

/// `|Z² + ZW + W² − 3| / max(1, |Z|²)`; zero when both are `∞`.
pub fn cov0_residual<T: Real>(z: SpherePoint<T>, w: SpherePoint<T>) -> T {
    match (z, w) {
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            (z * z + z * w + w * w - cplx::<T>(3.0, 0.0)).norm() / T::one().max(z.norm_sqr())
        }
        (SpherePoint::Infinity, SpherePoint::Infinity) => T::zero(),
        _ => T::infinity(),
    }
}

pub fn j_involution<T: Real>(a: &Parameter<T>, z: SpherePoint<T>) -> SpherePoint<T> {
    a.involution().apply(z)
}

/// Forward images `{J(W₁), J(W₂)}` of `Z` under `𝓕ₐ`.
pub fn f_images<T: Real>(a: &Parameter<T>, z: SpherePoint<T>) -> BranchPair<T> {
    let j = a.involution();
    cov0_branches(z).map(|w| j.apply(w))
}

/// Preimages of `W` under `𝓕ₐ`: `Cov₀(J(W))`.
pub fn f_preimages<T: Real>(a: &Parameter<T>, w: SpherePoint<T>) -> BranchPair<T> {
    cov0_branches(j_involution(a, w))
}

pub fn coordinate_change<T: Real>(
    a: &Parameter<T>,
    point: SpherePoint<T>,
    direction: Direction,
) -> SpherePoint<T> {
    let m = a.small_to_big();
    match direction {
        Direction::SmallToBig => m.apply(point),
        Direction::BigToSmall => m.inverse().apply(point),
    }
}

pub fn parabolic_jet<T: Real>(a: &Parameter<T>) -> TaylorJet<T> {
    let one = Complex::new(T::one(), T::zero());
    let am1 = a.value() - one;
    let c2 = (a.value() - cplx::<T>(7.0, 0.0)) / (am1 * T::lit(3.0));
    let c3 = c2 * c2;
    let inv = one / am1;
    let c4 = cplx::<T>(2.0 / 27.0, 0.0) - inv * T::lit(2.0 / 3.0) + inv * inv * T::lit(4.0)
        - inv * inv * inv * T::lit(8.0);
    TaylorJet { c2, c3, c4 }
}

/// Unit vector `v` with `c₂·v > 0`, i.e. the normalisation of
/// `(ā − 7)/(ā − 1)`.
pub fn repelling_direction<T: Real>(a: &Parameter<T>) -> RepellingDirection<T> {
    if a.is_triple_petal() {
        let third = T::lit(2.0) * T::PI() / T::lit(3.0);
        return RepellingDirection::Triple([
            Complex::new(T::one(), T::zero()),
            Complex::from_polar(T::one(), third),
            Complex::from_polar(T::one(), third + third),
        ]);
    }
    let ab = a.value().conj();
    let v = (ab - cplx::<T>(7.0, 0.0)) / (ab - cplx::<T>(1.0, 0.0));
    RepellingDirection::Single(v / v.norm())
}

/// The two critical points `Z = ±1` of the forward correspondence, where
/// `dW/dZ = −(2Z + W)/(Z + 2W)` vanishes on `W = −2Z`.
pub fn forward_critical_points<T: Real>(a: &Parameter<T>) -> [CriticalPoint<T>; 2] {
    let j = a.involution();
    [1.0, -1.0].map(|z| {
        let cov_value = SpherePoint::real(T::lit(-2.0 * z));
        CriticalPoint {
            point: SpherePoint::real(T::lit(z)),
            cov_value,
            value: j.apply(cov_value),
        }
    })
}

/// Derivative of the branch `Z ↦ J(W)` of `𝓕ₐ` through the `Cov₀` root `W`:
/// `J′(W) · (−(2Z + W)/(Z + 2W))`.
pub fn branch_derivative<T: Real>(
    a: &Parameter<T>,
    z: SpherePoint<T>,
    w: SpherePoint<T>,
) -> Result<Complex<T>, CorrespondenceError> {
    let (SpherePoint::Finite(z), SpherePoint::Finite(w)) = (z, w) else {
        return Err(CorrespondenceError::SingularDerivative);
    };
    let den = z + w * T::lit(2.0);
    if den == Complex::new(T::zero(), T::zero()) {
        return Err(CorrespondenceError::SingularDerivative);
    }
    let dw = -(z * T::lit(2.0) + w) / den;
    let dj = a
        .involution()
        .derivative(w)
        .ok_or(CorrespondenceError::SingularDerivative)?;
    let d = dj * dw;
    if d.re.is_finite() && d.im.is_finite() {
        Ok(d)
    } else {
        Err(CorrespondenceError::SingularDerivative)
    }
}
