//! The parabolic quadratic family `P_A(z) = z + 1/z + A`, with a parabolic
//! fixed point of multiplier 1 at `∞` and critical points `±1`.

use num_complex::Complex;

use crate::correspondence::SpherePoint;
use crate::dynamics::{Classification, CycleCheck, Verdict};
use crate::Real;

/// Parameter `A`. `P_A` and `P_{−A}` are conjugate via `z ↦ −z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapParameter<T> {
    pub value: Complex<T>,
}

impl<T: Real> CapParameter<T> {
    pub fn new(value: Complex<T>) -> Self {
        Self { value }
    }

    /// Representative of `{A, −A}` with `Re A ≥ 0`, and `Im A ≥ 0` on ties.
    pub fn canonical(&self) -> Self {
        let a = self.value;
        let flip = a.re < T::zero() || (a.re == T::zero() && a.im < T::zero());
        Self::new(if flip { -a } else { a })
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == Complex::new(T::zero(), T::zero())
    }

    /// The finite fixed point `−1/A`, or `None` for `A = 0`.
    pub fn finite_fixed_point(&self) -> Option<Complex<T>> {
        if self.is_zero() {
            None
        } else {
            Some(-Complex::new(T::one(), T::zero()) / self.value)
        }
    }
}

/// `z + 1/z + A` on the sphere; `0 ↦ ∞`, `∞ ↦ ∞`.
#[inline]
pub fn p_step<T: Real>(a: &CapParameter<T>, z: SpherePoint<T>) -> SpherePoint<T> {
    match z {
        SpherePoint::Infinity => SpherePoint::Infinity,
        SpherePoint::Finite(z) => {
            if z == Complex::new(T::zero(), T::zero()) {
                SpherePoint::Infinity
            } else {
                SpherePoint::from(z + z.inv() + a.value)
            }
        }
    }
}

/// `P_A′(z) = 1 − 1/z²`.
pub fn p_derivative<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(T::one(), T::zero()) - (z * z).inv()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JuliaOptions {
    pub max_iter: u32,
    pub escape_radius: f64,
}

impl Default for JuliaOptions {
    fn default() -> Self {
        Self {
            max_iter: 50_000,
            escape_radius: 1e4,
        }
    }
}

/// Escape-time membership in the filled Julia set `K_A`.
///
/// An orbit escapes into the parabolic basin of `∞` once `|z|` stays above
/// the escape radius and strictly increases for three consecutive steps;
/// landing on `∞` itself also counts. `A = 0` is answered in closed form:
/// `K₀` is the closed left half-plane.
pub fn classify_filled_julia<T: Real>(
    a: &CapParameter<T>,
    z: SpherePoint<T>,
    opts: JuliaOptions,
) -> Classification<T> {
    if a.is_zero() {
        let member = matches!(z, SpherePoint::Finite(w) if w.re <= T::zero());
        return Classification {
            verdict: if member { Verdict::Bounded(opts.max_iter) } else { Verdict::Escaped(0) },
            last_point: z,
        };
    }
    let radius_sq = T::lit(opts.escape_radius * opts.escape_radius);
    let mut current = z;
    let mut streak = 0u32;
    let mut prev = match z {
        SpherePoint::Finite(w) => w.norm_sqr(),
        SpherePoint::Infinity => {
            return Classification { verdict: Verdict::Escaped(0), last_point: z }
        }
    };
    let mut cycle = CycleCheck::new(z);
    for k in 1..=opts.max_iter {
        current = p_step(a, current);
        if cycle.repeats(current) {
            break;
        }
        let size = match current {
            SpherePoint::Infinity => {
                return Classification { verdict: Verdict::Escaped(k), last_point: current }
            }
            SpherePoint::Finite(w) => w.norm_sqr(),
        };
        if size > radius_sq && size > prev {
            streak += 1;
            if streak >= 3 {
                return Classification { verdict: Verdict::Escaped(k), last_point: current };
            }
        } else {
            streak = 0;
        }
        prev = size;
    }
    Classification {
        verdict: Verdict::Bounded(opts.max_iter),
        last_point: current,
    }
}
