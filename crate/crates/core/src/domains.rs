//! The standard Klein combination pair `(Δ_Cov, Δ_J)` for `a` in the disc
//! `𝒟 = {|a − 4| ≤ 3}`.
//!
//! `Δ_Cov` is the region to the right of `L′ = Cov₀([−∞, −2])`, which is
//! the right branch of the hyperbola `x² − y²/3 = 1`. `Δ_J` is the exterior
//! of the closed disc centred on the real axis whose boundary passes through
//! `1` and `a`. Every circle through the two fixed points of `J` is
//! `J`-invariant, so that exterior is a fundamental domain for `J`.

use std::fmt;

use num_complex::Complex;
use thiserror::Error;

use crate::correspondence::{CorrespondenceError, Parameter, SpherePoint};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DomainError {
    #[error(transparent)]
    Parameter(#[from] CorrespondenceError),
    #[error("Re a = 1: no circle centred on the real axis passes through 1 and a")]
    NoRealCentre,
    #[error("curve parameter t must be non-negative")]
    NegativeCurveParameter,
}

/// Geometry of the standard pair for one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StandardDomains<T> {
    param: Parameter<T>,
    centre: T,
    radius: T,
    radius_sq: T,
    in_disc: bool,
}

impl<T: Real> StandardDomains<T> {
    pub fn new(param: Parameter<T>) -> Result<Self, DomainError> {
        let a = param.value();
        let denom = T::lit(2.0) * (a.re - T::one());
        if denom == T::zero() {
            return Err(DomainError::NoRealCentre);
        }
        let centre = (a.norm_sqr() - T::one()) / denom;
        let radius = (centre - T::one()).abs();
        Ok(Self {
            param,
            centre,
            radius,
            radius_sq: radius * radius,
            in_disc: param.in_standard_disc(),
        })
    }

    pub fn parameter(&self) -> &Parameter<T> {
        &self.param
    }

    pub fn centre(&self) -> T {
        self.centre
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// `a ∈ 𝒟 ∖ {1}`, the range where the standard pair is a Klein pair.
    pub fn is_valid(&self) -> bool {
        self.in_disc
    }

    /// `|Z − x₀|² − r²`, positive outside the disc. `None` at `∞`.
    #[inline]
    pub fn circle_excess(&self, z: Complex<T>) -> T {
        (z - Complex::new(self.centre, T::zero())).norm_sqr() - self.radius_sq
    }

    /// Membership in `Δ_J` (open) or its closure. The closed test accepts
    /// points within a few ulps of the circle, so that `P = 1` computed as
    /// `J(1)` still counts as on the boundary.
    #[inline]
    pub fn in_delta_j(&self, z: SpherePoint<T>, closed: bool) -> bool {
        match z {
            SpherePoint::Infinity => true,
            SpherePoint::Finite(z) => {
                let excess = self.circle_excess(z);
                if closed {
                    excess >= -self.radius_sq * boundary_tolerance::<T>()
                } else {
                    excess > T::zero()
                }
            }
        }
    }

    /// Depth inside `Δ̄_J`: `|Z − x₀|`, infinite at `∞`.
    pub fn depth(&self, z: SpherePoint<T>) -> T {
        match z {
            SpherePoint::Infinity => T::infinity(),
            SpherePoint::Finite(z) => (z - Complex::new(self.centre, T::zero())).norm(),
        }
    }

    /// `|arg((ā − 7)/(ā − 1)) ∓ π/2|`, the angle between the parabolic axis
    /// and the common (vertical) tangent of the two boundaries at `P`.
    /// For `a = 7` the axis is taken to be the real axis, giving `π/2`.
    pub fn transversality_margin(&self) -> T {
        if self.param.is_triple_petal() {
            return T::FRAC_PI_2();
        }
        let ab = self.param.value().conj();
        let v = (ab - Complex::new(T::lit(7.0), T::zero())) / (ab - Complex::new(T::one(), T::zero()));
        let arg = v.arg();
        (arg - T::FRAC_PI_2()).abs().min((arg + T::FRAC_PI_2()).abs())
    }
}

#[inline]
fn boundary_tolerance<T: Real>() -> T {
    T::epsilon() * T::lit(1024.0)
}

/// A point of `L′`: `(1 + t/2) ± i·√(3(t + t²/4))`. `t = ∞` gives `∞`.
pub fn l_prime<T: Real>(t: T, upper: bool) -> Result<SpherePoint<T>, DomainError> {
    if t < T::zero() || t.is_nan() {
        return Err(DomainError::NegativeCurveParameter);
    }
    if t.is_infinite() {
        return Ok(SpherePoint::Infinity);
    }
    let half = T::lit(0.5);
    let y = (T::lit(3.0) * (t + t * t * T::lit(0.25))).sqrt();
    let y = if upper { y } else { -y };
    Ok(SpherePoint::new(T::one() + t * half, y))
}

/// Open region to the right of `L′`: `Re Z > 0` and `(Re Z)² − (Im Z)²/3 > 1`.
#[inline]
pub fn in_delta_cov<T: Real>(z: SpherePoint<T>) -> bool {
    match z {
        SpherePoint::Infinity => false,
        SpherePoint::Finite(z) => {
            z.re > T::zero() && z.re * z.re - z.im * z.im / T::lit(3.0) > T::one()
        }
    }
}

/// How densely [`klein_check`] samples the sphere and the two boundaries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingSpec {
    /// Side of the stereographic latitude/longitude grid.
    pub grid: usize,
    /// Samples on each boundary curve.
    pub boundary_samples: usize,
    /// Transversality margins at or below this are reported as tangent.
    pub margin_threshold: f64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self {
            grid: 512,
            boundary_samples: 10_000,
            margin_threshold: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub status: CheckStatus,
    pub margin: Option<f64>,
    pub detail: String,
}

/// Outcome of [`klein_check`]; renders as a plain-text table.
#[derive(Clone, Debug, PartialEq)]
pub struct KleinReport {
    pub parameter: Complex<f64>,
    pub rows: Vec<CheckRow>,
}

impl KleinReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != CheckStatus::Fail)
    }

    pub fn row(&self, name: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// The transversality margin row's value.
    pub fn transversality_margin(&self) -> f64 {
        self.row(TRANSVERSALITY)
            .and_then(|r| r.margin)
            .unwrap_or(f64::NAN)
    }

    pub fn is_tangent(&self) -> bool {
        self.row(TRANSVERSALITY)
            .map(|r| r.status == CheckStatus::Fail)
            .unwrap_or(true)
    }
}

impl fmt::Display for KleinReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# klein check a={}{:+}i", self.parameter.re, self.parameter.im)?;
        writeln!(f, "{:<24} {:<6} {:>14}  detail", "check", "status", "margin")?;
        for row in &self.rows {
            let margin = row.margin.map_or_else(|| "-".to_string(), |m| format!("{m:.6e}"));
            writeln!(f, "{:<24} {:<6} {:>14}  {}", row.name, row.status, margin, row.detail)?;
        }
        Ok(())
    }
}

pub const IN_DISC: &str = "parameter_in_disc";
pub const COVERAGE: &str = "coverage";
pub const CURVE_OUTSIDE_DISC: &str = "l_prime_outside_disc";
pub const CIRCLE_IN_COV: &str = "circle_inside_delta_cov";
pub const TRANSVERSALITY: &str = "transversality";

/// Samples the sphere and both boundary curves and checks the Klein
/// combination condition `Δ_Cov ∪ Δ_J = Ĉ ∖ {P}` for the standard pair.
///
/// Failures are reported in the table, never raised.
pub fn klein_check<T: Real>(s: &StandardDomains<T>, spec: &SamplingSpec) -> KleinReport {
    let a = s.parameter().value();
    let mut rows = Vec::with_capacity(5);
    let one = SpherePoint::real(T::one());

    rows.push(CheckRow {
        name: IN_DISC,
        status: if s.is_valid() { CheckStatus::Pass } else { CheckStatus::Fail },
        margin: Some(3.0 - (Complex::new(a.re.to_f64_lossy(), a.im.to_f64_lossy()) - 4.0).norm()),
        detail: "|a-4| <= 3".into(),
    });

    // (i) every sampled point other than P is covered by the union.
    let mut total = 0usize;
    let mut uncovered = 0usize;
    let mut worst: Option<SpherePoint<T>> = None;
    let mut visit = |z: SpherePoint<T>| {
        if z == one {
            return;
        }
        total += 1;
        if !(in_delta_cov(z) || s.in_delta_j(z, false)) {
            uncovered += 1;
            worst.get_or_insert(z);
        }
    };
    for z in stereographic_grid::<T>(spec.grid) {
        visit(z);
    }
    // Zoomed grids around P, where the boundaries touch.
    let local = (spec.grid / 4).max(8);
    for scale in [1e-1, 1e-2, 1e-3] {
        for i in 0..local {
            for j in 0..local {
                let u = ((i as f64 + 0.5) / local as f64 * 2.0 - 1.0) * scale;
                let v = ((j as f64 + 0.5) / local as f64 * 2.0 - 1.0) * scale;
                visit(SpherePoint::new(T::one() + T::lit(u), T::lit(v)));
            }
        }
    }
    rows.push(CheckRow {
        name: COVERAGE,
        status: if uncovered == 0 { CheckStatus::Pass } else { CheckStatus::Fail },
        margin: None,
        detail: match worst {
            None => format!("{total} samples covered"),
            Some(z) => format!("{uncovered}/{total} uncovered, e.g. {z}"),
        },
    });

    // (ii) L′ stays strictly outside the closed disc except at P; report the
    // smallest gap away from P.
    let n_curve = (spec.boundary_samples / 2).max(1);
    let mut touching = 0usize;
    let mut far_gap = f64::INFINITY;
    for k in 0..n_curve {
        let sv = (k as f64 + 1.0) / (n_curve as f64 + 1.0);
        let t = (sv / (1.0 - sv)).powi(2);
        for upper in [true, false] {
            let Ok(SpherePoint::Finite(z)) = l_prime(T::lit(t), upper) else { continue };
            let gap = ((z - Complex::new(s.centre(), T::zero())).norm() - s.radius()).to_f64_lossy();
            if gap <= 0.0 {
                touching += 1;
            }
            let off_p = (z - Complex::new(T::one(), T::zero())).norm().to_f64_lossy();
            if off_p >= 0.05 {
                far_gap = far_gap.min(gap);
            }
        }
    }
    rows.push(CheckRow {
        name: CURVE_OUTSIDE_DISC,
        status: if touching == 0 && far_gap > 0.0 { CheckStatus::Pass } else { CheckStatus::Fail },
        margin: Some(far_gap),
        detail: format!("{touching} of {} samples on or inside the circle", 2 * n_curve),
    });

    // The circle, minus P, lies inside Δ_Cov.
    let n_circle = spec.boundary_samples.max(1);
    let mut outside = 0usize;
    for k in 0..n_circle {
        let phi = T::lit(std::f64::consts::TAU * (k as f64 + 0.5) / n_circle as f64);
        let z = Complex::new(s.centre() + s.radius() * phi.cos(), s.radius() * phi.sin());
        if !in_delta_cov(SpherePoint::Finite(z)) {
            outside += 1;
        }
    }
    rows.push(CheckRow {
        name: CIRCLE_IN_COV,
        status: if outside == 0 { CheckStatus::Pass } else { CheckStatus::Fail },
        margin: None,
        detail: format!("{outside} of {n_circle} circle samples outside Delta_Cov"),
    });

    // (iii) transversality of the boundaries to the parabolic axis at P.
    let margin = s.transversality_margin().to_f64_lossy();
    let tangent = margin <= spec.margin_threshold;
    rows.push(CheckRow {
        name: TRANSVERSALITY,
        status: if tangent { CheckStatus::Fail } else { CheckStatus::Pass },
        margin: Some(margin),
        detail: if s.parameter().is_triple_petal() {
            "a = 7: parabolic axis taken as the real axis".into()
        } else if tangent {
            "tangent regime: boundaries tangent to the parabolic axis".into()
        } else {
            "boundaries transverse to the parabolic axis".into()
        },
    });

    KleinReport {
        parameter: Complex::new(a.re.to_f64_lossy(), a.im.to_f64_lossy()),
        rows,
    }
}

/// `n × n` latitude/longitude grid pushed to the plane by stereographic
/// projection. Never contains `∞`, `0` or `P`.
pub fn stereographic_grid<T: Real>(n: usize) -> impl Iterator<Item = SpherePoint<T>> {
    (0..n).flat_map(move |i| {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
        let radius = 1.0 / (theta / 2.0).tan();
        (0..n).map(move |j| {
            let phi = std::f64::consts::TAU * (j as f64 + 0.25) / n as f64;
            SpherePoint::new(T::lit(radius * phi.cos()), T::lit(radius * phi.sin()))
        })
    })
}
