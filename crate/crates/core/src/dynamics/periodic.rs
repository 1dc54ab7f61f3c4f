use num_complex::Complex;

use super::DynamicsError;
use crate::correspondence::{branch_derivative, cov0_branches, SpherePoint};
use crate::domains::StandardDomains;
use crate::Real;

/// A periodic point of the restricted branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicPoint<T> {
    pub point: Complex<T>,
    /// Exact (minimal) period.
    pub period: usize,
    /// Product of branch derivatives along the cycle.
    pub multiplier: Complex<T>,
    /// `|branchᵖ(point) − point|`.
    pub residual: T,
}

/// Multipliers within this of the unit circle count as indifferent. Newton
/// only locates the parabolic point `P` to about `√ε`, so its multiplier
/// comes out as `1 + O(10⁻⁸)`.
pub const INDIFFERENT_MARGIN: f64 = 1e-6;

impl<T: Real> PeriodicPoint<T> {
    pub fn is_repelling(&self) -> bool {
        self.multiplier.norm() > T::one() + T::lit(INDIFFERENT_MARGIN)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    pub max_steps: usize,
    /// Accepted residual `|branchᵖ(Z) − Z|`.
    pub residual_tol: f64,
    /// Points closer than this are one point.
    pub merge_distance: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_steps: 64,
            residual_tol: 1e-10,
            merge_distance: 1e-6,
        }
    }
}

/// The branch continued analytically off `𝓕ₐ⁻¹(Δ̄_J)`: the image deeper in
/// `Δ̄_J`, with its derivative and whether it actually lies in `Δ̄_J`.
fn branch_eval<T: Real>(
    s: &StandardDomains<T>,
    z: Complex<T>,
) -> Option<(Complex<T>, Complex<T>, bool)> {
    let j = s.parameter().involution();
    let roots = cov0_branches(SpherePoint::Finite(z));
    let (w1, w2) = (roots.first, roots.second);
    let (i1, i2) = (j.apply(w1), j.apply(w2));
    let (w, image) = if s.depth(i2) > s.depth(i1) { (w2, i2) } else { (w1, i1) };
    let image = image.finite()?;
    let d = branch_derivative(s.parameter(), SpherePoint::Finite(z), w).ok()?;
    Some((image, d, s.in_delta_j(SpherePoint::Finite(image), true)))
}

struct Orbit<T> {
    end: Complex<T>,
    multiplier: Complex<T>,
    inside: bool,
}

fn iterate<T: Real>(s: &StandardDomains<T>, z: Complex<T>, n: usize) -> Option<Orbit<T>> {
    let mut current = z;
    let mut multiplier = Complex::new(T::one(), T::zero());
    let mut inside = s.in_delta_j(SpherePoint::Finite(z), true);
    for _ in 0..n {
        let (next, d, ok) = branch_eval(s, current)?;
        multiplier *= d;
        inside &= ok;
        current = next;
    }
    Some(Orbit { end: current, multiplier, inside })
}

fn scale<T: Real>(z: Complex<T>) -> T {
    T::one().max(z.norm())
}

/// Newton's method on `h(Z) = branchᵖ(Z) − Z` from each seed.
///
/// Seeds that do not reach the residual tolerance within `max_steps`, hit a
/// singular derivative, or converge to a cycle leaving `Δ̄_J` are dropped.
/// Every point of each cycle found is returned, de-duplicated.
pub fn find_periodic<T: Real>(
    s: &StandardDomains<T>,
    period: usize,
    seeds: &[Complex<T>],
    opts: &NewtonOptions,
) -> Result<Vec<PeriodicPoint<T>>, DynamicsError> {
    if period == 0 {
        return Err(DynamicsError::InvalidPeriod);
    }
    let tol = T::lit(opts.residual_tol);
    let merge = T::lit(opts.merge_distance);
    let step_floor = T::epsilon() * T::lit(32.0);
    let mut found: Vec<PeriodicPoint<T>> = Vec::new();

    for &seed in seeds {
        let mut z = seed;
        for _ in 0..opts.max_steps {
            let Some(orbit) = iterate(s, z, period) else { break };
            let h = orbit.end - z;
            let dh = orbit.multiplier - Complex::new(T::one(), T::zero());
            if h.norm() == T::zero() || dh.norm() == T::zero() {
                break;
            }
            let step = h / dh;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            z -= step;
            if step.norm() <= step_floor * scale(z) {
                break;
            }
        }
        let Some(orbit) = iterate(s, z, period) else { continue };
        let residual = (orbit.end - z).norm();
        if !(residual < tol * scale(z)) || !orbit.inside {
            continue;
        }
        if found.iter().any(|p| (p.point - z).norm() < merge) {
            continue;
        }
        let exact = minimal_period(s, z, period, tol);
        // Record the whole cycle.
        let mut point = z;
        for _ in 0..exact {
            if !found.iter().any(|p| (p.point - point).norm() < merge) {
                if let Some(o) = iterate(s, point, exact) {
                    found.push(PeriodicPoint {
                        point,
                        period: exact,
                        multiplier: o.multiplier,
                        residual: (o.end - point).norm(),
                    });
                }
            }
            match branch_eval(s, point) {
                Some((next, _, _)) => point = next,
                None => break,
            }
        }
    }
    Ok(found)
}

fn minimal_period<T: Real>(s: &StandardDomains<T>, z: Complex<T>, period: usize, tol: T) -> usize {
    (1..=period)
        .filter(|k| period.is_multiple_of(*k))
        .find(|&k| {
            iterate(s, z, k)
                .map(|o| (o.end - z).norm() < tol * scale(z))
                .unwrap_or(false)
        })
        .unwrap_or(period)
}

/// `n × n` seeds over the rectangle centred at `centre`, keeping those in
/// `Δ̄_J`.
pub fn seed_grid<T: Real>(
    s: &StandardDomains<T>,
    centre: Complex<T>,
    width: T,
    height: T,
    n: usize,
) -> Vec<Complex<T>> {
    let mut seeds = Vec::with_capacity(n * n);
    let nf = T::lit(n as f64);
    let half = T::lit(0.5);
    for i in 0..n {
        for k in 0..n {
            let u = (T::lit(i as f64) + half) / nf - half;
            let v = (T::lit(k as f64) + half) / nf - half;
            let z = centre + Complex::new(u * width, v * height);
            if s.in_delta_j(SpherePoint::Finite(z), true) {
                seeds.push(z);
            }
        }
    }
    seeds
}
