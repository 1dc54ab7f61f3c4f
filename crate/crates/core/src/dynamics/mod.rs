//! Iteration of the single-valued branch of `𝓕ₐ` on `𝓕ₐ⁻¹(Δ̄_J) → Δ̄_J`
//! and escape-time classification of the two limit sets.
//!
//! A point lies in the backward limit set `Λₐ,₋` iff its forward orbit under
//! the restricted branch never leaves `Δ̄_J`. Leaving is permanent, so the
//! escape test is exactly "both images outside `Δ̄_J`"; no escape radius is
//! involved. `Λₐ,₊ = J(Λₐ,₋)`.

mod fatou;
mod periodic;

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use crate::correspondence::{cov0_branches, SpherePoint};
use crate::domains::{DomainError, StandardDomains};
use crate::Real;

pub use fatou::{abel_residual, fatou_repelling, inverse_fixed_branch};
pub use periodic::{find_periodic, seed_grid, NewtonOptions, PeriodicPoint, INDIFFERENT_MARGIN};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("period must be at least 1")]
    InvalidPeriod,
    #[error("max_iter must be at least 1")]
    InvalidIterations,
    #[error("a = 7 has three petals and no single repelling axis")]
    TriplePetal,
    #[error("orbit left the repelling petal at step {step}")]
    PetalExit { step: usize },
    #[error("orbit hit a non-finite value")]
    NonFinite,
}

/// What to do when both images of a point lie in `Δ̄_J`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AmbiguityPolicy {
    /// Keep the image deeper inside `Δ̄_J` (farther from the disc centre).
    #[default]
    Inner,
    /// Stop and report [`Verdict::Ambiguous`].
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Left `Δ̄_J` at this step. Step 0 means the start point was outside.
    Escaped(u32),
    /// Stayed for the configured number of steps.
    Bounded(u32),
    Ambiguous(u32),
}

impl Verdict {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Verdict::Bounded(_))
    }

    pub fn steps(&self) -> u32 {
        match *self {
            Verdict::Escaped(n) | Verdict::Bounded(n) | Verdict::Ambiguous(n) => n,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Escaped(n) => write!(f, "escaped({n})"),
            Verdict::Bounded(n) => write!(f, "bounded({n})"),
            Verdict::Ambiguous(n) => write!(f, "ambiguous({n})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification<T> {
    pub verdict: Verdict,
    /// Last point of the orbit still inside `Δ̄_J` (the start point when the
    /// verdict is `Escaped(0)`).
    pub last_point: SpherePoint<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepResult<T> {
    Next(SpherePoint<T>),
    Escape,
    Ambiguous(SpherePoint<T>, SpherePoint<T>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub max_iter: u32,
    pub policy: AmbiguityPolicy,
}

impl ClassifyOptions {
    pub fn new(max_iter: u32) -> Self {
        Self {
            max_iter,
            policy: AmbiguityPolicy::Inner,
        }
    }

    pub fn strict(mut self) -> Self {
        self.policy = AmbiguityPolicy::Strict;
        self
    }
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self::new(2000)
    }
}

/// Images closer than this (relative) count as one collided image.
fn collided<T: Real>(p: &SpherePoint<T>, q: &SpherePoint<T>) -> bool {
    p.relative_distance(q) <= T::epsilon() * T::lit(64.0)
}

/// One step of the restricted branch `𝓕ₐ| : 𝓕ₐ⁻¹(Δ̄_J) → Δ̄_J`.
pub fn forward_branch_step<T: Real>(s: &StandardDomains<T>, z: SpherePoint<T>) -> StepResult<T> {
    let j = s.parameter().involution();
    let roots = cov0_branches(z);
    let first = j.apply(roots.first);
    let second = j.apply(roots.second);
    match (s.in_delta_j(first, true), s.in_delta_j(second, true)) {
        (true, false) => StepResult::Next(first),
        (false, true) => StepResult::Next(second),
        (false, false) => StepResult::Escape,
        (true, true) if collided(&first, &second) => StepResult::Next(first),
        (true, true) => StepResult::Ambiguous(first, second),
    }
}

fn resolve<T: Real>(
    s: &StandardDomains<T>,
    step: StepResult<T>,
    policy: AmbiguityPolicy,
) -> Option<StepResult<T>> {
    match (step, policy) {
        (StepResult::Ambiguous(p, q), AmbiguityPolicy::Inner) => {
            Some(StepResult::Next(if s.depth(q) > s.depth(p) { q } else { p }))
        }
        (StepResult::Ambiguous(..), AmbiguityPolicy::Strict) => None,
        (other, _) => Some(other),
    }
}

/// Detects an orbit returning to a bit-identical state (Brent's scheme).
///
/// The step map is a pure function of the point, so such an orbit cycles
/// forever and its verdict at any iteration cap is already known.
pub(crate) struct CycleCheck<T> {
    saved: SpherePoint<T>,
    power: u32,
    steps: u32,
}

impl<T: Real> CycleCheck<T> {
    pub(crate) fn new(start: SpherePoint<T>) -> Self {
        Self { saved: start, power: 1, steps: 0 }
    }

    pub(crate) fn repeats(&mut self, next: SpherePoint<T>) -> bool {
        if next.identical(&self.saved) {
            return true;
        }
        self.steps += 1;
        if self.steps == self.power {
            self.saved = next;
            self.power = self.power.saturating_mul(2);
            self.steps = 0;
        }
        false
    }
}

/// Escape-time approximation of membership in `Λₐ,₋`.
pub fn classify_backward<T: Real>(
    s: &StandardDomains<T>,
    z: SpherePoint<T>,
    opts: ClassifyOptions,
) -> Classification<T> {
    if !s.in_delta_j(z, true) {
        return Classification {
            verdict: Verdict::Escaped(0),
            last_point: z,
        };
    }
    let mut current = z;
    let mut cycle = CycleCheck::new(z);
    for k in 1..=opts.max_iter {
        match resolve(s, forward_branch_step(s, current), opts.policy) {
            Some(StepResult::Next(w)) => {
                current = w;
                if cycle.repeats(current) {
                    break;
                }
            }
            Some(StepResult::Escape) => {
                return Classification {
                    verdict: Verdict::Escaped(k),
                    last_point: current,
                }
            }
            _ => {
                return Classification {
                    verdict: Verdict::Ambiguous(k),
                    last_point: current,
                }
            }
        }
    }
    Classification {
        verdict: Verdict::Bounded(opts.max_iter),
        last_point: current,
    }
}

/// Membership in `Λₐ,₊ = J(Λₐ,₋)`: classifies `J(Z)` backward.
pub fn classify_forward<T: Real>(
    s: &StandardDomains<T>,
    z: SpherePoint<T>,
    opts: ClassifyOptions,
) -> Classification<T> {
    classify_backward(s, s.parameter().involution().apply(z), opts)
}

/// Free critical point of the restricted branch. Its critical value is
/// `J(2) = 2/(3 − a)`.
pub const FREE_CRITICAL_POINT: f64 = -1.0;

/// Classifies the orbit of the free critical point `Z = −1`; `Bounded` is
/// the numerical proxy for `a ∈ M_Γ`.
pub fn critical_orbit_classify<T: Real>(
    s: &StandardDomains<T>,
    opts: ClassifyOptions,
) -> Classification<T> {
    classify_backward(s, SpherePoint::real(T::lit(FREE_CRITICAL_POINT)), opts)
}

/// One row of an orbit trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow<T> {
    pub step: u32,
    pub point: SpherePoint<T>,
    pub inside: bool,
    pub ambiguous: bool,
    pub escaped: bool,
}

/// Orbit of `z` under the restricted branch, stopping at escape (or at an
/// ambiguity under the strict policy).
pub fn orbit_trace<T: Real>(
    s: &StandardDomains<T>,
    z: SpherePoint<T>,
    opts: ClassifyOptions,
) -> Vec<TraceRow<T>> {
    let mut rows = Vec::new();
    let mut current = z;
    let inside = s.in_delta_j(z, true);
    rows.push(TraceRow { step: 0, point: z, inside, ambiguous: false, escaped: !inside });
    if !inside {
        return rows;
    }
    for k in 1..=opts.max_iter {
        let raw = forward_branch_step(s, current);
        let ambiguous = matches!(raw, StepResult::Ambiguous(..));
        match resolve(s, raw, opts.policy) {
            Some(StepResult::Next(w)) => {
                current = w;
                rows.push(TraceRow { step: k, point: w, inside: true, ambiguous, escaped: false });
            }
            Some(StepResult::Escape) => {
                rows.push(TraceRow { step: k, point: current, inside: false, ambiguous, escaped: true });
                break;
            }
            _ => {
                rows.push(TraceRow { step: k, point: current, inside: true, ambiguous, escaped: false });
                break;
            }
        }
    }
    rows
}

/// Writes a trace as whitespace-separated `step re im flags` rows, where
/// flags are `I` (inside `Δ̄_J`), `A` (ambiguous step) and `E` (escaped),
/// or `-` when none apply. `∞` is written as `inf inf`.
pub fn write_trace<T: Real, W: Write>(rows: &[TraceRow<T>], mut out: W) -> io::Result<()> {
    writeln!(out, "# step re im flags")?;
    for r in rows {
        let mut flags = String::new();
        if r.inside {
            flags.push('I');
        }
        if r.ambiguous {
            flags.push('A');
        }
        if r.escaped {
            flags.push('E');
        }
        if flags.is_empty() {
            flags.push('-');
        }
        match r.point {
            SpherePoint::Finite(z) => writeln!(out, "{} {:.17e} {:.17e} {}", r.step, z.re.to_f64_lossy(), z.im.to_f64_lossy(), flags)?,
            SpherePoint::Infinity => writeln!(out, "{} inf inf {}", r.step, flags)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::{f_images, Parameter};

    type P = SpherePoint<f64>;

    fn domains(re: f64, im: f64) -> StandardDomains<f64> {
        StandardDomains::new(Parameter::from_parts(re, im).unwrap()).unwrap()
    }

    #[test]
    fn parabolic_point_is_fixed_by_the_branch() {
        for s in [domains(4.5, 0.0), domains(5.0, 1.5), domains(7.0, 0.0)] {
            match forward_branch_step(&s, P::real(1.0)) {
                StepResult::Next(w) => assert!(w.relative_distance(&P::real(1.0)) < 1e-15),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn s_maps_to_p_with_collided_images() {
        let s = domains(4.5, 0.0);
        match forward_branch_step(&s, P::real(-2.0)) {
            StepResult::Next(w) => assert!(w.relative_distance(&P::real(1.0)) < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_agrees_with_direct_membership() {
        let s = domains(4.0, 0.0);
        for z in [P::real(s.centre()), P::real(-1.5), P::new(-0.5, 0.7), P::new(0.3, -1.1)] {
            let img = f_images(s.parameter(), z);
            let inside = [s.in_delta_j(img.first, true), s.in_delta_j(img.second, true)];
            match forward_branch_step(&s, z) {
                StepResult::Escape => assert_eq!(inside, [false, false]),
                StepResult::Next(w) => {
                    assert!(inside.iter().any(|&b| b));
                    assert!(img.contains(&w, 0.0));
                }
                StepResult::Ambiguous(..) => assert_eq!(inside, [true, true]),
            }
        }
    }

    #[test]
    fn classify_examples() {
        let s = domains(4.5, 0.0);
        let opts = ClassifyOptions::new(2000);
        assert_eq!(classify_backward(&s, P::real(1.0), opts).verdict, Verdict::Bounded(2000));
        assert_eq!(classify_backward(&s, P::real(-2.0), opts).verdict, Verdict::Bounded(2000));
        let far = classify_backward(&s, P::new(0.0, 1e6), opts).verdict;
        assert!(matches!(far, Verdict::Escaped(n) if (1..=3).contains(&n)), "{far}");
        assert_eq!(classify_forward(&s, P::real(1.0), opts).verdict, Verdict::Bounded(2000));
        // start point inside the open disc is outside Δ̄_J at once
        assert_eq!(classify_backward(&s, P::real(s.centre()), opts).verdict, Verdict::Escaped(0));
    }

    #[test]
    fn forward_is_backward_at_j_image() {
        let s = domains(4.565, 0.42);
        let j = s.parameter().involution();
        let opts = ClassifyOptions::new(500);
        for z in [P::new(0.2, 0.4), P::new(-1.3, 0.1), P::new(2.0, 1.0), P::Finite(s.parameter().value())] {
            assert_eq!(
                classify_forward(&s, z, opts).verdict,
                classify_backward(&s, j.apply(z), opts).verdict
            );
        }
    }

    #[test]
    fn escape_is_permanent() {
        let s = domains(4.565, 0.42);
        let opts = ClassifyOptions::new(2000);
        for k in 0..40 {
            let z = P::new(-2.5 + 0.1 * k as f64, 0.35);
            let c = classify_backward(&s, z, opts);
            if let Verdict::Escaped(n) = c.verdict {
                if n > 0 {
                    let again = classify_backward(&s, c.last_point, opts);
                    assert_eq!(again.verdict, Verdict::Escaped(1));
                }
            }
        }
    }

    #[test]
    fn critical_orbit_for_real_parameters() {
        let opts = ClassifyOptions::new(10_000);
        assert!(critical_orbit_classify(&domains(4.5, 0.0), opts).verdict.is_bounded());
        // a = 3 sends the critical value J(2) to ∞.
        let s3 = domains(3.0, 0.0);
        let trace = orbit_trace(&s3, P::real(-1.0), ClassifyOptions::new(5));
        assert_eq!(trace[1].point, P::Infinity);
        assert!(!critical_orbit_classify(&s3, opts).verdict.is_bounded());
    }

    #[test]
    fn critical_orbit_conjugation_symmetry() {
        let opts = ClassifyOptions::new(3000);
        for (re, im) in [(4.2, 1.3), (5.5, 2.0), (6.3, 0.8), (4.0, 2.9)] {
            let up = critical_orbit_classify(&domains(re, im), opts).verdict;
            let down = critical_orbit_classify(&domains(re, -im), opts).verdict;
            assert_eq!(up, down, "a = {re}+{im}i");
        }
    }

    #[test]
    fn strict_policy_reports_ambiguity() {
        // Both images in Δ̄_J cannot happen on 𝓕⁻¹(Δ̄_J) in exact arithmetic;
        // force it with a parameter outside 𝒟, where the pair is not Klein.
        let s = domains(10.0, 0.0);
        let mut found = false;
        for k in 0..2000 {
            let z = P::new(-2.001 - 1e-4 * k as f64, 0.0);
            if let StepResult::Ambiguous(..) = forward_branch_step(&s, z) {
                let c = classify_backward(&s, z, ClassifyOptions::new(10).strict());
                assert!(matches!(c.verdict, Verdict::Ambiguous(_)));
                let inner = classify_backward(&s, z, ClassifyOptions::new(10));
                assert!(!matches!(inner.verdict, Verdict::Ambiguous(_)));
                found = true;
                break;
            }
        }
        assert!(found);
    }

    #[test]
    fn trace_rows_are_plain_text() {
        let s = domains(4.5, 0.0);
        let rows = orbit_trace(&s, P::new(0.0, 2.0), ClassifyOptions::new(50));
        let mut buf = Vec::new();
        write_trace(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# step re im flags\n0 "));
        assert_eq!(text.lines().count(), rows.len() + 1);
        for line in text.lines().skip(1) {
            assert_eq!(line.split_whitespace().count(), 4);
        }
    }
}
