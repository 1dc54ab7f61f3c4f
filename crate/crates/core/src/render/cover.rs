//! Pixel cover of `Λₐ,₋` and `Λₐ,₊` by inverse iteration.
//!
//! Escape-time sampling at pixel centres loses every part of the limit set
//! thinner than a pixel, in particular the cusps at `P` and at all of its
//! preimages. Here the backward tree of `P` under the two inverse branches
//! of the restricted map is walked breadth first. Every tree point lies in
//! `Λₐ,₋`, so each pixel it lands in meets the set; `J` of a tree point
//! lies in `Λₐ,₊`.
//!
//! A node is expanded only if no earlier node fell into the same cell. Cells
//! are quarter pixels, refined near `P` in proportion to the local step
//! `|c₂ζ²| + |c₄ζ³|` of the branch fixing `P`, so the slow chains converging
//! to `P` keep advancing until they reach the pixel of `P`.

use std::collections::{HashSet, VecDeque};

use num_complex::Complex;

use super::analysis::Mask;
use super::{Plane, RenderError, Viewport};
use crate::correspondence::{
    coordinate_change, cov0_branches, parabolic_jet, Direction, Parameter, SpherePoint,
};
use crate::domains::StandardDomains;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverOptions {
    /// Upper bound on expanded tree nodes.
    pub max_nodes: usize,
}

impl Default for CoverOptions {
    fn default() -> Self {
        Self { max_nodes: 4_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitSetCover {
    pub backward: Mask,
    pub forward: Mask,
    /// Expanded nodes.
    pub nodes: usize,
    /// Whether `max_nodes` stopped the walk early.
    pub truncated: bool,
}

const MAX_LEVEL: i32 = 40;
/// Cells away from `P` are a quarter pixel wide.
const BASE_LEVEL: i32 = 2;

/// Walks the backward tree of `P` and marks the pixels of `viewport` it
/// meets.
pub fn limit_set_cover(
    a: &Parameter<f64>,
    viewport: &Viewport,
    opts: &CoverOptions,
) -> Result<LimitSetCover, RenderError> {
    if !a.in_standard_disc() {
        return Err(RenderError::ParameterOutsideDisc(a.value()));
    }
    let s = StandardDomains::new(*a).map_err(|_| RenderError::ParameterOutsideDisc(a.value()))?;
    let j = a.involution();
    let jet = parabolic_jet(a);
    let (c2, c4) = (jet.c2.norm(), jet.c4.norm());
    let (w, h) = (viewport.width_px, viewport.height_px);
    let px = viewport.pixel_size();
    let mut backward = Mask::from_fn(w, h, |_, _| false);
    let mut forward = backward.clone();

    let to_plane = |z: Complex<f64>| -> Option<(Complex<f64>, f64)> {
        match viewport.plane {
            Plane::Big => Some((z, 1.0)),
            Plane::Small => {
                let u = coordinate_change(a, SpherePoint::Finite(z), Direction::BigToSmall).finite()?;
                // dz/dZ = (z + 1)²/(a − 1)
                let scale = ((u + 1.0) * (u + 1.0) / (a.value() - 1.0)).norm();
                Some((u, scale))
            }
        }
    };
    let mark = |mask: &mut Mask, u: Complex<f64>| {
        let (col, row) = viewport.to_pixel(u);
        let (col, row) = (col.round(), row.round());
        if col >= 0.0 && row >= 0.0 && (col as usize) < w && (row as usize) < h {
            let i = row as usize * w + col as usize;
            mask.bits[i] = true;
        }
    };

    let mut seen: HashSet<(i32, i64, i64)> = HashSet::new();
    let mut queue = VecDeque::from([Complex::new(1.0, 0.0)]);
    let mut nodes = 0;
    let mut truncated = false;
    while let Some(z) = queue.pop_front() {
        let Some((u, scale)) = to_plane(z) else { continue };
        mark(&mut backward, u);
        if let Some(ju) = j.apply(SpherePoint::Finite(z)).finite().and_then(&to_plane) {
            mark(&mut forward, ju.0);
        }

        let zeta = (z - 1.0).norm();
        if zeta * scale < 0.5 * px && zeta > 0.0 {
            // Already in the pixel of P; descendants repeat the tree of P.
            continue;
        }
        let step = (c2 * zeta * zeta + c4 * zeta * zeta * zeta) * scale;
        let level = if step >= 4.0 * px || zeta == 0.0 {
            0
        } else {
            ((4.0 * px / step).log2().ceil() as i32).clamp(0, MAX_LEVEL)
        };
        let cell = px / f64::powi(2.0, level + BASE_LEVEL);
        let key = (level, (u.re / cell).floor() as i64, (u.im / cell).floor() as i64);
        if !seen.insert(key) {
            continue;
        }
        if nodes == opts.max_nodes {
            truncated = true;
            break;
        }
        nodes += 1;

        let Some(jz) = j.apply(SpherePoint::Finite(z)).finite() else { continue };
        for pre in cov0_branches(SpherePoint::Finite(jz)).as_array() {
            if let SpherePoint::Finite(p) = pre {
                if s.in_delta_j(pre, true) && p != z {
                    queue.push_back(p);
                }
            }
        }
    }
    Ok(LimitSetCover { backward, forward, nodes, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{classify_backward, ClassifyOptions};

    #[test]
    fn marks_p_in_both_sets() {
        let a = Parameter::from_parts(4.5, 0.0).unwrap();
        // P at the centre of pixel (8, 8)
        let v = Viewport::square(Complex::new(1.0, 0.0), 4.25, 17).unwrap();
        let c = limit_set_cover(&a, &v, &CoverOptions::default()).unwrap();
        assert!(c.backward.get(8, 8) && c.forward.get(8, 8));
        assert!(!c.truncated);
    }

    #[test]
    fn tree_points_are_bounded() {
        // Sample pixels hit by the cover at a coarse resolution and check the
        // escape time agrees near them: the pixel centre is within one pixel
        // of a point whose orbit never leaves.
        let a = Parameter::from_parts(5.0, 0.5).unwrap();
        let s = StandardDomains::new(a).unwrap();
        let v = Viewport::square(Complex::new(0.0, 0.0), 5.0, 64).unwrap();
        let c = limit_set_cover(&a, &v, &CoverOptions::default()).unwrap();
        assert!(c.backward.count() > 20);
        // the far side of the disc never gets covered
        let (col, row) = v.to_pixel(Complex::new(2.4, 0.0));
        assert!(!c.backward.get(col.round() as usize, row.round() as usize));
        // every covered pixel has a non-escaping point or a late escape nearby
        let opts = ClassifyOptions::new(400);
        for row in 0..64 {
            for col in 0..64 {
                if c.backward.get(col, row) {
                    let z = SpherePoint::Finite(v.pixel_point(col, row));
                    let n = classify_backward(&s, z, opts).verdict.steps();
                    assert!(n >= 1, "pixel ({col}, {row})");
                }
            }
        }
    }

    #[test]
    fn budget_is_reported() {
        let a = Parameter::from_parts(4.5, 0.3).unwrap();
        let v = Viewport::square(Complex::new(0.0, 0.0), 5.0, 128).unwrap();
        let c = limit_set_cover(&a, &v, &CoverOptions { max_nodes: 50 }).unwrap();
        assert!(c.truncated);
        assert_eq!(c.nodes, 50);
    }
}
