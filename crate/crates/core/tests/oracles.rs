use modmate::correspondence::{
    branch_derivative, coordinate_change, cov0_branches, f_images, f_preimages, j_involution,
    parabolic_jet, Direction,
};
use modmate::dynamics::{classify_backward, critical_orbit_classify, ClassifyOptions};
use modmate::per11::{classify_filled_julia, JuliaOptions};
use modmate::{Cap, Domains, Param, Point, Verdict, C64};
use proptest::prelude::*;

/// Truncated power series in `ζ` up to degree 4.
type Series = [C64; 5];

fn mul(p: &Series, q: &Series) -> Series {
    let mut r = [C64::new(0.0, 0.0); 5];
    for i in 0..5 {
        for j in 0..5 - i {
            r[i + j] += p[i] * q[j];
        }
    }
    r
}

/// Coefficients of `J(W(1 + ζ)) − 1` on the branch `W(1) = 1`, from series
/// arithmetic. With `W = 1 + u` the relation reads
/// `3u + u² + ζu + 3ζ + ζ² = 0`, and
/// `J(W) − 1 = −((a − 1)/2)·Σ_{k≥1} (−u/d)ᵏ` with `d = (1 − a)/2`.
fn series_oracle(a: C64) -> Series {
    let zero = C64::new(0.0, 0.0);
    let mut zeta = [zero; 5];
    zeta[1] = C64::new(1.0, 0.0);
    let mut u = [zero; 5];
    for _ in 0..5 {
        let uu = mul(&u, &u);
        let zu = mul(&zeta, &u);
        let mut next = [zero; 5];
        for k in 0..5 {
            next[k] = -(3.0 * zeta[k] + mul(&zeta, &zeta)[k] + zu[k] + uu[k]) / 3.0;
        }
        u = next;
    }
    let d = (1.0 - a) / 2.0;
    let x = u.map(|c| -c / d);
    let mut power = x;
    let mut sum = [zero; 5];
    for _ in 1..5 {
        for k in 0..5 {
            sum[k] += power[k];
        }
        power = mul(&power, &x);
    }
    sum.map(|c| -(a - 1.0) / 2.0 * c)
}

fn disc_parameter() -> impl Strategy<Value = Param> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_filter_map("a = 1", |(r, t)| {
        let a = C64::new(4.0, 0.0) + C64::from_polar(3.0 * r.sqrt(), t);
        Param::new(a).ok()
    })
}

/// Parameters with `|a − 1| ≥ 1/2`, where `J` is well conditioned on
/// moderate `Z`.
fn conditioned_parameter() -> impl Strategy<Value = Param> {
    disc_parameter().prop_filter("near a = 1", |a| (a.value() - 1.0).norm() >= 0.5)
}

fn point(bound: f64) -> impl Strategy<Value = C64> {
    (-bound..bound, -bound..bound).prop_map(|(x, y)| C64::new(x, y))
}

#[test]
fn jet_matches_series_oracle() {
    for a in [C64::new(4.0, 0.0), C64::new(5.0, 1.0), C64::new(6.0, -2.0), C64::new(7.0, 0.0), C64::new(2.5, 2.2)] {
        let s = series_oracle(a);
        let jet = parabolic_jet(&Param::new(a).unwrap());
        let scale = 1.0 + jet.c4.norm();
        assert!(s[0].norm() < 1e-15);
        assert!((s[1] - 1.0).norm() < 1e-14);
        assert!((s[2] - jet.c2).norm() < 1e-13 * scale, "{a}");
        assert!((s[3] - jet.c3).norm() < 1e-13 * scale, "{a}");
        assert!((s[4] - jet.c4).norm() < 1e-13 * scale, "{a}");
    }
}

#[test]
fn involution_fixes_p_and_a() {
    let a = Param::from_parts(5.5, -1.25).unwrap();
    assert_eq!(j_involution(&a, Point::real(1.0)), Point::real(1.0));
    let fixed = j_involution(&a, Point::Finite(a.value())).finite().unwrap();
    assert!((fixed - a.value()).norm() < 1e-14);
    // J swaps the pole m = (a+1)/2 and ∞
    assert_eq!(j_involution(&a, Point::Finite((a.value() + 1.0) / 2.0)), Point::Infinity);
}

#[test]
fn coordinate_change_sends_zero_to_p() {
    let a = Param::from_parts(4.7, 0.9).unwrap();
    let p = coordinate_change(&a, Point::real(0.0), Direction::SmallToBig);
    assert!(p.relative_distance(&Point::real(1.0)) < 1e-15);
    let s = -3.0 / (a.value() + 2.0);
    let big = coordinate_change(&a, Point::Finite(s), Direction::SmallToBig);
    assert!(big.relative_distance(&Point::real(-2.0)) < 1e-14);
}

#[test]
fn golden_critical_orbit() {
    for im in [2.9, -2.9] {
        let s = Domains::new(Param::from_parts(4.0, im).unwrap()).unwrap();
        let c = critical_orbit_classify(&s, ClassifyOptions::new(10_000));
        assert_eq!(c.verdict, Verdict::Escaped(72));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn cov_roots_satisfy_relation(z in point(50.0)) {
        for w in cov0_branches(Point::Finite(z)).as_array() {
            let w = w.finite().unwrap();
            let r = (z * z + z * w + w * w - 3.0).norm();
            prop_assert!(r < 1e-13 * z.norm_sqr().max(1.0), "{r}");
        }
    }

    #[test]
    fn cov_roots_sum_and_product(z in point(50.0)) {
        let b = cov0_branches(Point::Finite(z));
        let (w1, w2) = (b.first.finite().unwrap(), b.second.finite().unwrap());
        prop_assert!((w1 + w2 + z).norm() < 1e-13 * z.norm().max(1.0));
        prop_assert!((w1 * w2 - (z * z - 3.0)).norm() < 1e-13 * z.norm_sqr().max(1.0));
    }

    #[test]
    fn involution_round_trip(a in conditioned_parameter(), z in point(10.0)) {
        let back = j_involution(&a, j_involution(&a, Point::Finite(z))).finite().unwrap();
        prop_assert!((back - z).norm() < 1e-12 * z.norm().max(1.0));
    }

    #[test]
    fn preimages_are_conjugate_images(a in disc_parameter(), z in point(10.0)) {
        let j = |p| j_involution(&a, p);
        let pre = f_preimages(&a, Point::Finite(z));
        let other = f_images(&a, j(Point::Finite(z))).map(j);
        prop_assert!(pre.set_distance(&other) < 1e-9);
    }

    #[test]
    fn derivative_matches_central_difference(a in disc_parameter(), z in point(4.0)) {
        let z = Point::Finite(z);
        let pair = cov0_branches(z);
        let roots = pair.as_array();
        let zf = z.finite().unwrap();
        // skip points near the branch locus, where the roots collide
        let gap = (roots[0].finite().unwrap() - roots[1].finite().unwrap()).norm();
        prop_assume!(gap > 0.1);
        let j = a.involution();
        for (k, w) in roots.iter().enumerate() {
            let Ok(d) = branch_derivative(&a, z, *w) else { continue };
            let img = j.apply(*w).finite().unwrap();
            prop_assume!(img.norm() < 1e3 && d.norm() < 1e4);
            let h = 1e-5;
            let branch = |dz: C64| {
                let b = cov0_branches(Point::Finite(zf + dz)).as_array();
                // follow the root continuously from w
                let w0 = roots[k].finite().unwrap();
                let near = if (b[0].finite().unwrap() - w0).norm() < (b[1].finite().unwrap() - w0).norm() { b[0] } else { b[1] };
                j.apply(near).finite().unwrap()
            };
            let fd = (branch(C64::new(h, 0.0)) - branch(C64::new(-h, 0.0))) / (2.0 * h);
            prop_assert!((fd - d).norm() < 1e-5 * d.norm().max(1.0), "{fd} vs {d}");
        }
    }

    #[test]
    fn conjugation_symmetry(a in disc_parameter(), z in point(6.0)) {
        let s = Domains::new(a).unwrap();
        let sb = Domains::new(a.conj()).unwrap();
        let opts = ClassifyOptions::new(300);
        prop_assert_eq!(
            classify_backward(&s, Point::Finite(z), opts).verdict,
            classify_backward(&sb, Point::Finite(z.conj()), opts).verdict
        );
    }

    #[test]
    fn escape_is_permanent(a in disc_parameter(), z in point(6.0)) {
        let s = Domains::new(a).unwrap();
        let short = classify_backward(&s, Point::Finite(z), ClassifyOptions::new(100)).verdict;
        let long = classify_backward(&s, Point::Finite(z), ClassifyOptions::new(1000)).verdict;
        if let Verdict::Escaped(n) = short {
            prop_assert_eq!(long, Verdict::Escaped(n));
        }
    }

    #[test]
    fn per11_sign_symmetry(re in -2.0..2.0f64, im in -2.0..2.0f64, z in point(4.0)) {
        let cap = Cap::new(C64::new(re, im));
        let opts = JuliaOptions { max_iter: 2000, escape_radius: 100.0 };
        prop_assert_eq!(
            classify_filled_julia(&cap, Point::Finite(z), opts).verdict,
            classify_filled_julia(&cap.neg(), Point::Finite(-z), opts).verdict
        );
    }
}
