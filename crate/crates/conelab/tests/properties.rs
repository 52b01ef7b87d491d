//! Randomized invariants: projection variational inequalities, dual
//! margin consistency, dilation monotonicity, positively supported
//! points staying maximal, certificate replay, and monotonicity of the
//! strict-maximality modulus in the shell level.

use proptest::prelude::*;

use conelab::analysis::{is_maximal, pos_support_check, strict_max_modulus};
use conelab::cones::ConeSpec;
use conelab::sets::{SetSpec, Verdict};
use conelab::solvers::SolverConfig;
use conelab::spaces::{NormKind, Vector};

fn cfg_with_seed(seed: u64) -> SolverConfig {
    SolverConfig {
        seed,
        ..SolverConfig::default()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y = proj(z)` onto a convex set satisfies `<z - y, w - y> <= 0` for
/// every member `w`; the slack absorbs the iterative projector tolerance.
fn check_vi(
    project: &dyn Fn(&Vector) -> (Vector, f64),
    members: &[Vector],
    z: &Vector,
) -> Result<(), TestCaseError> {
    let (y, dist) = project(z);
    prop_assert!(dist >= -1e-12);
    for w in members {
        let lhs = dot(
            &z.coords()
                .iter()
                .zip(y.coords())
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
            &w.coords()
                .iter()
                .zip(y.coords())
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        prop_assert!(
            lhs <= 1e-7,
            "variational inequality violated: {lhs} for witness {:?}",
            w.coords()
        );
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn set_projections_satisfy_the_variational_inequality(
        kind in 0usize..4,
        dim in 2usize..=4,
        seed in 1u64..=3,
        raw in proptest::collection::vec(-1.5f64..1.5, 4),
    ) {
        let cfg = cfg_with_seed(seed);
        let k = match kind {
            0 => SetSpec::flat(dim, 1.0).unwrap(),
            1 => SetSpec::minus_slanted(dim).unwrap(),
            2 => SetSpec::disk(1.0).unwrap(),
            _ => SetSpec::square(),
        };
        let d = k.dim();
        let z = Vector::new(raw[..d].to_vec(), k.ambient()).unwrap();
        let members = k.samples(12, seed);
        check_vi(&|q| k.project(q, &cfg).unwrap(), &members, &z)?;
    }

    #[test]
    fn cone_projections_satisfy_the_variational_inequality(
        kind in 0usize..3,
        dim in 2usize..=4,
        seed in 1u64..=3,
        raw in proptest::collection::vec(-1.5f64..1.5, 4),
    ) {
        let cfg = cfg_with_seed(seed);
        let p = match kind {
            0 => ConeSpec::orthant(dim, NormKind::L2).unwrap(),
            1 => ConeSpec::slanted(dim).unwrap(),
            _ => {
                let o = ConeSpec::orthant(2, NormKind::L2).unwrap();
                let ones = Vector::new(vec![1.0, 1.0], NormKind::L2).unwrap();
                let base = o.base(&ones, 1.0).unwrap();
                o.dilate(&base, 0.25).unwrap()
            }
        };
        let d = p.dim();
        let z = Vector::new(raw[..d].to_vec(), p.ambient()).unwrap();
        let members = p.samples(12, seed);
        check_vi(&|q| p.project(q, &cfg).unwrap(), &members, &z)?;
    }

    #[test]
    fn dual_margin_agrees_with_strict_positivity(
        kind in 0usize..2,
        dim in 2usize..=5,
        raw in proptest::collection::vec(-1.0f64..1.5, 5),
    ) {
        let p = match kind {
            0 => ConeSpec::orthant(dim, NormKind::L2).unwrap(),
            _ => ConeSpec::slanted(dim).unwrap(),
        };
        let f = Vector::new(raw[..dim].to_vec(), NormKind::L2).unwrap();
        let margin = p.positivity_margin(&f).unwrap();
        prop_assert_eq!(p.strictly_positive(&f, 0.0).unwrap(), margin > 0.0);
        if p.is_slanted() {
            // worst corner of the box slice, restated
            let c = f.coords();
            let corner = c[0]
                - c.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, v)| (i + 1) as f64 * v.abs())
                    .sum::<f64>();
            let scale = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if scale > 0.0 {
                prop_assert!((margin - corner / scale).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn dilation_is_monotone_in_delta(
        dim in 2usize..=4,
        seed in 1u64..=3,
        d1 in 0.05f64..0.2,
        bump in 0.02f64..0.1,
    ) {
        let p = ConeSpec::orthant(dim, NormKind::L2).unwrap();
        let ones = Vector::new(vec![1.0; dim], NormKind::L2).unwrap();
        let base = p.base(&ones, 1.0).unwrap();
        let d2 = d1 + bump;
        let small = p.dilate(&base, d1).unwrap();
        let large = p.dilate(&base, d2).unwrap();
        for s in p.samples(10, seed) {
            prop_assert!(small.contains(&s, 1e-9).unwrap());
        }
        for s in small.samples(10, seed) {
            prop_assert!(large.contains(&s, 1e-9).unwrap());
        }
    }

    #[test]
    fn positively_supported_points_stay_maximal(
        kind in 0usize..3,
        seed in 1u64..=3,
        raw in proptest::collection::vec(0.2f64..1.5, 5),
    ) {
        let cfg = cfg_with_seed(seed);
        let (k, p, x, f) = match kind {
            0 => {
                let k = SetSpec::square();
                let p = ConeSpec::orthant(2, NormKind::L2).unwrap();
                let f = Vector::new(raw[..2].to_vec(), NormKind::L2).unwrap();
                let x = k.maximize(&f, &cfg).unwrap().0;
                (k, p, x, f)
            }
            1 => {
                let dim = 4;
                let k = SetSpec::slab(dim).unwrap();
                let p = ConeSpec::orthant(dim, NormKind::L1).unwrap();
                let f = Vector::new(raw[..dim].to_vec(), NormKind::L1).unwrap();
                let x = k.maximize(&f, &cfg).unwrap().0;
                (k, p, x, f)
            }
            _ => {
                let dim = 4;
                let k = SetSpec::minus_slanted(dim).unwrap();
                let p = ConeSpec::slanted(dim).unwrap();
                // e1 plus a perturbation small enough to keep the worst
                // corner margin positive; the apex is the exact maximizer
                let mut fc = vec![0.0; dim];
                fc[0] = 1.0;
                for i in 1..dim {
                    fc[i] = (raw[i] - 0.85) * 0.2 / (dim as f64 * (i + 1) as f64);
                }
                let f = Vector::new(fc, NormKind::L2).unwrap();
                let x = Vector::zeros(dim, NormKind::L2);
                (k, p, x, f)
            }
        };
        prop_assert!(p.strictly_positive(&f, 0.0).unwrap());

        let support = pos_support_check(&k, &p, &x, &f, &cfg).unwrap();
        prop_assert_eq!(support.verdict, Verdict::Supported);
        prop_assert!(support.replay(&k, &p, &x, &cfg).unwrap());

        let max = is_maximal(&k, &p, &x, &cfg).unwrap();
        prop_assert_eq!(max.verdict, Verdict::Maximal);
    }

    #[test]
    fn dominance_certificates_replay_only_at_their_own_point(
        x1 in -0.9f64..-0.3,
        x2 in -0.3f64..0.3,
        seed in 1u64..=3,
    ) {
        let cfg = cfg_with_seed(seed);
        let k = SetSpec::flat(3, 1.0).unwrap();
        let p = ConeSpec::orthant(3, NormKind::L2).unwrap();
        let x = Vector::new(vec![x1, x2, 0.0], NormKind::L2).unwrap();
        let cert = is_maximal(&k, &p, &x, &cfg).unwrap();
        prop_assert_eq!(cert.verdict, Verdict::Dominated);
        prop_assert!(cert.replay(&k, &p, &x, &cfg).unwrap());
        // replaying against a shifted anchor must change gain and fail
        let shifted = Vector::new(vec![x1 + 0.05, x2, 0.0], NormKind::L2).unwrap();
        prop_assert!(!cert.replay(&k, &p, &shifted, &cfg).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, ..ProptestConfig::default() })]

    #[test]
    fn modulus_is_monotone_in_the_shell_level(
        dim in 3usize..=5,
        seed in 1u64..=3,
        e1 in 0.15f64..0.45,
        bump in 0.1f64..0.3,
    ) {
        let cfg = cfg_with_seed(seed);
        let k = SetSpec::flat(dim, 1.0).unwrap();
        let p = ConeSpec::orthant(dim, NormKind::L2).unwrap();
        let x = Vector::zeros(dim, NormKind::L2);
        let lo = strict_max_modulus(&k, &p, &x, e1, &cfg).unwrap();
        let hi = strict_max_modulus(&k, &p, &x, e1 + bump, &cfg).unwrap();
        prop_assert!(
            lo.delta_hat <= hi.delta_hat + 1e-9,
            "modulus decreased in epsilon: {} vs {}",
            lo.delta_hat,
            hi.delta_hat
        );
    }
}
