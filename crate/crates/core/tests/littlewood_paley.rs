use ep_core::init::{random_bandlimited, random_velocity};
use ep_core::littlewood_paley::{chi, phi};
use ep_core::ops::lp_norm;
use ep_core::{DyadicPartition, PeriodicGrid, ScalarField, SpaceParams, VectorField};
use proptest::prelude::*;

fn grid1() -> PeriodicGrid {
    PeriodicGrid::standard(1, 256).unwrap()
}

fn tl(s: f64, p: f64, r: f64) -> SpaceParams {
    SpaceParams::triebel_lizorkin(s, p, r).unwrap()
}

fn besov(s: f64, p: f64, q: f64) -> SpaceParams {
    SpaceParams::besov(s, p, q).unwrap()
}

const TOL: f64 = 1e-11;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norms_are_absolutely_homogeneous(seed in 0u64..1000, c in -5.0f64..5.0, s in 0.1f64..3.0, p in 1.2f64..6.0, r in 1.2f64..6.0) {
        let g = grid1();
        let part = DyadicPartition::new(&g);
        let f = random_bandlimited(&g, 60, seed);
        let fc = f.scale(c);
        for sp in [tl(s, p, r), besov(s, p, r), besov(s, p, f64::INFINITY)] {
            let a = part.norm(&fc, &sp).unwrap();
            let b = c.abs() * part.norm(&f, &sp).unwrap();
            prop_assert!((a - b).abs() <= TOL * b.max(1e-300), "{a} vs {b}");
        }
    }

    #[test]
    fn norms_satisfy_triangle_inequality(s1 in 0u64..1000, s2 in 0u64..1000, s in 0.1f64..3.0, p in 1.2f64..6.0, r in 1.2f64..6.0) {
        let g = grid1();
        let part = DyadicPartition::new(&g);
        let f = random_bandlimited(&g, 60, s1);
        let h = random_bandlimited(&g, 20, s2 + 5000).scale(3.0);
        let sum = f.add(&h).unwrap();
        for sp in [tl(s, p, r), besov(s, p, r), besov(s, p, f64::INFINITY)] {
            let lhs = part.norm(&sum, &sp).unwrap();
            let rhs = part.norm(&f, &sp).unwrap() + part.norm(&h, &sp).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + TOL));
        }
    }

    #[test]
    fn norms_decrease_in_the_summation_index(seed in 0u64..1000, s in 0.1f64..3.0, p in 1.2f64..6.0, r1 in 1.2f64..6.0, dr in 0.1f64..4.0) {
        let g = grid1();
        let part = DyadicPartition::new(&g);
        let f = random_bandlimited(&g, 100, seed);
        let r2 = r1 + dr;
        prop_assert!(part.tl_seminorm(&f, &tl(s, p, r2)).unwrap() <= part.tl_seminorm(&f, &tl(s, p, r1)).unwrap() * (1.0 + TOL));
        prop_assert!(part.besov_norm(&f, &besov(s, p, r2)).unwrap() <= part.besov_norm(&f, &besov(s, p, r1)).unwrap() * (1.0 + TOL));
        prop_assert!(part.besov_norm(&f, &besov(s, p, f64::INFINITY)).unwrap() <= part.besov_norm(&f, &besov(s, p, r2)).unwrap() * (1.0 + TOL));
    }

    #[test]
    fn triebel_lizorkin_sits_between_besov_spaces(seed in 0u64..1000, s in 0.1f64..3.0, p in 1.2f64..6.0, r in 1.2f64..6.0) {
        let g = grid1();
        let part = DyadicPartition::new(&g);
        let f = random_bandlimited(&g, 100, seed);
        let f_semi = part.tl_seminorm(&f, &tl(s, p, r)).unwrap();
        let upper = part.besov_norm(&f, &besov(s, p, p.min(r))).unwrap();
        let lower = part.besov_norm(&f, &besov(s, p, p.max(r))).unwrap();
        prop_assert!(lower <= f_semi * (1.0 + TOL), "{lower} > {f_semi}");
        prop_assert!(f_semi <= upper * (1.0 + TOL), "{f_semi} > {upper}");
        let report = part.embedding_check(&f, s, p, r).unwrap();
        prop_assert!(report.holds);
    }

    #[test]
    fn diagonal_indices_coincide(seed in 0u64..1000, s in 0.1f64..3.0, p in 1.2f64..6.0) {
        let g = PeriodicGrid::standard(2, 32).unwrap();
        let part = DyadicPartition::new(&g);
        let u = random_velocity(&g, 10, seed);
        let a = part.tl_seminorm(&u, &tl(s, p, p)).unwrap();
        let b = part.besov_norm(&u, &besov(s, p, p)).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b);
    }

    #[test]
    fn single_block_scaling_ladder(seed in 0u64..1000, j in 0i32..5, s in 0.1f64..3.0, p in 1.2f64..6.0, r in 1.2f64..6.0) {
        // A function living in one ring has every seminorm equal to 2^{js}‖f‖_p.
        let g = PeriodicGrid::standard(1, 1024).unwrap();
        let part = DyadicPartition::new(&g);
        let k = 17 * (1i64 << j);
        let theta = seed as f64 * 0.37;
        let f = ScalarField::from_fn(&g, |x| (k as f64 * g.frequency_unit() * x[0] + theta).cos());
        let expect = 2f64.powf(j as f64 * s) * lp_norm(&f, p).unwrap();
        for got in [part.tl_seminorm(&f, &tl(s, p, r)).unwrap(), part.besov_norm(&f, &besov(s, p, r)).unwrap()] {
            prop_assert!((got - expect).abs() <= 1e-10 * expect, "{got} vs {expect}");
        }
    }

    #[test]
    fn reconstruction_from_blocks(seed in 0u64..1000, dim in 1usize..3) {
        let n = if dim == 1 { 256 } else { 32 };
        let g = PeriodicGrid::standard(dim, n).unwrap();
        let part = DyadicPartition::new(&g);
        let u = random_velocity(&g, n / 2 - 1, seed);
        let mut acc = VectorField::zeros(&g);
        for j in part.block_range() {
            acc = acc.add(&part.block_vector(&u, j).unwrap()).unwrap();
        }
        let err = lp_norm(&acc.sub(&u).unwrap(), 2.0).unwrap() / lp_norm(&u, 2.0).unwrap();
        prop_assert!(err <= 1e-12, "{err}");
        let top = part.low_pass_vector(&u, part.j_max() + 1).unwrap();
        for (a, b) in top.components().iter().zip(u.components()) {
            prop_assert_eq!(a.coefficients(), b.coefficients());
        }
    }

    #[test]
    fn profiles_bounded(r in 0.0f64..10.0) {
        prop_assert!((0.0..=1.0).contains(&chi(r)));
        prop_assert!((0.0..=1.0).contains(&phi(r)));
        prop_assert!(chi(r) + phi(r) <= 1.0 + 1e-15);
    }
}

#[test]
fn low_pass_telescopes() {
    let g = grid1();
    let part = DyadicPartition::new(&g);
    let f = random_bandlimited(&g, 120, 4);
    for n in 0..=part.j_max() {
        let mut acc = ScalarField::zeros(&g);
        for q in -1..n {
            acc = acc.add(&part.block(&f, q).unwrap()).unwrap();
        }
        let direct = part.low_pass(&f, n).unwrap();
        let err = lp_norm(&acc.sub(&direct).unwrap(), 2.0).unwrap();
        assert!(err <= 1e-12 * lp_norm(&f, 2.0).unwrap(), "n={n}: {err}");
    }
    assert_eq!(lp_norm(&part.low_pass(&f, -1).unwrap(), 2.0).unwrap(), 0.0);
}

#[test]
fn spectrum_rows_match_block_norms() {
    let g = grid1();
    let part = DyadicPartition::new(&g);
    let f = random_bandlimited(&g, 120, 9);
    let sp = tl(1.5, 3.0, 2.0);
    let rows = part.spectrum(&f, &sp).unwrap();
    assert_eq!(rows.len(), part.block_range().count());
    for row in rows {
        let b = lp_norm(&part.block(&f, row.j).unwrap(), 3.0).unwrap();
        assert!((row.block_lp - b).abs() <= 1e-13 * b.max(1.0));
        assert!((row.weighted - 2f64.powf(1.5 * row.j as f64) * b).abs() <= 1e-12 * row.weighted.max(1.0));
    }
}
