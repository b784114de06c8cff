use irs_covert::channel::{angles, path_loss, sample_channels, steering_vector, ChannelSet, FadingParams, Geometry};
use irs_covert::numerics::{ComplexMatrix, ComplexVector};
use proptest::prelude::*;

fn rel_err(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm() / b.norm()
}

fn as_matrix(v: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

#[test]
fn huge_rician_factor_gives_line_of_sight() {
    let g = Geometry::reference();
    let mut f = FadingParams::reference();
    f.rician_k = 1e12;
    let ch = sample_channels(&g, &f, 11).unwrap();
    let a = f.alpha;

    let (phi_t, phi_r) = angles(g.alice, g.irs).unwrap();
    let pl_ai = path_loss(g.alice.distance(&g.irs), a.ai, f.zeta0_db).unwrap();
    let los_ai = steering_vector(g.n_irs, phi_r) * steering_vector(g.n_tx, phi_t).adjoint() * num_complex::Complex64::new(pl_ai, 0.0);
    assert!(rel_err(&ch.h_ai, &los_ai) < 1e-5);

    for (h, rx, alpha) in [(&ch.h_ib, g.bob, a.ib), (&ch.h_iw, g.willie, a.iw)] {
        let (phi, _) = angles(g.irs, rx).unwrap();
        let pl = path_loss(g.irs.distance(&rx), alpha, f.zeta0_db).unwrap();
        let los = steering_vector(g.n_irs, phi) * num_complex::Complex64::new(pl, 0.0);
        assert!(rel_err(&as_matrix(h), &as_matrix(&los)) < 1e-5);
    }
}

#[test]
fn infinite_rician_factor_is_exact_line_of_sight() {
    let g = Geometry::reference();
    let mut f = FadingParams::reference();
    f.rician_k = f64::INFINITY;
    let a = sample_channels(&g, &f, 1).unwrap();
    let b = sample_channels(&g, &f, 2).unwrap();
    assert_eq!(a.h_ai, b.h_ai);
    assert_eq!(a.h_ib, b.h_ib);
    assert_ne!(a.h_ab, b.h_ab);
}

#[test]
fn rayleigh_variance_matches_path_loss() {
    let g = Geometry::reference();
    let mut f = FadingParams::reference();
    f.rician_k = 0.0;
    let a = f.alpha;
    let draws = 100_000u64;
    let targets = [
        ("ab", path_loss(g.alice.distance(&g.bob), a.ab, f.zeta0_db).unwrap().powi(2)),
        ("aw", path_loss(g.alice.distance(&g.willie), a.aw, f.zeta0_db).unwrap().powi(2)),
        ("ai", path_loss(g.alice.distance(&g.irs), a.ai, f.zeta0_db).unwrap().powi(2)),
        ("ib", path_loss(g.irs.distance(&g.bob), a.ib, f.zeta0_db).unwrap().powi(2)),
        ("iw", path_loss(g.irs.distance(&g.willie), a.iw, f.zeta0_db).unwrap().powi(2)),
    ];
    let mut sums = [0.0f64; 5];
    for seed in 0..draws {
        let ch = sample_channels(&g, &f, seed).unwrap();
        // one entry per link keeps the draws independent
        sums[0] += ch.h_ab[0].norm_sqr();
        sums[1] += ch.h_aw[0].norm_sqr();
        sums[2] += ch.h_ai[(1, 2)].norm_sqr();
        sums[3] += ch.h_ib[3].norm_sqr();
        sums[4] += ch.h_iw[2].norm_sqr();
    }
    for ((name, target), sum) in targets.iter().zip(sums) {
        let est = sum / draws as f64;
        assert!((est / target - 1.0).abs() < 0.03, "{name}: {est} vs {target}");
    }
}

#[test]
fn seeded_draws_are_bit_identical() {
    let g = Geometry::reference();
    let f = FadingParams::reference();
    let a = sample_channels(&g, &f, 42).unwrap();
    let b = sample_channels(&g, &f, 42).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, sample_channels(&g, &f, 43).unwrap());
}

#[test]
fn json_round_trip() {
    let ch = sample_channels(&Geometry::reference(), &FadingParams::reference(), 5).unwrap();
    let text = serde_json::to_string(&ch).unwrap();
    let back: ChannelSet = serde_json::from_str(&text).unwrap();
    assert_eq!(ch, back);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimensions_match_geometry_and_entries_are_finite(
        n in 1usize..9, m in 1usize..9, k in 0.0f64..20.0, seed in any::<u64>()
    ) {
        let mut g = Geometry::reference();
        g.n_tx = n;
        g.n_irs = m;
        let mut f = FadingParams::reference();
        f.rician_k = k;
        let ch = sample_channels(&g, &f, seed).unwrap();
        prop_assert_eq!(ch.h_ab.len(), n);
        prop_assert_eq!(ch.h_aw.len(), n);
        prop_assert_eq!(ch.h_ib.len(), m);
        prop_assert_eq!(ch.h_iw.len(), m);
        prop_assert_eq!(ch.h_ai.shape(), (m, n));
        prop_assert!(ch.is_finite());
    }

    #[test]
    fn steering_entries_are_unit_modulus(n in 1usize..32, phi in -7.0f64..7.0) {
        for z in steering_vector(n, phi).iter() {
            prop_assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }
}
