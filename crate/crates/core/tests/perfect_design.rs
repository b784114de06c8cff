use irs_covert::channel::{sample_channels, ChannelSet, FadingParams, Geometry};
use irs_covert::design::{null_space_gain, rate_bits, CovertParams};
use irs_covert::numerics::{rank_one_residual, ComplexMatrix, ComplexVector, HermitianMatrix};
use irs_covert::perfect::{
    alternate_optimize, covert_gain, design_transmit, lift_reflect, no_irs_baseline, project_rank_one,
    reflect_quadratic, solve_q_given_w, EffectiveChannels,
};
use irs_covert::units::dbm_to_watts;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::f64::consts::TAU;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_vector(rng: &mut ChaCha20Rng, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

fn reference(seed: u64) -> ChannelSet {
    sample_channels(&Geometry::reference(), &FadingParams::reference(), seed).unwrap()
}

/// `B B^H` with the columns of `B` projected orthogonally to `t_w`.
fn psd_in_null_space(rng: &mut ChaCha20Rng, t_w: &ComplexVector, rank: usize) -> HermitianMatrix {
    let n = t_w.len();
    let tw = t_w.unscale(t_w.norm());
    let mut b = ComplexMatrix::zeros(n, rank);
    for j in 0..rank {
        let v = random_vector(rng, n);
        let v = &v - &tw * tw.dotc(&v);
        b.set_column(j, &v);
    }
    HermitianMatrix::symmetrize(&b * b.adjoint())
}

#[test]
fn orthogonal_unit_channels() {
    let t_b = ComplexVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
    let t_w = ComplexVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
    let d = design_transmit(&t_b, &t_w, 1.0).unwrap();
    assert!((d.w_b[0].norm() - 1.0).abs() < 1e-6);
    assert!(d.w_b[1].norm() < 1e-6);
    assert!((t_b.dotc(&d.w_b).norm_sqr() - 1.0).abs() < 1e-6);
}

#[test]
fn parallel_channels_force_zero_rate() {
    let t_b = ComplexVector::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.3), c(0.2, 0.0)]);
    let t_w = &t_b * c(0.3, -1.1);
    let d = design_transmit(&t_b, &t_w, 2.0).unwrap();
    assert!(t_b.dotc(&d.w_b).norm_sqr() <= 1e-8 * 2.0 * t_b.norm_squared());
    assert!(t_w.dotc(&d.w_b).norm_sqr() <= 1e-8 * 2.0 * t_w.norm_squared());
}

#[test]
fn transmit_relaxation_matches_null_space_oracle() {
    let p = dbm_to_watts(-10.0);
    for seed in 0..20 {
        let ch = reference(seed);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let q = ComplexVector::from_fn(4, |_, _| Complex64::from_polar(1.0, rng.random::<f64>() * TAU));
        let eff = EffectiveChannels::new(&ch, &q);
        let d = design_transmit(&eff.t_b, &eff.t_w, p).unwrap();
        let oracle = null_space_gain(&eff.t_b, &eff.t_w, p);
        let got = eff.t_b.dotc(&d.w_b).norm_sqr();
        assert!((got - oracle).abs() <= 1e-4 * oracle, "seed {seed}: {got} vs {oracle}");
        assert!(rank_one_residual(&d.projected) < 1e-6);
        assert!(d.w_b.norm_squared() <= p * (1.0 + 1e-9));
    }
}

#[test]
fn rank_one_input_is_a_fixed_point() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for _ in 0..20 {
        let w = random_vector(&mut rng, 4);
        let t_b = random_vector(&mut rng, 4);
        let m = HermitianMatrix::outer(&w);
        let p = project_rank_one(&m, &t_b).unwrap();
        assert!(p.sub(&m).frobenius_norm() <= 1e-10 * m.frobenius_norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn projection_contract(seed in any::<u64>(), n in 2usize..7, rank in 1usize..6) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let t_b = random_vector(&mut rng, n);
        let t_w = random_vector(&mut rng, n);
        let w = psd_in_null_space(&mut rng, &t_w, rank.min(n - 1));
        let p = project_rank_one(&w, &t_b).unwrap();
        let before = w.quadratic_form(&t_b);
        prop_assert!((p.quadratic_form(&t_b) - before).abs() <= 1e-9 * before.max(1.0));
        prop_assert!(p.trace() <= w.trace() * (1.0 + 1e-12));
        prop_assert!(p.quadratic_form(&t_w).abs() <= 1e-10);
        prop_assert!(rank_one_residual(&p) < 1e-6);
    }

    #[test]
    fn reflect_quadratic_matches_direct_gain(seed in any::<u64>()) {
        let ch = reference(seed);
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xABCD);
        let w = random_vector(&mut rng, 4);
        let q = ComplexVector::from_fn(4, |_, _| Complex64::from_polar(1.0, rng.random::<f64>() * TAU));
        for link in [ch.bob(), ch.willie()] {
            let (g, h) = reflect_quadratic(&link, &w);
            let via = g.quadratic_form(&lift_reflect(&q)) + h;
            let direct = link.gain(&w, &q);
            prop_assert!((via - direct).abs() <= 1e-9 * direct.max(1e-300));
        }
    }
}

#[test]
fn single_element_reflect_step_matches_phase_grid() {
    let mut g = Geometry::reference();
    g.n_irs = 1;
    let p = dbm_to_watts(-10.0);
    let params = CovertParams::new(p);
    for seed in 0..10 {
        let ch = sample_channels(&g, &FadingParams::reference(), seed).unwrap();
        let q0 = ComplexVector::from_element(1, c(1.0, 0.0));
        let eff = EffectiveChannels::new(&ch, &q0);
        let w = design_transmit(&eff.t_b, &eff.t_w, p).unwrap().w_b;
        let q = solve_q_given_w(&ch, &w, &q0, &params, seed).unwrap();
        assert!((q[0].norm() - 1.0).abs() < 1e-10);
        let grid = (0..4096)
            .map(|k| {
                let q = ComplexVector::from_element(1, Complex64::from_polar(1.0, k as f64 * TAU / 4096.0));
                covert_gain(&ch, &q, p)
            })
            .fold(0.0f64, f64::max);
        let got = covert_gain(&ch, &q, p);
        assert!(got >= 0.99 * grid, "seed {seed}: {got} vs grid {grid}");
    }
}

#[test]
fn reflect_step_outputs_unit_modulus() {
    let params = CovertParams::new(dbm_to_watts(-10.0));
    let ch = reference(8);
    let q0 = ComplexVector::from_element(4, c(1.0, 0.0));
    let eff = EffectiveChannels::new(&ch, &q0);
    let w = design_transmit(&eff.t_b, &eff.t_w, params.p_total).unwrap().w_b;
    let q = solve_q_given_w(&ch, &w, &q0, &params, 1).unwrap();
    assert!(q.iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
    assert!(covert_gain(&ch, &q, params.p_total) >= covert_gain(&ch, &q0, params.p_total));
}

#[test]
fn dead_irs_reduces_to_baseline() {
    let params = CovertParams::new(dbm_to_watts(-10.0));
    let mut ch = reference(4);
    ch.h_ib.fill(c(0.0, 0.0));
    ch.h_iw.fill(c(0.0, 0.0));
    let sol = alternate_optimize(&ch, &params, 4).unwrap();
    let base = no_irs_baseline(&ch, &params);
    assert!(sol.iterations <= 2);
    assert!((sol.rate_bits - base.rate_bits).abs() <= 1e-6 * base.rate_bits);
}

#[test]
fn baseline_edge_cases() {
    let params = CovertParams::new(1e-3);
    let mut ch = reference(0);
    ch.h_ab = ComplexVector::from_vec(vec![c(1e-3, 0.0), c(0.0, 2e-3), c(0.0, 0.0), c(0.0, 0.0)]);
    ch.h_aw = ComplexVector::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0), c(1e-3, 0.0), c(0.0, -1e-3)]);
    let base = no_irs_baseline(&ch, &params);
    let expected = rate_bits(params.p_total * ch.h_ab.norm_squared(), params.sigma_b2);
    assert!((base.rate_bits - expected).abs() <= 1e-12 * expected);

    ch.h_aw = &ch.h_ab * c(0.5, 0.5);
    assert_eq!(no_irs_baseline(&ch, &params).rate_bits, 0.0);
}

#[test]
fn baseline_matches_relaxation_without_irs() {
    let params = CovertParams::new(dbm_to_watts(-10.0));
    for seed in 0..10 {
        let ch = reference(seed);
        let base = no_irs_baseline(&ch, &params);
        let d = design_transmit(&ch.h_ab, &ch.h_aw, params.p_total).unwrap();
        let sdr = rate_bits(ch.h_ab.dotc(&d.w_b).norm_sqr(), params.sigma_b2);
        assert!((sdr - base.rate_bits).abs() <= 1e-6 * base.rate_bits);
    }
}

#[test]
fn alternating_design_contract() {
    let params = CovertParams::new(dbm_to_watts(-10.0));
    for seed in 0..20 {
        let ch = reference(seed);
        let sol = alternate_optimize(&ch, &params, seed).unwrap();
        for pair in sol.objective_trace.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-8);
        }
        assert!(sol.iterations <= params.max_outer_iters);
        assert_eq!(sol.iterations, sol.objective_trace.len());
        assert!((sol.rate_bits - sol.objective_trace.last().unwrap()).abs() < 1e-12);
        let t_w = ch.willie().composite(&sol.q);
        assert!(sol.willie_gain(&ch) <= 1e-8 * params.p_total * t_w.norm_squared());
        assert!(sol.w_b.norm_squared() <= params.p_total * (1.0 + 1e-9));
        assert!(sol.q.iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
        assert!(sol.rate_bits >= no_irs_baseline(&ch, &params).rate_bits);
    }
}

#[test]
fn seeded_design_is_deterministic() {
    let params = CovertParams::new(dbm_to_watts(-10.0));
    let ch = reference(2);
    let a = alternate_optimize(&ch, &params, 9).unwrap();
    let b = alternate_optimize(&ch, &params, 9).unwrap();
    assert_eq!(a, b);
}
