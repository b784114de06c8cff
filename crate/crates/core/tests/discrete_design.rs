use irs_covert::channel::{sample_channels, ChannelSet, FadingParams, Geometry};
use irs_covert::design::CovertParams;
use irs_covert::discrete::{discrete_design, discrete_design_from, element_phase_update, quantize_phase, PhaseCodebook};
use irs_covert::numerics::ComplexVector;
use irs_covert::perfect::{alternate_optimize, no_irs_baseline};
use irs_covert::units::dbm_to_watts;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::f64::consts::{PI, TAU};

fn channels(m: usize, seed: u64) -> ChannelSet {
    let mut g = Geometry::reference();
    g.n_irs = m;
    sample_channels(&g, &FadingParams::reference(), seed).unwrap()
}

fn random_w(rng: &mut ChaCha20Rng, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

#[test]
fn quantizer_examples() {
    let k2 = PhaseCodebook::new(1).unwrap();
    let k4 = PhaseCodebook::new(2).unwrap();
    assert_eq!(quantize_phase(0.0, &k2), 0.0);
    assert_eq!(quantize_phase(3.0 * PI / 4.0, &k2), PI);
    assert_eq!(quantize_phase(TAU - 0.01, &k4), 0.0);
}

#[test]
fn single_element_update_is_exhaustive_argmax() {
    for bits in 1..=4 {
        let cb = PhaseCodebook::new(bits).unwrap();
        for seed in 0..10 {
            let ch = channels(1, seed);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let w = random_w(&mut rng, 4);
            let idx = element_phase_update(&ch, &w, &[0], 0, &cb);
            let gain = |k: usize| ch.bob().gain(&w, &cb.reflect_vector(&[k]));
            let best = (0..cb.levels()).map(gain).fold(0.0f64, f64::max);
            assert!(gain(idx) >= best * (1.0 - 1e-12));
        }
    }
}

#[test]
fn fine_codebook_update_tracks_continuous_optimum() {
    let cb = PhaseCodebook::new(16).unwrap();
    let ch = channels(4, 1);
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let w = random_w(&mut rng, 4);
    let indices = [3usize, 100, 5000, 60000];
    let (phi, c) = ch.bob().cascade(&w);
    for m in 0..4 {
        let rest: Complex64 = (0..4)
            .filter(|&k| k != m)
            .map(|k| phi[k] * cb.phasor(indices[k]))
            .sum::<Complex64>()
            + c;
        let optimum = -(phi[m] * rest.conj()).arg();
        let got = cb.value(element_phase_update(&ch, &w, &indices, m, &cb));
        let d = (got - optimum).rem_euclid(TAU);
        assert!(d.min(TAU - d) <= cb.step() / 2.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn element_expansion_matches_direct_gain(seed in any::<u64>(), m in 0usize..4, theta in 0.0f64..TAU) {
        let ch = channels(4, seed);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let w = random_w(&mut rng, 4);
        let mut q = ComplexVector::from_fn(4, |_, _| Complex64::from_polar(1.0, rng.random::<f64>() * TAU));
        q[m] = Complex64::from_polar(1.0, theta);
        let (phi, c) = ch.bob().cascade(&w);
        let rest: Complex64 = (0..4).filter(|&k| k != m).map(|k| phi[k] * q[k]).sum::<Complex64>() + c;
        let s = phi[m] * rest.conj();
        let expanded = rest.norm_sqr() + phi[m].norm_sqr() + 2.0 * s.norm() * (theta + s.arg()).cos();
        let direct = ch.bob().gain(&w, &q);
        prop_assert!((expanded - direct).abs() <= 1e-9 * direct.max(1e-300));
    }

    #[test]
    fn element_update_never_decreases(seed in any::<u64>(), bits in 1u32..4, m_count in 1usize..5) {
        let cb = PhaseCodebook::new(bits).unwrap();
        let ch = channels(m_count, seed);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let w = random_w(&mut rng, 4);
        let mut idx: Vec<usize> = (0..m_count).map(|_| rng.random_range(0..cb.levels())).collect();
        for m in 0..m_count {
            let before = ch.bob().gain(&w, &cb.reflect_vector(&idx));
            let best = (0..cb.levels())
                .map(|k| {
                    let mut t = idx.clone();
                    t[m] = k;
                    ch.bob().gain(&w, &cb.reflect_vector(&t))
                })
                .fold(0.0f64, f64::max);
            idx[m] = element_phase_update(&ch, &w, &idx, m, &cb);
            let after = ch.bob().gain(&w, &cb.reflect_vector(&idx));
            prop_assert!(after >= before * (1.0 - 1e-12));
            prop_assert!(after >= best * (1.0 - 1e-12));
        }
    }
}

#[test]
fn fine_codebook_approaches_continuous_design() {
    let params = CovertParams::new(dbm_to_watts(-10.0));
    let cb = PhaseCodebook::new(16).unwrap();
    for seed in 0..5 {
        let ch = channels(4, seed);
        let cont = alternate_optimize(&ch, &params, seed).unwrap();
        let disc = discrete_design_from(&ch, &params, &cb, &cont.q).unwrap();
        assert!((disc.rate_bits - cont.rate_bits).abs() <= 1e-3 * cont.rate_bits);
    }
}

#[test]
fn one_bit_design_ordering() {
    let params = CovertParams::new(dbm_to_watts(-10.0));
    let cb = PhaseCodebook::new(1).unwrap();
    let trials = 30;
    let mut above_baseline = 0;
    for seed in 0..trials {
        let ch = channels(4, seed);
        let cont = alternate_optimize(&ch, &params, seed).unwrap();
        let disc = discrete_design_from(&ch, &params, &cb, &cont.q).unwrap();
        assert!(disc.rate_bits <= cont.rate_bits + 1e-9, "seed {seed}");
        if disc.rate_bits >= no_irs_baseline(&ch, &params).rate_bits {
            above_baseline += 1;
        }
        let idx = disc.phase_indices.as_ref().unwrap();
        assert_eq!(disc.q, cb.reflect_vector(idx));
        for pair in disc.objective_trace.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-8);
        }
    }
    assert!(above_baseline as f64 >= 0.95 * trials as f64);
}

#[test]
fn dead_irs_matches_baseline() {
    let params = CovertParams::new(dbm_to_watts(-10.0));
    let cb = PhaseCodebook::new(2).unwrap();
    let mut ch = channels(4, 6);
    ch.h_ib.fill(Complex64::new(0.0, 0.0));
    let base = no_irs_baseline(&ch, &params);
    // the surface still steers the warden's channel
    let bob_dead = discrete_design(&ch, &params, &cb, 6).unwrap();
    assert!(bob_dead.rate_bits >= base.rate_bits * (1.0 - 1e-9));

    ch.h_iw.fill(Complex64::new(0.0, 0.0));
    let disc = discrete_design(&ch, &params, &cb, 6).unwrap();
    assert!((disc.rate_bits - base.rate_bits).abs() <= 1e-6 * base.rate_bits);
}
