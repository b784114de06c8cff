//! Quick oracle checks run by the `validate` subcommand.

use irs_covert::channel::{sample_channels, FadingParams, Geometry};
use irs_covert::design::null_space_gain;
use irs_covert::detection::{
    covert_interval, detection_probabilities, kl_ratio_function, optimal_threshold, ReceptionStats,
};
use irs_covert::numerics::{hermitian_eig, rank_one_residual, ComplexMatrix, ComplexVector, HermitianMatrix};
use irs_covert::perfect::{design_transmit, project_rank_one, EffectiveChannels};
use irs_covert::sdp::{solve, Constraint, Relation, SdpProblem, SdpSettings};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.name, self.detail)
    }
}

fn random_vector(rng: &mut ChaCha20Rng, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

fn sdp_oracle(seed: u64, cases: usize) -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in 0..cases {
        let n = 2 + k % 7;
        let b = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let c = HermitianMatrix::symmetrize(&b + b.adjoint());
        let lmax = hermitian_eig(&c).values[0];
        let mut p = SdpProblem::new(vec![n]);
        p.set_objective(0, c);
        p.add_constraint(Constraint::single(0, HermitianMatrix::identity(n), Relation::Eq, 1.0));
        let err = match solve(&p, &SdpSettings::default()) {
            Ok(s) => (s.objective_value - lmax).abs() / (1.0 + lmax.abs()),
            Err(_) => f64::INFINITY,
        };
        worst = worst.max(err);
    }
    Check {
        name: "sdp max-eigenvalue oracle",
        passed: worst <= 1e-6,
        detail: format!("{cases} instances, worst relative error {worst:.3e}"),
    }
}

fn detection_monte_carlo(seed: u64, draws: usize) -> Check {
    let mut worst = 0.0f64;
    for (i, ratio) in [1.01, 1.2, 2.0, 4.0].into_iter().enumerate() {
        let s = ReceptionStats::new(1.0, ratio).expect("valid powers");
        let phi = optimal_threshold(&s);
        let (fa, md) = detection_probabilities(&s);
        let mut rng = ChaCha20Rng::seed_from_u64(seed + i as u64);
        let h0 = Exp::new(1.0).expect("positive rate");
        let h1 = Exp::new(1.0 / ratio).expect("positive rate");
        let efa = (0..draws).filter(|_| h0.sample(&mut rng) > phi).count() as f64 / draws as f64;
        let emd = (0..draws).filter(|_| h1.sample(&mut rng) <= phi).count() as f64 / draws as f64;
        worst = worst.max((fa - efa).abs()).max((md - emd).abs());
    }
    Check {
        name: "detection closed forms vs Monte Carlo",
        passed: worst <= 2e-3,
        detail: format!("{draws} draws per hypothesis, worst deviation {worst:.3e}"),
    }
}

fn interval_residuals() -> Check {
    let mut worst = 0.0f64;
    let mut ordered = true;
    for eps in [0.01, 0.05, 0.1, 0.3] {
        match covert_interval(eps) {
            Ok((a, b)) => {
                let t = 2.0 * eps * eps;
                worst = worst.max((kl_ratio_function(a) - t).abs()).max((kl_ratio_function(b) - t).abs());
                ordered &= a < 1.0 && 1.0 < b;
            }
            Err(_) => ordered = false,
        }
    }
    Check {
        name: "covert interval residuals",
        passed: ordered && worst <= 1e-12,
        detail: format!("worst residual {worst:.3e}"),
    }
}

fn projection_contract(seed: u64, cases: usize) -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut ok = true;
    for _ in 0..cases {
        let n = 4;
        let t_b = random_vector(&mut rng, n);
        let t_w = random_vector(&mut rng, n);
        let u = t_w.unscale(t_w.norm());
        let mut b = ComplexMatrix::zeros(n, 3);
        for j in 0..3 {
            let v = random_vector(&mut rng, n);
            b.set_column(j, &(&v - &u * u.dotc(&v)));
        }
        let w = HermitianMatrix::symmetrize(&b * b.adjoint());
        let Ok(p) = project_rank_one(&w, &t_b) else {
            ok = false;
            continue;
        };
        let before = w.quadratic_form(&t_b);
        ok &= (p.quadratic_form(&t_b) - before).abs() <= 1e-9 * before.max(1.0);
        ok &= p.trace() <= w.trace() * (1.0 + 1e-12);
        ok &= p.quadratic_form(&t_w).abs() <= 1e-10;
    }
    Check {
        name: "rank-one projection contract",
        passed: ok,
        detail: format!("{cases} random PSD inputs"),
    }
}

fn transmit_tightness(seed: u64, cases: u64) -> Check {
    let g = Geometry::reference();
    let f = FadingParams::reference();
    let p = 1e-4;
    let mut worst = 0.0f64;
    let mut worst_rank = 0.0f64;
    for s in 0..cases {
        let Ok(ch) = sample_channels(&g, &f, seed + s) else {
            worst = f64::INFINITY;
            continue;
        };
        let mut rng = ChaCha20Rng::seed_from_u64(seed + s);
        let q = ComplexVector::from_fn(g.n_irs, |_, _| Complex64::from_polar(1.0, rng.random::<f64>() * TAU));
        let eff = EffectiveChannels::new(&ch, &q);
        match design_transmit(&eff.t_b, &eff.t_w, p) {
            Ok(d) => {
                let oracle = null_space_gain(&eff.t_b, &eff.t_w, p);
                let got = eff.t_b.dotc(&d.w_b).norm_sqr();
                worst = worst.max((got - oracle).abs() / oracle);
                worst_rank = worst_rank.max(rank_one_residual(&d.projected));
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    Check {
        name: "transmit relaxation vs null-space oracle",
        passed: worst <= 1e-4 && worst_rank < 1e-6,
        detail: format!("{cases} instances, worst relative gap {worst:.3e}, worst rank residual {worst_rank:.3e}"),
    }
}

/// Runs every check; the caller decides how to report failures.
pub fn run_all(seed: u64) -> Vec<Check> {
    vec![
        sdp_oracle(seed, 20),
        interval_residuals(),
        detection_monte_carlo(seed, 1_000_000),
        projection_contract(seed, 50),
        transmit_tightness(seed, 20),
    ]
}
