use std::collections::HashMap;

use num_complex::Complex64;
use qbench::exact::{full_eigensystem, lanczos_ground, mean_and_variance, LanczosConfig};
use qbench::lattice::{chain, Boundary};
use qbench::vmc::*;
use qbench::{HamiltonianSpec, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Normalized `|psi|^2` over all `2^n` configurations.
fn born(ansatz: &dyn Ansatz) -> Vec<f64> {
    let n = ansatz.n_sites();
    let logs: Vec<f64> = (0..1u64 << n).map(|x| 2.0 * ansatz.log_amplitude(x).re).collect();
    let m = logs.iter().cloned().fold(f64::MIN, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// Dense state built from the ansatz amplitudes, independent of the sampler.
fn dense_state(spec: &HamiltonianSpec, ansatz: &dyn Ansatz) -> StateVector {
    let n = ansatz.n_sites();
    let logs: Vec<Complex64> = (0..1u64 << n).map(|x| ansatz.log_amplitude(x)).collect();
    let m = logs.iter().map(|l| l.re).fold(f64::MIN, f64::max);
    let amps = logs.iter().map(|l| (l - m).exp()).collect();
    StateVector::from_amplitudes(*spec.sector(), amps).unwrap()
}

fn dense_energy(spec: &HamiltonianSpec, ansatz: &dyn Ansatz) -> (f64, f64) {
    mean_and_variance(spec, &dense_state(spec, ansatz)).unwrap()
}

fn histogram(configs: &[u64]) -> HashMap<u64, usize> {
    let mut h = HashMap::new();
    for &x in configs {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

/// Every bin within 4 binomial standard deviations of the expected count.
fn assert_matches_born(configs: &[u64], probs: &[f64]) {
    let n = configs.len() as f64;
    let h = histogram(configs);
    for (x, &p) in probs.iter().enumerate() {
        let count = *h.get(&(x as u64)).unwrap_or(&0) as f64;
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!(
            (count - n * p).abs() <= 4.0 * sigma + 1e-9,
            "config {x:#b}: {count} vs {}",
            n * p
        );
    }
}

fn tfim4() -> HamiltonianSpec {
    HamiltonianSpec::tfim(chain(4, Boundary::Periodic).unwrap(), 1.0, 1.0).unwrap()
}

fn heis(n: usize) -> HamiltonianSpec {
    HamiltonianSpec::heisenberg(chain(n, Boundary::Periodic).unwrap(), 1.0).unwrap()
}

#[test]
fn zero_rbm_samples_uniformly() {
    let spec = tfim4();
    let rbm = Rbm::zeros(4, 1).unwrap();
    let cfg = SamplerConfig::new(8, 2000, 10, MoveKind::SingleFlip, 5);
    let s = metropolis_sample(&rbm, &spec, &cfg).unwrap();
    assert_eq!(s.configs.len(), 16000);
    assert_eq!(s.acceptance_rate, 1.0);
    // Chi-square with 15 degrees of freedom; 4 sigma is about 44.
    let h = histogram(&s.configs);
    let expected = 1000.0;
    let chi2: f64 = (0..16u64)
        .map(|x| (*h.get(&x).unwrap_or(&0) as f64 - expected).powi(2) / expected)
        .sum();
    assert!(chi2 < 15.0 + 4.0 * 30f64.sqrt(), "chi2 = {chi2}");
}

#[test]
fn independent_chains_reproduce_born_distribution() {
    let spec = tfim4();
    let rbm = Rbm::random(4, 1, 0.6, 3).unwrap();
    let cfg = SamplerConfig::new(6000, 1, 30, MoveKind::SingleFlip, 8);
    let s = metropolis_sample(&rbm, &spec, &cfg).unwrap();
    assert_matches_born(&s.configs, &born(&rbm));

    let spec = heis(6);
    let jas = Jastrow::random(6, 0.15, 4).unwrap();
    let cfg = SamplerConfig::new(6000, 1, 30, MoveKind::Exchange, 9);
    let s = metropolis_sample(&jas, &spec, &cfg).unwrap();
    let mut probs = born(&jas);
    // Restrict to the zero-magnetization sector the chains start in.
    for (x, p) in probs.iter_mut().enumerate() {
        if (x as u64).count_ones() != 3 {
            *p = 0.0;
        }
    }
    let z: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= z);
    assert_matches_born(&s.configs, &probs);
}

#[test]
fn exchange_moves_conserve_magnetization() {
    let spec = heis(4);
    let jas = Jastrow::zeros(4).unwrap();
    let mut cfg = SamplerConfig::new(4, 500, 5, MoveKind::Exchange, 1);
    cfg.initial_state = Some(0b0101);
    let s = metropolis_sample(&jas, &spec, &cfg).unwrap();
    assert!(s.configs.iter().all(|x| x.count_ones() == 2));
    assert!(s.configs.iter().any(|&x| x != 0b0101));
}

#[test]
fn incompatible_moves_are_rejected() {
    let cfg = SamplerConfig::new(1, 1, 0, MoveKind::Exchange, 0);
    let rbm = Rbm::zeros(4, 1).unwrap();
    assert!(matches!(
        metropolis_sample(&rbm, &tfim4(), &cfg),
        Err(VmcError::IncompatibleMove { .. })
    ));
    let cfg = SamplerConfig::new(1, 1, 0, MoveKind::SingleFlip, 0);
    assert!(matches!(
        metropolis_sample(&rbm, &heis(4), &cfg),
        Err(VmcError::IncompatibleMove { .. })
    ));
    let tv = HamiltonianSpec::t_v(chain(4, Boundary::Periodic).unwrap(), 1.0, 1.0, 2).unwrap();
    assert!(matches!(
        metropolis_sample(&rbm, &tv, &cfg),
        Err(VmcError::UnsupportedModel(_))
    ));
    let small = Rbm::zeros(3, 1).unwrap();
    assert!(matches!(
        metropolis_sample(&small, &tfim4(), &cfg),
        Err(VmcError::SizeMismatch { .. })
    ));
}

/// Empirical flows `x -> y` balance `y -> x` when the chain is stationary.
fn check_detailed_balance(ansatz: &dyn Ansatz, kind: MoveKind, bonds: &[(usize, usize)], start: u64, probs: &[f64]) {
    let mut chain = MarkovChain::new(ansatz, kind, bonds, start);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..2000 {
        chain.step(&mut rng);
    }
    let mut flows: HashMap<(u64, u64), f64> = HashMap::new();
    let mut visits: HashMap<u64, f64> = HashMap::new();
    let steps = 400_000;
    for _ in 0..steps {
        let x = chain.state();
        chain.step(&mut rng);
        let y = chain.state();
        *visits.entry(x).or_insert(0.0) += 1.0;
        if x != y {
            *flows.entry((x, y)).or_insert(0.0) += 1.0;
        }
    }
    for (&(x, y), &c) in &flows {
        let back = *flows.get(&(y, x)).unwrap_or(&0.0);
        assert!((c - back).abs() <= 4.0 * (c + back).sqrt() + 1.0, "{x:#b}<->{y:#b}: {c} vs {back}");
    }
    // Stationarity: visit frequencies match the target within 4 sigma allowing
    // a correlation time of a few steps.
    for (x, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let f = *visits.get(&(x as u64)).unwrap_or(&0.0) / steps as f64;
        let sigma = (10.0 * p * (1.0 - p) / steps as f64).sqrt();
        assert!((f - p).abs() <= 4.0 * sigma, "{x:#b}: {f} vs {p}");
    }
}

#[test]
fn sampler_satisfies_detailed_balance() {
    let rbm = Rbm::random(4, 1, 0.5, 12).unwrap();
    check_detailed_balance(&rbm, MoveKind::SingleFlip, &[], 0, &born(&rbm));

    let jas = Jastrow::random(6, 0.15, 13).unwrap();
    let bonds: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    let mut probs = born(&jas);
    for (x, p) in probs.iter_mut().enumerate() {
        if (x as u64).count_ones() != 3 {
            *p = 0.0;
        }
    }
    let z: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= z);
    check_detailed_balance(&jas, MoveKind::Exchange, &bonds, 0b000111, &probs);
}

#[test]
fn eigenstate_has_constant_local_energy() {
    let spec = tfim4();
    let eig = full_eigensystem(&spec).unwrap();
    for k in [0, 3] {
        let ansatz = DenseAnsatz::from_state(&eig.vector(k)).unwrap();
        for x in 0..16u64 {
            if ansatz.log_amplitude(x).re > -30.0 {
                let e = local_energy(&spec, &ansatz, x).unwrap();
                assert!((e.re - eig.values[k]).abs() < 1e-9 && e.im.abs() < 1e-9);
            }
        }
        let cfg = SamplerConfig::new(4, 200, 10, MoveKind::SingleFlip, 2);
        let est = estimate_energy(&ansatz, &spec, &cfg).unwrap();
        assert!(est.variance <= 1e-10);
        assert!((est.mean - eig.values[k]).abs() < 1e-9);
    }
}

#[test]
fn node_evaluation_is_reported() {
    let spec = tfim4();
    let mut amps = vec![Complex64::new(1.0, 0.0); 16];
    amps[5] = Complex64::new(0.0, 0.0);
    let ansatz = DenseAnsatz::new(4, &amps).unwrap();
    assert_eq!(
        local_energy(&spec, &ansatz, 5),
        Err(VmcError::NodeEvaluation { config: 5 })
    );
}

#[test]
fn sampled_moments_match_dense_evaluation() {
    let spec = tfim4();
    let rbm = Rbm::random(4, 2, 0.4, 21).unwrap();
    let jas = MarshallSign::new(Jastrow::random(6, 0.15, 22).unwrap(), 0b101010);
    let heis6 = heis(6);
    let cases: [(&dyn Ansatz, &HamiltonianSpec, MoveKind); 2] =
        [(&rbm, &spec, MoveKind::SingleFlip), (&jas, &heis6, MoveKind::Exchange)];
    for (ansatz, spec, kind) in cases {
        let cfg = SamplerConfig::new(8000, 1, 30, kind, 31);
        let est = estimate_energy(ansatz, spec, &cfg).unwrap();
        let (e, var) = if kind == MoveKind::Exchange {
            // Dense oracle restricted to the zero-magnetization sector.
            let n = ansatz.n_sites();
            let amps: Vec<Complex64> = (0..1u64 << n)
                .map(|x| {
                    if x.count_ones() as usize == n / 2 {
                        ansatz.log_amplitude(x).exp()
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            let v = StateVector::from_amplitudes(*spec.sector(), amps).unwrap();
            mean_and_variance(spec, &v).unwrap()
        } else {
            dense_energy(spec, ansatz)
        };
        assert!((est.mean - e).abs() <= 4.0 * est.std_error, "{} vs {e} ± {}", est.mean, est.std_error);
        // Spread of the sample variance for iid draws: (mu4 - var^2) / n.
        let probs = born(ansatz);
        let mu4: f64 = (0..probs.len() as u64)
            .filter(|&x| probs[x as usize] > 0.0 && (kind == MoveKind::SingleFlip || x.count_ones() == 3))
            .map(|x| {
                let d = (local_energy(spec, ansatz, x).unwrap() - e).norm_sqr();
                probs[x as usize] * d * d
            })
            .sum::<f64>()
            / (0..probs.len() as u64)
                .filter(|&x| kind == MoveKind::SingleFlip || x.count_ones() == 3)
                .map(|x| probs[x as usize])
                .sum::<f64>();
        let tol = 4.0 * ((mu4 - var * var).max(0.0) / est.n_samples as f64).sqrt();
        assert!((est.variance - var).abs() <= tol, "{} vs {var}", est.variance);
        assert!(est.mean >= qbench::exact::full_spectrum(spec).unwrap()[0] - 4.0 * est.std_error);
    }
}

#[test]
fn gradient_matches_dense_finite_differences() {
    let spec = tfim4();
    let mut rbm = Rbm::random(4, 1, 0.3, 41).unwrap();
    let configs: Vec<u64> = (0..16).collect();
    let weights = born(&rbm);
    let grad = energy_gradient_weighted(&rbm, &spec, &configs, &weights).unwrap();
    let p0 = rbm.parameters();
    let eps = 1e-5;
    let energy_at = |rbm: &mut Rbm, p: &[Complex64]| {
        rbm.set_parameters(p).unwrap();
        dense_energy(&spec, rbm).0
    };
    for k in 0..p0.len() {
        for (dir, component) in [(Complex64::new(1.0, 0.0), grad[k].re), (Complex64::new(0.0, 1.0), grad[k].im)] {
            let mut p = p0.clone();
            p[k] += dir * eps;
            let up = energy_at(&mut rbm, &p);
            p[k] -= dir * (2.0 * eps);
            let down = energy_at(&mut rbm, &p);
            let fd = (up - down) / (2.0 * eps);
            let analytic = 2.0 * component;
            assert!(
                (fd - analytic).abs() <= 1e-3 * fd.abs() + 1e-8,
                "param {k} dir {dir}: fd {fd} vs {analytic}"
            );
        }
    }
}

#[test]
fn eigenstate_gradient_vanishes() {
    // The uniform state is an eigenstate of the pure transverse field.
    let spec = HamiltonianSpec::tfim(chain(4, Boundary::Periodic).unwrap(), 0.0, 1.0).unwrap();
    let rbm = Rbm::zeros(4, 2).unwrap();
    let cfg = SamplerConfig::new(4, 100, 5, MoveKind::SingleFlip, 3);
    let s = metropolis_sample(&rbm, &spec, &cfg).unwrap();
    let g = energy_gradient(&rbm, &spec, &s.configs).unwrap();
    assert!(g.iter().all(|c| c.norm() == 0.0));
}

fn cosine(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn large_shift_recovers_gradient_direction() {
    let spec = tfim4();
    let rbm = Rbm::random(4, 1, 0.3, 5).unwrap();
    let cfg = SamplerConfig::new(4, 200, 10, MoveKind::SingleFlip, 6);
    let s = metropolis_sample(&rbm, &spec, &cfg).unwrap();
    let p0 = rbm.parameters();
    let sgd = sgd_update(&rbm, &spec, &s.configs, 1.0).unwrap();
    let sr = sr_update(&rbm, &spec, &s.configs, 1.0, 1e6).unwrap();
    let d_sgd: Vec<Complex64> = p0.iter().zip(&sgd).map(|(a, b)| a - b).collect();
    let d_sr: Vec<Complex64> = p0.iter().zip(&sr.parameters).map(|(a, b)| a - b).collect();
    assert!(cosine(&d_sgd, &d_sr) >= 0.999);
}

fn iterations_to(trace: &[TracePoint], e0: f64, target: f64) -> Option<usize> {
    trace.iter().position(|t| (t.energy - e0) / (-e0) <= target)
}

#[test]
fn sr_converges_faster_than_sgd_on_small_tfim() {
    let spec = tfim4();
    let e0 = lanczos_ground(&spec, &LanczosConfig::default()).unwrap().e0;
    let mask = sign_rule_mask(&spec);
    let cfg = SamplerConfig::new(8, 100, 10, MoveKind::SingleFlip, 17);
    let schedule = Schedule {
        iterations: 300,
        learning_rate: 0.05,
        final_samples: 0,
    };
    let mut sr_ansatz = MarshallSign::new(Rbm::random(4, 1, 0.01, 2).unwrap(), mask);
    let sr = optimize(&mut sr_ansatz, &spec, Optimizer::Sr { diag_shift: 1e-3 }, &schedule, &cfg).unwrap();
    let sr_iters = iterations_to(&sr.trace, e0, 1e-3).expect("SR reaches 1e-3");
    assert!(sr_iters <= 300);
    let mut sgd_ansatz = MarshallSign::new(Rbm::random(4, 1, 0.01, 2).unwrap(), mask);
    let sgd = optimize(&mut sgd_ansatz, &spec, Optimizer::Sgd, &schedule, &cfg).unwrap();
    println!(
        "SR reached rel_err 1e-3 at iteration {sr_iters}; SGD: {:?}",
        iterations_to(&sgd.trace, e0, 1e-3)
    );

    // A trained RBM samples its energy within 4 sigma of the ground energy.
    let est = estimate_energy(&sr_ansatz, &spec, &SamplerConfig::new(16, 250, 10, MoveKind::SingleFlip, 99)).unwrap();
    assert!((est.mean - e0).abs() <= 4.0 * est.std_error.max(1e-12), "{} vs {e0}", est.mean);
}

#[test]
fn zero_iteration_optimize_is_a_plain_estimate() {
    let spec = tfim4();
    let cfg = SamplerConfig::new(4, 100, 10, MoveKind::SingleFlip, 23);
    let mut rbm = Rbm::random(4, 1, 0.2, 8).unwrap();
    let before = rbm.clone();
    let schedule = Schedule {
        iterations: 0,
        learning_rate: 0.1,
        final_samples: 0,
    };
    let r = optimize(&mut rbm, &spec, Optimizer::Sgd, &schedule, &cfg).unwrap();
    let est = estimate_energy(&before, &spec, &cfg).unwrap();
    assert_eq!(rbm, before);
    assert_eq!(r.iterations, 0);
    assert!(r.trace.is_empty());
    assert_eq!(r.energy_mean, est.mean);
    assert_eq!(r.energy_variance, est.variance);
    assert_eq!(r.energy_std_error, est.std_error);
}

#[test]
fn positive_jastrow_cannot_reach_the_singlet() {
    let spec = HamiltonianSpec::heisenberg(chain(2, Boundary::Open).unwrap(), 1.0).unwrap();
    let mut jas = Jastrow::random(2, 0.01, 1).unwrap();
    let cfg = SamplerConfig::new(4, 100, 5, MoveKind::Exchange, 3);
    let schedule = Schedule {
        iterations: 50,
        learning_rate: 0.1,
        final_samples: 0,
    };
    let r = optimize(&mut jas, &spec, Optimizer::Sr { diag_shift: 1e-2 }, &schedule, &cfg).unwrap();
    assert!(r.energy_mean > -3.0 + 0.5, "{}", r.energy_mean);
    // With the Marshall sign the same factor is exact.
    let mut signed = MarshallSign::for_lattice(Jastrow::zeros(2).unwrap(), spec.lattice());
    let r = optimize(&mut signed, &spec, Optimizer::Sgd, &schedule, &cfg).unwrap();
    assert!((r.energy_mean + 3.0).abs() < 1e-12);
}

#[test]
fn signed_jastrow_on_heisenberg_ring() {
    let spec = heis(10);
    let e0 = lanczos_ground(&spec, &LanczosConfig::default()).unwrap().e0;
    let mut ansatz = MarshallSign::new(Jastrow::random(10, 0.01, 3).unwrap(), sign_rule_mask(&spec));
    let cfg = SamplerConfig::new(16, 128, 20, MoveKind::Exchange, 4);
    let schedule = Schedule {
        iterations: 150,
        learning_rate: 0.05,
        final_samples: 1000,
    };
    let r = optimize(&mut ansatz, &spec, Optimizer::Sr { diag_shift: 1e-3 }, &schedule, &cfg).unwrap();
    let rel = (r.energy_mean - e0) / (0.0 - e0);
    println!("Jastrow Heisenberg N=10: E = {} ± {}, E0 = {e0}, rel_err = {rel:.3e}", r.energy_mean, r.energy_std_error);
    assert!(r.energy_mean > e0);
    assert!(rel <= 5e-2);
    for t in &r.trace {
        assert!(t.energy >= e0 - 4.0 * t.std_error);
    }
    assert!(r.energy_variance >= 0.0);
    let acc = r.acceptance_rate.unwrap();
    assert!((0.0..=1.0).contains(&acc));
}
