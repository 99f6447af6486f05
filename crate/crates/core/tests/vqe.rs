mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::kron_dense;
use nalgebra::DVector;
use num_complex::Complex64;
use qbench::exact::{lanczos_ground, mean_and_variance, LanczosConfig};
use qbench::lattice::{chain, square, Boundary};
use qbench::vqe::*;
use qbench::HamiltonianSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tfim(l: usize, bc: Boundary, gamma: f64) -> HamiltonianSpec {
    HamiltonianSpec::tfim(chain(l, bc).unwrap(), 1.0, gamma).unwrap()
}

fn random_angles(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-PI..PI)).collect()
}

fn circuits(spec: &HamiltonianSpec) -> Vec<Circuit> {
    vec![
        Circuit::for_spec(CircuitAnsatzKind::Rcx { depth: 2 }, spec).unwrap(),
        Circuit::for_spec(CircuitAnsatzKind::Hv { depth: 3 }, spec).unwrap(),
    ]
}

/// `(<v|H|v>, <v|H^2|v> - <v|H|v>^2)` from the Kronecker-assembled matrix.
fn dense_moments(spec: &HamiltonianSpec, state: &QuantumState) -> (f64, f64) {
    let h = kron_dense(spec).map(|x| Complex64::new(x, 0.0));
    let v = DVector::from_column_slice(state.to_spin_state().amplitudes());
    let hv = &h * &v;
    let e = v.dotc(&hv).re;
    (e, hv.norm_squared() - e * e)
}

#[test]
fn zero_angle_rcx_is_all_zero_register() {
    let spec = tfim(10, Boundary::Open, 1.0);
    let state = prepare_rcx(10, 3, &[0.0; 40]).unwrap();
    assert_eq!(state.amplitudes()[0], Complex64::new(1.0, 0.0));
    let (e, _) = circuit_energy_and_variance(&state, &spec).unwrap();
    assert!((e - 9.0).abs() < 1e-12, "{e}");
}

#[test]
fn single_rotation_gives_plus_state() {
    let state = prepare_rcx(1, 0, &[FRAC_PI_2]).unwrap();
    let a = state.amplitudes();
    let x = 2.0 * (a[0].conj() * a[1]).re;
    assert!((x - 1.0).abs() < 1e-14);
}

#[test]
fn zero_angle_hv_is_plus_register() {
    let spec = tfim(10, Boundary::Open, 1.0);
    let state = prepare_hv(spec.lattice(), 4, &[0.0; 8]).unwrap();
    let (e, _) = circuit_energy_and_variance(&state, &spec).unwrap();
    assert!((e - 10.0).abs() < 1e-12, "{e}");
}

#[test]
fn circuits_preserve_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let lattice = square(3, 3, Boundary::Periodic).unwrap();
    for _ in 0..100 {
        let rcx = prepare_rcx(7, 3, &random_angles(28, &mut rng)).unwrap();
        assert!((rcx.norm() - 1.0).abs() < 1e-10);
        let hv = prepare_hv(&lattice, 4, &random_angles(8, &mut rng)).unwrap();
        assert!((hv.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn half_turn_zz_layer_is_a_global_phase() {
    let spec = tfim(6, Boundary::Periodic, 0.7);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut theta = random_angles(6, &mut rng);
    theta[2] = 0.0;
    let base = prepare_hv(spec.lattice(), 3, &theta).unwrap();
    theta[2] = PI;
    let turned = prepare_hv(spec.lattice(), 3, &theta).unwrap();
    assert!((base.inner(&turned).norm() - 1.0).abs() < 1e-12);
    let (e0, _) = circuit_energy_and_variance(&base, &spec).unwrap();
    let (e1, _) = circuit_energy_and_variance(&turned, &spec).unwrap();
    assert!((e0 - e1).abs() < 1e-12);
}

#[test]
fn ground_vector_has_vanishing_variance() {
    let spec = tfim(8, Boundary::Periodic, 1.0);
    let ground = lanczos_ground(&spec, &LanczosConfig::default()).unwrap();
    let state = QuantumState::from_spin_state(&ground.ground_vector).unwrap();
    let (e, var) = circuit_energy_and_variance(&state, &spec).unwrap();
    assert!(var <= 1e-10, "{var}");
    assert!((e - ground.e0).abs() < 1e-9);
}

#[test]
fn all_zero_register_moments_on_open_chain() {
    let spec = tfim(4, Boundary::Open, 1.0);
    let state = QuantumState::zero(4).unwrap();
    let (e, var) = circuit_energy_and_variance(&state, &spec).unwrap();
    let (de, dvar) = dense_moments(&spec, &state);
    assert!((de - 3.0).abs() < 1e-12 && (dvar - 4.0).abs() < 1e-12);
    assert!((e - 3.0).abs() < 1e-12 && (var - 4.0).abs() < 1e-12);
}

#[test]
fn circuit_moments_agree_with_exact_layer_and_dense_oracle() {
    let spec = tfim(6, Boundary::Periodic, 0.9);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..50 {
        let circuit = &circuits(&spec)[trial % 2];
        let theta = random_angles(circuit.n_parameters(), &mut rng);
        let state = circuit.prepare(&theta).unwrap();
        let (e, var) = circuit_energy_and_variance(&state, &spec).unwrap();
        let (ae, avar, _) = circuit.energy_gradient(&spec, &theta, GradientMethod::Adjoint).unwrap();
        let (xe, xvar) = mean_and_variance(&spec, &state.to_spin_state()).unwrap();
        let (de, dvar) = dense_moments(&spec, &state);
        for (a, b) in [(e, ae), (e, xe), (e, de), (var, avar), (var, xvar), (var, dvar)] {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}

#[test]
fn parameter_shift_matches_finite_differences() {
    let spec = tfim(4, Boundary::Open, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for circuit in circuits(&spec) {
        for _ in 0..3 {
            let theta = random_angles(circuit.n_parameters(), &mut rng);
            let (_, _, shift) = circuit
                .energy_gradient(&spec, &theta, GradientMethod::ParameterShift)
                .unwrap();
            let (_, _, fd) = circuit
                .energy_gradient(&spec, &theta, GradientMethod::FiniteDifference(1e-6))
                .unwrap();
            let scale = shift.iter().map(|g| g.abs()).fold(0.0, f64::max);
            for (s, f) in shift.iter().zip(&fd) {
                assert!((s - f).abs() <= 1e-5 * scale.max(1.0), "{:?}: {s} vs {f}", circuit.kind());
            }
        }
    }
}

#[test]
fn adjoint_matches_parameter_shift() {
    let spec = tfim(5, Boundary::Periodic, 0.6);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for circuit in circuits(&spec) {
        let theta = random_angles(circuit.n_parameters(), &mut rng);
        let (_, _, adj) = circuit.energy_gradient(&spec, &theta, GradientMethod::Adjoint).unwrap();
        let (_, _, shift) = circuit
            .energy_gradient(&spec, &theta, GradientMethod::ParameterShift)
            .unwrap();
        for (a, s) in adj.iter().zip(&shift) {
            assert!((a - s).abs() < 1e-11, "{:?}: {a} vs {s}", circuit.kind());
        }
    }
}

#[test]
fn zz_only_circuit_has_zero_ising_energy() {
    let spec = tfim(6, Boundary::Periodic, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let mut theta = random_angles(8, &mut rng);
        for k in 0..4 {
            theta[2 * k + 1] = 0.0;
        }
        let state = prepare_hv(spec.lattice(), 4, &theta).unwrap();
        let (e, _) = circuit_energy_and_variance(&state, &spec).unwrap();
        assert!(e.abs() < 1e-12, "{e}");
    }
}

#[test]
fn embedding_preserves_the_state() {
    let spec = tfim(5, Boundary::Open, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for family in [CircuitAnsatzKind::Rcx { depth: 0 }, CircuitAnsatzKind::Hv { depth: 0 }] {
        let shallow = Circuit::for_spec(family.with_depth(2), &spec).unwrap();
        let deep_kind = family.with_depth(5);
        let deep = Circuit::for_spec(deep_kind, &spec).unwrap();
        let theta = random_angles(shallow.n_parameters(), &mut rng);
        let embedded = deep_kind.embed(5, &theta).unwrap();
        let a = shallow.prepare(&theta).unwrap();
        let b = deep.prepare(&embedded).unwrap();
        assert!((a.inner(&b) - Complex64::new(1.0, 0.0)).norm() < 1e-12, "{family:?}");
    }
}

#[test]
fn parameter_and_sector_errors() {
    assert!(matches!(
        prepare_rcx(3, 1, &[0.0; 5]),
        Err(VqeError::ParameterLengthMismatch { expected: 6, got: 5 })
    ));
    let lattice = chain(4, Boundary::Open).unwrap();
    assert!(matches!(
        prepare_hv(&lattice, 2, &[0.0; 3]),
        Err(VqeError::ParameterLengthMismatch { expected: 4, got: 3 })
    ));
    let spec = tfim(4, Boundary::Open, 1.0);
    let state = QuantumState::zero(5).unwrap();
    assert_eq!(circuit_energy_and_variance(&state, &spec), Err(VqeError::SectorMismatch));
    let fermions = HamiltonianSpec::t_v(chain(4, Boundary::Open).unwrap(), 1.0, 1.0, 2).unwrap();
    assert!(Circuit::for_spec(CircuitAnsatzKind::Rcx { depth: 1 }, &fermions).is_err());
    let big = tfim(17, Boundary::Open, 1.0);
    assert!(matches!(
        Circuit::for_spec(CircuitAnsatzKind::Rcx { depth: 1 }, &big),
        Err(VqeError::QubitCount { n: 17, .. })
    ));
}

#[test]
fn small_optimization_approaches_ground_state() {
    let spec = tfim(4, Boundary::Open, 1.0);
    let e0 = lanczos_ground(&spec, &LanczosConfig::default()).unwrap().e0;
    let cfg = VqeConfig {
        iterations: 400,
        n_seeds: 3,
        ..VqeConfig::default()
    };
    let run = optimize_vqe(&spec, CircuitAnsatzKind::Rcx { depth: 3 }, &cfg, 11).unwrap();
    let r = &run.result;
    let rel = (r.energy_mean - e0) / (r.e_infty - e0);
    assert!((-1e-12..1e-2).contains(&rel), "{rel}");
    assert_eq!(run.seed_energies.len(), 3);
    assert!(run.seed_energies.iter().all(|e| *e >= r.energy_mean));
    assert!(r.trace.windows(2).all(|w| w[1].energy <= w[0].energy));
    assert_eq!(r.n_parameters, 16);
    assert_eq!(r.acceptance_rate, None);
}

#[test]
fn depth_scan_never_raises_energy() {
    let spec = tfim(6, Boundary::Open, 1.0);
    let cfg = VqeConfig {
        iterations: 60,
        n_seeds: 2,
        ..VqeConfig::default()
    };
    for family in [CircuitAnsatzKind::Rcx { depth: 0 }, CircuitAnsatzKind::Hv { depth: 0 }] {
        let runs = depth_scan(&spec, family, &[1, 2, 4], &cfg, 3).unwrap();
        for w in runs.windows(2) {
            assert!(w[1].result.energy_mean <= w[0].result.energy_mean, "{family:?}");
        }
    }
    assert!(depth_scan(&spec, CircuitAnsatzKind::Hv { depth: 0 }, &[2, 2], &cfg, 3).is_err());
}
