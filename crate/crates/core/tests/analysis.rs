use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resetctl_core::analysis::*;
use resetctl_core::generators::{phi1_super, phi2_super, CycleGenerator, SwitchingFunction};
use resetctl_core::models::*;
use resetctl_core::qcore::random::random_hermitian;
use resetctl_core::qcore::*;

const NS: [usize; 5] = [16, 32, 64, 128, 256];

fn ladder_setup() -> (CycleGenerator, DensityMatrix) {
    // ρ_A is not an eigenstate of σ_x, so the coupling fluctuates and the
    // first-order correction is non-zero
    let gen = OscillatorQubitModel::qubit_pair().build().unwrap();
    (gen, bloch_state([0.6, 0.0, 0.8]).unwrap())
}

fn xs() -> Vec<f64> {
    NS.iter().map(|&n| n as f64).collect()
}

#[test]
fn chernoff_ladder_is_first_order() {
    let (gen, rho_a) = ladder_setup();
    let ys: Vec<f64> = NS.iter().map(|&n| chernoff_deviation(&gen, &rho_a, 1.0, n).unwrap()).collect();
    assert!(ys.windows(2).all(|w| w[1] <= w[0] * 1.05));
    let order = fit_order(&xs(), &ys).unwrap().fitted_order;
    assert!((-1.3..=-0.7).contains(&order), "order {order}");
}

#[test]
fn omega1_correction_leaves_second_order_residual() {
    let (gen, rho_a) = ladder_setup();
    let ys: Vec<f64> = NS
        .iter()
        .map(|&n| corrected_chernoff_deviation(&gen, &rho_a, 1.0, n).unwrap())
        .collect();
    let order = fit_order(&xs(), &ys).unwrap().fitted_order;
    assert!((-2.4..=-1.6).contains(&order), "order {order}");
}

#[test]
fn omega1_annihilates_trace() {
    let (gen, rho_a) = ladder_setup();
    let phi1 = phi1_super(&gen, &rho_a).unwrap();
    let phi2 = phi2_super(&gen, &rho_a).unwrap();
    let omega = omega1_super(&phi1, &phi2, 1.7, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let x = random_hermitian(&mut rng, 2);
        assert!(omega.apply(&x).trace().norm() <= 1e-10);
    }
}

#[test]
fn symmetric_switching_with_coupling_eigenstate_has_no_first_order_term() {
    // with ρ_A an eigenstate of σ_x and g symmetric about ζ = 1/2 the
    // deviation falls off as 1/n²
    let gen = OscillatorQubitModel::qubit_pair().build().unwrap();
    let rho_a = bloch_state([1.0, 0.0, 0.0]).unwrap();
    let phi1 = phi1_super(&gen, &rho_a).unwrap();
    let phi2 = phi2_super(&gen, &rho_a).unwrap();
    let omega = omega1_super(&phi1, &phi2, 1.0, 8).unwrap();
    assert!(omega.frobenius_norm() < 1e-10);
}

#[test]
fn dissipative_law() {
    let (gen, rho_a) = ladder_setup();
    let s = 1.0 / 2f64.sqrt();
    let psi0 = CVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)]);
    let grid: Vec<f64> = (1..=10).map(|k| 0.2 * k as f64).collect();
    let report = dissipative_scaling(&gen, &rho_a, &psi0, &[20.0, 40.0, 80.0], &grid).unwrap();
    for c in &report.curves {
        assert!(c.fit.r_squared >= 0.95, "f = {}: r² = {}", c.rate, c.fit.r_squared);
    }
    assert!(report.scaling.order_within(-1.3, -0.7), "{:?}", report.scaling);
}

#[test]
fn stroboscopic_residual_is_second_order() {
    let (gen, rho_a) = ladder_setup();
    let rho_s = bloch_state([0.3, 0.4, 0.5]).unwrap();
    let taus = [0.005, 0.01, 0.02, 0.04, 0.08];
    let ys: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            let dt = 4.0 * tau;
            let measured = measured_stroboscopic_deviation(&gen, &rho_a, &rho_s, tau, dt).unwrap();
            let predicted = stroboscopic_deviation(&gen, &rho_a, &rho_s, tau, dt).unwrap();
            trace_norm(&(measured.matrix() - predicted.matrix()))
        })
        .collect();
    let order = fit_order(&taus, &ys).unwrap().fitted_order;
    assert!((1.6..=2.4).contains(&order), "order {order}");
}

#[test]
fn quarter_cycle_prediction_matches_closed_form() {
    let (gen, rho_a) = ladder_setup();
    let rho_s = bloch_state([0.3, 0.4, 0.5]).unwrap();
    let dt = 0.2;
    let d = stroboscopic_deviation(&gen, &rho_a, &rho_s, dt / 4.0, dt).unwrap();
    let avg = resetctl_core::generators::averaged_interaction(&gen, &rho_a).unwrap();
    let want = commutator(&avg, rho_s.matrix()) * Complex64::new(0.0, -(dt / 4.0) * 2.0 / std::f64::consts::PI);
    assert!((d.matrix() - want).norm() < 1e-12);
}

#[test]
fn braced_term_bound_on_dense_grid() {
    let shapes = [
        SwitchingFunction::sin_squared(2.0),
        SwitchingFunction::constant(1.3),
        SwitchingFunction::square_pulse(3.0, 0.0, 0.5).unwrap(),
        SwitchingFunction::square_pulse(-1.0, 0.2, 0.7).unwrap(),
        SwitchingFunction::table(vec![0.0, 0.3, 1.0], vec![0.0, 2.0, -0.5]).unwrap(),
    ];
    for g in &shapes {
        for i in 1..=40 {
            let dt = 0.05 * i as f64;
            for j in 1..=40 {
                let tau = dt * j as f64 / 40.0;
                assert!(stroboscopic_bound_check(g, tau, dt));
            }
        }
    }
}

#[test]
fn square_pulse_half_cycle() {
    // g = h on [0, 1/2): ∫₀^{1/2} g = h/2, so the braced term is h/2 − h = −h/2
    let h = 3.0;
    let g = SwitchingFunction::square_pulse(h, 0.0, 0.5).unwrap();
    let b = braced_term(&g, 0.5, 1.0).unwrap();
    assert!((b + h / 2.0).abs() < 1e-10);
    assert!(b.abs() <= braced_bound(&g, 0.5, 1.0).unwrap());
}

#[test]
fn gradual_reset_improves_with_rate() {
    let (gen, rho_a) = ladder_setup();
    let s = 1.0 / 2f64.sqrt();
    let psi0 = CVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)]);
    let ladder = gradual_reset_ladder(&gen, &rho_a, &psi0, &[2.0, 4.0, 8.0, 16.0, 32.0], 2.0, 10).unwrap();
    for w in ladder.windows(2) {
        assert!(w[1].1 <= w[0].1 * 1.1, "{ladder:?}");
    }
}

#[test]
fn lie_dimension_invariant_under_recombination() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let gens = [sigma_z(), sigma_z() + sigma_x()];
    let base = lie_algebra_dimension(
        &gens.iter().map(|m| Operator::from_matrix(m.clone()).unwrap()).collect::<Vec<_>>(),
        1e-10,
    )
    .unwrap();
    for _ in 0..5 {
        use rand::Rng;
        let (a, b, c, d): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
        if (a * d - b * c).abs() < 1e-3 {
            continue;
        }
        let mixed = [
            gens[0].scale(a) + gens[1].scale(b),
            gens[0].scale(c) + gens[1].scale(d),
        ];
        let ops: Vec<Operator> = mixed.iter().map(|m| Operator::from_matrix(m.clone()).unwrap()).collect();
        assert_eq!(lie_algebra_dimension(&ops, 1e-10).unwrap(), base);
    }
    assert_eq!(base, 3);
}

#[test]
fn two_qubit_local_algebra() {
    // σ_z⊗I, σ_x⊗I, I⊗σ_z generate su(2) ⊕ u(1)
    let id = CMatrix::identity(2, 2);
    let ops: Vec<Operator> = [sigma_z().kronecker(&id), sigma_x().kronecker(&id), id.kronecker(&sigma_z())]
        .into_iter()
        .map(|m| Operator::from_matrix(m).unwrap())
        .collect();
    assert_eq!(lie_algebra_dimension(&ops, 1e-10).unwrap(), 4);
}
