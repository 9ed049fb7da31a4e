use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use infocorr::classical::{
    remap_to_n_symbols, strategy_behavior, strategy_guessing, ClassicalPolytope, DeterministicStrategy,
};
use infocorr::dibound::{di_info_curve, di_max_witness, di_min_info};
use infocorr::linalg::{self, CMat};
use infocorr::model::{
    behavior_from_quantum, correlator, hmin, witness_value, HermitianOperator, InfoBudget, Povm, QuantumEnsemble,
    Scenario, Witness,
};
use infocorr::optim::{solve_guessing_sdp, solve_lp, LpProblem, LpStatus, RowSense, SdpDiscriminationProblem, Sense};
use infocorr::quantum::{
    info_eigen_bound, info_of_ensemble, optimal_binary_measurements, seesaw_max_witness, strategy_info_and_value,
    QuantumStrategy, SeesawOptions,
};
use infocorr::rac::{build_paper_ensemble, ea_behavior, ea_to_qc, qubit_rac_reference, random_ea_strategy};
use infocorr::random::{
    random_behavior, random_distribution, random_ensemble, random_povm, random_pure, random_state, random_unitary,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_strategy(r: &mut ChaCha8Rng, n: usize, d: usize, l: usize, k: usize) -> DeterministicStrategy {
    let enc = (0..n).map(|_| r.random_range(0..d)).collect();
    let dec = (0..d * l).map(|_| r.random_range(0..k)).collect();
    DeterministicStrategy::new(d, l, k, enc, dec).unwrap()
}

fn random_witness(r: &mut ChaCha8Rng, s: &Scenario) -> Witness {
    let c = (0..s.table_len()).map(|_| r.random_range(-2.0..2.0)).collect();
    Witness::new(s.clone(), c, None).unwrap()
}

fn rotate(e: &QuantumEnsemble, u: &CMat) -> QuantumEnsemble {
    let states = e
        .states()
        .iter()
        .map(|s| HermitianOperator::hermitized(u * s.matrix() * u.adjoint()))
        .collect();
    QuantumEnsemble::new(e.prior().to_vec(), states).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantum_behaviors_are_normalized(seed in any::<u64>(), n in 1usize..5, d in 1usize..5, l in 1usize..4, k in 1usize..5) {
        let mut r = rng(seed);
        let e = random_ensemble(n, d, Some(random_distribution(n, &mut r)), &mut r);
        let m: Vec<Povm> = (0..l).map(|_| random_povm(d, k, &mut r)).collect();
        let p = behavior_from_quantum(&e, &m).unwrap();
        for x in 0..n {
            for y in 0..l {
                let total: f64 = (0..k).map(|b| p.get(x, y, b)).sum();
                prop_assert!((total - 1.0).abs() < 1e-10);
                prop_assert!((0..k).all(|b| p.get(x, y, b) >= 0.0));
            }
        }
    }

    #[test]
    fn witness_is_linear(seed in any::<u64>(), mu in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let s = Scenario::uniform(3, 2, 3).unwrap();
        let w = random_witness(&mut r, &s);
        let (p1, p2) = (random_behavior(&s, &mut r), random_behavior(&s, &mut r));
        let mixed = p1.mix(&p2, mu).unwrap();
        let lhs = witness_value(&w, &mixed).unwrap();
        let rhs = mu * witness_value(&w, &p1).unwrap() + (1.0 - mu) * witness_value(&w, &p2).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn correlator_matches_outcome_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = Scenario::uniform(4, 3, 2).unwrap();
        let p = random_behavior(&s, &mut r);
        for x in 0..4 {
            for y in 0..3 {
                prop_assert!((correlator(&p, x, y).unwrap() - (2.0 * p.get(x, y, 0) - 1.0)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hmin_range(seed in any::<u64>(), n in 1usize..10) {
        let prior = random_distribution(n, &mut rng(seed));
        let h = hmin(&prior).unwrap();
        prop_assert!(h >= 0.0 && h <= (n as f64).log2() + 1e-12);
    }

    #[test]
    fn lp_strong_duality(seed in any::<u64>(), vars in 1usize..8, rows in 1usize..8) {
        let mut r = rng(seed);
        let c: Vec<f64> = (0..vars).map(|_| r.random_range(-1.0..2.0)).collect();
        let a: Vec<Vec<f64>> = (0..rows).map(|_| (0..vars).map(|_| r.random_range(0.1..1.0)).collect()).collect();
        let b: Vec<f64> = (0..rows).map(|_| r.random_range(0.5..2.0)).collect();
        let mut lp = LpProblem::new(Sense::Maximize, c.clone());
        for (row, rhs) in a.iter().zip(&b) {
            lp.add_row(row.clone(), RowSense::Le, *rhs);
        }
        let sol = solve_lp(&lp).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let dual_obj: f64 = sol.dual.iter().zip(&b).map(|(y, b)| y * b).sum();
        prop_assert!((dual_obj - sol.value).abs() <= 1e-8 * (1.0 + sol.value.abs()));
        prop_assert!(sol.dual.iter().all(|&y| y >= -1e-9));
        for j in 0..vars {
            let reduced: f64 = (0..rows).map(|i| a[i][j] * sol.dual[i]).sum::<f64>() - c[j];
            prop_assert!(reduced >= -1e-8);
        }
    }

    #[test]
    fn sdp_sandwich(seed in any::<u64>(), n in 2usize..5, d in 2usize..5) {
        let mut r = rng(seed);
        let e = random_ensemble(n, d, Some(random_distribution(n, &mut r)), &mut r);
        let sol = solve_guessing_sdp(&SdpDiscriminationProblem::new(e.clone())).unwrap();
        let direct: f64 = e.prior().iter().zip(e.states()).zip(sol.povm.effects())
            .map(|((p, rho), m)| p * linalg::trace_product(rho.matrix(), m.matrix()))
            .sum();
        prop_assert!(direct <= sol.value + 1e-9);
        prop_assert!(sol.value <= sol.upper + 1e-12);
        prop_assert!(sol.gap() <= 1e-6);
    }

    #[test]
    fn guessing_drops_under_common_noise(seed in any::<u64>(), mu in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let e = random_ensemble(3, 2, None, &mut r);
        let sigma = random_state(2, 2, &mut r);
        let noisy = QuantumEnsemble::new(e.prior().to_vec(), e.states().iter().map(|s| {
            HermitianOperator::hermitized(linalg::scaled(s.matrix(), mu) + linalg::scaled(sigma.matrix(), 1.0 - mu))
        }).collect()).unwrap();
        let a = solve_guessing_sdp(&SdpDiscriminationProblem::new(e)).unwrap().upper;
        let b = solve_guessing_sdp(&SdpDiscriminationProblem::new(noisy)).unwrap().value;
        prop_assert!(b <= a + 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sdp_matches_projective_grid_for_real_qubits(seed in any::<u64>()) {
        let mut r = rng(seed);
        let bloch = |r: &mut ChaCha8Rng| {
            let t: f64 = r.random_range(0.0..std::f64::consts::TAU);
            let len: f64 = r.random_range(0.0..=1.0);
            (len * t.cos(), len * t.sin())
        };
        let state = |(x, z): (f64, f64)| {
            let m = linalg::identity(2) + linalg::scaled(&linalg::sigma_x(), x) + linalg::scaled(&linalg::sigma_z(), z);
            HermitianOperator::new(linalg::scaled(&m, 0.5)).unwrap()
        };
        let (a, b) = (bloch(&mut r), bloch(&mut r));
        let p0: f64 = r.random_range(0.05..0.95);
        let e = QuantumEnsemble::new(vec![p0, 1.0 - p0], vec![state(a), state(b)]).unwrap();
        let sdp = solve_guessing_sdp(&SdpDiscriminationProblem::new(e)).unwrap().value;
        let mut best = p0.max(1.0 - p0);
        let steps = 31_416;
        for i in 0..steps {
            let phi = std::f64::consts::PI * 2.0 * i as f64 / steps as f64;
            let (c, s) = (phi.cos(), phi.sin());
            let succ = p0 * 0.5 * (1.0 + c * a.0 + s * a.1) + (1.0 - p0) * 0.5 * (1.0 - c * b.0 - s * b.1);
            best = best.max(succ);
        }
        prop_assert!((sdp - best).abs() < 1e-4, "sdp {} grid {}", sdp, best);
        prop_assert!(sdp >= best - 1e-9);
    }

    #[test]
    fn guessing_matches_exhaustive_decoders(seed in any::<u64>(), n in 1usize..5, d in 1usize..5) {
        let mut r = rng(seed);
        let s = random_strategy(&mut r, n, d, 2, 2);
        let prior = random_distribution(n, &mut r);
        let mut best: f64 = 0.0;
        let mut guess = vec![0usize; d];
        loop {
            let v: f64 = (0..n).filter(|&x| guess[s.encoding()[x]] == x).map(|x| prior[x]).sum();
            best = best.max(v);
            let mut i = 0;
            while i < d {
                guess[i] += 1;
                if guess[i] < n { break; }
                guess[i] = 0;
                i += 1;
            }
            if i == d { break; }
        }
        prop_assert!((strategy_guessing(&s, &prior).unwrap() - best).abs() < 1e-15);
    }

    #[test]
    fn remap_preserves_behavior_and_guessing(seed in any::<u64>(), n in 1usize..5, extra in 0usize..4) {
        let mut r = rng(seed);
        let s = random_strategy(&mut r, n, n + extra, 2, 3);
        let sc = Scenario::new(n, 2, 3, random_distribution(n, &mut r)).unwrap();
        let t = remap_to_n_symbols(&s);
        prop_assert_eq!(t.message_dim(), n);
        prop_assert_eq!(strategy_behavior(&t, &sc).unwrap(), strategy_behavior(&s, &sc).unwrap());
        prop_assert_eq!(strategy_guessing(&t, sc.prior()).unwrap(), strategy_guessing(&s, sc.prior()).unwrap());
    }

    #[test]
    fn classical_membership_below_strategy_cost(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sc = Scenario::new(3, 2, 2, random_distribution(3, &mut r)).unwrap();
        let poly = ClassicalPolytope::build(&sc).unwrap();
        let s = random_strategy(&mut r, 3, 3, 2, 2);
        let bits = poly.membership(&strategy_behavior(&s, &sc).unwrap()).unwrap().bits;
        let own = hmin(sc.prior()).unwrap() + strategy_guessing(&s, sc.prior()).unwrap().log2();
        prop_assert!(bits <= own + 1e-9);
    }

    #[test]
    fn witness_bound_monotone_concave(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sc = Scenario::uniform(3, 2, 2).unwrap();
        let poly = ClassicalPolytope::build(&sc).unwrap();
        let w = random_witness(&mut r, &sc);
        let caps: Vec<f64> = (0..=12).map(|i| 1.0 / 3.0 + i as f64 / 18.0).collect();
        let v: Vec<f64> = caps.iter()
            .map(|&c| poly.witness_bound(&w, &InfoBudget::from_cap(c, &sc).unwrap()).unwrap().value)
            .collect();
        for i in 1..v.len() {
            prop_assert!(v[i] >= v[i - 1] - 1e-9);
        }
        for i in 1..v.len() - 1 {
            prop_assert!(2.0 * v[i] >= v[i - 1] + v[i + 1] - 1e-9);
        }
    }

    #[test]
    fn restricted_vertices_respect_budget(seed in any::<u64>(), alpha in 0.0f64..1.58) {
        let mut r = rng(seed);
        let sc = if r.random_bool(0.5) { Scenario::uniform(3, 2, 2).unwrap() } else { Scenario::new(3, 1, 3, random_distribution(3, &mut r)).unwrap() };
        let alpha = alpha.min(hmin(sc.prior()).unwrap());
        let poly = ClassicalPolytope::build(&sc).unwrap();
        let budget = InfoBudget::from_alpha(alpha, &sc).unwrap();
        let points = poly.restricted_vertices(&budget);
        let step = (points.len() / 12).max(1);
        for p in points.iter().step_by(step) {
            prop_assert!(poly.membership(p).unwrap().bits <= alpha + 1e-6);
        }
    }

    #[test]
    fn di_bound_weaker_than_classical(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sc = Scenario::uniform(3, 2, 2).unwrap();
        let poly = ClassicalPolytope::build(&sc).unwrap();
        let p = random_behavior(&sc, &mut r);
        prop_assert!(di_min_info(&p).unwrap() <= poly.membership(&p).unwrap().bits + 1e-9);
    }

    #[test]
    fn di_bound_matches_post_processing_oracle(seed in any::<u64>(), n in 1usize..5, k in 1usize..4, l in 1usize..3) {
        let mut r = rng(seed);
        let sc = Scenario::new(n, l, k, random_distribution(n, &mut r)).unwrap();
        let p = random_behavior(&sc, &mut r);
        let mut best: f64 = 0.0;
        for y in 0..l {
            let mut guess = vec![0usize; k];
            loop {
                let g: f64 = (0..k).map(|b| sc.prior()[guess[b]] * p.get(guess[b], y, b)).sum();
                best = best.max(g);
                let mut i = 0;
                while i < k {
                    guess[i] += 1;
                    if guess[i] < n { break; }
                    guess[i] = 0;
                    i += 1;
                }
                if i == k { break; }
            }
        }
        let want = (hmin(sc.prior()).unwrap() + best.log2()).max(0.0);
        prop_assert!((di_min_info(&p).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn di_bound_sound_for_quantum_strategies(seed in any::<u64>(), d in 1usize..4) {
        let mut r = rng(seed);
        let e = random_ensemble(3, d, None, &mut r);
        let m: Vec<Povm> = (0..2).map(|_| random_povm(d, 2, &mut r)).collect();
        let s = QuantumStrategy::single(e.clone(), m).unwrap();
        let (info, _) = strategy_info_and_value(&s, &Witness::f1()).unwrap();
        prop_assert!(di_min_info(&s.behavior().unwrap()).unwrap() <= info + 1e-6);
    }

    #[test]
    fn ea_simulation_is_faithful(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..5);
        let s = random_ea_strategy(n, 2, 3, &mut r);
        let tau = ea_to_qc(&s).unwrap();
        let direct = ea_behavior(&s).unwrap();
        let simulated = behavior_from_quantum(&tau, s.bob()).unwrap();
        for (a, b) in direct.table().iter().zip(simulated.table()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        prop_assert!(info_of_ensemble(&tau).unwrap() <= (s.message_dim() as f64).log2() + 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn seesaw_result_reproduces(seed in any::<u64>(), alpha in 0.1f64..1.5) {
        let opts = SeesawOptions { restarts: 2, iterations: 40, seed, ..Default::default() };
        let res = seesaw_max_witness(&Witness::f1(), alpha, 2, &opts).unwrap();
        let fresh = QuantumStrategy::new(res.strategy.branches().to_vec()).unwrap();
        let (info, value) = strategy_info_and_value(&fresh, &Witness::f1()).unwrap();
        prop_assert!((info - res.info).abs() < 1e-6 && (value - res.value).abs() < 1e-6);
        prop_assert!(info <= alpha + 1e-4);
        // The measurement step is exact: rebuilding it cannot improve the search branch.
        let top = &res.strategy.branches()[0];
        let (_, best) = optimal_binary_measurements(top.ensemble.states(), &Witness::f1()).unwrap();
        let p = behavior_from_quantum(&top.ensemble, &top.measurements).unwrap();
        prop_assert!((witness_value(&Witness::f1(), &p).unwrap() - best).abs() < 1e-9);
    }
}

#[test]
fn info_below_eigen_bound_and_dimension() {
    let mut r = rng(2024);
    for i in 0..500 {
        let d = 2 + i % 3;
        let n = r.random_range(2..6);
        let prior = if i % 2 == 0 { None } else { Some(random_distribution(n, &mut r)) };
        let e = random_ensemble(n, d, prior, &mut r);
        let info = info_of_ensemble(&e).unwrap();
        let bound = info_eigen_bound(&e);
        assert!(info <= bound.bits + 1e-6, "ensemble {i}: {info} > {}", bound.bits);
        assert!(info <= (d as f64).log2() + 1e-9);
    }
}

#[test]
fn eigen_bound_attained_by_rotated_tight_families() {
    let mut r = rng(99);
    let (four_bit, _) = build_paper_ensemble();
    let (square, _) = qubit_rac_reference(2).unwrap();
    let (cube, _) = qubit_rac_reference(3).unwrap();
    let basis = |d: usize| {
        QuantumEnsemble::uniform((0..d).map(|i| HermitianOperator::hermitized(linalg::basis_projector(d, i))).collect())
            .unwrap()
    };
    for e in [four_bit, square, cube, basis(3), basis(4)] {
        for _ in 0..5 {
            let rotated = rotate(&e, &random_unitary(e.dim(), &mut r));
            let b = info_eigen_bound(&rotated);
            assert!(b.tight);
            assert_abs_diff_eq!(info_of_ensemble(&rotated).unwrap(), b.bits, epsilon = 1e-5);
        }
    }
}

#[test]
fn eigen_conditions_do_not_force_equality_for_identical_states() {
    // Both conditions hold, yet identical states carry nothing.
    let psi = random_pure(3, &mut rng(5));
    let e = QuantumEnsemble::uniform(vec![psi; 3]).unwrap();
    let b = info_eigen_bound(&e);
    assert!(b.tight);
    assert_abs_diff_eq!(b.bits, 3f64.log2(), epsilon = 1e-12);
    assert!(info_of_ensemble(&e).unwrap() < 1e-6);
}

#[test]
fn four_bit_states_meet_both_tightness_conditions() {
    let (e, _) = build_paper_ensemble();
    for rho in e.states() {
        let single = QuantumEnsemble::uniform(vec![rho.clone()]).unwrap();
        assert!(info_eigen_bound(&single).tight);
        let top = rho.eigenvalues()[3];
        assert_abs_diff_eq!(top / 16.0, 1.0 / 32.0, epsilon = 1e-12);
    }
}

#[test]
fn di_curves_monotone() {
    let sc = Scenario::uniform(3, 2, 2).unwrap();
    let mut last = f64::MIN;
    for i in 0..=12 {
        let cap = 1.0 / 3.0 + i as f64 / 18.0;
        let v = di_max_witness(&Witness::f1(), &InfoBudget::from_cap(cap, &sc).unwrap()).unwrap();
        assert!(v >= last - 1e-9);
        last = v;
    }
    let values: Vec<f64> = (0..=16).map(|i| 1.0 + i as f64 * 0.25).collect();
    let curve = di_info_curve(&Witness::f1(), &values).unwrap();
    for pair in curve.windows(2) {
        assert!(pair[1].1 >= pair[0].1 - 1e-9);
    }
}

#[test]
fn complex_rotation_helper_is_unitary() {
    let u = random_unitary(3, &mut rng(1));
    let id = &u * u.adjoint();
    assert!(linalg::max_abs_diff(&id, &linalg::identity(3)) < 1e-12);
}
