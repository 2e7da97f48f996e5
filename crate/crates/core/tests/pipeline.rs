use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use qrainbow::designer::{fields_from_energies, uniform_q_fields, DesignTarget, OrderingPolicy};
use qrainbow::entanglement::EntanglementReport;
use qrainbow::exact::{ground_state, residual};
use qrainbow::freefermion;
use qrainbow::rg::{ansatz_energy, rainbow_state, renormalize};
use qrainbow::ChainSpec;

fn chain(j: f64, r: f64, h: &[f64]) -> ChainSpec {
    let couplings = (0..h.len()).map(|i| j * r.powi(i as i32)).collect();
    ChainSpec::new(couplings, h.to_vec()).unwrap()
}

#[test]
fn designed_two_pair_chain_matches_exact_state() {
    let target = DesignTarget::energies(vec![-1.2, -0.4], vec![1.0, 1e-3]).with_ordering(OrderingPolicy::AsGiven);
    let design = fields_from_energies(&target).unwrap();
    let ground = ground_state(&design.spec).unwrap();
    assert!(ground.fidelity(&rainbow_state(&design.profile)).unwrap() > 1.0 - 1e-4);

    let exact = EntanglementReport::from_state(&ground.state).unwrap();
    assert_abs_diff_eq!(exact.vn_entropy, design.predicted.vn_entropy, epsilon = 1e-3);

    let mut ff = freefermion::analyze(&design.spec).unwrap().rainbow_energies();
    ff.sort_by(|a, b| a.total_cmp(b));
    assert_abs_diff_eq!(ff[0], -1.2, epsilon = 1e-3);
    assert_abs_diff_eq!(ff[1], -0.4, epsilon = 1e-3);
}

#[test]
fn ground_state_solves_eigenproblem() {
    let spec = chain(1.0, 0.2, &[0.3, -0.05, 0.01]);
    let g = ground_state(&spec).unwrap();
    assert!(residual(&spec, &g.state, g.energy) < 1e-10);
    assert_abs_diff_eq!(g.state.energy(&spec), g.energy, epsilon = 1e-10);
}

#[test]
fn uniform_q_chain_is_self_consistent() {
    let spec = uniform_q_fields(3.0, &[1.0, 1e-2]).unwrap();
    let profile = renormalize(&spec).unwrap();
    for q in &profile.q {
        assert_abs_diff_eq!(q.q(), 3.0, epsilon = 1e-9);
    }
    let ground = ground_state(&spec).unwrap();
    assert!(ground.fidelity(&rainbow_state(&profile)).unwrap() > 0.999);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ansatz_energy_bounds_exact(h1 in -2.0..2.0f64, h2 in -0.02..0.02f64, r in 1e-3..5e-2f64) {
        let spec = chain(1.0, r, &[h1, h2]);
        let profile = renormalize(&spec).unwrap();
        let g = ground_state(&spec).unwrap();
        let e = ansatz_energy(&spec, &profile);
        prop_assert!(e >= g.energy - 1e-10);
        prop_assert!(rainbow_state(&profile).energy(&spec) >= g.energy - 1e-10);
    }

    #[test]
    fn field_reversal_inverts_profile(h1 in -2.0..2.0f64, h2 in -0.02..0.02f64) {
        let spec = chain(1.0, 1e-2, &[h1, h2]);
        let a = renormalize(&spec).unwrap();
        let b = renormalize(&spec.with_fields_negated()).unwrap();
        for (x, y) in a.gammas().iter().zip(b.gammas()) {
            prop_assert!((x + y).abs() < 1e-12);
        }
        let sa = EntanglementReport::from_profile(&a).unwrap().vn_entropy;
        let sb = EntanglementReport::from_profile(&b).unwrap().vn_entropy;
        prop_assert!((sa - sb).abs() < 1e-12);
    }

    #[test]
    fn exact_and_free_fermion_entropies_agree(h1 in -1.0..1.0f64, h2 in -0.1..0.1f64, h3 in -0.01..0.01f64) {
        let spec = chain(1.0, 0.1, &[h1, h2, h3]);
        let g = ground_state(&spec).unwrap();
        prop_assume!(g.degeneracy == 1);
        let spin = EntanglementReport::from_state(&g.state).unwrap().vn_entropy;
        let ff = freefermion::analyze(&spec).unwrap();
        prop_assume!(!ff.zero_mode);
        prop_assert!((spin - ff.vn_entropy()).abs() < 1e-8);
    }
}
