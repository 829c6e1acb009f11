use num_complex::Complex64;
use proptest::prelude::*;

use whlab::fermion_algebra::{
    gamma_operator, majorana, pauli_mul, GammaIndex, MajoranaIndex, OperatorSum, PauliString, PauliTerm, Phase, Side,
};
use whlab::harness::{format_float, GridSpec};
use whlab::linalg::TimeMode;
use whlab::models::{sample, EnsembleSpec, Interaction, ModelKind};
use whlab::observables::mutual_information_rt;
use whlab::size_winding::{winding_fit, SizeBasis, ThermalFermionExpander};
use whlab::states::{EvolveOptions, Evolver};
use whlab::teleport::{Protocol, Slice};

fn side(left: bool) -> Side {
    if left {
        Side::Left
    } else {
        Side::Right
    }
}

fn term(n: usize) -> impl Strategy<Value = PauliTerm> {
    let full = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>(), 0u8..4).prop_map(move |(x, z, k)| {
        PauliTerm::new(n, PauliString::new(x & full, z & full), Phase::from_exponent(k as i64)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_product_is_associative(a in term(6), b in term(6), c in term(6)) {
        let left = pauli_mul(&a, &pauli_mul(&b, &c).unwrap()).unwrap();
        let right = pauli_mul(&pauli_mul(&a, &b).unwrap(), &c).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn majoranas_anticommute(n in (1usize..=4).prop_map(|k| 2 * k), i in 0usize..8, j in 0usize..8, si: bool, sj: bool) {
        let (i, j) = (i % n, j % n);
        let a = majorana(MajoranaIndex::new(side(si), i), n).unwrap();
        let b = majorana(MajoranaIndex::new(side(sj), j), n).unwrap();
        let anti = a.anticommutator(&b).unwrap();
        if si == sj && i == j {
            prop_assert!(anti.sub(&OperatorSum::identity(n)).unwrap().is_zero(1e-14));
        } else {
            prop_assert!(anti.is_zero(1e-14));
        }
    }

    #[test]
    fn gamma_is_hermitian_and_unitary(mask in 0u64..256, left: bool) {
        let g = gamma_operator(&GammaIndex::from_mask(side(left), mask, 8).unwrap(), 8).unwrap();
        prop_assert!(g.is_hermitian(1e-14));
        prop_assert!(g.mul(&g).unwrap().sub(&OperatorSum::identity(8)).unwrap().is_zero(1e-14));
    }

    #[test]
    fn gamma_states_are_orthonormal(a in 0u64..256, b in 0u64..256) {
        let basis = SizeBasis::new(8).unwrap();
        let state = |m| gamma_operator(&GammaIndex::from_mask(Side::Left, m, 8).unwrap(), 8).unwrap().apply(basis.reference()).unwrap();
        let ip = state(a).inner(&state(b)).unwrap();
        let want = if a == b { 1.0 } else { 0.0 };
        prop_assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn evolution_composes(seed in 0u64..1000, t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let c = sample(ModelKind::Syk, 8, 4, 1.0, seed).unwrap();
        let h = c.hamiltonian(Side::Left).unwrap().add(&c.hamiltonian(Side::Right).unwrap()).unwrap();
        let ev = Evolver::new(&h, EvolveOptions::default()).unwrap();
        let psi = SizeBasis::new(8).unwrap().reference().clone();
        let a = ev.apply(&ev.apply(&psi, t1, TimeMode::Real).unwrap(), t2, TimeMode::Real).unwrap();
        let b = ev.apply(&psi, t1 + t2, TimeMode::Real).unwrap();
        let dev = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-9, "{}", dev);
        prop_assert!((a.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rho_tr_is_a_state(seed in 0u64..1000, beta in 0.0f64..6.0, t in 0.0f64..3.0, mu in -1.0f64..1.0, vb: bool) {
        let kind = if vb { Interaction::Vb } else { Interaction::V };
        let c = sample(ModelKind::Syk, 6, 4, 1.0, seed).unwrap();
        let p = Protocol::new(&c, beta, kind).unwrap();
        let rho = p.correlator_rho(t, t, &[Slice { time: 0.0, mu }]).unwrap();
        prop_assert!(rho.check_invariants(1e-10).is_ok());
        prop_assert!(mutual_information_rt(&rho).unwrap() >= -1e-10);
    }

    #[test]
    fn warmup_is_even_in_mu(seed in 0u64..1000, mu in -1.5f64..1.5) {
        let c = sample(ModelKind::Syk, 6, 4, 1.0, seed).unwrap();
        let p = Protocol::new(&c, 0.0, Interaction::V).unwrap();
        let i = |m: f64| mutual_information_rt(&p.correlator_rho(0.0, 0.0, &[Slice { time: 0.0, mu: m }]).unwrap()).unwrap();
        prop_assert!((i(mu) - i(-mu)).abs() < 1e-10);
    }

    #[test]
    fn coherence_is_bounded(seed in 0u64..1000, beta in 0.0f64..8.0, t in -4.0f64..4.0) {
        let c = sample(ModelKind::Syk, 8, 4, 1.0, seed).unwrap();
        let d = ThermalFermionExpander::new(&c, beta).unwrap()
            .expand(Side::Left, 0, t, whlab::size_winding::ExpansionEngine::Fast).unwrap();
        let total: f64 = d.p.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        let f = winding_fit(&d.p, &d.q).unwrap();
        prop_assert!(f.coherence >= 0.0 && f.coherence <= 1.0 + 1e-9);
    }

    #[test]
    fn winding_fit_recovers_linear_phase(slope in -0.5f64..0.5, offset in -3.0f64..3.0, n in 4usize..16) {
        let p: Vec<f64> = (0..=n).map(|s| 1.0 + (s % 3) as f64).collect();
        let q: Vec<Complex64> = p.iter().enumerate().map(|(s, p)| Complex64::from_polar(*p, offset + slope * s as f64)).collect();
        let f = winding_fit(&p, &q).unwrap();
        prop_assert!((f.slope - slope).abs() < 1e-10);
        prop_assert!((f.coherence - 1.0).abs() < 1e-12);
    }

    #[test]
    fn range_grids_are_increasing(start in -10.0f64..10.0, width in 0.01f64..10.0, count in 2usize..50) {
        let v = GridSpec::Range { start, stop: start + width, count }.values();
        prop_assert_eq!(v.len(), count);
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
        prop_assert!((v[count - 1] - (start + width)).abs() < 1e-12);
    }

    #[test]
    fn floats_round_trip(x: f64) {
        prop_assume!(x.is_finite());
        prop_assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn member_seeds_are_reproducible(master: u64, count in 1usize..20) {
        let e = EnsembleSpec::new(master, count);
        let a: Vec<u64> = e.seeds().collect();
        let b: Vec<u64> = (0..count).map(|k| e.member_seed(k)).collect();
        prop_assert_eq!(&a, &b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), count);
    }
}
