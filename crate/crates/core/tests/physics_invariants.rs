mod common;

use common::{grid, members};
use whlab::eternal::{eternal_spectrum, optimal_beta};
use whlab::fermion_algebra::Side;
use whlab::models::{Interaction, ModelKind};
use whlab::size_winding::{lyapunov_fit, winding_fit, ExpansionEngine, ThermalFermionExpander};
use whlab::teleport::{mi_curve, ProtocolConfig};

#[test]
fn size_distribution_scrambles_at_late_times() {
    let n = 12;
    let c = &members(ModelKind::Syk, n, 2024, 1)[0].1;
    let d = ThermalFermionExpander::new(c, 4.0)
        .unwrap()
        .expand(Side::Left, 0, -30.0, ExpansionEngine::Fast)
        .unwrap();
    let (mean, std) = d.size_moments();
    let half = n as f64 / 2.0;
    assert!((mean - half).abs() < 0.1 * half, "mean size {mean}");
    assert!((std * (n as f64).sqrt() / mean - 1.0).abs() < 0.5, "std {std}");
}

#[test]
fn coherence_peaks_with_the_mi_asymmetry() {
    // coherence starts at 1 for the bare fermion, so look for the first interior
    // maximum after the early decay
    let (n, beta) = (12, 4.0);
    let ms = members(ModelKind::Syk, n, 2024, 3);
    let ts = grid(0.5, 0.5, 16);
    let curve = mi_curve(&ProtocolConfig::new(n, 4, beta, 0.2, Interaction::V), &ts, &ms).unwrap();
    let exs: Vec<_> = ms.iter().map(|(_, c)| ThermalFermionExpander::new(c, beta).unwrap()).collect();
    let coherence: Vec<f64> = ts
        .iter()
        .map(|&t| {
            exs.iter()
                .map(|ex| {
                    let d = ex.expand(Side::Left, 0, -t, ExpansionEngine::Fast).unwrap();
                    winding_fit(&d.p, &d.q).unwrap().coherence
                })
                .sum::<f64>()
                / exs.len() as f64
        })
        .collect();
    let a = (0..ts.len()).max_by(|&a, &b| curve.asymmetry[a].total_cmp(&curve.asymmetry[b])).unwrap();
    let b = (1..ts.len() - 1)
        .find(|&i| coherence[i] > coherence[i - 1] && coherence[i] >= coherence[i + 1])
        .unwrap_or_else(|| panic!("no interior maximum in {coherence:?}"));
    assert!(a.abs_diff(b) <= 1, "asymmetry peak t = {}, coherence peak t = {}", ts[a], ts[b]);
}

#[test]
fn lyapunov_exponent_decreases_with_beta() {
    let ms = members(ModelKind::Syk, 12, 7, 3);
    let ts = grid(0.0, 0.5, 21);
    let lambdas: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&beta| {
            let exs: Vec<_> = ms.iter().map(|(_, c)| ThermalFermionExpander::new(c, beta).unwrap()).collect();
            let series: Vec<(f64, f64)> = ts
                .iter()
                .map(|&t| {
                    let mean = exs
                        .iter()
                        .map(|ex| {
                            let d = ex.expand(Side::Left, 0, -t, ExpansionEngine::Fast).unwrap();
                            winding_fit(&d.p, &d.q).unwrap().slope
                        })
                        .sum::<f64>()
                        / exs.len() as f64;
                    (t, mean)
                })
                .collect();
            lyapunov_fit(&series, (2.0, 8.0)).unwrap().lambda
        })
        .collect();
    assert!(lambdas.windows(2).all(|w| w[1] < w[0]), "{lambdas:?}");
}

#[test]
fn ground_state_is_close_to_a_thermofield_double() {
    let c = &members(ModelKind::Syk, 8, 11, 1)[0].1;
    let betas: Vec<f64> = vec![0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0];
    for mu in [0.05, 0.1, 0.2, 0.3, 0.5] {
        let s = eternal_spectrum(c, Interaction::V, mu, 4).unwrap();
        let ob = optimal_beta(&s, c, &betas).unwrap();
        assert!(ob.overlap > 0.8 && ob.overlap <= 1.0 + 1e-12, "mu {mu}: {ob:?}");
    }
}
