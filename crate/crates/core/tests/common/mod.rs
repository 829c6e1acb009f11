//! Computations shared by the acceptance runner and the literal-claim tests.
#![allow(dead_code)]

use whlab::eternal::{eternal_spectrum, fit_power_law, PowerLawFit};
use whlab::fermion_algebra::{gamma_string, GammaIndex, Side};
use whlab::models::{build_interaction, sample, Couplings, EnsembleSpec, Interaction, ModelKind};
use whlab::size_winding::{apply_interaction_phase, size_of, winding_fit, ExpansionEngine, SizeBasis, ThermalFermionExpander};
use whlab::teleport::{mi_curve, ProtocolConfig};

pub fn members(model: ModelKind, n: usize, master: u64, count: usize) -> Vec<(u64, Couplings)> {
    EnsembleSpec::new(master, count)
        .seeds()
        .map(|s| (s, sample(model, n, 4, 1.0, s).unwrap()))
        .collect()
}

pub fn grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + step * i as f64).collect()
}

/// `<I| Gamma_J W Gamma_J |I>` for every left string `J` at `n`, with its mask.
pub fn size_expectations(n: usize, kind: Interaction) -> Vec<(u64, f64)> {
    let basis = SizeBasis::new(n).unwrap();
    let w = build_interaction(kind, n).unwrap();
    (0..1u64 << n)
        .map(|mask| {
            let g = gamma_string(&GammaIndex::from_mask(Side::Left, mask, n).unwrap(), n).unwrap();
            let state = g.apply(basis.reference()).unwrap();
            let e = state.inner(&w.apply(&state).unwrap()).unwrap();
            assert!(e.im.abs() < 1e-12);
            (mask, e.re)
        })
        .collect()
}

/// Largest deviation of `<V^b>` from `s2 - N/2` over all strings at `N = 6`.
pub fn vb_literal_deviation() -> f64 {
    size_expectations(6, Interaction::Vb)
        .into_iter()
        .map(|(m, e)| (e - (size_of(m, Interaction::Vb) as f64 - 3.0)).abs())
        .fold(0.0, f64::max)
}

pub struct WindingAtPeak {
    pub t_peak: f64,
    pub slope_before: f64,
    pub slope_after: f64,
    pub coherence: f64,
    pub coherence_beta0: f64,
}

/// N = 12, q = 4, beta = 4, mu = -0.2: winding before and after the
/// interaction at the time where the MI asymmetry of this instantiation peaks.
pub fn winding_at_peak() -> WindingAtPeak {
    let (n, beta, mu) = (12, 4.0, -0.2);
    let ms = members(ModelKind::Syk, n, 2024, 1);
    let c = &ms[0].1;
    let ts = grid(1.0, 0.25, 17);
    let curve = mi_curve(&ProtocolConfig::new(n, 4, beta, mu, Interaction::V), &ts, &ms).unwrap();
    let peak = (0..ts.len())
        .max_by(|&a, &b| curve.asymmetry[a].total_cmp(&curve.asymmetry[b]))
        .unwrap();
    let t = ts[peak];
    let before = ThermalFermionExpander::new(c, beta)
        .unwrap()
        .expand(Side::Left, 0, -t, ExpansionEngine::Fast)
        .unwrap();
    let after = apply_interaction_phase(&before, mu, Interaction::V).unwrap();
    let hot = ThermalFermionExpander::new(c, 0.0)
        .unwrap()
        .expand(Side::Left, 0, -t, ExpansionEngine::Fast)
        .unwrap();
    let fb = winding_fit(&before.p, &before.q).unwrap();
    let fa = winding_fit(&after.p, &after.q).unwrap();
    WindingAtPeak {
        t_peak: t,
        slope_before: fb.slope,
        slope_after: fa.slope,
        coherence: fa.coherence,
        coherence_beta0: winding_fit(&hot.p, &hot.q).unwrap().coherence,
    }
}

pub struct GapStudy {
    pub mu: Vec<f64>,
    pub mean_gap: Vec<f64>,
    pub gap_sem_at_03: f64,
    pub unique_ground_at_03: bool,
    pub fit: PowerLawFit,
}

/// N = 10, q = 4, V, 10 instantiations: gaps on a mu grid and the power law
/// fitted to the ensemble-mean gap over mu < 0.3.
pub fn gap_study() -> GapStudy {
    use rayon::prelude::*;
    let mu: Vec<f64> = vec![0.04, 0.08, 0.12, 0.16, 0.2, 0.24, 0.28, 0.3];
    let ms = members(ModelKind::Syk, 10, 11, 10);
    let spectra: Vec<Vec<(f64, usize)>> = ms
        .par_iter()
        .map(|(_, c)| {
            mu.iter()
                .map(|&m| {
                    let s = eternal_spectrum(c, Interaction::V, m, 8).unwrap();
                    (s.gap, s.ground_degeneracy)
                })
                .collect()
        })
        .collect();
    let k = mu.len();
    let mean_gap: Vec<f64> = (0..k).map(|i| spectra.iter().map(|s| s[i].0).sum::<f64>() / ms.len() as f64).collect();
    let at03: Vec<f64> = spectra.iter().map(|s| s[k - 1].0).collect();
    let m = mean_gap[k - 1];
    let var = at03.iter().map(|g| (g - m).powi(2)).sum::<f64>() / (at03.len() - 1) as f64;
    let (fm, fg): (Vec<f64>, Vec<f64>) = mu.iter().zip(&mean_gap).filter(|(m, _)| **m < 0.3).unzip();
    GapStudy {
        gap_sem_at_03: (var / at03.len() as f64).sqrt(),
        unique_ground_at_03: spectra.iter().all(|s| s[k - 1].1 == 1),
        fit: fit_power_law(&fm, &fg).unwrap(),
        mu,
        mean_gap,
    }
}
