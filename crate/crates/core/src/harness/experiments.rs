use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::json;

use super::{Cell, ExperimentConfig, ExperimentOutput, ResultTable};
use crate::error::{Error, Result};
use crate::eternal::{
    discrete_symmetries, eternal_hamiltonian, eternal_spectrum_with, figure_of_merit_at, fit_power_law,
    optimal_beta, SpectrumOptions,
};
use crate::fermion_algebra::Side;
use crate::models::{Couplings, Interaction, ModelKind};
use crate::observables::{mutual_information_rt, otoc_reported, tripartite_info, OtocEngine, TwoPointFunction};
use crate::size_winding::{apply_interaction_phase, lyapunov_fit, winding_fit, ExpansionEngine, ThermalFermionExpander};
use crate::states::MeasurePolicy;
use crate::teleport::{
    asymmetry_grid, mi_curve, warmup_mutual_information, warmup_rho_closed_form, Protocol, Register, Slice,
};

/// Run the experiment named in the config.
pub fn compute(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.experiment.as_str() {
        "mi-curve" => mi_curve_exp(cfg),
        "warmup" => warmup(cfg),
        "winding" => winding(cfg),
        "winding-summary" => winding_summary(cfg),
        "lyapunov" => lyapunov(cfg),
        "eternal" => eternal(cfg, Interaction::V),
        "eternal-vb" => eternal(cfg, Interaction::Vb),
        "causal" => causal(cfg),
        "classical" => classical(cfg),
        "tripartite" => tripartite(cfg),
        "otoc" => otoc(cfg),
        "pg-compare" => pg_compare(cfg),
        "twopoint" => twopoint(cfg),
        other => Err(Error::config("experiment", format!("unknown experiment `{other}`"))),
    }
}

fn output(series: ResultTable, summary: serde_json::Value) -> ExperimentOutput {
    ExperimentOutput {
        series,
        summary,
        extra: Vec::new(),
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

fn sem(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / ((n - 1) * n) as f64).sqrt()
}

fn argmax(xs: &[f64]) -> usize {
    // first maximum
    let mut best = 0;
    for (i, x) in xs.iter().enumerate() {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

fn mi_curve_exp(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let t = cfg.grid("t")?;
    let template = cfg.protocol(cfg.interaction()?)?;
    let members = cfg.members(cfg.model.unwrap_or(ModelKind::Syk))?;
    let curve = mi_curve(&template, &t, &members)?;
    let mut table = ResultTable::new(&["instantiation", "seed", "t", "mu", "i_rt"]);
    for p in &curve.points {
        table.push(vec![p.instantiation.into(), p.seed.into(), p.t.into(), p.mu.into(), p.i_rt.into()]);
    }
    let peak = argmax(&curve.asymmetry);
    Ok(output(
        table,
        json!({
            "t": curve.t,
            "mean_i_rt_neg_mu": curve.mean_neg,
            "mean_i_rt_pos_mu": curve.mean_pos,
            "asymmetry": curve.asymmetry,
            "asymmetry_sem": curve.asymmetry_sem,
            "peak_t": curve.t[peak],
            "peak_asymmetry": curve.asymmetry[peak],
            "peak_asymmetry_sem": curve.asymmetry_sem[peak],
        }),
    ))
}

fn warmup(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mus = cfg.grid("mu")?;
    let (t0, t1, beta) = (cfg.t0.unwrap_or(0.0), cfg.t1.unwrap_or(0.0), cfg.beta.unwrap_or(0.0));
    let interaction = cfg.interaction.unwrap_or(Interaction::V);
    let members = cfg.members(cfg.model.unwrap_or(ModelKind::Syk))?;
    let rows: Vec<Vec<(f64, f64, f64)>> = members
        .par_iter()
        .map(|(_, c)| {
            let p = Protocol::new(c, beta, interaction)?;
            mus.iter()
                .map(|&mu| {
                    let rho = p.correlator_rho(t0, t1, &[Slice { time: 0.0, mu }])?;
                    let want = warmup_rho_closed_form(mu);
                    let mut dev = 0.0f64;
                    for (r, c) in itertools::iproduct!(0..4, 0..4) {
                        dev = dev.max((rho.matrix()[(r, c)] - want[r][c]).norm());
                    }
                    Ok((mu, mutual_information_rt(&rho)?, dev))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut table = ResultTable::new(&["instantiation", "seed", "mu", "i_rt", "i_rt_closed_form", "rho_max_deviation"]);
    let mut worst = 0.0f64;
    for (k, ((seed, _), per)) in members.iter().zip(&rows).enumerate() {
        for &(mu, i, dev) in per {
            worst = worst.max(dev);
            table.push(vec![k.into(), (*seed).into(), mu.into(), i.into(), warmup_mutual_information(mu).into(), dev.into()]);
        }
    }
    Ok(output(
        table,
        json!({
            "t0": t0, "t1": t1, "beta": beta,
            "max_rho_deviation_from_closed_form": worst,
        }),
    ))
}

struct WindingPoint {
    before: crate::size_winding::SizeData,
    after: crate::size_winding::SizeData,
    right: crate::size_winding::SizeData,
}

/// Left fermion injected at `-t`, its image after the interaction with the
/// protocol coupling, and the right fermion at `t`.
fn winding_points(cfg: &ExperimentConfig, c: &Couplings, t_grid: &[f64], beta: f64) -> Result<Vec<WindingPoint>> {
    let kind = cfg.interaction.unwrap_or(Interaction::V);
    let mu = cfg.mu.unwrap_or(0.0);
    let j = cfg.fermion()?;
    let ex = ThermalFermionExpander::new(c, beta)?;
    t_grid
        .par_iter()
        .map(|&t| {
            let before = ex.expand(Side::Left, j, -t, ExpansionEngine::Fast)?.with_measure(kind);
            let after = apply_interaction_phase(&before, mu, kind)?;
            let right = ex.expand(Side::Right, j, t, ExpansionEngine::Fast)?.with_measure(kind);
            Ok(WindingPoint { before, after, right })
        })
        .collect()
}

fn winding(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let t = cfg.grid("t")?;
    let beta = cfg.beta()?;
    cfg.mu()?;
    let members = cfg.members(cfg.model.unwrap_or(ModelKind::Syk))?;
    let mut table = ResultTable::new(&["instantiation", "seed", "t", "stage", "size", "p", "q_re", "q_im"]);
    let mut fits = Vec::new();
    for (k, (seed, c)) in members.iter().enumerate() {
        let pts = winding_points(cfg, c, &t, beta)?;
        for (&tt, wp) in t.iter().zip(&pts) {
            let mut fit_row = json!({ "instantiation": k, "t": tt });
            for (stage, d) in [("before", &wp.before), ("after", &wp.after), ("right", &wp.right)] {
                for (s, p, re, im) in d.rows() {
                    table.push(vec![k.into(), (*seed).into(), tt.into(), stage.into(), s.into(), p.into(), re.into(), im.into()]);
                }
                let f = winding_fit(&d.p, &d.q)?;
                fit_row[stage] = json!({ "slope": f.slope, "coherence": f.coherence, "weighted_r2": f.weighted_r2 });
            }
            fits.push(fit_row);
        }
    }
    Ok(output(table, json!({ "fits": fits })))
}

fn winding_summary(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let t = cfg.grid("t")?;
    let beta = cfg.beta()?;
    let mu = cfg.mu()?;
    let model = cfg.model.unwrap_or(ModelKind::Syk);
    let members = cfg.members(model)?;
    let mut table = ResultTable::new(&[
        "instantiation",
        "seed",
        "t",
        "slope_before",
        "slope_after",
        "slope_right",
        "coherence_before",
        "size_mean",
        "size_std",
    ]);
    for (k, (seed, c)) in members.iter().enumerate() {
        for (&tt, wp) in t.iter().zip(winding_points(cfg, c, &t, beta)?) {
            let fb = winding_fit(&wp.before.p, &wp.before.q)?;
            let fa = winding_fit(&wp.after.p, &wp.after.q)?;
            let fr = winding_fit(&wp.right.p, &wp.right.q)?;
            let (m, sd) = wp.before.size_moments();
            table.push(vec![
                k.into(),
                (*seed).into(),
                tt.into(),
                fb.slope.into(),
                fa.slope.into(),
                fr.slope.into(),
                fb.coherence.into(),
                m.into(),
                sd.into(),
            ]);
        }
    }
    let template = cfg.protocol(cfg.interaction.unwrap_or(Interaction::V))?;
    let curve = mi_curve(&template, &t, &members)?;
    let nt = t.len();
    let col = |i: usize| -> Vec<f64> {
        (0..nt)
            .map(|ti| {
                let xs: Vec<f64> = table
                    .rows
                    .iter()
                    .skip(ti)
                    .step_by(nt)
                    .map(|r| match r[i] {
                        Cell::Float(x) => x,
                        _ => f64::NAN,
                    })
                    .collect();
                mean(&xs)
            })
            .collect()
    };
    let summary = json!({
        "t": t,
        "mu": mu,
        "mean_slope_before": col(3),
        "mean_slope_after": col(4),
        "mean_slope_right": col(5),
        "mean_coherence_before": col(6),
        "mi_asymmetry": curve.asymmetry,
        "mi_asymmetry_sem": curve.asymmetry_sem,
        "mi_peak_t": t[argmax(&curve.asymmetry)],
    });
    Ok(output(table, summary))
}

fn lyapunov(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let betas = cfg.grid("beta")?;
    let t = cfg.grid("t")?;
    let window = cfg.fit_window.unwrap_or([2.0, 8.0]);
    let j = cfg.fermion()?;
    let members = cfg.members(cfg.model.unwrap_or(ModelKind::Syk))?;
    let mut table = ResultTable::new(&["beta", "instantiation", "seed", "t", "slope"]);
    let mut fits = Vec::new();
    for &beta in &betas {
        let per: Vec<Vec<f64>> = members
            .par_iter()
            .map(|(_, c)| {
                let ex = ThermalFermionExpander::new(c, beta)?;
                t.iter()
                    .map(|&tt| {
                        let d = ex.expand(Side::Left, j, -tt, ExpansionEngine::Fast)?;
                        Ok(winding_fit(&d.p, &d.q)?.slope)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (k, ((seed, _), slopes)) in members.iter().zip(&per).enumerate() {
            for (&tt, &s) in t.iter().zip(slopes) {
                table.push(vec![beta.into(), k.into(), (*seed).into(), tt.into(), s.into()]);
            }
        }
        let series: Vec<(f64, f64)> = t
            .iter()
            .enumerate()
            .map(|(i, &tt)| (tt, mean(&per.iter().map(|s| s[i]).collect::<Vec<_>>())))
            .collect();
        let fit = lyapunov_fit(&series, (window[0], window[1]))?;
        fits.push(json!({
            "beta": beta,
            "lambda": fit.lambda,
            "bound_2pi_over_beta": 2.0 * PI / beta,
            "r2": fit.r2,
            "n_points": fit.n_points,
        }));
    }
    Ok(output(table, json!({ "window": window, "fits": fits })))
}

fn eternal(cfg: &ExperimentConfig, kind: Interaction) -> Result<ExperimentOutput> {
    let mus = cfg.grid("mu")?;
    let betas = cfg.grid("beta")?;
    let levels = cfg.levels.unwrap_or(8);
    let fit_max = cfg.fit_mu_max.unwrap_or(0.3);
    let members = cfg.members(cfg.model.unwrap_or(ModelKind::Syk))?;
    let opts = SpectrumOptions::default();
    struct Point {
        e0: f64,
        gap: f64,
        degeneracy: usize,
        beta_star: f64,
        overlap: f64,
        on_boundary: bool,
        fom: f64,
        eigenvalues: Vec<f64>,
    }
    let cells: Vec<(usize, usize)> = itertools::iproduct!(0..members.len(), 0..mus.len()).collect();
    let points: Vec<Point> = cells
        .par_iter()
        .map(|&(k, m)| {
            let c = &members[k].1;
            let h = eternal_hamiltonian(c, kind, mus[m])?;
            let spec = eternal_spectrum_with(c, kind, mus[m], levels, &opts)?;
            let ob = optimal_beta(&spec, c, &betas)?;
            let fom = figure_of_merit_at(&h, spec.e0, c, ob.beta)?;
            Ok(Point {
                e0: spec.e0,
                gap: spec.gap,
                degeneracy: spec.ground_degeneracy,
                beta_star: ob.beta,
                overlap: ob.overlap,
                on_boundary: ob.on_boundary,
                fom,
                eigenvalues: spec.eigenvalues.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let mut table = ResultTable::new(&[
        "instantiation",
        "seed",
        "mu",
        "e0",
        "gap",
        "ground_degeneracy",
        "beta_star",
        "overlap",
        "beta_star_on_boundary",
        "figure_of_merit",
    ]);
    let mut spectra = ResultTable::new(&["instantiation", "seed", "mu", "level", "energy"]);
    for (&(k, m), p) in cells.iter().zip(&points) {
        let seed = members[k].0;
        table.push(vec![
            k.into(),
            seed.into(),
            mus[m].into(),
            p.e0.into(),
            p.gap.into(),
            p.degeneracy.into(),
            p.beta_star.into(),
            p.overlap.into(),
            p.on_boundary.into(),
            p.fom.into(),
        ]);
        for (l, e) in p.eigenvalues.iter().enumerate() {
            spectra.push(vec![k.into(), seed.into(), mus[m].into(), l.into(), (*e).into()]);
        }
    }
    let per_mu = |f: &dyn Fn(&Point) -> f64| -> Vec<f64> {
        (0..mus.len())
            .map(|m| mean(&cells.iter().zip(&points).filter(|(c, _)| c.1 == m).map(|(_, p)| f(p)).collect::<Vec<_>>()))
            .collect()
    };
    let mean_gap = per_mu(&|p| p.gap);
    let (fm, fg): (Vec<f64>, Vec<f64>) = mus.iter().zip(&mean_gap).filter(|(m, _)| **m < fit_max).unzip();
    // a failed fit is reported, the spectra are still written
    let fit = match fit_power_law(&fm, &fg) {
        Ok(f) => {
            json!({ "a": f.a, "b": f.b, "c": f.c, "b_interval": [f.b_interval.0, f.b_interval.1], "rss": f.rss, "mu_max": fit_max })
        }
        Err(e) => json!({ "error": e.to_string(), "mu_max": fit_max }),
    };
    let sym_mu = cfg.mu.unwrap_or(*mus.last().unwrap());
    let symmetry = discrete_symmetries(&members[0].1, kind, sym_mu)?;
    Ok(ExperimentOutput {
        series: table,
        summary: json!({
            "interaction": kind,
            "mu": mus,
            "mean_gap": mean_gap,
            "mean_e0": per_mu(&|p| p.e0),
            "mean_beta_star": per_mu(&|p| p.beta_star),
            "mean_overlap": per_mu(&|p| p.overlap),
            "mean_figure_of_merit": per_mu(&|p| p.fom),
            "gap_power_law": fit,
            "symmetry": { "mu": sym_mu, "report": symmetry, "all_claims_hold": symmetry.all_claims_hold() },
        }),
        extra: vec![("spectra.csv".to_string(), spectra)],
    })
}

fn causal(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let t0 = cfg.grid("t0")?;
    let t1 = cfg.grid("t1")?;
    let template = cfg.protocol(cfg.interaction()?)?;
    // every slice must lie inside [-t0, t1] at every grid point
    template.clone().with_times(t0[0], t1[0]).validate().map_err(|e| Error::config("schedule", e.to_string()))?;
    let members = cfg.members(cfg.model.unwrap_or(ModelKind::Syk))?;
    let protocols: Vec<Protocol> = members
        .iter()
        .map(|(_, c)| Protocol::new(c, template.beta, template.interaction))
        .collect::<Result<_>>()?;
    let grid = asymmetry_grid(&template, template.mu.abs(), &t0, &t1, &protocols)?;
    let mut table = ResultTable::new(&["t0", "t1", "asymmetry", "is_argmax"]);
    let mut best = Vec::new();
    for (i, row) in grid.iter().enumerate() {
        let b = argmax(row);
        best.push(json!({ "t0": t0[i], "best_t1": t1[b], "max_asymmetry": row[b] }));
        for (k, a) in row.iter().enumerate() {
            table.push(vec![t0[i].into(), t1[k].into(), (*a).into(), (k == b).into()]);
        }
    }
    Ok(output(table, json!({ "schedule": template.effective_schedule(), "argmax": best })))
}

fn classical(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let t = cfg.grid("t")?;
    if cfg.interaction()? != Interaction::Vb {
        return Err(Error::config("interaction", "the classical channel needs Vb"));
    }
    let beta = cfg.beta()?;
    let mu = cfg.mu()?.abs();
    let members = cfg.members(cfg.model.unwrap_or(ModelKind::Syk))?;
    let mut table = ResultTable::new(&["instantiation", "seed", "t", "mu", "channel", "outcome", "probability", "i_rt"]);
    let mut checks = Vec::new();
    for (k, (seed, c)) in members.iter().enumerate() {
        let p = Protocol::new(c, beta, Interaction::Vb)?;
        let cells: Vec<(f64, f64)> = itertools::iproduct!(t.iter().copied(), [-mu, mu]).collect();
        let results: Vec<_> = cells
            .par_iter()
            .map(|&(tt, m)| {
                let quantum = p.full_register_rho(tt, tt, &[Slice { time: 0.0, mu: m }])?;
                let outcomes = p.classical(tt, tt, m, MeasurePolicy::Enumerate)?;
                Ok((quantum, outcomes))
            })
            .collect::<Result<_>>()?;
        for (&(tt, m), (quantum, outcomes)) in cells.iter().zip(&results) {
            let iq = mutual_information_rt(quantum)?;
            table.push(vec![k.into(), (*seed).into(), tt.into(), m.into(), "quantum".into(), Cell::Text(String::new()), 1.0.into(), iq.into()]);
            let mut mix = nalgebra::DMatrix::zeros(4, 4);
            let (mut above, mut below) = (0, 0);
            for o in outcomes {
                mix += o.rho_tr.matrix() * num_complex::Complex64::new(o.probability, 0.0);
                above += (o.i_rt > iq) as usize;
                below += (o.i_rt < iq) as usize;
                table.push(vec![
                    k.into(),
                    (*seed).into(),
                    tt.into(),
                    m.into(),
                    "classical".into(),
                    Cell::Text(format!("{:0w$b}", o.bits, w = cfg.n / 2)),
                    o.probability.into(),
                    o.i_rt.into(),
                ]);
            }
            let dev = (mix - quantum.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            checks.push(json!({
                "instantiation": k, "t": tt, "mu": m, "quantum_i_rt": iq,
                "outcomes_above": above, "outcomes_below": below,
                "mixture_max_deviation": dev,
            }));
        }
    }
    Ok(output(table, json!({ "points": checks })))
}

fn tripartite(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let t = cfg.grid("t")?;
    let beta = cfg.beta()?;
    let mu = cfg.mu()?.abs();
    let interaction = cfg.interaction()?;
    let members = cfg.members(cfg.model.unwrap_or(ModelKind::Syk))?;
    let reg = Register { n: cfg.n };
    let mut table = ResultTable::new(&["instantiation", "seed", "t", "mu", "i_rt", "i_rl", "i_rlt", "i3"]);
    for (k, (seed, c)) in members.iter().enumerate() {
        let p = Protocol::new(c, beta, interaction)?;
        let cells: Vec<(f64, f64)> = itertools::iproduct!(t.iter().copied(), [-mu, mu]).collect();
        let recs: Vec<_> = cells
            .par_iter()
            .map(|&(tt, m)| {
                let psi = p.full_register_state(tt, tt, &[Slice { time: 0.0, mu: m }])?;
                tripartite_info(&psi, &[Register::R], &reg.left_block(), &[reg.t()])
            })
            .collect::<Result<_>>()?;
        for (&(tt, m), r) in cells.iter().zip(&recs) {
            table.push(vec![
                k.into(),
                (*seed).into(),
                tt.into(),
                m.into(),
                r.i_rt.into(),
                r.i_rl.into(),
                r.i_rlt.into(),
                r.i3.into(),
            ]);
        }
    }
    let min_i3 = table
        .rows
        .iter()
        .map(|r| match r[7] {
            Cell::Float(x) => x,
            _ => 0.0,
        })
        .fold(f64::INFINITY, f64::min);
    Ok(output(table, json!({ "l_subsystem": "left SYK block", "min_i3": min_i3 })))
}

fn otoc(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let t = cfg.grid("t")?;
    let beta = cfg.beta()?;
    let mu = cfg.mu()?.abs();
    let t_r = need_t_right(cfg)?;
    let j = cfg.fermion()?;
    let interaction = cfg.interaction()?;
    let members = cfg.members(cfg.model.unwrap_or(ModelKind::Syk))?;
    let cells: Vec<(usize, f64)> = itertools::iproduct!(0..members.len(), [-mu, mu]).collect();
    let rows: Vec<Vec<(f64, num_complex::Complex64)>> = cells
        .par_iter()
        .map(|&(k, m)| {
            let e = OtocEngine::new(&members[k].1, interaction, m, j, beta)?;
            t.iter().map(|&tl| Ok((tl, e.h(tl, t_r)?))).collect()
        })
        .collect::<Result<_>>()?;
    let mut table = ResultTable::new(&["instantiation", "seed", "mu", "t_left", "t_right", "h_re", "h_im", "c", "reported"]);
    let mut sums = [vec![0.0; t.len()], vec![0.0; t.len()]];
    for (&(k, m), per) in cells.iter().zip(&rows) {
        for (i, &(tl, h)) in per.iter().enumerate() {
            let rep = otoc_reported(h, m);
            sums[(m > 0.0) as usize][i] += rep / members.len() as f64;
            table.push(vec![
                k.into(),
                members[k].0.into(),
                m.into(),
                tl.into(),
                t_r.into(),
                h.re.into(),
                h.im.into(),
                (-2.0 * h.im).into(),
                rep.into(),
            ]);
        }
    }
    Ok(output(
        table,
        json!({ "t_left": t, "t_right": t_r, "mean_reported_neg_mu": sums[0], "mean_reported_pos_mu": sums[1] }),
    ))
}

fn need_t_right(cfg: &ExperimentConfig) -> Result<f64> {
    cfg.t_right.ok_or_else(|| Error::config("t_right", "required for this experiment"))
}

fn pg_compare(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let t1 = cfg.grid("t1")?;
    let beta = cfg.beta()?;
    let mu = cfg.mu()?.abs();
    let t0 = cfg.t0()?;
    let interaction = cfg.interaction()?;
    let models = match cfg.model {
        Some(m) => vec![m],
        None => vec![ModelKind::Syk, ModelKind::PgCommuting],
    };
    let mut table = ResultTable::new(&["model", "instantiation", "seed", "t1", "mu", "i_rt"]);
    let mut summary = serde_json::Map::new();
    for model in models {
        let members = cfg.members(model)?;
        let per: Vec<Vec<(f64, f64, f64)>> = members
            .par_iter()
            .map(|(_, c)| {
                let p = Protocol::new(c, beta, interaction)?;
                itertools::iproduct!(t1.iter().copied(), [-mu, mu])
                    .map(|(tt, m)| Ok((tt, m, mutual_information_rt(&p.correlator_rho(t0, tt, &[Slice { time: 0.0, mu: m }])?)?)))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let name = match model {
            ModelKind::Syk => "syk",
            ModelKind::PgCommuting => "pg",
        };
        let mut mean_neg = vec![0.0; t1.len()];
        let mut mean_pos = vec![0.0; t1.len()];
        for (k, ((seed, _), rows)) in members.iter().zip(&per).enumerate() {
            for (i, &(tt, m, v)) in rows.iter().enumerate() {
                let acc = if m < 0.0 { &mut mean_neg } else { &mut mean_pos };
                acc[i / 2] += v / members.len() as f64;
                table.push(vec![name.into(), k.into(), (*seed).into(), tt.into(), m.into(), v.into()]);
            }
        }
        summary.insert(name.to_string(), json!({ "t1": t1, "mean_i_rt_neg_mu": mean_neg, "mean_i_rt_pos_mu": mean_pos }));
    }
    summary.insert("t0".to_string(), json!(t0));
    Ok(output(table, serde_json::Value::Object(summary)))
}

fn twopoint(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let taus = cfg.grid("tau")?;
    let beta = cfg.beta()?;
    let j = cfg.fermion()?;
    let model = cfg.model.unwrap_or(ModelKind::PgCommuting);
    let members = cfg.members(model)?;
    let per: Vec<Vec<f64>> = members
        .par_iter()
        .map(|(_, c)| {
            let g = TwoPointFunction::new(c, j, beta)?;
            taus.iter().map(|&tau| g.at(tau)).collect()
        })
        .collect::<Result<_>>()?;
    let closed = |tau: f64| (-cfg.scale * cfg.scale * tau * (beta - tau)).exp();
    let mut table = ResultTable::new(&["instantiation", "seed", "tau", "g", "closed_form"]);
    for (k, ((seed, _), gs)) in members.iter().zip(&per).enumerate() {
        for (&tau, &g) in taus.iter().zip(gs) {
            table.push(vec![k.into(), (*seed).into(), tau.into(), g.into(), closed(tau).into()]);
        }
    }
    let stats: Vec<_> = taus
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            let xs: Vec<f64> = per.iter().map(|g| g[i]).collect();
            json!({ "tau": tau, "mean": mean(&xs), "sem": sem(&xs), "closed_form": closed(tau) })
        })
        .collect();
    Ok(output(table, json!({ "model": model, "points": stats })))
}
