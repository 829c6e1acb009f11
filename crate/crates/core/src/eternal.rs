//! Spectra of `H_L + H_R + mu V` (and the `V^b` variant): gap, power-law
//! fit, overlap with the thermofield double, the SL(2,R) figure of merit
//! and discrete symmetries.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion_algebra::{gamma_string, GammaIndex, OperatorSum, PauliString, PauliTerm, Side};
use crate::linalg::{dot, eigh, lanczos_lowest, LanczosOptions, SparsePauliOperator};
use crate::models::{build_interaction, Couplings, Interaction};
use crate::states::{thermofield_double_with, EvolveOptions, StateVector};

/// Eigenvalues closer than this belong to one multiplet.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    /// Dense eigendecomposition up to this many qubits, Lanczos above.
    pub dense_max_qubits: usize,
    pub lanczos: LanczosOptions,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            dense_max_qubits: 8,
            lanczos: LanczosOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub e0: f64,
    /// From the ground multiplet to the next distinct level.
    pub gap: f64,
    pub ground_degeneracy: usize,
    /// Orthonormal basis of the ground multiplet.
    pub ground_states: Vec<StateVector>,
}

impl SpectrumResult {
    pub fn ground_state(&self) -> &StateVector {
        &self.ground_states[0]
    }

    /// `|P_G psi|`, the overlap with the ground multiplet.
    pub fn ground_overlap(&self, psi: &StateVector) -> Result<f64> {
        let mut s = 0.0;
        for g in &self.ground_states {
            s += g.inner(psi)?.norm_sqr();
        }
        Ok(s.sqrt())
    }

    /// Distinct levels as `(energy, multiplicity)`.
    pub fn levels(&self) -> Vec<(f64, usize)> {
        cluster(&self.eigenvalues)
    }
}

fn cluster(values: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &v in values {
        match out.last_mut() {
            Some((_, m)) if v - last <= CLUSTER_TOL => *m += 1,
            _ => out.push((v, 1)),
        }
        last = v;
    }
    out
}

pub fn eternal_hamiltonian(couplings: &Couplings, kind: Interaction, mu: f64) -> Result<OperatorSum> {
    let n = couplings.n;
    let h = couplings.hamiltonian(Side::Left)?.add(&couplings.hamiltonian(Side::Right)?)?;
    h.add(&build_interaction(kind, n)?.scale(Complex64::new(mu, 0.0)))
}

/// Lowest `k` levels of an `N`-qubit Hermitian Pauli sum.
pub fn lowest_spectrum(h: &OperatorSum, k: usize, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    if k < 2 {
        return Err(Error::invalid(format!("need k >= 2 eigenvalues, got {k}")));
    }
    let n = h.n_qubits();
    let dim = 1usize << n;
    let k = k.min(dim);
    let (values, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = if n <= opts.dense_max_qubits {
        let e = eigh(h.to_dense());
        let vecs = (0..k).map(|c| e.vectors.column(c).iter().copied().collect()).collect();
        (e.values[..k].to_vec(), vecs)
    } else {
        lanczos_lowest(&SparsePauliOperator::new(h), k, &opts.lanczos)?
    };
    let levels = cluster(&values);
    let ground_degeneracy = levels[0].1;
    let gap = match levels.get(1) {
        Some((e, _)) => e - levels[0].0,
        None => {
            return Err(Error::invalid(format!(
                "all {k} computed eigenvalues are degenerate; request more to resolve the gap"
            )))
        }
    };
    let ground_states = vectors[..ground_degeneracy]
        .iter()
        .map(|v| StateVector::new(n, v.clone()))
        .collect::<Result<_>>()?;
    Ok(SpectrumResult {
        e0: values[0],
        eigenvalues: values,
        gap,
        ground_degeneracy,
        ground_states,
    })
}

/// `mu > 0` here corresponds to a negative protocol coupling.
pub fn eternal_spectrum(couplings: &Couplings, kind: Interaction, mu: f64, k: usize) -> Result<SpectrumResult> {
    eternal_spectrum_with(couplings, kind, mu, k, &SpectrumOptions::default())
}

pub fn eternal_spectrum_with(
    couplings: &Couplings,
    kind: Interaction,
    mu: f64,
    k: usize,
    opts: &SpectrumOptions,
) -> Result<SpectrumResult> {
    lowest_spectrum(&eternal_hamiltonian(couplings, kind, mu)?, k, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// 95% profile interval for `b`.
    pub b_interval: (f64, f64),
    pub rss: f64,
}

const B_RANGE: (f64, f64) = (0.05, 3.0);

/// For fixed `b`, `(a, c, rss)` from linear least squares.
fn profile(mu: &[f64], e: &[f64], b: f64) -> (f64, f64, f64) {
    let n = mu.len() as f64;
    let x: Vec<f64> = mu.iter().map(|m| m.powf(b)).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = e.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(e).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = sxy / sxx;
    let c = my - a * mx;
    let rss = x.iter().zip(e).map(|(x, y)| (y - a * x - c).powi(2)).sum();
    (a, c, rss)
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) / 2.0
}

/// Fit `gap = a mu^b + c`; `b` is profiled (grid plus golden section),
/// `a` and `c` are linear given `b`.
pub fn fit_power_law(mu: &[f64], gap: &[f64]) -> Result<PowerLawFit> {
    if mu.len() != gap.len() {
        return Err(Error::SizeMismatch {
            expected: mu.len(),
            got: gap.len(),
        });
    }
    if mu.len() < 4 {
        return Err(Error::FitFailed(format!("{} points; need at least 4", mu.len())));
    }
    if mu.iter().any(|m| !(*m > 0.0)) {
        return Err(Error::FitFailed("mu values must be positive".into()));
    }
    let rss = |b: f64| profile(mu, gap, b).2;
    let steps = 296;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| B_RANGE.0 + (B_RANGE.1 - B_RANGE.0) * i as f64 / steps as f64)
        .collect();
    let best = (0..grid.len()).min_by(|&i, &j| rss(grid[i]).total_cmp(&rss(grid[j]))).unwrap();
    if best == 0 || best == grid.len() - 1 {
        return Err(Error::FitFailed(format!("exponent at the search boundary b = {}", grid[best])));
    }
    let b = golden_min(rss, grid[best - 1], grid[best + 1], 1e-12);
    let (a, c, rss_min) = profile(mu, gap, b);
    // 95% interval: rss(b') - rss_min <= 3.84 sigma^2
    let dof = (mu.len() - 3).max(1) as f64;
    let sigma2 = (rss_min / dof).max(f64::MIN_POSITIVE);
    let thresh = rss_min + 3.84 * sigma2;
    let edge = |mut inside: f64, mut outside: f64| {
        if rss(outside) <= thresh {
            return outside;
        }
        for _ in 0..100 {
            let mid = 0.5 * (inside + outside);
            if rss(mid) <= thresh {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    Ok(PowerLawFit {
        a,
        b,
        c,
        b_interval: (edge(b, B_RANGE.0), edge(b, B_RANGE.1)),
        rss: rss_min,
    })
}

/// Gap at each `mu`, then the power-law fit over `mu < fit_max`.
pub fn gap_power_law(
    couplings: &Couplings,
    kind: Interaction,
    mu_grid: &[f64],
    fit_max: f64,
) -> Result<(Vec<f64>, PowerLawFit)> {
    let gaps = mu_grid
        .iter()
        .map(|&mu| Ok(eternal_spectrum(couplings, kind, mu, 8)?.gap))
        .collect::<Result<Vec<f64>>>()?;
    let (m, g): (Vec<f64>, Vec<f64>) = mu_grid.iter().zip(&gaps).filter(|(m, _)| **m < fit_max).unzip();
    Ok((gaps, fit_power_law(&m, &g)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalBeta {
    pub beta: f64,
    pub overlap: f64,
    /// The grid maximum sat on the first or last grid point.
    pub on_boundary: bool,
}

/// Maximize `|P_G tfd(beta)|` over the grid, refined by golden section.
pub fn optimal_beta(spectrum: &SpectrumResult, couplings: &Couplings, beta_grid: &[f64]) -> Result<OptimalBeta> {
    if beta_grid.len() < 3 || beta_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("beta grid needs at least 3 strictly increasing values"));
    }
    let h_l = couplings.hamiltonian(Side::Left)?;
    let opts = EvolveOptions::default();
    let overlap = |beta: f64| -> Result<f64> { spectrum.ground_overlap(&thermofield_double_with(&h_l, beta, opts)?) };
    let values = beta_grid.iter().map(|&b| overlap(b)).collect::<Result<Vec<f64>>>()?;
    let best = (0..values.len()).max_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
    if best == 0 || best == values.len() - 1 {
        return Ok(OptimalBeta {
            beta: beta_grid[best],
            overlap: values[best],
            on_boundary: true,
        });
    }
    let beta = golden_min(
        |b| overlap(b).map(|o| -o).unwrap_or(f64::INFINITY),
        beta_grid[best - 1],
        beta_grid[best + 1],
        1e-6,
    );
    let o = overlap(beta)?;
    let (beta, o) = if o >= values[best] { (beta, o) } else { (beta_grid[best], values[best]) };
    Ok(OptimalBeta {
        beta,
        overlap: o,
        on_boundary: false,
    })
}

/// `<tfd|(H_eternal - E0)|tfd> / |E0|`.
pub fn sl2r_figure_of_merit(couplings: &Couplings, kind: Interaction, mu: f64, beta: f64) -> Result<f64> {
    let spec = eternal_spectrum(couplings, kind, mu, 8)?;
    figure_of_merit_at(&eternal_hamiltonian(couplings, kind, mu)?, spec.e0, couplings, beta)
}

pub fn figure_of_merit_at(h: &OperatorSum, e0: f64, couplings: &Couplings, beta: f64) -> Result<f64> {
    if e0 == 0.0 {
        return Err(Error::invalid("ground energy is zero; the figure of merit is undefined"));
    }
    let tfd = thermofield_double_with(&couplings.hamiltonian(Side::Left)?, beta, EvolveOptions::default())?;
    let e = dot(tfd.amplitudes(), h.apply(&tfd)?.amplitudes()).re;
    Ok((e - e0) / e0.abs())
}

pub struct Sl2rGenerators {
    pub boost: OperatorSum,
    pub global_time: OperatorSum,
    pub p_plus: OperatorSum,
    pub p_minus: OperatorSum,
}

impl Sl2rGenerators {
    /// `||B |psi>||`.
    pub fn boost_residual(&self, psi: &StateVector) -> Result<f64> {
        Ok(self.boost.apply(psi)?.norm())
    }
}

/// `B = H_R - H_L`, `E = H_L + H_R - mu V - E0`, `P_pm = -(E +- B)/2`, with
/// `mu` the protocol coupling.
pub fn sl2r_generators(couplings: &Couplings, mu: f64, e0: f64) -> Result<Sl2rGenerators> {
    let n = couplings.n;
    let h_l = couplings.hamiltonian(Side::Left)?;
    let h_r = couplings.hamiltonian(Side::Right)?;
    let boost = h_r.sub(&h_l)?;
    let global_time = h_l
        .add(&h_r)?
        .sub(&build_interaction(Interaction::V, n)?.scale(Complex64::new(mu, 0.0)))?
        .sub(&OperatorSum::identity(n).scale(Complex64::new(e0, 0.0)))?;
    let half = Complex64::new(-0.5, 0.0);
    Ok(Sl2rGenerators {
        p_plus: global_time.add(&boost)?.scale(half),
        p_minus: global_time.sub(&boost)?.scale(half),
        boost,
        global_time,
    })
}

/// `Q = exp(i pi V / 2)` as the product of commuting Clifford rotations
/// `(1 + i s_j S_j)/sqrt(2)`, where `V = sum_j (s_j/2) S_j`.
#[derive(Clone, Debug)]
pub struct QOperator {
    n: usize,
    rotations: Vec<(f64, PauliString)>,
}

impl QOperator {
    pub fn new(n: usize) -> Result<Self> {
        let v = build_interaction(Interaction::V, n)?;
        let rotations = v
            .terms()
            .iter()
            .map(|(s, c)| {
                if c.im.abs() > 0.0 || (c.re.abs() - 0.5).abs() > 0.0 {
                    return Err(Error::invalid(format!("unexpected V coefficient {c}")));
                }
                Ok((c.re.signum(), *s))
            })
            .collect::<Result<_>>()?;
        Ok(QOperator { n, rotations })
    }

    /// `Q T Q^dagger` for one term, exact.
    pub fn conjugate_term(&self, coeff: Complex64, s: PauliString) -> (Complex64, PauliString) {
        let i = Complex64::new(0.0, 1.0);
        self.rotations.iter().fold((coeff, s), |(c, t), (sign, r)| {
            if r.commutes_with(&t) {
                (c, t)
            } else {
                let (ph, prod) = r.mul(&t);
                (c * i * *sign * ph.value(), prod)
            }
        })
    }

    /// `Q O Q^dagger`.
    pub fn conjugate(&self, op: &OperatorSum) -> Result<OperatorSum> {
        let terms = op
            .terms()
            .iter()
            .map(|(s, c)| {
                let (c, s) = self.conjugate_term(*c, *s);
                Ok((c, PauliTerm::new(self.n, s, crate::fermion_algebra::Phase::ONE)?))
            })
            .collect::<Result<Vec<_>>>()?;
        OperatorSum::from_terms(self.n, terms)
    }

    /// Expanded Pauli sum (`2^N` terms).
    pub fn to_operator(&self) -> Result<OperatorSum> {
        let mut q = OperatorSum::identity(self.n);
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for (sign, r) in &self.rotations {
            let factor = OperatorSum::from_terms(
                self.n,
                [
                    (amp, PauliTerm::identity(self.n)),
                    (amp * Complex64::new(0.0, *sign), PauliTerm::new(self.n, *r, crate::fermion_algebra::Phase::ONE)?),
                ],
            )?;
            q = q.mul(&factor)?;
        }
        Ok(q)
    }

    /// `Q^2 = prod_j (i s_j S_j)` as a single term.
    pub fn square(&self) -> Result<PauliTerm> {
        let mut t = PauliTerm::identity(self.n);
        for (sign, r) in &self.rotations {
            let ph = crate::fermion_algebra::Phase::from_exponent(if *sign > 0.0 { 1 } else { 3 });
            t = t.mul(&PauliTerm::new(self.n, *r, ph)?)?;
        }
        Ok(t)
    }
}

/// `Gamma^5` of one side: the Hermitian product of all `N` Majoranas of that side.
pub fn side_parity(side: Side, n: usize) -> Result<PauliTerm> {
    gamma_string(&GammaIndex::from_mask(side, (1u64 << n) - 1, n)?, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Commute,
    Anticommute,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub n: usize,
    pub kind: Interaction,
    /// Max coefficient of `Q H Q^dagger - H`.
    pub q_commutator: f64,
    pub q_squared_is_parity: bool,
    pub sides_commute: bool,
    /// Max coefficient of `[Gamma^5, H]`, `[Gamma^5_L, H]`, `[Gamma^5_R, H]`.
    pub parity_commutator: f64,
    pub left_parity_commutator: f64,
    pub right_parity_commutator: f64,
    /// Relation of `Q` and `Gamma^5_L` inside the `Gamma^5` sector of `|I>`.
    pub q_vs_left_parity: Relation,
}

impl SymmetryReport {
    /// Claims for this `N` and interaction hold exactly.
    pub fn all_claims_hold(&self) -> bool {
        let expected = if self.n % 4 == 0 {
            Relation::Commute
        } else {
            Relation::Anticommute
        };
        let side_ok = match self.kind {
            Interaction::Vb => self.left_parity_commutator == 0.0 && self.right_parity_commutator == 0.0,
            Interaction::V => true,
        };
        self.q_commutator == 0.0
            && self.q_squared_is_parity
            && self.sides_commute
            && self.parity_commutator == 0.0
            && side_ok
            && self.q_vs_left_parity == expected
    }
}

/// Max coefficient of `[P, H]`: only anticommuting terms contribute, each as `2 P T`.
fn single_commutator(p: &PauliTerm, h: &OperatorSum) -> f64 {
    h.terms()
        .iter()
        .filter(|(s, _)| !p.string().commutes_with(s))
        .map(|(_, c)| 2.0 * c.norm())
        .fold(0.0, f64::max)
}

pub fn discrete_symmetries(couplings: &Couplings, kind: Interaction, mu: f64) -> Result<SymmetryReport> {
    let n = couplings.n;
    let h = eternal_hamiltonian(couplings, kind, mu)?;
    let q = QOperator::new(n)?;
    let q_commutator = q.conjugate(&h)?.sub(&h)?.max_abs_coefficient();
    let g_l = side_parity(Side::Left, n)?;
    let g_r = side_parity(Side::Right, n)?;
    let g = g_r.mul(&g_l)?;
    let q_sq = q.square()?;
    // Q Gamma5_L Q^dagger = sigma Gamma5 Gamma5_L, so the relation holds
    // sector-wise; report it in the Gamma5 sector of |I>, which is (-1)^{N/2}.
    let (c, s) = q.conjugate_term(g_l.coefficient(), g_l.string());
    let target = g.mul(&g_l)?;
    let sector = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let q_vs_left_parity = if s != target.string() {
        Relation::Neither
    } else {
        let sigma = c / target.coefficient();
        if sigma == Complex64::new(sector, 0.0) {
            Relation::Commute
        } else if sigma == Complex64::new(-sector, 0.0) {
            Relation::Anticommute
        } else {
            Relation::Neither
        }
    };
    Ok(SymmetryReport {
        n,
        kind,
        q_commutator,
        q_squared_is_parity: q_sq == g,
        sides_commute: g_l.commutes_with(&g_r),
        parity_commutator: single_commutator(&g, &h),
        left_parity_commutator: single_commutator(&g_l, &h),
        right_parity_commutator: single_commutator(&g_r, &h),
        q_vs_left_parity,
    })
}

/// Distinct eigenvalues of `Q` from the spectrum of `V`.
pub fn q_eigenvalues(n: usize) -> Result<Vec<Complex64>> {
    let v = eigh(build_interaction(Interaction::V, n)?.to_dense());
    let mut seen: HashMap<i64, Complex64> = HashMap::new();
    for lam in v.values {
        let k = lam.round() as i64;
        seen.entry(k.rem_euclid(4))
            .or_insert_with(|| Complex64::new(0.0, std::f64::consts::FRAC_PI_2 * lam).exp());
    }
    let mut out: Vec<(i64, Complex64)> = seen.into_iter().collect();
    out.sort_by_key(|(k, _)| *k);
    Ok(out.into_iter().map(|(_, z)| z).collect())
}

/// Dense unitary check helper for tests and the FFI: `||Q^dagger Q - 1||_max`.
pub fn unitarity_defect(op: &OperatorSum) -> f64 {
    let m = op.to_dense();
    let prod = m.adjoint() * &m;
    let id = DMatrix::<Complex64>::identity(prod.nrows(), prod.ncols());
    (prod - id).camax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sample_syk;
    use crate::states::thermofield_double;

    fn syk(n: usize, seed: u64) -> Couplings {
        sample_syk(n, 4, 1.0, seed).unwrap().0
    }

    #[test]
    fn decoupled_spectrum_is_a_sum() {
        let c = syk(6, 1);
        let s = eternal_spectrum(&c, Interaction::V, 0.0, 64).unwrap();
        let half = crate::observables::restrict_left(&c.hamiltonian(Side::Left).unwrap(), 3).unwrap();
        let e = eigh(half.to_dense()).values;
        let mut sums: Vec<f64> = e.iter().flat_map(|a| e.iter().map(move |b| a + b)).collect();
        sums.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues.iter().zip(&sums) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_and_lanczos_agree_at_ten_qubits() {
        let c = syk(10, 3);
        let h = eternal_hamiltonian(&c, Interaction::V, 0.3).unwrap();
        let dense = lowest_spectrum(&h, 10, &SpectrumOptions { dense_max_qubits: 10, ..Default::default() }).unwrap();
        let iter = lowest_spectrum(&h, 10, &SpectrumOptions { dense_max_qubits: 0, ..Default::default() }).unwrap();
        for (a, b) in dense.eigenvalues.iter().zip(&iter.eigenvalues) {
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
        assert!(iter.gap > 0.0);
        assert!((dense.ground_overlap(iter.ground_state()).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn vb_spectrum_doubly_degenerate_at_n_2_mod_4() {
        let c = syk(10, 5);
        let s = eternal_spectrum(&c, Interaction::Vb, 0.3, 12).unwrap();
        let levels = s.levels();
        // the last level may be cut in half by k
        for (_, m) in &levels[..levels.len() - 1] {
            assert_eq!(*m % 2, 0, "{levels:?}");
        }
        assert_eq!(s.ground_degeneracy, 2);
    }

    #[test]
    fn symmetry_claims() {
        for n in [6, 8, 10] {
            let c = syk(n, 7);
            for kind in [Interaction::V, Interaction::Vb] {
                let r = discrete_symmetries(&c, kind, 0.3).unwrap();
                assert!(r.all_claims_hold(), "{r:?}");
            }
            let v = discrete_symmetries(&c, Interaction::V, 0.3).unwrap();
            assert!(v.left_parity_commutator > 0.0);
        }
    }

    #[test]
    fn q_operator_dense_checks() {
        let n = 6;
        let q = QOperator::new(n).unwrap();
        let op = q.to_operator().unwrap();
        assert!(unitarity_defect(&op) < 1e-12);
        let sq = op.mul(&op).unwrap();
        let direct = OperatorSum::from_term(Complex64::new(1.0, 0.0), q.square().unwrap());
        assert!(sq.sub(&direct).unwrap().is_zero(1e-12));
        // Clifford conjugation against the dense product
        let c = syk(n, 2);
        let h = eternal_hamiltonian(&c, Interaction::Vb, 0.2).unwrap();
        let lhs = op.mul(&h).unwrap().mul(&op.adjoint()).unwrap();
        assert!(lhs.sub(&q.conjugate(&h).unwrap()).unwrap().is_zero(1e-12));
        let ev = q_eigenvalues(n).unwrap();
        assert_eq!(ev.len(), 4);
        for z in ev {
            assert!((z.re.abs() - 1.0).abs() < 1e-12 || (z.im.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn synthetic_power_law() {
        let mu: Vec<f64> = (1..=12).map(|k| 0.02 * k as f64).collect();
        let gap: Vec<f64> = mu.iter().map(|m| 1.3 * m.powf(0.69) - 0.17).collect();
        let f = fit_power_law(&mu, &gap).unwrap();
        assert!((f.b - 0.69).abs() < 1e-6, "{f:?}");
        assert!((f.a - 1.3).abs() < 1e-5 && (f.c + 0.17).abs() < 1e-5);
        assert!(f.b_interval.0 <= f.b && f.b <= f.b_interval.1);
    }

    #[test]
    fn generators() {
        let c = syk(8, 4);
        let g = sl2r_generators(&c, -0.3, -1.0).unwrap();
        let tfd = thermofield_double(&c.hamiltonian(Side::Left).unwrap(), 4.0).unwrap();
        assert!(g.boost_residual(&tfd).unwrap() < 1e-9);
        let sum = g.p_plus.add(&g.p_minus).unwrap().add(&g.global_time).unwrap();
        assert!(sum.is_zero(1e-14));
    }

    #[test]
    fn overlap_and_figure_of_merit() {
        let c = syk(8, 6);
        let big = eternal_spectrum(&c, Interaction::V, 20.0, 4).unwrap();
        let ob = optimal_beta(&big, &c, &[0.0, 0.5, 1.0, 2.0]).unwrap();
        assert_eq!(ob.beta, 0.0);
        assert!(ob.on_boundary && ob.overlap > 0.99);
        let s = eternal_spectrum(&c, Interaction::V, 0.3, 4).unwrap();
        let ob = optimal_beta(&s, &c, &[0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0]).unwrap();
        assert!(ob.overlap > 0.8 && ob.overlap <= 1.0 + 1e-12, "{ob:?}");
        for beta in [0.0, 1.0, 4.0] {
            assert!(sl2r_figure_of_merit(&c, Interaction::V, 0.3, beta).unwrap() >= -1e-12);
        }
    }
}
