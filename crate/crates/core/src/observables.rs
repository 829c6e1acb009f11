//! Renyi-2 information measures, OTOCs and the Euclidean two-point function.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion_algebra::{majorana_string, MajoranaIndex, OperatorSum, PauliString, PauliTerm, Phase, Side};
use crate::linalg::{eigh, TimeMode};
use crate::models::{build_interaction, Couplings, Interaction};
use crate::states::{subsystem_purity, thermofield_double_with, DensityMatrix, EvolveOptions, Evolver, StateVector};

fn check_disjoint(sets: &[&[usize]]) -> Result<()> {
    let mut seen = 0u64;
    for s in sets {
        if s.is_empty() {
            return Err(Error::invalid("subsystems must be nonempty"));
        }
        for &q in *s {
            if q >= 64 || seen >> q & 1 == 1 {
                return Err(Error::invalid(format!("subsystems overlap or repeat at qubit {q}")));
            }
            seen |= 1 << q;
        }
    }
    Ok(())
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

/// `log2( tr rho_AB^2 / (tr rho_A^2 tr rho_B^2) )`
pub fn renyi2_mutual(psi: &StateVector, a: &[usize], b: &[usize]) -> Result<f64> {
    check_disjoint(&[a, b])?;
    let pa = subsystem_purity(psi, a)?;
    let pb = subsystem_purity(psi, b)?;
    let pab = subsystem_purity(psi, &union(a, b))?;
    Ok((pab / (pa * pb)).log2())
}

/// Same as [`renyi2_mutual`] for a mixed state; `a`, `b` index its qubits.
pub fn renyi2_mutual_density(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    check_disjoint(&[a, b])?;
    let pa = rho.partial_trace(a)?.purity();
    let pb = rho.partial_trace(b)?.purity();
    let pab = rho.partial_trace(&union(a, b))?.purity();
    Ok((pab / (pa * pb)).log2())
}

/// `I(R:T)` of a two-qubit `rho_TR` with R on qubit 0 and T on qubit 1.
pub fn mutual_information_rt(rho_tr: &DensityMatrix) -> Result<f64> {
    if rho_tr.n_qubits() != 2 {
        return Err(Error::SizeMismatch {
            expected: 2,
            got: rho_tr.n_qubits(),
        });
    }
    renyi2_mutual_density(rho_tr, &[0], &[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Purities {
    pub r: f64,
    pub l: f64,
    pub t: f64,
    pub rl: f64,
    pub rt: f64,
    pub lt: f64,
    pub rlt: f64,
}

/// Renyi-2 informations between a reference R, a middle system L and an output T.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualInfoRecord {
    pub i_rt: f64,
    pub i_rl: f64,
    pub i_rlt: f64,
    /// `I(R:T) + I(R:L) - I(R:LT)`
    pub i3: f64,
    pub purities: Purities,
}

pub fn tripartite_info(psi: &StateVector, r: &[usize], l: &[usize], t: &[usize]) -> Result<MutualInfoRecord> {
    check_disjoint(&[r, l, t])?;
    let p = |s: &[usize]| subsystem_purity(psi, s);
    let lt = union(l, t);
    let purities = Purities {
        r: p(r)?,
        l: p(l)?,
        t: p(t)?,
        rl: p(&union(r, l))?,
        rt: p(&union(r, t))?,
        lt: p(&lt)?,
        rlt: p(&union(r, &lt))?,
    };
    let i = |pab: f64, pa: f64, pb: f64| (pab / (pa * pb)).log2();
    let i_rt = i(purities.rt, purities.r, purities.t);
    let i_rl = i(purities.rl, purities.r, purities.l);
    let i_rlt = i(purities.rlt, purities.r, purities.lt);
    Ok(MutualInfoRecord {
        i_rt,
        i_rl,
        i_rlt,
        i3: i_rt + i_rl - i_rlt,
        purities,
    })
}

/// Cached pieces for evaluating OTOCs of one instantiation at fixed `(mu, beta, j)`.
pub struct OtocEngine {
    tfd: StateVector,
    h_tot: Evolver,
    v: Evolver,
    psi_l: PauliTerm,
    psi_r: PauliTerm,
    mu: f64,
}

impl OtocEngine {
    pub fn new(couplings: &Couplings, interaction: Interaction, mu: f64, j: usize, beta: f64) -> Result<Self> {
        Self::with_options(couplings, interaction, mu, j, beta, EvolveOptions::default())
    }

    pub fn with_options(
        couplings: &Couplings,
        interaction: Interaction,
        mu: f64,
        j: usize,
        beta: f64,
        opts: EvolveOptions,
    ) -> Result<Self> {
        let n = couplings.n;
        if j >= n {
            return Err(Error::IndexOutOfRange(format!("fermion index {j} >= N = {n}")));
        }
        let h_l = couplings.hamiltonian(Side::Left)?;
        let h_r = couplings.hamiltonian(Side::Right)?;
        Ok(OtocEngine {
            tfd: thermofield_double_with(&h_l, beta, opts)?,
            h_tot: Evolver::new(&h_l.add(&h_r)?, opts)?,
            v: Evolver::new(&build_interaction(interaction, n)?, opts)?,
            psi_l: majorana_string(MajoranaIndex::left(j), n)?,
            psi_r: majorana_string(MajoranaIndex::right(j), n)?,
            mu,
        })
    }

    /// `psi(t)|x> = e^{iHt} psi e^{-iHt} |x>` with the `1/sqrt(2)` normalization.
    fn heisenberg(&self, psi: &PauliTerm, t: f64, x: &StateVector) -> Result<StateVector> {
        let y = self.h_tot.apply(x, t, TimeMode::Real)?;
        let y = scale_state(psi.apply(&y)?, std::f64::consts::FRAC_1_SQRT_2);
        self.h_tot.apply(&y, -t, TimeMode::Real)
    }

    fn euclidean(&self, psi: &PauliTerm, tau: f64, x: &StateVector) -> Result<StateVector> {
        let y = self.h_tot.apply_euclidean(x, tau)?;
        let y = scale_state(psi.apply(&y)?, std::f64::consts::FRAC_1_SQRT_2);
        self.h_tot.apply_euclidean(&y, -tau)
    }

    /// `H_{i mu}(t_L, t_R) = -i <tfd| e^{i mu V} psi^l_j(t_L) e^{-i mu V} psi^r_j(t_R) |tfd>`
    pub fn h(&self, t_l: f64, t_r: f64) -> Result<Complex64> {
        let k = self.heisenberg(&self.psi_r, t_r, &self.tfd)?;
        let k = self.v.apply(&k, self.mu, TimeMode::Real)?;
        let k = self.heisenberg(&self.psi_l, t_l, &k)?;
        let k = self.v.apply(&k, -self.mu, TimeMode::Real)?;
        Ok(Complex64::new(0.0, -1.0) * self.tfd.inner(&k)?)
    }

    /// `C = <tfd| { e^{i mu V} psi^l(t_L) e^{-i mu V}, psi^r(t_R) } |tfd>`, evaluated as an anticommutator.
    pub fn c(&self, t_l: f64, t_r: f64) -> Result<f64> {
        let k = self.heisenberg(&self.psi_r, t_r, &self.tfd)?;
        let k = self.v.apply(&k, self.mu, TimeMode::Real)?;
        let k = self.heisenberg(&self.psi_l, t_l, &k)?;
        let first = self.tfd.inner(&self.v.apply(&k, -self.mu, TimeMode::Real)?)?;
        let k = self.v.apply(&self.tfd, self.mu, TimeMode::Real)?;
        let k = self.heisenberg(&self.psi_l, t_l, &k)?;
        let k = self.v.apply(&k, -self.mu, TimeMode::Real)?;
        let second = self.tfd.inner(&self.heisenberg(&self.psi_r, t_r, &k)?)?;
        Ok((first + second).re)
    }

    /// `h_mu(tau1, tau2) = -i <tfd| e^{mu V} psi^l_j(tau1) e^{-mu V} psi^r_j(tau2) |tfd>`
    pub fn h_euclidean(&self, tau1: f64, tau2: f64) -> Result<Complex64> {
        let k = self.euclidean(&self.psi_r, tau2, &self.tfd)?;
        let k = self.v.apply_euclidean(&k, self.mu)?;
        let k = self.euclidean(&self.psi_l, tau1, &k)?;
        let k = self.v.apply_euclidean(&k, -self.mu)?;
        Ok(Complex64::new(0.0, -1.0) * self.tfd.inner(&k)?)
    }
}

fn scale_state(psi: StateVector, s: f64) -> StateVector {
    let n = psi.n_qubits();
    let amps = psi.into_amplitudes().into_iter().map(|a| a * s).collect();
    StateVector::new(n, amps).expect("same dimension")
}

pub fn otoc_h(
    couplings: &Couplings,
    interaction: Interaction,
    mu: f64,
    t_l: f64,
    t_r: f64,
    j: usize,
    beta: f64,
) -> Result<Complex64> {
    OtocEngine::new(couplings, interaction, mu, j, beta)?.h(t_l, t_r)
}

/// `C(t_L, t_R) = -2 Im H_{i mu}(t_L, t_R)`
pub fn otoc_c(
    couplings: &Couplings,
    interaction: Interaction,
    mu: f64,
    t_l: f64,
    t_r: f64,
    j: usize,
    beta: f64,
) -> Result<f64> {
    Ok(-2.0 * otoc_h(couplings, interaction, mu, t_l, t_r, j, beta)?.im)
}

pub fn otoc_h_euclidean(
    couplings: &Couplings,
    interaction: Interaction,
    mu: f64,
    tau1: f64,
    tau2: f64,
    j: usize,
    beta: f64,
) -> Result<Complex64> {
    OtocEngine::new(couplings, interaction, mu, j, beta)?.h_euclidean(tau1, tau2)
}

/// The plotted quantity `-sgn(mu) Im H`.
pub fn otoc_reported(h: Complex64, mu: f64) -> f64 {
    -mu.signum() * h.im
}

/// Left-side thermal two-point function of one Majorana, from the
/// eigendecomposition of the single-side Hamiltonian.
pub struct TwoPointFunction {
    beta: f64,
    energies: Vec<f64>,
    /// `|<m|psi_j|n>|^2` in the energy basis.
    weights: DMatrix<f64>,
}

impl TwoPointFunction {
    pub fn new(couplings: &Couplings, j: usize, beta: f64) -> Result<Self> {
        let n = couplings.n;
        if j >= n {
            return Err(Error::IndexOutOfRange(format!("fermion index {j} >= N = {n}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be finite and >= 0, got {beta}")));
        }
        let half = n / 2;
        let h = restrict_left(&couplings.hamiltonian(Side::Left)?, half)?;
        let s = majorana_string(MajoranaIndex::left(j), n)?;
        let psi = PauliTerm::new(half, s.string(), s.phase())?;
        let eig = eigh(h.to_dense());
        let p = psi.to_dense().map(|x| x * std::f64::consts::FRAC_1_SQRT_2);
        let m = eig.vectors.adjoint() * p * &eig.vectors;
        Ok(TwoPointFunction {
            beta,
            energies: eig.values,
            weights: m.map(|x| x.norm_sqr()),
        })
    }

    /// `G(tau) = 2 Z^{-1} <I| e^{-beta H} psi(tau) psi(0) |I>`
    pub fn at(&self, tau: f64) -> Result<f64> {
        if !(0.0..=self.beta).contains(&tau) {
            return Err(Error::invalid(format!("tau = {tau} outside [0, beta = {}]", self.beta)));
        }
        let e0 = self.energies[0];
        let a: Vec<f64> = self.energies.iter().map(|e| (-(self.beta - tau) * (e - e0)).exp()).collect();
        let b: Vec<f64> = self.energies.iter().map(|e| (-tau * (e - e0)).exp()).collect();
        let z: f64 = self.energies.iter().map(|e| (-self.beta * (e - e0)).exp()).sum();
        let mut acc = 0.0;
        for (m, am) in a.iter().enumerate() {
            for (nn, bn) in b.iter().enumerate() {
                acc += am * self.weights[(m, nn)] * bn;
            }
        }
        Ok(2.0 * acc / z)
    }
}

/// Re-express a left-block operator on its `half` qubits.
pub(crate) fn restrict_left(op: &OperatorSum, half: usize) -> Result<OperatorSum> {
    let mask = (1u64 << half) - 1;
    OperatorSum::from_terms(
        half,
        op.terms().iter().map(|(s, c)| {
            debug_assert!(s.support() & !mask == 0);
            (*c, PauliTerm::new(half, PauliString::new(s.x & mask, s.z & mask), Phase::ONE).expect("fits"))
        }),
    )
}

pub fn euclidean_2pt(couplings: &Couplings, j: usize, tau: f64, beta: f64) -> Result<f64> {
    TwoPointFunction::new(couplings, j, beta)?.at(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{sample_pg_commuting, sample_syk};
    use crate::states::max_entangled_state;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mutual_information_examples() {
        let zero = StateVector::basis(2, 0).unwrap();
        assert!(renyi2_mutual(&zero, &[0], &[1]).unwrap().abs() < 1e-14);
        let bell = StateVector::new(2, vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        assert!((renyi2_mutual(&bell, &[0], &[1]).unwrap() - 2.0).abs() < 1e-14);
        assert!(renyi2_mutual(&bell, &[0], &[0]).is_err());
        let rho = DensityMatrix::pure(&bell);
        assert!((mutual_information_rt(&rho).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tripartite_of_ghz_like_state() {
        // (|000> + |111>)/sqrt(2): I(R:L) = I(R:T) = 1, I(R:LT) = 2
        let mut a = vec![c(0.0, 0.0); 8];
        a[0] = c(FRAC_1_SQRT_2, 0.0);
        a[7] = c(FRAC_1_SQRT_2, 0.0);
        let psi = StateVector::new(3, a).unwrap();
        let rec = tripartite_info(&psi, &[0], &[1], &[2]).unwrap();
        assert!((rec.i_rl - 1.0).abs() < 1e-14 && (rec.i_rt - 1.0).abs() < 1e-14);
        assert!((rec.i_rlt - 2.0).abs() < 1e-14 && rec.i3.abs() < 1e-14);
    }

    #[test]
    fn otoc_trivial_limits() {
        let (cp, _) = sample_syk(6, 4, 1.0, 5).unwrap();
        let e = OtocEngine::new(&cp, Interaction::V, 0.0, 2, 0.0).unwrap();
        let h = e.h(0.0, 0.0).unwrap();
        assert!((h.norm() - 0.5).abs() < 1e-12 && h.im.abs() < 1e-12, "{h}");
        // psi^r|I> = i psi^l|I>  =>  -i <I|psi^l psi^r|I> = -i * i/2
        assert!((h.re - 0.5).abs() < 1e-12);
        let e4 = OtocEngine::new(&cp, Interaction::V, 0.0, 2, 4.0).unwrap();
        let h1 = e4.h(0.7, -0.3).unwrap();
        let e4b = OtocEngine::new(&cp, Interaction::Vb, 0.0, 2, 4.0).unwrap();
        assert!((h1 - e4b.h(0.7, -0.3).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn otoc_c_matches_imaginary_part() {
        let (cp, _) = sample_syk(6, 4, 1.0, 8).unwrap();
        for mu in [-0.3, 0.4] {
            let e = OtocEngine::new(&cp, Interaction::V, mu, 1, 2.0).unwrap();
            for (tl, tr) in [(0.0, 0.0), (1.3, -0.7), (2.5, 0.4)] {
                let h = e.h(tl, tr).unwrap();
                let cc = e.c(tl, tr).unwrap();
                assert!((cc + 2.0 * h.im).abs() < 1e-12, "{cc} {h}");
            }
        }
    }

    #[test]
    fn euclidean_otoc_at_zero_mu_is_two_point() {
        let (cp, _) = sample_syk(6, 4, 1.0, 2).unwrap();
        let e = OtocEngine::new(&cp, Interaction::V, 0.0, 2, 0.0).unwrap();
        let h = e.h_euclidean(0.0, 0.0).unwrap();
        assert!((h - e.h(0.0, 0.0).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn two_point_basics() {
        let (cp, _) = sample_syk(8, 4, 1.0, 4).unwrap();
        let g = TwoPointFunction::new(&cp, 2, 2.0).unwrap();
        assert!((g.at(0.0).unwrap() - 1.0).abs() < 1e-12);
        for tau in [0.3, 0.7, 1.1] {
            assert!((g.at(tau).unwrap() - g.at(2.0 - tau).unwrap()).abs() < 1e-9);
        }
        assert!(g.at(2.5).is_err());
    }

    #[test]
    fn two_point_matches_state_computation() {
        // 2 <tfd| psi rho^{1/2} ... evaluated on the doubled space at tau = beta/2
        let (cp, h_l) = sample_syk(6, 4, 1.0, 9).unwrap();
        let beta = 1.5;
        let g = TwoPointFunction::new(&cp, 1, beta).unwrap().at(beta / 2.0).unwrap();
        let i = max_entangled_state(6).unwrap();
        let ev = Evolver::new(&h_l, EvolveOptions::default()).unwrap();
        let psi = majorana_string(MajoranaIndex::left(1), 6).unwrap();
        let a = ev.apply_euclidean(&i, beta / 2.0).unwrap();
        let z = i.inner(&ev.apply_euclidean(&i, beta).unwrap()).unwrap().re;
        let a = psi.apply(&a).unwrap();
        let a = ev.apply_euclidean(&a, beta / 2.0).unwrap();
        let a = psi.apply(&a).unwrap();
        let direct = 2.0 * 0.5 * i.inner(&a).unwrap().re / z;
        assert!((g - direct).abs() < 1e-12, "{g} {direct}");
    }

    #[test]
    fn pg_two_point_is_real_and_bounded() {
        let (cp, _) = sample_pg_commuting(8, 4, 1.0, 3).unwrap();
        let g = TwoPointFunction::new(&cp, 0, 1.0).unwrap();
        let v = g.at(0.5).unwrap();
        assert!(v > 0.0 && v <= 1.0 + 1e-12);
        let _ = FRAC_PI_4;
    }
}
