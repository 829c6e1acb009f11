//! Teleportation protocols on the register `[R, Q, left block, right block, T]`.
//!
//! Two engines compute `rho_TR`: the full `(N+3)`-qubit register run and a
//! correlator evaluation on the `N`-qubit doubled system alone.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion_algebra::{majorana, MajoranaIndex, OperatorSum, PauliTerm, Side};
use crate::linalg::TimeMode;
use crate::models::{build_interaction, Couplings, Interaction};
use crate::observables::mutual_information_rt;
use crate::states::{
    measure_qubits, reduced_density, thermofield_double_with, DensityMatrix, EvolveOptions, Evolver, MeasurePolicy,
    StateVector,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Quantum,
    Classical,
}

/// One application of `exp(i mu V)` at protocol time `time`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub time: f64,
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    #[serde(rename = "J")]
    pub scale: f64,
    pub beta: f64,
    pub mu: f64,
    pub t0: f64,
    pub t1: f64,
    pub interaction: Interaction,
    /// Empty means a single slice `(0, mu)`.
    #[serde(default)]
    pub schedule: Vec<Slice>,
    pub channel: Channel,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn new(n: usize, q: usize, beta: f64, mu: f64, interaction: Interaction) -> Self {
        ProtocolConfig {
            n,
            q,
            scale: 1.0,
            beta,
            mu,
            t0: 0.0,
            t1: 0.0,
            interaction,
            schedule: Vec::new(),
            channel: Channel::Quantum,
            seed: 0,
        }
    }

    pub fn with_times(mut self, t0: f64, t1: f64) -> Self {
        self.t0 = t0;
        self.t1 = t1;
        self
    }

    pub fn effective_schedule(&self) -> Vec<Slice> {
        if self.schedule.is_empty() {
            vec![Slice { time: 0.0, mu: self.mu }]
        } else {
            self.schedule.clone()
        }
    }

    /// Slices must be time ordered and lie between the injection time `-t0`
    /// and the extraction time `t1`.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 2 != 0 {
            return Err(Error::invalid(format!("N must be positive and even, got {}", self.n)));
        }
        for x in [self.beta, self.mu, self.t0, self.t1] {
            if !x.is_finite() {
                return Err(Error::invalid("protocol parameters must be finite"));
            }
        }
        if self.beta < 0.0 {
            return Err(Error::invalid(format!("beta must be >= 0, got {}", self.beta)));
        }
        let lo = (-self.t0).min(self.t1);
        let hi = (-self.t0).max(self.t1);
        let sched = self.effective_schedule();
        for w in sched.windows(2) {
            if w[1].time < w[0].time {
                return Err(Error::invalid("schedule times must be nondecreasing"));
            }
        }
        for s in &sched {
            if !s.time.is_finite() || !s.mu.is_finite() || s.time < lo - 1e-12 || s.time > hi + 1e-12 {
                return Err(Error::invalid(format!(
                    "schedule slice at t = {} outside [{lo}, {hi}]",
                    s.time
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct OutcomeRecord {
    /// Bit `j` is the result on left-block qubit `j` (1 means Z = -1).
    pub bits: u64,
    pub probability: f64,
    pub i_rt: f64,
    pub rho_tr: DensityMatrix,
}

#[derive(Clone, Debug)]
pub struct TeleportResult {
    /// Index `R + 2 T`. For the classical channel, the outcome-averaged state.
    pub rho_tr: DensityMatrix,
    /// Renyi-2 `I(R:T)` in bits.
    pub i_rt: f64,
    pub outcomes: Vec<OutcomeRecord>,
}

impl TeleportResult {
    fn from_rho(rho_tr: DensityMatrix, outcomes: Vec<OutcomeRecord>) -> Result<Self> {
        let i_rt = mutual_information_rt(&rho_tr)?;
        Ok(TeleportResult { rho_tr, i_rt, outcomes })
    }
}

/// Qubit positions of the protocol register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Register {
    pub n: usize,
}

impl Register {
    pub const R: usize = 0;
    pub const Q: usize = 1;
    pub const SYK_OFFSET: usize = 2;

    pub fn t(&self) -> usize {
        self.n + 2
    }

    pub fn total(&self) -> usize {
        self.n + 3
    }

    pub fn left_block(&self) -> Vec<usize> {
        (0..self.n / 2).map(|j| Self::SYK_OFFSET + j).collect()
    }

    pub fn right_block(&self) -> Vec<usize> {
        (0..self.n / 2).map(|j| Self::SYK_OFFSET + self.n / 2 + j).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapKind {
    /// Swap Q into the left system.
    QLeft,
    /// Swap the right system out into T.
    TRight,
}

/// `chi = (psi_0 + i psi_1)/sqrt(2)` on one side of the doubled system.
pub fn chi(side: Side, n: usize) -> Result<OperatorSum> {
    let a = majorana(MajoranaIndex::new(side, 0), n)?;
    let b = majorana(MajoranaIndex::new(side, 1), n)?;
    Ok(a.add(&b.scale(Complex64::new(0.0, 1.0)))?.scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
}

/// The four blocks `L[a][b]` multiplying `|a><b|` of the control qubit:
/// `chi chi^dag`, `chi^dag`, `chi`, `chi^dag chi`.
fn swap_blocks(side: Side, n: usize) -> Result<[[OperatorSum; 2]; 2]> {
    let c = chi(side, n)?;
    let cd = c.adjoint();
    Ok([[c.mul(&cd)?, cd.clone()], [c.clone(), cd.mul(&c)?]])
}

/// `|a><b|` on one qubit as a Pauli sum.
fn ket_bra(a: usize, b: usize, qubit: usize, n_total: usize) -> Result<OperatorSum> {
    let half = Complex64::new(0.5, 0.0);
    let ihalf = Complex64::new(0.0, 0.5);
    let letter = |l: &str| -> Result<PauliTerm> {
        let mut s: Vec<char> = vec!['I'; n_total];
        if l != "I" {
            s[qubit] = l.chars().next().unwrap_or('I');
        }
        PauliTerm::from_letters(&s.into_iter().collect::<String>())
    };
    let terms = match (a, b) {
        (0, 0) => vec![(half, letter("I")?), (half, letter("Z")?)],
        (1, 1) => vec![(half, letter("I")?), (-half, letter("Z")?)],
        (0, 1) => vec![(half, letter("X")?), (ihalf, letter("Y")?)],
        (1, 0) => vec![(half, letter("X")?), (-ihalf, letter("Y")?)],
        _ => return Err(Error::invalid("ket-bra labels must be 0 or 1")),
    };
    OperatorSum::from_terms(n_total, terms)
}

/// `S_{Q l}` or `S_{T r}` as a unitary Pauli sum on the full register.
pub fn swap_operator(which: SwapKind, n: usize) -> Result<OperatorSum> {
    let reg = Register { n };
    let (side, ctrl) = match which {
        SwapKind::QLeft => (Side::Left, Register::Q),
        SwapKind::TRight => (Side::Right, reg.t()),
    };
    let blocks = swap_blocks(side, n)?;
    let mut s = OperatorSum::zero(reg.total());
    for (a, row) in blocks.iter().enumerate() {
        for (b, blk) in row.iter().enumerate() {
            let term = ket_bra(a, b, ctrl, reg.total())?.mul(&blk.embed(Register::SYK_OFFSET, reg.total())?)?;
            s = s.add(&term)?;
        }
    }
    Ok(s)
}

/// Precomputed pieces of one instantiation at fixed `beta` and interaction.
pub struct Protocol {
    n: usize,
    interaction: Interaction,
    h_l: OperatorSum,
    h_r: OperatorSum,
    tfd: StateVector,
    h_tot: Evolver,
    v: Evolver,
    l_blocks: [[OperatorSum; 2]; 2],
    k_blocks: [OperatorSum; 2],
    opts: EvolveOptions,
}

impl Protocol {
    pub fn new(couplings: &Couplings, beta: f64, interaction: Interaction) -> Result<Self> {
        Self::with_options(couplings, beta, interaction, EvolveOptions::default())
    }

    pub fn with_options(couplings: &Couplings, beta: f64, interaction: Interaction, opts: EvolveOptions) -> Result<Self> {
        let n = couplings.n;
        if n < 2 {
            return Err(Error::invalid("the protocol needs N >= 2"));
        }
        let h_l = couplings.hamiltonian(Side::Left)?;
        let h_r = couplings.hamiltonian(Side::Right)?;
        let tfd = thermofield_double_with(&h_l, beta, opts)?;
        let h_tot = Evolver::new(&h_l.add(&h_r)?, opts)?;
        let v = Evolver::new(&build_interaction(interaction, n)?, opts)?;
        let l_blocks = swap_blocks(Side::Left, n)?;
        let [[k0, _], [k1, _]] = swap_blocks(Side::Right, n)?;
        Ok(Protocol {
            n,
            interaction,
            h_l,
            h_r,
            tfd,
            h_tot,
            v,
            l_blocks,
            k_blocks: [k0, k1],
            opts,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tfd(&self) -> &StateVector {
        &self.tfd
    }

    /// From `-t0` to `t1` under `H_L + H_R`, applying each slice's `exp(i mu V)`.
    fn run_schedule(
        &self,
        mut psi: StateVector,
        t0: f64,
        t1: f64,
        schedule: &[Slice],
        h: &Evolver,
        v: &Evolver,
    ) -> Result<StateVector> {
        let mut now = -t0;
        for s in schedule {
            psi = h.apply(&psi, s.time - now, TimeMode::Real)?;
            psi = v.apply(&psi, -s.mu, TimeMode::Real)?;
            now = s.time;
        }
        h.apply(&psi, t1 - now, TimeMode::Real)
    }

    /// `rho_TR` from correlators of `chi_l`, `chi_r` on the doubled system:
    /// `rho[(a,b),(a',b')] = 1/2 sum_q <K_b' U L_qa' u | K_b U L_qa u>`
    /// with `u = e^{i H t0}|tfd>` and `U` the scheduled evolution.
    pub fn correlator_rho(&self, t0: f64, t1: f64, schedule: &[Slice]) -> Result<DensityMatrix> {
        let u = self.h_tot.apply(&self.tfd, -t0, TimeMode::Real)?;
        // vecs[q][a][b]
        let mut vecs: Vec<Vec<Vec<StateVector>>> = Vec::with_capacity(2);
        for q in 0..2 {
            let mut per_a = Vec::with_capacity(2);
            for a in 0..2 {
                let phi = self.l_blocks[q][a].apply(&u)?;
                let phi = self.run_schedule(phi, t0, t1, schedule, &self.h_tot, &self.v)?;
                per_a.push(
                    self.k_blocks
                        .iter()
                        .map(|k| k.apply(&phi))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            vecs.push(per_a);
        }
        let mut m = nalgebra::DMatrix::zeros(4, 4);
        for (row, col) in itertools::iproduct!(0..4, 0..4) {
            let (a, b) = (row & 1, row >> 1);
            let (a2, b2) = (col & 1, col >> 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for per_q in &vecs {
                acc += per_q[a2][b2].inner(&per_q[a][b])?;
            }
            m[(row, col)] = acc * 0.5;
        }
        DensityMatrix::new(2, m)
    }

    /// Initial register state `Bell(RQ) (x) |tfd> (x) |0>_T`.
    pub fn initial_state(&self) -> Result<StateVector> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let bell = StateVector::new(2, vec![Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)])?;
        let s = StateVector::tensor(&bell, &self.tfd)?;
        StateVector::tensor(&s, &StateVector::basis(1, 0)?)
    }

    fn register_evolvers(&self) -> Result<(Evolver, Evolver)> {
        let total = Register { n: self.n }.total();
        let h = self.h_l.add(&self.h_r)?.embed(Register::SYK_OFFSET, total)?;
        let v = build_interaction(self.interaction, self.n)?.embed(Register::SYK_OFFSET, total)?;
        Ok((Evolver::new(&h, self.opts)?, Evolver::new(&v, self.opts)?))
    }

    /// Final state of the full register.
    pub fn full_register_state(&self, t0: f64, t1: f64, schedule: &[Slice]) -> Result<StateVector> {
        let (h, v) = self.register_evolvers()?;
        let s_ql = swap_operator(SwapKind::QLeft, self.n)?;
        let s_tr = swap_operator(SwapKind::TRight, self.n)?;
        let psi = h.apply(&self.initial_state()?, -t0, TimeMode::Real)?;
        let psi = s_ql.apply(&psi)?;
        let psi = self.run_schedule(psi, t0, t1, schedule, &h, &v)?;
        s_tr.apply(&psi)
    }

    pub fn full_register_rho(&self, t0: f64, t1: f64, schedule: &[Slice]) -> Result<DensityMatrix> {
        let reg = Register { n: self.n };
        reduced_density(&self.full_register_state(t0, t1, schedule)?, &[Register::R, reg.t()])
    }

    /// Classical-channel variant: measure the left block at `t = 0`, apply
    /// `exp(i mu sum_j s_j Z_{right j})`, evolve the right side to `t1`,
    /// swap the first right qubit with T and apply `Z_T` when the product of
    /// the measured `s_j` is `-1`.
    pub fn classical(&self, t0: f64, t1: f64, mu: f64, policy: MeasurePolicy) -> Result<Vec<OutcomeRecord>> {
        if self.interaction != Interaction::Vb {
            return Err(Error::invalid("the classical channel exists only for the Vb interaction"));
        }
        let reg = Register { n: self.n };
        let total = reg.total();
        let (h, _) = self.register_evolvers()?;
        let s_ql = swap_operator(SwapKind::QLeft, self.n)?;
        let psi = h.apply(&self.initial_state()?, -t0, TimeMode::Real)?;
        let psi = s_ql.apply(&psi)?;
        let psi = h.apply(&psi, t0, TimeMode::Real)?;
        let h_r = Evolver::new(&self.h_r.embed(Register::SYK_OFFSET, total)?, self.opts)?;
        let right = reg.right_block();
        let first_right = right[0];
        let swap = swap_gate(first_right, reg.t(), total)?;
        let z_t = single(reg.t(), 'Z', total)?;
        measure_qubits(&psi, &reg.left_block(), policy)?
            .into_iter()
            .map(|o| {
                let signs: Vec<f64> = (0..self.n / 2).map(|j| if o.bits >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
                let vcc = OperatorSum::from_terms(
                    total,
                    right
                        .iter()
                        .zip(&signs)
                        .map(|(&qb, &s)| Ok((Complex64::new(s, 0.0), single(qb, 'Z', total)?)))
                        .collect::<Result<Vec<_>>>()?,
                )?;
                let psi = Evolver::new(&vcc, self.opts)?.apply(&o.state, -mu, TimeMode::Real)?;
                let psi = h_r.apply(&psi, t1, TimeMode::Real)?;
                let mut psi = swap.apply(&psi)?;
                if signs.iter().product::<f64>() < 0.0 {
                    psi = z_t.apply(&psi)?;
                }
                let rho = reduced_density(&psi, &[Register::R, reg.t()])?;
                Ok(OutcomeRecord {
                    bits: o.bits,
                    probability: o.probability,
                    i_rt: mutual_information_rt(&rho)?,
                    rho_tr: rho,
                })
            })
            .collect()
    }
}

fn single(qubit: usize, letter: char, n_total: usize) -> Result<PauliTerm> {
    let mut s: Vec<char> = vec!['I'; n_total];
    s[qubit] = letter;
    PauliTerm::from_letters(&s.into_iter().collect::<String>())
}

/// `SWAP = (II + XX + YY + ZZ)/2`
fn swap_gate(a: usize, b: usize, n_total: usize) -> Result<OperatorSum> {
    let half = Complex64::new(0.5, 0.0);
    let mut terms = vec![(half, PauliTerm::identity(n_total))];
    for l in ['X', 'Y', 'Z'] {
        terms.push((half, single(a, l, n_total)?.mul(&single(b, l, n_total)?)?));
    }
    OperatorSum::from_terms(n_total, terms)
}

fn check_config(config: &ProtocolConfig, couplings: &Couplings) -> Result<()> {
    config.validate()?;
    if couplings.n != config.n {
        return Err(Error::SizeMismatch {
            expected: config.n,
            got: couplings.n,
        });
    }
    Ok(())
}

/// Full-register quantum-channel run.
pub fn run_quantum(config: &ProtocolConfig, couplings: &Couplings) -> Result<TeleportResult> {
    check_config(config, couplings)?;
    if config.channel != Channel::Quantum {
        return Err(Error::invalid("run_quantum needs channel = quantum"));
    }
    let p = Protocol::new(couplings, config.beta, config.interaction)?;
    let rho = p.full_register_rho(config.t0, config.t1, &config.effective_schedule())?;
    TeleportResult::from_rho(rho, Vec::new())
}

pub fn rho_tr_correlator(config: &ProtocolConfig, couplings: &Couplings) -> Result<DensityMatrix> {
    check_config(config, couplings)?;
    let p = Protocol::new(couplings, config.beta, config.interaction)?;
    p.correlator_rho(config.t0, config.t1, &config.effective_schedule())
}

/// Classical-channel run. Single slice only; `rho_tr` of the result is the
/// probability-weighted mixture of the branch states returned.
pub fn run_classical(config: &ProtocolConfig, couplings: &Couplings, policy: MeasurePolicy) -> Result<TeleportResult> {
    check_config(config, couplings)?;
    if config.interaction != Interaction::Vb {
        return Err(Error::invalid("the classical channel exists only for the Vb interaction"));
    }
    let sched = config.effective_schedule();
    if sched.len() != 1 || sched[0].time != 0.0 {
        return Err(Error::invalid("the classical channel supports a single slice at t = 0"));
    }
    let p = Protocol::new(couplings, config.beta, config.interaction)?;
    let outcomes = p.classical(config.t0, config.t1, sched[0].mu, policy)?;
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    let mut m = nalgebra::DMatrix::zeros(4, 4);
    for o in &outcomes {
        m += o.rho_tr.matrix() * Complex64::new(o.probability / total, 0.0);
    }
    TeleportResult::from_rho(DensityMatrix::new(2, m)?, outcomes)
}

/// Exact `rho_TR` of the `t0 = t1 = beta = 0` protocol with interaction `V`,
/// in the basis `|R T>` with index `R + 2T`.
pub fn warmup_rho_closed_form(mu: f64) -> [[f64; 4]; 4] {
    let s2 = mu.sin().powi(2);
    let off = mu.sin() / 2.0;
    let diag = (1.0 + s2) / 4.0;
    let anti = (1.0 - s2) / 4.0;
    [
        [diag, 0.0, 0.0, off],
        [0.0, anti, 0.0, 0.0],
        [0.0, 0.0, anti, 0.0],
        [off, 0.0, 0.0, diag],
    ]
}

/// `2 log2(1 + sin^2 mu)`
pub fn warmup_mutual_information(mu: f64) -> f64 {
    2.0 * (1.0 + mu.sin().powi(2)).log2()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiPoint {
    pub instantiation: usize,
    pub seed: u64,
    pub t: f64,
    pub mu: f64,
    pub i_rt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiCurve {
    pub t: Vec<f64>,
    pub points: Vec<MiPoint>,
    /// Ensemble mean of `I(R:T)` at `-|mu|`, per t.
    pub mean_neg: Vec<f64>,
    pub mean_pos: Vec<f64>,
    /// `mean_neg - mean_pos`
    pub asymmetry: Vec<f64>,
    /// Standard error of the mean of the per-instantiation asymmetry.
    pub asymmetry_sem: Vec<f64>,
}

/// `I(R:T)` along `t0 = t1 = t` for `mu = -|mu|` and `+|mu|`, for each
/// ensemble member, via the correlator engine.
pub fn mi_curve(
    template: &ProtocolConfig,
    t_grid: &[f64],
    members: &[(u64, Couplings)],
) -> Result<MiCurve> {
    use rayon::prelude::*;
    template.validate()?;
    let mu = template.mu.abs();
    let per: Vec<Vec<MiPoint>> = members
        .par_iter()
        .enumerate()
        .map(|(k, (seed, c))| {
            let p = Protocol::new(c, template.beta, template.interaction)?;
            let mut out = Vec::with_capacity(2 * t_grid.len());
            for &t in t_grid {
                for m in [-mu, mu] {
                    let sched = rescale_schedule(template, m);
                    let rho = p.correlator_rho(t, t, &sched)?;
                    out.push(MiPoint {
                        instantiation: k,
                        seed: *seed,
                        t,
                        mu: m,
                        i_rt: mutual_information_rt(&rho)?,
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let points: Vec<MiPoint> = per.into_iter().flatten().collect();
    let nt = t_grid.len();
    let nm = members.len().max(1) as f64;
    let mut mean_neg = vec![0.0; nt];
    let mut mean_pos = vec![0.0; nt];
    let mut asym_members = vec![Vec::new(); nt];
    for chunk in points.chunks(2 * nt) {
        for (i, pair) in chunk.chunks(2).enumerate() {
            mean_neg[i] += pair[0].i_rt / nm;
            mean_pos[i] += pair[1].i_rt / nm;
            asym_members[i].push(pair[0].i_rt - pair[1].i_rt);
        }
    }
    let asymmetry = (0..nt).map(|i| mean_neg[i] - mean_pos[i]).collect();
    let asymmetry_sem = asym_members.iter().map(|xs| sem(xs)).collect();
    Ok(MiCurve {
        t: t_grid.to_vec(),
        points,
        mean_neg,
        mean_pos,
        asymmetry,
        asymmetry_sem,
    })
}

/// The template's schedule with every slice's coupling given the sign of `mu`
/// and magnitude scaled so that the default single slice carries `mu`.
fn rescale_schedule(template: &ProtocolConfig, mu: f64) -> Vec<Slice> {
    if template.schedule.is_empty() {
        return vec![Slice { time: 0.0, mu }];
    }
    template
        .schedule
        .iter()
        .map(|s| Slice {
            time: s.time,
            mu: s.mu.abs() * mu.signum(),
        })
        .collect()
}

pub(crate) fn sem(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausalRow {
    pub t0: f64,
    pub best_t1: f64,
    pub max_asymmetry: f64,
}

/// For each `t0`, the `t1` maximizing the ensemble-mean asymmetry
/// `I(-|mu|) - I(+|mu|)` (ties toward smaller `t1`).
pub fn causal_ordering_scan(
    template: &ProtocolConfig,
    t0_grid: &[f64],
    t1_grid: &[f64],
    members: &[(u64, Couplings)],
) -> Result<Vec<CausalRow>> {
    template.validate()?;
    for g in [t0_grid, t1_grid] {
        if g.is_empty() || g.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("time grids must be nonempty and strictly increasing"));
        }
    }
    let mu = template.mu.abs();
    let protocols: Vec<Protocol> = members
        .iter()
        .map(|(_, c)| Protocol::new(c, template.beta, template.interaction))
        .collect::<Result<_>>()?;
    let grid = asymmetry_grid(template, mu, t0_grid, t1_grid, &protocols)?;
    Ok(t0_grid
        .iter()
        .enumerate()
        .map(|(i, &t0)| {
            let row = &grid[i];
            let mut best = 0;
            for (k, v) in row.iter().enumerate() {
                if *v > row[best] {
                    best = k;
                }
            }
            CausalRow {
                t0,
                best_t1: t1_grid[best],
                max_asymmetry: row[best],
            }
        })
        .collect())
}

/// Ensemble-mean asymmetry on the `(t0, t1)` grid.
pub fn asymmetry_grid(
    template: &ProtocolConfig,
    mu: f64,
    t0_grid: &[f64],
    t1_grid: &[f64],
    protocols: &[Protocol],
) -> Result<Vec<Vec<f64>>> {
    use rayon::prelude::*;
    let cells: Vec<(usize, usize)> = itertools::iproduct!(0..t0_grid.len(), 0..t1_grid.len()).collect();
    let vals: Vec<f64> = cells
        .par_iter()
        .map(|&(i, k)| {
            let mut acc = 0.0;
            for p in protocols {
                let neg = p.correlator_rho(t0_grid[i], t1_grid[k], &rescale_schedule(template, -mu))?;
                let pos = p.correlator_rho(t0_grid[i], t1_grid[k], &rescale_schedule(template, mu))?;
                acc += mutual_information_rt(&neg)? - mutual_information_rt(&pos)?;
            }
            Ok(acc / protocols.len().max(1) as f64)
        })
        .collect::<Result<_>>()?;
    Ok(vals.chunks(t1_grid.len()).map(|c| c.to_vec()).collect())
}
