//! State vectors, reduced density matrices, time evolution, and the
//! two-sided reference states |I> and |tfd>.
//!
//! Amplitude index bit `k` is qubit `k` (little-endian).

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion_algebra::{majorana, MajoranaIndex, OperatorSum, PauliString, Phase, MAX_QUBITS};
use crate::linalg::{self, HermitianEigen, KrylovOptions, SparsePauliOperator};

pub use crate::linalg::TimeMode;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits > MAX_QUBITS || amps.len() != 1usize << n_qubits {
            return Err(Error::SizeMismatch {
                expected: 1usize << n_qubits.min(MAX_QUBITS),
                got: amps.len(),
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub(crate) fn from_amplitudes_unchecked(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        StateVector { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![C0; dim];
        amps[index] = C1;
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amps)
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite state"));
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        other.check_qubits(self.n_qubits)?;
        Ok(linalg::dot(&self.amps, &other.amps))
    }

    /// Product state with `low` on the lower qubits and `high` above it.
    pub fn tensor(low: &StateVector, high: &StateVector) -> Result<StateVector> {
        let n = low.n_qubits + high.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::invalid(format!("tensor product of {n} qubits is too large")));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for h in &high.amps {
            amps.extend(low.amps.iter().map(|l| l * h));
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub(crate) fn check_qubits(&self, n_qubits: usize) -> Result<()> {
        if self.n_qubits != n_qubits {
            return Err(Error::SizeMismatch {
                expected: n_qubits,
                got: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Binary dump of little-endian (re, im) f64 pairs plus a JSON sidecar at `<path>.json`.
    pub fn dump(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for a in &self.amps {
            f.write_all(&a.re.to_le_bytes())?;
            f.write_all(&a.im.to_le_bytes())?;
        }
        f.flush()?;
        let sidecar = DumpSidecar {
            n_qubits: self.n_qubits,
            convention: DUMP_CONVENTION.to_string(),
        };
        let mut side = path.as_os_str().to_owned();
        side.push(".json");
        std::fs::write(side, serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut side = path.as_os_str().to_owned();
        side.push(".json");
        let meta: DumpSidecar = serde_json::from_str(&std::fs::read_to_string(side)?)?;
        if meta.convention != DUMP_CONVENTION {
            return Err(Error::invalid(format!("unknown state convention {}", meta.convention)));
        }
        let bytes = std::fs::read(path)?;
        let amps: Vec<Complex64> = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        StateVector::new(meta.n_qubits, amps)
    }
}

const DUMP_CONVENTION: &str = "little-endian-v1";

#[derive(Serialize, Deserialize)]
struct DumpSidecar {
    n_qubits: usize,
    convention: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::SizeMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        Ok(DensityMatrix { n_qubits, matrix })
    }

    pub fn pure(psi: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        DensityMatrix {
            n_qubits: psi.n_qubits,
            matrix: &v * v.adjoint(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Trace out every qubit not listed in `keep` (positions refer to this matrix's qubits).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let layout = SplitLayout::new(self.n_qubits, keep)?;
        let dk = 1usize << keep.len();
        let mut out = DMatrix::zeros(dk, dk);
        for r in 0..layout.rest_dim() {
            let rest = layout.rest_index(r);
            for a in 0..dk {
                let ia = rest | layout.kept_index(a);
                for b in 0..dk {
                    out[(a, b)] += self.matrix[(ia, rest | layout.kept_index(b))];
                }
            }
        }
        DensityMatrix::new(keep.len(), out)
    }

    /// Hermitian, unit trace and non-negative within `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let herm = (&self.matrix - self.matrix.adjoint()).camax();
        if herm > tol {
            return Err(Error::invalid(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr - C1).norm() > tol {
            return Err(Error::invalid(format!("density matrix trace {tr}")));
        }
        let e = linalg::eigh(self.matrix.clone());
        if e.values[0] < -tol {
            return Err(Error::invalid(format!("negative eigenvalue {}", e.values[0])));
        }
        Ok(())
    }
}

/// Bit bookkeeping for splitting a register into kept qubits (in the given
/// order, first listed = lowest bit of the reduced index) and the rest.
struct SplitLayout {
    kept: Vec<usize>,
    rest: Vec<usize>,
}

impl SplitLayout {
    fn new(n_qubits: usize, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::invalid("keep set must be nonempty"));
        }
        let mut seen = 0u64;
        for &q in keep {
            if q >= n_qubits {
                return Err(Error::IndexOutOfRange(format!("qubit {q} >= {n_qubits}")));
            }
            if seen >> q & 1 == 1 {
                return Err(Error::invalid(format!("qubit {q} listed twice")));
            }
            seen |= 1 << q;
        }
        let rest = (0..n_qubits).filter(|q| seen >> q & 1 == 0).collect();
        Ok(SplitLayout {
            kept: keep.to_vec(),
            rest,
        })
    }

    fn rest_dim(&self) -> usize {
        1 << self.rest.len()
    }

    fn scatter(bits: &[usize], local: usize) -> usize {
        bits.iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | ((local >> i & 1) << q))
    }

    fn kept_index(&self, local: usize) -> usize {
        Self::scatter(&self.kept, local)
    }

    fn rest_index(&self, local: usize) -> usize {
        Self::scatter(&self.rest, local)
    }

    /// Amplitudes reshaped as (kept local index) x (rest local index).
    fn matrix(&self, psi: &StateVector) -> DMatrix<Complex64> {
        let kept: Vec<usize> = (0..1 << self.kept.len()).map(|a| self.kept_index(a)).collect();
        let rest: Vec<usize> = (0..self.rest_dim()).map(|r| self.rest_index(r)).collect();
        DMatrix::from_fn(kept.len(), rest.len(), |a, r| psi.amps[kept[a] | rest[r]])
    }
}

/// Reduced density matrix on `keep`; `keep[0]` becomes the lowest bit.
pub fn reduced_density(psi: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let layout = SplitLayout::new(psi.n_qubits, keep)?;
    let m = layout.matrix(psi);
    DensityMatrix::new(keep.len(), &m * m.adjoint())
}

/// `tr(rho_keep^2)` without forming the larger of the two Gram matrices.
pub fn subsystem_purity(psi: &StateVector, keep: &[usize]) -> Result<f64> {
    let layout = SplitLayout::new(psi.n_qubits, keep)?;
    let m = layout.matrix(psi);
    let g = if m.nrows() <= m.ncols() {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    };
    Ok(g.iter().map(|x| x.norm_sqr()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurePolicy {
    Enumerate,
    Sample(u64),
}

#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    /// Bit `i` is the result on the `i`-th measured qubit (1 means Z = -1).
    pub bits: u64,
    pub probability: f64,
    pub state: StateVector,
}

pub const MEASURE_CUTOFF: f64 = 1e-14;

/// Projective Z-basis measurement of `qubits`.
pub fn measure_qubits(psi: &StateVector, qubits: &[usize], policy: MeasurePolicy) -> Result<Vec<MeasurementOutcome>> {
    let layout = SplitLayout::new(psi.n_qubits, qubits)?;
    let n_out = 1usize << qubits.len();
    let mut probs = vec![0.0; n_out];
    let mask = layout.kept_index(n_out - 1);
    let local_of = |b: usize| -> usize {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | ((b >> q & 1) << i))
    };
    for (b, a) in psi.amps.iter().enumerate() {
        probs[local_of(b & mask)] += a.norm_sqr();
    }
    let total: f64 = probs.iter().sum();
    let collapse = |outcome: usize| -> Result<StateVector> {
        let pattern = layout.kept_index(outcome);
        let amps = psi
            .amps
            .iter()
            .enumerate()
            .map(|(b, a)| if b & mask == pattern { *a } else { C0 })
            .collect();
        StateVector::from_amplitudes_unchecked(psi.n_qubits, amps).normalized()
    };
    match policy {
        MeasurePolicy::Enumerate => probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p / total > MEASURE_CUTOFF)
            .map(|(o, &p)| {
                Ok(MeasurementOutcome {
                    bits: o as u64,
                    probability: p / total,
                    state: collapse(o)?,
                })
            })
            .collect(),
        MeasurePolicy::Sample(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: f64 = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n_out - 1;
            for (o, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc && p > 0.0 {
                    pick = o;
                    break;
                }
            }
            Ok(vec![MeasurementOutcome {
                bits: pick as u64,
                probability: probs[pick] / total,
                state: collapse(pick)?,
            }])
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    /// Blocks acting on at most this many qubits are exponentiated densely.
    pub dense_max_qubits: usize,
    pub krylov: KrylovOptions,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            dense_max_qubits: 10,
            krylov: KrylovOptions::default(),
        }
    }
}

enum Block {
    /// Mutually commuting Hermitian terms `c P`, each exponentiated exactly.
    Commuting(Vec<(PauliString, f64)>),
    Dense { qubits: Vec<usize>, eig: HermitianEigen },
    Krylov(SparsePauliOperator),
}

/// Precomputed propagator for a Hermitian Pauli sum. Terms are split into
/// groups with disjoint qubit support (which commute), and each group gets
/// the cheapest exact method available.
pub struct Evolver {
    n_qubits: usize,
    blocks: Vec<Block>,
    opts: EvolveOptions,
}

impl Evolver {
    pub fn new(h: &OperatorSum, opts: EvolveOptions) -> Result<Self> {
        if !h.is_hermitian(1e-12 * h.max_abs_coefficient().max(1.0)) {
            return Err(Error::invalid("evolution requires a Hermitian operator"));
        }
        let n = h.n_qubits();
        let mut blocks = Vec::new();
        for comp in support_components(h) {
            let sub = OperatorSum::from_terms(
                n,
                comp.iter().map(|(s, c)| {
                    (*c, crate::fermion_algebra::PauliTerm::new(n, *s, Phase::ONE).expect("string fits"))
                }),
            )?;
            let support = sub.support();
            if sub.terms_commute() {
                blocks.push(Block::Commuting(sub.terms().iter().map(|(s, c)| (*s, c.re)).collect()));
            } else if (support.count_ones() as usize) <= opts.dense_max_qubits {
                let qubits: Vec<usize> = (0..n).filter(|q| support >> q & 1 == 1).collect();
                let local = compress(&sub, &qubits)?;
                blocks.push(Block::Dense {
                    qubits,
                    eig: linalg::eigh(local.to_dense()),
                });
            } else {
                blocks.push(Block::Krylov(SparsePauliOperator::new(&sub)));
            }
        }
        Ok(Evolver { n_qubits: n, blocks, opts })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `exp(-i H t) psi` (real mode) or `exp(-H t) psi` renormalized (imaginary mode).
    pub fn apply(&self, psi: &StateVector, t: f64, mode: TimeMode) -> Result<StateVector> {
        psi.check_qubits(self.n_qubits)?;
        let mut amps = psi.amps.clone();
        if t == 0.0 {
            return Ok(psi.clone());
        }
        for block in &self.blocks {
            match block {
                Block::Commuting(terms) => {
                    for (s, c) in terms {
                        apply_pauli_exponential(&mut amps, *s, c * t, mode);
                    }
                }
                Block::Dense { qubits, eig } => {
                    let shift = eig.values[0];
                    let u = match mode {
                        TimeMode::Real => eig.function(|l| Complex64::new(0.0, -l * t).exp()),
                        TimeMode::Imaginary => eig.function(|l| Complex64::new((-(l - shift) * t).exp(), 0.0)),
                    };
                    apply_local_matrix(&mut amps, qubits, &u);
                }
                Block::Krylov(op) => {
                    amps = linalg::krylov_expm(op, &amps, t, mode, &self.opts.krylov)?;
                }
            }
            if mode == TimeMode::Imaginary {
                let n = linalg::norm(&amps);
                amps.iter_mut().for_each(|a| *a /= n);
            }
        }
        Ok(StateVector::from_amplitudes_unchecked(self.n_qubits, amps))
    }

    /// `exp(-H tau) psi` without renormalization. Only available when every
    /// block is commuting or dense.
    pub fn apply_euclidean(&self, psi: &StateVector, tau: f64) -> Result<StateVector> {
        psi.check_qubits(self.n_qubits)?;
        let mut amps = psi.amps.clone();
        for block in &self.blocks {
            match block {
                Block::Commuting(terms) => {
                    for (s, c) in terms {
                        let a = c * tau;
                        apply_pauli_exponential(&mut amps, *s, a, TimeMode::Imaginary);
                        let undo = a.abs().exp();
                        amps.iter_mut().for_each(|x| *x *= undo);
                    }
                }
                Block::Dense { qubits, eig } => {
                    let u = eig.function(|l| Complex64::new((-l * tau).exp(), 0.0));
                    apply_local_matrix(&mut amps, qubits, &u);
                }
                Block::Krylov(_) => {
                    return Err(Error::invalid(
                        "unnormalized imaginary-time evolution needs blocks small enough for dense exponentiation",
                    ))
                }
            }
        }
        Ok(StateVector::from_amplitudes_unchecked(self.n_qubits, amps))
    }
}

/// `exp(-i H t) psi` or renormalized `exp(-H t) psi`.
pub fn evolve(psi: &StateVector, h: &OperatorSum, t: f64, mode: TimeMode) -> Result<StateVector> {
    Evolver::new(h, EvolveOptions::default())?.apply(psi, t, mode)
}

pub fn evolve_with(psi: &StateVector, h: &OperatorSum, t: f64, mode: TimeMode, opts: EvolveOptions) -> Result<StateVector> {
    Evolver::new(h, opts)?.apply(psi, t, mode)
}

/// Group terms into connected components of overlapping support.
fn support_components(h: &OperatorSum) -> Vec<Vec<(PauliString, Complex64)>> {
    let mut comps: Vec<(u64, Vec<(PauliString, Complex64)>)> = Vec::new();
    for &(s, c) in h.terms() {
        let mut support = s.support();
        let mut members = vec![(s, c)];
        let mut i = 0;
        while i < comps.len() {
            if comps[i].0 & support != 0 && support != 0 {
                let (m, t) = comps.swap_remove(i);
                support |= m;
                members.extend(t);
                i = 0;
            } else {
                i += 1;
            }
        }
        comps.push((support, members));
    }
    comps.sort_by_key(|(m, _)| *m);
    comps.into_iter().map(|(_, t)| t).collect()
}

/// Re-express an operator supported on `qubits` as an operator on `qubits.len()` qubits.
fn compress(op: &OperatorSum, qubits: &[usize]) -> Result<OperatorSum> {
    let squeeze = |m: u64| -> u64 {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | ((m >> q & 1) << i))
    };
    OperatorSum::from_terms(
        qubits.len(),
        op.terms().iter().map(|(s, c)| {
            let t = crate::fermion_algebra::PauliTerm::new(
                qubits.len(),
                PauliString::new(squeeze(s.x), squeeze(s.z)),
                Phase::ONE,
            )
            .expect("compressed string fits");
            (*c, t)
        }),
    )
}

/// In place `exp(-i a P)` (real) or `exp(-a P)` scaled by `exp(-|a|)` (imaginary).
fn apply_pauli_exponential(amps: &mut [Complex64], s: PauliString, a: f64, mode: TimeMode) {
    let (diag, off) = match mode {
        TimeMode::Real => (Complex64::new(a.cos(), 0.0), Complex64::new(0.0, -a.sin())),
        TimeMode::Imaginary => {
            let e = (-2.0 * a.abs()).exp();
            (Complex64::new(0.5 * (1.0 + e), 0.0), Complex64::new(-a.signum() * 0.5 * (1.0 - e), 0.0))
        }
    };
    let x = s.x as usize;
    let y = s.y_count() as i64;
    let phase = |b: usize| Phase::from_exponent(y + 2 * (s.z & b as u64).count_ones() as i64).value();
    if x == 0 {
        for (b, v) in amps.iter_mut().enumerate() {
            *v *= diag + off * phase(b);
        }
        return;
    }
    let low = x.trailing_zeros();
    for b in 0..amps.len() {
        if b >> low & 1 == 1 {
            continue;
        }
        let b2 = b ^ x;
        let (v1, v2) = (amps[b], amps[b2]);
        // P|b> = phase(b) |b2>, P|b2> = phase(b2) |b>
        amps[b] = diag * v1 + off * phase(b2) * v2;
        amps[b2] = diag * v2 + off * phase(b) * v1;
    }
}

/// Apply a `2^k x 2^k` matrix on the listed qubits (`qubits[0]` is the lowest local bit).
pub(crate) fn apply_local_matrix(amps: &mut [Complex64], qubits: &[usize], u: &DMatrix<Complex64>) {
    let k = qubits.len();
    let dk = 1usize << k;
    let offsets: Vec<usize> = (0..dk)
        .map(|l| qubits.iter().enumerate().fold(0, |acc, (i, &q)| acc | ((l >> i & 1) << q)))
        .collect();
    let mask = offsets[dk - 1];
    let mut buf = vec![C0; dk];
    let mut out = vec![C0; dk];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            buf[l] = amps[base | off];
        }
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..dk).map(|c| u[(r, c)] * buf[c]).sum();
        }
        for (l, off) in offsets.iter().enumerate() {
            amps[base | off] = out[l];
        }
    }
}

/// Largest-magnitude amplitude made real positive (ties broken toward the lower index).
fn fix_global_phase(mut psi: StateVector) -> StateVector {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, a) in psi.amps.iter().enumerate() {
        let m = a.norm();
        if m > best_mag * (1.0 + 1e-12) + 1e-15 {
            best = i;
            best_mag = m;
        }
    }
    let ph = psi.amps[best].conj() / best_mag;
    psi.amps.iter_mut().for_each(|a| *a *= ph);
    psi
}

/// The state annihilated by `(psi^l_j + i psi^r_j)/sqrt(2)` for every `j`, on `N` qubits.
pub fn max_entangled_state(n: usize) -> Result<StateVector> {
    let annihilators: Vec<OperatorSum> = (0..n)
        .map(|j| {
            let l = majorana(MajoranaIndex::left(j), n)?;
            let r = majorana(MajoranaIndex::right(j), n)?;
            Ok(l.add(&r.scale(Complex64::new(0.0, 1.0)))?.scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
        })
        .collect::<Result<_>>()?;
    // The product of all annihilators is rank one with range |I>; try basis seeds until it is nonzero.
    for seed in 0..(1usize << n) {
        let mut v = StateVector::basis(n, seed)?;
        for c in &annihilators {
            v = c.apply(&v)?;
        }
        if v.norm() > 1e-6 {
            return Ok(fix_global_phase(v.normalized()?));
        }
    }
    Err(Error::invalid("no seed produced the maximally entangled state"))
}

/// `exp(-beta H_L / 2)|I>` normalized.
pub fn thermofield_double(h_left: &OperatorSum, beta: f64) -> Result<StateVector> {
    thermofield_double_with(h_left, beta, EvolveOptions::default())
}

pub fn thermofield_double_with(h_left: &OperatorSum, beta: f64, opts: EvolveOptions) -> Result<StateVector> {
    if beta < 0.0 || !beta.is_finite() {
        return Err(Error::invalid(format!("beta must be finite and >= 0, got {beta}")));
    }
    let i_state = max_entangled_state(h_left.n_qubits())?;
    if beta == 0.0 {
        return Ok(i_state);
    }
    Evolver::new(h_left, opts)?.apply(&i_state, beta / 2.0, TimeMode::Imaginary)
}
