//! Bit-packed Pauli strings and the Jordan-Wigner Majorana realization.
//!
//! A [`PauliString`] stores one letter per qubit as two masks: bit `k` of
//! `x` and `z` encode the letter on qubit `k` as I=(0,0), X=(1,0), Z=(0,1),
//! Y=(1,1). A [`PauliTerm`] adds a fourth-root-of-unity phase.
//!
//! Qubit layout of the doubled system with `N` Majoranas per side: left
//! fermions live on qubits `0..N/2`, right fermions on `N/2..N`. Majorana
//! `2j` carries an X and `2j+1` a Y on its qubit, preceded by a Z string over
//! every lower qubit (so right Majoranas carry the full left parity string).

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::StateVector;

pub const MAX_QUBITS: usize = 63;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Power of `i`, stored mod 4.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn value(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// Unphased tensor product of single-qubit Paulis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        PauliString { x, z }
    }

    pub fn single(qubit: usize, letter: Pauli) -> Self {
        let (x, z) = letter.bits();
        PauliString {
            x: (x as u64) << qubit,
            z: (z as u64) << qubit,
        }
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        match ((self.x >> qubit) & 1, (self.z >> qubit) & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product of two strings: `self * other = phase * result`.
    pub fn mul(&self, other: &PauliString) -> (Phase, PauliString) {
        // Work in the X^x Z^z form, where Y = i X Z.
        let out = PauliString {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        let k = self.y_count() as i64 + other.y_count() as i64 + 2 * (self.z & other.x).count_ones() as i64
            - out.y_count() as i64;
        (Phase::from_exponent(k), out)
    }

    /// Sign of the diagonal part acting on basis state `b`, as an exponent of i:
    /// `P|b> = i^{k} |b ^ x>`.
    #[inline]
    pub fn action_exponent(&self, b: u64) -> u32 {
        self.y_count() + 2 * (self.z & b).count_ones()
    }

    fn check_fits(&self, n_qubits: usize) -> Result<()> {
        let mask = qubit_mask(n_qubits);
        if self.support() & !mask != 0 {
            return Err(Error::IndexOutOfRange(format!(
                "Pauli string {:?} acts outside {n_qubits} qubits",
                self
            )));
        }
        Ok(())
    }
}

pub(crate) fn qubit_mask(n_qubits: usize) -> u64 {
    if n_qubits >= 64 {
        u64::MAX
    } else {
        (1u64 << n_qubits) - 1
    }
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::invalid(format!("at most {MAX_QUBITS} qubits supported, got {n_qubits}")));
    }
    Ok(())
}

/// A Pauli string with a phase in {1, i, -1, -i}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliTerm {
    n_qubits: usize,
    string: PauliString,
    phase: Phase,
}

impl PauliTerm {
    pub fn new(n_qubits: usize, string: PauliString, phase: Phase) -> Result<Self> {
        check_qubits(n_qubits)?;
        string.check_fits(n_qubits)?;
        Ok(PauliTerm {
            n_qubits,
            string,
            phase,
        })
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliTerm {
            n_qubits,
            string: PauliString::IDENTITY,
            phase: Phase::ONE,
        }
    }

    /// Parse letters with qubit 0 first, e.g. `"XIZ"` is X on qubit 0 and Z on qubit 2.
    pub fn from_letters(letters: &str) -> Result<Self> {
        let mut s = PauliString::IDENTITY;
        for (k, ch) in letters.chars().enumerate() {
            let p = match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::invalid(format!("unknown Pauli letter '{other}'"))),
            };
            let one = PauliString::single(k, p);
            s.x |= one.x;
            s.z |= one.z;
        }
        PauliTerm::new(letters.chars().count(), s, Phase::ONE)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn string(&self) -> PauliString {
        self.string
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn coefficient(&self) -> Complex64 {
        self.phase.value()
    }

    pub fn mul(&self, other: &PauliTerm) -> Result<PauliTerm> {
        pauli_mul(self, other)
    }

    pub fn adjoint(&self) -> PauliTerm {
        PauliTerm {
            phase: self.phase.conj(),
            ..*self
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn commutes_with(&self, other: &PauliTerm) -> bool {
        self.string.commutes_with(&other.string)
    }

    /// Move the term onto qubits `offset..offset+n` of an `n_total`-qubit register.
    pub fn embed(&self, offset: usize, n_total: usize) -> Result<PauliTerm> {
        if offset + self.n_qubits > n_total {
            return Err(Error::IndexOutOfRange(format!(
                "cannot place {} qubits at offset {offset} in {n_total}",
                self.n_qubits
            )));
        }
        PauliTerm::new(
            n_total,
            PauliString::new(self.string.x << offset, self.string.z << offset),
            self.phase,
        )
    }

    /// `out += coeff * self * input`.
    pub fn apply_add(&self, coeff: Complex64, input: &[Complex64], out: &mut [Complex64]) {
        let x = self.string.x as usize;
        let base = self.phase.exponent() as u32 + self.string.y_count();
        let pre = [
            coeff * Phase::from_exponent(base as i64).value(),
            coeff * Phase::from_exponent(base as i64 + 2).value(),
        ];
        let z = self.string.z;
        for (b, amp) in input.iter().enumerate() {
            let sign = ((z & b as u64).count_ones() & 1) as usize;
            out[b ^ x] += pre[sign] * amp;
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        apply_term(self, psi)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        let mut col = vec![C0; dim];
        let mut out = vec![C0; dim];
        for j in 0..dim {
            col.iter_mut().for_each(|c| *c = C0);
            out.iter_mut().for_each(|c| *c = C0);
            col[j] = Complex64::new(1.0, 0.0);
            self.apply_add(Complex64::new(1.0, 0.0), &col, &mut out);
            for (i, v) in out.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.phase.exponent() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{p}")?;
        for k in 0..self.n_qubits {
            let c = match self.string.letter(k) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Exact phased product `a * b`.
pub fn pauli_mul(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::SizeMismatch {
            expected: a.n_qubits,
            got: b.n_qubits,
        });
    }
    let (ph, s) = a.string.mul(&b.string);
    Ok(PauliTerm {
        n_qubits: a.n_qubits,
        string: s,
        phase: a.phase * b.phase * ph,
    })
}

/// Complex-weighted sum of Pauli strings, one entry per distinct string,
/// kept sorted by string.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSum {
    n_qubits: usize,
    terms: Vec<(PauliString, Complex64)>,
}

impl OperatorSum {
    pub fn zero(n_qubits: usize) -> Self {
        OperatorSum {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        OperatorSum::from_term(Complex64::new(1.0, 0.0), PauliTerm::identity(n_qubits))
    }

    pub fn from_term(coeff: Complex64, term: PauliTerm) -> Self {
        let mut s = OperatorSum::zero(term.n_qubits);
        let c = coeff * term.phase.value();
        if c != C0 {
            s.terms.push((term.string, c));
        }
        s
    }

    /// Collect `(coefficient, term)` pairs, merging equal strings and dropping exact zeros.
    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, PauliTerm)>,
    {
        check_qubits(n_qubits)?;
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (c, t) in terms {
            if t.n_qubits != n_qubits {
                return Err(Error::SizeMismatch {
                    expected: n_qubits,
                    got: t.n_qubits,
                });
            }
            *acc.entry(t.string).or_insert(C0) += c * t.phase.value();
        }
        Ok(OperatorSum::from_map(n_qubits, acc))
    }

    fn from_map(n_qubits: usize, acc: BTreeMap<PauliString, Complex64>) -> Self {
        OperatorSum {
            n_qubits,
            terms: acc.into_iter().filter(|(_, c)| *c != C0).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(PauliString, Complex64)] {
        &self.terms
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms
            .binary_search_by(|(k, _)| k.cmp(s))
            .map(|i| self.terms[i].1)
            .unwrap_or(C0)
    }

    pub fn support(&self) -> u64 {
        self.terms.iter().fold(0, |m, (s, _)| m | s.support())
    }

    pub fn scale(&self, c: Complex64) -> OperatorSum {
        let acc = self.terms.iter().map(|(s, v)| (*s, v * c)).collect();
        OperatorSum::from_map(self.n_qubits, acc)
    }

    pub fn add(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.check_same(other)?;
        let mut acc: BTreeMap<PauliString, Complex64> = self.terms.iter().copied().collect();
        for (s, c) in &other.terms {
            *acc.entry(*s).or_insert(C0) += c;
        }
        Ok(OperatorSum::from_map(self.n_qubits, acc))
    }

    pub fn sub(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.check_same(other)?;
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (ph, s) = a.mul(b);
                *acc.entry(s).or_insert(C0) += ca * cb * ph.value();
            }
        }
        Ok(OperatorSum::from_map(self.n_qubits, acc))
    }

    pub fn commutator(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn anticommutator(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    pub fn adjoint(&self) -> OperatorSum {
        OperatorSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(s, c)| (*s, c.conj())).collect(),
        }
    }

    /// Term-wise Hermiticity check: every coefficient real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|(_, c)| c.im.abs() <= tol)
    }

    /// Largest coefficient magnitude (zero for the empty sum).
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs_coefficient() <= tol
    }

    /// True when every pair of strings commutes.
    pub fn terms_commute(&self) -> bool {
        self.terms
            .iter()
            .enumerate()
            .all(|(i, (a, _))| self.terms[i + 1..].iter().all(|(b, _)| a.commutes_with(b)))
    }

    pub fn embed(&self, offset: usize, n_total: usize) -> Result<OperatorSum> {
        if offset + self.n_qubits > n_total {
            return Err(Error::IndexOutOfRange(format!(
                "cannot place {} qubits at offset {offset} in {n_total}",
                self.n_qubits
            )));
        }
        check_qubits(n_total)?;
        let mut terms: Vec<_> = self
            .terms
            .iter()
            .map(|(s, c)| (PauliString::new(s.x << offset, s.z << offset), *c))
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(OperatorSum {
            n_qubits: n_total,
            terms,
        })
    }

    /// `out += self * input`.
    pub fn apply_add(&self, input: &[Complex64], out: &mut [Complex64]) {
        for (s, c) in &self.terms {
            PauliTerm {
                n_qubits: self.n_qubits,
                string: *s,
                phase: Phase::ONE,
            }
            .apply_add(*c, input, out);
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        apply_sum(self, psi)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (s, c) in &self.terms {
            for b in 0..dim {
                let k = s.action_exponent(b as u64);
                m[(b ^ s.x as usize, b)] += c * Phase::from_exponent(k as i64).value();
            }
        }
        m
    }

    fn check_same(&self, other: &OperatorSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        Ok(())
    }
}

impl From<PauliTerm> for OperatorSum {
    fn from(t: PauliTerm) -> Self {
        OperatorSum::from_term(Complex64::new(1.0, 0.0), t)
    }
}

pub fn apply_term(op: &PauliTerm, psi: &StateVector) -> Result<StateVector> {
    psi.check_qubits(op.n_qubits)?;
    let mut out = vec![C0; psi.dim()];
    op.apply_add(Complex64::new(1.0, 0.0), psi.amplitudes(), &mut out);
    Ok(StateVector::from_amplitudes_unchecked(op.n_qubits, out))
}

pub fn apply_sum(op: &OperatorSum, psi: &StateVector) -> Result<StateVector> {
    psi.check_qubits(op.n_qubits)?;
    let mut out = vec![C0; psi.dim()];
    op.apply_add(psi.amplitudes(), &mut out);
    Ok(StateVector::from_amplitudes_unchecked(op.n_qubits, out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Side {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

fn check_n_majorana(n: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::invalid(format!("N must be positive and even, got {n}")));
    }
    if n > MAX_QUBITS {
        return Err(Error::invalid(format!("N = {n} exceeds the {MAX_QUBITS}-qubit limit")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MajoranaIndex {
    pub side: Side,
    pub j: usize,
}

impl MajoranaIndex {
    pub fn new(side: Side, j: usize) -> Self {
        MajoranaIndex { side, j }
    }

    pub fn left(j: usize) -> Self {
        MajoranaIndex::new(Side::Left, j)
    }

    pub fn right(j: usize) -> Self {
        MajoranaIndex::new(Side::Right, j)
    }
}

/// `sqrt(2) * psi` as a unit-coefficient Pauli string on the `N`-qubit doubled system.
pub fn majorana_string(idx: MajoranaIndex, n: usize) -> Result<PauliTerm> {
    check_n_majorana(n)?;
    if idx.j >= n {
        return Err(Error::IndexOutOfRange(format!("Majorana index {} >= N = {n}", idx.j)));
    }
    let q = idx.j / 2
        + match idx.side {
            Side::Left => 0,
            Side::Right => n / 2,
        };
    let bit = 1u64 << q;
    let z = (bit - 1) | if idx.j % 2 == 1 { bit } else { 0 };
    PauliTerm::new(n, PauliString::new(bit, z), Phase::ONE)
}

/// The Majorana operator `psi` (a single Pauli string weighted by 1/sqrt(2)).
pub fn majorana(idx: MajoranaIndex, n: usize) -> Result<OperatorSum> {
    let t = majorana_string(idx, n)?;
    Ok(OperatorSum::from_term(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0), t))
}

/// A basis operator label: side plus a set of Majorana indices stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaIndex {
    pub side: Side,
    mask: u64,
}

impl GammaIndex {
    /// From a strictly increasing index list.
    pub fn new(side: Side, indices: &[usize], n: usize) -> Result<Self> {
        check_n_majorana(n)?;
        let mut mask = 0u64;
        for w in indices.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::invalid(format!("Gamma indices must be strictly increasing: {indices:?}")));
            }
        }
        for &j in indices {
            if j >= n {
                return Err(Error::IndexOutOfRange(format!("Majorana index {j} >= N = {n}")));
            }
            mask |= 1 << j;
        }
        Ok(GammaIndex { side, mask })
    }

    pub fn from_mask(side: Side, mask: u64, n: usize) -> Result<Self> {
        check_n_majorana(n)?;
        if mask & !qubit_mask(n) != 0 {
            return Err(Error::IndexOutOfRange(format!("mask {mask:#x} exceeds N = {n}")));
        }
        Ok(GammaIndex { side, mask })
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..64).filter(|j| self.mask >> j & 1 == 1).collect()
    }
}

/// Phase `i^{s(s-1)/2}` that makes an ordered product of `s` Majorana strings Hermitian.
pub fn hermitian_phase(s: usize) -> Phase {
    Phase::from_exponent((s * s.saturating_sub(1) / 2) as i64)
}

/// `Gamma_J = 2^{s/2} i^{s(s-1)/2} psi_{j1}...psi_{js}` as a single phased Pauli string.
pub fn gamma_string(g: &GammaIndex, n: usize) -> Result<PauliTerm> {
    check_n_majorana(n)?;
    let mut acc = PauliTerm::identity(n);
    for j in g.indices() {
        acc = pauli_mul(&acc, &majorana_string(MajoranaIndex::new(g.side, j), n)?)?;
    }
    Ok(acc.with_phase(acc.phase * hermitian_phase(g.size())))
}

pub fn gamma_operator(g: &GammaIndex, n: usize) -> Result<OperatorSum> {
    Ok(gamma_string(g, n)?.into())
}

/// Unphased ordered products `prod_{j in J} sqrt(2) psi_j` for every subset mask of `N` Majoranas
/// on one side, built incrementally (each mask extends the one without its top bit).
pub(crate) fn majorana_products(side: Side, n: usize) -> Result<Vec<(Phase, PauliString)>> {
    check_n_majorana(n)?;
    if n > 30 {
        return Err(Error::invalid(format!("subset table for N = {n} is too large")));
    }
    let singles: Vec<PauliString> = (0..n)
        .map(|j| majorana_string(MajoranaIndex::new(side, j), n).map(|t| t.string()))
        .collect::<Result<_>>()?;
    let mut table = vec![(Phase::ONE, PauliString::IDENTITY); 1 << n];
    for mask in 1usize..(1 << n) {
        let top = usize::BITS - 1 - mask.leading_zeros();
        let (ph, s) = table[mask ^ (1 << top)];
        let (ph2, s2) = s.mul(&singles[top as usize]);
        table[mask] = (ph * ph2, s2);
    }
    Ok(table)
}
