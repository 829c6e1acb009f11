//! Random SYK and PG-commuting Hamiltonians and the left-right interactions.
//!
//! Couplings are drawn per tuple in lexicographic order from a ChaCha20
//! stream seeded with the instance seed, using the ziggurat standard normal
//! of `rand_distr`, scaled by the square root of the ensemble variance.

use itertools::Itertools;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion_algebra::{
    gamma_string, majorana_string, pauli_mul, GammaIndex, MajoranaIndex, OperatorSum, PauliTerm, Side,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Syk,
    #[serde(rename = "pg")]
    PgCommuting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub idx: Vec<usize>,
    pub value: f64,
}

/// One instantiation of a two-sided model: `H_L` and `H_R` share couplings.
///
/// For SYK, `idx` lists the `q` Majorana indices of a term. For the PG model
/// it lists `q/2` zero-based pair labels `i`, each standing for
/// `psi_{2i} psi_{2i+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub model: ModelKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    #[serde(rename = "J")]
    pub scale: f64,
    pub seed: u64,
    pub entries: Vec<Coupling>,
}

pub type SykCouplings = Couplings;
pub type PgCouplings = Couplings;

fn check_nq(n: usize, q: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::invalid(format!("N must be positive and even, got {n}")));
    }
    if q == 0 || q % 2 != 0 || q > n {
        return Err(Error::invalid(format!("q must be even with 2 <= q <= N, got q = {q}, N = {n}")));
    }
    if n > 30 {
        return Err(Error::invalid(format!("N = {n} is beyond the supported range")));
    }
    Ok(())
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// `2^{q-1} (q-1)! / (q N^{q-1}) J^2`
pub fn syk_variance(n: usize, q: usize, scale: f64) -> f64 {
    2f64.powi(q as i32 - 1) * factorial(q - 1) / (q as f64 * (n as f64).powi(q as i32 - 1)) * scale * scale
}

/// `2^{q-1} (q/2-1)! (N/2-q/2)! / (N/2-1)! J^2`
pub fn pg_variance(n: usize, q: usize, scale: f64) -> f64 {
    2f64.powi(q as i32 - 1) * factorial(q / 2 - 1) * factorial(n / 2 - q / 2) / factorial(n / 2 - 1) * scale * scale
}

fn draw(tuples: Vec<Vec<usize>>, variance: f64, seed: u64) -> Vec<Coupling> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let sd = variance.sqrt();
    tuples
        .into_iter()
        .map(|idx| {
            let g: f64 = StandardNormal.sample(&mut rng);
            Coupling { idx, value: sd * g }
        })
        .collect()
}

/// Draw SYK couplings; also returns the left Hamiltonian on the `N`-qubit doubled register.
pub fn sample_syk(n: usize, q: usize, scale: f64, seed: u64) -> Result<(SykCouplings, OperatorSum)> {
    check_nq(n, q)?;
    let tuples: Vec<Vec<usize>> = (0..n).combinations(q).collect();
    let c = Couplings {
        model: ModelKind::Syk,
        n,
        q,
        scale,
        seed,
        entries: draw(tuples, syk_variance(n, q, scale), seed),
    };
    let h = c.hamiltonian(Side::Left)?;
    Ok((c, h))
}

/// Draw PG-commuting couplings over tuples of `q/2` distinct pair operators.
pub fn sample_pg_commuting(n: usize, q: usize, scale: f64, seed: u64) -> Result<(PgCouplings, OperatorSum)> {
    check_nq(n, q)?;
    if q / 2 > n / 2 {
        return Err(Error::invalid("q/2 exceeds the number of pair operators"));
    }
    let tuples: Vec<Vec<usize>> = (0..n / 2).combinations(q / 2).collect();
    let c = Couplings {
        model: ModelKind::PgCommuting,
        n,
        q,
        scale,
        seed,
        entries: draw(tuples, pg_variance(n, q, scale), seed),
    };
    let h = c.hamiltonian(Side::Left)?;
    Ok((c, h))
}

pub fn sample(model: ModelKind, n: usize, q: usize, scale: f64, seed: u64) -> Result<Couplings> {
    match model {
        ModelKind::Syk => sample_syk(n, q, scale, seed).map(|(c, _)| c),
        ModelKind::PgCommuting => sample_pg_commuting(n, q, scale, seed).map(|(c, _)| c),
    }
}

impl Couplings {
    pub fn theoretical_variance(&self) -> f64 {
        match self.model {
            ModelKind::Syk => syk_variance(self.n, self.q, self.scale),
            ModelKind::PgCommuting => pg_variance(self.n, self.q, self.scale),
        }
    }

    /// Majorana indices of one term.
    fn majorana_indices(&self, c: &Coupling) -> Vec<usize> {
        match self.model {
            ModelKind::Syk => c.idx.clone(),
            ModelKind::PgCommuting => c.idx.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect(),
        }
    }

    /// Single-side Hamiltonian on the `N`-qubit doubled register.
    ///
    /// The ordered Majorana product is multiplied by `i` when it is
    /// anti-Hermitian (q = 2 mod 4). The right copy carries an extra `i^q`
    /// so that `(H_L - H_R)|I> = 0` for every even q; it is 1 for q = 0 mod 4.
    pub fn hamiltonian(&self, side: Side) -> Result<OperatorSum> {
        check_nq(self.n, self.q)?;
        let n = self.n;
        let q = self.q;
        let herm = if (q * (q - 1) / 2) % 2 == 1 {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        let side_factor = match side {
            Side::Left => Complex64::new(1.0, 0.0),
            Side::Right => Complex64::new(0.0, 1.0).powu(q as u32),
        };
        let norm = 2f64.powf(-(q as f64) / 2.0);
        let singles: Vec<PauliTerm> = (0..n)
            .map(|j| majorana_string(MajoranaIndex::new(side, j), n))
            .collect::<Result<_>>()?;
        let terms = self
            .entries
            .iter()
            .map(|c| {
                let idx = self.majorana_indices(c);
                if idx.iter().any(|&j| j >= n) {
                    return Err(Error::IndexOutOfRange(format!("coupling index {:?} exceeds N = {n}", c.idx)));
                }
                let mut t = PauliTerm::identity(n);
                for &j in &idx {
                    t = pauli_mul(&t, &singles[j])?;
                }
                Ok((herm * side_factor * c.value * norm, t))
            })
            .collect::<Result<Vec<_>>>()?;
        OperatorSum::from_terms(n, terms)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Couplings = serde_json::from_str(s)?;
        check_nq(c.n, c.q)?;
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Interaction {
    V,
    #[serde(rename = "Vb")]
    Vb,
}

impl std::str::FromStr for Interaction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "V" => Ok(Interaction::V),
            "Vb" => Ok(Interaction::Vb),
            other => Err(Error::invalid(format!("unknown interaction `{other}` (expected V or Vb)"))),
        }
    }
}

/// `V = i sum_j psi^l_j psi^r_j` or `V^b = sum_j Gamma^(2)l_j Gamma^(2)r_j`.
pub fn build_interaction(kind: Interaction, n: usize) -> Result<OperatorSum> {
    check_nq(n, 2)?;
    match kind {
        Interaction::V => {
            let terms = (0..n)
                .map(|j| {
                    let t = pauli_mul(
                        &majorana_string(MajoranaIndex::left(j), n)?,
                        &majorana_string(MajoranaIndex::right(j), n)?,
                    )?;
                    Ok((Complex64::new(0.0, 0.5), t))
                })
                .collect::<Result<Vec<_>>>()?;
            OperatorSum::from_terms(n, terms)
        }
        Interaction::Vb => {
            let terms = (0..n / 2)
                .map(|j| {
                    let l = gamma_string(&GammaIndex::new(Side::Left, &[2 * j, 2 * j + 1], n)?, n)?;
                    let r = gamma_string(&GammaIndex::new(Side::Right, &[2 * j, 2 * j + 1], n)?, n)?;
                    Ok((Complex64::new(1.0, 0.0), pauli_mul(&l, &r)?))
                })
                .collect::<Result<Vec<_>>>()?;
            OperatorSum::from_terms(n, terms)
        }
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub master_seed: u64,
    pub count: usize,
}

impl EnsembleSpec {
    pub fn new(master_seed: u64, count: usize) -> Self {
        EnsembleSpec { master_seed, count }
    }

    /// `splitmix64(splitmix64(master) ^ index)`
    pub fn member_seed(&self, index: usize) -> u64 {
        splitmix64(splitmix64(self.master_seed) ^ index as u64)
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.count).map(|i| self.member_seed(i))
    }
}
