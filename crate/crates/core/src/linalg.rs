//! Dense Hermitian eigensolver wrapper, Pauli-sum matrix-vector products,
//! Lanczos-based Krylov exponentials and a block Krylov eigensolver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fermion_algebra::{OperatorSum, Phase, PauliString};

const C0: Complex64 = Complex64::new(0.0, 0.0);

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn scale(alpha: f64, x: &mut [Complex64]) {
    x.iter_mut().for_each(|v| *v *= alpha);
}

/// Eigenpairs of a Hermitian matrix, ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

pub fn eigh(m: DMatrix<Complex64>) -> HermitianEigen {
    let dim = m.nrows();
    let se = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| se.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

impl HermitianEigen {
    /// `V f(lambda) V^dagger` for a scalar function of the eigenvalues.
    pub fn function(&self, f: impl Fn(f64) -> Complex64) -> DMatrix<Complex64> {
        let dim = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &lam) in self.values.iter().enumerate() {
            let fl = f(lam);
            for r in 0..dim {
                scaled[(r, c)] *= fl;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Something that can multiply a vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, input: &[Complex64], out: &mut [Complex64]);
}

struct Group {
    x: usize,
    terms: Vec<(PauliString, Complex64)>,
    diag: Option<Vec<Complex64>>,
}

/// Pauli sum grouped by X-mask. For each group the diagonal factor
/// `sum_k c_k i^{...} (-1)^{|z_k & b|}` is precomputed when it fits in memory.
pub struct SparsePauliOperator {
    dim: usize,
    groups: Vec<Group>,
}

const DIAG_CACHE_LIMIT: usize = 1 << 24;

impl SparsePauliOperator {
    pub fn new(op: &OperatorSum) -> Self {
        let dim = 1usize << op.n_qubits();
        let mut groups: Vec<Group> = Vec::new();
        let mut sorted: Vec<_> = op.terms().to_vec();
        sorted.sort_by_key(|(s, _)| (s.x, s.z));
        for (s, c) in sorted {
            match groups.last_mut() {
                Some(g) if g.x == s.x as usize => g.terms.push((s, c)),
                _ => groups.push(Group {
                    x: s.x as usize,
                    terms: vec![(s, c)],
                    diag: None,
                }),
            }
        }
        if groups.len() * dim <= DIAG_CACHE_LIMIT {
            for g in &mut groups {
                let d: Vec<Complex64> = (0..dim)
                    .into_par_iter()
                    .map(|b| group_factor(&g.terms, b as u64))
                    .collect();
                g.diag = Some(d);
            }
        }
        SparsePauliOperator { dim, groups }
    }
}

#[inline]
fn group_factor(terms: &[(PauliString, Complex64)], b: u64) -> Complex64 {
    terms
        .iter()
        .map(|(s, c)| c * Phase::from_exponent(s.action_exponent(b) as i64).value())
        .sum()
}

impl LinearOperator for SparsePauliOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, input: &[Complex64], out: &mut [Complex64]) {
        // out[a] = sum_g diag_g[a ^ x_g] * input[a ^ x_g]
        let kernel = |(a, o): (usize, &mut Complex64)| {
            let mut acc = C0;
            for g in &self.groups {
                let b = a ^ g.x;
                let f = match &g.diag {
                    Some(d) => d[b],
                    None => group_factor(&g.terms, b as u64),
                };
                acc += f * input[b];
            }
            *o = acc;
        };
        if self.dim >= 1 << 12 {
            out.par_iter_mut().enumerate().for_each(kernel);
        } else {
            out.iter_mut().enumerate().for_each(kernel);
        }
    }
}

impl LinearOperator for DMatrix<Complex64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, input: &[Complex64], out: &mut [Complex64]) {
        let v = DVector::from_column_slice(input);
        let r = self * v;
        out.copy_from_slice(r.as_slice());
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KrylovOptions {
    pub subspace_dim: usize,
    pub tolerance: f64,
    pub max_halvings: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            subspace_dim: 30,
            tolerance: 1e-10,
            max_halvings: 40,
        }
    }
}

/// Lanczos recurrence with full reorthogonalization. Returns (basis, alpha, beta)
/// where `beta[j]` couples basis vectors j and j+1; `beta` has one extra entry
/// (the residual norm) unless the recurrence broke down.
fn lanczos_basis(
    op: &dyn LinearOperator,
    start: &[Complex64],
    m: usize,
    locked: &[Vec<Complex64>],
) -> (Vec<Vec<Complex64>>, Vec<f64>, Vec<f64>) {
    let dim = op.dim();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let mut v = start.to_vec();
    let mut w = vec![C0; dim];
    for j in 0..m {
        basis.push(v.clone());
        op.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        // two passes of classical Gram-Schmidt against everything kept so far
        for _ in 0..2 {
            for u in locked.iter().chain(basis.iter()) {
                let c = dot(u, &w);
                axpy(-c, u, &mut w);
            }
        }
        let b = norm(&w);
        beta.push(b);
        if b < 1e-13 || j + 1 == m {
            break;
        }
        v.copy_from_slice(&w);
        scale(1.0 / b, &mut v);
    }
    (basis, alpha, beta)
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeMode {
    /// `exp(-i H t)`
    Real,
    /// `exp(-H t)`, renormalized
    Imaginary,
}

/// `exp(-i H t) v` or the renormalized `exp(-H t) v` by restarted Lanczos
/// steps with step halving on a failed error estimate.
pub fn krylov_expm(
    op: &dyn LinearOperator,
    v: &[Complex64],
    t: f64,
    mode: TimeMode,
    opts: &KrylovOptions,
) -> Result<Vec<Complex64>> {
    let mut w = v.to_vec();
    let mut w_norm = norm(&w);
    if w_norm == 0.0 || t == 0.0 {
        return Ok(w);
    }
    scale(1.0 / w_norm, &mut w);
    let sign = t.signum();
    let total = t.abs();
    let mut done = 0.0;
    let mut step = total;
    let mut halvings = 0;
    let m = opts.subspace_dim.max(2).min(op.dim());
    while done < total {
        step = step.min(total - done);
        let (basis, alpha, beta) = lanczos_basis(op, &w, m, &[]);
        let k = alpha.len();
        let broke_down = beta[k - 1] < 1e-13 || k == op.dim();
        let eig = nalgebra::SymmetricEigen::new(tridiagonal(&alpha, &beta[..k - 1]));
        loop {
            let tau = sign * step;
            // y = exp(f(T) tau) e1
            let shift = eig.eigenvalues.min();
            let coeff: Vec<Complex64> = (0..k)
                .map(|i| {
                    let lam = eig.eigenvalues[i];
                    let f = match mode {
                        TimeMode::Real => Complex64::new(0.0, -lam * tau).exp(),
                        TimeMode::Imaginary => Complex64::new((-(lam - shift) * tau).exp(), 0.0),
                    };
                    f * eig.eigenvectors[(0, i)]
                })
                .collect();
            let y: Vec<Complex64> = (0..k)
                .map(|r| (0..k).map(|i| coeff[i] * eig.eigenvectors[(r, i)]).sum())
                .collect();
            let y_norm = norm(&y);
            let err = if broke_down { 0.0 } else { beta[k - 1] * y[k - 1].norm() / y_norm };
            if err <= opts.tolerance * (step / total).max(1e-3) {
                let mut next = vec![C0; w.len()];
                for (b, yi) in basis.iter().zip(&y) {
                    axpy(*yi, b, &mut next);
                }
                let nn = norm(&next);
                match mode {
                    TimeMode::Real => w_norm *= nn,
                    TimeMode::Imaginary => {}
                }
                scale(1.0 / nn, &mut next);
                w = next;
                done += step;
                break;
            }
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(Error::KrylovNotConverged { residual: err });
            }
            step *= 0.5;
        }
    }
    if mode == TimeMode::Real {
        scale(w_norm, &mut w);
    }
    Ok(w)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LanczosOptions {
    /// Largest search space before a thick restart.
    pub subspace_dim: usize,
    /// Block size; eigenvalues with multiplicity up to this are resolved.
    pub block_size: usize,
    /// Converged when `||H x - theta x|| < tolerance * max(|theta|, 1)`.
    pub tolerance: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            subspace_dim: 120,
            block_size: 4,
            tolerance: 1e-10,
            max_restarts: 300,
            seed: 0x5eed,
        }
    }
}

/// Orthonormalize `w` against `basis` (two Gram-Schmidt passes). Returns the
/// norm before normalization.
fn orthonormalize(w: &mut [Complex64], basis: &[Vec<Complex64>]) -> f64 {
    for _ in 0..2 {
        for u in basis {
            let c = dot(u, w);
            axpy(-c, u, w);
        }
    }
    let n = norm(w);
    if n > 0.0 {
        scale(1.0 / n, w);
    }
    n
}

/// Lowest `k` eigenpairs of a Hermitian operator by block Krylov search with
/// thick restarts. The projected matrix and Ritz residuals are formed
/// explicitly, so clustered and degenerate levels converge like isolated ones.
pub fn lanczos_lowest(
    op: &dyn LinearOperator,
    k: usize,
    opts: &LanczosOptions,
) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::invalid(format!("cannot compute {k} eigenpairs of a {dim}-dimensional operator")));
    }
    let bs = opts.block_size.max(1);
    let m = opts.subspace_dim.max(k + 3 * bs).min(dim);
    let keep = (k + bs + 4).min(m.saturating_sub(bs)).max(k.min(m));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..dim)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    };
    let mut v: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut hv: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut block: Vec<Vec<Complex64>> = (0..bs).map(|_| random(&mut rng)).collect();
    let mut last_residual = f64::INFINITY;
    for _ in 0..opts.max_restarts {
        // expand with Krylov blocks
        while v.len() < m {
            let mut next = Vec::with_capacity(bs);
            for mut w in block.drain(..) {
                if v.len() >= m {
                    break;
                }
                let mut nw = orthonormalize(&mut w, &v);
                if nw < 1e-10 {
                    w = random(&mut rng);
                    nw = orthonormalize(&mut w, &v);
                    if nw < 1e-10 {
                        continue;
                    }
                }
                let mut hw = vec![C0; dim];
                op.apply(&w, &mut hw);
                next.push(hw.clone());
                v.push(w);
                hv.push(hw);
            }
            if next.is_empty() {
                break;
            }
            block = next;
        }
        let nv = v.len();
        let mut proj = DMatrix::<Complex64>::zeros(nv, nv);
        for j in 0..nv {
            for i in 0..=j {
                let x = dot(&v[i], &hv[j]);
                proj[(i, j)] = x;
                proj[(j, i)] = x.conj();
            }
        }
        let small = eigh(proj);
        let ritz = |c: usize, src: &[Vec<Complex64>]| -> Vec<Complex64> {
            let mut x = vec![C0; dim];
            for (i, u) in src.iter().enumerate() {
                axpy(small.vectors[(i, c)], u, &mut x);
            }
            x
        };
        let want = k.min(nv);
        let mut converged = want == k;
        let mut worst: f64 = 0.0;
        let mut residuals = Vec::with_capacity(want);
        for c in 0..want {
            let x = ritz(c, &v);
            let mut r = ritz(c, &hv);
            axpy(Complex64::new(-small.values[c], 0.0), &x, &mut r);
            let rn = norm(&r);
            worst = worst.max(rn);
            if rn >= opts.tolerance * small.values[c].abs().max(1.0) {
                converged = false;
            }
            residuals.push(r);
        }
        last_residual = worst;
        if converged || nv == dim {
            let vals = small.values[..k].to_vec();
            let vecs = (0..k).map(|c| ritz(c, &v)).collect();
            return Ok((vals, vecs));
        }
        // thick restart: keep the lowest Ritz vectors (re-orthonormalized,
        // with H reapplied so H V does not drift), continue from the residuals
        let kept = keep.min(nv);
        let mut new_v: Vec<Vec<Complex64>> = Vec::with_capacity(kept);
        for c in 0..kept {
            let mut x = ritz(c, &v);
            if orthonormalize(&mut x, &new_v) > 1e-10 {
                new_v.push(x);
            }
        }
        hv = new_v
            .iter()
            .map(|x| {
                let mut hx = vec![C0; dim];
                op.apply(x, &mut hx);
                hx
            })
            .collect();
        v = new_v;
        let tol = opts.tolerance;
        let mut order: Vec<usize> = (0..residuals.len()).collect();
        order.sort_by_key(|&c| norm(&residuals[c]) < tol * small.values[c].abs().max(1.0));
        block = order
            .into_iter()
            .map(|c| residuals[c].clone())
            .filter(|r| norm(r) > 0.0)
            .take(bs)
            .collect();
        while block.len() < bs {
            block.push(random(&mut rng));
        }
    }
    Err(Error::EigenNotConverged {
        iterations: opts.max_restarts,
        residual: last_residual,
    })
}
