//! Restarted Lanczos for the smallest eigenpairs of a graph Laplacian on the
//! orthogonal complement of the constant vector.
//!
//! The Krylov basis is kept fully reorthogonalized (two Gram-Schmidt passes)
//! against itself and against `1/sqrt(n)`, and the Rayleigh-Ritz problem is
//! formed explicitly from the stored products `L V`. On restart the basis is
//! contracted to the leading Ritz vectors and re-expanded from the residual of
//! the first unconverged pair, which keeps the space a Krylov space (thick
//! restart).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unit eigenvectors, one per value, each orthogonal to `1`.
    pub vectors: Vec<Vec<f64>>,
    /// Largest final residual norm `‖L y − θ y‖`.
    pub max_residual: f64,
    /// Restart cycles used.
    pub restarts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    for v in x.iter_mut() {
        *v -= mean;
    }
}

/// Orthogonalizes `x` against `1` and every vector in `basis` (two passes)
/// and returns the norm that remains.
fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        remove_mean(x);
        for b in basis {
            let c = dot(b, x);
            axpy(-c, b, x);
        }
    }
    norm(x)
}

struct Basis<'a> {
    g: &'a WeightedGraph,
    v: Vec<Vec<f64>>,
    lv: Vec<Vec<f64>>,
    rng: ChaCha8Rng,
}

impl Basis<'_> {
    /// Appends `x` after orthogonalization; replaces it with random
    /// directions if it is (numerically) already in the span. Returns false
    /// when the space is exhausted.
    fn push(&mut self, mut x: Vec<f64>) -> bool {
        let n = self.g.n();
        if self.v.len() + 1 >= n {
            return false;
        }
        let scale = norm(&x);
        let mut r = orthogonalize(&mut x, &self.v);
        if !(r > 1e-10 * scale && r > 0.0) {
            // breakdown: the space is invariant, continue from a random vector
            let mut found = false;
            for _ in 0..10 {
                x = (0..n).map(|_| self.rng.random::<f64>() - 0.5).collect();
                let s = norm(&x);
                r = orthogonalize(&mut x, &self.v);
                if r > 1e-8 * s {
                    found = true;
                    break;
                }
            }
            if !found {
                return false;
            }
        }
        for xi in x.iter_mut() {
            *xi /= r;
        }
        let mut y = vec![0.0; n];
        self.g.laplacian_mul(&x, &mut y);
        self.v.push(x);
        self.lv.push(y);
        true
    }

    /// Rayleigh-Ritz on the current basis: ascending Ritz values and the
    /// coefficient matrix of the Ritz vectors.
    fn ritz(&self) -> (Vec<f64>, DMatrix<f64>) {
        let m = self.v.len();
        let mut h = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let a = 0.5 * (dot(&self.v[i], &self.lv[j]) + dot(&self.v[j], &self.lv[i]));
                h[(i, j)] = a;
                h[(j, i)] = a;
            }
        }
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let coeffs = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
        (values, coeffs)
    }

    fn combine(cols: &[Vec<f64>], coeffs: &DMatrix<f64>, c: usize) -> Vec<f64> {
        let n = cols[0].len();
        let mut out = vec![0.0; n];
        for (i, col) in cols.iter().enumerate() {
            axpy(coeffs[(i, c)], col, &mut out);
        }
        out
    }
}

/// Computes the `nev` smallest eigenpairs of the Laplacian of `g` restricted
/// to the complement of the constant vector (i.e. `λ_2..λ_{nev+1}` for a
/// connected graph). `warm` vectors, if given, seed the search space.
pub fn lanczos_smallest(g: &WeightedGraph, nev: usize, warm: &[Vec<f64>]) -> Result<EigenPairs> {
    let n = g.n();
    if nev == 0 || nev + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "cannot compute {nev} nontrivial eigenpairs of a {n}-node graph"
        )));
    }
    let anorm = g.laplacian_norm_bound();
    let tol = RESIDUAL_TOL * anorm.max(f64::MIN_POSITIVE);
    let max_basis = (n - 1).min((3 * nev).max(nev + 30));
    let keep = (nev + 5).min(max_basis.saturating_sub(1)).max(nev);
    let max_restarts = 50 * (nev + 2);

    let mut basis = Basis {
        g,
        v: Vec::with_capacity(max_basis + 1),
        lv: Vec::with_capacity(max_basis + 1),
        rng: ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ n as u64),
    };
    for w in warm.iter().take(max_basis) {
        if w.len() == n {
            // a warm vector already in the span is simply skipped
            let mut x = w.clone();
            let s = norm(&x);
            if s > 0.0 && orthogonalize(&mut x, &basis.v) > 1e-8 * s {
                basis.push(x);
            }
        }
    }
    // A block of random directions lets repeated eigenvalues (isolated nodes,
    // symmetric graphs) show up with their full multiplicity; a single Krylov
    // sequence only ever sees one vector per eigenspace.
    while basis.v.len() < nev.min(max_basis) {
        let x: Vec<f64> = (0..n).map(|_| basis.rng.random::<f64>() - 0.5).collect();
        if !basis.push(x) {
            break;
        }
    }

    let mut restarts = 0;
    loop {
        // Krylov expansion from the newest vector
        while basis.v.len() < max_basis {
            let next = basis.lv.last().unwrap().clone();
            if !basis.push(next) {
                break;
            }
        }
        let (theta, coeffs) = basis.ritz();
        let m = basis.v.len();
        let take = nev.min(m);
        let mut residuals = Vec::with_capacity(take);
        let mut first_bad: Option<(usize, Vec<f64>)> = None;
        for c in 0..take {
            let y = Basis::combine(&basis.v, &coeffs, c);
            let mut r = Basis::combine(&basis.lv, &coeffs, c);
            axpy(-theta[c], &y, &mut r);
            let rn = norm(&r);
            residuals.push(rn);
            if rn > tol && first_bad.is_none() {
                first_bad = Some((c, r));
            }
        }
        let max_residual = residuals.iter().copied().fold(0.0, f64::max);
        let exhausted = m + 1 >= n;
        if take == nev && (first_bad.is_none() || exhausted) {
            let vectors = (0..nev).map(|c| Basis::combine(&basis.v, &coeffs, c)).collect();
            return Ok(EigenPairs {
                values: theta[..nev].to_vec(),
                vectors,
                max_residual,
                restarts,
            });
        }
        if restarts >= max_restarts {
            return Err(Error::Convergence {
                iterations: restarts,
                residual: max_residual,
            });
        }
        restarts += 1;

        // thick restart: contract to the leading Ritz vectors
        let k = keep.min(m);
        let v: Vec<Vec<f64>> = (0..k).map(|c| Basis::combine(&basis.v, &coeffs, c)).collect();
        let lv: Vec<Vec<f64>> = (0..k).map(|c| Basis::combine(&basis.lv, &coeffs, c)).collect();
        basis.v = v;
        basis.lv = lv;
        let seed = match first_bad {
            Some((_, r)) => r,
            None => (0..n).map(|_| basis.rng.random::<f64>() - 0.5).collect(),
        };
        if !basis.push(seed) {
            let x: Vec<f64> = (0..n).map(|_| basis.rng.random::<f64>() - 0.5).collect();
            basis.push(x);
        }
    }
}

/// Flips each vector so its largest-magnitude entry is positive (first such
/// entry on ties).
pub fn fix_signs(vectors: &mut [Vec<f64>]) {
    for v in vectors {
        let mut best = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[best].abs() {
                best = i;
            }
        }
        if v.get(best).is_some_and(|&x| x < 0.0) {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}
