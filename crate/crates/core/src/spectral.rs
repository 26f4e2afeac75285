//! Adjacency spectra and the energies built from them.
//!
//! Everything exported here is a function of `U f(D) Uᵀ` for the adjacency
//! matrix `A = U D Uᵀ`, so the sign or rotation of eigenvectors inside a
//! degenerate eigenspace never matters and is not canonicalised.

use alloc::vec::Vec;

use crate::graph::Graph;
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Convergence settings for the cyclic Jacobi eigensolver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigConfig {
    /// Stop once the off-diagonal Frobenius norm is below
    /// `rel_off_tol * ||A||_F` (or the roundoff floor, whichever is larger).
    pub rel_off_tol: f64,
    pub max_sweeps: usize,
}

impl EigConfig {
    pub const DEFAULT: EigConfig = EigConfig { rel_off_tol: 1e-13, max_sweeps: 64 };
    /// Used when re-checking a reported violation: a hundredfold tighter
    /// stopping rule, which in practice runs to the roundoff floor.
    pub const TIGHT: EigConfig = EigConfig { rel_off_tol: 1e-15, max_sweeps: 128 };
}

impl Default for EigConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Eigenvalues (descending) and an orthonormal eigenbasis of an adjacency
/// matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Spectrum {
    n: usize,
    eigenvalues: Vec<f64>,
    /// Row-major `n x n`; column `k` is the eigenvector for `eigenvalues[k]`.
    vectors: Vec<f64>,
}

impl Spectrum {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Component `i` of eigenvector `k`.
    #[inline]
    pub fn vector_entry(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.n + k]
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vector_entry(i, k)).collect()
    }

    /// Residuals of the decomposition against the graph it came from.
    pub fn diagnostics(&self, g: &Graph) -> SpectrumDiagnostics {
        let n = self.n;
        let mut max_residual: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                let mut av = 0.0;
                for j in crate::graph::BitIter(g.neighbors(i)) {
                    av += self.vector_entry(j, k);
                }
                max_residual = max_residual.max(abs(av - self.eigenvalues[k] * self.vector_entry(i, k)));
            }
        }
        let mut orthogonality: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n).map(|i| self.vector_entry(i, a) * self.vector_entry(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                orthogonality = orthogonality.max(abs(dot - target));
            }
        }
        SpectrumDiagnostics {
            max_residual,
            orthogonality,
            trace: self.eigenvalues.iter().sum(),
            inf_norm: g.max_degree() as f64,
        }
    }
}

/// How well a [`Spectrum`] satisfies its defining identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumDiagnostics {
    /// `max_i ||A u_i - λ_i u_i||_∞`
    pub max_residual: f64,
    /// `||UᵀU - I||_∞` (entrywise max)
    pub orthogonality: f64,
    /// `Σ λ_i`, which should be 0.
    pub trace: f64,
    /// `||A||_∞`, the maximum degree.
    pub inf_norm: f64,
}

impl SpectrumDiagnostics {
    pub fn within(&self, n: usize, tol: &Tolerances) -> bool {
        let t = tol.eig_for(n);
        self.max_residual <= t * self.inf_norm.max(1.0)
            && self.orthogonality <= t
            && abs(self.trace) <= t * n as f64
    }
}

/// Symmetric eigendecomposition of the adjacency matrix with the default
/// convergence rule.
pub fn eig_symmetric(g: &Graph) -> Result<Spectrum> {
    eig_symmetric_with(g, EigConfig::DEFAULT)
}

pub fn eig_symmetric_with(g: &Graph, cfg: EigConfig) -> Result<Spectrum> {
    let n = g.n();
    let mut a = g.adjacency_matrix();
    let mut v = alloc::vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    jacobi(&mut a, n, Some(&mut v), cfg).map_err(|sweeps| no_convergence(g, sweeps))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y * n + y].total_cmp(&a[x * n + x]).then(x.cmp(&y)));
    let eigenvalues = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = alloc::vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + dst] = v[i * n + src];
        }
    }
    Ok(Spectrum { n, eigenvalues, vectors })
}

/// Eigenvalues only, descending. Skips eigenvector accumulation.
pub fn eigenvalues(g: &Graph, cfg: EigConfig) -> Result<Vec<f64>> {
    let n = g.n();
    let mut a = g.adjacency_matrix();
    jacobi(&mut a, n, None, cfg).map_err(|sweeps| no_convergence(g, sweeps))?;
    let mut ev: Vec<f64> = (0..n).map(|k| a[k * n + k]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

fn no_convergence(g: &Graph, sweeps: usize) -> Error {
    Error::NoConvergence { n: g.n(), m: g.m(), sweeps }
}

/// Cyclic Jacobi on a dense symmetric row-major matrix. On success the
/// diagonal of `a` holds the eigenvalues and `v` (if given) has been
/// multiplied by the accumulated rotations. Returns the sweep count on
/// failure.
fn jacobi(a: &mut [f64], n: usize, mut v: Option<&mut [f64]>, cfg: EigConfig) -> core::result::Result<usize, usize> {
    let norm = libm::sqrt(a.iter().map(|x| x * x).sum::<f64>());
    if norm == 0.0 {
        return Ok(0);
    }
    let floor = 8.0 * n as f64 * f64::EPSILON * norm;
    let target = (cfg.rel_off_tol * norm).max(floor);
    for sweep in 0..=cfg.max_sweeps {
        if off_diagonal_norm(a, n) <= target {
            return Ok(sweep);
        }
        if sweep == cfg.max_sweeps {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if abs(theta) > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (abs(theta) + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    Err(cfg.max_sweeps)
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    libm::sqrt(s)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// `|x|^p`, with the common exponents taken on fast exact paths.
#[inline]
pub fn abs_pow(x: f64, p: f64) -> f64 {
    let a = abs(x);
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else if p == 0.0 {
        1.0
    } else {
        libm::pow(a, p)
    }
}

/// A dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest `|M_ij - M_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max(abs(self.get(i, j) - self.get(j, i)));
            }
        }
        worst
    }
}

/// `U diag(|λ|^p) Uᵀ`, i.e. `|A|^p`. Accepts `p >= 0`.
pub fn matrix_abs_pow(spec: &Spectrum, p: f64) -> Result<DenseMatrix> {
    if !(p >= 0.0) {
        return Err(Error::InvalidExponent { p, min: 0.0 });
    }
    let n = spec.n;
    let weights: Vec<f64> = spec.eigenvalues.iter().map(|&l| abs_pow(l, p)).collect();
    let mut data = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for (k, w) in weights.iter().enumerate() {
                s += spec.vector_entry(i, k) * w * spec.vector_entry(j, k);
            }
            data[i * n + j] = s;
            data[j * n + i] = s;
        }
    }
    Ok(DenseMatrix { n, data })
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent { p, min: 1.0 })
    }
}

/// `Σ |λ_i|^p` over a list of eigenvalues.
pub fn schatten_sum(eigenvalues: &[f64], p: f64) -> f64 {
    eigenvalues.iter().map(|&l| abs_pow(l, p)).sum()
}

/// Graph energy `Σ |λ_i|`.
pub fn energy(g: &Graph) -> Result<f64> {
    Ok(schatten_sum(&eigenvalues(g, EigConfig::DEFAULT)?, 1.0))
}

/// Energy computed the second way: the trace of `U |D| Uᵀ`.
pub fn energy_by_trace(spec: &Spectrum) -> f64 {
    matrix_abs_pow(spec, 1.0).expect("p = 1 is valid").trace()
}

/// p-energy `tr |A|^p = Σ |λ_i|^p`, for `p >= 1`.
pub fn p_energy(g: &Graph, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(schatten_sum(&eigenvalues(g, EigConfig::DEFAULT)?, p))
}

/// Per-vertex p-energies `(|A|^p)_ii` and their total.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EnergyProfile {
    pub p: f64,
    pub per_vertex: Vec<f64>,
    pub total: f64,
    /// Vertices whose raw diagonal entry was below `-tol.sum` before clamping.
    pub flagged: Vec<usize>,
}

impl EnergyProfile {
    pub fn from_spectrum(spec: &Spectrum, p: f64, tol: &Tolerances) -> Result<Self> {
        check_p(p)?;
        let n = spec.n;
        let weights: Vec<f64> = spec.eigenvalues.iter().map(|&l| abs_pow(l, p)).collect();
        let mut flagged = Vec::new();
        let per_vertex: Vec<f64> = (0..n)
            .map(|i| {
                let raw: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(k, w)| {
                        let u = spec.vector_entry(i, k);
                        u * u * w
                    })
                    .sum();
                if raw < -tol.sum {
                    flagged.push(i);
                }
                raw.max(0.0)
            })
            .collect();
        let total = per_vertex.iter().sum();
        Ok(EnergyProfile { p, per_vertex, total, flagged })
    }

    pub fn n(&self) -> usize {
        self.per_vertex.len()
    }

    /// `Σ_{i ∈ mask} E_p(v_i)`.
    pub fn sum_over(&self, mask: u64) -> f64 {
        crate::graph::BitIter(mask).map(|i| self.per_vertex[i]).sum()
    }
}

/// Vertex p-energies of `g`, for `p >= 1`.
pub fn vertex_energies(g: &Graph, p: f64) -> Result<EnergyProfile> {
    check_p(p)?;
    EnergyProfile::from_spectrum(&eig_symmetric(g)?, p, &Tolerances::DEFAULT)
}
