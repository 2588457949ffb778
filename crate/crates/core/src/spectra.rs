//! Lattice spectra: finite-size scaling of the strip free energy and the
//! XXZ spin-chain representation of the two-boundary algebra.
//!
//! Free energies come from power iteration on the sparse transfer factors of
//! the vacuum sector (`V_0` with two boundaries, `W_0` with free ones). The
//! leading exponent is read off
//!
//! ```text
//! f_N = f_bulk + f_boundary / N + pi (h - c/24) / N^2 + a3 / N^3 + a4 / N^4
//! ```
//!
//! with `f_N = -ln(Lambda_max) / (2N)`; one transfer matrix covers two rows.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::diagram::Boundary;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::params::{central_charge, n12_from_r12, sine_ratio, LoopWeights};
use crate::reps::{hamiltonian_matrix, Module, Sector};
use crate::sparse::CsrMatrix;

/// Largest strip width accepted by [`free_energy_per_site`].
pub const MAX_FSS_STRANDS: usize = 20;
/// Largest chain for which dense spectra are computed.
pub const MAX_DENSE_SITES: usize = 10;
pub const POWER_TOLERANCE: f64 = 1e-13;
pub const POWER_MAX_ITERATIONS: usize = 100_000;
/// Reciprocal condition number below which a fit is refused.
pub const FIT_RCOND: f64 = 1e-13;
/// Relation residual above which the spin representation is rejected.
pub const RELATION_TOLERANCE: f64 = 1e-10;

fn vacuum(boundary: Boundary) -> Sector {
    match boundary {
        Boundary::TwoBoundary => Sector::Vacuum,
        Boundary::Free => Sector::Tl { j: 0 },
    }
}

/// Dominant eigenvalue of an entrywise nonnegative product of factors.
#[derive(Debug, Clone, Serialize)]
pub struct PowerResult {
    pub eigenvalue: f64,
    pub iterations: usize,
}

/// Power iteration on `T = F_0 F_1 ... F_k` without forming the product.
///
/// Starts from the all-ones vector and stops once the L1 growth factor moves
/// by less than `POWER_TOLERANCE` relative to itself.
pub fn power_iteration(factors: &[CsrMatrix]) -> Result<PowerResult> {
    if factors.iter().any(CsrMatrix::has_negative_entries) {
        return Err(Error::NegativeEntries);
    }
    let dim = factors.first().map_or(0, CsrMatrix::ncols);
    let mut v = vec![1.0 / dim.max(1) as f64; dim];
    let mut prev = f64::NAN;
    for it in 1..=POWER_MAX_ITERATIONS {
        for f in factors.iter().rev() {
            v = f.matvec(&v);
        }
        let norm: f64 = v.iter().sum();
        if !(norm > 0.0) {
            return Ok(PowerResult { eigenvalue: 0.0, iterations: it });
        }
        v.iter_mut().for_each(|x| *x /= norm);
        if (norm - prev).abs() <= POWER_TOLERANCE * norm {
            return Ok(PowerResult { eigenvalue: norm, iterations: it });
        }
        prev = norm;
    }
    Err(Error::NoConvergence(POWER_MAX_ITERATIONS))
}

/// Largest-modulus eigenvalue of a small dense matrix (any sign pattern).
pub fn dense_leading_eigenvalue(m: &DMatrix<f64>) -> Complex64 {
    m.complex_eigenvalues()
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or_default()
}

/// `f_N = -ln(Lambda_max) / (2N)` of the vacuum sector transfer matrix.
pub fn free_energy_per_site(strands: usize, w: &LoopWeights, boundary: Boundary, exec: Execution) -> Result<f64> {
    if strands > MAX_FSS_STRANDS {
        return Err(Error::OutOfRange { name: "N", value: strands as f64, range: "even, <= 20" });
    }
    let module = Module::new(strands, vacuum(boundary))?;
    let factors = module.transfer_factors(w, boundary, exec)?;
    let lambda = power_iteration(&factors)?.eigenvalue;
    Ok(-lambda.ln() / (2.0 * strands as f64))
}

/// Least-squares fit of `f_N` in powers of `1/N`.
#[derive(Debug, Clone, Serialize)]
pub struct FssFit {
    pub m: f64,
    pub sizes: Vec<usize>,
    pub f: Vec<f64>,
    /// Coefficients of `1, 1/N, 1/N^2, ...`.
    pub coefficients: Vec<f64>,
    pub f_bulk: f64,
    pub f_boundary: f64,
    pub h: f64,
    pub a3: Option<f64>,
    pub a4: Option<f64>,
    /// `1 + 4m(m+1)h`; negative values mean `Phi` is imaginary.
    pub phi_squared: f64,
    /// Nonnegative branch, clamped to zero when `phi_squared < 0`.
    pub phi: f64,
    pub residuals: Vec<f64>,
}

/// Five-term fit; needs at least five sizes.
pub fn fit_exponent(sizes: &[usize], f: &[f64], m: f64) -> Result<FssFit> {
    fit_exponent_terms(sizes, f, m, 5)
}

/// Fit with `terms` powers `1/N^0 .. 1/N^(terms-1)`, `3 <= terms`.
pub fn fit_exponent_terms(sizes: &[usize], f: &[f64], m: f64, terms: usize) -> Result<FssFit> {
    if terms < 3 {
        return Err(Error::OutOfRange { name: "terms", value: terms as f64, range: ">= 3" });
    }
    if sizes.len() != f.len() {
        return Err(Error::Invalid(format!("{} sizes but {} values", sizes.len(), f.len())));
    }
    if sizes.len() < terms {
        return Err(Error::TooFewSizes { need: terms, got: sizes.len() });
    }
    let rows = sizes.len();
    let design = DMatrix::from_fn(rows, terms, |i, k| (sizes[i] as f64).powi(-(k as i32)));
    // Column scaling keeps the conditioning test meaningful.
    let scales: Vec<f64> = (0..terms).map(|k| design.column(k).norm()).collect();
    let scaled = DMatrix::from_fn(rows, terms, |i, k| design[(i, k)] / scales[k]);
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > FIT_RCOND * smax) {
        return Err(Error::IllConditioned);
    }
    let rhs = DVector::from_column_slice(f);
    let sol = svd.solve(&rhs, 0.0).map_err(|_| Error::IllConditioned)?;
    let coefficients: Vec<f64> = (0..terms).map(|k| sol[k] / scales[k]).collect();
    let fitted = &design * DVector::from_column_slice(&coefficients);
    let residuals: Vec<f64> = (0..rows).map(|i| f[i] - fitted[i]).collect();
    let h = coefficients[2] / PI + central_charge(m) / 24.0;
    let phi_squared = 1.0 + 4.0 * m * (m + 1.0) * h;
    Ok(FssFit {
        m,
        sizes: sizes.to_vec(),
        f: f.to_vec(),
        f_bulk: coefficients[0],
        f_boundary: coefficients[1],
        h,
        a3: coefficients.get(3).copied(),
        a4: coefficients.get(4).copied(),
        phi_squared,
        phi: phi_squared.max(0.0).sqrt(),
        coefficients,
        residuals,
    })
}

/// Free energies for several widths, computed independently.
pub fn free_energies(sizes: &[usize], w: &LoopWeights, boundary: Boundary, exec: Execution) -> Result<Vec<f64>> {
    par::map_indexed(exec, sizes.len(), |i| free_energy_per_site(sizes[i], w, boundary, Execution::Sequential))
        .into_iter()
        .collect()
}

/// A fit over a window of sizes with an estimate of its truncation error.
#[derive(Debug, Clone, Serialize)]
pub struct FssWindow {
    pub fit: FssFit,
    /// `|Phi|` change against the fit with one term fewer on the same sizes;
    /// absent when that fit would have fewer than three terms.
    pub phi_error: Option<f64>,
}

/// Fits with as many terms as sizes allow, at most five.
pub fn fss_window(sizes: &[usize], f: &[f64], m: f64) -> Result<FssWindow> {
    let terms = sizes.len().min(5);
    let fit = fit_exponent_terms(sizes, f, m, terms)?;
    let phi_error = if terms > 3 {
        Some((fit.phi - fit_exponent_terms(sizes, f, m, terms - 1)?.phi).abs())
    } else {
        None
    };
    Ok(FssWindow { fit, phi_error })
}

/// Two-boundary weights at the Coulomb-gas point `(m, r1, r2, r12)`.
///
/// Non-contractible weights do not enter the vacuum sector; they are set to
/// their contractible counterparts.
pub fn fss_weights(m: f64, r1: f64, r2: f64, r12: f64) -> LoopWeights {
    let gamma = PI / (m + 1.0);
    let n = 2.0 * gamma.cos();
    let n1 = sine_ratio(r1, gamma);
    let n2 = sine_ratio(r2, gamma);
    LoopWeights { n, n1, n2, n12: n12_from_r12(r1, r2, r12, gamma), l: n, l1: n1, l2: n2 }
}

// ---------------------------------------------------------------------------
// Spin chain

/// Parameters of the boundary XXZ chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinChainParams {
    pub sites: usize,
    pub gamma: f64,
    pub r1: f64,
    pub r2: f64,
    pub s1: f64,
    pub s2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// `lambda = sin(gamma) sin(r gamma) / (sin(phi) sin(r gamma + phi))`.
pub fn lambda_from_phi(gamma: f64, r: f64, phi: f64) -> f64 {
    gamma.sin() * (r * gamma).sin() / (phi.sin() * (r * gamma + phi).sin())
}

impl SpinChainParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(sites: usize, gamma: f64, r1: f64, r2: f64, s1: f64, s2: f64, phi1: f64, phi2: f64) -> Result<Self> {
        if sites < 2 || sites % 2 == 1 {
            return Err(Error::OddStrands(sites));
        }
        if !(gamma > 0.0 && gamma < PI) {
            return Err(Error::OutOfRange { name: "gamma", value: gamma, range: "(0, pi)" });
        }
        for (name, r) in [("r1", r1), ("r2", r2)] {
            if (r * gamma).sin().abs() < 1e-12 {
                return Err(Error::OutOfRange { name, value: r, range: "sin(r gamma) != 0" });
            }
        }
        let lambda1 = lambda_from_phi(gamma, r1, phi1);
        let lambda2 = lambda_from_phi(gamma, r2, phi2);
        if !lambda1.is_finite() {
            return Err(Error::OutOfRange { name: "phi1", value: phi1, range: "sin(phi1) sin(r1 gamma + phi1) != 0" });
        }
        if !lambda2.is_finite() {
            return Err(Error::OutOfRange { name: "phi2", value: phi2, range: "sin(phi2) sin(r2 gamma + phi2) != 0" });
        }
        Ok(Self { sites, gamma, r1, r2, s1, s2, phi1, phi2, lambda1, lambda2 })
    }

    pub fn r12(&self) -> f64 {
        self.s2 - self.s1
    }

    /// Loop weights realized by the chain.
    pub fn loop_weights(&self) -> LoopWeights {
        let n = 2.0 * self.gamma.cos();
        let n1 = sine_ratio(self.r1, self.gamma);
        let n2 = sine_ratio(self.r2, self.gamma);
        let n12 = n12_from_r12(self.r1, self.r2, self.r12(), self.gamma);
        LoopWeights { n, n1, n2, n12, l: n, l1: n1, l2: n2 }
    }
}

/// Sparse complex operator on the `2^N` spin space.
#[derive(Debug, Clone)]
pub struct SpinOperator {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SpinOperator {
    fn from_local(sites: usize, support: &[usize], local: &DMatrix<Complex64>) -> Self {
        let dim = 1usize << sites;
        let k = support.len();
        let mut rows = vec![Vec::new(); dim];
        for (s, row) in rows.iter_mut().enumerate() {
            let sub = support.iter().enumerate().fold(0, |acc, (p, &site)| acc | (((s >> site) & 1) << p));
            let rest = support.iter().fold(s, |acc, &site| acc & !(1 << site));
            for col in 0..(1usize << k) {
                let c = local[(sub, col)];
                if c != Complex64::default() {
                    let t = support.iter().enumerate().fold(rest, |acc, (p, &site)| acc | (((col >> p) & 1) << site));
                    row.push((t, c));
                }
            }
        }
        Self { dim, rows }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `y = A x` with `A[(s, t)]` stored in row `s`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.rows.iter().map(|r| r.iter().map(|&(t, c)| c * x[t]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (s, r) in self.rows.iter().enumerate() {
            for &(t, c) in r {
                m[(s, t)] += c;
            }
        }
        m
    }

    fn add_scaled(&self, other: &SpinOperator, k: f64) -> SpinOperator {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r = a.clone();
                for &(t, c) in b {
                    match r.iter_mut().find(|(u, _)| *u == t) {
                        Some(slot) => slot.1 += c * k,
                        None => r.push((t, c * k)),
                    }
                }
                r
            })
            .collect();
        SpinOperator { dim: self.dim, rows }
    }
}

/// `e_i` (index `i-1`), `b1` and `b2` on the spin space.
#[derive(Debug, Clone)]
pub struct SpinGenerators {
    pub params: SpinChainParams,
    pub e: Vec<SpinOperator>,
    pub b1: SpinOperator,
    pub b2: SpinOperator,
    /// Largest residual met while checking the relations.
    pub max_residual: f64,
}

fn pauli() -> [DMatrix<Complex64>; 3] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
    ]
}

/// Kronecker product with `a` on the first site of the pair (bit 0).
fn pair(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(4, 4, |s, t| a[(s & 1, t & 1)] * b[(s >> 1, t >> 1)])
}

fn bond(gamma: f64) -> DMatrix<Complex64> {
    let [x, y, z] = pauli();
    let id = DMatrix::<Complex64>::identity(2, 2);
    let (cg, sg) = (gamma.cos(), gamma.sin());
    let i = Complex64::new(0.0, 1.0);
    (pair(&x, &x) + pair(&y, &y) + pair(&z, &z) * Complex64::from(cg)) * Complex64::from(-0.5)
        + (pair(&z, &id) - pair(&id, &z)) * (i * sg / 2.0)
        + DMatrix::identity(4, 4) * Complex64::from(cg / 2.0)
}

fn blob(gamma: f64, r: f64, s: f64, sign: f64) -> DMatrix<Complex64> {
    let [x, y, z] = pauli();
    let i = Complex64::new(0.0, 1.0);
    let v = x * Complex64::from((s * gamma).sin())
        + y * Complex64::from((s * gamma).cos())
        + z * (i * (r * gamma).cos());
    DMatrix::identity(2, 2) * Complex64::from(0.5) + v * Complex64::from(sign / (2.0 * (r * gamma).sin()))
}

/// Deterministic generic test vectors for the relation checks.
fn probe_vectors(dim: usize) -> Vec<Vec<Complex64>> {
    (0..2)
        .map(|p| {
            (0..dim)
                .map(|k| {
                    let t = k as f64 + 0.37 * p as f64;
                    Complex64::new((1.3 * t + 0.4).sin(), (2.1 * t * t.sqrt() + 0.1).cos())
                })
                .collect()
        })
        .collect()
}

fn apply_word(word: &[&SpinOperator], x: &[Complex64]) -> Vec<Complex64> {
    word.iter().rev().fold(x.to_vec(), |v, op| op.apply(&v))
}

impl SpinGenerators {
    /// The relations every representation must satisfy, as
    /// `(name, lhs word, rhs word, rhs coefficient)`.
    fn relations(&self) -> Vec<(String, Vec<&SpinOperator>, Vec<&SpinOperator>, f64)> {
        let w = self.params.loop_weights();
        let n = self.params.sites;
        let e = |i: usize| &self.e[i - 1];
        let mut rels = Vec::new();
        for i in 1..n {
            rels.push((format!("e{i}^2 = n e{i}"), vec![e(i), e(i)], vec![e(i)], w.n));
            if i + 1 < n {
                rels.push((format!("e{i} e{} e{i} = e{i}", i + 1), vec![e(i), e(i + 1), e(i)], vec![e(i)], 1.0));
                rels.push((format!("e{} e{i} e{} = e{}", i + 1, i + 1, i + 1), vec![e(i + 1), e(i), e(i + 1)], vec![e(i + 1)], 1.0));
            }
            for k in i + 2..n {
                rels.push((format!("e{i} e{k} = e{k} e{i}"), vec![e(i), e(k)], vec![e(k), e(i)], 1.0));
            }
            if i > 1 {
                rels.push((format!("b1 e{i} = e{i} b1"), vec![&self.b1, e(i)], vec![e(i), &self.b1], 1.0));
            }
            if i + 1 < n {
                rels.push((format!("b2 e{i} = e{i} b2"), vec![&self.b2, e(i)], vec![e(i), &self.b2], 1.0));
            }
        }
        rels.push(("b1^2 = b1".into(), vec![&self.b1, &self.b1], vec![&self.b1], 1.0));
        rels.push(("b2^2 = b2".into(), vec![&self.b2, &self.b2], vec![&self.b2], 1.0));
        rels.push(("b1 b2 = b2 b1".into(), vec![&self.b1, &self.b2], vec![&self.b2, &self.b1], 1.0));
        rels.push(("e1 b1 e1 = n1 e1".into(), vec![e(1), &self.b1, e(1)], vec![e(1)], w.n1));
        rels.push(("e b2 e = n2 e".into(), vec![e(n - 1), &self.b2, e(n - 1)], vec![e(n - 1)], w.n2));
        let odd: Vec<&SpinOperator> = (1..n).step_by(2).map(e).collect();
        let even: Vec<&SpinOperator> = (2..n).step_by(2).map(e).collect();
        let mut lhs = odd.clone();
        lhs.extend([&self.b1, &self.b2]);
        lhs.extend(even);
        lhs.extend(odd.iter().copied());
        rels.push(("quotient".into(), lhs, odd, w.n12));
        rels
    }

    /// Checks every relation on probe vectors and returns the worst residual.
    pub fn validate(&self) -> Result<f64> {
        let probes = probe_vectors(1 << self.params.sites);
        let mut worst = 0.0f64;
        for (name, lhs, rhs, k) in self.relations() {
            let mut residual = 0.0f64;
            for x in &probes {
                let a = apply_word(&lhs, x);
                let b = apply_word(&rhs, x);
                let scale = b.iter().map(|c| c.norm()).fold(1.0, f64::max) * k.abs().max(1.0);
                let d = a.iter().zip(&b).map(|(p, q)| (p - q * k).norm()).fold(0.0, f64::max);
                residual = residual.max(d / scale);
            }
            if !(residual <= RELATION_TOLERANCE) {
                return Err(Error::RelationViolated { relation: leak(name), residual });
            }
            worst = worst.max(residual);
        }
        Ok(worst)
    }
}

fn leak(s: String) -> &'static str {
    // Relation names are few and only built on failure paths.
    Box::leak(s.into_boxed_str())
}

/// Builds `e_i`, `b1`, `b2` on `(C^2)^N` and checks all defining relations.
///
/// Site `k` (1-based) is bit `k-1` of the basis index; bit value 0 is spin up.
pub fn build_spin_generators(params: &SpinChainParams) -> Result<SpinGenerators> {
    let n = params.sites;
    if n < 2 || n % 2 == 1 {
        return Err(Error::OddStrands(n));
    }
    let g = params.gamma;
    let local = bond(g);
    let e = (0..n - 1).map(|i| SpinOperator::from_local(n, &[i, i + 1], &local)).collect();
    let b1 = SpinOperator::from_local(n, &[0], &blob(g, params.r1, params.s1, -1.0));
    let b2 = SpinOperator::from_local(n, &[n - 1], &blob(g, params.r2, params.s2, 1.0));
    let mut gens = SpinGenerators { params: *params, e, b1, b2, max_residual: 0.0 };
    gens.max_residual = gens.validate()?;
    Ok(gens)
}

/// `H = -lambda1 b1 - lambda2 b2 - sum_i e_i` in the spin representation.
pub fn xxz_hamiltonian(params: &SpinChainParams) -> Result<SpinOperator> {
    let gens = build_spin_generators(params)?;
    let mut h = SpinOperator::zeros(gens.b1.dim()).add_scaled(&gens.b1, -params.lambda1);
    h = h.add_scaled(&gens.b2, -params.lambda2);
    for e in &gens.e {
        h = h.add_scaled(e, -1.0);
    }
    Ok(h)
}

/// Sorts by real part, then imaginary part.
pub fn sort_spectrum(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Largest distance between two spectra paired one to one.
///
/// Both lists are sorted by `(Re, Im)`; each eigenvalue is then matched to the
/// nearest unused partner, which is robust to reorderings of near-equal real
/// parts caused by round-off.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// Both spectra of `H` on the `2^N`-dimensional space, sorted.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumComparison {
    pub sites: usize,
    pub diagram: Vec<(f64, f64)>,
    pub spin: Vec<(f64, f64)>,
    pub max_deviation: f64,
    pub relation_residual: f64,
}

/// Dense spectra of the diagram and spin Hamiltonians.
pub fn compare_spectra(params: &SpinChainParams, exec: Execution) -> Result<SpectrumComparison> {
    let n = params.sites;
    if n > MAX_DENSE_SITES {
        return Err(Error::OutOfRange { name: "N", value: n as f64, range: "even, <= 10" });
    }
    let gens = build_spin_generators(params)?;
    let w = params.loop_weights();
    let hd = hamiltonian_matrix(n, Sector::Vacuum, params.lambda1, params.lambda2, &w, exec)?;
    let mut ed: Vec<Complex64> = hd.matrix.to_dense().complex_eigenvalues().iter().copied().collect();
    let hs = xxz_hamiltonian(params)?.to_dense();
    let mut es: Vec<Complex64> = hs
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Invalid("complex Schur form did not converge".into()))?
        .iter()
        .copied()
        .collect();
    sort_spectrum(&mut ed);
    sort_spectrum(&mut es);
    let max_deviation = spectrum_distance(&ed, &es);
    let pairs = |v: &[Complex64]| v.iter().map(|c| (c.re, c.im)).collect();
    Ok(SpectrumComparison {
        sites: n,
        diagram: pairs(&ed),
        spin: pairs(&es),
        max_deviation,
        relation_residual: gens.max_residual,
    })
}

/// Fermi velocity `pi sin(gamma) / gamma` of the bulk chain.
pub fn fermi_velocity(gamma: f64) -> f64 {
    PI * gamma.sin() / gamma
}

/// The `count` eigenvalues of smallest real part of a sparse real matrix.
///
/// Block subspace iteration on `sigma - H` with a Rayleigh-Ritz step, where
/// `sigma` bounds the spectrum. Eigenvalues come back sorted by real part.
pub fn low_lying(h: &CsrMatrix, count: usize, tol: f64, max_iter: usize) -> Result<Vec<Complex64>> {
    let dim = h.nrows();
    let block = (count + 6).min(dim);
    let sigma = (0..dim).map(|r| h.row(r).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let shifted = |x: &[f64]| -> Vec<f64> {
        let hx = h.matvec(x);
        x.iter().zip(hx).map(|(a, b)| sigma * a - b).collect()
    };
    let mut q = DMatrix::from_fn(dim, block, |i, k| (0.7 * i as f64 + 1.9 * k as f64 + 0.3).sin() + if i == k { 1.0 } else { 0.0 });
    q = q.qr().q();
    let mut prev: Option<Vec<Complex64>> = None;
    for it in 1..=max_iter {
        let mut y = DMatrix::zeros(dim, block);
        for k in 0..block {
            let col: Vec<f64> = q.column(k).iter().copied().collect();
            y.set_column(k, &DVector::from_vec(shifted(&col)));
        }
        if it % 10 == 0 {
            let small = q.transpose() * &y;
            let mut ritz: Vec<Complex64> =
                small.complex_eigenvalues().iter().map(|mu| Complex64::from(sigma) - mu).collect();
            sort_spectrum(&mut ritz);
            ritz.truncate(count);
            if let Some(p) = &prev {
                let change = p.iter().zip(&ritz).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                if change <= tol {
                    return Ok(ritz);
                }
            }
            prev = Some(ritz);
        }
        q = y.qr().q();
    }
    Err(Error::NoConvergence(max_iter))
}

/// Scaled gaps `(E_k - E_0) N / (pi v_F)` of the diagram Hamiltonian on `V_0`.
pub fn scaled_gaps(params: &SpinChainParams, count: usize, exec: Execution) -> Result<Vec<f64>> {
    let n = params.sites;
    let hd = hamiltonian_matrix(n, Sector::Vacuum, params.lambda1, params.lambda2, &params.loop_weights(), exec)?;
    let ev = low_lying(&hd.matrix, count + 1, 1e-10, 200_000)?;
    let scale = n as f64 / (PI * fermi_velocity(params.gamma));
    Ok(ev[1..].iter().map(|e| (e.re - ev[0].re) * scale).collect())
}
