//! Dense matrices of the operators linearized about a line solitary wave:
//! `M_c = D^alpha + c - Q_c`, `L(k) = -d_x M_c d_x + k^2` and the transverse
//! eigenproblem `mu A w = L(k) w` with `A = -d_x`.
//!
//! Double precision only: the eigensolvers come from `faer`.

use faer::{Mat, MatRef, Side};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::params::{FkpParams, Sigma};
use crate::spectral::{apply_symbol, Fft1D, Grid1D, RealField1D, SymbolSpec};

pub type C64 = Complex<f64>;

/// Relative threshold separating negative eigenvalues from numerical zeros.
pub const NEGATIVE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorTag {
    Mc,
    LOfK(f64),
    /// Similarity transform `K^{1/2} A^{-1} L(k) K^{-1/2}` of `A^{-1} L(k)` on
    /// the mean-zero, non-Nyquist subspace (`K = |d_x|`).
    BOfK(f64),
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub tag: OperatorTag,
    pub matrix: Mat<f64>,
    pub grid: Grid1D<f64>,
    pub params: FkpParams<f64>,
    /// `max|M - M^T|` of the assembled matrix before symmetrization.
    pub symmetry_residual: f64,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.matrix.norm_max()
    }
}

/// First column of the circulant matrix with the given Fourier symbol.
fn circulant_column(symbol: &[C64]) -> Vec<f64> {
    let mut buf = symbol.to_vec();
    Fft1D::<f64>::new(buf.len()).inverse_in_place(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

fn circulant(column: &[f64]) -> Mat<f64> {
    let n = column.len();
    // enforce exact symmetry or antisymmetry of the stencil
    Mat::from_fn(n, n, |i, j| column[(i + n - j) % n])
}

/// Spectral x-derivative as a real matrix (Nyquist multiplier zero).
pub fn derivative_matrix(grid: &Grid1D<f64>) -> Mat<f64> {
    let k = grid.odd_wavenumbers();
    let symbol: Vec<C64> = k.iter().map(|&k| C64::new(0.0, k)).collect();
    let mut col = circulant_column(&symbol);
    let n = col.len();
    col[0] = 0.0;
    for d in 1..n / 2 {
        let v = 0.5 * (col[d] - col[n - d]);
        col[d] = v;
        col[n - d] = -v;
    }
    col[n / 2] = 0.0;
    circulant(&col)
}

/// `F^{-1} diag(|k|^alpha) F` as a real symmetric matrix.
pub fn riesz_matrix(grid: &Grid1D<f64>, alpha: f64) -> Mat<f64> {
    let symbol: Vec<C64> = grid.wavenumbers().iter().map(|k| C64::new(k.abs().powf(alpha), 0.0)).collect();
    let mut col = circulant_column(&symbol);
    let n = col.len();
    for d in 1..n / 2 {
        let v = 0.5 * (col[d] + col[n - d]);
        col[d] = v;
        col[n - d] = v;
    }
    circulant(&col)
}

fn symmetrize(m: &mut Mat<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j + 1..n {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            worst = worst.max((a - b).abs());
            let v = 0.5 * (a + b);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    worst
}

fn check_profile(profile: &RealField1D<f64>, params: &FkpParams<f64>) -> Result<()> {
    params.validate()?;
    if profile.grid().len() > 4096 {
        return Err(Error::InvalidArgument("dense operators limited to n <= 4096".into()));
    }
    Ok(())
}

/// `M_c = D^alpha + diag(c - Q_c)`.
pub fn build_mc(profile: &RealField1D<f64>, params: &FkpParams<f64>) -> Result<OperatorMatrix> {
    check_profile(profile, params)?;
    let grid = *profile.grid();
    let mut m = riesz_matrix(&grid, params.alpha);
    for (j, &q) in profile.samples().iter().enumerate() {
        m[(j, j)] += params.c - q;
    }
    let symmetry_residual = symmetrize(&mut m);
    Ok(OperatorMatrix { tag: OperatorTag::Mc, matrix: m, grid, params: *params, symmetry_residual })
}

/// `L(k) = D_x^T M_c D_x + k^2 I` on the full grid.
pub fn build_l(profile: &RealField1D<f64>, params: &FkpParams<f64>, k: f64) -> Result<OperatorMatrix> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument("transverse wavenumber must be non-negative".into()));
    }
    let mc = build_mc(profile, params)?;
    let dx = derivative_matrix(&mc.grid);
    let mut l = dx.transpose() * (&mc.matrix * &dx);
    for j in 0..l.nrows() {
        l[(j, j)] += k * k;
    }
    let symmetry_residual = symmetrize(&mut l);
    Ok(OperatorMatrix { tag: OperatorTag::LOfK(k), matrix: l, grid: mc.grid, params: *params, symmetry_residual })
}

/// Orthonormal real Fourier basis `sqrt(2/n) (cos k_m x, sin k_m x)`,
/// `m = 1..n/2-1`, of the mean-zero non-Nyquist subspace, with the matching
/// positive wavenumbers (each repeated twice).
pub fn fourier_subspace(grid: &Grid1D<f64>) -> (Mat<f64>, Vec<f64>) {
    let n = grid.len();
    let x = grid.points();
    let scale = (2.0 / n as f64).sqrt();
    let dim = n - 2;
    let mut wavenumbers = Vec::with_capacity(dim);
    for m in 1..n / 2 {
        let k = grid.wavenumber(m);
        wavenumbers.push(k);
        wavenumbers.push(k);
    }
    let basis = Mat::from_fn(n, dim, |j, col| {
        let k = wavenumbers[col];
        if col % 2 == 0 {
            scale * (k * x[j]).cos()
        } else {
            scale * (k * x[j]).sin()
        }
    });
    (basis, wavenumbers)
}

/// Symmetric part `S(0) = (D_x T K^{-1/2})^T M_c (D_x T K^{-1/2})` of the
/// transverse problem in the subspace basis `T`.
fn transverse_core(mc: &Mat<f64>, grid: &Grid1D<f64>) -> (Mat<f64>, Vec<f64>) {
    let (basis, k) = fourier_subspace(grid);
    let n = basis.nrows();
    // D_x c_m = -k s_m and D_x s_m = k c_m
    let g = Mat::from_fn(n, basis.ncols(), |j, col| {
        let root = k[col].sqrt();
        if col % 2 == 0 {
            -root * basis[(j, col + 1)]
        } else {
            root * basis[(j, col - 1)]
        }
    });
    let mut s = g.transpose() * (mc * &g);
    symmetrize(&mut s);
    (s, k)
}

/// `J S(k)` with `S(k) = S(0) + k^2 K^{-1}` and `J` the blockwise rotation
/// `[[0, 1], [-1, 0]]`; similar to `A^{-1} L(k)`.
fn hamiltonian_matrix(s0: &Mat<f64>, wavenumbers: &[f64], k: f64) -> Mat<f64> {
    let dim = s0.nrows();
    let s = |i: usize, j: usize| s0[(i, j)] + if i == j { k * k / wavenumbers[i] } else { 0.0 };
    Mat::from_fn(dim, dim, |i, j| if i % 2 == 0 { s(i + 1, j) } else { -s(i - 1, j) })
}

/// Eigenvalues of a symmetric operator plus the derived quantities.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub tag: OperatorTag,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Spectral norm `max|eig|`.
    pub norm: f64,
    pub tol_neg: f64,
    pub negative_count: usize,
    pub zero_count: usize,
    pub lambda_min: f64,
    /// `sqrt(|lambda_min|)` for `L(0)` with a negative eigenvalue.
    pub omega0: Option<f64>,
    /// Eigenvectors as columns, when requested.
    pub eigenvectors: Option<Mat<f64>>,
    /// `(eigenvalue, ||M v - mu v|| / ||M||)` for the numerically zero
    /// eigenvalues, when eigenvectors were requested.
    pub kernel_candidates: Vec<(f64, f64)>,
    /// Largest `||M v - mu v|| / ||M||` over all eigenpairs, when requested.
    pub eigenvector_residual: Option<f64>,
}

impl SpectrumReport {
    /// Eigenvector of the eigenvalue closest to `target`.
    pub fn eigenvector_near(&self, target: f64) -> Option<Vec<f64>> {
        let vecs = self.eigenvectors.as_ref()?;
        let idx = self
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))?
            .0;
        Some((0..vecs.nrows()).map(|i| vecs[(i, idx)]).collect())
    }
}

pub fn symmetric_spectrum(op: &OperatorMatrix, with_vectors: bool) -> Result<SpectrumReport> {
    if matches!(op.tag, OperatorTag::BOfK(_)) {
        return Err(Error::InvalidArgument("B(k) is not symmetric".into()));
    }
    let scale = op.max_abs();
    if op.symmetry_residual > 1e-10 * scale {
        return Err(Error::InvalidArgument(format!("matrix not symmetric (residual {:e})", op.symmetry_residual)));
    }
    let (eigenvalues, eigenvectors) = if with_vectors {
        let evd = op.matrix.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let vals: Vec<f64> = evd.S().column_vector().iter().copied().collect();
        (vals, Some(evd.U().to_owned()))
    } else {
        let vals = op.matrix.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        (vals, None)
    };
    let mut report = report_from_eigenvalues(op.tag, eigenvalues, eigenvectors);
    if let Some(vecs) = &report.eigenvectors {
        let image = &op.matrix * vecs;
        let residual = |col: usize| {
            let mu = report.eigenvalues[col];
            (0..vecs.nrows()).map(|i| (image[(i, col)] - mu * vecs[(i, col)]).powi(2)).sum::<f64>().sqrt() / report.norm
        };
        let residuals: Vec<f64> = (0..vecs.ncols()).map(residual).collect();
        report.eigenvector_residual = Some(residuals.iter().copied().fold(0.0, f64::max));
        report.kernel_candidates = report
            .eigenvalues
            .iter()
            .zip(&residuals)
            .filter(|(mu, _)| mu.abs() < report.tol_neg)
            .map(|(&mu, &r)| (mu, r))
            .collect();
    }
    Ok(report)
}

fn report_from_eigenvalues(tag: OperatorTag, eigenvalues: Vec<f64>, eigenvectors: Option<Mat<f64>>) -> SpectrumReport {
    let norm = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol_neg = NEGATIVE_TOLERANCE * norm;
    let negative_count = eigenvalues.iter().filter(|&&v| v < -tol_neg).count();
    let zero_count = eigenvalues.iter().filter(|v| v.abs() < tol_neg).count();
    let lambda_min = eigenvalues.first().copied().unwrap_or(f64::NAN);
    let omega0 = match tag {
        OperatorTag::LOfK(k) if k == 0.0 && lambda_min < -tol_neg => Some(lambda_min.abs().sqrt()),
        _ => None,
    };
    SpectrumReport {
        tag,
        eigenvalues,
        norm,
        tol_neg,
        negative_count,
        zero_count,
        lambda_min,
        omega0,
        eigenvectors,
        kernel_candidates: Vec::new(),
        eigenvector_residual: None,
    }
}

fn matvec(m: MatRef<'_, f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest distance from an eigenvalue to the nearest of its mirror images
/// `-mu` and `conj(mu)`.
pub fn quadruple_symmetry_defect(eigenvalues: &[C64]) -> f64 {
    let nearest = |target: C64| eigenvalues.iter().map(|z| (z - target).norm()).fold(f64::INFINITY, f64::min);
    eigenvalues.iter().map(|&mu| nearest(-mu).max(nearest(mu.conj()))).fold(0.0, f64::max)
}

/// Relative kernel residuals of the discrete operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelWitnesses {
    /// `||L 1|| / ||L||`.
    pub constant: f64,
    /// `||L Q_c|| / (||L|| ||Q_c||)`.
    pub profile: f64,
    /// `||M_c Q_c'|| / (||M_c|| ||Q_c'||)`.
    pub derivative: f64,
}

/// Numeric certificate of the structural conditions on `L(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// `max|L(k) - L(k)^T| / ||L||` over the sampled `k`.
    pub symmetry_residual: f64,
    /// Smallest eigenvalue of `L(omega0 (1 + eps))`.
    pub min_eig_above_omega0: f64,
    /// `max|eig L(k) - eig L - k^2| / ||L||`.
    pub shift_identity_defect: f64,
    /// Smallest eigenvalue of `L(k)` is nondecreasing over the sampled `k`.
    pub monotone_in_k: bool,
    pub negative_count: usize,
    pub lambda: f64,
    pub omega0: f64,
}

impl Certificate {
    pub fn passes(&self) -> bool {
        self.symmetry_residual <= 1e-10
            && self.min_eig_above_omega0 > 0.0
            && self.shift_identity_defect <= 1e-10
            && self.monotone_in_k
            && self.negative_count == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRateCurve {
    pub k: Vec<f64>,
    pub sigma_max: Vec<f64>,
}

impl GrowthRateCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sigma_max\n");
        for (k, s) in self.k.iter().zip(&self.sigma_max) {
            out.push_str(&format!("{k:.16e},{s:.16e}\n"));
        }
        out
    }
}

/// Operators around one profile, assembled once and reused across `k`.
#[derive(Debug, Clone)]
pub struct LinearizedOperators {
    profile: RealField1D<f64>,
    params: FkpParams<f64>,
    mc: OperatorMatrix,
    l: OperatorMatrix,
    core: Mat<f64>,
    wavenumbers: Vec<f64>,
}

impl LinearizedOperators {
    pub fn new(profile: &RealField1D<f64>, params: &FkpParams<f64>) -> Result<Self> {
        let mc = build_mc(profile, params)?;
        let dx = derivative_matrix(&mc.grid);
        let mut l = dx.transpose() * (&mc.matrix * &dx);
        let symmetry_residual = symmetrize(&mut l);
        let l = OperatorMatrix { tag: OperatorTag::LOfK(0.0), matrix: l, grid: mc.grid, params: *params, symmetry_residual };
        let (core, wavenumbers) = transverse_core(&mc.matrix, &mc.grid);
        Ok(Self { profile: profile.clone(), params: *params, mc, l, core, wavenumbers })
    }

    pub fn grid(&self) -> &Grid1D<f64> {
        &self.mc.grid
    }

    pub fn params(&self) -> &FkpParams<f64> {
        &self.params
    }

    pub fn profile(&self) -> &RealField1D<f64> {
        &self.profile
    }

    pub fn mc(&self) -> &OperatorMatrix {
        &self.mc
    }

    pub fn l(&self) -> &OperatorMatrix {
        &self.l
    }

    pub fn l_of_k(&self, k: f64) -> OperatorMatrix {
        let mut m = self.l.clone();
        for j in 0..m.matrix.nrows() {
            m.matrix[(j, j)] += k * k;
        }
        m.tag = OperatorTag::LOfK(k);
        m
    }

    pub fn b_of_k(&self, k: f64) -> OperatorMatrix {
        OperatorMatrix {
            tag: OperatorTag::BOfK(k),
            matrix: hamiltonian_matrix(&self.core, &self.wavenumbers, k),
            grid: self.mc.grid,
            params: self.params,
            symmetry_residual: f64::NAN,
        }
    }

    /// Spectrum of `L(0)`.
    pub fn l_spectrum(&self, with_vectors: bool) -> Result<SpectrumReport> {
        symmetric_spectrum(&self.l, with_vectors)
    }

    pub fn mc_spectrum(&self, with_vectors: bool) -> Result<SpectrumReport> {
        symmetric_spectrum(&self.mc, with_vectors)
    }

    /// Spectrum of `A^{-1} L(k)`, ordered by decreasing real part.
    pub fn b_spectrum(&self, k: f64) -> Result<Vec<C64>> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument("transverse wavenumber must be positive".into()));
        }
        let b = hamiltonian_matrix(&self.core, &self.wavenumbers, k);
        let mut eig = b.eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))?;
        eig.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        Ok(eig)
    }

    /// `max Re mu` over the spectrum of `A^{-1} L(k)` (fKP-I only).
    pub fn growth_rate(&self, k: f64) -> Result<f64> {
        if self.params.sigma != Sigma::KpI {
            return Err(Error::InvalidArgument("transverse growth rates are defined for fKP-I".into()));
        }
        Ok(self.b_spectrum(k)?[0].re)
    }

    pub fn growth_rate_curve(&self, ks: &[f64]) -> Result<GrowthRateCurve> {
        if ks.is_empty() || ks.windows(2).any(|w| w[1] <= w[0]) || ks[0] <= 0.0 {
            return Err(Error::InvalidArgument("wavenumbers must be positive and increasing".into()));
        }
        let sigma_max = ks.iter().map(|&k| self.growth_rate(k)).collect::<Result<Vec<_>>>()?;
        Ok(GrowthRateCurve { k: ks.to_vec(), sigma_max })
    }

    pub fn kernel_witnesses(&self) -> Result<KernelWitnesses> {
        let n = self.grid().len();
        let l_norm = self.l_spectrum(false)?.norm;
        let mc_norm = self.mc_spectrum(false)?.norm;
        let ones = vec![1.0; n];
        let q = self.profile.samples();
        let dq = apply_symbol(&self.profile, &SymbolSpec::Dx)?;
        let rel = |m: &Mat<f64>, v: &[f64], norm: f64| norm2(&matvec(m.as_ref(), v)) / (norm * norm2(v));
        Ok(KernelWitnesses {
            constant: norm2(&matvec(self.l.matrix.as_ref(), &ones)) / l_norm,
            profile: rel(&self.l.matrix, q, l_norm),
            derivative: rel(&self.mc.matrix, dq.samples(), mc_norm),
        })
    }

    /// Checks symmetry, the shift identity at each `k`, positivity just above
    /// `omega0` and the single negative direction of `L`.
    pub fn certificate(&self, ks: &[f64], eps: f64) -> Result<Certificate> {
        let base = self.l_spectrum(false)?;
        let omega0 = base.omega0.ok_or(Error::NoNegativeEigenvalue)?;
        let norm = base.norm;
        let mut symmetry_residual = self.l.symmetry_residual / norm;
        let mut shift = 0.0f64;
        let mut previous_min = f64::NEG_INFINITY;
        let mut monotone = true;
        for &k in ks {
            let op = self.l_of_k(k);
            let mut asym = 0.0f64;
            for j in 0..op.dim() {
                for i in 0..j {
                    asym = asym.max((op.matrix[(i, j)] - op.matrix[(j, i)]).abs());
                }
            }
            symmetry_residual = symmetry_residual.max(asym / norm);
            let spec = symmetric_spectrum(&op, false)?;
            for (a, b) in spec.eigenvalues.iter().zip(&base.eigenvalues) {
                shift = shift.max((a - b - k * k).abs() / norm);
            }
            monotone &= spec.lambda_min >= previous_min;
            previous_min = spec.lambda_min;
        }
        let above = symmetric_spectrum(&self.l_of_k(omega0 * (1.0 + eps)), false)?;
        Ok(Certificate {
            symmetry_residual,
            min_eig_above_omega0: above.lambda_min,
            shift_identity_defect: shift,
            monotone_in_k: monotone,
            negative_count: base.negative_count,
            lambda: base.lambda_min,
            omega0,
        })
    }
}

/// Every `stride`-th sample of `profile`: the values of its interpolant on
/// the grid with the same half-width and `n / stride` points.
pub fn subsample(profile: &RealField1D<f64>, n: usize) -> Result<RealField1D<f64>> {
    let fine = profile.grid();
    if n == 0 || fine.len() % n != 0 {
        return Err(Error::InvalidArgument(format!("cannot subsample {} points to {n}", fine.len())));
    }
    let stride = fine.len() / n;
    let grid = Grid1D::new(fine.half_width(), n)?;
    RealField1D::new(grid, profile.samples().iter().step_by(stride).copied().collect())
}
