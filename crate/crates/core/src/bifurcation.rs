//! Continuation of the dimension-breaking branch: steady fKP-I solutions
//! `phi = Q_c + d_x w` with `w(x, y) = sum_m w_m(x) cos(m omega y)` solving
//! `L w + (w_x^2)_x / 2 - w_yy = 0`.
//!
//! Each `w_m` lives in the odd grid subspace spanned by
//! `(e_{n/2+i} - e_{n/2-i}) / sqrt(2)`. Newton runs on `w_m / s` and `omega`
//! with the amplitude fixed by `<w_1, chi> = s`.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::linear_analysis::{derivative_matrix, LinearizedOperators};
use crate::params::{FkpParams, Sigma};
use crate::spectral::{apply_symbol, Grid1D, Grid2D, RealField1D, RealField2D, SymbolSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOptions {
    /// Highest cosine mode `M_y`.
    pub modes: usize,
    /// Collocation points in the periodic variable per mode.
    pub collocation_factor: usize,
    pub max_iterations: usize,
    /// Newton tolerance relative to `||L|| max|w / s|`.
    pub tolerance: f64,
    /// Smallest continuation step before giving up.
    pub min_step: f64,
}

impl Default for BranchOptions {
    fn default() -> Self {
        Self { modes: 8, collocation_factor: 4, max_iterations: 50, tolerance: 1e-10, min_step: 1e-6 }
    }
}

/// One solution on the branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub s: f64,
    pub omega: f64,
    /// Grid samples of `w_m`, `m = 0..=M_y`.
    pub modes: Vec<Vec<f64>>,
    /// Newton residual relative to `||L|| max|w / s|`.
    pub residual_sup: f64,
    /// Relative residual after each Newton iterate, starting with the guess.
    pub residual_history: Vec<f64>,
}

impl BranchPoint {
    /// Largest `|w_m(x) + w_m(-x)|` over all modes.
    pub fn odd_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for w in &self.modes {
            let n = w.len();
            for j in 0..n {
                worst = worst.max((w[j] + w[(n - j) % n]).abs());
            }
        }
        worst
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }
}

/// Newton residuals of `L w_m + m^2 omega^2 w_m + Pi_m[(w_x^2)_x] / 2`.
pub type ModeResiduals = Vec<Vec<f64>>;

#[derive(Debug, Clone)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub omega0: f64,
}

impl Branch {
    /// Least-squares fit `omega(s) = a + b s^2`; returns `(a, b)`.
    pub fn omega_fit(&self) -> Result<(f64, f64)> {
        if self.points.len() < 2 {
            return Err(Error::EmptySeries);
        }
        let (mut n, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for p in &self.points {
            let x = p.s * p.s;
            n += 1.0;
            sx += x;
            sxx += x * x;
            sy += p.omega;
            sxy += x * p.omega;
        }
        let det = n * sxx - sx * sx;
        if det.abs() <= f64::EPSILON * n * sxx {
            return Err(Error::InvalidArgument("amplitudes do not determine a fit".into()));
        }
        let b = (n * sxy - sx * sy) / det;
        Ok(((sy - b * sx) / n, b))
    }

    /// `|a - omega0| / omega0` for the fitted intercept.
    pub fn intercept_error(&self) -> Result<f64> {
        let (a, _) = self.omega_fit()?;
        Ok((a - self.omega0).abs() / self.omega0)
    }

    pub fn to_csv(&self, grid: &Grid1D<f64>) -> String {
        let dx = derivative_matrix(grid);
        let mut out = String::from("s,omega,residual,sup_dx_w\n");
        for p in &self.points {
            let sup = p
                .modes
                .iter()
                .map(|w| sup_abs(&matvec(&dx, w)))
                .sum::<f64>();
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", p.s, p.omega, p.residual_sup, sup));
        }
        out
    }
}

fn matvec(m: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Fixed data of the branch computation around one profile.
#[derive(Debug, Clone)]
pub struct BranchSolver {
    params: FkpParams<f64>,
    grid: Grid1D<f64>,
    profile: RealField1D<f64>,
    /// `D_x P`, `n x d`.
    dx_odd: Mat<f64>,
    /// `P^T L P`.
    l_odd: Mat<f64>,
    l_norm: f64,
    lambda_full: f64,
    lambda_odd: f64,
    chi: Vec<f64>,
    options: BranchOptions,
}

impl BranchSolver {
    pub fn new(profile: &RealField1D<f64>, params: &FkpParams<f64>, options: BranchOptions) -> Result<Self> {
        if params.sigma != Sigma::KpI {
            return Err(Error::InvalidArgument("the branch exists for fKP-I only".into()));
        }
        if options.modes == 0 || options.collocation_factor < 3 {
            return Err(Error::InvalidArgument("need at least one mode and collocation factor >= 3".into()));
        }
        let grid = *profile.grid();
        let n = grid.len();
        let samples = profile.samples();
        let even: Vec<f64> = (0..n).map(|j| 0.5 * (samples[j] + samples[(n - j) % n])).collect();
        let profile = RealField1D::new(grid, even)?;
        let ops = LinearizedOperators::new(&profile, params)?;
        let full = ops.l_spectrum(false)?;
        let lambda_full = full.lambda_min;
        if full.negative_count == 0 {
            return Err(Error::NoNegativeEigenvalue);
        }
        let d = n / 2 - 1;
        let h = n / 2;
        let root = std::f64::consts::FRAC_1_SQRT_2;
        let dx = derivative_matrix(&grid);
        let dx_odd = Mat::from_fn(n, d, |r, i| root * (dx[(r, h + i + 1)] - dx[(r, h - i - 1)]));
        let mc = &ops.mc().matrix;
        let mut l_odd = dx_odd.transpose() * (mc * &dx_odd);
        for j in 0..d {
            for i in j + 1..d {
                let v = 0.5 * (l_odd[(i, j)] + l_odd[(j, i)]);
                l_odd[(i, j)] = v;
                l_odd[(j, i)] = v;
            }
        }
        let evd = l_odd.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let lambda_odd = evd.S().column_vector()[0];
        if lambda_odd >= 0.0 {
            return Err(Error::NoNegativeEigenvalue);
        }
        let mut chi: Vec<f64> = (0..d).map(|i| evd.U()[(i, 0)]).collect();
        let slope: f64 = (0..d).map(|i| dx_odd[(h, i)] * chi[i]).sum();
        if slope < 0.0 {
            chi.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(Self {
            params: *params,
            grid,
            profile,
            dx_odd,
            l_odd,
            l_norm: full.norm,
            lambda_full,
            lambda_odd,
            chi,
            options,
        })
    }

    pub fn grid(&self) -> &Grid1D<f64> {
        &self.grid
    }

    pub fn params(&self) -> &FkpParams<f64> {
        &self.params
    }

    pub fn options(&self) -> &BranchOptions {
        &self.options
    }

    /// Smallest eigenvalue of `L` on the whole grid.
    pub fn lambda_full(&self) -> f64 {
        self.lambda_full
    }

    /// Smallest eigenvalue of `L` restricted to odd functions.
    pub fn lambda_odd(&self) -> f64 {
        self.lambda_odd
    }

    pub fn omega0(&self) -> f64 {
        self.lambda_odd.abs().sqrt()
    }

    fn dim(&self) -> usize {
        self.l_odd.nrows()
    }

    fn collocation(&self) -> usize {
        self.options.collocation_factor * self.options.modes
    }

    /// Odd eigenfunction of `lambda_odd` as grid samples.
    pub fn chi(&self) -> Vec<f64> {
        self.to_grid(&self.chi)
    }

    fn to_grid(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let h = n / 2;
        let root = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = vec![0.0; n];
        for (i, &c) in coeffs.iter().enumerate() {
            out[h + i + 1] = root * c;
            out[h - i - 1] = -root * c;
        }
        out
    }

    fn to_coeffs(&self, samples: &[f64]) -> Vec<f64> {
        let h = self.grid.len() / 2;
        let root = std::f64::consts::FRAC_1_SQRT_2;
        (0..self.dim()).map(|i| root * (samples[h + i + 1] - samples[h - i - 1])).collect()
    }

    /// `w_1 = s chi`, other modes zero, `omega = omega0`.
    pub fn predictor(&self, s: f64) -> BranchPoint {
        let n = self.grid.len();
        let mut modes = vec![vec![0.0; n]; self.options.modes + 1];
        modes[1] = self.chi().into_iter().map(|v| s * v).collect();
        BranchPoint { s, omega: self.omega0(), modes, residual_sup: f64::NAN, residual_history: Vec::new() }
    }

    /// `d_x w_m` on the collocation grid in the periodic variable, `[q][x]`.
    fn slopes(&self, coeffs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let nq = self.collocation();
        let n = self.grid.len();
        let per_mode: Vec<Vec<f64>> = coeffs.iter().map(|c| matvec(&self.dx_odd, c)).collect();
        (0..nq)
            .map(|q| {
                let theta = std::f64::consts::TAU * q as f64 / nq as f64;
                let mut row = vec![0.0; n];
                for (m, g) in per_mode.iter().enumerate() {
                    let cm = (m as f64 * theta).cos();
                    row.iter_mut().zip(g).for_each(|(r, v)| *r += cm * v);
                }
                row
            })
            .collect()
    }

    /// Cosine coefficient `m` of a function sampled on the collocation grid.
    fn project(&self, rows: &[Vec<f64>], m: usize) -> Vec<f64> {
        let nq = rows.len();
        let weight = if m == 0 { 1.0 } else { 2.0 } / nq as f64;
        let mut out = vec![0.0; self.grid.len()];
        for (q, row) in rows.iter().enumerate() {
            let cm = weight * (std::f64::consts::TAU * (m * q) as f64 / nq as f64).cos();
            out.iter_mut().zip(row).for_each(|(o, v)| *o += cm * v);
        }
        out
    }

    /// Scaled residual `F_m` in odd coefficients for unknowns `w_m / s`.
    fn scaled_residual(&self, coeffs: &[Vec<f64>], omega: f64, s: f64) -> Vec<Vec<f64>> {
        let rows = self.slopes(coeffs);
        let squares: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v * v).collect()).collect();
        let d = self.dim();
        coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| {
                let shift = (m * m) as f64 * omega * omega;
                let pm = self.project(&squares, m);
                // P^T D_x = -(D_x P)^T
                (0..d)
                    .map(|i| {
                        let lin: f64 = (0..d).map(|j| self.l_odd[(i, j)] * c[j]).sum::<f64>() + shift * c[i];
                        let nl: f64 = (0..pm.len()).map(|r| self.dx_odd[(r, i)] * pm[r]).sum();
                        lin - 0.5 * s * nl
                    })
                    .collect()
            })
            .collect()
    }

    /// Unscaled per-mode residuals as odd grid samples.
    pub fn steady_residual(&self, point: &BranchPoint) -> ModeResiduals {
        let coeffs: Vec<Vec<f64>> = point.modes.iter().map(|w| self.to_coeffs(w)).collect();
        self.scaled_residual(&coeffs, point.omega, 1.0).iter().map(|r| self.to_grid(r)).collect()
    }

    fn scale_of(&self, coeffs: &[Vec<f64>]) -> f64 {
        self.l_norm * coeffs.iter().map(|c| sup_abs(c)).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
    }

    fn jacobian(&self, coeffs: &[Vec<f64>], omega: f64, s: f64) -> Mat<f64> {
        let d = self.dim();
        let modes = coeffs.len();
        let size = modes * d + 1;
        let nq = self.collocation();
        let rows = self.slopes(coeffs);
        let mut jac = Mat::<f64>::zeros(size, size);
        for m in 0..modes {
            for k in 0..modes {
                let weight = if m == 0 { 1.0 } else { 2.0 } / nq as f64;
                let mut h = vec![0.0; self.grid.len()];
                for (q, row) in rows.iter().enumerate() {
                    let theta = std::f64::consts::TAU * q as f64 / nq as f64;
                    let f = weight * (m as f64 * theta).cos() * (k as f64 * theta).cos();
                    h.iter_mut().zip(row).for_each(|(o, v)| *o += f * v);
                }
                let scaled = Mat::from_fn(self.grid.len(), d, |r, j| h[r] * self.dx_odd[(r, j)]);
                let block = self.dx_odd.transpose() * &scaled;
                for i in 0..d {
                    for j in 0..d {
                        let mut v = -s * block[(i, j)];
                        if m == k {
                            v += self.l_odd[(i, j)] + if i == j { (m * m) as f64 * omega * omega } else { 0.0 };
                        }
                        jac[(m * d + i, k * d + j)] = v;
                    }
                }
            }
            for i in 0..d {
                jac[(m * d + i, size - 1)] = 2.0 * (m * m) as f64 * omega * coeffs[m][i];
            }
        }
        for j in 0..d {
            jac[(size - 1, d + j)] = self.chi[j];
        }
        jac
    }

    /// Newton iteration from `guess` at fixed amplitude `guess.s`.
    pub fn newton_correct(&self, guess: &BranchPoint) -> Result<BranchPoint> {
        let s = guess.s;
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument("branch amplitude must be positive".into()));
        }
        if guess.modes.len() != self.options.modes + 1 {
            return Err(Error::Length { expected: self.options.modes + 1, actual: guess.modes.len() });
        }
        let d = self.dim();
        let mut coeffs: Vec<Vec<f64>> =
            guess.modes.iter().map(|w| self.to_coeffs(w).into_iter().map(|v| v / s).collect()).collect();
        let mut omega = guess.omega;
        let mut history = Vec::new();
        for _ in 0..=self.options.max_iterations {
            let f = self.scaled_residual(&coeffs, omega, s);
            let constraint: f64 = coeffs[1].iter().zip(&self.chi).map(|(a, b)| a * b).sum::<f64>() - 1.0;
            let scale = self.scale_of(&coeffs);
            let rel = f.iter().map(|r| sup_abs(r)).fold(constraint.abs() * self.l_norm, f64::max) / scale;
            if !rel.is_finite() {
                return Err(Error::Divergence(rel));
            }
            history.push(rel);
            if rel <= self.options.tolerance {
                let modes = coeffs.iter().map(|c| self.to_grid(c).into_iter().map(|v| v * s).collect()).collect();
                return Ok(BranchPoint { s, omega, modes, residual_sup: rel, residual_history: history });
            }
            let jac = self.jacobian(&coeffs, omega, s);
            let size = jac.nrows();
            let mut rhs = Mat::from_fn(size, 1, |i, _| if i + 1 == size { -constraint } else { -f[i / d][i % d] });
            let lu = jac.partial_piv_lu();
            lu.solve_in_place(rhs.as_mut());
            if (0..size).any(|i| !rhs[(i, 0)].is_finite()) {
                return Err(Error::SingularJacobian);
            }
            for (m, c) in coeffs.iter_mut().enumerate() {
                c.iter_mut().enumerate().for_each(|(i, v)| *v += rhs[(m * d + i, 0)]);
            }
            omega += rhs[(size - 1, 0)];
        }
        Err(Error::NoConvergence { iterations: self.options.max_iterations, last_change: *history.last().unwrap_or(&f64::NAN) })
    }

    /// Continues the branch through increasing amplitudes, starting from the
    /// linear predictor and bisecting steps that fail.
    pub fn continue_branch(&self, s_values: &[f64]) -> Result<Branch> {
        if s_values.is_empty() || s_values[0] <= 0.0 || s_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("amplitudes must be positive and increasing".into()));
        }
        let mut points = Vec::new();
        let mut accepted: Vec<BranchPoint> = Vec::new();
        let mut current = self.newton_correct(&self.predictor(s_values[0]))?;
        accepted.push(current.clone());
        points.push(current.clone());
        for &target in &s_values[1..] {
            let mut step = target - current.s;
            while current.s < target {
                if step < self.options.min_step {
                    return Err(Error::ContinuationStall(current.s));
                }
                let next_s = (current.s + step).min(target);
                let guess = self.secant_guess(&accepted, next_s);
                match self.newton_correct(&guess) {
                    Ok(point) => {
                        accepted.push(point.clone());
                        current = point;
                    }
                    Err(Error::NoConvergence { .. } | Error::SingularJacobian | Error::Divergence(_)) => step *= 0.5,
                    Err(e) => return Err(e),
                }
            }
            points.push(current.clone());
        }
        Ok(Branch { points, omega0: self.omega0() })
    }

    fn secant_guess(&self, accepted: &[BranchPoint], s: f64) -> BranchPoint {
        let last = &accepted[accepted.len() - 1];
        let scaled = |p: &BranchPoint| -> Vec<Vec<f64>> {
            p.modes.iter().map(|w| w.iter().map(|v| v / p.s).collect()).collect()
        };
        let (modes, omega) = if accepted.len() >= 2 {
            let prev = &accepted[accepted.len() - 2];
            let t = (s - last.s) / (last.s - prev.s);
            let (a, b) = (scaled(last), scaled(prev));
            let modes = a
                .iter()
                .zip(&b)
                .map(|(x, y)| x.iter().zip(y).map(|(u, v)| s * (u + t * (u - v))).collect())
                .collect();
            (modes, last.omega + t * (last.omega - prev.omega))
        } else {
            (scaled(last).into_iter().map(|w| w.into_iter().map(|v| v * s).collect()).collect(), last.omega)
        };
        BranchPoint { s, omega, modes, residual_sup: f64::NAN, residual_history: Vec::new() }
    }

    /// `sum_{m >= 1} ||d_x w_m||^2 dx / 2`.
    pub fn transverse_energy(&self, point: &BranchPoint) -> f64 {
        let dx = derivative_matrix(&self.grid);
        let h = self.grid.dx();
        point.modes.iter().skip(1).map(|w| 0.5 * h * matvec(&dx, w).iter().map(|v| v * v).sum::<f64>()).sum()
    }

    /// `phi = Q_c + d_x w` on one period cell `[-L, L) x [-pi/omega, pi/omega)`.
    pub fn reconstruct(&self, point: &BranchPoint, ny: usize) -> Result<RealField2D<f64>> {
        let grid = Grid2D::new(self.grid, Grid1D::new(std::f64::consts::PI / point.omega, ny)?);
        let dx = derivative_matrix(&self.grid);
        let slopes: Vec<Vec<f64>> = point.modes.iter().map(|w| matvec(&dx, w)).collect();
        let n = self.grid.len();
        let q = self.profile.samples();
        let mut samples = Vec::with_capacity(n * ny);
        for iy in 0..ny {
            let y = grid.y.point(iy);
            for ix in 0..n {
                let mut v = q[ix];
                for (m, g) in slopes.iter().enumerate() {
                    v += g[ix] * (m as f64 * point.omega * y).cos();
                }
                samples.push(v);
            }
        }
        RealField2D::new(grid, samples)
    }

    /// Residual of `(-c phi + phi^2/2 - D^alpha phi)_xx - phi_yy` on the
    /// collocation cell, relative to the largest of its terms.
    pub fn direct_residual(&self, point: &BranchPoint) -> Result<f64> {
        let c = self.params.c;
        let nq = self.collocation();
        let dx = derivative_matrix(&self.grid);
        let slopes: Vec<Vec<f64>> = point.modes.iter().map(|w| matvec(&dx, w)).collect();
        let q = self.profile.samples();
        let second = |v: Vec<f64>| -> Result<Vec<f64>> {
            let f = RealField1D::new(self.grid, v)?;
            let once = apply_symbol(&f, &SymbolSpec::Dx)?;
            Ok(apply_symbol(&once, &SymbolSpec::Dx)?.into_samples())
        };
        let (mut worst, mut scale) = (0.0f64, 0.0f64);
        for iq in 0..nq {
            let theta = std::f64::consts::TAU * iq as f64 / nq as f64;
            let mut phi = q.to_vec();
            let mut phi_yy = vec![0.0; q.len()];
            for (m, g) in slopes.iter().enumerate() {
                let cm = (m as f64 * theta).cos();
                let k2 = (m as f64 * point.omega).powi(2);
                for j in 0..phi.len() {
                    phi[j] += cm * g[j];
                    phi_yy[j] -= k2 * cm * g[j];
                }
            }
            let field = RealField1D::new(self.grid, phi.clone())?;
            let riesz = apply_symbol(&field, &SymbolSpec::Riesz(self.params.alpha))?.into_samples();
            let linear = second(phi.iter().map(|v| -c * v).collect())?;
            let quad = second(phi.iter().map(|v| 0.5 * v * v).collect())?;
            let disp = second(riesz.iter().map(|v| -v).collect())?;
            for j in 0..phi.len() {
                let r = linear[j] + quad[j] + disp[j] - phi_yy[j];
                worst = worst.max(r.abs());
                scale = scale.max(linear[j].abs()).max(quad[j].abs()).max(disp[j].abs()).max(phi_yy[j].abs());
            }
        }
        Ok(worst / scale)
    }
}

/// Geometric amplitudes `start, 2 start, ..` up to and including `end`.
pub fn doubling_amplitudes(start: f64, end: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = start;
    while s < end * (1.0 - 1e-12) {
        out.push(s);
        s *= 2.0;
    }
    out.push(end);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground_state::kdv_soliton;

    fn solver(modes: usize) -> BranchSolver {
        let grid = Grid1D::new(25.0, 256).unwrap();
        let params = FkpParams::new(2.0, Sigma::KpI, 2.0).unwrap();
        let q = RealField1D::from_fn(grid, |x| kdv_soliton(2.0, x)).unwrap();
        BranchSolver::new(&q, &params, BranchOptions { modes, ..Default::default() }).unwrap()
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let sol = solver(3);
        let mut p = sol.predictor(1.0);
        p.modes.iter_mut().for_each(|w| w.iter_mut().for_each(|v| *v = 0.0));
        let r = sol.steady_residual(&p);
        assert!(r.iter().all(|m| m.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn predictor_residual_is_quadratic() {
        let sol = solver(3);
        let size = |s: f64| {
            sol.steady_residual(&sol.predictor(s)).iter().map(|m| sup_abs(m)).fold(0.0, f64::max)
        };
        let ratio = size(1e-3) / size(5e-4);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn kdv_odd_eigenvalue_matches_known_value() {
        // for KdV solitons the odd ground state of L has lambda = -3 c^2 / 16
        let sol = solver(2);
        assert!((sol.lambda_odd() + 0.75).abs() < 1e-6, "{}", sol.lambda_odd());
        assert!((sol.lambda_full() - sol.lambda_odd()).abs() < 1e-8);
    }

    #[test]
    fn newton_converges_at_small_amplitude() {
        let sol = solver(3);
        let p = sol.newton_correct(&sol.predictor(1e-4)).unwrap();
        assert!(p.residual_sup <= 1e-10);
        assert!((p.omega - sol.omega0()).abs() <= 1e-3 * sol.omega0());
        assert!(p.odd_defect() < 1e-12);
        let direct = sol.direct_residual(&p).unwrap();
        assert!(direct < 1e-8, "{direct}");
    }

    #[test]
    fn doubling_amplitudes_cover_range() {
        let s = doubling_amplitudes(1e-4, 1e-2);
        assert_eq!(s.first(), Some(&1e-4));
        assert_eq!(s.last(), Some(&1e-2));
        assert_eq!(s.len(), 8);
    }
}
