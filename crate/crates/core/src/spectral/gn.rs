//! Discrete check of the Gagliardo-Nirenberg type interpolation bound
//! `||D^a u||^2 <= eps sum_{m<n} 4^-m ||D^b u||^2 + 4^-n eps^-(2^n - 1) ||D^s u||^2`
//! with `s = s_{n+1}`, `s_1 = a`, `s_{m+1} = 2 s_m - b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::RealField1D;
use super::grid::Grid1D;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Order `s_{m}` of the recursion `s_1 = a`, `s_{m+1} = 2 s_m - b`.
pub fn gn_order<T: Real>(a: T, b: T, m: usize) -> T {
    let mut s = a;
    for _ in 1..m {
        s = lit::<T>(2.0) * s - b;
    }
    s
}

/// `||D^s u||^2` computed from DFT coefficients by Parseval.
///
/// Negative orders are replaced by the low/high frequency split
/// `sum_{|k|>1} |k|^b |u_k|^2 + sum_{|k|<=1} |u_k|^2`, which bounds
/// `|k|^{2s}` from above for `|k| > 1`.
pub fn sobolev_seminorm_sq<T: Real>(u: &RealField1D<T>, s: T, b: T) -> T {
    let grid = u.grid();
    let n = T::from_usize_lossy(grid.len());
    let weight = grid.dx() / n;
    let coeffs = u.coeffs();
    let two = lit::<T>(2.0);
    let total = coeffs.iter().enumerate().fold(T::zero(), |acc, (j, c)| {
        let k = grid.wavenumber(j).abs();
        let w = if s >= T::zero() {
            k.powf(two * s)
        } else if k > T::one() {
            k.powf(b)
        } else {
            T::one()
        };
        acc + w * c.norm_sqr()
    });
    total * weight
}

/// Returns `(lhs, rhs)` of the bound for recursion depth `n >= 1`.
pub fn gn_inequality_check<T: Real>(u: &RealField1D<T>, a: T, b: T, eps: T, n: usize) -> Result<(T, T)> {
    if !(a > T::zero() && a < b) {
        return Err(Error::InvalidArgument(format!("need 0 < a < b, got a={a}, b={b}")));
    }
    if !(eps > T::zero()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("recursion depth must be at least 1".into()));
    }
    let four = lit::<T>(4.0);
    let lhs = sobolev_seminorm_sq(u, a, b);
    let db = sobolev_seminorm_sq(u, b, b);
    let geometric = (0..n).fold(T::zero(), |acc, m| acc + four.powi(-(m as i32)));
    let s_last = gn_order(a, b, n + 1);
    let tail_weight = T::one() / (four.powi(n as i32) * eps.powi((1_i32 << n) - 1));
    let rhs = eps * geometric * db + tail_weight * sobolev_seminorm_sq(u, s_last, b);
    Ok((lhs, rhs))
}

/// Outcome of [`gn_random_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnSuiteReport {
    pub trials: usize,
    /// Cases with `lhs > rhs (1 + 1e-12)`.
    pub failures: usize,
    /// Largest `lhs / rhs` seen.
    pub worst_ratio: f64,
}

/// Checks the bound with orders `a < b` and weight `eps` on `trials` random
/// zero-mean band-limited fields at recursion depth `depth`.
pub fn gn_random_suite(seed: u64, trials: usize, a: f64, b: f64, eps: f64, depth: usize) -> Result<GnSuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid1D::new(10.0, 128)?;
    let mut report = GnSuiteReport { trials, failures: 0, worst_ratio: 0.0 };
    for _ in 0..trials {
        let cutoff = rng.gen_range(4..=48);
        let modes: Vec<(f64, f64, f64)> = (1..=cutoff)
            .map(|m| (m as f64 * grid.dk(), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let u = RealField1D::from_fn(grid, |x| modes.iter().map(|(k, c, s)| c * (k * x).cos() + s * (k * x).sin()).sum())?;
        let (lhs, rhs) = gn_inequality_check(&u, a, b, eps, depth)?;
        if lhs > rhs * (1.0 + 1e-12) {
            report.failures += 1;
        }
        if rhs > 0.0 {
            report.worst_ratio = report.worst_ratio.max(lhs / rhs);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn order_recursion() {
        assert_eq!(gn_order(1.0, 1.5, 1), 1.0);
        assert_eq!(gn_order(1.0, 1.5, 2), 0.5);
        assert_eq!(gn_order(1.0, 1.5, 3), -0.5);
    }

    #[test]
    fn single_mode_reduces_to_young() {
        let g = make_grid(std::f64::consts::PI * 2.0, 64).unwrap();
        let k = 5.0 * g.dk();
        let u = RealField1D::from_fn(g, |x| (k * x).cos()).unwrap();
        let (a, b, eps) = (1.0, 1.75, 0.1);
        let (lhs, rhs) = gn_inequality_check(&u, a, b, eps, 1).unwrap();
        let norm = u.l2_norm_sq();
        let expect_lhs = k.powf(2.0 * a) * norm;
        let expect_rhs = eps * k.powf(2.0 * b) * norm + k.powf(2.0 * (2.0 * a - b)) * norm / (4.0 * eps);
        assert!((lhs - expect_lhs).abs() < 1e-10 * expect_lhs);
        assert!((rhs - expect_rhs).abs() < 1e-10 * expect_rhs);
        assert!(lhs <= rhs);
    }

    #[test]
    fn zero_field() {
        let g = make_grid(3.0_f64, 16).unwrap();
        let u = RealField1D::zeros(g);
        assert_eq!(gn_inequality_check(&u, 1.0, 2.0, 0.1, 2).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn argument_errors() {
        let g = make_grid(3.0_f64, 16).unwrap();
        let u = RealField1D::zeros(g);
        assert!(gn_inequality_check(&u, 2.0, 1.0, 0.1, 1).is_err());
        assert!(gn_inequality_check(&u, 1.0, 2.0, 0.0, 1).is_err());
        assert!(gn_inequality_check(&u, 1.0, 2.0, 0.1, 0).is_err());
    }
}
