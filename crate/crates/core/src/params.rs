use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sign of the transverse term: fKP-I (`sigma = -1`) or fKP-II (`sigma = +1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sigma {
    KpI,
    KpII,
}

impl Sigma {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sigma::KpI => -T::one(),
            Sigma::KpII => T::one(),
        }
    }

    pub fn from_value(sigma: f64) -> Result<Self> {
        if sigma == -1.0 {
            Ok(Sigma::KpI)
        } else if sigma == 1.0 {
            Ok(Sigma::KpII)
        } else {
            Err(Error::Sigma(sigma))
        }
    }
}

/// Physical parameters: dispersion order `alpha`, transverse sign `sigma`,
/// and wave speed `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkpParams<T> {
    pub alpha: T,
    pub sigma: Sigma,
    pub c: T,
}

impl<T: Real> FkpParams<T> {
    pub fn new(alpha: T, sigma: Sigma, c: T) -> Result<Self> {
        let p = Self { alpha, sigma, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.alpha.to_f64_lossy();
        if !(a > 1.0 / 3.0 && a <= 2.0) {
            return Err(Error::Alpha(a));
        }
        if !(self.c > T::zero() && self.c.is_finite()) {
            return Err(Error::Speed(self.c.to_f64_lossy()));
        }
        Ok(())
    }

    pub fn sigma_value(&self) -> T {
        self.sigma.value()
    }
}
