//! Evaluation of the spectral M-series and their derivatives with rigorous
//! truncation-error bounds.
//!
//! The series in play, for a prime p and exponent alpha > 1:
//!
//!   M_0(lambda)        = ((p-1)/p) sum_{N in Z} p^N / (p^{alpha N} - lambda)
//!   M_{p^gamma}(lambda) = ((p-1)/p) sum_{N <= -gamma} p^N / (p^{alpha N} - lambda)
//!                         - p^{-gamma} / (p^{alpha(1-gamma)} - lambda)
//!
//! together with the termwise derivative of M_0 and the one-sided series for
//! the difference M_0 - M_{p^gamma}, which stays finite at lambda = 0.
//!
//! Every evaluation reports a bound on the dropped tails. Upper tails decay
//! like p^{(1-alpha)N} once p^{alpha N} >= 2|lambda|; lower tails decay like
//! p^N once p^{alpha N} <= |lambda|/2. Evaluations refuse outright near the
//! pole grid {p^{alpha m}} and near 0 rather than returning garbage.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::padic::PrimeContext;
use crate::wavelet::KahanSum;

/// Relative guard distance to the nearest grid point p^{alpha m}.
pub const GUARD_REL: f64 = 1e-9;
/// Absolute guard distance to the accumulation point 0.
pub const GUARD_ABS_ZERO: f64 = 1e-12;

/// A series value together with a rigorous bound on the dropped tails and
/// the number of summed terms.
#[derive(Debug, Clone, Copy)]
pub struct MEvaluation {
    pub value: Complex64,
    pub error_bound: f64,
    pub terms_used: usize,
}

impl MEvaluation {
    pub fn real(&self) -> f64 {
        self.value.re
    }
}

/// A spectral point admitted past the guard: lambda stays clear of the grid
/// {p^{alpha m}} and of 0.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub alpha: f64,
    pub prime: u64,
}

impl SpectralPoint {
    pub fn admit(ctx: PrimeContext, alpha: f64, lambda: Complex64) -> Result<Self> {
        if alpha <= 1.0 {
            return Err(Error::AlphaOutOfRange { alpha, min: 1.0 });
        }
        guard_full(ctx, alpha, lambda)?;
        Ok(SpectralPoint {
            lambda,
            alpha,
            prime: ctx.prime(),
        })
    }
}

/// Refuses lambda within the guard of {p^{alpha m} : m in Z} or of 0.
pub fn guard_full(ctx: PrimeContext, alpha: f64, lambda: Complex64) -> Result<()> {
    let mag = lambda.norm();
    if mag <= GUARD_ABS_ZERO {
        return Err(Error::GuardViolation(format!(
            "lambda = {lambda} within {GUARD_ABS_ZERO:e} of the accumulation point 0"
        )));
    }
    guard_grid(ctx, alpha, lambda, i64::MIN)
}

/// Refuses lambda within relative guard distance of any grid point
/// p^{alpha m} with m >= m_min. Pass i64::MIN for the full grid.
pub fn guard_grid(ctx: PrimeContext, alpha: f64, lambda: Complex64, m_min: i64) -> Result<()> {
    let mag = lambda.norm();
    if mag == 0.0 {
        return Ok(());
    }
    let p = ctx.prime_f64();
    let m_est = (mag.ln() / (alpha * p.ln())).round() as i64;
    for m in m_est - 2..=m_est + 2 {
        if m < m_min {
            continue;
        }
        let grid = p.powf(alpha * m as f64);
        if !grid.is_finite() || grid == 0.0 {
            continue;
        }
        if (lambda - grid).norm() < GUARD_REL * grid {
            return Err(Error::GuardViolation(format!(
                "lambda = {lambda} within relative {GUARD_REL:e} of p^(alpha*{m}) = {grid:e}"
            )));
        }
    }
    Ok(())
}

/// Shared prime/exponent context for the series. Construction enforces
/// alpha > 1; the relaxed alpha > 1/2 regime never needs these series, only
/// the raw wavelet coefficients.
#[derive(Debug, Clone, Copy)]
pub struct MSeries {
    ctx: PrimeContext,
    alpha: f64,
}

impl MSeries {
    pub fn new(ctx: PrimeContext, alpha: f64) -> Result<Self> {
        if alpha <= 1.0 {
            return Err(Error::AlphaOutOfRange { alpha, min: 1.0 });
        }
        Ok(MSeries { ctx, alpha })
    }

    pub fn context(&self) -> PrimeContext {
        self.ctx
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn p(&self) -> f64 {
        self.ctx.prime_f64()
    }

    /// p^{alpha N}.
    pub fn grid_point(&self, n: i64) -> f64 {
        self.p().powf(self.alpha * n as f64)
    }

    /// Smallest N with p^{alpha N} >= 2|lambda| and upper geometric tail
    /// below half the tolerance. The tail ratio is decay = p^{1-a} per step,
    /// with a = alpha for the plain series and a = 2 alpha for the squared
    /// one.
    fn upper_cut(&self, mag: f64, tol: f64, squared: bool) -> (i64, f64) {
        let p = self.p();
        let a = if squared {
            2.0 * self.alpha
        } else {
            self.alpha
        };
        let pref = (p - 1.0) / p * if squared { 4.0 } else { 2.0 };
        let decay = p.powf(1.0 - a);
        let mut n = ((2.0 * mag).max(f64::MIN_POSITIVE).ln() / (self.alpha * p.ln())).ceil() as i64;
        loop {
            let tail = pref * p.powf((1.0 - a) * (n + 1) as f64) / (1.0 - decay);
            if tail <= tol / 2.0 || !tail.is_finite() {
                return (n, tail.max(0.0));
            }
            n += 1;
        }
    }

    /// Largest N with p^{alpha N} <= |lambda|/2 and lower tail below half the
    /// tolerance. Dropped terms obey |term| <= pref p^N / |lambda|^pow.
    fn lower_cut(&self, mag: f64, tol: f64, squared: bool) -> (i64, f64) {
        let p = self.p();
        let pow = if squared { mag * mag } else { mag };
        let pref = (p - 1.0) / p * if squared { 4.0 } else { 2.0 };
        let mut n = ((mag / 2.0).ln() / (self.alpha * p.ln())).floor() as i64;
        loop {
            // sum_{N <= n-1} p^N = p^n / (p - 1)
            let tail = pref * p.powi(n as i32) / ((p - 1.0) * pow);
            if tail <= tol / 2.0 {
                return (n, tail);
            }
            n -= 1;
        }
    }

    /// M_0(lambda): the full two-sided series.
    pub fn m0(&self, lambda: Complex64, tol: f64) -> Result<MEvaluation> {
        guard_full(self.ctx, self.alpha, lambda)?;
        let mag = lambda.norm();
        let (n_hi, tail_hi) = self.upper_cut(mag, tol, false);
        let (n_lo, tail_lo) = self.lower_cut(mag, tol, false);
        let p = self.p();
        let pref = (p - 1.0) / p;
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        let mut terms = 0usize;
        for n in n_lo..=n_hi {
            let term = pref * p.powi(n as i32) / (Complex64::new(self.grid_point(n), 0.0) - lambda);
            re.add(term.re);
            im.add(term.im);
            terms += 1;
        }
        Ok(MEvaluation {
            value: Complex64::new(re.value(), im.value()),
            error_bound: tail_hi + tail_lo,
            terms_used: terms,
        })
    }

    /// M_{p^gamma}(lambda): the one-sided series plus the boundary term.
    pub fn mgamma(&self, gamma: i64, lambda: Complex64, tol: f64) -> Result<MEvaluation> {
        guard_full(self.ctx, self.alpha, lambda)?;
        let mag = lambda.norm();
        let (n_lo, tail_lo) = self.lower_cut(mag, tol, false);
        let p = self.p();
        let pref = (p - 1.0) / p;
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        let mut terms = 0usize;
        for n in n_lo..=-gamma {
            let term = pref * p.powi(n as i32) / (Complex64::new(self.grid_point(n), 0.0) - lambda);
            re.add(term.re);
            im.add(term.im);
            terms += 1;
        }
        let boundary =
            p.powi(-gamma as i32) / (Complex64::new(self.grid_point(1 - gamma), 0.0) - lambda);
        re.add(-boundary.re);
        im.add(-boundary.im);
        Ok(MEvaluation {
            value: Complex64::new(re.value(), im.value()),
            error_bound: tail_lo,
            terms_used: terms + 1,
        })
    }

    /// The telescoped positive form of M_{p^gamma}, used as a cross-check:
    /// sum_{N <= -gamma} p^N (p^{alpha(N+1)} - p^{alpha N})
    ///                 / ((p^{alpha N} - lambda)(p^{alpha(N+1)} - lambda)).
    pub fn mgamma_telescoped(
        &self,
        gamma: i64,
        lambda: Complex64,
        tol: f64,
    ) -> Result<MEvaluation> {
        guard_full(self.ctx, self.alpha, lambda)?;
        let mag = lambda.norm();
        let p = self.p();
        // dropped terms: |term| <= 2 p^N / |lambda| once p^{alpha(N+1)} <= |lambda|/2
        let mut n_lo = ((mag / 2.0).ln() / (self.alpha * p.ln())).floor() as i64 - 1;
        let tail = loop {
            let t = 2.0 * p.powi(n_lo as i32) / ((p - 1.0) * mag);
            if t <= tol {
                break t;
            }
            n_lo -= 1;
        };
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        let mut terms = 0usize;
        for n in n_lo..=-gamma {
            let low = Complex64::new(self.grid_point(n), 0.0);
            let high = Complex64::new(self.grid_point(n + 1), 0.0);
            let term = p.powi(n as i32) * (high - low) / ((low - lambda) * (high - lambda));
            re.add(term.re);
            im.add(term.im);
            terms += 1;
        }
        Ok(MEvaluation {
            value: Complex64::new(re.value(), im.value()),
            error_bound: tail,
            terms_used: terms,
        })
    }

    /// Termwise derivative of M_0: ((p-1)/p) sum p^N / (p^{alpha N} - lambda)^2.
    pub fn m0_prime(&self, lambda: Complex64, tol: f64) -> Result<MEvaluation> {
        guard_full(self.ctx, self.alpha, lambda)?;
        let mag = lambda.norm();
        let (n_hi, tail_hi) = self.upper_cut(mag, tol, true);
        let (n_lo, tail_lo) = self.lower_cut(mag, tol, true);
        let p = self.p();
        let pref = (p - 1.0) / p;
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        let mut terms = 0usize;
        for n in n_lo..=n_hi {
            let d = Complex64::new(self.grid_point(n), 0.0) - lambda;
            let term = pref * p.powi(n as i32) / (d * d);
            re.add(term.re);
            im.add(term.im);
            terms += 1;
        }
        Ok(MEvaluation {
            value: Complex64::new(re.value(), im.value()),
            error_bound: tail_hi + tail_lo,
            terms_used: terms,
        })
    }

    /// Termwise derivative of M_{p^gamma}.
    pub fn mgamma_prime(&self, gamma: i64, lambda: Complex64, tol: f64) -> Result<MEvaluation> {
        guard_full(self.ctx, self.alpha, lambda)?;
        let mag = lambda.norm();
        let (n_lo, tail_lo) = self.lower_cut(mag, tol, true);
        let p = self.p();
        let pref = (p - 1.0) / p;
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        let mut terms = 0usize;
        for n in n_lo..=-gamma {
            let d = Complex64::new(self.grid_point(n), 0.0) - lambda;
            let term = pref * p.powi(n as i32) / (d * d);
            re.add(term.re);
            im.add(term.im);
            terms += 1;
        }
        let d = Complex64::new(self.grid_point(1 - gamma), 0.0) - lambda;
        let boundary = p.powi(-gamma as i32) / (d * d);
        re.add(-boundary.re);
        im.add(-boundary.im);
        Ok(MEvaluation {
            value: Complex64::new(re.value(), im.value()),
            error_bound: tail_lo,
            terms_used: terms + 1,
        })
    }

    /// The difference M_0 - M_{p^gamma} through its one-sided series
    ///   ((p-1)/p) sum_{N >= -gamma+2} p^N / (p^{alpha N} - lambda)
    ///     + p^{1-gamma} / (p^{alpha(1-gamma)} - lambda),
    ///
    /// finite at lambda = 0 and on the lower part of the grid; only the
    /// poles p^{alpha m} with m >= 1 - gamma are guarded.
    pub fn diff(&self, gamma: i64, lambda: Complex64, tol: f64) -> Result<MEvaluation> {
        guard_grid(self.ctx, self.alpha, lambda, 1 - gamma)?;
        let mag = lambda.norm();
        let (n_hi, tail_hi) = self.upper_cut(mag, tol, false);
        let p = self.p();
        let pref = (p - 1.0) / p;
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        let mut terms = 0usize;
        for n in (-gamma + 2)..=n_hi.max(-gamma + 2) {
            let term = pref * p.powi(n as i32) / (Complex64::new(self.grid_point(n), 0.0) - lambda);
            re.add(term.re);
            im.add(term.im);
            terms += 1;
        }
        let boundary =
            p.powi((1 - gamma) as i32) / (Complex64::new(self.grid_point(1 - gamma), 0.0) - lambda);
        re.add(boundary.re);
        im.add(boundary.im);
        Ok(MEvaluation {
            value: Complex64::new(re.value(), im.value()),
            error_bound: tail_hi,
            terms_used: terms + 1,
        })
    }

    /// M at ultrametric distance `dist` from the source: M_0 for a coincident
    /// point (None), M_{p^gamma} otherwise.
    pub fn at_distance(
        &self,
        dist: Option<i64>,
        lambda: Complex64,
        tol: f64,
    ) -> Result<MEvaluation> {
        match dist {
            None => self.m0(lambda, tol),
            Some(gamma) => self.mgamma(gamma, lambda, tol),
        }
    }
}
