//! The worked interaction models: the Friedrichs extension spectrum with its
//! type-1/type-2 classification and minimal-distance recovery, symmetric and
//! parity-twisted two-point couplings, and the full one-point family with
//! eigenfunctions, spectral shift, and homogeneity checks.
//!
//! For two interaction points at ultrametric distance p^gamma the Friedrichs
//! determinant factors as (M_0 - M_{p^gamma})(M_0 + M_{p^gamma}). Roots of
//! the first factor (type 1) exist exactly in the bands N >= -gamma + 1 and
//! encode the distance; roots of the second (type 2) fill one per band.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::green;
use crate::linalg::CMat;
use crate::mseries::MSeries;
use crate::operator::{self, RealizationConfig};
use crate::padic::{PAdicRational, PrimeContext};
use crate::scan::{self, ScanWindow};
use crate::wavelet::{self, WaveletSum};

/// Eigenvalues of a two-point model sorted into the two determinant factors.
#[derive(Debug, Clone)]
pub struct ClassifiedSpectrum {
    /// Roots (band, lambda) of the difference factor.
    pub type1: Vec<(i64, f64)>,
    /// Roots (band, lambda) of the sum factor.
    pub type2: Vec<(i64, f64)>,
    /// Negative-axis root of the difference factor, when present.
    pub extra_type1_negative: Option<f64>,
    /// Negative-axis root of the sum factor, when present.
    pub extra_type2_negative: Option<f64>,
}

impl ClassifiedSpectrum {
    /// Every root strictly inside its tagged band; type-2 precedes type-1
    /// whenever a band carries both.
    pub fn validate(&self, ctx: PrimeContext, alpha: f64) -> Result<()> {
        let p = ctx.prime_f64();
        for (n, lam) in self.type1.iter().chain(&self.type2) {
            let lo = p.powf(alpha * *n as f64);
            let hi = p.powf(alpha * (*n + 1) as f64);
            if !(*lam > lo && *lam < hi) {
                return Err(Error::InvalidParameter(format!(
                    "root {lam} escapes its band ({lo}, {hi})"
                )));
            }
        }
        for (n, lam1) in &self.type1 {
            if let Some((_, lam2)) = self.type2.iter().find(|(m, _)| m == n) {
                if lam2 >= lam1 {
                    return Err(Error::InvalidParameter(format!(
                        "band {n}: type-2 root {lam2} must precede type-1 root {lam1}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Series tolerance used throughout the model scans.
const SCAN_TOL: f64 = 1e-12;

fn cre(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Classified spectrum of the two-point model with factor offsets:
/// roots of (M_0 - M_{p^gamma} + d1) and (M_0 + M_{p^gamma} + d2).
fn classify_two_point_factors(
    series: &MSeries,
    gamma: i64,
    d1: f64,
    d2: f64,
    window: &ScanWindow,
) -> Result<ClassifiedSpectrum> {
    let ctx = series.context();
    let p = ctx.prime_f64();
    let alpha = series.alpha();
    let f1 = |lam: f64| -> Result<f64> { Ok(series.diff(gamma, cre(lam), SCAN_TOL)?.real() + d1) };
    let f2 = |lam: f64| -> Result<f64> {
        let m0 = series.m0(cre(lam), SCAN_TOL)?;
        let mg = series.mgamma(gamma, cre(lam), SCAN_TOL)?;
        Ok(m0.real() + mg.real() + d2)
    };
    let per_band = scan::map_intervals(window, |n| {
        let r1 = scan::roots_in_interval(p, alpha, n, f1)?;
        let r2 = scan::roots_in_interval(p, alpha, n, f2)?;
        Ok((r1, r2))
    })?;
    let mut out = ClassifiedSpectrum {
        type1: Vec::new(),
        type2: Vec::new(),
        extra_type1_negative: None,
        extra_type2_negative: None,
    };
    for (n, (r1, r2)) in per_band {
        for lam in r1 {
            out.type1.push((n, lam));
        }
        for lam in r2 {
            out.type2.push((n, lam));
        }
    }
    if window.negative_axis {
        let neg1 = scan::roots_on_negative_axis(scan::NEG_AXIS_T_RANGE, 512, f1)?;
        let neg2 = scan::roots_on_negative_axis(scan::NEG_AXIS_T_RANGE, 512, f2)?;
        out.extra_type1_negative = neg1.first().copied();
        out.extra_type2_negative = neg2.first().copied();
    }
    Ok(out)
}

/// Spectrum of the Friedrichs extension.
#[derive(Debug, Clone)]
pub enum FriedrichsSpectrum {
    /// Two interaction points: the factorized, classified form.
    TwoPoint(ClassifiedSpectrum),
    /// General point sets: roots (band, lambda, multiplicity) of
    /// det M(lambda) = 0.
    General(Vec<(i64, f64, usize)>),
}

/// Discrete spectrum of the Friedrichs extension over the scan window: the
/// vanishing-at-every-point condition turns the determinant of M(lambda)
/// itself into the characteristic function.
pub fn friedrichs_spectrum(
    ctx: PrimeContext,
    alpha: f64,
    points: &[PAdicRational],
    window: &ScanWindow,
) -> Result<FriedrichsSpectrum> {
    let series = MSeries::new(ctx, alpha)?;
    if points.len() == 2 {
        let gamma = points[0]
            .distance_exponent(&points[1])?
            .ok_or(Error::DuplicatePoints)?;
        let spec = classify_two_point_factors(&series, gamma, 0.0, 0.0, window)?;
        return Ok(FriedrichsSpectrum::TwoPoint(spec));
    }
    // general n: scan det M(lambda); the coupling slot is unused here
    let config = RealizationConfig::new(
        ctx,
        alpha,
        points.to_vec(),
        CMat::identity(points.len()),
        None,
    )?;
    let p = ctx.prime_f64();
    let f = |lam: f64| -> Result<f64> {
        let m = operator::build_m(&config, cre(lam), SCAN_TOL)?;
        Ok(m.det().re)
    };
    let per_band = scan::map_intervals(window, |n| scan::roots_in_interval(p, alpha, n, f))?;
    let mut out = Vec::new();
    for (n, roots) in per_band {
        for lam in roots {
            let m = operator::build_m(&config, cre(lam), SCAN_TOL)?;
            let (sigmas, _) = m.singular_values();
            let scale = sigmas[0].max(1.0);
            let mult = sigmas.iter().filter(|&&s| s < scale * 1e-8).count().max(1);
            out.push((n, lam, mult));
        }
    }
    Ok(FriedrichsSpectrum::General(out))
}

/// The minimal ultrametric distance exponent read off the type-1 onset:
/// gamma_min = 1 - (smallest band index carrying a type-1 root).
pub fn recover_gamma_min(spec: &ClassifiedSpectrum) -> Result<i64> {
    spec.type1
        .iter()
        .map(|(n, _)| *n)
        .min()
        .map(|n| 1 - n)
        .ok_or_else(|| Error::InvalidParameter("type-1 part is empty".into()))
}

/// Exceptional-offset bookkeeping for the symmetric two-point model: the
/// negative-axis difference root exists only when b - a also avoids the
/// values of the difference factor at the grid points p^{alpha m},
/// m <= -gamma. Only the finitely many m inside the scan window can be
/// checked numerically.
#[derive(Debug, Clone)]
pub struct ExceptionalCheck {
    /// Inclusive range of grid exponents m that was checked.
    pub checked_m: (i64, i64),
    /// Exponents where b - a collides with the factor value.
    pub collisions: Vec<i64>,
    /// Exponents below the window remain unchecked.
    pub unchecked_below: bool,
}

#[derive(Debug, Clone)]
pub struct TwoPointSymmetricReport {
    pub spectrum: ClassifiedSpectrum,
    pub exceptional: ExceptionalCheck,
    /// The difference factor at lambda = 0: the negative-axis type-1 root
    /// sits below zero iff 0 < b - a < this threshold.
    pub negative_threshold: f64,
}

/// Spectrum of the symmetric two-point coupling, parameterized by the
/// inverse-coupling entries (a on the diagonal, b off it):
/// (M_0 - M_{p^gamma} + a - b)(M_0 + M_{p^gamma} + a + b) = 0.
pub fn two_point_symmetric_spectrum(
    ctx: PrimeContext,
    alpha: f64,
    gamma: i64,
    a: f64,
    b: f64,
    window: &ScanWindow,
) -> Result<TwoPointSymmetricReport> {
    let series = MSeries::new(ctx, alpha)?;
    let spectrum = classify_two_point_factors(&series, gamma, a - b, a + b, window)?;
    let threshold = series.diff(gamma, cre(0.0), SCAN_TOL)?.real();
    let mut collisions = Vec::new();
    let m_hi = -gamma;
    let m_lo = window.n_lo.min(m_hi);
    for m in m_lo..=m_hi {
        let grid = ctx.prime_f64().powf(alpha * m as f64);
        let val = series.diff(gamma, cre(grid), SCAN_TOL)?.real();
        if ((b - a) - val).abs() < 1e-9 * (1.0 + val.abs()) {
            collisions.push(m);
        }
    }
    Ok(TwoPointSymmetricReport {
        spectrum,
        exceptional: ExceptionalCheck {
            checked_m: (m_lo, m_hi),
            collisions,
            unchecked_below: true,
        },
        negative_threshold: threshold,
    })
}

/// Real eigenvalues of the parity-twisted two-point coupling with
/// anti-diagonal imaginary inverse coupling:
/// (M_0 - M_{p^gamma})(M_0 + M_{p^gamma}) + a^2 + b^2 = 0.
pub fn pt_two_point_real_eigenvalues(
    ctx: PrimeContext,
    alpha: f64,
    gamma: i64,
    a: f64,
    b: f64,
    window: &ScanWindow,
) -> Result<Vec<(i64, f64)>> {
    let series = MSeries::new(ctx, alpha)?;
    let p = ctx.prime_f64();
    let g = |lam: f64| -> Result<f64> {
        let d = series.diff(gamma, cre(lam), SCAN_TOL)?.real();
        let m0 = series.m0(cre(lam), SCAN_TOL)?.real();
        let mg = series.mgamma(gamma, cre(lam), SCAN_TOL)?.real();
        Ok(d * (m0 + mg) + a * a + b * b)
    };
    let per_band = scan::map_intervals(window, |n| scan::roots_in_interval(p, alpha, n, g))?;
    let mut out = Vec::new();
    if window.negative_axis {
        for lam in scan::roots_on_negative_axis(scan::NEG_AXIS_T_RANGE, 512, g)? {
            out.push((i64::MIN, lam));
        }
    }
    for (n, roots) in per_band {
        for lam in roots {
            out.push((n, lam));
        }
    }
    Ok(out)
}

/// Coupling strength of the one-point model: free, finite, or the
/// Friedrichs limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Free,
    Finite(f64),
    Friedrichs,
}

impl Coupling {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "inf" | "infinity" | "friedrichs" => Ok(Coupling::Friedrichs),
            s => {
                let b: f64 = s
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("coupling `{s}`")))?;
                if b == 0.0 {
                    Ok(Coupling::Free)
                } else {
                    Ok(Coupling::Finite(b))
                }
            }
        }
    }
}

/// One eigenvalue of the one-point model: its band (None for the
/// negative-axis point) and location.
#[derive(Debug, Clone, Copy)]
pub struct OnePointRoot {
    pub band: Option<i64>,
    pub lambda: f64,
}

/// Per-band roots of M_0(lambda) = -1/b (finite b) or M_0(lambda) = 0
/// (Friedrichs); a coupling b < 0 adds the unique negative-axis root. The
/// free coupling has no perturbed point spectrum and is refused.
pub fn one_point_eigenvalues(
    ctx: PrimeContext,
    alpha: f64,
    coupling: Coupling,
    window: &ScanWindow,
) -> Result<Vec<OnePointRoot>> {
    let series = MSeries::new(ctx, alpha)?;
    let p = ctx.prime_f64();
    let target = match coupling {
        Coupling::Free => return Err(Error::FreeCoupling),
        Coupling::Finite(b) => -1.0 / b,
        Coupling::Friedrichs => 0.0,
    };
    let f = |lam: f64| -> Result<f64> { Ok(series.m0(cre(lam), SCAN_TOL)?.real() - target) };
    let mut out = Vec::new();
    if window.negative_axis {
        for lam in scan::roots_on_negative_axis(scan::NEG_AXIS_T_RANGE, 512, f)? {
            out.push(OnePointRoot {
                band: None,
                lambda: lam,
            });
        }
    }
    let per_band = scan::map_intervals(window, |n| scan::roots_in_interval(p, alpha, n, f))?;
    for (n, roots) in per_band {
        for lam in roots {
            out.push(OnePointRoot {
                band: Some(n),
                lambda: lam,
            });
        }
    }
    Ok(out)
}

/// The normalized eigenfunction truncation at a located root:
/// M_0'(lambda)^{-1/2} sum_m sum_j p^{-m/2} (p^{alpha(1-m)} - lambda)^{-1}
/// psi_{m j 0}, with the scaled L2 tail bound.
pub fn one_point_eigenfunction(
    ctx: PrimeContext,
    alpha: f64,
    lambda_root: f64,
    n_range: (i64, i64),
) -> Result<(WaveletSum, f64)> {
    let series = MSeries::new(ctx, alpha)?;
    let origin = PAdicRational::from_integer(0, ctx);
    let (h, tail) = green::h_coefficients(ctx, alpha, &origin, cre(lambda_root), n_range)?;
    let norm_sq = series.m0_prime(cre(lambda_root), SCAN_TOL)?.real();
    let scale = 1.0 / norm_sq.sqrt();
    Ok((h.scaled(cre(scale)), tail.l2 * scale))
}

/// Orthonormal basis of the scale-N kernel eigenspace fixed by the point
/// condition: the p - 2 modified wavelets at the origin coset.
pub fn one_point_kernel_basis(ctx: PrimeContext, scale: i64) -> Result<Vec<WaveletSum>> {
    if ctx.prime() < 3 {
        return Err(Error::PrimeTooSmall);
    }
    (1..=(ctx.prime() - 2) as u32)
        .map(|j| wavelet::modified_wavelet(ctx, scale, j))
        .collect()
}

/// The perturbed root inside the band holding lambda, by monotone bisection
/// of M_0 against the target value.
fn band_root(series: &MSeries, band: i64, target: f64) -> Result<f64> {
    let p = series.context().prime_f64();
    let alpha = series.alpha();
    let f = |lam: f64| -> Result<f64> { Ok(series.m0(cre(lam), SCAN_TOL)?.real() - target) };
    let roots = scan::roots_in_interval(p, alpha, band, f)?;
    roots
        .first()
        .copied()
        .ok_or_else(|| Error::InvalidParameter(format!("no root in band {band}")))
}

/// The Krein spectral shift of the one-point coupling: 1 between each grid
/// point and the perturbed root above it (plus (lambda_-, 0) for b < 0),
/// 0 elsewhere. Jumps themselves are refused.
pub fn spectral_shift(ctx: PrimeContext, alpha: f64, b: f64, lambda: f64) -> Result<u8> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::InvalidParameter(
            "spectral shift needs a finite nonzero coupling".into(),
        ));
    }
    let series = MSeries::new(ctx, alpha)?;
    let jump = |x: f64, near: f64| (x - near).abs() < 1e-9 * (1.0 + near.abs());
    if lambda.abs() < 1e-12 {
        return Err(Error::SpectralShiftJump);
    }
    if lambda < 0.0 {
        if b > 0.0 {
            return Ok(0);
        }
        let target = -1.0 / b;
        let f = |lam: f64| -> Result<f64> { Ok(series.m0(cre(lam), SCAN_TOL)?.real() - target) };
        let neg = scan::roots_on_negative_axis(scan::NEG_AXIS_T_RANGE, 512, f)?;
        let lam_minus = neg
            .first()
            .copied()
            .ok_or_else(|| Error::InvalidParameter("negative root not found".into()))?;
        if jump(lambda, lam_minus) {
            return Err(Error::SpectralShiftJump);
        }
        return Ok(if lambda > lam_minus { 1 } else { 0 });
    }
    let p = ctx.prime_f64();
    let band = (lambda.ln() / (alpha * p.ln())).floor() as i64;
    for n in [band, band + 1] {
        if jump(lambda, p.powf(alpha * n as f64)) {
            return Err(Error::SpectralShiftJump);
        }
    }
    let root = band_root(&series, band, -1.0 / b)?;
    if jump(lambda, root) {
        return Err(Error::SpectralShiftJump);
    }
    Ok(if lambda < root { 1 } else { 0 })
}

/// Outcome of the dilation-homogeneity probe at a band index.
#[derive(Debug, Clone)]
pub enum HomogeneityReport {
    /// Free or Friedrichs coupling: the eigenbasis maps onto itself under
    /// dilation; defects are the observed numerical residuals.
    DilationInvariant {
        /// |lambda_{N+1} - p^alpha lambda_N| / lambda_{N+1} for the
        /// Friedrichs roots; exactly 0 for the free coupling.
        recurrence_defect: f64,
        /// Max coefficient gap between the dilated eigenfunction truncation
        /// and the eigenfunction one band down.
        basis_defect: f64,
    },
    /// Finite coupling: mu = p^{-alpha} lambda_{N,b} fails the eigenvalue
    /// condition because M_0(mu) lands on p^{alpha-1} (-1/b), not -1/b.
    NotHomogeneous {
        lambda_root: f64,
        m0_at_scaled: f64,
        homogeneous_value: f64,
        required_value: f64,
    },
}

pub fn homogeneity_check(
    ctx: PrimeContext,
    alpha: f64,
    coupling: Coupling,
    band: i64,
) -> Result<HomogeneityReport> {
    let series = MSeries::new(ctx, alpha)?;
    let p = ctx.prime_f64();
    match coupling {
        Coupling::Free => Ok(HomogeneityReport::DilationInvariant {
            recurrence_defect: 0.0,
            basis_defect: 0.0,
        }),
        Coupling::Friedrichs => {
            let lam_n = band_root(&series, band, 0.0)?;
            let lam_up = band_root(&series, band + 1, 0.0)?;
            let recurrence_defect = (lam_up - p.powf(alpha) * lam_n).abs() / lam_up;
            // dilation maps the eigenfunction one band down
            let lam_dn = band_root(&series, band - 1, 0.0)?;
            let window = (-8i64, 8i64);
            let (phi_n, _) = one_point_eigenfunction(ctx, alpha, lam_n, window)?;
            let (phi_dn, _) =
                one_point_eigenfunction(ctx, alpha, lam_dn, (window.0 + 1, window.1 + 1))?;
            let dilated = phi_n.dilate();
            let mut basis_defect = 0.0f64;
            for (idx, c) in dilated.terms() {
                basis_defect = basis_defect.max((c - phi_dn.coefficient(idx)).norm());
            }
            Ok(HomogeneityReport::DilationInvariant {
                recurrence_defect,
                basis_defect,
            })
        }
        Coupling::Finite(b) => {
            let lam = band_root(&series, band, -1.0 / b)?;
            let mu = lam / p.powf(alpha);
            let m0_mu = series.m0(cre(mu), SCAN_TOL)?.real();
            Ok(HomogeneityReport::NotHomogeneous {
                lambda_root: lam,
                m0_at_scaled: m0_mu,
                homogeneous_value: p.powf(alpha - 1.0) * (-1.0 / b),
                required_value: -1.0 / b,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn q(num: i64, den: i64, c: PrimeContext) -> PAdicRational {
        PAdicRational::from_ratio(num, den, c).unwrap()
    }

    fn two_point_friedrichs(gamma: i64) -> ClassifiedSpectrum {
        let c = ctx(2);
        // realize |x1 - x2|_2 = 2^gamma with x1 = 0
        let x2 = q(1, 1, c).scale_by_p_pow(-gamma);
        let window = ScanWindow::new(-4, 4).with_negative_axis();
        match friedrichs_spectrum(c, 2.0, &[q(0, 1, c), x2], &window).unwrap() {
            FriedrichsSpectrum::TwoPoint(s) => s,
            _ => panic!("two points classify"),
        }
    }

    #[test]
    fn friedrichs_two_point_band_law() {
        // At p = 2 the sum factor loses its pole at p^{alpha(1-gamma)}
        // (boundary coefficient (p-2)/p = 0), so the bands N = -gamma and
        // N = -gamma + 1 merge and share a single type-2 root, which lands
        // in the upper one. Every other band keeps exactly one.
        for gamma in [-1i64, 0, 1] {
            let spec = two_point_friedrichs(gamma);
            spec.validate(ctx(2), 2.0).unwrap();
            for n in -4i64..=4 {
                let t1 = spec.type1.iter().filter(|(m, _)| *m == n).count();
                let t2 = spec.type2.iter().filter(|(m, _)| *m == n).count();
                let expect_t2 = if n == -gamma { 0 } else { 1 };
                assert_eq!(t2, expect_t2, "gamma={gamma}: type-2 count in band {n}");
                let expect_t1 = if n > -gamma { 1 } else { 0 };
                assert_eq!(t1, expect_t1, "gamma={gamma}: type-1 count in band {n}");
            }
            // no negative Friedrichs eigenvalues
            assert!(spec.extra_type1_negative.is_none());
            assert!(spec.extra_type2_negative.is_none());
            // distance recovery from the type-1 onset
            assert_eq!(recover_gamma_min(&spec).unwrap(), gamma);
        }
    }

    #[test]
    fn friedrichs_two_point_band_law_odd_prime() {
        // for p >= 3 the boundary pole survives and every band carries its
        // type-2 root, including N = -gamma
        let c = ctx(3);
        let window = ScanWindow::new(-3, 3).with_negative_axis();
        let spec = match friedrichs_spectrum(c, 2.0, &[q(0, 1, c), q(1, 1, c)], &window).unwrap() {
            FriedrichsSpectrum::TwoPoint(s) => s,
            _ => unreachable!(),
        };
        spec.validate(c, 2.0).unwrap();
        for n in -3i64..=3 {
            let t1 = spec.type1.iter().filter(|(m, _)| *m == n).count();
            let t2 = spec.type2.iter().filter(|(m, _)| *m == n).count();
            assert_eq!(t2, 1, "band {n}");
            assert_eq!(t1, if n >= 1 { 1 } else { 0 }, "band {n}");
        }
        assert_eq!(recover_gamma_min(&spec).unwrap(), 0);
    }

    #[test]
    fn gamma_min_recovery_examples() {
        let c = ctx(2);
        // Y = {0, 1/2}: |1/2|_2 = 2 = 2^1
        let window = ScanWindow::new(-4, 4);
        let spec = match friedrichs_spectrum(c, 2.0, &[q(0, 1, c), q(1, 2, c)], &window).unwrap() {
            FriedrichsSpectrum::TwoPoint(s) => s,
            _ => unreachable!(),
        };
        assert_eq!(recover_gamma_min(&spec).unwrap(), 1);

        let empty = ClassifiedSpectrum {
            type1: vec![],
            type2: vec![],
            extra_type1_negative: None,
            extra_type2_negative: None,
        };
        assert!(recover_gamma_min(&empty).is_err());
    }

    #[test]
    fn friedrichs_general_three_points() {
        let c = ctx(2);
        // x1 = 0, x2 = 1 at distance 1 = 2^0; x3 = 1/2 at distance 2 from both
        let points = vec![q(0, 1, c), q(1, 1, c), q(1, 2, c)];
        let window = ScanWindow::new(0, 2);
        let spec = friedrichs_spectrum(c, 2.0, &points, &window).unwrap();
        let roots = match spec {
            FriedrichsSpectrum::General(r) => r,
            _ => unreachable!(),
        };
        assert!(!roots.is_empty());
        // the minimal-distance factor M_0 - M_{p^0} vanishes along part of
        // the root set, with its onset at band 1 = -gamma_min + 1
        let series = MSeries::new(c, 2.0).unwrap();
        let mut type1_onset = i64::MAX;
        for (n, lam, _mult) in &roots {
            let d = series.diff(0, cre(*lam), SCAN_TOL).unwrap().real();
            if d.abs() < 1e-6 {
                type1_onset = type1_onset.min(*n);
            }
        }
        assert_eq!(type1_onset, 1);
    }

    #[test]
    fn symmetric_two_point_negative_points() {
        let c = ctx(2);
        let window = ScanWindow::new(-2, 2).with_negative_axis();
        // a = b = 0 reduces to the Friedrichs factors
        let rep = two_point_symmetric_spectrum(c, 2.0, 0, 0.0, 0.0, &window).unwrap();
        assert!(rep.spectrum.extra_type1_negative.is_none());
        assert!(rep.spectrum.extra_type2_negative.is_none());
        assert!((rep.negative_threshold - 0.75).abs() < 1e-10);

        // 0 < b - a < threshold: a negative type-1 point appears
        let rep = two_point_symmetric_spectrum(c, 2.0, 0, 0.0, 0.5, &window).unwrap();
        let neg = rep.spectrum.extra_type1_negative.expect("negative root");
        assert!(neg < 0.0);

        // b - a above the threshold: no negative type-1 point
        let rep = two_point_symmetric_spectrum(c, 2.0, 0, 0.0, 0.9, &window).unwrap();
        assert!(rep.spectrum.extra_type1_negative.is_none());

        // b + a < 0 creates the negative type-2 point
        let rep = two_point_symmetric_spectrum(c, 2.0, 0, -1.0, 0.5, &window).unwrap();
        assert!(rep.spectrum.extra_type2_negative.is_some());
        let rep = two_point_symmetric_spectrum(c, 2.0, 0, 1.0, 0.5, &window).unwrap();
        assert!(rep.spectrum.extra_type2_negative.is_none());
    }

    #[test]
    fn pt_two_point_band_structure() {
        let c = ctx(2);
        let alpha = 2.0;
        let gamma = 0i64;
        let window = ScanWindow::new(-3, 2).with_negative_axis();
        let (a, b) = (0.05, 0.05);
        let roots = pt_two_point_real_eigenvalues(c, alpha, gamma, a, b, &window).unwrap();
        // negative semiaxis stays root-free
        assert!(roots.iter().all(|(_, lam)| *lam > 0.0));

        // Friedrichs reference points
        let spec = two_point_friedrichs(gamma);
        for n in -3i64..=-1 {
            // bands below the onset: one root, bracketed by the band edge
            // and the type-2 point
            let band_roots: Vec<f64> = roots
                .iter()
                .filter(|(m, _)| *m == n)
                .map(|(_, l)| *l)
                .collect();
            assert_eq!(band_roots.len(), 1, "band {n}");
            let lam = band_roots[0];
            let lo = 2f64.powf(alpha * n as f64);
            let plus = spec
                .type2
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, l)| *l)
                .unwrap();
            assert!(lo < lam && lam < plus, "band {n}: {lo} < {lam} < {plus}");
        }
        // bands at or above the onset: roots (if any) inside (lambda+, lambda-)
        for n in 1i64..=2 {
            let plus = spec
                .type2
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, l)| *l)
                .unwrap();
            let minus = spec
                .type1
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, l)| *l)
                .unwrap();
            for (_, lam) in roots.iter().filter(|(m, _)| *m == n) {
                assert!(*lam > plus && *lam < minus);
            }
        }
    }

    #[test]
    fn pt_two_point_roots_appear_when_coupling_shrinks() {
        let c = ctx(2);
        let window = ScanWindow::new(1, 1);
        let count_at = |a: f64, b: f64| {
            pt_two_point_real_eigenvalues(c, 2.0, 0, a, b, &window)
                .unwrap()
                .len()
        };
        let big = count_at(0.8, 0.8);
        let small = count_at(0.08, 0.08);
        assert_eq!(big, 0, "large coupling keeps the band root-free");
        assert!(small >= 1, "shrinking the parameters creates band roots");
    }

    #[test]
    fn one_point_roots_and_signs() {
        let c = ctx(2);
        let window = ScanWindow::new(-2, 2).with_negative_axis();
        for b in [-2.0f64, -0.5, 0.5, 2.0] {
            let roots = one_point_eigenvalues(c, 2.0, Coupling::Finite(b), &window).unwrap();
            let neg: Vec<_> = roots.iter().filter(|r| r.band.is_none()).collect();
            if b < 0.0 {
                assert_eq!(neg.len(), 1, "b={b}: one negative eigenvalue");
                assert!(neg[0].lambda < 0.0);
            } else {
                assert!(neg.is_empty(), "b={b}: positive coupling stays positive");
            }
            for n in -2i64..=2 {
                let cnt = roots.iter().filter(|r| r.band == Some(n)).count();
                assert_eq!(cnt, 1, "b={b}: one root per band");
            }
        }
        assert!(matches!(
            one_point_eigenvalues(c, 2.0, Coupling::Free, &window),
            Err(Error::FreeCoupling)
        ));
    }

    #[test]
    fn friedrichs_recurrence() {
        let c = ctx(2);
        let window = ScanWindow::new(-3, 3);
        let roots = one_point_eigenvalues(c, 2.0, Coupling::Friedrichs, &window).unwrap();
        let by_band: std::collections::BTreeMap<i64, f64> = roots
            .iter()
            .filter_map(|r| r.band.map(|n| (n, r.lambda)))
            .collect();
        for n in -3i64..3 {
            let low = by_band[&n];
            let high = by_band[&(n + 1)];
            assert!(
                (high - 4.0 * low).abs() < 1e-9 * high,
                "recurrence at band {n}"
            );
        }
    }

    #[test]
    fn distinct_couplings_have_disjoint_spectra() {
        let c = ctx(2);
        let window = ScanWindow::new(-2, 2);
        let r1 = one_point_eigenvalues(c, 2.0, Coupling::Finite(0.5), &window).unwrap();
        let r2 = one_point_eigenvalues(c, 2.0, Coupling::Finite(2.0), &window).unwrap();
        for a in &r1 {
            for b in &r2 {
                assert!((a.lambda - b.lambda).abs() > 1e-8 * (1.0 + a.lambda.abs()));
            }
        }
    }

    #[test]
    fn eigenfunction_norm_and_orthogonality() {
        let c = ctx(2);
        let alpha = 2.0;
        let window = ScanWindow::new(0, 1);
        let roots = one_point_eigenvalues(c, alpha, Coupling::Finite(-0.7), &window).unwrap();
        let lam0 = roots.iter().find(|r| r.band == Some(0)).unwrap().lambda;
        let lam1 = roots.iter().find(|r| r.band == Some(1)).unwrap().lambda;
        let range = (-9i64, 9i64);
        let (phi0, tail0) = one_point_eigenfunction(c, alpha, lam0, range).unwrap();
        let (phi1, tail1) = one_point_eigenfunction(c, alpha, lam1, range).unwrap();
        // normalized within the scaled tail
        assert!((phi0.norm_sq() - 1.0).abs() < 2.0 * tail0 + 1e-9);
        // distinct roots give orthogonal truncations within combined tails
        let cross = phi0.coeff_inner_product(&phi1).norm();
        assert!(cross < tail0 + tail1 + 1e-9, "cross = {cross}");
    }

    #[test]
    fn eigenfunction_windowed_eigenrelation() {
        // (D^alpha - lambda) applied to the truncation points along the
        // delta expansion only
        let c = ctx(3);
        let alpha = 2.0;
        let window = ScanWindow::new(0, 0);
        let roots = one_point_eigenvalues(c, alpha, Coupling::Finite(1.3), &window).unwrap();
        let lam = roots[0].lambda;
        let range = (-5i64, 5i64);
        let (phi, _) = one_point_eigenfunction(c, alpha, lam, range).unwrap();
        let image = phi
            .apply_dalpha(alpha)
            .unwrap()
            .plus(&phi.scaled(cre(-lam)));
        let delta = wavelet::delta_coefficients(&PAdicRational::from_integer(0, c), range).unwrap();
        // componentwise ratio against the delta direction is constant
        let mut ratio: Option<Complex64> = None;
        for (idx, c_img) in image.terms() {
            let d = delta.coefficient(idx);
            let r = c_img / d;
            match ratio {
                None => ratio = Some(r),
                Some(r0) => assert!((r - r0).norm() < 1e-9 * (1.0 + r0.norm())),
            }
        }
        // and the kernel family is orthogonal to the image
        for w in one_point_kernel_basis(c, 0).unwrap() {
            assert!(w.coeff_inner_product(&image).norm() < 1e-10);
        }
    }

    #[test]
    fn kernel_basis_shapes() {
        let c3 = ctx(3);
        let fam = one_point_kernel_basis(c3, 2).unwrap();
        assert_eq!(fam.len(), 1);
        assert!(matches!(
            one_point_kernel_basis(ctx(2), 0),
            Err(Error::PrimeTooSmall)
        ));
        // p = 5: three modified wavelets, orthonormal, vanish at 0
        let c5 = ctx(5);
        let fam = one_point_kernel_basis(c5, -1).unwrap();
        assert_eq!(fam.len(), 3);
        for (i, wi) in fam.iter().enumerate() {
            for (j, wj) in fam.iter().enumerate() {
                let ip = wi.coeff_inner_product(wj);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - cre(expect)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn one_point_root_monotone_in_coupling() {
        // within a band, the root of M_0 = -1/b moves up as b grows through
        // positive values (the target -1/b increases and M_0 increases)
        let c = ctx(2);
        let series = MSeries::new(c, 2.0).unwrap();
        let mut prev = 0.0f64;
        for b in [0.25f64, 0.5, 1.0, 2.0, 8.0] {
            let root = band_root(&series, 1, -1.0 / b).unwrap();
            assert!(root > prev, "root at b={b} must exceed {prev}");
            prev = root;
        }
    }

    #[test]
    fn assembled_eigenbasis_gram_is_identity_on_window() {
        // one-point model, p = 3: nonzero-coset wavelets, modified wavelets,
        // and eigenfunction truncations assemble into an orthonormal family
        let c = ctx(3);
        let alpha = 2.0;
        let b = -0.7;
        let window = ScanWindow::new(-1, 1).with_negative_axis();
        let roots = one_point_eigenvalues(c, alpha, Coupling::Finite(b), &window).unwrap();
        let range = (-9i64, 9i64);
        let mut family: Vec<(WaveletSum, f64)> = Vec::new();
        // eigenfunction truncations, including the negative-axis one
        for r in &roots {
            let (phi, tail) = one_point_eigenfunction(c, alpha, r.lambda, range).unwrap();
            family.push((phi, tail));
        }
        // modified wavelets at a few scales
        for scale in -1i64..=1 {
            for w in one_point_kernel_basis(c, scale).unwrap() {
                family.push((w, 0.0));
            }
        }
        // sampled nonzero-coset wavelets
        for scale in -1i64..=1 {
            for j in 1..=2u32 {
                let eps = crate::padic::CosetEpsilon::from_digits(vec![1], c).unwrap();
                let idx = crate::wavelet::WaveletIndex::new(c, scale, j, eps).unwrap();
                family.push((WaveletSum::single(c, idx), 0.0));
            }
        }
        for (i, (wi, ti)) in family.iter().enumerate() {
            for (j, (wj, tj)) in family.iter().enumerate() {
                let ip = wi.coeff_inner_product(wj);
                let expect = if i == j { 1.0 } else { 0.0 };
                let allowed = 2.0 * (ti + tj) + 1e-9;
                assert!(
                    (ip - cre(expect)).norm() <= allowed,
                    "gram ({i},{j}) = {ip} vs {expect} within {allowed:.2e}"
                );
            }
        }
    }

    #[test]
    fn spectral_shift_counts_eigenvalues_on_windows() {
        // windowed counting oracle: over [p^{alpha N_lo}, lambda) the free
        // operator holds (p-1) eigenvalues per grid point, the perturbed one
        // (p-2) per grid point plus one per band root below lambda; the
        // counts agree exactly on the kernel of the shift and differ by one
        // off it
        let c = ctx(2);
        let alpha = 2.0;
        let p = 2.0f64;
        let n_lo = -2i64;
        let window = ScanWindow::new(n_lo, 2).with_negative_axis();
        for b in [0.5f64, -2.0] {
            let roots = one_point_eigenvalues(c, alpha, Coupling::Finite(b), &window).unwrap();
            let band_roots: std::collections::BTreeMap<i64, f64> = roots
                .iter()
                .filter_map(|r| r.band.map(|n| (n, r.lambda)))
                .collect();
            let low_cut = p.powf(alpha * n_lo as f64);
            let count_at = |lambda: f64| {
                let grid = (n_lo..=2)
                    .filter(|m| {
                        let g = p.powf(alpha * *m as f64);
                        g >= low_cut && g < lambda
                    })
                    .count();
                let perturbed = band_roots
                    .values()
                    .filter(|lam| **lam >= low_cut && **lam < lambda)
                    .count();
                // (p-1) per grid point vs (p-2) per grid point + roots
                let free = (c.prime() as usize - 1) * grid;
                let pert = (c.prime() as usize - 2) * grid + perturbed;
                (free, pert)
            };
            for n in n_lo..=1 {
                let root = band_roots[&n];
                let upper = p.powf(alpha * (n + 1) as f64);
                // kernel point: above the band root
                let lam_kernel = (root * upper).sqrt();
                assert_eq!(spectral_shift(c, alpha, b, lam_kernel).unwrap(), 0);
                let (free, pert) = count_at(lam_kernel);
                assert_eq!(free, pert, "b={b} band {n}: kernel counts agree");
                // shifted point: below the band root
                let lower = p.powf(alpha * n as f64);
                let lam_shift = (root * lower).sqrt();
                assert_eq!(spectral_shift(c, alpha, b, lam_shift).unwrap(), 1);
                let (free, pert) = count_at(lam_shift);
                assert_eq!(
                    free,
                    pert + 1,
                    "b={b} band {n}: shifted counts differ by one"
                );
            }
        }
    }

    #[test]
    fn spectral_shift_values() {
        let c = ctx(2);
        let alpha = 2.0;
        // b > 0: zero on the negative axis
        assert_eq!(spectral_shift(c, alpha, 0.5, -3.0).unwrap(), 0);
        // jump refusals
        assert!(matches!(
            spectral_shift(c, alpha, 0.5, 4.0),
            Err(Error::SpectralShiftJump)
        ));
        assert!(matches!(
            spectral_shift(c, alpha, 0.5, 1e-13),
            Err(Error::SpectralShiftJump)
        ));
        // inside a band: 1 below the root, 0 above
        let series = MSeries::new(c, alpha).unwrap();
        let root = band_root(&series, 1, -1.0 / 0.5).unwrap();
        assert_eq!(spectral_shift(c, alpha, 0.5, root * 0.97).unwrap(), 1);
        assert_eq!(spectral_shift(c, alpha, 0.5, root * 1.03).unwrap(), 0);
        // b < 0: 1 between the negative root and 0
        let target = -1.0 / -2.0;
        let f = |lam: f64| -> Result<f64> { Ok(series.m0(cre(lam), SCAN_TOL)?.real() - target) };
        let neg = scan::roots_on_negative_axis(scan::NEG_AXIS_T_RANGE, 512, f).unwrap()[0];
        assert_eq!(spectral_shift(c, alpha, -2.0, neg * 0.5).unwrap(), 1);
        assert_eq!(spectral_shift(c, alpha, -2.0, neg * 1.5).unwrap(), 0);
    }

    #[test]
    fn homogeneity_reports() {
        let c = ctx(2);
        let alpha = 2.0;
        match homogeneity_check(c, alpha, Coupling::Free, 0).unwrap() {
            HomogeneityReport::DilationInvariant {
                recurrence_defect,
                basis_defect,
            } => {
                assert_eq!(recurrence_defect, 0.0);
                assert_eq!(basis_defect, 0.0);
            }
            _ => panic!("free coupling is homogeneous"),
        }
        match homogeneity_check(c, alpha, Coupling::Friedrichs, 0).unwrap() {
            HomogeneityReport::DilationInvariant {
                recurrence_defect,
                basis_defect,
            } => {
                assert!(recurrence_defect < 1e-9);
                assert!(basis_defect < 1e-6, "basis defect {basis_defect}");
            }
            _ => panic!("friedrichs coupling is homogeneous"),
        }
        match homogeneity_check(c, alpha, Coupling::Finite(1.0), 0).unwrap() {
            HomogeneityReport::NotHomogeneous {
                m0_at_scaled,
                homogeneous_value,
                required_value,
                ..
            } => {
                assert!((m0_at_scaled - homogeneous_value).abs() < 1e-8);
                assert!((m0_at_scaled - required_value).abs() > 0.1);
            }
            _ => panic!("finite coupling is not homogeneous"),
        }
    }
}
