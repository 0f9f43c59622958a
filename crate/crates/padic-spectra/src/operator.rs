//! Operator realizations of the fractional operator plus a rank-n point
//! potential: boundary mappings, self-adjointness classification, the matrix
//! M(lambda), characteristic-determinant eigenvalue searches with
//! multiplicities, and the Krein resolvent.
//!
//! A realization is pinned down by the coupling matrix B through the
//! boundary condition B Gamma_0 f = Gamma_1 f on the adjoint domain. Its
//! finite-multiplicity eigenvalues are the zeros of det[B M(lambda) + I];
//! when B is invertible this agrees with det[M(lambda) + B^{-1}] up to the
//! nonzero factor det B, and it stays defined for singular B (such records
//! are flagged as extensions of the invertible-coupling statement).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::green::{self, DomainElement, GreenComponent};
use crate::linalg::CMat;
use crate::mseries::{self, MSeries};
use crate::padic::{PAdicRational, PrimeContext};
use crate::scan::{self, ScanWindow};
use crate::wavelet::WaveletSum;

/// Entrywise tolerance of the Hermitian tests.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Singular values below sigma_max times this count as zero for rank and
/// multiplicity.
pub const RANK_REL_TOL: f64 = 1e-8;

/// A realization: prime, exponent, interaction points, coupling matrix, and
/// an optional eta matrix describing a commuting symmetry on the defect
/// space.
#[derive(Debug, Clone)]
pub struct RealizationConfig {
    ctx: PrimeContext,
    alpha: f64,
    points: Vec<PAdicRational>,
    coupling: CMat,
    eta: Option<CMat>,
}

impl RealizationConfig {
    pub fn new(
        ctx: PrimeContext,
        alpha: f64,
        points: Vec<PAdicRational>,
        coupling: CMat,
        eta: Option<CMat>,
    ) -> Result<Self> {
        if alpha <= 1.0 {
            return Err(Error::AlphaOutOfRange { alpha, min: 1.0 });
        }
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty point set".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if points[i].distance_exponent(&points[j])?.is_none() {
                    return Err(Error::DuplicatePoints);
                }
            }
        }
        if coupling.size() != n {
            return Err(Error::Dimension(format!(
                "coupling is {}x{} for {} points",
                coupling.size(),
                coupling.size(),
                n
            )));
        }
        if let Some(y) = &eta {
            if y.size() != n {
                return Err(Error::Dimension("eta size".into()));
            }
            if y.det().norm() < 1e-12 {
                return Err(Error::SingularEta);
            }
        }
        Ok(RealizationConfig {
            ctx,
            alpha,
            points,
            coupling,
            eta,
        })
    }

    pub fn context(&self) -> PrimeContext {
        self.ctx
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn points(&self) -> &[PAdicRational] {
        &self.points
    }

    pub fn coupling(&self) -> &CMat {
        &self.coupling
    }

    pub fn eta(&self) -> Option<&CMat> {
        self.eta.as_ref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn series(&self) -> MSeries {
        MSeries::new(self.ctx, self.alpha).expect("alpha checked at construction")
    }
}

/// Boundary values of a domain element f = u + sum c_k h_k:
/// Gamma_0 f = point values, Gamma_1 f = negated defect weights.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub gamma0: Vec<Complex64>,
    pub gamma1: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalTag {
    /// The band (p^{alpha N}, p^{alpha (N+1)}).
    Band(i64),
    NegativeAxis,
}

#[derive(Debug, Clone)]
pub struct EigenvalueRecord {
    pub lambda: Complex64,
    pub interval: IntervalTag,
    pub multiplicity: usize,
    /// Smallest singular value of B M(lambda) + I at the located root.
    pub residual: f64,
    /// True when the coupling matrix is singular, where the determinant
    /// condition extends the invertible-coupling statement.
    pub extension: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealizationClass {
    SelfAdjoint,
    EtaSelfAdjoint,
    Neither,
}

/// The n x n matrix M(lambda) of M-series values at the pairwise ultrametric
/// distances: M_0 on the diagonal, M_{p^{gamma_ij}} off it. Symmetric by
/// construction.
pub fn build_m(config: &RealizationConfig, lambda: Complex64, tol: f64) -> Result<CMat> {
    let series = config.series();
    let n = config.len();
    let mut m = CMat::zeros(n);
    let diag = series.m0(lambda, tol)?.value;
    for i in 0..n {
        m[(i, i)] = diag;
    }
    for i in 0..n {
        for j in i + 1..n {
            let gamma = config.points[i]
                .distance_exponent(&config.points[j])?
                .expect("points are distinct");
            let v = series.mgamma(gamma, lambda, tol)?.value;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Termwise-differentiated M(lambda), for Newton steps.
pub fn build_m_prime(config: &RealizationConfig, lambda: Complex64, tol: f64) -> Result<CMat> {
    let series = config.series();
    let n = config.len();
    let mut m = CMat::zeros(n);
    let diag = series.m0_prime(lambda, tol)?.value;
    for i in 0..n {
        m[(i, i)] = diag;
    }
    for i in 0..n {
        for j in i + 1..n {
            let gamma = config.points[i]
                .distance_exponent(&config.points[j])?
                .expect("points are distinct");
            let v = series.mgamma_prime(gamma, lambda, tol)?.value;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Self-adjoint iff B is Hermitian; eta-self-adjoint iff eta B is Hermitian.
pub fn classify_realization(config: &RealizationConfig) -> RealizationClass {
    if config.coupling.is_hermitian(HERMITIAN_TOL) {
        return RealizationClass::SelfAdjoint;
    }
    if let Some(y) = &config.eta {
        if y.mul(&config.coupling).is_hermitian(HERMITIAN_TOL) {
            return RealizationClass::EtaSelfAdjoint;
        }
    }
    RealizationClass::Neither
}

/// The eta-twisted Hermitian test alone; errors when no eta matrix is
/// configured.
pub fn is_eta_self_adjoint(config: &RealizationConfig) -> Result<bool> {
    match &config.eta {
        None => Err(Error::MissingEta),
        Some(y) => Ok(y.mul(&config.coupling).is_hermitian(HERMITIAN_TOL)),
    }
}

/// The permutation matrix of the parity action on the defect basis:
/// entry (i, j) = 1 iff x_i = -x_j. Valid because the defect solutions are
/// radial, so parity permutes them along with the centers.
pub fn eta_matrix_parity(points: &[PAdicRational]) -> Result<CMat> {
    let n = points.len();
    let mut y = CMat::zeros(n);
    for j in 0..n {
        let neg = points[j].neg();
        let mut hit = None;
        for (i, x) in points.iter().enumerate() {
            if x.distance_exponent(&neg)?.is_none() {
                hit = Some(i);
                break;
            }
        }
        match hit {
            Some(i) => y[(i, j)] = Complex64::new(1.0, 0.0),
            None => return Err(Error::NotNegationClosed),
        }
    }
    Ok(y)
}

/// The characteristic function det[B M(lambda) + I]. Zero exactly at the
/// finite-multiplicity eigenvalues of the realization.
pub fn char_det(config: &RealizationConfig, lambda: Complex64, tol: f64) -> Result<Complex64> {
    let m = build_m(config, lambda, tol)?;
    let bm = config.coupling.mul(&m);
    Ok(bm.add(&CMat::identity(config.len())).det())
}

/// d/dlambda det[B M + I] via the Jacobi formula; valid off the zero set.
pub fn char_det_prime(
    config: &RealizationConfig,
    lambda: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let m = build_m(config, lambda, tol)?;
    let a = config.coupling.mul(&m).add(&CMat::identity(config.len()));
    let det = a.det();
    let mp = build_m_prime(config, lambda, tol)?;
    let bmp = config.coupling.mul(&mp);
    let inv = a.inverse()?;
    let prod = inv.mul(&bmp);
    let mut trace = Complex64::new(0.0, 0.0);
    for i in 0..config.len() {
        trace += prod[(i, i)];
    }
    Ok(det * trace)
}

fn rank_data(
    config: &RealizationConfig,
    lambda: Complex64,
    tol: f64,
) -> Result<(usize, f64, Vec<Complex64>)> {
    let m = build_m(config, lambda, tol)?;
    let bm = config.coupling.mul(&m);
    let a = bm.add(&CMat::identity(config.len()));
    let (sigmas, null_vec) = a.singular_values();
    // the assembly scale 1 + ||BM|| keeps the test meaningful when every
    // singular value collapses (n = 1 at a root)
    let scale = sigmas[0].max(1.0 + bm.max_abs());
    let zero_count = sigmas.iter().filter(|&&s| s < scale * RANK_REL_TOL).count();
    let residual = *sigmas.last().unwrap();
    Ok((zero_count, residual, null_vec))
}

/// Eigenvalue of the located root plus the rank-based multiplicity.
fn record_root(
    config: &RealizationConfig,
    lambda: Complex64,
    interval: IntervalTag,
    tol: f64,
) -> Result<EigenvalueRecord> {
    let (mult, residual, _) = rank_data(config, lambda, tol)?;
    Ok(EigenvalueRecord {
        lambda,
        interval,
        multiplicity: mult.max(1),
        residual,
        extension: config.coupling.det().norm() < 1e-12,
    })
}

/// Null vector of B M(lambda) + I at a root: the coefficient vector of the
/// eigenfunction f = sum c_k h_{k,lambda}.
pub fn eigenvector_at(
    config: &RealizationConfig,
    lambda: Complex64,
    tol: f64,
) -> Result<Vec<Complex64>> {
    Ok(rank_data(config, lambda, tol)?.2)
}

/// Scans the real axis for eigenvalues: per spectral band, and optionally
/// along the negative semi-axis. Requires the characteristic function to be
/// real-valued on the axis (Hermitian coupling, or an eta-twisted coupling
/// with real characteristic values); refuses otherwise.
pub fn find_real_eigenvalues(
    config: &RealizationConfig,
    window: &ScanWindow,
    tol: f64,
) -> Result<Vec<EigenvalueRecord>> {
    // reality probe at a few interior points
    let p = config.ctx.prime_f64();
    for n in [window.n_lo, (window.n_lo + window.n_hi) / 2] {
        let probe = p.powf(config.alpha * (n as f64 + 0.5));
        let v = char_det(config, Complex64::new(probe, 0.0), tol)?;
        if v.im.abs() > 1e-8 * (1.0 + v.re.abs()) {
            return Err(Error::NonRealCharacteristic);
        }
    }
    let f = |lam: f64| -> Result<f64> {
        let v = char_det(config, Complex64::new(lam, 0.0), tol)?;
        if v.im.abs() > 1e-6 * (1.0 + v.re.abs()) {
            return Err(Error::NonRealCharacteristic);
        }
        Ok(v.re)
    };
    let per_band = scan::map_intervals(window, |n| scan::roots_in_interval(p, config.alpha, n, f))?;
    let mut records = Vec::new();
    if window.negative_axis {
        for root in scan::roots_on_negative_axis(scan::NEG_AXIS_T_RANGE, 512, f)? {
            records.push(record_root(
                config,
                Complex64::new(root, 0.0),
                IntervalTag::NegativeAxis,
                tol,
            )?);
        }
    }
    for (n, roots) in per_band {
        for root in roots {
            records.push(record_root(
                config,
                Complex64::new(root, 0.0),
                IntervalTag::Band(n),
                tol,
            )?);
        }
    }
    Ok(records)
}

/// Axis-aligned search rectangle in the complex plane.
#[derive(Debug, Clone, Copy)]
pub struct Rectangle {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rectangle {
    fn width(&self) -> f64 {
        self.re_hi - self.re_lo
    }

    fn height(&self) -> f64 {
        self.im_hi - self.im_lo
    }

    fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_lo + self.re_hi),
            0.5 * (self.im_lo + self.im_hi),
        )
    }

    fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_lo && z.re <= self.re_hi && z.im >= self.im_lo && z.im <= self.im_hi
    }

    /// Distance from a real axis point to the rectangle boundary.
    fn boundary_distance(&self, x: f64) -> f64 {
        let inside = x >= self.re_lo && x <= self.re_hi && 0.0 >= self.im_lo && 0.0 <= self.im_hi;
        if inside {
            (x - self.re_lo)
                .min(self.re_hi - x)
                .min(-self.im_lo)
                .min(self.im_hi)
        } else {
            let dx = (self.re_lo - x).max(x - self.re_hi).max(0.0);
            let dy = (self.im_lo - 0.0).max(0.0 - self.im_hi).max(0.0);
            dx.hypot(dy)
        }
    }
}

fn validate_rectangle(config: &RealizationConfig, rect: &Rectangle) -> Result<()> {
    if rect.width() <= 0.0 || rect.height() <= 0.0 {
        return Err(Error::InvalidRectangle("degenerate rectangle".into()));
    }
    // the contour must clear every real grid point and the origin
    let p = config.ctx.prime_f64();
    let reach = rect.re_hi.abs().max(rect.re_lo.abs()).max(1.0);
    let m_hi = (reach.ln() / (config.alpha * p.ln())).ceil() as i64 + 1;
    let m_lo = m_hi - 200;
    for m in m_lo..=m_hi {
        let g = p.powf(config.alpha * m as f64);
        if g < 1e-280 {
            continue;
        }
        if rect.boundary_distance(g) < mseries::GUARD_REL * g * 10.0 {
            return Err(Error::InvalidRectangle(format!(
                "contour too close to the grid point p^(alpha*{m})"
            )));
        }
    }
    if rect.boundary_distance(0.0) < mseries::GUARD_ABS_ZERO * 10.0 {
        return Err(Error::InvalidRectangle(
            "contour too close to the accumulation point 0".into(),
        ));
    }
    Ok(())
}

/// Winding number of the characteristic function around the rectangle via
/// adaptive contour sampling: consecutive samples must turn by less than
/// pi/2 or the segment is subdivided.
fn winding_number(
    config: &RealizationConfig,
    rect: &Rectangle,
    grid: usize,
    tol: f64,
) -> Result<i64> {
    let corners = [
        Complex64::new(rect.re_lo, rect.im_lo),
        Complex64::new(rect.re_hi, rect.im_lo),
        Complex64::new(rect.re_hi, rect.im_hi),
        Complex64::new(rect.re_lo, rect.im_hi),
    ];
    let scale = rect.width().hypot(rect.height());
    let f = |z: Complex64| -> Result<Complex64> {
        let v = char_det(config, z, tol)?;
        if v.norm() < 1e-13 * (1.0 + scale) {
            return Err(Error::ContourNearZero);
        }
        Ok(v)
    };
    let mut total = 0.0f64;
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let mut z_prev = a;
        let mut f_prev = f(a)?;
        for i in 1..=grid {
            let t = i as f64 / grid as f64;
            let z = a + (b - a) * t;
            let fz = f(z)?;
            total += arg_step(&f, z_prev, f_prev, z, fz, 24)?;
            z_prev = z;
            f_prev = fz;
        }
    }
    let w = total / (2.0 * std::f64::consts::PI);
    let rounded = w.round();
    if (w - rounded).abs() > 0.25 {
        return Err(Error::ContourNearZero);
    }
    Ok(rounded as i64)
}

fn arg_step<F>(
    f: &F,
    z0: Complex64,
    f0: Complex64,
    z1: Complex64,
    f1: Complex64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let d = (f1 / f0).arg();
    if d.abs() <= std::f64::consts::FRAC_PI_2 {
        return Ok(d);
    }
    if depth == 0 {
        return Err(Error::ContourNearZero);
    }
    let zm = (z0 + z1) / 2.0;
    let fm = f(zm)?;
    Ok(arg_step(f, z0, f0, zm, fm, depth - 1)? + arg_step(f, zm, fm, z1, f1, depth - 1)?)
}

/// Locates eigenvalues inside a rectangle by argument-principle counting,
/// recursive subdivision until each cell holds at most one zero, and Newton
/// refinement with the termwise-differentiated series. A contour passing too
/// near a zero is perturbed once before failing.
pub fn find_complex_eigenvalues(
    config: &RealizationConfig,
    rect: &Rectangle,
    grid: usize,
    tol: f64,
) -> Result<Vec<EigenvalueRecord>> {
    validate_rectangle(config, rect)?;
    let mut roots: Vec<Complex64> = Vec::new();
    match search_cell(config, rect, grid.max(8), tol, 0, &mut roots) {
        Ok(()) => {}
        Err(Error::ContourNearZero) => {
            // a zero hugging the outer contour: perturb the rectangle once
            let dx = rect.width() * 1.7e-4;
            let dy = rect.height() * 1.7e-4;
            let moved = Rectangle {
                re_lo: rect.re_lo - dx,
                re_hi: rect.re_hi + dx,
                im_lo: rect.im_lo - dy,
                im_hi: rect.im_hi + dy,
            };
            validate_rectangle(config, &moved)?;
            roots.clear();
            search_cell(config, &moved, grid.max(8), tol, 0, &mut roots)?;
        }
        Err(e) => return Err(e),
    }
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    roots.dedup_by(|a, b| (*a - *b).norm() < 1e-8 * (1.0 + b.norm()));
    let mut records = Vec::new();
    for root in roots {
        let interval = classify_interval(config, root);
        records.push(record_root(config, root, interval, tol)?);
    }
    Ok(records)
}

fn classify_interval(config: &RealizationConfig, lambda: Complex64) -> IntervalTag {
    if lambda.im.abs() < 1e-9 * (1.0 + lambda.re.abs()) && lambda.re < 0.0 {
        return IntervalTag::NegativeAxis;
    }
    let p = config.ctx.prime_f64();
    let mag = lambda.norm().max(1e-300);
    IntervalTag::Band((mag.ln() / (config.alpha * p.ln())).floor() as i64)
}

fn search_cell(
    config: &RealizationConfig,
    rect: &Rectangle,
    grid: usize,
    tol: f64,
    depth: u32,
    roots: &mut Vec<Complex64>,
) -> Result<()> {
    let count = winding_number(config, rect, grid, tol)?;
    if count == 0 {
        return Ok(());
    }
    let scale = rect.width().hypot(rect.height());
    if count == 1 || depth >= 48 || scale < 1e-10 * (1.0 + rect.center().norm()) {
        if let Some(root) = newton_polish(config, rect, tol) {
            roots.push(root);
            return Ok(());
        }
        if count == 1 && depth < 48 && scale >= 1e-10 * (1.0 + rect.center().norm()) {
            // Newton escaped: keep squeezing the cell
            return subdivide(config, rect, grid, tol, depth, roots);
        }
        roots.push(rect.center());
        return Ok(());
    }
    subdivide(config, rect, grid, tol, depth, roots)
}

fn subdivide(
    config: &RealizationConfig,
    rect: &Rectangle,
    grid: usize,
    tol: f64,
    depth: u32,
    roots: &mut Vec<Complex64>,
) -> Result<()> {
    // a zero sitting on a split line makes a quadrant contour fail; shift
    // the split fractions and retry before giving up
    'attempt: for frac in [0.5f64, 0.47, 0.53] {
        let xm = rect.re_lo + frac * rect.width();
        let ym = rect.im_lo + frac * rect.height();
        let quads = [
            Rectangle {
                re_lo: rect.re_lo,
                re_hi: xm,
                im_lo: rect.im_lo,
                im_hi: ym,
            },
            Rectangle {
                re_lo: xm,
                re_hi: rect.re_hi,
                im_lo: rect.im_lo,
                im_hi: ym,
            },
            Rectangle {
                re_lo: rect.re_lo,
                re_hi: xm,
                im_lo: ym,
                im_hi: rect.im_hi,
            },
            Rectangle {
                re_lo: xm,
                re_hi: rect.re_hi,
                im_lo: ym,
                im_hi: rect.im_hi,
            },
        ];
        let mut found = Vec::new();
        for q in quads {
            match search_cell(config, &q, grid, tol, depth + 1, &mut found) {
                Ok(()) => {}
                Err(Error::ContourNearZero) => continue 'attempt,
                Err(e) => return Err(e),
            }
        }
        roots.append(&mut found);
        return Ok(());
    }
    Err(Error::ContourNearZero)
}

fn newton_polish(config: &RealizationConfig, rect: &Rectangle, tol: f64) -> Option<Complex64> {
    let mut z = rect.center();
    for _ in 0..60 {
        let fz = char_det(config, z, tol).ok()?;
        let dz = char_det_prime(config, z, tol).ok()?;
        if dz.norm() == 0.0 {
            return None;
        }
        let step = fz / dz;
        let z_next = z - step;
        if !rect.contains(z_next) {
            return None;
        }
        if step.norm() <= 1e-12 * (1.0 + z.norm()) {
            return Some(z_next);
        }
        z = z_next;
    }
    Some(z)
}

/// Boundary mappings of a domain element with defect parts at lambda = -1:
/// Gamma_0 f = (f(x_1), ..., f(x_n)), Gamma_1 f = -(c_1, ..., c_n).
pub fn boundary_data(config: &RealizationConfig, f: &DomainElement) -> Result<BoundaryData> {
    let series = config.series();
    let minus_one = Complex64::new(-1.0, 0.0);
    // map green centers onto configured points
    let mut center_index = Vec::with_capacity(f.greens.len());
    for g in &f.greens {
        if (g.lambda - minus_one).norm() > 1e-12 {
            return Err(Error::GreenLambdaNotMinusOne);
        }
        let mut found = None;
        for (i, x) in config.points.iter().enumerate() {
            if x.distance_exponent(&g.center)?.is_none() {
                found = Some(i);
                break;
            }
        }
        let idx = found.ok_or(Error::UnknownGreenCenter)?;
        if center_index.contains(&idx) {
            return Err(Error::DuplicatePoints);
        }
        center_index.push(idx);
    }
    let n = config.len();
    let mut gamma0 = vec![Complex64::new(0.0, 0.0); n];
    let mut gamma1 = vec![Complex64::new(0.0, 0.0); n];
    for (g, &k) in f.greens.iter().zip(&center_index) {
        gamma1[k] -= g.weight;
    }
    for (i, x_i) in config.points.iter().enumerate() {
        let mut v = f.smooth.eval(x_i);
        for (g, &_k) in f.greens.iter().zip(&center_index) {
            v += g.weight * green::eval_h(&series, &g.center, minus_one, x_i, 1e-13)?;
        }
        gamma0[i] = v;
    }
    Ok(BoundaryData { gamma0, gamma1 })
}

/// The resolvent applied to a finite wavelet sum.
#[derive(Debug, Clone)]
pub struct ResolventOutput {
    /// (D^alpha - lambda)^{-1} f, coefficientwise.
    pub diagonal: WaveletSum,
    /// The rank-n correction: weights of h_{k,lambda} (already negated).
    pub greens: Vec<GreenComponent>,
}

/// Krein resolvent: R_lambda f equals (D^alpha - lambda)^{-1} f minus
/// sum_k w_k h_{k,lambda}, where w solves [B M(lambda) + I] w = B v and
/// v_k = (f, h_{k, conj lambda}) restricted to the support of f.
pub fn resolvent_apply(
    config: &RealizationConfig,
    lambda: Complex64,
    f: &WaveletSum,
    tol: f64,
) -> Result<ResolventOutput> {
    mseries::guard_full(config.ctx, config.alpha, lambda)?;
    let pf = config.ctx.prime_f64();
    let mut diagonal = WaveletSum::new(config.ctx);
    for (idx, c) in f.terms() {
        let denom = Complex64::new(idx.dalpha_eigenvalue(config.ctx, config.alpha), 0.0) - lambda;
        diagonal.add_term(idx.clone(), c / denom);
    }
    let n = config.len();
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for (k, x_k) in config.points.iter().enumerate() {
        // (f, h_{k, conj lambda}) over the support of f equals the value of
        // the diagonal part at x_k
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, fc) in f.terms() {
            if idx.coset != x_k.coset_rep(idx.scale) {
                continue;
            }
            let amp = pf.powf(-(idx.scale as f64) / 2.0);
            let phase = x_k
                .scale_by_p_pow(idx.scale - 1)
                .mul(&PAdicRational::from_integer(idx.freq as i64, config.ctx))
                .character();
            let denom =
                Complex64::new(idx.dalpha_eigenvalue(config.ctx, config.alpha), 0.0) - lambda;
            acc += fc * amp * phase / denom;
        }
        v[k] = acc;
    }
    let m = build_m(config, lambda, tol)?;
    let bm = config.coupling.mul(&m);
    let a = bm.add(&CMat::identity(n));
    let (sigmas, _) = a.singular_values();
    if sigmas[n - 1] < sigmas[0].max(1.0 + bm.max_abs()) * RANK_REL_TOL {
        return Err(Error::SingularSystem);
    }
    let rhs = config.coupling.mul_vec(&v);
    let w = a.solve(&rhs)?;
    let greens = config
        .points
        .iter()
        .zip(&w)
        .map(|(x, wk)| GreenComponent {
            center: x.clone(),
            lambda,
            weight: -wk,
        })
        .collect();
    Ok(ResolventOutput { diagonal, greens })
}

/// Max coefficient residual of (A_B - lambda) R_lambda f - f over the scale
/// window. The defect parts split as h_{k,lambda} = (h_{k,lambda} -
/// h_{k,-1}) + h_{k,-1}; the realization acts by D^alpha on the first piece
/// and by -1 on the second, and the delta expansions cancel in exact
/// arithmetic.
pub fn windowed_defect(
    config: &RealizationConfig,
    lambda: Complex64,
    out: &ResolventOutput,
    f: &WaveletSum,
    window: (i64, i64),
) -> Result<f64> {
    let minus_one = Complex64::new(-1.0, 0.0);
    let mut smooth = out.diagonal.clone();
    let mut bound_part = WaveletSum::new(config.context());
    for g in &out.greens {
        let (h_lam, _) = green::h_coefficients(
            config.context(),
            config.alpha(),
            &g.center,
            g.lambda,
            window,
        )?;
        let (h_m1, _) = green::h_coefficients(
            config.context(),
            config.alpha(),
            &g.center,
            minus_one,
            window,
        )?;
        // u_k = h_{k,lambda} - h_{k,-1} is the smooth piece
        smooth = smooth.plus(&h_lam.scaled(g.weight));
        smooth = smooth.plus(&h_m1.scaled(-g.weight));
        bound_part = bound_part.plus(&h_m1.scaled(g.weight));
    }
    // (A_B - lambda) applied: D^alpha on smooth, -1 on the defect piece,
    // minus lambda times the whole output
    let mut image = smooth.apply_dalpha(config.alpha())?;
    image = image.plus(&bound_part.scaled(minus_one));
    image = image.plus(&smooth.scaled(-lambda));
    image = image.plus(&bound_part.scaled(-lambda));
    // compare against f on the window
    let mut worst = 0.0f64;
    for (idx, c_img) in image.terms() {
        if idx.scale < window.0 || idx.scale > window.1 {
            continue;
        }
        let gap = (c_img - f.coefficient(idx)).norm();
        worst = worst.max(gap);
    }
    for (idx, c_f) in f.terms() {
        let gap = (image.coefficient(idx) - c_f).norm();
        worst = worst.max(gap);
    }
    Ok(worst)
}
