//! The Green's function h_{k,lambda} solving (D^alpha - lambda) h = delta_{x_k}:
//! radial closed-form evaluation, wavelet-coefficient representation, the
//! norm identity, and solvability predicates.
//!
//! The solution exists in L2 exactly when alpha > 1/2 and lambda stays off
//! the grid {p^{alpha m}} and off 0. It is radial in the ultrametric distance
//! from the source: M_0(lambda) at the center, M_{p^gamma}(lambda) on the
//! sphere of radius p^gamma. The radial layer needs alpha > 1; for
//! 1/2 < alpha <= 1 only the coefficient representation is offered.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mseries::{self, MEvaluation, MSeries};
use crate::padic::{PAdicRational, PrimeContext};
use crate::wavelet::{KahanSum, WaveletIndex, WaveletSum};

/// One rank-one piece of a domain element: weight * h_{center, lambda}.
#[derive(Debug, Clone)]
pub struct GreenComponent {
    pub center: PAdicRational,
    pub lambda: Complex64,
    pub weight: Complex64,
}

/// An element of the adjoint domain, f = u + sum_k c_k h_{k,-1}, with u kept
/// as a finite wavelet sum.
#[derive(Debug, Clone)]
pub struct DomainElement {
    pub smooth: WaveletSum,
    pub greens: Vec<GreenComponent>,
}

impl DomainElement {
    pub fn smooth_only(smooth: WaveletSum) -> Self {
        DomainElement {
            smooth,
            greens: Vec::new(),
        }
    }
}

/// Why (or whether) the source problem is solvable at (alpha, lambda).
#[derive(Debug, Clone)]
pub struct Solvability {
    pub solvable: bool,
    /// Whether the radial closed form applies (alpha > 1).
    pub radial: bool,
    pub reason: String,
}

/// Solvability of (D^alpha - lambda) h = delta: alpha > 1/2 and lambda off
/// the closed spectrum grid.
pub fn solvable(ctx: PrimeContext, alpha: f64, lambda: Complex64) -> Solvability {
    if alpha <= 0.5 {
        return Solvability {
            solvable: false,
            radial: false,
            reason: format!("alpha = {alpha} <= 1/2: no L2 solution"),
        };
    }
    match mseries::guard_full(ctx, alpha, lambda) {
        Err(e) => Solvability {
            solvable: false,
            radial: false,
            reason: e.to_string(),
        },
        Ok(()) => Solvability {
            solvable: true,
            radial: alpha > 1.0,
            reason: "lambda clear of the spectrum grid".into(),
        },
    }
}

/// Radial evaluation: M_0(lambda) at the source, M_{p^gamma}(lambda) on the
/// sphere |x - x_k|_p = p^gamma. Requires alpha > 1.
pub fn eval_h(
    series: &MSeries,
    x_k: &PAdicRational,
    lambda: Complex64,
    x: &PAdicRational,
    tol: f64,
) -> Result<Complex64> {
    let dist = x.distance_exponent(x_k)?;
    Ok(series.at_distance(dist, lambda, tol)?.value)
}

/// L2 and sup bounds on the dropped tail of a coefficient window.
#[derive(Debug, Clone, Copy)]
pub struct TailBounds {
    /// Bound on the L2 norm of the dropped coefficients.
    pub l2: f64,
    /// Bound on the sup norm of the dropped pointwise contribution.
    pub sup: f64,
}

/// Wavelet coefficients of h_{k,lambda} on a scale window:
/// p^{-N/2} chi(-p^{N-1} j x_k) (p^{alpha(1-N)} - lambda)^{-1} at the coset
/// eps = {p^N x_k}_p. Valid for alpha > 1/2.
pub fn h_coefficients(
    ctx: PrimeContext,
    alpha: f64,
    x_k: &PAdicRational,
    lambda: Complex64,
    n_range: (i64, i64),
) -> Result<(WaveletSum, TailBounds)> {
    if alpha <= 0.5 {
        return Err(Error::AlphaOutOfRange { alpha, min: 0.5 });
    }
    let (n_min, n_max) = n_range;
    if n_min > n_max {
        return Err(Error::EmptyWindow);
    }
    mseries::guard_full(ctx, alpha, lambda)?;
    let p = ctx.prime();
    let pf = ctx.prime_f64();
    let mut out = WaveletSum::new(ctx);
    for n in n_min..=n_max {
        let eps = x_k.coset_rep(n);
        let amp = pf.powf(-(n as f64) / 2.0);
        let denom = Complex64::new(pf.powf(alpha * (1.0 - n as f64)), 0.0) - lambda;
        for j in 1..p as u32 {
            let phase = x_k
                .scale_by_p_pow(n - 1)
                .mul(&PAdicRational::from_integer(-(j as i64), ctx))
                .character();
            out.add_term(
                WaveletIndex {
                    scale: n,
                    freq: j,
                    coset: eps.clone(),
                },
                amp * phase / denom,
            );
        }
    }
    let tail = window_tail_bounds(ctx, alpha, lambda, n_range);
    Ok((out, tail))
}

/// Geometric bounds on everything dropped outside the window.
///
/// Squared L2 terms are (p-1) p^{-N} |p^{alpha(1-N)} - lambda|^{-2}: above
/// the window the eigenvalue p^{alpha(1-N)} tends to 0 so each term is at
/// most 4 (p-1) p^{-N} / |lambda|^2 once p^{alpha(1-N)} <= |lambda|/2; below
/// the window the eigenvalue dominates and each term is at most
/// 4 (p-1) p^{(2 alpha - 1) N - 2 alpha}. Pointwise contributions replace
/// one p^{-N/2} factor by |psi| <= p^{-N/2}, giving the analogous sums of
/// (p-1) p^{-N} |...|^{-1}.
pub fn window_tail_bounds(
    ctx: PrimeContext,
    alpha: f64,
    lambda: Complex64,
    n_range: (i64, i64),
) -> TailBounds {
    let p = ctx.prime_f64();
    let mag = lambda.norm();
    let (n_min, n_max) = n_range;

    // Upper side N > n_max: walk until the eigenvalue drops under |lambda|/2,
    // bound exactly until then, then close with the geometric series.
    let mut l2_up = 0.0f64;
    let mut sup_up = 0.0f64;
    let mut n = n_max + 1;
    loop {
        let eig = p.powf(alpha * (1.0 - n as f64));
        if eig <= mag / 2.0 {
            // remaining tail: sum_{m >= n} (p-1) p^{-m} with the lambda floor
            let geo = (p - 1.0) * p.powi(-n as i32) / (1.0 - 1.0 / p);
            l2_up += geo * 4.0 / (mag * mag);
            sup_up += geo * 2.0 / mag;
            break;
        }
        let dist = (Complex64::new(eig, 0.0) - lambda).norm().max(1e-300);
        l2_up += (p - 1.0) * p.powi(-n as i32) / (dist * dist);
        sup_up += (p - 1.0) * p.powi(-n as i32) / dist;
        n += 1;
    }

    // Lower side N < n_min: walk down until the eigenvalue exceeds
    // 2|lambda|, then the eigenvalue dominates with ratio p^{-(2 alpha - 1)}.
    let mut l2_down = 0.0f64;
    let mut sup_down = 0.0f64;
    let mut n = n_min - 1;
    loop {
        let eig = p.powf(alpha * (1.0 - n as f64));
        if eig >= 2.0 * mag {
            let ratio_l2 = p.powf(-(2.0 * alpha - 1.0));
            let ratio_sup = p.powf(-(alpha - 1.0)).min(1.0 - 1e-9);
            let first_l2 = 4.0 * (p - 1.0) * p.powi(-n as i32) / (eig * eig);
            let first_sup = 2.0 * (p - 1.0) * p.powi(-n as i32) / eig;
            l2_down += first_l2 / (1.0 - ratio_l2);
            sup_down += first_sup / (1.0 - ratio_sup);
            break;
        }
        let dist = (Complex64::new(eig, 0.0) - lambda).norm().max(1e-300);
        l2_down += (p - 1.0) * p.powi(-n as i32) / (dist * dist);
        sup_down += (p - 1.0) * p.powi(-n as i32) / dist;
        n -= 1;
    }

    TailBounds {
        l2: (l2_up + l2_down).sqrt(),
        sup: sup_up + sup_down,
    }
}

/// Window wide enough that the reported L2 tail falls under `tol`.
pub fn default_window(ctx: PrimeContext, alpha: f64, lambda: Complex64, tol: f64) -> (i64, i64) {
    let mut lo = -2i64;
    let mut hi = 2i64;
    for _ in 0..400 {
        let t = window_tail_bounds(ctx, alpha, lambda, (lo, hi));
        if t.l2 <= tol {
            break;
        }
        lo -= 1;
        hi += 1;
    }
    (lo, hi)
}

/// ||h_{k,lambda}||^2 = M_0'(lambda); independent of the center.
pub fn h_norm_sq(series: &MSeries, lambda: Complex64, tol: f64) -> Result<MEvaluation> {
    series.m0_prime(lambda, tol)
}

/// The sphere sum sum_{j=1}^{p-1} chi(p^{gamma-1} j (x - x_k)) at the exact
/// ultrametric distance p^gamma; always -1.
pub fn character_sphere_sum(x: &PAdicRational, x_k: &PAdicRational) -> Result<Complex64> {
    let ctx = x.context();
    let gamma = match x.distance_exponent(x_k)? {
        None => return Err(Error::CoincidentPoints),
        Some(g) => g,
    };
    let y = x.sub(x_k).scale_by_p_pow(gamma - 1);
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for j in 1..ctx.prime() as i64 {
        let v = y.mul(&PAdicRational::from_integer(j, ctx)).character();
        re.add(v.re);
        im.add(v.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeContext;

    const TOL: f64 = 1e-12;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn q(num: i64, den: i64, c: PrimeContext) -> PAdicRational {
        PAdicRational::from_ratio(num, den, c).unwrap()
    }

    fn cx(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn solvability_cases() {
        let c = ctx(2);
        let s = solvable(c, 0.4, cx(-1.0));
        assert!(!s.solvable);
        assert!(s.reason.contains("1/2"));

        let s = solvable(c, 2.0, cx(4.0));
        assert!(!s.solvable, "lambda on the spectrum grid");

        let s = solvable(c, 2.0, cx(-1.0));
        assert!(s.solvable && s.radial);

        let s = solvable(c, 0.8, cx(-1.0));
        assert!(s.solvable && !s.radial);
    }

    #[test]
    fn radial_values_from_m_series() {
        let c = ctx(2);
        let series = MSeries::new(c, 2.0).unwrap();
        let x_k = q(1, 2, c);
        let lambda = cx(-1.0);
        let at_center = eval_h(&series, &x_k, lambda, &x_k.clone(), TOL).unwrap();
        let m0 = series.m0(lambda, TOL).unwrap().value;
        assert!((at_center - m0).norm() < 1e-14);
        // on a sphere: |3/2 - 1/2|_2 = 1 = 2^0
        let x = q(3, 2, c);
        let v = eval_h(&series, &x_k, lambda, &x, TOL).unwrap();
        let mg = series.mgamma(0, lambda, TOL).unwrap().value;
        assert!((v - mg).norm() < 1e-14);
    }

    #[test]
    fn radial_agrees_with_truncated_series() {
        let c = ctx(3);
        let alpha = 2.0;
        let series = MSeries::new(c, alpha).unwrap();
        let x_k = q(2, 3, c);
        let lambda = cx(-0.7);
        let window = default_window(c, alpha, lambda, 1e-10);
        let (coeffs, tail) = h_coefficients(c, alpha, &x_k, lambda, window).unwrap();
        for (num, den) in [
            (0i64, 1i64),
            (1, 1),
            (5, 3),
            (1, 9),
            (22, 7),
            (-4, 27),
            (7, 81),
        ] {
            let x = q(num, den, c);
            let series_val = coeffs.eval(&x);
            let radial = eval_h(&series, &x_k, lambda, &x, TOL).unwrap();
            assert!(
                (series_val - radial).norm() <= tail.sup + 1e-10,
                "x = {num}/{den}: series {series_val} vs radial {radial}, sup tail {}",
                tail.sup
            );
        }
    }

    #[test]
    fn coefficient_window_image_is_delta_window() {
        // (D^alpha - lambda) applied termwise over the window reproduces the
        // delta expansion exactly on the window
        let c = ctx(2);
        let alpha = 1.6;
        let x_k = q(3, 4, c);
        let lambda = cx(-2.3);
        let window = (-6i64, 6i64);
        let (h, _) = h_coefficients(c, alpha, &x_k, lambda, window).unwrap();
        let image = {
            let d = h.apply_dalpha(alpha).unwrap();
            d.plus(&h.scaled(-lambda))
        };
        let delta = crate::wavelet::delta_coefficients(&x_k, window).unwrap();
        assert_eq!(image.len(), delta.len());
        for (idx, c_img) in image.terms() {
            let c_delta = delta.coefficient(idx);
            assert!(
                (c_img - c_delta).norm() < 1e-13 * (1.0 + c_delta.norm()),
                "window image must equal the delta expansion"
            );
        }
    }

    #[test]
    fn center_at_origin_gives_plain_coefficients() {
        let c = ctx(2);
        let alpha = 2.0;
        let origin = q(0, 1, c);
        let lambda = cx(-1.0);
        let (h, _) = h_coefficients(c, alpha, &origin, lambda, (-3, 3)).unwrap();
        for (idx, coeff) in h.terms() {
            assert!(idx.coset.is_zero());
            let expect = 2f64.powf(-(idx.scale as f64) / 2.0)
                / (Complex64::new(2f64.powf(alpha * (1.0 - idx.scale as f64)), 0.0) - lambda);
            assert!((coeff - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn windowed_norm_approaches_m0_prime() {
        let c = ctx(2);
        let alpha = 2.0;
        let series = MSeries::new(c, alpha).unwrap();
        let x_k = q(5, 8, c);
        let lambda = cx(-1.3);
        let target = h_norm_sq(&series, lambda, TOL).unwrap();
        let mut prev_gap = f64::INFINITY;
        for half in [2i64, 4, 8, 16] {
            let (h, tail) = h_coefficients(c, alpha, &x_k, lambda, (-half, half)).unwrap();
            let partial = h.norm_sq();
            let gap = target.real() - partial;
            assert!(gap > -1e-10, "partial sums increase toward the norm");
            assert!(gap <= tail.l2 * tail.l2 + target.error_bound + 1e-10);
            assert!(gap <= prev_gap + 1e-12);
            prev_gap = gap;
        }
    }

    #[test]
    fn conjugation_symmetry_of_coefficients() {
        // pointwise: conj(h_{k,lambda}(x)) = h_{k,conj lambda}(x)
        let c = ctx(3);
        let alpha = 1.8;
        let x_k = q(4, 3, c);
        let lambda = Complex64::new(-0.9, 0.55);
        let (h, _) = h_coefficients(c, alpha, &x_k, lambda, (-4, 4)).unwrap();
        let (hc, _) = h_coefficients(c, alpha, &x_k, lambda.conj(), (-4, 4)).unwrap();
        for (num, den) in [(0i64, 1i64), (1, 3), (7, 9), (-2, 1)] {
            let x = q(num, den, c);
            let lhs = h.eval(&x).conj();
            let rhs = hc.eval(&x);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn sphere_sums_are_minus_one() {
        // p = 2: single term chi(1/2) = -1
        let c2 = ctx(2);
        let v = character_sphere_sum(&q(1, 2, c2), &q(0, 1, c2)).unwrap();
        assert!((v - cx(-1.0)).norm() < 1e-14);

        for p in [3u64, 5, 7] {
            let c = ctx(p);
            let x_k = q(1, 3, c);
            for (num, den) in [(1i64, 1i64), (2, 1), ((p * p) as i64 + 1, (p * p) as i64)] {
                let x = x_k.add(&q(num, den, c));
                let v = character_sphere_sum(&x, &x_k).unwrap();
                assert!(
                    (v - cx(-1.0)).norm() < 1e-12,
                    "p={p} offset {num}/{den}: {v}"
                );
            }
        }
        assert!(matches!(
            character_sphere_sum(&q(1, 3, ctx(3)), &q(1, 3, ctx(3))),
            Err(Error::CoincidentPoints)
        ));
    }

    #[test]
    fn low_alpha_keeps_coefficients_but_not_radial() {
        let c = ctx(2);
        // coefficient layer works for 1/2 < alpha <= 1
        let (h, _) = h_coefficients(c, 0.8, &q(0, 1, c), cx(-1.0), (-3, 3)).unwrap();
        assert!(!h.is_empty());
        assert!(h_coefficients(c, 0.5, &q(0, 1, c), cx(-1.0), (-3, 3)).is_err());
        // the radial layer (through MSeries) refuses alpha <= 1
        assert!(MSeries::new(c, 0.9).is_err());
    }
}
