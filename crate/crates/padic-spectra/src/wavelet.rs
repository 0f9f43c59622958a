//! The p-adic wavelet eigenbasis: evaluation, finite wavelet sums, the
//! diagonal action of the fractional operator, delta-function expansion
//! coefficients, dilation, and the modified wavelets of the one-point model.
//!
//! A basis element is indexed by (N, j, eps) with N an integer scale,
//! j in 1..p-1, and eps a canonical coset of Q_p/Z_p:
//!
//!   psi_{N j eps}(x) = p^{-N/2} chi(p^{N-1} j x) Omega(|p^N x - eps|_p).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{ModulatedIndicator, StepFunction};
use crate::padic::{CosetEpsilon, PAdicRational, PrimeContext, Valuation};

/// Coefficients with modulus below this are dropped from wavelet sums; it
/// keeps p^{-N/2} underflow from extreme scale windows out of the maps.
pub const COEFF_FLUSH_THRESHOLD: f64 = 1e-200;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WaveletIndex {
    /// Scale N.
    pub scale: i64,
    /// Frequency j, in 1..p-1.
    pub freq: u32,
    /// Coset representative eps.
    pub coset: CosetEpsilon,
}

impl WaveletIndex {
    pub fn new(ctx: PrimeContext, scale: i64, freq: u32, coset: CosetEpsilon) -> Result<Self> {
        let max = (ctx.prime() - 1) as u32;
        if freq < 1 || freq > max {
            return Err(Error::FrequencyOutOfRange { j: freq, max });
        }
        Ok(WaveletIndex { scale, freq, coset })
    }

    /// Center of the supporting ball: p^{-N} eps.
    pub fn support_center(&self, ctx: PrimeContext) -> PAdicRational {
        self.coset.as_padic(ctx).scale_by_p_pow(-self.scale)
    }

    /// Eigenvalue of the diagonal fractional action at this scale.
    pub fn dalpha_eigenvalue(&self, ctx: PrimeContext, alpha: f64) -> f64 {
        ctx.prime_f64().powf(alpha * (1.0 - self.scale as f64))
    }
}

/// Exact evaluation of a single wavelet at a rational point.
pub fn eval_wavelet(ctx: PrimeContext, idx: &WaveletIndex, x: &PAdicRational) -> Complex64 {
    let scaled = x.scale_by_p_pow(idx.scale);
    let gap = scaled.sub(&idx.coset.as_padic(ctx));
    let in_support = match gap.valuation() {
        Valuation::Infinite => true,
        Valuation::Finite(v) => v >= 0,
    };
    if !in_support {
        return Complex64::new(0.0, 0.0);
    }
    let amp = ctx.prime_f64().powf(-(idx.scale as f64) / 2.0);
    let phase = x
        .scale_by_p_pow(idx.scale - 1)
        .mul(&PAdicRational::from_integer(idx.freq as i64, ctx));
    amp * phase.character()
}

/// A finite complex linear combination of basis wavelets. Zero coefficients
/// are never stored; the map order is deterministic.
#[derive(Debug, Clone)]
pub struct WaveletSum {
    ctx: PrimeContext,
    terms: BTreeMap<WaveletIndex, Complex64>,
}

impl WaveletSum {
    pub fn new(ctx: PrimeContext) -> Self {
        WaveletSum {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn context(&self) -> PrimeContext {
        self.ctx
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WaveletIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &WaveletIndex) -> Complex64 {
        self.terms
            .get(idx)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn add_term(&mut self, idx: WaveletIndex, coeff: Complex64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
            Entry::Vacant(slot) => {
                if coeff.norm() >= COEFF_FLUSH_THRESHOLD {
                    slot.insert(coeff);
                }
            }
            Entry::Occupied(mut slot) => {
                let updated = *slot.get() + coeff;
                if updated.norm() < COEFF_FLUSH_THRESHOLD {
                    slot.remove();
                } else {
                    *slot.get_mut() = updated;
                }
            }
        }
    }

    pub fn single(ctx: PrimeContext, idx: WaveletIndex) -> Self {
        let mut ws = WaveletSum::new(ctx);
        ws.add_term(idx, Complex64::new(1.0, 0.0));
        ws
    }

    pub fn scaled(&self, factor: Complex64) -> WaveletSum {
        let mut out = WaveletSum::new(self.ctx);
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), c * factor);
        }
        out
    }

    pub fn plus(&self, other: &WaveletSum) -> WaveletSum {
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), *c);
        }
        out
    }

    /// Pointwise value, compensated summation over the stored terms.
    pub fn eval(&self, x: &PAdicRational) -> Complex64 {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for (idx, c) in &self.terms {
            let v = c * eval_wavelet(self.ctx, idx, x);
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value(), im.value())
    }

    /// Coefficient-space inner product (f, g) = sum f_i conj(g_i); equals the
    /// L2 pairing by orthonormality of the basis.
    pub fn coeff_inner_product(&self, other: &WaveletSum) -> Complex64 {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for (idx, c) in &self.terms {
            if let Some(d) = other.terms.get(idx) {
                let v = c * d.conj();
                re.add(v.re);
                im.add(v.im);
            }
        }
        Complex64::new(re.value(), im.value())
    }

    pub fn norm_sq(&self) -> f64 {
        let mut acc = KahanSum::new();
        for c in self.terms.values() {
            acc.add(c.norm_sqr());
        }
        acc.value()
    }

    /// Bridge to the quadrature oracle: each wavelet becomes one modulated
    /// indicator with modulation p^{N-1} j, center p^{-N} eps, radius p^N.
    pub fn to_step_function(&self) -> StepFunction {
        let mut f = StepFunction::new(self.ctx);
        for (idx, c) in &self.terms {
            let amp = self.ctx.prime_f64().powf(-(idx.scale as f64) / 2.0);
            f.push(ModulatedIndicator {
                coeff: c * amp,
                modulation: PAdicRational::from_integer(idx.freq as i64, self.ctx)
                    .scale_by_p_pow(idx.scale - 1),
                center: idx.support_center(self.ctx),
                radius_exp: idx.scale,
            });
        }
        f
    }

    /// Diagonal action of the fractional operator: the coefficient at scale N
    /// picks up the factor p^{alpha (1 - N)}.
    pub fn apply_dalpha(&self, alpha: f64) -> Result<WaveletSum> {
        if alpha <= 0.0 {
            return Err(Error::AlphaOutOfRange { alpha, min: 0.0 });
        }
        let mut out = WaveletSum::new(self.ctx);
        for (idx, c) in &self.terms {
            let factor = idx.dalpha_eigenvalue(self.ctx, alpha);
            out.add_term(idx.clone(), c * factor);
        }
        Ok(out)
    }

    /// Unitary dilation U f(x) = p^{-1/2} f(p x): the index map N -> N + 1
    /// with coefficients unchanged.
    pub fn dilate(&self) -> WaveletSum {
        let mut out = WaveletSum::new(self.ctx);
        for (idx, c) in &self.terms {
            out.add_term(
                WaveletIndex {
                    scale: idx.scale + 1,
                    freq: idx.freq,
                    coset: idx.coset.clone(),
                },
                *c,
            );
        }
        out
    }
}

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Truncation of the delta expansion at x_k to the scale window:
/// delta_{x_k} = sum_N sum_j p^{-N/2} chi(-p^{N-1} j x_k) psi_{N j {p^N x_k}}.
pub fn delta_coefficients(x_k: &PAdicRational, n_range: (i64, i64)) -> Result<WaveletSum> {
    let (n_min, n_max) = n_range;
    if n_min > n_max {
        return Err(Error::EmptyWindow);
    }
    let ctx = x_k.context();
    let p = ctx.prime();
    let mut out = WaveletSum::new(ctx);
    for n in n_min..=n_max {
        let eps = x_k.coset_rep(n);
        let amp = ctx.prime_f64().powf(-(n as f64) / 2.0);
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
                amp * phase,
            );
        }
    }
    Ok(out)
}

/// The combination psi~_{N j 0} = (j/(j+1))^{1/2} [psi_{N (j+1) 0} minus
/// (1/j) sum_{i<=j} psi_{N i 0}], j in 1..p-2. For fixed N the family is
/// orthonormal and vanishes at the origin.
pub fn modified_wavelet(ctx: PrimeContext, scale: i64, j: u32) -> Result<WaveletSum> {
    let p = ctx.prime();
    if p < 3 {
        return Err(Error::PrimeTooSmall);
    }
    let max = (p - 2) as u32;
    if j < 1 || j > max {
        return Err(Error::FrequencyOutOfRange { j, max });
    }
    let norm = ((j as f64) / (j as f64 + 1.0)).sqrt();
    let mut out = WaveletSum::new(ctx);
    out.add_term(
        WaveletIndex {
            scale,
            freq: j + 1,
            coset: CosetEpsilon::zero(),
        },
        Complex64::new(norm, 0.0),
    );
    for i in 1..=j {
        out.add_term(
            WaveletIndex {
                scale,
                freq: i,
                coset: CosetEpsilon::zero(),
            },
            Complex64::new(-norm / j as f64, 0.0),
        );
    }
    Ok(out)
}

/// JSON form of one wavelet term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveletTermJson {
    #[serde(rename = "N")]
    pub scale: i64,
    pub j: u32,
    pub eps_digits: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

impl WaveletSum {
    pub fn to_json_terms(&self) -> Vec<WaveletTermJson> {
        self.terms
            .iter()
            .map(|(idx, c)| WaveletTermJson {
                scale: idx.scale,
                j: idx.freq,
                eps_digits: idx.coset.digits().to_vec(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    pub fn from_json_terms(ctx: PrimeContext, terms: &[WaveletTermJson]) -> Result<WaveletSum> {
        let mut out = WaveletSum::new(ctx);
        for t in terms {
            let coset = CosetEpsilon::from_digits(t.eps_digits.clone(), ctx)?;
            let idx = WaveletIndex::new(ctx, t.scale, t.j, coset)?;
            out.add_term(idx, Complex64::new(t.re, t.im));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar;
    use proptest::prelude::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn q(num: i64, den: i64, c: PrimeContext) -> PAdicRational {
        PAdicRational::from_ratio(num, den, c).unwrap()
    }

    fn widx(c: PrimeContext, n: i64, j: u32, digits: &[u32]) -> WaveletIndex {
        WaveletIndex::new(
            c,
            n,
            j,
            CosetEpsilon::from_digits(digits.to_vec(), c).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn eval_at_origin_and_off_support() {
        let c = ctx(3);
        for n in -2i64..=2 {
            let idx = widx(c, n, 1, &[]);
            let v = eval_wavelet(c, &idx, &q(0, 1, c));
            assert!((v.re - 3f64.powf(-(n as f64) / 2.0)).abs() < 1e-14);
            assert!(v.im.abs() < 1e-15);
        }
        // |p^N x - eps|_p > 1 means zero
        let idx = widx(c, 0, 1, &[1]);
        assert_eq!(eval_wavelet(c, &idx, &q(0, 1, c)).norm(), 0.0);
    }

    #[test]
    fn conjugate_point_value_formula() {
        // conj(psi(x_k)) = p^{-N/2} chi(-p^{N-1} j x_k) iff eps = {p^N x_k}_p
        let c = ctx(3);
        let x_k = q(5, 6, c);
        for n in -2i64..=2 {
            for j in 1..=2u32 {
                let eps_match = x_k.coset_rep(n);
                let idx = WaveletIndex::new(c, n, j, eps_match.clone()).unwrap();
                let lhs = eval_wavelet(c, &idx, &x_k).conj();
                let amp = 3f64.powf(-(n as f64) / 2.0);
                let rhs = amp
                    * x_k
                        .scale_by_p_pow(n - 1)
                        .mul(&PAdicRational::from_integer(-(j as i64), c))
                        .character();
                assert!((lhs - rhs).norm() < 1e-13);

                // any other eps gives zero
                let other = if eps_match.is_zero() {
                    CosetEpsilon::from_digits(vec![1], c).unwrap()
                } else {
                    CosetEpsilon::zero()
                };
                let idx2 = WaveletIndex::new(c, n, j, other).unwrap();
                assert_eq!(eval_wavelet(c, &idx2, &x_k).norm(), 0.0);
            }
        }
    }

    #[test]
    fn wavelets_have_mean_zero() {
        let c = ctx(3);
        for (n, j, digits) in [(0i64, 1u32, vec![]), (2, 2, vec![1]), (-1, 1, vec![2, 1])] {
            let idx =
                WaveletIndex::new(c, n, j, CosetEpsilon::from_digits(digits, c).unwrap()).unwrap();
            let f = WaveletSum::single(c, idx).to_step_function();
            assert!(haar::integrate(&f).norm() < 1e-13);
        }
    }

    #[test]
    fn orthonormal_family_via_exact_quadrature() {
        let c = ctx(3);
        let family = [
            widx(c, 0, 1, &[]),
            widx(c, 0, 2, &[]),
            widx(c, 1, 1, &[]),
            widx(c, -1, 2, &[1]),
            widx(c, 2, 1, &[2]),
            widx(c, 2, 1, &[1, 2]),
            widx(c, -2, 2, &[]),
            widx(c, 1, 2, &[2, 1]),
        ];
        for (a, ia) in family.iter().enumerate() {
            for (b, ib) in family.iter().enumerate() {
                let fa = WaveletSum::single(c, ia.clone()).to_step_function();
                let fb = WaveletSum::single(c, ib.clone()).to_step_function();
                let ip = haar::inner_product(&fa, &fb).unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (ip - Complex64::new(expect, 0.0)).norm() < 1e-12,
                    "gram entry ({a},{b}) = {ip}"
                );
            }
        }
    }

    #[test]
    fn dalpha_factors() {
        let c = ctx(2);
        let idx1 = widx(c, 1, 1, &[]);
        let ws = WaveletSum::single(c, idx1.clone());
        let out = ws.apply_dalpha(2.0).unwrap();
        assert!((out.coefficient(&idx1).re - 1.0).abs() < 1e-15);

        let idx0 = widx(c, 0, 1, &[]);
        let ws = WaveletSum::single(c, idx0.clone());
        let out = ws.apply_dalpha(2.0).unwrap();
        assert!((out.coefficient(&idx0).re - 4.0).abs() < 1e-15);

        assert!(ws.apply_dalpha(0.0).is_err());
        assert!(ws.apply_dalpha(-1.0).is_err());
    }

    #[test]
    fn fourier_support_sits_on_the_eigen_sphere() {
        // the transform of psi_{N j eps} lives where |xi|_p = p^{1-N}
        let c = ctx(3);
        for (n, j, digits) in [(0i64, 1u32, vec![]), (1, 2, vec![2]), (-1, 1, vec![1, 1])] {
            let idx =
                WaveletIndex::new(c, n, j, CosetEpsilon::from_digits(digits, c).unwrap()).unwrap();
            let f = WaveletSum::single(c, idx).to_step_function();
            let ft = haar::fourier(&f);
            for term in ft.terms() {
                // every point of the ball B_{radius}(center) has the norm of
                // the center: radius < |center|
                let center_norm = term.center.norm();
                assert!((center_norm - 3f64.powi((1 - n) as i32)).abs() < 1e-12);
                assert!(
                    3f64.powi(term.radius_exp as i32) < center_norm,
                    "ball must stay inside the sphere"
                );
            }
        }
    }

    #[test]
    fn delta_pairing_reproduces_point_values() {
        let c = ctx(2);
        let x_k = q(3, 8, c);
        let delta = delta_coefficients(&x_k, (-4, 4)).unwrap();
        // pairing with any single wavelet inside the window gives conj-eval
        for (n, j, eps) in [(0i64, 1u32, x_k.coset_rep(0)), (2, 1, x_k.coset_rep(2))] {
            let idx = WaveletIndex::new(c, n, j, eps).unwrap();
            let psi = WaveletSum::single(c, idx.clone());
            let pairing = psi.coeff_inner_product(&delta);
            let value = eval_wavelet(c, &idx, &x_k);
            assert!((pairing - value).norm() < 1e-13);
        }
        // x_k = 0 keeps every coset at zero
        let delta0 = delta_coefficients(&q(0, 1, c), (-3, 3)).unwrap();
        for (idx, _) in delta0.terms() {
            assert!(idx.coset.is_zero());
        }
        assert!(delta_coefficients(&x_k, (2, 1)).is_err());
    }

    #[test]
    fn delta_pairing_on_random_window_functions() {
        let c = ctx(3);
        let x_k = q(4, 9, c);
        let delta = delta_coefficients(&x_k, (-5, 5)).unwrap();
        // u built from wavelets inside the window: pairing = u(x_k)
        let mut u = WaveletSum::new(c);
        u.add_term(widx(c, -1, 2, &[]), Complex64::new(0.7, -0.3));
        u.add_term(widx(c, 2, 1, &[2, 2]), Complex64::new(-1.1, 0.25));
        u.add_term(
            WaveletIndex::new(c, 3, 1, x_k.coset_rep(3)).unwrap(),
            Complex64::new(0.4, 1.9),
        );
        let pairing = u.coeff_inner_product(&delta);
        let direct = u.eval(&x_k);
        assert!((pairing - direct).norm() < 1e-12);
    }

    #[test]
    fn dilation_matches_pointwise_rescaling() {
        let c = ctx(3);
        let mut ws = WaveletSum::new(c);
        ws.add_term(widx(c, 0, 1, &[]), Complex64::new(1.0, 0.5));
        ws.add_term(widx(c, 1, 2, &[1]), Complex64::new(-0.25, 0.0));
        let dilated = ws.dilate();
        for (num, den) in [(0i64, 1i64), (1, 3), (5, 9), (7, 2), (-4, 27)] {
            let x = q(num, den, c);
            let lhs = dilated.eval(&x);
            let rhs = ws.eval(&x.scale_by_p_pow(1)) / 3f64.sqrt();
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn dilation_commutation_with_dalpha() {
        // D^alpha U = p^{-alpha} U D^alpha on sums
        let c = ctx(2);
        let alpha = 1.7;
        let mut ws = WaveletSum::new(c);
        ws.add_term(widx(c, -1, 1, &[]), Complex64::new(0.3, 0.4));
        ws.add_term(widx(c, 2, 1, &[1]), Complex64::new(1.2, -0.1));
        let lhs = ws.dilate().apply_dalpha(alpha).unwrap();
        let rhs = ws
            .apply_dalpha(alpha)
            .unwrap()
            .dilate()
            .scaled(Complex64::new(2f64.powf(-alpha), 0.0));
        for (idx, cval) in lhs.terms() {
            assert!((cval - rhs.coefficient(idx)).norm() < 1e-13 * (1.0 + cval.norm()));
        }
        assert_eq!(lhs.len(), rhs.len());
    }

    #[test]
    fn modified_wavelets_p3() {
        let c = ctx(3);
        let w = modified_wavelet(c, 0, 1).unwrap();
        // (1/2)^{1/2} [psi_{020} - psi_{010}]
        let s = 0.5f64.sqrt();
        assert!((w.coefficient(&widx(c, 0, 2, &[])).re - s).abs() < 1e-15);
        assert!((w.coefficient(&widx(c, 0, 1, &[])).re + s).abs() < 1e-15);
        assert!(w.eval(&q(0, 1, c)).norm() < 1e-15);
        assert!(modified_wavelet(c, 0, 2).is_err());
        assert!(modified_wavelet(ctx(2), 0, 1).is_err());
    }

    #[test]
    fn modified_wavelet_gram_is_identity() {
        let c = ctx(7);
        let family: Vec<WaveletSum> = (1..=5u32)
            .map(|j| modified_wavelet(c, 2, j).unwrap())
            .collect();
        for (a, wa) in family.iter().enumerate() {
            for (b, wb) in family.iter().enumerate() {
                let ip =
                    haar::inner_product(&wa.to_step_function(), &wb.to_step_function()).unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-12);
                // and all vanish at the origin
                assert!(wa.eval(&q(0, 1, c)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let c = ctx(3);
        let mut ws = WaveletSum::new(c);
        ws.add_term(widx(c, -2, 1, &[2, 1]), Complex64::new(0.5, -1.5));
        ws.add_term(widx(c, 4, 2, &[]), Complex64::new(-2.0, 0.0));
        let json = serde_json::to_string(&ws.to_json_terms()).unwrap();
        let parsed: Vec<WaveletTermJson> = serde_json::from_str(&json).unwrap();
        let back = WaveletSum::from_json_terms(c, &parsed).unwrap();
        assert_eq!(back.len(), ws.len());
        for (idx, cv) in ws.terms() {
            assert_eq!(back.coefficient(idx), *cv);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn dilation_preserves_inner_products(
            n1 in -3i64..3, j1 in 1u32..3, n2 in -3i64..3, j2 in 1u32..3,
            re1 in -2.0f64..2.0, im1 in -2.0f64..2.0,
            re2 in -2.0f64..2.0, im2 in -2.0f64..2.0)
        {
            let c = ctx(3);
            let mut f = WaveletSum::new(c);
            f.add_term(widx(c, n1, j1, &[]), Complex64::new(re1, im1));
            f.add_term(widx(c, n2, j2, &[1]), Complex64::new(re2, im2));
            let mut g = WaveletSum::new(c);
            g.add_term(widx(c, n2, j1, &[]), Complex64::new(re2, im1));
            g.add_term(widx(c, n1, j2, &[2]), Complex64::new(re1, im2));
            let before = f.coeff_inner_product(&g);
            let after = f.dilate().coeff_inner_product(&g.dilate());
            prop_assert!((before - after).norm() < 1e-13);
        }

        #[test]
        fn coefficient_and_quadrature_inner_products_agree(
            n1 in -2i64..3, j1 in 1u32..3,
            n2 in -2i64..3, j2 in 1u32..3,
            re in -2.0f64..2.0, im in -2.0f64..2.0)
        {
            let c = ctx(3);
            let mut f = WaveletSum::new(c);
            f.add_term(widx(c, n1, j1, &[]), Complex64::new(re, im));
            f.add_term(widx(c, n2, j2, &[1]), Complex64::new(im, -re));
            let coeff = f.coeff_inner_product(&f);
            let quad = haar::inner_product(&f.to_step_function(), &f.to_step_function()).unwrap();
            prop_assert!((coeff - quad).norm() < 1e-11 * (1.0 + coeff.norm()));
        }
    }
}
