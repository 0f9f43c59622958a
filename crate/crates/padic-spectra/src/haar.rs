//! Exact integration against Haar measure of locally constant compactly
//! supported functions, the exact Fourier transform on modulated ball
//! indicators, and exact L2 inner products.
//!
//! A `ModulatedIndicator` is x -> coeff * chi_p(a x) * 1_{B_gamma(c)}(x).
//! The class is closed under pointwise products with characters, under
//! conjugated products (balls in Q_p are nested or disjoint), and under the
//! Fourier transform, so every operation here reduces to finitely many
//! closed-form ball integrals. The only floating step is the complex
//! exponential inside the character.

use num_complex::Complex64;

use crate::error::Result;
use crate::padic::{PAdicRational, PrimeContext, Valuation};

#[derive(Debug, Clone)]
pub struct ModulatedIndicator {
    pub coeff: Complex64,
    /// Modulation a of the character factor chi_p(a x).
    pub modulation: PAdicRational,
    /// Ball center c.
    pub center: PAdicRational,
    /// Ball radius exponent gamma: the ball is {x : |x - c|_p <= p^gamma}.
    pub radius_exp: i64,
}

impl ModulatedIndicator {
    pub fn ball(center: PAdicRational, radius_exp: i64) -> Self {
        let ctx = center.context();
        ModulatedIndicator {
            coeff: Complex64::new(1.0, 0.0),
            modulation: PAdicRational::from_integer(0, ctx),
            center,
            radius_exp,
        }
    }

    pub fn contains(&self, x: &PAdicRational) -> bool {
        match x.sub(&self.center).valuation() {
            Valuation::Infinite => true,
            Valuation::Finite(v) => -v <= self.radius_exp,
        }
    }

    pub fn eval(&self, x: &PAdicRational) -> Complex64 {
        if self.contains(x) {
            self.coeff * self.modulation.mul(x).character()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Closed-form Haar integral of the term:
    /// chi_p(a c) * p^gamma when |a|_p <= p^{-gamma}, otherwise 0.
    pub fn integrate(&self, ctx: PrimeContext) -> Complex64 {
        let p = ctx.prime_f64();
        let passes = match self.modulation.valuation() {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v >= self.radius_exp,
        };
        if !passes {
            return Complex64::new(0.0, 0.0);
        }
        let phase = self.modulation.mul(&self.center).character();
        self.coeff * phase * p.powi(self.radius_exp as i32)
    }

    /// Fourier image of the term, again a single modulated indicator:
    /// F[chi(a x) 1_{B_gamma(c)}](xi) = chi(a c) p^gamma chi(c xi)
    /// 1_{B_{-gamma}(-a)}(xi).
    pub fn fourier(&self, ctx: PrimeContext) -> ModulatedIndicator {
        let p = ctx.prime_f64();
        let phase = self.modulation.mul(&self.center).character();
        ModulatedIndicator {
            coeff: self.coeff * phase * p.powi(self.radius_exp as i32),
            modulation: self.center.clone(),
            center: self.modulation.neg(),
            radius_exp: -self.radius_exp,
        }
    }

    /// Pointwise product self * conj(other). Balls are nested or disjoint:
    /// the product is either a single term supported on the smaller ball or
    /// identically zero.
    pub fn mul_conj(&self, other: &ModulatedIndicator) -> Option<ModulatedIndicator> {
        let (small, large) = if self.radius_exp <= other.radius_exp {
            (self, other)
        } else {
            (other, self)
        };
        let gap = small.center.sub(&large.center);
        let intersects = match gap.valuation() {
            Valuation::Infinite => true,
            Valuation::Finite(v) => -v <= large.radius_exp,
        };
        if !intersects {
            return None;
        }
        Some(ModulatedIndicator {
            coeff: self.coeff * other.coeff.conj(),
            modulation: self.modulation.sub(&other.modulation),
            center: small.center.clone(),
            radius_exp: small.radius_exp,
        })
    }
}

/// A finite sum of modulated indicators: locally constant with compact
/// support, the desk-scale model of the p-adic test functions.
#[derive(Debug, Clone)]
pub struct StepFunction {
    ctx: PrimeContext,
    terms: Vec<ModulatedIndicator>,
}

impl StepFunction {
    pub fn new(ctx: PrimeContext) -> Self {
        StepFunction {
            ctx,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(ctx: PrimeContext, terms: Vec<ModulatedIndicator>) -> Self {
        StepFunction { ctx, terms }
    }

    pub fn context(&self) -> PrimeContext {
        self.ctx
    }

    pub fn terms(&self) -> &[ModulatedIndicator] {
        &self.terms
    }

    pub fn push(&mut self, term: ModulatedIndicator) {
        self.terms.push(term);
    }

    pub fn eval(&self, x: &PAdicRational) -> Complex64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn scale(&self, factor: Complex64) -> StepFunction {
        let terms = self
            .terms
            .iter()
            .map(|t| ModulatedIndicator {
                coeff: t.coeff * factor,
                ..t.clone()
            })
            .collect();
        StepFunction::from_terms(self.ctx, terms)
    }
}

/// Haar integral of f, term by term in closed form.
pub fn integrate(f: &StepFunction) -> Complex64 {
    f.terms.iter().map(|t| t.integrate(f.ctx)).sum()
}

/// Exact Fourier transform, F[f](xi) = integral of chi_p(xi x) f(x) dx,
/// returned in the same class.
pub fn fourier(f: &StepFunction) -> StepFunction {
    let terms = f.terms.iter().map(|t| t.fourier(f.ctx)).collect();
    StepFunction::from_terms(f.ctx, terms)
}

/// Exact L2 pairing (f, g) = integral of f conj(g).
pub fn inner_product(f: &StepFunction, g: &StepFunction) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for tf in &f.terms {
        for tg in &g.terms {
            if let Some(prod) = tf.mul_conj(tg) {
                acc += prod.integrate(f.ctx);
            }
        }
    }
    Ok(acc)
}
