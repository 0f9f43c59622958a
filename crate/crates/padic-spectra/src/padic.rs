//! Exact arithmetic on Q_p elements represented as rational numbers with a
//! fixed prime context: valuation, norm, fractional part, additive character,
//! ultrametric distances, and coset representatives.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A validated prime, shared by every value of the field it generates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeContext { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn prime_f64(&self) -> f64 {
        self.p as f64
    }
}

/// Deterministic Miller-Rabin over the witness set that is exact for u64.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// p-adic valuation of a value: the exponent of p in its canonical
/// factorization. `Infinite` encodes the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(g) => Some(g),
            Valuation::Infinite => None,
        }
    }
}

/// An element of Q_p stored as an exact rational together with its prime
/// context. Rationals with denominators divisible by p are allowed; they
/// simply have negative valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicRational {
    value: BigRational,
    ctx: PrimeContext,
}

impl PAdicRational {
    pub fn new(value: BigRational, ctx: PrimeContext) -> Self {
        PAdicRational { value, ctx }
    }

    pub fn from_integer(n: i64, ctx: PrimeContext) -> Self {
        PAdicRational::new(BigRational::from_integer(BigInt::from(n)), ctx)
    }

    pub fn from_ratio(num: i64, den: i64, ctx: PrimeContext) -> Result<Self> {
        if den == 0 {
            return Err(Error::ParseRational(format!("{num}/{den}")));
        }
        Ok(PAdicRational::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            ctx,
        ))
    }

    /// Parses "a/b" or a plain integer literal.
    pub fn parse(text: &str, ctx: PrimeContext) -> Result<Self> {
        let s = text.trim();
        let bad = || Error::ParseRational(s.to_string());
        if let Some((a, b)) = s.split_once('/') {
            let num = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(PAdicRational::new(BigRational::new(num, den), ctx))
        } else {
            let num = BigInt::from_str(s).map_err(|_| bad())?;
            Ok(PAdicRational::new(BigRational::from_integer(num), ctx))
        }
    }

    pub fn context(&self) -> PrimeContext {
        self.ctx
    }

    pub fn rational(&self) -> &BigRational {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn require_same_context(&self, other: &Self) -> Result<()> {
        if self.ctx.p == other.ctx.p {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.ctx.p,
                right: other.ctx.p,
            })
        }
    }

    /// The unique gamma with x = p^gamma * (m/n), p dividing neither m nor n.
    pub fn valuation(&self) -> Valuation {
        if self.value.is_zero() {
            return Valuation::Infinite;
        }
        let p = BigInt::from(self.ctx.p);
        let vn = int_valuation(self.value.numer(), &p);
        let vd = int_valuation(self.value.denom(), &p);
        Valuation::Finite(vn - vd)
    }

    /// |x|_p = p^{-gamma}; zero maps to 0.
    pub fn norm(&self) -> f64 {
        match self.valuation() {
            Valuation::Infinite => 0.0,
            Valuation::Finite(g) => self.ctx.prime_f64().powi(-g as i32),
        }
    }

    /// The fractional part {x}_p in [0, 1): zero when the valuation is
    /// nonnegative, otherwise a / p^k with k = -gamma and a the unique
    /// residue of x modulo p^k.
    pub fn fractional_part(&self) -> BigRational {
        let gamma = match self.valuation() {
            Valuation::Infinite => return BigRational::zero(),
            Valuation::Finite(g) => g,
        };
        if gamma >= 0 {
            return BigRational::zero();
        }
        let k = (-gamma) as u32;
        let p = BigInt::from(self.ctx.p);
        let pk = p.pow(k);
        // x = u / (v p^k) with p dividing neither u nor v.
        let u = self.value.numer().clone();
        let v = self.value.denom() / &pk;
        let v_inv = mod_inverse(&v, &pk);
        let a = ((&u % &pk) * v_inv).mod_floor(&pk);
        BigRational::new(a, pk)
    }

    /// chi_p(x) = exp(2 pi i {x}_p). The fractional part is exact; the final
    /// complex exponential is the only floating step.
    pub fn character(&self) -> Complex64 {
        let frac = self.fractional_part();
        let phase = frac.to_f64().unwrap_or(0.0);
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
    }

    /// The exponent gamma with |x - y|_p = p^gamma, or None when x = y.
    pub fn distance_exponent(&self, other: &Self) -> Result<Option<i64>> {
        self.require_same_context(other)?;
        let diff = self.sub(other);
        Ok(diff.valuation().finite().map(|g| -g))
    }

    /// Canonical digits of {p^N x}_p, empty when p^N x lies in Z_p.
    pub fn coset_rep(&self, scale: i64) -> CosetEpsilon {
        let scaled = self.scale_by_p_pow(scale);
        let frac = scaled.fractional_part();
        CosetEpsilon::from_fraction(&frac, self.ctx)
    }

    /// x * p^e.
    pub fn scale_by_p_pow(&self, e: i64) -> Self {
        let p = BigInt::from(self.ctx.p);
        let factor = if e >= 0 {
            BigRational::from_integer(p.pow(e as u32))
        } else {
            BigRational::new(BigInt::one(), p.pow((-e) as u32))
        };
        PAdicRational::new(&self.value * factor, self.ctx)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ctx.p, other.ctx.p, "prime context mismatch");
        PAdicRational::new(&self.value + &other.value, self.ctx)
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ctx.p, other.ctx.p, "prime context mismatch");
        PAdicRational::new(&self.value - &other.value, self.ctx)
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ctx.p, other.ctx.p, "prime context mismatch");
        PAdicRational::new(&self.value * &other.value, self.ctx)
    }

    pub fn neg(&self) -> Self {
        PAdicRational::new(-self.value.clone(), self.ctx)
    }

    /// First `count` digits of the canonical presentation
    /// x = p^gamma (x_0 + x_1 p + x_2 p^2 + ...), for display and debugging.
    /// Returns (gamma, digits); zero yields (0, []).
    pub fn canonical_digits(&self, count: usize) -> (i64, Vec<u32>) {
        let gamma = match self.valuation() {
            Valuation::Infinite => return (0, Vec::new()),
            Valuation::Finite(g) => g,
        };
        // unit = x / p^gamma has valuation 0; extract digits by repeated
        // residue-and-shift.
        let mut unit = self.scale_by_p_pow(-gamma).value;
        let p = BigInt::from(self.ctx.p);
        let mut digits = Vec::with_capacity(count);
        for _ in 0..count {
            let u = unit.numer().clone();
            let v = unit.denom().clone();
            let v_inv = mod_inverse(&v, &p);
            let d = ((&u % &p) * v_inv).mod_floor(&p);
            let digit = d.to_u32().unwrap_or(0);
            digits.push(digit);
            unit = (unit - BigRational::from_integer(d)) / BigRational::from_integer(p.clone());
        }
        (gamma, digits)
    }
}

impl fmt::Display for PAdicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.denom().is_one() {
            write!(f, "{}", self.value.numer())
        } else {
            write!(f, "{}/{}", self.value.numer(), self.value.denom())
        }
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut v = 0i64;
    let mut m = n.abs();
    loop {
        let (q, r) = m.div_rem(p);
        if r.is_zero() {
            v += 1;
            m = q;
        } else {
            return v;
        }
    }
}

/// Inverse of a modulo m for gcd(a, m) = 1, via the extended Euclid identity.
fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "mod_inverse of non-unit");
    e.x.mod_floor(m)
}

/// A coset representative of Q_p/Z_p: the finite digit list (e_1, ..., e_m)
/// of eps = sum e_i p^{-i}, canonical in the sense that the last digit is
/// nonzero. The empty list is eps = 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetEpsilon {
    digits: Vec<u32>,
}

impl CosetEpsilon {
    pub fn zero() -> Self {
        CosetEpsilon { digits: Vec::new() }
    }

    pub fn from_digits(digits: Vec<u32>, ctx: PrimeContext) -> Result<Self> {
        let p = ctx.prime() as u32;
        if digits.iter().any(|&d| d >= p) {
            return Err(Error::InvalidParameter(format!(
                "coset digit out of range for p = {}",
                ctx.prime()
            )));
        }
        if let Some(&last) = digits.last() {
            if last == 0 {
                return Err(Error::InvalidParameter(
                    "coset digits carry a trailing zero".into(),
                ));
            }
        }
        Ok(CosetEpsilon { digits })
    }

    /// Digits of a fraction a/p^k in [0, 1) with gcd(a, p) = 1 unless a = 0.
    fn from_fraction(frac: &BigRational, ctx: PrimeContext) -> Self {
        if frac.is_zero() {
            return CosetEpsilon::zero();
        }
        let p = BigInt::from(ctx.prime());
        let mut k = 0u32;
        let mut den = frac.denom().clone();
        while !den.is_one() {
            den /= &p;
            k += 1;
        }
        let mut a = frac.numer().clone();
        // base-p digits of a, least significant first: a = sum d_t p^t, so
        // eps_i = d_{k-i}.
        let mut lsb = Vec::with_capacity(k as usize);
        for _ in 0..k {
            let (q, r) = a.div_rem(&p);
            lsb.push(r.to_u32().unwrap_or(0));
            a = q;
        }
        let digits: Vec<u32> = lsb.into_iter().rev().collect();
        debug_assert!(digits.last().map(|&d| d != 0).unwrap_or(true));
        CosetEpsilon { digits }
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// eps as the exact rational sum e_i p^{-i}.
    pub fn as_rational(&self, ctx: PrimeContext) -> BigRational {
        let p = BigInt::from(ctx.prime());
        let k = self.digits.len() as u32;
        if k == 0 {
            return BigRational::zero();
        }
        let mut acc = BigInt::zero();
        for &d in &self.digits {
            acc = acc * &p + BigInt::from(d);
        }
        BigRational::new(acc, p.pow(k))
    }

    pub fn as_padic(&self, ctx: PrimeContext) -> PAdicRational {
        PAdicRational::new(self.as_rational(ctx), ctx)
    }
}

impl fmt::Display for CosetEpsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            write!(f, "0")
        } else {
            let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}
