//! Built-in invariant battery behind the `selftest` subcommand: a compact,
//! deterministic sweep of the identities the library is built on. Each check
//! reports pass/fail with a short detail line; the CLI exits nonzero if any
//! check fails.

use num_complex::Complex64;

use crate::green;
use crate::haar;
use crate::mseries::MSeries;
use crate::padic::{PAdicRational, PrimeContext};
use crate::wavelet::{self, WaveletIndex, WaveletSum};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Deterministic 64-bit mix for reproducible pseudo-random inputs.
struct Mix(u64);

impl Mix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next() % (hi - lo + 1) as u64) as i64
    }

    fn rational(&mut self, ctx: PrimeContext) -> PAdicRational {
        let num = self.int(-2000, 2000);
        let den = self.int(1, 2000);
        PAdicRational::from_ratio(num, den, ctx).expect("den > 0")
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail,
    }
}

fn ultrametric_axioms() -> CheckOutcome {
    let mut rng = Mix(11);
    let mut worst = 0.0f64;
    for p in [2u64, 3, 5] {
        let ctx = PrimeContext::new(p).unwrap();
        for _ in 0..400 {
            let x = rng.rational(ctx);
            let y = rng.rational(ctx);
            let prod_gap =
                (x.mul(&y).norm() - x.norm() * y.norm()).abs() / (1.0 + x.norm() * y.norm());
            worst = worst.max(prod_gap);
            let m = x.norm().max(y.norm());
            let sum = x.add(&y).norm();
            if sum > m * (1.0 + 1e-12) {
                return check(
                    "ultrametric-axioms",
                    false,
                    format!("triangle fails at p={p}"),
                );
            }
            if (x.norm() - y.norm()).abs() > 1e-12 * (1.0 + m)
                && (sum - m).abs() > 1e-12 * (1.0 + m)
            {
                return check(
                    "ultrametric-axioms",
                    false,
                    format!("strictness fails at p={p}"),
                );
            }
        }
    }
    check(
        "ultrametric-axioms",
        worst < 1e-12,
        format!("worst relative defect {worst:.2e}"),
    )
}

fn character_homomorphism() -> CheckOutcome {
    let mut rng = Mix(23);
    let mut worst = 0.0f64;
    for p in [2u64, 3, 5] {
        let ctx = PrimeContext::new(p).unwrap();
        for _ in 0..300 {
            let x = rng.rational(ctx);
            let y = rng.rational(ctx);
            let gap = (x.add(&y).character() - x.character() * y.character()).norm();
            worst = worst.max(gap);
        }
    }
    check(
        "character-homomorphism",
        worst < 1e-12,
        format!("worst defect {worst:.2e}"),
    )
}

fn wavelet_orthonormality() -> CheckOutcome {
    let mut rng = Mix(37);
    let ctx = PrimeContext::new(3).unwrap();
    let mut family = Vec::new();
    while family.len() < 12 {
        let scale = rng.int(-4, 4);
        let freq = rng.int(1, 2) as u32;
        let digits: Vec<u32> = (0..rng.int(0, 3)).map(|_| rng.int(0, 2) as u32).collect();
        let digits = match digits.split_last() {
            Some((0, rest)) => rest.to_vec(),
            _ => digits,
        };
        let coset = match crate::padic::CosetEpsilon::from_digits(digits, ctx) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let idx = WaveletIndex::new(ctx, scale, freq, coset).unwrap();
        if !family.contains(&idx) {
            family.push(idx);
        }
    }
    let mut worst = 0.0f64;
    for (a, ia) in family.iter().enumerate() {
        for (b, ib) in family.iter().enumerate() {
            let fa = WaveletSum::single(ctx, ia.clone()).to_step_function();
            let fb = WaveletSum::single(ctx, ib.clone()).to_step_function();
            let ip = haar::inner_product(&fa, &fb).unwrap();
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((ip - Complex64::new(expect, 0.0)).norm());
        }
    }
    check(
        "wavelet-orthonormality",
        worst < 1e-12,
        format!("gram defect {worst:.2e} over {} wavelets", family.len()),
    )
}

fn fourier_eigen_sphere() -> CheckOutcome {
    let ctx = PrimeContext::new(2).unwrap();
    for scale in [-2i64, 0, 3] {
        let idx = WaveletIndex::new(ctx, scale, 1, crate::padic::CosetEpsilon::zero()).unwrap();
        let ft = haar::fourier(&WaveletSum::single(ctx, idx).to_step_function());
        for term in ft.terms() {
            let sphere = 2f64.powi((1 - scale) as i32);
            if (term.center.norm() - sphere).abs() > 1e-12 * sphere {
                return check(
                    "fourier-eigen-sphere",
                    false,
                    format!("support escapes the sphere at scale {scale}"),
                );
            }
            if 2f64.powi(term.radius_exp as i32) >= sphere {
                return check(
                    "fourier-eigen-sphere",
                    false,
                    format!("ball radius too large at scale {scale}"),
                );
            }
        }
    }
    check("fourier-eigen-sphere", true, "supports confined".into())
}

fn scaling_identity() -> CheckOutcome {
    let series = MSeries::new(PrimeContext::new(2).unwrap(), 2.0).unwrap();
    let factor = 2f64.powf(1.0);
    let mut worst = 0.0f64;
    for k in 0..40 {
        let lambda = Complex64::new(-0.01 * 1.6f64.powi(k), 0.0);
        let lhs = series.m0(lambda * 4.0, 1e-12).unwrap();
        let rhs = series.m0(lambda, 1e-12).unwrap();
        let gap = (factor * lhs.value - rhs.value).norm();
        let bound = factor * lhs.error_bound + rhs.error_bound + 1e-12;
        if gap > 2.0 * bound {
            return check(
                "m0-scaling-identity",
                false,
                format!("defect {gap:.2e} above bound {bound:.2e} at {lambda}"),
            );
        }
        worst = worst.max(gap);
    }
    check(
        "m0-scaling-identity",
        true,
        format!("worst defect {worst:.2e}"),
    )
}

fn green_radial_consistency() -> CheckOutcome {
    let ctx = PrimeContext::new(3).unwrap();
    let alpha = 1.5;
    let series = MSeries::new(ctx, alpha).unwrap();
    let x_k = PAdicRational::from_ratio(1, 3, ctx).unwrap();
    let lambda = Complex64::new(-0.8, 0.0);
    let window = green::default_window(ctx, alpha, lambda, 1e-9);
    let (h, tail) = green::h_coefficients(ctx, alpha, &x_k, lambda, window).unwrap();
    let mut worst = 0.0f64;
    for (num, den) in [(0i64, 1i64), (1, 1), (2, 9), (5, 27)] {
        let x = PAdicRational::from_ratio(num, den, ctx).unwrap();
        let series_val = h.eval(&x);
        let radial = green::eval_h(&series, &x_k, lambda, &x, 1e-12).unwrap();
        let gap = (series_val - radial).norm();
        if gap > tail.sup + 1e-9 {
            return check(
                "green-radial-consistency",
                false,
                format!("gap {gap:.2e} above sup tail {:.2e}", tail.sup),
            );
        }
        worst = worst.max(gap);
    }
    // norm identity
    let target = green::h_norm_sq(&series, lambda, 1e-12).unwrap();
    let gap = (target.real() - h.norm_sq()).abs();
    let ok = gap <= tail.l2 * tail.l2 + target.error_bound + 1e-9;
    check(
        "green-radial-consistency",
        ok,
        format!("pointwise worst {worst:.2e}, norm gap {gap:.2e}"),
    )
}

fn sphere_sum() -> CheckOutcome {
    let mut rng = Mix(53);
    for p in [2u64, 3, 5, 7] {
        let ctx = PrimeContext::new(p).unwrap();
        for _ in 0..50 {
            let x_k = rng.rational(ctx);
            let gamma = rng.int(-3, 3);
            let unit_num = loop {
                let u = rng.int(1, 50);
                if u % p as i64 != 0 {
                    break u;
                }
            };
            let unit_den = loop {
                let u = rng.int(1, 50);
                if u % p as i64 != 0 {
                    break u;
                }
            };
            let offset = PAdicRational::from_ratio(unit_num, unit_den, ctx)
                .unwrap()
                .scale_by_p_pow(-gamma);
            let x = x_k.add(&offset);
            let v = green::character_sphere_sum(&x, &x_k).unwrap();
            if (v - Complex64::new(-1.0, 0.0)).norm() > 1e-12 {
                return check("character-sphere-sum", false, format!("value {v} at p={p}"));
            }
        }
    }
    check("character-sphere-sum", true, "all sums hit -1".into())
}

fn diff_series_value() -> CheckOutcome {
    // the one-sided difference series at lambda = 0, p = 2, alpha = 2,
    // gamma = 0 sums to exactly 3/4
    let series = MSeries::new(PrimeContext::new(2).unwrap(), 2.0).unwrap();
    let d = series.diff(0, Complex64::new(0.0, 0.0), 1e-12).unwrap();
    let gap = (d.real() - 0.75).abs();
    check(
        "difference-series-at-zero",
        gap <= d.error_bound + 1e-13,
        format!("value {} (expected 3/4)", d.real()),
    )
}

fn delta_pairing() -> CheckOutcome {
    let ctx = PrimeContext::new(2).unwrap();
    let x_k = PAdicRational::from_ratio(3, 8, ctx).unwrap();
    let delta = wavelet::delta_coefficients(&x_k, (-5, 5)).unwrap();
    let mut u = WaveletSum::new(ctx);
    u.add_term(
        WaveletIndex::new(ctx, 0, 1, x_k.coset_rep(0)).unwrap(),
        Complex64::new(0.3, -1.2),
    );
    u.add_term(
        WaveletIndex::new(ctx, -2, 1, crate::padic::CosetEpsilon::zero()).unwrap(),
        Complex64::new(1.7, 0.4),
    );
    let gap = (u.coeff_inner_product(&delta) - u.eval(&x_k)).norm();
    check(
        "delta-expansion-pairing",
        gap < 1e-12,
        format!("pairing defect {gap:.2e}"),
    )
}

/// Runs the full battery.
pub fn run() -> Vec<CheckOutcome> {
    vec![
        ultrametric_axioms(),
        character_homomorphism(),
        wavelet_orthonormality(),
        fourier_eigen_sphere(),
        scaling_identity(),
        green_radial_consistency(),
        sphere_sum(),
        diff_series_value(),
        delta_pairing(),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn battery_passes() {
        for outcome in super::run() {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }
}
