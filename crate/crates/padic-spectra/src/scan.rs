//! Bracketed root scanning for real-valued spectral functions on the
//! intervals (p^{alpha N}, p^{alpha (N+1)}) between consecutive grid points
//! and on the negative semi-axis.
//!
//! Positive intervals are parameterized geometrically, lambda(s) =
//! p^{alpha (N + s)} for s in (0, 1); the base grid is uniform in s with
//! extra clusters packed toward both endpoints, where the series diverge.
//! The negative axis uses lambda = -e^t, t in [t_lo, t_hi]. All refinement
//! is plain bisection, so identical inputs scan identically.

use crate::error::{Error, Result};

/// Base number of geometric points per interval.
pub const BASE_POINTS: usize = 64;
/// Hard cap on evaluations per interval.
pub const MAX_EVALS_PER_INTERVAL: usize = 1 << 14;
/// Relative root refinement target.
pub const ROOT_REL_TOL: f64 = 1e-10;
/// Default parameter range for the negative-axis scan: |lambda| in
/// [e^{t_lo}, e^{t_hi}].
pub const NEG_AXIS_T_RANGE: (f64, f64) = (-40.0, 40.0);

/// Scale window plus the optional negative-axis leg.
#[derive(Debug, Clone, Copy)]
pub struct ScanWindow {
    pub n_lo: i64,
    pub n_hi: i64,
    pub negative_axis: bool,
}

impl ScanWindow {
    pub fn new(n_lo: i64, n_hi: i64) -> Self {
        ScanWindow {
            n_lo,
            n_hi,
            negative_axis: false,
        }
    }

    pub fn with_negative_axis(mut self) -> Self {
        self.negative_axis = true;
        self
    }

    pub fn intervals(&self) -> impl Iterator<Item = i64> {
        self.n_lo..=self.n_hi
    }
}

/// s-grid in (0, 1): uniform base points plus geometric clusters at both
/// endpoints down to s ~ 1e-8 (the series guard sits at relative 1e-9).
fn interval_parameter_grid() -> Vec<f64> {
    let mut s: Vec<f64> = (0..BASE_POINTS)
        .map(|i| (i as f64 + 0.5) / BASE_POINTS as f64)
        .collect();
    for k in 2..=8 {
        let d = 10f64.powi(-k);
        s.push(d);
        s.push(1.0 - d);
    }
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s.dedup();
    s
}

/// Roots of `f` strictly inside (p^{alpha n}, p^{alpha (n+1)}), located by
/// sign changes on the geometric grid and refined by bisection to relative
/// `ROOT_REL_TOL`. `f` may refuse (guard) near the endpoints; refused points
/// are skipped.
pub fn roots_in_interval<F>(p: f64, alpha: f64, n: i64, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let lambda_of = |s: f64| p.powf(alpha * (n as f64 + s));
    let grid = interval_parameter_grid();
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(grid.len());
    let mut evals = 0usize;
    for &s in &grid {
        if evals >= MAX_EVALS_PER_INTERVAL {
            break;
        }
        evals += 1;
        match f(lambda_of(s)) {
            Ok(v) if v.is_finite() => samples.push((s, v)),
            Ok(_) => {}
            Err(Error::GuardViolation(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let mut roots = Vec::new();
    for w in samples.windows(2) {
        let (s0, v0) = w[0];
        let (s1, v1) = w[1];
        if v0 == 0.0 {
            roots.push(lambda_of(s0));
            continue;
        }
        if v0 * v1 < 0.0 {
            let s_root = bisect_parameter(&mut f, &lambda_of, s0, v0, s1, alpha, &mut evals)?;
            roots.push(lambda_of(s_root));
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < ROOT_REL_TOL * a.abs());
    Ok(roots)
}

fn bisect_parameter<F, L>(
    f: &mut F,
    lambda_of: &L,
    mut lo: f64,
    mut flo: f64,
    mut hi: f64,
    alpha: f64,
    evals: &mut usize,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
    L: Fn(f64) -> f64,
{
    // ds * alpha * ln p bounds the relative lambda error of the bracket
    let target = ROOT_REL_TOL / (alpha * 10.0);
    while hi - lo > target && *evals < MAX_EVALS_PER_INTERVAL {
        *evals += 1;
        let mid = 0.5 * (lo + hi);
        let v = match f(lambda_of(mid)) {
            Ok(v) => v,
            Err(Error::GuardViolation(_)) => {
                // nudge the midpoint instead of abandoning the bracket
                let mid2 = lo + 0.49 * (hi - lo);
                f(lambda_of(mid2))?
            }
            Err(e) => return Err(e),
        };
        if v == 0.0 {
            return Ok(mid);
        }
        if flo * v < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = v;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Roots of `f` on the negative axis, lambda = -e^t for t in the given
/// range, uniform scan plus bisection in t.
pub fn roots_on_negative_axis<F>(t_range: (f64, f64), points: usize, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (t_lo, t_hi) = t_range;
    let lambda_of = |t: f64| -t.exp();
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(points);
    for i in 0..points {
        let t = t_lo + (t_hi - t_lo) * i as f64 / (points - 1) as f64;
        match f(lambda_of(t)) {
            Ok(v) if v.is_finite() => samples.push((t, v)),
            Ok(_) => {}
            Err(Error::GuardViolation(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let mut roots = Vec::new();
    for w in samples.windows(2) {
        let (t0, v0) = w[0];
        let (t1, v1) = w[1];
        if v0 == 0.0 {
            roots.push(lambda_of(t0));
            continue;
        }
        if v0 * v1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (t0, t1, v0);
            while hi - lo > ROOT_REL_TOL {
                let mid = 0.5 * (lo + hi);
                let v = f(lambda_of(mid))?;
                if v == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * v < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = v;
                }
            }
            roots.push(lambda_of(0.5 * (lo + hi)));
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < ROOT_REL_TOL * a.abs().max(1e-300));
    Ok(roots)
}

/// Runs per-interval jobs, optionally in parallel, and merges results in
/// interval order. Thread count is capped by the PADIC_SPECTRA_THREADS
/// environment variable.
pub fn map_intervals<T, F>(window: &ScanWindow, job: F) -> Result<Vec<(i64, T)>>
where
    T: Send,
    F: Fn(i64) -> Result<T> + Sync,
{
    let ns: Vec<i64> = window.intervals().collect();
    let threads = thread_cap().min(ns.len().max(1));
    if threads <= 1 || ns.len() <= 1 {
        let mut out = Vec::with_capacity(ns.len());
        for n in ns {
            out.push((n, job(n)?));
        }
        return Ok(out);
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<Result<T>>>> =
        (0..ns.len()).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= ns.len() {
                    break;
                }
                let r = job(ns[i]);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    let mut out = Vec::with_capacity(ns.len());
    for (i, slot) in slots.into_iter().enumerate() {
        let r = slot.into_inner().unwrap().expect("job ran");
        out.push((ns[i], r?));
    }
    Ok(out)
}

pub fn thread_cap() -> usize {
    if let Ok(v) = std::env::var("PADIC_SPECTRA_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_single_root_in_interval() {
        // f(lambda) = ln(lambda) - c has one root at e^c inside (4, 16)
        let c = 2.0f64;
        let roots = roots_in_interval(2.0, 2.0, 1, |lam| Ok(lam.ln() - c)).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - c.exp()).abs() < 1e-8 * c.exp());
    }

    #[test]
    fn finds_root_near_endpoint() {
        // root packed very close to the left endpoint of (4, 16)
        let target = 4.0 * (1.0 + 1e-6);
        let roots = roots_in_interval(2.0, 2.0, 1, |lam| Ok(lam - target)).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - target).abs() < 1e-9 * target);
    }

    #[test]
    fn respects_guard_refusals() {
        // refuse the left half of the interval entirely; root in right half
        let roots = roots_in_interval(2.0, 2.0, 0, |lam| {
            if lam < 2.0 {
                Err(Error::GuardViolation("left half".into()))
            } else {
                Ok(lam - 3.0)
            }
        })
        .unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 3.0).abs() < 1e-9 * 3.0);
    }

    #[test]
    fn negative_axis_root() {
        let roots = roots_on_negative_axis((-30.0, 30.0), 256, |lam| Ok(lam + 0.125)).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] + 0.125).abs() < 1e-9);
    }

    #[test]
    fn interval_map_merges_in_order() {
        let window = ScanWindow::new(-3, 3);
        let out = map_intervals(&window, |n| Ok(n * 2)).unwrap();
        let ns: Vec<i64> = out.iter().map(|(n, _)| *n).collect();
        assert_eq!(ns, vec![-3, -2, -1, 0, 1, 2, 3]);
        assert!(out.iter().all(|(n, v)| *v == n * 2));
    }
}
