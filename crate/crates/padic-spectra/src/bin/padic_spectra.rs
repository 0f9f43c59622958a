//! Command-line front end: M-series grids, Green's function evaluation,
//! eigenvalue scans, the Krein resolvent, the worked interaction models, and
//! the built-in selftest. Outputs are JSON (or CSV for `mfunc`) with the run
//! manifest embedded; exit code 0 on success, 2 on validation errors, 3 on
//! numerical refusals.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use padic_spectra::error::Error;
use padic_spectra::green::{self, GreenComponent};
use padic_spectra::jsonio::{
    self, ClassifiedSpectrumJson, EigenvalueRecordJson, RunManifest, Tolerances,
};
use padic_spectra::models::{self, Coupling, FriedrichsSpectrum};
use padic_spectra::mseries::MSeries;
use padic_spectra::operator::{self, RealizationConfig};
use padic_spectra::padic::{PAdicRational, PrimeContext};
use padic_spectra::scan::ScanWindow;
use padic_spectra::selftest;
use padic_spectra::wavelet::{WaveletSum, WaveletTermJson};

#[derive(Parser)]
#[command(
    name = "padic-spectra",
    version,
    about = "Spectral analysis of p-adic fractional operators with point interactions"
)]
struct Cli {
    /// Series evaluation tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate M-series over a lambda grid; emits CSV (lambda, value, bound).
    Mfunc(MfuncArgs),
    /// Evaluate the Green's function at a list of points.
    Greens(GreensArgs),
    /// Locate real eigenvalues of a realization over a scale window.
    Spectrum(SpectrumArgs),
    /// Apply the Krein resolvent to a wavelet sum read from a JSON file.
    Resolvent(ResolventArgs),
    /// Run a worked interaction model preset.
    Model(ModelArgs),
    /// Run the built-in invariant battery.
    Selftest,
}

#[derive(Args)]
struct MfuncArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    alpha: f64,
    /// Distance exponent gamma; omit for M_0.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<i64>,
    /// Evaluate the one-sided difference series M_0 - M_{p^gamma}.
    #[arg(long, default_value_t = false)]
    diff: bool,
    /// Evaluate the termwise derivative instead of the series itself.
    #[arg(long, default_value_t = false)]
    derivative: bool,
    /// Single lambda, real or [re, im].
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Real grid start (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    lambda_from: Option<f64>,
    /// Real grid end (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    lambda_to: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = 100)]
    steps: usize,
}

#[derive(Args)]
struct GreensArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    alpha: f64,
    /// Source center x_k as "a/b".
    #[arg(long, allow_hyphen_values = true)]
    center: String,
    /// Spectral parameter, real or [re, im].
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Comma-separated evaluation points.
    #[arg(long, allow_hyphen_values = true)]
    points: String,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    alpha: f64,
    /// Comma-separated interaction points.
    #[arg(long, allow_hyphen_values = true)]
    points: String,
    /// Coupling matrix, row-major JSON with [re, im] entries.
    #[arg(long = "B")]
    coupling: String,
    /// Eta matrix: "parity" builds the negation permutation, "none" omits it.
    #[arg(long, default_value = "none")]
    eta: String,
    /// Scale window "lo:hi".
    #[arg(long, allow_hyphen_values = true)]
    window: String,
    /// Also scan the negative semi-axis.
    #[arg(long, default_value_t = false)]
    negative_axis: bool,
}

#[derive(Args)]
struct ResolventArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    points: String,
    #[arg(long = "B")]
    coupling: String,
    #[arg(long, default_value = "none")]
    eta: String,
    /// Spectral parameter, real or [re, im].
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Input wavelet sum: JSON list of {N, j, eps_digits, re, im}.
    #[arg(long)]
    input: String,
}

#[derive(Args)]
struct ModelArgs {
    /// Preset: friedrichs | sym2 | pt2 | onepoint.
    #[arg(long)]
    preset: String,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    alpha: f64,
    /// Interaction points (friedrichs preset).
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Distance exponent gamma (sym2 / pt2 presets).
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<i64>,
    /// Inverse-coupling diagonal entry (sym2 / pt2).
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Inverse-coupling off-diagonal entry (sym2 / pt2).
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// One-point coupling: a number, or "inf" for the Friedrichs limit.
    #[arg(long, allow_hyphen_values = true)]
    coupling: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    window: String,
    #[arg(long, default_value_t = false)]
    negative_axis: bool,
    /// Write gnuplot-ready (lambda, characteristic values) traces here.
    #[arg(long)]
    trace: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tols = Tolerances {
        series: cli.tol,
        roots: 1e-10,
    };
    let result = match &cli.command {
        Command::Mfunc(args) => run_mfunc(args, tols, cli.out.as_deref()),
        Command::Greens(args) => run_greens(args, tols, cli.out.as_deref()),
        Command::Spectrum(args) => run_spectrum(args, tols, cli.out.as_deref()),
        Command::Resolvent(args) => run_resolvent(args, tols, cli.out.as_deref()),
        Command::Model(args) => run_model(args, tols, cli.out.as_deref()),
        Command::Selftest => run_selftest(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn parse_window(text: &str) -> Result<(i64, i64), Error> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Error::InvalidParameter(format!("window `{text}`: want lo:hi")))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("window lower bound `{lo}`")))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("window upper bound `{hi}`")))?;
    if lo > hi {
        return Err(Error::EmptyWindow);
    }
    Ok((lo, hi))
}

fn emit(text: &str, out: Option<&str>) -> Result<ExitCode, Error> {
    match out {
        None => {
            println!("{text}");
        }
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| Error::InvalidParameter(format!("cannot create {path}: {e}")))?;
            writeln!(f, "{text}")
                .map_err(|e| Error::InvalidParameter(format!("cannot write {path}: {e}")))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_mfunc(args: &MfuncArgs, tols: Tolerances, out: Option<&str>) -> Result<ExitCode, Error> {
    let ctx = PrimeContext::new(args.p)?;
    let series = MSeries::new(ctx, args.alpha)?;
    let mut manifest = RunManifest::new(
        "mfunc",
        json!({
            "p": args.p, "alpha": args.alpha, "gamma": args.gamma,
            "diff": args.diff, "derivative": args.derivative,
            "lambda": args.lambda, "lambda_from": args.lambda_from,
            "lambda_to": args.lambda_to, "steps": args.steps,
        }),
        tols,
    );
    manifest.output = out.map(str::to_string);

    let grid: Vec<Complex64> = match (&args.lambda, args.lambda_from, args.lambda_to) {
        (Some(single), None, None) => vec![jsonio::parse_complex(single)?],
        (None, Some(from), Some(to)) => {
            let n = args.steps.max(2);
            (0..n)
                .map(|i| Complex64::new(from + (to - from) * i as f64 / (n - 1) as f64, 0.0))
                .collect()
        }
        _ => {
            return Err(Error::InvalidParameter(
                "give either --lambda or both --lambda-from and --lambda-to".into(),
            ))
        }
    };

    let mut lines = Vec::with_capacity(grid.len() + 2);
    lines.push(format!(
        "# manifest: {}",
        serde_json::to_string(&manifest).expect("manifest serializes")
    ));
    lines.push("lambda_re,lambda_im,value_re,value_im,bound".to_string());
    for lambda in grid {
        let eval = match (args.diff, args.derivative, args.gamma) {
            (true, false, Some(g)) => series.diff(g, lambda, tols.series)?,
            (true, _, None) => {
                return Err(Error::InvalidParameter("--diff requires --gamma".into()))
            }
            (true, true, _) => {
                return Err(Error::InvalidParameter(
                    "--diff and --derivative are mutually exclusive".into(),
                ))
            }
            (false, false, None) => series.m0(lambda, tols.series)?,
            (false, false, Some(g)) => series.mgamma(g, lambda, tols.series)?,
            (false, true, None) => series.m0_prime(lambda, tols.series)?,
            (false, true, Some(g)) => series.mgamma_prime(g, lambda, tols.series)?,
        };
        lines.push(format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.3e}",
            lambda.re, lambda.im, eval.value.re, eval.value.im, eval.error_bound
        ));
    }
    emit(&lines.join("\n"), out)
}

fn run_greens(args: &GreensArgs, tols: Tolerances, out: Option<&str>) -> Result<ExitCode, Error> {
    let ctx = PrimeContext::new(args.p)?;
    let series = MSeries::new(ctx, args.alpha)?;
    let center = PAdicRational::parse(&args.center, ctx)?;
    let lambda = jsonio::parse_complex(&args.lambda)?;
    let points = jsonio::parse_points(&args.points, ctx)?;
    let mut manifest = RunManifest::new(
        "greens",
        json!({
            "p": args.p, "alpha": args.alpha, "center": args.center,
            "lambda": jsonio::complex_to_pair(lambda), "points": args.points,
        }),
        tols,
    );
    manifest.output = out.map(str::to_string);
    let values: Vec<Value> = points
        .iter()
        .map(|x| {
            let v = green::eval_h(&series, &center, lambda, x, tols.series)?;
            Ok(json!({ "x": x.to_string(), "value": jsonio::complex_to_pair(v) }))
        })
        .collect::<Result<_, Error>>()?;
    let doc = json!({ "manifest": manifest, "values": values });
    emit(
        &serde_json::to_string_pretty(&doc).expect("doc serializes"),
        out,
    )
}

fn build_config(
    p: u64,
    alpha: f64,
    points: &str,
    coupling: &str,
    eta: &str,
) -> Result<RealizationConfig, Error> {
    let ctx = PrimeContext::new(p)?;
    let points = jsonio::parse_points(points, ctx)?;
    let coupling = jsonio::parse_matrix(coupling)?;
    let eta = match eta {
        "none" => None,
        "parity" => Some(operator::eta_matrix_parity(&points)?),
        other => {
            return Err(Error::InvalidParameter(format!(
                "eta mode `{other}`: use parity or none"
            )))
        }
    };
    RealizationConfig::new(ctx, alpha, points, coupling, eta)
}

fn run_spectrum(
    args: &SpectrumArgs,
    tols: Tolerances,
    out: Option<&str>,
) -> Result<ExitCode, Error> {
    let config = build_config(args.p, args.alpha, &args.points, &args.coupling, &args.eta)?;
    let (lo, hi) = parse_window(&args.window)?;
    let mut window = ScanWindow::new(lo, hi);
    if args.negative_axis {
        window = window.with_negative_axis();
    }
    let mut manifest = RunManifest::new(
        "spectrum",
        json!({
            "p": args.p, "alpha": args.alpha, "points": args.points,
            "B": serde_json::from_str::<Value>(&args.coupling).unwrap_or(Value::Null),
            "eta": args.eta, "window": args.window,
            "negative_axis": args.negative_axis,
        }),
        tols,
    );
    manifest.output = out.map(str::to_string);
    let records = operator::find_real_eigenvalues(&config, &window, tols.series)?;
    let records: Vec<EigenvalueRecordJson> = records.iter().map(Into::into).collect();
    let doc = json!({
        "manifest": manifest,
        "classification": format!("{:?}", operator::classify_realization(&config)),
        "eigenvalues": records,
    });
    emit(
        &serde_json::to_string_pretty(&doc).expect("doc serializes"),
        out,
    )
}

fn run_resolvent(
    args: &ResolventArgs,
    tols: Tolerances,
    out: Option<&str>,
) -> Result<ExitCode, Error> {
    let config = build_config(args.p, args.alpha, &args.points, &args.coupling, &args.eta)?;
    let lambda = jsonio::parse_complex(&args.lambda)?;
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", args.input)))?;
    let terms: Vec<WaveletTermJson> = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("input wavelet JSON: {e}")))?;
    let f = WaveletSum::from_json_terms(config.context(), &terms)?;
    let mut manifest = RunManifest::new(
        "resolvent",
        json!({
            "p": args.p, "alpha": args.alpha, "points": args.points,
            "B": serde_json::from_str::<Value>(&args.coupling).unwrap_or(Value::Null),
            "eta": args.eta, "lambda": jsonio::complex_to_pair(lambda),
            "input": args.input,
        }),
        tols,
    );
    manifest.output = out.map(str::to_string);
    let result = operator::resolvent_apply(&config, lambda, &f, tols.series)?;
    let greens: Vec<Value> = result
        .greens
        .iter()
        .map(|g: &GreenComponent| {
            json!({
                "center": g.center.to_string(),
                "lambda": jsonio::complex_to_pair(g.lambda),
                "weight": jsonio::complex_to_pair(g.weight),
            })
        })
        .collect();
    let doc = json!({
        "manifest": manifest,
        "diagonal": result.diagonal.to_json_terms(),
        "greens": greens,
    });
    emit(
        &serde_json::to_string_pretty(&doc).expect("doc serializes"),
        out,
    )
}

fn run_model(args: &ModelArgs, tols: Tolerances, out: Option<&str>) -> Result<ExitCode, Error> {
    let ctx = PrimeContext::new(args.p)?;
    let (lo, hi) = parse_window(&args.window)?;
    let mut window = ScanWindow::new(lo, hi);
    if args.negative_axis {
        window = window.with_negative_axis();
    }
    let mut manifest = RunManifest::new(
        "model",
        json!({
            "preset": args.preset, "p": args.p, "alpha": args.alpha,
            "points": args.points, "gamma": args.gamma, "a": args.a,
            "b": args.b, "coupling": args.coupling, "window": args.window,
            "negative_axis": args.negative_axis, "trace": args.trace,
        }),
        tols,
    );
    manifest.output = out.map(str::to_string);

    let need = |opt: &Option<String>, name: &str| -> Result<String, Error> {
        opt.clone()
            .ok_or_else(|| Error::InvalidParameter(format!("preset needs --{name}")))
    };
    let need_f = |opt: Option<f64>, name: &str| -> Result<f64, Error> {
        opt.ok_or_else(|| Error::InvalidParameter(format!("preset needs --{name}")))
    };
    let need_i = |opt: Option<i64>, name: &str| -> Result<i64, Error> {
        opt.ok_or_else(|| Error::InvalidParameter(format!("preset needs --{name}")))
    };

    let body: Value = match args.preset.as_str() {
        "friedrichs" => {
            let points = jsonio::parse_points(&need(&args.points, "points")?, ctx)?;
            match models::friedrichs_spectrum(ctx, args.alpha, &points, &window)? {
                FriedrichsSpectrum::TwoPoint(spec) => {
                    let gamma_min = models::recover_gamma_min(&spec).ok();
                    json!({
                        "kind": "two-point",
                        "spectrum": ClassifiedSpectrumJson::from(&spec),
                        "recovered_gamma_min": gamma_min,
                    })
                }
                FriedrichsSpectrum::General(roots) => {
                    let list: Vec<Value> = roots
                        .iter()
                        .map(|(n, lam, mult)| {
                            json!({"band": n, "lambda": lam, "multiplicity": mult})
                        })
                        .collect();
                    json!({ "kind": "general", "roots": list })
                }
            }
        }
        "sym2" => {
            let report = models::two_point_symmetric_spectrum(
                ctx,
                args.alpha,
                need_i(args.gamma, "gamma")?,
                need_f(args.a, "a")?,
                need_f(args.b, "b")?,
                &window,
            )?;
            json!({
                "spectrum": ClassifiedSpectrumJson::from(&report.spectrum),
                "negative_threshold": report.negative_threshold,
                "exceptional": {
                    "checked_m": report.exceptional.checked_m,
                    "collisions": report.exceptional.collisions,
                    "unchecked_below": report.exceptional.unchecked_below,
                },
            })
        }
        "pt2" => {
            let roots = models::pt_two_point_real_eigenvalues(
                ctx,
                args.alpha,
                need_i(args.gamma, "gamma")?,
                need_f(args.a, "a")?,
                need_f(args.b, "b")?,
                &window,
            )?;
            let list: Vec<Value> = roots
                .iter()
                .map(|(n, lam)| {
                    if *n == i64::MIN {
                        json!({"band": "negative-axis", "lambda": lam})
                    } else {
                        json!({"band": n, "lambda": lam})
                    }
                })
                .collect();
            json!({ "roots": list })
        }
        "onepoint" => {
            let coupling = Coupling::parse(&need(&args.coupling, "coupling")?)?;
            let roots = models::one_point_eigenvalues(ctx, args.alpha, coupling, &window)?;
            let list: Vec<Value> = roots
                .iter()
                .map(|r| match r.band {
                    Some(n) => json!({"band": n, "lambda": r.lambda}),
                    None => json!({"band": "negative-axis", "lambda": r.lambda}),
                })
                .collect();
            let homogeneity = match models::homogeneity_check(ctx, args.alpha, coupling, lo.max(0))
            {
                Ok(models::HomogeneityReport::DilationInvariant {
                    recurrence_defect,
                    basis_defect,
                }) => json!({
                    "dilation_invariant": true,
                    "recurrence_defect": recurrence_defect,
                    "basis_defect": basis_defect,
                }),
                Ok(models::HomogeneityReport::NotHomogeneous {
                    lambda_root,
                    m0_at_scaled,
                    homogeneous_value,
                    required_value,
                }) => json!({
                    "dilation_invariant": false,
                    "lambda_root": lambda_root,
                    "m0_at_scaled_root": m0_at_scaled,
                    "homogeneous_value": homogeneous_value,
                    "required_value": required_value,
                }),
                Err(_) => Value::Null,
            };
            json!({ "roots": list, "homogeneity": homogeneity })
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "preset `{other}`: use friedrichs|sym2|pt2|onepoint"
            )))
        }
    };

    if let Some(trace_path) = &args.trace {
        write_trace(ctx, args, &window, trace_path, tols)?;
    }

    let doc = json!({ "manifest": manifest, "preset": args.preset, "result": body });
    emit(
        &serde_json::to_string_pretty(&doc).expect("doc serializes"),
        out,
    )
}

/// Gnuplot-ready characteristic traces: one sample row per lambda with the
/// preset's factor values.
fn write_trace(
    ctx: PrimeContext,
    args: &ModelArgs,
    window: &ScanWindow,
    path: &str,
    tols: Tolerances,
) -> Result<(), Error> {
    let series = MSeries::new(ctx, args.alpha)?;
    let p = ctx.prime_f64();
    let mut rows: Vec<String> = vec!["# lambda value1 value2".to_string()];
    let gamma = args.gamma.unwrap_or(0);
    let coupling = match &args.coupling {
        Some(c) => Coupling::parse(c)?,
        None => Coupling::Friedrichs,
    };
    for n in window.intervals() {
        for i in 1..200 {
            let s = i as f64 / 200.0;
            let lambda = Complex64::new(p.powf(args.alpha * (n as f64 + s)), 0.0);
            let (v1, v2) = match args.preset.as_str() {
                "pt2" => {
                    let d = series.diff(gamma, lambda, tols.series);
                    let m0 = series.m0(lambda, tols.series);
                    let mg = series.mgamma(gamma, lambda, tols.series);
                    match (d, m0, mg) {
                        (Ok(d), Ok(m0), Ok(mg)) => {
                            let a = args.a.unwrap_or(0.0);
                            let b = args.b.unwrap_or(0.0);
                            (d.real() * (m0.real() + mg.real()) + a * a + b * b, f64::NAN)
                        }
                        _ => continue,
                    }
                }
                "onepoint" => {
                    let target = match coupling {
                        Coupling::Finite(b) => -1.0 / b,
                        _ => 0.0,
                    };
                    match series.m0(lambda, tols.series) {
                        Ok(m0) => (m0.real() - target, f64::NAN),
                        Err(_) => continue,
                    }
                }
                _ => {
                    let d = series.diff(gamma, lambda, tols.series);
                    let m0 = series.m0(lambda, tols.series);
                    let mg = series.mgamma(gamma, lambda, tols.series);
                    match (d, m0, mg) {
                        (Ok(d), Ok(m0), Ok(mg)) => {
                            let a = args.a.unwrap_or(0.0);
                            let b = args.b.unwrap_or(0.0);
                            (d.real() + a - b, m0.real() + mg.real() + a + b)
                        }
                        _ => continue,
                    }
                }
            };
            rows.push(format!("{:.17e} {:.17e} {:.17e}", lambda.re, v1, v2));
        }
    }
    std::fs::write(path, rows.join("\n"))
        .map_err(|e| Error::InvalidParameter(format!("cannot write {path}: {e}")))?;
    Ok(())
}

fn run_selftest() -> Result<ExitCode, Error> {
    let outcomes = selftest::run();
    let mut all_pass = true;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<28} {}", o.name, o.detail);
        all_pass &= o.passed;
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} checks passed", outcomes.len());
    if all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
