//! JSON shapes shared by the CLI and the C bindings: complex numbers as
//! [re, im] pairs, rationals as "a/b" strings, matrices row-major, and the
//! run manifest embedded in every output for reproducibility.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::models::ClassifiedSpectrum;
use crate::operator::{EigenvalueRecord, IntervalTag};
use crate::padic::{PAdicRational, PrimeContext};

pub fn complex_to_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn pair_to_complex(v: &[f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// Parses a complex flag value: either a bare real number or a [re, im]
/// JSON pair.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s = text.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Ok(Complex64::new(x, 0.0));
    }
    let v: [f64; 2] = serde_json::from_str(s)
        .map_err(|_| Error::InvalidParameter(format!("complex value `{s}`")))?;
    Ok(pair_to_complex(&v))
}

/// Parses a row-major complex matrix from JSON: entries are [re, im] pairs
/// or bare numbers.
pub fn parse_matrix(text: &str) -> Result<CMat> {
    let rows: Vec<Vec<Value>> = serde_json::from_str(text.trim())
        .map_err(|_| Error::InvalidParameter(format!("matrix JSON `{text}`")))?;
    let parsed: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| match v {
                    Value::Number(x) => Ok(Complex64::new(
                        x.as_f64().ok_or_else(|| {
                            Error::InvalidParameter("non-finite matrix entry".into())
                        })?,
                        0.0,
                    )),
                    Value::Array(pair) if pair.len() == 2 => {
                        let re = pair[0].as_f64();
                        let im = pair[1].as_f64();
                        match (re, im) {
                            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                            _ => Err(Error::InvalidParameter("bad complex pair".into())),
                        }
                    }
                    _ => Err(Error::InvalidParameter("bad matrix entry".into())),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    CMat::from_rows(&parsed)
}

pub fn matrix_to_json(m: &CMat) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.size())
        .map(|i| (0..m.size()).map(|j| complex_to_pair(m[(i, j)])).collect())
        .collect();
    serde_json::to_value(rows).expect("matrix serializes")
}

/// Parses a comma-separated list of rationals "x1,x2,...".
pub fn parse_points(text: &str, ctx: PrimeContext) -> Result<Vec<PAdicRational>> {
    text.split(',')
        .map(|s| PAdicRational::parse(s, ctx))
        .collect()
}

/// Every output embeds the command, full parameter set, tool version, and
/// tolerances that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub parameters: Value,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    pub series: f64,
    pub roots: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            series: 1e-12,
            roots: 1e-10,
        }
    }
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, tolerances: Tolerances) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            parameters,
            tolerances,
            output: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenvalueRecordJson {
    pub lambda: [f64; 2],
    pub interval: String,
    pub multiplicity: usize,
    pub residual: f64,
    pub extension: bool,
}

impl From<&EigenvalueRecord> for EigenvalueRecordJson {
    fn from(r: &EigenvalueRecord) -> Self {
        EigenvalueRecordJson {
            lambda: complex_to_pair(r.lambda),
            interval: match r.interval {
                IntervalTag::Band(n) => format!("N={n}"),
                IntervalTag::NegativeAxis => "negative-axis".to_string(),
            },
            multiplicity: r.multiplicity,
            residual: r.residual,
            extension: r.extension,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifiedSpectrumJson {
    pub type1: Vec<BandRootJson>,
    pub type2: Vec<BandRootJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra_type1_negative: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra_type2_negative: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandRootJson {
    pub band: i64,
    pub lambda: f64,
}

impl From<&ClassifiedSpectrum> for ClassifiedSpectrumJson {
    fn from(s: &ClassifiedSpectrum) -> Self {
        let conv = |v: &[(i64, f64)]| {
            v.iter()
                .map(|(band, lambda)| BandRootJson {
                    band: *band,
                    lambda: *lambda,
                })
                .collect()
        };
        ClassifiedSpectrumJson {
            type1: conv(&s.type1),
            type2: conv(&s.type2),
            extra_type1_negative: s.extra_type1_negative,
            extra_type2_negative: s.extra_type2_negative,
        }
    }
}
